use rayon::prelude::*;

use crate::equilibrium::EquilibriumState;
use crate::error::Result;
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::moments::moment_coeffs;
use crate::norms::{density_error_sq, dissipation, l2_gamma_sq, macro_l2_sq};
use crate::scalar::Real;

/// One inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub lhs: f64,
    pub rhs: f64,
}

impl Check {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// Holds up to `slack·max(1, |rhs|)`.
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack * self.rhs.abs().max(1.0)
    }
}

/// Inequalities evaluated on a single field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryRow {
    pub sigma_t: f64,
    /// `‖f − f_∞‖²_{L²_γ} ≤ I[f] + ‖N − N_∞‖²_{L²_γ̄}`.
    pub poincare: Check,
    /// `‖J‖²_{L²_γ̄} ≤ σ̃ I[f]`.
    pub flux: Check,
    /// `‖P − σ̃N‖²_{L²_γ̄} ≤ 3σ̃² I[f]`.
    pub pressure: Check,
    /// `‖f − f_∞‖²_{L²_γ} ≤ σ̃ I[f] + ‖N − N_∞‖²_{L²_γ̄}`, the form that holds for every `σ̃`.
    pub poincare_scaled: Check,
    /// `‖J‖²_{L²_γ̄} ≤ σ̃² I[f]`, the form that holds for every `σ̃`.
    pub flux_scaled: Check,
}

impl BatteryRow {
    pub fn evaluate<T: Real>(
        field: &SpectralField<T>,
        eq: &EquilibriumState<T>,
        grid: &Grid<T>,
    ) -> Result<Self> {
        let s = field.sigma_t();
        let dist = l2_gamma_sq(field, Some(eq), grid).to_f64_lossy();
        let diss = dissipation(field, grid).to_f64_lossy();
        let nerr = density_error_sq(field, eq, grid).to_f64_lossy();
        let m = moment_coeffs(field)?;
        let jn = macro_l2_sq(&m.j, grid).to_f64_lossy();
        let p_minus: Vec<Vec<_>> =
            m.p.iter()
                .zip(&m.n)
                .map(|(p, n)| p.iter().zip(n).map(|(a, b)| *a - *b * s).collect())
                .collect();
        let pn = macro_l2_sq(&p_minus, grid).to_f64_lossy();
        let sf = s.to_f64_lossy();
        Ok(Self {
            sigma_t: sf,
            poincare: Check {
                lhs: dist,
                rhs: diss + nerr,
            },
            flux: Check {
                lhs: jn,
                rhs: sf * diss,
            },
            pressure: Check {
                lhs: pn,
                rhs: 3.0 * sf * sf * diss,
            },
            poincare_scaled: Check {
                lhs: dist,
                rhs: sf * diss + nerr,
            },
            flux_scaled: Check {
                lhs: jn,
                rhs: sf * sf * diss,
            },
        })
    }

    /// The three stated inequalities hold.
    pub fn passes(&self, slack: f64) -> bool {
        self.poincare.holds(slack) && self.flux.holds(slack) && self.pressure.holds(slack)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryReport {
    pub rows: Vec<BatteryRow>,
    pub slack: f64,
}

impl BatteryReport {
    pub fn violations_poincare(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| !r.poincare.holds(self.slack))
            .count()
    }

    pub fn violations_flux(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| !r.flux.holds(self.slack))
            .count()
    }

    pub fn violations_pressure(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| !r.pressure.holds(self.slack))
            .count()
    }

    pub fn violations_scaled(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| !r.poincare_scaled.holds(self.slack) || !r.flux_scaled.holds(self.slack))
            .count()
    }

    pub fn total_violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.passes(self.slack)).count()
    }

    pub fn passed(&self) -> bool {
        self.total_violations() == 0
    }

    /// Smallest margin of each stated inequality.
    pub fn worst_margins(&self) -> (f64, f64, f64) {
        let min = |f: fn(&BatteryRow) -> f64| self.rows.iter().map(f).fold(f64::INFINITY, f64::min);
        (
            min(|r| r.poincare.margin()),
            min(|r| r.flux.margin()),
            min(|r| r.pressure.margin()),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "index,sigma_t,poincare_lhs,poincare_rhs,flux_lhs,flux_rhs,pressure_lhs,pressure_rhs,poincare_scaled_rhs,flux_scaled_rhs,pass\n",
        );
        for (i, r) in self.rows.iter().enumerate() {
            out.push_str(&format!(
                "{i},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}\n",
                r.sigma_t,
                r.poincare.lhs,
                r.poincare.rhs,
                r.flux.lhs,
                r.flux.rhs,
                r.pressure.lhs,
                r.pressure.rhs,
                r.poincare_scaled.rhs,
                r.flux_scaled.rhs,
                r.passes(self.slack)
            ));
        }
        out
    }
}

/// Evaluates every field against the equilibrium of matching mass; rows keep input order.
pub fn inequality_battery<T: Real>(
    fields: &[SpectralField<T>],
    grid: &Grid<T>,
    slack: f64,
) -> Result<BatteryReport> {
    let rows = fields
        .par_iter()
        .map(|f| {
            let eq = EquilibriumState::from_field(f, grid)?;
            BatteryRow::evaluate(f, &eq, grid)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatteryReport { rows, slack })
}
