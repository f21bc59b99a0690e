use crate::equilibrium::EquilibriumState;
use crate::params::SimParams;
use crate::scalar::Real;

use super::default_alpha;

/// Both sides of the small-coupling/large-noise conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport<T> {
    /// `C_∞·max(√(κ̃/m), κ̃, mκ̃)`.
    pub lhs_b12: T,
    /// `σ̃`.
    pub rhs: T,
    pub satisfied_b12: bool,
    /// `(κ̃/α)(‖N_∞‖_{L¹} + √π‖N_∞‖_{L²_γ̄})`, compared with `σ̃/4`.
    pub lhs_c13_1: T,
    pub rhs_c13_1: T,
    /// `κ̃(3‖N_∞‖_{L¹} + √π‖N_∞‖_{L²_γ̄})`, compared with `σ̃/(2m)`.
    pub lhs_c13_2: T,
    pub rhs_c13_2: T,
    pub satisfied_c13: bool,
    pub alpha: T,
    /// Whether `α√σ̃ C_P ≤ 1/2`.
    pub alpha_compliant: bool,
    pub c_inf: T,
    /// Largest `κ̃` for which both energy-dissipation conditions hold at this `σ̃`, `m`, `α`.
    pub kappa_t_max: T,
}

impl<T: Real> RegimeReport<T> {
    /// The energy-dissipation conditions hold; these are what the decay argument uses.
    pub fn satisfied(&self) -> bool {
        self.satisfied_c13
    }
}

fn norm_sums<T: Real>(eq: &EquilibriumState<T>) -> (T, T) {
    let l1 = eq.l1_norm();
    let l2 = T::PI().sqrt() * eq.l2_gbar_norm();
    (l1 + l2, T::lit(3.0) * l1 + l2)
}

/// `C_∞ = max(80a, 4√a, 2b)` with `a = ‖N_∞‖_{L¹} + √π‖N_∞‖_{L²_γ̄}` and
/// `b = 3‖N_∞‖_{L¹} + √π‖N_∞‖_{L²_γ̄}`; with this value the coupling/noise
/// condition implies both energy-dissipation conditions.
pub fn default_c_inf<T: Real>(eq: &EquilibriumState<T>) -> T {
    let (a, b) = norm_sums(eq);
    (T::lit(80.0) * a)
        .max(T::lit(4.0) * a.sqrt())
        .max(T::lit(2.0) * b)
}

/// `min(σ̃α/(4a), σ̃/(2mb))`.
pub fn largest_admissible_kappa<T: Real>(params: &SimParams<T>, eq: &EquilibriumState<T>) -> T {
    let (a, b) = norm_sums(eq);
    let s = params.sigma_t();
    let alpha = default_alpha(params);
    (s * alpha / (T::lit(4.0) * a)).min(s / (T::lit(2.0) * params.m() * b))
}

/// Evaluates both regime conditions; `c_inf = None` uses [`default_c_inf`].
pub fn regime_check<T: Real>(
    params: &SimParams<T>,
    eq: &EquilibriumState<T>,
    c_inf: Option<T>,
) -> RegimeReport<T> {
    let c_inf = c_inf.unwrap_or_else(|| default_c_inf(eq));
    let m = params.m();
    let k = params.kappa_t();
    let s = params.sigma_t();
    let alpha = default_alpha(params);
    let lhs_b12 = c_inf * (k / m).sqrt().max(k).max(m * k);
    let (a, b) = norm_sums(eq);
    let lhs_c13_1 = k / alpha * a;
    let rhs_c13_1 = s / T::lit(4.0);
    let lhs_c13_2 = k * b;
    let rhs_c13_2 = s / (T::lit(2.0) * m);
    RegimeReport {
        lhs_b12,
        rhs: s,
        satisfied_b12: lhs_b12 <= s,
        lhs_c13_1,
        rhs_c13_1,
        lhs_c13_2,
        rhs_c13_2,
        satisfied_c13: lhs_c13_1 <= rhs_c13_1 && lhs_c13_2 <= rhs_c13_2,
        alpha,
        alpha_compliant: super::alpha_is_compliant(alpha, s),
        c_inf,
        kappa_t_max: largest_admissible_kappa(params, eq),
    }
}
