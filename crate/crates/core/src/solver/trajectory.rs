use std::io::Write;

use crate::field::SpectralField;
use crate::scalar::Real;

pub const CSV_HEADER: &str = "t,mass,l2gamma_sq,I,A,E,N_err_sq";
pub const CSV_HEADER_RESCALED: &str = "t,mass,l2gamma_sq,I,A,E,N_err_sq,micro_err";

/// Extra columns recorded by rescaled runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledSample<T> {
    /// `‖f − ρ M‖_{L²_{M^{-1}}}`.
    pub micro_err: T,
    /// `‖f‖_{L²_{M^{-1}}}`.
    pub f_norm: T,
    /// `‖∂_θ f‖_{L²_{M^{-1}}}`.
    pub dtheta_f_norm: T,
}

/// One diagnostic row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample<T> {
    pub t: f64,
    pub mass: T,
    /// `‖f − f_∞‖²_{L²_γ}`.
    pub l2gamma_sq: T,
    /// `I[f]`.
    pub dissipation: T,
    pub a: T,
    /// `½‖f − f_∞‖² + αA`.
    pub energy: T,
    /// `‖N − N_∞‖²_{L²_γ̄}`.
    pub n_err_sq: T,
    pub rescaled: Option<RescaledSample<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub samples: Vec<EnergySample<T>>,
    pub final_field: Option<SpectralField<T>>,
    pub snapshots: Vec<(f64, SpectralField<T>)>,
}

impl<T: Real> Default for Trajectory<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> Trajectory<T> {
    pub fn new() -> Self {
        Self {
            samples: Vec::new(),
            final_field: None,
            snapshots: Vec::new(),
        }
    }

    pub(crate) fn push_sample(&mut self, s: EnergySample<T>) {
        self.samples.push(s);
    }

    pub fn final_field(&self) -> &SpectralField<T> {
        self.final_field.as_ref().expect("trajectory finished")
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn is_rescaled(&self) -> bool {
        self.samples.first().is_some_and(|s| s.rescaled.is_some())
    }

    /// Writes the samples as CSV with the fixed column order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let rescaled = self.is_rescaled();
        writeln!(
            w,
            "{}",
            if rescaled {
                CSV_HEADER_RESCALED
            } else {
                CSV_HEADER
            }
        )?;
        for s in &self.samples {
            write!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                s.t,
                s.mass.to_f64_lossy(),
                s.l2gamma_sq.to_f64_lossy(),
                s.dissipation.to_f64_lossy(),
                s.a.to_f64_lossy(),
                s.energy.to_f64_lossy(),
                s.n_err_sq.to_f64_lossy()
            )?;
            if let Some(r) = s.rescaled {
                write!(w, ",{:e}", r.micro_err.to_f64_lossy())?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}
