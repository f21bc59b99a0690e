use crate::error::{Error, Result};
use crate::scalar::Real;

/// Physical parameters of the kinetic model.
///
/// The rescaled coupling `κ̃ = κ/m` and noise `σ̃ = σ/m` are the primary stored
/// quantities; the physical `κ` and `σ` are always recovered as `κ̃·m`, `σ̃·m`, so
/// the two views can never disagree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams<T> {
    m: T,
    kappa_t: T,
    sigma_t: T,
    epsilon: Option<T>,
}

impl<T: Real> SimParams<T> {
    /// Builds parameters from the physical mass, coupling strength and noise intensity.
    pub fn new(m: T, kappa: T, sigma: T) -> Result<Self> {
        check_physical(m, kappa, sigma)?;
        Ok(Self {
            m,
            kappa_t: kappa / m,
            sigma_t: sigma / m,
            epsilon: None,
        })
    }

    /// Builds parameters directly from `m`, `κ̃` and `σ̃`.
    pub fn from_rescaled(m: T, kappa_t: T, sigma_t: T) -> Result<Self> {
        check_physical(m, kappa_t, sigma_t)?;
        Ok(Self {
            m,
            kappa_t,
            sigma_t,
            epsilon: None,
        })
    }

    /// Switches on diffusion-limit mode with rescaling mass `ε`.
    pub fn with_epsilon(mut self, epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::InvalidParams(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        self.epsilon = Some(epsilon);
        Ok(self)
    }

    pub fn m(&self) -> T {
        self.m
    }

    pub fn kappa(&self) -> T {
        self.kappa_t * self.m
    }

    pub fn sigma(&self) -> T {
        self.sigma_t * self.m
    }

    pub fn kappa_t(&self) -> T {
        self.kappa_t
    }

    pub fn sigma_t(&self) -> T {
        self.sigma_t
    }

    pub fn epsilon(&self) -> Option<T> {
        self.epsilon
    }

    /// Same parameters with a different rescaled coupling.
    pub fn with_kappa_t(mut self, kappa_t: T) -> Result<Self> {
        check_physical(self.m, kappa_t, self.sigma_t)?;
        self.kappa_t = kappa_t;
        Ok(self)
    }
}

fn check_physical<T: Real>(m: T, kappa: T, sigma: T) -> Result<()> {
    if !(m > T::zero()) || !m.is_finite() {
        return Err(Error::InvalidParams(format!(
            "mass m must be positive, got {m}"
        )));
    }
    if !(kappa >= T::zero()) || !kappa.is_finite() {
        return Err(Error::InvalidParams(format!(
            "coupling must be nonnegative, got {kappa}"
        )));
    }
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::InvalidParams(format!(
            "noise intensity must be positive, got {sigma}"
        )));
    }
    Ok(())
}
