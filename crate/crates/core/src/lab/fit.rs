use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Exponential fit `value ≈ e^{intercept − rate·t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares; `r_squared = 1` when `y` is constant.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Fit(format!(
            "need two or more paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Least-squares line through `(t, ln value)`; `rate = −slope`.
pub fn fit_decay_rate(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.len() < 5 {
        return Err(Error::Fit(format!(
            "need at least 5 samples, got {}",
            samples.len()
        )));
    }
    if let Some((t, v)) = samples.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::Fit(format!("nonpositive value {v} at t = {t}")));
    }
    let t: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let f = linear_fit(&t, &y)?;
    Ok(DecayFit {
        rate: -f.slope,
        intercept: f.intercept,
        r_squared: f.r_squared,
    })
}
