//! Binary and CSV dumps of a [`SpectralField`].
//!
//! Binary layout, little-endian: `u64` n_theta, n_hermite, node count; `f64`
//! σ̃, κ̃, m, time; the node frequencies `ν_j`; then every coefficient as an
//! interleaved `(re, im)` pair of `f64`, `j`-major, then `n`, then ascending `k`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::mode_of;
use crate::scalar::Real;
use crate::Complex;

/// Scalar metadata stored alongside the coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotHeader {
    pub n_theta: usize,
    pub n_hermite: usize,
    pub n_nodes: usize,
    pub sigma_t: f64,
    pub kappa_t: f64,
    pub m: f64,
    pub time: f64,
}

pub fn write_snapshot<T: Real, W: Write>(
    field: &SpectralField<T>,
    kappa_t: f64,
    m: f64,
    time: f64,
    mut w: W,
) -> Result<()> {
    for v in [field.n_theta(), field.n_hermite(), field.n_nodes()] {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    for v in [field.sigma_t().to_f64_lossy(), kappa_t, m, time] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in field.nu() {
        w.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    for c in field.coeffs() {
        w.write_all(&c.re.to_f64_lossy().to_le_bytes())?;
        w.write_all(&c.im.to_f64_lossy().to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|e| Error::Snapshot(format!("truncated header: {e}")))?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)
        .map_err(|e| Error::Snapshot(format!("truncated data: {e}")))?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_snapshot<T: Real, R: Read>(mut r: R) -> Result<(SnapshotHeader, SpectralField<T>)> {
    let n_theta = read_u64(&mut r)? as usize;
    let n_hermite = read_u64(&mut r)? as usize;
    let n_nodes = read_u64(&mut r)? as usize;
    let total = n_theta
        .checked_mul(n_hermite + 1)
        .and_then(|x| x.checked_mul(n_nodes))
        .filter(|&x| x > 0 && x < (1 << 32))
        .ok_or_else(|| {
            Error::Snapshot(format!(
                "implausible shape {n_theta} x {n_hermite} x {n_nodes}"
            ))
        })?;
    let header = SnapshotHeader {
        n_theta,
        n_hermite,
        n_nodes,
        sigma_t: read_f64(&mut r)?,
        kappa_t: read_f64(&mut r)?,
        m: read_f64(&mut r)?,
        time: read_f64(&mut r)?,
    };
    let nu = (0..n_nodes)
        .map(|_| read_f64(&mut r).map(T::lit))
        .collect::<Result<Vec<_>>>()?;
    let mut coeffs = Vec::with_capacity(total);
    for _ in 0..total {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        coeffs.push(Complex::new(T::lit(re), T::lit(im)));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::Snapshot("trailing bytes after coefficients".into()));
    }
    let field = SpectralField::from_parts(n_theta, nu, T::lit(header.sigma_t), coeffs)?;
    Ok((header, field))
}

/// One coefficient per row: `j,n,k,re,im`.
pub fn write_snapshot_csv<T: Real, W: Write>(field: &SpectralField<T>, mut w: W) -> Result<()> {
    writeln!(w, "j,n,k,re,im")?;
    let nt = field.n_theta();
    for j in 0..field.n_nodes() {
        for n in 0..field.n_rows() {
            for (idx, c) in field.row(j, n).iter().enumerate() {
                writeln!(
                    w,
                    "{j},{n},{},{:e},{:e}",
                    mode_of(nt, idx),
                    c.re.to_f64_lossy(),
                    c.im.to_f64_lossy()
                )?;
            }
        }
    }
    Ok(())
}
