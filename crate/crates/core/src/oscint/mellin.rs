//! Mellin transforms of compactly supported weights and their inversion.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::bump::Smooth;
use super::quadrature::{oscillatory_quadrature, GaussLegendre, QuadratureConfig};
use crate::error::{Error, Result};

/// `int V(x) x^{s-1} dx` over the support of `V`.
pub fn mellin_transform(v: &dyn Smooth, s: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let (lo, hi) = v.support();
    if lo <= 0.0 && s.re <= 0.0 {
        return Err(Error::Domain(format!(
            "Mellin integral diverges at 0 for Re s = {}",
            s.re
        )));
    }
    let lo = lo.max(f64::MIN_POSITIVE);
    let tau = s.im;
    let sigma = s.re;
    oscillatory_quadrature(
        |x| v.value(x) * x.powf(sigma - 1.0),
        |x| tau * x.ln() / TAU,
        lo,
        hi,
        cfg,
    )
    .map(|r| r.value)
}

/// Samples of `V~(c + i tau)` on a Gauss–Legendre grid of `[-T, T]`.
#[derive(Debug, Clone)]
pub struct MellinPair {
    pub c: f64,
    pub height: f64,
    /// `(tau, weight, V~(c + i tau))`
    pub samples: Vec<(f64, f64, Complex64)>,
}

impl MellinPair {
    pub fn new(
        v: &dyn Smooth,
        c: f64,
        height: f64,
        panels: usize,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        let gl = GaussLegendre::new(16);
        let mut samples = Vec::new();
        for (tau, w) in gl.composite(-height, height, panels) {
            let val = mellin_transform(v, Complex64::new(c, tau), cfg)?;
            samples.push((tau, w, val));
        }
        Ok(Self { c, height, samples })
    }

    /// `(1/2 pi i) int_{(c)} V~(s) x^{-s} ds`, truncated at `|Im s| <= T`.
    pub fn reconstruct(&self, x: f64) -> f64 {
        let lx = x.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(tau, w, val) in &self.samples {
            acc += val * Complex64::from_polar(w * (-self.c * lx).exp(), -tau * lx);
        }
        acc.re / TAU
    }
}

/// Ratios `|V~(sigma + 2i tau)| / |V~(sigma + i tau)|` over successive octaves
/// starting at `tau0`; shrinking ratios mean faster than polynomial decay.
pub fn mellin_octave_ratios(
    v: &dyn Smooth,
    sigma: f64,
    tau0: f64,
    octaves: usize,
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let taus: Vec<f64> = (0..=octaves).map(|k| tau0 * 2f64.powi(k as i32)).collect();
    let d = mellin_decay_profile(v, sigma, &taus, cfg)?;
    Ok(d.windows(2).map(|w| w[1] / w[0]).collect())
}

/// `|V~(sigma + i tau)|` at each `tau`.
pub fn mellin_decay_profile(
    v: &dyn Smooth,
    sigma: f64,
    taus: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    taus.iter()
        .map(|&t| mellin_transform(v, Complex64::new(sigma, t), cfg).map(|z| z.norm()))
        .collect()
}
