//! Delta-symbol expansion of `[n = 0]` into additive characters with smooth
//! weights, and the derived `g(q, x)` weights.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::expsums::ramanujan_sum;
use crate::oscint::quadrature::{integrate_panels, GaussLegendre, QuadratureConfig};
use crate::oscint::bump::derivative_bounds;
use crate::oscint::{Bump, Plateau, Smooth};
use crate::report::{ReportRow, VerificationReport};

/// Threshold exponent splitting small from large moduli, `q <= Q^{1 - SPLIT_EPS}`.
pub const SPLIT_EPS: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaKernel {
    pub big_q: f64,
    omega_norm: f64,
}

fn raw_omega(big_q: f64, y: f64) -> f64 {
    let z = (4.0 * y - 3.0 * big_q) / big_q;
    if z.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - z * z)).exp()
    }
}

impl DeltaKernel {
    /// Normalizes `omega` so that `sum_{d >= 1} omega(d) = 1`.
    pub fn new(big_q: f64) -> Result<Self> {
        if !(big_q >= 1.0) {
            return Err(Error::Domain(format!("Q must be at least 1, got {big_q}")));
        }
        let total: f64 = (1..=big_q.floor() as u64).map(|d| raw_omega(big_q, d as f64)).sum();
        if total <= 0.0 {
            return Err(Error::Domain(format!("no integer lies in (Q/2, Q) for Q = {big_q}")));
        }
        Ok(Self {
            big_q,
            omega_norm: 1.0 / total,
        })
    }

    /// Partition weight supported in `(Q/2, Q)`.
    pub fn omega(&self, y: f64) -> f64 {
        self.omega_norm * raw_omega(self.big_q, y)
    }

    /// `f(u) = exp(1 - 1/(1 - (u/Q^2)^2))`, supported in `(-Q^2, Q^2)` with `f(0) = 1`.
    pub fn envelope(&self, u: f64) -> f64 {
        let s = u / (self.big_q * self.big_q);
        if s.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    }

    /// `c_j = max |f^(j)| Q^{2j}` for `j = 0..=order`, sampled.
    pub fn envelope_derivative_constants(&self, order: usize) -> Vec<f64> {
        let qq = self.big_q * self.big_q;
        let f = Bump::new(-qq, qq);
        derivative_bounds(&f, order, 4000)
            .into_iter()
            .enumerate()
            .map(|(j, c)| c * qq.powi(j as i32))
            .collect()
    }

    /// Largest modulus with a non-zero kernel on `|u| <= Q^2`.
    pub fn max_modulus(&self) -> u64 {
        (2.0 * self.big_q).floor() as u64
    }

    /// `Delta_q(u) = sum_r (qr)^{-1} (omega(qr) - omega(|u|/(qr)))`.
    pub fn delta_kernel_weight(&self, q: u64, u: f64) -> f64 {
        assert!(q >= 1);
        let qf = q as f64;
        let big_q = self.big_q;
        let mut s = 0.0;
        let mut r = 1u64;
        while qf * r as f64 <= big_q {
            let d = qf * r as f64;
            s += self.omega(d) / d;
            r += 1;
        }
        let au = u.abs();
        if au > 0.0 {
            // omega(|u|/(qr)) needs Q/2 < |u|/(qr) < Q
            let rlo = (au / (qf * big_q)).floor().max(1.0) as u64;
            let rhi = (2.0 * au / (qf * big_q)).ceil() as u64;
            for r in rlo..=rhi {
                let d = qf * r as f64;
                s -= self.omega(au / d) / d;
            }
        }
        s
    }

    /// `1/(Q(q+Q)) + 1/(|u| + qQ)`.
    pub fn kernel_envelope(&self, q: u64, u: f64) -> f64 {
        let (qf, big_q) = (q as f64, self.big_q);
        1.0 / (big_q * (qf + big_q)) + 1.0 / (u.abs() + qf * big_q)
    }

    fn g_integrand(&self, q: u64, x: f64, k: u32, u: f64) -> f64 {
        let h = self.delta_kernel_weight(q, u) * self.envelope(u);
        if h == 0.0 {
            return 0.0;
        }
        let w = TAU * u * x / (q as f64 * self.big_q);
        // g^{(k)} = (-2 pi i/(qQ))^k int h u^k e(-ux/(qQ)) du; h even, so only the
        // part of u^k e(...) even in u survives.
        let osc = match k % 2 {
            0 => w.cos(),
            _ => -w.sin(),
        };
        2.0 * h * u.powi(k as i32) * osc
    }

    /// `g(q, x) = int Delta_q(u) f(u) e(-ux/(qQ)) du` by adaptive quadrature.
    pub fn g_weight(&self, q: u64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
        self.g_derivative(q, x, 0, cfg)
    }

    /// `d^k/dx^k g(q, x)` by differentiating under the integral (real, since
    /// `Delta_q f` is even).
    pub fn g_derivative(&self, q: u64, x: f64, k: u32, cfg: &QuadratureConfig) -> Result<f64> {
        if q > self.max_modulus() {
            return Ok(0.0);
        }
        let qq = self.big_q * self.big_q;
        let width = (q as f64 * self.big_q) / (4.0 * x.abs() + 1.0);
        let panels = ((qq / width).ceil() as usize).max(16);
        let r = integrate_panels(|u| Complex64::new(self.g_integrand(q, x, k, u), 0.0), 0.0, qq, panels, cfg)?;
        // odd k: the full-line integral is i times the half-line one, and (-i)^k i = +-1
        let scale = (TAU / (q as f64 * self.big_q)).powi(k as i32);
        let sign = if k % 4 < 2 { 1.0 } else { -1.0 };
        Ok(sign * scale * r.value.re)
    }

    /// `g(q, x)` at many `x` from one sampling of `Delta_q f` on a
    /// composite Gauss–Legendre grid resolving the highest requested frequency.
    pub fn g_weight_grid(&self, q: u64, xs: &[f64]) -> Vec<f64> {
        self.g_weight_grid_with(q, xs, 8.0)
    }

    /// As [`Self::g_weight_grid`] with `panels_per_cycle` Gauss–Legendre panels
    /// per cycle of the fastest oscillation in `u`.
    pub fn g_weight_grid_with(&self, q: u64, xs: &[f64], panels_per_cycle: f64) -> Vec<f64> {
        if q > self.max_modulus() {
            return vec![0.0; xs.len()];
        }
        let qq = self.big_q * self.big_q;
        let xmax = xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let width = (q as f64 * self.big_q) / (panels_per_cycle * (xmax + 1.0));
        let panels = (qq / width).ceil() as usize;
        let gl = GaussLegendre::new(20);
        let nodes: Vec<(f64, f64)> = gl
            .composite(0.0, qq, panels)
            .into_iter()
            .map(|(u, w)| (u, 2.0 * w * self.delta_kernel_weight(q, u) * self.envelope(u)))
            .filter(|&(_, w)| w != 0.0)
            .collect();
        let k = TAU / (q as f64 * self.big_q);
        xs.iter()
            .map(|&x| nodes.iter().map(|&(u, w)| w * (k * u * x).cos()).sum())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaForm {
    KernelSum,
    GIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaExpansion {
    pub value: Complex64,
    /// `|value - [n = 0]|`
    pub residual: f64,
}

/// `x`-window half-width `Q^eps` for the truncated integral form.
pub fn window_half_width(big_q: f64, eps: f64) -> f64 {
    big_q.powf(eps)
}

/// Expands `[n = 0]` with the kernel at `Q`, either as
/// `sum_q sum*_a e(an/q) Delta_q(n)` or through the windowed `g(q, x)` integral.
pub fn delta_expand(n: i64, kernel: &DeltaKernel, form: DeltaForm, window_eps: f64) -> Result<DeltaExpansion> {
    let qq = kernel.big_q * kernel.big_q;
    if (n.unsigned_abs() as f64) > qq {
        return Err(Error::Domain(format!("|n| = {} exceeds Q^2 = {qq}", n.abs())));
    }
    let mut total = 0.0;
    match form {
        DeltaForm::KernelSum => {
            for q in 1..=kernel.max_modulus() {
                let c = ramanujan_sum(n, q)? as f64;
                if c != 0.0 {
                    total += c * kernel.delta_kernel_weight(q, n as f64);
                }
            }
        }
        DeltaForm::GIntegral => {
            let x_half = window_half_width(kernel.big_q, window_eps);
            let window = Plateau::new(-2.0 * x_half, -x_half, x_half, 2.0 * x_half);
            let gl = GaussLegendre::new(20);
            let x_panels = (8.0 * x_half).ceil() as usize;
            let xs: Vec<(f64, f64)> = gl.composite(-2.0 * x_half, 2.0 * x_half, x_panels);
            let xv: Vec<f64> = xs.iter().map(|p| p.0).collect();
            for q in 1..=kernel.max_modulus() {
                let c = ramanujan_sum(n, q)? as f64;
                if c == 0.0 {
                    continue;
                }
                let qf = q as f64;
                let g = kernel.g_weight_grid(q, &xv);
                let integral: f64 = xs
                    .iter()
                    .zip(&g)
                    .map(|(&(x, w), gv)| w * window.value(x) * gv * (TAU * n as f64 * x / (qf * kernel.big_q)).cos())
                    .sum();
                total += c * integral / (qf * kernel.big_q);
            }
        }
    }
    let expect = if n == 0 { 1.0 } else { 0.0 };
    Ok(DeltaExpansion {
        value: Complex64::new(total, 0.0),
        residual: (total - expect).abs(),
    })
}

/// Largest `|Delta_q(u)| / envelope` over `q <= 2Q`, `|u| <= Q^2`.
pub fn kernel_envelope_constant(kernel: &DeltaKernel, u_samples: usize) -> f64 {
    let qq = kernel.big_q * kernel.big_q;
    let mut worst = 0.0_f64;
    for q in 1..=kernel.max_modulus() {
        for i in 0..=u_samples {
            let u = qq * i as f64 / u_samples as f64;
            let v = kernel.delta_kernel_weight(q, u).abs() / kernel.kernel_envelope(q, u);
            worst = worst.max(v);
        }
    }
    worst
}

/// Constant and largest exponent for the small-modulus envelope
/// `|g(q,x) - 1| <= C (qQ)^{-1} (q/Q + |x|)^A`. The bound is claimed for
/// every `A`, so a point passes if some `A` in `[0, A_max]` works, i.e. against
/// `C (qQ)^{-1} max(1, (q/Q + |x|)^{A_max})`.
pub const SMALL_Q_ENVELOPE: (f64, f64) = (10.0, 4.0);

/// Constant in the large-modulus bound `|g'(q, x)| <= C Q^{eps}`.
pub const LARGE_Q_DERIVATIVE_CONSTANT: f64 = 10.0;

/// Default exponent of the `x`-window half-width `Q^eps`.
pub const DEFAULT_WINDOW_EPS: f64 = 0.5;

/// The small-modulus envelope at `(q, x)`.
pub fn small_modulus_envelope(big_q: f64, q: u64, x: f64) -> f64 {
    let (c, a) = SMALL_Q_ENVELOPE;
    let qf = q as f64;
    c / (qf * big_q) * (qf / big_q + x.abs()).powf(a).max(1.0)
}

/// Measured bounds on `g(q, x)` over a grid: the small-modulus envelope, the
/// decay exponent in `x`, and derivative sizes for large moduli.
pub fn g_bound_report(kernel: &DeltaKernel, q_grid: &[u64], x_grid: &[f64], cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("g-bounds");
    let big_q = kernel.big_q;
    let split = big_q.powf(1.0 - SPLIT_EPS);
    let (c_env, a_env) = SMALL_Q_ENVELOPE;
    for &q in q_grid {
        let qf = q as f64;
        let g = kernel.g_weight_grid(q, x_grid);
        if qf <= split {
            for (&x, &gv) in x_grid.iter().zip(&g) {
                let env = small_modulus_envelope(big_q, q, x);
                rep.push(ReportRow::bound(
                    "delta.g_small_modulus_envelope",
                        json!({"Q": big_q, "q": q, "x": x, "A_max": a_env, "C": c_env}),
                    (gv - 1.0).abs(),
                    env,
                ));
            }
        } else {
            for &x in x_grid {
                let d1 = kernel.g_derivative(q, x, 1, cfg)?.abs();
                let bound = big_q.powf(SPLIT_EPS) * LARGE_Q_DERIVATIVE_CONSTANT;
                rep.push(ReportRow::bound(
                    "delta.g_large_modulus_derivative",
                    json!({"Q": big_q, "q": q, "x": x, "order": 1}),
                    d1,
                    bound,
                ));
            }
        }
    }
    Ok(rep)
}

/// Log-log slope of `|g(q, x)|` over `x` in `[lo, hi]` (geometric grid).
pub fn g_decay_slope(kernel: &DeltaKernel, q: u64, lo: f64, hi: f64, points: usize) -> f64 {
    let xs: Vec<f64> = (0..points)
        .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64))
        .collect();
    let g = kernel.g_weight_grid(q, &xs);
    // upper envelope: running max from the right removes zero crossings
    let mut env = vec![0.0; points];
    let mut m = 0.0_f64;
    for i in (0..points).rev() {
        m = m.max(g[i].abs()).max(1e-300);
        env[i] = m;
    }
    crate::oscint::stationary::loglog_slope(&xs, &env)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_sum_is_exact() {
        for big_q in [8.0, 16.0, 32.0] {
            let k = DeltaKernel::new(big_q).unwrap();
            for n in -50..=50 {
                let e = delta_expand(n, &k, DeltaForm::KernelSum, 0.5).unwrap();
                assert!(e.residual <= 1e-9, "Q={big_q} n={n}: {}", e.residual);
            }
        }
    }

    #[test]
    fn kernel_vanishes_past_twice_q() {
        let k = DeltaKernel::new(8.0).unwrap();
        for q in 17..40 {
            for i in 0..=64 {
                assert_eq!(k.delta_kernel_weight(q, i as f64), 0.0);
            }
        }
    }

    #[test]
    fn omega_partition_of_unity() {
        let k = DeltaKernel::new(16.0).unwrap();
        let s: f64 = (1..100).map(|d| k.omega(d as f64)).sum();
        assert!((s - 1.0).abs() < 1e-14);
        assert_eq!(k.envelope(0.0), 1.0);
        assert_eq!(k.envelope(256.0), 0.0);
    }

    #[test]
    fn grid_matches_adaptive_g() {
        let k = DeltaKernel::new(16.0).unwrap();
        let cfg = QuadratureConfig::with_abs_tol(1e-12);
        let xs = [0.0, 0.5, 3.0, 10.0];
        for q in [1, 5, 17, 30] {
            let grid = k.g_weight_grid(q, &xs);
            for (x, g) in xs.iter().zip(&grid) {
                let a = k.g_weight(q, *x, &cfg).unwrap();
                assert!((a - g).abs() < 1e-10, "q={q} x={x}: {a} vs {g}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let k = DeltaKernel::new(16.0).unwrap();
        let cfg = QuadratureConfig { rel_tol: 1e-13, ..QuadratureConfig::with_abs_tol(1e-13) };
        let h = 1e-3;
        for q in [3, 20] {
            for x in [0.3, 2.0] {
                let g = |y: f64| k.g_weight(q, y, &cfg).unwrap();
                let fd1 = (g(x + h) - g(x - h)) / (2.0 * h);
                let fd2 = (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h);
                let d1 = k.g_derivative(q, x, 1, &cfg).unwrap();
                let d2 = k.g_derivative(q, x, 2, &cfg).unwrap();
                assert!((d1 - fd1).abs() < 1e-5 * (1.0 + d1.abs()), "q={q} x={x}: {d1} {fd1}");
                assert!((d2 - fd2).abs() < 1e-3 * (1.0 + d2.abs()), "q={q} x={x}: {d2} {fd2}");
            }
        }
    }

    #[test]
    fn g_weight_examples() {
        let cfg = QuadratureConfig::with_abs_tol(1e-12);
        let k32 = DeltaKernel::new(32.0).unwrap();
        let g = k32.g_weight(1, 0.5, &cfg).unwrap();
        assert!((g - 1.0).abs() < 1.0 / 32.0, "{g}");
        let k8 = DeltaKernel::new(8.0).unwrap();
        assert!(k8.g_weight(1, 50.0, &cfg).unwrap().abs() < 1e-3);
        assert_eq!(k8.g_weight(17, 0.3, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn g_integral_residual_shrinks_with_q() {
        for n in [0i64, 1, 5] {
            let r: Vec<f64> = [8.0, 16.0, 32.0]
                .iter()
                .map(|&q| delta_expand(n, &DeltaKernel::new(q).unwrap(), DeltaForm::GIntegral, DEFAULT_WINDOW_EPS).unwrap().residual)
                .collect();
            assert!(r[1] < r[0] && r[2] < r[1], "n={n}: {r:?}");
        }
    }

    #[test]
    fn envelope_bounds() {
        let k = DeltaKernel::new(16.0).unwrap();
        let c = kernel_envelope_constant(&k, 2000);
        assert!(c <= 10.0, "{c}");
        let d = k.envelope_derivative_constants(4);
        assert!(d.iter().all(|x| x.is_finite()) && (d[0] - 1.0).abs() < 1e-12);
        assert!(g_decay_slope(&k, 1, 2.0, 64.0, 40) <= -2.0);
    }

    #[test]
    fn out_of_range_n_rejected() {
        let k = DeltaKernel::new(8.0).unwrap();
        assert!(delta_expand(65, &k, DeltaForm::KernelSum, DEFAULT_WINDOW_EPS).is_err());
    }
}
