//! Stationary-phase main terms and the log-plus-linear phase family.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::bump::{Bump, Smooth};
use super::quadrature::{oscillatory_quadrature, QuadratureConfig};
use super::series::Series;
use crate::error::{Error, Result};

/// A real phase with Taylor coefficients available at any point of its domain.
pub trait Phase: Send + Sync {
    fn value(&self, x: f64) -> f64;
    /// Coefficients `f^(k)(x)/k!` for `k = 0..=order`.
    fn taylor(&self, x: f64, order: usize) -> Series;

    fn derivative(&self, x: f64) -> f64 {
        self.taylor(x, 1).0[1]
    }
}

/// `f(x) = T (x - c)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticPhase {
    pub t: f64,
    pub center: f64,
}

impl Phase for QuadraticPhase {
    fn value(&self, x: f64) -> f64 {
        self.t * (x - self.center).powi(2)
    }

    fn taylor(&self, x: f64, order: usize) -> Series {
        let d = x - self.center;
        let mut s = Series::constant(self.t * d * d, order);
        if order >= 1 {
            s.0[1] = 2.0 * self.t * d;
        }
        if order >= 2 {
            s.0[2] = self.t;
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// The symbols feeding the linear coefficient of the log-plus-linear phase.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhaseContext {
    pub big_n: f64,
    pub q: f64,
    pub big_q: f64,
    pub u: f64,
    pub x: f64,
    pub n: f64,
    pub m: f64,
    pub p: f64,
}

/// `P(z) = -(t/2pi) log z + L z` on `z > 0`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhaseSpec {
    pub t: f64,
    pub linear_coefficient: f64,
    pub branch: Branch,
    pub context: Option<PhaseContext>,
}

impl PhaseSpec {
    pub fn new(t: f64, linear_coefficient: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("phase frequency must be positive, got {t}")));
        }
        Ok(Self {
            t,
            linear_coefficient,
            branch: Branch::Plus,
            context: None,
        })
    }

    /// `L = -2N^2 u x/(qQ) - nN/q +- 2N sqrt(m)/(q sqrt(p))`.
    pub fn from_context(t: f64, ctx: PhaseContext, branch: Branch) -> Result<Self> {
        let mut s = Self::new(t, 0.0)?;
        s.branch = branch;
        s.context = Some(ctx);
        s.linear_coefficient = ctx.big_n / ctx.q * s.reduced_frequency().unwrap();
        Ok(s)
    }

    /// `p(m,n,u,x) = -2Nux/Q - n +- 2 sqrt(m/p)`, so that `L = (N/q) p`.
    pub fn reduced_frequency(&self) -> Option<f64> {
        self.context.map(|c| {
            -2.0 * c.big_n * c.u * c.x / c.big_q - c.n
                + self.branch.sign() * 2.0 * (c.m / c.p).sqrt()
        })
    }
}

impl Phase for PhaseSpec {
    fn value(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return f64::NAN;
        }
        -self.t / TAU * z.ln() + self.linear_coefficient * z
    }

    fn taylor(&self, z: f64, order: usize) -> Series {
        let mut s = Series::constant(self.value(z), order);
        if order >= 1 {
            s.0[1] = -self.t / (TAU * z) + self.linear_coefficient;
        }
        let mut zk = z;
        for k in 2..=order {
            zk *= z;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s.0[k] = self.t * sign / (TAU * k as f64 * zk);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StationaryPoint {
    pub z0: f64,
    pub t: f64,
    pub reduced_frequency: Option<f64>,
    pub scale: Option<(f64, f64)>,
}

/// Interval on which the stationary point is required to sit.
pub const STATIONARY_WINDOW: (f64, f64) = (0.125, 3.0);

impl StationaryPoint {
    /// `P^(j)(z0) = t (-1)^j (j-1)! / (2 pi z0^j)` for `j >= 2`.
    pub fn derivative(&self, j: u32) -> f64 {
        assert!(j >= 2);
        let fact: f64 = (1..j).map(f64::from).product();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        self.t * sign * fact / (TAU * self.z0.powi(j as i32))
    }

    /// Splits `P^(j)(z0)` into a factor depending on `q` only and `p(m,n)^j`.
    pub fn factorization(&self, j: u32) -> Option<(f64, f64)> {
        let (big_n, q) = self.scale?;
        let p = self.reduced_frequency?;
        let fact: f64 = (1..j).map(f64::from).product();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let a = self.t * sign * fact / TAU * (TAU * big_n / (self.t * q)).powi(j as i32);
        Some((a, p.powi(j as i32)))
    }

    pub fn in_window(&self) -> bool {
        self.z0 >= STATIONARY_WINDOW.0 && self.z0 <= STATIONARY_WINDOW.1
    }
}

/// `z0 = t / (2 pi L)`; with context this is `t q / (2 pi N p(m,n,u,x))`.
pub fn phase_stationary_point(phase: &PhaseSpec) -> Result<StationaryPoint> {
    let l = phase.linear_coefficient;
    if l == 0.0 || !l.is_finite() {
        return Err(Error::NoStationaryPoint("linear coefficient vanishes".into()));
    }
    if l < 0.0 {
        return Err(Error::NoStationaryPoint(format!(
            "linear coefficient {l} < 0 puts the critical point at z <= 0"
        )));
    }
    Ok(StationaryPoint {
        z0: phase.t / (TAU * l),
        t: phase.t,
        reduced_frequency: phase.reduced_frequency(),
        scale: phase.context.map(|c| (c.big_n, c.q)),
    })
}

/// Root of `f'` in `(alpha, beta)`, where `f'` must go from negative to positive.
pub fn find_stationary_point(f: &dyn Phase, alpha: f64, beta: f64) -> Result<f64> {
    let (da, db) = (f.derivative(alpha), f.derivative(beta));
    if !(da < 0.0 && db > 0.0) {
        return Err(Error::NoStationaryPoint(format!(
            "f' does not change sign from - to + on [{alpha}, {beta}] (f'={da:e}, {db:e})"
        )));
    }
    let (mut lo, mut hi) = (alpha, beta);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let t = f.taylor(x, 2);
        let (d1, d2) = (t.0[1], 2.0 * t.0[2]);
        if d1 == 0.0 {
            return Ok(x);
        }
        if d1 < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - d1 / d2;
        let next = if d2 > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-16 * x.abs().max(1.0) || hi - lo <= 1e-16 * x.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

fn poly_mul_trunc(a: &[f64], b: &[f64], deg: usize) -> Vec<f64> {
    let mut out = vec![0.0; deg + 1];
    for (i, &x) in a.iter().enumerate().take(deg + 1) {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(deg + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Stationary-phase approximation of `int g(x) e(f(x)) dx` over `[alpha, beta]`,
/// through relative order `T^{-order}`.
///
/// With `f = sum a_k y^k` and `g = sum g_l y^l` about the stationary point,
/// `e(sum_{k>=3} a_k y^k)` is expanded in powers of `y` and the Gaussian
/// moments `int y^{2m} e(a_2 y^2) dy` are taken exactly.
pub fn stationary_phase_main(
    g: &dyn Smooth,
    f: &dyn Phase,
    alpha: f64,
    beta: f64,
    order: usize,
) -> Result<Complex64> {
    let gamma = find_stationary_point(f, alpha, beta)?;
    let (slo, shi) = g.support();
    if gamma <= slo || gamma >= shi {
        return Err(Error::NoStationaryPoint(format!(
            "stationary point {gamma} outside amplitude support [{slo}, {shi}]"
        )));
    }
    let n = order;
    let a = f.taylor(gamma, 2 * n + 2);
    let a2 = a.0[2];
    if !(a2 > 0.0) {
        return Err(Error::Domain(format!("f'' = {} is not positive at the stationary point", 2.0 * a2)));
    }
    let gt = g.taylor(gamma, 2 * n);
    let mut r = a.0.clone();
    r[0] = 0.0;
    r[1] = 0.0;
    r[2] = 0.0;

    let lambda = TAU;
    let s = Complex64::new(0.0, -lambda * a2);
    let inv_s = s.inv();
    let il = Complex64::new(0.0, lambda);

    let mut total = Complex64::new(0.0, 0.0);
    let mut rpow = vec![1.0];
    let mut ilj = Complex64::new(1.0, 0.0);
    let mut jfact = 1.0;
    for j in 0..=2 * n {
        if j > 0 {
            rpow = poly_mul_trunc(&rpow, &r, 2 * (n + j));
            ilj *= il;
            jfact *= j as f64;
        }
        let deg = 2 * (n + j);
        let p = poly_mul_trunc(&gt.0, &rpow, deg);
        let mut dfact = 1.0; // (D-1)!! / 2^{D/2}
        let mut spow = Complex64::new(1.0, 0.0);
        for half in 0..=deg / 2 {
            let d = 2 * half;
            if half > 0 {
                dfact *= (d - 1) as f64 / 2.0;
                spow *= inv_s;
            }
            if d < 3 * j {
                continue;
            }
            if let Some(&c) = p.get(d) {
                if c != 0.0 {
                    total += ilj / jfact * c * dfact * spow;
                }
            }
        }
    }
    let lead = Complex64::from_polar(1.0, TAU * (a.0[0] + 0.125)) / (2.0 * a2).sqrt();
    Ok(lead * total)
}

/// Order-0 term for a phase with `f(gamma)`, `f''(gamma)` and `g(gamma)` known.
pub fn stationary_main_term(f_gamma: f64, f2_gamma: f64, g_gamma: f64) -> Complex64 {
    Complex64::from_polar(g_gamma / f2_gamma.sqrt(), TAU * (f_gamma + 0.125))
}


/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ErrorLawPoint {
    pub t: f64,
    pub quadrature: (f64, f64),
    /// `|main - quadrature| * sqrt(2T)` for each order.
    pub scaled_errors: Vec<f64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ErrorLaw {
    pub points: Vec<ErrorLawPoint>,
    /// Log-log slope of the scaled error in `T`, per order.
    pub slopes: Vec<f64>,
}

/// Compares the stationary-phase expansion against quadrature for
/// `f = T(x-1)^2` and the canonical bump on `[1/2, 3/2]`.
pub fn stationary_error_law(ts: &[f64], max_order: usize, cfg: &QuadratureConfig) -> Result<ErrorLaw> {
    let g = Bump::new(0.5, 1.5);
    let mut points = Vec::new();
    for &t in ts {
        let f = QuadraticPhase { t, center: 1.0 };
        let q = oscillatory_quadrature(|x| g.value(x), |x| f.value(x), 0.5, 1.5, cfg)?.value;
        let mut scaled = Vec::new();
        for k in 0..=max_order {
            let m = stationary_phase_main(&g, &f, 0.5, 1.5, k)?;
            scaled.push((m - q).norm() * (2.0 * t).sqrt());
        }
        points.push(ErrorLawPoint {
            t,
            quadrature: (q.re, q.im),
            scaled_errors: scaled,
        });
    }
    let slopes = (0..=max_order)
        .map(|k| {
            let ys: Vec<f64> = points.iter().map(|p| p.scaled_errors[k]).collect();
            loglog_slope(ts, &ys)
        })
        .collect();
    Ok(ErrorLaw { points, slopes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(g: &Bump, f: &dyn Phase) -> Complex64 {
        let cfg = QuadratureConfig::with_abs_tol(1e-14);
        oscillatory_quadrature(|x| g.value(x), |x| f.value(x), g.lo, g.hi, &cfg)
            .unwrap()
            .value
    }

    #[test]
    fn quadratic_phase_order_zero_closed_form() {
        let g = Bump::new(0.5, 1.5);
        let f = QuadraticPhase { t: 400.0, center: 1.0 };
        let v = stationary_phase_main(&g, &f, 0.5, 1.5, 0).unwrap();
        let expect = Complex64::from_polar(1.0 / (20.0 * 2f64.sqrt()), TAU / 8.0);
        assert!((v - expect).norm() < 1e-14);
    }

    #[test]
    fn vanishing_amplitude_at_point_gives_zero() {
        let g = Bump::new(1.0, 2.0);
        let f = QuadraticPhase { t: 50.0, center: 1.0 + 1e-9 };
        assert!(stationary_phase_main(&g, &f, 0.5, 3.0, 0).is_ok());
        let far = QuadraticPhase { t: 50.0, center: 2.5 };
        assert!(stationary_phase_main(&g, &far, 0.5, 3.0, 0).is_err());
    }

    #[test]
    fn corrections_approach_quadrature() {
        let g = Bump::new(0.5, 1.5);
        let f = QuadraticPhase { t: 100.0, center: 1.0 };
        let exact = quad(&g, &f);
        let errs: Vec<f64> = (0..4)
            .map(|k| (stationary_phase_main(&g, &f, 0.5, 1.5, k).unwrap() - exact).norm())
            .collect();
        assert!(errs[1] < errs[0] / 10.0, "{errs:?}");
        assert!(errs[2] < errs[1], "{errs:?}");
    }

    #[test]
    fn log_linear_corrections_approach_quadrature() {
        // P(z) = -(t/2pi) log z + L z with z0 = 1
        let t = 300.0;
        let f = PhaseSpec::new(t, t / TAU).unwrap();
        let g = Bump::new(0.4, 1.9);
        let cfg = QuadratureConfig::with_abs_tol(1e-14);
        let exact = oscillatory_quadrature(|x| g.value(x), |x| f.value(x), 0.4, 1.9, &cfg)
            .unwrap()
            .value;
        let e0 = (stationary_phase_main(&g, &f, 0.125, 3.0, 0).unwrap() - exact).norm();
        let e1 = (stationary_phase_main(&g, &f, 0.125, 3.0, 1).unwrap() - exact).norm();
        let e2 = (stationary_phase_main(&g, &f, 0.125, 3.0, 2).unwrap() - exact).norm();
        assert!(e1 < e0 / 5.0 && e2 < e1, "{e0} {e1} {e2}");
    }

    #[test]
    fn stationary_point_basic() {
        let ctx = PhaseContext { big_n: 1.0, q: 1.0, big_q: 1.0, u: 0.0, x: 0.0, n: -1.0, m: 0.0, p: 1.0 };
        let ph = PhaseSpec::from_context(TAU, ctx, Branch::Plus).unwrap();
        let sp = phase_stationary_point(&ph).unwrap();
        assert!((sp.z0 - 1.0).abs() < 1e-15);
        let ctx0 = PhaseContext { n: 0.0, ..ctx };
        let ph0 = PhaseSpec::from_context(TAU, ctx0, Branch::Plus).unwrap();
        assert!(phase_stationary_point(&ph0).is_err());
    }

    #[test]
    fn stationary_point_derivatives_and_factorization() {
        let ctx = PhaseContext { big_n: 40.0, q: 3.0, big_q: 6.0, u: 0.01, x: -0.3, n: -2.0, m: 17.0, p: 11.0 };
        for branch in [Branch::Plus, Branch::Minus] {
            let ph = PhaseSpec::from_context(25.0, ctx, branch).unwrap();
            let Ok(sp) = phase_stationary_point(&ph) else { continue };
            assert!(ph.derivative(sp.z0).abs() <= 1e-10 * ph.t);
            let tay = ph.taylor(sp.z0, 5);
            for j in 2..=5u32 {
                let fact: f64 = (1..=j).map(f64::from).product();
                let d = sp.derivative(j);
                assert!((tay.0[j as usize] * fact - d).abs() <= 1e-11 * d.abs());
                let (a, b) = sp.factorization(j).unwrap();
                assert!((a * b - d).abs() <= 1e-11 * d.abs());
            }
        }
    }

    #[test]
    fn error_law_slopes() {
        let cfg = QuadratureConfig::with_abs_tol(1e-13);
        let law = stationary_error_law(&[1e2, 1e3, 1e4], 1, &cfg).unwrap();
        println!("{law:?}");
        assert!(law.slopes[0] <= -0.7 && law.slopes[0] >= -1.3, "{:?}", law.slopes);
        assert!(law.slopes[1] < law.slopes[0] - 0.5, "{:?}", law.slopes);
    }
}
