//! Poisson and Voronoi summation checked as numerical identities, and the
//! dual-length thresholds `N0`, `M0`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::expsums::{e_frac, gauss_sum_closed, GaussSumSpec};
use crate::lfun::lvalue::default_length_weight;
use crate::lfun::{CoefficientTable, ParameterBox};
use crate::modmath::{gcd, mod_inverse};
use crate::oscint::quadrature::{oscillatory_quadrature, GaussLegendre, QuadratureConfig};
use crate::oscint::{bessel_j, Bump, Plateau, Smooth};
use crate::report::{ReportRow, VerificationReport};

/// `(N0, M0) = (qt/N + sqrt(K), N^eps p K)`.
pub fn truncation_thresholds(params: &ParameterBox, q: f64) -> (f64, f64) {
    (params.n0(q), params.m0())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Direct,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummationInstance {
    pub side: Side,
    pub q: u64,
    pub a: i64,
    pub test_function: String,
    /// Number of terms (direct) or dual truncation length.
    pub truncation: u64,
    pub value: (f64, f64),
}

fn cpx(z: Complex64) -> (f64, f64) {
    (z.re, z.im)
}

/// `sum_n g(n) e(an^2/q)` against its Poisson dual, with
/// `g(y) = y^{-it} V(y/N) e(y^2 x/(qQ))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonCase {
    pub q: u64,
    pub a: i64,
    pub t: f64,
    pub x: f64,
    pub big_n: f64,
    pub big_q: f64,
}

impl PoissonCase {
    pub fn new(params: &ParameterBox, q: u64, a: i64, x: f64) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroModulus);
        }
        if gcd(a.unsigned_abs(), q) != 1 {
            return Err(Error::NotCoprime { a, c: q });
        }
        Ok(Self {
            q,
            a,
            t: params.t,
            x,
            big_n: params.big_n,
            big_q: params.big_q,
        })
    }

    fn weight(&self) -> impl Smooth {
        default_length_weight()
    }

    /// Phase of `g` in cycles, without the dual frequency.
    fn phase(&self, y: f64) -> f64 {
        -self.t * y.ln() / TAU + y * y * self.x / (self.q as f64 * self.big_q)
    }

    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.weight().support();
        (lo * self.big_n, hi * self.big_n)
    }

    /// `sum_n |g(n)|`, the scale used when the direct sum cancels exactly.
    pub fn mass(&self) -> f64 {
        let v = self.weight();
        let (lo, hi) = self.support();
        ((lo.ceil().max(1.0) as u64)..=hi.floor() as u64)
            .map(|n| v.value(n as f64 / self.big_n))
            .sum()
    }

    pub fn direct(&self) -> SummationInstance {
        let v = self.weight();
        let (lo, hi) = self.support();
        let mut acc = Complex64::new(0.0, 0.0);
        let (n_lo, n_hi) = (lo.ceil().max(1.0) as u64, hi.floor() as u64);
        for n in n_lo..=n_hi {
            let y = n as f64;
            let w = v.value(y / self.big_n);
            if w != 0.0 {
                let sq = (n as i128 * n as i128).rem_euclid(self.q as i128) as i64;
                acc += w * Complex64::from_polar(1.0, TAU * self.phase(y)) * e_frac(self.a * sq, self.q);
            }
        }
        SummationInstance {
            side: Side::Direct,
            q: self.q,
            a: self.a,
            test_function: self.describe(),
            truncation: n_hi.saturating_sub(n_lo) + 1,
            value: cpx(acc),
        }
    }

    /// `ghat(k/q) = int g(y) e(-ky/q) dy`.
    pub fn dual_integral(&self, k: i64, cfg: &QuadratureConfig) -> Result<Complex64> {
        let v = self.weight();
        let (lo, hi) = self.support();
        let freq = k as f64 / self.q as f64;
        let r = oscillatory_quadrature(|y| v.value(y / self.big_n), |y| self.phase(y) - freq * y, lo, hi, cfg)?;
        Ok(r.value)
    }

    /// `(1/q) sum_{|k| <= trunc} G(a, k, q) ghat(k/q)`.
    pub fn dual(&self, trunc: u64, cfg: &QuadratureConfig) -> Result<SummationInstance> {
        let mut acc = Complex64::new(0.0, 0.0);
        let t = trunc as i64;
        for k in -t..=t {
            let g = gauss_sum_closed(GaussSumSpec::new(self.a, k, self.q)?)?;
            acc += g * self.dual_integral(k, cfg)?;
        }
        acc /= self.q as f64;
        Ok(SummationInstance {
            side: Side::Dual,
            q: self.q,
            a: self.a,
            test_function: self.describe(),
            truncation: trunc,
            value: cpx(acc),
        })
    }

    /// Dual frequencies `k/q` outside the local frequency range of `g`,
    /// widened by `slack` for the decay of the weight's transform.
    pub fn default_truncation(&self, slack: f64) -> u64 {
        let (lo, hi) = self.support();
        let qf = self.q as f64;
        let f = |y: f64| -self.t / (TAU * y) + 2.0 * y * self.x / (qf * self.big_q);
        let top = f(lo).abs().max(f(hi).abs());
        (qf * (top + slack)).ceil() as u64
    }

    fn describe(&self) -> String {
        format!(
            "y^(-it) V(y/N) e(y^2 x/(qQ)), N={}, t={}, x={}, Q={}",
            self.big_n, self.t, self.x, self.big_q
        )
    }

    fn params_json(&self, trunc: u64) -> serde_json::Value {
        json!({"q": self.q, "a": self.a, "t": self.t, "x": self.x, "N": self.big_n, "Q": self.big_q, "truncation": trunc})
    }
}

/// Tolerances for the Poisson identity and for truncation stability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonTolerances {
    pub identity_rel: f64,
    pub doubling_rel: f64,
    /// Extra dual frequency (cycles per unit) kept beyond the stationary range.
    pub slack: f64,
}

impl Default for PoissonTolerances {
    fn default() -> Self {
        Self {
            identity_rel: 1e-6,
            doubling_rel: 1e-3,
            slack: 2.0,
        }
    }
}

/// Sums below this share of `sum |g(n)|` are treated as cancelling; their residual
/// is measured against it instead, since each dual integral carries ~1e-13
/// absolute rounding noise from its phase.
const MASS_FLOOR: f64 = 1e-7;

/// Both sides of Poisson summation for one `(q, a, x)`, plus the effect of
/// doubling the dual truncation.
pub fn poisson_verify(
    params: &ParameterBox,
    q: u64,
    a: i64,
    x: f64,
    tol: PoissonTolerances,
    cfg: &QuadratureConfig,
) -> Result<VerificationReport> {
    let case = PoissonCase::new(params, q, a, x)?;
    let trunc = case.default_truncation(tol.slack);
    let direct = case.direct();
    let dual = case.dual(trunc, cfg)?;
    let doubled = case.dual(2 * trunc.max(1), cfg)?;
    let mut report = VerificationReport::new("verify-poisson");
    let to_c = |v: (f64, f64)| Complex64::new(v.0, v.1);
    let mut row = ReportRow::compare(
        "poisson.identity",
        case.params_json(trunc),
        to_c(dual.value),
        to_c(direct.value),
        f64::INFINITY,
    );
    // exactly cancelling sums are measured against the size of their terms
    row.rel_err = row.abs_err / to_c(direct.value).norm().max(MASS_FLOOR * case.mass());
    row.pass = row.rel_err <= tol.identity_rel;
    report.push(row);
    let change = (to_c(doubled.value) - to_c(dual.value)).norm() / to_c(dual.value).norm().max(MASS_FLOOR * case.mass());
    report.push(ReportRow::measurement(
        "poisson.truncation_doubling",
        case.params_json(2 * trunc.max(1)),
        Complex64::new(change, 0.0),
        change <= tol.doubling_rel,
    ));
    Ok(report)
}

/// Dilated canonical bump supported on `[Y, 2Y]`.
pub fn voronoi_test_function(y: f64) -> Bump {
    Bump::new(y, 2.0 * y)
}

/// A test function for the Voronoi identity.
pub trait VoronoiWeight {
    fn eval(&self, y: f64) -> Complex64;
    fn span(&self) -> (f64, f64);
    /// Cycles of the weight's own phase across its span.
    fn cycles(&self) -> f64 {
        0.0
    }
    /// Length of the narrowest feature of the amplitude.
    fn feature(&self) -> f64 {
        let (lo, hi) = self.span();
        hi - lo
    }
}

impl VoronoiWeight for Bump {
    fn eval(&self, y: f64) -> Complex64 {
        Complex64::new(self.value(y), 0.0)
    }

    fn span(&self) -> (f64, f64) {
        self.support()
    }
}

/// `amp(y / scale) e(freq y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasedWeight {
    pub amp: Plateau,
    pub scale: f64,
    pub freq: f64,
}

impl VoronoiWeight for PhasedWeight {
    fn eval(&self, y: f64) -> Complex64 {
        Complex64::from_polar(self.amp.value(y / self.scale), TAU * self.freq * y)
    }

    fn span(&self) -> (f64, f64) {
        let (a, d) = self.amp.support();
        (a * self.scale, d * self.scale)
    }

    fn cycles(&self) -> f64 {
        let (lo, hi) = self.span();
        self.freq.abs() * (hi - lo)
    }

    fn feature(&self) -> f64 {
        let p = self.amp;
        (p.b - p.a).min(p.d - p.c) * self.scale
    }
}

/// `int g(y) J_{k-1}(4 pi sqrt(ny)/(q sqrt p)) dy` on a Gauss–Legendre mesh
/// resolving both oscillations.
fn bessel_transform(g: &dyn VoronoiWeight, order: u32, n: u64, q: u64, p: u64, gl: &GaussLegendre) -> Complex64 {
    let (lo, hi) = g.span();
    let c = 4.0 * PI * (n as f64).sqrt() / (q as f64 * (p as f64).sqrt());
    let cycles = c * (hi.sqrt() - lo.sqrt()) / TAU + g.cycles();
    let features = 4.0 * (hi - lo) / g.feature();
    let panels = (cycles.ceil() as usize + 8).max(16).max(features.ceil() as usize);
    gl.composite(lo, hi, panels)
        .into_iter()
        .map(|(y, w)| w * g.eval(y) * bessel_j(order, c * y.sqrt()))
        .sum()
}

/// Left side `sum_n e(an/q) lambda(n) g(n)`.
pub fn voronoi_left(table: &CoefficientTable, q: u64, a: i64, g: &dyn VoronoiWeight) -> Result<Complex64> {
    let (lo, hi) = g.span();
    let n_hi = hi.floor() as usize;
    if n_hi > table.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: n_hi as u64,
            have: table.n_max() as u64,
        });
    }
    let lam = table.values();
    let mut acc = Complex64::new(0.0, 0.0);
    for n in (lo.ceil().max(1.0) as usize)..=n_hi {
        acc += lam[n] * g.eval(n as f64) * e_frac(a * n as i64, q);
    }
    Ok(acc)
}

/// Right side without the unimodular constant:
/// `(2 pi/(q sqrt p)) sum_{n <= len} lambda(n) e(-n conj(ap)/q) int g(y) J_{k-1}(...) dy`.
pub fn voronoi_right(table: &CoefficientTable, q: u64, a: i64, g: &dyn VoronoiWeight, len: usize) -> Result<Complex64> {
    let p = table.level;
    if q % p == 0 {
        return Err(Error::LevelDividesModulus { p, q });
    }
    if len > table.n_max() {
        return Err(Error::InsufficientCoefficients {
            needed: len as u64,
            have: table.n_max() as u64,
        });
    }
    let inv = mod_inverse(a * p as i64, q)? as i64;
    let gl = GaussLegendre::new(20);
    let lam = table.values();
    let order = table.weight - 1;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=len {
        if lam[n] == 0.0 {
            continue;
        }
        let h = bessel_transform(g, order, n as u64, q, p, &gl);
        acc += lam[n] * h * e_frac(-(inv * (n as i64 % q as i64)), q);
    }
    Ok(acc * (TAU / (q as f64 * (p as f64).sqrt())))
}

/// Dual length at which the Bessel transform of the bump on `[Y, 2Y]` has
/// decayed: `4 pi sqrt(n)/(q sqrt p) (sqrt(2Y) - sqrt(Y)) = reach`.
pub fn voronoi_dual_length(y: f64, q: u64, p: u64, reach: f64) -> usize {
    let width = (2.0 * y).sqrt() - y.sqrt();
    let sqrt_n = reach * q as f64 * (p as f64).sqrt() / (4.0 * PI * width);
    (sqrt_n * sqrt_n).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VoronoiTolerances {
    pub identity_rel: f64,
    pub modulus: f64,
    pub doubling_rel: f64,
    /// Bessel-transform decay target, in radians of phase across the support.
    pub reach: f64,
}

impl Default for VoronoiTolerances {
    fn default() -> Self {
        Self {
            identity_rel: 1e-4,
            modulus: 1e-3,
            doubling_rel: 1e-3,
            reach: 400.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronoiFit {
    pub eta: (f64, f64),
    pub fitted_on: String,
}

/// Solves `left = eta * right` on one instance.
pub fn fit_eta(table: &CoefficientTable, q: u64, a: i64, y: f64, tol: &VoronoiTolerances) -> Result<VoronoiFit> {
    let g = voronoi_test_function(y);
    let left = voronoi_left(table, q, a, &g)?;
    let right = voronoi_right(table, q, a, &g, voronoi_dual_length(y, q, table.level, tol.reach))?;
    let eta = left / right;
    Ok(VoronoiFit {
        eta: cpx(eta),
        fitted_on: format!("q={q}, a={a}, bump on [{y}, {}]", 2.0 * y),
    })
}

/// Voronoi identity over `q` in `moduli` (coprime to the level), every `a`
/// coprime to `q`, and bumps on `[Y, 2Y]`; `eta` is fitted once on the first
/// modulus and first `Y`, then held fixed.
pub fn voronoi_verify(
    table: &CoefficientTable,
    moduli: &[u64],
    ys: &[f64],
    tol: VoronoiTolerances,
) -> Result<(VerificationReport, VoronoiFit)> {
    let (&q0, &y0) = moduli
        .first()
        .zip(ys.first())
        .ok_or_else(|| Error::Domain("need at least one modulus and one test function".into()))?;
    let fit = fit_eta(table, q0, 1 % q0 as i64, y0, &tol)?;
    let eta = Complex64::new(fit.eta.0, fit.eta.1);
    let mut report = VerificationReport::new("verify-voronoi");
    report.push(ReportRow::compare(
        "voronoi.eta_modulus",
        json!({"fitted_on": fit.fitted_on, "eta_re": fit.eta.0, "eta_im": fit.eta.1}),
        Complex64::new(eta.norm(), 0.0),
        Complex64::new(1.0, 0.0),
        tol.modulus,
    ));
    for &q in moduli {
        for a in (1..=q.max(1) as i64).filter(|&a| gcd(a as u64, q) == 1) {
            for &y in ys {
                let g = voronoi_test_function(y);
                let len = voronoi_dual_length(y, q, table.level, tol.reach);
                let left = voronoi_left(table, q, a, &g)?;
                let right = eta * voronoi_right(table, q, a, &g, len)?;
                let params = json!({"level": table.level, "q": q, "a": a, "Y": y, "dual_length": len});
                report.push(ReportRow::compare_rel("voronoi.identity", params.clone(), right, left, tol.identity_rel));
                let half = eta * voronoi_right(table, q, a, &g, len / 2)?;
                let change = (right - half).norm() / right.norm().max(1e-300);
                report.push(ReportRow::measurement(
                    "voronoi.truncation_doubling",
                    params,
                    Complex64::new(change, 0.0),
                    change <= tol.doubling_rel,
                ));
            }
        }
    }
    Ok((report, fit))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationSettings {
    /// "Beyond" a threshold means at `slack` times it; doubling compares `slack` with `2 slack`.
    pub slack: f64,
    pub beyond_ratio: f64,
    pub doubling_rel: f64,
    /// The `x`-window exponent used for `I`.
    pub window_eps: f64,
    /// Sample points for the fixed-`x` doubling checks.
    pub xs: Vec<f64>,
}

impl Default for TruncationSettings {
    fn default() -> Self {
        Self {
            slack: 16.0,
            beyond_ratio: 1e-3,
            doubling_rel: 1e-3,
            window_eps: 0.0,
            xs: vec![0.0, 0.5, 1.0],
        }
    }
}

/// `|I|` beyond `slack * (N0, M0)` against the largest in-range `|I|`, and
/// the Poisson and Voronoi dual sums at `slack` and `2 slack` times the thresholds.
pub fn truncation_check(
    params: &ParameterBox,
    table: &CoefficientTable,
    moduli: &[u64],
    settings: &TruncationSettings,
    cfg: &QuadratureConfig,
) -> Result<VerificationReport> {
    use crate::oscint::threefold::{dual_weight, ThreefoldIntegral, ThreefoldOptions};
    use crate::oscint::Branch;

    let mut report = VerificationReport::new("truncation");
    let branches = [Branch::Plus, Branch::Minus];
    let lam = settings.slack;
    for &q in moduli {
        let (n0, m0) = truncation_thresholds(params, q as f64);
        let (n_in, m_in) = (n0.floor() as i64, (m0.floor() as u64).max(1));
        let (n_out, m_out) = ((lam * n0).ceil() as i64, (lam * m0).ceil() as u64);
        let near = ThreefoldIntegral::new(
            params,
            q,
            ThreefoldOptions {
                window_eps: settings.window_eps,
                n_max: n_in as u64,
                m_max: m_out,
            },
        )?;
        let far = ThreefoldIntegral::new(
            params,
            q,
            ThreefoldOptions {
                window_eps: settings.window_eps,
                n_max: n_out as u64,
                m_max: m_in,
            },
        )?;
        let (mut reference, mut beyond_n, mut beyond_m) = (0.0_f64, 0.0_f64, 0.0_f64);
        for &b in &branches {
            for n in [0, n_in, -n_in] {
                for m in [1, m_in] {
                    reference = reference.max(near.value(m, n, b)?.norm());
                }
                beyond_m = beyond_m.max(near.value(m_out, n, b)?.norm());
            }
            for n in [n_out, -n_out] {
                for m in [1, m_in] {
                    beyond_n = beyond_n.max(far.value(m, n, b)?.norm());
                }
            }
        }
        let base = json!({"q": q, "N0": n0, "M0": m0, "slack": lam, "reference": reference, "params": params.to_json()});
        for (id, v, at) in [("truncation.beyond_n", beyond_n, json!({"n": n_out})), ("truncation.beyond_m", beyond_m, json!({"m": m_out}))] {
            let mut pj = base.clone();
            pj["at"] = at;
            report.push(ReportRow::bound(id, pj, v / reference.max(1e-300), settings.beyond_ratio));
        }

        let (tn, tm) = ((lam * n0).ceil() as u64, (lam * m0).ceil() as usize);
        for &x in &settings.xs {
            let case = PoissonCase::new(params, q, 1, x)?;
            let (short, long) = (case.dual(tn, cfg)?.value, case.dual(2 * tn, cfg)?.value);
            let (short, long) = (Complex64::new(short.0, short.1), Complex64::new(long.0, long.1));
            let change = (long - short).norm() / long.norm().max(1e-8 * case.mass());
            report.push(ReportRow::measurement(
                "truncation.poisson_doubling",
                json!({"q": q, "x": x, "truncation": tn, "N0": n0}),
                Complex64::new(change, 0.0),
                change <= settings.doubling_rel,
            ));
            if q % table.level == 0 {
                continue;
            }
            let g = PhasedWeight {
                amp: dual_weight(),
                scale: params.big_n * params.big_n,
                freq: -x / (q as f64 * params.big_q),
            };
            let short = voronoi_right(table, q, -1, &g, tm)?;
            let long = voronoi_right(table, q, -1, &g, 2 * tm)?;
            let change = (long - short).norm() / long.norm().max(1e-300);
            report.push(ReportRow::measurement(
                "truncation.voronoi_doubling",
                json!({"q": q, "x": x, "truncation": tm, "M0": m0}),
                Complex64::new(change, 0.0),
                change <= settings.doubling_rel,
            ));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfun::curves::{normalized_coefficients, CURVE_11A1};

    fn level11(n: usize) -> CoefficientTable {
        CoefficientTable::new(11, 2, "11.2.a.a", normalized_coefficients(&CURVE_11A1, n)).unwrap()
    }

    fn c(v: (f64, f64)) -> Complex64 {
        Complex64::new(v.0, v.1)
    }

    #[test]
    fn thresholds() {
        let b = ParameterBox::new(100.0, 10.0, 11, 4.0).unwrap();
        assert!((truncation_thresholds(&b, 5.0).0 - 2.5).abs() < 1e-15);
        let b = ParameterBox::new(100.0, 10.0, 11, 16.0).unwrap();
        assert_eq!(truncation_thresholds(&b, 1.0).1, 176.0);
        let b2 = ParameterBox::new(100.0, 10.0, 11, 25.0).unwrap();
        assert!(truncation_thresholds(&b2, 2.0).0 > truncation_thresholds(&b, 1.0).0);
    }

    #[test]
    fn classical_poisson_on_bump() {
        let cfg = QuadratureConfig::with_abs_tol(1e-12);
        let b = ParameterBox::new(20.0, 0.0, 11, 4.0).unwrap();
        let case = PoissonCase::new(&b, 1, 0, 0.0).unwrap();
        let d = c(case.direct().value);
        let v = c(case.dual(case.default_truncation(2.0), &cfg).unwrap().value);
        assert!((d - v).norm() < 1e-8, "{d} {v}");
    }

    #[test]
    fn twisted_poisson() {
        let cfg = QuadratureConfig::with_abs_tol(1e-12);
        let b = ParameterBox::new(40.0, 5.0, 11, 4.0).unwrap();
        let r = poisson_verify(&b, 5, 2, 0.1, PoissonTolerances::default(), &cfg).unwrap();
        assert!(r.all_pass(), "{:?}", r.rows);
        assert!(PoissonCase::new(&b, 6, 2, 0.1).is_err());
    }

    #[test]
    fn voronoi_identity_small() {
        let t = level11(2000);
        let (r, fit) = voronoi_verify(&t, &[1, 3], &[1000.0, 300.0], VoronoiTolerances::default()).unwrap();
        assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!((c(fit.eta) - 1.0).norm() < 1e-4);
        // a = 1 and a = 2 at q = 3 both present
        assert_eq!(r.rows.iter().filter(|x| x.check_id == "voronoi.identity").count(), 6);
    }

    #[test]
    fn phased_weight_identity() {
        let t = level11(3000);
        let g = PhasedWeight {
            amp: crate::oscint::threefold::dual_weight(),
            scale: 400.0,
            freq: -0.5 / 30.0,
        };
        let left = voronoi_left(&t, 3, -1, &g).unwrap();
        let right = voronoi_right(&t, 3, -1, &g, 2800).unwrap();
        assert!((left - right).norm() < 1e-5 * left.norm(), "{left} {right}");
    }

    #[test]
    fn voronoi_needs_coefficients() {
        let t = level11(500);
        let g = voronoi_test_function(100.0);
        let e = voronoi_right(&t, 7, 1, &g, 31831).unwrap_err();
        assert!(matches!(e, Error::InsufficientCoefficients { needed: 31831, .. }));
        assert!(matches!(voronoi_right(&t, 11, 1, &g, 10), Err(Error::LevelDividesModulus { .. })));
    }
}
