//! End-to-end audit at tiny parameters: `S(N)` computed directly (A), through
//! the windowed delta expansion (B), with Poisson applied to the `n`-sum (C),
//! and with Voronoi applied to the `m`-sum at sampled `x` (D).

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use serde_json::json;

use crate::deltasym::DeltaKernel;
use crate::error::{Error, Result};
use crate::expsums::{e_frac, gauss_sum_closed, GaussSumSpec};
use crate::modmath::gcd;
use crate::oscint::quadrature::GaussLegendre;
use crate::oscint::{Plateau, Smooth};
use crate::report::{ReportRow, VerificationReport};
use crate::voronoi::{voronoi_left, voronoi_right, PhasedWeight};

use super::lvalue::default_length_weight;
use super::CoefficientTable;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditSettings {
    pub big_n: u64,
    pub t: f64,
    pub big_q: f64,
    /// `W` is 1 on `|x| <= Q^window_eps` and vanishes at twice that.
    pub window_eps: f64,
    pub ab_rel: f64,
    pub bc_rel: f64,
    pub voronoi_rel: f64,
    /// Moduli and `x` values for the pointwise Voronoi stage.
    pub voronoi_moduli: Vec<u64>,
    pub voronoi_xs: Vec<f64>,
    /// Phase reach (radians) for the Voronoi dual length.
    pub voronoi_reach: f64,
}

impl Default for AuditSettings {
    fn default() -> Self {
        Self {
            big_n: 10,
            t: 2.0,
            big_q: 16.0,
            window_eps: 1.25,
            ab_rel: 1e-3,
            bc_rel: 1e-6,
            voronoi_rel: 1e-4,
            voronoi_moduli: vec![1, 2, 3, 5],
            voronoi_xs: vec![0.0, 0.5, 2.0],
            voronoi_reach: 80.0,
        }
    }
}

/// `m`-side weight: 1 on `[1/4, 25/4]` so that `U(n^2/N^2) = 1` wherever `V(n/N) != 0`.
pub fn audit_dual_weight() -> Plateau {
    Plateau::new(0.125, 0.25, 6.25, 7.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditStages {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    /// `(q, B_q, C_q)`
    pub per_modulus: Vec<(u64, Complex64, Complex64)>,
}

/// Barycentric interpolation on the Gauss–Legendre nodes of one panel.
struct PanelInterp {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl PanelInterp {
    fn new(gl: &GaussLegendre) -> Self {
        let weights = gl
            .nodes
            .iter()
            .zip(&gl.weights)
            .enumerate()
            .map(|(j, (x, w))| {
                let s = ((1.0 - x * x) * w).sqrt();
                if j % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        Self {
            nodes: gl.nodes.clone(),
            weights,
        }
    }

    /// `s` in `[-1, 1]`, `f` the panel values.
    fn eval(&self, s: f64, f: &[f64]) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for ((x, w), v) in self.nodes.iter().zip(&self.weights).zip(f) {
            let d = s - x;
            if d == 0.0 {
                return *v;
            }
            num += w / d * v;
            den += w / d;
        }
        num / den
    }
}

/// Quadrature in `x` for one modulus: nodes, weights times `W g`.
fn x_rule(kernel: &DeltaKernel, q: u64, settings: &AuditSettings) -> Vec<(f64, f64)> {
    let (big_q, n) = (settings.big_q, settings.big_n as f64);
    let half = big_q.powf(settings.window_eps);
    let window = Plateau::new(-2.0 * half, -half, half, 2.0 * half);
    let gl = GaussLegendre::new(20);
    let interp = PanelInterp::new(&gl);
    // g(q, .) has frequencies up to Q/q; half a cycle per coarse panel
    let width = q as f64 / (2.0 * big_q);
    let coarse = (2.0 * half / width).ceil() as usize;
    let h = 2.0 * half / coarse as f64;
    let cx: Vec<f64> = gl.composite(0.0, 2.0 * half, coarse).into_iter().map(|p| p.0).collect();
    let cg = kernel.g_weight_grid_with(q, &cx, 1.0);
    // P M oscillates at up to (25/4 + 7) N^2/(qQ) cycles per unit x; two cycles per panel
    let rate = (6.25 + 7.0) * n * n / (q as f64 * big_q);
    let sub = (0.5 * rate * h).ceil() as usize + 1;
    let mut out = Vec::with_capacity(2 * coarse * sub * 20);
    for c in 0..coarse {
        let lo = c as f64 * h;
        let vals = &cg[c * 20..(c + 1) * 20];
        for (x, w) in gl.composite(lo, lo + h, sub) {
            let g = interp.eval(2.0 * (x - lo) / h - 1.0, vals);
            let f = w * window.value(x) * g;
            if f != 0.0 {
                out.push((x, f));
                out.push((-x, f));
            }
        }
    }
    out
}

/// `sum_m lambda(m) U(m/N^2) e(-mx/(qQ))` split by `m mod q`.
fn m_residue_sums(lam: &[f64], u_vals: &[(usize, f64)], q: u64, step: Complex64, out: &mut [Complex64]) {
    out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
    let (m0, _) = u_vals[0];
    let mut z = step.powu(m0 as u32);
    let mut prev = m0;
    for &(m, u) in u_vals {
        if m != prev {
            z *= step.powu((m - prev) as u32);
            prev = m;
        }
        out[m % q as usize] += lam[m] * u * z;
    }
}

/// `sum_n n^{-it} V(n/N) e(n^2 x/(qQ))` split by `n mod q`.
fn n_residue_sums(settings: &AuditSettings, q: u64, x: f64, out: &mut [Complex64]) {
    out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
    let v = default_length_weight();
    let (n, qq) = (settings.big_n as f64, q as f64 * settings.big_q);
    let hi = (2.5 * n).floor() as u64;
    for k in (0.5 * n).ceil().max(1.0) as u64..=hi {
        let y = k as f64;
        let w = Smooth::value(&v, y / n);
        if w != 0.0 {
            let ph = -settings.t * y.ln() + TAU * y * y * x / qq;
            out[(k % q) as usize] += Complex64::from_polar(w, ph);
        }
    }
}

/// `sum_j amp_j e(c y_j^2)` over `y_j = (j0 + j) delta`, stepping the quadratic
/// phase by recurrence and re-seeding it exactly every 256 terms.
fn chirp_terms(j0: i64, delta: f64, c: f64, amp: &[Complex64], mut f: impl FnMut(usize, Complex64)) {
    let mut z = Complex64::new(0.0, 0.0);
    let mut r = z;
    let step = Complex64::from_polar(1.0, TAU * c * 2.0 * delta * delta);
    for (i, a) in amp.iter().enumerate() {
        if i % 256 == 0 {
            let j = (j0 + i as i64) as f64;
            z = Complex64::from_polar(1.0, TAU * c * (j * delta).powi(2));
            r = Complex64::from_polar(1.0, TAU * c * delta * delta * (2.0 * j + 1.0));
        }
        f(i, a * z);
        z *= r;
        r *= step;
    }
}

/// Poisson dual of the `n`-sum for every residue class of the dual variable:
/// `T(k) = int h(y) e(-ky/q) dy` by a folded trapezoid sum and one FFT.
struct PoissonDual {
    len: usize,
    delta: f64,
    j0: i64,
    /// `y^{-it} V(y/N)` at the trapezoid nodes.
    amp: Vec<Complex64>,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    buf: Vec<Complex64>,
}

impl PoissonDual {
    fn new(settings: &AuditSettings, q: u64, x_max: f64, planner: &mut FftPlanner<f64>) -> Self {
        let n = settings.big_n as f64;
        let (lo, hi) = (0.5 * n, 2.5 * n);
        let band = settings.t / (TAU * lo) + 2.0 * hi * x_max / (q as f64 * settings.big_q);
        // |k/q| <= len/(2q) must clear the band with room for the weight's
        // decay, which scales with its transition width N/2
        let need = 2.0 * (band + 60.0 / n);
        let len = ((q as f64 * need).ceil() as usize).max(16);
        let delta = q as f64 / len as f64;
        let v = default_length_weight();
        let j0 = (lo / delta).floor() as i64;
        let j1 = (hi / delta).ceil() as i64;
        let amp = (j0..=j1)
            .map(|j| {
                let y = j as f64 * delta;
                if y <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                Complex64::from_polar(Smooth::value(&v, y / n), -settings.t * y.ln())
            })
            .collect();
        Self {
            len,
            delta,
            j0,
            amp,
            fft: planner.plan_fft_forward(len),
            buf: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Fills `by_class[s] = sum_{k = s mod q} T(k)` over `|k| < len/2`.
    fn class_sums(&mut self, settings: &AuditSettings, q: u64, x: f64, by_class: &mut [Complex64]) {
        let c = x / (q as f64 * settings.big_q);
        self.buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        let (len, j0) = (self.len as i64, self.j0);
        let buf = &mut self.buf;
        chirp_terms(j0, self.delta, c, &self.amp, |i, z| {
            buf[(j0 + i as i64).rem_euclid(len) as usize] += z;
        });
        self.fft.process(&mut self.buf);
        by_class.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        let half = len / 2;
        for (i, z) in self.buf.iter().enumerate() {
            let k = if (i as i64) < half { i as i64 } else { i as i64 - len };
            by_class[k.rem_euclid(q as i64) as usize] += z * self.delta;
        }
    }
}

fn check_table(table: &CoefficientTable, settings: &AuditSettings) -> Result<usize> {
    let n = settings.big_n as usize;
    let m_hi = (audit_dual_weight().d * (n * n) as f64).floor() as usize;
    let need = m_hi.max((5 * n / 2).pow(2));
    if table.n_max() < need {
        return Err(Error::InsufficientCoefficients {
            needed: need as u64,
            have: table.n_max() as u64,
        });
    }
    Ok(m_hi)
}

/// Stage A: `S(N) = sum_n lambda(n^2) n^{-it} V(n/N)`.
pub fn stage_a(table: &CoefficientTable, settings: &AuditSettings) -> Result<Complex64> {
    check_table(table, settings)?;
    let v = default_length_weight();
    let n = settings.big_n as f64;
    let lam = table.values();
    Ok((1..=(2.5 * n) as usize)
        .map(|k| {
            let y = k as f64;
            Complex64::from_polar(Smooth::value(&v, y / n), -settings.t * y.ln()) * lam[k * k]
        })
        .sum())
}

/// Stages A, B and C.
pub fn audit_stages(table: &CoefficientTable, settings: &AuditSettings) -> Result<AuditStages> {
    if settings.big_n == 0 || !(settings.big_q >= 1.0) {
        return Err(Error::Domain("audit needs N >= 1 and Q >= 1".into()));
    }
    let m_hi = check_table(table, settings)?;
    let a = stage_a(table, settings)?;
    let kernel = DeltaKernel::new(settings.big_q)?;
    let lam = table.values();
    let u = audit_dual_weight();
    let nn = (settings.big_n * settings.big_n) as f64;
    let u_vals: Vec<(usize, f64)> = (1..=m_hi)
        .map(|m| (m, Smooth::value(&u, m as f64 / nn)))
        .filter(|&(m, w)| w != 0.0 && lam[m] != 0.0)
        .collect();
    let mut planner = FftPlanner::new();
    let mut per_modulus = Vec::new();
    let (mut b, mut c) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for q in 1..=kernel.max_modulus() {
        let qq = q as f64 * settings.big_q;
        let units: Vec<i64> = (0..q as i64).filter(|&a| gcd(a as u64, q) == 1).collect();
        let units = if q == 1 { vec![0] } else { units };
        // e(a r^2/q), e(-a r/q) and G(a, s, q) per unit a and residue r
        let sq: Vec<Vec<Complex64>> = units
            .iter()
            .map(|&a| (0..q as i64).map(|r| e_frac(a * r * r, q)).collect())
            .collect();
        let lin: Vec<Vec<Complex64>> = units.iter().map(|&a| (0..q as i64).map(|r| e_frac(-a * r, q)).collect()).collect();
        let gauss: Vec<Vec<Complex64>> = units
            .iter()
            .map(|&a| (0..q as i64).map(|s| gauss_sum_closed(GaussSumSpec::new(a, s, q)?)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let rule = x_rule(&kernel, q, settings);
        let x_max = rule.iter().fold(0.0_f64, |m, p| m.max(p.0.abs()));
        let mut dual = PoissonDual::new(settings, q, x_max, &mut planner);
        let qs = q as usize;
        let (mut mres, mut nres, mut kres) = (vec![Complex64::new(0.0, 0.0); qs], vec![Complex64::new(0.0, 0.0); qs], vec![Complex64::new(0.0, 0.0); qs]);
        let (mut bq, mut cq) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for &(x, w) in &rule {
            if u_vals.is_empty() {
                break;
            }
            m_residue_sums(lam, &u_vals, q, Complex64::from_polar(1.0, -TAU * x / qq), &mut mres);
            n_residue_sums(settings, q, x, &mut nres);
            dual.class_sums(settings, q, x, &mut kres);
            for (i, _) in units.iter().enumerate() {
                let mm: Complex64 = mres.iter().zip(&lin[i]).map(|(z, e)| z * e).sum();
                let pb: Complex64 = nres.iter().zip(&sq[i]).map(|(z, e)| z * e).sum();
                let pc: Complex64 = kres.iter().zip(&gauss[i]).map(|(z, g)| z * g).sum::<Complex64>() / q as f64;
                bq += w * mm * pb;
                cq += w * mm * pc;
            }
        }
        bq /= qq;
        cq /= qq;
        b += bq;
        c += cq;
        per_modulus.push((q, bq, cq));
    }
    Ok(AuditStages { a, b, c, per_modulus })
}

/// Stage D at one `(q, x)`: the `m`-sum directly and by Voronoi with `a = 1`.
pub fn stage_d(table: &CoefficientTable, settings: &AuditSettings, q: u64, x: f64) -> Result<(Complex64, Complex64, usize)> {
    let n = settings.big_n as f64;
    let u = audit_dual_weight();
    let g = PhasedWeight {
        amp: u,
        scale: n * n,
        freq: -x / (q as f64 * settings.big_q),
    };
    let p = table.level as f64;
    // decay across the lower transition plus the stationary range p y x^2/Q^2
    let lower = (u.b * n * n).sqrt() - (u.a * n * n).sqrt();
    let decay = settings.voronoi_reach * q as f64 * p.sqrt() / (2.0 * TAU * lower);
    let stat = p * u.d * n * n * (x / settings.big_q).powi(2);
    let len = (2.0 * (decay * decay + stat)).ceil() as usize;
    let left = voronoi_left(table, q, -1, &g)?;
    let right = voronoi_right(table, q, -1, &g, len)?;
    Ok((left, right, len))
}

pub fn audit_decomposition(table: &CoefficientTable, settings: &AuditSettings) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("audit-pipeline");
    let st = audit_stages(table, settings)?;
    let base = json!({"N": settings.big_n, "t": settings.t, "Q": settings.big_q, "window_eps": settings.window_eps, "level": table.level});
    report.push(ReportRow::measurement("audit.stage_a", base.clone(), st.a, true));
    report.push(ReportRow::compare_rel("audit.stage_b_vs_a", base.clone(), st.b, st.a, settings.ab_rel));
    report.push(ReportRow::compare_rel("audit.stage_c_vs_a", base.clone(), st.c, st.a, settings.ab_rel));
    for &(q, bq, cq) in &st.per_modulus {
        let mut pj = base.clone();
        pj["q"] = json!(q);
        report.push(ReportRow::compare_rel("audit.stage_c_vs_b", pj, cq, bq, settings.bc_rel));
    }
    for &q in &settings.voronoi_moduli {
        if q % table.level == 0 {
            continue;
        }
        for &x in &settings.voronoi_xs {
            let (left, right, len) = stage_d(table, settings, q, x)?;
            let mut pj = base.clone();
            pj["q"] = json!(q);
            pj["x"] = json!(x);
            pj["dual_length"] = json!(len);
            report.push(ReportRow::compare_rel("audit.stage_d_pointwise", pj, right, left, settings.voronoi_rel));
        }
    }
    Ok(report)
}
