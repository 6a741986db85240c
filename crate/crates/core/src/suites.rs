//! Named verification suites. Every threshold is a knob: `--param` sets
//! problem sizes, `--tolerance` sets pass limits, and the first report row
//! records the effective values of both.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::deltasym::{
    delta_expand, g_bound_report, g_decay_slope, kernel_envelope_constant, DeltaForm, DeltaKernel,
};
use crate::error::{Error, Result};
use crate::expsums::{
    charsum_c1_bruteforce, charsum_c1_closed, charsum_c_closed, charsum_c_displayed, gauss_sum_closed,
    parity_case, CharSumOracle, CharSumSpec, GaussRowBuilder, GaussSumSpec,
};
use crate::lfun::audit::{audit_decomposition, AuditSettings};
use crate::lfun::curves::{curve_for_level, normalized_coefficients};
use crate::lfun::lvalue::{cutoff_weight, euler_product, fe_probe, l_value, sym_square_coeffs, ErfcCutoff};
use crate::lfun::{load_coefficients, CoefficientTable, ParameterBox};
use crate::modmath::gcd;
use crate::oscint::stationary::stationary_error_law;
use crate::oscint::QuadratureConfig;
use crate::report::{ReportRow, VerificationReport};
use crate::sieve::{indicator_check, large_sieve_sweep, pair_localization_check, quadruple_report, QuadrupleCountSpec};
use crate::voronoi::{poisson_verify, truncation_check, voronoi_verify, PoissonTolerances, TruncationSettings, VoronoiTolerances};

pub const SUITES: [&str; 11] = [
    "verify-gauss",
    "verify-charsum",
    "verify-delta",
    "verify-poisson",
    "verify-voronoi",
    "stationary-phase",
    "sieve-check",
    "count-quadruples",
    "eval-L",
    "fe-probe",
    "audit-pipeline",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, String>,
    pub seed: u64,
    pub coeff_file: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            params: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            seed: 7,
            coeff_file: None,
        }
    }

    pub fn param(mut self, key: &str, value: &str) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn tolerance(mut self, key: &str, value: &str) -> Self {
        self.tolerances.insert(key.to_string(), value.to_string());
        self
    }

    pub fn coeff_file(mut self, path: impl Into<PathBuf>) -> Self {
        self.coeff_file = Some(path.into());
        self
    }
}

/// Splits `k=v`.
pub fn parse_assignment(s: &str) -> Result<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(Error::Config(format!("expected key=value, got {s:?}"))),
    }
}

/// Knob values read by a suite; anything supplied but never read is an error.
struct Knobs<'a> {
    given: &'a BTreeMap<String, String>,
    what: &'static str,
    seen: BTreeMap<String, Value>,
}

impl<'a> Knobs<'a> {
    fn new(given: &'a BTreeMap<String, String>, what: &'static str) -> Self {
        Self {
            given,
            what,
            seen: BTreeMap::new(),
        }
    }

    fn parse<T: FromStr>(&self, key: &str, s: &str) -> Result<T> {
        s.trim()
            .parse()
            .map_err(|_| Error::Config(format!("{} {key}: cannot parse {s:?}", self.what)))
    }

    fn get<T: FromStr + Serialize>(&mut self, key: &str, default: T) -> Result<T> {
        let v = match self.given.get(key) {
            Some(s) => self.parse(key, s)?,
            None => default,
        };
        self.seen.insert(key.to_string(), json!(v));
        Ok(v)
    }

    /// Comma-separated list.
    fn list<T: FromStr + Serialize + Clone>(&mut self, key: &str, default: &[T]) -> Result<Vec<T>> {
        let v = match self.given.get(key) {
            Some(s) => s.split(',').map(|x| self.parse(key, x)).collect::<Result<Vec<T>>>()?,
            None => default.to_vec(),
        };
        if v.is_empty() {
            return Err(Error::Config(format!("{} {key}: empty list", self.what)));
        }
        self.seen.insert(key.to_string(), json!(v));
        Ok(v)
    }

    /// A tolerance: finite and positive.
    fn tol(&mut self, key: &str, default: f64) -> Result<f64> {
        let v = self.get(key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("{} {key} must be positive, got {v}", self.what)));
        }
        Ok(v)
    }

    fn finish(self) -> Result<Value> {
        if let Some(k) = self.given.keys().find(|k| !self.seen.contains_key(*k)) {
            let known: Vec<&String> = self.seen.keys().collect();
            return Err(Error::Config(format!("unknown {} {k:?}; this suite reads {known:?}", self.what)));
        }
        Ok(json!(self.seen))
    }
}

type Job = Box<dyn FnOnce() -> Result<VerificationReport>>;

/// Where tables come from: the coefficient file if given, else the built-in curves.
struct Tables {
    file: Option<PathBuf>,
}

impl Tables {
    fn source(&self) -> String {
        match &self.file {
            Some(p) => p.display().to_string(),
            None => "built-in".to_string(),
        }
    }

    fn get(&self, level: u64, n: usize) -> Result<CoefficientTable> {
        match &self.file {
            Some(p) => load_coefficients(p),
            None => builtin_table(level, n),
        }
    }
}

/// Normalized coefficients of the bundled curve at `level`.
pub fn builtin_table(level: u64, n: usize) -> Result<CoefficientTable> {
    let c = curve_for_level(level)
        .ok_or_else(|| Error::Config(format!("no built-in form at level {level}; pass a coefficient file")))?;
    CoefficientTable::new(level, 2, c.label, normalized_coefficients(&c, n))
}

/// Runs one suite. Configuration problems surface before any work is done.
pub fn run(cfg: &RunConfig) -> Result<VerificationReport> {
    let mut p = Knobs::new(&cfg.params, "parameter");
    let mut t = Knobs::new(&cfg.tolerances, "tolerance");
    let tables = Tables {
        file: cfg.coeff_file.clone(),
    };
    if let Some(f) = &tables.file {
        if !f.is_file() {
            return Err(Error::Io(format!("{}: no such file", f.display())));
        }
    }
    let job: Job = match cfg.suite.as_str() {
        "verify-gauss" => gauss_suite(&mut p, &mut t)?,
        "verify-charsum" => charsum_suite(&mut p, &mut t)?,
        "verify-delta" => delta_suite(&mut p, &mut t)?,
        "verify-poisson" => poisson_suite(&mut p, &mut t)?,
        "verify-voronoi" => voronoi_suite(&mut p, &mut t, &tables)?,
        "stationary-phase" => stationary_suite(&mut p, &mut t)?,
        "sieve-check" => sieve_suite(&mut p, &mut t, cfg.seed)?,
        "count-quadruples" => quadruple_suite(&mut p, &mut t)?,
        "eval-L" => eval_l_suite(&mut p, &mut t, &tables)?,
        "fe-probe" => fe_probe_suite(&mut p, &mut t, &tables)?,
        "audit-pipeline" => audit_suite(&mut p, &mut t, &tables)?,
        other => return Err(Error::Config(format!("unknown suite {other:?}; known: {}", SUITES.join(", ")))),
    };
    let effective = json!({
        "suite": cfg.suite,
        "seed": cfg.seed,
        "coefficients": tables.source(),
        "params": p.finish()?,
        "tolerances": t.finish()?,
    });
    let body = job()?;
    let mut report = VerificationReport::new(&cfg.suite);
    report.push(ReportRow::measurement("config.effective", effective, Complex64::new(0.0, 0.0), true));
    report.extend(body);
    Ok(report)
}

fn units(q: u64) -> impl Iterator<Item = u64> {
    (0..q).filter(move |&a| gcd(a, q) == 1)
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn gauss_suite(p: &mut Knobs, t: &mut Knobs) -> Result<Job> {
    let c_max: u64 = p.get("c_max", 512)?;
    let closed = t.tol("closed_form", 1e-9)?;
    let mult = t.tol("multiplicativity", 1e-9)?;
    Ok(Box::new(move || gauss_report(c_max, closed, mult)))
}

/// `G(a, b; m)` for every unit `a` (rows of non-units are empty).
fn unit_rows(builder: &mut GaussRowBuilder, m: u64) -> Result<Vec<Vec<Complex64>>> {
    (0..m)
        .map(|a| if gcd(a, m) == 1 { builder.row(a as i64, m) } else { Ok(Vec::new()) })
        .collect()
}

/// Closed forms against the definition for all `(a, b)` at each `c`, and
/// `G(a, b; rs) = G(ar, b; s) G(as, b; r)` over coprime splittings `1 < r < s`.
/// One row per modulus carries the worst error.
pub fn gauss_report(c_max: u64, closed_tol: f64, mult_tol: f64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("verify-gauss");
    let mut builder = GaussRowBuilder::new();
    for c in 1..=c_max {
        let rows = unit_rows(&mut builder, c)?;
        let (mut worst, mut at, mut pairs) = (0.0_f64, (0, 0), 0u64);
        for a in units(c) {
            let row = &rows[a as usize];
            for b in 0..c {
                let cf = gauss_sum_closed(GaussSumSpec::new(a as i64, b as i64, c)?)?;
                let e = (cf - row[b as usize]).norm();
                pairs += 1;
                if e > worst {
                    worst = e;
                    at = (a, b);
                }
            }
        }
        rep.push(ReportRow::bound(
            "gauss.closed_form",
            json!({"c": c, "pairs": pairs, "worst_a": at.0, "worst_b": at.1, "tol_per_sqrt_c": closed_tol}),
            worst,
            closed_tol * (c as f64).sqrt(),
        ));

        let splits: Vec<(u64, u64)> = (2..c)
            .filter(|&r| c % r == 0 && r * r < c && gcd(r, c / r) == 1)
            .map(|r| (r, c / r))
            .collect();
        if splits.is_empty() {
            continue;
        }
        let (mut worst, mut checks) = (0.0_f64, 0u64);
        for &(r, s) in &splits {
            let rows_r = unit_rows(&mut builder, r)?;
            let rows_s = unit_rows(&mut builder, s)?;
            for a in units(c) {
                let gs = &rows_s[(a * r % s) as usize];
                let gr = &rows_r[(a * s % r) as usize];
                for b in 0..c {
                    let e = (rows[a as usize][b as usize] - gs[(b % s) as usize] * gr[(b % r) as usize]).norm();
                    worst = worst.max(e);
                    checks += 1;
                }
            }
        }
        rep.push(ReportRow::bound(
            "gauss.multiplicativity",
            json!({"c": c, "splittings": splits, "checks": checks}),
            worst,
            mult_tol,
        ));
    }
    Ok(rep)
}

fn charsum_suite(p: &mut Knobs, t: &mut Knobs) -> Result<Job> {
    let c1_q_max: u64 = p.get("c1_q_max", 999)?;
    let q_max: u64 = p.get("q_max", 200)?;
    let levels: Vec<u64> = p.list("levels", &[7, 11, 13])?;
    let m_max: i64 = p.get("m_max", 20)?;
    let n_max: i64 = p.get("n_max", 10)?;
    let c1_tol = t.tol("c1_closed_form", 1e-8)?;
    let c_tol = t.tol("closed_form", 1e-8)?;
    Ok(Box::new(move || {
        let mut rep = c1_report(c1_q_max, c1_tol)?;
        rep.extend(charsum_report(q_max, &levels, m_max, n_max, c_tol)?);
        Ok(rep)
    }))
}

/// Closed `C1(l, q)` against the definition for every `l mod q`, odd `q`.
pub fn c1_report(q_max: u64, tol: f64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("verify-charsum");
    for q in (1..=q_max).step_by(2) {
        let mut worst = 0.0_f64;
        for l in 0..q as i64 {
            worst = worst.max((charsum_c1_closed(l, q)? - charsum_c1_bruteforce(l, q)?).norm());
        }
        rep.push(ReportRow::bound(
            "charsum.c1_closed_form",
            json!({"q": q, "tol_per_sqrt_q": tol}),
            worst,
            tol * (q as f64).sqrt(),
        ));
    }
    Ok(rep)
}

/// Unit-tracked `C(m, n, q)` against the definition, per `(p, q)`. Two
/// companion rows are reports, not checks: how far the value moves when the
/// unimodular factors are dropped, and how far the literal displayed
/// normalisation is from the exact value.
pub fn charsum_report(q_max: u64, levels: &[u64], m_max: i64, n_max: i64, tol: f64) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("verify-charsum");
    let mut builder = GaussRowBuilder::new();
    for q in 1..=q_max {
        let oracle = CharSumOracle::new(q, &mut builder)?;
        let case = parity_case(q);
        for &p in levels {
            if q % p == 0 {
                continue;
            }
            let (mut worst, mut units_gap, mut display_gap) = (0.0_f64, 0.0_f64, 0.0_f64);
            for m in 1..=m_max {
                for n in -n_max..=n_max {
                    let spec = CharSumSpec::new(m, n, q, p)?;
                    let exact = charsum_c_closed(spec, true)?;
                    worst = worst.max((exact - oracle.eval(m, n, p)?).norm());
                    units_gap = units_gap.max((exact - charsum_c_closed(spec, false)?).norm());
                    display_gap = display_gap.max((exact - charsum_c_displayed(spec)?).norm());
                }
            }
            let params = json!({"q": q, "p": p, "case": case, "m_max": m_max, "n_max": n_max});
            rep.push(ReportRow::bound("charsum.closed_form", params.clone(), worst, tol * (q as f64).sqrt()));
            rep.push(ReportRow::measurement("charsum.units_dropped", params.clone(), re(units_gap), true));
            rep.push(ReportRow::measurement("charsum.displayed_form", params, re(display_gap), true));
        }
    }
    Ok(rep)
}

fn delta_suite(p: &mut Knobs, t: &mut Knobs) -> Result<Job> {
    let qs: Vec<f64> = p.list("kernel_q", &[8.0, 16.0, 32.0])?;
    let n_max: i64 = p.get("n_max", 50)?;
    let g_ns: Vec<i64> = p.list("g_integral_n", &[0, 1, 5])?;
    let window_eps: f64 = p.get("window_eps", crate::deltasym::DEFAULT_WINDOW_EPS)?;
    let g_q: f64 = p.get("g_q", 64.0)?;
    let g_xs: Vec<f64> = p.list("g_x", &[0.0, 0.5, 1.0, 2.0, 4.0])?;
    let decay_q: u64 = p.get("decay_modulus", 1)?;
    let decay: Vec<f64> = p.list("decay_range", &[2.0, 64.0])?;
    let decay_points: usize = p.get("decay_points", 40)?;
    let decay_max: f64 = p.get("decay_slope_max", -2.0)?;
    let samples: usize = p.get("envelope_samples", 2000)?;
    let kernel_tol = t.tol("kernel_sum", 1e-9)?;
    let env_tol = t.tol("envelope_constant", 10.0)?;
    let quad_tol = t.tol("g_quadrature", 1e-10)?;
    if decay.len() != 2 || decay_points < 2 {
        return Err(Error::Config("decay_range needs two endpoints and decay_points >= 2".into()));
    }
    Ok(Box::new(move || {
        let mut rep = VerificationReport::new("verify-delta");
        let mut residuals: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
        for &big_q in &qs {
            let k = DeltaKernel::new(big_q)?;
            for n in -n_max..=n_max {
                let e = delta_expand(n, &k, DeltaForm::KernelSum, window_eps)?;
                let want = if n == 0 { 1.0 } else { 0.0 };
                rep.push(ReportRow::compare("delta.kernel_sum", json!({"Q": big_q, "n": n}), e.value, re(want), kernel_tol));
            }
            for &n in &g_ns {
                let e = delta_expand(n, &k, DeltaForm::GIntegral, window_eps)?;
                residuals.entry(n).or_default().push(e.residual);
                rep.push(ReportRow::measurement(
                    "delta.g_integral_residual",
                    json!({"Q": big_q, "n": n, "window_eps": window_eps}),
                    re(e.residual),
                    true,
                ));
            }
            let c = kernel_envelope_constant(&k, samples);
            rep.push(ReportRow::bound("delta.kernel_envelope_constant", json!({"Q": big_q, "u_samples": samples}), c, env_tol));
        }
        for (n, r) in residuals {
            let monotone = r.windows(2).all(|w| w[1] < w[0]);
            rep.push(ReportRow::measurement(
                "delta.g_integral_monotone",
                json!({"n": n, "Q": qs, "residuals": r}),
                re(r[r.len() - 1] / r[0]),
                monotone,
            ));
        }
        let k = DeltaKernel::new(g_q)?;
        let moduli: Vec<u64> = (1..=k.max_modulus()).collect();
        rep.extend(g_bound_report(&k, &moduli, &g_xs, &QuadratureConfig::with_abs_tol(quad_tol))?);
        let slope = g_decay_slope(&k, decay_q, decay[0], decay[1], decay_points);
        rep.push(ReportRow::bound(
            "delta.g_decay_slope",
            json!({"Q": g_q, "q": decay_q, "x_range": decay, "points": decay_points}),
            slope,
            decay_max,
        ));
        Ok(rep)
    }))
}

fn poisson_suite(p: &mut Knobs, t: &mut Knobs) -> Result<Job> {
    let ns: Vec<f64> = p.list("N", &[20.0, 40.0])?;
    let ts: Vec<f64> = p.list("t", &[0.0, 5.0])?;
    let q_max: u64 = p.get("q_max", 10)?;
    let xs: Vec<f64> = p.list("x", &[0.0, 0.1])?;
    let level: u64 = p.get("p", 11)?;
    let k: f64 = p.get("K", 4.0)?;
    let slack: f64 = p.get("slack", 2.0)?;
    let tol = PoissonTolerances {
        identity_rel: t.tol("identity_rel", 1e-6)?,
        doubling_rel: t.tol("doubling_rel", 1e-3)?,
        slack,
    };
    let cfg = QuadratureConfig::with_abs_tol(t.tol("quadrature", 1e-12)?);
    Ok(Box::new(move || {
        let mut rep = VerificationReport::new("verify-poisson");
        for &n in &ns {
            for &tt in &ts {
                let b = ParameterBox::new(n, tt, level, k)?;
                for q in 1..=q_max {
                    for a in units(q) {
                        for &x in &xs {
                            rep.extend(poisson_verify(&b, q, a as i64, x, tol, &cfg)?);
                        }
                    }
                }
            }
        }
        Ok(rep)
    }))
}

fn voronoi_suite(p: &mut Knobs, t: &mut Knobs, tables: &Tables) -> Result<Job> {
    let level: u64 = p.get("level", 11)?;
    let length: usize = p.get("length", 32000)?;
    let moduli: Vec<u64> = p.list("moduli", &[1, 2, 3, 4, 5, 6, 7])?;
    let ys: Vec<f64> = p.list("Y", &[100.0, 300.0, 1000.0])?;
    let reach: f64 = p.get("reach", 400.0)?;
    let tol = VoronoiTolerances {
        identity_rel: t.tol("identity_rel", 1e-4)?,
        modulus: t.tol("eta_modulus", 1e-3)?,
        doubling_rel: t.tol("doubling_rel", 1e-3)?,
        reach,
    };
    let tr_n: f64 = p.get("truncation_N", 20.0)?;
    let tr_t: f64 = p.get("truncation_t", 8.0)?;
    let tr_k: f64 = p.get("truncation_K", 4.0)?;
    let tr_moduli: Vec<u64> = p.list("truncation_moduli", &[3, 4])?;
    let defaults = TruncationSettings::default();
    let settings = TruncationSettings {
        slack: p.get("truncation_slack", defaults.slack)?,
        window_eps: p.get("truncation_window_eps", defaults.window_eps)?,
        xs: p.list("truncation_x", &defaults.xs)?,
        beyond_ratio: t.tol("beyond_ratio", defaults.beyond_ratio)?,
        doubling_rel: t.tol("truncation_doubling_rel", defaults.doubling_rel)?,
    };
    let cfg = QuadratureConfig::with_abs_tol(t.tol("quadrature", 1e-10)?);
    let table = tables.get(level, length)?;
    Ok(Box::new(move || {
        let (mut rep, _) = voronoi_verify(&table, &moduli, &ys, tol)?;
        let b = ParameterBox::new(tr_n, tr_t, table.level, tr_k)?;
        rep.extend(truncation_check(&b, &table, &tr_moduli, &settings, &cfg)?);
        Ok(rep)
    }))
}

fn stationary_suite(p: &mut Knobs, t: &mut Knobs) -> Result<Job> {
    let ts: Vec<f64> = p.list("T", &[1e2, 1e3, 1e4])?;
    let max_order: usize = p.get("max_order", 1)?;
    let target: f64 = p.get("order0_slope", -1.0)?;
    let band = t.tol("slope_band", 0.3)?;
    let cfg = QuadratureConfig::with_abs_tol(t.tol("quadrature", 1e-13)?);
    let max_panels: usize = p.get("quadrature_panels", cfg.max_panels)?;
    let cfg = QuadratureConfig { max_panels, ..cfg };
    cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
    if ts.len() < 2 {
        return Err(Error::Config("T needs at least two values for a slope".into()));
    }
    Ok(Box::new(move || {
        let law = stationary_error_law(&ts, max_order, &cfg)?;
        let mut rep = VerificationReport::new("stationary-phase");
        for pt in &law.points {
            for (k, e) in pt.scaled_errors.iter().enumerate() {
                rep.push(ReportRow::measurement(
                    "stationary.scaled_error",
                    json!({"T": pt.t, "order": k, "quadrature_re": pt.quadrature.0, "quadrature_im": pt.quadrature.1}),
                    re(*e),
                    true,
                ));
            }
        }
        rep.push(ReportRow::compare("stationary.order0_slope", json!({"T": ts}), re(law.slopes[0]), re(target), band));
        for k in 1..law.slopes.len() {
            rep.push(ReportRow::measurement(
                "stationary.correction_steepens",
                json!({"T": ts, "order": k, "previous_slope": law.slopes[k - 1]}),
                re(law.slopes[k]),
                law.slopes[k] < law.slopes[k - 1],
            ));
        }
        Ok(rep)
    }))
}

fn shapes(list: &[String]) -> Result<Vec<(u64, usize)>> {
    list.iter()
        .map(|s| {
            let bad = || Error::Config(format!("shape {s:?} is not QxN"));
            let (q, n) = s.split_once('x').ok_or_else(bad)?;
            Ok((q.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?))
        })
        .collect()
}

fn sieve_suite(p: &mut Knobs, t: &mut Knobs, seed: u64) -> Result<Job> {
    let sweep = shapes(&p.list("shapes", &["64x64".to_string(), "256x256".into(), "64x512".into(), "256x512".into()])?)?;
    let indicator = shapes(&p.list("indicator_shapes", &["20x1".to_string(), "256x512".into()])?)?;
    let instances: u64 = p.get("instances", 200)?;
    let bound = t.tol("ratio_bound", 10.0)?;
    Ok(Box::new(move || {
        let mut rep = large_sieve_sweep(&sweep, instances, seed, bound)?;
        for &(q, n) in &indicator {
            rep.extend(indicator_check(q, n)?);
        }
        Ok(rep)
    }))
}

fn quadruple_suite(p: &mut Knobs, t: &mut Knobs) -> Result<Job> {
    let level: u64 = p.get("p", 11)?;
    let tt: f64 = p.get("t", 64.0)?;
    let ks: Vec<f64> = p.list("K", &[16.0, 32.0])?;
    let divisors: Vec<i64> = p.list("divisors", &[1, 3])?;
    let slack = t.tol("count_slack", 20.0)?;
    let c = t.tol("pair_constant", 4.0)?;
    Ok(Box::new(move || {
        let mut rep = VerificationReport::new("count-quadruples");
        for &k in &ks {
            for &d in &divisors {
                let spec = QuadrupleCountSpec::dyadic(level, tt, k, d);
                rep.extend(quadruple_report(&spec, k, tt, slack)?);
                if d == 1 {
                    rep.extend(pair_localization_check(level, k, tt, &spec, c)?);
                }
            }
        }
        Ok(rep)
    }))
}

fn complex_points(re_parts: &[f64], im_parts: &[f64], what: &str) -> Result<Vec<Complex64>> {
    if re_parts.len() != im_parts.len() {
        return Err(Error::Config(format!("{what}: real and imaginary lists differ in length")));
    }
    Ok(re_parts.iter().zip(im_parts).map(|(&a, &b)| Complex64::new(a, b)).collect())
}

fn eval_l_suite(p: &mut Knobs, t: &mut Knobs, tables: &Tables) -> Result<Job> {
    let levels: Vec<u64> = p.list("levels", &[11, 17, 19])?;
    let length: usize = p.get("length", 5000)?;
    let s = complex_points(&p.list("s_re", &[3.0, 3.0])?, &p.list("s_im", &[0.0, 2.0])?, "s")?;
    let primes: usize = p.get("euler_prime_bound", 5000)?;
    let x: f64 = p.get("cutoff_x", 2500.0)?;
    let end: f64 = p.get("cutoff_end", 2.0)?;
    let tol = t.tol("euler_vs_dirichlet", 1e-8)?;
    let list = match tables.file {
        Some(_) => vec![tables.get(0, 0)?],
        None => levels.iter().map(|&l| builtin_table(l, length)).collect::<Result<_>>()?,
    };
    let source = tables.source();
    Ok(Box::new(move || {
        let mut rep = VerificationReport::new("eval-L");
        for table in &list {
            let ok = table.validate();
            rep.push(ReportRow::measurement(
                "lfun.hecke_validation",
                json!({"label": table.label, "level": table.level, "n_max": table.n_max(), "source": source,
                       "error": ok.as_ref().err().map(|e| e.to_string())}),
                re(table.n_max() as f64),
                ok.is_ok(),
            ));
            let series = sym_square_coeffs(table, table.n_max())?;
            for &z in &s {
                let e = euler_product(table, z, primes)?;
                let d = l_value(&series, z, &cutoff_weight(end), x)?;
                rep.push(ReportRow::compare(
                    "lfun.euler_vs_dirichlet",
                    json!({"label": table.label, "s_re": z.re, "s_im": z.im, "prime_bound": primes, "X": x, "cutoff_end": end}),
                    Complex64::new(d.value.0, d.value.1),
                    e,
                    tol,
                ));
            }
        }
        Ok(rep)
    }))
}

fn fe_probe_suite(p: &mut Knobs, t: &mut Knobs, tables: &Tables) -> Result<Job> {
    let level: u64 = p.get("level", 11)?;
    let length: usize = p.get("length", 60000)?;
    let smoothing = complex_points(&p.list("erfc_a", &[1.5, 2.0])?, &p.list("cutoff_x", &[1000.0, 2500.0])?, "smoothings")?;
    let s = complex_points(&p.list("s_re", &[0.5, 0.6, 0.7, 0.6])?, &p.list("s_im", &[0.0, 0.0, 0.0, 1.0])?, "s")?;
    let alphas: Vec<f64> = p.list("conductor_exponents", &[0.5, 1.0])?;
    let stability = t.tol("stability", 1e-3)?;
    let table = tables.get(level, length)?;
    Ok(Box::new(move || {
        let series = sym_square_coeffs(&table, table.n_max())?;
        let mut rep = VerificationReport::new("fe-probe");
        let mut verdicts = Vec::new();
        for sm in &smoothing {
            let (a, x) = (sm.re, sm.im);
            let probe = fe_probe(&series, &s, &alphas, &ErfcCutoff { a }, x, stability)?;
            for r in &probe.residuals {
                let params = json!({"erfc_a": a, "X": x, "s_re": r.s.0, "s_im": r.s.1, "alpha": r.alpha,
                                    "magnitude": r.magnitude, "stable": r.stable});
                if r.s == (0.5, 0.0) {
                    rep.push(ReportRow::compare("fe.centre_residual", params, re(r.residual), re(0.0), 0.0));
                } else {
                    let rel = r.residual / r.magnitude.max(1e-300);
                    rep.push(ReportRow::measurement("fe.residual", params, re(rel), r.stable));
                }
            }
            rep.push(ReportRow::measurement(
                "fe.verdict",
                json!({"erfc_a": a, "X": x, "candidates": alphas, "margin": probe.margin}),
                re(probe.best_alpha.unwrap_or(f64::NAN)),
                probe.best_alpha.is_some(),
            ));
            verdicts.push(probe.best_alpha);
        }
        let stable = verdicts[0].is_some() && verdicts.iter().all(|v| *v == verdicts[0]);
        rep.push(ReportRow::measurement(
            "fe.verdict_stable",
            json!({"label": table.label, "level": table.level, "smoothings": verdicts.len()}),
            re(verdicts[0].unwrap_or(f64::NAN)),
            stable,
        ));
        Ok(rep)
    }))
}

fn audit_suite(p: &mut Knobs, t: &mut Knobs, tables: &Tables) -> Result<Job> {
    let level: u64 = p.get("level", 11)?;
    let length: usize = p.get("length", 32000)?;
    let d = AuditSettings::default();
    let settings = AuditSettings {
        big_n: p.get("N", d.big_n)?,
        t: p.get("t", d.t)?,
        big_q: p.get("Q", d.big_q)?,
        window_eps: p.get("window_eps", d.window_eps)?,
        voronoi_moduli: p.list("voronoi_moduli", &d.voronoi_moduli)?,
        voronoi_xs: p.list("voronoi_x", &d.voronoi_xs)?,
        voronoi_reach: p.get("voronoi_reach", d.voronoi_reach)?,
        ab_rel: t.tol("ab_rel", d.ab_rel)?,
        bc_rel: t.tol("bc_rel", d.bc_rel)?,
        voronoi_rel: t.tol("voronoi_rel", d.voronoi_rel)?,
    };
    let table = tables.get(level, length)?;
    Ok(Box::new(move || audit_decomposition(&table, &settings)))
}
