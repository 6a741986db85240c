//! Quadratic large sieve checked on random and indicator coefficients, and
//! exhaustive counts of the quadruples `(n1, n2, m1, m2)` with
//! `(p n1^2 - 4 m1)(p n2^2 - 4 m2)` a square.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::modmath::{jacobi_symbol, squarefree_decomposition, SpfSieve};
use crate::report::{ReportRow, VerificationReport};

#[derive(Debug, Clone, PartialEq)]
pub struct SieveInstance {
    pub big_q: u64,
    /// `a_1 .. a_N`
    pub coeffs: Vec<Complex64>,
    pub seed: Option<u64>,
}

impl SieveInstance {
    pub fn new(big_q: u64, coeffs: Vec<Complex64>) -> Result<Self> {
        if big_q == 0 || coeffs.is_empty() {
            return Err(Error::Domain("need Q >= 1 and N >= 1".into()));
        }
        Ok(Self {
            big_q,
            coeffs,
            seed: None,
        })
    }

    /// Unit-modulus coefficients with phases drawn from a seeded ChaCha stream.
    pub fn random(big_q: u64, n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..n)
            .map(|_| Complex64::from_polar(1.0, std::f64::consts::TAU * rng.gen::<f64>()))
            .collect();
        let mut s = Self::new(big_q, coeffs)?;
        s.seed = Some(seed);
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SieveResult {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs/rhs`, defined as 0 when both vanish.
    pub ratio: f64,
}

/// Odd square-free moduli up to `Q`.
pub fn odd_squarefree_moduli(big_q: u64) -> Vec<u64> {
    let sieve = SpfSieve::new(big_q as usize);
    (1..=big_q)
        .step_by(2)
        .filter(|&q| sieve.factor(q as usize).iter().all(|&(_, e)| e == 1))
        .collect()
}

/// Jacobi symbols `(n/q)` for the sieve moduli and `1 <= n <= N`.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    pub moduli: Vec<u64>,
    rows: Vec<Vec<i8>>,
}

impl CharacterTable {
    pub fn new(big_q: u64, n: usize) -> Self {
        let moduli = odd_squarefree_moduli(big_q);
        let rows = moduli
            .iter()
            .map(|&q| (1..=n as i64).map(|m| jacobi_symbol(m, q).unwrap_or(0)).collect())
            .collect();
        Self { moduli, rows }
    }
}

/// `lhs = sum*_{q <= Q} |sum_n a_n (n/q)|^2` over odd square-free `q`,
/// `rhs = (Q + N) sum_{n1 n2 = square} |a_{n1} a_{n2}|`.
pub fn large_sieve_check(inst: &SieveInstance) -> SieveResult {
    large_sieve_with(inst, &CharacterTable::new(inst.big_q, inst.n()))
}

pub fn large_sieve_with(inst: &SieveInstance, table: &CharacterTable) -> SieveResult {
    let lhs: f64 = table
        .rows
        .iter()
        .map(|row| {
            inst.coeffs
                .iter()
                .zip(row)
                .fold(Complex64::new(0.0, 0.0), |acc, (a, &c)| acc + a * c as f64)
                .norm_sqr()
        })
        .sum();
    // n1 n2 is a square iff n1 and n2 share their square-free part
    let mut classes: HashMap<i64, f64> = HashMap::new();
    for (i, a) in inst.coeffs.iter().enumerate() {
        let (core, _) = squarefree_decomposition(i as i64 + 1);
        *classes.entry(core).or_default() += a.norm();
    }
    let mass: f64 = classes.values().map(|s| s * s).sum();
    let rhs = (inst.big_q as f64 + inst.n() as f64) * mass;
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    SieveResult { lhs, rhs, ratio }
}

/// `sieve.ratio` rows over `instances` seeded draws per `(Q, N)`.
pub fn large_sieve_sweep(shapes: &[(u64, usize)], instances: u64, seed: u64, bound: f64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("sieve-check");
    for &(big_q, n) in shapes {
        let table = CharacterTable::new(big_q, n);
        let mut worst = 0.0_f64;
        let mut worst_seed = seed;
        for i in 0..instances {
            let s = seed.wrapping_add(i);
            let r = large_sieve_with(&SieveInstance::random(big_q, n, s)?, &table);
            if r.ratio > worst {
                worst = r.ratio;
                worst_seed = s;
            }
        }
        report.push(ReportRow::bound(
            "sieve.max_ratio",
            json!({"Q": big_q, "N": n, "instances": instances, "seed": seed, "worst_seed": worst_seed}),
            worst,
            bound,
        ));
    }
    Ok(report)
}

/// Indicator of `n = 1`: the left side counts the odd square-free moduli.
pub fn indicator_check(big_q: u64, n: usize) -> Result<VerificationReport> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    coeffs[0] = Complex64::new(1.0, 0.0);
    let r = large_sieve_check(&SieveInstance::new(big_q, coeffs)?);
    let count = (1..=big_q)
        .filter(|q| q % 2 == 1 && crate::modmath::FactoredInteger::new(*q).map(|f| f.is_squarefree()).unwrap_or(false))
        .count() as f64;
    let mut report = VerificationReport::new("sieve-check");
    let params = json!({"Q": big_q, "N": n, "coefficients": "indicator of n = 1"});
    report.push(ReportRow::compare("sieve.indicator_lhs", params.clone(), Complex64::new(r.lhs, 0.0), Complex64::new(count, 0.0), 0.0));
    report.push(ReportRow::compare(
        "sieve.indicator_rhs",
        params,
        Complex64::new(r.rhs, 0.0),
        Complex64::new((big_q + n as u64) as f64, 0.0),
        0.0,
    ));
    Ok(report)
}

/// Ranges are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadrupleCountSpec {
    pub p: u64,
    pub n_range: (i64, i64),
    pub m_range: (i64, i64),
    /// Required divisor `q1 d` of every `p n^2 - 4m`.
    pub divisor: i64,
}

/// Largest quadruple space searched exhaustively.
pub const QUADRUPLE_BUDGET: u128 = 100_000_000;

impl QuadrupleCountSpec {
    /// `n ~ t/sqrt K` and `m ~ pK` as dyadic ranges `[X, 2X)`.
    pub fn dyadic(p: u64, t: f64, k: f64, divisor: i64) -> Self {
        let n0 = t / k.sqrt();
        let m0 = p as f64 * k;
        Self {
            p,
            n_range: (n0.ceil() as i64, (2.0 * n0).ceil() as i64 - 1),
            m_range: (m0.ceil() as i64, (2.0 * m0).ceil() as i64 - 1),
            divisor,
        }
    }

    fn size(&self) -> u128 {
        let w = |r: (i64, i64)| (r.1 - r.0 + 1).max(0) as u128;
        (w(self.n_range) * w(self.m_range)).pow(2)
    }

    fn check(&self) -> Result<()> {
        if self.divisor < 1 {
            return Err(Error::Domain("divisor must be positive".into()));
        }
        if !crate::modmath::is_prime(self.p) {
            return Err(Error::Domain(format!("{} is not prime", self.p)));
        }
        if self.size() > QUADRUPLE_BUDGET {
            return Err(Error::Budget {
                size: self.size(),
                budget: QUADRUPLE_BUDGET,
            });
        }
        Ok(())
    }

    fn d(&self, n: i64, m: i64) -> i64 {
        self.p as i64 * n * n - 4 * m
    }

    /// `(n, m, d)` with `divisor | d`.
    fn points(&self) -> Vec<(i64, i64, i64)> {
        let mut out = Vec::new();
        for n in self.n_range.0..=self.n_range.1 {
            for m in self.m_range.0..=self.m_range.1 {
                let d = self.d(n, m);
                if d % self.divisor == 0 {
                    out.push((n, m, d));
                }
            }
        }
        out
    }
}

fn is_square(v: i128) -> bool {
    if v < 0 {
        return false;
    }
    let r = (v as f64).sqrt() as i128;
    (r.saturating_sub(1)..=r + 1).any(|s| s >= 0 && s * s == v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadrupleCount {
    /// Pairwise enumeration of all admissible `(n1, m1), (n2, m2)`.
    pub direct: u64,
    /// Count through `p n^2 - 4m = q1d theta r^2` with `theta` square-free.
    pub representation: u64,
    /// Number of admissible `(n, m)`, i.e. the diagonal.
    pub points: u64,
    /// Largest `|p n^2 - 4m|` over the ranges.
    pub d_range: i64,
}

/// Counts quadruples twice: by testing every pair for a square product,
/// and by summing squares of class sizes over the `(theta, r)` parametrisation.
pub fn quadruple_count(spec: &QuadrupleCountSpec) -> Result<QuadrupleCount> {
    spec.check()?;
    let pts = spec.points();
    let mut direct = 0u64;
    for &(_, _, d1) in &pts {
        for &(_, _, d2) in &pts {
            if is_square(d1 as i128 * d2 as i128) {
                direct += 1;
            }
        }
    }
    let corners = [
        spec.d(spec.n_range.0, spec.m_range.0),
        spec.d(spec.n_range.0, spec.m_range.1),
        spec.d(spec.n_range.1, spec.m_range.0),
        spec.d(spec.n_range.1, spec.m_range.1),
    ];
    let d_range = corners.iter().map(|d| d.abs()).max().unwrap_or(0);
    Ok(QuadrupleCount {
        direct,
        representation: representation_count(spec, d_range),
        points: pts.len() as u64,
        d_range,
    })
}

/// `(n, m)` in range with `p n^2 - 4m = target`.
fn solutions(spec: &QuadrupleCountSpec, target: i64) -> u64 {
    let mut c = 0;
    for n in spec.n_range.0..=spec.n_range.1 {
        let num = spec.p as i64 * n * n - target;
        if num % 4 == 0 {
            let m = num / 4;
            if m >= spec.m_range.0 && m <= spec.m_range.1 {
                c += 1;
            }
        }
    }
    c
}

fn representation_count(spec: &QuadrupleCountSpec, d_range: i64) -> u64 {
    let dd = spec.divisor;
    let limit = d_range / dd;
    let sieve = SpfSieve::new(limit.max(1) as usize);
    let mut total = 0u64;
    let mut nonzero = 0u64;
    for theta_abs in 1..=limit {
        if sieve.factor(theta_abs as usize).iter().any(|&(_, e)| e > 1) {
            continue;
        }
        for theta in [theta_abs, -theta_abs] {
            let mut class = 0u64;
            let mut r = 1i64;
            while theta_abs * r * r <= limit {
                class += solutions(spec, dd * theta * r * r);
                r += 1;
            }
            total += class * class;
            nonzero += class;
        }
    }
    // d = 0 makes the product 0 = 0^2 with any partner
    let zeros = solutions(spec, 0);
    let all = nonzero + zeros;
    total + 2 * zeros * all - zeros * zeros
}

/// Every off-diagonal pair with equal `d` satisfies `|n1 - n2| <= c K^{3/2}/t`;
/// reports the largest observed `|n1 - n2| t / K^{3/2}`.
pub fn pair_localization_check(p: u64, k: f64, t: f64, spec: &QuadrupleCountSpec, c: f64) -> Result<VerificationReport> {
    spec.check()?;
    let mut by_d: HashMap<i64, Vec<i64>> = HashMap::new();
    for (n, _, d) in spec.points() {
        by_d.entry(d).or_default().push(n);
    }
    let scale = k.powf(1.5) / t;
    let mut worst = 0.0_f64;
    let mut pairs = 0u64;
    for ns in by_d.values() {
        for &a in ns {
            for &b in ns {
                if a != b {
                    pairs += 1;
                    worst = worst.max((a - b).abs() as f64 / scale);
                }
            }
        }
    }
    let mut report = VerificationReport::new("count-quadruples");
    let in_regime = t.powf(2.0 / 3.0) <= k && k <= t;
    report.push(ReportRow::bound(
        "quadruples.pair_localization",
        json!({"p": p, "K": k, "t": t, "n_range": spec.n_range, "m_range": spec.m_range,
               "off_diagonal_pairs": pairs, "in_regime": in_regime}),
        worst,
        c,
    ));
    Ok(report)
}

/// Count rows for one spec: the two enumerations agree, and the total is at
/// most `slack p K^2`.
pub fn quadruple_report(spec: &QuadrupleCountSpec, k: f64, t: f64, slack: f64) -> Result<VerificationReport> {
    let c = quadruple_count(spec)?;
    let params = json!({"p": spec.p, "K": k, "t": t, "n_range": spec.n_range, "m_range": spec.m_range,
                        "divisor": spec.divisor, "points": c.points, "d_range": c.d_range});
    let mut report = VerificationReport::new("count-quadruples");
    report.push(ReportRow::compare(
        "quadruples.representation",
        params.clone(),
        Complex64::new(c.direct as f64, 0.0),
        Complex64::new(c.representation as f64, 0.0),
        0.0,
    ));
    report.push(ReportRow::bound("quadruples.count_bound", params, c.direct as f64, slack * spec.p as f64 * k * k));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_counts_moduli() {
        let r = large_sieve_check(&{
            let mut c = vec![Complex64::new(0.0, 0.0); 1];
            c[0] = Complex64::new(1.0, 0.0);
            SieveInstance::new(20, c).unwrap()
        });
        // 1, 3, 5, 7, 11, 13, 15, 17, 19
        assert_eq!(r.lhs, 9.0);
        assert_eq!(r.rhs, 21.0);
        assert!(r.ratio < 1.0);
        assert!(indicator_check(20, 1).unwrap().all_pass());
    }

    #[test]
    fn zero_coefficients() {
        let r = large_sieve_check(&SieveInstance::new(10, vec![Complex64::new(0.0, 0.0); 8]).unwrap());
        assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, 0.0));
    }

    #[test]
    fn random_instances_are_reproducible() {
        let a = SieveInstance::random(16, 16, 7).unwrap();
        let b = SieveInstance::random(16, 16, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.coeffs.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        let r = large_sieve_sweep(&[(16, 16)], 5, 7, 10.0).unwrap();
        assert!(r.all_pass());
    }

    #[test]
    fn brute_rhs() {
        let inst = SieveInstance::random(9, 12, 3).unwrap();
        let r = large_sieve_check(&inst);
        let mut brute = 0.0;
        for i in 1..=12i128 {
            for j in 1..=12i128 {
                if is_square(i * j) {
                    brute += inst.coeffs[i as usize - 1].norm() * inst.coeffs[j as usize - 1].norm();
                }
            }
        }
        assert!((r.rhs - 21.0 * brute).abs() < 1e-9);
    }

    #[test]
    fn small_quadruple_example() {
        let spec = QuadrupleCountSpec {
            p: 3,
            n_range: (1, 2),
            m_range: (1, 2),
            divisor: 1,
        };
        let c = quadruple_count(&spec).unwrap();
        assert_eq!(c.direct, 4);
        assert_eq!(c.representation, 4);
    }

    #[test]
    fn representation_matches_direct_with_zeros() {
        // p n^2 = 4m has solutions (n even, m = 11 (n/2)^2)
        let spec = QuadrupleCountSpec {
            p: 11,
            n_range: (1, 12),
            m_range: (1, 400),
            divisor: 1,
        };
        let c = quadruple_count(&spec).unwrap();
        assert!(c.direct >= c.points);
        assert_eq!(c.direct, c.representation);
    }

    #[test]
    fn divisor_chain_is_monotone() {
        let mut prev = u64::MAX;
        for dd in [1, 3, 9, 27] {
            let spec = QuadrupleCountSpec {
                p: 7,
                n_range: (3, 10),
                m_range: (20, 120),
                divisor: dd,
            };
            let c = quadruple_count(&spec).unwrap();
            assert_eq!(c.direct, c.representation);
            assert!(c.direct <= prev);
            prev = c.direct;
        }
    }

    #[test]
    fn budget_guard() {
        let spec = QuadrupleCountSpec {
            p: 11,
            n_range: (1, 1000),
            m_range: (1, 1000),
            divisor: 1,
        };
        assert!(matches!(quadruple_count(&spec), Err(Error::Budget { .. })));
    }

    #[test]
    fn localization_at_small_scale() {
        let spec = QuadrupleCountSpec::dyadic(11, 64.0, 16.0, 1);
        assert_eq!(spec.n_range, (16, 31));
        assert_eq!(spec.m_range, (176, 351));
        let r = pair_localization_check(11, 16.0, 64.0, &spec, 4.0).unwrap();
        assert!(r.all_pass(), "{:?}", r.rows);
    }
}
