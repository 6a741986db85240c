//! Normalized Hecke eigenvalue tables: parsing, writing and validation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::modmath::{is_prime, SpfSieve};

const HECKE_TOL: f64 = 1e-10;
const LEVEL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Normalization {
    Deligne,
}

/// `lambda(n)` for `1 <= n <= n_max` of a newform of prime level and even weight.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub level: u64,
    pub weight: u32,
    pub label: String,
    pub normalization: Normalization,
    /// index 0 unused
    lambda: Vec<f64>,
}

impl CoefficientTable {
    /// Builds and validates a table from `lambda[1..]`.
    pub fn new(level: u64, weight: u32, label: &str, lambda: Vec<f64>) -> Result<Self> {
        let t = Self::new_unchecked(level, weight, label, lambda)?;
        t.validate()?;
        Ok(t)
    }

    fn new_unchecked(level: u64, weight: u32, label: &str, mut lambda: Vec<f64>) -> Result<Self> {
        if !is_prime(level) {
            return Err(Error::InvalidTable(format!("level {level} is not prime")));
        }
        if weight < 2 || weight % 2 != 0 {
            return Err(Error::InvalidTable(format!("weight {weight} is not an even integer >= 2")));
        }
        if lambda.is_empty() {
            lambda.push(0.0);
        }
        lambda[0] = 0.0;
        Ok(Self {
            level,
            weight,
            label: label.to_string(),
            normalization: Normalization::Deligne,
            lambda,
        })
    }

    /// The all-zero table except `lambda(1) = 1`, which skips Hecke validation.
    pub fn trivial(level: u64, weight: u32, n_max: usize) -> Result<Self> {
        let mut v = vec![0.0; n_max + 1];
        v[1] = 1.0;
        Self::new_unchecked(level, weight, "trivial", v)
    }

    /// The identically zero table, for vanishing checks; skips validation.
    pub fn zero(level: u64, weight: u32, n_max: usize) -> Result<Self> {
        Self::new_unchecked(level, weight, "zero", vec![0.0; n_max + 1])
    }

    pub fn n_max(&self) -> usize {
        self.lambda.len() - 1
    }

    pub fn lambda(&self, n: usize) -> Option<f64> {
        (n >= 1 && n < self.lambda.len()).then(|| self.lambda[n])
    }

    pub fn values(&self) -> &[f64] {
        &self.lambda
    }

    /// Checks every structural relation; fails on the first violation.
    pub fn validate(&self) -> Result<()> {
        let n_max = self.n_max();
        if n_max < 1 {
            return Err(Error::InvalidTable("missing lambda(1)".into()));
        }
        if (self.lambda[1] - 1.0).abs() > HECKE_TOL {
            return Err(Error::InvalidTable(format!("lambda(1) = {} != 1", self.lambda[1])));
        }
        let p = self.level as usize;
        let sieve = SpfSieve::new(n_max);
        for q in sieve.primes() {
            let q = q as usize;
            let lq = self.lambda[q];
            if q == p {
                if ((lq * lq) - 1.0 / p as f64).abs() > LEVEL_TOL {
                    return Err(Error::InvalidTable(format!(
                        "|lambda({p})| = {} differs from p^(-1/2)",
                        lq.abs()
                    )));
                }
                let mut pj = p;
                let mut expect = lq;
                while pj <= n_max {
                    if (self.lambda[pj] - expect).abs() > HECKE_TOL {
                        return Err(Error::InvalidTable(format!("lambda({pj}) != lambda({p})^j")));
                    }
                    expect *= lq;
                    pj = match pj.checked_mul(p) {
                        Some(v) => v,
                        None => break,
                    };
                }
                continue;
            }
            if lq.abs() > 2.0 + HECKE_TOL {
                return Err(Error::InvalidTable(format!("|lambda({q})| = {} > 2", lq.abs())));
            }
            let (mut prev, mut cur) = (1.0, lq);
            let mut qj = q;
            while let Some(next_q) = qj.checked_mul(q).filter(|&v| v <= n_max) {
                let expect = lq * cur - prev;
                if (self.lambda[next_q] - expect).abs() > HECKE_TOL {
                    return Err(Error::InvalidTable(format!(
                        "Hecke relation fails at {next_q}: {} vs {expect}",
                        self.lambda[next_q]
                    )));
                }
                prev = cur;
                cur = self.lambda[next_q];
                qj = next_q;
            }
        }
        for n in 2..=n_max {
            let q = sieve.smallest_factor(n);
            let mut m = n;
            while m % q == 0 {
                m /= q;
            }
            if m > 1 {
                let expect = self.lambda[n / m] * self.lambda[m];
                if (self.lambda[n] - expect).abs() > HECKE_TOL {
                    return Err(Error::InvalidTable(format!(
                        "multiplicativity fails: lambda({n}) = {} but lambda({})lambda({m}) = {expect}",
                        self.lambda[n],
                        n / m
                    )));
                }
            }
        }
        Ok(())
    }

    /// `lambda(q^e)` for a prime `q <= n_max`, extended by the Hecke relations.
    pub fn prime_power(&self, q: usize, e: u32) -> Result<f64> {
        let lq = self.lambda(q).ok_or(Error::InsufficientCoefficients {
            needed: q as u64,
            have: self.n_max() as u64,
        })?;
        if q as u64 == self.level {
            return Ok(lq.powi(e as i32));
        }
        let (mut prev, mut cur) = (1.0, lq);
        if e == 0 {
            return Ok(1.0);
        }
        for _ in 1..e {
            let next = lq * cur - prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// `lambda(m^2)` for `1 <= m <= limit`, from prime data only (index 0 unused).
    pub fn square_values(&self, limit: usize) -> Result<Vec<f64>> {
        if limit > self.n_max() {
            return Err(Error::InsufficientCoefficients {
                needed: limit as u64,
                have: self.n_max() as u64,
            });
        }
        let sieve = SpfSieve::new(limit);
        let mut out = vec![0.0; limit + 1];
        if limit >= 1 {
            out[1] = 1.0;
        }
        for m in 2..=limit {
            let q = sieve.smallest_factor(m);
            let mut r = m;
            let mut e = 0;
            while r % q == 0 {
                r /= q;
                e += 1;
            }
            out[m] = self.prime_power(q, 2 * e)? * out[r];
        }
        Ok(out)
    }

    /// Line-oriented text form: `#` key=value headers, then `n value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# label={}", self.label);
        let _ = writeln!(s, "# level={}", self.level);
        let _ = writeln!(s, "# weight={}", self.weight);
        let _ = writeln!(s, "# normalization=deligne");
        for n in 1..=self.n_max() {
            let _ = writeln!(s, "{n} {:.17e}", self.lambda[n]);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut headers = BTreeMap::new();
        let mut values: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                for tok in rest.split_whitespace() {
                    if let Some((k, v)) = tok.split_once('=') {
                        headers.insert(k.to_ascii_lowercase(), v.to_string());
                    }
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(n), Some(v), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse { line: line_no, msg: format!("expected `n value`, got {line:?}") });
            };
            let n: usize = n
                .parse()
                .map_err(|_| Error::Parse { line: line_no, msg: format!("bad index {n:?}") })?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::Parse { line: line_no, msg: format!("bad value {v:?}") })?;
            if n == 0 || !v.is_finite() {
                return Err(Error::Parse { line: line_no, msg: format!("invalid entry {line:?}") });
            }
            if values.insert(n, v).is_some() {
                return Err(Error::Parse { line: line_no, msg: format!("duplicate index {n}") });
            }
        }
        let get = |k: &str| {
            headers
                .get(k)
                .cloned()
                .ok_or_else(|| Error::InvalidTable(format!("missing header `{k}`")))
        };
        let level: u64 = get("level")?
            .parse()
            .map_err(|_| Error::InvalidTable("level is not an integer".into()))?;
        let weight: u32 = get("weight")?
            .parse()
            .map_err(|_| Error::InvalidTable("weight is not an integer".into()))?;
        let norm = get("normalization")?;
        if !norm.eq_ignore_ascii_case("deligne") {
            return Err(Error::InvalidTable(format!("unsupported normalization {norm}")));
        }
        let label = headers.get("label").cloned().unwrap_or_default();
        if !values.contains_key(&1) {
            return Err(Error::InvalidTable("missing lambda(1)".into()));
        }
        let n_max = *values.keys().next_back().unwrap();
        if values.len() != n_max {
            let gap = (1..=n_max).find(|n| !values.contains_key(n)).unwrap();
            return Err(Error::InvalidTable(format!("missing lambda({gap})")));
        }
        let mut lambda = vec![0.0; n_max + 1];
        for (n, v) in values {
            lambda[n] = v;
        }
        Self::new(level, weight, &label, lambda)
    }
}

/// Reads and validates a coefficient file.
pub fn load_coefficients(path: &Path) -> Result<CoefficientTable> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    CoefficientTable::parse(&text)
}
