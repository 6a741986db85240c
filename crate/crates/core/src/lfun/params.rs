//! The parameter box `(N, t, p, K, Q, ...)` shared by the summation-formula
//! and audit stages.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modmath::is_prime;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterBox {
    pub big_n: f64,
    pub t: f64,
    pub p: u64,
    pub k: f64,
    pub big_q: f64,
    /// Dyadic block `[C, 2C)` for the modulus `q`.
    pub c_block: (f64, f64),
    /// Dyadic block `[M1, 2M1)` for the dual `m` variable.
    pub m1_block: (f64, f64),
    /// Exponent of the `N^eps` slack in thresholds and regime flags.
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegimeFlags {
    /// `pt <= N <= p^{1+eps} t^{3/2+eps}`
    pub length_in_range: bool,
    /// `t^eps <= K <= t^{1-eps}`
    pub k_in_range: bool,
}

impl ParameterBox {
    /// `Q` defaults to `N / sqrt(K)`, `C` to `[1, 2Q]` and `M1` to `[pK, 2pK)`.
    pub fn new(big_n: f64, t: f64, p: u64, k: f64) -> Result<Self> {
        if !(big_n > 0.0) || !(t >= 0.0) || !(k > 0.0) {
            return Err(Error::Domain(format!("need N > 0, t >= 0, K > 0; got N={big_n}, t={t}, K={k}")));
        }
        if !is_prime(p) {
            return Err(Error::Domain(format!("level {p} is not prime")));
        }
        let big_q = big_n / k.sqrt();
        let m1 = p as f64 * k;
        Ok(Self {
            big_n,
            t,
            p,
            k,
            big_q,
            c_block: (1.0, 2.0 * big_q),
            m1_block: (m1, 2.0 * m1),
            eps: 0.0,
        })
    }

    pub fn with_q(mut self, big_q: f64) -> Self {
        self.big_q = big_q;
        self.c_block = (1.0, 2.0 * big_q);
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// Dual length for the `n` variable, `N0 = qt/N + sqrt(K)`.
    pub fn n0(&self, q: f64) -> f64 {
        q * self.t / self.big_n + self.k.sqrt()
    }

    /// Dual length for the `m` variable, `M0 = N^eps p K`.
    pub fn m0(&self) -> f64 {
        self.big_n.powf(self.eps) * self.p as f64 * self.k
    }

    pub fn regime(&self) -> RegimeFlags {
        let (p, t, e) = (self.p as f64, self.t, self.eps);
        RegimeFlags {
            length_in_range: p * t <= self.big_n && self.big_n <= p.powf(1.0 + e) * t.powf(1.5 + e),
            k_in_range: t.powf(e) <= self.k && self.k <= t.powf(1.0 - e),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        let b = ParameterBox::new(100.0, 10.0, 11, 4.0).unwrap();
        assert!((b.n0(5.0) - 2.5).abs() < 1e-15);
        assert_eq!(b.big_q, 50.0);
        let b = ParameterBox::new(100.0, 10.0, 11, 16.0).unwrap();
        assert_eq!(b.m0(), 176.0);
        assert!(b.n0(3.0) < b.n0(4.0));
        let tiny = ParameterBox::new(100.0, 10.0, 11, 1e-12).unwrap();
        assert!(tiny.n0(0.0) < 1e-5);
    }

    #[test]
    fn regime_flags() {
        let b = ParameterBox::new(11.0 * 64.0 * 4.0, 64.0, 11, 16.0).unwrap();
        let r = b.regime();
        assert!(r.length_in_range && r.k_in_range);
        let r = ParameterBox::new(10.0, 64.0, 11, 100.0).unwrap().regime();
        assert!(!r.length_in_range && !r.k_in_range);
        assert!(ParameterBox::new(10.0, 1.0, 12, 1.0).is_err());
    }
}
