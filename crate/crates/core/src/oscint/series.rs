//! Truncated power series `sum c_k y^k`, used to get exact Taylor
//! coefficients of the smooth weights and phases at a point.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Series(pub Vec<f64>);

impl Series {
    pub fn constant(c: f64, order: usize) -> Self {
        let mut v = vec![0.0; order + 1];
        v[0] = c;
        Series(v)
    }

    /// `c0 + c1 y`.
    pub fn linear(c0: f64, c1: f64, order: usize) -> Self {
        let mut s = Self::constant(c0, order);
        if order >= 1 {
            s.0[1] = c1;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn scale(&self, k: f64) -> Self {
        Series(self.0.iter().map(|c| c * k).collect())
    }

    pub fn add_const(&self, k: f64) -> Self {
        let mut v = self.0.clone();
        v[0] += k;
        Series(v)
    }

    pub fn recip(&self) -> Self {
        let a = &self.0;
        assert!(a[0] != 0.0, "reciprocal of series with zero constant term");
        let n = a.len();
        let mut b = vec![0.0; n];
        b[0] = 1.0 / a[0];
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s / a[0];
        }
        Series(b)
    }

    pub fn exp(&self) -> Self {
        let a = &self.0;
        let n = a.len();
        let mut b = vec![0.0; n];
        b[0] = a[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            b[k] = s / k as f64;
        }
        Series(b)
    }

    pub fn ln(&self) -> Self {
        let a = &self.0;
        assert!(a[0] > 0.0);
        let n = a.len();
        let mut b = vec![0.0; n];
        b[0] = a[0].ln();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| j as f64 * b[j] * a[k - j]).sum();
            b[k] = (a[k] - s / k as f64) / a[0];
        }
        Series(b)
    }

    pub fn powf(&self, p: f64) -> Self {
        self.ln().scale(p).exp()
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    /// `self(inner(y))` for an `inner` series with zero constant term.
    pub fn compose(&self, inner: &Series) -> Self {
        assert!(inner.0[0] == 0.0);
        let n = self.0.len().min(inner.0.len());
        let mut out = Series::constant(0.0, n - 1);
        let mut pow = Series::constant(1.0, n - 1);
        let inner = Series(inner.0[..n].to_vec());
        for k in 0..n {
            for i in 0..n {
                out.0[i] += self.0[k] * pow.0[i];
            }
            pow = &pow * &inner;
        }
        out
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * y + c)
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1.0)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        let n = self.0.len().min(o.0.len());
        let mut v = vec![0.0; n];
        for i in 0..n {
            if self.0[i] == 0.0 {
                continue;
            }
            for j in 0..n - i {
                v[i + j] += self.0[i] * o.0[j];
            }
        }
        Series(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_ln_roundtrip() {
        let s = Series(vec![0.3, -1.2, 0.5, 2.0, -0.7]);
        let r = s.exp().ln();
        for (a, b) in s.0.iter().zip(&r.0) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn recip_of_one_minus_y() {
        let s = Series(vec![1.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(s.recip().0.iter().all(|c| (c - 1.0).abs() < 1e-15));
    }

    #[test]
    fn sqrt_squares_back() {
        let s = Series(vec![2.0, 0.4, -0.1, 0.03]);
        let r = s.sqrt();
        let sq = &r * &r;
        for (a, b) in s.0.iter().zip(&sq.0) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn compose_matches_direct() {
        // exp(2y + y^2) via compose vs exp of the series
        let outer = Series::constant(0.0, 6).add_const(0.0);
        let mut e = outer.clone();
        let mut f = 1.0;
        for k in 0..=6 {
            if k > 0 {
                f *= k as f64;
            }
            e.0[k] = 1.0 / f;
        }
        let inner = Series(vec![0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let a = e.compose(&inner);
        let b = inner.exp();
        for (x, y) in a.0.iter().zip(&b.0) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
