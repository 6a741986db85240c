//! Smooth compactly supported weights with exact Taylor coefficients.

use super::series::Series;

/// A real weight with known support and Taylor expansion at any point.
pub trait Smooth: Send + Sync {
    fn value(&self, x: f64) -> f64;
    /// Coefficients `g^(k)(x)/k!` for `k = 0..=order`.
    fn taylor(&self, x: f64, order: usize) -> Series;
    fn support(&self) -> (f64, f64);

    fn derivative(&self, x: f64, k: usize) -> f64 {
        let c = self.taylor(x, k).0[k];
        (1..=k).fold(c, |acc, j| acc * j as f64)
    }
}

/// `exp(1 - 1/(1 - (2x-3)^2))` on `(1, 2)`, zero elsewhere; peak value 1 at `x = 3/2`.
pub fn canonical_bump(x: f64) -> f64 {
    let s = 2.0 * x - 3.0;
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// The canonical bump moved affinely onto `(lo, hi)`, optionally scaled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub lo: f64,
    pub hi: f64,
    pub scale: f64,
}

impl Bump {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo < hi);
        Self { lo, hi, scale: 1.0 }
    }

    pub fn scaled(self, scale: f64) -> Self {
        Self { scale, ..self }
    }

    fn local(&self, x: f64) -> f64 {
        // maps (lo, hi) to (-1, 1)
        2.0 * (x - self.lo) / (self.hi - self.lo) - 1.0
    }
}

impl Smooth for Bump {
    fn value(&self, x: f64) -> f64 {
        self.scale * canonical_bump(0.5 * (self.local(x) + 3.0))
    }

    fn taylor(&self, x: f64, order: usize) -> Series {
        let s0 = self.local(x);
        if s0.abs() >= 1.0 {
            return Series::constant(0.0, order);
        }
        let s = Series::linear(s0, 2.0 / (self.hi - self.lo), order);
        let inner = (&s * &s).scale(-1.0).add_const(1.0);
        inner.recip().scale(-1.0).add_const(1.0).exp().scale(self.scale)
    }

    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

fn psi_series(s: &Series) -> Series {
    if s.0[0] <= 0.0 {
        Series::constant(0.0, s.order())
    } else {
        s.recip().scale(-1.0).exp()
    }
}

/// Smooth step rising from 0 at `s <= 0` to 1 at `s >= 1`.
fn step_series(s: &Series) -> Series {
    let a = psi_series(s);
    let b = psi_series(&s.scale(-1.0).add_const(1.0));
    let den = &a + &b;
    &a * &den.recip()
}

pub fn smooth_step(s: f64) -> f64 {
    step_series(&Series::constant(s, 0)).0[0]
}

/// Zero outside `(a, d)`, identically 1 on `[b, c]`, smooth in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Plateau {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        assert!(a < b && b <= c && c < d);
        Self { a, b, c, d }
    }
}

impl Smooth for Plateau {
    fn value(&self, x: f64) -> f64 {
        self.taylor(x, 0).0[0]
    }

    fn taylor(&self, x: f64, order: usize) -> Series {
        if x <= self.a || x >= self.d {
            Series::constant(0.0, order)
        } else if x < self.b {
            let h = self.b - self.a;
            step_series(&Series::linear((x - self.a) / h, 1.0 / h, order))
        } else if x <= self.c {
            Series::constant(1.0, order)
        } else {
            let h = self.d - self.c;
            step_series(&Series::linear((self.d - x) / h, -1.0 / h, order))
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.a, self.d)
    }
}

/// Indicator of `[lo, hi]`; only for sharp-cutoff test modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpCutoff {
    pub lo: f64,
    pub hi: f64,
}

impl Smooth for SharpCutoff {
    fn value(&self, x: f64) -> f64 {
        if x >= self.lo && x <= self.hi {
            1.0
        } else {
            0.0
        }
    }

    fn taylor(&self, x: f64, order: usize) -> Series {
        Series::constant(self.value(x), order)
    }

    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// `G(z) = U(z) V((z + u)^2) sqrt(z + u)`, the amplitude left after the
/// substitution `y = (z + u)^2` in the `n`-side integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub u: f64,
    pub outer: Plateau,
    pub inner: Plateau,
}

impl WeightSpec {
    pub fn new(u: f64, outer: Plateau, inner: Plateau) -> Self {
        Self { u, outer, inner }
    }
}

impl Smooth for WeightSpec {
    fn value(&self, z: f64) -> f64 {
        let s = z + self.u;
        if s <= 0.0 {
            return 0.0;
        }
        self.outer.value(z) * self.inner.value(s * s) * s.sqrt()
    }

    fn taylor(&self, z: f64, order: usize) -> Series {
        let s0 = z + self.u;
        let o = self.outer.taylor(z, order);
        if s0 <= 0.0 || o.0.iter().all(|c| *c == 0.0) {
            return Series::constant(0.0, order);
        }
        let s = Series::linear(s0, 1.0, order);
        let sq = &s * &s;
        let v = self.inner.taylor(s0 * s0, order).compose(&sq.add_const(-s0 * s0));
        &(&o * &v) * &s.sqrt()
    }

    fn support(&self) -> (f64, f64) {
        self.outer.support()
    }
}

/// Largest `|g^(s)|` over a uniform grid of the support, for `s = 0..=max_order`.
pub fn derivative_bounds(g: &dyn Smooth, max_order: usize, samples: usize) -> Vec<f64> {
    let (lo, hi) = g.support();
    let mut out = vec![0.0_f64; max_order + 1];
    for i in 0..=samples {
        let x = lo + (hi - lo) * i as f64 / samples as f64;
        let t = g.taylor(x, max_order);
        let mut fact = 1.0;
        for (k, c) in t.0.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            out[k] = out[k].max((c * fact).abs());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(g: &dyn Smooth, x: f64, k: usize) -> f64 {
        match k {
            1 => {
                let h = 1e-5;
                (g.value(x + h) - g.value(x - h)) / (2.0 * h)
            }
            2 => {
                let h = 1e-4;
                (g.value(x + h) - 2.0 * g.value(x) + g.value(x - h)) / (h * h)
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn weight_spec_taylor_matches_differences() {
        let w = WeightSpec::new(0.3, Plateau::new(0.2, 0.5, 1.0, 1.4), Plateau::new(0.5, 1.0, 2.0, 2.5));
        for &z in &[0.3, 0.45, 0.8, 1.2] {
            let t = w.taylor(z, 2);
            assert!((t.0[0] - w.value(z)).abs() < 1e-14);
            assert!((w.derivative(z, 1) - fd(&w, z, 1)).abs() < 1e-6);
            assert!((w.derivative(z, 2) - fd(&w, z, 2)).abs() < 1e-4 * (1.0 + fd(&w, z, 2).abs()));
        }
        assert!((w.value(0.7) - 1.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(w.value(1.5), 0.0);
    }

    #[test]
    fn bump_peak_and_support() {
        let b = Bump::new(0.5, 1.5);
        assert!((b.value(1.0) - 1.0).abs() < 1e-15);
        assert_eq!(b.value(0.5), 0.0);
        assert_eq!(b.value(1.6), 0.0);
        assert!((canonical_bump(1.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bump_taylor_matches_finite_differences() {
        let b = Bump::new(0.5, 1.5);
        for &x in &[0.7, 0.95, 1.2, 1.4] {
            let t = b.taylor(x, 2);
            assert!((t.0[0] - b.value(x)).abs() < 1e-15);
            assert!((t.0[1] - fd(&b, x, 1)).abs() < 1e-6 * t.0[1].abs().max(1.0));
            assert!((2.0 * t.0[2] - fd(&b, x, 2)).abs() < 1e-5 * t.0[2].abs().max(1.0));
        }
    }

    #[test]
    fn plateau_shape() {
        let v = Plateau::new(0.5, 1.0, 2.0, 2.5);
        assert_eq!(v.value(0.5), 0.0);
        assert_eq!(v.value(1.5), 1.0);
        assert_eq!(v.value(2.5), 0.0);
        assert!((v.value(0.75) - 0.5).abs() < 1e-15);
        for &x in &[0.6, 0.9, 2.1, 2.4] {
            let t = v.taylor(x, 2);
            assert!((t.0[1] - fd(&v, x, 1)).abs() < 1e-4, "x={x}");
            assert!((2.0 * t.0[2] - fd(&v, x, 2)).abs() < 1e-2, "x={x}");
        }
    }

    #[test]
    fn derivative_bounds_are_finite_and_grow() {
        let b = Bump::new(1.0, 2.0);
        let c = derivative_bounds(&b, 4, 2000);
        assert!((c[0] - 1.0).abs() < 1e-6);
        assert!(c.iter().all(|x| x.is_finite()));
        assert!(c[4] > c[1]);
    }
}
