//! Integer-order Bessel functions and the split `2J = e^{ix}W+ + e^{-ix}W-`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use super::bump::smooth_step;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Beyond this argument the Hankel expansion is used.
pub fn hankel_threshold(n: u32) -> f64 {
    let nu = n as f64;
    (25.0_f64).max(0.75 * nu * nu + 10.0)
}

fn j_series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = (0..n).fold(1.0, |acc, k| acc * h / (k + 1) as f64);
    let mut sum = term;
    let h2 = h * h;
    for k in 1..200 {
        term *= -h2 / (k as f64 * (k + n as usize) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `J_0..=J_top` by Miller's backward recurrence, normalized by
/// `J_0 + 2 sum J_{2k} = 1`.
fn j_miller(top: usize, x: f64) -> Vec<f64> {
    let big = (top as f64).max(x);
    let mut start = (big + 30.0 + (50.0 * big).sqrt()) as usize;
    start += start % 2;
    let mut out = vec![0.0; top + 1];
    let (mut jp, mut j) = (0.0_f64, 1e-300_f64);
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let jm = 2.0 * k as f64 / x * j - jp;
        jp = j;
        j = jm;
        // j now holds J_{k-1}
        if k - 1 <= top {
            out[k - 1] = j;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += j;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

fn hankel_pq(n: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (n as f64).powi(2);
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term == 0.0 {
            break;
        }
        if term.abs() > last && k > 6 {
            break;
        }
        last = term.abs();
        // a_k / x^k with sign (-1)^{floor(k/2)}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn hankel_jy(n: u32, x: f64) -> (f64, f64) {
    let (p, q) = hankel_pq(n, x);
    let w = x - n as f64 * FRAC_PI_2 - FRAC_PI_4;
    let (s, c) = w.sin_cos();
    let a = (2.0 / (PI * x)).sqrt();
    (a * (p * c - q * s), a * (p * s + q * c))
}

/// `J_n(x)` for integer `n >= 0` and real `x >= 0`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    assert!(x >= 0.0);
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= 1.0 {
        j_series(n, x)
    } else if x >= hankel_threshold(n) {
        hankel_jy(n, x).0
    } else {
        j_miller(n as usize, x)[n as usize]
    }
}

/// `J_n(x)` by backward recurrence regardless of size, for seam checks.
pub fn bessel_j_recurrence(n: u32, x: f64) -> f64 {
    j_miller(n as usize, x)[n as usize]
}

/// `J_n(x)` by the Hankel expansion regardless of size, for seam checks.
pub fn bessel_j_hankel(n: u32, x: f64) -> f64 {
    hankel_jy(n, x).0
}

/// `Y_n(x)` for `x > 0`.
pub fn bessel_y(n: u32, x: f64) -> f64 {
    assert!(x > 0.0);
    if x >= hankel_threshold(n) {
        return hankel_jy(n, x).1;
    }
    let top = (x as usize + 40 + (50.0 * x).sqrt() as usize) | 1;
    let j = j_miller(top + 1, x);
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 <= top + 1 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = 2.0 / PI * (lg * j[0] - 2.0 * s0);
    if n == 0 {
        return y0;
    }
    let y1 = -2.0 / PI * (j[0] / x - lg * j[1] - s1);
    let (mut ym, mut y) = (y0, y1);
    for k in 1..n {
        let yn = 2.0 * k as f64 / x * y - ym;
        ym = y;
        y = yn;
    }
    y
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselSplit {
    pub j: f64,
    pub w_plus: Complex64,
    pub w_minus: Complex64,
}

impl BesselSplit {
    pub fn identity_residual(&self, x: f64) -> f64 {
        let e = Complex64::from_polar(1.0, x);
        (2.0 * self.j - e * self.w_plus - e.conj() * self.w_minus).norm()
    }
}

/// `J_n(x)` with `W+ = e^{-ix}(chi H1 + (1 - chi) J)` and `W- = conj(W+)`,
/// where `H1 = J + iY` and `chi` switches on smoothly past the turning point.
pub fn bessel_split(n: u32, x: f64) -> BesselSplit {
    let j = bessel_j(n, x);
    let start = n as f64 + 1.0;
    let chi = smooth_step((x - start) / start);
    let inner = if chi > 0.0 {
        Complex64::new(j, chi * bessel_y(n, x))
    } else {
        Complex64::new(j, 0.0)
    };
    let w_plus = Complex64::from_polar(1.0, -x) * inner;
    BesselSplit {
        j,
        w_plus,
        w_minus: w_plus.conj(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Abramowitz–Stegun tables
        let cases = [
            (0, 1.0, 0.765_197_686_557_966_6),
            (1, 1.0, 0.440_050_585_744_933_5),
            (0, 10.0, -0.245_935_764_451_348_3),
            (1, 10.0, 0.043_472_746_168_861_44),
            (5, 10.0, -0.234_061_528_186_793_7),
            (10, 10.0, 0.207_486_106_633_358_9),
            (0, 50.0, 0.055_812_327_669_251_86),
            (1, 50.0, -0.097_511_828_125_175_06),
        ];
        for (n, x, v) in cases {
            assert!((bessel_j(n, x) - v).abs() < 1e-13, "J_{n}({x})");
        }
        let ycases = [
            (0, 1.0, 0.088_256_964_215_676_96),
            (1, 1.0, -0.781_212_821_300_288_7),
            (0, 10.0, 0.055_671_167_283_599_39),
            (1, 10.0, 0.249_015_424_206_953_9),
            (0, 50.0, -0.098_064_995_470_076_92),
        ];
        for (n, x, v) in ycases {
            assert!((bessel_y(n, x) - v).abs() < 1e-12, "Y_{n}({x}) = {}", bessel_y(n, x));
        }
    }

    #[test]
    fn seam_agreement() {
        for n in 0..=10 {
            let x = hankel_threshold(n);
            let a = bessel_j_recurrence(n, x);
            let b = bessel_j_hankel(n, x);
            assert!((a - b).abs() <= 1e-9, "n={n}: {a} vs {b}");
            let s = j_series(n, 1.0);
            assert!((s - bessel_j_recurrence(n, 1.0)).abs() <= 1e-12 * s.abs().max(1e-300) + 1e-16);
        }
    }

    #[test]
    fn recurrence_and_wronskian() {
        for &x in &[0.5, 3.0, 17.0, 40.0, 120.0] {
            for n in 1..10 {
                let lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
                let rhs = 2.0 * n as f64 / x * bessel_j(n, x);
                assert!((lhs - rhs).abs() < 1e-12, "n={n} x={x}");
                let w = bessel_j(n + 1, x) * bessel_y(n, x) - bessel_j(n, x) * bessel_y(n + 1, x);
                assert!((w - 2.0 / (PI * x)).abs() < 1e-10 * (1.0 + bessel_y(n + 1, x).abs()), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn split_identity_and_envelope() {
        assert_eq!(bessel_j(1, 0.0), 0.0);
        assert_eq!(bessel_j(0, 0.0), 1.0);
        let mut worst = 0.0_f64;
        for n in 1..=10 {
            for i in 0..=2000 {
                let x = 0.1 * i as f64;
                let s = bessel_split(n, x);
                assert!(s.identity_residual(x) <= 1e-10, "n={n} x={x}");
                worst = worst.max(s.w_plus.norm() * (1.0 + x).sqrt());
            }
        }
        assert!(worst < 10.0, "envelope constant {worst}");
    }
}
