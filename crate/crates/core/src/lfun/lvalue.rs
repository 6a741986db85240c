//! Symmetric-square Dirichlet series, Euler product, gamma factor and
//! smoothed L-values.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::params::ParameterBox;
use super::table::CoefficientTable;
use crate::error::{Error, Result};
use crate::modmath::SpfSieve;
use crate::oscint::{Plateau, Smooth};

/// `b(n) = sum_{d^2 m = n, p !| d} lambda(m^2)` for `n <= length` (index 0 unused).
#[derive(Debug, Clone, PartialEq)]
pub struct SymSquareSeries {
    pub level: u64,
    pub weight: u32,
    pub label: String,
    pub b: Vec<f64>,
}

impl SymSquareSeries {
    pub fn length(&self) -> usize {
        self.b.len() - 1
    }

    /// A series with `b(1) = 1` and all other coefficients zero.
    pub fn unit(level: u64, weight: u32, length: usize) -> Self {
        let mut b = vec![0.0; length + 1];
        b[1] = 1.0;
        Self {
            level,
            weight,
            label: "unit".into(),
            b,
        }
    }
}

pub fn sym_square_coeffs(table: &CoefficientTable, length: usize) -> Result<SymSquareSeries> {
    let sq = table.square_values(length)?;
    let p = table.level as usize;
    let mut b = vec![0.0; length + 1];
    let mut d = 1usize;
    while d * d <= length {
        if d % p != 0 {
            let dd = d * d;
            for m in 1..=length / dd {
                b[dd * m] += sq[m];
            }
        }
        d += 1;
    }
    Ok(SymSquareSeries {
        level: table.level,
        weight: table.weight,
        label: table.label.clone(),
        b,
    })
}

fn cpow(base: f64, s: Complex64) -> Complex64 {
    (s * base.ln()).exp()
}

/// Local factor at a prime `q`: `(1 - lambda(q^2) X + lambda(q^2) X^2 - X^3)^{-1}`
/// with `X = q^{-s}` if `q != p`, and `(1 - p^{-1-s})^{-1}` at `q = p`.
pub fn local_factor(table: &CoefficientTable, q: usize, s: Complex64) -> Result<Complex64> {
    if q as u64 == table.level {
        return Ok((Complex64::new(1.0, 0.0) - cpow(q as f64, -(s + 1.0))).inv());
    }
    let l = table.prime_power(q, 2)?;
    let x = cpow(q as f64, -s);
    Ok((Complex64::new(1.0, 0.0) - l * x + l * x * x - x * x * x).inv())
}

/// Euler product over primes `<= prime_bound`.
pub fn euler_product(table: &CoefficientTable, s: Complex64, prime_bound: usize) -> Result<Complex64> {
    let sieve = SpfSieve::new(prime_bound);
    let mut acc = Complex64::new(1.0, 0.0);
    for q in sieve.primes() {
        acc *= local_factor(table, q as usize, s)?;
    }
    Ok(acc)
}

/// Partial Dirichlet sum `sum_{n <= x} b(n) n^{-s}` without smoothing.
pub fn dirichlet_partial_sum(series: &SymSquareSeries, s: Complex64, x: usize) -> Result<Complex64> {
    if x > series.length() {
        return Err(Error::InsufficientCoefficients {
            needed: x as u64,
            have: series.length() as u64,
        });
    }
    Ok((1..=x)
        .filter(|&n| series.b[n] != 0.0)
        .map(|n| series.b[n] * cpow(n as f64, -s))
        .sum())
}

/// Lanczos approximation (g = 7, n = 9) with reflection, valid off the poles.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Domain(format!("gamma pole at {}", z.re)));
    }
    if z.re < 0.5 {
        let s = (Complex64::new(PI, 0.0) * z).sin();
        return Ok(Complex64::new(PI, 0.0) / (s * gamma(Complex64::new(1.0, 0.0) - z)?));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(C[0], 0.0);
    for (i, &c) in C.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    Ok((2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x)
}

/// `L_inf(s) = pi^{-3s/2} Gamma((s+1)/2) Gamma((s+k-1)/2) Gamma((s+k)/2)`.
pub fn gamma_factor(s: Complex64, k: u32) -> Result<Complex64> {
    let k = k as f64;
    Ok(cpow(PI, -1.5 * s)
        * gamma((s + 1.0) / 2.0)?
        * gamma((s + k - 1.0) / 2.0)?
        * gamma((s + k) / 2.0)?)
}

/// A weight `V0` for smoothed Dirichlet sums `sum b(n) n^{-s} V0(n/X)`.
pub trait Cutoff: Send + Sync {
    fn value(&self, x: f64) -> f64;
    /// `V0(x)` is zero (to double precision) for `x > reach`.
    fn reach(&self) -> f64;
    fn describe(&self) -> String;
}

impl Cutoff for Plateau {
    fn value(&self, x: f64) -> f64 {
        Smooth::value(self, x)
    }
    fn reach(&self) -> f64 {
        self.d
    }
    fn describe(&self) -> String {
        format!("plateau(1 on [0,{}], 0 past {})", self.c, self.d)
    }
}

/// Compact plateau cut-off: 1 on `[0, 1]`, 0 beyond `end`.
pub fn cutoff_weight(end: f64) -> Plateau {
    Plateau::new(-1.0, 0.0, 1.0, end)
}

/// `V0(x) = erfc(a log x)/2`: 1 near 0, 0 at infinity, with Mellin transform
/// `exp(w^2/(4a^2))/w`, so the smoothed sum converges to `L(s)` very fast in `X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErfcCutoff {
    pub a: f64,
}

impl Cutoff for ErfcCutoff {
    fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        0.5 * libm::erfc(self.a * x.ln())
    }
    fn reach(&self) -> f64 {
        // erfc(6.0) < 2.2e-17
        (6.0 / self.a).exp()
    }
    fn describe(&self) -> String {
        format!("erfc(a log x)/2, a={}", self.a)
    }
}

/// `V` on `[1/2, 5/2]`, identically 1 on `[1, 2]`.
pub fn default_length_weight() -> Plateau {
    Plateau::new(0.5, 1.0, 2.0, 2.5)
}

/// `S(N) = sum_n lambda(n^2) n^{-it} V(n/N)`.
pub fn s_n(table: &CoefficientTable, params: &ParameterBox, v: &dyn Smooth) -> Result<Complex64> {
    let (lo, hi) = v.support();
    let n_lo = ((lo * params.big_n).ceil() as usize).max(1);
    let n_hi = (hi * params.big_n).floor() as usize;
    if n_hi < n_lo {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let squares = if n_hi * n_hi <= table.n_max() {
        (0..=n_hi).map(|n| if n == 0 { 0.0 } else { table.values()[n * n] }).collect()
    } else {
        table.square_values(n_hi)?
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for n in n_lo..=n_hi {
        let w = v.value(n as f64 / params.big_n);
        if w != 0.0 {
            acc += squares[n] * w * cpow(n as f64, Complex64::new(0.0, -params.t));
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LValue {
    pub value: (f64, f64),
    /// `|L_X(s) - L_{X/2}(s)|`, a heuristic accuracy estimate.
    pub tail_estimate: f64,
}

fn smoothed_sum(series: &SymSquareSeries, s: Complex64, smoothing: &dyn Cutoff, x: f64) -> Result<Complex64> {
    let top = (smoothing.reach() * x).ceil() as usize;
    if top > series.length() {
        return Err(Error::InsufficientCoefficients {
            needed: top as u64,
            have: series.length() as u64,
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=top {
        let b = series.b[n];
        if b == 0.0 {
            continue;
        }
        let w = smoothing.value(n as f64 / x);
        if w != 0.0 {
            acc += b * w * cpow(n as f64, -s);
        }
    }
    Ok(acc)
}

/// `sum_n b(n) n^{-s} V0(n/X)`.
pub fn l_value(series: &SymSquareSeries, s: Complex64, smoothing: &dyn Cutoff, x: f64) -> Result<LValue> {
    let v = smoothed_sum(series, s, smoothing, x)?;
    let half = smoothed_sum(series, s, smoothing, x / 2.0)?;
    Ok(LValue {
        value: (v.re, v.im),
        tail_estimate: (v - half).norm(),
    })
}

/// `Lambda(s) = p^{alpha s} L_inf(s) L(s)` at one cut-off.
pub fn completed_value(
    series: &SymSquareSeries,
    s: Complex64,
    alpha: f64,
    smoothing: &dyn Cutoff,
    x: f64,
) -> Result<(Complex64, LValue)> {
    let l = l_value(series, s, smoothing, x)?;
    let lv = Complex64::new(l.value.0, l.value.1);
    let c = cpow(series.level as f64, alpha * s) * gamma_factor(s, series.weight)? * lv;
    Ok((c, l))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FeResidual {
    pub s: (f64, f64),
    pub alpha: f64,
    pub residual: f64,
    /// `|Lambda(s)| + |Lambda(1-s)|`, for scale.
    pub magnitude: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FeProbe {
    pub residuals: Vec<FeResidual>,
    /// Exponent with the uniformly smaller residuals, if any.
    pub best_alpha: Option<f64>,
    /// Ratio of the other exponent's max residual to the best one's.
    pub margin: f64,
}

// At s = 1/2 both sides coincide, so the residual carries no information.
fn self_dual(s: (f64, f64)) -> bool {
    s.0 == 0.5 && s.1 == 0.0
}

/// Compares `Lambda(s)` with `Lambda(1-s)` for conductor exponents `alphas`;
/// points whose L-values move by more than `stability_tol` (relative) between
/// cut-offs `X/2` and `X` are flagged and left out of the verdict.
pub fn fe_probe(
    series: &SymSquareSeries,
    s_grid: &[Complex64],
    alphas: &[f64],
    smoothing: &dyn Cutoff,
    x: f64,
    stability_tol: f64,
) -> Result<FeProbe> {
    let mut residuals = Vec::new();
    for &alpha in alphas {
        for &s in s_grid {
            let s1 = Complex64::new(1.0, 0.0) - s;
            let (a, la) = completed_value(series, s, alpha, smoothing, x)?;
            let (b, lb) = completed_value(series, s1, alpha, smoothing, x)?;
            let rel = |l: &LValue| l.tail_estimate / Complex64::new(l.value.0, l.value.1).norm().max(1e-300);
            residuals.push(FeResidual {
                s: (s.re, s.im),
                alpha,
                residual: (a - b).norm(),
                magnitude: a.norm() + b.norm(),
                stable: rel(&la) <= stability_tol && rel(&lb) <= stability_tol,
            });
        }
    }
    let worst = |alpha: f64| {
        residuals
            .iter()
            .filter(|r| r.alpha == alpha && r.stable && !self_dual(r.s))
            .map(|r| r.residual / r.magnitude.max(1e-300))
            .fold(0.0_f64, f64::max)
    };
    let mut ranked: Vec<(f64, f64)> = alphas.iter().map(|&a| (a, worst(a))).collect();
    ranked.sort_by(|x, y| x.1.total_cmp(&y.1));
    let informative = residuals.iter().any(|r| r.stable && !self_dual(r.s));
    let (best_alpha, margin) = if ranked.len() >= 2 && informative {
        (Some(ranked[0].0), ranked[1].1 / ranked[0].1.max(1e-300))
    } else {
        (None, 0.0)
    };
    Ok(FeProbe {
        residuals,
        best_alpha,
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::super::curves::{normalized_coefficients, CURVE_11A1};
    use super::*;

    fn level11(n: usize) -> CoefficientTable {
        CoefficientTable::new(11, 2, "11.2.a.a", normalized_coefficients(&CURVE_11A1, n)).unwrap()
    }

    #[test]
    fn series_examples() {
        let s = sym_square_coeffs(&level11(100), 100).unwrap();
        assert_eq!(s.b[1], 1.0);
        assert!((s.b[2] - 1.0).abs() < 1e-14);
        assert!(s.b[4].abs() < 1e-14);
        // brute definition from the table itself
        let t = level11(100 * 100);
        for n in 1..=100usize {
            let mut b = 0.0;
            for d in 1..=n {
                if d * d > n || n % (d * d) != 0 || d % 11 == 0 {
                    continue;
                }
                let m = n / (d * d);
                b += t.lambda(m * m).unwrap();
            }
            assert!((b - s.b[n]).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn gamma_values() {
        let g = gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((g.re - PI.sqrt()).abs() < 1e-13);
        let g = gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((g.re - 24.0).abs() < 1e-11);
        // Gamma(1+i) = 0.49801566811835604 - 0.15494982830181069 i
        let g = gamma(Complex64::new(1.0, 1.0)).unwrap();
        assert!((g - Complex64::new(0.498_015_668_118_356, -0.154_949_828_301_810_7)).norm() < 1e-13);
        // reflection region: Gamma(-0.5) = -2 sqrt(pi)
        let g = gamma(Complex64::new(-0.5, 0.0)).unwrap();
        assert!((g.re + 2.0 * PI.sqrt()).abs() < 1e-12);
        assert!(gamma(Complex64::new(-2.0, 0.0)).is_err());
        let l = gamma_factor(Complex64::new(1.0, 0.0), 2).unwrap();
        assert!((l.re - 1.0 / (2.0 * PI)).abs() < 1e-14 && l.im.abs() < 1e-15);
        assert!(gamma_factor(Complex64::new(0.5, 0.0), 2).unwrap().re > 0.0);
    }

    #[test]
    fn euler_matches_dirichlet_at_three() {
        let t = level11(5000);
        let s = sym_square_coeffs(&t, 5000).unwrap();
        let z = Complex64::new(3.0, 0.0);
        let e = euler_product(&t, z, 5000).unwrap();
        let v = l_value(&s, z, &cutoff_weight(2.0), 2500.0).unwrap();
        let d = Complex64::new(v.value.0, v.value.1);
        assert!((e - d).norm() < 1e-8, "{e} vs {d}");
        let z = Complex64::new(3.0, 2.0);
        let e = euler_product(&t, z, 5000).unwrap();
        let v = l_value(&s, z, &cutoff_weight(2.0), 2500.0).unwrap();
        assert!((e - Complex64::new(v.value.0, v.value.1)).norm() < 1e-8);
    }

    #[test]
    fn level_factor() {
        let t = level11(50);
        let z = Complex64::new(0.7, 1.0);
        let f = local_factor(&t, 11, z).unwrap();
        let expect = (Complex64::new(1.0, 0.0) - cpow(11.0, -(z + 1.0))).inv();
        assert!((f - expect).norm() < 1e-15);
        // local factor equals the prime-power generating series
        let z = Complex64::new(2.0, 0.0);
        let f = local_factor(&t, 3, z).unwrap();
        let s = sym_square_coeffs(&level11(3usize.pow(8)), 3usize.pow(8)).unwrap();
        let g: Complex64 = (0..=8).map(|j| s.b[3usize.pow(j)] * cpow(3.0, -z * j as f64)).sum();
        assert!((f - g).norm() < 1e-6);
    }

    #[test]
    fn unit_series_gives_one() {
        let s = SymSquareSeries::unit(11, 2, 100);
        let v = l_value(&s, Complex64::new(0.5, 3.0), &cutoff_weight(2.0), 40.0).unwrap();
        assert_eq!(v.value, (1.0, 0.0));
    }

    #[test]
    fn s_n_examples() {
        let t = level11(100);
        let b = ParameterBox::new(1.0, 0.0, 11, 1.0).unwrap();
        let v = s_n(&t, &b, &default_length_weight()).unwrap();
        assert!((v.re - 2.0).abs() < 1e-12 && v.im == 0.0);
        let zero = CoefficientTable::zero(11, 2, 100).unwrap();
        assert_eq!(s_n(&zero, &b, &default_length_weight()).unwrap().re, 0.0);
        let one = CoefficientTable::trivial(11, 2, 100).unwrap();
        let b3 = ParameterBox::new(0.8, 0.0, 11, 1.0).unwrap();
        let v = s_n(&one, &b3, &default_length_weight()).unwrap();
        assert_eq!(v.re, Smooth::value(&default_length_weight(), 1.0 / 0.8));
        let b = ParameterBox::new(30.0, 7.0, 11, 1.0).unwrap();
        let v = s_n(&t, &b, &default_length_weight()).unwrap();
        let sq = t.square_values(75).unwrap();
        let bound: f64 = sq[1..].iter().map(|x| x.abs()).sum();
        assert!(v.norm() <= bound);
        assert!(s_n(&t, &ParameterBox::new(50.0, 0.0, 11, 1.0).unwrap(), &default_length_weight()).is_err());
    }

    #[test]
    fn erfc_cutoff_converges_at_centre() {
        let s = sym_square_coeffs(&level11(32000), 32000).unwrap();
        let c = ErfcCutoff { a: 2.0 };
        let half = Complex64::new(0.5, 0.0);
        let a = l_value(&s, half, &c, 750.0).unwrap();
        let b = l_value(&s, half, &c, 1500.0).unwrap();
        assert!((a.value.0 - b.value.0).abs() < 2e-3);
        assert!(b.tail_estimate < 2e-4, "{}", b.tail_estimate);
    }

    #[test]
    fn fe_probe_prefers_square_conductor() {
        let s = sym_square_coeffs(&level11(60000), 60000).unwrap();
        let grid: Vec<Complex64> = [(0.5, 0.0), (0.6, 0.0), (0.7, 0.0), (0.6, 1.0)]
            .iter()
            .map(|&(r, i)| Complex64::new(r, i))
            .collect();
        for (a, x) in [(1.5, 1000.0), (2.0, 2500.0)] {
            let p = fe_probe(&s, &grid, &[0.5, 1.0], &ErfcCutoff { a }, x, 1e-3).unwrap();
            assert!(p.residuals.iter().all(|r| r.stable), "a={a}");
            assert_eq!(p.best_alpha, Some(1.0));
            assert!(p.margin > 50.0, "a={a} margin {}", p.margin);
            for r in p.residuals.iter().filter(|r| r.s == (0.5, 0.0)) {
                assert_eq!(r.residual, 0.0);
            }
        }
    }
}
