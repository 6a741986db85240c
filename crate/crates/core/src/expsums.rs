//! Complete exponential sums: quadratic Gauss sums, Ramanujan sums, and the
//! character sums `C(m, n, q)` / `C1(l, q)` that come out of the Poisson and
//! Voronoi steps.
//!
//! Each sum has a definition-level evaluator (`*_bruteforce`) and a closed
//! form. The two paths share nothing beyond `e_frac`, which is the one place
//! a rational phase is turned into a point on the unit circle.

use std::f64::consts::{SQRT_2, TAU};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::modmath::{
    decompose_modulus, epsilon_unit, gcd, jacobi_odd, mod_inverse, mobius, reduce, FactoredInteger,
};

/// `e(num / den) = exp(2 pi i num / den)`, with `num` reduced modulo `den`
/// before the angle is formed.
#[inline]
pub fn e_frac(num: i64, den: u64) -> Complex64 {
    let r = reduce(num, den);
    let theta = TAU * (r as f64 / den as f64);
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

#[inline]
fn e_frac_i128(num: i128, den: u64) -> Complex64 {
    let r = num.rem_euclid(den as i128) as i64;
    e_frac(r, den)
}

/// Table of `e(k/q)` for `0 <= k < q`.
#[derive(Debug, Clone)]
pub struct RootTable {
    q: u64,
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(q: u64) -> Self {
        Self {
            q,
            roots: (0..q).map(|k| e_frac(k as i64, q)).collect(),
        }
    }

    #[inline]
    pub fn at(&self, k: u64) -> Complex64 {
        self.roots[(k % self.q) as usize]
    }
}

/// Parameters of `G(a, b; c) = sum_{x mod c} e((a x^2 + b x) / c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussSumSpec {
    pub a: i64,
    pub b: i64,
    pub c: u64,
}

impl GaussSumSpec {
    pub fn new(a: i64, b: i64, c: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::ZeroModulus);
        }
        if gcd(reduce(a, c), c) != 1 {
            return Err(Error::NotCoprime { a, c });
        }
        Ok(Self { a, b, c })
    }
}

pub fn gauss_sum_bruteforce(spec: GaussSumSpec) -> Result<Complex64> {
    let GaussSumSpec { a, b, c } = GaussSumSpec::new(spec.a, spec.b, spec.c)?;
    let roots = RootTable::new(c);
    let (a, b) = (reduce(a, c) as u128, reduce(b, c) as u128);
    let c128 = c as u128;
    Ok((0..c as u128)
        .map(|x| roots.at(((a * x * x + b * x) % c128) as u64))
        .sum())
}

/// All `G(a, b; c)` for `b = 0..c` at once. The sequence `e(a x^2 / c)` is
/// summed against `e(b x / c)` by an unnormalised inverse DFT, which is the
/// definition evaluated for every `b` simultaneously.
pub struct GaussRowBuilder {
    planner: FftPlanner<f64>,
}

impl Default for GaussRowBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl GaussRowBuilder {
    pub fn new() -> Self {
        Self {
            planner: FftPlanner::new(),
        }
    }

    pub fn row(&mut self, a: i64, c: u64) -> Result<Vec<Complex64>> {
        GaussSumSpec::new(a, 0, c)?;
        let a = reduce(a, c) as u128;
        let c128 = c as u128;
        let roots = RootTable::new(c);
        let mut buf: Vec<Complex64> = (0..c128)
            .map(|x| roots.at(((a * x * x) % c128) as u64))
            .collect();
        let fft: std::sync::Arc<dyn Fft<f64>> = self.planner.plan_fft_inverse(c as usize);
        fft.process(&mut buf);
        Ok(buf)
    }
}

/// `G(a, 0; c)` from the odd-modulus and power-of-two evaluations.
fn gauss_zero_closed(a: i64, c: u64) -> Complex64 {
    if c == 1 {
        return Complex64::new(1.0, 0.0);
    }
    let k = c.trailing_zeros();
    let c0 = c >> k;
    let sqrt_c = (c as f64).sqrt();
    let eps = epsilon_unit(c0).expect("odd part");
    let chi = jacobi_odd(reduce(a, c0), c0) as f64;
    match k {
        0 => eps * sqrt_c * chi,
        // 2 || c and b = 0: a*r + b is odd
        1 => Complex64::new(0.0, 0.0),
        _ => {
            let two_part = if k % 2 == 0 {
                Complex64::new(1.0, 0.0) + e_frac_i128(a as i128 * c0 as i128, 4)
            } else {
                // (2/c0)^k; only odd k leaves a sign
                let two_c0 = jacobi_odd(2 % c0, c0) as f64;
                e_frac_i128(a as i128 * c0 as i128, 8) * (SQRT_2 * two_c0)
            };
            eps * sqrt_c * chi * two_part
        }
    }
}

/// Closed-form `G(a, b; c)` by the odd / `2 || c` / `4 | c` case split.
pub fn gauss_sum_closed(spec: GaussSumSpec) -> Result<Complex64> {
    let GaussSumSpec { a, b, c } = GaussSumSpec::new(spec.a, spec.b, spec.c)?;
    let k = c.trailing_zeros();
    let b2 = b as i128 * b as i128;
    Ok(match k {
        0 => {
            let inv4a = mod_inverse(reduce(4 * reduce(a, c) as i64, c) as i64, c)?;
            e_frac_i128(-(inv4a as i128) * b2, c) * gauss_zero_closed(a, c)
        }
        1 => {
            let r = c / 2;
            if (reduce(a, 2) * r + reduce(b, 2)) % 2 == 1 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let inv8a = mod_inverse(8 * reduce(a, r) as i64, r)?;
            e_frac_i128(-(inv8a as i128) * b2, r) * 2.0 * gauss_zero_closed(2 * a, r)
        }
        _ => {
            if b.rem_euclid(2) == 1 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let inv_a = mod_inverse(a, c)?;
            let half = (b / 2) as i128;
            e_frac_i128(-(inv_a as i128) * half * half, c) * gauss_zero_closed(a, c)
        }
    })
}

/// `a^{-1} mod 2r` assembled as `2 * (2a)^{-1} + r`, the inverse taken mod `r`.
pub fn inverse_via_half_modulus(a: i64, r: u64) -> Result<u64> {
    if r % 2 == 0 {
        return Err(Error::EvenModulus(r));
    }
    let m = 2 * r;
    if gcd(reduce(a, m), m) != 1 {
        return Err(Error::NotCoprime { a, c: m });
    }
    let inv = mod_inverse(2 * reduce(a, r) as i64, r)?;
    Ok((2 * inv + r) % m)
}

/// `S(r, 0; q) = sum_{d | (r, q)} d mu(q/d)`.
pub fn ramanujan_sum(r: i64, q: u64) -> Result<i64> {
    if q == 0 {
        return Err(Error::ZeroModulus);
    }
    let g = gcd(r.unsigned_abs(), q);
    Ok(FactoredInteger::new(g)?
        .divisors()
        .into_iter()
        .map(|d| d as i64 * mobius(q / d) as i64)
        .sum())
}

/// `sum_{b mod q, (b, q) = 1} e(b r / q)`.
pub fn ramanujan_sum_bruteforce(r: i64, q: u64) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::ZeroModulus);
    }
    let r = reduce(r, q);
    let roots = RootTable::new(q);
    Ok((0..q)
        .filter(|&b| gcd(b, q) == 1)
        .map(|b| roots.at((b as u128 * r as u128 % q as u128) as u64))
        .sum())
}

/// `C1(l, q) = sum_{a mod q} (a/q) e(a l / q)`, `q` odd, from the definition.
pub fn charsum_c1_bruteforce(l: i64, q: u64) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::ZeroModulus);
    }
    if q % 2 == 0 {
        return Err(Error::EvenModulus(q));
    }
    let roots = RootTable::new(q);
    let l = reduce(l, q);
    Ok((0..q)
        .map(|a| {
            let chi = jacobi_odd(a, q);
            if chi == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                roots.at((a as u128 * l as u128 % q as u128) as u64) * chi as f64
            }
        })
        .sum())
}

/// Closed form of `C1(l, q)`: with `q = q_star q1 q2`, the sum is
/// `S(l, 0; q2) q1 eps_{q_star} sqrt(q_star) ((l/q1)/q_star)` when `q1 | l`
/// and zero otherwise.
pub fn charsum_c1_closed(l: i64, q: u64) -> Result<Complex64> {
    let d = decompose_modulus(q)?;
    if l.rem_euclid(d.q1 as i64) != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ram = ramanujan_sum(l, d.q2)? as f64;
    let chi = jacobi_odd(reduce(l / d.q1 as i64, d.q_star), d.q_star) as f64;
    let eps = epsilon_unit(d.q_star)?;
    Ok(eps * (ram * d.q1 as f64 * (d.q_star as f64).sqrt() * chi))
}

/// Parameters of `C(m, n, q) = q^{-1} sum*_{a mod q} G(a, n; q) e(conj(a p) m / q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharSumSpec {
    pub m: i64,
    pub n: i64,
    pub q: u64,
    pub p: u64,
}

impl CharSumSpec {
    pub fn new(m: i64, n: i64, q: u64, p: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroModulus);
        }
        if gcd(p, q) != 1 {
            return Err(Error::LevelDividesModulus { p, q });
        }
        Ok(Self { m, n, q, p })
    }
}

/// Definition-level `C(m, n, q)`.
pub fn charsum_c_bruteforce(spec: CharSumSpec) -> Result<Complex64> {
    let CharSumSpec { m, n, q, p } = CharSumSpec::new(spec.m, spec.n, spec.q, spec.p)?;
    let mut total = Complex64::new(0.0, 0.0);
    for a in (0..q).filter(|&a| gcd(a, q) == 1) {
        let g = gauss_sum_bruteforce(GaussSumSpec::new(a as i64, n, q)?)?;
        let inv = mod_inverse((a as u128 * p as u128 % q as u128) as i64, q)?;
        total += g * e_frac_i128(inv as i128 * m as i128, q);
    }
    Ok(total / q as f64)
}

/// Brute-force `C(m, n, q)` for one modulus across many `(m, n, p)`: the
/// Gauss sums `G(a, n; q)` for all units `a` and all `n` are tabulated once.
pub struct CharSumOracle {
    q: u64,
    units: Vec<u64>,
    /// `gauss[i][b]` is `G(units[i], b; q)`.
    gauss: Vec<Vec<Complex64>>,
    roots: RootTable,
}

impl CharSumOracle {
    pub fn new(q: u64, builder: &mut GaussRowBuilder) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroModulus);
        }
        let units: Vec<u64> = (0..q).filter(|&a| gcd(a, q) == 1).collect();
        let gauss = units
            .iter()
            .map(|&a| builder.row(a as i64, q))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            q,
            units,
            gauss,
            roots: RootTable::new(q),
        })
    }

    pub fn eval(&self, m: i64, n: i64, p: u64) -> Result<Complex64> {
        let q = self.q;
        if gcd(p, q) != 1 {
            return Err(Error::LevelDividesModulus { p, q });
        }
        let nb = reduce(n, q) as usize;
        let mr = reduce(m, q) as u128;
        let mut total = Complex64::new(0.0, 0.0);
        for (i, &a) in self.units.iter().enumerate() {
            let inv = mod_inverse((a as u128 * p as u128 % q as u128) as i64, q)? as u128;
            total += self.gauss[i][nb] * self.roots.at((inv * mr % q as u128) as u64);
        }
        Ok(total / q as f64)
    }
}

/// Which branch of the parity analysis a modulus falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ParityCase {
    Odd,
    TwiceOdd,
    /// `q = 2^k q0` with `k >= 2`.
    DivisibleBy4 { k: u32 },
}

pub fn parity_case(q: u64) -> ParityCase {
    match q.trailing_zeros() {
        0 => ParityCase::Odd,
        1 => ParityCase::TwiceOdd,
        k => ParityCase::DivisibleBy4 { k },
    }
}

/// Closed-form `C(m, n, q)`.
///
/// With `track_units` the result equals the definition exactly. Without it the
/// `eps` factor attached to the odd part of `q` is left out, reproducing the
/// reduced form in which that unimodular constant is dropped.
///
/// * `q` odd: `eps_q (p/q) C1(4m - p n^2, q) / sqrt(q)`.
/// * `q = 2 q0`: zero for even `n`, else `eps_{q0} e(m/2) (p/q0) C1(4m - p n^2, q0) / sqrt(q0)`.
/// * `q = 2^k q0`, `k >= 2`: zero for odd `n`; else with `l = m - p (n/2)^2`,
///   `eps_{q0} (p/q0) C1(l, q0) T_k(l) / sqrt(q)` where
///   `T_k = S(l, 0; 2^k) + S(l + p 2^{k-2}, 0; 2^k)` for even `k` and
///   `T_k = sqrt(2) S(l + p 2^{k-3}, 0; 2^k)` for odd `k`.
pub fn charsum_c_closed(spec: CharSumSpec, track_units: bool) -> Result<Complex64> {
    let CharSumSpec { m, n, q, p } = CharSumSpec::new(spec.m, spec.n, spec.q, spec.p)?;
    let unit = |c: u64| -> Result<Complex64> {
        if track_units {
            epsilon_unit(c)
        } else {
            Ok(Complex64::new(1.0, 0.0))
        }
    };
    let zero = Complex64::new(0.0, 0.0);
    match parity_case(q) {
        ParityCase::Odd => {
            if q == 1 {
                return Ok(Complex64::new(1.0, 0.0));
            }
            let l = 4 * m - p as i64 * n * n;
            let chi_p = jacobi_odd(p % q, q) as f64;
            Ok(unit(q)? * charsum_c1_closed(l, q)? * (chi_p / (q as f64).sqrt()))
        }
        ParityCase::TwiceOdd => {
            if n.rem_euclid(2) == 0 {
                return Ok(zero);
            }
            let q0 = q / 2;
            let l = 4 * m - p as i64 * n * n;
            let chi_p = jacobi_odd(p % q0, q0) as f64;
            Ok(unit(q0)?
                * e_frac(m, 2)
                * charsum_c1_closed(l, q0)?
                * (chi_p / (q0 as f64).sqrt()))
        }
        ParityCase::DivisibleBy4 { k } => {
            if n.rem_euclid(2) == 1 {
                return Ok(zero);
            }
            let q0 = q >> k;
            let two_k = 1u64 << k;
            let half = n / 2;
            let l = m - p as i64 * half * half;
            let chi_p = jacobi_odd(p % q0, q0) as f64;
            let t_k = if k % 2 == 0 {
                let shift = p as i64 * (1i64 << (k - 2));
                (ramanujan_sum(l, two_k)? + ramanujan_sum(l + shift, two_k)?) as f64
            } else {
                let shift = p as i64 * (1i64 << (k - 3));
                SQRT_2 * ramanujan_sum(l + shift, two_k)? as f64
            };
            Ok(unit(q0)? * charsum_c1_closed(l, q0)? * (chi_p * t_k / (q as f64).sqrt()))
        }
    }
}

/// The reduced expressions exactly as they are usually displayed, including
/// their normalisations: `(p/q) C1 / sqrt(q)` for odd `q`,
/// `2 (p/q0) e(p m / 2) C1 / sqrt(q0)` for `2 || q`, and for `4 | q` the
/// product `sqrt(q) eps_{q0} (p/q0) C1(l 2^{-k}, q0)` times
/// `S(l, 0; 2^k) + S(p + l, 0; 4) 2^{k-2} [2^{k-2} | l]` (even `k`) or
/// `S(p + l, 0; 8) 2^{k-3} [2^{k-3} | l]` (odd `k`).
///
/// Reported next to the exact value so the dropped constants are visible.
pub fn charsum_c_displayed(spec: CharSumSpec) -> Result<Complex64> {
    let CharSumSpec { m, n, q, p } = CharSumSpec::new(spec.m, spec.n, spec.q, spec.p)?;
    match parity_case(q) {
        ParityCase::Odd => charsum_c_closed(spec, false),
        ParityCase::TwiceOdd => {
            let q0 = q / 2;
            let l = 4 * m - p as i64 * n * n;
            let chi_p = jacobi_odd(p % q0, q0) as f64;
            Ok(e_frac_i128(p as i128 * m as i128, 2)
                * charsum_c1_closed(l, q0)?
                * (2.0 * chi_p / (q0 as f64).sqrt()))
        }
        ParityCase::DivisibleBy4 { k } => {
            let q0 = q >> k;
            let two_k = 1u64 << k;
            let half = n.div_euclid(2);
            let l = m - p as i64 * half * half;
            let chi_p = jacobi_odd(p % q0, q0) as f64;
            let inv_2k = mod_inverse(two_k as i64, q0)? as i64;
            let c1 = charsum_c1_closed(
                (reduce(inv_2k, q0) as i128 * l as i128).rem_euclid(q0 as i128) as i64,
                q0,
            )?;
            let bracket = if k % 2 == 0 {
                let step = 1i64 << (k - 2);
                let extra = if l.rem_euclid(step) == 0 {
                    ramanujan_sum(p as i64 + l, 4)? * step
                } else {
                    0
                };
                (ramanujan_sum(l, two_k)? + extra) as f64
            } else {
                let step = 1i64 << (k - 3);
                if l.rem_euclid(step) == 0 {
                    (ramanujan_sum(p as i64 + l, 8)? * step) as f64
                } else {
                    0.0
                }
            };
            Ok(epsilon_unit(q0)? * c1 * ((q as f64).sqrt() * chi_p * bracket))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bruteforce_examples() {
        let g = |a, b, m| gauss_sum_bruteforce(GaussSumSpec::new(a, b, m).unwrap()).unwrap();
        assert!(close(g(1, 0, 1), c(1.0, 0.0), 1e-12));
        assert!(close(g(1, 1, 2), c(2.0, 0.0), 1e-12));
        assert!(close(g(1, 0, 4), c(2.0, 2.0), 1e-12));
        assert!(GaussSumSpec::new(2, 0, 4).is_err());
    }

    #[test]
    fn closed_examples() {
        let g = |a, b, m| gauss_sum_closed(GaussSumSpec::new(a, b, m).unwrap()).unwrap();
        assert!(close(g(1, 0, 5), c(5f64.sqrt(), 0.0), 1e-12));
        assert!(close(g(2, 0, 3), c(0.0, -(3f64.sqrt())), 1e-12));
        assert!(close(g(1, 0, 4), c(2.0, 2.0), 1e-12));
    }

    #[test]
    fn closed_matches_bruteforce_small_grid() {
        for m in 1..=96u64 {
            for a in (0..m).filter(|&a| gcd(a, m) == 1) {
                for b in -3..(m as i64 + 3) {
                    let spec = GaussSumSpec::new(a as i64, b, m).unwrap();
                    let bf = gauss_sum_bruteforce(spec).unwrap();
                    let cf = gauss_sum_closed(spec).unwrap();
                    assert!(close(bf, cf, 1e-9 * (m as f64).sqrt()), "{spec:?}: {bf} vs {cf}");
                }
            }
        }
    }

    #[test]
    fn fft_row_matches_direct_sum() {
        let mut builder = GaussRowBuilder::new();
        for m in [1u64, 2, 7, 12, 64, 105] {
            for a in (0..m).filter(|&a| gcd(a, m) == 1).take(5) {
                let row = builder.row(a as i64, m).unwrap();
                for b in 0..m {
                    let direct =
                        gauss_sum_bruteforce(GaussSumSpec::new(a as i64, b as i64, m).unwrap())
                            .unwrap();
                    assert!(close(row[b as usize], direct, 1e-10));
                }
            }
        }
    }

    #[test]
    fn even_modulus_vanishing() {
        for r in 1..=60u64 {
            let m = 2 * r;
            for a in (0..m).filter(|&a| gcd(a, m) == 1) {
                for b in 0..m as i64 {
                    if (a as i64 * r as i64 + b) % 2 == 1 {
                        let g = gauss_sum_bruteforce(GaussSumSpec::new(a as i64, b, m).unwrap());
                        assert!(g.unwrap().norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_identity_for_twice_odd() {
        for r in (1..200u64).step_by(2) {
            for a in (0..2 * r).filter(|&a| gcd(a, 2 * r) == 1) {
                assert_eq!(
                    inverse_via_half_modulus(a as i64, r).unwrap(),
                    mod_inverse(a as i64, 2 * r).unwrap()
                );
            }
        }
        assert!(inverse_via_half_modulus(3, 4).is_err());
    }

    #[test]
    fn ramanujan_examples() {
        assert_eq!(ramanujan_sum(1, 6).unwrap(), 1);
        assert_eq!(ramanujan_sum(0, 9).unwrap(), 6);
        assert_eq!(ramanujan_sum(3, 9).unwrap(), -3);
        assert_eq!(ramanujan_sum(-3, 9).unwrap(), -3);
    }

    #[test]
    fn ramanujan_divisor_formula_matches_units() {
        for q in 1..=400u64 {
            for r in -(q as i64)..=(q as i64) {
                let bf = ramanujan_sum_bruteforce(r, q).unwrap();
                let cf = ramanujan_sum(r, q).unwrap() as f64;
                assert!(close(bf, c(cf, 0.0), 1e-9), "r={r} q={q}");
            }
        }
    }

    #[test]
    fn c1_examples() {
        assert!(close(charsum_c1_closed(1, 9).unwrap(), c(0.0, 0.0), 1e-12));
        assert!(close(charsum_c1_bruteforce(1, 9).unwrap(), c(0.0, 0.0), 1e-12));
        let v = c(0.0, -(3f64.sqrt()));
        assert!(close(charsum_c1_closed(2, 3).unwrap(), v, 1e-12));
        assert!(close(charsum_c1_bruteforce(2, 3).unwrap(), v, 1e-12));
        assert!(close(charsum_c1_closed(3, 9).unwrap(), c(-3.0, 0.0), 1e-12));
        assert!(close(charsum_c1_bruteforce(3, 9).unwrap(), c(-3.0, 0.0), 1e-12));
        assert!(charsum_c1_closed(1, 4).is_err());
    }

    #[test]
    fn c1_closed_matches_bruteforce_small() {
        for q in (1..=199u64).step_by(2) {
            for l in -(q as i64)..(q as i64) {
                let bf = charsum_c1_bruteforce(l, q).unwrap();
                let cf = charsum_c1_closed(l, q).unwrap();
                assert!(close(bf, cf, 1e-8 * (q as f64).sqrt()), "l={l} q={q}");
            }
        }
    }

    #[test]
    fn charsum_examples() {
        let s = |m, n, q, p| CharSumSpec::new(m, n, q, p).unwrap();
        assert!(close(charsum_c_bruteforce(s(1, 0, 1, 7)).unwrap(), c(1.0, 0.0), 1e-12));
        assert!(close(charsum_c_bruteforce(s(1, 0, 3, 7)).unwrap(), c(-1.0, 0.0), 1e-12));
        assert!(close(charsum_c_closed(s(1, 0, 3, 7), true).unwrap(), c(-1.0, 0.0), 1e-12));
        assert!(close(charsum_c_closed(s(1, 0, 1, 7), true).unwrap(), c(1.0, 0.0), 1e-12));
        // dropping eps_3 leaves i instead of -1
        assert!(close(charsum_c_closed(s(1, 0, 3, 7), false).unwrap(), c(0.0, 1.0), 1e-12));
        let bf = charsum_c_bruteforce(s(1, 1, 3, 7)).unwrap();
        assert!(close(bf, charsum_c_closed(s(1, 1, 3, 7), true).unwrap(), 1e-12));
        let bf = charsum_c_bruteforce(s(2, 0, 15, 7)).unwrap();
        assert!(close(bf, charsum_c_closed(s(2, 0, 15, 7), true).unwrap(), 1e-9));
        assert!(matches!(
            CharSumSpec::new(1, 0, 14, 7),
            Err(Error::LevelDividesModulus { .. })
        ));
    }

    #[test]
    fn charsum_closed_matches_oracle_all_parities() {
        let mut builder = GaussRowBuilder::new();
        for q in 1..=64u64 {
            if q % 7 == 0 {
                continue;
            }
            let oracle = CharSumOracle::new(q, &mut builder).unwrap();
            for m in 1..=12 {
                for n in -6..=6 {
                    let spec = CharSumSpec::new(m, n, q, 7).unwrap();
                    let bf = oracle.eval(m, n, 7).unwrap();
                    let cf = charsum_c_closed(spec, true).unwrap();
                    assert!(close(bf, cf, 1e-8 * (q as f64).sqrt()), "{spec:?}: {bf} vs {cf}");
                }
            }
        }
    }

    #[test]
    fn oracle_agrees_with_direct_definition() {
        let mut builder = GaussRowBuilder::new();
        for q in [1u64, 2, 3, 8, 12, 15] {
            let oracle = CharSumOracle::new(q, &mut builder).unwrap();
            for (m, n) in [(1, 0), (3, -2), (5, 3)] {
                let spec = CharSumSpec::new(m, n, q, 11).unwrap();
                assert!(close(
                    oracle.eval(m, n, 11).unwrap(),
                    charsum_c_bruteforce(spec).unwrap(),
                    1e-10
                ));
            }
        }
    }
}
