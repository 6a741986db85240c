//! Integer and modular arithmetic used by every character-sum evaluator.
//!
//! Moduli in this crate stay well below 2^32, so products are formed in
//! `i128`/`u128` only where a reduction could otherwise overflow.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least non-negative residue of `a` modulo `q`.
#[inline]
pub fn reduce(a: i64, q: u64) -> u64 {
    (a as i128).rem_euclid(q as i128) as u64
}

#[inline]
pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

/// Inverse of `a` modulo `q`, in `[0, q)`.
pub fn mod_inverse(a: i64, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::ZeroModulus);
    }
    let a_red = reduce(a, q);
    // extended Euclid on (a_red, q)
    let (mut old_r, mut r) = (a_red as i128, q as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quo = old_r / r;
        (old_r, r) = (r, old_r - quo * r);
        (old_s, s) = (s, old_s - quo * s);
    }
    let g = old_r as u64;
    if g != 1 {
        return Err(Error::NotInvertible { a, q, gcd: g });
    }
    Ok(old_s.rem_euclid(q as i128) as u64)
}

/// Jacobi symbol `(a/q)` for odd positive `q`.
///
/// Negative `a` is reduced modulo `q` first, which is the same as applying
/// `(-1/q) = (-1)^((q-1)/2)`.
pub fn jacobi_symbol(a: i64, q: u64) -> Result<i8> {
    if q == 0 {
        return Err(Error::ZeroModulus);
    }
    if q % 2 == 0 {
        return Err(Error::EvenModulus(q));
    }
    Ok(jacobi_odd(reduce(a, q), q))
}

/// Jacobi symbol for already-reduced `a` and odd `n`; no validation.
pub(crate) fn jacobi_odd(mut a: u64, mut n: u64) -> i8 {
    let mut sign = 1i8;
    a %= n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// A positive integer together with its prime factorisation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    pub value: u64,
    /// `(prime, exponent)` with strictly increasing primes and exponents >= 1.
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("cannot factor 0".into()));
        }
        Ok(Self {
            value: n,
            factors: factor(n),
        })
    }

    pub fn product(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn mobius(&self) -> i8 {
        if !self.is_squarefree() {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn totient(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Trial division with a 2,3,5 wheel.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    const STEPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d = 7u64;
    let mut i = 0;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += STEPS[i];
        i = (i + 1) % 8;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Möbius function and Euler totient of `n >= 1`.
pub fn arith_functions(n: u64) -> Result<(i8, u64)> {
    let f = FactoredInteger::new(n)?;
    Ok((f.mobius(), f.totient()))
}

pub fn mobius(n: u64) -> i8 {
    if n == 0 {
        return 0;
    }
    let f = FactoredInteger {
        value: n,
        factors: factor(n),
    };
    f.mobius()
}

pub fn totient(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    factor(n)
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor(n) == [(n, 1)]
}

/// Signed square-free kernel: the unique square-free `s` (same sign as `d`)
/// with `d = s * r^2`. Returns `(s, r)`; `d = 0` gives `(0, 0)`.
pub fn squarefree_decomposition(d: i64) -> (i64, u64) {
    if d == 0 {
        return (0, 0);
    }
    let mut s = 1i64;
    let mut r = 1u64;
    for (p, e) in factor(d.unsigned_abs()) {
        if e % 2 == 1 {
            s *= p as i64;
        }
        r *= p.pow(e / 2);
    }
    (d.signum() * s, r)
}

/// `q = q_star * q0^2` with `q_star` square-free, and `q0^2 = q1 * q2`
/// where every prime of `q1` divides `q_star` and `gcd(q2, q_star) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModulusDecomposition {
    pub q: u64,
    pub q_star: u64,
    pub q0: u64,
    pub q1: u64,
    pub q2: u64,
}

impl ModulusDecomposition {
    pub fn reassemble(&self) -> u64 {
        self.q_star * self.q0 * self.q0
    }
}

pub fn decompose_modulus(q: u64) -> Result<ModulusDecomposition> {
    if q == 0 {
        return Err(Error::ZeroModulus);
    }
    if q % 2 == 0 {
        return Err(Error::EvenModulus(q));
    }
    let factors = factor(q);
    let mut q_star = 1;
    let mut q0 = 1;
    for &(p, e) in &factors {
        if e % 2 == 1 {
            q_star *= p;
        }
        q0 *= p.pow(e / 2);
    }
    let mut q1 = 1;
    let mut q2 = 1;
    for &(p, e) in &factors {
        let part = p.pow(2 * (e / 2));
        if q_star % p == 0 {
            q1 *= part;
        } else {
            q2 *= part;
        }
    }
    Ok(ModulusDecomposition {
        q,
        q_star,
        q0,
        q1,
        q2,
    })
}

/// `1` if `c = 1 (mod 4)`, `i` if `c = 3 (mod 4)`.
pub fn epsilon_unit(c: u64) -> Result<Complex64> {
    match c % 4 {
        1 => Ok(Complex64::new(1.0, 0.0)),
        3 => Ok(Complex64::new(0.0, 1.0)),
        _ => Err(Error::EvenModulus(c)),
    }
}

/// Smallest-prime-factor table for fast factorisation of many small integers.
#[derive(Debug, Clone)]
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] as usize == n
    }

    /// Smallest prime factor of `n >= 2`.
    pub fn smallest_factor(&self, n: usize) -> usize {
        self.spf[n] as usize
    }

    pub fn factor(&self, mut n: usize) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..self.spf.len()).filter(|&n| self.is_prime(n)).map(|n| n as u64)
    }
}
