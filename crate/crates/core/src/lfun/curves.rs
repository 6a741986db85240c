//! Hecke eigenvalues of weight-2 newforms attached to elliptic curves over Q,
//! obtained by counting points modulo primes.

use crate::modmath::SpfSieve;

/// Weierstrass model `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Curve {
    pub label: &'static str,
    pub conductor: u64,
    pub a: [i64; 5],
}

pub const CURVE_11A1: Curve = Curve {
    label: "11.2.a.a",
    conductor: 11,
    a: [0, -1, 1, -10, -20],
};
pub const CURVE_17A1: Curve = Curve {
    label: "17.2.a.a",
    conductor: 17,
    a: [1, -1, 1, -1, -14],
};
pub const CURVE_19A1: Curve = Curve {
    label: "19.2.a.a",
    conductor: 19,
    a: [0, 1, 1, -9, -15],
};

pub fn curve_for_level(level: u64) -> Option<Curve> {
    [CURVE_11A1, CURVE_17A1, CURVE_19A1]
        .into_iter()
        .find(|c| c.conductor == level)
}

fn rem(x: i64, p: i64) -> i64 {
    x.rem_euclid(p)
}

/// `a_p = p + 1 - #E(F_p)` (for bad primes, the count of the singular model).
pub fn trace_of_frobenius(c: &Curve, p: u64) -> i64 {
    let [a1, a2, a3, a4, a6] = c.a;
    let pi = p as i64;
    if p == 2 {
        let mut affine = 0;
        for x in 0..2i64 {
            for y in 0..2i64 {
                let lhs = y * y + a1 * x * y + a3 * y;
                let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                if rem(lhs - rhs, 2) == 0 {
                    affine += 1;
                }
            }
        }
        return 2 + 1 - (affine + 1);
    }
    // y solutions per x: 1 + (D/p), D = (a1 x + a3)^2 + 4(x^3 + a2 x^2 + a4 x + a6)
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for y in 1..pi {
        chi[((y * y) % pi) as usize] = 1;
    }
    let (b1, b3) = (rem(a1, pi), rem(a3, pi));
    let (b2, b4, b6) = (rem(a2, pi), rem(a4, pi), rem(a6, pi));
    let mut s = 0i64;
    for x in 0..pi {
        let l = (b1 * x + b3) % pi;
        let cubic = (((x + b2) * x % pi + b4) * x % pi + b6) % pi;
        let d = (l * l + 4 * cubic) % pi;
        s += chi[d as usize] as i64;
    }
    -s
}

/// Integer coefficients `a(n)` for `1 <= n <= n_max` (index 0 unused).
pub fn integer_coefficients(c: &Curve, n_max: usize) -> Vec<i64> {
    let sieve = SpfSieve::new(n_max);
    let mut a = vec![0i64; n_max + 1];
    if n_max == 0 {
        return a;
    }
    a[1] = 1;
    for p in sieve.primes() {
        let p = p as usize;
        let ap = trace_of_frobenius(c, p as u64);
        let bad = c.conductor % p as u64 == 0;
        // prime powers
        let mut prev = 1i64;
        let mut cur = ap;
        let mut pk = p;
        loop {
            a[pk] = cur;
            if pk > n_max / p {
                break;
            }
            let next = if bad { ap * cur } else { ap * cur - p as i64 * prev };
            prev = cur;
            cur = next;
            pk *= p;
        }
    }
    // multiplicative extension: n = p^e m with p the smallest prime factor
    for n in 2..=n_max {
        let p = sieve.smallest_factor(n);
        let mut m = n;
        let mut pe = 1;
        while m % p == 0 {
            m /= p;
            pe *= p;
        }
        if m > 1 {
            a[n] = a[pe] * a[m];
        }
    }
    a
}

/// Deligne-normalized `lambda(n) = a(n)/sqrt(n)`.
pub fn normalized_coefficients(c: &Curve, n_max: usize) -> Vec<f64> {
    integer_coefficients(c, n_max)
        .iter()
        .enumerate()
        .map(|(n, &a)| if n == 0 { 0.0 } else { a as f64 / (n as f64).sqrt() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_traces() {
        let a = integer_coefficients(&CURVE_11A1, 13);
        assert_eq!((a[2], a[3], a[5], a[7], a[11], a[13]), (-2, -1, 1, -2, 1, 4));
        assert_eq!((a[4], a[6], a[8], a[9]), (2, 2, 0, -2));
        let b = integer_coefficients(&CURVE_17A1, 17);
        assert_eq!((b[2], b[3], b[5], b[7], b[13], b[17]), (-1, 0, -2, 4, -2, 1));
        let c = integer_coefficients(&CURVE_19A1, 11);
        assert_eq!((c[2], c[3], c[5], c[7], c[11]), (0, -2, 3, -1, 3));
    }

    #[test]
    fn hasse_bound() {
        for c in [CURVE_11A1, CURVE_17A1, CURVE_19A1] {
            let sieve = SpfSieve::new(3000);
            for p in sieve.primes() {
                let ap = trace_of_frobenius(&c, p) as f64;
                assert!(ap * ap <= 4.0 * p as f64, "{} p={p}", c.label);
            }
        }
    }
}
