//! The threefold integral
//! `I(m, n, q) = int W(x) g(q, x) int V(y1) y1^{-it} U(y2)
//!   e(N^2 x (y1^2 - y2)/(qQ) - n N y1/q -+ 2N sqrt(m y2)/(q sqrt p)) dy1 dy2 dx`.
//!
//! The `x`-integral is done first: `D_q(k) = int W(x) g(q, x) e(k x/(qQ)) dx`
//! is tabulated once per modulus, after which `I` is a banded double sum
//! over `(y1, y2)` with kernel `D_q(N^2 (y1^2 - y2))`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::deltasym::{window_half_width, DeltaKernel};
use crate::error::{Error, Result};
use crate::lfun::ParameterBox;

use super::bump::{Plateau, Smooth};
use super::quadrature::GaussLegendre;
use super::stationary::Branch;

/// Weight on the `n` side (carries `y^{-it}`).
pub fn length_weight() -> Plateau {
    Plateau::new(0.5, 1.0, 2.0, 2.5)
}

/// Weight on the `m` side (carries the Bessel phase).
pub fn dual_weight() -> Plateau {
    Plateau::new(0.75, 1.0, 2.0, 2.25)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreefoldOptions {
    /// `x` is cut off smoothly at `|x| = 2 Q^window_eps`.
    pub window_eps: f64,
    /// Largest `|n|` and `m` the node sets must resolve.
    pub n_max: u64,
    pub m_max: u64,
}

impl Default for ThreefoldOptions {
    fn default() -> Self {
        Self {
            window_eps: 0.5,
            n_max: 64,
            m_max: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Localization {
    /// `N^{2 eps} q / (Q K)`
    pub window: f64,
    /// Share of `sum |integrand|` with `|y1 - sqrt(y2)|` outside the window.
    pub outside_fraction: f64,
    pub flagged: bool,
}

/// Share above which a value is flagged as not localized.
pub const LOCALIZATION_FLAG: f64 = 1e-3;

/// Tabulated `D_q` on `[0, kappa_max]`; zero beyond.
struct KernelTable {
    step: f64,
    values: Vec<f64>,
    kappa_max: f64,
}

impl KernelTable {
    fn eval(&self, kappa: f64) -> f64 {
        let k = kappa.abs();
        if k >= self.kappa_max {
            return 0.0;
        }
        let s = k / self.step;
        let i = (s.floor() as usize).clamp(1, self.values.len() - 3);
        let f = s - i as f64;
        let (p0, p1, p2, p3) = (self.values[i - 1], self.values[i], self.values[i + 1], self.values[i + 2]);
        // cubic Lagrange through i-1..i+2
        p1 + 0.5 * f * (p2 - p0 + f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + f * (3.0 * (p1 - p2) + p3 - p0)))
    }
}

pub struct ThreefoldIntegral {
    params: ParameterBox,
    q: u64,
    opts: ThreefoldOptions,
    table: KernelTable,
    y1: Vec<(f64, f64)>,
    y2: Vec<(f64, f64)>,
}

impl ThreefoldIntegral {
    pub fn new(params: &ParameterBox, q: u64, opts: ThreefoldOptions) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroModulus);
        }
        let kernel = DeltaKernel::new(params.big_q)?;
        let (big_n, big_q, qf) = (params.big_n, params.big_q, q as f64);
        let x_edge = 2.0 * window_half_width(big_q, opts.window_eps);
        let window = Plateau::new(-x_edge, -0.5 * x_edge, 0.5 * x_edge, x_edge);
        let gl = GaussLegendre::new(20);

        // Spectrum of W g: |kappa| <= Q^2 widened by the window's transform.
        let kappa_max = big_q * big_q + 20.0 * qf * big_q / (0.5 * x_edge);
        let x_cycles = kappa_max * x_edge / (qf * big_q);
        let xs = gl.composite(0.0, x_edge, x_cycles.ceil() as usize + 16);
        let xv: Vec<f64> = xs.iter().map(|p| p.0).collect();
        let g = kernel.g_weight_grid(q, &xv);
        let xw: Vec<(f64, f64)> = xs.iter().zip(&g).map(|(&(x, w), gv)| (x, 2.0 * w * window.value(x) * gv)).collect();
        let period = qf * big_q / x_edge;
        let step = period / 256.0;
        let count = (kappa_max / step).ceil() as usize + 4;
        let values: Vec<f64> = (0..count)
            .map(|i| {
                let c = TAU * i as f64 * step / (qf * big_q);
                xw.iter().map(|&(x, w)| w * (c * x).cos()).sum()
            })
            .collect();
        let table = KernelTable { step, values, kappa_max };

        let d_rate = x_edge / (qf * big_q) * big_n * big_n;
        let (v, u) = (length_weight(), dual_weight());
        let c1 = d_rate * 2.0 * v.d + opts.n_max as f64 * big_n / qf + params.t / (TAU * v.a);
        let y1 = gl.composite(v.a, v.d, (c1 * (v.d - v.a)).ceil() as usize + 8);
        let sqrt_p = (params.p as f64).sqrt();
        let c2 = d_rate + big_n * (opts.m_max as f64).sqrt() / (qf * sqrt_p * u.a.sqrt());
        let y2 = gl.composite(u.a, u.d, (c2 * (u.d - u.a)).ceil() as usize + 8);
        Ok(Self {
            params: params.clone(),
            q,
            opts,
            table,
            y1,
            y2,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn options(&self) -> ThreefoldOptions {
        self.opts
    }

    /// `D_q(kappa)`.
    pub fn x_kernel(&self, kappa: f64) -> f64 {
        self.table.eval(kappa)
    }

    fn factors(&self, m: u64, n: i64, branch: Branch) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        if n.unsigned_abs() > self.opts.n_max || m > self.opts.m_max {
            return Err(Error::Domain(format!(
                "(m, n) = ({m}, {n}) outside the resolved range m <= {}, |n| <= {}",
                self.opts.m_max, self.opts.n_max
            )));
        }
        let (big_n, qf) = (self.params.big_n, self.q as f64);
        let (v, u) = (length_weight(), dual_weight());
        let a = self
            .y1
            .iter()
            .map(|&(y, w)| {
                let ph = -self.params.t * y.ln() - TAU * n as f64 * big_n * y / qf;
                Complex64::from_polar(w * v.value(y), ph)
            })
            .collect();
        let c = 2.0 * big_n * (m as f64).sqrt() / (qf * (self.params.p as f64).sqrt());
        let b = self
            .y2
            .iter()
            .map(|&(y, w)| Complex64::from_polar(w * u.value(y), -branch.sign() * TAU * c * y.sqrt()))
            .collect();
        Ok((a, b))
    }

    /// Visits every `(y1, y2, a_i b_j D)` with nonzero kernel.
    fn for_band(&self, a: &[Complex64], b: &[Complex64], mut f: impl FnMut(f64, f64, Complex64)) {
        let nn = self.params.big_n * self.params.big_n;
        let reach = self.table.kappa_max / nn;
        for (&(y1, _), ai) in self.y1.iter().zip(a) {
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            let s = y1 * y1;
            let lo = self.y2.partition_point(|p| p.0 < s - reach);
            let hi = self.y2.partition_point(|p| p.0 <= s + reach);
            for j in lo..hi {
                let (y2, _) = self.y2[j];
                let d = self.table.eval(nn * (s - y2));
                if d != 0.0 {
                    f(y1, y2, ai * b[j] * d);
                }
            }
        }
    }

    pub fn value(&self, m: u64, n: i64, branch: Branch) -> Result<Complex64> {
        let (a, b) = self.factors(m, n, branch)?;
        let mut total = Complex64::new(0.0, 0.0);
        self.for_band(&a, &b, |_, _, z| total += z);
        Ok(total)
    }

    pub fn localization(&self, m: u64, n: i64, branch: Branch) -> Result<Localization> {
        let (a, b) = self.factors(m, n, branch)?;
        let p = &self.params;
        let window = p.big_n.powf(2.0 * p.eps) * self.q as f64 / (p.big_q * p.k);
        let (mut inside, mut outside) = (0.0, 0.0);
        self.for_band(&a, &b, |y1, y2, z| {
            if (y1 - y2.sqrt()).abs() > window {
                outside += z.norm();
            } else {
                inside += z.norm();
            }
        });
        let total = inside + outside;
        let outside_fraction = if total > 0.0 { outside / total } else { 0.0 };
        Ok(Localization {
            window,
            outside_fraction,
            flagged: outside_fraction > LOCALIZATION_FLAG,
        })
    }
}

/// Single evaluation of `I(m, n, q)`.
pub fn integral_i(params: &ParameterBox, m: u64, n: i64, q: u64, branch: Branch, window_eps: f64) -> Result<Complex64> {
    let opts = ThreefoldOptions {
        window_eps,
        n_max: n.unsigned_abs().max(1),
        m_max: m.max(1),
    };
    ThreefoldIntegral::new(params, q, opts)?.value(m, n, branch)
}

/// Largest `|n|` for which the `y1`-phase can be stationary on the window.
pub fn stationary_n_range(params: &ParameterBox, q: u64, window_eps: f64) -> f64 {
    let x_edge = 2.0 * window_half_width(params.big_q, window_eps);
    let v = length_weight();
    let qf = q as f64;
    (2.0 * params.big_n * x_edge * v.d / params.big_q) + qf * params.t / (2.0 * PI * params.big_n * v.a)
}

/// Largest `m` for which the `y2`-phase can be stationary on the window.
pub fn stationary_m_range(params: &ParameterBox, window_eps: f64) -> f64 {
    let x_edge = 2.0 * window_half_width(params.big_q, window_eps);
    let u = dual_weight();
    let r = params.big_n * x_edge * (params.p as f64).sqrt() * u.d.sqrt() / params.big_q;
    r * r
}
