//! Time-indexed statistic traces over a sampled path.
//!
//! Every sum runs index-ascending over `i = 1..[ns]` and feeds on
//! `X_{(i-1)/n}`, matching the left-endpoint convention of the limit theorems,
//! and is accumulated in a fixed order for bit-stable results.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::sampler::SamplePath;

use super::testfn::{NormalizingSequence, TestFunction, TransformFunction};

/// A statistic evaluated along the grid: `values[k]` is the statistic at
/// `s = k/n`.
#[derive(Debug, Clone)]
pub struct Trace {
    n: u64,
    values: Vec<f64>,
}

impl Trace {
    pub fn new(n: u64, values: Vec<f64>) -> Self {
        Self { n, values }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Value at time `s` (the statistic is a step function of `s`).
    pub fn at(&self, s: f64) -> f64 {
        let k = ((self.n as f64 * s).floor() as usize).min(self.values.len() - 1);
        self.values[k]
    }

    /// CSV rows `(i, s_i, value)`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "i,s_i,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{},{}", i, i as f64 / self.n as f64, v)?;
        }
        Ok(())
    }
}

fn cumulative<F: FnMut(usize, f64) -> f64>(path: &SamplePath, mut term: F) -> Trace {
    let values = path.values();
    let mut out = Vec::with_capacity(values.len());
    out.push(0.0);
    let mut acc = 0.0;
    for i in 1..values.len() {
        acc += term(i, values[i - 1]);
        out.push(acc);
    }
    Trace::new(path.n(), out)
}

/// Local-time statistic `s -> (u_n/n) sum_{i<=[ns]} g(u_n X_{(i-1)/n})`.
///
/// For bounded integrable `g` with `g(0) = 0` it converges to `m_0(g) L^0`;
/// with `g(0) != 0` at a sticky threshold it diverges (accepted anyway as the
/// negative control).
pub fn local_time_statistic(path: &SamplePath, g: &TestFunction, u: &NormalizingSequence) -> Trace {
    let un = u.value(path.n());
    let scale = un / path.n() as f64;
    let mut t = cumulative(path, |_, x| g.eval(un * x));
    for v in &mut t.values {
        *v *= scale;
    }
    t
}

/// Same statistic with `g` replaced by `g_n[T](y) = g(u_n T(y / u_n))`;
/// reduces bitwise to `local_time_statistic` for the identity transform.
pub fn transformed_statistic(
    path: &SamplePath,
    g: &TestFunction,
    transform: &TransformFunction,
    u: &NormalizingSequence,
) -> Trace {
    if transform.is_identity() {
        return local_time_statistic(path, g, u);
    }
    let un = u.value(path.n());
    let scale = un / path.n() as f64;
    let mut t = cumulative(path, |_, x| g.eval(un * transform.eval(un * x / un)));
    for v in &mut t.values {
        *v *= scale;
    }
    t
}

/// An interval of the real line, possibly a singleton.
#[derive(Debug, Clone, Copy)]
pub struct Interval {
    lo: f64,
    hi: f64,
    closed_lo: bool,
    closed_hi: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, closed_lo: bool, closed_hi: bool) -> Self {
        Self { lo, hi, closed_lo, closed_hi }
    }

    pub fn singleton(v: f64) -> Self {
        Self { lo: v, hi: v, closed_lo: true, closed_hi: true }
    }

    pub fn positive_half_line() -> Self {
        Self { lo: 0.0, hi: f64::INFINITY, closed_lo: false, closed_hi: true }
    }

    pub fn negative_half_line() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: 0.0, closed_lo: true, closed_hi: false }
    }

    pub fn all() -> Self {
        Self { lo: f64::NEG_INFINITY, hi: f64::INFINITY, closed_lo: true, closed_hi: true }
    }

    #[inline]
    pub fn contains(&self, y: f64) -> bool {
        let above = if self.closed_lo { y >= self.lo } else { y > self.lo };
        let below = if self.closed_hi { y <= self.hi } else { y < self.hi };
        above && below
    }
}

/// Occupation statistic `s -> (1/n) sum_{i<=[ns]} 1_U(X_{(i-1)/n})`.
///
/// For `U = {0}` this converges to `rho L^0`.
pub fn occupation_statistic(path: &SamplePath, interval: Interval) -> Trace {
    let inv_n = 1.0 / path.n() as f64;
    let mut t = cumulative(path, |_, x| if interval.contains(x) { 1.0 } else { 0.0 });
    for v in &mut t.values {
        *v *= inv_n;
    }
    t
}

/// One-sided normalized sums
/// `S_n^{g+} = (u_n/n)(sigma(0+)^2 / ∫ g_{>0}) sum g_{>0}(u_n X_{(i-1)/n})`
/// and its mirror; they converge to `(1 + beta) L` and `(1 - beta) L`.
///
/// Fails when the needed one-sided integral of `g` vanishes.
pub fn one_sided_sums(
    path: &SamplePath,
    g: &TestFunction,
    u: &NormalizingSequence,
    sigma_plus: f64,
    sigma_minus: f64,
) -> Result<(Trace, Trace)> {
    if g.integral_pos() == 0.0 {
        return Err(Error::ZeroNormalizer("positive"));
    }
    if g.integral_neg() == 0.0 {
        return Err(Error::ZeroNormalizer("negative"));
    }
    let un = u.value(path.n());
    let n = path.n() as f64;
    let scale_pos = un / n * sigma_plus * sigma_plus / g.integral_pos();
    let scale_neg = un / n * sigma_minus * sigma_minus / g.integral_neg();
    let mut pos = cumulative(path, |_, x| {
        let y = un * x;
        if y > 0.0 {
            g.eval(y)
        } else {
            0.0
        }
    });
    let mut neg = cumulative(path, |_, x| {
        let y = un * x;
        if y < 0.0 {
            g.eval(y)
        } else {
            0.0
        }
    });
    for v in &mut pos.values {
        *v *= scale_pos;
    }
    for v in &mut neg.values {
        *v *= scale_neg;
    }
    Ok((pos, neg))
}

/// Running squared-increment sums of the positive and negative parts,
/// `QV+- = sum (X+-_{i/n} - X+-_{(i-1)/n})^2`; they converge to
/// `sigma_+^2 O^{(0,inf)}` and `sigma_-^2 O^{(-inf,0)}`.
pub fn quadratic_variation_sums(path: &SamplePath) -> (Trace, Trace) {
    let values = path.values();
    let mut qp = Vec::with_capacity(values.len());
    let mut qm = Vec::with_capacity(values.len());
    qp.push(0.0);
    qm.push(0.0);
    let mut accp = 0.0;
    let mut accm = 0.0;
    for i in 1..values.len() {
        let dp = values[i].max(0.0) - values[i - 1].max(0.0);
        let dm = (-values[i]).max(0.0) - (-values[i - 1]).max(0.0);
        accp += dp * dp;
        accm += dm * dm;
        qp.push(accp);
        qm.push(accm);
    }
    (Trace::new(path.n(), qp), Trace::new(path.n(), qm))
}
