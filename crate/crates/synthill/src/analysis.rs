//! Exact success and error polynomials for a distillation matrix, and the
//! raw-state cost comparison against distill-then-synthesize.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::polys::WeightedPolynomial;
use crate::synthesis::Method;
use crate::synthillation::{synthillate, GMatrix};

/// Largest row-span dimension the dual sums will enumerate.
pub const SPAN_LIMIT: usize = 24;

/// Largest `n` for the direct enumeration over all error patterns.
pub const DIRECT_LIMIT: usize = 20;

/// Polynomial in `e` with arbitrary-precision integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::from_coeffs(vec![BigInt::from(c)])
    }

    /// Coefficients in increasing degree; trailing zeros are dropped.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `(1 − c·e)^w`, expanded by the binomial theorem.
    pub fn one_minus_pow(c: i64, w: usize) -> Self {
        let mut coeffs = Vec::with_capacity(w + 1);
        let mut binom = BigInt::one();
        let step = BigInt::from(-c);
        let mut power = BigInt::one();
        for i in 0..=w {
            coeffs.push(&binom * &power);
            binom = binom * BigInt::from(w - i) / BigInt::from(i + 1);
            power *= &step;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> BigInt {
        self.coeffs.get(d).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Division by an integer that must divide every coefficient.
    pub fn div_exact(&self, d: &BigInt) -> Option<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            let (q, r) = a.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(Self::from_coeffs(out))
    }

    pub fn eval(&self, e: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc * e + BigRational::from_integer(a.clone());
        }
        acc
    }

    pub fn eval_f64(&self, e: f64) -> f64 {
        match BigRational::from_float(e) {
            Some(r) => self.eval(&r).to_f64().unwrap_or(f64::NAN),
            None => f64::NAN,
        }
    }

    /// Power-series quotient `self / den` through degree `order`; `den(0)` must be ±1.
    pub fn series_div(&self, den: &IntPoly, order: usize) -> Option<Vec<BigInt>> {
        let d0 = den.coeff(0);
        if d0.abs() != BigInt::one() {
            return None;
        }
        let mut out: Vec<BigInt> = Vec::with_capacity(order + 1);
        for m in 0..=order {
            let mut acc = self.coeff(m);
            for (i, q) in out.iter().enumerate() {
                acc -= q * den.coeff(m - i);
            }
            out.push(acc * &d0);
        }
        Some(out)
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::from_coeffs(self.coeffs.iter().map(|a| -a).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::from_coeffs(out)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.coeffs, true)
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, coeffs: &[BigInt], zero_if_empty: bool) -> fmt::Result {
    let mut first = true;
    for (d, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
        }
        first = false;
        match d {
            0 => write!(f, "{mag}")?,
            1 => write!(f, "{mag}*e")?,
            _ => write!(f, "{mag}*e^{d}")?,
        }
    }
    if first && zero_if_empty {
        write!(f, "0")?;
    }
    Ok(())
}

/// A truncated series `c0 + c1*e + … + O(e^{m+1})`.
pub struct Series<'a>(pub &'a [BigInt]);

impl fmt::Display for Series<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.0, true)?;
        write!(f, " + O(e^{})", self.0.len())
    }
}

/// `Σ_w counts[w] (1 − 2e)^w`.
fn dual_sum(counts: &[BigInt]) -> IntPoly {
    let mut acc = IntPoly::zero();
    for (w, c) in counts.iter().enumerate() {
        if !c.is_zero() {
            acc = &acc + &IntPoly::one_minus_pow(2, w).scale(c);
        }
    }
    acc
}

/// `Σ_w counts[w] e^w (1 − e)^{n−w}`.
fn primal_sum(counts: &[BigInt], n: usize) -> IntPoly {
    let mut acc = IntPoly::zero();
    for (w, c) in counts.iter().enumerate() {
        if !c.is_zero() {
            let mut shifted = vec![BigInt::zero(); w];
            shifted.extend(IntPoly::one_minus_pow(1, n - w).coeffs.iter().cloned());
            acc = &acc + &IntPoly::from_coeffs(shifted).scale(c);
        }
    }
    acc
}

fn weight_counts(m: &BitMatrix, limit: usize) -> Result<(Vec<BigInt>, usize)> {
    let basis = m.row_basis();
    if basis.rows() > limit {
        return Err(Error::Limit {
            name: "row-span dimension",
            value: basis.rows(),
            limit,
        });
    }
    let mut counts = vec![BigInt::zero(); m.cols() + 1];
    for w in basis.row_span_weights() {
        counts[w] += 1;
    }
    Ok((counts, basis.rows()))
}

/// MacWilliams form of the probability that `M e = 0` for i.i.d. flips.
fn kernel_probability(m: &BitMatrix, limit: usize) -> Result<IntPoly> {
    let (counts, dim) = weight_counts(m, limit)?;
    dual_sum(&counts)
        .div_exact(&(BigInt::one() << dim))
        .ok_or_else(|| Error::Internal("dual sum is not divisible by the span size".into()))
}

/// Weight distributions of `{e : S e = 0}` and `{e : G e = 0}` by brute force.
fn direct_counts(g: &GMatrix) -> (Vec<BigInt>, Vec<BigInt>) {
    let n = g.n();
    let cols = g.matrix().columns();
    let smask = !((1u64 << g.k()) - 1);
    let mut s_counts = vec![0u64; n + 1];
    let mut g_counts = vec![0u64; n + 1];
    let mut syn = 0u64;
    let mut e = 0u64;
    for step in 0u64..1 << n {
        if step > 0 {
            let b = step.trailing_zeros() as usize;
            e ^= 1 << b;
            syn ^= cols[b];
        }
        let w = e.count_ones() as usize;
        if syn & smask == 0 {
            s_counts[w] += 1;
            if syn == 0 {
                g_counts[w] += 1;
            }
        }
    }
    let big = |v: Vec<u64>| v.into_iter().map(BigInt::from).collect();
    (big(s_counts), big(g_counts))
}

fn direct_ok(g: &GMatrix) -> bool {
    g.n() <= DIRECT_LIMIT && g.k() + g.s() <= 64
}

pub fn success_poly(g: &GMatrix) -> Result<IntPoly> {
    success_poly_with(g, SPAN_LIMIT)
}

/// `p_suc`, cross-checked against direct enumeration when `n ≤ 20`.
pub fn success_poly_with(g: &GMatrix, span_limit: usize) -> Result<IntPoly> {
    let p = kernel_probability(&g.s_block(), span_limit)?;
    if direct_ok(g) {
        let (s_counts, _) = direct_counts(g);
        if primal_sum(&s_counts, g.n()) != p {
            return Err(Error::Internal("p_suc: dual and direct computations disagree".into()));
        }
    }
    Ok(p)
}

/// Exact `p_suc`, the accept-and-correct probability, and the `ε_out` series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorPolynomials {
    pub n: usize,
    pub p_suc: IntPoly,
    pub accept_and_correct: IntPoly,
    /// Taylor coefficients of `1 − accept/p_suc`; integers because `p_suc(0) = 1`.
    pub eps_out: Vec<BigInt>,
}

impl ErrorPolynomials {
    /// `p_suc − accept`: accepted runs whose output is corrupted.
    pub fn failure_numerator(&self) -> IntPoly {
        &self.p_suc - &self.accept_and_correct
    }

    pub fn eps_out_at(&self, e: &BigRational) -> BigRational {
        BigRational::one() - self.accept_and_correct.eval(e) / self.p_suc.eval(e)
    }

    pub fn series(&self) -> Series<'_> {
        Series(&self.eps_out)
    }
}

pub fn error_poly(g: &GMatrix, order: usize) -> Result<ErrorPolynomials> {
    error_poly_with(g, order, SPAN_LIMIT)
}

pub fn error_poly_with(g: &GMatrix, order: usize, span_limit: usize) -> Result<ErrorPolynomials> {
    let p_suc = kernel_probability(&g.s_block(), span_limit)?;
    let accept = kernel_probability(g.matrix(), span_limit)?;
    if direct_ok(g) {
        let (s_counts, g_counts) = direct_counts(g);
        if primal_sum(&s_counts, g.n()) != p_suc || primal_sum(&g_counts, g.n()) != accept {
            return Err(Error::Internal("dual and direct computations disagree".into()));
        }
    }
    let ratio = accept
        .series_div(&p_suc, order)
        .ok_or_else(|| Error::Internal("p_suc(0) is not 1".into()))?;
    let mut eps_out: Vec<BigInt> = ratio.into_iter().map(|c| -c).collect();
    eps_out[0] += 1;
    Ok(ErrorPolynomials {
        n: g.n(),
        p_suc,
        accept_and_correct: accept,
        eps_out,
    })
}

/// `1 − |span S|·(1−e)^n / Σ_{v ∈ span S} (1−2e)^{|v|}`, counting every accepted
/// nonzero error as a failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormBound {
    pub n: usize,
    pub span_size: usize,
    /// `(weight, multiplicity)` over the row span of `S`, increasing weight.
    pub terms: Vec<(usize, usize)>,
}

impl ClosedFormBound {
    pub fn p_suc(&self) -> IntPoly {
        let counts: Vec<BigInt> = {
            let mut c = vec![BigInt::zero(); self.n + 1];
            for &(w, m) in &self.terms {
                c[w] += m;
            }
            c
        };
        dual_sum(&counts)
            .div_exact(&BigInt::from(self.span_size))
            .expect("span sums are divisible by the span size")
    }

    pub fn eval(&self, e: &BigRational) -> BigRational {
        let clean = IntPoly::one_minus_pow(1, self.n).eval(e);
        BigRational::one() - clean / self.p_suc().eval(e)
    }

    pub fn eval_f64(&self, e: f64) -> f64 {
        BigRational::from_float(e).map_or(f64::NAN, |r| self.eval(&r).to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for ClosedFormBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lead = if self.span_size == 1 { String::new() } else { self.span_size.to_string() };
        write!(f, "1 - {lead}(1-e)^{} / (", self.n)?;
        for (i, &(w, m)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mult = if m == 1 { String::new() } else { m.to_string() };
            if w == 0 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mult}(1-2e)^{w}")?;
            }
        }
        write!(f, ")")
    }
}

/// Closed-form upper bound on `ε_out` for codes with at most two `S` rows.
pub fn error_poly_bound(g: &GMatrix) -> Result<ClosedFormBound> {
    bound_from_s_block(&g.s_block(), g.n())
}

fn bound_from_s_block(s: &BitMatrix, n: usize) -> Result<ClosedFormBound> {
    if s.rows() > 2 {
        return Err(Error::Unsupported(format!(
            "closed-form bound needs at most 2 S rows, got {}",
            s.rows()
        )));
    }
    let mut weights = s.row_span_weights();
    weights.sort_unstable();
    let mut terms: Vec<(usize, usize)> = Vec::new();
    for w in &weights {
        match terms.last_mut() {
            Some((lw, m)) if lw == w => *m += 1,
            _ => terms.push((*w, 1)),
        }
    }
    Ok(ClosedFormBound {
        n,
        span_size: weights.len(),
        terms,
    })
}

/// `n / p_suc(ε)`, raw states consumed per successful run.
pub fn expected_cost(g: &GMatrix, e: &BigRational) -> Result<BigRational> {
    let p = kernel_probability(&g.s_block(), SPAN_LIMIT)?.eval(e);
    if p.is_zero() {
        return Err(Error::Precondition("success probability is zero".into()));
    }
    Ok(BigRational::from_integer(BigInt::from(g.n())) / p)
}

/// Parses `0.001`, `1e-6`, `3/1000` or `1.5E-3` as an exact rational.
pub fn parse_probability(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Precondition(format!("cannot read {t:?} as a probability"));
    let value = if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        BigRational::new(n, d)
    } else {
        let (mant, exp) = match t.find(['e', 'E']) {
            Some(p) => (&t[..p], t[p + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (t, 0),
        };
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars())).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let shift = exp - frac.len() as i32;
        let ten = BigInt::from(10);
        if shift >= 0 {
            BigRational::from_integer(digits * num_traits::pow(ten, shift as usize))
        } else {
            BigRational::new(digits, num_traits::pow(ten, (-shift) as usize))
        }
    };
    if value.is_negative() || value > BigRational::one() {
        return Err(Error::Precondition(format!("{t} is not a probability")));
    }
    Ok(value)
}

/// A `(a·k + b) → k` distiller with output error `(slope·k + intercept)·ε²`.
///
/// The default is the Bravyi-Haah `3k+8 → k` protocol with the leading
/// coefficient `3k+1` taken from the Bravyi-Haah analysis, not derived here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistillerModel {
    pub name: String,
    pub a: usize,
    pub b: usize,
    pub slope: usize,
    pub intercept: usize,
    /// Outputs per block in precursor rounds.
    pub batch: usize,
}

impl Default for DistillerModel {
    fn default() -> Self {
        DistillerModel {
            name: "bhmsd".into(),
            a: 3,
            b: 8,
            slope: 3,
            intercept: 1,
            batch: 10,
        }
    }
}

impl DistillerModel {
    pub fn input_count(&self, k: usize) -> usize {
        self.a * k + self.b
    }

    pub fn output_count(&self, k: usize) -> usize {
        k
    }

    pub fn error_coefficient(&self, k: usize) -> usize {
        self.slope * k + self.intercept
    }

    /// Output error per state.
    pub fn error_map(&self, k: usize, e: &BigRational) -> BigRational {
        BigRational::from_integer(BigInt::from(self.error_coefficient(k))) * e * e
    }

    /// Probability that no input is faulty.
    pub fn success(&self, k: usize, e: &BigRational) -> BigRational {
        num_traits::pow(BigRational::one() - e, self.input_count(k))
    }

    /// Raw states per output and output error after one block of size `k`.
    pub fn round(&self, k: usize, cost: &BigRational, e: &BigRational) -> (BigRational, BigRational) {
        let inputs = BigRational::from_integer(BigInt::from(self.input_count(k)));
        let outs = BigRational::from_integer(BigInt::from(self.output_count(k)));
        let c = inputs * cost / (outs * self.success(k, e));
        (c, self.error_map(k, e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pipeline {
    Bare,
    DistillThenSynthesize,
    Synthillation,
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pipeline::Bare => "bare",
            Pipeline::DistillThenSynthesize => "distill-synth",
            Pipeline::Synthillation => "synthillation",
        })
    }
}

/// One candidate: `rounds` precursor rounds, then the final step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineRow {
    pub pipeline: Pipeline,
    pub rounds: usize,
    pub cost: BigRational,
    pub error: BigRational,
    /// True when `error` is the closed-form bound rather than the exact value.
    pub bound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineComparison {
    pub tau: usize,
    pub n: usize,
    pub case_id: u8,
    pub epsilon: BigRational,
    pub target: BigRational,
    pub rows: Vec<PipelineRow>,
    pub best_distill: Option<PipelineRow>,
    pub best_synthillation: Option<PipelineRow>,
}

impl PipelineComparison {
    /// Row for `pipeline` after `rounds` precursor rounds.
    pub fn row(&self, pipeline: Pipeline, rounds: usize) -> Option<&PipelineRow> {
        self.rows.iter().find(|r| r.pipeline == pipeline && r.rounds == rounds)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("pipeline,rounds,cost,error,bound\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.6},{:.6e},{}\n",
                r.pipeline,
                r.rounds,
                f(&r.cost),
                f(&r.error),
                r.bound
            ));
        }
        out
    }
}

fn f(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for PipelineComparison {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            out,
            "tau={} n={} case={} eps={:e} target={:e}",
            self.tau,
            self.n,
            self.case_id,
            f(&self.epsilon),
            f(&self.target)
        )?;
        writeln!(out, "{:<14} {:>6} {:>14} {:>12}", "pipeline", "rounds", "cost", "error")?;
        for r in &self.rows {
            let mark = if r.bound { "<=" } else { "" };
            writeln!(
                out,
                "{:<14} {:>6} {:>14.3} {:>12}",
                r.pipeline.to_string(),
                r.rounds,
                f(&r.cost),
                format!("{mark}{:.3e}", f(&r.error))
            )?;
        }
        for (label, best) in [("distill-synth", &self.best_distill), ("synthillation", &self.best_synthillation)] {
            match best {
                Some(r) => writeln!(out, "best {label}: {} rounds={} cost={:.3}", r.pipeline, r.rounds, f(&r.cost))?,
                None => writeln!(out, "best {label}: unreachable")?,
            }
        }
        Ok(())
    }
}

/// Knobs for [`compare_pipelines_with`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompareOptions {
    pub max_rounds: usize,
    pub span_limit: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            max_rounds: 6,
            span_limit: SPAN_LIMIT,
        }
    }
}

/// Compiles `F` and compares the two pipelines at raw error `e`.
pub fn compare_pipelines(
    f: &WeightedPolynomial,
    e: &BigRational,
    target: &BigRational,
    model: &DistillerModel,
) -> Result<PipelineComparison> {
    let s = synthillate(f, Method::Auto)?;
    compare_pipelines_with(s.a.t_count, &s.g, e, target, model, &CompareOptions::default())
}

/// Comparison for a gate of T-count `tau` whose synthillation matrix is `g`.
/// Rounds stop early once no later round can beat the best rows meeting `target`.
pub fn compare_pipelines_with(
    tau: usize,
    g: &GMatrix,
    e: &BigRational,
    target: &BigRational,
    model: &DistillerModel,
    opts: &CompareOptions,
) -> Result<PipelineComparison> {
    compare_pipelines_matrix(tau, g.matrix(), g.k(), g.case_id(), e, target, model, opts)
}

/// Same as [`compare_pipelines_with`] on a bare code matrix whose first `k`
/// rows are the `K` block. No target is needed, so `k` may exceed 64.
#[allow(clippy::too_many_arguments)]
pub fn compare_pipelines_matrix(
    tau: usize,
    matrix: &BitMatrix,
    k: usize,
    case_id: u8,
    e: &BigRational,
    target: &BigRational,
    model: &DistillerModel,
    opts: &CompareOptions,
) -> Result<PipelineComparison> {
    if k > matrix.rows() {
        return Err(Error::Dimension(format!("G has {} rows but k = {k}", matrix.rows())));
    }
    let n = matrix.cols();
    let s_block = matrix.row_block(k, matrix.rows());
    let zero = BigRational::zero();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if e < &zero || e >= &half {
        return Err(Error::Precondition("raw error must lie in [0, 1/2)".into()));
    }
    let int = |v: usize| BigRational::from_integer(BigInt::from(v));
    let p_suc = kernel_probability(&s_block, opts.span_limit)?;
    let exact = if matrix.rows() <= opts.span_limit {
        Some(kernel_probability(matrix, opts.span_limit)?)
    } else {
        None
    };
    let bound = if exact.is_none() { Some(bound_from_s_block(&s_block, n)?) } else { None };

    let mut rows = vec![PipelineRow {
        pipeline: Pipeline::Bare,
        rounds: 0,
        cost: int(tau),
        error: int(tau) * e,
        bound: false,
    }];
    let (mut cost, mut eps) = (BigRational::one(), e.clone());
    for r in 0..=opts.max_rounds {
        let (dcost, derr) = model.round(tau, &cost, &eps);
        rows.push(PipelineRow {
            pipeline: Pipeline::DistillThenSynthesize,
            rounds: r,
            cost: dcost * int(tau),
            error: derr * int(tau),
            bound: false,
        });
        let p = p_suc.eval(&eps);
        let (serr, is_bound) = match (&exact, &bound) {
            (Some(acc), _) => (BigRational::one() - acc.eval(&eps) / &p, false),
            (None, Some(b)) => (b.eval(&eps), true),
            _ => unreachable!("either exact or bound is set"),
        };
        rows.push(PipelineRow {
            pipeline: Pipeline::Synthillation,
            rounds: r,
            cost: int(n) * &cost / p,
            error: serr,
            bound: is_bound,
        });
        let next = model.round(model.batch, &cost, &eps);
        cost = next.0;
        eps = next.1;
        // Later rows cost at least their success-free price, which grows with
        // `cost`, so stop once both best feasible rows are already below it.
        let feasible = |kind: Pipeline| {
            rows.iter()
                .filter(|r| (r.pipeline == kind || r.pipeline == Pipeline::Bare) && &r.error <= target)
                .map(|r| &r.cost)
                .min()
                .cloned()
        };
        let distill_floor = int(model.input_count(tau)) * &cost / int(model.output_count(tau)) * int(tau);
        let synth_floor = int(n) * &cost;
        let settled = |best: Option<BigRational>, floor: &BigRational| best.is_some_and(|b| &b <= floor);
        if settled(feasible(Pipeline::DistillThenSynthesize), &distill_floor)
            && settled(feasible(Pipeline::Synthillation), &synth_floor)
        {
            break;
        }
    }
    let best = |kind: Pipeline| {
        rows.iter()
            .filter(|r| (r.pipeline == kind || r.pipeline == Pipeline::Bare) && &r.error <= target)
            .min_by(|a, b| a.cost.cmp(&b.cost).then(a.pipeline.cmp(&b.pipeline)))
            .cloned()
    };
    let best_distill = best(Pipeline::DistillThenSynthesize);
    let best_synthillation = best(Pipeline::Synthillation);
    if best_distill.is_none() && best_synthillation.is_none() {
        return Err(Error::Unreachable {
            target: f(target),
            rounds: opts.max_rounds,
        });
    }
    Ok(PipelineComparison {
        tau,
        n,
        case_id,
        epsilon: e.clone(),
        target: target.clone(),
        rows,
        best_distill,
        best_synthillation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{MatrixRole, SynthesisMatrix};
    use crate::synthillation::build_g;

    fn ccz() -> WeightedPolynomial {
        WeightedPolynomial::zero(3).with_cubic(0, 1, 2, 1)
    }

    fn example4() -> GMatrix {
        let a = SynthesisMatrix::new(BitMatrix::parse("1101100\n1011010\n0111001").unwrap(), MatrixRole::A);
        build_g(&ccz(), &a, &SynthesisMatrix::new(BitMatrix::zeros(3, 0), MatrixRole::B)).unwrap()
    }

    fn series(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn binomials() {
        assert_eq!(IntPoly::one_minus_pow(2, 3), IntPoly::from_i64(&[1, -6, 12, -8]));
        assert_eq!(IntPoly::one_minus_pow(1, 0), IntPoly::one());
        let p = IntPoly::from_i64(&[1, -8, 56]);
        assert_eq!(p.to_string(), "1 - 8*e + 56*e^2");
        assert_eq!(IntPoly::zero().to_string(), "0");
        assert_eq!(IntPoly::from_i64(&[0, -1, 0, 1]).to_string(), "-1*e + 1*e^3");
        let q = &p * &IntPoly::from_i64(&[1, 1]);
        assert_eq!(q.series_div(&IntPoly::from_i64(&[1, 1]), 3).unwrap(), series(&[1, -8, 56, 0]));
    }

    #[test]
    fn example4_series() {
        let g = example4();
        let p = success_poly(&g).unwrap();
        let expected = &(&IntPoly::one() + &IntPoly::one_minus_pow(2, 8)).div_exact(&BigInt::from(2)).unwrap();
        assert_eq!(&p, expected);
        assert_eq!(&p.coeffs()[..6], &series(&[1, -8, 56, -224, 560, -896])[..]);
        let ep = error_poly(&g, 6).unwrap();
        assert_eq!(ep.eps_out, series(&[0, 0, 28, 56, -644, -2800, 11312]));
        // The printed Example 4 series is p_suc − accept, not the normalised ratio.
        let num = ep.failure_numerator();
        assert_eq!(&num.coeffs()[..7], &series(&[0, 0, 28, -168, 476, -784, 784])[..]);
    }

    #[test]
    fn trivial_code_has_no_suppression() {
        let a = BitMatrix::parse("101\n011").unwrap();
        let f = WeightedPolynomial::zero(2).with_quadratic(0, 1, 1);
        let g = GMatrix::from_parts(a, 2, 9, 0, f).unwrap();
        let ep = error_poly(&g, 3).unwrap();
        assert_eq!(ep.p_suc, IntPoly::one());
        assert_eq!(ep.eps_out[1], BigInt::from(3));
    }

    #[test]
    fn bound_dominates_exact() {
        let g = example4();
        let b = error_poly_bound(&g).unwrap();
        assert_eq!(b.to_string(), "1 - 2(1-e)^8 / (1 + (1-2e)^8)");
        assert_eq!(b.eval(&BigRational::zero()), BigRational::zero());
        let ep = error_poly(&g, 4).unwrap();
        for e in ["0.001", "0.01", "0.05", "0.1"] {
            let e = parse_probability(e).unwrap();
            assert!(b.eval(&e) >= ep.eps_out_at(&e));
        }
    }

    #[test]
    fn costs() {
        let g = example4();
        assert_eq!(expected_cost(&g, &BigRational::zero()).unwrap(), BigRational::from_integer(8.into()));
        let e = parse_probability("0.001").unwrap();
        let p = success_poly(&g).unwrap().eval(&e);
        assert_eq!(expected_cost(&g, &e).unwrap(), BigRational::from_integer(8.into()) / p);
    }

    #[test]
    fn probabilities_parse_exactly() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_probability("0.001").unwrap(), r(1, 1000));
        assert_eq!(parse_probability("1e-6").unwrap(), r(1, 1_000_000));
        assert_eq!(parse_probability("1.5E-3").unwrap(), r(3, 2000));
        assert_eq!(parse_probability("3/1000").unwrap(), r(3, 1000));
        assert_eq!(parse_probability("1").unwrap(), r(1, 1));
        for bad in ["", "x", "2", "-0.1", "1/0", "1e", "."] {
            assert!(parse_probability(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn distiller_defaults() {
        let m = DistillerModel::default();
        assert_eq!((m.input_count(10), m.output_count(10), m.error_coefficient(10)), (38, 10, 31));
        assert!(m.error_map(5, &BigRational::zero()).is_zero());
    }

    #[test]
    fn bare_synthesis_when_already_good_enough() {
        let e = parse_probability("1e-4").unwrap();
        let target = parse_probability("0.01").unwrap();
        let c = compare_pipelines(&ccz(), &e, &target, &DistillerModel::default()).unwrap();
        assert_eq!(c.best_distill.as_ref().unwrap().pipeline, Pipeline::Bare);
        assert_eq!(c.best_synthillation.as_ref().unwrap().cost, BigRational::from_integer(7.into()));
        let csv = c.to_csv();
        assert!(csv.starts_with("pipeline,rounds,cost,error,bound\nbare,0,7.000000,"));
        let unreachable = compare_pipelines(&ccz(), &parse_probability("0.3").unwrap(), &parse_probability("1e-300").unwrap(), &DistillerModel::default());
        assert!(matches!(unreachable, Err(Error::Unreachable { .. })));
    }
}
