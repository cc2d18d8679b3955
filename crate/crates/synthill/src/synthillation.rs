//! Distillation matrices `G = (K over S)` for a target `F`, built from a
//! gate-synthesis matrix `A` and a `∼μ` matrix `B` following the eleven
//! constructions of Table I, plus quasitransversality and distance checks.

use std::fmt;

use crate::error::{parse_err, Error, Result};
use crate::gf2::BitMatrix;
use crate::polys::{clifford_equiv, format_point, interpolate, mu_equiv, weighted_from_matrix, WeightedPolynomial};
use crate::synthesis::{mu_decompose, synthesize, Method, MuDecomposition, SynthesisMatrix, SynthesisResult};

/// Largest `k + s` for which verification also sweeps every point.
pub const SWEEP_LIMIT: usize = 20;

/// Default column count up to which [`distance`] searches exhaustively.
pub const DISTANCE_LIMIT: usize = 24;

/// Padding constant `Δ` of each case, indexed by `case - 1`.
///
/// Cases 2 and 6 carry one column more than the printed table: with
/// `cols(A)` even and `cols(B)` odd the printed `S` has an odd row, so the
/// second copy of `B` is padded by a zero column.
pub const TABLE_DELTA: [usize; 11] = [8, 10, 9, 11, 0, 2, 1, 3, 0, 2, 1];

/// `Δ` exactly as printed in Table I.
pub const PRINTED_DELTA: [usize; 11] = [8, 9, 9, 11, 0, 1, 1, 3, 0, 2, 1];

pub fn table_delta(case_id: u8) -> Option<usize> {
    TABLE_DELTA.get((case_id as usize).checked_sub(1)?).copied()
}

/// A `(k+s) × n` distillation matrix with its case label and target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GMatrix {
    inner: BitMatrix,
    k: usize,
    s: usize,
    case_id: u8,
    delta: usize,
    target: WeightedPolynomial,
}

impl GMatrix {
    /// Assembles a matrix without running any checks; see [`GMatrix::check_invariants`].
    pub fn from_parts(inner: BitMatrix, k: usize, case_id: u8, delta: usize, target: WeightedPolynomial) -> Result<Self> {
        if inner.rows() < k {
            return Err(Error::Dimension(format!("G has {} rows but k = {k}", inner.rows())));
        }
        if target.k() != k {
            return Err(Error::Dimension(format!("target has {} variables but k = {k}", target.k())));
        }
        Ok(GMatrix {
            s: inner.rows() - k,
            inner,
            k,
            case_id,
            delta,
            target,
        })
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.inner
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.inner.cols()
    }

    pub fn case_id(&self) -> u8 {
        self.case_id
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn target(&self) -> &WeightedPolynomial {
        &self.target
    }

    pub fn k_block(&self) -> BitMatrix {
        self.inner.row_block(0, self.k)
    }

    pub fn s_block(&self) -> BitMatrix {
        self.inner.row_block(self.k, self.k + self.s)
    }

    /// Full row rank and no empty column in `S`.
    pub fn check_invariants(&self) -> Result<()> {
        let rank = self.inner.rank();
        if rank != self.k + self.s {
            return Err(Error::RankDeficient {
                rank,
                rows: self.k + self.s,
            });
        }
        if self.s > 0 {
            let s = self.s_block();
            if let Some(j) = (0..self.n()).find(|&j| s.column_is_zero(j)) {
                return Err(Error::Precondition(format!("S column {} is empty, so distance is 1", j + 1)));
            }
        }
        Ok(())
    }

    /// Toggles one entry; used to build deliberately broken codes.
    pub fn flip(&mut self, row: usize, col: usize) -> Result<()> {
        self.inner.get(row, col)?;
        self.inner.flip(row, col);
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_target(text, None)
    }

    /// Parses the G file format; `target` replaces or supplies the target section.
    pub fn parse_with_target(text: &str, target: Option<WeightedPolynomial>) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
        let mut it = lines.iter().copied().skip_while(|(_, l)| l.trim().is_empty() || l.trim_start().starts_with('#'));
        let (hno, header) = it.next().ok_or_else(|| parse_err(1, "empty G file"))?;
        let fields = parse_header(hno, header)?;
        let field = |name: &str| -> Result<usize> {
            fields
                .iter()
                .find(|(k, _)| k == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| parse_err(hno, format!("header lacks `{name}=`")))
        };
        let (k, s, n) = (field("k")?, field("s")?, field("n")?);
        let case_id = field("case")?;
        let delta = field("delta")?;
        if !(1..=11).contains(&case_id) {
            return Err(parse_err(hno, format!("case {case_id} is not in 1..=11")));
        }
        let rest: Vec<(usize, &str)> = it.collect();
        let sep = rest
            .iter()
            .position(|(_, l)| l.trim() == "---")
            .ok_or_else(|| parse_err(hno, "missing `---` between K and S"))?;
        let kmat = BitMatrix::parse_lines(rest[..sep].iter().copied())?;
        let after = &rest[sep + 1..];
        let send = after.iter().position(|(_, l)| l.trim().is_empty()).unwrap_or(after.len());
        let smat = BitMatrix::parse_lines(after[..send].iter().copied())?;
        let at = |i: usize| rest.get(i).map_or(hno, |r| r.0);
        if kmat.rows() != k {
            return Err(parse_err(at(sep), format!("K block has {} rows, header says {k}", kmat.rows())));
        }
        if smat.rows() != s {
            return Err(parse_err(at(sep), format!("S block has {} rows, header says {s}", smat.rows())));
        }
        let width = |m: &BitMatrix| if m.rows() == 0 { n } else { m.cols() };
        if width(&kmat) != n || width(&smat) != n {
            return Err(parse_err(hno, format!("blocks do not have n = {n} columns")));
        }
        let kmat = if kmat.rows() == 0 { BitMatrix::zeros(0, n) } else { kmat };
        let smat = if smat.rows() == 0 { BitMatrix::zeros(0, n) } else { smat };
        let inner = kmat.vstack(&smat)?;
        let tail = &after[send..];
        let tstart = tail.iter().position(|(_, l)| !l.trim().is_empty());
        let parsed_target = match tstart {
            None => None,
            Some(p) => {
                let (tno, tl) = tail[p];
                if tl.trim() != "target" {
                    return Err(parse_err(tno, format!("expected `target` section, found {:?}", tl.trim())));
                }
                let body: Vec<&str> = tail[p + 1..].iter().map(|(_, l)| *l).collect();
                let poly = WeightedPolynomial::parse(&body.join("\n")).map_err(|e| match e {
                    Error::Parse { line, msg } => parse_err(tno + line, msg),
                    other => other,
                })?;
                Some(poly.widen(k.max(poly.k())))
            }
        };
        let target = target
            .or(parsed_target)
            .ok_or_else(|| parse_err(hno, "no target section; supply the target polynomial"))?;
        if target.k() != k {
            return Err(Error::Dimension(format!("target has {} variables but k = {k}", target.k())));
        }
        GMatrix::from_parts(inner, k, case_id as u8, delta, target)
    }
}

fn parse_header(no: usize, line: &str) -> Result<Vec<(String, usize)>> {
    let mut toks = line.split_whitespace();
    if toks.next() != Some("G") {
        return Err(parse_err(no, "G file must start with a `G k=.. s=.. n=.. case=.. delta=..` header"));
    }
    toks.map(|t| {
        let (key, val) = t.split_once('=').ok_or_else(|| parse_err(no, format!("bad header field {t:?}")))?;
        let v = val.parse().map_err(|_| parse_err(no, format!("bad value in {t:?}")))?;
        Ok((key.to_string(), v))
    })
    .collect()
}

impl fmt::Display for GMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "G k={} s={} n={} case={} delta={}",
            self.k,
            self.s,
            self.n(),
            self.case_id,
            self.delta
        )?;
        write!(f, "{}", self.k_block())?;
        writeln!(f, "---")?;
        write!(f, "{}", self.s_block())?;
        writeln!(f)?;
        writeln!(f, "target")?;
        write!(f, "{}", self.target)
    }
}

/// `F̃` with `|K^T x ⊕ S^T y| + 2 F̃(x, y) = F(x)` at every point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiWitness {
    pub f_tilde: WeightedPolynomial,
}

impl QuasiWitness {
    /// True when `F̃` does not involve the `y` variables.
    pub fn independent_of_y(&self, k: usize) -> bool {
        self.f_tilde.support() >> k == 0
    }
}

// Columns of one block of Table I: a K part and a constant S pattern.
enum KPart<'a> {
    M(&'a BitMatrix),
    C,
    Zero(usize),
}

fn layout(case_id: u8) -> (usize, Vec<(u8, Vec<u8>)>) {
    // Block codes: 0 = A, 1 = B, 2 = c, 3 = zero column.
    let pad1 = || {
        let mut v = Vec::new();
        for code in [2u8, 3] {
            for p in [[1, 0, 1], [0, 1, 1], [0, 0, 1], [1, 1, 1]] {
                v.push((code, p.to_vec()));
            }
        }
        v
    };
    match case_id {
        1..=4 => {
            let odd_a = case_id >= 3;
            let mut v = if odd_a {
                vec![(0, vec![1, 1, 0]), (1, vec![1, 0, 0]), (1, vec![0, 1, 0])]
            } else {
                vec![(0, vec![1, 0, 0]), (1, vec![1, 1, 0]), (1, vec![0, 1, 0])]
            };
            v.extend(pad1());
            match case_id {
                2 => {
                    v.push((3, vec![1, 1, 0]));
                    v.push((3, vec![0, 1, 0]));
                }
                3 => v.push((3, vec![1, 1, 0])),
                4 => {
                    v.push((3, vec![1, 1, 0]));
                    v.push((3, vec![1, 0, 0]));
                    v.push((3, vec![0, 1, 0]));
                }
                _ => {}
            }
            (3, v)
        }
        5..=8 => {
            let mut v = if case_id >= 7 {
                vec![(0, vec![1, 1]), (1, vec![1, 0]), (1, vec![0, 1])]
            } else {
                vec![(0, vec![1, 0]), (1, vec![1, 1]), (1, vec![0, 1])]
            };
            match case_id {
                6 => {
                    v.push((3, vec![1, 1]));
                    v.push((3, vec![0, 1]));
                }
                7 => v.push((3, vec![1, 1])),
                8 => {
                    v.push((3, vec![1, 1]));
                    v.push((3, vec![1, 0]));
                    v.push((3, vec![0, 1]));
                }
                _ => {}
            }
            (2, v)
        }
        9 => (1, vec![(0, vec![1])]),
        10 => (1, vec![(0, vec![1]), (3, vec![1]), (3, vec![1])]),
        _ => (1, vec![(0, vec![1]), (3, vec![1])]),
    }
}

/// Table I case for a target and its matrices.
pub fn route_case(f: &WeightedPolynomial, a: &SynthesisMatrix, b: &SynthesisMatrix) -> Result<u8> {
    let a_odd = a.t_count() % 2 == 1;
    let b_odd = b.t_count() % 2 == 1;
    let offset = (a_odd as u8) * 2 + b_odd as u8;
    if f.has_odd_linear() {
        Ok(1 + offset)
    } else if b.t_count() > 0 {
        Ok(5 + offset)
    } else {
        if !f.is_pure_cubic_class() {
            return Err(Error::Precondition(
                "target has odd quadratic terms, so a nonempty B is required".into(),
            ));
        }
        if a_odd {
            return Ok(11);
        }
        let ones = vec![u64::MAX; a.t_count().div_ceil(64)];
        let mut ones = ones;
        if a.t_count() % 64 != 0 {
            *ones.last_mut().expect("nonempty") = (1u64 << (a.t_count() % 64)) - 1;
        }
        Ok(if a.t_count() > 0 && a.matrix().in_row_span(&ones) { 10 } else { 9 })
    }
}

/// Builds and verifies the distillation matrix for `F` per Table I.
pub fn build_g(f: &WeightedPolynomial, a: &SynthesisMatrix, b: &SynthesisMatrix) -> Result<GMatrix> {
    let k = f.k();
    if a.qubits() != k || b.qubits() != k {
        return Err(Error::Dimension(format!(
            "A has {} rows and B has {} rows for a {k}-variable target",
            a.qubits(),
            b.qubits()
        )));
    }
    if !clifford_equiv(&a.function(), f)? {
        return Err(Error::Precondition("A is not a gate-synthesis matrix for the target".into()));
    }
    if b.t_count() > 0 && !mu_equiv(&b.function(), f)? {
        return Err(Error::Precondition("B is not μ-equivalent to the target".into()));
    }
    let rank = a.matrix().rank();
    if rank != k {
        return Err(Error::RankDeficient { rank, rows: k });
    }
    let case_id = route_case(f, a, b)?;
    let (s, blocks) = layout(case_id);
    let c_col = {
        let mut c = BitMatrix::zeros(k, 1);
        for i in 0..k {
            c.put(i, 0, f.linear(i) % 2 == 1);
        }
        c
    };
    let mut parts: Vec<(KPart, &[u8])> = Vec::new();
    for (code, pattern) in &blocks {
        let kp = match code {
            0 => KPart::M(a.matrix()),
            1 => KPart::M(b.matrix()),
            2 => KPart::C,
            _ => KPart::Zero(1),
        };
        parts.push((kp, pattern));
    }
    let mut inner = BitMatrix::zeros(k + s, 0);
    for (kp, pattern) in parts {
        let kblock = match kp {
            KPart::M(m) => m.clone(),
            KPart::C => c_col.clone(),
            KPart::Zero(w) => BitMatrix::zeros(k, w),
        };
        let mut sblock = BitMatrix::zeros(s, kblock.cols());
        for (r, &bit) in pattern.iter().enumerate() {
            for j in 0..kblock.cols() {
                sblock.put(r, j, bit == 1);
            }
        }
        inner = inner.hstack(&kblock.vstack(&sblock)?)?;
    }
    let delta = TABLE_DELTA[case_id as usize - 1];
    let g = GMatrix::from_parts(inner, k, case_id, delta, f.clone())?;
    if g.n() != a.t_count() + 2 * b.t_count() + delta {
        return Err(Error::Internal(format!("case {case_id}: column accounting is off")));
    }
    g.check_invariants()
        .map_err(|e| Error::Internal(format!("case {case_id}: {e}")))?;
    verify_quasitransversal(&g).map_err(|e| Error::Internal(format!("case {case_id}: {e}")))?;
    Ok(g)
}

/// A target compiled all the way to a protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synthillation {
    pub a: SynthesisResult,
    pub b: MuDecomposition,
    pub g: GMatrix,
}

/// Synthesizes `A` and `B` for `F`, then builds `G`.
pub fn synthillate(f: &WeightedPolynomial, method: Method) -> Result<Synthillation> {
    let a = synthesize(f, method)?;
    let b = mu_decompose(f)?;
    let g = build_g(f, &a.matrix, &b.b)?;
    Ok(Synthillation { a, b, g })
}

fn split_point(z: u64, k: usize, s: usize) -> (String, String) {
    (format_point(z, k), format_point(z >> k, s))
}

fn not_quasi(z: u64, k: usize, s: usize, reason: String) -> Error {
    let (x, y) = split_point(z, k, s);
    Error::NotQuasitransversal { x, y, reason }
}

/// Checks `|K^T x ⊕ S^T y| ∼c F(x)` and returns the witness `F̃`.
pub fn verify_quasitransversal(g: &GMatrix) -> Result<QuasiWitness> {
    verify_quasitransversal_with(g, SWEEP_LIMIT)
}

/// As [`verify_quasitransversal`]; the pointwise sweep runs when `k + s ≤ sweep_limit`.
///
/// The witness always comes from the exact weighted polynomial of
/// `F(x) − |G^T z|`; the sweep recomputes it from point values.
pub fn verify_quasitransversal_with(g: &GMatrix, sweep_limit: usize) -> Result<QuasiWitness> {
    let (k, s) = (g.k, g.s);
    let vars = k + s;
    if vars > crate::polys::MAX_VARS {
        return Err(Error::Limit {
            name: "G rows",
            value: vars,
            limit: crate::polys::MAX_VARS,
        });
    }
    let d = &g.target.widen(vars) - &weighted_from_matrix(&g.inner);
    if vars <= sweep_limit.min(30) {
        let values = sweep_differences(g);
        if let Some(z) = (0..values.len()).find(|&z| values[z] % 2 == 1) {
            return Err(not_quasi(z as u64, k, s, format!("F - |G^T z| = {} is odd", values[z])));
        }
        let Some(fitted) = interpolate(vars, |z| values[z as usize]) else {
            return Err(quasi_failure(&d, k, s));
        };
        if let Some(z) = (0..values.len()).find(|&z| fitted.eval(z as u64) != values[z]) {
            return Err(not_quasi(z as u64, k, s, "difference is not a degree-3 weighted polynomial".into()));
        }
        if fitted != d {
            return Err(Error::Internal("pointwise and algebraic differences disagree".into()));
        }
    }
    match d.halve() {
        Some(f_tilde) => Ok(QuasiWitness { f_tilde }),
        None => Err(quasi_failure(&d, k, s)),
    }
}

fn quasi_failure(d: &WeightedPolynomial, k: usize, s: usize) -> Error {
    match crate::synthesis::equivalence_failure(d) {
        Error::NotEquivalent { x, reason } => {
            let z = x.chars().enumerate().fold(0u64, |acc, (i, c)| acc | ((c == '1') as u64) << i);
            not_quasi(z, k, s, reason)
        }
        other => other,
    }
}

/// `F(x) − |K^T x ⊕ S^T y| mod 8` at every point, by a Gray-code walk.
fn sweep_differences(g: &GMatrix) -> Vec<u8> {
    let vars = g.k + g.s;
    let mut values = vec![0u8; 1 << vars];
    let mut acc = vec![0u64; g.n().div_ceil(64)];
    let mut z = 0u64;
    let xmask = (1u64 << g.k) - 1;
    for step in 0u64..1 << vars {
        if step > 0 {
            let b = step.trailing_zeros() as usize;
            z ^= 1 << b;
            for (a, w) in acc.iter_mut().zip(g.inner.row_words(b)) {
                *a ^= w;
            }
        }
        let weight: u32 = acc.iter().map(|w| w.count_ones()).sum();
        values[z as usize] = ((g.target.eval(z & xmask) as u32 + 8 - weight % 8) % 8) as u8;
    }
    values
}

/// Code distance, exact or certified from below.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distance {
    Exact(usize),
    /// Above the enumeration limit; every `S` column is nonzero.
    AtLeast(usize),
    /// No error passes the checks while corrupting the output.
    Unbounded,
}

impl Distance {
    /// The exact value or the certified lower bound.
    pub fn value(self) -> Option<usize> {
        match self {
            Distance::Exact(d) | Distance::AtLeast(d) => Some(d),
            Distance::Unbounded => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Exact(d) => write!(f, "{d}"),
            Distance::AtLeast(d) => write!(f, ">={d}"),
            Distance::Unbounded => write!(f, "unbounded"),
        }
    }
}

pub fn distance(g: &GMatrix) -> Distance {
    distance_with_limit(g, DISTANCE_LIMIT)
}

/// Smallest `|e|` with `S e = 0` and `K e ≠ 0`.
pub fn distance_with_limit(g: &GMatrix, limit: usize) -> Distance {
    let (k, n) = (g.k, g.n());
    let cols: Vec<Vec<u64>> = (0..n)
        .map(|j| {
            let mut v = vec![0u64; (k + g.s).div_ceil(64)];
            for i in 0..k + g.s {
                if g.inner.bit(i, j) {
                    v[i / 64] |= 1 << (i % 64);
                }
            }
            v
        })
        .collect();
    let logical = |v: &[u64]| (0..k).any(|i| v[i / 64] >> (i % 64) & 1 == 1);
    let checked = |v: &[u64]| (k..k + g.s).all(|i| v[i / 64] >> (i % 64) & 1 == 0);
    if cols.iter().any(|c| checked(c) && logical(c)) {
        return Distance::Exact(1);
    }
    if n > limit {
        return Distance::AtLeast(2);
    }
    let words = (k + g.s).div_ceil(64);
    for w in 2..=n {
        // Lexicographic combinations with prefix sums of the XOR.
        let mut idx: Vec<usize> = (0..w).collect();
        loop {
            let mut acc = vec![0u64; words];
            for &j in &idx {
                for (a, c) in acc.iter_mut().zip(&cols[j]) {
                    *a ^= c;
                }
            }
            if checked(&acc) && logical(&acc) {
                return Distance::Exact(w);
            }
            let mut p = w;
            while p > 0 && idx[p - 1] == n - w + p - 1 {
                p -= 1;
            }
            if p == 0 {
                break;
            }
            idx[p - 1] += 1;
            for q in p..w {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    Distance::Unbounded
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{synthesize_controlled, tau_optimal, tensor_subadditive, MatrixRole};

    fn a_1ccz() -> SynthesisMatrix {
        SynthesisMatrix::new(BitMatrix::parse("1101100\n1011010\n0111001").unwrap(), MatrixRole::A)
    }

    fn ccz() -> WeightedPolynomial {
        WeightedPolynomial::zero(3).with_cubic(0, 1, 2, 1)
    }

    fn empty_b(k: usize) -> SynthesisMatrix {
        SynthesisMatrix::new(BitMatrix::zeros(k, 0), MatrixRole::B)
    }

    fn example4() -> GMatrix {
        build_g(&ccz(), &a_1ccz(), &empty_b(3)).unwrap()
    }

    #[test]
    fn example4_matrix() {
        let g = example4();
        assert_eq!((g.n(), g.case_id(), g.delta(), g.s()), (8, 11, 1, 1));
        let expected = BitMatrix::parse("11011000\n10110100\n01110010\n11111111").unwrap();
        assert_eq!(g.matrix(), &expected);
        let m = g.matrix().complete_to_invertible().unwrap();
        assert_eq!(m.rows(), 4);
        assert_eq!(g.matrix().vstack(&m).unwrap().rank(), 8);
        let w = verify_quasitransversal(&g).unwrap();
        // Triorthogonal: every overlap with the S row is even.
        assert!(w.independent_of_y(3));
        assert_eq!(distance(&g), Distance::Exact(2));
    }

    #[test]
    fn perturbed_code_fails_with_point() {
        let mut g = example4();
        g.flip(0, 0).unwrap();
        match verify_quasitransversal(&g) {
            Err(Error::NotQuasitransversal { x, y, .. }) => {
                assert_eq!((x.len(), y.len()), (3, 1));
            }
            other => panic!("expected failure, got {other:?}"),
        }
        let mut big = example4();
        big.flip(1, 3).unwrap();
        assert!(verify_quasitransversal_with(&big, 0).is_err());
    }

    #[test]
    fn trivial_code() {
        let a = SynthesisMatrix::new(BitMatrix::parse("101\n011").unwrap(), MatrixRole::A);
        let f = WeightedPolynomial::zero(2).with_quadratic(0, 1, 1);
        let g = GMatrix::from_parts(a.matrix().clone(), 2, 9, 0, f).unwrap();
        assert!(verify_quasitransversal(&g).is_ok());
        assert_eq!(distance(&g), Distance::Exact(1));
    }

    #[test]
    fn worked_examples() {
        let two_cs = WeightedPolynomial::zero(4).with_quadratic(0, 1, 1).with_quadratic(2, 3, 1);
        let s = synthillate(&two_cs, Method::Optimal).unwrap();
        assert_eq!((s.g.n(), s.g.case_id()), (18, 6));
        assert_eq!(distance(&s.g), Distance::Exact(2));

        let two_ccz = tensor_subadditive(&a_1ccz(), &a_1ccz()).unwrap();
        let g = build_g(&ccz().direct_sum(&ccz()), &two_ccz, &empty_b(6)).unwrap();
        assert_eq!((g.n(), g.case_id()), (14, 11));

        let hash = synthesize_controlled(&two_cs, 4).unwrap();
        let g = build_g(&crate::synthesis::controlled_target(&two_cs, 4).unwrap(), &hash.matrix, &empty_b(5)).unwrap();
        assert_eq!((g.n(), g.case_id()), (12, 11));
    }

    #[test]
    fn routing_errors() {
        let f = WeightedPolynomial::zero(2).with_quadratic(0, 1, 1);
        let a = tau_optimal(&f).unwrap().matrix;
        assert!(matches!(build_g(&f, &a, &empty_b(2)), Err(Error::Precondition(_))));
        assert!(matches!(build_g(&ccz(), &a_1ccz(), &a), Err(Error::Dimension(_))));
        let wrong = WeightedPolynomial::zero(3).with_linear(0, 1);
        assert!(matches!(build_g(&wrong, &a_1ccz(), &empty_b(3)), Err(Error::Precondition(_))));
        // Rank-deficient A: CCZ on qubits 1,2,3 written on four rows.
        let deficient = SynthesisMatrix::new(a_1ccz().matrix().vstack(&BitMatrix::zeros(1, 7)).unwrap(), MatrixRole::A);
        assert!(matches!(
            build_g(&ccz().widen(4), &deficient, &empty_b(4)),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn padding_block_identity() {
        // The eight padding columns of cases 1-4 contribute 4 Σ c_j x_j y1 y2 up to a Clifford.
        for k in 1..=4usize {
            for c in 0u64..1 << k {
                let (_, blocks) = layout(1);
                let pad: Vec<&(u8, Vec<u8>)> = blocks.iter().filter(|(code, _)| *code >= 2).collect();
                let mut m = BitMatrix::zeros(k + 3, pad.len());
                for (j, (code, pattern)) in pad.iter().enumerate() {
                    for i in 0..k {
                        m.put(i, j, *code == 2 && c >> i & 1 == 1);
                    }
                    for (r, &b) in pattern.iter().enumerate() {
                        m.put(k + r, j, b == 1);
                    }
                }
                let mut expect = WeightedPolynomial::zero(k + 3);
                for j in (0..k).filter(|j| c >> j & 1 == 1) {
                    expect.add_cubic(j, k, k + 1, 1);
                }
                let w = weighted_from_matrix(&m);
                assert!(clifford_equiv(&w, &expect).unwrap(), "k={k} c={c:b}");
                let d = (&w - &expect).halve().unwrap();
                for z in 0u64..1 << (k + 3) {
                    assert_eq!((expect.eval(z) + 2 * d.eval(z)) % 8, w.eval(z));
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let g = example4();
        let text = g.to_string();
        assert!(text.starts_with("G k=3 s=1 n=8 case=11 delta=1\n"));
        assert_eq!(GMatrix::parse(&text).unwrap(), g);
        let no_target = text.split("\ntarget").next().unwrap();
        assert!(GMatrix::parse(no_target).is_err());
        assert_eq!(GMatrix::parse_with_target(no_target, Some(ccz())).unwrap(), g);
        assert!(matches!(GMatrix::parse("G k=3 s=1 n=8 case=11 delta=1\n1101\n"), Err(Error::Parse { .. })));
        assert!(matches!(GMatrix::parse("H\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn printed_g_2cs_is_rejected() {
        let k = "10100000110000110\n01100001100001100\n00010101111011110\n00001110111101110\n";
        let text = format!(
            "G k=4 s=2 n=17 case=6 delta=1\n{k}---\n11111111111000001\n00000011111111111\n"
        );
        let f = WeightedPolynomial::zero(4).with_quadratic(0, 1, 1).with_quadratic(2, 3, 1);
        let g = GMatrix::parse_with_target(&text, Some(f)).unwrap();
        match verify_quasitransversal(&g) {
            Err(Error::NotQuasitransversal { x, .. }) => assert_eq!(x, "0000"),
            other => panic!("printed matrix unexpectedly passed: {other:?}"),
        }
    }

    mod random_cases {
        use super::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        fn random_target(rng: &mut ChaCha8Rng, k: usize, case_id: u8) -> WeightedPolynomial {
            let mut f = WeightedPolynomial::zero(k);
            for i in 0..k {
                let l = rng.gen_range(0..8);
                f.add_linear(i, if case_id <= 4 { l } else { l & !1 });
            }
            if case_id <= 4 && !f.has_odd_linear() {
                f.add_linear(rng.gen_range(0..k), 1);
            }
            for i in 0..k {
                for j in i + 1..k {
                    let q = rng.gen_range(0..4);
                    f.add_quadratic(i, j, if case_id >= 9 { q & !1 } else { q });
                }
            }
            if (5..=8).contains(&case_id) && !f.quadratic_terms().any(|(_, v)| v % 2 == 1) {
                f.add_quadratic(0, 1, 1);
            }
            for i in 0..k {
                for j in i + 1..k {
                    for m in j + 1..k {
                        if rng.gen_bool(0.5) {
                            f.add_cubic(i, j, m, 1);
                        }
                    }
                }
            }
            if case_id >= 9 && f.is_clifford() {
                f.add_cubic(0, 1, 2, 1);
            }
            f
        }

        fn append(m: &SynthesisMatrix, extra: &BitMatrix) -> SynthesisMatrix {
            SynthesisMatrix::new(m.matrix().hstack(extra).unwrap(), m.role())
        }

        // Odd column sets whose weight function is a Clifford (A) or a CCZ (B).
        fn all_points(k: usize) -> BitMatrix {
            BitMatrix::from_columns(k, &(1u64..16).collect::<Vec<_>>()).unwrap()
        }

        fn ccz_columns(k: usize) -> BitMatrix {
            BitMatrix::from_columns(k, &[3, 5, 6, 7, 1, 2, 4]).unwrap()
        }

        // Columns that all meet x1, so the all-ones vector is the first row.
        fn case10_instance(rng: &mut ChaCha8Rng) -> Option<(WeightedPolynomial, SynthesisMatrix, SynthesisMatrix)> {
            let t = 2 * rng.gen_range(2..=8);
            let cols: Vec<u64> = (0..t).map(|_| 1 | rng.gen_range(0..8u64) << 1).collect();
            let a = SynthesisMatrix::from_columns(4, &cols, MatrixRole::A).ok()?;
            let f = a.function();
            if !f.is_pure_cubic_class() || f.is_clifford() || a.matrix().rank() != 4 {
                return None;
            }
            Some((f, a, empty_b(4)))
        }

        fn instance(rng: &mut ChaCha8Rng, case_id: u8) -> Option<(WeightedPolynomial, SynthesisMatrix, SynthesisMatrix)> {
            if case_id == 10 {
                return case10_instance(rng);
            }
            let k = rng.gen_range(3..=4);
            let f = random_target(rng, k, case_id);
            let mut a = tau_optimal(&f).ok()?.matrix;
            let mut b = mu_decompose(&f).ok()?.b;
            let want_a_odd = matches!(case_id, 3 | 4 | 7 | 8 | 11);
            let want_b_odd = matches!(case_id, 2 | 4 | 6 | 8);
            if (a.t_count() % 2 == 1) != want_a_odd {
                if k < 4 {
                    return None;
                }
                a = append(&a, &all_points(k));
            }
            if case_id <= 8 && (b.t_count() % 2 == 1) != want_b_odd {
                b = append(&b, &ccz_columns(k));
            }
            if a.matrix().rank() != k || route_case(&f, &a, &b).ok()? != case_id {
                return None;
            }
            Some((f, a, b))
        }

        #[test]
        fn every_case_on_random_inputs() {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for case_id in 1..=11u8 {
                let mut done = 0;
                let mut tries = 0;
                while done < 50 {
                    tries += 1;
                    assert!(tries < 200_000, "case {case_id}: too few admissible inputs");
                    let Some((f, a, b)) = instance(&mut rng, case_id) else { continue };
                    let g = build_g(&f, &a, &b).unwrap_or_else(|e| panic!("case {case_id}: {e}\n{f:?}"));
                    assert_eq!(g.case_id(), case_id);
                    g.check_invariants().unwrap();
                    verify_quasitransversal(&g).unwrap();
                    assert_eq!(g.n(), a.t_count() + 2 * b.t_count() + TABLE_DELTA[case_id as usize - 1]);
                    let d = distance_with_limit(&g, 64);
                    assert!(d.value().is_none_or(|d| d >= 2), "case {case_id}: distance {d}");
                    done += 1;
                }
            }
        }
    }
}
