//! Gate-synthesis matrices: optimal decoding, fast synthesis, μ, controlled
//! unitaries, subadditive tensor products and circuit emission.
//!
//! A gate-synthesis matrix `A` for `F` has one row per qubit and one column per
//! T gate, with `|A^T x| ∼c F(x)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{lempel_factorize, BitMatrix};
use crate::polys::{
    format_point, mu_equiv, phase_from_weighted, q_matrix, weighted_from_matrix,
    weighted_from_phase, CircuitDescription, Gate, GateKind, PhasePolynomial, WeightedPolynomial,
};

/// Default and maximum variable count for [`tau_optimal`].
pub const TAU_LIMIT: usize = 6;

/// Whether a matrix realizes the full target (`A`) or only its `∼μ` class (`B`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatrixRole {
    A,
    B,
}

/// A binary matrix whose columns are T-gate parities. Zero columns are stripped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SynthesisMatrix {
    inner: BitMatrix,
    role: MatrixRole,
}

impl SynthesisMatrix {
    pub fn new(inner: BitMatrix, role: MatrixRole) -> Self {
        let keep: Vec<usize> = (0..inner.cols()).filter(|&j| !inner.column_is_zero(j)).collect();
        let inner = if keep.len() == inner.cols() {
            inner
        } else {
            inner.select_columns(&keep)
        };
        SynthesisMatrix { inner, role }
    }

    /// Builds from column masks over `k` rows.
    pub fn from_columns(k: usize, columns: &[u64], role: MatrixRole) -> Result<Self> {
        Ok(Self::new(BitMatrix::from_columns(k, columns)?, role))
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> BitMatrix {
        self.inner
    }

    pub fn role(&self) -> MatrixRole {
        self.role
    }

    pub fn qubits(&self) -> usize {
        self.inner.rows()
    }

    pub fn t_count(&self) -> usize {
        self.inner.cols()
    }

    /// The function `|A^T x|` as a weighted polynomial.
    pub fn function(&self) -> WeightedPolynomial {
        weighted_from_matrix(&self.inner)
    }

    pub fn columns(&self) -> Vec<u64> {
        self.inner.columns()
    }

    pub fn has_distinct_columns(&self) -> bool {
        let mut cols = self.columns();
        cols.sort_unstable();
        cols.windows(2).all(|w| w[0] != w[1])
    }
}

impl fmt::Display for SynthesisMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.inner, f)
    }
}

/// A realization of a target: matrix, T-count and the Clifford correction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisResult {
    pub matrix: SynthesisMatrix,
    pub t_count: usize,
    pub optimal: bool,
    /// `F̃` with `|A^T x| = F(x) + 2 F̃(x)`.
    pub clifford_witness: WeightedPolynomial,
}

impl SynthesisResult {
    /// Checks `|A^T x| ∼c target` and records the witness.
    pub fn from_matrix(matrix: SynthesisMatrix, target: &WeightedPolynomial, optimal: bool) -> Result<Self> {
        if matrix.qubits() != target.k() {
            return Err(Error::Dimension(format!(
                "matrix has {} rows for a {}-variable target",
                matrix.qubits(),
                target.k()
            )));
        }
        let diff = &matrix.function() - target;
        let clifford_witness = diff.halve().ok_or_else(|| {
            Error::Internal(format!("matrix is not Clifford-equivalent to {target:?}"))
        })?;
        Ok(SynthesisResult {
            t_count: matrix.t_count(),
            matrix,
            optimal,
            clifford_witness,
        })
    }
}

/// Columns are the parities with odd coefficient in `p`.
pub fn matrix_from_phase(p: &PhasePolynomial) -> SynthesisMatrix {
    SynthesisMatrix::from_columns(p.k(), &p.odd_support(), MatrixRole::A)
        .expect("parities fit the variable count")
}

/// Change of basis `J` with `J A = (A' over 0)` and `A'` of full row rank.
///
/// Independent rows are kept in place and in order, so a full-rank `A` gives
/// `J = I` and `A' = A`.
pub fn reduce_full_rank(a: &SynthesisMatrix) -> Result<(BitMatrix, SynthesisMatrix)> {
    let m = a.matrix();
    let k = m.rows();
    if k > 64 {
        return Err(Error::Limit {
            name: "reduce_full_rank rows",
            value: k,
            limit: 64,
        });
    }
    // Echelon basis of kept rows, each with the combination of original rows it came from.
    let mut basis: Vec<(Vec<u64>, u64)> = Vec::new();
    let mut kept = Vec::new();
    let mut dropped: Vec<(usize, u64)> = Vec::new();
    for i in 0..k {
        let mut v = m.row_words(i).to_vec();
        let mut comb = 1u64 << i;
        for (b, bc) in &basis {
            let lead = lead_bit(b);
            if word_bit(&v, lead) {
                for (x, y) in v.iter_mut().zip(b) {
                    *x ^= y;
                }
                comb ^= bc;
            }
        }
        if v.iter().all(|&w| w == 0) {
            dropped.push((i, comb));
        } else {
            // Keep the basis reduced at the new leading bit.
            let lead = lead_bit(&v);
            for (b, bc) in basis.iter_mut() {
                if word_bit(b, lead) {
                    for (x, y) in b.iter_mut().zip(&v) {
                        *x ^= y;
                    }
                    *bc ^= comb;
                }
            }
            basis.push((v, comb));
            kept.push(i);
        }
    }
    let mut j = BitMatrix::zeros(k, k);
    for (r, &i) in kept.iter().enumerate() {
        j.put(r, i, true);
    }
    for (r, &(_, comb)) in dropped.iter().enumerate() {
        for c in 0..k {
            if comb >> c & 1 == 1 {
                j.put(kept.len() + r, c, true);
            }
        }
    }
    let reduced = SynthesisMatrix::new(m.row_block(0, 0).vstack_rows(m, &kept), a.role());
    Ok((j, reduced))
}

fn lead_bit(v: &[u64]) -> usize {
    for (w, &x) in v.iter().enumerate() {
        if x != 0 {
            return w * 64 + x.trailing_zeros() as usize;
        }
    }
    usize::MAX
}

fn word_bit(v: &[u64], bit: usize) -> bool {
    v[bit / 64] >> (bit % 64) & 1 == 1
}

impl BitMatrix {
    /// Rows `rows` of `src` appended below `self`.
    pub(crate) fn vstack_rows(&self, src: &BitMatrix, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows() + rows.len(), src.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.put(i, j, self.bit(i, j));
            }
        }
        for (r, &i) in rows.iter().enumerate() {
            for j in 0..src.cols() {
                out.put(self.rows() + r, j, src.bit(i, j));
            }
        }
        out
    }
}

/// Generators of the punctured Reed-Muller code `RM(k-4, k)*` as masks over
/// the nonzero points, bit `u-1` for point `u`.
pub fn v2_generators(k: usize) -> Vec<u64> {
    if k < 4 {
        return Vec::new();
    }
    let points = (1u64 << k) - 1;
    let mut gens = Vec::new();
    for mono in 0u64..(1u64 << k) {
        if mono.count_ones() as usize > k - 4 {
            continue;
        }
        let mut v = 0u64;
        for u in 1..=points {
            if u & mono == mono {
                v |= 1 << (u - 1);
            }
        }
        gens.push(v);
    }
    gens
}

fn tie_key(v: u64) -> (u32, u64) {
    (v.count_ones(), v.reverse_bits())
}

/// Minimum T-count by minimum-weight coset decoding.
pub fn tau_optimal(f: &WeightedPolynomial) -> Result<SynthesisResult> {
    tau_optimal_with_limit(f, TAU_LIMIT)
}

/// [`tau_optimal`] with a lower variable-count limit; values above 6 are capped.
pub fn tau_optimal_with_limit(f: &WeightedPolynomial, limit: usize) -> Result<SynthesisResult> {
    let limit = limit.min(TAU_LIMIT);
    let k = f.k();
    if k > limit {
        return Err(Error::Limit {
            name: "tau_optimal variable count (use synthesize_fast)",
            value: k,
            limit,
        });
    }
    let p = phase_from_weighted(f);
    let a = p.odd_support().iter().fold(0u64, |acc, &u| acc | 1 << (u - 1));
    let gens = v2_generators(k);
    let (mut best, mut cur) = (a, a);
    for g in 1u64..(1u64 << gens.len()) {
        cur ^= gens[g.trailing_zeros() as usize];
        if tie_key(cur) < tie_key(best) {
            best = cur;
        }
    }
    let cols: Vec<u64> = (0..64).filter(|b| best >> b & 1 == 1).map(|b| b + 1).collect();
    SynthesisResult::from_matrix(SynthesisMatrix::from_columns(k, &cols, MatrixRole::A)?, f, true)
}

/// A `U = VW` split with `W` a CCZ circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuDecomposition {
    pub mu: usize,
    pub b: SynthesisMatrix,
    /// The purely cubic `F_W`.
    pub cubic_remainder: WeightedPolynomial,
}

/// `μ[U]` and a matrix `B` with `|B^T x| ∼μ F`, via Lempel factorization.
pub fn mu_decompose(f: &WeightedPolynomial) -> Result<MuDecomposition> {
    let b = SynthesisMatrix::new(lempel_factorize(&q_matrix(f))?, MatrixRole::B);
    let fb = b.function();
    if !mu_equiv(&fb, f)? {
        return Err(Error::Internal("Lempel matrix is not μ-equivalent to the target".into()));
    }
    let cubic_remainder = (f - &fb).cubic_part();
    Ok(MuDecomposition {
        mu: b.t_count(),
        b,
        cubic_remainder,
    })
}

/// The `(k²+3k−14)/2` ceiling on [`synthesize_fast`] for `k ≥ 4`.
pub fn fast_bound(k: usize) -> usize {
    (k * k + 3 * k).saturating_sub(14) / 2
}

/// Polynomial-time synthesis by peeling one variable at a time.
pub fn synthesize_fast(f: &WeightedPolynomial) -> Result<SynthesisResult> {
    let k = f.k();
    if k <= 4 {
        return tau_optimal(f);
    }
    let cols = fast_columns(f)?;
    SynthesisResult::from_matrix(SynthesisMatrix::from_columns(k, &cols, MatrixRole::A)?, f, false)
}

fn fast_columns(f: &WeightedPolynomial) -> Result<Vec<u64>> {
    let k = f.k();
    if k <= 4 {
        return Ok(tau_optimal(f)?.matrix.columns());
    }
    let t = k - 1;
    // F = f(x') + x_t (l_t + 2 g(x')).
    let mut g = WeightedPolynomial::zero(t);
    let mut rest = WeightedPolynomial::zero(t);
    for i in 0..t {
        rest.add_linear(i, f.linear(i) as i64);
    }
    for ((i, j), v) in f.quadratic_terms() {
        if j == t {
            g.add_linear(i, v as i64);
        } else {
            rest.add_quadratic(i, j, v as i64);
        }
    }
    for (i, j, m) in f.cubic_terms() {
        if m == t {
            g.add_quadratic(i, j, 1);
        } else {
            rest.add_cubic(i, j, m, 1);
        }
    }
    let b = lempel_factorize(&q_matrix(&g))?;
    let bcols = b.columns();
    let l = (f.linear(t) as usize + bcols.len()) % 2;
    let mut cols: Vec<u64> = bcols.iter().map(|c| c | 1 << t).collect();
    if l == 1 {
        cols.push(1 << t);
    }
    let next = &rest + &weighted_from_matrix(&b);
    cols.extend(fast_columns(&next)?);
    Ok(cols)
}

/// Which synthesis routine to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    Optimal,
    Fast,
    /// Optimal up to [`TAU_LIMIT`] variables, fast beyond.
    #[default]
    Auto,
}

pub fn synthesize(f: &WeightedPolynomial, method: Method) -> Result<SynthesisResult> {
    match method {
        Method::Optimal => tau_optimal(f),
        Method::Fast => synthesize_fast(f),
        Method::Auto if f.k() <= TAU_LIMIT => tau_optimal(f),
        Method::Auto => synthesize_fast(f),
    }
}

fn insert_index(j: usize, control: usize) -> usize {
    if j < control {
        j
    } else {
        j + 1
    }
}

/// `F = 2 x_c g`, with `g`'s variables placed around the control `c`.
pub fn controlled_target(g: &WeightedPolynomial, control: usize) -> Result<WeightedPolynomial> {
    let k = g.k() + 1;
    if control >= k {
        return Err(Error::Precondition(format!("control index {} exceeds {k} qubits", control + 1)));
    }
    let mut f = WeightedPolynomial::zero(k);
    for (j, &v) in g.linear_terms().iter().enumerate() {
        if v != 0 {
            f.add_quadratic(insert_index(j, control), control, v as i64);
        }
    }
    for ((i, j), v) in g.quadratic_terms() {
        f.add_cubic(insert_index(i, control), insert_index(j, control), control, v as i64);
    }
    Ok(f)
}

/// Optimal synthesis of the controlled unitary with `F = 2 x_control g`.
pub fn synthesize_controlled(g: &WeightedPolynomial, control: usize) -> Result<SynthesisResult> {
    let target = controlled_target(g, control)?;
    let k = target.k();
    let bcols: Vec<u64> = mu_decompose(g)?.b.columns();
    let spread = |c: u64| (0..g.k()).filter(|&j| c >> j & 1 == 1).fold(0u64, |acc, j| acc | 1 << insert_index(j, control));
    let ctl = 1u64 << control;
    let mut cols: Vec<u64> = bcols.iter().map(|&c| spread(c) | ctl).collect();
    cols.extend(bcols.iter().map(|&c| spread(c)));
    if bcols.len() % 2 == 1 {
        cols.push(ctl);
    }
    SynthesisResult::from_matrix(SynthesisMatrix::from_columns(k, &cols, MatrixRole::A)?, &target, true)
}

/// Joins a CCZ-only realization with an arbitrary one, saving one T gate.
///
/// Returns `[[A1, 0], [R, A*]]`, where `R` repeats the first column of `A2`
/// and `A*` is `A2` without it.
pub fn tensor_subadditive(a1: &SynthesisMatrix, a2: &SynthesisMatrix) -> Result<SynthesisMatrix> {
    if !a1.function().is_pure_cubic_class() {
        return Err(Error::Precondition("first matrix must realize a CCZ-only circuit".into()));
    }
    if a1.t_count() % 2 == 0 {
        return Err(Error::Precondition(format!(
            "first matrix must have an odd column count, found {}",
            a1.t_count()
        )));
    }
    if a2.t_count() == 0 {
        return Err(Error::Precondition("second matrix has no columns".into()));
    }
    let (m1, m2) = (a1.matrix(), a2.matrix());
    let (k1, c1) = (m1.rows(), m1.cols());
    let mut out = BitMatrix::zeros(k1 + m2.rows(), c1 + m2.cols() - 1);
    for i in 0..k1 {
        for j in 0..c1 {
            out.put(i, j, m1.bit(i, j));
        }
    }
    for i in 0..m2.rows() {
        for j in 0..c1 {
            out.put(k1 + i, j, m2.bit(i, 0));
        }
        for j in 1..m2.cols() {
            out.put(k1 + i, c1 + j - 1, m2.bit(i, j));
        }
    }
    Ok(SynthesisMatrix::new(out, MatrixRole::A))
}

/// A CNOT+T circuit for `A`, followed by the diagonal Clifford correction to `F`.
pub fn emit_circuit(a: &SynthesisMatrix, f: &WeightedPolynomial) -> Result<CircuitDescription> {
    if a.qubits() != f.k() {
        return Err(Error::Dimension(format!("matrix has {} rows, target {} variables", a.qubits(), f.k())));
    }
    let correction = (f - &a.function()).halve().ok_or_else(|| {
        Error::Precondition("matrix is not Clifford-equivalent to the target".into())
    })?;
    let mut circ = CircuitDescription::new(f.k());
    for u in a.columns() {
        let target = u.trailing_zeros() as usize;
        let others: Vec<usize> = (target + 1..f.k()).filter(|&b| u >> b & 1 == 1).collect();
        for &b in &others {
            circ.push(Gate::new(GateKind::CNOT, &[b, target]))?;
        }
        circ.push(Gate::new(GateKind::T, &[target]))?;
        for &b in others.iter().rev() {
            circ.push(Gate::new(GateKind::CNOT, &[b, target]))?;
        }
    }
    // 2F̃: l/2 in Z4 gives S powers, q in Z2 gives CZ.
    for (i, &v) in correction.linear_terms().iter().enumerate() {
        match v % 4 {
            0 => {}
            1 => circ.push(Gate::new(GateKind::S, &[i]))?,
            2 => circ.push(Gate::new(GateKind::Z, &[i]))?,
            _ => circ.push(Gate::new(GateKind::S, &[i]).pow(-1))?,
        }
    }
    for ((i, j), v) in correction.quadratic_terms() {
        if v % 2 == 1 {
            circ.push(Gate::new(GateKind::CZ, &[i, j]))?;
        }
    }
    Ok(circ)
}

/// Exact diagonal action of a CNOT + diagonal circuit.
///
/// Each wire carries a linear form of the inputs; CNOTs update the forms and
/// diagonal gates add parity terms. The circuit must return every wire to its
/// input, otherwise it is not diagonal.
pub fn phase_simulate(circ: &CircuitDescription) -> Result<WeightedPolynomial> {
    let k = circ.k;
    let mut wire: Vec<u64> = (0..k).map(|i| 1u64 << i).collect();
    let mut p = PhasePolynomial::zero(k);
    for g in &circ.gates {
        if g.qubits.iter().any(|&q| q >= k) {
            return Err(Error::Precondition(format!("gate {} addresses a qubit beyond {k}", g.kind.name())));
        }
        let m: Vec<u64> = g.qubits.iter().map(|&q| wire[q]).collect();
        let pw = g.power;
        match g.kind {
            GateKind::CNOT => wire[g.qubits[1]] ^= m[0],
            GateKind::T => p.add_term(m[0], pw),
            GateKind::S => p.add_term(m[0], 2 * pw),
            GateKind::Z => p.add_term(m[0], 4 * pw),
            // 2ab = a + b - (a xor b); CZ is twice that.
            GateKind::CS | GateKind::CZ => {
                let s = if g.kind == GateKind::CS { pw } else { 2 * pw };
                p.add_term(m[0], s);
                p.add_term(m[1], s);
                p.add_term(m[0] ^ m[1], -s);
            }
            GateKind::CCZ => {
                let (a, b, c) = (m[0], m[1], m[2]);
                for u in [a, b, c, a ^ b ^ c] {
                    p.add_term(u, pw);
                }
                for u in [a ^ b, a ^ c, b ^ c] {
                    p.add_term(u, -pw);
                }
            }
        }
    }
    if let Some(q) = (0..k).find(|&i| wire[i] != 1 << i) {
        return Err(Error::Precondition(format!(
            "circuit is not diagonal: wire {} ends as {}",
            q + 1,
            format_point(wire[q], k)
        )));
    }
    Ok(weighted_from_phase(&p))
}

/// Pointwise Clifford-equivalence check returning the first bad point.
pub fn check_equivalence(a: &BitMatrix, f: &WeightedPolynomial) -> Result<WeightedPolynomial> {
    if a.rows() != f.k() {
        return Err(Error::Dimension(format!("matrix has {} rows, target {} variables", a.rows(), f.k())));
    }
    let diff = f - &weighted_from_matrix(a);
    if let Some(w) = diff.halve() {
        return Ok(w);
    }
    Err(equivalence_failure(&diff))
}

/// Locates a point exposing why `d` is not twice a weighted polynomial.
pub(crate) fn equivalence_failure(d: &WeightedPolynomial) -> Error {
    let k = d.k();
    if let Some(i) = (0..k).find(|&i| d.linear(i) % 2 == 1) {
        return Error::NotEquivalent {
            x: format_point(1 << i, k),
            reason: format!("difference {} is odd", d.linear(i)),
        };
    }
    if let Some(((i, j), _)) = d.quadratic_terms().find(|(_, v)| v % 2 == 1) {
        let x = 1u64 << i | 1 << j;
        return Error::NotEquivalent {
            x: format_point(x, k),
            reason: format!("difference {} is not twice a weighted polynomial (odd second difference)", d.eval(x)),
        };
    }
    let (i, j, m) = d.cubic_terms().next().expect("non-Clifford difference has a cubic term");
    let x = 1u64 << i | 1 << j | 1 << m;
    Error::NotEquivalent {
        x: format_point(x, k),
        reason: format!("difference {} leaves a cubic third difference", d.eval(x)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polys::{clifford_equiv, from_circuit};
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn cs() -> WeightedPolynomial {
        WeightedPolynomial::zero(2).with_quadratic(0, 1, 1)
    }

    fn ccz() -> WeightedPolynomial {
        WeightedPolynomial::zero(3).with_cubic(0, 1, 2, 1)
    }

    fn ncs(n: usize) -> WeightedPolynomial {
        (0..n).fold(WeightedPolynomial::zero(2 * n), |f, j| f.with_quadratic(2 * j, 2 * j + 1, 1))
    }

    #[test]
    fn tau_goldens() {
        assert_eq!(tau_optimal(&cs()).unwrap().t_count, 3);
        let tof_star = WeightedPolynomial::zero(3).with_quadratic(0, 1, 3).with_cubic(0, 1, 2, 1);
        assert_eq!(tau_optimal(&tof_star).unwrap().t_count, 4);
        assert_eq!(tau_optimal(&ccz()).unwrap().t_count, 7);
        assert_eq!(tau_optimal(&ncs(2)).unwrap().t_count, 6);
        assert_eq!(tau_optimal(&WeightedPolynomial::zero(3)).unwrap().t_count, 0);
        let wide = WeightedPolynomial::zero(7);
        assert!(matches!(tau_optimal(&wide), Err(Error::Limit { value: 7, limit: 6, .. })));
        assert!(tau_optimal_with_limit(&ncs(2), 3).is_err());
    }

    #[test]
    fn cs_matrix_is_eq30() {
        let r = tau_optimal(&cs()).unwrap();
        assert_eq!(r.matrix.matrix(), &BitMatrix::parse("101\n011").unwrap());
        assert_eq!(matrix_from_phase(&phase_from_weighted(&cs())), r.matrix);
        assert!(r.optimal);
    }

    #[test]
    fn phase_matrices() {
        let even = phase_from_weighted(&cs().scale(2));
        assert_eq!(matrix_from_phase(&even).t_count(), 0);
        let a = matrix_from_phase(&phase_from_weighted(&ccz()));
        assert_eq!(a.t_count(), 7);
        assert!(a.has_distinct_columns());
    }

    #[test]
    fn v2_generator_counts() {
        assert!(v2_generators(3).is_empty());
        assert_eq!(v2_generators(4), vec![(1 << 15) - 1]);
        assert_eq!(v2_generators(5).len(), 6);
        assert_eq!(v2_generators(6).len(), 22);
        // Each generator, read as a column set, realizes a Clifford function.
        for k in 4..=6 {
            for g in v2_generators(k) {
                let cols: Vec<u64> = (0..63).filter(|b| g >> b & 1 == 1).map(|b| b + 1).collect();
                let m = BitMatrix::from_columns(k, &cols).unwrap();
                assert!(weighted_from_matrix(&m).is_clifford());
            }
        }
    }

    // Minimum subset size per Clifford class, over all subsets of nonzero columns.
    // The class of a column set is the XOR of per-column (l, q, c) parity keys.
    fn subset_oracle(k: usize) -> HashMap<u64, u32> {
        let mut index = 0;
        let mut pos = HashMap::new();
        for i in 0..k {
            pos.insert(vec![i], index);
            index += 1;
        }
        for i in 0..k {
            for j in i + 1..k {
                pos.insert(vec![i, j], index);
                index += 1;
                for m in j + 1..k {
                    pos.insert(vec![i, j, m], index);
                    index += 1;
                }
            }
        }
        let col_key = |u: u64| -> u64 {
            let mut key = 0u64;
            for (idx, &b) in &pos {
                if idx.iter().all(|&i| u >> i & 1 == 1) {
                    key |= 1 << b;
                }
            }
            key
        };
        let keys: Vec<u64> = (1u64..1 << k).map(col_key).collect();
        let mut best: HashMap<u64, u32> = HashMap::new();
        let n = keys.len();
        let (mut cur, mut size) = (0u64, 0u32);
        let mut subset = 0u64;
        best.insert(0, 0);
        for g in 1u64..1 << n {
            let b = g.trailing_zeros() as usize;
            subset ^= 1 << b;
            cur ^= keys[b];
            size = if subset >> b & 1 == 1 { size + 1 } else { size - 1 };
            let e = best.entry(cur).or_insert(u32::MAX);
            *e = (*e).min(size);
        }
        best
    }

    fn class_representatives(k: usize) -> Vec<WeightedPolynomial> {
        let mut slots: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
        for i in 0..k {
            for j in i + 1..k {
                slots.push(vec![i, j]);
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                for m in j + 1..k {
                    slots.push(vec![i, j, m]);
                }
            }
        }
        (0u64..1 << slots.len())
            .map(|bits| {
                let mut f = WeightedPolynomial::zero(k);
                for (b, s) in slots.iter().enumerate() {
                    if bits >> b & 1 == 1 {
                        match s.len() {
                            1 => f.add_linear(s[0], 1),
                            2 => f.add_quadratic(s[0], s[1], 1),
                            _ => f.add_cubic(s[0], s[1], s[2], 1),
                        }
                    }
                }
                f
            })
            .collect()
    }

    #[test]
    fn tau_matches_exhaustive_oracle() {
        for k in 1..=4 {
            let oracle = subset_oracle(k);
            let reps = class_representatives(k);
            assert_eq!(oracle.len(), reps.len());
            for f in reps {
                let r = tau_optimal(&f).unwrap();
                // Key of F in the oracle's basis: monomials of F mod 2.
                let mut key = 0u64;
                let mut b = 0;
                for i in 0..k {
                    key |= ((f.linear(i) % 2) as u64) << b;
                    b += 1;
                }
                for i in 0..k {
                    for j in i + 1..k {
                        key |= ((f.quadratic(i, j) % 2) as u64) << b;
                        b += 1;
                        for m in j + 1..k {
                            key |= (f.cubic(i, j, m) as u64) << b;
                            b += 1;
                        }
                    }
                }
                assert_eq!(r.t_count as u32, oracle[&key], "{f:?}");
            }
        }
    }

    #[test]
    fn mu_values() {
        let d = mu_decompose(&ncs(2)).unwrap();
        assert_eq!(d.mu, 5);
        assert!(d.cubic_remainder.is_zero() || d.cubic_remainder.is_pure_cubic_class());
        for n in 1..=5 {
            assert_eq!(mu_decompose(&ncs(n)).unwrap().mu, 2 * n + 1);
        }
        let d = mu_decompose(&ccz()).unwrap();
        assert_eq!(d.mu, 0);
        assert_eq!(d.cubic_remainder, ccz());
    }

    #[test]
    fn mu_never_exceeds_tau() {
        for k in 1..=4 {
            for f in class_representatives(k) {
                let mu = mu_decompose(&f).unwrap();
                assert!(mu.mu <= tau_optimal(&f).unwrap().t_count);
                assert!(mu.mu <= k + 1);
                // F = F_V + 2F̃ + F_W
                let rest = &(&f - &mu.b.function()) - &mu.cubic_remainder;
                assert!(rest.is_clifford());
            }
        }
    }

    #[test]
    fn controlled_examples() {
        let g = WeightedPolynomial::zero(1).with_linear(0, 1);
        let r = synthesize_controlled(&g, 1).unwrap();
        assert_eq!(r.t_count, 3);
        assert!(clifford_equiv(&r.matrix.function(), &cs()).unwrap());
        let tof_hash = synthesize_controlled(&ncs(2), 4).unwrap();
        assert_eq!(tof_hash.t_count, 11);
        for n in 1..=4 {
            assert_eq!(synthesize_controlled(&ncs(n), 2 * n).unwrap().t_count, 4 * n + 3);
        }
        assert!(synthesize_controlled(&g, 2).is_err());
    }

    #[test]
    fn controlled_is_optimal_up_to_four_qubits() {
        for k in 2..=4 {
            for g in class_representatives(k - 1) {
                if g.cubic_terms().next().is_some() {
                    continue;
                }
                for control in 0..k {
                    let r = synthesize_controlled(&g, control).unwrap();
                    let target = controlled_target(&g, control).unwrap();
                    assert_eq!(r.t_count, tau_optimal(&target).unwrap().t_count, "{g:?} control {control}");
                }
            }
        }
    }

    #[test]
    fn subadditive_tensors() {
        let a_ccz = tau_optimal(&ccz()).unwrap().matrix;
        let a_t = SynthesisMatrix::from_columns(1, &[1], MatrixRole::A).unwrap();
        let one = tensor_subadditive(&a_ccz, &a_t).unwrap();
        assert_eq!((one.qubits(), one.t_count()), (4, 7));
        let two = tensor_subadditive(&a_ccz, &a_ccz).unwrap();
        assert_eq!(two.t_count(), 13);
        assert!(clifford_equiv(&two.function(), &ccz().direct_sum(&ccz())).unwrap());
        assert!(matches!(tensor_subadditive(&a_t, &a_ccz), Err(Error::Precondition(_))));
        let even = tau_optimal(&ccz().direct_sum(&WeightedPolynomial::zero(1).with_linear(0, 2))).unwrap().matrix;
        assert!(tensor_subadditive(&even, &a_t).is_ok());
    }

    #[test]
    fn fast_bound_values() {
        assert_eq!(fast_bound(4), 7);
        assert_eq!(fast_bound(5), 13);
        assert_eq!(fast_bound(6), 20);
    }

    #[test]
    fn fast_agrees_at_small_k() {
        for f in class_representatives(3).into_iter().step_by(7) {
            assert_eq!(synthesize_fast(&f).unwrap(), tau_optimal(&f).unwrap());
        }
        assert_eq!(synthesize_fast(&WeightedPolynomial::zero(6)).unwrap().t_count, 0);
    }

    #[test]
    fn reduce_full_rank_examples() {
        let a = SynthesisMatrix::new(BitMatrix::parse("1101\n0111").unwrap(), MatrixRole::A);
        let (j, r) = reduce_full_rank(&a).unwrap();
        assert_eq!(j, BitMatrix::identity(2));
        assert_eq!(r, a);
        let dep = SynthesisMatrix::new(BitMatrix::parse("1100\n0110\n1010").unwrap(), MatrixRole::A);
        let (j, r) = reduce_full_rank(&dep).unwrap();
        assert_eq!(r.qubits(), 2);
        let ja = j.mul(dep.matrix()).unwrap();
        assert_eq!(ja.row_weight(2), 0);
        assert!(j.inverse().is_some());
        let zero_row = SynthesisMatrix::new(BitMatrix::parse("11\n00").unwrap(), MatrixRole::A);
        assert_eq!(reduce_full_rank(&zero_row).unwrap().1.qubits(), 1);
    }

    #[test]
    fn emission_examples() {
        let a = SynthesisMatrix::from_columns(1, &[1], MatrixRole::A).unwrap();
        let x1 = WeightedPolynomial::zero(1).with_linear(0, 1);
        let c = emit_circuit(&a, &x1).unwrap();
        assert_eq!(c.gates, vec![Gate::new(GateKind::T, &[0])]);
        let r = tau_optimal(&cs()).unwrap();
        let c = emit_circuit(&r.matrix, &cs()).unwrap();
        assert_eq!(c.count(GateKind::T), 3);
        assert_eq!(phase_simulate(&c).unwrap(), cs());
        let r = tau_optimal(&ccz()).unwrap();
        let c = emit_circuit(&r.matrix, &ccz()).unwrap();
        assert_eq!(phase_simulate(&c).unwrap(), ccz());
        assert!(emit_circuit(&r.matrix, &cs().widen(3)).is_err());
    }

    #[test]
    fn simulation_examples() {
        assert!(phase_simulate(&CircuitDescription::new(2)).unwrap().is_zero());
        let gadget = CircuitDescription::parse("CNOT 1 2\nT 2\nCNOT 1 2\n").unwrap();
        let f = phase_simulate(&gadget).unwrap();
        for x in 0..4u64 {
            assert_eq!(f.eval(x) as u64, (x & 1) ^ (x >> 1 & 1));
        }
        let open = CircuitDescription::parse("CNOT 1 2\n").unwrap();
        assert!(phase_simulate(&open).is_err());
        let diag = CircuitDescription::parse("CS 1 2\nCCZ 1 2 3^3\nS 3\n").unwrap();
        assert_eq!(phase_simulate(&diag).unwrap(), from_circuit(&diag).unwrap());
    }

    fn arb_poly(k: usize) -> impl Strategy<Value = WeightedPolynomial> {
        (
            proptest::collection::vec(0i64..8, k),
            proptest::collection::vec(0i64..4, k * k),
            proptest::collection::vec(0i64..2, k * k * k),
        )
            .prop_map(move |(l, q, c)| {
                let mut f = WeightedPolynomial::zero(k);
                for i in 0..k {
                    f.add_linear(i, l[i]);
                    for j in i + 1..k {
                        f.add_quadratic(i, j, q[i * k + j]);
                        for m in j + 1..k {
                            f.add_cubic(i, j, m, c[(i * k + j) * k + m]);
                        }
                    }
                }
                f
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn emitted_circuits_round_trip(f in (1usize..=4).prop_flat_map(arb_poly)) {
            let r = tau_optimal(&f).unwrap();
            let c = emit_circuit(&r.matrix, &f).unwrap();
            prop_assert_eq!(c.count(GateKind::T), r.t_count);
            prop_assert_eq!(phase_simulate(&c).unwrap(), f);
        }

        #[test]
        fn fast_synthesis_bound(f in (5usize..=6).prop_flat_map(arb_poly)) {
            let r = synthesize_fast(&f).unwrap();
            prop_assert!(r.t_count <= fast_bound(f.k()));
            let a = r.matrix.columns();
            for x in 0..1u64 << f.k() {
                let direct = a.iter().filter(|&&c| (c & x).count_ones() % 2 == 1).count() as u8;
                let lhs = (direct % 8 + 8 - f.eval(x)) % 8;
                prop_assert_eq!(lhs % 2, 0);
            }
        }

        #[test]
        fn tensor_products_are_equivalent(extra in (1usize..=2).prop_flat_map(arb_poly)) {
            let a1 = tau_optimal(&ccz()).unwrap().matrix;
            let r2 = tau_optimal(&extra).unwrap();
            prop_assume!(r2.t_count > 0);
            let t = tensor_subadditive(&a1, &r2.matrix).unwrap();
            prop_assert_eq!(t.t_count(), 7 + r2.t_count - 1);
            let target = ccz().direct_sum(&extra);
            prop_assert!(clifford_equiv(&t.function(), &target).unwrap());
            let (_, reduced) = reduce_full_rank(&t).unwrap();
            let again = tau_optimal(&reduced.function()).unwrap();
            prop_assert!(again.t_count <= reduced.t_count());
        }
    }
}
