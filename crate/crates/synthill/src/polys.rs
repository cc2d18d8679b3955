//! Weighted polynomials over Z8, phase polynomials, and diagonal circuits.
//!
//! A weighted polynomial is `F(x) = Σ l_i x_i + 2 Σ q_ij x_i x_j + 4 Σ c_ijk x_i x_j x_k (mod 8)`.
//! Coefficients are kept in canonical form: `l` mod 8, `q` mod 4, `c` mod 2.
//! Points `x ∈ Z2^k` are `u64` masks with bit `i` holding `x_i` (0-based).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::error::{parse_err, Error, Result};
use crate::gf2::BitMatrix;

/// Largest variable count a point mask can hold.
pub const MAX_VARS: usize = 64;

pub(crate) fn parity(x: u64) -> u8 {
    (x.count_ones() & 1) as u8
}

fn bits_to_mask(x: &[u8], k: usize) -> Result<u64> {
    if x.len() != k {
        return Err(Error::Dimension(format!("point has {} entries, expected {k}", x.len())));
    }
    let mut m = 0u64;
    for (i, &b) in x.iter().enumerate() {
        match b {
            0 => {}
            1 => m |= 1 << i,
            _ => return Err(Error::Dimension(format!("point entry {i} is {b}, not 0 or 1"))),
        }
    }
    Ok(m)
}

/// Renders a point mask as a 0/1 string, `x_1` first.
pub fn format_point(x: u64, k: usize) -> String {
    (0..k).map(|i| if x >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// The function `F: Z2^k → Z8` of a diagonal third-level gate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeightedPolynomial {
    k: usize,
    l: Vec<u8>,
    q: BTreeMap<(usize, usize), u8>,
    c: BTreeSet<(usize, usize, usize)>,
}

impl WeightedPolynomial {
    /// The zero function on `k` variables.
    ///
    /// # Panics
    ///
    /// Panics if `k > MAX_VARS`.
    pub fn zero(k: usize) -> Self {
        assert!(k <= MAX_VARS, "at most {MAX_VARS} variables");
        WeightedPolynomial {
            k,
            l: vec![0; k],
            q: BTreeMap::new(),
            c: BTreeSet::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.l.iter().all(|&v| v == 0) && self.q.is_empty() && self.c.is_empty()
    }

    pub fn linear(&self, i: usize) -> u8 {
        self.l[i]
    }

    pub fn linear_terms(&self) -> &[u8] {
        &self.l
    }

    /// Quadratic coefficient in Z4; the argument order does not matter.
    pub fn quadratic(&self, i: usize, j: usize) -> u8 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.q.get(&key).copied().unwrap_or(0)
    }

    pub fn quadratic_terms(&self) -> impl Iterator<Item = ((usize, usize), u8)> + '_ {
        self.q.iter().map(|(&k, &v)| (k, v))
    }

    pub fn cubic(&self, i: usize, j: usize, m: usize) -> u8 {
        let mut t = [i, j, m];
        t.sort_unstable();
        self.c.contains(&(t[0], t[1], t[2])) as u8
    }

    pub fn cubic_terms(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.c.iter().copied()
    }

    fn check_index(&self, i: usize) {
        assert!(i < self.k, "variable index {i} out of range for k = {}", self.k);
    }

    /// Adds `v x_i`.
    ///
    /// # Panics
    ///
    /// Panics on an out-of-range index.
    pub fn add_linear(&mut self, i: usize, v: i64) {
        self.check_index(i);
        self.l[i] = (self.l[i] as i64 + v).rem_euclid(8) as u8;
    }

    /// Adds `2 v x_i x_j`.
    ///
    /// # Panics
    ///
    /// Panics on an out-of-range or repeated index.
    pub fn add_quadratic(&mut self, i: usize, j: usize, v: i64) {
        self.check_index(i);
        self.check_index(j);
        assert!(i != j, "quadratic term needs distinct variables");
        let key = if i < j { (i, j) } else { (j, i) };
        let nv = (self.q.get(&key).copied().unwrap_or(0) as i64 + v).rem_euclid(4) as u8;
        if nv == 0 {
            self.q.remove(&key);
        } else {
            self.q.insert(key, nv);
        }
    }

    /// Adds `4 v x_i x_j x_m`.
    ///
    /// # Panics
    ///
    /// Panics on an out-of-range or repeated index.
    pub fn add_cubic(&mut self, i: usize, j: usize, m: usize, v: i64) {
        for t in [i, j, m] {
            self.check_index(t);
        }
        assert!(i != j && j != m && i != m, "cubic term needs distinct variables");
        if v.rem_euclid(2) == 0 {
            return;
        }
        let mut t = [i, j, m];
        t.sort_unstable();
        let key = (t[0], t[1], t[2]);
        if !self.c.remove(&key) {
            self.c.insert(key);
        }
    }

    pub fn with_linear(mut self, i: usize, v: i64) -> Self {
        self.add_linear(i, v);
        self
    }

    pub fn with_quadratic(mut self, i: usize, j: usize, v: i64) -> Self {
        self.add_quadratic(i, j, v);
        self
    }

    pub fn with_cubic(mut self, i: usize, j: usize, m: usize, v: i64) -> Self {
        self.add_cubic(i, j, m, v);
        self
    }

    /// Value at the point mask `x`.
    pub fn eval(&self, x: u64) -> u8 {
        let bit = |i: usize| (x >> i & 1) as u32;
        let mut acc = 0u32;
        for (i, &v) in self.l.iter().enumerate() {
            acc += v as u32 * bit(i);
        }
        for (&(i, j), &v) in &self.q {
            acc += 2 * v as u32 * (bit(i) & bit(j));
        }
        for &(i, j, m) in &self.c {
            acc += 4 * (bit(i) & bit(j) & bit(m));
        }
        (acc % 8) as u8
    }

    /// Value at an explicit 0/1 vector of length `k`.
    pub fn eval_bits(&self, x: &[u8]) -> Result<u8> {
        Ok(self.eval(bits_to_mask(x, self.k)?))
    }

    /// Multiplies every coefficient by `m`.
    pub fn scale(&self, m: i64) -> Self {
        let mut out = WeightedPolynomial::zero(self.k);
        for (i, &v) in self.l.iter().enumerate() {
            out.add_linear(i, v as i64 * m);
        }
        for (&(i, j), &v) in &self.q {
            out.add_quadratic(i, j, v as i64 * m);
        }
        for &(i, j, t) in &self.c {
            out.add_cubic(i, j, t, m);
        }
        out
    }

    /// Renames variable `i` to `map[i]` inside a `k_new`-variable polynomial.
    pub fn embed(&self, k_new: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.k, "embedding map must cover every variable");
        let mut out = WeightedPolynomial::zero(k_new);
        for (i, &v) in self.l.iter().enumerate() {
            out.add_linear(map[i], v as i64);
        }
        for (&(i, j), &v) in &self.q {
            out.add_quadratic(map[i], map[j], v as i64);
        }
        for &(i, j, t) in &self.c {
            out.add_cubic(map[i], map[j], map[t], 1);
        }
        out
    }

    /// Same function with `extra` unused variables appended.
    pub fn widen(&self, k_new: usize) -> Self {
        assert!(k_new >= self.k);
        self.embed(k_new, &(0..self.k).collect::<Vec<_>>())
    }

    /// Disjoint sum `F1(x) + F2(x')` on `k1 + k2` variables.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let k = self.k + other.k;
        self.widen(k) + other.embed(k, &(self.k..k).collect::<Vec<_>>())
    }

    /// `F ∼c 0`: the function is twice a weighted polynomial (a diagonal Clifford).
    pub fn is_clifford(&self) -> bool {
        self.l.iter().all(|v| v % 2 == 0) && self.q.values().all(|v| v % 2 == 0) && self.c.is_empty()
    }

    /// `F ∼c 4C` for some cubic `C`: linear and quadratic parts are Clifford.
    pub fn is_pure_cubic_class(&self) -> bool {
        self.l.iter().all(|v| v % 2 == 0) && self.q.values().all(|v| v % 2 == 0)
    }

    pub fn has_odd_linear(&self) -> bool {
        self.l.iter().any(|v| v % 2 == 1)
    }

    /// Returns `F̃` with `F = 2F̃`, when `F` is Clifford.
    pub fn halve(&self) -> Option<Self> {
        if !self.is_clifford() {
            return None;
        }
        let mut out = WeightedPolynomial::zero(self.k);
        for (i, &v) in self.l.iter().enumerate() {
            out.add_linear(i, v as i64 / 2);
        }
        for (&(i, j), &v) in &self.q {
            out.add_quadratic(i, j, v as i64 / 2);
        }
        Some(out)
    }

    /// The cubic part `4C` alone.
    pub fn cubic_part(&self) -> Self {
        let mut out = WeightedPolynomial::zero(self.k);
        out.c = self.c.clone();
        out
    }

    /// Bitmask of variables that appear in some term.
    pub fn support(&self) -> u64 {
        let mut s = 0u64;
        for (i, &v) in self.l.iter().enumerate() {
            if v != 0 {
                s |= 1 << i;
            }
        }
        for &(i, j) in self.q.keys() {
            s |= 1 << i | 1 << j;
        }
        for &(i, j, m) in &self.c {
            s |= 1 << i | 1 << j | 1 << m;
        }
        s
    }

    pub fn clifford_equiv(&self, other: &Self) -> Result<bool> {
        clifford_equiv(self, other)
    }

    pub fn mu_equiv(&self, other: &Self) -> Result<bool> {
        mu_equiv(self, other)
    }

    /// Parses the polynomial text format (see the crate docs).
    pub fn parse(text: &str) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut terms: Vec<(usize, Vec<usize>, i64)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let no = no + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let arity = match toks[0] {
                "k" => {
                    if toks.len() != 2 {
                        return Err(parse_err(no, "expected `k <count>`"));
                    }
                    let k = parse_usize(toks[1], no)?;
                    if k > MAX_VARS {
                        return Err(parse_err(no, format!("at most {MAX_VARS} variables")));
                    }
                    declared = Some(k);
                    continue;
                }
                "L" => 1,
                "Q" => 2,
                "C" => 3,
                other => return Err(parse_err(no, format!("unknown term kind {other:?}"))),
            };
            if toks.len() != arity + 2 {
                return Err(parse_err(no, format!("`{}` takes {arity} indices and a value", toks[0])));
            }
            let mut idx = Vec::with_capacity(arity);
            for t in &toks[1..=arity] {
                let i = parse_usize(t, no)?;
                if i == 0 || i > MAX_VARS {
                    return Err(parse_err(no, format!("index {i} out of range (indices are 1-based)")));
                }
                if idx.contains(&(i - 1)) {
                    return Err(parse_err(no, format!("repeated index {i}")));
                }
                idx.push(i - 1);
            }
            let v: i64 = toks[arity + 1]
                .parse()
                .map_err(|_| parse_err(no, format!("bad coefficient {:?}", toks[arity + 1])))?;
            terms.push((no, idx, v));
        }
        let needed = terms.iter().flat_map(|(_, idx, _)| idx.iter().map(|i| i + 1)).max().unwrap_or(0);
        let k = match declared {
            Some(k) if k < needed => {
                let line = terms.iter().find(|(_, idx, _)| idx.iter().any(|&i| i >= k)).map_or(0, |t| t.0);
                return Err(parse_err(line, format!("index exceeds declared k = {k}")));
            }
            Some(k) => k,
            None => needed,
        };
        let mut f = WeightedPolynomial::zero(k);
        for (_, idx, v) in terms {
            match idx.len() {
                1 => f.add_linear(idx[0], v),
                2 => f.add_quadratic(idx[0], idx[1], v),
                _ => f.add_cubic(idx[0], idx[1], idx[2], v),
            }
        }
        Ok(f)
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("expected a non-negative integer, found {tok:?}")))
}

impl fmt::Display for WeightedPolynomial {
    /// Text format: a `k` line, then one term per line with 1-based indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k {}", self.k)?;
        for (i, &v) in self.l.iter().enumerate() {
            if v != 0 {
                writeln!(f, "L {} {v}", i + 1)?;
            }
        }
        for (&(i, j), &v) in &self.q {
            writeln!(f, "Q {} {} {v}", i + 1, j + 1)?;
        }
        for &(i, j, m) in &self.c {
            writeln!(f, "C {} {} {} 1", i + 1, j + 1, m + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for WeightedPolynomial {
    /// Algebraic form, e.g. `2x1 + 6x1x2 + 4x1x2x3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &v) in self.l.iter().enumerate() {
            if v != 0 {
                parts.push(format!("{v}x{}", i + 1));
            }
        }
        for (&(i, j), &v) in &self.q {
            parts.push(format!("{}x{}x{}", 2 * v, i + 1, j + 1));
        }
        for &(i, j, m) in &self.c {
            parts.push(format!("4x{}x{}x{}", i + 1, j + 1, m + 1));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "F[k={}]({})", self.k, parts.join(" + "))
    }
}

impl FromStr for WeightedPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WeightedPolynomial::parse(s)
    }
}

impl Add for &WeightedPolynomial {
    type Output = WeightedPolynomial;

    fn add(self, rhs: &WeightedPolynomial) -> WeightedPolynomial {
        assert_eq!(self.k, rhs.k, "variable counts differ");
        let mut out = self.clone();
        for (i, &v) in rhs.l.iter().enumerate() {
            out.add_linear(i, v as i64);
        }
        for (&(i, j), &v) in &rhs.q {
            out.add_quadratic(i, j, v as i64);
        }
        for &(i, j, m) in &rhs.c {
            out.add_cubic(i, j, m, 1);
        }
        out
    }
}

impl Add for WeightedPolynomial {
    type Output = WeightedPolynomial;

    fn add(self, rhs: WeightedPolynomial) -> WeightedPolynomial {
        &self + &rhs
    }
}

impl Neg for &WeightedPolynomial {
    type Output = WeightedPolynomial;

    fn neg(self) -> WeightedPolynomial {
        self.scale(-1)
    }
}

impl Sub for &WeightedPolynomial {
    type Output = WeightedPolynomial;

    fn sub(self, rhs: &WeightedPolynomial) -> WeightedPolynomial {
        self + &(-rhs)
    }
}

impl Sub for WeightedPolynomial {
    type Output = WeightedPolynomial;

    fn sub(self, rhs: WeightedPolynomial) -> WeightedPolynomial {
        &self - &rhs
    }
}

fn same_k(a: &WeightedPolynomial, b: &WeightedPolynomial) -> Result<()> {
    if a.k != b.k {
        return Err(Error::Dimension(format!("variable counts {} and {} differ", a.k, b.k)));
    }
    Ok(())
}

/// `F1 ∼c F2`: all coefficients agree mod 2.
pub fn clifford_equiv(a: &WeightedPolynomial, b: &WeightedPolynomial) -> Result<bool> {
    same_k(a, b)?;
    Ok((a - b).is_clifford())
}

/// `F1 ∼μ F2`: linear and quadratic coefficients agree mod 2; cubic terms ignored.
pub fn mu_equiv(a: &WeightedPolynomial, b: &WeightedPolynomial) -> Result<bool> {
    same_k(a, b)?;
    Ok((a - b).is_pure_cubic_class())
}

pub fn eval_weighted(f: &WeightedPolynomial, x: &[u8]) -> Result<u8> {
    f.eval_bits(x)
}

/// `P_a(x) = Σ_u a_u ⟨x, u⟩ (mod 8)` over nonzero `u`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PhasePolynomial {
    k: usize,
    terms: BTreeMap<u64, u8>,
}

impl PhasePolynomial {
    pub fn zero(k: usize) -> Self {
        assert!(k <= MAX_VARS, "at most {MAX_VARS} variables");
        PhasePolynomial {
            k,
            terms: BTreeMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Adds `a ⟨x, u⟩`.
    ///
    /// # Panics
    ///
    /// Panics if `u` has bits beyond `k`.
    pub fn add_term(&mut self, u: u64, a: i64) {
        assert!(self.k == MAX_VARS || u >> self.k == 0, "parity {u:#b} outside {} variables", self.k);
        if u == 0 {
            return;
        }
        let nv = (self.terms.get(&u).copied().unwrap_or(0) as i64 + a).rem_euclid(8) as u8;
        if nv == 0 {
            self.terms.remove(&u);
        } else {
            self.terms.insert(u, nv);
        }
    }

    pub fn coefficient(&self, u: u64) -> u8 {
        self.terms.get(&u).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, u8)> + '_ {
        self.terms.iter().map(|(&u, &a)| (u, a))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Parities `u` whose coefficient is odd, ascending.
    pub fn odd_support(&self) -> Vec<u64> {
        self.terms.iter().filter(|(_, &a)| a % 2 == 1).map(|(&u, _)| u).collect()
    }

    pub fn eval(&self, x: u64) -> u8 {
        let acc: u32 = self.terms.iter().map(|(&u, &a)| a as u32 * parity(u & x) as u32).sum();
        (acc % 8) as u8
    }

    pub fn eval_bits(&self, x: &[u8]) -> Result<u8> {
        Ok(self.eval(bits_to_mask(x, self.k)?))
    }
}

impl fmt::Debug for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P[k={}]{{", self.k)?;
        for (n, (&u, &a)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{a}", format_point(u, self.k))?;
        }
        write!(f, "}}")
    }
}

pub fn eval_phase(p: &PhasePolynomial, x: &[u8]) -> Result<u8> {
    p.eval_bits(x)
}

/// Phase polynomial with the same values, by inclusion–exclusion per term.
pub fn phase_from_weighted(f: &WeightedPolynomial) -> PhasePolynomial {
    let mut p = PhasePolynomial::zero(f.k);
    for (i, &v) in f.l.iter().enumerate() {
        p.add_term(1 << i, v as i64);
    }
    for (&(i, j), &v) in &f.q {
        let v = v as i64;
        p.add_term(1 << i, v);
        p.add_term(1 << j, v);
        p.add_term(1 << i | 1 << j, -v);
    }
    for &(i, j, m) in &f.c {
        let (a, b, c) = (1u64 << i, 1u64 << j, 1u64 << m);
        for u in [a, b, c, a | b | c] {
            p.add_term(u, 1);
        }
        for u in [a | b, a | c, b | c] {
            p.add_term(u, -1);
        }
    }
    p
}

/// Degree-3 weighted polynomial through the values of `h` by finite differences.
///
/// Returns `None` when the second or third differences are incompatible with
/// the weights 2 and 4. Values away from the weight ≤ 3 points are not
/// inspected; callers confirm the result pointwise where that matters.
pub fn interpolate(k: usize, h: impl Fn(u64) -> u8) -> Option<WeightedPolynomial> {
    let mut f = WeightedPolynomial::zero(k);
    let hv = |x: u64| h(x) as i64;
    for i in 0..k {
        f.add_linear(i, hv(1 << i));
    }
    for i in 0..k {
        for j in i + 1..k {
            let d = (hv(1 << i | 1 << j) - f.l[i] as i64 - f.l[j] as i64).rem_euclid(8);
            if d % 2 != 0 {
                return None;
            }
            f.add_quadratic(i, j, d / 2);
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            for m in j + 1..k {
                let lin = f.l[i] as i64 + f.l[j] as i64 + f.l[m] as i64;
                let quad = 2 * (f.quadratic(i, j) + f.quadratic(i, m) + f.quadratic(j, m)) as i64;
                let d = (hv(1 << i | 1 << j | 1 << m) - lin - quad).rem_euclid(8);
                if d % 4 != 0 {
                    return None;
                }
                f.add_cubic(i, j, m, d / 4);
            }
        }
    }
    Some(f)
}

/// Weighted polynomial with the same values as `p`.
pub fn weighted_from_phase(p: &PhasePolynomial) -> WeightedPolynomial {
    interpolate(p.k, |x| p.eval(x)).expect("phase polynomials always have degree at most 3")
}

/// The function `x ↦ |A^T x| (mod 8)`, one variable per row of `A`.
pub fn weighted_from_matrix(a: &BitMatrix) -> WeightedPolynomial {
    let k = a.rows();
    let mut f = WeightedPolynomial::zero(k);
    let weight = |w: &[u64]| w.iter().map(|x| x.count_ones() as i64).sum::<i64>();
    for i in 0..k {
        f.add_linear(i, a.row_weight(i) as i64);
    }
    let mut wedge = vec![0u64; a.cols().div_ceil(64)];
    for i in 0..k {
        for j in i + 1..k {
            for (w, (x, y)) in wedge.iter_mut().zip(a.row_words(i).iter().zip(a.row_words(j))) {
                *w = x & y;
            }
            let wij = weight(&wedge);
            if wij == 0 {
                continue;
            }
            f.add_quadratic(i, j, -wij);
            for m in j + 1..k {
                let t: i64 = wedge
                    .iter()
                    .zip(a.row_words(m))
                    .map(|(x, y)| (x & y).count_ones() as i64)
                    .sum();
                f.add_cubic(i, j, m, t);
            }
        }
    }
    f
}

/// Symmetric `k×k` matrix: diagonal `l_i mod 2`, off-diagonal `q_ij mod 2`.
pub fn q_matrix(f: &WeightedPolynomial) -> BitMatrix {
    let mut q = BitMatrix::zeros(f.k, f.k);
    for (i, &v) in f.l.iter().enumerate() {
        if v % 2 == 1 {
            q.put(i, i, true);
        }
    }
    for (&(i, j), &v) in &f.q {
        if v % 2 == 1 {
            q.put(i, j, true);
            q.put(j, i, true);
        }
    }
    q
}

/// Gate kinds of the circuit text format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    T,
    S,
    Z,
    CS,
    CZ,
    CCZ,
    CNOT,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::T | GateKind::S | GateKind::Z => 1,
            GateKind::CS | GateKind::CZ | GateKind::CNOT => 2,
            GateKind::CCZ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::T => "T",
            GateKind::S => "S",
            GateKind::Z => "Z",
            GateKind::CS => "CS",
            GateKind::CZ => "CZ",
            GateKind::CCZ => "CCZ",
            GateKind::CNOT => "CNOT",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "T" => GateKind::T,
            "S" => GateKind::S,
            "Z" => GateKind::Z,
            "CS" => GateKind::CS,
            "CZ" => GateKind::CZ,
            "CCZ" => GateKind::CCZ,
            "CNOT" | "CX" => GateKind::CNOT,
            _ => return None,
        })
    }

    /// Z8 weight of the gate's monomial: T→1, S/CS→2, Z/CZ/CCZ→4.
    fn weight(self) -> i64 {
        match self {
            GateKind::T => 1,
            GateKind::S | GateKind::CS => 2,
            GateKind::Z | GateKind::CZ | GateKind::CCZ => 4,
            GateKind::CNOT => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    /// 0-based qubit indices; for CNOT the control comes first.
    pub qubits: Vec<usize>,
    pub power: i64,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Self {
        Gate {
            kind,
            qubits: qubits.to_vec(),
            power: 1,
        }
    }

    pub fn pow(mut self, power: i64) -> Self {
        self.power = power;
        self
    }
}

/// An ordered gate list on `k` qubits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CircuitDescription {
    pub k: usize,
    pub gates: Vec<Gate>,
}

impl CircuitDescription {
    pub fn new(k: usize) -> Self {
        CircuitDescription { k, gates: Vec::new() }
    }

    /// Appends a gate after checking arity and indices.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        validate_gate(&gate, self.k)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    /// Parses one gate per line: `T 1`, `CS 1 2`, `CNOT c t`, with an optional `^p` power.
    pub fn parse(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut gates = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let no = no + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let mut toks: Vec<String> = line.split_whitespace().map(str::to_string).collect();
            if toks[0] == "k" {
                if toks.len() != 2 {
                    return Err(parse_err(no, "expected `k <count>`"));
                }
                declared = Some(parse_usize(&toks[1], no)?);
                continue;
            }
            let mut power = 1i64;
            if let Some(last) = toks.last().cloned() {
                if let Some(pos) = last.find('^') {
                    power = last[pos + 1..]
                        .parse()
                        .map_err(|_| parse_err(no, format!("bad power in {last:?}")))?;
                    let head = last[..pos].to_string();
                    toks.pop();
                    if !head.is_empty() {
                        toks.push(head);
                    }
                }
            }
            let kind = GateKind::from_name(&toks[0])
                .ok_or_else(|| parse_err(no, format!("unknown gate {:?}", toks[0])))?;
            if toks.len() - 1 != kind.arity() {
                return Err(parse_err(no, format!("{} takes {} qubits", kind.name(), kind.arity())));
            }
            let mut qubits = Vec::new();
            for t in &toks[1..] {
                let q = parse_usize(t, no)?;
                if q == 0 {
                    return Err(parse_err(no, "qubit indices are 1-based"));
                }
                qubits.push(q - 1);
            }
            let gate = Gate { kind, qubits, power };
            validate_gate(&gate, MAX_VARS).map_err(|e| parse_err(no, e.to_string()))?;
            gates.push((no, gate));
        }
        let needed = gates.iter().flat_map(|(_, g)| g.qubits.iter().map(|q| q + 1)).max().unwrap_or(0);
        let k = match declared {
            Some(k) if k < needed => return Err(parse_err(0, format!("qubit index exceeds declared k = {k}"))),
            Some(k) => k,
            None => needed,
        };
        Ok(CircuitDescription {
            k,
            gates: gates.into_iter().map(|(_, g)| g).collect(),
        })
    }
}

fn validate_gate(g: &Gate, k: usize) -> Result<()> {
    if g.qubits.len() != g.kind.arity() {
        return Err(Error::Precondition(format!("{} takes {} qubits", g.kind.name(), g.kind.arity())));
    }
    for (n, &q) in g.qubits.iter().enumerate() {
        if q >= k {
            return Err(Error::Precondition(format!("qubit {} out of range for {k} qubits", q + 1)));
        }
        if g.qubits[..n].contains(&q) {
            return Err(Error::Precondition(format!("qubit {} repeated in {}", q + 1, g.kind.name())));
        }
    }
    Ok(())
}

impl fmt::Display for CircuitDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k {}", self.k)?;
        for g in &self.gates {
            write!(f, "{}", g.kind.name())?;
            for q in &g.qubits {
                write!(f, " {}", q + 1)?;
            }
            if g.power != 1 {
                write!(f, "^{}", g.power)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for CircuitDescription {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CircuitDescription::parse(s)
    }
}

/// Weighted polynomial of a diagonal circuit: the sum of its gates' monomials.
pub fn from_circuit(circ: &CircuitDescription) -> Result<WeightedPolynomial> {
    let mut f = WeightedPolynomial::zero(circ.k);
    for g in &circ.gates {
        validate_gate(g, circ.k)?;
        let v = g.kind.weight() * g.power;
        match g.kind {
            GateKind::CNOT => {
                return Err(Error::Precondition(
                    "CNOT has no diagonal semantics; use phase_simulate for emitted circuits".into(),
                ))
            }
            GateKind::T | GateKind::S | GateKind::Z => f.add_linear(g.qubits[0], v),
            GateKind::CS | GateKind::CZ => f.add_quadratic(g.qubits[0], g.qubits[1], v / 2),
            GateKind::CCZ => f.add_cubic(g.qubits[0], g.qubits[1], g.qubits[2], v / 4),
        }
    }
    Ok(f)
}

/// True when every non-comment line starts with a polynomial term keyword.
pub fn looks_like_polynomial(text: &str) -> bool {
    text.lines()
        .map(strip_comment)
        .filter(|l| !l.is_empty())
        .all(|l| matches!(l.split_whitespace().next(), Some("L" | "Q" | "C" | "k")))
}

/// Reads either format, deciding by the first tokens.
pub fn parse_target(text: &str) -> Result<WeightedPolynomial> {
    if looks_like_polynomial(text) {
        WeightedPolynomial::parse(text)
    } else {
        from_circuit(&CircuitDescription::parse(text)?)
    }
}
