//! Graded submodules of T(L) stored as per-degree canonical bases.
//!
//! Degree-d vectors have length rank^d, indexed by words in lexicographic
//! order. Over a field a component is its reduced row echelon basis, over ℤ
//! the row-style Hermite normal form of the lattice.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{kron, Engine, IntegerEngine, PrimeEngine, RationalEngine};
use crate::operators::{random_to_top_word, tn_prime_word};
use crate::scalars::{RingSpec, Scalar};
use crate::tensor::{Tensor, Word};

/// Largest number of coordinates allowed in one degree by default.
pub const DEFAULT_CAP: usize = 4096;

macro_rules! dispatch {
    ($ring:expr, $e:ident => $body:expr) => {
        match $ring {
            RingSpec::Rational => {
                let $e = &RationalEngine;
                $body
            }
            RingSpec::Integer => {
                let $e = &IntegerEngine;
                $body
            }
            RingSpec::PrimeField(p) => {
                let $e = &PrimeEngine::new(p);
                $body
            }
        }
    };
}

fn size_of(rank: usize, degree: usize) -> u128 {
    u32::try_from(degree)
        .ok()
        .and_then(|d| (rank as u128).checked_pow(d))
        .unwrap_or(u128::MAX)
}

/// Fails with `TooLarge` when `rank^degree` exceeds `cap`.
pub fn check_size(rank: usize, degree: usize, cap: usize) -> Result<()> {
    let size = size_of(rank, degree);
    if size > cap as u128 {
        Err(Error::TooLarge { size, cap })
    } else {
        Ok(())
    }
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 {
        Err(Error::InvalidArgument("rank must be at least 1".into()))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSpan {
    rank: usize,
    ring: RingSpec,
    max_degree: usize,
    components: Vec<Vec<Vec<Scalar>>>,
}

impl GradedSpan {
    pub fn zero(rank: usize, ring: RingSpec, max_degree: usize) -> Result<GradedSpan> {
        check_rank(rank)?;
        check_size(rank, max_degree, DEFAULT_CAP)?;
        Ok(GradedSpan { rank, ring, max_degree, components: vec![Vec::new(); max_degree + 1] })
    }

    /// The span of the unit 1 in degree 0.
    pub fn unit(rank: usize, ring: RingSpec, max_degree: usize) -> Result<GradedSpan> {
        let mut s = GradedSpan::zero(rank, ring, max_degree)?;
        s.components[0] = vec![vec![ring.one()]];
        Ok(s)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Canonical basis of the degree-`d` component; empty above `max_degree`.
    pub fn component(&self, d: usize) -> &[Vec<Scalar>] {
        self.components.get(d).map_or(&[], Vec::as_slice)
    }

    /// Dimension (lattice rank over ℤ) of the degree-`d` component.
    pub fn dim(&self, d: usize) -> usize {
        self.component(d).len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    /// Basis of the degree-`d` component as tensors.
    pub fn basis(&self, d: usize) -> Vec<Tensor> {
        self.component(d)
            .iter()
            .map(|v| Tensor::from_coordinates(self.rank, self.ring, d, v))
            .collect()
    }

    /// Same components, cut off or padded with zero components.
    pub fn with_max_degree(&self, max_degree: usize) -> Result<GradedSpan> {
        check_size(self.rank, max_degree, DEFAULT_CAP)?;
        let mut components = self.components.clone();
        components.resize(max_degree + 1, Vec::new());
        Ok(GradedSpan { max_degree, components, ..*self })
    }

    fn canonical(&self, rows: Vec<Vec<Scalar>>) -> Vec<Vec<Scalar>> {
        if rows.is_empty() {
            return rows;
        }
        dispatch!(self.ring, e => e.store_all(&e.canonicalize(e.load_all(&rows))))
    }

    fn compatible(&self, other: &GradedSpan) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::IncompatibleSpans(format!("ranks {} and {}", self.rank, other.rank)));
        }
        if self.ring != other.ring {
            return Err(Error::IncompatibleSpans(format!("rings {} and {}", self.ring, other.ring)));
        }
        Ok(())
    }

    fn same_shape(&self, other: &GradedSpan) -> Result<()> {
        self.compatible(other)?;
        if self.max_degree != other.max_degree {
            return Err(Error::IncompatibleSpans(format!(
                "max degrees {} and {}",
                self.max_degree, other.max_degree
            )));
        }
        Ok(())
    }
}

/// Span of the graded components of `ts`, truncated at nothing: every
/// component must have degree at most `max_degree`.
pub fn span_from_tensors(
    rank: usize,
    ring: RingSpec,
    ts: &[Tensor],
    max_degree: usize,
) -> Result<GradedSpan> {
    let mut span = GradedSpan::zero(rank, ring, max_degree)?;
    let mut rows: Vec<Vec<Vec<Scalar>>> = vec![Vec::new(); max_degree + 1];
    for t in ts {
        if t.rank() != rank {
            return Err(Error::MixedRanks);
        }
        if t.ring() != ring {
            return Err(Error::MixedRings);
        }
        for (d, _) in t.components() {
            if d > max_degree {
                return Err(Error::DegreeOutOfRange { degree: d, max_degree });
            }
            rows[d].push(t.coordinates(d));
        }
    }
    for (d, r) in rows.into_iter().enumerate() {
        span.components[d] = span.canonical(r);
    }
    Ok(span)
}

/// Whether every graded component of `t` lies in `s` (integer coefficients over ℤ).
pub fn span_contains(s: &GradedSpan, t: &Tensor) -> Result<bool> {
    if t.rank() != s.rank {
        return Err(Error::RankMismatch(s.rank, t.rank()));
    }
    if t.ring() != s.ring {
        return Err(Error::RingMismatch(s.ring.to_string(), t.ring().to_string()));
    }
    for (d, _) in t.components() {
        if d > s.max_degree {
            return Err(Error::DegreeOutOfRange { degree: d, max_degree: s.max_degree });
        }
    }
    Ok(t.components()
        .iter()
        .all(|(d, _)| contains_vector(s, *d, &t.coordinates(*d))))
}

fn contains_vector(s: &GradedSpan, d: usize, v: &[Scalar]) -> bool {
    contains_all(s, d, std::slice::from_ref(&v.to_vec()))
}

/// Whether every vector of `vs` lies in the degree-`d` component of `s`.
fn contains_all(s: &GradedSpan, d: usize, vs: &[Vec<Scalar>]) -> bool {
    let vs: Vec<&Vec<Scalar>> = vs.iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
    if vs.is_empty() {
        return true;
    }
    dispatch!(s.ring, e => {
        let basis = e.load_all(s.component(d));
        vs.iter().all(|v| e.contains(&basis, &e.load(v)))
    })
}

pub fn span_equal(a: &GradedSpan, b: &GradedSpan) -> Result<bool> {
    a.same_shape(b)?;
    Ok(a.components == b.components)
}

/// Per-degree test of `inner ⊆ outer` for degrees `0..=max_degree` of `inner`.
pub fn inclusion_by_degree(inner: &GradedSpan, outer: &GradedSpan) -> Result<Vec<bool>> {
    inner.compatible(outer)?;
    if outer.max_degree < inner.max_degree {
        return Err(Error::IncompatibleSpans(format!(
            "max degrees {} and {}",
            inner.max_degree, outer.max_degree
        )));
    }
    Ok((0..=inner.max_degree)
        .map(|d| contains_all(outer, d, inner.component(d)))
        .collect())
}

/// Whether `inner ⊆ outer` in every degree.
pub fn span_includes(outer: &GradedSpan, inner: &GradedSpan) -> Result<bool> {
    Ok(inclusion_by_degree(inner, outer)?.into_iter().all(|b| b))
}

pub fn span_sum(a: &GradedSpan, b: &GradedSpan) -> Result<GradedSpan> {
    a.same_shape(b)?;
    let mut out = a.clone();
    for d in 0..=a.max_degree {
        if b.components[d].is_empty() {
            continue;
        }
        let mut rows = a.components[d].clone();
        rows.extend(b.components[d].iter().cloned());
        out.components[d] = a.canonical(rows);
    }
    Ok(out)
}

/// Products (or brackets) of basis vectors of `a_i` and `b_{d-i}` for all `i`,
/// canonicalized.
fn pair_component(a: &GradedSpan, b: &GradedSpan, d: usize, bracket: Option<bool>) -> Vec<Vec<Scalar>> {
    dispatch!(a.ring, e => {
        let mut rows = Vec::new();
        for i in 0..=d {
            let j = d - i;
            if a.component(i).is_empty() || b.component(j).is_empty() {
                continue;
            }
            let xs = e.load_all(a.component(i));
            let ys = e.load_all(b.component(j));
            for x in &xs {
                for y in &ys {
                    let xy = kron(e, x, y);
                    match bracket {
                        None => rows.push(xy),
                        Some(signed) => {
                            let yx = kron(e, y, x);
                            let add = signed && i * j % 2 == 1;
                            rows.push(
                                xy.iter()
                                    .zip(&yx)
                                    .map(|(p, q)| if add { e.add(p, q) } else { e.sub(p, q) })
                                    .collect(),
                            );
                        }
                    }
                }
            }
        }
        if rows.is_empty() {
            Vec::new()
        } else {
            e.store_all(&e.canonicalize(rows))
        }
    })
}

fn check_truncation(a: &GradedSpan, b: &GradedSpan, max_degree: usize) -> Result<()> {
    a.compatible(b)?;
    let known = a.max_degree.min(b.max_degree);
    if max_degree > known {
        return Err(Error::DegreeOutOfRange { degree: max_degree, max_degree: known });
    }
    Ok(())
}

/// The product submodule `a·b` up to `max_degree`.
pub fn span_product(a: &GradedSpan, b: &GradedSpan, max_degree: usize) -> Result<GradedSpan> {
    check_truncation(a, b, max_degree)?;
    let mut out = GradedSpan::zero(a.rank, a.ring, max_degree)?;
    out.components = (0..=max_degree)
        .into_par_iter()
        .map(|d| pair_component(a, b, d, None))
        .collect();
    Ok(out)
}

/// Span of `[x, y]_s` (signed) or `[x, y]` (unsigned) for `x ∈ a`, `y ∈ b`.
pub fn bracket_span(a: &GradedSpan, b: &GradedSpan, signed: bool, max_degree: usize) -> Result<GradedSpan> {
    check_truncation(a, b, max_degree)?;
    let mut out = GradedSpan::zero(a.rank, a.ring, max_degree)?;
    out.components = (0..=max_degree)
        .into_par_iter()
        .map(|d| pair_component(a, b, d, Some(signed)))
        .collect();
    Ok(out)
}

/// L itself: all of degree 1.
pub fn module_span(rank: usize, ring: RingSpec, max_degree: usize) -> Result<GradedSpan> {
    let mut s = GradedSpan::zero(rank, ring, max_degree)?;
    if max_degree >= 1 {
        s.components[1] = (0..rank)
            .map(|i| (0..rank).map(|j| if i == j { ring.one() } else { ring.zero() }).collect())
            .collect();
    }
    Ok(s)
}

/// The tower `L_1 = L`, `L_{i+1} = [L, L_i]` with the signed or plain
/// commutator; entry `i - 1` holds `L_i`.
pub fn build_lie_components(
    rank: usize,
    ring: RingSpec,
    signed: bool,
    max_degree: usize,
) -> Result<Vec<GradedSpan>> {
    if max_degree == 0 {
        return Err(Error::InvalidArgument("max degree must be at least 1".into()));
    }
    let l = module_span(rank, ring, max_degree)?;
    let mut tower = vec![l.clone()];
    for i in 1..max_degree {
        let mut next = GradedSpan::zero(rank, ring, max_degree)?;
        next.components[i + 1] = pair_component(&l, &tower[i - 1], i + 1, Some(signed));
        tower.push(next);
    }
    Ok(tower)
}

/// `L_2 + L_3 + ⋯` up to `max_degree`.
pub fn build_gbar(rank: usize, ring: RingSpec, signed: bool, max_degree: usize) -> Result<GradedSpan> {
    let mut out = GradedSpan::zero(rank, ring, max_degree)?;
    if max_degree >= 2 {
        for (i, li) in build_lie_components(rank, ring, signed, max_degree)?.into_iter().enumerate().skip(1) {
            out.components[i + 1] = li.components[i + 1].clone();
        }
    }
    Ok(out)
}

/// `Σ_{i ≥ from} L′_i` (unsigned tower) up to `max_degree`.
pub fn build_lie_tail(rank: usize, ring: RingSpec, from: usize, max_degree: usize) -> Result<GradedSpan> {
    let mut out = GradedSpan::zero(rank, ring, max_degree)?;
    if max_degree >= 1 {
        for (i, li) in build_lie_components(rank, ring, false, max_degree)?.into_iter().enumerate() {
            if i + 1 >= from {
                out.components[i + 1] = li.components[i + 1].clone();
            }
        }
    }
    Ok(out)
}

/// Span of `x^power` over all `x ∈ L`, placed in a span truncated at `max_degree`.
///
/// Generated by `x = Σ c_i e_i` with `c_i ≥ 0` and `Σ c_i ≤ power`: Newton
/// interpolation writes every value of the degree-`power` polynomial map
/// `x ↦ x^power` at an integer point as an integer combination of its values
/// at these points, so the generated span is the same over ℤ, ℚ and F_p.
pub fn build_squares_span(rank: usize, ring: RingSpec, power: usize, max_degree: usize) -> Result<GradedSpan> {
    if power < 2 {
        return Err(Error::InvalidArgument("power must be at least 2".into()));
    }
    check_rank(rank)?;
    let mut out = GradedSpan::zero(rank, ring, max_degree)?;
    if power > max_degree {
        return Ok(out);
    }
    let mut rows = Vec::new();
    let mut c = vec![0usize; rank];
    loop {
        if c.iter().any(|&x| x > 0) {
            let terms = c.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, &x)| {
                (Word::from_letters(vec![i as u32 + 1]), Scalar::from_int(ring, x as i64))
            });
            let x = Tensor::from_terms(rank, ring, terms)?;
            rows.push(x.pow(power as u32).coordinates(power));
        }
        // next point of the simplex Σ c_i ≤ power
        let mut i = 0;
        loop {
            if i == rank {
                out.components[power] = out.canonical(rows);
                return Ok(out);
            }
            c[i] += 1;
            if c.iter().sum::<usize>() <= power {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

/// Span of the symmetric tensors: in each degree, the orbit sums of words
/// under permutations of positions.
pub fn build_symmetric_span(rank: usize, ring: RingSpec, max_degree: usize) -> Result<GradedSpan> {
    let mut out = GradedSpan::zero(rank, ring, max_degree)?;
    for d in 0..=max_degree {
        let mut orbits: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
        for (idx, w) in Word::all(rank, d).enumerate() {
            let mut content = w.letters().to_vec();
            content.sort_unstable();
            orbits.entry(content).or_default().push(idx);
        }
        let size = size_of(rank, d) as usize;
        let rows = orbits
            .into_values()
            .map(|idxs| {
                let mut v = vec![ring.zero(); size];
                for i in idxs {
                    v[i] = ring.one();
                }
                v
            })
            .collect();
        out.components[d] = out.canonical(rows);
    }
    Ok(out)
}

/// The subalgebra generated by `generators`, up to `max_degree`:
/// `C_0 = span{1}` and `C_d = Σ_{e=1}^{d} generators_e · C_{d-e}`.
pub fn subalgebra_closure(generators: &GradedSpan, max_degree: usize) -> Result<GradedSpan> {
    if !generators.component(0).is_empty() {
        return Err(Error::GeneratorsInDegreeZero);
    }
    if max_degree > generators.max_degree {
        return Err(Error::DegreeOutOfRange { degree: max_degree, max_degree: generators.max_degree });
    }
    let mut out = GradedSpan::unit(generators.rank, generators.ring, max_degree)?;
    for d in 1..=max_degree {
        // a span holding C_0..C_{d-1} so pair_component sees every factor
        out.components[d] = pair_component(generators, &out, d, None);
    }
    Ok(out)
}

/// Which graded operator a matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum OperatorKind {
    T,
    TPrime,
    TNPrime(usize),
}

impl std::fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OperatorKind::T => write!(f, "t"),
            OperatorKind::TPrime => write!(f, "t-prime"),
            OperatorKind::TNPrime(n) => write!(f, "tN-prime({n})"),
        }
    }
}

/// Matrix of an operator on `L^{⊗degree}`; column `j` is the image of the
/// `j`-th word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorMatrix {
    op: OperatorKind,
    rank: usize,
    ring: RingSpec,
    degree: usize,
    entries: Vec<Vec<i64>>,
}

pub fn operator_matrix(op: OperatorKind, rank: usize, ring: RingSpec, degree: usize) -> Result<OperatorMatrix> {
    operator_matrix_capped(op, rank, ring, degree, DEFAULT_CAP)
}

pub fn operator_matrix_capped(
    op: OperatorKind,
    rank: usize,
    ring: RingSpec,
    degree: usize,
    cap: usize,
) -> Result<OperatorMatrix> {
    check_rank(rank)?;
    check_size(rank, degree, cap)?;
    if let OperatorKind::TNPrime(0) = op {
        return Err(Error::BadN(0));
    }
    let size = size_of(rank, degree) as usize;
    let mut entries = vec![vec![0i64; size]; size];
    for (j, w) in Word::all(rank, degree).enumerate() {
        let mut emit = |image: Word, c: i64| entries[image.index(rank)][j] += c;
        match op {
            OperatorKind::T => random_to_top_word(&w, true, &mut emit),
            OperatorKind::TPrime => random_to_top_word(&w, false, &mut emit),
            OperatorKind::TNPrime(n) => tn_prime_word(&w, n, &mut emit),
        }
    }
    Ok(OperatorMatrix { op, rank, ring, degree, entries })
}

impl OperatorMatrix {
    pub fn op(&self) -> OperatorKind {
        self.op
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of rows, equal to the number of columns.
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        Scalar::from_int(self.ring, self.entries[i][j])
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|&x| Scalar::from_int(self.ring, x)).collect())
            .collect()
    }

    /// Header-free row-major CSV with exact scalar literals.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn kernel_rows(mats: &[&OperatorMatrix]) -> Vec<Vec<Scalar>> {
    let first = mats[0];
    let size = first.size();
    dispatch!(first.ring, e => {
        let rows: Vec<_> = mats
            .iter()
            .flat_map(|m| m.entries.iter())
            .filter(|r| r.iter().any(|&x| x != 0))
            .map(|r| r.iter().map(|&x| e.from_i64(x)).collect::<Vec<_>>())
            .collect();
        e.store_all(&e.kernel(&rows, size))
    })
}

/// Kernel of `m`, as a span concentrated in degree `m.degree()`.
pub fn matrix_kernel(m: &OperatorMatrix) -> Result<GradedSpan> {
    joint_kernel(std::slice::from_ref(m))
}

/// Common kernel of several matrices of the same shape.
pub fn joint_kernel(mats: &[OperatorMatrix]) -> Result<GradedSpan> {
    let Some(first) = mats.first() else {
        return Err(Error::InvalidArgument("no matrices given".into()));
    };
    for m in mats {
        if (m.rank, m.ring, m.degree) != (first.rank, first.ring, first.degree) {
            return Err(Error::IncompatibleSpans("matrices of different shapes".into()));
        }
    }
    let mut out = GradedSpan::zero(first.rank, first.ring, first.degree)?;
    let refs: Vec<&OperatorMatrix> = mats.iter().collect();
    out.components[first.degree] = kernel_rows(&refs);
    Ok(out)
}

/// `∩_{op ∈ ops} Ker op` in every degree up to `max_degree`.
pub fn kernel_span(ops: &[OperatorKind], rank: usize, ring: RingSpec, max_degree: usize) -> Result<GradedSpan> {
    let mut out = GradedSpan::zero(rank, ring, max_degree)?;
    let components: Result<Vec<_>> = (0..=max_degree)
        .into_par_iter()
        .map(|d| {
            let mats = ops
                .iter()
                .map(|&op| operator_matrix(op, rank, ring, d))
                .collect::<Result<Vec<_>>>()?;
            Ok(kernel_rows(&mats.iter().collect::<Vec<_>>()))
        })
        .collect();
    out.components = components?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{apply_t, apply_t_prime, apply_tn_prime};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const QQ: RingSpec = RingSpec::Rational;
    const ZZ: RingSpec = RingSpec::Integer;

    fn fp(p: u64) -> RingSpec {
        RingSpec::prime_field(p).unwrap()
    }

    fn t(rank: usize, ring: RingSpec, s: &str) -> Tensor {
        Tensor::parse(s, rank, ring).unwrap()
    }

    fn span(rank: usize, ring: RingSpec, ts: &[&str], max: usize) -> GradedSpan {
        let ts: Vec<Tensor> = ts.iter().map(|s| t(rank, ring, s)).collect();
        span_from_tensors(rank, ring, &ts, max).unwrap()
    }

    /// Rank of integer vectors over ℚ by plain fraction Gaussian elimination.
    fn oracle_rank(vectors: &[Vec<i64>]) -> usize {
        let mut m: Vec<Vec<BigRational>> = vectors
            .iter()
            .map(|v| v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
            .collect();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank && !m[r][c].is_zero() {
                    let f = &m[r][c] / &m[rank][c];
                    let pivot = m[rank].clone();
                    for (x, y) in m[r].iter_mut().zip(&pivot) {
                        *x -= &f * y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn coords_i64(x: &Tensor, d: usize) -> Vec<i64> {
        x.coordinates(d)
            .iter()
            .map(|s| i64::try_from(s.to_bigint().unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn span_from_tensors_examples() {
        let s = span(2, QQ, &["[1,2] - [2,1]"], 2);
        assert_eq!(s.dims(), vec![0, 0, 1]);
        assert_eq!(span_from_tensors(2, QQ, &[], 2).unwrap().dims(), vec![0, 0, 0]);
        let s = span(1, ZZ, &["2*[1]", "3*[1]"], 1);
        assert_eq!(s, span(1, ZZ, &["[1]"], 1));
        let other = Tensor::parse("[1]", 3, QQ).unwrap();
        assert_eq!(span_from_tensors(2, QQ, &[other], 1), Err(Error::MixedRanks));
        let other = Tensor::parse("[1]", 2, ZZ).unwrap();
        assert_eq!(span_from_tensors(2, QQ, &[other], 1), Err(Error::MixedRings));
    }

    #[test]
    fn contains_examples() {
        let p = build_squares_span(2, QQ, 2, 2).unwrap();
        assert!(span_contains(&p, &t(2, QQ, "[1,2] + [2,1]")).unwrap());
        assert!(!span_contains(&p, &t(2, QQ, "[1,2]")).unwrap());
        // oracle: adding [1,2] to the 3 generators raises the rank
        let gens: Vec<Vec<i64>> = vec![vec![1, 0, 0, 0], vec![0, 0, 0, 1], vec![1, 1, 1, 1]];
        let mut with = gens.clone();
        with.push(vec![0, 1, 0, 0]);
        assert_eq!(oracle_rank(&gens) + 1, oracle_rank(&with));

        let z = span(1, ZZ, &["2*[1]"], 1);
        assert!(!span_contains(&z, &t(1, ZZ, "[1]")).unwrap());
        let q = span(1, QQ, &["2*[1]"], 1);
        assert!(span_contains(&q, &t(1, QQ, "[1]")).unwrap());
        assert!(matches!(
            span_contains(&q, &t(1, QQ, "[1,1]")),
            Err(Error::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn equality_examples() {
        let a = span(2, QQ, &["[1,2] + 3*[2,2]", "[1]"], 2);
        assert!(span_equal(&a, &a).unwrap());
        assert!(span_equal(&span(1, QQ, &["[1]"], 1), &span(1, QQ, &["2*[1]"], 1)).unwrap());
        assert!(!span_equal(&span(1, ZZ, &["[1]"], 1), &span(1, ZZ, &["2*[1]"], 1)).unwrap());
        assert!(!span_equal(&span(2, QQ, &["[1,2]"], 2), &span(2, QQ, &["[2,1]"], 2)).unwrap());
        assert!(span_equal(&span(2, QQ, &[], 1), &span(2, QQ, &[], 2)).is_err());
    }

    #[test]
    fn sum_examples() {
        let a = span(2, QQ, &["[1,2] - [2,1]", "[1] + [2]"], 2);
        let zero = GradedSpan::zero(2, QQ, 2).unwrap();
        assert_eq!(span_sum(&a, &zero).unwrap(), a);
        assert_eq!(span_sum(&a, &a).unwrap(), a);
        let g2 = bracket_span(&module_span(2, QQ, 2).unwrap(), &module_span(2, QQ, 2).unwrap(), true, 2).unwrap();
        let p = build_squares_span(2, QQ, 2, 2).unwrap();
        assert_eq!(span_sum(&g2, &p).unwrap().dim(2), 3);
        let oracle = vec![
            vec![2, 0, 0, 0],
            vec![0, 1, 1, 0],
            vec![0, 0, 0, 2],
            vec![1, 0, 0, 0],
            vec![0, 0, 0, 1],
        ];
        assert_eq!(oracle_rank(&oracle), 3);
    }

    #[test]
    fn product_examples() {
        let a = span(2, QQ, &["[1,2] - [2,1]", "[1] + 2*[2]"], 3);
        let one = GradedSpan::unit(2, QQ, 3).unwrap();
        assert_eq!(span_product(&one, &a, 3).unwrap(), a);
        let x = span(2, QQ, &["[1]"], 2);
        let y = span(2, QQ, &["[2]"], 2);
        assert_eq!(span_product(&x, &y, 2).unwrap(), span(2, QQ, &["[1,2]"], 2));

        let p = build_squares_span(2, QQ, 2, 4).unwrap();
        let pp = span_product(&p, &p, 4).unwrap();
        let squares: Vec<Tensor> = p.basis(2);
        let mut vectors = Vec::new();
        for u in &squares {
            for v in &squares {
                let w = u * v;
                let lcm = w.terms().map(|(_, c)| match c {
                    Scalar::Rational(q) => q.denom().clone(),
                    _ => unreachable!(),
                });
                let l = lcm.fold(BigInt::one(), |a, b| num_integer::Integer::lcm(&a, &b));
                let scaled = w.scale(&Scalar::from_bigint(QQ, &l));
                vectors.push(coords_i64(&scaled, 4));
            }
        }
        assert_eq!(oracle_rank(&vectors), 9);
        assert_eq!(pp.dim(4), 9);
    }

    #[test]
    fn bracket_examples() {
        let l = module_span(2, QQ, 2).unwrap();
        assert_eq!(bracket_span(&l, &l, true, 2).unwrap().dim(2), 3);
        assert_eq!(bracket_span(&l, &l, false, 2).unwrap().dim(2), 1);
        let l2 = module_span(2, fp(2), 2).unwrap();
        assert_eq!(bracket_span(&l2, &l2, true, 2).unwrap().dim(2), 1);
        assert_eq!(oracle_rank(&[vec![2, 0, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 0, 2]]), 3);
    }

    fn witt(rank: i64, d: i64) -> i64 {
        fn mobius(mut n: i64) -> i64 {
            let mut m = 1;
            let mut p = 2;
            while p * p <= n {
                if n % p == 0 {
                    n /= p;
                    if n % p == 0 {
                        return 0;
                    }
                    m = -m;
                }
                p += 1;
            }
            if n > 1 {
                m = -m;
            }
            m
        }
        (1..=d).filter(|e| d % e == 0).map(|e| mobius(d / e) * rank.pow(e as u32)).sum::<i64>() / d
    }

    #[test]
    fn lie_towers() {
        let tower = build_lie_components(2, QQ, false, 5).unwrap();
        assert_eq!(tower[0].dim(1), 2);
        for (i, li) in tower.iter().enumerate() {
            let d = i + 1;
            assert_eq!(li.dim(d) as i64, witt(2, d as i64));
            assert_eq!(li.dims().iter().sum::<usize>(), li.dim(d));
        }
        assert_eq!(tower[1].dim(2), 1);
        assert_eq!(tower[2].dim(3), 2);
        let signed = build_lie_components(2, QQ, true, 3).unwrap();
        assert_eq!(signed[1].dim(2), 3);
        // direct construction of L′_3: [e_i, [e_j, e_k]]
        let mut vectors = Vec::new();
        for i in 1..=2 {
            for j in 1..=2 {
                for k in 1..=2 {
                    let g = |x: u32| Tensor::generator(2, ZZ, x).unwrap();
                    let inner = crate::operators::comm(&g(j), &g(k)).unwrap();
                    let outer = crate::operators::comm(&g(i), &inner).unwrap();
                    vectors.push(coords_i64(&outer, 3));
                }
            }
        }
        assert_eq!(oracle_rank(&vectors), 2);
    }

    #[test]
    fn squares_examples() {
        let p = build_squares_span(2, QQ, 2, 2).unwrap();
        assert_eq!(p.dim(2), 3);
        assert_eq!(
            p,
            span(2, QQ, &["[1,1]", "[2,2]", "[1,1] + [1,2] + [2,1] + [2,2]"], 2)
        );
        let p3 = build_squares_span(1, fp(3), 3, 3).unwrap();
        assert_eq!(p3, span(1, fp(3), &["[1,1,1]"], 3));
        assert_eq!(build_squares_span(2, QQ, 3, 2).unwrap().dims(), vec![0, 0, 0]);
    }

    #[test]
    fn cube_of_a_difference_needs_more_than_subset_sums() {
        // (e1 - e2)^3 over F_3 is not a combination of cubes of 0/1 vectors
        let ring = fp(3);
        let subset = span(2, ring, &["[1,1,1]", "[2,2,2]"], 3);
        let sum = Tensor::parse("[1] + [2]", 2, ring).unwrap().pow(3);
        let subset = span_sum(&subset, &span_from_tensors(2, ring, &[sum], 3).unwrap()).unwrap();
        let x = Tensor::parse("[1] - [2]", 2, ring).unwrap().pow(3);
        assert!(!span_contains(&subset, &x).unwrap());
        assert!(span_contains(&build_squares_span(2, ring, 3, 3).unwrap(), &x).unwrap());
    }

    #[test]
    fn random_powers_lie_in_squares_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for ring in [QQ, ZZ, fp(2), fp(3), fp(5)] {
            for rank in 1..=3 {
                for power in 2..=4 {
                    let p = build_squares_span(rank, ring, power, power).unwrap();
                    for _ in 0..20 {
                        let terms = (1..=rank as u32).map(|i| {
                            (Word::from_letters(vec![i]), Scalar::from_int(ring, rng.gen_range(-9..=9)))
                        });
                        let x = Tensor::from_terms(rank, ring, terms).unwrap();
                        assert!(span_contains(&p, &x.pow(power as u32)).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn closure_examples() {
        let g = build_gbar(2, QQ, true, 3).unwrap();
        let h = span_sum(&g, &build_squares_span(2, QQ, 2, 3).unwrap()).unwrap();
        let c = subalgebra_closure(&h, 3).unwrap();
        assert_eq!(c.dim(0), 1);
        assert_eq!(c.dim(2), 3);
        let gp = build_gbar(2, QQ, false, 3).unwrap();
        assert_eq!(subalgebra_closure(&gp, 3).unwrap().dim(1), 0);
        let bad = GradedSpan::unit(2, QQ, 2).unwrap();
        assert_eq!(subalgebra_closure(&bad, 2), Err(Error::GeneratorsInDegreeZero));
    }

    #[test]
    fn closure_contains_products_of_generators() {
        let g = build_gbar(2, QQ, false, 4).unwrap();
        let c = subalgebra_closure(&g, 4).unwrap();
        let x = t(2, QQ, "[1,2] - [2,1]");
        assert!(span_contains(&c, &(&x * &x)).unwrap());
    }

    #[test]
    fn operator_matrix_examples() {
        let m = operator_matrix(OperatorKind::T, 2, QQ, 1).unwrap();
        assert_eq!(m.to_csv(), "1,0\n0,1\n");
        let m = operator_matrix(OperatorKind::T, 2, QQ, 2).unwrap();
        assert_eq!(m.to_csv(), "0,0,0,0\n0,1,-1,0\n0,-1,1,0\n0,0,0,0\n");
        for k in 0..6 {
            let m = operator_matrix(OperatorKind::TPrime, 1, QQ, k).unwrap();
            assert_eq!(m.to_csv(), format!("{k}\n"));
        }
        assert_eq!(operator_matrix(OperatorKind::TPrime, 1, fp(3), 3).unwrap().to_csv(), "0\n");
        assert!(matches!(
            operator_matrix(OperatorKind::T, 2, QQ, 20),
            Err(Error::TooLarge { .. })
        ));
        assert_eq!(operator_matrix(OperatorKind::TNPrime(0), 2, QQ, 2), Err(Error::BadN(0)));
    }

    #[test]
    fn kernel_examples() {
        let k = matrix_kernel(&operator_matrix(OperatorKind::T, 2, QQ, 2).unwrap()).unwrap();
        assert_eq!(k, span(2, QQ, &["[1,1]", "[2,2]", "[1,2] + [2,1]"], 2));
        let k = matrix_kernel(&operator_matrix(OperatorKind::TPrime, 2, QQ, 2).unwrap()).unwrap();
        assert_eq!(k, span(2, QQ, &["[1,2] - [2,1]"], 2));
        let k = matrix_kernel(&operator_matrix(OperatorKind::TPrime, 2, fp(2), 2).unwrap()).unwrap();
        assert_eq!(k.dim(2), 3);
        let k = matrix_kernel(&operator_matrix(OperatorKind::T, 3, ZZ, 1).unwrap()).unwrap();
        assert_eq!(k.dim(1), 0);
        let k = kernel_span(&[OperatorKind::T], 2, QQ, 3).unwrap();
        assert_eq!(k.dims(), vec![1, 0, 3, 2]);
    }

    #[test]
    fn canonical_form_is_basis_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ring in [QQ, ZZ, fp(2), fp(5)] {
            for _ in 0..20 {
                let rank = rng.gen_range(1..=3);
                let d = rng.gen_range(1..=3);
                let words: Vec<Word> = Word::all(rank, d).collect();
                let gens: Vec<Tensor> = (0..rng.gen_range(1..=4))
                    .map(|_| {
                        let terms: Vec<_> = (0..3)
                            .map(|_| {
                                let w = words[rng.gen_range(0..words.len())].clone();
                                (w, Scalar::from_int(ring, rng.gen_range(-4..=4)))
                            })
                            .collect();
                        Tensor::from_terms(rank, ring, terms).unwrap()
                    })
                    .collect();
                // unimodular recombination: add integer multiples of others, permute
                let mut mixed = gens.clone();
                for _ in 0..6 {
                    let i = rng.gen_range(0..mixed.len());
                    let j = rng.gen_range(0..mixed.len());
                    if i != j {
                        let c = rng.gen_range(-3..=3);
                        mixed[i] = &mixed[i] + &mixed[j].scale_int(c);
                    }
                }
                mixed.reverse();
                assert_eq!(
                    span_from_tensors(rank, ring, &gens, d).unwrap(),
                    span_from_tensors(rank, ring, &mixed, d).unwrap()
                );
            }
        }
    }

    #[test]
    fn kernels_are_correct_and_complete() {
        for ring in [QQ, ZZ, fp(2), fp(3)] {
            for (rank, max) in [(1, 4), (2, 4), (3, 3)] {
                for op in [OperatorKind::T, OperatorKind::TPrime, OperatorKind::TNPrime(2)] {
                    for d in 0..=max {
                        let m = operator_matrix(op, rank, ring, d).unwrap();
                        let k = matrix_kernel(&m).unwrap();
                        for v in k.basis(d) {
                            let image = match op {
                                OperatorKind::T => apply_t(&v),
                                OperatorKind::TPrime => apply_t_prime(&v),
                                OperatorKind::TNPrime(n) => apply_tn_prime(&v, n).unwrap(),
                            };
                            assert!(image.is_zero());
                        }
                        if ring.is_field() {
                            // rank of the matrix via its row span
                            let rows: Vec<Tensor> = m
                                .rows()
                                .iter()
                                .map(|r| Tensor::from_coordinates(rank, ring, d, r))
                                .collect();
                            let row_span = span_from_tensors(rank, ring, &rows, d).unwrap();
                            assert_eq!(k.dim(d) + row_span.dim(d), m.size());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn integer_kernels_are_saturated() {
        for (rank, max) in [(2, 5), (3, 3)] {
            for op in [OperatorKind::T, OperatorKind::TPrime] {
                let k = kernel_span(&[op], rank, ZZ, max).unwrap();
                let q = kernel_span(&[op], rank, QQ, max).unwrap();
                for d in 0..=max {
                    assert_eq!(k.dim(d), q.dim(d));
                    for v in k.basis(d) {
                        for prime in [2, 3, 5, 7] {
                            let divisible = v.terms().all(|(_, c)| {
                                (c.to_bigint().unwrap() % BigInt::from(prime)).is_zero()
                            });
                            if divisible {
                                let mut scaled = Tensor::zero(rank, ZZ);
                                for (w, c) in v.terms() {
                                    let c = c.to_bigint().unwrap() / BigInt::from(prime);
                                    scaled = &scaled
                                        + &Tensor::from_terms(rank, ZZ, [(w.clone(), Scalar::from_bigint(ZZ, &c))])
                                            .unwrap();
                                }
                                assert!(span_contains(&k, &scaled).unwrap());
                            }
                        }
                    }
                    // saturation: rational kernel vectors with integer coordinates lie in the lattice
                    for v in q.basis(d) {
                        let den = v.terms().fold(BigInt::one(), |l, (_, c)| match c {
                            Scalar::Rational(r) => num_integer::Integer::lcm(&l, r.denom()),
                            _ => unreachable!(),
                        });
                        let terms = v.terms().map(|(w, c)| match c {
                            Scalar::Rational(r) => {
                                (w.clone(), Scalar::from_bigint(ZZ, &(r.numer() * (&den / r.denom()))))
                            }
                            _ => unreachable!(),
                        });
                        let iv = Tensor::from_terms(rank, ZZ, terms).unwrap();
                        assert!(span_contains(&k, &iv).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn symmetric_span_dimensions() {
        let s = build_symmetric_span(2, QQ, 4).unwrap();
        assert_eq!(s.dims(), vec![1, 2, 3, 4, 5]);
        let s = build_symmetric_span(3, QQ, 3).unwrap();
        assert_eq!(s.dims(), vec![1, 3, 6, 10]);
    }

    #[test]
    fn inclusion_reports_each_degree() {
        let l = module_span(2, QQ, 3).unwrap();
        let all = span_sum(&l, &build_gbar(2, QQ, true, 3).unwrap()).unwrap();
        assert_eq!(inclusion_by_degree(&l, &all).unwrap(), vec![true; 4]);
        assert_eq!(inclusion_by_degree(&all, &l).unwrap(), vec![true, true, false, false]);
        assert!(span_includes(&all, &l).unwrap());
    }
}
