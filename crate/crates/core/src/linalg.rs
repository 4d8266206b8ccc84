//! Dense exact linear algebra behind graded spans.
//!
//! Three engines share one interface: residues mod p (reduced row echelon
//! form), rationals carried as primitive integer rows (fraction-free
//! elimination, canonical form equivalent to RREF), and integers (row-style
//! Hermite normal form). Pivots always sit on the lowest-index nonzero
//! coordinate of a row.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::{Integer, ExtendedGcd};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalars::{Prime, Scalar};

pub(crate) trait Engine: Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Converts a row of ring scalars into a row spanning the same line/ray.
    fn load(&self, row: &[Scalar]) -> Vec<Self::Elem>;
    /// Converts a canonical row back into ring scalars.
    fn store(&self, row: &[Self::Elem]) -> Vec<Scalar>;

    /// Canonical basis (RREF or HNF) of the span of `rows`, zero rows dropped.
    fn canonicalize(&self, rows: Vec<Vec<Self::Elem>>) -> Vec<Vec<Self::Elem>>;
    /// Membership of `v` in the span of an already canonical basis.
    fn contains(&self, basis: &[Vec<Self::Elem>], v: &[Self::Elem]) -> bool;
    /// Canonical basis of `{v : Mv = 0}` where `rows` are the rows of M.
    fn kernel(&self, rows: &[Vec<Self::Elem>], ncols: usize) -> Vec<Vec<Self::Elem>>;

    fn load_all(&self, rows: &[Vec<Scalar>]) -> Vec<Vec<Self::Elem>> {
        rows.iter().map(|r| self.load(r)).collect()
    }

    fn store_all(&self, rows: &[Vec<Self::Elem>]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| self.store(r)).collect()
    }
}

/// Coordinates of `u ⊗ v` in lexicographic word order.
pub(crate) fn kron<E: Engine>(e: &E, u: &[E::Elem], v: &[E::Elem]) -> Vec<E::Elem> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        if e.is_zero(a) {
            out.extend(std::iter::repeat_n(e.zero(), v.len()));
        } else {
            out.extend(v.iter().map(|b| e.mul(a, b)));
        }
    }
    out
}

// ---------------------------------------------------------------- F_p

pub(crate) struct PrimeEngine {
    prime: Prime,
    p: u64,
}

impl PrimeEngine {
    pub(crate) fn new(prime: Prime) -> Self {
        PrimeEngine { prime, p: prime.get() as u64 }
    }

    fn inv(&self, a: u64) -> u64 {
        crate::scalars::mod_pow(a, self.p - 2, self.p)
    }

    fn rref(&self, mut rows: Vec<Vec<u64>>) -> (Vec<Vec<u64>>, Vec<usize>) {
        rows.retain(|r| r.iter().any(|&x| x != 0));
        let ncols = rows.first().map_or(0, Vec::len);
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..ncols {
            if top == rows.len() {
                break;
            }
            let Some(found) = (top..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(top, found);
            let inv = self.inv(rows[top][col]);
            for x in rows[top][col..].iter_mut() {
                *x = *x * inv % self.p;
            }
            let pivot_row = rows[top].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == top || row[col] == 0 {
                    continue;
                }
                let f = row[col];
                for (x, &y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x = (*x + self.p - f * y % self.p) % self.p;
                }
            }
            pivots.push(col);
            top += 1;
        }
        rows.truncate(top);
        (rows, pivots)
    }
}

impl Engine for PrimeEngine {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }

    fn load(&self, row: &[Scalar]) -> Vec<u64> {
        row.iter()
            .map(|s| match s {
                Scalar::Residue { value, .. } => *value as u64,
                other => panic!("expected a residue, got {other:?}"),
            })
            .collect()
    }

    fn store(&self, row: &[u64]) -> Vec<Scalar> {
        row.iter()
            .map(|&v| Scalar::Residue { value: v as u32, prime: self.prime })
            .collect()
    }

    fn canonicalize(&self, rows: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
        self.rref(rows).0
    }

    fn contains(&self, basis: &[Vec<u64>], v: &[u64]) -> bool {
        let mut v = v.to_vec();
        for row in basis {
            let pc = row.iter().position(|&x| x != 0).expect("nonzero basis row");
            let f = v[pc];
            if f != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = (*x + self.p - f * y % self.p) % self.p;
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    fn kernel(&self, rows: &[Vec<u64>], ncols: usize) -> Vec<Vec<u64>> {
        let (r, pivots) = self.rref(rows.to_vec());
        let mut is_pivot = vec![false; ncols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let basis = (0..ncols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![0u64; ncols];
                v[f] = 1;
                for (row, &pc) in r.iter().zip(&pivots) {
                    v[pc] = (self.p - row[f]) % self.p;
                }
                v
            })
            .collect();
        self.canonicalize(basis)
    }
}

// ------------------------------------------------------- integer helpers

fn first_nonzero(v: &[BigInt], limit: usize) -> Option<usize> {
    v[..limit].iter().position(|x| !x.is_zero())
}

fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divides out the content and makes the leading entry positive.
fn make_primitive(v: &mut [BigInt]) {
    let g = content(v);
    if g.is_zero() {
        return;
    }
    let negate = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    if !g.is_one() || negate {
        let g = if negate { -g } else { g };
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// `v ← a·v − b·row`.
fn combine(v: &mut [BigInt], a: &BigInt, b: &BigInt, row: &[BigInt]) {
    for (x, y) in v.iter_mut().zip(row) {
        let scaled = if a.is_one() { x.clone() } else { &*x * a };
        *x = if y.is_zero() { scaled } else { scaled - b * y };
    }
}

/// `v ← v − q·row`.
fn sub_multiple(v: &mut [BigInt], q: &BigInt, row: &[BigInt]) {
    if q.is_zero() {
        return;
    }
    for (x, y) in v.iter_mut().zip(row) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn bigint_of(s: &Scalar) -> BigInt {
    match s {
        Scalar::Integer(n) => n.clone(),
        other => panic!("expected an integer, got {other:?}"),
    }
}

// ---------------------------------------------------------------- ℚ

/// Rationals handled as primitive integer rows; the canonical form is the
/// RREF with each row scaled to a primitive integer vector.
pub(crate) struct RationalEngine;

impl RationalEngine {
    /// Primitive RREF of `rows` together with the pivot columns.
    fn echelon(&self, rows: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
        let mut basis: BTreeMap<usize, Vec<BigInt>> = BTreeMap::new();
        for mut v in rows {
            let n = v.len();
            make_primitive(&mut v);
            for (&pc, row) in &basis {
                if !v[pc].is_zero() {
                    let b = v[pc].clone();
                    combine(&mut v, &row[pc], &b, row);
                    make_primitive(&mut v);
                }
            }
            if let Some(pc) = first_nonzero(&v, n) {
                basis.insert(pc, v);
            }
        }
        let pivots: Vec<usize> = basis.keys().copied().collect();
        let mut rows: Vec<Vec<BigInt>> = basis.into_values().collect();
        for j in 0..rows.len() {
            let pc = pivots[j];
            let (above, rest) = rows.split_at_mut(j);
            let pivot_row = &rest[0];
            for row in above.iter_mut() {
                if !row[pc].is_zero() {
                    let b = row[pc].clone();
                    combine(row, &pivot_row[pc], &b, pivot_row);
                    make_primitive(row);
                }
            }
        }
        (rows, pivots)
    }
}

impl Engine for RationalEngine {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn from_i64(&self, n: i64) -> BigInt {
        BigInt::from(n)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn load(&self, row: &[Scalar]) -> Vec<BigInt> {
        let qs: Vec<&BigRational> = row
            .iter()
            .map(|s| match s {
                Scalar::Rational(q) => q,
                other => panic!("expected a rational, got {other:?}"),
            })
            .collect();
        let lcm = qs.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        qs.iter()
            .map(|q| q.numer() * (&lcm / q.denom()))
            .collect()
    }

    fn store(&self, row: &[BigInt]) -> Vec<Scalar> {
        let pivot = row.iter().find(|x| !x.is_zero()).cloned().unwrap_or_else(BigInt::one);
        row.iter()
            .map(|x| Scalar::Rational(BigRational::new(x.clone(), pivot.clone())))
            .collect()
    }

    fn canonicalize(&self, rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
        self.echelon(rows).0
    }

    fn contains(&self, basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
        let mut v = v.to_vec();
        make_primitive(&mut v);
        for row in basis {
            let pc = first_nonzero(row, row.len()).expect("nonzero basis row");
            if !v[pc].is_zero() {
                let b = v[pc].clone();
                combine(&mut v, &row[pc], &b, row);
                make_primitive(&mut v);
            }
        }
        v.iter().all(Zero::is_zero)
    }

    fn kernel(&self, rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
        let (r, pivots) = self.echelon(rows.to_vec());
        let lcm = r
            .iter()
            .zip(&pivots)
            .fold(BigInt::one(), |l, (row, &pc)| l.lcm(&row[pc]));
        let mut is_pivot = vec![false; ncols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let basis = (0..ncols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![BigInt::zero(); ncols];
                v[f] = lcm.clone();
                for (row, &pc) in r.iter().zip(&pivots) {
                    if !row[f].is_zero() {
                        v[pc] = -(&row[f] * (&lcm / &row[pc]));
                    }
                }
                v
            })
            .collect();
        self.canonicalize(basis)
    }
}

// ---------------------------------------------------------------- ℤ

/// Lattices in ℤ^n with row-style Hermite normal form: positive pivots,
/// entries above each pivot reduced into `[0, pivot)`.
pub(crate) struct IntegerEngine;

/// Echelon basis keyed by pivot column, built with unimodular row operations
/// on the first `limit` coordinates. Rows whose first `limit` coordinates
/// vanish are returned separately.
struct UnimodularEchelon {
    limit: usize,
    rows: BTreeMap<usize, Vec<BigInt>>,
}

impl UnimodularEchelon {
    fn new(limit: usize) -> Self {
        UnimodularEchelon { limit, rows: BTreeMap::new() }
    }

    /// Inserts `v`; returns what is left of it once its leading part is zero.
    fn insert(&mut self, mut v: Vec<BigInt>) -> Option<Vec<BigInt>> {
        loop {
            let Some(c) = first_nonzero(&v, self.limit) else {
                return Some(v);
            };
            let Some(r) = self.rows.get_mut(&c) else {
                if v[c].is_negative() {
                    v.iter_mut().for_each(|x| *x = -&*x);
                }
                self.rows.insert(c, v);
                return None;
            };
            let a = r[c].clone();
            let b = v[c].clone();
            let (q, rem) = b.div_rem(&a);
            if rem.is_zero() {
                sub_multiple(&mut v, &q, r);
                continue;
            }
            // [r; v] ← [[s, t], [-b/g, a/g]] · [r; v], determinant 1
            let ExtendedGcd { gcd, x: s, y: t, .. } = a.extended_gcd(&b);
            let ag = &a / &gcd;
            let bg = &b / &gcd;
            let new_r: Vec<BigInt> = r.iter().zip(&v).map(|(x, y)| &s * x + &t * y).collect();
            let new_v: Vec<BigInt> = r.iter().zip(&v).map(|(x, y)| &ag * y - &bg * x).collect();
            *r = new_r;
            if r[c].is_negative() {
                r.iter_mut().for_each(|x| *x = -&*x);
            }
            v = new_v;
        }
    }

    fn into_hnf(self) -> Vec<Vec<BigInt>> {
        let pivots: Vec<usize> = self.rows.keys().copied().collect();
        let mut rows: Vec<Vec<BigInt>> = self.rows.into_values().collect();
        for j in 0..rows.len() {
            let pc = pivots[j];
            let (above, rest) = rows.split_at_mut(j);
            let pivot_row = &rest[0];
            for row in above.iter_mut() {
                let q = row[pc].div_floor(&pivot_row[pc]);
                sub_multiple(row, &q, pivot_row);
            }
        }
        rows
    }
}

impl Engine for IntegerEngine {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn from_i64(&self, n: i64) -> BigInt {
        BigInt::from(n)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn load(&self, row: &[Scalar]) -> Vec<BigInt> {
        row.iter().map(bigint_of).collect()
    }

    fn store(&self, row: &[BigInt]) -> Vec<Scalar> {
        row.iter().map(|x| Scalar::Integer(x.clone())).collect()
    }

    fn canonicalize(&self, rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
        let Some(n) = rows.first().map(Vec::len) else {
            return Vec::new();
        };
        let mut ech = UnimodularEchelon::new(n);
        for v in rows {
            ech.insert(v);
        }
        ech.into_hnf()
    }

    fn contains(&self, basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
        let mut v = v.to_vec();
        for row in basis {
            let pc = first_nonzero(row, row.len()).expect("nonzero basis row");
            let (q, rem) = v[pc].div_rem(&row[pc]);
            if !rem.is_zero() {
                return false;
            }
            sub_multiple(&mut v, &q, row);
        }
        v.iter().all(Zero::is_zero)
    }

    /// The full integer kernel, obtained by unimodular reduction of `[Mᵀ | I]`;
    /// it is saturated by construction.
    fn kernel(&self, rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
        let m = rows.len();
        let mut ech = UnimodularEchelon::new(m);
        let mut found = Vec::new();
        for j in 0..ncols {
            let mut v = Vec::with_capacity(m + ncols);
            v.extend(rows.iter().map(|r| r[j].clone()));
            v.extend((0..ncols).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }));
            if let Some(left) = ech.insert(v) {
                found.push(left[m..].to_vec());
            }
        }
        self.canonicalize(found)
    }
}
