//! Linear maps on T(L): the signed and unsigned random-to-top operators,
//! the interior products ∂_g, ∂'_g, the map c_g and the (super)commutators.
//!
//! Everything works by sparse rewriting of words; matrices are built
//! separately in [`crate::spans`].

use crate::error::{Error, Result};
use crate::scalars::{RingSpec, Scalar};
use crate::tensor::{Tensor, Word};

/// A linear form g ∈ L*, given by its values g(e_1), …, g(e_n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functional {
    coeffs: Vec<Scalar>,
    ring: RingSpec,
}

impl Functional {
    pub fn new(ring: RingSpec, coeffs: Vec<Scalar>) -> Result<Functional> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("functional needs at least one value".into()));
        }
        if let Some(c) = coeffs.iter().find(|c| c.ring() != ring) {
            return Err(Error::RingMismatch(c.ring().to_string(), ring.to_string()));
        }
        Ok(Functional { coeffs, ring })
    }

    /// The dual basis functional e_i* (1-based).
    pub fn dual_basis(rank: usize, ring: RingSpec, i: usize) -> Result<Functional> {
        if i == 0 || i > rank {
            return Err(Error::IndexOutOfRange { index: i as i64, rank });
        }
        let coeffs = (1..=rank)
            .map(|j| if j == i { ring.one() } else { ring.zero() })
            .collect();
        Functional::new(ring, coeffs)
    }

    /// Parses comma-separated values such as `1,0,-1/2`.
    pub fn parse(text: &str, ring: RingSpec) -> Result<Functional> {
        let coeffs = text
            .split(',')
            .map(|s| Scalar::parse(s, ring))
            .collect::<Result<Vec<_>>>()?;
        Functional::new(ring, coeffs)
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// g(e_letter).
    pub fn eval(&self, letter: u32) -> &Scalar {
        &self.coeffs[letter as usize - 1]
    }

    fn check(&self, t: &Tensor) -> Result<()> {
        if self.rank() != t.rank() {
            return Err(Error::RankMismatch(self.rank(), t.rank()));
        }
        if self.ring != t.ring() {
            return Err(Error::RingMismatch(self.ring.to_string(), t.ring().to_string()));
        }
        Ok(())
    }
}

fn sign(i: usize) -> i64 {
    if i % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The word `w_i w_1 … ŵ_i … w_k` (0-based `i`).
fn move_to_front(w: &[u32], i: usize) -> Word {
    let mut letters = Vec::with_capacity(w.len());
    letters.push(w[i]);
    letters.extend_from_slice(&w[..i]);
    letters.extend_from_slice(&w[i + 1..]);
    Word::from_letters(letters)
}

fn remove_at(w: &[u32], i: usize) -> Word {
    let mut letters = Vec::with_capacity(w.len().saturating_sub(1));
    letters.extend_from_slice(&w[..i]);
    letters.extend_from_slice(&w[i + 1..]);
    Word::from_letters(letters)
}

/// Image of a single word under t (`signed`) or t'.
pub(crate) fn random_to_top_word(w: &Word, signed: bool, emit: &mut dyn FnMut(Word, i64)) {
    let letters = w.letters();
    for i in 0..letters.len() {
        emit(move_to_front(letters, i), if signed { sign(i) } else { 1 });
    }
}

/// Image of a single word under t'_N: every increasing choice of `n`
/// positions is moved, in order, to the front.
pub(crate) fn tn_prime_word(w: &Word, n: usize, emit: &mut dyn FnMut(Word, i64)) {
    let letters = w.letters();
    let k = letters.len();
    if n > k {
        return;
    }
    let mut chosen: Vec<usize> = (0..n).collect();
    loop {
        let mut out = Vec::with_capacity(k);
        out.extend(chosen.iter().map(|&i| letters[i]));
        let mut next = 0;
        for (i, &l) in letters.iter().enumerate() {
            if next < n && chosen[next] == i {
                next += 1;
            } else {
                out.push(l);
            }
        }
        emit(Word::from_letters(out), 1);

        // advance to the next combination in lexicographic order
        let Some(pos) = (0..n).rev().find(|&j| chosen[j] < k - n + j) else {
            return;
        };
        chosen[pos] += 1;
        for j in pos + 1..n {
            chosen[j] = chosen[j - 1] + 1;
        }
    }
}

/// t(u_1⊗⋯⊗u_k) = Σ_i (−1)^{i−1} u_i⊗u_1⊗⋯⊗û_i⊗⋯⊗u_k.
pub fn apply_t(t: &Tensor) -> Tensor {
    t.map_words(|w, emit| random_to_top_word(w, true, emit))
}

/// t'(u_1⊗⋯⊗u_k) = Σ_i u_i⊗u_1⊗⋯⊗û_i⊗⋯⊗u_k.
pub fn apply_t_prime(t: &Tensor) -> Tensor {
    t.map_words(|w, emit| random_to_top_word(w, false, emit))
}

/// t'_N: moves each increasing N-subset of tensorands to the front.
pub fn apply_tn_prime(t: &Tensor, n: usize) -> Result<Tensor> {
    if n < 1 {
        return Err(Error::BadN(n));
    }
    Ok(t.map_words(|w, emit| tn_prime_word(w, n, emit)))
}

fn interior(g: &Functional, t: &Tensor, signed: bool) -> Result<Tensor> {
    g.check(t)?;
    Ok(t.map_words_scalar(|w, emit| {
        let letters = w.letters();
        for (i, &l) in letters.iter().enumerate() {
            let v = g.eval(l);
            if v.is_zero() {
                continue;
            }
            let c = if signed && i % 2 == 1 { -v } else { v.clone() };
            emit(remove_at(letters, i), c);
        }
    }))
}

/// ∂_g(u_1⊗⋯⊗u_k) = Σ_i (−1)^{i−1} g(u_i) u_1⊗⋯⊗û_i⊗⋯⊗u_k.
pub fn apply_partial(g: &Functional, t: &Tensor) -> Result<Tensor> {
    interior(g, t, true)
}

/// ∂'_g(u_1⊗⋯⊗u_k) = Σ_i g(u_i) u_1⊗⋯⊗û_i⊗⋯⊗u_k.
pub fn apply_partial_prime(g: &Functional, t: &Tensor) -> Result<Tensor> {
    interior(g, t, false)
}

/// c_g(u_1⊗⋯⊗u_k) = g(u_1) u_2⊗⋯⊗u_k, and c_g(1) = 0.
pub fn apply_cg(g: &Functional, t: &Tensor) -> Result<Tensor> {
    g.check(t)?;
    Ok(t.map_words_scalar(|w, emit| {
        if let Some(&first) = w.letters().first() {
            emit(remove_at(w.letters(), 0), g.eval(first).clone());
        }
    }))
}

/// Supercommutator `[a, b]_s = ab − (−1)^{nm} ba` on homogeneous parts,
/// extended bilinearly.
pub fn scomm(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    let mut out = a.tensor_product(b)?;
    for (n, an) in a.components() {
        for (m, bm) in b.components() {
            let ba = &bm * &an;
            out = if (n * m) % 2 == 0 { &out - &ba } else { &out + &ba };
        }
    }
    Ok(out)
}

/// Plain commutator `[a, b] = ab − ba`.
pub fn comm(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    let ab = a.tensor_product(b)?;
    let ba = b.tensor_product(a)?;
    Ok(&ab - &ba)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::parse_tensor;

    const Q: RingSpec = RingSpec::Rational;

    fn qq(text: &str, rank: usize) -> Tensor {
        parse_tensor(text, rank, Q).unwrap()
    }

    #[test]
    fn t_examples() {
        assert!(apply_t(&Tensor::one(2, Q)).is_zero());
        assert_eq!(apply_t(&qq("[1,2]", 2)), qq("[1,2] - [2,1]", 2));
        assert!(apply_t(&qq("[1,1]", 2)).is_zero());
        assert_eq!(apply_t(&qq("[1,2,3]", 3)), qq("[1,2,3] - [2,1,3] + [3,1,2]", 3));
    }

    #[test]
    fn t_prime_examples() {
        assert_eq!(apply_t_prime(&qq("[1]", 2)), qq("[1]", 2));
        assert_eq!(apply_t_prime(&qq("[1,2]", 2)), qq("[1,2] + [2,1]", 2));
        let f3 = RingSpec::prime_field(3).unwrap();
        assert!(apply_t_prime(&Tensor::word(1, f3, &[1, 1, 1]).unwrap()).is_zero());
        assert_eq!(apply_t_prime(&qq("[1,1]", 2)), qq("2*[1,1]", 2));
    }

    #[test]
    fn tn_prime_examples() {
        assert_eq!(apply_tn_prime(&qq("[1,2]", 2), 1).unwrap(), qq("[1,2] + [2,1]", 2));
        assert_eq!(apply_tn_prime(&qq("[1,2]", 2), 2).unwrap(), qq("[1,2]", 2));
        assert_eq!(
            apply_tn_prime(&qq("[1,2,3]", 3), 2).unwrap(),
            qq("[1,2,3] + [1,3,2] + [2,3,1]", 3)
        );
        assert!(apply_tn_prime(&qq("[1,2]", 2), 3).unwrap().is_zero());
        assert_eq!(apply_tn_prime(&qq("[1]", 2), 0), Err(Error::BadN(0)));
    }

    #[test]
    fn tn_prime_agrees_with_t_prime_for_n_one() {
        for w in Word::all(3, 4) {
            let t = Tensor::word(3, Q, w.letters()).unwrap();
            assert_eq!(apply_tn_prime(&t, 1).unwrap(), apply_t_prime(&t));
        }
    }

    #[test]
    fn partial_examples() {
        let e1 = Functional::dual_basis(2, Q, 1).unwrap();
        assert_eq!(apply_partial(&e1, &qq("[1,2]", 2)).unwrap(), qq("[2]", 2));
        assert_eq!(apply_partial(&e1, &qq("[2,1]", 2)).unwrap(), qq("-[2]", 2));
        assert!(apply_partial(&e1, &qq("[1,1]", 2)).unwrap().is_zero());
        assert_eq!(apply_partial_prime(&e1, &qq("[1,1]", 2)).unwrap(), qq("2*[1]", 2));
        assert_eq!(apply_partial_prime(&e1, &qq("[1,1,1]", 2)).unwrap(), qq("3*[1,1]", 2));
        assert!(apply_partial_prime(&e1, &Tensor::one(2, Q)).unwrap().is_zero());
        assert_eq!(
            apply_partial(&e1, &qq("[1]", 3)),
            Err(Error::RankMismatch(2, 3))
        );
    }

    #[test]
    fn cg_examples() {
        let e1 = Functional::dual_basis(2, Q, 1).unwrap();
        assert_eq!(apply_cg(&e1, &qq("[1,2]", 2)).unwrap(), qq("[2]", 2));
        assert!(apply_cg(&e1, &qq("[2,1]", 2)).unwrap().is_zero());
        assert!(apply_cg(&e1, &Tensor::one(2, Q)).unwrap().is_zero());
    }

    #[test]
    fn commutator_examples() {
        let e1 = qq("[1]", 3);
        let e2 = qq("[2]", 3);
        let e3 = qq("[3]", 3);
        assert_eq!(scomm(&e1, &e2).unwrap(), qq("[1,2] + [2,1]", 3));
        assert_eq!(scomm(&e1, &e1).unwrap(), qq("2*[1,1]", 3));
        assert_eq!(scomm(&qq("[1,2]", 3), &e1).unwrap(), qq("[1,2,1] - [1,1,2]", 3));
        assert_eq!(comm(&e1, &e2).unwrap(), qq("[1,2] - [2,1]", 3));
        let a = qq("[1] + 2*[2,3] - [1,1,2]", 3);
        assert!(comm(&a, &a).unwrap().is_zero());
        let c = |x: &Tensor, y: &Tensor| comm(x, y).unwrap();
        let jac = &(&c(&e1, &c(&e2, &e3)) - &c(&c(&e1, &e2), &e3)) - &c(&e2, &c(&e1, &e3));
        assert!(jac.is_zero());
    }

    #[test]
    fn scomm_inhomogeneous_is_componentwise() {
        let a = qq("[1] + [1,2]", 2);
        let b = qq("[2] + 3*[]", 2);
        let mut expected = Tensor::zero(2, Q);
        for (_, ai) in a.components() {
            for (_, bj) in b.components() {
                expected = &expected + &scomm(&ai, &bj).unwrap();
            }
        }
        assert_eq!(scomm(&a, &b).unwrap(), expected);
    }
}
