//! Verification campaigns: each compares two descriptions of the same graded
//! object degree by degree and records the outcome in a report.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{
    apply_cg, apply_partial, apply_partial_prime, apply_t, apply_t_prime, comm, scomm, Functional,
};
use crate::scalars::{Prime, RingSpec, Scalar};
use crate::spans::{
    bracket_span, build_gbar, build_lie_components, build_lie_tail, build_squares_span,
    build_symmetric_span, inclusion_by_degree, kernel_span, module_span, span_from_tensors,
    span_product, span_sum, subalgebra_closure, GradedSpan, OperatorKind,
};
use crate::tensor::{Tensor, Word};

/// One compared cell. For span comparisons `lhs` and `rhs` are dimensions
/// (lattice ranks over ℤ) and `equal` is span identity; for inclusions they
/// are the dimensions of the inner and outer span and `equal` says the
/// inclusion holds; for identities they count passing and attempted cases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub degree: usize,
    pub lhs: usize,
    pub rhs: usize,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub campaign: String,
    pub ring: String,
    pub rank: usize,
    pub max_degree: usize,
    pub rows: Vec<ReportRow>,
    pub pass: bool,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    fn finish(
        campaign: &str,
        ring: RingSpec,
        rank: usize,
        max_degree: usize,
        rows: Vec<ReportRow>,
        start: Instant,
    ) -> VerificationReport {
        VerificationReport {
            campaign: campaign.to_string(),
            ring: ring.to_string(),
            rank,
            max_degree,
            pass: rows.iter().all(|r| r.equal),
            rows,
            elapsed_ms: start.elapsed().as_millis() as u64,
            note: None,
        }
    }

    /// Degrees of the failing rows, in order.
    pub fn failing_degrees(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| !r.equal).map(|r| r.degree).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report with its timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> VerificationReport {
        VerificationReport { elapsed_ms: 0, ..self.clone() }
    }

    /// Plain-text table with the same rows as the JSON form.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "campaign {} ring {} rank {} max-degree {}\n",
            self.campaign, self.ring, self.rank, self.max_degree
        );
        let labelled = self.rows.iter().any(|r| r.label.is_some());
        if labelled {
            out.push_str(&format!("{:<40} {:>6} {:>6} {:>6}  {}\n", "check", "degree", "lhs", "rhs", "ok"));
        } else {
            out.push_str(&format!("{:>6} {:>6} {:>6}  {}\n", "degree", "lhs", "rhs", "ok"));
        }
        for r in &self.rows {
            let ok = if r.equal { "yes" } else { "NO" };
            if labelled {
                let label = r.label.as_deref().unwrap_or("");
                out.push_str(&format!("{label:<40} {:>6} {:>6} {:>6}  {ok}\n", r.degree, r.lhs, r.rhs));
            } else {
                out.push_str(&format!("{:>6} {:>6} {:>6}  {ok}\n", r.degree, r.lhs, r.rhs));
            }
        }
        if let Some(note) = &self.note {
            out.push_str(&format!("note: {note}\n"));
        }
        out.push_str(&format!("{} ({} ms)\n", if self.pass { "PASS" } else { "FAIL" }, self.elapsed_ms));
        out
    }
}

fn compare_rows(lhs: &GradedSpan, rhs: &GradedSpan) -> Vec<ReportRow> {
    (0..=lhs.max_degree())
        .map(|d| ReportRow {
            label: None,
            degree: d,
            lhs: lhs.dim(d),
            rhs: rhs.dim(d),
            equal: lhs.component(d) == rhs.component(d),
        })
        .collect()
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    Ok(())
}

/// `ḡ + P` with the supercommutator tower.
pub fn build_h(rank: usize, ring: RingSpec, max_degree: usize) -> Result<GradedSpan> {
    span_sum(
        &build_gbar(rank, ring, true, max_degree)?,
        &build_squares_span(rank, ring, 2, max_degree)?,
    )
}

/// `ḡ′ + P_p` over F_p.
pub fn build_h_prime(rank: usize, prime: Prime, max_degree: usize) -> Result<GradedSpan> {
    let ring = RingSpec::PrimeField(prime);
    span_sum(
        &build_gbar(rank, ring, false, max_degree)?,
        &build_squares_span(rank, ring, prime.get() as usize, max_degree)?,
    )
}

/// Kernel of t against the subalgebra generated by `ḡ + P`.
pub fn verify_kert(rank: usize, ring: RingSpec, max_degree: usize) -> Result<VerificationReport> {
    check_rank(rank)?;
    let start = Instant::now();
    let (kernel, closure) = rayon::join(
        || kernel_span(&[OperatorKind::T], rank, ring, max_degree),
        || subalgebra_closure(&build_h(rank, ring, max_degree)?, max_degree),
    );
    let rows = compare_rows(&kernel?, &closure?);
    Ok(VerificationReport::finish("kert", ring, rank, max_degree, rows, start))
}

/// Kernel of t′ against the subalgebra generated by `ḡ′`, over ℚ or ℤ.
pub fn verify_kert_prime(rank: usize, ring: RingSpec, max_degree: usize) -> Result<VerificationReport> {
    if let RingSpec::PrimeField(_) = ring {
        return Err(Error::UnsupportedRing(
            ring.to_string(),
            "this campaign needs a torsion-free ring (qq or zz)".into(),
        ));
    }
    check_rank(rank)?;
    let start = Instant::now();
    let (kernel, closure) = rayon::join(
        || kernel_span(&[OperatorKind::TPrime], rank, ring, max_degree),
        || subalgebra_closure(&build_gbar(rank, ring, false, max_degree)?, max_degree),
    );
    let rows = compare_rows(&kernel?, &closure?);
    Ok(VerificationReport::finish("kert-prime", ring, rank, max_degree, rows, start))
}

/// Kernel of t′ over F_p against the subalgebra generated by `ḡ′ + P_p`.
pub fn verify_kert_prime_modp(rank: usize, p: u64, max_degree: usize) -> Result<VerificationReport> {
    let prime = Prime::new(p)?;
    let ring = RingSpec::PrimeField(prime);
    check_rank(rank)?;
    let start = Instant::now();
    let (kernel, closure) = rayon::join(
        || kernel_span(&[OperatorKind::TPrime], rank, ring, max_degree),
        || subalgebra_closure(&build_h_prime(rank, prime, max_degree)?, max_degree),
    );
    let rows = compare_rows(&kernel?, &closure?);
    Ok(VerificationReport::finish("kert-prime-fp", ring, rank, max_degree, rows, start))
}

/// `Σ_k sym_k · Ker(t′)_{d-k}` against all of `L^{⊗d}`, over ℚ.
pub fn verify_pang(rank: usize, max_degree: usize) -> Result<VerificationReport> {
    check_rank(rank)?;
    let ring = RingSpec::Rational;
    let start = Instant::now();
    let sym = build_symmetric_span(rank, ring, max_degree)?;
    let kernel = kernel_span(&[OperatorKind::TPrime], rank, ring, max_degree)?;
    let product = span_product(&sym, &kernel, max_degree)?;
    let rows = (0..=max_degree)
        .map(|d| {
            let full = rank.pow(d as u32);
            ReportRow { label: None, degree: d, lhs: product.dim(d), rhs: full, equal: product.dim(d) == full }
        })
        .collect();
    Ok(VerificationReport::finish("pang", ring, rank, max_degree, rows, start))
}

/// `∩_{p ≤ N} Ker t′_p` against the subalgebra generated by `Σ_{i > N} L′_i`, over ℚ.
pub fn verify_kn(rank: usize, n: usize, max_degree: usize) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::BadN(0));
    }
    check_rank(rank)?;
    let ring = RingSpec::Rational;
    let start = Instant::now();
    let ops: Vec<OperatorKind> = (1..=n).map(OperatorKind::TNPrime).collect();
    let kernel = kernel_span(&ops, rank, ring, max_degree)?;
    let closure = subalgebra_closure(&build_lie_tail(rank, ring, n + 1, max_degree)?, max_degree)?;
    let rows = compare_rows(&kernel, &closure);
    let mut report = VerificationReport::finish("kn", ring, rank, max_degree, rows, start);
    let failing = report.failing_degrees();
    report.note = Some(if failing.is_empty() {
        format!("experimental: N = {n}, equality at every degree")
    } else {
        format!("experimental: N = {n}, first witness degree {}", failing[0])
    });
    Ok(report)
}

/// `(1/d) Σ_{e | d} μ(d/e) rank^e` for `d = 1..=max_degree`.
pub fn witt_dimensions(rank: usize, max_degree: usize) -> Vec<u128> {
    fn mobius(mut n: usize) -> i128 {
        let mut m = 1;
        let mut q = 2;
        while q * q <= n {
            if n % q == 0 {
                n /= q;
                if n % q == 0 {
                    return 0;
                }
                m = -m;
            }
            q += 1;
        }
        if n > 1 {
            -m
        } else {
            m
        }
    }
    (1..=max_degree)
        .map(|d| {
            let total: i128 = (1..=d)
                .filter(|e| d % e == 0)
                .map(|e| mobius(d / e) * (rank as i128).pow(e as u32))
                .sum();
            (total / d as i128) as u128
        })
        .collect()
}

/// Dimensions of the plain-commutator tower over ℚ against the Witt numbers.
pub fn verify_witt(rank: usize, max_degree: usize) -> Result<VerificationReport> {
    check_rank(rank)?;
    let ring = RingSpec::Rational;
    let start = Instant::now();
    let tower = build_lie_components(rank, ring, false, max_degree)?;
    let witt = witt_dimensions(rank, max_degree);
    let rows = tower
        .iter()
        .zip(&witt)
        .enumerate()
        .map(|(i, (li, &w))| {
            let dim = li.dim(i + 1);
            ReportRow { label: None, degree: i + 1, lhs: dim, rhs: w as usize, equal: dim as u128 == w }
        })
        .collect();
    Ok(VerificationReport::finish("witt", ring, rank, max_degree, rows, start))
}

// ------------------------------------------------------------ inclusions

struct Inclusions {
    rows: Vec<ReportRow>,
}

impl Inclusions {
    fn check(&mut self, label: &str, inner: &GradedSpan, outer: &GradedSpan) -> Result<()> {
        for (d, ok) in inclusion_by_degree(inner, outer)?.into_iter().enumerate() {
            self.rows.push(ReportRow {
                label: Some(label.to_string()),
                degree: d,
                lhs: inner.dim(d),
                rhs: outer.dim(d),
                equal: ok,
            });
        }
        Ok(())
    }

    /// `[a, a] ⊆ a` with the chosen bracket.
    fn closed(&mut self, label: &str, a: &GradedSpan, signed: bool) -> Result<()> {
        self.check(label, &bracket_span(a, a, signed, a.max_degree())?, a)
    }

    /// Every basis element of `span` is killed by `f`.
    fn annihilated(&mut self, label: &str, span: &GradedSpan, f: impl Fn(&Tensor) -> Result<Tensor>) -> Result<()> {
        for d in 0..=span.max_degree() {
            let basis = span.basis(d);
            let mut killed = 0;
            for v in &basis {
                if f(v)?.is_zero() {
                    killed += 1;
                }
            }
            self.rows.push(ReportRow {
                label: Some(label.to_string()),
                degree: d,
                lhs: basis.len(),
                rhs: killed,
                equal: killed == basis.len(),
            });
        }
        Ok(())
    }
}

/// All of `L^{⊗degree}`, as a span truncated at `max_degree`.
fn full_degree(rank: usize, ring: RingSpec, degree: usize, max_degree: usize) -> Result<GradedSpan> {
    let words: Vec<Tensor> = Word::all(rank, degree)
        .map(|w| Tensor::word(rank, ring, w.letters()))
        .collect::<Result<_>>()?;
    span_from_tensors(rank, ring, &words, max_degree)
}

/// Structural inclusions between the towers, the generating spans and the
/// kernels, each tested in every degree up to `max_degree`.
pub fn verify_inclusion_suite(rank: usize, ring: RingSpec, max_degree: usize) -> Result<VerificationReport> {
    check_rank(rank)?;
    let start = Instant::now();
    let d = max_degree;
    let mut s = Inclusions { rows: Vec::new() };

    let l = module_span(rank, ring, d)?;
    let one = GradedSpan::unit(rank, ring, d)?;

    // supercommutator side
    let kt = kernel_span(&[OperatorKind::T], rank, ring, d)?;
    let tower = if d >= 1 { build_lie_components(rank, ring, true, d)? } else { Vec::new() };
    let gbar = build_gbar(rank, ring, true, d)?;
    let p = build_squares_span(rank, ring, 2, d)?;
    let h = span_sum(&gbar, &p)?;

    for (i, li) in tower.iter().enumerate() {
        s.check(&format!("L_{} in degree {}", i + 1, i + 1), li, &full_degree(rank, ring, i + 1, d)?)?;
    }
    s.check("unit in Ker t", &one, &kt)?;
    s.check("Ker t * Ker t in Ker t", &span_product(&kt, &kt, d)?, &kt)?;
    s.check("[L,L]_s in Ker t", &bracket_span(&l, &l, true, d)?, &kt)?;
    s.check("[L,Ker t]_s in Ker t", &bracket_span(&l, &kt, true, d)?, &kt)?;
    s.check("P in Ker t", &p, &kt)?;
    if ring != RingSpec::Integer && ring.characteristic() != 2 {
        if let Some(l2) = tower.get(1) {
            s.check("P in L_2", &p, l2)?;
        }
    }
    s.check("[L,gbar]_s in gbar", &bracket_span(&l, &gbar, true, d)?, &gbar)?;
    s.check("[L,P]_s in gbar", &bracket_span(&l, &p, true, d)?, &gbar)?;
    s.check("[L,h]_s in gbar", &bracket_span(&l, &h, true, d)?, &gbar)?;
    s.check("gbar in h", &gbar, &h)?;
    s.check("[h,h]_s in gbar", &bracket_span(&h, &h, true, d)?, &gbar)?;
    for i in 0..tower.len() {
        for j in 0..tower.len() {
            if i + j + 2 <= d {
                s.check(
                    &format!("[L_{},L_{}]_s in L_{}", i + 1, j + 1, i + j + 2),
                    &bracket_span(&tower[i], &tower[j], true, d)?,
                    &tower[i + j + 1],
                )?;
            }
        }
    }
    s.closed("gbar closed under [,]_s", &gbar, true)?;
    s.closed("h closed under [,]_s", &h, true)?;
    s.closed("gbar+L closed under [,]_s", &span_sum(&gbar, &l)?, true)?;
    s.closed("h+L closed under [,]_s", &span_sum(&h, &l)?, true)?;
    s.check("h* in Ker t", &subalgebra_closure(&h, d)?, &kt)?;
    for i in 1..=rank {
        let g = Functional::dual_basis(rank, ring, i)?;
        s.annihilated(&format!("Ker t killed by partial_{i}"), &kt, |v| apply_partial(&g, v))?;
    }

    // plain commutator side
    let kp = kernel_span(&[OperatorKind::TPrime], rank, ring, d)?;
    let tower_p = if d >= 1 { build_lie_components(rank, ring, false, d)? } else { Vec::new() };
    let gbar_p = build_gbar(rank, ring, false, d)?;
    s.check("unit in Ker t'", &one, &kp)?;
    s.check("Ker t' * Ker t' in Ker t'", &span_product(&kp, &kp, d)?, &kp)?;
    s.check("[L,L] in Ker t'", &bracket_span(&l, &l, false, d)?, &kp)?;
    s.check("[L,Ker t'] in Ker t'", &bracket_span(&l, &kp, false, d)?, &kp)?;
    s.check("[L,gbar'] in gbar'", &bracket_span(&l, &gbar_p, false, d)?, &gbar_p)?;
    s.closed("gbar' closed under [,]", &gbar_p, false)?;
    s.closed("gbar'+L closed under [,]", &span_sum(&gbar_p, &l)?, false)?;
    for i in 0..tower_p.len() {
        for j in 0..tower_p.len() {
            if i + j + 2 <= d {
                s.check(
                    &format!("[L'_{},L'_{}] in L'_{}", i + 1, j + 1, i + j + 2),
                    &bracket_span(&tower_p[i], &tower_p[j], false, d)?,
                    &tower_p[i + j + 1],
                )?;
            }
        }
    }
    s.check("gbar'* in Ker t'", &subalgebra_closure(&gbar_p, d)?, &kp)?;
    for i in 1..=rank {
        let g = Functional::dual_basis(rank, ring, i)?;
        s.annihilated(&format!("Ker t' killed by partial'_{i}"), &kp, |v| apply_partial_prime(&g, v))?;
    }

    // characteristic p
    if let RingSpec::PrimeField(prime) = ring {
        let pp = build_squares_span(rank, ring, prime.get() as usize, d)?;
        let hp = span_sum(&gbar_p, &pp)?;
        s.check("P_p in Ker t'", &pp, &kp)?;
        s.check("[L,P_p] in gbar'", &bracket_span(&l, &pp, false, d)?, &gbar_p)?;
        s.check("[L,h'_p] in gbar'", &bracket_span(&l, &hp, false, d)?, &gbar_p)?;
        s.check("gbar' in h'_p", &gbar_p, &hp)?;
        s.check("[h'_p,h'_p] in gbar'", &bracket_span(&hp, &hp, false, d)?, &gbar_p)?;
        s.closed("h'_p closed under [,]", &hp, false)?;
        s.closed("h'_p+L closed under [,]", &span_sum(&hp, &l)?, false)?;
        s.check("h'_p* in Ker t'", &subalgebra_closure(&hp, d)?, &kp)?;
    }

    Ok(VerificationReport::finish("inclusions", ring, rank, max_degree, s.rows, start))
}

// ------------------------------------------------------------ identities

fn random_scalar(rng: &mut ChaCha8Rng, ring: RingSpec) -> Scalar {
    Scalar::from_int(ring, rng.gen_range(-4..=4))
}

fn random_homogeneous(rng: &mut ChaCha8Rng, rank: usize, ring: RingSpec, degree: usize) -> Tensor {
    let terms: Vec<(Word, Scalar)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let letters = (0..degree).map(|_| rng.gen_range(1..=rank as u32)).collect();
            (Word::from_letters(letters), random_scalar(rng, ring))
        })
        .collect();
    Tensor::from_terms(rank, ring, terms).expect("valid random tensor")
}

/// Sum of random homogeneous pieces in degrees `0..=max`.
fn random_tensor(rng: &mut ChaCha8Rng, rank: usize, ring: RingSpec, max: usize) -> Tensor {
    let mut t = Tensor::zero(rank, ring);
    for d in 0..=max {
        if rng.gen_bool(0.6) {
            t = &t + &random_homogeneous(rng, rank, ring, d);
        }
    }
    t
}

fn random_functional(rng: &mut ChaCha8Rng, rank: usize, ring: RingSpec) -> Functional {
    Functional::new(ring, (0..rank).map(|_| random_scalar(rng, ring)).collect()).expect("valid functional")
}

fn sign(n: usize) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `v_1 v_2 ⋯ v_k ↦ v_1 · u · v_2 ⋯ v_k`, and `1 ↦ 0`.
fn insert_after_first(u: &Tensor, v: &Tensor) -> Tensor {
    let mut out = Tensor::zero(v.rank(), v.ring());
    for (w, c) in v.terms() {
        let letters = w.letters();
        if letters.is_empty() {
            continue;
        }
        let head = Tensor::word(v.rank(), v.ring(), &letters[..1]).expect("valid word");
        let tail = Tensor::word(v.rank(), v.ring(), &letters[1..]).expect("valid word");
        out = &out + &(&(&head * u) * &tail).scale(c);
    }
    out
}

/// Identities of the operators and brackets on seeded random inputs.
pub fn verify_identity_suite(rank: usize, ring: RingSpec, cases: usize, seed: u64) -> Result<VerificationReport> {
    if cases == 0 {
        return Err(Error::InvalidArgument("cases must be at least 1".into()));
    }
    check_rank(rank)?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut record = |label: &str, degree: usize, passed: usize| {
        rows.push(ReportRow { label: Some(label.to_string()), degree, lhs: passed, rhs: cases, equal: passed == cases });
    };
    const D: usize = 3;

    let mut passed = 0;
    for _ in 0..cases {
        let n = rng.gen_range(0..=D);
        let a = random_homogeneous(&mut rng, rank, ring, n);
        let b = random_tensor(&mut rng, rank, ring, D);
        let g = random_functional(&mut rng, rank, ring);
        let lhs = apply_partial(&g, &(&a * &b))?;
        let rhs = &(&apply_partial(&g, &a)? * &b) + &(&a * &apply_partial(&g, &b)?).scale_int(sign(n));
        passed += usize::from(lhs == rhs);
    }
    record("superderivation law", 2 * D, passed);

    let mut passed = 0;
    for _ in 0..cases {
        let a = random_tensor(&mut rng, rank, ring, D);
        let b = random_tensor(&mut rng, rank, ring, D);
        let g = random_functional(&mut rng, rank, ring);
        let lhs = apply_partial_prime(&g, &(&a * &b))?;
        let rhs = &(&apply_partial_prime(&g, &a)? * &b) + &(&a * &apply_partial_prime(&g, &b)?);
        passed += usize::from(lhs == rhs);
    }
    record("derivation law", 2 * D, passed);

    let mut passed = 0;
    for _ in 0..cases {
        let u = random_tensor(&mut rng, rank, ring, D + 1);
        let g = random_functional(&mut rng, rank, ring);
        passed += usize::from(apply_partial(&g, &u)? == apply_cg(&g, &apply_t(&u))?);
    }
    record("partial = c_g after t", D + 1, passed);

    let mut passed = 0;
    for _ in 0..cases {
        let u = random_tensor(&mut rng, rank, ring, D + 1);
        let g = random_functional(&mut rng, rank, ring);
        passed += usize::from(apply_partial_prime(&g, &u)? == apply_cg(&g, &apply_t_prime(&u))?);
    }
    record("partial' = c_g after t'", D + 1, passed);

    let mut leibniz = 0;
    let mut jacobi = 0;
    for _ in 0..cases {
        let n = rng.gen_range(0..=2);
        let m = rng.gen_range(0..=2);
        let u = random_homogeneous(&mut rng, rank, ring, n);
        let v = random_homogeneous(&mut rng, rank, ring, m);
        let w = random_tensor(&mut rng, rank, ring, 2);
        let s = sign(n * m);
        let lhs = scomm(&u, &(&v * &w))?;
        let rhs = &(&scomm(&u, &v)? * &w) + &(&v * &scomm(&u, &w)?).scale_int(s);
        leibniz += usize::from(lhs == rhs);
        let lhs = scomm(&u, &scomm(&v, &w)?)?;
        let rhs = &scomm(&scomm(&u, &v)?, &w)? + &scomm(&v, &scomm(&u, &w)?)?.scale_int(s);
        jacobi += usize::from(lhs == rhs);
    }
    record("super-Leibniz", 6, leibniz);
    record("super-Jacobi", 6, jacobi);

    let mut leibniz = 0;
    let mut jacobi = 0;
    for _ in 0..cases {
        let u = random_tensor(&mut rng, rank, ring, 2);
        let v = random_tensor(&mut rng, rank, ring, 2);
        let w = random_tensor(&mut rng, rank, ring, 2);
        let lhs = comm(&u, &(&v * &w))?;
        let rhs = &(&comm(&u, &v)? * &w) + &(&v * &comm(&u, &w)?);
        leibniz += usize::from(lhs == rhs);
        let lhs = comm(&u, &comm(&v, &w)?)?;
        let rhs = &comm(&comm(&u, &v)?, &w)? + &comm(&v, &comm(&u, &w)?)?;
        jacobi += usize::from(lhs == rhs);
    }
    record("Leibniz", 6, leibniz);
    record("Jacobi", 6, jacobi);

    let mut passed = 0;
    for _ in 0..cases {
        let n = rng.gen_range(0..=D);
        let u = random_homogeneous(&mut rng, rank, ring, n);
        let v = random_tensor(&mut rng, rank, ring, D);
        let lhs = apply_t(&(&u * &v));
        let rhs = &(&apply_t(&u) * &v) + &insert_after_first(&u, &apply_t(&v)).scale_int(sign(n));
        passed += usize::from(lhs == rhs);
    }
    record("product rule for t", 2 * D, passed);

    let mut passed = 0;
    for _ in 0..cases {
        let u = random_tensor(&mut rng, rank, ring, D);
        let x = Tensor::generator(rank, ring, rng.gen_range(1..=rank as u32))?;
        let lhs = scomm(&u, &(&x * &x))?;
        let rhs = scomm(&scomm(&u, &x)?, &x)?;
        passed += usize::from(lhs == rhs);
    }
    record("[U,xx]_s = [[U,x]_s,x]_s", D + 2, passed);

    let mut passed = 0;
    for _ in 0..cases {
        let x = random_homogeneous(&mut rng, rank, ring, 1);
        let i = rng.gen_range(0..=6);
        let xi = x.pow(i as u32);
        passed += usize::from(apply_t_prime(&xi) == xi.scale_int(i as i64));
    }
    record("t'(x^i) = i x^i", 6, passed);

    if let RingSpec::PrimeField(prime) = ring {
        let p = prime.get() as usize;
        if p <= 7 {
            let mut passed = 0;
            for _ in 0..cases {
                let a = &random_homogeneous(&mut rng, rank, ring, 0) + &random_homogeneous(&mut rng, rank, ring, 1);
                let c = random_tensor(&mut rng, rank, ring, 1);
                let lhs = comm(&a.pow(p as u32), &c)?;
                let mut rhs = c.clone();
                for _ in 0..p {
                    rhs = comm(&a, &rhs)?;
                }
                passed += usize::from(lhs == rhs);
            }
            record(&format!("ad of a^{p} = (ad a)^{p}"), p + 1, passed);
        }
    }

    Ok(VerificationReport::finish("identities", ring, rank, 2 * D, rows, start))
}

#[cfg(test)]
mod tests {
    use super::*;

    const QQ: RingSpec = RingSpec::Rational;
    const ZZ: RingSpec = RingSpec::Integer;

    fn fp(p: u64) -> RingSpec {
        RingSpec::prime_field(p).unwrap()
    }

    fn dims(r: &VerificationReport) -> (Vec<usize>, Vec<usize>) {
        (r.rows.iter().map(|x| x.lhs).collect(), r.rows.iter().map(|x| x.rhs).collect())
    }

    #[test]
    fn kert_examples() {
        let r = verify_kert(2, QQ, 4).unwrap();
        assert!(r.pass);
        assert_eq!(r.rows[2].lhs, 3);
        assert_eq!(r.rows[2].rhs, 3);
        for ring in [QQ, ZZ, fp(2), fp(3)] {
            let r = verify_kert(1, ring, 3).unwrap();
            assert!(r.pass);
            assert_eq!(dims(&r).0, vec![1, 0, 1, 0]);
        }
    }

    #[test]
    fn kert_prime_examples() {
        assert!(verify_kert_prime(2, QQ, 4).unwrap().pass);
        let r = verify_kert_prime(2, ZZ, 3).unwrap();
        assert!(r.pass);
        assert_eq!((r.rows[2].lhs, r.rows[2].rhs), (1, 1));
        assert!(matches!(verify_kert_prime(2, fp(2), 4), Err(Error::UnsupportedRing(..))));
    }

    #[test]
    fn kert_prime_modp_examples() {
        let r = verify_kert_prime_modp(2, 2, 4).unwrap();
        assert!(r.pass);
        assert_eq!((r.rows[2].lhs, r.rows[2].rhs), (3, 3));
        let r = verify_kert_prime_modp(1, 3, 3).unwrap();
        assert!(r.pass);
        assert_eq!(dims(&r).0[1..], [0, 0, 1]);
        assert!(matches!(verify_kert_prime_modp(2, 4, 3), Err(Error::NotPrime(_))));
    }

    #[test]
    fn witt_examples() {
        assert_eq!(witt_dimensions(2, 5), vec![2, 1, 2, 3, 6]);
        assert_eq!(witt_dimensions(1, 4), vec![1, 0, 0, 0]);
        assert_eq!(witt_dimensions(3, 2)[1], 3);
        assert!(verify_witt(2, 5).unwrap().pass);
    }

    #[test]
    fn pang_examples() {
        let r = verify_pang(2, 3).unwrap();
        assert!(r.pass);
        assert_eq!((r.rows[0].lhs, r.rows[2].lhs), (1, 4));
    }

    #[test]
    fn kn_examples() {
        let r = verify_kn(2, 1, 4).unwrap();
        let k = verify_kert_prime(2, QQ, 4).unwrap();
        assert!(r.pass);
        assert_eq!(dims(&r), dims(&k));
        let r = verify_kn(2, 2, 3).unwrap();
        assert_eq!(r.rows[3].rhs, 2);
        assert!(r.note.as_deref().unwrap().starts_with("experimental"));
    }

    #[test]
    fn identity_suite_runs() {
        assert!(verify_identity_suite(2, QQ, 30, 42).unwrap().pass);
        let r = verify_identity_suite(2, fp(5), 20, 1).unwrap();
        assert!(r.pass);
        assert!(r.rows.iter().any(|row| row.label.as_deref() == Some("ad of a^5 = (ad a)^5")));
        assert!(verify_identity_suite(2, QQ, 0, 1).is_err());
    }

    #[test]
    fn inclusion_suite_small() {
        for ring in [QQ, ZZ, fp(2), fp(3)] {
            let r = verify_inclusion_suite(2, ring, 3).unwrap();
            assert!(r.pass, "{}", r.to_table());
        }
    }

    #[test]
    fn a_failing_inclusion_is_reported() {
        // [L,L] is not inside Ker t over ℚ: e1e2 - e2e1 is moved by t
        let l = module_span(2, QQ, 2).unwrap();
        let kt = kernel_span(&[OperatorKind::T], 2, QQ, 2).unwrap();
        let mut s = Inclusions { rows: Vec::new() };
        s.check("plain bracket in Ker t", &bracket_span(&l, &l, false, 2).unwrap(), &kt).unwrap();
        assert!(!s.rows[2].equal);
    }

    #[test]
    fn squares_are_needed_over_the_integers() {
        // e1e1 lies in Ker t but only 2·e1e1 lies in gbar
        let kernel = kernel_span(&[OperatorKind::T], 2, ZZ, 2).unwrap();
        let without = subalgebra_closure(&build_gbar(2, ZZ, true, 2).unwrap(), 2).unwrap();
        assert_eq!(kernel.dim(2), without.dim(2));
        assert_ne!(kernel.component(2), without.component(2));
    }

    #[test]
    fn reports_are_reproducible() {
        let a = verify_identity_suite(2, ZZ, 10, 9).unwrap().without_timing();
        let b = verify_identity_suite(2, ZZ, 10, 9).unwrap().without_timing();
        assert_eq!(a.to_json(), b.to_json());
        let parsed: VerificationReport = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(parsed, a);
    }
}
