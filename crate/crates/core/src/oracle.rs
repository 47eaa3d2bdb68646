//! Exact twisted multi-homogeneous coordinate rings on `(P^1)^d` for
//! automorphisms that permute the factors and act by Mobius maps on each.
//!
//! Sections of `O(a_1, ..., a_d)` are polynomials bihomogeneous of degree
//! `a_k` in each pair `(x_k, y_k)`; exponent tuples are laid out as
//! `(e_1, f_1, ..., e_d, f_d)` for `x_1^{e_1} y_1^{f_1} ...`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::document::{AutomorphismDoc, Document, OracleDoc, Rat};
use crate::gk::hilbert_value;
use crate::lattice::Matrix;
use crate::poly::binom;
use crate::scheme::{p1_power, DivisorClass};
use crate::system::{Bimodule, BimoduleSystem, SystemError};

type Q = BigRational;
pub type Mobius = [[Q; 2]; 2];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("document has no oracle member")]
    MissingOracle,
    #[error("oracle shape error: {0}")]
    Shape(String),
    #[error("automorphism {index}: perm is not a permutation of 1..={d}")]
    BadPermutation { index: usize, d: usize },
    #[error("automorphism {index}: Mobius matrix on factor {factor} is singular")]
    Singular { index: usize, factor: usize },
    #[error("automorphisms {0} and {1} do not commute exactly")]
    LiftCommutationFail(usize, usize),
    #[error("bimodule {index}: numerical data does not match the oracle automorphism")]
    ShadowMismatch { index: usize },
    #[error(transparent)]
    Shadow(#[from] SystemError),
    #[error("section has multidegree {found:?}, expected {expected:?}")]
    DegreeMismatch { expected: Vec<i64>, found: Vec<i64> },
    #[error("grade has length {found}, expected {expected}")]
    GradeLength { expected: usize, found: usize },
    #[error("bimodule index {0} out of range")]
    IndexOutOfRange(usize),
}

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn mobius_identity() -> Mobius {
    [[q(1), q(0)], [q(0), q(1)]]
}

fn mobius_mul(a: &Mobius, b: &Mobius) -> Mobius {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn mobius_det(a: &Mobius) -> Q {
    &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0]
}

fn mobius_inverse(a: &Mobius) -> Mobius {
    let d = mobius_det(a);
    [[&a[1][1] / &d, -&a[0][1] / &d], [-&a[1][0] / &d, &a[0][0] / &d]]
}

/// Number of sections of `O(a)`: `prod (a_k + 1)`, or 0 if some `a_k < 0`.
pub fn section_space_dim(a: &[i64]) -> BigInt {
    if a.iter().any(|&x| x < 0) {
        return BigInt::zero();
    }
    a.iter().map(|&x| BigInt::from(x + 1)).product()
}

/// `H^q(O(a)) = 0` for all `q > 0` iff every `a_k >= -1`.
pub fn higher_cohomology_vanishes(a: &[i64]) -> bool {
    a.iter().all(|&x| x >= -1)
}

/// `p -> (g_1 p_{perm(1)}, ..., g_d p_{perm(d)})`, with 0-based `perm`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorAutomorphism {
    perm: Vec<usize>,
    mobius: Vec<Mobius>,
}

impl FactorAutomorphism {
    /// `perm` is 0-based here; documents use 1-based permutations.
    pub fn new(perm: Vec<usize>, mobius: Vec<Mobius>) -> Result<Self, OracleError> {
        let d = perm.len();
        if mobius.len() != d {
            return Err(OracleError::Shape(format!("{} Mobius matrices for {d} factors", mobius.len())));
        }
        let mut seen = vec![false; d];
        for &p in &perm {
            if p >= d || seen[p] {
                return Err(OracleError::BadPermutation { index: 0, d });
            }
            seen[p] = true;
        }
        if let Some(k) = mobius.iter().position(|m| mobius_det(m).is_zero()) {
            return Err(OracleError::Singular { index: 0, factor: k + 1 });
        }
        Ok(FactorAutomorphism { perm, mobius })
    }

    pub fn identity(d: usize) -> Self {
        FactorAutomorphism { perm: (0..d).collect(), mobius: vec![mobius_identity(); d] }
    }

    pub fn d(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn mobius(&self) -> &[Mobius] {
        &self.mobius
    }

    /// `self o other` as maps of points.
    pub fn compose(&self, other: &FactorAutomorphism) -> FactorAutomorphism {
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let mobius = (0..self.d()).map(|k| mobius_mul(&self.mobius[k], &other.mobius[self.perm[k]])).collect();
        FactorAutomorphism { perm, mobius }
    }

    pub fn inverse(&self) -> FactorAutomorphism {
        let d = self.d();
        let mut perm = vec![0; d];
        for (k, &p) in self.perm.iter().enumerate() {
            perm[p] = k;
        }
        let mobius = (0..d).map(|j| mobius_inverse(&self.mobius[perm[j]])).collect();
        FactorAutomorphism { perm, mobius }
    }

    pub fn power(&self, mut e: u64) -> FactorAutomorphism {
        let mut acc = FactorAutomorphism::identity(self.d());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// Induced action on multidegrees: the permutation matrix of `perm`.
    pub fn lattice_action(&self) -> Matrix {
        Matrix::permutation(&self.perm)
    }

    /// Multidegree of the pullback of a section of multidegree `a`.
    pub fn pullback_degree(&self, a: &[i64]) -> Vec<i64> {
        let mut out = vec![0; a.len()];
        for (k, &p) in self.perm.iter().enumerate() {
            out[p] = a[k];
        }
        out
    }

    /// `f -> f o self`: substitutes `x_k -> g00 x_{perm(k)} + g01 y_{perm(k)}`
    /// and `y_k -> g10 x_{perm(k)} + g11 y_{perm(k)}`.
    pub fn pullback(&self, f: &MultiSection) -> MultiSection {
        let d = self.d();
        let degree = self.pullback_degree(&f.degree);
        let mut out = MultiSection::zero(degree);
        let mut expansions: HashMap<(usize, u32, u32), Vec<Q>> = HashMap::new();
        for (exps, c) in &f.terms {
            // per source factor: coefficients indexed by the x-exponent in the target factor
            let factors: Vec<Vec<Q>> = (0..d)
                .map(|k| {
                    let (e, f) = (exps[2 * k], exps[2 * k + 1]);
                    expansions
                        .entry((k, e, f))
                        .or_insert_with(|| {
                            let g = &self.mobius[k];
                            convolve(&linear_power(&g[0][0], &g[0][1], e), &linear_power(&g[1][0], &g[1][1], f))
                        })
                        .clone()
                })
                .collect();
            let mut partial: Vec<(Vec<u32>, Q)> = vec![(vec![0; 2 * d], c.clone())];
            for (k, coeffs) in factors.iter().enumerate() {
                let target = self.perm[k];
                let total = (coeffs.len() - 1) as u32;
                let mut next = Vec::with_capacity(partial.len() * coeffs.len());
                for (e, acc) in &partial {
                    for (i, ck) in coeffs.iter().enumerate() {
                        if ck.is_zero() {
                            continue;
                        }
                        let mut e2 = e.clone();
                        e2[2 * target] = i as u32;
                        e2[2 * target + 1] = total - i as u32;
                        next.push((e2, acc * ck));
                    }
                }
                partial = next;
            }
            for (e, v) in partial {
                out.add_term(e, v);
            }
        }
        out
    }
}

/// Coefficients of `(alpha x + beta y)^e` by x-exponent.
fn linear_power(alpha: &Q, beta: &Q, e: u32) -> Vec<Q> {
    (0..=e)
        .map(|i| {
            let c = binom(&BigInt::from(e), i);
            Q::from_integer(c) * num_traits::pow(alpha.clone(), i as usize) * num_traits::pow(beta.clone(), (e - i) as usize)
        })
        .collect()
}

fn convolve(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Section of `O(degree)` on `(P^1)^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiSection {
    degree: Vec<i64>,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl MultiSection {
    pub fn zero(degree: Vec<i64>) -> Self {
        MultiSection { degree, terms: BTreeMap::new() }
    }

    /// Panics if the exponents do not have the given multidegree.
    pub fn monomial(degree: Vec<i64>, exps: Vec<u32>) -> Self {
        assert_eq!(exps.len(), 2 * degree.len());
        for (k, &a) in degree.iter().enumerate() {
            assert_eq!((exps[2 * k] + exps[2 * k + 1]) as i64, a, "monomial degree mismatch");
        }
        let mut s = Self::zero(degree);
        s.terms.insert(exps, Q::one());
        s
    }

    /// Monomial basis of the section space, in lexicographic order.
    pub fn basis(degree: &[i64]) -> Vec<MultiSection> {
        monomial_exponents(degree).into_iter().map(|e| Self::monomial(degree.to_vec(), e)).collect()
    }

    pub fn degree(&self) -> &[i64] {
        &self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MultiSection) -> MultiSection {
        assert_eq!(self.degree, other.degree, "sections of different multidegrees");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> MultiSection {
        if c.is_zero() {
            return MultiSection::zero(self.degree.clone());
        }
        MultiSection { degree: self.degree.clone(), terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn mul(&self, other: &MultiSection) -> MultiSection {
        let degree = self.degree.iter().zip(&other.degree).map(|(a, b)| a + b).collect();
        let mut out = MultiSection::zero(degree);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

fn monomial_exponents(degree: &[i64]) -> Vec<Vec<u32>> {
    if degree.iter().any(|&a| a < 0) {
        return Vec::new();
    }
    let mut out = vec![Vec::new()];
    for &a in degree {
        let a = a as u32;
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=a).rev().map(move |e| {
                    let mut v = prefix.clone();
                    v.push(e);
                    v.push(a - e);
                    v
                })
            })
            .collect();
    }
    out
}

/// Homogeneous element of the ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    pub grade: Vec<u64>,
    pub section: MultiSection,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPiece {
    pub grade: Vec<u64>,
    pub degree: Vec<i64>,
    pub basis: Vec<MultiSection>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleBundle {
    pub degree: Vec<i64>,
    pub automorphism: FactorAutomorphism,
}

/// The ring `B = sum_n H^0(L_1^{n_1} ... L_s^{n_s})` with `a . b = a sigma^m(b)`.
#[derive(Debug)]
pub struct OracleRing {
    d: usize,
    bundles: Vec<OracleBundle>,
    lifts: Mutex<HashMap<Vec<u64>, FactorAutomorphism>>,
}

impl Clone for OracleRing {
    fn clone(&self) -> Self {
        OracleRing { d: self.d, bundles: self.bundles.clone(), lifts: Mutex::new(HashMap::new()) }
    }
}

impl PartialEq for OracleRing {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.bundles == other.bundles
    }
}

impl OracleRing {
    /// The lifts must commute exactly, not only up to scalars, for the
    /// substitution product to be associative.
    pub fn new(d: usize, bundles: Vec<OracleBundle>) -> Result<Self, OracleError> {
        if bundles.is_empty() {
            return Err(OracleError::Shadow(SystemError::Empty));
        }
        for (i, b) in bundles.iter().enumerate() {
            if b.degree.len() != d || b.automorphism.d() != d {
                return Err(OracleError::Shape(format!("bundle {} does not live on (P1)^{d}", i + 1)));
            }
        }
        for i in 0..bundles.len() {
            for j in i + 1..bundles.len() {
                let (a, b) = (&bundles[i].automorphism, &bundles[j].automorphism);
                if a.compose(b) != b.compose(a) {
                    return Err(OracleError::LiftCommutationFail(i + 1, j + 1));
                }
            }
        }
        let ring = OracleRing { d, bundles, lifts: Mutex::new(HashMap::new()) };
        ring.shadow()?;
        Ok(ring)
    }

    /// Reads the `oracle` member and checks that the numerical bimodules are its shadow.
    pub fn from_document(doc: &Document) -> Result<(OracleRing, BimoduleSystem), OracleError> {
        let oracle: &OracleDoc = doc.oracle.as_ref().ok_or(OracleError::MissingOracle)?;
        let d = oracle.d;
        if d == 0 || doc.rho != d {
            return Err(OracleError::Shape(format!("oracle has d = {d} but the lattice has rank {}", doc.rho)));
        }
        if oracle.automorphisms.len() != doc.bimodules.len() {
            return Err(OracleError::Shape(format!(
                "{} automorphisms for {} bimodules",
                oracle.automorphisms.len(),
                doc.bimodules.len()
            )));
        }
        let sys = BimoduleSystem::from_document(doc)?;
        let mut bundles = Vec::with_capacity(sys.s());
        for (i, (a, b)) in oracle.automorphisms.iter().zip(sys.bimodules()).enumerate() {
            let automorphism = automorphism_from_doc(a, d, i + 1)?;
            let degree = b
                .divisor
                .coords()
                .iter()
                .map(|x| i64::try_from(x).map_err(|_| OracleError::Shape(format!("bimodule {}: degree too large", i + 1))))
                .collect::<Result<Vec<_>, _>>()?;
            if automorphism.lattice_action() != b.action {
                return Err(OracleError::ShadowMismatch { index: i + 1 });
            }
            bundles.push(OracleBundle { degree, automorphism });
        }
        let ring = OracleRing::new(d, bundles)?;
        let model = p1_power(d);
        if sys.scheme().euler() != model.euler() || sys.scheme().cone() != model.cone() {
            return Err(OracleError::Shape(format!("scheme data is not the standard model of (P1)^{d}")));
        }
        Ok((ring, sys))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundles(&self) -> &[OracleBundle] {
        &self.bundles
    }

    /// Numerical system on `(P^1)^d`: multidegrees with permutation matrices.
    pub fn shadow(&self) -> Result<BimoduleSystem, SystemError> {
        let bimodules = self
            .bundles
            .iter()
            .map(|b| Bimodule::new(DivisorClass::from_i64(&b.degree), b.automorphism.lattice_action()))
            .collect();
        BimoduleSystem::new(p1_power(self.d), bimodules)
    }

    /// Ring built from `(sigma_i^{-1})^* L_i` twisted by `sigma_i^{-1}`.
    pub fn dual(&self) -> OracleRing {
        let bundles = self
            .bundles
            .iter()
            .map(|b| {
                let inv = b.automorphism.inverse();
                OracleBundle { degree: inv.pullback_degree(&b.degree), automorphism: inv }
            })
            .collect();
        OracleRing::new(self.d, bundles).expect("inverses of commuting lifts commute")
    }

    fn check_grade(&self, n: &[u64]) -> Result<(), OracleError> {
        if n.len() != self.s() {
            return Err(OracleError::GradeLength { expected: self.s(), found: n.len() });
        }
        Ok(())
    }

    /// `sigma_1^{n_1} o ... o sigma_s^{n_s}`, cached.
    pub fn power_lift(&self, n: &[u64]) -> FactorAutomorphism {
        if let Some(hit) = self.lifts.lock().unwrap().get(n) {
            return hit.clone();
        }
        let lift = self
            .bundles
            .iter()
            .zip(n)
            .fold(FactorAutomorphism::identity(self.d), |acc, (b, &k)| acc.compose(&b.automorphism.power(k)));
        self.lifts.lock().unwrap().insert(n.to_vec(), lift.clone());
        lift
    }

    /// Multidegree of `B_n`, expanded as the tensor product of pulled-back bundles.
    pub fn piece_degree(&self, n: &[u64]) -> Vec<i64> {
        assert_eq!(n.len(), self.s());
        let mut total = vec![0i64; self.d];
        let mut prefix = FactorAutomorphism::identity(self.d);
        for (b, &k) in self.bundles.iter().zip(n) {
            let mut inner = vec![0i64; self.d];
            let mut step = FactorAutomorphism::identity(self.d);
            for _ in 0..k {
                for (x, y) in inner.iter_mut().zip(step.pullback_degree(&b.degree)) {
                    *x += y;
                }
                step = step.compose(&b.automorphism);
            }
            for (x, y) in total.iter_mut().zip(prefix.pullback_degree(&inner)) {
                *x += y;
            }
            prefix = prefix.compose(&step);
        }
        total
    }

    pub fn graded_piece(&self, n: &[u64]) -> Result<GradedPiece, OracleError> {
        self.check_grade(n)?;
        let degree = self.piece_degree(n);
        let basis = MultiSection::basis(&degree);
        Ok(GradedPiece { grade: n.to_vec(), degree, basis })
    }

    pub fn element(&self, grade: Vec<u64>, section: MultiSection) -> Result<RingElement, OracleError> {
        self.check_grade(&grade)?;
        let expected = self.piece_degree(&grade);
        if section.degree != expected {
            return Err(OracleError::DegreeMismatch { expected, found: section.degree });
        }
        Ok(RingElement { grade, section })
    }

    /// `a . b = a * (sigma^m)^* b` for `a` in `B_m`.
    pub fn multiply(&self, a: &RingElement, b: &RingElement) -> Result<RingElement, OracleError> {
        for x in [a, b] {
            self.check_grade(&x.grade)?;
            let expected = self.piece_degree(&x.grade);
            if x.section.degree != expected {
                return Err(OracleError::DegreeMismatch { expected, found: x.section.degree.clone() });
            }
        }
        let twisted = self.power_lift(&a.grade).pullback(&b.section);
        let section = a.section.mul(&twisted);
        let grade: Vec<u64> = a.grade.iter().zip(&b.grade).map(|(x, y)| x + y).collect();
        debug_assert_eq!(section.degree, self.piece_degree(&grade));
        Ok(RingElement { grade, section })
    }

    /// Random element of `B_n` with small integer coefficients on the monomial basis.
    pub fn random_element(&self, grade: &[u64], rng: &mut impl Rng) -> RingElement {
        let degree = self.piece_degree(grade);
        let mut section = MultiSection::zero(degree.clone());
        for e in monomial_exponents(&degree) {
            section.add_term(e, q(rng.gen_range(-3..=3)));
        }
        RingElement { grade: grade.to_vec(), section }
    }

    fn random_grade(&self, max: u64, rng: &mut impl Rng) -> Vec<u64> {
        (0..self.s()).map(|_| rng.gen_range(0..=max)).collect()
    }

    /// `(a b) c = a (b c)` on random homogeneous triples with grades in `[0, max_grade]^s`.
    pub fn associativity_check(&self, samples: usize, max_grade: u64, seed: u64) -> SampleReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = 0;
        for _ in 0..samples {
            let [a, b, c] = [0; 3].map(|_| {
                let g = self.random_grade(max_grade, &mut rng);
                self.random_element(&g, &mut rng)
            });
            let left = self.multiply(&self.multiply(&a, &b).unwrap(), &c).unwrap();
            let right = self.multiply(&a, &self.multiply(&b, &c).unwrap()).unwrap();
            if left != right {
                failures += 1;
            }
        }
        SampleReport { checked: samples, failures }
    }

    /// Anti-isomorphism with the dual ring: `tau(a . b) = tau(b) . tau(a)`
    /// where `a, b` live in the dual ring and `tau(a) = (sigma^n)^* a` for `a` of grade `n`.
    pub fn opposite_check(&self, samples: usize, max_grade: u64, seed: u64) -> SampleReport {
        let dual = self.dual();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tau = |x: &RingElement| RingElement {
            grade: x.grade.clone(),
            section: self.power_lift(&x.grade).pullback(&x.section),
        };
        let mut failures = 0;
        for _ in 0..samples {
            let ga = dual.random_grade(max_grade, &mut rng);
            let a = dual.random_element(&ga, &mut rng);
            let gb = dual.random_grade(max_grade, &mut rng);
            let b = dual.random_element(&gb, &mut rng);
            let left = tau(&dual.multiply(&a, &b).unwrap());
            let right = self.multiply(&tau(&b), &tau(&a));
            if right.map_or(true, |r| r != left) {
                failures += 1;
            }
        }
        SampleReport { checked: samples, failures }
    }

    /// Lift of the word `w`: `sigma_{w_1} o sigma_{w_2} o ...`.
    fn word_lift(&self, w: &[usize]) -> FactorAutomorphism {
        w.iter()
            .fold(FactorAutomorphism::identity(self.d), |acc, &i| acc.compose(&self.bundles[i].automorphism))
    }

    /// Canonical identification swapping positions `p, p+1` of `word`:
    /// `f -> ((lift of swapped prefix)^{-1})^* (lift of prefix)^* f`,
    /// where the prefix runs through the swapped pair.
    fn swap_operator(&self, word: &[usize], p: usize, f: &MultiSection) -> MultiSection {
        let before = &word[..p + 2];
        let mut after = before.to_vec();
        after.swap(p, p + 1);
        let pulled = self.word_lift(before).pullback(f);
        self.word_lift(&after).inverse().pullback(&pulled)
    }

    /// Overlap compatibility for the triple `(i, j, k)` (0-based, repeats allowed): the two ways
    /// of reordering `L_k L_j L_i` into `L_i L_j L_k` by adjacent swaps agree
    /// on the monomial basis of the triple product.
    pub fn bergman_check(&self, i: usize, j: usize, k: usize) -> Result<bool, OracleError> {
        if let Some(&bad) = [i, j, k].iter().find(|&&x| x >= self.s()) {
            return Err(OracleError::IndexOutOfRange(bad + 1));
        }
        let mut grade = vec![0u64; self.s()];
        for x in [i, j, k] {
            grade[x] += 1;
        }
        let degree = self.piece_degree(&grade);
        // (word, swap position) in order of application
        let left = [(vec![k, j, i], 0), (vec![j, k, i], 1), (vec![j, i, k], 0)];
        let right = [(vec![k, j, i], 1), (vec![k, i, j], 0), (vec![i, k, j], 1)];
        for f in MultiSection::basis(&degree) {
            let l = left.iter().fold(f.clone(), |acc, (w, p)| self.swap_operator(w, *p, &acc));
            let r = right.iter().fold(f.clone(), |acc, (w, p)| self.swap_operator(w, *p, &acc));
            if l != r || l.degree != degree {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Compares `dim B_n` with the engine's `chi(class_at(n))` for `n` in `[1, range]^s`
    /// wherever the expanded multidegree is nonnegative.
    pub fn hilbert_match(&self, sys: &BimoduleSystem, range: u64) -> HilbertMatch {
        let s = self.s();
        let mut report = HilbertMatch { compared: 0, skipped: 0, mismatches: Vec::new() };
        if range == 0 {
            return report;
        }
        let mut n = vec![1u64; s];
        loop {
            let degree = self.piece_degree(&n);
            if degree.iter().all(|&a| a >= 0) {
                let oracle_dim = BigInt::from(MultiSection::basis(&degree).len());
                debug_assert_eq!(oracle_dim, section_space_dim(&degree));
                let engine = hilbert_value(sys, &n);
                let class_ok = sys.class_at(&n) == DivisorClass::from_i64(&degree);
                report.compared += 1;
                if oracle_dim != engine || !class_ok {
                    report.mismatches.push(HilbertMismatch { grade: n.clone(), degree, oracle_dim, engine });
                }
            } else {
                report.skipped += 1;
            }
            let mut i = s;
            loop {
                if i == 0 {
                    return report;
                }
                i -= 1;
                if n[i] < range {
                    n[i] += 1;
                    for x in n.iter_mut().skip(i + 1) {
                        *x = 1;
                    }
                    break;
                }
            }
        }
    }
}

fn automorphism_from_doc(a: &AutomorphismDoc, d: usize, index: usize) -> Result<FactorAutomorphism, OracleError> {
    if a.perm.len() != d || a.mobius.len() != d {
        return Err(OracleError::Shape(format!("automorphism {index} must have {d} perm entries and {d} matrices")));
    }
    let perm: Vec<usize> = a
        .perm
        .iter()
        .map(|&p| p.checked_sub(1).ok_or(OracleError::BadPermutation { index, d }))
        .collect::<Result<_, _>>()?;
    let mobius = a
        .mobius
        .iter()
        .map(|m| [[m[0][0].0.clone(), m[0][1].0.clone()], [m[1][0].0.clone(), m[1][1].0.clone()]])
        .collect();
    FactorAutomorphism::new(perm, mobius).map_err(|e| match e {
        OracleError::BadPermutation { d, .. } => OracleError::BadPermutation { index, d },
        OracleError::Singular { factor, .. } => OracleError::Singular { index, factor },
        other => other,
    })
}

/// Document form of an automorphism (1-based perm).
pub fn automorphism_to_doc(a: &FactorAutomorphism) -> AutomorphismDoc {
    AutomorphismDoc {
        perm: a.perm.iter().map(|p| p + 1).collect(),
        mobius: a
            .mobius
            .iter()
            .map(|m| {
                [[Rat(m[0][0].clone()), Rat(m[0][1].clone())], [Rat(m[1][0].clone()), Rat(m[1][1].clone())]]
            })
            .collect(),
    }
}

impl OracleRing {
    /// Full document: the shadow system plus the oracle member.
    pub fn to_document(&self) -> Document {
        let mut doc = self.shadow().expect("validated ring").to_document();
        doc.oracle = Some(OracleDoc {
            d: self.d,
            automorphisms: self.bundles.iter().map(|b| automorphism_to_doc(&b.automorphism)).collect(),
        });
        doc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleReport {
    pub checked: usize,
    pub failures: usize,
}

impl SampleReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertMismatch {
    pub grade: Vec<u64>,
    pub degree: Vec<i64>,
    pub oracle_dim: BigInt,
    pub engine: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertMatch {
    pub compared: usize,
    pub skipped: usize,
    pub mismatches: Vec<HilbertMismatch>,
}

impl HilbertMatch {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Mobius matrix from integer entries.
pub fn mobius_from_i64(m: [[i64; 2]; 2]) -> Mobius {
    [[q(m[0][0]), q(m[0][1])], [q(m[1][0]), q(m[1][1])]]
}
