//! Systems of commuting twisted divisor classes `(D_i, M_i)` over a numerical
//! scheme, where `M_i` is the pullback action on the numerical lattice.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::document::{BimoduleDoc, Document, Int};
use crate::lattice::{self, Matrix};
use crate::poly::MultiPoly;
use crate::scheme::{DivisorClass, NumericalScheme, SchemeError};

/// Errors carry 1-based bimodule indices.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("a bimodule system needs at least one bimodule")]
    Empty,
    #[error("bimodule {index}: {detail}")]
    Shape { index: usize, detail: String },
    #[error("bimodule {0}: action is not invertible over the integers")]
    NonInvertible(usize),
    #[error("actions of bimodules {0} and {1} do not commute")]
    MatrixCommutationFail(usize, usize),
    #[error("classes of bimodules {0} and {1} do not commute: D_i + M_i D_j != D_j + M_j D_i")]
    ClassCommutationFail(usize, usize),
    #[error("bimodule {0}: action is not unipotent")]
    UnipotentRequired(usize),
    #[error("expected {expected} bimodule(s), found {found}")]
    Arity { expected: usize, found: usize },
    #[error("exponent tuple has length {found}, expected {expected}")]
    ExponentLength { expected: usize, found: usize },
    #[error("exponents must be positive")]
    NonPositiveExponent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bimodule {
    pub divisor: DivisorClass,
    /// Numerical pullback on the lattice.
    pub action: Matrix,
    /// User assertion of the equivariant-pullback hypothesis; never verified.
    pub star: bool,
}

impl Bimodule {
    pub fn new(divisor: DivisorClass, action: Matrix) -> Self {
        Bimodule { divisor, action, star: false }
    }
}

pub const PRODUCT_LATTICE_NOTE: &str = "product lattice is the direct sum of the factor lattices; \
     the numerical lattice of the product may have larger rank, and verdicts are relative to the sublattice";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BimoduleSystem {
    scheme: NumericalScheme,
    bimodules: Vec<Bimodule>,
    notes: Vec<String>,
}

impl BimoduleSystem {
    pub fn new(scheme: NumericalScheme, bimodules: Vec<Bimodule>) -> Result<Self, SystemError> {
        Self::with_notes(scheme, bimodules, Vec::new())
    }

    pub fn with_notes(
        scheme: NumericalScheme,
        bimodules: Vec<Bimodule>,
        notes: Vec<String>,
    ) -> Result<Self, SystemError> {
        if bimodules.is_empty() {
            return Err(SystemError::Empty);
        }
        let rho = scheme.rho();
        for (i, b) in bimodules.iter().enumerate() {
            if b.divisor.len() != rho {
                return Err(SystemError::Shape {
                    index: i + 1,
                    detail: format!("divisor has {} entries, expected {rho}", b.divisor.len()),
                });
            }
            if b.action.rho() != rho {
                return Err(SystemError::Shape {
                    index: i + 1,
                    detail: format!("action is {0}x{0}, expected {rho}x{rho}", b.action.rho()),
                });
            }
            if !b.action.det().abs().is_one() {
                return Err(SystemError::NonInvertible(i + 1));
            }
        }
        for i in 0..bimodules.len() {
            for j in i + 1..bimodules.len() {
                let (a, b) = (&bimodules[i], &bimodules[j]);
                if !a.action.commutes_with(&b.action) {
                    return Err(SystemError::MatrixCommutationFail(i + 1, j + 1));
                }
                let lhs = a.divisor.add(&DivisorClass(a.action.mul_vec(b.divisor.coords())));
                let rhs = b.divisor.add(&DivisorClass(b.action.mul_vec(a.divisor.coords())));
                if lhs != rhs {
                    return Err(SystemError::ClassCommutationFail(i + 1, j + 1));
                }
            }
        }
        Ok(BimoduleSystem { scheme, bimodules, notes })
    }

    pub fn from_document(doc: &Document) -> Result<Self, SystemError> {
        let scheme = NumericalScheme::from_document(doc)?;
        let mut bimodules = Vec::with_capacity(doc.bimodules.len());
        for (i, b) in doc.bimodules.iter().enumerate() {
            let rows: Vec<Vec<BigInt>> = b.matrix.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect();
            if rows.len() != doc.rho || rows.iter().any(|r| r.len() != doc.rho) {
                return Err(SystemError::Shape {
                    index: i + 1,
                    detail: format!("matrix must be {0}x{0}", doc.rho),
                });
            }
            let action = Matrix::from_rows(rows).map_err(|e| SystemError::Shape { index: i + 1, detail: e.to_string() })?;
            bimodules.push(Bimodule {
                divisor: DivisorClass(b.divisor.iter().map(|x| x.0.clone()).collect()),
                action,
                star: b.star,
            });
        }
        Self::with_notes(scheme, bimodules, doc.notes.clone())
    }

    pub fn to_document(&self) -> Document {
        let mut doc = self.scheme.to_document();
        doc.bimodules = self
            .bimodules
            .iter()
            .map(|b| BimoduleDoc {
                divisor: b.divisor.to_ints(),
                matrix: b.action.rows().map(|r| r.iter().cloned().map(Int).collect()).collect(),
                star: b.star,
            })
            .collect();
        doc.notes = self.notes.clone();
        doc
    }

    pub fn scheme(&self) -> &NumericalScheme {
        &self.scheme
    }

    pub fn bimodules(&self) -> &[Bimodule] {
        &self.bimodules
    }

    pub fn bimodule(&self, i: usize) -> &Bimodule {
        &self.bimodules[i]
    }

    /// Number of bimodules.
    pub fn s(&self) -> usize {
        self.bimodules.len()
    }

    pub fn rho(&self) -> usize {
        self.scheme.rho()
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn star_flags(&self) -> Vec<bool> {
        self.bimodules.iter().map(|b| b.star).collect()
    }

    fn check_len(&self, n: &[u64]) -> Result<(), SystemError> {
        if n.len() != self.s() {
            return Err(SystemError::ExponentLength { expected: self.s(), found: n.len() });
        }
        Ok(())
    }

    /// `prod_a M_a^{n_a}`.
    pub fn action_power(&self, n: &[u64]) -> Matrix {
        assert_eq!(n.len(), self.s());
        let mut acc = Matrix::identity(self.rho());
        for (b, &k) in self.bimodules.iter().zip(n) {
            acc = &acc * &b.action.pow(k);
        }
        acc
    }

    /// Class of the degree-`n` piece:
    /// `sum_a (prod_{b<a} M_b^{n_b}) (sum_{m<n_a} M_a^m) D_a`.
    ///
    /// Panics if `n` has the wrong length.
    pub fn class_at(&self, n: &[u64]) -> DivisorClass {
        assert_eq!(n.len(), self.s(), "exponent tuple length must equal s");
        let rho = self.rho();
        let mut prefix = Matrix::identity(rho);
        let mut total = DivisorClass::zero(rho);
        for (b, &k) in self.bimodules.iter().zip(n) {
            let (sum, power) = lattice::geometric_sum_and_power(&b.action, k);
            let term = prefix.mul_vec(&sum.mul_vec(b.divisor.coords()));
            total = total.add(&DivisorClass(term));
            prefix = &prefix * &power;
        }
        total
    }

    /// Polynomial class vector `p(n)` with `p(n) = class_at(n)` for all `n >= 0`,
    /// using `M^n = sum_c C(n,c) N^c` and `sum_{m<n} M^m = sum_d C(n,d+1) N^d`.
    pub fn symbolic_class(&self) -> Result<Vec<MultiPoly>, SystemError> {
        let s = self.s();
        let rho = self.rho();
        let mut nilpotents = Vec::with_capacity(s);
        for (i, b) in self.bimodules.iter().enumerate() {
            if !lattice::is_unipotent(&b.action) {
                return Err(SystemError::UnipotentRequired(i + 1));
            }
            let n = &b.action - &Matrix::identity(rho);
            let degree = lattice::nilpotency_degree(&n).expect("unipotent");
            let powers: Vec<Matrix> = std::iter::successors(Some(Matrix::identity(rho)), |p| Some(p * &n))
                .take(degree)
                .collect();
            nilpotents.push(powers);
        }
        let mut total = vec![MultiPoly::zero(s); rho];
        for a in 0..s {
            let d = self.bimodules[a].divisor.coords();
            let mut v = vec![MultiPoly::zero(s); rho];
            for (k, nk) in nilpotents[a].iter().enumerate() {
                let basis = MultiPoly::binomial(s, a, k as u32 + 1);
                for (vi, c) in v.iter_mut().zip(nk.mul_vec(d)) {
                    *vi = vi.add(&basis.scale(&c));
                }
            }
            for b in (0..a).rev() {
                v = apply_power_series(&nilpotents[b], b, &v);
            }
            for (t, vi) in total.iter_mut().zip(&v) {
                *t = t.add(vi);
            }
        }
        Ok(total)
    }

    /// `(D_i, M_i) -> (M_i^{-1} D_i, M_i^{-1})`.
    pub fn dual(&self) -> BimoduleSystem {
        let bimodules = self
            .bimodules
            .iter()
            .map(|b| {
                let inv = b.action.inverse().expect("validated actions are unimodular");
                Bimodule { divisor: DivisorClass(inv.mul_vec(b.divisor.coords())), action: inv, star: b.star }
            })
            .collect();
        BimoduleSystem::with_notes(self.scheme.clone(), bimodules, self.notes.clone())
            .expect("duals of commuting systems commute")
    }

    /// Multi-Veronese system: `D_i' = (sum_{m<n_i} M_i^m) D_i`, `M_i' = M_i^{n_i}`.
    pub fn veronese(&self, n: &[u64]) -> Result<BimoduleSystem, SystemError> {
        self.check_len(n)?;
        if n.contains(&0) {
            return Err(SystemError::NonPositiveExponent);
        }
        let bimodules = self
            .bimodules
            .iter()
            .zip(n)
            .map(|(b, &k)| {
                let (sum, power) = lattice::geometric_sum_and_power(&b.action, k);
                Bimodule { divisor: DivisorClass(sum.mul_vec(b.divisor.coords())), action: power, star: b.star }
            })
            .collect();
        Ok(BimoduleSystem::with_notes(self.scheme.clone(), bimodules, self.notes.clone())
            .expect("Veronese systems of commuting systems commute"))
    }

    /// The single bimodule `L_1^{n_1} ... L_s^{n_s}` twisted by `prod M_i^{n_i}`.
    pub fn combined_single(&self, n: &[u64]) -> Result<BimoduleSystem, SystemError> {
        self.check_len(n)?;
        if n.contains(&0) {
            return Err(SystemError::NonPositiveExponent);
        }
        let b = Bimodule::new(self.class_at(n), self.action_power(n));
        Ok(BimoduleSystem::with_notes(self.scheme.clone(), vec![b], self.notes.clone())
            .expect("single bimodules are valid"))
    }

    /// Two copies of the single bimodule, grading the Rees-type algebra.
    pub fn rees(&self) -> Result<BimoduleSystem, SystemError> {
        if self.s() != 1 {
            return Err(SystemError::Arity { expected: 1, found: self.s() });
        }
        let b = self.bimodules[0].clone();
        Ok(BimoduleSystem::with_notes(self.scheme.clone(), vec![b.clone(), b], self.notes.clone())
            .expect("a bimodule commutes with itself"))
    }

    /// System on `X x Y`: `(D + 0, M + I)` for each bimodule of `x`, `(0 + E, I + P)` for `y`.
    pub fn product(x: &BimoduleSystem, y: &BimoduleSystem) -> BimoduleSystem {
        let scheme = NumericalScheme::product(&x.scheme, &y.scheme);
        let (rx, ry) = (x.rho(), y.rho());
        let mut bimodules = Vec::with_capacity(x.s() + y.s());
        for b in &x.bimodules {
            let mut d = b.divisor.0.clone();
            d.extend(DivisorClass::zero(ry).0);
            bimodules.push(Bimodule {
                divisor: DivisorClass(d),
                action: Matrix::direct_sum(&b.action, &Matrix::identity(ry)),
                star: b.star,
            });
        }
        for b in &y.bimodules {
            let mut d = DivisorClass::zero(rx).0;
            d.extend(b.divisor.0.iter().cloned());
            bimodules.push(Bimodule {
                divisor: DivisorClass(d),
                action: Matrix::direct_sum(&Matrix::identity(rx), &b.action),
                star: b.star,
            });
        }
        let mut notes: Vec<String> = x.notes.iter().chain(&y.notes).cloned().collect();
        if !notes.iter().any(|n| n == PRODUCT_LATTICE_NOTE) {
            notes.push(PRODUCT_LATTICE_NOTE.to_string());
        }
        BimoduleSystem::with_notes(scheme, bimodules, notes).expect("block systems commute")
    }

    /// True iff every action is unipotent.
    pub fn is_unipotent(&self) -> bool {
        self.bimodules.iter().all(|b| lattice::is_unipotent(&b.action))
    }
}

/// `v -> sum_c C(n_var, c) N^c v`, the symbolic form of `M^{n_var} v`.
fn apply_power_series(powers: &[Matrix], var: usize, v: &[MultiPoly]) -> Vec<MultiPoly> {
    let rho = v.len();
    let s = v.first().map_or(0, MultiPoly::nvars);
    let mut out = vec![MultiPoly::zero(s); rho];
    for (c, nc) in powers.iter().enumerate() {
        let basis = MultiPoly::binomial(s, var, c as u32);
        for (i, o) in out.iter_mut().enumerate() {
            let mut row = MultiPoly::zero(s);
            for (j, vj) in v.iter().enumerate() {
                let e = nc.get(i, j);
                if !num_traits::Zero::is_zero(e) {
                    row = row.add(&vj.scale(e));
                }
            }
            *o = o.add(&row.mul(&basis));
        }
    }
    out
}

/// Parses and validates a system from JSON text.
pub fn load_system(text: &str) -> Result<BimoduleSystem, SystemError> {
    let doc = Document::parse(text).map_err(|e| SchemeError::Parse(e.to_string()))?;
    BimoduleSystem::from_document(&doc)
}
