//! Numerical model of a projective scheme: Picard rank, Euler characteristic
//! polynomial and an integral ample cone.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::document::{self, Document, EulerTerm, Int, Rat};
use crate::poly::{MultiPoly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("malformed document: {0}")]
    Parse(String),
    #[error("invalid scheme: {0}")]
    Invalid(String),
    #[error("Euler characteristic is not integer-valued: {0}")]
    NotIntegerValued(#[from] PolyError),
    #[error("Euler characteristic has degree {degree}, exceeding the dimension {dim}")]
    DegreeTooHigh { degree: u32, dim: u32 },
    #[error("ample cone has no interior lattice point with coordinates in [-{radius}, {radius}]")]
    EmptyCone { radius: u64 },
}

/// Numerical class of a divisor, in a fixed basis of the lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass(pub Vec<BigInt>);

impl DivisorClass {
    pub fn zero(rho: usize) -> Self {
        DivisorClass(vec![BigInt::zero(); rho])
    }

    pub fn from_i64(v: &[i64]) -> Self {
        DivisorClass(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn to_ints(&self) -> Vec<Int> {
        self.0.iter().cloned().map(Int).collect()
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Largest interior-search radius tried before declaring the cone empty.
const MAX_SEARCH_RADIUS: u64 = 16;
/// Cap on the number of lattice points visited by the interior search.
const MAX_SEARCH_POINTS: u64 = 4_000_000;

fn search_radius(rho: usize) -> u64 {
    let mut r = MAX_SEARCH_RADIUS;
    while r > 1 {
        let side = 2 * r + 1;
        let fits = (0..rho).try_fold(1u64, |acc, _| acc.checked_mul(side).filter(|&v| v <= MAX_SEARCH_POINTS));
        if fits.is_some() {
            break;
        }
        r -= 1;
    }
    r
}

/// First lattice point strictly inside every half-space, scanning cubes of
/// growing radius so that short vectors are preferred.
fn find_interior_point(cone: &[Vec<BigInt>], rho: usize) -> Result<Vec<BigInt>, SchemeError> {
    let radius = search_radius(rho);
    let strictly_inside =
        |x: &[i64]| cone.iter().all(|row| row.iter().zip(x).map(|(a, &b)| a * b).sum::<BigInt>().is_positive());
    for r in 1..=radius as i64 {
        let mut x = vec![-r; rho];
        loop {
            if x.iter().any(|v| v.abs() == r) && strictly_inside(&x) {
                return Ok(x.into_iter().map(BigInt::from).collect());
            }
            // odometer over [-r, r]^rho
            let mut i = 0;
            while i < rho {
                if x[i] < r {
                    x[i] += 1;
                    break;
                }
                x[i] = -r;
                i += 1;
            }
            if i == rho {
                break;
            }
        }
    }
    Err(SchemeError::EmptyCone { radius })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericalScheme {
    name: String,
    dim: u32,
    rho: usize,
    euler: MultiPoly,
    cone: Vec<Vec<BigInt>>,
    interior: Vec<BigInt>,
}

impl NumericalScheme {
    pub fn new(
        name: impl Into<String>,
        dim: u32,
        rho: usize,
        euler: MultiPoly,
        cone: Vec<Vec<BigInt>>,
    ) -> Result<Self, SchemeError> {
        if rho == 0 {
            return Err(SchemeError::Invalid("Picard rank must be positive".into()));
        }
        if euler.nvars() != rho {
            return Err(SchemeError::Invalid(format!(
                "Euler polynomial has {} variables but the Picard rank is {rho}",
                euler.nvars()
            )));
        }
        if let Some(degree) = euler.total_degree() {
            if degree > dim {
                return Err(SchemeError::DegreeTooHigh { degree, dim });
            }
        }
        if cone.is_empty() {
            return Err(SchemeError::Invalid("ample cone needs at least one inequality".into()));
        }
        for (k, row) in cone.iter().enumerate() {
            if row.len() != rho {
                return Err(SchemeError::Invalid(format!(
                    "ample cone row {} has {} entries, expected {rho}",
                    k + 1,
                    row.len()
                )));
            }
        }
        let interior = find_interior_point(&cone, rho)?;
        Ok(NumericalScheme { name: name.into(), dim, rho, euler, cone, interior })
    }

    pub fn from_document(doc: &Document) -> Result<Self, SchemeError> {
        let mut terms: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (k, t) in doc.euler.iter().enumerate() {
            if t.exponents.len() != doc.rho {
                return Err(SchemeError::Invalid(format!(
                    "Euler term {} has {} exponents, expected {}",
                    k + 1,
                    t.exponents.len(),
                    doc.rho
                )));
            }
            *terms.entry(t.exponents.clone()).or_insert_with(BigRational::zero) += &t.coeff.0;
        }
        let euler = MultiPoly::from_monomials(doc.rho, &terms)?;
        let cone = doc.ample_cone.iter().map(|row| row.iter().map(|x| x.0.clone()).collect()).collect();
        Self::new(doc.name.clone(), doc.dim, doc.rho, euler, cone)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    /// Euler characteristic as a polynomial in the class coordinates.
    pub fn euler(&self) -> &MultiPoly {
        &self.euler
    }

    /// Rows `A_k` of the cone description `A_k . x > 0`.
    pub fn cone(&self) -> &[Vec<BigInt>] {
        &self.cone
    }

    /// A lattice point strictly inside the ample cone.
    pub fn interior_point(&self) -> DivisorClass {
        DivisorClass(self.interior.clone())
    }

    pub fn cone_value(&self, k: usize, class: &DivisorClass) -> BigInt {
        self.cone[k].iter().zip(class.coords()).map(|(a, x)| a * x).sum()
    }

    pub fn is_ample(&self, class: &DivisorClass) -> bool {
        (0..self.cone.len()).all(|k| self.cone_value(k, class).is_positive())
    }

    pub fn euler_at(&self, class: &DivisorClass) -> BigInt {
        self.euler.eval(class.coords())
    }

    /// `X x Y` with lattice `A(X) + A(Y)`, Euler polynomial `chi_X * chi_Y`
    /// and the product of the ample cones.
    pub fn product(x: &NumericalScheme, y: &NumericalScheme) -> NumericalScheme {
        let rho = x.rho + y.rho;
        let mut cone = Vec::with_capacity(x.cone.len() + y.cone.len());
        for row in &x.cone {
            let mut r = row.clone();
            r.resize(rho, BigInt::zero());
            cone.push(r);
        }
        for row in &y.cone {
            let mut r = vec![BigInt::zero(); x.rho];
            r.extend(row.iter().cloned());
            cone.push(r);
        }
        let mut interior = x.interior.clone();
        interior.extend(y.interior.iter().cloned());
        NumericalScheme {
            name: format!("{}x{}", x.name, y.name),
            dim: x.dim + y.dim,
            rho,
            euler: x.euler.tensor(&y.euler),
            cone,
            interior,
        }
    }

    pub fn to_document(&self) -> Document {
        let euler = self
            .euler
            .to_monomials()
            .into_iter()
            .map(|(exponents, c)| EulerTerm { coeff: Rat(c), exponents })
            .rev()
            .collect();
        Document {
            name: self.name.clone(),
            dim: self.dim,
            rho: self.rho,
            euler,
            ample_cone: self.cone.iter().map(|r| r.iter().cloned().map(Int).collect()).collect(),
            bimodules: vec![],
            oracle: None,
            notes: vec![],
        }
    }
}

/// Parses a scheme from JSON text.
pub fn load_scheme(text: &str) -> Result<NumericalScheme, SchemeError> {
    let doc = Document::parse(text).map_err(|e| SchemeError::Parse(e.to_string()))?;
    NumericalScheme::from_document(&doc)
}

pub fn builtin_scheme(name: &str) -> Option<NumericalScheme> {
    document::builtin(name).map(|d| NumericalScheme::from_document(&d).expect("built-in schemes are valid"))
}

/// `(P^1)^d` with the standard multidegree lattice.
pub fn p1_power(d: usize) -> NumericalScheme {
    assert!(d >= 1);
    let p1 = builtin_scheme("P1").unwrap();
    let mut x = p1.clone();
    for _ in 1..d {
        x = NumericalScheme::product(&x, &p1);
    }
    x.name = if d == 1 { "P1".into() } else { format!("(P1)^{d}") };
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> NumericalScheme {
        builtin_scheme("P2").unwrap()
    }

    #[test]
    fn p2_euler_values() {
        let x = p2();
        let vals: Vec<_> = (0..4).map(|d| x.euler_at(&DivisorClass::from_i64(&[d]))).collect();
        assert_eq!(vals, [1, 3, 6, 10].map(BigInt::from));
        assert_eq!(x.euler_at(&DivisorClass::from_i64(&[-3])), BigInt::from(1));
        assert!(x.is_ample(&DivisorClass::from_i64(&[1])));
        assert!(!x.is_ample(&DivisorClass::from_i64(&[0])));
    }

    #[test]
    fn p1xp1_cone() {
        let x = builtin_scheme("P1xP1").unwrap();
        assert!(x.is_ample(&DivisorClass::from_i64(&[1, 1])));
        assert!(!x.is_ample(&DivisorClass::from_i64(&[1, 0])));
        assert_eq!(x.euler_at(&DivisorClass::from_i64(&[2, 3])), BigInt::from(12));
    }

    #[test]
    fn rejects_half_integer_euler() {
        let text = r#"{"name":"bad","dim":1,"rho":1,
            "euler":[{"coeff":"1/2","exponents":[1]}],"ample_cone":[[1]]}"#;
        assert!(matches!(load_scheme(text), Err(SchemeError::NotIntegerValued(_))));
    }

    #[test]
    fn rejects_empty_cone() {
        let text = r#"{"name":"bad","dim":1,"rho":2,
            "euler":[{"coeff":"1","exponents":[0,0]}],"ample_cone":[[1,0],[-1,0]]}"#;
        assert!(matches!(load_scheme(text), Err(SchemeError::EmptyCone { radius: 16 })));
    }

    #[test]
    fn rejects_excess_degree() {
        let text = r#"{"name":"bad","dim":1,"rho":1,
            "euler":[{"coeff":"1","exponents":[2]}],"ample_cone":[[1]]}"#;
        assert!(matches!(load_scheme(text), Err(SchemeError::DegreeTooHigh { degree: 2, dim: 1 })));
    }

    #[test]
    fn narrow_cone_interior() {
        // 5a - b > 0 and -4a + b > 0: first interior point (1, 5) is off the axes
        let text = r#"{"name":"wedge","dim":1,"rho":2,
            "euler":[{"coeff":"1","exponents":[0,0]}],"ample_cone":[[5,-1],[-4,1]]}"#;
        let x = load_scheme(text).unwrap();
        assert!(x.is_ample(&x.interior_point()));
    }

    #[test]
    fn product_and_roundtrip() {
        let x = NumericalScheme::product(&builtin_scheme("P1").unwrap(), &builtin_scheme("P1").unwrap());
        let y = builtin_scheme("P1xP1").unwrap();
        assert_eq!(x.euler(), y.euler());
        assert_eq!(x.cone(), y.cone());
        let doc = p2().to_document();
        let back = NumericalScheme::from_document(&doc).unwrap();
        assert_eq!(back, p2());
        assert_eq!(p1_power(3).rho(), 3);
    }
}
