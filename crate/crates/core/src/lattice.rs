//! Exact integer linear algebra on the numerical divisor lattice.
//!
//! Matrices follow the column-vector convention: a divisor class is a column
//! and an automorphism acts on it by left multiplication with the matrix of
//! its pullback.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("matrix must have positive rank")]
    EmptyMatrix,
    #[error("matrix is not invertible over the integers (determinant {det})")]
    NonInvertible { det: BigInt },
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Square integer matrix, row-major storage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rho: usize,
    entries: Vec<BigInt>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        let rho = rows.len();
        if rho == 0 {
            return Err(LatticeError::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(rho * rho);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != rho {
                return Err(LatticeError::NotSquare { rows: rho, row, len: r.len() });
            }
            entries.extend(r);
        }
        Ok(Matrix { rho, entries })
    }

    /// Convenience constructor for small literal matrices.
    ///
    /// Panics if the rows do not form a nonempty square.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
            .expect("literal matrix must be square and nonempty")
    }

    pub fn zero(rho: usize) -> Self {
        Matrix { rho, entries: vec![BigInt::zero(); rho * rho] }
    }

    pub fn identity(rho: usize) -> Self {
        let mut m = Self::zero(rho);
        for i in 0..rho {
            m.entries[i * rho + i] = BigInt::one();
        }
        m
    }

    /// Matrix sending basis vector `e_k` to `e_{perm[k]}` (0-based).
    pub fn permutation(perm: &[usize]) -> Self {
        let rho = perm.len();
        let mut m = Self::zero(rho);
        for (k, &target) in perm.iter().enumerate() {
            m.entries[target * rho + k] = BigInt::one();
        }
        m
    }

    /// Block-diagonal matrix `a ⊕ b`.
    pub fn direct_sum(a: &Matrix, b: &Matrix) -> Self {
        let rho = a.rho + b.rho;
        let mut m = Self::zero(rho);
        for i in 0..a.rho {
            for j in 0..a.rho {
                m.entries[i * rho + j] = a.get(i, j).clone();
            }
        }
        for i in 0..b.rho {
            for j in 0..b.rho {
                m.entries[(a.rho + i) * rho + a.rho + j] = b.get(i, j).clone();
            }
        }
        m
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.rho + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.entries.chunks(self.rho)
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rho)
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rho).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, c: &BigInt) -> Matrix {
        Matrix { rho: self.rho, entries: self.entries.iter().map(|x| x * c).collect() }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rho, "vector length must equal matrix rank");
        self.rows().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rho, "vector length must equal matrix rank");
        (0..self.rho)
            .map(|j| (0..self.rho).map(|i| &v[i] * self.get(i, j)).sum())
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rho);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn commutes_with(&self, other: &Matrix) -> bool {
        self * other == other * self
    }

    pub fn char_poly(&self) -> UniPoly {
        char_poly(self)
    }

    /// Determinant, read off the constant term of the characteristic polynomial.
    pub fn det(&self) -> BigInt {
        let c0 = self.char_poly().coeff(0);
        if self.rho.is_multiple_of(2) {
            c0
        } else {
            -c0
        }
    }

    /// Exact inverse of a unimodular matrix via Cayley-Hamilton.
    pub fn inverse(&self) -> Result<Matrix, LatticeError> {
        let p = self.char_poly();
        let c0 = p.coeff(0);
        if c0.abs() != BigInt::one() {
            return Err(LatticeError::NonInvertible { det: self.det() });
        }
        // A (A^{n-1} + c_{n-1} A^{n-2} + ... + c_1) = -c0 I
        let mut acc = Matrix::zero(self.rho);
        for k in (1..=self.rho).rev() {
            acc = &(&acc * self) + &Matrix::identity(self.rho).scale(&p.coeff(k));
        }
        Ok(acc.scale(&-c0))
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rho, rhs.rho, "matrix ranks must agree");
        let n = self.rho;
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Matrix { rho: n, entries }
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rho, rhs.rho, "matrix ranks must agree");
        Matrix {
            rho: self.rho,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rho, rhs.rho, "matrix ranks must agree");
        Matrix {
            rho: self.rho,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Dense univariate integer polynomial, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<BigInt>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `x^d - 1`
    pub fn x_pow_minus_one(d: usize) -> Self {
        let mut c = vec![BigInt::zero(); d + 1];
        c[0] = BigInt::from(-1);
        c[d] = BigInt::one();
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::new(vec![]);
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UniPoly::new(c)
    }

    /// Division by a monic polynomial; exact over the integers.
    pub fn div_rem_monic(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::new(vec![]), self.clone());
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = std::mem::take(&mut rem[i]);
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs[..dd].iter().enumerate() {
                rem[i - dd + j] -= &c * dc;
            }
            quot[i - dd] = c;
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Evaluates the polynomial at a square matrix (Horner's scheme).
    pub fn eval_matrix(&self, m: &Matrix) -> Matrix {
        let id = Matrix::identity(m.rho());
        self.coeffs
            .iter()
            .rev()
            .fold(Matrix::zero(m.rho()), |acc, c| &(&acc * m) + &id.scale(c))
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// `det(xI - m)` by the Faddeev-LeVerrier recurrence; every division is exact.
pub fn char_poly(m: &Matrix) -> UniPoly {
    let n = m.rho();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let id = Matrix::identity(n);
    let mut mk = Matrix::zero(n);
    for k in 1..=n {
        mk = &(m * &mk) + &id.scale(&c[n - k + 1]);
        let t = (m * &mk).trace();
        let (q, r) = t.div_rem(&BigInt::from(k));
        debug_assert!(r.is_zero(), "Faddeev-LeVerrier division must be exact");
        c[n - k] = -q;
    }
    UniPoly::new(c)
}

pub fn euler_phi(mut d: u64) -> u64 {
    let mut result = d;
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p) {
            while d.is_multiple_of(p) {
                d /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if d > 1 {
        result -= result / d;
    }
    result
}

/// All orders `d` whose cyclotomic polynomial could divide a degree-`rho`
/// characteristic polynomial, i.e. `phi(d) <= rho`. Uses `phi(d) >= sqrt(d/2)`.
pub fn cyclotomic_candidates(rho: usize) -> Vec<u64> {
    let rho = rho as u64;
    let limit = (2 * rho * rho).max(2);
    (1..=limit).filter(|&d| euler_phi(d) <= rho).collect()
}

/// The `d`-th cyclotomic polynomial.
pub fn cyclotomic(d: u64) -> UniPoly {
    let mut cache = BTreeMap::new();
    cyclotomic_cached(d, &mut cache)
}

fn cyclotomic_cached(d: u64, cache: &mut BTreeMap<u64, UniPoly>) -> UniPoly {
    if let Some(p) = cache.get(&d) {
        return p.clone();
    }
    let mut p = UniPoly::x_pow_minus_one(d as usize);
    for e in (1..d).filter(|e| d.is_multiple_of(*e)) {
        let (q, r) = p.div_rem_monic(&cyclotomic_cached(e, cache));
        debug_assert!(r.is_zero());
        p = q;
    }
    cache.insert(d, p.clone());
    p
}

/// Exact certificate that a matrix is quasi-unipotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicCertificate {
    /// `(d, multiplicity)` for each cyclotomic factor `Phi_d` of the characteristic polynomial.
    pub factors: Vec<(u64, usize)>,
    /// Least common multiple of the orders `d`; `m^order - I` is nilpotent.
    pub order: u64,
}

/// Decides whether every eigenvalue of `m` is a root of unity by peeling
/// cyclotomic factors off the characteristic polynomial.
///
/// Returns `Ok(None)` when some factor is not cyclotomic.
pub fn is_quasi_unipotent(m: &Matrix) -> Result<Option<CyclotomicCertificate>, LatticeError> {
    let mut rest = m.char_poly();
    let det_abs = rest.coeff(0).abs();
    if !det_abs.is_one() {
        return Err(LatticeError::NonInvertible { det: m.det() });
    }
    let mut factors = Vec::new();
    for d in cyclotomic_candidates(m.rho()) {
        let phi = cyclotomic(d);
        let mut mult = 0;
        loop {
            let (q, r) = rest.div_rem_monic(&phi);
            if !r.is_zero() {
                break;
            }
            rest = q;
            mult += 1;
        }
        if mult > 0 {
            factors.push((d, mult));
        }
    }
    if rest != UniPoly::one() {
        return Ok(None);
    }
    let order = factors.iter().fold(1u64, |acc, &(d, _)| acc.lcm(&d));
    let n = &m.pow(order) - &Matrix::identity(m.rho());
    assert!(
        n.pow(m.rho() as u64).is_zero(),
        "cyclotomic factorization implies m^{order} - I is nilpotent"
    );
    Ok(Some(CyclotomicCertificate { factors, order }))
}

/// Unipotent: all eigenvalues equal to one, i.e. `(m - I)^rho = 0`.
pub fn is_unipotent(m: &Matrix) -> bool {
    (m - &Matrix::identity(m.rho())).pow(m.rho() as u64).is_zero()
}

/// Smallest `k >= 1` with `n^k = 0`.
pub fn nilpotency_degree(n: &Matrix) -> Result<usize, LatticeError> {
    let mut p = n.clone();
    for k in 1..=n.rho() {
        if p.is_zero() {
            return Ok(k);
        }
        p = &p * n;
    }
    Err(LatticeError::NotNilpotent)
}

/// `sum_{j=0}^{n-1} m^j`, by doubling.
pub fn geometric_sum(m: &Matrix, n: u64) -> Matrix {
    geometric_sum_and_power(m, n).0
}

/// Returns `(sum_{j<n} m^j, m^n)`.
pub fn geometric_sum_and_power(m: &Matrix, n: u64) -> (Matrix, Matrix) {
    let rho = m.rho();
    if n == 0 {
        return (Matrix::zero(rho), Matrix::identity(rho));
    }
    let (half_sum, half_pow) = geometric_sum_and_power(m, n / 2);
    // S(2k) = S(k) + m^k S(k)
    let mut sum = &half_sum + &(&half_pow * &half_sum);
    let mut pow = &half_pow * &half_pow;
    if n % 2 == 1 {
        sum = &sum + &pow;
        pow = &pow * m;
    }
    (sum, pow)
}
