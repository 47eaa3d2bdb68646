//! Integer-valued multivariate polynomials stored in the binomial basis.
//!
//! A polynomial is a finite sum `sum c_k prod_i binom(n_i, k_i)` with integer
//! coefficients `c_k`. Every such sum takes integer values at integer points,
//! and every integer-valued polynomial has exactly one such representation.
//! On the nonnegative orthant each basis element is nonnegative, which is what
//! makes the positivity certificates below sound.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial is not integer-valued: binomial-basis coefficient {coefficient} at exponents {exponents:?}")]
    NotIntegerValued { exponents: Vec<u32>, coefficient: BigRational },
    #[error("exponent tuple {exponents:?} does not have {nvars} entries")]
    Arity { exponents: Vec<u32>, nvars: usize },
}

/// `binom(n, k)` for any integer `n`.
pub fn binom(n: &BigInt, k: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= n - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

fn binom_u(n: u32, k: u32) -> BigInt {
    if k > n {
        BigInt::zero()
    } else {
        binom(&BigInt::from(n), k)
    }
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `binom(x,a) binom(x,b) = sum_k binom(k,a) binom(a,k-b) binom(x,k)`,
/// returned as `(k, coefficient)` pairs.
fn binom_product(a: u32, b: u32) -> Vec<(u32, BigInt)> {
    (a.max(b)..=a + b)
        .map(|k| (k, binom_u(k, a) * binom_u(a, k - b)))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// Stirling numbers of the second kind `S(e, j)` for `j = 0..=e`.
fn stirling2_row(e: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for n in 1..=e {
        let mut next = vec![BigInt::zero(); n as usize + 1];
        for j in 1..=n as usize {
            let keep = if j < row.len() { &row[j] * BigInt::from(j) } else { BigInt::zero() };
            next[j] = keep + &row[j - 1];
        }
        row = next;
    }
    row
}

/// Coefficients of the falling factorial `x (x-1) ... (x-k+1)` in powers of `x`.
fn falling_factorial_row(k: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for i in 0..k {
        let mut next = vec![BigInt::zero(); row.len() + 1];
        for (j, c) in row.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * BigInt::from(i);
        }
        row = next;
    }
    row
}

/// Integer-valued polynomial in `nvars` variables, binomial basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::from_binomial_terms(nvars, [(vec![0; nvars], c.into())])
    }

    /// The polynomial `n_i` (which is also `binom(n_i, 1)`).
    pub fn variable(nvars: usize, i: usize) -> Self {
        Self::binomial(nvars, i, 1)
    }

    /// The single basis element `binom(n_i, k)`.
    pub fn binomial(nvars: usize, i: usize, k: u32) -> Self {
        let mut e = vec![0; nvars];
        e[i] = k;
        Self::from_binomial_terms(nvars, [(e, BigInt::one())])
    }

    pub fn from_binomial_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>,
    ) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent tuple length must equal nvars");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
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

    /// Converts a monomial-basis polynomial with rational coefficients.
    pub fn from_monomials(
        nvars: usize,
        terms: &BTreeMap<Vec<u32>, BigRational>,
    ) -> Result<Self, PolyError> {
        let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(PolyError::Arity { exponents: e.clone(), nvars });
            }
            if c.is_zero() {
                continue;
            }
            // x^e = sum_j S(e,j) j! binom(x,j), per variable
            let mut partial: Vec<(Vec<u32>, BigInt)> = vec![(Vec::new(), BigInt::one())];
            for &ei in e {
                let row = stirling2_row(ei);
                let mut next = Vec::new();
                for (pe, pc) in &partial {
                    for (j, s) in row.iter().enumerate() {
                        if s.is_zero() {
                            continue;
                        }
                        let mut ne = pe.clone();
                        ne.push(j as u32);
                        next.push((ne, pc * s * factorial(j as u32)));
                    }
                }
                partial = next;
            }
            for (pe, pc) in partial {
                *acc.entry(pe).or_insert_with(BigRational::zero) += c * BigRational::from_integer(pc);
            }
        }
        let mut p = Self::zero(nvars);
        for (e, c) in acc {
            if c.is_zero() {
                continue;
            }
            if !c.is_integer() {
                return Err(PolyError::NotIntegerValued { exponents: e, coefficient: c });
            }
            p.terms.insert(e, c.to_integer());
        }
        Ok(p)
    }

    /// Expansion back into the monomial basis.
    pub fn to_monomials(&self) -> BTreeMap<Vec<u32>, BigRational> {
        let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut partial: Vec<(Vec<u32>, BigRational)> =
                vec![(Vec::new(), BigRational::from_integer(c.clone()))];
            for &k in e {
                let row = falling_factorial_row(k);
                let kf = factorial(k);
                let mut next = Vec::new();
                for (pe, pc) in &partial {
                    for (j, s) in row.iter().enumerate() {
                        if s.is_zero() {
                            continue;
                        }
                        let mut ne = pe.clone();
                        ne.push(j as u32);
                        next.push((ne, pc * BigRational::new(s.clone(), kf.clone())));
                    }
                }
                partial = next;
            }
            for (pe, pc) in partial {
                *acc.entry(pe).or_insert_with(BigRational::zero) += pc;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        acc
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigInt> {
        &self.terms
    }

    pub fn coeff(&self, e: &[u32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn eval(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.nvars, "evaluation point has wrong arity");
        let mut tables: Vec<Vec<BigInt>> = Vec::with_capacity(self.nvars);
        for (v, n) in point.iter().enumerate() {
            let kmax = self.degree_in(v).unwrap_or(0);
            let mut row = vec![BigInt::one()];
            for k in 0..kmax {
                let next = &row[k as usize] * (n - BigInt::from(k)) / BigInt::from(k + 1);
                row.push(next);
            }
            tables.push(row);
        }
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().enumerate().fold(c.clone(), |acc, (v, &k)| acc * &tables[v][k as usize])
            })
            .sum()
    }

    pub fn eval_u64(&self, point: &[u64]) -> BigInt {
        let p: Vec<BigInt> = point.iter().map(|&x| BigInt::from(x)).collect();
        self.eval(&p)
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars, "variable counts must agree");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, c: &BigInt) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, other.nvars, "variable counts must agree");
        let mut acc: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut partial: Vec<(Vec<u32>, BigInt)> = vec![(Vec::new(), ca * cb)];
                for v in 0..self.nvars {
                    let expansion = binom_product(ea[v], eb[v]);
                    let mut next = Vec::with_capacity(partial.len() * expansion.len());
                    for (pe, pc) in &partial {
                        for (k, kc) in &expansion {
                            let mut ne = pe.clone();
                            ne.push(*k);
                            next.push((ne, pc * kc));
                        }
                    }
                    partial = next;
                }
                for (e, c) in partial {
                    *acc.entry(e).or_insert_with(BigInt::zero) += c;
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        MultiPoly { nvars: self.nvars, terms: acc }
    }

    /// Exact division of every coefficient; panics if some division is inexact.
    fn div_exact(&self, d: &BigInt) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let (q, r) = c.div_rem(d);
                    assert!(r.is_zero(), "inexact division of an integer-valued polynomial");
                    (e.clone(), q)
                })
                .collect(),
        }
    }

    /// `binom(self, k)`, again integer-valued.
    pub fn binomial_of(&self, k: u32) -> MultiPoly {
        let mut acc = Self::constant(self.nvars, 1);
        for i in 0..k {
            acc = acc.mul(&self.sub(&Self::constant(self.nvars, i)));
        }
        acc.div_exact(&factorial(k))
    }

    /// Substitutes `subs[i]` for the `i`-th variable.
    pub fn compose(&self, subs: &[MultiPoly]) -> MultiPoly {
        assert_eq!(subs.len(), self.nvars, "one substitution per variable");
        let m = subs.first().map_or(0, MultiPoly::nvars);
        let mut cache: BTreeMap<(usize, u32), MultiPoly> = BTreeMap::new();
        let mut out = Self::zero(m);
        for (e, c) in &self.terms {
            let mut term = Self::constant(m, c.clone());
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let factor = cache.entry((v, k)).or_insert_with(|| subs[v].binomial_of(k));
                term = term.mul(factor);
            }
            out = out.add(&term);
        }
        out
    }

    /// `q(n) = p(n + t)`, using `binom(x+t,k) = sum_j binom(t,k-j) binom(x,j)`.
    pub fn shift(&self, t: &[u64]) -> MultiPoly {
        assert_eq!(t.len(), self.nvars, "shift has wrong arity");
        let mut acc: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut partial: Vec<(Vec<u32>, BigInt)> = vec![(Vec::new(), c.clone())];
            for (v, &k) in e.iter().enumerate() {
                let tv = BigInt::from(t[v]);
                let mut next = Vec::new();
                for (pe, pc) in &partial {
                    for j in 0..=k {
                        let b = binom(&tv, k - j);
                        if b.is_zero() {
                            continue;
                        }
                        let mut ne = pe.clone();
                        ne.push(j);
                        next.push((ne, pc * b));
                    }
                }
                partial = next;
            }
            for (e, c) in partial {
                *acc.entry(e).or_insert_with(BigInt::zero) += c;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        MultiPoly { nvars: self.nvars, terms: acc }
    }

    /// Polynomial in disjoint variables: `(self ⊗ other)(x, y) = self(x) other(y)`.
    pub fn tensor(&self, other: &MultiPoly) -> MultiPoly {
        let nvars = self.nvars + other.nvars;
        let mut p = Self::zero(nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = ea.clone();
                e.extend_from_slice(eb);
                p.add_term(e, ca * cb);
            }
        }
        p
    }

    /// Univariate `f(n) = sum_{1 <= n_i <= n} p(n_1, ..., n_s)` in closed form.
    ///
    /// Per variable the hockey-stick identity gives
    /// `sum_{x=1}^n binom(x,k) = binom(n,k+1) + binom(n,k) - [k = 0]`.
    pub fn box_sum(&self) -> MultiPoly {
        let mut out = Self::zero(1);
        for (e, c) in &self.terms {
            let mut term = Self::constant(1, c.clone());
            for &k in e {
                let mut factor = Self::binomial(1, 0, k + 1).add(&Self::binomial(1, 0, k));
                if k == 0 {
                    factor = factor.sub(&Self::constant(1, 1));
                }
                term = term.mul(&factor);
            }
            out = out.add(&term);
        }
        out
    }

    /// Univariate restriction `g(t) = p(base + t * direction)`, recovered in the
    /// binomial basis from forward differences at `t = 0..=deg`.
    pub fn restrict_to_ray(&self, base: &[u64], direction: &[u64]) -> MultiPoly {
        let deg = self.total_degree().unwrap_or(0);
        let values: Vec<BigInt> = (0..=deg as u64)
            .map(|t| {
                let pt: Vec<u64> = base.iter().zip(direction).map(|(b, d)| b + t * d).collect();
                self.eval_u64(&pt)
            })
            .collect();
        let mut diffs = values;
        let mut coeffs = Vec::with_capacity(diffs.len());
        while !diffs.is_empty() {
            coeffs.push(diffs[0].clone());
            diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
        }
        Self::from_binomial_terms(
            1,
            coeffs.into_iter().enumerate().map(|(k, c)| (vec![k as u32], c)),
        )
    }

    /// Coefficients of the univariate polynomial in the monomial basis,
    /// lowest degree first. Panics unless `nvars == 1`.
    pub fn univariate_monomial_coeffs(&self) -> Vec<BigRational> {
        assert_eq!(self.nvars, 1, "univariate polynomial expected");
        let mono = self.to_monomials();
        let deg = self.total_degree().unwrap_or(0) as usize;
        (0..=deg)
            .map(|d| mono.get(&vec![d as u32]).cloned().unwrap_or_else(BigRational::zero))
            .collect()
    }

    /// Human-readable monomial-basis rendering with variables `vars`.
    pub fn display_monomial(&self, vars: &[&str]) -> String {
        let mono = self.to_monomials();
        if mono.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in mono.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(vars[v].to_string()),
                    _ => factors.push(format!("{}^{}", vars[v], k)),
                }
            }
            if factors.is_empty() || !a.is_one() {
                factors.insert(0, a.to_string());
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("n{i}")).collect();
        let refs: Vec<&str> = if self.nvars == 1 {
            vec!["n"]
        } else {
            names.iter().map(String::as_str).collect()
        };
        write!(f, "{}", self.display_monomial(&refs))
    }
}

/// A ray `base + t * direction` (all direction entries >= 1) along which the
/// polynomial is eventually nonpositive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayWitness {
    pub base: Vec<u64>,
    pub direction: Vec<u64>,
    /// `g(t) = p(base + t * direction)`, one variable.
    pub restriction: MultiPoly,
    /// `g(t) < 0` for every `t >= threshold` (or `g` vanishes identically).
    pub threshold: u64,
}

impl RayWitness {
    /// True when the restriction is negative beyond the threshold rather than
    /// identically zero.
    pub fn is_strict(&self) -> bool {
        !self.restriction.is_zero()
    }

    pub fn point(&self, t: u64) -> Vec<u64> {
        self.base.iter().zip(&self.direction).map(|(b, d)| b + t * d).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PositivityResult {
    /// `p(n) > 0` for every `n >= start`.
    Yes { start: Vec<u64> },
    No(RayWitness),
    Unknown { bound: u64 },
}

impl PositivityResult {
    pub fn is_yes(&self) -> bool {
        matches!(self, PositivityResult::Yes { .. })
    }
}

/// True iff every binomial coefficient is nonnegative and the constant term is positive.
fn has_positive_certificate(p: &MultiPoly) -> bool {
    p.constant_term().is_positive() && p.terms().values().all(|c| !c.is_negative())
}

/// Smallest `t0` with `g(t) < 0` for all `t >= t0`, given a univariate `g` with
/// negative leading coefficient. Cauchy's root bound caps the search.
fn negativity_threshold(g: &MultiPoly) -> u64 {
    let coeffs = g.univariate_monomial_coeffs();
    let lead = coeffs.last().expect("nonzero restriction").clone();
    debug_assert!(lead.is_negative());
    let bound = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| (c / &lead).abs())
        .fold(BigRational::zero(), |m, x| if x > m { x } else { m });
    // every real root is < 1 + bound
    let cap = (bound.floor().to_integer() + BigInt::from(2))
        .to_u64()
        .expect("root bound fits in u64");
    let mut t0 = cap;
    while t0 > 0 && g.eval(&[BigInt::from(t0 - 1)]).is_negative() {
        t0 -= 1;
    }
    t0
}

/// Certified semi-decision of eventual positivity on the nonnegative orthant.
///
/// `Yes` is searched on diagonal shifts `t * (1,...,1)` for `t = 0..=bound`;
/// `No` over bases in `{0, bound}^s` (the origin first), and for each base
/// over directions in `{1..=bound}^s` (lexicographic). A direction with strictly negative restriction is always
/// preferred; an identically vanishing restriction is reported only when no
/// strictly negative ray exists within the bound.
pub fn eventually_positive(p: &MultiPoly, search_bound: u64) -> PositivityResult {
    assert!(search_bound >= 1, "search bound must be positive");
    let s = p.nvars();
    for t in 0..=search_bound {
        let shift = vec![t; s];
        if has_positive_certificate(&p.shift(&shift)) {
            return PositivityResult::Yes { start: shift };
        }
    }
    if p.is_zero() {
        return PositivityResult::No(RayWitness {
            base: vec![0; s],
            direction: vec![1; s],
            restriction: MultiPoly::zero(1),
            threshold: 0,
        });
    }
    let bases: Vec<Vec<u64>> = (0..1u64 << s)
        .map(|mask| (0..s).map(|i| if mask >> i & 1 == 1 { search_bound } else { 0 }).collect())
        .collect();
    let mut fallback: Option<RayWitness> = None;
    for base in &bases {
        let mut direction = vec![1u64; s];
        loop {
            let g = p.restrict_to_ray(base, &direction);
            if g.is_zero() {
                if fallback.is_none() {
                    fallback = Some(RayWitness {
                        base: base.clone(),
                        direction: direction.clone(),
                        restriction: g,
                        threshold: 0,
                    });
                }
            } else {
                let deg = g.total_degree().unwrap();
                if g.coeff(&[deg]).is_negative() {
                    let threshold = negativity_threshold(&g);
                    return PositivityResult::No(RayWitness {
                        base: base.clone(),
                        direction,
                        restriction: g,
                        threshold,
                    });
                }
            }
            if !next_direction(&mut direction, search_bound) {
                break;
            }
        }
    }
    match fallback {
        Some(w) => PositivityResult::No(w),
        None => PositivityResult::Unknown { bound: search_bound },
    }
}

/// Advances to the next point of `{1..=bound}^s` in lexicographic order.
fn next_direction(direction: &mut [u64], bound: u64) -> bool {
    for i in (0..direction.len()).rev() {
        if direction[i] < bound {
            direction[i] += 1;
            for d in direction.iter_mut().skip(i + 1) {
                *d = 1;
            }
            return true;
        }
    }
    false
}
