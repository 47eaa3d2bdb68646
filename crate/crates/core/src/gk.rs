//! GK-dimension of the twisted multi-homogeneous coordinate ring, read off
//! from the degree of the cube-summed Hilbert polynomial.

use num_bigint::BigInt;
use thiserror::Error;

use crate::ampleness::{self, nc_ample_verdict, Verdict, VerdictKind, Warning};
use crate::poly::MultiPoly;
use crate::system::BimoduleSystem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GkError {
    #[error("system is not NC-ample (verdict {verdict}); the Hilbert function need not agree with the Euler characteristic")]
    NotNcAmple { verdict: &'static str },
    #[error("NC-ampleness is undetermined within search bound {bound}")]
    Undetermined { bound: u64 },
    #[error("Hilbert polynomial vanishes identically; the numerical model is inconsistent")]
    DegenerateHilbert,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GkCertificate {
    pub gk: u32,
    /// Exponents `r` of the unipotent Veronese subring used.
    pub veronese_used: Vec<u64>,
    /// `H(q) = chi(class(q))` on the Veronese subring.
    pub hilbert: MultiPoly,
    /// `f(n) = sum_{q in [1,n]^s} H(q)`.
    pub box_poly: MultiPoly,
    pub lower: u64,
    pub upper: u64,
    pub ell: usize,
    pub warnings: Vec<Warning>,
    /// Ampleness threshold from the verdict.
    pub start: Vec<u64>,
}

impl GkCertificate {
    pub fn within_bounds(&self) -> bool {
        self.lower <= self.gk as u64 && self.gk as u64 <= self.upper
    }
}

/// `(dim X + 1, s ((ell + 1) dim X + 1))`.
pub fn gk_bounds(sys: &BimoduleSystem) -> (u64, u64) {
    let dim = sys.scheme().dim() as u64;
    let ell = ampleness::ell(sys.rho()) as u64;
    (dim + 1, sys.s() as u64 * ((ell + 1) * dim + 1))
}

/// `chi(class_at(n))`; equals `dim B_n` only where higher cohomology vanishes.
pub fn hilbert_value(sys: &BimoduleSystem, n: &[u64]) -> BigInt {
    sys.scheme().euler_at(&sys.class_at(n))
}

/// Hilbert polynomial of a unipotent system.
pub fn hilbert_polynomial(sys: &BimoduleSystem) -> Option<MultiPoly> {
    let symbolic = sys.symbolic_class().ok()?;
    Some(sys.scheme().euler().compose(&symbolic))
}

pub fn gk(sys: &BimoduleSystem, search_bound: u64) -> Result<GkCertificate, GkError> {
    let verdict = nc_ample_verdict(sys, search_bound);
    gk_from_verdict(sys, &verdict)
}

/// Same as [`gk`] but reuses an already computed verdict.
pub fn gk_from_verdict(sys: &BimoduleSystem, verdict: &Verdict) -> Result<GkCertificate, GkError> {
    let start = match &verdict.kind {
        VerdictKind::NcAmple { start } => start.clone(),
        VerdictKind::Undetermined { bound } => return Err(GkError::Undetermined { bound: *bound }),
        other => return Err(GkError::NotNcAmple { verdict: other.name() }),
    };
    let orders = verdict.screen.orders().expect("NC-ample systems pass the screen");
    let veronese = sys.veronese(&orders).expect("orders are positive");
    let hilbert = hilbert_polynomial(&veronese).expect("Veronese by the orders is unipotent");
    if hilbert.is_zero() {
        return Err(GkError::DegenerateHilbert);
    }
    let box_poly = hilbert.box_sum();
    let gk = box_poly.total_degree().expect("box sum of a nonzero polynomial is nonzero");
    let (lower, upper) = gk_bounds(sys);
    Ok(GkCertificate {
        gk,
        veronese_used: orders,
        hilbert,
        box_poly,
        lower,
        upper,
        ell: verdict.screen.ell,
        warnings: verdict.screen.warnings.clone(),
        start,
    })
}
