//! Verdict engine: quasi-unipotence screen, eventual cone-ampleness by residue
//! decomposition, and the multi- and single-bimodule ampleness verdicts.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::lattice::{self, CyclotomicCertificate, Matrix};
use crate::poly::{eventually_positive, MultiPoly, PositivityResult, RayWitness};
use crate::scheme::DivisorClass;
use crate::system::BimoduleSystem;

pub const DEFAULT_SEARCH_BOUND: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmplenessError {
    #[error("bimodule {0} is not quasi-unipotent; the eventual-ampleness test needs a passing screen")]
    NotQuasiUnipotent(usize),
    #[error("expected {expected} bimodule(s), found {found}")]
    Arity { expected: usize, found: usize },
}

/// Nilpotency bound for unipotent parts of automorphism actions: `2 * floor((rho - 1) / 2)`.
pub fn ell(rho: usize) -> usize {
    2 * ((rho.max(1) - 1) / 2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// `(M_i^{r_i} - I)^{ell + 1} != 0`: no automorphism of a projective scheme acts this way.
    GeometricRealizability { index: usize, ell: usize, nilpotency: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Warning::GeometricRealizability { index, ell, nilpotency } => write!(
                f,
                "GeometricRealizabilityWarning: bimodule {index}: unipotent part has nilpotency degree \
                 {nilpotency} > ell + 1 = {}; the action cannot come from an automorphism and GK bounds may fail",
                ell + 1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScreenEntry {
    /// 1-based bimodule index.
    pub index: usize,
    pub certificate: Option<CyclotomicCertificate>,
    /// Nilpotency degree of `M^r - I` when quasi-unipotent.
    pub nilpotency: Option<usize>,
}

impl ScreenEntry {
    pub fn passed(&self) -> bool {
        self.certificate.is_some()
    }

    pub fn order(&self) -> Option<u64> {
        self.certificate.as_ref().map(|c| c.order)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Screen {
    pub entries: Vec<ScreenEntry>,
    pub ell: usize,
    pub warnings: Vec<Warning>,
}

impl Screen {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(ScreenEntry::passed)
    }

    /// 1-based index of the first bimodule failing the screen.
    pub fn first_failure(&self) -> Option<usize> {
        self.entries.iter().find(|e| !e.passed()).map(|e| e.index)
    }

    /// Per-bimodule orders `r_i`, when the screen passed.
    pub fn orders(&self) -> Option<Vec<u64>> {
        self.entries.iter().map(ScreenEntry::order).collect()
    }

    /// `lcm(r_i)`.
    pub fn combined_order(&self) -> Option<u64> {
        use num_integer::Integer;
        self.orders().map(|o| o.iter().fold(1u64, |acc, r| acc.lcm(r)))
    }
}

pub fn quasi_unipotent_screen(sys: &BimoduleSystem) -> Screen {
    let rho = sys.rho();
    let ell = ell(rho);
    let mut entries = Vec::with_capacity(sys.s());
    let mut warnings = Vec::new();
    for (i, b) in sys.bimodules().iter().enumerate() {
        let certificate = lattice::is_quasi_unipotent(&b.action).expect("validated actions are unimodular");
        let nilpotency = certificate.as_ref().map(|c| {
            let n = &b.action.pow(c.order) - &Matrix::identity(rho);
            lattice::nilpotency_degree(&n).expect("certified unipotent part")
        });
        if let Some(k) = nilpotency {
            if k > ell + 1 {
                warnings.push(Warning::GeometricRealizability { index: i + 1, ell, nilpotency: k });
            }
        }
        entries.push(ScreenEntry { index: i + 1, certificate, nilpotency });
    }
    Screen { entries, ell, warnings }
}

/// One `(branch, functional)` positivity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchCheck {
    pub residue: Vec<u64>,
    /// 1-based cone row.
    pub functional: usize,
    /// `A_k . class(residue + r * q)` as a polynomial in `q`.
    pub polynomial: MultiPoly,
    pub result: PositivityResult,
}

/// A ray `base + t * direction` in the original grading along which a cone
/// functional is eventually nonpositive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ray {
    pub base: Vec<u64>,
    pub direction: Vec<u64>,
    pub threshold: u64,
    /// False when the functional vanishes identically along the ray.
    pub strict: bool,
}

impl Ray {
    pub fn point(&self, t: u64) -> Vec<u64> {
        self.base.iter().zip(&self.direction).map(|(b, d)| b + t * d).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventualOutcome {
    Yes { start: Vec<u64> },
    No { functional: usize, residue: Vec<u64>, witness: RayWitness, ray: Ray },
    Unknown { bound: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventualAmpleness {
    pub outcome: EventualOutcome,
    pub orders: Vec<u64>,
    pub checks: Vec<BranchCheck>,
    pub bound: u64,
}

fn residues(orders: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &r in orders {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..r).map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

/// Decides whether `class_at(m)` lies in the cone for all large `m` by
/// splitting the orthant into residue classes mod `r_i`, on each of which the
/// class is polynomial. Checks stop at the first `No` (lowest branch, then
/// lowest functional).
pub fn eventual_ampleness(sys: &BimoduleSystem, search_bound: u64) -> Result<EventualAmpleness, AmplenessError> {
    let screen = quasi_unipotent_screen(sys);
    if let Some(i) = screen.first_failure() {
        return Err(AmplenessError::NotQuasiUnipotent(i));
    }
    let orders = screen.orders().unwrap();
    let veronese = sys.veronese(&orders).expect("orders are positive");
    let symbolic = veronese.symbolic_class().expect("powers by the orders are unipotent");
    let scheme = sys.scheme();
    let s = sys.s();

    let mut checks = Vec::new();
    let mut start = vec![0u64; s];
    let mut unknown = false;
    for residue in residues(&orders) {
        let base_class = sys.class_at(&residue);
        let twist = sys.action_power(&residue);
        for (k, row) in scheme.cone().iter().enumerate() {
            // A_k . (class(c) + P_c . sym(q))
            let weights = twist.vec_mul(row);
            let mut p = MultiPoly::constant(s, scheme.cone_value(k, &base_class));
            for (w, comp) in weights.iter().zip(&symbolic) {
                p = p.add(&comp.scale(w));
            }
            let result = eventually_positive(&p, search_bound);
            match &result {
                PositivityResult::Yes { start: q0 } => {
                    for i in 0..s {
                        // smallest m with m = c (mod r) and m >= c + r q0 is c + r q0;
                        // any m > c + r (q0 - 1) in that class qualifies
                        let bound = residue[i] as i128 + orders[i] as i128 * (q0[i] as i128 - 1) + 1;
                        start[i] = start[i].max(bound.max(0) as u64);
                    }
                }
                PositivityResult::No(w) => {
                    let ray = Ray {
                        base: (0..s).map(|i| residue[i] + orders[i] * w.base[i]).collect(),
                        direction: (0..s).map(|i| orders[i] * w.direction[i]).collect(),
                        threshold: w.threshold,
                        strict: w.is_strict(),
                    };
                    let outcome = EventualOutcome::No {
                        functional: k + 1,
                        residue: residue.clone(),
                        witness: w.clone(),
                        ray,
                    };
                    checks.push(BranchCheck { residue, functional: k + 1, polynomial: p, result });
                    return Ok(EventualAmpleness { outcome, orders, checks, bound: search_bound });
                }
                PositivityResult::Unknown { .. } => unknown = true,
            }
            checks.push(BranchCheck { residue: residue.clone(), functional: k + 1, polynomial: p, result });
        }
    }
    let outcome = if unknown { EventualOutcome::Unknown { bound: search_bound } } else { EventualOutcome::Yes { start } };
    Ok(EventualAmpleness { outcome, orders, checks, bound: search_bound })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictKind {
    NcAmple { start: Vec<u64> },
    QuasiUnipotentFail { index: usize },
    EventualAmplenessFail { functional: usize, residue: Vec<u64>, ray: Ray },
    Undetermined { bound: u64 },
}

impl VerdictKind {
    pub fn name(&self) -> &'static str {
        match self {
            VerdictKind::NcAmple { .. } => "NCAmple",
            VerdictKind::QuasiUnipotentFail { .. } => "QuasiUnipotentFail",
            VerdictKind::EventualAmplenessFail { .. } => "EventualAmplenessFail",
            VerdictKind::Undetermined { .. } => "Undetermined",
        }
    }

    pub fn is_decisive(&self) -> bool {
        !matches!(self, VerdictKind::Undetermined { .. })
    }

    /// `Some(true)` for ample, `Some(false)` for either failure, `None` if undetermined.
    pub fn is_ample(&self) -> Option<bool> {
        match self {
            VerdictKind::NcAmple { .. } => Some(true),
            VerdictKind::Undetermined { .. } => None,
            _ => Some(false),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub screen: Screen,
    pub eventual: Option<EventualAmpleness>,
    pub bound: u64,
}

/// Both clauses of the criterion: every action quasi-unipotent, and the
/// classes `class_at(m)` ample for all `m >= m0`. Relative to the declared cone.
pub fn nc_ample_verdict(sys: &BimoduleSystem, search_bound: u64) -> Verdict {
    let screen = quasi_unipotent_screen(sys);
    if let Some(index) = screen.first_failure() {
        return Verdict { kind: VerdictKind::QuasiUnipotentFail { index }, screen, eventual: None, bound: search_bound };
    }
    let eventual = eventual_ampleness(sys, search_bound).expect("screen passed");
    let kind = match &eventual.outcome {
        EventualOutcome::Yes { start } => VerdictKind::NcAmple { start: start.clone() },
        EventualOutcome::No { functional, residue, ray, .. } => {
            VerdictKind::EventualAmplenessFail { functional: *functional, residue: residue.clone(), ray: ray.clone() }
        }
        EventualOutcome::Unknown { bound } => VerdictKind::Undetermined { bound: *bound },
    };
    Verdict { kind, screen, eventual: Some(eventual), bound: search_bound }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigmaKind {
    /// `class_at(power)` is ample.
    SigmaAmple { power: u64, class: DivisorClass },
    QuasiUnipotentFail,
    Undetermined { bound: u64 },
}

impl SigmaKind {
    pub fn name(&self) -> &'static str {
        match self {
            SigmaKind::SigmaAmple { .. } => "SigmaAmple",
            SigmaKind::QuasiUnipotentFail => "QuasiUnipotentFail",
            SigmaKind::Undetermined { .. } => "Undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaVerdict {
    pub kind: SigmaKind,
    pub screen: Screen,
    /// Eventual-ampleness run attached when no ample power was found.
    pub supplementary: Option<EventualAmpleness>,
    pub bound: u64,
}

/// Single-bimodule criterion: quasi-unipotent and some power in `1..=bound` is ample.
pub fn sigma_ample_verdict(sys: &BimoduleSystem, search_bound: u64) -> Result<SigmaVerdict, AmplenessError> {
    if sys.s() != 1 {
        return Err(AmplenessError::Arity { expected: 1, found: sys.s() });
    }
    let screen = quasi_unipotent_screen(sys);
    if screen.first_failure().is_some() {
        return Ok(SigmaVerdict { kind: SigmaKind::QuasiUnipotentFail, screen, supplementary: None, bound: search_bound });
    }
    for m in 1..=search_bound {
        let class = sys.class_at(&[m]);
        if sys.scheme().is_ample(&class) {
            return Ok(SigmaVerdict {
                kind: SigmaKind::SigmaAmple { power: m, class },
                screen,
                supplementary: None,
                bound: search_bound,
            });
        }
    }
    let supplementary = eventual_ampleness(sys, search_bound).ok();
    Ok(SigmaVerdict { kind: SigmaKind::Undetermined { bound: search_bound }, screen, supplementary, bound: search_bound })
}

/// Value of the 1-based cone functional `k` at `class_at(n)`, matching the
/// numbering used in witnesses.
pub fn functional_at(sys: &BimoduleSystem, k: usize, n: &[u64]) -> BigInt {
    sys.scheme().cone_value(k - 1, &sys.class_at(n))
}
