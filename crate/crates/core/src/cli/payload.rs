//! JSON renderings of engine results. All indices are 1-based.

use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Map, Number, Value};

use crate::ampleness::{
    BranchCheck, EventualAmpleness, EventualOutcome, Screen, SigmaKind, SigmaVerdict, Verdict, VerdictKind,
};
use crate::gk::GkCertificate;
use crate::oracle::HilbertMatch;
use crate::poly::PositivityResult;
use crate::scheme::DivisorClass;
use crate::system::BimoduleSystem;

pub fn int(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integers are valid JSON numbers"))
}

pub fn ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

pub fn class(c: &DivisorClass) -> Value {
    ints(c.coords())
}

pub fn screen(sc: &Screen) -> Value {
    let entries: Vec<Value> = sc
        .entries
        .iter()
        .map(|e| {
            let mut m = Map::new();
            m.insert("index".into(), json!(e.index));
            m.insert("quasi_unipotent".into(), json!(e.passed()));
            if let Some(c) = &e.certificate {
                m.insert("order".into(), json!(c.order));
                m.insert("cyclotomic_factors".into(), json!(c.factors.iter().map(|(d, k)| json!({"d": d, "multiplicity": k})).collect::<Vec<_>>()));
            }
            if let Some(k) = e.nilpotency {
                m.insert("nilpotency_degree".into(), json!(k));
            }
            Value::Object(m)
        })
        .collect();
    json!({
        "passed": sc.passed(),
        "entries": entries,
        "combined_order": sc.combined_order(),
        "ell": sc.ell,
    })
}

fn branch(b: &BranchCheck) -> Value {
    let mut m = Map::new();
    m.insert("residue".into(), json!(b.residue));
    m.insert("functional".into(), json!(b.functional));
    m.insert("polynomial".into(), json!(b.polynomial.to_string()));
    match &b.result {
        PositivityResult::Yes { start } => {
            m.insert("result".into(), json!("yes"));
            m.insert("start".into(), json!(start));
        }
        PositivityResult::No(w) => {
            m.insert("result".into(), json!("no"));
            m.insert("base".into(), json!(w.base));
            m.insert("direction".into(), json!(w.direction));
            m.insert("threshold".into(), json!(w.threshold));
        }
        PositivityResult::Unknown { bound } => {
            m.insert("result".into(), json!("unknown"));
            m.insert("bound".into(), json!(bound));
        }
    }
    Value::Object(m)
}

pub fn eventual(e: &EventualAmpleness) -> Value {
    let outcome = match &e.outcome {
        EventualOutcome::Yes { start } => json!({"result": "yes", "m0": start}),
        EventualOutcome::No { functional, residue, witness, ray } => json!({
            "result": "no",
            "functional": functional,
            "residue": residue,
            "ray": {
                "base": ray.base,
                "direction": ray.direction,
                "threshold": ray.threshold,
                "strict": ray.strict,
                "restriction": witness.restriction.to_string(),
            },
        }),
        EventualOutcome::Unknown { bound } => json!({"result": "unknown", "bound": bound}),
    };
    json!({
        "outcome": outcome,
        "orders": e.orders,
        "bound": e.bound,
        "branches": e.checks.iter().map(branch).collect::<Vec<_>>(),
    })
}

pub fn verdict(v: &Verdict, sys: &BimoduleSystem) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), json!(v.kind.name()));
    match &v.kind {
        VerdictKind::NcAmple { start } => {
            m.insert("m0".into(), json!(start));
        }
        VerdictKind::QuasiUnipotentFail { index } => {
            m.insert("index".into(), json!(index));
        }
        VerdictKind::EventualAmplenessFail { functional, residue, ray } => {
            m.insert(
                "witness".into(),
                json!({
                    "functional": functional,
                    "residue": residue,
                    "base": ray.base,
                    "direction": ray.direction,
                    "threshold": ray.threshold,
                    "strict": ray.strict,
                }),
            );
        }
        VerdictKind::Undetermined { bound } => {
            m.insert("undetermined_bound".into(), json!(bound));
        }
    }
    m.insert("bound".into(), json!(v.bound));
    m.insert("relative_to".into(), json!("declared polyhedral ample cone"));
    m.insert("orders".into(), json!(v.screen.orders()));
    m.insert("screen".into(), screen(&v.screen));
    if let Some(e) = &v.eventual {
        m.insert("eventual_ampleness".into(), eventual(e));
    }
    m.insert("star".into(), json!(sys.star_flags()));
    Value::Object(m)
}

pub fn sigma(v: &SigmaVerdict) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), json!(v.kind.name()));
    match &v.kind {
        SigmaKind::SigmaAmple { power, class: c } => {
            m.insert("power".into(), json!(power));
            m.insert("class".into(), class(c));
        }
        SigmaKind::Undetermined { bound } => {
            m.insert("undetermined_bound".into(), json!(bound));
        }
        SigmaKind::QuasiUnipotentFail => {}
    }
    m.insert("bound".into(), json!(v.bound));
    if let Some(e) = &v.supplementary {
        m.insert("supplementary".into(), eventual(e));
    }
    Value::Object(m)
}

pub fn gk(c: &GkCertificate, sys: &BimoduleSystem) -> Value {
    let star = sys.star_flags();
    json!({
        "gk": c.gk,
        "veronese_used": c.veronese_used,
        "hilbert": c.hilbert.to_string(),
        "box_poly": c.box_poly.to_string(),
        "bounds": {"lower": c.lower, "upper": c.upper},
        "within_bounds": c.within_bounds(),
        "ell": c.ell,
        "m0": c.start,
        "hypotheses": {
            "nc_ample": true,
            "star": star,
            "noetherian_asserted": star.iter().all(|&b| b),
        },
    })
}

pub fn hilbert_match(h: &HilbertMatch) -> Value {
    json!({
        "compared": h.compared,
        "skipped": h.skipped,
        "passed": h.passed(),
        "mismatches": h.mismatches.iter().map(|m| json!({
            "grade": m.grade,
            "degree": m.degree,
            "oracle_dim": int(&m.oracle_dim),
            "engine": int(&m.engine),
        })).collect::<Vec<_>>(),
    })
}

pub fn system_summary(sys: &BimoduleSystem) -> Value {
    let sch = sys.scheme();
    json!({
        "name": sch.name(),
        "dim": sch.dim(),
        "rho": sch.rho(),
        "euler": sch.euler().to_string(),
        "interior_point": class(&sch.interior_point()),
        "s": sys.s(),
        "star": sys.star_flags(),
        "notes": sys.notes(),
    })
}
