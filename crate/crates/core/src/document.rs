//! On-disk JSON schema shared by schemes, bimodule systems and oracle rings.
//!
//! Integers are carried at arbitrary precision; rationals are decimal strings
//! of the form `"p"` or `"p/q"`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// Arbitrary-precision JSON integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Int(pub BigInt);

impl From<BigInt> for Int {
    fn from(v: BigInt) -> Self {
        Int(v)
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Self {
        Int(BigInt::from(v))
    }
}

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = serde_json::Number::from_str(&self.0.to_string()).map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        let text = n.to_string();
        BigInt::from_str(&text)
            .map(Int)
            .map_err(|_| de::Error::custom(format!("expected an integer, found {text}")))
    }
}

/// Rational number written as `"p"` or `"p/q"`; plain JSON integers are accepted too.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rat(pub BigRational);

pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| format!("bad rational numerator in {text:?}"))?;
    let den = BigInt::from_str(den).map_err(|_| format!("bad rational denominator in {text:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(BigRational::new(num, den))
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RatVisitor;
        impl<'de> Visitor<'de> for RatVisitor {
            type Value = Rat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
                parse_rational(v).map(Rat).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
                Ok(Rat(BigRational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
                Ok(Rat(BigRational::from_integer(v.into())))
            }
            fn visit_map<A: de::MapAccess<'de>>(self, map: A) -> Result<Rat, A::Error> {
                // arbitrary-precision numbers arrive as a single-entry map
                let n = serde_json::Number::deserialize(de::value::MapAccessDeserializer::new(map))?;
                parse_rational(&n.to_string()).map(Rat).map_err(de::Error::custom)
            }
        }
        d.deserialize_any(RatVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EulerTerm {
    pub coeff: Rat,
    pub exponents: Vec<u32>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BimoduleDoc {
    pub divisor: Vec<Int>,
    pub matrix: Vec<Vec<Int>>,
    /// User assertion that the bimodule satisfies the equivariant-pullback hypothesis.
    #[serde(default, skip_serializing_if = "is_false")]
    pub star: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismDoc {
    /// Permutation of `1..=d`: factor `k` of the image is read from factor `perm[k]`.
    pub perm: Vec<usize>,
    /// One invertible 2x2 matrix per factor.
    pub mobius: Vec<[[Rat; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleDoc {
    pub d: usize,
    pub automorphisms: Vec<AutomorphismDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub name: String,
    pub dim: u32,
    pub rho: usize,
    pub euler: Vec<EulerTerm>,
    pub ample_cone: Vec<Vec<Int>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bimodules: Vec<BimoduleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}

fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

fn euler_terms(terms: &[(&str, &[u32])]) -> Vec<EulerTerm> {
    terms
        .iter()
        .map(|(c, e)| EulerTerm { coeff: Rat(parse_rational(c).unwrap()), exponents: e.to_vec() })
        .collect()
}

pub const BUILTIN_NAMES: [&str; 4] = ["P1", "P2", "P1xP1", "AbelianSurfaceHyperbolic"];

/// Scheme-only documents for the built-in models.
pub fn builtin(name: &str) -> Option<Document> {
    let doc = match name {
        "P1" => Document {
            name: "P1".into(),
            dim: 1,
            rho: 1,
            euler: euler_terms(&[("1", &[1]), ("1", &[0])]),
            ample_cone: vec![ints(&[1])],
            bimodules: vec![],
            oracle: None,
            notes: vec![],
        },
        "P2" => Document {
            name: "P2".into(),
            dim: 2,
            rho: 1,
            euler: euler_terms(&[("1/2", &[2]), ("3/2", &[1]), ("1", &[0])]),
            ample_cone: vec![ints(&[1])],
            bimodules: vec![],
            oracle: None,
            notes: vec![],
        },
        "P1xP1" => Document {
            name: "P1xP1".into(),
            dim: 2,
            rho: 2,
            euler: euler_terms(&[("1", &[1, 1]), ("1", &[1, 0]), ("1", &[0, 1]), ("1", &[0, 0])]),
            ample_cone: vec![ints(&[1, 0]), ints(&[0, 1])],
            bimodules: vec![],
            oracle: None,
            notes: vec![],
        },
        // chi(D) = D^2/2 with the hyperbolic pairing D^2 = 2ab
        "AbelianSurfaceHyperbolic" => Document {
            name: "AbelianSurfaceHyperbolic".into(),
            dim: 2,
            rho: 2,
            euler: euler_terms(&[("1", &[1, 1])]),
            ample_cone: vec![ints(&[1, 0]), ints(&[0, 1])],
            bimodules: vec![],
            oracle: None,
            notes: vec![],
        },
        _ => return None,
    };
    Some(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("3").unwrap(), BigRational::from_integer(3.into()));
        assert_eq!(
            parse_rational(" -1/2 ").unwrap(),
            BigRational::new((-1).into(), 2.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&BigRational::new(6.into(), 4.into())), "3/2");
    }

    #[test]
    fn big_integers_survive_json() {
        let text = r#"{"name":"X","dim":1,"rho":1,
            "euler":[{"coeff":"1","exponents":[1]},{"coeff":1,"exponents":[0]}],
            "ample_cone":[[123456789012345678901234567890]]}"#;
        let doc = Document::parse(text).unwrap();
        assert_eq!(doc.ample_cone[0][0].0.to_string(), "123456789012345678901234567890");
        let back = Document::parse(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn non_integers_rejected() {
        let text = r#"{"name":"X","dim":1,"rho":1,"euler":[],"ample_cone":[[1.5]]}"#;
        assert!(Document::parse(text).is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"name":"X","dim":1,"rho":1,"euler":[],"ample_cone":[[1]],"extra":0}"#;
        assert!(Document::parse(text).is_err());
    }

    #[test]
    fn builtins_exist() {
        for name in BUILTIN_NAMES {
            assert_eq!(builtin(name).unwrap().name, name);
        }
        assert!(builtin("P3").is_none());
    }
}
