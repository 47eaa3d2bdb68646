//! Seeded corpus of bimodule systems and oracle rings shared by the
//! integration tests.
#![allow(dead_code)]

use ncample::lattice::Matrix;
use ncample::oracle::{mobius_from_i64, FactorAutomorphism, OracleBundle, OracleRing};
use ncample::scheme::{builtin_scheme, p1_power, DivisorClass, NumericalScheme};
use ncample::system::{Bimodule, BimoduleSystem};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone)]
pub struct Item {
    pub label: String,
    pub sys: BimoduleSystem,
}

pub fn system(scheme: NumericalScheme, parts: &[(&[i64], Matrix)]) -> BimoduleSystem {
    let bims = parts.iter().map(|(d, m)| Bimodule::new(DivisorClass::from_i64(d), m.clone())).collect();
    BimoduleSystem::new(scheme, bims).expect("corpus system must be valid")
}

pub fn builtin(name: &str) -> NumericalScheme {
    builtin_scheme(name).unwrap()
}

pub fn id(rho: usize) -> Matrix {
    Matrix::identity(rho)
}

pub fn swap2() -> Matrix {
    Matrix::from_i64(&[&[0, 1], &[1, 0]])
}

pub fn fibonacci() -> Matrix {
    Matrix::from_i64(&[&[2, 1], &[1, 1]])
}

pub fn pair() -> BimoduleSystem {
    system(builtin("P1xP1"), &[(&[1, 0], id(2)), (&[0, 1], id(2))])
}

pub fn line_and_inverse() -> BimoduleSystem {
    system(builtin("P1"), &[(&[1], id(1)), (&[-1], id(1))])
}

pub fn swap() -> BimoduleSystem {
    system(builtin("P1xP1"), &[(&[1, 0], swap2())])
}

pub fn p1_line() -> BimoduleSystem {
    system(builtin("P1"), &[(&[1], id(1))])
}

fn random_perm(rho: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..rho).collect();
    p.shuffle(rng);
    p
}

/// Divisors in `[-3, 3]^rho` that commute numerically with every earlier bimodule.
fn compatible_divisors(prev: &[(Vec<i64>, Matrix)], m: &Matrix, rho: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut d = vec![-3i64; rho];
    loop {
        let dc = DivisorClass::from_i64(&d);
        let ok = prev.iter().all(|(e, p)| {
            let ec = DivisorClass::from_i64(e);
            let lhs = dc.add(&DivisorClass(m.mul_vec(ec.coords())));
            let rhs = ec.add(&DivisorClass(p.mul_vec(dc.coords())));
            lhs == rhs
        });
        if ok {
            out.push(d.clone());
        }
        let mut i = 0;
        while i < rho {
            if d[i] < 3 {
                d[i] += 1;
                break;
            }
            d[i] = -3;
            i += 1;
        }
        if i == rho {
            return out;
        }
    }
}

/// One random system on `(P^1)^rho` whose actions are commuting permutation
/// matrices, so the orthant ample cone is preserved.
fn random_orthant_system(rho: usize, s: usize, rng: &mut ChaCha8Rng) -> Option<BimoduleSystem> {
    let base = Matrix::permutation(&random_perm(rho, rng));
    let mut parts: Vec<(Vec<i64>, Matrix)> = Vec::new();
    for _ in 0..s {
        let m = if rng.gen_bool(0.3) { id(rho) } else { base.pow(rng.gen_range(1..=3)) };
        let d: Vec<i64> = if parts.is_empty() {
            (0..rho).map(|_| rng.gen_range(-1..=3)).collect()
        } else {
            let options = compatible_divisors(&parts, &m, rho);
            // prefer mostly nonnegative divisors so that ample systems are common
            let positive: Vec<_> = options.iter().filter(|d| d.iter().all(|&x| x >= 0)).cloned().collect();
            let pool = if !positive.is_empty() && rng.gen_bool(0.7) { positive } else { options };
            pool.choose(rng)?.clone()
        };
        parts.push((d, m));
    }
    let bims = parts.into_iter().map(|(d, m)| Bimodule::new(DivisorClass::from_i64(&d), m)).collect();
    BimoduleSystem::new(p1_power(rho), bims).ok()
}

/// Cone-preserving systems with `rho <= 4`, `s <= 3` and entries in `[-3, 3]`,
/// plus non-quasi-unipotent hyperbolic cases and the golden examples.
pub fn duality_corpus(count: usize) -> Vec<Item> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = vec![
        Item { label: "pair".into(), sys: pair() },
        Item { label: "line-and-inverse".into(), sys: line_and_inverse() },
        Item { label: "swap".into(), sys: swap() },
        Item { label: "p1-line".into(), sys: p1_line() },
    ];
    for (k, m) in [fibonacci(), Matrix::from_i64(&[&[1, 1], &[1, 2]]), Matrix::from_i64(&[&[3, 1], &[2, 1]])]
        .into_iter()
        .enumerate()
    {
        out.push(Item { label: format!("hyperbolic-{k}"), sys: system(builtin("AbelianSurfaceHyperbolic"), &[(&[1, 1], m)]) });
    }
    let mut attempt = 0;
    while out.len() < count {
        attempt += 1;
        let rho = rng.gen_range(1..=4);
        let s = rng.gen_range(1..=3);
        if let Some(sys) = random_orthant_system(rho, s, &mut rng) {
            out.push(Item { label: format!("orthant-{attempt}-rho{rho}-s{s}"), sys });
        }
    }
    out
}

/// Unipotent systems (not necessarily cone-preserving) for symbolic checks.
pub fn unipotent_corpus(count: usize) -> Vec<Item> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xabc);
    let mut out = Vec::new();
    let mut attempt = 0;
    while out.len() < count {
        attempt += 1;
        let rho = rng.gen_range(1..=4);
        let s = rng.gen_range(1..=3);
        let mut rows = vec![vec![0i64; rho]; rho];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1;
            for x in row.iter_mut().skip(i + 1) {
                *x = rng.gen_range(-2..=2);
            }
        }
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        let u = Matrix::from_i64(&refs);
        let mut parts: Vec<(Vec<i64>, Matrix)> = Vec::new();
        let mut ok = true;
        for _ in 0..s {
            let m = u.pow(rng.gen_range(0..=2));
            let d = if parts.is_empty() {
                (0..rho).map(|_| rng.gen_range(-3..=3)).collect()
            } else {
                match compatible_divisors(&parts, &m, rho).choose(&mut rng) {
                    Some(d) => d.clone(),
                    None => {
                        ok = false;
                        break;
                    }
                }
            };
            parts.push((d, m));
        }
        if !ok {
            continue;
        }
        let bims = parts.into_iter().map(|(d, m)| Bimodule::new(DivisorClass::from_i64(&d), m)).collect();
        if let Ok(sys) = BimoduleSystem::new(p1_power(rho), bims) {
            out.push(Item { label: format!("unipotent-{attempt}-rho{rho}-s{s}"), sys });
        }
    }
    out
}

pub fn auto(perm: &[usize], ms: &[[[i64; 2]; 2]]) -> FactorAutomorphism {
    FactorAutomorphism::new(perm.to_vec(), ms.iter().map(|&m| mobius_from_i64(m)).collect()).unwrap()
}

pub const ID2: [[i64; 2]; 2] = [[1, 0], [0, 1]];
pub const PARABOLIC: [[i64; 2]; 2] = [[1, 1], [0, 1]];

pub fn ring(d: usize, parts: &[(&[i64], FactorAutomorphism)]) -> OracleRing {
    let bundles = parts.iter().map(|(a, s)| OracleBundle { degree: a.to_vec(), automorphism: s.clone() }).collect();
    OracleRing::new(d, bundles).expect("corpus ring must be valid")
}

pub fn pair_ring() -> OracleRing {
    ring(2, &[(&[1, 0], FactorAutomorphism::identity(2)), (&[0, 1], FactorAutomorphism::identity(2))])
}

pub fn swap_ring() -> OracleRing {
    ring(2, &[(&[1, 0], auto(&[1, 0], &[ID2, ID2]))])
}

pub fn parabolic_ring() -> OracleRing {
    ring(1, &[(&[1], auto(&[0], &[PARABOLIC]))])
}

/// Rings with at least three bimodules, for the overlap check.
pub fn triple_rings() -> Vec<(String, OracleRing)> {
    let diag = |a: i64, b: i64| auto(&[0], &[[[a, 0], [0, b]]]);
    vec![
        (
            "trivial".into(),
            ring(1, &[(&[1], FactorAutomorphism::identity(1)), (&[1], FactorAutomorphism::identity(1)), (&[2], FactorAutomorphism::identity(1))]),
        ),
        (
            "trivial-p1xp1".into(),
            ring(
                2,
                &[
                    (&[1, 0], FactorAutomorphism::identity(2)),
                    (&[0, 1], FactorAutomorphism::identity(2)),
                    (&[1, 1], FactorAutomorphism::identity(2)),
                ],
            ),
        ),
        ("diagonal-twists".into(), ring(1, &[(&[1], diag(2, 1)), (&[1], diag(1, 3)), (&[1], diag(5, 7))])),
        (
            "swap-parabolic".into(),
            ring(
                2,
                &[
                    (&[1, 0], auto(&[1, 0], &[ID2, ID2])),
                    (&[1, 1], auto(&[0, 1], &[PARABOLIC, PARABOLIC])),
                    (&[2, 2], FactorAutomorphism::identity(2)),
                ],
            ),
        ),
    ]
}

/// Class of the grade `n` by literally composing `n_1` copies of the first
/// bimodule, then `n_2` of the second and so on.
pub fn naive_class(sys: &BimoduleSystem, n: &[u64]) -> Vec<num_bigint::BigInt> {
    let rho = sys.rho();
    let mut class = vec![num_bigint::BigInt::from(0); rho];
    let mut twist = Matrix::identity(rho);
    for (b, &count) in sys.bimodules().iter().zip(n) {
        for _ in 0..count {
            let moved = twist.mul_vec(b.divisor.coords());
            for (c, m) in class.iter_mut().zip(moved) {
                *c += m;
            }
            twist = &twist * &b.action;
        }
    }
    class
}

/// Every cone functional strictly positive, evaluated by hand.
pub fn naive_ample(sys: &BimoduleSystem, class: &[num_bigint::BigInt]) -> bool {
    sys.scheme().cone().iter().all(|row| {
        let v: num_bigint::BigInt = row.iter().zip(class).map(|(a, c)| a * c).sum();
        v > num_bigint::BigInt::from(0)
    })
}

/// Every point of the box `[lo, hi]^s` (inclusive).
pub fn grid(lo: &[u64], hi: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for (&a, &b) in lo.iter().zip(hi) {
        out = out.into_iter().flat_map(|p| (a..=b).map(move |x| {
            let mut q = p.clone();
            q.push(x);
            q
        })).collect();
    }
    out
}
