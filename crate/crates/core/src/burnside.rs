//! Burnside-group orders, exponent-3 group arithmetic on two generators,
//! and the bound calculators for packing counts.
//!
//! The free exponent-3 group on two generators is realized as the
//! unitriangular 3x3 matrices over the field with three elements, stored
//! in normal form (a, b, c): generator exponents a, b and the central
//! commutator exponent c. All bounds report natural logs, with exact
//! big-integer values attached while they stay under a digit budget.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::magnus::is_prime;

/// Largest supported generator count for the order formula; the order of
/// rank 256 already has about 1.3 million digits.
pub const MAX_RANK: u64 = 256;

/// Decimal-digit ceiling for exact bound values, matching the certificate
/// count bound.
pub const MAX_EXACT_DIGITS: usize = 10_000;

#[derive(Debug, Error)]
pub enum BurnsideError {
    #[error("generator count must be at least 1")]
    ZeroRank,
    #[error("generator count {m} above supported maximum {max}")]
    RankTooLarge { m: u64, max: u64 },
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("generator bound must be at least 1")]
    ZeroGenerators,
    #[error("nilpotency class parameter k must be at least 2, got {k}")]
    BadClass { k: u64 },
    #[error("epsilon {epsilon} outside (0, 0.5]")]
    BadEpsilon { epsilon: f64 },
    #[error("scale constant a must be positive, got {a}")]
    BadScale { a: f64 },
    #[error("theorem {theorem} is not one of 1, 2, 4")]
    UnknownTheorem { theorem: u8 },
    #[error("theorem 4 requires both k and p")]
    MissingParameters,
    #[error("bound exponent overflows the usable float range")]
    Overflow,
    #[error("mu value list must be nonempty")]
    EmptyValues,
    #[error("mu values must be nonzero")]
    ZeroValue,
}

type Result<T> = std::result::Result<T, BurnsideError>;

/// Exact order of the free exponent-3 Burnside group on `m` generators:
/// 3^(m + C(m,2) + C(m,3)).
pub fn burnside_order(m: u64) -> Result<BigUint> {
    if m == 0 {
        return Err(BurnsideError::ZeroRank);
    }
    if m > MAX_RANK {
        return Err(BurnsideError::RankTooLarge { m, max: MAX_RANK });
    }
    let pairs = m * (m - 1) / 2;
    let triples = if m >= 3 { m * (m - 1) * (m - 2) / 6 } else { 0 };
    let exponent = m + pairs + triples;
    Ok(BigUint::from(3u32).pow(u32::try_from(exponent).expect("exponent fits u32")))
}

/// An element of the two-generator exponent-3 group in normal form
/// x^a y^b z^c with z the central commutator [x, y].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct B23Element {
    pub a: u8,
    pub b: u8,
    pub c: u8,
}

impl B23Element {
    pub fn new(a: u8, b: u8, c: u8) -> B23Element {
        B23Element {
            a: a % 3,
            b: b % 3,
            c: c % 3,
        }
    }

    pub fn identity() -> B23Element {
        B23Element::default()
    }

    pub fn gen_x() -> B23Element {
        B23Element::new(1, 0, 0)
    }

    pub fn gen_y() -> B23Element {
        B23Element::new(0, 1, 0)
    }
}

/// Group law of the unitriangular model: the commutator correction lands
/// in the center as a1*b2.
pub fn b23_mul(g: B23Element, h: B23Element) -> B23Element {
    B23Element::new(g.a + h.a, g.b + h.b, g.c + h.c + g.a * h.b)
}

pub fn b23_inv(g: B23Element) -> B23Element {
    // (a, b, c)^-1 = (-a, -b, -c + a*b).
    B23Element::new(
        (3 - g.a % 3) % 3,
        (3 - g.b % 3) % 3,
        (6 - g.c + g.a * g.b) % 3,
    )
}

pub fn b23_pow(g: B23Element, n: u64) -> B23Element {
    let mut out = B23Element::identity();
    for _ in 0..n {
        out = b23_mul(out, g);
    }
    out
}

/// All 27 elements, in lexicographic (a, b, c) order.
pub fn b23_elements() -> Vec<B23Element> {
    let mut out = Vec::with_capacity(27);
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                out.push(B23Element::new(a, b, c));
            }
        }
    }
    out
}

/// A computed bound: the defining formula, its inputs, the exact value
/// when it fits the digit budget, and its natural log.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub formula: String,
    pub inputs: BTreeMap<String, f64>,
    /// Decimal digits of the exact value, when available.
    pub exact: Option<String>,
    pub ln: f64,
}

impl BoundReport {
    pub fn exact_value(&self) -> Option<BigUint> {
        self.exact
            .as_ref()
            .map(|s| s.parse().expect("stored bound digits parse"))
    }
}

fn exact_power(base: u64, exponent: &BigUint, ln_value: f64) -> Option<String> {
    if ln_value / 10f64.ln() > MAX_EXACT_DIGITS as f64 {
        return None;
    }
    let exp = exponent.to_u32()?;
    Some(BigUint::from(base).pow(exp).to_string())
}

/// Order bound for the class-(k-1) p-quotient on g generators:
/// ln = (g + g^2 + ... + g^(k-1)) ln p, one twisted Z_p factor per
/// basic commutator.
pub fn qkp_order_bound(g: u64, k: u64, p: u64) -> Result<BoundReport> {
    if g == 0 {
        return Err(BurnsideError::ZeroGenerators);
    }
    if k < 2 {
        return Err(BurnsideError::BadClass { k });
    }
    if !is_prime(p) {
        return Err(BurnsideError::NotPrime { p });
    }
    let mut exponent = BigUint::zero();
    let mut power = BigUint::one();
    let big_g = BigUint::from(g);
    for _ in 1..k {
        power *= &big_g;
        exponent += &power;
    }
    let exponent_f = exponent.to_f64().ok_or(BurnsideError::Overflow)?;
    let ln = exponent_f * (p as f64).ln();
    if !ln.is_finite() {
        return Err(BurnsideError::Overflow);
    }
    let inputs = BTreeMap::from([
        ("g".to_string(), g as f64),
        ("k".to_string(), k as f64),
        ("p".to_string(), p as f64),
    ]);
    Ok(BoundReport {
        formula: "qkp".to_string(),
        inputs,
        exact: exact_power(p, &exponent, ln),
        ln,
    })
}

/// Log-scale packing bounds: theorem 1 is exp(a/eps^3), theorem 2
/// exp(a/eps^9), theorem 4 (k+1)^g * p^(g^(k-1)) with g = a/eps^3.
pub fn thm_bounds(
    theorem: u8,
    epsilon: f64,
    a: f64,
    k: Option<u64>,
    p: Option<u64>,
) -> Result<BoundReport> {
    if !(epsilon > 0.0 && epsilon <= 0.5) || !epsilon.is_finite() {
        return Err(BurnsideError::BadEpsilon { epsilon });
    }
    if a <= 0.0 || !a.is_finite() {
        return Err(BurnsideError::BadScale { a });
    }
    let mut inputs = BTreeMap::from([("epsilon".to_string(), epsilon), ("a".to_string(), a)]);
    let g = a / epsilon.powi(3);
    let (formula, ln, exact) = match theorem {
        1 => ("thm1".to_string(), g, None),
        2 => ("thm2".to_string(), a / epsilon.powi(9), None),
        4 => {
            let (k, p) = match (k, p) {
                (Some(k), Some(p)) => (k, p),
                _ => return Err(BurnsideError::MissingParameters),
            };
            if k < 2 {
                return Err(BurnsideError::BadClass { k });
            }
            if !is_prime(p) {
                return Err(BurnsideError::NotPrime { p });
            }
            inputs.insert("k".to_string(), k as f64);
            inputs.insert("p".to_string(), p as f64);
            let ln = g * ((k + 1) as f64).ln() + g.powi((k - 1) as i32) * (p as f64).ln();
            // Exact only when the generator count is a true integer.
            let exact = if (g - g.round()).abs() < 1e-9 && g.round() >= 1.0 {
                let gi = g.round() as u64;
                let commutators = BigUint::from(gi).pow(u32::try_from(k - 1).unwrap_or(u32::MAX));
                if ln / 10f64.ln() <= MAX_EXACT_DIGITS as f64 {
                    let base = BigUint::from(k + 1).pow(u32::try_from(gi).unwrap_or(u32::MAX));
                    commutators
                        .to_u32()
                        .map(|e| (base * BigUint::from(p).pow(e)).to_string())
                } else {
                    None
                }
            } else {
                None
            };
            ("thm4".to_string(), ln, exact)
        }
        other => return Err(BurnsideError::UnknownTheorem { theorem: other }),
    };
    if !ln.is_finite() {
        return Err(BurnsideError::Overflow);
    }
    Ok(BoundReport {
        formula,
        inputs,
        exact,
        ln,
    })
}

/// The least prime dividing none of the given nonzero integers.
pub fn smallest_valid_prime(mu_values: &[BigInt]) -> Result<u64> {
    if mu_values.is_empty() {
        return Err(BurnsideError::EmptyValues);
    }
    if mu_values.iter().any(|v| v.is_zero()) {
        return Err(BurnsideError::ZeroValue);
    }
    let mut p = 2u64;
    loop {
        if is_prime(p) {
            let big = BigInt::from(p);
            if mu_values.iter().all(|v| !(v % &big).is_zero()) {
                return Ok(p);
            }
        }
        p += 1;
    }
}
