//! Free-group words and their expansion in the non-repeating ring.
//!
//! The target ring has non-commuting variables x_1..x_v with every
//! monomial containing a repeated variable set to zero, over either the
//! integers or integers mod a prime. A generator expands as 1 + x_i and
//! its inverse as 1 - x_i; because x_i^2 = 0 these are exact inverses, so
//! word expansion is a product of unit binomials and every expansion has
//! constant term 1.
//!
//! Monomials are injective index sequences, tabulated densely in
//! (degree, lexicographic) order. For v variables there are
//! sum_{j=0..v} v!/(v-j)! of them, which stays small for the supported
//! alphabet sizes.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest supported alphabet size; the monomial table for 8 variables
/// has 109601 entries and table size grows factorially beyond that.
pub const MAX_VARS: usize = 8;

#[derive(Debug, Error)]
pub enum MagnusError {
    #[error("letter {letter} outside alphabet of size {v}")]
    BadLetter { letter: i64, v: usize },
    #[error("alphabet size {v} outside supported range 1..={max}")]
    BadAlphabet { v: usize, max: usize },
    #[error("zero is not a valid signed generator index")]
    ZeroLetter,
    #[error("malformed word text {text:?}")]
    BadWordText { text: String },
    #[error("index sequence {seq:?} repeats an index")]
    RepeatedIndex { seq: Vec<u32> },
    #[error("index {index} exceeds variable count {v}")]
    IndexOutOfRange { index: u32, v: usize },
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("polynomial is not monic (constant term must be 1)")]
    NonMonic,
    #[error("cube divisibility is defined for exactly 2 variables, got {v}")]
    WrongVariableCount { v: usize },
    #[error("filtration level must be at least 1")]
    ZeroLevel,
    #[error("band summand expands nontrivially mod p (minimal degree {degree:?}); it must lie above the top filtration level")]
    ShallowBandSummand { degree: Option<usize> },
    #[error("polynomials come from different rings or alphabets")]
    RingMismatch,
}

type Result<T> = std::result::Result<T, MagnusError>;

/// A free-group word as signed generator indices: letter `i > 0` is the
/// generator `m_i`, `-i` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<i32>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    pub fn new(letters: Vec<i32>) -> Result<Word> {
        if letters.contains(&0) {
            return Err(MagnusError::ZeroLetter);
        }
        Ok(Word { letters })
    }

    /// Parses whitespace-separated signed indices, e.g. `"1 2 -1 -2"`.
    pub fn parse(text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let l: i32 = token.parse().map_err(|_| MagnusError::BadWordText {
                text: text.to_string(),
            })?;
            if l == 0 {
                return Err(MagnusError::ZeroLetter);
            }
            letters.push(l);
        }
        Ok(Word { letters })
    }

    pub fn to_text(&self) -> String {
        self.letters
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index mentioned, or 0 for the empty word.
    pub fn max_index(&self) -> u32 {
        self.letters.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn pow(&self, n: u64) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() * n as usize);
        for _ in 0..n {
            letters.extend_from_slice(&self.letters);
        }
        Word { letters }
    }

    /// The conjugate `c self c^-1`.
    pub fn conjugated_by(&self, c: &Word) -> Word {
        c.concat(self).concat(&c.inverse())
    }

    /// The commutator `[self, other] = self other self^-1 other^-1`.
    pub fn commutator(&self, other: &Word) -> Word {
        self.concat(other)
            .concat(&self.inverse())
            .concat(&other.inverse())
    }
}

/// Coefficient ring abstraction: arbitrary-precision integers or residues
/// mod a prime.
pub trait CoeffRing: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

/// The ring of arbitrary-precision integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntRing;

impl CoeffRing for IntRing {
    type Elem = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_i64(&self, n: i64) -> BigInt {
        BigInt::from(n)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
}

/// Residues mod a prime `p <= 2^31`, stored reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModRing {
    p: u64,
}

impl ModRing {
    pub fn new(p: u64) -> Result<ModRing> {
        if !is_prime(p) {
            return Err(MagnusError::NotPrime { p });
        }
        Ok(ModRing { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl CoeffRing for ModRing {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        // p <= 2^31 keeps the product within u64.
        (a * b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// Deterministic primality by trial division; inputs are at most 2^31.
pub fn is_prime(p: u64) -> bool {
    if !(2..=1 << 31).contains(&p) {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All injective index sequences over `1..=v`, in (degree, lex) order,
/// with split and prefix lookup tables for products.
pub struct MonomialTable {
    v: usize,
    seqs: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    // For nonempty monomials: (last letter, index of the sequence with the
    // last letter removed).
    prefix: Vec<Option<(u8, usize)>>,
    // All (prefix index, suffix index) splits of each monomial, including
    // the trivial ones with an empty side.
    splits: Vec<Vec<(usize, usize)>>,
}

impl MonomialTable {
    fn build(v: usize) -> MonomialTable {
        let mut seqs: Vec<Vec<u8>> = Vec::new();
        let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
        seqs.push(Vec::new());
        for _ in 0..v {
            let mut next = Vec::new();
            for s in &frontier {
                for g in 1..=v as u8 {
                    if !s.contains(&g) {
                        let mut t = s.clone();
                        t.push(g);
                        next.push(t);
                    }
                }
            }
            next.sort();
            seqs.extend(next.iter().cloned());
            frontier = next;
        }
        let index: HashMap<Vec<u8>, usize> =
            seqs.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let prefix = seqs
            .iter()
            .map(|s| {
                s.split_last()
                    .map(|(&last, head)| (last, index[&head.to_vec()]))
            })
            .collect();
        let splits = seqs
            .iter()
            .map(|s| {
                (0..=s.len())
                    .map(|k| (index[&s[..k].to_vec()], index[&s[k..].to_vec()]))
                    .collect()
            })
            .collect();
        MonomialTable {
            v,
            seqs,
            index,
            prefix,
            splits,
        }
    }

    /// Shared table for an alphabet size, built once per process.
    pub fn shared(v: usize) -> Result<Arc<MonomialTable>> {
        if v == 0 || v > MAX_VARS {
            return Err(MagnusError::BadAlphabet { v, max: MAX_VARS });
        }
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<MonomialTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("monomial cache lock");
        Ok(guard
            .entry(v)
            .or_insert_with(|| Arc::new(MonomialTable::build(v)))
            .clone())
    }

    pub fn len(&self) -> usize {
        self.seqs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sequence(&self, idx: usize) -> &[u8] {
        &self.seqs[idx]
    }

    fn lookup(&self, seq: &[u32]) -> Result<usize> {
        let mut key = Vec::with_capacity(seq.len());
        for &i in seq {
            if i == 0 || i as usize > self.v {
                return Err(MagnusError::IndexOutOfRange {
                    index: i,
                    v: self.v,
                });
            }
            if key.contains(&(i as u8)) {
                return Err(MagnusError::RepeatedIndex { seq: seq.to_vec() });
            }
            key.push(i as u8);
        }
        Ok(self.index[&key])
    }
}

/// A polynomial in the non-repeating ring, tabulated densely over the
/// monomial table for its alphabet.
#[derive(Clone)]
pub struct NRPoly<R: CoeffRing> {
    ring: R,
    table: Arc<MonomialTable>,
    coeffs: Vec<R::Elem>,
}

impl<R: CoeffRing> PartialEq for NRPoly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.table.v == other.table.v && self.coeffs == other.coeffs
    }
}

impl<R: CoeffRing> fmt::Debug for NRPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !self.ring.is_zero(c) {
                terms.push(format!("{:?}*x{:?}", c, self.table.sequence(i)));
            }
        }
        write!(f, "NRPoly[{}]", terms.join(" + "))
    }
}

impl<R: CoeffRing> NRPoly<R> {
    /// The constant polynomial 1.
    pub fn one(ring: R, v: usize) -> Result<NRPoly<R>> {
        let table = MonomialTable::shared(v)?;
        let mut coeffs = vec![ring.zero(); table.len()];
        coeffs[0] = ring.one();
        Ok(NRPoly {
            ring,
            table,
            coeffs,
        })
    }

    pub fn vars(&self) -> usize {
        self.table.v
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    /// Coefficient of the monomial with the given index sequence; the
    /// empty sequence addresses the constant term.
    pub fn coefficient(&self, seq: &[u32]) -> Result<R::Elem> {
        Ok(self.coeffs[self.table.lookup(seq)?].clone())
    }

    pub fn set_coefficient(&mut self, seq: &[u32], value: R::Elem) -> Result<()> {
        let idx = self.table.lookup(seq)?;
        self.coeffs[idx] = value;
        Ok(())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(i, c)| {
            if i == 0 {
                *c == self.ring.one()
            } else {
                self.ring.is_zero(c)
            }
        })
    }

    fn is_monic(&self) -> bool {
        self.coeffs[0] == self.ring.one()
    }

    /// Smallest positive degree carrying a nonzero coefficient, if any.
    pub fn min_positive_degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !self.ring.is_zero(c))
            .map(|(i, _)| self.table.sequence(i).len())
            .min()
    }

    pub fn add(&self, other: &NRPoly<R>) -> Result<NRPoly<R>> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| self.ring.add(a, b))
            .collect();
        Ok(self.with_coeffs(coeffs))
    }

    pub fn mul(&self, other: &NRPoly<R>) -> Result<NRPoly<R>> {
        self.check_compatible(other)?;
        let mut coeffs = vec![self.ring.zero(); self.table.len()];
        for (m, out) in coeffs.iter_mut().enumerate() {
            for &(pre, suf) in &self.table.splits[m] {
                let a = &self.coeffs[pre];
                if self.ring.is_zero(a) {
                    continue;
                }
                let b = &other.coeffs[suf];
                if self.ring.is_zero(b) {
                    continue;
                }
                *out = self.ring.add(out, &self.ring.mul(a, b));
            }
        }
        Ok(self.with_coeffs(coeffs))
    }

    /// Multiplies on the right by the expansion `1 + sign * x_g` of one
    /// letter.
    fn mul_letter(&self, g: u8, positive: bool) -> NRPoly<R> {
        let mut coeffs = self.coeffs.clone();
        for (m, prefix) in self.table.prefix.iter().enumerate().skip(1) {
            if let Some((last, pre)) = *prefix {
                if last == g {
                    let shifted = if positive {
                        self.coeffs[pre].clone()
                    } else {
                        self.ring.neg(&self.coeffs[pre])
                    };
                    coeffs[m] = self.ring.add(&coeffs[m], &shifted);
                }
            }
        }
        self.with_coeffs(coeffs)
    }

    /// Exact inverse of a monic polynomial: with N its positive-degree
    /// part, the geometric series sum (-N)^j truncates at degree v.
    pub fn inverse(&self) -> Result<NRPoly<R>> {
        if !self.is_monic() {
            return Err(MagnusError::NonMonic);
        }
        let mut n = self.clone();
        n.coeffs[0] = self.ring.zero();
        let mut inv = NRPoly::one(self.ring.clone(), self.vars())?;
        let mut term = NRPoly::one(self.ring.clone(), self.vars())?;
        for j in 1..=self.vars() {
            term = term.mul(&n)?;
            if j % 2 == 1 {
                let negated = term.coeffs.iter().map(|c| self.ring.neg(c)).collect();
                inv = inv.add(&self.with_coeffs(negated))?;
            } else {
                inv = inv.add(&term)?;
            }
        }
        Ok(inv)
    }

    fn with_coeffs(&self, coeffs: Vec<R::Elem>) -> NRPoly<R> {
        NRPoly {
            ring: self.ring.clone(),
            table: self.table.clone(),
            coeffs,
        }
    }

    fn check_compatible(&self, other: &NRPoly<R>) -> Result<()> {
        if self.ring != other.ring || self.table.v != other.table.v {
            return Err(MagnusError::RingMismatch);
        }
        Ok(())
    }
}

/// Expands a word in the non-repeating ring over `v` variables: each
/// letter contributes the unit binomial 1 ± x_i.
pub fn expand<R: CoeffRing>(word: &Word, v: usize, ring: R) -> Result<NRPoly<R>> {
    let mut poly = NRPoly::one(ring, v)?;
    for &letter in word.letters() {
        let g = letter.unsigned_abs();
        if g as usize > v {
            return Err(MagnusError::BadLetter {
                letter: letter as i64,
                v,
            });
        }
        poly = poly.mul_letter(g as u8, letter > 0);
    }
    Ok(poly)
}

/// The mu-bar coefficient of an expansion: the coefficient of the ordered
/// monomial named by `sequence`.
pub fn mu_coefficient<R: CoeffRing>(poly: &NRPoly<R>, sequence: &[u32]) -> Result<R::Elem> {
    poly.coefficient(sequence)
}

/// Checks that the cube of a monic two-variable integer polynomial has
/// every non-constant coefficient divisible by 3. This holds identically:
/// with g = 1 + u, the cube is 1 + 3u + 3u^2 because u^3 vanishes in the
/// non-repeating ring on two variables.
pub fn cube_divisibility(g: &NRPoly<IntRing>) -> Result<bool> {
    if g.vars() != 2 {
        return Err(MagnusError::WrongVariableCount { v: g.vars() });
    }
    if !g.is_monic() {
        return Err(MagnusError::NonMonic);
    }
    let cube = g.mul(g)?.mul(g)?;
    let three = BigInt::from(3);
    for (i, c) in cube.coeffs.iter().enumerate() {
        if i == 0 {
            continue;
        }
        if !(c % &three).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimal positive degree of the mod-p expansion of a word, or `None`
/// when the expansion is exactly 1 (arbitrarily deep filtration).
pub fn filtration_min_degree(word: &Word, p: u64, v: usize) -> Result<Option<usize>> {
    let ring = ModRing::new(p)?;
    let poly = expand(word, v, ring)?;
    Ok(poly.min_positive_degree())
}

/// A pseudorandom element of the level-`level` mod-p lower central series
/// of the free group on `v` generators: level 1 is a random word, level i
/// a product of 1..=3 factors of the form a u a^-1 u^-1 v^p with u, v
/// drawn from level i-1 and a a fresh random word.
pub fn random_lcs_element(level: usize, p: u64, v: usize, seed: u64) -> Result<Word> {
    if level == 0 {
        return Err(MagnusError::ZeroLevel);
    }
    if v == 0 || v > MAX_VARS {
        return Err(MagnusError::BadAlphabet { v, max: MAX_VARS });
    }
    if !is_prime(p) {
        return Err(MagnusError::NotPrime { p });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(lcs_element(level, p, v as u32, &mut rng))
}

fn lcs_element(level: usize, p: u64, v: u32, rng: &mut ChaCha8Rng) -> Word {
    if level == 1 {
        let len = rng.gen_range(1..=4);
        let letters = (0..len)
            .map(|_| {
                let g = rng.gen_range(1..=v) as i32;
                if rng.gen_bool(0.5) {
                    g
                } else {
                    -g
                }
            })
            .collect();
        return Word::new(letters).expect("random letters are nonzero");
    }
    let factors = rng.gen_range(1..=3);
    let mut out = Word::identity();
    for _ in 0..factors {
        let a = lcs_element(1, p, v, rng);
        let u = lcs_element(level - 1, p, v, rng);
        let w = lcs_element(level - 1, p, v, rng);
        out = out.concat(&a.commutator(&u)).concat(&w.pow(p));
    }
    out
}

/// Band-sum invariance of the top coefficient: appending a summand `beta`
/// whose mod-p expansion is 1 cannot change the mu-bar coefficient of a
/// longitude word. The summand is checked first and rejected when it
/// expands nontrivially.
pub fn band_sum_invariance(
    longitude: &Word,
    beta: &Word,
    p: u64,
    sequence: &[u32],
) -> Result<bool> {
    let v = sequence.len();
    let ring = ModRing::new(p)?;
    let beta_poly = expand(beta, v, ring)?;
    if !beta_poly.is_one() {
        return Err(MagnusError::ShallowBandSummand {
            degree: beta_poly.min_positive_degree(),
        });
    }
    let base = expand(longitude, v, ring)?;
    let summed = expand(&longitude.concat(beta), v, ring)?;
    Ok(mu_coefficient(&base, sequence)? == mu_coefficient(&summed, sequence)?)
}

/// Conjugates of one meridian commute after expansion: the commutator of
/// `g^{conj1}` and `g^{conj2}` expands to 1 in the non-repeating ring.
/// The alphabet is inferred from the inputs.
pub fn milnor_relator_check(conj1: &Word, conj2: &Word, generator: u32) -> Result<bool> {
    if generator == 0 {
        return Err(MagnusError::ZeroLetter);
    }
    let v = conj1
        .max_index()
        .max(conj2.max_index())
        .max(generator) as usize;
    let g = Word::new(vec![generator as i32]).expect("nonzero generator");
    let left = g.conjugated_by(conj1);
    let right = g.conjugated_by(conj2);
    let poly = expand(&left.commutator(&right), v, IntRing)?;
    Ok(poly.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_expand(text: &str, v: usize) -> NRPoly<IntRing> {
        expand(&Word::parse(text).unwrap(), v, IntRing).unwrap()
    }

    #[test]
    fn word_text_round_trip() {
        let w = Word::parse("1 2 -1 -2").unwrap();
        assert_eq!(w.letters(), &[1, 2, -1, -2]);
        assert_eq!(w.to_text(), "1 2 -1 -2");
        assert_eq!(Word::parse("").unwrap(), Word::identity());
        assert!(Word::parse("1 0 2").is_err());
        assert!(Word::parse("1 x").is_err());
    }

    #[test]
    fn word_algebra() {
        let w = Word::parse("1 -2").unwrap();
        assert_eq!(w.inverse().to_text(), "2 -1");
        assert_eq!(w.concat(&w.inverse()).len(), 4);
        assert_eq!(w.pow(3).len(), 6);
        let c = Word::parse("3").unwrap();
        assert_eq!(w.conjugated_by(&c).to_text(), "3 1 -2 -3");
        assert_eq!(w.commutator(&c).to_text(), "1 -2 3 2 -1 -3");
        assert_eq!(w.max_index(), 2);
    }

    #[test]
    fn monomial_table_counts() {
        // v = 3: 1 + 3 + 6 + 6 = 16 monomials.
        assert_eq!(MonomialTable::shared(3).unwrap().len(), 16);
        assert_eq!(MonomialTable::shared(1).unwrap().len(), 2);
        assert!(MonomialTable::shared(0).is_err());
        assert!(MonomialTable::shared(MAX_VARS + 1).is_err());
    }

    #[test]
    fn single_generator_expands_to_unit_binomial() {
        let p = int_expand("1", 2);
        assert_eq!(p.coefficient(&[]).unwrap(), BigInt::from(1));
        assert_eq!(p.coefficient(&[1]).unwrap(), BigInt::from(1));
        assert_eq!(p.coefficient(&[2]).unwrap(), BigInt::from(0));
        assert_eq!(p.coefficient(&[1, 2]).unwrap(), BigInt::from(0));
    }

    #[test]
    fn generator_times_inverse_is_one() {
        assert!(int_expand("1 -1", 3).is_one());
        assert!(int_expand("-2 2", 3).is_one());
    }

    #[test]
    fn commutator_expansion_matches_hand_value() {
        let p = int_expand("1 2 -1 -2", 2);
        let mut expected = NRPoly::one(IntRing, 2).unwrap();
        expected.set_coefficient(&[1, 2], BigInt::from(1)).unwrap();
        expected.set_coefficient(&[2, 1], BigInt::from(-1)).unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn expansion_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let len_u = rng.gen_range(0..6);
            let len_w = rng.gen_range(0..6);
            let rand_word = |rng: &mut ChaCha8Rng, len: usize| {
                Word::new(
                    (0..len)
                        .map(|_| {
                            let g = rng.gen_range(1..=3i32);
                            if rng.gen_bool(0.5) {
                                g
                            } else {
                                -g
                            }
                        })
                        .collect(),
                )
                .unwrap()
            };
            let u = rand_word(&mut rng, len_u);
            let w = rand_word(&mut rng, len_w);
            let product = expand(&u.concat(&w), 3, IntRing).unwrap();
            let separate = expand(&u, 3, IntRing)
                .unwrap()
                .mul(&expand(&w, 3, IntRing).unwrap())
                .unwrap();
            assert_eq!(product, separate);
        }
    }

    #[test]
    fn expansion_inverse_matches_word_inverse() {
        let w = Word::parse("1 2 -3 1").unwrap();
        let p = expand(&w, 3, IntRing).unwrap();
        let q = expand(&w.inverse(), 3, IntRing).unwrap();
        assert_eq!(p.inverse().unwrap(), q);
        assert!(p.mul(&q).unwrap().is_one());
    }

    #[test]
    fn mu_coefficient_examples() {
        let p = int_expand("1 2 -1 -2", 2);
        assert_eq!(mu_coefficient(&p, &[1, 2]).unwrap(), BigInt::from(1));
        assert_eq!(mu_coefficient(&p, &[2, 1]).unwrap(), BigInt::from(-1));
        assert_eq!(mu_coefficient(&p, &[]).unwrap(), BigInt::from(1));
        assert!(matches!(
            mu_coefficient(&p, &[1, 1]),
            Err(MagnusError::RepeatedIndex { .. })
        ));
        assert!(matches!(
            mu_coefficient(&p, &[1, 3]),
            Err(MagnusError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn out_of_alphabet_letter_is_rejected() {
        let w = Word::parse("1 3").unwrap();
        assert!(matches!(
            expand(&w, 2, IntRing),
            Err(MagnusError::BadLetter { .. })
        ));
    }

    #[test]
    fn cube_of_unit_binomial_is_divisible() {
        let g = int_expand("1", 2);
        assert!(cube_divisibility(&g).unwrap());
    }

    #[test]
    fn cube_divisibility_rejects_bad_inputs() {
        let mut g = NRPoly::one(IntRing, 2).unwrap();
        g.set_coefficient(&[], BigInt::from(2)).unwrap();
        assert!(matches!(cube_divisibility(&g), Err(MagnusError::NonMonic)));
        let h = NRPoly::one(IntRing, 3).unwrap();
        assert!(matches!(
            cube_divisibility(&h),
            Err(MagnusError::WrongVariableCount { .. })
        ));
    }

    #[test]
    fn cube_divisibility_for_random_polys() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut g = NRPoly::one(IntRing, 2).unwrap();
            for seq in [vec![1u32], vec![2], vec![1, 2], vec![2, 1]] {
                g.set_coefficient(&seq, BigInt::from(rng.gen_range(-50i64..=50)))
                    .unwrap();
            }
            assert!(cube_divisibility(&g).unwrap());
        }
    }

    #[test]
    fn filtration_degrees() {
        let m1 = Word::parse("1").unwrap();
        assert_eq!(filtration_min_degree(&m1, 3, 2).unwrap(), Some(1));
        assert_eq!(filtration_min_degree(&m1.pow(3), 3, 2).unwrap(), None);
        let comm = Word::parse("1 2 -1 -2").unwrap();
        assert_eq!(filtration_min_degree(&comm, 2, 2).unwrap(), Some(2));
        assert!(matches!(
            filtration_min_degree(&m1, 4, 2),
            Err(MagnusError::NotPrime { p: 4 })
        ));
    }

    #[test]
    fn lcs_elements_are_deterministic_and_deep() {
        let a = random_lcs_element(2, 3, 2, 99).unwrap();
        let b = random_lcs_element(2, 3, 2, 99).unwrap();
        assert_eq!(a, b);
        for seed in 0..20 {
            let w = random_lcs_element(2, 3, 2, seed).unwrap();
            let depth = filtration_min_degree(&w, 3, 2).unwrap();
            assert!(depth.is_none() || depth.unwrap() >= 2, "seed {seed}: {depth:?}");
        }
        // Above the variable count every monomial dies.
        for seed in 0..5 {
            let w = random_lcs_element(3, 2, 2, seed).unwrap();
            assert_eq!(filtration_min_degree(&w, 2, 2).unwrap(), None);
        }
        assert!(matches!(
            random_lcs_element(0, 3, 2, 1),
            Err(MagnusError::ZeroLevel)
        ));
    }

    #[test]
    fn band_sum_preserves_coefficients() {
        let longitude = Word::parse("1").unwrap();
        let beta = Word::parse("1 1 1").unwrap();
        assert!(band_sum_invariance(&longitude, &beta, 3, &[1]).unwrap());
        // A bare meridian fails the depth precondition.
        let shallow = Word::parse("1").unwrap();
        assert!(matches!(
            band_sum_invariance(&longitude, &shallow, 3, &[1]),
            Err(MagnusError::ShallowBandSummand { degree: Some(1) })
        ));
    }

    #[test]
    fn band_sum_over_random_deep_summands() {
        for (p, v) in [(2u64, 1usize), (3, 2), (5, 2)] {
            for seed in 0..8 {
                let beta = random_lcs_element(v + 1, p, v, seed).unwrap();
                if expand(&beta, v, ModRing::new(p).unwrap()).unwrap().is_one() {
                    let longitude = random_lcs_element(1, p, v, seed + 1000).unwrap();
                    let sequence: Vec<u32> = (1..=v as u32).collect();
                    assert!(band_sum_invariance(&longitude, &beta, p, &sequence).unwrap());
                }
            }
        }
    }

    #[test]
    fn milnor_relators_expand_to_one() {
        let empty = Word::identity();
        assert!(milnor_relator_check(&empty, &empty, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let rand_word = |rng: &mut ChaCha8Rng| {
                Word::new(
                    (0..rng.gen_range(0..5))
                        .map(|_| {
                            let g = rng.gen_range(1..=4i32);
                            if rng.gen_bool(0.5) {
                                g
                            } else {
                                -g
                            }
                        })
                        .collect(),
                )
                .unwrap()
            };
            let c1 = rand_word(&mut rng);
            let c2 = rand_word(&mut rng);
            let g = rng.gen_range(1..=4u32);
            assert!(milnor_relator_check(&c1, &c2, g).unwrap());
        }
    }

    #[test]
    fn conjugates_of_different_generators_do_not_commute() {
        // [m1, m2] expands to 1 + x1x2 - x2x1, not 1.
        let g1 = Word::parse("1").unwrap();
        let g2 = Word::parse("2").unwrap();
        let poly = expand(&g1.commutator(&g2), 2, IntRing).unwrap();
        assert!(!poly.is_one());
    }

    #[test]
    fn inverse_requires_monic() {
        let mut g = NRPoly::one(IntRing, 2).unwrap();
        g.set_coefficient(&[], BigInt::from(0)).unwrap();
        assert!(matches!(g.inverse(), Err(MagnusError::NonMonic)));
    }
}
