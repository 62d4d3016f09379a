//! Coefficient fields: prime fields `F_p` with `p < 2^31` and the rationals.
//!
//! `F_2` is an ordinary prime field at this level; matrices over it switch to
//! a bit-packed representation (see [`crate::exactla`]).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::below;

/// Largest admissible prime characteristic (exclusive).
pub const PRIME_LIMIT: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Prime(u32),
    Rationals,
}

/// A validated choice of coefficient field. Serialized as its display label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FieldSpec(FieldKind);

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut k = 3;
    while k * k <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

impl FieldSpec {
    pub const F2: FieldSpec = FieldSpec(FieldKind::Prime(2));
    pub const Q: FieldSpec = FieldSpec(FieldKind::Rationals);

    /// The prime field of characteristic `p`.
    pub fn prime(p: u64) -> Result<Self> {
        if p >= PRIME_LIMIT {
            return Err(Error::usage(format!("prime {p} is not below 2^31")));
        }
        if !is_prime(p) {
            return Err(Error::usage(format!("{p} is not prime")));
        }
        Ok(FieldSpec(FieldKind::Prime(p as u32)))
    }

    pub fn kind(&self) -> FieldKind {
        self.0
    }

    /// The characteristic for prime fields, `None` for the rationals.
    pub fn characteristic(&self) -> Option<u32> {
        match self.0 {
            FieldKind::Prime(p) => Some(p),
            FieldKind::Rationals => None,
        }
    }

    pub fn is_binary(&self) -> bool {
        self.0 == FieldKind::Prime(2)
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    /// The image of an integer in this field.
    pub fn from_i64(&self, value: i64) -> FieldElement {
        match self.0 {
            FieldKind::Prime(p) => FieldElement(Repr::Residue {
                p,
                value: value.rem_euclid(p as i64) as u32,
            }),
            FieldKind::Rationals => FieldElement(Repr::Rational(BigRational::from_integer(
                BigInt::from(value),
            ))),
        }
    }

    /// `num / den` in this field; `den` must be invertible.
    pub fn fraction(&self, num: i64, den: i64) -> Result<FieldElement> {
        self.from_i64(num).div(&self.from_i64(den))
    }

    pub fn from_rational(&self, value: &BigRational) -> Result<FieldElement> {
        match self.0 {
            FieldKind::Rationals => Ok(FieldElement(Repr::Rational(value.clone()))),
            FieldKind::Prime(p) => {
                let reduce = |x: &BigInt| -> u32 {
                    let m = BigInt::from(p);
                    let r = ((x % &m) + &m) % &m;
                    u32::try_from(r).expect("residue fits in u32")
                };
                let num = FieldElement(Repr::Residue {
                    p,
                    value: reduce(value.numer()),
                });
                let den = FieldElement(Repr::Residue {
                    p,
                    value: reduce(value.denom()),
                });
                num.div(&den)
            }
        }
    }

    /// Builds an element from a canonical residue (prime fields only).
    pub(crate) fn residue(&self, value: u32) -> FieldElement {
        match self.0 {
            FieldKind::Prime(p) => FieldElement(Repr::Residue {
                p,
                value: value % p,
            }),
            FieldKind::Rationals => self.from_i64(value as i64),
        }
    }

    /// Number of elements, or `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        self.characteristic().map(u64::from)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            FieldKind::Prime(2) => write!(f, "F2"),
            FieldKind::Prime(p) => write!(f, "Fp:{p}"),
            FieldKind::Rationals => write!(f, "Q"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `F2`, `Fp:<p>`, `F<p>` and `Q`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" {
            return Ok(FieldSpec::Q);
        }
        let digits = s
            .strip_prefix("Fp:")
            .or_else(|| s.strip_prefix('F'))
            .ok_or_else(|| Error::usage(format!("unknown field `{s}`")))?;
        let p: u64 = digits
            .parse()
            .map_err(|_| Error::usage(format!("unknown field `{s}`")))?;
        FieldSpec::prime(p)
    }
}

impl TryFrom<String> for FieldSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FieldSpec> for String {
    fn from(f: FieldSpec) -> String {
        f.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    Residue { p: u32, value: u32 },
    Rational(BigRational),
}

/// An element of some [`FieldSpec`], always held in canonical form.
///
/// Residues live in `[0, p)`; rationals are reduced with a positive
/// denominator (guaranteed by `BigRational`). Equality of values is therefore
/// equality of representations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement(Repr);

impl FieldElement {
    pub fn spec(&self) -> FieldSpec {
        match &self.0 {
            Repr::Residue { p, .. } => FieldSpec(FieldKind::Prime(*p)),
            Repr::Rational(_) => FieldSpec::Q,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Residue { value, .. } => *value == 0,
            Repr::Rational(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Residue { value, .. } => *value == 1,
            Repr::Rational(q) => q.is_one(),
        }
    }

    /// The canonical residue, for prime-field elements.
    pub fn as_residue(&self) -> Option<u32> {
        match &self.0 {
            Repr::Residue { value, .. } => Some(*value),
            Repr::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rational(q) => Some(q),
            Repr::Residue { .. } => None,
        }
    }

    fn mismatch(&self, other: &FieldElement) -> Error {
        Error::usage(format!(
            "operands from different fields: {} and {}",
            self.spec(),
            other.spec()
        ))
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        match (&self.0, &other.0) {
            (Repr::Residue { p, value: a }, Repr::Residue { p: q, value: b }) if p == q => {
                Ok(FieldElement(Repr::Residue {
                    p: *p,
                    value: ((*a as u64 + *b as u64) % *p as u64) as u32,
                }))
            }
            (Repr::Rational(a), Repr::Rational(b)) => Ok(FieldElement(Repr::Rational(a + b))),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn neg(&self) -> FieldElement {
        match &self.0 {
            Repr::Residue { p, value } => FieldElement(Repr::Residue {
                p: *p,
                value: (*p - *value) % *p,
            }),
            Repr::Rational(q) => FieldElement(Repr::Rational(-q)),
        }
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        match (&self.0, &other.0) {
            (Repr::Residue { p, value: a }, Repr::Residue { p: q, value: b }) if p == q => {
                Ok(FieldElement(Repr::Residue {
                    p: *p,
                    value: ((*a as u64 * *b as u64) % *p as u64) as u32,
                }))
            }
            (Repr::Rational(a), Repr::Rational(b)) => Ok(FieldElement(Repr::Rational(a * b))),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::Domain("zero has no inverse".into()));
        }
        Ok(match &self.0 {
            Repr::Residue { p, value } => FieldElement(Repr::Residue {
                p: *p,
                value: inv_mod(*value, *p),
            }),
            Repr::Rational(q) => FieldElement(Repr::Rational(q.recip())),
        })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.mul(&other.inv()?)
    }
}

impl fmt::Display for FieldElement {
    /// Residues print as decimal integers, rationals as `num/den` (or just
    /// `num` when the denominator is one).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Residue { value, .. } => write!(f, "{value}"),
            Repr::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Repr::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

impl FieldSpec {
    /// Parses an entry written by [`FieldElement`]'s `Display` (integers are
    /// accepted for every field and reduced; `a/b` is accepted too).
    pub fn parse_element(&self, token: &str) -> Result<FieldElement> {
        let bad = || Error::usage(format!("cannot parse `{token}` as an element of {self}"));
        match token.split_once('/') {
            None => {
                let v: BigInt = token.trim().parse().map_err(|_| bad())?;
                self.from_rational(&BigRational::from_integer(v))
            }
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                self.from_rational(&BigRational::new(n, d))
            }
        }
    }
}

/// Inverse of a nonzero residue by the extended Euclidean algorithm.
pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut old_r, mut r) = (a as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(p as i64) as u32
}

/// The finite pool used for nonzero rational weights.
pub fn rational_weight_pool() -> [BigRational; 10] {
    let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    [
        r(1, 1),
        r(-1, 1),
        r(2, 1),
        r(-2, 1),
        r(1, 2),
        r(-1, 2),
        r(3, 1),
        r(-3, 1),
        r(1, 3),
        r(-1, 3),
    ]
}

/// Draws a uniformly random nonzero element. Over `Q` the draw is uniform on
/// `{±1, ±2, ±1/2, ±3, ±1/3}`.
pub fn sample_nonzero<R: Rng + ?Sized>(rng: &mut R, spec: FieldSpec) -> FieldElement {
    match spec.kind() {
        FieldKind::Prime(p) => spec.residue(1 + rng.random_range(0..p - 1)),
        FieldKind::Rationals => {
            let pool = rational_weight_pool();
            let k = rng.random_range(0..pool.len());
            FieldElement(Repr::Rational(pool[k].clone()))
        }
    }
}

/// A nonzero element determined by a hash value, with the same law as
/// [`sample_nonzero`].
pub(crate) fn nonzero_from_hash(spec: FieldSpec, h: u64) -> FieldElement {
    match spec.kind() {
        FieldKind::Prime(p) => spec.residue(1 + below(h, p as u64 - 1) as u32),
        FieldKind::Rationals => {
            let pool = rational_weight_pool();
            FieldElement(Repr::Rational(
                pool[below(h, pool.len() as u64) as usize].clone(),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from;
    use proptest::prelude::*;
    use rand::Rng;

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn small_arithmetic() {
        let f5 = f(5);
        assert_eq!(f5.from_i64(3).add(&f5.from_i64(4)).unwrap(), f5.from_i64(2));
        let f2 = FieldSpec::F2;
        assert!(f2.one().add(&f2.one()).unwrap().is_zero());
        let q = FieldSpec::Q;
        let sum = q
            .fraction(1, 3)
            .unwrap()
            .add(&q.fraction(1, 6).unwrap())
            .unwrap();
        assert_eq!(sum, q.fraction(1, 2).unwrap());
        assert_eq!(sum.to_string(), "1/2");
    }

    #[test]
    fn inverses() {
        assert_eq!(f(7).from_i64(3).inv().unwrap(), f(7).from_i64(5));
        assert_eq!(FieldSpec::F2.one().inv().unwrap(), FieldSpec::F2.one());
        let q = FieldSpec::Q;
        assert_eq!(
            q.fraction(-2, 3).unwrap().inv().unwrap(),
            q.fraction(-3, 2).unwrap()
        );
        let err = f(7).zero().inv().unwrap_err();
        assert!(err.to_string().contains("zero has no inverse"));
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let a = f(5).one();
        let b = f(7).one();
        assert!(matches!(a.add(&b), Err(Error::Usage(_))));
        assert!(matches!(a.mul(&FieldSpec::Q.one()), Err(Error::Usage(_))));
    }

    #[test]
    fn prime_validation() {
        assert!(FieldSpec::prime(4).is_err());
        assert!(FieldSpec::prime(1).is_err());
        assert!(FieldSpec::prime(2_147_483_647).is_ok());
        assert!(FieldSpec::prime(1 << 31).is_err());
    }

    #[test]
    fn parse_and_display() {
        for s in ["F2", "Fp:3", "Fp:2147483647", "Q"] {
            assert_eq!(s.parse::<FieldSpec>().unwrap().to_string(), s);
        }
        assert_eq!("F5".parse::<FieldSpec>().unwrap(), f(5));
        assert!("Fp:9".parse::<FieldSpec>().is_err());
        assert!("R".parse::<FieldSpec>().is_err());
        let q = FieldSpec::Q;
        assert_eq!(q.parse_element("-3/6").unwrap(), q.fraction(-1, 2).unwrap());
        assert_eq!(f(7).parse_element("1/2").unwrap(), f(7).from_i64(4));
        assert_eq!(f(7).parse_element("-1").unwrap(), f(7).from_i64(6));
    }

    #[test]
    fn sample_nonzero_behaviour() {
        let mut rng = rng_from(1);
        for _ in 0..100 {
            assert!(sample_nonzero(&mut rng, FieldSpec::F2).is_one());
        }
        let pool = rational_weight_pool();
        for _ in 0..200 {
            let x = sample_nonzero(&mut rng, FieldSpec::Q);
            assert!(pool.contains(x.as_rational().unwrap()));
        }
        // Same seed, same stream.
        let draw = |seed| {
            let mut rng = rng_from(seed);
            (0..16)
                .map(|_| sample_nonzero(&mut rng, f(3)).as_residue().unwrap())
                .collect::<Vec<_>>()
        };
        let first = draw(0x5EED);
        assert_eq!(first, draw(0x5EED));
        assert!(first.iter().all(|&v| v == 1 || v == 2));
    }

    #[test]
    fn residues_agree_with_integer_arithmetic() {
        let mut rng = rng_from(99);
        for &p in &[2u64, 3, 5, 65_521, 2_147_483_647] {
            let fp = f(p);
            for _ in 0..2_000 {
                let a: i64 = rng.random_range(-1_000_000_000..1_000_000_000);
                let b: i64 = rng.random_range(-1_000_000_000..1_000_000_000);
                let (ea, eb) = (fp.from_i64(a), fp.from_i64(b));
                let m = p as i128;
                let sum = ((a as i128 + b as i128).rem_euclid(m)) as u32;
                let prod = ((a as i128 * b as i128).rem_euclid(m)) as u32;
                assert_eq!(ea.add(&eb).unwrap().as_residue(), Some(sum));
                assert_eq!(ea.mul(&eb).unwrap().as_residue(), Some(prod));
            }
        }
    }

    fn element(spec: FieldSpec) -> impl Strategy<Value = FieldElement> {
        (-40i64..40, 1i64..12).prop_map(move |(n, d)| match spec.kind() {
            FieldKind::Rationals => spec.fraction(n, d).unwrap(),
            FieldKind::Prime(_) => spec.from_i64(n * d),
        })
    }

    fn spec_strategy() -> impl Strategy<Value = FieldSpec> {
        prop_oneof![
            Just(FieldSpec::F2),
            Just(FieldSpec::prime(3).unwrap()),
            Just(FieldSpec::prime(101).unwrap()),
            Just(FieldSpec::prime(2_147_483_629).unwrap()),
            Just(FieldSpec::Q),
        ]
    }

    proptest! {
        #[test]
        fn field_axioms(
            (a, b, c) in spec_strategy().prop_flat_map(|s| (element(s), element(s), element(s)))
        ) {
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            prop_assert!(a.sub(&a).unwrap().is_zero());
            if !a.is_zero() {
                prop_assert!(a.mul(&a.inv().unwrap()).unwrap().is_one());
                prop_assert_eq!(a.inv().unwrap().inv().unwrap(), a.clone());
            }
        }
    }
}
