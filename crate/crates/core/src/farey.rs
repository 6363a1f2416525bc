//! Exact slope arithmetic on the Farey graph.
//!
//! A slope `q/p` is stored as the primitive lattice vector `(q, p)` with
//! `p >= 0`; the meridian slope `∞` has the single representative `(1, 0)`.
//! The longitude has slope `0 = (0, 1)`. Two slopes share a Farey edge
//! exactly when the determinant of their vectors is `±1`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FareyError {
    #[error("(0, 0) is not a slope")]
    ZeroVector,
    #[error("cannot parse slope {0:?}")]
    Parse(String),
    #[error("slope {given:?} is not in lowest terms (normalizes to {normalized})")]
    NotReduced { given: String, normalized: Slope },
    #[error("slopes {0} and {1} do not share a Farey edge")]
    NotAdjacent(Slope, Slope),
    #[error("operation requires a finite slope, got ∞")]
    Infinite,
}

/// An element of `Z²`, not necessarily primitive. The first coordinate
/// plays the role of the numerator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    pub x: BigInt,
    pub y: BigInt,
}

impl LatticeVector {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        LatticeVector {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn zero() -> Self {
        LatticeVector::new(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_primitive(&self) -> bool {
        self.x.gcd(&self.y).is_one()
    }

    /// `det(self, other)`.
    pub fn det(&self, other: &LatticeVector) -> BigInt {
        &self.x * &other.y - &self.y * &other.x
    }

    /// The slope spanned by this vector, if it is nonzero.
    pub fn to_slope(&self) -> Result<Slope, FareyError> {
        Slope::new(self.x.clone(), self.y.clone())
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector {
            x: &self.x + &rhs.x,
            y: &self.y + &rhs.y,
        }
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: LatticeVector) -> LatticeVector {
        &self + &rhs
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector {
            x: &self.x - &rhs.x,
            y: &self.y - &rhs.y,
        }
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: LatticeVector) -> LatticeVector {
        &self - &rhs
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector {
            x: -self.x,
            y: -self.y,
        }
    }
}

impl Mul<&LatticeVector> for &BigInt {
    type Output = LatticeVector;
    fn mul(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector {
            x: self * &rhs.x,
            y: self * &rhs.y,
        }
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Serialized as a two-element array; entries that do not fit in an `i64`
/// are written as decimal strings.
impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        let mut tup = serializer.serialize_tuple(2)?;
        for c in [&self.x, &self.y] {
            match c.to_i64() {
                Some(v) => tup.serialize_element(&v)?,
                None => tup.serialize_element(&c.to_string())?,
            }
        }
        tup.end()
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Coord {
            Int(i64),
            Text(String),
        }
        let [x, y]: [Coord; 2] = Deserialize::deserialize(deserializer)?;
        let conv = |c: Coord| -> Result<BigInt, D::Error> {
            match c {
                Coord::Int(v) => Ok(BigInt::from(v)),
                Coord::Text(s) => s.parse().map_err(de::Error::custom),
            }
        };
        Ok(LatticeVector {
            x: conv(x)?,
            y: conv(y)?,
        })
    }
}

/// A rational slope `q/p` or `∞`, normalized to a primitive vector with
/// nonnegative denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Slope {
    num: BigInt,
    den: BigInt,
}

impl Slope {
    /// Builds the slope of the vector `(num, den)`, reducing and fixing the
    /// sign of the denominator.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Slope, FareyError> {
        let (mut num, mut den) = (num.into(), den.into());
        if num.is_zero() && den.is_zero() {
            return Err(FareyError::ZeroVector);
        }
        let g = num.gcd(&den);
        num /= &g;
        den /= &g;
        if den.is_negative() || (den.is_zero() && num.is_negative()) {
            num = -num;
            den = -den;
        }
        Ok(Slope { num, den })
    }

    pub fn integer(n: impl Into<BigInt>) -> Slope {
        Slope {
            num: n.into(),
            den: BigInt::one(),
        }
    }

    pub fn infinity() -> Slope {
        Slope {
            num: BigInt::one(),
            den: BigInt::zero(),
        }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn vector(&self) -> LatticeVector {
        LatticeVector {
            x: self.num.clone(),
            y: self.den.clone(),
        }
    }

    /// `⌊q/p⌋` for a finite slope.
    pub fn floor(&self) -> Result<BigInt, FareyError> {
        if self.is_infinite() {
            return Err(FareyError::Infinite);
        }
        Ok(self.num.div_floor(&self.den))
    }

    /// `⌈q/p⌉` for a finite slope.
    pub fn ceil(&self) -> Result<BigInt, FareyError> {
        if self.is_infinite() {
            return Err(FareyError::Infinite);
        }
        Ok(self.num.div_ceil(&self.den))
    }

    /// Rational comparison of two finite slopes.
    pub fn try_cmp(&self, other: &Slope) -> Result<Ordering, FareyError> {
        if self.is_infinite() || other.is_infinite() {
            return Err(FareyError::Infinite);
        }
        Ok((&self.num * &other.den).cmp(&(&other.num * &self.den)))
    }

    /// Rational comparison against an integer.
    pub fn cmp_integer(&self, n: &BigInt) -> Result<Ordering, FareyError> {
        self.try_cmp(&Slope::integer(n.clone()))
    }

    /// Parses `"q/p"`, `"q"` or `"inf"`. Non-reduced input is accepted and
    /// normalized; the returned flag is set when normalization changed it.
    pub fn parse_lenient(s: &str) -> Result<(Slope, bool), FareyError> {
        let t = s.trim();
        if t == "inf" || t == "∞" {
            return Ok((Slope::infinity(), false));
        }
        let bad = || FareyError::Parse(s.to_string());
        let (num, den) = match t.split_once('/') {
            Some((a, b)) => (
                a.trim().parse::<BigInt>().map_err(|_| bad())?,
                b.trim().parse::<BigInt>().map_err(|_| bad())?,
            ),
            None => (t.parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
        };
        let slope = Slope::new(num.clone(), den.clone())?;
        let changed = slope.num != num || slope.den != den;
        Ok((slope, changed))
    }
}

impl FromStr for Slope {
    type Err = FareyError;

    /// Strict parse: rejects anything that is not already normalized.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (slope, changed) = Slope::parse_lenient(s)?;
        if changed {
            return Err(FareyError::NotReduced {
                given: s.to_string(),
                normalized: slope,
            });
        }
        Ok(slope)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct SlopeVisitor;
        impl Visitor<'_> for SlopeVisitor {
            type Value = Slope;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a slope string such as \"-12/5\" or \"inf\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Slope, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Slope, E> {
                Ok(Slope::integer(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Slope, E> {
                Ok(Slope::integer(v))
            }
        }
        deserializer.deserialize_any(SlopeVisitor)
    }
}

/// Anything with a lattice-vector representative.
pub trait AsVector {
    fn as_vector(&self) -> LatticeVector;
}

impl AsVector for Slope {
    fn as_vector(&self) -> LatticeVector {
        self.vector()
    }
}

impl AsVector for LatticeVector {
    fn as_vector(&self) -> LatticeVector {
        self.clone()
    }
}

/// `a · b = a.num·b.den − a.den·b.num`. Its absolute value is the minimal
/// geometric intersection number of the two curve classes.
pub fn product(a: &impl AsVector, b: &impl AsVector) -> BigInt {
    a.as_vector().det(&b.as_vector())
}

pub fn adjacent(a: &Slope, b: &Slope) -> bool {
    product(a, b).abs().is_one()
}

/// The Farey mediant of two adjacent slopes.
pub fn mediant(a: &Slope, b: &Slope) -> Result<Slope, FareyError> {
    if !adjacent(a, b) {
        return Err(FareyError::NotAdjacent(a.clone(), b.clone()));
    }
    (a.vector() + b.vector()).to_slope()
}

/// Componentwise difference `a ⊖ b` of the vector representatives.
pub fn ominus(a: &Slope, b: &Slope) -> LatticeVector {
    a.vector() - b.vector()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductSign {
    NonNegative,
    Negative,
}

/// Sign of `a · b` for finite slopes; nonnegative exactly when `a >= b`.
pub fn sign_of_product(a: &Slope, b: &Slope) -> Result<ProductSign, FareyError> {
    if a.is_infinite() || b.is_infinite() {
        return Err(FareyError::Infinite);
    }
    Ok(if product(a, b).is_negative() {
        ProductSign::Negative
    } else {
        ProductSign::NonNegative
    })
}

/// An orientation-preserving change of basis `[[a, b], [c, d]]` with
/// determinant one, acting on column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Sl2 {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl Sl2 {
    /// A matrix sending `s` to `∞`.
    pub(crate) fn to_infinity(s: &Slope) -> Sl2 {
        // Solve num·d − den·c = 1 for (c, d).
        let e = s.num.extended_gcd(&s.den);
        let (x, y) = if e.gcd.is_negative() {
            (-e.x, -e.y)
        } else {
            (e.x, e.y)
        };
        debug_assert!(e.gcd.abs().is_one());
        let (c, d) = (-y, x);
        // [[num, c], [den, d]] sends ∞ to s; invert it.
        Sl2 {
            a: d,
            b: -c,
            c: -s.den.clone(),
            d: s.num.clone(),
        }
    }

    pub(crate) fn inverse(&self) -> Sl2 {
        Sl2 {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
    }

    pub(crate) fn apply(&self, s: &Slope) -> Slope {
        let x = &self.a * &s.num + &self.b * &s.den;
        let y = &self.c * &s.num + &self.d * &s.den;
        Slope::new(x, y).expect("unimodular image of a nonzero vector is nonzero")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Slope {
        text.parse().unwrap()
    }

    #[test]
    fn product_examples() {
        assert_eq!(product(&s("inf"), &s("0")), BigInt::from(1));
        assert_eq!(product(&s("-1"), &s("-3/2")), BigInt::from(1));
        assert_eq!(product(&s("-12/5"), &s("-12/5")), BigInt::from(0));
    }

    #[test]
    fn mediant_examples() {
        assert_eq!(mediant(&s("0"), &s("1")).unwrap(), s("1/2"));
        assert_eq!(mediant(&s("-3"), &s("-5/2")).unwrap(), s("-8/3"));
        assert_eq!(mediant(&s("inf"), &s("2")).unwrap(), s("3"));
        assert!(matches!(
            mediant(&s("0"), &s("2")),
            Err(FareyError::NotAdjacent(..))
        ));
    }

    #[test]
    fn ominus_examples() {
        let v = ominus(&s("-3/2"), &s("-2"));
        assert_eq!(v, LatticeVector::new(-1, 1));
        assert!(v.is_primitive());
        assert_eq!(ominus(&s("-12/5"), &s("-5/2")), LatticeVector::new(-7, 3));
        assert!(ominus(&s("-7/3"), &s("-7/3")).is_zero());
    }

    #[test]
    fn sign_examples() {
        assert_eq!(
            sign_of_product(&s("-2"), &s("-3/2")).unwrap(),
            ProductSign::Negative
        );
        assert_eq!(
            sign_of_product(&s("-3/2"), &s("-3/2")).unwrap(),
            ProductSign::NonNegative
        );
        assert_eq!(
            sign_of_product(&s("1"), &s("0")).unwrap(),
            ProductSign::NonNegative
        );
        assert_eq!(
            sign_of_product(&s("inf"), &s("0")),
            Err(FareyError::Infinite)
        );
    }

    #[test]
    fn parsing_and_normalization() {
        assert_eq!(s("inf"), Slope::infinity());
        assert_eq!(s("+3/2"), Slope::new(3, 2).unwrap());
        assert_eq!(s("-7"), Slope::integer(-7));
        assert_eq!(Slope::new(-1, 0).unwrap(), Slope::infinity());
        assert_eq!(Slope::new(3, -6).unwrap(), s("-1/2"));
        assert!(matches!(
            "4/2".parse::<Slope>(),
            Err(FareyError::NotReduced { .. })
        ));
        assert!(matches!(
            "3/-2".parse::<Slope>(),
            Err(FareyError::NotReduced { .. })
        ));
        assert_eq!(
            Slope::parse_lenient("4/2").unwrap(),
            (Slope::integer(2), true)
        );
        assert_eq!("0/0".parse::<Slope>(), Err(FareyError::ZeroVector));
        assert!("x/2".parse::<Slope>().is_err());
        assert_eq!(s("-12/5").to_string(), "-12/5");
        assert_eq!(s("5").to_string(), "5");
    }

    #[test]
    fn floor_and_compare() {
        assert_eq!(s("-12/5").floor().unwrap(), BigInt::from(-3));
        assert_eq!(s("-12/5").ceil().unwrap(), BigInt::from(-2));
        assert_eq!(s("7").floor().unwrap(), BigInt::from(7));
        assert_eq!(s("-5/2").try_cmp(&s("-12/5")).unwrap(), Ordering::Less);
        assert!(s("1").try_cmp(&s("inf")).is_err());
    }

    #[test]
    fn sl2_moves_slope_to_infinity() {
        for text in ["-12/5", "3/7", "0", "-1", "inf", "5/2"] {
            let m = Sl2::to_infinity(&s(text));
            assert_eq!(m.apply(&s(text)), Slope::infinity());
            assert_eq!(m.inverse().apply(&Slope::infinity()), s(text));
        }
    }

    #[test]
    fn serde_round_trip() {
        let json = serde_json::to_string(&vec![s("-12/5"), s("inf"), s("3")]).unwrap();
        assert_eq!(json, r#"["-12/5","inf","3"]"#);
        let back: Vec<Slope> = serde_json::from_str(&json).unwrap();
        assert_eq!(back[0], s("-12/5"));
        let v: LatticeVector = serde_json::from_str("[-7, 3]").unwrap();
        assert_eq!(v, LatticeVector::new(-7, 3));
        assert_eq!(serde_json::to_string(&v).unwrap(), "[-7,3]");
    }
}
