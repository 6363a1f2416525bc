//! Classical invariants of cables: Thurston–Bennequin numbers of ruling
//! curves and divides, rotation numbers along decorated paths, and the
//! self-linking number of the transverse push-off.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::farey::{product, LatticeVector, Slope};
use crate::paths::{DecoratedPath, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("cable needs p >= 1, got p = {0}")]
    NonPositiveP(i64),
    #[error("p = {p} and q = {q} are not coprime")]
    NotCoprime { p: i64, q: i64 },
    #[error("value does not fit in a 64-bit integer")]
    Overflow,
    #[error("relative Euler class is undefined for a path with an unsigned edge")]
    AlmostDecorated,
    #[error("rotation along a path needs an integer starting slope, got {0}")]
    NonIntegerStart(Slope),
}

/// Cabling coefficients `(p, q)`: the curve `p·λ + q·μ`, slope `q/p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct CableParams {
    p: i64,
    q: i64,
}

#[derive(Deserialize)]
struct RawParams {
    p: i64,
    q: i64,
}

impl TryFrom<RawParams> for CableParams {
    type Error = InvariantError;
    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        CableParams::new(raw.p, raw.q)
    }
}

impl CableParams {
    pub fn new(p: i64, q: i64) -> Result<CableParams, InvariantError> {
        if p < 1 {
            return Err(InvariantError::NonPositiveP(p));
        }
        if p.gcd(&q) != 1 {
            return Err(InvariantError::NotCoprime { p, q });
        }
        Ok(CableParams { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn pq(&self) -> i64 {
        self.p * self.q
    }

    pub fn slope(&self) -> Slope {
        Slope::new(self.q, self.p).expect("p >= 1")
    }

    pub fn is_integer_slope(&self) -> bool {
        self.p == 1
    }
}

/// `(tb, rot)` of a Legendrian knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassicalInvariants {
    pub tb: i64,
    pub rot: i64,
}

impl ClassicalInvariants {
    pub fn new(tb: i64, rot: i64) -> Self {
        ClassicalInvariants { tb, rot }
    }

    /// Knots in the standard 3-sphere have `tb + rot` odd.
    pub fn has_sphere_parity(&self) -> bool {
        (self.tb + self.rot).rem_euclid(2) == 1
    }

    /// `S₊^k S₋^l` applied to these invariants.
    pub fn stabilized(&self, kplus: u32, kminus: u32) -> ClassicalInvariants {
        let (k, l) = (i64::from(kplus), i64::from(kminus));
        ClassicalInvariants {
            tb: self.tb - k - l,
            rot: self.rot + k - l,
        }
    }
}

pub(crate) fn to_i64(v: &BigInt) -> Result<i64, InvariantError> {
    v.to_i64().ok_or(InvariantError::Overflow)
}

/// `pq − |s · q/p|`: tb of a `q/p` ruling curve on a convex torus with
/// dividing slope `s` (a Legendrian divide when `s = q/p`).
pub fn ruling_tb(s: &Slope, params: CableParams) -> Result<i64, InvariantError> {
    let twist = to_i64(&product(s, &params.slope()).abs())?;
    Ok(params.pq() - twist)
}

/// Invariants of the `q/p` ruling curve on the standard neighbourhood of a
/// Legendrian with the given invariants.
pub fn cable_of_legendrian(c: ClassicalInvariants, params: CableParams) -> ClassicalInvariants {
    ClassicalInvariants {
        tb: params.pq() - (params.p() * c.tb - params.q()).abs(),
        rot: params.p() * c.rot,
    }
}

/// `Σ εᵢ (aᵢ ⊖ aᵢ₋₁)`, Poincaré dual of the relative Euler class.
pub fn euler_pd(d: &DecoratedPath) -> Result<LatticeVector, InvariantError> {
    if d.last_unsigned() {
        return Err(InvariantError::AlmostDecorated);
    }
    Ok(d.path()
        .steps()
        .iter()
        .zip(d.signs())
        .fold(LatticeVector::zero(), |acc, (step, sign)| match sign {
            Sign::Plus => acc + step.clone(),
            Sign::Minus => acc - step.clone(),
        }))
}

/// Rotation number of the `q/p` ruling curve (or divide) on the outer
/// boundary of a standard neighbourhood thickened along `d`:
/// `p·rot_base − euler_pd(d) · q/p`.
///
/// Below `q/p` every step pairs positively with `q/p`, so this equals
/// `p·rot_base − Σ εᵢ |(aᵢ ⊖ aᵢ₋₁) · q/p|`; past `q/p` the signed form is
/// the one that keeps balanced blocks contributing zero.
pub fn rot_along_path(
    params: CableParams,
    rot_base: i64,
    d: &DecoratedPath,
) -> Result<i64, InvariantError> {
    if !d.path().start().is_integer() {
        return Err(InvariantError::NonIntegerStart(d.path().start().clone()));
    }
    let pairing = to_i64(&product(&euler_pd(d)?, &params.slope()))?;
    Ok(params.p() * rot_base - pairing)
}

/// The absolute-value form `p·rot_base − Σ εᵢ |(aᵢ ⊖ aᵢ₋₁) · q/p|`.
pub fn rot_along_path_abs(
    params: CableParams,
    rot_base: i64,
    d: &DecoratedPath,
) -> Result<i64, InvariantError> {
    let t = params.slope();
    let mut sum = 0i64;
    for (step, sign) in d.path().steps().iter().zip(d.signs()) {
        sum += sign.value() * to_i64(&product(step, &t).abs())?;
    }
    Ok(params.p() * rot_base - sum)
}

/// `sl = tb − rot` of the positive transverse push-off.
pub fn self_linking(c: ClassicalInvariants) -> i64 {
    c.tb - c.rot
}

pub fn stabilize(c: ClassicalInvariants, sign: Sign) -> ClassicalInvariants {
    match sign {
        Sign::Plus => c.stabilized(1, 0),
        Sign::Minus => c.stabilized(0, 1),
    }
}
