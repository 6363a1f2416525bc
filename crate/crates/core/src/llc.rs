//! Legendrian large cables: cables with `tb > pq`.
//!
//! A large cable with `tb = pq + m` sits on the center torus of a balanced
//! block of length `2m` whose center slope is `q/p`. Its rotation number is
//! that of a ruling curve on either face of the block. A stabilization peels
//! one slice off each end of the block: the front slice carries the
//! stabilization sign and the back slice the opposite one, which joins the
//! decorations below. After `m` stabilizations the block is gone and the knot
//! is a Legendrian divide on one of the tori `T_0, …, T_m`, indexed by how
//! many positive slices ended up above it.

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::farey::{product, Slope};
use crate::invariants::{rot_along_path, CableParams, InvariantError};
use crate::paths::{canonical_form, tail, BalancedBlock, DecoratedPath, PathError, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LlcError {
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("block center {center} is not the cable slope {slope}")]
    CenterMismatch { center: Slope, slope: Slope },
    #[error("decorations below end at {end}, not at the block's back face {back}")]
    BelowMismatch { end: Slope, back: Slope },
    #[error("rotation differs between back face ({back}) and front face ({front})")]
    FaceDisagreement { back: i64, front: i64 },
    #[error("slope {0} is an integer")]
    IntegerSlope(Slope),
    #[error("width bound needs m <= -5, got m = {0}")]
    YasuiRange(i64),
}

/// `m = tb − pq` when positive.
pub fn required_block(tb: i64, params: CableParams) -> Option<usize> {
    let m = tb - params.pq();
    (m > 0).then_some(m as usize)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LargeCable {
    params: CableParams,
    block: BalancedBlock,
    base_rot: i64,
    below: DecoratedPath,
    above: Vec<Sign>,
}

/// A Legendrian divide on `T_t`, reached after the block is used up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DivideDescriptor {
    pub t: usize,
    pub tb: i64,
    pub rot: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stabilized {
    Large(Box<LargeCable>),
    Divide(DivideDescriptor),
}

impl LargeCable {
    /// `below` runs from the integer slope of the base neighbourhood, whose
    /// core has rotation `base_rot`, to the block's back face.
    pub fn new(
        params: CableParams,
        block: BalancedBlock,
        base_rot: i64,
        below: DecoratedPath,
    ) -> Result<LargeCable, LlcError> {
        if *block.center() != params.slope() {
            return Err(LlcError::CenterMismatch {
                center: block.center().clone(),
                slope: params.slope(),
            });
        }
        if *below.path().end() != block.back() {
            return Err(LlcError::BelowMismatch {
                end: below.path().end().clone(),
                back: block.back(),
            });
        }
        let lc = LargeCable {
            params,
            block,
            base_rot,
            below,
            above: Vec::new(),
        };
        lc.face_rots()?;
        Ok(lc)
    }

    pub fn params(&self) -> CableParams {
        self.params
    }

    pub fn block(&self) -> &BalancedBlock {
        &self.block
    }

    pub fn m(&self) -> usize {
        self.block.m()
    }

    pub fn base_rot(&self) -> i64 {
        self.base_rot
    }

    pub fn below(&self) -> &DecoratedPath {
        &self.below
    }

    /// Signs of slices already stripped from the front of the block.
    pub fn above(&self) -> &[Sign] {
        &self.above
    }

    pub fn tb(&self) -> i64 {
        self.params.pq() + self.m() as i64
    }

    fn face_rots(&self) -> Result<(i64, i64), LlcError> {
        let back = rot_along_path(self.params, self.base_rot, &self.below)?;
        let mut through = self.below.clone();
        for (v, &s) in self
            .block
            .vertices()
            .into_iter()
            .skip(1)
            .zip(self.block.signs())
        {
            through.push(v, s)?;
        }
        let front = rot_along_path(self.params, self.base_rot, &through)?;
        Ok((back, front))
    }

    /// Front and back faces must agree for a balanced block.
    pub fn rot(&self) -> Result<i64, LlcError> {
        let (back, front) = self.face_rots()?;
        if back != front {
            return Err(LlcError::FaceDisagreement { back, front });
        }
        Ok(back)
    }

    /// Data identifying the block configuration up to shuffling inside
    /// continued fraction blocks.
    pub fn canonical_key(&self) -> (Slope, usize, i64, DecoratedPath) {
        (
            self.block.center().clone(),
            self.m(),
            self.base_rot,
            canonical_form(&self.below),
        )
    }
}

pub fn llc_rot(lc: &LargeCable) -> Result<i64, LlcError> {
    lc.rot()
}

fn remove_first(signs: &mut Vec<Sign>, s: Sign) {
    let i = signs
        .iter()
        .position(|&x| x == s)
        .expect("balanced block has both signs");
    signs.remove(i);
}

/// `S_±` of a large cable.
pub fn llc_stabilize(lc: &LargeCable, sign: Sign) -> Result<Stabilized, LlcError> {
    let block = &lc.block;
    let mut signs = block.signs().to_vec();
    remove_first(&mut signs, Sign::Plus);
    remove_first(&mut signs, Sign::Minus);
    let mut below = lc.below.clone();
    below.push(block.vertices()[1].clone(), sign.opposite())?;
    let mut above = lc.above.clone();
    above.push(sign);
    let m = block.m() - 1;
    if m == 0 {
        let rot = rot_along_path(lc.params, lc.base_rot, &below)?;
        return Ok(Stabilized::Divide(DivideDescriptor {
            t: above.iter().filter(|&&s| s == Sign::Plus).count(),
            tb: lc.params.pq(),
            rot,
        }));
    }
    let inner = BalancedBlock::new(block.center().clone(), m, signs, Some(block.step().clone()))?;
    Ok(Stabilized::Large(Box::new(LargeCable {
        params: lc.params,
        block: inner,
        base_rot: lc.base_rot,
        below,
        above,
    })))
}

/// Divides reached by every `m`-fold stabilization, deduplicated and sorted.
pub fn divide_tree(lc: &LargeCable) -> Result<Vec<DivideDescriptor>, LlcError> {
    let mut frontier = vec![lc.clone()];
    let mut out = std::collections::BTreeSet::new();
    while let Some(cur) = frontier.pop() {
        for sign in [Sign::Plus, Sign::Minus] {
            match llc_stabilize(&cur, sign)? {
                Stabilized::Large(next) => frontier.push(*next),
                Stabilized::Divide(d) => {
                    out.insert(d);
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Upper bound on `tb` of `(p, q)`-cables of a knot with the given width and
/// maximal `tb`: `pq + k` (tail length of `q/p`) when `q/p ≤ ceil_width`,
/// otherwise `pq + p·max_tb − q`.
pub fn tb_upper_bound(params: CableParams, ceil_width: i64, max_tb: i64) -> Result<i64, LlcError> {
    let slope = params.slope();
    if params.is_integer_slope() {
        return Err(LlcError::IntegerSlope(slope));
    }
    if params.q() <= params.p() * ceil_width {
        let k = tail(&slope)?.k as i64;
        Ok(params.pq() + k)
    } else {
        Ok(params.pq() + params.p() * max_tb - params.q())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct YasuiBound {
    pub m: i64,
    /// Largest `n` for which the witness cable is known to reach `tb = −1`.
    pub n: i64,
    pub bound: Slope,
}

/// Lower bound `−1/(2⌊(3 − m)/4⌋ − 1)` on the width of the twist knot `K_m`.
pub fn yasui_width_bound(m: i64) -> Result<YasuiBound, LlcError> {
    if m > -5 {
        return Err(LlcError::YasuiRange(m));
    }
    let n = (3 - m).div_euclid(4);
    let bound = Slope::new(-1, 2 * n - 1).expect("positive denominator");
    Ok(YasuiBound { m, n, bound })
}

/// `product(step, center)` is `1` for every block built from a tail step.
pub fn block_pairing_is_unit(block: &BalancedBlock) -> bool {
    product(block.step(), block.center()).is_one()
}
