//! Cables with slope above the contact width.
//!
//! Each base class `(a, b) = (rot, tb)` spreads into a diamond of `p²` cable
//! classes with peak `(pa, pq − |pb − q|)`. The cable class
//! `S₊^K S₋^L(G_g)` has underlying class `S₊^⌊K/p⌋ S₋^⌊L/p⌋(g)`, and two cable
//! classes are isotopic iff their invariants and underlying classes agree.
//!
//! That law is presented by lifting each base rule `(a, ka, la, b, kb, lb)` to
//! `(G_a, p·ka, p·la, G_b, p·kb, p·lb)`. Cable invariants are affine in the
//! base ones with slope `p`, so at a shared lattice point the counts `K`
//! for different generators differ by multiples of `p` and the lifted rule
//! fires exactly when the base rule fires at the underlying point. The
//! per-point union-find graphs therefore coincide, and the residues `K mod p`
//! need no rules of their own.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::atlas::{
    AtlasError, Generator, LegendrianAtlas, LegendrianClass, MergeRule, TransverseClass,
};
use crate::farey::Slope;
use crate::invariants::{cable_of_legendrian, CableParams, ClassicalInvariants};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosCableError {
    #[error("diamond base point ({a}, {b}) needs a + b odd")]
    Parity { a: i64, b: i64 },
    #[error("slope {0} is an integer; the cable is isotopic to the companion")]
    IntegerSlope(Slope),
    #[error("slope {slope} must exceed the width bound {bound} ({source_name})")]
    BelowWidth {
        slope: Slope,
        bound: i64,
        source_name: &'static str,
    },
    #[error(transparent)]
    Atlas(#[from] AtlasError),
}

/// `p²` lattice points `S₊^k S₋^l(peak)`, `0 ≤ k, l < p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diamond {
    pub p: i64,
    pub peak: ClassicalInvariants,
    pub points: BTreeSet<ClassicalInvariants>,
}

impl Diamond {
    pub fn contains(&self, point: ClassicalInvariants) -> bool {
        self.points.contains(&point)
    }
}

fn peak(params: CableParams, a: i64, b: i64) -> ClassicalInvariants {
    ClassicalInvariants::new(
        params.pq() - (params.p() * b - params.q()).abs(),
        params.p() * a,
    )
}

pub fn diamond(params: CableParams, a: i64, b: i64) -> Result<Diamond, PosCableError> {
    if (a + b).rem_euclid(2) != 1 {
        return Err(PosCableError::Parity { a, b });
    }
    let top = peak(params, a, b);
    let k_max = u32::try_from(params.p() - 1).expect("p fits in u32");
    let points = (0..=k_max)
        .flat_map(|k| (0..=k_max).map(move |l| top.stabilized(k, l)))
        .collect();
    Ok(Diamond {
        p: params.p(),
        peak: top,
        points,
    })
}

/// Membership by inequalities:
/// `t + |r − pa| ≤ T`, `t − |r − pa| ≥ T − 2p + 2`, `t + r` odd,
/// where `T = pq − |pb − q|`.
pub fn in_diamond(params: CableParams, a: i64, b: i64, point: ClassicalInvariants) -> bool {
    let top = peak(params, a, b);
    let offset = (point.rot - top.rot).abs();
    point.tb + offset <= top.tb
        && point.tb - offset >= top.tb - 2 * params.p() + 2
        && point.has_sphere_parity()
}

/// Which bound gated an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateSource {
    CeilWidth,
    MaxTbPlusOne,
}

impl GateSource {
    fn name(self) -> &'static str {
        match self {
            GateSource::CeilWidth => "ceil_width",
            GateSource::MaxTbPlusOne => "max_tb + 1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WidthGate {
    pub bound: i64,
    pub source: GateSource,
}

pub fn width_gate(atlas: &LegendrianAtlas) -> WidthGate {
    match atlas.ceil_width() {
        Some(bound) => WidthGate {
            bound,
            source: GateSource::CeilWidth,
        },
        None => WidthGate {
            bound: atlas.max_tb() + 1,
            source: GateSource::MaxTbPlusOne,
        },
    }
}

fn check_gate(atlas: &LegendrianAtlas, params: CableParams) -> Result<WidthGate, PosCableError> {
    let gate = width_gate(atlas);
    if params.q() <= params.p() * gate.bound {
        return Err(PosCableError::BelowWidth {
            slope: params.slope(),
            bound: gate.bound,
            source_name: gate.source.name(),
        });
    }
    Ok(gate)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Expansion {
    pub atlas: LegendrianAtlas,
    pub gate: WidthGate,
}

/// The cable atlas. Generators keep their base ids.
pub fn expand(atlas: &LegendrianAtlas, params: CableParams) -> Result<Expansion, PosCableError> {
    if params.is_integer_slope() {
        return Err(PosCableError::IntegerSlope(params.slope()));
    }
    let gate = check_gate(atlas, params)?;
    let p = u32::try_from(params.p()).expect("p fits in u32");
    let mut generators: Vec<Generator> = atlas
        .generators()
        .iter()
        .map(|g| {
            let c = cable_of_legendrian(g.invariants(), params);
            Generator::new(g.id.clone(), c.tb, c.rot)
        })
        .collect();
    generators.sort_by(|x, y| x.id.cmp(&y.id));
    let merges = atlas
        .merges()
        .iter()
        .map(|r| MergeRule {
            a: r.a.clone(),
            ka: p * r.ka,
            la: p * r.la,
            b: r.b.clone(),
            kb: p * r.kb,
            lb: p * r.lb,
        })
        .collect();
    let max_tb = cable_of_legendrian(ClassicalInvariants::new(atlas.max_tb(), 0), params).tb;
    let cable = LegendrianAtlas::new(
        format!("{}_({},{})", atlas.name(), params.p(), params.q()),
        max_tb,
        None,
        generators,
        merges,
    )?;
    Ok(Expansion { atlas: cable, gate })
}

/// `S₊^K S₋^L(G_g) ↦ S₊^⌊K/p⌋ S₋^⌊L/p⌋(g)`.
pub fn underlying(params: CableParams, c: &LegendrianClass) -> LegendrianClass {
    let p = u32::try_from(params.p()).expect("p fits in u32");
    LegendrianClass::new(c.gen.clone(), c.kplus / p, c.kminus / p)
}

/// `p·sl + pq − q − 2k` for `k = 0, …, p − 1`.
pub fn interval_values(params: CableParams, sl: i64) -> Vec<i64> {
    let top = params.p() * sl + params.pq() - params.q();
    (0..params.p()).map(|k| top - 2 * k).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransverseInterval {
    pub underlying: TransverseClass,
    pub sl_values: Vec<i64>,
}

/// Intervals of the base transverse classes with `sl >= sl_floor`.
pub fn transverse_intervals(
    atlas: &LegendrianAtlas,
    params: CableParams,
    sl_floor: i64,
) -> Result<Vec<TransverseInterval>, PosCableError> {
    check_gate(atlas, params)?;
    Ok(atlas
        .transverse_classes(sl_floor)
        .into_iter()
        .map(|t| TransverseInterval {
            sl_values: interval_values(params, t.sl),
            underlying: t,
        })
        .collect())
}
