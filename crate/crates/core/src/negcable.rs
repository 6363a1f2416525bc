//! Cables with slope below the contact width.
//!
//! The engine takes solid tori as declared input and computes the cable
//! classification from them. With `a_0 = ⌊q/p⌋, …, a_n = q/p` the clockwise
//! shortest path, `a_i = ⌊q/p⌋ + i` for `i < 0`, and `a_{n+1}, …, a_{n+k}`
//! the continuation of the tail block, a torus `N_i^j` has boundary slope
//! `a_i` and is described by the core of its innermost standard
//! neighbourhood plus the signs of the basic slices out to `a_i`.
//!
//! Its standard cable `L(i,j)` is a ruling curve (`i < n`), a Legendrian
//! divide (`i = n`) or a large cable whose block is the last `2(i − n)`
//! slices (`i > n`). Identifications come from:
//!
//! - commensurating tori at `a_m` inside two tori, where the stabilizations
//!   count the weights `|(a_u ⊖ a_{u−1}) · q/p|` of positive slices (`k`) and
//!   negative slices (`l`) between `a_m` and `a_i`;
//! - super-commensurating tori at `s` around two divide tori, with `k` from
//!   the negative slices on the path from `q/p` clockwise to `s`;
//! - each `m`-fold stabilization of a large cable landing on a divide;
//! - stabilizations of large cables with equal block data.
//!
//! Every rule is checked against the rotation numbers predicted by the
//! signed Euler pairing before it is accepted.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atlas::{AtlasError, Generator, LegendrianAtlas, LegendrianClass, MergeRule};
use crate::farey::{ominus, product, Slope};
use crate::invariants::{
    rot_along_path, rot_along_path_abs, ruling_tb, to_i64, CableParams, ClassicalInvariants,
    InvariantError,
};
use crate::llc::{divide_tree, llc_stabilize, LargeCable, LlcError, Stabilized};
use crate::paths::{
    minimal_path, shortest_path, tail, BalancedBlock, DecoratedPath, FareyPath, PathError, Sign,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NegCableError {
    #[error("invalid tori JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Llc(#[from] LlcError),
    #[error("the classification assumes the knot is minimally thickenable at the cable slope")]
    NotMinimallyThickenable,
    #[error("cable slope {0} is an integer")]
    IntegerSlope(Slope),
    #[error("cable slope {slope} must lie below the width bound {ceil_width}")]
    AboveWidth { slope: Slope, ceil_width: i64 },
    #[error("in-between mode needs w <= q/p < ceil(w); got w = {width}, q/p = {slope}")]
    NotInBetween { width: Slope, slope: Slope },
    #[error(
        "slope {slope} has the form (rs - r - s)/n with n sharing a factor with rs - r - s; \
         tori for such slopes need a finer description than this engine accepts"
    )]
    TorusKnotSlope { slope: Slope },
    #[error("torus {0} is declared more than once")]
    DuplicateTorus(TorusId),
    #[error("torus {0} is not declared")]
    UnknownTorus(TorusId),
    #[error("torus {id}: j must be positive")]
    BadJ { id: TorusId },
    #[error("torus {id}: index exceeds the largest admissible index {max}")]
    IndexTooLarge { id: TorusId, max: i64 },
    #[error("torus {id}: expected {expected} signs, found {found}")]
    SignCount {
        id: TorusId,
        expected: usize,
        found: usize,
    },
    #[error("torus {id}: the last {len} signs must be balanced")]
    UnbalancedTail { id: TorusId, len: usize },
    #[error(
        "torus {id}: core has tb {found}, but the innermost slope {slope} needs tb {expected}"
    )]
    BaseTb {
        id: TorusId,
        expected: i64,
        found: i64,
        slope: Slope,
    },
    #[error("torus {id}: destabilization targets are only meaningful at index n = {n}")]
    DestabilizationIndex { id: TorusId, n: usize },
    #[error("torus {id}: destabilization target {target} is not a large-cable torus")]
    DestabilizationTarget { id: TorusId, target: TorusId },
    #[error("{context}: {detail}")]
    Declaration { context: String, detail: String },
    #[error(
        "{context}: rule {rule:?} is inconsistent; stabilizing gives {} and {} but the torus \
         predicts {}",
        fmt_inv(left),
        fmt_inv(right),
        fmt_inv(expected)
    )]
    Inconsistent {
        context: String,
        rule: MergeRule,
        left: ClassicalInvariants,
        right: ClassicalInvariants,
        expected: ClassicalInvariants,
    },
    #[error(
        "large cable {id}: divide T_{t} (tb {tb}, rot {rot}) matches no declared divide torus"
    )]
    MissingDivide {
        id: TorusId,
        t: usize,
        tb: i64,
        rot: i64,
    },
    #[error(
        "large cable {id}: divide T_{t} matches several tori ({candidates:?}); give t explicitly"
    )]
    AmbiguousDivide {
        id: TorusId,
        t: usize,
        candidates: Vec<TorusId>,
    },
    #[error("standard cables {0} and {1} are identified without stabilization")]
    StandardCablesMerge(String, String),
}

fn fmt_inv(c: &ClassicalInvariants) -> String {
    format!("(tb {}, rot {})", c.tb, c.rot)
}

/// `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusId(pub i64, pub u32);

impl TorusId {
    pub fn generator_id(&self) -> String {
        format!("L({},{})", self.0, self.1)
    }
}

impl fmt::Display for TorusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Negative,
    InBetween(Slope),
}

/// Core of the innermost neighbourhood: a generator id or a stabilized class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseRef {
    Id(String),
    Class(LegendrianClass),
}

impl BaseRef {
    pub fn class(&self) -> LegendrianClass {
        match self {
            BaseRef::Id(id) => LegendrianClass::generator(id.clone()),
            BaseRef::Class(c) => c.clone(),
        }
    }
}

/// `[i, j]` or `[i, j, t]` with `t` the index of the divide torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct DestabTarget {
    pub torus: TorusId,
    pub t: Option<usize>,
}

impl TryFrom<Vec<i64>> for DestabTarget {
    type Error = String;
    fn try_from(v: Vec<i64>) -> Result<Self, String> {
        let j = |x: i64| u32::try_from(x).map_err(|_| format!("bad torus index j = {x}"));
        match v.as_slice() {
            [i, jj] => Ok(DestabTarget {
                torus: TorusId(*i, j(*jj)?),
                t: None,
            }),
            [i, jj, t] => Ok(DestabTarget {
                torus: TorusId(*i, j(*jj)?),
                t: Some(usize::try_from(*t).map_err(|_| format!("bad divide index t = {t}"))?),
            }),
            _ => Err(format!(
                "destabilization target needs [i, j] or [i, j, t], got {v:?}"
            )),
        }
    }
}

impl From<DestabTarget> for Vec<i64> {
    fn from(d: DestabTarget) -> Vec<i64> {
        let mut v = vec![d.torus.0, i64::from(d.torus.1)];
        if let Some(t) = d.t {
            v.push(t as i64);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusDecl {
    pub i: i64,
    pub j: u32,
    pub base_generator: BaseRef,
    #[serde(default)]
    pub signs: Vec<Sign>,
    #[serde(default)]
    pub destabilizes_into: Vec<DestabTarget>,
}

impl TorusDecl {
    pub fn id(&self) -> TorusId {
        TorusId(self.i, self.j)
    }
}

/// A torus at `a_m` inside both `a` and `b`. `a_lower` and `b_lower` give the
/// slice signs from `a_m` up to each torus's innermost slope when `a_m` lies
/// below it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commensuration {
    pub a: TorusId,
    pub b: TorusId,
    pub m: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub a_lower: Vec<Sign>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_lower: Vec<Sign>,
}

/// A torus of slope `slope` around two divide tori, with the slice signs on
/// the path from `q/p` out to `slope` as seen from each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperCommensuration {
    pub a: TorusId,
    pub b: TorusId,
    pub slope: Slope,
    pub a_signs: Vec<Sign>,
    pub b_signs: Vec<Sign>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusKnot {
    pub r: i64,
    pub s: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToriAtlas {
    pub cable: CableParams,
    pub mode: Mode,
    pub base_atlas: LegendrianAtlas,
    pub minimally_thickenable: bool,
    pub tori: Vec<TorusDecl>,
    #[serde(default)]
    pub commensurating: Vec<Commensuration>,
    #[serde(default)]
    pub super_commensurating: Vec<SuperCommensuration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub underlying_torus_knot: Option<TorusKnot>,
}

impl ToriAtlas {
    pub fn from_json(text: &str) -> Result<ToriAtlas, NegCableError> {
        serde_json::from_str(text).map_err(|e| NegCableError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tori atlas serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CableKind {
    Ruling,
    Divide,
    Large,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StandardCable {
    pub i: i64,
    pub j: u32,
    pub id: String,
    pub kind: CableKind,
    pub invariants: ClassicalInvariants,
    pub core: LegendrianClass,
    pub core_invariants: ClassicalInvariants,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleProvenance {
    pub rule: MergeRule,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DestabilizationFact {
    pub torus: TorusId,
    pub destabilizes: bool,
    pub into: Vec<TorusId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub cable: CableParams,
    pub mode: Mode,
    /// `a_0, …, a_{n+k}`.
    pub path: Vec<Slope>,
    pub n: usize,
    pub tail: usize,
    /// Largest usable index in in-between mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    pub standard_cables: Vec<StandardCable>,
    pub destabilizations: Vec<DestabilizationFact>,
    pub rules: Vec<RuleProvenance>,
    /// Standard cables with equal invariants are distinct in the output.
    pub standard_cables_distinct: bool,
}

impl ClassificationReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mode = match &self.mode {
            Mode::Negative => "negative".to_string(),
            Mode::InBetween(w) => format!("in-between (width {w})"),
        };
        let _ = writeln!(
            out,
            "cable ({}, {}) slope {}: {mode}",
            self.cable.p(),
            self.cable.q(),
            self.cable.slope()
        );
        let path: Vec<String> = self.path.iter().map(Slope::to_string).collect();
        let _ = writeln!(
            out,
            "path {} (n = {}, tail {})",
            path.join(", "),
            self.n,
            self.tail
        );
        if let Some(c) = self.cutoff {
            let _ = writeln!(out, "cutoff index {c}");
        }
        let _ = writeln!(out, "standard cables:");
        for c in &self.standard_cables {
            let kind = match c.kind {
                CableKind::Ruling => "ruling",
                CableKind::Divide => "divide",
                CableKind::Large => "large",
            };
            let _ = writeln!(
                out,
                "  {} {kind}: tb {}, rot {} (core {})",
                c.id, c.invariants.tb, c.invariants.rot, c.core
            );
        }
        if !self.destabilizations.is_empty() {
            let _ = writeln!(out, "divides:");
            for d in &self.destabilizations {
                let gen = TorusId(d.torus.0, d.torus.1).generator_id();
                if d.destabilizes {
                    let into: Vec<String> = d.into.iter().map(TorusId::generator_id).collect();
                    let _ = writeln!(out, "  {gen} destabilizes into {}", into.join(", "));
                } else {
                    let _ = writeln!(out, "  {gen} does not destabilize");
                }
            }
        }
        let _ = writeln!(out, "rules:");
        for r in &self.rules {
            let _ = writeln!(
                out,
                "  {} = {}  [{}]",
                r.rule.left(),
                r.rule.right(),
                r.source
            );
        }
        let _ = writeln!(
            out,
            "standard cables distinct: {}",
            self.standard_cables_distinct
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub atlas: LegendrianAtlas,
    pub report: ClassificationReport,
}

/// Per-torus data computed once during validation.
struct Torus {
    decl: TorusDecl,
    cable: StandardCable,
    large: Option<LargeCable>,
}

struct Setup<'a> {
    ta: &'a ToriAtlas,
    params: CableParams,
    slope: Slope,
    floor: BigInt,
    chain: Vec<Slope>,
    n: usize,
    k: usize,
    cutoff: Option<usize>,
    tori: Vec<Torus>,
    index: BTreeMap<TorusId, usize>,
}

impl<'a> Setup<'a> {
    fn new(ta: &'a ToriAtlas) -> Result<Setup<'a>, NegCableError> {
        if !ta.minimally_thickenable {
            return Err(NegCableError::NotMinimallyThickenable);
        }
        let params = ta.cable;
        let slope = params.slope();
        if params.is_integer_slope() {
            return Err(NegCableError::IntegerSlope(slope));
        }
        if let Some(tk) = ta.underlying_torus_knot {
            let big = tk.r * tk.s - tk.r - tk.s;
            let q = params.q();
            if q != 0 && big % q == 0 && big / q > 1 {
                return Err(NegCableError::TorusKnotSlope { slope });
            }
        }
        let floor = slope.floor().expect("finite slope");
        let path = shortest_path(&slope)?;
        let tl = tail(&slope)?;
        let n = path.edge_count();
        let mut chain = path.vertices().to_vec();
        chain.extend(tl.continuation.iter().cloned());
        let cutoff = match &ta.mode {
            Mode::Negative => {
                if let Some(w) = ta.base_atlas.ceil_width() {
                    if params.q() >= params.p() * w {
                        return Err(NegCableError::AboveWidth {
                            slope,
                            ceil_width: w,
                        });
                    }
                }
                None
            }
            Mode::InBetween(w) => {
                let ceil = w.ceil().map_err(PathError::from)?;
                let below_ceil = slope.cmp_integer(&ceil).map_err(PathError::from)?.is_lt();
                if w.try_cmp(&slope).map_err(PathError::from)?.is_gt() || !below_ceil {
                    return Err(NegCableError::NotInBetween {
                        width: w.clone(),
                        slope,
                    });
                }
                let mut cut = 0;
                for (u, a) in chain.iter().enumerate().take(n + 1) {
                    if a.try_cmp(w).map_err(PathError::from)?.is_le() {
                        cut = u;
                    }
                }
                Some(cut)
            }
        };
        let mut setup = Setup {
            ta,
            params,
            slope,
            floor,
            chain,
            n,
            k: tl.k,
            cutoff,
            tori: Vec::new(),
            index: BTreeMap::new(),
        };
        for decl in &ta.tori {
            let torus = setup.torus(decl)?;
            let id = decl.id();
            if setup.index.insert(id, setup.tori.len()).is_some() {
                return Err(NegCableError::DuplicateTorus(id));
            }
            setup.tori.push(torus);
        }
        setup.check_destabilization_targets()?;
        Ok(setup)
    }

    fn slope_at(&self, u: i64) -> Slope {
        if u < 0 {
            Slope::integer(&self.floor + u)
        } else {
            self.chain[u as usize].clone()
        }
    }

    /// `|(a_u ⊖ a_{u−1}) · q/p|`.
    fn weight(&self, u: i64) -> Result<i64, NegCableError> {
        let step = ominus(&self.slope_at(u), &self.slope_at(u - 1));
        Ok(to_i64(&product(&step, &self.slope).abs())?)
    }

    /// `(a_u ⊖ a_{u−1}) · q/p`, signed.
    fn pairing(&self, u: i64) -> Result<i64, NegCableError> {
        let step = ominus(&self.slope_at(u), &self.slope_at(u - 1));
        Ok(to_i64(&product(&step, &self.slope))?)
    }

    fn max_index(&self) -> i64 {
        match self.cutoff {
            Some(c) => c as i64,
            None => (self.n + self.k) as i64,
        }
    }

    fn torus(&self, decl: &TorusDecl) -> Result<Torus, NegCableError> {
        let id = decl.id();
        if decl.j == 0 {
            return Err(NegCableError::BadJ { id });
        }
        let max = self.max_index();
        if decl.i > max {
            return Err(NegCableError::IndexTooLarge { id, max });
        }
        let expected = decl.i.max(0) as usize;
        if decl.signs.len() != expected {
            return Err(NegCableError::SignCount {
                id,
                expected,
                found: decl.signs.len(),
            });
        }
        let core = decl.base_generator.class();
        let core_inv = self.ta.base_atlas.invariants(&core)?;
        let start = self.slope_at(decl.i.min(0));
        let start_tb = to_i64(start.num())?;
        if core_inv.tb != start_tb {
            return Err(NegCableError::BaseTb {
                id,
                expected: start_tb,
                found: core_inv.tb,
                slope: start,
            });
        }
        if decl.i != self.n as i64 && !decl.destabilizes_into.is_empty() {
            return Err(NegCableError::DestabilizationIndex { id, n: self.n });
        }
        let p = self.params.p();
        let n = self.n as i64;
        let in_between = self.cutoff.is_some();
        let mut large = None;
        let (kind, invariants) = if decl.i <= 0 {
            let tb = ruling_tb(&self.slope_at(decl.i), self.params)?;
            (
                CableKind::Ruling,
                ClassicalInvariants::new(tb, p * core_inv.rot),
            )
        } else if decl.i <= n {
            let path = FareyPath::new(self.chain[..=decl.i as usize].to_vec())?;
            let d = DecoratedPath::signed(path, decl.signs.clone())?;
            let rot = rot_along_path(self.params, core_inv.rot, &d)?;
            if rot != rot_along_path_abs(self.params, core_inv.rot, &d)? {
                return Err(NegCableError::Declaration {
                    context: format!("torus {id}"),
                    detail: "signed and absolute rotation formulas disagree below q/p".into(),
                });
            }
            let tb = ruling_tb(&self.slope_at(decl.i), self.params)?;
            let kind = if decl.i == n && !in_between {
                CableKind::Divide
            } else {
                CableKind::Ruling
            };
            (kind, ClassicalInvariants::new(tb, rot))
        } else {
            let m = (decl.i - n) as usize;
            let split = self.n - m;
            let block_signs = decl.signs[split..].to_vec();
            let plus = block_signs.iter().filter(|&&s| s == Sign::Plus).count();
            if plus != m {
                return Err(NegCableError::UnbalancedTail { id, len: 2 * m });
            }
            let block = BalancedBlock::new(self.slope.clone(), m, block_signs, None)?;
            debug_assert_eq!(
                block.vertices(),
                self.chain[split..=self.n + m].to_vec(),
                "tail block continues the shortest path"
            );
            let below = DecoratedPath::signed(
                FareyPath::new(self.chain[..=split].to_vec())?,
                decl.signs[..split].to_vec(),
            )?;
            let lc = LargeCable::new(self.params, block, core_inv.rot, below)?;
            let inv = ClassicalInvariants::new(lc.tb(), lc.rot()?);
            large = Some(lc);
            (CableKind::Large, inv)
        };
        Ok(Torus {
            decl: decl.clone(),
            cable: StandardCable {
                i: decl.i,
                j: decl.j,
                id: id.generator_id(),
                kind,
                invariants,
                core,
                core_invariants: core_inv,
            },
            large,
        })
    }

    fn check_destabilization_targets(&self) -> Result<(), NegCableError> {
        for t in &self.tori {
            for target in &t.decl.destabilizes_into {
                let ok = self
                    .lookup(target.torus)
                    .map(|x| x.large.is_some())
                    .unwrap_or(false);
                if !ok {
                    return Err(NegCableError::DestabilizationTarget {
                        id: t.decl.id(),
                        target: target.torus,
                    });
                }
            }
        }
        Ok(())
    }

    fn lookup(&self, id: TorusId) -> Result<&Torus, NegCableError> {
        self.index
            .get(&id)
            .map(|&i| &self.tori[i])
            .ok_or(NegCableError::UnknownTorus(id))
    }

    /// Checks that both sides of `rule` stabilize to `expected`.
    fn check_rule(
        &self,
        source: &str,
        rule: &MergeRule,
        a: &Torus,
        b: &Torus,
        expected: (ClassicalInvariants, ClassicalInvariants),
    ) -> Result<(), NegCableError> {
        let left = a.cable.invariants.stabilized(rule.ka, rule.la);
        let right = b.cable.invariants.stabilized(rule.kb, rule.lb);
        for (side, exp) in [(left, expected.0), (right, expected.1)] {
            if side != exp || left != right {
                return Err(NegCableError::Inconsistent {
                    context: source.to_string(),
                    rule: rule.clone(),
                    left,
                    right,
                    expected: exp,
                });
            }
        }
        Ok(())
    }

    /// Slice signs of `torus` from `a_m` out to `a_i`, indexed by `u`.
    fn slices_from(
        &self,
        torus: &Torus,
        m: i64,
        lower: &[Sign],
        source: &str,
    ) -> Result<Vec<(i64, Sign)>, NegCableError> {
        let i = torus.decl.i;
        let start = i.min(0);
        let needed = (start - m).max(0) as usize;
        if lower.len() != needed {
            return Err(NegCableError::Declaration {
                context: source.to_string(),
                detail: format!(
                    "torus {} needs {needed} lower slice signs from a_{m} to a_{start}, found {}",
                    torus.decl.id(),
                    lower.len()
                ),
            });
        }
        let mut out: Vec<(i64, Sign)> = lower
            .iter()
            .enumerate()
            .map(|(x, &s)| (m + 1 + x as i64, s))
            .collect();
        for u in (m.max(0) + 1)..=i {
            out.push((u, torus.decl.signs[(u - 1) as usize]));
        }
        Ok(out)
    }

    fn commensuration_rule(
        &self,
        c: &Commensuration,
        index: usize,
    ) -> Result<RuleProvenance, NegCableError> {
        let source = format!("commensurating torus #{index} at a_{}", c.m);
        let a = self.lookup(c.a)?;
        let b = self.lookup(c.b)?;
        let limit = self.cutoff.map_or(self.n as i64, |x| x as i64);
        for t in [a, b] {
            if t.decl.i > limit {
                return Err(NegCableError::Declaration {
                    context: source,
                    detail: format!("torus {} lies above index {limit}", t.decl.id()),
                });
            }
        }
        if c.m >= a.decl.i.min(b.decl.i) {
            return Err(NegCableError::Declaration {
                context: source,
                detail: format!("m = {} must be below both torus indices", c.m),
            });
        }
        let ruling = ClassicalInvariants::new(ruling_tb(&self.slope_at(c.m), self.params)?, 0);
        let mut sides = Vec::new();
        for (t, lower) in [(a, &c.a_lower), (b, &c.b_lower)] {
            let slices = self.slices_from(t, c.m, lower, &source)?;
            let (mut k, mut l, mut shift) = (0i64, 0i64, 0i64);
            for &(u, s) in &slices {
                let w = self.weight(u)?;
                match s {
                    Sign::Plus => k += w,
                    Sign::Minus => l += w,
                }
                shift += s.value() * self.pairing(u)?;
            }
            let total = to_i64(
                &product(
                    &ominus(&self.slope_at(t.decl.i), &self.slope_at(c.m)),
                    &self.slope,
                )
                .abs(),
            )?;
            if k + l != total {
                return Err(NegCableError::Declaration {
                    context: source,
                    detail: format!(
                        "torus {}: k + l = {} but |(a_i ⊖ a_m) · q/p| = {total}",
                        t.decl.id(),
                        k + l
                    ),
                });
            }
            let expected = ClassicalInvariants::new(ruling.tb, t.cable.invariants.rot + shift);
            sides.push((k as u32, l as u32, expected));
        }
        let rule = MergeRule {
            a: a.cable.id.clone(),
            ka: sides[0].0,
            la: sides[0].1,
            b: b.cable.id.clone(),
            kb: sides[1].0,
            lb: sides[1].1,
        };
        self.check_rule(&source, &rule, a, b, (sides[0].2, sides[1].2))?;
        Ok(RuleProvenance { rule, source })
    }

    fn super_commensuration_rule(
        &self,
        c: &SuperCommensuration,
        index: usize,
    ) -> Result<RuleProvenance, NegCableError> {
        let source = format!("super-commensurating torus #{index} at slope {}", c.slope);
        let fail = |detail: String| NegCableError::Declaration {
            context: source.clone(),
            detail,
        };
        if self.cutoff.is_some() {
            return Err(fail(
                "super-commensurating tori do not apply in in-between mode".into(),
            ));
        }
        if c.slope.is_infinite() || c.slope == self.slope {
            return Err(fail("slope must be finite and differ from q/p".into()));
        }
        let a = self.lookup(c.a)?;
        let b = self.lookup(c.b)?;
        for t in [a, b] {
            if t.decl.i != self.n as i64 {
                return Err(fail(format!("torus {} is not a divide torus", t.decl.id())));
            }
        }
        let path = minimal_path(&self.slope, &c.slope)?;
        let steps = path.steps();
        let total = to_i64(&product(&c.slope, &self.slope).abs())?;
        let outer_tb = self.params.pq() - total;
        let mut sides = Vec::new();
        for (t, signs) in [(a, &c.a_signs), (b, &c.b_signs)] {
            if signs.len() != steps.len() {
                return Err(fail(format!(
                    "torus {}: expected {} signs on the path {}, found {}",
                    t.decl.id(),
                    steps.len(),
                    path.vertices()
                        .iter()
                        .map(Slope::to_string)
                        .collect::<Vec<_>>()
                        .join(" "),
                    signs.len()
                )));
            }
            let (mut k, mut l, mut shift) = (0i64, 0i64, 0i64);
            for (step, &s) in steps.iter().zip(signs) {
                let pairing = to_i64(&product(step, &self.slope))?;
                match s {
                    Sign::Minus => k += pairing.abs(),
                    Sign::Plus => l += pairing.abs(),
                }
                shift -= s.value() * pairing;
            }
            if k + l != total {
                return Err(fail(format!(
                    "torus {}: k + l = {} but |s · q/p| = {total}",
                    t.decl.id(),
                    k + l
                )));
            }
            let expected = ClassicalInvariants::new(outer_tb, t.cable.invariants.rot + shift);
            sides.push((k as u32, l as u32, expected));
        }
        let rule = MergeRule {
            a: a.cable.id.clone(),
            ka: sides[0].0,
            la: sides[0].1,
            b: b.cable.id.clone(),
            kb: sides[1].0,
            lb: sides[1].1,
        };
        self.check_rule(&source, &rule, a, b, (sides[0].2, sides[1].2))?;
        Ok(RuleProvenance { rule, source })
    }

    /// Every `m`-fold stabilization of a large cable is a declared divide.
    fn divide_rules(&self) -> Result<Vec<RuleProvenance>, NegCableError> {
        let mut out = Vec::new();
        for t in &self.tori {
            let Some(lc) = &t.large else { continue };
            let id = t.decl.id();
            let m = lc.m() as u32;
            for d in divide_tree(lc)? {
                let claims: Vec<(&Torus, Option<usize>)> = self
                    .tori
                    .iter()
                    .filter_map(|x| {
                        x.decl
                            .destabilizes_into
                            .iter()
                            .find(|target| target.torus == id)
                            .map(|target| (x, target.t))
                    })
                    .collect();
                let explicit: Vec<&Torus> = claims
                    .iter()
                    .filter(|(_, tt)| *tt == Some(d.t))
                    .map(|(x, _)| *x)
                    .collect();
                let candidates = if explicit.is_empty() {
                    claims
                        .iter()
                        .filter(|(x, tt)| tt.is_none() && x.cable.invariants.rot == d.rot)
                        .map(|(x, _)| *x)
                        .collect()
                } else {
                    explicit
                };
                let target = match candidates.as_slice() {
                    [one] => *one,
                    [] => {
                        return Err(NegCableError::MissingDivide {
                            id,
                            t: d.t,
                            tb: d.tb,
                            rot: d.rot,
                        })
                    }
                    many => {
                        return Err(NegCableError::AmbiguousDivide {
                            id,
                            t: d.t,
                            candidates: many.iter().map(|x| x.decl.id()).collect(),
                        })
                    }
                };
                let source = format!(
                    "large cable {} stabilized onto divide T_{}",
                    t.cable.id, d.t
                );
                let rule = MergeRule {
                    a: t.cable.id.clone(),
                    ka: d.t as u32,
                    la: m - d.t as u32,
                    b: target.cable.id.clone(),
                    kb: 0,
                    lb: 0,
                };
                let expected = ClassicalInvariants::new(d.tb, d.rot);
                self.check_rule(&source, &rule, t, target, (expected, expected))?;
                out.push(RuleProvenance { rule, source });
            }
        }
        Ok(out)
    }

    /// Stabilizations of large cables that keep `tb > pq` and have equal block
    /// data are identified.
    fn block_rules(&self) -> Result<Vec<RuleProvenance>, NegCableError> {
        let mut states = Vec::new();
        for (idx, t) in self.tori.iter().enumerate() {
            let Some(lc) = &t.large else { continue };
            let m = lc.m() as u32;
            for k in 0..m {
                for l in 0..(m - k) {
                    let mut cur = lc.clone();
                    for sign in std::iter::repeat_n(Sign::Plus, k as usize)
                        .chain(std::iter::repeat_n(Sign::Minus, l as usize))
                    {
                        cur = match llc_stabilize(&cur, sign)? {
                            Stabilized::Large(x) => *x,
                            Stabilized::Divide(_) => unreachable!("k + l < m"),
                        };
                    }
                    states.push((idx, k, l, cur.canonical_key()));
                }
            }
        }
        let mut out = Vec::new();
        for (x, (ia, ka, la, key_a)) in states.iter().enumerate() {
            for (ib, kb, lb, key_b) in &states[x + 1..] {
                if ia == ib || key_a != key_b {
                    continue;
                }
                let (a, b) = (&self.tori[*ia], &self.tori[*ib]);
                if !self.ta.base_atlas.isotopic(&a.cable.core, &b.cable.core)? {
                    continue;
                }
                if (ka, la, kb, lb) == (&0, &0, &0, &0) {
                    return Err(NegCableError::StandardCablesMerge(
                        a.cable.id.clone(),
                        b.cable.id.clone(),
                    ));
                }
                let source = format!("equal block data for {} and {}", a.cable.id, b.cable.id);
                let rule = MergeRule {
                    a: a.cable.id.clone(),
                    ka: *ka,
                    la: *la,
                    b: b.cable.id.clone(),
                    kb: *kb,
                    lb: *lb,
                };
                let expected = a.cable.invariants.stabilized(*ka, *la);
                self.check_rule(&source, &rule, a, b, (expected, expected))?;
                out.push(RuleProvenance { rule, source });
            }
        }
        Ok(out)
    }

    fn all_rules(&self) -> Result<Vec<RuleProvenance>, NegCableError> {
        let mut rules = Vec::new();
        for (x, c) in self.ta.commensurating.iter().enumerate() {
            rules.push(self.commensuration_rule(c, x)?);
        }
        for (x, c) in self.ta.super_commensurating.iter().enumerate() {
            rules.push(self.super_commensuration_rule(c, x)?);
        }
        if self.cutoff.is_none() {
            rules.extend(self.divide_rules()?);
            rules.extend(self.block_rules()?);
        }
        Ok(rules)
    }
}

/// Standard cables in declaration order.
pub fn standard_cables(ta: &ToriAtlas) -> Result<Vec<StandardCable>, NegCableError> {
    Ok(Setup::new(ta)?.tori.into_iter().map(|t| t.cable).collect())
}

/// Rules from commensurating and super-commensurating tori.
pub fn commensuration_merges(ta: &ToriAtlas) -> Result<Vec<MergeRule>, NegCableError> {
    let setup = Setup::new(ta)?;
    let mut rules = Vec::new();
    for (x, c) in ta.commensurating.iter().enumerate() {
        rules.push(setup.commensuration_rule(c, x)?.rule);
    }
    for (x, c) in ta.super_commensurating.iter().enumerate() {
        rules.push(setup.super_commensuration_rule(c, x)?.rule);
    }
    Ok(rules)
}

pub fn classify(ta: &ToriAtlas) -> Result<Classification, NegCableError> {
    let setup = Setup::new(ta)?;
    let rules = setup.all_rules()?;
    let mut cables: Vec<StandardCable> = setup.tori.iter().map(|t| t.cable.clone()).collect();
    cables.sort_by_key(|c| (c.i, c.j));
    let generators: Vec<Generator> = cables
        .iter()
        .map(|c| Generator::new(c.id.clone(), c.invariants.tb, c.invariants.rot))
        .collect();
    let max_tb = generators
        .iter()
        .map(|g| g.tb)
        .max()
        .unwrap_or(setup.params.pq());
    let atlas = LegendrianAtlas::new(
        format!(
            "{}_({},{})",
            ta.base_atlas.name(),
            setup.params.p(),
            setup.params.q()
        ),
        max_tb,
        None,
        generators,
        rules.iter().map(|r| r.rule.clone()).collect(),
    )?;
    for (x, a) in cables.iter().enumerate() {
        for b in &cables[x + 1..] {
            let (ca, cb) = (
                LegendrianClass::generator(&a.id),
                LegendrianClass::generator(&b.id),
            );
            if a.invariants == b.invariants && atlas.isotopic(&ca, &cb)? {
                return Err(NegCableError::StandardCablesMerge(
                    a.id.clone(),
                    b.id.clone(),
                ));
            }
        }
    }
    let destabilizations = setup
        .tori
        .iter()
        .filter(|t| t.cable.kind == CableKind::Divide)
        .map(|t| DestabilizationFact {
            torus: t.decl.id(),
            destabilizes: !t.decl.destabilizes_into.is_empty(),
            into: t.decl.destabilizes_into.iter().map(|d| d.torus).collect(),
        })
        .collect();
    let report = ClassificationReport {
        cable: setup.params,
        mode: ta.mode.clone(),
        path: setup.chain.clone(),
        n: setup.n,
        tail: setup.k,
        cutoff: setup.cutoff,
        standard_cables: cables,
        destabilizations,
        rules,
        standard_cables_distinct: true,
    };
    Ok(Classification { atlas, report })
}
