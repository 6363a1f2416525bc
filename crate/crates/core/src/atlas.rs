//! Finite presentations of Legendrian classifications.
//!
//! An atlas lists generators `(id, tb, rot)` and merge rules
//! `S₊^ka S₋^la(a) = S₊^kb S₋^lb(b)`. Every Legendrian class is a stabilized
//! generator `S₊^k S₋^l(g)`, and isotopy is the equivalence relation generated
//! by the rules together with stabilization: once two classes agree, so do
//! all their further stabilizations.
//!
//! A lattice point `(rot, tb)` meets the cone of a generator in at most one
//! class, since `k + l` and `k − l` are fixed by the point. Every rule
//! application stays at the same lattice point, so the closure restricted to
//! a point is the union-find of the generators present there, joined by the
//! rules whose thresholds `(ka, la)` the point's `(k, l)` for `a` dominates.
//! This decides isotopy exactly at any depth without saturating.
//!
//! In the coordinates `s = tb − rot` and `s' = tb + rot` a generator's
//! positive stabilization count at a point depends only on `s` and its
//! negative count only on `s'`; rule thresholds become half-planes. The
//! union-find structure is therefore constant once `s` and `s'` pass below
//! every threshold, which makes the simplicity predicates finite checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariants::{self_linking, ClassicalInvariants};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("generator id {0:?} appears more than once")]
    DuplicateId(String),
    #[error("generator {id:?} has tb {tb} above max_tb {max_tb}")]
    TbAboveMax { id: String, tb: i64, max_tb: i64 },
    #[error("generator {id:?} has tb + rot = {tb} + {rot} even; knots in S³ need it odd")]
    Parity { id: String, tb: i64, rot: i64 },
    #[error("unknown generator {id:?} ({context})")]
    UnknownGenerator { id: String, context: String },
    #[error(
        "merge rule {index}: left side has (tb, rot) = ({}, {}) but right side has ({}, {})",
        left.tb, left.rot, right.tb, right.rot
    )]
    RuleMismatch {
        index: usize,
        left: ClassicalInvariants,
        right: ClassicalInvariants,
    },
    #[error("ceil_width {ceil_width} is below max_tb {max_tb}")]
    WidthBelowMax { ceil_width: i64, max_tb: i64 },
    #[error("tb floor {floor} is above max_tb {max_tb}")]
    FloorAboveMax { floor: i64, max_tb: i64 },
    #[error("invalid atlas JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub tb: i64,
    pub rot: i64,
}

impl Generator {
    pub fn new(id: impl Into<String>, tb: i64, rot: i64) -> Self {
        Generator {
            id: id.into(),
            tb,
            rot,
        }
    }

    pub fn invariants(&self) -> ClassicalInvariants {
        ClassicalInvariants::new(self.tb, self.rot)
    }
}

/// `S₊^ka S₋^la(a) = S₊^kb S₋^lb(b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MergeRule {
    pub a: String,
    pub ka: u32,
    pub la: u32,
    pub b: String,
    pub kb: u32,
    pub lb: u32,
}

impl MergeRule {
    pub fn new(a: &LegendrianClass, b: &LegendrianClass) -> Self {
        MergeRule {
            a: a.gen.clone(),
            ka: a.kplus,
            la: a.kminus,
            b: b.gen.clone(),
            kb: b.kplus,
            lb: b.kminus,
        }
    }

    pub fn left(&self) -> LegendrianClass {
        LegendrianClass::new(self.a.clone(), self.ka, self.la)
    }

    pub fn right(&self) -> LegendrianClass {
        LegendrianClass::new(self.b.clone(), self.kb, self.lb)
    }
}

/// `S₊^kplus S₋^kminus(gen)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LegendrianClass {
    pub gen: String,
    #[serde(default)]
    pub kplus: u32,
    #[serde(default)]
    pub kminus: u32,
}

impl LegendrianClass {
    pub fn new(gen: impl Into<String>, kplus: u32, kminus: u32) -> Self {
        LegendrianClass {
            gen: gen.into(),
            kplus,
            kminus,
        }
    }

    pub fn generator(gen: impl Into<String>) -> Self {
        LegendrianClass::new(gen, 0, 0)
    }

    pub fn stabilized(&self, kplus: u32, kminus: u32) -> Self {
        LegendrianClass::new(self.gen.clone(), self.kplus + kplus, self.kminus + kminus)
    }
}

impl fmt::Display for LegendrianClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kplus, self.kminus) {
            (0, 0) => write!(f, "{}", self.gen),
            (k, l) => write!(f, "{}[+{k}-{l}]", self.gen),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RawAtlas {
    name: String,
    max_tb: i64,
    #[serde(default)]
    ceil_width: Option<i64>,
    #[serde(default)]
    generators: Vec<Generator>,
    #[serde(default)]
    merges: Vec<MergeRule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAtlas", into = "RawAtlas")]
pub struct LegendrianAtlas {
    name: String,
    max_tb: i64,
    ceil_width: Option<i64>,
    generators: Vec<Generator>,
    merges: Vec<MergeRule>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl TryFrom<RawAtlas> for LegendrianAtlas {
    type Error = AtlasError;
    fn try_from(raw: RawAtlas) -> Result<Self, AtlasError> {
        LegendrianAtlas::new(
            raw.name,
            raw.max_tb,
            raw.ceil_width,
            raw.generators,
            raw.merges,
        )
    }
}

impl From<LegendrianAtlas> for RawAtlas {
    fn from(a: LegendrianAtlas) -> RawAtlas {
        RawAtlas {
            name: a.name,
            max_tb: a.max_tb,
            ceil_width: a.ceil_width,
            generators: a.generators,
            merges: a.merges,
        }
    }
}

/// Classes at one lattice point of a mountain range, grouped by isotopy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MountainPoint {
    pub rot: i64,
    pub tb: i64,
    pub classes: Vec<Vec<LegendrianClass>>,
}

impl MountainPoint {
    pub fn count(&self) -> usize {
        self.classes.len()
    }

    pub fn invariants(&self) -> ClassicalInvariants {
        ClassicalInvariants::new(self.tb, self.rot)
    }
}

/// Populated lattice points with `tb >= floor`, ordered by decreasing `tb`
/// then increasing `rot`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MountainRange {
    pub floor: i64,
    pub points: Vec<MountainPoint>,
}

impl MountainRange {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, rot: i64, tb: i64) -> Option<&MountainPoint> {
        self.points.iter().find(|p| p.rot == rot && p.tb == tb)
    }

    pub fn count_at(&self, rot: i64, tb: i64) -> usize {
        self.point(rot, tb).map_or(0, MountainPoint::count)
    }
}

/// A Legendrian approximation `S₊^kplus(gen)` of a transverse knot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TransverseRep {
    pub gen: String,
    pub kplus: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransverseClass {
    pub sl: i64,
    pub members: Vec<TransverseRep>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }

    /// Groups of the given members, each sorted, ordered by least element.
    fn groups(&mut self, members: &[usize]) -> Vec<Vec<usize>> {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &m in members {
            let r = self.find(m);
            by_root.entry(r).or_default().push(m);
        }
        let mut out: Vec<Vec<usize>> = by_root.into_values().collect();
        for g in &mut out {
            g.sort_unstable();
        }
        out.sort();
        out
    }
}

/// `(generator index, k, l)` of a class at a point.
type Present = (usize, u32, u32);

impl LegendrianAtlas {
    pub fn new(
        name: impl Into<String>,
        max_tb: i64,
        ceil_width: Option<i64>,
        generators: Vec<Generator>,
        merges: Vec<MergeRule>,
    ) -> Result<LegendrianAtlas, AtlasError> {
        if let Some(w) = ceil_width.filter(|&w| w < max_tb) {
            return Err(AtlasError::WidthBelowMax {
                ceil_width: w,
                max_tb,
            });
        }
        let mut index = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            if index.insert(g.id.clone(), i).is_some() {
                return Err(AtlasError::DuplicateId(g.id.clone()));
            }
            if g.tb > max_tb {
                return Err(AtlasError::TbAboveMax {
                    id: g.id.clone(),
                    tb: g.tb,
                    max_tb,
                });
            }
            if !g.invariants().has_sphere_parity() {
                return Err(AtlasError::Parity {
                    id: g.id.clone(),
                    tb: g.tb,
                    rot: g.rot,
                });
            }
        }
        let atlas = LegendrianAtlas {
            name: name.into(),
            max_tb,
            ceil_width,
            generators,
            merges,
            index,
        };
        for (i, rule) in atlas.merges.iter().enumerate() {
            let context = format!("merge rule {i}");
            let left = atlas.invariants_in(&rule.left(), &context)?;
            let right = atlas.invariants_in(&rule.right(), &context)?;
            if left != right {
                return Err(AtlasError::RuleMismatch {
                    index: i,
                    left,
                    right,
                });
            }
        }
        Ok(atlas)
    }

    pub fn from_json(text: &str) -> Result<LegendrianAtlas, AtlasError> {
        let raw: RawAtlas =
            serde_json::from_str(text).map_err(|e| AtlasError::Json(e.to_string()))?;
        LegendrianAtlas::try_from(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("atlas serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_tb(&self) -> i64 {
        self.max_tb
    }

    pub fn ceil_width(&self) -> Option<i64> {
        self.ceil_width
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn merges(&self) -> &[MergeRule] {
        &self.merges
    }

    pub fn generator(&self, id: &str) -> Option<&Generator> {
        self.index.get(id).map(|&i| &self.generators[i])
    }

    fn lookup(&self, id: &str, context: &str) -> Result<usize, AtlasError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| AtlasError::UnknownGenerator {
                id: id.to_string(),
                context: context.to_string(),
            })
    }

    fn invariants_in(
        &self,
        c: &LegendrianClass,
        context: &str,
    ) -> Result<ClassicalInvariants, AtlasError> {
        let g = &self.generators[self.lookup(&c.gen, context)?];
        Ok(g.invariants().stabilized(c.kplus, c.kminus))
    }

    pub fn invariants(&self, c: &LegendrianClass) -> Result<ClassicalInvariants, AtlasError> {
        self.invariants_in(c, "class lookup")
    }

    /// The class of generator `g` sitting at `point`, if any.
    fn class_at(&self, g: usize, point: ClassicalInvariants) -> Option<(u32, u32)> {
        let gen = &self.generators[g];
        let depth = gen.tb - point.tb;
        let shift = point.rot - gen.rot;
        if depth < 0 || (depth + shift) % 2 != 0 {
            return None;
        }
        let (k, l) = ((depth + shift) / 2, (depth - shift) / 2);
        if k < 0 || l < 0 {
            return None;
        }
        Some((u32::try_from(k).ok()?, u32::try_from(l).ok()?))
    }

    /// Isotopy groups of the classes at a lattice point, as generator indices.
    fn groups_at(&self, point: ClassicalInvariants) -> (Vec<Present>, Vec<Vec<usize>>) {
        let present: Vec<Present> = (0..self.generators.len())
            .filter_map(|g| self.class_at(g, point).map(|(k, l)| (g, k, l)))
            .collect();
        let mut uf = UnionFind::new(self.generators.len());
        for rule in &self.merges {
            let a = self.index[&rule.a];
            let b = self.index[&rule.b];
            if let Some((k, l)) = self.class_at(a, point) {
                if k >= rule.ka && l >= rule.la {
                    uf.union(a, b);
                }
            }
        }
        let members: Vec<usize> = present.iter().map(|&(g, _, _)| g).collect();
        let groups = uf.groups(&members);
        (present, groups)
    }

    /// Isotopy classes at a lattice point, each listed by its members.
    pub fn classes_at(&self, point: ClassicalInvariants) -> Vec<Vec<LegendrianClass>> {
        let (present, groups) = self.groups_at(point);
        let lookup: HashMap<usize, (u32, u32)> =
            present.into_iter().map(|(g, k, l)| (g, (k, l))).collect();
        groups
            .into_iter()
            .map(|group| {
                group
                    .into_iter()
                    .map(|g| {
                        let (k, l) = lookup[&g];
                        LegendrianClass::new(self.generators[g].id.clone(), k, l)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn isotopic(&self, c1: &LegendrianClass, c2: &LegendrianClass) -> Result<bool, AtlasError> {
        let i1 = self.invariants_in(c1, "isotopy query")?;
        let i2 = self.invariants_in(c2, "isotopy query")?;
        if i1 != i2 {
            return Ok(false);
        }
        let (g1, g2) = (self.index[&c1.gen], self.index[&c2.gen]);
        let (_, groups) = self.groups_at(i1);
        Ok(groups.iter().any(|g| g.contains(&g1) && g.contains(&g2)))
    }

    pub fn mountain_range(&self, tb_floor: i64) -> Result<MountainRange, AtlasError> {
        if tb_floor > self.max_tb {
            return Err(AtlasError::FloorAboveMax {
                floor: tb_floor,
                max_tb: self.max_tb,
            });
        }
        let mut points: BTreeSet<(i64, i64)> = BTreeSet::new();
        for g in &self.generators {
            for depth in 0..=(g.tb - tb_floor).max(-1) {
                for k in 0..=depth {
                    points.insert((-(g.tb - depth), g.rot + k - (depth - k)));
                }
            }
        }
        let points = points
            .into_iter()
            .map(|(neg_tb, rot)| {
                let tb = -neg_tb;
                MountainPoint {
                    rot,
                    tb,
                    classes: self.classes_at(ClassicalInvariants::new(tb, rot)),
                }
            })
            .collect();
        Ok(MountainRange {
            floor: tb_floor,
            points,
        })
    }

    fn transverse_groups(&self, sl: i64) -> (Vec<(usize, u32)>, Vec<Vec<usize>>) {
        let present: Vec<(usize, u32)> = self
            .generators
            .iter()
            .enumerate()
            .filter_map(|(i, g)| {
                let d = self_linking(g.invariants()) - sl;
                (d >= 0 && d % 2 == 0).then_some((i, (d / 2) as u32))
            })
            .collect();
        let mut uf = UnionFind::new(self.generators.len());
        for rule in &self.merges {
            let a = self.index[&rule.a];
            let b = self.index[&rule.b];
            if let Some(&(_, k)) = present.iter().find(|&&(g, _)| g == a) {
                // Negative stabilizations are free, so only the positive
                // threshold matters.
                if k >= rule.ka {
                    uf.union(a, b);
                }
            }
        }
        let members: Vec<usize> = present.iter().map(|&(g, _)| g).collect();
        let groups = uf.groups(&members);
        (present, groups)
    }

    /// Transverse classes with `sl >= sl_floor`: Legendrian classes up to
    /// negative stabilization, ordered by decreasing `sl`.
    pub fn transverse_classes(&self, sl_floor: i64) -> Vec<TransverseClass> {
        let mut values: BTreeSet<i64> = BTreeSet::new();
        for g in &self.generators {
            let top = self_linking(g.invariants());
            let mut s = top;
            while s >= sl_floor {
                values.insert(s);
                s -= 2;
            }
        }
        let mut out = Vec::new();
        for &sl in values.iter().rev() {
            let (present, groups) = self.transverse_groups(sl);
            let lookup: HashMap<usize, u32> = present.into_iter().collect();
            for group in groups {
                out.push(TransverseClass {
                    sl,
                    members: group
                        .into_iter()
                        .map(|g| TransverseRep {
                            gen: self.generators[g].id.clone(),
                            kplus: lookup[&g],
                        })
                        .collect(),
                });
            }
        }
        out
    }

    /// Values of `f` at every generator and rule threshold; past the least
    /// of them nothing changes.
    fn window(
        &self,
        f: impl Fn(ClassicalInvariants) -> i64,
        threshold: impl Fn(&MergeRule) -> u32,
    ) -> BTreeSet<i64> {
        let tops: Vec<i64> = self.generators.iter().map(|g| f(g.invariants())).collect();
        let mut lowest = tops.iter().copied().min().unwrap_or(0);
        for rule in &self.merges {
            let a = &self.generators[self.index[&rule.a]];
            lowest = lowest.min(f(a.invariants()) - 2 * i64::from(threshold(rule)));
        }
        let mut values = BTreeSet::new();
        for top in tops {
            let mut v = top;
            while v >= lowest - 2 {
                values.insert(v);
                v -= 2;
            }
        }
        values
    }

    /// Whether every lattice point carries at most one isotopy class.
    pub fn is_legendrian_simple(&self) -> bool {
        let s_values = self.window(|c| c.tb - c.rot, |r| r.ka);
        let s2_values = self.window(|c| c.tb + c.rot, |r| r.la);
        for &s in &s_values {
            for &s2 in &s2_values {
                if (s + s2) % 2 != 0 {
                    continue;
                }
                let point = ClassicalInvariants::new((s + s2) / 2, (s2 - s) / 2);
                if self.groups_at(point).1.len() > 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Whether every self-linking number carries at most one transverse class.
    pub fn is_transversely_simple(&self) -> bool {
        self.window(|c| c.tb - c.rot, |r| r.ka)
            .into_iter()
            .all(|sl| self.transverse_groups(sl).1.len() <= 1)
    }
}
