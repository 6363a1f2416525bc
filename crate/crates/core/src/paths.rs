//! Minimal Farey paths, continued fraction blocks and decorated paths.
//!
//! A *continued fraction block* is a path that some change of lattice
//! basis carries to `0, 1, …, k`. For a path `b, b + c, …, b + kc` with
//! `det(b, c) = ±1` the basis `(c, b)` (or `(c, −b)`) does exactly that, and
//! conversely any image of `0, 1, …, k` under `GL₂(Z)` has constant vector
//! differences. So blocks are detected as maximal runs of equal consecutive
//! differences of the normalized vertex vectors. Inside a block the signs of
//! a decorated path may be permuted freely without changing the contact
//! structure it describes; the canonical representative lists every `−`
//! before every `+`.
//!
//! For solid tori (paths starting at `∞`) the edge incident to `∞` carries
//! no sign and is excluded from block detection.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::farey::{adjacent, mediant, product, FareyError, LatticeVector, Sl2, Slope};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error(transparent)]
    Farey(#[from] FareyError),
    #[error("a path needs at least one vertex")]
    Empty,
    #[error("vertices {index} ({a}) and {next} ({b}) do not share a Farey edge", next = index + 1)]
    NotAdjacent { index: usize, a: Slope, b: Slope },
    #[error("endpoints coincide ({0})")]
    SameEndpoints(Slope),
    #[error("slope {0} is an integer and has no tail")]
    IntegerTarget(Slope),
    #[error("expected {expected} signs, found {found}")]
    SignCount { expected: usize, found: usize },
    #[error("an unsigned edge must be incident to ∞ at the start of the path")]
    UnsignedEdgeNotAtInfinity,
    #[error("balanced block needs m >= 1")]
    DegenerateBlock,
    #[error("block signs are not balanced ({plus} '+' vs {minus} '-')")]
    Unbalanced { plus: usize, minus: usize },
    #[error("block vertex {index} is not a finite slope in the clockwise chain")]
    BlockVertex { index: usize },
    #[error("block step {step} is not Farey-adjacent to the center {center}")]
    BlockStep { center: Slope, step: LatticeVector },
}

/// Sign of a basic slice. `Minus` orders first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn opposite(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// An edge path in the Farey graph. Consecutive vertices are adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct FareyPath {
    vertices: Vec<Slope>,
}

impl FareyPath {
    pub fn new(vertices: Vec<Slope>) -> Result<FareyPath, PathError> {
        if vertices.is_empty() {
            return Err(PathError::Empty);
        }
        for (index, pair) in vertices.windows(2).enumerate() {
            if !adjacent(&pair[0], &pair[1]) {
                return Err(PathError::NotAdjacent {
                    index,
                    a: pair[0].clone(),
                    b: pair[1].clone(),
                });
            }
        }
        Ok(FareyPath { vertices })
    }

    pub fn vertices(&self) -> &[Slope] {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn start(&self) -> &Slope {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Slope {
        self.vertices.last().expect("paths are nonempty")
    }

    /// `a_i ⊖ a_{i−1}` for each edge.
    pub fn steps(&self) -> Vec<LatticeVector> {
        self.vertices
            .windows(2)
            .map(|w| w[1].vector() - w[0].vector())
            .collect()
    }

    /// The prefix `a_0, …, a_i`.
    pub fn prefix(&self, i: usize) -> FareyPath {
        FareyPath {
            vertices: self.vertices[..=i].to_vec(),
        }
    }

    /// The subpath `a_i, …, a_j`.
    pub fn slice(&self, i: usize, j: usize) -> FareyPath {
        FareyPath {
            vertices: self.vertices[i..=j].to_vec(),
        }
    }

    /// Appends a vertex, checking adjacency with the current end.
    pub fn push(&mut self, s: Slope) -> Result<(), PathError> {
        if !adjacent(self.end(), &s) {
            return Err(PathError::NotAdjacent {
                index: self.edge_count(),
                a: self.end().clone(),
                b: s,
            });
        }
        self.vertices.push(s);
        Ok(())
    }
}

impl<'de> Deserialize<'de> for FareyPath {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let vertices = Vec::<Slope>::deserialize(deserializer)?;
        FareyPath::new(vertices).map_err(serde::de::Error::custom)
    }
}

/// Shortest path from `⌊t⌋` clockwise to `t`, by Stern–Brocot descent in
/// `(⌊t⌋, ⌊t⌋ + 1)`: only the left endpoint contributes vertices.
pub fn shortest_path(target: &Slope) -> Result<FareyPath, PathError> {
    let floor = target.floor()?;
    if target.is_integer() {
        return Ok(FareyPath {
            vertices: vec![target.clone()],
        });
    }
    let mut left = Slope::integer(floor.clone());
    let mut right = Slope::integer(floor + BigInt::one());
    let mut vertices = vec![left.clone()];
    loop {
        let mid = mediant(&left, &right)?;
        if &mid == target {
            break;
        }
        if target.try_cmp(&mid)?.is_gt() {
            vertices.push(mid.clone());
            left = mid;
        } else {
            right = mid;
        }
    }
    vertices.push(target.clone());
    Ok(FareyPath { vertices })
}

/// Minimal path from `from` clockwise to `to`. At each vertex the path jumps
/// to the furthest neighbour that does not pass `to`; an edge `v w` cannot be
/// crossed, so every path from `v` to `to` visits that neighbour.
pub fn minimal_path(from: &Slope, to: &Slope) -> Result<FareyPath, PathError> {
    if from == to {
        return Err(PathError::SameEndpoints(from.clone()));
    }
    let mut vertices = vec![from.clone()];
    let mut v = from.clone();
    while &v != to {
        let m = Sl2::to_infinity(&v);
        let image = m.apply(to);
        let next = m.inverse().apply(&Slope::integer(image.floor()?));
        vertices.push(next.clone());
        v = next;
    }
    Ok(FareyPath { vertices })
}

/// A maximal continued fraction block: edges `start .. start + len` all
/// with difference `step`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfBlock {
    pub start: usize,
    pub len: usize,
    pub step: LatticeVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfbDecomposition {
    pub blocks: Vec<CfBlock>,
}

impl CfbDecomposition {
    pub fn lengths(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len).collect()
    }
}

pub fn decompose_cfb(path: &FareyPath) -> CfbDecomposition {
    let mut blocks: Vec<CfBlock> = Vec::new();
    for (i, step) in path.steps().into_iter().enumerate() {
        match blocks.last_mut() {
            Some(b) if b.step == step => b.len += 1,
            _ => blocks.push(CfBlock {
                start: i,
                len: 1,
                step,
            }),
        }
    }
    CfbDecomposition { blocks }
}

/// The final block of the shortest path to a slope and its continuation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tail {
    /// Length of the tail.
    pub k: usize,
    pub step: LatticeVector,
    /// `a_n + i·step` for `i = 1, …`.
    pub continuation: Vec<Slope>,
}

/// Tail of `target` with `count` continuation vertices.
pub fn tail_with(target: &Slope, count: usize) -> Result<Tail, PathError> {
    if target.is_infinite() {
        return Err(FareyError::Infinite.into());
    }
    if target.is_integer() {
        return Err(PathError::IntegerTarget(target.clone()));
    }
    let path = shortest_path(target)?;
    let last = decompose_cfb(&path)
        .blocks
        .pop()
        .expect("non-integer targets have at least one edge");
    let mut continuation = Vec::with_capacity(count);
    let mut v = target.vector();
    for _ in 0..count {
        v = &v + &last.step;
        continuation.push(v.to_slope()?);
    }
    Ok(Tail {
        k: last.len,
        step: last.step,
        continuation,
    })
}

/// Tail of `target` with its `k` continuation vertices `a_{n+1}, …, a_{n+k}`.
pub fn tail(target: &Slope) -> Result<Tail, PathError> {
    let k = tail_with(target, 0)?.k;
    tail_with(target, k)
}

/// A minimal path with a sign on each edge. With `last_unsigned` the path
/// starts at `∞` and the edge incident to `∞` carries no sign (the
/// almost-decorated paths describing solid tori).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DecoratedPath {
    #[serde(rename = "vertices")]
    path: FareyPath,
    signs: Vec<Sign>,
    last_unsigned: bool,
}

impl DecoratedPath {
    pub fn new(
        path: FareyPath,
        signs: Vec<Sign>,
        last_unsigned: bool,
    ) -> Result<DecoratedPath, PathError> {
        let expected = if last_unsigned {
            if path.edge_count() == 0 || !path.start().is_infinite() {
                return Err(PathError::UnsignedEdgeNotAtInfinity);
            }
            path.edge_count() - 1
        } else {
            path.edge_count()
        };
        if signs.len() != expected {
            return Err(PathError::SignCount {
                expected,
                found: signs.len(),
            });
        }
        Ok(DecoratedPath {
            path,
            signs,
            last_unsigned,
        })
    }

    /// Fully decorated path.
    pub fn signed(path: FareyPath, signs: Vec<Sign>) -> Result<DecoratedPath, PathError> {
        DecoratedPath::new(path, signs, false)
    }

    pub fn path(&self) -> &FareyPath {
        &self.path
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn last_unsigned(&self) -> bool {
        self.last_unsigned
    }

    /// The part of the path that carries signs.
    pub fn signed_path(&self) -> FareyPath {
        if self.last_unsigned {
            self.path.slice(1, self.path.edge_count())
        } else {
            self.path.clone()
        }
    }

    /// Appends an edge with the given sign.
    pub fn push(&mut self, s: Slope, sign: Sign) -> Result<(), PathError> {
        self.path.push(s)?;
        self.signs.push(sign);
        Ok(())
    }
}

impl<'de> Deserialize<'de> for DecoratedPath {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            vertices: FareyPath,
            signs: Vec<Sign>,
            #[serde(default)]
            last_unsigned: bool,
        }
        let raw = Raw::deserialize(deserializer)?;
        DecoratedPath::new(raw.vertices, raw.signs, raw.last_unsigned)
            .map_err(serde::de::Error::custom)
    }
}

/// Sorts signs inside every continued fraction block.
pub fn canonical_form(d: &DecoratedPath) -> DecoratedPath {
    let mut signs = d.signs.clone();
    for block in decompose_cfb(&d.signed_path()).blocks {
        signs[block.start..block.start + block.len].sort();
    }
    DecoratedPath {
        path: d.path.clone(),
        signs,
        last_unsigned: d.last_unsigned,
    }
}

/// Every canonical decoration of `path` whose blocks are the given lengths,
/// in lexicographic sign order.
fn canonical_decorations(lengths: &[usize]) -> Vec<Vec<Sign>> {
    let mut out: Vec<Vec<Sign>> = vec![Vec::new()];
    for &len in lengths {
        let mut next = Vec::with_capacity(out.len() * (len + 1));
        for prefix in &out {
            for plus in 0..=len {
                let mut signs = prefix.clone();
                signs.extend(std::iter::repeat_n(Sign::Minus, len - plus));
                signs.extend(std::iter::repeat_n(Sign::Plus, plus));
                next.push(signs);
            }
        }
        out = next;
    }
    out
}

/// Minimally twisting tight structures on `T² × I` with boundary slopes
/// `s0`, `s1`: one canonical decorated path per structure. There are
/// `Π (ℓᵢ + 1)` of them over the block lengths `ℓᵢ`.
pub fn enumerate_thickened(s0: &Slope, s1: &Slope) -> Result<Vec<DecoratedPath>, PathError> {
    let path = minimal_path(s0, s1)?;
    let lengths = decompose_cfb(&path).lengths();
    Ok(canonical_decorations(&lengths)
        .into_iter()
        .map(|signs| DecoratedPath {
            path: path.clone(),
            signs,
            last_unsigned: false,
        })
        .collect())
}

/// Tight structures on the solid torus with boundary slope `s` (meridian
/// `∞`): almost-decorated minimal paths from `∞` to `s`, the edge at `∞`
/// unsigned.
pub fn enumerate_solid_torus(s: &Slope) -> Result<Vec<DecoratedPath>, PathError> {
    if s.is_infinite() {
        return Err(FareyError::Infinite.into());
    }
    let path = minimal_path(&Slope::infinity(), s)?;
    let signed = path.slice(1, path.edge_count());
    let lengths = decompose_cfb(&signed).lengths();
    Ok(canonical_decorations(&lengths)
        .into_iter()
        .map(|signs| DecoratedPath {
            path: path.clone(),
            signs,
            last_unsigned: true,
        })
        .collect())
}

/// A length `2m` continued fraction block with `m` positive and `m`
/// negative slices around `center`. Signs are listed in path order, from
/// the back face `center − m·step` to the front face `center + m·step`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BalancedBlock {
    center: Slope,
    m: usize,
    step: LatticeVector,
    signs: Vec<Sign>,
}

impl BalancedBlock {
    /// `step` defaults to the step of the tail of `center`.
    pub fn new(
        center: Slope,
        m: usize,
        signs: Vec<Sign>,
        step: Option<LatticeVector>,
    ) -> Result<BalancedBlock, PathError> {
        if m == 0 {
            return Err(PathError::DegenerateBlock);
        }
        if signs.len() != 2 * m {
            return Err(PathError::SignCount {
                expected: 2 * m,
                found: signs.len(),
            });
        }
        let plus = signs.iter().filter(|&&s| s == Sign::Plus).count();
        if plus != m {
            return Err(PathError::Unbalanced {
                plus,
                minus: 2 * m - plus,
            });
        }
        let step = match step {
            Some(step) => step,
            None => tail_with(&center, 0)?.step,
        };
        if !center.vector().det(&step).abs().is_one() {
            return Err(PathError::BlockStep { center, step });
        }
        let block = BalancedBlock {
            center,
            m,
            step,
            signs,
        };
        // Every vertex must be a finite slope with the same orientation as
        // the center, so the chain is monotone clockwise.
        for (index, v) in block.raw_vertices().iter().enumerate() {
            if !v.y.is_positive() {
                return Err(PathError::BlockVertex { index });
            }
        }
        Ok(block)
    }

    fn raw_vertices(&self) -> Vec<LatticeVector> {
        let c = self.center.vector();
        (0..=2 * self.m)
            .map(|j| {
                let offset = BigInt::from(j as i64 - self.m as i64);
                &c + &(&offset * &self.step)
            })
            .collect()
    }

    pub fn vertices(&self) -> Vec<Slope> {
        self.raw_vertices()
            .iter()
            .map(|v| v.to_slope().expect("validated on construction"))
            .collect()
    }

    pub fn path(&self) -> FareyPath {
        FareyPath::new(self.vertices()).expect("consecutive block vertices are adjacent")
    }

    pub fn center(&self) -> &Slope {
        &self.center
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn step(&self) -> &LatticeVector {
        &self.step
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn back(&self) -> Slope {
        self.vertices().swap_remove(0)
    }

    pub fn front(&self) -> Slope {
        self.vertices().pop().expect("nonempty")
    }

    /// `product(step, center)`; `±1` for every valid block.
    pub fn step_pairing(&self) -> BigInt {
        product(&self.step, &self.center)
    }
}
