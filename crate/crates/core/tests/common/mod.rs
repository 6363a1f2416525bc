//! Brute-force oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use cabling::atlas::{Generator, LegendrianAtlas, LegendrianClass, MergeRule};
use cabling::farey::Slope;
use num_integer::Integer;
use rand::rngs::StdRng;
use rand::Rng;

pub fn s(text: &str) -> Slope {
    text.parse().unwrap()
}

/// Reduced `(num, den)` with `den > 0`.
pub fn frac(num: i64, den: i64) -> (i64, i64) {
    let g = num.gcd(&den);
    let (n, d) = (num / g, den / g);
    if d < 0 {
        (-n, -d)
    } else {
        (n, d)
    }
}

pub fn slope(f: (i64, i64)) -> Slope {
    Slope::new(f.0, f.1).unwrap()
}

fn le(a: (i64, i64), b: (i64, i64)) -> bool {
    a.0 * b.1 <= b.0 * a.1
}

fn adjacent(a: (i64, i64), b: (i64, i64)) -> bool {
    (a.0 * b.1 - a.1 * b.0).abs() == 1
}

/// Breadth-first shortest path from `from` to `to` in the Farey graph
/// restricted to `[from, to]`, using every fraction whose denominator is at
/// most `max(den(from), den(to))`.
pub fn bfs_path(from: (i64, i64), to: (i64, i64)) -> Vec<(i64, i64)> {
    let max_den = from.1.max(to.1);
    let mut nodes = Vec::new();
    for d in 1..=max_den {
        let lo = (from.0 * d).div_euclid(from.1);
        let hi = -(-to.0 * d).div_euclid(to.1);
        for n in lo..=hi {
            let f = (n, d);
            if n.gcd(&d) == 1 && le(from, f) && le(f, to) {
                nodes.push(f);
            }
        }
    }
    let mut parent: HashMap<(i64, i64), (i64, i64)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    parent.insert(from, from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in &nodes {
            if !parent.contains_key(&w) && adjacent(v, w) {
                parent.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[&cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Orbits of all `2^n` sign vectors on a minimal path under swapping two
/// consecutive signs whose edges lie in one continued fraction block. Two
/// consecutive edges `a b`, `b c` are in one block exactly when
/// `|det(a, c)| = 2`.
pub fn shuffle_orbit_count(vertices: &[(i64, i64)]) -> usize {
    let n = vertices.len() - 1;
    let swappable: Vec<bool> = (0..n.saturating_sub(1))
        .map(|i| {
            let (a, c) = (vertices[i], vertices[i + 2]);
            (a.0 * c.1 - a.1 * c.0).abs() == 2
        })
        .collect();
    let total = 1usize << n;
    let mut root: Vec<usize> = (0..total).collect();
    fn find(root: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    for v in 0..total {
        for (i, &ok) in swappable.iter().enumerate() {
            if ok {
                let differ = ((v >> i) ^ (v >> (i + 1))) & 1;
                let w = v ^ (differ * (0b11 << i));
                let (a, b) = (find(&mut root, v), find(&mut root, w));
                root[a] = b;
            }
        }
    }
    (0..total).filter(|&v| find(&mut root, v) == v).count()
}

/// A random consistent atlas: generators with sphere parity and merge rules
/// joining pairs at a common point below both.
pub fn random_atlas(rng: &mut StdRng, name: &str) -> LegendrianAtlas {
    let count = rng.random_range(1..=4);
    let max_tb = rng.random_range(-6..=2);
    let mut gens = Vec::new();
    for i in 0..count {
        let tb: i64 = max_tb - rng.random_range(0..=2i64);
        let mut rot: i64 = rng.random_range(-3..=3);
        if (tb + rot).rem_euclid(2) == 0 {
            rot += 1;
        }
        gens.push(Generator::new(format!("g{i}"), tb, rot));
    }
    if gens.iter().all(|g| g.tb < max_tb) {
        gens[0].tb = max_tb;
        if (gens[0].tb + gens[0].rot).rem_euclid(2) == 0 {
            gens[0].rot += 1;
        }
    }
    let mut merges = Vec::new();
    for _ in 0..rng.random_range(0..=count) {
        let a = &gens[rng.random_range(0..gens.len())];
        let b = &gens[rng.random_range(0..gens.len())];
        if a.id == b.id {
            continue;
        }
        let r = rng.random_range(-4..=4);
        let mut t = (a.tb - (r - a.rot).abs()).min(b.tb - (r - b.rot).abs());
        t -= rng.random_range(0..=2);
        if (t + r).rem_euclid(2) == 0 {
            t -= 1;
        }
        let class = |g: &Generator| {
            let depth = g.tb - t;
            let shift = r - g.rot;
            LegendrianClass::new(
                g.id.clone(),
                ((depth + shift) / 2) as u32,
                ((depth - shift) / 2) as u32,
            )
        };
        merges.push(MergeRule::new(&class(a), &class(b)));
    }
    let ceil_width = if rng.random_bool(0.5) {
        Some(rng.random_range(max_tb..=max_tb + 3))
    } else {
        None
    };
    LegendrianAtlas::new(name, max_tb, ceil_width, gens, merges).unwrap()
}
