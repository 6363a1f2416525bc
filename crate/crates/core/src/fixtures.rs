//! Bundled atlases and tori documents.
//!
//! Twist-knot atlases encode the published Legendrian classification of the
//! twist knots `K_m` as generators and merge rules. For `m <= -4` even the
//! classification fixes only how many classes survive each kind of
//! stabilization, not which peaks merge first; the atlas groups peak `i`
//! with peak `min(i, c)` where `c = ⌈−m/4⌉`.

use thiserror::Error;

use crate::atlas::{Generator, LegendrianAtlas, LegendrianClass, MergeRule};
use crate::negcable::ToriAtlas;

pub const UNKNOT_JSON: &str = include_str!("../fixtures/unknot.json");
pub const TWIST_M5_JSON: &str = include_str!("../fixtures/twist_m-5.json");
pub const TREFOIL_TORI_JSON: &str = include_str!("../fixtures/trefoil_tori.json");
pub const LARGE_CABLE_TORI_JSON: &str = include_str!("../fixtures/large_cable_tori.json");
pub const IN_BETWEEN_TORI_JSON: &str = include_str!("../fixtures/in_between_tori.json");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("twist knots need m != -1, got {0}")]
pub struct TwistError(pub i64);

pub fn unknot() -> LegendrianAtlas {
    LegendrianAtlas::from_json(UNKNOT_JSON).expect("bundled fixture")
}

pub fn trefoil_tori() -> ToriAtlas {
    ToriAtlas::from_json(TREFOIL_TORI_JSON).expect("bundled fixture")
}

pub fn large_cable_tori() -> ToriAtlas {
    ToriAtlas::from_json(LARGE_CABLE_TORI_JSON).expect("bundled fixture")
}

pub fn in_between_tori() -> ToriAtlas {
    ToriAtlas::from_json(IN_BETWEEN_TORI_JSON).expect("bundled fixture")
}

fn rule(a: &str, ka: u32, la: u32, b: &str, kb: u32, lb: u32) -> MergeRule {
    MergeRule::new(
        &LegendrianClass::new(a, ka, la),
        &LegendrianClass::new(b, kb, lb),
    )
}

fn peaks(count: i64, tb: i64) -> Vec<Generator> {
    (1..=count)
        .map(|i| Generator::new(format!("L{i}"), tb, 0))
        .collect()
}

/// The twist knot with `m` half twists. `ceil_width` is the slope above
/// which positive cables are classified.
pub fn twist_knot(m: i64) -> Result<LegendrianAtlas, TwistError> {
    let name = format!("twist_{m}");
    let atlas = if m == -1 {
        return Err(TwistError(m));
    } else if m >= -2 && m % 2 == 0 {
        LegendrianAtlas::new(
            name,
            -m - 1,
            Some(-m),
            vec![Generator::new("L", -m - 1, 0)],
            vec![],
        )
    } else if m >= 1 {
        let tb = -m - 5;
        LegendrianAtlas::new(
            name,
            tb,
            Some(-m - 4),
            vec![Generator::new("L+", tb, 1), Generator::new("L-", tb, -1)],
            vec![rule("L+", 0, 1, "L-", 1, 0)],
        )
    } else if m % 2 != 0 {
        let count = -(m + 1) / 2;
        let merges = (2..=count)
            .flat_map(|i| {
                let id = format!("L{i}");
                [rule(&id, 1, 0, "L1", 1, 0), rule(&id, 0, 1, "L1", 0, 1)]
            })
            .collect();
        LegendrianAtlas::new(name, -3, Some(-2), peaks(count, -3), merges)
    } else {
        let count = (m * m + 7) / 8;
        let groups = (-m + 3) / 4;
        let rep = format!("L{groups}");
        let mut merges = Vec::new();
        for i in groups + 1..=count {
            let id = format!("L{i}");
            merges.push(rule(&id, 1, 0, &rep, 1, 0));
            merges.push(rule(&id, 0, 1, &rep, 0, 1));
        }
        for i in 2..=count {
            merges.push(rule(&format!("L{i}"), 1, 1, "L1", 1, 1));
        }
        LegendrianAtlas::new(name, 1, Some(2), peaks(count, 1), merges)
    };
    Ok(atlas.expect("twist atlases are consistent"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::ClassicalInvariants;

    #[test]
    fn bundled_files_load() {
        assert_eq!(unknot().generators().len(), 1);
        assert_eq!(trefoil_tori().tori.len(), 2);
        assert_eq!(large_cable_tori().tori.len(), 3);
        assert_eq!(in_between_tori().tori.len(), 2);
    }

    #[test]
    fn twist_file_matches_builder() {
        let file = LegendrianAtlas::from_json(TWIST_M5_JSON).unwrap();
        assert_eq!(file, twist_knot(-5).unwrap());
    }

    #[test]
    fn twist_peak_counts() {
        assert_eq!(twist_knot(-1), Err(TwistError(-1)));
        let count = |m| twist_knot(m).unwrap().generators().len();
        assert_eq!(count(0), 1);
        assert_eq!(count(3), 2);
        assert_eq!(count(-3), 1);
        assert_eq!(count(-7), 3);
        assert_eq!(count(-6), 5);
        assert_eq!(count(-8), 8);
    }

    #[test]
    fn twist_even_negative_groups() {
        // m = -8: eight peaks, two classes after stabilizing only one way,
        // one class after both.
        let a = twist_knot(-8).unwrap();
        let at = |tb, rot| a.classes_at(ClassicalInvariants::new(tb, rot)).len();
        assert_eq!(at(1, 0), 8);
        assert_eq!(at(0, 1), 2);
        assert_eq!(at(0, -1), 2);
        assert_eq!(at(-1, 0), 1);
        assert_eq!(at(-1, 2), 2);
    }
}
