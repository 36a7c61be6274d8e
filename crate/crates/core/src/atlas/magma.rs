//! The transition magma of an atlas: isomorphisms between chart patches with
//! composition totalized by a distinguished star element, and the one-sided
//! ideal check that characterizes absorption.

use std::collections::BTreeSet;
use std::fmt;

use super::{absorb_compose, plain_compose, AbsorbMode, Atlas, TransitionTag};
use crate::index::{Counterexample, LawReport};

/// An arrow of the magma: a transition between chart patches carrying a
/// regularity tag. Every overlapping ordered pair appears in both
/// regularities, so composites always have a home element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MagmaElement {
    pub src: u32,
    pub dst: u32,
    pub tag: TransitionTag,
}

impl fmt::Display for MagmaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}[{}]", self.src, self.dst, self.tag)
    }
}

/// Finite magma with a partial composition table over composable pairs;
/// non-composable pairs compose to the star element (id 0).
pub struct FiniteMagma {
    arrows: Vec<MagmaElement>,
    /// `table[f][g]`: element id of `g . f` when `(f, g)` is composable,
    /// `None` (meaning star) otherwise. Indices are arrow ids.
    table: Vec<Vec<Option<usize>>>,
}

impl FiniteMagma {
    pub fn arrows(&self) -> &[MagmaElement] {
        &self.arrows
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    /// Ids of all B-tagged arrows — the candidate ideal of the absorption
    /// characterization.
    pub fn b_subset(&self) -> BTreeSet<usize> {
        self.arrows
            .iter()
            .enumerate()
            .filter(|(_, a)| a.tag == TransitionTag::BDiffeo)
            .map(|(id, _)| id)
            .collect()
    }

    /// Composable pairs `(f, g)` (meaning `g . f` is defined) with the
    /// composite's id.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.table.iter().enumerate().flat_map(move |(f, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(g, comp)| comp.map(|c| (f, g, c)))
        })
    }
}

fn build_magma<F>(atlas: &Atlas, compose: F) -> FiniteMagma
where
    F: Fn(TransitionTag, TransitionTag) -> TransitionTag,
{
    let pairs = atlas.ordered_overlapping_pairs();
    let mut arrows = Vec::with_capacity(pairs.len() * 2);
    for &(i, j) in &pairs {
        arrows.push(MagmaElement {
            src: i,
            dst: j,
            tag: TransitionTag::BDiffeo,
        });
        arrows.push(MagmaElement {
            src: i,
            dst: j,
            tag: TransitionTag::CkDiffeo,
        });
    }
    arrows.sort();
    arrows.dedup();
    let find = |src: u32, dst: u32, tag: TransitionTag| -> usize {
        arrows
            .binary_search(&MagmaElement { src, dst, tag })
            .expect("composite arrow must exist")
    };
    let mut table = vec![vec![None; arrows.len()]; arrows.len()];
    for (fi, f) in arrows.iter().enumerate() {
        for (gi, g) in arrows.iter().enumerate() {
            // g . f exists when the chain matches and the composite's chart
            // pair still overlaps; otherwise the product is the star element
            if f.dst == g.src && atlas.overlaps(f.src, g.dst) {
                let tag = compose(g.tag, f.tag);
                table[fi][gi] = Some(find(f.src, g.dst, tag));
            }
        }
    }
    FiniteMagma { arrows, table }
}

/// Transition magma of an atlas under the absorption rule for `mode`.
pub fn transition_magma(atlas: &Atlas, mode: AbsorbMode) -> FiniteMagma {
    build_magma(atlas, |g, f| {
        absorb_compose(g, f, mode, true).expect("ordered flag is set")
    })
}

/// Control magma with absorption deleted: composites are B only when both
/// factors are.
pub fn transition_magma_plain(atlas: &Atlas) -> FiniteMagma {
    build_magma(atlas, plain_compose)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdealSide {
    Left,
    Right,
    Both,
}

/// Checks that `subset` is a one-sided (or bilateral) ideal of the magma on
/// composable pairs. The star element is adjoined implicitly: non-composable
/// pairs are exempt, matching the totalization convention.
pub fn check_ideal(magma: &FiniteMagma, subset: &BTreeSet<usize>, side: IdealSide) -> LawReport {
    let mut counterexamples = Vec::new();
    let mut checked = 0usize;
    for (f, g, comp) in magma.composable_pairs() {
        let relevant = match side {
            IdealSide::Left => subset.contains(&f),
            IdealSide::Right => subset.contains(&g),
            IdealSide::Both => subset.contains(&f) || subset.contains(&g),
        };
        if !relevant {
            continue;
        }
        checked += 1;
        if !subset.contains(&comp) {
            counterexamples.push(Counterexample {
                args: vec![
                    magma.arrows[f].to_string(),
                    magma.arrows[g].to_string(),
                ],
                lhs: magma.arrows[comp].to_string(),
                rhs: "subset member".into(),
            });
        }
    }
    LawReport::new(format!("ideal[{side:?}]"), counterexamples, checked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{random_atlas, Atlas};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_overlapping(m: u32, tag: TransitionTag) -> Atlas {
        let mut a = Atlas::new(m).unwrap();
        for i in 0..m {
            for j in (i + 1)..m {
                a.add_overlap(i, j).unwrap();
                a.set_tag(i, j, tag).unwrap();
            }
        }
        a
    }

    #[test]
    fn b_subset_is_left_ideal_under_left_absorption() {
        let a = all_overlapping(4, TransitionTag::CkDiffeo);
        let m = transition_magma(&a, AbsorbMode::Left);
        let report = check_ideal(&m, &m.b_subset(), IdealSide::Left);
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn b_subset_is_right_ideal_under_right_absorption() {
        let a = all_overlapping(4, TransitionTag::CkDiffeo);
        let m = transition_magma(&a, AbsorbMode::Right);
        let report = check_ideal(&m, &m.b_subset(), IdealSide::Right);
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn single_b_edge_is_not_an_ideal() {
        let a = all_overlapping(4, TransitionTag::CkDiffeo);
        let m = transition_magma(&a, AbsorbMode::Left);
        let one = m
            .arrows()
            .iter()
            .position(|e| e.src == 0 && e.dst == 1 && e.tag == TransitionTag::BDiffeo)
            .unwrap();
        let subset: BTreeSet<usize> = [one].into_iter().collect();
        let report = check_ideal(&m, &subset, IdealSide::Left);
        assert!(!report.pass());
    }

    #[test]
    fn whole_magma_is_an_improper_ideal() {
        let a = all_overlapping(3, TransitionTag::CkDiffeo);
        let m = transition_magma(&a, AbsorbMode::Left);
        let all: BTreeSet<usize> = (0..m.arrow_count()).collect();
        assert!(check_ideal(&m, &all, IdealSide::Both).pass());
    }

    #[test]
    fn no_absorption_control_always_fails() {
        // every atlas has a B identity arrow composable with a Ck automorphism
        // of the same patch, so deleting absorption always breaks ideal-ness
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let a = random_atlas(&mut rng, 6);
            let control = transition_magma_plain(&a);
            let report = check_ideal(&control, &control.b_subset(), IdealSide::Left);
            assert!(!report.pass(), "control unexpectedly passed");
            assert!(!report.counterexamples.is_empty());
        }
    }
}
