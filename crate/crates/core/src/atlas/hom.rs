//! Tag-level adjunction check: morphisms between a plain atlas (whose
//! retraction supplies B-corrected charts) and a B-structured atlas must
//! acquire B local tags under the absorption rule, and the two
//! identity-on-underlying-map assignments between the morphism sets must be
//! mutually inverse.

use std::collections::BTreeMap;

use rand::Rng;

use super::{absorb_compose, AbsorbMode, Atlas, AtlasError, TransitionTag};
use crate::index::{Counterexample, LawReport};

/// A formal map between the manifolds carried by two atlases. `local_tags`
/// records, for each (plain-atlas chart, structured-atlas chart) pair, the
/// regularity of the local expression of the map in those charts. Missing
/// pairs read as plain `Ck`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalMap {
    pub name: String,
    pub iso: bool,
    pub local_tags: BTreeMap<(u32, u32), TransitionTag>,
}

impl FormalMap {
    pub fn local_tag(&self, plain_chart: u32, structured_chart: u32) -> TransitionTag {
        self.local_tags
            .get(&(plain_chart, structured_chart))
            .copied()
            .unwrap_or(TransitionTag::CkDiffeo)
    }
}

/// Checks the hom bijection at tag level.
///
/// For left-type modes the plain atlas is the retracted source and each local
/// expression factors as `(local) . retract(..)^{-1}`; for right-type modes
/// the retracted atlas is the target and the factorization is
/// `retract(..) . (local)`. Every relocalized tag must come out `B`, and the
/// two identity assignments between the admitted morphism sets must invert
/// each other. Core modes admit only isomorphisms; full modes admit every
/// formal map.
pub fn hom_bijection_check(
    source: &Atlas,
    target: &Atlas,
    morphisms: &[FormalMap],
    mode: AbsorbMode,
) -> Result<LawReport, AtlasError> {
    let scope: Vec<&FormalMap> = morphisms
        .iter()
        .filter(|m| mode.is_full() || m.iso)
        .collect();
    let b = TransitionTag::BDiffeo;
    let mut counterexamples = Vec::new();
    let mut checked = 0usize;
    let mut b_side = Vec::new();

    let retract_pairs = source.ordered_overlapping_pairs();
    for map in &scope {
        let mut all_b = true;
        for &(i, _j) in &retract_pairs {
            for c in 0..target.chart_count() {
                let local = map.local_tag(i, c);
                let relocated = if mode.absorbs_left() {
                    absorb_compose(local, b, mode, true)?
                } else {
                    absorb_compose(b, local, mode, true)?
                };
                checked += 1;
                if relocated != TransitionTag::BDiffeo {
                    all_b = false;
                    counterexamples.push(Counterexample {
                        args: vec![map.name.clone(), format!("chart ({i}, {c})")],
                        lhs: relocated.to_string(),
                        rhs: "B".into(),
                    });
                }
            }
        }
        if all_b {
            b_side.push(map.name.clone());
        }
    }

    // the two assignments are both the identity on the underlying map, so
    // they are mutually inverse exactly when the admitted sets coincide
    let ck_side: Vec<String> = scope.iter().map(|m| m.name.clone()).collect();
    for name in &ck_side {
        checked += 1;
        if !b_side.contains(name) {
            counterexamples.push(Counterexample {
                args: vec![name.clone()],
                lhs: "missing from structured side".into(),
                rhs: "bijection".into(),
            });
        }
    }
    for name in &b_side {
        checked += 1;
        if !ck_side.contains(name) {
            counterexamples.push(Counterexample {
                args: vec![name.clone()],
                lhs: "missing from plain side".into(),
                rhs: "bijection".into(),
            });
        }
    }

    Ok(LawReport::new(
        format!("hom-bijection[{mode}]"),
        counterexamples,
        checked,
    ))
}

/// Seeded random instance for the adjunction suite: a plain atlas, an all-B
/// structured atlas, and up to `max_maps` formal maps with random local tags
/// and iso flags.
pub fn random_hom_instance<R: Rng>(
    rng: &mut R,
    max_charts: u32,
    max_maps: usize,
) -> (Atlas, Atlas, Vec<FormalMap>) {
    let source = super::random_atlas(rng, max_charts);
    let target = super::random_atlas_all_b(rng, max_charts);
    let count = rng.gen_range(1..=max_maps.max(1));
    let mut maps = Vec::with_capacity(count);
    for n in 0..count {
        let mut local_tags = BTreeMap::new();
        for i in 0..source.chart_count() {
            for c in 0..target.chart_count() {
                let tag = if rng.gen_bool(0.5) {
                    TransitionTag::BDiffeo
                } else {
                    TransitionTag::CkDiffeo
                };
                local_tags.insert((i, c), tag);
            }
        }
        maps.push(FormalMap {
            name: format!("f{n}"),
            iso: rng.gen_bool(0.5),
            local_tags,
        });
    }
    (source, target, maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_chart_atlas(tag: TransitionTag) -> Atlas {
        let mut a = Atlas::new(2).unwrap();
        a.add_overlap(0, 1).unwrap();
        a.set_tag(0, 1, tag).unwrap();
        a
    }

    fn iso_map(name: &str, source: &Atlas, target: &Atlas, tag: TransitionTag) -> FormalMap {
        let mut local_tags = BTreeMap::new();
        for i in 0..source.chart_count() {
            for c in 0..target.chart_count() {
                local_tags.insert((i, c), tag);
            }
        }
        FormalMap {
            name: name.into(),
            iso: true,
            local_tags,
        }
    }

    #[test]
    fn single_iso_passes_left_mode() {
        let source = two_chart_atlas(TransitionTag::CkDiffeo);
        let target = two_chart_atlas(TransitionTag::BDiffeo);
        let map = iso_map("f", &source, &target, TransitionTag::CkDiffeo);
        let report =
            hom_bijection_check(&source, &target, &[map], AbsorbMode::Left).unwrap();
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn non_iso_excluded_from_core_included_in_full() {
        let source = two_chart_atlas(TransitionTag::CkDiffeo);
        let target = two_chart_atlas(TransitionTag::BDiffeo);
        let mut map = iso_map("g", &source, &target, TransitionTag::CkDiffeo);
        map.iso = false;
        let core =
            hom_bijection_check(&source, &target, &[map.clone()], AbsorbMode::Left).unwrap();
        // excluded: nothing to check beyond the empty bijection
        assert!(core.pass());
        assert_eq!(core.checked, 0);
        let full =
            hom_bijection_check(&source, &target, &[map], AbsorbMode::FullLeft).unwrap();
        assert!(full.pass());
        assert!(full.checked > 0);
    }

    #[test]
    fn random_instances_pass_full_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..25 {
            let (source, target, maps) = random_hom_instance(&mut rng, 4, 8);
            for mode in [AbsorbMode::FullLeft, AbsorbMode::FullRight] {
                let report = hom_bijection_check(&source, &target, &maps, mode).unwrap();
                assert!(report.pass(), "{report}");
            }
        }
    }
}
