//! Set-partition enumeration and the index calculus of the higher-order chain
//! rule: the composed gradings `alpha_composed` and `beta_composed` obtained by
//! folding the family's index rules over all partitions of `{1, ..., i}`, plus
//! the ordered and unital checks that gate composition closure.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::families::{FamilyDescriptor, Grade, Monotonicity};
use crate::index::{Counterexample, ExtIndex, GammaRange, Grading, IndexError, IndexFn, LawReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComposeError {
    #[error("size limit: {0}")]
    SizeLimit(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// Enumeration cap: partition counts grow faster than exponentially, so
/// ground sets above this size are refused outright.
pub const PARTITION_CAP: u32 = 12;

/// A partition of `{1, ..., ground}` in canonical form: blocks sorted
/// ascending internally and listed by least element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    ground: u32,
    blocks: Vec<Vec<u32>>,
}

impl SetPartition {
    /// Validates disjointness and coverage, then canonicalizes.
    pub fn new(ground: u32, mut blocks: Vec<Vec<u32>>) -> Result<Self, ComposeError> {
        let mut seen = vec![false; ground as usize];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(ComposeError::Domain("empty block".into()));
            }
            block.sort_unstable();
            for &e in block.iter() {
                if e < 1 || e > ground {
                    return Err(ComposeError::Domain(format!(
                        "element {e} outside 1..={ground}"
                    )));
                }
                if seen[(e - 1) as usize] {
                    return Err(ComposeError::Domain(format!("element {e} repeated")));
                }
                seen[(e - 1) as usize] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(ComposeError::Domain("blocks do not cover the ground set".into()));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(SetPartition { ground, blocks })
    }

    pub fn ground(&self) -> u32 {
        self.ground
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block_count(&self) -> u32 {
        self.blocks.len() as u32
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let elems: Vec<String> = b.iter().map(|e| e.to_string()).collect();
                format!("{{{}}}", elems.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All set partitions of `{1, ..., i}` in canonical order: primarily by block
/// count, then lexicographically on the canonical block form. Errors above
/// [`PARTITION_CAP`].
pub fn enumerate_partitions(i: u32) -> Result<Vec<SetPartition>, ComposeError> {
    if i == 0 {
        return Err(ComposeError::Domain("partition order must be >= 1".into()));
    }
    if i > PARTITION_CAP {
        return Err(ComposeError::SizeLimit(format!(
            "partitions of [{i}] exceed the cap {PARTITION_CAP}"
        )));
    }
    // restricted growth strings: a[0] = 0, a[k] <= max(a[..k]) + 1
    let n = i as usize;
    let mut out = Vec::new();
    let mut assignment = vec![0u32; n];
    fn rec(assignment: &mut Vec<u32>, pos: usize, max_used: u32, out: &mut Vec<Vec<u32>>) {
        let n = assignment.len();
        if pos == n {
            out.push(assignment.clone());
            return;
        }
        for label in 0..=max_used + 1 {
            assignment[pos] = label;
            rec(assignment, pos + 1, max_used.max(label), out);
        }
    }
    let mut raw = Vec::new();
    if n == 1 {
        raw.push(vec![0u32]);
    } else {
        assignment[0] = 0;
        rec(&mut assignment, 1, 0, &mut raw);
    }
    for a in raw {
        let block_total = (*a.iter().max().unwrap() + 1) as usize;
        let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); block_total];
        for (idx, &label) in a.iter().enumerate() {
            blocks[label as usize].push(idx as u32 + 1);
        }
        out.push(SetPartition::new(i, blocks)?);
    }
    out.sort_by(|a, b| {
        a.block_count()
            .cmp(&b.block_count())
            .then_with(|| a.blocks.cmp(&b.blocks))
    });
    out.dedup();
    Ok(out)
}

/// Ordering choice for partitions and blocks. The fold results must not
/// depend on it when the index rules are commutative and associative; the
/// shuffled implementation exists to test exactly that.
pub trait OrderingFn {
    fn arrange_partitions(&self, parts: Vec<SetPartition>) -> Vec<SetPartition>;
    fn arrange_blocks(&self, part: &SetPartition) -> Vec<Vec<u32>>;
}

/// The canonical order: partitions by (block count, lexicographic form),
/// blocks by least element.
#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalOrder;

impl OrderingFn for CanonicalOrder {
    fn arrange_partitions(&self, parts: Vec<SetPartition>) -> Vec<SetPartition> {
        parts
    }

    fn arrange_blocks(&self, part: &SetPartition) -> Vec<Vec<u32>> {
        part.blocks().to_vec()
    }
}

/// Deterministic shuffle of both orderings, seeded.
#[derive(Debug, Clone, Copy)]
pub struct ShuffledOrder {
    pub seed: u64,
}

impl OrderingFn for ShuffledOrder {
    fn arrange_partitions(&self, mut parts: Vec<SetPartition>) -> Vec<SetPartition> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        parts.shuffle(&mut rng);
        parts
    }

    fn arrange_blocks(&self, part: &SetPartition) -> Vec<Vec<u32>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ part.ground() as u64);
        let mut blocks = part.blocks().to_vec();
        blocks.shuffle(&mut rng);
        blocks
    }
}

fn fold_eps_over_blocks(
    blocks: &[Vec<u32>],
    alpha: &dyn Fn(u32) -> ExtIndex,
    eps: &IndexFn,
) -> Result<ExtIndex, ComposeError> {
    let mut acc = alpha(blocks[0].len() as u32);
    for block in &blocks[1..] {
        acc = eps.eval(alpha(block.len() as u32), acc)?;
    }
    Ok(acc)
}

/// Right-fold of `eps` over `alpha(|block|)` in canonical block order, the
/// grade of the derivative product contributed by one partition.
pub fn eps_fold(
    partition: &SetPartition,
    alpha: &Grading,
    eps: &IndexFn,
) -> Result<ExtIndex, ComposeError> {
    fold_eps_over_blocks(partition.blocks(), &|m| alpha.eval(m), eps)
}

/// `eps(alpha(#blocks), eps_fold(partition))`: the grade of one full chain-rule
/// term, outer-derivative factor included.
pub fn eps_bar(
    partition: &SetPartition,
    alpha: &Grading,
    eps: &IndexFn,
) -> Result<ExtIndex, ComposeError> {
    let inner = eps_fold(partition, alpha, eps)?;
    Ok(eps.eval(alpha.eval(partition.block_count()), inner)?)
}

fn eps_bar_with(
    blocks: &[Vec<u32>],
    block_count: u32,
    outer_alpha: &dyn Fn(u32) -> ExtIndex,
    inner_alpha: &dyn Fn(u32) -> ExtIndex,
    eps: &IndexFn,
) -> Result<ExtIndex, ComposeError> {
    let inner = fold_eps_over_blocks(blocks, inner_alpha, eps)?;
    Ok(eps.eval(outer_alpha(block_count), inner)?)
}

/// Composed grading at order `i` with distinct outer/inner gradings: the
/// outer grading is evaluated at block counts (derivative orders of the outer
/// function), the inner one at block sizes.
pub fn alpha_composed_with(
    outer_alpha: &Grading,
    inner_alpha: &Grading,
    eps: &IndexFn,
    delta: &IndexFn,
    i: u32,
    ord: &dyn OrderingFn,
) -> Result<ExtIndex, ComposeError> {
    let parts = ord.arrange_partitions(enumerate_partitions(i)?);
    let mut acc: Option<ExtIndex> = None;
    for part in &parts {
        let blocks = ord.arrange_blocks(part);
        let value = eps_bar_with(
            &blocks,
            part.block_count(),
            &|m| outer_alpha.eval(m),
            &|m| inner_alpha.eval(m),
            eps,
        )?;
        acc = Some(match acc {
            None => value,
            Some(a) => delta.eval(value, a)?,
        });
    }
    acc.ok_or_else(|| ComposeError::Domain("no partitions".into()))
}

/// Right-fold of `delta` over the per-partition grades of all partitions of
/// `[i]`: the composed grading of order-`i` derivatives of a composite.
pub fn alpha_composed(
    alpha: &Grading,
    eps: &IndexFn,
    delta: &IndexFn,
    i: u32,
    ord: &dyn OrderingFn,
) -> Result<ExtIndex, ComposeError> {
    alpha_composed_with(alpha, alpha, eps, delta, i, ord)
}

/// Composed smoothness defect with distinct outer/inner maps: the maximum of
/// the outer map over block counts and the inner map over block sizes.
pub fn beta_composed_with(
    outer_beta: &Grading,
    inner_beta: &Grading,
    i: u32,
) -> Result<ExtIndex, ComposeError> {
    let parts = enumerate_partitions(i)?;
    let mut best: Option<ExtIndex> = None;
    for part in &parts {
        let mut local = outer_beta.eval(part.block_count());
        for block in part.blocks() {
            local = local.max(inner_beta.eval(block.len() as u32));
        }
        best = Some(match best {
            None => local,
            Some(b) => b.max(local),
        });
    }
    best.ok_or_else(|| ComposeError::Domain("no partitions".into()))
}

/// Maximum of `beta` over all block counts and block sizes of partitions of
/// `[i]`.
pub fn beta_composed(beta: &Grading, i: u32) -> Result<ExtIndex, ComposeError> {
    beta_composed_with(beta, beta, i)
}

/// Composed grade at order `i` through a family's grading, treating
/// zero-space factors as vanished terms: a partition containing one
/// contributes nothing, and if every partition vanishes the composed grade is
/// the zero space.
pub fn alpha_composed_grade(
    family: &FamilyDescriptor,
    i: u32,
    ord: &dyn OrderingFn,
) -> Result<Grade, ComposeError> {
    let parts = ord.arrange_partitions(enumerate_partitions(i)?);
    let eps = family.eps();
    let delta = family.delta();
    let mut acc: Option<ExtIndex> = None;
    'parts: for part in &parts {
        let blocks = ord.arrange_blocks(part);
        let mut sizes = Vec::with_capacity(blocks.len() + 1);
        sizes.push(part.block_count());
        for b in &blocks {
            sizes.push(b.len() as u32);
        }
        let mut grades = Vec::with_capacity(sizes.len());
        for m in sizes {
            match family.grade(m) {
                Grade::ZeroSpace => continue 'parts,
                Grade::Value(v) => grades.push(v),
            }
        }
        // grades[0] is the outer factor, the rest follow block order
        let mut inner = grades[1];
        for g in &grades[2..] {
            inner = eps.eval(*g, inner)?;
        }
        let value = eps.eval(grades[0], inner)?;
        acc = Some(match acc {
            None => value,
            Some(a) => delta.eval(value, a)?,
        });
    }
    Ok(match acc {
        Some(v) => Grade::Value(v),
        None => Grade::ZeroSpace,
    })
}

/// Composition-closure check: for each order in the range, the composed
/// grades must embed back into the family's own grades. Decreasing families
/// need `alpha_composed(i) >= grade(i)`, increasing ones the reverse, and the
/// smoothness defect must satisfy `beta_composed(i) <= beta(i)`.
pub fn check_ordered(
    family: &FamilyDescriptor,
    _alpha: &Grading,
    beta: &Grading,
    _k: ExtIndex,
    gamma: &GammaRange,
    ord: &dyn OrderingFn,
) -> Result<LawReport, ComposeError> {
    let mut counterexamples = Vec::new();
    let mut checked = 0usize;
    for i in gamma.iter() {
        if i == 0 {
            continue;
        }
        checked += 1;
        let b_comp = beta_composed(beta, i)?;
        let b_here = beta.eval(i);
        if b_comp > b_here {
            counterexamples.push(Counterexample {
                args: vec![i.to_string()],
                lhs: b_comp.to_string(),
                rhs: b_here.to_string(),
            });
            continue;
        }
        let a_comp = alpha_composed_grade(family, i, ord)?;
        let a_here = family.grade(i);
        let ok = match (a_comp, a_here) {
            (Grade::ZeroSpace, _) => true,
            (Grade::Value(_), Grade::ZeroSpace) => false,
            (Grade::Value(c), Grade::Value(h)) => match family.monotonicity() {
                Monotonicity::Increasing => c <= h,
                Monotonicity::Decreasing | Monotonicity::None => c >= h,
            },
        };
        if !ok {
            counterexamples.push(Counterexample {
                args: vec![i.to_string()],
                lhs: a_comp.to_string(),
                rhs: a_here.to_string(),
            });
        }
    }
    Ok(LawReport::new(
        format!("ordered[{}]", family.name()),
        counterexamples,
        checked,
    ))
}

/// Whether the identity map is a member: its order-1 derivatives are
/// constants and all higher derivatives vanish, so membership reduces to the
/// family's metadata (plus polynomial membership for the map itself on
/// bounded domains).
pub fn check_unital(
    family: &FamilyDescriptor,
    _alpha: &Grading,
    _beta: &Grading,
    _k: ExtIndex,
) -> bool {
    let rules = family.membership();
    let order_zero = match family.domain_kind() {
        crate::families::DomainKind::Bounded => rules.contains_polynomials_on_bounded,
        // on an unbounded domain the identity grows like a constant-derivative
        // map; constants decide both orders here
        crate::families::DomainKind::Unbounded => rules.contains_constants(family.domain_kind()),
    };
    order_zero && rules.contains_constants(family.domain_kind()) && rules.contains_zero
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{
        make_ck_family, make_lp_holder_family, make_lp_young_family, HolderMode,
    };

    /// Independent count oracle: B(n+1) = sum_k C(n,k) B(k).
    pub(crate) fn bell_numbers(up_to: usize) -> Vec<u64> {
        let mut bell = vec![1u64; up_to + 1];
        for n in 0..up_to {
            let mut next = 0u64;
            for k in 0..=n {
                let mut c = 1u64;
                for x in 0..k {
                    c = c * (n as u64 - x) / (x as u64 + 1);
                }
                next += c * bell[k];
            }
            bell[n + 1] = next;
        }
        bell
    }

    #[test]
    fn partition_counts_match_bell_recurrence() {
        let bell = bell_numbers(8);
        assert_eq!(&bell[1..=8], &[1, 2, 5, 15, 52, 203, 877, 4140]);
        for i in 1..=8u32 {
            let parts = enumerate_partitions(i).unwrap();
            assert_eq!(parts.len() as u64, bell[i as usize], "order {i}");
        }
    }

    #[test]
    fn partition_enumeration_canonical_and_unique() {
        let parts = enumerate_partitions(4).unwrap();
        assert_eq!(parts.len(), 15);
        for w in parts.windows(2) {
            assert!(
                (w[0].block_count(), w[0].blocks()) < (w[1].block_count(), w[1].blocks()),
                "not strictly ordered: {} vs {}",
                w[0],
                w[1]
            );
        }
        for p in &parts {
            for b in p.blocks() {
                assert!(b.windows(2).all(|w| w[0] < w[1]));
            }
            assert!(p
                .blocks()
                .windows(2)
                .all(|w| w[0][0] < w[1][0]));
        }
    }

    #[test]
    fn partition_of_one() {
        let parts = enumerate_partitions(1).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].blocks(), &[vec![1]]);
    }

    #[test]
    fn partition_cap_enforced() {
        assert!(matches!(
            enumerate_partitions(13),
            Err(ComposeError::SizeLimit(_))
        ));
        assert!(enumerate_partitions(0).is_err());
    }

    fn const6() -> Grading {
        Grading::constant(ExtIndex::int(6))
    }

    #[test]
    fn eps_fold_examples() {
        let eps = IndexFn::holder();
        let single = SetPartition::new(2, vec![vec![1, 2]]).unwrap();
        assert_eq!(eps_fold(&single, &const6(), &eps).unwrap(), ExtIndex::int(6));

        let split = SetPartition::new(2, vec![vec![1], vec![2]]).unwrap();
        assert_eq!(eps_fold(&split, &const6(), &eps).unwrap(), ExtIndex::int(3));

        let alpha12 = Grading::constant(ExtIndex::int(12));
        let triple = SetPartition::new(3, vec![vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(eps_fold(&triple, &alpha12, &eps).unwrap(), ExtIndex::int(4));
    }

    #[test]
    fn eps_bar_examples() {
        let eps = IndexFn::holder();
        let single = SetPartition::new(2, vec![vec![1, 2]]).unwrap();
        assert_eq!(eps_bar(&single, &const6(), &eps).unwrap(), ExtIndex::int(3));

        let split = SetPartition::new(2, vec![vec![1], vec![2]]).unwrap();
        assert_eq!(eps_bar(&split, &const6(), &eps).unwrap(), ExtIndex::int(2));

        let one = SetPartition::new(1, vec![vec![1]]).unwrap();
        let p = Grading::constant(ExtIndex::int(10));
        assert_eq!(eps_bar(&one, &p, &eps).unwrap(), ExtIndex::int(5));
    }

    #[test]
    fn alpha_composed_hand_values() {
        let eps = IndexFn::holder();
        let delta = IndexFn::min();
        let ord = CanonicalOrder;
        assert_eq!(
            alpha_composed(&const6(), &eps, &delta, 2, &ord).unwrap(),
            ExtIndex::int(2)
        );
        let alpha12 = Grading::constant(ExtIndex::int(12));
        assert_eq!(
            alpha_composed(&alpha12, &eps, &delta, 3, &ord).unwrap(),
            ExtIndex::int(3)
        );
        let inf = Grading::constant(ExtIndex::Inf);
        for i in 1..=5 {
            assert_eq!(
                alpha_composed(&inf, &eps, &delta, i, &ord).unwrap(),
                ExtIndex::Inf
            );
        }
    }

    #[test]
    fn alpha_composed_worst_term_rule() {
        // with a constant grading p, the worst chain-rule term at order i has
        // i+1 factors, so the composed exponent is p/(i+1)
        let eps = IndexFn::holder();
        let delta = IndexFn::min();
        let ord = CanonicalOrder;
        for p in [6u32, 12, 24] {
            for i in 1..=3u32 {
                let expect = ExtIndex::ratio(p as i128, (i + 1) as i128).unwrap();
                let got = alpha_composed(
                    &Grading::constant(ExtIndex::int(p)),
                    &eps,
                    &delta,
                    i,
                    &ord,
                )
                .unwrap();
                assert_eq!(got, expect, "p={p}, i={i}");
            }
        }
    }

    #[test]
    fn alpha_composed_order_invariant_under_shuffles() {
        let eps = IndexFn::holder();
        let delta = IndexFn::min();
        let alpha = Grading::constant(ExtIndex::int(8));
        for i in 1..=5u32 {
            let canonical = alpha_composed(&alpha, &eps, &delta, i, &CanonicalOrder).unwrap();
            for seed in 0..20u64 {
                let shuffled =
                    alpha_composed(&alpha, &eps, &delta, i, &ShuffledOrder { seed }).unwrap();
                assert_eq!(canonical, shuffled, "order {i}, seed {seed}");
            }
        }
    }

    #[test]
    fn beta_composed_examples() {
        assert_eq!(beta_composed(&Grading::identity(), 3).unwrap(), ExtIndex::int(3));
        assert_eq!(beta_composed(&Grading::identity(), 1).unwrap(), ExtIndex::int(1));
        let c = Grading::constant(ExtIndex::int(4));
        for i in 1..=6 {
            assert_eq!(beta_composed(&c, i).unwrap(), ExtIndex::int(4));
        }
        for i in 1..=8u32 {
            assert_eq!(
                beta_composed(&Grading::identity(), i).unwrap(),
                ExtIndex::int(i)
            );
        }
    }

    #[test]
    fn ordered_verdicts() {
        let gamma = GammaRange::up_to(4).unwrap();
        let ord = CanonicalOrder;
        let beta = Grading::identity();

        let linf =
            make_lp_holder_family(&Grading::constant(ExtIndex::Inf), HolderMode::IntPart, &gamma)
                .unwrap();
        assert!(check_ordered(&linf, &Grading::constant(ExtIndex::Inf), &beta, ExtIndex::int(4), &gamma, &ord)
            .unwrap()
            .pass());

        let l6 = make_lp_holder_family(&const6(), HolderMode::IntPart, &gamma).unwrap();
        let r = check_ordered(&l6, &const6(), &beta, ExtIndex::int(4), &gamma, &ord).unwrap();
        assert!(!r.pass());
        assert_eq!(r.counterexamples[0].args, vec!["1".to_string()]);
        assert_eq!(r.counterexamples[0].lhs, "3");
        assert_eq!(r.counterexamples[0].rhs, "6");

        let ck = make_ck_family(ExtIndex::int(4), &Grading::identity(), &gamma).unwrap();
        assert!(check_ordered(&ck, &Grading::identity(), &beta, ExtIndex::int(4), &gamma, &ord)
            .unwrap()
            .pass());
    }

    #[test]
    fn unital_verdicts() {
        let gamma = GammaRange::up_to(4).unwrap();
        let alpha = Grading::identity();
        let beta = Grading::identity();
        let k = ExtIndex::int(4);

        let ck = make_ck_family(k, &Grading::identity(), &gamma).unwrap();
        assert!(check_unital(&ck, &alpha, &beta, k));

        let lp = make_lp_holder_family(&const6(), HolderMode::IntPart, &gamma).unwrap();
        assert!(check_unital(&lp, &alpha, &beta, k));

        let young = make_lp_young_family(&Grading::constant(ExtIndex::int(2)), &gamma).unwrap();
        assert!(!check_unital(&young, &alpha, &beta, k));
    }

    #[test]
    fn young_composed_grade_propagates_errors() {
        let gamma = GammaRange::up_to(3).unwrap();
        let fam = make_lp_young_family(&Grading::constant(ExtIndex::int(3)), &gamma).unwrap();
        assert!(alpha_composed_grade(&fam, 2, &CanonicalOrder).is_err());
    }
}
