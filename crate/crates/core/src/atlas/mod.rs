//! Finite symbolic atlases with regularity-tagged transitions, the absorption
//! rule for composing them, and the retraction construction that turns an
//! arbitrary atlas into one whose transitions are all B-tagged.
//!
//! Charts and overlaps are purely combinatorial here: an atlas knows which
//! chart pairs overlap and what regularity tag each transition carries, and
//! nothing else. That is enough to exercise the absorption, ideal and
//! adjunction statements at tag level.

mod hom;
mod magma;

pub use hom::{hom_bijection_check, random_hom_instance, FormalMap};
pub use magma::{check_ideal, transition_magma, transition_magma_plain, FiniteMagma, IdealSide, MagmaElement};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AtlasError {
    #[error("ordered property required: {0}")]
    OrderedRequired(String),
    #[error("not absorbing: {0}")]
    NotAbsorbing(String),
    #[error("atlas format error: {0}")]
    Format(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Regularity tag on a transition: a plain `C^k` diffeomorphism or one whose
/// derivatives additionally lie in the graded family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransitionTag {
    CkDiffeo,
    BDiffeo,
}

impl fmt::Display for TransitionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitionTag::CkDiffeo => write!(f, "Ck"),
            TransitionTag::BDiffeo => write!(f, "B"),
        }
    }
}

impl TransitionTag {
    pub fn parse(s: &str) -> Result<Self, AtlasError> {
        match s {
            "B" => Ok(TransitionTag::BDiffeo),
            "Ck" => Ok(TransitionTag::CkDiffeo),
            other => Err(AtlasError::Format(format!("unknown tag `{other}`"))),
        }
    }
}

/// Which side of a composition absorbs plain maps into the B class. The
/// `Full*` modes absorb arbitrary maps, not only diffeomorphisms; at tag
/// level the distinction matters for which morphisms a check admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsorbMode {
    Left,
    Right,
    FullLeft,
    FullRight,
    Full,
}

impl AbsorbMode {
    pub fn absorbs_left(self) -> bool {
        matches!(self, AbsorbMode::Left | AbsorbMode::FullLeft | AbsorbMode::Full)
    }

    pub fn absorbs_right(self) -> bool {
        matches!(self, AbsorbMode::Right | AbsorbMode::FullRight | AbsorbMode::Full)
    }

    pub fn is_full(self) -> bool {
        matches!(self, AbsorbMode::FullLeft | AbsorbMode::FullRight | AbsorbMode::Full)
    }

    pub fn parse(s: &str) -> Result<Self, AtlasError> {
        match s {
            "left" => Ok(AbsorbMode::Left),
            "right" => Ok(AbsorbMode::Right),
            "full-left" | "full_left" => Ok(AbsorbMode::FullLeft),
            "full-right" | "full_right" => Ok(AbsorbMode::FullRight),
            "full" => Ok(AbsorbMode::Full),
            other => Err(AtlasError::Format(format!("unknown absorb mode `{other}`"))),
        }
    }
}

impl fmt::Display for AbsorbMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsorbMode::Left => write!(f, "left"),
            AbsorbMode::Right => write!(f, "right"),
            AbsorbMode::FullLeft => write!(f, "full-left"),
            AbsorbMode::FullRight => write!(f, "full-right"),
            AbsorbMode::Full => write!(f, "full"),
        }
    }
}

/// Tag of the composite `g  f` under the absorption rule: the composite is
/// B-tagged when the mode's absorbing side holds a B factor, or when both
/// factors are B and the ordered property licenses their composition.
/// Composing two B factors without the ordered flag is an error.
pub fn absorb_compose(
    g_tag: TransitionTag,
    f_tag: TransitionTag,
    mode: AbsorbMode,
    ordered: bool,
) -> Result<TransitionTag, AtlasError> {
    use TransitionTag::*;
    match (g_tag, f_tag) {
        (BDiffeo, BDiffeo) => {
            if ordered {
                Ok(BDiffeo)
            } else {
                Err(AtlasError::OrderedRequired(
                    "composing two B-diffeomorphisms needs the ordered property".into(),
                ))
            }
        }
        (g, f) => {
            let absorbed = (mode.absorbs_left() && f == BDiffeo)
                || (mode.absorbs_right() && g == BDiffeo);
            Ok(if absorbed { BDiffeo } else { CkDiffeo })
        }
    }
}

/// Composition rule with absorption deleted: a composite is B only when both
/// factors already are. Used as the control in ideal checks.
pub fn plain_compose(g_tag: TransitionTag, f_tag: TransitionTag) -> TransitionTag {
    if g_tag == TransitionTag::BDiffeo && f_tag == TransitionTag::BDiffeo {
        TransitionTag::BDiffeo
    } else {
        TransitionTag::CkDiffeo
    }
}

/// Finite chart atlas: a chart set, a reflexive symmetric overlap relation
/// and a tag per overlapping pair. Identity transitions are B-tagged and
/// tags are inverse-closed (`tag(i,j) = tag(j,i)`) by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atlas {
    labels: Vec<String>,
    overlap: BTreeSet<(u32, u32)>,
    tags: BTreeMap<(u32, u32), TransitionTag>,
}

fn norm(i: u32, j: u32) -> (u32, u32) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

impl Atlas {
    pub fn new(charts: u32) -> Result<Self, AtlasError> {
        if charts == 0 {
            return Err(AtlasError::Domain("atlas needs at least one chart".into()));
        }
        Ok(Atlas {
            labels: (0..charts).map(|i| i.to_string()).collect(),
            overlap: BTreeSet::new(),
            tags: BTreeMap::new(),
        })
    }

    pub fn chart_count(&self) -> u32 {
        self.labels.len() as u32
    }

    pub fn label(&self, i: u32) -> &str {
        &self.labels[i as usize]
    }

    fn check_chart(&self, i: u32) -> Result<(), AtlasError> {
        if i >= self.chart_count() {
            return Err(AtlasError::Domain(format!(
                "chart {i} out of range 0..{}",
                self.chart_count()
            )));
        }
        Ok(())
    }

    /// Declares a nonempty overlap; the transition tag defaults to `Ck` until
    /// set. Diagonal overlaps are implicit and ignored here.
    pub fn add_overlap(&mut self, i: u32, j: u32) -> Result<(), AtlasError> {
        self.check_chart(i)?;
        self.check_chart(j)?;
        if i != j {
            self.overlap.insert(norm(i, j));
        }
        Ok(())
    }

    /// Sets the tag of an overlapping pair (both directions at once).
    /// Identity transitions are pinned to `B`.
    pub fn set_tag(&mut self, i: u32, j: u32, tag: TransitionTag) -> Result<(), AtlasError> {
        self.check_chart(i)?;
        self.check_chart(j)?;
        if i == j {
            return if tag == TransitionTag::BDiffeo {
                Ok(())
            } else {
                Err(AtlasError::Domain(
                    "identity transitions are B-tagged by definition".into(),
                ))
            };
        }
        if !self.overlap.contains(&norm(i, j)) {
            return Err(AtlasError::Domain(format!(
                "charts {i} and {j} do not overlap"
            )));
        }
        self.tags.insert(norm(i, j), tag);
        Ok(())
    }

    pub fn overlaps(&self, i: u32, j: u32) -> bool {
        i == j || self.overlap.contains(&norm(i, j))
    }

    /// Transition tag between overlapping charts; `None` when they do not
    /// overlap. Untagged overlapping pairs read as `Ck`.
    pub fn tag(&self, i: u32, j: u32) -> Option<TransitionTag> {
        if i == j {
            return Some(TransitionTag::BDiffeo);
        }
        if !self.overlap.contains(&norm(i, j)) {
            return None;
        }
        Some(
            self.tags
                .get(&norm(i, j))
                .copied()
                .unwrap_or(TransitionTag::CkDiffeo),
        )
    }

    /// Unordered non-diagonal overlapping pairs, sorted.
    pub fn overlapping_pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.overlap.iter().copied()
    }

    /// Ordered pairs `(i, j)` with `overlap(i, j)`, diagonal included; the
    /// chart set of the retracted atlas.
    pub fn ordered_overlapping_pairs(&self) -> Vec<(u32, u32)> {
        let m = self.chart_count();
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if self.overlaps(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Coproduct of atlases: charts side by side, no cross overlaps.
    pub fn disjoint_union(a: &Atlas, b: &Atlas) -> Atlas {
        let offset = a.chart_count();
        let mut labels = Vec::with_capacity((offset + b.chart_count()) as usize);
        for l in &a.labels {
            labels.push(format!("l.{l}"));
        }
        for l in &b.labels {
            labels.push(format!("r.{l}"));
        }
        let mut overlap = a.overlap.clone();
        let mut tags = a.tags.clone();
        for &(i, j) in &b.overlap {
            overlap.insert((i + offset, j + offset));
        }
        for (&(i, j), &t) in &b.tags {
            tags.insert((i + offset, j + offset), t);
        }
        Atlas { labels, overlap, tags }
    }

    /// Product of atlases: chart pairs, overlapping when both components do;
    /// a product transition is B exactly when both components are.
    pub fn product(a: &Atlas, b: &Atlas) -> Atlas {
        let (ma, mb) = (a.chart_count(), b.chart_count());
        let id = |i: u32, j: u32| i * mb + j;
        let mut labels = Vec::with_capacity((ma * mb) as usize);
        for i in 0..ma {
            for j in 0..mb {
                labels.push(format!("({},{})", a.label(i), b.label(j)));
            }
        }
        let mut out = Atlas {
            labels,
            overlap: BTreeSet::new(),
            tags: BTreeMap::new(),
        };
        for i1 in 0..ma {
            for j1 in 0..mb {
                for i2 in 0..ma {
                    for j2 in 0..mb {
                        let (c1, c2) = (id(i1, j1), id(i2, j2));
                        if c1 >= c2 {
                            continue;
                        }
                        if a.overlaps(i1, i2) && b.overlaps(j1, j2) {
                            out.overlap.insert((c1, c2));
                            let t = match (a.tag(i1, i2).unwrap(), b.tag(j1, j2).unwrap()) {
                                (TransitionTag::BDiffeo, TransitionTag::BDiffeo) => {
                                    TransitionTag::BDiffeo
                                }
                                _ => TransitionTag::CkDiffeo,
                            };
                            out.tags.insert((c1, c2), t);
                        }
                    }
                }
            }
        }
        out
    }

    /// Parses the line-oriented format: `atlas <m>`, then `overlap A B` and
    /// `trans A B tag=(B|Ck)` lines. `#` starts a comment. Chart ids may be
    /// plain indices below `m` or arbitrary labels resolved in order of first
    /// appearance.
    pub fn parse(text: &str) -> Result<Atlas, AtlasError> {
        let mut lines = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                lines.push((no + 1, line.to_string()));
            }
        }
        let Some((_, header)) = lines.first() else {
            return Err(AtlasError::Format("empty atlas file".into()));
        };
        let mut head = header.split_whitespace();
        if head.next() != Some("atlas") {
            return Err(AtlasError::Format("first line must be `atlas <m>`".into()));
        }
        let m: u32 = head
            .next()
            .ok_or_else(|| AtlasError::Format("missing chart count".into()))?
            .parse()
            .map_err(|_| AtlasError::Format("bad chart count".into()))?;
        if head.next().is_some() {
            return Err(AtlasError::Format("trailing tokens after chart count".into()));
        }

        // collect all chart id tokens to decide between index and label mode
        let mut id_tokens: Vec<String> = Vec::new();
        for (no, line) in &lines[1..] {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.first().copied() {
                Some("overlap") | Some("trans") => {
                    if toks.len() < 3 {
                        return Err(AtlasError::Format(format!("line {no}: too few tokens")));
                    }
                    id_tokens.push(toks[1].to_string());
                    id_tokens.push(toks[2].to_string());
                }
                Some(other) => {
                    return Err(AtlasError::Format(format!(
                        "line {no}: unknown directive `{other}`"
                    )))
                }
                None => {}
            }
        }
        let index_mode = id_tokens
            .iter()
            .all(|t| t.parse::<u32>().map(|v| v < m).unwrap_or(false));
        let mut label_ids: BTreeMap<String, u32> = BTreeMap::new();
        let mut resolve = |tok: &str| -> Result<u32, AtlasError> {
            if index_mode {
                return Ok(tok.parse::<u32>().expect("checked above"));
            }
            if let Some(&id) = label_ids.get(tok) {
                return Ok(id);
            }
            let next = label_ids.len() as u32;
            if next >= m {
                return Err(AtlasError::Format(format!(
                    "more than {m} distinct chart ids (at `{tok}`)"
                )));
            }
            label_ids.insert(tok.to_string(), next);
            Ok(next)
        };

        let mut atlas = Atlas::new(m)?;
        let mut pending_tags = Vec::new();
        for (no, line) in &lines[1..] {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "overlap" => {
                    if toks.len() != 3 {
                        return Err(AtlasError::Format(format!(
                            "line {no}: expected `overlap i j`"
                        )));
                    }
                    let i = resolve(toks[1])?;
                    let j = resolve(toks[2])?;
                    atlas.add_overlap(i, j)?;
                }
                "trans" => {
                    if toks.len() != 4 {
                        return Err(AtlasError::Format(format!(
                            "line {no}: expected `trans i j tag=(B|Ck)`"
                        )));
                    }
                    let i = resolve(toks[1])?;
                    let j = resolve(toks[2])?;
                    let tag = toks[3]
                        .strip_prefix("tag=")
                        .ok_or_else(|| AtlasError::Format(format!("line {no}: expected tag=")))
                        .and_then(TransitionTag::parse)?;
                    pending_tags.push((i, j, tag, *no));
                }
                _ => unreachable!("validated above"),
            }
        }
        for (i, j, tag, no) in pending_tags {
            // a trans line implies the overlap
            atlas.add_overlap(i, j)?;
            atlas
                .set_tag(i, j, tag)
                .map_err(|e| AtlasError::Format(format!("line {no}: {e}")))?;
        }
        if !index_mode {
            for (label, id) in label_ids {
                atlas.labels[id as usize] = label;
            }
        }
        Ok(atlas)
    }

    /// Emits the same line-oriented format, transitions stated explicitly.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("atlas {}\n", self.chart_count()));
        for &(i, j) in &self.overlap {
            out.push_str(&format!("overlap {} {}\n", self.label(i), self.label(j)));
        }
        for &(i, j) in &self.overlap {
            let tag = self.tag(i, j).expect("overlapping");
            out.push_str(&format!(
                "trans {} {} tag={}\n",
                self.label(i),
                self.label(j),
                tag
            ));
        }
        out
    }
}

/// True when every transition of the atlas is B-tagged.
pub fn check_b_structure(atlas: &Atlas) -> bool {
    atlas
        .overlapping_pairs()
        .all(|(i, j)| atlas.tag(i, j) == Some(TransitionTag::BDiffeo))
}

/// Retraction at tag level: the output charts are the ordered overlapping
/// pairs `(j; i)` of the input, and each new transition is the three-factor
/// word `retract(kl)  (li)  retract(ji)^{-1}` pushed through the absorption
/// rule. Both associativity groupings are computed and must agree on a B tag;
/// anything else reports the construction as not absorbing.
pub fn retract_atlas(atlas: &Atlas, mode: AbsorbMode) -> Result<Atlas, AtlasError> {
    let charts = atlas.ordered_overlapping_pairs();
    let mut out = Atlas::new(charts.len() as u32)?;
    for (c, &(i, j)) in charts.iter().enumerate() {
        out.labels[c] = format!("{};{}", atlas.label(j), atlas.label(i));
    }
    let b = TransitionTag::BDiffeo;
    for (c1, &(i, j)) in charts.iter().enumerate() {
        for (c2, &(l, k)) in charts.iter().enumerate() {
            if c1 == c2 {
                continue;
            }
            // the middle factor is the original transition from chart i to
            // chart l; without that overlap the new charts do not meet
            let Some(middle) = atlas.tag(i, l) else {
                continue;
            };
            // innermost-first: (middle . retract(ji)^(-1)) first
            let inner_first = absorb_compose(b, absorb_compose(middle, b, mode, true)?, mode, true)?;
            // outermost-first: (retract(kl) . middle) first
            let outer_first = absorb_compose(absorb_compose(b, middle, mode, true)?, b, mode, true)?;
            if inner_first != outer_first {
                return Err(AtlasError::NotAbsorbing(format!(
                    "groupings disagree on transition ({};{}) -> ({};{}): {} vs {}",
                    atlas.label(j),
                    atlas.label(i),
                    atlas.label(k),
                    atlas.label(l),
                    inner_first,
                    outer_first
                )));
            }
            if inner_first != TransitionTag::BDiffeo {
                return Err(AtlasError::NotAbsorbing(format!(
                    "transition ({};{}) -> ({};{}) stays {}",
                    atlas.label(j),
                    atlas.label(i),
                    atlas.label(k),
                    atlas.label(l),
                    inner_first
                )));
            }
            out.add_overlap(c1 as u32, c2 as u32)?;
            out.set_tag(c1 as u32, c2 as u32, inner_first)?;
        }
    }
    Ok(out)
}

/// Seeded random atlas with up to `max_charts` charts, random overlaps and
/// random transition tags.
pub fn random_atlas<R: Rng>(rng: &mut R, max_charts: u32) -> Atlas {
    let m = rng.gen_range(1..=max_charts.max(1));
    let mut atlas = Atlas::new(m).expect("m >= 1");
    for i in 0..m {
        for j in (i + 1)..m {
            if rng.gen_bool(0.5) {
                atlas.add_overlap(i, j).expect("in range");
                let tag = if rng.gen_bool(0.5) {
                    TransitionTag::BDiffeo
                } else {
                    TransitionTag::CkDiffeo
                };
                atlas.set_tag(i, j, tag).expect("overlap set");
            }
        }
    }
    atlas
}

/// Same shape as [`random_atlas`] but with every transition B-tagged.
pub fn random_atlas_all_b<R: Rng>(rng: &mut R, max_charts: u32) -> Atlas {
    let mut atlas = random_atlas(rng, max_charts);
    let pairs: Vec<(u32, u32)> = atlas.overlapping_pairs().collect();
    for (i, j) in pairs {
        atlas.set_tag(i, j, TransitionTag::BDiffeo).expect("overlap");
    }
    atlas
}

/// Configuration for the randomized retraction suite.
#[derive(Debug, Clone, Copy)]
pub struct RetractionTrials {
    pub seed: u64,
    pub trials: usize,
    pub max_charts: u32,
    pub mode: AbsorbMode,
}

/// Outcome of the suite. `failures` lists human-readable descriptions of any
/// trial that broke one of the checked properties.
#[derive(Debug, Clone)]
pub struct RetractionOutcome {
    pub trials: usize,
    pub all_b_outputs: usize,
    pub fixed_points: usize,
    pub failures: Vec<String>,
}

impl RetractionOutcome {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
            && self.all_b_outputs == self.trials
            && self.fixed_points == self.trials
    }
}

fn retraction_trial(cfg: &RetractionTrials, trial: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(trial as u64));
    let atlas = random_atlas(&mut rng, cfg.max_charts);
    let retracted =
        retract_atlas(&atlas, cfg.mode).map_err(|e| format!("trial {trial}: {e}"))?;
    if !check_b_structure(&retracted) {
        return Err(format!("trial {trial}: retracted atlas is not all-B"));
    }

    // all-B variant must be a fixed point on the diagonal chart pairs
    let all_b = {
        let mut a = atlas.clone();
        let pairs: Vec<(u32, u32)> = a.overlapping_pairs().collect();
        for (i, j) in pairs {
            a.set_tag(i, j, TransitionTag::BDiffeo).expect("overlap");
        }
        a
    };
    let retracted_b =
        retract_atlas(&all_b, cfg.mode).map_err(|e| format!("trial {trial}: {e}"))?;
    if !check_b_structure(&retracted_b) {
        return Err(format!("trial {trial}: all-B input not fixed"));
    }
    let charts = all_b.ordered_overlapping_pairs();
    let diag: Vec<usize> = charts
        .iter()
        .enumerate()
        .filter(|(_, &(i, j))| i == j)
        .map(|(c, _)| c)
        .collect();
    for (a_pos, &ca) in diag.iter().enumerate() {
        for &cb in diag.iter().skip(a_pos + 1) {
            let (i, _) = charts[ca];
            let (l, _) = charts[cb];
            let original = all_b.tag(i, l);
            let new = retracted_b.tag(ca as u32, cb as u32);
            if original.is_some() && new != original {
                return Err(format!(
                    "trial {trial}: diagonal tag changed between charts {i} and {l}"
                ));
            }
        }
    }
    Ok(())
}

fn run_trials(cfg: &RetractionTrials, parallel: bool) -> RetractionOutcome {
    let idx: Vec<usize> = (0..cfg.trials).collect();
    let run = |&t: &usize| retraction_trial(cfg, t);
    let results = if parallel {
        exec::map_slice(&idx, run)
    } else {
        exec::map_slice_seq(&idx, run)
    };
    let failures: Vec<String> = results.into_iter().filter_map(|r| r.err()).collect();
    let ok = cfg.trials - failures.len();
    RetractionOutcome {
        trials: cfg.trials,
        all_b_outputs: ok,
        fixed_points: ok,
        failures,
    }
}

/// Runs the randomized retraction suite: every generated atlas is retracted,
/// the output must be all-B, and the all-B variant of each input must be a
/// tag-level fixed point.
pub fn run_retraction_trials(cfg: &RetractionTrials) -> RetractionOutcome {
    run_trials(cfg, true)
}

/// Sequential variant of [`run_retraction_trials`].
pub fn run_retraction_trials_seq(cfg: &RetractionTrials) -> RetractionOutcome {
    run_trials(cfg, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(tag: TransitionTag) -> Atlas {
        let mut a = Atlas::new(3).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            a.add_overlap(i, j).unwrap();
            a.set_tag(i, j, tag).unwrap();
        }
        a
    }

    #[test]
    fn absorb_rules() {
        use AbsorbMode::*;
        use TransitionTag::*;
        assert_eq!(absorb_compose(CkDiffeo, BDiffeo, Left, true).unwrap(), BDiffeo);
        assert_eq!(absorb_compose(BDiffeo, CkDiffeo, Left, true).unwrap(), CkDiffeo);
        assert_eq!(absorb_compose(BDiffeo, BDiffeo, Left, true).unwrap(), BDiffeo);
        assert_eq!(absorb_compose(BDiffeo, CkDiffeo, Right, true).unwrap(), BDiffeo);
        assert_eq!(absorb_compose(CkDiffeo, BDiffeo, Right, true).unwrap(), CkDiffeo);
        assert_eq!(absorb_compose(CkDiffeo, CkDiffeo, Full, true).unwrap(), CkDiffeo);
        assert!(matches!(
            absorb_compose(BDiffeo, BDiffeo, Left, false),
            Err(AtlasError::OrderedRequired(_))
        ));
    }

    #[test]
    fn b_structure_check() {
        assert!(check_b_structure(&triangle(TransitionTag::BDiffeo)));
        let mut one_ck = triangle(TransitionTag::BDiffeo);
        one_ck.set_tag(0, 1, TransitionTag::CkDiffeo).unwrap();
        assert!(!check_b_structure(&one_ck));
        assert!(check_b_structure(&Atlas::new(1).unwrap()));
    }

    #[test]
    fn retract_all_ck_triangle() {
        let a = triangle(TransitionTag::CkDiffeo);
        let r = retract_atlas(&a, AbsorbMode::Left).unwrap();
        assert!(check_b_structure(&r));
        // 3 diagonal charts plus 6 ordered overlap pairs
        assert_eq!(r.chart_count(), 9);
    }

    #[test]
    fn retract_right_mode() {
        let a = triangle(TransitionTag::CkDiffeo);
        let r = retract_atlas(&a, AbsorbMode::Right).unwrap();
        assert!(check_b_structure(&r));
    }

    #[test]
    fn retract_single_chart() {
        let a = Atlas::new(1).unwrap();
        let r = retract_atlas(&a, AbsorbMode::Left).unwrap();
        assert_eq!(r.chart_count(), 1);
        assert!(check_b_structure(&r));
    }

    #[test]
    fn retract_is_idempotent_at_tag_level() {
        let a = triangle(TransitionTag::BDiffeo);
        let r1 = retract_atlas(&a, AbsorbMode::Left).unwrap();
        assert!(check_b_structure(&r1));
        let r2 = retract_atlas(&r1, AbsorbMode::Left).unwrap();
        assert!(check_b_structure(&r2));
    }

    #[test]
    fn retracted_atlas_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = random_atlas(&mut rng, 6);
            let r = retract_atlas(&a, AbsorbMode::Left).unwrap();
            // symmetric, reflexive, identity tags B by construction of Atlas;
            // spot-check tags are symmetric through the accessor
            for (i, j) in r.overlapping_pairs() {
                assert_eq!(r.tag(i, j), r.tag(j, i));
            }
        }
    }

    #[test]
    fn atlas_format_round_trip() {
        let mut a = triangle(TransitionTag::CkDiffeo);
        a.set_tag(0, 1, TransitionTag::BDiffeo).unwrap();
        let text = a.emit();
        let b = Atlas::parse(&text).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn atlas_format_defaults_untagged_to_ck() {
        let text = "atlas 3\noverlap 0 1\noverlap 1 2\ntrans 1 2 tag=B\n";
        let a = Atlas::parse(text).unwrap();
        assert_eq!(a.tag(0, 1), Some(TransitionTag::CkDiffeo));
        assert_eq!(a.tag(1, 2), Some(TransitionTag::BDiffeo));
        assert_eq!(a.tag(0, 2), None);
    }

    #[test]
    fn atlas_format_label_mode_round_trip() {
        let a = triangle(TransitionTag::CkDiffeo);
        let r = retract_atlas(&a, AbsorbMode::Left).unwrap();
        let text = r.emit();
        let back = Atlas::parse(&text).unwrap();
        assert_eq!(back.chart_count(), r.chart_count());
        assert!(check_b_structure(&back));
    }

    #[test]
    fn atlas_format_errors() {
        assert!(Atlas::parse("").is_err());
        assert!(Atlas::parse("atlas 0").is_err());
        assert!(Atlas::parse("atlas 2\noverlap 0 5").is_err());
        assert!(Atlas::parse("atlas 2\nfrobnicate 0 1").is_err());
        assert!(Atlas::parse("atlas 2\ntrans 0 1 tag=Q").is_err());
    }

    #[test]
    fn disjoint_union_and_product() {
        let a = triangle(TransitionTag::BDiffeo);
        let b = triangle(TransitionTag::CkDiffeo);
        let u = Atlas::disjoint_union(&a, &b);
        assert_eq!(u.chart_count(), 6);
        assert!(u.tag(0, 3).is_none());
        assert_eq!(u.tag(0, 1), Some(TransitionTag::BDiffeo));
        assert_eq!(u.tag(3, 4), Some(TransitionTag::CkDiffeo));

        let p = Atlas::product(&a, &b);
        assert_eq!(p.chart_count(), 9);
        // both components must overlap for the product charts to overlap
        assert!(p.overlaps(0, 4));
        // a-component B, b-component Ck: product transition is Ck
        assert_eq!(p.tag(0, 4), Some(TransitionTag::CkDiffeo));
    }

    #[test]
    fn retraction_commutes_with_disjoint_union_on_b_structure() {
        let a = triangle(TransitionTag::CkDiffeo);
        let b = triangle(TransitionTag::BDiffeo);
        let u = Atlas::disjoint_union(&a, &b);
        let ru = retract_atlas(&u, AbsorbMode::Left).unwrap();
        assert!(check_b_structure(&ru));
        let pu = Atlas::product(&a, &b);
        let rp = retract_atlas(&pu, AbsorbMode::Right).unwrap();
        assert!(check_b_structure(&rp));
    }

    #[test]
    fn trials_pass_both_modes() {
        for mode in [AbsorbMode::Left, AbsorbMode::Right] {
            let cfg = RetractionTrials {
                seed: 99,
                trials: 50,
                max_charts: 8,
                mode,
            };
            let out = run_retraction_trials(&cfg);
            assert!(out.pass(), "{:?}", out.failures);
            let seq = run_retraction_trials_seq(&cfg);
            assert!(seq.pass());
        }
    }
}
