//! Constructors and metadata for the concrete graded families: smoothness
//! families `C^{k-alpha}`, integrability families with the pointwise-product
//! or convolution exponent rule, and embedding chains driven by the iterated
//! Sobolev shift. Also the distributivity criterion that decides whether a
//! grading keeps the additive and multiplicative rules compatible.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::index::{
    star_holder, star_young, ExtIndex, GammaRange, Grading, IndexError, IndexFn, LawReport,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Bounded,
    Unbounded,
}

/// Exponent handling for the pointwise-product family: `StrictZs` insists the
/// product exponent is an integer (or infinite) and errors otherwise;
/// `IntPart` takes the integer part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HolderMode {
    StrictZs,
    IntPart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Ck,
    LpHolder(HolderMode),
    LpYoung,
    Sobolev,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::Ck => write!(f, "ck"),
            FamilyKind::LpHolder(HolderMode::StrictZs) => write!(f, "lp-holder[strict]"),
            FamilyKind::LpHolder(HolderMode::IntPart) => write!(f, "lp-holder[int]"),
            FamilyKind::LpYoung => write!(f, "lp-young"),
            FamilyKind::Sobolev => write!(f, "sobolev"),
        }
    }
}

/// A grading value: either an honest index or the zero-space sentinel (the
/// space containing only the zero vector).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grade {
    Value(ExtIndex),
    ZeroSpace,
}

impl Grade {
    pub fn value(&self) -> Option<ExtIndex> {
        match self {
            Grade::Value(v) => Some(*v),
            Grade::ZeroSpace => None,
        }
    }

    pub fn is_zero_space(&self) -> bool {
        matches!(self, Grade::ZeroSpace)
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grade::Value(v) => write!(f, "{v}"),
            Grade::ZeroSpace => write!(f, "zero"),
        }
    }
}

/// Which canonical functions belong to the family, keyed by domain kind.
/// The zero function belongs to every family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MembershipRules {
    pub contains_constants_bounded: bool,
    pub contains_constants_unbounded: bool,
    pub contains_zero: bool,
    pub contains_polynomials_on_bounded: bool,
}

impl MembershipRules {
    pub fn contains_constants(&self, dk: DomainKind) -> bool {
        match dk {
            DomainKind::Bounded => self.contains_constants_bounded,
            DomainKind::Unbounded => self.contains_constants_unbounded,
        }
    }
}

/// A two-component regularity class: integrability exponent and smoothness
/// order, read conjunctively. `Zero` is the class of the zero function space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegClass {
    Zero,
    Member { lp: ExtIndex, smooth: ExtIndex },
}

impl RegClass {
    pub fn member(lp: ExtIndex, smooth: ExtIndex) -> Self {
        RegClass::Member { lp, smooth }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RegClass::Zero)
    }
}

impl fmt::Display for RegClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegClass::Zero => write!(f, "zero"),
            RegClass::Member { lp, smooth } => write!(f, "L^{lp} \u{2229} C^{smooth}"),
        }
    }
}

type GradeMap = Arc<dyn Fn(u32) -> Grade + Send + Sync>;

/// A named graded family: its grading, the inclusion direction of the graded
/// spaces, the index pair `(eps, delta)` acting on grading values, membership
/// metadata and the domain kind it lives on.
#[derive(Clone)]
pub struct FamilyDescriptor {
    name: String,
    kind: FamilyKind,
    grading: GradeMap,
    grading_name: String,
    monotonicity: Monotonicity,
    eps: IndexFn,
    delta: IndexFn,
    membership: MembershipRules,
    domain_kind: DomainKind,
    gamma: GammaRange,
}

impl fmt::Debug for FamilyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FamilyDescriptor({})", self.name)
    }
}

impl FamilyDescriptor {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    /// Grading value at order `i` (the exponent or smoothness of the space
    /// order-`i` derivatives land in).
    pub fn grade(&self, i: u32) -> Grade {
        (self.grading)(i)
    }

    pub fn grading_name(&self) -> &str {
        &self.grading_name
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    /// Multiplicative rule on grading values.
    pub fn eps(&self) -> &IndexFn {
        &self.eps
    }

    /// Additive rule on grading values.
    pub fn delta(&self) -> &IndexFn {
        &self.delta
    }

    pub fn membership(&self) -> &MembershipRules {
        &self.membership
    }

    pub fn domain_kind(&self) -> DomainKind {
        self.domain_kind
    }

    pub fn gamma(&self) -> &GammaRange {
        &self.gamma
    }

    /// `eps` applied through the grading: the grade of a product of members of
    /// the order-`i` and order-`j` spaces. Zero-space factors absorb.
    pub fn eps_at(&self, i: u32, j: u32) -> Result<Grade, FamilyError> {
        match (self.grade(i), self.grade(j)) {
            (Grade::Value(a), Grade::Value(b)) => Ok(Grade::Value(self.eps.eval(a, b)?)),
            _ => Ok(Grade::ZeroSpace),
        }
    }

    /// `delta` applied through the grading: the grade of a sum. A zero-space
    /// summand contributes nothing, so the other grade survives.
    pub fn delta_at(&self, i: u32, j: u32) -> Result<Grade, FamilyError> {
        match (self.grade(i), self.grade(j)) {
            (Grade::Value(a), Grade::Value(b)) => Ok(Grade::Value(self.delta.eval(a, b)?)),
            (Grade::Value(a), Grade::ZeroSpace) | (Grade::ZeroSpace, Grade::Value(a)) => {
                Ok(Grade::Value(a))
            }
            (Grade::ZeroSpace, Grade::ZeroSpace) => Ok(Grade::ZeroSpace),
        }
    }
}

/// Inclusion direction of a grade sequence: weakly decreasing sequences (and
/// constants) read as `Decreasing`, strictly nondecreasing ones as
/// `Increasing`, anything else as `None`. Zero-space grades sit below every
/// value.
fn derive_monotonicity(grades: &[Grade]) -> Monotonicity {
    let le = |a: &Grade, b: &Grade| match (a, b) {
        (Grade::ZeroSpace, _) => true,
        (Grade::Value(_), Grade::ZeroSpace) => false,
        (Grade::Value(x), Grade::Value(y)) => x <= y,
    };
    let nonincreasing = grades.windows(2).all(|w| le(&w[1], &w[0]));
    if nonincreasing {
        return Monotonicity::Decreasing;
    }
    let nondecreasing = grades.windows(2).all(|w| le(&w[0], &w[1]));
    if nondecreasing {
        return Monotonicity::Increasing;
    }
    Monotonicity::None
}

/// Smoothness family graded by `i -> k - alpha(i)`, clamped to the zero space
/// once `alpha(i)` exceeds `k`. Both index rules are `min` on smoothness
/// values, which through the grading is `k - max(alpha(i), alpha(j))`.
pub fn make_ck_family(
    k: ExtIndex,
    alpha: &Grading,
    gamma: &GammaRange,
) -> Result<FamilyDescriptor, FamilyError> {
    // alpha values are ExtIndex, nonnegative by construction
    let alpha = alpha.clone();
    let alpha_for_name = alpha.name().to_string();
    let grading: GradeMap = Arc::new(move |i| {
        let a = alpha.eval(i);
        match k.sub(&a) {
            Some(v) => Grade::Value(v),
            None => Grade::ZeroSpace,
        }
    });
    let grades: Vec<Grade> = gamma.iter().map(|i| grading(i)).collect();
    Ok(FamilyDescriptor {
        name: format!("ck[k={k},alpha={alpha_for_name}]"),
        kind: FamilyKind::Ck,
        grading,
        grading_name: format!("k-{alpha_for_name}"),
        monotonicity: derive_monotonicity(&grades),
        eps: IndexFn::min(),
        delta: IndexFn::min(),
        membership: MembershipRules {
            contains_constants_bounded: true,
            contains_constants_unbounded: true,
            contains_zero: true,
            contains_polynomials_on_bounded: true,
        },
        domain_kind: DomainKind::Bounded,
        gamma: *gamma,
    })
}

fn holder_eps(mode: HolderMode) -> IndexFn {
    match mode {
        HolderMode::StrictZs => IndexFn::new("holder[strict]", |i, j| {
            let s = star_holder(i, j)?;
            if s.is_integer() || s.is_inf() {
                Ok(s)
            } else {
                Err(IndexError::NotInZs(format!(
                    "{i} + {j} does not divide {i}*{j} (product exponent {s})"
                )))
            }
        }),
        HolderMode::IntPart => IndexFn::new("holder[int]", |i, j| Ok(star_holder(i, j)?.floor())),
    }
}

/// Integrability family with the pointwise-product exponent rule. In strict
/// mode every `p(i)` must be at least 2 and product exponents must stay
/// integral; in int-part mode `p(i) >= 1` suffices and exponents are floored.
pub fn make_lp_holder_family(
    p: &Grading,
    mode: HolderMode,
    gamma: &GammaRange,
) -> Result<FamilyDescriptor, FamilyError> {
    let least = match mode {
        HolderMode::StrictZs => ExtIndex::int(2),
        HolderMode::IntPart => ExtIndex::one(),
    };
    for i in gamma.iter() {
        let v = p.eval(i);
        if v < least {
            return Err(FamilyError::Domain(format!(
                "p({i}) = {v} below the mode minimum {least}"
            )));
        }
    }
    let p = p.clone();
    let p_name = p.name().to_string();
    let pm = p.clone();
    let grading: GradeMap = Arc::new(move |i| Grade::Value(pm.eval(i)));
    let grades: Vec<Grade> = gamma.iter().map(|i| grading(i)).collect();
    Ok(FamilyDescriptor {
        name: format!("lp-holder[{:?},p={p_name}]", mode),
        kind: FamilyKind::LpHolder(mode),
        grading,
        grading_name: p_name,
        monotonicity: derive_monotonicity(&grades),
        eps: holder_eps(mode),
        delta: IndexFn::min(),
        membership: MembershipRules {
            contains_constants_bounded: true,
            contains_constants_unbounded: false,
            contains_zero: true,
            contains_polynomials_on_bounded: true,
        },
        domain_kind: DomainKind::Bounded,
        gamma: *gamma,
    })
}

/// Integrability family with the convolution exponent rule. Convolution lives
/// on the whole space, so the domain kind is unbounded.
pub fn make_lp_young_family(
    p: &Grading,
    gamma: &GammaRange,
) -> Result<FamilyDescriptor, FamilyError> {
    for i in gamma.iter() {
        let v = p.eval(i);
        if v < ExtIndex::one() {
            return Err(FamilyError::Domain(format!("p({i}) = {v} is below 1")));
        }
    }
    let p = p.clone();
    let p_name = p.name().to_string();
    let pm = p.clone();
    let grading: GradeMap = Arc::new(move |i| Grade::Value(pm.eval(i)));
    let grades: Vec<Grade> = gamma.iter().map(|i| grading(i)).collect();
    Ok(FamilyDescriptor {
        name: format!("lp-young[p={p_name}]"),
        kind: FamilyKind::LpYoung,
        grading,
        grading_name: p_name,
        monotonicity: derive_monotonicity(&grades),
        eps: IndexFn::new("young", star_young),
        delta: IndexFn::min(),
        membership: MembershipRules {
            contains_constants_bounded: true,
            contains_constants_unbounded: false,
            contains_zero: true,
            contains_polynomials_on_bounded: true,
        },
        domain_kind: DomainKind::Unbounded,
        gamma: *gamma,
    })
}

/// Embedding chain graded by the iterated shift `l(i) = r + i * n(p-q)/(pq)`,
/// floored per value and truncated at 0. Requires `p < q`.
pub fn make_sobolev_chain(
    n: u32,
    p: u32,
    q: u32,
    r: u32,
    gamma: &GammaRange,
) -> Result<FamilyDescriptor, FamilyError> {
    if p == 0 || q == 0 || n == 0 {
        return Err(FamilyError::Domain("n, p, q must be positive".into()));
    }
    if p >= q {
        return Err(FamilyError::Domain(format!(
            "embedding chain needs p < q, got p={p}, q={q}"
        )));
    }
    // per-step shift n(p-q)/(pq) is negative; iterate exactly, then floor.
    let num = (n as i128) * (p as i128 - q as i128);
    let den = (p as i128) * (q as i128);
    let grading: GradeMap = Arc::new(move |i| {
        let exact = crate::index::Rat::from_integer(r as i128)
            + crate::index::Rat::new(num * i as i128, den);
        let floored = exact.floor();
        if floored < crate::index::Rat::from_integer(0) {
            Grade::Value(ExtIndex::zero())
        } else {
            Grade::Value(ExtIndex::Finite(floored))
        }
    });
    let grades: Vec<Grade> = gamma.iter().map(|i| grading(i)).collect();
    Ok(FamilyDescriptor {
        name: format!("sobolev[n={n},p={p},q={q},r={r}]"),
        kind: FamilyKind::Sobolev,
        grading,
        grading_name: format!("l^i({r})"),
        monotonicity: derive_monotonicity(&grades),
        eps: IndexFn::min(),
        delta: IndexFn::min(),
        membership: MembershipRules {
            contains_constants_bounded: true,
            contains_constants_unbounded: false,
            contains_zero: true,
            contains_polynomials_on_bounded: true,
        },
        domain_kind: DomainKind::Bounded,
        gamma: *gamma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarKind {
    Holder,
    HolderIntPart,
    Young,
}

impl StarKind {
    fn apply(&self, a: ExtIndex, b: ExtIndex) -> Result<ExtIndex, IndexError> {
        match self {
            StarKind::Holder => star_holder(a, b),
            StarKind::HolderIntPart => Ok(star_holder(a, b)?.floor()),
            StarKind::Young => star_young(a, b),
        }
    }
}

/// Compatibility criterion between the additive rule and a star: over all
/// triples in the range, `p(j) <= p(k)` must imply
/// `p(i) star p(j) <= p(i) star p(k)`.
pub fn check_distributivity_criterion(
    p: &Grading,
    star: StarKind,
    gamma: &GammaRange,
) -> Result<LawReport, FamilyError> {
    let mut counterexamples = Vec::new();
    let mut checked = 0usize;
    for i in gamma.iter() {
        let pi = p.eval(i);
        for j in gamma.iter() {
            let pj = p.eval(j);
            for k in gamma.iter() {
                let pk = p.eval(k);
                checked += 1;
                if pj <= pk {
                    let lhs = star.apply(pi, pj)?;
                    let rhs = star.apply(pi, pk)?;
                    if lhs > rhs {
                        counterexamples.push(crate::index::Counterexample {
                            args: vec![i.to_string(), j.to_string(), k.to_string()],
                            lhs: lhs.to_string(),
                            rhs: rhs.to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(LawReport::new(
        format!("distributivity-criterion[{star:?}]"),
        counterexamples,
        checked,
    ))
}
