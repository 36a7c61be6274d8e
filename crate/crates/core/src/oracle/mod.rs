//! Numerical ground truth for the symbolic calculus: exact symbolic
//! derivatives, quadrature norms, and verification of the product,
//! convolution and chain-rule inequalities the index rules encode, plus
//! jet-membership checks against a family descriptor.

mod func;
mod quad;
mod suite;

pub use func::{
    compose, derivative, random_compact, random_polynomial, random_smooth, Func,
};
pub use quad::{convolve_at, integrate, lp_norm, Estimate, Interval, NormValue, QuadratureCfg};
pub use suite::{
    fdb_suite, holder_suite, inequality_trials, inequality_trials_seq, membership_suite,
    young_suite, SuiteLine, TrialCfg,
};

use thiserror::Error;

use crate::compose::enumerate_partitions;
use crate::families::{FamilyDescriptor, FamilyKind};
use crate::index::{star_holder, star_young, ExtIndex, Grading, IndexError};

/// Slack allowed when asserting the integral inequalities numerically.
pub const INEQ_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone)]
pub enum OracleError {
    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("partition calculus: {0}")]
    Compose(String),
}

impl From<crate::compose::ComposeError> for OracleError {
    fn from(e: crate::compose::ComposeError) -> Self {
        OracleError::Compose(e.to_string())
    }
}

/// Relative deviation with an absolute floor of 1.
fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// One verified integral inequality: `lhs <= rhs + tol`.
#[derive(Debug, Clone, Copy)]
pub struct IneqReport {
    pub lhs: f64,
    pub rhs: f64,
    pub exponent: ExtIndex,
    pub exponent_below_one: bool,
    pub tol: f64,
}

impl IneqReport {
    pub fn pass(&self) -> bool {
        self.lhs <= self.rhs + self.tol
    }
}

/// Checks the product inequality: the norm of `f * g` at the product exponent
/// of `(p, q)` against the product of the factor norms. The product exponent
/// is used as computed even when it drops below 1; the report flags that.
pub fn verify_holder(
    f: &Func,
    g: &Func,
    p: ExtIndex,
    q: ExtIndex,
    interval: Interval,
    cfg: &QuadratureCfg,
) -> Result<IneqReport, OracleError> {
    let s = star_holder(p, q)?;
    let product = Func::mul(f.clone(), g.clone());
    let lhs = finite_norm(&product, s, interval, cfg)?;
    let nf = finite_norm(f, p, interval, cfg)?;
    let ng = finite_norm(g, q, interval, cfg)?;
    Ok(IneqReport {
        lhs,
        rhs: nf * ng,
        exponent: s,
        exponent_below_one: s < ExtIndex::one(),
        tol: INEQ_TOL,
    })
}

/// Checks the convolution inequality: the norm of `f * g` (convolution,
/// computed by nested quadrature) at the convolution exponent of `(i, j)`
/// against the product of the factor norms. Both inputs must be compactly
/// supported.
pub fn verify_young(
    f: &Func,
    g: &Func,
    i: ExtIndex,
    j: ExtIndex,
    cfg: &QuadratureCfg,
) -> Result<IneqReport, OracleError> {
    let r = star_young(i, j)?;
    let (flo, fhi) = f
        .support()
        .ok_or_else(|| OracleError::Domain("convolution needs compactly supported f".into()))?;
    let (glo, ghi) = g
        .support()
        .ok_or_else(|| OracleError::Domain("convolution needs compactly supported g".into()))?;
    let inner_cfg = QuadratureCfg::nested();
    let conv = |x: f64| convolve_at(f, g, x, &inner_cfg).unwrap_or(f64::NAN);
    let (lo, hi) = (flo + glo, fhi + ghi);
    let lhs = norm_of_fn(&conv, r, lo, hi, cfg)?;
    let nf = finite_norm(f, i, Interval::Bounded(flo, fhi), cfg)?;
    let ng = finite_norm(g, j, Interval::Bounded(glo, ghi), cfg)?;
    Ok(IneqReport {
        lhs,
        rhs: nf * ng,
        exponent: r,
        exponent_below_one: false,
        tol: INEQ_TOL,
    })
}

fn finite_norm(
    f: &Func,
    p: ExtIndex,
    interval: Interval,
    cfg: &QuadratureCfg,
) -> Result<f64, OracleError> {
    match lp_norm(f, p, interval, cfg)? {
        NormValue::Finite(e) => Ok(e.value),
        NormValue::Divergent => Err(OracleError::Domain(
            "norm diverges; inequality check needs finite factors".into(),
        )),
    }
}

/// Norm of a black-box function on a bounded interval.
fn norm_of_fn(
    h: &dyn Fn(f64) -> f64,
    p: ExtIndex,
    a: f64,
    b: f64,
    cfg: &QuadratureCfg,
) -> Result<f64, OracleError> {
    if p.is_inf() {
        let mut sup = 0.0f64;
        for k in 0..4097 {
            let x = a + (b - a) * k as f64 / 4096.0;
            sup = sup.max(h(x).abs());
        }
        return Ok(sup);
    }
    let pf = p.to_f64();
    let integral = integrate(|x| h(x).abs().powf(pf), a, b, cfg)?;
    Ok(integral.value.max(0.0).powf(1.0 / pf))
}

/// One evaluation point of the chain-rule comparison.
#[derive(Debug, Clone, Copy)]
pub struct FdbPoint {
    pub x: f64,
    pub partition_sum: f64,
    pub symbolic: f64,
    pub finite_difference: f64,
}

/// Chain-rule verification: the partition sum against the symbolic derivative
/// of the composite and against central finite differences.
#[derive(Debug, Clone)]
pub struct FdbReport {
    pub order: u32,
    pub term_count: usize,
    pub points: Vec<FdbPoint>,
    pub sym_tol: f64,
    pub fd_tol: f64,
}

impl FdbReport {
    pub fn max_sym_dev(&self) -> f64 {
        self.points
            .iter()
            .map(|p| rel_dev(p.partition_sum, p.symbolic))
            .fold(0.0, f64::max)
    }

    pub fn max_fd_dev(&self) -> f64 {
        self.points
            .iter()
            .map(|p| rel_dev(p.partition_sum, p.finite_difference))
            .fold(0.0, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.max_sym_dev() <= self.sym_tol && self.max_fd_dev() <= self.fd_tol
    }
}

/// Central finite difference for the `order`-th derivative with the step
/// chosen for that order.
fn central_difference(h_fn: &Func, order: u32, x: f64) -> f64 {
    let step = f64::EPSILON.powf(1.0 / (order as f64 + 2.0));
    let m = order as i64;
    let mut acc = 0.0;
    let mut binom = 1.0f64;
    for k in 0..=m {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let offset = (m as f64 / 2.0 - k as f64) * step;
        acc += sign * binom * h_fn.eval(x + offset);
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    acc / step.powi(order as i32)
}

/// Compares, at each sample point, the partition-sum form of the higher-order
/// chain rule against (a) the exact symbolic derivative of `g(f(x))` and (b)
/// a central finite difference. Polynomial pairs must agree with the
/// symbolic route to 1e-9; everything must agree with finite differences to
/// 1e-4.
pub fn verify_faa_di_bruno(
    f: &Func,
    g: &Func,
    order: u32,
    sample_points: &[f64],
    _cfg: &QuadratureCfg,
) -> Result<FdbReport, OracleError> {
    if order == 0 || order > 6 {
        return Err(OracleError::Domain(format!(
            "chain-rule check supports orders 1..=6, got {order}"
        )));
    }
    let partitions = enumerate_partitions(order)?;
    let f_derivs: Vec<Func> = (0..=order).map(|m| derivative(f, m)).collect();
    let g_derivs: Vec<Func> = (0..=order).map(|m| derivative(g, m)).collect();
    let composite = compose(g, f);
    let composite_deriv = derivative(&composite, order);

    let mut points = Vec::with_capacity(sample_points.len());
    for &x in sample_points {
        let fx = f.eval(x);
        let mut sum = 0.0;
        for part in &partitions {
            let mut term = g_derivs[part.block_count() as usize].eval(fx);
            for block in part.blocks() {
                term *= f_derivs[block.len()].eval(x);
            }
            sum += term;
        }
        points.push(FdbPoint {
            x,
            partition_sum: sum,
            symbolic: composite_deriv.eval(x),
            finite_difference: central_difference(&composite, order, x),
        });
    }
    let polynomial = f.is_polynomial() && g.is_polynomial();
    Ok(FdbReport {
        order,
        term_count: partitions.len(),
        points,
        sym_tol: if polynomial { 1e-9 } else { 1e-7 },
        fd_tol: 1e-4,
    })
}

/// Verdict for one derivative order of a membership check.
#[derive(Debug, Clone)]
pub struct OrderVerdict {
    pub order: u32,
    pub member: bool,
    pub norm: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub per_order: Vec<OrderVerdict>,
    pub member: bool,
}

/// Jet membership: for each order up to `k`, the order-th derivative must
/// have a finite norm at the grade the family assigns (sup norm for the
/// smoothness family). Grammar functions are smooth, so the continuity side
/// is automatic except at zero-space grades, which demand a vanishing
/// derivative.
pub fn verify_membership(
    f: &Func,
    family: &FamilyDescriptor,
    alpha: &Grading,
    _beta: &Grading,
    k: u32,
    interval: Interval,
    cfg: &QuadratureCfg,
) -> Result<MembershipReport, OracleError> {
    if k > 6 {
        return Err(OracleError::Domain(format!(
            "membership check supports k <= 6, got {k}"
        )));
    }
    let mut per_order = Vec::with_capacity(k as usize + 1);
    for i in 0..=k {
        let d = derivative(f, i);
        let verdict = if family.grade(i).is_zero_space() {
            // only the zero function lives in the zero space
            let sup = lp_norm(&d, ExtIndex::Inf, interval, cfg)?;
            match sup {
                NormValue::Finite(e) => OrderVerdict {
                    order: i,
                    member: e.value <= 1e-10,
                    norm: Some(e.value),
                },
                NormValue::Divergent => OrderVerdict {
                    order: i,
                    member: false,
                    norm: None,
                },
            }
        } else {
            let exponent = match family.kind() {
                FamilyKind::Ck => ExtIndex::Inf,
                _ => alpha.eval(i),
            };
            match lp_norm(&d, exponent, interval, cfg)? {
                NormValue::Finite(e) => OrderVerdict {
                    order: i,
                    member: e.value.is_finite(),
                    norm: Some(e.value),
                },
                NormValue::Divergent => OrderVerdict {
                    order: i,
                    member: false,
                    norm: None,
                },
            }
        };
        per_order.push(verdict);
    }
    let member = per_order.iter().all(|v| v.member);
    Ok(MembershipReport { per_order, member })
}
