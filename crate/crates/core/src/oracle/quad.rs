//! Composite Simpson quadrature with interval halving, and the norm
//! computations built on it. Norms over the whole line either restrict to a
//! known compact support or probe growing truncations, reporting divergence
//! when the truncated values keep growing.

use crate::index::ExtIndex;
use crate::oracle::{Func, OracleError};

/// Quadrature configuration: composite Simpson with interval halving.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureCfg {
    pub rel_tol: f64,
    pub max_depth: u32,
    /// Absolute floor for integrals that are genuinely (near) zero.
    pub abs_floor: f64,
}

impl Default for QuadratureCfg {
    fn default() -> Self {
        QuadratureCfg {
            rel_tol: 1e-8,
            max_depth: 24,
            abs_floor: 1e-12,
        }
    }
}

impl QuadratureCfg {
    /// A cheaper preset for nested integrals (convolutions).
    pub fn nested() -> Self {
        QuadratureCfg {
            rel_tol: 1e-9,
            max_depth: 14,
            abs_floor: 1e-12,
        }
    }
}

/// A value with the error estimate taken from the final two refinement
/// levels.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Integration domain.
#[derive(Debug, Clone, Copy)]
pub enum Interval {
    Bounded(f64, f64),
    WholeLine,
}

/// Outcome of a norm computation: a finite estimate, or detected divergence
/// under growing truncations.
#[derive(Debug, Clone, Copy)]
pub enum NormValue {
    Finite(Estimate),
    Divergent,
}

impl NormValue {
    pub fn finite(&self) -> Option<Estimate> {
        match self {
            NormValue::Finite(e) => Some(*e),
            NormValue::Divergent => None,
        }
    }
}

/// Composite Simpson on `[a, b]`: trapezoid refinements with Richardson
/// extrapolation, converging when two successive Simpson levels agree to the
/// relative tolerance.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureCfg,
) -> Result<Estimate, OracleError> {
    if !(a < b) {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let mut n = 1usize;
    let mut trap = (b - a) * 0.5 * (f(a) + f(b));
    let mut prev_simpson: Option<f64> = None;
    for _ in 0..cfg.max_depth {
        let h = (b - a) / n as f64;
        let mut mid_sum = 0.0;
        for k in 0..n {
            mid_sum += f(a + (k as f64 + 0.5) * h);
        }
        let trap_next = 0.5 * trap + 0.5 * h * mid_sum;
        let simpson = (4.0 * trap_next - trap) / 3.0;
        if let Some(prev) = prev_simpson {
            let err = (simpson - prev).abs();
            if err <= cfg.rel_tol * simpson.abs() || err <= cfg.abs_floor {
                return Ok(Estimate { value: simpson, error: err });
            }
        }
        prev_simpson = Some(simpson);
        trap = trap_next;
        n *= 2;
    }
    Err(OracleError::NonConvergent(format!(
        "integral on [{a}, {b}] did not settle within depth {}",
        cfg.max_depth
    )))
}

fn sup_on_grid(f: &Func, a: f64, b: f64, points: usize) -> f64 {
    let mut sup = 0.0f64;
    for k in 0..points {
        let x = a + (b - a) * k as f64 / (points - 1) as f64;
        sup = sup.max(f.eval(x).abs());
    }
    sup
}

fn sup_norm(f: &Func, a: f64, b: f64) -> Estimate {
    // 4097-point grid with one refinement check against the 2049-point grid
    let coarse = sup_on_grid(f, a, b, 2049);
    let fine = sup_on_grid(f, a, b, 4097);
    Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    }
}

fn bounded_lp(f: &Func, p: ExtIndex, a: f64, b: f64, cfg: &QuadratureCfg) -> Result<Estimate, OracleError> {
    if p.is_inf() {
        return Ok(sup_norm(f, a, b));
    }
    let pf = p.to_f64();
    if pf <= 0.0 {
        return Err(OracleError::Domain(format!("norm exponent must be positive, got {p}")));
    }
    let integral = integrate(|x| f.eval(x).abs().powf(pf), a, b, cfg)?;
    let value = integral.value.max(0.0).powf(1.0 / pf);
    // first-order propagation of the integral error through the 1/p power
    let error = if integral.value > 0.0 {
        integral.error / (pf * integral.value) * value
    } else {
        integral.error.powf(1.0 / pf)
    };
    Ok(Estimate { value, error })
}

/// `L^p` norm of `f` on an interval. On the whole line a known compact
/// support restricts the domain; otherwise truncations `[-2^j, 2^j]` are
/// probed and persistent growth is reported as [`NormValue::Divergent`].
pub fn lp_norm(
    f: &Func,
    p: ExtIndex,
    interval: Interval,
    cfg: &QuadratureCfg,
) -> Result<NormValue, OracleError> {
    match interval {
        Interval::Bounded(a, b) => Ok(NormValue::Finite(bounded_lp(f, p, a, b, cfg)?)),
        Interval::WholeLine => {
            if let Some((lo, hi)) = f.support() {
                if lo >= hi {
                    return Ok(NormValue::Finite(Estimate { value: 0.0, error: 0.0 }));
                }
                return Ok(NormValue::Finite(bounded_lp(f, p, lo, hi, cfg)?));
            }
            let mut prev: Option<f64> = None;
            let mut growth_streak = 0u32;
            for j in 0..=16u32 {
                let half = (1u64 << j) as f64;
                let est = bounded_lp(f, p, -half, half, cfg)?;
                if let Some(pv) = prev {
                    let delta = (est.value - pv).abs();
                    if delta <= cfg.rel_tol.max(1e-10) * est.value.abs().max(1.0) {
                        return Ok(NormValue::Finite(est));
                    }
                    if est.value > pv * 1.1 {
                        growth_streak += 1;
                        if growth_streak >= 3 {
                            return Ok(NormValue::Divergent);
                        }
                    } else {
                        growth_streak = 0;
                    }
                }
                prev = Some(est.value);
            }
            Err(OracleError::NonConvergent(
                "whole-line norm neither settled nor diverged".into(),
            ))
        }
    }
}

/// Convolution `(f * g)(x)` by nested quadrature. Both functions must be
/// compactly supported.
pub fn convolve_at(
    f: &Func,
    g: &Func,
    x: f64,
    cfg: &QuadratureCfg,
) -> Result<f64, OracleError> {
    let (flo, fhi) = f
        .support()
        .ok_or_else(|| OracleError::Domain("convolution needs compactly supported f".into()))?;
    let (glo, ghi) = g
        .support()
        .ok_or_else(|| OracleError::Domain("convolution needs compactly supported g".into()))?;
    // integrand f(t) g(x - t) vanishes unless t is in supp f and x - t in supp g
    let lo = flo.max(x - ghi);
    let hi = fhi.min(x - glo);
    if lo >= hi {
        return Ok(0.0);
    }
    Ok(integrate(|t| f.eval(t) * g.eval(x - t), lo, hi, cfg)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureCfg {
        QuadratureCfg::default()
    }

    #[test]
    fn constant_has_unit_norm_on_unit_interval() {
        let one = Func::c(1.0);
        for p in [ExtIndex::one(), ExtIndex::int(2), ExtIndex::int(7)] {
            let n = lp_norm(&one, p, Interval::Bounded(0.0, 1.0), &cfg())
                .unwrap()
                .finite()
                .unwrap();
            assert!((n.value - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn l2_norm_of_x_on_unit_interval() {
        let n = lp_norm(&Func::x(), ExtIndex::int(2), Interval::Bounded(0.0, 1.0), &cfg())
            .unwrap()
            .finite()
            .unwrap();
        assert!((n.value - 1.0 / 3.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn sup_norm_of_x_on_unit_interval() {
        let n = lp_norm(&Func::x(), ExtIndex::Inf, Interval::Bounded(0.0, 1.0), &cfg())
            .unwrap()
            .finite()
            .unwrap();
        assert!((n.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_is_not_square_integrable_on_the_line() {
        let v = lp_norm(&Func::x(), ExtIndex::int(2), Interval::WholeLine, &cfg()).unwrap();
        assert!(matches!(v, NormValue::Divergent));
    }

    #[test]
    fn compact_support_restricts_whole_line() {
        let b = Func::bump(-1.0, 1.0);
        let v = lp_norm(&b, ExtIndex::one(), Interval::WholeLine, &cfg())
            .unwrap()
            .finite()
            .unwrap();
        assert!(v.value > 0.0 && v.value < 1.0);
    }

    #[test]
    fn norm_is_absolutely_homogeneous() {
        let f = Func::mul(Func::c(-2.5), Func::bump(0.0, 2.0));
        let base = Func::bump(0.0, 2.0);
        for p in [ExtIndex::one(), ExtIndex::int(3), ExtIndex::Inf] {
            let a = lp_norm(&f, p, Interval::Bounded(0.0, 2.0), &cfg())
                .unwrap()
                .finite()
                .unwrap();
            let b = lp_norm(&base, p, Interval::Bounded(0.0, 2.0), &cfg())
                .unwrap()
                .finite()
                .unwrap();
            assert!((a.value - 2.5 * b.value).abs() < 1e-7, "p = {p}");
        }
    }

    #[test]
    fn convolution_of_disjoint_points_is_zero() {
        let f = Func::bump(0.0, 1.0);
        let g = Func::bump(0.0, 1.0);
        assert_eq!(convolve_at(&f, &g, 5.0, &cfg()).unwrap(), 0.0);
        assert!(convolve_at(&f, &g, 1.0, &cfg()).unwrap() > 0.0);
    }
}
