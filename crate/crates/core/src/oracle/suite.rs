//! Seeded randomized verification suites with machine-readable line output
//! (`SUITE CASE verdict lhs rhs tol`). Cases are generated independently per
//! index, so the suites parallelize without changing output order.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exec;
use crate::families::{make_lp_holder_family, HolderMode};
use crate::index::{ExtIndex, GammaRange, Grading};
use crate::oracle::{
    derivative, random_compact, random_polynomial, random_smooth, rel_dev, verify_faa_di_bruno,
    verify_holder, verify_membership, verify_young, Func, Interval, OracleError, QuadratureCfg,
    INEQ_TOL,
};

/// Seed and size of a randomized suite.
#[derive(Debug, Clone, Copy)]
pub struct TrialCfg {
    pub seed: u64,
    pub trials: usize,
}

impl Default for TrialCfg {
    fn default() -> Self {
        TrialCfg { seed: 42, trials: 100 }
    }
}

/// One machine-readable result line.
#[derive(Debug, Clone)]
pub struct SuiteLine {
    pub suite: &'static str,
    pub case: String,
    pub pass: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
}

impl fmt::Display for SuiteLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {:.11e} {:.11e} {:e}",
            self.suite,
            self.case,
            if self.pass { "pass" } else { "fail" },
            self.lhs,
            self.rhs,
            self.tol
        )
    }
}

fn holder_exponents<R: Rng>(rng: &mut R) -> (ExtIndex, ExtIndex) {
    let pool = [
        ExtIndex::one(),
        ExtIndex::ratio(3, 2).unwrap(),
        ExtIndex::int(2),
        ExtIndex::ratio(5, 2).unwrap(),
        ExtIndex::int(3),
        ExtIndex::int(4),
        ExtIndex::int(6),
        ExtIndex::Inf,
    ];
    (*pool.choose(rng).unwrap(), *pool.choose(rng).unwrap())
}

fn young_exponents<R: Rng>(rng: &mut R) -> (ExtIndex, ExtIndex) {
    let pool = [
        (ExtIndex::one(), ExtIndex::one()),
        (ExtIndex::one(), ExtIndex::int(2)),
        (ExtIndex::int(2), ExtIndex::one()),
        (ExtIndex::one(), ExtIndex::int(3)),
        (ExtIndex::int(3), ExtIndex::one()),
        (ExtIndex::int(2), ExtIndex::int(2)),
        (ExtIndex::one(), ExtIndex::Inf),
        (ExtIndex::ratio(3, 2).unwrap(), ExtIndex::ratio(3, 2).unwrap()),
    ];
    *pool.choose(rng).unwrap()
}

fn compact_pair(seed: u64, case: usize) -> (Func, Func, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(case as u64));
    let f = random_compact(&mut rng);
    let g = random_compact(&mut rng);
    (f, g, rng)
}

fn hull(f: &Func, g: &Func) -> Interval {
    match (f.support(), g.support()) {
        (Some((a, b)), Some((c, d))) => Interval::Bounded(a.min(c) - 0.5, b.max(d) + 0.5),
        _ => Interval::WholeLine,
    }
}

fn holder_case(seed: u64, case: usize, cfg: &QuadratureCfg) -> Result<SuiteLine, OracleError> {
    let (f, g, mut rng) = compact_pair(seed, case);
    let (p, q) = holder_exponents(&mut rng);
    let report = verify_holder(&f, &g, p, q, hull(&f, &g), cfg)?;
    Ok(SuiteLine {
        suite: "holder",
        case: format!("{case:03}"),
        pass: report.pass(),
        lhs: report.lhs,
        rhs: report.rhs,
        tol: report.tol,
    })
}

fn young_case(seed: u64, case: usize, cfg: &QuadratureCfg) -> Result<SuiteLine, OracleError> {
    let (f, g, mut rng) = compact_pair(seed, case);
    let (i, j) = young_exponents(&mut rng);
    let report = verify_young(&f, &g, i, j, cfg)?;
    Ok(SuiteLine {
        suite: "young",
        case: format!("{case:03}"),
        pass: report.pass(),
        lhs: report.lhs,
        rhs: report.rhs,
        tol: report.tol,
    })
}

/// Product-inequality suite: the exact equality case first, then seeded
/// random compactly supported pairs.
pub fn holder_suite(cfg: &TrialCfg, quad: &QuadratureCfg) -> Result<Vec<SuiteLine>, OracleError> {
    let mut lines = Vec::with_capacity(cfg.trials + 1);
    let x = Func::x();
    let eq = verify_holder(
        &x,
        &x,
        ExtIndex::int(2),
        ExtIndex::int(2),
        Interval::Bounded(0.0, 1.0),
        quad,
    )?;
    lines.push(SuiteLine {
        suite: "holder",
        case: "equality".into(),
        pass: eq.pass() && rel_dev(eq.lhs, 1.0 / 3.0) < 1e-9 && rel_dev(eq.rhs, 1.0 / 3.0) < 1e-9,
        lhs: eq.lhs,
        rhs: eq.rhs,
        tol: 1e-9,
    });
    for case in 0..cfg.trials {
        lines.push(holder_case(cfg.seed, case, quad)?);
    }
    Ok(lines)
}

/// Convolution-inequality suite: the nonnegative equality case first, then
/// seeded random pairs at valid exponents.
pub fn young_suite(cfg: &TrialCfg, quad: &QuadratureCfg) -> Result<Vec<SuiteLine>, OracleError> {
    let mut lines = Vec::with_capacity(cfg.trials + 1);
    let b = Func::bump(0.0, 1.0);
    let eq = verify_young(&b, &b, ExtIndex::one(), ExtIndex::one(), quad)?;
    lines.push(SuiteLine {
        suite: "young",
        case: "equality".into(),
        pass: eq.pass() && rel_dev(eq.lhs, eq.rhs) < 1e-6,
        lhs: eq.lhs,
        rhs: eq.rhs,
        tol: 1e-6,
    });
    for case in 0..cfg.trials {
        lines.push(young_case(cfg.seed, case, quad)?);
    }
    Ok(lines)
}

/// Combined inequality trials: each case checks one random pair against both
/// the product and the convolution inequality. This is the data-parallel
/// kernel of the oracle.
pub fn inequality_trials(
    cfg: &TrialCfg,
    quad: &QuadratureCfg,
) -> Result<Vec<SuiteLine>, OracleError> {
    run_inequality_trials(cfg, quad, true)
}

/// Sequential variant of [`inequality_trials`].
pub fn inequality_trials_seq(
    cfg: &TrialCfg,
    quad: &QuadratureCfg,
) -> Result<Vec<SuiteLine>, OracleError> {
    run_inequality_trials(cfg, quad, false)
}

fn run_inequality_trials(
    cfg: &TrialCfg,
    quad: &QuadratureCfg,
    parallel: bool,
) -> Result<Vec<SuiteLine>, OracleError> {
    let indices: Vec<usize> = (0..cfg.trials).collect();
    let run = |&case: &usize| -> Result<Vec<SuiteLine>, OracleError> {
        Ok(vec![
            holder_case(cfg.seed, case, quad)?,
            young_case(cfg.seed, case, quad)?,
        ])
    };
    let chunks = if parallel {
        exec::map_slice(&indices, run)
    } else {
        exec::map_slice_seq(&indices, run)
    };
    let mut lines = Vec::with_capacity(cfg.trials * 2);
    for chunk in chunks {
        lines.extend(chunk?);
    }
    Ok(lines)
}

/// Chain-rule suite: the hand-checked square-of-cube case, seeded random
/// polynomial pairs at orders up to 4, and transcendental pairs checked
/// against finite differences. `lhs` is the deviation from the symbolic
/// route, `rhs` the deviation from finite differences.
pub fn fdb_suite(cfg: &TrialCfg, quad: &QuadratureCfg) -> Result<Vec<SuiteLine>, OracleError> {
    let mut lines = Vec::new();
    let points = [-1.0, -0.4, 0.3, 1.0];

    let g = Func::pow(Func::x(), 2);
    let f = Func::pow(Func::x(), 3);
    let r = verify_faa_di_bruno(&f, &g, 2, &[1.0], quad)?;
    lines.push(SuiteLine {
        suite: "fdb",
        case: "square-of-cube".into(),
        pass: r.pass() && (r.points[0].partition_sum - 30.0).abs() < 1e-9,
        lhs: r.max_sym_dev(),
        rhs: r.max_fd_dev(),
        tol: r.sym_tol,
    });

    for case in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x5000 + case as u64));
        let f = random_polynomial(&mut rng, 4);
        let g = random_polynomial(&mut rng, 4);
        let order = rng.gen_range(1..=4);
        let r = verify_faa_di_bruno(&f, &g, order, &points, quad)?;
        lines.push(SuiteLine {
            suite: "fdb",
            case: format!("poly{case:03}"),
            pass: r.max_sym_dev() <= 1e-9,
            lhs: r.max_sym_dev(),
            rhs: r.max_fd_dev(),
            tol: 1e-9,
        });
    }

    let transcendental: Vec<(Func, Func, u32)> = vec![
        (Func::sin(Func::x()), Func::exp(Func::x()), 3),
        (Func::cos(Func::x()), Func::pow(Func::x(), 3), 4),
        (
            Func::add(Func::x(), Func::sin(Func::x())),
            Func::cos(Func::x()),
            2,
        ),
    ];
    for (n, (f, g, order)) in transcendental.into_iter().enumerate() {
        let r = verify_faa_di_bruno(&f, &g, order, &[0.0, 0.5], quad)?;
        lines.push(SuiteLine {
            suite: "fdb",
            case: format!("transcendental{n}"),
            pass: r.max_fd_dev() <= r.fd_tol,
            lhs: r.max_sym_dev(),
            rhs: r.max_fd_dev(),
            tol: r.fd_tol,
        });
    }
    Ok(lines)
}

/// Membership suite: canonical members and non-members. `lhs` is the observed
/// membership bit, `rhs` the expected one.
pub fn membership_suite(
    _cfg: &TrialCfg,
    quad: &QuadratureCfg,
) -> Result<Vec<SuiteLine>, OracleError> {
    let gamma = GammaRange::up_to(3).expect("static range");
    let p2 = Grading::constant(ExtIndex::int(2));
    let family = make_lp_holder_family(&p2, HolderMode::IntPart, &gamma)
        .map_err(|e| OracleError::Domain(e.to_string()))?;
    let beta = Grading::identity();

    let cases: Vec<(&str, Func, u32, bool)> = vec![
        ("bump-member", Func::bump(-1.0, 1.0), 3, true),
        ("x-not-l2-on-line", Func::x(), 2, false),
        ("zero-member", Func::c(0.0), 3, true),
    ];
    let mut lines = Vec::new();
    for (name, f, k, expected) in cases {
        let report = verify_membership(&f, &family, &p2, &beta, k, Interval::WholeLine, quad)?;
        lines.push(SuiteLine {
            suite: "membership",
            case: name.into(),
            pass: report.member == expected,
            lhs: if report.member { 1.0 } else { 0.0 },
            rhs: if expected { 1.0 } else { 0.0 },
            tol: 0.0,
        });
    }
    Ok(lines)
}
