//! Closed-form 1-D functions: a small expression grammar closed under exact
//! symbolic differentiation, with pointwise evaluation and compact-support
//! tracking. Bump nodes carry their derivative order so the grammar stays
//! closed under the chain rule.

use std::fmt;

use rand::Rng;

/// Expression tree over constants, the coordinate, arithmetic, integer
/// powers, `exp`, `sin`, `cos` and smooth bumps of given support.
#[derive(Debug, Clone, PartialEq)]
pub enum Func {
    Const(f64),
    X,
    Add(Box<Func>, Box<Func>),
    Mul(Box<Func>, Box<Func>),
    Pow(Box<Func>, u32),
    Exp(Box<Func>),
    Sin(Box<Func>),
    Cos(Box<Func>),
    /// `order`-th derivative of the standard mollifier scaled to `(lo, hi)`,
    /// evaluated at `inner`. Vanishes identically outside the support.
    Bump {
        lo: f64,
        hi: f64,
        order: u32,
        inner: Box<Func>,
    },
}

impl Func {
    pub fn c(v: f64) -> Func {
        Func::Const(v)
    }

    pub fn x() -> Func {
        Func::X
    }

    pub fn add(a: Func, b: Func) -> Func {
        match (a, b) {
            (Func::Const(x), Func::Const(y)) => Func::Const(x + y),
            (Func::Const(z), other) | (other, Func::Const(z)) if z == 0.0 => other,
            (a, b) => Func::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Func, b: Func) -> Func {
        match (a, b) {
            (Func::Const(x), Func::Const(y)) => Func::Const(x * y),
            (Func::Const(z), _) | (_, Func::Const(z)) if z == 0.0 => Func::Const(0.0),
            (Func::Const(o), other) | (other, Func::Const(o)) if o == 1.0 => other,
            (a, b) => Func::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Func, b: Func) -> Func {
        Func::add(a, Func::mul(Func::Const(-1.0), b))
    }

    pub fn pow(f: Func, n: u32) -> Func {
        match n {
            0 => Func::Const(1.0),
            1 => f,
            _ => match f {
                Func::Const(c) => Func::Const(c.powi(n as i32)),
                f => Func::Pow(Box::new(f), n),
            },
        }
    }

    pub fn exp(f: Func) -> Func {
        Func::Exp(Box::new(f))
    }

    pub fn sin(f: Func) -> Func {
        Func::Sin(Box::new(f))
    }

    pub fn cos(f: Func) -> Func {
        Func::Cos(Box::new(f))
    }

    /// Smooth bump supported on `(lo, hi)`.
    pub fn bump(lo: f64, hi: f64) -> Func {
        assert!(lo < hi, "bump support must be a nonempty interval");
        Func::Bump {
            lo,
            hi,
            order: 0,
            inner: Box::new(Func::X),
        }
    }

    /// One symbolic derivative.
    fn derivative1(&self) -> Func {
        match self {
            Func::Const(_) => Func::Const(0.0),
            Func::X => Func::Const(1.0),
            Func::Add(a, b) => Func::add(a.derivative1(), b.derivative1()),
            Func::Mul(a, b) => Func::add(
                Func::mul(a.derivative1(), (**b).clone()),
                Func::mul((**a).clone(), b.derivative1()),
            ),
            Func::Pow(f, n) => Func::mul(
                Func::mul(Func::Const(*n as f64), Func::pow((**f).clone(), n - 1)),
                f.derivative1(),
            ),
            Func::Exp(f) => Func::mul(Func::exp((**f).clone()), f.derivative1()),
            Func::Sin(f) => Func::mul(Func::cos((**f).clone()), f.derivative1()),
            Func::Cos(f) => Func::mul(
                Func::mul(Func::Const(-1.0), Func::sin((**f).clone())),
                f.derivative1(),
            ),
            Func::Bump { lo, hi, order, inner } => Func::mul(
                Func::Bump {
                    lo: *lo,
                    hi: *hi,
                    order: order + 1,
                    inner: inner.clone(),
                },
                inner.derivative1(),
            ),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Func::Const(c) => *c,
            Func::X => x,
            Func::Add(a, b) => a.eval(x) + b.eval(x),
            Func::Mul(a, b) => a.eval(x) * b.eval(x),
            Func::Pow(f, n) => f.eval(x).powi(*n as i32),
            Func::Exp(f) => f.eval(x).exp(),
            Func::Sin(f) => f.eval(x).sin(),
            Func::Cos(f) => f.eval(x).cos(),
            Func::Bump { lo, hi, order, inner } => {
                let u = inner.eval(x);
                let scale = 2.0 / (hi - lo);
                let t = (2.0 * u - lo - hi) / (hi - lo);
                if t.abs() >= 1.0 {
                    return 0.0;
                }
                scale.powi(*order as i32) * mollifier_deriv(*order, t)
            }
        }
    }

    /// Substitutes `self` for the coordinate of `outer`: the composite
    /// `outer(self)`.
    pub fn substitute_into(&self, outer: &Func) -> Func {
        match outer {
            Func::Const(c) => Func::Const(*c),
            Func::X => self.clone(),
            Func::Add(a, b) => Func::add(self.substitute_into(a), self.substitute_into(b)),
            Func::Mul(a, b) => Func::mul(self.substitute_into(a), self.substitute_into(b)),
            Func::Pow(f, n) => Func::pow(self.substitute_into(f), *n),
            Func::Exp(f) => Func::exp(self.substitute_into(f)),
            Func::Sin(f) => Func::sin(self.substitute_into(f)),
            Func::Cos(f) => Func::cos(self.substitute_into(f)),
            Func::Bump { lo, hi, order, inner } => Func::Bump {
                lo: *lo,
                hi: *hi,
                order: *order,
                inner: Box::new(self.substitute_into(inner)),
            },
        }
    }

    /// Interval known to contain the support, when one exists. `None` means
    /// the function may be nonzero arbitrarily far out.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Func::Const(c) => {
                if *c == 0.0 {
                    Some((0.0, 0.0))
                } else {
                    None
                }
            }
            Func::X => None,
            Func::Add(a, b) => match (a.support(), b.support()) {
                (Some((al, ah)), Some((bl, bh))) => Some((al.min(bl), ah.max(bh))),
                _ => None,
            },
            Func::Mul(a, b) => match (a.support(), b.support()) {
                (Some((al, ah)), Some((bl, bh))) => {
                    let lo = al.max(bl);
                    let hi = ah.min(bh);
                    Some(if lo <= hi { (lo, hi) } else { (0.0, 0.0) })
                }
                (Some(s), None) | (None, Some(s)) => Some(s),
                (None, None) => None,
            },
            Func::Pow(f, n) => {
                if *n == 0 {
                    None
                } else {
                    f.support()
                }
            }
            Func::Exp(_) | Func::Sin(_) | Func::Cos(_) => None,
            Func::Bump { lo, hi, inner, .. } => {
                if matches!(**inner, Func::X) {
                    Some((*lo, *hi))
                } else {
                    None
                }
            }
        }
    }

    /// Whether the tree uses only polynomial nodes.
    pub fn is_polynomial(&self) -> bool {
        match self {
            Func::Const(_) | Func::X => true,
            Func::Add(a, b) | Func::Mul(a, b) => a.is_polynomial() && b.is_polynomial(),
            Func::Pow(f, _) => f.is_polynomial(),
            _ => false,
        }
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Func::Const(c) => write!(f, "{c}"),
            Func::X => write!(f, "x"),
            Func::Add(a, b) => write!(f, "({a} + {b})"),
            Func::Mul(a, b) => write!(f, "({a} * {b})"),
            Func::Pow(g, n) => write!(f, "{g}^{n}"),
            Func::Exp(g) => write!(f, "exp({g})"),
            Func::Sin(g) => write!(f, "sin({g})"),
            Func::Cos(g) => write!(f, "cos({g})"),
            Func::Bump { lo, hi, order, inner } => {
                write!(f, "bump[{lo},{hi}]^({order})({inner})")
            }
        }
    }
}

/// Exact `order`-th symbolic derivative; order 0 returns the function itself.
pub fn derivative(f: &Func, order: u32) -> Func {
    let mut cur = f.clone();
    for _ in 0..order {
        cur = cur.derivative1();
    }
    cur
}

/// The composite `g(f(x))` as an expression tree.
pub fn compose(g: &Func, f: &Func) -> Func {
    f.substitute_into(g)
}

/// `m`-th derivative of `t -> exp(-1/(1-t^2))` at `|t| < 1`, via the
/// polynomial recurrence `N_{m+1} = N'(1-t^2)^2 + 4mtN(1-t^2) - 2tN` for the
/// numerator of the rational cofactor `N_m/(1-t^2)^{2m}`.
fn mollifier_deriv(m: u32, t: f64) -> f64 {
    let base = (-1.0 / (1.0 - t * t)).exp();
    if m == 0 {
        return base;
    }
    // (1 - t^2) as a coefficient vector, ascending powers
    let one_minus_t2 = vec![1.0, 0.0, -1.0];
    let mut n_poly = vec![1.0f64];
    for k in 0..m {
        let deriv = poly_deriv(&n_poly);
        let part1 = poly_mul(&poly_mul(&deriv, &one_minus_t2), &one_minus_t2);
        let part2 = poly_mul(
            &poly_scale(&poly_mul(&n_poly, &one_minus_t2), 4.0 * k as f64),
            &[0.0, 1.0],
        );
        let part3 = poly_scale(&poly_mul(&n_poly, &[0.0, 1.0]), -2.0);
        n_poly = poly_add(&poly_add(&part1, &part2), &part3);
    }
    let denom = (1.0 - t * t).powi(2 * m as i32);
    base * poly_eval(&n_poly, t) / denom
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ca) in a.iter().enumerate() {
        for (j, &cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    out
}

fn poly_scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|&c| c * s).collect()
}

fn poly_deriv(a: &[f64]) -> Vec<f64> {
    if a.len() <= 1 {
        return vec![0.0];
    }
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

fn poly_eval(a: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for &c in a.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

/// Random dense polynomial of degree up to `max_deg` with small integer
/// coefficients.
pub fn random_polynomial<R: Rng>(rng: &mut R, max_deg: u32) -> Func {
    let deg = rng.gen_range(1..=max_deg);
    let mut acc = Func::Const(rng.gen_range(-3i32..=3) as f64);
    for d in 1..=deg {
        let coeff = rng.gen_range(-3i32..=3) as f64;
        if coeff != 0.0 {
            acc = Func::add(acc, Func::mul(Func::Const(coeff), Func::pow(Func::x(), d)));
        }
    }
    // guarantee the degree term so the polynomial is never constant
    Func::add(acc, Func::pow(Func::x(), deg))
}

/// Random smooth expression mixing polynomials with `exp`, `sin`, `cos` at
/// bounded depth and bounded coefficients.
pub fn random_smooth<R: Rng>(rng: &mut R, depth: u32) -> Func {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => Func::x(),
            1 => Func::Const(rng.gen_range(-2i32..=2) as f64),
            _ => Func::mul(Func::Const(rng.gen_range(1i32..=2) as f64), Func::x()),
        };
    }
    match rng.gen_range(0..6) {
        0 => Func::add(random_smooth(rng, depth - 1), random_smooth(rng, depth - 1)),
        1 => Func::mul(random_smooth(rng, depth - 1), random_smooth(rng, depth - 1)),
        2 => Func::sin(random_smooth(rng, depth - 1)),
        3 => Func::cos(random_smooth(rng, depth - 1)),
        // keep exponents tame: exp of a scaled coordinate only
        4 => Func::exp(Func::mul(
            Func::Const(rng.gen_range(-1i32..=1) as f64 * 0.5),
            Func::x(),
        )),
        _ => Func::pow(random_smooth(rng, depth - 1), rng.gen_range(1..=2)),
    }
}

/// Random compactly supported function: a bump times a small polynomial.
pub fn random_compact<R: Rng>(rng: &mut R) -> Func {
    let lo = rng.gen_range(-2.0f64..0.0);
    let hi = lo + rng.gen_range(0.5f64..2.5);
    let scale = rng.gen_range(1i32..=4) as f64;
    let f = Func::mul(Func::Const(scale), Func::bump(lo, hi));
    if rng.gen_bool(0.5) {
        Func::mul(f, random_polynomial(rng, 2))
    } else {
        f
    }
}
