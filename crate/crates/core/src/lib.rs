//! Exact index calculus for graded function-space families.
//!
//! The crate has two halves. The symbolic half works in exact rational
//! arithmetic: extended-rational indices with the pointwise-product and
//! convolution exponent rules, constructors for the standard graded families,
//! the set-partition calculus that grades higher-order chain rules, a small
//! declarative language for inferring the class of an annotated expression,
//! and finite chart atlases with regularity-tagged transitions together with
//! the retraction and adjunction checks built on them. The numerical half is
//! an oracle: closed-form 1-D functions with exact symbolic derivatives and
//! quadrature-based norms, used to spot-check the symbolic rules against
//! actual integrals.
//!
//! Heavy loops (law cubes, random-atlas trials, inequality suites) run on
//! rayon by default; build with `--no-default-features` for the sequential
//! fallback. `benches/parallel.rs` compares the two paths.

mod exec;

pub mod atlas;
pub mod compose;
pub mod families;
pub mod index;
pub mod infer;
pub mod oracle;

pub use index::{ExtIndex, GammaRange, Grading, IndexError, IndexFn, LawReport};
