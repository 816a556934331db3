//! Committee selection under s-Borda scores: exact scoring, greedy, Banzhaf and
//! LP-rounding rules, adversarial instance generators, and invariant checks.

pub mod diagnostics;
pub mod error;
pub mod gen;
pub mod io;
pub mod lp;
pub mod profile;
pub mod score;
pub mod rules;
pub mod scoring;

mod kernel;

pub use error::{Error, Result};
pub use profile::*;
pub use score::{Arithmetic, Score};
pub use scoring::*;
pub use rules::*;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/scores.md")]
    mod scores {}
    #[doc = include_str!("../../../book/src/rules.md")]
    mod rules {}
    #[doc = include_str!("../../../book/src/symmetric.md")]
    mod symmetric {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
    #[doc = include_str!("../../../book/src/lp.md")]
    mod lp {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
