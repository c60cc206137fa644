pub mod axioms;
pub mod category;
pub mod cli;
pub mod concrete;
pub mod dsl;
pub mod error;
pub mod field;
pub mod linmap;
pub mod matrix;
pub mod poly;
pub mod random;
pub mod relcalc;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub struct Intro;
    #[doc = include_str!("../../../book/src/fields.md")]
    pub struct Fields;
    #[doc = include_str!("../../../book/src/relations.md")]
    pub struct Relations;
    #[doc = include_str!("../../../book/src/morphisms.md")]
    pub struct Morphisms;
    #[doc = include_str!("../../../book/src/specialization.md")]
    pub struct Specialization;
    #[doc = include_str!("../../../book/src/terms.md")]
    pub struct Terms;
    #[doc = include_str!("../../../book/src/frobenius.md")]
    pub struct Frobenius;
    #[doc = include_str!("../../../book/src/rel_infty.md")]
    pub struct RelInfty;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
