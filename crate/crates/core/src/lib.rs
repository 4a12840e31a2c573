pub mod checker;
pub mod linalg;
pub mod logic;
pub mod model;
pub mod random;
pub mod simulate;
pub mod superop;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/superoperators.md")]
    mod superoperators {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/checking.md")]
    mod checking {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
}
