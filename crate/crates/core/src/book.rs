// Book chapters, compiled as doctests.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}

#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}

#[doc = include_str!("../../../book/src/zeros.md")]
pub mod zeros {}

#[doc = include_str!("../../../book/src/thermo.md")]
pub mod thermo {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/specfun.md")]
pub mod specfun {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
