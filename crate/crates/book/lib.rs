//! Runs the guide snippets as doc-tests.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../book/src/graphs.md")]
pub mod graphs {}
#[doc = include_str!("../../book/src/kasteleyn.md")]
pub mod kasteleyn {}
#[doc = include_str!("../../book/src/ising.md")]
pub mod ising {}
#[doc = include_str!("../../book/src/grassmann.md")]
pub mod grassmann {}
#[doc = include_str!("../../book/src/spinnet.md")]
pub mod spinnet {}
#[doc = include_str!("../../book/src/duality.md")]
pub mod duality {}
#[doc = include_str!("../../book/src/criticality.md")]
pub mod criticality {}
#[doc = include_str!("../../book/src/cli.md")]
pub mod cli {}
