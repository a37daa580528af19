//! mdBook cannot compile and run the code blocks in `book/` by itself, so
//! this crate includes every chapter as a doc comment: `cargo test --doc`
//! then builds and executes each Rust snippet exactly as rustdoc doctests.
//! One module per chapter keeps failures attributable to their chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/chaotic-light.md")]
pub mod chaotic_light {}

#[doc = include_str!("../../../book/src/dispersion.md")]
pub mod dispersion {}

#[doc = include_str!("../../../book/src/correlations.md")]
pub mod correlations {}

#[doc = include_str!("../../../book/src/quadratic-law.md")]
pub mod quadratic_law {}

#[doc = include_str!("../../../book/src/quantum.md")]
pub mod quantum {}

#[doc = include_str!("../../../book/src/pulses.md")]
pub mod pulses {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
