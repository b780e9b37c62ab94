//! The book chapters, compiled as documentation so their snippets run as doctests.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}

#[doc = include_str!("../../../book/src/gases.md")]
pub mod gases {}

#[doc = include_str!("../../../book/src/reactions.md")]
pub mod reactions {}

#[doc = include_str!("../../../book/src/solutions.md")]
pub mod solutions {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
