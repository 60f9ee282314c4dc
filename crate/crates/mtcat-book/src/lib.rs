//! The chapters of the mdbook guide (`book/src`), re-exported as module
//! documentation so that every Rust code block in the book runs as a
//! doc-test.  `cargo test -p mtcat-book` therefore keeps the book's
//! examples in sync with the `mtcat` API.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/matrices.md")]
pub mod matrices {}

#[doc = include_str!("../../../book/src/genus.md")]
pub mod genus {}

#[doc = include_str!("../../../book/src/classification.md")]
pub mod classification {}

#[doc = include_str!("../../../book/src/goursat.md")]
pub mod goursat {}

#[doc = include_str!("../../../book/src/families.md")]
pub mod families {}

#[doc = include_str!("../../../book/src/censuses.md")]
pub mod censuses {}

#[doc = include_str!("../../../book/src/lang-trotter.md")]
pub mod lang_trotter {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
