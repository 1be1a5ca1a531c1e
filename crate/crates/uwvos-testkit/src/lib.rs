//! Shared test support for the uwvos workspace: brute-force metric oracles
//! kept deliberately independent of the library's implementation paths, and
//! synthetic on-disk dataset fixtures written through the `image` crate
//! (a second, independent PNG encoder).

pub mod fixture;
pub mod oracle;
