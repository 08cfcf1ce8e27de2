pub mod action;
pub mod classify;
pub mod doc;
pub mod error;
pub mod gallery;
pub mod magma;
pub mod point;
pub mod report;

pub use action::{Action, SemidirectProduct};
pub use classify::{EquivalenceClass, SearchLimits};
pub use error::{Error, Result};
pub use magma::{ElementMap, FiniteMagma, StructureFlags};
pub use point::RetractionPoint;
pub use report::{Outcome, ValidationReport, Violation};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/magmas.md")]
    mod magmas {}
    #[doc = include_str!("../../../book/src/points.md")]
    mod points {}
    #[doc = include_str!("../../../book/src/actions.md")]
    mod actions {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/gallery.md")]
    mod gallery {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
