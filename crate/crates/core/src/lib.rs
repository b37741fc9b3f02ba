//! Semidefinite representations of convex sets.
//!
//! A representation is a symmetric linear matrix polynomial over visible and
//! auxiliary variables ([`lmi::SemidefRepresentation`]). [`constructions`]
//! builds new representations from old ones, [`feasibility`] decides
//! membership and [`oracle`] holds independent reference checks.

pub mod constructions;
pub mod error;
pub mod feasibility;
pub mod lmi;
pub mod oracle;
pub mod symlin;

pub use error::{Error, Result};

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/pencils.md")]
    mod pencils {}
    #[doc = include_str!("../../../book/src/membership.md")]
    mod membership {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/faces.md")]
    mod faces {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
