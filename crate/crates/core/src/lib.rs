//! Arithmetic branching programs with memory.
//!
//! The crate models arithmetic circuits, arithmetic branching programs (ABPs)
//! and two memory-augmented variants: stack branching programs (SBPs), whose
//! paths only count when their push/pop labels form a well-nested sequence,
//! and random access branching programs (RABPs), whose write/delete labels
//! must balance per symbol. On top of the models it provides
//!
//! * exact evaluators (dynamic programs and bounded state exploration),
//! * brute-force enumeration oracles that realize each definition literally,
//! * the structural constructions relating the models: nop removal,
//!   unwinding of cyclic programs, circuit compilation and extraction,
//!   one-symbol collapse, width-2 reduction and logarithmic-depth circuits,
//! * the dominating-set and vertex-cover constructions for RABPs,
//! * randomized identity testing used to certify every construction.

pub mod algebra;
pub mod circuits;
pub mod depth;
pub mod evaluators;
pub mod generate;
pub mod hardness;
pub mod interchange;
pub mod programs;
pub mod transforms;

mod error;

pub use error::{Error, Result};
