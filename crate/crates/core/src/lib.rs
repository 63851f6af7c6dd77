//! Maintain zigzag persistence barcodes, pairings, and representative
//! chains while the underlying filtration is edited in place.
//!
//! A zigzag filtration ([`cellmodel::ZigzagFiltration`]) is a sequence of
//! single-simplex additions and deletions that starts and ends with the
//! empty complex.  Instead of working on that sequence directly, everything
//! here runs on its up-down counterpart ([`updown::UpDownState`]): all
//! additions first, then all deletions, with an arrow correspondence mapping
//! results back.  Barcodes are witnessed by arrow pairings carrying
//! representative chains ([`reps`]); a pairing that passes
//! [`reps::validate_pairset`] is guaranteed to encode the true barcode,
//! which makes the validator the arbiter for everything else.
//!
//! The [`oracle`] module recomputes ranks, barcodes, and pairings from
//! scratch and serves as independent ground truth; the update engine
//! maintains a pairing across local edits (arrow switches, expansions, and
//! contractions) at a cost of one or two orders of magnitude below
//! recomputation.

pub mod cellmodel;
mod error;
pub mod gen;
mod gf2;
pub mod io;
pub mod oracle;
pub mod reps;
pub mod updates;
pub mod updown;

pub use error::{Error, Result};
