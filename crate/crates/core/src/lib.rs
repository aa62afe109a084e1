//! Exact tooling for weighted Fano 3-fold hypersurfaces `X_d ⊂ P(1,a1,..,a4)`:
//! singular loci, Kawamata blowup intersection numbers, exclusion of
//! maximal centres, surface resolution checks and fibration classification.

pub mod blowup;
pub mod catalog;
pub mod classify;
pub mod error;
pub mod exclusion;
pub mod generic;
pub mod singularity;
pub mod surface;
pub mod wps;
