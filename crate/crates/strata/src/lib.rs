//! A rewriting kernel for diagrams in quasistrict higher categories.
//!
//! [`signature`] holds generating cells, [`diagram`] the recursive diagram
//! values with slicing and rewriting, [`compose`] their composition, and
//! [`homotopy`] the interchanger moves. [`proofdoc`] serializes and checks
//! proof scripts and [`render`] draws 2-projections.

pub mod compose;
pub mod diagram;
pub mod homotopy;
pub mod metatheory;
pub mod movecheck;
pub mod proofdoc;
pub mod random;
pub mod render;
pub mod scenarios;
pub mod signature;

pub use compose::{compose, identity_diagram, inclusion, inclusion_rev, ComposeError};
pub use diagram::{Diagram, DiagramError, Embedding, Entry, Side};
pub use signature::{Generator, GeneratorId, Signature, SignatureError, Witness};
