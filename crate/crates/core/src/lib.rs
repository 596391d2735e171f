//! Morphological analysis and corpus search workbench for Turkish.

pub mod analyzer;
pub mod corpus;
pub mod disambiguator;
pub mod error;
pub mod features;
pub mod index;
pub mod lexicon;
pub mod morphotactics;
pub mod phonology;
pub mod search;
pub mod text;
pub mod workbench;

pub use workbench::{TagRun, Workbench};
