//! Synthetic arrangement data: scene graphs realized as procedural 3D scenes, made
//! collision-free and cut into labeled placement samples.

pub mod corpus;
mod generate;
mod instantiate;
mod layout;
mod library;
mod refine;
mod sample;

pub use corpus::{
    read_corpus, read_sample, write_corpus, write_sample, CorpusManifest, ManifestEntry,
};
pub use generate::*;
pub use instantiate::*;
pub use layout::*;
pub use library::*;
pub use refine::*;
pub use sample::*;
