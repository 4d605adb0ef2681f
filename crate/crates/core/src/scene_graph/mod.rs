//! Scene graphs: abstraction of scenes into relation-labeled trees and the genetic
//! operators used to augment them.

mod augment;
mod build;
mod graph;
mod similarity;

pub use augment::*;
pub use build::*;
pub use graph::*;
pub use similarity::*;
