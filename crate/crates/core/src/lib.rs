pub mod algorithms;
pub mod dataset;
pub mod encoding;
pub mod eval;
pub mod geometry;
pub mod index;
pub mod pipeline;
pub mod probe;
