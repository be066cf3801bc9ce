//! Plausibility checks for document-forgery detection, and the tooling to
//! measure how well a generation backend writes them.

pub mod completion;
pub mod dataset;
pub mod harness;
pub mod lang;
pub mod metrics;
mod par;
pub mod store;
pub mod value;

pub use par::parallel_map;
