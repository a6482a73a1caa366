//! Input builders shared by the benchmarks.

pub use hexbed_core::shapes::{icosphere, spiral_tube};
