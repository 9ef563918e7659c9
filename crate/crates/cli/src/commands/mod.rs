pub mod classify;
pub mod compare;
pub mod extract;
pub mod fit;
pub mod report;
pub mod synth;
