pub mod control;
pub mod cot;
pub mod harness;
pub mod metrics;
pub mod parse;
pub mod policies;
pub mod scenario;
pub mod world;
