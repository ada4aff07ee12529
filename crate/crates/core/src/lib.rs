pub mod align;
pub mod cli;
pub mod corpus;
pub mod decoder;
pub mod metrics;
pub mod normalize;
pub mod parallel;
pub mod token;
