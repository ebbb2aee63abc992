pub mod baseline;
pub mod cli;
pub mod dataset;
pub mod metrics;
pub mod pipeline;
pub mod tlk;
