pub mod clustering;
pub mod coarsening;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod fusion;
pub mod generators;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod partition;
pub mod pipeline;
pub mod table;
