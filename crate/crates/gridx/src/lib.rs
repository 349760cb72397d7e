//! Grid capacity expansion planning toolkit.
//!
//! The pipeline: parse topology/profile/cost inputs, pick weighted
//! representative days, map buses to counties and reallocate large-load
//! shares, synthesize the demand cube, generate the multi-period
//! expansion LP with DC-OPF dispatch, solve it, and report investment,
//! dispatch, cost, and sensitivity results.

pub mod cluster;
pub mod demand;
pub mod domain;
pub mod ingest;
pub mod lp;
pub mod pipeline;
pub mod planner;
pub mod report;
pub mod spatial;
pub mod synth;
