//! Trust propagation over follower graphs, posting-activity metrics for news
//! organizations, and blockwise stepwise regression linking the two.
//!
//! The modules stack bottom-up:
//!
//! - [`graph`]: immutable weighted digraph with node metadata
//! - [`tsm`]: trustingness / trustworthiness iteration
//! - [`activity`]: per-organization posting and engagement variables
//! - [`regression`]: OLS, p-values, stepwise entry, report rendering
//! - [`io`]: file formats and the synthetic corpus generator
//! - [`pipeline`]: the batch stages used by the `newstrust` binary

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod activity;
pub mod graph;
pub mod io;
pub mod pipeline;
pub mod regression;
pub mod tsm;
