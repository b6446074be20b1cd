//! Comparison heuristics for horizontally partitioned data.

mod agids;
mod fds;

pub use agids::{run_agids, AgidsCoordinator, AgidsDown, AgidsSite, AgidsUp, GridSpec};
pub use fds::{run_fds, FdsCoordinator, FdsDown, FdsParams, FdsSite, FdsUp};
