//! Configuration, initial data, snapshots and CSV output.

pub mod config;
pub mod csv;
pub mod initial;
pub mod snapshot;

pub use initial::{make_initial, IcSpec};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, SnapshotError, SnapshotHeader};
