//! Average Age of Collection (AoC) of multi-device status-update systems.
//!
//! The AoC is the time elapsed since the generation of the most recent
//! *complete* set of status packets received from all `N` devices. This crate
//! computes its long-run average for three multiple-access schemes:
//!
//! * TDMA-NR: devices take turns; any decode failure aborts the round.
//! * TDMA-R: a failed device retransmits, except the first device whose
//!   failure regenerates every packet.
//! * FDMA: all devices transmit at once on disjoint sub-channels.
//!
//! Modules:
//! - [`domain`]: PER vectors, timing, traces and their exact integral
//! - [`analysis`]: closed forms and hitting-time systems
//! - [`sim`]: seeded slot-level simulators that validate [`analysis`]
//! - [`timing`]: slot and round durations from PHY parameters
//! - [`table`], [`sweep`]: PER-table ingestion, sweeps and CSV output

pub mod analysis;
pub mod domain;
pub mod error;
pub mod linalg;
pub mod sim;
pub mod stats;
pub mod sweep;
pub mod table;
pub mod timing;

pub use analysis::{
    avg_aoc_ms, avg_aoc_units, fdma_avg_aoc_rounds, fdma_gamma, tdma_nr_avg_aoc_slots,
    tdma_nr_moments, tdma_r_avg_aoc_slots, tdma_r_moments,
};
pub use domain::{
    integrate_trace, AocTrace, CollectionEvent, HittingMoments, PerVector, SchemeKind, TimeUnit,
    TimingModel, TransmissionOrder,
};
pub use error::{AocError, Result};
pub use linalg::{solve_dense, DenseSystem};
pub use sim::{simulate, simulate_ms, SimConfig, SimResult};
pub use sweep::{emit_rows, parse_rows, run_order_study, run_sweep, Mode, SweepRow};
pub use table::{load_per_table, parse_per_table, PerTable};
pub use timing::{
    ack_duration_ms, fdma_round_ms, idealized_timing, practical_timing, status_duration_ms,
    tdma_slot_ms, PhyProfile,
};
