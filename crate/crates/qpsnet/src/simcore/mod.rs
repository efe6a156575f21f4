//! Deterministic discrete-event core shared by the switching and
//! distribution models.
//!
//! Simulation time is integer nanoseconds. The event queue pops strictly by
//! (time, insertion order), so two runs over the same inputs produce
//! byte-identical traces. On top of the queue sit the link-layer switching
//! primitives: burst-mode guard-time consumption with exponential
//! retransmission backoff, store-and-forward pause calculation, per-qubit
//! storage scheduling, and the fiber propagation delay model (5 us per km,
//! i.e. refractive index around 1.5).

mod events;
mod switching;
mod topology;

pub use events::{EventQueue, SimTime};
pub use switching::{
    availability_draw, burst_step, burst_transit, burst_transit_with_retransmit,
    propagation_delay_ns, relay_pause, relay_storage_schedule, retransmit_guard, BurstEvent,
    BurstOutcome, BurstStep, BurstTransitReport, StorageInterval,
};
pub use topology::{Link, NodeRole, SwitchKind, SwitchPolicy, Topology, TopologyShape};

use thiserror::Error;

/// Failures from the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    /// An event was scheduled before the queue's current time.
    #[error("cannot schedule an event at {requested_ns} ns: current time is {now_ns} ns")]
    SchedulePast { requested_ns: u64, now_ns: u64 },
    /// A topology parameter is out of domain or inconsistent.
    #[error("invalid topology: {reason}")]
    InvalidTopology { reason: &'static str },
    /// A switch policy parameter is out of domain.
    #[error("invalid switch policy: {reason}")]
    InvalidPolicy { reason: &'static str },
}
