//! Deterministic simulation and analysis toolkit for packet-switched quantum
//! networks at the link layer.
//!
//! The crate is organized around five building blocks:
//!
//! * [`quantum_state`]: two-qubit density matrices, fiber depolarization,
//!   memory relaxation/dephasing, and fidelity against the ideal EPR pair.
//! * [`frame_codec`]: the hybrid classical frame format (a profiled LLDP
//!   variant) that announces and delimits quantum payloads.
//! * [`simcore`]: an integer-nanosecond discrete-event queue plus the
//!   switching primitives (burst guard consumption, store-and-forward
//!   pauses, retransmission backoff) shared by the higher-level models.
//! * [`qkd`]: BB84 gain/QBER and secret-key-rate analytics, including the
//!   routing-overhead factor for switched multi-hop paths and a Monte Carlo
//!   cross-check of its closed form.
//! * [`entdist`]: end-to-end entanglement-distribution runs that combine the
//!   pieces above into fidelity sweeps over topology and memory parameters.
//!
//! Everything is deterministic: simulation time is integer nanoseconds,
//! events at equal times pop in insertion order, and all randomness flows
//! through explicitly seeded generators.

pub mod entdist;
pub mod frame_codec;
pub mod qkd;
pub mod quantum_state;
pub mod simcore;
