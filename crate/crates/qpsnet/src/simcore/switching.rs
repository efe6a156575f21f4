//! Switching primitives: burst-mode guard consumption, retransmission
//! backoff, store-and-forward pauses, and fiber propagation delay.

use rand::Rng;

use super::{EventQueue, SimTime};

/// Propagation delay through standard fiber: 5 us per km, rounded to the
/// nearest nanosecond.
pub fn propagation_delay_ns(length_km: f64) -> u64 {
    debug_assert!(length_km.is_finite() && length_km >= 0.0);
    (length_km * 5_000.0).round() as u64
}

/// What a burst-mode relay does with an arriving header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurstStep {
    /// Enough guard budget remained: cut through with the remainder.
    Forward { remaining_guard_ns: u64 },
    /// The budget was exhausted by this relay's processing time.
    Drop,
}

/// Spends one relay's processing time out of the remaining guard budget.
///
/// A payload survives the relay only if some guard budget is left after
/// processing; draining it to exactly zero is a drop, since the payload
/// would overrun its reservation on the next span.
pub fn burst_step(guard_ns: u64, processing_ns: u64) -> BurstStep {
    if guard_ns > processing_ns {
        BurstStep::Forward {
            remaining_guard_ns: guard_ns - processing_ns,
        }
    } else {
        BurstStep::Drop
    }
}

/// Guard budget granted to retransmission `attempt` (0 is the first try):
/// the initial budget scaled by `factor^attempt`, saturating on overflow.
pub fn retransmit_guard(guard0_ns: u64, attempt: u32, factor: u32) -> u64 {
    let mut guard = guard0_ns;
    for _ in 0..attempt {
        guard = guard.saturating_mul(factor as u64);
    }
    guard
}

/// Draws whether a relay is available, consuming exactly one sample.
pub fn availability_draw<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    debug_assert!((0.0..=1.0).contains(&p));
    rng.random::<f64>() < p
}

/// Store-and-forward pause at a relay: long enough to reprocess the header
/// and to let the whole payload train arrive before it is re-emitted.
pub fn relay_pause(processing_ns: u64, payload_len: u32, emission_period_ns: u64) -> u64 {
    let train_ns = (payload_len as u64).saturating_mul(emission_period_ns);
    processing_ns.max(train_ns)
}

/// Dwell of one qubit in a relay's memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StorageInterval {
    pub arrival: SimTime,
    pub release: SimTime,
}

impl StorageInterval {
    pub fn duration_ns(&self) -> u64 {
        self.release.ns() - self.arrival.ns()
    }
}

/// Storage intervals for each payload qubit at a store-and-forward relay.
///
/// Qubit `i` arrives `i` emission periods after the header and is released
/// once the relay's pause has elapsed from its own arrival, so every qubit
/// is stored for exactly the pause and the train leaves with its spacing
/// intact.
pub fn relay_storage_schedule(
    header_arrival: SimTime,
    pause_ns: u64,
    payload_len: u32,
    emission_period_ns: u64,
) -> Vec<StorageInterval> {
    (0..payload_len as u64)
        .map(|i| {
            let arrival = header_arrival + i * emission_period_ns;
            StorageInterval {
                arrival,
                release: arrival + pause_ns,
            }
        })
        .collect()
}

/// Events of a burst-mode transit attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurstEvent {
    /// The header reached relay `relay` (0-based) with this much guard
    /// budget left before processing.
    HeaderAtRelay { relay: u32, guard_ns: u64 },
    /// The relay's processing exhausted the budget.
    DroppedAtRelay { relay: u32 },
    /// The payload reached the receiver.
    Delivered,
}

/// Outcome of one burst transit attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BurstOutcome {
    pub delivered: bool,
    /// Relays the payload was forwarded through.
    pub relays_traversed: u32,
    /// Index of the relay that dropped the payload, if any.
    pub dropped_at: Option<u32>,
    /// Full event trace in time order.
    pub trace: Vec<(SimTime, BurstEvent)>,
}

/// Runs one burst-mode attempt across a linear chain of `relays` switches
/// joined by equal spans of `link_delay_ns`, starting with `guard0_ns` of
/// guard budget.
pub fn burst_transit(
    relays: u32,
    guard0_ns: u64,
    processing_ns: u64,
    link_delay_ns: u64,
) -> BurstOutcome {
    let mut queue = EventQueue::new();
    if relays == 0 {
        queue.schedule_after(link_delay_ns, BurstEvent::Delivered);
    } else {
        queue.schedule_after(
            link_delay_ns,
            BurstEvent::HeaderAtRelay {
                relay: 0,
                guard_ns: guard0_ns,
            },
        );
    }

    let mut delivered = false;
    let mut relays_traversed = 0;
    let mut dropped_at = None;
    let trace = queue.run(|_, event, queue| match *event {
        BurstEvent::HeaderAtRelay { relay, guard_ns } => match burst_step(guard_ns, processing_ns)
        {
            BurstStep::Forward { remaining_guard_ns } => {
                relays_traversed += 1;
                let next = if relay + 1 == relays {
                    BurstEvent::Delivered
                } else {
                    BurstEvent::HeaderAtRelay {
                        relay: relay + 1,
                        guard_ns: remaining_guard_ns,
                    }
                };
                queue.schedule_after(processing_ns + link_delay_ns, next);
            }
            BurstStep::Drop => {
                queue.schedule_after(processing_ns, BurstEvent::DroppedAtRelay { relay });
            }
        },
        BurstEvent::DroppedAtRelay { relay } => {
            dropped_at = Some(relay);
        }
        BurstEvent::Delivered => {
            delivered = true;
        }
    });

    BurstOutcome {
        delivered,
        relays_traversed,
        dropped_at,
        trace,
    }
}

/// A burst transit retried with exponential guard backoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BurstTransitReport {
    /// Guard budget granted to each attempt, in order.
    pub guards_ns: Vec<u64>,
    /// Outcome of the final attempt.
    pub outcome: BurstOutcome,
}

/// Repeats [`burst_transit`] with the guard budget scaled by
/// `factor^attempt` until delivery or until `max_attempts` runs out.
pub fn burst_transit_with_retransmit(
    relays: u32,
    guard0_ns: u64,
    processing_ns: u64,
    link_delay_ns: u64,
    factor: u32,
    max_attempts: u32,
) -> BurstTransitReport {
    let mut guards_ns = Vec::new();
    let mut outcome = None;
    for attempt in 0..max_attempts.max(1) {
        let guard = retransmit_guard(guard0_ns, attempt, factor);
        guards_ns.push(guard);
        let result = burst_transit(relays, guard, processing_ns, link_delay_ns);
        let done = result.delivered;
        outcome = Some(result);
        if done {
            break;
        }
    }
    BurstTransitReport {
        guards_ns,
        outcome: outcome.expect("at least one attempt always runs"),
    }
}
