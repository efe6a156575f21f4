//! Simulation clock and the deterministic event queue.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::ops::Add;

use super::SimError;

/// A point in simulation time, in integer nanoseconds from the run start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub fn from_ns(ns: u64) -> Self {
        SimTime(ns)
    }

    pub fn ns(self) -> u64 {
        self.0
    }
}

impl Add<u64> for SimTime {
    type Output = SimTime;

    /// Advances the clock, saturating at the top of the u64 range.
    fn add(self, delta_ns: u64) -> SimTime {
        SimTime(self.0.saturating_add(delta_ns))
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ns", self.0)
    }
}

struct Entry<E> {
    time: SimTime,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Entry<E> {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}

impl<E> Eq for Entry<E> {}

impl<E> PartialOrd for Entry<E> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Entry<E> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

/// A future-event list with a monotone clock.
///
/// Events at equal times pop in insertion order, which makes every run
/// fully deterministic regardless of how handlers interleave their
/// scheduling.
pub struct EventQueue<E> {
    heap: BinaryHeap<Reverse<Entry<E>>>,
    now: SimTime,
    next_seq: u64,
}

impl<E> Default for EventQueue<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E> EventQueue<E> {
    pub fn new() -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            now: SimTime::ZERO,
            next_seq: 0,
        }
    }

    /// Current simulation time: the timestamp of the last popped event.
    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    /// Schedules `event` at the absolute time `at`.
    ///
    /// Scheduling into the past is a logic error and is rejected rather
    /// than silently reordered.
    pub fn schedule(&mut self, at: SimTime, event: E) -> Result<(), SimError> {
        if at < self.now {
            return Err(SimError::SchedulePast {
                requested_ns: at.ns(),
                now_ns: self.now.ns(),
            });
        }
        self.push(at, event);
        Ok(())
    }

    /// Schedules `event` at `delay_ns` after the current time. This can
    /// never land in the past, so it is infallible.
    pub fn schedule_after(&mut self, delay_ns: u64, event: E) {
        let at = self.now + delay_ns;
        self.push(at, event);
    }

    fn push(&mut self, at: SimTime, event: E) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Entry {
            time: at,
            seq,
            event,
        }));
    }

    /// Removes and returns the earliest event, advancing the clock to it.
    pub fn pop(&mut self) -> Option<(SimTime, E)> {
        let Reverse(entry) = self.heap.pop()?;
        self.now = entry.time;
        Some((entry.time, entry.event))
    }

    /// Drains the queue through `handler`, which may schedule more events,
    /// and returns the full (time, event) trace in pop order.
    pub fn run<F>(mut self, mut handler: F) -> Vec<(SimTime, E)>
    where
        F: FnMut(SimTime, &E, &mut EventQueue<E>),
    {
        let mut trace = Vec::new();
        while let Some((time, event)) = self.pop() {
            handler(time, &event, &mut self);
            trace.push((time, event));
        }
        trace
    }
}
