//! End-to-end entanglement distribution over store-and-forward chains.
//!
//! A source emits EPR pairs framed as quantum payloads. Each transmitted
//! half crosses equal fiber segments (replacement depolarization per
//! segment) and pauses in memory at every relay (T1/T2 dwell for the relay
//! pause). Two placements are modeled:
//!
//! * central source: the source sits midway between two receivers and
//!   sends one half down each arm;
//! * sender source: the source keeps one half in its own memory, for the
//!   whole transit time of the other half, and sends only that one.
//!
//! The run is driven by the discrete-event queue: header events open each
//! relay's storage window, qubit arrivals apply fiber noise, releases apply
//! memory dwell. A pair's fidelity is recorded the instant its last half
//! reaches a receiver; receivers themselves add no dwell. All pairs in a
//! frame see identical noise, so their fidelities match and their arrival
//! times differ by the emission period; both facts double as invariant
//! checks in the tests.

use thiserror::Error;

use crate::quantum_state::{
    apply_depolarizing, apply_t1t2, depolar_prob, fidelity, make_epr, ChannelKind, ChannelSpec,
    DensityMatrix, StateError,
};
use crate::simcore::{propagation_delay_ns, relay_pause, EventQueue, SimError, SimTime};

/// Failures from distribution runs and sweeps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntError {
    #[error("{name} = {value} is out of domain: {requirement}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Where the source sits relative to the receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntScenario {
    /// Source midway between two receivers; each arm spans half the total
    /// length and has its own relay count.
    CentralSource { left_hops: u32, right_hops: u32 },
    /// Source at one end keeps a half in memory; the other half crosses
    /// the full length through `hops` relays.
    SenderSource { hops: u32 },
}

/// Physical and framing parameters of a distribution run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntParams {
    /// Receiver-to-receiver (or source-to-receiver) fiber length.
    pub total_length_km: f64,
    /// Memory relaxation constant; `f64::INFINITY` disables relaxation.
    pub t1_ns: f64,
    /// Memory coherence constant; at most `2 * t1_ns`.
    pub t2_ns: f64,
    /// Header reprocessing time at each relay.
    pub processing_ns: u64,
    /// Spacing between payload qubits.
    pub emission_period_ns: u64,
    /// Payload qubits per frame.
    pub qubits_per_frame: u32,
    /// Fiber depolarization coefficient, base-10 per km.
    pub p_l_per_km: f64,
}

impl Default for EntParams {
    /// Memory-limited reference setup: half-millisecond memories, a relay
    /// pause dominated by the 125 us processing time, ten qubits per frame
    /// at a 5 us period, and standard-fiber depolarization.
    fn default() -> Self {
        EntParams {
            total_length_km: 0.0,
            t1_ns: 5e5,
            t2_ns: 5e5,
            processing_ns: 125_000,
            emission_period_ns: 5_000,
            qubits_per_frame: 10,
            p_l_per_km: 0.008,
        }
    }
}

impl EntParams {
    pub fn validate(&self) -> Result<(), EntError> {
        if !self.total_length_km.is_finite() || self.total_length_km < 0.0 {
            return Err(EntError::OutOfDomain {
                name: "total_length_km",
                value: self.total_length_km,
                requirement: "must be finite and non-negative",
            });
        }
        if !self.p_l_per_km.is_finite() || self.p_l_per_km < 0.0 {
            return Err(EntError::OutOfDomain {
                name: "p_l_per_km",
                value: self.p_l_per_km,
                requirement: "must be finite and non-negative",
            });
        }
        if self.emission_period_ns == 0 {
            return Err(EntError::OutOfDomain {
                name: "emission_period_ns",
                value: 0.0,
                requirement: "must be positive",
            });
        }
        if self.qubits_per_frame == 0 {
            return Err(EntError::OutOfDomain {
                name: "qubits_per_frame",
                value: 0.0,
                requirement: "must be at least 1",
            });
        }
        // Delegate the decay-constant physicality check to the channel.
        ChannelSpec {
            kind: ChannelKind::T1T2 {
                t_ns: 0.0,
                t1_ns: self.t1_ns,
                t2_ns: self.t2_ns,
            },
            target_qubit: 0,
        }
        .validate()?;
        Ok(())
    }

    /// The per-relay pause for these framing parameters.
    pub fn pause_ns(&self) -> u64 {
        relay_pause(
            self.processing_ns,
            self.qubits_per_frame,
            self.emission_period_ns,
        )
    }
}

/// One noise application along a pair's path, in application order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseStage {
    /// A fiber segment crossed by `qubit`.
    Fiber {
        qubit: usize,
        length_km: f64,
        depolar_p: f64,
    },
    /// A memory dwell of `qubit`.
    Storage { qubit: usize, duration_ns: u64 },
}

/// Final state of one distributed pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityRecord {
    pub pair_index: u32,
    /// When the pair's last half reached its receiver.
    pub arrival_time: SimTime,
    pub fidelity: f64,
    /// Everything that happened to the pair, in application order.
    pub stages: Vec<NoiseStage>,
}

/// One transmitted half's path: which qubit it carries and the per-segment
/// geometry of its arm.
struct ArmSpec {
    qubit: usize,
    hops: u32,
    seg_length_km: f64,
    seg_delay_ns: u64,
    seg_depolar_p: f64,
}

fn build_arms(scenario: &EntScenario, params: &EntParams) -> Result<Vec<ArmSpec>, EntError> {
    let arm = |qubit: usize, hops: u32, length_km: f64| -> Result<ArmSpec, EntError> {
        let seg_length_km = length_km / (hops as f64 + 1.0);
        Ok(ArmSpec {
            qubit,
            hops,
            seg_length_km,
            seg_delay_ns: propagation_delay_ns(seg_length_km),
            seg_depolar_p: depolar_prob(seg_length_km, params.p_l_per_km)?,
        })
    };
    match *scenario {
        EntScenario::CentralSource {
            left_hops,
            right_hops,
        } => {
            let arm_km = params.total_length_km / 2.0;
            Ok(vec![arm(0, left_hops, arm_km)?, arm(1, right_hops, arm_km)?])
        }
        EntScenario::SenderSource { hops } => {
            Ok(vec![arm(1, hops, params.total_length_km)?])
        }
    }
}

/// Events inside a distribution run. `node` counts along an arm: values
/// below the arm's hop count are relays, the hop count itself is the
/// receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ev {
    HeaderAtNode { arm: usize, node: u32 },
    QubitAtNode { arm: usize, node: u32, pair: u32 },
    QubitRelease { arm: usize, node: u32, pair: u32 },
}

struct PairState {
    rho: DensityMatrix,
    stages: Vec<NoiseStage>,
    arms_arrived: u32,
    finalized: bool,
}

/// Distributes one frame of EPR pairs and reports each pair's delivered
/// fidelity.
///
/// The header leaves the source at time zero and payload qubit `i` follows
/// at `i` emission periods; relays hold every qubit for the relay pause, so
/// the train's spacing is preserved end to end. In the sender scenario the
/// retained half's dwell runs from its pair's emission to its partner's
/// arrival. Records come back in pair order.
pub fn run_scenario(
    scenario: &EntScenario,
    params: &EntParams,
) -> Result<Vec<FidelityRecord>, EntError> {
    params.validate()?;
    let arms = build_arms(scenario, params)?;
    let retains_qubit = matches!(scenario, EntScenario::SenderSource { .. });
    let pause_ns = params.pause_ns();
    let period = params.emission_period_ns;
    let pair_count = params.qubits_per_frame;

    let mut pairs: Vec<PairState> = (0..pair_count)
        .map(|_| PairState {
            rho: make_epr(),
            stages: Vec::new(),
            arms_arrived: 0,
            finalized: false,
        })
        .collect();
    let mut records: Vec<FidelityRecord> = Vec::with_capacity(pair_count as usize);

    let mut queue: EventQueue<Ev> = EventQueue::new();
    for (arm_idx, arm) in arms.iter().enumerate() {
        // The header is scheduled ahead of its qubits so that, at equal
        // times, relay windows open before qubits ask for them.
        queue.schedule_after(arm.seg_delay_ns, Ev::HeaderAtNode {
            arm: arm_idx,
            node: 0,
        });
        for pair in 0..pair_count {
            queue.schedule_after(
                arm.seg_delay_ns + pair as u64 * period,
                Ev::QubitAtNode {
                    arm: arm_idx,
                    node: 0,
                    pair,
                },
            );
        }
    }

    let arm_total = arms.len() as u32;
    queue.run(|time, event, queue| match *event {
        Ev::HeaderAtNode { arm, node } => {
            if node < arms[arm].hops {
                queue.schedule_after(
                    pause_ns + arms[arm].seg_delay_ns,
                    Ev::HeaderAtNode {
                        arm,
                        node: node + 1,
                    },
                );
            }
        }
        Ev::QubitAtNode { arm, node, pair } => {
            let spec = &arms[arm];
            let state = &mut pairs[pair as usize];
            state.rho = apply_depolarizing(&state.rho, spec.qubit, spec.seg_depolar_p)
                .expect("validated parameters keep fiber noise in domain");
            state.stages.push(NoiseStage::Fiber {
                qubit: spec.qubit,
                length_km: spec.seg_length_km,
                depolar_p: spec.seg_depolar_p,
            });
            if node < spec.hops {
                queue.schedule_after(pause_ns, Ev::QubitRelease { arm, node, pair });
            } else {
                state.arms_arrived += 1;
                if state.arms_arrived == arm_total {
                    debug_assert!(!state.finalized);
                    if retains_qubit {
                        let dwell_ns = time.ns() - pair as u64 * period;
                        state.rho =
                            apply_t1t2(&state.rho, 0, dwell_ns as f64, params.t1_ns, params.t2_ns)
                                .expect("validated decay constants stay physical");
                        state.stages.push(NoiseStage::Storage {
                            qubit: 0,
                            duration_ns: dwell_ns,
                        });
                    }
                    state.finalized = true;
                    records.push(FidelityRecord {
                        pair_index: pair,
                        arrival_time: time,
                        fidelity: fidelity(&state.rho)
                            .expect("two-qubit states always have a fidelity"),
                        stages: std::mem::take(&mut state.stages),
                    });
                }
            }
        }
        Ev::QubitRelease { arm, node, pair } => {
            let spec = &arms[arm];
            let state = &mut pairs[pair as usize];
            state.rho = apply_t1t2(
                &state.rho,
                spec.qubit,
                pause_ns as f64,
                params.t1_ns,
                params.t2_ns,
            )
            .expect("validated decay constants stay physical");
            state.stages.push(NoiseStage::Storage {
                qubit: spec.qubit,
                duration_ns: pause_ns,
            });
            queue.schedule_after(spec.seg_delay_ns, Ev::QubitAtNode {
                arm,
                node: node + 1,
                pair,
            });
        }
    });

    debug_assert!(pairs.iter().all(|p| p.finalized), "every pair must finish");
    Ok(records)
}

/// Mean fidelity across a run's records.
pub fn mean_fidelity(records: &[FidelityRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    records.iter().map(|r| r.fidelity).sum::<f64>() / records.len() as f64
}

/// Scenario family selector for sweeps; hop counts are symmetric in the
/// central case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Central,
    Sender,
}

impl ScenarioKind {
    pub fn build(self, hops: u32) -> EntScenario {
        match self {
            ScenarioKind::Central => EntScenario::CentralSource {
                left_hops: hops,
                right_hops: hops,
            },
            ScenarioKind::Sender => EntScenario::SenderSource { hops },
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ScenarioKind::Central => "central",
            ScenarioKind::Sender => "sender",
        }
    }
}

/// One sweep output row: the varied parameters plus one pair's fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntSweepRow {
    pub scenario: &'static str,
    pub total_length_km: f64,
    pub hops: u32,
    pub t1_ns: f64,
    pub t2_ns: f64,
    pub processing_ns: u64,
    pub pair_index: u32,
    pub fidelity: f64,
}

fn rows_from_records(
    records: &[FidelityRecord],
    label: &'static str,
    params: &EntParams,
    hops: u32,
) -> Vec<EntSweepRow> {
    records
        .iter()
        .map(|r| EntSweepRow {
            scenario: label,
            total_length_km: params.total_length_km,
            hops,
            t1_ns: params.t1_ns,
            t2_ns: params.t2_ns,
            processing_ns: params.processing_ns,
            pair_index: r.pair_index,
            fidelity: r.fidelity,
        })
        .collect()
}

/// Sweeps total length and hop count for one scenario family. Hops vary in
/// the outer loop, lengths inside, pairs innermost.
pub fn sweep_length_hops(
    params: &EntParams,
    lengths_km: &[f64],
    hops_list: &[u32],
    kind: ScenarioKind,
) -> Result<Vec<EntSweepRow>, EntError> {
    let mut rows = Vec::new();
    for &hops in hops_list {
        for &total_length_km in lengths_km {
            let point = EntParams {
                total_length_km,
                ..*params
            };
            let records = run_scenario(&kind.build(hops), &point)?;
            rows.extend(rows_from_records(&records, kind.label(), &point, hops));
        }
    }
    Ok(rows)
}

/// Sweeps a common memory constant (T1 = T2 = T) against total length for
/// the central scenario with three hops per arm. T varies in the outer
/// loop, lengths inside.
pub fn sweep_t1t2_length(
    params: &EntParams,
    t_grid_ns: &[f64],
    lengths_km: &[f64],
) -> Result<Vec<EntSweepRow>, EntError> {
    let mut rows = Vec::new();
    let scenario = ScenarioKind::Central.build(3);
    for &t_ns in t_grid_ns {
        for &total_length_km in lengths_km {
            let point = EntParams {
                total_length_km,
                t1_ns: t_ns,
                t2_ns: t_ns,
                ..*params
            };
            let records = run_scenario(&scenario, &point)?;
            rows.extend(rows_from_records(&records, "central", &point, 3));
        }
    }
    Ok(rows)
}

/// Sweeps the relay processing time against the memory constant
/// (T1 = T2 = T) on a fixed geometry chosen to isolate memory effects:
/// central scenario, three hops per arm, 20 km per span (160 km total),
/// and fiber depolarization switched off. Framing parameters are taken
/// from `params`; its length, memory, and fiber noise fields are ignored.
pub fn sweep_proc_t1(
    params: &EntParams,
    proc_grid_ns: &[u64],
    t_grid_ns: &[f64],
) -> Result<Vec<EntSweepRow>, EntError> {
    let mut rows = Vec::new();
    let scenario = ScenarioKind::Central.build(3);
    for &processing_ns in proc_grid_ns {
        for &t_ns in t_grid_ns {
            let point = EntParams {
                total_length_km: 160.0,
                t1_ns: t_ns,
                t2_ns: t_ns,
                processing_ns,
                p_l_per_km: 0.0,
                ..*params
            };
            let records = run_scenario(&scenario, &point)?;
            rows.extend(rows_from_records(&records, "central", &point, 3));
        }
    }
    Ok(rows)
}

/// Side-by-side sweep of both source placements over a length grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioComparison {
    pub rows: Vec<EntSweepRow>,
    /// Length where the central scenario's mean fidelity crosses 0.5,
    /// linearly interpolated; absent if it never does on the grid.
    pub central_crossing_km: Option<f64>,
    /// Same for the sender scenario.
    pub sender_crossing_km: Option<f64>,
}

/// Runs both scenarios over `lengths_km` with the same hop count and finds
/// where each one's mean fidelity falls through 0.5.
pub fn compare_scenarios(
    params: &EntParams,
    lengths_km: &[f64],
    hops: u32,
) -> Result<ScenarioComparison, EntError> {
    let mut rows = Vec::new();
    let mut curves: [Vec<(f64, f64)>; 2] = [Vec::new(), Vec::new()];
    for (slot, kind) in [ScenarioKind::Central, ScenarioKind::Sender]
        .into_iter()
        .enumerate()
    {
        for &total_length_km in lengths_km {
            let point = EntParams {
                total_length_km,
                ..*params
            };
            let records = run_scenario(&kind.build(hops), &point)?;
            curves[slot].push((total_length_km, mean_fidelity(&records)));
            rows.extend(rows_from_records(&records, kind.label(), &point, hops));
        }
    }
    Ok(ScenarioComparison {
        rows,
        central_crossing_km: crossing_length(&curves[0], 0.5),
        sender_crossing_km: crossing_length(&curves[1], 0.5),
    })
}

/// First downward crossing of `threshold` along a (position, value) curve,
/// linearly interpolated between grid points.
fn crossing_length(points: &[(f64, f64)], threshold: f64) -> Option<f64> {
    for pair in points.windows(2) {
        let (x0, f0) = pair[0];
        let (x1, f1) = pair[1];
        if f0 >= threshold && f1 < threshold {
            return Some(x0 + (f0 - threshold) * (x1 - x0) / (f0 - f1));
        }
    }
    None
}
