//! Chain topologies and switch policies for the link-layer models.

use super::SimError;

/// What a node does in a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    /// Emits quantum payloads (and their control frames).
    Source,
    /// Switches payloads onward, burst-mode or store-and-forward.
    Relay,
    /// Terminates payloads and measures or stores them.
    Receiver,
}

/// One fiber span between adjacent nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub length_km: f64,
    /// Depolarization coefficient of the span, base-10 per km.
    pub p_l_per_km: f64,
    /// Classical/photonic attenuation of the span, dB per km.
    pub attenuation_db_per_km: f64,
}

/// Overall arrangement of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyShape {
    /// Source, `n` relays, receiver, connected left to right.
    LinearChain,
    /// Two receivers at the ends with the source in the middle; each arm
    /// has its own relay count.
    SplitChain { left_hops: u32, right_hops: u32 },
}

/// A validated chain of nodes and equal-length links per arm.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub nodes: Vec<NodeRole>,
    pub links: Vec<Link>,
    pub shape: TopologyShape,
}

impl Topology {
    /// Source at one end, `relays` switches, receiver at the other end,
    /// with the total length split equally across the `relays + 1` spans.
    pub fn linear_chain(
        relays: u32,
        total_length_km: f64,
        p_l_per_km: f64,
        attenuation_db_per_km: f64,
    ) -> Result<Self, SimError> {
        check_link_params(total_length_km, p_l_per_km, attenuation_db_per_km)?;
        let span_count = relays as usize + 1;
        let link = Link {
            length_km: total_length_km / span_count as f64,
            p_l_per_km,
            attenuation_db_per_km,
        };
        let mut nodes = Vec::with_capacity(relays as usize + 2);
        nodes.push(NodeRole::Source);
        nodes.extend(std::iter::repeat_n(NodeRole::Relay, relays as usize));
        nodes.push(NodeRole::Receiver);
        Ok(Topology {
            nodes,
            links: vec![link; span_count],
            shape: TopologyShape::LinearChain,
        })
    }

    /// A source centered between two receivers. Each arm covers half the
    /// total length, split equally across that arm's `hops + 1` spans.
    pub fn split_chain(
        left_hops: u32,
        right_hops: u32,
        total_length_km: f64,
        p_l_per_km: f64,
        attenuation_db_per_km: f64,
    ) -> Result<Self, SimError> {
        check_link_params(total_length_km, p_l_per_km, attenuation_db_per_km)?;
        let arm_km = total_length_km / 2.0;
        let make_links = |hops: u32| {
            let spans = hops as usize + 1;
            vec![
                Link {
                    length_km: arm_km / spans as f64,
                    p_l_per_km,
                    attenuation_db_per_km,
                };
                spans
            ]
        };
        let mut nodes = Vec::new();
        nodes.push(NodeRole::Receiver);
        nodes.extend(std::iter::repeat_n(NodeRole::Relay, left_hops as usize));
        nodes.push(NodeRole::Source);
        nodes.extend(std::iter::repeat_n(NodeRole::Relay, right_hops as usize));
        nodes.push(NodeRole::Receiver);

        let mut links = make_links(left_hops);
        links.extend(make_links(right_hops));
        Ok(Topology {
            nodes,
            links,
            shape: TopologyShape::SplitChain {
                left_hops,
                right_hops,
            },
        })
    }

    /// Total fiber length across all links.
    pub fn total_length_km(&self) -> f64 {
        self.links.iter().map(|l| l.length_km).sum()
    }

    /// Number of relay nodes.
    pub fn relay_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, NodeRole::Relay))
            .count()
    }

    /// Consistency of node and link counts with the declared shape.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.nodes.len() != self.links.len() + 1 {
            return Err(SimError::InvalidTopology {
                reason: "a chain needs exactly one more node than links",
            });
        }
        for link in &self.links {
            check_link_params(link.length_km, link.p_l_per_km, link.attenuation_db_per_km)?;
        }
        let relays = self.relay_count() as u32;
        match self.shape {
            TopologyShape::LinearChain => {
                if self.nodes.first() != Some(&NodeRole::Source)
                    || self.nodes.last() != Some(&NodeRole::Receiver)
                    || relays as usize + 2 != self.nodes.len()
                {
                    return Err(SimError::InvalidTopology {
                        reason: "linear chain must be source, relays, receiver",
                    });
                }
            }
            TopologyShape::SplitChain {
                left_hops,
                right_hops,
            } => {
                let expected = left_hops as usize + right_hops as usize + 3;
                if self.nodes.len() != expected
                    || relays != left_hops + right_hops
                    || self.nodes.first() != Some(&NodeRole::Receiver)
                    || self.nodes.last() != Some(&NodeRole::Receiver)
                {
                    return Err(SimError::InvalidTopology {
                        reason: "split chain must be receiver, relays, source, relays, receiver",
                    });
                }
            }
        }
        Ok(())
    }
}

fn check_link_params(length_km: f64, p_l: f64, attenuation: f64) -> Result<(), SimError> {
    if !length_km.is_finite() || length_km < 0.0 {
        return Err(SimError::InvalidTopology {
            reason: "length must be finite and non-negative",
        });
    }
    if !p_l.is_finite() || p_l < 0.0 {
        return Err(SimError::InvalidTopology {
            reason: "depolarization coefficient must be finite and non-negative",
        });
    }
    if !attenuation.is_finite() || attenuation < 0.0 {
        return Err(SimError::InvalidTopology {
            reason: "attenuation must be finite and non-negative",
        });
    }
    Ok(())
}

/// How a relay treats an incoming payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchKind {
    /// Burst mode: consume processing time out of the guard budget and cut
    /// through; drop when the budget runs out.
    Burst {
        guard0_ns: u64,
        /// Guard multiplier per retransmission attempt; at least 1.
        retransmit_backoff_factor: u32,
    },
    /// Store the payload for the relay pause, then forward.
    StoreForward { processing_ns: u64 },
}

/// Switching discipline plus the per-relay availability probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchPolicy {
    pub kind: SwitchKind,
    /// Probability that a relay can take the payload at all.
    pub availability_p: f64,
}

impl SwitchPolicy {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.availability_p) || self.availability_p.is_nan() {
            return Err(SimError::InvalidPolicy {
                reason: "availability probability must lie in [0, 1]",
            });
        }
        if let SwitchKind::Burst {
            retransmit_backoff_factor,
            ..
        } = self.kind
        {
            if retransmit_backoff_factor == 0 {
                return Err(SimError::InvalidPolicy {
                    reason: "retransmit backoff factor must be at least 1",
                });
            }
        }
        Ok(())
    }
}
