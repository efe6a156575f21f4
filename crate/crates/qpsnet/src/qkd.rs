//! BB84 gain, error-rate, and secret-key-rate analytics for switched
//! multi-hop links.
//!
//! The photonic channel model is the usual single-photon one: detector
//! efficiency times fiber transmittance gives the signal yield, dark counts
//! add a floor, and the error rate mixes misalignment on real detections
//! with random outcomes on dark ones. Link-layer switching enters through a
//! routing factor that discounts key material by relay availability and by
//! the slice of each quantum frame sacrificed to per-hop processing; a
//! seeded Monte Carlo estimator cross-checks that factor's closed form.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::simcore::availability_draw;

/// Parameter failures for the analytics functions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QkdError {
    #[error("{name} = {value} is out of domain: {requirement}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("trials must be at least 1")]
    NoTrials,
}

/// Inputs for one operating point of the key-rate model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QkdParams {
    /// End-to-end fiber length.
    pub length_km: f64,
    /// Number of switches (relays) on the path.
    pub switch_count: u32,
    /// Fiber attenuation, dB per km.
    pub attenuation_db_per_km: f64,
    /// Receiver detector efficiency.
    pub detector_efficiency: f64,
    /// Dark-count probability per gate.
    pub dark_count_prob: f64,
    /// Error-correction inefficiency, at least 1.
    pub error_correction_inefficiency: f64,
    /// Probability that a detected signal photon is read in the wrong bin.
    pub misalignment_prob: f64,
    /// Probability that a single switch is available for the frame.
    pub availability_p: f64,
    /// Quantum frame duration in units of the per-hop processing time.
    pub tq_over_tp: f64,
}

impl Default for QkdParams {
    /// A short reference link: lossy telecom fiber, balanced detectors, a
    /// frame one hundred processing times long, and coin-flip switch
    /// availability.
    fn default() -> Self {
        QkdParams {
            length_km: 0.0,
            switch_count: 0,
            attenuation_db_per_km: 0.2,
            detector_efficiency: 0.5,
            dark_count_prob: 1e-6,
            error_correction_inefficiency: 1.15,
            misalignment_prob: 0.01,
            availability_p: 0.5,
            tq_over_tp: 100.0,
        }
    }
}

impl QkdParams {
    pub fn validate(&self) -> Result<(), QkdError> {
        non_negative("length_km", self.length_km)?;
        non_negative("attenuation_db_per_km", self.attenuation_db_per_km)?;
        probability("detector_efficiency", self.detector_efficiency)?;
        probability("dark_count_prob", self.dark_count_prob)?;
        probability("misalignment_prob", self.misalignment_prob)?;
        probability("availability_p", self.availability_p)?;
        if self.dark_count_prob > 0.5 {
            return Err(QkdError::OutOfDomain {
                name: "dark_count_prob",
                value: self.dark_count_prob,
                requirement: "background yield 2*p_dark cannot exceed 1",
            });
        }
        if !self.error_correction_inefficiency.is_finite()
            || self.error_correction_inefficiency < 1.0
        {
            return Err(QkdError::OutOfDomain {
                name: "error_correction_inefficiency",
                value: self.error_correction_inefficiency,
                requirement: "must be finite and at least 1",
            });
        }
        positive("tq_over_tp", self.tq_over_tp)?;
        Ok(())
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<(), QkdError> {
    if !value.is_finite() || value < 0.0 {
        return Err(QkdError::OutOfDomain {
            name,
            value,
            requirement: "must be finite and non-negative",
        });
    }
    Ok(())
}

fn positive(name: &'static str, value: f64) -> Result<(), QkdError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(QkdError::OutOfDomain {
            name,
            value,
            requirement: "must be finite and positive",
        });
    }
    Ok(())
}

fn probability(name: &'static str, value: f64) -> Result<(), QkdError> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(QkdError::OutOfDomain {
            name,
            value,
            requirement: "must lie in [0, 1]",
        });
    }
    Ok(())
}

/// Binary entropy in bits. Exactly zero at the endpoints.
pub fn binary_entropy(x: f64) -> Result<f64, QkdError> {
    probability("x", x)?;
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// Detection gain and quantum bit error rate of the photonic channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainQber {
    /// Probability that a gate produces a detection.
    pub gain: f64,
    /// Probability that a detection is an error.
    pub qber: f64,
}

/// Computes gain and QBER from fiber transmittance, detector efficiency,
/// dark counts, and misalignment.
///
/// Transmittance is `10^(-attenuation * length / 10)`; a detection happens
/// on a signal photon or a dark count; errors come from misaligned signal
/// detections and from half of the dark counts. With no detections at all
/// the error rate is the random-guess value 0.5.
pub fn gain_qber(params: &QkdParams) -> Result<GainQber, QkdError> {
    params.validate()?;
    let transmittance =
        10f64.powf(-params.attenuation_db_per_km * params.length_km / 10.0);
    let eta = params.detector_efficiency * transmittance;
    let background = 2.0 * params.dark_count_prob;
    let gain = 1.0 - (1.0 - background) * (1.0 - eta);
    let qber = if gain > 0.0 {
        ((0.5 * background + params.misalignment_prob * eta) / gain).clamp(0.0, 0.5)
    } else {
        0.5
    };
    Ok(GainQber { gain, qber })
}

/// Fraction of raw key surviving the switched path: every one of the
/// `switch_count` relays must be available, and each hop's processing time
/// eats one slice out of the quantum frame.
///
/// `K = p^n * (tq_over_tp - n) / tq_over_tp`, clamped to [0, 1]; a path
/// with more hops than frame slices yields nothing.
pub fn k_factor(
    availability_p: f64,
    switch_count: u32,
    tq_over_tp: f64,
) -> Result<f64, QkdError> {
    probability("availability_p", availability_p)?;
    positive("tq_over_tp", tq_over_tp)?;
    let truncation = (tq_over_tp - switch_count as f64) / tq_over_tp;
    let k = availability_p.powi(switch_count as i32) * truncation.max(0.0);
    Ok(k.clamp(0.0, 1.0))
}

/// One fully evaluated operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRatePoint {
    pub gain: f64,
    pub qber: f64,
    /// The routing factor K for the switched path.
    pub routing_factor: f64,
    /// Secret bits per gate, never negative.
    pub key_rate: f64,
}

/// Secret-key rate `R = K * Q * (1 - f * H2(e) - H2(e))`, clamped at zero
/// once error correction and privacy amplification cost more than the
/// sifted key carries.
pub fn secret_key_rate(params: &QkdParams) -> Result<KeyRatePoint, QkdError> {
    let GainQber { gain, qber } = gain_qber(params)?;
    let routing_factor =
        k_factor(params.availability_p, params.switch_count, params.tq_over_tp)?;
    let h = binary_entropy(qber)?;
    let bracket = 1.0 - params.error_correction_inefficiency * h - h;
    let key_rate = (routing_factor * gain * bracket).max(0.0);
    Ok(KeyRatePoint {
        gain,
        qber,
        routing_factor,
        key_rate,
    })
}

/// Monte Carlo estimate of the routing factor.
///
/// Each trial simulates one quantum frame: every relay on the path draws
/// availability, a failed draw forfeits the frame, and a delivered frame
/// contributes the slice of itself not consumed by per-hop processing.
/// With a fixed seed the estimate is fully reproducible.
pub fn monte_carlo_k(
    availability_p: f64,
    switch_count: u32,
    tq_over_tp: f64,
    trials: u32,
    seed: u64,
) -> Result<f64, QkdError> {
    probability("availability_p", availability_p)?;
    positive("tq_over_tp", tq_over_tp)?;
    if trials == 0 {
        return Err(QkdError::NoTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let surviving_fraction =
        ((tq_over_tp - switch_count as f64) / tq_over_tp).clamp(0.0, 1.0);
    let mut total = 0.0;
    for _ in 0..trials {
        let mut path_up = true;
        for _ in 0..switch_count {
            if !availability_draw(availability_p, &mut rng) {
                path_up = false;
                break;
            }
        }
        if path_up {
            total += surviving_fraction;
        }
    }
    Ok(total / trials as f64)
}

/// One row of a key-rate sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QkdSweepRow {
    pub length_km: f64,
    pub switch_count: u32,
    pub gain: f64,
    pub qber: f64,
    pub routing_factor: f64,
    pub key_rate: f64,
}

/// Evaluates the key-rate model over a grid, switch counts in the outer
/// loop and lengths in the inner one.
pub fn qkd_sweep(
    base: &QkdParams,
    lengths_km: &[f64],
    switch_counts: &[u32],
) -> Result<Vec<QkdSweepRow>, QkdError> {
    let mut rows = Vec::with_capacity(lengths_km.len() * switch_counts.len());
    for &switch_count in switch_counts {
        for &length_km in lengths_km {
            let point = secret_key_rate(&QkdParams {
                length_km,
                switch_count,
                ..*base
            })?;
            rows.push(QkdSweepRow {
                length_km,
                switch_count,
                gain: point.gain,
                qber: point.qber,
                routing_factor: point.routing_factor,
                key_rate: point.key_rate,
            });
        }
    }
    Ok(rows)
}
