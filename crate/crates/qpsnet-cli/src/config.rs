//! TOML configuration files.
//!
//! Every key is optional; a file only overrides what it names. Values flow
//! defaults -> file -> command-line flags, later layers winning.

use qpsnet::entdist::EntParams;
use qpsnet::qkd::QkdParams;
use serde::Deserialize;

/// Top-level file shape. Unknown keys are rejected so that typos fail
/// loudly instead of being silently ignored.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Seed for commands that draw random numbers.
    pub seed: Option<u64>,
    #[serde(default)]
    pub qkd: QkdSection,
    #[serde(default)]
    pub entdist: EntdistSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QkdSection {
    pub attenuation_db_per_km: Option<f64>,
    pub detector_efficiency: Option<f64>,
    pub dark_count_prob: Option<f64>,
    pub error_correction_inefficiency: Option<f64>,
    pub misalignment_prob: Option<f64>,
    pub availability_p: Option<f64>,
    pub tq_over_tp: Option<f64>,
}

impl QkdSection {
    pub fn apply(&self, params: &mut QkdParams) {
        if let Some(v) = self.attenuation_db_per_km {
            params.attenuation_db_per_km = v;
        }
        if let Some(v) = self.detector_efficiency {
            params.detector_efficiency = v;
        }
        if let Some(v) = self.dark_count_prob {
            params.dark_count_prob = v;
        }
        if let Some(v) = self.error_correction_inefficiency {
            params.error_correction_inefficiency = v;
        }
        if let Some(v) = self.misalignment_prob {
            params.misalignment_prob = v;
        }
        if let Some(v) = self.availability_p {
            params.availability_p = v;
        }
        if let Some(v) = self.tq_over_tp {
            params.tq_over_tp = v;
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntdistSection {
    /// `inf` is valid TOML and disables relaxation.
    pub t1_ns: Option<f64>,
    pub t2_ns: Option<f64>,
    pub processing_ns: Option<u64>,
    pub emission_period_ns: Option<u64>,
    pub qubits_per_frame: Option<u32>,
    pub p_l_per_km: Option<f64>,
}

impl EntdistSection {
    pub fn apply(&self, params: &mut EntParams) {
        if let Some(v) = self.t1_ns {
            params.t1_ns = v;
        }
        if let Some(v) = self.t2_ns {
            params.t2_ns = v;
        }
        if let Some(v) = self.processing_ns {
            params.processing_ns = v;
        }
        if let Some(v) = self.emission_period_ns {
            params.emission_period_ns = v;
        }
        if let Some(v) = self.qubits_per_frame {
            params.qubits_per_frame = v;
        }
        if let Some(v) = self.p_l_per_km {
            params.p_l_per_km = v;
        }
    }
}

/// Parses a configuration file's text.
pub fn parse(text: &str) -> Result<ConfigFile, toml::de::Error> {
    toml::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_changes_nothing() {
        let file = parse("").unwrap();
        let mut qkd = QkdParams::default();
        let mut ent = EntParams::default();
        file.qkd.apply(&mut qkd);
        file.entdist.apply(&mut ent);
        assert_eq!(qkd, QkdParams::default());
        assert_eq!(ent, EntParams::default());
        assert_eq!(file.seed, None);
    }

    #[test]
    fn named_keys_override_and_others_survive() {
        let file = parse(
            "seed = 9\n\
             [qkd]\n\
             attenuation_db_per_km = 0.5\n\
             [entdist]\n\
             t1_ns = inf\n\
             qubits_per_frame = 3\n",
        )
        .unwrap();
        let mut qkd = QkdParams::default();
        file.qkd.apply(&mut qkd);
        assert_eq!(qkd.attenuation_db_per_km, 0.5);
        assert_eq!(qkd.detector_efficiency, 0.5);
        let mut ent = EntParams::default();
        file.entdist.apply(&mut ent);
        assert!(ent.t1_ns.is_infinite());
        assert_eq!(ent.qubits_per_frame, 3);
        assert_eq!(ent.emission_period_ns, 5_000);
        assert_eq!(file.seed, Some(9));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse("[qkd]\nattenuatoin = 0.5\n").is_err());
        assert!(parse("speed = 3\n").is_err());
    }
}
