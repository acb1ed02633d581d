use serde::{Deserialize, Serialize};

use super::{Env, Environment};
use crate::error::{Error, Result};
use crate::physics::SimConfig;
use crate::suite::{
    ContestedPossession, Dribbling, GoToBall, PassEndurance, RewardWeights, StaticDefenders, VssTask,
};

/// Every registered environment id.
pub const ENV_IDS: [&str; 8] = [
    "VSSS-SingleAgent-v0",
    "VSSS-MultiAgent-v0",
    "SSL-GoToBall-v0",
    "SSL-StaticDefenders-v0",
    "SSL-ContestedPossession-v0",
    "SSL-Dribbling-v0",
    "SSL-PassEndurance-v0",
    "SSL-PassEnduranceMA-v0",
];

/// Construction-time overrides. Unset fields keep the environment defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvOverrides {
    pub seed: Option<u64>,
    pub sim_config: Option<SimConfig>,
    pub weights: Option<RewardWeights>,
    /// Number of uncontrolled opposing robots, where the environment allows it.
    pub n_opponents: Option<usize>,
    pub episode_seconds: Option<f64>,
    /// Distance between adjacent robots of the dribbling row.
    pub gate_spacing: Option<f64>,
}

impl EnvOverrides {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

pub fn make(id: &str) -> Result<Box<dyn Environment>> {
    make_with(id, &EnvOverrides::default())
}

pub fn make_with(id: &str, overrides: &EnvOverrides) -> Result<Box<dyn Environment>> {
    Ok(match id {
        "VSSS-SingleAgent-v0" => Box::new(Env::new(VssTask::single(overrides)?)?),
        "VSSS-MultiAgent-v0" => Box::new(Env::new(VssTask::multi(overrides)?)?),
        "SSL-GoToBall-v0" => Box::new(Env::new(GoToBall::new(overrides)?)?),
        "SSL-StaticDefenders-v0" => Box::new(Env::new(StaticDefenders::new(overrides)?)?),
        "SSL-ContestedPossession-v0" => Box::new(Env::new(ContestedPossession::new(overrides)?)?),
        "SSL-Dribbling-v0" => Box::new(Env::new(Dribbling::new(overrides)?)?),
        "SSL-PassEndurance-v0" => Box::new(Env::new(PassEndurance::single(overrides)?)?),
        "SSL-PassEnduranceMA-v0" => Box::new(Env::new(PassEndurance::multi(overrides)?)?),
        _ => {
            return Err(Error::UnknownEnv {
                id: id.to_string(),
                known: ENV_IDS.iter().map(|s| s.to_string()).collect(),
            })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_builds() {
        for id in ENV_IDS {
            let env = make(id).unwrap();
            assert_eq!(env.spec().id, id);
        }
    }

    #[test]
    fn unknown_id_lists_known_ids() {
        let msg = make("SSL-Nope-v0").err().unwrap().to_string();
        for id in ENV_IDS {
            assert!(msg.contains(id), "{msg}");
        }
    }

    #[test]
    fn overrides_reject_unknown_keys() {
        assert!(EnvOverrides::from_toml_str("seed = 3\nspeed = 4\n").is_err());
        let o = EnvOverrides::from_toml_str("seed = 3\nn_opponents = 2\n").unwrap();
        assert_eq!(o.seed, Some(3));
        assert_eq!(o.n_opponents, Some(2));
    }

    #[test]
    fn opponent_count_checked() {
        let o = EnvOverrides { n_opponents: Some(1), ..Default::default() };
        assert!(matches!(make_with("SSL-PassEndurance-v0", &o), Err(Error::Config(_))));
        let o = EnvOverrides { n_opponents: Some(2), ..Default::default() };
        let env = make_with("SSL-StaticDefenders-v0", &o).unwrap();
        assert_eq!(env.spec().observation_size, 4 + 3 * 8);
    }
}
