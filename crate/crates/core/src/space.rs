//! Space parameters.
//!
//! `theta` is the scaling applied by Schreier-sum nodes; the standard space
//! uses 1/2. The two enforcement flags switch off the admissibility and
//! very-fast-growth side conditions, which turns the engine into a solver for
//! the corresponding relaxed functional sets (useful for contrast runs).

use serde::{Deserialize, Serialize};

use crate::rat::Rat;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpaceSpec {
    pub theta: Rat,
    pub enforce_admissible: bool,
    pub enforce_vfg: bool,
}

impl Default for SpaceSpec {
    fn default() -> SpaceSpec {
        SpaceSpec {
            theta: Rat::new(1, 2),
            enforce_admissible: true,
            enforce_vfg: true,
        }
    }
}

impl SpaceSpec {
    /// The standard space: theta 1/2, both side conditions enforced.
    pub fn standard() -> SpaceSpec {
        SpaceSpec::default()
    }

    /// theta must lie in (0, 1].
    pub fn check(&self) -> Result<()> {
        if !self.theta.is_positive() || self.theta > Rat::one() {
            return Err(Error::Precondition(format!(
                "theta must be in (0,1], got {}",
                self.theta
            )));
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<SpaceSpec> {
        let spec: SpaceSpec = toml::from_str(s).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("space spec: {e}"),
        })?;
        spec.check()?;
        Ok(spec)
    }

    pub fn load(path: &std::path::Path) -> Result<SpaceSpec> {
        SpaceSpec::from_toml_str(&std::fs::read_to_string(path)?)
    }
}
