//! Scenario files: a TOML document with `[field]`, `[extension]` and an
//! optional `[run]` section.
//!
//! ```toml
//! [field]
//! characteristic = "p"
//! prime = 2
//!
//! [extension]
//! layers = [
//!   { kind = "artin_schreier", datum = "1@-1" },
//!   { kind = "artin_schreier", datum = "1@-3" },
//! ]
//!
//! [run]
//! seed = 7
//! trials = 100
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::LayerSpec;
use crate::localfield::{Characteristic, GroundFieldSpec, Scalar, DEFAULT_PRECISION};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub characteristic: Characteristic,
    pub prime: u32,
    /// Eisenstein polynomials `[a_0, …, a_{e−1}, 1]` over `Q_p`, innermost
    /// first; characteristic zero only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tower: Vec<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSection {
    pub layers: Vec<LayerSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// Starting working precision; overrides `field.precision`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_cap: Option<i64>,
}

impl RunSection {
    fn is_empty(&self) -> bool {
        *self == RunSection::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub field: FieldSection,
    pub extension: ExtensionSection,
    #[serde(default, skip_serializing_if = "RunSection::is_empty")]
    pub run: RunSection,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let sc: Scenario = toml::from_str(text).map_err(|e| Error::Scenario(e.message().to_string()))?;
        sc.check()?;
        Ok(sc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Scenario(format!("cannot read {}: {e}", path.display())))?;
        Scenario::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    fn check(&self) -> Result<()> {
        if self.extension.layers.is_empty() {
            return Err(Error::Scenario("extension needs at least one layer".into()));
        }
        for (what, v) in [("field.precision", self.field.precision), ("run.precision", self.run.precision)] {
            if v.is_some_and(|v| v < 1) {
                return Err(Error::Scenario(format!("{what} must be positive")));
            }
        }
        if self.run.precision_cap.is_some_and(|c| c < self.base_precision()) {
            return Err(Error::Scenario("run.precision_cap is below the starting precision".into()));
        }
        Ok(())
    }

    /// Starting working precision.
    pub fn base_precision(&self) -> i64 {
        self.run.precision.or(self.field.precision).unwrap_or(DEFAULT_PRECISION)
    }

    pub fn ground_spec(&self, precision: i64) -> GroundFieldSpec {
        GroundFieldSpec {
            characteristic: self.field.characteristic,
            p: self.field.prime,
            tower: self.field.tower.clone(),
            default_precision: precision,
        }
    }
}
