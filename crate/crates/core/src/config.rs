//! Run configuration shared by the CLI and the verification suite.
//!
//! The file format is flat TOML: one key per line, no tables. Keys:
//!
//! | key             | meaning                                          |
//! |-----------------|--------------------------------------------------|
//! | `primes`        | primes for the per-prime suites                  |
//! | `prec`          | working precision `M`                            |
//! | `n_max`         | q-expansion truncation                           |
//! | `discriminants` | imaginary quadratic discriminants                |
//! | `moduli`        | Dirichlet character moduli                       |
//! | `disc_bound`    | `|d|` bound for the class-number sweep           |
//! | `samples`       | random samples per property                      |
//! | `seed`          | RNG seed                                         |
//! | `calibration`   | group-ring reciprocity convention                |
//! | `output`        | report path (stdout when absent)                 |
//!
//! `PADIC_STARK_PREC` overrides the default precision, nothing else.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_ring::{Calibration, DEFAULT_CALIBRATION};

pub const PREC_ENV: &str = "PADIC_STARK_PREC";

pub const MAX_PREC: u32 = 40;
pub const MAX_PRIME: u64 = 101;
pub const MAX_N_MAX: usize = 2000;
pub const MAX_SAMPLES: usize = 10_000;
pub const MAX_DISC_BOUND: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub primes: Vec<u64>,
    pub prec: u32,
    pub n_max: usize,
    pub discriminants: Vec<i64>,
    pub moduli: Vec<u64>,
    pub disc_bound: u64,
    pub samples: usize,
    pub seed: u64,
    pub calibration: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            primes: vec![3, 5, 7, 13],
            prec: 10,
            n_max: 60,
            discriminants: vec![-3, -4, -7, -23],
            moduli: vec![3, 4],
            disc_bound: 500,
            samples: 100,
            seed: 0x5eed,
            calibration: DEFAULT_CALIBRATION.name().to_string(),
            output: None,
        }
    }
}

impl RunConfig {
    /// Defaults, with the precision taken from `PADIC_STARK_PREC` when set.
    pub fn from_env() -> Result<Self> {
        let mut c = Self::default();
        if let Ok(v) = std::env::var(PREC_ENV) {
            c.prec = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{PREC_ENV}={v:?} is not a precision")))?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn calibration(&self) -> Result<Calibration> {
        Calibration::parse(&self.calibration)
    }

    /// Bounds checks. Violations are `Guardrail`, malformed values `Config`.
    pub fn validate(&self) -> Result<()> {
        if self.prec == 0 {
            return Err(Error::Config("prec must be positive".into()));
        }
        if self.prec > MAX_PREC {
            return Err(Error::Guardrail(format!("prec {} > {MAX_PREC}", self.prec)));
        }
        if let Some(&p) = self.primes.iter().find(|&&p| p > MAX_PRIME) {
            return Err(Error::Guardrail(format!("prime {p} > {MAX_PRIME}")));
        }
        if self.n_max > MAX_N_MAX {
            return Err(Error::Guardrail(format!("n_max {} > {MAX_N_MAX}", self.n_max)));
        }
        if self.samples > MAX_SAMPLES {
            return Err(Error::Guardrail(format!("samples {} > {MAX_SAMPLES}", self.samples)));
        }
        if self.disc_bound > MAX_DISC_BOUND {
            return Err(Error::Guardrail(format!(
                "disc_bound {} > {MAX_DISC_BOUND}",
                self.disc_bound
            )));
        }
        self.calibration()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let c = RunConfig {
            output: Some("out.json".into()),
            discriminants: vec![-3, -163],
            ..Default::default()
        };
        let text = c.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
        let d = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&d.to_toml().unwrap()).unwrap(), d);
    }

    #[test]
    fn partial_files_use_defaults() {
        let c = RunConfig::from_toml("prec = 12\nprimes = [5]\n").unwrap();
        assert_eq!(c.prec, 12);
        assert_eq!(c.primes, vec![5]);
        assert_eq!(c.n_max, RunConfig::default().n_max);
    }

    #[test]
    fn guardrails() {
        assert!(matches!(RunConfig::from_toml("prec = 400"), Err(Error::Guardrail(_))));
        assert!(matches!(RunConfig::from_toml("prec = 0"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_toml("bogus = 1"), Err(Error::Config(_))));
        assert!(matches!(
            RunConfig::from_toml("calibration = \"nope\""),
            Err(Error::UnknownCalibration(_))
        ));
    }
}
