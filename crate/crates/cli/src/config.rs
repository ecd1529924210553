//! Run configuration: a JSON file merged under the command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use gdl_core::block::Phase4Form;
use gdl_core::fem::{DEFAULT_ELEMENTS, DEFAULT_STEPS};
use gdl_core::material::{ConstitutiveVariant, MaterialSpec};
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Rod,
    Block,
    Fem,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every tunable value, all optional. Flags and the config file both
/// produce one of these; flags win field by field.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub problem: Option<Problem>,
    pub variant: Option<String>,
    pub lambda: Option<f64>,
    pub beta: Option<f64>,
    #[serde(rename = "E")]
    pub e: Option<f64>,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    pub sigma_c: Option<f64>,
    pub k: Option<f64>,
    #[serde(rename = "Gc")]
    pub g_c: Option<f64>,
    #[serde(rename = "G0")]
    pub g_0: Option<f64>,
    #[serde(rename = "lc")]
    pub l_c: Option<f64>,
    pub samples: Option<usize>,
    pub elements: Option<usize>,
    pub steps: Option<usize>,
    pub stations: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub phase4: Option<String>,
}

macro_rules! prefer {
    ($a:ident, $b:ident, $($f:ident),*) => {
        Overrides { $($f: $a.$f.or($b.$f)),* }
    };
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// `self` over `base`.
    pub fn over(self, base: Overrides) -> Overrides {
        let (a, b) = (self, base);
        prefer!(
            a, b, problem, variant, lambda, beta, e, length, sigma_c, k, g_c, g_0, l_c, samples,
            elements, steps, stations, out, format, phase4
        )
    }
}

/// Reference rod: case (i), λ = 0.4, β = 0.5, unit E, L and σ_c.
pub const ROD_DEFAULTS: (f64, f64, f64, f64, f64) = (0.4, 0.5, 1.0, 1.0, 1.0);

/// Reference block: L = 2 mm, k = 800 N/mm³, G_c = 0.25 N/mm,
/// G_0 = 0.025 N/mm, l_c = 6 mm.
pub const BLOCK_DEFAULTS: (f64, f64, f64, f64, f64) = (2.0, 800.0, 0.25, 0.025, 6.0);

#[derive(Debug, Clone, PartialEq)]
pub struct RodInputs {
    pub variant: ConstitutiveVariant,
    pub lambda: f64,
    pub beta: f64,
    pub e: f64,
    pub length: f64,
    pub sigma_c: f64,
}

impl RodInputs {
    pub fn spec(&self) -> MaterialSpec {
        MaterialSpec::rod_from_groups(self.lambda, self.beta, self.e, self.length, self.sigma_c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockInputs {
    pub length: f64,
    pub k: f64,
    pub g_c: f64,
    pub g_0: f64,
    pub l_c: f64,
}

impl BlockInputs {
    pub fn spec(&self) -> MaterialSpec {
        MaterialSpec::block(self.length, self.l_c, self.k, self.g_c, self.g_0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub rod: RodInputs,
    pub block: BlockInputs,
    pub samples: Option<usize>,
    pub elements: usize,
    pub steps: usize,
    pub stations: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub phase4: Phase4Form,
}

fn parse_phase4(s: &str) -> Result<Phase4Form> {
    match s.to_ascii_lowercase().as_str() {
        "corrected" => Ok(Phase4Form::Corrected),
        "printed" => Ok(Phase4Form::Printed),
        other => Err(CliError::Usage(format!(
            "unknown phase-4 form '{other}' (expected corrected or printed)"
        ))),
    }
}

impl RunConfig {
    /// Merges `flags` over the optional config file and fills defaults.
    /// Outside verification `L` belongs to whichever problem is run; for
    /// verification it sets the rod half-length.
    pub fn resolve(problem: Problem, config: Option<&Path>, flags: Overrides) -> Result<Self> {
        let file = match config {
            Some(p) => Overrides::from_file(p)?,
            None => Overrides::default(),
        };
        if let Some(p) = file.problem {
            if p != problem {
                return Err(CliError::Usage(format!(
                    "config file is for problem {p:?}, not {problem:?}"
                )));
            }
        }
        let o = flags.over(file);
        let block_length = match problem {
            Problem::Block => o.length,
            _ => None,
        };
        let rod_length = match problem {
            Problem::Block => None,
            _ => o.length,
        };
        let variant = match &o.variant {
            Some(v) => v.parse::<ConstitutiveVariant>()?,
            None => ConstitutiveVariant::CASE_I,
        };
        if variant == ConstitutiveVariant::BLOCK {
            return Err(CliError::Usage(
                "the rod variant must be i, ii or iii".into(),
            ));
        }
        let (lambda, beta, e, length, sigma_c) = ROD_DEFAULTS;
        let rod = RodInputs {
            variant,
            lambda: o.lambda.unwrap_or(lambda),
            beta: o.beta.unwrap_or(beta),
            e: o.e.unwrap_or(e),
            length: rod_length.unwrap_or(length),
            sigma_c: o.sigma_c.unwrap_or(sigma_c),
        };
        let (length, k, g_c, g_0, l_c) = BLOCK_DEFAULTS;
        let block = BlockInputs {
            length: block_length.unwrap_or(length),
            k: o.k.unwrap_or(k),
            g_c: o.g_c.unwrap_or(g_c),
            g_0: o.g_0.unwrap_or(g_0),
            l_c: o.l_c.unwrap_or(l_c),
        };
        if let Some(n) = o.samples {
            if n < 2 {
                return Err(CliError::Usage(format!(
                    "--samples must be at least 2, got {n}"
                )));
            }
        }
        let elements = o.elements.unwrap_or(DEFAULT_ELEMENTS);
        if elements < 2 {
            return Err(CliError::Usage(format!(
                "--elements must be at least 2, got {elements}"
            )));
        }
        let steps = o.steps.unwrap_or(DEFAULT_STEPS);
        if steps < 1 {
            return Err(CliError::Usage("--steps must be at least 1".into()));
        }
        if let Some(s) = &o.stations {
            if s.is_empty() || s.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Usage(
                    "stations must be a non-empty list of finite values".into(),
                ));
            }
        }
        Ok(RunConfig {
            problem,
            rod,
            block,
            samples: o.samples,
            elements,
            steps,
            stations: o.stations,
            out: o.out,
            format: o.format.unwrap_or(match problem {
                Problem::Verify => Format::Json,
                _ => Format::Csv,
            }),
            phase4: match &o.phase4 {
                Some(s) => parse_phase4(s)?,
                None => Phase4Form::Corrected,
            },
        })
    }

    pub fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn flags_override_the_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(
            f,
            r#"{{"lambda": 0.3, "beta": 0.8, "samples": 7, "variant": "ii"}}"#
        )
        .unwrap();
        let flags = Overrides {
            lambda: Some(0.2),
            ..Default::default()
        };
        let c = RunConfig::resolve(Problem::Rod, Some(f.path()), flags).unwrap();
        assert_eq!(c.rod.lambda, 0.2);
        assert_eq!(c.rod.beta, 0.8);
        assert_eq!(c.samples, Some(7));
        assert_eq!(c.rod.variant, ConstitutiveVariant::CASE_II);
    }

    #[test]
    fn length_goes_to_the_running_problem() {
        let flags = || Overrides {
            length: Some(3.0),
            ..Default::default()
        };
        let b = RunConfig::resolve(Problem::Block, None, flags()).unwrap();
        assert_eq!((b.block.length, b.rod.length), (3.0, 1.0));
        let r = RunConfig::resolve(Problem::Rod, None, flags()).unwrap();
        assert_eq!((r.block.length, r.rod.length), (2.0, 3.0));
    }

    #[test]
    fn rejects_bad_input() {
        let bad = |o: Overrides| RunConfig::resolve(Problem::Rod, None, o).is_err();
        assert!(bad(Overrides {
            samples: Some(1),
            ..Default::default()
        }));
        assert!(bad(Overrides {
            variant: Some("iv".into()),
            ..Default::default()
        }));
        assert!(bad(Overrides {
            phase4: Some("other".into()),
            ..Default::default()
        }));
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"lamda": 0.3}}"#).unwrap();
        assert!(RunConfig::resolve(Problem::Rod, Some(f.path()), Overrides::default()).is_err());
        let mut g = tempfile::NamedTempFile::new().unwrap();
        write!(g, r#"{{"problem": "block"}}"#).unwrap();
        assert!(RunConfig::resolve(Problem::Rod, Some(g.path()), Overrides::default()).is_err());
    }
}
