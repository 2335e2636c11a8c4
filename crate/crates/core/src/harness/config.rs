//! Experiment configuration: a TOML file with four optional sections.
//!
//! ```toml
//! seed = 7                 # master seed; every random draw derives from it
//!
//! [params]                 # numeric parameters, all optional
//! n = 4
//! m = 2
//! eps = 0.25
//! r = 13
//! delta = 2.0
//! gamma = 0.5
//! l_max = 14
//! samples = 8              # Monte Carlo Clifford samples; 0 = full group
//! advice = 4
//! k = 1.0                  # planted min-entropy for `extract`
//! ell = 1                  # extractor output length override
//!
//! [input]
//! pair = "orthogonal"      # orthogonal | near_orthogonal | random | identical
//! family = "toy"           # toy | haar | low
//! state = "random"         # random | planted | mixed | pure
//!
//! [verify]
//! suite = "all"            # metrics | design | extractor | pipeline | kolmogorov | all
//! pairs = 1000             # corpus sizes, see `VerifySection`
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Unknown keys and out-of-range values are configuration errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub input: InputSection,
    #[serde(default)]
    pub verify: VerifySection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub eps: Option<f64>,
    pub r: Option<usize>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
    pub l_max: Option<usize>,
    pub samples: Option<usize>,
    pub advice: Option<i64>,
    pub k: Option<f64>,
    pub ell: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairChoice {
    #[default]
    Orthogonal,
    NearOrthogonal,
    Random,
    Identical,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyChoice {
    /// Short programs plus Haar states at four qubits.
    #[default]
    Toy,
    Haar,
    Low,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateChoice {
    #[default]
    Random,
    Planted,
    Mixed,
    Pure,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    #[serde(default)]
    pub pair: PairChoice,
    #[serde(default)]
    pub family: FamilyChoice,
    #[serde(default)]
    pub state: StateChoice,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Metrics,
    Design,
    Extractor,
    Pipeline,
    Kolmogorov,
    #[default]
    All,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Metrics,
        Suite::Design,
        Suite::Extractor,
        Suite::Pipeline,
        Suite::Kolmogorov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Metrics => "metrics",
            Suite::Design => "design",
            Suite::Extractor => "extractor",
            Suite::Pipeline => "pipeline",
            Suite::Kolmogorov => "kolmogorov",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

/// Corpus sizes of the verification suites. The defaults are the sizes the
/// acceptance run uses; tests shrink them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub suite: Suite,
    /// Random state pairs for the distance inequalities.
    pub pairs: usize,
    /// Random inputs for the state-calculus invariants.
    pub states: usize,
    pub design_matrices: usize,
    pub closure_trials: usize,
    pub homomorphism_trials: usize,
    pub planted: usize,
    pub mc_samples: usize,
    pub mc_repeats: usize,
    pub mc_trials: usize,
    pub entropic_pairs: usize,
    pub random_states: usize,
    pub planted_weights: usize,
    pub smoothing_instances: usize,
    pub oracle_samples: usize,
    pub aep_states: usize,
    pub aep_copies: usize,
    pub pms_samples: usize,
    pub prs_keys: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            pairs: 1000,
            states: 1000,
            design_matrices: 20,
            closure_trials: 500,
            homomorphism_trials: 200,
            planted: 50,
            mc_samples: 2000,
            mc_repeats: 10,
            mc_trials: 20,
            entropic_pairs: 100,
            random_states: 200,
            planted_weights: 100,
            smoothing_instances: 50,
            oracle_samples: 100_000,
            aep_states: 20,
            aep_copies: 6,
            pms_samples: 8,
            prs_keys: 512,
        }
    }
}

impl VerifySection {
    /// Small corpora for smoke tests.
    pub fn quick() -> Self {
        Self {
            suite: Suite::All,
            pairs: 40,
            states: 40,
            design_matrices: 2,
            closure_trials: 20,
            homomorphism_trials: 20,
            planted: 6,
            mc_samples: 200,
            mc_repeats: 3,
            mc_trials: 3,
            entropic_pairs: 10,
            random_states: 10,
            planted_weights: 10,
            smoothing_instances: 3,
            oracle_samples: 5000,
            aep_states: 3,
            aep_copies: 3,
            pms_samples: 8,
            prs_keys: 64,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if let Some(eps) = p.eps {
            if !(eps > 0.0 && eps < 1.0) {
                return bad("eps must lie in (0, 1)");
            }
        }
        if let Some(g) = p.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return bad("gamma must be positive");
            }
        }
        if let Some(d) = p.delta {
            if !(d >= 0.0 && d.is_finite()) {
                return bad("delta must be nonnegative");
            }
        }
        if p.n == Some(0) || p.m == Some(0) {
            return bad("n and m must be positive");
        }
        if let Some(k) = p.k {
            if !k.is_finite() {
                return bad("k must be finite");
            }
        }
        if p.samples == Some(1) {
            return bad("samples must be 0 (full group) or at least 2");
        }
        let v = &self.verify;
        if v.mc_samples < 2 || v.mc_repeats < 2 || v.pms_samples < 2 || v.prs_keys < 2 {
            return bad("Monte Carlo sizes must be at least 2");
        }
        Ok(())
    }

    pub fn n_or(&self, d: usize) -> usize {
        self.params.n.unwrap_or(d)
    }

    pub fn m_or(&self, d: usize) -> usize {
        self.params.m.unwrap_or(d)
    }

    pub fn eps_or(&self, d: f64) -> f64 {
        self.params.eps.unwrap_or(d)
    }
}
