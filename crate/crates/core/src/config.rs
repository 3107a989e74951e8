//! Declarative experiment configuration (TOML).
//!
//! ```toml
//! schema_version = 1
//!
//! [sequence]
//! lambda0 = 1.0
//! ratio = 2.0
//! count = 24
//! q = 1.5
//!
//! [measure]
//! kind = "jacobi"
//! gamma = 1.0
//!
//! [operator]
//! kind = "identity"
//!
//! [experiment]
//! p = 1.5
//! q = 4.0
//! r = 2.0
//! alpha = 1.0
//! beta = 1.0
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{make_geometric, validate_quasi_lacunary, BlockPartition, ExponentSequence};
use crate::measures::{Measure, MeasureSpec};
use crate::operators::{
    default_dilation, default_eps, diagonal, diagonal_with_profile, identity, make_counterexample_subcritical,
    make_counterexample_supercritical, make_dilation_example, make_example_supercritical, zero, CounterexampleParams,
    Operator, SupercriticalExample,
};
use crate::typeconst::{ConstantKind, InterpolationConfig};
use crate::verify::{Tolerances, Which};

pub const SCHEMA_VERSION: u32 = 1;

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(default)]
    pub sequence: SequenceSection,
    #[serde(default = "default_measure")]
    pub measure: MeasureSpec,
    #[serde(default)]
    pub operator: OperatorSpec,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

fn default_measure() -> MeasureSpec {
    MeasureSpec::Jacobi { gamma: 1.0 }
}

impl Default for Config {
    fn default() -> Self {
        Config {
            schema_version: SCHEMA_VERSION,
            sequence: SequenceSection::default(),
            measure: default_measure(),
            operator: OperatorSpec::default(),
            experiment: ExperimentSection::default(),
        }
    }
}

/// Either explicit `values` or the geometric λ_k = lambda0·ratio^k, k < count.
/// Blocks are singletons unless `block_sizes` is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequenceSection {
    pub values: Option<Vec<f64>>,
    pub lambda0: f64,
    pub ratio: f64,
    pub count: usize,
    pub block_sizes: Option<Vec<usize>>,
    /// Lacunarity of the block endpoints.
    pub q: f64,
    pub q_prime: Option<f64>,
}

impl Default for SequenceSection {
    fn default() -> Self {
        SequenceSection { values: None, lambda0: 1.0, ratio: 2.0, count: 24, block_sizes: None, q: 1.5, q_prime: None }
    }
}

impl SequenceSection {
    pub fn build(&self) -> Result<BlockPartition> {
        let seq = match &self.values {
            Some(v) => ExponentSequence::new(v.clone())?,
            None => make_geometric(self.lambda0, self.ratio, self.count)?,
        };
        let sizes = self.block_sizes.clone().unwrap_or_else(|| vec![1; seq.len()]);
        let part = validate_quasi_lacunary(&seq, &sizes, self.q)?;
        match self.q_prime {
            Some(qp) => part.with_q_prime(qp),
            None => Ok(part),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    #[default]
    Identity,
    Zero,
    Diagonal {
        entries: Vec<f64>,
    },
    /// d_k = λ_k^exponent.
    DiagonalPower {
        exponent: f64,
    },
    /// Coefficients giving ratio ε_k^{(1−β)/r} against the measure's Jacobi
    /// weight; ε_k = 1/(k+1) unless listed.
    DiagonalProfile {
        eps: Option<Vec<f64>>,
        r: f64,
        alpha: f64,
        beta: f64,
    },
    CounterexampleSubcritical(CounterexampleParams),
    CounterexampleSupercritical(CounterexampleParams),
    /// Infinite kernel with ε_k = 1/((k+2)ln²(k+2)), acting on the first `rows`
    /// exponents; the rest of the sequence holds the truncated tails.
    ExampleSupercritical {
        p: f64,
        beta: f64,
        gamma: f64,
        rows: usize,
        norm_exponent: Option<f64>,
    },
    /// Σ c_n f(t^{μ_n}); c_n = 2^{−n}, μ_n = 2^n for n ≤ terms unless listed.
    Dilation {
        terms: Option<usize>,
        weights: Option<Vec<f64>>,
        scales: Option<Vec<f64>>,
        gamma: f64,
        p: f64,
    },
}

impl OperatorSpec {
    pub fn build(&self, part: &BlockPartition, mu: &MeasureSpec) -> Result<Operator> {
        let seq = part.seq();
        Ok(match self {
            OperatorSpec::Identity => identity(seq).into(),
            OperatorSpec::Zero => zero(seq).into(),
            OperatorSpec::Diagonal { entries } => diagonal(seq, entries)?.into(),
            OperatorSpec::DiagonalPower { exponent } => {
                let d: Vec<f64> = seq.values().iter().map(|l| l.powf(*exponent)).collect();
                diagonal(seq, &d)?.into()
            }
            OperatorSpec::DiagonalProfile { eps, r, alpha, beta } => {
                let gamma = match mu {
                    MeasureSpec::Jacobi { gamma } => *gamma,
                    _ => return Err(config_err("diagonal_profile needs a jacobi measure")),
                };
                let eps = eps.clone().unwrap_or_else(|| (0..seq.len()).map(|k| 1.0 / (k + 1) as f64).collect());
                diagonal_with_profile(seq, &eps, *r, *alpha, *beta, gamma)?.into()
            }
            OperatorSpec::CounterexampleSubcritical(p) => make_counterexample_subcritical(part, *p)?.into(),
            OperatorSpec::CounterexampleSupercritical(p) => make_counterexample_supercritical(part, *p)?.into(),
            OperatorSpec::ExampleSupercritical { p, beta, gamma, rows, norm_exponent } => {
                let mut ex = SupercriticalExample::new(*p, *beta, *gamma, *rows);
                if let Some(s) = norm_exponent {
                    ex.norm_exponent = *s;
                }
                make_example_supercritical(part, &ex, &default_eps(seq.len()))?.into()
            }
            OperatorSpec::Dilation { terms, weights, scales, gamma, p } => match (weights, scales) {
                (Some(w), Some(s)) => make_dilation_example(w, s, *gamma, *p)?.into(),
                (None, None) => default_dilation(terms.unwrap_or(40), *gamma, *p)?.into(),
                _ => return Err(config_err("dilation needs both weights and scales, or neither")),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub seed: Option<u64>,
    pub family_size: usize,
    pub k_max: usize,
    pub samples: usize,
    /// Exponent for `norm` and `typeconst`; defaults to r.
    pub s: Option<f64>,
    pub kind: ConstantKind,
    /// Coefficients of the polynomial measured by `norm`, paired with the sequence.
    pub coefficients: Option<Vec<f64>>,
    pub which: Which,
    pub gamma: f64,
    pub eps: f64,
    pub eta: f64,
    pub n_list: Vec<usize>,
    pub r_list: Vec<f64>,
    pub restarts: Option<usize>,
    pub sphere_samples: Option<usize>,
    pub tolerances: Tolerances,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            p: None,
            q: None,
            r: None,
            alpha: 1.0,
            beta: 1.0,
            seed: None,
            family_size: 200,
            k_max: 20,
            samples: 500,
            s: None,
            kind: ConstantKind::RestrictedStrong,
            coefficients: None,
            which: Which::Subcritical,
            gamma: 1.0,
            eps: 0.2,
            eta: 0.0,
            n_list: vec![8, 16, 32, 64, 128],
            r_list: vec![2.0],
            restarts: None,
            sphere_samples: None,
            tolerances: Tolerances::default(),
        }
    }
}

impl ExperimentSection {
    /// Full interpolation configuration; needs p, q and r.
    pub fn interpolation(&self, mu: Measure) -> Result<InterpolationConfig> {
        match (self.p, self.q, self.r) {
            (Some(p), Some(q), Some(r)) => InterpolationConfig::new(p, q, r, self.alpha, self.beta, mu),
            _ => Err(config_err("[experiment] needs p, q and r")),
        }
    }

    /// α, β and μ only, for single-exponent constants.
    pub fn norms(&self, mu: Measure) -> Result<InterpolationConfig> {
        InterpolationConfig::norms_only(self.alpha, self.beta, mu)
    }

    /// The exponent for single-exponent runs: `s`, else `r`.
    pub fn exponent(&self) -> Result<f64> {
        self.s.or(self.r).ok_or_else(|| config_err("[experiment] needs s or r"))
    }

    pub fn counterexample(&self) -> Result<CounterexampleParams> {
        let r = self.r.ok_or_else(|| config_err("[experiment] needs r"))?;
        Ok(CounterexampleParams { r, alpha: self.alpha, beta: self.beta, gamma: self.gamma, eps: self.eps, eta: self.eta })
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config> {
        let cfg: Config = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(config_err(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Config::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn partition(&self) -> Result<BlockPartition> {
        self.sequence.build()
    }

    pub fn mu(&self) -> Result<Measure> {
        self.measure.build()
    }

    pub fn operator(&self, part: &BlockPartition) -> Result<Operator> {
        self.operator.build(part, &self.measure)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
schema_version = 1

[sequence]
lambda0 = 1.0
ratio = 3.0
count = 10
q = 2.0
q_prime = 3.0

[measure]
kind = "mixture"
gamma = 2.0
atoms = [[0.5, 0.25]]

[operator]
kind = "counterexample_subcritical"
r = 2.0
alpha = 1.0
beta = 1.0
gamma = 1.0
eps = 0.2

[experiment]
p = 1.5
q = 4.0
r = 2.0
n_list = [8, 16, 32, 64]
tolerances = { slope = 0.1 }
"#;

    #[test]
    fn parses_and_builds() {
        let cfg = Config::from_toml(FULL).unwrap();
        let part = cfg.partition().unwrap();
        assert_eq!(part.seq().len(), 10);
        assert_eq!(part.q_prime(), Some(3.0));
        assert_eq!(cfg.mu().unwrap().atoms(), vec![(0.5, 0.25)]);
        let op = cfg.operator(&part).unwrap();
        assert_eq!(op.name(), "subcritical-counterexample");
        assert_eq!(cfg.experiment.tolerances.slope, 0.1);
        assert_eq!(cfg.experiment.tolerances.r2_min, 0.99);
        let ic = cfg.experiment.interpolation(cfg.mu().unwrap()).unwrap();
        assert!((ic.theta - 0.4).abs() < 1e-12);
    }

    #[test]
    fn round_trips() {
        let cfg = Config::from_toml(FULL).unwrap();
        assert_eq!(Config::from_toml(&cfg.to_toml()).unwrap(), cfg);
        let d = Config::default();
        assert_eq!(Config::from_toml(&d.to_toml()).unwrap(), d);
        assert_eq!(Config::from_toml("schema_version = 1").unwrap(), d);
    }

    #[test]
    fn rejects_bad_documents() {
        for text in [
            "",
            "schema_version = 2",
            "schema_version = 1\n[sequence]\nbogus = 1",
            "schema_version = 1\n[operator]\nkind = \"nope\"",
            "schema_version = 1\n[measure]\nkind = \"jacobi\"",
        ] {
            assert!(matches!(Config::from_toml(text), Err(Error::Config(_))), "{text}");
        }
        let cfg = Config::from_toml("schema_version = 1\n[sequence]\nratio = 1.2\nq = 1.5").unwrap();
        assert!(cfg.partition().is_err());
        let cfg = Config::from_toml("schema_version = 1").unwrap();
        assert!(cfg.experiment.interpolation(Measure::lebesgue()).is_err());
    }

    #[test]
    fn builds_every_operator() {
        let base = |op: &str| format!("schema_version = 1\n[sequence]\ncount = 30\n[operator]\n{op}");
        for op in [
            "kind = \"zero\"",
            "kind = \"diagonal_power\"\nexponent = -0.25",
            "kind = \"diagonal_profile\"\nr = 2.0\nalpha = 1.0\nbeta = 0.5",
            "kind = \"counterexample_supercritical\"\nr = 2.0\nalpha = 1.0\nbeta = 0.5\ngamma = 0.5\neps = 0.1\neta = 0.1",
            "kind = \"dilation\"\ngamma = 1.0\np = 1.5",
            "kind = \"dilation\"\ngamma = 1.0\np = 1.5\nweights = [0.5]\nscales = [2.0]",
        ] {
            let cfg = Config::from_toml(&base(op)).unwrap();
            let part = cfg.partition().unwrap();
            cfg.operator(&part).unwrap_or_else(|e| panic!("{op}: {e}"));
        }
        // The slowly decaying ε_k need a long tail to certify the truncation.
        let text = "schema_version = 1\n[sequence]\ncount = 240\n[operator]\nkind = \"example_supercritical\"\n\
                    p = 1.5\nbeta = 0.5\ngamma = 0.5\nrows = 4";
        let cfg = Config::from_toml(text).unwrap();
        assert_eq!(cfg.operator(&cfg.partition().unwrap()).unwrap().name(), "supercritical-example");
        let long: Vec<String> = (0..31).map(|_| "1.0".to_string()).collect();
        let cfg = Config::from_toml(&base(&format!("kind = \"diagonal\"\nentries = [{}]", long.join(", ")))).unwrap();
        assert!(cfg.operator(&cfg.partition().unwrap()).is_err());
    }
}
