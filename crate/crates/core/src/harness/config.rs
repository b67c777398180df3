//! Scenario files.
//!
//! A scenario is a TOML document (plain `key = value` lines grouped in
//! `[sections]`, `#` comments). Every key except the dimensions has a
//! default:
//!
//! ```toml
//! [scenario]
//! name = "nx8-s4"
//! nx = 8              # state dimension
//! ny = 8              # observation dimension (default nx); H = [I 0] or [I; 0]
//! support = 4         # nonzeros in the true transition matrix
//! steps = 1000        # horizon K
//! sigma_q = 0.1
//! sigma_r = 0.1
//! sigma_0 = 1e-4
//! realizations = 50
//! seed = 1
//! methods = ["graphit", "graphem", "mlem"]
//! threshold = 1e-10   # edge detection threshold
//! true_norm = 0.9     # spectral norm of the generated matrices
//! epsilon = 1e-3      # outer precision
//! max_outer = 50
//! threads = 0         # 0 = all cores, 1 = sequential
//!
//! [dr]
//! step = 1.0
//! relaxation = 1.0
//! tol = 1e-6
//! max_iter = 1000
//!
//! [graphit]
//! family = "logsum"   # logsum | atan | mangasarian | mcp | scad | l1
//! gamma = [20, 40, 60]
//! lambda = [0.03, 0.1, 0.3]   # `a = [...]` for scad
//!
//! [graphem]
//! gamma = [20, 40, 60]
//! ```
//!
//! When a method lists more than one hyperparameter tuple, the benchmark
//! first picks the tuple with the lowest RMSE on a dedicated tuning
//! realization.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Deserialize;

use super::HarnessError;
use crate::model::{KnownParams, DEFAULT_TRUE_NORM};
use crate::penalties::{Family, Potential};
use crate::solver::DrConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Graphit,
    Graphem,
    Mlem,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Graphit, Method::Graphem, Method::Mlem];

    pub fn name(self) -> &'static str {
        match self {
            Method::Graphit => "graphit",
            Method::Graphem => "graphem",
            Method::Mlem => "mlem",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "graphit" => Ok(Method::Graphit),
            "graphem" => Ok(Method::Graphem),
            "mlem" => Ok(Method::Mlem),
            _ => Err(HarnessError::Config(format!("unknown method '{s}'"))),
        }
    }
}

/// One point of a hyperparameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperParams {
    pub gamma: f64,
    /// `λ`, or `a` for SCAD; absent for ℓ1.
    pub shape: Option<f64>,
}

impl HyperParams {
    pub fn render(&self, family: Option<Family>) -> String {
        match (family.and_then(Family::shape_name), self.shape) {
            (Some(name), Some(v)) => format!("gamma={};{}={}", self.gamma, name, v),
            _ => format!("gamma={}", self.gamma),
        }
    }
}

/// A method together with its penalty family and hyperparameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub method: Method,
    /// `None` for MLEM.
    pub family: Option<Family>,
    pub grid: Vec<HyperParams>,
}

impl MethodSpec {
    pub fn mlem() -> Self {
        MethodSpec { method: Method::Mlem, family: None, grid: Vec::new() }
    }

    pub fn potential(&self, hp: &HyperParams) -> crate::Result<Option<Potential>> {
        match self.family {
            None => Ok(None),
            Some(f) => Potential::new(f, hp.gamma, hp.shape.unwrap_or(0.0)).map(Some),
        }
    }

    pub fn needs_tuning(&self) -> bool {
        self.grid.len() > 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub nx: usize,
    pub ny: usize,
    pub support: usize,
    pub steps: usize,
    pub sigma_q: f64,
    pub sigma_r: f64,
    pub sigma_0: f64,
    pub realizations: usize,
    pub master_seed: u64,
    pub methods: Vec<MethodSpec>,
    pub threshold: f64,
    pub true_norm: f64,
    pub epsilon: f64,
    pub max_outer: usize,
    pub dr: DrConfig,
    pub threads: usize,
}

impl Scenario {
    /// Defaults for `(N_x, S)` with `H = I`, `K = 1000`,
    /// `(σ_Q, σ_R, σ_0) = (0.1, 0.1, 1e-4)`, 50 realizations and MLEM only.
    pub fn new(name: impl Into<String>, nx: usize, support: usize) -> Self {
        Scenario {
            name: name.into(),
            nx,
            ny: nx,
            support,
            steps: 1000,
            sigma_q: 0.1,
            sigma_r: 0.1,
            sigma_0: 1e-4,
            realizations: 50,
            master_seed: 1,
            methods: vec![MethodSpec::mlem()],
            threshold: crate::metrics::DEFAULT_THRESHOLD,
            true_norm: DEFAULT_TRUE_NORM,
            epsilon: 1e-3,
            max_outer: 50,
            dr: DrConfig::default(),
            threads: 0,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.nx == 0 || self.ny == 0 {
            return bad("dimensions must be positive".into());
        }
        if self.support == 0 || self.support > self.nx * self.nx {
            return bad(format!("support {} outside 1..={}", self.support, self.nx * self.nx));
        }
        if self.steps == 0 || self.realizations == 0 {
            return bad("steps and realizations must be positive".into());
        }
        for (name, v) in [("sigma_q", self.sigma_q), ("sigma_r", self.sigma_r), ("sigma_0", self.sigma_0)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.true_norm > 0.0 && self.true_norm < 1.0) {
            return bad(format!("true_norm must lie in (0, 1), got {}", self.true_norm));
        }
        if !(self.threshold >= 0.0) {
            return bad(format!("threshold must be nonnegative, got {}", self.threshold));
        }
        if self.methods.is_empty() {
            return bad("no methods configured".into());
        }
        for spec in &self.methods {
            if spec.method != Method::Mlem && spec.grid.is_empty() {
                return bad(format!("{} needs at least one gamma", spec.method));
            }
            for hp in &spec.grid {
                spec.potential(hp).map_err(|e| HarnessError::Config(format!("{}: {e}", spec.method)))?;
            }
        }
        self.estimator_config(None).validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn method(&self, method: Method) -> Option<&MethodSpec> {
        self.methods.iter().find(|m| m.method == method)
    }

    /// Observation matrix: ones on the main diagonal, zeros elsewhere.
    pub fn known_params(&self) -> KnownParams {
        let mut known = KnownParams::isotropic(self.nx, self.sigma_q, self.sigma_r, self.sigma_0);
        if self.ny != self.nx {
            known.h = DMatrix::from_fn(self.ny, self.nx, |i, j| if i == j { 1.0 } else { 0.0 });
            known.r = DMatrix::identity(self.ny, self.ny) * self.sigma_r.powi(2);
        }
        known
    }

    pub fn estimator_config(&self, potential: Option<Potential>) -> crate::EstimatorConfig {
        crate::EstimatorConfig {
            potential,
            epsilon: self.epsilon,
            max_outer: self.max_outer,
            dr: self.dr,
            track_objective: false,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let raw: RawFile = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        raw.into_scenario()
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    scenario: RawScenario,
    #[serde(default)]
    dr: RawDr,
    graphit: Option<RawPenalized>,
    graphem: Option<RawPenalized>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    nx: usize,
    ny: Option<usize>,
    support: usize,
    steps: Option<usize>,
    sigma_q: Option<f64>,
    sigma_r: Option<f64>,
    sigma_0: Option<f64>,
    realizations: Option<usize>,
    seed: Option<u64>,
    methods: Option<Vec<Method>>,
    threshold: Option<f64>,
    true_norm: Option<f64>,
    epsilon: Option<f64>,
    max_outer: Option<usize>,
    threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDr {
    step: Option<f64>,
    relaxation: Option<f64>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    normalize_step: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPenalized {
    family: Option<Family>,
    gamma: OneOrMany,
    lambda: Option<OneOrMany>,
    a: Option<OneOrMany>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn values(self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

fn build_grid(method: Method, default_family: Family, raw: RawPenalized) -> Result<MethodSpec, HarnessError> {
    let family = raw.family.unwrap_or(default_family);
    if method == Method::Graphem && family != Family::L1 {
        return Err(HarnessError::Config("graphem always uses the l1 family".into()));
    }
    let gammas = raw.gamma.values();
    let shapes = match (family, raw.lambda, raw.a) {
        (Family::L1, None, None) => vec![None],
        (Family::L1, _, _) => return Err(HarnessError::Config("l1 takes no shape parameter".into())),
        (Family::Scad, None, Some(a)) => a.values().into_iter().map(Some).collect(),
        (Family::Scad, _, _) => return Err(HarnessError::Config("scad needs `a` (and no `lambda`)".into())),
        (_, Some(l), None) => l.values().into_iter().map(Some).collect(),
        (f, _, _) => return Err(HarnessError::Config(format!("{f} needs `lambda` (and no `a`)"))),
    };
    if gammas.is_empty() || shapes.is_empty() {
        return Err(HarnessError::Config(format!("{method}: empty hyperparameter grid")));
    }
    let grid = gammas
        .iter()
        .flat_map(|&gamma| shapes.iter().map(move |&shape| HyperParams { gamma, shape }))
        .collect();
    Ok(MethodSpec { method, family: Some(family), grid })
}

impl RawFile {
    fn into_scenario(self) -> Result<Scenario, HarnessError> {
        let s = self.scenario;
        let mut sc = Scenario::new(s.name.unwrap_or_else(|| format!("nx{}-s{}", s.nx, s.support)), s.nx, s.support);
        sc.ny = s.ny.unwrap_or(s.nx);
        sc.steps = s.steps.unwrap_or(sc.steps);
        sc.sigma_q = s.sigma_q.unwrap_or(sc.sigma_q);
        sc.sigma_r = s.sigma_r.unwrap_or(sc.sigma_r);
        sc.sigma_0 = s.sigma_0.unwrap_or(sc.sigma_0);
        sc.realizations = s.realizations.unwrap_or(sc.realizations);
        sc.master_seed = s.seed.unwrap_or(sc.master_seed);
        sc.threshold = s.threshold.unwrap_or(sc.threshold);
        sc.true_norm = s.true_norm.unwrap_or(sc.true_norm);
        sc.epsilon = s.epsilon.unwrap_or(sc.epsilon);
        sc.max_outer = s.max_outer.unwrap_or(sc.max_outer);
        sc.threads = s.threads.unwrap_or(sc.threads);
        sc.dr = DrConfig {
            step: self.dr.step.unwrap_or(sc.dr.step),
            relaxation: self.dr.relaxation.unwrap_or(sc.dr.relaxation),
            tol: self.dr.tol.unwrap_or(sc.dr.tol),
            max_iter: self.dr.max_iter.unwrap_or(sc.dr.max_iter),
            normalize_step: self.dr.normalize_step.unwrap_or(sc.dr.normalize_step),
        };

        let mut methods = s.methods.unwrap_or_else(|| Method::ALL.to_vec());
        methods.sort();
        methods.dedup();
        let mut graphit = self.graphit;
        let mut graphem = self.graphem;
        sc.methods = methods
            .into_iter()
            .map(|m| match m {
                Method::Mlem => Ok(MethodSpec::mlem()),
                Method::Graphit => graphit
                    .take()
                    .ok_or_else(|| HarnessError::Config("method graphit needs a [graphit] section".into()))
                    .and_then(|raw| build_grid(m, Family::LogSum, raw)),
                Method::Graphem => graphem
                    .take()
                    .ok_or_else(|| HarnessError::Config("method graphem needs a [graphem] section".into()))
                    .and_then(|raw| build_grid(m, Family::L1, raw)),
            })
            .collect::<Result<_, _>>()?;
        sc.validate()?;
        Ok(sc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
# Table-2 style scenario
[scenario]
name = "demo"
nx = 8
support = 4
steps = 200
realizations = 3
seed = 9

[dr]
tol = 1e-7

[graphit]
family = "logsum"
gamma = [10, 20]
lambda = [0.1, 1.0, 3.0]

[graphem]
gamma = 15
"#;

    #[test]
    fn parses_full_file() {
        let sc = Scenario::from_toml_str(FULL).unwrap();
        assert_eq!(sc.name, "demo");
        assert_eq!((sc.nx, sc.ny, sc.support, sc.steps), (8, 8, 4, 200));
        assert_eq!(sc.master_seed, 9);
        assert_eq!(sc.dr.tol, 1e-7);
        assert_eq!(sc.dr.max_iter, 1000);
        let it = sc.method(Method::Graphit).unwrap();
        assert_eq!(it.grid.len(), 6);
        assert_eq!(it.grid[1], HyperParams { gamma: 10.0, shape: Some(1.0) });
        let em = sc.method(Method::Graphem).unwrap();
        assert_eq!(em.family, Some(Family::L1));
        assert_eq!(em.grid, vec![HyperParams { gamma: 15.0, shape: None }]);
        assert!(sc.method(Method::Mlem).is_some());
        assert_eq!(sc.methods.iter().map(|m| m.method).collect::<Vec<_>>(), Method::ALL.to_vec());
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let sc = Scenario::from_toml_str("[scenario]\nnx = 4\nsupport = 2\nmethods = [\"mlem\"]\n").unwrap();
        assert_eq!(sc.steps, 1000);
        assert_eq!(sc.sigma_0, 1e-4);
        assert_eq!(sc.realizations, 50);
        assert_eq!(sc.name, "nx4-s2");
    }

    #[test]
    fn rejects_bad_files() {
        for text in [
            "[scenario]\nnx = 4\n",
            "[scenario]\nnx = 4\nsupport = 17\nmethods=[\"mlem\"]\n",
            "[scenario]\nnx = 4\nsupport = 2\nmethods = [\"graphit\"]\n",
            "[scenario]\nnx = 4\nsupport = 2\nbogus = 1\n",
            "[scenario]\nnx = 4\nsupport = 2\nmethods=[\"graphit\"]\n[graphit]\nfamily=\"scad\"\ngamma=1\nlambda=2\n",
            "[scenario]\nnx = 4\nsupport = 2\nmethods=[\"graphit\"]\n[graphit]\nfamily=\"scad\"\ngamma=1\na=1.5\n",
            "[scenario]\nnx = 4\nsupport = 2\nsigma_q = 0\nmethods=[\"mlem\"]\n",
            "[scenario]\nnx = 4\nsupport = 2\nmethods=[\"graphem\"]\n[graphem]\nfamily=\"mcp\"\ngamma=1\nlambda=1\n",
        ] {
            assert!(matches!(Scenario::from_toml_str(text), Err(HarnessError::Config(_))), "{text}");
        }
    }

    #[test]
    fn rectangular_observation_matrix() {
        let mut sc = Scenario::new("r", 4, 2);
        sc.ny = 2;
        let k = sc.known_params();
        assert_eq!(k.h.shape(), (2, 4));
        assert_eq!(k.r.shape(), (2, 2));
        assert_eq!(k.h[(1, 1)], 1.0);
        assert_eq!(k.h[(1, 2)], 0.0);
    }
}
