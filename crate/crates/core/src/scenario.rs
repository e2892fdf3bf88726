//! TOML scenario files.
//!
//! A scenario names a model (an impulsive Duffing oscillator or the scalar
//! Riccati test equation `u' = 1 + u^2`), its coefficients and impulses,
//! and the tolerances, horizons and grids the experiments run with. Loading
//! validates every field and reports all problems together, each with the
//! path of the offending field.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::duffing::{
    area_identity, duffing_system, AffineImpulse, CoefficientSignal, DuffingParams, DuffingSystem, FourierMode,
    ImpulseEntry, SignalClass,
};
use crate::impulsive::{ConstantJump, ImpulseSchedule, ImpulsiveSystem, JumpMap};
use crate::ode::{Tolerances, VectorField};
use crate::poincare::{MapOptions, TimeOneMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueKind {
    /// A value outside its admissible range or a structural mismatch.
    Range,
    /// Impulse times not strictly increasing inside `(0, 1)`.
    ConditionH,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioIssue {
    pub path: String,
    pub kind: IssueKind,
    pub message: String,
}

impl fmt::Display for ScenarioIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            IssueKind::Range => "range",
            IssueKind::ConditionH => "condition (H)",
        };
        write!(f, "{}: {tag}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(String),
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("invalid scenario:\n{}", format_issues(.0))]
    Invalid(Vec<ScenarioIssue>),
}

fn format_issues(issues: &[ScenarioIssue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

impl ScenarioError {
    pub fn issues(&self) -> &[ScenarioIssue] {
        match self {
            ScenarioError::Invalid(v) => v,
            _ => &[],
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default)]
    model: Option<String>,
    n: Option<usize>,
    amplitude: Option<f64>,
    eps0: Option<f64>,
    #[serde(default)]
    coefficients: Option<Vec<RawCoefficient>>,
    #[serde(default)]
    impulses: Vec<RawImpulse>,
    riccati: Option<RawRiccati>,
    initial: Option<Vec<f64>>,
    #[serde(default)]
    tolerances: RawTolerances,
    #[serde(default)]
    horizons: RawHorizons,
    grid: Option<RawGrid>,
    area_grid: Option<RawGrid>,
    seeds: Option<RawSeeds>,
    #[serde(default)]
    detection: RawDetection,
    #[serde(default)]
    smoothing: RawSmoothing,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoefficient {
    kind: String,
    modes: Option<Vec<(u32, f64, f64)>>,
    value: Option<f64>,
    values: Option<Vec<f64>>,
    gamma: Option<f64>,
    amplitude: Option<f64>,
    levels: Option<u32>,
    holder: Option<f64>,
    #[serde(default)]
    integrable: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawImpulse {
    time: f64,
    kind: String,
    alpha: Option<f64>,
    betas: Option<Vec<f64>>,
    beta: Option<f64>,
    phase: Option<f64>,
    power: Option<u32>,
    i: Option<[f64; 3]>,
    j: Option<[f64; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRiccati {
    period: f64,
    times: Vec<f64>,
    jumps: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    rtol: Option<f64>,
    atol: Option<f64>,
    escape_radius: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHorizons {
    iterates: Option<usize>,
    rotation: Option<usize>,
    circle: Option<usize>,
    time: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x: [f64; 2],
    y: [f64; 2],
    points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeeds {
    x: [f64; 2],
    count: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetection {
    residual_tol: Option<f64>,
    order: Option<usize>,
    convergence_tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSmoothing {
    gamma: Option<f64>,
    levels: Option<u32>,
    sigma_exponents: Option<[i32; 2]>,
}

/// Rectangular grid of `points x points` initial conditions.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GridSpec {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub points: usize,
}

impl GridSpec {
    /// Row-major in `y`, both edges included.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let step = |r: [f64; 2], i: usize| {
            if self.points > 1 {
                r[0] + (r[1] - r[0]) * i as f64 / (self.points - 1) as f64
            } else {
                r[0]
            }
        };
        let mut out = Vec::with_capacity(self.points * self.points);
        for j in 0..self.points {
            for i in 0..self.points {
                out.push([step(self.x, i), step(self.y, j)]);
            }
        }
        out
    }
}

/// Radial ladder of seeds `(x, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SeedLadder {
    pub x: [f64; 2],
    pub count: usize,
}

impl SeedLadder {
    pub fn seeds(&self) -> Vec<[f64; 2]> {
        (0..self.count)
            .map(|k| {
                let frac = if self.count > 1 { k as f64 / (self.count - 1) as f64 } else { 0.0 };
                [self.x[0] + (self.x[1] - self.x[0]) * frac, 0.0]
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Horizons {
    /// Map iterates for sweeps and section plots.
    pub iterates: usize,
    pub rotation: usize,
    pub circle: usize,
    /// End time for `simulate`.
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DetectionSettings {
    pub residual_tol: f64,
    pub order: usize,
    pub convergence_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SmoothingSettings {
    pub gamma: f64,
    pub levels: u32,
    /// `sigma = 2^-k` for `k` in this inclusive range.
    pub sigma_exponents: [i32; 2],
}

#[derive(Debug, Clone)]
pub struct DuffingModel {
    pub params: DuffingParams<f64>,
    pub times: Vec<f64>,
    pub impulses: Vec<ImpulseEntry<f64>>,
}

impl DuffingModel {
    pub fn system(&self) -> crate::Result<DuffingSystem<f64>> {
        duffing_system(self.params.clone(), self.times.clone(), self.impulses.clone())
    }

    pub fn time_one_map(&self, options: MapOptions<f64>) -> crate::Result<TimeOneMap<f64, crate::duffing::DuffingField<f64>>> {
        Ok(TimeOneMap::new(self.system()?, options)?.with_winding_degree(self.params.n()))
    }

    /// Area identity of every impulse, sampled at a few states.
    pub fn area_identity_values(&self) -> Vec<f64> {
        const STATES: [(f64, f64); 4] = [(1.0, 0.5), (-2.0, 3.0), (0.3, -1.7), (4.0, 0.0)];
        let mut out = Vec::new();
        for e in &self.impulses {
            for (x, y) in STATES {
                out.push(area_identity(e, x, y));
            }
        }
        out
    }
}

/// `u' = 1 + u^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RiccatiField;

impl VectorField<f64, 1> for RiccatiField {
    fn eval(&self, _t: f64, u: &[f64; 1]) -> [f64; 1] {
        [1.0 + u[0] * u[0]]
    }

    fn jacobian(&self, _t: f64, u: &[f64; 1]) -> [[f64; 1]; 1] {
        [[2.0 * u[0]]]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiModel {
    pub period: f64,
    pub times: Vec<f64>,
    pub jumps: Vec<f64>,
}

impl RiccatiModel {
    pub fn system(&self) -> crate::Result<ImpulsiveSystem<f64, RiccatiField, 1>> {
        let schedule = ImpulseSchedule::with_period(self.times.clone(), self.period)?;
        let jumps = self
            .jumps
            .iter()
            .map(|&d| Arc::new(ConstantJump([d])) as Arc<dyn JumpMap<f64, 1>>)
            .collect();
        ImpulsiveSystem::new(RiccatiField, schedule, jumps)
    }
}

#[derive(Debug, Clone)]
pub enum Model {
    Duffing(DuffingModel),
    Riccati(RiccatiModel),
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub amplitude: f64,
    pub eps0: Option<f64>,
    pub initial: Vec<f64>,
    pub tolerances: Tolerances<f64>,
    pub escape_radius: f64,
    pub horizons: Horizons,
    pub grid: GridSpec,
    pub area_grid: GridSpec,
    pub seeds: SeedLadder,
    pub detection: DetectionSettings,
    pub smoothing: SmoothingSettings,
    /// Non-fatal findings, e.g. impulses outside the boundedness hypotheses.
    pub warnings: Vec<String>,
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ScenarioError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        Validator::default().run(raw)
    }

    pub fn duffing(&self) -> Option<&DuffingModel> {
        match &self.model {
            Model::Duffing(d) => Some(d),
            Model::Riccati(_) => None,
        }
    }

    pub fn map_options(&self) -> MapOptions<f64> {
        MapOptions {
            tol: self.tolerances,
            escape_radius: self.escape_radius,
            ..MapOptions::default()
        }
    }
}

#[derive(Default)]
struct Validator {
    issues: Vec<ScenarioIssue>,
    warnings: Vec<String>,
}

impl Validator {
    fn range(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.issues.push(ScenarioIssue {
            path: path.into(),
            kind: IssueKind::Range,
            message: message.into(),
        });
    }

    fn condition_h(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.issues.push(ScenarioIssue {
            path: path.into(),
            kind: IssueKind::ConditionH,
            message: message.into(),
        });
    }

    fn positive(&mut self, path: &str, value: Option<f64>, default: f64) -> f64 {
        let v = value.unwrap_or(default);
        if !(v.is_finite() && v > 0.0) {
            self.range(path, format!("must be finite and positive, got {v}"));
        }
        v
    }

    fn grid(&mut self, path: &str, raw: Option<RawGrid>, default: GridSpec) -> GridSpec {
        let Some(g) = raw else { return default };
        for (axis, r) in [("x", g.x), ("y", g.y)] {
            if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
                self.range(format!("{path}.{axis}"), format!("need finite lo <= hi, got {r:?}"));
            }
        }
        if g.points == 0 {
            self.range(format!("{path}.points"), "must be at least 1");
        }
        GridSpec {
            x: g.x,
            y: g.y,
            points: g.points,
        }
    }

    fn times(&mut self, path: &str, times: &[f64], period: f64, allow_zero: bool) {
        for (k, &t) in times.iter().enumerate() {
            let low_ok = if allow_zero { t >= 0.0 } else { t > 0.0 };
            if !(t.is_finite() && low_ok && t < period) {
                let interval = if allow_zero { "[0, period)" } else { "(0, 1)" };
                self.condition_h(format!("{path}[{k}].time"), format!("time {t} must lie in {interval}"));
            }
            if k > 0 && !(times[k - 1] < t) {
                self.condition_h(
                    format!("{path}[{k}].time"),
                    format!("times must be strictly increasing, got {} then {t}", times[k - 1]),
                );
            }
        }
    }

    fn coefficient(&mut self, path: &str, c: &RawCoefficient) -> Option<CoefficientSignal<f64>> {
        let class = match (c.integrable, c.holder) {
            (true, Some(_)) => {
                self.range(path, "give either holder or integrable, not both");
                return None;
            }
            (true, None) => SignalClass::Integrable,
            (false, h) => {
                let g = h.unwrap_or(1.0);
                if !(g > 0.0 && g <= 1.0) {
                    self.range(format!("{path}.holder"), format!("Hölder exponent must lie in (0, 1], got {g}"));
                    return None;
                }
                SignalClass::Holder(g)
            }
        };
        let need = |v: &mut Self, field: &str, present: bool| {
            if !present {
                v.range(format!("{path}.{field}"), format!("required for kind \"{}\"", c.kind));
            }
            present
        };
        let built = match c.kind.as_str() {
            "zero" => Ok(CoefficientSignal::zero()),
            "constant" => {
                if !need(self, "value", c.value.is_some()) {
                    return None;
                }
                Ok(CoefficientSignal::constant(c.value.unwrap()))
            }
            "fourier" => {
                if !need(self, "modes", c.modes.is_some()) {
                    return None;
                }
                let modes = c.modes.as_ref().unwrap().iter().map(|&(k, a, b)| FourierMode::new(k, a, b)).collect();
                CoefficientSignal::fourier(modes, class)
            }
            "samples" => {
                if !need(self, "values", c.values.is_some()) {
                    return None;
                }
                CoefficientSignal::samples(c.values.clone().unwrap(), class)
            }
            "lacunary" => {
                if !need(self, "gamma", c.gamma.is_some()) {
                    return None;
                }
                let gamma = c.gamma.unwrap();
                if c.holder.is_some_and(|h| h != gamma) {
                    self.range(format!("{path}.holder"), "lacunary signals carry their own exponent gamma");
                }
                CoefficientSignal::lacunary(gamma, c.amplitude.unwrap_or(1.0), c.levels.unwrap_or(12))
            }
            other => {
                self.range(
                    format!("{path}.kind"),
                    format!("unknown coefficient kind \"{other}\" (zero, constant, fourier, samples, lacunary)"),
                );
                return None;
            }
        };
        match built {
            Ok(s) => Some(s),
            Err(e) => {
                self.range(path, e.to_string());
                None
            }
        }
    }

    fn impulse(&mut self, path: &str, r: &RawImpulse) -> Option<ImpulseEntry<f64>> {
        let alpha = r.alpha.unwrap_or(0.0);
        let missing = |v: &mut Self, field: &str| {
            v.range(format!("{path}.{field}"), format!("required for kind \"{}\"", r.kind));
        };
        let entry = match r.kind.as_str() {
            "constant-shift" => ImpulseEntry::ConstantShift { alpha },
            "poly-kick" => match &r.betas {
                Some(b) => ImpulseEntry::PolynomialKick { alpha, betas: b.clone() },
                None => {
                    missing(self, "betas");
                    return None;
                }
            },
            "sin-kick" => match r.beta {
                Some(beta) => ImpulseEntry::SinusoidalKick {
                    alpha,
                    beta,
                    phase: r.phase.unwrap_or(0.0),
                },
                None => {
                    missing(self, "beta");
                    return None;
                }
            },
            "gauss-kick" => match (r.beta, r.power) {
                (Some(beta), Some(power)) => {
                    if power == 0 || power % 2 == 1 {
                        self.range(format!("{path}.power"), format!("must be even and positive, got {power}"));
                        return None;
                    }
                    ImpulseEntry::GaussianKick { alpha, beta, power }
                }
                _ => {
                    missing(self, "beta and power");
                    return None;
                }
            },
            "affine-kick" => ImpulseEntry::Custom(Arc::new(AffineImpulse {
                i: r.i.unwrap_or([0.0; 3]),
                j: r.j.unwrap_or([0.0; 3]),
            })),
            other => {
                self.range(
                    format!("{path}.kind"),
                    format!("unknown impulse kind \"{other}\" (constant-shift, poly-kick, sin-kick, gauss-kick, affine-kick)"),
                );
                return None;
            }
        };
        Some(entry)
    }

    fn duffing(&mut self, raw: &RawScenario) -> Option<DuffingModel> {
        let n = match raw.n {
            Some(n) if n >= 1 => n,
            Some(n) => {
                self.range("n", format!("must be at least 1, got {n}"));
                return None;
            }
            None => {
                self.range("n", "required for the duffing model");
                return None;
            }
        };
        let coefficients = match &raw.coefficients {
            None => vec![CoefficientSignal::zero(); 2 * n + 1],
            Some(list) => {
                if list.len() != 2 * n + 1 {
                    self.range("coefficients", format!("need {} entries p_0..p_{} for n = {n}, got {}", 2 * n + 1, 2 * n, list.len()));
                }
                list.iter()
                    .enumerate()
                    .map(|(i, c)| self.coefficient(&format!("coefficients[{i}]"), c))
                    .collect::<Option<Vec<_>>>()?
            }
        };
        let bound = 1.0 - 1.0 / n as f64;
        for (i, c) in coefficients.iter().enumerate().skip(n + 1) {
            if c.is_zero() {
                continue;
            }
            match c.holder_exponent() {
                Some(g) if g > bound => {
                    if n == 1 && g < 1.0 {
                        self.warnings.push(format!(
                            "coefficients[{i}]: gamma = {g} satisfies gamma > 1 - 1/n = 0; any gamma > 0 is admissible for n = 1"
                        ));
                    }
                }
                Some(g) => self.range(
                    format!("coefficients[{i}].holder"),
                    format!("gamma = {g} must exceed 1 - 1/n = {bound} for n = {n}"),
                ),
                None => self.range(format!("coefficients[{i}]"), format!("p_{i} with i > n must be declared Hölder")),
            }
        }
        let mut times: Vec<f64> = raw.impulses.iter().map(|r| r.time).collect();
        let mut impulses = raw
            .impulses
            .iter()
            .enumerate()
            .map(|(k, r)| self.impulse(&format!("impulses[{k}]"), r))
            .collect::<Vec<_>>();
        self.times("impulses", &times, 1.0, false);
        if times.is_empty() {
            // Identity impulse: the solvers need at least one impulse per period.
            times.push(0.5);
            impulses.push(Some(ImpulseEntry::ConstantShift { alpha: 0.0 }));
        }
        let impulses = impulses.into_iter().collect::<Option<Vec<_>>>()?;
        for (k, e) in impulses.iter().enumerate() {
            for issue in e.compliance_issues(n) {
                self.warnings.push(format!("impulses[{k}]: {issue}"));
            }
        }
        let params = match DuffingParams::new(n, coefficients) {
            Ok(p) => p,
            Err(e) => {
                self.range("coefficients", e.to_string());
                return None;
            }
        };
        let model = DuffingModel { params, times, impulses };
        for (k, chunk) in model.area_identity_values().chunks(4).enumerate() {
            if chunk.iter().any(|v| v.abs() > 1e-12 && (v + 2.0).abs() > 1e-12) {
                self.warnings.push(format!("impulses[{k}]: area identity is not in {{0, -2}} (impulse is not area preserving)"));
            }
        }
        Some(model)
    }

    fn riccati(&mut self, raw: &RawScenario) -> Option<RiccatiModel> {
        let Some(r) = &raw.riccati else {
            self.range("riccati", "required for the riccati model");
            return None;
        };
        if !(r.period.is_finite() && r.period > 0.0) {
            self.range("riccati.period", format!("must be positive, got {}", r.period));
            return None;
        }
        if r.times.is_empty() {
            self.range("riccati.times", "need at least one impulse time");
        }
        if r.times.len() != r.jumps.len() {
            self.range("riccati.jumps", format!("need one jump per time ({}), got {}", r.times.len(), r.jumps.len()));
        }
        self.times("riccati.times", &r.times, r.period, true);
        Some(RiccatiModel {
            period: r.period,
            times: r.times.clone(),
            jumps: r.jumps.clone(),
        })
    }

    fn run(mut self, raw: RawScenario) -> Result<Scenario, ScenarioError> {
        let model_name = raw.model.clone().unwrap_or_else(|| "duffing".into());
        let model = match model_name.as_str() {
            "duffing" => self.duffing(&raw).map(Model::Duffing),
            "riccati" => self.riccati(&raw).map(Model::Riccati),
            other => {
                self.range("model", format!("unknown model \"{other}\" (duffing, riccati)"));
                None
            }
        };
        if raw.name.trim().is_empty() {
            self.range("name", "must not be empty");
        }
        let amplitude = self.positive("amplitude", raw.amplitude, 1.0);
        let eps0 = raw.eps0.map(|e| self.positive("eps0", Some(e), 1.0));
        let rtol = self.positive("tolerances.rtol", raw.tolerances.rtol, 1e-10);
        let atol = self.positive("tolerances.atol", raw.tolerances.atol, 1e-12);
        let escape_radius = self.positive("tolerances.escape_radius", raw.tolerances.escape_radius, 1e6);
        let horizons = Horizons {
            iterates: raw.horizons.iterates.unwrap_or(10_000),
            rotation: raw.horizons.rotation.unwrap_or(4096),
            circle: raw.horizons.circle.unwrap_or(8192),
            time: self.positive("horizons.time", raw.horizons.time, 10.0),
        };
        for (field, v) in [("iterates", horizons.iterates), ("rotation", horizons.rotation)] {
            if v == 0 {
                self.range(format!("horizons.{field}"), "must be at least 1");
            }
        }
        if horizons.circle < 512 {
            self.range("horizons.circle", format!("circle detection needs at least 512 iterates, got {}", horizons.circle));
        }
        let dim = match &model {
            Some(Model::Riccati(_)) => 1,
            _ => 2,
        };
        let initial = raw.initial.clone().unwrap_or_else(|| vec![if dim == 1 { 0.0 } else { 1.0 }, 0.0][..dim].to_vec());
        if initial.len() != dim || initial.iter().any(|v| !v.is_finite()) {
            self.range("initial", format!("need {dim} finite values, got {initial:?}"));
        }
        let grid = self.grid(
            "grid",
            raw.grid,
            GridSpec {
                x: [-5.0, 5.0],
                y: [-5.0, 5.0],
                points: 20,
            },
        );
        let area_grid = self.grid(
            "area_grid",
            raw.area_grid,
            GridSpec {
                x: [1.0, 3.0],
                y: [-1.0, 1.0],
                points: 10,
            },
        );
        let seeds = match raw.seeds {
            Some(s) => {
                if !(s.x[0] > 0.0 && s.x[0] <= s.x[1] && s.x[1].is_finite()) {
                    self.range("seeds.x", format!("need 0 < lo <= hi, got {:?}", s.x));
                }
                if s.count == 0 {
                    self.range("seeds.count", "must be at least 1");
                }
                SeedLadder { x: s.x, count: s.count }
            }
            None => SeedLadder {
                x: [amplitude, 2.0 * amplitude],
                count: 16,
            },
        };
        let detection = DetectionSettings {
            residual_tol: self.positive("detection.residual_tol", raw.detection.residual_tol, 1e-4),
            order: raw.detection.order.unwrap_or(32),
            convergence_tol: self.positive("detection.convergence_tol", raw.detection.convergence_tol, 1e-6),
        };
        if detection.order == 0 {
            self.range("detection.order", "must be at least 1");
        }
        let smoothing = SmoothingSettings {
            gamma: raw.smoothing.gamma.unwrap_or(0.6),
            levels: raw.smoothing.levels.unwrap_or(12),
            sigma_exponents: raw.smoothing.sigma_exponents.unwrap_or([3, 9]),
        };
        if !(smoothing.gamma > 0.0 && smoothing.gamma <= 1.0) {
            self.range("smoothing.gamma", format!("must lie in (0, 1], got {}", smoothing.gamma));
        }
        if smoothing.sigma_exponents[0] >= smoothing.sigma_exponents[1] {
            self.range("smoothing.sigma_exponents", "need lo < hi");
        }
        match model {
            Some(model) if self.issues.is_empty() => Ok(Scenario {
                name: raw.name,
                model,
                amplitude,
                eps0,
                initial,
                tolerances: Tolerances::new(rtol, atol),
                escape_radius,
                horizons,
                grid,
                area_grid,
                seeds,
                detection,
                smoothing,
                warnings: self.warnings,
            }),
            _ => Err(ScenarioError::Invalid(self.issues)),
        }
    }
}

#[cfg(test)]
mod tests;
