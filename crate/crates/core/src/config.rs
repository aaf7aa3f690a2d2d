//! Run configuration as flat `key=value` lines.
//!
//! Lines are UTF-8, `#` starts a comment, blank lines are ignored. Missing keys
//! take their defaults, unknown keys are rejected. Floats are written in
//! Rust's shortest round-trip form, so `parse(serialize(c)) == c`.
//!
//! Acceptance thresholds are optional keys `max.<metric>` and `min.<metric>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::coeffs::{CoefficientModel, CramerBase};
use crate::error::{Error, Result};
use crate::extremal::{EventThresholds, DEFAULT_C0, DEFAULT_EPS_EVENT, DEFAULT_K_SEED};
use crate::neteval::DEFAULT_EPS_NET;
use crate::perturb::DEFAULT_WINDOW_K;
use crate::pipeline::TrialSetup;
use crate::realcase::DEFAULT_EPS_ZONE;
use crate::stats::default_tau_grid;

pub const SCHEMA_VERSION: u32 = 1;

/// Default exponent of the separation distance `n^{-eps}`.
pub const DEFAULT_SEPARATION_EPS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Jsonl => "jsonl",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" | "json" => Ok(OutputFormat::Jsonl),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

/// Which side of a threshold a metric must stay on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bound {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: CoefficientModel,
    pub n: usize,
    pub eps_net: f64,
    pub eps_event: f64,
    pub c0: f64,
    pub round_to_pow2: bool,
    pub trials: u64,
    pub seed: u64,
    pub window_k: f64,
    pub tau_grid: Vec<f64>,
    /// Closed windows `[a, b]` for intensity and Poisson statistics.
    pub intervals: Vec<(f64, f64)>,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub eps_zone: f64,
    pub k_seed: usize,
    pub separation_eps: f64,
    pub thresholds: BTreeMap<(Bound, String), f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: CoefficientModel::ComplexGaussian,
            n: 256,
            eps_net: DEFAULT_EPS_NET,
            eps_event: DEFAULT_EPS_EVENT,
            c0: DEFAULT_C0,
            round_to_pow2: true,
            trials: 20_000,
            seed: 0,
            window_k: DEFAULT_WINDOW_K,
            tau_grid: default_tau_grid(),
            intervals: vec![(-1.0, 1.0), (-2.0, 2.0)],
            format: OutputFormat::Csv,
            output: None,
            eps_zone: DEFAULT_EPS_ZONE,
            k_seed: DEFAULT_K_SEED,
            separation_eps: DEFAULT_SEPARATION_EPS,
            thresholds: BTreeMap::new(),
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse `{v}`")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_num(key, s.trim())).collect()
}

fn parse_intervals(key: &str, v: &str) -> Result<Vec<(f64, f64)>> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|s| {
            let (a, b) = s
                .trim()
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("{key}: expected a:b, got `{s}`")))?;
            Ok((parse_num(key, a.trim())?, parse_num(key, b.trim())?))
        })
        .collect()
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Parse `key=value` lines on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut kind = "complex".to_string();
        let mut delta = None;
        let mut base = CramerBase::UniformSymmetric;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "schema_version" => {
                    let v: u32 = parse_num(key, value)?;
                    if v != SCHEMA_VERSION {
                        return Err(Error::Config(format!("unsupported schema_version {v}")));
                    }
                }
                "model.kind" => kind = value.to_string(),
                "model.delta" => delta = Some(parse_num(key, value)?),
                "model.base" => base = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
                _ => c.set(key, value)?,
            }
        }
        c.model = match kind.as_str() {
            "complex" => CoefficientModel::ComplexGaussian,
            "real" => CoefficientModel::RealGaussian,
            "cramer" => CoefficientModel::CramerPerturbed {
                delta: delta.unwrap_or_else(|| CoefficientModel::default_delta(c.n)),
                base,
            },
            other => return Err(Error::Config(format!("unknown model.kind `{other}`"))),
        };
        c.validate()?;
        Ok(c)
    }

    /// Set one non-model key from its string form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = parse_num(key, value)?,
            "eps_net" => self.eps_net = parse_num(key, value)?,
            "eps_event" => self.eps_event = parse_num(key, value)?,
            "c0" => self.c0 = parse_num(key, value)?,
            "round_to_pow2" => self.round_to_pow2 = parse_num(key, value)?,
            "trials" => self.trials = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "window_k" => self.window_k = parse_num(key, value)?,
            "tau_grid" => self.tau_grid = parse_list(key, value)?,
            "intervals" => self.intervals = parse_intervals(key, value)?,
            "format" => self.format = value.parse()?,
            "output" => self.output = (!value.is_empty()).then(|| PathBuf::from(value)),
            "eps_zone" => self.eps_zone = parse_num(key, value)?,
            "k_seed" => self.k_seed = parse_num(key, value)?,
            "separation_eps" => self.separation_eps = parse_num(key, value)?,
            _ => {
                let (bound, metric) = match key.split_once('.') {
                    Some(("max", m)) => (Bound::Max, m),
                    Some(("min", m)) => (Bound::Min, m),
                    _ => return Err(Error::Config(format!("unknown key `{key}`"))),
                };
                if metric.is_empty() {
                    return Err(Error::Config(format!("empty metric name in `{key}`")));
                }
                self.thresholds.insert((bound, metric.to_string()), parse_num(key, value)?);
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.model.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.n < 1 {
            return bad("n must be >= 1".into());
        }
        if !(self.eps_net > 0.0 && self.eps_net < 1.0) {
            return bad(format!("eps_net must be in (0,1), got {}", self.eps_net));
        }
        if !(self.eps_event > 0.0 && self.eps_event < 2.0) {
            return bad(format!("eps_event must be in (0,2), got {}", self.eps_event));
        }
        if !(self.c0 > 0.0) {
            return bad(format!("c0 must be positive, got {}", self.c0));
        }
        if !(self.window_k > 0.0) {
            return bad(format!("window_k must be positive, got {}", self.window_k));
        }
        if self.tau_grid.windows(2).any(|w| w[0] >= w[1]) || self.tau_grid.iter().any(|&t| !(t >= 0.0)) {
            return bad("tau_grid must be increasing and non-negative".into());
        }
        if self.intervals.iter().any(|&(a, b)| !(a < b)) {
            return bad("intervals must satisfy a < b".into());
        }
        if !(self.eps_zone > 0.0 && self.eps_zone < 1.0) {
            return bad(format!("eps_zone must be in (0,1), got {}", self.eps_zone));
        }
        if self.k_seed == 0 {
            return bad("k_seed must be positive".into());
        }
        if !(self.separation_eps > 0.0) {
            return bad("separation_eps must be positive".into());
        }
        Ok(())
    }

    /// Canonical `key=value` form (one key per line, fixed order).
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// Ordered `(key, value)` pairs of the canonical form.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut e: Vec<(String, String)> = vec![
            ("schema_version".into(), SCHEMA_VERSION.to_string()),
            ("model.kind".into(), self.model.kind().into()),
        ];
        if let CoefficientModel::CramerPerturbed { delta, base } = self.model {
            e.push(("model.delta".into(), delta.to_string()));
            e.push(("model.base".into(), base.as_str().into()));
        }
        let intervals = join(self.intervals.iter().map(|(a, b)| format!("{a}:{b}")));
        e.extend([
            ("n".into(), self.n.to_string()),
            ("eps_net".into(), self.eps_net.to_string()),
            ("eps_event".into(), self.eps_event.to_string()),
            ("c0".into(), self.c0.to_string()),
            ("round_to_pow2".into(), self.round_to_pow2.to_string()),
            ("trials".into(), self.trials.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("window_k".into(), self.window_k.to_string()),
            ("tau_grid".into(), join(&self.tau_grid)),
            ("intervals".into(), intervals),
            ("format".into(), self.format.as_str().into()),
            (
                "output".into(),
                self.output.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            ),
            ("eps_zone".into(), self.eps_zone.to_string()),
            ("k_seed".into(), self.k_seed.to_string()),
            ("separation_eps".into(), self.separation_eps.to_string()),
        ]);
        for ((bound, metric), v) in &self.thresholds {
            let prefix = match bound {
                Bound::Max => "max",
                Bound::Min => "min",
            };
            e.push((format!("{prefix}.{metric}"), v.to_string()));
        }
        e
    }

    pub fn event_thresholds(&self) -> Result<EventThresholds> {
        EventThresholds::for_degree(self.n, self.eps_event, self.c0)
    }

    pub fn trial_setup(&self) -> Result<TrialSetup> {
        TrialSetup::new(
            self.model,
            self.n,
            self.eps_net,
            self.round_to_pow2,
            self.event_thresholds()?,
            self.k_seed,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!((c.n, c.trials, c.seed), (256, 20_000, 0));
        assert_eq!((c.eps_net, c.c0, c.window_k), (0.01, 10.0, 3.0));
        assert_eq!(c.tau_grid.len(), 101);
        assert_eq!(RunConfig::parse("").unwrap(), c);
    }

    #[test]
    fn round_trip_with_everything_set() {
        let mut c = RunConfig {
            model: CoefficientModel::CramerPerturbed { delta: 0.1 + 0.2, base: CramerBase::Laplace },
            n: 300,
            eps_net: 1.0 / 3.0,
            output: Some(PathBuf::from("out/run.csv")),
            tau_grid: vec![0.0, 0.1, 0.7],
            intervals: vec![(-0.5, 0.25)],
            format: OutputFormat::Jsonl,
            ..RunConfig::default()
        };
        c.set("max.ks", "0.03").unwrap();
        c.set("min.capture_rate", "0.99").unwrap();
        let text = c.serialize();
        assert_eq!(RunConfig::parse(&text).unwrap(), c);
        assert!(text.contains("max.ks=0.03"));
    }

    #[test]
    fn comments_and_blanks() {
        let c = RunConfig::parse("# a run\n\n n = 64  # small\nseed=9\nmodel.kind=real\n").unwrap();
        assert_eq!((c.n, c.seed, c.model), (64, 9, CoefficientModel::RealGaussian));
    }

    #[test]
    fn cramer_delta_defaults_to_inverse_sqrt_n() {
        let c = RunConfig::parse("n=256\nmodel.kind=cramer\n").unwrap();
        assert_eq!(c.model, CoefficientModel::CramerPerturbed { delta: 1.0 / 16.0, base: CramerBase::UniformSymmetric });
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "bogus=1",
            "n",
            "n=abc",
            "model.kind=quaternion",
            "model.kind=cramer\nmodel.delta=1.5",
            "eps_net=0",
            "tau_grid=1,0.5",
            "intervals=1:0",
            "format=xml",
            "schema_version=99",
            "max.=1",
        ] {
            assert!(matches!(RunConfig::parse(text), Err(Error::Config(_))), "{text}");
        }
    }
}
