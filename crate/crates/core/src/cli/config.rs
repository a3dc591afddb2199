//! Campaign configuration in a flat INI layout:
//!
//! ```text
//! [campaign]
//! weight = circular:alpha=1,beta=2
//! degrees = 100,200
//! distribution = gaussian
//! trials = 2000
//! seed = 7
//!
//! [domain]
//! intervals = all,0:1
//! regions = 0.7071:1,0.8:0.9
//! points = 0,0.8
//!
//! [verify]
//! suite = quick
//!
//! [output]
//! path = out.json
//! format = json
//! ```
//!
//! Every key is optional. `#` and `;` start comment lines.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::equilibrium::Interval;
use crate::error::{Error, Result};
use crate::sampling::CoefficientDistribution;
use crate::verify::Suite;
use crate::weights::parse_weight_spec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("format: expected csv or json, got '{other}'"))),
        }
    }
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// A real interval whose ends may be infinite; `all` is the whole line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl Span {
    pub const ALL: Span = Span {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
}

impl FromStr for Span {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Span::ALL);
        }
        let (lo, hi) = pair(s)?;
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::Config(format!("interval '{s}' needs lo < hi")));
        }
        Ok(Span { lo, hi })
    }
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if *self == Span::ALL {
            write!(f, "all")
        } else {
            write!(f, "{}:{}", self.lo, self.hi)
        }
    }
}

fn pair(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("'{s}' is not of the form lo:hi")))?;
    Ok((number(a)?, number(b)?))
}

fn number<T: FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("'{}' is not a valid number", s.trim())))
}

fn list<T>(s: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(item).collect()
}

fn parse_region(s: &str) -> Result<Interval> {
    let (lo, hi) = pair(s)?;
    if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::Config(format!("region '{s}' needs 0 <= lo <= hi < inf")));
    }
    Ok(Interval { lo, hi })
}

fn join<T>(xs: &[T], f: impl Fn(&T) -> String) -> String {
    xs.iter().map(f).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub weight: String,
    pub degrees: Vec<usize>,
    pub distribution: String,
    pub trials: u64,
    pub seed: u64,
    pub intervals: Vec<Span>,
    pub regions: Vec<Interval>,
    /// Evaluation points for `kernel-check`.
    pub points: Vec<f64>,
    pub suite: Suite,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            weight: "weyl".into(),
            degrees: vec![100],
            distribution: "gaussian".into(),
            trials: 1000,
            seed: 1,
            intervals: vec![Span::ALL],
            regions: Vec::new(),
            points: vec![0.0, 0.5],
            suite: Suite::Quick,
            output_path: None,
            output_format: OutputFormat::Json,
        }
    }
}

impl CampaignConfig {
    /// Parse INI text; keys not given keep their defaults.
    pub fn from_ini(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let at = |e: Error| Error::Config(format!("line {}: {}", i + 1, e.to_string().trim_start_matches("config error: ")));
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_ascii_lowercase();
                if !["campaign", "domain", "verify", "output"].contains(&section.as_str()) {
                    return Err(at(Error::Config(format!("unknown section [{section}]"))));
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(Error::Config(format!("expected key = value, got '{line}'"))))?;
            let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
            cfg.set(&section, &key, value).map_err(at)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        let field = |e: Error| Error::Config(format!("{key}: {}", e.to_string().trim_start_matches("config error: ")));
        match (section, key) {
            ("campaign", "weight") => self.weight = value.to_string(),
            ("campaign", "degrees") => self.degrees = list(value, number).map_err(field)?,
            ("campaign", "distribution") => self.distribution = value.to_string(),
            ("campaign", "trials") => self.trials = number(value).map_err(field)?,
            ("campaign", "seed") => self.seed = number(value).map_err(field)?,
            ("domain", "intervals") => self.intervals = list(value, Span::from_str).map_err(field)?,
            ("domain", "regions") => self.regions = list(value, parse_region).map_err(field)?,
            ("domain", "points") => self.points = list(value, number).map_err(field)?,
            ("verify", "suite") => self.suite = value.parse().map_err(field)?,
            ("output", "path") => self.output_path = (!value.is_empty()).then(|| PathBuf::from(value)),
            ("output", "format") => self.output_format = value.parse().map_err(field)?,
            ("", _) => return Err(Error::Config(format!("key '{key}' appears before any [section]"))),
            _ => return Err(Error::Config(format!("unknown key '{key}' in [{section}]"))),
        }
        Ok(())
    }

    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[campaign]");
        let _ = writeln!(s, "weight = {}", self.weight);
        let _ = writeln!(s, "degrees = {}", join(&self.degrees, |d| d.to_string()));
        let _ = writeln!(s, "distribution = {}", self.distribution);
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "\n[domain]");
        let _ = writeln!(s, "intervals = {}", join(&self.intervals, |i| i.to_string()));
        let _ = writeln!(s, "regions = {}", join(&self.regions, |r| format!("{}:{}", r.lo, r.hi)));
        let _ = writeln!(s, "points = {}", join(&self.points, |x| x.to_string()));
        let _ = writeln!(s, "\n[verify]");
        let suite = match self.suite {
            Suite::Quick => "quick",
            Suite::Full => "full",
        };
        let _ = writeln!(s, "suite = {suite}");
        let _ = writeln!(s, "\n[output]");
        let path = self.output_path.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let _ = writeln!(s, "path = {path}");
        let _ = writeln!(s, "format = {}", self.output_format.as_str());
        s
    }

    /// Check every referenced spec, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        parse_weight_spec(&self.weight).map_err(|e| Error::Config(format!("weight: {e}")))?;
        CoefficientDistribution::parse(&self.distribution).map_err(|e| Error::Config(format!("distribution: {e}")))?;
        if self.degrees.is_empty() || self.degrees.contains(&0) {
            return Err(Error::Config("degrees: need at least one degree, all >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials: must be at least 1".into()));
        }
        if self.points.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("points: must be finite".into()));
        }
        Ok(())
    }
}
