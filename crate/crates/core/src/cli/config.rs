//! Line-oriented `key = value` configuration with `[section]` headers.
//!
//! ```text
//! # comment
//! [direct]
//! j0 = 1.0
//! gamma = 0.01, 0.01, 0.01
//!
//! [protocol]
//! sender = alice
//! receiver = bob
//! theta = pi/4
//! tau = sweep
//! ```
//!
//! Numbers accept `pi` factors (`3*pi/4`, `-pi`, `2pi`). Lists of three may
//! be written as a single value to apply it to every atom.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::path::PathBuf;

use crate::couplings::PhysicalParams;
use crate::qcore::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            field: None,
            message: message.into(),
        }
    }

    fn at(line: usize, field: Option<&str>, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            field: field.map(str::to_string),
            message: message.into(),
        }
    }

    pub fn field(field: &str, message: impl Into<String>) -> Self {
        Self {
            line: None,
            field: Some(field.to_string()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error")?;
        if let Some(line) = self.line {
            write!(f, " at line {line}")?;
        }
        if let Some(field) = &self.field {
            write!(f, ", field `{field}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Units {
    /// Rates in units of κ (κ = 1).
    Kappa,
    /// Explicit angular frequencies.
    Si,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalBlock {
    pub units: Units,
    pub params: PhysicalParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectBlock {
    pub j0: f64,
    pub gamma: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub enum CouplingSource {
    Physical(PhysicalBlock),
    Direct(DirectBlock),
}

impl CouplingSource {
    pub fn gamma(&self) -> [f64; 3] {
        match self {
            CouplingSource::Physical(p) => p.params.gamma,
            CouplingSource::Direct(d) => d.gamma,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Setting {
    Value(f64),
    Sweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectionKind {
    /// Numerically fitted phase, frozen in the library.
    Derived,
    /// `diag(1, e^{iπ/2})`.
    HalfPi,
    Identity,
}

impl CorrectionKind {
    pub fn name(self) -> &'static str {
        match self {
            CorrectionKind::Derived => "derived",
            CorrectionKind::HalfPi => "half-pi",
            CorrectionKind::Identity => "identity",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolBlock {
    pub sender: usize,
    pub receiver: usize,
    pub theta: Setting,
    pub tau: Setting,
    pub k1: u32,
    pub correction: CorrectionKind,
    pub seed: u64,
    pub samples: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepBlock {
    pub theta: Grid,
    pub tau: Grid,
    pub ratios: Vec<f64>,
    pub time_points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputBlock {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub source: CouplingSource,
    pub protocol: ProtocolBlock,
    pub sweep: SweepBlock,
    pub output: OutputBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: CouplingSource::Direct(DirectBlock {
                j0: 1.0,
                gamma: [0.01; 3],
            }),
            protocol: ProtocolBlock {
                sender: 1,
                receiver: 2,
                theta: Setting::Value(FRAC_PI_4),
                tau: Setting::Value(FRAC_PI_4),
                k1: 0,
                correction: CorrectionKind::Derived,
                seed: 0,
                samples: 100_000,
            },
            sweep: SweepBlock {
                theta: Grid {
                    start: 0.0,
                    stop: 2.0 * PI,
                    count: 64,
                },
                tau: Grid {
                    start: 0.0,
                    stop: PI,
                    count: 65,
                },
                ratios: vec![0.1, 0.03, 0.01, 0.003],
                time_points: 201,
            },
            output: OutputBlock::default(),
        }
    }
}

/// Parses a real number with optional `pi` factors.
pub fn parse_number(text: &str) -> Option<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s.as_str(), None),
    };
    let factor = |f: &str| -> Option<f64> {
        let (sign, body) = match f.strip_prefix('-') {
            Some(rest) => (-1.0, rest),
            None => (1.0, f.strip_prefix('+').unwrap_or(f)),
        };
        if body == "pi" {
            Some(sign * PI)
        } else if let Some(k) = body.strip_suffix("pi") {
            k.parse::<f64>().ok().map(|k| sign * k * PI)
        } else {
            body.parse::<f64>().ok().map(|v| sign * v)
        }
    };
    let mut value = 1.0;
    for part in num.split('*') {
        value *= factor(part)?;
    }
    if let Some(d) = den {
        value /= factor(d)?;
    }
    value.is_finite().then_some(value)
}

fn parse_party(text: &str) -> Option<usize> {
    match text.to_ascii_lowercase().as_str() {
        "alice" | "1" => Some(1),
        "bob" | "2" => Some(2),
        "charlie" | "3" => Some(3),
        _ => None,
    }
}

fn party_name(atom: usize) -> &'static str {
    ["alice", "bob", "charlie"][atom - 1]
}

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

impl Entry<'_> {
    fn err(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::at(self.line, Some(self.key), message)
    }

    fn number(&self) -> Result<f64, ConfigError> {
        parse_number(self.value).ok_or_else(|| self.err(format!("expected a number, got {:?}", self.value)))
    }

    fn positive(&self) -> Result<f64, ConfigError> {
        let v = self.number()?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.err(format!("must be positive, got {v}")))
        }
    }

    fn integer<T: std::str::FromStr>(&self) -> Result<T, ConfigError> {
        self.value
            .parse::<T>()
            .map_err(|_| self.err(format!("expected a nonnegative integer, got {:?}", self.value)))
    }

    fn list(&self) -> Result<Vec<f64>, ConfigError> {
        self.value
            .split(',')
            .map(|v| parse_number(v).ok_or_else(|| self.err(format!("expected a number, got {:?}", v.trim()))))
            .collect()
    }

    fn triple(&self) -> Result<[f64; 3], ConfigError> {
        match self.list()?.as_slice() {
            [v] => Ok([*v; 3]),
            [a, b, c] => Ok([*a, *b, *c]),
            other => Err(self.err(format!("expected 1 or 3 values, got {}", other.len()))),
        }
    }

    fn setting(&self) -> Result<Setting, ConfigError> {
        if self.value.eq_ignore_ascii_case("sweep") {
            Ok(Setting::Sweep)
        } else {
            self.number().map(Setting::Value)
        }
    }

    fn party(&self) -> Result<usize, ConfigError> {
        parse_party(self.value).ok_or_else(|| self.err(format!("unknown party {:?}", self.value)))
    }
}

#[derive(Default)]
struct PhysicalDraft {
    units: Option<Units>,
    kappa: Option<f64>,
    g: Option<f64>,
    delta: Option<f64>,
    eps_re: Option<[f64; 3]>,
    eps_im: Option<[f64; 3]>,
    phi: Option<[f64; 3]>,
    gamma: Option<[f64; 3]>,
}

#[derive(Default)]
struct DirectDraft {
    j0: Option<f64>,
    gamma: Option<[f64; 3]>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut physical: Option<(usize, PhysicalDraft)> = None;
        let mut direct: Option<(usize, DirectDraft)> = None;
        let mut section: Option<String> = None;
        let mut seen: std::collections::HashSet<(String, String)> = Default::default();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at(line, None, format!("malformed section header {content:?}")))?
                    .trim()
                    .to_string();
                match name.as_str() {
                    "physical" => {
                        if physical.is_some() {
                            return Err(ConfigError::at(line, None, "duplicate [physical] section"));
                        }
                        physical = Some((line, PhysicalDraft::default()));
                    }
                    "direct" => {
                        if direct.is_some() {
                            return Err(ConfigError::at(line, None, "duplicate [direct] section"));
                        }
                        direct = Some((line, DirectDraft::default()));
                    }
                    "protocol" | "sweep" | "output" => {}
                    other => return Err(ConfigError::at(line, None, format!("unknown section [{other}]"))),
                }
                section = Some(name);
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line, None, format!("expected `key = value`, got {content:?}")))?;
            let entry = Entry {
                line,
                key: key.trim(),
                value: value.trim(),
            };
            let Some(sec) = section.as_deref() else {
                return Err(entry.err("key outside of any [section]"));
            };
            if !seen.insert((sec.to_string(), entry.key.to_string())) {
                return Err(entry.err("duplicate key"));
            }
            match sec {
                "physical" => {
                    let d = &mut physical.as_mut().expect("section opened").1;
                    match entry.key {
                        "units" => {
                            d.units = Some(match entry.value.to_ascii_lowercase().as_str() {
                                "kappa" => Units::Kappa,
                                "si" => Units::Si,
                                _ => return Err(entry.err("expected `kappa` or `SI`")),
                            })
                        }
                        "kappa" => d.kappa = Some(entry.positive()?),
                        "g" => d.g = Some(entry.positive()?),
                        "delta" => d.delta = Some(entry.number()?),
                        "eps_re" => d.eps_re = Some(entry.triple()?),
                        "eps_im" => d.eps_im = Some(entry.triple()?),
                        "phi" => d.phi = Some(entry.triple()?),
                        "gamma" => d.gamma = Some(entry.triple()?),
                        _ => return Err(entry.err("unknown key in [physical]")),
                    }
                }
                "direct" => {
                    let d = &mut direct.as_mut().expect("section opened").1;
                    match entry.key {
                        "j0" => d.j0 = Some(entry.positive()?),
                        "gamma" => d.gamma = Some(entry.triple()?),
                        _ => return Err(entry.err("unknown key in [direct]")),
                    }
                }
                "protocol" => {
                    let p = &mut cfg.protocol;
                    match entry.key {
                        "sender" => p.sender = entry.party()?,
                        "receiver" => p.receiver = entry.party()?,
                        "theta" => p.theta = entry.setting()?,
                        "tau" => p.tau = entry.setting()?,
                        "k1" => p.k1 = entry.integer()?,
                        "seed" => p.seed = entry.integer()?,
                        "samples" => {
                            p.samples = entry.integer()?;
                            if p.samples == 0 {
                                return Err(entry.err("must be at least 1"));
                            }
                        }
                        "correction" => {
                            p.correction = match entry.value.to_ascii_lowercase().as_str() {
                                "derived" => CorrectionKind::Derived,
                                "half-pi" => CorrectionKind::HalfPi,
                                "identity" => CorrectionKind::Identity,
                                _ => return Err(entry.err("expected `derived`, `half-pi` or `identity`")),
                            }
                        }
                        _ => return Err(entry.err("unknown key in [protocol]")),
                    }
                }
                "sweep" => {
                    let s = &mut cfg.sweep;
                    let count = |e: &Entry| -> Result<usize, ConfigError> {
                        let n: usize = e.integer()?;
                        if n < 2 {
                            return Err(e.err(format!("sweep counts must be at least 2, got {n}")));
                        }
                        Ok(n)
                    };
                    match entry.key {
                        "theta_start" => s.theta.start = entry.number()?,
                        "theta_stop" => s.theta.stop = entry.number()?,
                        "theta_count" => s.theta.count = count(&entry)?,
                        "tau_start" => s.tau.start = entry.number()?,
                        "tau_stop" => s.tau.stop = entry.number()?,
                        "tau_count" => s.tau.count = count(&entry)?,
                        "time_points" => s.time_points = count(&entry)?,
                        "ratios" => {
                            s.ratios = entry.list()?;
                            if s.ratios.iter().any(|r| *r <= 0.0) {
                                return Err(entry.err("ratios must be positive"));
                            }
                        }
                        _ => return Err(entry.err("unknown key in [sweep]")),
                    }
                }
                "output" => match entry.key {
                    "path" => cfg.output.path = Some(PathBuf::from(entry.value)),
                    "format" => {
                        cfg.output.format = Some(match entry.value.to_ascii_lowercase().as_str() {
                            "csv" => Format::Csv,
                            "json" => Format::Json,
                            _ => return Err(entry.err("expected `csv` or `json`")),
                        })
                    }
                    _ => return Err(entry.err("unknown key in [output]")),
                },
                _ => unreachable!("sections validated at header"),
            }
        }

        cfg.source = match (physical, direct) {
            (Some(_), Some((line, _))) => {
                return Err(ConfigError::at(
                    line,
                    None,
                    "[physical] and [direct] are mutually exclusive",
                ))
            }
            (Some((line, d)), None) => CouplingSource::Physical(finish_physical(line, d)?),
            (None, Some((line, d))) => CouplingSource::Direct(DirectBlock {
                j0: d
                    .j0
                    .ok_or_else(|| ConfigError::at(line, Some("j0"), "missing in [direct]"))?,
                gamma: d
                    .gamma
                    .ok_or_else(|| ConfigError::at(line, Some("gamma"), "missing in [direct]"))?,
            }),
            (None, None) => cfg.source,
        };
        if let CouplingSource::Direct(d) = &cfg.source {
            if d.gamma.iter().any(|g| *g < 0.0) {
                return Err(ConfigError::field("gamma", "laser strengths must be nonnegative"));
            }
        }
        if cfg.protocol.sender == cfg.protocol.receiver {
            return Err(ConfigError::field("receiver", "sender and receiver must differ"));
        }
        Ok(cfg)
    }
}

fn finish_physical(line: usize, d: PhysicalDraft) -> Result<PhysicalBlock, ConfigError> {
    let missing = |f: &str| ConfigError::at(line, Some(f), "missing in [physical]");
    let units = d.units.unwrap_or(Units::Kappa);
    let kappa = match (units, d.kappa) {
        (Units::Kappa, None) => 1.0,
        (Units::Kappa, Some(1.0)) => 1.0,
        (Units::Kappa, Some(k)) => {
            return Err(ConfigError::at(
                line,
                Some("kappa"),
                format!("must be 1 in kappa units, got {k}"),
            ))
        }
        (Units::Si, k) => k.ok_or_else(|| missing("kappa"))?,
    };
    let re = d.eps_re.ok_or_else(|| missing("eps_re"))?;
    let im = d.eps_im.unwrap_or([0.0; 3]);
    let params = PhysicalParams {
        kappa,
        g: d.g.ok_or_else(|| missing("g"))?,
        delta: d.delta.ok_or_else(|| missing("delta"))?,
        epsilon: std::array::from_fn(|i| Complex64::new(re[i], im[i])),
        phi: d.phi.unwrap_or([0.0; 3]),
        gamma: d.gamma.unwrap_or([0.0; 3]),
    };
    params
        .validate()
        .map_err(|e| ConfigError::at(line, None, e.to_string()))?;
    Ok(PhysicalBlock { units, params })
}

fn triple(v: [f64; 3]) -> String {
    format!("{:?}, {:?}, {:?}", v[0], v[1], v[2])
}

fn setting(s: Setting) -> String {
    match s {
        Setting::Value(v) => format!("{v:?}"),
        Setting::Sweep => "sweep".to_string(),
    }
}

/// Canonical text form; parses back to an equal `RunConfig`.
impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            CouplingSource::Physical(b) => {
                let p = &b.params;
                writeln!(f, "[physical]")?;
                writeln!(f, "units = {}", if b.units == Units::Kappa { "kappa" } else { "SI" })?;
                writeln!(f, "kappa = {:?}", p.kappa)?;
                writeln!(f, "g = {:?}", p.g)?;
                writeln!(f, "delta = {:?}", p.delta)?;
                writeln!(f, "eps_re = {}", triple(p.epsilon.map(|e| e.re)))?;
                writeln!(f, "eps_im = {}", triple(p.epsilon.map(|e| e.im)))?;
                writeln!(f, "phi = {}", triple(p.phi))?;
                writeln!(f, "gamma = {}", triple(p.gamma))?;
            }
            CouplingSource::Direct(d) => {
                writeln!(f, "[direct]")?;
                writeln!(f, "j0 = {:?}", d.j0)?;
                writeln!(f, "gamma = {}", triple(d.gamma))?;
            }
        }
        let p = &self.protocol;
        writeln!(f, "\n[protocol]")?;
        writeln!(f, "sender = {}", party_name(p.sender))?;
        writeln!(f, "receiver = {}", party_name(p.receiver))?;
        writeln!(f, "theta = {}", setting(p.theta))?;
        writeln!(f, "tau = {}", setting(p.tau))?;
        writeln!(f, "k1 = {}", p.k1)?;
        writeln!(f, "correction = {}", p.correction.name())?;
        writeln!(f, "seed = {}", p.seed)?;
        writeln!(f, "samples = {}", p.samples)?;
        let s = &self.sweep;
        writeln!(f, "\n[sweep]")?;
        writeln!(f, "theta_start = {:?}", s.theta.start)?;
        writeln!(f, "theta_stop = {:?}", s.theta.stop)?;
        writeln!(f, "theta_count = {}", s.theta.count)?;
        writeln!(f, "tau_start = {:?}", s.tau.start)?;
        writeln!(f, "tau_stop = {:?}", s.tau.stop)?;
        writeln!(f, "tau_count = {}", s.tau.count)?;
        let ratios: Vec<String> = s.ratios.iter().map(|r| format!("{r:?}")).collect();
        writeln!(f, "ratios = {}", ratios.join(", "))?;
        writeln!(f, "time_points = {}", s.time_points)?;
        if self.output.path.is_some() || self.output.format.is_some() {
            writeln!(f, "\n[output]")?;
            if let Some(path) = &self.output.path {
                writeln!(f, "path = {}", path.display())?;
            }
            if let Some(format) = self.output.format {
                writeln!(f, "format = {}", format.name())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn numbers_with_pi() {
        assert_eq!(parse_number("1.5"), Some(1.5));
        assert_eq!(parse_number("pi"), Some(PI));
        assert_eq!(parse_number("pi/4"), Some(PI / 4.0));
        assert_eq!(parse_number("3*pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_number("-pi / 2"), Some(-PI / 2.0));
        assert_eq!(parse_number("2pi"), Some(2.0 * PI));
        assert_eq!(parse_number("1e-3"), Some(1e-3));
        assert_eq!(parse_number("abc"), None);
        assert_eq!(parse_number("1/0"), None);
        assert_eq!(parse_number(""), None);
    }

    #[test]
    fn empty_config_is_default() {
        assert_eq!(RunConfig::parse("# nothing\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn full_config() {
        let text = "\
[direct]
j0 = 2.0
gamma = 0.01, 0.02, 0.03   # per atom

[protocol]
sender = bob
receiver = charlie
theta = 0.3
tau = sweep
k1 = 1
correction = half-pi
seed = 17

[sweep]
tau_start = 0
tau_stop = pi
tau_count = 5

[output]
format = csv
";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(
            cfg.source,
            CouplingSource::Direct(DirectBlock {
                j0: 2.0,
                gamma: [0.01, 0.02, 0.03]
            })
        );
        assert_eq!((cfg.protocol.sender, cfg.protocol.receiver), (2, 3));
        assert_eq!(cfg.protocol.tau, Setting::Sweep);
        assert_eq!(cfg.protocol.correction, CorrectionKind::HalfPi);
        assert_eq!(
            cfg.sweep.tau,
            Grid {
                start: 0.0,
                stop: PI,
                count: 5
            }
        );
        assert_eq!(cfg.output.format, Some(Format::Csv));
    }

    #[test]
    fn physical_block() {
        let cfg = RunConfig::parse("[physical]\ng = 0.02\ndelta = 1\neps_re = 1\nphi = 0.3\n").unwrap();
        let CouplingSource::Physical(b) = cfg.source else {
            panic!("expected physical")
        };
        assert_eq!(b.units, Units::Kappa);
        assert_eq!(b.params.kappa, 1.0);
        assert_eq!(b.params.phi, [0.3; 3]);
        assert_eq!(b.params.epsilon[2], Complex64::new(1.0, 0.0));

        let err = RunConfig::parse("[physical]\nkappa = 2\ng = 0.02\ndelta = 1\neps_re = 1\n").unwrap_err();
        assert_eq!(err.field.as_deref(), Some("kappa"));
        assert!(RunConfig::parse("[physical]\nunits = SI\nkappa = 2\ng = 0.02\ndelta = 1\neps_re = 1\n").is_ok());
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let err = RunConfig::parse("[protocol]\n\ntau = banana\n").unwrap_err();
        assert_eq!(err.line, Some(3));
        assert_eq!(err.field.as_deref(), Some("tau"));
        assert!(err.to_string().contains("line 3"));

        let err = RunConfig::parse("[sweep]\ntau_count = 1\n").unwrap_err();
        assert_eq!((err.line, err.field.as_deref()), (Some(2), Some("tau_count")));

        assert_eq!(RunConfig::parse("theta = 1\n").unwrap_err().line, Some(1));
        assert_eq!(RunConfig::parse("[nope]\n").unwrap_err().line, Some(1));
        assert_eq!(
            RunConfig::parse("[protocol]\nwhat = 1\n").unwrap_err().field.as_deref(),
            Some("what")
        );
        assert!(RunConfig::parse("[protocol]\ntheta = 1\ntheta = 2\n").is_err());
        assert!(RunConfig::parse("[protocol]\nsender = bob\nreceiver = 2\n").is_err());
        assert!(RunConfig::parse("[direct]\nj0 = 1\n").is_err());
        assert!(RunConfig::parse("[direct]\nj0 = 1\ngamma = 1, 2\n").is_err());
        assert!(RunConfig::parse("[direct]\nj0=1\ngamma=1\n[physical]\ng=0.1\ndelta=1\neps_re=1\n").is_err());
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        let setting = prop_oneof![Just(Setting::Sweep), (-10.0..10.0f64).prop_map(Setting::Value)];
        (
            prop::bool::ANY,
            (0.01..5.0f64, prop::array::uniform3(0.0..2.0f64)),
            (
                0.001..0.5f64,
                0.1..3.0f64,
                prop::array::uniform3(-2.0..2.0f64),
                -3.0..3.0f64,
            ),
            (
                1usize..=3,
                0usize..2,
                setting.clone(),
                setting,
                0u32..4,
                any::<u64>(),
                1u64..1_000_000,
            ),
            (
                -5.0..5.0f64,
                2usize..500,
                prop::collection::vec(0.0001..1.0f64, 1..6),
                2usize..1000,
            ),
            prop::option::of(prop_oneof![Just(Format::Csv), Just(Format::Json)]),
        )
            .prop_map(|(phys, (j0, gamma), (g, delta, eps, phi), proto, sweep, format)| {
                let source = if phys {
                    CouplingSource::Physical(PhysicalBlock {
                        units: Units::Kappa,
                        params: PhysicalParams {
                            kappa: 1.0,
                            g,
                            delta,
                            epsilon: eps.map(|e| Complex64::new(e, -e / 3.0)),
                            phi: [phi; 3],
                            gamma,
                        },
                    })
                } else {
                    CouplingSource::Direct(DirectBlock { j0, gamma })
                };
                let mut cfg = RunConfig {
                    source,
                    ..RunConfig::default()
                };
                let (sender, offset, theta, tau, k1, seed, samples) = proto;
                cfg.protocol.sender = sender;
                cfg.protocol.receiver = (sender + offset) % 3 + 1;
                cfg.protocol.theta = theta;
                cfg.protocol.tau = tau;
                cfg.protocol.k1 = k1;
                cfg.protocol.seed = seed;
                cfg.protocol.samples = samples;
                cfg.sweep.theta.start = sweep.0;
                cfg.sweep.tau.count = sweep.1;
                cfg.sweep.ratios = sweep.2;
                cfg.sweep.time_points = sweep.3;
                cfg.output.format = format;
                cfg
            })
    }

    proptest! {
        #[test]
        fn dump_round_trips(cfg in arb_config()) {
            let text = cfg.to_string();
            prop_assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
        }
    }
}
