//! The job file: a line-oriented key/value format with `{ ... }` blocks.
//!
//! ```text
//! # skewflow job
//! version 1
//! seed 7
//! norm l1
//! tolerance 1e-9
//! system {
//!   builtin ex_nued
//! }
//! horizon {
//!   n_max 50
//!   states 8
//!   vectors 8
//! }
//! analysis dichotomy {
//!   nu1 -1
//!   nu2 1
//!   projectors coordinate 1 1
//! }
//! output {
//!   report out/report.txt
//!   csv_dir out/csv
//! }
//! ```
//!
//! In strict mode (the default) unknown keys are errors; lenient mode skips
//! them. Parameter preconditions are validated here, before any analysis
//! runs. The full schema is documented in the repository README.

use std::fmt;

use skewflow_core::NormKind;

#[derive(Debug, Clone)]
pub struct JobError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSource {
    Builtin {
        name: String,
        variant: Option<String>,
    },
    Inline {
        dim: usize,
        steps: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonSpec {
    pub n_max: u32,
    pub states: usize,
    pub vectors: usize,
}

impl Default for HorizonSpec {
    fn default() -> Self {
        Self {
            n_max: 50,
            states: 8,
            vectors: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerdictOverrides {
    pub central_k: Option<f64>,
    pub judge_fraction: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputSpec {
    pub report: Option<String>,
    pub csv_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GaugeSpec {
    Identity,
    Power(f64),
    Table(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProjectorSpec {
    Coordinate(Vec<usize>),
    Inline(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisSpec {
    Axioms { triples: usize },
    Growth,
    Decay,
    Es { mu: f64 },
    Eis { mu: f64 },
    Datko { rho: f64, gauge: GaugeSpec },
    Adjoint { gamma: f64, gauge: GaugeSpec },
    Instability { rho: f64, gauge: GaugeSpec },
    Dichotomy { nu1: f64, nu2: f64, projectors: ProjectorSpec },
    DichotomySum { rho1: f64, rho2: f64, gauge: GaugeSpec, projectors: ProjectorSpec },
    Trichotomy { nus: [f64; 4], projectors: ProjectorSpec },
    TrichotomySum { rhos: [f64; 4], projectors: ProjectorSpec },
    FourProjector { mu: f64, nu: f64, projectors: ProjectorSpec },
    Estimate { direction: String, lo: f64, hi: f64, tol: f64 },
}

impl AnalysisSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisSpec::Axioms { .. } => "axioms",
            AnalysisSpec::Growth => "growth",
            AnalysisSpec::Decay => "decay",
            AnalysisSpec::Es { .. } => "es",
            AnalysisSpec::Eis { .. } => "eis",
            AnalysisSpec::Datko { .. } => "datko",
            AnalysisSpec::Adjoint { .. } => "adjoint",
            AnalysisSpec::Instability { .. } => "instability",
            AnalysisSpec::Dichotomy { .. } => "dichotomy",
            AnalysisSpec::DichotomySum { .. } => "dichotomy_sum",
            AnalysisSpec::Trichotomy { .. } => "trichotomy",
            AnalysisSpec::TrichotomySum { .. } => "trichotomy_sum",
            AnalysisSpec::FourProjector { .. } => "four_projector",
            AnalysisSpec::Estimate { .. } => "estimate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisJob {
    pub version: u32,
    pub seed: u64,
    pub norm: NormKind,
    pub tolerance: f64,
    pub system: SystemSource,
    pub horizon: HorizonSpec,
    pub verdict: VerdictOverrides,
    pub analyses: Vec<AnalysisSpec>,
    pub output: OutputSpec,
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    strict: bool,
    errors: Vec<JobError>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, strict: bool) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Self {
            lines,
            pos: 0,
            strict,
            errors: Vec::new(),
        }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let l = self.peek();
        if l.is_some() {
            self.pos += 1;
        }
        l
    }

    fn err(&mut self, line: usize, message: impl Into<String>) {
        self.errors.push(JobError {
            line,
            message: message.into(),
        });
    }

    fn unknown_key(&mut self, line: usize, context: &str, key: &str) {
        if self.strict {
            self.err(line, format!("unknown key `{key}` in {context}"));
        }
    }

    /// Skip to the end of the current block after an error.
    fn skip_block(&mut self) {
        let mut depth = 1;
        while let Some((_, l)) = self.next() {
            if l.ends_with('{') {
                depth += 1;
            } else if l == "}" {
                depth -= 1;
                if depth == 0 {
                    return;
                }
            }
        }
    }
}

fn parse_f64(p: &mut Parser, line: usize, tok: Option<&str>, what: &str) -> Option<f64> {
    match tok.and_then(|t| t.parse::<f64>().ok()) {
        Some(v) if v.is_finite() => Some(v),
        _ => {
            p.err(line, format!("{what} expects a finite number"));
            None
        }
    }
}

fn parse_usize(p: &mut Parser, line: usize, tok: Option<&str>, what: &str) -> Option<usize> {
    match tok.and_then(|t| t.parse::<usize>().ok()) {
        Some(v) => Some(v),
        None => {
            p.err(line, format!("{what} expects a nonnegative integer"));
            None
        }
    }
}

fn parse_gauge(p: &mut Parser, line: usize, toks: &[&str]) -> GaugeSpec {
    match toks.first().copied() {
        Some("identity") | None => GaugeSpec::Identity,
        Some("power") => match parse_f64(p, line, toks.get(1).copied(), "gauge power") {
            Some(v) if v > 0.0 => GaugeSpec::Power(v),
            Some(_) => {
                p.err(line, "gauge power exponent must be > 0");
                GaugeSpec::Identity
            }
            None => GaugeSpec::Identity,
        },
        Some("table") => {
            let mut pairs = Vec::new();
            if let Some(spec) = toks.get(1) {
                for item in spec.split(',') {
                    let mut it = item.split(':');
                    let x = it.next().and_then(|v| v.parse::<f64>().ok());
                    let y = it.next().and_then(|v| v.parse::<f64>().ok());
                    match (x, y) {
                        (Some(x), Some(y)) => pairs.push((x, y)),
                        _ => p.err(line, format!("bad gauge table entry `{item}`")),
                    }
                }
            } else {
                p.err(line, "gauge table expects x:y,x:y,...");
            }
            GaugeSpec::Table(pairs)
        }
        Some(other) => {
            p.err(line, format!("unknown gauge `{other}`"));
            GaugeSpec::Identity
        }
    }
}

/// `projectors coordinate 1 1` on one line, or
/// `projectors inline {` followed by `matrix <d*d floats>` lines.
fn parse_projectors(p: &mut Parser, line: usize, toks: &[&str]) -> Option<ProjectorSpec> {
    match toks.first().copied() {
        Some("coordinate") => {
            let mut sizes = Vec::new();
            for t in &toks[1..] {
                match t.parse::<usize>() {
                    Ok(v) if v > 0 => sizes.push(v),
                    _ => {
                        p.err(line, "coordinate block sizes must be positive integers");
                        return None;
                    }
                }
            }
            if sizes.is_empty() {
                p.err(line, "projectors coordinate expects block sizes");
                return None;
            }
            Some(ProjectorSpec::Coordinate(sizes))
        }
        Some("inline") if toks.last() == Some(&"{") => {
            let mut mats = Vec::new();
            while let Some((ln, l)) = p.next() {
                if l == "}" {
                    break;
                }
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.first() != Some(&"matrix") {
                    p.unknown_key(ln, "projectors inline", toks.first().unwrap_or(&""));
                    continue;
                }
                let mut entries = Vec::new();
                let mut ok = true;
                for t in &toks[1..] {
                    match t.parse::<f64>() {
                        Ok(v) if v.is_finite() => entries.push(v),
                        _ => {
                            p.err(ln, format!("bad matrix entry `{t}`"));
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    mats.push(entries);
                }
            }
            if mats.is_empty() {
                p.err(line, "projectors inline block holds no matrices");
                return None;
            }
            Some(ProjectorSpec::Inline(mats))
        }
        _ => {
            p.err(line, "projectors expects `coordinate <sizes>` or `inline {`");
            None
        }
    }
}

struct AnalysisFields {
    floats: Vec<(String, f64, usize)>,
    strings: Vec<(String, String, usize)>,
    gauge: GaugeSpec,
    projectors: Option<ProjectorSpec>,
}

impl AnalysisFields {
    fn float(&self, key: &str) -> Option<f64> {
        self.floats.iter().find(|(k, _, _)| k == key).map(|(_, v, _)| *v)
    }

    fn string(&self, key: &str) -> Option<&str> {
        self.strings
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    }
}

fn read_analysis_fields(p: &mut Parser, kind: &str, known: &[&str]) -> AnalysisFields {
    let mut out = AnalysisFields {
        floats: Vec::new(),
        strings: Vec::new(),
        gauge: GaugeSpec::Identity,
        projectors: None,
    };
    while let Some((ln, l)) = p.next() {
        if l == "}" {
            break;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        let key = toks[0];
        if !known.contains(&key) {
            if key == "projectors" || key == "gauge" {
                // consume structurally even when the analysis does not use it
                if key == "projectors" {
                    let _ = parse_projectors(p, ln, &toks[1..]);
                }
                p.unknown_key(ln, &format!("analysis {kind}"), key);
            } else {
                p.unknown_key(ln, &format!("analysis {kind}"), key);
            }
            continue;
        }
        match key {
            "gauge" => out.gauge = parse_gauge(p, ln, &toks[1..]),
            "projectors" => out.projectors = parse_projectors(p, ln, &toks[1..]),
            "direction" => {
                let v = toks.get(1).copied().unwrap_or("");
                if v != "stable" && v != "instable" {
                    p.err(ln, "direction must be stable or instable");
                }
                out.strings.push((key.into(), v.into(), ln));
            }
            _ => {
                if let Some(v) = parse_f64(p, ln, toks.get(1).copied(), key) {
                    out.floats.push((key.into(), v, ln));
                }
            }
        }
    }
    out
}

fn require_float(p: &mut Parser, f: &AnalysisFields, header: usize, kind: &str, key: &str) -> Option<f64> {
    match f.float(key) {
        Some(v) => Some(v),
        None => {
            p.err(header, format!("analysis {kind} requires `{key}`"));
            None
        }
    }
}

fn require_projectors(
    p: &mut Parser,
    f: &AnalysisFields,
    header: usize,
    kind: &str,
) -> Option<ProjectorSpec> {
    match &f.projectors {
        Some(v) => Some(v.clone()),
        None => {
            p.err(header, format!("analysis {kind} requires `projectors`"));
            None
        }
    }
}

fn parse_analysis(p: &mut Parser, header_line: usize, kind: &str) -> Option<AnalysisSpec> {
    match kind {
        "axioms" => {
            let f = read_analysis_fields(p, kind, &["triples"]);
            let triples = f.float("triples").map(|v| v as usize).unwrap_or(50);
            if triples == 0 {
                p.err(header_line, "axioms needs at least one triple");
                return None;
            }
            Some(AnalysisSpec::Axioms { triples })
        }
        "growth" => {
            read_analysis_fields(p, kind, &[]);
            Some(AnalysisSpec::Growth)
        }
        "decay" => {
            read_analysis_fields(p, kind, &[]);
            Some(AnalysisSpec::Decay)
        }
        "es" | "eis" => {
            let f = read_analysis_fields(p, kind, &["mu"]);
            let mu = require_float(p, &f, header_line, kind, "mu")?;
            if mu <= 0.0 {
                p.err(header_line, "mu must be > 0");
                return None;
            }
            Some(if kind == "es" {
                AnalysisSpec::Es { mu }
            } else {
                AnalysisSpec::Eis { mu }
            })
        }
        "datko" => {
            let f = read_analysis_fields(p, kind, &["rho", "gauge"]);
            let rho = require_float(p, &f, header_line, kind, "rho")?;
            if rho <= 0.0 {
                p.err(header_line, "rho must be > 0");
                return None;
            }
            Some(AnalysisSpec::Datko { rho, gauge: f.gauge })
        }
        "adjoint" => {
            let f = read_analysis_fields(p, kind, &["gamma", "gauge"]);
            let gamma = require_float(p, &f, header_line, kind, "gamma")?;
            if gamma <= 0.0 {
                p.err(header_line, "gamma must be > 0");
                return None;
            }
            Some(AnalysisSpec::Adjoint { gamma, gauge: f.gauge })
        }
        "instability" => {
            let f = read_analysis_fields(p, kind, &["rho", "rate", "gauge"]);
            // the theorem's rho is negative; `rate` accepts the positive
            // magnitude to reduce sign mistakes
            let rho = match (f.float("rho"), f.float("rate")) {
                (Some(_), Some(_)) => {
                    p.err(header_line, "give either rho or rate, not both");
                    return None;
                }
                (Some(r), None) => r,
                (None, Some(rate)) => -rate,
                (None, None) => {
                    p.err(header_line, "analysis instability requires `rho` or `rate`");
                    return None;
                }
            };
            if rho >= 0.0 {
                p.err(header_line, "instability needs rho < 0 (or rate > 0)");
                return None;
            }
            Some(AnalysisSpec::Instability { rho, gauge: f.gauge })
        }
        "dichotomy" => {
            let f = read_analysis_fields(p, kind, &["nu1", "nu2", "projectors"]);
            let nu1 = require_float(p, &f, header_line, kind, "nu1")?;
            let nu2 = require_float(p, &f, header_line, kind, "nu2")?;
            if !(nu1 <= 0.0 && nu2 >= 0.0) {
                p.err(header_line, "dichotomy needs nu1 <= 0 <= nu2");
                return None;
            }
            let projectors = require_projectors(p, &f, header_line, kind)?;
            Some(AnalysisSpec::Dichotomy { nu1, nu2, projectors })
        }
        "dichotomy_sum" => {
            let f = read_analysis_fields(p, kind, &["rho1", "rho2", "gauge", "projectors"]);
            let rho1 = require_float(p, &f, header_line, kind, "rho1")?;
            let rho2 = require_float(p, &f, header_line, kind, "rho2")?;
            if !(rho1 > 0.0 && rho2 < 0.0) {
                p.err(header_line, "dichotomy_sum needs rho1 > 0 > rho2");
                return None;
            }
            let projectors = require_projectors(p, &f, header_line, kind)?;
            Some(AnalysisSpec::DichotomySum {
                rho1,
                rho2,
                gauge: f.gauge,
                projectors,
            })
        }
        "trichotomy" => {
            let f = read_analysis_fields(p, kind, &["nu1", "nu2", "nu3", "nu4", "projectors"]);
            let nus = [
                require_float(p, &f, header_line, kind, "nu1")?,
                require_float(p, &f, header_line, kind, "nu2")?,
                require_float(p, &f, header_line, kind, "nu3")?,
                require_float(p, &f, header_line, kind, "nu4")?,
            ];
            if !(nus[0] <= nus[1] && nus[1] <= 0.0 && 0.0 <= nus[2] && nus[2] <= nus[3]) {
                p.err(header_line, "trichotomy needs nu1 <= nu2 <= 0 <= nu3 <= nu4");
                return None;
            }
            let projectors = require_projectors(p, &f, header_line, kind)?;
            Some(AnalysisSpec::Trichotomy { nus, projectors })
        }
        "trichotomy_sum" => {
            let f = read_analysis_fields(p, kind, &["rho1", "rho2", "rho3", "rho4", "projectors"]);
            let rhos = [
                require_float(p, &f, header_line, kind, "rho1")?,
                require_float(p, &f, header_line, kind, "rho2")?,
                require_float(p, &f, header_line, kind, "rho3")?,
                require_float(p, &f, header_line, kind, "rho4")?,
            ];
            if rhos.iter().any(|r| *r <= 0.0) {
                p.err(header_line, "trichotomy_sum needs all rates > 0");
                return None;
            }
            let projectors = require_projectors(p, &f, header_line, kind)?;
            Some(AnalysisSpec::TrichotomySum { rhos, projectors })
        }
        "four_projector" => {
            let f = read_analysis_fields(p, kind, &["mu", "nu", "projectors"]);
            let mu = require_float(p, &f, header_line, kind, "mu")?;
            let nu = require_float(p, &f, header_line, kind, "nu")?;
            if !(mu > nu && nu > 0.0) {
                p.err(header_line, "four_projector needs mu > nu > 0");
                return None;
            }
            let projectors = require_projectors(p, &f, header_line, kind)?;
            Some(AnalysisSpec::FourProjector { mu, nu, projectors })
        }
        "estimate" => {
            let f = read_analysis_fields(p, kind, &["direction", "lo", "hi", "tol"]);
            let direction = f.string("direction").unwrap_or("stable").to_string();
            let lo = f.float("lo").unwrap_or(0.05);
            let hi = f.float("hi").unwrap_or(8.0);
            let tol = f.float("tol").unwrap_or(1e-4);
            if !(lo > 0.0 && hi > lo && tol > 0.0) {
                p.err(header_line, "estimate needs 0 < lo < hi and tol > 0");
                return None;
            }
            Some(AnalysisSpec::Estimate { direction, lo, hi, tol })
        }
        other => {
            p.err(header_line, format!("unknown analysis kind `{other}`"));
            p.skip_block();
            None
        }
    }
}

fn parse_system(p: &mut Parser) -> Option<SystemSource> {
    let mut builtin: Option<(String, usize)> = None;
    let mut variant: Option<String> = None;
    let mut inline: Option<(usize, Vec<Vec<f64>>, usize)> = None;
    while let Some((ln, l)) = p.next() {
        if l == "}" {
            break;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "builtin" => match toks.get(1) {
                Some(name) => builtin = Some((name.to_string(), ln)),
                None => p.err(ln, "builtin expects a fixture name"),
            },
            "variant" => match toks.get(1) {
                Some(v) => variant = Some(v.to_string()),
                None => p.err(ln, "variant expects paper|corrected"),
            },
            "inline" if toks.last() == Some(&"{") => {
                let mut dim = 0usize;
                let mut steps = Vec::new();
                while let Some((ln2, l2)) = p.next() {
                    if l2 == "}" {
                        break;
                    }
                    let toks2: Vec<&str> = l2.split_whitespace().collect();
                    match toks2[0] {
                        "dim" => {
                            dim = parse_usize(p, ln2, toks2.get(1).copied(), "dim").unwrap_or(0)
                        }
                        "step" => {
                            let mut entries = Vec::new();
                            for t in &toks2[1..] {
                                match t.parse::<f64>() {
                                    Ok(v) if v.is_finite() => entries.push(v),
                                    _ => p.err(ln2, format!("bad step entry `{t}`")),
                                }
                            }
                            steps.push(entries);
                        }
                        other => p.unknown_key(ln2, "system inline", other),
                    }
                }
                inline = Some((dim, steps, ln));
            }
            other => p.unknown_key(ln, "system", other),
        }
    }
    match (builtin, inline) {
        (Some((name, _)), None) => Some(SystemSource::Builtin { name, variant }),
        (None, Some((dim, steps, ln))) => {
            if dim == 0 {
                p.err(ln, "inline system needs dim >= 1");
                return None;
            }
            if steps.is_empty() {
                p.err(ln, "inline system needs at least one step matrix");
                return None;
            }
            for (k, s) in steps.iter().enumerate() {
                if s.len() != dim * dim {
                    p.err(ln, format!("step {k} has {} entries, expected {}", s.len(), dim * dim));
                    return None;
                }
            }
            Some(SystemSource::Inline { dim, steps })
        }
        (Some((_, ln)), Some(_)) => {
            p.err(ln, "exactly one system source: builtin or inline, not both");
            None
        }
        (None, None) => None,
    }
}

pub fn parse_job(text: &str, strict: bool) -> Result<AnalysisJob, Vec<JobError>> {
    let mut p = Parser::new(text, strict);
    let mut version = 1u32;
    let mut seed = 0u64;
    let mut norm = NormKind::L1;
    let mut tolerance = 1e-9;
    let mut system: Option<SystemSource> = None;
    let mut horizon = HorizonSpec::default();
    let mut verdict = VerdictOverrides::default();
    let mut analyses = Vec::new();
    let mut output = OutputSpec::default();

    while let Some((ln, l)) = p.next() {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "version" => {
                version = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .unwrap_or_else(|| {
                        p.err(ln, "version expects an integer");
                        1
                    })
            }
            "seed" => match toks.get(1).and_then(|t| t.parse::<u64>().ok()) {
                Some(v) => seed = v,
                None => p.err(ln, "seed expects a u64"),
            },
            "norm" => match toks.get(1).and_then(|t| NormKind::parse(t)) {
                Some(v) => norm = v,
                None => p.err(ln, "norm expects l1|l2|linf"),
            },
            "tolerance" => {
                if let Some(v) = parse_f64(&mut p, ln, toks.get(1).copied(), "tolerance") {
                    if v > 0.0 {
                        tolerance = v;
                    } else {
                        p.err(ln, "tolerance must be > 0");
                    }
                }
            }
            "system" if toks.last() == Some(&"{") => {
                if system.is_some() {
                    p.err(ln, "exactly one system block allowed");
                    p.skip_block();
                } else {
                    system = parse_system(&mut p);
                    if system.is_none() {
                        p.err(ln, "system block needs a builtin name or an inline sequence");
                    }
                }
            }
            "horizon" if toks.last() == Some(&"{") => {
                while let Some((ln2, l2)) = p.next() {
                    if l2 == "}" {
                        break;
                    }
                    let t2: Vec<&str> = l2.split_whitespace().collect();
                    match t2[0] {
                        "n_max" => {
                            if let Some(v) = parse_usize(&mut p, ln2, t2.get(1).copied(), "n_max") {
                                if v < 2 {
                                    p.err(ln2, "n_max must be >= 2");
                                } else {
                                    horizon.n_max = v as u32;
                                }
                            }
                        }
                        "states" => {
                            if let Some(v) = parse_usize(&mut p, ln2, t2.get(1).copied(), "states") {
                                if v == 0 {
                                    p.err(ln2, "states must be >= 1");
                                } else {
                                    horizon.states = v;
                                }
                            }
                        }
                        "vectors" => {
                            if let Some(v) = parse_usize(&mut p, ln2, t2.get(1).copied(), "vectors")
                            {
                                horizon.vectors = v;
                            }
                        }
                        other => p.unknown_key(ln2, "horizon", other),
                    }
                }
            }
            "verdict" if toks.last() == Some(&"{") => {
                while let Some((ln2, l2)) = p.next() {
                    if l2 == "}" {
                        break;
                    }
                    let t2: Vec<&str> = l2.split_whitespace().collect();
                    match t2[0] {
                        "central_k" => {
                            verdict.central_k =
                                parse_f64(&mut p, ln2, t2.get(1).copied(), "central_k")
                        }
                        "judge_fraction" => {
                            verdict.judge_fraction =
                                parse_f64(&mut p, ln2, t2.get(1).copied(), "judge_fraction")
                        }
                        other => p.unknown_key(ln2, "verdict", other),
                    }
                }
            }
            "analysis" => {
                let kind = toks.get(1).copied().unwrap_or("");
                if toks.last() != Some(&"{") {
                    p.err(ln, "analysis blocks look like `analysis <kind> {`");
                    continue;
                }
                if let Some(a) = parse_analysis(&mut p, ln, kind) {
                    analyses.push(a);
                }
            }
            "output" if toks.last() == Some(&"{") => {
                while let Some((ln2, l2)) = p.next() {
                    if l2 == "}" {
                        break;
                    }
                    let t2: Vec<&str> = l2.split_whitespace().collect();
                    match t2[0] {
                        "report" => output.report = t2.get(1).map(|s| s.to_string()),
                        "csv_dir" => output.csv_dir = t2.get(1).map(|s| s.to_string()),
                        other => p.unknown_key(ln2, "output", other),
                    }
                }
            }
            other => p.unknown_key(ln, "job", other),
        }
    }

    let system = match system {
        Some(s) => s,
        None => {
            p.err(0, "job defines no system");
            return Err(p.errors);
        }
    };
    if analyses.is_empty() {
        p.err(0, "job requests no analyses");
    }
    if version != 1 {
        p.err(0, format!("unsupported job version {version}"));
    }
    if !p.errors.is_empty() {
        return Err(p.errors);
    }
    Ok(AnalysisJob {
        version,
        seed,
        norm,
        tolerance,
        system,
        horizon,
        verdict,
        analyses,
        output,
    })
}

fn gauge_text(g: &GaugeSpec) -> String {
    match g {
        GaugeSpec::Identity => "identity".into(),
        GaugeSpec::Power(pw) => format!("power {pw}"),
        GaugeSpec::Table(pairs) => {
            let items: Vec<String> = pairs.iter().map(|(x, y)| format!("{x}:{y}")).collect();
            format!("table {}", items.join(","))
        }
    }
}

fn push_projectors(out: &mut String, proj: &ProjectorSpec, indent: &str) {
    match proj {
        ProjectorSpec::Coordinate(sizes) => {
            let s: Vec<String> = sizes.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{indent}projectors coordinate {}\n", s.join(" ")));
        }
        ProjectorSpec::Inline(mats) => {
            out.push_str(&format!("{indent}projectors inline {{\n"));
            for m in mats {
                let s: Vec<String> = m.iter().map(|v| v.to_string()).collect();
                out.push_str(&format!("{indent}  matrix {}\n", s.join(" ")));
            }
            out.push_str(&format!("{indent}}}\n"));
        }
    }
}

/// Canonical text of a job: parsing the emission yields the same job.
pub fn canonical_text(job: &AnalysisJob) -> String {
    let mut out = String::new();
    out.push_str(&format!("version {}\n", job.version));
    out.push_str(&format!("seed {}\n", job.seed));
    out.push_str(&format!("norm {}\n", job.norm.name()));
    out.push_str(&format!("tolerance {}\n", job.tolerance));
    out.push_str("system {\n");
    match &job.system {
        SystemSource::Builtin { name, variant } => {
            out.push_str(&format!("  builtin {name}\n"));
            if let Some(v) = variant {
                out.push_str(&format!("  variant {v}\n"));
            }
        }
        SystemSource::Inline { dim, steps } => {
            out.push_str("  inline {\n");
            out.push_str(&format!("    dim {dim}\n"));
            for s in steps {
                let items: Vec<String> = s.iter().map(|v| v.to_string()).collect();
                out.push_str(&format!("    step {}\n", items.join(" ")));
            }
            out.push_str("  }\n");
        }
    }
    out.push_str("}\n");
    out.push_str("horizon {\n");
    out.push_str(&format!("  n_max {}\n", job.horizon.n_max));
    out.push_str(&format!("  states {}\n", job.horizon.states));
    out.push_str(&format!("  vectors {}\n", job.horizon.vectors));
    out.push_str("}\n");
    if job.verdict.central_k.is_some() || job.verdict.judge_fraction.is_some() {
        out.push_str("verdict {\n");
        if let Some(v) = job.verdict.central_k {
            out.push_str(&format!("  central_k {v}\n"));
        }
        if let Some(v) = job.verdict.judge_fraction {
            out.push_str(&format!("  judge_fraction {v}\n"));
        }
        out.push_str("}\n");
    }
    for a in &job.analyses {
        out.push_str(&format!("analysis {} {{\n", a.kind()));
        match a {
            AnalysisSpec::Axioms { triples } => out.push_str(&format!("  triples {triples}\n")),
            AnalysisSpec::Growth | AnalysisSpec::Decay => {}
            AnalysisSpec::Es { mu } | AnalysisSpec::Eis { mu } => {
                out.push_str(&format!("  mu {mu}\n"))
            }
            AnalysisSpec::Datko { rho, gauge } => {
                out.push_str(&format!("  rho {rho}\n"));
                out.push_str(&format!("  gauge {}\n", gauge_text(gauge)));
            }
            AnalysisSpec::Adjoint { gamma, gauge } => {
                out.push_str(&format!("  gamma {gamma}\n"));
                out.push_str(&format!("  gauge {}\n", gauge_text(gauge)));
            }
            AnalysisSpec::Instability { rho, gauge } => {
                out.push_str(&format!("  rho {rho}\n"));
                out.push_str(&format!("  gauge {}\n", gauge_text(gauge)));
            }
            AnalysisSpec::Dichotomy { nu1, nu2, projectors } => {
                out.push_str(&format!("  nu1 {nu1}\n"));
                out.push_str(&format!("  nu2 {nu2}\n"));
                push_projectors(&mut out, projectors, "  ");
            }
            AnalysisSpec::DichotomySum {
                rho1,
                rho2,
                gauge,
                projectors,
            } => {
                out.push_str(&format!("  rho1 {rho1}\n"));
                out.push_str(&format!("  rho2 {rho2}\n"));
                out.push_str(&format!("  gauge {}\n", gauge_text(gauge)));
                push_projectors(&mut out, projectors, "  ");
            }
            AnalysisSpec::Trichotomy { nus, projectors } => {
                for (i, v) in nus.iter().enumerate() {
                    out.push_str(&format!("  nu{} {v}\n", i + 1));
                }
                push_projectors(&mut out, projectors, "  ");
            }
            AnalysisSpec::TrichotomySum { rhos, projectors } => {
                for (i, v) in rhos.iter().enumerate() {
                    out.push_str(&format!("  rho{} {v}\n", i + 1));
                }
                push_projectors(&mut out, projectors, "  ");
            }
            AnalysisSpec::FourProjector { mu, nu, projectors } => {
                out.push_str(&format!("  mu {mu}\n"));
                out.push_str(&format!("  nu {nu}\n"));
                push_projectors(&mut out, projectors, "  ");
            }
            AnalysisSpec::Estimate { direction, lo, hi, tol } => {
                out.push_str(&format!("  direction {direction}\n"));
                out.push_str(&format!("  lo {lo}\n"));
                out.push_str(&format!("  hi {hi}\n"));
                out.push_str(&format!("  tol {tol}\n"));
            }
        }
        out.push_str("}\n");
    }
    if job.output.report.is_some() || job.output.csv_dir.is_some() {
        out.push_str("output {\n");
        if let Some(r) = &job.output.report {
            out.push_str(&format!("  report {r}\n"));
        }
        if let Some(c) = &job.output.csv_dir {
            out.push_str(&format!("  csv_dir {c}\n"));
        }
        out.push_str("}\n");
    }
    out
}
