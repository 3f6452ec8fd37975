//! Structured report: a deterministic line format that carries everything
//! needed to re-derive each verdict (parameters, per-index coefficient
//! tables, witnesses), plus provenance (job echo, seed, tool version).
//!
//! Re-running an identical job reproduces the report byte for byte except
//! for the `timestamp_unix` line, which lives in its own field exactly so
//! that comparisons can drop it.

use std::fmt::Write as _;

/// One tabular payload; rendered rows double as CSV rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisBlock {
    pub index: usize,
    pub kind: String,
    pub kvs: Vec<(String, String)>,
    pub tables: Vec<Table>,
}

impl AnalysisBlock {
    pub fn new(index: usize, kind: impl Into<String>) -> Self {
        Self {
            index,
            kind: kind.into(),
            kvs: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn kv(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.kvs.push((key.into(), value.into()));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub tool_version: String,
    pub seed: u64,
    pub timestamp_unix: u64,
    pub job_echo: String,
    pub analyses: Vec<AnalysisBlock>,
}

/// 17 significant digits: lossless round-trip of binary doubles.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("skewflow-report v1\n");
        let _ = writeln!(out, "tool_version {}", self.tool_version);
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "timestamp_unix {}", self.timestamp_unix);
        out.push_str("job_echo_begin\n");
        for line in self.job_echo.lines() {
            let _ = writeln!(out, "  {line}");
        }
        out.push_str("job_echo_end\n");
        for a in &self.analyses {
            let _ = writeln!(out, "analysis_begin {} {}", a.index, a.kind);
            for (k, v) in &a.kvs {
                let _ = writeln!(out, "kv {k} {v}");
            }
            for t in &a.tables {
                let _ = writeln!(out, "table_begin {}", t.name);
                let _ = writeln!(out, "header {}", t.header.join(","));
                for row in &t.rows {
                    let _ = writeln!(out, "row {}", row.join(","));
                }
                out.push_str("table_end\n");
            }
            out.push_str("analysis_end\n");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Report, String> {
        let mut lines = text.lines();
        let first = lines.next().ok_or("empty report")?;
        if first != "skewflow-report v1" {
            return Err(format!("not a skewflow report: `{first}`"));
        }
        let mut report = Report {
            tool_version: String::new(),
            seed: 0,
            timestamp_unix: 0,
            job_echo: String::new(),
            analyses: Vec::new(),
        };
        let mut current: Option<AnalysisBlock> = None;
        let mut table: Option<Table> = None;
        let mut in_echo = false;
        for line in lines {
            if in_echo {
                if line == "job_echo_end" {
                    in_echo = false;
                } else {
                    report.job_echo.push_str(line.strip_prefix("  ").unwrap_or(line));
                    report.job_echo.push('\n');
                }
                continue;
            }
            let (key, rest) = match line.split_once(' ') {
                Some((k, r)) => (k, r),
                None => (line, ""),
            };
            match key {
                "tool_version" => report.tool_version = rest.to_string(),
                "seed" => report.seed = rest.parse().map_err(|_| "bad seed")?,
                "timestamp_unix" => {
                    report.timestamp_unix = rest.parse().map_err(|_| "bad timestamp")?
                }
                "job_echo_begin" => in_echo = true,
                "analysis_begin" => {
                    let mut it = rest.splitn(2, ' ');
                    let index = it
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or("bad analysis index")?;
                    let kind = it.next().unwrap_or("").to_string();
                    current = Some(AnalysisBlock::new(index, kind));
                }
                "analysis_end" => {
                    report
                        .analyses
                        .push(current.take().ok_or("analysis_end without begin")?);
                }
                "kv" => {
                    let block = current.as_mut().ok_or("kv outside analysis")?;
                    let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                    block.kv(k, v);
                }
                "table_begin" => {
                    table = Some(Table {
                        name: rest.to_string(),
                        header: Vec::new(),
                        rows: Vec::new(),
                    });
                }
                "header" => {
                    table.as_mut().ok_or("header outside table")?.header =
                        rest.split(',').map(|s| s.to_string()).collect();
                }
                "row" => {
                    table
                        .as_mut()
                        .ok_or("row outside table")?
                        .rows
                        .push(rest.split(',').map(|s| s.to_string()).collect());
                }
                "table_end" => {
                    let t = table.take().ok_or("table_end without begin")?;
                    current.as_mut().ok_or("table outside analysis")?.tables.push(t);
                }
                other => return Err(format!("unknown report line `{other}`")),
            }
        }
        Ok(report)
    }
}

/// The rendered report with the timestamp line removed, for byte-level
/// determinism comparisons.
pub fn strip_timestamp(rendered: &str) -> String {
    rendered
        .lines()
        .filter(|l| !l.starts_with("timestamp_unix "))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parse_round_trip() {
        let mut block = AnalysisBlock::new(1, "es");
        block.kv("verdict", "holds");
        block.kv("exponent", fmt_float(1.0));
        block.tables.push(Table {
            name: "coefficients".into(),
            header: vec!["n".into(), "coefficient".into(), "max_ratio".into(), "verdict".into()],
            rows: vec![
                vec!["0".into(), fmt_float(1.0), fmt_float(0.9), "1".into()],
                vec!["1".into(), fmt_float(1.0), fmt_float(0.8), "1".into()],
            ],
        });
        let report = Report {
            tool_version: "0.1.0".into(),
            seed: 7,
            timestamp_unix: 1_700_000_000,
            job_echo: "version 1\nseed 7\n".into(),
            analyses: vec![block],
        };
        let text = report.render();
        let parsed = Report::parse(&text).unwrap();
        assert_eq!(parsed, report);
        assert_eq!(parsed.render(), text);
    }

    #[test]
    fn timestamp_is_the_only_stripped_line() {
        let report = Report {
            tool_version: "0.1.0".into(),
            seed: 0,
            timestamp_unix: 1,
            job_echo: String::new(),
            analyses: Vec::new(),
        };
        let a = strip_timestamp(&report.render());
        let mut other = report.clone();
        other.timestamp_unix = 999;
        let b = strip_timestamp(&other.render());
        assert_eq!(a, b);
    }

    #[test]
    fn float_format_is_lossless() {
        for x in [1.0, 0.1, 1e-300, 44.13877605315986, std::f64::consts::PI] {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }
}
