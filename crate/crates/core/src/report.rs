//! JSON-lines scan reports.
//!
//! One object per line with keys `kind`, `n`, `m`, `rejecting_prime` and
//! `counters` in that order, absent fields omitted. The last line of a
//! finished report is the summary. Lines are flushed as they are written so a
//! long scan can be followed with `tail -f`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::Natural;
use crate::search_engine::{ScanEvent, SearchSummary};

/// Summary counter that depends on the machine, not the scan.
pub const WALL_TIME_COUNTER: &str = "wall_time_ms";

const REJECTED_PREFIX: &str = "rejected_by_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    Solution,
    Survivor,
    Unresolved,
    Summary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportLine {
    pub kind: LineKind,
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<serde_json::Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejecting_prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counters: Option<BTreeMap<String, u64>>,
}

fn json_integer(value: &Natural) -> serde_json::Number {
    serde_json::Number::from_str(&value.to_string()).expect("integers are valid JSON numbers")
}

impl ReportLine {
    fn bare(kind: LineKind, n: u64) -> Self {
        ReportLine {
            kind,
            n,
            m: None,
            rejecting_prime: None,
            counters: None,
        }
    }

    pub fn from_event(event: &ScanEvent) -> Self {
        match event {
            ScanEvent::Solution { n, m } => ReportLine {
                m: Some(json_integer(m)),
                ..Self::bare(LineKind::Solution, *n)
            },
            ScanEvent::Survivor { n } => Self::bare(LineKind::Survivor, *n),
            ScanEvent::Unresolved { n } => Self::bare(LineKind::Unresolved, *n),
        }
    }

    pub fn summary(summary: &SearchSummary) -> Self {
        let mut counters = BTreeMap::new();
        counters.insert("from_n".to_string(), summary.from_n);
        counters.insert("to_n".to_string(), summary.to_n);
        counters.insert("scanned".to_string(), summary.scanned());
        counters.insert("solutions".to_string(), summary.solutions.len() as u64);
        counters.insert("survivors".to_string(), summary.survivors_exact_checked);
        counters.insert("unresolved".to_string(), summary.unresolved.len() as u64);
        counters.insert("symbols".to_string(), summary.symbols_evaluated);
        counters.insert(
            WALL_TIME_COUNTER.to_string(),
            summary.wall_time.as_millis() as u64,
        );
        for (p, c) in &summary.rejections_by_prime {
            counters.insert(format!("{REJECTED_PREFIX}{p}"), *c);
        }
        ReportLine {
            counters: Some(counters),
            ..Self::bare(LineKind::Summary, summary.to_n)
        }
    }

    pub fn m_value(&self) -> Option<Natural> {
        self.m.as_ref().and_then(|m| Natural::from_str(&m.to_string()).ok())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report lines always serialize")
    }

    pub fn parse(line: &str) -> Result<Self> {
        serde_json::from_str(line)
            .map_err(|e| Error::Domain(format!("bad report line {line:?}: {e}")))
    }
}

/// Writes report lines to any sink, flushing after each.
pub struct ReportWriter<W: Write> {
    out: W,
}

impl<W: Write> ReportWriter<W> {
    pub fn new(out: W) -> Self {
        ReportWriter { out }
    }

    pub fn write_line(&mut self, line: &ReportLine) -> io::Result<()> {
        self.out.write_all(line.to_json().as_bytes())?;
        self.out.write_all(b"\n")?;
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Writes every line and then the summary.
pub fn emit_report<W: Write>(
    lines: impl IntoIterator<Item = ReportLine>,
    summary: &SearchSummary,
    out: W,
) -> io::Result<()> {
    let mut writer = ReportWriter::new(out);
    for line in lines {
        writer.write_line(&line)?;
    }
    writer.write_line(&ReportLine::summary(summary))
}

/// Rebuilds a summary from a summary line plus the detail lines before it.
pub fn summary_from_lines(summary: &ReportLine, details: &[ReportLine]) -> Result<SearchSummary> {
    let bad = |what: &str| Error::Domain(format!("report summary: {what}"));
    let counters = summary.counters.as_ref().ok_or_else(|| bad("no counters"))?;
    let get = |key: &str| counters.get(key).copied().ok_or_else(|| bad(&format!("missing {key}")));
    let mut rebuilt = SearchSummary {
        from_n: get("from_n")?,
        to_n: get("to_n")?,
        survivors_exact_checked: get("survivors")?,
        symbols_evaluated: get("symbols")?,
        wall_time: Duration::from_millis(get(WALL_TIME_COUNTER)?),
        ..SearchSummary::default()
    };
    for (key, &count) in counters {
        if let Some(p) = key.strip_prefix(REJECTED_PREFIX) {
            let p = p.parse().map_err(|_| bad(&format!("bad counter {key}")))?;
            rebuilt.rejections_by_prime.insert(p, count);
        }
    }
    for line in details {
        match line.kind {
            LineKind::Solution => {
                let m = line.m_value().ok_or_else(|| bad("solution without m"))?;
                rebuilt.solutions.push((line.n, m));
            }
            LineKind::Unresolved => rebuilt.unresolved.push(line.n),
            _ => {}
        }
    }
    if rebuilt.solutions.len() as u64 != get("solutions")?
        || rebuilt.unresolved.len() as u64 != get("unresolved")?
    {
        return Err(bad("counts disagree with the detail lines"));
    }
    Ok(rebuilt)
}

/// What an earlier, checkpointed run left in its report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorReport {
    /// Detail lines up to the checkpoint.
    pub details: Vec<ReportLine>,
    /// `None` when the run stopped before writing its summary.
    pub summary: Option<SearchSummary>,
}

impl PriorReport {
    /// Reads the report of a run whose checkpoint sits at `checkpoint_n`.
    /// A missing file reads as empty.
    pub fn load(path: &Path, checkpoint_n: u64) -> Result<Self> {
        let file = match fs::File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Ok(PriorReport {
                    details: Vec::new(),
                    summary: None,
                })
            }
            Err(e) => return Err(Error::io(path, e)),
        };
        let mut details = Vec::new();
        let mut summary_line = None;
        for line in io::BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed = ReportLine::parse(&line)?;
            if parsed.kind == LineKind::Summary {
                summary_line = Some(parsed);
            } else if parsed.n <= checkpoint_n {
                details.push(parsed);
            }
        }
        let summary = match summary_line {
            Some(line) => {
                let s = summary_from_lines(&line, &details)?;
                if s.to_n.max(1) != checkpoint_n.max(1) {
                    return Err(Error::Checkpoint(crate::error::CheckpointError::Malformed(
                        format!(
                            "report ends at n = {} but the checkpoint is at n = {checkpoint_n}",
                            s.to_n
                        ),
                    )));
                }
                Some(s)
            }
            None => None,
        };
        Ok(PriorReport { details, summary })
    }

    /// Rewrites `path` with only the detail lines, ready for appending.
    pub fn rewrite(&self, path: &Path) -> Result<()> {
        let mut text = String::new();
        for line in &self.details {
            text.push_str(&line.to_json());
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}
