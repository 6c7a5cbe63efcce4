//! Serializable reports and their human, JSON and CSV renderings.
//!
//! Rationals are carried as `"p/q"` (or `"p"`) strings so that JSON and CSV
//! round-trip them losslessly; decimals are added only on request.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use pithresh_core::thresholds::TableSpec;
use pithresh_core::{Kind, MethodId, Rational, ScenarioId, ThresholdValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Human,
    Json,
    Csv,
}

/// Exact text of a rational.
pub fn rat(r: &Rational) -> String {
    r.to_string()
}

/// Parse the exact text back.
pub fn parse_rat(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e: pithresh_core::Error| e.to_string())
}

fn approx(r: &Rational, decimals: Option<usize>) -> Option<String> {
    decimals.map(|d| r.to_decimal(d))
}

fn shown(r: &Rational, decimals: Option<usize>) -> String {
    match decimals {
        Some(d) => format!("{r} (~{})", r.to_decimal(d)),
        None => r.to_string(),
    }
}

/// Something the CLI can print in every format.
pub trait Report: Serialize {
    type Row: Serialize;
    /// Flat rows for CSV.
    fn rows(&self) -> Vec<Self::Row>;
    fn human(&self, decimals: Option<usize>) -> String;
}

pub fn render<R: Report>(report: &R, format: Format, decimals: Option<usize>) -> Result<String, String> {
    match format {
        Format::Human => Ok(report.human(decimals)),
        Format::Json => serde_json::to_string_pretty(report).map(|s| s + "\n").map_err(|e| e.to_string()),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in report.rows() {
                w.serialize(row).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
    }
}

// ---------------------------------------------------------------- count

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitteeEntry {
    pub members: Vec<String>,
    /// Smallest final maximal load, for Phragmén's methods.
    pub max_load: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub method: String,
    pub seats: usize,
    pub committees: Vec<CommitteeEntry>,
    pub apportionments: Vec<BTreeMap<String, usize>>,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub outcome: usize,
    pub name: String,
    pub seats: usize,
    pub max_load: Option<String>,
}

impl Report for CountReport {
    type Row = CountRow;

    fn rows(&self) -> Vec<CountRow> {
        let mut rows = Vec::new();
        for (i, c) in self.committees.iter().enumerate() {
            for m in &c.members {
                rows.push(CountRow { outcome: i + 1, name: m.clone(), seats: 1, max_load: c.max_load.clone() });
            }
        }
        for (i, a) in self.apportionments.iter().enumerate() {
            for (p, s) in a {
                rows.push(CountRow { outcome: i + 1, name: p.clone(), seats: *s, max_load: None });
            }
        }
        rows
    }

    fn human(&self, decimals: Option<usize>) -> String {
        let mut out = format!("{}, S = {}\n", self.method, self.seats);
        let n = self.committees.len() + self.apportionments.len();
        let _ = writeln!(out, "{n} outcome{}{}", if n == 1 { "" } else { "s" }, if self.truncated { " (truncated)" } else { "" });
        for c in &self.committees {
            let _ = write!(out, "  {{{}}}", c.members.join(", "));
            if let Some(l) = &c.max_load {
                let r = parse_rat(l).expect("own output");
                let _ = write!(out, "  max load {}", shown(&r, decimals));
            }
            out.push('\n');
        }
        for a in &self.apportionments {
            let parts: Vec<String> = a.iter().map(|(p, s)| format!("{p}={s}")).collect();
            let _ = writeln!(out, "  {}", parts.join(" "));
        }
        out
    }
}

// ------------------------------------------------------------ thresholds

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub method: String,
    pub scenario: String,
    pub kind: String,
    pub ell: usize,
    pub seats: usize,
    pub status: String,
    pub side: String,
    pub value: Option<String>,
    pub lower: Option<String>,
    pub upper: Option<String>,
    pub conjectured: bool,
    pub source: String,
    pub approx: Option<String>,
}

impl ThresholdRow {
    pub fn new(
        method: &MethodId,
        scenario: ScenarioId,
        kind: Kind,
        ell: usize,
        seats: usize,
        t: &ThresholdValue,
        decimals: Option<usize>,
    ) -> Self {
        ThresholdRow {
            method: method.to_string(),
            scenario: scenario.to_string(),
            kind: kind.to_string(),
            ell,
            seats,
            status: t.status.to_string(),
            side: t.side.to_string(),
            value: t.value.as_ref().map(rat),
            lower: t.lower.as_ref().map(rat),
            upper: t.upper.as_ref().map(rat),
            conjectured: t.conjectured,
            source: t.source.to_string(),
            approx: t.value.as_ref().and_then(|v| approx(v, decimals)),
        }
    }

    /// Short cell text: `v`, `v-`, `>=v`, `<=v`, `[l,u]` or `?`, with `*`
    /// marking a conjectured value.
    pub fn cell(&self, decimals: Option<usize>) -> String {
        let num = |s: &Option<String>| {
            let r = parse_rat(s.as_deref().expect("present")).expect("own output");
            match decimals {
                Some(d) => r.to_decimal(d),
                None => r.to_string(),
            }
        };
        let mut s = match self.status.as_str() {
            "exact" => format!("{}{}", num(&self.value), self.side),
            "lower-bound" => format!(">={}", num(&self.value)),
            "upper-bound" => format!("<={}", num(&self.value)),
            "interval" => format!("[{},{}]", num(&self.lower), num(&self.upper)),
            _ => "?".to_string(),
        };
        if self.conjectured {
            s.push('*');
        }
        s
    }
}

fn pi_name(kind: &str) -> &'static str {
    if kind == "pihat" {
        "pihat"
    } else {
        "pi"
    }
}

/// One threshold, with its full description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdReport {
    #[serde(flatten)]
    pub row: ThresholdRow,
    pub rendered: String,
}

impl ThresholdReport {
    pub fn new(row: ThresholdRow, t: &ThresholdValue, decimals: Option<usize>) -> Self {
        ThresholdReport { row, rendered: t.render(decimals) }
    }
}

impl Report for ThresholdReport {
    type Row = ThresholdRow;

    fn rows(&self) -> Vec<ThresholdRow> {
        vec![self.row.clone()]
    }

    fn human(&self, _decimals: Option<usize>) -> String {
        let r = &self.row;
        format!(
            "{}_{}({}, {}) for {} = {}\n  status {}, source {}\n",
            pi_name(&r.kind),
            r.scenario,
            r.ell,
            r.seats,
            r.method,
            self.rendered,
            r.status,
            r.source
        )
    }
}

/// A grid of thresholds over `1 <= ell <= S <= smax`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub name: String,
    pub title: String,
    pub smax: usize,
    pub cells: Vec<ThresholdRow>,
}

impl TableReport {
    pub fn new(spec: &TableSpec, grid: &[Vec<ThresholdValue>], decimals: Option<usize>) -> Self {
        let cells = grid
            .iter()
            .enumerate()
            .flat_map(|(si, row)| {
                row.iter().enumerate().map(move |(li, t)| {
                    ThresholdRow::new(&spec.method, spec.scenario, spec.kind, li + 1, si + 1, t, decimals)
                })
            })
            .collect();
        TableReport { name: spec.name.to_string(), title: spec.title.to_string(), smax: grid.len(), cells }
    }

    pub fn get(&self, ell: usize, seats: usize) -> Option<&ThresholdRow> {
        self.cells.iter().find(|c| c.ell == ell && c.seats == seats)
    }
}

fn grid(header: &str, columns: usize, rows: &[(String, Vec<String>)]) -> String {
    let label_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(header.len());
    let mut widths = vec![0usize; columns];
    for (i, w) in widths.iter_mut().enumerate() {
        *w = (i + 1).to_string().len();
    }
    for (_, cells) in rows {
        for (i, c) in cells.iter().enumerate() {
            widths[i] = widths[i].max(c.len());
        }
    }
    let mut out = format!("{header:>label_w$} |");
    for (i, w) in widths.iter().enumerate() {
        let _ = write!(out, " {:>w$}", i + 1);
    }
    out.push('\n');
    let _ = writeln!(out, "{}-+{}", "-".repeat(label_w), "-".repeat(widths.iter().map(|w| w + 1).sum()));
    for (label, cells) in rows {
        let mut line = format!("{label:>label_w$} |");
        for (i, c) in cells.iter().enumerate() {
            let _ = write!(line, " {:>w$}", c, w = widths[i]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

impl Report for TableReport {
    type Row = ThresholdRow;

    fn rows(&self) -> Vec<ThresholdRow> {
        self.cells.clone()
    }

    fn human(&self, decimals: Option<usize>) -> String {
        let kind = self.cells.first().map_or("pi", |c| pi_name(&c.kind));
        let mut out = format!("{}: {} ({kind}; rows S, columns ell)\n", self.name, self.title);
        let rows: Vec<(String, Vec<String>)> = (1..=self.smax)
            .map(|s| {
                let cells = (1..=s).map(|l| self.get(l, s).map_or(String::new(), |c| c.cell(decimals))).collect();
                (s.to_string(), cells)
            })
            .collect();
        out.push_str(&grid("S", self.smax, &rows));
        if self.cells.iter().any(|c| c.conjectured) {
            out.push_str("* lower bound believed exact\n");
        }
        out
    }
}

// -------------------------------------------------------------- sequences

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub n: usize,
    pub a: String,
    pub b: String,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceTable {
    pub rows: Vec<SequenceRow>,
}

impl Report for SequenceTable {
    type Row = SequenceRow;

    fn rows(&self) -> Vec<SequenceRow> {
        self.rows.clone()
    }

    fn human(&self, decimals: Option<usize>) -> String {
        let show = |s: &str| {
            let r = parse_rat(s).expect("own output");
            match decimals {
                Some(d) => format!("{r} ~{}", r.to_decimal(d)),
                None => r.to_string(),
            }
        };
        let mut out = String::from("sequences a_n, b_n, c_n; rows n\n");
        let head = ["a", "b", "c"];
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| vec![show(&r.a), show(&r.b), r.c.clone()])
            .collect();
        let mut widths: Vec<usize> = head.iter().map(|h| h.len()).collect();
        for row in &body {
            for (i, c) in row.iter().enumerate() {
                widths[i] = widths[i].max(c.len());
            }
        }
        let nw = self.rows.iter().map(|r| r.n.to_string().len()).max().unwrap_or(1);
        let mut line = format!("{:>nw$} |", "n");
        for (h, w) in head.iter().zip(&widths) {
            let _ = write!(line, " {h:>w$}");
        }
        let _ = writeln!(out, "{line}");
        let _ = writeln!(out, "{}-+{}", "-".repeat(nw), "-".repeat(widths.iter().map(|w| w + 1).sum()));
        for (r, row) in self.rows.iter().zip(&body) {
            let mut line = format!("{:>nw$} |", r.n);
            for (c, w) in row.iter().zip(&widths) {
                let _ = write!(line, " {c:>w$}");
            }
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

/// A single sequence term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqReport {
    pub which: String,
    pub n: usize,
    pub value: String,
    pub approx: Option<String>,
    /// The program behind `alpha`, when requested.
    pub lp: Option<String>,
}

impl Report for SeqReport {
    type Row = SeqReport;

    fn rows(&self) -> Vec<SeqReport> {
        vec![self.clone()]
    }

    fn human(&self, _decimals: Option<usize>) -> String {
        let mut out = self.lp.clone().unwrap_or_default();
        match &self.approx {
            Some(a) => {
                let _ = writeln!(out, "{} (~{a})", self.value);
            }
            None => {
                let _ = writeln!(out, "{}", self.value);
            }
        }
        out
    }
}

// ------------------------------------------------------------------ check

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub method: String,
    pub scenario: String,
    pub ell: usize,
    pub seats: usize,
    pub targets: Vec<String>,
    pub fraction: String,
    pub instance: bool,
    /// `None` when the profile is not an instance.
    pub bad_outcome: Option<bool>,
    pub bad_outcomes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRow {
    pub method: String,
    pub scenario: String,
    pub ell: usize,
    pub seats: usize,
    pub fraction: String,
    pub instance: bool,
    pub bad_outcome: Option<bool>,
}

impl Report for CheckReport {
    type Row = CheckRow;

    fn rows(&self) -> Vec<CheckRow> {
        vec![CheckRow {
            method: self.method.clone(),
            scenario: self.scenario.clone(),
            ell: self.ell,
            seats: self.seats,
            fraction: self.fraction.clone(),
            instance: self.instance,
            bad_outcome: self.bad_outcome,
        }]
    }

    fn human(&self, decimals: Option<usize>) -> String {
        let f = shown(&parse_rat(&self.fraction).expect("own output"), decimals);
        let mut out = format!(
            "{} scenario, ell = {}, S = {}, method {}\n  W holds {f} of the vote; targets {{{}}}\n",
            self.scenario,
            self.ell,
            self.seats,
            self.method,
            self.targets.join(" ")
        );
        match self.bad_outcome {
            None => out.push_str("  not an instance of the scenario\n"),
            Some(false) => out.push_str("  good: every outcome serves W\n"),
            Some(true) => {
                out.push_str("  bad outcome possible:\n");
                for c in &self.bad_outcomes {
                    let _ = writeln!(out, "    {c}");
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------- witness

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub token: String,
    pub method: String,
    pub scenario: String,
    pub ell: usize,
    pub seats: usize,
    pub fraction: String,
    pub verified: bool,
    /// The threshold the construction is measured against, if known.
    pub threshold: Option<String>,
    pub profile: String,
}

impl Report for WitnessReport {
    type Row = WitnessReport;

    fn rows(&self) -> Vec<WitnessReport> {
        vec![self.clone()]
    }

    fn human(&self, decimals: Option<usize>) -> String {
        let f = shown(&parse_rat(&self.fraction).expect("own output"), decimals);
        let mut out = format!(
            "{} for {} {} (ell = {}, S = {})\n  W fraction {f}, bad outcome {}\n",
            self.token,
            self.method,
            self.scenario,
            self.ell,
            self.seats,
            if self.verified { "verified" } else { "NOT reached" }
        );
        if let Some(t) = &self.threshold {
            let _ = writeln!(out, "  threshold {t}");
        }
        for line in self.profile.lines() {
            let _ = writeln!(out, "  | {line}");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub token: String,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

impl Report for Catalog {
    type Row = CatalogEntry;

    fn rows(&self) -> Vec<CatalogEntry> {
        self.entries.clone()
    }

    fn human(&self, _decimals: Option<usize>) -> String {
        let w = self.entries.iter().map(|e| e.token.len()).max().unwrap_or(0);
        self.entries.iter().map(|e| format!("{:<w$}  {}\n", e.token, e.description)).collect()
    }
}

// ----------------------------------------------------------------- search

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub method: String,
    pub scenario: String,
    pub ell: usize,
    pub seats: usize,
    pub best_fraction: Option<String>,
    pub examined: u64,
    pub undecided: u64,
    pub exhausted: bool,
    pub threshold: Option<String>,
    /// The best fraction stays within the threshold.
    pub sound: bool,
    pub witness: Option<String>,
}

impl Report for SearchSummary {
    type Row = SearchSummary;

    fn rows(&self) -> Vec<SearchSummary> {
        vec![self.clone()]
    }

    fn human(&self, decimals: Option<usize>) -> String {
        let best = self
            .best_fraction
            .as_deref()
            .map_or("none".to_string(), |f| shown(&parse_rat(f).expect("own output"), decimals));
        let mut out = format!(
            "search {} {} (ell = {}, S = {})\n  best bad fraction {best}\n  {} examined, {} undecided{}\n",
            self.method,
            self.scenario,
            self.ell,
            self.seats,
            self.examined,
            self.undecided,
            if self.exhausted { ", budget exhausted" } else { "" }
        );
        if let Some(t) = &self.threshold {
            let _ = writeln!(out, "  threshold {t}: {}", if self.sound { "consistent" } else { "EXCEEDED" });
        }
        if let Some(w) = &self.witness {
            for line in w.lines() {
                let _ = writeln!(out, "  | {line}");
            }
        }
        out
    }
}

// ------------------------------------------------------------------ audit

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationRow {
    pub family: String,
    pub method: String,
    pub ell: usize,
    pub seats: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub smax: usize,
    pub methods: Vec<String>,
    pub checks: u64,
    pub witnesses_verified: u64,
    pub searches: u64,
    pub passed: bool,
    pub violations: Vec<ViolationRow>,
}

impl Report for AuditSummary {
    type Row = ViolationRow;

    fn rows(&self) -> Vec<ViolationRow> {
        self.violations.clone()
    }

    fn human(&self, _decimals: Option<usize>) -> String {
        let mut out = format!(
            "audit of {} methods, S <= {}\n  {} inequalities checked, {} witnesses verified, {} searches\n",
            self.methods.len(),
            self.smax,
            self.checks,
            self.witnesses_verified,
            self.searches
        );
        if self.passed {
            out.push_str("  no violations\n");
        } else {
            let _ = writeln!(out, "  {} violations:", self.violations.len());
            for v in &self.violations {
                let _ = writeln!(out, "    [{}] {} ell = {}, S = {}: {}", v.family, v.method, v.ell, v.seats, v.detail);
            }
        }
        out
    }
}

// -------------------------------------------------------------- criterion

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub method: String,
    pub criterion: String,
    pub seats: usize,
    pub verdict: String,
}

impl Report for CriterionReport {
    type Row = CriterionReport;

    fn rows(&self) -> Vec<CriterionReport> {
        vec![self.clone()]
    }

    fn human(&self, _decimals: Option<usize>) -> String {
        format!("{} for {} with S = {}: {}\n", self.criterion, self.method, self.seats, self.verdict)
    }
}
