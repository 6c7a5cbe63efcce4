//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain failure (a bad outcome, a violated
//! inequality, a witness that fails), 2 usage, parse or evaluation error.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use pithresh_core::sequences::{alpha_vertex, build_alpha_lp, seq_a, seq_b, seq_c, DEFAULT_ALPHA_CAP};
use pithresh_core::thresholds::{table_spec, Criterion};
use pithresh_core::verifier::{
    audit_table, construct_witness, standard_corpus, verify_witness, AuditOptions, SearchSpec, WITNESS_CATALOG,
};
use pithresh_core::{
    BallotContent, Candidate, CountOptions, Kind, MethodId, Outcome, Profile, ProfileKind, Rational, ScenarioId,
    ScenarioInstance, ThresholdBook, WeightScheme, WeightedBallot,
};

use crate::profile_file::{parse_profile, write_profile};
use crate::report::{
    rat, render, AuditSummary, Catalog, CatalogEntry, CheckReport, CommitteeEntry, CountReport, CriterionReport, Format,
    Report, SearchSummary, SeqReport, SequenceRow, SequenceTable, TableReport, ThresholdReport, ThresholdRow,
    ViolationRow, WitnessReport,
};
use crate::search::{search_parallel, Probe, ProbeResult};

fn method_arg(s: &str) -> Result<MethodId, String> {
    s.parse().map_err(|e: pithresh_core::Error| e.to_string())
}

fn scenario_arg(s: &str) -> Result<ScenarioId, String> {
    s.parse().map_err(|e: pithresh_core::Error| e.to_string())
}

fn kind_arg(s: &str) -> Result<Kind, String> {
    s.parse().map_err(|e: pithresh_core::Error| e.to_string())
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e: pithresh_core::Error| e.to_string())
}

fn criterion_arg(s: &str) -> Result<Criterion, String> {
    s.parse().map_err(|e: pithresh_core::Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "pithresh", version, about = "Exact proportionality thresholds for multi-winner election methods")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest number of tie branches explored before an outcome set is truncated.
    #[arg(long, default_value_t = 10_000, global = true)]
    pub branch_cap: usize,
    /// Also show decimal approximations with this many digits.
    #[arg(long, global = true)]
    pub decimals: Option<usize>,
    /// Print the linear program behind an `alpha` value.
    #[arg(long, global = true)]
    pub dump_lp: bool,
    /// Worker threads for the parallel search (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count a profile file and list every tie-reachable outcome.
    Count {
        #[arg(long, value_parser = method_arg)]
        method: MethodId,
        /// Override the file's `!seats`.
        #[arg(long)]
        seats: Option<usize>,
        file: PathBuf,
    },
    /// Apportion seats among parties from a vote list.
    Apportion {
        #[arg(long, value_parser = method_arg)]
        method: MethodId,
        #[arg(long)]
        seats: usize,
        /// `v1,v2,...` (parties P1, P2, ...) or `NAME=v,...`.
        #[arg(long, value_delimiter = ',', required = true)]
        votes: Vec<String>,
    },
    /// Decide whether a profile with `!W` groups admits a bad outcome.
    Check {
        #[arg(long, value_parser = method_arg)]
        method: MethodId,
        #[arg(long, value_parser = scenario_arg)]
        scenario: ScenarioId,
        #[arg(long)]
        ell: usize,
        /// Target set `A` (comma separated); derived from `W`'s ballots when omitted.
        #[arg(long, value_delimiter = ',')]
        target: Vec<String>,
        #[arg(long)]
        seats: Option<usize>,
        file: PathBuf,
    },
    /// Look up a threshold, or evaluate a criterion.
    Threshold {
        #[arg(long, value_parser = method_arg)]
        method: MethodId,
        #[arg(long, value_parser = scenario_arg)]
        scenario: Option<ScenarioId>,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long)]
        seats: usize,
        #[arg(long, value_parser = kind_arg, default_value = "pi")]
        kind: Kind,
        /// Evaluate a criterion (jr, pjr, ejr, dpc, psc-strong, wpsc-floor) instead.
        #[arg(long, value_parser = criterion_arg, conflicts_with_all = ["scenario", "ell"])]
        criterion: Option<Criterion>,
    },
    /// Regenerate a named threshold grid, or the sequence table.
    Table {
        /// optimal, stl, lr, bv-ejr, av-ejr, tha-same, tho-tactic, tho-same,
        /// tho-wpsc, borda-tactic, borda-same or sequences.
        name: String,
        /// Largest S (largest n for `sequences`); default 5 (6).
        #[arg(long)]
        smax: Option<usize>,
    },
    /// One term of a sequence: a, b, c or alpha[:scheme].
    Seq {
        #[arg(long)]
        which: String,
        #[arg(long)]
        n: usize,
    },
    /// Build and verify a catalog witness.
    Witness {
        /// Catalog token; `--list` shows them all.
        #[arg(long, required_unless_present = "list")]
        theorem: Option<String>,
        #[arg(long, value_parser = method_arg, required_unless_present = "list")]
        method: Option<MethodId>,
        #[arg(long, value_parser = scenario_arg, required_unless_present = "list")]
        scenario: Option<ScenarioId>,
        #[arg(long, required_unless_present = "list")]
        ell: Option<usize>,
        #[arg(long, required_unless_present = "list")]
        seats: Option<usize>,
        /// Allowed shortfall for constructions approaching a supremum.
        #[arg(long, value_parser = rational_arg)]
        eps: Option<Rational>,
        #[arg(long)]
        list: bool,
    },
    /// Exhaustive search for the largest fraction with a bad outcome.
    Search {
        #[arg(long, value_parser = method_arg)]
        method: MethodId,
        #[arg(long, value_parser = scenario_arg)]
        scenario: ScenarioId,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        seats: usize,
        /// Ballot weights range over 1..=D.
        #[arg(long, default_value_t = 2)]
        grid: u32,
        #[arg(long, default_value_t = 5)]
        candidates: usize,
        #[arg(long, default_value_t = 4)]
        groups: usize,
        #[arg(long, default_value_t = 3)]
        length: usize,
        /// Largest electorate for the tactic search.
        #[arg(long, default_value_t = 6)]
        voters: usize,
        /// Largest number of profiles (or strategies) examined.
        #[arg(long, default_value_t = 2_000_000)]
        budget: u64,
    },
    /// Check the inequality families over a method corpus.
    Audit {
        #[arg(long, default_value_t = 8)]
        smax: usize,
        /// Methods to audit (default: the standard corpus).
        #[arg(long = "method", value_parser = method_arg)]
        methods: Vec<MethodId>,
        /// Verify catalog witnesses of exact entries with S <= 3.
        #[arg(long)]
        witnesses: bool,
        /// Search exact entries with S <= 3 (slow).
        #[arg(long)]
        search: bool,
    },
}

/// What a run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl RunOutput {
    fn ok(code: i32, stdout: String) -> Self {
        RunOutput { code, stdout, stderr: String::new() }
    }

    fn error(message: impl std::fmt::Display) -> Self {
        RunOutput { code: 2, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { 2 } else { 0 };
            return if code == 0 {
                RunOutput::ok(0, text)
            } else {
                RunOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => RunOutput::error(e),
        },
        None => execute(&cli),
    }
}

struct Ctx {
    format: Format,
    decimals: Option<usize>,
    opts: CountOptions,
    dump_lp: bool,
}

impl Ctx {
    fn emit<R: Report>(&self, report: &R, code: i32) -> RunOutput {
        match render(report, self.format, self.decimals) {
            Ok(text) => RunOutput::ok(code, text),
            Err(e) => RunOutput::error(e),
        }
    }
}

fn execute(cli: &Cli) -> RunOutput {
    let ctx = Ctx {
        format: if cli.json { Format::Json } else { cli.format },
        decimals: cli.decimals,
        opts: CountOptions { branch_cap: cli.branch_cap, ..CountOptions::default() },
        dump_lp: cli.dump_lp,
    };
    let result = match &cli.command {
        Command::Count { method, seats, file } => count_cmd(&ctx, method, *seats, file),
        Command::Apportion { method, seats, votes } => apportion_cmd(&ctx, method, *seats, votes),
        Command::Check { method, scenario, ell, target, seats, file } => {
            check_cmd(&ctx, method, *scenario, *ell, target, *seats, file)
        }
        Command::Threshold { method, scenario, ell, seats, kind, criterion } => {
            threshold_cmd(&ctx, method, *scenario, *ell, *seats, *kind, *criterion)
        }
        Command::Table { name, smax } => table_cmd(&ctx, name, *smax),
        Command::Seq { which, n } => seq_cmd(&ctx, which, *n),
        Command::Witness { list: true, .. } => Ok(ctx.emit(&catalog(), 0)),
        Command::Witness { theorem, method, scenario, ell, seats, eps, .. } => witness_cmd(
            &ctx,
            theorem.as_deref().expect("required"),
            method.as_ref().expect("required"),
            scenario.expect("required"),
            ell.expect("required"),
            seats.expect("required"),
            eps.as_ref(),
        ),
        Command::Search { method, scenario, ell, seats, grid, candidates, groups, length, voters, budget } => {
            let spec = SearchSpec {
                max_candidates: *candidates,
                weight_grid: *grid,
                max_ballot_groups: *groups,
                max_ballot_length: *length,
                branch_cap: cli.branch_cap,
                max_profiles: *budget,
                max_voters: *voters,
            };
            search_cmd(&ctx, method, *scenario, *ell, *seats, &spec)
        }
        Command::Audit { smax, methods, witnesses, search } => audit_cmd(&ctx, *smax, methods, *witnesses, *search),
    };
    result.unwrap_or_else(RunOutput::error)
}

type CmdResult = Result<RunOutput, String>;

fn read_profile(file: &PathBuf, seats: Option<usize>) -> Result<Profile, String> {
    let text = std::fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    parse_profile(&text, seats).map_err(|e| format!("{}: {e}", file.display()))
}

fn count_report(method: &MethodId, profile: &Profile, outcome: &Outcome) -> CountReport {
    let mut report = CountReport {
        method: method.to_string(),
        seats: profile.seats(),
        committees: Vec::new(),
        apportionments: Vec::new(),
        truncated: outcome.truncated(),
    };
    match outcome {
        Outcome::Seats(a) => {
            report.apportionments = a
                .vectors
                .iter()
                .map(|v| v.0.iter().map(|(p, s)| (p.to_string(), *s)).collect::<BTreeMap<_, _>>())
                .collect();
        }
        Outcome::Phragmen(p) => {
            report.committees = p
                .outcomes
                .iter()
                .map(|c| CommitteeEntry {
                    members: c.members().iter().map(ToString::to_string).collect(),
                    max_load: p.max_load(c).as_ref().map(rat),
                })
                .collect();
        }
        Outcome::Committees(o) => {
            report.committees = o
                .iter()
                .map(|c| CommitteeEntry { members: c.members().iter().map(ToString::to_string).collect(), max_load: None })
                .collect();
        }
    }
    report
}

fn count_cmd(ctx: &Ctx, method: &MethodId, seats: Option<usize>, file: &PathBuf) -> CmdResult {
    let profile = read_profile(file, seats)?;
    let outcome = pithresh_core::method::count(method, &profile, &ctx.opts).map_err(|e| e.to_string())?;
    Ok(ctx.emit(&count_report(method, &profile, &outcome), 0))
}

fn apportion_cmd(ctx: &Ctx, method: &MethodId, seats: usize, votes: &[String]) -> CmdResult {
    if method.ballot_kind() != ProfileKind::Party {
        return Err(format!("{method} is not an apportionment method"));
    }
    let mut ballots = Vec::new();
    for (i, v) in votes.iter().enumerate() {
        let (name, value) = match v.split_once('=') {
            Some((n, x)) => (n.trim().to_string(), x),
            None => (format!("P{}", i + 1), v.as_str()),
        };
        let weight: Rational = value.trim().parse().map_err(|e: pithresh_core::Error| e.to_string())?;
        let party = Candidate::new(name).map_err(|e| e.to_string())?;
        if weight.is_positive() {
            ballots.push(WeightedBallot::new(weight, BallotContent::Party(party)));
        } else if !weight.is_zero() {
            return Err(format!("negative vote count {weight}"));
        }
    }
    let profile = Profile::new(ballots, seats).map_err(|e| e.to_string())?;
    let outcome = pithresh_core::method::count(method, &profile, &ctx.opts).map_err(|e| e.to_string())?;
    Ok(ctx.emit(&count_report(method, &profile, &outcome), 0))
}

/// The target set used when `--target` is not given.
pub fn default_targets(profile: &Profile, scenario: ScenarioId, ell: usize) -> BTreeSet<Candidate> {
    let w: Vec<&BallotContent> = profile.ballots().iter().filter(|b| b.designated).map(|b| &b.content).collect();
    match scenario {
        ScenarioId::PJR | ScenarioId::EJR => {
            let mut it = w.iter().map(|c| c.name_set());
            let first = it.next().unwrap_or_default();
            it.fold(first, |acc, s| acc.intersection(&s).cloned().collect())
        }
        ScenarioId::PSC => {
            let longest = w.iter().map(|c| c.len()).max().unwrap_or(0);
            (ell..=longest)
                .find_map(|m| {
                    let first = w.first()?.top(m)?;
                    w.iter().all(|c| c.top(m).as_ref() == Some(&first)).then_some(first)
                })
                .unwrap_or_default()
        }
        ScenarioId::WPSC => w.first().and_then(|c| c.top(ell)).unwrap_or_default(),
        _ => BTreeSet::new(),
    }
}

fn check_cmd(
    ctx: &Ctx,
    method: &MethodId,
    scenario: ScenarioId,
    ell: usize,
    target: &[String],
    seats: Option<usize>,
    file: &PathBuf,
) -> CmdResult {
    let profile = read_profile(file, seats)?;
    let targets: BTreeSet<Candidate> = if target.is_empty() {
        default_targets(&profile, scenario, ell)
    } else {
        target.iter().map(|t| Candidate::new(t.trim()).map_err(|e| e.to_string())).collect::<Result<_, _>>()?
    };
    let inst = ScenarioInstance::new(profile, targets, ell, scenario);
    let is_instance = inst.is_instance().map_err(|e| e.to_string())?;
    let mut report = CheckReport {
        method: method.to_string(),
        scenario: scenario.to_string(),
        ell,
        seats: inst.profile.seats(),
        targets: inst.target_set().iter().map(ToString::to_string).collect(),
        fraction: rat(&inst.fraction()),
        instance: is_instance,
        bad_outcome: None,
        bad_outcomes: Vec::new(),
    };
    if !is_instance {
        return Ok(ctx.emit(&report, 2));
    }
    let outcome = pithresh_core::method::count(method, &inst.profile, &ctx.opts).map_err(|e| e.to_string())?;
    let bad = inst.is_bad_outcome_possible(&outcome).map_err(|e| e.to_string())?;
    report.bad_outcome = Some(bad);
    report.bad_outcomes = match &outcome {
        Outcome::Seats(a) => a.vectors.iter().filter(|v| !inst.is_good_seats(v)).map(ToString::to_string).collect(),
        other => other
            .committees()
            .map(|o| o.iter().filter(|c| !inst.is_good(c)).map(ToString::to_string).collect())
            .unwrap_or_default(),
    };
    Ok(ctx.emit(&report, i32::from(bad)))
}

fn threshold_cmd(
    ctx: &Ctx,
    method: &MethodId,
    scenario: Option<ScenarioId>,
    ell: Option<usize>,
    seats: usize,
    kind: Kind,
    criterion: Option<Criterion>,
) -> CmdResult {
    let mut book = ThresholdBook::new();
    if let Some(c) = criterion {
        let verdict = book.criterion_check(method, c, seats).map_err(|e| e.to_string())?;
        let report =
            CriterionReport { method: method.to_string(), criterion: c.to_string(), seats, verdict: verdict.to_string() };
        return Ok(ctx.emit(&report, 0));
    }
    let (Some(scenario), Some(ell)) = (scenario, ell) else {
        return Err("threshold needs --scenario and --ell (or --criterion)".into());
    };
    let t = book.threshold_of_kind(method, scenario, ell, seats, kind).map_err(|e| e.to_string())?;
    let row = ThresholdRow::new(method, scenario, kind, ell, seats, &t, ctx.decimals);
    Ok(ctx.emit(&ThresholdReport::new(row, &t, ctx.decimals), 0))
}

/// The sequence table for `n <= nmax`.
pub fn sequence_table(nmax: usize) -> Result<SequenceTable, String> {
    let mut book = ThresholdBook::new();
    let rows = (1..=nmax)
        .map(|n| {
            let cache = book.cache_mut();
            Ok(SequenceRow {
                n,
                a: rat(&cache.a(n)?),
                b: rat(&cache.b(n)?),
                c: seq_c(n)?.to_string(),
            })
        })
        .collect::<pithresh_core::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    Ok(SequenceTable { rows })
}

/// A named threshold grid for `S <= smax`.
pub fn threshold_table(name: &str, smax: usize, decimals: Option<usize>) -> Result<TableReport, String> {
    let spec = table_spec(name).map_err(|e| e.to_string())?;
    let grid = ThresholdBook::new().table(&spec, smax).map_err(|e| e.to_string())?;
    Ok(TableReport::new(&spec, &grid, decimals))
}

fn table_cmd(ctx: &Ctx, name: &str, smax: Option<usize>) -> CmdResult {
    if name == "sequences" {
        return Ok(ctx.emit(&sequence_table(smax.unwrap_or(6))?, 0));
    }
    Ok(ctx.emit(&threshold_table(name, smax.unwrap_or(5), ctx.decimals)?, 0))
}

fn seq_cmd(ctx: &Ctx, which: &str, n: usize) -> CmdResult {
    let e = |e: pithresh_core::Error| e.to_string();
    let (head, arg) = match which.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (which, None),
    };
    let mut lp = None;
    let value = match (head, arg) {
        ("a", None) => seq_a(n).map_err(e)?,
        ("b", None) => seq_b(n).map_err(e)?,
        ("c", None) => Rational::from_big(seq_c(n).map_err(e)?.into()),
        ("alpha", _) => {
            let w: WeightScheme = arg.map_or(Ok(WeightScheme::Harmonic), str::parse).map_err(e)?;
            if ctx.dump_lp {
                lp = Some(build_alpha_lp(n, &w, DEFAULT_ALPHA_CAP).map_err(e)?.dump());
            }
            alpha_vertex(n, &w, DEFAULT_ALPHA_CAP).map_err(e)?.0
        }
        _ => return Err(format!("unknown sequence `{which}` (expected a, b, c or alpha[:scheme])")),
    };
    let report = SeqReport {
        which: which.to_string(),
        n,
        value: rat(&value),
        approx: ctx.decimals.map(|d| value.to_decimal(d)),
        lp,
    };
    Ok(ctx.emit(&report, 0))
}

fn catalog() -> Catalog {
    Catalog {
        entries: WITNESS_CATALOG
            .iter()
            .map(|(t, d)| CatalogEntry { token: t.to_string(), description: d.to_string() })
            .collect(),
    }
}

fn witness_cmd(
    ctx: &Ctx,
    token: &str,
    method: &MethodId,
    scenario: ScenarioId,
    ell: usize,
    seats: usize,
    eps: Option<&Rational>,
) -> CmdResult {
    let e = |e: pithresh_core::Error| e.to_string();
    let w = construct_witness(token, method, scenario, ell, seats, eps).map_err(e)?;
    let verified = verify_witness(&w, method, &ctx.opts).map_err(e)?;
    let threshold = ThresholdBook::new().threshold(method, scenario, ell, seats).ok().map(|t| t.render(ctx.decimals));
    let report = WitnessReport {
        token: token.to_string(),
        method: method.to_string(),
        scenario: scenario.to_string(),
        ell,
        seats,
        fraction: rat(&w.claimed_fraction),
        verified,
        threshold,
        profile: write_profile(&w.instance.profile),
    };
    Ok(ctx.emit(&report, i32::from(!verified)))
}

fn search_cmd(ctx: &Ctx, method: &MethodId, scenario: ScenarioId, ell: usize, seats: usize, spec: &SearchSpec) -> CmdResult {
    let e = |e: pithresh_core::Error| e.to_string();
    let report = search_parallel(method, scenario, ell, seats, spec).map_err(e)?;
    let threshold = match ThresholdBook::new().threshold(method, scenario, ell, seats) {
        Ok(t) => Some(t),
        Err(pithresh_core::Error::NotApplicable(_)) => None,
        Err(err) => return Err(err.to_string()),
    };
    let probe = ProbeResult {
        probe: Probe { method: method.clone(), scenario, ell, seats },
        threshold: threshold.clone(),
        report,
    };
    let sound = probe.sound();
    let summary = SearchSummary {
        method: method.to_string(),
        scenario: scenario.to_string(),
        ell,
        seats,
        best_fraction: probe.report.best_fraction().map(rat),
        examined: probe.report.examined,
        undecided: probe.report.undecided,
        exhausted: probe.report.exhausted,
        threshold: threshold.map(|t| t.render(ctx.decimals)),
        sound,
        witness: probe.report.best.as_ref().map(|w| write_profile(&w.instance.profile)),
    };
    Ok(ctx.emit(&summary, i32::from(!sound)))
}

fn audit_cmd(ctx: &Ctx, smax: usize, methods: &[MethodId], witnesses: bool, search: bool) -> CmdResult {
    let methods = if methods.is_empty() { standard_corpus() } else { methods.to_vec() };
    let opts = AuditOptions { witnesses, search: search.then(SearchSpec::default) };
    let report = audit_table(&mut ThresholdBook::new(), &methods, smax, &opts).map_err(|e| e.to_string())?;
    let summary = AuditSummary {
        smax,
        methods: methods.iter().map(ToString::to_string).collect(),
        checks: report.checks,
        witnesses_verified: report.witnesses_verified,
        searches: report.searches,
        passed: report.passed(),
        violations: report
            .violations
            .iter()
            .map(|v| ViolationRow {
                family: v.family.to_string(),
                method: v.method.to_string(),
                ell: v.ell,
                seats: v.seats,
                detail: v.detail.clone(),
            })
            .collect(),
    };
    Ok(ctx.emit(&summary, i32::from(!summary.passed)))
}
