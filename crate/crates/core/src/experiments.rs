//! Checked experiment runs and batch suites.
//!
//! Every run pairs a measured quantity with an oracle quantity and the bound
//! that must hold between them, producing [`ExperimentReport`] rows.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Display;
use std::io;

use thiserror::Error;

use crate::graph::{parse_graph_ref, AnyGraph, GraphError, PortGraph, PortTree, TreeAddr};
use crate::hunt::{hunt_until, run_uth, HuntConfig, HuntError, HuntResult};
use crate::oracle::{big_weight, character_weight, critical_path, OracleError, WeightResult};
use crate::path::EnumMode;
use crate::rendezvous::{bound_time, run_lone, run_urv, RvConfig, RvError, RvResult, Tape};
use crate::Value;

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;
pub const DEFAULT_MAX_ROUNDS: u64 = 100_000_000;
pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hunt(#[from] HuntError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Rv(#[from] RvError),
    #[error("{0}")]
    Precondition(String),
    #[error("suite line {line}: {msg}")]
    Suite { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

impl ExpError {
    /// Process exit code: 2 for bad input or violated preconditions, 3 for
    /// exhausted budgets and caps.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExpError::Hunt(HuntError::StepBudgetExceeded { .. } | HuntError::ValueOverflow) => 3,
            ExpError::Oracle(OracleError::CapExceeded { .. }) => 3,
            ExpError::Rv(RvError::RoundBudgetExceeded { .. }) => 3,
            ExpError::Rv(RvError::NegativeWait { .. }) => 1,
            ExpError::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<io::Error> for ExpError {
    fn from(e: io::Error) -> Self {
        ExpError::Io(e.to_string())
    }
}

impl From<csv::Error> for ExpError {
    fn from(e: csv::Error) -> Self {
        ExpError::Io(e.to_string())
    }
}

/// One checked quantity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentReport {
    /// Suite line that produced the row; 0 outside suites.
    pub line: usize,
    pub check: String,
    pub instance: String,
    pub measured: String,
    pub oracle: String,
    pub bound: String,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn new(
        check: &str,
        instance: &str,
        measured: impl Display,
        oracle: impl Display,
        bound: impl Display,
        pass: bool,
    ) -> Self {
        ExperimentReport {
            line: 0,
            check: check.to_string(),
            instance: instance.to_string(),
            measured: measured.to_string(),
            oracle: oracle.to_string(),
            bound: bound.to_string(),
            pass,
        }
    }

    fn failure(check: &str, instance: &str, err: &ExpError) -> Self {
        ExperimentReport::new(check, instance, err, "", "", false)
    }
}

impl Display for ExperimentReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} [{}] {}: measured {}, oracle {}, bound {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check,
            self.instance,
            self.measured,
            self.oracle,
            self.bound
        )
    }
}

/// CSV with header `line,check,instance,measured,oracle,bound,pass`.
pub fn write_reports<W: io::Write>(reports: &[ExperimentReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "line", "check", "instance", "measured", "oracle", "bound", "pass",
    ])?;
    for r in reports {
        w.write_record([
            r.line.to_string(),
            r.check.clone(),
            r.instance.clone(),
            r.measured.clone(),
            r.oracle.clone(),
            r.bound.clone(),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub struct HuntRun {
    pub result: HuntResult,
    /// `None` when base and treasure coincide.
    pub oracle: Option<Result<WeightResult, OracleError>>,
    pub reports: Vec<ExperimentReport>,
}

/// Run the treasure hunt and check it against the weight oracle. Bound
/// checks are attached in FIXED mode only; STRICT runs are reported as is.
pub fn hunt_run<G: PortGraph>(
    g: &G,
    base: &G::Node,
    treasure: &G::Node,
    cfg: &HuntConfig,
    cap: &Value,
    instance: &str,
) -> Result<HuntRun, ExpError> {
    let result = run_uth(g, base, treasure, cfg)?;
    let mut reports = Vec::new();
    if base == treasure {
        reports.push(ExperimentReport::new(
            "hunt.time",
            instance,
            result.steps,
            0,
            "= 0",
            result.steps == 0,
        ));
        return Ok(HuntRun {
            result,
            oracle: None,
            reports,
        });
    }
    let oracle = character_weight(g, base, treasure, cap);
    if let (Ok(w), EnumMode::Fixed) = (&oracle, cfg.mode) {
        let bound = Value::from(2u8) * &w.weight;
        reports.push(ExperimentReport::new(
            "hunt.time",
            instance,
            result.steps,
            &w.weight,
            format!("<= {bound}"),
            Value::from(result.steps) <= bound,
        ));
        let ty = result
            .found_during_type
            .map(|t| t.to_string())
            .unwrap_or_default();
        let phase = result.found_phase_value.clone().unwrap_or_default();
        reports.push(ExperimentReport::new(
            "hunt.phase",
            instance,
            format!("{ty}@{phase}"),
            format!("{}@{}", w.character, w.weight),
            "=",
            result.found_during_type == Some(w.character)
                && result.found_phase_value.as_ref() == Some(&w.weight),
        ));
        reports.push(ExperimentReport::new(
            "oracle.witness_index",
            instance,
            &w.witness_index,
            &w.weight,
            "<= weight",
            w.witness_index <= w.weight,
        ));
    }
    Ok(HuntRun {
        result,
        oracle: Some(oracle),
        reports,
    })
}

pub struct RvRun {
    pub result: RvResult,
    /// `delay + bound_time(N)` with `N` the larger of `k* s` over both agents.
    pub bound: Option<Result<(Value, Value), OracleError>>,
    pub reports: Vec<ExperimentReport>,
}

/// `max(k*_1 s_1, k*_2 s_2)` where `k*` is the index of the agent's critical
/// path to the other start and `s` its tape period.
pub fn segment_horizon<G: PortGraph>(
    g: &G,
    start1: (&G::Node, u64),
    start2: (&G::Node, u64),
    cap: &Value,
) -> Result<Value, OracleError> {
    let (_, k1) = critical_path(g, start1.0, start2.0, cap)?;
    let (_, k2) = critical_path(g, start2.0, start1.0, cap)?;
    let n1 = k1 * Tape::new(start1.1).period();
    let n2 = k2 * Tape::new(start2.1).period();
    Ok(n1.max(n2))
}

/// Run rendezvous and, in FIXED mode, check the meeting round against
/// `delay + bound_time(N)`.
pub fn rv_run<G: PortGraph>(
    g: &G,
    start1: (&G::Node, u64),
    start2: (&G::Node, u64),
    cfg: &RvConfig,
    cap: &Value,
    instance: &str,
) -> Result<RvRun, ExpError> {
    let result = run_urv(g, start1, start2, cfg)?;
    let mut reports = Vec::new();
    let mut bound = None;
    if cfg.mode == EnumMode::Fixed {
        let b = segment_horizon(g, start1, start2, cap).map(|n| {
            let t = Value::from(cfg.delay) + bound_time(n.clone());
            (n, t)
        });
        if let Ok((n, t)) = &b {
            let round = result
                .meeting_round
                .expect("run_urv returns only after a meeting");
            reports.push(ExperimentReport::new(
                "rv.time",
                instance,
                round,
                format!("N={n}"),
                format!("<= {t}"),
                Value::from(round) <= *t,
            ));
        }
        bound = Some(b);
    }
    Ok(RvRun {
        result,
        bound,
        reports,
    })
}

pub struct LowerBoundRun {
    /// Index of the child the adversary picked.
    pub r: u64,
    pub steps: u64,
    pub weight: Value,
    pub reports: Vec<ExperimentReport>,
}

/// Children `i+1..=2i` of the root of the infinite-degree tree, placed last
/// in the order the hunt first reaches them.
pub fn lowerbound_hunt(i: u64, cfg: &HuntConfig, cap: &Value) -> Result<LowerBoundRun, ExpError> {
    if i == 0 {
        return Err(ExpError::Precondition("i must be positive".into()));
    }
    let t = PortTree::omega();
    let root = t.root();
    let mut seen = HashSet::new();
    let mut last = 0;
    let probe = hunt_until(&t, &root, cfg, &mut |v: &TreeAddr| {
        if let [j] = v[..] {
            if j > i && j <= 2 * i && seen.insert(j) {
                last = j;
            }
        }
        seen.len() as u64 == i
    })?;
    let r = last;
    let instance = format!("tree_omega root->r.{r} i={i}");
    let replay = run_uth(&t, &root, &vec![r], cfg)?;
    let w = character_weight(&t, &root, &vec![r], cap)?;
    let reports = vec![
        ExperimentReport::new(
            "lowerbound.replay",
            &instance,
            replay.steps,
            probe.steps,
            "=",
            replay.steps == probe.steps,
        ),
        ExperimentReport::new(
            "lowerbound.weight",
            &instance,
            &w.weight,
            2 * r,
            "=",
            w.weight == Value::from(2 * r),
        ),
        ExperimentReport::new(
            "lowerbound.time",
            &instance,
            replay.steps,
            &w.weight,
            format!(">= {}/4", w.weight),
            Value::from(4 * replay.steps) >= w.weight,
        ),
    ];
    Ok(LowerBoundRun {
        r,
        steps: replay.steps,
        weight: w.weight,
        reports,
    })
}

/// Agent 2 never wakes; agent 1 must reach it, and does so by the end of its
/// critical segment.
pub fn sleeper_run<G: PortGraph>(
    g: &G,
    start1: (&G::Node, u64),
    start2: &G::Node,
    mode: EnumMode,
    max_rounds: u64,
    cap: &Value,
    instance: &str,
) -> Result<RvRun, ExpError> {
    let sleeper_label = if start1.1 == 1 { 2 } else { 1 };
    let cfg = RvConfig {
        delay: max_rounds,
        max_rounds,
        mode,
        trace: false,
    };
    let result = run_urv(g, start1, (start2, sleeper_label), &cfg)?;
    let round = result
        .meeting_round
        .expect("run_urv returns only after a meeting");
    let lone = run_lone(g, start1.0, start1.1, mode, max_rounds, &mut |_, v| {
        v == start2
    })?;
    let mut reports = vec![ExperimentReport::new(
        "sleeper.lone",
        instance,
        round,
        lone.map(|r| r.to_string()).unwrap_or_default(),
        "=",
        lone == Some(round),
    )];
    let mut bound = None;
    if mode == EnumMode::Fixed {
        let b = critical_path(g, start1.0, start2, cap).map(|(_, k)| {
            let n = k * Tape::new(start1.1).period();
            let t = bound_time(n.clone());
            (n, t)
        });
        if let Ok((n, t)) = &b {
            reports.push(ExperimentReport::new(
                "sleeper.time",
                instance,
                round,
                format!("N={n}"),
                format!("<= {t}"),
                Value::from(round) <= *t,
            ));
        }
        bound = Some(b);
    }
    Ok(RvRun {
        result,
        bound,
        reports,
    })
}

pub struct AdversarialSleeper {
    pub r: u64,
    pub rounds: u64,
    pub weight: Value,
    pub reports: Vec<ExperimentReport>,
}

/// Agent 1 starts at the root of the infinite-degree tree; the dormant agent
/// sits at whichever of children `i+1..=2i` agent 1 reaches last.
pub fn sleeper_adversarial(
    i: u64,
    label: u64,
    mode: EnumMode,
    max_rounds: u64,
    cap: &Value,
) -> Result<AdversarialSleeper, ExpError> {
    if i == 0 {
        return Err(ExpError::Precondition("i must be positive".into()));
    }
    let t = PortTree::omega();
    let root = t.root();
    let mut seen = HashSet::new();
    let mut last = 0;
    let done = run_lone(
        &t,
        &root,
        label,
        mode,
        max_rounds,
        &mut |_, v: &TreeAddr| {
            if let [j] = v[..] {
                if j > i && j <= 2 * i && seen.insert(j) {
                    last = j;
                }
            }
            seen.len() as u64 == i
        },
    )?;
    if done.is_none() {
        return Err(RvError::RoundBudgetExceeded { max_rounds }.into());
    }
    let r = last;
    let instance = format!("tree_omega root->r.{r} i={i} label={label}");
    let run = sleeper_run(
        &t,
        (&root, label),
        &vec![r],
        mode,
        max_rounds,
        cap,
        &instance,
    )?;
    let rounds = run.result.meeting_round.expect("met");
    let w = big_weight(&t, &root, &vec![r], cap)?;
    let mut reports = run.reports;
    reports.push(ExperimentReport::new(
        "sleeper.lower",
        &instance,
        rounds,
        &w,
        format!(">= {w}/4"),
        Value::from(rounds) * Value::from(4u8) >= w,
    ));
    Ok(AdversarialSleeper {
        r,
        rounds,
        weight: w,
        reports,
    })
}

/// One parsed suite line: a command and its `key=value` options.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteEntry {
    pub line: usize,
    pub command: String,
    pub options: BTreeMap<String, String>,
}

const SUITE_COMMANDS: [&str; 6] = ["hunt", "weight", "rv", "lowerbound", "sleeper", "phase"];

/// Parse a suite: one command per line, `#` starts a comment.
///
/// ```text
/// hunt graph=two_node base=u treasure=v
/// hunt graph=random_graph:8,6,3 pairs=all
/// weight graph=tree_omega from=r to=r.7 expect=14
/// rv graph=ring:4 start1=v0 label1=3 start2=v2 label2=5 delay=1
/// lowerbound i=8
/// sleeper graph=two_node start1=u label1=1 start2=v
/// sleeper adversarial=8 label1=1
/// ```
pub fn parse_suite(text: &str) -> Result<Vec<SuiteEntry>, ExpError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut words = content.split_whitespace();
        let Some(command) = words.next() else {
            continue;
        };
        if !SUITE_COMMANDS.contains(&command) {
            return Err(ExpError::Suite {
                line,
                msg: format!("unknown command `{command}`"),
            });
        }
        let mut options = BTreeMap::new();
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| ExpError::Suite {
                line,
                msg: format!("expected key=value, got `{w}`"),
            })?;
            if options.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ExpError::Suite {
                    line,
                    msg: format!("option `{k}` repeated"),
                });
            }
        }
        out.push(SuiteEntry {
            line,
            command: command.to_string(),
            options,
        });
    }
    Ok(out)
}

struct Opts<'a>(&'a SuiteEntry);

impl Opts<'_> {
    fn err(&self, msg: String) -> ExpError {
        ExpError::Suite {
            line: self.0.line,
            msg,
        }
    }

    fn str(&self, key: &str) -> Result<&str, ExpError> {
        self.0
            .options
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| self.err(format!("missing `{key}`")))
    }

    fn num(&self, key: &str, default: Option<u64>) -> Result<u64, ExpError> {
        match self.0.options.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| self.err(format!("`{key}` must be a nonnegative integer"))),
            None => default.ok_or_else(|| self.err(format!("missing `{key}`"))),
        }
    }

    fn mode(&self) -> Result<EnumMode, ExpError> {
        match self.0.options.get("mode") {
            Some(m) => m
                .parse()
                .map_err(|_| self.err(format!("unknown mode `{m}`"))),
            None => Ok(EnumMode::Fixed),
        }
    }

    fn cap(&self) -> Result<Value, ExpError> {
        Ok(Value::from(self.num("cap", Some(DEFAULT_CAP))?))
    }

    fn graph(&self) -> Result<AnyGraph, ExpError> {
        Ok(parse_graph_ref(self.str("graph")?)?)
    }
}

/// Run every suite entry. Errors inside an entry become failed rows; only a
/// malformed entry aborts the suite.
pub fn run_suite(entries: &[SuiteEntry]) -> Result<Vec<ExperimentReport>, ExpError> {
    let mut all = Vec::new();
    for e in entries {
        let mut rows = run_entry(e)?;
        for r in &mut rows {
            r.line = e.line;
        }
        all.extend(rows);
    }
    Ok(all)
}

fn run_entry(e: &SuiteEntry) -> Result<Vec<ExperimentReport>, ExpError> {
    let o = Opts(e);
    let caught =
        |check: &str, instance: &str, res: Result<Vec<ExperimentReport>, ExpError>| match res {
            Ok(rows) => Ok(rows),
            Err(err @ ExpError::Suite { .. }) => Err(err),
            Err(err) => Ok(vec![ExperimentReport::failure(check, instance, &err)]),
        };
    match e.command.as_str() {
        "hunt" => {
            let g = o.graph()?;
            let cfg = HuntConfig {
                mode: o.mode()?,
                max_steps: o.num("max_steps", Some(DEFAULT_MAX_STEPS))?,
                trace: false,
            };
            let cap = o.cap()?;
            let graph = o.str("graph")?;
            let pairs: Vec<(String, String)> =
                if o.0.options.get("pairs").map(String::as_str) == Some("all") {
                    let names: Vec<String> = g.seeds().iter().map(|n| g.node_id(n).0).collect();
                    if !g.is_finite() {
                        return Err(o.err("pairs=all needs a finite graph".into()));
                    }
                    names
                        .iter()
                        .flat_map(|a| {
                            names
                                .iter()
                                .filter(move |b| *b != a)
                                .map(move |b| (a.clone(), b.clone()))
                        })
                        .collect()
                } else {
                    vec![(o.str("base")?.to_string(), o.str("treasure")?.to_string())]
                };
            let mut rows = Vec::new();
            for (b, t) in pairs {
                let instance = format!("{graph} {b}->{t} {}", cfg.mode);
                let res = (|| {
                    let (bn, tn) = (g.resolve(&b)?, g.resolve(&t)?);
                    let run = hunt_run(&g, &bn, &tn, &cfg, &cap, &instance)?;
                    if let Some(Err(err)) = run.oracle {
                        return Err(err.into());
                    }
                    Ok(run.reports)
                })();
                rows.extend(caught("hunt", &instance, res)?);
            }
            Ok(rows)
        }
        "weight" => {
            let g = o.graph()?;
            let (from, to) = (o.str("from")?, o.str("to")?);
            let instance = format!("{} {from}->{to}", o.str("graph")?);
            let expect = e.options.get("expect").cloned();
            let cap = o.cap()?;
            let res = (|| {
                let w = character_weight(&g, &g.resolve(from)?, &g.resolve(to)?, &cap)?;
                let mut rows = vec![ExperimentReport::new(
                    "oracle.witness_index",
                    &instance,
                    &w.witness_index,
                    &w.weight,
                    "<= weight",
                    w.witness_index <= w.weight,
                )];
                if let Some(x) = expect {
                    rows.push(ExperimentReport::new(
                        "weight.expect",
                        &instance,
                        &w.weight,
                        &x,
                        "=",
                        w.weight.to_string() == x,
                    ));
                }
                Ok(rows)
            })();
            caught("weight", &instance, res)
        }
        "rv" => {
            let g = o.graph()?;
            let (s1, s2) = (o.str("start1")?, o.str("start2")?);
            let (l1, l2) = (o.num("label1", None)?, o.num("label2", None)?);
            let cfg = RvConfig {
                delay: o.num("delay", Some(0))?,
                max_rounds: o.num("max_rounds", Some(DEFAULT_MAX_ROUNDS))?,
                mode: o.mode()?,
                trace: false,
            };
            let instance = format!(
                "{} {s1}#{l1} {s2}#{l2} delay={}",
                o.str("graph")?,
                cfg.delay
            );
            let expect =
                o.0.options
                    .get("expect_round")
                    .map(|_| o.num("expect_round", None))
                    .transpose()?;
            let cap = o.cap()?;
            let res = (|| {
                let (n1, n2) = (g.resolve(s1)?, g.resolve(s2)?);
                let run = rv_run(&g, (&n1, l1), (&n2, l2), &cfg, &cap, &instance)?;
                if let Some(Err(err)) = run.bound {
                    return Err(err.into());
                }
                let mut rows = run.reports;
                if let Some(x) = expect {
                    let got = run.result.meeting_round.expect("met");
                    rows.push(ExperimentReport::new(
                        "rv.expect",
                        &instance,
                        got,
                        x,
                        "=",
                        got == x,
                    ));
                }
                Ok(rows)
            })();
            caught("rv", &instance, res)
        }
        "lowerbound" => {
            let i = o.num("i", None)?;
            let cfg = HuntConfig {
                mode: o.mode()?,
                max_steps: o.num("max_steps", Some(DEFAULT_MAX_STEPS))?,
                trace: false,
            };
            let instance = format!("tree_omega i={i}");
            let cap = o.cap()?;
            caught(
                "lowerbound",
                &instance,
                lowerbound_hunt(i, &cfg, &cap).map(|r| r.reports),
            )
        }
        "sleeper" => {
            let max_rounds = o.num("max_rounds", Some(DEFAULT_MAX_ROUNDS))?;
            let label = o.num("label1", Some(1))?;
            let (mode, cap) = (o.mode()?, o.cap()?);
            if e.options.contains_key("adversarial") {
                let i = o.num("adversarial", None)?;
                let instance = format!("tree_omega adversarial i={i} label={label}");
                return caught(
                    "sleeper",
                    &instance,
                    sleeper_adversarial(i, label, mode, max_rounds, &cap).map(|r| r.reports),
                );
            }
            let g = o.graph()?;
            let (s1, s2) = (o.str("start1")?, o.str("start2")?);
            let instance = format!("{} {s1}#{label} sleeper@{s2}", o.str("graph")?);
            let res = (|| {
                let (n1, n2) = (g.resolve(s1)?, g.resolve(s2)?);
                let run = sleeper_run(&g, (&n1, label), &n2, mode, max_rounds, &cap, &instance)?;
                if let Some(Err(err)) = run.bound {
                    return Err(err.into());
                }
                Ok(run.reports)
            })();
            caught("sleeper", &instance, res)
        }
        "phase" => {
            let j = o.num("j", None)?;
            let types = crate::path::phase_types(&Value::from(j), o.mode()?);
            let listed = types
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let expect = e.options.get("expect").map(|x| x.replace(';', " "));
            let pass = expect.as_ref().is_none_or(|x| *x == listed);
            Ok(vec![ExperimentReport::new(
                "phase.types",
                &format!("j={j}"),
                listed,
                expect.unwrap_or_default(),
                "=",
                pass,
            )])
        }
        other => Err(o.err(format!("unknown command `{other}`"))),
    }
}
