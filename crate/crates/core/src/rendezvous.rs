//! Universal rendezvous of two labelled agents.
//!
//! Each agent turns its label into a periodic bit tape. Bit `i` gets exactly
//! `3 i^2` rounds. For a 1-bit lying in the `j`-th copy of the label block,
//! the agent walks the `j`-th path of the global (value, type, path) order as
//! far as its ports exist, waits there, and walks back; for a 0-bit it waits
//! at home. Agents meet when they occupy the same node at the end of a round;
//! crossing inside an edge does not count.

use std::io;

use thiserror::Error;

use crate::graph::{GraphError, NodeId, Port, PortGraph};
use crate::path::{global_paths, EnumMode, GlobalPaths, Path};
use crate::Value;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RvError {
    #[error("agents must start at distinct nodes")]
    SameStart,
    #[error("agents must carry distinct labels")]
    SameLabel,
    #[error("labels are positive integers")]
    ZeroLabel,
    #[error("no meeting within {max_rounds} rounds")]
    RoundBudgetExceeded { max_rounds: u64 },
    #[error("bit {bit_index}: path of length {path_len} does not fit in {duration} rounds")]
    NegativeWait {
        bit_index: u64,
        path_len: usize,
        duration: u64,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Label block: the binary expansion of `label` (most significant bit
/// first) with every bit doubled, followed by `01`.
pub fn trans(label: u64) -> Vec<bool> {
    assert!(label >= 1, "labels are positive");
    let width = 64 - label.leading_zeros();
    let mut out = Vec::with_capacity(2 * width as usize + 2);
    for k in (0..width).rev() {
        let b = (label >> k) & 1 == 1;
        out.extend([b, b]);
    }
    out.extend([false, true]);
    out
}

/// The infinite repetition of a label block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tape {
    segment: Vec<bool>,
}

impl Tape {
    pub fn new(label: u64) -> Self {
        Tape {
            segment: trans(label),
        }
    }

    pub fn period(&self) -> u64 {
        self.segment.len() as u64
    }

    /// Bit `i`, 1-based.
    pub fn bit(&self, i: u64) -> bool {
        assert!(i >= 1, "tape bits are numbered from 1");
        self.segment[((i - 1) % self.period()) as usize]
    }

    /// 1-based index of the block copy containing bit `i`.
    pub fn segment_index(&self, i: u64) -> u64 {
        (i - 1) / self.period() + 1
    }

    pub fn segment(&self) -> &[bool] {
        &self.segment
    }
}

/// Rounds allotted to bit `i`: `3 i^2`.
pub fn alloc(i: u64) -> u64 {
    i.checked_mul(i)
        .and_then(|s| s.checked_mul(3))
        .expect("bit index too large for a round count")
}

/// Rounds taken by the first `n` bits: `n (n + 1) (2n + 1) / 2`.
pub fn bound_time(n: impl Into<Value>) -> Value {
    let n: Value = n.into();
    let one = Value::from(1u8);
    let two = Value::from(2u8);
    &n * (&n + &one) * (&two * &n + &one) / &two
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RvAction {
    Move(Port),
    Wait,
}

/// Round-by-round schedule for one tape bit. It starts and ends at the
/// agent's home and lasts exactly `duration` rounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitPlan {
    pub bit_index: u64,
    pub bit: bool,
    pub segment: u64,
    pub duration: u64,
    pub forward: Vec<Port>,
    pub wait: u64,
    pub back: Vec<Port>,
}

impl BitPlan {
    /// Action in round `k` of the plan, 0-based.
    pub fn action(&self, k: u64) -> RvAction {
        let out = self.forward.len() as u64;
        if k < out {
            RvAction::Move(self.forward[k as usize])
        } else if k < out + self.wait {
            RvAction::Wait
        } else {
            RvAction::Move(self.back[(k - out - self.wait) as usize])
        }
    }

    pub fn actions(&self) -> impl Iterator<Item = RvAction> + '_ {
        (0..self.duration).map(|k| self.action(k))
    }

    /// Consecutive waits starting at round `k`.
    fn waits_from(&self, k: u64) -> u64 {
        let out = self.forward.len() as u64;
        if k >= out && k < out + self.wait {
            out + self.wait - k
        } else {
            0
        }
    }
}

/// Plan bit `bit_index` for an agent at `home`. A 1-bit walks the longest
/// existing prefix of `path`, waits, and retraces it.
pub fn plan_bit<G: PortGraph>(
    g: &G,
    home: &G::Node,
    bit_index: u64,
    bit: bool,
    segment: u64,
    path: &Path,
) -> Result<BitPlan, RvError> {
    let duration = alloc(bit_index);
    let mut plan = BitPlan {
        bit_index,
        bit,
        segment,
        duration,
        forward: Vec::new(),
        wait: duration,
        back: Vec::new(),
    };
    if !bit {
        return Ok(plan);
    }
    let mut at = home.clone();
    for &p in path.ports() {
        if !g.degree(&at).has_port(p) {
            break;
        }
        let (next, entry) = g.neighbor(&at, p)?;
        plan.forward.push(p);
        plan.back.push(entry);
        at = next;
    }
    plan.back.reverse();
    let walking = 2 * plan.forward.len() as u64;
    plan.wait = duration.checked_sub(walking).ok_or(RvError::NegativeWait {
        bit_index,
        path_len: plan.forward.len(),
        duration,
    })?;
    Ok(plan)
}

/// Cached prefix of the global path order.
#[derive(Clone, Debug)]
pub struct PathOrder {
    source: GlobalPaths,
    paths: Vec<Path>,
}

impl PathOrder {
    pub fn new(mode: EnumMode) -> Self {
        PathOrder {
            source: global_paths(mode),
            paths: Vec::new(),
        }
    }

    /// The `j`-th path, 1-based.
    pub fn get(&mut self, j: u64) -> &Path {
        let j = j as usize;
        while self.paths.len() < j {
            let next = self.source.next().expect("the global order is infinite");
            self.paths.push(next);
        }
        &self.paths[j - 1]
    }
}

/// One agent running the rendezvous algorithm.
#[derive(Clone, Debug)]
pub struct UrvAgent<N> {
    home: N,
    position: N,
    tape: Tape,
    bit_index: u64,
    plan: Option<BitPlan>,
    cursor: u64,
}

impl<N: Clone + Eq> UrvAgent<N> {
    pub fn new(home: N, label: u64) -> Self {
        UrvAgent {
            position: home.clone(),
            home,
            tape: Tape::new(label),
            bit_index: 0,
            plan: None,
            cursor: 0,
        }
    }

    pub fn position(&self) -> &N {
        &self.position
    }

    pub fn tape(&self) -> &Tape {
        &self.tape
    }

    /// The plan being executed, if a bit has started.
    pub fn plan(&self) -> Option<&BitPlan> {
        self.plan.as_ref()
    }

    /// Whether the agent sits between two bits (no round of the next bit
    /// executed yet).
    pub fn at_bit_boundary(&self) -> bool {
        self.plan.as_ref().is_none_or(|p| self.cursor == p.duration)
    }

    fn ensure_plan<G: PortGraph<Node = N>>(
        &mut self,
        g: &G,
        order: &mut PathOrder,
    ) -> Result<(), RvError> {
        if !self.at_bit_boundary() {
            return Ok(());
        }
        debug_assert!(self.position == self.home, "bits start at home");
        self.bit_index += 1;
        let i = self.bit_index;
        let segment = self.tape.segment_index(i);
        let path = order.get(segment);
        self.plan = Some(plan_bit(g, &self.home, i, self.tape.bit(i), segment, path)?);
        self.cursor = 0;
        Ok(())
    }

    /// Execute one round.
    pub fn step<G: PortGraph<Node = N>>(
        &mut self,
        g: &G,
        order: &mut PathOrder,
    ) -> Result<RvAction, RvError> {
        self.ensure_plan(g, order)?;
        let plan = self.plan.as_ref().expect("plan was just ensured");
        let action = plan.action(self.cursor);
        if let RvAction::Move(p) = action {
            self.position = g.neighbor(&self.position, p)?.0;
        }
        self.cursor += 1;
        Ok(action)
    }

    /// Number of upcoming rounds that are certainly waits.
    fn pending_waits<G: PortGraph<Node = N>>(
        &mut self,
        g: &G,
        order: &mut PathOrder,
    ) -> Result<u64, RvError> {
        self.ensure_plan(g, order)?;
        Ok(self.plan.as_ref().map_or(0, |p| p.waits_from(self.cursor)))
    }

    fn skip_waits(&mut self, k: u64) {
        debug_assert!(self
            .plan
            .as_ref()
            .is_some_and(|p| p.waits_from(self.cursor) >= k));
        self.cursor += k;
    }
}

/// Run a single agent from `start`, calling `on_move` with the round number
/// and new position after every move, until it returns true. Returns that
/// round, or `None` once `max_rounds` rounds have passed.
pub fn run_lone<G: PortGraph>(
    g: &G,
    start: &G::Node,
    label: u64,
    mode: EnumMode,
    max_rounds: u64,
    on_move: &mut dyn FnMut(u64, &G::Node) -> bool,
) -> Result<Option<u64>, RvError> {
    if label == 0 {
        return Err(RvError::ZeroLabel);
    }
    let mut order = PathOrder::new(mode);
    let mut agent = UrvAgent::new(start.clone(), label);
    let mut round = 0;
    while round < max_rounds {
        let k = agent.pending_waits(g, &mut order)?.min(max_rounds - round);
        if k > 0 {
            agent.skip_waits(k);
            round += k;
            continue;
        }
        round += 1;
        agent.step(g, &mut order)?;
        if on_move(round, agent.position()) {
            return Ok(Some(round));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct RvConfig {
    /// Rounds agent 2 sleeps after agent 1 wakes.
    pub delay: u64,
    pub max_rounds: u64,
    pub mode: EnumMode,
    /// Record one row per agent per round; disables wait skipping.
    pub trace: bool,
}

impl Default for RvConfig {
    fn default() -> Self {
        RvConfig {
            delay: 0,
            max_rounds: 100_000_000,
            mode: EnumMode::Fixed,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RvTraceRow {
    pub round: u64,
    pub agent: u8,
    pub awake: bool,
    pub node: NodeId,
    /// `None` while dormant.
    pub action: Option<RvAction>,
    pub bit_index: u64,
    pub bit_value: bool,
    pub segment_index: u64,
}

#[derive(Clone, Debug, Default)]
pub struct RvResult {
    pub met: bool,
    /// Rounds since agent 1 woke.
    pub meeting_round: Option<u64>,
    pub meeting_node: Option<NodeId>,
    pub traces: [Vec<RvTraceRow>; 2],
}

/// Simulate two agents, agent 2 waking `cfg.delay` rounds after agent 1.
/// A dormant agent stays at its start and can be met there.
pub fn run_urv<G: PortGraph>(
    g: &G,
    start1: (&G::Node, u64),
    start2: (&G::Node, u64),
    cfg: &RvConfig,
) -> Result<RvResult, RvError> {
    if start1.1 == 0 || start2.1 == 0 {
        return Err(RvError::ZeroLabel);
    }
    if start1.1 == start2.1 {
        return Err(RvError::SameLabel);
    }
    if start1.0 == start2.0 {
        return Err(RvError::SameStart);
    }
    let mut order = PathOrder::new(cfg.mode);
    let mut agents = [
        UrvAgent::new(start1.0.clone(), start1.1),
        UrvAgent::new(start2.0.clone(), start2.1),
    ];
    let mut result = RvResult::default();
    let mut round: u64 = 0;
    while round < cfg.max_rounds {
        if !cfg.trace {
            let w1 = agents[0].pending_waits(g, &mut order)?;
            let w2 = if round < cfg.delay {
                cfg.delay - round
            } else {
                agents[1].pending_waits(g, &mut order)?
            };
            let k = w1.min(w2).min(cfg.max_rounds - round);
            if k > 0 {
                // nobody moves, so the (distinct) positions stay distinct
                agents[0].skip_waits(k);
                if round >= cfg.delay {
                    agents[1].skip_waits(k);
                }
                round += k;
                continue;
            }
        }
        round += 1;
        for (idx, agent) in agents.iter_mut().enumerate() {
            let awake = idx == 0 || round > cfg.delay;
            let action = if awake {
                Some(agent.step(g, &mut order)?)
            } else {
                None
            };
            if cfg.trace {
                let plan = agent.plan();
                result.traces[idx].push(RvTraceRow {
                    round,
                    agent: idx as u8 + 1,
                    awake,
                    node: g.node_id(agent.position()),
                    action,
                    bit_index: plan.map_or(0, |p| p.bit_index),
                    bit_value: plan.is_some_and(|p| p.bit),
                    segment_index: plan.map_or(0, |p| p.segment),
                });
            }
        }
        if agents[0].position() == agents[1].position() {
            result.met = true;
            result.meeting_round = Some(round);
            result.meeting_node = Some(g.node_id(agents[0].position()));
            return Ok(result);
        }
    }
    Err(RvError::RoundBudgetExceeded {
        max_rounds: cfg.max_rounds,
    })
}

/// Write trace rows as CSV with the header
/// `round,agent,awake,node,action,port,bit_index,bit_value,segment_index`.
pub fn write_rv_trace<W: io::Write>(rows: &[RvTraceRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "round",
        "agent",
        "awake",
        "node",
        "action",
        "port",
        "bit_index",
        "bit_value",
        "segment_index",
    ])?;
    for r in rows {
        let (action, port) = match r.action {
            Some(RvAction::Move(p)) => ("move", p.to_string()),
            Some(RvAction::Wait) => ("wait", String::new()),
            None => ("dormant", String::new()),
        };
        let blank_if_dormant = |v: u64| {
            if r.awake {
                v.to_string()
            } else {
                String::new()
            }
        };
        w.write_record([
            r.round.to_string(),
            r.agent.to_string(),
            u8::from(r.awake).to_string(),
            r.node.to_string(),
            action.to_string(),
            port,
            blank_if_dormant(r.bit_index),
            blank_if_dormant(u64::from(r.bit_value)),
            blank_if_dormant(r.segment_index),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a result from both agents, interleaved by round.
pub fn merged_trace(result: &RvResult) -> Vec<RvTraceRow> {
    let mut rows: Vec<RvTraceRow> = result.traces.iter().flatten().cloned().collect();
    rows.sort_by_key(|r| (r.round, r.agent));
    rows
}

/// Summary line `met,meeting_round,meeting_node` (with header).
pub fn write_rv_summary<W: io::Write>(result: &RvResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["met", "meeting_round", "meeting_node"])?;
    w.write_record([
        result.met.to_string(),
        result
            .meeting_round
            .map(|r| r.to_string())
            .unwrap_or_default(),
        result
            .meeting_node
            .as_ref()
            .map(|n| n.to_string())
            .unwrap_or_default(),
    ])?;
    w.flush()?;
    Ok(())
}
