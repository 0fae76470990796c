//! The universal treasure hunt agent.
//!
//! The agent tries every path from its base in increasing (value, type,
//! path) order, returning to the base after each attempt, and stops the
//! moment it enters the treasure node. It talks to the world only through a
//! [`Navigator`], which exposes ports and entry ports and nothing else.

use std::io;

use thiserror::Error;

use crate::graph::{GraphError, Port, PortGraph};
use crate::path::{EnumMode, Path, PathType, TypePaths};
use crate::{FastTypeStream, FastValue, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HuntError {
    #[error("treasure not found within {max_steps} steps")]
    StepBudgetExceeded { max_steps: u64 },
    #[error("type values exceeded the fixed-width range")]
    ValueOverflow,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Move,
    Backtrack,
    ProbeFail,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Move => "move",
            Action::Backtrack => "backtrack",
            Action::ProbeFail => "probe_fail",
        }
    }
}

/// One trace row. `step` is the traversal count after the action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HuntEvent {
    pub step: u64,
    pub phase_value: FastValue,
    pub ty: PathType,
    pub action: Action,
    pub port: Port,
    pub treasure: bool,
}

/// What the agent observes after choosing a port.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Probe {
    /// The current node has no such port. Costs no traversal.
    Absent,
    /// The edge was traversed; `entry` is the port it arrived through.
    Entered { entry: Port, treasure: bool },
}

/// The agent's only interface to the graph.
///
/// The simulator keeps the position; the agent sees entry ports and whether
/// the treasure is at the node it just entered.
pub struct Navigator<'a, G: PortGraph> {
    graph: &'a G,
    position: G::Node,
    steps: u64,
    max_steps: u64,
    is_treasure: &'a mut dyn FnMut(&G::Node) -> bool,
    trace: Option<Vec<HuntEvent>>,
    phase: (FastValue, PathType),
}

impl<'a, G: PortGraph> Navigator<'a, G> {
    pub fn new(
        graph: &'a G,
        base: G::Node,
        max_steps: u64,
        is_treasure: &'a mut dyn FnMut(&G::Node) -> bool,
    ) -> Self {
        Navigator {
            graph,
            position: base,
            steps: 0,
            max_steps,
            is_treasure,
            trace: None,
            phase: (0, PathType::new(1, 1)),
        }
    }

    pub fn record_trace(mut self, on: bool) -> Self {
        self.trace = on.then(Vec::new);
        self
    }

    /// Label subsequent trace rows with the phase value and type.
    pub fn set_phase(&mut self, value: FastValue, ty: PathType) {
        self.phase = (value, ty);
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Simulator-side view of the current node. Agent logic never calls this.
    pub fn position(&self) -> &G::Node {
        &self.position
    }

    pub fn take_trace(&mut self) -> Vec<HuntEvent> {
        self.trace.take().unwrap_or_default()
    }

    /// Take `port` going away from the base.
    pub fn take_port(&mut self, port: Port) -> Result<Probe, HuntError> {
        self.step(port, Action::Move)
    }

    /// Take `port` on the way back to the base.
    pub fn backtrack(&mut self, port: Port) -> Result<Probe, HuntError> {
        self.step(port, Action::Backtrack)
    }

    fn step(&mut self, port: Port, action: Action) -> Result<Probe, HuntError> {
        if !self.graph.degree(&self.position).has_port(port) {
            self.log(Action::ProbeFail, port, false);
            return Ok(Probe::Absent);
        }
        if self.steps >= self.max_steps {
            return Err(HuntError::StepBudgetExceeded {
                max_steps: self.max_steps,
            });
        }
        let (next, entry) = self.graph.neighbor(&self.position, port)?;
        self.position = next;
        self.steps += 1;
        let treasure = (self.is_treasure)(&self.position);
        self.log(action, port, treasure);
        Ok(Probe::Entered { entry, treasure })
    }

    fn log(&mut self, action: Action, port: Port, treasure: bool) {
        if let Some(trace) = &mut self.trace {
            trace.push(HuntEvent {
                step: self.steps,
                phase_value: self.phase.0,
                ty: self.phase.1,
                action,
                port,
                treasure,
            });
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraverseOutcome {
    pub feasible_prefix: Vec<Port>,
    /// Entry ports learned on the way out, in the order they are taken back.
    pub learned_reverse: Vec<Port>,
    pub steps_used: u64,
    /// Length of the prefix after which the treasure was entered.
    pub treasure_hit: Option<usize>,
}

/// Follow `path` while its ports exist, then retrace the learned reverse path
/// to the base. With `stop_at_treasure`, halt on entering the treasure.
pub fn traverse<G: PortGraph>(
    nav: &mut Navigator<'_, G>,
    path: &Path,
    stop_at_treasure: bool,
) -> Result<TraverseOutcome, HuntError> {
    let start = nav.steps();
    let mut out = TraverseOutcome::default();
    let mut entries = Vec::with_capacity(path.len());
    for &p in path.ports() {
        match nav.take_port(p)? {
            Probe::Absent => break,
            Probe::Entered { entry, treasure } => {
                out.feasible_prefix.push(p);
                entries.push(entry);
                if treasure && stop_at_treasure {
                    out.treasure_hit = Some(out.feasible_prefix.len());
                    out.learned_reverse = entries.into_iter().rev().collect();
                    out.steps_used = nav.steps() - start;
                    return Ok(out);
                }
            }
        }
    }
    out.learned_reverse = entries.into_iter().rev().collect();
    for &q in &out.learned_reverse {
        nav.backtrack(q)?;
    }
    out.steps_used = nav.steps() - start;
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathsOutcome {
    pub paths_tried: u64,
    pub steps_used: u64,
    /// The path during which the treasure was entered, and the prefix length.
    pub treasure: Option<(Path, usize)>,
}

/// Traverse every path of type `ty` in lexicographic order.
pub fn run_paths_procedure<G: PortGraph>(
    nav: &mut Navigator<'_, G>,
    ty: PathType,
    stop_at_treasure: bool,
) -> Result<PathsOutcome, HuntError> {
    let start = nav.steps();
    let mut out = PathsOutcome::default();
    for path in TypePaths::new(ty) {
        out.paths_tried += 1;
        let t = traverse(nav, &path, stop_at_treasure)?;
        if let Some(len) = t.treasure_hit {
            out.treasure = Some((path, len));
            break;
        }
    }
    out.steps_used = nav.steps() - start;
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct HuntConfig {
    pub mode: EnumMode,
    pub max_steps: u64,
    pub trace: bool,
}

impl Default for HuntConfig {
    fn default() -> Self {
        HuntConfig {
            mode: EnumMode::Fixed,
            max_steps: 1_000_000,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct HuntResult {
    pub found: bool,
    pub steps: u64,
    /// Type being enumerated when the treasure was entered; `None` when the
    /// treasure sits at the base.
    pub found_during_type: Option<PathType>,
    pub found_phase_value: Option<Value>,
    pub visit_prefix: Option<Vec<Port>>,
    pub trace: Vec<HuntEvent>,
}

/// Run the universal treasure hunt from `base` until `is_treasure` holds at
/// the agent's node.
pub fn hunt_until<G: PortGraph>(
    graph: &G,
    base: &G::Node,
    cfg: &HuntConfig,
    is_treasure: &mut dyn FnMut(&G::Node) -> bool,
) -> Result<HuntResult, HuntError> {
    if is_treasure(base) {
        return Ok(HuntResult {
            found: true,
            ..HuntResult::default()
        });
    }
    let mut nav =
        Navigator::new(graph, base.clone(), cfg.max_steps, is_treasure).record_trace(cfg.trace);
    let mut types = FastTypeStream::new(cfg.mode);
    for entry in types.by_ref() {
        nav.set_phase(entry.value, entry.ty);
        let outcome = run_paths_procedure(&mut nav, entry.ty, true)?;
        if let Some((path, len)) = outcome.treasure {
            return Ok(HuntResult {
                found: true,
                steps: nav.steps(),
                found_during_type: Some(entry.ty),
                found_phase_value: Some(Value::from(entry.value)),
                visit_prefix: Some(path.ports()[..len].to_vec()),
                trace: nav.take_trace(),
            });
        }
    }
    debug_assert!(types.overflowed());
    Err(HuntError::ValueOverflow)
}

/// Universal treasure hunt for a treasure at node `treasure`.
pub fn run_uth<G: PortGraph>(
    graph: &G,
    base: &G::Node,
    treasure: &G::Node,
    cfg: &HuntConfig,
) -> Result<HuntResult, HuntError> {
    hunt_until(graph, base, cfg, &mut |v| v == treasure)
}

/// Write trace rows as CSV with the header
/// `step,phase_value,type_m,type_delta,action,port,result`.
pub fn write_hunt_trace<W: io::Write>(events: &[HuntEvent], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "step",
        "phase_value",
        "type_m",
        "type_delta",
        "action",
        "port",
        "result",
    ])?;
    for e in events {
        w.write_record([
            e.step.to_string(),
            e.phase_value.to_string(),
            e.ty.max_port.to_string(),
            e.ty.len.to_string(),
            e.action.as_str().to_string(),
            e.port.to_string(),
            if e.treasure { "treasure" } else { "ok" }.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_finite, builtin, AnyGraph, FiniteGraph, PortTree};

    fn path_graph() -> FiniteGraph {
        build_finite(&"edge u 1 x 1\nedge x 2 v 1".parse().unwrap()).unwrap()
    }

    fn p(ports: &[Port]) -> Path {
        Path::new(ports.to_vec()).unwrap()
    }

    #[test]
    fn traverse_backtracks_from_missing_port() {
        // base -5-> a -2-> b -3-> c, and c has degree 3
        let spec = "edge base 5 a 1\nedge base 1 z1 1\nedge base 2 z2 1\nedge base 3 z3 1\nedge base 4 z4 1\n\
                    edge a 2 b 1\nedge b 3 c 1\nedge b 2 y 1\nedge c 2 d 1\nedge c 3 e 1";
        let g = build_finite(&spec.parse().unwrap()).unwrap();
        let base = g.resolve("base").unwrap();
        let mut never = |_: &usize| false;
        let mut nav = Navigator::new(&g, base, 100, &mut never);
        let out = traverse(&mut nav, &p(&[5, 2, 3, 5, 4, 1]), true).unwrap();
        assert_eq!(out.feasible_prefix, vec![5, 2, 3]);
        assert_eq!(out.learned_reverse, vec![1, 1, 1]);
        assert_eq!(out.steps_used, 6);
        assert_eq!(*nav.position(), base);
    }

    #[test]
    fn traverse_with_absent_first_port_costs_nothing() {
        let g = builtin("two_node", &[]).unwrap();
        let u = g.resolve("u").unwrap();
        let mut never = |_: &_| false;
        let mut nav = Navigator::new(&g, u.clone(), 100, &mut never);
        let out = traverse(&mut nav, &p(&[2]), true).unwrap();
        assert_eq!(out, TraverseOutcome::default());
        assert_eq!(*nav.position(), u);
    }

    #[test]
    fn traverse_halts_at_treasure() {
        let g = path_graph();
        let (u, v) = (g.resolve("u").unwrap(), g.resolve("v").unwrap());
        let mut at_v = |n: &usize| *n == v;
        let mut nav = Navigator::new(&g, u, 100, &mut at_v);
        let out = traverse(&mut nav, &p(&[1, 2]), true).unwrap();
        assert_eq!(out.treasure_hit, Some(2));
        assert_eq!(out.steps_used, 2);
        assert_eq!(*nav.position(), v);
    }

    #[test]
    fn paths_procedure_on_two_node_graph() {
        let g = builtin("two_node", &[]).unwrap();
        let u = g.resolve("u").unwrap();
        let mut never = |_: &_| false;
        let mut nav = Navigator::new(&g, u.clone(), 100, &mut never);
        // (1,2): one move out, port 2 missing, one move back; (2,1), (2,2): nothing
        let out = run_paths_procedure(&mut nav, PathType::new(2, 2), false).unwrap();
        assert_eq!(out.paths_tried, 3);
        assert_eq!(out.steps_used, 2);
        assert_eq!(*nav.position(), u);
        let out = run_paths_procedure(&mut nav, PathType::new(1, 1), false).unwrap();
        assert_eq!((out.paths_tried, out.steps_used), (1, 2));
    }

    #[test]
    fn paths_procedure_on_omega_root() {
        let t = PortTree::omega();
        let root = t.root();
        let mut never = |_: &_| false;
        let mut nav = Navigator::new(&t, root.clone(), 100, &mut never);
        let out = run_paths_procedure(&mut nav, PathType::new(2, 1), false).unwrap();
        assert_eq!(out.steps_used, 2);
        assert_eq!(*nav.position(), root);
    }

    #[test]
    fn uth_on_path_graph() {
        let g = path_graph();
        let (u, v) = (g.resolve("u").unwrap(), g.resolve("v").unwrap());
        let r = run_uth(&g, &u, &v, &HuntConfig::default()).unwrap();
        assert!(r.found);
        assert_eq!(r.found_during_type, Some(PathType::new(2, 2)));
        assert_eq!(r.found_phase_value, Some(Value::from(32u32)));
        assert_eq!(r.visit_prefix, Some(vec![1, 2]));
        // (1): 2, (1,1): 4, (1,1,1): 6, then (1,2) reaches v after 2
        assert_eq!(r.steps, 14);
    }

    #[test]
    fn uth_on_two_node_graph() {
        let g = builtin("two_node", &[]).unwrap();
        let (u, v) = (g.resolve("u").unwrap(), g.resolve("v").unwrap());
        let r = run_uth(&g, &u, &v, &HuntConfig::default()).unwrap();
        assert_eq!(r.steps, 1);
        assert_eq!(r.found_during_type, Some(PathType::new(1, 1)));
        assert_eq!(r.found_phase_value, Some(Value::from(2u32)));
    }

    #[test]
    fn strict_mode_finds_two_node_treasure_late() {
        let g = builtin("two_node", &[]).unwrap();
        let (u, v) = (g.resolve("u").unwrap(), g.resolve("v").unwrap());
        let cfg = HuntConfig {
            mode: EnumMode::Strict,
            ..HuntConfig::default()
        };
        let r = run_uth(&g, &u, &v, &cfg).unwrap();
        assert_eq!(r.found_during_type, Some(PathType::new(2, 2)));
        assert_eq!(r.found_phase_value, Some(Value::from(32u32)));
    }

    #[test]
    fn treasure_at_base_costs_nothing() {
        let g = builtin("two_node", &[]).unwrap();
        let u = g.resolve("u").unwrap();
        let r = run_uth(&g, &u, &u, &HuntConfig::default()).unwrap();
        assert!(r.found);
        assert_eq!(r.steps, 0);
        assert_eq!(r.found_during_type, None);
    }

    #[test]
    fn step_cap_is_enforced() {
        let g = path_graph();
        let (u, v) = (g.resolve("u").unwrap(), g.resolve("v").unwrap());
        let cfg = HuntConfig {
            max_steps: 13,
            ..HuntConfig::default()
        };
        assert_eq!(
            run_uth(&g, &u, &v, &cfg).unwrap_err(),
            HuntError::StepBudgetExceeded { max_steps: 13 }
        );
        let cfg = HuntConfig {
            max_steps: 14,
            ..HuntConfig::default()
        };
        assert!(run_uth(&g, &u, &v, &cfg).is_ok());
    }

    #[test]
    fn trace_rows_and_csv() {
        let g: AnyGraph = builtin("two_node", &[]).unwrap();
        let (u, v) = (g.resolve("u").unwrap(), g.resolve("v").unwrap());
        let cfg = HuntConfig {
            trace: true,
            ..HuntConfig::default()
        };
        let r = run_uth(&g, &u, &v, &cfg).unwrap();
        assert_eq!(
            r.trace,
            vec![HuntEvent {
                step: 1,
                phase_value: 2,
                ty: PathType::new(1, 1),
                action: Action::Move,
                port: 1,
                treasure: true
            }]
        );
        let mut buf = Vec::new();
        write_hunt_trace(&r.trace, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "step,phase_value,type_m,type_delta,action,port,result\n1,2,1,1,move,1,treasure\n"
        );
    }
}
