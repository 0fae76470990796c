//! Brute-force ground truth: character, weight, and critical paths.
//!
//! Nothing here runs an agent. The character of `(u, v)` is found by walking
//! types in (value, type) order and searching each type depth-first for a
//! path from `u` that ends at `v`; every search is capped by an explicit
//! value bound.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::graph::{Degree, GraphError, NodeId, Port, PortGraph};
use crate::path::{index_of_path, EnumMode, Path, PathType};
use crate::{ExactTypeStream, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("no path of value at most {cap} reaches the target")]
    CapExceeded { cap: Value },
    #[error("source and target are the same node")]
    SameNode,
    #[error("node {0} has infinite degree")]
    InfiniteDegree(NodeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightResult {
    pub character: PathType,
    pub weight: Value,
    /// First path from `u` to `v` in the global (value, type, path) order.
    pub witness: Path,
    /// 1-based position of `witness` in that order.
    pub witness_index: Value,
}

/// Character and weight of the ordered pair `(u, v)`.
pub fn character_weight<G: PortGraph>(
    g: &G,
    u: &G::Node,
    v: &G::Node,
    cap: &Value,
) -> Result<WeightResult, OracleError> {
    if u == v {
        return Err(OracleError::SameNode);
    }
    for entry in ExactTypeStream::bounded(EnumMode::Fixed, g.port_bound()) {
        if &entry.value > cap {
            break;
        }
        if let Some(ports) = first_path_of_type(g, u, v, entry.ty) {
            let witness = Path::new(ports).expect("witness paths are nonempty");
            let witness_index =
                index_of_path(&witness, EnumMode::Fixed).expect("fixed mode enumerates every path");
            return Ok(WeightResult {
                character: entry.ty,
                weight: entry.value,
                witness,
                witness_index,
            });
        }
    }
    Err(OracleError::CapExceeded { cap: cap.clone() })
}

/// Lexicographically first path of type `ty` from `u` ending at `v`.
fn first_path_of_type<G: PortGraph>(
    g: &G,
    u: &G::Node,
    v: &G::Node,
    ty: PathType,
) -> Option<Vec<Port>> {
    fn search<G: PortGraph>(
        g: &G,
        at: &G::Node,
        target: &G::Node,
        ty: PathType,
        used_max: bool,
        prefix: &mut Vec<Port>,
    ) -> bool {
        let remaining = ty.len - prefix.len() as u64;
        if remaining == 0 {
            return used_max && at == target;
        }
        let lowest = if remaining == 1 && !used_max {
            ty.max_port
        } else {
            1
        };
        let degree = g.degree(at);
        for p in lowest..=ty.max_port {
            // ports above a finite degree are all absent
            if !degree.has_port(p) {
                break;
            }
            let (next, _) = g.neighbor(at, p).expect("port within degree");
            prefix.push(p);
            if search(g, &next, target, ty, used_max || p == ty.max_port, prefix) {
                return true;
            }
            prefix.pop();
        }
        false
    }
    let mut prefix = Vec::with_capacity(ty.len as usize);
    search(g, u, v, ty, false, &mut prefix).then_some(prefix)
}

/// `max(w(v1, v2), w(v2, v1))`.
pub fn big_weight<G: PortGraph>(
    g: &G,
    v1: &G::Node,
    v2: &G::Node,
    cap: &Value,
) -> Result<Value, OracleError> {
    let a = character_weight(g, v1, v2, cap)?.weight;
    let b = character_weight(g, v2, v1, cap)?.weight;
    Ok(a.max(b))
}

/// The critical path from `v1` to `v2`, taken as the first `v1 -> v2` path
/// in the global order, together with its 1-based index.
pub fn critical_path<G: PortGraph>(
    g: &G,
    v1: &G::Node,
    v2: &G::Node,
    cap: &Value,
) -> Result<(Path, Value), OracleError> {
    let r = character_weight(g, v1, v2, cap)?;
    Ok((r.witness, r.witness_index))
}

/// Lexicographically smallest among the shortest paths from `v1` to `v2`.
/// Every node within distance `d(v1, v2)` of `v2` must have finite degree.
pub fn bp_lex_shortest_path<G: PortGraph>(
    g: &G,
    v1: &G::Node,
    v2: &G::Node,
) -> Result<Path, OracleError> {
    if v1 == v2 {
        return Err(OracleError::SameNode);
    }
    let finite_degree = |n: &G::Node| match g.degree(n) {
        Degree::Finite(d) => Ok(d),
        Degree::CountablyInfinite => Err(OracleError::InfiniteDegree(g.node_id(n))),
    };
    // distances to v2, layer by layer, until v1's layer is complete
    let mut dist: HashMap<G::Node, u64> = HashMap::from([(v2.clone(), 0)]);
    let mut queue = VecDeque::from([v2.clone()]);
    while let Some(n) = queue.pop_front() {
        let dn = dist[&n];
        if dist.get(v1).is_some_and(|&d| dn >= d) {
            break;
        }
        for p in 1..=finite_degree(&n)? {
            let (m, _) = g.neighbor(&n, p)?;
            dist.entry(m.clone()).or_insert_with(|| {
                queue.push_back(m);
                dn + 1
            });
        }
    }
    let mut at = v1.clone();
    let mut ports = Vec::new();
    while at != *v2 {
        let here = dist[&at];
        let mut step = None;
        for p in 1..=finite_degree(&at)? {
            let (m, _) = g.neighbor(&at, p)?;
            if dist.get(&m) == Some(&(here - 1)) {
                step = Some((p, m));
                break;
            }
        }
        let (p, m) = step.expect("a distance-decreasing port exists");
        ports.push(p);
        at = m;
    }
    Ok(Path::new(ports).expect("distinct endpoints give a nonempty path"))
}
