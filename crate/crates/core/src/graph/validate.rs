use std::collections::{HashSet, VecDeque};

use super::{Degree, NodeId, Port, PortGraph};

/// How much of an infinite graph to sweep. Finite graphs are always checked
/// completely.
#[derive(Clone, Copy, Debug)]
pub struct SampleBudget {
    pub max_nodes: usize,
    pub max_port: Port,
}

impl Default for SampleBudget {
    fn default() -> Self {
        SampleBudget {
            max_nodes: 10_000,
            max_port: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `neighbor(neighbor(v, p))` is not `(v, p)`.
    Involution {
        node: NodeId,
        port: Port,
        back: Option<(NodeId, Port)>,
    },
    /// The entry port is not a valid port at the node entered.
    EntryPort {
        node: NodeId,
        port: Port,
        reached: NodeId,
        entry: Port,
    },
    /// A port within the declared degree cannot be taken.
    MissingPort { node: NodeId, port: Port },
    /// A port beyond a finite degree can be taken.
    ExtraPort { node: NodeId, port: Port },
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub nodes_checked: usize,
    pub ports_checked: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check port involution, entry-port validity and port-set completeness over
/// the region reachable from the graph's seeds, within `budget`.
pub fn validate<G: PortGraph>(g: &G, budget: SampleBudget) -> ValidationReport {
    let finite = g.is_finite();
    let mut report = ValidationReport::default();
    let mut seen: HashSet<G::Node> = HashSet::new();
    let mut queue: VecDeque<G::Node> = VecDeque::new();
    for s in g.seeds() {
        if seen.insert(s.clone()) {
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        report.nodes_checked += 1;
        let degree = g.degree(&v);
        let last = match degree {
            Degree::Finite(d) if finite => d,
            Degree::Finite(d) => d.min(budget.max_port),
            Degree::CountablyInfinite => budget.max_port,
        };
        for p in 1..=last {
            report.ports_checked += 1;
            let Ok((u, q)) = g.neighbor(&v, p) else {
                report.violations.push(Violation::MissingPort {
                    node: g.node_id(&v),
                    port: p,
                });
                continue;
            };
            if !g.degree(&u).has_port(q) {
                report.violations.push(Violation::EntryPort {
                    node: g.node_id(&v),
                    port: p,
                    reached: g.node_id(&u),
                    entry: q,
                });
            }
            match g.neighbor(&u, q) {
                Ok((back, bq)) if back == v && bq == p => {}
                other => report.violations.push(Violation::Involution {
                    node: g.node_id(&v),
                    port: p,
                    back: other.ok().map(|(b, bq)| (g.node_id(&b), bq)),
                }),
            }
            if (finite || seen.len() < budget.max_nodes) && seen.insert(u.clone()) {
                queue.push_back(u);
            }
        }
        if let Degree::Finite(d) = degree {
            if g.neighbor(&v, d + 1).is_ok() {
                report.violations.push(Violation::ExtraPort {
                    node: g.node_id(&v),
                    port: d + 1,
                });
            }
        }
    }
    report
}
