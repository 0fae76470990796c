//! Anonymous port-numbered graphs.
//!
//! A graph is only ever navigated: from a node, take port `p`, land on some
//! node and learn the entry port there. Finite graphs are stored explicitly;
//! infinite ones (including the tree whose every node has countably infinite
//! degree) are generated lazily from canonical node addresses.

mod builtin;
mod finite;
mod tree;
mod validate;

use std::fmt;
use std::hash::Hash;

use thiserror::Error;

pub use builtin::{builtin, parse_graph_ref, random_port_graph, random_tree, BUILTIN_FAMILIES};
pub use finite::{build_finite, EdgeRecord, FiniteGraph, FiniteGraphSpec};
pub use tree::{PortTree, TreeAddr};
pub use validate::{validate, SampleBudget, ValidationReport, Violation};

/// A port number. Ports are positive; `0` is never a valid port.
pub type Port = u64;

/// Simulator-side identity of a node. Agents never see these.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(key: impl Into<String>) -> Self {
        NodeId(key.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    Finite(u64),
    CountablyInfinite,
}

impl Degree {
    /// Whether `port` exists at a node of this degree.
    pub fn has_port(self, port: Port) -> bool {
        match self {
            Degree::Finite(d) => port >= 1 && port <= d,
            Degree::CountablyInfinite => port >= 1,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(d) => write!(f, "{d}"),
            Degree::CountablyInfinite => f.write_str("omega"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {node} has no port {port}")]
    NoSuchPort { node: NodeId, port: Port },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid ports: {0}")]
    InvalidPorts(String),
    #[error("graph is disconnected: `{0}` is unreachable from `{1}`")]
    Disconnected(String, String),
    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("cannot read graph file: {0}")]
    Io(String),
}

/// Navigation structure shared by every graph representation.
///
/// `Node` is the simulator's cheap handle. It must never leak into agent
/// logic; agents see ports only.
pub trait PortGraph {
    type Node: Clone + Eq + Hash + fmt::Debug;

    fn degree(&self, v: &Self::Node) -> Degree;

    /// Take `port` at `v`: the node reached and the entry port there.
    fn neighbor(&self, v: &Self::Node, port: Port) -> Result<(Self::Node, Port), GraphError>;

    fn node_id(&self, v: &Self::Node) -> NodeId;

    fn resolve(&self, id: &str) -> Result<Self::Node, GraphError>;

    /// Every node of a finite graph, or the generator's seed nodes.
    fn seeds(&self) -> Vec<Self::Node>;

    /// True iff the graph has finitely many nodes and `seeds` lists them all.
    fn is_finite(&self) -> bool;

    /// Upper bound on every port number present in the graph, if one exists.
    /// Agents must not consult this; oracles may.
    fn port_bound(&self) -> Option<Port> {
        None
    }

    fn degree_of(&self, id: &str) -> Result<Degree, GraphError> {
        Ok(self.degree(&self.resolve(id)?))
    }

    fn neighbor_of(&self, id: &str, port: Port) -> Result<(NodeId, Port), GraphError> {
        let v = self.resolve(id)?;
        let (u, q) = self.neighbor(&v, port)?;
        Ok((self.node_id(&u), q))
    }

    /// Follow `ports` from `start`; `None` as soon as a port is missing.
    fn walk(&self, start: &Self::Node, ports: &[Port]) -> Option<Self::Node> {
        let mut at = start.clone();
        for &p in ports {
            at = self.neighbor(&at, p).ok()?.0;
        }
        Some(at)
    }
}

impl<G: PortGraph + ?Sized> PortGraph for &G {
    type Node = G::Node;

    fn degree(&self, v: &Self::Node) -> Degree {
        (**self).degree(v)
    }
    fn neighbor(&self, v: &Self::Node, port: Port) -> Result<(Self::Node, Port), GraphError> {
        (**self).neighbor(v, port)
    }
    fn node_id(&self, v: &Self::Node) -> NodeId {
        (**self).node_id(v)
    }
    fn resolve(&self, id: &str) -> Result<Self::Node, GraphError> {
        (**self).resolve(id)
    }
    fn seeds(&self) -> Vec<Self::Node> {
        (**self).seeds()
    }
    fn is_finite(&self) -> bool {
        (**self).is_finite()
    }
    fn port_bound(&self) -> Option<Port> {
        (**self).port_bound()
    }
}

/// Either graph representation, as loaded from a file or builtin reference.
#[derive(Clone, Debug)]
pub enum AnyGraph {
    Finite(FiniteGraph),
    Tree(PortTree),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AnyNode {
    Index(usize),
    Addr(TreeAddr),
}

impl AnyGraph {
    pub fn as_finite(&self) -> Option<&FiniteGraph> {
        match self {
            AnyGraph::Finite(g) => Some(g),
            AnyGraph::Tree(_) => None,
        }
    }
}

impl From<FiniteGraph> for AnyGraph {
    fn from(g: FiniteGraph) -> Self {
        AnyGraph::Finite(g)
    }
}

impl From<PortTree> for AnyGraph {
    fn from(t: PortTree) -> Self {
        AnyGraph::Tree(t)
    }
}

impl PortGraph for AnyGraph {
    type Node = AnyNode;

    fn degree(&self, v: &AnyNode) -> Degree {
        match (self, v) {
            (AnyGraph::Finite(g), AnyNode::Index(i)) => g.degree(i),
            (AnyGraph::Tree(t), AnyNode::Addr(a)) => t.degree(a),
            _ => panic!("node handle {v:?} does not belong to this graph"),
        }
    }

    fn neighbor(&self, v: &AnyNode, port: Port) -> Result<(AnyNode, Port), GraphError> {
        match (self, v) {
            (AnyGraph::Finite(g), AnyNode::Index(i)) => {
                g.neighbor(i, port).map(|(u, q)| (AnyNode::Index(u), q))
            }
            (AnyGraph::Tree(t), AnyNode::Addr(a)) => {
                t.neighbor(a, port).map(|(u, q)| (AnyNode::Addr(u), q))
            }
            _ => panic!("node handle {v:?} does not belong to this graph"),
        }
    }

    fn node_id(&self, v: &AnyNode) -> NodeId {
        match (self, v) {
            (AnyGraph::Finite(g), AnyNode::Index(i)) => g.node_id(i),
            (AnyGraph::Tree(t), AnyNode::Addr(a)) => t.node_id(a),
            _ => panic!("node handle {v:?} does not belong to this graph"),
        }
    }

    fn resolve(&self, id: &str) -> Result<AnyNode, GraphError> {
        match self {
            AnyGraph::Finite(g) => g.resolve(id).map(AnyNode::Index),
            AnyGraph::Tree(t) => t.resolve(id).map(AnyNode::Addr),
        }
    }

    fn seeds(&self) -> Vec<AnyNode> {
        match self {
            AnyGraph::Finite(g) => g.seeds().into_iter().map(AnyNode::Index).collect(),
            AnyGraph::Tree(t) => t.seeds().into_iter().map(AnyNode::Addr).collect(),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            AnyGraph::Finite(g) => g.is_finite(),
            AnyGraph::Tree(t) => t.is_finite(),
        }
    }

    fn port_bound(&self) -> Option<Port> {
        match self {
            AnyGraph::Finite(g) => g.port_bound(),
            AnyGraph::Tree(t) => t.port_bound(),
        }
    }
}
