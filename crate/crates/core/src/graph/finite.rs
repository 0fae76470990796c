use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use super::{Degree, GraphError, NodeId, Port, PortGraph};

/// One undirected edge: port `port_a` at `a` joins port `port_b` at `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecord {
    pub a: String,
    pub port_a: Port,
    pub b: String,
    pub port_b: Port,
}

/// Textual description of a finite graph, before validation.
///
/// Line format: `node <name>`, `edge <a> <pa> <b> <pb>`, `#` comments.
/// Nodes first mentioned in an edge are declared implicitly.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteGraphSpec {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeRecord>,
}

impl FiniteGraphSpec {
    pub fn node(&mut self, name: &str) -> &mut Self {
        if !self.nodes.iter().any(|n| n == name) {
            self.nodes.push(name.to_string());
        }
        self
    }

    pub fn edge(&mut self, a: &str, port_a: Port, b: &str, port_b: Port) -> &mut Self {
        self.node(a).node(b);
        self.edges.push(EdgeRecord {
            a: a.into(),
            port_a,
            b: b.into(),
            port_b,
        });
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            writeln!(out, "node {n}").unwrap();
        }
        for e in &self.edges {
            writeln!(out, "edge {} {} {} {}", e.a, e.port_a, e.b, e.port_b).unwrap();
        }
        out
    }
}

impl FromStr for FiniteGraphSpec {
    type Err = GraphError;

    fn from_str(text: &str) -> Result<Self, GraphError> {
        let mut spec = FiniteGraphSpec::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| GraphError::Parse { line: line_no, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["node", name] => {
                    spec.node(name);
                }
                ["edge", a, pa, b, pb] => {
                    let pa = parse_port(pa).map_err(err)?;
                    let pb = parse_port(pb).map_err(err)?;
                    spec.edge(a, pa, b, pb);
                }
                ["node", ..] => return Err(err("expected `node <name>`".into())),
                ["edge", ..] => return Err(err("expected `edge <a> <port> <b> <port>`".into())),
                [kw, ..] => return Err(err(format!("unknown record `{kw}`"))),
                [] => unreachable!(),
            }
        }
        Ok(spec)
    }
}

fn parse_port(s: &str) -> Result<Port, String> {
    match s.parse::<Port>() {
        Ok(0) => Err("port numbers start at 1".into()),
        Ok(p) => Ok(p),
        Err(_) => Err(format!("`{s}` is not a port number")),
    }
}

/// A validated finite port-numbered multigraph.
#[derive(Clone, Debug)]
pub struct FiniteGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    // adj[v][p - 1] = (neighbor, entry port)
    adj: Vec<Vec<(usize, Port)>>,
}

/// Validate `spec` and build the graph.
pub fn build_finite(spec: &FiniteGraphSpec) -> Result<FiniteGraph, GraphError> {
    if spec.nodes.is_empty() {
        return Err(GraphError::InvalidPorts("graph has no nodes".into()));
    }
    let index: HashMap<String, usize> = spec
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i))
        .collect();
    let mut ports: Vec<BTreeMap<Port, (usize, Port)>> = vec![BTreeMap::new(); spec.nodes.len()];
    let lookup = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    };
    for e in &spec.edges {
        let (a, b) = (lookup(&e.a)?, lookup(&e.b)?);
        if a == b && e.port_a == e.port_b {
            return Err(GraphError::InvalidPorts(format!(
                "self-loop at `{}` must use two distinct ports",
                e.a
            )));
        }
        for (v, p, u, q) in [(a, e.port_a, b, e.port_b), (b, e.port_b, a, e.port_a)] {
            if ports[v].insert(p, (u, q)).is_some() {
                return Err(GraphError::InvalidPorts(format!(
                    "port {p} used twice at `{}`",
                    spec.nodes[v]
                )));
            }
        }
    }
    let mut adj = Vec::with_capacity(ports.len());
    for (v, map) in ports.into_iter().enumerate() {
        let deg = map.len() as Port;
        if let Some((&max, _)) = map.iter().next_back() {
            if max != deg {
                return Err(GraphError::InvalidPorts(format!(
                    "ports at `{}` are not exactly 1..{deg}",
                    spec.nodes[v]
                )));
            }
        }
        adj.push(map.into_values().collect::<Vec<_>>());
    }
    let g = FiniteGraph {
        names: spec.nodes.clone(),
        index,
        adj,
    };
    if let Some(unreached) = g.first_unreachable() {
        return Err(GraphError::Disconnected(
            g.names[unreached].clone(),
            g.names[0].clone(),
        ));
    }
    if g.adj[0].is_empty() {
        return Err(GraphError::InvalidPorts(format!(
            "node `{}` has no ports",
            g.names[0]
        )));
    }
    Ok(g)
}

impl FiniteGraph {
    /// Build from raw adjacency without validation. Intended for exercising
    /// [`super::validate`] on deliberately broken graphs.
    pub fn from_adjacency_unchecked(names: Vec<String>, adj: Vec<Vec<(usize, Port)>>) -> Self {
        assert_eq!(names.len(), adj.len());
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        FiniteGraph { names, index, adj }
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn max_degree(&self) -> Port {
        self.adj.iter().map(|a| a.len() as Port).max().unwrap_or(0)
    }

    /// Same graph with node `i` renamed to `names[i]` and stored at position
    /// `perm[i]`.
    pub fn relabeled(&self, names: &[String], perm: &[usize]) -> FiniteGraph {
        let n = self.names.len();
        assert!(names.len() == n && perm.len() == n);
        let mut new_names = vec![String::new(); n];
        let mut adj = vec![Vec::new(); n];
        for v in 0..n {
            new_names[perm[v]] = names[v].clone();
            adj[perm[v]] = self.adj[v].iter().map(|&(u, q)| (perm[u], q)).collect();
        }
        FiniteGraph::from_adjacency_unchecked(new_names, adj)
    }

    pub fn to_spec(&self) -> FiniteGraphSpec {
        let mut spec = FiniteGraphSpec {
            nodes: self.names.clone(),
            edges: Vec::new(),
        };
        for (v, ports) in self.adj.iter().enumerate() {
            for (i, &(u, q)) in ports.iter().enumerate() {
                let p = i as Port + 1;
                if (v, p) <= (u, q) {
                    spec.edges.push(EdgeRecord {
                        a: self.names[v].clone(),
                        port_a: p,
                        b: self.names[u].clone(),
                        port_b: q,
                    });
                }
            }
        }
        spec
    }

    fn first_unreachable(&self) -> Option<usize> {
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &(u, _) in &self.adj[v] {
                if u < seen.len() && !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen.iter().position(|s| !s)
    }
}

impl PortGraph for FiniteGraph {
    type Node = usize;

    fn degree(&self, v: &usize) -> Degree {
        Degree::Finite(self.adj[*v].len() as Port)
    }

    fn neighbor(&self, v: &usize, port: Port) -> Result<(usize, Port), GraphError> {
        port.checked_sub(1)
            .and_then(|i| self.adj[*v].get(i as usize))
            .copied()
            .ok_or_else(|| GraphError::NoSuchPort {
                node: self.node_id(v),
                port,
            })
    }

    fn node_id(&self, v: &usize) -> NodeId {
        NodeId(self.names[*v].clone())
    }

    fn resolve(&self, id: &str) -> Result<usize, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(id.to_string()))
    }

    fn seeds(&self) -> Vec<usize> {
        (0..self.names.len()).collect()
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn port_bound(&self) -> Option<Port> {
        Some(self.max_degree())
    }
}
