use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_finite, AnyGraph, FiniteGraph, FiniteGraphSpec, GraphError, Port, PortTree};

pub const BUILTIN_FAMILIES: &[&str] = &[
    "two_node",
    "ring",
    "complete",
    "random_tree",
    "random_graph",
    "tree_regular",
    "tree_omega",
    "truncated_tree_omega",
];

/// Builtin graph families.
///
/// | name | params | nodes |
/// |---|---|---|
/// | `two_node` | | `u`, `v` |
/// | `ring` | `n` | `v0..`; port 1 clockwise, port 2 counterclockwise |
/// | `complete` | `n` | `v0..`; port `p` at `vi` leads to the `p`-th other node |
/// | `random_tree` | `n, seed` | `v0..` |
/// | `random_graph` | `n, max_degree, seed` | `v0..` |
/// | `tree_regular` | `d` | `r`, `r.1`, `r.1.2`, ... |
/// | `tree_omega` | | as above, infinite degree |
/// | `truncated_tree_omega` | `depth, max_port` | as above |
pub fn builtin(name: &str, params: &[u64]) -> Result<AnyGraph, GraphError> {
    let arity = |n: usize| -> Result<(), GraphError> {
        if params.len() == n {
            Ok(())
        } else {
            Err(GraphError::BadParams(format!(
                "{name} takes {n} parameter(s), got {}",
                params.len()
            )))
        }
    };
    let g: AnyGraph = match name {
        "two_node" => {
            arity(0)?;
            let mut spec = FiniteGraphSpec::default();
            spec.edge("u", 1, "v", 1);
            build_finite(&spec)?.into()
        }
        "ring" => {
            arity(1)?;
            ring(params[0])?.into()
        }
        "complete" => {
            arity(1)?;
            complete(params[0])?.into()
        }
        "random_tree" => {
            arity(2)?;
            let n = usize::try_from(params[0]).map_err(|_| bad("tree too large"))?;
            random_tree(n, &mut ChaCha8Rng::seed_from_u64(params[1]))?.into()
        }
        "random_graph" => {
            arity(3)?;
            let n = usize::try_from(params[0]).map_err(|_| bad("graph too large"))?;
            random_port_graph(n, params[1], &mut ChaCha8Rng::seed_from_u64(params[2]))?.into()
        }
        "tree_regular" => {
            arity(1)?;
            PortTree::regular(params[0])?.into()
        }
        "tree_omega" => {
            arity(0)?;
            PortTree::omega().into()
        }
        "truncated_tree_omega" => {
            arity(2)?;
            PortTree::truncated_omega(params[0], params[1])?.into()
        }
        other => return Err(GraphError::UnknownFamily(other.to_string())),
    };
    Ok(g)
}

fn bad(msg: &str) -> GraphError {
    GraphError::BadParams(msg.to_string())
}

/// Resolve `name[:p1,p2,...]` to a builtin, or anything else to a graph file.
pub fn parse_graph_ref(reference: &str) -> Result<AnyGraph, GraphError> {
    let (name, params) = match reference.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (reference, None),
    };
    if BUILTIN_FAMILIES.contains(&name) {
        let params = match params {
            Some(p) => p
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u64>()
                        .map_err(|_| bad(&format!("`{s}` is not an integer")))
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        };
        return builtin(name, &params);
    }
    let path = Path::new(reference);
    if !path.exists() {
        return Err(GraphError::UnknownFamily(reference.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| GraphError::Io(e.to_string()))?;
    let spec: FiniteGraphSpec = text.parse()?;
    Ok(build_finite(&spec)?.into())
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

fn ring(n: u64) -> Result<FiniteGraph, GraphError> {
    if n == 0 {
        return Err(bad("ring needs at least one node"));
    }
    let names = names(n as usize);
    let mut spec = FiniteGraphSpec {
        nodes: names.clone(),
        edges: Vec::new(),
    };
    for i in 0..names.len() {
        let next = (i + 1) % names.len();
        spec.edge(&names[i], 1, &names[next], 2);
    }
    build_finite(&spec)
}

fn complete(n: u64) -> Result<FiniteGraph, GraphError> {
    if n < 2 {
        return Err(bad("complete graph needs at least two nodes"));
    }
    let names = names(n as usize);
    let mut spec = FiniteGraphSpec {
        nodes: names.clone(),
        edges: Vec::new(),
    };
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            spec.edge(&names[i], j as Port, &names[j], i as Port + 1);
        }
    }
    build_finite(&spec)
}

/// Random tree on `n` nodes with uniformly shuffled port numbers.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Result<FiniteGraph, GraphError> {
    if n < 2 {
        return Err(bad("random tree needs at least two nodes"));
    }
    let edges: Vec<(usize, usize)> = (1..n).map(|k| (rng.gen_range(0..k), k)).collect();
    assign_ports(n, &edges, rng)
}

/// Random connected multigraph (self-loops and parallel edges allowed) on `n`
/// nodes with every degree at most `max_degree`: a random spanning tree plus
/// up to `n` extra edges.
pub fn random_port_graph<R: Rng>(
    n: usize,
    max_degree: u64,
    rng: &mut R,
) -> Result<FiniteGraph, GraphError> {
    if n < 2 {
        return Err(bad("random graph needs at least two nodes"));
    }
    if max_degree < 2 && n > 2 || max_degree == 0 {
        return Err(bad("degree bound too small to connect the graph"));
    }
    let mut degree = vec![0u64; n];
    let mut edges = Vec::new();
    for k in 1..n {
        let open: Vec<usize> = (0..k).filter(|&v| degree[v] < max_degree).collect();
        let parent = *open.choose(rng).expect("a path is always buildable");
        degree[parent] += 1;
        degree[k] += 1;
        edges.push((parent, k));
    }
    for _ in 0..rng.gen_range(0..=n) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let fits = if a == b {
            degree[a] + 2 <= max_degree
        } else {
            degree[a] < max_degree && degree[b] < max_degree
        };
        if fits {
            degree[a] += 1;
            degree[b] += 1;
            edges.push((a, b));
        }
    }
    assign_ports(n, &edges, rng)
}

fn assign_ports<R: Rng>(
    n: usize,
    edges: &[(usize, usize)],
    rng: &mut R,
) -> Result<FiniteGraph, GraphError> {
    // endpoints[v] = list of (edge, side); a shuffled position becomes the port
    let mut endpoints: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in edges.iter().enumerate() {
        endpoints[a].push((e, 0));
        endpoints[b].push((e, 1));
    }
    let mut port_of = vec![[0 as Port; 2]; edges.len()];
    for ends in &mut endpoints {
        ends.shuffle(rng);
        for (i, &(e, side)) in ends.iter().enumerate() {
            port_of[e][side] = i as Port + 1;
        }
    }
    let names = names(n);
    let mut spec = FiniteGraphSpec {
        nodes: names.clone(),
        edges: Vec::new(),
    };
    for (e, &(a, b)) in edges.iter().enumerate() {
        spec.edge(&names[a], port_of[e][0], &names[b], port_of[e][1]);
    }
    build_finite(&spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{validate, NodeId, PortGraph, SampleBudget};

    #[test]
    fn two_node_matches_hand_description() {
        let g = builtin("two_node", &[]).unwrap();
        let hand = build_finite(&"edge u 1 v 1".parse().unwrap()).unwrap();
        for v in ["u", "v"] {
            assert_eq!(g.neighbor_of(v, 1), hand.neighbor_of(v, 1));
            assert_eq!(g.degree_of(v), hand.degree_of(v));
        }
    }

    #[test]
    fn ring_walk_returns_home() {
        let g = builtin("ring", &[4]).unwrap();
        for start in ["v0", "v1", "v2", "v3"] {
            let mut at = NodeId::from(start);
            for _ in 0..4 {
                at = g.neighbor_of(at.as_str(), 1).unwrap().0;
            }
            assert_eq!(at.as_str(), start);
        }
        assert_eq!(g.neighbor_of("v0", 1).unwrap(), (NodeId::from("v1"), 2));
        assert_eq!(g.neighbor_of("v0", 2).unwrap(), (NodeId::from("v3"), 1));
    }

    #[test]
    fn small_rings_degenerate_to_loops_and_multi_edges() {
        let g = builtin("ring", &[1]).unwrap();
        assert_eq!(g.neighbor_of("v0", 1).unwrap(), (NodeId::from("v0"), 2));
        let g = builtin("ring", &[2]).unwrap();
        assert_eq!(g.neighbor_of("v0", 2).unwrap(), (NodeId::from("v1"), 1));
    }

    #[test]
    fn complete_graph_ports() {
        let g = builtin("complete", &[4]).unwrap();
        assert_eq!(g.neighbor_of("v0", 1).unwrap(), (NodeId::from("v1"), 1));
        assert_eq!(g.neighbor_of("v2", 3).unwrap(), (NodeId::from("v3"), 3));
        assert_eq!(g.neighbor_of("v3", 1).unwrap(), (NodeId::from("v0"), 3));
        assert!(validate(&g, SampleBudget::default()).is_clean());
    }

    #[test]
    fn random_families_are_valid_and_seeded() {
        for seed in 0..20 {
            let a = builtin("random_graph", &[8, 6, seed]).unwrap();
            let b = builtin("random_graph", &[8, 6, seed]).unwrap();
            let af = a.as_finite().unwrap();
            assert!(af.max_degree() <= 6);
            assert_eq!(af.to_spec(), b.as_finite().unwrap().to_spec());
            assert!(validate(&a, SampleBudget::default()).is_clean());
            let t = builtin("random_tree", &[7, seed]).unwrap();
            assert_eq!(t.as_finite().unwrap().to_spec().edges.len(), 6);
        }
    }

    #[test]
    fn graph_refs() {
        assert!(matches!(
            parse_graph_ref("truncated_tree_omega:2,8"),
            Ok(AnyGraph::Tree(_))
        ));
        assert!(matches!(parse_graph_ref("ring:5"), Ok(AnyGraph::Finite(_))));
        assert!(matches!(
            parse_graph_ref("ring"),
            Err(GraphError::BadParams(_))
        ));
        assert!(matches!(
            parse_graph_ref("ring:x"),
            Err(GraphError::BadParams(_))
        ));
        assert!(matches!(
            parse_graph_ref("hypercube:3"),
            Err(GraphError::UnknownFamily(_))
        ));
        assert!(matches!(
            builtin("tree_omega", &[1]),
            Err(GraphError::BadParams(_))
        ));
    }
}
