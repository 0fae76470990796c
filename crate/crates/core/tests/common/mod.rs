//! Reference computations for tests. None of these use the library's type
//! streams, path orders or oracles; they only read the graph through
//! `degree` and `neighbor`.
#![allow(dead_code)]

use std::collections::HashSet;

use portwalk::graph::{builtin, FiniteGraph};
use portwalk::{AnyGraph, Degree, PortGraph};

/// `d 2^d m^d` in machine integers.
pub fn val(m: u64, d: u64) -> u128 {
    d as u128 * (1u128 << d) * (m as u128).pow(d as u32)
}

pub fn degree(g: &FiniteGraph, v: usize) -> u64 {
    match g.degree(&v) {
        Degree::Finite(d) => d,
        Degree::CountablyInfinite => unreachable!("finite graph"),
    }
}

/// Character `(m, d)` and weight of `(u, v)` by layered reachability: for
/// every type, track (node, max-port-used) states over exactly `d` steps.
pub fn dp_character(g: &FiniteGraph, u: usize, v: usize) -> Option<((u64, u64), u128)> {
    let top = g.max_degree();
    let mut best: Option<((u64, u64), u128)> = None;
    for d in 1..=60u64 {
        if best.is_some_and(|(_, w)| val(1, d) > w) {
            break;
        }
        for m in 1..=top {
            let w = val(m, d);
            if best.is_some_and(|(t, b)| (w, (m, d)) >= (b, t)) {
                continue;
            }
            let mut states: HashSet<(usize, bool)> = HashSet::from([(u, false)]);
            for _ in 0..d {
                let mut next = HashSet::new();
                for &(x, used) in &states {
                    for p in 1..=degree(g, x).min(m) {
                        let (y, _) = g.neighbor(&x, p).unwrap();
                        next.insert((y, used || p == m));
                    }
                }
                states = next;
            }
            if states.contains(&(v, true)) {
                best = Some(((m, d), w));
            }
        }
    }
    best
}

/// Every port sequence over `1..=p_max` of length at most `d_max`, sorted by
/// (value, max port, length, sequence), truncated to the prefix that no
/// longer or larger-port sequence could enter.
pub fn brute_order(p_max: u64, d_max: u64, min_port: u64) -> Vec<Vec<u64>> {
    let mut all = Vec::new();
    let mut layer: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..d_max {
        layer = layer
            .iter()
            .flat_map(|s| (1..=p_max).map(move |p| [s.clone(), vec![p]].concat()))
            .collect();
        all.extend(layer.iter().cloned());
    }
    let key = |s: &Vec<u64>| {
        let m = *s.iter().max().unwrap();
        (val(m, s.len() as u64), m, s.len(), s.clone())
    };
    all.retain(|s| *s.iter().max().unwrap() >= min_port);
    all.sort_by_key(key);
    let horizon = val(p_max + 1, 1).min(val(min_port, d_max + 1));
    all.retain(|s| key(s).0 < horizon);
    all
}

/// Lexicographically least shortest port sequence from `u` to `v`, by
/// trying every sequence of each length in turn.
pub fn brute_bp(g: &FiniteGraph, u: usize, v: usize) -> Vec<u64> {
    let top = g.max_degree();
    for d in 1..=g.node_count() {
        let mut seq = vec![1u64; d];
        loop {
            if walk(g, u, &seq) == Some(v) {
                return seq;
            }
            let Some(i) = seq.iter().rposition(|&p| p < top) else {
                break;
            };
            seq[i] += 1;
            seq[i + 1..].iter_mut().for_each(|p| *p = 1);
        }
    }
    unreachable!("connected graph")
}

pub fn walk(g: &FiniteGraph, mut at: usize, ports: &[u64]) -> Option<usize> {
    for &p in ports {
        if p > degree(g, at) {
            return None;
        }
        at = g.neighbor(&at, p).unwrap().0;
    }
    Some(at)
}

/// Bit block of a label: binary digits doubled, then `01`.
pub fn label_block(label: u64) -> Vec<u8> {
    let mut out = Vec::new();
    for c in format!("{label:b}").chars() {
        let b = u8::from(c == '1');
        out.extend([b, b]);
    }
    out.extend([0, 1]);
    out
}

/// Per-round actions of one agent: `Some(port)` moves, `None` waits.
/// Bits are expanded one at a time from the tape and the path order.
struct RefAgent {
    home: usize,
    at: usize,
    block: Vec<u8>,
    bit: u64,
    queue: std::collections::VecDeque<Option<u64>>,
}

impl RefAgent {
    fn new(home: usize, label: u64) -> Self {
        RefAgent {
            home,
            at: home,
            block: label_block(label),
            bit: 0,
            queue: Default::default(),
        }
    }

    /// False if the bit needs a path beyond the end of `order`.
    fn step(&mut self, g: &FiniteGraph, order: &[Vec<u64>]) -> bool {
        if self.queue.is_empty() {
            assert_eq!(self.at, self.home);
            self.bit += 1;
            let i = self.bit;
            let s = self.block.len() as u64;
            let rounds = 3 * i * i;
            let mut forward = Vec::new();
            let mut back = Vec::new();
            if self.block[((i - 1) % s) as usize] == 1 {
                let segment = ((i - 1) / s) as usize;
                let Some(path) = order.get(segment) else {
                    return false;
                };
                let mut x = self.home;
                for &p in path {
                    if p > degree(g, x) {
                        break;
                    }
                    let (y, q) = g.neighbor(&x, p).unwrap();
                    forward.push(p);
                    back.insert(0, q);
                    x = y;
                }
            }
            let waits = rounds - 2 * forward.len() as u64;
            self.queue.extend(forward.into_iter().map(Some));
            self.queue.extend((0..waits).map(|_| None));
            self.queue.extend(back.into_iter().map(Some));
        }
        if let Some(p) = self.queue.pop_front().unwrap() {
            self.at = g.neighbor(&self.at, p).unwrap().0;
        }
        true
    }
}

/// Outcome of the reference simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefOutcome {
    Met(u64),
    NoMeeting,
    /// The given path order was too short to continue.
    OrderExhausted,
}

/// Round-by-round two-agent simulation over the path list `order`.
pub fn reference_meeting(
    g: &FiniteGraph,
    (s1, l1): (usize, u64),
    (s2, l2): (usize, u64),
    delay: u64,
    max_rounds: u64,
    order: &[Vec<u64>],
) -> RefOutcome {
    let mut a = RefAgent::new(s1, l1);
    let mut b = RefAgent::new(s2, l2);
    for round in 1..=max_rounds {
        if !a.step(g, order) || (round > delay && !b.step(g, order)) {
            return RefOutcome::OrderExhausted;
        }
        if a.at == b.at {
            return RefOutcome::Met(round);
        }
    }
    RefOutcome::NoMeeting
}

pub fn finite(g: AnyGraph) -> FiniteGraph {
    g.as_finite().expect("finite graph").clone()
}

pub fn named(name: &str, params: &[u64]) -> FiniteGraph {
    finite(builtin(name, params).unwrap())
}

/// All ordered pairs of distinct nodes.
pub fn ordered_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect()
}

/// Copy a finite graph given through the trait into a `FiniteGraph` whose
/// node `i` is `nodes[i]`.
pub fn materialize<G: PortGraph>(g: &G) -> (FiniteGraph, Vec<G::Node>) {
    assert!(g.is_finite());
    let nodes = g.seeds();
    let index: std::collections::HashMap<G::Node, usize> = nodes
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, n)| (n, i))
        .collect();
    let mut spec = portwalk::graph::FiniteGraphSpec::default();
    for n in &nodes {
        spec.node(g.node_id(n).as_str());
    }
    for (i, n) in nodes.iter().enumerate() {
        let Degree::Finite(d) = g.degree(n) else {
            unreachable!()
        };
        for p in 1..=d {
            let (m, q) = g.neighbor(n, p).unwrap();
            if (i, p) <= (index[&m], q) {
                spec.edge(g.node_id(n).as_str(), p, g.node_id(&m).as_str(), q);
            }
        }
    }
    (portwalk::graph::build_finite(&spec).unwrap(), nodes)
}
