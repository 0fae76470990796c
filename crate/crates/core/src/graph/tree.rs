use super::{Degree, GraphError, NodeId, Port, PortGraph};

/// Path of child indices from the root. The root is the empty address.
pub type TreeAddr = Vec<u64>;

/// Lazily generated rooted tree.
///
/// Port convention: at the root, port `j` leads to child `j`; at any other
/// node, port 1 leads to the parent and port `j >= 2` to child `j - 1`.
/// Children always enter through port 1. With `arity = None` every node has
/// countably infinite degree; with `arity = Some(k)` every internal node has
/// degree `k`. With `depth = Some(d)` nodes at depth `d` are leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortTree {
    arity: Option<u64>,
    depth: Option<u64>,
}

impl PortTree {
    /// The tree in which every node has countably infinite degree.
    pub fn omega() -> Self {
        PortTree {
            arity: None,
            depth: None,
        }
    }

    /// The infinite tree whose nodes all have degree `d`.
    pub fn regular(d: u64) -> Result<Self, GraphError> {
        if d == 0 {
            return Err(GraphError::BadParams(
                "tree_regular needs degree >= 1".into(),
            ));
        }
        Ok(PortTree {
            arity: Some(d),
            depth: None,
        })
    }

    /// `omega` cut to `depth` levels and ports `<= max_port`.
    pub fn truncated_omega(depth: u64, max_port: u64) -> Result<Self, GraphError> {
        if depth == 0 || max_port == 0 {
            return Err(GraphError::BadParams(
                "truncated_tree_omega needs depth >= 1 and max port >= 1".into(),
            ));
        }
        Ok(PortTree {
            arity: Some(max_port),
            depth: Some(depth),
        })
    }

    pub fn root(&self) -> TreeAddr {
        Vec::new()
    }

    fn is_leaf(&self, a: &[u64]) -> bool {
        self.depth.is_some_and(|d| a.len() as u64 >= d)
    }

    fn port_exists(&self, port: Port) -> bool {
        port >= 1 && self.arity.is_none_or(|k| port <= k)
    }

    /// Every node, in breadth-first order; `None` for infinite trees.
    pub fn all_nodes(&self) -> Option<Vec<TreeAddr>> {
        let (k, d) = (self.arity?, self.depth?);
        let mut out = vec![self.root()];
        let mut level = vec![self.root()];
        for depth in 0..d {
            let children = if depth == 0 { k } else { k - 1 };
            level = level
                .iter()
                .flat_map(|a| {
                    (1..=children).map(move |c| {
                        let mut b = a.clone();
                        b.push(c);
                        b
                    })
                })
                .collect();
            out.extend(level.iter().cloned());
        }
        Some(out)
    }
}

impl PortGraph for PortTree {
    type Node = TreeAddr;

    fn degree(&self, a: &TreeAddr) -> Degree {
        if !a.is_empty() && self.is_leaf(a) {
            return Degree::Finite(1);
        }
        match self.arity {
            Some(k) => Degree::Finite(k),
            None => Degree::CountablyInfinite,
        }
    }

    fn neighbor(&self, a: &TreeAddr, port: Port) -> Result<(TreeAddr, Port), GraphError> {
        let missing = || GraphError::NoSuchPort {
            node: self.node_id(a),
            port,
        };
        if a.is_empty() {
            if !self.port_exists(port) || self.is_leaf(a) {
                return Err(missing());
            }
            return Ok((vec![port], 1));
        }
        if port == 1 {
            let mut parent = a.clone();
            let last = parent.pop().expect("non-root address");
            let entry = if parent.is_empty() { last } else { last + 1 };
            return Ok((parent, entry));
        }
        if !self.port_exists(port) || self.is_leaf(a) {
            return Err(missing());
        }
        let mut child = a.clone();
        child.push(port - 1);
        Ok((child, 1))
    }

    fn node_id(&self, a: &TreeAddr) -> NodeId {
        let mut s = String::from("r");
        for c in a {
            s.push('.');
            s.push_str(&c.to_string());
        }
        NodeId(s)
    }

    fn resolve(&self, id: &str) -> Result<TreeAddr, GraphError> {
        let unknown = || GraphError::UnknownNode(id.to_string());
        let mut parts = id.split('.');
        if parts.next() != Some("r") {
            return Err(unknown());
        }
        let mut addr = Vec::new();
        for part in parts {
            let c: u64 = part.parse().map_err(|_| unknown())?;
            // Children of the root are reached by port c; deeper children by port c + 1.
            let port = if addr.is_empty() {
                c
            } else {
                c.checked_add(1).ok_or_else(unknown)?
            };
            if c == 0 || !self.port_exists(port) || self.is_leaf(&addr) {
                return Err(unknown());
            }
            addr.push(c);
        }
        Ok(addr)
    }

    fn seeds(&self) -> Vec<TreeAddr> {
        self.all_nodes().unwrap_or_else(|| vec![self.root()])
    }

    fn is_finite(&self) -> bool {
        self.arity.is_some() && self.depth.is_some()
    }

    fn port_bound(&self) -> Option<Port> {
        self.arity
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_root_port_leads_to_child_through_port_one() {
        let t = PortTree::omega();
        assert_eq!(t.neighbor_of("r", 5).unwrap(), (NodeId::from("r.5"), 1));
        assert_eq!(t.neighbor_of("r.5", 1).unwrap(), (NodeId::from("r"), 5));
        assert_eq!(t.neighbor_of("r.5", 3).unwrap(), (NodeId::from("r.5.2"), 1));
        assert_eq!(t.neighbor_of("r.5.2", 1).unwrap(), (NodeId::from("r.5"), 3));
        assert_eq!(t.degree_of("r.5.2").unwrap(), Degree::CountablyInfinite);
        assert_eq!(t.degree_of("r").unwrap(), Degree::CountablyInfinite);
        let huge = t.neighbor_of("r", 1 << 40).unwrap();
        assert_eq!(huge.1, 1);
    }

    #[test]
    fn omega_involution_on_first_hundred_ports() {
        let t = PortTree::omega();
        for start in [vec![], vec![3], vec![7, 2]] {
            for p in 1..=100 {
                let (u, q) = t.neighbor(&start, p).unwrap();
                assert_eq!(t.neighbor(&u, q).unwrap(), (start.clone(), p));
            }
        }
    }

    #[test]
    fn truncated_tree_degrees_and_size() {
        let t = PortTree::truncated_omega(2, 3).unwrap();
        assert_eq!(t.degree_of("r").unwrap(), Degree::Finite(3));
        assert_eq!(t.degree_of("r.3").unwrap(), Degree::Finite(3));
        assert_eq!(t.degree_of("r.3.2").unwrap(), Degree::Finite(1));
        assert!(t.resolve("r.3.3").is_err());
        assert!(t.resolve("r.4").is_err());
        assert!(t.resolve("r.1.1.1").is_err());
        assert!(t.neighbor_of("r.3.2", 2).is_err());
        assert_eq!(t.all_nodes().unwrap().len(), 1 + 3 + 3 * 2);
        assert!(t.is_finite());
        let t = PortTree::truncated_omega(2, 12).unwrap();
        assert_eq!(t.seeds().len(), 1 + 12 + 12 * 11);
    }

    #[test]
    fn regular_tree_has_fixed_degree() {
        let t = PortTree::regular(3).unwrap();
        assert_eq!(t.degree_of("r.1.2.2.1").unwrap(), Degree::Finite(3));
        assert!(t.neighbor_of("r.1", 4).is_err());
        assert_eq!(t.neighbor_of("r.1", 3).unwrap(), (NodeId::from("r.1.2"), 1));
        assert!(!t.is_finite());
        assert!(PortTree::regular(0).is_err());
    }

    #[test]
    fn resolve_rejects_garbage() {
        let t = PortTree::omega();
        for bad in ["", "x", "r.", "r.0", "r.a", "root", "r.1.-2"] {
            assert!(t.resolve(bad).is_err(), "{bad}");
        }
        assert_eq!(t.resolve("r.12.1").unwrap(), vec![12, 1]);
    }
}
