//! Finite posets of distinguished primes, stored by their cover relations.
//!
//! Nodes are either named (a variable-generated prime with a tower level, or
//! a class of primes identified by a gluing) or anonymous filler on a
//! saturated chain. Exports order nodes and edges deterministically so that
//! identical posets serialize to identical bytes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::vars::VarPrime;

pub type NodeId = usize;

/// Default guard on exhaustive chain enumeration.
pub const DEFAULT_CHAIN_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeRole {
    Minimal,
    Glued,
    AllAdjoined,
    Designated,
    Maximal,
    Anonymous,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeLabel {
    Anonymous,
    /// A named prime together with the tower level it belongs to: level 0 is
    /// the outermost ring, each embedded base shape adds one.
    Prime { prime: VarPrime, level: usize },
    /// A class of primes identified by a gluing step.
    Class { members: Vec<VarPrime>, level: usize },
}

impl NodeLabel {
    pub fn render(&self) -> Option<String> {
        match self {
            NodeLabel::Anonymous => None,
            NodeLabel::Prime { prime, .. } => Some(prime.to_string()),
            NodeLabel::Class { members, .. } => {
                let parts: Vec<String> = members.iter().map(|p| p.to_string()).collect();
                Some(parts.join("~"))
            }
        }
    }

    pub fn level(&self) -> Option<usize> {
        match self {
            NodeLabel::Anonymous => None,
            NodeLabel::Prime { level, .. } | NodeLabel::Class { level, .. } => Some(*level),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetNode {
    pub label: NodeLabel,
    pub role: NodeRole,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PosetError {
    #[error("cover relation contains a cycle")]
    Cycle,
    #[error("cover {lower} -> {upper} is implied by a longer chain; the relation is not reduced")]
    NotReduced { lower: NodeId, upper: NodeId },
    #[error("expected exactly one maximal node, found {0}")]
    MaximalNotUnique(usize),
    #[error("node {0} out of range")]
    UnknownNode(NodeId),
    #[error(
        "chain enumeration exceeded the cap of {cap} chains; raise it with --chain-cap if this is intended"
    )]
    ChainCapExceeded { cap: usize },
}

/// Outcome of a catenarity scan.
#[derive(Clone, Debug, Serialize)]
pub struct CatenaryVerdict {
    pub catenary: bool,
    pub witness: Option<NonCatenaryWitness>,
}

/// A comparable pair joined by saturated chains of two different lengths.
#[derive(Clone, Debug, Serialize)]
pub struct NonCatenaryWitness {
    pub lower: NodeId,
    pub upper: NodeId,
    pub lower_label: Option<String>,
    pub upper_label: Option<String>,
    pub shorter: usize,
    pub longer: usize,
}

/// A finite poset with exactly one maximal node, stored as a transitively
/// reduced cover relation. Edges are `(lower, upper)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecPoset {
    nodes: Vec<PosetNode>,
    covers: BTreeSet<(NodeId, NodeId)>,
}

/// Transitive reduction of the strict order generated by `edges` on
/// `0..n`. For an acyclic relation the reduction is unique and contained
/// in the generating edges, so this only discards implied ones.
fn reduce_relation(
    n: usize,
    edges: &BTreeSet<(NodeId, NodeId)>,
) -> Result<BTreeSet<(NodeId, NodeId)>, PosetError> {
    let mut lt = vec![vec![false; n]; n];
    for &(l, u) in edges {
        lt[l][u] = true;
    }
    for k in 0..n {
        for a in 0..n {
            if !lt[a][k] {
                continue;
            }
            for b in 0..n {
                if lt[k][b] {
                    lt[a][b] = true;
                }
            }
        }
    }
    if (0..n).any(|a| lt[a][a]) {
        return Err(PosetError::Cycle);
    }
    Ok(edges
        .iter()
        .copied()
        .filter(|&(l, u)| !(0..n).any(|c| lt[l][c] && lt[c][u]))
        .collect())
}

impl SpecPoset {
    pub fn new() -> SpecPoset {
        SpecPoset::default()
    }

    pub fn from_parts(
        nodes: Vec<PosetNode>,
        covers: BTreeSet<(NodeId, NodeId)>,
    ) -> Result<SpecPoset, PosetError> {
        let poset = SpecPoset { nodes, covers };
        poset.validate()?;
        Ok(poset)
    }

    pub fn add_node(&mut self, label: NodeLabel, role: NodeRole) -> NodeId {
        self.nodes.push(PosetNode { label, role });
        self.nodes.len() - 1
    }

    pub fn add_cover(&mut self, lower: NodeId, upper: NodeId) {
        assert!(lower < self.nodes.len() && upper < self.nodes.len(), "cover out of range");
        assert_ne!(lower, upper, "cover must join distinct nodes");
        self.covers.insert((lower, upper));
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn cover_count(&self) -> usize {
        self.covers.len()
    }

    pub fn node(&self, id: NodeId) -> &PosetNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &PosetNode)> {
        self.nodes.iter().enumerate()
    }

    pub fn covers(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.covers.iter().copied()
    }

    pub fn upper_covers(&self, id: NodeId) -> Vec<NodeId> {
        self.covers.iter().filter(|(l, _)| *l == id).map(|(_, u)| *u).collect()
    }

    pub fn lower_covers(&self, id: NodeId) -> Vec<NodeId> {
        self.covers.iter().filter(|(_, u)| *u == id).map(|(l, _)| *l).collect()
    }

    pub fn maximal_nodes(&self) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|n| self.upper_covers(*n).is_empty()).collect()
    }

    pub fn minimal_nodes(&self) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|n| self.lower_covers(*n).is_empty()).collect()
    }

    pub fn maximal_node(&self) -> Result<NodeId, PosetError> {
        let maxes = self.maximal_nodes();
        if maxes.len() == 1 {
            Ok(maxes[0])
        } else {
            Err(PosetError::MaximalNotUnique(maxes.len()))
        }
    }

    /// True when every node except the maximum has exactly one upper cover.
    pub fn is_tree(&self) -> bool {
        match self.maximal_node() {
            Err(_) => false,
            Ok(max) => (0..self.nodes.len())
                .all(|n| n == max || self.upper_covers(n).len() == 1),
        }
    }

    /// Reflexive reachability matrix: `closure[a][b]` iff `a <= b`.
    pub fn closure(&self) -> Vec<Vec<bool>> {
        let n = self.nodes.len();
        let mut le = vec![vec![false; n]; n];
        for a in 0..n {
            let mut queue = VecDeque::from([a]);
            while let Some(x) = queue.pop_front() {
                if le[a][x] {
                    continue;
                }
                le[a][x] = true;
                for u in self.upper_covers(x) {
                    queue.push_back(u);
                }
            }
        }
        le
    }

    pub fn le(&self, a: NodeId, b: NodeId) -> bool {
        if a == b {
            return true;
        }
        let mut queue = VecDeque::from([a]);
        let mut seen = vec![false; self.nodes.len()];
        while let Some(x) = queue.pop_front() {
            if x == b {
                return true;
            }
            if seen[x] {
                continue;
            }
            seen[x] = true;
            for u in self.upper_covers(x) {
                queue.push_back(u);
            }
        }
        false
    }

    fn topo_order(&self) -> Result<Vec<NodeId>, PosetError> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        for (_, u) in &self.covers {
            indeg[*u] += 1;
        }
        let mut queue: VecDeque<NodeId> =
            (0..n).filter(|i| indeg[*i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for u in self.upper_covers(x) {
                indeg[u] -= 1;
                if indeg[u] == 0 {
                    queue.push_back(u);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(PosetError::Cycle)
        }
    }

    /// Check the structural invariants: acyclic, transitively reduced,
    /// exactly one maximal node.
    pub fn validate(&self) -> Result<(), PosetError> {
        for (l, u) in &self.covers {
            if *l >= self.nodes.len() || *u >= self.nodes.len() {
                return Err(PosetError::UnknownNode((*l).max(*u)));
            }
        }
        self.topo_order()?;
        // A cover is redundant exactly when a path of length >= 2 joins its
        // endpoints.
        for (l, u) in &self.covers {
            let two_step = self
                .upper_covers(*l)
                .into_iter()
                .filter(|m| m != u)
                .any(|m| self.le(m, *u));
            if two_step {
                return Err(PosetError::NotReduced { lower: *l, upper: *u });
            }
        }
        self.maximal_node()?;
        Ok(())
    }

    /// All saturated chains from `a` to `b`, as node paths along covers.
    /// Exhaustive; errors out beyond `cap` chains.
    pub fn saturated_chains_between(
        &self,
        a: NodeId,
        b: NodeId,
        cap: usize,
    ) -> Result<Vec<Vec<NodeId>>, PosetError> {
        if a >= self.nodes.len() || b >= self.nodes.len() {
            return Err(PosetError::UnknownNode(a.max(b)));
        }
        let mut chains = Vec::new();
        let mut stack = vec![vec![a]];
        while let Some(path) = stack.pop() {
            let last = *path.last().expect("path is nonempty");
            if last == b {
                if chains.len() >= cap {
                    return Err(PosetError::ChainCapExceeded { cap });
                }
                chains.push(path);
                continue;
            }
            for u in self.upper_covers(last) {
                if self.le(u, b) {
                    let mut next = path.clone();
                    next.push(u);
                    stack.push(next);
                }
            }
        }
        chains.sort();
        Ok(chains)
    }

    /// Sorted multiset of saturated chain lengths from `a` to `b`.
    pub fn saturated_chain_lengths(
        &self,
        a: NodeId,
        b: NodeId,
        cap: usize,
    ) -> Result<Vec<usize>, PosetError> {
        let mut lengths: Vec<usize> = self
            .saturated_chains_between(a, b, cap)?
            .iter()
            .map(|c| c.len() - 1)
            .collect();
        lengths.sort_unstable();
        Ok(lengths)
    }

    /// Scan every comparable pair for saturated chains of two different
    /// lengths. The witness is the first offending pair in node order.
    pub fn is_catenary(&self, cap: usize) -> Result<CatenaryVerdict, PosetError> {
        let le = self.closure();
        for a in 0..self.nodes.len() {
            for b in 0..self.nodes.len() {
                if a == b || !le[a][b] {
                    continue;
                }
                let lengths = self.saturated_chain_lengths(a, b, cap)?;
                let shortest = *lengths.first().expect("comparable pair has a chain");
                let longest = *lengths.last().expect("comparable pair has a chain");
                if shortest != longest {
                    return Ok(CatenaryVerdict {
                        catenary: false,
                        witness: Some(NonCatenaryWitness {
                            lower: a,
                            upper: b,
                            lower_label: self.nodes[a].label.render(),
                            upper_label: self.nodes[b].label.render(),
                            shorter: shortest,
                            longer: longest,
                        }),
                    });
                }
            }
        }
        Ok(CatenaryVerdict { catenary: true, witness: None })
    }

    /// First node carrying the given prime at the given level.
    pub fn find_prime_node(&self, prime: &VarPrime, level: usize) -> Option<NodeId> {
        self.nodes.iter().position(|n| match &n.label {
            NodeLabel::Prime { prime: p, level: l } => p == prime && *l == level,
            _ => false,
        })
    }

    pub fn nodes_with_role(&self, role: NodeRole) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|n| self.nodes[*n].role == role).collect()
    }

    /// Rebuild after a surgery: `class_of` sends each old node to the
    /// representative it merges into (itself when unmerged), `relabel`
    /// overrides labels of representatives. Ids are compacted in old order.
    /// Covers a merge turns transitive are dropped, so the result is the
    /// reduced relation of the quotient order.
    pub(crate) fn quotient(
        &self,
        class_of: &BTreeMap<NodeId, NodeId>,
        relabel: &BTreeMap<NodeId, PosetNode>,
    ) -> Result<SpecPoset, PosetError> {
        let rep = |n: NodeId| *class_of.get(&n).unwrap_or(&n);
        let survivors: Vec<NodeId> =
            (0..self.nodes.len()).filter(|n| rep(*n) == *n).collect();
        let new_id: BTreeMap<NodeId, NodeId> =
            survivors.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let nodes: Vec<PosetNode> = survivors
            .iter()
            .map(|n| relabel.get(n).cloned().unwrap_or_else(|| self.nodes[*n].clone()))
            .collect();
        let edges: BTreeSet<(NodeId, NodeId)> = self
            .covers
            .iter()
            .map(|(l, u)| (new_id[&rep(*l)], new_id[&rep(*u)]))
            .filter(|(l, u)| l != u)
            .collect();
        let covers = reduce_relation(nodes.len(), &edges)?;
        SpecPoset::from_parts(nodes, covers)
    }

    /// Deterministic DOT rendering, drawn upward like a hand-drawn Hasse
    /// diagram: named nodes are labeled circles, anonymous nodes filled
    /// points.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph spec_poset {\n  rankdir=BT;\n  edge [arrowhead=none];\n");
        for (id, node) in self.nodes() {
            match node.label.render() {
                Some(label) => {
                    let _ = writeln!(
                        out,
                        "  n{id} [shape=circle, style=filled, fillcolor=white, label=\"{label}\"];"
                    );
                }
                None => {
                    let _ = writeln!(out, "  n{id} [shape=point];");
                }
            }
        }
        for (l, u) in &self.covers {
            let _ = writeln!(out, "  n{l} -> n{u};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = self
            .nodes()
            .map(|(id, node)| {
                json!({
                    "id": id,
                    "label": node.label.render(),
                    "role": node.role,
                    "level": node.label.level(),
                })
            })
            .collect();
        let covers: Vec<serde_json::Value> =
            self.covers.iter().map(|(l, u)| json!([l, u])).collect();
        json!({ "nodes": nodes, "covers": covers })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value())
            .expect("poset json never fails to serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anon_poset(n: usize, covers: &[(usize, usize)]) -> SpecPoset {
        let nodes = (0..n)
            .map(|_| PosetNode { label: NodeLabel::Anonymous, role: NodeRole::Anonymous })
            .collect();
        SpecPoset::from_parts(nodes, covers.iter().copied().collect()).unwrap()
    }

    #[test]
    fn validate_rejects_cycles() {
        let nodes = vec![
            PosetNode { label: NodeLabel::Anonymous, role: NodeRole::Anonymous },
            PosetNode { label: NodeLabel::Anonymous, role: NodeRole::Anonymous },
        ];
        let covers = [(0, 1), (1, 0)].into_iter().collect();
        assert_eq!(SpecPoset::from_parts(nodes, covers), Err(PosetError::Cycle));
    }

    #[test]
    fn validate_rejects_transitive_edges() {
        let nodes = (0..3)
            .map(|_| PosetNode { label: NodeLabel::Anonymous, role: NodeRole::Anonymous })
            .collect();
        let covers = [(0, 1), (1, 2), (0, 2)].into_iter().collect();
        assert_eq!(
            SpecPoset::from_parts(nodes, covers),
            Err(PosetError::NotReduced { lower: 0, upper: 2 })
        );
    }

    #[test]
    fn validate_requires_unique_maximum() {
        let nodes = (0..3)
            .map(|_| PosetNode { label: NodeLabel::Anonymous, role: NodeRole::Anonymous })
            .collect();
        let covers = [(0, 1), (0, 2)].into_iter().collect();
        assert_eq!(
            SpecPoset::from_parts(nodes, covers),
            Err(PosetError::MaximalNotUnique(2))
        );
    }

    #[test]
    fn diamond_chain_lengths() {
        // 0 -> 1 -> 2 -> 4 and 0 -> 3 -> 4.
        let p = anon_poset(5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]);
        assert_eq!(p.saturated_chain_lengths(0, 4, 100).unwrap(), vec![2, 3]);
        let verdict = p.is_catenary(100).unwrap();
        assert!(!verdict.catenary);
        let w = verdict.witness.unwrap();
        assert_eq!((w.lower, w.upper), (0, 4));
        assert_eq!((w.shorter, w.longer), (2, 3));
    }

    #[test]
    fn chain_poset_is_catenary_tree() {
        let p = anon_poset(3, &[(0, 1), (1, 2)]);
        assert!(p.is_catenary(100).unwrap().catenary);
        assert!(p.is_tree());
    }

    #[test]
    fn chain_cap_is_enforced() {
        // Two stacked diamonds give four maximal chains; cap at three.
        let p = anon_poset(
            7,
            &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6)],
        );
        assert_eq!(
            p.saturated_chains_between(0, 6, 3),
            Err(PosetError::ChainCapExceeded { cap: 3 })
        );
        assert_eq!(p.saturated_chain_lengths(0, 6, 10).unwrap(), vec![4, 4, 4, 4]);
    }

    #[test]
    fn dot_output_is_stable_and_marks_anonymous_nodes() {
        let p = anon_poset(2, &[(0, 1)]);
        let dot = p.to_dot();
        assert!(dot.contains("n0 [shape=point];"));
        assert!(dot.contains("n0 -> n1;"));
        assert_eq!(dot, p.to_dot());
    }
}
