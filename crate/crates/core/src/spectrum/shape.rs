//! Shape builders: the finite distinguished spectrum of a tower ring,
//! before and after gluing.
//!
//! `canonical_shape` renders the spectrum of `base[[vars]] / (q1 ∩ ... ∩ qm)`:
//! one node `g` for the prime generated by all adjoined variables, a copy of
//! the base shape above it (the minimum of the base shape is identified with
//! `g`; over a field there is nothing above), and below it one disjoint
//! anonymous chain per family member `q` of length `|vars| - |q|` ending in
//! the named minimal node `q`.
//!
//! `preglue_shape` renders the neighborhood of two incomparable designated
//! primes before gluing: each is joined up to `g` by its own anonymous chain
//! and down to the named minimal primes below it, with minimal primes shared
//! by both designated primes drawn once.

use std::collections::BTreeMap;

use crate::ring::{BaseDomain, RingError, TowerRing};
use crate::vars::VarPrime;

use super::poset::{NodeId, NodeLabel, NodeRole, PosetError, PosetNode, SpecPoset};

fn bump_level(label: &NodeLabel) -> NodeLabel {
    match label {
        NodeLabel::Anonymous => NodeLabel::Anonymous,
        NodeLabel::Prime { prime, level } => {
            NodeLabel::Prime { prime: prime.clone(), level: level + 1 }
        }
        NodeLabel::Class { members, level } => {
            NodeLabel::Class { members: members.clone(), level: level + 1 }
        }
    }
}

/// Copy the base shape above `attach`, identifying the base minimum with
/// `attach` and bumping every named level by one. Over a field the base
/// shape is a single point and nothing is added.
fn attach_base_above(p: &mut SpecPoset, base: &BaseDomain, attach: NodeId) {
    let shape = &base.spec_shape;
    let mins = shape.minimal_nodes();
    debug_assert_eq!(mins.len(), 1, "base shape has a unique minimal node");
    let bmin = mins[0];
    let mut map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    map.insert(bmin, attach);
    for (id, node) in shape.nodes() {
        if id == bmin {
            continue;
        }
        let nid = p.add_node(bump_level(&node.label), node.role);
        map.insert(id, nid);
    }
    for (l, u) in shape.covers() {
        p.add_cover(map[&l], map[&u]);
    }
}

/// Interior of a downward chain of length `len >= 1` starting at `top`:
/// adds `len - 1` anonymous nodes and returns the one the terminal must
/// attach to (which is `top` itself for `len == 1`).
fn chain_interior_down(p: &mut SpecPoset, top: NodeId, len: usize) -> NodeId {
    debug_assert!(len >= 1);
    let mut upper = top;
    for _ in 1..len {
        let a = p.add_node(NodeLabel::Anonymous, NodeRole::Anonymous);
        p.add_cover(a, upper);
        upper = a;
    }
    upper
}

/// Attach a downward chain of the given length from `top` to a fresh named
/// terminal node. A chain of length zero names `top` itself.
fn attach_chain_below(
    p: &mut SpecPoset,
    top: NodeId,
    prime: &VarPrime,
    len: usize,
    role: NodeRole,
) -> NodeId {
    if len == 0 {
        return top;
    }
    let hook = chain_interior_down(p, top, len);
    let t = p.add_node(NodeLabel::Prime { prime: prime.clone(), level: 0 }, role);
    p.add_cover(t, hook);
    t
}

/// The distinguished spectrum of a tower ring.
///
/// Node count is `|shape(base)| + sum(|vars| - |q|)` over the family, and
/// the cover count is `covers(shape(base))` plus the same sum.
pub fn canonical_shape(ring: &TowerRing) -> SpecPoset {
    let mut p = SpecPoset::new();
    let g = p.add_node(
        NodeLabel::Prime { prime: ring.all_vars_prime(), level: 0 },
        NodeRole::AllAdjoined,
    );
    attach_base_above(&mut p, ring.base(), g);
    for q in ring.family().iter() {
        attach_chain_below(&mut p, g, q, ring.vars().len() - q.len(), NodeRole::Minimal);
    }
    debug_assert_eq!(p.validate(), Ok(()));
    p
}

/// The spectrum neighborhood of two designated primes before gluing.
pub fn preglue_shape(
    ring: &TowerRing,
    q1: &VarPrime,
    q2: &VarPrime,
) -> Result<SpecPoset, RingError> {
    ring.check_prime(q1)?;
    ring.check_prime(q2)?;
    if q1.is_subset_of(q2) || q2.is_subset_of(q1) {
        return Err(RingError::ComparablePrimes(q1.clone(), q2.clone()));
    }

    let mut p = SpecPoset::new();
    let g = p.add_node(
        NodeLabel::Prime { prime: ring.all_vars_prime(), level: 0 },
        NodeRole::AllAdjoined,
    );
    attach_base_above(&mut p, ring.base(), g);

    let mut placed_minimals: BTreeMap<VarPrime, NodeId> = BTreeMap::new();
    for q in [q1, q2] {
        let up_len = ring.vars().len() - q.len();
        let nq = attach_chain_below(&mut p, g, q, up_len, NodeRole::Designated);
        for pm in ring.min_primes_below(q)? {
            let len = q.len() - pm.len();
            if len == 0 {
                placed_minimals.insert(pm, nq);
                continue;
            }
            match placed_minimals.get(&pm) {
                Some(&shared) => {
                    // Second designated prime over the same minimal: new
                    // chain, shared terminal node.
                    let hook = chain_interior_down(&mut p, nq, len);
                    p.add_cover(shared, hook);
                }
                None => {
                    let t = attach_chain_below(&mut p, nq, &pm, len, NodeRole::Minimal);
                    placed_minimals.insert(pm, t);
                }
            }
        }
    }
    debug_assert_eq!(p.validate(), Ok(()));
    Ok(p)
}

/// Merge the given classes of minimal nodes, one merged node per class.
/// Singleton classes keep their node untouched; a merged node is labeled
/// with the class members and tagged as glued.
pub fn merge_minimal_nodes(
    shape: &SpecPoset,
    classes: &[Vec<NodeId>],
) -> Result<SpecPoset, PosetError> {
    let mut class_of: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut relabel: BTreeMap<NodeId, PosetNode> = BTreeMap::new();
    for class in classes {
        if class.len() <= 1 {
            continue;
        }
        let rep = *class.iter().min().expect("class is nonempty");
        let mut members: Vec<VarPrime> = Vec::new();
        let mut level = usize::MAX;
        for &n in class {
            if n != rep {
                class_of.insert(n, rep);
            }
            match &shape.node(n).label {
                NodeLabel::Prime { prime, level: l } => {
                    members.push(prime.clone());
                    level = level.min(*l);
                }
                NodeLabel::Class { members: ms, level: l } => {
                    members.extend(ms.iter().cloned());
                    level = level.min(*l);
                }
                NodeLabel::Anonymous => {}
            }
        }
        members.sort();
        members.dedup();
        let level = if level == usize::MAX { 0 } else { level };
        relabel.insert(
            rep,
            PosetNode { label: NodeLabel::Class { members, level }, role: NodeRole::Glued },
        );
    }
    shape.quotient(&class_of, &relabel)
}
