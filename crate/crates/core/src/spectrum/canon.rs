//! Canonical forms for spectrum posets, invariant under node renumbering.
//!
//! The canonical form is computed by iterated color refinement with
//! individualization on ties: colors start from node keys, are refined by
//! neighbor color multisets until stable, and remaining symmetric classes
//! are broken by branching on each member and keeping the lexicographically
//! least encoding. Two posets are isomorphic exactly when their canonical
//! strings agree. The labeled form keeps named-node labels, roles and
//! levels as part of the key; the structural form ignores them.

use std::collections::BTreeMap;

use super::poset::{NodeId, SpecPoset};

fn labeled_keys(p: &SpecPoset) -> Vec<String> {
    p.nodes()
        .map(|(_, n)| {
            format!(
                "{:?}|{}|{}",
                n.role,
                n.label.render().unwrap_or_default(),
                n.label.level().map(|l| l.to_string()).unwrap_or_default()
            )
        })
        .collect()
}

fn structural_keys(p: &SpecPoset) -> Vec<String> {
    vec![String::new(); p.node_count()]
}

/// One refinement round: new color = (old color, sorted multisets of
/// neighbor colors in each direction). Returns the rank vector; ranks are
/// comparable across posets because they are assigned by sorting the
/// underlying color values, which are graph independent.
fn refine(p: &SpecPoset, colors: &[usize]) -> Vec<usize> {
    let mut values: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::with_capacity(colors.len());
    for v in 0..colors.len() {
        let mut up: Vec<usize> = p.upper_covers(v).into_iter().map(|u| colors[u]).collect();
        let mut down: Vec<usize> = p.lower_covers(v).into_iter().map(|l| colors[l]).collect();
        up.sort_unstable();
        down.sort_unstable();
        values.push((colors[v], up, down));
    }
    rank(&values)
}

fn rank<T: Ord + Clone>(values: &[T]) -> Vec<usize> {
    let mut distinct: Vec<T> = values.to_vec();
    distinct.sort();
    distinct.dedup();
    let index: BTreeMap<&T, usize> =
        distinct.iter().enumerate().map(|(i, v)| (v, i)).collect();
    values.iter().map(|v| index[v]).collect()
}

fn refine_to_stable(p: &SpecPoset, mut colors: Vec<usize>) -> Vec<usize> {
    loop {
        let next = refine(p, &colors);
        let classes = |c: &[usize]| c.iter().copied().max().map_or(0, |m| m + 1);
        if classes(&next) == classes(&colors) {
            return next;
        }
        colors = next;
    }
}

fn encode(p: &SpecPoset, keys: &[String], colors: &[usize]) -> String {
    let n = p.node_count();
    let mut order: Vec<NodeId> = (0..n).collect();
    order.sort_by_key(|v| colors[*v]);
    let mut position = vec![0usize; n];
    for (i, v) in order.iter().enumerate() {
        position[*v] = i;
    }
    let node_part: Vec<&str> = order.iter().map(|v| keys[*v].as_str()).collect();
    let mut edges: Vec<(usize, usize)> =
        p.covers().map(|(l, u)| (position[l], position[u])).collect();
    edges.sort_unstable();
    let edge_part: Vec<String> =
        edges.iter().map(|(l, u)| format!("{l}>{u}")).collect();
    format!("n{n};{};{}", node_part.join("|"), edge_part.join(","))
}

fn is_discrete(colors: &[usize]) -> bool {
    colors.iter().copied().max().map_or(true, |m| m + 1 == colors.len())
}

fn search(p: &SpecPoset, keys: &[String], colors: Vec<usize>) -> String {
    let colors = refine_to_stable(p, colors);
    if is_discrete(&colors) {
        return encode(p, keys, &colors);
    }
    // Smallest tied color class, lowest rank on ties.
    let mut by_class: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for (v, c) in colors.iter().enumerate() {
        by_class.entry(*c).or_default().push(v);
    }
    let class = by_class
        .values()
        .filter(|m| m.len() > 1)
        .min_by_key(|m| (m.len(), colors[m[0]]))
        .expect("non-discrete coloring has a tied class")
        .clone();
    let fresh = colors.iter().copied().max().expect("nonempty poset") + 1;
    class
        .into_iter()
        .map(|v| {
            let mut branched = colors.clone();
            branched[v] = fresh;
            search(p, keys, branched)
        })
        .min()
        .expect("tied class is nonempty")
}

fn canon_with_keys(p: &SpecPoset, keys: Vec<String>) -> String {
    if p.node_count() == 0 {
        return "n0;;".into();
    }
    let colors = rank(&keys);
    search(p, &keys, colors)
}

/// Canonical encoding that keeps labels, roles and levels.
pub fn canonical_form(p: &SpecPoset) -> String {
    canon_with_keys(p, labeled_keys(p))
}

/// Canonical encoding of the bare cover digraph.
pub fn canonical_form_structural(p: &SpecPoset) -> String {
    canon_with_keys(p, structural_keys(p))
}

/// Label-respecting isomorphism.
pub fn isomorphic(a: &SpecPoset, b: &SpecPoset) -> bool {
    a.node_count() == b.node_count()
        && a.cover_count() == b.cover_count()
        && canonical_form(a) == canonical_form(b)
}

/// Shape-only isomorphism, used to compare against hand-drawn diagrams
/// that carry no labels.
pub fn isomorphic_structural(a: &SpecPoset, b: &SpecPoset) -> bool {
    a.node_count() == b.node_count()
        && a.cover_count() == b.cover_count()
        && canonical_form_structural(a) == canonical_form_structural(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::poset::{NodeLabel, NodeRole, PosetNode};
    use crate::vars::VarPrime;

    fn anon_poset(n: usize, covers: &[(usize, usize)]) -> SpecPoset {
        let nodes = (0..n)
            .map(|_| PosetNode { label: NodeLabel::Anonymous, role: NodeRole::Anonymous })
            .collect();
        SpecPoset::from_parts(nodes, covers.iter().copied().collect()).unwrap()
    }

    #[test]
    fn renumbering_does_not_change_the_canonical_form() {
        // The same diamond written with two different node orders.
        let a = anon_poset(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let b = anon_poset(4, &[(2, 0), (2, 1), (0, 3), (1, 3)]);
        assert_eq!(canonical_form(&a), canonical_form(&b));
        assert!(isomorphic(&a, &b));
    }

    #[test]
    fn chain_and_vee_are_not_isomorphic() {
        let chain = anon_poset(3, &[(0, 1), (1, 2)]);
        let vee = anon_poset(3, &[(0, 2), (1, 2)]);
        assert!(!isomorphic(&chain, &vee));
        assert!(!isomorphic_structural(&chain, &vee));
    }

    #[test]
    fn labels_matter_for_the_labeled_form_only() {
        let mut a = SpecPoset::new();
        let p = a.add_node(
            NodeLabel::Prime { prime: VarPrime::new(["x"]), level: 0 },
            NodeRole::Minimal,
        );
        let m = a.add_node(NodeLabel::Anonymous, NodeRole::Maximal);
        a.add_cover(p, m);

        let mut b = SpecPoset::new();
        let p2 = b.add_node(
            NodeLabel::Prime { prime: VarPrime::new(["y"]), level: 0 },
            NodeRole::Minimal,
        );
        let m2 = b.add_node(NodeLabel::Anonymous, NodeRole::Maximal);
        b.add_cover(p2, m2);

        assert!(!isomorphic(&a, &b));
        assert!(isomorphic_structural(&a, &b));
    }

    #[test]
    fn symmetric_branches_are_handled_by_individualization() {
        // Two interchangeable chains of equal length below a common top.
        let a = anon_poset(5, &[(0, 2), (1, 3), (2, 4), (3, 4)]);
        let b = anon_poset(5, &[(3, 2), (1, 0), (2, 4), (0, 4)]);
        assert!(isomorphic_structural(&a, &b));
    }
}
