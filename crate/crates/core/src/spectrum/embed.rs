//! Saturated-chain-preserving embeddings of finite posets into spectrum
//! shapes.
//!
//! A map between finite posets sends saturated chains to saturated chains
//! exactly when it is injective and sends cover relations to cover
//! relations, so the search below looks for an injection on nodes that
//! matches covers to covers. Strict mode additionally demands that the
//! image ordering reflects back: `f(a) <= f(b)` only when `a <= b`.

use std::collections::BTreeMap;

use thiserror::Error;

use super::poset::{NodeId, SpecPoset};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FinitePosetError {
    #[error("line {line}: expected `a < b`, found {found:?}")]
    Malformed { line: usize, found: String },
    #[error("relations contain a cycle through {0:?}")]
    Cycle(String),
}

/// An abstract finite poset given by named elements and relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePoset {
    names: Vec<String>,
    le: Vec<Vec<bool>>,
    covers: Vec<(usize, usize)>,
}

impl FinitePoset {
    /// Parse a relation list, one `a < b` per line. Blank lines and lines
    /// starting with `#` are skipped. Isolated elements cannot be written
    /// in this format; every element named must take part in a relation.
    pub fn parse(text: &str) -> Result<Self, FinitePosetError> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 3 || tokens[1] != "<" {
                return Err(FinitePosetError::Malformed {
                    line: idx + 1,
                    found: line.to_string(),
                });
            }
            pairs.push((tokens[0].to_string(), tokens[2].to_string()));
        }
        Self::from_relations(&pairs)
    }

    pub fn from_relations(pairs: &[(String, String)]) -> Result<Self, FinitePosetError> {
        let mut names: Vec<String> = pairs
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect();
        names.sort();
        names.dedup();
        let index: BTreeMap<&str, usize> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let n = names.len();

        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in pairs {
            le[index[a.as_str()]][index[b.as_str()]] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i][k] {
                    for j in 0..n {
                        if le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i][j] && le[j][i] {
                    return Err(FinitePosetError::Cycle(names[i].clone()));
                }
            }
        }

        let mut covers = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a == b || !le[a][b] {
                    continue;
                }
                let direct = !(0..n)
                    .any(|c| c != a && c != b && le[a][c] && le[c][b]);
                if direct {
                    covers.push((a, b));
                }
            }
        }
        Ok(FinitePoset { names, le, covers })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le[a][b]
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }
}

fn cover_adjacency(n: usize, covers: &[(usize, usize)]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut up = vec![Vec::new(); n];
    let mut down = vec![Vec::new(); n];
    for &(l, u) in covers {
        up[l].push(u);
        down[u].push(l);
    }
    (up, down)
}

/// Longest cover-path lengths going up and going down from each node.
fn reach_ranks(n: usize, up: &[Vec<usize>], down: &[Vec<usize>]) -> (Vec<usize>, Vec<usize>) {
    fn longest(n: usize, adj: &[Vec<usize>]) -> Vec<usize> {
        let mut memo = vec![usize::MAX; n];
        fn go(v: usize, adj: &[Vec<usize>], memo: &mut [usize]) -> usize {
            if memo[v] != usize::MAX {
                return memo[v];
            }
            let best = adj[v].iter().map(|&w| 1 + go(w, adj, memo)).max().unwrap_or(0);
            memo[v] = best;
            best
        }
        for v in 0..n {
            go(v, adj, &mut memo);
        }
        memo
    }
    (longest(n, up), longest(n, down))
}

struct Target {
    n: usize,
    le: Vec<Vec<bool>>,
    covers: Vec<Vec<bool>>,
    up_deg: Vec<usize>,
    down_deg: Vec<usize>,
    max_up: Vec<usize>,
    max_down: Vec<usize>,
}

impl Target {
    fn from_shape(shape: &SpecPoset) -> Self {
        let n = shape.node_count();
        let le = shape.closure();
        let mut covers = vec![vec![false; n]; n];
        let mut pairs = Vec::new();
        for (l, u) in shape.covers() {
            covers[l][u] = true;
            pairs.push((l, u));
        }
        let (up, down) = cover_adjacency(n, &pairs);
        let up_deg = up.iter().map(Vec::len).collect();
        let down_deg = down.iter().map(Vec::len).collect();
        let (max_up, max_down) = reach_ranks(n, &up, &down);
        Target { n, le, covers, up_deg, down_deg, max_up, max_down }
    }
}

struct Pattern {
    n: usize,
    le: Vec<Vec<bool>>,
    covers: Vec<Vec<bool>>,
    up_deg: Vec<usize>,
    down_deg: Vec<usize>,
    max_up: Vec<usize>,
    max_down: Vec<usize>,
    order: Vec<usize>,
}

impl Pattern {
    fn from_poset(x: &FinitePoset) -> Self {
        let n = x.len();
        let mut covers = vec![vec![false; n]; n];
        for &(l, u) in x.covers() {
            covers[l][u] = true;
        }
        let (up, down) = cover_adjacency(n, x.covers());
        let up_deg: Vec<usize> = up.iter().map(Vec::len).collect();
        let down_deg: Vec<usize> = down.iter().map(Vec::len).collect();
        let (max_up, max_down) = reach_ranks(n, &up, &down);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (usize::MAX - (max_up[v] + max_down[v]), v));
        Pattern { n, le: x.le.clone(), covers, up_deg, down_deg, max_up, max_down, order }
    }
}

fn compatible(pat: &Pattern, tgt: &Target, assigned: &[(usize, usize)], v: usize, c: usize, strict: bool) -> bool {
    if pat.max_up[v] > tgt.max_up[c]
        || pat.max_down[v] > tgt.max_down[c]
        || pat.up_deg[v] > tgt.up_deg[c]
        || pat.down_deg[v] > tgt.down_deg[c]
    {
        return false;
    }
    for &(u, fu) in assigned {
        if pat.covers[u][v] && !tgt.covers[fu][c] {
            return false;
        }
        if pat.covers[v][u] && !tgt.covers[c][fu] {
            return false;
        }
        if pat.le[u][v] && !tgt.le[fu][c] {
            return false;
        }
        if pat.le[v][u] && !tgt.le[c][fu] {
            return false;
        }
        if strict {
            if tgt.le[fu][c] && !pat.le[u][v] {
                return false;
            }
            if tgt.le[c][fu] && !pat.le[v][u] {
                return false;
            }
        }
    }
    true
}

fn search(
    pat: &Pattern,
    tgt: &Target,
    strict: bool,
    pos: usize,
    assigned: &mut Vec<(usize, usize)>,
    used: &mut [bool],
    image: &mut [usize],
) -> bool {
    if pos == pat.n {
        return true;
    }
    let v = pat.order[pos];
    for c in 0..tgt.n {
        if used[c] || !compatible(pat, tgt, assigned, v, c, strict) {
            continue;
        }
        used[c] = true;
        assigned.push((v, c));
        image[v] = c;
        if search(pat, tgt, strict, pos + 1, assigned, used, image) {
            return true;
        }
        assigned.pop();
        used[c] = false;
    }
    false
}

/// Find a saturated-chain-preserving embedding of `x` into `shape`, or
/// report that none exists. The search is exhaustive, so `None` is a
/// proof of absence, and the map found is the first in a fixed order,
/// so repeated runs agree.
pub fn embed(x: &FinitePoset, shape: &SpecPoset, strict: bool) -> Option<BTreeMap<String, NodeId>> {
    let pat = Pattern::from_poset(x);
    let tgt = Target::from_shape(shape);
    if pat.n > tgt.n {
        return None;
    }
    let mut assigned = Vec::with_capacity(pat.n);
    let mut used = vec![false; tgt.n];
    let mut image = vec![0usize; pat.n];
    if !search(&pat, &tgt, strict, 0, &mut assigned, &mut used, &mut image) {
        return None;
    }
    let map: BTreeMap<String, NodeId> = x
        .names()
        .iter()
        .enumerate()
        .map(|(i, name)| (name.clone(), image[i]))
        .collect();
    debug_assert!(verify_embedding(x, shape, &map, strict));
    Some(map)
}

/// Re-check a claimed embedding from scratch: injective, order-preserving,
/// covers to covers (hence saturated chains to saturated chains), and in
/// strict mode order-reflecting.
pub fn verify_embedding(
    x: &FinitePoset,
    shape: &SpecPoset,
    map: &BTreeMap<String, NodeId>,
    strict: bool,
) -> bool {
    let n = x.len();
    let mut image = vec![0usize; n];
    for (i, name) in x.names().iter().enumerate() {
        match map.get(name) {
            Some(&c) if c < shape.node_count() => image[i] = c,
            _ => return false,
        }
    }
    let mut seen = vec![false; shape.node_count()];
    for &c in &image {
        if seen[c] {
            return false;
        }
        seen[c] = true;
    }
    let tgt_le = shape.closure();
    let tgt_covers: std::collections::BTreeSet<(NodeId, NodeId)> = shape.covers().collect();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            if x.le(a, b) && !tgt_le[image[a]][image[b]] {
                return false;
            }
            if strict && tgt_le[image[a]][image[b]] && !x.le(a, b) {
                return false;
            }
        }
    }
    for &(l, u) in x.covers() {
        if !tgt_covers.contains(&(image[l], image[u])) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::poset::{NodeLabel, NodeRole};

    fn shape_from_covers(n: usize, covers: &[(usize, usize)]) -> SpecPoset {
        let mut p = SpecPoset::new();
        for _ in 0..n {
            p.add_node(NodeLabel::Anonymous, NodeRole::Anonymous);
        }
        for &(l, u) in covers {
            p.add_cover(l, u);
        }
        p.validate().unwrap();
        p
    }

    fn rel(pairs: &[(&str, &str)]) -> FinitePoset {
        let pairs: Vec<(String, String)> = pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        FinitePoset::from_relations(&pairs).unwrap()
    }

    #[test]
    fn parse_accepts_comments_and_blank_lines() {
        let p = FinitePoset::parse("# a diamond\n\na < b\na < c\nb < d\nc < d\n").unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.covers().len(), 4);
    }

    #[test]
    fn parse_rejects_malformed_lines() {
        let err = FinitePoset::parse("a < b\nb <= c\n").unwrap_err();
        assert_eq!(
            err,
            FinitePosetError::Malformed { line: 2, found: "b <= c".to_string() }
        );
    }

    #[test]
    fn parse_rejects_cycles() {
        let err = FinitePoset::parse("a < b\nb < a\n").unwrap_err();
        assert!(matches!(err, FinitePosetError::Cycle(_)));
    }

    #[test]
    fn transitive_relations_do_not_create_covers() {
        let p = FinitePoset::parse("a < b\nb < c\na < c\n").unwrap();
        assert_eq!(p.covers(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn chain_embeds_into_longer_chain() {
        // 0 -> 1 -> 2 -> 3 as a shape; a 3-chain pattern lands on a
        // consecutive run.
        let shape = shape_from_covers(4, &[(0, 1), (1, 2), (2, 3)]);
        let x = rel(&[("a", "b"), ("b", "c")]);
        let map = embed(&x, &shape, false).unwrap();
        let a = map["a"];
        assert_eq!(map["b"], a + 1);
        assert_eq!(map["c"], a + 2);
    }

    #[test]
    fn vee_does_not_embed_into_a_chain() {
        let shape = shape_from_covers(4, &[(0, 1), (1, 2), (2, 3)]);
        let x = rel(&[("a", "c"), ("b", "c")]);
        assert_eq!(embed(&x, &shape, false), None);
    }

    #[test]
    fn comparable_pattern_pair_must_map_to_a_cover_chain() {
        // Pattern a < b with a cover: the image must be a cover pair, not
        // just comparable.
        let shape = shape_from_covers(3, &[(0, 1), (1, 2)]);
        let x = rel(&[("a", "b")]);
        let map = embed(&x, &shape, false).unwrap();
        assert_eq!(map["b"], map["a"] + 1);
    }

    #[test]
    fn strict_mode_rejects_images_with_extra_comparabilities() {
        // Two incomparable edges a < x, b < y into a 4-chain: loose mode
        // can stack the two edges on top of each other, strict mode
        // cannot make the images incomparable inside a chain.
        let chain = shape_from_covers(4, &[(0, 1), (1, 2), (2, 3)]);
        let two_edges = rel(&[("a", "x"), ("b", "y")]);
        assert!(embed(&two_edges, &chain, false).is_some());
        assert_eq!(embed(&two_edges, &chain, true), None);

        // A vee into a diamond works in both modes: the two lower diamond
        // nodes are incomparable.
        let diamond = shape_from_covers(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let vee = rel(&[("a", "z"), ("b", "z")]);
        assert!(embed(&vee, &diamond, false).is_some());
        assert!(embed(&vee, &diamond, true).is_some());
    }

    #[test]
    fn strict_mode_is_order_reflecting_on_found_maps() {
        // Vee into a shape with both a vee and a chain: strict mode may
        // still pick images freely, but whatever it picks must reflect.
        let mut p = SpecPoset::new();
        for _ in 0..5 {
            p.add_node(NodeLabel::Anonymous, NodeRole::Anonymous);
        }
        // chain 0-1-4 and vee 2,3 -> 4.
        p.add_cover(0, 1);
        p.add_cover(1, 4);
        p.add_cover(2, 4);
        p.add_cover(3, 4);
        p.validate().unwrap();
        let vee = rel(&[("a", "z"), ("b", "z")]);
        let map = embed(&vee, &p, true).unwrap();
        assert!(verify_embedding(&vee, &p, &map, true));
        let le = p.closure();
        assert!(!le[map["a"]][map["b"]]);
        assert!(!le[map["b"]][map["a"]]);
    }

    #[test]
    fn verify_rejects_wrong_maps() {
        let shape = shape_from_covers(4, &[(0, 1), (1, 2), (2, 3)]);
        let x = rel(&[("a", "b")]);
        let mut map = BTreeMap::new();
        map.insert("a".to_string(), 0);
        map.insert("b".to_string(), 2);
        // 0 < 2 holds but is not a cover.
        assert!(!verify_embedding(&x, &shape, &map, false));
        map.insert("b".to_string(), 0);
        assert!(!verify_embedding(&x, &shape, &map, false));
    }

    #[test]
    fn embedding_search_is_deterministic() {
        let shape =
            shape_from_covers(7, &[(0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6)]);
        let x = rel(&[("p", "q"), ("q", "r")]);
        let first = embed(&x, &shape, false).unwrap();
        for _ in 0..5 {
            assert_eq!(embed(&x, &shape, false), Some(first.clone()));
        }
    }
}
