//! Brute-force oracles for the set-combinatorics claims made elsewhere in
//! the crate.
//!
//! Every check here is computed by exhaustive enumeration over bitmask-encoded
//! variable sets and shares no code with the formula paths in the ring and
//! gluing modules beyond the [`VarPrime`] type itself. The point is
//! independence: when a formula and an oracle agree, they agree for different
//! reasons.
//!
//! Two ring-theoretic inputs are taken on trust rather than recomputed,
//! because they have no finite shadow to enumerate: a prime of a quotient
//! ring contracts to a prime below it in any subring sharing the same
//! completion (the going-down property of such pairs), and localization of a
//! power series tower at a variable-generated prime is a quotient of a
//! regular local ring. Both enter the reports only as justification tags.
//!
//! Oracles refuse instances above [`ORACLE_VAR_CAP`] variables instead of
//! sampling; an exhaustive check that cannot finish is reported as a refusal,
//! never silently weakened.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::vars::VarPrime;

/// Hard cap on the number of distinct variables an oracle will enumerate.
pub const ORACLE_VAR_CAP: usize = 20;

/// Cap on the width of an interval whose maximal chains are enumerated; the
/// chain count grows as the factorial of the width.
pub const INTERVAL_WIDTH_CAP: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle refuses instances with more than {ORACLE_VAR_CAP} variables (got {0})")]
    TooManyVariables(usize),
    #[error("oracle refuses intervals wider than {INTERVAL_WIDTH_CAP} (got width {0})")]
    IntervalTooWide(usize),
    #[error("empty family")]
    EmptyFamily,
    #[error("malformed oracle instance: {0}")]
    Malformed(String),
}

/// Result of one oracle check, shaped for direct inclusion in reports.
#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub check: String,
    pub instance: String,
    pub expected: serde_json::Value,
    pub got: serde_json::Value,
    pub pass: bool,
}

/// A set of squarefree monomial generators, recorded by their supports.
/// The supports form an antichain: a generator divisible by another is
/// redundant and dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeGeneratorSet {
    universe: Vec<String>,
    generators: BTreeSet<VarPrime>,
}

impl SquarefreeGeneratorSet {
    pub fn generators(&self) -> &BTreeSet<VarPrime> {
        &self.generators
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }
}

/// Sorted variable universe with bitmask encoding. Bit `i` is `names[i]`.
struct Universe {
    names: Vec<String>,
}

impl Universe {
    fn from_names(names: BTreeSet<String>) -> Result<Universe, OracleError> {
        if names.len() > ORACLE_VAR_CAP {
            return Err(OracleError::TooManyVariables(names.len()));
        }
        Ok(Universe { names: names.into_iter().collect() })
    }

    fn len(&self) -> usize {
        self.names.len()
    }

    fn encode(&self, p: &VarPrime) -> Result<u32, OracleError> {
        let mut mask = 0u32;
        for v in p.iter() {
            let i = self
                .names
                .binary_search(v)
                .map_err(|_| OracleError::Malformed(format!("variable `{v}` outside universe")))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    fn decode(&self, mask: u32) -> VarPrime {
        VarPrime::new(
            self.names
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| v.clone()),
        )
    }
}

fn minimal_masks(masks: impl IntoIterator<Item = u32>) -> Vec<u32> {
    let all: BTreeSet<u32> = masks.into_iter().collect();
    all.iter()
        .copied()
        .filter(|m| !all.iter().any(|n| n != m && n & m == *n))
        .collect()
}

fn decode_all(uni: &Universe, masks: &[u32]) -> BTreeSet<VarPrime> {
    masks.iter().map(|m| uni.decode(*m)).collect()
}

/// Generators of an intersection of variable-generated primes: the minimal
/// supports among all products taking one variable from each member.
pub fn generators_of_intersection(
    family: &[VarPrime],
) -> Result<SquarefreeGeneratorSet, OracleError> {
    if family.is_empty() {
        return Err(OracleError::EmptyFamily);
    }
    let names: BTreeSet<String> =
        family.iter().flat_map(|p| p.vars().iter().cloned()).collect();
    let uni = Universe::from_names(names)?;

    // Supports of all transversal products, deduplicated per round so the
    // working set stays below 2^|universe|.
    let mut supports: BTreeSet<u32> = [0u32].into();
    for member in family {
        let member_mask = uni.encode(member)?;
        if member_mask == 0 {
            // A zero-ideal member annihilates every product: the
            // intersection is the zero ideal and has no generators.
            supports.clear();
            break;
        }
        let mut next = BTreeSet::new();
        for s in &supports {
            for i in 0..uni.len() {
                if member_mask & (1 << i) != 0 {
                    next.insert(s | (1 << i));
                }
            }
        }
        supports = next;
    }

    let minimal = minimal_masks(supports);
    let generators = decode_all(&uni, &minimal);
    let universe: BTreeSet<String> =
        generators.iter().flat_map(|g| g.vars().iter().cloned()).collect();
    Ok(SquarefreeGeneratorSet { universe: universe.into_iter().collect(), generators })
}

/// Minimal primes over an intersection ideal, computed as the minimal vertex
/// covers of the generator hypergraph. Must agree with family normalization;
/// the comparison is the caller's check, not ours.
pub fn oracle_minimal_primes(family: &[VarPrime]) -> Result<BTreeSet<VarPrime>, OracleError> {
    let gens = generators_of_intersection(family)?;
    let uni = Universe::from_names(gens.universe.iter().cloned().collect())?;
    let edges: Vec<u32> =
        gens.generators.iter().map(|g| uni.encode(g)).collect::<Result<_, _>>()?;

    let mut covers = Vec::new();
    for s in 0u32..(1u32 << uni.len()) {
        if edges.iter().all(|e| e & s != 0) {
            covers.push(s);
        }
    }
    Ok(decode_all(&uni, &minimal_masks(covers)))
}

fn render_sets(sets: &BTreeSet<VarPrime>) -> Vec<String> {
    sets.iter().map(|p| p.to_string()).collect()
}

/// Confirm the two-to-one split of minimal primes over a box-product ideal.
///
/// For designated parts `a1, a2` over `u` and a family `qf` of `k` members
/// over `v`, the minimal variable-generated primes over the extended ideal
/// (on the full variable set `u ∪ v`, where a prime must also contain `a1`
/// or `a2` to survive the quotient) should be exactly the `2k` sets
/// `ai ∪ q`, while on the `v` side alone they should be the `k` members of
/// `qf`. Everything is enumerated from scratch.
pub fn oracle_split_minimal_primes(
    u: &BTreeSet<String>,
    v: &BTreeSet<String>,
    a1: &VarPrime,
    a2: &VarPrime,
    qf: &[VarPrime],
) -> Result<OracleReport, OracleError> {
    if qf.is_empty() {
        return Err(OracleError::EmptyFamily);
    }
    if !u.is_disjoint(v) {
        return Err(OracleError::Malformed("u and v overlap".into()));
    }
    let subset_of = |p: &VarPrime, set: &BTreeSet<String>| p.vars().iter().all(|x| set.contains(x));
    if !subset_of(a1, u) || !subset_of(a2, u) {
        return Err(OracleError::Malformed("designated parts must live on u".into()));
    }
    if !qf.iter().all(|q| subset_of(q, v)) {
        return Err(OracleError::Malformed("family members must live on v".into()));
    }

    let uni = Universe::from_names(u.union(v).cloned().collect())?;
    let a_masks = [uni.encode(a1)?, uni.encode(a2)?];
    let q_masks: Vec<u32> = qf.iter().map(|q| uni.encode(q)).collect::<Result<_, _>>()?;

    // Full side: minimal subsets of u ∪ v containing some ai ∪ qj.
    let mut hits = Vec::new();
    for s in 0u32..(1u32 << uni.len()) {
        let covers_some = a_masks
            .iter()
            .any(|a| q_masks.iter().any(|q| { let aq = a | q; aq & s == aq }));
        if covers_some {
            hits.push(s);
        }
    }
    let got_full = decode_all(&uni, &minimal_masks(hits));

    // Glued side: minimal subsets of v containing some qj.
    let v_uni = Universe::from_names(v.clone())?;
    let vq_masks: Vec<u32> = qf.iter().map(|q| v_uni.encode(q)).collect::<Result<_, _>>()?;
    let mut v_hits = Vec::new();
    for s in 0u32..(1u32 << v_uni.len()) {
        if vq_masks.iter().any(|q| q & s == *q) {
            v_hits.push(s);
        }
    }
    let got_glued = decode_all(&v_uni, &minimal_masks(v_hits));

    let expected_full: BTreeSet<VarPrime> = qf
        .iter()
        .flat_map(|q| [a1.union(q), a2.union(q)])
        .collect();
    let expected_glued: BTreeSet<VarPrime> = qf.iter().cloned().collect();
    let k = qf.len();

    let full_ok = got_full == expected_full && got_full.len() == 2 * k;
    let glued_ok = got_glued == expected_glued && got_glued.len() == k;
    let offender = if full_ok {
        None
    } else {
        got_full
            .symmetric_difference(&expected_full)
            .next()
            .map(|p| p.to_string())
    };

    Ok(OracleReport {
        check: "split-minimal-primes".into(),
        instance: format!("a1={a1} a2={a2} qf={}", render_sets(&expected_glued).join(" ")),
        expected: json!({
            "full_side": render_sets(&expected_full),
            "full_count": 2 * k,
            "glued_side": render_sets(&expected_glued),
            "glued_count": k,
        }),
        got: json!({
            "full_side": render_sets(&got_full),
            "full_count": got_full.len(),
            "glued_side": render_sets(&got_glued),
            "glued_count": got_glued.len(),
            "offender": offender,
        }),
        pass: full_ok && glued_ok,
    })
}

/// Confirm that the interval `[p, q]` in the distinguished spectrum is the
/// boolean lattice on `q \ p`: node and cover counts match, and every
/// maximal chain enumerated by depth-first search has length `|q| - |p|`.
pub fn oracle_interval_graded(
    family: &[VarPrime],
    p: &VarPrime,
    q: &VarPrime,
) -> Result<OracleReport, OracleError> {
    if family.is_empty() {
        return Err(OracleError::EmptyFamily);
    }
    if !p.is_subset_of(q) {
        return Err(OracleError::Malformed(format!("{p} is not contained in {q}")));
    }
    if !family.iter().any(|m| m.is_subset_of(p)) {
        return Err(OracleError::Malformed(format!(
            "{p} is not a prime of the quotient: it contains no family member"
        )));
    }
    if q.len() > ORACLE_VAR_CAP {
        return Err(OracleError::TooManyVariables(q.len()));
    }
    let width = q.len() - p.len();
    if width > INTERVAL_WIDTH_CAP {
        return Err(OracleError::IntervalTooWide(width));
    }

    let extra: Vec<String> = q.difference(p).iter().cloned().collect();
    let d = extra.len();

    // Elements of the interval: p plus any subset of the extra variables.
    let node_count = 1usize << d;
    let mut cover_count = 0usize;
    for s in 0u32..(1u32 << d) {
        cover_count += d - (s.count_ones() as usize);
    }

    // Maximal chains: orders in which the extra variables are adjoined.
    let mut chain_lengths = Vec::new();
    let mut stack = vec![(0u32, 0usize)];
    while let Some((s, len)) = stack.pop() {
        if s == (1u32 << d) - 1 {
            chain_lengths.push(len);
            continue;
        }
        for i in 0..d {
            if s & (1 << i) == 0 {
                stack.push((s | (1 << i), len + 1));
            }
        }
    }
    let expected_chains: usize = (1..=d).product();
    let expected_covers = if d == 0 { 0 } else { d * (1usize << (d - 1)) };

    let pass = node_count == 1 << d
        && cover_count == expected_covers
        && chain_lengths.len() == expected_chains
        && chain_lengths.iter().all(|l| *l == d);

    Ok(OracleReport {
        check: "interval-graded".into(),
        instance: format!("[{p}, {q}]"),
        expected: json!({
            "nodes": 1usize << d,
            "covers": expected_covers,
            "chain_length": d,
            "chains": expected_chains,
        }),
        got: json!({
            "nodes": node_count,
            "covers": cover_count,
            "chains": chain_lengths.len(),
            "lengths_uniform": chain_lengths.iter().all(|l| *l == d),
        }),
        pass,
    })
}
