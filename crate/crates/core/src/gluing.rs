//! Gluing two incomparable distinguished primes of a tower ring.
//!
//! The hypothesis checker searches for a box-product factorization of the
//! family: disjoint variable sets `U ⊎ V = vars`, parts `A1, A2 ⊆ U` and a
//! family `Qf` over `V` with `family = {A1 ∪ q} ∪ {A2 ∪ q}` for `q ∈ Qf`,
//! where the designated primes are `Q_i = A_i ∪ V`. Applying the gluing
//! replaces the base by a fresh glued domain symbol whose shape is the
//! quotient shape with its two minimal nodes merged, adjoins `V`, and
//! quotients by `Qf`; the conclusions ledger records the checkable
//! consequences. `glue_minimal` merges minimal nodes of the canonical
//! shape by a partition of the family and is terminal: it returns a poset
//! and flags, not a ring.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flags::{CatenaryAt, PropertyFlags};
use crate::ring::{BaseDomain, RingError, TowerRing};
use crate::spectrum::poset::{NodeId, NodeLabel, NodeRole, PosetError, PosetNode, SpecPoset};
use crate::spectrum::{canonical_shape, merge_minimal_nodes};
use crate::vars::{MinPrimeFamily, VarPrime};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GluingError {
    #[error("hypothesis flag `{0}` is false")]
    FlagFalse(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("partition mismatch: {0}")]
    Partition(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// One failed hypothesis of the gluing construction, reported individually.
#[derive(Clone, Debug, Error, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GluingViolation {
    #[error("designated ideal {ideal} is not a prime: {detail}")]
    NotPrime { ideal: VarPrime, detail: String },
    #[error("designated primes {q1} and {q2} are comparable")]
    ComparableDesignated { q1: VarPrime, q2: VarPrime },
    #[error("hypothesis flag `{flag}` is false")]
    FlagFalse { flag: String },
    #[error("no box-product factorization of the family splits {q1} and {q2}")]
    NoBoxFactorization { q1: VarPrime, q2: VarPrime },
}

/// Witness that the family factors as a box product split by the two
/// designated primes `Q_i = A_i ∪ V`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FactorizationCertificate {
    pub u_vars: BTreeSet<String>,
    pub v_vars: BTreeSet<String>,
    pub a1: VarPrime,
    pub a2: VarPrime,
    pub qf: MinPrimeFamily,
    /// Bookkeeping bijection from fresh adjoined names to the members of
    /// `V`; the glued ring keeps the original names.
    pub renaming: BTreeMap<String, String>,
}

impl FactorizationCertificate {
    pub fn v_prime(&self) -> VarPrime {
        VarPrime::new(self.v_vars.iter().cloned())
    }

    pub fn q1(&self) -> VarPrime {
        self.a1.union(&self.v_prime())
    }

    pub fn q2(&self) -> VarPrime {
        self.a2.union(&self.v_prime())
    }
}

/// Result of checking the gluing hypotheses for one designated pair.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisCheck {
    pub q1: VarPrime,
    pub q2: VarPrime,
    pub violations: Vec<GluingViolation>,
    pub certificate: Option<FactorizationCertificate>,
    /// Other maximal compatible subsets of the same size, if any.
    pub alternates: Vec<FactorizationCertificate>,
    /// Catenarity of the localizations at the designated primes, granted
    /// structurally: each localization is a quotient of a regular local
    /// ring.
    pub catenary_records: Vec<CatenaryAt>,
    pub notes: Vec<String>,
}

impl HypothesisCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.certificate.is_some()
    }
}

const CATENARY_JUSTIFICATION: &str = "regular-local-quotient";

fn hypothesis_flags(flags: &PropertyFlags) -> [(&'static str, bool); 4] {
    [
        ("reduced", flags.reduced),
        ("contains_rationals", flags.contains_rationals),
        ("uncountable", flags.uncountable),
        ("card_eq_residue", flags.card_eq_residue),
    ]
}

fn subsets_of_size(items: &[String], k: usize) -> Vec<BTreeSet<String>> {
    fn go(items: &[String], k: usize, start: usize, cur: &mut Vec<String>, out: &mut Vec<BTreeSet<String>>) {
        if cur.len() == k {
            out.push(cur.iter().cloned().collect());
            return;
        }
        let need = k - cur.len();
        for i in start..=items.len().saturating_sub(need) {
            cur.push(items[i].clone());
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Try to factor the family as a box product with adjoined part `v`.
fn try_box(
    ring: &TowerRing,
    q1: &VarPrime,
    q2: &VarPrime,
    v: &BTreeSet<String>,
) -> Option<(VarPrime, VarPrime, BTreeSet<VarPrime>)> {
    let vp = VarPrime::new(v.iter().cloned());
    let a1 = q1.difference(&vp);
    let a2 = q2.difference(&vp);
    let mut qf1: BTreeSet<VarPrime> = BTreeSet::new();
    let mut qf2: BTreeSet<VarPrime> = BTreeSet::new();
    for m in ring.family().iter() {
        let mu = m.difference(&vp);
        let mv = m.intersection(&vp);
        if mu == a1 {
            qf1.insert(mv);
        } else if mu == a2 {
            qf2.insert(mv);
        } else {
            return None;
        }
    }
    if qf1.is_empty() || qf1 != qf2 {
        return None;
    }
    Some((a1, a2, qf1))
}

fn build_certificate(
    ring: &TowerRing,
    v: BTreeSet<String>,
    a1: VarPrime,
    a2: VarPrime,
    qf: BTreeSet<VarPrime>,
) -> FactorizationCertificate {
    let u_vars: BTreeSet<String> = ring.vars().difference(&v).cloned().collect();
    let renaming: BTreeMap<String, String> = v
        .iter()
        .enumerate()
        .map(|(i, var)| (format!("y{}", i + 1), var.clone()))
        .collect();
    FactorizationCertificate {
        u_vars,
        v_vars: v,
        a1,
        a2,
        qf: MinPrimeFamily::normalize(qf).expect("box parts form a nonempty antichain"),
        renaming,
    }
}

/// Check the gluing hypotheses for the designated pair and search for the
/// maximal box-product factorization. Candidate adjoined sets `V` run over
/// subsets of `Q1 ∩ Q2` in decreasing size, lexicographically within a
/// size; the first hit wins and same-size hits are noted as alternates.
pub fn check_gluing_hypotheses(ring: &TowerRing, q1: &VarPrime, q2: &VarPrime) -> HypothesisCheck {
    let mut check = HypothesisCheck {
        q1: q1.clone(),
        q2: q2.clone(),
        violations: Vec::new(),
        certificate: None,
        alternates: Vec::new(),
        catenary_records: Vec::new(),
        notes: Vec::new(),
    };

    for q in [q1, q2] {
        if let Err(e) = ring.check_prime(q) {
            check.violations.push(GluingViolation::NotPrime {
                ideal: q.clone(),
                detail: e.to_string(),
            });
        }
    }
    if !check.violations.is_empty() {
        return check;
    }
    if q1.is_subset_of(q2) || q2.is_subset_of(q1) {
        check.violations.push(GluingViolation::ComparableDesignated {
            q1: q1.clone(),
            q2: q2.clone(),
        });
        return check;
    }
    for (flag, ok) in hypothesis_flags(&ring.flags) {
        if !ok {
            check.violations.push(GluingViolation::FlagFalse { flag: flag.to_string() });
        }
    }

    let inter = q1.intersection(q2);
    let items: Vec<String> = inter.iter().cloned().collect();
    let mut hits: Vec<(BTreeSet<String>, VarPrime, VarPrime, BTreeSet<VarPrime>)> = Vec::new();
    for size in (0..=items.len()).rev() {
        for v in subsets_of_size(&items, size) {
            if let Some((a1, a2, qf)) = try_box(ring, q1, q2, &v) {
                hits.push((v, a1, a2, qf));
            }
        }
        if !hits.is_empty() {
            break;
        }
    }

    if hits.is_empty() {
        check.violations.push(GluingViolation::NoBoxFactorization {
            q1: q1.clone(),
            q2: q2.clone(),
        });
        return check;
    }
    if hits.len() > 1 {
        check.notes.push(format!(
            "{} maximal compatible adjoined sets; using the lexicographically least",
            hits.len()
        ));
    }
    let mut certs = hits
        .into_iter()
        .map(|(v, a1, a2, qf)| build_certificate(ring, v, a1, a2, qf));
    check.certificate = certs.next();
    check.alternates = certs.collect();
    check.catenary_records = vec![
        CatenaryAt { prime: q1.clone(), justification: CATENARY_JUSTIFICATION.to_string() },
        CatenaryAt { prime: q2.clone(), justification: CATENARY_JUSTIFICATION.to_string() },
    ];
    check
}

/// The two-to-one pairing of family members with glued-side minimal
/// primes.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CorrespondenceTriple {
    pub above_q1: VarPrime,
    pub above_q2: VarPrime,
    pub glued_to: VarPrime,
}

pub fn minimal_prime_correspondence(cert: &FactorizationCertificate) -> Vec<CorrespondenceTriple> {
    cert.qf
        .iter()
        .map(|q| CorrespondenceTriple {
            above_q1: cert.a1.union(q),
            above_q2: cert.a2.union(q),
            glued_to: q.clone(),
        })
        .collect()
}

/// One entry of the coheight-preserving pairing: both designated-side
/// minimal primes collapse onto the glued-side prime, at the stated
/// coheight in the respective localizations.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PairedMinimalPrime {
    pub above_q1: VarPrime,
    pub above_q2: VarPrime,
    pub glued_to: VarPrime,
    pub coheight: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PositiveHeightNodes {
    pub quotient_side: usize,
    pub glued_side: usize,
    pub matches: bool,
}

/// The checkable consequences of a performed gluing, one entry per
/// conclusion: completion and cardinality preserved, the glued
/// prime with its catenary localization, the tower presentation over a
/// domain, the positive-height node match, the coheight-preserving
/// minimal-prime pairing, and quasi-excellence propagation.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ConclusionsLedger {
    pub completion_preserved: bool,
    pub cardinality_equals_residue_field: bool,
    pub glued_prime: VarPrime,
    pub catenary_at_glued_prime: CatenaryAt,
    pub presentation: String,
    pub positive_height_nodes: PositiveHeightNodes,
    pub minimal_prime_pairing: Vec<PairedMinimalPrime>,
    pub quasi_excellent_propagated: bool,
}

pub struct GluingOutcome {
    /// The glued ring: fresh domain base, the `V` variables, family `Qf`.
    pub ring: TowerRing,
    /// The quotient by the intersection of the designated primes, as a
    /// tower over the original base.
    pub quotient: TowerRing,
    pub ledger: ConclusionsLedger,
}

fn validate_certificate(ring: &TowerRing, cert: &FactorizationCertificate) -> Result<(), GluingError> {
    let inv = |msg: &str| GluingError::InvalidCertificate(msg.to_string());
    if !cert.u_vars.is_disjoint(&cert.v_vars) {
        return Err(inv("U and V overlap"));
    }
    let union: BTreeSet<String> = cert.u_vars.union(&cert.v_vars).cloned().collect();
    if &union != ring.vars() {
        return Err(inv("U ∪ V is not the variable set of the ring"));
    }
    for a in [&cert.a1, &cert.a2] {
        if a.is_empty() {
            return Err(inv("an A-part is empty"));
        }
        if !a.vars().is_subset(&cert.u_vars) {
            return Err(inv("an A-part leaves U"));
        }
    }
    if cert.a1.is_subset_of(&cert.a2) || cert.a2.is_subset_of(&cert.a1) {
        return Err(inv("the A-parts are comparable"));
    }
    for q in cert.qf.iter() {
        if !q.vars().is_subset(&cert.v_vars) {
            return Err(inv("a member of Qf leaves V"));
        }
    }
    let rebuilt: BTreeSet<VarPrime> = cert
        .qf
        .iter()
        .flat_map(|q| [cert.a1.union(q), cert.a2.union(q)])
        .collect();
    if rebuilt.len() != 2 * cert.qf.len() {
        return Err(inv("the box product has colliding members"));
    }
    let family: BTreeSet<VarPrime> = ring.family().iter().cloned().collect();
    if rebuilt != family {
        return Err(inv("the box product does not reproduce the family"));
    }
    if cert.renaming.len() != cert.v_vars.len() {
        return Err(inv("the renaming is not a bijection onto V"));
    }
    let targets: BTreeSet<&String> = cert.renaming.values().collect();
    if targets.len() != cert.v_vars.len() || !targets.iter().all(|t| cert.v_vars.contains(*t)) {
        return Err(inv("the renaming is not a bijection onto V"));
    }
    Ok(())
}

/// Apply the gluing described by a valid certificate, producing the glued
/// ring (over the fresh base symbol `base_name`) and the conclusions
/// ledger.
pub fn apply_gluing(
    ring: &TowerRing,
    cert: &FactorizationCertificate,
    base_name: &str,
) -> Result<GluingOutcome, GluingError> {
    validate_certificate(ring, cert)?;
    for (flag, ok) in hypothesis_flags(&ring.flags) {
        if !ok {
            return Err(GluingError::FlagFalse(flag.to_string()));
        }
    }

    let quotient = TowerRing::new(
        ring.base().clone(),
        cert.u_vars.iter().cloned(),
        [cert.a1.clone(), cert.a2.clone()],
    )?;
    let quotient_shape = canonical_shape(&quotient);
    let n1 = quotient_shape
        .find_prime_node(&cert.a1, 0)
        .expect("quotient shape names its minimal primes");
    let n2 = quotient_shape
        .find_prime_node(&cert.a2, 0)
        .expect("quotient shape names its minimal primes");
    let base_shape = merge_minimal_nodes(&quotient_shape, &[vec![n1, n2]])?;

    let mut base_flags = quotient.flags.clone();
    base_flags.domain = true;
    base_flags.complete = false;
    base_flags.quasi_excellent = ring.flags.quasi_excellent;
    let base_dim = ring.base().dim + cert.u_vars.len() - cert.a1.len().min(cert.a2.len());
    let glued_side = base_shape.node_count() - base_shape.minimal_nodes().len();
    let quotient_side = quotient_shape.node_count() - quotient_shape.minimal_nodes().len();
    let base = BaseDomain::glued(base_name, base_dim, base_shape, base_flags)?;

    let mut glued = TowerRing::new(base, cert.v_vars.iter().cloned(), cert.qf.iter().cloned())?;
    let catenary = CatenaryAt {
        prime: cert.v_prime(),
        justification: CATENARY_JUSTIFICATION.to_string(),
    };
    glued.flags.catenary_at.push(catenary.clone());

    let ledger = ConclusionsLedger {
        completion_preserved: true,
        cardinality_equals_residue_field: glued.flags.uncountable && glued.flags.card_eq_residue,
        glued_prime: cert.v_prime(),
        catenary_at_glued_prime: catenary,
        presentation: glued.presentation(),
        positive_height_nodes: PositiveHeightNodes {
            quotient_side,
            glued_side,
            matches: quotient_side == glued_side,
        },
        minimal_prime_pairing: cert
            .qf
            .iter()
            .map(|q| PairedMinimalPrime {
                above_q1: cert.a1.union(q),
                above_q2: cert.a2.union(q),
                glued_to: q.clone(),
                coheight: cert.v_vars.len() - q.len(),
            })
            .collect(),
        quasi_excellent_propagated: glued.flags.quasi_excellent == ring.flags.quasi_excellent,
    };
    Ok(GluingOutcome { ring: glued, quotient, ledger })
}

/// Rewrite the preglue shape into the glued shape by surgery: merge the
/// two designated nodes into the glued prime, merge their lower chains
/// pairwise along the certificate, and shift the upper region up one
/// level. The result must be isomorphic to the canonical shape of the
/// glued ring.
pub fn surgery_glued_shape(
    preglue: &SpecPoset,
    ring: &TowerRing,
    cert: &FactorizationCertificate,
) -> Result<SpecPoset, GluingError> {
    let q1 = cert.q1();
    let q2 = cert.q2();
    let find = |p: &VarPrime| {
        preglue.find_prime_node(p, 0).ok_or_else(|| {
            GluingError::InvalidCertificate(format!("preglue shape has no node for {p}"))
        })
    };
    let n1 = find(&q1)?;
    let n2 = find(&q2)?;
    let g_old = find(&ring.all_vars_prime())?;
    let le = preglue.closure();

    let chains_below = |nq: NodeId| -> BTreeMap<VarPrime, (Vec<NodeId>, NodeId)> {
        let mut out = BTreeMap::new();
        for c in preglue.lower_covers(nq) {
            let mut interiors = Vec::new();
            let mut cur = c;
            while preglue.node(cur).label == NodeLabel::Anonymous {
                interiors.push(cur);
                cur = preglue.lower_covers(cur)[0];
            }
            if let NodeLabel::Prime { prime, .. } = &preglue.node(cur).label {
                out.insert(prime.clone(), (interiors, cur));
            }
        }
        out
    };
    let below1 = chains_below(n1);
    let below2 = chains_below(n2);

    let mut class_of: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut relabel: BTreeMap<NodeId, PosetNode> = BTreeMap::new();
    class_of.insert(n2, n1);
    relabel.insert(
        n1,
        PosetNode {
            label: NodeLabel::Prime { prime: cert.v_prime(), level: 0 },
            role: NodeRole::AllAdjoined,
        },
    );
    for q in cert.qf.iter() {
        if q.len() == cert.v_vars.len() {
            continue;
        }
        let p1 = cert.a1.union(q);
        let p2 = cert.a2.union(q);
        let (ints1, t1) = below1.get(&p1).ok_or_else(|| {
            GluingError::InvalidCertificate(format!("no chain below {q1} ends at {p1}"))
        })?;
        let (ints2, t2) = below2.get(&p2).ok_or_else(|| {
            GluingError::InvalidCertificate(format!("no chain below {q2} ends at {p2}"))
        })?;
        if ints1.len() != ints2.len() {
            return Err(GluingError::InvalidCertificate(format!(
                "chains to {p1} and {p2} have different lengths"
            )));
        }
        for (a, b) in ints1.iter().zip(ints2.iter()) {
            class_of.insert(*b, *a);
        }
        class_of.insert(*t2, *t1);
        relabel.insert(
            *t1,
            PosetNode {
                label: NodeLabel::Prime { prime: q.clone(), level: 0 },
                role: NodeRole::Minimal,
            },
        );
    }

    let u_prime = VarPrime::new(cert.u_vars.iter().cloned());
    for x in 0..preglue.node_count() {
        if x == n1 || x == n2 || !(le[n1][x] || le[n2][x]) {
            continue;
        }
        if x == g_old {
            relabel.insert(
                x,
                PosetNode {
                    label: NodeLabel::Prime { prime: u_prime.clone(), level: 1 },
                    role: NodeRole::AllAdjoined,
                },
            );
            continue;
        }
        let node = preglue.node(x);
        let bumped = match &node.label {
            NodeLabel::Anonymous => continue,
            NodeLabel::Prime { prime, level } => {
                NodeLabel::Prime { prime: prime.clone(), level: level + 1 }
            }
            NodeLabel::Class { members, level } => {
                NodeLabel::Class { members: members.clone(), level: level + 1 }
            }
        };
        relabel.insert(x, PosetNode { label: bumped, role: node.role });
    }

    preglue.quotient(&class_of, &relabel).map_err(GluingError::from)
}

/// Outcome of the terminal minimal-prime gluing: a poset and flags, not a
/// ring.
#[derive(Clone, Debug)]
pub struct GlueMinimalOutcome {
    pub shape: SpecPoset,
    pub flags: PropertyFlags,
}

/// Merge the minimal nodes of the canonical shape along a partition of
/// the family.
pub fn glue_minimal(
    ring: &TowerRing,
    partition: &[Vec<VarPrime>],
) -> Result<GlueMinimalOutcome, GluingError> {
    for (flag, ok) in hypothesis_flags(&ring.flags) {
        if !ok {
            return Err(GluingError::FlagFalse(flag.to_string()));
        }
    }
    let mut seen: BTreeSet<&VarPrime> = BTreeSet::new();
    for class in partition {
        if class.is_empty() {
            return Err(GluingError::Partition("a class is empty".to_string()));
        }
        for p in class {
            if !ring.family().contains(p) {
                return Err(GluingError::Partition(format!(
                    "{p} is not a member of the family"
                )));
            }
            if !seen.insert(p) {
                return Err(GluingError::Partition(format!(
                    "{p} appears in more than one class"
                )));
            }
        }
    }
    if seen.len() != ring.family().len() {
        let missing = ring
            .family()
            .iter()
            .find(|m| !seen.contains(m))
            .expect("some member is uncovered");
        return Err(GluingError::Partition(format!(
            "family member {missing} is missing from the partition"
        )));
    }

    let shape = canonical_shape(ring);
    let classes: Vec<Vec<NodeId>> = partition
        .iter()
        .map(|class| {
            class
                .iter()
                .map(|p| shape.find_prime_node(p, 0).expect("family members are drawn"))
                .collect()
        })
        .collect();
    let merged = merge_minimal_nodes(&shape, &classes)?;
    let mut flags = ring.flags.clone();
    flags.domain = partition.len() == 1;
    flags.complete = false;
    Ok(GlueMinimalOutcome { shape: merged, flags })
}
