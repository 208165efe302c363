//! Executes a parsed script: builds rings, runs gluing steps, emits
//! shapes and the consolidated report.
//!
//! Names are registered in one flat namespace. A `glue` step registers
//! the glued ring under its own name and the fresh base domain under
//! `R1`, `R2`, ... in application order, so later `ring` statements can
//! adjoin new variables over a glued base. A `gluemin` step produces a
//! merged shape; it is terminal: its result cannot be glued again, and a
//! ring can be merged at most once.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use specglue::{
    apply_gluing, canonical_shape, check_gluing_hypotheses, embed, glue_minimal,
    oracle_interval_graded, oracle_minimal_primes, oracle_split_minimal_primes, preglue_shape,
    verify_embedding, BaseDomain, FactorizationCertificate, FinitePoset, PropertyFlags,
    SpecPoset, TowerRing, VarPrime, DEFAULT_CHAIN_CAP, INTERVAL_WIDTH_CAP,
};

use crate::script::{Located, Script, Statement};

#[derive(Clone, Debug)]
pub struct Options {
    pub out_dir: PathBuf,
    /// Directory poset files are resolved against.
    pub script_dir: PathBuf,
    pub strict_embed: bool,
    pub chain_cap: usize,
    pub oracle: bool,
    pub assert_flags: Vec<(String, bool)>,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            out_dir: PathBuf::from("."),
            script_dir: PathBuf::from("."),
            strict_embed: false,
            chain_cap: DEFAULT_CHAIN_CAP,
            oracle: true,
            assert_flags: Vec::new(),
        }
    }
}

/// An error that stops the run: misused names, I/O, malformed inputs.
/// Failed hypothesis checks and oracle mismatches are not errors; they
/// land in the report and clear `pass`.
#[derive(Clone, Debug)]
pub struct DriverError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for DriverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for DriverError {}

fn fail(line: usize, message: impl fmt::Display) -> DriverError {
    DriverError { line: Some(line), message: message.to_string() }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub pass: bool,
    pub report: Value,
    pub written: Vec<PathBuf>,
}

struct RingEntry {
    ring: TowerRing,
    certificate: Option<FactorizationCertificate>,
}

#[derive(Default)]
struct Env {
    bases: BTreeMap<String, BaseDomain>,
    rings: BTreeMap<String, RingEntry>,
    shapes: BTreeMap<String, SpecPoset>,
    merged_rings: BTreeSet<String>,
    glued_count: usize,
}

struct Report {
    rings: Vec<Value>,
    hypothesis_checks: Vec<Value>,
    merges: Vec<Value>,
    shapes: Vec<Value>,
    embeddings: Vec<Value>,
    oracle: Vec<Value>,
    notes: Vec<String>,
    pass: bool,
}

impl Report {
    fn new() -> Report {
        Report {
            rings: Vec::new(),
            hypothesis_checks: Vec::new(),
            merges: Vec::new(),
            shapes: Vec::new(),
            embeddings: Vec::new(),
            oracle: Vec::new(),
            notes: Vec::new(),
            pass: true,
        }
    }

    fn into_value(self) -> Value {
        json!({
            "rings": self.rings,
            "hypothesis_checks": self.hypothesis_checks,
            "merges": self.merges,
            "shapes": self.shapes,
            "embeddings": self.embeddings,
            "oracle": self.oracle,
            "notes": self.notes,
            "pass": self.pass,
        })
    }
}

fn ring_ledger_entry(name: &str, ring: &TowerRing) -> Value {
    json!({
        "name": name,
        "presentation": ring.presentation(),
        "base": { "name": ring.base().name, "dim": ring.base().dim },
        "vars": ring.vars(),
        "family": ring.family().members(),
        "dim": ring.dim(),
        "flags": ring.flags,
    })
}

fn field_base(name: &str, opts: &Options) -> Option<BaseDomain> {
    if !matches!(name, "C" | "R" | "Q") {
        return None;
    }
    let mut base = BaseDomain::field(name);
    for (flag, value) in &opts.assert_flags {
        base.flags
            .assert_flag(flag, *value)
            .expect("flag names are validated before the run");
    }
    Some(base)
}

fn check_name_free(env: &Env, name: &str, line: usize) -> Result<(), DriverError> {
    if env.rings.contains_key(name) || env.shapes.contains_key(name) {
        Err(fail(line, format!("name `{name}` is already declared")))
    } else {
        Ok(())
    }
}

fn resolve_ring<'e>(env: &'e Env, name: &str, line: usize) -> Result<&'e RingEntry, DriverError> {
    if let Some(entry) = env.rings.get(name) {
        Ok(entry)
    } else if env.shapes.contains_key(name) {
        Err(fail(line, format!("`{name}` is a merged shape, not a ring")))
    } else {
        Err(fail(line, format!("undeclared ring `{name}`")))
    }
}

fn resolve_shape(env: &Env, name: &str, line: usize) -> Result<SpecPoset, DriverError> {
    if let Some(entry) = env.rings.get(name) {
        Ok(canonical_shape(&entry.ring))
    } else if let Some(shape) = env.shapes.get(name) {
        Ok(shape.clone())
    } else {
        Err(fail(line, format!("undeclared ring or shape `{name}`")))
    }
}

fn write_shape_files(
    shape: &SpecPoset,
    stem: &str,
    opts: &Options,
    written: &mut Vec<PathBuf>,
) -> Result<(), DriverError> {
    let json_path = opts.out_dir.join(format!("{stem}.json"));
    let dot_path = opts.out_dir.join(format!("{stem}.dot"));
    let mut rendered = serde_json::to_string_pretty(&shape.to_json_value())
        .expect("shape JSON serializes");
    rendered.push('\n');
    fs::write(&json_path, rendered)
        .map_err(|e| DriverError { line: None, message: format!("write {}: {e}", json_path.display()) })?;
    fs::write(&dot_path, shape.to_dot())
        .map_err(|e| DriverError { line: None, message: format!("write {}: {e}", dot_path.display()) })?;
    written.push(json_path);
    written.push(dot_path);
    Ok(())
}

fn shape_report_entry(
    name: &str,
    kind: &str,
    shape: &SpecPoset,
    chain_cap: usize,
    line: usize,
) -> Result<Value, DriverError> {
    let verdict = shape.is_catenary(chain_cap).map_err(|e| fail(line, e))?;
    Ok(json!({
        "name": name,
        "kind": kind,
        "nodes": shape.node_count(),
        "covers": shape.cover_count(),
        "catenary": verdict,
    }))
}

fn interval_reports(
    report: &mut Report,
    ring: &TowerRing,
    instance: &str,
) -> Result<(), DriverError> {
    let family: Vec<VarPrime> = ring.family().iter().cloned().collect();
    let top = ring.all_vars_prime();
    for q in &family {
        if top.len() - q.len() > INTERVAL_WIDTH_CAP {
            report.oracle.push(json!({
                "check": "interval-graded",
                "instance": format!("{instance} at {q}"),
                "skipped": format!("interval wider than {INTERVAL_WIDTH_CAP}"),
            }));
            continue;
        }
        let r = oracle_interval_graded(&family, q, &top)
            .map_err(|e| DriverError { line: None, message: e.to_string() })?;
        report.pass &= r.pass;
        report.oracle.push(serde_json::to_value(&r).expect("oracle report serializes"));
    }
    Ok(())
}

fn run_verify(
    report: &mut Report,
    entry: &RingEntry,
    name: &str,
    opts: &Options,
) -> Result<(), DriverError> {
    if !opts.oracle {
        report.oracle.push(json!({
            "check": "verify",
            "instance": name,
            "skipped": "oracle disabled",
        }));
        return Ok(());
    }
    let family: Vec<VarPrime> = entry.ring.family().iter().cloned().collect();
    let expected = entry.ring.family().members().clone();
    let got = oracle_minimal_primes(&family)
        .map_err(|e| DriverError { line: None, message: e.to_string() })?;
    let pass = expected == got;
    report.pass &= pass;
    report.oracle.push(json!({
        "check": "minimal-primes-normalization",
        "instance": name,
        "expected": expected,
        "got": got,
        "pass": pass,
    }));

    if let Some(cert) = &entry.certificate {
        let r = oracle_split_minimal_primes(
            &cert.u_vars,
            &cert.v_vars,
            &cert.a1,
            &cert.a2,
            &cert.qf.iter().cloned().collect::<Vec<_>>(),
        )
        .map_err(|e| DriverError { line: None, message: e.to_string() })?;
        report.pass &= r.pass;
        report.oracle.push(serde_json::to_value(&r).expect("oracle report serializes"));
    }

    interval_reports(report, &entry.ring, name)
}

fn run_embed(
    report: &mut Report,
    shape: &SpecPoset,
    poset_file: &str,
    target: &str,
    opts: &Options,
    line: usize,
) -> Result<(), DriverError> {
    let path = if Path::new(poset_file).is_absolute() {
        PathBuf::from(poset_file)
    } else {
        opts.script_dir.join(poset_file)
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| fail(line, format!("read {}: {e}", path.display())))?;
    let poset = FinitePoset::parse(&text)
        .map_err(|e| fail(line, format!("{poset_file}: {e}")))?;

    let found = embed(&poset, shape, false);
    if let Some(map) = &found {
        if !verify_embedding(&poset, shape, map, false) {
            report.pass = false;
            report.notes.push(format!("embedding of {poset_file} in {target} failed re-verification"));
        }
    }
    let mut entry = json!({
        "poset": poset_file,
        "target": target,
        "found": found,
    });
    if opts.strict_embed {
        let strict = embed(&poset, shape, true);
        if let Some(map) = &strict {
            if !verify_embedding(&poset, shape, map, true) {
                report.pass = false;
                report.notes.push(format!(
                    "strict embedding of {poset_file} in {target} failed re-verification"
                ));
            }
        }
        let differ = found.is_some() != strict.is_some();
        entry["strict_found"] = serde_json::to_value(&strict).expect("map serializes");
        entry["modes_differ"] = json!(differ);
    }
    report.embeddings.push(entry);
    Ok(())
}

pub fn run_script(script: &Script, opts: &Options) -> Result<RunOutcome, DriverError> {
    for (flag, _) in &opts.assert_flags {
        let mut probe = PropertyFlags::field_defaults("C");
        probe
            .assert_flag(flag, true)
            .map_err(|e| DriverError { line: None, message: e })?;
    }
    fs::create_dir_all(&opts.out_dir).map_err(|e| DriverError {
        line: None,
        message: format!("create {}: {e}", opts.out_dir.display()),
    })?;

    let mut env = Env::default();
    let mut report = Report::new();
    let mut written = Vec::new();

    for Located { statement, line } in &script.statements {
        let line = *line;
        match statement {
            Statement::Ring { name, base, vars, family } => {
                check_name_free(&env, name, line)?;
                let base_domain = match env.bases.get(base) {
                    Some(b) => b.clone(),
                    None => field_base(base, opts).ok_or_else(|| {
                        fail(line, format!("unknown base `{base}`; expected C, R, Q or a glued base"))
                    })?,
                };
                let ring =
                    TowerRing::new(base_domain, vars.clone(), family.iter().cloned())
                        .map_err(|e| fail(line, e))?;
                report.rings.push(ring_ledger_entry(name, &ring));
                env.rings.insert(name.clone(), RingEntry { ring, certificate: None });
            }
            Statement::Glue { name, source, q1, q2 } => {
                check_name_free(&env, name, line)?;
                let source_ring = resolve_ring(&env, source, line)?.ring.clone();
                let check = check_gluing_hypotheses(&source_ring, q1, q2);
                if !check.passed() {
                    report.pass = false;
                    report.hypothesis_checks.push(json!({
                        "name": name,
                        "source": source,
                        "check": check,
                    }));
                    report.notes.push(format!(
                        "line {line}: gluing `{name}` failed its hypothesis check; remaining statements skipped"
                    ));
                    break;
                }
                let cert = check.certificate.clone().expect("passed check has a certificate");
                env.glued_count += 1;
                let base_name = format!("R{}", env.glued_count);
                let outcome =
                    apply_gluing(&source_ring, &cert, &base_name).map_err(|e| fail(line, e))?;
                report.hypothesis_checks.push(json!({
                    "name": name,
                    "source": source,
                    "check": check,
                    "quotient": outcome.quotient.presentation(),
                    "conclusions": outcome.ledger,
                }));
                report.rings.push(ring_ledger_entry(name, &outcome.ring));
                if opts.oracle {
                    let r = oracle_split_minimal_primes(
                        &cert.u_vars,
                        &cert.v_vars,
                        &cert.a1,
                        &cert.a2,
                        &cert.qf.iter().cloned().collect::<Vec<_>>(),
                    )
                    .map_err(|e| fail(line, e))?;
                    report.pass &= r.pass;
                    report.oracle.push(serde_json::to_value(&r).expect("oracle report serializes"));
                }
                env.bases.insert(base_name, outcome.ring.base().clone());
                env.rings.insert(
                    name.clone(),
                    RingEntry { ring: outcome.ring, certificate: Some(cert) },
                );
            }
            Statement::GlueMin { name, source, classes } => {
                check_name_free(&env, name, line)?;
                let entry = resolve_ring(&env, source, line)?;
                if env.merged_rings.contains(source) {
                    return Err(fail(
                        line,
                        format!("ring `{source}` already has a merged shape; one per lineage"),
                    ));
                }
                let outcome = glue_minimal(&entry.ring, classes).map_err(|e| fail(line, e))?;
                report.merges.push(json!({
                    "name": name,
                    "source": source,
                    "classes": classes,
                    "nodes": outcome.shape.node_count(),
                    "covers": outcome.shape.cover_count(),
                    "flags": outcome.flags,
                }));
                env.merged_rings.insert(source.clone());
                env.shapes.insert(name.clone(), outcome.shape);
            }
            Statement::Shape { target } => {
                let shape = resolve_shape(&env, target, line)?;
                write_shape_files(&shape, target, opts, &mut written)?;
                report.shapes.push(shape_report_entry(
                    target,
                    "shape",
                    &shape,
                    opts.chain_cap,
                    line,
                )?);
            }
            Statement::Preshape { source, q1, q2 } => {
                let entry = resolve_ring(&env, source, line)?;
                let shape = preglue_shape(&entry.ring, q1, q2).map_err(|e| fail(line, e))?;
                let stem = format!("{source}_preglue");
                write_shape_files(&shape, &stem, opts, &mut written)?;
                report.shapes.push(shape_report_entry(
                    &stem,
                    "preshape",
                    &shape,
                    opts.chain_cap,
                    line,
                )?);
            }
            Statement::Embed { poset_file, target } => {
                let shape = resolve_shape(&env, target, line)?;
                run_embed(&mut report, &shape, poset_file, target, opts, line)?;
            }
            Statement::Verify { target } => {
                let entry = resolve_ring(&env, target, line)?;
                run_verify(&mut report, entry, target, opts)?;
            }
            Statement::Report => {}
        }
    }

    let pass = report.pass;
    let report_value = report.into_value();
    let mut rendered =
        serde_json::to_string_pretty(&report_value).expect("report serializes");
    rendered.push('\n');
    let report_path = opts.out_dir.join("report.json");
    fs::write(&report_path, rendered).map_err(|e| DriverError {
        line: None,
        message: format!("write {}: {e}", report_path.display()),
    })?;
    let mut written = written;
    written.push(report_path);

    Ok(RunOutcome { pass, report: report_value, written })
}
