//! Command-line front end: argument parsing, dispatch, and report emission.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::au::{au_distance, verify_sandwich, verify_star_ball_inclusions};
use crate::cover::{is_development, is_k_development, is_proper_cover, is_star_refinement};
use crate::document::{load, Instance, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::examples;
use crate::gauge::{decapitate, gauge_axioms_check, is_proper_gauge};
use crate::invariance::{
    default_exhaustion, default_targets, equiregularity_check, exhaustion_decomposition, is_invariant_cover,
    is_invariant_gauge, metrize, near_properness_check, near_properness_from_gauge, near_properness_horizon,
    proper_metrize, proper_metrize_horizon, saturate_cover, single_metrize, stone_star_refine, verify_refinement,
    Metrization, ProperMetrization, DEFAULT_DEPTH,
};
use crate::pointset::PointSet;
use crate::space::{hypothesis_report, orbit_quotient};
use crate::tunnels::{
    g_saturate_tunnels, is_invariant_tunnels, is_proper_tunnel_system, tunnel_distance, validate_tunnel_system,
    verify_tunnel_agreement, verify_tunnel_properness,
};
use crate::verdict::{Status, Verdict, Witness};

#[derive(Debug, Parser)]
#[command(name = "isometrize", version, about = "Invariant metrization of finitely presented spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Instance document (JSON), or the name of a built-in example.
    #[arg(long, global = true, value_name = "PATH")]
    pub instance: Option<PathBuf>,
    /// Number of refinement levels kept in each development.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    /// Most group elements to enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP, value_name = "SIZE")]
    pub cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Include distance matrices in the report.
    #[arg(long, global = true)]
    pub emit_matrix: bool,
    /// Write the pipeline step log to PATH.
    #[arg(long, global = true, value_name = "PATH")]
    pub emit_trace: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate an instance document.
    Validate,
    /// Chain distances of the document's developments.
    Au,
    /// Tunnel distances of the document's tunnel systems.
    Tunnel,
    /// Hypothesis checks: separation, equiregularity, near-properness, gauges.
    Check,
    /// Invariant gauges determining the topology.
    Metrize,
    /// Proper invariant gauges determining the topology and bornology.
    ProperMetrize,
    /// One invariant gauge determining the topology.
    SingleMetrize,
    /// Run the verification suite for a result.
    Verify {
        #[arg(value_enum)]
        id: TheoremId,
    },
    /// Run a built-in example and compare with its documented verdicts.
    Example {
        name: String,
        /// Only this check.
        #[arg(long)]
        check: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TheoremId {
    #[value(name = "thm2.1")]
    Thm2_1,
    #[value(name = "lem3.4")]
    Lem3_4,
    #[value(name = "thm3.3")]
    Thm3_3,
    #[value(name = "thm3.6")]
    Thm3_6,
    #[value(name = "thm3.7")]
    Thm3_7,
    #[value(name = "lem4.3")]
    Lem4_3,
    #[value(name = "lem5.1")]
    Lem5_1,
    #[value(name = "prop5.2")]
    Prop5_2,
    #[value(name = "thm1.1")]
    Thm1_1,
    #[value(name = "thm1.3")]
    Thm1_3,
}

#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub value: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub status: Status,
    pub sections: Vec<Section>,
}

impl Report {
    fn new(command: Vec<String>) -> Self {
        Report { command, status: Status::Pass, sections: Vec::new() }
    }

    fn verdict(&mut self, name: impl Into<String>, v: Verdict, value: Value) {
        self.status = match (self.status, v.status) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Indeterminate, _) | (_, Status::Indeterminate) => Status::Indeterminate,
            _ => Status::Pass,
        };
        self.sections.push(Section { name: name.into(), verdict: Some(v), value });
    }

    fn value(&mut self, name: impl Into<String>, value: Value) {
        self.sections.push(Section { name: name.into(), verdict: None, value });
    }

    pub fn exit_code(&self) -> i32 {
        if self.status == Status::Fail {
            2
        } else {
            0
        }
    }
}

/// What a run produced: the exit status and the bytes for each stream.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// A failed pipeline as a verdict carrying the witness and the error text.
fn error_verdict(e: &Error) -> Verdict {
    let w = match e {
        Error::NotNearlyProper { witness, .. }
        | Error::HypothesisFail { witness, .. }
        | Error::NotEquiregular(witness)
        | Error::NotSeparating(witness)
        | Error::NotInvariantGauge(witness)
        | Error::NotDevelopment(witness)
        | Error::InvalidTunnels(witness) => witness.clone(),
        _ => Witness::new("error"),
    };
    Verdict::fail(w.with("error", e.to_string()))
}

/// Errors that are verdicts about the input rather than operational faults.
fn is_verdict_error(e: &Error) -> bool {
    matches!(
        e,
        Error::NotNearlyProper { .. }
            | Error::HypothesisFail { .. }
            | Error::NotEquiregular(_)
            | Error::NotSeparating(_)
            | Error::NotInvariantGauge(_)
            | Error::NotDevelopment(_)
            | Error::InvalidTunnels(_)
    )
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome { code: 0, stdout: text, stderr: String::new() },
                _ => Outcome { code: 1, stdout: String::new(), stderr: text },
            };
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let stdout = match cli.format {
                Format::Machine => {
                    let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
                    s.push('\n');
                    s
                }
                Format::Human => render_human(&report),
            };
            Outcome { code: report.exit_code(), stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn echo(cli: &Cli) -> Vec<String> {
    let mut v = vec![match &cli.command {
        Command::Validate => "validate".to_string(),
        Command::Au => "au".into(),
        Command::Tunnel => "tunnel".into(),
        Command::Check => "check".into(),
        Command::Metrize => "metrize".into(),
        Command::ProperMetrize => "proper-metrize".into(),
        Command::SingleMetrize => "single-metrize".into(),
        Command::Verify { id } => format!("verify {}", id.to_possible_value().expect("named").get_name()),
        Command::Example { name, check } => match check {
            Some(c) => format!("example {name} --check {c}"),
            None => format!("example {name}"),
        },
    }];
    if let Some(p) = &cli.instance {
        v.push(format!("--instance {}", p.display()));
    }
    v.push(format!("--depth {}", cli.depth));
    v.push(format!("--cap {}", cli.cap));
    if cli.emit_matrix {
        v.push("--emit-matrix".into());
    }
    v
}

fn load_instance(cli: &Cli) -> Result<Instance> {
    let path = cli
        .instance
        .as_ref()
        .ok_or_else(|| Error::Usage("this command needs --instance PATH".into()))?;
    if !path.exists() {
        if let Some(name) = path.to_str().filter(|s| examples::NAMES.contains(s)) {
            return examples::instance(name, cli.cap);
        }
    }
    load(&std::fs::read_to_string(path)?, cli.cap)
}

fn write_trace(path: Option<&Path>, trace: Value) -> Result<()> {
    if let Some(p) = path {
        let mut s = serde_json::to_string_pretty(&trace).expect("traces serialize");
        s.push('\n');
        std::fs::write(p, s)?;
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<Report> {
    let mut r = Report::new(echo(cli));
    if let Command::Example { name, check } = &cli.command {
        example(&mut r, name, check.as_deref(), cli)?;
        return Ok(r);
    }
    let inst = load_instance(cli)?;
    let trace = cli.emit_trace.as_deref();
    match &cli.command {
        Command::Validate => validate(&mut r, &inst),
        Command::Au => au(&mut r, &inst, cli.emit_matrix)?,
        Command::Tunnel => tunnel(&mut r, &inst, cli.emit_matrix)?,
        Command::Check => check(&mut r, &inst),
        Command::Metrize => {
            let m = run_metrize(&inst, cli.depth);
            write_trace(trace, m.as_ref().map_or(Value::Null, |m| to_value(&m.trace)))?;
            metrize_sections(&mut r, &inst, m, cli.emit_matrix)?;
        }
        Command::ProperMetrize => {
            let pm = run_proper(&inst, cli.depth);
            write_trace(trace, pm.as_ref().map_or(Value::Null, |p| to_value(&p.trace)))?;
            proper_sections(&mut r, pm, cli.emit_matrix)?;
        }
        Command::SingleMetrize => single(&mut r, &inst, cli.depth, cli.emit_matrix)?,
        Command::Verify { id } => verify(&mut r, &inst, *id, cli.depth, trace)?,
        Command::Example { .. } => unreachable!("handled above"),
    }
    Ok(r)
}

fn example(r: &mut Report, name: &str, only: Option<&str>, cli: &Cli) -> Result<()> {
    let rep = examples::run(name, cli.depth, cli.cap)?;
    r.value("description", json!(rep.description));
    let mut any = false;
    for c in &rep.checks {
        if only.is_some_and(|o| o != c.check) {
            continue;
        }
        any = true;
        let reproduced = Verdict::from_bool(c.matches, || {
            Witness::new("example:verdict differs from the documented one")
                .with("expected", c.expect)
                .with("got", c.verdict.status)
        });
        r.verdict(c.check, reproduced, json!({ "expected": c.expect, "verdict": c.verdict }));
    }
    if !any {
        let known: Vec<&str> = rep.checks.iter().map(|c| c.check).collect();
        return Err(Error::Usage(format!(
            "example `{name}` has no check `{}`; known: {}",
            only.unwrap_or_default(),
            known.join(", ")
        )));
    }
    Ok(())
}

fn validate(r: &mut Report, inst: &Instance) {
    let s = &inst.space;
    r.verdict(
        "instance",
        Verdict::pass(),
        json!({
            "points": s.n(),
            "basis_sets": s.basis().len(),
            "discrete": s.is_discrete(),
            "bornology_directed": s.bornology().is_directed(),
            "frontier": s.frontier(),
            "group_generators": inst.group.generators().len(),
            "group_elements": inst.group.len(),
            "group_complete": inst.group.is_complete(),
            "orbits": inst.group.orbits(),
            "covers": inst.covers.len(),
            "developments": inst.developments.len(),
            "gauges": inst.gauges.len(),
            "tunnels": inst.tunnels.len(),
            "horizon_levels": inst.horizon.as_ref().map_or(0, |h| h.len()),
        }),
    );
    r.value("document", to_value(inst.to_document()));
}

fn need<T>(items: &[T], what: &str) -> Result<()> {
    if items.is_empty() {
        Err(Error::Usage(format!("the instance has no {what}")))
    } else {
        Ok(())
    }
}

fn au(r: &mut Report, inst: &Instance, matrix: bool) -> Result<()> {
    need(&inst.developments, "developments")?;
    for (name, dev) in &inst.developments {
        let valid = is_development(dev);
        let rho = match au_distance(dev) {
            Ok(rho) => rho,
            Err(e) => {
                r.verdict(format!("au:{name}"), error_verdict(&e), Value::Null);
                continue;
            }
        };
        let three = is_k_development(dev, 3).holds();
        let sandwich = verify_sandwich(&rho, dev);
        // The left inclusion is only promised for 3-developments.
        let mut v = valid.and(sandwich.right.clone());
        if three {
            v = v.and(sandwich.left.clone());
        }
        let mut value = json!({ "three_development": three, "sandwich": sandwich });
        if matrix {
            value["matrix"] = to_value(&rho);
        }
        r.verdict(format!("au:{name}"), v, value);
    }
    Ok(())
}

fn tunnel(r: &mut Report, inst: &Instance, matrix: bool) -> Result<()> {
    need(&inst.tunnels, "tunnel systems")?;
    for (name, t) in &inst.tunnels {
        let rho = inst.gauge_for_tunnels(name).expect("validated pairing");
        let report = validate_tunnel_system(rho, t);
        r.verdict(format!("tunnel:{name}:valid"), report.all(), to_value(&report));
        match tunnel_distance(rho, t) {
            Ok(sigma) => {
                r.verdict(format!("tunnel:{name}:proper"), is_proper_tunnel_system(t, &inst.space), Value::Null);
                let value = if matrix { to_value(&sigma) } else { Value::Null };
                r.verdict(format!("tunnel:{name}:sigma proper"), is_proper_gauge(&sigma, &inst.space), value);
            }
            Err(e) => r.verdict(format!("tunnel:{name}:sigma"), error_verdict(&e), Value::Null),
        }
    }
    Ok(())
}

fn check(r: &mut Report, inst: &Instance) {
    let (s, g) = (&inst.space, &inst.group);
    let q = orbit_quotient(s, g);
    let h = hypothesis_report(s, &q);
    r.verdict("quotient regular", h.quotient_regular.clone(), Value::Null);
    r.value("separation", to_value(&h));
    let er = equiregularity_check(s, g);
    r.verdict("equiregular", er.verdict.clone(), Value::Null);
    match &inst.horizon {
        Some(f) => {
            let np = near_properness_horizon(f);
            r.verdict("near-proper", np.verdict.clone(), json!({ "growth": np.growth }));
        }
        None => r.verdict("near-proper", near_properness_check(s, g), Value::Null),
    }
    for (name, c) in &inst.covers {
        r.verdict(format!("cover:{name}:invariant"), is_invariant_cover(g, c), Value::Null);
        r.verdict(format!("cover:{name}:proper"), is_proper_cover(c, s), Value::Null);
    }
    for (name, d) in &inst.developments {
        r.verdict(format!("development:{name}"), is_development(d), Value::Null);
    }
    for (name, rho) in &inst.gauges {
        r.verdict(format!("gauge:{name}:axioms"), gauge_axioms_check(rho, s, false).all(), Value::Null);
        r.verdict(format!("gauge:{name}:invariant"), is_invariant_gauge(g, rho), Value::Null);
        r.verdict(format!("gauge:{name}:proper"), is_proper_gauge(rho, s), Value::Null);
    }
}

fn targets(inst: &Instance) -> Vec<(usize, PointSet)> {
    inst.targets.clone().unwrap_or_else(|| default_targets(&inst.space))
}

fn run_metrize(inst: &Instance, depth: usize) -> Result<Metrization> {
    metrize(&inst.space, &inst.group, &targets(inst), depth)
}

/// Pipeline errors that are verdicts become failed sections; others abort.
fn settle<T>(r: &mut Report, name: &str, res: Result<T>) -> Result<Option<T>> {
    match res {
        Ok(t) => Ok(Some(t)),
        Err(e) if is_verdict_error(&e) => {
            r.verdict(name, error_verdict(&e), Value::Null);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn metrize_sections(r: &mut Report, inst: &Instance, m: Result<Metrization>, matrix: bool) -> Result<()> {
    let Some(m) = settle(r, "metrize", m)? else { return Ok(()) };
    let mut value = json!({
        "gauges": m.family.len(),
        "tags": m.family.tags(&inst.space),
        "targets": m.targets,
        "separating": m.separating,
    });
    if matrix {
        value["matrices"] = to_value(&m.family.gauges);
    }
    r.verdict("metrize", m.verified(), value);
    Ok(())
}

fn run_proper(inst: &Instance, depth: usize) -> Result<ProperMetrization> {
    if let Some(f) = &inst.horizon {
        return proper_metrize_horizon(f, depth);
    }
    let (s, g) = (&inst.space, &inst.group);
    let m = run_metrize(inst, depth)?;
    let d = inst.exhaustion.clone().unwrap_or_else(|| default_exhaustion(s, g));
    proper_metrize(s, g, &d, &m.family, depth)
}

fn proper_sections(r: &mut Report, pm: Result<ProperMetrization>, matrix: bool) -> Result<()> {
    let Some(pm) = settle(r, "proper-metrize", pm)? else { return Ok(()) };
    let mut value = json!({
        "gauges": pm.family.len(),
        "proper": pm.proper,
        "invariant": pm.invariant,
        "cover": pm.cover,
        "tunnels": pm.tunnels,
    });
    if matrix {
        value["sigma"] = to_value(&pm.sigma);
        value["tau"] = to_value(&pm.tau);
        value["matrices"] = to_value(&pm.family.gauges);
    }
    r.verdict("proper-metrize", pm.verified(), value);
    r.verdict("converse near-proper", pm.converse.clone(), Value::Null);
    Ok(())
}

fn single(r: &mut Report, inst: &Instance, depth: usize, matrix: bool) -> Result<()> {
    let Some(m) = settle(r, "metrize", run_metrize(inst, depth))? else { return Ok(()) };
    // Fold in a proper gauge when one exists, so the result also sees the
    // bornology.
    let proper = run_proper(inst, depth).ok().map(|p| p.family.gauges[0].clone());
    let Some(s) = settle(r, "single-metrize", single_metrize(&m.family, proper.as_ref()))? else { return Ok(()) };
    let v = s.same_topology.clone().and(is_invariant_gauge(&inst.group, &s.gauge));
    let mut value = json!({ "with_proper": proper.is_some() });
    if proper.is_some() {
        value["proper"] = to_value(is_proper_gauge(&s.gauge, &inst.space));
    }
    if matrix {
        value["matrix"] = to_value(&s.gauge);
    }
    r.verdict("single-metrize", v, value);
    Ok(())
}

/// Bornology probes plus singletons and the empty set.
fn sample_sets(inst: &Instance) -> Vec<PointSet> {
    let n = inst.space.n();
    let mut v = vec![PointSet::empty()];
    v.extend((0..n).map(PointSet::singleton));
    v.extend(inst.space.bornology().probes(n));
    v
}

fn verify(r: &mut Report, inst: &Instance, id: TheoremId, depth: usize, trace: Option<&Path>) -> Result<()> {
    let (s, g) = (&inst.space, &inst.group);
    match id {
        TheoremId::Thm2_1 | TheoremId::Lem3_4 | TheoremId::Thm3_3 => {
            need(&inst.developments, "developments")?;
            for (name, dev) in &inst.developments {
                let rho = match au_distance(dev) {
                    Ok(rho) => rho,
                    Err(e) => {
                        r.verdict(name.clone(), error_verdict(&e), Value::Null);
                        continue;
                    }
                };
                let three = is_k_development(dev, 3).holds();
                match id {
                    TheoremId::Thm2_1 => {
                        let sw = verify_sandwich(&rho, dev);
                        let v = if three { sw.both() } else { sw.right.clone() };
                        r.verdict(format!("sandwich:{name}"), v, json!({ "three_development": three, "report": sw }));
                    }
                    TheoremId::Lem3_4 => {
                        let rep = verify_star_ball_inclusions(&rho, dev, &sample_sets(inst), 3);
                        r.verdict(format!("star-ball:{name}"), rep.both(), to_value(&rep));
                    }
                    _ => {
                        // σ is proper exactly when the first level is.
                        let cover = is_proper_cover(dev.level(1), s);
                        let gauge = is_proper_gauge(&rho, s);
                        let decap = is_proper_gauge(&decapitate(&rho), s);
                        let agree = cover.holds() == gauge.holds() && gauge.holds() == decap.holds();
                        let v = Verdict::from_bool(!three || agree, || {
                            Witness::new("proper development:cover and gauge disagree")
                                .with("cover", cover.status)
                                .with("gauge", gauge.status)
                        });
                        r.verdict(
                            format!("proper-development:{name}"),
                            v,
                            json!({ "three_development": three, "cover_proper": cover, "gauge_proper": gauge, "decapitated_proper": decap }),
                        );
                    }
                }
            }
        }
        TheoremId::Thm3_6 | TheoremId::Thm3_7 | TheoremId::Lem4_3 => {
            need(&inst.tunnels, "tunnel systems")?;
            for (name, t) in &inst.tunnels {
                let rho = inst.gauge_for_tunnels(name).expect("validated pairing");
                if id == TheoremId::Lem4_3 {
                    let Some(gt) = settle(r, &format!("saturation:{name}"), g_saturate_tunnels(g, rho, t, s))? else {
                        continue;
                    };
                    let again = g_saturate_tunnels(g, rho, &gt, s)?;
                    let idem = Verdict::from_bool(again == gt, || Witness::new("saturation:not idempotent"));
                    let v = validate_tunnel_system(rho, &gt)
                        .all()
                        .and(is_invariant_tunnels(g, &gt))
                        .and(is_proper_tunnel_system(&gt, s))
                        .and(idem);
                    r.verdict(format!("saturation:{name}"), v, json!({ "tunnels": gt }));
                    continue;
                }
                let Some(sigma) = settle(r, &format!("tunnels:{name}"), tunnel_distance(rho, t))? else { continue };
                if id == TheoremId::Thm3_6 {
                    let rep = verify_tunnel_agreement(rho, t, &sigma, s);
                    r.verdict(format!("agreement:{name}"), rep.all(), to_value(&rep));
                } else {
                    let rep = verify_tunnel_properness(rho, t, &sigma, s, 4);
                    let bic = Verdict::from_bool(rep.biconditional, || {
                        Witness::new("tunnel properness:biconditional broken")
                            .with("sigma", rep.sigma_proper.status)
                            .with("rho", rep.rho_proper.status)
                            .with("tunnels", rep.tunnels_proper.status)
                    });
                    let v = bic
                        .and(rep.covering_inclusion.clone())
                        .and(rep.rho_balls_inside.clone())
                        .and(rep.tunnels_inside.clone());
                    r.verdict(format!("properness:{name}"), v, to_value(&rep));
                }
            }
        }
        TheoremId::Lem5_1 => {
            let covers: Vec<(String, crate::cover::Cover)> = if inst.covers.is_empty() {
                let mn = crate::cover::Cover::new((0..s.n()).map(|x| s.min_nbhd(x)));
                vec![("saturated minimal neighbourhoods".into(), saturate_cover(g, &mn))]
            } else {
                inst.covers.clone()
            };
            for (name, u) in covers {
                let Some(sr) = settle(r, &format!("refinement:{name}"), stone_star_refine(s, g, &u))? else { continue };
                let v = verify_refinement(s, g, &sr.cover, &u).and(is_star_refinement(&sr.cover, &u, 1));
                r.verdict(format!("refinement:{name}"), v.qualified(sr.qualified), json!({ "cover": sr.cover, "trace": sr.trace }));
            }
        }
        TheoremId::Prop5_2 => {
            let q = orbit_quotient(s, g);
            let d = inst.exhaustion.clone().unwrap_or_else(|| default_exhaustion(s, g));
            let dec = exhaustion_decomposition(q.space(), &d)?;
            r.verdict("decomposition", dec.checks.all(), to_value(&dec));
        }
        TheoremId::Thm1_1 => {
            let er = equiregularity_check(s, g);
            let m = run_metrize(inst, depth);
            write_trace(trace, m.as_ref().map_or(Value::Null, |m| to_value(&m.trace)))?;
            let coherent = er.verdict.holds() == m.is_ok();
            r.verdict(
                "coherence",
                Verdict::from_bool(coherent, || {
                    Witness::new("metrize:disagrees with equiregularity")
                        .with("equiregular", er.verdict.status)
                        .with("metrize", m.as_ref().err().map(|e| e.to_string()))
                }),
                json!({ "equiregular": er.verdict }),
            );
            if let Ok(m) = m {
                r.verdict("outputs", m.verified(), json!({ "targets": m.targets }));
            }
        }
        TheoremId::Thm1_3 => {
            let er = equiregularity_check(s, g);
            let np = match &inst.horizon {
                Some(f) => near_properness_horizon(f).verdict,
                None => near_properness_check(s, g),
            };
            let pm = run_proper(inst, depth);
            write_trace(trace, pm.as_ref().map_or(Value::Null, |p| to_value(&p.trace)))?;
            let expected = er.verdict.holds() && np.holds();
            // Bornologies that are not closed under unions sit outside the
            // model; the pipeline rejects them up front.
            let outside = !s.bornology().is_directed();
            let coherent = outside || expected == pm.is_ok();
            r.verdict(
                "coherence",
                Verdict::from_bool(coherent, || {
                    Witness::new("proper-metrize:disagrees with the hypothesis checks")
                        .with("equiregular", er.verdict.status)
                        .with("near_proper", np.status)
                        .with("proper_metrize", pm.as_ref().err().map(|e| e.to_string()))
                }),
                json!({ "equiregular": er.verdict, "near_proper": np, "directed_bornology": !outside }),
            );
            if let Ok(pm) = pm {
                r.verdict("outputs", pm.verified(), json!({ "proper": pm.proper, "invariant": pm.invariant }));
                r.verdict("converse near-proper", pm.converse.clone(), Value::Null);
            }
            for (name, rho) in &inst.gauges {
                if is_proper_gauge(rho, s).holds() && is_invariant_gauge(g, rho).holds() {
                    r.verdict(format!("converse:{name}"), near_properness_from_gauge(s, g, rho), Value::Null);
                }
            }
        }
    }
    Ok(())
}

/// Tabular rendering: one line per section, then indented details.
pub fn render_human(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "$ {}", report.command.join(" "));
    let width = report.sections.iter().map(|s| s.name.chars().count()).max().unwrap_or(0);
    for s in &report.sections {
        let Some(v) = &s.verdict else {
            if s.value.is_object() || is_matrix(&s.value) {
                let _ = writeln!(out, "{}:", s.name);
                render_value(&mut out, &s.value, 4);
            } else {
                let text = s.value.as_str().map_or_else(|| s.value.to_string(), str::to_string);
                let _ = writeln!(out, "{:<width$}  {text}", s.name);
            }
            continue;
        };
        let _ = writeln!(out, "{:<width$}  {}", s.name, status_label(v));
        if let Some(w) = &v.witness {
            let _ = writeln!(out, "    witness: {w}");
        }
        render_value(&mut out, &s.value, 4);
    }
    let _ = writeln!(out, "status: {}", status_name(report.status));
    out
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Indeterminate => "INDETERMINATE",
    }
}

fn status_label(v: &Verdict) -> String {
    let mut s = status_name(v.status).to_string();
    if v.qualified {
        s.push_str(" (capped group)");
    }
    s
}

fn is_matrix(v: &Value) -> bool {
    matches!(v, Value::Array(rows) if !rows.is_empty()
        && rows.iter().all(|r| matches!(r, Value::Array(c) if c.iter().all(|x| x.is_string()))))
}

fn render_value(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Null => {}
        Value::Object(map) => {
            for (k, x) in map {
                if is_matrix(x) {
                    let _ = writeln!(out, "{pad}{k}:");
                    render_matrix(out, x, indent + 2);
                } else if x.is_object() {
                    let _ = writeln!(out, "{pad}{k}:");
                    render_value(out, x, indent + 2);
                } else {
                    let _ = writeln!(out, "{pad}{k}: {x}");
                }
            }
        }
        x if is_matrix(x) => render_matrix(out, x, indent),
        x => {
            let _ = writeln!(out, "{pad}{x}");
        }
    }
}

fn render_matrix(out: &mut String, m: &Value, indent: usize) {
    let rows: Vec<Vec<&str>> = m
        .as_array()
        .expect("matrix")
        .iter()
        .map(|r| r.as_array().expect("row").iter().map(|x| x.as_str().expect("cell")).collect())
        .collect();
    let width = rows.iter().flatten().map(|c| c.len()).max().unwrap_or(1);
    for r in rows {
        let cells: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(out, "{}{}", " ".repeat(indent), cells.join(" "));
    }
}
