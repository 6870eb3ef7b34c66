use serde_json::{json, Value};

use xmodkit::condp::{
    compare_oracles, non_schreier_demo, pi0_preservation_suite, pipeline_diagram_p, split_set_epis, theorem_p_transfer_check,
};
use xmodkit::corpus::{no_section_fixture, pullback_fixtures, section_fixtures, split_sequences, sse_morphisms, xmod_candidates};
use xmodkit::error::Error;
use xmodkit::lifting::{
    brute_force_xmod_section, normal_inclusion_extension, projective_section, pullback_section, LiftConfig, LiftOutcome, LiftStep,
};
use xmodkit::xmod::{check_protoadditivity, pi0, pi0_via_coequalizer, CrossedModule, Verdict as AxiomVerdict, XModMorphism};

use crate::defs::{inputs_digest, Definitions, Input};
use crate::{CliError, Report, Verdict, TOOL_VERSION};

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub budget: u64,
    pub ternary_len: usize,
    pub seed: u64,
}

impl Options {
    fn lift_config(&self) -> LiftConfig {
        LiftConfig { budget: self.budget, ternary_len: self.ternary_len, ..LiftConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    ProjectiveSection,
    PullbackSection,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ProjectiveSection => "projective-section",
            Algorithm::PullbackSection => "pullback-section",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CondP {
    Z4Pipeline,
    NonSchreier,
    Transfer,
    Preservation,
    Modules,
}

fn report(command: String, digest: String, seed: Option<u64>, verdict: Verdict, summary: Vec<String>, results: Value) -> Report {
    Report { command, tool_version: TOOL_VERSION, inputs_digest: digest, seed, verdict, summary, results, timing_ms: None }
}

fn xmod<'a>(defs: &'a Definitions, name: &str) -> Result<&'a CrossedModule, CliError> {
    defs.xmods.get(name).ok_or_else(|| CliError::Usage(format!("no xmod named `{name}` in the definition file")))
}

fn morphism<'a>(defs: &'a Definitions, name: &str) -> Result<&'a XModMorphism, CliError> {
    defs.morphisms.get(name).ok_or_else(|| CliError::Usage(format!("no morphism named `{name}` in the definition file")))
}

fn pass_fail(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

fn axiom_line(what: &str, v: &AxiomVerdict) -> String {
    match &v.witness {
        None => format!("{what}: pass"),
        Some(w) => format!("{what}: FAIL at ({}, {}): {} != {}", w.first, w.second, w.lhs, w.rhs),
    }
}

fn check_xmod(xm: &CrossedModule, opts: &Options) -> Result<(Verdict, Vec<String>, Value), CliError> {
    let axioms = xm.check_axioms();
    let word = xm.check_axioms_wordlevel(4, opts.budget)?;
    let ternary = if axioms.passed() { Some(xm.check_ternary(opts.ternary_len, opts.budget)?) } else { None };
    let consistent = axioms.precrossed.passed == word.precrossed.passed() && axioms.peiffer.passed == word.peiffer.passed();
    let mut summary = vec![axiom_line("precrossed", &axioms.precrossed), axiom_line("peiffer", &axioms.peiffer)];
    summary.push(format!(
        "word level (length {}): {} on {} + {} words",
        word.max_len,
        pass_fail(word.passed()),
        word.precrossed.words_checked,
        word.peiffer.words_checked
    ));
    if let Some(t) = &ternary {
        summary.push(format!(
            "ternary (length {}): {} on {} words, {} nonempty",
            t.max_len,
            pass_fail(t.passed()),
            t.audit.words_checked,
            t.nonempty_words
        ));
    }
    if !consistent {
        summary.push("elementwise and word-level verdicts DISAGREE".into());
    }
    let passed = axioms.passed() && word.passed() && ternary.as_ref().is_none_or(|t| t.passed()) && consistent;
    let results = json!({
        "xmod": xm.label(),
        "t_order": xm.t().order(),
        "g_order": xm.g().order(),
        "axioms": axioms,
        "word_level": word,
        "ternary": ternary,
        "routes_consistent": consistent,
    });
    Ok((Verdict::from_bool(passed), summary, results))
}

pub fn check(defs: &Definitions, name: &str, opts: &Options) -> Result<Report, CliError> {
    let xm = xmod(defs, name)?;
    let digest = inputs_digest(&[(name, Input::XMod(xm)), ("ternary-len", Input::Param("L", opts.ternary_len.to_string()))]);
    let (verdict, summary, results) = check_xmod(xm, opts)?;
    Ok(report(format!("check {name}"), digest, None, verdict, summary, results))
}

pub fn pi0_cmd(defs: &Definitions, name: &str) -> Result<Report, CliError> {
    let xm = xmod(defs, name)?;
    let digest = inputs_digest(&[(name, Input::XMod(xm))]);
    let axioms = xm.check_axioms();
    if !axioms.passed() {
        let summary = vec![axiom_line("precrossed", &axioms.precrossed), axiom_line("peiffer", &axioms.peiffer), "π₀ is defined on crossed modules only".into()];
        return Ok(report(format!("pi0 {name}"), digest, None, Verdict::Fail, summary, json!({ "axioms": axioms })));
    }
    let (q, proj) = pi0(xm)?;
    let mut cosets = vec![Vec::new(); q.order()];
    for x in xm.g().elements() {
        cosets[proj.apply(x)].push(xm.g().name(x).to_string());
    }
    let agrees = match pi0_via_coequalizer(xm) {
        Ok(co) => co.iso.is_isomorphism(),
        Err(Error::InvariantBreach(_)) => false,
        Err(e) => return Err(e.into()),
    };
    let summary = vec![
        format!("π₀ has order {}{}", q.order(), if q.is_commutative() { ", commutative" } else { "" }),
        format!("coequalizer presentation: {}", if agrees { "isomorphic" } else { "DIFFERS" }),
    ];
    let results = json!({
        "xmod": xm.label(),
        "order": q.order(),
        "commutative": q.is_commutative(),
        "cosets": cosets,
        "coequalizer_agrees": agrees,
    });
    Ok(report(format!("pi0 {name}"), digest, None, Verdict::from_bool(agrees), summary, results))
}

fn outcome_json(o: &LiftOutcome) -> (Verdict, String, Value) {
    match o {
        LiftOutcome::Certified(c) => {
            let failed: Vec<&str> = c.equations.iter().filter(|q| !q.passed).map(|q| q.label.as_str()).collect();
            let line = if failed.is_empty() {
                format!("certified: {} equations hold", c.equations.len())
            } else {
                format!("certificate FAILS on {}", failed.join(", "))
            };
            (Verdict::from_bool(c.all_passed()), line, json!({ "outcome": "certified", "certificate": c.to_json() }))
        }
        LiftOutcome::NoLift { step } => {
            (Verdict::Fail, format!("no section: {}", step.message()), json!({ "outcome": "no-lift", "step": format!("{step:?}"), "reason": step.message() }))
        }
        LiftOutcome::BudgetExhausted { step } => (
            Verdict::BudgetExhausted,
            format!("budget exhausted at {step:?}"),
            json!({ "outcome": "budget-exhausted", "step": format!("{step:?}") }),
        ),
    }
}

fn lift_one(epi: &XModMorphism, algorithm: Algorithm, cfg: &LiftConfig) -> Result<LiftOutcome, CliError> {
    match algorithm {
        Algorithm::PullbackSection => Ok(pullback_section(epi, cfg)?),
        Algorithm::ProjectiveSection => {
            let ext = normal_inclusion_extension(&epi.target, cfg.budget)
                .map_err(|e| match e {
                    Error::Precondition(m) => CliError::Usage(format!("projective-section: {m}")),
                    other => other.into(),
                })?
                .ok_or_else(|| CliError::Usage("projective-section: the target's quotient map has no section".into()))?;
            Ok(projective_section(epi, &ext, cfg)?)
        }
    }
}

pub fn lift(defs: &Definitions, epi: &str, algorithm: Algorithm, opts: &Options) -> Result<Report, CliError> {
    let m = morphism(defs, epi)?;
    let digest = inputs_digest(&[(epi, Input::Morphism(m)), ("algorithm", Input::Param("a", algorithm.name().into()))]);
    let out = lift_one(m, algorithm, &opts.lift_config())?;
    let (verdict, line, results) = outcome_json(&out);
    Ok(report(format!("lift {epi} --algorithm {}", algorithm.name()), digest, None, verdict, vec![line], results))
}

/// Runs the algorithm on every epimorphism of a family and compares with exhaustive search.
pub fn lift_family(defs: &Definitions, family: &str, algorithm: Algorithm, opts: &Options) -> Result<Report, CliError> {
    let names = defs.families.get(family).ok_or_else(|| CliError::Usage(format!("no family named `{family}`")))?;
    let cfg = opts.lift_config();
    let mut inputs = vec![("algorithm", Input::Param("a", algorithm.name().into()))];
    let mut verdict = Verdict::Pass;
    let mut summary = Vec::new();
    let mut members = Vec::new();
    for n in names {
        let m = morphism(defs, n)?;
        inputs.push((n.as_str(), Input::Morphism(m)));
        let out = lift_one(m, algorithm, &cfg)?;
        let brute = match brute_force_xmod_section(m, opts.budget) {
            Ok(s) => Some(s.is_some()),
            Err(Error::BudgetExhausted(_)) => None,
            Err(e) => return Err(e.into()),
        };
        let (v, line, mut res) = outcome_json(&out);
        let agree = brute.is_none_or(|b| b == out.certificate().is_some());
        verdict = verdict.and(v).and(Verdict::from_bool(agree));
        summary.push(format!("{n}: {line}; exhaustive search {}", match brute {
            Some(true) => "finds a section",
            Some(false) => "finds none",
            None => "ran out of budget",
        }));
        res["name"] = json!(n);
        res["exhaustive_section"] = json!(brute);
        members.push(res);
    }
    let digest = inputs_digest(&inputs);
    Ok(report(format!("lift --family {family} --algorithm {}", algorithm.name()), digest, None, verdict, summary, json!({ "members": members })))
}

pub fn condp(sub: CondP, defs: Option<&Definitions>, setmap: Option<&str>, count: Option<usize>, opts: &Options) -> Result<Report, CliError> {
    let cfg = opts.lift_config();
    let seed = opts.seed;
    type Run = (&'static str, bool, Vec<String>, Value, Vec<(String, String)>);
    let (name, verdict, summary, results, inputs): Run = match sub {
        CondP::Z4Pipeline => {
            let epis: Vec<(Vec<usize>, Vec<usize>, usize)> = match (defs, setmap) {
                (Some(d), Some(n)) => {
                    let s = d.setmaps.get(n).ok_or_else(|| CliError::Usage(format!("no setmap named `{n}`")))?;
                    vec![(s.f.clone(), s.s.clone(), s.y)]
                }
                (None, Some(_)) => return Err(CliError::Usage("--set-map needs a definition file".into())),
                _ => split_set_epis(3),
            };
            let mut reports = Vec::new();
            let mut summary = Vec::new();
            for (f, s, y) in &epis {
                let r = pipeline_diagram_p(f, s, *y, &cfg)?;
                summary.push(format!("f = {f:?}, s = {s:?}: {}", pass_fail(r.passed)));
                reports.push(r);
            }
            let ok = reports.iter().all(|r| r.passed);
            let inputs = epis.iter().map(|(f, s, y)| ("setmap".to_string(), format!("{f:?}{s:?}{y}"))).collect();
            ("z4-pipeline", ok, summary, serde_json::to_value(&reports).expect("serializable"), inputs)
        }
        CondP::NonSchreier => {
            let r = non_schreier_demo(seed, 2, &cfg)?;
            let summary = vec![
                format!("candidate: |T| = {}, |G| = {}", r.t_order, r.g_order),
                format!(
                    "relatively projective on {} family epis: {}",
                    r.projectivity.family_size,
                    pass_fail(r.projectivity.projective && r.projectivity.routes_agree)
                ),
                format!("free shape rejected: |T|² = {} ≠ {}", r.free_shape.free_g_order, r.g_order),
                format!("stable under {} relabelings: {}", r.relabelings, pass_fail(r.stable_under_relabeling)),
            ];
            ("non-schreier", r.passed, summary, serde_json::to_value(&r).expect("serializable"), vec![])
        }
        CondP::Transfer => {
            let n = count.unwrap_or(32);
            let r = theorem_p_transfer_check(seed, n, &cfg)?;
            let summary = vec![
                format!("{} split exact sequences, {} with projective middle", r.instances.len(), r.middle_projective),
                format!("{} counterexamples", r.counterexamples),
                format!("discrete embeddings consistent: {}", pass_fail(r.discrete_consistent)),
            ];
            ("transfer", r.passed, summary, serde_json::to_value(&r).expect("serializable"), vec![("count".into(), n.to_string())])
        }
        CondP::Preservation => {
            let n = count.unwrap_or(20);
            let r = pi0_preservation_suite(seed, n, &cfg)?;
            let summary = vec![
                format!("π₀ of {} projective crossed modules: {} failures", r.projective_checked, r.projective_failures.len()),
                format!("{} discrete objects, {} controls rejected", r.discrete_checked, r.controls_rejected),
                format!("{} sequences sequentially right exact: {}", r.sequences.len(), pass_fail(r.sequences.iter().all(|s| s.passed))),
            ];
            ("preservation", r.passed, summary, serde_json::to_value(&r).expect("serializable"), vec![("count".into(), n.to_string())])
        }
        CondP::Modules => {
            let n = count.unwrap_or(64);
            let r = compare_oracles(n, opts.budget)?;
            let ok = r.iter().all(|m| m.agree);
            let summary = r.iter().map(|m| format!("{} (order {}): projective {}, oracles {}", m.module, m.order, m.lifting, if m.agree { "agree" } else { "DISAGREE" })).collect();
            ("modules", ok, summary, serde_json::to_value(&r).expect("serializable"), vec![("max-order".into(), n.to_string())])
        }
    };
    let mut params: Vec<(&str, Input)> = vec![("subcommand", Input::Param("c", name.into()))];
    for (k, v) in &inputs {
        params.push((k.as_str(), Input::Param("p", v.clone())));
    }
    let digest = inputs_digest(&params);
    Ok(report(format!("condp {name}"), digest, Some(seed), Verdict::from_bool(verdict), summary, results))
}

/// With definitions, checks every crossed module and lifts every morphism
/// onto an injective target; without, audits the built-in corpus.
pub fn audit(defs: Option<&Definitions>, opts: &Options) -> Result<Report, CliError> {
    match defs {
        Some(d) => audit_file(d, opts),
        None => audit_corpus(opts),
    }
}

fn audit_file(defs: &Definitions, opts: &Options) -> Result<Report, CliError> {
    let mut verdict = Verdict::Pass;
    let mut summary = Vec::new();
    let mut results = serde_json::Map::new();
    let mut inputs = Vec::new();
    for (n, xm) in &defs.xmods {
        inputs.push((n.as_str(), Input::XMod(xm)));
        let (v, _, r) = check_xmod(xm, opts)?;
        summary.push(format!("xmod {n}: {}", pass_fail(v == Verdict::Pass)));
        verdict = verdict.and(v);
        results.insert(format!("xmod {n}"), r);
    }
    let cfg = opts.lift_config();
    for (n, m) in &defs.morphisms {
        inputs.push((n.as_str(), Input::Morphism(m)));
        let liftable = m.target.boundary().is_injective() && m.is_levelwise_surjective();
        if !liftable {
            continue;
        }
        let out = lift_one(m, Algorithm::ProjectiveSection, &cfg)?;
        let (v, line, r) = outcome_json(&out);
        summary.push(format!("morphism {n}: {line}"));
        verdict = verdict.and(v);
        results.insert(format!("morphism {n}"), r);
    }
    let digest = inputs_digest(&inputs);
    Ok(report("audit".into(), digest, None, verdict, summary, Value::Object(results)))
}

fn audit_corpus(opts: &Options) -> Result<Report, CliError> {
    let cfg = opts.lift_config();
    let mut lines: Vec<(String, bool)> = Vec::new();
    let corpus = xmod_candidates()?;
    let mut agree = 0;
    let mut ternary_ok = 0;
    let mut pi0_ok = 0;
    let valid: Vec<_> = corpus.iter().filter(|c| c.xmod.is_valid()).collect();
    for c in &corpus {
        let a = c.xmod.check_axioms();
        let w = c.xmod.check_axioms_wordlevel(4, opts.budget)?;
        agree += usize::from(a.precrossed.passed == w.precrossed.passed() && a.peiffer.passed == w.peiffer.passed());
    }
    for c in &valid {
        ternary_ok += usize::from(c.xmod.check_ternary(opts.ternary_len, opts.budget)?.passed());
        pi0_ok += usize::from(pi0_via_coequalizer(&c.xmod).is_ok());
    }
    lines.push((format!("axiom routes agree on {agree}/{} candidates", corpus.len()), agree == corpus.len()));
    lines.push((format!("ternary condition at length {} on {ternary_ok}/{} crossed modules", opts.ternary_len, valid.len()), ternary_ok == valid.len()));
    lines.push((format!("π₀ presentations agree on {pi0_ok}/{}", valid.len()), pi0_ok == valid.len()));
    let seqs = split_sequences()?;
    let proto = seqs.iter().map(|s| check_protoadditivity(s).map(|r| r.split_exact)).collect::<Result<Vec<_>, _>>()?;
    let proto_ok = proto.iter().filter(|&&b| b).count();
    lines.push((format!("π₀ protoadditive on {proto_ok}/{} split sequences", seqs.len()), proto_ok == seqs.len()));
    let sse = sse_morphisms(opts.budget)?;
    let lemma = sse.iter().filter(|m| m.f.is_surjective() == m.g.is_surjective()).count();
    lines.push((format!("kernel surjective iff total surjective on {lemma}/{} split extension morphisms", sse.len()), lemma == sse.len()));
    let fixtures = section_fixtures()?;
    let mut certified = 0;
    for f in &fixtures {
        certified += usize::from(projective_section(&f.epi, &f.ext, &cfg)?.certificate().is_some_and(|c| c.all_passed()));
    }
    let neg = no_section_fixture()?;
    let neg_ok = matches!(projective_section(&neg.epi, &neg.ext, &cfg)?, LiftOutcome::NoLift { step: LiftStep::EquivariantSection });
    lines.push((format!("projective section certified on {certified}/{} epis", fixtures.len()), certified == fixtures.len()));
    lines.push(("no-section fixture rejected at the equivariant-section step".into(), neg_ok));
    let pb = pullback_fixtures()?;
    let mut pb_ok = 0;
    for (_, e) in &pb {
        pb_ok += usize::from(pullback_section(e, &cfg)?.certificate().is_some_and(|c| c.all_passed()));
    }
    lines.push((format!("pullback section certified on {pb_ok}/{} module epis", pb.len()), pb_ok == pb.len()));
    let transfer = theorem_p_transfer_check(opts.seed, 8, &cfg)?;
    lines.push((format!("condition (P) transfer: {} counterexamples on {} sequences", transfer.counterexamples, transfer.instances.len()), transfer.passed));
    let passed = lines.iter().all(|(_, b)| *b);
    let results = json!(lines.iter().map(|(l, b)| json!({ "check": l, "passed": b })).collect::<Vec<_>>());
    let summary = lines.iter().map(|(l, b)| format!("{}: {l}", pass_fail(*b))).collect();
    let digest = inputs_digest(&[("corpus", Input::Param("seed", opts.seed.to_string())), ("ternary-len", Input::Param("L", opts.ternary_len.to_string()))]);
    Ok(report("audit".into(), digest, Some(opts.seed), Verdict::from_bool(passed), summary, results))
}
