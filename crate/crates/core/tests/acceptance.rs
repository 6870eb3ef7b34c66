use std::time::{Duration, Instant};

use xmodkit::action::commutator_expansion_eval;
use xmodkit::condp::{compare_oracles, non_schreier_demo, pipeline_diagram_p, split_set_epis, theorem_p_transfer_check};
use xmodkit::corpus::{
    adjunction_pairs, no_section_fixture, pullback_fixtures, section_fixtures, split_sequences, sse_morphisms, xmod_candidates,
    Candidate,
};
use xmodkit::group::{abelian_group, cyclic_group, enumerate_homs, symmetric_group, trivial_group, Elem, FiniteGroup, GroupHom, DEFAULT_BUDGET};
use xmodkit::lifting::{brute_force_xmod_section, hom_bijection_check, projective_section, pullback_section, LiftConfig, LiftOutcome, LiftStep};
use xmodkit::words::{
    cosmash_preimage, embed_j, enumerate_cosmash_words, fold_s12, fold_s21, CosmashKind, Signature, Word, WordHom,
};
use xmodkit::xmod::{check_protoadditivity, pi0, pi0_via_coequalizer, CrossedModule, XModMorphism};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took <= limit, || format!("took {took:?}, limit {limit:?}"))
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

// Elementwise witnesses are recomputed from the raw tables.
fn witness_holds(c: &CrossedModule, precrossed: bool, (a, b): (Elem, Elem)) -> bool {
    let (t, g, d, act) = (c.t(), c.g(), c.boundary(), c.action());
    if precrossed {
        d.apply(act.act(a, b)) != g.mul(g.mul(a, d.apply(b)), g.inv(a))
    } else {
        act.act(d.apply(a), b) != t.mul(t.mul(a, b), t.inv(a))
    }
}

// Word-level witnesses are re-evaluated by commutator expansion, a route not
// used by the word-level checker.
fn word_witness_holds(c: &CrossedModule, precrossed: bool, word: &str) -> Result<bool, String> {
    let (t, g, d) = (c.t(), c.g(), c.boundary());
    if precrossed {
        let sig = Signature::new(vec![g.clone(), t.clone()]).map_err(e)?;
        let w = Word::parse(&sig, word).map_err(e)?;
        let lhs = w.letters().iter().fold(g.identity(), |acc, l| g.mul(acc, if l.slot == 0 { l.elem } else { d.apply(l.elem) }));
        let rhs = d.apply(commutator_expansion_eval(c.action(), &w).map_err(e)?);
        Ok(lhs != rhs)
    } else {
        let sig = Signature::new(vec![t.clone(), t.clone()]).map_err(e)?;
        let w = Word::parse(&sig, word).map_err(e)?;
        let rhs = w.letters().iter().fold(t.identity(), |acc, l| t.mul(acc, l.elem));
        let gsig = Signature::new(vec![g.clone(), t.clone()]).map_err(e)?;
        let moved = w.map(&gsig, &[0, 1], &[d.clone(), GroupHom::identity(t)]).map_err(e)?;
        let lhs = commutator_expansion_eval(c.action(), &moved).map_err(e)?;
        Ok(lhs != rhs)
    }
}

fn criterion_1(corpus: &[Candidate]) -> Outcome {
    let start = Instant::now();
    ensure(corpus.len() >= 50, || format!("corpus has {} candidates", corpus.len()))?;
    let violations = corpus.iter().filter(|c| !c.intended_valid).count();
    ensure(violations >= 5, || format!("{violations} violations"))?;
    let mut witnesses = 0;
    for c in corpus {
        let elem = c.xmod.check_axioms();
        let word = c.xmod.check_axioms_wordlevel(4, DEFAULT_BUDGET).map_err(e)?;
        ensure(elem.precrossed.passed == word.precrossed.passed() && elem.peiffer.passed == word.peiffer.passed(), || {
            format!("{}: elementwise {elem:?} vs word-level {word:?}", c.name)
        })?;
        ensure(elem.passed() == c.intended_valid, || format!("{}: verdict {} differs from construction", c.name, elem.passed()))?;
        for (precrossed, v) in [(true, &elem.precrossed), (false, &elem.peiffer)] {
            if let Some(w) = &v.witness {
                ensure(witness_holds(&c.xmod, precrossed, w.indices), || format!("{}: witness {w:?} does not violate", c.name))?;
                witnesses += 1;
            }
        }
        for (precrossed, v) in [(true, &word.precrossed), (false, &word.peiffer)] {
            if let Some(w) = &v.violation {
                ensure(word_witness_holds(&c.xmod, precrossed, &w.word)?, || format!("{}: word witness {} does not violate", c.name, w.word))?;
                witnesses += 1;
            }
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} candidates, {violations} violations, {witnesses} witnesses verified", corpus.len()))
}

fn criterion_2(corpus: &[Candidate]) -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut words = 0;
    let mut nonempty = 0;
    for c in corpus.iter().filter(|c| c.xmod.is_valid()) {
        let r = c.xmod.check_ternary(8, DEFAULT_BUDGET).map_err(e)?;
        ensure(r.passed(), || format!("{}: {:?}", c.name, r.audit.violation))?;
        checked += 1;
        words += r.audit.words_checked;
        nonempty += r.nonempty_words;
    }
    // the first nonempty ternary words have length 10
    let mut deep = 0;
    for c in corpus.iter().filter(|c| c.xmod.is_valid() && c.xmod.t().order() <= 3 && c.xmod.g().order() <= 3) {
        let r = c.xmod.check_ternary(10, DEFAULT_BUDGET).map_err(e)?;
        ensure(r.passed(), || format!("{} at length 10: {:?}", c.name, r.audit.violation))?;
        deep += r.nonempty_words;
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!(
        "{checked} crossed modules, {words} words at L=8 ({nonempty} nonempty), {deep} nonempty words at L=10"
    ))
}

fn criterion_3(corpus: &[Candidate]) -> Outcome {
    let mut agree = 0;
    let mut rejected = 0;
    for c in corpus {
        let via_cokernel = pi0(&c.xmod);
        let via_coequalizer = pi0_via_coequalizer(&c.xmod);
        match (via_cokernel, via_coequalizer) {
            (Ok((q, proj)), Ok(co)) => {
                // |G / ∂T| computed directly
                let image: std::collections::BTreeSet<Elem> = c.xmod.t().elements().map(|x| c.xmod.boundary().apply(x)).collect();
                ensure(q.order() * image.len() == c.xmod.g().order(), || format!("{}: |π₀| = {}", c.name, q.order()))?;
                ensure(co.iso.is_isomorphism(), || format!("{}: comparison is not bijective", c.name))?;
                let commutes = c.xmod.g().elements().all(|x| co.iso.apply(co.projection.apply(x)) == proj.apply(x));
                ensure(commutes, || format!("{}: comparison does not commute with projections", c.name))?;
                agree += 1;
            }
            // outside the crossed modules π₀ is undefined; a route may still compute a cokernel
            (Err(_), _) | (_, Err(_)) if !c.intended_valid => rejected += 1,
            (a, b) => return Err(format!("{}: cokernel {:?} vs coequalizer {:?}", c.name, a.is_ok(), b.is_ok())),
        }
    }
    ensure(agree + rejected == corpus.len(), || "corpus not covered".into())?;
    let sequences = split_sequences().map_err(e)?;
    ensure(sequences.len() >= 20, || format!("{} sequences", sequences.len()))?;
    for (i, s) in sequences.iter().enumerate() {
        s.validate().map_err(e)?;
        let r = check_protoadditivity(s).map_err(e)?;
        ensure(r.split_exact, || format!("sequence {i}: {:?}", r.failure))?;
        ensure(r.middle_order == r.kernel_order * r.quotient_order, || format!("sequence {i}: orders {r:?}"))?;
    }
    Ok(format!("{agree} agree, {rejected} violations rejected by at least one route, {} sequences protoadditive", sequences.len()))
}

fn criterion_4() -> Outcome {
    let morphisms = sse_morphisms(DEFAULT_BUDGET).map_err(e)?;
    ensure(morphisms.len() >= 100, || format!("{} morphisms", morphisms.len()))?;
    let mut epis = 0;
    for m in &morphisms {
        let onto = |h: &GroupHom| {
            let mut hit = vec![false; h.target().order()];
            h.source().elements().for_each(|x| hit[h.apply(x)] = true);
            hit.into_iter().all(|b| b)
        };
        let (f, g) = (onto(&m.f), onto(&m.g));
        ensure(f == g, || format!("f onto {f}, g onto {g}"))?;
        ensure(m.is_regular_epi().map_err(e)? == g, || "is_regular_epi disagrees".into())?;
        epis += usize::from(g);
    }
    Ok(format!("{} morphisms, {epis} regular epimorphisms, 0 exceptions", morphisms.len()))
}

fn section_composes(epi: &XModMorphism, section: &XModMorphism) -> bool {
    let t = epi.target.t().elements().all(|x| epi.f_t.apply(section.f_t.apply(x)) == x);
    let g = epi.target.g().elements().all(|x| epi.f_g.apply(section.f_g.apply(x)) == x);
    t && g
}

fn criterion_5(cfg: &LiftConfig) -> Outcome {
    let fixtures = section_fixtures().map_err(e)?;
    ensure(fixtures.len() >= 10, || format!("{} fixtures", fixtures.len()))?;
    let mut equations = 0;
    for f in &fixtures {
        match projective_section(&f.epi, &f.ext, cfg).map_err(|err| format!("{}: {err}", f.name))? {
            LiftOutcome::Certified(c) => {
                ensure(c.all_passed(), || format!("{}: {:?}", f.name, c.equations.iter().filter(|q| !q.passed).collect::<Vec<_>>()))?;
                ensure(section_composes(&f.epi, &c.section), || format!("{}: not a section", f.name))?;
                equations += c.equations.len();
            }
            other => return Err(format!("{}: {other:?}", f.name)),
        }
    }
    let neg = no_section_fixture().map_err(e)?;
    let out = projective_section(&neg.epi, &neg.ext, cfg).map_err(e)?;
    ensure(matches!(out, LiftOutcome::NoLift { step: LiftStep::EquivariantSection }), || format!("no-section fixture: {out:?}"))?;
    let brute = brute_force_xmod_section(&neg.epi, DEFAULT_BUDGET).map_err(e)?;
    ensure(brute.is_none(), || "exhaustive search found a section on the no-section fixture".into())?;
    Ok(format!("{} certified ({equations} equations), no-section fixture proven at the equivariant-section step", fixtures.len()))
}

fn criterion_6(cfg: &LiftConfig) -> Outcome {
    let fixtures = pullback_fixtures().map_err(e)?;
    ensure(fixtures.len() >= 10, || format!("{} fixtures", fixtures.len()))?;
    for (name, epi) in &fixtures {
        match pullback_section(epi, cfg).map_err(|err| format!("{name}: {err}"))? {
            LiftOutcome::Certified(c) => {
                ensure(c.all_passed(), || format!("{name}: failing equations"))?;
                let u = c.equation("regular-pushout").ok_or_else(|| format!("{name}: no comparison equation"))?;
                ensure(u.passed, || format!("{name}: comparison u not surjective"))?;
                ensure(section_composes(epi, &c.section), || format!("{name}: not a section"))?;
            }
            other => return Err(format!("{name}: {other:?}")),
        }
    }
    Ok(format!("{} instances certified, u surjective on every run", fixtures.len()))
}

// Homomorphisms counted by checking every map on every pair.
fn count_homs(h: &FiniteGroup, x: &FiniteGroup) -> usize {
    let (n, m) = (h.order(), x.order());
    let mut count = 0;
    let mut map = vec![0usize; n];
    loop {
        if map[h.identity()] == x.identity() && h.elements().all(|a| h.elements().all(|b| map[h.mul(a, b)] == x.mul(map[a], map[b]))) {
            count += 1;
        }
        let mut i = 0;
        while i < n {
            map[i] += 1;
            if map[i] < m {
                break;
            }
            map[i] = 0;
            i += 1;
        }
        if i == n {
            return count;
        }
    }
}

fn criterion_7() -> Outcome {
    let pairs = adjunction_pairs().map_err(e)?;
    let mut total = 0;
    for (h, xm) in &pairs {
        ensure(h.order() <= 4 && xm.t().order() <= 8 && xm.g().order() <= 8, || "pair out of range".into())?;
        let r = hom_bijection_check(h, xm, 6, DEFAULT_BUDGET).map_err(e)?;
        ensure(r.passed(), || format!("{} / {}: {r:?}", h.label(), xm.label()))?;
        let expected = count_homs(h, xm.t()) * count_homs(h, xm.g());
        ensure(r.pairs == expected, || format!("{} / {}: {} pairs, expected {expected}", h.label(), xm.label(), r.pairs))?;
        total += r.pairs;
    }
    Ok(format!("{} (H, xm) pairs, {total} morphisms, flat words to length 6", pairs.len()))
}

fn criterion_8(cfg: &LiftConfig) -> Outcome {
    let a = non_schreier_demo(7, 3, cfg).map_err(e)?;
    let b = non_schreier_demo(7, 3, cfg).map_err(e)?;
    let c = non_schreier_demo(19, 3, cfg).map_err(e)?;
    ensure(a.passed && c.passed, || format!("{a:?}"))?;
    ensure((a.t_order, a.g_order) == (16, 64), || format!("orders {} {}", a.t_order, a.g_order))?;
    ensure(a.projectivity.projective && a.projectivity.routes_agree, || "not relatively projective".into())?;
    ensure(a.free_shape.free_g_order == 256 && a.free_shape.cardinality_obstruction && !a.free_shape.free_shaped, || {
        format!("{:?}", a.free_shape)
    })?;
    ensure(a.stable_under_relabeling && c.stable_under_relabeling, || "verdict changed under relabeling".into())?;
    let (ja, jb) = (serde_json::to_string(&a).map_err(e)?, serde_json::to_string(&b).map_err(e)?);
    ensure(ja == jb, || "reruns differ".into())?;
    ensure((c.t_order, c.g_order, c.free_shape.free_shaped) == (16, 64, false), || "another seed changes the verdict".into())?;
    Ok(format!(
        "|T| = 16, |G| = 64, {} family epis certified, 16² = 256 ≠ 64, deterministic",
        a.projectivity.family_size
    ))
}

fn criterion_9(cfg: &LiftConfig) -> Outcome {
    let start = Instant::now();
    let modules = compare_oracles(64, DEFAULT_BUDGET).map_err(e)?;
    ensure(modules.len() >= 11, || format!("{} module classes", modules.len()))?;
    for m in &modules {
        ensure(m.agree, || format!("{}: structural {} lifting {}", m.module, m.structural, m.lifting))?;
        // a module of order n is projective iff its 2-torsion has order sqrt(n)
        ensure(m.lifting == (m.two_torsion * m.two_torsion == m.order), || format!("{}: oracle disagrees with 2-torsion count", m.module))?;
    }
    let epis = split_set_epis(3);
    for (f, s, y) in &epis {
        let r = pipeline_diagram_p(f, s, *y, cfg).map_err(e)?;
        ensure(r.passed, || format!("pipeline f = {f:?} s = {s:?}: {r:?}"))?;
    }
    let transfer = theorem_p_transfer_check(11, 32, cfg).map_err(e)?;
    ensure(transfer.instances.len() >= 30, || format!("{} sequences", transfer.instances.len()))?;
    ensure(transfer.passed && transfer.counterexamples == 0, || format!("{} counterexamples", transfer.counterexamples))?;
    within(start, Duration::from_secs(600))?;
    Ok(format!(
        "{} module classes agree, {} set epis, {} sequences with 0 counterexamples",
        modules.len(),
        epis.len(),
        transfer.instances.len()
    ))
}

fn same_word(a: &Word, b: &Word) -> bool {
    a.signature().same_as(b.signature()) && a.letters() == b.letters()
}

fn small_groups() -> Vec<FiniteGroup> {
    vec![
        trivial_group(),
        cyclic_group(2).unwrap(),
        cyclic_group(3).unwrap(),
        cyclic_group(4).unwrap(),
        abelian_group(&[2, 2]).unwrap(),
    ]
}

fn some_homs(a: &FiniteGroup, b: &FiniteGroup) -> Vec<GroupHom> {
    let mut hs = enumerate_homs(a, b, DEFAULT_BUDGET).unwrap();
    hs.truncate(3);
    hs
}

fn criterion_10() -> Outcome {
    let groups = small_groups();
    let mut words = 0;
    let mut nonempty = 0;
    for a in &groups {
        for b in &groups {
            for len in [8usize, 10] {
                if len == 10 && (a.order() > 3 || b.order() > 3) {
                    continue;
                }
                // S₂,₁ = ([1, 1] ⋄ 1) j over (A, A, B)
                let aab = Signature::new(vec![a.clone(), a.clone(), b.clone()]).map_err(e)?;
                let ab = Signature::new(vec![a.clone(), a.clone()]).map_err(e)?;
                let codiag = WordHom::new(&ab, vec![GroupHom::identity(a), GroupHom::identity(a)]).map_err(e)?;
                for w in enumerate_cosmash_words(&aab, len, CosmashKind::Ternary, DEFAULT_BUDGET).map_err(e)? {
                    words += 1;
                    nonempty += usize::from(!w.is_empty());
                    let folded = fold_s21(&w).map_err(e)?;
                    let regrouped = embed_j(&w).map_err(e)?.map(&codiag, &GroupHom::identity(b)).map_err(e)?;
                    ensure(folded.letters() == regrouped.letters(), || format!("S21 != ([1,1]⋄1)j on {w}"))?;
                    ensure(CosmashKind::Binary.contains(&folded).map_err(e)?, || format!("S21 {w} leaves the cosmash"))?;
                }
                // (f ⋄ g) S₁,₂ = S₁,₂ (f ⋄ g ⋄ g) over (A, B, B)
                let abb = Signature::new(vec![a.clone(), b.clone(), b.clone()]).map_err(e)?;
                let ws = enumerate_cosmash_words(&abb, len, CosmashKind::Ternary, DEFAULT_BUDGET).map_err(e)?;
                for a2 in &groups {
                    for b2 in &groups {
                        let sig3 = Signature::new(vec![a2.clone(), b2.clone(), b2.clone()]).map_err(e)?;
                        let sig2 = Signature::new(vec![a2.clone(), b2.clone()]).map_err(e)?;
                        for f in some_homs(a, a2) {
                            for g in some_homs(b, b2) {
                                for w in &ws {
                                    words += 1;
                                    let lhs = fold_s12(&w.map(&sig3, &[0, 1, 2], &[f.clone(), g.clone(), g.clone()]).map_err(e)?).map_err(e)?;
                                    let rhs = fold_s12(w).map_err(e)?.map(&sig2, &[0, 1], &[f.clone(), g.clone()]).map_err(e)?;
                                    ensure(same_word(&lhs, &rhs), || format!("S12 naturality fails on {w}"))?;
                                }
                            }
                        }
                    }
                }
                // ([f, g] ⋄ l) j = S₂,₁ (f ⋄ g ⋄ l) over (A, B, C) with f, g into D
                for c in &groups {
                    let abc = Signature::new(vec![a.clone(), b.clone(), c.clone()]).map_err(e)?;
                    let ws = enumerate_cosmash_words(&abc, len, CosmashKind::Ternary, DEFAULT_BUDGET).map_err(e)?;
                    for d in groups.iter().filter(|d| d.is_commutative()) {
                        let ab2 = Signature::new(vec![a.clone(), b.clone()]).map_err(e)?;
                        let ddc = Signature::new(vec![d.clone(), d.clone(), c.clone()]).map_err(e)?;
                        for f in some_homs(a, d) {
                            for g in some_homs(b, d) {
                                let fg = WordHom::new(&ab2, vec![f.clone(), g.clone()]).map_err(e)?;
                                for l in some_homs(c, c) {
                                    for w in &ws {
                                        words += 1;
                                        let lhs = embed_j(w).map_err(e)?.map(&fg, &l).map_err(e)?;
                                        let moved = w.map(&ddc, &[0, 1, 2], &[f.clone(), g.clone(), l.clone()]).map_err(e)?;
                                        let rhs = fold_s21(&moved).map_err(e)?;
                                        ensure(lhs.letters() == rhs.letters(), || format!("([f,g]⋄l)j != S21(f⋄g⋄l) on {w}"))?;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    // surjective slot maps lift every binary cosmash word of length at most 4
    let z2 = cyclic_group(2).unwrap();
    let z4 = cyclic_group(4).unwrap();
    let z3 = cyclic_group(3).unwrap();
    let z6 = cyclic_group(6).unwrap();
    let s3 = symmetric_group(3).unwrap();
    let v4 = abelian_group(&[2, 2]).unwrap();
    let sign = GroupHom::from_map(&s3, &z2, s3.elements().map(|x| usize::from(s3.elem_order(x) == 2)).collect()).map_err(e)?;
    let surjections = vec![
        GroupHom::identity(&z2),
        GroupHom::identity(&z3),
        GroupHom::from_generator_images(&z4, &z2, &[1], &[1]).map_err(e)?,
        GroupHom::from_generator_images(&z6, &z3, &[1], &[1]).map_err(e)?,
        GroupHom::from_map(&v4, &z2, vec![0, 1, 0, 1]).map_err(e)?,
        sign,
    ];
    let mut lifted = 0;
    for f in &surjections {
        for g in &surjections {
            let src = Signature::new(vec![f.source().clone(), g.source().clone()]).map_err(e)?;
            let dst = Signature::new(vec![f.target().clone(), g.target().clone()]).map_err(e)?;
            for w in enumerate_cosmash_words(&dst, 4, CosmashKind::Binary, DEFAULT_BUDGET).map_err(e)? {
                let pre = cosmash_preimage(&w, &src, f, g, DEFAULT_BUDGET).map_err(e)?.ok_or_else(|| format!("no preimage of {w}"))?;
                let back = pre.map(&dst, &[0, 1], &[f.clone(), g.clone()]).map_err(e)?;
                ensure(same_word(&back, &w), || format!("preimage {pre} of {w} maps to {back}"))?;
                let trivial_slots = (0..2).all(|s| {
                    let grp = src.factor(s);
                    pre.letters().iter().filter(|l| l.slot == s).fold(grp.identity(), |acc, l| grp.mul(acc, l.elem)) == grp.identity()
                });
                ensure(trivial_slots, || format!("preimage {pre} is not in the cosmash"))?;
                lifted += 1;
            }
        }
    }
    Ok(format!("{words} word identities ({nonempty} nonempty ternary words), {lifted}/{lifted} preimages found"))
}

fn main() {
    let cfg = LiftConfig::default();
    let corpus = xmod_candidates().expect("corpus builds");
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("axiom equivalence", Box::new(|| criterion_1(&corpus))),
        ("ternary redundancy", Box::new(|| criterion_2(&corpus))),
        ("pi0 consistency and protoadditivity", Box::new(|| criterion_3(&corpus))),
        ("split extension epimorphisms", Box::new(criterion_4)),
        ("projective section", Box::new(|| criterion_5(&cfg))),
        ("pullback section", Box::new(|| criterion_6(&cfg))),
        ("free crossed module adjunction", Box::new(criterion_7)),
        ("non-Schreier candidate", Box::new(|| criterion_8(&cfg))),
        ("condition (P) suite", Box::new(|| criterion_9(&cfg))),
        ("word calculus identities", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.2?}]", i + 1, start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{:.2?}]", i + 1, start.elapsed());
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
