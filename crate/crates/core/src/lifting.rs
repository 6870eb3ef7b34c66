//! Section constructions for regular epimorphisms of crossed modules, and
//! the universal morphism out of a free crossed module.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::action::{action_from_extension, GroupAction, SplitExtension};
use crate::error::{Error, Result};
use crate::group::{enumerate_homs, lift_through, pullback, Elem, FiniteGroup, GroupHom, HomSearch, SearchOutcome};
use crate::words::{
    embed_j, enumerate_cosmash_words, in_flat, CosmashKind, Letter, Signature, Word, WordHom, DEFAULT_AUDIT_LEN,
};
use crate::xmod::{pi0_map, CrossedModule, XModMorphism};

/// Search and audit bounds shared by the constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftConfig {
    pub budget: u64,
    pub binary_len: usize,
    pub ternary_len: usize,
}

impl Default for LiftConfig {
    fn default() -> Self {
        LiftConfig { budget: crate::group::DEFAULT_BUDGET, binary_len: 4, ternary_len: DEFAULT_AUDIT_LEN }
    }
}

/// One verified equation of a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equation {
    pub label: String,
    pub passed: bool,
    /// number of elements or words the equation was checked on
    pub instances: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionCertificate {
    pub construction: String,
    pub equations: Vec<Equation>,
    /// each constructed map as `(argument, value)` name pairs
    pub maps: BTreeMap<String, Vec<(String, String)>>,
    #[serde(skip)]
    pub section: XModMorphism,
}

impl SectionCertificate {
    pub fn all_passed(&self) -> bool {
        self.equations.iter().all(|e| e.passed)
    }

    pub fn equation(&self, label: &str) -> Option<&Equation> {
        self.equations.iter().find(|e| e.label == label)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LiftStep {
    /// `g₁: P -> G` lifting `s` over `f_G`
    PLift,
    /// equivariant section `g_T` of `f_T`
    EquivariantSection,
    /// section `j_Z` of the induced map on cokernels
    CokernelSection,
    /// `g_G` lifting `j_Q` over the comparison `u`
    PullbackLift,
}

impl LiftStep {
    pub fn message(self) -> &'static str {
        match self {
            LiftStep::PLift => "P-lift unavailable",
            LiftStep::EquivariantSection => "no equivariant section",
            LiftStep::CokernelSection | LiftStep::PullbackLift => "projectivity-supplied lift unavailable",
        }
    }
}

#[derive(Clone, Debug)]
pub enum LiftOutcome {
    Certified(Box<SectionCertificate>),
    /// the search at `step` finished without a solution
    NoLift { step: LiftStep },
    BudgetExhausted { step: LiftStep },
}

impl LiftOutcome {
    pub fn certificate(&self) -> Option<&SectionCertificate> {
        match self {
            LiftOutcome::Certified(c) => Some(c),
            _ => None,
        }
    }
}

/// `(Q, Q ⋊ P, conjugation, k)` for a split extension `Q -> Z -> P`.
pub fn normal_inclusion_xmod(ext: &SplitExtension) -> Result<CrossedModule> {
    CrossedModule::new(GroupAction::conjugation_on(ext.k())?, ext.k().clone())
}

fn name_pairs(h: &GroupHom) -> Vec<(String, String)> {
    h.source().elements().map(|x| (h.source().name(x).to_string(), h.target().name(h.apply(x)).to_string())).collect()
}

fn eq_check(label: &str, instances: usize, failure: Option<String>) -> Equation {
    Equation { label: label.to_string(), passed: failure.is_none(), instances, detail: failure }
}

fn maps_agree(label: &str, lhs: &GroupHom, rhs: &GroupHom) -> Equation {
    let src = lhs.source();
    let bad = src.elements().find(|&x| lhs.apply(x) != rhs.apply(x));
    eq_check(label, src.order(), bad.map(|x| format!("differs at {}", src.name(x))))
}

/// The action core of a crossed module, through `T ⋊ G` when it fits under
/// the order cap and by commutator expansion otherwise.
enum CoreRoute {
    Extension(SplitExtension),
    Expansion(GroupAction, Signature),
}

impl CoreRoute {
    fn of(xm: &CrossedModule) -> Result<Self> {
        if xm.t().order() * xm.g().order() <= crate::group::MAX_ORDER {
            Ok(CoreRoute::Extension(xm.semidirect()?))
        } else {
            Ok(CoreRoute::Expansion(xm.action().clone(), Signature::new(vec![xm.g().clone(), xm.t().clone()])?))
        }
    }

    fn signature(&self) -> &Signature {
        match self {
            CoreRoute::Extension(e) => e.signature(),
            CoreRoute::Expansion(_, sig) => sig,
        }
    }

    fn eval(&self, w: &Word) -> Result<Elem> {
        match self {
            CoreRoute::Extension(e) => e.core_eval(w),
            CoreRoute::Expansion(a, _) => crate::action::commutator_expansion_eval(a, w),
        }
    }
}

/// Checks `g_T ψ' = ψ (g_G ⋄ g_T)` on words over `(Z, Q)` where `ψ'` is the
/// core of the target and `ψ` the core of the source.
fn equivariance_on_words(
    label: &str,
    words: impl Iterator<Item = Result<Word>>,
    dst_core: &CoreRoute,
    src_core: &CoreRoute,
    g_g: &GroupHom,
    g_t: &GroupHom,
) -> Result<Equation> {
    let mut n = 0;
    for w in words {
        let w = w?;
        n += 1;
        let lhs = g_t.apply(dst_core.eval(&w)?);
        let moved = w.map(src_core.signature(), &[0, 1], &[g_g.clone(), g_t.clone()])?;
        let rhs = src_core.eval(&moved)?;
        if lhs != rhs {
            return Ok(eq_check(label, n, Some(format!("fails on {w}"))));
        }
    }
    Ok(eq_check(label, n, None))
}

/// The section of a regular epi onto `(Q, Q ⋊ P, conjugation, k)` built in
/// four steps: lift `s` to `g₁: P -> G`; find a section `g_T` of `f_T`
/// equivariant for the `P`-actions; set `g_G(k(q) s(p)) = ∂(g_T(q)) g₁(p)`;
/// verify everything, including a word audit per coproduct injection.
pub fn projective_section(epi: &XModMorphism, ext: &SplitExtension, cfg: &LiftConfig) -> Result<LiftOutcome> {
    let src = &epi.source;
    let dst = normal_inclusion_xmod(ext)?;
    if !epi.target.g().same_table(dst.g()) || !epi.target.t().same_table(dst.t()) || !epi.target.boundary().same_as(dst.boundary()) {
        return Err(Error::Precondition("the target is not the normal-inclusion crossed module of the given extension".into()));
    }
    if !epi.f_t.is_surjective() || !epi.f_g.is_surjective() {
        return Err(Error::Precondition("both levels of the epimorphism must be surjective".into()));
    }
    let (f_t, f_g) = (&epi.f_t, &epi.f_g);
    let (t, g) = (src.t(), src.g());
    let (q, z, p) = (ext.kernel(), ext.total(), ext.base());

    // (i)
    let g1 = match lift_through(ext.s(), f_g, cfg.budget, &mut |_| true)? {
        SearchOutcome::Found(h) => h,
        SearchOutcome::ProvenNone => return Ok(LiftOutcome::NoLift { step: LiftStep::PLift }),
        SearchOutcome::BudgetExhausted => return Ok(LiftOutcome::BudgetExhausted { step: LiftStep::PLift }),
    };

    // (ii)
    let psi = action_from_extension(ext)?;
    let beta = src.action().along(&g1)?;
    let mut search = HomSearch::new(q, t).budget(cfg.budget);
    for (i, &gen) in q.generators().to_vec().iter().enumerate() {
        search = search.restrict(i, |y| f_t.apply(y) == gen);
    }
    let p_gens = p.generators().to_vec();
    let outcome = search.first(&mut |h: &GroupHom| {
        p_gens.iter().all(|&a| q.elements().all(|x| h.apply(psi.act(a, x)) == beta.act(a, h.apply(x))))
    });
    let g_t = match outcome {
        SearchOutcome::Found(h) => h,
        SearchOutcome::ProvenNone => return Ok(LiftOutcome::NoLift { step: LiftStep::EquivariantSection }),
        SearchOutcome::BudgetExhausted => return Ok(LiftOutcome::BudgetExhausted { step: LiftStep::EquivariantSection }),
    };

    // (iii)
    let d = src.boundary();
    let gg_map: Vec<Elem> = z
        .elements()
        .map(|e| {
            let a = ext.p().apply(e);
            let kq = z.mul(e, z.inv(ext.s().apply(a)));
            let x = ext.kernel_preimage(kq).expect("z s(p(z))^-1 lies in the kernel");
            g.mul(d.apply(g_t.apply(x)), g1.apply(a))
        })
        .collect();
    let raw_gg = GroupHom::new_unchecked(z.clone(), g.clone(), gg_map.clone());

    // (iv)
    let mut eqs = vec![
        maps_agree("lifting-over-fG", &g1.then(f_g)?, ext.s()),
        maps_agree("section-of-fT", &g_t.then(f_t)?, &GroupHom::identity(q)),
    ];
    let mut bad = None;
    let mut n = 0;
    'eqv: for a in p.elements() {
        for x in q.elements() {
            n += 1;
            if g_t.apply(psi.act(a, x)) != beta.act(a, g_t.apply(x)) {
                bad = Some(format!("fails at ({}, {})", p.name(a), q.name(x)));
                break 'eqv;
            }
        }
    }
    eqs.push(eq_check("equivariance-of-gT", n, bad));
    let hom_check = raw_gg.verify();
    eqs.push(eq_check("coequalizer-formula", z.order(), hom_check.as_ref().err().map(|e| e.to_string())));
    if let Err(e) = hom_check {
        return Err(Error::InvariantBreach(format!(
            "projective_section step (iv): the coequalizer formula does not define a homomorphism ({e})"
        )));
    }
    let g_g = raw_gg;
    eqs.push(maps_agree("gG-extends-g1", &ext.s().then(&g_g)?, &g1));
    eqs.push(maps_agree("boundary-square", &ext.k().then(&g_g)?, &g_t.then(d)?));
    eqs.push(maps_agree("section-of-fG", &g_g.then(f_g)?, &GroupHom::identity(z)));

    let report = crate::xmod::check_morphism(&g_t, &g_g, &dst, src)?;
    eqs.push(eq_check(
        "equivariance",
        z.order() * q.order(),
        report.equivariance.witness.map(|w| format!("fails at ({}, {})", w.first, w.second)),
    ));

    let dst_core = CoreRoute::of(&dst)?;
    let src_core = CoreRoute::of(src)?;
    // first injection: ternary words over (P, Q, Q), regrouped and pushed along [s, ∂']
    let pqq = Signature::new(vec![p.clone(), q.clone(), q.clone()])?;
    let ternary = enumerate_cosmash_words(&pqq, cfg.ternary_len, CosmashKind::Ternary, cfg.budget)?;
    let pq = Signature::new(vec![p.clone(), q.clone()])?;
    let s_dprime = WordHom::new(&pq, vec![ext.s().clone(), ext.k().clone()])?;
    let id_q = GroupHom::identity(q);
    let zq = dst_core.signature().clone();
    let retag = |w: Word| Word::normalize(&zq, w.letters().iter().copied());
    eqs.push(equivariance_on_words(
        "ternary-equivariance",
        ternary.iter().map(|w| embed_j(w).and_then(|r| r.map(&s_dprime, &id_q)).and_then(retag)),
        &dst_core,
        &src_core,
        &g_g,
        &g_t,
    )?);
    // second injection: binary words over (P, Q) along s
    let binary_pq = enumerate_cosmash_words(&pq, cfg.binary_len, CosmashKind::Binary, cfg.budget)?;
    eqs.push(equivariance_on_words(
        "equivariance-iota2",
        binary_pq.iter().map(|w| w.map(&zq, &[0, 1], &[ext.s().clone(), id_q.clone()])),
        &dst_core,
        &src_core,
        &g_g,
        &g_t,
    )?);
    // third injection: binary words over (Q, Q) along ∂'
    let qq = Signature::new(vec![q.clone(), q.clone()])?;
    let binary_qq = enumerate_cosmash_words(&qq, cfg.binary_len, CosmashKind::Binary, cfg.budget)?;
    eqs.push(equivariance_on_words(
        "equivariance-iota3",
        binary_qq.iter().map(|w| w.map(&zq, &[0, 1], &[ext.k().clone(), id_q.clone()])),
        &dst_core,
        &src_core,
        &g_g,
        &g_t,
    )?);

    if let Some(e) = eqs.iter().find(|e| !e.passed) {
        return Err(Error::InvariantBreach(format!(
            "projective_section step (iv): equation {} fails{}",
            e.label,
            e.detail.as_ref().map(|d| format!(" ({d})")).unwrap_or_default()
        )));
    }
    let section = XModMorphism::new(&dst, src, g_t.clone(), g_g.clone())?;
    let maps = BTreeMap::from([
        ("g1".to_string(), name_pairs(&g1)),
        ("gT".to_string(), name_pairs(&g_t)),
        ("gG".to_string(), name_pairs(&g_g)),
    ]);
    Ok(LiftOutcome::Certified(Box::new(SectionCertificate {
        construction: "projective-section".into(),
        equations: eqs,
        maps,
        section,
    })))
}

/// The section of a levelwise surjective morphism between normal-inclusion
/// crossed modules `(T ⊴ G) -> (P ⊴ Q)` obtained through the pullback
/// `Q ×_{Q/P} G/T`.
pub fn pullback_section(epi: &XModMorphism, cfg: &LiftConfig) -> Result<LiftOutcome> {
    let (src, dst) = (&epi.source, &epi.target);
    for xm in [src, dst] {
        if !xm.boundary().is_injective() {
            return Err(Error::Precondition("pullback_section needs normal-inclusion crossed modules".into()));
        }
    }
    if !epi.f_t.is_surjective() || !epi.f_g.is_surjective() {
        return Err(Error::Precondition("both levels of the epimorphism must be surjective".into()));
    }
    let (f_t, f_g) = (&epi.f_t, &epi.f_g);
    let (g, q) = (src.g(), dst.g());
    // h: Coker(k) -> Coker(k'), with c: G -> Coker(k) and c': Q -> Coker(k')
    let (h, c, c2) = pi0_map(epi)?;
    let pb = pullback(&c2, &h)?;
    let u_map: Vec<Elem> = g
        .elements()
        .map(|x| pb.index_of(f_g.apply(x), c.apply(x)).expect("(f_G, c) lands in the pullback"))
        .collect();
    let u = GroupHom::from_map(g, &pb.group, u_map)?;
    let mut eqs = vec![eq_check(
        "regular-pushout",
        g.order(),
        (!u.is_surjective()).then(|| "the comparison into the pullback is not surjective".to_string()),
    )];
    if !u.is_surjective() {
        return Err(Error::InvariantBreach(
            "pullback_section: comparison u is not surjective although f_T is".into(),
        ));
    }
    let coker2 = h.target().clone();
    let j_z = match lift_through(&GroupHom::identity(&coker2), &h, cfg.budget, &mut |_| true)? {
        SearchOutcome::Found(x) => x,
        SearchOutcome::ProvenNone => return Ok(LiftOutcome::NoLift { step: LiftStep::CokernelSection }),
        SearchOutcome::BudgetExhausted => return Ok(LiftOutcome::BudgetExhausted { step: LiftStep::CokernelSection }),
    };
    eqs.push(maps_agree("cokernel-section", &j_z.then(&h)?, &GroupHom::identity(&coker2)));
    let jq_map: Vec<Elem> = q
        .elements()
        .map(|y| pb.index_of(y, j_z.apply(c2.apply(y))).expect("(1, j_Z c') lands in the pullback"))
        .collect();
    let j_q = GroupHom::from_map(q, &pb.group, jq_map)?;
    let g_g = match lift_through(&j_q, &u, cfg.budget, &mut |_| true)? {
        SearchOutcome::Found(x) => x,
        SearchOutcome::ProvenNone => return Ok(LiftOutcome::NoLift { step: LiftStep::PullbackLift }),
        SearchOutcome::BudgetExhausted => return Ok(LiftOutcome::BudgetExhausted { step: LiftStep::PullbackLift }),
    };
    eqs.push(maps_agree("pullback-lift", &g_g.then(&u)?, &j_q));
    // g_G sends the subgroup P into the subgroup T
    let mut back = vec![None; g.order()];
    for x in src.t().elements() {
        back[src.boundary().apply(x)] = Some(x);
    }
    let gt_map = dst
        .t()
        .elements()
        .map(|y| {
            back[g_g.apply(dst.boundary().apply(y))]
                .ok_or_else(|| Error::InvariantBreach("pullback_section: g_G does not restrict to the kernels".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let g_t = GroupHom::from_map(dst.t(), src.t(), gt_map)?;
    eqs.push(maps_agree("section-of-fT", &g_t.then(f_t)?, &GroupHom::identity(dst.t())));
    eqs.push(maps_agree("section-of-fG", &g_g.then(f_g)?, &GroupHom::identity(q)));
    let report = crate::xmod::check_morphism(&g_t, &g_g, dst, src)?;
    eqs.push(eq_check("boundary-square", dst.t().order(), report.boundary_square.witness.map(|w| format!("fails at {}", w.first))));
    eqs.push(eq_check(
        "equivariance",
        q.order() * dst.t().order(),
        report.equivariance.witness.map(|w| format!("fails at ({}, {})", w.first, w.second)),
    ));
    if let Some(e) = eqs.iter().find(|e| !e.passed) {
        return Err(Error::InvariantBreach(format!("pullback_section: equation {} fails", e.label)));
    }
    let section = XModMorphism::new(dst, src, g_t.clone(), g_g.clone())?;
    let maps = BTreeMap::from([
        ("jZ".to_string(), name_pairs(&j_z)),
        ("gG".to_string(), name_pairs(&g_g)),
        ("gT".to_string(), name_pairs(&g_t)),
    ]);
    Ok(LiftOutcome::Certified(Box::new(SectionCertificate {
        construction: "pullback-section".into(),
        equations: eqs,
        maps,
        section,
    })))
}

/// Exhaustive search for `l: obj -> A` with `e l = m`, where `m: obj -> B`
/// and `e: A -> B`.
pub fn lift_xmod_morphism(m: &XModMorphism, e: &XModMorphism, budget: u64) -> Result<Option<XModMorphism>> {
    let (obj, a) = (&m.source, &e.source);
    if !m.target.g().same_table(e.target.g()) || !m.target.t().same_table(e.target.t()) {
        return Err(Error::InvalidMorphism("the morphism and the epimorphism have different codomains".into()));
    }
    let mut search = HomSearch::new(obj.g(), a.g()).budget(budget);
    for (i, &gen) in obj.g().generators().to_vec().iter().enumerate() {
        let want = m.f_g.apply(gen);
        search = search.restrict(i, |y| e.f_g.apply(y) == want);
    }
    let mut result = None;
    let mut exhausted = false;
    let end = search.run(&mut |l_g: &GroupHom| {
        let mut ts = HomSearch::new(obj.t(), a.t()).budget(budget);
        for (i, &gen) in obj.t().generators().to_vec().iter().enumerate() {
            let want = m.f_t.apply(gen);
            ts = ts.restrict(i, |y| e.f_t.apply(y) == want);
        }
        let found = ts.first(&mut |l_t: &GroupHom| {
            crate::xmod::check_morphism(l_t, l_g, obj, a).map(|r| r.passed()).unwrap_or(false)
        });
        match found {
            SearchOutcome::Found(l_t) => {
                result = Some(XModMorphism::new(obj, a, l_t, l_g.clone()));
                false
            }
            SearchOutcome::BudgetExhausted => {
                exhausted = true;
                false
            }
            SearchOutcome::ProvenNone => true,
        }
    });
    if exhausted || end == crate::group::RunEnd::Budget {
        return Err(Error::BudgetExhausted(budget));
    }
    result.transpose()
}

/// Plain exhaustive search for a section `(g_T, g_G)` of a morphism of
/// crossed modules, used as an independent oracle.
pub fn brute_force_xmod_section(epi: &XModMorphism, budget: u64) -> Result<Option<XModMorphism>> {
    lift_xmod_morphism(&XModMorphism::identity(&epi.target), epi, budget)
}

/// Every morphism `src -> dst` of crossed modules.
pub fn enumerate_xmod_morphisms(src: &CrossedModule, dst: &CrossedModule, budget: u64) -> Result<Vec<XModMorphism>> {
    let mut out = Vec::new();
    let t_homs = enumerate_homs(src.t(), dst.t(), budget)?;
    for f_g in enumerate_homs(src.g(), dst.g(), budget)? {
        for f_t in &t_homs {
            if crate::xmod::check_morphism(f_t, &f_g, src, dst)?.passed() {
                out.push(XModMorphism::new(src, dst, f_t.clone(), f_g.clone())?);
            }
        }
    }
    Ok(out)
}

/// The split extension `T -> G -> G/∂T` of a crossed module with injective
/// boundary, when the quotient map has a section.
pub fn normal_inclusion_extension(xm: &CrossedModule, budget: u64) -> Result<Option<SplitExtension>> {
    if !xm.boundary().is_injective() {
        return Err(Error::Precondition("the boundary is not injective".into()));
    }
    let (q, proj) = crate::xmod::pi0(xm)?;
    match lift_through(&GroupHom::identity(&q), &proj, budget, &mut |_| true)? {
        SearchOutcome::Found(s) => Ok(Some(SplitExtension::new(xm.boundary().clone(), proj, s)?)),
        SearchOutcome::ProvenNone => Ok(None),
        SearchOutcome::BudgetExhausted => Err(Error::BudgetExhausted(budget)),
    }
}

/// The morphism `L(H) -> xm` determined by `f: H -> T` and `g: H -> G`, where
/// `L(H) = (H♭H, H + H, conjugation, inclusion)` is kept as words over `(H, H)`.
#[derive(Clone, Debug)]
pub struct FreeXModMorphism {
    pub h: FiniteGroup,
    pub xmod: CrossedModule,
    pub f: GroupHom,
    pub g: GroupHom,
    sig: Signature,
    f_g: WordHom,
    into_semidirect: WordHom,
    ext: SplitExtension,
}

impl FreeXModMorphism {
    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// `f_G = [g, ∂ f]` on any word over `(H, H)`.
    pub fn f_g(&self, w: &Word) -> Result<Elem> {
        self.f_g.evaluate(w)
    }

    /// `f_T` on a flat word: evaluate with `[s g, k f]` in `T ⋊ G` and read back in `T`.
    pub fn f_t(&self, w: &Word) -> Result<Elem> {
        if !in_flat(w)? {
            return Err(Error::NotAMember { word: w.to_text(), what: "flat object H♭H".into() });
        }
        let e = self.into_semidirect.evaluate(w)?;
        self.ext
            .kernel_preimage(e)
            .ok_or_else(|| Error::InvariantBreach(format!("flat word {w} evaluates outside the kernel of T ⋊ G")))
    }

    pub fn eta(&self, x: Elem) -> Word {
        Word::normalize(&self.sig, [Letter::new(1, x)]).expect("letter fits")
    }

    pub fn iota1(&self, x: Elem) -> Word {
        Word::normalize(&self.sig, [Letter::new(0, x)]).expect("letter fits")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreeMorphismReport {
    pub flat_words_checked: usize,
    pub boundary: Equation,
    pub unit: Equation,
    pub first_injection: Equation,
    pub equivariance: Equation,
}

impl FreeMorphismReport {
    pub fn passed(&self) -> bool {
        self.boundary.passed && self.unit.passed && self.first_injection.passed && self.equivariance.passed
    }
}

/// Builds the morphism and verifies `∂ f_T = f_G` on all flat words of length
/// at most `audit_len`, the unit laws, and equivariance of `f_T` under
/// conjugation by single letters.
pub fn free_universal_morphism(
    h: &FiniteGroup,
    xm: &CrossedModule,
    f: &GroupHom,
    g: &GroupHom,
    audit_len: usize,
    budget: u64,
) -> Result<(FreeXModMorphism, FreeMorphismReport)> {
    if !xm.is_valid() {
        return Err(Error::Precondition("the target must satisfy the crossed module axioms".into()));
    }
    if !f.source().same_table(h) || !g.source().same_table(h) || !f.target().same_table(xm.t()) || !g.target().same_table(xm.g()) {
        return Err(Error::InvalidMorphism("f: H -> T and g: H -> G are mistyped".into()));
    }
    let sig = Signature::new(vec![h.clone(), h.clone()])?;
    let f_g = WordHom::new(&sig, vec![g.clone(), f.then(xm.boundary())?])?;
    let ext = xm.semidirect()?;
    let into_semidirect = WordHom::new(&sig, vec![g.then(ext.s())?, f.then(ext.k())?])?;
    let m = FreeXModMorphism { h: h.clone(), xmod: xm.clone(), f: f.clone(), g: g.clone(), sig: sig.clone(), f_g, into_semidirect, ext };

    let flat = enumerate_cosmash_words(&sig, audit_len, CosmashKind::Flat, budget)?;
    let d = xm.boundary();
    let mut bad = None;
    for w in &flat {
        if d.apply(m.f_t(w)?) != m.f_g(w)? {
            bad = Some(format!("fails on {w}"));
            break;
        }
    }
    let boundary = eq_check("boundary", flat.len(), bad);
    let unit = eq_check(
        "unit",
        h.order(),
        h.elements().find(|&x| m.f_t(&m.eta(x)).ok() != Some(f.apply(x))).map(|x| format!("fails at {}", h.name(x))),
    );
    let first_injection = eq_check(
        "first-injection",
        h.order(),
        h.elements().find(|&x| m.f_g(&m.iota1(x)).ok() != Some(g.apply(x))).map(|x| format!("fails at {}", h.name(x))),
    );
    let mut bad = None;
    let mut n = 0;
    let short: Vec<&Word> = flat.iter().filter(|w| w.len() <= audit_len.min(4)).collect();
    'outer: for slot in 0..2 {
        for x in h.elements() {
            let u = Word::normalize(&sig, [Letter::new(slot, x)])?;
            for w in &short {
                n += 1;
                let conj = u.concat(w)?.concat(&u.inverse())?;
                let lhs = m.f_t(&conj)?;
                let rhs = xm.action().act(m.f_g(&u)?, m.f_t(w)?);
                if lhs != rhs {
                    bad = Some(format!("fails for {u} acting on {w}"));
                    break 'outer;
                }
            }
        }
    }
    let equivariance = eq_check("equivariance", n, bad);
    let report = FreeMorphismReport { flat_words_checked: flat.len(), boundary, unit, first_injection, equivariance };
    Ok((m, report))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectionReport {
    pub pairs: usize,
    pub morphisms_valid: usize,
    pub distinct_evaluators: usize,
    pub round_trip: bool,
}

impl BijectionReport {
    pub fn passed(&self) -> bool {
        self.round_trip && self.morphisms_valid == self.pairs && self.distinct_evaluators == self.pairs
    }
}

/// Checks that pairs `(f, g) ∈ Hom(H, T) x Hom(H, G)` and morphisms
/// `L(H) -> xm` correspond: each pair is read back from its morphism and
/// distinct pairs give evaluators differing on some word of length at most `audit_len`.
pub fn hom_bijection_check(h: &FiniteGroup, xm: &CrossedModule, audit_len: usize, budget: u64) -> Result<BijectionReport> {
    let fs = enumerate_homs(h, xm.t(), budget)?;
    let gs = enumerate_homs(h, xm.g(), budget)?;
    let sig = Signature::new(vec![h.clone(), h.clone()])?;
    let flat = enumerate_cosmash_words(&sig, audit_len, CosmashKind::Flat, budget)?;
    let all = crate::words::enumerate_cosmash_words(&sig, audit_len.min(2), CosmashKind::Flat, budget)?;
    let mut seen = HashSet::new();
    let mut round_trip = true;
    let mut valid = 0;
    let mut pairs = 0;
    for f in &fs {
        for g in &gs {
            pairs += 1;
            let (m, report) = free_universal_morphism(h, xm, f, g, audit_len, budget)?;
            if report.passed() {
                valid += 1;
            }
            let f_back: Vec<Elem> = h.elements().map(|x| m.f_t(&m.eta(x))).collect::<Result<_>>()?;
            let g_back: Vec<Elem> = h.elements().map(|x| m.f_g(&m.iota1(x))).collect::<Result<_>>()?;
            round_trip &= f_back == f.values() && g_back == g.values();
            let mut fp: Vec<Elem> = flat.iter().map(|w| m.f_t(w)).collect::<Result<_>>()?;
            fp.extend(h.elements().map(|x| m.f_g(&m.iota1(x))).collect::<Result<Vec<_>>>()?);
            fp.extend(all.iter().map(|w| m.f_g(w)).collect::<Result<Vec<_>>>()?);
            seen.insert(fp);
        }
    }
    Ok(BijectionReport { pairs, morphisms_valid: valid, distinct_evaluators: seen.len(), round_trip })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::semidirect_product;
    use crate::group::{cyclic_group, trivial_group};
    use crate::xmod::conjugation_xmod;

    fn z(n: usize) -> FiniteGroup {
        cyclic_group(n).unwrap()
    }

    #[test]
    fn identity_epi_gets_identity_section() {
        let inv: Vec<Elem> = z(3).elements().map(|x| z(3).inv(x)).collect();
        let act = GroupAction::from_generator_images(&z(2), &z(3), &[1], &[inv]).unwrap();
        let ext = semidirect_product(&act).unwrap();
        let xm = normal_inclusion_xmod(&ext).unwrap();
        let id = XModMorphism::identity(&xm);
        let out = projective_section(&id, &ext, &LiftConfig::default()).unwrap();
        let cert = out.certificate().unwrap();
        assert!(cert.all_passed());
        assert!(cert.section.f_g.same_as(&GroupHom::identity(xm.g())));
        assert!(cert.to_json()["equations"].as_array().unwrap().len() >= 10);
    }

    #[test]
    fn no_section_fixture_fails_at_step_two() {
        let one = trivial_group();
        let src = conjugation_xmod(&z(4));
        let ext = semidirect_product(&GroupAction::trivial(&one, &z(2))).unwrap();
        let dst = normal_inclusion_xmod(&ext).unwrap();
        let red4 = GroupHom::from_generator_images(&z(4), ext.total(), &[1], &[ext.k().apply(1)]).unwrap();
        let red = GroupHom::from_generator_images(&z(4), &z(2), &[1], &[1]).unwrap();
        let epi = XModMorphism::new(&src, &dst, red, red4).unwrap();
        let out = projective_section(&epi, &ext, &LiftConfig::default()).unwrap();
        assert!(matches!(out, LiftOutcome::NoLift { step: LiftStep::EquivariantSection }));
        assert!(brute_force_xmod_section(&epi, u64::MAX).unwrap().is_none());
    }

    #[test]
    fn free_morphism_conjugate_letter() {
        let xm = conjugation_xmod(&crate::group::symmetric_group(3).unwrap());
        let h = z(2);
        let s3 = xm.g().clone();
        let t = s3.find("(1 2)").unwrap();
        let c = s3.find("(2 3)").unwrap();
        let f = GroupHom::from_generator_images(&h, xm.t(), &[1], &[t]).unwrap();
        let g = GroupHom::from_generator_images(&h, &s3, &[1], &[c]).unwrap();
        let (m, r) = free_universal_morphism(&h, &xm, &f, &g, 6, u64::MAX).unwrap();
        assert!(r.passed(), "{r:?}");
        let w = Word::normalize(m.signature(), [Letter::new(0, 1), Letter::new(1, 1), Letter::new(0, 1)]).unwrap();
        assert_eq!(m.f_t(&w).unwrap(), s3.conj(c, t));
        assert_eq!(m.f_t(&Word::empty(m.signature())).unwrap(), s3.identity());
    }

    #[test]
    fn bijection_on_z2() {
        let xm = conjugation_xmod(&z(2));
        let r = hom_bijection_check(&z(2), &xm, 4, u64::MAX).unwrap();
        assert_eq!(r.pairs, 4);
        assert!(r.passed());
        let r = hom_bijection_check(&trivial_group(), &xm, 4, u64::MAX).unwrap();
        assert_eq!(r.pairs, 1);
        assert!(r.passed());
    }
}
