//! Crossed modules `(T, G, α, ∂)`, their morphisms, π₀ and split short
//! exact sequences of crossed modules.

use serde::Serialize;

use crate::action::{semidirect_product, GroupAction, SplitExtension};
use crate::error::{Error, Result};
use crate::group::{direct_product, enumerate_homs, quotient, Elem, FiniteGroup, GroupHom, Subgroup};
use crate::words::{enumerate_cosmash_words, fold_s12, fold_s21, CosmashKind, Signature, Word, WordHom};

/// A pair of elements violating an identity, with both sides evaluated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub first: String,
    pub second: String,
    pub lhs: String,
    pub rhs: String,
    #[serde(skip)]
    pub indices: (Elem, Elem),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict { passed: true, witness: None }
    }

    fn fail(w: Witness) -> Self {
        Verdict { passed: false, witness: Some(w) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub precrossed: Verdict,
    pub peiffer: Verdict,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.precrossed.passed && self.peiffer.passed
    }
}

/// A word on which two evaluations disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WordViolation {
    pub word: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WordVerdict {
    pub words_checked: usize,
    pub violation: Option<WordViolation>,
}

impl WordVerdict {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WordLevelReport {
    pub max_len: usize,
    pub precrossed: WordVerdict,
    pub peiffer: WordVerdict,
}

impl WordLevelReport {
    pub fn passed(&self) -> bool {
        self.precrossed.passed() && self.peiffer.passed()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TernaryReport {
    pub max_len: usize,
    pub audit: WordVerdict,
    /// audited words other than the empty word
    pub nonempty_words: usize,
}

impl TernaryReport {
    pub fn passed(&self) -> bool {
        self.audit.passed()
    }
}

/// `(T, G, α, ∂)`; may be a mere candidate until [`CrossedModule::check_axioms`] passes.
#[derive(Clone, Debug)]
pub struct CrossedModule {
    action: GroupAction,
    boundary: GroupHom,
}

impl CrossedModule {
    /// Checks only that the data are typed consistently.
    pub fn candidate(action: GroupAction, boundary: GroupHom) -> Result<Self> {
        if !boundary.source().same_table(action.carried()) || !boundary.target().same_table(action.actor()) {
            return Err(Error::InvalidCrossedModule("boundary must go from the carried group to the acting group".into()));
        }
        Ok(CrossedModule { action, boundary })
    }

    /// A candidate that must also satisfy both axioms.
    pub fn new(action: GroupAction, boundary: GroupHom) -> Result<Self> {
        let xm = Self::candidate(action, boundary)?;
        let r = xm.check_axioms();
        if let Some(w) = r.precrossed.witness {
            return Err(Error::InvalidCrossedModule(format!(
                "precrossed condition fails at g = {}, t = {}",
                w.first, w.second
            )));
        }
        if let Some(w) = r.peiffer.witness {
            return Err(Error::InvalidCrossedModule(format!(
                "Peiffer condition fails at t = {}, t' = {}",
                w.first, w.second
            )));
        }
        Ok(xm)
    }

    pub fn t(&self) -> &FiniteGroup {
        self.action.carried()
    }

    pub fn g(&self) -> &FiniteGroup {
        self.action.actor()
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn boundary(&self) -> &GroupHom {
        &self.boundary
    }

    pub fn label(&self) -> String {
        format!("({} -> {})", self.t().label(), self.g().label())
    }

    /// Precrossed: `∂(g . t) = g ∂(t) g^-1`. Peiffer: `∂(t) . t' = t t' t^-1`.
    /// The first violation in index order is returned as witness.
    pub fn check_axioms(&self) -> AxiomReport {
        let (t, g, d) = (self.t(), self.g(), &self.boundary);
        let mut precrossed = Verdict::pass();
        'outer: for a in g.elements() {
            for x in t.elements() {
                let lhs = d.apply(self.action.act(a, x));
                let rhs = g.conj(a, d.apply(x));
                if lhs != rhs {
                    precrossed = Verdict::fail(Witness {
                        first: g.name(a).into(),
                        second: t.name(x).into(),
                        lhs: g.name(lhs).into(),
                        rhs: g.name(rhs).into(),
                        indices: (a, x),
                    });
                    break 'outer;
                }
            }
        }
        let mut peiffer = Verdict::pass();
        'outer: for x in t.elements() {
            for y in t.elements() {
                let lhs = self.action.act(d.apply(x), y);
                let rhs = t.conj(x, y);
                if lhs != rhs {
                    peiffer = Verdict::fail(Witness {
                        first: t.name(x).into(),
                        second: t.name(y).into(),
                        lhs: t.name(lhs).into(),
                        rhs: t.name(rhs).into(),
                        indices: (x, y),
                    });
                    break 'outer;
                }
            }
        }
        AxiomReport { precrossed, peiffer }
    }

    pub fn is_valid(&self) -> bool {
        self.check_axioms().passed()
    }

    /// `T ⋊ G` with its kernel, projection and section.
    pub fn semidirect(&self) -> Result<SplitExtension> {
        semidirect_product(&self.action)
    }

    /// Both axioms as equalities of maps out of cosmash products, checked on
    /// every cosmash word of length at most `max_len`:
    /// over `(G, T)`, `χ̄_G (1 ⋄ ∂) = ∂ ψ`; over `(T, T)`, `ψ (∂ ⋄ 1) = χ̄_T`.
    pub fn check_axioms_wordlevel(&self, max_len: usize, budget: u64) -> Result<WordLevelReport> {
        let (t, g, d) = (self.t(), self.g(), &self.boundary);
        let ext = self.semidirect()?;
        let words = enumerate_cosmash_words(ext.signature(), max_len, CosmashKind::Binary, budget)?;
        // χ̄_G on (G, G) words is the copairing [1, 1]; precomposed with 1 ⋄ ∂ it is [1, ∂]
        let chi_g = WordHom::new(ext.signature(), vec![GroupHom::identity(g), d.clone()])?;
        let mut precrossed = WordVerdict { words_checked: words.len(), violation: None };
        for w in &words {
            let lhs = chi_g.evaluate(w)?;
            let rhs = d.apply(ext.core_eval(w)?);
            if lhs != rhs {
                precrossed.violation = Some(WordViolation { word: w.to_text(), lhs: g.name(lhs).into(), rhs: g.name(rhs).into() });
                break;
            }
        }
        let tt = Signature::new(vec![t.clone(), t.clone()])?;
        let tt_words = enumerate_cosmash_words(&tt, max_len, CosmashKind::Binary, budget)?;
        let chi_t = WordHom::new(&tt, vec![GroupHom::identity(t), GroupHom::identity(t)])?;
        let mut peiffer = WordVerdict { words_checked: tt_words.len(), violation: None };
        for w in &tt_words {
            let moved = w.map(ext.signature(), &[0, 1], &[d.clone(), GroupHom::identity(t)])?;
            let lhs = ext.core_eval(&moved)?;
            let rhs = chi_t.evaluate(w)?;
            if lhs != rhs {
                peiffer.violation = Some(WordViolation { word: w.to_text(), lhs: t.name(lhs).into(), rhs: t.name(rhs).into() });
                break;
            }
        }
        Ok(WordLevelReport { max_len, precrossed, peiffer })
    }

    /// The ternary condition on every ternary cosmash word over `(G, T, T)` of
    /// length at most `max_len`: `ψ S₁₂ = ψ S₂₁ (1 ⋄ ∂ ⋄ 1)`.
    pub fn check_ternary(&self, max_len: usize, budget: u64) -> Result<TernaryReport> {
        let (t, g, d) = (self.t(), self.g(), &self.boundary);
        let ext = self.semidirect()?;
        let gtt = Signature::new(vec![g.clone(), t.clone(), t.clone()])?;
        let ggt = Signature::new(vec![g.clone(), g.clone(), t.clone()])?;
        let words = enumerate_cosmash_words(&gtt, max_len, CosmashKind::Ternary, budget)?;
        let mut audit = WordVerdict { words_checked: words.len(), violation: None };
        let slot_maps = [GroupHom::identity(g), d.clone(), GroupHom::identity(t)];
        for w in &words {
            let lhs = ext.core_eval(&retag(&fold_s12(w)?, ext.signature()))?;
            let moved = w.map(&ggt, &[0, 1, 2], &slot_maps)?;
            let rhs = ext.core_eval(&retag(&fold_s21(&moved)?, ext.signature()))?;
            if lhs != rhs {
                audit.violation = Some(WordViolation { word: w.to_text(), lhs: t.name(lhs).into(), rhs: t.name(rhs).into() });
                break;
            }
        }
        let nonempty_words = words.iter().filter(|w| !w.is_empty()).count();
        Ok(TernaryReport { max_len, audit, nonempty_words })
    }
}

/// The same letters over an equal signature object.
fn retag(w: &Word, sig: &Signature) -> Word {
    debug_assert!(w.signature().same_as(sig));
    Word::from_reduced_unchecked(sig, w.letters().to_vec())
}

/// `(N, G, conjugation, inclusion)` for a normal subgroup `N`.
pub fn xmod_from_normal_subgroup(g: &FiniteGroup, n: &Subgroup) -> Result<CrossedModule> {
    n.check_normal()?;
    let (ng, inc) = n.to_group(format!("N{}<{}", n.order(), g.label()))?;
    debug_assert!(inc.source().same_table(&ng));
    let action = GroupAction::conjugation_on(&inc)?;
    CrossedModule::new(action, inc)
}

/// `(G, G, conjugation, identity)`
pub fn conjugation_xmod(g: &FiniteGroup) -> CrossedModule {
    CrossedModule::candidate(GroupAction::conjugation(g), GroupHom::identity(g)).expect("conjugation data are typed")
}

/// `(1, X, trivial, 0)`
pub fn discrete(x: &FiniteGroup) -> CrossedModule {
    let one = crate::group::trivial_group();
    CrossedModule::candidate(GroupAction::trivial(x, &one), GroupHom::trivial(&one, x)).expect("discrete data are typed")
}

/// `(T1 x T2, G1 x G2)` acting and bounding componentwise, with both projections and inclusions.
pub fn product(a: &CrossedModule, b: &CrossedModule) -> Result<XModProduct> {
    let tp = direct_product(a.t(), b.t())?;
    let gp = direct_product(a.g(), b.g())?;
    let (nt2, ng2) = (b.t().order(), b.g().order());
    let mut table = Vec::with_capacity(gp.group.order() * tp.group.order());
    for gg in gp.group.elements() {
        for tt in tp.group.elements() {
            let x = a.action.act(gg / ng2, tt / nt2);
            let y = b.action.act(gg % ng2, tt % nt2);
            table.push((x * nt2 + y) as u16);
        }
    }
    let action = GroupAction::new_unchecked(&gp.group, &tp.group, table);
    let dmap = tp.group.elements().map(|tt| a.boundary.apply(tt / nt2) * ng2 + b.boundary.apply(tt % nt2)).collect();
    let boundary = GroupHom::from_map(&tp.group, &gp.group, dmap)?;
    let xm = CrossedModule::candidate(action, boundary)?;
    let p1 = XModMorphism::new(&xm, a, tp.p1.clone(), gp.p1.clone())?;
    let p2 = XModMorphism::new(&xm, b, tp.p2.clone(), gp.p2.clone())?;
    let i1 = XModMorphism::new(a, &xm, tp.i1.clone(), gp.i1.clone())?;
    let i2 = XModMorphism::new(b, &xm, tp.i2.clone(), gp.i2.clone())?;
    Ok(XModProduct { xmod: xm, p1, p2, i1, i2 })
}

#[derive(Clone, Debug)]
pub struct XModProduct {
    pub xmod: CrossedModule,
    pub p1: XModMorphism,
    pub p2: XModMorphism,
    pub i1: XModMorphism,
    pub i2: XModMorphism,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismReport {
    pub boundary_square: Verdict,
    pub equivariance: Verdict,
}

impl MorphismReport {
    pub fn passed(&self) -> bool {
        self.boundary_square.passed && self.equivariance.passed
    }
}

/// Checks `∂' f_t = f_g ∂` and `f_t(g . t) = f_g(g) . f_t(t)` on all elements.
pub fn check_morphism(f_t: &GroupHom, f_g: &GroupHom, src: &CrossedModule, dst: &CrossedModule) -> Result<MorphismReport> {
    if !f_t.source().same_table(src.t()) || !f_t.target().same_table(dst.t()) || !f_g.source().same_table(src.g()) || !f_g.target().same_table(dst.g()) {
        return Err(Error::InvalidMorphism("component maps are not typed for these crossed modules".into()));
    }
    let (t, g, g2, t2) = (src.t(), src.g(), dst.g(), dst.t());
    let mut boundary_square = Verdict::pass();
    for x in t.elements() {
        let lhs = dst.boundary.apply(f_t.apply(x));
        let rhs = f_g.apply(src.boundary.apply(x));
        if lhs != rhs {
            boundary_square = Verdict::fail(Witness {
                first: t.name(x).into(),
                second: t.name(x).into(),
                lhs: g2.name(lhs).into(),
                rhs: g2.name(rhs).into(),
                indices: (x, x),
            });
            break;
        }
    }
    let mut equivariance = Verdict::pass();
    'outer: for a in g.elements() {
        for x in t.elements() {
            let lhs = f_t.apply(src.action.act(a, x));
            let rhs = dst.action.act(f_g.apply(a), f_t.apply(x));
            if lhs != rhs {
                equivariance = Verdict::fail(Witness {
                    first: g.name(a).into(),
                    second: t.name(x).into(),
                    lhs: t2.name(lhs).into(),
                    rhs: t2.name(rhs).into(),
                    indices: (a, x),
                });
                break 'outer;
            }
        }
    }
    Ok(MorphismReport { boundary_square, equivariance })
}

/// A verified morphism of crossed modules.
#[derive(Clone, Debug)]
pub struct XModMorphism {
    pub source: CrossedModule,
    pub target: CrossedModule,
    pub f_t: GroupHom,
    pub f_g: GroupHom,
}

impl XModMorphism {
    pub fn new(src: &CrossedModule, dst: &CrossedModule, f_t: GroupHom, f_g: GroupHom) -> Result<Self> {
        let r = check_morphism(&f_t, &f_g, src, dst)?;
        if let Some(w) = r.boundary_square.witness {
            return Err(Error::InvalidMorphism(format!("boundary square fails at {}", w.first)));
        }
        if let Some(w) = r.equivariance.witness {
            return Err(Error::InvalidMorphism(format!("equivariance fails at ({}, {})", w.first, w.second)));
        }
        Ok(XModMorphism { source: src.clone(), target: dst.clone(), f_t, f_g })
    }

    pub fn identity(xm: &CrossedModule) -> Self {
        XModMorphism { source: xm.clone(), target: xm.clone(), f_t: GroupHom::identity(xm.t()), f_g: GroupHom::identity(xm.g()) }
    }

    pub fn then(&self, next: &XModMorphism) -> Result<XModMorphism> {
        Ok(XModMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            f_t: self.f_t.then(&next.f_t)?,
            f_g: self.f_g.then(&next.f_g)?,
        })
    }

    pub fn same_as(&self, other: &XModMorphism) -> bool {
        self.f_t.same_as(&other.f_t) && self.f_g.same_as(&other.f_g)
    }

    pub fn is_levelwise_surjective(&self) -> bool {
        self.f_t.is_surjective() && self.f_g.is_surjective()
    }
}

/// For normal-inclusion crossed modules `N ⊴ G`, `N' ⊴ G'` and `f_g: G -> G'`
/// with `f_g(N) ⊆ N'`, the restriction gives a morphism; equivariance is
/// checked, not assumed.
pub fn square_to_morphism(src: &CrossedModule, dst: &CrossedModule, f_g: &GroupHom) -> Result<XModMorphism> {
    let (i, j) = (src.boundary(), dst.boundary());
    if !i.is_injective() || !j.is_injective() {
        return Err(Error::Precondition("square_to_morphism needs injective boundaries".into()));
    }
    let mut back = vec![None; dst.g().order()];
    for y in dst.t().elements() {
        back[j.apply(y)] = Some(y);
    }
    let map = src
        .t()
        .elements()
        .map(|x| back[f_g.apply(i.apply(x))].ok_or_else(|| Error::InvalidMorphism(format!("f_g does not send {} into the subgroup", src.t().name(x)))))
        .collect::<Result<Vec<_>>>()?;
    let f_t = GroupHom::from_map(src.t(), dst.t(), map)?;
    XModMorphism::new(src, dst, f_t, f_g.clone())
}

/// `π₀ = G / ∂(T)` with its projection.
pub fn pi0(xm: &CrossedModule) -> Result<(FiniteGroup, GroupHom)> {
    let im = xm.boundary.image();
    match quotient(xm.g(), &im) {
        Err(Error::NotNormal { g, n, conj }) => Err(Error::InvalidCrossedModule(format!(
            "precrossed condition fails: the image of the boundary is not normal ({g} {n} {g}^-1 = {conj})"
        ))),
        other => other.map(|(q, p)| (q.with_label(format!("pi0{}", xm.label())), p)),
    }
}

/// `(t, g) -> ∂(t) g` on `T ⋊ G`, verified to be a homomorphism with `e s = 1` and `e k = ∂`.
pub fn retraction_e(xm: &CrossedModule) -> Result<(SplitExtension, GroupHom)> {
    let ext = xm.semidirect()?;
    let ng = xm.g().order();
    let map = (0..ext.total().order())
        .map(|e| xm.g().mul(xm.boundary.apply(e / ng), e % ng))
        .collect();
    let e = GroupHom::from_map(ext.total(), xm.g(), map)
        .map_err(|err| Error::InvalidCrossedModule(format!("precrossed condition fails: (t, g) -> ∂(t) g is not a homomorphism ({err})")))?;
    if !ext.s().then(&e)?.same_as(&GroupHom::identity(xm.g())) {
        return Err(Error::InvariantBreach("e s is not the identity".into()));
    }
    if !ext.k().then(&e)?.same_as(&xm.boundary) {
        return Err(Error::InvariantBreach("e k differs from the boundary".into()));
    }
    Ok((ext, e))
}

#[derive(Clone, Debug)]
pub struct Pi0Coequalizer {
    pub group: FiniteGroup,
    pub projection: GroupHom,
    /// verified isomorphism onto [`pi0`]'s quotient
    pub iso: GroupHom,
}

/// π₀ as the coequalizer of `d(t, g) = g` and `c(t, g) = ∂(t) g`: `G` modulo
/// the normal closure of all `d(x) c(x)^-1`. Compared with [`pi0`] through a
/// verified isomorphism.
pub fn pi0_via_coequalizer(xm: &CrossedModule) -> Result<Pi0Coequalizer> {
    let (ext, c) = retraction_e(xm)?;
    let g = xm.g();
    let d = ext.p();
    let mut gens: Vec<Elem> = ext.total().elements().map(|x| g.mul(d.apply(x), g.inv(c.apply(x)))).collect();
    gens.sort_unstable();
    gens.dedup();
    let n = Subgroup::normal_closure(g, &gens)?;
    let (q, proj) = quotient(g, &n)?;
    let (q0, proj0) = pi0(xm)?;
    let mut map = vec![None; q.order()];
    for x in g.elements() {
        let (a, b) = (proj.apply(x), proj0.apply(x));
        match map[a] {
            None => map[a] = Some(b),
            Some(prev) if prev != b => {
                return Err(Error::InvariantBreach("coequalizer and cokernel quotients differ".into()));
            }
            _ => {}
        }
    }
    let iso = GroupHom::from_map(&q, &q0, map.into_iter().map(|m| m.expect("projection is onto")).collect())?;
    if !iso.is_isomorphism() {
        return Err(Error::InvariantBreach("coequalizer and cokernel have different orders".into()));
    }
    Ok(Pi0Coequalizer { group: q, projection: proj, iso })
}

/// `π₀(f): [g] -> [f_g(g)]`, with well-definedness checked.
pub fn pi0_map(f: &XModMorphism) -> Result<(GroupHom, GroupHom, GroupHom)> {
    let (q1, p1) = pi0(&f.source)?;
    let (q2, p2) = pi0(&f.target)?;
    let mut map = vec![None; q1.order()];
    for x in f.source.g().elements() {
        let (a, b) = (p1.apply(x), p2.apply(f.f_g.apply(x)));
        match map[a] {
            None => map[a] = Some(b),
            Some(prev) if prev != b => return Err(Error::InvariantBreach("π₀ of a morphism is not well defined".into())),
            _ => {}
        }
    }
    let h = GroupHom::from_map(&q1, &q2, map.into_iter().map(|m| m.expect("projection is onto")).collect())?;
    Ok((h, p1, p2))
}

/// `K -k-> X -f-> Y` with section `s` of `f`, levelwise split short exact.
#[derive(Clone, Debug)]
pub struct XModSplitSES {
    pub k: XModMorphism,
    pub f: XModMorphism,
    pub s: XModMorphism,
}

impl XModSplitSES {
    pub fn kernel(&self) -> &CrossedModule {
        &self.k.source
    }

    pub fn middle(&self) -> &CrossedModule {
        &self.f.source
    }

    pub fn quotient(&self) -> &CrossedModule {
        &self.f.target
    }

    /// Both levels split short exact and all three maps morphisms.
    pub fn validate(&self) -> Result<()> {
        for m in [&self.k, &self.f, &self.s] {
            XModMorphism::new(&m.source, &m.target, m.f_t.clone(), m.f_g.clone())?;
        }
        check_split_ses(&self.k.f_t, &self.f.f_t, &self.s.f_t).map_err(|e| Error::InvalidMorphism(format!("T level: {e}")))?;
        check_split_ses(&self.k.f_g, &self.f.f_g, &self.s.f_g).map_err(|e| Error::InvalidMorphism(format!("G level: {e}")))
    }
}

/// `k` injective, `image k = ker f`, `f s = 1`.
pub fn check_split_ses(k: &GroupHom, f: &GroupHom, s: &GroupHom) -> Result<()> {
    if !k.is_injective() {
        return Err(Error::InvalidMorphism("kernel map is not injective".into()));
    }
    if k.image() != f.kernel() {
        return Err(Error::InvalidMorphism("image of the kernel map is not the kernel".into()));
    }
    if !s.then(f)?.same_as(&GroupHom::identity(f.target())) {
        return Err(Error::InvalidMorphism("section is not a right inverse".into()));
    }
    Ok(())
}

/// Levelwise kernel of a split epimorphism `f` with section `s`.
pub fn xmod_kernel(f: &XModMorphism, s: &XModMorphism) -> Result<XModSplitSES> {
    let k = kernel_morphism(f)?;
    let ses = XModSplitSES { k, f: f.clone(), s: s.clone() };
    ses.validate()?;
    Ok(ses)
}

/// Inclusion of the levelwise kernel of `f`.
pub fn kernel_morphism(f: &XModMorphism) -> Result<XModMorphism> {
    let xm = &f.source;
    let (kt, it) = f.f_t.kernel().to_group(format!("ker({})", xm.t().label()))?;
    let (kg, ig) = f.f_g.kernel().to_group(format!("ker({})", xm.g().label()))?;
    let mut back_t = vec![None; xm.t().order()];
    for x in kt.elements() {
        back_t[it.apply(x)] = Some(x);
    }
    let mut back_g = vec![None; xm.g().order()];
    for x in kg.elements() {
        back_g[ig.apply(x)] = Some(x);
    }
    let dmap = kt
        .elements()
        .map(|x| back_g[xm.boundary.apply(it.apply(x))].ok_or_else(|| Error::InvalidMorphism("boundary leaves the kernel".into())))
        .collect::<Result<Vec<_>>>()?;
    let boundary = GroupHom::from_map(&kt, &kg, dmap)?;
    let mut table = Vec::with_capacity(kg.order() * kt.order());
    for a in kg.elements() {
        for x in kt.elements() {
            let y = xm.action.act(ig.apply(a), it.apply(x));
            let y = back_t[y].ok_or_else(|| Error::InvalidMorphism("equivariance fails: the action leaves the kernel".into()))?;
            table.push(y as u16);
        }
    }
    let action = GroupAction::new_unchecked(&kg, &kt, table);
    let kxm = CrossedModule::candidate(action, boundary)?;
    XModMorphism::new(&kxm, xm, it, ig)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProtoadditivityReport {
    pub kernel_order: usize,
    pub middle_order: usize,
    pub quotient_order: usize,
    pub split_exact: bool,
    pub failure: Option<String>,
}

/// Applies π₀ to a split short exact sequence and checks the result is split short exact.
pub fn check_protoadditivity(ses: &XModSplitSES) -> Result<ProtoadditivityReport> {
    let (k, _, _) = pi0_map(&ses.k)?;
    let (f, _, _) = pi0_map(&ses.f)?;
    let (s, _, _) = pi0_map(&ses.s)?;
    let failure = check_split_ses(&k, &f, &s).err().map(|e| e.to_string());
    Ok(ProtoadditivityReport {
        kernel_order: k.source().order(),
        middle_order: f.source().order(),
        quotient_order: f.target().order(),
        split_exact: failure.is_none(),
        failure,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjunctionReport {
    pub homs_from_pi0: usize,
    pub xmod_morphisms: usize,
    pub bijective: bool,
}

/// `Hom(π₀(xm), X) ≅ Hom(xm, D(X))` by precomposition with the projection,
/// checked by enumerating both sides.
pub fn check_pi0_adjunction(xm: &CrossedModule, x: &FiniteGroup, budget: u64) -> Result<AdjunctionReport> {
    let (q, proj) = pi0(xm)?;
    let left = enumerate_homs(&q, x, budget)?;
    let dx = discrete(x);
    let zero_t = GroupHom::trivial(xm.t(), dx.t());
    let mut right = Vec::new();
    for f_g in enumerate_homs(xm.g(), x, budget)? {
        if check_morphism(&zero_t, &f_g, xm, &dx)?.passed() {
            right.push(f_g);
        }
    }
    let mut images: Vec<Vec<Elem>> = left.iter().map(|h| proj.then(h).map(|c| c.values().to_vec())).collect::<Result<_>>()?;
    let mut targets: Vec<Vec<Elem>> = right.iter().map(|h| h.values().to_vec()).collect();
    images.sort();
    targets.sort();
    let distinct = images.windows(2).all(|w| w[0] != w[1]);
    Ok(AdjunctionReport {
        homs_from_pi0: left.len(),
        xmod_morphisms: right.len(),
        bijective: distinct && images == targets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_group, find_isomorphism, symmetric_group, trivial_group};

    fn s3_normal(gen: &str) -> CrossedModule {
        let s3 = symmetric_group(3).unwrap();
        let n = Subgroup::generated_by(&s3, &[s3.find(gen).unwrap()]).unwrap();
        xmod_from_normal_subgroup(&s3, &n).unwrap()
    }

    #[test]
    fn basic_axioms() {
        assert!(discrete(&cyclic_group(4).unwrap()).is_valid());
        assert!(conjugation_xmod(&symmetric_group(3).unwrap()).is_valid());
        let s3 = symmetric_group(3).unwrap();
        let one = trivial_group();
        let bad = CrossedModule::candidate(GroupAction::trivial(&one, &s3), GroupHom::trivial(&s3, &one)).unwrap();
        let r = bad.check_axioms();
        assert!(r.precrossed.passed);
        let w = r.peiffer.witness.unwrap();
        let (x, y) = w.indices;
        assert_ne!(s3.conj(x, y), y);
    }

    #[test]
    fn non_normal_rejected() {
        let s3 = symmetric_group(3).unwrap();
        let n = Subgroup::generated_by(&s3, &[s3.find("(1 2)").unwrap()]).unwrap();
        assert!(matches!(xmod_from_normal_subgroup(&s3, &n), Err(Error::NotNormal { .. })));
    }

    #[test]
    fn pi0_of_a3() {
        let xm = s3_normal("(1 2 3)");
        let (q, _) = pi0(&xm).unwrap();
        assert_eq!(q.order(), 2);
        let c = pi0_via_coequalizer(&xm).unwrap();
        assert_eq!(c.group.order(), 2);
        assert_eq!(pi0(&conjugation_xmod(&symmetric_group(3).unwrap())).unwrap().0.order(), 1);
        let z4 = cyclic_group(4).unwrap();
        let (q, _) = pi0(&discrete(&z4)).unwrap();
        assert!(find_isomorphism(&q, &z4).is_some());
    }

    #[test]
    fn wordlevel_matches_elementwise() {
        let xm = s3_normal("(1 2 3)");
        let r = xm.check_axioms_wordlevel(4, u64::MAX).unwrap();
        assert!(r.passed());
        let s3 = symmetric_group(3).unwrap();
        let one = trivial_group();
        let bad = CrossedModule::candidate(GroupAction::trivial(&one, &s3), GroupHom::trivial(&s3, &one)).unwrap();
        let r = bad.check_axioms_wordlevel(4, u64::MAX).unwrap();
        assert!(r.precrossed.passed());
        assert!(!r.peiffer.passed());
    }

    #[test]
    fn ternary_on_conjugation() {
        let xm = conjugation_xmod(&symmetric_group(3).unwrap());
        let r = xm.check_ternary(8, u64::MAX).unwrap();
        assert!(r.passed());
        let r = xm.check_ternary(10, u64::MAX).unwrap();
        assert!(r.passed());
        assert!(r.nonempty_words > 0);
    }

    #[test]
    fn retraction_is_hom() {
        let xm = conjugation_xmod(&symmetric_group(3).unwrap());
        let (ext, e) = retraction_e(&xm).unwrap();
        assert_eq!(ext.total().order(), 36);
        e.verify().unwrap();
    }

    #[test]
    fn product_kernel_recovers_factor() {
        let a = s3_normal("(1 2 3)");
        let b = discrete(&cyclic_group(2).unwrap());
        let p = product(&a, &b).unwrap();
        assert!(p.xmod.is_valid());
        let ses = xmod_kernel(&p.p2, &p.i2).unwrap();
        assert_eq!(ses.kernel().t().order(), 3);
        assert_eq!(ses.kernel().g().order(), 6);
        assert!(ses.kernel().is_valid());
        let r = check_protoadditivity(&ses).unwrap();
        assert!(r.split_exact);
    }

    #[test]
    fn adjunction_small() {
        let xm = s3_normal("(1 2 3)");
        let r = check_pi0_adjunction(&xm, &cyclic_group(2).unwrap(), u64::MAX).unwrap();
        assert!(r.bijective);
        assert_eq!(r.homs_from_pi0, 2);
    }
}
