//! Split extensions over a fixed base `B` and their morphisms: the
//! regular-epi criterion, section search, relative projectivity and covers.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::action::{semidirect_product, GroupAction, SplitExtension};
use crate::error::{Error, Result};
use crate::group::{Elem, GroupHom, HomSearch, SearchOutcome};
use crate::words::{in_flat, Signature, Word, WordHom};

/// `(f, g)` between split extensions over the same base: `g k = k' f`,
/// `p' g = p`, `g s = s'`.
#[derive(Clone, Debug)]
pub struct SSEMorphism {
    pub source: SplitExtension,
    pub target: SplitExtension,
    pub f: GroupHom,
    pub g: GroupHom,
}

impl SSEMorphism {
    pub fn new(source: &SplitExtension, target: &SplitExtension, f: GroupHom, g: GroupHom) -> Result<Self> {
        if !source.base().same_table(target.base()) {
            return Err(Error::InvalidMorphism("split extensions over different bases".into()));
        }
        f.verify()?;
        g.verify()?;
        if !source.k().then(&g)?.same_as(&f.then(target.k())?) {
            return Err(Error::InvalidMorphism("g k differs from k' f".into()));
        }
        if !g.then(target.p())?.same_as(source.p()) {
            return Err(Error::InvalidMorphism("p' g differs from p".into()));
        }
        if !source.s().then(&g)?.same_as(target.s()) {
            return Err(Error::InvalidMorphism("g s differs from s'".into()));
        }
        Ok(SSEMorphism { source: source.clone(), target: target.clone(), f, g })
    }

    /// Builds `f` as the restriction of `g` to the kernels.
    pub fn from_total(source: &SplitExtension, target: &SplitExtension, g: GroupHom) -> Result<Self> {
        let f = restrict_to_kernels(source, target, &g)?;
        Self::new(source, target, f, g)
    }

    pub fn identity(ext: &SplitExtension) -> Self {
        SSEMorphism {
            source: ext.clone(),
            target: ext.clone(),
            f: GroupHom::identity(ext.kernel()),
            g: GroupHom::identity(ext.total()),
        }
    }

    pub fn then(&self, next: &SSEMorphism) -> Result<SSEMorphism> {
        Ok(SSEMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            f: self.f.then(&next.f)?,
            g: self.g.then(&next.g)?,
        })
    }

    /// Surjectivity of `f`; the equivalent surjectivity of `g` is asserted alongside.
    pub fn is_regular_epi(&self) -> Result<bool> {
        let (f, g) = (self.f.is_surjective(), self.g.is_surjective());
        if f != g {
            return Err(Error::InvariantBreach(format!(
                "f surjective = {f} but g surjective = {g} for a morphism of split extensions"
            )));
        }
        Ok(f)
    }

    pub fn digest_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for ext in [&self.source, &self.target] {
            out.extend(ext.total().digest_bytes());
            for h in [ext.k(), ext.p(), ext.s()] {
                out.extend(h.values().iter().flat_map(|&x| (x as u32).to_le_bytes()));
            }
        }
        out.extend(self.g.values().iter().flat_map(|&x| (x as u32).to_le_bytes()));
        out
    }
}

fn restrict_to_kernels(source: &SplitExtension, target: &SplitExtension, g: &GroupHom) -> Result<GroupHom> {
    let map = source
        .kernel()
        .elements()
        .map(|x| {
            target
                .kernel_preimage(g.apply(source.k().apply(x)))
                .ok_or_else(|| Error::InvalidMorphism("g does not preserve the kernels".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    GroupHom::from_map(source.kernel(), target.kernel(), map)
}

/// Outcome of a section or lift search.
#[derive(Clone, Debug)]
pub enum SectionSearch {
    Found(Box<SSEMorphism>),
    ProvenNone,
    BudgetExhausted,
}

impl SectionSearch {
    pub fn found(self) -> Option<SSEMorphism> {
        match self {
            SectionSearch::Found(m) => Some(*m),
            _ => None,
        }
    }
}

/// Searches for `g_l: E_src -> E_mid` over `B` with `h g_l = want`, where
/// `h: E_mid -> E_dst` and `want: E_src -> E_dst` are morphisms over `B`.
fn lift_over_base(src: &SplitExtension, mid: &SplitExtension, h: &GroupHom, want: &GroupHom, budget: u64) -> Result<SectionSearch> {
    let b = src.base();
    let mut gens: Vec<Elem> = b.generators().iter().map(|&x| src.s().apply(x)).collect();
    let n_base = gens.len();
    gens.extend(src.kernel().generators().iter().map(|&x| src.k().apply(x)));
    let mut search = HomSearch::with_generators(src.total(), mid.total(), gens.clone())?.budget(budget);
    for (i, &e) in gens.iter().enumerate() {
        if i < n_base {
            let forced = mid.s().apply(b.generators()[i]);
            search = search.restrict(i, |y| y == forced);
        } else {
            let w = want.apply(e);
            search = search.restrict(i, |y| h.apply(y) == w);
        }
    }
    match search.first(&mut |_| true) {
        SearchOutcome::Found(gl) => Ok(SectionSearch::Found(Box::new(SSEMorphism::from_total(src, mid, gl)?))),
        SearchOutcome::ProvenNone => Ok(SectionSearch::ProvenNone),
        SearchOutcome::BudgetExhausted => Ok(SectionSearch::BudgetExhausted),
    }
}

/// A morphism `(f', g')` back along a regular epi `m` with `m (f', g') = 1`.
pub fn brute_force_section(m: &SSEMorphism, budget: u64) -> Result<SectionSearch> {
    if !m.is_regular_epi()? {
        return Err(Error::Precondition("sections are only sought for regular epimorphisms".into()));
    }
    lift_over_base(&m.target, &m.source, &m.g, &GroupHom::identity(m.target.total()), budget)
}

/// Every morphism of split extensions `src -> dst` over the common base.
pub fn enumerate_sse_morphisms(src: &SplitExtension, dst: &SplitExtension, budget: u64) -> Result<Vec<SSEMorphism>> {
    if !src.base().same_table(dst.base()) {
        return Err(Error::InvalidMorphism("split extensions over different bases".into()));
    }
    let b = src.base();
    let mut gens: Vec<Elem> = b.generators().iter().map(|&x| src.s().apply(x)).collect();
    let n_base = gens.len();
    gens.extend(src.kernel().generators().iter().map(|&x| src.k().apply(x)));
    let mut search = HomSearch::with_generators(src.total(), dst.total(), gens)?.budget(budget);
    for i in 0..n_base {
        let forced = dst.s().apply(b.generators()[i]);
        search = search.restrict(i, |y| y == forced);
    }
    for i in n_base..search.generators().len() {
        search = search.restrict(i, |y| dst.kernel_preimage(y).is_some());
    }
    search.all()?.into_iter().map(|g| SSEMorphism::from_total(src, dst, g)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectivityReport {
    pub projective: bool,
    pub family_size: usize,
    pub family_digest: String,
    pub lifts_checked: usize,
    /// `(family index, description)` of the first morphism with no lift
    pub failure: Option<(usize, String)>,
}

pub fn family_digest(family: &[SSEMorphism]) -> String {
    let mut h = Sha256::new();
    for m in family {
        let bytes = m.digest_bytes();
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(&bytes);
    }
    hex::encode(h.finalize())
}

/// Projectivity of `obj` relative to `family`: every morphism from `obj`
/// into the codomain of a family epi lifts through it.
pub fn is_projective_rel(obj: &SplitExtension, family: &[SSEMorphism], budget: u64) -> Result<ProjectivityReport> {
    let mut lifts_checked = 0;
    for (i, e) in family.iter().enumerate() {
        if !e.is_regular_epi()? {
            return Err(Error::Precondition(format!("family member {i} is not a regular epimorphism")));
        }
        for m in enumerate_sse_morphisms(obj, &e.target, budget)? {
            lifts_checked += 1;
            match lift_over_base(obj, &e.source, &e.g, &m.g, budget)? {
                SectionSearch::Found(_) => {}
                SectionSearch::ProvenNone => {
                    return Ok(ProjectivityReport {
                        projective: false,
                        family_size: family.len(),
                        family_digest: family_digest(family),
                        lifts_checked,
                        failure: Some((i, format!("morphism with g = {:?} has no lift", m.g.values()))),
                    });
                }
                SectionSearch::BudgetExhausted => return Err(Error::BudgetExhausted(budget)),
            }
        }
    }
    Ok(ProjectivityReport {
        projective: true,
        family_size: family.len(),
        family_digest: family_digest(family),
        lifts_checked,
        failure: None,
    })
}

/// `B♭X -> B + X -> B`, kept as words over `(B, X)`.
#[derive(Clone, Debug)]
pub struct FreeSSE {
    sig: Signature,
}

impl FreeSSE {
    pub fn new(base: &crate::group::FiniteGroup, gens: &crate::group::FiniteGroup) -> Result<Self> {
        Ok(FreeSSE { sig: Signature::new(vec![base.clone(), gens.clone()])? })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// Kernel of the fold onto `B`.
    pub fn is_flat(&self, w: &Word) -> Result<bool> {
        in_flat(w)
    }

    /// `η(x)`: the one-letter word in the `X` slot.
    pub fn eta(&self, x: Elem) -> Result<Word> {
        Word::letter(&self.sig, 1, x)
    }
}

/// The cover `B + R -> X ⋊ B` given by `[s, k p]`.
#[derive(Clone, Debug)]
pub struct FreeCover {
    pub free: FreeSSE,
    pub evaluator: WordHom,
    /// the images of the generators generate the total group
    pub generates_total: bool,
    /// the kernel restriction `p` is onto
    pub kernel_surjective: bool,
    /// in the abelian case, the cover as a morphism `R ⊕ B -> X ⊕ B`
    pub materialized: Option<SSEMorphism>,
}

pub fn free_cover(ext: &SplitExtension, p: &GroupHom) -> Result<FreeCover> {
    if !p.target().same_table(ext.kernel()) {
        return Err(Error::InvalidMorphism("cover map must land in the kernel".into()));
    }
    if !p.is_surjective() {
        return Err(Error::Precondition("the cover map is not surjective".into()));
    }
    let free = FreeSSE::new(ext.base(), p.source())?;
    let kp = p.then(ext.k())?;
    let evaluator = WordHom::new(free.signature(), vec![ext.s().clone(), kp.clone()])?;
    let mut gens: Vec<Elem> = ext.base().elements().map(|b| ext.s().apply(b)).collect();
    gens.extend(p.source().elements().map(|r| kp.apply(r)));
    let generates_total = ext.total().closure_mask(&gens).iter().all(|&m| m);
    let kernel_surjective = p.is_surjective();
    let materialized = if ext.total().is_z4_module() && p.source().is_z4_module() {
        let src = semidirect_product(&GroupAction::trivial(ext.base(), p.source()))?;
        let nb = ext.base().order();
        let g = (0..src.total().order()).map(|e| ext.total().mul(kp.apply(e / nb), ext.s().apply(e % nb))).collect();
        let g = GroupHom::from_map(src.total(), ext.total(), g)?;
        let m = SSEMorphism::new(&src, ext, p.clone(), g)?;
        if !m.is_regular_epi()? {
            return Err(Error::InvariantBreach("materialized cover is not a regular epimorphism".into()));
        }
        Some(m)
    } else {
        None
    };
    Ok(FreeCover { free, evaluator, generates_total, kernel_surjective, materialized })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_group, trivial_group};

    fn reduction() -> GroupHom {
        GroupHom::from_generator_images(&cyclic_group(4).unwrap(), &cyclic_group(2).unwrap(), &[1], &[1]).unwrap()
    }

    #[test]
    fn quotient_morphism_over_z2() {
        let z2 = cyclic_group(2).unwrap();
        let z4 = cyclic_group(4).unwrap();
        let e4 = semidirect_product(&GroupAction::trivial(&z2, &z4)).unwrap();
        let e2 = semidirect_product(&GroupAction::trivial(&z2, &z2)).unwrap();
        let all = enumerate_sse_morphisms(&e4, &e2, u64::MAX).unwrap();
        assert_eq!(all.len(), 2);
        let epi = all.iter().find(|m| m.f.same_as(&reduction())).unwrap();
        assert!(epi.is_regular_epi().unwrap());
        assert!(epi.g.is_surjective());
        assert!(matches!(brute_force_section(epi, u64::MAX).unwrap(), SectionSearch::ProvenNone));
        let zero = all.iter().find(|m| m.f.is_trivial()).unwrap();
        assert!(!zero.is_regular_epi().unwrap());
    }

    #[test]
    fn identity_has_identity_section() {
        let z2 = cyclic_group(2).unwrap();
        let z3 = cyclic_group(3).unwrap();
        let inv: Vec<Elem> = z3.elements().map(|x| z3.inv(x)).collect();
        let ext = semidirect_product(&GroupAction::from_generator_images(&z2, &z3, &[1], &[inv]).unwrap()).unwrap();
        let id = SSEMorphism::identity(&ext);
        let s = brute_force_section(&id, u64::MAX).unwrap().found().unwrap();
        assert!(s.g.same_as(&GroupHom::identity(ext.total())));
    }

    #[test]
    fn relative_projectivity() {
        let one = trivial_group();
        let z2 = cyclic_group(2).unwrap();
        let z4 = cyclic_group(4).unwrap();
        let e2 = semidirect_product(&GroupAction::trivial(&one, &z2)).unwrap();
        let e4 = semidirect_product(&GroupAction::trivial(&one, &z4)).unwrap();
        assert!(is_projective_rel(&e2, &[], u64::MAX).unwrap().projective);
        let cover = SSEMorphism::from_total(&e4, &e2, reduction()).unwrap();
        let r = is_projective_rel(&e2, std::slice::from_ref(&cover), u64::MAX).unwrap();
        assert!(!r.projective);
        assert_eq!(r.family_digest.len(), 64);
        assert!(is_projective_rel(&e4, &[cover], u64::MAX).unwrap().projective);
    }

    #[test]
    fn z4_cover_materializes() {
        let z2 = cyclic_group(2).unwrap();
        let z4 = cyclic_group(4).unwrap();
        let ext = semidirect_product(&GroupAction::trivial(&z4, &z2)).unwrap();
        let c = free_cover(&ext, &reduction()).unwrap();
        assert!(c.generates_total && c.kernel_surjective);
        let m = c.materialized.unwrap();
        assert_eq!(m.source.total().order(), 16);
        assert!(m.is_regular_epi().unwrap());
        assert!(free_cover(&ext, &GroupHom::trivial(&z4, &z2)).is_err());
    }
}
