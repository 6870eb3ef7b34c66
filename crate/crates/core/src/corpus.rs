//! Generated fixtures: crossed-module candidates, split exact sequences,
//! morphisms of split extensions and epimorphisms for the section constructions.

use crate::action::{semidirect_product, GroupAction, SplitExtension};
use crate::condp::{free_module, module_with_basis, non_schreier_candidate, cover_epi};
use crate::error::{Error, Result};
use crate::group::{
    abelian_group, cyclic_group, dihedral_group, normal_subgroups, quaternion_group, quotient,
    symmetric_group, trivial_group, z4_module, Elem, FiniteGroup, GroupHom, Subgroup,
};
use crate::lifting::normal_inclusion_xmod;
use crate::sse::{enumerate_sse_morphisms, SSEMorphism};
use crate::xmod::{
    conjugation_xmod, discrete, product, xmod_from_normal_subgroup, xmod_kernel, CrossedModule, XModMorphism,
    XModSplitSES,
};

#[derive(Clone, Debug)]
pub struct Candidate {
    pub name: String,
    pub xmod: CrossedModule,
    /// whether the candidate was built to satisfy the axioms
    pub intended_valid: bool,
}

fn cand(name: impl Into<String>, xmod: CrossedModule, intended_valid: bool) -> Candidate {
    Candidate { name: name.into(), xmod, intended_valid }
}

fn inversion_action(actor: &FiniteGroup, carried: &FiniteGroup, gen: Elem) -> Result<GroupAction> {
    let inv: Vec<Elem> = carried.elements().map(|x| carried.inv(x)).collect();
    GroupAction::from_generator_images(actor, carried, &[gen], &[inv])
}

fn center(g: &FiniteGroup) -> Result<Subgroup> {
    let z: Vec<Elem> = g.elements().filter(|&x| g.elements().all(|y| g.mul(x, y) == g.mul(y, x))).collect();
    Subgroup::from_elements(g, &z)
}

/// `T -> T/Z(T)` with `T/Z(T)` acting through conjugation by representatives.
pub fn central_quotient_xmod(t: &FiniteGroup) -> Result<CrossedModule> {
    let (g, proj) = quotient(t, &center(t)?)?;
    let mut rep = vec![None; g.order()];
    for x in t.elements() {
        rep[proj.apply(x)].get_or_insert(x);
    }
    let mut table = Vec::with_capacity(g.order() * t.order());
    for a in g.elements() {
        let r = rep[a].expect("the projection is onto");
        for x in t.elements() {
            table.push(t.conj(r, x));
        }
    }
    CrossedModule::new(GroupAction::new(&g, t, table)?, proj)
}

/// The crossed-module corpus: every normal inclusion in `S3`, `S4`, `D4`, `Q8`,
/// conjugation, discrete, central, module and product crossed modules, and
/// deliberate violations. All groups have order at most 24.
pub fn xmod_candidates() -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for g in [symmetric_group(3)?, symmetric_group(4)?, dihedral_group(4)?, quaternion_group()] {
        for n in normal_subgroups(&g) {
            out.push(cand(format!("{} in {}", n.order(), g.label()), xmod_from_normal_subgroup(&g, &n)?, true));
        }
    }
    for g in [cyclic_group(2)?, cyclic_group(3)?, cyclic_group(4)?, cyclic_group(5)?, cyclic_group(6)?, abelian_group(&[2, 2])?, dihedral_group(5)?, dihedral_group(6)?] {
        out.push(cand(format!("conj {}", g.label()), conjugation_xmod(&g), true));
    }
    for g in [cyclic_group(2)?, cyclic_group(3)?, z4_module(1, 0)?, symmetric_group(3)?, quaternion_group()] {
        out.push(cand(format!("discrete {}", g.label()), discrete(&g), true));
    }
    for t in [quaternion_group(), dihedral_group(4)?, dihedral_group(6)?] {
        out.push(cand(format!("central quotient {}", t.label()), central_quotient_xmod(&t)?, true));
    }
    // abelian T with trivial action and central image
    let z2 = cyclic_group(2)?;
    let z3 = cyclic_group(3)?;
    let z4 = cyclic_group(4)?;
    let z6 = cyclic_group(6)?;
    let d4 = dihedral_group(4)?;
    let r2 = d4.find("r2").ok_or_else(|| Error::InvalidGroup("D4 naming".into()))?;
    let red = GroupHom::from_generator_images(&z4, &z2, &[1], &[1])?;
    out.push(cand("Z4 onto Z2", CrossedModule::new(GroupAction::trivial(&z2, &z4), red)?, true));
    let to_center = GroupHom::from_generator_images(&z2, &d4, &[1], &[r2])?;
    out.push(cand("Z2 onto center of D4", CrossedModule::new(GroupAction::trivial(&d4, &z2), to_center)?, true));
    let z6_z3 = GroupHom::from_generator_images(&z6, &z3, &[1], &[1])?;
    out.push(cand("Z6 onto Z3", CrossedModule::new(GroupAction::trivial(&z3, &z6), z6_z3)?, true));
    // modules with zero boundary
    out.push(cand("Z3 module over Z2", CrossedModule::new(inversion_action(&z2, &z3, 1)?, GroupHom::trivial(&z3, &z2))?, true));
    out.push(cand("Z4 module over Z2", CrossedModule::new(inversion_action(&z2, &z4, 1)?, GroupHom::trivial(&z4, &z2))?, true));
    let z5 = cyclic_group(5)?;
    let mul2: Vec<Elem> = z5.elements().map(|x| (2 * x) % 5).collect();
    let aut = GroupAction::from_generator_images(&z4, &z5, &[1], &[mul2])?;
    out.push(cand("Z5 module over Z4", CrossedModule::new(aut, GroupHom::trivial(&z5, &z4))?, true));
    let s3 = symmetric_group(3)?;
    let v = abelian_group(&[2, 2])?;
    let v_action = {
        // S3 permuting the three nonzero vectors of Z2^2
        let t = s3.find("(1 2)").expect("S3 naming");
        let c = s3.find("(1 2 3)").expect("S3 naming");
        GroupAction::from_generator_images(&s3, &v, &[t, c], &[vec![0, 2, 1, 3], vec![0, 3, 1, 2]])?
    };
    out.push(cand("Z2^2 module over S3", CrossedModule::new(v_action, GroupHom::trivial(&v, &s3))?, true));
    // products
    let pairs = [
        (conjugation_xmod(&z2), discrete(&z3)),
        (conjugation_xmod(&z3), conjugation_xmod(&z2)),
        (discrete(&z2), discrete(&z2)),
        (conjugation_xmod(&s3), discrete(&trivial_group())),
        (conjugation_xmod(&z2), conjugation_xmod(&z2)),
    ];
    for (a, b) in pairs {
        let p = product(&a, &b)?;
        out.push(cand(format!("product {} x {}", a.label(), b.label()), p.xmod, true));
    }
    out.extend(violations()?);
    Ok(out)
}

/// Candidates failing one of the two axioms.
pub fn violations() -> Result<Vec<Candidate>> {
    let s3 = symmetric_group(3)?;
    let one = trivial_group();
    let z2 = cyclic_group(2)?;
    let z3 = cyclic_group(3)?;
    let z4 = cyclic_group(4)?;
    let q8 = quaternion_group();
    let d4 = dihedral_group(4)?;
    let mut out = Vec::new();
    out.push(cand(
        "S3 over trivial",
        CrossedModule::candidate(GroupAction::trivial(&one, &s3), GroupHom::trivial(&s3, &one))?,
        false,
    ));
    let t = s3.find("(1 2)").expect("S3 naming");
    out.push(cand(
        "non-normal Z2 in S3",
        CrossedModule::candidate(GroupAction::trivial(&s3, &z2), GroupHom::from_generator_images(&z2, &s3, &[1], &[t])?)?,
        false,
    ));
    let c = s3.find("(1 2 3)").expect("S3 naming");
    out.push(cand(
        "A3 in S3 with trivial action",
        CrossedModule::candidate(GroupAction::trivial(&s3, &z3), GroupHom::from_generator_images(&z3, &s3, &[1], &[c])?)?,
        false,
    ));
    let through_z2 = {
        let inv: Vec<Elem> = z4.elements().map(|x| z4.inv(x)).collect();
        GroupAction::from_generator_images(&z4, &z4, &[1], &[inv])?
    };
    out.push(cand("Z4 identity with inversion", CrossedModule::candidate(through_z2, GroupHom::identity(&z4))?, false));
    out.push(cand(
        "D4 conjugation with zero boundary",
        CrossedModule::candidate(GroupAction::conjugation(&d4), GroupHom::trivial(&d4, &d4))?,
        false,
    ));
    out.push(cand(
        "Q8 identity with trivial action",
        CrossedModule::candidate(GroupAction::trivial(&q8, &q8), GroupHom::identity(&q8))?,
        false,
    ));
    Ok(out)
}

/// Split short exact sequences of crossed modules: kernels of product
/// projections and of conjugation crossed modules over split group epis.
pub fn split_sequences() -> Result<Vec<XModSplitSES>> {
    let mut out = Vec::new();
    let smalls = [
        conjugation_xmod(&cyclic_group(2)?),
        conjugation_xmod(&cyclic_group(3)?),
        discrete(&cyclic_group(2)?),
        discrete(&cyclic_group(3)?),
        conjugation_xmod(&symmetric_group(3)?),
    ];
    for a in &smalls {
        for b in &smalls {
            if a.g().order() * b.g().order() > 36 {
                continue;
            }
            let p = product(a, b)?;
            out.push(xmod_kernel(&p.p2, &p.i2)?);
        }
    }
    // conjugation crossed modules over split surjections G -> H
    let s3 = symmetric_group(3)?;
    let s4 = symmetric_group(4)?;
    let d4 = dihedral_group(4)?;
    let z2 = cyclic_group(2)?;
    let sign = |g: &FiniteGroup, odd: &str| -> Result<(GroupHom, GroupHom)> {
        let o = g.find(odd).ok_or_else(|| Error::InvalidGroup(format!("{odd} not in {}", g.label())))?;
        let map = g.elements().map(|x| usize::from(perm_is_odd(g, x))).collect();
        Ok((GroupHom::from_map(g, &z2, map)?, GroupHom::from_generator_images(&z2, g, &[1], &[o])?))
    };
    for (g, odd) in [(&s3, "(1 2)"), (&s4, "(1 2)"), (&s4, "(1 3)")] {
        let (f, s) = sign(g, odd)?;
        out.push(conjugation_split(g, &z2, &f, &s)?);
    }
    // D4 -> Z2 killing r, split by s
    let r = d4.find("r").expect("D4 naming");
    let sref = d4.find("s").expect("D4 naming");
    let f = GroupHom::from_generator_images(&d4, &z2, &[r, sref], &[0, 1])?;
    let s = GroupHom::from_generator_images(&z2, &d4, &[1], &[sref])?;
    out.push(conjugation_split(&d4, &z2, &f, &s)?);
    // S4 -> S3 through the Klein four-group
    let v4 = normal_subgroups(&s4).into_iter().find(|n| n.order() == 4).expect("V4 is normal in S4");
    let (q, proj) = quotient(&s4, &v4)?;
    let back = crate::group::lift_through(&GroupHom::identity(&q), &proj, crate::group::DEFAULT_BUDGET, &mut |_| true)?
        .found()
        .ok_or_else(|| Error::InvariantBreach("S4 -> S3 does not split".into()))?;
    out.push(conjugation_split(&s4, &q, &proj, &back)?);
    Ok(out)
}

fn perm_is_odd(g: &FiniteGroup, x: Elem) -> bool {
    // names are cycle notation; a k-cycle is odd when k is even
    let name = g.name(x);
    name.split(')').filter(|c| !c.trim().is_empty()).map(|c| c.trim_start_matches('(').split_whitespace().count()).filter(|&k| k > 0 && k % 2 == 0).count()
        % 2
        == 1
}

fn conjugation_split(g: &FiniteGroup, h: &FiniteGroup, f: &GroupHom, s: &GroupHom) -> Result<XModSplitSES> {
    let (a, b) = (conjugation_xmod(g), conjugation_xmod(h));
    let fm = XModMorphism::new(&a, &b, f.clone(), f.clone())?;
    let sm = XModMorphism::new(&b, &a, s.clone(), s.clone())?;
    xmod_kernel(&fm, &sm)
}

/// Split extensions over `Z2` and `Z3` from a few actions.
pub fn extensions_over(base: &FiniteGroup) -> Result<Vec<SplitExtension>> {
    let mut out = Vec::new();
    let mut kernels = vec![cyclic_group(2)?, cyclic_group(3)?, cyclic_group(4)?, abelian_group(&[2, 2])?];
    if base.order() == 3 {
        kernels.push(cyclic_group(7)?);
    }
    for k in &kernels {
        out.push(semidirect_product(&GroupAction::trivial(base, k))?);
    }
    if base.order() == 2 {
        for k in [cyclic_group(3)?, cyclic_group(4)?] {
            out.push(semidirect_product(&inversion_action(base, &k, 1)?)?);
        }
        let v = abelian_group(&[2, 2])?;
        out.push(semidirect_product(&GroupAction::from_generator_images(base, &v, &[1], &[vec![0, 2, 1, 3]])?)?);
    }
    if base.order() == 3 {
        let v = abelian_group(&[2, 2])?;
        out.push(semidirect_product(&GroupAction::from_generator_images(base, &v, &[1], &[vec![0, 3, 1, 2]])?)?);
        let z7 = cyclic_group(7)?;
        let mul2: Vec<Elem> = z7.elements().map(|x| (2 * x) % 7).collect();
        out.push(semidirect_product(&GroupAction::from_generator_images(base, &z7, &[1], &[mul2])?)?);
    }
    Ok(out)
}

/// Every morphism between every pair of the extensions over `Z2` and over `Z3`.
pub fn sse_morphisms(budget: u64) -> Result<Vec<SSEMorphism>> {
    let mut out = Vec::new();
    for base in [cyclic_group(2)?, cyclic_group(3)?] {
        let exts = extensions_over(&base)?;
        for a in &exts {
            for b in &exts {
                out.extend(enumerate_sse_morphisms(a, b, budget)?);
            }
        }
    }
    Ok(out)
}

/// An epimorphism onto a normal-inclusion crossed module with the split
/// extension presenting the target.
#[derive(Clone, Debug)]
pub struct SectionFixture {
    pub name: String,
    pub epi: XModMorphism,
    pub ext: SplitExtension,
}

fn identity_fixture(name: &str, ext: SplitExtension) -> Result<SectionFixture> {
    let xm = normal_inclusion_xmod(&ext)?;
    Ok(SectionFixture { name: name.into(), epi: XModMorphism::identity(&xm), ext })
}

fn collapse_fixture(name: &str, ext: SplitExtension, other: &CrossedModule) -> Result<SectionFixture> {
    let xm = normal_inclusion_xmod(&ext)?;
    let p = product(&xm, other)?;
    Ok(SectionFixture { name: name.into(), epi: p.p1, ext })
}

/// Epimorphisms onto normal-inclusion targets on which a section exists.
pub fn section_fixtures() -> Result<Vec<SectionFixture>> {
    let z2 = cyclic_group(2)?;
    let z3 = cyclic_group(3)?;
    let s3_ext = semidirect_product(&inversion_action(&z2, &z3, 1)?)?;
    let d4_ext = semidirect_product(&inversion_action(&z2, &cyclic_group(4)?, 1)?)?;
    let plain = semidirect_product(&GroupAction::trivial(&z2, &z3))?;
    let mut out = vec![
        identity_fixture("identity on Z3 in S3", s3_ext.clone())?,
        identity_fixture("identity on Z4 in D4", d4_ext.clone())?,
        identity_fixture("identity on Z3 in Z3 x Z2", plain.clone())?,
        collapse_fixture("S3 collapse of conj Z2", s3_ext.clone(), &conjugation_xmod(&z2))?,
        collapse_fixture("S3 collapse of discrete Z3", s3_ext.clone(), &discrete(&z3))?,
        collapse_fixture("D4 collapse of conj Z2", d4_ext.clone(), &conjugation_xmod(&z2))?,
        collapse_fixture("Z3 x Z2 collapse of conj S3", plain, &conjugation_xmod(&symmetric_group(3)?))?,
    ];
    // (A4 in S4) -> (Z3 in S3) through the Klein four-group
    let s4 = symmetric_group(4)?;
    let normals = normal_subgroups(&s4);
    let v4 = normals.iter().find(|n| n.order() == 4).expect("V4");
    let a4 = normals.iter().find(|n| n.order() == 12).expect("A4");
    let src = xmod_from_normal_subgroup(&s4, a4)?;
    let (q, proj) = quotient(&s4, v4)?;
    let a4q: Vec<Elem> = a4.elements().iter().map(|&x| proj.apply(x)).collect();
    let a4q = Subgroup::generated_by(&q, &a4q)?;
    let (k_group, k) = a4q.to_group("A4/V4")?;
    let odd = q.elements().find(|&x| !a4q.contains(x)).expect("odd coset");
    let p_map = q.elements().map(|x| usize::from(!a4q.contains(x))).collect();
    let p = GroupHom::from_map(&q, &z2, p_map)?;
    let s = GroupHom::from_generator_images(&z2, &q, &[1], &[odd])?;
    let _ = k_group;
    let ext = SplitExtension::new(k, p, s)?;
    let dst = normal_inclusion_xmod(&ext)?;
    let epi = crate::xmod::square_to_morphism(&src, &dst, &proj)?;
    out.push(SectionFixture { name: "A4 in S4 onto Z3 in S3".into(), epi, ext });
    // ℤ/4ℤ covers
    let (cand, cext) = non_schreier_candidate()?;
    for extra in 0..2 {
        let c = cover_epi(&cext, extra)?;
        out.push(SectionFixture { name: format!("candidate {}", c.kind), epi: c.epi, ext: cext.clone() });
    }
    let _ = cand;
    let (p1, _) = free_module(1)?;
    let (x1, _) = free_module(1)?;
    let ext1 = semidirect_product(&GroupAction::trivial(&p1, &x1))?;
    let c = cover_epi(&ext1, 1)?;
    out.push(SectionFixture { name: "Z4 -> Z4^2 cover+1".into(), epi: c.epi, ext: ext1 });
    Ok(out)
}

/// `Z4 -> Z4` identity onto `Z2 -> Z2` with `P` trivial: no equivariant section.
pub fn no_section_fixture() -> Result<SectionFixture> {
    let one = trivial_group();
    let z2 = cyclic_group(2)?;
    let z4 = cyclic_group(4)?;
    let src = conjugation_xmod(&z4);
    let ext = semidirect_product(&GroupAction::trivial(&one, &z2))?;
    let dst = normal_inclusion_xmod(&ext)?;
    let red = GroupHom::from_generator_images(&z4, &z2, &[1], &[1])?;
    let red_total = GroupHom::from_generator_images(&z4, ext.total(), &[1], &[ext.k().apply(1)])?;
    Ok(SectionFixture { name: "Z4 onto Z2".into(), epi: XModMorphism::new(&src, &dst, red, red_total)?, ext })
}

fn injective_arrow(t: (usize, usize), g: (usize, usize), images: &[Elem]) -> Result<CrossedModule> {
    let (tm, tb) = module_with_basis(t.0, t.1)?;
    let (gm, _) = module_with_basis(g.0, g.1)?;
    let d = GroupHom::from_generator_images(&tm, &gm, &tb, images)?;
    if !d.is_injective() {
        return Err(Error::InvariantBreach("fixture arrow is not injective".into()));
    }
    CrossedModule::new(GroupAction::trivial(&gm, &tm), d)
}

/// Direct-sum collapses `(P ⊕ K -> Q ⊕ K) -> (P -> Q)` of injective arrows of
/// ℤ/4ℤ-modules.
pub fn pullback_fixtures() -> Result<Vec<(String, XModMorphism)>> {
    // elements are indexed in mixed radix with the first coordinate most significant
    let targets = vec![
        ("Z2 in Z4", injective_arrow((0, 1), (1, 0), &[2])?),
        ("Z4 in Z4^2", injective_arrow((1, 0), (2, 0), &[4])?),
        ("Z2 in Z2^2", injective_arrow((0, 1), (0, 2), &[1])?),
        ("0 in Z4", injective_arrow((0, 0), (1, 0), &[])?),
        ("Z4 = Z4", injective_arrow((1, 0), (1, 0), &[1])?),
        ("Z2 in Z4+Z2", injective_arrow((0, 1), (1, 1), &[4])?),
    ];
    let summands = vec![
        ("Z2 = Z2", injective_arrow((0, 1), (0, 1), &[1])?),
        ("0 in Z2", injective_arrow((0, 0), (0, 1), &[])?),
        ("Z2 in Z4", injective_arrow((0, 1), (1, 0), &[2])?),
    ];
    let mut out = Vec::new();
    for (tn, t) in &targets {
        for (kn, k) in &summands {
            let p = product(t, k)?;
            out.push((format!("({tn}) + ({kn})"), p.p1));
        }
    }
    Ok(out)
}

/// `(0 -> Z4) -> (0 -> Z2)`: the induced map on cokernels has no section.
pub fn pullback_no_section_fixture() -> Result<XModMorphism> {
    let z4 = z4_module(1, 0)?;
    let z2 = z4_module(0, 1)?;
    let (a, b) = (discrete(&z4), discrete(&z2));
    let red = GroupHom::from_generator_images(&z4, &z2, &[1], &[1])?;
    XModMorphism::new(&a, &b, GroupHom::trivial(a.t(), b.t()), red)
}

/// Pairs `(H, xm)` with `|H| <= 4` and `|T|, |G| <= 8`.
pub fn adjunction_pairs() -> Result<Vec<(FiniteGroup, CrossedModule)>> {
    let hs = [trivial_group(), cyclic_group(2)?, cyclic_group(3)?, cyclic_group(4)?, abelian_group(&[2, 2])?];
    let z2 = cyclic_group(2)?;
    let z4 = cyclic_group(4)?;
    let red = GroupHom::from_generator_images(&z4, &z2, &[1], &[1])?;
    let d4 = dihedral_group(4)?;
    let q8 = quaternion_group();
    let mut xms = vec![
        conjugation_xmod(&z2),
        conjugation_xmod(&symmetric_group(3)?),
        discrete(&cyclic_group(3)?),
        CrossedModule::new(GroupAction::trivial(&z2, &z4), red)?,
        central_quotient_xmod(&q8)?,
        CrossedModule::new(inversion_action(&z2, &cyclic_group(3)?, 1)?, GroupHom::trivial(&cyclic_group(3)?, &z2))?,
    ];
    for n in normal_subgroups(&d4) {
        if n.order() == 4 {
            xms.push(xmod_from_normal_subgroup(&d4, &n)?);
        }
    }
    let mut out = Vec::new();
    for h in &hs {
        for xm in &xms {
            out.push((h.clone(), xm.clone()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_sizes() {
        let c = xmod_candidates().unwrap();
        assert!(c.len() >= 50, "{}", c.len());
        assert!(c.iter().filter(|x| !x.intended_valid).count() >= 5);
        assert!(c.iter().all(|x| x.xmod.t().order() <= 24 && x.xmod.g().order() <= 24));
        for x in &c {
            assert_eq!(x.xmod.is_valid(), x.intended_valid, "{}", x.name);
        }
        assert!(split_sequences().unwrap().len() >= 20);
    }

    #[test]
    fn parity() {
        let s4 = symmetric_group(4).unwrap();
        assert!(perm_is_odd(&s4, s4.find("(1 2 3 4)").unwrap()));
        assert!(!perm_is_odd(&s4, s4.find("(1 2)(3 4)").unwrap()));
        assert!(!perm_is_odd(&s4, s4.identity()));
    }
}
