//! Definition files: TOML tables of named groups, homomorphisms, actions,
//! crossed modules, morphisms, split extensions, families and set maps.
//!
//! ```toml
//! [group.S3]
//! permutations = ["(1 2)", "(1 2 3)"]
//! degree = 3
//!
//! [xmod.A3]
//! normal = { group = "S3", generators = ["(1 2 3)"] }
//! ```

use std::collections::BTreeMap;
use std::ops::Range;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use toml::Spanned;

use xmodkit::action::{semidirect_product, GroupAction, SplitExtension};
use xmodkit::group::{
    abelian_group, cycle_notation, cyclic_group, dihedral_group, from_permutations, parse_cycles, quaternion_group,
    symmetric_group, z4_module, Elem, FiniteGroup, GroupHom, Subgroup,
};
use xmodkit::xmod::{conjugation_xmod, discrete, xmod_from_normal_subgroup, CrossedModule, XModMorphism};

use crate::CliError;

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default)]
    group: BTreeMap<String, Spanned<RawGroup>>,
    #[serde(default)]
    hom: BTreeMap<String, Spanned<RawHom>>,
    #[serde(default)]
    action: BTreeMap<String, Spanned<RawAction>>,
    #[serde(default)]
    xmod: BTreeMap<String, Spanned<RawXMod>>,
    #[serde(default)]
    morphism: BTreeMap<String, Spanned<RawMorphism>>,
    #[serde(default)]
    sse: BTreeMap<String, Spanned<RawSse>>,
    #[serde(default)]
    family: BTreeMap<String, Spanned<RawFamily>>,
    #[serde(default)]
    setmap: BTreeMap<String, Spanned<RawSetMap>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    cyclic: Option<usize>,
    abelian: Option<Vec<usize>>,
    symmetric: Option<usize>,
    dihedral: Option<usize>,
    quaternion: Option<bool>,
    /// `[free rank, rank of the Z2 part]`
    z4: Option<[usize; 2]>,
    permutations: Option<Vec<Spanned<String>>>,
    degree: Option<usize>,
    elements: Option<Vec<String>>,
    table: Option<Vec<Vec<Spanned<String>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHom {
    source: Spanned<String>,
    target: Spanned<String>,
    /// images of generating elements
    images: BTreeMap<String, Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    actor: Spanned<String>,
    carried: Spanned<String>,
    kind: Option<Spanned<String>>,
    /// for each acting element, the images of generators of the carried group
    generators: Option<BTreeMap<String, BTreeMap<String, Spanned<String>>>>,
    /// conjugation through an injective homomorphism into the actor
    via: Option<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNormal {
    group: Spanned<String>,
    generators: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawXMod {
    boundary: Option<Spanned<String>>,
    action: Option<Spanned<String>>,
    conjugation: Option<Spanned<String>>,
    discrete: Option<Spanned<String>>,
    normal: Option<RawNormal>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMorphism {
    source: Spanned<String>,
    target: Spanned<String>,
    t: Spanned<String>,
    g: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSse {
    action: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    members: Vec<Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSetMap {
    f: Vec<usize>,
    s: Vec<usize>,
    y: usize,
}

/// A split epimorphism of finite sets `f: X -> Y` with section `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetMap {
    pub f: Vec<usize>,
    pub s: Vec<usize>,
    pub y: usize,
}

/// A loaded definition file with every reference resolved.
#[derive(Clone, Debug, Default)]
pub struct Definitions {
    pub groups: BTreeMap<String, FiniteGroup>,
    pub homs: BTreeMap<String, GroupHom>,
    pub actions: BTreeMap<String, GroupAction>,
    pub xmods: BTreeMap<String, CrossedModule>,
    pub morphisms: BTreeMap<String, XModMorphism>,
    pub sses: BTreeMap<String, SplitExtension>,
    pub families: BTreeMap<String, Vec<String>>,
    pub setmaps: BTreeMap<String, SetMap>,
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

struct Loader<'a> {
    src: &'a str,
    defs: Definitions,
    // permutation degree per group, for normalizing cycle names
    degrees: BTreeMap<String, usize>,
}

impl<'a> Loader<'a> {
    fn err(&self, span: Range<usize>, message: impl Into<String>) -> CliError {
        let (line, column) = line_col(self.src, span.start);
        CliError::Definition { line, column, message: message.into() }
    }

    fn core(&self, span: Range<usize>, what: &str, e: xmodkit::error::Error) -> CliError {
        if let xmodkit::error::Error::BudgetExhausted(_) = e {
            return CliError::Core(e);
        }
        self.err(span, format!("{what}: {e}"))
    }

    fn group(&self, name: &Spanned<String>) -> Result<FiniteGroup, CliError> {
        self.defs.groups.get(name.get_ref()).cloned().ok_or_else(|| self.err(name.span(), format!("unknown group `{}`", name.get_ref())))
    }

    fn hom(&self, name: &Spanned<String>) -> Result<GroupHom, CliError> {
        self.defs.homs.get(name.get_ref()).cloned().ok_or_else(|| self.err(name.span(), format!("unknown hom `{}`", name.get_ref())))
    }

    fn xmod(&self, name: &Spanned<String>) -> Result<CrossedModule, CliError> {
        self.defs.xmods.get(name.get_ref()).cloned().ok_or_else(|| self.err(name.span(), format!("unknown xmod `{}`", name.get_ref())))
    }

    fn group_name_of(&self, g: &FiniteGroup) -> Option<&String> {
        self.defs.groups.iter().find(|(_, h)| h.same_table(g)).map(|(n, _)| n)
    }

    fn elem(&self, g: &FiniteGroup, name: &str, span: Range<usize>) -> Result<Elem, CliError> {
        if let Some(x) = g.find(name.trim()) {
            return Ok(x);
        }
        let degree = self.group_name_of(g).and_then(|n| self.degrees.get(n));
        if let Some(&d) = degree {
            if let Ok(p) = parse_cycles(name, d) {
                if let Some(x) = g.find(&cycle_notation(&p)) {
                    return Ok(x);
                }
            }
        }
        Err(self.err(span, format!("`{name}` is not an element of {}", g.label())))
    }

    fn load_group(&mut self, name: &str, raw: &Spanned<RawGroup>) -> Result<(), CliError> {
        let span = raw.span();
        let r = raw.get_ref();
        let kinds = [
            r.cyclic.is_some(),
            r.abelian.is_some(),
            r.symmetric.is_some(),
            r.dihedral.is_some(),
            r.quaternion.is_some(),
            r.z4.is_some(),
            r.permutations.is_some(),
            r.table.is_some(),
        ];
        if kinds.iter().filter(|&&k| k).count() != 1 {
            return Err(self.err(span, format!("group `{name}` needs exactly one of cyclic, abelian, symmetric, dihedral, quaternion, z4, permutations, table")));
        }
        if r.degree.is_some() != r.permutations.is_some() {
            return Err(self.err(span, format!("group `{name}`: degree goes with permutations")));
        }
        if r.elements.is_some() != r.table.is_some() {
            return Err(self.err(span, format!("group `{name}`: elements go with table")));
        }
        let what = format!("group `{name}`");
        let g = if let Some(n) = r.cyclic {
            cyclic_group(n).map_err(|e| self.core(span.clone(), &what, e))?
        } else if let Some(m) = &r.abelian {
            abelian_group(m).map_err(|e| self.core(span.clone(), &what, e))?
        } else if let Some(n) = r.symmetric {
            self.degrees.insert(name.into(), n);
            symmetric_group(n).map_err(|e| self.core(span.clone(), &what, e))?
        } else if let Some(n) = r.dihedral {
            dihedral_group(n).map_err(|e| self.core(span.clone(), &what, e))?
        } else if r.quaternion.is_some() {
            quaternion_group()
        } else if let Some([a, b]) = r.z4 {
            z4_module(a, b).map_err(|e| self.core(span.clone(), &what, e))?
        } else if let Some(gens) = &r.permutations {
            let degree = r.degree.expect("checked above");
            let perms = gens
                .iter()
                .map(|s| parse_cycles(s.get_ref(), degree).map_err(|e| self.core(s.span(), &what, e)))
                .collect::<Result<Vec<_>, _>>()?;
            self.degrees.insert(name.into(), degree);
            from_permutations(name, degree, &perms).map_err(|e| self.core(span.clone(), &what, e))?
        } else {
            let names = r.elements.clone().expect("checked above");
            let rows = r.table.as_ref().expect("checked above");
            let n = names.len();
            if rows.len() != n {
                return Err(self.err(span, format!("group `{name}`: table has {} rows for {n} elements", rows.len())));
            }
            let mut table = Vec::with_capacity(n * n);
            for row in rows {
                if row.len() != n {
                    let at = row.first().map_or(span.clone(), |c| c.span());
                    return Err(self.err(at, format!("group `{name}`: row has {} entries for {n} elements", row.len())));
                }
                for cell in row {
                    let x = names
                        .iter()
                        .position(|s| s == cell.get_ref())
                        .ok_or_else(|| self.err(cell.span(), format!("`{}` is not an element of `{name}`", cell.get_ref())))?;
                    table.push(x);
                }
            }
            FiniteGroup::from_table(name, n, table, Some(names)).map_err(|e| self.core(span.clone(), &what, e))?
        };
        self.defs.groups.insert(name.into(), g.with_label(name));
        Ok(())
    }

    fn load_hom(&mut self, name: &str, raw: &Spanned<RawHom>) -> Result<(), CliError> {
        let r = raw.get_ref();
        let (src, tgt) = (self.group(&r.source)?, self.group(&r.target)?);
        let mut gens = Vec::new();
        let mut images = Vec::new();
        for (x, y) in &r.images {
            gens.push(self.elem(&src, x, raw.span())?);
            images.push(self.elem(&tgt, y.get_ref(), y.span())?);
        }
        let h = GroupHom::from_generator_images(&src, &tgt, &gens, &images).map_err(|e| self.core(raw.span(), &format!("hom `{name}`"), e))?;
        self.defs.homs.insert(name.into(), h);
        Ok(())
    }

    fn load_action(&mut self, name: &str, raw: &Spanned<RawAction>) -> Result<(), CliError> {
        let r = raw.get_ref();
        let (actor, carried) = (self.group(&r.actor)?, self.group(&r.carried)?);
        let what = format!("action `{name}`");
        let given = [r.kind.is_some(), r.generators.is_some(), r.via.is_some()];
        if given.iter().filter(|&&k| k).count() != 1 {
            return Err(self.err(raw.span(), format!("{what} needs exactly one of kind, generators, via")));
        }
        let action = if let Some(kind) = &r.kind {
            match kind.get_ref().as_str() {
                "trivial" => GroupAction::trivial(&actor, &carried),
                "conjugation" if actor.same_table(&carried) => GroupAction::conjugation(&actor),
                "conjugation" => return Err(self.err(kind.span(), "conjugation needs actor = carried; use `via` for a subgroup")),
                other => return Err(self.err(kind.span(), format!("unknown action kind `{other}`"))),
            }
        } else if let Some(via) = &r.via {
            let inc = self.hom(via)?;
            if !inc.source().same_table(&carried) || !inc.target().same_table(&actor) {
                return Err(self.err(via.span(), format!("`{}` must map the carried group into the actor", via.get_ref())));
            }
            GroupAction::conjugation_on(&inc).map_err(|e| self.core(via.span(), &what, e))?
        } else {
            let mut acting = Vec::new();
            let mut perms = Vec::new();
            for (a, imgs) in r.generators.as_ref().expect("checked above") {
                acting.push(self.elem(&actor, a, raw.span())?);
                let mut xs = Vec::new();
                let mut ys = Vec::new();
                for (x, y) in imgs {
                    xs.push(self.elem(&carried, x, y.span())?);
                    ys.push(self.elem(&carried, y.get_ref(), y.span())?);
                }
                let auto = GroupHom::from_generator_images(&carried, &carried, &xs, &ys).map_err(|e| self.core(raw.span(), &what, e))?;
                perms.push(auto.values().to_vec());
            }
            GroupAction::from_generator_images(&actor, &carried, &acting, &perms).map_err(|e| self.core(raw.span(), &what, e))?
        };
        self.defs.actions.insert(name.into(), action);
        Ok(())
    }

    fn load_xmod(&mut self, name: &str, raw: &Spanned<RawXMod>) -> Result<(), CliError> {
        let r = raw.get_ref();
        let what = format!("xmod `{name}`");
        let given = [r.boundary.is_some(), r.conjugation.is_some(), r.discrete.is_some(), r.normal.is_some()];
        if given.iter().filter(|&&k| k).count() != 1 || r.action.is_some() != r.boundary.is_some() {
            return Err(self.err(raw.span(), format!("{what} needs boundary with action, or one of conjugation, discrete, normal")));
        }
        let xm = if let Some(g) = &r.conjugation {
            conjugation_xmod(&self.group(g)?)
        } else if let Some(x) = &r.discrete {
            discrete(&self.group(x)?)
        } else if let Some(n) = &r.normal {
            let g = self.group(&n.group)?;
            let gens = n.generators.iter().map(|s| self.elem(&g, s.get_ref(), s.span())).collect::<Result<Vec<_>, _>>()?;
            let sub = Subgroup::generated_by(&g, &gens).map_err(|e| self.core(n.group.span(), &what, e))?;
            xmod_from_normal_subgroup(&g, &sub).map_err(|e| self.core(n.group.span(), &what, e))?
        } else {
            let b = r.boundary.as_ref().expect("checked above");
            let a = r.action.as_ref().expect("checked above");
            let d = self.hom(b)?;
            let action = match a.get_ref().as_str() {
                "trivial" => GroupAction::trivial(d.target(), d.source()),
                "conjugation" => GroupAction::conjugation_on(&d).map_err(|e| self.core(a.span(), &what, e))?,
                other => self.defs.actions.get(other).cloned().ok_or_else(|| self.err(a.span(), format!("unknown action `{other}`")))?,
            };
            CrossedModule::candidate(action, d).map_err(|e| self.core(raw.span(), &what, e))?
        };
        self.defs.xmods.insert(name.into(), xm);
        Ok(())
    }

    fn load_morphism(&mut self, name: &str, raw: &Spanned<RawMorphism>) -> Result<(), CliError> {
        let r = raw.get_ref();
        let (src, dst) = (self.xmod(&r.source)?, self.xmod(&r.target)?);
        let (t, g) = (self.hom(&r.t)?, self.hom(&r.g)?);
        let m = XModMorphism::new(&src, &dst, t, g).map_err(|e| self.core(raw.span(), &format!("morphism `{name}`"), e))?;
        self.defs.morphisms.insert(name.into(), m);
        Ok(())
    }

    fn load_sse(&mut self, name: &str, raw: &Spanned<RawSse>) -> Result<(), CliError> {
        let a = &raw.get_ref().action;
        let action = self.defs.actions.get(a.get_ref()).ok_or_else(|| self.err(a.span(), format!("unknown action `{}`", a.get_ref())))?;
        let ext = semidirect_product(action).map_err(|e| self.core(raw.span(), &format!("sse `{name}`"), e))?;
        self.defs.sses.insert(name.into(), ext);
        Ok(())
    }

    fn load_family(&mut self, name: &str, raw: &Spanned<RawFamily>) -> Result<(), CliError> {
        let mut members = Vec::new();
        for m in &raw.get_ref().members {
            if !self.defs.morphisms.contains_key(m.get_ref()) {
                return Err(self.err(m.span(), format!("unknown morphism `{}`", m.get_ref())));
            }
            members.push(m.get_ref().clone());
        }
        self.defs.families.insert(name.into(), members);
        Ok(())
    }

    fn load_setmap(&mut self, name: &str, raw: &Spanned<RawSetMap>) -> Result<(), CliError> {
        let r = raw.get_ref();
        let sections = r.s.len() == r.y && r.s.iter().enumerate().all(|(y, &x)| x < r.f.len() && r.f[x] == y);
        if r.f.iter().any(|&y| y >= r.y) || !sections {
            return Err(self.err(raw.span(), format!("setmap `{name}`: s must be a section of f: X -> Y")));
        }
        self.defs.setmaps.insert(name.into(), SetMap { f: r.f.clone(), s: r.s.clone(), y: r.y });
        Ok(())
    }
}

/// Parses and resolves a definition file. Groups may only refer to earlier
/// kinds of block (groups before homs before actions, and so on).
pub fn load(src: &str) -> Result<Definitions, CliError> {
    let raw: RawFile = toml::from_str(src).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(src, s.start));
        CliError::Parse { line, column, message: e.message().to_string() }
    })?;
    let mut l = Loader { src, defs: Definitions::default(), degrees: BTreeMap::new() };
    for (n, r) in &raw.group {
        l.load_group(n, r)?;
    }
    for (n, r) in &raw.hom {
        l.load_hom(n, r)?;
    }
    for (n, r) in &raw.action {
        l.load_action(n, r)?;
    }
    for (n, r) in &raw.xmod {
        l.load_xmod(n, r)?;
    }
    for (n, r) in &raw.morphism {
        l.load_morphism(n, r)?;
    }
    for (n, r) in &raw.sse {
        l.load_sse(n, r)?;
    }
    for (n, r) in &raw.family {
        l.load_family(n, r)?;
    }
    for (n, r) in &raw.setmap {
        l.load_setmap(n, r)?;
    }
    Ok(l.defs)
}

fn feed_group(h: &mut Sha256, g: &FiniteGroup) {
    h.update(g.digest_bytes());
    for n in g.names() {
        h.update(n.as_bytes());
        h.update([0]);
    }
}

fn feed_hom(h: &mut Sha256, f: &GroupHom) {
    feed_group(h, f.source());
    feed_group(h, f.target());
    for &x in f.values() {
        h.update((x as u32).to_le_bytes());
    }
}

fn feed_xmod(h: &mut Sha256, xm: &CrossedModule) {
    feed_hom(h, xm.boundary());
    for a in xm.g().elements() {
        for x in xm.t().elements() {
            h.update((xm.action().act(a, x) as u32).to_le_bytes());
        }
    }
}

/// A resolved object named in a command, for the inputs digest.
pub enum Input<'a> {
    XMod(&'a CrossedModule),
    Morphism(&'a XModMorphism),
    SetMap(&'a SetMap),
    Param(&'a str, String),
}

/// SHA-256 over the canonical bytes of the resolved inputs: independent of
/// layout, comments and block order in the file.
pub fn inputs_digest(inputs: &[(&str, Input<'_>)]) -> String {
    let mut h = Sha256::new();
    for (name, input) in inputs {
        h.update(name.as_bytes());
        h.update([0]);
        match input {
            Input::XMod(xm) => feed_xmod(&mut h, xm),
            Input::Morphism(m) => {
                feed_xmod(&mut h, &m.source);
                feed_xmod(&mut h, &m.target);
                feed_hom(&mut h, &m.f_t);
                feed_hom(&mut h, &m.f_g);
            }
            Input::SetMap(s) => {
                h.update(format!("{:?}{:?}{}", s.f, s.s, s.y).as_bytes());
            }
            Input::Param(k, v) => h.update(format!("{k}={v}").as_bytes()),
        }
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_column() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }

    #[test]
    fn cycle_names_are_normalized() {
        let d = load("[group.S3]\nsymmetric = 3\n[hom.t]\nsource = \"S3\"\ntarget = \"S3\"\nimages = { \"(1,2)\" = \"(2 1)\", \"(1 2 3)\" = \"(3 1 2)\" }\n").unwrap();
        assert!(d.homs["t"].is_isomorphism());
    }
}
