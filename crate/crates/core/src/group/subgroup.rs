use super::{Elem, FiniteGroup, GroupHom};
use crate::error::{Error, Result};

/// A subgroup of an ambient group, stored as a membership mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    ambient: FiniteGroup,
    mask: Vec<bool>,
    elements: Vec<Elem>,
}

impl Subgroup {
    pub(crate) fn from_mask_unchecked(ambient: &FiniteGroup, mask: Vec<bool>) -> Self {
        let elements = mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect();
        Subgroup { ambient: ambient.clone(), mask, elements }
    }

    pub fn generated_by(ambient: &FiniteGroup, gens: &[Elem]) -> Result<Self> {
        if gens.iter().any(|&g| g >= ambient.order()) {
            return Err(Error::OutOfRange("subgroup generator".into()));
        }
        Ok(Self::from_mask_unchecked(ambient, ambient.closure_mask(gens)))
    }

    /// Checks that the given elements form a subgroup.
    pub fn from_elements(ambient: &FiniteGroup, elems: &[Elem]) -> Result<Self> {
        let mut mask = vec![false; ambient.order()];
        for &x in elems {
            if x >= ambient.order() {
                return Err(Error::OutOfRange("subgroup element".into()));
            }
            mask[x] = true;
        }
        if !mask[ambient.identity()] {
            return Err(Error::InvalidGroup("subset misses the identity".into()));
        }
        for &a in elems {
            for &b in elems {
                if !mask[ambient.mul(a, b)] {
                    return Err(Error::InvalidGroup(format!(
                        "subset not closed: {} {} is outside",
                        ambient.name(a),
                        ambient.name(b)
                    )));
                }
            }
        }
        Ok(Self::from_mask_unchecked(ambient, mask))
    }

    pub fn whole(ambient: &FiniteGroup) -> Self {
        Self::from_mask_unchecked(ambient, vec![true; ambient.order()])
    }

    pub fn trivial(ambient: &FiniteGroup) -> Self {
        Self::generated_by(ambient, &[]).expect("empty generating set")
    }

    /// Smallest normal subgroup containing `gens`.
    pub fn normal_closure(ambient: &FiniteGroup, gens: &[Elem]) -> Result<Self> {
        let mut all: Vec<Elem> = Vec::new();
        for &g in gens {
            if g >= ambient.order() {
                return Err(Error::OutOfRange("subgroup generator".into()));
            }
            for x in ambient.elements() {
                all.push(ambient.conj(x, g));
            }
        }
        all.sort_unstable();
        all.dedup();
        // the subgroup generated by a conjugation-closed set is normal
        Self::generated_by(ambient, &all)
    }

    pub fn ambient(&self) -> &FiniteGroup {
        &self.ambient
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        self.mask[x]
    }

    pub fn is_whole(&self) -> bool {
        self.order() == self.ambient.order()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// `Ok` if normal, else the first conjugate found outside the subgroup.
    pub fn check_normal(&self) -> Result<()> {
        let g = &self.ambient;
        for x in g.elements() {
            for &n in &self.elements {
                let c = g.conj(x, n);
                if !self.mask[c] {
                    return Err(Error::NotNormal {
                        g: g.name(x).to_string(),
                        n: g.name(n).to_string(),
                        conj: g.name(c).to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_normal(&self) -> bool {
        self.check_normal().is_ok()
    }

    /// The subgroup as a group in its own right, with its inclusion.
    pub fn to_group(&self, label: impl Into<String>) -> Result<(FiniteGroup, GroupHom)> {
        let g = &self.ambient;
        let n = self.order();
        let mut index = vec![u16::MAX; g.order()];
        for (i, &x) in self.elements.iter().enumerate() {
            index[x] = i as u16;
        }
        let mut table = Vec::with_capacity(n * n);
        for &a in &self.elements {
            for &b in &self.elements {
                table.push(index[g.mul(a, b)]);
            }
        }
        let names = self.elements.iter().map(|&x| g.name(x).to_string()).collect();
        let h = FiniteGroup::from_trusted_table(label.into(), n, table, names)?;
        let inc = GroupHom::new_unchecked(h.clone(), g.clone(), self.elements.clone());
        Ok((h, inc))
    }
}

/// Every normal subgroup, by increasing order.
pub fn normal_subgroups(g: &FiniteGroup) -> Vec<Subgroup> {
    let closures: Vec<Subgroup> =
        g.elements().map(|x| Subgroup::normal_closure(g, &[x]).expect("element in range")).collect();
    let mut found = vec![Subgroup::trivial(g)];
    let mut i = 0;
    while i < found.len() {
        for c in &closures {
            let mut gens = found[i].elements.clone();
            gens.extend_from_slice(&c.elements);
            let join = Subgroup::normal_closure(g, &gens).expect("elements in range");
            if !found.iter().any(|h| h.mask == join.mask) {
                found.push(join);
            }
        }
        i += 1;
    }
    found.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    found
}

/// `G / N` with its projection. Cosets are numbered by their least element
/// and named `[r]` after that representative.
pub fn quotient(g: &FiniteGroup, n: &Subgroup) -> Result<(FiniteGroup, GroupHom)> {
    if !n.ambient().same_table(g) {
        return Err(Error::InvalidGroup("subgroup of a different group".into()));
    }
    n.check_normal()?;
    const UNSET: usize = usize::MAX;
    let mut coset = vec![UNSET; g.order()];
    let mut reps = Vec::new();
    for x in g.elements() {
        if coset[x] == UNSET {
            let c = reps.len();
            reps.push(x);
            for &m in n.elements() {
                coset[g.mul(x, m)] = c;
            }
        }
    }
    let q = reps.len();
    let mut table = Vec::with_capacity(q * q);
    for &a in &reps {
        for &b in &reps {
            table.push(coset[g.mul(a, b)] as u16);
        }
    }
    let names = reps.iter().map(|&r| format!("[{}]", g.name(r))).collect();
    let label = format!("{}/N{}", g.label(), n.order());
    let qg = FiniteGroup::from_trusted_table(label, q, table, names)?;
    let proj = GroupHom::new_unchecked(g.clone(), qg.clone(), coset);
    Ok((qg, proj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_group, symmetric_group};

    #[test]
    fn s3_quotients() {
        let s3 = symmetric_group(3).unwrap();
        let a3 = Subgroup::generated_by(&s3, &[s3.find("(1 2 3)").unwrap()]).unwrap();
        assert_eq!(a3.order(), 3);
        let (q, p) = quotient(&s3, &a3).unwrap();
        assert_eq!(q.order(), 2);
        p.verify().unwrap();
        let t = Subgroup::generated_by(&s3, &[s3.find("(1 2)").unwrap()]).unwrap();
        assert!(matches!(quotient(&s3, &t), Err(Error::NotNormal { .. })));
        assert_eq!(Subgroup::normal_closure(&s3, &[s3.find("(1 2)").unwrap()]).unwrap().order(), 6);
    }

    #[test]
    fn subgroup_as_group() {
        let z6 = cyclic_group(6).unwrap();
        let h = Subgroup::from_elements(&z6, &[0, 2, 4]).unwrap();
        let (g, inc) = h.to_group("H").unwrap();
        assert_eq!(g.order(), 3);
        inc.verify().unwrap();
        assert!(inc.is_injective());
        assert!(Subgroup::from_elements(&z6, &[0, 1]).is_err());
    }
}
