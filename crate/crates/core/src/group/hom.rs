use std::collections::VecDeque;

use super::{Elem, FiniteGroup, HomSearch, SearchOutcome, Subgroup, MAX_ORDER};
use crate::error::{Error, Result};

/// A homomorphism stored as its full table of values.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupHom {
    source: FiniteGroup,
    target: FiniteGroup,
    map: Vec<Elem>,
}

impl std::fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GroupHom({} -> {}, {:?})", self.source.label(), self.target.label(), self.map)
    }
}

impl GroupHom {
    pub(crate) fn new_unchecked(source: FiniteGroup, target: FiniteGroup, map: Vec<Elem>) -> Self {
        debug_assert_eq!(map.len(), source.order());
        GroupHom { source, target, map }
    }

    /// Takes a full value table and checks the homomorphism law.
    pub fn from_map(source: &FiniteGroup, target: &FiniteGroup, map: Vec<Elem>) -> Result<Self> {
        if map.len() != source.order() {
            return Err(Error::InvalidMorphism(format!(
                "{} values given for a source of order {}",
                map.len(),
                source.order()
            )));
        }
        if map.iter().any(|&y| y >= target.order()) {
            return Err(Error::OutOfRange("homomorphism value outside the target".into()));
        }
        let h = GroupHom::new_unchecked(source.clone(), target.clone(), map);
        h.verify()?;
        Ok(h)
    }

    /// Extends the assignment `gens[i] -> images[i]` along products.
    ///
    /// Fails with [`Error::NotGenerating`] if the generators miss part of the
    /// source and with [`Error::NotHomomorphism`] if two words for the same
    /// element get different values.
    pub fn from_generator_images(source: &FiniteGroup, target: &FiniteGroup, gens: &[Elem], images: &[Elem]) -> Result<Self> {
        if gens.len() != images.len() {
            return Err(Error::InvalidMorphism("generator and image lists differ in length".into()));
        }
        if gens.iter().any(|&g| g >= source.order()) || images.iter().any(|&y| y >= target.order()) {
            return Err(Error::OutOfRange("generator or image index".into()));
        }
        const UNSET: Elem = Elem::MAX;
        let mut map = vec![UNSET; source.order()];
        map[source.identity()] = target.identity();
        let mut queue = VecDeque::from([source.identity()]);
        while let Some(x) = queue.pop_front() {
            for (&g, &img) in gens.iter().zip(images) {
                let y = source.mul(x, g);
                let v = target.mul(map[x], img);
                if map[y] == UNSET {
                    map[y] = v;
                    queue.push_back(y);
                } else if map[y] != v {
                    return Err(Error::NotHomomorphism {
                        x: source.name(x).to_string(),
                        y: source.name(g).to_string(),
                    });
                }
            }
        }
        if map.contains(&UNSET) {
            return Err(Error::NotGenerating);
        }
        Ok(GroupHom::new_unchecked(source.clone(), target.clone(), map))
    }

    pub fn identity(g: &FiniteGroup) -> Self {
        GroupHom::new_unchecked(g.clone(), g.clone(), g.elements().collect())
    }

    pub fn trivial(source: &FiniteGroup, target: &FiniteGroup) -> Self {
        GroupHom::new_unchecked(source.clone(), target.clone(), vec![target.identity(); source.order()])
    }

    /// Checks `f(x g) = f(x) f(g)` for every element `x` and generator `g`,
    /// which forces the law on all pairs.
    pub fn verify(&self) -> Result<()> {
        let (s, t) = (&self.source, &self.target);
        if self.map[s.identity()] != t.identity() {
            return Err(Error::NotHomomorphism {
                x: s.name(s.identity()).to_string(),
                y: s.name(s.identity()).to_string(),
            });
        }
        for x in s.elements() {
            for &g in s.generators() {
                if self.map[s.mul(x, g)] != t.mul(self.map[x], self.map[g]) {
                    return Err(Error::NotHomomorphism {
                        x: s.name(x).to_string(),
                        y: s.name(g).to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> &FiniteGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteGroup {
        &self.target
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x]
    }

    pub fn values(&self) -> &[Elem] {
        &self.map
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &GroupHom) -> Result<GroupHom> {
        if !self.target.same_table(&next.source) {
            return Err(Error::InvalidMorphism(format!(
                "cannot compose {} -> {} with {} -> {}",
                self.source.label(),
                self.target.label(),
                next.source.label(),
                next.target.label()
            )));
        }
        let map = self.map.iter().map(|&x| next.map[x]).collect();
        Ok(GroupHom::new_unchecked(self.source.clone(), next.target.clone(), map))
    }

    /// Same values, retargeted at a group with an identical table.
    pub fn with_target(&self, target: &FiniteGroup) -> Result<GroupHom> {
        if !self.target.same_table(target) {
            return Err(Error::InvalidMorphism("retargeting at a different group".into()));
        }
        Ok(GroupHom::new_unchecked(self.source.clone(), target.clone(), self.map.clone()))
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_mask().iter().filter(|&&k| k).count() == 1
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.order()];
        for &y in &self.map {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_isomorphism(&self) -> bool {
        self.source.order() == self.target.order() && self.is_injective()
    }

    pub fn is_trivial(&self) -> bool {
        self.map.iter().all(|&y| y == self.target.identity())
    }

    pub fn kernel_mask(&self) -> Vec<bool> {
        self.map.iter().map(|&y| y == self.target.identity()).collect()
    }

    pub fn kernel(&self) -> Subgroup {
        Subgroup::from_mask_unchecked(&self.source, self.kernel_mask())
    }

    pub fn image(&self) -> Subgroup {
        let mut mask = vec![false; self.target.order()];
        for &y in &self.map {
            mask[y] = true;
        }
        Subgroup::from_mask_unchecked(&self.target, mask)
    }

    /// Inverse of a bijective homomorphism.
    pub fn inverse(&self) -> Result<GroupHom> {
        if !self.is_isomorphism() {
            return Err(Error::InvalidMorphism("only isomorphisms have inverses".into()));
        }
        let mut inv = vec![0; self.target.order()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        Ok(GroupHom::new_unchecked(self.target.clone(), self.source.clone(), inv))
    }

    /// Values of the map restricted along `inclusion` (any hom into the source).
    pub fn restrict(&self, inclusion: &GroupHom) -> Result<GroupHom> {
        inclusion.then(self)
    }

    /// Agreement as functions between the same groups.
    pub fn same_as(&self, other: &GroupHom) -> bool {
        self.source.same_table(&other.source) && self.target.same_table(&other.target) && self.map == other.map
    }
}

/// `A ×_C B = {(a, b) : f(a) = g(b)}` with its two projections.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub group: FiniteGroup,
    pub p1: GroupHom,
    pub p2: GroupHom,
    /// `pairs[i]` is the pair represented by element `i`.
    pub pairs: Vec<(Elem, Elem)>,
}

impl Pullback {
    pub fn index_of(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.pairs.binary_search(&(a, b)).ok()
    }
}

/// Pullback of `f: A -> C` and `g: B -> C`. Pairs are ordered lexicographically.
pub fn pullback(f: &GroupHom, g: &GroupHom) -> Result<Pullback> {
    if !f.target.same_table(&g.target) {
        return Err(Error::InvalidMorphism("pullback legs have different codomains".into()));
    }
    let (a, b) = (&f.source, &g.source);
    let mut pairs = Vec::new();
    for x in a.elements() {
        for y in b.elements() {
            if f.apply(x) == g.apply(y) {
                pairs.push((x, y));
                if pairs.len() > MAX_ORDER {
                    return Err(Error::OrderCap { order: pairs.len(), cap: MAX_ORDER });
                }
            }
        }
    }
    let n = pairs.len();
    let mut index = vec![u16::MAX; a.order() * b.order()];
    for (i, &(x, y)) in pairs.iter().enumerate() {
        index[x * b.order() + y] = i as u16;
    }
    let mut table = Vec::with_capacity(n * n);
    for &(x1, y1) in &pairs {
        for &(x2, y2) in &pairs {
            table.push(index[a.mul(x1, x2) * b.order() + b.mul(y1, y2)]);
        }
    }
    let names = pairs.iter().map(|&(x, y)| format!("({},{})", a.name(x), b.name(y))).collect();
    let label = format!("{}x_{}{}", a.label(), f.target.label(), b.label());
    let group = FiniteGroup::from_trusted_table(label, n, table, names)?;
    let p1 = GroupHom::new_unchecked(group.clone(), a.clone(), pairs.iter().map(|p| p.0).collect());
    let p2 = GroupHom::new_unchecked(group.clone(), b.clone(), pairs.iter().map(|p| p.1).collect());
    Ok(Pullback { group, p1, p2, pairs })
}

/// Some isomorphism `g -> h`, or `None` if the groups are not isomorphic.
pub fn find_isomorphism(g: &FiniteGroup, h: &FiniteGroup) -> Option<GroupHom> {
    if g.order() != h.order() || g.is_commutative() != h.is_commutative() {
        return None;
    }
    let profile = |k: &FiniteGroup| {
        let mut v: Vec<usize> = k.elements().map(|x| k.elem_order(x)).collect();
        v.sort_unstable();
        v
    };
    if profile(g) != profile(h) {
        return None;
    }
    let mut search = HomSearch::new(g, h);
    for (i, &gen) in g.generators().to_vec().iter().enumerate() {
        let o = g.elem_order(gen);
        search = search.restrict(i, |y| h.elem_order(y) == o);
    }
    match search.first(&mut |f: &GroupHom| f.is_injective()) {
        SearchOutcome::Found(f) => Some(f),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_group, dihedral_group, quaternion_group, symmetric_group};

    #[test]
    fn reduction_mod_two() {
        let z4 = cyclic_group(4).unwrap();
        let z2 = cyclic_group(2).unwrap();
        let red = GroupHom::from_generator_images(&z4, &z2, &[1], &[1]).unwrap();
        assert_eq!(red.values(), &[0, 1, 0, 1]);
        assert_eq!(red.kernel().elements(), &[0, 2]);
        assert!(red.is_surjective());
        let bad = GroupHom::from_generator_images(&z2, &z4, &[1], &[1]);
        assert!(matches!(bad, Err(Error::NotHomomorphism { .. })));
    }

    #[test]
    fn not_generating_is_reported() {
        let z4 = cyclic_group(4).unwrap();
        let r = GroupHom::from_generator_images(&z4, &z4, &[2], &[2]);
        assert_eq!(r.unwrap_err(), Error::NotGenerating);
    }

    #[test]
    fn from_map_rejects_non_hom() {
        let z3 = cyclic_group(3).unwrap();
        assert!(GroupHom::from_map(&z3, &z3, vec![0, 2, 2]).is_err());
        assert!(GroupHom::from_map(&z3, &z3, vec![0, 2, 1]).is_ok());
    }

    #[test]
    fn pullback_over_z2() {
        let z4 = cyclic_group(4).unwrap();
        let z2 = cyclic_group(2).unwrap();
        let red = GroupHom::from_generator_images(&z4, &z2, &[1], &[1]).unwrap();
        let pb = pullback(&red, &red).unwrap();
        assert_eq!(pb.group.order(), 8);
        pb.p1.verify().unwrap();
        pb.p2.verify().unwrap();
        assert!(pb.p1.then(&red).unwrap().same_as(&pb.p2.then(&red).unwrap()));
    }

    #[test]
    fn isomorphism_detection() {
        let d3 = dihedral_group(3).unwrap();
        let s3 = symmetric_group(3).unwrap();
        let iso = find_isomorphism(&d3, &s3).unwrap();
        iso.verify().unwrap();
        assert!(iso.is_isomorphism());
        assert!(find_isomorphism(&dihedral_group(4).unwrap(), &quaternion_group()).is_none());
        assert!(find_isomorphism(&cyclic_group(6).unwrap(), &s3).is_none());
    }
}
