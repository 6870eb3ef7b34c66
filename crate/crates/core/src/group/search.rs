use super::{Elem, FiniteGroup, GroupHom};
use crate::error::{Error, Result};

/// Node budget used when the caller does not pass one.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// Result of a budgeted search.
#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(GroupHom),
    /// The whole space was explored and nothing was accepted.
    ProvenNone,
    BudgetExhausted,
}

impl SearchOutcome {
    pub fn found(self) -> Option<GroupHom> {
        match self {
            SearchOutcome::Found(h) => Some(h),
            _ => None,
        }
    }
}

/// How a [`HomSearch::run`] ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunEnd {
    Complete,
    Stopped,
    Budget,
}

const UNSET: Elem = Elem::MAX;

/// Backtracking over images of a generating set.
///
/// Each generator gets a candidate list (by default every target element
/// whose order divides the generator's order). After each assignment the
/// partial map is extended to the subgroup generated so far, and any clash
/// between two words for the same element prunes the branch. Homomorphisms
/// are produced in lexicographic order of the image tuple.
#[derive(Clone, Debug)]
pub struct HomSearch {
    source: FiniteGroup,
    target: FiniteGroup,
    gens: Vec<Elem>,
    candidates: Vec<Vec<Elem>>,
    budget: u64,
}

impl HomSearch {
    pub fn new(source: &FiniteGroup, target: &FiniteGroup) -> Self {
        Self::build(source, target, source.generators().to_vec())
    }

    /// Searches over images of `gens`, which must generate the source.
    pub fn with_generators(source: &FiniteGroup, target: &FiniteGroup, gens: Vec<Elem>) -> Result<Self> {
        if gens.iter().any(|&g| g >= source.order()) {
            return Err(Error::OutOfRange("generator index".into()));
        }
        if source.closure_mask(&gens).contains(&false) {
            return Err(Error::NotGenerating);
        }
        Ok(Self::build(source, target, gens))
    }

    fn build(source: &FiniteGroup, target: &FiniteGroup, gens: Vec<Elem>) -> Self {
        let candidates = gens
            .iter()
            .map(|&g| {
                let o = source.elem_order(g);
                target.elements().filter(|&y| o.is_multiple_of(target.elem_order(y))).collect()
            })
            .collect();
        HomSearch {
            source: source.clone(),
            target: target.clone(),
            gens,
            candidates,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn generators(&self) -> &[Elem] {
        &self.gens
    }

    /// Keeps only candidates for generator `i` satisfying `keep`.
    pub fn restrict(mut self, i: usize, keep: impl Fn(Elem) -> bool) -> Self {
        self.candidates[i].retain(|&y| keep(y));
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Calls `visit` on each homomorphism until it returns `false`.
    pub fn run(&self, visit: &mut dyn FnMut(&GroupHom) -> bool) -> RunEnd {
        let mut state = State {
            search: self,
            map: vec![UNSET; self.source.order()],
            members: vec![self.source.identity()],
            images: Vec::with_capacity(self.gens.len()),
            nodes: 0,
        };
        state.map[self.source.identity()] = self.target.identity();
        state.descend(visit)
    }

    /// First homomorphism accepted by `accept`.
    pub fn first(&self, accept: &mut dyn FnMut(&GroupHom) -> bool) -> SearchOutcome {
        let mut found = None;
        let end = self.run(&mut |h| {
            if accept(h) {
                found = Some(h.clone());
                false
            } else {
                true
            }
        });
        match (found, end) {
            (Some(h), _) => SearchOutcome::Found(h),
            (None, RunEnd::Budget) => SearchOutcome::BudgetExhausted,
            (None, _) => SearchOutcome::ProvenNone,
        }
    }

    pub fn all(&self) -> Result<Vec<GroupHom>> {
        let mut out = Vec::new();
        match self.run(&mut |h| {
            out.push(h.clone());
            true
        }) {
            RunEnd::Budget => Err(Error::BudgetExhausted(self.budget)),
            _ => Ok(out),
        }
    }
}

struct State<'a> {
    search: &'a HomSearch,
    map: Vec<Elem>,
    members: Vec<Elem>,
    images: Vec<Elem>,
    nodes: u64,
}

impl State<'_> {
    fn descend(&mut self, visit: &mut dyn FnMut(&GroupHom) -> bool) -> RunEnd {
        let s = self.search;
        let depth = self.images.len();
        if depth == s.gens.len() {
            let h = GroupHom::new_unchecked(s.source.clone(), s.target.clone(), self.map.clone());
            return if visit(&h) { RunEnd::Complete } else { RunEnd::Stopped };
        }
        let g = s.gens[depth];
        for &y in &s.candidates[depth] {
            self.nodes += 1;
            if self.nodes > s.budget {
                return RunEnd::Budget;
            }
            let mark = self.members.len();
            if self.assign(g, y) {
                self.images.push(y);
                let end = self.descend(visit);
                self.images.pop();
                if end != RunEnd::Complete {
                    self.undo(mark);
                    return end;
                }
            }
            self.undo(mark);
        }
        RunEnd::Complete
    }

    /// Extends the map with `g -> y` over the generated subgroup; `false` on a clash.
    fn assign(&mut self, g: Elem, y: Elem) -> bool {
        let (src, tgt) = (&self.search.source, &self.search.target);
        if self.map[g] != UNSET {
            if self.map[g] != y {
                return false;
            }
        } else {
            self.map[g] = y;
            self.members.push(g);
        }
        let depth = self.images.len();
        let gens = &self.search.gens[..=depth];
        let mut imgs: Vec<Elem> = self.images.clone();
        imgs.push(y);
        let mut i = 0;
        while i < self.members.len() {
            let x = self.members[i];
            for (&h, &img) in gens.iter().zip(&imgs) {
                let z = src.mul(x, h);
                let v = tgt.mul(self.map[x], img);
                if self.map[z] == UNSET {
                    self.map[z] = v;
                    self.members.push(z);
                } else if self.map[z] != v {
                    return false;
                }
            }
            i += 1;
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        for &x in &self.members[mark..] {
            self.map[x] = UNSET;
        }
        self.members.truncate(mark);
    }
}

/// All homomorphisms `g -> h`, in lexicographic order of generator images.
pub fn enumerate_homs(g: &FiniteGroup, h: &FiniteGroup, budget: u64) -> Result<Vec<GroupHom>> {
    HomSearch::new(g, h).budget(budget).all()
}

/// Searches for `l: A -> B` with `f . l = h`, where `h: A -> C` and
/// `f: B -> C`, accepting the first lift for which `accept` holds.
pub fn lift_through(
    h: &GroupHom,
    f: &GroupHom,
    budget: u64,
    accept: &mut dyn FnMut(&GroupHom) -> bool,
) -> Result<SearchOutcome> {
    if !h.target().same_table(f.target()) {
        return Err(Error::InvalidMorphism("lift: maps have different codomains".into()));
    }
    let mut search = HomSearch::new(h.source(), f.source()).budget(budget);
    for (i, &a) in h.source().generators().to_vec().iter().enumerate() {
        let want = h.apply(a);
        search = search.restrict(i, |b| f.apply(b) == want);
    }
    Ok(search.first(accept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_group, direct_product, symmetric_group, trivial_group};

    #[test]
    fn hom_counts() {
        let z = |n| cyclic_group(n).unwrap();
        assert_eq!(enumerate_homs(&z(2), &z(4), DEFAULT_BUDGET).unwrap().len(), 2);
        assert_eq!(enumerate_homs(&z(3), &z(4), DEFAULT_BUDGET).unwrap().len(), 1);
        assert_eq!(enumerate_homs(&z(6), &trivial_group(), DEFAULT_BUDGET).unwrap().len(), 1);
        let auts = enumerate_homs(&z(4), &z(4), DEFAULT_BUDGET).unwrap();
        assert_eq!(auts.iter().filter(|f| f.is_isomorphism()).count(), 2);
        let s3 = symmetric_group(3).unwrap();
        // three transpositions, the identity-class trivial map, and six automorphisms
        assert_eq!(enumerate_homs(&s3, &s3, DEFAULT_BUDGET).unwrap().len(), 10);
        assert_eq!(enumerate_homs(&s3, &z(2), DEFAULT_BUDGET).unwrap().len(), 2);
    }

    #[test]
    fn search_respects_budget() {
        let z2 = cyclic_group(2).unwrap();
        let v = direct_product(&z2, &direct_product(&z2, &z2).unwrap().group).unwrap().group;
        let r = HomSearch::new(&v, &v).budget(3).all();
        assert_eq!(r.unwrap_err(), Error::BudgetExhausted(3));
    }

    #[test]
    fn lifting_through_reduction() {
        let z4 = cyclic_group(4).unwrap();
        let z2 = cyclic_group(2).unwrap();
        let red = GroupHom::from_generator_images(&z4, &z2, &[1], &[1]).unwrap();
        let id2 = GroupHom::identity(&z2);
        // Z2 -> Z2 does not factor through Z4 -> Z2
        let r = lift_through(&id2, &red, DEFAULT_BUDGET, &mut |_| true).unwrap();
        assert!(matches!(r, SearchOutcome::ProvenNone));
        let id4 = GroupHom::identity(&z4);
        let r = lift_through(&red, &red, DEFAULT_BUDGET, &mut |_| true).unwrap();
        let l = r.found().unwrap();
        assert!(l.then(&red).unwrap().same_as(&id4.then(&red).unwrap()));
    }
}
