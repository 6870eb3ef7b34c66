//! Group actions, split extensions and semidirect products, with the
//! action core evaluated on cosmash words.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup, GroupHom, Subgroup, MAX_ORDER};
use crate::words::{enumerate_cosmash_words, CosmashKind, Letter, Signature, Word, WordHom};

/// An action of `actor` on `carried` by automorphisms, stored as a table
/// `table[a * |X| + x] = a . x`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupAction {
    actor: FiniteGroup,
    carried: FiniteGroup,
    table: Vec<u16>,
}

impl std::fmt::Debug for GroupAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GroupAction({} on {})", self.actor.label(), self.carried.label())
    }
}

impl GroupAction {
    /// Validates a full action table.
    pub fn new(actor: &FiniteGroup, carried: &FiniteGroup, table: Vec<Elem>) -> Result<Self> {
        let (na, nx) = (actor.order(), carried.order());
        if table.len() != na * nx || table.iter().any(|&y| y >= nx) {
            return Err(Error::InvalidAction(format!("table must have {} entries below {nx}", na * nx)));
        }
        let act = GroupAction {
            actor: actor.clone(),
            carried: carried.clone(),
            table: table.into_iter().map(|y| y as u16).collect(),
        };
        act.validate()?;
        Ok(act)
    }

    pub(crate) fn new_unchecked(actor: &FiniteGroup, carried: &FiniteGroup, table: Vec<u16>) -> Self {
        let act = GroupAction { actor: actor.clone(), carried: carried.clone(), table };
        debug_assert!(act.validate().is_ok());
        act
    }

    /// Extends generator permutations `perms[i]` (of `carried`, for `gens[i]`) to the whole actor.
    pub fn from_generator_images(actor: &FiniteGroup, carried: &FiniteGroup, gens: &[Elem], perms: &[Vec<Elem>]) -> Result<Self> {
        let nx = carried.order();
        if gens.len() != perms.len() || perms.iter().any(|p| p.len() != nx || p.iter().any(|&y| y >= nx)) {
            return Err(Error::InvalidAction("generator permutations are malformed".into()));
        }
        if gens.iter().any(|&g| g >= actor.order()) {
            return Err(Error::OutOfRange("acting generator".into()));
        }
        let mut rows: Vec<Option<Vec<Elem>>> = vec![None; actor.order()];
        rows[actor.identity()] = Some(carried.elements().collect());
        let mut queue = VecDeque::from([actor.identity()]);
        while let Some(a) = queue.pop_front() {
            for (&g, perm) in gens.iter().zip(perms) {
                let b = actor.mul(a, g);
                let row_a = rows[a].as_ref().expect("visited row");
                // (a g) . x = a . (g . x)
                let row: Vec<Elem> = perm.iter().map(|&y| row_a[y]).collect();
                match &rows[b] {
                    None => {
                        rows[b] = Some(row);
                        queue.push_back(b);
                    }
                    Some(existing) if *existing != row => {
                        return Err(Error::InvalidAction(format!(
                            "generator images violate a relation at {}",
                            actor.name(b)
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        let mut table = Vec::with_capacity(actor.order() * nx);
        for r in rows {
            table.extend(r.ok_or(Error::NotGenerating)?);
        }
        Self::new(actor, carried, table)
    }

    /// Checks the identity law, the composition law on actor generators and
    /// that every element acts by an automorphism.
    pub fn validate(&self) -> Result<()> {
        let (a, x) = (&self.actor, &self.carried);
        if x.elements().any(|t| self.act(a.identity(), t) != t) {
            return Err(Error::InvalidAction("the identity does not act trivially".into()));
        }
        for g in a.elements() {
            for &h in a.generators() {
                let gh = a.mul(g, h);
                if let Some(t) = x.elements().find(|&t| self.act(gh, t) != self.act(g, self.act(h, t))) {
                    return Err(Error::InvalidAction(format!(
                        "({} {}) . {} differs from {} . ({} . {})",
                        a.name(g),
                        a.name(h),
                        x.name(t),
                        a.name(g),
                        a.name(h),
                        x.name(t)
                    )));
                }
            }
        }
        for g in a.elements() {
            let mut seen = vec![false; x.order()];
            for t in x.elements() {
                let y = self.act(g, t);
                if std::mem::replace(&mut seen[y], true) {
                    return Err(Error::InvalidAction(format!("{} does not act bijectively", a.name(g))));
                }
            }
            for t in x.elements() {
                for &u in x.generators() {
                    if self.act(g, x.mul(t, u)) != x.mul(self.act(g, t), self.act(g, u)) {
                        return Err(Error::InvalidAction(format!(
                            "{} does not act by a homomorphism on ({}, {})",
                            a.name(g),
                            x.name(t),
                            x.name(u)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn trivial(actor: &FiniteGroup, carried: &FiniteGroup) -> Self {
        let table = (0..actor.order()).flat_map(|_| carried.elements().map(|t| t as u16)).collect();
        GroupAction { actor: actor.clone(), carried: carried.clone(), table }
    }

    /// `g . x = g x g^-1`
    pub fn conjugation(g: &FiniteGroup) -> Self {
        let table = g.elements().flat_map(|a| g.elements().map(move |x| g.conj(a, x) as u16)).collect();
        GroupAction { actor: g.clone(), carried: g.clone(), table }
    }

    /// Conjugation of `inclusion.target()` on a normal subgroup given by its inclusion.
    pub fn conjugation_on(inclusion: &GroupHom) -> Result<Self> {
        let (n, g) = (inclusion.source(), inclusion.target());
        if !inclusion.is_injective() {
            return Err(Error::InvalidAction("conjugation needs an injective inclusion".into()));
        }
        let mut back = vec![usize::MAX; g.order()];
        for t in n.elements() {
            back[inclusion.apply(t)] = t;
        }
        let mut table = Vec::with_capacity(g.order() * n.order());
        for a in g.elements() {
            for t in n.elements() {
                let c = g.conj(a, inclusion.apply(t));
                if back[c] == usize::MAX {
                    return Err(Error::NotNormal {
                        g: g.name(a).to_string(),
                        n: g.name(inclusion.apply(t)).to_string(),
                        conj: g.name(c).to_string(),
                    });
                }
                table.push(back[c] as u16);
            }
        }
        Ok(GroupAction { actor: g.clone(), carried: n.clone(), table })
    }

    pub fn actor(&self) -> &FiniteGroup {
        &self.actor
    }

    pub fn carried(&self) -> &FiniteGroup {
        &self.carried
    }

    #[inline]
    pub fn act(&self, a: Elem, x: Elem) -> Elem {
        self.table[a * self.carried.order() + x] as usize
    }

    /// The automorphism by which `a` acts, as a hom.
    pub fn automorphism(&self, a: Elem) -> GroupHom {
        GroupHom::new_unchecked(self.carried.clone(), self.carried.clone(), self.carried.elements().map(|x| self.act(a, x)).collect())
    }

    pub fn is_trivial(&self) -> bool {
        self.actor.elements().all(|a| self.carried.elements().all(|x| self.act(a, x) == x))
    }

    /// `b . x = h(b) . x` for `h: B -> actor`.
    pub fn along(&self, h: &GroupHom) -> Result<GroupAction> {
        if !h.target().same_table(&self.actor) {
            return Err(Error::InvalidAction("pulling an action back along a hom into another group".into()));
        }
        let nx = self.carried.order();
        let table = h
            .source()
            .elements()
            .flat_map(|b| {
                let a = h.apply(b);
                self.table[a * nx..(a + 1) * nx].iter().copied()
            })
            .collect();
        Ok(GroupAction { actor: h.source().clone(), carried: self.carried.clone(), table })
    }

    /// The same action on an isomorphic copy of the carried group, `iso: X -> X'`.
    pub fn transport(&self, iso: &GroupHom) -> Result<GroupAction> {
        if !iso.source().same_table(&self.carried) || !iso.is_isomorphism() {
            return Err(Error::InvalidAction("transport needs an isomorphism out of the carried group".into()));
        }
        let inv = iso.inverse()?;
        let x2 = iso.target();
        let table = self
            .actor
            .elements()
            .flat_map(|a| x2.elements().map(move |y| (a, y)))
            .map(|(a, y)| iso.apply(self.act(a, inv.apply(y))) as u16)
            .collect();
        Ok(GroupAction { actor: self.actor.clone(), carried: x2.clone(), table })
    }

    /// `[a, x] -> (a . x) x^-1`, the action core on a commutator generator.
    pub fn core_on_commutator(&self, a: Elem, x: Elem) -> Elem {
        self.carried.mul(self.act(a, x), self.carried.inv(x))
    }

    pub fn same_as(&self, other: &GroupAction) -> bool {
        self.actor.same_table(&other.actor) && self.carried.same_table(&other.carried) && self.table == other.table
    }
}

/// `X --k--> E <--s-- A` with `p: E -> A`, `p s = 1` and `k` a kernel of `p`.
#[derive(Clone, Debug)]
pub struct SplitExtension {
    kernel: FiniteGroup,
    total: FiniteGroup,
    base: FiniteGroup,
    k: GroupHom,
    p: GroupHom,
    s: GroupHom,
    k_inv: Vec<Option<Elem>>,
    sk: WordHom,
}

impl SplitExtension {
    pub fn new(k: GroupHom, p: GroupHom, s: GroupHom) -> Result<Self> {
        let total = p.source().clone();
        if !k.target().same_table(&total) || !s.target().same_table(&total) || !s.source().same_table(p.target()) {
            return Err(Error::InvalidExtension("k, p, s are not typed as X -> E -> A -> E".into()));
        }
        for h in [&k, &p, &s] {
            h.verify().map_err(|e| Error::InvalidExtension(e.to_string()))?;
        }
        let base = p.target().clone();
        if let Some(a) = base.elements().find(|&a| p.apply(s.apply(a)) != a) {
            return Err(Error::InvalidExtension(format!("p s moves {}", base.name(a))));
        }
        if !k.is_injective() {
            return Err(Error::InvalidExtension("k is not injective".into()));
        }
        if k.image() != p.kernel() {
            return Err(Error::InvalidExtension("the image of k is not the kernel of p".into()));
        }
        Self::assemble(k, p, s)
    }

    fn assemble(k: GroupHom, p: GroupHom, s: GroupHom) -> Result<Self> {
        let mut k_inv = vec![None; p.source().order()];
        for x in k.source().elements() {
            k_inv[k.apply(x)] = Some(x);
        }
        let sig = Signature::new(vec![s.source().clone(), k.source().clone()])?;
        let sk = WordHom::new(&sig, vec![s.clone(), k.clone()])?;
        Ok(SplitExtension {
            kernel: k.source().clone(),
            total: p.source().clone(),
            base: p.target().clone(),
            k,
            p,
            s,
            k_inv,
            sk,
        })
    }

    pub fn kernel(&self) -> &FiniteGroup {
        &self.kernel
    }

    pub fn total(&self) -> &FiniteGroup {
        &self.total
    }

    pub fn base(&self) -> &FiniteGroup {
        &self.base
    }

    pub fn k(&self) -> &GroupHom {
        &self.k
    }

    pub fn p(&self) -> &GroupHom {
        &self.p
    }

    pub fn s(&self) -> &GroupHom {
        &self.s
    }

    /// The signature `(A, X)` of the words the action core reads.
    pub fn signature(&self) -> &Signature {
        self.sk.signature()
    }

    /// `[s, k]: A + X -> E`
    pub fn copairing(&self) -> &WordHom {
        &self.sk
    }

    pub fn kernel_preimage(&self, e: Elem) -> Option<Elem> {
        self.k_inv[e]
    }

    /// The action core on a binary cosmash word over `(A, X)`: evaluate with
    /// `[s, k]` and read the result back in `X`.
    pub fn core_eval(&self, w: &Word) -> Result<Elem> {
        if !crate::words::in_binary_cosmash(w)? {
            return Err(Error::NotAMember { word: w.to_text(), what: "binary cosmash".into() });
        }
        let e = self.sk.evaluate(w)?;
        self.k_inv[e].ok_or_else(|| {
            Error::InvariantBreach(format!("[s, k] sends the cosmash word {w} outside the kernel"))
        })
    }

    /// `X -> E`-level evaluation without the membership test; for flat words.
    pub fn flat_eval(&self, w: &Word) -> Result<Elem> {
        let e = self.sk.evaluate(w)?;
        self.k_inv[e].ok_or_else(|| Error::NotAMember { word: w.to_text(), what: "flat object".into() })
    }
}

/// `X ⋊ A` on pairs `(x, a)`, index `x * |A| + a`, with
/// `(x, a)(x', a') = (x (a . x'), a a')`.
pub fn semidirect_product(action: &GroupAction) -> Result<SplitExtension> {
    let (x, a) = (action.carried(), action.actor());
    let (nx, na) = (x.order(), a.order());
    let order = nx * na;
    if order > MAX_ORDER {
        return Err(Error::OrderCap { order, cap: MAX_ORDER });
    }
    let mut table = Vec::with_capacity(order * order);
    for e1 in 0..order {
        let (x1, a1) = (e1 / na, e1 % na);
        let row = &action.table[a1 * nx..(a1 + 1) * nx];
        for e2 in 0..order {
            let (x2, a2) = (e2 / na, e2 % na);
            table.push((x.mul(x1, row[x2] as usize) * na + a.mul(a1, a2)) as u16);
        }
    }
    let names = (0..order).map(|e| format!("({},{})", x.name(e / na), a.name(e % na))).collect();
    let label = format!("{}⋊{}", x.label(), a.label());
    let total = FiniteGroup::from_trusted_table(label, order, table, names)?;
    let k = GroupHom::new_unchecked(x.clone(), total.clone(), x.elements().map(|t| t * na + a.identity()).collect());
    let p = GroupHom::new_unchecked(total.clone(), a.clone(), (0..order).map(|e| e % na).collect());
    let s = GroupHom::new_unchecked(a.clone(), total.clone(), a.elements().map(|g| x.identity() * na + g).collect());
    SplitExtension::assemble(k, p, s)
}

/// `a . x = k^-1(s(a) k(x) s(a)^-1)`
pub fn action_from_extension(ext: &SplitExtension) -> Result<GroupAction> {
    let (a, x, e) = (ext.base(), ext.kernel(), ext.total());
    let mut table = Vec::with_capacity(a.order() * x.order());
    for g in a.elements() {
        for t in x.elements() {
            let c = e.conj(ext.s.apply(g), ext.k.apply(t));
            let y = ext.k_inv[c].ok_or_else(|| Error::InvariantBreach(format!("conjugate of k({}) escapes the kernel", x.name(t))))?;
            table.push(y as u16);
        }
    }
    Ok(GroupAction::new_unchecked(a, x, table))
}

/// Checks that `phi: E -> E'` is an isomorphism of extensions fixing `X` and `A`:
/// `phi k = k'` and `p' phi = p`.
pub fn check_extension_iso(ext: &SplitExtension, other: &SplitExtension, phi: &GroupHom) -> Result<()> {
    phi.verify()?;
    if !phi.is_isomorphism() {
        return Err(Error::InvalidMorphism("comparison is not bijective".into()));
    }
    if !ext.k.then(phi)?.same_as(&other.k) {
        return Err(Error::InvalidMorphism("comparison does not fix the kernel".into()));
    }
    if !phi.then(&other.p)?.same_as(&ext.p) {
        return Err(Error::InvalidMorphism("comparison does not commute with the projections".into()));
    }
    Ok(())
}

/// The canonical comparison `X ⋊ A -> E`, `(x, a) -> k(x) s(a)`, verified.
pub fn semidirect_comparison(ext: &SplitExtension) -> Result<(SplitExtension, GroupHom)> {
    let act = action_from_extension(ext)?;
    let sd = semidirect_product(&act)?;
    let na = ext.base().order();
    let map = (0..sd.total().order())
        .map(|e| ext.total.mul(ext.k.apply(e / na), ext.s.apply(e % na)))
        .collect();
    let phi = GroupHom::from_map(sd.total(), ext.total(), map)?;
    check_extension_iso(&sd, ext, &phi)?;
    Ok((sd, phi))
}

/// The action core computed from `α` alone: a cosmash word is rewritten as a
/// product of conjugates of commutators `[a, x]` and each is sent to
/// `(a . x) x^-1`.
///
/// Reading the word left to right with running coset data `(a, x)`, an
/// `A`-letter `a'` contributes `[a, x][a a', x]^-1` and an `X`-letter only
/// moves `x`.
pub fn commutator_expansion_eval(action: &GroupAction, w: &Word) -> Result<Elem> {
    let (ga, gx) = (action.actor(), action.carried());
    let sig = w.signature();
    if sig.len() != 2 || !sig.factor(0).same_table(ga) || !sig.factor(1).same_table(gx) {
        return Err(Error::SignatureMismatch("word is not over (actor, carried)".into()));
    }
    if !crate::words::in_binary_cosmash(w)? {
        return Err(Error::NotAMember { word: w.to_text(), what: "binary cosmash".into() });
    }
    let psi = |a: Elem, x: Elem| action.core_on_commutator(a, x);
    let (mut a, mut x) = (ga.identity(), gx.identity());
    let mut acc = gx.identity();
    for &Letter { slot, elem } in w.letters() {
        if slot == 0 {
            let a2 = ga.mul(a, elem);
            acc = gx.mul(acc, gx.mul(psi(a, x), gx.inv(psi(a2, x))));
            a = a2;
        } else {
            x = gx.mul(x, elem);
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreConsistency {
    pub words_checked: usize,
    /// `(word, via extension, via commutators)` for the first disagreement
    pub mismatch: Option<(String, String, String)>,
}

impl CoreConsistency {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Compares the action core of `X ⋊ A` with the commutator expansion on every
/// cosmash word of length at most `max_len`.
pub fn action_core_consistency(action: &GroupAction, max_len: usize, budget: u64) -> Result<CoreConsistency> {
    let ext = semidirect_product(action)?;
    let words = enumerate_cosmash_words(ext.signature(), max_len, CosmashKind::Binary, budget)?;
    let gx = action.carried();
    for w in &words {
        let lhs = ext.core_eval(w)?;
        let rhs = commutator_expansion_eval(action, w)?;
        if lhs != rhs {
            return Ok(CoreConsistency {
                words_checked: words.len(),
                mismatch: Some((w.to_text(), gx.name(lhs).to_string(), gx.name(rhs).to_string())),
            });
        }
    }
    Ok(CoreConsistency { words_checked: words.len(), mismatch: None })
}

/// The conjugation extension `A --(1,..)--> A ⋊ A`, whose core is `[a, a'] -> a a' a^-1 a'^-1`.
pub fn conjugation_extension(a: &FiniteGroup) -> Result<SplitExtension> {
    semidirect_product(&GroupAction::conjugation(a))
}

/// The internal split extension `N -> G -> C` of a normal subgroup `N` with complement `C`.
pub fn extension_from_complement(g: &FiniteGroup, n: &Subgroup, complement: &Subgroup) -> Result<SplitExtension> {
    n.check_normal()?;
    if n.order() * complement.order() != g.order() || n.elements().iter().any(|&x| x != g.identity() && complement.contains(x)) {
        return Err(Error::InvalidExtension("subgroups are not complementary".into()));
    }
    let (_, k) = n.to_group(format!("{}_N", g.label()))?;
    let (cg, s) = complement.to_group(format!("{}_C", g.label()))?;
    // each element factors uniquely as n c
    let mut p_map = vec![usize::MAX; g.order()];
    for (ci, &c) in complement.elements().iter().enumerate() {
        for &x in n.elements() {
            p_map[g.mul(x, c)] = ci;
        }
    }
    let p = GroupHom::from_map(g, &cg, p_map)?;
    SplitExtension::new(k, p, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_group, find_isomorphism, symmetric_group};

    fn inversion(n: usize) -> GroupAction {
        let z2 = cyclic_group(2).unwrap();
        let zn = cyclic_group(n).unwrap();
        let inv: Vec<Elem> = zn.elements().map(|x| zn.inv(x)).collect();
        GroupAction::from_generator_images(&z2, &zn, &[1], &[inv]).unwrap()
    }

    #[test]
    fn z3_by_z2_is_s3() {
        let ext = semidirect_product(&inversion(3)).unwrap();
        assert_eq!(ext.total().order(), 6);
        assert!(!ext.total().is_commutative());
        assert!(find_isomorphism(ext.total(), &symmetric_group(3).unwrap()).is_some());
        let back = action_from_extension(&ext).unwrap();
        assert!(back.same_as(&inversion(3)));
    }

    #[test]
    fn trivial_action_gives_direct_product() {
        let z2 = cyclic_group(2).unwrap();
        let z3 = cyclic_group(3).unwrap();
        let ext = semidirect_product(&GroupAction::trivial(&z2, &z3)).unwrap();
        assert!(ext.total().is_commutative());
        assert!(action_from_extension(&ext).unwrap().is_trivial());
    }

    #[test]
    fn bad_generator_images_rejected() {
        let z3 = cyclic_group(3).unwrap();
        let z5 = cyclic_group(5).unwrap();
        // x -> 2x has order 4 in Aut(Z5), incompatible with a generator of order 3
        let dbl: Vec<Elem> = z5.elements().map(|x| (2 * x) % 5).collect();
        assert!(GroupAction::from_generator_images(&z3, &z5, &[1], &[dbl]).is_err());
        let z2 = cyclic_group(2).unwrap();
        let not_auto = vec![0, 0, 0, 0, 0];
        assert!(GroupAction::from_generator_images(&z2, &z5, &[1], &[not_auto]).is_err());
    }

    #[test]
    fn core_on_commutator() {
        let act = inversion(3);
        let ext = semidirect_product(&act).unwrap();
        let a = Word::letter(ext.signature(), 0, 1).unwrap();
        let x = Word::letter(ext.signature(), 1, 1).unwrap();
        let c = Word::commutator(&a, &x).unwrap();
        // a . 1 = 2, so [a, 1] -> 2 - 1 = 1
        assert_eq!(ext.core_eval(&c).unwrap(), act.core_on_commutator(1, 1));
        assert_eq!(ext.core_eval(&c).unwrap(), 1);
        assert!(ext.core_eval(&x).is_err());
    }

    #[test]
    fn conjugation_core_is_commutator() {
        let s3 = symmetric_group(3).unwrap();
        let ext = conjugation_extension(&s3).unwrap();
        for a in s3.elements() {
            for b in s3.elements() {
                let w = Word::commutator(&Word::letter(ext.signature(), 0, a).unwrap(), &Word::letter(ext.signature(), 1, b).unwrap()).unwrap();
                assert_eq!(ext.core_eval(&w).unwrap(), s3.commutator(a, b));
            }
        }
    }

    #[test]
    fn consistency_on_inversion() {
        let r = action_core_consistency(&inversion(3), 8, u64::MAX).unwrap();
        assert!(r.passed());
        assert!(r.words_checked > 10, "{}", r.words_checked);
        let r0 = action_core_consistency(&inversion(3), 0, u64::MAX).unwrap();
        assert_eq!(r0.words_checked, 1);
    }

    #[test]
    fn complement_extension_of_s3() {
        let s3 = symmetric_group(3).unwrap();
        let a3 = Subgroup::generated_by(&s3, &[s3.find("(1 2 3)").unwrap()]).unwrap();
        let c = Subgroup::generated_by(&s3, &[s3.find("(1 2)").unwrap()]).unwrap();
        let ext = extension_from_complement(&s3, &a3, &c).unwrap();
        let act = action_from_extension(&ext).unwrap();
        let t = ext.base().elements().find(|&b| b != ext.base().identity()).unwrap();
        for x in ext.kernel().elements() {
            assert_eq!(act.act(t, x), ext.kernel().inv(x));
        }
        let (_, phi) = semidirect_comparison(&ext).unwrap();
        assert!(phi.is_isomorphism());
    }
}
