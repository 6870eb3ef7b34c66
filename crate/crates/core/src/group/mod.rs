//! Finite groups given by full multiplication tables.
//!
//! Elements are dense indices `0..order`. Every group carries element names
//! so that reports and witnesses can refer to elements the way a definition
//! file did.

mod construct;
mod hom;
mod search;
mod subgroup;

pub use construct::{
    abelian_group, cycle_notation, cyclic_group, dihedral_group, direct_product, from_permutations, parse_cycles,
    quaternion_group, relabel, symmetric_group, trivial_group, z4_module, DirectProduct,
};
pub use hom::{find_isomorphism, pullback, GroupHom, Pullback};
pub use search::{enumerate_homs, lift_through, HomSearch, RunEnd, SearchOutcome, DEFAULT_BUDGET};
pub use subgroup::{normal_subgroups, quotient, Subgroup};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Element index into a [`FiniteGroup`].
pub type Elem = usize;

/// Largest order for which a multiplication table is materialized.
pub const MAX_ORDER: usize = 4096;

/// Up to this order associativity is checked on every triple at construction.
pub const EXHAUSTIVE_ASSOC_ORDER: usize = 64;

const ASSOC_SAMPLES: usize = 20_000;

/// A finite group with a total multiplication table.
///
/// Cloning is cheap; the table is shared.
#[derive(Clone)]
pub struct FiniteGroup {
    inner: Arc<GroupData>,
}

struct GroupData {
    label: String,
    order: usize,
    table: Vec<u16>,
    identity: Elem,
    inv: Vec<u16>,
    elem_order: Vec<u32>,
    commutative: bool,
    exponent: usize,
    names: Vec<String>,
    by_name: HashMap<String, Elem>,
    generators: Vec<Elem>,
}

impl FiniteGroup {
    /// Builds a group from a row-major table `table[a * order + b] = a * b`.
    ///
    /// Checks closure, the identity, inverses and associativity (all triples
    /// up to [`EXHAUSTIVE_ASSOC_ORDER`], a deterministic sample above).
    pub fn from_table(label: impl Into<String>, order: usize, table: Vec<Elem>, names: Option<Vec<String>>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidGroup("a group needs at least one element".into()));
        }
        if order > MAX_ORDER {
            return Err(Error::OrderCap { order, cap: MAX_ORDER });
        }
        if table.len() != order * order {
            return Err(Error::InvalidGroup(format!(
                "table has {} entries, expected {}",
                table.len(),
                order * order
            )));
        }
        if let Some(bad) = table.iter().find(|&&x| x >= order) {
            return Err(Error::InvalidGroup(format!("table entry {bad} out of range")));
        }
        let table: Vec<u16> = table.into_iter().map(|x| x as u16).collect();
        let g = Self::assemble(label.into(), order, table, names)?;
        g.check_associative()?;
        Ok(g)
    }

    /// Assembles a group whose table is associative by construction
    /// (products, quotients, subgroups, semidirect products of verified data).
    pub(crate) fn from_trusted_table(label: String, order: usize, table: Vec<u16>, names: Vec<String>) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderCap { order, cap: MAX_ORDER });
        }
        let g = Self::assemble(label, order, table, Some(names))?;
        if cfg!(debug_assertions) {
            g.check_associative()?;
        }
        Ok(g)
    }

    fn assemble(label: String, order: usize, table: Vec<u16>, names: Option<Vec<String>>) -> Result<Self> {
        let row = |a: usize| &table[a * order..(a + 1) * order];
        let identity = (0..order)
            .find(|&e| row(e).iter().enumerate().all(|(x, &y)| y as usize == x) && (0..order).all(|x| table[x * order + e] as usize == x))
            .ok_or_else(|| Error::InvalidGroup("no two-sided identity".into()))?;
        let mut inv = vec![0u16; order];
        for a in 0..order {
            let b = row(a)
                .iter()
                .position(|&y| y as usize == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
            if table[b * order + a] as usize != identity {
                return Err(Error::InvalidGroup(format!("element {a} has no two-sided inverse")));
            }
            inv[a] = b as u16;
        }
        let mut elem_order = vec![0u32; order];
        for a in 0..order {
            let mut x = a;
            let mut k = 1u32;
            while x != identity {
                x = table[x * order + a] as usize;
                k += 1;
                if k as usize > order {
                    return Err(Error::InvalidGroup(format!("element {a} has no finite order")));
                }
            }
            elem_order[a] = k;
        }
        let commutative = (0..order).all(|a| (a + 1..order).all(|b| table[a * order + b] == table[b * order + a]));
        let exponent = elem_order.iter().fold(1usize, |acc, &o| lcm(acc, o as usize));
        let names = match names {
            Some(n) => {
                if n.len() != order {
                    return Err(Error::InvalidGroup(format!("{} names for {} elements", n.len(), order)));
                }
                n
            }
            None => (0..order).map(|i| i.to_string()).collect(),
        };
        let mut by_name = HashMap::with_capacity(order);
        for (i, n) in names.iter().enumerate() {
            if by_name.insert(n.clone(), i).is_some() {
                return Err(Error::InvalidGroup(format!("duplicate element name {n:?}")));
            }
        }
        let mut data = GroupData {
            label,
            order,
            table,
            identity,
            inv,
            elem_order,
            commutative,
            exponent,
            names,
            by_name,
            generators: Vec::new(),
        };
        data.generators = greedy_generators(&data);
        Ok(FiniteGroup { inner: Arc::new(data) })
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.order();
        let check = |a: Elem, b: Elem, c: Elem| -> Result<()> {
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                return Err(Error::InvalidGroup(format!(
                    "not associative on ({}, {}, {})",
                    self.name(a),
                    self.name(b),
                    self.name(c)
                )));
            }
            Ok(())
        };
        if n <= EXHAUSTIVE_ASSOC_ORDER {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            // xorshift keeps the sample reproducible without threading a seed through
            let mut state = 0x9e37_79b9_7f4a_7c15u64 ^ n as u64;
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state % n as u64) as usize
            };
            for _ in 0..ASSOC_SAMPLES {
                let (a, b, c) = (next(), next(), next());
                check(a, b, c)?;
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    /// Same group, different label.
    pub fn with_label(&self, label: impl Into<String>) -> Self {
        let d = &self.inner;
        FiniteGroup {
            inner: Arc::new(GroupData {
                label: label.into(),
                order: d.order,
                table: d.table.clone(),
                identity: d.identity,
                inv: d.inv.clone(),
                elem_order: d.elem_order.clone(),
                commutative: d.commutative,
                exponent: d.exponent,
                names: d.names.clone(),
                by_name: d.by_name.clone(),
                generators: d.generators.clone(),
            }),
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.inner.order
    }

    #[inline]
    pub fn identity(&self) -> Elem {
        self.inner.identity
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.inner.table[a * self.inner.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inner.inv[a] as usize
    }

    /// `g a g^-1`
    #[inline]
    pub fn conj(&self, g: Elem, a: Elem) -> Elem {
        self.mul(self.mul(g, a), self.inv(g))
    }

    /// `a b a^-1 b^-1`
    pub fn commutator(&self, a: Elem, b: Elem) -> Elem {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn pow(&self, a: Elem, k: i64) -> Elem {
        let ord = self.elem_order(a) as i64;
        let k = k.rem_euclid(ord);
        (0..k).fold(self.identity(), |acc, _| self.mul(acc, a))
    }

    pub fn elem_order(&self, a: Elem) -> usize {
        self.inner.elem_order[a] as usize
    }

    pub fn is_commutative(&self) -> bool {
        self.inner.commutative
    }

    pub fn exponent(&self) -> usize {
        self.inner.exponent
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order()
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.inner.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn find(&self, name: &str) -> Option<Elem> {
        self.inner.by_name.get(name).copied()
    }

    /// Deterministic generating set: repeatedly take the element of largest
    /// order outside the subgroup generated so far, ties broken by least index.
    pub fn generators(&self) -> &[Elem] {
        &self.inner.generators
    }

    pub fn product(&self, elems: impl IntoIterator<Item = Elem>) -> Elem {
        elems.into_iter().fold(self.identity(), |acc, x| self.mul(acc, x))
    }

    /// Whether the table is a module over Z/4Z: commutative with exponent dividing 4.
    pub fn is_z4_module(&self) -> bool {
        self.is_commutative() && 4 % self.exponent() == 0
    }

    /// Canonical byte serialization used for digests.
    pub fn digest_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 2 * self.inner.table.len());
        out.extend_from_slice(&(self.order() as u32).to_le_bytes());
        out.extend_from_slice(&(self.identity() as u32).to_le_bytes());
        for &x in &self.inner.table {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    /// Whether both groups share the same table. Labels and names are ignored.
    pub fn same_table(&self, other: &FiniteGroup) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.order() == other.order() && self.identity() == other.identity() && self.inner.table == other.inner.table)
    }

    /// Elements of the subgroup generated by `gens`, as a membership mask.
    pub(crate) fn closure_mask(&self, gens: &[Elem]) -> Vec<bool> {
        let mut mask = vec![false; self.order()];
        let mut stack = vec![self.identity()];
        mask[self.identity()] = true;
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !mask[y] {
                    mask[y] = true;
                    stack.push(y);
                }
            }
        }
        mask
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.same_table(other)
    }
}

impl Eq for FiniteGroup {}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({:?}, order {})", self.label(), self.order())
    }
}

fn greedy_generators(d: &GroupData) -> Vec<Elem> {
    let n = d.order;
    let mut in_sub = vec![false; n];
    in_sub[d.identity] = true;
    let mut members = vec![d.identity];
    let mut gens = Vec::new();
    while members.len() < n {
        let g = (0..n)
            .filter(|&x| !in_sub[x])
            .max_by(|&a, &b| d.elem_order[a].cmp(&d.elem_order[b]).then(b.cmp(&a)))
            .expect("proper subgroup has a complement element");
        gens.push(g);
        let mut stack = members.clone();
        while let Some(x) = stack.pop() {
            for &h in &gens {
                let y = d.table[x * n + h] as usize;
                if !in_sub[y] {
                    in_sub[y] = true;
                    members.push(y);
                    stack.push(y);
                }
            }
        }
    }
    gens
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_basics() {
        let z1 = cyclic_group(1).unwrap();
        assert_eq!(z1.order(), 1);
        assert!(z1.is_trivial());

        let z4 = cyclic_group(4).unwrap();
        assert_eq!(z4.order(), 4);
        assert_eq!(z4.exponent(), 4);
        assert!(z4.is_commutative());

        let z6 = cyclic_group(6).unwrap();
        assert_eq!(z6.mul(2, 5), 1);
        assert!(cyclic_group(0).is_err());
    }

    #[test]
    fn symmetric_orders() {
        let s3 = symmetric_group(3).unwrap();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_commutative());
        assert_eq!(symmetric_group(1).unwrap().order(), 1);
        assert_eq!(symmetric_group(4).unwrap().order(), 24);
        assert!(symmetric_group(0).is_err());
        assert!(symmetric_group(6).is_err());
    }

    #[test]
    fn rejects_non_associative_table() {
        // a Latin square with identity 0 that is not a group table
        let t = vec![0, 1, 2, 3, 4, 1, 0, 3, 4, 2, 2, 4, 0, 1, 3, 3, 2, 4, 0, 1, 4, 3, 1, 2, 0];
        assert!(matches!(FiniteGroup::from_table("bad", 5, t, None), Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn greedy_generators_prefer_high_order() {
        let z2z4 = direct_product(&cyclic_group(2).unwrap(), &cyclic_group(4).unwrap()).unwrap();
        let gens = z2z4.group.generators();
        assert_eq!(gens.len(), 2);
        assert_eq!(z2z4.group.elem_order(gens[0]), 4);
        let s4 = symmetric_group(4).unwrap();
        assert_eq!(s4.elem_order(s4.generators()[0]), 4);
    }

    #[test]
    fn names_resolve() {
        let s3 = symmetric_group(3).unwrap();
        let t = s3.find("(1 2)").unwrap();
        assert_eq!(s3.name(t), "(1 2)");
        assert_eq!(s3.elem_order(t), 2);
        assert_eq!(s3.name(s3.identity()), "()");
    }
}
