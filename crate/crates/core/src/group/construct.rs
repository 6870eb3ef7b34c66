use std::collections::{BTreeSet, HashMap};

use super::{Elem, FiniteGroup, GroupHom, MAX_ORDER};
use crate::error::{Error, Result};

pub fn trivial_group() -> FiniteGroup {
    cyclic_group(1).expect("order 1 is valid")
}

/// Z/n under addition, elements named `0..n-1`.
pub fn cyclic_group(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::OutOfRange("cyclic group of order 0".into()));
    }
    abelian_group_labelled(format!("Z{n}"), &[n])
}

/// Direct sum of cyclic groups with the given moduli; elements are tuples.
pub fn abelian_group(moduli: &[usize]) -> Result<FiniteGroup> {
    let label = if moduli.is_empty() {
        "0".to_string()
    } else {
        moduli.iter().map(|m| format!("Z{m}")).collect::<Vec<_>>().join("+")
    };
    abelian_group_labelled(label, moduli)
}

fn abelian_group_labelled(label: String, moduli: &[usize]) -> Result<FiniteGroup> {
    if moduli.contains(&0) {
        return Err(Error::OutOfRange("modulus 0".into()));
    }
    let order = moduli.iter().try_fold(1usize, |acc, &m| {
        let o = acc.saturating_mul(m);
        (o <= MAX_ORDER).then_some(o)
    });
    let order = order.ok_or(Error::OrderCap { order: usize::MAX, cap: MAX_ORDER })?;
    let digits = |mut x: usize| -> Vec<usize> {
        let mut d = vec![0; moduli.len()];
        for i in (0..moduli.len()).rev() {
            d[i] = x % moduli[i];
            x /= moduli[i];
        }
        d
    };
    let encode = |d: &[usize]| d.iter().zip(moduli).fold(0usize, |acc, (&x, &m)| acc * m + x);
    let all: Vec<Vec<usize>> = (0..order).map(digits).collect();
    let mut table = Vec::with_capacity(order * order);
    let mut sum = vec![0; moduli.len()];
    for a in &all {
        for b in &all {
            for i in 0..moduli.len() {
                sum[i] = (a[i] + b[i]) % moduli[i];
            }
            table.push(encode(&sum) as u16);
        }
    }
    let names = all
        .iter()
        .map(|d| {
            if d.len() == 1 {
                d[0].to_string()
            } else if d.is_empty() {
                "0".to_string()
            } else {
                format!("({})", d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            }
        })
        .collect();
    FiniteGroup::from_trusted_table(label, order, table, names)
}

/// (Z/4)^free_rank + (Z/2)^z2_rank as a Z/4Z-module.
pub fn z4_module(free_rank: usize, z2_rank: usize) -> Result<FiniteGroup> {
    let moduli: Vec<usize> = std::iter::repeat_n(4, free_rank).chain(std::iter::repeat_n(2, z2_rank)).collect();
    let g = abelian_group(&moduli)?;
    let label = match (free_rank, z2_rank) {
        (0, 0) => "0".to_string(),
        (a, 0) => format!("Z4^{a}"),
        (0, b) => format!("Z2^{b}"),
        (a, b) => format!("Z4^{a}+Z2^{b}"),
    };
    Ok(g.with_label(label))
}

/// S_n for 1 <= n <= 5, by composition of permutations (right to left).
pub fn symmetric_group(n: usize) -> Result<FiniteGroup> {
    if !(1..=5).contains(&n) {
        return Err(Error::OutOfRange(format!("symmetric group degree {n} (allowed 1..=5)")));
    }
    let mut gens = Vec::new();
    if n >= 2 {
        let mut t: Vec<usize> = (0..n).collect();
        t.swap(0, 1);
        gens.push(t);
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        gens.push(cycle);
    }
    from_permutations(format!("S{n}"), n, &gens)
}

/// Dihedral group of order 2n: elements `r^i s^j`.
pub fn dihedral_group(n: usize) -> Result<FiniteGroup> {
    if n < 1 {
        return Err(Error::OutOfRange("dihedral group of a 0-gon".into()));
    }
    let order = 2 * n;
    let idx = |i: usize, j: usize| j * n + i;
    let mut table = vec![0u16; order * order];
    for j in 0..2 {
        for i in 0..n {
            for l in 0..2 {
                for k in 0..n {
                    let ri = if j == 0 { (i + k) % n } else { (i + n - k) % n };
                    table[idx(i, j) * order + idx(k, l)] = idx(ri, (j + l) % 2) as u16;
                }
            }
        }
    }
    let names = (0..order)
        .map(|x| {
            let (i, j) = (x % n, x / n);
            let r = match i {
                0 => String::new(),
                1 => "r".to_string(),
                _ => format!("r{i}"),
            };
            match (r.is_empty(), j) {
                (true, 0) => "e".to_string(),
                (false, 0) => r,
                (_, _) => format!("{r}s"),
            }
        })
        .collect();
    FiniteGroup::from_trusted_table(format!("D{n}"), order, table, names)
}

/// The quaternion group Q8.
pub fn quaternion_group() -> FiniteGroup {
    // units 0=1, 1=i, 2=j, 3=k; element = 2*unit + (sign negative)
    let unit_mul = |a: usize, b: usize| -> (usize, bool) {
        match (a, b) {
            (0, x) | (x, 0) => (x, false),
            (x, y) if x == y => (0, true),
            (1, 2) => (3, false),
            (2, 1) => (3, true),
            (2, 3) => (1, false),
            (3, 2) => (1, true),
            (3, 1) => (2, false),
            (1, 3) => (2, true),
            _ => unreachable!(),
        }
    };
    let mut table = vec![0u16; 64];
    for a in 0..8 {
        for b in 0..8 {
            let (u, neg) = unit_mul(a / 2, b / 2);
            let sign = (a % 2 == 1) ^ (b % 2 == 1) ^ neg;
            table[a * 8 + b] = (2 * u + sign as usize) as u16;
        }
    }
    let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"].iter().map(|s| s.to_string()).collect();
    FiniteGroup::from_trusted_table("Q8".into(), 8, table, names).expect("Q8 table is valid")
}

/// The permutation group generated by `gens` (each a list of images of
/// `0..degree`). Elements are sorted lexicographically, so the identity is
/// element 0. Products compose right to left: `(s t)(i) = s(t(i))`.
pub fn from_permutations(label: impl Into<String>, degree: usize, gens: &[Vec<usize>]) -> Result<FiniteGroup> {
    for g in gens {
        let set: BTreeSet<usize> = g.iter().copied().collect();
        if g.len() != degree || set.len() != degree || set.iter().any(|&x| x >= degree) {
            return Err(Error::InvalidGroup(format!("{g:?} is not a permutation of degree {degree}")));
        }
    }
    let id: Vec<usize> = (0..degree).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    seen.insert(id.clone());
    let mut stack = vec![id];
    let compose = |s: &[usize], t: &[usize]| -> Vec<usize> { t.iter().map(|&i| s[i]).collect() };
    while let Some(p) = stack.pop() {
        for g in gens {
            let q = compose(&p, g);
            if seen.insert(q.clone()) {
                if seen.len() > MAX_ORDER {
                    return Err(Error::OrderCap { order: seen.len(), cap: MAX_ORDER });
                }
                stack.push(q);
            }
        }
    }
    let perms: Vec<Vec<usize>> = seen.into_iter().collect();
    let index: HashMap<&[usize], usize> = perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let order = perms.len();
    let mut table = Vec::with_capacity(order * order);
    for a in &perms {
        for b in &perms {
            table.push(index[compose(a, b).as_slice()] as u16);
        }
    }
    let names = perms.iter().map(|p| cycle_notation(p)).collect();
    FiniteGroup::from_trusted_table(label.into(), order, table, names)
}

/// Formats a permutation of `0..n` in 1-based cycle notation, `()` for the identity.
pub fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cycle = vec![start + 1];
        seen[start] = true;
        let mut x = p[start];
        while x != start {
            seen[x] = true;
            cycle.push(x + 1);
            x = p[x];
        }
        out.push('(');
        out.push_str(&cycle.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
        out.push(')');
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

/// Parses 1-based cycle notation such as `(1 2)(3 4 5)` into a permutation of `0..degree`.
pub fn parse_cycles(s: &str, degree: usize) -> Result<Vec<usize>> {
    let mut p: Vec<usize> = (0..degree).collect();
    let s = s.trim();
    if s.is_empty() || s == "()" {
        return Ok(p);
    }
    let bad = |why: &str| Error::InvalidGroup(format!("cannot parse permutation {s:?}: {why}"));
    let mut rest = s;
    let mut used = vec![false; degree];
    while !rest.is_empty() {
        let rest_trim = rest.trim_start();
        let open = rest_trim.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
        let close = open.find(')').ok_or_else(|| bad("unclosed cycle"))?;
        let points: Vec<usize> = open[..close]
            .split([' ', ','])
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| bad("non-numeric point")))
            .collect::<Result<_>>()?;
        for &x in &points {
            if x == 0 || x > degree {
                return Err(bad("point out of range"));
            }
            if used[x - 1] {
                return Err(bad("cycles are not disjoint"));
            }
            used[x - 1] = true;
        }
        for (i, &x) in points.iter().enumerate() {
            p[x - 1] = points[(i + 1) % points.len()] - 1;
        }
        rest = &open[close + 1..];
    }
    Ok(p)
}

/// `A × B` together with its projections and inclusions.
#[derive(Clone, Debug)]
pub struct DirectProduct {
    pub group: FiniteGroup,
    pub p1: GroupHom,
    pub p2: GroupHom,
    pub i1: GroupHom,
    pub i2: GroupHom,
}

impl DirectProduct {
    /// Index of the pair `(a, b)`.
    pub fn pair(&self, a: Elem, b: Elem) -> Elem {
        a * self.p2.target().order() + b
    }
}

/// Componentwise product; the pair `(a, b)` has index `a * |B| + b`.
pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<DirectProduct> {
    let (na, nb) = (a.order(), b.order());
    let order = na * nb;
    if order > MAX_ORDER {
        return Err(Error::OrderCap { order, cap: MAX_ORDER });
    }
    let mut table = Vec::with_capacity(order * order);
    for x in 0..order {
        let (xa, xb) = (x / nb, x % nb);
        for y in 0..order {
            let (ya, yb) = (y / nb, y % nb);
            table.push((a.mul(xa, ya) * nb + b.mul(xb, yb)) as u16);
        }
    }
    let names = (0..order).map(|x| format!("({},{})", a.name(x / nb), b.name(x % nb))).collect();
    let group = FiniteGroup::from_trusted_table(format!("{}x{}", a.label(), b.label()), order, table, names)?;
    let p1 = GroupHom::new_unchecked(group.clone(), a.clone(), (0..order).map(|x| x / nb).collect());
    let p2 = GroupHom::new_unchecked(group.clone(), b.clone(), (0..order).map(|x| x % nb).collect());
    let i1 = GroupHom::new_unchecked(a.clone(), group.clone(), (0..na).map(|x| x * nb + b.identity()).collect());
    let i2 = GroupHom::new_unchecked(b.clone(), group.clone(), (0..nb).map(|y| a.identity() * nb + y).collect());
    Ok(DirectProduct { group, p1, p2, i1, i2 })
}

/// Moves element `x` to index `perm[x]`. Returns the relabelled group and the
/// isomorphism from the original.
pub fn relabel(g: &FiniteGroup, perm: &[Elem]) -> Result<(FiniteGroup, GroupHom)> {
    let n = g.order();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::OutOfRange("relabelling is not a permutation".into()));
    }
    let mut table = vec![0u16; n * n];
    let mut names = vec![String::new(); n];
    for a in 0..n {
        names[perm[a]] = g.name(a).to_string();
        for b in 0..n {
            table[perm[a] * n + perm[b]] = perm[g.mul(a, b)] as u16;
        }
    }
    let h = FiniteGroup::from_trusted_table(g.label().to_string(), n, table, names)?;
    let iso = GroupHom::new_unchecked(g.clone(), h.clone(), perm.to_vec());
    Ok((h, iso))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_round_trip() {
        let p = parse_cycles("(1 3)(2 4 5)", 5).unwrap();
        assert_eq!(cycle_notation(&p), "(1 3)(2 4 5)");
        assert!(parse_cycles("(1 2)(2 3)", 3).is_err());
        assert!(parse_cycles("(1 7)", 3).is_err());
    }

    #[test]
    fn small_families() {
        let d4 = dihedral_group(4).unwrap();
        assert_eq!(d4.order(), 8);
        assert!(!d4.is_commutative());
        let q8 = quaternion_group();
        assert_eq!(q8.order(), 8);
        assert_eq!(q8.exponent(), 4);
        let i = q8.find("i").unwrap();
        let j = q8.find("j").unwrap();
        assert_eq!(q8.name(q8.mul(i, j)), "k");
        assert_eq!(q8.name(q8.mul(j, i)), "-k");
        // D4 and Q8 are distinguished by their number of involutions
        let inv = |g: &FiniteGroup| g.elements().filter(|&x| g.elem_order(x) == 2).count();
        assert_eq!(inv(&d4), 5);
        assert_eq!(inv(&q8), 1);
    }

    #[test]
    fn z4_modules() {
        let m = z4_module(1, 1).unwrap();
        assert_eq!(m.order(), 8);
        assert!(m.is_z4_module());
        assert!(!cyclic_group(8).unwrap().is_z4_module());
        assert_eq!(z4_module(0, 0).unwrap().order(), 1);
    }

    #[test]
    fn relabel_is_isomorphism() {
        let s3 = symmetric_group(3).unwrap();
        let (h, iso) = relabel(&s3, &[5, 3, 4, 0, 1, 2]).unwrap();
        assert!(iso.verify().is_ok());
        assert!(iso.is_injective());
        assert_eq!(h.name(5), s3.name(0));
    }

    #[test]
    fn product_projections() {
        let z2 = cyclic_group(2).unwrap();
        let z3 = cyclic_group(3).unwrap();
        let p = direct_product(&z2, &z3).unwrap();
        assert_eq!(p.group.order(), 6);
        assert!(p.group.is_commutative());
        assert_eq!(p.group.exponent(), 6);
        for h in [&p.p1, &p.p2, &p.i1, &p.i2] {
            h.verify().unwrap();
        }
    }
}
