//! Reduced words in free products of finite groups.
//!
//! Free products are infinite, so they are never materialized: a word is a
//! reduced letter sequence, and a homomorphism out of a free product is a
//! tuple of slot maps evaluated letter by letter.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{Elem, FiniteGroup, GroupHom};

/// Default length bound for word audits.
pub const DEFAULT_AUDIT_LEN: usize = 8;

/// Longest word any enumeration will produce.
pub const MAX_WORD_LEN: usize = 16;

/// Ordered factor groups of a free product.
#[derive(Clone)]
pub struct Signature {
    factors: Arc<Vec<FiniteGroup>>,
}

impl Signature {
    pub fn new(factors: Vec<FiniteGroup>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::SignatureMismatch("a signature needs at least one factor".into()));
        }
        Ok(Signature { factors: Arc::new(factors) })
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factor(&self, slot: usize) -> &FiniteGroup {
        &self.factors[slot]
    }

    pub fn factors(&self) -> &[FiniteGroup] {
        &self.factors
    }

    pub fn same_as(&self, other: &Signature) -> bool {
        Arc::ptr_eq(&self.factors, &other.factors)
            || (self.len() == other.len() && self.factors.iter().zip(other.factors.iter()).all(|(a, b)| a.same_table(b)))
    }

    fn expect_len(&self, n: usize, what: &str) -> Result<()> {
        if self.len() != n {
            return Err(Error::SignatureMismatch(format!("{what} needs {n} slots, got {}", self.len())));
        }
        Ok(())
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.factors.iter().map(|g| g.label()).collect();
        write!(f, "Signature({})", labels.join(" + "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub slot: usize,
    pub elem: Elem,
}

impl Letter {
    pub fn new(slot: usize, elem: Elem) -> Self {
        Letter { slot, elem }
    }
}

/// Appends `l` to a reduced sequence, merging with the last letter if the slots agree.
#[inline]
fn push_reduced(letters: &mut Vec<Letter>, sig: &Signature, l: Letter) {
    let g = sig.factor(l.slot);
    if l.elem == g.identity() {
        return;
    }
    if let Some(last) = letters.last_mut() {
        if last.slot == l.slot {
            let m = g.mul(last.elem, l.elem);
            if m == g.identity() {
                letters.pop();
            } else {
                last.elem = m;
            }
            return;
        }
    }
    letters.push(l);
}

/// A reduced word: no identity letters, no two adjacent letters in one slot.
#[derive(Clone)]
pub struct Word {
    sig: Signature,
    letters: Vec<Letter>,
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters && self.sig.same_as(&other.sig)
    }
}

impl Eq for Word {}

impl Word {
    pub fn empty(sig: &Signature) -> Self {
        Word { sig: sig.clone(), letters: Vec::new() }
    }

    /// Reduces an arbitrary letter sequence.
    pub fn normalize(sig: &Signature, raw: impl IntoIterator<Item = Letter>) -> Result<Self> {
        let mut letters = Vec::new();
        for l in raw {
            if l.slot >= sig.len() || l.elem >= sig.factor(l.slot).order() {
                return Err(Error::OutOfRange(format!("letter {}:{} does not fit the signature", l.slot, l.elem)));
            }
            push_reduced(&mut letters, sig, l);
        }
        Ok(Word { sig: sig.clone(), letters })
    }

    pub(crate) fn from_reduced_unchecked(sig: &Signature, letters: Vec<Letter>) -> Self {
        Word { sig: sig.clone(), letters }
    }

    pub fn letter(sig: &Signature, slot: usize, elem: Elem) -> Result<Self> {
        Self::normalize(sig, [Letter::new(slot, elem)])
    }

    /// The commutator `u v u^-1 v^-1` of two words.
    pub fn commutator(u: &Word, v: &Word) -> Result<Self> {
        u.concat(v)?.concat(&u.inverse())?.concat(&v.inverse())
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if !self.sig.same_as(&other.sig) {
            return Err(Error::SignatureMismatch("concatenating words over different signatures".into()));
        }
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut letters, &self.sig, l);
        }
        Ok(Word { sig: self.sig.clone(), letters })
    }

    pub fn inverse(&self) -> Word {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|l| Letter::new(l.slot, self.sig.factor(l.slot).inv(l.elem)))
            .collect();
        Word { sig: self.sig.clone(), letters }
    }

    /// Sends each letter `(s, e)` to `(slots[s], homs[s](e))` over `target` and reduces.
    pub fn map(&self, target: &Signature, slots: &[usize], homs: &[GroupHom]) -> Result<Word> {
        if slots.len() != self.sig.len() || homs.len() != self.sig.len() {
            return Err(Error::SignatureMismatch("slot map does not cover the signature".into()));
        }
        for (s, h) in homs.iter().enumerate() {
            if slots[s] >= target.len() || !h.source().same_table(self.sig.factor(s)) || !h.target().same_table(target.factor(slots[s])) {
                return Err(Error::SignatureMismatch(format!("slot {s} map is not typed for the signatures")));
            }
        }
        let mut letters = Vec::with_capacity(self.len());
        for l in &self.letters {
            push_reduced(&mut letters, target, Letter::new(slots[l.slot], homs[l.slot].apply(l.elem)));
        }
        Ok(Word { sig: target.clone(), letters })
    }

    /// Relabels slots (identity on elements); merged slots must carry the same group.
    pub fn relabel(&self, target: &Signature, slots: &[usize]) -> Result<Word> {
        if slots.len() != self.sig.len() || slots.iter().any(|&t| t >= target.len()) {
            return Err(Error::SignatureMismatch("slot relabelling does not fit the signatures".into()));
        }
        let homs: Vec<GroupHom> = (0..self.sig.len())
            .map(|s| GroupHom::identity(self.sig.factor(s)).with_target(target.factor(slots[s])))
            .collect::<Result<_>>()
            .map_err(|_| Error::SignatureMismatch("relabelling merges slots carrying different groups".into()))?;
        self.map(target, slots, &homs)
    }

    /// Drops every letter of slot `omit`, then reduces (in the same signature).
    pub fn delete_slot(&self, omit: usize) -> Word {
        let mut letters = Vec::with_capacity(self.len());
        for &l in &self.letters {
            if l.slot != omit {
                push_reduced(&mut letters, &self.sig, l);
            }
        }
        Word { sig: self.sig.clone(), letters }
    }

    /// Product of the letters of slot `s` inside its factor.
    pub fn slot_product(&self, s: usize) -> Elem {
        let g = self.sig.factor(s);
        self.letters.iter().filter(|l| l.slot == s).fold(g.identity(), |acc, l| g.mul(acc, l.elem))
    }

    /// Text form, e.g. `(0:a 1:x 0:a^-1)`. Names are quoted when they contain
    /// whitespace or syntax characters.
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| format!("{}:{}", l.slot, quote_name(self.sig.factor(l.slot).name(l.elem))))
            .collect();
        format!("({})", parts.join(" "))
    }

    /// Parses the text form. A letter may carry `^k` for an integer power.
    pub fn parse(sig: &Signature, text: &str) -> Result<Word> {
        let bad = |why: String| Error::OutOfRange(format!("cannot parse word {text:?}: {why}"));
        let body = text
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| bad("expected parentheses".into()))?;
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0;
        let mut raw = Vec::new();
        while i < chars.len() {
            if chars[i].is_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let slot: usize = chars[start..i].iter().collect::<String>().parse().map_err(|_| bad("missing slot".into()))?;
            if slot >= sig.len() {
                return Err(bad(format!("slot {slot} out of range")));
            }
            if chars.get(i) != Some(&':') {
                return Err(bad("expected ':' after slot".into()));
            }
            i += 1;
            let name: String = if chars.get(i) == Some(&'"') {
                i += 1;
                let s = i;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(bad("unterminated quote".into()));
                }
                i += 1;
                chars[s..i - 1].iter().collect()
            } else {
                let s = i;
                while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '^' {
                    i += 1;
                }
                chars[s..i].iter().collect()
            };
            let mut power = 1i64;
            if chars.get(i) == Some(&'^') {
                i += 1;
                let s = i;
                while i < chars.len() && (chars[i] == '-' || chars[i].is_ascii_digit()) {
                    i += 1;
                }
                power = chars[s..i].iter().collect::<String>().parse().map_err(|_| bad("bad exponent".into()))?;
            }
            let g = sig.factor(slot);
            let e = g.find(&name).ok_or_else(|| bad(format!("unknown element {name:?} in slot {slot}")))?;
            raw.push(Letter::new(slot, g.pow(e, power)));
        }
        Word::normalize(sig, raw)
    }
}

fn quote_name(name: &str) -> String {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || "()\"^:".contains(c)) {
        format!("\"{name}\"")
    } else {
        name.to_string()
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A homomorphism out of a free product, one slot map per factor.
#[derive(Clone, Debug)]
pub struct WordHom {
    sig: Signature,
    target: FiniteGroup,
    maps: Vec<GroupHom>,
}

impl WordHom {
    pub fn new(sig: &Signature, maps: Vec<GroupHom>) -> Result<Self> {
        if maps.len() != sig.len() {
            return Err(Error::SignatureMismatch(format!("{} slot maps for {} slots", maps.len(), sig.len())));
        }
        let target = maps[0].target().clone();
        for (s, m) in maps.iter().enumerate() {
            if !m.source().same_table(sig.factor(s)) {
                return Err(Error::SignatureMismatch(format!("slot {s} map has the wrong source")));
            }
            if !m.target().same_table(&target) {
                return Err(Error::SignatureMismatch("slot maps have different targets".into()));
            }
        }
        Ok(WordHom { sig: sig.clone(), target, maps })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn target(&self) -> &FiniteGroup {
        &self.target
    }

    pub fn slot_map(&self, s: usize) -> &GroupHom {
        &self.maps[s]
    }

    pub fn evaluate(&self, w: &Word) -> Result<Elem> {
        if !self.sig.same_as(&w.sig) {
            return Err(Error::SignatureMismatch("evaluating a word over another signature".into()));
        }
        Ok(self.eval_letters(&w.letters))
    }

    #[inline]
    pub fn eval_letters(&self, letters: &[Letter]) -> Elem {
        letters
            .iter()
            .fold(self.target.identity(), |acc, l| self.target.mul(acc, self.maps[l.slot].apply(l.elem)))
    }
}

/// Membership in the kernel of `A + B -> A x B`: each slot's letters multiply to the identity.
pub fn in_binary_cosmash(w: &Word) -> Result<bool> {
    w.sig.expect_len(2, "binary cosmash membership")?;
    Ok((0..2).all(|s| w.slot_product(s) == w.sig.factor(s).identity()))
}

/// Membership in the kernel of `A + B + C -> (A+B) x (A+C) x (B+C)`: deleting
/// any one slot reduces the word to the empty word.
pub fn in_ternary_cosmash(w: &Word) -> Result<bool> {
    w.sig.expect_len(3, "ternary cosmash membership")?;
    Ok((0..3).all(|o| w.delete_slot(o).is_empty()))
}

/// Membership in the kernel of `[1, 0]: A + X -> A`.
pub fn in_flat(w: &Word) -> Result<bool> {
    w.sig.expect_len(2, "flat membership")?;
    Ok(w.slot_product(0) == w.sig.factor(0).identity())
}

fn two_slot(sig: &Signature, a: usize, b: usize) -> Result<Signature> {
    Signature::new(vec![sig.factor(a).clone(), sig.factor(b).clone()])
}

/// `(A, A, B) -> (A, B)`, merging the first two slots.
pub fn fold_s21(w: &Word) -> Result<Word> {
    w.sig.expect_len(3, "fold_s21")?;
    if !w.sig.factor(0).same_table(w.sig.factor(1)) {
        return Err(Error::SignatureMismatch("fold_s21 needs equal first two factors".into()));
    }
    w.relabel(&two_slot(&w.sig, 0, 2)?, &[0, 0, 1])
}

/// `(A, B, B) -> (A, B)`, merging the last two slots.
pub fn fold_s12(w: &Word) -> Result<Word> {
    w.sig.expect_len(3, "fold_s12")?;
    if !w.sig.factor(1).same_table(w.sig.factor(2)) {
        return Err(Error::SignatureMismatch("fold_s12 needs equal last two factors".into()));
    }
    w.relabel(&two_slot(&w.sig, 0, 1)?, &[0, 1, 1])
}

/// A word over `(A + B) + C`: maximal runs of slot-0/1 letters become single
/// letters of the inner free product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegroupedWord {
    pub inner: Signature,
    pub outer: FiniteGroup,
    pub blocks: Vec<Block>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    Inner(Word),
    Outer(Elem),
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl Eq for Signature {}

/// `(A, B, C) -> (A + B, C)`.
pub fn embed_j(w: &Word) -> Result<RegroupedWord> {
    w.sig.expect_len(3, "embed_j")?;
    let inner = two_slot(&w.sig, 0, 1)?;
    let mut blocks = Vec::new();
    let mut run: Vec<Letter> = Vec::new();
    for &l in &w.letters {
        if l.slot == 2 {
            if !run.is_empty() {
                blocks.push(Block::Inner(Word::from_reduced_unchecked(&inner, std::mem::take(&mut run))));
            }
            blocks.push(Block::Outer(l.elem));
        } else {
            run.push(l);
        }
    }
    if !run.is_empty() {
        blocks.push(Block::Inner(Word::from_reduced_unchecked(&inner, run)));
    }
    Ok(RegroupedWord { inner, outer: w.sig.factor(2).clone(), blocks })
}

impl RegroupedWord {
    /// Applies `inner_map: A + B -> D` to the regrouped slot and `outer_map: C -> C'`
    /// to the other, giving a reduced word over `(D, C')`.
    pub fn map(&self, inner_map: &WordHom, outer_map: &GroupHom) -> Result<Word> {
        if !inner_map.signature().same_as(&self.inner) || !outer_map.source().same_table(&self.outer) {
            return Err(Error::SignatureMismatch("regrouped word maps are mistyped".into()));
        }
        let sig = Signature::new(vec![inner_map.target().clone(), outer_map.target().clone()])?;
        let mut letters = Vec::new();
        for b in &self.blocks {
            let l = match b {
                Block::Inner(u) => Letter::new(0, inner_map.evaluate(u)?),
                Block::Outer(c) => Letter::new(1, outer_map.apply(*c)),
            };
            push_reduced(&mut letters, &sig, l);
        }
        Ok(Word { sig, letters })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosmashKind {
    /// Two slots, kernel of `A + B -> A x B`.
    Binary,
    /// Three slots, kernel of the ternary comparison.
    Ternary,
    /// Two slots, kernel of `[1, 0]: A + X -> A`.
    Flat,
}

impl CosmashKind {
    fn slots(self) -> usize {
        match self {
            CosmashKind::Ternary => 3,
            _ => 2,
        }
    }

    pub fn contains(self, w: &Word) -> Result<bool> {
        match self {
            CosmashKind::Binary => in_binary_cosmash(w),
            CosmashKind::Ternary => in_ternary_cosmash(w),
            CosmashKind::Flat => in_flat(w),
        }
    }
}

/// All member words of length at most `max_len`, in length-lexicographic
/// order (letters compared as `(slot, element)`).
///
/// The search prunes any prefix that cannot be completed to a member with
/// the letters left; `budget` bounds the number of prefixes visited.
pub fn enumerate_cosmash_words(sig: &Signature, max_len: usize, kind: CosmashKind, budget: u64) -> Result<Vec<Word>> {
    sig.expect_len(kind.slots(), "cosmash enumeration")?;
    if max_len > MAX_WORD_LEN {
        return Err(Error::LengthCap { len: max_len, cap: MAX_WORD_LEN });
    }
    let nodes = AtomicU64::new(0);
    let mut out = Vec::new();
    for len in 0..=max_len {
        let firsts: Vec<Letter> = if len == 0 {
            Vec::new()
        } else {
            (0..sig.len())
                .flat_map(|s| sig.factor(s).elements().filter(move |&e| e != sig.factor(s).identity()).map(move |e| Letter::new(s, e)))
                .collect()
        };
        if len == 0 {
            out.push(Word::empty(sig));
            continue;
        }
        let parts: Vec<Result<Vec<Word>>> = firsts
            .par_iter()
            .map(|&first| {
                let mut dfs = Dfs::new(sig, kind, len, &nodes, budget);
                dfs.push(first);
                let mut found = Vec::new();
                if dfs.feasible() {
                    dfs.run(&mut found)?;
                }
                Ok(found)
            })
            .collect();
        for p in parts {
            out.extend(p?);
        }
    }
    Ok(out)
}

enum Undo {
    Pushed,
    Popped(Letter),
    Replaced(Elem),
    Skipped,
}

struct Dfs<'a> {
    sig: &'a Signature,
    kind: CosmashKind,
    len: usize,
    nodes: &'a AtomicU64,
    budget: u64,
    letters: Vec<Letter>,
    products: Vec<Elem>,
    /// for the ternary case: the reduced word with slot `o` deleted
    stacks: [Vec<Letter>; 3],
    undo: Vec<([Undo; 3], Elem)>,
    memo: std::cell::RefCell<HashMap<u64, bool>>,
}

impl<'a> Dfs<'a> {
    fn new(sig: &'a Signature, kind: CosmashKind, len: usize, nodes: &'a AtomicU64, budget: u64) -> Self {
        Dfs {
            sig,
            kind,
            len,
            nodes,
            budget,
            letters: Vec::with_capacity(len),
            products: (0..sig.len()).map(|s| sig.factor(s).identity()).collect(),
            stacks: [Vec::new(), Vec::new(), Vec::new()],
            undo: Vec::with_capacity(len),
            memo: std::cell::RefCell::new(HashMap::new()),
        }
    }

    fn push(&mut self, l: Letter) {
        let g = self.sig.factor(l.slot);
        let prev = self.products[l.slot];
        self.products[l.slot] = g.mul(prev, l.elem);
        let mut ops = [Undo::Skipped, Undo::Skipped, Undo::Skipped];
        if self.kind == CosmashKind::Ternary {
            for (o, op) in ops.iter_mut().enumerate() {
                if o == l.slot {
                    continue;
                }
                let st = &mut self.stacks[o];
                *op = match st.last_mut() {
                    Some(top) if top.slot == l.slot => {
                        let old = top.elem;
                        let m = g.mul(old, l.elem);
                        if m == g.identity() {
                            st.pop();
                            Undo::Popped(Letter::new(l.slot, old))
                        } else {
                            top.elem = m;
                            Undo::Replaced(old)
                        }
                    }
                    _ => {
                        st.push(l);
                        Undo::Pushed
                    }
                };
            }
        }
        self.letters.push(l);
        self.undo.push((ops, prev));
    }

    fn pop(&mut self) {
        let l = self.letters.pop().expect("pop on empty prefix");
        let (ops, prev) = self.undo.pop().expect("undo record");
        self.products[l.slot] = prev;
        for (o, op) in ops.into_iter().enumerate() {
            let st = &mut self.stacks[o];
            match op {
                Undo::Skipped => {}
                Undo::Pushed => {
                    st.pop();
                }
                Undo::Popped(old) => st.push(old),
                Undo::Replaced(old) => st.last_mut().expect("replaced top").elem = old,
            }
        }
    }

    /// Whether the current prefix can still be completed to a member of exact length `len`.
    fn feasible(&self) -> bool {
        let remaining = self.len - self.letters.len();
        let last = self.letters.last().map(|l| l.slot);
        match self.kind {
            CosmashKind::Binary | CosmashKind::Flat => {
                let checked = if self.kind == CosmashKind::Flat { 1 } else { 2 };
                (0..checked).all(|s| {
                    // letters alternate, so the remaining count per slot is fixed
                    let r = match last {
                        Some(t) if t == s => remaining / 2,
                        Some(_) => remaining.div_ceil(2),
                        None => remaining,
                    };
                    let id = self.products[s] == self.sig.factor(s).identity();
                    match r {
                        0 => id,
                        1 => !id,
                        _ => true,
                    }
                })
            }
            CosmashKind::Ternary => {
                let mut need = [0usize; 3];
                for (o, st) in self.stacks.iter().enumerate() {
                    let mut count = [0usize; 3];
                    for l in st {
                        count[l.slot] += 1;
                    }
                    for s in 0..3 {
                        if s != o {
                            need[s] = need[s].max(count[s]);
                        }
                    }
                }
                need.iter().sum::<usize>() <= remaining && self.shape_reachable(remaining)
            }
        }
    }

    /// Whether the deletion stacks, tracked only by length and top slot, can
    /// all be emptied by exactly `remaining` further letters. Each letter may
    /// cancel the top of a stack of its slot, merge into it (when the factor
    /// has an element other than the identity and the inverse), or be pushed.
    fn shape_reachable(&self, remaining: usize) -> bool {
        let mut st = [(0u8, 0u8); 3];
        for (o, stack) in self.stacks.iter().enumerate() {
            if let Some(top) = stack.last() {
                st[o] = (stack.len() as u8, top.slot as u8);
            }
        }
        let last = self.letters.last().map_or(3, |l| l.slot as u8);
        let can_keep: [bool; 3] = std::array::from_fn(|s| self.sig.factor(s).order() >= 3);
        shape_reach(&mut self.memo.borrow_mut(), &can_keep, last, st, remaining as u8)
    }

    fn run(&mut self, found: &mut Vec<Word>) -> Result<()> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(Error::BudgetExhausted(self.budget));
        }
        if self.letters.len() == self.len {
            found.push(Word::from_reduced_unchecked(self.sig, self.letters.clone()));
            return Ok(());
        }
        let last = self.letters.last().map(|l| l.slot);
        for s in 0..self.sig.len() {
            if Some(s) == last {
                continue;
            }
            let g = self.sig.factor(s);
            for e in g.elements() {
                if e == g.identity() {
                    continue;
                }
                self.push(Letter::new(s, e));
                if self.feasible() {
                    self.run(found)?;
                }
                self.pop();
            }
        }
        Ok(())
    }
}

fn shape_reach(memo: &mut HashMap<u64, bool>, can_keep: &[bool; 3], last: u8, st: [(u8, u8); 3], r: u8) -> bool {
    if st.iter().any(|&(n, _)| n > r) {
        return false;
    }
    if r == 0 {
        return true;
    }
    let key = st.iter().fold(u64::from(last) << 8 | u64::from(r), |k, &(n, t)| k << 7 | u64::from(n) << 2 | u64::from(t));
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut ok = false;
    'slots: for s in 0..3u8 {
        if s == last {
            continue;
        }
        // successor options for the two stacks that see slot `s`
        let mut options: [Vec<(u8, u8)>; 3] = Default::default();
        for o in 0..3u8 {
            let (n, t) = st[o as usize];
            options[o as usize] = if o == s {
                vec![(n, t)]
            } else if n > 0 && t == s {
                let other = 3 - o - s;
                let popped = if n == 1 { (0, 0) } else { (n - 1, other) };
                if can_keep[s as usize] { vec![popped, (n, t)] } else { vec![popped] }
            } else {
                vec![(n + 1, s)]
            };
        }
        for &a in &options[0] {
            for &b in &options[1] {
                for &c in &options[2] {
                    if shape_reach(memo, can_keep, s, [a, b, c], r - 1) {
                        ok = true;
                        break 'slots;
                    }
                }
            }
        }
    }
    memo.insert(key, ok);
    ok
}

/// Searches for a binary cosmash word over the sources mapping onto `target`
/// under the slot maps `f`, `g` by lifting letter by letter.
pub fn cosmash_preimage(target: &Word, source: &Signature, f: &GroupHom, g: &GroupHom, budget: u64) -> Result<Option<Word>> {
    let maps = [f, g];
    let tsig = target.signature();
    tsig.expect_len(2, "cosmash preimage")?;
    source.expect_len(2, "cosmash preimage")?;
    let fibers: Vec<Vec<Elem>> = target
        .letters()
        .iter()
        .map(|l| source.factor(l.slot).elements().filter(|&x| maps[l.slot].apply(x) == l.elem).collect())
        .collect();
    let mut choice = vec![0usize; fibers.len()];
    let mut visited = 0u64;
    loop {
        visited += 1;
        if visited > budget {
            return Err(Error::BudgetExhausted(budget));
        }
        let letters: Vec<Letter> = target.letters().iter().zip(&choice).zip(&fibers).map(|((l, &c), fib)| Letter::new(l.slot, fib[c])).collect();
        let w = Word::normalize(source, letters)?;
        if in_binary_cosmash(&w)? {
            return Ok(Some(w));
        }
        // odometer over the fibers
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(None);
            }
            choice[i] += 1;
            if choice[i] < fibers[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_group, symmetric_group};

    fn sig2(a: usize, b: usize) -> Signature {
        Signature::new(vec![cyclic_group(a).unwrap(), cyclic_group(b).unwrap()]).unwrap()
    }

    #[test]
    fn normalization() {
        let sig = sig2(4, 3);
        let w = Word::normalize(&sig, [Letter::new(0, 1), Letter::new(0, 3)]).unwrap();
        assert!(w.is_empty());
        let w = Word::normalize(&sig, [Letter::new(0, 1), Letter::new(1, 1), Letter::new(1, 1)]).unwrap();
        assert_eq!(w.letters(), &[Letter::new(0, 1), Letter::new(1, 2)]);
        let w = Word::normalize(&sig, [Letter::new(0, 1), Letter::new(1, 1), Letter::new(1, 2)]).unwrap();
        assert_eq!(w.letters(), &[Letter::new(0, 1)]);
        assert!(Word::normalize(&sig, []).unwrap().is_empty());
    }

    #[test]
    fn membership() {
        let sig = sig2(2, 3);
        let a = Word::letter(&sig, 0, 1).unwrap();
        let x = Word::letter(&sig, 1, 1).unwrap();
        let c = Word::commutator(&a, &x).unwrap();
        assert_eq!(c.len(), 4);
        assert!(in_binary_cosmash(&c).unwrap());
        assert!(!in_binary_cosmash(&x).unwrap());
        assert!(in_binary_cosmash(&Word::empty(&sig)).unwrap());

        let z2 = cyclic_group(2).unwrap();
        let sig3 = Signature::new(vec![z2.clone(), z2.clone(), z2.clone()]).unwrap();
        let l = |s| Word::letter(&sig3, s, 1).unwrap();
        let ab = Word::commutator(&l(0), &l(1)).unwrap();
        let abc = Word::commutator(&ab, &l(2)).unwrap();
        assert_eq!(abc.len(), 10);
        assert!(in_ternary_cosmash(&abc).unwrap());
        assert!(!in_ternary_cosmash(&ab).unwrap());
        assert!(in_ternary_cosmash(&Word::empty(&sig3)).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let s3 = symmetric_group(3).unwrap();
        let sig = Signature::new(vec![s3.clone(), cyclic_group(3).unwrap()]).unwrap();
        let w = Word::parse(&sig, r#"(0:"(1 2)" 1:1 0:"(1 2)"^-1 1:2)"#).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(Word::parse(&sig, &w.to_text()).unwrap(), w);
        assert_eq!(Word::parse(&sig, "(1:1^3)").unwrap().len(), 0);
        assert!(Word::parse(&sig, "(2:1)").is_err());
        assert!(Word::parse(&sig, "(0:nope)").is_err());
    }

    #[test]
    fn small_binary_enumerations() {
        let sig = sig2(2, 2);
        let w0 = enumerate_cosmash_words(&sig, 0, CosmashKind::Binary, u64::MAX).unwrap();
        assert_eq!(w0.len(), 1);
        let w3 = enumerate_cosmash_words(&sig, 3, CosmashKind::Binary, u64::MAX).unwrap();
        assert_eq!(w3.len(), 1);
        let w4 = enumerate_cosmash_words(&sig, 4, CosmashKind::Binary, u64::MAX).unwrap();
        // over two copies of Z2 the two commutators a x a x and x a x a are inverse to each other
        assert_eq!(w4.len(), 3);
        assert!(enumerate_cosmash_words(&sig, 40, CosmashKind::Binary, u64::MAX).is_err());
    }

    #[test]
    fn folds_relabel_slots() {
        let z2 = cyclic_group(2).unwrap();
        let z3 = cyclic_group(3).unwrap();
        let sig = Signature::new(vec![z2.clone(), z2.clone(), z3.clone()]).unwrap();
        let w = Word::normalize(&sig, [Letter::new(0, 1), Letter::new(1, 1), Letter::new(2, 1)]).unwrap();
        let f = fold_s21(&w).unwrap();
        assert_eq!(f.letters(), &[Letter::new(1, 1)]);
        assert!(fold_s12(&w).is_err());
    }

    fn all_reduced(sig: &Signature, len: usize) -> Vec<Vec<Letter>> {
        let mut out: Vec<Vec<Letter>> = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    let last = w.last().map(|l| l.slot);
                    (0..sig.len())
                        .filter(move |&s| Some(s) != last)
                        .flat_map(move |s| (1..sig.factor(s).order()).map(move |e| (s, e)))
                        .map(move |(s, e)| {
                            let mut v = w.clone();
                            v.push(Letter::new(s, e));
                            v
                        })
                })
                .collect();
        }
        out
    }

    #[test]
    fn pruned_enumeration_matches_filter() {
        for (orders, max_len) in [(vec![2, 2, 2], 10), (vec![3, 2, 2], 9), (vec![2, 3, 3], 8), (vec![3, 3, 3], 10)] {
            let sig = Signature::new(orders.iter().map(|&n| cyclic_group(n).unwrap()).collect()).unwrap();
            let got = enumerate_cosmash_words(&sig, max_len, CosmashKind::Ternary, u64::MAX).unwrap();
            let mut want = Vec::new();
            for len in 0..=max_len {
                for letters in all_reduced(&sig, len) {
                    let w = Word::from_reduced_unchecked(&sig, letters);
                    if in_ternary_cosmash(&w).unwrap() {
                        want.push(w);
                    }
                }
            }
            assert_eq!(got.len(), want.len(), "{orders:?}");
            assert_eq!(got, want, "{orders:?}");
        }
    }
}
