use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use xmodkit::action::{commutator_expansion_eval, semidirect_product, GroupAction};
use xmodkit::condp::{projective_z4, random_arrow};
use xmodkit::group::{cyclic_group, dihedral_group, relabel, symmetric_group, z4_module, Elem, FiniteGroup, GroupHom, DEFAULT_BUDGET};
use xmodkit::words::{in_binary_cosmash, Letter, Signature, Word, WordHom};
use xmodkit::xmod::{conjugation_xmod, pi0, pi0_via_coequalizer, CrossedModule};

fn small_group(i: usize) -> FiniteGroup {
    match i % 5 {
        0 => cyclic_group(2).unwrap(),
        1 => cyclic_group(3).unwrap(),
        2 => cyclic_group(4).unwrap(),
        3 => symmetric_group(3).unwrap(),
        _ => dihedral_group(4).unwrap(),
    }
}

fn word_from(sig: &Signature, raw: &[(usize, usize)]) -> Word {
    let letters = raw.iter().map(|&(s, e)| {
        let s = s % sig.len();
        Letter::new(s, e % sig.factor(s).order())
    });
    Word::normalize(sig, letters).unwrap()
}

fn raw_word() -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0usize..2, 0usize..64), 0..12)
}

// A product of commutators of single letters from the two slots.
fn commutator_word(sig: &Signature, raw: &[(usize, usize)]) -> Word {
    let mut w = Word::empty(sig);
    for pair in raw.chunks(2) {
        let u = word_from(sig, &[(0, pair[0].1)]);
        let v = word_from(sig, &[(1, pair.get(1).map_or(1, |p| p.1))]);
        w = w.concat(&Word::commutator(&u, &v).unwrap()).unwrap();
    }
    w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_inverse_cancels(a in 0usize..5, b in 0usize..5, raw in raw_word()) {
        let sig = Signature::new(vec![small_group(a), small_group(b)]).unwrap();
        let w = word_from(&sig, &raw);
        prop_assert!(w.concat(&w.inverse()).unwrap().is_empty());
        let back = w.inverse().inverse();
        prop_assert_eq!(back.letters(), w.letters());
    }

    #[test]
    fn evaluation_is_multiplicative(a in 0usize..5, raw1 in raw_word(), raw2 in raw_word()) {
        let g = small_group(a);
        let sig = Signature::new(vec![g.clone(), g.clone()]).unwrap();
        let (u, v) = (word_from(&sig, &raw1), word_from(&sig, &raw2));
        let fold = WordHom::new(&sig, vec![GroupHom::identity(&g), GroupHom::identity(&g)]).unwrap();
        let uv = fold.evaluate(&u.concat(&v).unwrap()).unwrap();
        prop_assert_eq!(uv, g.mul(fold.evaluate(&u).unwrap(), fold.evaluate(&v).unwrap()));
    }

    #[test]
    fn text_round_trip(a in 0usize..5, b in 0usize..5, raw in raw_word()) {
        let sig = Signature::new(vec![small_group(a), small_group(b)]).unwrap();
        let w = word_from(&sig, &raw);
        let back = Word::parse(&sig, &w.to_text()).unwrap();
        prop_assert_eq!(back.letters(), w.letters());
    }

    #[test]
    fn commutators_lie_in_cosmash(a in 0usize..5, b in 0usize..5, raw in raw_word()) {
        let sig = Signature::new(vec![small_group(a), small_group(b)]).unwrap();
        prop_assert!(in_binary_cosmash(&commutator_word(&sig, &raw)).unwrap());
    }

    #[test]
    fn action_core_routes_agree(a in 0usize..5, raw in raw_word()) {
        let g = small_group(a);
        let act = GroupAction::conjugation(&g);
        let ext = semidirect_product(&act).unwrap();
        let w = commutator_word(ext.signature(), &raw);
        prop_assert_eq!(ext.core_eval(&w).unwrap(), commutator_expansion_eval(&act, &w).unwrap());
    }

    #[test]
    fn axioms_survive_relabeling(a in 0usize..5, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let g = small_group(a);
        let mut perm: Vec<Elem> = g.elements().collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let (h, _) = relabel(&g, &perm).unwrap();
        prop_assert!(conjugation_xmod(&h).is_valid());
        let bad = CrossedModule::candidate(GroupAction::trivial(&h, &h), GroupHom::identity(&h)).unwrap();
        prop_assert_eq!(bad.is_valid(), h.is_commutative());
    }

    #[test]
    fn random_arrows_have_consistent_pi0(seed in any::<u64>()) {
        let xm = random_arrow(&mut ChaCha8Rng::seed_from_u64(seed), 16, 32).unwrap();
        prop_assert!(xm.is_valid());
        let (q, _) = pi0(&xm).unwrap();
        let co = pi0_via_coequalizer(&xm).unwrap();
        prop_assert_eq!(co.group.order(), q.order());
        let wl = xm.check_axioms_wordlevel(4, DEFAULT_BUDGET).unwrap();
        prop_assert!(wl.passed());
    }

    #[test]
    fn z4_projectivity_is_freeness(free in 0usize..3, torsion in 0usize..3) {
        let m = z4_module(free, torsion).unwrap();
        prop_assert_eq!(projective_z4(&m).unwrap(), torsion == 0);
    }
}
