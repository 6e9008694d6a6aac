mod common;

use glulib::arith::*;
use glulib::oracle::graded_betti_oracle;
use glulib::{Field, SemigroupGens};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn numerical() -> impl Strategy<Value = SemigroupGens> {
    prop::collection::btree_set(2u64..60, 2..6)
        .prop_filter_map("gcd 1", |s| {
            let g: Vec<u64> = s.into_iter().collect();
            (gcd_all(&g) == 1).then(|| minimal_generators(&g).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn membership_is_monotone_in_generators(s in numerical(), extra in 2u64..80) {
        let mut g = s.gens().to_vec();
        if !g.contains(&extra) {
            g.push(extra);
        }
        let bigger = SemigroupGens::new(&g).unwrap();
        for x in 0..300 {
            if s.has(x) {
                prop_assert!(bigger.has(x));
            }
        }
    }

    #[test]
    fn everything_above_frobenius_is_in(s in numerical()) {
        let f = frobenius(&s).unwrap();
        prop_assert!(!s.contains(f).unwrap());
        for x in f + 1..f + 200 {
            prop_assert!(s.contains(x).unwrap());
        }
        let gaps = gaps(&s).unwrap();
        prop_assert!(gaps.iter().all(|&g| !s.has(g)));
        prop_assert_eq!(gaps.last().map(|&g| g as i64), Some(f).filter(|&f| f >= 0));
    }

    #[test]
    fn apery_sets(s in numerical()) {
        let f = frobenius(&s).unwrap();
        let m = *s.gens().iter().min().unwrap();
        let ap = apery_set(&s, m).unwrap();
        prop_assert_eq!(ap.len() as u64, m);
        for (r, &w) in ap.iter().enumerate() {
            prop_assert_eq!(w % m, r as u64);
            prop_assert!(s.has(w));
            prop_assert!((w as i64) < m as i64 + f + 1);
            prop_assert!(w < m || !s.has(w - m));
        }
    }

    #[test]
    fn minimal_generators_generate_the_same_semigroup(g in prop::collection::vec(2u64..50, 2..7)) {
        prop_assume!(gcd_all(&g) == 1);
        let mut dedup = g.clone();
        dedup.sort_unstable();
        dedup.dedup();
        let all = SemigroupGens::new(&dedup).unwrap();
        let min = minimal_generators(&g).unwrap();
        prop_assert!(min.is_minimal());
        for x in 0..400 {
            prop_assert_eq!(all.has(x), min.has(x));
        }
    }
}

#[test]
fn known_values() {
    let s = SemigroupGens::new(&[6, 9, 20]).unwrap();
    assert_eq!(frobenius(&s).unwrap(), 43);
    assert_eq!(pseudo_frobenius(&s).unwrap(), vec![43]);
    let s = SemigroupGens::new(&[5, 13, 12]).unwrap();
    assert_eq!(semigroup_type(&s).unwrap(), 2);
    assert_eq!(frobenius(&SemigroupGens::new(&[1]).unwrap()).unwrap(), -1);
    assert!(SemigroupGens::new(&[]).is_err());
    assert!(SemigroupGens::new(&[3, 0]).is_err());
    assert!(SemigroupGens::new(&[3, 3]).is_err());
}

#[test]
fn gorenstein_iff_top_betti_is_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut seen = [0usize; 2];
    for _ in 0..120 {
        let n = 3 + seen.iter().sum::<usize>() % 2;
        let Some(g) = common::random_leaf(&mut rng, n, 30) else { continue };
        let s = common::sg(&g);
        let top = *graded_betti_oracle(&s, Field::DEFAULT, None).unwrap().totals().last().unwrap();
        let ty = pseudo_frobenius(&s).unwrap().len();
        assert_eq!(ty == 1, top == 1, "{s}");
        assert_eq!(ty as u64, top, "{s}");
        seen[(ty == 1) as usize] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}
