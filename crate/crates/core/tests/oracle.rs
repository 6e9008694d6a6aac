mod common;

use glulib::oracle::*;
use glulib::{Field, SemigroupGens};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn mixed_corpus(seed: u64, count: usize) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = 2 + out.len() % 4;
        let g = if out.len() % 2 == 0 {
            random_leaf(&mut rng, n, 40)
        } else {
            random_tower(&mut rng, n, 3, 600)
        };
        if let Some(g) = g {
            out.push(g);
        }
    }
    out
}

fn subset_sum(c: &SemigroupGens, mask: usize) -> u64 {
    (0..c.len()).filter(|i| mask >> i & 1 == 1).map(|i| c.gens()[i]).sum()
}

#[test]
fn first_betti_numbers_count_fiber_components() {
    for g in mixed_corpus(21, 40) {
        let c = sg(&g);
        let table = graded_betti_oracle(&c, Field::DEFAULT, None).unwrap();
        let top = table.degrees_at(1).last().copied().unwrap_or(0);
        for j in 1..=top {
            if !c.has(j) {
                continue;
            }
            let fg = fiber_graph(&c, j).unwrap();
            assert_eq!(table.get(1, j), fg.components as u64 - 1, "{c} at {j}");
        }
        let gens = minimal_generators_of_ideal(&c, top).unwrap();
        assert_eq!(gens.len() as u64, table.totals().get(1).copied().unwrap_or(0), "{c}");
    }
}

#[test]
fn euler_characteristic_matches_face_counts() {
    for g in mixed_corpus(22, 30) {
        let c = sg(&g);
        let table = graded_betti_oracle(&c, Field::DEFAULT, None).unwrap();
        let bound = betti_degree_bound(&c).unwrap();
        for j in 0..bound {
            let chi: i64 = (0..=table.pd()).map(|i| if i % 2 == 0 { 1 } else { -1 } * table.get(i, j) as i64).sum();
            let faces: i64 = (0usize..1 << c.len())
                .filter(|&m| j.checked_sub(subset_sum(&c, m)).is_some_and(|r| c.has(r)))
                .map(|m| if m.count_ones() % 2 == 0 { 1 } else { -1 })
                .sum();
            assert_eq!(chi, faces, "{c} at {j}");
        }
    }
}

#[test]
fn two_characteristics_agree() {
    for g in mixed_corpus(23, 60) {
        let c = sg(&g);
        let a = graded_betti_oracle(&c, Field::Prime(2), None).unwrap();
        let b = graded_betti_oracle(&c, Field::Prime(32003), None).unwrap();
        assert_eq!(a, b, "characteristic dependence at {c}");
    }
}

#[test]
fn nothing_beyond_the_degree_bound() {
    for g in mixed_corpus(24, 20) {
        let c = sg(&g);
        let bound = betti_degree_bound(&c).unwrap();
        let t = graded_betti_oracle(&c, Field::DEFAULT, None).unwrap();
        let wide = graded_betti_oracle(&c, Field::DEFAULT, Some(bound + 50)).unwrap();
        assert_eq!(t, wide, "{c}");
        assert!(t.entries().all(|((_, j), _)| j < bound));
    }
}

#[test]
fn reduced_homology_of_small_complexes() {
    let f = Field::DEFAULT;
    // Empty complex {∅}: H̃_{-1} = 1.
    assert_eq!(reduced_homology(3, &[0], f), vec![1, 0, 0, 0]);
    // Two points.
    assert_eq!(reduced_homology(2, &[0, 1, 2], f), vec![0, 1, 0]);
    // Boundary of a triangle.
    assert_eq!(reduced_homology(3, &[0, 1, 2, 4, 3, 5, 6], f), vec![0, 0, 1, 0]);
    // Full simplex is acyclic.
    let all: Vec<u32> = (0..8).collect();
    assert!(reduced_homology(3, &all, f).iter().all(|&d| d == 0));
}

proptest! {
    #[test]
    fn rank_ignores_row_and_column_order(
        rows in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 1..6),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm_rows = rows.clone();
        perm_rows.shuffle(&mut rng);
        let mut cols: Vec<usize> = (0..5).collect();
        cols.shuffle(&mut rng);
        let permuted: Vec<Vec<i64>> = perm_rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        for f in [Field::Prime(2), Field::Prime(32003), Field::Rational] {
            prop_assert_eq!(f.rank(&rows), f.rank(&permuted));
        }
    }

    #[test]
    fn homology_ignores_vertex_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_leaf(&mut rng, 4, 30).unwrap();
        let mut shuffled = c.clone();
        shuffled.shuffle(&mut rng);
        let a = graded_betti_oracle(&sg(&c), Field::DEFAULT, None).unwrap();
        let b = graded_betti_oracle(&sg(&shuffled), Field::DEFAULT, None).unwrap();
        prop_assert_eq!(a, b);
    }
}
