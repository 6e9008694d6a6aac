mod common;

use std::collections::BTreeMap;

use glulib::betti::poly_mul;
use glulib::complex::*;
use glulib::gluing::{check_split, decomposition_tree, rho_binomial, var_names};
use glulib::invariants::betti;
use glulib::oracle::graded_betti_oracle;
use glulib::{Field, SemigroupGens, Strategy};

fn sg(g: &[u64]) -> SemigroupGens {
    SemigroupGens::new(g).unwrap()
}

fn build(g: &[u64]) -> FreeComplex {
    let c = sg(g);
    build_resolution(&c, &decomposition_tree(&c, Strategy::First).unwrap()).unwrap()
}

fn p(s: &str, n: usize) -> Poly {
    Poly::parse(s, &var_names("x", n)).unwrap()
}

fn assert_resolution(f: &FreeComplex) {
    let r = verify_complex(f).unwrap();
    assert!(r.passed(), "{:?}", r.violations.first());
    let e = verify_exactness_probabilistic(f, 32003, 3).unwrap();
    assert_eq!(e.status, ExactnessStatus::Pass, "{}", e.detail);
}

#[test]
fn koszul_on_one_binomial_is_a_hypersurface() {
    let ring = WeightedRing::with_prefix("x", &[3, 5]).unwrap();
    let f = koszul_complex(&ring, &[p("x1^5 - x2^3", 2)]).unwrap();
    assert_eq!(f.ranks(), vec![1, 1]);
    assert_eq!(f.shifts()[1], vec![15]);
    assert_resolution(&f);
}

#[test]
fn koszul_rejects_inhomogeneous_elements() {
    let ring = WeightedRing::with_prefix("x", &[3, 5]).unwrap();
    assert!(koszul_complex(&ring, &[p("x1^2 - x2", 2)]).is_err());
}

#[test]
fn ex4_is_a_koszul_complex() {
    let f = build(&[33, 55, 32, 56]);
    assert_eq!(f.ranks(), vec![1, 3, 3, 1]);
    // Tensor blocks run with the first factor's degree ascending, so the
    // second part's generator comes first.
    let d1: Vec<Poly> = (0..3).map(|c| f.d(1).entry(0, c)).collect();
    assert_eq!(
        d1,
        vec![p("x3^7 - x4^4", 4), p("x1^5 - x2^3", 4), p("x1*x2 - x3*x4", 4)]
    );
    assert_resolution(&f);
}

#[test]
fn ex3_shape() {
    let f = build(&[17, 22, 12, 32]);
    assert_eq!(f.ranks(), vec![1, 3, 3, 1]);
    assert_resolution(&f);
}

#[test]
fn hilbert_burch_matrix_of_5_13_12() {
    let c = sg(&[5, 13, 12]);
    let f = herzog_resolution(&c, &herzog_binomials(&c).unwrap()).unwrap();
    assert_eq!(f.ranks(), vec![1, 3, 2]);
    let want = [
        ["x1^3", "x2"],
        ["x2^2", "x3^2"],
        ["x3", "x1^2"],
    ];
    for (r, row) in want.iter().enumerate() {
        for (col, s) in row.iter().enumerate() {
            assert_eq!(f.d(2).entry(r, col), p(s, 3));
        }
    }
    let d1: Vec<Poly> = (0..3).map(|col| f.d(1).entry(0, col)).collect();
    assert_eq!(
        d1,
        vec![p("x3^3 - x1^2*x2^2", 3), p("x1^5 - x2*x3", 3), p("x2^3 - x1^3*x3^2", 3)]
    );
    assert_eq!(f.betti_table(), graded_betti_oracle(&c, Field::DEFAULT, None).unwrap());
    assert_resolution(&f);
}

#[test]
fn hilbert_burch_on_other_instances() {
    for g in [[9u64, 11, 13], [7, 8, 9], [10, 11, 13], [4, 5, 11]] {
        let c = sg(&g);
        let f = herzog_resolution(&c, &herzog_binomials(&c).unwrap()).unwrap();
        let oracle = graded_betti_oracle(&c, Field::DEFAULT, None).unwrap();
        assert_eq!(oracle.totals(), vec![1, 3, 2], "{g:?}");
        assert_eq!(f.betti_table(), oracle, "{g:?}");
        assert_resolution(&f);
    }
}

#[test]
fn hilbert_burch_rejects_complete_intersections_and_bad_shapes() {
    let ci = sg(&[4, 6, 7]);
    assert!(herzog_binomials(&ci).is_err());
    let c = sg(&[5, 13, 12]);
    let mut gens = herzog_binomials(&c).unwrap();
    gens[1] = gens[0].clone();
    assert!(matches!(herzog_resolution(&c, &gens), Err(glulib::Error::Invariant(_))));
}

#[test]
fn gorenstein_codimension_three() {
    let c = sg(&[5, 9, 13, 17]);
    let (perm, e) = bresinsky_exponents(&c).unwrap();
    let weights: Vec<u64> = perm.iter().map(|&i| c.gens()[i]).collect();
    let f = bresinsky_resolution(&WeightedRing::with_prefix("x", &weights).unwrap(), &e).unwrap();
    assert_eq!(f.ranks(), vec![1, 5, 5, 1]);
    assert_eq!(f.d(3), &f.d(1).transpose());
    // φ + φᵀ vanishes on the two displayed zero blocks.
    let phi = f.d(2);
    for r in 0..2 {
        for c in 0..2 {
            assert!(phi.get(r, c).is_none());
        }
    }
    for r in 2..4 {
        for c in 2..4 {
            assert!(phi.get(r, c).is_none());
        }
    }
    for r in 0..5 {
        for c in 0..5 {
            let s = phi.entry(r, c).add(&phi.entry(c, r)).unwrap();
            assert!(s.is_zero(), "({r},{c})");
        }
    }
    assert_resolution(&f);
    let built = build(&[5, 9, 13, 17]);
    assert_eq!(built.betti_table(), graded_betti_oracle(&c, Field::DEFAULT, None).unwrap());
    assert_resolution(&built);
}

#[test]
fn gorenstein_shape_rejects_inconsistent_exponents() {
    let c = sg(&[5, 9, 13, 17]);
    let (perm, mut e) = bresinsky_exponents(&c).unwrap();
    let weights: Vec<u64> = perm.iter().map(|&i| c.gens()[i]).collect();
    e.d[0][2] += 1;
    let r = bresinsky_resolution(&WeightedRing::with_prefix("x", &weights).unwrap(), &e);
    assert!(matches!(r, Err(glulib::Error::Argument(_))));
}

#[test]
fn unsupported_leaf_is_named() {
    // Indecomposable, embedding dimension 4, type 2.
    let c = sg(&[9, 11, 13, 15]);
    let t = decomposition_tree(&c, Strategy::First).unwrap();
    assert_eq!(build_resolution(&c, &t), Err(glulib::Error::Unsupported(vec![9, 11, 13, 15])));
}

fn ex1() -> SemigroupGens {
    sg(&[187, 289, 425, 323, 140, 364, 336])
}

#[test]
fn ex1_tensor_and_cone() {
    let c = ex1();
    let split = check_split(&c, &[187, 289, 425, 323], &[140, 364, 336]).unwrap().unwrap();
    let leaf = |s: &SemigroupGens, k: u64, prefix: &str| {
        let f = build_resolution(s, &decomposition_tree(s, Strategy::First).unwrap()).unwrap();
        let n = f.ring().nvars();
        f.renamed(var_names(prefix, n)).unwrap().scaled(k).unwrap()
    };
    let fa = leaf(&split.a, split.k1, "x");
    let fb = leaf(&split.b, split.k2, "y");
    let g = tensor_complex(&fa, &fb).unwrap();
    assert_eq!(g.ranks(), vec![1, 8, 22, 26, 13, 2]);
    assert!(verify_complex(&g).unwrap().passed());
    assert!(tensor_complex(&fa, &fa).is_err());

    let rho = rho_binomial(&split).unwrap();
    let left: Vec<u64> = rho.left.iter().copied().chain([0, 0, 0]).collect();
    let right: Vec<u64> = [0, 0, 0, 0].into_iter().chain(rho.right.iter().copied()).collect();
    let cone = mapping_cone_mul(&g, &Poly::binomial(&left, &right).unwrap()).unwrap();
    assert_eq!(cone.ranks(), vec![1, 9, 30, 48, 39, 15, 2]);
    // Alternating shift series of the cone = (1 - t^{k1k2}) × that of G.
    let factor = BTreeMap::from([(0, 1), (476, -1)]);
    assert_eq!(cone.shift_numerator(), poly_mul(&factor, &g.shift_numerator()).unwrap());
}

#[test]
fn ex1_full_resolution() {
    let c = ex1();
    let f = build(c.gens());
    assert_eq!(f.ranks(), vec![1, 9, 30, 48, 39, 15, 2]);
    let t = decomposition_tree(&c, Strategy::First).unwrap();
    assert_eq!(f.betti_table(), betti(&t, Field::DEFAULT).unwrap());
    assert_eq!(f.ring().names(), var_names("x", 7).as_slice());
    assert_eq!(f.ring().weights(), c.gens());
    let e = verify_exactness_probabilistic(&f, 32003, 5).unwrap();
    assert_eq!(e.status, ExactnessStatus::Pass, "{}", e.detail);
    assert!(verify_complex(&f).unwrap().passed());
}

#[test]
fn negative_controls() {
    let f = build(&[33, 55, 32, 56]);
    let text = to_text(&f);

    // Unit entry.
    assert!(text.contains("0 0: 1*x3^7 - 1*x4^4\n"));
    let unit = text.replacen("0 0: 1*x3^7 - 1*x4^4", "0 0: 1*1", 1);
    let g = from_text(&unit).unwrap();
    let r = verify_complex(&g).unwrap();
    assert!(r.count("minimality") >= 1);
    assert!(r.violations.iter().any(|v| v.check == "minimality" && (v.step, v.row, v.col) == (1, 0, 0)));

    // One sign flipped in d1.
    let flipped = text.replacen("0 0: 1*x3^7 - 1*x4^4", "0 0: -1*x3^7 + 1*x4^4", 1);
    let g = from_text(&flipped).unwrap();
    let r = verify_complex(&g).unwrap();
    assert!(r.count("d-squared") >= 1);
    let v = r.violations.iter().find(|v| v.check == "d-squared").unwrap();
    assert_eq!((v.step, v.row), (1, 0));

    // Duplicated column of d1 (with a zero row added to d2) is not exact.
    let mut shifts = f.shifts().to_vec();
    let first = shifts[1][0];
    shifts[1].push(first);
    let mut d1 = PolyMatrix::new(1, 4);
    for c in 0..3 {
        d1.set(0, c, f.d(1).entry(0, c));
    }
    d1.set(0, 3, f.d(1).entry(0, 0));
    let mut d2 = PolyMatrix::new(4, 3);
    for ((r, c), q) in f.d(2).iter() {
        d2.set(r, c, q.clone());
    }
    let g = FreeComplex::new(f.ring().clone(), shifts, vec![d1, d2, f.d(3).clone()]).unwrap();
    assert!(verify_complex(&g).unwrap().passed());
    let e = verify_exactness_probabilistic(&g, 32003, 3).unwrap();
    assert_eq!(e.status, ExactnessStatus::Fail);
    let e1 = verify_exactness_probabilistic(&g, 32003, 1).unwrap();
    assert_eq!(e1.status, ExactnessStatus::Inconclusive);
}

#[test]
fn text_export_round_trips_and_is_stable() {
    let f = build(&[187, 289, 425, 323, 140, 364, 336]);
    let text = to_text(&f);
    assert_eq!(text, to_text(&build(&[187, 289, 425, 323, 140, 364, 336])));
    let back = from_text(&text).unwrap();
    assert_eq!(back, f.clone().without_dg());
    let m2 = to_macaulay2(&f);
    assert!(m2.starts_with("-- free complex exported by glulib\nR = QQ[x1,x2,x3,x4,x5,x6,x7, Degrees => {{187},{289}"));
    assert!(m2.contains("C = chainComplex(d1,d2,d3,d4,d5,d6);"));
}

#[test]
fn small_text_export_golden() {
    let f = build(&[3, 5]);
    assert_eq!(
        to_text(&f),
        "complex v1\nring x1:3 x2:5\nF0: 0\nF1: 15\nd1 1x1\n0 0: 1*x1^5 - 1*x2^3\nend\n"
    );
    assert_eq!(
        to_macaulay2(&f),
        "-- free complex exported by glulib\n\
         R = QQ[x1,x2, Degrees => {{3},{5}}];\n\
         d1 = map(R^{{-0}}, R^{{-15}}, {{x1^5 - x2^3}});\n\
         assert isHomogeneous d1;\n\
         C = chainComplex(d1);\n\
         print betti C;\n"
    );
}

#[test]
fn malformed_text_is_rejected() {
    for s in [
        "",
        "complex v2\n",
        "complex v1\nring x1:3\nF0: 0\n",
        "complex v1\nring x1:3\nF0: 0\nF1: 3\nd1 1x1\n0 1: 1*x1^1\nend\n",
        "complex v1\nring x1:0\nF0: 0\nend\n",
    ] {
        assert!(from_text(s).is_err(), "{s:?}");
    }
}

#[test]
fn koszul_tensor_matches_koszul() {
    let ra = WeightedRing::with_prefix("x", &[3, 5]).unwrap();
    let rb = WeightedRing::with_prefix("y", &[2, 7]).unwrap();
    let f = koszul_complex(&ra, &[p("x1^5 - x2^3", 2)]).unwrap();
    let g = koszul_complex(&rb, &[Poly::parse("y1^7 - y2^2", &var_names("y", 2)).unwrap()]).unwrap();
    let t = tensor_complex(&f, &g).unwrap();
    let both = koszul_complex(
        &ra.concat(&rb).unwrap(),
        &[p("x1^5 - x2^3", 4), Poly::parse("y1^7 - y2^2", &["x1", "x2", "y1", "y2"].map(String::from)).unwrap()],
    )
    .unwrap();
    assert_eq!(t.ranks(), both.ranks());
    assert_eq!(t.betti_table(), both.betti_table());
    // Same complex up to the order of the two degree-one basis elements.
    assert_eq!(t.d(1).entry(0, 0), both.d(1).entry(0, 1));
    assert_eq!(t.d(1).entry(0, 1), both.d(1).entry(0, 0));
    assert_eq!(t.d(2).entry(0, 0), both.d(2).entry(1, 0));
    assert_eq!(t.d(2).entry(1, 0), both.d(2).entry(0, 0));
}

#[test]
fn tensor_with_the_ring_is_the_identity() {
    let f = build(&[5, 13, 12]);
    let unit = FreeComplex::new(
        WeightedRing::with_prefix("z", &[1]).unwrap(),
        vec![vec![0]],
        vec![],
    )
    .unwrap();
    let t = tensor_complex(&f, &unit).unwrap();
    assert_eq!(t.ranks(), f.ranks());
    assert_eq!(t.shifts(), f.shifts());
    for i in 1..=f.length() {
        assert_eq!(t.d(i), &f.d(i).map(|q| Ok(q.embed(0, 4))).unwrap());
    }
}

#[test]
fn cone_over_the_ring_is_a_hypersurface() {
    let ring = WeightedRing::with_prefix("x", &[3, 5]).unwrap();
    let r = FreeComplex::new(ring.clone(), vec![vec![0]], vec![]).unwrap();
    let cone = mapping_cone_mul(&r, &p("x1^5 - x2^3", 2)).unwrap();
    assert_eq!(cone, koszul_complex(&ring, &[p("x1^5 - x2^3", 2)]).unwrap().without_dg());
    assert!(mapping_cone_mul(&r, &p("x1 - x2", 2)).is_err());
}

#[test]
fn koszul_products() {
    let f = build(&[33, 55, 32, 56]);
    assert!(check_leibniz(&f, Sample::All).unwrap().is_empty());
    assert!(check_graded_commutativity(&f, Sample::All).unwrap().is_empty());
    assert!(check_associativity(&f, Sample::All).unwrap().is_empty());
    // On the tensor of two Koszul complexes: (e⊗1)(1⊗f) = e⊗f and
    // (1⊗f)(e⊗1) = -e⊗f. In degree 1, index 0 is 1⊗f and index 1 is e⊗1.
    let t = f.dg().unwrap();
    let n = f.ring().nvars();
    let x = Elem::basis(1, 1, n);
    let y = Elem::basis(1, 0, n);
    let xy = t.mul(&x, &y).unwrap();
    let yx = t.mul(&y, &x).unwrap();
    assert_eq!(xy.coeffs.len(), 1);
    assert_eq!(xy.coeffs.values().next().unwrap(), &Poly::constant(1, n));
    assert_eq!(yx, xy.scale(-1).unwrap());
}

#[test]
fn cone_products_follow_the_star_rule() {
    let f = build(&[33, 55, 32, 56]);
    let t = f.dg().unwrap();
    let n = f.ring().nvars();
    // M_1 = G_1 ⊕ G_0: the cone summand is index 2, the first summand 0, 1.
    let a = Elem::basis(1, 0, n);
    let b = Elem::basis(1, 2, n);
    // (a,0)⋆(0,1) = (0, a) lands in the second summand of M_2.
    let ab = t.mul(&a, &b).unwrap();
    assert_eq!(ab.coeffs.keys().copied().collect::<Vec<_>>(), vec![1]);
    // (0,1)⋆(a,0) = (0, (-1)^1 a).
    assert_eq!(t.mul(&b, &a).unwrap(), ab.scale(-1).unwrap());
    assert!(t.mul(&b, &b).unwrap().is_zero());
}

#[test]
fn lifted_products_on_base_cases() {
    for g in [&[5u64, 13, 12][..], &[5, 9, 13, 17]] {
        let f = build(g);
        let f = f.clone().with_dg(dg_by_lifting(&f).unwrap()).unwrap();
        assert!(check_leibniz(&f, Sample::All).unwrap().is_empty(), "{g:?}");
        assert!(check_graded_commutativity(&f, Sample::All).unwrap().is_empty());
        assert!(check_associativity(&f, Sample::All).unwrap().is_empty());
    }
}

#[test]
fn ex1_products() {
    let c = ex1();
    let t = decomposition_tree(&c, Strategy::First).unwrap();
    let opts = BuildOptions {
        lift_dg: true,
        ..Default::default()
    };
    let f = build_resolution_with(&c, &t, &opts).unwrap();
    let sample = Sample::Random {
        count: 400,
        seed: 7,
    };
    assert!(check_leibniz(&f, sample).unwrap().is_empty());
    assert!(check_graded_commutativity(&f, sample).unwrap().is_empty());
    assert!(check_associativity(&f, sample).unwrap().is_empty());
}

#[test]
fn user_supplied_base() {
    let c = sg(&[9, 11, 13, 15]);
    let t = decomposition_tree(&c, Strategy::First).unwrap();
    // Any complex with the right weights is accepted as given.
    let mut opts = BuildOptions::default();
    let ring = WeightedRing::with_prefix("v", c.gens()).unwrap();
    opts.bases
        .insert(c.gens().to_vec(), FreeComplex::new(ring, vec![vec![0]], vec![]).unwrap());
    let f = build_resolution_with(&c, &t, &opts).unwrap();
    assert_eq!(f.ring().names(), var_names("x", 4).as_slice());
    let wrong = FreeComplex::new(WeightedRing::with_prefix("v", &[1, 2, 3, 4]).unwrap(), vec![vec![0]], vec![]).unwrap();
    opts.bases.insert(c.gens().to_vec(), wrong);
    assert!(build_resolution_with(&c, &t, &opts).is_err());
}

#[test]
fn corpus_resolutions_are_minimal_and_exact() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    let mut built = 0;
    while built < 30 {
        let n = 3 + built % 3;
        let Some(g) = common::random_glued_tower(&mut rng, n, 3, 1200) else { continue };
        let c = sg(&g);
        let t = decomposition_tree(&c, Strategy::First).unwrap();
        let f = build_resolution(&c, &t).unwrap();
        assert_eq!(f.betti_table(), betti(&t, Field::DEFAULT).unwrap(), "{c}");
        assert_eq!(f.betti_table(), graded_betti_oracle(&c, Field::DEFAULT, None).unwrap(), "{c}");
        assert_resolution(&f);
        let s = t.split().unwrap();
        let [ta, tb] = t.children().unwrap();
        let na = build_resolution(ta.node(), ta).unwrap().shift_numerator();
        let nb = build_resolution(tb.node(), tb).unwrap().shift_numerator();
        let scale = |m: BTreeMap<u64, i64>, k: u64| -> BTreeMap<u64, i64> { m.into_iter().map(|(d, x)| (d * k, x)).collect() };
        let factor = BTreeMap::from([(0, 1), (s.k1 * s.k2, -1)]);
        let expected = poly_mul(&factor, &poly_mul(&scale(na, s.k1), &scale(nb, s.k2)).unwrap()).unwrap();
        assert_eq!(f.shift_numerator(), expected, "{c}");
        built += 1;
    }
}
