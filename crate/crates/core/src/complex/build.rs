//! Base-case resolutions and the recursive construction along a gluing tree.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::dg::{dg_by_lifting, exterior_table, subsets, DgTable};
use super::ops::{mapping_cone_mul, tensor_complex};
use super::verify::verify_complex;
use super::{FreeComplex, Poly, PolyMatrix, WeightedRing};
use crate::arith::{pseudo_frobenius, MembershipTable, SemigroupGens};
use crate::error::{Error, Result};
use crate::gluing::{find_gluings, var_names, Binomial, DecompTree, LeafKind};

/// Koszul complex on homogeneous `elements`, with its exterior-algebra
/// product table. Basis of `F_k`: `k`-subsets in lexicographic order.
pub fn koszul_complex(ring: &WeightedRing, elements: &[Poly]) -> Result<FreeComplex> {
    let n = ring.nvars();
    let degs = elements
        .iter()
        .enumerate()
        .map(|(t, f)| {
            f.homogeneous_degree(ring.weights()).ok_or_else(|| {
                Error::arg(format!("element {} is zero or not homogeneous", t + 1))
            })
        })
        .collect::<Result<Vec<u64>>>()?;
    let m = elements.len();
    let bases: Vec<Vec<Vec<usize>>> = (0..=m).map(|k| subsets(m, k)).collect();
    let shifts = bases
        .iter()
        .map(|b| b.iter().map(|s| s.iter().map(|&t| degs[t]).sum()).collect())
        .collect();
    let mut diffs = Vec::with_capacity(m);
    for k in 1..=m {
        let index: BTreeMap<&Vec<usize>, usize> =
            bases[k - 1].iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut d = PolyMatrix::new(bases[k - 1].len(), bases[k].len());
        for (col, s) in bases[k].iter().enumerate() {
            for (t, &x) in s.iter().enumerate() {
                let mut face = s.clone();
                face.remove(t);
                d.set(index[&face], col, elements[x].signed(t)?);
            }
        }
        diffs.push(d);
    }
    FreeComplex::new(ring.clone(), shifts, diffs)?.with_dg(exterior_table(m, n)?)
}

fn require_three_noncomplete(c: &SemigroupGens) -> Result<()> {
    if c.len() != 3 || !c.is_numerical() || !c.is_minimal() {
        return Err(Error::arg(format!(
            "{c}: expected three minimal generators with gcd 1"
        )));
    }
    if !find_gluings(c)?.is_empty() {
        return Err(Error::arg(format!(
            "{c} is a complete intersection; its ideal has two generators (use a Koszul complex)"
        )));
    }
    Ok(())
}

/// Smallest `m ≥ 1` with `m·g ∈ ⟨others⟩` and every factorization of `m·g`
/// over `others`.
fn pure_power(g: u64, others: &[u64]) -> Result<(u64, Vec<Vec<u64>>)> {
    let bound = g * others.iter().product::<u64>();
    let table = MembershipTable::new(others, bound)?;
    let m = (1..)
        .find(|&m| table.get(m * g) == Some(true))
        .ok_or_else(|| Error::invariant("no pure power found"))?;
    let facts = crate::oracle::factorizations(others, m * g, 10_000)?;
    Ok((m, facts))
}

/// The three binomials `x_i^{c_i} - x_j^{r_ij} x_k^{r_ik}` of a
/// non-complete-intersection semigroup of embedding dimension 3, in the
/// order of the variable raised to a pure power.
pub fn herzog_binomials(c: &SemigroupGens) -> Result<Vec<Binomial>> {
    require_three_noncomplete(c)?;
    let g = c.gens();
    (0..3)
        .map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let (m, facts) = pure_power(g[i], &[g[j], g[k]])?;
            let f = facts
                .into_iter()
                .find(|f| f[0] > 0 && f[1] > 0)
                .ok_or_else(|| {
                    Error::invariant(format!("{c}: x{}^{m} has no mixed factorization", i + 1))
                })?;
            let mut left = vec![0; 3];
            left[i] = m;
            let mut right = vec![0; 3];
            right[j] = f[0];
            right[k] = f[1];
            Ok(Binomial {
                left,
                right,
                degree: m * g[i],
            })
        })
        .collect()
}

/// Hilbert–Burch resolution `0 → R² → R³ → R` read off three binomials.
///
/// Each binomial must raise one variable to a pure power against a mixed
/// monomial in the other two, each variable being pure exactly once. With
/// `r_ij` the exponent of `x_j` in the binomial pure in `x_i`, the matrix is
/// `[x1^{r21} x2^{r12}; x2^{r32} x3^{r23}; x3^{r13} x1^{r31}]` and `d_1`
/// lists its signed 2×2 minors.
pub fn herzog_resolution(c: &SemigroupGens, gens: &[Binomial]) -> Result<FreeComplex> {
    require_three_noncomplete(c)?;
    if gens.len() != 3 {
        return Err(Error::arg(format!("expected 3 binomials, got {}", gens.len())));
    }
    let w = c.gens();
    let deg = |e: &[u64]| -> u64 { e.iter().zip(w).map(|(a, b)| a * b).sum() };
    let mut r = [[0u32; 3]; 3];
    let mut seen = [false; 3];
    let shape_err = |b: &Binomial| {
        Error::invariant(format!(
            "binomial {} does not fit the Hilbert–Burch shape of {c}",
            b.render(&var_names("x", 3), &var_names("x", 3))
        ))
    };
    for b in gens {
        if b.left.len() != 3 || b.right.len() != 3 {
            return Err(Error::arg("binomials must have three exponents per side"));
        }
        if deg(&b.left) != deg(&b.right) {
            return Err(Error::arg("binomial is not homogeneous"));
        }
        let support = |e: &[u64]| e.iter().filter(|&&x| x > 0).count();
        let (pure, mixed) = match (support(&b.left), support(&b.right)) {
            (1, 2) => (&b.left, &b.right),
            (2, 1) => (&b.right, &b.left),
            _ => return Err(shape_err(b)),
        };
        let i = pure.iter().position(|&x| x > 0).expect("support 1");
        if mixed[i] != 0 || seen[i] {
            return Err(shape_err(b));
        }
        seen[i] = true;
        for j in 0..3 {
            r[i][j] = u32::try_from(mixed[j]).map_err(|_| Error::Overflow("exponent"))?;
        }
    }
    let x = |v: usize, e: u32| {
        let mut ex = vec![0; 3];
        ex[v] = e;
        Poly::monomial(ex, 1)
    };
    let m = [
        [x(0, r[1][0]), x(1, r[0][1])],
        [x(1, r[2][1]), x(2, r[1][2])],
        [x(2, r[0][2]), x(0, r[2][0])],
    ];
    let minor = |a: usize, b: usize| -> Result<Poly> {
        m[a][0].mul(&m[b][1])?.sub(&m[a][1].mul(&m[b][0])?)
    };
    let d1 = vec![minor(1, 2)?.neg()?, minor(0, 2)?, minor(0, 1)?.neg()?];
    for (t, f) in d1.iter().enumerate() {
        let matches = gens.iter().any(|b| {
            Poly::binomial(&b.left, &b.right)
                .map(|p| p == *f || p.neg().ok().as_ref() == Some(f))
                .unwrap_or(false)
        });
        if !matches {
            return Err(Error::invariant(format!(
                "minor {} of the Hilbert–Burch matrix is not among the generators",
                t + 1
            )));
        }
    }
    let ring = WeightedRing::with_prefix("x", w)?;
    let s1: Vec<u64> = d1
        .iter()
        .map(|f| f.homogeneous_degree(w).ok_or_else(|| Error::invariant("minor not homogeneous")))
        .collect::<Result<_>>()?;
    let s2: Vec<u64> = (0..2)
        .map(|col| s1[0] + m[0][col].homogeneous_degree(w).expect("monomial"))
        .collect();
    let f = FreeComplex::new(
        ring,
        vec![vec![0], s1, s2],
        vec![
            PolyMatrix::from_rows(vec![d1])?,
            PolyMatrix::from_rows(m.iter().map(|row| row.to_vec()).collect())?,
        ],
    )?;
    let report = verify_complex(&f)?;
    if !report.passed() {
        return Err(Error::invariant(format!(
            "Hilbert–Burch complex of {c} fails verification: {:?}",
            report.violations.first()
        )));
    }
    Ok(f)
}

/// Exponents of the five generators of a Gorenstein, non-complete-intersection
/// ideal in four variables:
/// `x1^{c1} - x3^{d13}x4^{d14}`, `x3^{c3} - x1^{d31}x2^{d32}`,
/// `x4^{c4} - x2^{d42}x3^{d43}`, `x2^{c2} - x1^{d21}x4^{d24}`,
/// `x1^{d21}x3^{d43} - x2^{d32}x4^{d14}`. Indices are 0-based in `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BresinskyExponents {
    pub c: [u32; 4],
    pub d: [[u32; 4]; 4],
}

impl BresinskyExponents {
    fn mono(pairs: &[(usize, u32)]) -> Poly {
        let mut e = vec![0; 4];
        for &(v, x) in pairs {
            e[v] += x;
        }
        Poly::monomial(e, 1)
    }

    /// `δ_1` as displayed, in the order listed above.
    pub fn generators(&self) -> Result<Vec<Poly>> {
        let (c, d) = (self.c, self.d);
        let m = Self::mono;
        [
            (m(&[(0, c[0])]), m(&[(2, d[0][2]), (3, d[0][3])])),
            (m(&[(2, c[2])]), m(&[(0, d[2][0]), (1, d[2][1])])),
            (m(&[(3, c[3])]), m(&[(1, d[3][1]), (2, d[3][2])])),
            (m(&[(1, c[1])]), m(&[(0, d[1][0]), (3, d[1][3])])),
            (m(&[(0, d[1][0]), (2, d[3][2])]), m(&[(1, d[2][1]), (3, d[0][3])])),
        ]
        .iter()
        .map(|(a, b)| a.sub(b))
        .collect()
    }

    /// The middle map `φ` as displayed (antisymmetric up to the zero blocks).
    pub fn phi(&self) -> Result<PolyMatrix> {
        let d = self.d;
        let m = |v: usize, e: u32| Self::mono(&[(v, e)]);
        let z = Poly::zero;
        let n = |p: Poly| p.neg();
        PolyMatrix::from_rows(vec![
            vec![z(), z(), m(1, d[2][1]), m(2, d[3][2]), m(3, d[1][3])],
            vec![z(), z(), m(0, d[1][0]), m(3, d[0][3]), m(1, d[3][1])],
            vec![n(m(1, d[2][1]))?, n(m(0, d[1][0]))?, z(), z(), m(2, d[0][2])],
            vec![n(m(2, d[3][2]))?, n(m(3, d[0][3]))?, z(), z(), m(0, d[2][0])],
            vec![
                n(m(3, d[1][3]))?,
                n(m(1, d[3][1]))?,
                n(m(2, d[0][2]))?,
                n(m(0, d[2][0]))?,
                z(),
            ],
        ])
    }
}

/// `0 → R → R⁵ → R⁵ → R` with `δ_1`, `φ` and `δ_3 = δ_1ᵀ`, over `ring`
/// (four variables in the labeling of `e`). Inconsistent exponent data is
/// reported as an argument error.
pub fn bresinsky_resolution(ring: &WeightedRing, e: &BresinskyExponents) -> Result<FreeComplex> {
    if ring.nvars() != 4 {
        return Err(Error::arg("the Gorenstein codimension-3 shape needs four variables"));
    }
    let w = ring.weights();
    let gens = e.generators()?;
    let s1: Vec<u64> = gens
        .iter()
        .map(|f| {
            f.homogeneous_degree(w)
                .ok_or_else(|| Error::arg("exponent data gives a non-homogeneous generator"))
        })
        .collect::<Result<_>>()?;
    let phi = e.phi()?;
    let s2: Vec<u64> = (0..5)
        .map(|col| {
            let (r, p) = phi.columns()[col][0];
            s1[r] + p.homogeneous_degree(w).expect("monomial")
        })
        .collect();
    let s3 = vec![s2[0] + s1[0]];
    let d1 = PolyMatrix::from_rows(vec![gens.clone()])?;
    let d3 = d1.transpose();
    let f = FreeComplex::new(ring.clone(), vec![vec![0], s1, s2, s3], vec![d1, phi, d3])?;
    let report = verify_complex(&f)?;
    if !report.passed() {
        let v = &report.violations[0];
        return Err(Error::arg(format!(
            "exponent data inconsistent: {} fails at d{} ({}, {}): {}",
            v.check, v.step, v.row, v.col, v.detail
        )));
    }
    Ok(f)
}

/// Matches a four-generator semigroup against the Gorenstein shape.
///
/// Returns `perm` (variable `x_{t+1}` of the shape is generator `perm[t]`
/// of `c`) and the exponents; the first permutation, in lexicographic
/// order, whose complex satisfies `d² = 0` is used.
pub fn bresinsky_exponents(c: &SemigroupGens) -> Result<(Vec<usize>, BresinskyExponents)> {
    if c.len() != 4 || !c.is_numerical() || !c.is_minimal() {
        return Err(Error::arg(format!("{c}: expected four minimal generators with gcd 1")));
    }
    let g = c.gens();
    // (pure variable, mixed pair), 0-based in the shape's labeling.
    const SHAPE: [(usize, usize, usize); 4] = [(0, 2, 3), (2, 0, 1), (3, 1, 2), (1, 0, 3)];
    for perm in permutations(4) {
        let gv = |t: usize| g[perm[t]];
        let mut options: Vec<(usize, u32, Vec<(u32, u32)>)> = Vec::new();
        for &(i, a, b) in &SHAPE {
            let others: Vec<u64> = (0..4).filter(|&t| t != i).map(gv).collect();
            let (m, _) = pure_power(gv(i), &others)?;
            let mixed: Vec<(u32, u32)> = crate::oracle::factorizations(&[gv(a), gv(b)], m * gv(i), 1000)?
                .into_iter()
                .filter(|f| f[0] > 0 && f[1] > 0)
                .map(|f| (f[0] as u32, f[1] as u32))
                .collect();
            options.push((i, m as u32, mixed));
        }
        if options.iter().any(|o| o.2.is_empty()) {
            continue;
        }
        let ring = WeightedRing::with_prefix("x", &(0..4).map(gv).collect::<Vec<_>>())?;
        for choice in product(&options.iter().map(|o| o.2.len()).collect::<Vec<_>>()) {
            let mut e = BresinskyExponents {
                c: [0; 4],
                d: [[0; 4]; 4],
            };
            for (k, &(i, a, b)) in SHAPE.iter().enumerate() {
                let (x, y) = options[k].2[choice[k]];
                e.c[i] = options[k].1;
                e.d[i][a] = x;
                e.d[i][b] = y;
            }
            if bresinsky_resolution(&ring, &e).is_ok() {
                return Ok((perm, e));
            }
        }
    }
    Err(Error::Unsupported(c.gens().to_vec()))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Mixed-radix enumeration of index tuples.
fn product(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..s).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    /// Resolutions for leaves no builder covers, keyed by the leaf's
    /// generators. Their rings must carry those generators as weights.
    pub bases: BTreeMap<Vec<u64>, FreeComplex>,
    /// Attach lifted product tables to leaves of length ≤ 3 lacking one.
    pub lift_dg: bool,
}

/// The minimal resolution of `k[C]` along `tree`, over `x1..xn` in the
/// order of `C`'s generators.
pub fn build_resolution(c: &SemigroupGens, tree: &DecompTree) -> Result<FreeComplex> {
    build_resolution_with(c, tree, &BuildOptions::default())
}

pub fn build_resolution_with(
    c: &SemigroupGens,
    tree: &DecompTree,
    opts: &BuildOptions,
) -> Result<FreeComplex> {
    if tree.node().gens() != c.gens() {
        return Err(Error::arg(format!("tree is for {}, not {c}", tree.node())));
    }
    node_complex(tree, opts, var_names("x", c.len()))
}

fn node_complex(tree: &DecompTree, opts: &BuildOptions, names: Vec<String>) -> Result<FreeComplex> {
    match tree {
        DecompTree::Leaf { node, kind } => {
            let base = leaf_complex(node, *kind, opts)?.renamed(names)?;
            if opts.lift_dg && base.dg().is_none() && base.length() <= 3 {
                let t = dg_by_lifting(&base)?;
                base.with_dg(t)
            } else {
                Ok(base)
            }
        }
        DecompTree::Glued {
            node,
            split,
            children,
        } => {
            let pick = |part: &[usize]| part.iter().map(|&i| names[i].clone()).collect();
            let fa = node_complex(&children[0], opts, pick(&split.part1))?.scaled(split.k1)?;
            let fb = node_complex(&children[1], opts, pick(&split.part2))?.scaled(split.k2)?;
            let g = tensor_complex(&fa, &fb)?;
            let (p, q) = (split.p(), split.q());
            let left: Vec<u64> = split.alpha.iter().copied().chain(std::iter::repeat_n(0, q)).collect();
            let right: Vec<u64> = std::iter::repeat_n(0, p).chain(split.beta.iter().copied()).collect();
            let cone = mapping_cone_mul(&g, &Poly::binomial(&left, &right)?)?;
            let mut perm = vec![0; node.len()];
            for (t, &i) in split.part1.iter().enumerate() {
                perm[i] = t;
            }
            for (t, &i) in split.part2.iter().enumerate() {
                perm[i] = p + t;
            }
            cone.permuted(&perm)
        }
    }
}

fn leaf_complex(node: &SemigroupGens, kind: LeafKind, opts: &BuildOptions) -> Result<FreeComplex> {
    let g = node.gens();
    if let Some(base) = opts.bases.get(g) {
        if base.ring().weights() != g {
            return Err(Error::arg(format!(
                "supplied complex for {node} has weights {:?}",
                base.ring().weights()
            )));
        }
        return Ok(base.clone());
    }
    let ring = WeightedRing::with_prefix("x", g)?;
    match kind {
        LeafKind::Dim1 => {
            FreeComplex::new(ring, vec![vec![0]], Vec::new())?.with_dg(DgTable::new(vec![1], 1)?)
        }
        LeafKind::Dim2 => koszul_complex(&ring, &[Poly::binomial(&[g[1], 0], &[0, g[0]])?]),
        LeafKind::Indecomposable if g.len() == 3 => herzog_resolution(node, &herzog_binomials(node)?),
        LeafKind::Indecomposable if g.len() == 4 && pseudo_frobenius(node)?.len() == 1 => {
            let (perm, e) = bresinsky_exponents(node)?;
            let shaped = bresinsky_resolution(&WeightedRing::with_prefix("x", &perm.iter().map(|&i| g[i]).collect::<Vec<_>>())?, &e)?;
            let mut inverse = vec![0; 4];
            for (t, &i) in perm.iter().enumerate() {
                inverse[i] = t;
            }
            shaped.permuted(&inverse)?.renamed(ring.names().to_vec())
        }
        _ => Err(Error::Unsupported(g.to_vec())),
    }
}
