//! Invariants of `k[C]` computed from a decomposition tree: Betti numbers,
//! graded Betti tables, Cohen–Macaulay type, regularity, Hilbert series and
//! the small-embedding-dimension classification.
//!
//! Graded tables are kept in each node's own weighting and rescaled exactly
//! once, at the parent, through `j = k₁r + k₂s`. Leaves of embedding
//! dimension 1 and 2 use closed forms; indecomposable leaves use the oracle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{pseudo_frobenius, SemigroupGens};
use crate::betti::{poly_mul, BettiTable, HilbertNumerator};
use crate::error::{checked_add, checked_mul, Error, Result};
use crate::gluing::{find_gluings, DecompTree, GluingSplit, LeafKind};
use crate::linalg::Field;
use crate::oracle::graded_betti_oracle;

/// `β_i(C) = Σ_{i'} β_{i'}(A) [β_{i-i'}(B) + β_{i-i'-1}(B)]`.
pub fn betti_from_split(ba: &[u64], bb: &[u64]) -> Vec<u64> {
    let len = ba.len() + bb.len();
    let b = |k: isize| -> u64 {
        if k < 0 {
            0
        } else {
            bb.get(k as usize).copied().unwrap_or(0)
        }
    };
    (0..len)
        .map(|i| {
            (0..=i.min(ba.len().saturating_sub(1)))
                .map(|ip| {
                    let r = i as isize - ip as isize;
                    ba[ip] * (b(r) + b(r - 1))
                })
                .sum()
        })
        .collect()
}

/// Graded Betti table of `k[C]` from those of `k[A]` and `k[B]` (each in its
/// own weighting).
pub fn graded_betti_from_split(
    split: &GluingSplit,
    ta: &BettiTable,
    tb: &BettiTable,
) -> Result<BettiTable> {
    ta.check_cyclic()?;
    tb.check_cyclic()?;
    let shift = split.rho_degree()?;
    let mut t = BettiTable::new();
    for ((ia, r), ma) in ta.entries() {
        for ((ib, s), mb) in tb.entries() {
            let j = checked_add(
                checked_mul(split.k1, r, "graded Betti degree")?,
                checked_mul(split.k2, s, "graded Betti degree")?,
                "graded Betti degree",
            )?;
            let m = checked_mul(ma, mb, "graded Betti multiplicity")?;
            t.add(ia + ib, j, m);
            t.add(ia + ib + 1, checked_add(j, shift, "graded Betti degree")?, m);
        }
    }
    let expected = betti_from_split(&ta.totals(), &tb.totals());
    if t.totals() != expected {
        return Err(Error::invariant(format!(
            "graded totals {:?} disagree with the convolution {expected:?}",
            t.totals()
        )));
    }
    Ok(t)
}

/// Graded Betti table of `k[C]` along `tree`; indecomposable leaves are
/// resolved by the oracle over `field`.
pub fn betti(tree: &DecompTree, field: Field) -> Result<BettiTable> {
    match tree {
        DecompTree::Leaf { node, kind } => leaf_table(node, *kind, field),
        DecompTree::Glued {
            split, children, ..
        } => {
            let ta = betti(&children[0], field)?;
            let tb = betti(&children[1], field)?;
            graded_betti_from_split(split, &ta, &tb)
        }
    }
}

fn leaf_table(node: &SemigroupGens, kind: LeafKind, field: Field) -> Result<BettiTable> {
    match kind {
        LeafKind::Dim1 => Ok(BettiTable::unit()),
        LeafKind::Dim2 => {
            let g = node.gens();
            Ok(BettiTable::hypersurface(checked_mul(
                g[0],
                g[1],
                "hypersurface degree",
            )?))
        }
        LeafKind::Indecomposable => graded_betti_oracle(node, field, None),
    }
}

/// Cohen–Macaulay type: the last total Betti number, checked against the
/// number of pseudo-Frobenius elements.
pub fn cm_type(tree: &DecompTree, field: Field) -> Result<u64> {
    let t = betti(tree, field)?;
    let last = *t.totals().last().expect("non-empty table");
    let pf = pseudo_frobenius(tree.node())?.len() as u64;
    if last != pf {
        return Err(Error::invariant(format!(
            "{}: last Betti number {last} but {pf} pseudo-Frobenius elements",
            tree.node()
        )));
    }
    Ok(last)
}

/// Weighted Castelnuovo–Mumford regularity by the gluing recursion, checked
/// at every node against `δ - (n - 1)` of the graded table.
pub fn regularity(tree: &DecompTree, field: Field) -> Result<i64> {
    Ok(regularity_with_table(tree, field)?.0)
}

fn regularity_with_table(tree: &DecompTree, field: Field) -> Result<(i64, BettiTable)> {
    let (reg, table) = match tree {
        DecompTree::Leaf { node, kind } => {
            let t = leaf_table(node, *kind, field)?;
            (t.regularity(), t)
        }
        DecompTree::Glued {
            split, children, ..
        } => {
            let (ra, ta) = regularity_with_table(&children[0], field)?;
            let (rb, tb) = regularity_with_table(&children[1], field)?;
            let (k1, k2) = (split.k1 as i64, split.k2 as i64);
            let (p, q) = (split.p() as i64, split.q() as i64);
            let reg = k1 * ra + k2 * rb + (p - 1) * (k1 - 1) + (q - 1) * (k2 - 1) + k1 * k2 - 1;
            (reg, graded_betti_from_split(split, &ta, &tb)?)
        }
    };
    let n = tree.node().len() as i64;
    let from_table = table.last_degree() as i64 - (n - 1);
    if reg != from_table || reg != table.regularity() {
        return Err(Error::invariant(format!(
            "{}: regularity {reg} vs δ-(n-1) = {from_table} vs max(j-i) = {}",
            tree.node(),
            table.regularity()
        )));
    }
    Ok((reg, table))
}

/// Hilbert series numerator by `N_C(t) = (1 - t^{k₁k₂}) N_A(t^{k₁}) N_B(t^{k₂})`.
pub fn hilbert_numerator(tree: &DecompTree, field: Field) -> Result<HilbertNumerator> {
    let node = tree.node();
    let num = match tree {
        DecompTree::Leaf { kind, .. } => match kind {
            LeafKind::Dim1 => BTreeMap::from([(0, 1)]),
            LeafKind::Dim2 => {
                let d = checked_mul(node.gens()[0], node.gens()[1], "hypersurface degree")?;
                BTreeMap::from([(0, 1), (d, -1)])
            }
            LeafKind::Indecomposable => graded_betti_oracle(node, field, None)?
                .hilbert_numerator(node.gens())
                .numerator()
                .clone(),
        },
        DecompTree::Glued {
            split, children, ..
        } => {
            let na = hilbert_numerator(&children[0], field)?.numerator_substituted(split.k1)?;
            let nb = hilbert_numerator(&children[1], field)?.numerator_substituted(split.k2)?;
            let cone = BTreeMap::from([(0, 1), (split.rho_degree()?, -1)]);
            poly_mul(&cone, &poly_mul(&na, &nb)?)?
        }
    };
    Ok(HilbertNumerator::new(num, node.gens().to_vec()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    PolynomialRing,
    Hypersurface,
    Ci,
    HilbertBurch,
    AciType2,
    GorensteinNonCi,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub embdim: usize,
    pub kind: Kind,
    pub decomposable: bool,
    pub cm_type: u64,
    /// Minimal number of generators of `I_C`.
    pub mu: u64,
    pub complete_intersection: bool,
    pub gorenstein: bool,
}

/// Complete-intersection decision along the tree: a gluing is a complete
/// intersection iff both parts are, and indecomposable leaves of embedding
/// dimension ≥ 3 never are.
pub fn is_complete_intersection(tree: &DecompTree, field: Field) -> Result<bool> {
    match tree {
        DecompTree::Leaf { node, kind } => match kind {
            LeafKind::Dim1 | LeafKind::Dim2 => Ok(true),
            LeafKind::Indecomposable => {
                let t = graded_betti_oracle(node, field, None)?;
                let mu = t.totals().get(1).copied().unwrap_or(0);
                if mu + 1 == node.len() as u64 {
                    return Err(Error::invariant(format!(
                        "{node} has no gluing yet I_C has {mu} = n - 1 generators"
                    )));
                }
                Ok(false)
            }
        },
        DecompTree::Glued { children, .. } => {
            Ok(is_complete_intersection(&children[0], field)?
                && is_complete_intersection(&children[1], field)?)
        }
    }
}

pub fn classify(tree: &DecompTree, field: Field) -> Result<Classification> {
    let node = tree.node();
    let n = node.len();
    let table = betti(tree, field)?;
    let totals = table.totals();
    let mu = totals.get(1).copied().unwrap_or(0);
    let cm_type = cm_type(tree, field)?;
    let ci = is_complete_intersection(tree, field)?;
    let decomposable = tree.split().is_some();
    let gorenstein = cm_type == 1;

    if ci && mu != n as u64 - 1 {
        return Err(Error::invariant(format!(
            "{node} classified as a complete intersection with μ = {mu}"
        )));
    }
    let kind = match n {
        1 => Kind::PolynomialRing,
        2 => Kind::Hypersurface,
        _ if ci => Kind::Ci,
        3 => {
            if mu != 3 || cm_type != 2 {
                return Err(Error::invariant(format!(
                    "{node}: non-CI in embedding dimension 3 with μ = {mu}, type {cm_type}"
                )));
            }
            Kind::HilbertBurch
        }
        _ if gorenstein => Kind::GorensteinNonCi,
        _ if mu == n as u64 && cm_type == 2 => Kind::AciType2,
        _ => Kind::Other,
    };

    if decomposable && n == 4 && !(ci || kind == Kind::AciType2) {
        return Err(Error::invariant(format!(
            "{node}: decomposable in embedding dimension 4 but neither CI nor ACI of type 2"
        )));
    }
    if decomposable && n == 5 && !(ci || kind == Kind::AciType2) {
        let simple_over_indecomposable_4 = find_gluings(node)?.iter().any(|s| {
            let big = if s.p() == 1 { &s.b } else { &s.a };
            s.is_simple()
                && big.len() == 4
                && find_gluings(big).map(|g| g.is_empty()).unwrap_or(false)
        });
        if !simple_over_indecomposable_4 {
            return Err(Error::invariant(format!(
                "{node}: decomposable in embedding dimension 5 outside the CI / ACI type 2 / simple-split trichotomy"
            )));
        }
    }

    Ok(Classification {
        embdim: n,
        kind,
        decomposable,
        cm_type,
        mu,
        complete_intersection: ci,
        gorenstein,
    })
}
