//! Finitely generated subsemigroups of `ℕ^m`: membership, fiber-graph
//! generators and divisor-complex Betti numbers graded by `ℕ^m`, empirical
//! verification of declared gluings, and Betti propagation.
//!
//! There is no Frobenius-style bound in `ℕ^m`, so every scan takes an
//! explicit inclusive box `0 ≤ v ≤ bound` and its conclusions hold only
//! inside that box.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gluing::render_monomial;
use crate::invariants::betti_from_split;
use crate::linalg::Field;
use crate::oracle::{components_by_shared_support, reduced_homology, MAX_FIBER_NODES, MAX_ORACLE_GENS};

/// Largest box a scan may cover.
pub const MAX_BOX: u128 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineSemigroup {
    dim: usize,
    gens: Vec<Vec<u64>>,
}

impl AffineSemigroup {
    /// Generators are kept in the given order; zero vectors, ragged
    /// dimensions and duplicates are rejected.
    pub fn new(gens: Vec<Vec<u64>>) -> Result<Self> {
        let dim = gens
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::arg("an affine semigroup needs at least one generator"))?;
        if dim == 0 {
            return Err(Error::arg("generators must have at least one coordinate"));
        }
        let mut seen = BTreeSet::new();
        for g in &gens {
            if g.len() != dim {
                return Err(Error::arg(format!("generator {g:?} is not in ℕ^{dim}")));
            }
            if g.iter().all(|&x| x == 0) {
                return Err(Error::arg("zero vector among the generators"));
            }
            if !seen.insert(g.clone()) {
                return Err(Error::arg(format!("duplicate generator {g:?}")));
            }
        }
        Ok(AffineSemigroup { dim, gens })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[Vec<u64>] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Total degrees `|α_i|`, the weights of the variables.
    pub fn weights(&self) -> Vec<u64> {
        self.gens.iter().map(|g| g.iter().sum()).collect()
    }

    /// The generators of `self` followed by those of `other`.
    pub fn union(&self, other: &AffineSemigroup) -> Result<Self> {
        let mut g = self.gens.clone();
        g.extend(other.gens.iter().cloned());
        Self::new(g)
    }

    /// `Σ e_i α_i`.
    pub fn degree_of(&self, exps: &[u64]) -> Result<Vec<u64>> {
        if exps.len() != self.len() {
            return Err(Error::arg(format!(
                "{} exponents for {} generators",
                exps.len(),
                self.len()
            )));
        }
        let mut v = vec![0u64; self.dim];
        for (e, g) in exps.iter().zip(&self.gens) {
            for (x, &c) in v.iter_mut().zip(g) {
                *x = c
                    .checked_mul(*e)
                    .and_then(|t| x.checked_add(t))
                    .ok_or(Error::Overflow("affine degree"))?;
            }
        }
        Ok(v)
    }
}

impl fmt::Display for AffineSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .gens
            .iter()
            .map(|g| {
                let c: Vec<String> = g.iter().map(u64::to_string).collect();
                format!("({})", c.join(","))
            })
            .collect();
        write!(f, "⟨{}⟩", parts.join(","))
    }
}

/// Row-major indexing of the box `0 ≤ v ≤ bound`.
#[derive(Clone, Debug)]
struct BoxIndex {
    bound: Vec<u64>,
    strides: Vec<usize>,
    size: usize,
}

impl BoxIndex {
    fn new(bound: &[u64]) -> Result<Self> {
        let size: u128 = bound.iter().map(|&b| b as u128 + 1).product();
        if size > MAX_BOX {
            return Err(Error::resource("allocating the multidegree box", size, MAX_BOX));
        }
        let mut strides = vec![1usize; bound.len()];
        for i in (0..bound.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (bound[i + 1] as usize + 1);
        }
        Ok(BoxIndex {
            bound: bound.to_vec(),
            strides,
            size: size as usize,
        })
    }

    fn index(&self, v: &[u64]) -> usize {
        v.iter().zip(&self.strides).map(|(&x, &s)| x as usize * s).sum()
    }

    fn point(&self, mut idx: usize) -> Vec<u64> {
        self.strides
            .iter()
            .map(|&s| {
                let x = idx / s;
                idx %= s;
                x as u64
            })
            .collect()
    }

    fn contains(&self, v: &[u64]) -> bool {
        v.iter().zip(&self.bound).all(|(x, b)| x <= b)
    }
}

/// `v - g` when non-negative.
fn minus(v: &[u64], g: &[u64]) -> Option<Vec<u64>> {
    v.iter().zip(g).map(|(&a, &b)| a.checked_sub(b)).collect()
}

/// Membership in `⟨gens[i..]⟩` over the box, for every suffix `i`.
struct BoxTables {
    idx: BoxIndex,
    suffix: Vec<Vec<bool>>,
}

impl BoxTables {
    fn new(gens: &[Vec<u64>], bound: &[u64]) -> Result<Self> {
        let idx = BoxIndex::new(bound)?;
        let n = gens.len();
        let mut suffix = vec![vec![false; idx.size]; n + 1];
        suffix[n][0] = true;
        for i in (0..n).rev() {
            let (head, tail) = suffix.split_at_mut(i + 1);
            let cur = &mut head[i];
            let next = &tail[0];
            let g = &gens[i];
            // Points are visited in increasing index, and v - g precedes v.
            for k in 0..idx.size {
                if next[k] {
                    cur[k] = true;
                    continue;
                }
                let v = idx.point(k);
                if let Some(r) = minus(&v, g) {
                    cur[k] = cur[idx.index(&r)];
                }
            }
        }
        Ok(BoxTables { idx, suffix })
    }

    fn member(&self, v: &[u64]) -> bool {
        self.suffix[0][self.idx.index(v)]
    }

    fn factorizations(&self, gens: &[Vec<u64>], v: &[u64], cap: usize) -> Result<Vec<Vec<u64>>> {
        let mut out = Vec::new();
        let mut cur = vec![0u64; gens.len()];
        self.go(gens, 0, v.to_vec(), &mut cur, &mut out, cap)?;
        out.sort();
        Ok(out)
    }

    fn go(
        &self,
        gens: &[Vec<u64>],
        i: usize,
        rem: Vec<u64>,
        cur: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        cap: usize,
    ) -> Result<()> {
        if i == gens.len() {
            if rem.iter().all(|&x| x == 0) {
                if out.len() >= cap {
                    return Err(Error::resource(
                        "enumerating affine factorizations",
                        out.len() as u128 + 1,
                        cap as u128,
                    ));
                }
                out.push(cur.clone());
            }
            return Ok(());
        }
        let mut r = rem;
        let mut e = 0;
        loop {
            if self.suffix[i + 1][self.idx.index(&r)] {
                cur[i] = e;
                self.go(gens, i + 1, r.clone(), cur, out, cap)?;
            }
            match minus(&r, &gens[i]) {
                Some(next) => {
                    r = next;
                    e += 1;
                }
                None => break,
            }
        }
        cur[i] = 0;
        Ok(())
    }
}

fn check_bound(s: &AffineSemigroup, bound: &[u64]) -> Result<()> {
    if bound.len() != s.dim() {
        return Err(Error::arg(format!(
            "bound has {} coordinates, semigroup lives in ℕ^{}",
            bound.len(),
            s.dim()
        )));
    }
    Ok(())
}

/// Whether `v ∈ ⟨S⟩`, by a dynamic program over the box below `v`.
pub fn affine_contains(s: &AffineSemigroup, v: &[u64]) -> Result<bool> {
    check_bound(s, v)?;
    Ok(BoxTables::new(s.gens(), v)?.member(v))
}

/// Lexicographically largest factorization of `v` over `s`.
pub fn affine_lex_largest_factorization(s: &AffineSemigroup, v: &[u64]) -> Result<Option<Vec<u64>>> {
    check_bound(s, v)?;
    let t = BoxTables::new(s.gens(), v)?;
    if !t.member(v) {
        return Ok(None);
    }
    Ok(t.factorizations(s.gens(), v, MAX_FIBER_NODES)?.pop())
}

/// A binomial `x^left - x^right` of multidegree `multidegree`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AffineBinomial {
    pub multidegree: Vec<u64>,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
}

impl AffineBinomial {
    pub fn render(&self, left_names: &[String], right_names: &[String]) -> String {
        format!(
            "{}-{}",
            render_monomial(&self.left, left_names),
            render_monomial(&self.right, right_names)
        )
    }

    /// The unordered pair of monomials, for comparisons up to sign.
    pub fn monomial_pair(&self) -> (Vec<u64>, Vec<u64>) {
        if self.left <= self.right {
            (self.left.clone(), self.right.clone())
        } else {
            (self.right.clone(), self.left.clone())
        }
    }
}

/// Points `v ≠ 0` of the box lying in `⟨S⟩`, ordered by total degree then
/// lexicographically.
fn semigroup_points(t: &BoxTables) -> Vec<Vec<u64>> {
    let mut pts: Vec<Vec<u64>> = (1..t.idx.size)
        .filter(|&k| t.suffix[0][k])
        .map(|k| t.idx.point(k))
        .collect();
    pts.sort_by_key(|v| (v.iter().sum::<u64>(), v.clone()));
    pts
}

/// Minimal binomial generators of `I_S` in multidegrees inside the box, read
/// off disconnected fiber graphs; ordered by total degree, then multidegree.
pub fn affine_fiber_generators(s: &AffineSemigroup, bound: &[u64]) -> Result<Vec<AffineBinomial>> {
    check_bound(s, bound)?;
    let t = BoxTables::new(s.gens(), bound)?;
    let per_point: Vec<Vec<AffineBinomial>> = semigroup_points(&t)
        .par_iter()
        .map(|v| {
            let nodes = t.factorizations(s.gens(), v, MAX_FIBER_NODES)?;
            if nodes.len() < 2 {
                return Ok(Vec::new());
            }
            let g = components_by_shared_support(v.iter().sum(), nodes);
            Ok(crate::oracle::binomials_from_fiber(&g)
                .into_iter()
                .map(|b| AffineBinomial {
                    multidegree: v.clone(),
                    left: b.left,
                    right: b.right,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

/// Multigraded Betti numbers `β_{i,v}` for `v` in the box.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineBettiTable {
    pub entries: BTreeMap<(usize, Vec<u64>), u64>,
}

impl AffineBettiTable {
    pub fn totals(&self) -> Vec<u64> {
        let pd = self.entries.keys().map(|(i, _)| *i).max().unwrap_or(0);
        let mut t = vec![0; pd + 1];
        for ((i, _), m) in &self.entries {
            t[*i] += m;
        }
        t
    }

    pub fn pd(&self) -> usize {
        self.totals().len() - 1
    }
}

/// Divisor-complex Betti numbers of `k[S]` over `field` in the box.
pub fn affine_betti_oracle(s: &AffineSemigroup, bound: &[u64], field: Field) -> Result<AffineBettiTable> {
    check_bound(s, bound)?;
    let n = s.len();
    if n > MAX_ORACLE_GENS {
        return Err(Error::resource("building divisor complexes", n as u128, MAX_ORACLE_GENS as u128));
    }
    let t = BoxTables::new(s.gens(), bound)?;
    let sums: Vec<Vec<u64>> = (0usize..1 << n)
        .map(|m| {
            let e: Vec<u64> = (0..n).map(|i| (m >> i & 1) as u64).collect();
            s.degree_of(&e)
        })
        .collect::<Result<_>>()?;
    let mut points = semigroup_points(&t);
    points.insert(0, vec![0; s.dim()]);
    let found: Vec<(Vec<u64>, Vec<usize>)> = points
        .par_iter()
        .filter_map(|v| {
            let inside = |m: usize| minus(v, &sums[m]).is_some_and(|r| t.member(&r));
            if inside((1 << n) - 1) {
                return None;
            }
            let faces: Vec<u32> = (0..1usize << n).filter(|&m| inside(m)).map(|m| m as u32).collect();
            let h = reduced_homology(n, &faces, field);
            h.iter().any(|&d| d > 0).then(|| (v.clone(), h))
        })
        .collect();
    let mut out = AffineBettiTable::default();
    for (v, h) in found {
        for (i, &d) in h.iter().enumerate() {
            if d > 0 {
                out.entries.insert((i, v.clone()), d as u64);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GluingStatus {
    /// Generator counts agree everywhere in the box.
    Pass,
    Fail,
    /// The declared `ρ` (or the search for one) did not meet the
    /// preconditions; nothing was compared.
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorMismatch {
    pub multidegree: Vec<u64>,
    /// Count in `I_A` plus `I_B`, plus one at `deg ρ`.
    pub expected: usize,
    pub found: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineGluingReport {
    pub status: GluingStatus,
    pub bound: Vec<u64>,
    /// `left` over the first part's variables, `right` over the second's.
    pub rho: Option<AffineBinomial>,
    pub rho_searched: bool,
    pub generators_a: usize,
    pub generators_b: usize,
    pub generators_c: usize,
    pub mismatches: Vec<GeneratorMismatch>,
    pub note: String,
}

const EVIDENCE: &str = "counts compared inside the bound only: evidence, not a proof";

/// Compares the minimal generators of `I_C`, `C = A ⊔ B`, with those of
/// `I_A`, `I_B` and one extra binomial at `deg ρ`, multidegree by
/// multidegree inside the box. Without `rho`, the smallest common
/// multidegree `v ∈ ⟨A⟩ ∩ ⟨B⟩` (total degree, then lexicographic) is used
/// with lexicographically largest factorizations on both sides.
pub fn affine_gluing_verify(
    a: &AffineSemigroup,
    b: &AffineSemigroup,
    rho: Option<(&[u64], &[u64])>,
    bound: &[u64],
) -> Result<AffineGluingReport> {
    if a.dim() != b.dim() {
        return Err(Error::arg("the two parts live in different dimensions"));
    }
    check_bound(a, bound)?;
    let c = a.union(b)?;
    let mut report = AffineGluingReport {
        status: GluingStatus::Rejected,
        bound: bound.to_vec(),
        rho: None,
        rho_searched: rho.is_none(),
        generators_a: 0,
        generators_b: 0,
        generators_c: 0,
        mismatches: Vec::new(),
        note: String::new(),
    };

    let rho = match rho {
        Some((alpha, beta)) => {
            if alpha.len() != a.len() || beta.len() != b.len() {
                report.note = format!(
                    "ρ has {} + {} exponents for parts of sizes {} and {}",
                    alpha.len(),
                    beta.len(),
                    a.len(),
                    b.len()
                );
                return Ok(report);
            }
            if alpha.iter().all(|&x| x == 0) || beta.iter().all(|&x| x == 0) {
                report.note = "ρ must involve both parts".into();
                return Ok(report);
            }
            let (da, db) = (a.degree_of(alpha)?, b.degree_of(beta)?);
            if da != db {
                report.note = format!("ρ is not homogeneous: multidegrees {da:?} and {db:?}");
                return Ok(report);
            }
            AffineBinomial {
                multidegree: da,
                left: alpha.to_vec(),
                right: beta.to_vec(),
            }
        }
        None => {
            let ta = BoxTables::new(a.gens(), bound)?;
            let tb = BoxTables::new(b.gens(), bound)?;
            let Some(v) = semigroup_points(&ta).into_iter().find(|v| tb.member(v)) else {
                report.note = "no common multidegree of ⟨A⟩ and ⟨B⟩ inside the bound".into();
                return Ok(report);
            };
            let alpha = ta.factorizations(a.gens(), &v, MAX_FIBER_NODES)?.pop().expect("member");
            let beta = tb.factorizations(b.gens(), &v, MAX_FIBER_NODES)?.pop().expect("member");
            AffineBinomial {
                multidegree: v,
                left: alpha,
                right: beta,
            }
        }
    };
    let idx = BoxIndex::new(bound)?;
    if !idx.contains(&rho.multidegree) {
        report.note = format!("deg ρ = {:?} lies outside the bound", rho.multidegree);
        report.rho = Some(rho);
        return Ok(report);
    }

    let count = |s: &AffineSemigroup| -> Result<(usize, BTreeMap<Vec<u64>, usize>)> {
        let g = affine_fiber_generators(s, bound)?;
        let mut m = BTreeMap::new();
        for b in &g {
            *m.entry(b.multidegree.clone()).or_insert(0) += 1;
        }
        Ok((g.len(), m))
    };
    let (na, ga) = count(a)?;
    let (nb, gb) = count(b)?;
    let (nc, gc) = count(&c)?;
    let mut expected = ga;
    for (v, k) in gb {
        *expected.entry(v).or_insert(0) += k;
    }
    *expected.entry(rho.multidegree.clone()).or_insert(0) += 1;
    let degrees: BTreeSet<&Vec<u64>> = expected.keys().chain(gc.keys()).collect();
    for v in degrees {
        let (e, f) = (expected.get(v).copied().unwrap_or(0), gc.get(v).copied().unwrap_or(0));
        if e != f {
            report.mismatches.push(GeneratorMismatch {
                multidegree: v.clone(),
                expected: e,
                found: f,
            });
        }
    }
    report.status = if report.mismatches.is_empty() {
        GluingStatus::Pass
    } else {
        GluingStatus::Fail
    };
    report.generators_a = na;
    report.generators_b = nb;
    report.generators_c = nc;
    report.rho = Some(rho);
    report.note = EVIDENCE.into();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagatedBetti {
    pub totals: Vec<u64>,
    pub pd_a: usize,
    pub pd_b: usize,
    pub pd: usize,
}

/// Betti totals of a gluing from those of its parts, with
/// `pd(C) = pd(A) + pd(B) + 1` checked.
pub fn affine_betti_propagate(ba: &[u64], bb: &[u64]) -> Result<PropagatedBetti> {
    let trim = |v: &[u64]| -> Result<Vec<u64>> {
        let end = v.iter().rposition(|&x| x != 0).map_or(0, |p| p + 1);
        if end == 0 || v[0] != 1 {
            return Err(Error::arg(format!("Betti totals {v:?} must start with 1")));
        }
        Ok(v[..end].to_vec())
    };
    let (ba, bb) = (trim(ba)?, trim(bb)?);
    let totals = betti_from_split(&ba, &bb);
    let (pd_a, pd_b, pd) = (ba.len() - 1, bb.len() - 1, totals.len() - 1);
    if pd != pd_a + pd_b + 1 {
        return Err(Error::invariant(format!(
            "pd {pd} ≠ {pd_a} + {pd_b} + 1"
        )));
    }
    Ok(PropagatedBetti { totals, pd_a, pd_b, pd })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a6() -> AffineSemigroup {
        AffineSemigroup::new(vec![vec![4, 0, 0], vec![3, 1, 0], vec![2, 2, 0], vec![1, 3, 0]]).unwrap()
    }

    #[test]
    fn membership() {
        let a = a6();
        assert!(affine_contains(&a, &[7, 1, 0]).unwrap());
        assert!(affine_contains(&a, &[0, 0, 0]).unwrap());
        assert!(!affine_contains(&a, &[1, 0, 0]).unwrap());
        assert!(!affine_contains(&a, &[0, 4, 0]).unwrap());
        assert!(affine_contains(&a, &[1, 0]).is_err());
    }

    #[test]
    fn brute_force_membership_agrees() {
        let a = a6();
        let t = BoxTables::new(a.gens(), &[12, 12, 1]).unwrap();
        for x in 0..=12u64 {
            for y in 0..=12u64 {
                let mut found = false;
                for e in 0..=3u64 {
                    for f in 0..=4u64 {
                        for g in 0..=6u64 {
                            for h in 0..=4u64 {
                                if 4 * e + 3 * f + 2 * g + h == x && f + 2 * g + 3 * h == y {
                                    found = true;
                                }
                            }
                        }
                    }
                }
                assert_eq!(t.member(&[x, y, 0]), found, "({x},{y})");
            }
        }
    }

    #[test]
    fn construction_checks() {
        assert!(AffineSemigroup::new(vec![]).is_err());
        assert!(AffineSemigroup::new(vec![vec![0, 0]]).is_err());
        assert!(AffineSemigroup::new(vec![vec![1, 0], vec![1, 0]]).is_err());
        assert!(AffineSemigroup::new(vec![vec![1, 0], vec![1]]).is_err());
        assert_eq!(a6().weights(), vec![4, 4, 4, 4]);
    }

    #[test]
    fn propagation() {
        let p = affine_betti_propagate(&[1, 3, 2], &[1, 3, 2]).unwrap();
        assert_eq!(p.totals, vec![1, 7, 19, 25, 16, 4]);
        assert_eq!((p.pd_a, p.pd_b, p.pd), (2, 2, 5));
        let p = affine_betti_propagate(&[1], &[1]).unwrap();
        assert_eq!((p.totals, p.pd), (vec![1, 1], 1));
        assert!(affine_betti_propagate(&[], &[1]).is_err());
        assert_eq!(
            affine_betti_propagate(&[1, 5, 5, 1], &[1, 3, 2]).unwrap().totals,
            betti_from_split(&[1, 5, 5, 1], &[1, 3, 2])
        );
    }

    #[test]
    fn free_semigroup_has_no_relations() {
        let s = AffineSemigroup::new(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!(affine_fiber_generators(&s, &[5, 5, 5]).unwrap().is_empty());
        assert_eq!(affine_betti_oracle(&s, &[3, 3, 3], Field::DEFAULT).unwrap().totals(), vec![1]);
    }
}
