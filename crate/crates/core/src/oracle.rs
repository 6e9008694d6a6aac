//! Brute-force ground truth for graded Betti numbers, minimal binomial
//! generators and Hilbert functions.
//!
//! Graded Betti numbers come from the squarefree divisor complex
//! `Δ_j = { F ⊆ [n] : j - Σ_{i∈F} c_i ∈ ⟨C⟩ }` through
//! `β_{i,j} = dim H̃_{i-1}(Δ_j)`. Minimal generators of the toric ideal come
//! from fiber graphs, which share no code with the homology path.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::arith::{frobenius, MembershipTable, SemigroupGens};
use crate::betti::BettiTable;
use crate::error::{Error, Result};
use crate::gluing::Binomial;
use crate::linalg::Field;

/// Largest number of generators the divisor-complex oracle accepts.
pub const MAX_ORACLE_GENS: usize = 16;

/// Cap on the number of factorizations enumerated by the fiber-graph scan.
pub const MAX_FIBER_NODES: usize = 5_000_000;

/// `frobenius + Σ c_i + 1`. From this degree on every divisor complex is
/// the full simplex: `j - Σ_F c_i ≥ j - Σ c_i > frobenius`.
pub fn betti_degree_bound(c: &SemigroupGens) -> Result<u64> {
    let f = frobenius(c)?;
    let s = c.sum()?;
    let b = f as i128 + s as i128 + 1;
    u64::try_from(b).map_err(|_| Error::Overflow("Betti degree bound"))
}

/// Dimensions of reduced homology of a simplicial complex on `n` vertices
/// given as bitmasks of its faces (downward closed, containing the empty
/// face). `out[i] = dim H̃_{i-1}` for `i = 0..=n`.
pub fn reduced_homology(n: usize, faces: &[u32], field: Field) -> Vec<usize> {
    let mut by_size: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
    for &f in faces {
        by_size[f.count_ones() as usize].push(f);
    }
    for v in &mut by_size {
        v.sort_unstable();
    }
    // rank_of[k] = rank of ∂ from faces of size k to faces of size k-1.
    let mut rank_of = vec![0usize; n + 2];
    for k in 1..=n {
        let (cols, rows) = (&by_size[k], &by_size[k - 1]);
        if cols.is_empty() || rows.is_empty() {
            continue;
        }
        let row_index: BTreeMap<u32, usize> =
            rows.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let mut m = vec![vec![0i64; cols.len()]; rows.len()];
        for (ci, &face) in cols.iter().enumerate() {
            let mut sign = 1i64;
            for v in 0..n {
                if face >> v & 1 == 1 {
                    let r = row_index[&(face & !(1 << v))];
                    m[r][ci] = sign;
                    sign = -sign;
                }
            }
        }
        rank_of[k] = field.rank(&m);
    }
    (0..=n)
        .map(|size| by_size[size].len() - rank_of[size] - rank_of[size + 1])
        .collect()
}

/// Reduced homology of the divisor complex at `j`, as Betti contributions
/// indexed by homological step. `None` when the complex is acyclic by
/// inspection (void or a full simplex).
fn divisor_contributions(
    j: u64,
    subset_sums: &[u64],
    member: &[bool],
    n: usize,
    field: Field,
) -> Option<Vec<usize>> {
    let full = (1usize << n) - 1;
    let inside = |m: usize| subset_sums[m] <= j && member[(j - subset_sums[m]) as usize];
    if !member[j as usize] || inside(full) {
        return None;
    }
    let faces: Vec<u32> = (0..=full).filter(|&m| inside(m)).map(|m| m as u32).collect();
    let h = reduced_homology(n, &faces, field);
    h.iter().any(|&d| d > 0).then_some(h)
}

fn subset_sums(gens: &[u64]) -> Vec<u64> {
    let n = gens.len();
    let mut s = vec![0u64; 1 << n];
    for m in 1usize..1 << n {
        let low = m.trailing_zeros() as usize;
        s[m] = s[m & (m - 1)] + gens[low];
    }
    s
}

/// Graded Betti table of `k[C]` over `field` from divisor-complex homology,
/// scanning every degree below `bound` (default [`betti_degree_bound`]).
pub fn graded_betti_oracle(
    c: &SemigroupGens,
    field: Field,
    bound: Option<u64>,
) -> Result<BettiTable> {
    let n = c.len();
    if n > MAX_ORACLE_GENS {
        return Err(Error::resource(
            "building divisor complexes",
            n as u128,
            MAX_ORACLE_GENS as u128,
        ));
    }
    let bound = match bound {
        Some(b) => b,
        None => betti_degree_bound(c)?,
    };
    let table = c.membership_table(bound)?;
    let member = table.as_slice();
    let sums = subset_sums(c.gens());
    let total = *sums.last().expect("non-empty");

    // Only degrees whose complex can miss the top face need work.
    let candidates: Vec<u64> = (0..bound)
        .filter(|&j| member[j as usize] && (j < total || !member[(j - total) as usize]))
        .collect();
    let found: Vec<(u64, Vec<usize>)> = candidates
        .par_iter()
        .filter_map(|&j| divisor_contributions(j, &sums, member, n, field).map(|h| (j, h)))
        .collect();

    let mut t = BettiTable::new();
    for (j, h) in found {
        for (i, &d) in h.iter().enumerate() {
            t.add(i, j, d as u64);
        }
    }
    if t.pd() + 1 > n.max(1) {
        return Err(Error::invariant(format!(
            "oracle table of {c} has projective dimension {} > n - 1",
            t.pd()
        )));
    }
    Ok(t)
}

/// Factorizations of `j` (exponent vectors `e` with `Σ e_i c_i = j`) and
/// the connected components of the graph joining factorizations that share
/// a generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberGraph {
    pub degree: u64,
    /// Lexicographically sorted.
    pub nodes: Vec<Vec<u64>>,
    /// Component label per node; labels are numbered in order of first
    /// appearance, so node 0 is in component 0.
    pub component: Vec<usize>,
    pub components: usize,
}

impl FiberGraph {
    /// Smallest node of each component, in component order.
    pub fn representatives(&self) -> Vec<&Vec<u64>> {
        let mut reps: Vec<Option<&Vec<u64>>> = vec![None; self.components];
        for (node, &comp) in self.nodes.iter().zip(&self.component) {
            if reps[comp].is_none() {
                reps[comp] = Some(node);
            }
        }
        reps.into_iter().map(|r| r.expect("every component has a node")).collect()
    }

    pub fn nodes_of(&self, comp: usize) -> impl Iterator<Item = &Vec<u64>> {
        self.nodes
            .iter()
            .zip(&self.component)
            .filter(move |(_, &c)| c == comp)
            .map(|(n, _)| n)
    }
}

/// All factorizations of `target` over `gens`, lexicographically sorted.
pub fn factorizations(gens: &[u64], target: u64, cap: usize) -> Result<Vec<Vec<u64>>> {
    let n = gens.len();
    let suffix: Vec<MembershipTable> = (0..=n)
        .map(|i| MembershipTable::new(&gens[i..], target))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut cur = vec![0u64; n];
    fn go(
        i: usize,
        rem: u64,
        gens: &[u64],
        suffix: &[MembershipTable],
        cur: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
        cap: usize,
    ) -> Result<()> {
        if i == gens.len() {
            if rem == 0 {
                if out.len() >= cap {
                    return Err(Error::resource(
                        "enumerating factorizations",
                        out.len() as u128 + 1,
                        cap as u128,
                    ));
                }
                out.push(cur.clone());
            }
            return Ok(());
        }
        for e in 0..=rem / gens[i] {
            let r = rem - e * gens[i];
            if suffix[i + 1].get(r) == Some(true) {
                cur[i] = e;
                go(i + 1, r, gens, suffix, cur, out, cap)?;
            }
        }
        cur[i] = 0;
        Ok(())
    }
    go(0, target, gens, &suffix, &mut cur, &mut out, cap)?;
    Ok(out)
}

/// Builds the fiber graph of `C` at degree `j`.
pub fn fiber_graph(c: &SemigroupGens, j: u64) -> Result<FiberGraph> {
    let nodes = factorizations(c.gens(), j, MAX_FIBER_NODES)?;
    Ok(components_by_shared_support(j, nodes))
}

pub(crate) fn components_by_shared_support(degree: u64, nodes: Vec<Vec<u64>>) -> FiberGraph {
    let count = nodes.len();
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    // Nodes sharing generator i are all joined to the first node using i.
    let vars = nodes.first().map_or(0, Vec::len);
    for i in 0..vars {
        let mut first: Option<usize> = None;
        for (k, node) in nodes.iter().enumerate() {
            if node[i] > 0 {
                match first {
                    None => first = Some(k),
                    Some(f) => {
                        let (a, b) = (find(&mut parent, f), find(&mut parent, k));
                        if a != b {
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                }
            }
        }
    }
    let mut label = vec![usize::MAX; count];
    let mut component = vec![0; count];
    let mut next = 0;
    for k in 0..count {
        let r = find(&mut parent, k);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        component[k] = label[r];
    }
    FiberGraph {
        degree,
        nodes,
        component,
        components: next,
    }
}

/// Minimal binomial generators of `I_C` in degrees `≤ bound`: at each degree
/// with a disconnected fiber, the smallest node of every other component is
/// joined to the smallest node of the first component.
pub fn minimal_generators_of_ideal(c: &SemigroupGens, bound: u64) -> Result<Vec<Binomial>> {
    let table = c.membership_table(bound)?;
    let degrees: Vec<u64> = (1..=bound).filter(|&j| table.get(j) == Some(true)).collect();
    let per_degree: Vec<Result<Vec<Binomial>>> = degrees
        .par_iter()
        .map(|&j| {
            let g = fiber_graph(c, j)?;
            Ok(binomials_from_fiber(&g))
        })
        .collect();
    let mut out = Vec::new();
    for r in per_degree {
        out.extend(r?);
    }
    Ok(out)
}

pub(crate) fn binomials_from_fiber(g: &FiberGraph) -> Vec<Binomial> {
    if g.components < 2 {
        return Vec::new();
    }
    let reps = g.representatives();
    reps[1..]
        .iter()
        .map(|r| Binomial {
            left: reps[0].clone(),
            right: (*r).clone(),
            degree: g.degree,
        })
        .collect()
}

/// Degrees carrying minimal generators of `I_C`, read off the oracle table.
pub fn generator_degree_bound(table: &BettiTable) -> u64 {
    table.degrees_at(1).last().copied().unwrap_or(0)
}

/// Indicator of `⟨C⟩` on `0..=n`.
pub fn hilbert_function_oracle(c: &SemigroupGens, n: u64) -> Result<Vec<u8>> {
    let t = c.membership_table(n)?;
    Ok(t.as_slice().iter().map(|&b| b as u8).collect())
}
