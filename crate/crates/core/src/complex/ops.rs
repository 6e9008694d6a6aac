//! Tensor products and mapping cones of free complexes.

use super::dg::{dg_cone, dg_tensor_product};
use super::{FreeComplex, Poly, PolyMatrix};
use crate::error::{Error, Result};

/// Basis indexing of `(F_A ⊗ F_B)_k = ⊕_i (F_A)_i ⊗ (F_B)_{k-i}`.
#[derive(Clone, Debug)]
pub(crate) struct TensorIndex {
    ra: Vec<usize>,
    rb: Vec<usize>,
    /// `offsets[k]` lists `(i, start)` per non-empty block, `i` ascending.
    offsets: Vec<Vec<(usize, usize)>>,
    ranks: Vec<usize>,
}

impl TensorIndex {
    pub(crate) fn new(ra: &[usize], rb: &[usize]) -> Self {
        let len = (ra.len() - 1) + (rb.len() - 1);
        let mut offsets = Vec::with_capacity(len + 1);
        let mut ranks = Vec::with_capacity(len + 1);
        for k in 0..=len {
            let mut start = 0;
            let mut blocks = Vec::new();
            for i in 0..ra.len() {
                if k < i || k - i >= rb.len() {
                    continue;
                }
                blocks.push((i, start));
                start += ra[i] * rb[k - i];
            }
            offsets.push(blocks);
            ranks.push(start);
        }
        TensorIndex {
            ra: ra.to_vec(),
            rb: rb.to_vec(),
            offsets,
            ranks,
        }
    }

    pub(crate) fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Position of `e_a ⊗ f_b` with `e_a ∈ (F_A)_i`, `f_b ∈ (F_B)_j`.
    pub(crate) fn index(&self, i: usize, a: usize, j: usize, b: usize) -> usize {
        let start = self.offsets[i + j]
            .iter()
            .find(|&&(bi, _)| bi == i)
            .map(|&(_, s)| s)
            .expect("block exists");
        start + a * self.rb[j] + b
    }

    /// Inverse of `index` within `(F_A ⊗ F_B)_k`: `(i, a, j, b)`.
    pub(crate) fn split(&self, k: usize, idx: usize) -> (usize, usize, usize, usize) {
        let &(i, start) = self.offsets[k]
            .iter()
            .rev()
            .find(|&&(_, s)| s <= idx)
            .expect("index in range");
        let j = k - i;
        let off = idx - start;
        debug_assert!(off < self.ra[i] * self.rb[j]);
        (i, off / self.rb[j], j, off % self.rb[j])
    }
}

/// `F_A ⊗ F_B` over the concatenated ring (variables of `fa` first).
///
/// If both factors carry product tables the result carries their tensor
/// product table.
pub fn tensor_complex(fa: &FreeComplex, fb: &FreeComplex) -> Result<FreeComplex> {
    let ring = fa.ring().concat(fb.ring())?;
    let (na, n) = (fa.ring().nvars(), ring.nvars());
    let idx = TensorIndex::new(&fa.ranks(), &fb.ranks());
    let len = idx.ranks().len() - 1;

    let mut shifts = Vec::with_capacity(len + 1);
    for k in 0..=len {
        let mut s = vec![0; idx.ranks()[k]];
        for col in 0..s.len() {
            let (i, a, j, b) = idx.split(k, col);
            s[col] = fa.shifts()[i][a]
                .checked_add(fb.shifts()[j][b])
                .ok_or(Error::Overflow("tensor shifts"))?;
        }
        shifts.push(s);
    }

    let cols_a: Vec<Vec<Vec<(usize, Poly)>>> = embedded_columns(fa, 0, n);
    let cols_b: Vec<Vec<Vec<(usize, Poly)>>> = embedded_columns(fb, na, n);
    let mut diffs = Vec::with_capacity(len);
    for k in 1..=len {
        let mut d = PolyMatrix::new(idx.ranks()[k - 1], idx.ranks()[k]);
        for col in 0..idx.ranks()[k] {
            let (i, a, j, b) = idx.split(k, col);
            if i >= 1 {
                for (r, p) in &cols_a[i - 1][a] {
                    d.add_to(idx.index(i - 1, *r, j, b), col, p)?;
                }
            }
            if j >= 1 {
                for (r, p) in &cols_b[j - 1][b] {
                    d.add_to(idx.index(i, a, j - 1, *r), col, &p.signed(i)?)?;
                }
            }
        }
        diffs.push(d);
    }

    let out = FreeComplex::new(ring, shifts, diffs)?;
    match (fa.dg(), fb.dg()) {
        (Some(ta), Some(tb)) => {
            let t = dg_tensor_product(ta, tb)?;
            out.with_dg(t)
        }
        _ => Ok(out),
    }
}

/// Columns of each differential with entries re-embedded at `offset`.
fn embedded_columns(f: &FreeComplex, offset: usize, n: usize) -> Vec<Vec<Vec<(usize, Poly)>>> {
    f.differentials()
        .iter()
        .map(|d| {
            d.columns()
                .into_iter()
                .map(|col| col.into_iter().map(|(r, p)| (r, p.embed(offset, n))).collect())
                .collect()
        })
        .collect()
}

/// Mapping cone of multiplication by `rho` on `G`.
///
/// If `G` carries a product table the cone carries the induced one.
pub fn mapping_cone_mul(g: &FreeComplex, rho: &Poly) -> Result<FreeComplex> {
    let w = g.ring().weights();
    let deg = rho
        .homogeneous_degree(w)
        .ok_or_else(|| Error::arg("rho is zero or not homogeneous"))?;
    if rho.terms().any(|(e, _)| e.len() != w.len()) {
        return Err(Error::arg("rho lives in a different ring"));
    }
    let rg = g.ranks();
    let len = g.length() + 1;
    let rank = |k: usize| rg.get(k).copied().unwrap_or(0);

    let mut shifts = Vec::with_capacity(len + 1);
    for k in 0..=len {
        let mut s: Vec<u64> = g.shifts().get(k).cloned().unwrap_or_default();
        if k >= 1 {
            for &j in &g.shifts()[k - 1] {
                s.push(j.checked_add(deg).ok_or(Error::Overflow("cone shifts"))?);
            }
        }
        shifts.push(s);
    }

    let mut diffs = Vec::with_capacity(len);
    for k in 1..=len {
        let mut d = PolyMatrix::new(shifts[k - 1].len(), shifts[k].len());
        if k <= g.length() {
            for ((r, c), p) in g.d(k).iter() {
                d.set(r, c, p.clone());
            }
        }
        let sign_rho = rho.signed(k - 1)?;
        let lower = if k >= 2 { g.d(k - 1).columns() } else { Vec::new() };
        for b in 0..rank(k - 1) {
            let col = rank(k) + b;
            d.set(b, col, sign_rho.clone());
            for &(r, p) in lower.get(b).map(Vec::as_slice).unwrap_or(&[]) {
                d.set(rank(k - 1) + r, col, p.clone());
            }
        }
        diffs.push(d);
    }

    let out = FreeComplex::new(g.ring().clone(), shifts, diffs)?;
    match g.dg() {
        Some(t) => {
            let t = dg_cone(t)?;
            out.with_dg(t)
        }
        None => Ok(out),
    }
}
