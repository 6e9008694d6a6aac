//! Explicit graded free complexes over weighted polynomial rings: base
//! resolutions, tensor products, mapping cones over multiplication by a
//! binomial, DG-algebra products, verification and export.
//!
//! Conventions shared by every constructor:
//! - `F_0` has rank one in degree 0 (a resolution of a cyclic module);
//! - the tensor differential is `d(a⊗b) = da⊗b + (-1)^{|a|} a⊗db`;
//! - the cone over `ρ·` has `M_k = G_k ⊕ G_{k-1}(-deg ρ)` and
//!   `d(a, b) = (da + (-1)^{k-1} ρb, db)`;
//! - tensor bases are ordered by blocks `(i, k-i)`, `i` ascending, and
//!   row-major inside a block.

mod build;
mod dg;
mod export;
mod ops;
mod poly;
mod verify;

use std::collections::BTreeMap;

pub use build::{
    bresinsky_exponents, bresinsky_resolution, build_resolution, build_resolution_with,
    herzog_binomials, herzog_resolution, koszul_complex, BresinskyExponents, BuildOptions,
};
pub use dg::{
    check_associativity, check_graded_commutativity, check_leibniz, dg_by_lifting, dg_cone,
    dg_tensor_product, DgTable, DgViolation, Sample,
};
pub use export::{from_text, to_macaulay2, to_text};
pub use ops::{mapping_cone_mul, tensor_complex};
pub use poly::{Poly, PolyMatrix, WeightedRing};
pub use verify::{
    verify_complex, verify_exactness_probabilistic, verify_exactness_with_seed, ComplexReport,
    ExactnessReport, ExactnessStatus, Violation,
};

use crate::betti::BettiTable;
use crate::error::{Error, Result};

/// `0 → F_L → … → F_1 → F_0` with `d_i : F_i → F_{i-1}` stored as a
/// `rank F_{i-1} × rank F_i` matrix, acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeComplex {
    ring: WeightedRing,
    shifts: Vec<Vec<u64>>,
    diffs: Vec<PolyMatrix>,
    dg: Option<DgTable>,
}

impl FreeComplex {
    /// Checks shapes only; the algebraic invariants are `verify_complex`'s job.
    pub fn new(ring: WeightedRing, shifts: Vec<Vec<u64>>, diffs: Vec<PolyMatrix>) -> Result<Self> {
        if shifts.len() != diffs.len() + 1 {
            return Err(Error::arg(format!(
                "{} modules but {} differentials",
                shifts.len(),
                diffs.len()
            )));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.rows() != shifts[i].len() || d.cols() != shifts[i + 1].len() {
                return Err(Error::arg(format!(
                    "d{} is {}x{} between modules of ranks {} and {}",
                    i + 1,
                    d.rows(),
                    d.cols(),
                    shifts[i].len(),
                    shifts[i + 1].len()
                )));
            }
            let n = ring.nvars();
            if d.iter().any(|(_, p)| p.terms().any(|(e, _)| e.len() != n)) {
                return Err(Error::arg(format!("d{} has entries outside the ring", i + 1)));
            }
        }
        Ok(FreeComplex {
            ring,
            shifts,
            diffs,
            dg: None,
        })
    }

    /// Attaches a product table; ranks and ring size must agree.
    pub fn with_dg(mut self, table: DgTable) -> Result<Self> {
        if table.ranks() != self.ranks().as_slice() || table.nvars() != self.ring.nvars() {
            return Err(Error::arg("DG table does not fit the complex"));
        }
        self.dg = Some(table);
        Ok(self)
    }

    pub fn without_dg(mut self) -> Self {
        self.dg = None;
        self
    }

    pub fn ring(&self) -> &WeightedRing {
        &self.ring
    }

    pub fn shifts(&self) -> &[Vec<u64>] {
        &self.shifts
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.shifts.iter().map(Vec::len).collect()
    }

    /// Index of the last module.
    pub fn length(&self) -> usize {
        self.diffs.len()
    }

    /// `d_i` for `1 ≤ i ≤ length`.
    pub fn d(&self, i: usize) -> &PolyMatrix {
        &self.diffs[i - 1]
    }

    pub fn differentials(&self) -> &[PolyMatrix] {
        &self.diffs
    }

    pub fn dg(&self) -> Option<&DgTable> {
        self.dg.as_ref()
    }

    /// Graded Betti table read off the shifts.
    pub fn betti_table(&self) -> BettiTable {
        let mut t = BettiTable::new();
        for (i, s) in self.shifts.iter().enumerate() {
            for &j in s {
                t.add(i, j, 1);
            }
        }
        t
    }

    /// `Σ_i (-1)^i Σ_{s ∈ F_i} t^s`.
    pub fn shift_numerator(&self) -> BTreeMap<u64, i64> {
        let mut out = BTreeMap::new();
        for (i, s) in self.shifts.iter().enumerate() {
            for &j in s {
                *out.entry(j).or_insert(0) += if i % 2 == 0 { 1 } else { -1 };
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    /// Weights and shifts multiplied by `k`; polynomials are unchanged.
    pub fn scaled(&self, k: u64) -> Result<Self> {
        let shifts = self
            .shifts
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&j| j.checked_mul(k).ok_or(Error::Overflow("scaling shifts")))
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(FreeComplex {
            ring: self.ring.scaled(k)?,
            shifts,
            diffs: self.diffs.clone(),
            dg: self.dg.clone(),
        })
    }

    /// New variable `i` is old variable `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.ring.nvars() {
            return Err(Error::arg("permutation length differs from the ring"));
        }
        // Poly::permuted wants, for each new slot, the old slot it reads.
        let diffs = self
            .diffs
            .iter()
            .map(|d| d.map(|p| Ok(p.permuted(perm))))
            .collect::<Result<_>>()?;
        Ok(FreeComplex {
            ring: self.ring.permuted(perm),
            shifts: self.shifts.clone(),
            diffs,
            dg: self.dg.as_ref().map(|t| t.map_polys(|p| p.permuted(perm))),
        })
    }

    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        Ok(FreeComplex {
            ring: self.ring.renamed(names)?,
            ..self.clone()
        })
    }

    /// `d` applied to an element of `F_k`; elements of `F_0` map to zero.
    pub fn apply_d(&self, x: &Elem) -> Result<Elem> {
        let mut out = Elem::zero(x.deg.saturating_sub(1));
        if x.deg == 0 || x.deg > self.length() {
            return Ok(out);
        }
        let cols = self.d(x.deg).columns();
        for (&c, coeff) in &x.coeffs {
            for &(r, entry) in &cols[c] {
                out.add_term(r, &coeff.mul(entry)?)?;
            }
        }
        Ok(out)
    }
}

/// An element `Σ p_a e_a` of the free module `F_deg`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Elem {
    pub deg: usize,
    pub coeffs: BTreeMap<usize, Poly>,
}

impl Elem {
    pub fn zero(deg: usize) -> Self {
        Elem {
            deg,
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis element `e_a` of `F_deg` in a ring of `nvars` variables.
    pub fn basis(deg: usize, a: usize, nvars: usize) -> Self {
        let mut e = Elem::zero(deg);
        e.coeffs.insert(a, Poly::constant(1, nvars));
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, a: usize, p: &Poly) -> Result<()> {
        let cur = self.coeffs.remove(&a).unwrap_or_default().add(p)?;
        if !cur.is_zero() {
            self.coeffs.insert(a, cur);
        }
        Ok(())
    }

    /// Sum of two elements; a zero summand adopts the other's degree.
    pub fn add(&self, other: &Elem) -> Result<Elem> {
        if !self.is_zero() && !other.is_zero() && self.deg != other.deg {
            return Err(Error::invariant(format!(
                "adding elements of degrees {} and {}",
                self.deg, other.deg
            )));
        }
        let mut out = if self.is_zero() { other.clone() } else { self.clone() };
        let src = if self.is_zero() { None } else { Some(other) };
        if let Some(src) = src {
            for (&a, p) in &src.coeffs {
                out.add_term(a, p)?;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Elem) -> Result<Elem> {
        self.add(&other.scale(-1)?)
    }

    pub fn scale(&self, k: i64) -> Result<Elem> {
        Ok(Elem {
            deg: self.deg,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&a, p)| Ok((a, p.scale(k)?)))
                .collect::<Result<_>>()?,
        })
    }

    /// `(-1)^k · self`.
    pub fn signed(&self, k: usize) -> Result<Elem> {
        if k.is_multiple_of(2) {
            Ok(self.clone())
        } else {
            self.scale(-1)
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> Result<Elem> {
        let mut out = Elem::zero(self.deg);
        for (&a, q) in &self.coeffs {
            out.add_term(a, &q.mul(p)?)?;
        }
        Ok(out)
    }
}
