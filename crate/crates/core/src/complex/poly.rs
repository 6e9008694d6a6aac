//! Sparse integer polynomials over weighted variables, and matrices of them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::pow_mod;

/// Polynomial ring `k[v_1..v_m]` with a positive weight per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightedRing {
    names: Vec<String>,
    weights: Vec<u64>,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl WeightedRing {
    pub fn new(names: Vec<String>, weights: Vec<u64>) -> Result<Self> {
        if names.len() != weights.len() {
            return Err(Error::arg(format!(
                "{} variable names but {} weights",
                names.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().position(|&w| w == 0) {
            return Err(Error::arg(format!("variable {} has weight 0", names[w])));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !valid_name(n) {
                return Err(Error::arg(format!("invalid variable name {n:?}")));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::arg(format!("duplicate variable name {n}")));
            }
        }
        Ok(WeightedRing { names, weights })
    }

    /// Variables `prefix1, prefix2, ...` with the given weights.
    pub fn with_prefix(prefix: &str, weights: &[u64]) -> Result<Self> {
        Self::new(crate::gluing::var_names(prefix, weights.len()), weights.to_vec())
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// Same variables, weights multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Result<Self> {
        let weights = self
            .weights
            .iter()
            .map(|&w| w.checked_mul(k).ok_or(Error::Overflow("scaling ring weights")))
            .collect::<Result<_>>()?;
        Ok(WeightedRing {
            names: self.names.clone(),
            weights,
        })
    }

    /// Variables of `self` followed by those of `other`; names must be disjoint.
    pub fn concat(&self, other: &WeightedRing) -> Result<Self> {
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        let mut weights = self.weights.clone();
        weights.extend(&other.weights);
        Self::new(names, weights).map_err(|e| match e {
            Error::Argument(m) => Error::arg(format!("rings share variables: {m}")),
            e => e,
        })
    }

    /// New variable `i` is old variable `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        WeightedRing {
            names: perm.iter().map(|&p| self.names[p].clone()).collect(),
            weights: perm.iter().map(|&p| self.weights[p]).collect(),
        }
    }

    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        Self::new(names, self.weights.clone())
    }
}

/// Sparse polynomial with integer coefficients. Exponent vectors all have
/// the ring's length; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Vec<u32>, i64>,
}

const COEFF: &str = "polynomial coefficient";

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64, nvars: usize) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(exps: Vec<u32>, c: i64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(exps, c);
        }
        Poly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Vec<u32>, i64)>) -> Result<Self> {
        let mut p = Poly::zero();
        for (e, c) in terms {
            p.add_term(e, c)?;
        }
        Ok(p)
    }

    /// `x^left - x^right`.
    pub fn binomial(left: &[u64], right: &[u64]) -> Result<Self> {
        let conv = |v: &[u64]| -> Result<Vec<u32>> {
            v.iter()
                .map(|&e| u32::try_from(e).map_err(|_| Error::Overflow("binomial exponent")))
                .collect()
        };
        Poly::from_terms([(conv(left)?, 1), (conv(right)?, -1)])
    }

    fn add_term(&mut self, e: Vec<u32>, c: i64) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        let slot = self.terms.entry(e).or_insert(0);
        *slot = slot.checked_add(c).ok_or(Error::Overflow(COEFF))?;
        if *slot == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, i64)> + '_ {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.add(&other.neg()?)
    }

    pub fn neg(&self) -> Result<Poly> {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Result<Poly> {
        if k == 0 {
            return Ok(Poly::zero());
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| Ok((e.clone(), c.checked_mul(k).ok_or(Error::Overflow(COEFF))?)))
            .collect::<Result<_>>()?;
        Ok(Poly { terms })
    }

    /// `(-1)^k · self`.
    pub fn signed(&self, k: usize) -> Result<Poly> {
        if k.is_multiple_of(2) {
            Ok(self.clone())
        } else {
            self.neg()
        }
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        let mut out = Poly::zero();
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let e = ea
                    .iter()
                    .zip(eb)
                    .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow("exponent")))
                    .collect::<Result<Vec<u32>>>()?;
                out.add_term(e, ca.checked_mul(cb).ok_or(Error::Overflow(COEFF))?)?;
            }
        }
        Ok(out)
    }

    /// Distinct weighted degrees of the terms, ascending.
    pub fn degrees(&self, weights: &[u64]) -> Vec<u64> {
        let set: BTreeSet<u64> = self
            .terms
            .keys()
            .map(|e| e.iter().zip(weights).map(|(&x, &w)| x as u64 * w).sum())
            .collect();
        set.into_iter().collect()
    }

    /// The weighted degree if the polynomial is non-zero and homogeneous.
    pub fn homogeneous_degree(&self, weights: &[u64]) -> Option<u64> {
        match self.degrees(weights).as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> i64 {
        self.terms
            .iter()
            .find(|(e, _)| e.iter().all(|&x| x == 0))
            .map(|(_, &c)| c)
            .unwrap_or(0)
    }

    /// Re-embeds into a ring of `total` variables starting at `offset`.
    pub fn embed(&self, offset: usize, total: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut v = vec![0; total];
                v[offset..offset + e.len()].copy_from_slice(e);
                (v, c)
            })
            .collect();
        Poly { terms }
    }

    /// New variable `i` is old variable `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| (perm.iter().map(|&p| e[p]).collect(), c))
            .collect();
        Poly { terms }
    }

    pub fn eval_mod(&self, point: &[u64], p: u64) -> u64 {
        let mut acc = 0u64;
        for (e, c) in self.terms() {
            let mut t = c.rem_euclid(p as i64) as u64;
            for (&x, &v) in e.iter().zip(point) {
                if x > 0 {
                    t = t * pow_mod(v, x as u64, p) % p;
                }
            }
            acc = (acc + t) % p;
        }
        acc
    }

    /// Human-readable form, largest monomial first: `x1^5 - x2^3`.
    pub fn render(&self, names: &[String]) -> String {
        self.render_with(names, false)
    }

    /// Canonical form with every coefficient and exponent written out:
    /// `1*x1^5 - 1*x2^3`; the constant monomial is `c*1`.
    pub fn render_explicit(&self, names: &[String]) -> String {
        self.render_with(names, true)
    }

    fn render_with(&self, names: &[String], explicit: bool) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            match (k, *c < 0) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let a = c.unsigned_abs();
            let factors: Vec<String> = e
                .iter()
                .zip(names)
                .filter(|(&x, _)| x > 0)
                .map(|(&x, n)| {
                    if x == 1 && !explicit {
                        n.clone()
                    } else {
                        format!("{n}^{x}")
                    }
                })
                .collect();
            if explicit {
                let mono = if factors.is_empty() { "1".into() } else { factors.join("*") };
                let _ = write!(out, "{a}*{mono}");
            } else if factors.is_empty() {
                let _ = write!(out, "{a}");
            } else if a == 1 {
                out.push_str(&factors.join("*"));
            } else {
                let _ = write!(out, "{a}*{}", factors.join("*"));
            }
        }
        out
    }

    /// Parses sums of terms `c*v^e*...`, accepting both rendered forms.
    pub fn parse(s: &str, names: &[String]) -> Result<Poly> {
        let index: BTreeMap<&str, usize> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::arg("empty polynomial"));
        }
        if compact == "0" {
            return Ok(Poly::zero());
        }
        // Split into signed terms.
        let mut terms: Vec<(i64, &str)> = Vec::new();
        let bytes = compact.as_bytes();
        let mut start = 0;
        let mut sign = 1;
        if bytes[0] == b'-' || bytes[0] == b'+' {
            sign = if bytes[0] == b'-' { -1 } else { 1 };
            start = 1;
        }
        for i in start..=bytes.len() {
            if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && i > start) {
                terms.push((sign, &compact[start..i]));
                if i < bytes.len() {
                    sign = if bytes[i] == b'-' { -1 } else { 1 };
                    start = i + 1;
                }
            }
        }
        let mut p = Poly::zero();
        for (sign, t) in terms {
            let mut coeff: i64 = sign;
            let mut e = vec![0u32; names.len()];
            for f in t.split('*') {
                if f.is_empty() {
                    return Err(Error::arg(format!("malformed term {t:?}")));
                }
                if f.as_bytes()[0].is_ascii_digit() {
                    let c: i64 = f
                        .parse()
                        .map_err(|_| Error::arg(format!("bad coefficient {f:?}")))?;
                    coeff = coeff.checked_mul(c).ok_or(Error::Overflow(COEFF))?;
                    continue;
                }
                let (name, exp) = match f.split_once('^') {
                    Some((n, x)) => (
                        n,
                        x.parse::<u32>()
                            .map_err(|_| Error::arg(format!("bad exponent in {f:?}")))?,
                    ),
                    None => (f, 1),
                };
                let &v = index
                    .get(name)
                    .ok_or_else(|| Error::arg(format!("unknown variable {name:?}")))?;
                e[v] = e[v].checked_add(exp).ok_or(Error::Overflow("exponent"))?;
            }
            p.add_term(e, coeff)?;
        }
        Ok(p)
    }
}

/// Sparse `rows × cols` matrix of polynomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Poly>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    /// Builds from dense rows.
    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = PolyMatrix::new(rows.len(), cols);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::arg("ragged matrix rows"));
            }
            for (c, p) in row.into_iter().enumerate() {
                m.set(r, c, p);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, p: Poly) {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        if p.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), p);
        }
    }

    /// Adds `p` to entry `(r, c)`.
    pub fn add_to(&mut self, r: usize, c: usize, p: &Poly) -> Result<()> {
        let cur = self.entries.get(&(r, c)).cloned().unwrap_or_default();
        self.set(r, c, cur.add(p)?);
        Ok(())
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&Poly> {
        self.entries.get(&(r, c))
    }

    pub fn entry(&self, r: usize, c: usize) -> Poly {
        self.get(r, c).cloned().unwrap_or_default()
    }

    /// Non-zero entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &Poly)> + '_ {
        self.entries.iter().map(|(&k, p)| (k, p))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Non-zero entries grouped by column.
    pub fn columns(&self) -> Vec<Vec<(usize, &Poly)>> {
        let mut out = vec![Vec::new(); self.cols];
        for (&(r, c), p) in &self.entries {
            out[c].push((r, p));
        }
        out
    }

    pub fn transpose(&self) -> PolyMatrix {
        PolyMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|(&(r, c), p)| ((c, r), p.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows {
            return Err(Error::arg(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut by_row: Vec<Vec<(usize, &Poly)>> = vec![Vec::new(); other.rows];
        for (&(r, c), p) in &other.entries {
            by_row[r].push((c, p));
        }
        let mut out = PolyMatrix::new(self.rows, other.cols);
        for (&(r, k), a) in &self.entries {
            for &(c, b) in &by_row[k] {
                out.add_to(r, c, &a.mul(b)?)?;
            }
        }
        Ok(out)
    }

    /// Applies `f` to every non-zero entry.
    pub fn map(&self, mut f: impl FnMut(&Poly) -> Result<Poly>) -> Result<PolyMatrix> {
        let mut out = PolyMatrix::new(self.rows, self.cols);
        for (&(r, c), p) in &self.entries {
            out.set(r, c, f(p)?);
        }
        Ok(out)
    }

    /// Evaluation at a point modulo `p`, as dense rows.
    pub fn eval_mod(&self, point: &[u64], p: u64) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; self.cols]; self.rows];
        for (&(r, c), poly) in &self.entries {
            m[r][c] = poly.eval_mod(point, p);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        crate::gluing::var_names("x", n)
    }

    #[test]
    fn arithmetic_and_rendering() {
        let f = Poly::binomial(&[5, 0], &[0, 3]).unwrap();
        assert_eq!(f.render(&names(2)), "x1^5 - x2^3");
        assert_eq!(f.render_explicit(&names(2)), "1*x1^5 - 1*x2^3");
        let sq = f.mul(&f).unwrap();
        assert_eq!(sq.render(&names(2)), "x1^10 - 2*x1^5*x2^3 + x2^6");
        assert!(f.sub(&f).unwrap().is_zero());
        assert_eq!(f.homogeneous_degree(&[3, 5]), Some(15));
        assert_eq!(f.homogeneous_degree(&[1, 1]), None);
        assert_eq!(Poly::constant(-3, 2).render(&names(2)), "-3");
    }

    #[test]
    fn parse_round_trips() {
        let n = names(3);
        for s in ["x1^5 - x2^3", "-2*x1*x3 + 7", "0", "x2"] {
            let p = Poly::parse(s, &n).unwrap();
            assert_eq!(p.render(&n), s);
            assert_eq!(Poly::parse(&p.render_explicit(&n), &n).unwrap(), p);
        }
        assert!(Poly::parse("x4", &n).is_err());
        assert!(Poly::parse("x1**2", &n).is_err());
    }

    #[test]
    fn ring_checks() {
        assert!(WeightedRing::with_prefix("x", &[3, 0]).is_err());
        let a = WeightedRing::with_prefix("x", &[3, 5]).unwrap();
        assert!(a.concat(&a).is_err());
        let b = WeightedRing::with_prefix("y", &[4]).unwrap();
        assert_eq!(a.concat(&b).unwrap().nvars(), 3);
    }

    #[test]
    fn matrix_product() {
        let x = |i: usize| {
            let mut e = vec![0; 2];
            e[i] = 1;
            Poly::monomial(e, 1)
        };
        let row = PolyMatrix::from_rows(vec![vec![x(0), x(1)]]).unwrap();
        let col = PolyMatrix::from_rows(vec![vec![x(1)], vec![x(0).neg().unwrap()]]).unwrap();
        assert!(row.mul(&col).unwrap().is_zero());
        assert_eq!(col.transpose().rows(), 1);
    }
}
