//! Graded Betti tables and Hilbert series numerators.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{checked_mul, Error, Result};

/// Graded Betti numbers `β_{i,j}`: homological index `i`, weighted degree
/// `j`. Only non-zero entries are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BettiTable {
    entries: BTreeMap<(usize, u64), u64>,
}

impl BettiTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table of the polynomial ring in one variable: `{(0,0): 1}`.
    pub fn unit() -> Self {
        let mut t = Self::new();
        t.add(0, 0, 1);
        t
    }

    /// Table of a hypersurface of degree `d`.
    pub fn hypersurface(d: u64) -> Self {
        let mut t = Self::unit();
        t.add(1, d, 1);
        t
    }

    pub fn from_entries(entries: impl IntoIterator<Item = ((usize, u64), u64)>) -> Self {
        let mut t = Self::new();
        for ((i, j), m) in entries {
            t.add(i, j, m);
        }
        t
    }

    pub fn add(&mut self, i: usize, j: u64, m: u64) {
        if m > 0 {
            *self.entries.entry((i, j)).or_insert(0) += m;
        }
    }

    pub fn get(&self, i: usize, j: u64) -> u64 {
        self.entries.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, u64), u64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Projective dimension: the largest homological index present.
    pub fn pd(&self) -> usize {
        self.entries.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    /// Total Betti numbers `β_0..β_pd`.
    pub fn totals(&self) -> Vec<u64> {
        if self.entries.is_empty() {
            return Vec::new();
        }
        let mut t = vec![0; self.pd() + 1];
        for (&(i, _), &m) in &self.entries {
            t[i] += m;
        }
        t
    }

    /// Degrees `j` with `β_{i,j} ≠ 0`.
    pub fn degrees_at(&self, i: usize) -> Vec<u64> {
        self.entries
            .keys()
            .filter(|&&(k, _)| k == i)
            .map(|&(_, j)| j)
            .collect()
    }

    /// Largest degree at the last step.
    pub fn last_degree(&self) -> u64 {
        *self.degrees_at(self.pd()).last().unwrap_or(&0)
    }

    /// `max{ j - i : β_{i,j} ≠ 0 }`.
    pub fn regularity(&self) -> i64 {
        self.entries
            .keys()
            .map(|&(i, j)| j as i64 - i as i64)
            .max()
            .unwrap_or(0)
    }

    /// Every degree multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Result<BettiTable> {
        let mut t = BettiTable::new();
        for ((i, j), m) in self.entries() {
            t.add(i, checked_mul(j, k, "scaling Betti degrees")?, m);
        }
        Ok(t)
    }

    /// Checks `β_0 = 1` concentrated in degree 0.
    pub fn check_cyclic(&self) -> Result<()> {
        let zero: Vec<_> = self.entries.iter().filter(|(&(i, _), _)| i == 0).collect();
        if zero.len() != 1 || *zero[0].0 != (0, 0) || *zero[0].1 != 1 {
            return Err(Error::arg(format!(
                "Betti table does not start with β_00 = 1: {zero:?}"
            )));
        }
        Ok(())
    }

    /// `Σ_i (-1)^i β_{i,j} t^j`.
    pub fn hilbert_numerator(&self, denominator: &[u64]) -> HilbertNumerator {
        let mut num = BTreeMap::new();
        for ((i, j), m) in self.entries() {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            *num.entry(j).or_insert(0i64) += sign * m as i64;
        }
        HilbertNumerator::new(num, denominator.to_vec())
    }
}

impl fmt::Display for BettiTable {
    /// One line per homological step: `i: total  [j^m, ...]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let totals = self.totals();
        for (i, total) in totals.iter().enumerate() {
            write!(f, "{i}: {total}  [")?;
            let mut first = true;
            for ((k, j), m) in self.entries() {
                if k != i {
                    continue;
                }
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                if m == 1 {
                    write!(f, "{j}")?;
                } else {
                    write!(f, "{j}^{m}")?;
                }
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// `N(t) / ∏ (1 - t^{c_i})` with a sparse integer numerator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertNumerator {
    numerator: BTreeMap<u64, i64>,
    denominator: Vec<u64>,
}

impl HilbertNumerator {
    pub fn new(numerator: BTreeMap<u64, i64>, denominator: Vec<u64>) -> Self {
        let numerator = numerator.into_iter().filter(|&(_, c)| c != 0).collect();
        HilbertNumerator {
            numerator,
            denominator,
        }
    }

    pub fn numerator(&self) -> &BTreeMap<u64, i64> {
        &self.numerator
    }

    pub fn denominator(&self) -> &[u64] {
        &self.denominator
    }

    /// Value of the numerator at `t = 1`.
    pub fn numerator_at_one(&self) -> i64 {
        self.numerator.values().sum()
    }

    /// Numerator polynomial as `t ↦ t^k`.
    pub fn numerator_substituted(&self, k: u64) -> Result<BTreeMap<u64, i64>> {
        self.numerator
            .iter()
            .map(|(&e, &c)| Ok((checked_mul(e, k, "substituting t^k")?, c)))
            .collect()
    }

    /// First `n + 1` coefficients of the series.
    pub fn expand(&self, n: u64) -> Vec<i64> {
        let len = n as usize + 1;
        let mut s = vec![0i128; len];
        for (&e, &c) in self.numerator.range(..=n) {
            s[e as usize] += c as i128;
        }
        for &c in &self.denominator {
            let c = c as usize;
            for d in c..len {
                s[d] += s[d - c];
            }
        }
        s.into_iter()
            .map(|v| i64::try_from(v).expect("Hilbert coefficient overflow"))
            .collect()
    }

    /// Renders the numerator as `1 - t^15 + ...`.
    pub fn render_numerator(&self) -> String {
        let mut out = String::new();
        for (k, (&e, &c)) in self.numerator.iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if k == 0 {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            let a = c.unsigned_abs();
            match (e, a) {
                (0, _) => out.push_str(&a.to_string()),
                (_, 1) => out.push_str(&format!("t^{e}")),
                _ => out.push_str(&format!("{a}*t^{e}")),
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Product of sparse integer polynomials.
pub fn poly_mul(a: &BTreeMap<u64, i64>, b: &BTreeMap<u64, i64>) -> Result<BTreeMap<u64, i64>> {
    let mut out: BTreeMap<u64, i64> = BTreeMap::new();
    for (&ea, &ca) in a {
        for (&eb, &cb) in b {
            let e = ea.checked_add(eb).ok_or(Error::Overflow("Hilbert numerator degree"))?;
            let c = ca.checked_mul(cb).ok_or(Error::Overflow("Hilbert numerator coefficient"))?;
            let slot = out.entry(e).or_insert(0);
            *slot = slot
                .checked_add(c)
                .ok_or(Error::Overflow("Hilbert numerator coefficient"))?;
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}
