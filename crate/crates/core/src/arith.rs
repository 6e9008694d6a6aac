//! Numerical semigroup arithmetic: membership, gaps, Frobenius number,
//! Apéry sets and pseudo-Frobenius elements.
//!
//! Every query bottoms out in a boolean membership table computed by dynamic
//! programming. Tables live in a cache shared by clones of a
//! [`SemigroupGens`]; readers take a shared lock and growth is serialized.

use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};

/// Hard cap on the length of a membership table.
pub const MAX_TABLE_LEN: usize = 1 << 28;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_all(values: &[u64]) -> u64 {
    values.iter().fold(0, |acc, &v| gcd(acc, v))
}

/// Membership in `⟨gens⟩` on `0..=bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipTable {
    gens: Vec<u64>,
    table: Vec<bool>,
}

impl MembershipTable {
    pub fn new(gens: &[u64], bound: u64) -> Result<Self> {
        let mut t = MembershipTable {
            gens: gens.to_vec(),
            table: vec![true],
        };
        t.grow_to(bound)?;
        Ok(t)
    }

    pub fn bound(&self) -> u64 {
        self.table.len() as u64 - 1
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.table
    }

    /// Extends the table so that it covers `0..=bound`.
    pub fn grow_to(&mut self, bound: u64) -> Result<()> {
        let len = bound
            .checked_add(1)
            .ok_or(Error::Overflow("membership table bound"))?;
        if len as u128 > MAX_TABLE_LEN as u128 {
            return Err(Error::resource(
                "growing a membership table",
                len as u128,
                MAX_TABLE_LEN as u128,
            ));
        }
        let len = len as usize;
        let start = self.table.len();
        if len <= start {
            return Ok(());
        }
        self.table.resize(len, false);
        for x in start..len {
            self.table[x] = self
                .gens
                .iter()
                .any(|&c| (c as usize) <= x && self.table[x - c as usize]);
        }
        Ok(())
    }

    /// `None` when `x` lies beyond the table.
    pub fn get(&self, x: u64) -> Option<bool> {
        self.table.get(usize::try_from(x).ok()?).copied()
    }
}

#[derive(Debug)]
struct Cache {
    /// Table of the reduced semigroup `⟨gens / gcd⟩`.
    table: RwLock<MembershipTable>,
    frobenius: OnceLock<Result<i64>>,
}

/// A finite generating set of a semigroup of non-negative integers.
///
/// The caller's order is preserved: variable `x_i` of the semigroup ring is
/// attached to `gens()[i]`, and split orientation follows it too.
#[derive(Clone)]
pub struct SemigroupGens {
    gens: Vec<u64>,
    gcd: u64,
    minimal: bool,
    cache: Arc<Cache>,
}

impl fmt::Debug for SemigroupGens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemigroupGens")
            .field("gens", &self.gens)
            .field("gcd", &self.gcd)
            .field("minimal", &self.minimal)
            .finish()
    }
}

impl PartialEq for SemigroupGens {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens
    }
}

impl Eq for SemigroupGens {}

impl fmt::Display for SemigroupGens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "⟩")
    }
}

impl SemigroupGens {
    /// Wraps a list of distinct positive integers, in the given order.
    pub fn new(gens: &[u64]) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::arg("empty generating set"));
        }
        if gens.contains(&0) {
            return Err(Error::arg("generators must be positive"));
        }
        let mut sorted = gens.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::arg(format!("duplicate generators in {gens:?}")));
        }
        let g = gcd_all(gens);
        let reduced: Vec<u64> = sorted.iter().map(|c| c / g).collect();
        let minimal = is_minimal_sorted(&reduced)?;
        let table = MembershipTable::new(&reduced, reduced[reduced.len() - 1].max(64))?;
        Ok(SemigroupGens {
            gens: gens.to_vec(),
            gcd: g,
            minimal,
            cache: Arc::new(Cache {
                table: RwLock::new(table),
                frobenius: OnceLock::new(),
            }),
        })
    }

    pub fn gens(&self) -> &[u64] {
        &self.gens
    }

    /// Embedding dimension when the set is minimal.
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gcd(&self) -> u64 {
        self.gcd
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    pub fn is_numerical(&self) -> bool {
        self.gcd == 1
    }

    pub fn sum(&self) -> Result<u64> {
        self.gens.iter().try_fold(0u64, |acc, &c| {
            acc.checked_add(c).ok_or(Error::Overflow("generator sum"))
        })
    }

    pub fn sorted_gens(&self) -> Vec<u64> {
        let mut s = self.gens.clone();
        s.sort_unstable();
        s
    }

    /// Membership of a signed integer; negative input is a caller error.
    pub fn contains(&self, x: i64) -> Result<bool> {
        if x < 0 {
            return Err(Error::arg(format!("membership query for negative {x}")));
        }
        self.try_has(x as u64)
    }

    /// Membership of a non-negative integer.
    ///
    /// Panics only if the membership table would exceed [`MAX_TABLE_LEN`],
    /// which cannot happen for numerical semigroups.
    pub fn has(&self, x: u64) -> bool {
        self.try_has(x).expect("membership table limit")
    }

    pub fn try_has(&self, x: u64) -> Result<bool> {
        if !x.is_multiple_of(self.gcd) {
            return Ok(false);
        }
        let y = x / self.gcd;
        if let Ok(f) = self.reduced_frobenius() {
            if y as i128 > f as i128 {
                return Ok(true);
            }
        }
        if let Some(v) = self.cache.table.read().expect("poisoned").get(y) {
            return Ok(v);
        }
        let mut t = self.cache.table.write().expect("poisoned");
        if t.get(y).is_none() {
            let target = y.max(t.bound().saturating_mul(2));
            t.grow_to(target)?;
        }
        Ok(t.get(y).expect("table grown"))
    }

    /// Frobenius number of `⟨gens / gcd⟩`.
    fn reduced_frobenius(&self) -> Result<i64> {
        self.cache
            .frobenius
            .get_or_init(|| {
                let m = *self.sorted_gens().first().expect("non-empty") / self.gcd;
                let mut t = self.cache.table.write().expect("poisoned");
                // The first run of `m` consecutive members starts right after
                // the Frobenius number.
                let mut bound = t.bound();
                loop {
                    let mut run = 0u64;
                    for (x, &inside) in t.as_slice().iter().enumerate() {
                        if inside {
                            run += 1;
                            if run == m {
                                return Ok(x as i64 - m as i64);
                            }
                        } else {
                            run = 0;
                        }
                    }
                    bound = bound.saturating_mul(2);
                    t.grow_to(bound)?;
                }
            })
            .clone()
    }

    /// Membership table of `⟨gens⟩` (not reduced) on `0..=bound`.
    pub fn membership_table(&self, bound: u64) -> Result<MembershipTable> {
        MembershipTable::new(&self.sorted_gens(), bound)
    }

    /// Generators divided by `k`; every generator must be divisible.
    pub fn divided_by(&self, k: u64) -> Result<SemigroupGens> {
        if k == 0 || self.gens.iter().any(|c| c % k != 0) {
            return Err(Error::arg(format!("{self} is not divisible by {k}")));
        }
        let g: Vec<u64> = self.gens.iter().map(|c| c / k).collect();
        SemigroupGens::new(&g)
    }
}

fn is_minimal_sorted(sorted: &[u64]) -> Result<bool> {
    for (i, &g) in sorted.iter().enumerate() {
        if i == 0 {
            continue;
        }
        let t = MembershipTable::new(&sorted[..i], g)?;
        if t.get(g) == Some(true) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The unique minimal generating set of `⟨gens⟩`, keeping the first
/// occurrence order of the survivors.
pub fn minimal_generators(gens: &[u64]) -> Result<SemigroupGens> {
    if gens.is_empty() {
        return Err(Error::arg("empty generating set"));
    }
    if gens.contains(&0) {
        return Err(Error::arg("generators must be positive"));
    }
    let d = gcd_all(gens);
    let mut sorted: Vec<u64> = gens.iter().map(|c| c / d).collect();
    sorted.sort_unstable();
    sorted.dedup();

    let mut kept: Vec<u64> = Vec::new();
    let mut table = MembershipTable::new(&[], 0)?;
    for &g in &sorted {
        if table.gens.is_empty() {
            kept.push(g);
            table = MembershipTable::new(&kept, g)?;
            continue;
        }
        table.grow_to(g)?;
        if !table.get(g).expect("grown") {
            kept.push(g);
            table = MembershipTable::new(&kept, g)?;
        }
    }

    let mut out = Vec::with_capacity(kept.len());
    for &c in gens {
        if kept.contains(&(c / d)) && c % d == 0 && !out.contains(&c) {
            out.push(c);
        }
    }
    let s = SemigroupGens::new(&out)?;
    debug_assert!(s.minimal);
    Ok(s)
}

fn require_numerical(s: &SemigroupGens) -> Result<()> {
    if s.gcd != 1 {
        return Err(Error::Domain(format!(
            "{s} has gcd {} so its complement in ℕ is infinite",
            s.gcd
        )));
    }
    Ok(())
}

/// Largest integer outside the semigroup, `-1` for `⟨1⟩`.
pub fn frobenius(s: &SemigroupGens) -> Result<i64> {
    require_numerical(s)?;
    s.reduced_frobenius()
}

/// Gaps `ℕ ∖ ⟨C⟩` in increasing order.
pub fn gaps(s: &SemigroupGens) -> Result<Vec<u64>> {
    let f = frobenius(s)?;
    Ok((0..=f.max(0) as u64).filter(|&x| !s.has(x)).collect())
}

/// Least element of the semigroup in each residue class modulo `m`,
/// indexed by residue.
pub fn apery_set(s: &SemigroupGens, m: u64) -> Result<Vec<u64>> {
    require_numerical(s)?;
    if m == 0 || !s.has(m) {
        return Err(Error::arg(format!("{m} is not a positive element of {s}")));
    }
    let f = frobenius(s)?;
    let mut out = vec![u64::MAX; m as usize];
    let mut missing = m as usize;
    let mut x = 0u64;
    while missing > 0 {
        let r = (x % m) as usize;
        if out[r] == u64::MAX && s.has(x) {
            out[r] = x;
            missing -= 1;
        }
        x += 1;
        debug_assert!(x as i128 <= f as i128 + m as i128 + 1);
    }
    Ok(out)
}

/// Integers `x ∉ ⟨C⟩` with `x + c ∈ ⟨C⟩` for every generator `c`; includes
/// `-1` for `⟨1⟩` so that the count is always the type.
pub fn pseudo_frobenius(s: &SemigroupGens) -> Result<Vec<i64>> {
    let f = frobenius(s)?;
    let member = |x: i64| x >= 0 && s.has(x as u64);
    Ok((-1..=f)
        .filter(|&x| !member(x) && s.gens().iter().all(|&c| member(x + c as i64)))
        .collect())
}

/// Number of pseudo-Frobenius elements.
pub fn semigroup_type(s: &SemigroupGens) -> Result<usize> {
    Ok(pseudo_frobenius(s)?.len())
}
