//! Differential graded algebra structures on free resolutions.
//!
//! A table stores `e_a · e_b` for basis elements of positive homological
//! degree; products with the unit `e_0 ∈ F_0` are implicit. Checks are
//! symbolic over ℤ.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ops::TensorIndex;
use super::{Elem, FreeComplex, Poly};
use crate::error::{Error, Result};
use crate::linalg::inv_mod;

type Key = (usize, usize, usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgTable {
    ranks: Vec<usize>,
    nvars: usize,
    products: BTreeMap<Key, BTreeMap<usize, Poly>>,
}

impl DgTable {
    /// Empty table (all positive-degree products zero) for a complex with
    /// the given ranks; `F_0` must have rank one.
    pub fn new(ranks: Vec<usize>, nvars: usize) -> Result<Self> {
        if ranks.first() != Some(&1) {
            return Err(Error::arg("product tables need F_0 of rank one"));
        }
        Ok(DgTable {
            ranks,
            nvars,
            products: BTreeMap::new(),
        })
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn length(&self) -> usize {
        self.ranks.len() - 1
    }

    fn rank(&self, k: usize) -> usize {
        self.ranks.get(k).copied().unwrap_or(0)
    }

    /// Sets `e_a · e_b` for `e_a ∈ F_i`, `e_b ∈ F_j`.
    pub fn set(&mut self, i: usize, a: usize, j: usize, b: usize, value: Elem) -> Result<()> {
        if i == 0 || j == 0 || a >= self.rank(i) || b >= self.rank(j) {
            return Err(Error::arg(format!("no product slot ({i},{a})·({j},{b})")));
        }
        if !value.is_zero() && value.deg != i + j {
            return Err(Error::arg("product lands in the wrong degree"));
        }
        if value.is_zero() {
            self.products.remove(&(i, a, j, b));
        } else {
            self.products.insert((i, a, j, b), value.coeffs);
        }
        Ok(())
    }

    /// Stored non-zero products `((i, a, j, b), e_a·e_b)`.
    pub fn entries(&self) -> impl Iterator<Item = (Key, Elem)> + '_ {
        self.products.iter().map(|(&(i, a, j, b), c)| {
            (
                (i, a, j, b),
                Elem {
                    deg: i + j,
                    coeffs: c.clone(),
                },
            )
        })
    }

    pub fn basis_product(&self, i: usize, a: usize, j: usize, b: usize) -> Elem {
        if i == 0 {
            return Elem::basis(j, b, self.nvars);
        }
        if j == 0 {
            return Elem::basis(i, a, self.nvars);
        }
        Elem {
            deg: i + j,
            coeffs: self.products.get(&(i, a, j, b)).cloned().unwrap_or_default(),
        }
    }

    /// Bilinear extension to arbitrary elements.
    pub fn mul(&self, x: &Elem, y: &Elem) -> Result<Elem> {
        let mut out = Elem::zero(x.deg + y.deg);
        if x.deg + y.deg > self.length() {
            return Ok(out);
        }
        for (&a, p) in &x.coeffs {
            for (&b, q) in &y.coeffs {
                let pq = p.mul(q)?;
                for (&c, r) in &self.basis_product(x.deg, a, y.deg, b).coeffs {
                    out.add_term(c, &r.mul(&pq)?)?;
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn map_polys(&self, f: impl Fn(&Poly) -> Poly) -> DgTable {
        DgTable {
            ranks: self.ranks.clone(),
            nvars: self.nvars,
            products: self
                .products
                .iter()
                .map(|(&k, v)| (k, v.iter().map(|(&c, p)| (c, f(p))).collect()))
                .collect(),
        }
    }
}

/// `k`-subsets of `0..m` in lexicographic order.
pub(crate) fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..m {
            cur.push(s);
            rec(s + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Exterior algebra on `m` generators: `e_S · e_T = ±e_{S∪T}`.
pub(crate) fn exterior_table(m: usize, nvars: usize) -> Result<DgTable> {
    let bases: Vec<Vec<Vec<usize>>> = (0..=m).map(|k| subsets(m, k)).collect();
    let index: Vec<HashMap<Vec<usize>, usize>> = bases
        .iter()
        .map(|b| b.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
        .collect();
    let mut t = DgTable::new(bases.iter().map(Vec::len).collect(), nvars)?;
    for i in 1..=m {
        for j in 1..=m - i {
            for (a, s) in bases[i].iter().enumerate() {
                for (b, u) in bases[j].iter().enumerate() {
                    if s.iter().any(|x| u.contains(x)) {
                        continue;
                    }
                    let inversions: usize =
                        s.iter().map(|x| u.iter().filter(|y| *y < x).count()).sum();
                    let mut union = [s.as_slice(), u.as_slice()].concat();
                    union.sort_unstable();
                    let c = index[i + j][&union];
                    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
                    let mut e = Elem::zero(i + j);
                    e.coeffs.insert(c, Poly::constant(sign, nvars));
                    t.set(i, a, j, b, e)?;
                }
            }
        }
    }
    Ok(t)
}

/// Products on `F_A ⊗ F_B`:
/// `(a₁⊗b₁)(a₂⊗b₂) = (-1)^{|b₁||a₂|} (a₁a₂)⊗(b₁b₂)`.
/// Variables of `ta` come first in the combined ring.
pub fn dg_tensor_product(ta: &DgTable, tb: &DgTable) -> Result<DgTable> {
    let idx = TensorIndex::new(ta.ranks(), tb.ranks());
    let (na, n) = (ta.nvars(), ta.nvars() + tb.nvars());
    let mut t = DgTable::new(idx.ranks().to_vec(), n)?;
    let len = t.length();
    let slots: Vec<Key> = basis_pairs(idx.ranks(), len);
    let values: Vec<(Key, Elem)> = slots
        .par_iter()
        .map(|&(k1, x, k2, y)| {
            let (i1, a1, j1, b1) = idx.split(k1, x);
            let (i2, a2, j2, b2) = idx.split(k2, y);
            let pa = ta.basis_product(i1, a1, i2, a2);
            let pb = tb.basis_product(j1, b1, j2, b2);
            let mut out = Elem::zero(k1 + k2);
            if i1 + i2 > ta.length() || j1 + j2 > tb.length() {
                return Ok(((k1, x, k2, y), out));
            }
            let sign = if (j1 * i2) % 2 == 0 { 1 } else { -1 };
            for (&a, p) in &pa.coeffs {
                let p = p.embed(0, n).scale(sign)?;
                for (&b, q) in &pb.coeffs {
                    out.add_term(idx.index(i1 + i2, a, j1 + j2, b), &p.mul(&q.embed(na, n))?)?;
                }
            }
            Ok(((k1, x, k2, y), out))
        })
        .collect::<Result<_>>()?;
    for ((i, a, j, b), v) in values {
        t.set(i, a, j, b, v)?;
    }
    Ok(t)
}

/// The product `(a₁,b₁)⋆(a₂,b₂) = (a₁a₂, a₁b₂ + (-1)^j b₁a₂)` on the cone
/// `M_k = G_k ⊕ G_{k-1}` for `(a₂,b₂) ∈ M_j`. Independent of `ρ`.
pub fn dg_cone(tg: &DgTable) -> Result<DgTable> {
    let rg = |k: usize| tg.ranks().get(k).copied().unwrap_or(0);
    let len = tg.length() + 1;
    let ranks: Vec<usize> = (0..=len).map(|k| rg(k) + if k > 0 { rg(k - 1) } else { 0 }).collect();
    let mut t = DgTable::new(ranks.clone(), tg.nvars())?;
    enum Part {
        First(usize),
        Second(usize),
    }
    let part = |k: usize, x: usize| {
        if x < rg(k) {
            Part::First(x)
        } else {
            Part::Second(x - rg(k))
        }
    };
    let shift = |e: Elem, off: usize, deg: usize| Elem {
        deg,
        coeffs: e.coeffs.into_iter().map(|(c, p)| (c + off, p)).collect(),
    };
    for (i, x, j, y) in basis_pairs(&ranks, len) {
        let v = match (part(i, x), part(j, y)) {
            (Part::First(a), Part::First(b)) => tg.basis_product(i, a, j, b),
            (Part::First(a), Part::Second(b)) => {
                if i + j - 1 > tg.length() {
                    continue;
                }
                shift(tg.basis_product(i, a, j - 1, b), rg(i + j), i + j)
            }
            (Part::Second(a), Part::First(b)) => {
                if i - 1 + j > tg.length() {
                    continue;
                }
                shift(tg.basis_product(i - 1, a, j, b).signed(j)?, rg(i + j), i + j)
            }
            (Part::Second(_), Part::Second(_)) => continue,
        };
        if i + j <= len {
            t.set(i, x, j, y, v)?;
        }
    }
    Ok(t)
}

/// Basis pairs `(i, a, j, b)`, `i, j ≥ 1`, `i + j ≤ max_deg`.
fn basis_pairs(ranks: &[usize], max_deg: usize) -> Vec<Key> {
    let mut out = Vec::new();
    for i in 1..ranks.len() {
        for j in 1..ranks.len() {
            if i + j > max_deg {
                continue;
            }
            for a in 0..ranks[i] {
                for b in 0..ranks[j] {
                    out.push((i, a, j, b));
                }
            }
        }
    }
    out
}

/// Which basis tuples a check visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sample {
    All,
    /// A seeded random subset of this size (or everything, if smaller).
    Random { count: usize, seed: u64 },
}

fn sample<T: Clone>(mut all: Vec<T>, s: Sample) -> Vec<T> {
    match s {
        Sample::All => all,
        Sample::Random { count, seed } => {
            if all.len() > count {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                all.shuffle(&mut rng);
                all.truncate(count);
            }
            all
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DgViolation {
    pub rule: &'static str,
    /// `(homological degree, basis index)` of each factor.
    pub factors: Vec<(usize, usize)>,
}

fn table_of(f: &FreeComplex) -> Result<&DgTable> {
    f.dg().ok_or_else(|| Error::arg("complex carries no product table"))
}

/// `d(xy) = d(x)y + (-1)^{|x|} x d(y)` on basis pairs, including pairs whose
/// product degree exceeds the length (where both sides must vanish).
pub fn check_leibniz(f: &FreeComplex, s: Sample) -> Result<Vec<DgViolation>> {
    let t = table_of(f)?;
    let n = f.ring().nvars();
    let pairs = sample(basis_pairs(t.ranks(), t.length() + 1), s);
    let bad: Vec<Option<DgViolation>> = pairs
        .par_iter()
        .map(|&(i, a, j, b)| {
            let x = Elem::basis(i, a, n);
            let y = Elem::basis(j, b, n);
            let lhs = f.apply_d(&t.mul(&x, &y)?)?;
            let rhs = t
                .mul(&f.apply_d(&x)?, &y)?
                .add(&t.mul(&x, &f.apply_d(&y)?)?.signed(i)?)?;
            Ok((!lhs.sub(&rhs)?.is_zero()).then(|| DgViolation {
                rule: "leibniz",
                factors: vec![(i, a), (j, b)],
            }))
        })
        .collect::<Result<_>>()?;
    Ok(bad.into_iter().flatten().collect())
}

/// `yx = (-1)^{|x||y|} xy` on basis pairs.
pub fn check_graded_commutativity(f: &FreeComplex, s: Sample) -> Result<Vec<DgViolation>> {
    let t = table_of(f)?;
    let n = f.ring().nvars();
    let pairs = sample(basis_pairs(t.ranks(), t.length()), s);
    let bad: Vec<Option<DgViolation>> = pairs
        .par_iter()
        .map(|&(i, a, j, b)| {
            let x = Elem::basis(i, a, n);
            let y = Elem::basis(j, b, n);
            let diff = t.mul(&y, &x)?.sub(&t.mul(&x, &y)?.signed(i * j)?)?;
            Ok((!diff.is_zero()).then(|| DgViolation {
                rule: "graded-commutativity",
                factors: vec![(i, a), (j, b)],
            }))
        })
        .collect::<Result<_>>()?;
    Ok(bad.into_iter().flatten().collect())
}

/// `(xy)z = x(yz)` on basis triples of total degree at most the length.
pub fn check_associativity(f: &FreeComplex, s: Sample) -> Result<Vec<DgViolation>> {
    let t = table_of(f)?;
    let n = f.ring().nvars();
    let len = t.length();
    let mut triples = Vec::new();
    for (i, a, j, b) in basis_pairs(t.ranks(), len.saturating_sub(1)) {
        for k in 1..=len.saturating_sub(i + j) {
            for c in 0..t.rank(k) {
                triples.push(((i, a), (j, b), (k, c)));
            }
        }
    }
    let triples = sample(triples, s);
    let bad: Vec<Option<DgViolation>> = triples
        .par_iter()
        .map(|&((i, a), (j, b), (k, c))| {
            let (x, y, z) = (Elem::basis(i, a, n), Elem::basis(j, b, n), Elem::basis(k, c, n));
            let left = t.mul(&t.mul(&x, &y)?, &z)?;
            let right = t.mul(&x, &t.mul(&y, &z)?)?;
            Ok((!left.sub(&right)?.is_zero()).then(|| DgViolation {
                rule: "associativity",
                factors: vec![(i, a), (j, b), (k, c)],
            }))
        })
        .collect::<Result<_>>()?;
    Ok(bad.into_iter().flatten().collect())
}

/// Product table for a resolution of length at most 3 obtained by lifting
/// through the differential: `e_a e_b` for `e_a, e_b ∈ F_1` lifts
/// `d(e_a)e_b - d(e_b)e_a`, and `e f` for `f ∈ F_2` lifts `d(e)f - e·d(f)`.
///
/// Such a table is graded-commutative by construction; Leibniz and
/// associativity then follow from injectivity of the last differential,
/// and both are re-checked by the caller's tests rather than assumed.
pub fn dg_by_lifting(f: &FreeComplex) -> Result<DgTable> {
    let len = f.length();
    if len > 3 {
        return Err(Error::arg(format!(
            "lifting builds products only up to length 3, got {len}"
        )));
    }
    let n = f.ring().nvars();
    let mut t = DgTable::new(f.ranks(), n)?;
    let r = f.ranks();
    if len < 2 {
        return Ok(t);
    }
    let s1 = &f.shifts()[1];
    for a in 0..r[1] {
        for b in a + 1..r[1] {
            let (ea, eb) = (Elem::basis(1, a, n), Elem::basis(1, b, n));
            let w = t.mul(&f.apply_d(&ea)?, &eb)?.sub(&t.mul(&ea, &f.apply_d(&eb)?)?)?;
            let v = lift(f, 2, &w, s1[a] + s1[b])?;
            t.set(1, b, 1, a, v.scale(-1)?)?;
            t.set(1, a, 1, b, v)?;
        }
    }
    if len == 3 {
        let s2 = &f.shifts()[2];
        for a in 0..r[1] {
            for b in 0..r[2] {
                let (e, g) = (Elem::basis(1, a, n), Elem::basis(2, b, n));
                let w = t.mul(&f.apply_d(&e)?, &g)?.sub(&t.mul(&e, &f.apply_d(&g)?)?)?;
                let v = lift(f, 3, &w, s1[a] + s2[b])?;
                t.set(2, b, 1, a, v.clone())?;
                t.set(1, a, 2, b, v)?;
            }
        }
    }
    Ok(t)
}

const LIFT_PRIME: u64 = 2_147_483_647;
const MAX_LIFT_UNKNOWNS: usize = 20_000;

/// Monomials of weighted degree `deg`.
fn monomials(weights: &[u64], deg: u64, cap: usize) -> Result<Vec<Vec<u32>>> {
    fn rec(w: &[u64], i: usize, rem: u64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>, cap: usize) -> bool {
        if i == w.len() {
            if rem == 0 {
                out.push(cur.clone());
            }
            return out.len() <= cap;
        }
        for e in 0..=rem / w[i] {
            cur[i] = e as u32;
            if !rec(w, i + 1, rem - e * w[i], cur, out, cap) {
                return false;
            }
        }
        cur[i] = 0;
        true
    }
    let mut out = Vec::new();
    if !rec(weights, 0, deg, &mut vec![0; weights.len()], &mut out, cap) {
        return Err(Error::resource("enumerating lift monomials", out.len() as u128, cap as u128));
    }
    Ok(out)
}

/// Solves `d_k v = w` for a homogeneous `v ∈ F_k` of degree `deg`.
fn lift(f: &FreeComplex, k: usize, w: &Elem, deg: u64) -> Result<Elem> {
    if w.is_zero() {
        return Ok(Elem::zero(k));
    }
    if k > f.length() {
        return Err(Error::invariant(format!("non-zero cycle in top degree {}", k - 1)));
    }
    let weights = f.ring().weights();
    let cols = f.d(k).columns();
    let mut unknowns: Vec<(usize, Vec<u32>)> = Vec::new();
    for (c, &sc) in f.shifts()[k].iter().enumerate() {
        if sc <= deg {
            for m in monomials(weights, deg - sc, MAX_LIFT_UNKNOWNS)? {
                unknowns.push((c, m));
            }
        }
        if unknowns.len() > MAX_LIFT_UNKNOWNS {
            return Err(Error::resource(
                "lifting a product",
                unknowns.len() as u128,
                MAX_LIFT_UNKNOWNS as u128,
            ));
        }
    }
    let mut eq_index: HashMap<(usize, Vec<u32>), usize> = HashMap::new();
    let mut columns: Vec<Vec<(usize, i64)>> = Vec::with_capacity(unknowns.len());
    for (c, m) in &unknowns {
        let mut col = Vec::new();
        for &(r, p) in &cols[*c] {
            for (e, coeff) in p.terms() {
                let mono: Vec<u32> = e.iter().zip(m).map(|(a, b)| a + b).collect();
                let next = eq_index.len();
                let row = *eq_index.entry((r, mono)).or_insert(next);
                col.push((row, coeff));
            }
        }
        columns.push(col);
    }
    let mut rhs_terms = Vec::new();
    for (&r, p) in &w.coeffs {
        for (e, coeff) in p.terms() {
            let row = *eq_index.get(&(r, e.clone())).ok_or_else(|| {
                Error::invariant(format!("product is not in the image of d{k}"))
            })?;
            rhs_terms.push((row, coeff));
        }
    }
    let p = LIFT_PRIME;
    let (rows, ucount) = (eq_index.len(), unknowns.len());
    let mut m = vec![vec![0u64; ucount + 1]; rows];
    for (u, col) in columns.iter().enumerate() {
        for &(r, c) in col {
            m[r][u] = (m[r][u] + c.rem_euclid(p as i64) as u64) % p;
        }
    }
    for (r, c) in rhs_terms {
        m[r][ucount] = (m[r][ucount] + c.rem_euclid(p as i64) as u64) % p;
    }
    let x = solve_mod(&mut m, ucount, p)
        .ok_or_else(|| Error::invariant(format!("product is not in the image of d{k}")))?;

    let mut v = Elem::zero(k);
    for (u, (c, mono)) in unknowns.into_iter().enumerate() {
        if x[u] != 0 {
            let val = if x[u] > p / 2 { x[u] as i64 - p as i64 } else { x[u] as i64 };
            v.add_term(c, &Poly::monomial(mono, val))?;
        }
    }
    if !f.apply_d(&v)?.sub(w)?.is_zero() {
        return Err(Error::invariant(format!(
            "lift through d{k} has no small integral solution"
        )));
    }
    Ok(v)
}

/// Solves an augmented system mod `p`; free variables are set to zero.
fn solve_mod(m: &mut [Vec<u64>], ncols: usize, p: u64) -> Option<Vec<u64>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(pr) = (row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, pr);
        let inv = inv_mod(m[row][col], p);
        for v in m[row][col..].iter_mut() {
            *v = *v * inv % p;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col] == 0 {
                continue;
            }
            let f = other[col];
            for c in col..=ncols {
                other[c] = (other[c] + p - f * pivot_row[c] % p) % p;
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    if m[row..].iter().any(|r| r[ncols] != 0) {
        return None;
    }
    let mut x = vec![0; ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][ncols];
    }
    Some(x)
}
