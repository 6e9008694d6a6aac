//! Random gluing towers shared by the integration tests.
#![allow(dead_code)]

use glulib::arith::gcd;
use glulib::SemigroupGens;
use rand::seq::SliceRandom;
use rand::Rng;

pub const MAX_LEAF_GEN: u64 = 60;
pub const MAX_VALUE: u64 = 2000;

pub fn sg(g: &[u64]) -> SemigroupGens {
    SemigroupGens::new(g).unwrap()
}

/// Minimally generated numerical semigroup with `n` generators in `2..=max`.
pub fn random_leaf<R: Rng>(rng: &mut R, n: usize, max: u64) -> Option<Vec<u64>> {
    if n == 1 {
        return Some(vec![1]);
    }
    for _ in 0..200 {
        let mut pool: Vec<u64> = (2..=max).collect();
        pool.shuffle(rng);
        let g: Vec<u64> = pool.into_iter().take(n).collect();
        if g.len() < n || g.iter().fold(0, |a, &b| gcd(a, b)) != 1 {
            continue;
        }
        let s = SemigroupGens::new(&g).ok()?;
        if s.is_minimal() {
            return Some(g);
        }
    }
    None
}

/// Elements of `⟨s⟩` that are not generators, up to `limit`.
fn glue_candidates(s: &[u64], limit: u64) -> Vec<u64> {
    let s = sg(s);
    (2..=limit).filter(|&x| s.has(x) && !s.gens().contains(&x)).collect()
}

/// `k1·A ⊔ k2·B` for random admissible `k1 ∈ ⟨B⟩∖B`, `k2 ∈ ⟨A⟩∖A`.
pub fn random_gluing<R: Rng>(rng: &mut R, a: &[u64], b: &[u64], max_value: u64) -> Option<Vec<u64>> {
    let amax = *a.iter().max()?;
    let bmax = *b.iter().max()?;
    let k1s = glue_candidates(b, max_value / amax);
    let k2s = glue_candidates(a, max_value / bmax);
    for _ in 0..50 {
        let k1 = *k1s.get(rng.gen_range(0..k1s.len().clamp(1, 12)))?;
        let k2 = *k2s.get(rng.gen_range(0..k2s.len().clamp(1, 12)))?;
        if gcd(k1, k2) != 1 {
            continue;
        }
        let c: Vec<u64> = a.iter().map(|x| k1 * x).chain(b.iter().map(|y| k2 * y)).collect();
        if let Ok(s) = SemigroupGens::new(&c) {
            if s.is_minimal() && s.gcd() == 1 && c.iter().all(|&x| x <= max_value) {
                return Some(c);
            }
        }
    }
    None
}

/// A random tower of gluings with `n` generators in total. Leaves have at
/// most `max_leaf_dim` generators (2 gives complete intersections).
pub fn random_tower<R: Rng>(rng: &mut R, n: usize, max_leaf_dim: usize, max_value: u64) -> Option<Vec<u64>> {
    tower(rng, n, max_leaf_dim, max_value, false)
}

/// Like [`random_tower`] but the top level is always a gluing.
pub fn random_glued_tower<R: Rng>(rng: &mut R, n: usize, max_leaf_dim: usize, max_value: u64) -> Option<Vec<u64>> {
    tower(rng, n, max_leaf_dim, max_value, true)
}

fn tower<R: Rng>(rng: &mut R, n: usize, max_leaf_dim: usize, max_value: u64, glue: bool) -> Option<Vec<u64>> {
    if n == 1 || (!glue && (n <= 2 || (n <= max_leaf_dim && rng.gen_bool(0.25)))) {
        if n > max_leaf_dim {
            return None;
        }
        let max = rng.gen_range(7..=MAX_LEAF_GEN.min(max_value));
        return random_leaf(rng, n, max);
    }
    let p = rng.gen_range(1..n);
    let a = random_tower(rng, p, max_leaf_dim, max_value / 2)?;
    let b = random_tower(rng, n - p, max_leaf_dim, max_value / 2)?;
    random_gluing(rng, &a, &b, max_value)
}

/// Distinct towers, cycling through embedding dimensions `dims`.
pub fn corpus<R: Rng>(rng: &mut R, count: usize, dims: &[usize], max_leaf_dim: usize) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut i = 0;
    while out.len() < count {
        let n = dims[i % dims.len()];
        i += 1;
        if let Some(c) = random_glued_tower(rng, n, max_leaf_dim, MAX_VALUE) {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

/// `C = {k1} ⊔ k2·B`: a simple split with the single part first.
pub fn random_simple_split<R: Rng>(rng: &mut R, b: &[u64]) -> Option<Vec<u64>> {
    random_gluing(rng, &[1], b, MAX_VALUE)
}
