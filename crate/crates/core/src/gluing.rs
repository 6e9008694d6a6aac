//! Gluing decompositions `C = k₁A ⊔ k₂B`: certification of a given
//! bipartition, exhaustive search, simple splits and recursive
//! decomposition trees.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, gcd_all, MembershipTable, SemigroupGens};
use crate::error::{checked_mul, Error, Result};

/// A certified gluing of a parent generating set.
///
/// `part1` and `part2` index into the parent's generators, in parent order;
/// `a` and `b` list the divided generators in that same order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingSplit {
    pub k1: u64,
    pub a: SemigroupGens,
    pub k2: u64,
    pub b: SemigroupGens,
    /// Exponents with `k2 = Σ alpha_i a_i`.
    pub alpha: Vec<u64>,
    /// Exponents with `k1 = Σ beta_j b_j`.
    pub beta: Vec<u64>,
    pub part1: Vec<usize>,
    pub part2: Vec<usize>,
}

impl GluingSplit {
    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    pub fn is_simple(&self) -> bool {
        self.p() == 1 || self.q() == 1
    }

    /// The same gluing with the roles of the two parts exchanged.
    pub fn swapped(&self) -> GluingSplit {
        GluingSplit {
            k1: self.k2,
            a: self.b.clone(),
            k2: self.k1,
            b: self.a.clone(),
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
            part1: self.part2.clone(),
            part2: self.part1.clone(),
        }
    }

    /// Weighted degree `k₁k₂` of the gluing binomial.
    pub fn rho_degree(&self) -> Result<u64> {
        checked_mul(self.k1, self.k2, "gluing degree k1*k2")
    }
}

impl fmt::Display for GluingSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |f: &mut fmt::Formatter<'_>, k: u64, s: &SemigroupGens| {
            if s.gens() == [1] {
                write!(f, "{k}")
            } else {
                write!(f, "{k}{{")?;
                for (i, g) in s.gens().iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, "}}")
            }
        };
        side(f, self.k1, &self.a)?;
        write!(f, " ⊔ ")?;
        side(f, self.k2, &self.b)
    }
}

/// A binomial `m_left - m_right`.
///
/// For a gluing binomial `left` is over the first part's variables and
/// `right` over the second's; binomials of a toric ideal use two exponent
/// vectors over the same variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Binomial {
    pub left: Vec<u64>,
    pub right: Vec<u64>,
    pub degree: u64,
}

impl Binomial {
    /// Renders with the given variable names for each side.
    pub fn render(&self, left_names: &[String], right_names: &[String]) -> String {
        format!(
            "{}-{}",
            render_monomial(&self.left, left_names),
            render_monomial(&self.right, right_names)
        )
    }

    /// The binomial with its monomials exchanged.
    pub fn negated(&self) -> Binomial {
        Binomial {
            left: self.right.clone(),
            right: self.left.clone(),
            degree: self.degree,
        }
    }
}

pub fn render_monomial(exps: &[u64], names: &[String]) -> String {
    let factors: Vec<String> = exps
        .iter()
        .zip(names)
        .filter(|(e, _)| **e > 0)
        .map(|(&e, n)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect();
    if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join("*")
    }
}

pub fn var_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Lexicographically largest exponent vector `e` with `Σ e_i gens_i = target`,
/// so earlier generators are used as much as possible.
pub fn lex_largest_factorization(gens: &[u64], target: u64) -> Result<Option<Vec<u64>>> {
    let n = gens.len();
    // suffix[i]: membership in ⟨gens[i..]⟩ up to target; suffix[n] is {0}.
    let mut suffix: Vec<MembershipTable> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        suffix.push(MembershipTable::new(&gens[i..], target)?);
    }
    if !suffix[0].get(target).unwrap_or(false) {
        return Ok(None);
    }
    let mut rem = target;
    let mut out = vec![0u64; n];
    for i in 0..n {
        let c = gens[i];
        let mut e = rem / c;
        loop {
            let r = rem - e * c;
            if suffix[i + 1].get(r) == Some(true) {
                out[i] = e;
                rem = r;
                break;
            }
            // e = 0 always succeeds because rem ∈ ⟨gens[i..]⟩ and the loop
            // invariant keeps it there.
            e -= 1;
        }
    }
    debug_assert_eq!(rem, 0);
    Ok(Some(out))
}

fn require_numerical_minimal(c: &SemigroupGens) -> Result<()> {
    if !c.is_minimal() {
        return Err(Error::arg(format!("{c} is not a minimal generating set")));
    }
    if !c.is_numerical() {
        return Err(Error::arg(format!("{c} does not have gcd 1")));
    }
    Ok(())
}

/// Certifies the gluing given by the parent indices in `part1`; everything
/// else forms the second part.
pub fn check_split_indices(c: &SemigroupGens, part1: &[usize]) -> Result<Option<GluingSplit>> {
    require_numerical_minimal(c)?;
    let n = c.len();
    let mut in1 = vec![false; n];
    for &i in part1 {
        if i >= n || in1[i] {
            return Err(Error::arg(format!("bad part index {i} for {c}")));
        }
        in1[i] = true;
    }
    let part1: Vec<usize> = (0..n).filter(|&i| in1[i]).collect();
    let part2: Vec<usize> = (0..n).filter(|&i| !in1[i]).collect();
    if part1.is_empty() || part2.is_empty() {
        return Err(Error::arg("both parts of a split must be non-empty"));
    }
    let vals1: Vec<u64> = part1.iter().map(|&i| c.gens()[i]).collect();
    let vals2: Vec<u64> = part2.iter().map(|&i| c.gens()[i]).collect();
    let k1 = gcd_all(&vals1);
    let k2 = gcd_all(&vals2);
    if gcd(k1, k2) != 1 {
        return Ok(None);
    }
    let a = SemigroupGens::new(&vals1.iter().map(|v| v / k1).collect::<Vec<_>>())?;
    let b = SemigroupGens::new(&vals2.iter().map(|v| v / k2).collect::<Vec<_>>())?;
    if !a.is_minimal() || !b.is_minimal() {
        return Ok(None);
    }
    if !b.has(k1) || b.gens().contains(&k1) || !a.has(k2) || a.gens().contains(&k2) {
        return Ok(None);
    }
    let alpha = lex_largest_factorization(a.gens(), k2)?
        .ok_or_else(|| Error::invariant(format!("{k2} ∈ {a} but no factorization found")))?;
    let beta = lex_largest_factorization(b.gens(), k1)?
        .ok_or_else(|| Error::invariant(format!("{k1} ∈ {b} but no factorization found")))?;
    Ok(Some(GluingSplit {
        k1,
        a,
        k2,
        b,
        alpha,
        beta,
        part1,
        part2,
    }))
}

/// Certifies the gluing `part1 ⊔ part2` given by generator values.
pub fn check_split(
    c: &SemigroupGens,
    part1: &[u64],
    part2: &[u64],
) -> Result<Option<GluingSplit>> {
    let mut want: Vec<u64> = part1.iter().chain(part2).copied().collect();
    want.sort_unstable();
    if want != c.sorted_gens() {
        return Err(Error::arg(format!(
            "{part1:?} ⊔ {part2:?} is not a partition of {c}"
        )));
    }
    let idx: Vec<usize> = part1
        .iter()
        .map(|v| c.gens().iter().position(|g| g == v).expect("checked"))
        .collect();
    check_split_indices(c, &idx)
}

/// Every gluing of `C`, oriented so that the first part holds the first
/// listed generator, ordered by the sorted contents of that part.
///
/// Two-generator sets are hypersurface base cases and yield no splits.
pub fn find_gluings(c: &SemigroupGens) -> Result<Vec<GluingSplit>> {
    require_numerical_minimal(c)?;
    let n = c.len();
    if n <= 2 {
        return Ok(Vec::new());
    }
    if n > 24 {
        return Err(Error::resource("enumerating bipartitions", n as u128, 24));
    }
    let masks: Vec<u32> = (0..(1u32 << (n - 1)) - 1).collect();
    let found: Vec<Result<Option<GluingSplit>>> = masks
        .par_iter()
        .map(|&mask| {
            let mut part1 = vec![0usize];
            part1.extend((1..n).filter(|&i| mask >> (i - 1) & 1 == 1));
            check_split_indices(c, &part1)
        })
        .collect();
    let mut splits = Vec::new();
    for r in found {
        if let Some(s) = r? {
            splits.push(s);
        }
    }
    splits.sort_by_cached_key(|s| {
        let mut v: Vec<u64> = s.part1.iter().map(|&i| c.gens()[i]).collect();
        v.sort_unstable();
        v
    });
    Ok(splits)
}

/// Gluings with a singleton part, normalized with the singleton first.
pub fn simple_splits(c: &SemigroupGens) -> Result<Vec<GluingSplit>> {
    Ok(find_gluings(c)?
        .into_iter()
        .filter(GluingSplit::is_simple)
        .map(|s| if s.p() == 1 { s } else { s.swapped() })
        .collect())
}

/// The gluing binomial `∏ x_i^{α_i} - ∏ y_j^{β_j}` of weighted degree `k₁k₂`.
pub fn rho_binomial(split: &GluingSplit) -> Result<Binomial> {
    Ok(Binomial {
        left: split.alpha.clone(),
        right: split.beta.clone(),
        degree: split.rho_degree()?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafKind {
    Dim1,
    Dim2,
    Indecomposable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    First,
    All,
    PreferSimple,
}

pub const DEFAULT_TREE_LIMIT: usize = 64;

/// Recursive gluing decomposition down to embedding dimension ≤ 2 or
/// indecomposable leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompTree {
    Leaf {
        node: SemigroupGens,
        kind: LeafKind,
    },
    Glued {
        node: SemigroupGens,
        split: Box<GluingSplit>,
        children: Box<[DecompTree; 2]>,
    },
}

impl DecompTree {
    pub fn node(&self) -> &SemigroupGens {
        match self {
            DecompTree::Leaf { node, .. } | DecompTree::Glued { node, .. } => node,
        }
    }

    pub fn split(&self) -> Option<&GluingSplit> {
        match self {
            DecompTree::Leaf { .. } => None,
            DecompTree::Glued { split, .. } => Some(split),
        }
    }

    pub fn children(&self) -> Option<&[DecompTree; 2]> {
        match self {
            DecompTree::Leaf { .. } => None,
            DecompTree::Glued { children, .. } => Some(children),
        }
    }

    pub fn leaf_kind(&self) -> Option<LeafKind> {
        match self {
            DecompTree::Leaf { kind, .. } => Some(*kind),
            DecompTree::Glued { .. } => None,
        }
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&DecompTree> {
        match self {
            DecompTree::Leaf { .. } => vec![self],
            DecompTree::Glued { children, .. } => {
                let mut v = children[0].leaves();
                v.extend(children[1].leaves());
                v
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            DecompTree::Leaf { .. } => 0,
            DecompTree::Glued { children, .. } => {
                1 + children[0].depth().max(children[1].depth())
            }
        }
    }
}

fn leaf(node: &SemigroupGens) -> DecompTree {
    let kind = match node.len() {
        1 => LeafKind::Dim1,
        2 => LeafKind::Dim2,
        _ => LeafKind::Indecomposable,
    };
    DecompTree::Leaf {
        node: node.clone(),
        kind,
    }
}

fn glued(node: &SemigroupGens, split: GluingSplit, a: DecompTree, b: DecompTree) -> DecompTree {
    DecompTree::Glued {
        node: node.clone(),
        split: Box::new(split),
        children: Box::new([a, b]),
    }
}

fn single_tree(c: &SemigroupGens, prefer_simple: bool) -> Result<DecompTree> {
    let splits = find_gluings(c)?;
    let chosen = if prefer_simple {
        splits
            .iter()
            .find(|s| s.is_simple())
            .map(|s| if s.p() == 1 { s.clone() } else { s.swapped() })
            .or_else(|| splits.first().cloned())
    } else {
        splits.into_iter().next()
    };
    match chosen {
        None => Ok(leaf(c)),
        Some(s) => {
            let a = single_tree(&s.a, prefer_simple)?;
            let b = single_tree(&s.b, prefer_simple)?;
            Ok(glued(c, s, a, b))
        }
    }
}

fn all_trees(c: &SemigroupGens, limit: usize) -> Result<Vec<DecompTree>> {
    let splits = find_gluings(c)?;
    if splits.is_empty() {
        return Ok(vec![leaf(c)]);
    }
    let mut out = Vec::new();
    'outer: for s in splits {
        let ta = all_trees(&s.a, limit)?;
        let tb = all_trees(&s.b, limit)?;
        for a in &ta {
            for b in &tb {
                if out.len() >= limit {
                    break 'outer;
                }
                out.push(glued(c, s.clone(), a.clone(), b.clone()));
            }
        }
    }
    Ok(out)
}

/// Decomposition trees of `C`; `First` and `PreferSimple` yield one tree,
/// `All` at most `limit`.
pub fn decompose(c: &SemigroupGens, strategy: Strategy, limit: usize) -> Result<Vec<DecompTree>> {
    require_numerical_minimal(c)?;
    match strategy {
        Strategy::First => Ok(vec![single_tree(c, false)?]),
        Strategy::PreferSimple => Ok(vec![single_tree(c, true)?]),
        Strategy::All => all_trees(c, limit.max(1)),
    }
}

/// The tree chosen by `strategy` (the first one for `All`).
pub fn decomposition_tree(c: &SemigroupGens, strategy: Strategy) -> Result<DecompTree> {
    Ok(decompose(c, strategy, 1)?.remove(0))
}

/// Outcome of checking the arithmetic-sequence decomposability law.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArithmeticReport {
    pub arithmetic: bool,
    /// Common difference of the sorted generators when arithmetic.
    pub difference: Option<u64>,
    /// Whether the law predicts a gluing: `{2c₀, 2c₀+d, 2c₀+2d}` with `d` odd.
    pub predicted_decomposable: bool,
    /// Whether the exhaustive split search found a gluing.
    pub decomposable: bool,
    pub consistent: bool,
}

pub fn is_arithmetic_and_decomposable(c: &SemigroupGens) -> Result<ArithmeticReport> {
    require_numerical_minimal(c)?;
    let s = c.sorted_gens();
    let difference = if s.len() >= 2 {
        let d = s[1] - s[0];
        s.windows(2).all(|w| w[1] - w[0] == d).then_some(d)
    } else {
        None
    };
    let arithmetic = difference.is_some() && s.len() >= 3;
    let predicted_decomposable = match difference {
        Some(d) if s.len() == 3 => s[0].is_multiple_of(2) && d % 2 == 1,
        _ => false,
    };
    let decomposable = !find_gluings(c)?.is_empty();
    Ok(ArithmeticReport {
        arithmetic,
        difference: if arithmetic { difference } else { None },
        predicted_decomposable,
        decomposable,
        consistent: !arithmetic || predicted_decomposable == decomposable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg(g: &[u64]) -> SemigroupGens {
        SemigroupGens::new(g).unwrap()
    }

    const EX1: [u64; 7] = [187, 289, 425, 323, 140, 364, 336];

    #[test]
    fn ex1_split() {
        let c = sg(&EX1);
        let s = check_split(&c, &[187, 289, 425, 323], &[140, 364, 336])
            .unwrap()
            .unwrap();
        assert_eq!((s.k1, s.k2), (17, 28));
        assert_eq!(s.a.gens(), &[11, 17, 25, 19]);
        assert_eq!(s.b.gens(), &[5, 13, 12]);
        assert_eq!(s.alpha, vec![1, 1, 0, 0]);
        assert_eq!(s.beta, vec![1, 0, 1]);
        let rho = rho_binomial(&s).unwrap();
        assert_eq!(rho.degree, 476);
        assert_eq!(
            rho.render(&var_names("x", 4), &var_names("y", 3)),
            "x1*x2-y1*y3"
        );
    }

    #[test]
    fn ex4_split() {
        let c = sg(&[33, 55, 32, 56]);
        let s = check_split(&c, &[33, 55], &[32, 56]).unwrap().unwrap();
        assert_eq!((s.k1, s.k2), (11, 8));
        assert_eq!(s.a.gens(), &[3, 5]);
        assert_eq!(s.b.gens(), &[4, 7]);
        assert_eq!(s.alpha, vec![1, 1]);
        assert_eq!(s.beta, vec![1, 1]);
        assert!(find_gluings(&c).unwrap().contains(&s));
    }

    #[test]
    fn arithmetic_sequence_has_no_split() {
        let c = sg(&[9, 11, 13, 15]);
        assert!(find_gluings(&c).unwrap().is_empty());
        for part in [&[9u64][..], &[9, 11], &[9, 13], &[9, 15], &[9, 11, 13]] {
            let rest: Vec<u64> = c.gens().iter().filter(|g| !part.contains(g)).copied().collect();
            assert!(check_split(&c, part, &rest).unwrap().is_none());
        }
        let r = is_arithmetic_and_decomposable(&c).unwrap();
        assert!(r.arithmetic && !r.decomposable && r.consistent);
    }

    #[test]
    fn check_split_rejects_non_partitions() {
        let c = sg(&[33, 55, 32, 56]);
        assert!(check_split(&c, &[33, 55], &[32]).is_err());
        assert!(check_split(&c, &[33, 55, 32, 56], &[]).is_err());
        assert!(check_split(&c, &[33, 55, 7], &[32, 56]).is_err());
    }

    #[test]
    fn two_generators_are_leaves() {
        assert!(find_gluings(&sg(&[2, 3])).unwrap().is_empty());
        assert!(simple_splits(&sg(&[3, 5])).unwrap().is_empty());
        let t = decomposition_tree(&sg(&[3, 5]), Strategy::First).unwrap();
        assert_eq!(t.leaf_kind(), Some(LeafKind::Dim2));
    }

    #[test]
    fn simple_split_examples() {
        let s = simple_splits(&sg(&[11, 6, 16])).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].k1, s[0].k2), (11, 2));
        assert_eq!(s[0].a.gens(), &[1]);
        assert_eq!(s[0].b.gens(), &[3, 8]);
        assert_eq!(s[0].to_string(), "11 ⊔ 2{3,8}");

        let s = simple_splits(&sg(&[17, 22, 12, 32])).unwrap();
        let ex3 = s.iter().find(|s| s.k1 == 17).unwrap();
        assert_eq!(ex3.k2, 2);
        assert_eq!(ex3.b.gens(), &[11, 6, 16]);
    }

    #[test]
    fn ex3_tree_is_a_chain_of_simple_splits() {
        let t = decomposition_tree(&sg(&[17, 22, 12, 32]), Strategy::PreferSimple).unwrap();
        let s = t.split().unwrap();
        assert_eq!(s.to_string(), "17 ⊔ 2{11,6,16}");
        let inner = &t.children().unwrap()[1];
        assert_eq!(inner.split().unwrap().to_string(), "11 ⊔ 2{3,8}");
        let leaves: Vec<Vec<u64>> = t.leaves().iter().map(|l| l.node().gens().to_vec()).collect();
        assert_eq!(leaves, vec![vec![1], vec![1], vec![3, 8]]);
    }

    #[test]
    fn indecomposable_tree() {
        let t = decomposition_tree(&sg(&[9, 11, 13, 15]), Strategy::First).unwrap();
        assert_eq!(t.leaf_kind(), Some(LeafKind::Indecomposable));
    }

    #[test]
    fn arithmetic_law_example() {
        let c = sg(&[10, 13, 16]);
        let r = is_arithmetic_and_decomposable(&c).unwrap();
        assert!(r.arithmetic && r.predicted_decomposable && r.decomposable && r.consistent);
        let s = simple_splits(&c).unwrap();
        assert_eq!(s[0].to_string(), "13 ⊔ 2{5,8}");
        assert!(check_split(&c, &[10, 16], &[13]).unwrap().is_some());
    }

    #[test]
    fn rejects_non_minimal_input() {
        assert!(find_gluings(&sg(&[4, 6, 8])).is_err());
        assert!(find_gluings(&sg(&[4, 6])).is_err());
    }

    #[test]
    fn lex_largest_prefers_early_generators() {
        assert_eq!(
            lex_largest_factorization(&[4, 3, 2, 1], 6).unwrap(),
            Some(vec![1, 0, 1, 0])
        );
        assert_eq!(lex_largest_factorization(&[3, 5], 7).unwrap(), None);
        assert_eq!(lex_largest_factorization(&[3, 5], 0).unwrap(), Some(vec![0, 0]));
    }

    #[test]
    fn all_trees_bounded() {
        let c = sg(&EX1);
        let trees = decompose(&c, Strategy::All, 3).unwrap();
        assert!(!trees.is_empty() && trees.len() <= 3);
    }
}
