use std::fmt::Write as _;
use std::time::Instant;

use glulib::affine::{self, AffineBinomial, AffineSemigroup, GluingStatus};
use glulib::arith::{self, minimal_generators};
use glulib::complex::{self, ExactnessStatus};
use glulib::gluing::{self, rho_binomial, var_names, DecompTree};
use glulib::{invariants, oracle, BettiTable, Error, Field, Result, SemigroupGens, Strategy};
use serde_json::{json, Value};

use crate::report::{Report, Status};

pub fn parse_gens(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::Argument(format!("not a positive integer: {t:?}")))
        })
        .collect()
}

pub fn field_name(f: Field) -> String {
    match f {
        Field::Prime(p) => format!("GF({p})"),
        Field::Rational => "QQ".into(),
    }
}

pub fn parse_field(p: u64) -> Result<Field> {
    Field::from_characteristic(p)
        .ok_or_else(|| Error::Argument(format!("characteristic {p} is neither 0 nor a prime below 2^31")))
}

/// The minimal generating set of the numerical semigroup obtained after
/// dividing by the gcd, with warnings for each normalization applied.
fn normalized(gens: &[u64], warnings: &mut Vec<String>) -> Result<SemigroupGens> {
    let mut s = SemigroupGens::new(gens)?;
    if s.gcd() > 1 {
        warnings.push(format!("generators divided by their gcd {}", s.gcd()));
        s = s.divided_by(s.gcd())?;
    }
    if !s.is_minimal() {
        s = minimal_generators(s.gens())?;
        warnings.push(format!("non-minimal generators dropped; using {:?}", s.gens()));
    }
    Ok(s)
}

fn graded_json(t: &BettiTable) -> Value {
    Value::Array(t.entries().map(|((i, j), m)| json!([i, j, m])).collect())
}

fn totals_text(t: &[u64]) -> String {
    t.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

fn graded_text(out: &mut String, t: &BettiTable, indent: &str) {
    for i in 0..=t.pd() {
        let row: Vec<String> = t
            .entries()
            .filter(|((k, _), _)| *k == i)
            .map(|((_, j), m)| if m == 1 { format!("{j}") } else { format!("{j}^{m}") })
            .collect();
        let _ = writeln!(out, "{indent}β{i}: {}", row.join(" "));
    }
}

fn split_names(split: &gluing::GluingSplit) -> (Vec<String>, Vec<String>) {
    (var_names("x", split.p()), var_names("y", split.q()))
}

fn tree_json(t: &DecompTree) -> Result<Value> {
    Ok(match t {
        DecompTree::Leaf { node, kind } => json!({
            "gens": node.gens(),
            "leaf": kind,
        }),
        DecompTree::Glued { node, split, children } => {
            let (xa, yb) = split_names(split);
            json!({
                "gens": node.gens(),
                "k1": split.k1,
                "a": split.a.gens(),
                "k2": split.k2,
                "b": split.b.gens(),
                "alpha": split.alpha,
                "beta": split.beta,
                "rho": rho_binomial(split)?.render(&xa, &yb),
                "rho_degree": split.rho_degree()?,
                "part1": split.part1,
                "part2": split.part2,
                "children": [tree_json(&children[0])?, tree_json(&children[1])?],
            })
        }
    })
}

fn tree_text(out: &mut String, t: &DecompTree, depth: usize) -> Result<()> {
    let pad = "  ".repeat(depth);
    match t {
        DecompTree::Leaf { node, kind } => {
            let kind = serde_json::to_value(kind).expect("serializes");
            let _ = writeln!(out, "{pad}{node} leaf ({})", kind.as_str().unwrap_or(""));
        }
        DecompTree::Glued { node, split, children } => {
            let (xa, yb) = split_names(split);
            let _ = writeln!(
                out,
                "{pad}{node} = {split}: k1={}, k2={}, ρ={}",
                split.k1,
                split.k2,
                rho_binomial(split)?.render(&xa, &yb)
            );
            tree_text(out, &children[0], depth + 1)?;
            tree_text(out, &children[1], depth + 1)?;
        }
    }
    Ok(())
}

pub fn analyze(gens: &[u64], field: Field, r: &mut Report) -> Result<()> {
    let raw = SemigroupGens::new(gens)?;
    let s = normalized(gens, &mut r.warnings)?;
    let t0 = Instant::now();
    let frob = arith::frobenius(&s)?;
    let m = *s.gens().iter().min().expect("non-empty");
    let apery = arith::apery_set(&s, m)?;
    let pf = arith::pseudo_frobenius(&s)?;
    let gaps = arith::gaps(&s)?;
    r.timing("arith", t0.elapsed());
    let t0 = Instant::now();
    let tree = gluing::decomposition_tree(&s, Strategy::First)?;
    let class = invariants::classify(&tree, field)?;
    r.timing("classify", t0.elapsed());
    r.result = json!({
        "gcd": raw.gcd(),
        "minimal": raw.is_minimal(),
        "semigroup": s.gens(),
        "embedding_dimension": s.len(),
        "multiplicity": m,
        "frobenius": frob,
        "genus": gaps.len(),
        "apery": {"modulus": m, "elements": apery},
        "pseudo_frobenius": pf,
        "type": pf.len(),
        "field": field_name(field),
        "classification": class,
    });
    let mut t = String::new();
    let _ = writeln!(t, "semigroup {s} (gcd {}, minimal {})", raw.gcd(), raw.is_minimal());
    let _ = writeln!(t, "frobenius {frob}, genus {}, multiplicity {m}", gaps.len());
    let _ = writeln!(t, "apery set w.r.t. {m}: {apery:?}");
    let _ = writeln!(t, "pseudo-frobenius {pf:?} (type {})", pf.len());
    let _ = writeln!(
        t,
        "classification: {} (decomposable {}, μ {}, cm type {}, CI {}, gorenstein {})",
        serde_json::to_value(class.kind).expect("serializes").as_str().unwrap_or(""),
        class.decomposable,
        class.mu,
        class.cm_type,
        class.complete_intersection,
        class.gorenstein
    );
    r.text = t;
    Ok(())
}

pub fn decompose(gens: &[u64], strategy: Strategy, limit: usize, r: &mut Report) -> Result<()> {
    let s = normalized(gens, &mut r.warnings)?;
    let trees = gluing::decompose(&s, strategy, limit)?;
    let mut t = String::new();
    let mut out = Vec::new();
    for (i, tree) in trees.iter().enumerate() {
        if trees.len() > 1 {
            let _ = writeln!(t, "tree {}:", i + 1);
        }
        tree_text(&mut t, tree, 0)?;
        out.push(tree_json(tree)?);
    }
    r.result = json!({
        "semigroup": s.gens(),
        "strategy": strategy,
        "decomposable": trees.iter().any(|t| t.split().is_some()),
        "trees": out,
    });
    r.text = t;
    Ok(())
}

pub fn betti(gens: &[u64], graded: bool, use_oracle: bool, fields: &[Field], r: &mut Report) -> Result<()> {
    let s = normalized(gens, &mut r.warnings)?;
    let tree = gluing::decomposition_tree(&s, Strategy::First)?;
    let mut per_field = Vec::new();
    let mut t = String::new();
    let mut formula_totals = Vec::new();
    for &f in fields {
        let t0 = Instant::now();
        let formula = invariants::betti(&tree, f)?;
        r.timing(&format!("formula {}", field_name(f)), t0.elapsed());
        let mut entry = json!({
            "field": field_name(f),
            "totals": formula.totals(),
            "regularity": formula.regularity(),
        });
        if graded {
            entry["graded"] = graded_json(&formula);
        }
        let _ = writeln!(t, "{}: totals {}", field_name(f), totals_text(&formula.totals()));
        if graded {
            graded_text(&mut t, &formula, "  ");
        }
        if use_oracle {
            let t0 = Instant::now();
            let o = oracle::graded_betti_oracle(&s, f, None)?;
            r.timing(&format!("oracle {}", field_name(f)), t0.elapsed());
            let agree = o == formula;
            let mut oj = json!({"totals": o.totals(), "agree": agree});
            if graded {
                oj["graded"] = graded_json(&o);
            }
            if !agree {
                r.status = Status::Mismatch;
                let diff: Vec<Value> = o
                    .entries()
                    .chain(formula.entries())
                    .map(|(k, _)| k)
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .filter(|&(i, j)| o.get(i, j) != formula.get(i, j))
                    .map(|(i, j)| json!({"i": i, "j": j, "formula": formula.get(i, j), "oracle": o.get(i, j)}))
                    .collect();
                oj["diff"] = Value::Array(diff);
            }
            entry["oracle"] = oj;
            let _ = writeln!(
                t,
                "{}: oracle totals {} ({})",
                field_name(f),
                totals_text(&o.totals()),
                if agree { "formula and oracle agree" } else { "MISMATCH" }
            );
        }
        formula_totals.push(formula.totals());
        per_field.push(entry);
    }
    if formula_totals.windows(2).any(|w| w[0] != w[1]) {
        r.warnings.push("Betti numbers depend on the characteristic".into());
    }
    r.result = json!({
        "semigroup": s.gens(),
        "decomposable": tree.split().is_some(),
        "fields": per_field,
    });
    r.text = t;
    Ok(())
}

pub fn hilbert(gens: &[u64], expand: Option<u64>, field: Field, r: &mut Report) -> Result<()> {
    let s = normalized(gens, &mut r.warnings)?;
    let tree = gluing::decomposition_tree(&s, Strategy::First)?;
    let h = invariants::hilbert_numerator(&tree, field)?;
    let coeffs: Vec<Value> = h.numerator().iter().map(|(d, c)| json!([d, c])).collect();
    r.result = json!({
        "semigroup": s.gens(),
        "numerator": coeffs,
        "numerator_text": h.render_numerator(),
        "denominator": h.denominator(),
        "numerator_at_one": h.numerator_at_one(),
    });
    let mut t = String::new();
    let den: Vec<String> = h.denominator().iter().map(|c| format!("(1-t^{c})")).collect();
    let _ = writeln!(t, "H(t) = ({}) / {}", h.render_numerator(), den.join(""));
    if let Some(n) = expand {
        let series = h.expand(n);
        let indicator = oracle::hilbert_function_oracle(&s, n)?;
        let first_bad = series
            .iter()
            .zip(&indicator)
            .position(|(&a, &b)| a != b as i64);
        r.result["expansion"] = json!({
            "up_to": n,
            "coefficients": series,
            "matches_membership": first_bad.is_none(),
            "first_mismatch": first_bad,
        });
        match first_bad {
            None => {
                let _ = writeln!(t, "expansion up to t^{n} matches membership");
            }
            Some(d) => {
                r.status = Status::Mismatch;
                let _ = writeln!(t, "MISMATCH: coefficient of t^{d} disagrees with membership");
            }
        }
    }
    r.text = t;
    Ok(())
}

pub enum ExportFormat {
    Text,
    M2,
}

pub struct ResolutionOpts {
    pub verify: bool,
    pub prime: u64,
    pub trials: usize,
    pub export: Option<ExportFormat>,
    pub out: Option<std::path::PathBuf>,
    pub field: Field,
}

pub fn resolution(gens: &[u64], o: &ResolutionOpts, r: &mut Report) -> Result<()> {
    let s = normalized(gens, &mut r.warnings)?;
    let tree = gluing::decomposition_tree(&s, Strategy::First)?;
    let t0 = Instant::now();
    let f = complex::build_resolution(&s, &tree)?;
    r.timing("build", t0.elapsed());
    let table = f.betti_table();
    let formula = invariants::betti(&tree, o.field)?;
    let agree = table == formula;
    if !agree {
        r.status = Status::Mismatch;
    }
    let nnz: Vec<usize> = f.differentials().iter().map(|d| d.nnz()).collect();
    r.result = json!({
        "semigroup": s.gens(),
        "variables": f.ring().names(),
        "ranks": f.ranks(),
        "length": f.length(),
        "nonzero_entries": nnz,
        "graded": graded_json(&table),
        "matches_formula": agree,
        "dg_structure": f.dg().is_some(),
    });
    let mut t = String::new();
    let _ = writeln!(t, "resolution of k[{s}] over {}", f.ring().names().join(","));
    let ranks: Vec<u64> = f.ranks().iter().map(|&x| x as u64).collect();
    let _ = writeln!(t, "ranks {}", totals_text(&ranks));
    let _ = writeln!(
        t,
        "shifts {} the formula table",
        if agree { "match" } else { "DO NOT MATCH" }
    );
    if o.verify {
        let t0 = Instant::now();
        let rep = complex::verify_complex(&f)?;
        let ex = complex::verify_exactness_probabilistic(&f, o.prime, o.trials)?;
        r.timing("verify", t0.elapsed());
        if !rep.passed() || ex.status == ExactnessStatus::Fail {
            r.status = Status::Mismatch;
        }
        if ex.status == ExactnessStatus::Inconclusive {
            r.warnings.push(format!("exactness inconclusive: {}", ex.detail));
        }
        r.result["verification"] = json!({
            "d_squared": rep.count("d-squared") == 0,
            "homogeneous": rep.count("homogeneity") == 0,
            "minimal": rep.count("minimality") == 0,
            "violations": rep.violations,
            "exactness": ex,
        });
        let _ = writeln!(
            t,
            "d²=0 {}, homogeneous {}, minimal {}, exactness {:?} (GF({}), {} trials)",
            rep.count("d-squared") == 0,
            rep.count("homogeneity") == 0,
            rep.count("minimality") == 0,
            ex.status,
            ex.prime,
            ex.trials
        );
    }
    if let Some(fmt) = &o.export {
        let (name, body) = match fmt {
            ExportFormat::Text => ("text", complex::to_text(&f)),
            ExportFormat::M2 => ("m2", complex::to_macaulay2(&f)),
        };
        match &o.out {
            Some(p) => {
                std::fs::write(p, &body)
                    .map_err(|e| Error::Argument(format!("cannot write {}: {e}", p.display())))?;
                r.result["export"] = json!({"format": name, "path": p.display().to_string()});
                let _ = writeln!(t, "wrote {name} export to {}", p.display());
            }
            None => {
                r.result["export"] = json!({"format": name, "content": body});
                t.push_str(&body);
            }
        }
    }
    r.text = t;
    Ok(())
}

/// Parsed affine input: sections `A:`, `B:` (optional) and `rho:` (optional,
/// two exponent lines, first over A then over B).
#[derive(Debug, PartialEq)]
pub struct AffineInput {
    pub a: AffineSemigroup,
    pub b: Option<AffineSemigroup>,
    pub rho: Option<(Vec<u64>, Vec<u64>)>,
}

pub fn parse_affine(src: &str) -> Result<AffineInput> {
    let mut sections: Vec<(String, Vec<Vec<u64>>)> = Vec::new();
    for (no, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_suffix(':') {
            let name = name.trim().to_ascii_lowercase();
            if !matches!(name.as_str(), "a" | "b" | "rho") {
                return Err(Error::Argument(format!("line {}: unknown section {name:?}", no + 1)));
            }
            if sections.iter().any(|(n, _)| *n == name) {
                return Err(Error::Argument(format!("line {}: repeated section {name:?}", no + 1)));
            }
            sections.push((name, Vec::new()));
            continue;
        }
        let v = line
            .split_whitespace()
            .map(|t| t.parse::<u64>())
            .collect::<std::result::Result<Vec<u64>, _>>()
            .map_err(|_| Error::Argument(format!("line {}: expected non-negative integers", no + 1)))?;
        match sections.last_mut() {
            Some((_, rows)) => rows.push(v),
            None => return Err(Error::Argument(format!("line {}: vector outside a section", no + 1))),
        }
    }
    let take = |n: &str| sections.iter().find(|(s, _)| s == n).map(|(_, r)| r.clone());
    let a = AffineSemigroup::new(take("a").ok_or_else(|| Error::Argument("missing section A:".into()))?)?;
    let b = take("b").map(AffineSemigroup::new).transpose()?;
    let rho = match take("rho") {
        None => None,
        Some(rows) if rows.len() == 2 && b.is_some() => Some((rows[0].clone(), rows[1].clone())),
        Some(_) => {
            return Err(Error::Argument(
                "rho: needs sections A: and B: and exactly two exponent lines".into(),
            ))
        }
    };
    if let Some(b) = &b {
        if b.dim() != a.dim() {
            return Err(Error::Argument("A and B live in different dimensions".into()));
        }
    }
    Ok(AffineInput { a, b, rho })
}

/// Twice the coordinatewise sum of all generators.
pub fn default_bound(input: &AffineInput) -> Vec<u64> {
    let mut bound = vec![0u64; input.a.dim()];
    for g in input.a.gens().iter().chain(input.b.iter().flat_map(|b| b.gens())) {
        for (x, c) in bound.iter_mut().zip(g) {
            *x = x.saturating_add(c.saturating_mul(2));
        }
    }
    bound
}

#[derive(Clone, Copy)]
pub enum AffineCommand {
    Generators,
    Verify,
    Betti,
}

fn binomials_json(g: &[AffineBinomial], ln: &[String], rn: &[String]) -> Value {
    Value::Array(
        g.iter()
            .map(|b| {
                json!({
                    "multidegree": b.multidegree,
                    "binomial": b.render(ln, rn),
                    "left": b.left,
                    "right": b.right,
                })
            })
            .collect(),
    )
}

pub fn affine_cmd(
    input: &AffineInput,
    cmd: AffineCommand,
    bound: &[u64],
    field: Field,
    r: &mut Report,
) -> Result<()> {
    let xa = var_names("x", input.a.len());
    let yb = input.b.as_ref().map(|b| var_names("y", b.len())).unwrap_or_default();
    let mut xy = xa.clone();
    xy.extend(yb.iter().cloned());
    let mut t = String::new();
    r.result = json!({"bound": bound});
    match cmd {
        AffineCommand::Generators => {
            let mut parts = vec![("A", input.a.clone(), xa.clone())];
            if let Some(b) = &input.b {
                parts.push(("B", b.clone(), yb.clone()));
                parts.push(("C", input.a.union(b)?, xy.clone()));
            }
            for (name, s, names) in parts {
                let g = affine::affine_fiber_generators(&s, bound)?;
                r.result[name] = binomials_json(&g, &names, &names);
                let _ = writeln!(t, "{name} {s}: {} generators", g.len());
                for b in &g {
                    let _ = writeln!(t, "  {:?}  {}", b.multidegree, b.render(&names, &names));
                }
            }
        }
        AffineCommand::Verify => {
            let b = input
                .b
                .as_ref()
                .ok_or_else(|| Error::Argument("verify needs a B: section".into()))?;
            let rho = input.rho.as_ref().map(|(x, y)| (x.as_slice(), y.as_slice()));
            let rep = affine::affine_gluing_verify(&input.a, b, rho, bound)?;
            if rep.status == GluingStatus::Fail {
                r.status = Status::Mismatch;
            }
            let rho_text = rep.rho.as_ref().map(|b| b.render(&xa, &yb));
            r.result["rho"] = json!(rho_text);
            r.result["report"] = serde_json::to_value(&rep).expect("serializes");
            let _ = writeln!(
                t,
                "gluing {}: {:?} (ρ = {}, {})",
                if rep.rho_searched { "with searched ρ" } else { "with given ρ" },
                rep.status,
                rho_text.as_deref().unwrap_or("none"),
                rep.note
            );
            for m in &rep.mismatches {
                let _ = writeln!(t, "  {:?}: expected {}, found {}", m.multidegree, m.expected, m.found);
            }
        }
        AffineCommand::Betti => {
            let ta = affine::affine_betti_oracle(&input.a, bound, field)?;
            r.result["field"] = json!(field_name(field));
            r.result["A"] = json!({"totals": ta.totals(), "pd": ta.pd()});
            let _ = writeln!(t, "A: totals {} (pd {})", totals_text(&ta.totals()), ta.pd());
            if let Some(b) = &input.b {
                let tb = affine::affine_betti_oracle(b, bound, field)?;
                let p = affine::affine_betti_propagate(&ta.totals(), &tb.totals())?;
                r.result["B"] = json!({"totals": tb.totals(), "pd": tb.pd()});
                r.result["propagated"] = serde_json::to_value(&p).expect("serializes");
                let _ = writeln!(t, "B: totals {} (pd {})", totals_text(&tb.totals()), tb.pd());
                let _ = writeln!(t, "A ⊔ B if glued: totals {} (pd {})", totals_text(&p.totals), p.pd);
            }
        }
    }
    r.text = t;
    Ok(())
}
