//! Byte-stable text exports of free complexes.
//!
//! Canonical format:
//!
//! ```text
//! complex v1
//! ring x1:3 x2:5
//! F0: 0
//! F1: 15
//! d1 1x1
//! 0 0: 1*x1^5 - 1*x2^3
//! end
//! ```
//!
//! Only non-zero entries are listed, row-major; every coefficient and
//! exponent is explicit. Product tables are not exported.

use std::fmt::Write as _;

use super::{FreeComplex, Poly, PolyMatrix, WeightedRing};
use crate::error::{Error, Result};

pub fn to_text(f: &FreeComplex) -> String {
    let ring = f.ring();
    let mut out = String::from("complex v1\nring");
    for (n, w) in ring.names().iter().zip(ring.weights()) {
        let _ = write!(out, " {n}:{w}");
    }
    out.push('\n');
    for (i, s) in f.shifts().iter().enumerate() {
        let _ = write!(out, "F{i}:");
        for j in s {
            let _ = write!(out, " {j}");
        }
        out.push('\n');
    }
    for i in 1..=f.length() {
        let d = f.d(i);
        let _ = writeln!(out, "d{i} {}x{}", d.rows(), d.cols());
        for ((r, c), p) in d.iter() {
            let _ = writeln!(out, "{r} {c}: {}", p.render_explicit(ring.names()));
        }
    }
    out.push_str("end\n");
    out
}

pub fn from_text(s: &str) -> Result<FreeComplex> {
    let bad = |line: usize, what: &str| Error::arg(format!("complex text line {line}: {what}"));
    let mut lines = s
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, "complex v1")) => {}
        Some((n, _)) => return Err(bad(n, "expected header `complex v1`")),
        None => return Err(Error::arg("empty complex text")),
    }
    let (n, ring_line) = lines.next().ok_or_else(|| Error::arg("missing ring line"))?;
    let rest = ring_line
        .strip_prefix("ring")
        .ok_or_else(|| bad(n, "expected `ring`"))?;
    let mut names = Vec::new();
    let mut weights = Vec::new();
    for tok in rest.split_whitespace() {
        let (name, w) = tok.split_once(':').ok_or_else(|| bad(n, "expected name:weight"))?;
        names.push(name.to_string());
        weights.push(w.parse::<u64>().map_err(|_| bad(n, "bad weight"))?);
    }
    let ring = WeightedRing::new(names, weights)?;

    let mut shifts: Vec<Vec<u64>> = Vec::new();
    let mut diffs: Vec<PolyMatrix> = Vec::new();
    let mut ended = false;
    for (n, line) in lines {
        if ended {
            return Err(bad(n, "content after `end`"));
        }
        if line == "end" {
            ended = true;
        } else if let Some(body) = line.strip_prefix('F') {
            let (idx, vals) = body.split_once(':').ok_or_else(|| bad(n, "expected `Fi:`"))?;
            if idx.parse::<usize>().ok() != Some(shifts.len()) || !diffs.is_empty() {
                return Err(bad(n, "modules must be listed in order before differentials"));
            }
            shifts.push(
                vals.split_whitespace()
                    .map(|v| v.parse().map_err(|_| bad(n, "bad shift")))
                    .collect::<Result<_>>()?,
            );
        } else if let Some(body) = line.strip_prefix('d') {
            let (idx, shape) = body.split_once(' ').ok_or_else(|| bad(n, "expected `di RxC`"))?;
            if idx.parse::<usize>().ok() != Some(diffs.len() + 1) {
                return Err(bad(n, "differentials must be numbered consecutively"));
            }
            let (r, c) = shape.split_once('x').ok_or_else(|| bad(n, "expected RxC"))?;
            let r = r.parse().map_err(|_| bad(n, "bad row count"))?;
            let c = c.parse().map_err(|_| bad(n, "bad column count"))?;
            diffs.push(PolyMatrix::new(r, c));
        } else {
            let d = diffs.last_mut().ok_or_else(|| bad(n, "entry before any differential"))?;
            let (pos, poly) = line.split_once(':').ok_or_else(|| bad(n, "expected `r c: poly`"))?;
            let mut it = pos.split_whitespace().map(|v| v.parse::<usize>());
            let (Some(Ok(r)), Some(Ok(c)), None) = (it.next(), it.next(), it.next()) else {
                return Err(bad(n, "expected two indices"));
            };
            if r >= d.rows() || c >= d.cols() {
                return Err(bad(n, "entry outside the matrix"));
            }
            d.set(r, c, Poly::parse(poly, ring.names())?);
        }
    }
    if !ended {
        return Err(Error::arg("complex text is missing `end`"));
    }
    FreeComplex::new(ring, shifts, diffs)
}

/// A Macaulay2 script rebuilding the ring and maps and checking `d² = 0`,
/// homogeneity, and the Betti table.
pub fn to_macaulay2(f: &FreeComplex) -> String {
    let ring = f.ring();
    let names = ring.names();
    let mut out = String::from("-- free complex exported by glulib\n");
    let degs: Vec<String> = ring.weights().iter().map(|w| format!("{{{w}}}")).collect();
    let _ = writeln!(out, "R = QQ[{}, Degrees => {{{}}}];", names.join(","), degs.join(","));
    let module = |s: &[u64]| -> String {
        let parts: Vec<String> = s.iter().map(|j| format!("{{-{j}}}")).collect();
        format!("R^{{{}}}", parts.join(","))
    };
    for i in 1..=f.length() {
        let d = f.d(i);
        let rows: Vec<String> = (0..d.rows())
            .map(|r| {
                let cells: Vec<String> = (0..d.cols())
                    .map(|c| d.get(r, c).map_or("0".into(), |p| p.render(names)))
                    .collect();
                format!("{{{}}}", cells.join(","))
            })
            .collect();
        let _ = writeln!(
            out,
            "d{i} = map({}, {}, {{{}}});",
            module(&f.shifts()[i - 1]),
            module(&f.shifts()[i]),
            rows.join(",")
        );
        let _ = writeln!(out, "assert isHomogeneous d{i};");
    }
    for i in 1..f.length() {
        let _ = writeln!(out, "assert(d{i} * d{} == 0);", i + 1);
    }
    if f.length() > 0 {
        let maps: Vec<String> = (1..=f.length()).map(|i| format!("d{i}")).collect();
        let _ = writeln!(out, "C = chainComplex({});", maps.join(","));
        out.push_str("print betti C;\n");
    }
    out
}
