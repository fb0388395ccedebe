//! Line-oriented text form of a chain, one cell per line:
//!
//! ```text
//! # chain d=2 k=1 ring=mod2
//! 1 | F 1/3 I 0/1 1/1
//! ```

use std::fmt::Write;

use super::{parse_rational, BoxCell, ChainError, Extent, RectChain, Ring};

pub fn dump_chain(c: &RectChain) -> String {
    let ring = match c.ring() {
        Ring::Mod2 => "mod2",
        Ring::Integer => "integer",
    };
    let mut out = format!("# chain d={} k={} ring={}\n", c.ambient_dim(), c.dim(), ring);
    for (cell, coef) in c.terms() {
        let _ = writeln!(out, "{coef} | {cell}");
    }
    out
}

pub fn parse_chain_dump(text: &str) -> Result<RectChain, ChainError> {
    let err = |line: usize, reason: &str| ChainError::Dump {
        line,
        reason: reason.to_string(),
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| err(1, "missing header"))?;
    let mut d = None;
    let mut k = None;
    let mut ring = None;
    for field in header.trim_start_matches('#').split_whitespace().skip(1) {
        match field.split_once('=') {
            Some(("d", v)) => d = v.parse::<usize>().ok(),
            Some(("k", v)) => k = v.parse::<usize>().ok(),
            Some(("ring", "mod2")) => ring = Some(Ring::Mod2),
            Some(("ring", "integer")) => ring = Some(Ring::Integer),
            _ => return Err(err(1, "bad header field")),
        }
    }
    let (Some(d), Some(k), Some(ring)) = (d, k, ring) else {
        return Err(err(1, "header needs d, k and ring"));
    };

    let mut terms = Vec::new();
    for (no, line) in lines {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (coef, spec) = line.split_once('|').ok_or_else(|| err(no, "missing '|'"))?;
        let coef: i64 = coef.trim().parse().map_err(|_| err(no, "bad coefficient"))?;
        let toks: Vec<&str> = spec.split_whitespace().collect();
        let mut extents = Vec::with_capacity(d);
        let mut i = 0;
        while i < toks.len() {
            let num = |j: usize| {
                toks.get(j)
                    .and_then(|t| parse_rational(t))
                    .ok_or_else(|| err(no, "bad rational"))
            };
            match toks[i] {
                "F" => {
                    extents.push(Extent::Fixed(num(i + 1)?));
                    i += 2;
                }
                "I" => {
                    extents.push(Extent::Interval(num(i + 1)?, num(i + 2)?));
                    i += 3;
                }
                _ => return Err(err(no, "axis spec must be 'F c' or 'I lo hi'")),
            }
        }
        let cell = BoxCell::new(extents).map_err(|e| err(no, &e.to_string()))?;
        terms.push((cell, coef));
    }
    RectChain::from_terms(d, k, ring, terms)
}
