//! DIMACS CNF serialization for SAT and the "x"-prefixed XOR-clause
//! extension for XORSAT. One-based signed literals, 0-terminated lines,
//! `c` comment lines, LF endings.

use thiserror::Error;

use super::{FactorGraph, Kind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing 'p cnf' header")]
    MissingHeader,
    #[error("line {line}: clause count mismatch: header says {want}, found {got}")]
    ClauseCountMismatch { line: usize, want: usize, got: usize },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

/// Serializes an instance. XOR clauses are written as `x ±v1 v2 ... 0` with
/// the parity carried by the sign of the first literal.
pub fn to_dimacs(g: &FactorGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("p cnf {} {}\n", g.n_vars(), g.n_clauses()));
    for a in 0..g.n_clauses() {
        match g.kind() {
            Kind::Sat => {
                for (j, &v) in g.clause_vars(a).iter().enumerate() {
                    let lit = (v as i64 + 1) * g.clause_signs(a)[j] as i64;
                    out.push_str(&format!("{lit} "));
                }
            }
            Kind::Xorsat => {
                out.push_str("x ");
                for (j, &v) in g.clause_vars(a).iter().enumerate() {
                    let sign = if j == 0 { g.parity(a) as i64 } else { 1 };
                    out.push_str(&format!("{} ", (v as i64 + 1) * sign));
                }
            }
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS text. The kind is inferred from the clause lines: any
/// `x`-prefixed line makes the instance XORSAT (mixing is rejected). XOR
/// parity is the product of the literal signs on the line.
pub fn parse_dimacs(text: &str) -> Result<FactorGraph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut sat_clauses: Vec<(Vec<u32>, Vec<i8>)> = Vec::new();
    let mut xor_clauses: Vec<(Vec<u32>, i8)> = Vec::new();
    let mut header_line = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line_no, "duplicate header"));
            }
            let mut it = line.split_ascii_whitespace();
            it.next();
            if it.next() != Some("cnf") {
                return Err(syntax(line_no, "header must be 'p cnf <vars> <clauses>'"));
            }
            let n: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| syntax(line_no, "bad variable count in header"))?;
            let m: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| syntax(line_no, "bad clause count in header"))?;
            if it.next().is_some() {
                return Err(syntax(line_no, "trailing tokens in header"));
            }
            header = Some((n, m));
            header_line = line_no;
            continue;
        }
        let Some((n_vars, _)) = header else {
            return Err(ParseError::MissingHeader);
        };
        let (is_xor, body) = match line.strip_prefix('x') {
            Some(rest) => (true, rest),
            None => (false, line),
        };
        let mut lits: Vec<i64> = Vec::new();
        let mut terminated = false;
        for tok in body.split_ascii_whitespace() {
            let v: i64 =
                tok.parse().map_err(|_| syntax(line_no, format!("bad literal '{tok}'")))?;
            if v == 0 {
                terminated = true;
                break;
            }
            lits.push(v);
        }
        if !terminated {
            return Err(syntax(line_no, "clause not 0-terminated"));
        }
        if lits.is_empty() {
            return Err(syntax(line_no, "empty clause"));
        }
        let mut vars = Vec::with_capacity(lits.len());
        for &l in &lits {
            let v = l.unsigned_abs();
            if v as usize > n_vars {
                return Err(syntax(line_no, format!("literal {l} out of range (n={n_vars})")));
            }
            let v = (v - 1) as u32;
            if vars.contains(&v) {
                return Err(syntax(line_no, format!("variable {} repeated in clause", v + 1)));
            }
            vars.push(v);
        }
        if is_xor {
            let parity: i8 = if lits.iter().filter(|&&l| l < 0).count() % 2 == 0 { 1 } else { -1 };
            xor_clauses.push((vars, parity));
        } else {
            let signs: Vec<i8> = lits.iter().map(|&l| if l < 0 { -1 } else { 1 }).collect();
            sat_clauses.push((vars, signs));
        }
    }

    let Some((n_vars, m)) = header else {
        return Err(ParseError::MissingHeader);
    };
    if !sat_clauses.is_empty() && !xor_clauses.is_empty() {
        return Err(syntax(header_line, "mixed plain and xor clauses are not supported"));
    }
    let got = sat_clauses.len() + xor_clauses.len();
    if got != m {
        return Err(ParseError::ClauseCountMismatch { line: header_line, want: m, got });
    }
    let arity_check = |lens: Vec<usize>| -> Result<usize, ParseError> {
        let k = lens.first().copied().unwrap_or(0);
        for (a, l) in lens.iter().enumerate() {
            if *l != k {
                return Err(syntax(0, format!("clause {a} has arity {l}, expected {k}")));
            }
        }
        Ok(k)
    };
    if xor_clauses.is_empty() && sat_clauses.is_empty() {
        // a formula with no clauses defaults to SAT with nominal arity
        return FactorGraph::new_sat(n_vars, n_vars.min(3).max(1), &[])
            .map_err(|e| syntax(header_line, e.to_string()));
    }
    if xor_clauses.is_empty() {
        let k = arity_check(sat_clauses.iter().map(|(v, _)| v.len()).collect())?;
        FactorGraph::new_sat(n_vars, k, &sat_clauses)
            .map_err(|e| syntax(header_line, e.to_string()))
    } else {
        let k = arity_check(xor_clauses.iter().map(|(v, _)| v.len()).collect())?;
        FactorGraph::new_xorsat(n_vars, k, &xor_clauses)
            .map_err(|e| syntax(header_line, e.to_string()))
    }
}
