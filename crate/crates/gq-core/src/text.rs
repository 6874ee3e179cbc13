//! Text formats (UTF-8, LF).
//!
//! ```text
//! rel <m> <k>      fun <n> <k>      mon <k>
//! 0 0              0 1 2            0 0 0
//! 0 1                               0 1 2
//! ```
//!
//! A relation lists one tuple per line, space separated; canonical output is
//! sorted ascending by tuple code. An operation lists its `k^n` table entries
//! in mixed-radix order across one or more lines. A monoid lists one unary
//! table per line, sorted. Relation sets are relation blocks separated by
//! blank lines.

use crate::error::{Error, Result};
use crate::monoid::Monoid;
use crate::op::OpTable;
use crate::relation::Relation;
use crate::universe::Universe;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Object {
    Rel(Relation),
    Fun(OpTable),
    Mon(Monoid),
}

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.into(),
    })
}

fn parse_usize(line: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::Parse {
            line,
            msg: format!("invalid {what} `{tok}`"),
        })
}

fn parse_digit(line: usize, tok: &str, k: usize) -> Result<u8> {
    let v = parse_usize(line, tok, "element")?;
    if v >= k {
        return parse_err(line, format!("element {v} out of range for {k} elements"));
    }
    Ok(v as u8)
}

struct Header<'a> {
    kind: &'a str,
    nums: Vec<usize>,
}

fn parse_header(text: &str) -> Result<(Header<'_>, Vec<(usize, &str)>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (lineno, header) = match lines.next() {
        Some(h) => h,
        None => return parse_err(1, "empty input"),
    };
    let mut toks = header.split_whitespace();
    let kind = toks.next().unwrap_or("");
    let mut nums = Vec::new();
    for t in toks {
        nums.push(parse_usize(lineno, t, "header number")?);
    }
    if !matches!(kind, "rel" | "fun" | "mon") {
        return parse_err(lineno, format!("unknown header `{kind}`"));
    }
    Ok((Header { kind, nums }, lines.collect()))
}

pub fn parse(text: &str) -> Result<Object> {
    let (header, _) = parse_header(text)?;
    match header.kind {
        "rel" => parse_relation(text).map(Object::Rel),
        "fun" => parse_op(text).map(Object::Fun),
        "mon" => parse_monoid(text).map(Object::Mon),
        _ => unreachable!(),
    }
}

pub fn parse_relation(text: &str) -> Result<Relation> {
    let (header, body) = parse_header(text)?;
    if header.kind != "rel" || header.nums.len() != 2 {
        return parse_err(1, "expected header `rel <m> <k>`");
    }
    let (m, k) = (header.nums[0], header.nums[1]);
    let universe = Universe::new(k).map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    let mut tuples: Vec<Vec<u8>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (lineno, line) in body {
        let mut tuple = Vec::with_capacity(m);
        for tok in line.split_whitespace() {
            tuple.push(parse_digit(lineno, tok, k)?);
        }
        if tuple.len() != m {
            return parse_err(lineno, format!("expected {m} coordinates, got {}", tuple.len()));
        }
        if !seen.insert(tuple.clone()) {
            return parse_err(lineno, format!("duplicate tuple {tuple:?}"));
        }
        tuples.push(tuple);
    }
    Relation::new(universe, m, &tuples).map_err(|e| match e {
        Error::Arg(msg) => Error::Parse { line: 1, msg },
        other => other,
    })
}

pub fn parse_op(text: &str) -> Result<OpTable> {
    let (header, body) = parse_header(text)?;
    if header.kind != "fun" || header.nums.len() != 2 {
        return parse_err(1, "expected header `fun <n> <k>`");
    }
    let (n, k) = (header.nums[0], header.nums[1]);
    let universe = Universe::new(k).map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    let mut table = Vec::new();
    let mut last_line = 1;
    for (lineno, line) in body {
        last_line = lineno;
        for tok in line.split_whitespace() {
            table.push(parse_digit(lineno, tok, k)?);
        }
    }
    OpTable::new(universe, n, table).map_err(|e| match e {
        Error::Arg(msg) => Error::Parse {
            line: last_line,
            msg,
        },
        other => other,
    })
}

pub fn parse_monoid(text: &str) -> Result<Monoid> {
    let (header, body) = parse_header(text)?;
    if header.kind != "mon" || header.nums.len() != 1 {
        return parse_err(1, "expected header `mon <k>`");
    }
    let k = header.nums[0];
    let universe = Universe::new(k).map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    let mut members = Vec::new();
    for (lineno, line) in body {
        let mut table = Vec::with_capacity(k);
        for tok in line.split_whitespace() {
            table.push(parse_digit(lineno, tok, k)?);
        }
        if table.len() != k {
            return parse_err(
                lineno,
                format!("expected a table of {k} entries, got {}", table.len()),
            );
        }
        members.push(OpTable::new(universe, 1, table).map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?);
    }
    Monoid::new(universe, members).map_err(|e| match e {
        Error::Arg(msg) => Error::Parse { line: 1, msg },
        other => other,
    })
}

/// Relation blocks separated by one or more blank lines.
pub fn parse_relation_set(text: &str) -> Result<Vec<Relation>> {
    let mut out = Vec::new();
    let mut block = String::new();
    let flush = |block: &mut String, out: &mut Vec<Relation>| -> Result<()> {
        if !block.trim().is_empty() {
            out.push(parse_relation(block)?);
        }
        block.clear();
        Ok(())
    };
    for line in text.lines() {
        if line.trim().is_empty() {
            flush(&mut block, &mut out)?;
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    flush(&mut block, &mut out)?;
    Ok(out)
}

pub fn serialize_relation(rel: &Relation) -> String {
    let mut s = format!("rel {} {}\n", rel.arity(), rel.universe().size());
    for t in rel.tuples() {
        s.push_str(&join(&t));
        s.push('\n');
    }
    s
}

pub fn serialize_op(f: &OpTable) -> String {
    let k = f.universe().size();
    let mut s = format!("fun {} {}\n", f.arity(), k);
    if f.arity() == 1 {
        s.push_str(&join(f.table()));
        s.push('\n');
    } else {
        for chunk in f.table().chunks(k) {
            s.push_str(&join(chunk));
            s.push('\n');
        }
    }
    s
}

pub fn serialize_monoid(m: &Monoid) -> String {
    let mut s = format!("mon {}\n", m.universe().size());
    for f in m.members() {
        s.push_str(&join(f.table()));
        s.push('\n');
    }
    s
}

pub fn serialize(obj: &Object) -> String {
    match obj {
        Object::Rel(r) => serialize_relation(r),
        Object::Fun(f) => serialize_op(f),
        Object::Mon(m) => serialize_monoid(m),
    }
}

pub fn serialize_relation_set(rels: &[Relation]) -> String {
    rels.iter()
        .map(serialize_relation)
        .collect::<Vec<_>>()
        .join("\n")
}

fn join(xs: &[u8]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
