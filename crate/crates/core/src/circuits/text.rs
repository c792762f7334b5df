//! Line-oriented circuit format.
//!
//! ```text
//! # comment
//! QUBITS 2
//! H 0
//! CNOT 0 1
//! RY 1 1.234
//! DEPOL 0 0.01
//! GDEPOL 0.2
//! MIX
//! BRANCH 0.5
//! X 0
//! BRANCH 0.5
//! END
//! ```
//!
//! Angles are radians. Floats are written in Rust's shortest round-trip form,
//! so `parse(write(c)) == c` exactly.

use std::fmt::Write as _;

use super::{Channel, Circuit, Gate, Op};
use crate::error::{MagicError, Result};

pub fn write_circuit(circ: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "QUBITS {}", circ.num_qubits()).unwrap();
    write_ops(&mut out, circ.ops());
    out
}

fn write_ops(out: &mut String, ops: &[Op]) {
    for op in ops {
        match op {
            Op::Gate(g) => {
                let line = match *g {
                    Gate::H(q) => format!("H {q}"),
                    Gate::S(q) => format!("S {q}"),
                    Gate::X(q) => format!("X {q}"),
                    Gate::Y(q) => format!("Y {q}"),
                    Gate::Z(q) => format!("Z {q}"),
                    Gate::T(q) => format!("T {q}"),
                    Gate::Cnot(c, t) => format!("CNOT {c} {t}"),
                    Gate::Ry(q, th) => format!("RY {q} {th}"),
                    Gate::Rz(q, th) => format!("RZ {q} {th}"),
                };
                out.push_str(&line);
                out.push('\n');
            }
            Op::Channel(Channel::GlobalDepolarize(p)) => writeln!(out, "GDEPOL {p}").unwrap(),
            Op::Channel(Channel::LocalDepolarize { qubit, p }) => {
                writeln!(out, "DEPOL {qubit} {p}").unwrap()
            }
            Op::Channel(Channel::MixedClifford(branches)) => {
                out.push_str("MIX\n");
                for (p, c) in branches {
                    writeln!(out, "BRANCH {p}").unwrap();
                    write_ops(out, c.ops());
                }
                out.push_str("END\n");
            }
        }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: line[..s].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: line[..s].chars().count() + 1 });
    }
    out
}

struct Parser {
    line: usize,
}

impl Parser {
    fn err(&self, column: usize, message: impl Into<String>) -> MagicError {
        MagicError::Parse { line: self.line, column, message: message.into() }
    }

    fn arity(&self, toks: &[Token], want: usize) -> Result<()> {
        if toks.len() != want + 1 {
            let col = toks.get(want + 1).map_or(toks[0].column, |t| t.column);
            return Err(self.err(
                col,
                format!("{} takes {want} argument(s), got {}", toks[0].text, toks.len() - 1),
            ));
        }
        Ok(())
    }

    fn index(&self, t: &Token) -> Result<usize> {
        t.text
            .parse()
            .map_err(|_| self.err(t.column, format!("expected qubit index, found {:?}", t.text)))
    }

    fn float(&self, t: &Token) -> Result<f64> {
        t.text
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err(t.column, format!("expected number, found {:?}", t.text)))
    }

    fn locate(&self, column: usize, r: Result<()>) -> Result<()> {
        r.map_err(|e| match e {
            MagicError::Parse { .. } => e,
            other => self.err(column, other.to_string()),
        })
    }
}

/// Parse the text format. Errors carry 1-based line and column.
pub fn parse_circuit(src: &str) -> Result<Circuit> {
    let mut p = Parser { line: 0 };
    let mut circ: Option<Circuit> = None;
    // open MIX block: finished branches plus the branch being filled
    let mut mix: Option<(usize, Vec<(f64, Circuit)>)> = None;
    for (i, raw) in src.lines().enumerate() {
        p.line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        if toks.is_empty() {
            continue;
        }
        let head = toks[0].text.to_ascii_uppercase();
        let col = toks[0].column;
        if head == "QUBITS" {
            p.arity(&toks, 1)?;
            if circ.is_some() {
                return Err(p.err(col, "duplicate QUBITS line"));
            }
            circ = Some(Circuit::new(p.index(&toks[1])?));
            continue;
        }
        let Some(c) = circ.as_mut() else {
            return Err(p.err(col, "circuit must start with QUBITS <n>"));
        };
        let n = c.num_qubits();
        match head.as_str() {
            "MIX" => {
                p.arity(&toks, 0)?;
                if mix.is_some() {
                    return Err(p.err(col, "nested MIX block"));
                }
                mix = Some((p.line, Vec::new()));
            }
            "BRANCH" => {
                p.arity(&toks, 1)?;
                let prob = p.float(&toks[1])?;
                let Some((_, branches)) = mix.as_mut() else {
                    return Err(p.err(col, "BRANCH outside MIX block"));
                };
                branches.push((prob, Circuit::new(n)));
            }
            "END" => {
                p.arity(&toks, 0)?;
                let Some((_, branches)) = mix.take() else {
                    return Err(p.err(col, "END without MIX"));
                };
                p.locate(col, c.mixed_clifford(branches).map(|_| ()))?;
            }
            _ => {
                let op = parse_op(&p, &head, &toks)?;
                let target = match mix.as_mut() {
                    Some((_, branches)) => match branches.last_mut() {
                        Some((_, b)) => b,
                        None => return Err(p.err(col, "op inside MIX before first BRANCH")),
                    },
                    None => c,
                };
                p.locate(col, target.push(op).map(|_| ()))?;
            }
        }
    }
    if let Some((line, _)) = mix {
        return Err(MagicError::Parse { line, column: 1, message: "MIX block without END".into() });
    }
    circ.ok_or_else(|| MagicError::Parse {
        line: p.line.max(1),
        column: 1,
        message: "missing QUBITS line".into(),
    })
}

fn parse_op(p: &Parser, head: &str, toks: &[Token]) -> Result<Op> {
    let one = |make: fn(usize) -> Gate| -> Result<Op> {
        p.arity(toks, 1)?;
        Ok(Op::Gate(make(p.index(&toks[1])?)))
    };
    let rot = |make: fn(usize, f64) -> Gate| -> Result<Op> {
        p.arity(toks, 2)?;
        Ok(Op::Gate(make(p.index(&toks[1])?, p.float(&toks[2])?)))
    };
    match head {
        "H" => one(Gate::H),
        "S" => one(Gate::S),
        "X" => one(Gate::X),
        "Y" => one(Gate::Y),
        "Z" => one(Gate::Z),
        "T" => one(Gate::T),
        "RY" => rot(Gate::Ry),
        "RZ" => rot(Gate::Rz),
        "CNOT" | "CX" => {
            p.arity(toks, 2)?;
            Ok(Op::Gate(Gate::Cnot(p.index(&toks[1])?, p.index(&toks[2])?)))
        }
        "DEPOL" => {
            p.arity(toks, 2)?;
            Ok(Op::Channel(Channel::LocalDepolarize {
                qubit: p.index(&toks[1])?,
                p: p.float(&toks[2])?,
            }))
        }
        "GDEPOL" => {
            p.arity(toks, 1)?;
            Ok(Op::Channel(Channel::GlobalDepolarize(p.float(&toks[1])?)))
        }
        _ => Err(p.err(toks[0].column, format!("unknown op {:?}", toks[0].text))),
    }
}
