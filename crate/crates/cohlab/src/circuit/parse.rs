//! Line-oriented circuit text format.
//!
//! ```text
//! # comment
//! qubits 2
//! cbits 1
//! gate CNOT 0 1
//! cgate S 0 ctrl 1 when 1
//! measure 1 -> 0
//! gate S 0 if 0==1
//! ```
//!
//! Gate names are the fixed table in [`super::gates`] plus 4x4 literals
//! `U4:<16 comma-separated complex entries>`. Wire indices are zero-based;
//! one op per line; `#` starts a comment.

use super::{Circuit, CircuitOp, ControlledApp, GateApp};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use std::collections::BTreeSet;

struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>, // (column, token)
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut tokens = Vec::new();
        let mut col = 0usize;
        for piece in body.split_whitespace() {
            let at = body[col..].find(piece).map(|p| p + col).unwrap_or(col);
            tokens.push((at + 1, piece));
            col = at + piece.len();
        }
        if !tokens.is_empty() {
            lines.push(Line { number: idx + 1, tokens });
        }
    }
    lines
}

/// Parse circuit source text. Errors carry a 1-based line and column.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let lines = tokenize(text);
    let mut iter = lines.iter();

    let header = iter
        .next()
        .ok_or_else(|| err(1, 1, "empty circuit: expected `qubits <n>`"))?;
    let qubits = parse_header(header, "qubits")?;

    let mut rest: Vec<&Line> = iter.collect();
    let mut cbits = None;
    if let Some(first) = rest.first() {
        if first.tokens[0].1 == "cbits" {
            cbits = Some(parse_header(first, "cbits")?);
            rest.remove(0);
        }
    }

    let mut ops: Vec<(usize, usize, CircuitOp)> = Vec::new();
    let mut max_cbit: Option<usize> = None;
    for line in rest {
        let (col0, keyword) = line.tokens[0];
        let op = match keyword {
            "gate" => parse_gate_line(line)?,
            "cgate" => parse_cgate_line(line)?,
            "measure" => parse_measure_line(line)?,
            other => {
                return Err(err(line.number, col0, format!("unknown statement `{other}`")))
            }
        };
        match &op {
            CircuitOp::Measure { cbit, .. } | CircuitOp::Conditioned { cbit, .. } => {
                max_cbit = Some(max_cbit.map_or(*cbit, |m: usize| m.max(*cbit)));
            }
            _ => {}
        }
        ops.push((line.number, col0, op));
    }

    let cbits = cbits.unwrap_or(max_cbit.map_or(0, |m| m + 1));
    let mut circuit = Circuit::new(qubits, cbits);
    for (line, col, op) in ops {
        circuit
            .push(op)
            .map_err(|e| err(line, col, e.to_string()))?;
    }
    Ok(circuit)
}

fn parse_header(line: &Line, keyword: &str) -> Result<usize> {
    let (col0, word) = line.tokens[0];
    if word != keyword {
        return Err(err(line.number, col0, format!("expected `{keyword} <n>`")));
    }
    let (col1, value) = *line
        .tokens
        .get(1)
        .ok_or_else(|| err(line.number, col0, format!("`{keyword}` needs a count")))?;
    if line.tokens.len() > 2 {
        return Err(err(line.number, line.tokens[2].0, "trailing tokens"));
    }
    value
        .parse::<usize>()
        .map_err(|_| err(line.number, col1, format!("invalid count `{value}`")))
}

fn parse_index(line: &Line, pos: usize, what: &str) -> Result<usize> {
    let (col, tok) = *line
        .tokens
        .get(pos)
        .ok_or_else(|| err(line.number, 1, format!("missing {what}")))?;
    tok.parse::<usize>()
        .map_err(|_| err(line.number, col, format!("invalid {what} `{tok}`")))
}

fn parse_gate_app(line: &Line, name_pos: usize, targets: Vec<usize>) -> Result<GateApp> {
    let (col, name) = line.tokens[name_pos];
    if let Some(matrix) = parse_u4_literal(name, line.number, col)? {
        return GateApp::custom("U4", matrix, targets)
            .map_err(|e| err(line.number, col, e.to_string()));
    }
    let arity = super::gates::gate_arity(name)
        .ok_or_else(|| err(line.number, col, format!("unknown gate name `{name}`")))?;
    if targets.len() != arity {
        return Err(err(
            line.number,
            col,
            format!("gate {name} takes {arity} wire(s), got {}", targets.len()),
        ));
    }
    GateApp::named(name, targets).map_err(|e| err(line.number, col, e.to_string()))
}

/// `gate NAME q...` or `gate NAME q... if c==v`
fn parse_gate_line(line: &Line) -> Result<CircuitOp> {
    let if_pos = line.tokens.iter().position(|&(_, t)| t == "if");
    let end = if_pos.unwrap_or(line.tokens.len());
    if end < 3 {
        return Err(err(line.number, line.tokens[0].0, "gate needs a name and wires"));
    }
    let targets: Vec<usize> = (2..end)
        .map(|p| parse_index(line, p, "wire index"))
        .collect::<Result<_>>()?;
    let gate = parse_gate_app(line, 1, targets)?;
    match if_pos {
        None => Ok(CircuitOp::Gate(gate)),
        Some(p) => {
            let (ccol, cond) = *line
                .tokens
                .get(p + 1)
                .ok_or_else(|| err(line.number, line.tokens[p].0, "missing condition"))?;
            if line.tokens.len() > p + 2 {
                return Err(err(line.number, line.tokens[p + 2].0, "trailing tokens"));
            }
            let (cbit_str, val_str) = cond
                .split_once("==")
                .ok_or_else(|| err(line.number, ccol, "condition must be `<c>==<0|1>`"))?;
            let cbit = cbit_str
                .parse::<usize>()
                .map_err(|_| err(line.number, ccol, format!("invalid classical bit `{cbit_str}`")))?;
            let value = match val_str {
                "0" => 0u8,
                "1" => 1u8,
                _ => return Err(err(line.number, ccol, "condition value must be 0 or 1")),
            };
            Ok(CircuitOp::Conditioned { gate, cbit, value })
        }
    }
}

/// `cgate NAME targets... ctrl q... when b[,b...]`
fn parse_cgate_line(line: &Line) -> Result<CircuitOp> {
    let ctrl_pos = line
        .tokens
        .iter()
        .position(|&(_, t)| t == "ctrl")
        .ok_or_else(|| err(line.number, line.tokens[0].0, "cgate needs a `ctrl` section"))?;
    let when_pos = line
        .tokens
        .iter()
        .position(|&(_, t)| t == "when")
        .ok_or_else(|| err(line.number, line.tokens[0].0, "cgate needs a `when` section"))?;
    if !(2 < ctrl_pos && ctrl_pos < when_pos && when_pos == line.tokens.len() - 2) {
        return Err(err(
            line.number,
            line.tokens[0].0,
            "expected `cgate NAME targets... ctrl q... when bits[,bits...]`",
        ));
    }
    let targets: Vec<usize> = (2..ctrl_pos)
        .map(|p| parse_index(line, p, "target wire"))
        .collect::<Result<_>>()?;
    let controls: Vec<usize> = (ctrl_pos + 1..when_pos)
        .map(|p| parse_index(line, p, "control wire"))
        .collect::<Result<_>>()?;
    if controls.is_empty() {
        return Err(err(line.number, line.tokens[ctrl_pos].0, "cgate needs control wires"));
    }
    let gate = parse_gate_app(line, 1, targets)?;
    let (wcol, when_str) = line.tokens[when_pos + 1];
    let mut triggers = BTreeSet::new();
    for bits in when_str.split(',') {
        if bits.len() != controls.len() || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(err(
                line.number,
                wcol,
                format!("trigger `{bits}` must be {} bits of 0/1", controls.len()),
            ));
        }
        triggers.insert(u64::from_str_radix(bits, 2).expect("validated"));
    }
    Ok(CircuitOp::Controlled(ControlledApp { gate, controls, triggers }))
}

/// `measure q -> c`
fn parse_measure_line(line: &Line) -> Result<CircuitOp> {
    if line.tokens.len() != 4 || line.tokens[2].1 != "->" {
        return Err(err(line.number, line.tokens[0].0, "expected `measure <q> -> <c>`"));
    }
    let qubit = parse_index(line, 1, "wire index")?;
    let cbit = parse_index(line, 3, "classical bit")?;
    Ok(CircuitOp::Measure { qubit, cbit })
}

fn parse_u4_literal(name: &str, line: usize, col: usize) -> Result<Option<ComplexMatrix>> {
    let Some(body) = name.strip_prefix("U4:") else {
        return Ok(None);
    };
    let parts: Vec<&str> = body.split(',').collect();
    if parts.len() != 16 {
        return Err(err(line, col, format!("U4 literal needs 16 entries, got {}", parts.len())));
    }
    let entries: Vec<C64> = parts
        .iter()
        .map(|p| parse_complex(p).ok_or_else(|| err(line, col, format!("bad complex literal `{p}`"))))
        .collect::<Result<_>>()?;
    let m = ComplexMatrix::new(4, 4, entries).map_err(|e| err(line, col, e.to_string()))?;
    Ok(Some(m))
}

/// Complex literals: `1`, `-0.5`, `2i`, `-i`, `1+2i`, `0.5-0.5i`.
pub fn parse_complex(s: &str) -> Option<C64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some(im_part) = s.strip_suffix(['i', 'j']) {
        // find the split between real and imaginary terms, skipping a leading sign
        // and exponent signs.
        let bytes = im_part.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let b = bytes[i];
            if (b == b'+' || b == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E' {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = im_part[..i].parse().ok()?;
                let im_str = &im_part[i..];
                let im: f64 = match im_str {
                    "+" => 1.0,
                    "-" => -1.0,
                    _ => im_str.parse().ok()?,
                };
                Some(C64::new(re, im))
            }
            None => {
                let im: f64 = match im_part {
                    "" => 1.0,
                    "-" => -1.0,
                    "+" => 1.0,
                    _ => im_part.parse().ok()?,
                };
                Some(C64::new(0.0, im))
            }
        }
    } else {
        s.parse::<f64>().ok().map(|re| C64::new(re, 0.0))
    }
}

fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl Circuit {
    /// Serialize back to the text format. Fails when an op carries a custom
    /// matrix the grammar cannot express.
    pub fn to_text(&self) -> Result<String> {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "qubits {}", self.qubits()).unwrap();
        if self.cbits() > 0 {
            writeln!(out, "cbits {}", self.cbits()).unwrap();
        }
        let gate_name = |g: &GateApp| -> Result<String> {
            if super::gates::gate_arity(&g.name).is_some() {
                return Ok(g.name.clone());
            }
            if g.targets.len() == 2 {
                let entries: Vec<String> =
                    g.matrix.entries().iter().map(|&z| format_complex(z)).collect();
                return Ok(format!("U4:{}", entries.join(",")));
            }
            Err(Error::Circuit(format!(
                "gate `{}` is not expressible in the text format",
                g.name
            )))
        };
        let wire_list =
            |ws: &[usize]| ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ");
        for op in self.ops() {
            match op {
                CircuitOp::Gate(g) => {
                    writeln!(out, "gate {} {}", gate_name(g)?, wire_list(&g.targets)).unwrap();
                }
                CircuitOp::Conditioned { gate, cbit, value } => {
                    writeln!(
                        out,
                        "gate {} {} if {}=={}",
                        gate_name(gate)?,
                        wire_list(&gate.targets),
                        cbit,
                        value
                    )
                    .unwrap();
                }
                CircuitOp::Controlled(capp) => {
                    let width = capp.controls.len();
                    let triggers: Vec<String> = capp
                        .triggers
                        .iter()
                        .map(|t| format!("{t:0width$b}"))
                        .collect();
                    writeln!(
                        out,
                        "cgate {} {} ctrl {} when {}",
                        gate_name(&capp.gate)?,
                        wire_list(&capp.gate.targets),
                        wire_list(&capp.controls),
                        triggers.join(",")
                    )
                    .unwrap();
                }
                CircuitOp::Measure { qubit, cbit } => {
                    writeln!(out, "measure {qubit} -> {cbit}").unwrap();
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_circuit() {
        let c = parse_circuit("qubits 1\ngate H 0\n").unwrap();
        assert_eq!(c.qubits(), 1);
        assert_eq!(c.ops().len(), 1);
        assert!(matches!(&c.ops()[0], CircuitOp::Gate(g) if g.name == "H"));
    }

    #[test]
    fn adaptive_circuit_with_comments() {
        let src = "# magic-state style wiring\nqubits 2\ncbits 1\ngate CNOT 0 1\nmeasure 1 -> 0\ngate S 0 if 0==1\n";
        let c = parse_circuit(src).unwrap();
        assert_eq!(c.cbits(), 1);
        assert_eq!(c.ops().len(), 3);
        assert!(matches!(&c.ops()[2], CircuitOp::Conditioned { cbit: 0, value: 1, .. }));
    }

    #[test]
    fn wire_out_of_range() {
        let e = parse_circuit("qubits 2\ngate H 5\n").unwrap_err();
        match e {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn condition_on_unwritten_bit() {
        let e = parse_circuit("qubits 1\ncbits 1\ngate X 0 if 0==1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(e.to_string().contains("unwritten"));
    }

    #[test]
    fn unknown_gate_name() {
        let e = parse_circuit("qubits 1\ngate Q 0\n").unwrap_err();
        assert!(e.to_string().contains("unknown gate name"));
    }

    #[test]
    fn cgate_parses_with_trigger_set() {
        let src = "qubits 3\ncgate X 2 ctrl 0 1 when 01,10\n";
        let c = parse_circuit(src).unwrap();
        match &c.ops()[0] {
            CircuitOp::Controlled(capp) => {
                assert_eq!(capp.controls, vec![0, 1]);
                assert_eq!(capp.gate.targets, vec![2]);
                let t: Vec<u64> = capp.triggers.iter().copied().collect();
                assert_eq!(t, vec![1, 2]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn u4_literal_roundtrip() {
        let src = "qubits 2\ngate U4:1,0,0,0,0,1,0,0,0,0,0,1,0,0,1,0 0 1\n";
        let c = parse_circuit(src).unwrap();
        let text = c.to_text().unwrap();
        let c2 = parse_circuit(&text).unwrap();
        match (&c.ops()[0], &c2.ops()[0]) {
            (CircuitOp::Gate(a), CircuitOp::Gate(b)) => {
                assert!(a.matrix.max_abs_diff(&b.matrix) < 1e-15);
            }
            _ => panic!("expected plain gates"),
        }
    }

    #[test]
    fn complex_literal_forms() {
        assert_eq!(parse_complex("1").unwrap(), C64::new(1.0, 0.0));
        assert_eq!(parse_complex("-0.5").unwrap(), C64::new(-0.5, 0.0));
        assert_eq!(parse_complex("i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(parse_complex("0.5-0.5i").unwrap(), C64::new(0.5, -0.5));
        assert_eq!(parse_complex("1e-3+1e-3i").unwrap(), C64::new(1e-3, 1e-3));
        assert!(parse_complex("xyz").is_none());
    }

    #[test]
    fn text_roundtrip_preserves_ops() {
        let src = "qubits 2\ncbits 2\ngate S 0\ngate CNOT 0 1\ncgate S 0 ctrl 1 when 1\nmeasure 1 -> 0\ngate X 0 if 0==1\nmeasure 0 -> 1\n";
        let c = parse_circuit(src).unwrap();
        let text = c.to_text().unwrap();
        let c2 = parse_circuit(&text).unwrap();
        assert_eq!(c.ops().len(), c2.ops().len());
        assert_eq!(text, c2.to_text().unwrap());
    }
}
