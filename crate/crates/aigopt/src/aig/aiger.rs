//! AIGER reader and writer, ASCII (`aag`) and binary (`aig`) encodings.
//!
//! Combinational only: a nonzero latch count is a parse error. The
//! binary format stores each AND as two unsigned LEB128 deltas,
//! `delta0 = lhs - rhs0` and `delta1 = rhs0 - rhs1`, per the AIGER
//! format definition. Symbol tables and comment sections are skipped.

use std::collections::HashMap;

use super::{Aig, AigBuilder, AigError, Literal};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AigerFormat {
    Ascii,
    Binary,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(data: &'a [u8]) -> Self {
        Cursor { data, pos: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> AigError {
        AigError::Parse { offset: self.pos, msg: msg.into() }
    }

    fn eof(&self) -> bool {
        self.pos >= self.data.len()
    }

    fn peek(&self) -> Option<u8> {
        self.data.get(self.pos).copied()
    }

    fn take_byte(&mut self) -> Result<u8, AigError> {
        let b = self.peek().ok_or_else(|| self.err("unexpected end of file"))?;
        self.pos += 1;
        Ok(b)
    }

    /// Reads one line (without the newline); `\r\n` is tolerated.
    fn take_line(&mut self) -> Result<&'a str, AigError> {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b == b'\n' {
                break;
            }
            self.pos += 1;
        }
        let mut end = self.pos;
        if !self.eof() {
            self.pos += 1; // consume '\n'
        }
        if end > start && self.data[end - 1] == b'\r' {
            end -= 1;
        }
        std::str::from_utf8(&self.data[start..end])
            .map_err(|_| AigError::Parse { offset: start, msg: "non-utf8 text line".into() })
    }

    fn take_uint_line(&mut self) -> Result<u32, AigError> {
        let start = self.pos;
        let line = self.take_line()?;
        line.trim().parse::<u32>().map_err(|_| AigError::Parse {
            offset: start,
            msg: format!("expected unsigned integer, got {line:?}"),
        })
    }

    /// Unsigned LEB128 delta used by the binary AND section.
    fn take_delta(&mut self) -> Result<u32, AigError> {
        let mut x: u64 = 0;
        let mut shift = 0u32;
        loop {
            let b = self.take_byte()?;
            x |= u64::from(b & 0x7f) << shift;
            if b & 0x80 == 0 {
                break;
            }
            shift += 7;
            if shift > 35 {
                return Err(self.err("delta encoding exceeds 32 bits"));
            }
        }
        u32::try_from(x).map_err(|_| self.err("delta exceeds u32"))
    }
}

struct Header {
    format: AigerFormat,
    max_var: u32,
    num_inputs: u32,
    num_latches: u32,
    num_outputs: u32,
    num_ands: u32,
}

fn parse_header(cur: &mut Cursor) -> Result<Header, AigError> {
    let start = cur.pos;
    let line = cur.take_line()?;
    let mut parts = line.split_ascii_whitespace();
    let format = match parts.next() {
        Some("aag") => AigerFormat::Ascii,
        Some("aig") => AigerFormat::Binary,
        other => {
            return Err(AigError::Parse {
                offset: start,
                msg: format!("malformed header: expected 'aag' or 'aig', got {other:?}"),
            })
        }
    };
    let mut field = |name: &str| -> Result<u32, AigError> {
        parts
            .next()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| AigError::Parse {
                offset: start,
                msg: format!("malformed header: missing or invalid field {name}"),
            })
    };
    let max_var = field("M")?;
    let num_inputs = field("I")?;
    let num_latches = field("L")?;
    let num_outputs = field("O")?;
    let num_ands = field("A")?;
    Ok(Header { format, max_var, num_inputs, num_latches, num_outputs, num_ands })
}

/// Parses an AIGER byte stream (either encoding) into an [`Aig`].
///
/// AND definitions in ASCII files may appear in any order; they are
/// topologically sorted during construction. Variables are renumbered
/// densely, inputs first, then ANDs in topological order.
pub fn parse_aiger(bytes: &[u8]) -> Result<Aig, AigError> {
    let mut cur = Cursor::new(bytes);
    let h = parse_header(&mut cur)?;
    if h.num_latches > 0 {
        return Err(AigError::Parse {
            offset: 0,
            msg: format!("latch count {} > 0: only combinational AIGs are supported", h.num_latches),
        });
    }
    if h.max_var < h.num_inputs + h.num_ands {
        return Err(AigError::Parse {
            offset: 0,
            msg: format!(
                "malformed header: M = {} < I + A = {}",
                h.max_var,
                h.num_inputs + h.num_ands
            ),
        });
    }

    match h.format {
        AigerFormat::Ascii => parse_ascii_body(&mut cur, &h),
        AigerFormat::Binary => parse_binary_body(&mut cur, &h),
    }
}

fn parse_ascii_body(cur: &mut Cursor, h: &Header) -> Result<Aig, AigError> {
    let mut input_vars = Vec::with_capacity(h.num_inputs as usize);
    for _ in 0..h.num_inputs {
        let offset = cur.pos;
        let lit = cur.take_uint_line()?;
        if lit == 0 || lit & 1 == 1 {
            return Err(AigError::Parse {
                offset,
                msg: format!("input literal {lit} must be an even, nonzero literal"),
            });
        }
        input_vars.push(lit >> 1);
    }
    let mut outputs = Vec::with_capacity(h.num_outputs as usize);
    for _ in 0..h.num_outputs {
        outputs.push(cur.take_uint_line()?);
    }
    let mut and_defs = Vec::with_capacity(h.num_ands as usize);
    for _ in 0..h.num_ands {
        let offset = cur.pos;
        let line = cur.take_line()?;
        let nums: Vec<u32> = line
            .split_ascii_whitespace()
            .map(|s| s.parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| AigError::Parse {
                offset,
                msg: format!("expected 'lhs rhs0 rhs1', got {line:?}"),
            })?;
        let [lhs, rhs0, rhs1] = nums[..] else {
            return Err(AigError::Parse {
                offset,
                msg: format!("expected 'lhs rhs0 rhs1', got {line:?}"),
            });
        };
        if lhs == 0 || lhs & 1 == 1 {
            return Err(AigError::Parse {
                offset,
                msg: format!("AND literal {lhs} must be an even, nonzero literal"),
            });
        }
        and_defs.push((offset, lhs >> 1, rhs0, rhs1));
    }
    assemble(h, &input_vars, &outputs, &and_defs)
}

fn parse_binary_body(cur: &mut Cursor, h: &Header) -> Result<Aig, AigError> {
    // Binary encoding fixes input variables to 1..=I.
    let input_vars: Vec<u32> = (1..=h.num_inputs).collect();
    let mut outputs = Vec::with_capacity(h.num_outputs as usize);
    for _ in 0..h.num_outputs {
        outputs.push(cur.take_uint_line()?);
    }
    let mut and_defs = Vec::with_capacity(h.num_ands as usize);
    for i in 0..h.num_ands {
        let offset = cur.pos;
        let lhs = 2 * (h.num_inputs + 1 + i);
        let delta0 = cur.take_delta()?;
        let rhs0 = lhs.checked_sub(delta0).ok_or_else(|| AigError::Parse {
            offset,
            msg: format!("delta0 {delta0} larger than lhs {lhs}"),
        })?;
        let delta1 = cur.take_delta()?;
        let rhs1 = rhs0.checked_sub(delta1).ok_or_else(|| AigError::Parse {
            offset,
            msg: format!("delta1 {delta1} larger than rhs0 {rhs0}"),
        })?;
        and_defs.push((offset, lhs >> 1, rhs0, rhs1));
    }
    assemble(h, &input_vars, &outputs, &and_defs)
}

/// Common back end: maps AIGER variables to dense node indices,
/// topologically ordering AND definitions.
fn assemble(
    h: &Header,
    input_vars: &[u32],
    output_lits: &[u32],
    and_defs: &[(usize, u32, u32, u32)],
) -> Result<Aig, AigError> {
    let mut b = AigBuilder::new(h.num_inputs);
    // AIGER var -> builder literal.
    let mut map: HashMap<u32, Literal> = HashMap::new();
    map.insert(0, Literal::FALSE);
    for (i, v) in input_vars.iter().enumerate() {
        if map.insert(*v, Literal::new(1 + i as u32, false)).is_some() {
            return Err(AigError::Parse {
                offset: 0,
                msg: format!("variable {v} defined more than once"),
            });
        }
    }
    let mut def_of: HashMap<u32, usize> = HashMap::new();
    for (i, d) in and_defs.iter().enumerate() {
        if d.1 > h.max_var {
            return Err(AigError::Parse {
                offset: d.0,
                msg: format!("AND variable {} exceeds max var {}", d.1, h.max_var),
            });
        }
        if map.contains_key(&d.1) || def_of.insert(d.1, i).is_some() {
            return Err(AigError::Parse {
                offset: d.0,
                msg: format!("variable {} defined more than once", d.1),
            });
        }
    }

    // Iterative DFS so deep chains do not overflow the stack.
    let mut state = vec![0u8; and_defs.len()]; // 0 new, 1 open, 2 done
    for start in 0..and_defs.len() {
        if state[start] == 2 {
            continue;
        }
        let mut stack = vec![(start, false)];
        while let Some((i, expanded)) = stack.pop() {
            let (offset, var, rhs0, rhs1) = and_defs[i];
            if expanded {
                let f0 = resolve(&map, rhs0, offset)?;
                let f1 = resolve(&map, rhs1, offset)?;
                map.insert(var, b.and(f0, f1));
                state[i] = 2;
                continue;
            }
            if state[i] == 2 {
                continue;
            }
            if state[i] == 1 {
                return Err(AigError::Parse {
                    offset,
                    msg: format!("combinational cycle through variable {var}"),
                });
            }
            state[i] = 1;
            stack.push((i, true));
            for rhs in [rhs0, rhs1] {
                let rv = rhs >> 1;
                if !map.contains_key(&rv) {
                    match def_of.get(&rv) {
                        Some(&j) if state[j] == 0 => stack.push((j, false)),
                        Some(&j) if state[j] == 1 => {
                            return Err(AigError::Parse {
                                offset,
                                msg: format!("combinational cycle through variable {rv}"),
                            })
                        }
                        Some(_) => {}
                        None => {
                            return Err(AigError::Parse {
                                offset,
                                msg: format!("dangling literal {rhs}: variable {rv} is never defined"),
                            })
                        }
                    }
                }
            }
        }
    }

    for (i, lit) in output_lits.iter().enumerate() {
        let l = resolve(&map, *lit, 0).map_err(|_| AigError::Parse {
            offset: 0,
            msg: format!("output {i} references undefined literal {lit}"),
        })?;
        b.add_output(l);
    }
    Ok(b.build(String::new()))
}

fn resolve(map: &HashMap<u32, Literal>, lit: u32, offset: usize) -> Result<Literal, AigError> {
    let var = lit >> 1;
    let base = map.get(&var).ok_or_else(|| AigError::Parse {
        offset,
        msg: format!("dangling literal {lit}: variable {var} is never defined"),
    })?;
    Ok(if lit & 1 == 1 { !*base } else { *base })
}

/// Serializes `g` in the requested AIGER encoding.
///
/// Node indices map one-to-one onto AIGER variables, so a parse of the
/// output reproduces `g` exactly (same node order, same literals).
pub fn write_aiger(g: &Aig, format: AigerFormat) -> Vec<u8> {
    let m = g.num_pis() + g.num_ands();
    let mut out = Vec::new();
    let tag = match format {
        AigerFormat::Ascii => "aag",
        AigerFormat::Binary => "aig",
    };
    out.extend_from_slice(
        format!("{tag} {m} {} 0 {} {}\n", g.num_pis(), g.num_pos(), g.num_ands()).as_bytes(),
    );
    match format {
        AigerFormat::Ascii => {
            for i in 0..g.num_pis() {
                out.extend_from_slice(format!("{}\n", 2 * (1 + i)).as_bytes());
            }
            for o in g.outputs() {
                out.extend_from_slice(format!("{}\n", o.raw()).as_bytes());
            }
            for (idx, n) in g.and_nodes() {
                out.extend_from_slice(
                    format!("{} {} {}\n", 2 * idx, n.fanin1.raw(), n.fanin0.raw()).as_bytes(),
                );
            }
        }
        AigerFormat::Binary => {
            for o in g.outputs() {
                out.extend_from_slice(format!("{}\n", o.raw()).as_bytes());
            }
            for (idx, n) in g.and_nodes() {
                // fanins are stored ascending; binary wants rhs0 >= rhs1
                let lhs = 2 * idx;
                let (rhs0, rhs1) = (n.fanin1.raw(), n.fanin0.raw());
                write_delta(&mut out, lhs - rhs0);
                write_delta(&mut out, rhs0 - rhs1);
            }
        }
    }
    out
}

fn write_delta(out: &mut Vec<u8>, mut delta: u32) {
    loop {
        let mut byte = (delta & 0x7f) as u8;
        delta >>= 7;
        if delta != 0 {
            byte |= 0x80;
        }
        out.push(byte);
        if delta == 0 {
            break;
        }
    }
}
