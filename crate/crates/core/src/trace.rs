//! Line-based event traces.
//!
//! Blank lines and lines starting with `#` are skipped. Line numbers in
//! errors are 1-based.

use crate::clos::Terminal;
use crate::dary::DaryString;
use crate::dwec::Event;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultilogEvent {
    Arrive { id: u64, input: DaryString, outputs: Vec<DaryString> },
    Depart { id: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClosEvent<T> {
    Arrive { id: u64, input: Terminal, output: Terminal, rate: Option<T> },
    Depart { id: u64 },
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l.split_whitespace().collect()))
        }
    })
}

fn id(line: usize, tok: Option<&&str>) -> Result<u64> {
    let tok = tok.ok_or_else(|| err(line, "missing request id"))?;
    tok.parse().map_err(|_| err(line, format!("bad request id {tok:?}")))
}

fn depart(line: usize, toks: &[&str]) -> Result<u64> {
    if toks.len() != 2 {
        return Err(err(line, "expected `D <id>`"));
    }
    id(line, toks.get(1))
}

/// `A <id> <input> <out1> [<out2> ...]` and `D <id>`, addresses as base-d
/// strings of length n.
pub fn parse_multilog(text: &str, d: u8, n: usize) -> Result<Vec<MultilogEvent>> {
    let addr = |line: usize, s: &str| -> Result<DaryString> {
        let a = DaryString::parse(d, s).map_err(|e| err(line, e.to_string()))?;
        if a.len() != n {
            return Err(err(line, format!("address {s} is not {n} digits long")));
        }
        Ok(a)
    };
    let mut out = Vec::new();
    for (line, toks) in lines(text) {
        match toks[0] {
            "A" => {
                if toks.len() < 4 {
                    return Err(err(line, "expected `A <id> <input> <output>...`"));
                }
                out.push(MultilogEvent::Arrive {
                    id: id(line, toks.get(1))?,
                    input: addr(line, toks[2])?,
                    outputs: toks[3..].iter().map(|s| addr(line, s)).collect::<Result<_>>()?,
                });
            }
            "D" => out.push(MultilogEvent::Depart { id: depart(line, &toks)? }),
            other => return Err(err(line, format!("unknown event {other:?}"))),
        }
    }
    Ok(out)
}

/// `A <id> <crossbar>:<port> <crossbar>:<port> [<rate>]` and `D <id>`.
pub fn parse_clos<T: Scalar>(text: &str) -> Result<Vec<ClosEvent<T>>> {
    let term = |line: usize, s: &str| s.parse::<Terminal>().map_err(|e| err(line, e.to_string()));
    let mut out = Vec::new();
    for (line, toks) in lines(text) {
        match toks[0] {
            "A" => {
                if toks.len() != 4 && toks.len() != 5 {
                    return Err(err(line, "expected `A <id> <in> <out> [<rate>]`"));
                }
                let rate = match toks.get(4) {
                    Some(s) => Some(T::parse_fraction(s).ok_or_else(|| err(line, format!("bad rate {s:?}")))?),
                    None => None,
                };
                out.push(ClosEvent::Arrive {
                    id: id(line, toks.get(1))?,
                    input: term(line, toks[2])?,
                    output: term(line, toks[3])?,
                    rate,
                });
            }
            "D" => out.push(ClosEvent::Depart { id: depart(line, &toks)? }),
            other => return Err(err(line, format!("unknown event {other:?}"))),
        }
    }
    Ok(out)
}

/// `A <id> <u> <v> <weight p/q>` and `D <id>`; vertices are 0-based.
pub fn parse_dwec<T: Scalar>(text: &str) -> Result<Vec<Event<T>>> {
    let vertex = |line: usize, s: &str| s.parse::<usize>().map_err(|_| err(line, format!("bad vertex {s:?}")));
    let mut out = Vec::new();
    for (line, toks) in lines(text) {
        match toks[0] {
            "A" => {
                if toks.len() != 5 {
                    return Err(err(line, "expected `A <id> <u> <v> <weight>`"));
                }
                let w = T::parse_fraction(toks[4]).ok_or_else(|| err(line, format!("bad weight {:?}", toks[4])))?;
                out.push(Event::Arrive {
                    id: id(line, toks.get(1))?,
                    u: vertex(line, toks[2])?,
                    v: vertex(line, toks[3])?,
                    w,
                });
            }
            "D" => out.push(Event::Depart { id: depart(line, &toks)? }),
            other => return Err(err(line, format!("unknown event {other:?}"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn multilog_trace() {
        let t = "# comment\nA 1 000 011 010\n\nD 1\n";
        let ev = parse_multilog(t, 2, 3).unwrap();
        assert_eq!(ev.len(), 2);
        assert!(matches!(&ev[0], MultilogEvent::Arrive { outputs, .. } if outputs.len() == 2));
        assert_eq!(ev[1], MultilogEvent::Depart { id: 1 });
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_multilog("A 1 000 011\nA 2 00 011\n", 2, 3).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_multilog("A 1 000 012\n", 2, 3).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_dwec::<Ratio<i64>>("\n\nA 1 0 1 x/3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(parse_clos::<Ratio<i64>>("X 1\n").is_err());
        assert!(parse_clos::<Ratio<i64>>("D\n").is_err());
    }

    #[test]
    fn clos_and_dwec_traces() {
        let c = parse_clos::<Ratio<i64>>("A 7 1:1 2:2 3/10\nA 8 1:2 1:1\nD 7").unwrap();
        assert_eq!(
            c[0],
            ClosEvent::Arrive {
                id: 7,
                input: Terminal::new(0, 0),
                output: Terminal::new(1, 1),
                rate: Some(Ratio::new(3, 10))
            }
        );
        assert!(matches!(c[1], ClosEvent::Arrive { rate: None, .. }));
        let d = parse_dwec::<Ratio<i64>>("A 1 0 3 41/100\nD 1\n").unwrap();
        assert_eq!(d[0], Event::Arrive { id: 1, u: 0, v: 3, w: Ratio::new(41, 100) });
        assert!(parse_multilog("", 2, 3).unwrap().is_empty());
    }
}
