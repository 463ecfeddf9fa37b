//! Gate-level CNOT network: two SNLs, two IDSNs and three NOT gates.
//!
//! Each SNL launches bit 0 as a fluxon on its upper output and bit 1 as an
//! antifluxon on its lower output. Upper outputs feed the upper IDSN (A on
//! S1, B on S2), lower outputs the lower IDSN. NOT gates sit on the upper
//! S1′ line and on both S2′ lines. The S1′ lines then carry C and the S2′
//! lines carry D, each encoded in the fluxon polarity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnotError {
    #[error("exactly one port of input {0} must be active")]
    InvalidInput(char),
    #[error("IDSN received opposite polarities")]
    MixedPolarity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn from_polarity(p: i8) -> Self {
        if p > 0 {
            Bit::Zero
        } else {
            Bit::One
        }
    }

    pub fn polarity(self) -> i8 {
        match self {
            Bit::Zero => 1,
            Bit::One => -1,
        }
    }

    pub fn value(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn xor(self, o: Bit) -> Bit {
        if self == o {
            Bit::Zero
        } else {
            Bit::One
        }
    }
}

/// Physical line inside the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Line {
    UpperS1p,
    UpperS2p,
    LowerS1p,
    LowerS2p,
}

/// One output fluxon: the port named by its bit value, the fluxon polarity
/// and the line it travelled on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortSignal {
    pub port: String,
    pub bit: Bit,
    pub polarity: i8,
    pub line: Line,
    pub inverted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnotRow {
    pub a: Bit,
    pub b: Bit,
    pub c: PortSignal,
    pub d: PortSignal,
}

fn input_bit(name: char, ports: [bool; 2]) -> Result<Bit, CnotError> {
    match ports {
        [true, false] => Ok(Bit::Zero),
        [false, true] => Ok(Bit::One),
        _ => Err(CnotError::InvalidInput(name)),
    }
}

/// SNL launch: (upper, lower) output polarities.
fn snl(bit: Bit) -> (Option<i8>, Option<i8>) {
    match bit {
        Bit::Zero => (Some(1), None),
        Bit::One => (None, Some(-1)),
    }
}

/// IDSN logic: a single fluxon passes unchanged, two same-polarity fluxons
/// are both inverted.
fn idsn(s1: Option<i8>, s2: Option<i8>) -> Result<(Option<i8>, Option<i8>), CnotError> {
    match (s1, s2) {
        (Some(x), Some(y)) if x == y => Ok((Some(-x), Some(-y))),
        (Some(_), Some(_)) => Err(CnotError::MixedPolarity),
        other => Ok(other),
    }
}

fn signal(port: [&'static str; 2], polarity: i8, line: Line, inverted: bool) -> PortSignal {
    let polarity = if inverted { -polarity } else { polarity };
    let bit = Bit::from_polarity(polarity);
    PortSignal {
        port: port[bit.value() as usize].to_string(),
        bit,
        polarity,
        line,
        inverted,
    }
}

/// Evaluate the network for input ports `[A1, A2]` and `[B1, B2]`.
pub fn behavioral_cnot(a: [bool; 2], b: [bool; 2]) -> Result<CnotRow, CnotError> {
    let ab = input_bit('A', a)?;
    let bb = input_bit('B', b)?;
    let (au, al) = snl(ab);
    let (bu, bl) = snl(bb);
    let (u1, u2) = idsn(au, bu)?;
    let (l1, l2) = idsn(al, bl)?;
    const C: [&str; 2] = ["C1", "C2"];
    const D: [&str; 2] = ["D1", "D2"];
    let c = match (u1, l1) {
        (Some(p), None) => signal(C, p, Line::UpperS1p, true),
        (None, Some(p)) => signal(C, p, Line::LowerS1p, false),
        _ => unreachable!("exactly one S1' line carries a fluxon"),
    };
    let d = match (u2, l2) {
        (Some(p), None) => signal(D, p, Line::UpperS2p, true),
        (None, Some(p)) => signal(D, p, Line::LowerS2p, true),
        _ => unreachable!("exactly one S2' line carries a fluxon"),
    };
    Ok(CnotRow { a: ab, b: bb, c, d })
}

/// All four rows in the order (A,B) = 00, 01, 10, 11.
pub fn cnot_table() -> Vec<CnotRow> {
    let port = |bit: u8| [bit == 0, bit == 1];
    let mut rows = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            rows.push(behavioral_cnot(port(a), port(b)).expect("valid inputs"));
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_table() {
        for row in cnot_table() {
            assert_eq!(row.d.bit, row.a);
            assert_eq!(row.c.bit, row.a.xor(row.b));
            assert_eq!(row.c.port, ["C1", "C2"][row.c.bit.value() as usize]);
            assert_eq!(row.d.port, ["D1", "D2"][row.d.bit.value() as usize]);
        }
    }

    #[test]
    fn three_not_gates() {
        let lines: std::collections::BTreeSet<_> = cnot_table()
            .iter()
            .flat_map(|r| [r.c.clone(), r.d.clone()])
            .filter(|s| s.inverted)
            .map(|s| format!("{:?}", s.line))
            .collect();
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(
            behavioral_cnot([true, true], [true, false]),
            Err(CnotError::InvalidInput('A'))
        );
        assert_eq!(
            behavioral_cnot([true, false], [false, false]),
            Err(CnotError::InvalidInput('B'))
        );
    }
}
