//! Line-oriented netlist text format.
//!
//! ```text
//! # comment
//! jj  <label> <n+> <n-> ic=<f> cj=<f> [rshunt=<f>]
//! ind <label> <n+> <n-> l=<f>
//! cap <label> <n+> <n-> c=<f>
//! res <label> <n+> <n-> r=<f>
//! ljj <label> <ref> <first>..<last> ic=<f> cj=<f> l=<f> [orient=-1]
//! probe node <n> [name=<s>]
//! probe branch <label> [name=<s>]
//! probe current <label> [name=<s>]
//! ```
//!
//! `gnd` is the ground node. Chain nodes are `<prefix><index>` with a common
//! prefix; `orient=-1` puts the chain junctions from the reference node to
//! the chain node.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{BranchKind, CircuitBuilder, CircuitError, CircuitGraph, ProbeTarget};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> CircuitError {
    CircuitError::Parse {
        line,
        column,
        message: message.into(),
    }
}

struct Attrs<'a> {
    values: HashMap<&'a str, (&'a str, usize)>,
    line: usize,
    end_column: usize,
}

impl<'a> Attrs<'a> {
    fn parse(
        tokens: &[Token<'a>],
        line: usize,
        allowed: &[&str],
        end_column: usize,
    ) -> Result<Self, CircuitError> {
        let mut values = HashMap::new();
        for t in tokens {
            let (k, v) = t.text.split_once('=').ok_or_else(|| {
                err(
                    line,
                    t.column,
                    format!("expected key=value, found '{}'", t.text),
                )
            })?;
            if !allowed.contains(&k) {
                return Err(err(line, t.column, format!("unknown attribute '{k}'")));
            }
            if values.insert(k, (v, t.column)).is_some() {
                return Err(err(line, t.column, format!("repeated attribute '{k}'")));
            }
        }
        Ok(Self {
            values,
            line,
            end_column: end_column.max(1),
        })
    }

    fn number(&self, key: &str) -> Result<Option<f64>, CircuitError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(&(v, col)) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| err(self.line, col, format!("non-numeric value '{v}' for {key}"))),
        }
    }

    fn required(&self, key: &str) -> Result<f64, CircuitError> {
        self.number(key)?.ok_or_else(|| {
            err(
                self.line,
                self.end_column,
                format!("missing required attribute {key}="),
            )
        })
    }

    fn text(&self, key: &str) -> Option<&'a str> {
        self.values.get(key).map(|&(v, _)| v)
    }
}

fn split_indexed(name: &str) -> Option<(&str, usize)> {
    let digits = name
        .chars()
        .rev()
        .take_while(|c| c.is_ascii_digit())
        .count();
    if digits == 0 {
        return None;
    }
    let (p, d) = name.split_at(name.len() - digits);
    d.parse().ok().map(|k| (p, k))
}

fn lift(line: usize, column: usize) -> impl Fn(CircuitError) -> CircuitError {
    move |e| match e {
        e @ CircuitError::Parse { .. } => e,
        other => err(line, column, other.to_string()),
    }
}

/// Parse netlist text into a validated graph.
pub fn parse_netlist(text: &str) -> Result<CircuitGraph, CircuitError> {
    let mut b = CircuitBuilder::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        let Some(head) = tokens.first() else { continue };
        let end = content.trim_end().chars().count() + 1;
        let positional = |i: usize, what: &str| -> Result<&Token, CircuitError> {
            tokens
                .get(i)
                .filter(|t| !t.text.contains('='))
                .ok_or_else(|| {
                    err(
                        line,
                        tokens.get(i).map_or(end, |t| t.column),
                        format!("expected {what}"),
                    )
                })
        };
        match head.text {
            "jj" | "ind" | "cap" | "res" => {
                let label = positional(1, "label")?;
                let np = positional(2, "positive node")?;
                let nm = positional(3, "negative node")?;
                let allowed: &[&str] = match head.text {
                    "jj" => &["ic", "cj", "rshunt"],
                    "ind" => &["l"],
                    "cap" => &["c"],
                    _ => &["r"],
                };
                let attrs = Attrs::parse(&tokens[4..], line, allowed, end)?;
                let kind = match head.text {
                    "jj" => BranchKind::Jj {
                        ic: attrs.required("ic")?,
                        cj: attrs.required("cj")?,
                        rshunt: attrs.number("rshunt")?,
                    },
                    "ind" => BranchKind::Inductor {
                        l: attrs.required("l")?,
                    },
                    "cap" => BranchKind::Capacitor {
                        c: attrs.required("c")?,
                    },
                    _ => BranchKind::Resistor {
                        r: attrs.required("r")?,
                    },
                };
                let a = b.node(np.text);
                let c = b.node(nm.text);
                b.add(label.text, a, c, kind)
                    .map_err(lift(line, label.column))?;
            }
            "ljj" => {
                let label = positional(1, "label")?;
                let reference = positional(2, "reference node")?;
                let range = positional(3, "node range first..last")?;
                let (first, last) = range
                    .text
                    .split_once("..")
                    .ok_or_else(|| err(line, range.column, "expected node range first..last"))?;
                let bad_range = || {
                    err(
                        line,
                        range.column,
                        format!("invalid node range '{}'", range.text),
                    )
                };
                let (p1, k1) = split_indexed(first).ok_or_else(bad_range)?;
                let (p2, k2) = split_indexed(last).ok_or_else(bad_range)?;
                if p1 != p2 || k2 <= k1 {
                    return Err(bad_range());
                }
                let attrs = Attrs::parse(&tokens[4..], line, &["ic", "cj", "l", "orient"], end)?;
                let ic = attrs.required("ic")?;
                let cj = attrs.required("cj")?;
                let l = attrs.required("l")?;
                let orient = match attrs.number("orient")? {
                    None => 1,
                    Some(x) if x == 1.0 => 1,
                    Some(x) if x == -1.0 => -1,
                    Some(_) => return Err(err(line, end, "orient must be 1 or -1")),
                };
                let r = b.node(reference.text);
                b.chain_from(label.text, p1, k1, r, k2 - k1 + 1, ic, cj, l, orient)
                    .map_err(lift(line, label.column))?;
            }
            "probe" => {
                let what = positional(1, "node, branch or current")?;
                let target = positional(2, "probe target")?;
                let attrs = Attrs::parse(&tokens[3..], line, &["name"], end)?;
                let name = attrs.text("name").unwrap_or(target.text);
                match what.text {
                    "node" => {
                        let n = b.find_node(target.text).ok_or_else(|| {
                            err(line, target.column, format!("unknown node {}", target.text))
                        })?;
                        b.probe_node(name, n);
                    }
                    "branch" => b
                        .probe_phase(name, target.text)
                        .map_err(lift(line, target.column))?,
                    "current" => b
                        .probe_current(name, target.text)
                        .map_err(lift(line, target.column))?,
                    other => {
                        return Err(err(
                            line,
                            what.column,
                            format!("unknown probe kind '{other}'"),
                        ))
                    }
                }
            }
            other => {
                return Err(err(
                    line,
                    head.column,
                    format!("unknown element kind '{other}'"),
                ))
            }
        }
    }
    b.build()
}

/// Emit canonical netlist text.
pub fn emit_netlist(g: &CircuitGraph) -> String {
    let mut out = String::new();
    let name = |n| g.node_name(n);
    let mut k = 0;
    let branches = g.branches();
    while k < branches.len() {
        if let Some(c) = g.chains().iter().find(|c| c.first_branch == k) {
            let _ = write!(
                out,
                "ljj {} {} {}..{} ic={} cj={} l={}",
                c.label,
                name(c.reference),
                name(c.nodes[0]),
                name(*c.nodes.last().expect("chain has nodes")),
                c.ic,
                c.cj,
                c.l
            );
            if c.orient < 0 {
                out.push_str(" orient=-1");
            }
            out.push('\n');
            k += c.branch_count();
            continue;
        }
        let br = &branches[k];
        let (a, b) = (name(br.a), name(br.b));
        let _ = match br.kind {
            BranchKind::Jj { ic, cj, rshunt } => {
                let _ = write!(out, "jj {} {a} {b} ic={ic} cj={cj}", br.label);
                match rshunt {
                    Some(r) => writeln!(out, " rshunt={r}"),
                    None => writeln!(out),
                }
            }
            BranchKind::Inductor { l } => writeln!(out, "ind {} {a} {b} l={l}", br.label),
            BranchKind::Capacitor { c } => writeln!(out, "cap {} {a} {b} c={c}", br.label),
            BranchKind::Resistor { r } => writeln!(out, "res {} {a} {b} r={r}", br.label),
        };
        k += 1;
    }
    for p in g.probes() {
        let (kind, target) = match p.target {
            ProbeTarget::Node(n) => ("node", name(n).to_string()),
            ProbeTarget::Phase(b) => ("branch", branches[b].label.clone()),
            ProbeTarget::Current(b) => ("current", branches[b].label.clone()),
        };
        if p.name == target {
            let _ = writeln!(out, "probe {kind} {target}");
        } else {
            let _ = writeln!(out, "probe {kind} {target} name={}", p.name);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GROUND;

    #[test]
    fn single_statement() {
        let g = parse_netlist("jj j0 n1 gnd ic=1 cj=1").unwrap();
        assert_eq!(g.branches().len(), 1);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.branches()[0].b, GROUND);
    }

    #[test]
    fn chain_macro_counts() {
        let g = parse_netlist("ljj s1 gnd n0..n59 ic=1 cj=1 l=0.1111").unwrap();
        let jj = g
            .branches()
            .iter()
            .filter(|b| matches!(b.kind, BranchKind::Jj { .. }))
            .count();
        let ind = g
            .branches()
            .iter()
            .filter(|b| matches!(b.kind, BranchKind::Inductor { .. }))
            .count();
        assert_eq!((jj, ind), (60, 59));
        assert_eq!(g.chain("s1").unwrap().len(), 60);
    }

    #[test]
    fn missing_attribute_reports_line() {
        let e = parse_netlist("jj j0 n1 gnd ic=1 cj=1\nind x n1\n").unwrap_err();
        assert!(matches!(e, CircuitError::Parse { line: 2, .. }), "{e}");
    }

    #[test]
    fn error_locations() {
        let cases = [
            ("foo a b c", 1, 1),
            ("jj j n1 gnd ic=one cj=1", 1, 13),
            ("cap c1 n1 gnd c=1\ncap c1 n1 gnd c=2", 2, 5),
            ("res r n1 gnd r=1 q=2", 1, 18),
        ];
        for (text, line, column) in cases {
            match parse_netlist(text) {
                Err(CircuitError::Parse {
                    line: l, column: c, ..
                }) => {
                    assert_eq!((l, c), (line, column), "{text}")
                }
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn comments_and_probes() {
        let text = "# cell\njj j1 a gnd ic=1 cj=1 # shunt next\nind l1 a b l=0.5\njj j2 b gnd ic=2 cj=2 rshunt=3\nprobe node a\nprobe branch j2 name=phi2\nprobe current l1\n";
        let g = parse_netlist(text).unwrap();
        assert_eq!(g.probes().len(), 3);
        assert_eq!(g.probes()[1].name, "phi2");
        let again = emit_netlist(&parse_netlist(&emit_netlist(&g)).unwrap());
        assert_eq!(again, emit_netlist(&g));
    }

    #[test]
    fn reversed_chain_round_trip() {
        let text = "ljj s2 m x3..x9 ic=0.5 cj=0.5 l=0.2 orient=-1\njj t m gnd ic=1 cj=1\n";
        let g = parse_netlist(text).unwrap();
        let c = g.chain("s2").unwrap();
        assert_eq!(c.orient, -1);
        assert_eq!(g.node_name(c.nodes[0]), "x3");
        assert_eq!(emit_netlist(&g), text);
    }
}
