use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Zero,
    One,
    And,
    Or,
}

impl GateKind {
    pub fn is_constant(self) -> bool {
        matches!(self, GateKind::Zero | GateKind::One)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::Zero => "ZERO",
            GateKind::One => "ONE",
            GateKind::And => "AND",
            GateKind::Or => "OR",
        })
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ZERO" => Ok(GateKind::Zero),
            "ONE" => Ok(GateKind::One),
            "AND" => Ok(GateKind::And),
            "OR" => Ok(GateKind::Or),
            other => Err(format!("gate kind {other:?} is not one of ZERO, ONE, AND, OR")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub id: u64,
    pub level: usize,
    pub kind: GateKind,
    /// Indices of the two input gates, first and second.
    pub inputs: Option<(usize, usize)>,
}

/// A wire from gate `from` into input slot `slot` (0 or 1) of gate `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub from: usize,
    pub to: usize,
    pub slot: usize,
}

/// A validated layered monotone circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    gates: Vec<Gate>,
    output: usize,
    depth: usize,
}

struct RawGate {
    line: usize,
    id: u64,
    level: usize,
    kind: GateKind,
    inputs: Vec<u64>,
}

impl Circuit {
    /// Builds a circuit from `(id, level, kind, input ids)` tuples.
    pub fn new(gates: &[(u64, usize, GateKind, Vec<u64>)], output: u64) -> Result<Circuit> {
        let raw = gates
            .iter()
            .enumerate()
            .map(|(i, (id, level, kind, inputs))| RawGate {
                line: i + 1,
                id: *id,
                level: *level,
                kind: *kind,
                inputs: inputs.clone(),
            })
            .collect();
        Circuit::validate(raw, Some((gates.len() + 1, output)), Vec::new())
    }

    fn validate(raw: Vec<RawGate>, output: Option<(usize, u64)>, mut problems: Vec<String>) -> Result<Circuit> {
        let mut index: HashMap<u64, usize> = HashMap::new();
        for (i, g) in raw.iter().enumerate() {
            if index.insert(g.id, i).is_some() {
                problems.push(format!("line {}: duplicate gate id {}", g.line, g.id));
            }
        }
        let mut gates = Vec::with_capacity(raw.len());
        for g in &raw {
            let mut inputs = None;
            if g.kind.is_constant() {
                if g.level != 0 {
                    problems.push(format!("line {}: constant gate {} must sit at level 0", g.line, g.id));
                }
                if !g.inputs.is_empty() {
                    problems.push(format!("line {}: constant gate {} takes no inputs", g.line, g.id));
                }
            } else if g.level == 0 {
                problems.push(format!("line {}: level 0 holds only constants, found {} gate {}", g.line, g.kind, g.id));
            } else if g.inputs.len() != 2 {
                problems.push(format!(
                    "line {}: {} gate {} needs exactly 2 inputs, got {}",
                    g.line,
                    g.kind,
                    g.id,
                    g.inputs.len()
                ));
            } else if g.inputs[0] == g.inputs[1] {
                problems.push(format!("line {}: gate {} repeats input {}", g.line, g.id, g.inputs[0]));
            } else {
                let mut resolved = [0usize; 2];
                let mut ok = true;
                for (slot, input) in g.inputs.iter().enumerate() {
                    match index.get(input) {
                        None => {
                            problems.push(format!("line {}: gate {} reads unknown gate {input}", g.line, g.id));
                            ok = false;
                        }
                        Some(&src) if raw[src].level + 1 != g.level => {
                            problems.push(format!(
                                "line {}: wire {input} -> {} joins levels {} and {}, not adjacent",
                                g.line, g.id, raw[src].level, g.level
                            ));
                            ok = false;
                        }
                        Some(&src) => resolved[slot] = src,
                    }
                }
                if ok {
                    inputs = Some((resolved[0], resolved[1]));
                }
            }
            gates.push(Gate { id: g.id, level: g.level, kind: g.kind, inputs });
        }

        let mut out_index = None;
        match output {
            None => problems.push("missing output line".to_string()),
            Some((line, id)) => match index.get(&id) {
                None => problems.push(format!("line {line}: output names unknown gate {id}")),
                Some(&o) => out_index = Some(o),
            },
        }
        let depth = gates.iter().map(|g| g.level).max().unwrap_or(0);
        if let Some(o) = out_index {
            if gates[o].level != depth {
                problems.push(format!("output gate {} is not on the top level {depth}", gates[o].id));
            }
            let crowd: Vec<u64> = gates.iter().filter(|g| g.level == depth && g.id != gates[o].id).map(|g| g.id).collect();
            if !crowd.is_empty() {
                problems.push(format!("gates {crowd:?} share the output level {depth}"));
            }
        }
        if gates.is_empty() {
            problems.push("circuit has no gates".to_string());
        }
        if !problems.is_empty() {
            return Err(Error::Circuit(problems));
        }
        Ok(Circuit { gates, output: out_index.expect("checked above"), depth })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Level of the output gate.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn wires(&self) -> Vec<Wire> {
        self.gates
            .iter()
            .enumerate()
            .filter_map(|(to, g)| g.inputs.map(|(a, b)| (to, a, b)))
            .flat_map(|(to, a, b)| [Wire { from: a, to, slot: 0 }, Wire { from: b, to, slot: 1 }])
            .collect()
    }

    /// Value of every gate, evaluated level by level.
    pub fn values(&self) -> Vec<bool> {
        let mut order: Vec<usize> = (0..self.gates.len()).collect();
        order.sort_by_key(|&i| self.gates[i].level);
        let mut value = vec![false; self.gates.len()];
        for i in order {
            let g = &self.gates[i];
            value[i] = match (g.kind, g.inputs) {
                (GateKind::Zero, _) => false,
                (GateKind::One, _) => true,
                (GateKind::And, Some((a, b))) => value[a] && value[b],
                (GateKind::Or, Some((a, b))) => value[a] || value[b],
                _ => unreachable!("validated circuit"),
            };
        }
        value
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            write!(out, "gate {} {} {}", g.id, g.level, g.kind).unwrap();
            if let Some((a, b)) = g.inputs {
                write!(out, " {} {}", self.gates[a].id, self.gates[b].id).unwrap();
            }
            out.push('\n');
        }
        writeln!(out, "output {}", self.gates[self.output].id).unwrap();
        out
    }
}

/// Parses the line format
///
/// ```text
/// gate <id> <level> <ZERO|ONE|AND|OR> [<in1> <in2>]
/// output <id>
/// ```
///
/// Blank lines and `#` comments are skipped. All problems are reported at once.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut raw = Vec::new();
    let mut output = None;
    let mut problems = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "gate" if toks.len() >= 4 => {
                let id = toks[1].parse::<u64>();
                let level = toks[2].parse::<usize>();
                let kind = toks[3].parse::<GateKind>();
                let inputs: std::result::Result<Vec<u64>, _> = toks[4..].iter().map(|t| t.parse::<u64>()).collect();
                match (id, level, kind, inputs) {
                    (Ok(id), Ok(level), Ok(kind), Ok(inputs)) => raw.push(RawGate { line: ln, id, level, kind, inputs }),
                    (_, _, Err(e), _) => problems.push(format!("line {ln}: {e}")),
                    _ => problems.push(format!("line {ln}: malformed gate line {line:?}")),
                }
            }
            "output" if toks.len() == 2 => match (toks[1].parse::<u64>(), output) {
                (Ok(id), None) => output = Some((ln, id)),
                (Ok(_), Some(_)) => problems.push(format!("line {ln}: second output line")),
                (Err(_), _) => problems.push(format!("line {ln}: malformed output line {line:?}")),
            },
            _ => problems.push(format!("line {ln}: unrecognised line {line:?}")),
        }
    }
    Circuit::validate(raw, output, problems)
}

pub fn evaluate_circuit(c: &Circuit) -> bool {
    c.values()[c.output]
}

/// A random layered circuit: depth uniform in `1..=depth_max`; level 0 holds a
/// ONE, a ZERO and random constant copies; inner levels hold `2..=width_max`
/// gates of uniform kind with two distinct inputs drawn uniformly from the level below.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, depth_max: usize, width_max: usize) -> Circuit {
    let depth_max = depth_max.max(1);
    let width_max = width_max.max(2);
    let depth = rng.random_range(1..=depth_max);
    let mut defs: Vec<(u64, usize, GateKind, Vec<u64>)> = Vec::new();
    let mut next_id = 0u64;
    let mut push = |defs: &mut Vec<_>, level, kind, inputs| {
        defs.push((next_id, level, kind, inputs));
        next_id += 1;
        next_id - 1
    };

    let mut below: Vec<u64> = vec![
        push(&mut defs, 0, GateKind::One, vec![]),
        push(&mut defs, 0, GateKind::Zero, vec![]),
    ];
    for _ in 2..rng.random_range(2..=width_max) {
        let kind = if rng.random_bool(0.5) { GateKind::One } else { GateKind::Zero };
        below.push(push(&mut defs, 0, kind, vec![]));
    }
    for level in 1..=depth {
        let width = if level == depth { 1 } else { rng.random_range(2..=width_max) };
        let mut here = Vec::with_capacity(width);
        for _ in 0..width {
            let kind = if rng.random_bool(0.5) { GateKind::And } else { GateKind::Or };
            let pair: Vec<u64> = below.choose_multiple(rng, 2).copied().collect();
            here.push(push(&mut defs, level, kind, pair));
        }
        below = here;
    }
    let output = below[0];
    Circuit::new(&defs, output).expect("generated circuits are layered")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn rejects(text: &str, needle: &str) {
        match parse_circuit(text) {
            Err(Error::Circuit(problems)) => {
                assert!(problems.iter().any(|p| p.contains(needle)), "{problems:?} lacks {needle:?}")
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn single_one_gate() {
        let c = parse_circuit("gate 7 0 ONE\noutput 7\n").unwrap();
        assert_eq!(c.depth(), 0);
        assert!(evaluate_circuit(&c));
    }

    #[test]
    fn small_circuits_evaluate() {
        let or = parse_circuit("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 OR 1 2\noutput 3").unwrap();
        assert!(evaluate_circuit(&or));
        let and = parse_circuit("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 AND 1 2\noutput 3").unwrap();
        assert!(!evaluate_circuit(&and));
    }

    #[test]
    fn layering_violations() {
        rejects(
            "gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 OR 1 2\ngate 4 1 OR 1 2\ngate 5 2 AND 3 4\ngate 6 3 OR 5 1\noutput 6",
            "line 6: wire 1 -> 6 joins levels 0 and 3",
        );
        rejects("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 AND 1\noutput 3", "needs exactly 2 inputs");
        rejects("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 NOT 1\noutput 3", "line 3: gate kind \"NOT\"");
        rejects("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 OR 1 2\n", "missing output");
        rejects("gate 1 0 ONE\ngate 2 0 ONE\ngate 3 1 OR 1 1\noutput 3", "repeats input");
        rejects("gate 1 1 ONE\noutput 1", "level 0");
        rejects("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 OR 1 2\noutput 1", "not on the top level");
        rejects(
            "gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 OR 1 2\ngate 4 1 AND 1 2\noutput 3",
            "share the output level",
        );
        rejects("gate 1 0 ONE\ngate 1 0 ZERO\noutput 1", "duplicate gate id");
        rejects("gate 1 0 ONE\ngate 2 0 ZERO\ngate 3 1 OR 1 9\noutput 3", "unknown gate 9");
        rejects("wire 1 2\n", "unrecognised line");
    }

    #[test]
    fn comments_and_forward_references() {
        let c = parse_circuit("# demo\noutput 3\ngate 3 1 AND 1 2 # top\n\ngate 1 0 ONE\ngate 2 0 ONE\n").unwrap();
        assert!(evaluate_circuit(&c));
    }

    #[test]
    fn text_round_trip() {
        let mut r = rng::stream(3);
        for _ in 0..20 {
            let c = random_circuit(&mut r, 4, 6);
            assert_eq!(parse_circuit(&c.to_text()).unwrap(), c);
        }
    }

    fn eval_recursive(c: &Circuit, g: usize, memo: &mut HashMap<usize, bool>) -> bool {
        if let Some(&v) = memo.get(&g) {
            return v;
        }
        let gate = &c.gates()[g];
        let v = match gate.kind {
            GateKind::Zero => false,
            GateKind::One => true,
            GateKind::And => {
                let (a, b) = gate.inputs.unwrap();
                eval_recursive(c, a, memo) & eval_recursive(c, b, memo)
            }
            GateKind::Or => {
                let (a, b) = gate.inputs.unwrap();
                eval_recursive(c, a, memo) | eval_recursive(c, b, memo)
            }
        };
        memo.insert(g, v);
        v
    }

    #[test]
    fn level_order_matches_recursive_evaluation() {
        let mut r = rng::stream(11);
        let mut ones = 0;
        for _ in 0..300 {
            let c = random_circuit(&mut r, 4, 6);
            let values = c.values();
            let mut memo = HashMap::new();
            for (g, &v) in values.iter().enumerate() {
                assert_eq!(v, eval_recursive(&c, g, &mut memo));
            }
            ones += evaluate_circuit(&c) as usize;
        }
        assert!(ones > 30 && ones < 270, "outputs should vary, got {ones} ones");
    }

    #[test]
    fn random_circuit_shape() {
        let mut r = rng::stream(5);
        for _ in 0..100 {
            let c = random_circuit(&mut r, 4, 6);
            assert!((1..=4).contains(&c.depth()));
            for level in 0..c.depth() {
                let w = c.gates().iter().filter(|g| g.level == level).count();
                assert!((2..=6).contains(&w));
            }
            assert_eq!(c.gates().iter().filter(|g| g.level == c.depth()).count(), 1);
            assert!(c.gates().iter().any(|g| g.kind == GateKind::One));
            assert!(c.gates().iter().any(|g| g.kind == GateKind::Zero));
        }
    }
}
