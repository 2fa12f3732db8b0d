use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, GateKind, Wire};
use crate::contagion::{self, ContagionConfig, ContagionResult};
use crate::error::{Error, Result};
use crate::graph::Multigraph;

/// Largest instance we are willing to materialise.
const MAX_VERTICES: u64 = 100_000_000;

/// How the pad size `M` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// `ceil((3 k^3 |gates|)^(1/epsilon))`; only usable for tiny circuits or epsilon near 1.
    Gap,
    /// `k * |V \ T|`, the smallest pad that admits the use-once assignment.
    #[default]
    MinimumFeasible,
    Explicit(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexClass {
    /// Copy `copy` of gate `gate`.
    Gate { gate: usize, copy: usize },
    /// Vertex `(i, j)` of wire `wire`.
    Wire { wire: usize, i: usize, j: usize },
    Pad(usize),
}

#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub graph: Multigraph,
    pub seeds: Vec<usize>,
    pub k: usize,
    pub epsilon: f64,
    /// Pad size `M`.
    pub threshold: u64,
    /// `3 k^2 |gates|`.
    pub r_bound: u64,
    pub threshold_choice: Threshold,
    pub wires: Vec<Wire>,
    gate_base: usize,
    wire_base: usize,
    pad_base: usize,
    gate_count: usize,
}

pub fn minimum_threshold(c: &Circuit, k: usize) -> u64 {
    k as u64 * non_pad_count(c, k)
}

fn non_pad_count(c: &Circuit, k: usize) -> u64 {
    let k = k as u64;
    k * c.gates().len() as u64 + k * k * c.wires().len() as u64
}

pub fn gap_threshold(c: &Circuit, k: usize, epsilon: f64) -> Result<u64> {
    check_params(k, epsilon)?;
    let base = 3.0 * (k as f64).powi(3) * c.gates().len() as f64;
    let m = base.powf(1.0 / epsilon).ceil();
    if !m.is_finite() || m > MAX_VERTICES as f64 {
        return Err(Error::Config(format!(
            "pad size (3k^3 m)^(1/eps) = {m:e} for k = {k}, eps = {epsilon} is too large to build"
        )));
    }
    Ok(m as u64)
}

fn check_params(k: usize, epsilon: f64) -> Result<()> {
    if k < 2 {
        return Err(Error::Config(format!("reduction needs k >= 2, got {k}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

impl ReductionInstance {
    pub fn vertex_count(&self) -> usize {
        self.graph.n()
    }

    pub fn non_pad_count(&self) -> usize {
        self.pad_base - 1
    }

    pub fn gate_vertices(&self, gate: usize) -> Range<usize> {
        let start = self.gate_base + gate * self.k;
        start..start + self.k
    }

    pub fn wire_vertices(&self, wire: usize) -> Range<usize> {
        let start = self.wire_base + wire * self.k * self.k;
        start..start + self.k * self.k
    }

    pub fn pad_vertices(&self) -> Range<usize> {
        self.pad_base..self.pad_base + self.threshold as usize
    }

    pub fn class_of(&self, v: usize) -> VertexClass {
        assert!(v >= 1 && v <= self.vertex_count(), "vertex {v} out of range");
        if v >= self.pad_base {
            VertexClass::Pad(v - self.pad_base)
        } else if v >= self.wire_base {
            let off = v - self.wire_base;
            let block = self.k * self.k;
            VertexClass::Wire { wire: off / block, i: (off % block) / self.k, j: off % self.k }
        } else {
            let off = v - self.gate_base;
            VertexClass::Gate { gate: off / self.k, copy: off % self.k }
        }
    }

    /// `R < M^epsilon`; meaningful only for the gap pad size.
    pub fn epsilon_gap_holds(&self) -> bool {
        (self.r_bound as f64) < (self.threshold as f64).powf(self.epsilon)
    }

    fn gate_vertex(&self, gate: usize, i: usize) -> usize {
        self.gate_base + gate * self.k + i
    }

    fn wire_vertex(&self, wire: usize, i: usize, j: usize) -> usize {
        self.wire_base + wire * self.k * self.k + i * self.k + j
    }
}

/// Builds the contagion instance for `c` with threshold `k`.
pub fn build(c: &Circuit, k: usize, epsilon: f64, threshold: Threshold) -> Result<ReductionInstance> {
    check_params(k, epsilon)?;
    let minimum = minimum_threshold(c, k);
    let pad = match threshold {
        Threshold::Gap => gap_threshold(c, k, epsilon)?,
        Threshold::MinimumFeasible => minimum,
        Threshold::Explicit(m) => m,
    };
    if pad < minimum {
        return Err(Error::InfeasibleThreshold { given: pad, minimum });
    }
    let non_pad = non_pad_count(c, k);
    if non_pad + pad > MAX_VERTICES {
        return Err(Error::Config(format!("instance with {} vertices is too large", non_pad + pad)));
    }

    let wires = c.wires();
    let gate_count = c.gates().len();
    let mut inst = ReductionInstance {
        graph: Multigraph::path(1),
        seeds: Vec::new(),
        k,
        epsilon,
        threshold: pad,
        r_bound: 3 * (k * k) as u64 * gate_count as u64,
        threshold_choice: threshold,
        wires: wires.clone(),
        gate_base: 1,
        wire_base: 1 + gate_count * k,
        pad_base: 1 + non_pad as usize,
        gate_count,
    };

    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (w, wire) in wires.iter().enumerate() {
        let consumer = &c.gates()[wire.to];
        for i in 0..k {
            for j in 0..k {
                let x = inst.wire_vertex(w, i, j);
                for src in 0..k {
                    edges.push((inst.gate_vertex(wire.from, src), x));
                }
                let linked = match consumer.kind {
                    GateKind::Or => true,
                    GateKind::And if wire.slot == 0 => j < k.div_ceil(2),
                    GateKind::And => j < k / 2,
                    _ => unreachable!("constants have no inputs"),
                };
                if linked {
                    edges.push((x, inst.gate_vertex(wire.to, i)));
                }
            }
        }
    }

    // The output gate's copies see the whole pad; everybody else gets k pad
    // vertices of their own, handed out round-robin in creation order.
    let pad_range = inst.pad_vertices();
    let out = inst.gate_vertices(c.output());
    for g in out.clone() {
        edges.extend(pad_range.clone().map(|t| (g, t)));
    }
    let mut next = pad_range.start;
    for v in 1..inst.pad_base {
        if out.contains(&v) {
            continue;
        }
        edges.extend((next..next + k).map(|t| (v, t)));
        next += k;
    }
    debug_assert!(next <= pad_range.end);

    inst.graph = Multigraph::from_edges(non_pad as usize + pad as usize, edges)?;
    inst.seeds = c
        .gates()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.kind == GateKind::One)
        .flat_map(|(i, _)| inst.gate_vertices(i))
        .collect();
    Ok(inst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub circuit_value: bool,
    pub infected_count: usize,
    pub reached_threshold: bool,
    pub threshold: u64,
    pub r_bound: u64,
    pub vertices: usize,
    pub non_pad_vertices: usize,
    pub rounds_to_fixation: usize,
    /// Round-by-round frontier agrees with the circuit's evaluation trace.
    pub timing_consistent: bool,
    pub timing_error: Option<String>,
    pub pad_all_or_nothing: bool,
    /// `Some` only for the gap pad size.
    pub epsilon_gap: Option<bool>,
    pub pass: bool,
}

/// Runs the contagion on the reduction and compares against evaluation.
pub fn check(c: &Circuit, k: usize, epsilon: f64, threshold: Threshold) -> Result<Verdict> {
    let inst = build(c, k, epsilon, threshold)?;
    let value = super::evaluate_circuit(c);
    let result = run_instance(&inst)?;
    let infected = result.as_ref().map_or(0, |r| r.infected_count);
    let reached = infected as u64 >= inst.threshold;
    let pad = inst.pad_vertices();
    let pad_hits = result.as_ref().map_or(0, |r| pad.clone().filter(|&t| r.is_infected(t)).count());
    let timing = verify_timing(&inst, c, result.as_ref());
    let pass = reached == value && (value || infected as u64 <= inst.r_bound);
    Ok(Verdict {
        circuit_value: value,
        infected_count: infected,
        reached_threshold: reached,
        threshold: inst.threshold,
        r_bound: inst.r_bound,
        vertices: inst.vertex_count(),
        non_pad_vertices: inst.non_pad_count(),
        rounds_to_fixation: result.as_ref().map_or(0, |r| r.rounds_to_fixation),
        timing_consistent: timing.is_ok(),
        timing_error: timing.err(),
        pad_all_or_nothing: pad_hits == 0 || pad_hits == pad.len(),
        epsilon_gap: (inst.threshold_choice == Threshold::Gap).then(|| inst.epsilon_gap_holds()),
        pass,
    })
}

/// `None` when there is nothing to seed (no ONE gate).
fn run_instance(inst: &ReductionInstance) -> Result<Option<ContagionResult>> {
    if inst.seeds.is_empty() {
        return Ok(None);
    }
    let cfg = ContagionConfig::new(inst.k, inst.seeds.clone());
    contagion::run(&inst.graph, &cfg).map(Some)
}

/// Checks that through round `2l + 1` every vertex is infected exactly when
/// the evaluation trace says: true gates at level `lambda` in round `2 lambda`,
/// wires leaving them in round `2 lambda + 1`, the pad in round `2l + 1` if
/// the output is true. A false output must leave nothing else infected; a
/// true one must end in full infection.
pub fn verify_timing(
    inst: &ReductionInstance,
    c: &Circuit,
    result: Option<&ContagionResult>,
) -> std::result::Result<(), String> {
    let values = c.values();
    let depth = c.depth();
    let out_value = values[c.output()];
    let horizon = 2 * depth + 1;
    let expected = |v: usize| -> Option<usize> {
        match inst.class_of(v) {
            VertexClass::Gate { gate, .. } => values[gate].then_some(2 * c.gates()[gate].level),
            VertexClass::Wire { wire, .. } => {
                let from = inst.wires[wire].from;
                values[from].then_some(2 * c.gates()[from].level + 1)
            }
            VertexClass::Pad(_) => out_value.then_some(horizon),
        }
    };
    for v in 1..=inst.vertex_count() {
        let actual = result.and_then(|r| r.round(v)).filter(|&r| r <= horizon);
        let want = expected(v);
        if actual != want {
            return Err(format!(
                "vertex {v} ({:?}) infected at {actual:?}, expected {want:?}",
                inst.class_of(v)
            ));
        }
        if !out_value && result.is_some_and(|r| r.is_infected(v)) && want.is_none() {
            return Err(format!("vertex {v} ({:?}) infected although the output is 0", inst.class_of(v)));
        }
    }
    if out_value && !result.is_some_and(|r| r.fully_infected) {
        return Err("output is 1 but the instance is not fully infected".to_string());
    }
    debug_assert!(inst.gate_count == c.gates().len());
    Ok(())
}
