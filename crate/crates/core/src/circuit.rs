//! Mixed-dimension circuit representation.
//!
//! Wires carry a dimension in `2..=4`. Gates are either a single-wire unitary
//! acting on levels `{0, 1}` of its target (identity above), a modular
//! increment of the target, or an abstract multi-controlled Toffoli that the
//! lowering passes in [`crate::decompose`] replace.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_DIM: u32 = 2;
pub const MAX_DIM: u32 = 4;

pub type Wire = usize;

#[derive(Debug, Error, PartialEq)]
pub enum IrError {
    #[error("wire {wire} out of range for a {wires}-wire circuit")]
    WireOutOfRange { wire: Wire, wires: usize },
    #[error("trigger value {value} on wire {wire} is not below its dimension {dim}")]
    TriggerOutOfRange { wire: Wire, value: u32, dim: u32 },
    #[error("increment modulus {modulus} exceeds dimension {dim} of wire {wire}")]
    ModulusTooLarge { wire: Wire, modulus: u32, dim: u32 },
    #[error("increment modulus must be at least 2, got {0}")]
    ModulusTooSmall(u32),
    #[error("wire {0} appears more than once in a gate")]
    RepeatedWire(Wire),
    #[error("wire dimension {0} outside {MIN_DIM}..={MAX_DIM}")]
    BadDimension(u32),
    #[error("circuit needs at least one wire")]
    NoWires,
    #[error("wire tables differ: {0} vs {1} wires")]
    WireCountMismatch(usize, usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Role tags for wires, used for display and for cost classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireRole {
    Vertex,
    EdgeCounter,
    EdgeFlag,
    NodeCounter,
    NodeFlag,
    EdgeExists,
    Target,
    Control,
}

impl WireRole {
    fn tag(self) -> &'static str {
        match self {
            WireRole::Vertex => "vertex",
            WireRole::EdgeCounter => "edge_counter",
            WireRole::EdgeFlag => "edge_flag",
            WireRole::NodeCounter => "node_counter",
            WireRole::NodeFlag => "node_flag",
            WireRole::EdgeExists => "edge_exists",
            WireRole::Target => "target",
            WireRole::Control => "control",
        }
    }
}

/// Per-wire dimensions and optional role labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireTable {
    dims: Vec<u32>,
    labels: Vec<Option<WireRole>>,
}

impl WireTable {
    /// `n` unlabelled qubit wires.
    pub fn qubits(n: usize) -> Self {
        WireTable { dims: vec![2; n], labels: vec![None; n] }
    }

    pub fn with_dims(dims: Vec<u32>) -> Result<Self, IrError> {
        if dims.is_empty() {
            return Err(IrError::NoWires);
        }
        if let Some(&d) = dims.iter().find(|&&d| !(MIN_DIM..=MAX_DIM).contains(&d)) {
            return Err(IrError::BadDimension(d));
        }
        let n = dims.len();
        Ok(WireTable { dims, labels: vec![None; n] })
    }

    /// Adds a qubit wire with the given role and returns its index.
    pub fn push(&mut self, role: Option<WireRole>) -> Wire {
        self.dims.push(2);
        self.labels.push(role);
        self.dims.len() - 1
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn dim(&self, w: Wire) -> u32 {
        self.dims[w]
    }

    pub fn label(&self, w: Wire) -> Option<WireRole> {
        self.labels[w]
    }

    pub fn set_label(&mut self, w: Wire, role: WireRole) {
        self.labels[w] = Some(role);
    }

    /// Raises wire `w` to at least dimension `dim`.
    pub fn raise(&mut self, w: Wire, dim: u32) -> Result<(), IrError> {
        if w >= self.dims.len() {
            return Err(IrError::WireOutOfRange { wire: w, wires: self.dims.len() });
        }
        if dim > MAX_DIM {
            return Err(IrError::BadDimension(dim));
        }
        self.dims[w] = self.dims[w].max(dim);
        Ok(())
    }

    /// Size of the mixed-radix index space, saturating at `u128::MAX`.
    pub fn space_size(&self) -> u128 {
        self.dims.iter().fold(1u128, |acc, &d| acc.saturating_mul(d as u128))
    }
}

/// Unitaries acting on levels `{0, 1}` of a single wire.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Unitary {
    H,
    X,
    Z,
    /// Rotation about Y by the given angle in radians.
    Ry(f64),
    /// `diag(1, e^{i theta})`; `Phase(-pi/2)` is S-dagger.
    Phase(f64),
}

impl Unitary {
    pub fn inverse(self) -> Unitary {
        match self {
            Unitary::H | Unitary::X | Unitary::Z => self,
            Unitary::Ry(t) => Unitary::Ry(-t),
            Unitary::Phase(t) => Unitary::Phase(-t),
        }
    }

    fn is_inverse_of(self, other: Unitary) -> bool {
        const EPS: f64 = 1e-12;
        match (self, other) {
            (Unitary::H, Unitary::H) | (Unitary::X, Unitary::X) | (Unitary::Z, Unitary::Z) => true,
            (Unitary::Ry(a), Unitary::Ry(b)) | (Unitary::Phase(a), Unitary::Phase(b)) => (a + b).abs() < EPS,
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    Unitary(Unitary),
    /// `|y> -> |(y + delta) mod modulus>` on levels below `modulus`, identity above.
    Increment { delta: i32, modulus: u32 },
    /// Abstract multi-controlled Toffoli: flips a qubit target when every
    /// control holds its trigger value. Removed by lowering.
    Mct,
}

/// A control condition: the gate fires only when `wire` holds `value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Control {
    pub wire: Wire,
    pub value: u32,
}

impl Control {
    pub fn new(wire: Wire, value: u32) -> Self {
        Control { wire, value }
    }

    /// Control on a qubit being `|1>`.
    pub fn on(wire: Wire) -> Self {
        Control { wire, value: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub target: Wire,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn unitary(u: Unitary, target: Wire) -> Self {
        Gate { kind: GateKind::Unitary(u), target, controls: Vec::new() }
    }

    pub fn controlled(u: Unitary, target: Wire, controls: Vec<Control>) -> Self {
        Gate { kind: GateKind::Unitary(u), target, controls }
    }

    pub fn h(target: Wire) -> Self {
        Gate::unitary(Unitary::H, target)
    }

    pub fn x(target: Wire) -> Self {
        Gate::unitary(Unitary::X, target)
    }

    pub fn cx(control: Wire, target: Wire) -> Self {
        Gate::controlled(Unitary::X, target, vec![Control::on(control)])
    }

    pub fn increment(delta: i32, modulus: u32, target: Wire, controls: Vec<Control>) -> Self {
        Gate { kind: GateKind::Increment { delta, modulus }, target, controls }
    }

    pub fn mct(controls: Vec<Control>, target: Wire) -> Self {
        Gate { kind: GateKind::Mct, target, controls }
    }

    /// An X on `target` controlled by qubit wires at `|1>`: a bare X or CNOT
    /// for zero or one control, an abstract MCT otherwise.
    pub fn toffoli(controls: &[Wire], target: Wire) -> Self {
        let ctrls: Vec<Control> = controls.iter().map(|&w| Control::on(w)).collect();
        if ctrls.len() <= 1 {
            Gate::controlled(Unitary::X, target, ctrls)
        } else {
            Gate::mct(ctrls, target)
        }
    }

    pub fn is_mct(&self) -> bool {
        matches!(self.kind, GateKind::Mct)
    }

    /// Target followed by control wires.
    pub fn wires(&self) -> impl Iterator<Item = Wire> + '_ {
        std::iter::once(self.target).chain(self.controls.iter().map(|c| c.wire))
    }

    pub fn arity(&self) -> usize {
        1 + self.controls.len()
    }

    pub fn touches(&self, w: Wire) -> bool {
        self.wires().any(|x| x == w)
    }

    pub fn inverse(&self) -> Gate {
        let kind = match self.kind {
            GateKind::Unitary(u) => GateKind::Unitary(u.inverse()),
            GateKind::Increment { delta, modulus } => GateKind::Increment { delta: -delta, modulus },
            GateKind::Mct => GateKind::Mct,
        };
        Gate { kind, target: self.target, controls: self.controls.clone() }
    }

    fn same_signature(&self, other: &Gate) -> bool {
        if self.target != other.target || self.controls.len() != other.controls.len() {
            return false;
        }
        let mut a = self.controls.clone();
        let mut b = other.controls.clone();
        a.sort();
        b.sort();
        a == b
    }

    /// True when `self` followed by `other` is the identity.
    pub fn is_inverse_of(&self, other: &Gate) -> bool {
        if !self.same_signature(other) {
            return false;
        }
        match (self.kind, other.kind) {
            (GateKind::Unitary(a), GateKind::Unitary(b)) => a.is_inverse_of(b),
            (
                GateKind::Increment { delta: d1, modulus: m1 },
                GateKind::Increment { delta: d2, modulus: m2 },
            ) => m1 == m2 && (d1 as i64 + d2 as i64).rem_euclid(m1 as i64) == 0,
            (GateKind::Mct, GateKind::Mct) => true,
            _ => false,
        }
    }

    fn validate(&self, wires: &WireTable) -> Result<(), IrError> {
        let n = wires.len();
        let mut seen = HashSet::with_capacity(self.arity());
        for w in self.wires() {
            if w >= n {
                return Err(IrError::WireOutOfRange { wire: w, wires: n });
            }
            if !seen.insert(w) {
                return Err(IrError::RepeatedWire(w));
            }
        }
        for c in &self.controls {
            let dim = wires.dim(c.wire);
            if c.value >= dim {
                return Err(IrError::TriggerOutOfRange { wire: c.wire, value: c.value, dim });
            }
        }
        if let GateKind::Increment { modulus, .. } = self.kind {
            if modulus < 2 {
                return Err(IrError::ModulusTooSmall(modulus));
            }
            let dim = wires.dim(self.target);
            if modulus > dim {
                return Err(IrError::ModulusTooLarge { wire: self.target, modulus, dim });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GateKind::Unitary(Unitary::H) => write!(f, "h")?,
            GateKind::Unitary(Unitary::X) => write!(f, "x")?,
            GateKind::Unitary(Unitary::Z) => write!(f, "z")?,
            GateKind::Unitary(Unitary::Ry(t)) => write!(f, "ry {t:?}")?,
            GateKind::Unitary(Unitary::Phase(t)) => write!(f, "phase {t:?}")?,
            GateKind::Increment { delta, modulus } => write!(f, "inc {delta:+} mod{modulus}")?,
            GateKind::Mct => write!(f, "mct")?,
        }
        write!(f, " @{}", self.target)?;
        if !self.controls.is_empty() {
            write!(f, " | ctrl")?;
            for c in &self.controls {
                write!(f, " ({},{})", c.wire, c.value)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Gate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, ctrl_part) = match s.split_once('|') {
            Some((h, c)) => (h.trim(), Some(c.trim())),
            None => (s.trim(), None),
        };
        let (op, target) = head.rsplit_once('@').ok_or("missing `@<target>`")?;
        let target: Wire = target.trim().parse().map_err(|_| "bad target wire")?;
        let mut tokens = op.split_whitespace();
        let name = tokens.next().ok_or("missing gate name")?;
        let angle = |tok: Option<&str>| -> Result<f64, String> {
            tok.ok_or("missing angle")?.parse::<f64>().map_err(|e| e.to_string())
        };
        let kind = match name {
            "h" => GateKind::Unitary(Unitary::H),
            "x" => GateKind::Unitary(Unitary::X),
            "z" => GateKind::Unitary(Unitary::Z),
            "ry" => GateKind::Unitary(Unitary::Ry(angle(tokens.next())?)),
            "phase" => GateKind::Unitary(Unitary::Phase(angle(tokens.next())?)),
            "mct" => GateKind::Mct,
            "inc" => {
                let delta: i32 = tokens
                    .next()
                    .ok_or("missing increment delta")?
                    .parse()
                    .map_err(|_| "bad increment delta")?;
                let modulus: u32 = tokens
                    .next()
                    .and_then(|t| t.strip_prefix("mod"))
                    .ok_or("missing `mod<m>`")?
                    .parse()
                    .map_err(|_| "bad modulus")?;
                GateKind::Increment { delta, modulus }
            }
            other => return Err(format!("unknown gate `{other}`")),
        };
        if tokens.next().is_some() {
            return Err("trailing tokens".into());
        }
        let mut controls = Vec::new();
        if let Some(c) = ctrl_part {
            let rest = c.strip_prefix("ctrl").ok_or("expected `ctrl` after `|`")?;
            for tok in rest.split_whitespace() {
                let inner = tok
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or("control must look like (wire,value)")?;
                let (w, v) = inner.split_once(',').ok_or("control must look like (wire,value)")?;
                controls.push(Control {
                    wire: w.trim().parse().map_err(|_| "bad control wire")?,
                    value: v.trim().parse().map_err(|_| "bad control value")?,
                });
            }
        }
        Ok(Gate { kind, target, controls })
    }
}

/// An ordered gate list over a [`WireTable`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    wires: WireTable,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(wires: WireTable) -> Self {
        Circuit { wires, gates: Vec::new() }
    }

    pub fn qubits(n: usize) -> Self {
        Circuit::new(WireTable::qubits(n))
    }

    pub fn wires(&self) -> &WireTable {
        &self.wires
    }

    pub fn wires_mut(&mut self) -> &mut WireTable {
        &mut self.wires
    }

    pub fn num_wires(&self) -> usize {
        self.wires.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    /// Validates `g` against the wire table and appends it.
    pub fn push(&mut self, g: Gate) -> Result<(), IrError> {
        g.validate(&self.wires)?;
        self.gates.push(g);
        Ok(())
    }

    /// Consuming form of [`Circuit::push`].
    pub fn append(mut self, g: Gate) -> Result<Circuit, IrError> {
        self.push(g)?;
        Ok(self)
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<(), IrError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Appends all gates of `other`, which must have the same wire count;
    /// dimensions are widened to the elementwise maximum.
    pub fn append_circuit(&mut self, other: &Circuit) -> Result<(), IrError> {
        if other.num_wires() != self.num_wires() {
            return Err(IrError::WireCountMismatch(self.num_wires(), other.num_wires()));
        }
        self.widen(other.wires.dims())?;
        self.extend(other.gates.iter().cloned())
    }

    /// Raises every wire to at least the matching entry of `dims`.
    pub fn widen(&mut self, dims: &[u32]) -> Result<(), IrError> {
        if dims.len() != self.num_wires() {
            return Err(IrError::WireCountMismatch(self.num_wires(), dims.len()));
        }
        for (w, &d) in dims.iter().enumerate() {
            self.wires.raise(w, d)?;
        }
        Ok(())
    }

    pub fn has_mct(&self) -> bool {
        self.gates.iter().any(Gate::is_mct)
    }

    /// Gate count.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Greedy left-to-right layering: each gate lands one layer after the
    /// latest layer already occupying any of its wires.
    pub fn depth(&self) -> usize {
        let mut front = vec![0usize; self.num_wires()];
        let mut depth = 0;
        for g in &self.gates {
            let layer = g.wires().map(|w| front[w]).max().unwrap_or(0) + 1;
            for w in g.wires() {
                front[w] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }

    /// Reversed gate order with each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            wires: self.wires.clone(),
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Deletes pairs of mutually inverse gates with identical target/control
    /// signatures when no gate between them touches any of their wires.
    /// Repeats until no pair is left.
    pub fn cancel_adjacent_inverses(&self) -> Circuit {
        let mut gates: Vec<Option<Gate>> = self.gates.iter().cloned().map(Some).collect();
        loop {
            let mut changed = false;
            for i in 0..gates.len() {
                let Some(gi) = gates[i].as_ref() else { continue };
                let mut partner = None;
                for (j, slot) in gates.iter().enumerate().skip(i + 1) {
                    let Some(gj) = slot.as_ref() else { continue };
                    if gj.wires().any(|w| gi.touches(w)) {
                        if gi.is_inverse_of(gj) {
                            partner = Some(j);
                        }
                        break;
                    }
                }
                if let Some(j) = partner {
                    gates[i] = None;
                    gates[j] = None;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Circuit { wires: self.wires.clone(), gates: gates.into_iter().flatten().collect() }
    }

    /// Line-oriented text form: a `dims` header, optional `label` lines, then
    /// one gate per line.
    pub fn to_text(&self) -> String {
        let mut out = String::from("dims");
        for d in self.wires.dims() {
            out.push_str(&format!(" {d}"));
        }
        out.push('\n');
        for w in 0..self.num_wires() {
            if let Some(role) = self.wires.label(w) {
                out.push_str(&format!("label {w} {}\n", role.tag()));
            }
        }
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`Circuit::to_text`].
    pub fn from_text(text: &str) -> Result<Circuit, IrError> {
        let mut circuit: Option<Circuit> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let err = |msg: String| IrError::Parse { line, msg };
            if let Some(rest) = l.strip_prefix("dims") {
                let dims = rest
                    .split_whitespace()
                    .map(|t| t.parse::<u32>().map_err(|e| err(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                circuit = Some(Circuit::new(WireTable::with_dims(dims)?));
                continue;
            }
            let c = circuit.as_mut().ok_or_else(|| err("missing `dims` header".into()))?;
            if let Some(rest) = l.strip_prefix("label ") {
                let (w, tag) = rest.trim().split_once(' ').ok_or_else(|| err("bad label".into()))?;
                let w: Wire = w.parse().map_err(|_| err("bad label wire".into()))?;
                let role = [
                    WireRole::Vertex,
                    WireRole::EdgeCounter,
                    WireRole::EdgeFlag,
                    WireRole::NodeCounter,
                    WireRole::NodeFlag,
                    WireRole::EdgeExists,
                    WireRole::Target,
                    WireRole::Control,
                ]
                .into_iter()
                .find(|r| r.tag() == tag.trim())
                .ok_or_else(|| err(format!("unknown role `{tag}`")))?;
                if w >= c.num_wires() {
                    return Err(IrError::WireOutOfRange { wire: w, wires: c.num_wires() });
                }
                c.wires.set_label(w, role);
                continue;
            }
            let g: Gate = l.parse().map_err(err)?;
            c.push(g)?;
        }
        circuit.ok_or(IrError::Parse { line: 0, msg: "empty circuit text".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qutrit_pair() -> Circuit {
        Circuit::new(WireTable::with_dims(vec![2, 3, 2]).unwrap())
    }

    #[test]
    fn append_examples() {
        let c = Circuit::qubits(2).append(Gate::cx(0, 1)).unwrap();
        assert_eq!(c.size(), 1);

        let err = Circuit::qubits(2).append(Gate::controlled(Unitary::X, 1, vec![Control::new(0, 2)]));
        assert!(matches!(err, Err(IrError::TriggerOutOfRange { wire: 0, value: 2, dim: 2 })));

        let ok = qutrit_pair().append(Gate::increment(1, 3, 1, vec![Control::new(0, 1)]));
        assert!(ok.is_ok());

        let too_big = Circuit::qubits(2).append(Gate::increment(1, 3, 1, vec![]));
        assert!(matches!(too_big, Err(IrError::ModulusTooLarge { .. })));
        assert!(matches!(Circuit::qubits(2).append(Gate::x(5)), Err(IrError::WireOutOfRange { .. })));
        assert!(matches!(Circuit::qubits(2).append(Gate::cx(1, 1)), Err(IrError::RepeatedWire(1))));
    }

    #[test]
    fn inverse_examples() {
        let mut c = qutrit_pair();
        c.push(Gate::increment(1, 3, 1, vec![])).unwrap();
        let inv = c.inverse();
        assert_eq!(inv.gates()[0].kind, GateKind::Increment { delta: -1, modulus: 3 });

        let mut c = qutrit_pair();
        c.extend([
            Gate::h(0),
            Gate::controlled(Unitary::Ry(0.3), 2, vec![Control::on(0)]),
            Gate::increment(1, 3, 1, vec![Control::on(0)]),
            Gate::controlled(Unitary::X, 2, vec![Control::new(1, 2)]),
        ])
        .unwrap();
        assert_eq!(c.inverse().inverse(), c);
        assert_eq!(c.inverse().gates()[2].kind, GateKind::Unitary(Unitary::Ry(-0.3)));
    }

    #[test]
    fn depth_examples() {
        assert_eq!(Circuit::qubits(3).depth(), 0);
        let c = Circuit::qubits(4).append(Gate::cx(0, 1)).unwrap().append(Gate::cx(2, 3)).unwrap();
        assert_eq!(c.depth(), 1);
        let c = c.append(Gate::cx(1, 2)).unwrap();
        assert_eq!(c.depth(), 2);
    }

    #[test]
    fn cancel_pair() {
        let dims = WireTable::with_dims(vec![2, 2, 3, 3]).unwrap();
        let mut c = Circuit::new(dims);
        c.push(Gate::increment(1, 3, 2, vec![Control::new(3, 2)])).unwrap();
        c.push(Gate::increment(-1, 3, 2, vec![Control::new(3, 2)])).unwrap();
        assert_eq!(c.cancel_adjacent_inverses().size(), 0);
    }

    #[test]
    fn cancel_blocked_by_shared_wire() {
        let mut c = Circuit::new(WireTable::with_dims(vec![2, 3, 2]).unwrap());
        c.push(Gate::increment(1, 3, 1, vec![Control::on(0)])).unwrap();
        c.push(Gate::controlled(Unitary::X, 2, vec![Control::new(1, 2)])).unwrap();
        c.push(Gate::increment(-1, 3, 1, vec![Control::on(0)])).unwrap();
        assert_eq!(c.cancel_adjacent_inverses(), c);
    }

    #[test]
    fn cancel_across_disjoint_gate() {
        let mut c = Circuit::qubits(4);
        c.extend([Gate::cx(0, 1), Gate::h(3), Gate::cx(0, 1)]).unwrap();
        let out = c.cancel_adjacent_inverses();
        assert_eq!(out.gates(), &[Gate::h(3)]);
    }

    #[test]
    fn cancel_nested_pairs_reach_fixpoint() {
        let mut c = Circuit::qubits(2);
        c.extend([
            Gate::h(0),
            Gate::unitary(Unitary::Ry(0.25), 0),
            Gate::unitary(Unitary::Ry(-0.25), 0),
            Gate::h(0),
        ])
        .unwrap();
        assert_eq!(c.cancel_adjacent_inverses().size(), 0);
    }

    #[test]
    fn increment_inverse_modular() {
        let a = Gate::increment(2, 3, 0, vec![]);
        let b = Gate::increment(1, 3, 0, vec![]);
        assert!(a.is_inverse_of(&b));
        assert!(!a.is_inverse_of(&a));
    }

    #[test]
    fn text_round_trip() {
        let mut c = Circuit::new(WireTable::with_dims(vec![2, 3, 4, 2]).unwrap());
        c.wires_mut().set_label(3, WireRole::Target);
        c.extend([
            Gate::h(0),
            Gate::controlled(Unitary::Ry(1.2309594173407747), 1, vec![Control::on(0)]),
            Gate::increment(1, 3, 1, vec![Control::on(0)]),
            Gate::increment(-1, 4, 2, vec![Control::new(1, 2)]),
            Gate::controlled(Unitary::Phase(-std::f64::consts::FRAC_PI_2), 3, vec![Control::new(2, 3)]),
            Gate::mct(vec![Control::on(0), Control::on(1)], 3),
        ])
        .unwrap();
        let text = c.to_text();
        assert!(text.contains("inc +1 mod3 @1 | ctrl (0,1)"));
        assert_eq!(Circuit::from_text(&text).unwrap(), c);
    }

    #[test]
    fn text_parse_errors() {
        assert!(Circuit::from_text("h @0").is_err());
        assert!(Circuit::from_text("dims 2 2\nfoo @0").is_err());
        assert!(Circuit::from_text("dims 2 2\nx @0 | ctrl (1,2)").is_err());
        assert!(Circuit::from_text("dims 5").is_err());
    }
}
