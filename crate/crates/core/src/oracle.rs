//! Phase oracles marking k-cliques.
//!
//! Both variants count induced edges of the selected vertex subset into a
//! binary counter and compare it against `k(k-1)/2`; with unrestricted input
//! states they also count selected vertices and compare against `k`. The
//! target qubit flips when every comparison holds, and the counting is then
//! undone so all scratch wires return to zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, IrError, Wire, WireRole, WireTable};
use crate::decompose::{lower_circuit, toffoli_census, DecomposeError, Lowering};
use crate::graph::{binomial, Graph};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("clique size {k} must lie in 2..={n}")]
    CliqueSizeOutOfRange { n: usize, k: usize },
    #[error("counter wire {0} is also used as a control")]
    CounterOverlapsControls(Wire),
    #[error("constant {constant} does not fit in a {width}-bit counter")]
    ConstantTooWide { constant: u64, width: usize },
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleVariant {
    /// Each edge's endpoints directly control the counter increment.
    #[default]
    Checking,
    /// Each edge first sets a scratch flag, which then controls the increment.
    Increment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OracleKind {
    pub variant: OracleVariant,
    /// Count selected vertices too; needed unless the input has fixed weight `k`.
    pub count_nodes: bool,
}

/// Bits needed to hold every value in `0..=max_count`.
pub fn counter_width(max_count: u64) -> usize {
    (u64::BITS - max_count.max(1).leading_zeros()) as usize
}

/// Node-counter width: wide enough to hold `k`, and such that no subset of
/// `n` vertices wraps around onto `k`.
pub fn node_counter_width(n: usize, k: usize) -> usize {
    counter_width(k as u64).max(counter_width(n.saturating_sub(k) as u64))
}

/// Wire assignment of an oracle. Counter bit 0 is least significant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLayout {
    pub vertex_wires: Vec<Wire>,
    pub edge_counter: Vec<Wire>,
    pub edge_flag: Wire,
    pub node_counter: Vec<Wire>,
    pub node_flag: Option<Wire>,
    pub edge_exists: Option<Wire>,
    pub target: Wire,
    pub wires: WireTable,
}

impl OracleLayout {
    pub fn new(n: usize, k: usize, kind: OracleKind) -> Self {
        let mut wires = WireTable::qubits(0);
        let vertex_wires = (0..n).map(|_| wires.push(Some(WireRole::Vertex))).collect();
        let ew = counter_width(binomial(k, 2));
        let edge_counter = (0..ew).map(|_| wires.push(Some(WireRole::EdgeCounter))).collect();
        let edge_flag = wires.push(Some(WireRole::EdgeFlag));
        let (node_counter, node_flag) = if kind.count_nodes {
            let nw = node_counter_width(n, k);
            let counter = (0..nw).map(|_| wires.push(Some(WireRole::NodeCounter))).collect();
            (counter, Some(wires.push(Some(WireRole::NodeFlag))))
        } else {
            (Vec::new(), None)
        };
        let edge_exists = match kind.variant {
            OracleVariant::Increment => Some(wires.push(Some(WireRole::EdgeExists))),
            OracleVariant::Checking => None,
        };
        let target = wires.push(Some(WireRole::Target));
        OracleLayout { vertex_wires, edge_counter, edge_flag, node_counter, node_flag, edge_exists, target, wires }
    }

    pub fn total_wires(&self) -> usize {
        self.wires.len()
    }

    /// Every wire other than the vertex register and the target.
    pub fn scratch_wires(&self) -> Vec<Wire> {
        let mut w = self.edge_counter.clone();
        w.push(self.edge_flag);
        w.extend(&self.node_counter);
        w.extend(self.node_flag);
        w.extend(self.edge_exists);
        w
    }
}

/// Adds one (mod `2^w`) to `counter` when every wire in `controls` is 1.
/// Ripple form, most significant bit first: bit `j` flips when the controls
/// and bits `0..j` are all 1.
pub fn controlled_increment(counter: &[Wire], controls: &[Wire]) -> Result<Vec<Gate>, OracleError> {
    if let Some(&w) = counter.iter().find(|w| controls.contains(w)) {
        return Err(OracleError::CounterOverlapsControls(w));
    }
    Ok((0..counter.len())
        .rev()
        .map(|j| {
            let mut ctrls = controls.to_vec();
            ctrls.extend(&counter[..j]);
            Gate::toffoli(&ctrls, counter[j])
        })
        .collect())
}

/// Flips `flag` iff `counter` equals `constant`, by conjugating an
/// all-ones test with X on the zero bits of `constant`.
pub fn equality_compare(counter: &[Wire], constant: u64, flag: Wire) -> Result<Vec<Gate>, OracleError> {
    let width = counter.len();
    if width < 64 && constant >> width != 0 {
        return Err(OracleError::ConstantTooWide { constant, width });
    }
    let zeros: Vec<Gate> = counter
        .iter()
        .enumerate()
        .filter(|&(bit, _)| constant >> bit & 1 == 0)
        .map(|(_, &w)| Gate::x(w))
        .collect();
    let mut gates = zeros.clone();
    gates.push(Gate::toffoli(counter, flag));
    gates.extend(zeros);
    Ok(gates)
}

/// A synthesized oracle before lowering.
#[derive(Clone, Debug, PartialEq)]
pub struct Oracle {
    pub layout: OracleLayout,
    pub kind: OracleKind,
    pub k: usize,
    pub circuit: Circuit,
    /// Set when the graph has fewer than `k(k-1)/2` edges, so nothing can be marked.
    pub unsatisfiable: bool,
}

impl Oracle {
    pub fn lowered(&self, lowering: Lowering) -> Result<Circuit, OracleError> {
        Ok(lower_circuit(&self.circuit, lowering)?)
    }

    pub fn census(&self) -> BTreeMap<usize, usize> {
        toffoli_census(&self.circuit)
    }

    pub fn toffoli_total(&self) -> usize {
        self.census().values().sum()
    }
}

/// Synthesizes the oracle for `g` and clique size `k`.
pub fn build_oracle(g: &Graph, k: usize, kind: OracleKind) -> Result<Oracle, OracleError> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(OracleError::CliqueSizeOutOfRange { n, k });
    }
    let layout = OracleLayout::new(n, k, kind);
    let v = &layout.vertex_wires;
    let mut compute: Vec<Gate> = Vec::new();
    for (a, b) in g.edges() {
        let (u, w) = (v[a], v[b]);
        match layout.edge_exists {
            None => compute.extend(controlled_increment(&layout.edge_counter, &[u, w])?),
            Some(flag) => {
                compute.push(Gate::toffoli(&[u, w], flag));
                compute.extend(controlled_increment(&layout.edge_counter, &[flag])?);
                compute.push(Gate::toffoli(&[u, w], flag));
            }
        }
    }
    compute.extend(equality_compare(&layout.edge_counter, binomial(k, 2), layout.edge_flag)?);
    let mut flip_controls = vec![layout.edge_flag];
    if let Some(node_flag) = layout.node_flag {
        for &vw in v {
            compute.extend(controlled_increment(&layout.node_counter, &[vw])?);
        }
        compute.extend(equality_compare(&layout.node_counter, k as u64, node_flag)?);
        flip_controls.push(node_flag);
    }

    let mut circuit = Circuit::new(layout.wires.clone());
    let compute_circuit = {
        let mut c = Circuit::new(layout.wires.clone());
        c.extend(compute)?;
        c
    };
    circuit.append_circuit(&compute_circuit)?;
    circuit.push(Gate::toffoli(&flip_controls, layout.target))?;
    circuit.append_circuit(&compute_circuit.inverse())?;
    Ok(Oracle {
        unsatisfiable: binomial(k, 2) > g.edge_count() as u64,
        layout,
        kind,
        k,
        circuit,
    })
}

/// Checking-based oracle.
pub fn checking_oracle(g: &Graph, k: usize, count_nodes: bool) -> Result<Oracle, OracleError> {
    build_oracle(g, k, OracleKind { variant: OracleVariant::Checking, count_nodes })
}

/// Increment-based oracle.
pub fn increment_oracle(g: &Graph, k: usize, count_nodes: bool) -> Result<Oracle, OracleError> {
    build_oracle(g, k, OracleKind { variant: OracleVariant::Increment, count_nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Control;
    use crate::graph::named;
    use crate::sim::{run_basis, StateVector};

    #[test]
    fn counter_widths() {
        assert_eq!(counter_width(6), 3);
        assert_eq!(counter_width(1), 1);
        assert_eq!(counter_width(10), 4);
        assert_eq!(counter_width(7), 3);
        assert_eq!(counter_width(8), 4);
        assert_eq!(node_counter_width(6, 4), 3);
        assert_eq!(node_counter_width(6, 2), 3);
        assert_eq!(node_counter_width(4, 3), 2);
    }

    #[test]
    fn increment_cascade_shape() {
        let gates = controlled_increment(&[2, 3, 4], &[0, 1]).unwrap();
        let arities: Vec<usize> = gates.iter().map(|g| g.controls.len()).collect();
        assert_eq!(arities, vec![4, 3, 2]);
        assert!(gates.iter().all(Gate::is_mct));
        let single = controlled_increment(&[0], &[]).unwrap();
        assert_eq!(single, vec![Gate::x(0)]);
        assert!(matches!(controlled_increment(&[0, 1], &[1]), Err(OracleError::CounterOverlapsControls(1))));
    }

    #[test]
    fn increment_cascade_adds_one_mod_eight() {
        // wires: 0,1 controls; 2,3,4 counter (bit 0 first)
        let mut c = Circuit::qubits(5);
        c.extend(controlled_increment(&[2, 3, 4], &[0, 1]).unwrap()).unwrap();
        let low = lower_circuit(&c, Lowering::Vchain).unwrap();
        let probe = StateVector::zero(low.wires().dims()).unwrap();
        for value in 0..8u32 {
            for ctrl in 0..4u32 {
                let (a, b) = (ctrl >> 1, ctrl & 1);
                let digits = [a, b, value & 1, value >> 1 & 1, value >> 2 & 1];
                let out = run_basis(&low, probe.index_of(&digits)).unwrap();
                let expected = if a == 1 && b == 1 { (value + 1) % 8 } else { value };
                let want = [a, b, expected & 1, expected >> 1 & 1, expected >> 2 & 1];
                assert_eq!(out.entries().len(), 1);
                assert_eq!(out.digits(out.entries()[0].0), want.to_vec(), "value {value} ctrl {ctrl}");
            }
        }
    }

    #[test]
    fn comparator_shapes() {
        let six = equality_compare(&[0, 1, 2], 6, 3).unwrap();
        assert_eq!(six.len(), 3);
        assert_eq!(six[0], Gate::x(0));
        assert_eq!(six[1], Gate::mct(vec![Control::on(0), Control::on(1), Control::on(2)], 3));
        let seven = equality_compare(&[0, 1, 2], 7, 3).unwrap();
        assert_eq!(seven.len(), 1);
        let four = equality_compare(&[0, 1, 2], 4, 3).unwrap();
        assert_eq!(&four[..2], &[Gate::x(0), Gate::x(1)]);
        assert!(matches!(equality_compare(&[0, 1], 4, 2), Err(OracleError::ConstantTooWide { .. })));
    }

    #[test]
    fn layout_wire_counts() {
        let full = OracleLayout::new(6, 4, OracleKind { variant: OracleVariant::Checking, count_nodes: true });
        assert_eq!(full.total_wires(), 6 + 3 + 1 + 3 + 1 + 1);
        let inc = OracleLayout::new(6, 4, OracleKind { variant: OracleVariant::Increment, count_nodes: false });
        assert_eq!(inc.total_wires(), 6 + 3 + 1 + 1 + 1);
        assert_eq!(inc.scratch_wires().len(), 5);
    }

    #[test]
    fn rejects_bad_clique_size() {
        let g = named::six_vertex();
        assert!(matches!(checking_oracle(&g, 1, true), Err(OracleError::CliqueSizeOutOfRange { .. })));
        assert!(matches!(checking_oracle(&g, 7, true), Err(OracleError::CliqueSizeOutOfRange { .. })));
        assert!(checking_oracle(&g, 6, true).unwrap().unsatisfiable);
        assert!(!checking_oracle(&g, 4, true).unwrap().unsatisfiable);
    }

    #[test]
    fn census_is_deterministic_and_matches_structure() {
        let g = named::one_triangle();
        let a = checking_oracle(&g, 3, true).unwrap();
        let b = checking_oracle(&g, 3, true).unwrap();
        assert_eq!(a.census(), b.census());
        // edges: 4 x (3-control + 2-control); comparator: 2 controls;
        // vertices: 4 x (1 two-control, 1 CNOT); comparator: 2; flip: 2; all mirrored.
        assert_eq!(a.census(), BTreeMap::from([(2, 2 * (4 + 1 + 4 + 1) + 1), (3, 2 * 4)]));
    }
}
