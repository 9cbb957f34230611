//! Lowering of abstract multi-controlled Toffoli gates onto intermediate
//! qutrit/ququart gates, and the qubit-only cost model they are compared with.
//!
//! Every fragment here is ancilla-free: controls are temporarily raised to
//! levels 2 or 3 and restored by the mirrored uncompute half.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Control, Gate, GateKind, IrError, Unitary, Wire, WireTable, MAX_DIM};

#[derive(Debug, Error, PartialEq)]
pub enum DecomposeError {
    #[error("gate on wire {0} is not an abstract multi-controlled Toffoli")]
    NotAbstract(Wire),
    #[error("control on wire {wire} must be a qubit triggered on |1>")]
    NonBinaryControl { wire: Wire },
    #[error("target wire {0} must be a qubit")]
    NonBinaryTarget(Wire),
    #[error("{0} controls: nothing to lower")]
    TooFewControls(usize),
    #[error("d-ary lowering with d = {0} would need a level above {MAX_DIM}")]
    DimensionCap(u32),
    #[error("cost model needs at least one control, got {0}")]
    NoControls(usize),
    #[error(transparent)]
    Ir(#[from] IrError),
}

/// Which lowering pass replaces abstract MCT gates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lowering {
    /// Sequential chain through raised controls; size and depth `2n - 1`.
    #[default]
    Vchain,
    /// Binary tree through raised controls; logarithmic depth, levels up to 3.
    Tree,
}

/// Gates replacing one MCT, plus the wire dimensions they require.
#[derive(Clone, Debug, PartialEq)]
pub struct Fragment {
    pub gates: Vec<Gate>,
    pub raises: Vec<(Wire, u32)>,
}

impl Fragment {
    /// Standalone circuit over `base` with the required wires raised.
    pub fn to_circuit(&self, base: &WireTable) -> Result<Circuit, DecomposeError> {
        let mut wires = base.clone();
        for &(w, d) in &self.raises {
            wires.raise(w, d)?;
        }
        let mut c = Circuit::new(wires);
        c.extend(self.gates.iter().cloned())?;
        Ok(c)
    }

    pub fn max_level(&self) -> u32 {
        self.raises.iter().map(|&(_, d)| d).max().unwrap_or(2)
    }
}

fn binary_controls(mct: &Gate, logical: &WireTable) -> Result<Vec<Wire>, DecomposeError> {
    if !mct.is_mct() {
        return Err(DecomposeError::NotAbstract(mct.target));
    }
    if logical.dim(mct.target) != 2 {
        return Err(DecomposeError::NonBinaryTarget(mct.target));
    }
    mct.controls
        .iter()
        .map(|c| {
            if c.value != 1 || logical.dim(c.wire) != 2 {
                Err(DecomposeError::NonBinaryControl { wire: c.wire })
            } else {
                Ok(c.wire)
            }
        })
        .collect()
}

/// Chain lowering: the first control raises the second to `|2>`, each raised
/// control raises the next, the last raised control flips the target, then
/// everything is uncomputed in reverse.
pub fn lower_vchain(mct: &Gate, logical: &WireTable) -> Result<Fragment, DecomposeError> {
    let ctrls = binary_controls(mct, logical)?;
    let n = ctrls.len();
    if n == 0 {
        return Err(DecomposeError::TooFewControls(0));
    }
    if n == 1 {
        return Ok(Fragment { gates: vec![Gate::cx(ctrls[0], mct.target)], raises: vec![] });
    }
    let mut compute = Vec::with_capacity(n - 1);
    compute.push(Gate::increment(1, 3, ctrls[1], vec![Control::on(ctrls[0])]));
    for i in 1..n - 1 {
        compute.push(Gate::increment(1, 3, ctrls[i + 1], vec![Control::new(ctrls[i], 2)]));
    }
    let mut gates = compute.clone();
    gates.push(Gate::controlled(Unitary::X, mct.target, vec![Control::new(ctrls[n - 1], 2)]));
    gates.extend(compute.iter().rev().map(Gate::inverse));
    Ok(Fragment { gates, raises: ctrls[1..].iter().map(|&w| (w, 3)).collect() })
}

/// The chain built from self-contained two-control stages: every stage that
/// reads a raised control recomputes and uncomputes that control around
/// itself. Size `2^n - 1`; [`Circuit::cancel_adjacent_inverses`] reduces it
/// to [`lower_vchain`].
pub fn lower_vchain_staged(mct: &Gate, logical: &WireTable) -> Result<Fragment, DecomposeError> {
    let ctrls = binary_controls(mct, logical)?;
    let n = ctrls.len();
    if n < 2 {
        return lower_vchain(mct, logical);
    }
    // After `prepare`, ctrls[i] holds |2> iff ctrls[0..=i] were all 1 and
    // every earlier control is back at its input value.
    let mut prepare: Vec<Gate> = vec![Gate::increment(1, 3, ctrls[1], vec![Control::on(ctrls[0])])];
    for i in 1..n - 1 {
        let step = Gate::increment(1, 3, ctrls[i + 1], vec![Control::new(ctrls[i], 2)]);
        let undo: Vec<Gate> = prepare.iter().rev().map(Gate::inverse).collect();
        prepare.push(step);
        prepare.extend(undo);
    }
    let mut gates = prepare.clone();
    gates.push(Gate::controlled(Unitary::X, mct.target, vec![Control::new(ctrls[n - 1], 2)]));
    gates.extend(prepare.iter().rev().map(Gate::inverse));
    Ok(Fragment { gates, raises: ctrls[1..].iter().map(|&w| (w, 3)).collect() })
}

/// Generalised Toffoli over `d`-level wires: the target is incremented mod
/// `d` iff both controls hold `d - 1`. Uses level `d` on the second control.
pub fn lower_dary(c1: Wire, c2: Wire, target: Wire, d: u32) -> Result<Fragment, DecomposeError> {
    if d < 2 || d + 1 > MAX_DIM {
        return Err(DecomposeError::DimensionCap(d));
    }
    let raise = Gate::increment(1, d + 1, c2, vec![Control::new(c1, d - 1)]);
    let act = if d == 2 {
        Gate::controlled(Unitary::X, target, vec![Control::new(c2, d)])
    } else {
        Gate::increment(1, d, target, vec![Control::new(c2, d)])
    };
    let lower = raise.inverse();
    Ok(Fragment { gates: vec![raise, act, lower], raises: vec![(c2, d + 1)] })
}

/// Number of controls a tree whose root is ready after `t` layers can absorb.
fn tree_capacity(t: usize) -> usize {
    let (mut prev, mut cur) = (1usize, 2usize); // t = 0, t = 1
    match t {
        0 => 1,
        1 => 2,
        _ => {
            for _ in 2..=t {
                let next = 1 + cur + prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Compute-phase layers of [`lower_tree`] for `n` controls: the smallest `t`
/// whose tree holds `n` nodes. The fragment depth is `2t + 1`.
pub fn tree_compute_layers(n: usize) -> usize {
    (0..).find(|&t| tree_capacity(t) >= n).expect("capacity grows without bound")
}

struct TreeNode {
    wire: Wire,
    children: Vec<TreeNode>,
}

impl TreeNode {
    /// Level the node holds iff all controls in its subtree are 1.
    fn mark(&self) -> u32 {
        1 + self.children.len() as u32
    }
}

/// Shapes `count` nodes into a tree ready after `t` layers, assigning wires
/// from `wires` in post-order.
fn build_tree(count: usize, t: usize, wires: &mut impl Iterator<Item = Wire>) -> TreeNode {
    let mut children = Vec::new();
    if count > 1 {
        let rest = count - 1;
        let late = rest.min(tree_capacity(t - 1));
        let early = rest - late;
        if early > 0 {
            children.push(build_tree(early, t - 2, wires));
        }
        children.push(build_tree(late, t - 1, wires));
    }
    let wire = wires.next().expect("enough control wires");
    TreeNode { wire, children }
}

/// Emits `(layer, gate)` pairs for the compute phase; returns the layer at
/// which `node` holds its mark.
fn emit_tree(node: &TreeNode, out: &mut Vec<(usize, Gate)>, raises: &mut Vec<(Wire, u32)>) -> usize {
    let mut ready = 0;
    for (i, child) in node.children.iter().enumerate() {
        let child_ready = emit_tree(child, out, raises);
        let layer = ready.max(child_ready) + 1;
        let modulus = if i == 0 { 3 } else { 4 };
        out.push((layer, Gate::increment(1, modulus, node.wire, vec![Control::new(child.wire, child.mark())])));
        ready = layer;
    }
    if !node.children.is_empty() {
        raises.push((node.wire, node.mark() + 1));
    }
    ready
}

/// Tree lowering. Each internal node is itself a control; it is incremented
/// once per child whose subtree is all ones, so it reaches `1 + #children`
/// exactly when its whole subtree is set. Two children at most keeps every
/// level below 4. Children are shaped so the root is ready after
/// [`tree_compute_layers`] layers; the fragment depth is `2t + 1`.
pub fn lower_tree(mct: &Gate, logical: &WireTable) -> Result<Fragment, DecomposeError> {
    let ctrls = binary_controls(mct, logical)?;
    let n = ctrls.len();
    if n < 2 {
        return Err(DecomposeError::TooFewControls(n));
    }
    let t = tree_compute_layers(n);
    let root = build_tree(n, t, &mut ctrls.iter().copied());
    let mut timed = Vec::new();
    let mut raises = Vec::new();
    let ready = emit_tree(&root, &mut timed, &mut raises);
    timed.sort_by_key(|&(layer, _)| layer);
    let compute: Vec<Gate> = timed.into_iter().map(|(_, g)| g).collect();
    let mut gates = compute.clone();
    gates.push(Gate::controlled(Unitary::X, mct.target, vec![Control::new(root.wire, root.mark())]));
    gates.extend(compute.iter().rev().map(Gate::inverse));
    debug_assert!(ready <= t);
    Ok(Fragment { gates, raises })
}

/// Replaces every abstract MCT in `c` with its lowered fragment.
pub fn lower_circuit(c: &Circuit, lowering: Lowering) -> Result<Circuit, DecomposeError> {
    let logical = c.wires().clone();
    let mut out = Circuit::new(logical.clone());
    for g in c.gates() {
        if !g.is_mct() {
            out.push(g.clone())?;
            continue;
        }
        let frag = match (lowering, g.controls.len()) {
            (_, 0 | 1) | (Lowering::Vchain, _) => lower_vchain(g, &logical)?,
            (Lowering::Tree, _) => lower_tree(g, &logical)?,
        };
        for &(w, d) in &frag.raises {
            out.wires_mut().raise(w, d)?;
        }
        out.extend(frag.gates)?;
    }
    Ok(out)
}

/// Histogram of abstract MCT arities (number of controls) in `c`.
pub fn toffoli_census(c: &Circuit) -> BTreeMap<usize, usize> {
    let mut census = BTreeMap::new();
    for g in c.gates().iter().filter(|g| matches!(g.kind, GateKind::Mct)) {
        *census.entry(g.controls.len()).or_insert(0) += 1;
    }
    census
}

/// Cost of one MCT under the qubit-only decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardCostEntry {
    pub n_controls: usize,
    pub size: usize,
    pub depth: usize,
    pub one_qubit: usize,
    pub two_qubit: usize,
    /// Derived by linear extrapolation rather than taken from a table.
    pub extrapolated: bool,
}

impl StandardCostEntry {
    const fn known(n_controls: usize, size: usize, depth: usize, one_qubit: usize, two_qubit: usize) -> Self {
        StandardCostEntry { n_controls, size, depth, one_qubit, two_qubit, extrapolated: false }
    }
}

/// Per-arity costs of the qubit-only decomposition. Arities beyond the
/// largest tabulated one extrapolate linearly from the last two rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardCostModel {
    entries: BTreeMap<usize, StandardCostEntry>,
}

impl Default for StandardCostModel {
    fn default() -> Self {
        let rows = [
            StandardCostEntry::known(1, 1, 1, 0, 1),
            StandardCostEntry::known(2, 15, 12, 9, 6),
            StandardCostEntry::known(3, 27, 22, 14, 13),
            StandardCostEntry::known(4, 77, 60, 48, 29),
        ];
        StandardCostModel { entries: rows.into_iter().map(|e| (e.n_controls, e)).collect() }
    }
}

impl StandardCostModel {
    /// Adds or replaces a row.
    pub fn with_entry(mut self, entry: StandardCostEntry) -> Self {
        self.entries.insert(entry.n_controls, entry);
        self
    }

    pub fn cost(&self, n_controls: usize) -> Result<StandardCostEntry, DecomposeError> {
        if n_controls == 0 {
            return Err(DecomposeError::NoControls(0));
        }
        if let Some(e) = self.entries.get(&n_controls) {
            return Ok(*e);
        }
        let mut top = self.entries.values().rev();
        let (last, prev) = match (top.next(), top.next()) {
            (Some(l), Some(p)) if n_controls > l.n_controls => (*l, *p),
            _ => return Err(DecomposeError::NoControls(n_controls)),
        };
        let steps = (n_controls - last.n_controls) as i64;
        let span = (last.n_controls - prev.n_controls) as i64;
        let extend = |a: usize, b: usize| (a as i64 + steps * (a as i64 - b as i64) / span).max(0) as usize;
        Ok(StandardCostEntry {
            n_controls,
            size: extend(last.size, prev.size),
            depth: extend(last.depth, prev.depth),
            one_qubit: extend(last.one_qubit, prev.one_qubit),
            two_qubit: extend(last.two_qubit, prev.two_qubit),
            extrapolated: true,
        })
    }
}

/// Built-in standard cost for `n` controls.
pub fn standard_cost(n_controls: usize) -> Result<StandardCostEntry, DecomposeError> {
    StandardCostModel::default().cost(n_controls)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mct(n: usize) -> (Gate, WireTable) {
        let ctrls = (0..n).map(Control::on).collect();
        (Gate::mct(ctrls, n), WireTable::qubits(n + 1))
    }

    #[test]
    fn vchain_sizes_follow_two_n_minus_one() {
        for n in 2..=8 {
            let (g, w) = mct(n);
            let c = lower_vchain(&g, &w).unwrap().to_circuit(&w).unwrap();
            assert_eq!(c.size(), 2 * n - 1);
            assert_eq!(c.depth(), 2 * n - 1);
        }
    }

    #[test]
    fn vchain_two_controls_gate_list() {
        let (g, w) = mct(2);
        let f = lower_vchain(&g, &w).unwrap();
        let text: Vec<String> = f.gates.iter().map(|g| g.to_string()).collect();
        assert_eq!(text, ["inc +1 mod3 @1 | ctrl (0,1)", "x @2 | ctrl (1,2)", "inc -1 mod3 @1 | ctrl (0,1)"]);
        assert_eq!(f.raises, vec![(1, 3)]);
    }

    #[test]
    fn vchain_single_control_is_cnot() {
        let (g, w) = mct(1);
        let f = lower_vchain(&g, &w).unwrap();
        assert_eq!(f.gates, vec![Gate::cx(0, 1)]);
    }

    #[test]
    fn vchain_rejects_bad_input() {
        let w = WireTable::qubits(3);
        assert!(matches!(lower_vchain(&Gate::cx(0, 1), &w), Err(DecomposeError::NotAbstract(1))));
        let w3 = WireTable::with_dims(vec![3, 2, 2]).unwrap();
        let g = Gate::toffoli(&[0, 1], 2);
        assert!(matches!(lower_vchain(&g, &w3), Err(DecomposeError::NonBinaryControl { wire: 0 })));
    }

    #[test]
    fn staged_three_controls_has_seven_gates_and_cancels_to_five() {
        let (g, w) = mct(3);
        let staged = lower_vchain_staged(&g, &w).unwrap().to_circuit(&w).unwrap();
        assert_eq!(staged.size(), 7);
        let optimized = staged.cancel_adjacent_inverses();
        let chain = lower_vchain(&g, &w).unwrap().to_circuit(&w).unwrap();
        assert_eq!(optimized, chain);
    }

    #[test]
    fn staged_reduces_to_chain_for_all_sizes() {
        for n in 2..=7 {
            let (g, w) = mct(n);
            let staged = lower_vchain_staged(&g, &w).unwrap().to_circuit(&w).unwrap();
            assert_eq!(staged.size(), (1 << n) - 1);
            let chain = lower_vchain(&g, &w).unwrap().to_circuit(&w).unwrap();
            assert_eq!(staged.cancel_adjacent_inverses(), chain, "n = {n}");
        }
    }

    #[test]
    fn staged_compute_half_inverts_to_uncompute_half() {
        let (g, w) = mct(3);
        let f = lower_vchain_staged(&g, &w).unwrap();
        let half = f.gates.len() / 2;
        let compute = &f.gates[..half];
        let uncompute: Vec<Gate> = f.gates[half + 1..].to_vec();
        let inverted: Vec<Gate> = compute.iter().rev().map(Gate::inverse).collect();
        assert_eq!(uncompute, inverted);
    }

    #[test]
    fn dary_matches_chain_for_qubits() {
        let (g, w) = mct(2);
        assert_eq!(lower_dary(0, 1, 2, 2).unwrap(), lower_vchain(&g, &w).unwrap());
        let f = lower_dary(0, 1, 2, 3).unwrap();
        assert_eq!(f.raises, vec![(1, 4)]);
        assert_eq!(f.gates[0].controls, vec![Control::new(0, 2)]);
        assert!(matches!(lower_dary(0, 1, 2, 4), Err(DecomposeError::DimensionCap(4))));
    }

    #[test]
    fn tree_matches_chain_for_two_controls() {
        let (g, w) = mct(2);
        assert_eq!(lower_tree(&g, &w).unwrap(), lower_vchain(&g, &w).unwrap());
        let (g1, w1) = mct(1);
        assert!(matches!(lower_tree(&g1, &w1), Err(DecomposeError::TooFewControls(1))));
    }

    #[test]
    fn tree_depth_and_levels() {
        for n in 2..=20 {
            let (g, w) = mct(n);
            let f = lower_tree(&g, &w).unwrap();
            let c = f.to_circuit(&w).unwrap();
            assert!(f.max_level() <= 4);
            assert_eq!(c.size(), 2 * n - 1);
            assert_eq!(c.depth(), 2 * tree_compute_layers(n) + 1, "n = {n}");
            if n >= 4 {
                assert!(c.depth() <= 2 * n - 1);
            }
        }
        let (g5, w5) = mct(5);
        assert_eq!(lower_tree(&g5, &w5).unwrap().max_level(), 4);
        assert_eq!(tree_compute_layers(4), 2);
        assert_eq!(tree_compute_layers(7), 3);
        assert_eq!(tree_compute_layers(12), 4);
        assert_eq!(tree_compute_layers(13), 5);
    }

    #[test]
    fn lowering_a_circuit_raises_dims_and_removes_mct() {
        let mut c = Circuit::qubits(5);
        c.extend([Gate::h(0), Gate::toffoli(&[0, 1, 2, 3], 4), Gate::toffoli(&[3, 4], 0)]).unwrap();
        for lowering in [Lowering::Vchain, Lowering::Tree] {
            let low = lower_circuit(&c, lowering).unwrap();
            assert!(!low.has_mct());
            assert!(low.wires().dims().iter().all(|&d| (2..=4).contains(&d)));
        }
        let low = lower_circuit(&c, Lowering::Vchain).unwrap();
        assert_eq!(low.size(), 1 + 7 + 3);
    }

    #[test]
    fn census_counts_arities() {
        let mut c = Circuit::qubits(5);
        c.extend([Gate::toffoli(&[0, 1], 2), Gate::toffoli(&[0, 1, 2], 3), Gate::toffoli(&[1, 2], 4), Gate::cx(0, 1)])
            .unwrap();
        let census = toffoli_census(&c);
        assert_eq!(census, BTreeMap::from([(2, 2), (3, 1)]));
        let mut single = Circuit::qubits(3);
        single.push(Gate::toffoli(&[0, 1], 2)).unwrap();
        assert_eq!(toffoli_census(&single), BTreeMap::from([(2, 1)]));
    }

    #[test]
    fn standard_costs() {
        let c2 = standard_cost(2).unwrap();
        assert_eq!((c2.size, c2.depth, c2.one_qubit, c2.two_qubit), (15, 12, 9, 6));
        let c3 = standard_cost(3).unwrap();
        assert_eq!((c3.size, c3.depth, c3.one_qubit, c3.two_qubit), (27, 22, 14, 13));
        let c4 = standard_cost(4).unwrap();
        assert_eq!((c4.size, c4.depth, c4.one_qubit, c4.two_qubit), (77, 60, 48, 29));
        assert!(!c4.extrapolated);
        let c1 = standard_cost(1).unwrap();
        assert_eq!((c1.size, c1.depth, c1.one_qubit, c1.two_qubit), (1, 1, 0, 1));
        let c5 = standard_cost(5).unwrap();
        assert_eq!(c5.size, 127);
        assert_eq!(c5.depth, 98);
        assert_eq!(c5.one_qubit + c5.two_qubit, c5.size);
        assert!(c5.extrapolated);
        assert!(matches!(standard_cost(0), Err(DecomposeError::NoControls(0))));
    }

    #[test]
    fn user_supplied_entry_overrides_extrapolation() {
        let model = StandardCostModel::default().with_entry(StandardCostEntry {
            n_controls: 5,
            size: 100,
            depth: 80,
            one_qubit: 60,
            two_qubit: 40,
            extrapolated: false,
        });
        assert_eq!(model.cost(5).unwrap().size, 100);
        assert_eq!(model.cost(6).unwrap().size, 123);
    }
}
