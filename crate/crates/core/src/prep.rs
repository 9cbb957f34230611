//! Initial-state circuits: uniform superposition over all bitstrings, the W
//! state, and Dicke states of fixed Hamming weight.
//!
//! All builders start from `|0...0>` and use only single-qubit gates, CNOTs
//! and singly-controlled Y rotations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Control, Gate, Unitary, Wire};
use crate::graph::binomial;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrepError {
    #[error("state preparation needs at least one wire")]
    NoWires,
    #[error("Hamming weight {k} is outside 1..={n}")]
    WeightOutOfRange { n: usize, k: usize },
    #[error("the W state only covers weight {n_minus_one} subsets of {n} vertices, not weight {k}")]
    WeightNotSupported { n: usize, k: usize, n_minus_one: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepKind {
    FullHilbert,
    WState,
    Dicke { k: usize },
}

/// A state-preparation request over `n` qubit wires.
///
/// With `complement` set, every wire is flipped after preparation, which turns
/// a weight-`w` superposition into a weight-`n - w` one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepSpec {
    pub kind: PrepKind,
    pub n: usize,
    pub complement: bool,
}

impl PrepSpec {
    pub fn new(kind: PrepKind, n: usize) -> Result<Self, PrepError> {
        if n == 0 {
            return Err(PrepError::NoWires);
        }
        if let PrepKind::Dicke { k } = kind {
            if k == 0 || k > n {
                return Err(PrepError::WeightOutOfRange { n, k });
            }
        }
        Ok(PrepSpec { kind, n, complement: false })
    }

    /// Preparation restricted to weight-`k` vertex subsets for a `k`-clique
    /// search. The W state serves only `k = n - 1`, by complementing.
    pub fn for_clique(kind: PrepKind, n: usize, k: usize) -> Result<Self, PrepError> {
        match kind {
            PrepKind::FullHilbert => PrepSpec::new(kind, n),
            PrepKind::Dicke { .. } => PrepSpec::new(PrepKind::Dicke { k }, n),
            PrepKind::WState => {
                if n < 2 || k + 1 != n {
                    return Err(PrepError::WeightNotSupported { n, k, n_minus_one: n.saturating_sub(1) });
                }
                Ok(PrepSpec { kind, n, complement: true })
            }
        }
    }

    /// Number of basis states in the prepared superposition.
    pub fn search_space_size(&self) -> u64 {
        match self.kind {
            PrepKind::FullHilbert => 1u64 << self.n,
            PrepKind::WState => self.n as u64,
            PrepKind::Dicke { k } => binomial(self.n, k),
        }
    }

    /// Fixed Hamming weight of the support, if any.
    pub fn hamming_weight(&self) -> Option<usize> {
        let w = match self.kind {
            PrepKind::FullHilbert => return None,
            PrepKind::WState => 1,
            PrepKind::Dicke { k } => k,
        };
        Some(if self.complement { self.n - w } else { w })
    }

    /// Circuit on `n` qubit wires.
    pub fn circuit(&self) -> Circuit {
        let mut c = match self.kind {
            PrepKind::FullHilbert => hadamard_prep(self.n),
            PrepKind::WState => w_state_prep(self.n),
            PrepKind::Dicke { k } => dicke_prep(self.n, k).expect("weight validated at construction"),
        };
        if self.complement {
            for w in 0..self.n {
                c.push(Gate::x(w)).expect("wire in range");
            }
        }
        c
    }
}

/// One Hadamard per wire.
pub fn hadamard_prep(n: usize) -> Circuit {
    let mut c = Circuit::qubits(n);
    c.extend((0..n).map(Gate::h)).expect("wires in range");
    c
}

fn cry(theta: f64, control: Wire, target: Wire) -> Gate {
    Gate::controlled(Unitary::Ry(theta), target, vec![Control::on(control)])
}

/// Cascade construction: start from `|10...0>` and, at each step, move all
/// but a `1/(n - i)` share of the remaining amplitude one wire to the right.
pub fn w_state_prep(n: usize) -> Circuit {
    let mut c = Circuit::qubits(n);
    if n == 0 {
        return c;
    }
    let mut gates = vec![Gate::x(0)];
    for i in 0..n - 1 {
        let theta = 2.0 * (1.0 / (n - i) as f64).sqrt().acos();
        gates.push(cry(theta, i, i + 1));
        gates.push(Gate::cx(i + 1, i));
    }
    c.extend(gates).expect("wires in range");
    c
}

/// Y rotation of `target` by `theta` controlled on both `a` and `b`, as five
/// two-wire gates.
fn ccry(theta: f64, a: Wire, b: Wire, target: Wire) -> [Gate; 5] {
    [
        cry(theta / 2.0, b, target),
        Gate::cx(a, b),
        cry(-theta / 2.0, b, target),
        Gate::cx(a, b),
        cry(theta / 2.0, a, target),
    ]
}

/// Split-and-cyclic-shift block on 1-indexed positions `l - m ..= l`.
fn scs(l: usize, m: usize, out: &mut Vec<Gate>) {
    let q = |pos: usize| pos - 1;
    let lf = l as f64;
    out.push(Gate::cx(q(l - 1), q(l)));
    out.push(cry(2.0 * (1.0 / lf).sqrt().acos(), q(l), q(l - 1)));
    out.push(Gate::cx(q(l - 1), q(l)));
    for j in 2..=m {
        let theta = 2.0 * (j as f64 / lf).sqrt().acos();
        out.push(Gate::cx(q(l - j), q(l)));
        out.extend(ccry(theta, q(l), q(l - j + 1), q(l - j)));
        out.push(Gate::cx(q(l - j), q(l)));
    }
}

/// Deterministic Dicke-state preparation: flip the last `k` wires, then apply
/// split-and-cyclic-shift blocks for `l = n` down to `2`. Gate count is
/// `O(n k)`.
pub fn dicke_prep(n: usize, k: usize) -> Result<Circuit, PrepError> {
    if n == 0 {
        return Err(PrepError::NoWires);
    }
    if k == 0 || k > n {
        return Err(PrepError::WeightOutOfRange { n, k });
    }
    let mut gates: Vec<Gate> = (n - k..n).map(Gate::x).collect();
    for l in (2..=n).rev() {
        scs(l, k.min(l - 1), &mut gates);
    }
    let mut c = Circuit::qubits(n);
    c.extend(gates).expect("wires in range");
    Ok(c)
}
