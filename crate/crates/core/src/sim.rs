//! Exact mixed-radix state-vector simulation.
//!
//! Amplitudes are indexed by mixed-radix tuples with wire 0 most significant.
//! Storage is sparse: only basis states with non-negligible amplitude are kept,
//! so a 15-wire oracle whose wires are statically widened to qutrits or
//! ququarts costs memory proportional to the occupied support rather than to
//! the full product of dimensions.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{Circuit, Control, Gate, GateKind, Unitary, Wire};

/// Tolerance for state and matrix equality.
pub const STATE_TOL: f64 = 1e-9;
/// Tolerance for residual amplitude on ancilla or intermediate levels.
pub const RESIDUE_TOL: f64 = 1e-12;
/// Amplitudes with squared modulus below this are dropped after mixing gates.
const PRUNE: f64 = 1e-30;
/// Largest index space [`unitary_of`] and [`StateVector::to_dense`] accept.
pub const DENSE_CAP: u64 = 4096;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("state dimensions {state:?} do not match circuit dimensions {circuit:?}")]
    DimensionMismatch { state: Vec<u32>, circuit: Vec<u32> },
    #[error("abstract multi-controlled Toffoli on wire {0} must be lowered before simulation")]
    Unlowered(Wire),
    #[error("index space of {size} exceeds the cap of {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error("basis index {index} outside a space of {size}")]
    IndexOutOfRange { index: u64, size: u64 },
    #[error("wire {wire} out of range for {wires} wires")]
    WireOutOfRange { wire: Wire, wires: usize },
}

/// A normalised state over a mixed-radix register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: Vec<u32>,
    strides: Vec<u64>,
    size: u64,
    /// Non-zero amplitudes keyed by index; unique keys, not necessarily sorted.
    entries: Vec<(u64, Complex64)>,
}

fn strides_for(dims: &[u32]) -> Result<(Vec<u64>, u64), SimError> {
    let mut strides = vec![0u64; dims.len()];
    let mut acc: u128 = 1;
    for (w, &d) in dims.iter().enumerate().rev() {
        strides[w] = acc as u64;
        acc *= d as u128;
        if acc > (1u128 << 63) {
            let size = dims.iter().fold(1u128, |a, &d| a.saturating_mul(d as u128));
            return Err(SimError::TooLarge { size, cap: 1u128 << 63 });
        }
    }
    Ok((strides, acc as u64))
}

impl StateVector {
    /// The computational basis state with the given mixed-radix index.
    pub fn basis(dims: &[u32], index: u64) -> Result<Self, SimError> {
        let (strides, size) = strides_for(dims)?;
        if index >= size {
            return Err(SimError::IndexOutOfRange { index, size });
        }
        Ok(StateVector { dims: dims.to_vec(), strides, size, entries: vec![(index, Complex64::new(1.0, 0.0))] })
    }

    /// The all-zero basis state.
    pub fn zero(dims: &[u32]) -> Result<Self, SimError> {
        Self::basis(dims, 0)
    }

    /// Builds a state from `(index, amplitude)` pairs. Duplicate indices are summed.
    /// The input is not renormalised.
    pub fn from_entries(dims: &[u32], entries: impl IntoIterator<Item = (u64, Complex64)>) -> Result<Self, SimError> {
        let (strides, size) = strides_for(dims)?;
        let mut map: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (i, a) in entries {
            if i >= size {
                return Err(SimError::IndexOutOfRange { index: i, size });
            }
            *map.entry(i).or_default() += a;
        }
        let entries = map.into_iter().filter(|(_, a)| a.norm_sqr() > PRUNE).collect();
        Ok(StateVector { dims: dims.to_vec(), strides, size, entries })
    }

    pub fn from_dense(dims: &[u32], amps: &[Complex64]) -> Result<Self, SimError> {
        Self::from_entries(dims, amps.iter().enumerate().map(|(i, &a)| (i as u64, a)))
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn space_size(&self) -> u64 {
        self.size
    }

    /// Number of stored (non-zero) amplitudes.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Stored amplitudes sorted by index.
    pub fn entries(&self) -> Vec<(u64, Complex64)> {
        let mut e = self.entries.clone();
        e.sort_unstable_by_key(|&(i, _)| i);
        e
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.entries
            .iter()
            .find(|&&(i, _)| i == index)
            .map(|&(_, a)| a)
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn to_dense(&self) -> Result<Vec<Complex64>, SimError> {
        if self.size > DENSE_CAP {
            return Err(SimError::TooLarge { size: self.size as u128, cap: DENSE_CAP as u128 });
        }
        let mut v = vec![Complex64::default(); self.size as usize];
        for &(i, a) in &self.entries {
            v[i as usize] = a;
        }
        Ok(v)
    }

    #[inline]
    pub fn digit(&self, index: u64, wire: Wire) -> u32 {
        ((index / self.strides[wire]) % self.dims[wire] as u64) as u32
    }

    pub fn digits(&self, index: u64) -> Vec<u32> {
        (0..self.dims.len()).map(|w| self.digit(index, w)).collect()
    }

    /// Mixed-radix index of a digit tuple (wire 0 most significant).
    pub fn index_of(&self, digits: &[u32]) -> u64 {
        digits.iter().zip(&self.strides).map(|(&d, &s)| d as u64 * s).sum()
    }

    #[inline]
    fn controls_hold(&self, index: u64, controls: &[Control]) -> bool {
        controls.iter().all(|c| self.digit(index, c.wire) == c.value)
    }

    /// Applies one lowered gate.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        for w in gate.wires() {
            if w >= self.dims.len() {
                return Err(SimError::WireOutOfRange { wire: w, wires: self.dims.len() });
            }
        }
        let t = gate.target;
        let stride = self.strides[t];
        match gate.kind {
            GateKind::Mct => return Err(SimError::Unlowered(t)),
            GateKind::Increment { delta, modulus } => {
                let m = modulus as i64;
                for k in 0..self.entries.len() {
                    let idx = self.entries[k].0;
                    if !self.controls_hold(idx, &gate.controls) {
                        continue;
                    }
                    let d = self.digit(idx, t) as i64;
                    if d >= m {
                        continue;
                    }
                    let nd = (d + delta as i64).rem_euclid(m);
                    self.entries[k].0 = (idx as i64 + (nd - d) * stride as i64) as u64;
                }
            }
            GateKind::Unitary(Unitary::X) => {
                for k in 0..self.entries.len() {
                    let idx = self.entries[k].0;
                    if !self.controls_hold(idx, &gate.controls) {
                        continue;
                    }
                    match self.digit(idx, t) {
                        0 => self.entries[k].0 = idx + stride,
                        1 => self.entries[k].0 = idx - stride,
                        _ => {}
                    }
                }
            }
            GateKind::Unitary(Unitary::Z) => self.apply_diagonal(gate, Complex64::new(-1.0, 0.0)),
            GateKind::Unitary(Unitary::Phase(theta)) => self.apply_diagonal(gate, Complex64::from_polar(1.0, theta)),
            GateKind::Unitary(u) => self.apply_mixing(gate, matrix(u)),
        }
        Ok(())
    }

    fn apply_diagonal(&mut self, gate: &Gate, phase: Complex64) {
        for k in 0..self.entries.len() {
            let idx = self.entries[k].0;
            if self.controls_hold(idx, &gate.controls) && self.digit(idx, gate.target) == 1 {
                self.entries[k].1 *= phase;
            }
        }
    }

    fn apply_mixing(&mut self, gate: &Gate, m: [[Complex64; 2]; 2]) {
        let t = gate.target;
        let stride = self.strides[t];
        let mut passive = Vec::with_capacity(self.entries.len());
        let mut active: Vec<(u64, u32, Complex64)> = Vec::new();
        for &(idx, a) in &self.entries {
            let d = self.digit(idx, t);
            if d <= 1 && self.controls_hold(idx, &gate.controls) {
                active.push((idx - d as u64 * stride, d, a));
            } else {
                passive.push((idx, a));
            }
        }
        active.sort_unstable_by_key(|&(base, d, _)| (base, d));
        let mut out = passive;
        let mut k = 0;
        while k < active.len() {
            let base = active[k].0;
            let mut x = [Complex64::default(); 2];
            while k < active.len() && active[k].0 == base {
                x[active[k].1 as usize] = active[k].2;
                k += 1;
            }
            let y0 = m[0][0] * x[0] + m[0][1] * x[1];
            let y1 = m[1][0] * x[0] + m[1][1] * x[1];
            if y0.norm_sqr() > PRUNE {
                out.push((base, y0));
            }
            if y1.norm_sqr() > PRUNE {
                out.push((base + stride, y1));
            }
        }
        self.entries = out;
    }

    /// Applies every gate of `c` in order; `c` must share this state's dimensions.
    pub fn run_circuit(&mut self, c: &Circuit) -> Result<(), SimError> {
        if c.wires().dims() != self.dims.as_slice() {
            return Err(SimError::DimensionMismatch { state: self.dims.clone(), circuit: c.wires().dims().to_vec() });
        }
        for g in c.gates() {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Marginal probabilities over `wires`, keyed by the concatenated digits
    /// of those wires in the order given.
    pub fn probabilities(&self, wires: &[Wire]) -> Result<BTreeMap<String, f64>, SimError> {
        for &w in wires {
            if w >= self.dims.len() {
                return Err(SimError::WireOutOfRange { wire: w, wires: self.dims.len() });
            }
        }
        let mut out = BTreeMap::new();
        for (idx, a) in self.entries() {
            let key: String = wires
                .iter()
                .map(|&w| char::from_digit(self.digit(idx, w), 10).expect("dimension <= 4"))
                .collect();
            *out.entry(key).or_insert(0.0) += a.norm_sqr();
        }
        Ok(out)
    }

    /// Total probability on basis states where any of `wires` is non-zero.
    pub fn weight_off_zero(&self, wires: &[Wire]) -> f64 {
        self.entries
            .iter()
            .filter(|(idx, _)| wires.iter().any(|&w| self.digit(*idx, w) != 0))
            .map(|(_, a)| a.norm_sqr())
            .fold(0.0, |acc, p| acc + p)
    }

    /// Total probability on basis states where any wire holds a level `>= 2`.
    pub fn weight_on_raised_levels(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(idx, _)| (0..self.dims.len()).any(|w| self.digit(*idx, w) >= 2))
            .map(|(_, a)| a.norm_sqr())
            .fold(0.0, |acc, p| acc + p)
    }

    /// `|<self|other>|`, i.e. overlap magnitude ignoring global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        let b: BTreeMap<u64, Complex64> = other.entries.iter().copied().collect();
        self.entries
            .iter()
            .filter_map(|(i, a)| b.get(i).map(|bb| a.conj() * bb))
            .sum::<Complex64>()
            .norm()
    }

    /// Distance between states after removing the global phase of `other`
    /// relative to `self`.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        let b: BTreeMap<u64, Complex64> = other.entries.iter().copied().collect();
        let inner: Complex64 = self.entries.iter().filter_map(|(i, a)| b.get(i).map(|bb| a.conj() * bb)).sum();
        let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
        let a: BTreeMap<u64, Complex64> = self.entries.iter().copied().collect();
        let keys: std::collections::BTreeSet<u64> = a.keys().chain(b.keys()).copied().collect();
        keys.into_iter()
            .map(|k| {
                let x = a.get(&k).copied().unwrap_or_default() * phase;
                let y = b.get(&k).copied().unwrap_or_default();
                (x - y).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }
}

fn matrix(u: Unitary) -> [[Complex64; 2]; 2] {
    let c = |re: f64| Complex64::new(re, 0.0);
    match u {
        Unitary::H => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            [[c(s), c(s)], [c(s), c(-s)]]
        }
        Unitary::X => [[c(0.0), c(1.0)], [c(1.0), c(0.0)]],
        Unitary::Z => [[c(1.0), c(0.0)], [c(0.0), c(-1.0)]],
        Unitary::Ry(t) => {
            let (s, co) = (t / 2.0).sin_cos();
            [[c(co), c(-s)], [c(s), c(co)]]
        }
        Unitary::Phase(t) => [[c(1.0), c(0.0)], [c(0.0), Complex64::from_polar(1.0, t)]],
    }
}

/// Runs `c` from `initial` and returns the final state.
pub fn run(c: &Circuit, initial: &StateVector) -> Result<StateVector, SimError> {
    let mut s = initial.clone();
    s.run_circuit(c)?;
    Ok(s)
}

/// Runs `c` from the basis state with the given index.
pub fn run_basis(c: &Circuit, index: u64) -> Result<StateVector, SimError> {
    let mut s = StateVector::basis(c.wires().dims(), index)?;
    s.run_circuit(c)?;
    Ok(s)
}

/// Seeded multinomial sampling from a probability table. Keys are visited in
/// sorted order so the result depends only on the table and the RNG stream.
pub fn sample_from<R: Rng>(probs: &BTreeMap<String, f64>, shots: u64, rng: &mut R) -> BTreeMap<String, u64> {
    let mut keys = Vec::with_capacity(probs.len());
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for (k, &p) in probs {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        keys.push(k.clone());
        cumulative.push(acc);
    }
    let mut hist = BTreeMap::new();
    if keys.is_empty() {
        return hist;
    }
    for _ in 0..shots {
        let u = rng.gen::<f64>() * acc;
        let i = cumulative.partition_point(|&c| c <= u).min(keys.len() - 1);
        *hist.entry(keys[i].clone()).or_insert(0) += 1;
    }
    hist
}

/// Measures `wires` of `state` `shots` times with a fixed seed.
pub fn sample(state: &StateVector, wires: &[Wire], shots: u64, seed: u64) -> Result<BTreeMap<String, u64>, SimError> {
    let probs = state.probabilities(wires)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_from(&probs, shots, &mut rng))
}

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::default(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        DenseMatrix { dim, data }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        DenseMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut data = vec![Complex64::default(); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == Complex64::default() {
                    continue;
                }
                for c in 0..n {
                    data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        DenseMatrix { dim: n, data }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Like [`DenseMatrix::max_abs_diff`] after aligning the global phase of
    /// `self` to `other` on the largest entry of `other`.
    pub fn max_abs_diff_up_to_phase(&self, other: &DenseMatrix) -> f64 {
        let (k, _) = other
            .data
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("non-empty matrix");
        let phase = if self.data[k].norm() > 0.0 { other.data[k] / self.data[k] } else { Complex64::new(1.0, 0.0) };
        let phase = phase / phase.norm();
        self.data.iter().zip(&other.data).map(|(a, b)| (a * phase - b).norm()).fold(0.0, f64::max)
    }
}

/// Full unitary of `c`: column `j` is `run(c, |j>)`. Limited to index
/// spaces of at most [`DENSE_CAP`].
pub fn unitary_of(c: &Circuit) -> Result<DenseMatrix, SimError> {
    let size = c.wires().space_size();
    if size > DENSE_CAP as u128 {
        return Err(SimError::TooLarge { size, cap: DENSE_CAP as u128 });
    }
    let n = size as usize;
    let mut data = vec![Complex64::default(); n * n];
    for j in 0..n {
        let out = run_basis(c, j as u64)?;
        for (i, a) in out.entries() {
            data[i as usize * n + j] = a;
        }
    }
    Ok(DenseMatrix { dim: n, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::WireTable;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn toffoli_qutrit() -> Circuit {
        let mut circ = Circuit::new(WireTable::with_dims(vec![2, 3, 2]).unwrap());
        circ.extend([
            Gate::increment(1, 3, 1, vec![Control::on(0)]),
            Gate::controlled(Unitary::X, 2, vec![Control::new(1, 2)]),
            Gate::increment(-1, 3, 1, vec![Control::on(0)]),
        ])
        .unwrap();
        circ
    }

    #[test]
    fn toffoli_truth_table() {
        let circ = toffoli_qutrit();
        let s = StateVector::zero(&[2, 3, 2]).unwrap();
        let i110 = s.index_of(&[1, 1, 0]);
        let out = run_basis(&circ, i110).unwrap();
        assert_eq!(out.entries(), vec![(s.index_of(&[1, 1, 1]), c(1.0))]);
        let i100 = s.index_of(&[1, 0, 0]);
        assert_eq!(run_basis(&circ, i100).unwrap().entries(), vec![(i100, c(1.0))]);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let dims = [2, 2];
        let psi = StateVector::from_dense(&dims, &[c(0.6), c(0.0), c(0.0), c(0.8)]).unwrap();
        let out = run(&Circuit::qubits(2), &psi).unwrap();
        assert_eq!(out.entries(), psi.entries());
    }

    #[test]
    fn dimension_mismatch_and_unlowered() {
        let psi = StateVector::zero(&[2, 2]).unwrap();
        assert!(matches!(run(&toffoli_qutrit(), &psi), Err(SimError::DimensionMismatch { .. })));
        let mut mct = Circuit::qubits(3);
        mct.push(Gate::mct(vec![Control::on(0), Control::on(1)], 2)).unwrap();
        assert!(matches!(run_basis(&mct, 0), Err(SimError::Unlowered(2))));
    }

    #[test]
    fn uniform_marginals() {
        let mut circ = Circuit::qubits(2);
        circ.extend([Gate::h(0), Gate::h(1)]).unwrap();
        let out = run_basis(&circ, 0).unwrap();
        let p = out.probabilities(&[0]).unwrap();
        assert!((p["0"] - 0.5).abs() < STATE_TOL);
        assert!((p["1"] - 0.5).abs() < STATE_TOL);
        let total: f64 = out.probabilities(&[0, 1]).unwrap().values().sum();
        assert!((total - 1.0).abs() < STATE_TOL);
    }

    #[test]
    fn hadamard_twice_cancels_exactly() {
        let mut circ = Circuit::qubits(1);
        circ.extend([Gate::h(0), Gate::h(0)]).unwrap();
        let out = run_basis(&circ, 0).unwrap();
        assert_eq!(out.support_len(), 1);
        assert!((out.amplitude(0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampling_basis_and_determinism() {
        let s = StateVector::zero(&[2]).unwrap();
        let h = sample(&s, &[0], 100, 3).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h["0"], 100);

        let mut probs = BTreeMap::new();
        probs.insert("0".to_string(), 0.9);
        probs.insert("1".to_string(), 0.1);
        let mut r1 = ChaCha8Rng::seed_from_u64(11);
        let mut r2 = ChaCha8Rng::seed_from_u64(11);
        let a = sample_from(&probs, 10_000, &mut r1);
        let b = sample_from(&probs, 10_000, &mut r2);
        assert_eq!(a, b);
        let frac = a["0"] as f64 / 10_000.0;
        assert!((frac - 0.9).abs() < 0.02, "{frac}");
    }

    #[test]
    fn unitary_times_inverse_is_identity() {
        let mut circ = Circuit::new(WireTable::with_dims(vec![2, 3, 4]).unwrap());
        circ.extend([
            Gate::h(0),
            Gate::controlled(Unitary::Ry(0.7), 1, vec![Control::on(0)]),
            Gate::increment(1, 3, 1, vec![Control::on(0)]),
            Gate::increment(-1, 4, 2, vec![Control::new(1, 2)]),
            Gate::controlled(Unitary::Phase(0.4), 2, vec![Control::new(1, 1)]),
        ])
        .unwrap();
        let u = unitary_of(&circ).unwrap();
        let v = unitary_of(&circ.inverse()).unwrap();
        assert!(v.mul(&u).max_abs_diff(&DenseMatrix::identity(24)) < STATE_TOL);
    }

    #[test]
    fn unitary_size_cap() {
        let circ = Circuit::qubits(13);
        assert!(matches!(unitary_of(&circ), Err(SimError::TooLarge { .. })));
    }

    #[test]
    fn increment_full_cycle_is_identity() {
        for m in 2..=4u32 {
            let mut circ = Circuit::new(WireTable::with_dims(vec![4]).unwrap());
            for _ in 0..m {
                circ.push(Gate::increment(1, m, 0, vec![])).unwrap();
            }
            let u = unitary_of(&circ).unwrap();
            assert!(u.max_abs_diff(&DenseMatrix::identity(4)) < STATE_TOL);
        }
    }
}
