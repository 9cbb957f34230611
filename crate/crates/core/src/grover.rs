//! Grover search for k-cliques, with known or unknown solution counts, and
//! a descending driver for maximum clique.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, IrError, Wire};
use crate::decompose::{lower_circuit, DecomposeError, Lowering};
use crate::graph::{binomial, Graph, VertexSet};
use crate::oracle::{build_oracle, Oracle, OracleError, OracleKind, OracleVariant};
use crate::prep::{PrepError, PrepKind, PrepSpec};
use crate::sim::{sample, sample_from, DenseMatrix, SimError, StateVector, RESIDUE_TOL};

/// Largest vertex count the search pipeline accepts.
pub const MAX_SEARCH_VERTICES: usize = 16;

/// Largest vertex register for which rounds reuse a dense iterate matrix.
const OPERATOR_MAX_VERTICES: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum GroverError {
    #[error("no {k}-clique exists, so there is nothing to amplify")]
    NoMarkedStates { k: usize },
    #[error("solution count {m} is outside 1..={n}")]
    BadSolutionCount { n: u64, m: u64 },
    #[error("shots must be at least 1")]
    NoShots,
    #[error("{n} vertices exceed the search limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("the iterate leaves {0:e} probability outside the vertex register")]
    DirtyIterate(f64),
    #[error(transparent)]
    Prep(#[from] PrepError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrepChoice {
    /// Dicke when `k < n`, otherwise the full Hilbert space.
    #[default]
    Auto,
    Hilbert,
    W,
    Dicke,
}

impl PrepChoice {
    pub fn spec(self, n: usize, k: usize) -> Result<PrepSpec, PrepError> {
        let kind = match self {
            PrepChoice::Auto if k < n => PrepKind::Dicke { k },
            PrepChoice::Auto | PrepChoice::Hilbert => PrepKind::FullHilbert,
            PrepChoice::W => PrepKind::WState,
            PrepChoice::Dicke => PrepKind::Dicke { k },
        };
        PrepSpec::for_clique(kind, n, k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diffuser {
    Standard,
    PrepConjugated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverConfig {
    pub prep: PrepChoice,
    pub oracle: OracleVariant,
    pub lowering: Lowering,
    /// `None` picks the standard diffuser for full-Hilbert input and the
    /// prep-conjugated one otherwise.
    pub diffuser: Option<Diffuser>,
    pub shots: u64,
    pub seed: u64,
    pub max_boyer_rounds: u32,
    /// Overrides the computed iteration count of the known-count search.
    pub iterations: Option<usize>,
}

impl Default for GroverConfig {
    fn default() -> Self {
        GroverConfig {
            prep: PrepChoice::Auto,
            oracle: OracleVariant::Checking,
            lowering: Lowering::Vchain,
            diffuser: None,
            shots: 1024,
            seed: 0,
            max_boyer_rounds: 6,
            iterations: None,
        }
    }
}

impl GroverConfig {
    fn diffuser_for(&self, prep: &PrepSpec) -> Diffuser {
        self.diffuser.unwrap_or(match prep.kind {
            PrepKind::FullHilbert => Diffuser::Standard,
            _ => Diffuser::PrepConjugated,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub found: bool,
    pub witness: Option<VertexSet>,
    pub k: usize,
    /// Grover iterates applied; for the escalating search, summed over rounds.
    pub iterations_used: usize,
    pub rounds: u32,
    /// Probability mass on k-clique states in the final simulated state.
    pub success_probability: f64,
    pub histogram: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped_k: Vec<usize>,
}

impl SearchResult {
    fn empty(k: usize) -> Self {
        SearchResult {
            found: false,
            witness: None,
            k,
            iterations_used: 0,
            rounds: 0,
            success_probability: 0.0,
            histogram: BTreeMap::new(),
            skipped_k: Vec::new(),
        }
    }

    /// Histogram as `basis_string,count,probability` lines.
    pub fn histogram_csv(&self) -> String {
        let total: u64 = self.histogram.values().sum();
        let mut out = String::from("basis_string,count,probability\n");
        for (key, &count) in &self.histogram {
            let p = if total == 0 { 0.0 } else { count as f64 / total as f64 };
            out.push_str(&format!("{key},{count},{p}\n"));
        }
        out
    }
}

/// Reflection about the uniform superposition: H, X, a multi-controlled Z on
/// the last wire, X, H.
pub fn diffusion_standard(n: usize) -> Circuit {
    let mut c = Circuit::qubits(n);
    let mut gates: Vec<Gate> = (0..n).map(Gate::h).collect();
    gates.extend((0..n).map(Gate::x));
    gates.extend(zero_reflection_core(n));
    gates.extend((0..n).map(Gate::x));
    gates.extend((0..n).map(Gate::h));
    c.extend(gates).expect("wires in range");
    c
}

fn zero_reflection_core(n: usize) -> Vec<Gate> {
    let last = n - 1;
    let controls: Vec<Wire> = (0..last).collect();
    vec![Gate::h(last), Gate::toffoli(&controls, last), Gate::h(last)]
}

/// Reflection about `prep |0...0>`: undo the preparation, reflect about the
/// all-zero state, redo the preparation.
pub fn diffusion_prep_conjugated(prep: &Circuit) -> Circuit {
    let n = prep.num_wires();
    let mut c = prep.inverse();
    let mut gates: Vec<Gate> = (0..n).map(Gate::x).collect();
    gates.extend(zero_reflection_core(n));
    gates.extend((0..n).map(Gate::x));
    c.extend(gates).expect("wires in range");
    c.append_circuit(prep).expect("same wire count");
    c
}

/// `max(1, floor(pi/4 * sqrt(N/M)))`.
pub fn optimal_iterations(n: u64, m: u64) -> Result<usize, GroverError> {
    if m == 0 || m > n {
        return Err(GroverError::BadSolutionCount { n, m });
    }
    Ok(((FRAC_PI_4 * (n as f64 / m as f64).sqrt()).floor() as usize).max(1))
}

/// Circuits of one search instance, lowered to a shared set of wire dimensions.
#[derive(Clone, Debug)]
pub struct GroverPipeline {
    pub oracle: Oracle,
    pub prep: PrepSpec,
    pub diffuser: Diffuser,
    /// Preparation of the vertex register and `|->` on the target.
    pub prefix: Circuit,
    /// One oracle call followed by one diffusion.
    pub iterate: Circuit,
    /// `prefix` and `iterate` before lowering.
    pub logical_prefix: Circuit,
    pub logical_iterate: Circuit,
}

impl GroverPipeline {
    pub fn new(g: &Graph, k: usize, config: &GroverConfig) -> Result<Self, GroverError> {
        let n = g.n();
        if n > MAX_SEARCH_VERTICES {
            return Err(GroverError::TooLarge { n, max: MAX_SEARCH_VERTICES });
        }
        let prep = config.prep.spec(n, k)?;
        let kind = OracleKind { variant: config.oracle, count_nodes: prep.kind == PrepKind::FullHilbert };
        let oracle = build_oracle(g, k, kind)?;
        let diffuser = config.diffuser_for(&prep);
        let prep_circuit = prep.circuit();
        let diffusion = match diffuser {
            Diffuser::Standard => diffusion_standard(n),
            Diffuser::PrepConjugated => diffusion_prep_conjugated(&prep_circuit),
        };

        let target = oracle.layout.target;
        let mut prefix = Circuit::new(oracle.layout.wires.clone());
        prefix.extend(prep_circuit.gates().iter().cloned())?;
        prefix.extend([Gate::x(target), Gate::h(target)])?;
        let mut iterate = oracle.circuit.clone();
        iterate.extend(diffusion.gates().iter().cloned())?;

        let logical_prefix = prefix;
        let logical_iterate = iterate;
        let mut prefix = lower_circuit(&logical_prefix, config.lowering)?;
        let mut iterate = lower_circuit(&logical_iterate, config.lowering)?;
        prefix.widen(iterate.wires().dims())?;
        iterate.widen(prefix.wires().dims())?;
        Ok(GroverPipeline { oracle, prep, diffuser, prefix, iterate, logical_prefix, logical_iterate })
    }

    /// Unlowered prefix followed by `t` iterates.
    pub fn logical_circuit(&self, t: usize) -> Circuit {
        let mut c = self.logical_prefix.clone();
        for _ in 0..t {
            c.append_circuit(&self.logical_iterate).expect("same wire table");
        }
        c
    }

    pub fn vertex_wires(&self) -> &[Wire] {
        &self.oracle.layout.vertex_wires
    }

    /// Simulated state after the prefix and `t` iterates.
    pub fn state_after(&self, t: usize) -> Result<StateVector, GroverError> {
        let mut s = StateVector::zero(self.prefix.wires().dims())?;
        s.run_circuit(&self.prefix)?;
        for _ in 0..t {
            s.run_circuit(&self.iterate)?;
        }
        Ok(s)
    }

    /// Action of the iterate on the vertex register, given scratch wires at
    /// zero and the target in `|->`. Fails if any input leaks outside that
    /// subspace.
    pub fn vertex_operator(&self) -> Result<DenseMatrix, GroverError> {
        let n = self.vertex_wires().len();
        let dims = self.iterate.wires().dims().to_vec();
        let target = self.oracle.layout.target;
        let probe = StateVector::zero(&dims)?;
        let index = |x: usize, t: u32| {
            let mut digits = vec![0u32; dims.len()];
            for (i, d) in digits.iter_mut().take(n).enumerate() {
                *d = (x >> (n - 1 - i) & 1) as u32;
            }
            digits[target] = t;
            probe.index_of(&digits)
        };
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let dim = 1usize << n;
        let mut columns = Vec::with_capacity(dim);
        let mut leak = 0.0;
        for x in 0..dim {
            let input = StateVector::from_entries(
                &dims,
                [(index(x, 0), Complex64::new(h, 0.0)), (index(x, 1), Complex64::new(-h, 0.0))],
            )?;
            let out = crate::sim::run(&self.iterate, &input)?;
            let col: Vec<Complex64> = (0..dim).map(|y| out.amplitude(index(y, 0)) / h).collect();
            let kept: f64 = col.iter().map(|a| a.norm_sqr()).sum();
            leak += (1.0 - kept).abs();
            columns.push(col);
        }
        if leak > RESIDUE_TOL * dim as f64 {
            return Err(GroverError::DirtyIterate(leak));
        }
        Ok(DenseMatrix::from_fn(dim, |r, c| columns[c][r]))
    }

    /// Vertex-register amplitudes right after preparation.
    pub fn prepared_vertex_state(&self) -> Result<Vec<Complex64>, GroverError> {
        Ok(crate::sim::run_basis(&self.prep.circuit(), 0)?.to_dense()?)
    }
}

fn mat_vec(m: &DenseMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.dim()).map(|r| (0..m.dim()).map(|c| m.get(r, c) * v[c]).sum()).collect()
}

/// Applies `m^p` to `v` by repeated squaring.
fn apply_power(m: &DenseMatrix, mut p: usize, v: Vec<Complex64>) -> Vec<Complex64> {
    let mut v = v;
    let mut base = m.clone();
    while p > 0 {
        if p & 1 == 1 {
            v = mat_vec(&base, &v);
        }
        p >>= 1;
        if p > 0 {
            base = base.mul(&base);
        }
    }
    v
}

fn key_probabilities(v: &[Complex64], n: usize) -> BTreeMap<String, f64> {
    v.iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(i, a)| (format!("{i:0n$b}"), a.norm_sqr()))
        .collect()
}

fn clique_of(g: &Graph, key: &str, k: usize) -> Option<VertexSet> {
    let set = VertexSet::from_ket(key)?;
    (set.len() == k && g.is_clique(&set)).then_some(set)
}

fn clique_mass(g: &Graph, probs: &BTreeMap<String, f64>, k: usize) -> f64 {
    probs.iter().filter(|(key, _)| clique_of(g, key, k).is_some()).map(|(_, p)| p).sum()
}

/// Grover search with the iteration count planned from the classically
/// computed number of `k`-cliques.
pub fn grover_known_m(g: &Graph, k: usize, config: &GroverConfig) -> Result<SearchResult, GroverError> {
    if config.shots == 0 {
        return Err(GroverError::NoShots);
    }
    let pipeline = GroverPipeline::new(g, k, config)?;
    let marked: Vec<String> = g
        .enumerate_k_cliques(k)
        .map_err(|_| GroverError::TooLarge { n: g.n(), max: MAX_SEARCH_VERTICES })?
        .iter()
        .map(|s| s.to_ket(g.n()))
        .collect();
    if marked.is_empty() {
        return Err(GroverError::NoMarkedStates { k });
    }
    let t = match config.iterations {
        Some(t) => t,
        None => optimal_iterations(pipeline.prep.search_space_size(), marked.len() as u64)?,
    };
    let state = pipeline.state_after(t)?;
    let probs = state.probabilities(pipeline.vertex_wires())?;
    let success_probability = marked.iter().filter_map(|m| probs.get(m)).sum();
    let histogram = sample(&state, pipeline.vertex_wires(), config.shots, config.seed)?;
    let witness = histogram
        .iter()
        .filter(|(key, _)| marked.contains(key))
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .and_then(|(key, _)| VertexSet::from_ket(key));
    Ok(SearchResult {
        found: witness.is_some(),
        witness,
        k,
        iterations_used: t,
        rounds: 1,
        success_probability,
        histogram,
        skipped_k: Vec::new(),
    })
}

/// Grover search without knowing the solution count: round `r` runs `6^r`
/// iterates and measures once; the outcome is checked classically.
pub fn grover_unknown_m(g: &Graph, k: usize, config: &GroverConfig) -> Result<SearchResult, GroverError> {
    let pipeline = GroverPipeline::new(g, k, config)?;
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut result = SearchResult::empty(k);

    // Each round restarts from the prepared state, so the state after 6^r
    // iterates can be carried forward from the previous round.
    let operator = if n <= OPERATOR_MAX_VERTICES { Some(pipeline.vertex_operator()?) } else { None };
    let mut vector = match operator {
        Some(_) => Some(pipeline.prepared_vertex_state()?),
        None => None,
    };
    let mut direct = match operator {
        Some(_) => None,
        None => Some(pipeline.state_after(0)?),
    };
    let mut applied = 0usize;
    for r in 0..config.max_boyer_rounds {
        let t = 6usize.pow(r);
        let probs = match (&operator, vector.take(), direct.as_mut()) {
            (Some(m), Some(v), _) => {
                let v = apply_power(m, t - applied, v);
                let probs = key_probabilities(&v, n);
                vector = Some(v);
                probs
            }
            (_, _, Some(s)) => {
                for _ in applied..t {
                    s.run_circuit(&pipeline.iterate)?;
                }
                s.probabilities(pipeline.vertex_wires())?
            }
            _ => unreachable!("exactly one evolution mode is active"),
        };
        applied = t;
        result.rounds = r + 1;
        result.iterations_used += t;
        result.success_probability = clique_mass(g, &probs, k);
        let outcome = sample_from(&probs, 1, &mut rng);
        for (key, count) in outcome {
            *result.histogram.entry(key.clone()).or_insert(0) += count;
            if let Some(set) = clique_of(g, &key, k) {
                result.found = true;
                result.witness = Some(set);
            }
        }
        if result.found {
            break;
        }
    }
    Ok(result)
}

/// Tries `k = n, n-1, ..., 2`, skipping sizes the edge count rules out, and
/// returns the first verified clique. Without one, returns vertex 0 with
/// `found` unset.
pub fn max_clique(g: &Graph, config: &GroverConfig) -> Result<SearchResult, GroverError> {
    let n = g.n();
    let mut skipped = Vec::new();
    for k in (2..=n).rev() {
        if binomial(k, 2) > g.edge_count() as u64 {
            skipped.push(k);
            continue;
        }
        if config.prep == PrepChoice::W && k + 1 != n {
            // The W state covers only one clique size.
            skipped.push(k);
            continue;
        }
        let mut r = grover_unknown_m(g, k, config)?;
        if r.found {
            r.skipped_k = skipped;
            return Ok(r);
        }
    }
    let mut r = SearchResult::empty(1);
    r.witness = (n > 0).then(|| VertexSet::new([0]));
    r.skipped_k = skipped;
    Ok(r)
}
