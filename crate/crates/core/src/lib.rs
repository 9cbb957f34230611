//! Grover-search circuits for k-clique and maximum clique, lowered through
//! intermediate qudits, with an exact mixed-radix simulator and cost reports.
//!
//! ```
//! use qudit_clique::{grover_known_m, named, GroverConfig, PrepChoice};
//!
//! let g = named::one_triangle();
//! let config = GroverConfig { prep: PrepChoice::Hilbert, seed: 1, ..GroverConfig::default() };
//! let r = grover_known_m(&g, 3, &config).unwrap();
//! assert_eq!(r.witness.unwrap().to_string(), "{0,1,2}");
//! ```

pub mod circuit;
pub mod cost;
pub mod decompose;
pub mod error;
pub mod graph;
pub mod grover;
pub mod oracle;
pub mod prep;
pub mod sim;

pub use circuit::{Circuit, Control, Gate, GateKind, Unitary, WireRole, WireTable};
pub use cost::{analyze_qudit, analyze_standard, compare, emit_table, grover_costs, CostMethod, CostReport, TableFormat};
pub use decompose::{lower_circuit, standard_cost, toffoli_census, Lowering};
pub use error::{Error, Result};
pub use graph::{named, Graph, VertexSet};
pub use grover::{
    diffusion_prep_conjugated, diffusion_standard, grover_known_m, grover_unknown_m, max_clique, optimal_iterations,
    Diffuser, GroverConfig, PrepChoice, SearchResult,
};
pub use oracle::{build_oracle, checking_oracle, increment_oracle, Oracle, OracleKind, OracleVariant};
pub use prep::{dicke_prep, hadamard_prep, w_state_prep, PrepKind, PrepSpec};
pub use sim::{run, run_basis, unitary_of, StateVector};
