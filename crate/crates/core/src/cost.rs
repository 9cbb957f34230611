//! Gate-count and depth reports comparing the qubit-only Toffoli
//! decomposition model against intermediate-qudit lowerings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::decompose::{lower_circuit, toffoli_census, DecomposeError, Lowering, StandardCostModel};
use crate::graph::{named, Graph};
use crate::grover::{optimal_iterations, GroverConfig, GroverError, GroverPipeline, PrepChoice};
use crate::oracle::OracleVariant;
use crate::prep::PrepKind;

const REFERENCE_JSON: &str = include_str!("../data/reference_tables.json");

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("circuit still contains an abstract multi-controlled Toffoli")]
    Unlowered,
    #[error("cannot compare against a standard report of size zero")]
    EmptyStandard,
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Grover(#[from] GroverError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMethod {
    StandardModel,
    QuditVchain,
    QuditTree,
}

impl CostMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CostMethod::StandardModel => "standard_model",
            CostMethod::QuditVchain => "qudit_vchain",
            CostMethod::QuditTree => "qudit_tree",
        }
    }

    fn reference_key(self) -> &'static str {
        match self {
            CostMethod::StandardModel => "standard_model",
            _ => "qudit",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub q1: usize,
    pub q2: usize,
    pub qd: usize,
}

/// Published counts for one table row, kept for side-by-side display.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub oracle: String,
    pub prep: String,
    pub graph: String,
    pub method: String,
    pub wires: usize,
    pub q1: usize,
    pub q2: usize,
    pub qd: usize,
    pub size: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub instance: String,
    pub method: CostMethod,
    pub wires: usize,
    pub gates: GateCounts,
    pub size: usize,
    pub depth: usize,
    pub census: BTreeMap<usize, usize>,
    pub extrapolated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceRow>,
}

/// A gate needs a qudit when it cycles more than two levels or fires on a
/// level above 1.
pub fn is_qudit_gate(g: &Gate) -> bool {
    let wide_increment = matches!(g.kind, GateKind::Increment { modulus, .. } if modulus >= 3);
    wide_increment || g.controls.iter().any(|c| c.value >= 2)
}

/// Counts a lowered circuit by gate class; size and depth come from the
/// circuit itself.
pub fn analyze_qudit(c: &Circuit, instance: &str, method: CostMethod) -> Result<CostReport, CostError> {
    if c.has_mct() {
        return Err(CostError::Unlowered);
    }
    let mut gates = GateCounts::default();
    for g in c.gates() {
        if is_qudit_gate(g) {
            gates.qd += 1;
        } else if g.arity() == 1 {
            gates.q1 += 1;
        } else {
            gates.q2 += 1;
        }
    }
    Ok(CostReport {
        instance: instance.to_string(),
        method,
        wires: c.num_wires(),
        gates,
        size: c.size(),
        depth: c.depth(),
        census: BTreeMap::new(),
        extrapolated: false,
        reference: None,
    })
}

/// One- and two-or-more-wire counts of the non-MCT gates of `c`.
pub fn pass_through_counts(c: &Circuit) -> (usize, usize) {
    let rest = c.gates().iter().filter(|g| !g.is_mct());
    rest.fold((0, 0), |(a, b), g| if g.arity() == 1 { (a + 1, b) } else { (a, b + 1) })
}

/// Costs a circuit under the qubit-only model: every MCT is charged its
/// tabulated size and depth, other gates count once each, and depth is
/// summed sequentially.
pub fn analyze_standard(
    census: &BTreeMap<usize, usize>,
    extra_1q: usize,
    extra_2q: usize,
    model: &StandardCostModel,
    instance: &str,
    wires: usize,
) -> Result<CostReport, CostError> {
    let mut gates = GateCounts { q1: extra_1q, q2: extra_2q, qd: 0 };
    let mut depth = extra_1q + extra_2q;
    let mut extrapolated = false;
    for (&arity, &count) in census {
        let e = model.cost(arity)?;
        gates.q1 += count * e.one_qubit;
        gates.q2 += count * e.two_qubit;
        depth += count * e.depth;
        extrapolated |= e.extrapolated;
    }
    Ok(CostReport {
        instance: instance.to_string(),
        method: CostMethod::StandardModel,
        wires,
        size: gates.q1 + gates.q2,
        gates,
        depth,
        census: census.clone(),
        extrapolated,
        reference: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub instance: String,
    pub method: CostMethod,
    pub size_reduction_pct: f64,
    pub depth_reduction_pct: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_size_reduction_pct: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_depth_reduction_pct: Option<f64>,
}

fn reduction(standard: usize, other: usize) -> f64 {
    100.0 * (1.0 - other as f64 / standard as f64)
}

/// Percentage reductions of `qudit` relative to `standard`.
pub fn compare(standard: &CostReport, qudit: &CostReport) -> Result<Comparison, CostError> {
    if standard.size == 0 || standard.depth == 0 {
        return Err(CostError::EmptyStandard);
    }
    let refs = match (&standard.reference, &qudit.reference) {
        (Some(s), Some(q)) if s.size > 0 && s.depth > 0 => {
            (Some(reduction(s.size, q.size)), Some(reduction(s.depth, q.depth)))
        }
        _ => (None, None),
    };
    Ok(Comparison {
        instance: qudit.instance.clone(),
        method: qudit.method,
        size_reduction_pct: reduction(standard.size, qudit.size),
        depth_reduction_pct: reduction(standard.depth, qudit.depth),
        reference_size_reduction_pct: refs.0,
        reference_depth_reduction_pct: refs.1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Markdown,
    Csv,
    Json,
}

fn census_text(census: &BTreeMap<usize, usize>) -> String {
    census.iter().map(|(a, c)| format!("{a}:{c}")).collect::<Vec<_>>().join(";")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders reports one row each, with reference size and depth columns.
pub fn emit_table(reports: &[CostReport], format: TableFormat) -> String {
    if format == TableFormat::Json {
        return serde_json::to_string_pretty(reports).expect("reports serialize") + "\n";
    }
    let header = [
        "instance", "method", "wires", "q1", "q2", "qd", "size", "depth", "census", "extrapolated", "ref_q1",
        "ref_q2", "ref_qd", "ref_size", "ref_depth",
    ];
    let rows = reports.iter().map(|r| {
        let rf = r.reference.as_ref();
        vec![
            r.instance.clone(),
            r.method.as_str().to_string(),
            r.wires.to_string(),
            r.gates.q1.to_string(),
            r.gates.q2.to_string(),
            r.gates.qd.to_string(),
            r.size.to_string(),
            r.depth.to_string(),
            census_text(&r.census),
            r.extrapolated.to_string(),
            opt(rf.map(|x| x.q1)),
            opt(rf.map(|x| x.q2)),
            opt(rf.map(|x| x.qd)),
            opt(rf.map(|x| x.size)),
            opt(rf.map(|x| x.depth)),
        ]
    });
    render(&header, rows, format)
}

/// Renders comparison rows; percentages to one decimal place.
pub fn emit_comparisons(rows: &[Comparison], format: TableFormat) -> String {
    if format == TableFormat::Json {
        return serde_json::to_string_pretty(rows).expect("comparisons serialize") + "\n";
    }
    let header = ["instance", "method", "size_reduction_pct", "depth_reduction_pct", "ref_size_reduction_pct", "ref_depth_reduction_pct"];
    let pct = |v: f64| format!("{v:.1}");
    let body = rows.iter().map(|c| {
        vec![
            c.instance.clone(),
            c.method.as_str().to_string(),
            pct(c.size_reduction_pct),
            pct(c.depth_reduction_pct),
            opt(c.reference_size_reduction_pct.map(pct)),
            opt(c.reference_depth_reduction_pct.map(pct)),
        ]
    });
    render(&header, body, format)
}

fn render(header: &[&str], rows: impl Iterator<Item = Vec<String>>, format: TableFormat) -> String {
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            out.push_str(&header.join(","));
            out.push('\n');
            for row in rows {
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        TableFormat::Markdown => {
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for row in rows {
                let _ = writeln!(out, "| {} |", row.join(" | "));
            }
        }
        TableFormat::Json => unreachable!("handled by callers"),
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeDepth {
    pub size: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToffoliCostRow {
    pub n_controls: usize,
    pub standard: ReferenceCounts,
    pub qudit: ReferenceCounts,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceCounts {
    pub size: usize,
    pub depth: usize,
    pub q1: usize,
    pub q2: usize,
    pub qd: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToffoliTotalRow {
    pub oracle: String,
    pub prep: String,
    pub total: usize,
    pub standard: SizeDepth,
    pub qudit: SizeDepth,
}

/// Published reference values bundled with the crate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceTables {
    pub toffoli_cost: Vec<ToffoliCostRow>,
    pub toffoli_totals: Vec<ToffoliTotalRow>,
    pub instances: Vec<ReferenceRow>,
}

impl ReferenceTables {
    pub fn bundled() -> Self {
        serde_json::from_str(REFERENCE_JSON).expect("bundled reference data parses")
    }

    pub fn lookup(&self, graph: &str, prep: &str, oracle: &str, method: CostMethod) -> Option<&ReferenceRow> {
        self.instances
            .iter()
            .find(|r| r.graph == graph && r.prep == prep && r.oracle == oracle && r.method == method.reference_key())
    }

    pub fn toffoli_total(&self, prep: &str, oracle: &str) -> Option<&ToffoliTotalRow> {
        self.toffoli_totals.iter().find(|r| r.prep == prep && r.oracle == oracle)
    }
}

/// Every relabeling of `0..n`, in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

fn same_shape(a: &Graph, b: &Graph) -> bool {
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return false;
    }
    let target: Vec<(usize, usize)> = b.edges().collect();
    permutations(a.n()).into_iter().any(|p| {
        let mut mapped: Vec<(usize, usize)> = a.edges().map(|(u, v)| (p[u].min(p[v]), p[u].max(p[v]))).collect();
        mapped.sort_unstable();
        mapped == target
    })
}

/// Name of the tabulated 4-vertex graph `g` is isomorphic to, if any.
pub fn named_shape(g: &Graph) -> Option<&'static str> {
    if g.n() != 4 {
        return None;
    }
    named::comparison_set().into_iter().find(|(_, h)| same_shape(g, h)).map(|(name, _)| name)
}

fn prep_key(kind: PrepKind) -> &'static str {
    match kind {
        PrepKind::FullHilbert => "hilbert",
        PrepKind::WState => "w",
        PrepKind::Dicke { .. } => "dicke",
    }
}

fn oracle_key(v: OracleVariant) -> &'static str {
    match v {
        OracleVariant::Checking => "checking",
        OracleVariant::Increment => "increment",
    }
}

/// Cost reports of one Grover circuit under all three methods.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceCosts {
    pub instance: String,
    pub iterations: usize,
    /// MCTs in a single oracle call.
    pub oracle_toffolis: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_oracle_toffolis: Option<usize>,
    pub standard: CostReport,
    pub qudit_vchain: CostReport,
    pub qudit_tree: CostReport,
}

impl InstanceCosts {
    pub fn reports(&self) -> Vec<CostReport> {
        vec![self.standard.clone(), self.qudit_vchain.clone(), self.qudit_tree.clone()]
    }

    pub fn comparisons(&self) -> Result<Vec<Comparison>, CostError> {
        Ok(vec![compare(&self.standard, &self.qudit_vchain)?, compare(&self.standard, &self.qudit_tree)?])
    }
}

/// Builds the full Grover circuit (preparation plus `iterations` rounds of
/// oracle and diffusion) for `g` and `k` and costs it three ways. Without an
/// explicit count, iterations are planned for a single marked state.
pub fn grover_costs(
    g: &Graph,
    k: usize,
    prep: PrepChoice,
    oracle: OracleVariant,
    iterations: Option<usize>,
    name: &str,
) -> Result<InstanceCosts, CostError> {
    let config = GroverConfig { prep, oracle, ..GroverConfig::default() };
    let pipeline = GroverPipeline::new(g, k, &config)?;
    let t = match iterations {
        Some(t) => t,
        None => optimal_iterations(pipeline.prep.search_space_size(), 1)?,
    };
    let logical = pipeline.logical_circuit(t);
    let pk = prep_key(pipeline.prep.kind);
    let ok = oracle_key(oracle);
    let instance = format!("{name}/k={k}/{pk}/{ok}");

    let census = toffoli_census(&logical);
    let (e1, e2) = pass_through_counts(&logical);
    let mut standard = analyze_standard(&census, e1, e2, &StandardCostModel::default(), &instance, logical.num_wires())?;
    let mut vchain = analyze_qudit(&lower_circuit(&logical, Lowering::Vchain)?, &instance, CostMethod::QuditVchain)?;
    let mut tree = analyze_qudit(&lower_circuit(&logical, Lowering::Tree)?, &instance, CostMethod::QuditTree)?;
    vchain.census = census.clone();
    tree.census = census;

    let tables = ReferenceTables::bundled();
    let shape = if k == 3 { named_shape(g) } else { None };
    if let Some(shape) = shape {
        for r in [&mut standard, &mut vchain, &mut tree] {
            r.reference = tables.lookup(shape, pk, ok, r.method).cloned();
        }
    }
    Ok(InstanceCosts {
        instance,
        iterations: t,
        oracle_toffolis: pipeline.oracle.toffoli_total(),
        reference_oracle_toffolis: shape.and(tables.toffoli_total(pk, ok)).map(|r| r.total),
        standard,
        qudit_vchain: vchain,
        qudit_tree: tree,
    })
}

/// Standard and V-chain costs of a single MCT for each control count.
pub fn toffoli_cost_reports(controls: impl IntoIterator<Item = usize>) -> Result<Vec<CostReport>, CostError> {
    let model = StandardCostModel::default();
    let mut out = Vec::new();
    for n in controls {
        let name = format!("mct/{n}");
        let mut c = Circuit::qubits(n + 1);
        c.push(Gate::mct((0..n).map(crate::circuit::Control::on).collect(), n))
            .map_err(DecomposeError::from)?;
        let census = toffoli_census(&c);
        out.push(analyze_standard(&census, 0, 0, &model, &name, n + 1)?);
        let mut q = analyze_qudit(&lower_circuit(&c, Lowering::Vchain)?, &name, CostMethod::QuditVchain)?;
        q.census = census;
        out.push(q);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_toffoli_rows() {
        let rows = toffoli_cost_reports(2..=4).unwrap();
        let got: Vec<(usize, usize)> = rows.iter().map(|r| (r.size, r.depth)).collect();
        assert_eq!(got, vec![(15, 12), (3, 3), (27, 22), (5, 5), (77, 60), (7, 7)]);
        assert_eq!(rows[1].gates, GateCounts { q1: 0, q2: 0, qd: 3 });
        assert_eq!(rows[0].gates, GateCounts { q1: 9, q2: 6, qd: 0 });
    }

    #[test]
    fn standard_worked_example() {
        let census = BTreeMap::from([(2, 14), (3, 3), (4, 1)]);
        let r = analyze_standard(&census, 0, 0, &StandardCostModel::default(), "x", 0).unwrap();
        assert_eq!(r.size, 14 * 15 + 3 * 27 + 77);
        assert!(!r.extrapolated);
        let qudit_total: usize = census.iter().map(|(a, c)| c * (2 * a - 1)).sum();
        assert_eq!(qudit_total, 64);
        let empty = analyze_standard(&BTreeMap::new(), 3, 2, &StandardCostModel::default(), "x", 0).unwrap();
        assert_eq!((empty.size, empty.depth), (5, 5));
        let wide = analyze_standard(&BTreeMap::from([(5, 1)]), 0, 0, &StandardCostModel::default(), "x", 0).unwrap();
        assert!(wide.extrapolated);
    }

    fn report(size: usize, depth: usize) -> CostReport {
        CostReport {
            instance: "i".into(),
            method: CostMethod::QuditVchain,
            wires: 1,
            gates: GateCounts { q1: size, q2: 0, qd: 0 },
            size,
            depth,
            census: BTreeMap::new(),
            extrapolated: false,
            reference: None,
        }
    }

    #[test]
    fn percentages() {
        let c = compare(&report(2640, 1284), &report(727, 688)).unwrap();
        assert_eq!(c.size_reduction_pct.round(), 72.0);
        assert_eq!(c.depth_reduction_pct.round(), 46.0);
        let same = compare(&report(10, 5), &report(10, 5)).unwrap();
        assert_eq!(same.size_reduction_pct, 0.0);
        assert_eq!(compare(&report(0, 0), &report(1, 1)), Err(CostError::EmptyStandard));
    }

    #[test]
    fn unlowered_rejected() {
        let mut c = Circuit::qubits(3);
        c.push(Gate::toffoli(&[0, 1], 2)).unwrap();
        assert_eq!(analyze_qudit(&c, "x", CostMethod::QuditVchain), Err(CostError::Unlowered));
        let empty = analyze_qudit(&Circuit::qubits(2), "x", CostMethod::QuditVchain).unwrap();
        assert_eq!((empty.size, empty.depth, empty.gates), (0, 0, GateCounts::default()));
    }

    #[test]
    fn table_shapes() {
        let pair = vec![report(10, 5), report(3, 3)];
        let md = emit_table(&pair, TableFormat::Markdown);
        assert_eq!(md.lines().count(), 4);
        assert_eq!(emit_table(&[], TableFormat::Csv).lines().count(), 1);
        let json: serde_json::Value = serde_json::from_str(&emit_table(&pair, TableFormat::Json)).unwrap();
        assert_eq!(json.as_array().unwrap().len(), 2);
        assert!(json[0]["gates"]["qd"].is_number());
    }

    #[test]
    fn reference_data_is_consistent() {
        let t = ReferenceTables::bundled();
        assert_eq!(t.instances.len(), 48);
        assert_eq!(t.toffoli_cost.len(), 3);
        for row in &t.toffoli_cost {
            assert_eq!(row.standard.size, row.standard.q1 + row.standard.q2);
            assert_eq!(row.qudit.size, 2 * row.n_controls - 1);
        }
        for row in &t.toffoli_totals {
            assert_eq!(row.standard.size, 15 * row.total);
            assert_eq!(row.qudit.size, 3 * row.total);
        }
        let r = t.lookup("one_triangle", "hilbert", "increment", CostMethod::QuditTree).unwrap();
        assert_eq!((r.size, r.depth), (727, 688));
    }

    #[test]
    fn shape_matching() {
        let relabeled = Graph::new(4, [(3, 2), (3, 1), (2, 1), (1, 0)]).unwrap();
        assert_eq!(named_shape(&relabeled), Some("one_triangle"));
        assert_eq!(named_shape(&Graph::complete(4)), Some("complete"));
        assert_eq!(named_shape(&named::star(4)), Some("star"));
        assert_eq!(named_shape(&Graph::empty(4)), None);
        assert_eq!(permutations(3).len(), 6);
    }

    #[test]
    fn triangle_instance_costs() {
        let g = named::one_triangle();
        let costs = grover_costs(&g, 3, PrepChoice::Hilbert, OracleVariant::Increment, None, "one_triangle").unwrap();
        assert_eq!(costs.iterations, 3);
        for r in costs.reports() {
            assert_eq!(r.size, r.gates.q1 + r.gates.q2 + r.gates.qd);
            assert!(r.depth <= r.size);
            assert!(r.reference.is_some());
        }
        let census = &costs.standard.census;
        let mct_standard: usize = census.iter().map(|(&a, c)| c * standard_size(a)).sum();
        let pass_through = costs.standard.size - mct_standard;
        let vchain_expected = pass_through + census.iter().map(|(a, c)| c * (2 * a - 1)).sum::<usize>();
        assert_eq!(costs.qudit_vchain.size, vchain_expected);
        assert_eq!(costs.reference_oracle_toffolis, Some(48));
    }

    fn standard_size(a: usize) -> usize {
        crate::decompose::standard_cost(a).unwrap().size
    }
}
