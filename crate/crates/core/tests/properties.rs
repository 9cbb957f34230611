use num_complex::Complex64;
use proptest::prelude::*;
use qudit_clique::circuit::{Circuit, Control, Gate, Unitary, WireTable};
use qudit_clique::cost::{compare, CostMethod, CostReport, GateCounts};
use qudit_clique::decompose::{lower_circuit, Lowering};
use qudit_clique::graph::{binomial, random_graph, Graph, VertexSet};
use qudit_clique::grover::{grover_known_m, GroverConfig, PrepChoice};
use qudit_clique::sim::{run, sample, unitary_of, DenseMatrix, StateVector};

const WIRES: usize = 3;

/// Raw parameters mapped onto a valid gate for the given dimensions.
type RawGate = (u8, usize, u8, u32, f64, i32, u32);

fn build(dims: &[u32], raw: &[RawGate]) -> Circuit {
    let mut c = Circuit::new(WireTable::with_dims(dims.to_vec()).unwrap());
    for &(kind, target, mask, values, angle, delta, modulus) in raw {
        let target = target % WIRES;
        let controls: Vec<Control> = (0..WIRES)
            .filter(|&w| w != target && mask >> w & 1 == 1)
            .map(|w| Control::new(w, (values >> (2 * w)) % dims[w]))
            .collect();
        let g = match kind % 6 {
            0 => Gate::controlled(Unitary::H, target, controls),
            1 => Gate::controlled(Unitary::X, target, controls),
            2 => Gate::controlled(Unitary::Z, target, controls),
            3 => Gate::controlled(Unitary::Ry(angle), target, controls),
            4 => Gate::controlled(Unitary::Phase(angle), target, controls),
            _ => Gate::increment(delta, 2 + modulus % (dims[target] - 1), target, controls),
        };
        c.push(g).unwrap();
    }
    c
}

fn circuit() -> impl Strategy<Value = Circuit> {
    let raw = (any::<u8>(), 0..WIRES, any::<u8>(), any::<u32>(), -3.0..3.0f64, -3..4i32, any::<u32>());
    (prop::collection::vec(2..=4u32, WIRES), prop::collection::vec(raw, 0..12)).prop_map(|(d, r)| build(&d, &r))
}

fn random_state(dims: &[u32], raw: &[(f64, f64)]) -> StateVector {
    let size: usize = dims.iter().map(|&d| d as usize).product();
    let amps: Vec<Complex64> = (0..size).map(|i| Complex64::new(raw[i % raw.len()].0, raw[i % raw.len()].1 + i as f64 * 0.01)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let amps: Vec<Complex64> = amps.iter().map(|a| a / norm).collect();
    StateVector::from_dense(dims, &amps).unwrap()
}

fn assert_close(a: &StateVector, b: &StateVector) {
    let da = a.to_dense().unwrap();
    let db = b.to_dense().unwrap();
    for (x, y) in da.iter().zip(&db) {
        assert!((x - y).norm() < 1e-9, "{x} vs {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(c in circuit()) {
        let back = Circuit::from_text(&c.to_text()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn inverse_undoes_circuit(c in circuit()) {
        let u = unitary_of(&c).unwrap();
        let v = unitary_of(&c.inverse()).unwrap();
        prop_assert!(u.mul(&v).max_abs_diff(&DenseMatrix::identity(u.dim())) < 1e-9);
    }

    #[test]
    fn cancellation_keeps_unitary(c in circuit()) {
        let reduced = c.cancel_adjacent_inverses();
        prop_assert!(reduced.size() <= c.size());
        let a = unitary_of(&c).unwrap();
        let b = unitary_of(&reduced).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-9);

        let mut round = c.clone();
        round.append_circuit(&c.inverse()).unwrap();
        prop_assert_eq!(round.cancel_adjacent_inverses().size(), 0);
    }

    #[test]
    fn norm_is_preserved(c in circuit(), raw in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..8)) {
        let psi = random_state(c.wires().dims(), &raw);
        let mut s = psi.clone();
        for g in c.gates() {
            s.apply(g).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn simulation_is_linear(
        c in circuit(),
        r1 in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..6),
        r2 in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..6),
        alpha in -1.0..1.0f64,
    ) {
        let dims = c.wires().dims().to_vec();
        let (p1, p2) = (random_state(&dims, &r1), random_state(&dims, &r2));
        let (a, b) = (Complex64::new(alpha, 0.3), Complex64::new(0.5, -alpha));
        let mix = |x: &StateVector, y: &StateVector| {
            let (dx, dy) = (x.to_dense().unwrap(), y.to_dense().unwrap());
            let v: Vec<Complex64> = dx.iter().zip(&dy).map(|(p, q)| a * p + b * q).collect();
            StateVector::from_dense(&dims, &v).unwrap()
        };
        let lhs = run(&c, &mix(&p1, &p2)).unwrap();
        let rhs = mix(&run(&c, &p1).unwrap(), &run(&c, &p2).unwrap());
        assert_close(&lhs, &rhs);
    }

    #[test]
    fn increment_cycles_back(dim in 2..=4u32, modulus_seed in 0..3u32, delta in -3..4i32, start in 0..4u32) {
        let modulus = 2 + modulus_seed % (dim - 1);
        let mut c = Circuit::new(WireTable::with_dims(vec![dim]).unwrap());
        for _ in 0..modulus {
            c.push(Gate::increment(delta, modulus, 0, vec![])).unwrap();
        }
        let s = StateVector::basis(&[dim], (start % dim) as u64).unwrap();
        prop_assert_eq!(run(&c, &s).unwrap(), s);
    }

    #[test]
    fn dimacs_round_trip(n in 1..10usize, p in 0.0..1.0f64, seed in any::<u64>()) {
        let g = random_graph(n, p, seed);
        prop_assert_eq!(Graph::parse(&g.to_dimacs()).unwrap(), g);
    }

    #[test]
    fn clique_facts(n in 1..8usize, p in 0.0..1.0f64, seed in any::<u64>(), mask in any::<u8>()) {
        let g = random_graph(n, p, seed);
        let s = VertexSet::new((0..n).filter(|v| mask >> v & 1 == 1));
        prop_assert_eq!(g.is_clique(&s), g.induced_edge_count(&s) as u64 == binomial(s.len(), 2));
        prop_assert_eq!(VertexSet::from_ket(&s.to_ket(n)).unwrap(), s);
        let omega = g.clique_number().unwrap();
        for k in 1..=n {
            let nonempty = !g.enumerate_k_cliques(k).unwrap().is_empty();
            prop_assert_eq!(nonempty, k <= omega);
        }
        prop_assert_eq!(g.max_clique_bruteforce().unwrap().len(), omega);
    }

    #[test]
    fn comparison_is_scale_free(size in 1..5000usize, depth in 1..5000usize, q in 0..5000usize, d in 0..5000usize, f in 1..20usize) {
        let report = |size: usize, depth: usize| CostReport {
            instance: "x".into(),
            method: CostMethod::QuditVchain,
            wires: 1,
            gates: GateCounts { q1: size, q2: 0, qd: 0 },
            size,
            depth,
            census: Default::default(),
            extrapolated: false,
            reference: None,
        };
        let a = compare(&report(size, depth), &report(q, d)).unwrap();
        let b = compare(&report(size * f, depth * f), &report(q * f, d * f)).unwrap();
        prop_assert!((a.size_reduction_pct - b.size_reduction_pct).abs() < 1e-9);
        prop_assert!((a.depth_reduction_pct - b.depth_reduction_pct).abs() < 1e-9);
    }

    #[test]
    fn lowered_mct_with_mixed_triggers(n in 2..=5usize, trigger_mask in any::<u8>(), lowering in prop::bool::ANY) {
        // controls at |0> are handled by X conjugation around an all-ones MCT
        let mut c = Circuit::qubits(n + 1);
        let zeros: Vec<Gate> = (0..n).filter(|w| trigger_mask >> w & 1 == 0).map(Gate::x).collect();
        c.extend(zeros.clone()).unwrap();
        c.push(Gate::mct((0..n).map(Control::on).collect(), n)).unwrap();
        c.extend(zeros).unwrap();
        let lowering = if lowering { Lowering::Tree } else { Lowering::Vchain };
        let low = lower_circuit(&c, lowering).unwrap();
        let probe = StateVector::zero(low.wires().dims()).unwrap();
        for x in 0..1usize << (n + 1) {
            let digits: Vec<u32> = (0..=n).map(|i| (x >> (n - i) & 1) as u32).collect();
            let out = run(&low, &StateVector::basis(low.wires().dims(), probe.index_of(&digits)).unwrap()).unwrap();
            let fire = (0..n).all(|w| digits[w] == (trigger_mask >> w & 1) as u32);
            let mut want = digits.clone();
            if fire {
                want[n] ^= 1;
            }
            prop_assert!((out.amplitude(probe.index_of(&want)).re - 1.0).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn success_follows_closed_form(n in 3..=5usize, p in 0.3..1.0f64, seed in any::<u64>(), k_seed in any::<usize>(), t in 0..4usize) {
        let g = random_graph(n, p, seed);
        let k = 2 + k_seed % (n - 1);
        let m = g.enumerate_k_cliques(k).unwrap().len();
        prop_assume!(m > 0);
        let config = GroverConfig { prep: PrepChoice::Hilbert, iterations: Some(t), shots: 1, ..GroverConfig::default() };
        let r = grover_known_m(&g, k, &config).unwrap();
        let theta = (m as f64 / (1u64 << n) as f64).sqrt().asin();
        let expected = ((2 * t + 1) as f64 * theta).sin().powi(2);
        prop_assert!((r.success_probability - expected).abs() < 1e-6, "{} vs {}", r.success_probability, expected);
    }
}

#[test]
fn sampling_frequency_is_frozen() {
    let a = (0.9f64).sqrt();
    let b = (0.1f64).sqrt();
    let s = StateVector::from_entries(&[2], [(0, Complex64::new(a, 0.0)), (1, Complex64::new(b, 0.0))]).unwrap();
    let h = sample(&s, &[0], 10_000, 2024).unwrap();
    let frac = h["0"] as f64 / 10_000.0;
    assert!((frac - 0.9).abs() < 0.02, "{frac}");
    assert_eq!(h, sample(&s, &[0], 10_000, 2024).unwrap());
    let zero = sample(&StateVector::zero(&[2]).unwrap(), &[0], 50, 1).unwrap();
    assert_eq!(zero.into_iter().collect::<Vec<_>>(), vec![("0".to_string(), 50)]);
}
