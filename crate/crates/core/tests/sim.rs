mod common;

use std::collections::BTreeMap;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qpurify::circuit::{CircuitBuilder, GateDef, GateSet};
use qpurify::harness::rng_for;
use qpurify::purify::DelayedMeasurement;
use qpurify::qcore::classical_oracle;
use qpurify::septest::{build_measurement_algorithm, build_oracle, control_width, OracleInstance, ORACLE};
use qpurify::sim::*;
use qpurify::Error;

use common::{bits, random_circuit};

fn dist(pairs: &[(&str, f64)]) -> OutputDistribution {
    OutputDistribution::new(pairs.iter().map(|(k, p)| (k.to_string(), *p)).collect()).unwrap()
}

#[test]
fn init_then_output_is_zero() {
    let mut b = CircuitBuilder::new(GateSet::g0());
    let q = b.init();
    b.outputs(&[q]);
    let c = b.build().unwrap();
    let d = run_distribution(&c, &[], &OracleRegistry::new()).unwrap();
    assert_eq!(d, OutputDistribution::point("0"));
    assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"0":1.0}"#);
}

#[test]
fn hadamard_is_a_fair_coin() {
    let mut b = CircuitBuilder::new(GateSet::g0());
    let q = b.ancillas(1);
    b.gate("H", &q).outputs(&q);
    let c = b.build().unwrap();
    let sim = Simulator::default();
    let reg = OracleRegistry::new();
    for d in [
        sim.run_distribution(&c, &[], &reg).unwrap(),
        sim.run_distribution_dense(&c, &[], &reg).unwrap(),
        sim.run_distribution_banked(&c, &[], &reg).unwrap(),
    ] {
        assert_abs_diff_eq!(d.probability("0"), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.probability("1"), 0.5, epsilon = 1e-12);
    }
}

#[test]
fn identity_circuit_returns_input() {
    let mut b = CircuitBuilder::new(GateSet::g0());
    let q = b.inputs(3);
    b.outputs(&q);
    let c = b.build().unwrap();
    let d = run_distribution(&c, &[true, false, true], &OracleRegistry::new()).unwrap();
    assert_eq!(d, OutputDistribution::point("101"));
    assert!(matches!(
        run_distribution(&c, &[true], &OracleRegistry::new()),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn output_order_follows_declaration() {
    let mut b = CircuitBuilder::new(GateSet::g0());
    let q = b.inputs(2);
    b.outputs(&[q[1], q[0]]);
    let c = b.build().unwrap();
    let d = run_distribution(&c, &[true, false], &OracleRegistry::new()).unwrap();
    assert_eq!(d.mode(), Some("01"));
}

#[test]
fn statistical_distance_examples() {
    let a = OutputDistribution::point("0");
    let b = OutputDistribution::point("1");
    assert_abs_diff_eq!(statistical_distance(&a, &b), 1.0);
    assert_abs_diff_eq!(statistical_distance(&a, &a), 0.0);
    let fair = dist(&[("0", 0.5), ("1", 0.5)]);
    assert_abs_diff_eq!(statistical_distance(&a, &fair), 0.5);
    let c = dist(&[("00", 0.25), ("11", 0.75)]);
    let d = dist(&[("01", 0.25), ("11", 0.75)]);
    assert_abs_diff_eq!(statistical_distance(&c, &d), 0.25);
}

#[test]
fn distribution_validation() {
    let mut m = BTreeMap::new();
    m.insert("0".to_string(), 0.7);
    assert!(OutputDistribution::new(m.clone()).is_err());
    m.insert("1".to_string(), 0.3);
    assert!(OutputDistribution::new(m.clone()).is_ok());
    m.insert("1".to_string(), -0.3);
    m.insert("0".to_string(), 1.3);
    assert!(OutputDistribution::new(m).is_err());
}

#[test]
fn reset_discards_entanglement() {
    // Bell pair, trash one half: the other half is maximally mixed
    let mut b = CircuitBuilder::new(GateSet::g0());
    let q = b.ancillas(2);
    b.gate("H", &[q[0]]).gate("CNOT", &[q[0], q[1]]);
    b.trash(q[0]);
    let fresh = b.init();
    b.outputs(&[fresh, q[1]]);
    let c = b.build().unwrap();
    let d = run_distribution(&c, &[], &OracleRegistry::new()).unwrap();
    assert_abs_diff_eq!(d.probability("00"), 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(d.probability("01"), 0.5, epsilon = 1e-12);
}

#[test]
fn measurement_algorithm_outputs_out_bit() {
    let sim = Simulator::default();
    for (n, t) in [(1, 1), (2, 1), (2, 3), (1, 4)] {
        let c = build_measurement_algorithm(n, t).unwrap();
        for (i, out) in [false, true].into_iter().enumerate() {
            let inst = OracleInstance::random(n, t, out, &mut rng_for(n as u64 * 10 + t as u64, i as u64));
            let reg = OracleRegistry::from([(ORACLE.to_string(), build_oracle(&inst).unwrap())]);
            let d = sim.run_distribution(&c, &[], &reg).unwrap();
            let want = if out { "1" } else { "0" };
            assert_abs_diff_eq!(d.probability(want), 1.0, epsilon = 1e-9);
            let b = sim.run_distribution_banked(&c, &[], &reg).unwrap();
            assert!(statistical_distance(&d, &b) < 1e-9);
        }
    }
}

#[test]
fn dense_agrees_on_small_algorithm() {
    let sim = Simulator::default();
    let c = build_measurement_algorithm(1, 2).unwrap();
    let inst = OracleInstance::random(1, 2, true, &mut rng_for(5, 0));
    let reg = OracleRegistry::from([(ORACLE.to_string(), build_oracle(&inst).unwrap())]);
    let a = sim.run_distribution(&c, &[], &reg).unwrap();
    let b = sim.run_distribution_dense(&c, &[], &reg).unwrap();
    assert!(statistical_distance(&a, &b) < 1e-9);
}

#[test]
fn unresolved_and_mismatched_oracles() {
    let c = build_measurement_algorithm(1, 1).unwrap();
    let e = run_distribution(&c, &[], &OracleRegistry::new()).unwrap_err();
    assert!(matches!(e, Error::UnresolvedOracle(ref g) if g == ORACLE));
    let small = OracleInstance::random(1, 1, false, &mut rng_for(1, 1));
    let wrong = OracleRegistry::from([(ORACLE.to_string(), classical_oracle(1, 1, &[0, 1]).unwrap())]);
    assert!(matches!(
        run_distribution(&c, &[], &wrong),
        Err(Error::DimensionMismatch(_))
    ));
    let ok = OracleRegistry::from([(ORACLE.to_string(), build_oracle(&small).unwrap())]);
    assert!(run_distribution(&c, &[], &ok).is_ok());
}

#[test]
fn pure_run_rejects_trash() {
    let c = build_measurement_algorithm(1, 1).unwrap();
    let inst = OracleInstance::random(1, 1, false, &mut rng_for(2, 0));
    let reg = OracleRegistry::from([(ORACLE.to_string(), build_oracle(&inst).unwrap())]);
    assert!(matches!(run_pure(&c, &[], &reg), Err(Error::NonUnitary(_))));
    let p = DelayedMeasurement::default().purify(&c).unwrap().circuit;
    let ket = run_pure(&p, &[], &reg).unwrap();
    let d = measure_outputs(&p, &ket).unwrap();
    assert_abs_diff_eq!(d.probability("0"), 1.0, epsilon = 1e-9);
}

#[test]
fn budget_is_enforced() {
    let c = random_circuit(1, 6, 0, 20, true);
    let tiny = Simulator::new(Budget {
        amplitudes: 16,
        density_dim: 4,
    });
    let reg = OracleRegistry::new();
    assert!(matches!(
        tiny.run_distribution(&c, &[], &reg),
        Err(Error::Budget { .. })
    ));
    assert!(matches!(
        tiny.run_distribution_dense(&c, &[], &reg),
        Err(Error::Budget { .. })
    ));
    assert!(matches!(
        tiny.run_distribution_banked(&c, &[], &reg),
        Err(Error::Budget { .. })
    ));
    let u = random_circuit(1, 6, 0, 20, false);
    assert!(matches!(tiny.run_pure(&u, &[], &reg), Err(Error::Budget { .. })));
    assert!(Simulator::default().run_distribution(&c, &[], &reg).is_ok());
}

/// `n` address inputs, one answer qubit, `k` calls of a classical oracle.
fn repeated_query(n: usize, k: usize, spread: bool) -> (qpurify::circuit::Circuit, OracleRegistry, Vec<u32>) {
    let gs = GateSet::g0_with(vec![GateDef::oracle("F", n + 1)]).unwrap();
    let mut b = CircuitBuilder::new(gs);
    let addr = b.inputs(n);
    let ans = b.ancillas(1);
    if spread {
        for &q in &addr {
            b.gate("H", &[q]);
        }
    }
    let targets: Vec<u32> = addr.iter().chain(&ans).copied().collect();
    for _ in 0..k {
        b.gate("F", &targets);
    }
    b.outputs(&ans);
    let table: Vec<usize> = (0..1usize << n).map(|x| x & 1).collect();
    let reg = OracleRegistry::from([("F".to_string(), classical_oracle(n, 1, &table).unwrap())]);
    (b.build().unwrap(), reg, addr)
}

#[test]
fn query_profile_fixed_address() {
    let (c, reg, addr) = repeated_query(3, 4, false);
    let prof = query_profile(&c, &bits(5, 3), &reg, "F", &addr).unwrap();
    assert_eq!(prof.queries(), 4);
    assert_abs_diff_eq!(prof.magnitude(5), 4.0, epsilon = 1e-12);
    assert_abs_diff_eq!(prof.totals().iter().sum::<f64>(), 4.0, epsilon = 1e-12);
    assert_abs_diff_eq!(prof.set_magnitude(&[0, 1, 2]), 0.0, epsilon = 1e-12);
}

#[test]
fn query_profile_uniform_address() {
    let (c, reg, addr) = repeated_query(3, 1, true);
    let prof = query_profile(&c, &bits(0, 3), &reg, "F", &addr).unwrap();
    for x in 0..8 {
        assert_abs_diff_eq!(prof.magnitude(x), 0.125, epsilon = 1e-12);
    }
    assert!(matches!(
        query_profile(&c, &bits(0, 3), &reg, "F", &[99]),
        Err(Error::Reference(_))
    ));
}

#[test]
fn purified_algorithm_walks_the_control() {
    let (n, t) = (1, 3);
    let c = build_measurement_algorithm(n, t).unwrap();
    let p = DelayedMeasurement::default().purify(&c).unwrap().circuit;
    let inst = OracleInstance::random(n, t, true, &mut rng_for(9, 0));
    let reg = OracleRegistry::from([(ORACLE.to_string(), build_oracle(&inst).unwrap())]);
    let control: Vec<u32> = p.work()[..control_width(t)].to_vec();
    let prof = query_profile(&p, &[], &reg, ORACLE, &control).unwrap();
    assert_eq!(prof.queries(), t + 1);
    for (j, row) in prof.per_query.iter().enumerate() {
        assert_abs_diff_eq!(row[j], 1.0, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(prof.per_query[t][t], 1.0, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn engines_agree(seed: u64, width in 1usize..5, steps in 0usize..40, x: u8) {
        let inputs = width / 2;
        let c = random_circuit(seed, width, inputs, steps, true);
        let input = bits(x as usize % (1 << inputs), inputs);
        let sim = Simulator::default();
        let reg = OracleRegistry::new();
        let a = sim.run_distribution(&c, &input, &reg).unwrap();
        let b = sim.run_distribution_dense(&c, &input, &reg).unwrap();
        let d = sim.run_distribution_banked(&c, &input, &reg).unwrap();
        prop_assert!(statistical_distance(&a, &b) < 1e-9);
        prop_assert!(statistical_distance(&a, &d) < 1e-9);
    }

    #[test]
    fn pure_matches_distribution(seed: u64, width in 1usize..6, steps in 0usize..40) {
        let c = random_circuit(seed, width, 0, steps, false);
        let reg = OracleRegistry::new();
        let ket = run_pure(&c, &[], &reg).unwrap();
        let a = measure_outputs(&c, &ket).unwrap();
        let b = run_distribution(&c, &[], &reg).unwrap();
        prop_assert!(statistical_distance(&a, &b) < 1e-9);
        let norm: f64 = ket.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn distance_is_a_metric(seed: u64, s1 in 0usize..20, s2 in 0usize..20, s3 in 0usize..20) {
        let reg = OracleRegistry::new();
        // same seed, same outputs; only the number of steps differs
        let run = |s| run_distribution(&random_circuit(seed, 3, 0, s, true), &[], &reg).unwrap();
        let (a, b, c) = (run(s1), run(s2), run(s3));
        let ab = statistical_distance(&a, &b);
        prop_assert!((ab - statistical_distance(&b, &a)).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!(statistical_distance(&a, &c) <= ab + statistical_distance(&b, &c) + 1e-12);
    }
}
