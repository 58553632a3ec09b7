use proptest::prelude::*;
use qpurify::circuit::{check_property, space_of, time_of, CircuitProperty, StepKind};
use qpurify::harness::rng_for;
use qpurify::purify::DelayedMeasurement;
use qpurify::qcore::{haar_state_orth0, max_abs, trace_distance_matrices, unitarity_deviation, CMat, CVec, Ket, C64};
use qpurify::septest::*;
use qpurify::sim::{OracleRegistry, Simulator};

fn registry(inst: &OracleInstance) -> OracleRegistry {
    OracleRegistry::from([(ORACLE.to_string(), build_oracle(inst).unwrap())])
}

fn basis(d: usize, i: usize) -> CVec {
    Ket::basis(d, i).into_amplitudes()
}

/// `|c⟩|a⟩|b⟩` for the oracle's register layout.
fn triple(inst: &OracleInstance, c: usize, a: &CVec, b: &CVec) -> CVec {
    basis(1 << inst.m, c).kronecker(a).kronecker(b)
}

fn instance(n: usize, t: usize, out: bool, seed: u64) -> OracleInstance {
    OracleInstance::random(n, t, out, &mut rng_for(seed, (n * 100 + t) as u64))
}

#[test]
fn measurement_algorithm_outputs_out() {
    let sim = Simulator::default();
    for (n, t) in [(2, 1), (2, 3), (3, 1), (3, 3), (2, 7), (3, 7)] {
        let c = build_measurement_algorithm(n, t).unwrap();
        assert_eq!(c.count_kind(StepKind::Oracle), t + 1);
        assert_eq!(space_of(&c), 2 * n + control_width(t));
        assert_eq!(time_of(&c), (t + 1) + 2 * n * t + t);
        for out in [false, true] {
            let inst = instance(n, t, out, 7);
            let d = sim.run_distribution(&c, &[], &registry(&inst)).unwrap();
            let key = if out { "1" } else { "0" };
            assert!((d.probability(key) - 1.0).abs() < 1e-9, "n={n} t={t} out={out}: {d:?}");
        }
    }
}

#[test]
fn measurement_algorithm_time_at_n2_t3() {
    assert_eq!(time_of(&build_measurement_algorithm(2, 3).unwrap()), 19);
}

#[test]
fn measurement_algorithm_is_normal_not_unitary() {
    let c = build_measurement_algorithm(2, 3).unwrap();
    assert!(check_property(&c, &CircuitProperty::normal_g0()));
    assert!(!check_property(&c, &CircuitProperty::Unitary));
    let p = DelayedMeasurement::default().purify(&c).unwrap().circuit;
    assert!(check_property(&p, &CircuitProperty::Unitary));
}

#[test]
fn control_width_values() {
    assert_eq!(control_width(1), 1);
    assert_eq!(control_width(2), 2);
    assert_eq!(control_width(3), 2);
    assert_eq!(control_width(7), 3);
    assert_eq!(control_width(8), 4);
}

#[test]
fn instance_validation() {
    let mut rng = rng_for(3, 0);
    let good = haar_state_orth0(2, &mut rng);
    assert!(OracleInstance::new(2, 1, vec![good.clone()], vec![good.clone()], true).is_ok());
    // overlaps |00⟩
    let bad = Ket::normalized(CVec::from_element(4, C64::new(1.0, 0.0))).unwrap();
    assert!(OracleInstance::new(2, 1, vec![bad], vec![good.clone()], true).is_err());
    // too few states
    assert!(OracleInstance::new(2, 2, vec![good.clone()], vec![good.clone()], true).is_err());
    // wrong dimension
    let small = haar_state_orth0(1, &mut rng);
    assert!(OracleInstance::new(2, 1, vec![small], vec![good], true).is_err());
}

#[test]
fn instance_json_round_trip_and_hash() {
    let inst = instance(2, 3, true, 5);
    let back = OracleInstance::from_json(&inst.to_json()).unwrap();
    assert_eq!(back, inst);
    assert_eq!(back.content_hash(), inst.content_hash());
    assert_eq!(inst.content_hash().len(), 64);
    assert_ne!(inst.with_out(false).content_hash(), inst.content_hash());
    assert!(OracleInstance::from_json("{\"n\": 2}").is_err());
}

#[test]
fn oracle_first_clause() {
    let inst = instance(2, 3, true, 11);
    let o = build_oracle(&inst).unwrap();
    let z = basis(4, 0);
    let src = triple(&inst, 0, &z, &z);
    let dst = triple(&inst, 0, inst.psi(1).amplitudes(), inst.phi(1).amplitudes());
    let amp = dst.dotc(&(o.matrix() * &src));
    assert!((amp - C64::new(1.0, 0.0)).norm() < 1e-9);
}

#[test]
fn oracle_middle_clauses_swap() {
    let inst = instance(3, 3, false, 12);
    let o = build_oracle(&inst).unwrap();
    let z = basis(8, 0);
    for i in 1..3 {
        let src = triple(&inst, i, inst.psi(i).amplitudes(), &z);
        let dst = triple(&inst, i, inst.psi(i + 1).amplitudes(), inst.phi(i + 1).amplitudes());
        assert!(
            (dst.dotc(&(o.matrix() * &src)) - C64::new(1.0, 0.0)).norm() < 1e-9,
            "clause {i}"
        );
        assert!(
            (src.dotc(&(o.matrix() * &dst)) - C64::new(1.0, 0.0)).norm() < 1e-9,
            "clause {i} back"
        );
    }
}

#[test]
fn oracle_final_clause_writes_out() {
    for out in [false, true] {
        let inst = instance(2, 3, out, 13);
        let o = build_oracle(&inst).unwrap();
        let src = triple(&inst, 3, inst.psi(3).amplitudes(), &basis(4, 0));
        // out·0^{n-1}: MSB of the second register
        let dst = triple(&inst, 3, inst.psi(3).amplitudes(), &basis(4, if out { 2 } else { 0 }));
        assert!(((o.matrix() * &src) - dst).norm() < 1e-9, "out={out}");
    }
}

#[test]
fn oracle_is_unitary_and_block_involution() {
    for (n, t) in [(1, 1), (2, 1), (2, 3), (3, 3), (2, 2)] {
        let inst = instance(n, t, true, 14);
        let o = build_oracle(&inst).unwrap();
        assert!(unitarity_deviation(o.matrix()) < 1e-9);
        for c in 0..t {
            let b = oracle_block(&inst, c);
            let d = b.nrows();
            assert!(max_abs(&(&b * &b - CMat::identity(d, d))) < 1e-9, "n={n} t={t} c={c}");
        }
    }
}

#[test]
fn oracle_preserves_orthogonal_states() {
    let inst = instance(2, 3, true, 15);
    let o = build_oracle(&inst).unwrap();
    let mut rng = rng_for(15, 1);
    let z = basis(4, 0);
    // τ ⊥ ψ_1 on control 1: clause 1 only moves |1⟩|ψ_1⟩|0⟩ and its image
    for _ in 0..5 {
        let mut tau = haar_state_orth0(2, &mut rng).into_amplitudes();
        let p = inst.psi(1).amplitudes();
        tau -= p * p.dotc(&tau);
        let tau = &tau / C64::new(tau.norm(), 0.0);
        let v = triple(&inst, 1, &tau, &z);
        assert!(((o.matrix() * &v) - &v).norm() < 1e-9);
    }
}

#[test]
fn unused_control_values_are_identity() {
    let inst = instance(2, 2, true, 16);
    let b = oracle_block(&inst, 3);
    assert!(max_abs(&(b - CMat::identity(16, 16))) == 0.0);
}

#[test]
fn increment_cycles_through_t_plus_one_values() {
    for t in [1usize, 2, 3, 5, 7] {
        let inc = increment(t);
        let d = 1 << control_width(t);
        for c in 0..d {
            let img = inc.matrix() * basis(d, c);
            let expect = if c <= t { (c + 1) % (t + 1) } else { c };
            assert!((img - basis(d, expect)).norm() == 0.0);
        }
    }
}

#[test]
fn oracle_budget_is_enforced() {
    let inst = instance(5, 3, true, 17);
    assert!(matches!(build_oracle(&inst), Err(qpurify::Error::Budget { .. })));
}

#[test]
fn salted_oracle_is_block_diagonal() {
    let s = SaltedInstance::random(1, 2, 1, &mut rng_for(18, 0));
    let u = build_salted_oracle(&s).unwrap();
    assert!(unitarity_deviation(u.matrix()) < 1e-9);
    let block = 1 << s.instances[0].arity();
    for (x, inst) in s.instances.iter().enumerate() {
        let o = build_oracle(inst).unwrap();
        let view = u.matrix().view((x * block, x * block), (block, block)).into_owned();
        assert!(max_abs(&(view - o.matrix())) == 0.0);
    }
    let off = u.matrix().view((0, block), (block, block)).into_owned();
    assert!(max_abs(&off) == 0.0);
}

#[test]
fn salted_algorithm_outputs_f_of_salt() {
    let s = SaltedInstance::random(2, 2, 1, &mut rng_for(19, 0));
    let c = build_salted_measurement_algorithm(2, 2, 1).unwrap();
    let reg = OracleRegistry::from([(ORACLE.to_string(), build_salted_oracle(&s).unwrap())]);
    let sim = Simulator::default();
    for x in 0..4usize {
        let bits = [x & 2 != 0, x & 1 != 0];
        let d = sim.run_distribution(&c, &bits, &reg).unwrap();
        let key = if s.f[x] { "1" } else { "0" };
        assert!((d.probability(key) - 1.0).abs() < 1e-9, "salt {x}");
    }
}

#[test]
fn salted_instance_rejects_mismatch() {
    let mut s = SaltedInstance::random(1, 2, 1, &mut rng_for(20, 0));
    s.f[0] = !s.f[0];
    assert!(s.validate().is_err());
    assert!(build_salted_oracle(&s).is_err());
}

#[test]
fn counting_world_first_query() {
    let inst = instance(2, 2, true, 21);
    let adv = Adversary {
        n: 2,
        t: 2,
        alg_qubits: inst.arity(),
        initial: basis(1 << inst.arity(), 0),
        steps: vec![AdversaryStep::Query],
        outputs: vec![],
    };
    let mut w = CountingWorld::new(&inst, &adv, 1).unwrap();
    run_adversary(&adv, &mut w).unwrap();
    let ledger = CountLedger::from_counting_world(&w);
    let support: Vec<_> = ledger.supported().collect();
    assert_eq!(support.len(), 1);
    let ((c, d), p) = support[0];
    assert_eq!(c, &vec![1, 0]);
    assert_eq!(d, &vec![1, 0]);
    assert!((p - 1.0).abs() < 1e-12);
}

#[test]
fn counting_world_saturates_past_bound() {
    let inst = instance(2, 1, true, 22);
    let adv = Adversary::haar(2, 1, 0, 3, &mut rng_for(22, 1));
    let mut w = CountingWorld::new(&inst, &adv, 1).unwrap();
    assert!(matches!(
        run_adversary(&adv, &mut w),
        Err(qpurify::Error::CountSaturation(_))
    ));
}

#[test]
fn copy_world_initial_registers_hold_l_copies() {
    let inst = instance(2, 2, true, 23);
    let adv = Adversary::haar(2, 2, 0, 0, &mut rng_for(23, 1));
    let w = CopyWorld::new(&inst, &adv, 5, 0, CopyMode::Exact).unwrap();
    let keys: Vec<_> = w.branches().keys().collect();
    assert_eq!(keys.len(), 1);
    let (s, t) = CopyWorld::copy_counts(keys[0], 2);
    assert_eq!(s, vec![5, 5]);
    assert_eq!(t, vec![5, 5]);
}

#[test]
fn copy_world_matches_counting_world() {
    let mut rng = rng_for(24, 0);
    for t in [1usize, 2] {
        for _ in 0..3 {
            let inst = OracleInstance::random(2, t, true, &mut rng);
            let adv = Adversary::haar(2, t, 1, 3, &mut rng);
            let mut cw = CountingWorld::new(&inst, &adv, 3).unwrap();
            run_adversary(&adv, &mut cw).unwrap();
            let mut ew = CopyWorld::new(&inst, &adv, 4, 3, CopyMode::Exact).unwrap();
            run_adversary(&adv, &mut ew).unwrap();
            let td =
                trace_distance_matrices(&algorithm_density(&cw).unwrap(), &algorithm_density(&ew).unwrap()).unwrap();
            assert!(td < 1e-9, "t={t}: {td}");
            assert!((total_weight(&ew) - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn real_world_matches_counting_world_for_one_query() {
    // a single query from |0⟩: both worlds produce |0,ψ_1,φ_1⟩ on the algorithm side
    let inst = instance(2, 1, true, 25);
    let adv = Adversary {
        n: 2,
        t: 1,
        alg_qubits: inst.arity(),
        initial: basis(1 << inst.arity(), 0),
        steps: vec![AdversaryStep::Query],
        outputs: vec![],
    };
    let mut r = RealWorld::new(&inst, &adv).unwrap();
    run_adversary(&adv, &mut r).unwrap();
    let mut c = CountingWorld::new(&inst, &adv, 1).unwrap();
    run_adversary(&adv, &mut c).unwrap();
    let a = algorithm_density(&r).unwrap();
    let b = algorithm_density(&c).unwrap();
    assert!(trace_distance_matrices(&a, &b).unwrap() < 1e-12);
}

#[test]
fn symmetric_world_differs_but_stays_normalised() {
    let mut rng = rng_for(26, 0);
    let inst = OracleInstance::random(2, 1, true, &mut rng);
    let adv = Adversary::haar(2, 1, 0, 2, &mut rng);
    let mut e = CopyWorld::new(&inst, &adv, 4, 2, CopyMode::Exact).unwrap();
    run_adversary(&adv, &mut e).unwrap();
    let mut s = CopyWorld::new(&inst, &adv, 4, 2, CopyMode::Symmetric).unwrap();
    run_adversary(&adv, &mut s).unwrap();
    assert_eq!(s.mode(), CopyMode::Symmetric);
    assert!((total_weight(&s) - 1.0).abs() < 1e-9);
    let td = joint_trace_distance(&e, &s);
    assert!(td > 1e-6 && td <= 1.0 + 1e-12, "{td}");
}

#[test]
fn symmetric_error_shrinks_with_more_copies() {
    let mut rng = rng_for(27, 0);
    let inst = OracleInstance::random(2, 1, true, &mut rng);
    let adv = Adversary::haar(2, 1, 0, 2, &mut rng);
    let tds: Vec<f64> = [4usize, 8, 16]
        .iter()
        .map(|&l| {
            let mut e = CopyWorld::new(&inst, &adv, l, 2, CopyMode::Exact).unwrap();
            run_adversary(&adv, &mut e).unwrap();
            let mut s = CopyWorld::new(&inst, &adv, l, 2, CopyMode::Symmetric).unwrap();
            run_adversary(&adv, &mut s).unwrap();
            joint_trace_distance(&e, &s)
        })
        .collect();
    assert!(tds.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{tds:?}");
}

#[test]
fn honest_run_ledger() {
    let inst = instance(2, 2, true, 28);
    let h = Adversary::honest(2, 2).unwrap();
    let mut w = CopyWorld::new(&inst, &h, 4, h.queries(), CopyMode::Exact).unwrap();
    run_adversary(&h, &mut w).unwrap();
    let ledger = CountLedger::from_copy_world(&w);
    assert!(ledger.holds());
    let support: Vec<_> = ledger.supported().collect();
    assert_eq!(support.len(), 1);
    assert_eq!(support[0].0, &(vec![0, 1], vec![1, 1]));
    assert!((ledger.success_weight() - 1.0).abs() < 1e-9);

    let mut r = RealWorld::new(&inst, &h).unwrap();
    run_adversary(&h, &mut r).unwrap();
    let p = measure_qubits(&r, &h.outputs);
    assert!((p[1] - 1.0).abs() < 1e-9, "{p:?}");
}

#[test]
fn ledger_flags_broken_tuples_and_merges() {
    let mut rng = rng_for(29, 0);
    let mut total = CountLedger::empty(2);
    for _ in 0..4 {
        let inst = OracleInstance::random(2, 2, false, &mut rng);
        let adv = Adversary::haar(2, 2, 0, 3, &mut rng);
        let mut w = CopyWorld::new(&inst, &adv, 4, 3, CopyMode::Exact).unwrap();
        run_adversary(&adv, &mut w).unwrap();
        total.merge(&CountLedger::from_copy_world(&w));
    }
    assert!(total.supported().count() > 1);
    assert!(total.violations().is_empty());
    let weight: f64 = total.supported().map(|(_, w)| w).sum();
    assert!((weight - 4.0).abs() < 1e-6);
}

#[test]
fn dimension_ledger_examples() {
    let r = dimension_ledger(2, 2, 2, 6);
    assert_eq!(r.d_initial, Some(216));
    assert_eq!(r.d_final, Some(6912));
    assert!((r.ratio - 32.0).abs() < 1e-12);
    assert!((r.log2_ratio - 5.0).abs() < 1e-9);
    for s in [0usize, 3, 7] {
        let r = dimension_ledger(3, 1, 5, s);
        assert!((r.ratio - (s as f64).exp2()).abs() < 1e-9);
    }
    // overflow falls back to log space
    let big = dimension_ledger(10, 8, 64, 40);
    assert_eq!(big.d_initial, None);
    assert!(big.log2_initial.is_finite() && big.log2_initial > 128.0);
}

#[test]
fn extraction_of_honest_algorithm() {
    let inst = instance(2, 3, true, 30);
    let c = DelayedMeasurement::default()
        .purify(&build_measurement_algorithm(2, 3).unwrap())
        .unwrap()
        .circuit;
    let e = extract_psi_t(&c, &[], &inst, &registry(&inst), &Simulator::default()).unwrap();
    assert_eq!(e.j, 3);
    assert!(e.overlap >= 1.0 - 1e-9, "{e:?}");
    assert!(e.meets_threshold());
    assert!((e.weights[3] - 1.0).abs() < 1e-9);
    assert!(e.weights[..3].iter().all(|&w| w < 1e-9));
}

#[test]
fn extraction_without_increment_has_no_weight() {
    use qpurify::circuit::CircuitBuilder;
    let inst = instance(2, 1, true, 31);
    let mut b = CircuitBuilder::new(algorithm_gate_set(1, inst.arity()));
    let qs = b.ancillas(inst.arity());
    b.gate(ORACLE, &qs).gate("H", &[qs[2]]).gate(ORACLE, &qs);
    b.outputs(&qs[..1]);
    let c = b.build().unwrap();
    let e = extract_psi_t(&c, &[], &inst, &registry(&inst), &Simulator::default()).unwrap();
    assert_eq!(e.overlap, 0.0);
    assert!(e.control_probability.iter().all(|&p| p == 0.0));
}

#[test]
fn phase_invariance_small_run() {
    let mut rng = rng_for(32, 0);
    let base = OracleInstance::random(2, 1, true, &mut rng);
    let adv = Adversary::haar(2, 1, 0, 2, &mut rng);
    let r = phase_invariance_check(&base, &adv, 5, 2_000, 33).unwrap();
    assert!(r.holds, "{r:?}");
    assert!(r.sigma > 0.0);
}

#[test]
fn exact_phase_average_hides_the_counters() {
    let mut rng = rng_for(34, 0);
    let base = OracleInstance::random(1, 1, true, &mut rng);
    let adv = Adversary::haar(1, 1, 0, 2, &mut rng);
    let gap = exact_phase_average_gap(&base, &adv, 5).unwrap();
    assert!(gap < 1e-12, "{gap}");
}

#[test]
fn phase_average_needs_modulus_above_twice_the_queries() {
    // M = 3 < 2T + 1: counter differences alias modulo M and the worlds separate
    let mut rng = rng_for(34, 0);
    let base = OracleInstance::random(1, 1, true, &mut rng);
    let adv = Adversary::haar(1, 1, 0, 2, &mut rng);
    let gap = exact_phase_average_gap(&base, &adv, 3).unwrap();
    assert!(gap > 1e-3, "{gap}");
}

#[test]
fn compressed_claim_holds_at_m3() {
    let r = compressed_oracle_claim(3, 35).unwrap();
    assert!(r.holds(), "{r:?}");
    assert!(r.moved_weight > 0.0);
}

#[test]
fn negative_counts_stay_rare() {
    let r = negative_count_check(2, 1, 2, 4, 1000, 36).unwrap();
    assert!(r.holds, "{r:?}");
    assert!(r.measured >= 0.0 && r.measured <= 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn oracle_unitary_for_random_instances(n in 1usize..=3, t in 1usize..=3, out: bool, seed: u64) {
        let inst = OracleInstance::random(n, t, out, &mut rng_for(seed, 0));
        let o = build_oracle(&inst).unwrap();
        prop_assert!(unitarity_deviation(o.matrix()) < 1e-9);
    }

    #[test]
    fn count_ledger_constraint_on_random_adversaries(t in 1usize..=2, queries in 1usize..=3, work in 0usize..=1, seed: u64) {
        let mut rng = rng_for(seed, 1);
        let inst = OracleInstance::random(2, t, true, &mut rng);
        let adv = Adversary::haar(2, t, work, queries, &mut rng);
        let mut w = CopyWorld::new(&inst, &adv, 4, queries, CopyMode::Exact).unwrap();
        run_adversary(&adv, &mut w).unwrap();
        prop_assert!(CountLedger::from_copy_world(&w).holds());
    }

    #[test]
    fn extraction_overlap_in_unit_interval(seed: u64) {
        use qpurify::bounds::with_adjoint;
        use qpurify::circuit::{CircuitBuilder, GateSet};
        let mut rng = rng_for(seed, 2);
        let inst = OracleInstance::random(2, 1, true, &mut rng);
        let arity = inst.arity();
        let mut defs = vec![qpurify::circuit::GateDef::oracle(ORACLE, arity)];
        defs.extend(with_adjoint("U0", qpurify::qcore::haar_unitary(1 << arity, &mut rng)).unwrap());
        defs.extend(with_adjoint("U1", qpurify::qcore::haar_unitary(1 << arity, &mut rng)).unwrap());
        let mut b = CircuitBuilder::new(GateSet::g0_with(defs).unwrap());
        let qs = b.ancillas(arity);
        b.gate("U0", &qs).gate(ORACLE, &qs).gate("U1", &qs).gate(ORACLE, &qs);
        b.outputs(&qs[..1]);
        let c = b.build().unwrap();
        let e = extract_psi_t(&c, &[], &inst, &registry(&inst), &Simulator::default()).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-9).contains(&e.overlap));
        prop_assert_eq!(e.weights.len(), 2);
        for (w, p) in e.weights.iter().zip(&e.control_probability) {
            prop_assert!(*w <= *p + 1e-12);
        }
    }
}
