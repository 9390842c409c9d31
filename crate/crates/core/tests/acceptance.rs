//! End-to-end acceptance suite: one line per criterion, non-zero exit on any
//! failure. Reference values are computed independently in this file.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use num_complex::Complex;
use rand::Rng;

use qnetsim::algorithms::{
    default_iterations, order_find, qft, qft_circuit, qft_matrix, shor_attempt, shor_factor,
    success_probability, AttemptKind, GroverInstance, OrderFindingInstance,
};
use qnetsim::byzantine::{deal_triplets, run_broadcast, DealMode, Decision, Role, Scenario};
use qnetsim::fingerprint::{
    bits_of, fingerprint_state, referee_compare, swap_test, swap_test_probability, Code,
    HadamardCode,
};
use qnetsim::games::{
    contract_commit, cooperate, defect, ewl_payoffs, expected_revocation_fidelity,
    hostage_exchange, nash_check, quantum_q, Adversary, ExchangeOutcome, GameConfig, PayoffMatrix,
    Side,
};
use qnetsim::netsim::{
    build_topology, random_hop_keys, teleport_route, trusted_relay_key_transport, virtual_link,
    teleport_virtual, EntanglementStore, ResourceLedger, TopologySpec,
};
use qnetsim::protocols::{
    entangle_distribute, interferometer, superdense_decode, superdense_encode, swap_chain,
    teleport, InterferometerConfig,
};
use qnetsim::qkd::{eve_information, run_bb84, run_bb84_session, QkdParams};
use qnetsim::qsim::{Gate, NamedState};
use qnetsim::rng::{seeded, trial_stream};
use qnetsim::QState;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(got: f64, want: f64, tol: f64, what: &str) -> std::result::Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{what}: got {got}, want {want} ± {tol}"))
}

/// Binomial proportion `hits / n` within three standard errors of `p`.
fn within_3_sigma(hits: usize, n: usize, p: f64, what: &str) -> std::result::Result<(), String> {
    let rate = hits as f64 / n as f64;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    ensure((rate - p).abs() <= 3.0 * sigma, || {
        format!("{what}: rate {rate}, expected {p} ± {}", 3.0 * sigma)
    })
}

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn random_qubit<R: Rng>(rng: &mut R) -> QState {
    QState::random(&[2], rng).unwrap()
}

fn interferometry() -> Check {
    let run = |splitters, obstacle| interferometer(InterferometerConfig { splitters, obstacle }).unwrap();
    let one = run(1, false);
    close(one.p_a, 0.5, 1e-9, "one splitter, A")?;
    close(one.p_b, 0.5, 1e-9, "one splitter, B")?;
    let two = run(2, false);
    close(two.p_a, 1.0, 1e-9, "two splitters, A")?;
    close(two.p_b, 0.0, 1e-9, "two splitters, B")?;
    let blocked = run(2, true);
    let seen = blocked.p_a + blocked.p_b;
    close(blocked.p_absorbed, 0.5, 1e-9, "obstacle absorption")?;
    close(blocked.p_a / seen, 0.5, 1e-9, "obstacle, conditional A")?;
    close(blocked.p_b / seen, 0.5, 1e-9, "obstacle, conditional B")?;
    Ok("50/50, 100/0, conditional 50/50".into())
}

fn bb84_agreement() -> Check {
    let r = run_bb84_session(&QkdParams { n_pulses: 100_000, seed: 11, ..Default::default() })
        .map_err(|e| e.to_string())?;
    // matching basis (1/2) always agrees, mismatched basis agrees half the time
    let want = 0.5 * 1.0 + 0.5 * 0.5;
    close(r.pre_sift_agreement, want, 0.01, "pre-sift agreement")?;
    Ok(format!("agreement {:.4}", r.pre_sift_agreement))
}

fn bb84_sifting() -> Check {
    let r = run_bb84_session(&QkdParams { n_pulses: 100_000, seed: 12, ..Default::default() })
        .map_err(|e| e.to_string())?;
    close(r.sifted_fraction, 0.5, 0.01, "sifted fraction")?;
    Ok(format!("sifted {:.4}", r.sifted_fraction))
}

fn intercept_resend() -> Check {
    let session = |lambda: f64, seed| {
        run_bb84_session(&QkdParams {
            n_pulses: 100_000,
            eve_lambda: lambda,
            seed,
            ..Default::default()
        })
        .map_err(|e| e.to_string())
    };
    let full = session(1.0, 21)?;
    close(full.qber, 0.25, 0.02, "QBER at λ=1")?;
    let light = session(0.1, 22)?;
    close(light.qber, 0.025, 0.01, "QBER at λ=0.1")?;
    close(eve_information(0.1), 0.05, 1e-12, "Eve information at λ=0.1")?;
    // Eve learns a sifted bit when she intercepts (λ) in the right basis (1/2)
    let known = (light.eve_known_fraction * light.sifted_len as f64).round() as usize;
    within_3_sigma(known, light.sifted_len, 0.05, "Eve's known fraction at λ=0.1")?;
    for (i, lambda) in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0].into_iter().enumerate() {
        let r = session(lambda, 30 + i as u64)?;
        let errors = (r.true_qber * r.sifted_len as f64).round() as usize;
        within_3_sigma(errors, r.sifted_len, 0.25 * lambda, &format!("QBER at λ={lambda}"))?;
    }
    Ok(format!("λ=1 → {:.4}, λ=0.1 → {:.4}", full.qber, light.qber))
}

fn reconciliation_soundness() -> Check {
    let flips = [0.0, 0.01, 0.05];
    let mut completed = 0;
    for trial in 0..1000u64 {
        let params = QkdParams {
            n_pulses: 10_000,
            channel_flip: flips[trial as usize % 3],
            ..Default::default()
        };
        let mut rng = trial_stream(5, trial);
        let s = run_bb84(&params, &mut rng).map_err(|e| e.to_string())?;
        if s.report.aborted {
            continue;
        }
        completed += 1;
        ensure(s.alice_key == s.bob_key, || format!("trial {trial}: keys differ"))?;
        let b = s.report.budget;
        let want = b.n as i64 - b.k as i64 - b.l as i64 - b.r as i64 - b.s as i64;
        ensure(s.alice_key.len() as i64 == want, || {
            format!("trial {trial}: key length {} ≠ N−K−L−R−S = {want}", s.alice_key.len())
        })?;
        ensure(b.k == s.report.reconciliation.disclosed_parities, || {
            format!("trial {trial}: K does not match disclosed parities")
        })?;
    }
    ensure(completed > 900, || format!("only {completed} of 1000 sessions completed"))?;
    Ok(format!("{completed}/1000 sessions completed, all keys identical"))
}

fn superdense() -> Check {
    let bell00: QState = NamedState::Bell(0, 0).build();
    for bits in 0..4u8 {
        for _ in 0..3 {
            let sent = superdense_encode(bits, &bell00).map_err(|e| e.to_string())?;
            let got = superdense_decode(&sent).map_err(|e| e.to_string())?;
            ensure(got == bits, || format!("sent {bits}, decoded {got}"))?;
        }
    }
    let bells: Vec<QState> = (0..4).map(|i| NamedState::Bell(i >> 1, i & 1).build()).collect();
    for (i, a) in bells.iter().enumerate() {
        for (j, b) in bells.iter().enumerate() {
            let ip = a.inner(b).unwrap().norm();
            close(ip, if i == j { 1.0 } else { 0.0 }, 1e-9, &format!("⟨β{i}|β{j}⟩"))?;
        }
    }
    Ok("4 messages round-trip, Bell basis orthonormal".into())
}

fn teleportation() -> Check {
    let mut rng = seeded(7);
    let bell00: QState = NamedState::Bell(0, 0).build();
    for i in 0..100 {
        let psi = random_qubit(&mut rng);
        let out = teleport(&psi, &bell00, &mut rng).map_err(|e| e.to_string())?;
        close(out.state.fidelity(&psi).unwrap(), 1.0, 1e-9, &format!("teleport state {i}"))?;
    }
    let relay = entangle_distribute(&mut rng).map_err(|e| e.to_string())?;
    close(relay.state.fidelity(&bell00).unwrap(), 1.0, 1e-9, "router-mediated Bell pair")?;
    for hops in 1..=6 {
        let chain = swap_chain(hops, &mut rng).map_err(|e| e.to_string())?;
        close(chain.state.fidelity(&bell00).unwrap(), 1.0, 1e-9, &format!("{hops}-hop swap chain"))?;
    }
    // the same over a router tree: 6-hop host-to-host routes
    let topo = build_topology(&TopologySpec { levels: 3, fanouts: vec![2], hosts_per_router: 2 })
        .map_err(|e| e.to_string())?;
    let hosts: Vec<usize> = topo.hosts().collect();
    let (a, b) = (hosts[0], *hosts.last().unwrap());
    let hops = topo.route_path(a, b).unwrap().len() - 1;
    ensure(hops == 6, || format!("expected a 6-hop route, got {hops}"))?;
    let mut store = EntanglementStore::provisioned(&topo, 2);
    let mut ledger = ResourceLedger::default();
    let psi = random_qubit(&mut rng);
    let routed = teleport_route(&topo, &mut store, &psi, a, b, &mut ledger, &mut rng)
        .map_err(|e| e.to_string())?;
    close(routed.fidelity(&psi).unwrap(), 1.0, 1e-9, "6-hop routed teleport")?;
    ensure(ledger.epr_consumed == 6 && ledger.classical_bits_sent == 12, || {
        format!("routed ledger {ledger:?}")
    })?;
    virtual_link(&topo, &mut store, a, b, &mut ledger, &mut rng).map_err(|e| e.to_string())?;
    let over_link = teleport_virtual(&mut store, &psi, a, b, &mut ledger, &mut rng)
        .map_err(|e| e.to_string())?;
    close(over_link.fidelity(&psi).unwrap(), 1.0, 1e-9, "teleport over 6-hop virtual link")?;
    Ok("100 random states, relay and 1–6 hop chains at fidelity 1".into())
}

fn no_cloning() -> Check {
    let cnot = Gate::library("CNOT").unwrap();
    let copy = |psi: &QState| psi.tensor(&QState::basis(&[2], 0).unwrap()).apply(&cnot, &[0, 1]).unwrap();
    for bit in 0..2 {
        let psi = QState::basis(&[2], bit).unwrap();
        close(copy(&psi).fidelity(&psi.tensor(&psi)).unwrap(), 1.0, 1e-9, "basis state copy")?;
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = QState::qubit(c(h, 0.0), c(h, 0.0)).unwrap();
    let out = copy(&plus);
    // (|00⟩+|11⟩)/√2 against (|00⟩+|01⟩+|10⟩+|11⟩)/2
    let amps = out.amplitudes();
    let overlap: Complex<f64> = amps.iter().map(|a| a * 0.5).sum();
    let want = overlap.norm_sqr();
    let got = out.fidelity(&plus.tensor(&plus)).unwrap();
    close(want, 0.5, 1e-9, "reference overlap")?;
    close(got, 0.5, 1e-9, "CNOT copier overlap")?;
    Ok(format!("|⟨ψψ|CNOT(ψ0)⟩|² = {got:.12}"))
}

fn byzantine() -> Check {
    let mut rng = seeded(9);
    for trial in 0..10_000 {
        let x = rng.random();
        let o = run_broadcast(30, x, Scenario::AllHonest, DealMode::Classical, &mut rng)
            .map_err(|e| e.to_string())?;
        ensure(o.decisions == [Decision::Bit(x); 3], || {
            format!("honest trial {trial} disagreed: {:?}", o.decisions)
        })?;
    }
    // z-basis statistics of the Aharonov state, sampled through the simulator
    let aharonov: QState = NamedState::Aharonov3.build();
    let pool = deal_triplets(120_000, DealMode::StateVector, &mut rng).map_err(|e| e.to_string())?;
    let mut counts = std::collections::HashMap::new();
    for t in pool.triplets() {
        *counts.entry(*t).or_insert(0usize) += 1;
    }
    let mut tv = 0.0;
    for a in 0..3usize {
        for b in 0..3usize {
            for d in 0..3usize {
                let exact = aharonov.amplitude(&[a, b, d]).norm_sqr();
                let distinct = a != b && b != d && a != d;
                close(exact, if distinct { 1.0 / 6.0 } else { 0.0 }, 1e-12, "Aharonov amplitude")?;
                let key = [a as u8, b as u8, d as u8];
                let seen = counts.get(&key).copied().unwrap_or(0) as f64 / pool.len() as f64;
                tv += 0.5 * (seen - exact).abs();
            }
        }
    }
    ensure(tv <= 0.01, || format!("total variation {tv}"))?;
    let trials = 1000;
    let mut r0_contained = 0;
    let mut s_detected = 0;
    for _ in 0..trials {
        let x = rng.random();
        let o = run_broadcast(300, x, Scenario::R0Cheats, DealMode::Classical, &mut rng)
            .map_err(|e| e.to_string())?;
        if o.decisions[2] == Decision::Bit(x) && o.detected_cheater == Some(Role::R0) {
            r0_contained += 1;
        }
        let o = run_broadcast(300, x, Scenario::SCheats, DealMode::Classical, &mut rng)
            .map_err(|e| e.to_string())?;
        if o.receivers_consistent() && o.detected_cheater == Some(Role::Sender) {
            s_detected += 1;
        }
    }
    let (r0, s) = (r0_contained as f64 / trials as f64, s_detected as f64 / trials as f64);
    ensure(r0 >= 0.99, || format!("cheating R0 contained in {r0}"))?;
    ensure(s >= 0.99, || format!("cheating S detected in {s}"))?;
    Ok(format!("honest 1.0, TV {tv:.4}, R0 {r0:.3}, S {s:.3}"))
}

fn fingerprinting() -> Check {
    let mut rng = seeded(10);
    let n = 3;
    let code = HadamardCode::new(n).map_err(|e| e.to_string())?;
    for x in 0..1usize << n {
        let bits = bits_of(x, n);
        for _ in 0..50 {
            ensure(referee_compare(&bits, &bits, &code, 4, &mut rng).unwrap(), || {
                format!("equal input {x} rejected")
            })?;
        }
    }
    let (x, y) = (bits_of(3, n), bits_of(5, n));
    let (wx, wy) = (code.encode(&x).unwrap(), code.encode(&y).unwrap());
    let agree = wx.iter().zip(&wy).filter(|(a, b)| a == b).count() as f64;
    let overlap = agree / code.m() as f64;
    let law = (1.0 + overlap * overlap) / 2.0;
    close(law, 0.625, 1e-12, "reference acceptance")?;
    let fx = fingerprint_state(&x, &code).unwrap();
    let fy = fingerprint_state(&y, &code).unwrap();
    let exact = swap_test_probability(&fx.state, &fy.state).unwrap();
    close(exact, law, 1e-9, "analytic acceptance")?;
    let trials = 10_000;
    let accepted = (0..trials).filter(|_| swap_test(&fx, &fy, &mut rng).unwrap()).count();
    within_3_sigma(accepted, trials, law, "empirical acceptance")?;
    for i in 0..50 {
        let dims = [2, 2];
        let a = QState::random(&dims, &mut rng).unwrap();
        let b = QState::random(&dims, &mut rng).unwrap();
        let o = a.inner(&b).unwrap().norm_sqr();
        close(swap_test_probability(&a, &b).unwrap(), (1.0 + o) / 2.0, 1e-9, &format!("SWAP law pair {i}"))?;
    }
    Ok(format!("analytic {exact:.12}, empirical {:.4}", accepted as f64 / trials as f64))
}

fn ewl() -> Check {
    let pd = PayoffMatrix::prisoners_dilemma();
    let classical = GameConfig::new(0.0, pd).unwrap();
    let moves = [cooperate(), defect()];
    for (i, a) in moves.iter().enumerate() {
        for (j, b) in moves.iter().enumerate() {
            let got = ewl_payoffs(a, b, &classical).map_err(|e| e.to_string())?;
            let want = pd.get(i, j);
            ensure(got == want, || format!("γ=0 cell ({i},{j}): {got:?} ≠ {want:?}"))?;
        }
    }
    let quantum = GameConfig::new(FRAC_PI_2, pd).unwrap();
    let q = quantum_q();
    let (pa, pb) = ewl_payoffs(&q, &q, &quantum).map_err(|e| e.to_string())?;
    close(pa, 3.0, 1e-9, "(Q,Q) row payoff")?;
    close(pb, 3.0, 1e-9, "(Q,Q) column payoff")?;
    ensure(nash_check(&q, &quantum, 32).map_err(|e| e.to_string())?, || {
        "Q is not a Nash equilibrium on the 32×32 grid".into()
    })?;
    Ok("classical table at γ=0, (3,3) and Nash at γ=π/2".into())
}

fn contracts() -> Check {
    let mut rng = seeded(12);
    for i in 0..50 {
        let psi = random_qubit(&mut rng);
        let (a, b) = (psi.amplitudes()[0].norm_sqr(), psi.amplitudes()[1].norm_sqr());
        let got = expected_revocation_fidelity(&psi).map_err(|e| e.to_string())?;
        close(got, a * a + b * b, 1e-6, &format!("revocation fidelity {i}"))?;
    }
    // the sampled mean agrees with the same law
    let psi = random_qubit(&mut rng);
    let (a, b) = (psi.amplitudes()[0].norm_sqr(), psi.amplitudes()[1].norm_sqr());
    let contract = contract_commit(&[psi], 1).unwrap();
    let samples = 4000;
    let mean = (0..samples)
        .map(|_| contract.revoke(&mut rng).unwrap().bob_fidelity(0).unwrap())
        .sum::<f64>()
        / samples as f64;
    let var = a * a * a + b * b * b - (a * a + b * b).powi(2);
    close(mean, a * a + b * b, 3.0 * (var / samples as f64).sqrt() + 1e-12, "sampled revocation fidelity")?;
    let data = [random_qubit(&mut rng)];
    let mut rates = Vec::new();
    for t in [1usize, 4, 10] {
        let trials = 10_000;
        let mut detected = 0;
        for trial in 0..trials as u64 {
            let mut r = trial_stream(100 + t as u64, trial);
            let report = hostage_exchange(&data, &data, t, Adversary::BobMeasuresEarly, &mut r)
                .map_err(|e| e.to_string())?;
            if report.outcome == ExchangeOutcome::ViolationDetected(Side::Bob) {
                detected += 1;
            }
        }
        within_3_sigma(detected, trials, 1.0 - 0.5f64.powi(t as i32), &format!("detection at t={t}"))?;
        rates.push(format!("t={t}: {:.4}", detected as f64 / trials as f64));
    }
    Ok(rates.join(", "))
}

fn grover() -> Check {
    let inst = GroverInstance::with_marked(10, &[613]).map_err(|e| e.to_string())?;
    let t = default_iterations(10, 1);
    let want_t = (PI / 4.0 * 1024f64.sqrt()).floor() as usize;
    ensure(t == want_t, || format!("iterations {t} ≠ {want_t}"))?;
    let best = success_probability(&inst, t).map_err(|e| e.to_string())?;
    let theta = (1.0f64 / 1024.0).sqrt().asin();
    close(best, ((2 * t + 1) as f64 * theta).sin().powi(2), 1e-9, "success vs sin² law")?;
    ensure(best >= 0.994, || format!("success {best} < 0.994"))?;
    let over = success_probability(&inst, 2 * t).map_err(|e| e.to_string())?;
    ensure(over < best, || format!("2× iterations {over} not below {best}"))?;
    Ok(format!("T={t}: {best:.6}, 2T: {over:.6}"))
}

fn shor() -> Check {
    let mut rng = seeded(14);
    let inst = OrderFindingInstance::new(15, 7).map_err(|e| e.to_string())?;
    let period = (0..30)
        .find_map(|_| order_find(&inst, &mut rng).ok().and_then(|a| a.period))
        .ok_or("no period for y=7 mod 15")?;
    ensure(period == 4, || format!("order of 7 mod 15: {period}"))?;
    let attempt = (0..30)
        .map(|_| shor_attempt(15, 7, &mut rng).unwrap())
        .find(|a| a.kind == AttemptKind::Factor)
        .ok_or("y=7 never produced a factor of 15")?;
    ensure(attempt.order == Some(4), || format!("attempt order {:?}", attempt.order))?;
    let f = attempt.factor.ok_or("factor attempt without a factor")?;
    let mut pair = [f, 15 / f];
    pair.sort_unstable();
    ensure(pair == [3, 5] && f * (15 / f) == 15, || format!("factors of 15: {pair:?}"))?;
    let r21 = shor_factor(21, &mut rng, 30).map_err(|e| e.to_string())?;
    let (p, q) = (r21.factor, r21.cofactor);
    ensure(p * q == 21 && p > 1 && q > 1, || format!("21 = {p}·{q}?"))?;
    for n in 1..=8usize {
        let circuit = qft_circuit(n);
        ensure(circuit.gate_count() == n * (n + 1) / 2, || {
            format!("n={n}: {} gates", circuit.gate_count())
        })?;
        let dim = 1usize << n;
        let sites: Vec<usize> = (0..n).collect();
        let matrix = qft_matrix(n);
        for j in 0..dim {
            let out = qft(&QState::basis(&vec![2; n], j).unwrap(), &sites).map_err(|e| e.to_string())?;
            for (k, amp) in out.amplitudes().iter().enumerate() {
                let want = Complex::from_polar(1.0 / (dim as f64).sqrt(), 2.0 * PI * (j * k) as f64 / dim as f64);
                close((amp - want).norm(), 0.0, 1e-9, &format!("QFT n={n} ({k},{j})"))?;
                close((matrix.entry(k, j) - want).norm(), 0.0, 1e-9, &format!("QFT matrix n={n}"))?;
            }
        }
    }
    Ok(format!("15 = 3·5 via r=4, 21 = {p}·{q}, QFT n ≤ 8 exact"))
}

fn trusted_relay() -> Check {
    let topo = build_topology(&TopologySpec { levels: 2, fanouts: vec![2], hosts_per_router: 2 })
        .map_err(|e| e.to_string())?;
    let host = topo.hosts().next().unwrap();
    let far_router = topo.routers().filter(|&r| r != 0).last().unwrap();
    let path = topo.route_path(host, far_router).unwrap();
    ensure(path.len() == 4, || format!("expected 3 hops, got {path:?}"))?;
    let mut rng = seeded(15);
    let key: Vec<bool> = (0..256).map(|_| rng.random()).collect();
    let hop_keys = random_hop_keys(3, key.len(), &mut rng);
    let mut ledger = ResourceLedger::default();
    let t = trusted_relay_key_transport(&topo, &key, host, far_router, &hop_keys, &mut ledger)
        .map_err(|e| e.to_string())?;
    ensure(t.delivered == key, || "delivered key differs".into())?;
    for (w, hk) in t.wire.iter().zip(&hop_keys) {
        ensure(w.payload != key, || format!("raw key on wire {}→{}", w.from, w.to))?;
        let decrypted: Vec<bool> = w.payload.iter().zip(hk).map(|(a, b)| a ^ b).collect();
        ensure(decrypted == key, || "wire record is not key ⊕ hop key".into())?;
    }
    let interior = path[1..path.len() - 1].to_vec();
    ensure(ledger.exposure == interior, || {
        format!("exposure {:?} ≠ interior {interior:?}", ledger.exposure)
    })?;
    let holders: Vec<usize> = t.relay_memory.iter().filter(|(_, m)| **m == key).map(|(n, _)| *n).collect();
    let mut sorted = interior.clone();
    sorted.sort_unstable();
    ensure(holders == sorted, || format!("key held by {holders:?}"))?;
    Ok(format!("path {path:?}, exposure {:?}", ledger.exposure))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 15] = [
        ("interferometer", interferometry),
        ("bb84 pre-sift agreement", bb84_agreement),
        ("bb84 sifted fraction", bb84_sifting),
        ("intercept-resend qber", intercept_resend),
        ("reconciliation soundness", reconciliation_soundness),
        ("superdense coding", superdense),
        ("teleportation and distribution", teleportation),
        ("no-cloning witness", no_cloning),
        ("detectable broadcast", byzantine),
        ("fingerprinting", fingerprinting),
        ("ewl game", ewl),
        ("contracts", contracts),
        ("grover", grover),
        ("shor and qft", shor),
        ("trusted relay", trusted_relay),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2} s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
