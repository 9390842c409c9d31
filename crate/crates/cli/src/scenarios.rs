//! Scenario plans: validated parameters plus one trial per RNG stream.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use qnetsim::algorithms::{grover_search, shor_factor, GroverInstance};
use qnetsim::byzantine::{run_broadcast, DealMode, Decision, Role, Scenario};
use qnetsim::fingerprint::{bits_of, fingerprint_state, referee_compare, swap_test_probability, HadamardCode};
use qnetsim::games::{
    cooperate, defect, ewl_payoffs, hostage_exchange, nash_check, quantum_q, strategy, Adversary,
    ExchangeOutcome, GameConfig, PayoffMatrix, Side,
};
use qnetsim::netsim::{
    build_topology, random_hop_keys, teleport_route, teleport_virtual, trusted_relay_key_transport,
    virtual_link, EntanglementStore, ResourceLedger, Topology, TopologySpec,
};
use qnetsim::protocols::{
    interferometer, superdense_decode, superdense_encode, swap_chain, teleport, DetectionStats,
    InterferometerConfig,
};
use qnetsim::qkd::{b92_session, AbortReason, run_bb84, QkdParams, ReceiveMode, Session};
use qnetsim::qsim::NamedState;
use qnetsim::rng::{trial_stream, SimRng};
use qnetsim::{GateOp, QState};

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::report::Record;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetMode {
    Teleport,
    Virtual,
    Relay,
}

/// A scenario with its parameters checked and converted.
#[derive(Clone, Debug)]
pub enum Plan {
    Interferometer(DetectionStats),
    Superdense { message: Option<u8> },
    Teleport { hops: usize },
    Bb84(QkdParams),
    B92(QkdParams),
    Byzantine { m: usize, scenario: Scenario, deal: DealMode },
    Fingerprint { code: HadamardCode, x: Vec<bool>, y: Vec<bool>, r: usize, p_accept: f64 },
    Ewl { config: GameConfig, alice: GateOp, bob: GateOp, resolution: usize },
    Contract { t: usize, adversary: Adversary, data: usize },
    Grover { n: usize, k: usize, iterations: Option<usize> },
    Shor { m: u64, attempts: usize },
    Netsim { topology: Topology, pairs: usize, mode: NetMode, key_len: usize },
}

fn usage(e: qnetsim::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn ewl_strategy(key: &str, spec: &str) -> Result<GateOp, CliError> {
    match spec {
        "C" | "c" => Ok(cooperate()),
        "D" | "d" => Ok(defect()),
        "Q" | "q" => Ok(quantum_q()),
        _ => {
            let parts: Vec<&str> = spec.split(',').collect();
            let [theta, phi] = parts[..] else {
                return Err(CliError::Usage(format!("invalid value \"{spec}\" for key \"{key}\": expected C, D, Q or theta,phi")));
            };
            let theta: f64 = crate::config::parse_field(key, theta)?;
            let phi: f64 = crate::config::parse_field(key, phi)?;
            if !(0.0..=PI).contains(&theta) || !(0.0..=PI / 2.0).contains(&phi) {
                return Err(CliError::Usage(format!("key \"{key}\": theta in [0, π], phi in [0, π/2]")));
            }
            Ok(strategy(theta, phi))
        }
    }
}

fn qkd_params(cfg: &ScenarioConfig) -> Result<QkdParams, CliError> {
    let receive_mode = match cfg.text("mode") {
        "" | "symbolic" => ReceiveMode::Symbolic,
        "state_vector" => ReceiveMode::StateVector,
        other => return Err(CliError::Usage(format!("invalid value \"{other}\" for key \"mode\""))),
    };
    let p = QkdParams {
        n_pulses: cfg.get("n")?,
        eve_lambda: cfg.get_opt("lambda")?.unwrap_or(0.0),
        channel_flip: cfg.get("flip")?,
        sample_fraction: cfg.get("sample")?,
        e_max: cfg.get("e_max")?,
        security_s: cfg.get("s")?,
        receive_mode,
        ..Default::default()
    };
    p.validate().map_err(usage)?;
    Ok(p)
}

impl Plan {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self, CliError> {
        Ok(match cfg.scenario {
            ScenarioKind::Interferometer => {
                let c = InterferometerConfig { splitters: cfg.get("splitters")?, obstacle: cfg.get("obstacle")? };
                Plan::Interferometer(interferometer(c).map_err(usage)?)
            }
            ScenarioKind::Superdense => {
                let message: Option<u8> = cfg.get_opt("message")?;
                if message.is_some_and(|m| m > 3) {
                    return Err(CliError::Usage("key \"message\" must be in 0..=3".into()));
                }
                Plan::Superdense { message }
            }
            ScenarioKind::Teleport => {
                let hops: usize = cfg.get("hops")?;
                if !(1..=10).contains(&hops) {
                    return Err(CliError::Usage("key \"hops\" must be in 1..=10".into()));
                }
                Plan::Teleport { hops }
            }
            ScenarioKind::Bb84 => Plan::Bb84(qkd_params(cfg)?),
            ScenarioKind::B92 => Plan::B92(qkd_params(cfg)?),
            ScenarioKind::Byzantine => {
                let m: usize = cfg.get("m")?;
                if m < 12 {
                    return Err(CliError::Usage("key \"m\" must be at least 12".into()));
                }
                let deal = match cfg.text("deal") {
                    "classical" => DealMode::Classical,
                    "state_vector" => DealMode::StateVector,
                    other => return Err(CliError::Usage(format!("invalid value \"{other}\" for key \"deal\""))),
                };
                Plan::Byzantine { m, scenario: cfg.text("adversary").parse().map_err(usage)?, deal }
            }
            ScenarioKind::Fingerprint => {
                let n: usize = cfg.get("n")?;
                let code = HadamardCode::new(n).map_err(usage)?;
                let (x, y): (usize, usize) = (cfg.get("x")?, cfg.get("y")?);
                if x >> n != 0 || y >> n != 0 {
                    return Err(CliError::Usage(format!("inputs must be below 2^{n}")));
                }
                let r: usize = cfg.get("r")?;
                if r == 0 {
                    return Err(CliError::Usage("key \"r\" must be at least 1".into()));
                }
                let (x, y) = (bits_of(x, n), bits_of(y, n));
                let fx = fingerprint_state(&x, &code).map_err(usage)?;
                let fy = fingerprint_state(&y, &code).map_err(usage)?;
                let p_accept = swap_test_probability(&fx.state, &fy.state).map_err(usage)?.powi(r as i32);
                Plan::Fingerprint { code, x, y, r, p_accept }
            }
            ScenarioKind::Ewl => Plan::Ewl {
                config: GameConfig::new(cfg.get("gamma")?, PayoffMatrix::prisoners_dilemma()).map_err(usage)?,
                alice: ewl_strategy("alice", cfg.text("alice"))?,
                bob: ewl_strategy("bob", cfg.text("bob"))?,
                resolution: cfg.get("resolution")?,
            },
            ScenarioKind::Contract => {
                let t: usize = cfg.get("t")?;
                if t == 0 {
                    return Err(CliError::Usage("key \"t\" must be at least 1".into()));
                }
                Plan::Contract { t, adversary: cfg.text("adversary").parse().map_err(usage)?, data: cfg.get("data")? }
            }
            ScenarioKind::Grover => {
                let (n, k): (usize, usize) = (cfg.get("n")?, cfg.get("k")?);
                GroverInstance::with_marked(n, &[]).map_err(usage)?;
                if k == 0 || k >= 1 << n {
                    return Err(CliError::Usage(format!("key \"k\" must be in 1..{}", 1usize << n)));
                }
                Plan::Grover { n, k, iterations: cfg.get_opt("iterations")? }
            }
            ScenarioKind::Shor => Plan::Shor { m: cfg.get("m")?, attempts: cfg.get("attempts")? },
            ScenarioKind::Netsim => {
                let fanouts = cfg
                    .text("fanout")
                    .split(',')
                    .map(|f| crate::config::parse_field("fanout", f))
                    .collect::<Result<Vec<usize>, _>>()?;
                let spec = TopologySpec { levels: cfg.get("levels")?, fanouts, hosts_per_router: cfg.get("hosts")? };
                let topology = build_topology(&spec).map_err(usage)?;
                if topology.hosts().count() < 2 {
                    return Err(CliError::Usage("topology needs at least two hosts".into()));
                }
                let mode = match cfg.text("mode") {
                    "teleport" => NetMode::Teleport,
                    "virtual" => NetMode::Virtual,
                    "relay" => NetMode::Relay,
                    other => return Err(CliError::Usage(format!("invalid value \"{other}\" for key \"mode\""))),
                };
                Plan::Netsim { topology, pairs: cfg.get("pairs")?, mode, key_len: cfg.get("key_len")? }
            }
        })
    }

    pub fn run_trial(&self, trial: usize, rng: &mut SimRng) -> qnetsim::Result<Record> {
        let rec = Record::new(trial);
        Ok(match self {
            Plan::Interferometer(d) => {
                let u: f64 = rng.random();
                let hit = if u < d.p_a { "a" } else if u < d.p_a + d.p_b { "b" } else { "absorbed" };
                rec.num("p_a", d.p_a).num("p_b", d.p_b).num("p_absorbed", d.p_absorbed).text("detector", hit)
                    .flag("hit_a", hit == "a")
            }
            Plan::Superdense { message } => {
                let m = message.unwrap_or_else(|| rng.random_range(0..4));
                let sent = superdense_encode(m, &NamedState::Bell(0, 0).build())?;
                let got = superdense_decode(&sent)?;
                rec.int("message", m).int("decoded", got).flag("correct", m == got).int("epr_pairs", 1).int("cbits", 0)
            }
            Plan::Teleport { hops } => {
                let psi = QState::random(&[2], rng)?;
                let chain = swap_chain(*hops, rng)?;
                let out = teleport(&psi, &chain.state, rng)?;
                rec.int("l1", out.bits.0)
                    .int("l2", out.bits.1)
                    .num("fidelity", out.state.fidelity(&psi)?)
                    .num("pair_fidelity", chain.state.fidelity(&NamedState::Bell(0, 0).build())?)
                    .int("epr_pairs", chain.resources.pairs + 1)
                    .int("cbits", chain.resources.cbits + 2)
            }
            Plan::Bb84(p) => qkd_record(rec, &run_bb84(p, rng)?, true),
            Plan::B92(p) => qkd_record(rec, &b92_session(p, rng)?, false),
            Plan::Byzantine { m, scenario, deal } => {
                let x: bool = rng.random();
                let o = run_broadcast(*m, x, *scenario, *deal, rng)?;
                let name = |d: Decision| match d {
                    Decision::Bit(b) => u8::from(b).to_string(),
                    Decision::Abort => "abort".into(),
                };
                let cheater = match o.detected_cheater {
                    Some(Role::Sender) => "sender",
                    Some(Role::R0) => "r0",
                    Some(Role::R1) => "r1",
                    None => "none",
                };
                let honest_receiver_value = match scenario {
                    Scenario::R0Cheats => o.decisions[2] == Decision::Bit(x),
                    _ => o.receivers_consistent() && o.decisions[1] != Decision::Abort,
                };
                rec.int("x", u8::from(x))
                    .text("r0", name(o.decisions[1]))
                    .text("r1", name(o.decisions[2]))
                    .flag("receivers_consistent", o.receivers_consistent())
                    .flag("honest_agreement", honest_receiver_value)
                    .text("detected_cheater", cheater)
            }
            Plan::Fingerprint { code, x, y, r, p_accept } => {
                let accepted = referee_compare(x, y, code, *r, rng)?;
                rec.flag("equal_inputs", x == y).flag("accepted", accepted).num("p_accept", *p_accept)
            }
            Plan::Ewl { config, alice, bob, resolution } => {
                let (pa, pb) = ewl_payoffs(alice, bob, config)?;
                let nash = alice == bob && nash_check(alice, config, *resolution)?;
                rec.num("payoff_alice", pa).num("payoff_bob", pb).flag("symmetric_nash", nash)
            }
            Plan::Contract { t, adversary, data } => {
                let a: Vec<QState> = (0..*data).map(|_| QState::random(&[2], rng)).collect::<qnetsim::Result<_>>()?;
                let b: Vec<QState> = (0..*data).map(|_| QState::random(&[2], rng)).collect::<qnetsim::Result<_>>()?;
                let r = hostage_exchange(&a, &b, *t, *adversary, rng)?;
                let (outcome, detected) = match r.outcome {
                    ExchangeOutcome::Completed { tampered: false } => ("completed", false),
                    ExchangeOutcome::Completed { tampered: true } => ("completed_tampered", false),
                    ExchangeOutcome::ViolationDetected(Side::Alice) => ("alice_caught", true),
                    ExchangeOutcome::ViolationDetected(Side::Bob) => ("bob_caught", true),
                    ExchangeOutcome::MutualDestruction => ("mutual_destruction", true),
                };
                rec.text("outcome", outcome)
                    .flag("detected", detected)
                    .opt_num("fidelity_alice", r.fidelity_received[0])
                    .opt_num("fidelity_bob", r.fidelity_received[1])
            }
            Plan::Grover { n, k, iterations } => {
                let marked: Vec<usize> = sample(rng, 1 << n, *k).into_vec();
                let inst = GroverInstance::with_marked(*n, &marked)?;
                let g = grover_search(&inst, *iterations, rng)?;
                rec.int("x", g.x)
                    .flag("found", g.found)
                    .int("iterations", g.iterations)
                    .num("success_probability", g.success_probability)
            }
            Plan::Shor { m, attempts } => {
                let r = shor_factor(*m, rng, *attempts)?;
                rec.int("factor", r.factor).int("cofactor", r.cofactor).int("attempts", r.attempts.len())
            }
            Plan::Netsim { topology, pairs, mode, key_len } => netsim_trial(rec, topology, *pairs, *mode, *key_len, rng)?,
        })
    }
}

fn qkd_record(rec: Record, s: &Session, bb84: bool) -> Record {
    let r = &s.report;
    let rec = rec.num("sifted_fraction", r.sifted_fraction);
    let rec = if bb84 { rec.num("pre_sift_agreement", r.pre_sift_agreement) } else { rec };
    let reason = match r.abort_reason {
        None => "",
        Some(AbortReason::ErrorRate) => "error_rate",
        Some(AbortReason::Unverified) => "unverified",
        Some(AbortReason::KeyExhausted) => "key_exhausted",
    };
    rec.num("qber", r.qber)
        .num("true_qber", r.true_qber)
        .num("eve_info_estimate", r.eve_info_estimate)
        .int("disclosed_parities", r.reconciliation.disclosed_parities)
        .int("final_key_len", r.final_key_len)
        .flag("keys_equal", r.keys_equal)
        .flag("aborted", r.aborted)
        .text("abort_reason", reason)
}

fn netsim_trial(
    rec: Record,
    topology: &Topology,
    pairs: usize,
    mode: NetMode,
    key_len: usize,
    rng: &mut SimRng,
) -> qnetsim::Result<Record> {
    let hosts: Vec<usize> = topology.hosts().collect();
    let pick = sample(rng, hosts.len(), 2);
    let (a, b) = (hosts[pick.index(0)], hosts[pick.index(1)]);
    let hops = topology.route_path(a, b)?.len() - 1;
    let mut store = EntanglementStore::provisioned(topology, pairs);
    let mut ledger = ResourceLedger::default();
    let rec = rec.int("src", a).int("dst", b).int("hops", hops);
    let (fidelity, delivered) = match mode {
        NetMode::Teleport => {
            let psi = QState::random(&[2], rng)?;
            let out = teleport_route(topology, &mut store, &psi, a, b, &mut ledger, rng).map_err(|f| f.error)?;
            (Some(out.fidelity(&psi)?), true)
        }
        NetMode::Virtual => {
            virtual_link(topology, &mut store, a, b, &mut ledger, rng)?;
            let psi = QState::random(&[2], rng)?;
            let out = teleport_virtual(&mut store, &psi, a, b, &mut ledger, rng)?;
            (Some(out.fidelity(&psi)?), true)
        }
        NetMode::Relay => {
            let key: Vec<bool> = (0..key_len).map(|_| rng.random()).collect();
            let hop_keys = random_hop_keys(hops, key_len, rng);
            let t = trusted_relay_key_transport(topology, &key, a, b, &hop_keys, &mut ledger)?;
            (None, t.delivered == key)
        }
    };
    Ok(rec
        .opt_num("fidelity", fidelity)
        .flag("delivered", delivered)
        .int("exposed_relays", ledger.exposure.len())
        .int("epr_pairs", ledger.epr_consumed)
        .int("cbits", ledger.classical_bits_sent))
}

/// Runs every trial on its own stream `(seed, i)`; the result order is the
/// trial order whatever the scheduling.
pub fn run_trials(plan: &Plan, trials: usize, seed: u64) -> qnetsim::Result<Vec<Record>> {
    (0..trials)
        .into_par_iter()
        .map(|i| plan.run_trial(i, &mut trial_stream(seed, i as u64)))
        .collect()
}

/// Replays trial 0 of a QKD plan with the pulse transcript kept and writes it
/// to `path`: a header row, then `index,alice_basis,alice_bit,eve_action,bob_basis,bob_bit`
/// per pulse.
pub fn write_transcript(plan: &Plan, seed: u64, path: &std::path::Path) -> Result<(), CliError> {
    let mut rng = trial_stream(seed, 0);
    let session = match plan {
        Plan::Bb84(p) => run_bb84(&QkdParams { keep_transcript: true, ..p.clone() }, &mut rng)?,
        Plan::B92(p) => b92_session(&QkdParams { keep_transcript: true, ..p.clone() }, &mut rng)?,
        _ => return Err(CliError::Usage("transcripts exist only for bb84 and b92".into())),
    };
    let mut buf = Vec::new();
    qnetsim::qkd::write_transcript(&session.transcript, &mut buf).expect("writing to memory");
    crate::report::write_atomic(path, &String::from_utf8(buf).expect("transcript is ASCII"))
}
