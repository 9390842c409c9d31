use rand::Rng;
use serde::Serialize;

use super::amplify::{KeyBudget, Toeplitz};
use super::reconcile::{reconcile, AbortReason, ReconcileConfig, ReconcileTranscript};
use super::{
    bb84_receive, bb84_transmit, channel_transmit, estimate_qber, eve_information, sift,
    EveAction, PulseRecord, Sifted,
};
use crate::error::{Error, Result};
use crate::rng::{seeded, SimRng};

/// How Bob's detector is simulated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiveMode {
    /// Basis/bit algebra.
    #[default]
    Symbolic,
    /// One single-qubit state vector per pulse.
    StateVector,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QkdParams {
    pub n_pulses: usize,
    /// Probability that a pulse is intercepted and resent.
    pub eve_lambda: f64,
    /// Probability that the channel flips a pulse within its basis.
    pub channel_flip: f64,
    pub sample_fraction: f64,
    pub e_max: f64,
    pub security_s: usize,
    pub seed: u64,
    pub receive_mode: ReceiveMode,
    pub reconcile: ReconcileConfig,
    /// Keep one [`PulseRecord`] per pulse.
    pub keep_transcript: bool,
}

impl Default for QkdParams {
    fn default() -> Self {
        Self {
            n_pulses: 10_000,
            eve_lambda: 0.0,
            channel_flip: 0.0,
            sample_fraction: 0.1,
            e_max: 0.11,
            security_s: 30,
            seed: 0,
            receive_mode: ReceiveMode::Symbolic,
            reconcile: ReconcileConfig::default(),
            keep_transcript: false,
        }
    }
}

impl QkdParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64, lo: f64, hi: f64| {
            if v.is_nan() || v < lo || v > hi {
                Err(Error::domain(format!("{name} = {v} outside [{lo}, {hi}]")))
            } else {
                Ok(())
            }
        };
        unit("eve_lambda", self.eve_lambda, 0.0, 1.0)?;
        unit("channel_flip", self.channel_flip, 0.0, 0.5)?;
        unit("e_max", self.e_max, 0.0, 1.0)?;
        if !(self.sample_fraction > 0.0 && self.sample_fraction < 1.0) {
            return Err(Error::domain("sample_fraction must lie in (0, 1)"));
        }
        if self.n_pulses == 0 {
            return Err(Error::domain("n_pulses must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SessionReport {
    pub pulses: usize,
    pub sifted_len: usize,
    pub sifted_fraction: f64,
    pub pre_sift_agreement: f64,
    /// Estimated from the sampled bits.
    pub qber: f64,
    /// Error rate over the whole sifted key (not observable by the parties).
    pub true_qber: f64,
    /// `eve_information(min(1, 4·qber))`.
    pub eve_info_estimate: f64,
    /// Fraction of sifted positions where the eavesdropper measured in
    /// Alice's basis.
    pub eve_known_fraction: f64,
    pub reconciliation: ReconcileTranscript,
    pub budget: KeyBudget,
    pub final_key_len: usize,
    pub keys_equal: bool,
    pub aborted: bool,
    pub abort_reason: Option<AbortReason>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Session {
    pub report: SessionReport,
    pub alice_key: Vec<bool>,
    pub bob_key: Vec<bool>,
    pub transcript: Vec<PulseRecord>,
}

fn fraction(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Raw data handed to the classical post-processing stage.
pub(super) struct RawKey {
    pub pulses: usize,
    pub pre_sift_agreement: f64,
    pub sifted: Sifted,
    pub eve_known: usize,
    pub transcript: Vec<PulseRecord>,
}

/// Estimation, reconciliation and privacy amplification.
pub(super) fn post_process<R: Rng + ?Sized>(
    raw: RawKey,
    params: &QkdParams,
    rng: &mut R,
) -> Result<Session> {
    let n = raw.sifted.alice.len();
    let errors = raw
        .sifted
        .alice
        .iter()
        .zip(&raw.sifted.bob)
        .filter(|(a, b)| a != b)
        .count();
    let est = estimate_qber(&raw.sifted.alice, &raw.sifted.bob, params.sample_fraction, rng)?;
    let (a, b, rt) = reconcile(&est.alice, &est.bob, est.qber, params.e_max, &params.reconcile, rng)?;
    let lambda_est = (4.0 * est.qber).min(1.0);
    let eve_info = eve_information(lambda_est);
    let budget = KeyBudget {
        n,
        k: rt.disclosed_parities,
        l: (eve_info * n as f64).ceil() as usize,
        r: est.revealed,
        s: params.security_s,
    };
    let mut abort_reason = rt.aborted;
    let (mut alice_key, mut bob_key) = (Vec::new(), Vec::new());
    if abort_reason.is_none() {
        match budget.final_len() {
            Some(m) if m <= a.len() => {
                let hash = Toeplitz::random(m, a.len(), rng);
                alice_key = hash.hash(&a)?;
                bob_key = hash.hash(&b)?;
            }
            _ => abort_reason = Some(AbortReason::KeyExhausted),
        }
    }
    let aborted = abort_reason.is_some();
    let report = SessionReport {
        pulses: raw.pulses,
        sifted_len: n,
        sifted_fraction: fraction(n, raw.pulses),
        pre_sift_agreement: raw.pre_sift_agreement,
        qber: est.qber,
        true_qber: fraction(errors, n),
        eve_info_estimate: eve_info,
        eve_known_fraction: fraction(raw.eve_known, n),
        reconciliation: rt,
        budget,
        final_key_len: alice_key.len(),
        keys_equal: !aborted && alice_key == bob_key,
        aborted,
        abort_reason,
    };
    Ok(Session {
        report,
        alice_key,
        bob_key,
        transcript: raw.transcript,
    })
}

/// Full BB84 session drawing all randomness from `rng`.
pub fn run_bb84<R: Rng + ?Sized>(params: &QkdParams, rng: &mut R) -> Result<Session> {
    params.validate()?;
    let tx = bb84_transmit(params.n_pulses, rng)?;
    let (arrived, eve) = channel_transmit(&tx.pulses, params.eve_lambda, params.channel_flip, rng)?;
    let (bob_bases, bob_bits) = bb84_receive(&arrived, params.receive_mode, rng);
    let agree = tx.bits.iter().zip(&bob_bits).filter(|(a, b)| a == b).count();
    let sifted = sift(&tx.bases, &bob_bases, &tx.bits, &bob_bits)?;
    let eve_known = sifted
        .kept
        .iter()
        .filter(|&&i| matches!(eve[i], EveAction::Intercept { basis, .. } if basis == tx.bases[i]))
        .count();
    let transcript = if params.keep_transcript {
        (0..params.n_pulses)
            .map(|i| PulseRecord {
                index: i,
                alice_basis: tx.bases[i],
                alice_bit: tx.bits[i],
                eve_action: eve[i],
                bob_basis: bob_bases[i],
                bob_bit: bob_bits[i],
            })
            .collect()
    } else {
        Vec::new()
    };
    let raw = RawKey {
        pulses: params.n_pulses,
        pre_sift_agreement: fraction(agree, params.n_pulses),
        sifted,
        eve_known,
        transcript,
    };
    post_process(raw, params, rng)
}

/// BB84 session seeded from `params.seed`.
pub fn run_bb84_session(params: &QkdParams) -> Result<SessionReport> {
    let mut rng: SimRng = seeded(params.seed);
    Ok(run_bb84(params, &mut rng)?.report)
}
