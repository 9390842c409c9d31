use rand::Rng;

use super::session::{post_process, RawKey};
use super::{channel_transmit, EveAction, PolBasis, Polarization, PulseRecord, QkdParams, ReceiveMode, Session, Sifted};
use crate::error::{Error, Result};

/// B92 encoding: bit 0 as `H` (`|0⟩`), bit 1 as `D45` (`|+⟩`).
pub fn b92_transmit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<(Vec<bool>, Vec<Polarization>)> {
    if n == 0 {
        return Err(Error::domain("at least one pulse is required"));
    }
    let bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let pulses = bits
        .iter()
        .map(|&b| if b { Polarization::D45 } else { Polarization::H })
        .collect();
    Ok((bits, pulses))
}

/// Random-basis measurement; a result is conclusive when the other encoding
/// state could not have produced it (`V` rules out `H`, `D135` rules out
/// `D45`). Returns bases, raw outcomes and the conclusive bit if any.
pub fn b92_receive<R: Rng + ?Sized>(
    pulses: &[Polarization],
    mode: ReceiveMode,
    rng: &mut R,
) -> (Vec<PolBasis>, Vec<bool>, Vec<Option<bool>>) {
    let mut bases = Vec::with_capacity(pulses.len());
    let mut raw = Vec::with_capacity(pulses.len());
    let mut conclusive = Vec::with_capacity(pulses.len());
    for &p in pulses {
        let basis = PolBasis::random(rng);
        let bit = match mode {
            ReceiveMode::Symbolic => p.measure(basis, rng),
            ReceiveMode::StateVector => p.measure_state(basis, rng),
        };
        let seen = Polarization::encode(basis, bit);
        conclusive.push(match seen {
            Polarization::V => Some(true),
            Polarization::D135 => Some(false),
            _ => None,
        });
        bases.push(basis);
        raw.push(bit);
    }
    (bases, raw, conclusive)
}

/// B92 session through the shared post-processing pipeline. The sifted key
/// consists of the conclusive positions.
pub fn b92_session<R: Rng + ?Sized>(params: &QkdParams, rng: &mut R) -> Result<Session> {
    params.validate()?;
    let (bits, pulses) = b92_transmit(params.n_pulses, rng)?;
    let (arrived, eve) = channel_transmit(&pulses, params.eve_lambda, params.channel_flip, rng)?;
    let (bases, raw, conclusive) = b92_receive(&arrived, params.receive_mode, rng);
    let agree = bits.iter().zip(&raw).filter(|(a, b)| a == b).count();
    let kept: Vec<usize> = (0..bits.len()).filter(|&i| conclusive[i].is_some()).collect();
    let sifted = Sifted {
        alice: kept.iter().map(|&i| bits[i]).collect(),
        bob: kept.iter().map(|&i| conclusive[i].unwrap_or_default()).collect(),
        kept,
    };
    let eve_known = sifted
        .kept
        .iter()
        .filter(|&&i| matches!(eve[i], EveAction::Intercept { basis, .. } if basis == pulses[i].basis()))
        .count();
    let transcript = if params.keep_transcript {
        (0..bits.len())
            .map(|i| PulseRecord {
                index: i,
                alice_basis: pulses[i].basis(),
                alice_bit: bits[i],
                eve_action: eve[i],
                bob_basis: bases[i],
                bob_bit: raw[i],
            })
            .collect()
    } else {
        Vec::new()
    };
    post_process(
        RawKey {
            pulses: params.n_pulses,
            pre_sift_agreement: agree as f64 / params.n_pulses as f64,
            sifted,
            eve_known,
            transcript,
        },
        params,
        rng,
    )
}
