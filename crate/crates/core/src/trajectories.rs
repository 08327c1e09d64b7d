//! Monte-Carlo wave-function unraveling of the feedback master equation.
//!
//! Each detected collective jump applies the feedback unitary as part of the
//! jump operator, mirroring the modified dissipator of the deterministic
//! equation. Undetected collective jumps, spontaneous emission, and dephasing
//! jumps carry no control. The ensemble average over trajectories is an
//! independent stochastic cross-check of [`crate::dynamics::evolve`].

use nalgebra::Matrix4;
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;
use rayon::prelude::*;

use crate::dynamics::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg;
use crate::liouvillian::SystemConfig;
use crate::operators::{self, Operator, StateVector};
use crate::C64;

/// Maximum admissible total jump probability per step; beyond this the
/// first-order stepping is no longer trustworthy.
const MAX_JUMP_PROBABILITY: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelLabel {
    /// Collective decay seen by the detector; carries the feedback unitary.
    DetectedCollective,
    /// Collective decay missed by the detector.
    UndetectedCollective,
    /// Spontaneous emission of atom 1.
    Spont1,
    /// Spontaneous emission of atom 2.
    Spont2,
    /// Dephasing of atom 1.
    Deph1,
    /// Dephasing of atom 2.
    Deph2,
}

impl std::fmt::Display for ChannelLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            ChannelLabel::DetectedCollective => "detected_collective",
            ChannelLabel::UndetectedCollective => "undetected_collective",
            ChannelLabel::Spont1 => "spont1",
            ChannelLabel::Spont2 => "spont2",
            ChannelLabel::Deph1 => "deph1",
            ChannelLabel::Deph2 => "deph2",
        };
        f.write_str(name)
    }
}

/// One decay channel of the unraveling: the full jump operator (including
/// any feedback unitary) and its rate prefactor.
#[derive(Debug, Clone)]
pub struct JumpChannel {
    pub label: ChannelLabel,
    pub operator: Operator,
    pub rate_weight: f64,
}

/// Jump channels for a configuration; zero-weight channels are omitted.
///
/// Construction asserts that the weighted sum of `c^dag c` over channels
/// equals the decay part of the effective Hamiltonian built from the bare
/// operators: the feedback unitary must drop out of the no-jump dynamics.
pub fn channels(config: &SystemConfig) -> Result<Vec<JumpChannel>> {
    config.validate()?;
    let atoms = operators::atomic_ops();
    let coll = operators::collective_ops();
    let u = operators::feedback_unitary(&config.feedback)?;
    let gamma = config.gamma_collective;

    let mut out = Vec::new();
    let mut add = |label, operator: Operator, rate_weight: f64| {
        if rate_weight > 0.0 {
            out.push(JumpChannel { label, operator, rate_weight });
        }
    };
    add(
        ChannelLabel::DetectedCollective,
        u * coll.j_minus,
        gamma * config.eta,
    );
    add(
        ChannelLabel::UndetectedCollective,
        coll.j_minus,
        gamma * (1.0 - config.eta),
    );
    add(ChannelLabel::Spont1, atoms.sigma1, config.gamma1);
    add(ChannelLabel::Spont2, atoms.sigma2, config.gamma2);
    add(
        ChannelLabel::Deph1,
        atoms.sigma1_dag * atoms.sigma1,
        config.gamma_deph,
    );
    add(
        ChannelLabel::Deph2,
        atoms.sigma2_dag * atoms.sigma2,
        config.gamma_deph,
    );

    let from_channels: Matrix4<C64> = out
        .iter()
        .map(|ch| (ch.operator.adjoint() * ch.operator) * C64::new(ch.rate_weight, 0.0))
        .sum();
    let bare = decay_sum(config, &atoms, &coll);
    let defect = linalg::max_abs(&(from_channels - bare));
    if defect > 1e-10 {
        return Err(Error::InvalidConfig(format!(
            "channel decay sum deviates from the bare decay part by {defect:.3e}"
        )));
    }
    Ok(out)
}

/// `Gamma J+J- + gamma1 n1 + gamma2 n2 + gamma_deph (n1 + n2)`, built without
/// any feedback unitary.
fn decay_sum(
    config: &SystemConfig,
    atoms: &operators::AtomicOps,
    coll: &operators::CollectiveOps,
) -> Matrix4<C64> {
    let n1 = atoms.sigma1_dag * atoms.sigma1;
    let n2 = atoms.sigma2_dag * atoms.sigma2;
    coll.j_plus * coll.j_minus * C64::new(config.gamma_collective, 0.0)
        + n1 * C64::new(config.gamma1 + config.gamma_deph, 0.0)
        + n2 * C64::new(config.gamma2 + config.gamma_deph, 0.0)
}

/// Non-Hermitian effective Hamiltonian of the no-jump evolution,
/// `omega Jx - (i/2) sum_k w_k c_k^dag c_k`. Independent of the feedback
/// unitary and of the detector efficiency.
pub fn effective_hamiltonian(config: &SystemConfig) -> Result<Matrix4<C64>> {
    config.validate()?;
    let atoms = operators::atomic_ops();
    let coll = operators::collective_ops();
    let decay = decay_sum(config, &atoms, &coll);
    Ok(coll.j_x * C64::new(config.omega, 0.0) - decay * C64::new(0.0, 0.5))
}

/// A jump event: time at the end of the step in which it fired, and the
/// channel that fired.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub channel: ChannelLabel,
}

/// One stochastic pure-state trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub times: Vec<f64>,
    /// Unit-norm conditional states at the sample times.
    pub states: Vec<StateVector>,
    pub jumps: Vec<JumpEvent>,
}

/// First-order Monte-Carlo wave-function run with a deterministic generator
/// seeded by `seed`.
///
/// Per step of size `h`: channel jump probabilities are
/// `p_k = w_k ||c_k psi||^2 h`; with probability `sum p_k` one channel fires
/// (selected proportionally) and `psi <- c_k psi / ||.||`, otherwise `psi`
/// advances under `I - i h H_eff` and is renormalized. Any step whose total
/// jump probability exceeds 0.1 aborts with an error asking for a smaller
/// `dt`.
pub fn run_trajectory(
    config: &SystemConfig,
    psi0: &StateVector,
    t_final: f64,
    dt: f64,
    seed: u64,
    sample_times: &[f64],
) -> Result<TrajectoryRecord> {
    if (psi0.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!(
            "initial state norm {} is not 1",
            psi0.norm()
        )));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    let rate_scale = config.rate_scale();
    if rate_scale > 0.0 && dt > 0.01 / rate_scale {
        return Err(Error::DtTooCoarse {
            p_total: f64::NAN,
            suggested: 0.01 / rate_scale,
        });
    }
    validate_samples(t_final, sample_times)?;

    let chans = channels(config)?;
    let h_eff = effective_hamiltonian(config)?;
    let mut rng = Pcg64::seed_from_u64(seed);

    let mut psi = *psi0;
    let mut t = 0.0;
    let mut states = Vec::with_capacity(sample_times.len());
    let mut jumps = Vec::new();
    for &target in sample_times {
        let gap = target - t;
        if gap > 0.0 {
            let n = (gap / dt).ceil().max(1.0) as usize;
            let h = gap / n as f64;
            let no_jump = Operator::identity() - h_eff * C64::new(0.0, h);
            for step in 0..n {
                let t_end = t + (step + 1) as f64 * h;
                advance_step(&chans, &no_jump, h, &mut psi, &mut rng, t_end, &mut jumps)?;
            }
            t = target;
        }
        states.push(psi);
    }
    Ok(TrajectoryRecord {
        seed,
        times: sample_times.to_vec(),
        states,
        jumps,
    })
}

fn advance_step(
    chans: &[JumpChannel],
    no_jump: &Operator,
    h: f64,
    psi: &mut StateVector,
    rng: &mut Pcg64,
    t_end: f64,
    jumps: &mut Vec<JumpEvent>,
) -> Result<()> {
    let mut probs = [0.0f64; 6];
    let mut p_total = 0.0;
    for (k, ch) in chans.iter().enumerate() {
        let p = ch.rate_weight * (ch.operator * *psi).norm_squared() * h;
        probs[k] = p;
        p_total += p;
    }
    if p_total > MAX_JUMP_PROBABILITY {
        return Err(Error::DtTooCoarse {
            p_total,
            suggested: h * MAX_JUMP_PROBABILITY / p_total,
        });
    }
    let r: f64 = rng.random();
    if r < p_total {
        // proportional channel selection; the last channel absorbs roundoff
        let mut pick = rng.random::<f64>() * p_total;
        let mut chosen = chans.len() - 1;
        for (k, &p) in probs.iter().take(chans.len()).enumerate() {
            if pick < p {
                chosen = k;
                break;
            }
            pick -= p;
        }
        let jumped = chans[chosen].operator * *psi;
        let norm = jumped.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState(
                "jump fired on a state annihilated by the channel operator".to_string(),
            ));
        }
        *psi = jumped / C64::new(norm, 0.0);
        jumps.push(JumpEvent {
            time: t_end,
            channel: chans[chosen].label,
        });
    } else {
        let advanced = no_jump * *psi;
        *psi = advanced / C64::new(advanced.norm(), 0.0);
    }
    Ok(())
}

fn validate_samples(t_final: f64, sample_times: &[f64]) -> Result<()> {
    if sample_times.is_empty() {
        return Err(Error::InvalidConfig("sample_times must be non-empty".to_string()));
    }
    if !sample_times.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::InvalidConfig("sample_times must be sorted".to_string()));
    }
    let lo = sample_times[0];
    let hi = *sample_times.last().unwrap();
    if lo < 0.0 || hi > t_final * (1.0 + 1e-12) {
        return Err(Error::InvalidConfig(format!(
            "sample_times must lie in [0, {t_final}]"
        )));
    }
    Ok(())
}

/// Ensemble mean over `n` trajectories seeded `base_seed + i`.
#[derive(Debug, Clone)]
pub struct EnsembleAverage {
    pub times: Vec<f64>,
    /// `(1/n) sum_i |psi_i(t)><psi_i(t)|` per sample time.
    pub mean_states: Vec<DensityMatrix>,
    /// Largest component-wise standard error of the population vector across
    /// trajectories, per sample time.
    pub stderr: Vec<f64>,
}

/// Run `n` trajectories (in parallel) and average their projectors.
///
/// Trajectory `i` is seeded `base_seed + i` and the reduction runs in index
/// order, so the output is bit-reproducible regardless of the execution
/// schedule.
pub fn ensemble_average(
    config: &SystemConfig,
    psi0: &StateVector,
    t_final: f64,
    dt: f64,
    sample_times: &[f64],
    n: usize,
    base_seed: u64,
) -> Result<EnsembleAverage> {
    if n == 0 {
        return Err(Error::InvalidConfig("ensemble size must be at least 1".to_string()));
    }
    let records: Vec<TrajectoryRecord> = (0..n)
        .into_par_iter()
        .map(|i| {
            run_trajectory(
                config,
                psi0,
                t_final,
                dt,
                base_seed.wrapping_add(i as u64),
                sample_times,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let samples = sample_times.len();
    let inv_n = 1.0 / n as f64;
    let mut mean_states = Vec::with_capacity(samples);
    let mut stderr = Vec::with_capacity(samples);
    for j in 0..samples {
        let mut acc = Matrix4::<C64>::zeros();
        for record in &records {
            let psi = &record.states[j];
            acc += psi * psi.adjoint();
        }
        acc *= C64::new(inv_n, 0.0);
        mean_states.push(DensityMatrix::new(acc)?);

        let worst = if n > 1 {
            let mut max_se = 0.0f64;
            for component in 0..4 {
                let mean: f64 = records
                    .iter()
                    .map(|r| r.states[j][component].norm_sqr())
                    .sum::<f64>()
                    * inv_n;
                let var: f64 = records
                    .iter()
                    .map(|r| {
                        let d = r.states[j][component].norm_sqr() - mean;
                        d * d
                    })
                    .sum::<f64>()
                    / (n as f64 - 1.0);
                max_se = max_se.max((var * inv_n).sqrt());
            }
            max_se
        } else {
            0.0
        };
        stderr.push(worst);
    }
    Ok(EnsembleAverage {
        times: sample_times.to_vec(),
        mean_states,
        stderr,
    })
}
