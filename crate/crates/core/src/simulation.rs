//! Seeded Monte Carlo runs of the quantum and classical cascades.
//!
//! Trial `t` draws from a ChaCha8 stream `t` of the run seed, so results do
//! not depend on how trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aerts::{classical_cascade, exact_classical_distribution};
use crate::cascade::{exact_cascade_distribution, run_cascade, OutcomeDistribution};
use crate::embedding::{coherent_embedding, embed_state, SymmetricTensorState};
use crate::spin::{BlochPoint, MagneticQuantumNumber, Spin, SpinState};
use crate::{Error, Result};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Quantum,
    Classical,
}

/// Spin-S input of a simulation.
#[derive(Clone, Debug, PartialEq)]
pub enum Preparation {
    Coherent(MagneticQuantumNumber),
    State(SpinState),
}

impl Preparation {
    pub fn spin(&self) -> Spin {
        match self {
            Preparation::Coherent(m) => m.spin(),
            Preparation::State(s) => s.spin(),
        }
    }

    pub fn embed(&self) -> Result<SymmetricTensorState> {
        match self {
            Preparation::Coherent(m) => coherent_embedding(*m),
            Preparation::State(s) => embed_state(s),
        }
    }
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Raw counts of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tally {
    /// Counts indexed ascending by `M'`.
    pub counts: Vec<u64>,
    pub lambda_draws: u64,
}

pub fn simulate(
    initial: &SymmetricTensorState,
    direction: &BlochPoint,
    mode: Mode,
    trials: u64,
    seed: u64,
) -> Result<Tally> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let dim = initial.spin().dim();
    let one = |t: u64| -> Result<(usize, u64)> {
        let mut rng = trial_rng(seed, t);
        match mode {
            Mode::Quantum => Ok((run_cascade(initial, direction, &mut rng)?.n_plus, 0)),
            Mode::Classical => {
                let run = classical_cascade(initial, direction, &mut rng)?;
                Ok((run.result.n_plus, run.lambda_draws as u64))
            }
        }
    };
    (0..trials)
        .into_par_iter()
        .map(one)
        .try_fold(
            || Tally { counts: vec![0; dim], lambda_draws: 0 },
            |mut acc, r| {
                let (bin, draws) = r?;
                acc.counts[bin] += 1;
                acc.lambda_draws += draws;
                Ok(acc)
            },
        )
        .try_reduce(
            || Tally { counts: vec![0; dim], lambda_draws: 0 },
            |mut a, b| {
                a.counts.iter_mut().zip(&b.counts).for_each(|(x, y)| *x += y);
                a.lambda_draws += b.lambda_draws;
                Ok(a)
            },
        )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    #[serde(rename = "M_prime")]
    pub m_prime: f64,
    pub count: u64,
    pub frequency: f64,
    pub exact: f64,
    /// `3 sqrt(p (1 - p) / trials)`.
    pub band: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema: u32,
    pub mode: Mode,
    #[serde(rename = "S")]
    pub spin: String,
    pub twice_s: u32,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<[f64; 2]>>,
    pub alpha: f64,
    pub beta: f64,
    pub trials: u64,
    pub seed: u64,
    pub histogram: Vec<HistogramBin>,
    pub exact_distribution: Vec<f64>,
    pub max_deviation: f64,
    pub within_3_sigma: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_draws: Option<u64>,
}

impl SimulationReport {
    pub const CSV_HEADER: &'static str = "M_prime,count,frequency,exact,band";

    pub fn histogram_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for b in &self.histogram {
            out.push_str(&format!("{:?},{},{:?},{:?},{:?}\n", b.m_prime, b.count, b.frequency, b.exact, b.band));
        }
        out
    }
}

/// Runs a simulation and compares it with the exact law of the same mode.
pub fn run_simulation(
    preparation: &Preparation,
    direction: &BlochPoint,
    mode: Mode,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let initial = preparation.embed()?;
    let exact = match mode {
        Mode::Quantum => exact_cascade_distribution(&initial, direction)?,
        Mode::Classical => exact_classical_distribution(&initial, direction)?,
    };
    let tally = simulate(&initial, direction, mode, trials, seed)?;
    let spin = preparation.spin();
    let (histogram, max_deviation, within) = compare(&exact, &tally.counts, trials);
    Ok(SimulationReport {
        schema: REPORT_SCHEMA,
        mode,
        spin: spin.to_string(),
        twice_s: spin.twice(),
        m: match preparation {
            Preparation::Coherent(m) => Some(m.value()),
            Preparation::State(_) => None,
        },
        state: match preparation {
            Preparation::Coherent(_) => None,
            Preparation::State(s) => Some(s.amplitudes().iter().map(|c| [c.re, c.im]).collect()),
        },
        alpha: direction.alpha(),
        beta: direction.beta(),
        trials,
        seed,
        histogram,
        exact_distribution: exact.probabilities().to_vec(),
        max_deviation,
        within_3_sigma: within,
        lambda_draws: (mode == Mode::Classical).then_some(tally.lambda_draws),
    })
}

/// Per-bin `3 sigma` binomial bands around the exact probabilities.
pub fn compare(exact: &OutcomeDistribution, counts: &[u64], trials: u64) -> (Vec<HistogramBin>, f64, bool) {
    let n = trials as f64;
    let mut max_dev: f64 = 0.0;
    let mut within = true;
    let bins = exact
        .spin()
        .magnetic_numbers()
        .zip(counts)
        .map(|(m, &count)| {
            let p = exact.get(m).clamp(0.0, 1.0);
            let frequency = count as f64 / n;
            let band = 3.0 * (p * (1.0 - p) / n).sqrt();
            let dev = (frequency - p).abs();
            max_dev = max_dev.max(dev);
            // a zero-width band still admits rounding-level mass
            within &= dev <= band.max(1e-12);
            HistogramBin { m_prime: m.value(), count, frequency, exact: p, band }
        })
        .collect();
    (bins, max_dev, within)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    fn m(t: u32, tm: i32) -> MagneticQuantumNumber {
        Spin::from_twice(t).unwrap().m(tm).unwrap()
    }

    #[test]
    fn streams_are_independent_of_schedule() {
        let a: Vec<u64> = (0..4).map(|t| trial_rng(7, t).next_u64()).collect();
        let b: Vec<u64> = (0..4).rev().map(|t| trial_rng(7, t).next_u64()).rev().collect();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn same_seed_same_tally() {
        let st = coherent_embedding(m(2, 0)).unwrap();
        let dir = BlochPoint::new(0.0, 1.0).unwrap();
        for mode in [Mode::Quantum, Mode::Classical] {
            let a = simulate(&st, &dir, mode, 2000, 42).unwrap();
            let b = simulate(&st, &dir, mode, 2000, 42).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.counts.iter().sum::<u64>(), 2000);
        }
        assert_ne!(
            simulate(&st, &dir, Mode::Quantum, 2000, 1).unwrap(),
            simulate(&st, &dir, Mode::Quantum, 2000, 2).unwrap()
        );
    }

    #[test]
    fn zero_trials_rejected() {
        let st = coherent_embedding(m(1, 1)).unwrap();
        assert!(simulate(&st, &BlochPoint::NORTH, Mode::Quantum, 0, 0).is_err());
    }

    #[test]
    fn report_fields() {
        let r = run_simulation(
            &Preparation::Coherent(m(2, 0)),
            &BlochPoint::new(0.0, 1.0).unwrap(),
            Mode::Classical,
            5000,
            3,
        )
        .unwrap();
        assert_eq!((r.schema, r.twice_s, r.spin.as_str()), (1, 2, "1"));
        assert_eq!(r.lambda_draws, Some(10_000));
        assert_eq!(r.histogram.len(), 3);
        assert!(r.histogram_csv().starts_with("M_prime,count,frequency,exact,band\n-1.0,"));
        assert!((r.exact_distribution.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_at_beta_zero() {
        let r = run_simulation(&Preparation::Coherent(m(3, 1)), &BlochPoint::NORTH, Mode::Quantum, 500, 0).unwrap();
        assert!(r.within_3_sigma);
        assert_eq!(r.histogram[2].count, 500);
    }
}
