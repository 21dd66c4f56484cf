//! Disorder models: preparation errors and coupling noise.
//!
//! Preparation noise on a product state is a classical mixture: with
//! probability `epsilon` per site, that site's spin is flipped. The mixture
//! is exact (no sampling), evolves component by component, and is measured
//! as one mixed state.
//!
//! Coupling noise draws independent chains `J_k = J (1 + delta_k)` with
//! Gaussian `delta_k` and averages over realizations. The physically
//! motivated default averages the entanglement measures; averaging the
//! density matrices first is also offered for comparison.

use crate::entanglement::{measure, EntanglementReport};
use crate::error::{Error, Result};
use crate::lattice::{gaussian_couplings, ChainSpec, InitialState, MixtureSpec, ProductStateSpec};
use crate::linalg::compensated_sum;
use crate::propagator::HoppingEigenbasis;
use crate::rdm::{rdm_of, TwoSpinDensityMatrix};

/// Single-site preparation-error model around a product state.
#[derive(Debug, Clone)]
pub struct FlipEnsemble {
    base: ProductStateSpec,
    epsilon: f64,
}

impl FlipEnsemble {
    /// `epsilon` is the per-site flip probability; the unflipped weight
    /// `1 - N epsilon` must stay non-negative.
    pub fn new(base: ProductStateSpec, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::invalid(format!(
                "flip probability {epsilon} must be finite and non-negative"
            )));
        }
        let budget = base.n_sites() as f64 * epsilon;
        if budget > 1.0 {
            return Err(Error::invalid(format!(
                "total flip weight N*epsilon = {budget} exceeds 1"
            )));
        }
        Ok(FlipEnsemble { base, epsilon })
    }

    pub fn base(&self) -> &ProductStateSpec {
        &self.base
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The exact first-order mixture: the intact state with weight
    /// `1 - N epsilon` plus each single-flip state with weight `epsilon`.
    /// Zero-weight components are dropped.
    pub fn mixture(&self) -> Result<MixtureSpec> {
        let n = self.base.n_sites();
        let intact = 1.0 - n as f64 * self.epsilon;
        let mut components = Vec::with_capacity(n + 1);
        if intact > 0.0 {
            components.push((intact, self.base.clone()));
        }
        if self.epsilon > 0.0 {
            for site in 1..=n {
                components.push((self.epsilon, self.base.flipped(site)?));
            }
        }
        MixtureSpec::new(components)
    }
}

/// Convenience wrapper: the flip mixture as an initial state.
pub fn flip_mixture(base: &ProductStateSpec, epsilon: f64) -> Result<MixtureSpec> {
    FlipEnsemble::new(base.clone(), epsilon)?.mixture()
}

/// What to average over coupling realizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AverageMode {
    /// Average the derived measures; each realization is a separate
    /// experiment read out on its own.
    #[default]
    Measures,
    /// Average the density matrices, then measure the mixed state.
    DensityMatrix,
}

/// Gaussian bond-noise ensemble.
#[derive(Debug, Clone, Copy)]
pub struct CouplingEnsemble {
    delta: f64,
    realizations: usize,
    seed: u64,
}

impl CouplingEnsemble {
    /// `delta` is the relative coupling standard deviation. Realization `r`
    /// draws its chain from `seed + r`.
    pub fn new(delta: f64, realizations: usize, seed: u64) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::invalid(format!(
                "coupling spread {delta} must be finite and non-negative"
            )));
        }
        if realizations == 0 {
            return Err(Error::invalid("need at least one realization"));
        }
        Ok(CouplingEnsemble { delta, realizations, seed })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn realizations(&self) -> usize {
        self.realizations
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Disorder-averaged entanglement curve with per-realization detail.
#[derive(Debug, Clone)]
pub struct DisorderCurve {
    times: Vec<f64>,
    mean: Vec<EntanglementReport>,
    per_realization: Vec<Vec<EntanglementReport>>,
}

impl DisorderCurve {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn mean(&self) -> &[EntanglementReport] {
        &self.mean
    }

    pub fn per_realization(&self) -> &[Vec<EntanglementReport>] {
        &self.per_realization
    }
}

/// Evolve and measure `init` over every coupling realization.
///
/// Realizations are deterministic functions of `ensemble.seed() + r`, so
/// results do not depend on evaluation order; averages use compensated
/// summation. A failure in any realization aborts the whole call, tagged
/// with the realization index.
pub fn ensemble_average(
    ensemble: &CouplingEnsemble,
    chain: &ChainSpec,
    init: &InitialState,
    times: &[f64],
    mode: AverageMode,
) -> Result<DisorderCurve> {
    if times.is_empty() {
        return Err(Error::invalid("need at least one time"));
    }
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::invalid(format!("time {t} is not finite")));
    }
    if init.n_sites() != chain.n_sites() {
        return Err(Error::invalid(format!(
            "initial state has {} sites but chain has {}",
            init.n_sites(),
            chain.n_sites()
        )));
    }

    let run_one = |r: usize| -> Result<(Vec<EntanglementReport>, Vec<TwoSpinDensityMatrix>)> {
        let profile = gaussian_couplings(chain, ensemble.delta, ensemble.seed.wrapping_add(r as u64))?;
        let basis = HoppingEigenbasis::new(&profile)?;
        let mut reports = Vec::with_capacity(times.len());
        let mut rhos = Vec::with_capacity(times.len());
        for &t in times {
            let rho = rdm_of(init, &basis.propagator(t)?)?;
            reports.push(measure(&rho)?);
            rhos.push(rho);
        }
        Ok((reports, rhos))
    };

    let mut per_realization = Vec::with_capacity(ensemble.realizations);
    let mut per_rho = Vec::with_capacity(ensemble.realizations);
    for r in 0..ensemble.realizations {
        let (reports, rhos) = run_one(r).map_err(|e| {
            Error::invalid(format!("realization {r} failed: {e}"))
        })?;
        per_realization.push(reports);
        per_rho.push(rhos);
    }

    let inv = 1.0 / ensemble.realizations as f64;
    let mean = match mode {
        AverageMode::Measures => times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let avg = |pick: &dyn Fn(&EntanglementReport) -> f64| {
                    compensated_sum(per_realization.iter().map(|run| pick(&run[i]))) * inv
                };
                EntanglementReport {
                    time: t,
                    concurrence: avg(&|r| r.concurrence),
                    fef: avg(&|r| r.fef),
                    fidelity: avg(&|r| r.fidelity),
                }
            })
            .collect::<Vec<_>>(),
        AverageMode::DensityMatrix => {
            let mut mean = Vec::with_capacity(times.len());
            for (i, &t) in times.iter().enumerate() {
                let mut entries = [[num_complex::Complex64::new(0.0, 0.0); 4]; 4];
                for (a, row) in entries.iter_mut().enumerate() {
                    for (b, slot) in row.iter_mut().enumerate() {
                        let re =
                            compensated_sum(per_rho.iter().map(|run| run[i].entry(a, b).re));
                        let im =
                            compensated_sum(per_rho.iter().map(|run| run[i].entry(a, b).im));
                        *slot = num_complex::Complex64::new(re * inv, im * inv);
                    }
                }
                mean.push(measure(&TwoSpinDensityMatrix::from_entries(entries, t))?);
            }
            mean
        }
    };

    Ok(DisorderCurve { times: times.to_vec(), mean, per_realization })
}
