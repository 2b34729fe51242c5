//! Bayesian mean estimation over Stokes-parameter vectors.
//!
//! The sampler is Metropolis-within-Gibbs: one sweep proposes a Gaussian move
//! for each coordinate in turn, with step scale beta * max(|theta_k|,
//! sigma_floor), accepts by the posterior ratio with the proposal-asymmetry
//! correction, and rejects outright any proposal whose implied state leaves
//! the PSD-within-tolerance set. The likelihood is the Gaussian surrogate
//! sum of -(nbar - n)^2 / nbar over all settings and outcomes, with the
//! divisor floored so zero-probability outcomes stay finite but strongly
//! penalized. The prior is Gaussian around a reference parameter vector with
//! per-component variance max(|theta_ref|, sigma_floor).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Result, TomoError};
use crate::exact::reconstruct_full;
use crate::linalg::{ComplexMatrix, C64};
use crate::measurement::{CountRecord, Dataset};
use crate::pauli::PauliWord;
use crate::qot::pair_stokes;
use crate::state::{
    density_from_stokes, project_to_physical, stokes_from_density, DensityMatrix, StokesTensor,
    PSD_TOL,
};

/// Expected-count floor inside the likelihood division.
pub const EPSILON_COUNT: f64 = 0.5;

/// Free Stokes components (every non-identity word), flat-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    n_qubits: usize,
    theta: Vec<f64>,
}

impl ParamVector {
    pub fn new(n_qubits: usize, theta: Vec<f64>) -> Result<Self> {
        let want = (1usize << (2 * n_qubits)) - 1;
        if theta.len() != want {
            return Err(TomoError::DimensionMismatch {
                expected: want,
                got: theta.len(),
            });
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(TomoError::InvalidStokes("non-finite component".into()));
        }
        Ok(Self { n_qubits, theta })
    }

    pub fn from_stokes(s: &StokesTensor) -> Self {
        Self {
            n_qubits: s.n_qubits(),
            theta: s.values()[1..].to_vec(),
        }
    }

    pub fn to_stokes(&self) -> StokesTensor {
        let mut values = Vec::with_capacity(self.theta.len() + 1);
        values.push(1.0);
        values.extend_from_slice(&self.theta);
        StokesTensor::new(self.n_qubits, values).expect("identity pinned")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn components(&self) -> &[f64] {
        &self.theta
    }

    pub fn density(&self) -> ComplexMatrix {
        density_from_stokes(&self.to_stokes())
    }
}

/// Gibbs sampler knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    /// Relative step size of the per-coordinate proposal.
    pub beta: f64,
    /// Number of sweeps; each sweep updates every coordinate once.
    pub iterations: usize,
    /// Fraction of sweeps discarded as burn-in, in [0, 1).
    pub burn_in: f64,
    pub seed: u64,
    /// Floor for both the proposal scale and the prior variance.
    pub sigma_floor: f64,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(TomoError::InvalidConfig("beta must be positive".into()));
        }
        if self.iterations == 0 {
            return Err(TomoError::InvalidConfig("iterations must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return Err(TomoError::InvalidConfig("burn_in must be in [0,1)".into()));
        }
        if !(self.sigma_floor > 0.0) {
            return Err(TomoError::InvalidConfig(
                "sigma_floor must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Defaults for a full n=4 estimation run. The step size trades
    /// acceptance (kept in the 20-50% band) against how fast the chain
    /// climbs away from a projection-damaged starting point.
    pub fn full_default(seed: u64) -> Self {
        Self {
            beta: 0.015,
            iterations: 5000,
            burn_in: 0.2,
            seed,
            sigma_floor: 0.1,
        }
    }

    /// Defaults for a per-pair estimation run; the 15-parameter problems
    /// tolerate a larger step.
    pub fn pair_default(seed: u64) -> Self {
        Self {
            beta: 0.05,
            iterations: 2000,
            ..Self::full_default(seed)
        }
    }
}

/// Ordered chain output.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSampleSet {
    pub samples: Vec<ParamVector>,
    pub burn_in_index: usize,
    pub acceptance_rate: f64,
}

impl PosteriorSampleSet {
    pub fn post_burn_in(&self) -> &[ParamVector] {
        &self.samples[self.burn_in_index..]
    }
}

fn check_records(records: &[CountRecord], n_qubits: usize) -> Result<()> {
    if records.is_empty() {
        return Err(TomoError::InvalidConfig("no count records".into()));
    }
    for r in records {
        if r.setting.n_qubits() != n_qubits {
            return Err(TomoError::DimensionMismatch {
                expected: n_qubits,
                got: r.setting.n_qubits(),
            });
        }
    }
    Ok(())
}

/// Outcome distribution implied by theta under one setting, computed through
/// the linear Pauli expansion: p_i = 2^-n (1 + sum over compatible words of
/// sign(word, i) * theta_word).
fn implied_probabilities(theta: &ParamVector, record: &CountRecord) -> Vec<f64> {
    let n = theta.n_qubits();
    let dim = 1usize << n;
    let mut p = vec![1.0f64; dim];
    for mask in 1..dim {
        // word with the setting's axis at each masked position
        let mut flat = 0usize;
        for j in 0..n {
            let digit = if (mask >> (n - 1 - j)) & 1 == 1 {
                record.setting.basis(j).pauli_index() as usize
            } else {
                0
            };
            flat = flat * 4 + digit;
        }
        let coeff = theta.components()[flat - 1];
        if coeff == 0.0 {
            continue;
        }
        for (i, pi) in p.iter_mut().enumerate() {
            if (i & mask).count_ones() % 2 == 0 {
                *pi += coeff;
            } else {
                *pi -= coeff;
            }
        }
    }
    let scale = 1.0 / dim as f64;
    for pi in &mut p {
        *pi *= scale;
    }
    p
}

fn record_log_likelihood(probs: &[f64], counts: &[f64], total: f64) -> f64 {
    let mut acc = 0.0;
    for (pi, &ni) in probs.iter().zip(counts) {
        let nbar = total * pi;
        let d = nbar - ni;
        acc -= d * d / nbar.max(EPSILON_COUNT);
    }
    acc
}

/// Gaussian-surrogate log likelihood over every record and outcome.
pub fn log_likelihood(theta: &ParamVector, records: &[CountRecord]) -> Result<f64> {
    check_records(records, theta.n_qubits())?;
    let mut acc = 0.0;
    for record in records {
        let probs = implied_probabilities(theta, record);
        let total = record.total() as f64;
        let counts: Vec<f64> = record.counts.iter().map(|&c| c as f64).collect();
        acc += record_log_likelihood(&probs, &counts, total);
    }
    Ok(acc)
}

/// Gaussian log prior around a reference vector; per-component variance is
/// max(|theta_ref|, sigma_floor).
pub fn log_prior(theta: &ParamVector, theta_ref: &ParamVector, sigma_floor: f64) -> Result<f64> {
    if theta.len() != theta_ref.len() {
        return Err(TomoError::DimensionMismatch {
            expected: theta_ref.len(),
            got: theta.len(),
        });
    }
    let mut acc = 0.0;
    for (t, r) in theta.components().iter().zip(theta_ref.components()) {
        let var = r.abs().max(sigma_floor);
        let d = t - r;
        acc -= d * d / (2.0 * var);
    }
    Ok(acc)
}

struct Chain {
    dim: usize,
    theta: Vec<f64>,
    rho: DMatrix<C64>,
    /// per parameter: sparse entries of sigma_word / 2^n
    updates: Vec<Vec<(usize, usize, C64)>>,
    masks: Vec<usize>,
    affected: Vec<Vec<usize>>,
    probs: Vec<Vec<f64>>,
    loglik: Vec<f64>,
    counts: Vec<Vec<f64>>,
    totals: Vec<f64>,
}

impl Chain {
    fn init(theta: &ParamVector, records: &[CountRecord]) -> Self {
        let n = theta.n_qubits();
        let dim = 1usize << n;
        let d_params = theta.len();

        let mut updates = Vec::with_capacity(d_params);
        let mut masks = Vec::with_capacity(d_params);
        let scale = C64::new(1.0 / dim as f64, 0.0);
        for k in 0..d_params {
            let word = PauliWord::from_flat_index(n, k + 1);
            masks.push(word.outcome_mask());
            updates.push(
                word.entries()
                    .into_iter()
                    .map(|(r, c, v)| (r, c, v * scale))
                    .collect(),
            );
        }

        let mut affected = vec![Vec::new(); d_params];
        for (ri, record) in records.iter().enumerate() {
            for k in 0..d_params {
                let word = PauliWord::from_flat_index(n, k + 1);
                let ok = word
                    .0
                    .iter()
                    .enumerate()
                    .all(|(j, &i)| i == 0 || record.setting.basis(j).pauli_index() == i);
                if ok {
                    affected[k].push(ri);
                }
            }
        }

        let rho = density_from_stokes(&theta.to_stokes()).into_dmatrix();
        let mut probs = Vec::with_capacity(records.len());
        let mut loglik = Vec::with_capacity(records.len());
        let mut counts = Vec::with_capacity(records.len());
        let mut totals = Vec::with_capacity(records.len());
        for record in records {
            let p = implied_probabilities(theta, record);
            let c: Vec<f64> = record.counts.iter().map(|&x| x as f64).collect();
            let t = record.total() as f64;
            loglik.push(record_log_likelihood(&p, &c, t));
            probs.push(p);
            counts.push(c);
            totals.push(t);
        }

        Chain {
            dim,
            theta: theta.components().to_vec(),
            rho,
            updates,
            masks,
            affected,
            probs,
            loglik,
            counts,
            totals,
        }
    }

    /// Would moving coordinate k by delta keep the state PSD within
    /// tolerance?
    fn proposal_is_physical(&self, k: usize, delta: f64, scratch: &mut DMatrix<C64>) -> bool {
        scratch.copy_from(&self.rho);
        let d = C64::new(delta, 0.0);
        for &(r, c, v) in &self.updates[k] {
            scratch[(r, c)] += v * d;
        }
        for i in 0..self.dim {
            scratch[(i, i)] += C64::new(PSD_TOL, 0.0);
        }
        crate::linalg::positive_definite_in_place(scratch)
    }

    /// Log-likelihood change if coordinate k moves by delta; new per-record
    /// values are written to `new_ll`.
    fn likelihood_delta(&self, k: usize, delta: f64, new_ll: &mut Vec<f64>) -> f64 {
        new_ll.clear();
        let mask = self.masks[k];
        let step = delta / self.dim as f64;
        let mut acc = 0.0;
        for &ri in &self.affected[k] {
            let probs = &self.probs[ri];
            let counts = &self.counts[ri];
            let total = self.totals[ri];
            let mut ll = 0.0;
            for i in 0..self.dim {
                let p = if (i & mask).count_ones() % 2 == 0 {
                    probs[i] + step
                } else {
                    probs[i] - step
                };
                let nbar = total * p;
                let d = nbar - counts[i];
                ll -= d * d / nbar.max(EPSILON_COUNT);
            }
            acc += ll - self.loglik[ri];
            new_ll.push(ll);
        }
        acc
    }

    fn commit(&mut self, k: usize, delta: f64, new_ll: &[f64]) {
        self.theta[k] += delta;
        let d = C64::new(delta, 0.0);
        for &(r, c, v) in &self.updates[k] {
            self.rho[(r, c)] += v * d;
        }
        let mask = self.masks[k];
        let step = delta / self.dim as f64;
        for (slot, &ri) in self.affected[k].iter().enumerate() {
            let probs = &mut self.probs[ri];
            for (i, pi) in probs.iter_mut().enumerate() {
                if (i & mask).count_ones() % 2 == 0 {
                    *pi += step;
                } else {
                    *pi -= step;
                }
            }
            self.loglik[ri] = new_ll[slot];
        }
    }

    #[cfg(test)]
    fn total_log_likelihood(&self) -> f64 {
        self.loglik.iter().sum()
    }
}

/// Run the Metropolis-within-Gibbs chain. One recorded sample per sweep;
/// deterministic for a fixed config.
pub fn gibbs_sample(
    records: &[CountRecord],
    theta_ref: &ParamVector,
    theta_start: &ParamVector,
    cfg: &SamplerConfig,
) -> Result<PosteriorSampleSet> {
    cfg.validate()?;
    let n = theta_start.n_qubits();
    check_records(records, n)?;
    if theta_ref.len() != theta_start.len() {
        return Err(TomoError::DimensionMismatch {
            expected: theta_start.len(),
            got: theta_ref.len(),
        });
    }
    let start_rho = density_from_stokes(&theta_start.to_stokes());
    let min_eig = start_rho.min_eigenvalue();
    if min_eig < -PSD_TOL {
        return Err(TomoError::NonPhysicalStart { min_eig });
    }

    let mut chain = Chain::init(theta_start, records);
    let d_params = theta_start.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut scratch = chain.rho.clone();
    let mut new_ll: Vec<f64> = Vec::new();
    let mut samples = Vec::with_capacity(cfg.iterations);
    let mut accepted = 0usize;

    let prior_term = |value: f64, reference: f64| -> f64 {
        let var = reference.abs().max(cfg.sigma_floor);
        let d = value - reference;
        -d * d / (2.0 * var)
    };

    for _sweep in 0..cfg.iterations {
        for k in 0..d_params {
            let current = chain.theta[k];
            let sigma = cfg.beta * current.abs().max(cfg.sigma_floor);
            let proposal = Normal::new(current, sigma)
                .expect("sigma > 0")
                .sample(&mut rng);
            let u: f64 = rng.gen();
            let delta = proposal - current;

            if !chain.proposal_is_physical(k, delta, &mut scratch) {
                continue; // likelihood -inf, never accepted
            }

            let ll_delta = chain.likelihood_delta(k, delta, &mut new_ll);
            let reference = theta_ref.components()[k];
            let prior_delta = prior_term(proposal, reference) - prior_term(current, reference);

            // proposal asymmetry: the reverse move draws from a Normal
            // scaled by the proposed value
            let sigma_rev = cfg.beta * proposal.abs().max(cfg.sigma_floor);
            let log_fwd = -sigma.ln() - delta * delta / (2.0 * sigma * sigma);
            let log_rev = -sigma_rev.ln() - delta * delta / (2.0 * sigma_rev * sigma_rev);
            let log_a = (ll_delta + prior_delta - (log_fwd - log_rev)).min(0.0);

            if u.ln() < log_a {
                chain.commit(k, delta, &new_ll);
                accepted += 1;
            }
        }
        samples.push(ParamVector {
            n_qubits: n,
            theta: chain.theta.clone(),
        });
    }

    let burn_in_index = ((cfg.iterations as f64) * cfg.burn_in).floor() as usize;
    Ok(PosteriorSampleSet {
        samples,
        burn_in_index,
        acceptance_rate: accepted as f64 / (cfg.iterations * d_params) as f64,
    })
}

/// Density matrix of one retained sample. Samples are PSD within tolerance
/// by the acceptance filter; the projection fallback only absorbs the last
/// float ulps at the tolerance boundary.
pub fn sample_density(theta: &ParamVector) -> DensityMatrix {
    let raw = theta.density();
    match DensityMatrix::new(theta.n_qubits(), raw.clone()) {
        Ok(d) => d,
        Err(_) => project_to_physical(&raw).expect("Hermitian by construction"),
    }
}

/// Posterior-mean state: average the retained samples and project.
pub fn posterior_mean(samples: &PosteriorSampleSet) -> Result<DensityMatrix> {
    let retained = samples.post_burn_in();
    if retained.is_empty() {
        return Err(TomoError::TooFewSamples { got: 0, need: 1 });
    }
    let n = retained[0].n_qubits();
    let d = retained[0].len();
    // averaging the parameters equals averaging the densities: the Pauli
    // expansion is linear
    let mut mean = vec![0.0f64; d];
    for s in retained {
        for (m, v) in mean.iter_mut().zip(s.components()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= retained.len() as f64;
    }
    let mean_theta = ParamVector::new(n, mean)?;
    project_to_physical(&mean_theta.density())
}

/// Central empirical credible interval of a scalar functional over the
/// retained samples, by nearest-rank order statistics.
pub fn credible_interval<F>(
    samples: &PosteriorSampleSet,
    functional: F,
    level: f64,
) -> Result<(f64, f64)>
where
    F: Fn(&DensityMatrix) -> f64,
{
    let values = sample_functional(samples, functional)?;
    interval_from_values(&values, level)
}

/// Functional evaluated on every retained sample, in chain order.
pub fn sample_functional<F>(samples: &PosteriorSampleSet, functional: F) -> Result<Vec<f64>>
where
    F: Fn(&DensityMatrix) -> f64,
{
    let retained = samples.post_burn_in();
    if retained.len() < 10 {
        return Err(TomoError::TooFewSamples {
            got: retained.len(),
            need: 10,
        });
    }
    Ok(retained
        .iter()
        .map(|t| functional(&sample_density(t)))
        .collect())
}

/// Nearest-rank central interval over raw values.
pub fn interval_from_values(values: &[f64], level: f64) -> Result<(f64, f64)> {
    if !(0.0 < level && level < 1.0) {
        return Err(TomoError::InvalidConfig(format!(
            "level {level} outside (0,1)"
        )));
    }
    if values.len() < 10 {
        return Err(TomoError::TooFewSamples {
            got: values.len(),
            need: 10,
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let rank = |q: f64| -> usize {
        // nearest-rank with a guard against float fuzz in q*m
        let r = (q * m as f64 - 1e-9).ceil() as usize;
        r.clamp(1, m)
    };
    let lo = sorted[rank((1.0 - level) / 2.0) - 1];
    let hi = sorted[rank((1.0 + level) / 2.0) - 1];
    Ok((lo, hi))
}

/// Sample median, the interval-safe point estimate.
pub fn median_of(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    }
}

/// Full-state estimation output.
#[derive(Debug, Clone)]
pub struct FullEstimate {
    pub stokes_raw: StokesTensor,
    pub mean: DensityMatrix,
    pub samples: PosteriorSampleSet,
}

/// Fraction of maximally-mixed state blended into chain starting points.
/// The projected linear inversion sits on the PSD boundary (clipped
/// eigenvalues are exactly zero), where a coordinate walker cannot move;
/// the blend lifts the minimum eigenvalue to eps/2^n.
const START_MIX: f64 = 0.01;

fn interior_start(projected: &DensityMatrix) -> ParamVector {
    let s = stokes_from_density(projected);
    let theta: Vec<f64> = s.values()[1..]
        .iter()
        .map(|v| v * (1.0 - START_MIX))
        .collect();
    ParamVector {
        n_qubits: s.n_qubits(),
        theta,
    }
}

/// Linear inversion, then a chain started just inside the physical set from
/// the projected inversion. The prior centers on `theta_ref` when given,
/// else on the raw inversion itself.
pub fn estimate_full(
    dataset: &Dataset,
    theta_ref: Option<&ParamVector>,
    cfg: &SamplerConfig,
) -> Result<FullEstimate> {
    let rec = reconstruct_full(dataset)?;
    let start = interior_start(&rec.physical);
    let raw_ref = ParamVector::from_stokes(&rec.stokes);
    let reference = theta_ref.unwrap_or(&raw_ref);
    let records: Vec<CountRecord> = dataset.records().cloned().collect();
    let samples = gibbs_sample(&records, reference, &start, cfg)?;
    let mean = posterior_mean(&samples)?;
    Ok(FullEstimate {
        stokes_raw: rec.stokes,
        mean,
        samples,
    })
}

/// Per-pair estimation output.
#[derive(Debug, Clone)]
pub struct PairEstimate {
    pub stokes_raw: StokesTensor,
    pub mean: DensityMatrix,
    pub samples: PosteriorSampleSet,
}

/// Per-pair chains on 15-component vectors over the pair's marginalized
/// records. Reference and start both come from the pairwise extraction (the
/// start is projected to the physical set first).
pub fn estimate_pairs(
    dataset: &Dataset,
    cfg: &SamplerConfig,
) -> Result<BTreeMap<(usize, usize), PairEstimate>> {
    let n = dataset.n_qubits();
    let mut out = BTreeMap::new();
    for x1 in 0..n {
        for x2 in (x1 + 1)..n {
            let stokes = pair_stokes(dataset, x1, x2)?;
            let raw = density_from_stokes(&stokes);
            let start = interior_start(&project_to_physical(&raw)?);
            let reference = ParamVector::from_stokes(&stokes);
            let records = dataset.marginal_records(x1, x2)?;
            // one independent stream per pair so chains stay uncorrelated
            let pair_cfg = SamplerConfig {
                seed: cfg
                    .seed
                    .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                    .wrapping_add((x1 * n + x2) as u64),
                ..*cfg
            };
            let samples = gibbs_sample(&records, &reference, &start, &pair_cfg)?;
            let mean = posterior_mean(&samples)?;
            out.insert(
                (x1, x2),
                PairEstimate {
                    stokes_raw: stokes,
                    mean,
                    samples,
                },
            );
        }
    }
    Ok(out)
}
