//! Post-reconstruction analysis: FST-vs-QOT comparison reports and the
//! two-parameter phase scan against the prime reference family.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bayes::{interval_from_values, median_of, sample_density, FullEstimate, PairEstimate};
use crate::error::{Result, TomoError};
use crate::linalg::C64;
use crate::state::{
    fidelity, fidelity_to_pure, partial_trace, von_neumann_entropy, DensityMatrix, PureState,
};

/// (|D'V D''V> + |A'H A''H>)/sqrt(2) with D'/A' = (|H> ± e^{i theta1}|V>)/sqrt(2)
/// on qubit 0 and D''/A'' likewise on qubit 2; phases in degrees.
pub fn reference_prime(theta1_deg: f64, theta2_deg: f64) -> PureState {
    let e1 = Complex64::from_polar(1.0, theta1_deg.to_radians());
    let e2 = Complex64::from_polar(1.0, theta2_deg.to_radians());
    let amp0 = C64::new(1.0 / (2.0 * std::f64::consts::SQRT_2), 0.0);
    let mut amp = vec![C64::new(0.0, 0.0); 16];
    for b0 in 0..2usize {
        for b2 in 0..2usize {
            let phase = if b0 == 1 { e1 } else { C64::new(1.0, 0.0) }
                * if b2 == 1 { e2 } else { C64::new(1.0, 0.0) };
            // D'VD''V branch: qubits 1 and 3 vertical
            amp[(b0 << 3) | (1 << 2) | (b2 << 1) | 1] = amp0 * phase;
            // A'HA''H branch: sign flips with each |V> component of A
            let sign = if (b0 + b2) % 2 == 0 { 1.0 } else { -1.0 };
            amp[(b0 << 3) | (b2 << 1)] = amp0 * phase * C64::new(sign, 0.0);
        }
    }
    PureState::new(4, amp).expect("unit norm by construction")
}

/// Fidelity surface over a (theta1, theta2) grid in degrees.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseScan {
    pub theta1_grid: Vec<f64>,
    pub theta2_grid: Vec<f64>,
    /// Row-major, theta1 outer.
    pub surface: Vec<f64>,
    pub peak: (f64, f64),
    pub peak_fidelity: f64,
}

impl PhaseScan {
    pub fn fidelity_at(&self, i1: usize, i2: usize) -> f64 {
        self.surface[i1 * self.theta2_grid.len() + i2]
    }
}

/// Scan the fidelity between an estimate and the prime reference family.
/// A 4-qubit estimate compares against the pure reference; a 2-qubit
/// estimate compares against the reference reduced to `reducer`. Ties at the
/// peak resolve to the smallest theta1, then theta2.
pub fn phase_scan(
    estimate: &DensityMatrix,
    reducer: Option<(usize, usize)>,
    grid_step_deg: f64,
) -> Result<PhaseScan> {
    if !(grid_step_deg > 0.0) {
        return Err(TomoError::InvalidConfig(format!(
            "grid step {grid_step_deg} must be positive"
        )));
    }
    match (estimate.n_qubits(), reducer) {
        (4, None) => {}
        (2, Some((x1, x2))) if x1 < 4 && x2 < 4 && x1 != x2 => {}
        (4, Some(_)) => {
            return Err(TomoError::InvalidConfig(
                "reducer given for a 4-qubit estimate".into(),
            ))
        }
        (2, _) => {
            return Err(TomoError::InvalidConfig(
                "2-qubit estimate needs a valid reducer pair".into(),
            ))
        }
        (n, _) => {
            return Err(TomoError::DimensionMismatch {
                expected: 4,
                got: n,
            })
        }
    }

    let steps = |lo: f64, hi: f64| -> Vec<f64> {
        let count = ((hi - lo) / grid_step_deg).ceil() as usize;
        (0..count).map(|i| lo + i as f64 * grid_step_deg).collect()
    };
    let theta1_grid = steps(0.0, 360.0);
    let theta2_grid = steps(-180.0, 180.0);

    let mut surface = Vec::with_capacity(theta1_grid.len() * theta2_grid.len());
    let mut peak = (theta1_grid[0], theta2_grid[0]);
    let mut peak_fidelity = f64::NEG_INFINITY;
    for &t1 in &theta1_grid {
        for &t2 in &theta2_grid {
            let reference = reference_prime(t1, t2);
            let f = match reducer {
                None => fidelity_to_pure(&reference, estimate)?,
                Some((x1, x2)) => {
                    let reduced = partial_trace(&reference.density(), &[x1, x2])?;
                    fidelity(estimate, &reduced)?
                }
            };
            if f > peak_fidelity {
                peak_fidelity = f;
                peak = (t1, t2);
            }
            surface.push(f);
        }
    }
    Ok(PhaseScan {
        theta1_grid,
        theta2_grid,
        surface,
        peak,
        peak_fidelity,
    })
}

/// Point estimate with a central credible interval. The point is the sample
/// median, which the interval always contains.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScalarEstimate {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
}

impl ScalarEstimate {
    fn from_samples(values: &[f64], level: f64) -> Result<Self> {
        let (lo, hi) = interval_from_values(values, level)?;
        Ok(Self {
            point: median_of(values),
            lo,
            hi,
        })
    }
}

/// Per-pair comparison row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairReport {
    pub pair: (usize, usize),
    /// FST-reduced fidelity against the reduced reference.
    pub fst_fidelity: Option<ScalarEstimate>,
    /// QOT fidelity against the reduced reference.
    pub qot_fidelity: Option<ScalarEstimate>,
    /// QOT samples against the fixed FST-reduced posterior mean.
    pub cross_fidelity: Option<ScalarEstimate>,
    pub fst_vne: Option<ScalarEstimate>,
    pub qot_vne: Option<ScalarEstimate>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n_qubits: usize,
    pub level: f64,
    /// Full-state fidelity against the reference; present when FST ran.
    pub full_fidelity: Option<ScalarEstimate>,
    pub pairs: Vec<PairReport>,
}

/// Assemble the comparison report from whichever estimates exist.
pub fn build_report(
    fst: Option<&FullEstimate>,
    qot: Option<&BTreeMap<(usize, usize), PairEstimate>>,
    reference: &PureState,
    level: f64,
) -> Result<ComparisonReport> {
    if fst.is_none() && qot.is_none() {
        return Err(TomoError::InvalidConfig(
            "nothing to report: no FST and no QOT estimate".into(),
        ));
    }
    let n = reference.n_qubits();
    let pairs: Vec<(usize, usize)> = match qot {
        Some(map) => map.keys().cloned().collect(),
        None => {
            let mut v = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    v.push((a, b));
                }
            }
            v
        }
    };

    let reference_density = reference.density();
    let mut reduced_refs = BTreeMap::new();
    for &(a, b) in &pairs {
        reduced_refs.insert((a, b), partial_trace(&reference_density, &[a, b])?);
    }

    // Per-sample functionals. FST samples reduce to every pair in one pass
    // over the chain.
    let mut full_fidelity = None;
    let mut fst_pair_fid: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    let mut fst_pair_vne: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    let mut fst_pair_means: BTreeMap<(usize, usize), DensityMatrix> = BTreeMap::new();
    if let Some(full) = fst {
        if full.mean.n_qubits() != n {
            return Err(TomoError::DimensionMismatch {
                expected: n,
                got: full.mean.n_qubits(),
            });
        }
        let mut full_fid = Vec::new();
        for sample in full.samples.post_burn_in() {
            let rho = sample_density(sample);
            full_fid.push(fidelity_to_pure(reference, &rho)?);
            for &(a, b) in &pairs {
                let reduced = partial_trace(&rho, &[a, b])?;
                fst_pair_fid
                    .entry((a, b))
                    .or_default()
                    .push(fidelity(&reduced, &reduced_refs[&(a, b)])?);
                fst_pair_vne
                    .entry((a, b))
                    .or_default()
                    .push(von_neumann_entropy(&reduced));
            }
        }
        full_fidelity = Some(ScalarEstimate::from_samples(&full_fid, level)?);
        for &(a, b) in &pairs {
            fst_pair_means.insert((a, b), partial_trace(&full.mean, &[a, b])?);
        }
    }

    let mut rows = Vec::with_capacity(pairs.len());
    for &(a, b) in &pairs {
        let reduced_ref = &reduced_refs[&(a, b)];
        let fst_fidelity = match fst_pair_fid.get(&(a, b)) {
            Some(values) => Some(ScalarEstimate::from_samples(values, level)?),
            None => None,
        };
        let fst_vne = match fst_pair_vne.get(&(a, b)) {
            Some(values) => Some(ScalarEstimate::from_samples(values, level)?),
            None => None,
        };

        let mut qot_fidelity = None;
        let mut qot_vne = None;
        let mut cross_fidelity = None;
        if let Some(map) = qot {
            let est = map
                .get(&(a, b))
                .ok_or_else(|| TomoError::InvalidSubset(format!("missing pair ({a},{b})")))?;
            let mut fid = Vec::new();
            let mut vne = Vec::new();
            let mut cross = Vec::new();
            for sample in est.samples.post_burn_in() {
                let rho = sample_density(sample);
                fid.push(fidelity(&rho, reduced_ref)?);
                vne.push(von_neumann_entropy(&rho));
                if let Some(fst_mean) = fst_pair_means.get(&(a, b)) {
                    cross.push(fidelity(&rho, fst_mean)?);
                }
            }
            qot_fidelity = Some(ScalarEstimate::from_samples(&fid, level)?);
            qot_vne = Some(ScalarEstimate::from_samples(&vne, level)?);
            if !cross.is_empty() {
                cross_fidelity = Some(ScalarEstimate::from_samples(&cross, level)?);
            }
        }

        rows.push(PairReport {
            pair: (a, b),
            fst_fidelity,
            qot_fidelity,
            cross_fidelity,
            fst_vne,
            qot_vne,
        });
    }

    Ok(ComparisonReport {
        n_qubits: n,
        level,
        full_fidelity,
        pairs: rows,
    })
}
