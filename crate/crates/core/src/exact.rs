//! Linear-inversion full state tomography over the complete 3^n schedule.
//!
//! Each S value is a sign-weighted sum of outcome frequencies: the sign of an
//! outcome is the product, over non-identity word positions, of the measured
//! eigenvalue (+1 for the transmission bit, -1 otherwise). Words containing
//! identity positions are compatible with several settings; their values are
//! averaged over all of them to suppress systematic inaccuracy.

use crate::error::{Result, TomoError};
use crate::linalg::ComplexMatrix;
use crate::measurement::{normalize_counts, Basis, BasisSetting, Dataset};
use crate::pauli::{all_words, PauliWord};
use crate::state::{density_from_stokes, project_to_physical, DensityMatrix, StokesTensor};

/// Per-outcome ±1 coefficients of one Pauli word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern {
    pub word: PauliWord,
    pub signs: Vec<i8>,
}

impl SignPattern {
    pub fn new(word: &PauliWord) -> Self {
        let n = word.len();
        let mask = word.outcome_mask();
        let signs = (0..1usize << n)
            .map(|outcome| {
                if (outcome & mask).count_ones() % 2 == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        Self {
            word: word.clone(),
            signs,
        }
    }
}

/// Sign of one outcome under one word, as f64 for accumulation.
pub fn outcome_sign(word: &PauliWord, outcome: usize) -> f64 {
    if (outcome & word.outcome_mask()).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All 3^n settings in lexicographic X < Y < Z order.
pub fn full_schedule(n_qubits: usize) -> Vec<BasisSetting> {
    let total = 3usize.pow(n_qubits as u32);
    (0..total)
        .map(|mut k| {
            let mut bases = vec![Basis::X; n_qubits];
            for j in (0..n_qubits).rev() {
                bases[j] = Basis::ALL[k % 3];
                k /= 3;
            }
            BasisSetting(bases)
        })
        .collect()
}

/// Settings compatible with a word: the basis at every non-identity position
/// must match that position's axis; identity positions range over X, Y, Z.
pub fn compatible_settings(word: &PauliWord) -> Vec<BasisSetting> {
    let free: Vec<usize> = word
        .0
        .iter()
        .enumerate()
        .filter(|(_, &i)| i == 0)
        .map(|(j, _)| j)
        .collect();
    let total = 3usize.pow(free.len() as u32);
    (0..total)
        .map(|mut k| {
            let mut bases: Vec<Basis> = word
                .0
                .iter()
                .map(|&i| Basis::from_pauli_index(i).unwrap_or(Basis::X))
                .collect();
            for &j in free.iter().rev() {
                bases[j] = Basis::ALL[k % 3];
                k /= 3;
            }
            BasisSetting(bases)
        })
        .collect()
}

/// Sign-weighted frequency sum for one word under one record's frequencies.
pub fn signed_sum(word: &PauliWord, frequencies: &[f64]) -> f64 {
    let mask = word.outcome_mask();
    frequencies
        .iter()
        .enumerate()
        .map(|(outcome, &p)| {
            if (outcome & mask).count_ones() % 2 == 0 {
                p
            } else {
                -p
            }
        })
        .sum()
}

/// S value of one word: unweighted mean of the sign-weighted sums over every
/// compatible setting. The all-identity word is exactly 1.
pub fn stokes_component(word: &PauliWord, dataset: &Dataset) -> Result<f64> {
    if word.len() != dataset.n_qubits() {
        return Err(TomoError::DimensionMismatch {
            expected: dataset.n_qubits(),
            got: word.len(),
        });
    }
    if word.is_identity() {
        return Ok(1.0);
    }
    let settings = compatible_settings(word);
    let mut acc = 0.0;
    for setting in &settings {
        let record = dataset.get(setting).ok_or_else(|| TomoError::MissingSettings {
            count: 1,
            listed: setting.to_string(),
        })?;
        let freqs = normalize_counts(record)?;
        acc += signed_sum(word, &freqs);
    }
    Ok(acc / settings.len() as f64)
}

/// Full linear-inversion reconstruction.
#[derive(Debug, Clone)]
pub struct FullReconstruction {
    pub stokes: StokesTensor,
    pub raw: ComplexMatrix,
    pub physical: DensityMatrix,
}

/// Check the dataset covers the full 3^n schedule; error lists what is
/// missing.
pub fn require_full_schedule(dataset: &Dataset) -> Result<()> {
    let missing: Vec<String> = full_schedule(dataset.n_qubits())
        .into_iter()
        .filter(|s| dataset.get(s).is_none())
        .map(|s| s.to_string())
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        let shown = missing
            .iter()
            .take(8)
            .cloned()
            .collect::<Vec<_>>()
            .join(",");
        let listed = if missing.len() > 8 {
            format!("{shown},...")
        } else {
            shown
        };
        Err(TomoError::MissingSettings {
            count: missing.len(),
            listed,
        })
    }
}

/// Invert a full-schedule dataset into (raw, physical) estimates. The raw
/// matrix keeps the unprojected linear inversion for downstream estimation.
pub fn reconstruct_full(dataset: &Dataset) -> Result<FullReconstruction> {
    require_full_schedule(dataset)?;
    let n = dataset.n_qubits();

    // cache normalized frequencies once per setting
    let schedule = full_schedule(n);
    let mut freq_cache = std::collections::BTreeMap::new();
    for setting in &schedule {
        let record = dataset.get(setting).expect("checked above");
        freq_cache.insert(setting.clone(), normalize_counts(record)?);
    }

    let mut values = Vec::with_capacity(1 << (2 * n));
    for word in all_words(n) {
        if word.is_identity() {
            values.push(1.0);
            continue;
        }
        let settings = compatible_settings(&word);
        let mut acc = 0.0;
        for setting in &settings {
            acc += signed_sum(&word, &freq_cache[setting]);
        }
        values.push(acc / settings.len() as f64);
    }
    let stokes = StokesTensor::new(n, values)?;
    let raw = density_from_stokes(&stokes);
    let physical = project_to_physical(&raw)?;
    Ok(FullReconstruction {
        stokes,
        raw,
        physical,
    })
}
