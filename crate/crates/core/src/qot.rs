//! Quantum overlapping tomography for 2-qubit subsystems: the 3 + 6q
//! measurement schedule built from binary-digit divides, and pairwise S-value
//! extraction with averaging over every qualifying setting.

use std::collections::BTreeMap;

use crate::error::{Result, TomoError};
use crate::exact::signed_sum;
use crate::linalg::ComplexMatrix;
use crate::measurement::{normalize_counts, Basis, BasisSetting, Dataset};
use crate::pauli::PauliWord;
use crate::state::{density_from_stokes, project_to_physical, DensityMatrix, StokesTensor};

/// Two-group partition of the qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divide {
    /// Group label (0 or 1) per qubit index.
    pub group_of: Vec<u8>,
}

impl Divide {
    pub fn separates(&self, x1: usize, x2: usize) -> bool {
        self.group_of[x1] != self.group_of[x2]
    }

    pub fn group(&self, label: u8) -> Vec<usize> {
        self.group_of
            .iter()
            .enumerate()
            .filter(|(_, &g)| g == label)
            .map(|(j, _)| j)
            .collect()
    }
}

/// ceil(log2(n)) divides; divide t puts qubit j in group bit_t(j). Any two
/// distinct indices differ in some bit below the ceiling, so every pair is
/// separated at least once.
pub fn generate_divides(n_qubits: usize) -> Result<Vec<Divide>> {
    if n_qubits < 2 {
        return Err(TomoError::InvalidConfig(format!(
            "QOT needs at least 2 qubits, got {n_qubits}"
        )));
    }
    let q = (usize::BITS - (n_qubits - 1).leading_zeros()) as usize; // ceil(log2 n)
    Ok((0..q)
        .map(|t| Divide {
            group_of: (0..n_qubits).map(|j| ((j >> t) & 1) as u8).collect(),
        })
        .collect())
}

/// The QOT measurement plan: three uniform settings plus six per divide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QotSchedule {
    pub uniform_settings: Vec<BasisSetting>,
    pub divide_settings: Vec<BasisSetting>,
    pub divides: Vec<Divide>,
}

impl QotSchedule {
    pub fn all_settings(&self) -> Vec<BasisSetting> {
        self.uniform_settings
            .iter()
            .chain(self.divide_settings.iter())
            .cloned()
            .collect()
    }

    pub fn len(&self) -> usize {
        self.uniform_settings.len() + self.divide_settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Build the 3 + 6*ceil(log2 n) schedule. Per divide, the ordered basis
/// pairs (B1, B2), B1 != B2, assign B1 to group 0 and B2 to group 1.
pub fn qot_schedule(n_qubits: usize) -> Result<QotSchedule> {
    let divides = generate_divides(n_qubits)?;
    let uniform_settings: Vec<BasisSetting> = Basis::ALL
        .iter()
        .map(|&b| BasisSetting::uniform(n_qubits, b))
        .collect();
    let mut divide_settings = Vec::with_capacity(6 * divides.len());
    for divide in &divides {
        for &b1 in &Basis::ALL {
            for &b2 in &Basis::ALL {
                if b1 == b2 {
                    continue;
                }
                let bases = divide
                    .group_of
                    .iter()
                    .map(|&g| if g == 0 { b1 } else { b2 })
                    .collect();
                divide_settings.push(BasisSetting(bases));
            }
        }
    }
    Ok(QotSchedule {
        uniform_settings,
        divide_settings,
        divides,
    })
}

/// Settings of the schedule whose bases at (x1, x2) match the word's axes;
/// identity positions of the two-qubit word accept any basis.
fn qualifying_settings(
    schedule: &QotSchedule,
    x1: usize,
    x2: usize,
    i1: u8,
    i2: u8,
) -> Vec<BasisSetting> {
    schedule
        .all_settings()
        .into_iter()
        .filter(|s| {
            let ok1 = i1 == 0 || s.basis(x1).pauli_index() == i1;
            let ok2 = i2 == 0 || s.basis(x2).pauli_index() == i2;
            ok1 && ok2
        })
        .collect()
}

/// Extract the 2-qubit Stokes tensor of pair (x1, x2) from a QOT dataset.
/// Every component averages the sign-weighted sums over all qualifying
/// settings of the schedule.
pub fn pair_stokes(dataset: &Dataset, x1: usize, x2: usize) -> Result<StokesTensor> {
    let n = dataset.n_qubits();
    if x1 >= n || x2 >= n || x1 == x2 {
        return Err(TomoError::InvalidSubset(format!(
            "pair ({x1},{x2}) invalid for {n} qubits"
        )));
    }
    let schedule = qot_schedule(n)?;
    require_qot_schedule(dataset, &schedule)?;

    let mut values = vec![0.0f64; 16];
    values[0] = 1.0;
    for i1 in 0..4u8 {
        for i2 in 0..4u8 {
            if i1 == 0 && i2 == 0 {
                continue;
            }
            // embed the pair word into the n-qubit system for the sign rule
            let mut word = vec![0u8; n];
            word[x1] = i1;
            word[x2] = i2;
            let word = PauliWord(word);
            let settings = qualifying_settings(&schedule, x1, x2, i1, i2);
            debug_assert!(!settings.is_empty(), "separation property violated");
            let mut acc = 0.0;
            for setting in &settings {
                let record = dataset.get(setting).expect("schedule checked");
                let freqs = normalize_counts(record)?;
                acc += signed_sum(&word, &freqs);
            }
            values[(i1 as usize) * 4 + i2 as usize] = acc / settings.len() as f64;
        }
    }
    StokesTensor::new(2, values)
}

/// Raw and projected reconstruction of one pair.
#[derive(Debug, Clone)]
pub struct PairReconstruction {
    pub stokes: StokesTensor,
    pub raw: ComplexMatrix,
    pub physical: DensityMatrix,
}

/// Check every schedule setting is present; error lists what is missing.
pub fn require_qot_schedule(dataset: &Dataset, schedule: &QotSchedule) -> Result<()> {
    let missing: Vec<String> = schedule
        .all_settings()
        .into_iter()
        .filter(|s| dataset.get(s).is_none())
        .map(|s| s.to_string())
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(TomoError::MissingSettings {
            count: missing.len(),
            listed: missing.join(","),
        })
    }
}

/// Reconstruct all n(n-1)/2 two-qubit reduced density matrices.
pub fn reconstruct_pairs(
    dataset: &Dataset,
) -> Result<BTreeMap<(usize, usize), PairReconstruction>> {
    let n = dataset.n_qubits();
    let mut out = BTreeMap::new();
    for x1 in 0..n {
        for x2 in (x1 + 1)..n {
            let stokes = pair_stokes(dataset, x1, x2)?;
            let raw = density_from_stokes(&stokes);
            let physical = project_to_physical(&raw)?;
            out.insert(
                (x1, x2),
                PairReconstruction {
                    stokes,
                    raw,
                    physical,
                },
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{exact_dataset, ghz_state, random_density_matrix};
    use crate::state::partial_trace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const EXACT_SCALE: u64 = 1_000_000_000_000;

    #[test]
    fn divides_for_small_systems() {
        let d = generate_divides(4).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].group(0), vec![0, 2]);
        assert_eq!(d[0].group(1), vec![1, 3]);
        assert_eq!(d[1].group(0), vec![0, 1]);
        assert_eq!(d[1].group(1), vec![2, 3]);

        let d = generate_divides(2).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].group(0), vec![0]);
        assert_eq!(d[0].group(1), vec![1]);

        assert_eq!(generate_divides(6).unwrap().len(), 3);
        assert!(generate_divides(1).is_err());
    }

    #[test]
    fn every_pair_separated() {
        for n in 2..=8usize {
            let divides = generate_divides(n).unwrap();
            for divide in &divides {
                assert!(!divide.group(0).is_empty());
                assert!(!divide.group(1).is_empty());
            }
            for x1 in 0..n {
                for x2 in (x1 + 1)..n {
                    assert!(
                        divides.iter().any(|d| d.separates(x1, x2)),
                        "pair ({x1},{x2}) not separated for n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn schedule_counts_and_distinctness() {
        for n in 2..=8usize {
            let schedule = qot_schedule(n).unwrap();
            let q = (usize::BITS - (n - 1).leading_zeros()) as usize;
            assert_eq!(schedule.len(), 3 + 6 * q);
            let mut all = schedule.all_settings();
            let before = all.len();
            all.sort();
            all.dedup();
            assert_eq!(all.len(), before, "duplicate settings for n={n}");
        }
        assert_eq!(qot_schedule(4).unwrap().len(), 15);
        assert_eq!(qot_schedule(6).unwrap().len(), 21);
        assert_eq!(qot_schedule(2).unwrap().len(), 9);
    }

    #[test]
    fn four_qubit_schedule_is_the_expected_fifteen() {
        let schedule = qot_schedule(4).unwrap();
        let mut got: Vec<String> = schedule.all_settings().iter().map(|s| s.to_string()).collect();
        got.sort();
        let mut want: Vec<String> = [
            "XXXX", "YYYY", "ZZZZ", // uniform
            "XXYY", "XXZZ", "YYXX", "YYZZ", "ZZXX", "ZZYY", // divide {{0,1},{2,3}}
            "XYXY", "XZXZ", "YXYX", "YZYZ", "ZXZX", "ZYZY", // divide {{0,2},{1,3}}
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn ghz4_pair_components() {
        let rho = ghz_state(4, 0.0).unwrap().density();
        let schedule = qot_schedule(4).unwrap().all_settings();
        let ds = exact_dataset(&rho, &schedule, EXACT_SCALE).unwrap();
        let s01 = pair_stokes(&ds, 0, 1).unwrap();
        assert!((s01.get(&PauliWord(vec![3, 3])) + 1.0).abs() < 1e-9);
        assert!(s01.get(&PauliWord(vec![3, 0])).abs() < 1e-9);
        assert!(s01.get(&PauliWord(vec![0, 3])).abs() < 1e-9);
        let s02 = pair_stokes(&ds, 0, 2).unwrap();
        assert!((s02.get(&PauliWord(vec![3, 3])) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qualifying_settings_agree_on_exact_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rho = random_density_matrix(4, &mut rng);
        let schedule = qot_schedule(4).unwrap();
        let ds = exact_dataset(&rho, &schedule.all_settings(), EXACT_SCALE).unwrap();
        for (x1, x2) in [(0usize, 1usize), (0, 3), (1, 2), (2, 3)] {
            for i1 in 0..4u8 {
                for i2 in 0..4u8 {
                    if i1 == 0 && i2 == 0 {
                        continue;
                    }
                    let mut word = vec![0u8; 4];
                    word[x1] = i1;
                    word[x2] = i2;
                    let word = PauliWord(word);
                    let values: Vec<f64> = qualifying_settings(&schedule, x1, x2, i1, i2)
                        .iter()
                        .map(|s| {
                            let freqs = normalize_counts(ds.get(s).unwrap()).unwrap();
                            signed_sum(&word, &freqs)
                        })
                        .collect();
                    assert!(!values.is_empty());
                    for v in &values {
                        assert!(
                            (v - values[0]).abs() < 1e-10,
                            "pair ({x1},{x2}) word ({i1},{i2}): {values:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pairs_match_partial_traces_on_exact_ghz() {
        let rho = ghz_state(4, 0.0).unwrap().density();
        let schedule = qot_schedule(4).unwrap().all_settings();
        let ds = exact_dataset(&rho, &schedule, EXACT_SCALE).unwrap();
        let pairs = reconstruct_pairs(&ds).unwrap();
        assert_eq!(pairs.len(), 6);
        for ((x1, x2), rec) in &pairs {
            let reduced = partial_trace(&rho, &[*x1, *x2]).unwrap();
            assert!(
                rec.raw.max_abs_diff(reduced.matrix()) < 1e-6,
                "pair ({x1},{x2})"
            );
        }
    }

    #[test]
    fn six_qubit_pair_count() {
        let rho = ghz_state(6, 0.0).unwrap().density();
        let schedule = qot_schedule(6).unwrap().all_settings();
        assert_eq!(schedule.len(), 21);
        let ds = exact_dataset(&rho, &schedule, 1_000_000_000).unwrap();
        let pairs = reconstruct_pairs(&ds).unwrap();
        assert_eq!(pairs.len(), 15);
        for ((x1, x2), rec) in &pairs {
            let reduced = partial_trace(&rho, &[*x1, *x2]).unwrap();
            assert!(
                rec.raw.max_abs_diff(reduced.matrix()) < 1e-6,
                "pair ({x1},{x2})"
            );
        }
    }

    #[test]
    fn incomplete_dataset_is_rejected() {
        let rho = ghz_state(4, 0.0).unwrap().density();
        let schedule: Vec<BasisSetting> = qot_schedule(4)
            .unwrap()
            .all_settings()
            .into_iter()
            .skip(1)
            .collect();
        let ds = exact_dataset(&rho, &schedule, 1000).unwrap();
        assert!(matches!(
            pair_stokes(&ds, 0, 1),
            Err(TomoError::MissingSettings { .. })
        ));
    }
}
