//! Measurement bases, projectors, Born-rule probabilities, detector-pattern
//! mapping, and count records.
//!
//! Outcome convention: bit 0 of an outcome selects the first-listed
//! eigenstate (transmission mode, eigenvalue +1); the most significant bit is
//! qubit 0. Basis eigenstate pairs: Z -> (H, V), X -> (D, A), Y -> (R, L).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, TomoError};
use crate::linalg::{kron_vec, ComplexMatrix, C64};
use crate::state::DensityMatrix;

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Measurement axis for one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    /// Pauli index of the axis (X=1, Y=2, Z=3).
    pub fn pauli_index(self) -> u8 {
        match self {
            Basis::X => 1,
            Basis::Y => 2,
            Basis::Z => 3,
        }
    }

    pub fn from_pauli_index(index: u8) -> Option<Basis> {
        match index {
            1 => Some(Basis::X),
            2 => Some(Basis::Y),
            3 => Some(Basis::Z),
            _ => None,
        }
    }

    /// Eigenstate for the given outcome bit; bit 0 carries eigenvalue +1.
    pub fn eigenstate(self, bit: u8) -> DVector<C64> {
        let (a, b) = match (self, bit) {
            (Basis::Z, 0) => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)), // H
            (Basis::Z, _) => (C64::new(0.0, 0.0), C64::new(1.0, 0.0)), // V
            (Basis::X, 0) => (C64::new(SQRT_HALF, 0.0), C64::new(SQRT_HALF, 0.0)), // D
            (Basis::X, _) => (C64::new(SQRT_HALF, 0.0), C64::new(-SQRT_HALF, 0.0)), // A
            (Basis::Y, 0) => (C64::new(SQRT_HALF, 0.0), C64::new(0.0, -SQRT_HALF)), // R
            (Basis::Y, _) => (C64::new(SQRT_HALF, 0.0), C64::new(0.0, SQRT_HALF)), // L
        };
        DVector::from_vec(vec![a, b])
    }

    pub fn to_char(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Y => 'Y',
            Basis::Z => 'Z',
        }
    }

    pub fn from_char(ch: char) -> Option<Basis> {
        match ch {
            'X' => Some(Basis::X),
            'Y' => Some(Basis::Y),
            'Z' => Some(Basis::Z),
            _ => None,
        }
    }
}

/// Waveplate angles (HWP, QWP) in degrees realizing a basis, per the
/// detection-unit convention.
pub fn basis_to_waveplates(b: Basis) -> (f64, f64) {
    match b {
        Basis::Z => (0.0, 0.0),
        Basis::X => (22.5, 0.0),
        Basis::Y => (0.0, 45.0),
    }
}

/// Per-qubit basis assignment, e.g. "ZXYZ".
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisSetting(pub Vec<Basis>);

impl BasisSetting {
    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn basis(&self, qubit: usize) -> Basis {
        self.0[qubit]
    }

    pub fn uniform(n_qubits: usize, b: Basis) -> Self {
        BasisSetting(vec![b; n_qubits])
    }
}

impl fmt::Display for BasisSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{}", b.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for BasisSetting {
    type Err = TomoError;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::with_capacity(s.len());
        for (pos, ch) in s.chars().enumerate() {
            match Basis::from_char(ch) {
                Some(b) => out.push(b),
                None => {
                    return Err(TomoError::Format(format!(
                        "unknown basis letter '{ch}' at position {pos}"
                    )))
                }
            }
        }
        if out.is_empty() {
            return Err(TomoError::Format("empty basis setting".into()));
        }
        Ok(BasisSetting(out))
    }
}

/// Coincidence counts for one basis setting, indexed by outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    pub setting: BasisSetting,
    pub counts: Vec<u64>,
    pub duration_s: Option<f64>,
}

impl CountRecord {
    pub fn new(setting: BasisSetting, counts: Vec<u64>, duration_s: Option<f64>) -> Result<Self> {
        let expected = 1usize << setting.n_qubits();
        if counts.len() != expected {
            return Err(TomoError::DimensionMismatch {
                expected,
                got: counts.len(),
            });
        }
        Ok(Self {
            setting,
            counts,
            duration_s,
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Marginal record on a qubit pair: induced 2-qubit setting plus counts
    /// summed over every other qubit's outcome bit.
    pub fn marginalize_pair(&self, x1: usize, x2: usize) -> Result<CountRecord> {
        let n = self.setting.n_qubits();
        if x1 >= n || x2 >= n || x1 == x2 {
            return Err(TomoError::InvalidSubset(format!(
                "pair ({x1},{x2}) invalid for {n} qubits"
            )));
        }
        let setting = BasisSetting(vec![self.setting.basis(x1), self.setting.basis(x2)]);
        let mut counts = vec![0u64; 4];
        for (outcome, &c) in self.counts.iter().enumerate() {
            let b1 = (outcome >> (n - 1 - x1)) & 1;
            let b2 = (outcome >> (n - 1 - x2)) & 1;
            counts[b1 * 2 + b2] += c;
        }
        CountRecord::new(setting, counts, self.duration_s)
    }
}

/// A set of count records keyed by (unique) basis setting.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_qubits: usize,
    records: BTreeMap<BasisSetting, CountRecord>,
}

impl Dataset {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            records: BTreeMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn insert(&mut self, record: CountRecord) -> Result<()> {
        if record.setting.n_qubits() != self.n_qubits {
            return Err(TomoError::DimensionMismatch {
                expected: self.n_qubits,
                got: record.setting.n_qubits(),
            });
        }
        if self.records.contains_key(&record.setting) {
            return Err(TomoError::Format(format!(
                "duplicate setting {}",
                record.setting
            )));
        }
        self.records.insert(record.setting.clone(), record);
        Ok(())
    }

    pub fn get(&self, setting: &BasisSetting) -> Option<&CountRecord> {
        self.records.get(setting)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &CountRecord> {
        self.records.values()
    }

    pub fn settings(&self) -> impl Iterator<Item = &BasisSetting> {
        self.records.keys()
    }

    /// Marginal records for a qubit pair, one per stored record, in setting
    /// order. Induced 2-qubit settings may repeat.
    pub fn marginal_records(&self, x1: usize, x2: usize) -> Result<Vec<CountRecord>> {
        self.records()
            .map(|r| r.marginalize_pair(x1, x2))
            .collect()
    }
}

/// Rank-1 projector onto the tensor-product eigenstate selected by `outcome`.
pub fn projector(setting: &BasisSetting, outcome: usize) -> Result<ComplexMatrix> {
    let n = setting.n_qubits();
    if outcome >= (1 << n) {
        return Err(TomoError::OutcomeOutOfRange {
            outcome,
            n_qubits: n,
        });
    }
    let v = outcome_eigenvector(setting, outcome);
    let d = v.len();
    let m = DMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj());
    ComplexMatrix::new(m)
}

fn outcome_eigenvector(setting: &BasisSetting, outcome: usize) -> DVector<C64> {
    let n = setting.n_qubits();
    let mut v = setting.basis(0).eigenstate(((outcome >> (n - 1)) & 1) as u8);
    for j in 1..n {
        let bit = ((outcome >> (n - 1 - j)) & 1) as u8;
        v = kron_vec(&v, &setting.basis(j).eigenstate(bit));
    }
    v
}

/// Born-rule outcome distribution p_i = Tr(P_i rho). Values below -1e-12 are
/// a caller error; tiny negatives are clipped to zero.
pub fn outcome_probabilities(rho: &DensityMatrix, setting: &BasisSetting) -> Result<Vec<f64>> {
    if setting.n_qubits() != rho.n_qubits() {
        return Err(TomoError::DimensionMismatch {
            expected: rho.n_qubits(),
            got: setting.n_qubits(),
        });
    }
    let dim = rho.dim();
    // One change of basis instead of 2^n quadratic forms: p = diag(V† rho V)
    // where V's columns are the outcome eigenvectors.
    let mut basis_change = DMatrix::<C64>::zeros(dim, dim);
    for outcome in 0..dim {
        let v = outcome_eigenvector(setting, outcome);
        for r in 0..dim {
            basis_change[(r, outcome)] = v[r];
        }
    }
    let rotated = basis_change.adjoint() * rho.matrix().as_dmatrix() * &basis_change;
    Ok((0..dim).map(|i| rotated[(i, i)].re.max(0.0)).collect())
}

/// Empirical outcome frequencies c_i / sum(c). Errors on an all-zero record.
pub fn normalize_counts(record: &CountRecord) -> Result<Vec<f64>> {
    let total = record.total();
    if total == 0 {
        return Err(TomoError::EmptyRecord);
    }
    Ok(record
        .counts
        .iter()
        .map(|&c| c as f64 / total as f64)
        .collect())
}

/// Map a 4-photon detector combination to its outcome index. Detectors are
/// numbered 1..=8; the pair {2j+1, 2j+2} reads qubit j, odd detector =
/// transmission (bit 0).
pub fn pattern_to_outcome(detectors: &[u32]) -> Result<usize> {
    if detectors.len() != 4 {
        return Err(TomoError::InvalidDetectorPattern(format!(
            "expected 4 detectors, got {}",
            detectors.len()
        )));
    }
    let mut bits = [None::<usize>; 4];
    for &d in detectors {
        if !(1..=8).contains(&d) {
            return Err(TomoError::InvalidDetectorPattern(format!(
                "detector id {d} out of range 1..=8"
            )));
        }
        let unit = ((d - 1) / 2) as usize;
        let bit = ((d - 1) % 2) as usize;
        if bits[unit].is_some() {
            return Err(TomoError::InvalidDetectorPattern(format!(
                "two detectors from unit {}",
                unit + 1
            )));
        }
        bits[unit] = Some(bit);
    }
    let mut outcome = 0usize;
    for (unit, bit) in bits.iter().enumerate() {
        match bit {
            Some(b) => outcome |= b << (3 - unit),
            None => {
                return Err(TomoError::InvalidDetectorPattern(format!(
                    "missing detector from unit {}",
                    unit + 1
                )))
            }
        }
    }
    Ok(outcome)
}
