//! Quantum state types and state-space operations: Pauli expansions, partial
//! traces, physicality projection, fidelity, and entropy.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, TomoError};
use crate::linalg::{ComplexMatrix, C64};
use crate::pauli::{all_words, PauliWord};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

/// Hermitian, unit-trace, PSD (within tolerance) matrix on n qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(n_qubits: usize, matrix: ComplexMatrix) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if matrix.dim() != dim {
            return Err(TomoError::DimensionMismatch {
                expected: dim,
                got: matrix.dim(),
            });
        }
        let dev = matrix.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(TomoError::NonHermitian { deviation: dev });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(TomoError::NotPhysical {
                reason: format!("trace {} != 1", tr),
            });
        }
        if !matrix.is_psd_within(PSD_TOL) {
            return Err(TomoError::NotPhysical {
                reason: format!("min eigenvalue below -{PSD_TOL:e}"),
            });
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let m = ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0));
        Self {
            n_qubits,
            matrix: m,
        }
    }
}

/// Pure n-qubit state with unit-norm amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: DVector<C64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(TomoError::DimensionMismatch {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(TomoError::NotNormalized { norm: norm.sqrt() });
        }
        Ok(Self {
            n_qubits,
            amplitudes: v,
        })
    }

    /// Normalize a raw amplitude vector; errors on (near-)zero norm.
    pub fn normalized(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(TomoError::DimensionMismatch {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(TomoError::InvalidSource(
                "post-selected state has zero norm".into(),
            ));
        }
        let v: Vec<C64> = amplitudes
            .into_iter()
            .map(|a| a / C64::new(norm, 0.0))
            .collect();
        Ok(Self {
            n_qubits,
            amplitudes: DVector::from_vec(v),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    /// |psi><psi| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let d = self.amplitudes.len();
        let m = DMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: ComplexMatrix { m },
        }
    }

    /// <psi|rho|psi>; equals fidelity when the reference is pure.
    pub fn expectation(&self, rho: &ComplexMatrix) -> f64 {
        let v = &self.amplitudes;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..v.len() {
            for j in 0..v.len() {
                acc += v[i].conj() * rho.get(i, j) * v[j];
            }
        }
        acc.re
    }
}

/// Real Pauli expansion coefficients S_{i1..in}, stored flat in base-4 order
/// with qubit 0 most significant. S at the all-identity word is pinned to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesTensor {
    n_qubits: usize,
    values: Vec<f64>,
}

impl StokesTensor {
    pub fn new(n_qubits: usize, values: Vec<f64>) -> Result<Self> {
        let len = 1usize << (2 * n_qubits);
        if values.len() != len {
            return Err(TomoError::DimensionMismatch {
                expected: len,
                got: values.len(),
            });
        }
        if values[0] != 1.0 {
            return Err(TomoError::InvalidStokes(format!(
                "identity component must be exactly 1, got {}",
                values[0]
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(TomoError::InvalidStokes("non-finite component".into()));
        }
        Ok(Self { n_qubits, values })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, word: &PauliWord) -> f64 {
        self.values[word.flat_index()]
    }

    /// Sub-tensor on two qubit positions: S_{i1,i2} read off the n-qubit
    /// words that are identity everywhere except x1 and x2.
    pub fn pair_subtensor(&self, x1: usize, x2: usize) -> Result<StokesTensor> {
        if x1 >= self.n_qubits || x2 >= self.n_qubits || x1 == x2 {
            return Err(TomoError::InvalidSubset(format!(
                "pair ({x1},{x2}) invalid for {} qubits",
                self.n_qubits
            )));
        }
        let mut values = vec![0.0; 16];
        for i1 in 0..4u8 {
            for i2 in 0..4u8 {
                let mut word = vec![0u8; self.n_qubits];
                word[x1] = i1;
                word[x2] = i2;
                values[(i1 as usize) * 4 + i2 as usize] = self.get(&PauliWord(word));
            }
        }
        StokesTensor::new(2, values)
    }
}

/// rho = (1/2^n) sum_w S_w sigma_w. Hermitian and unit trace by construction;
/// not necessarily PSD, so the raw matrix is returned and the caller decides
/// whether to project.
pub fn density_from_stokes(s: &StokesTensor) -> ComplexMatrix {
    let n = s.n_qubits();
    let dim = 1usize << n;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for word in all_words(n) {
        let coeff = s.get(&word);
        if coeff == 0.0 {
            continue;
        }
        for (r, c, v) in word.entries() {
            m[(r, c)] += v * C64::new(coeff, 0.0);
        }
    }
    let scale = C64::new(1.0 / dim as f64, 0.0);
    ComplexMatrix {
        m: m.map(|z| z * scale),
    }
}

/// S_w = Tr(sigma_w rho) for every word.
pub fn stokes_from_density(rho: &DensityMatrix) -> StokesTensor {
    let s = stokes_from_matrix(rho.n_qubits(), rho.matrix());
    // trace = 1 within tolerance makes the identity component 1 up to float
    // error; pin it exactly as the type requires.
    let mut values = s;
    values[0] = 1.0;
    StokesTensor {
        n_qubits: rho.n_qubits(),
        values,
    }
}

/// Raw trace pairing against an arbitrary matrix; used by the tomography
/// internals where the input is not yet a validated state.
pub fn stokes_from_matrix(n_qubits: usize, m: &ComplexMatrix) -> Vec<f64> {
    all_words(n_qubits)
        .map(|word| {
            let mut acc = C64::new(0.0, 0.0);
            for (r, c, v) in word.entries() {
                acc += v * m.get(c, r);
            }
            acc.re
        })
        .collect()
}

/// Reduced state on `keep` (ascending qubit indices). Keeping every qubit
/// returns the input unchanged.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if keep.is_empty() {
        return Err(TomoError::InvalidSubset("keep set is empty".into()));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&q| q >= n) {
        return Err(TomoError::InvalidSubset(format!(
            "qubit index out of range for {n} qubits"
        )));
    }
    if keep.len() == n {
        return Ok(rho.clone());
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let kd = 1usize << k;
    let td = 1usize << traced.len();

    // Compose a full index from kept-part bits and traced-part bits,
    // MSB-first within each part.
    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            let bit = (kept_bits >> (k - 1 - pos)) & 1;
            idx |= bit << (n - 1 - q);
        }
        for (pos, &q) in traced.iter().enumerate() {
            let bit = (traced_bits >> (traced.len() - 1 - pos)) & 1;
            idx |= bit << (n - 1 - q);
        }
        idx
    };

    let mut out = DMatrix::<C64>::zeros(kd, kd);
    for a in 0..kd {
        for b in 0..kd {
            let mut acc = C64::new(0.0, 0.0);
            for e in 0..td {
                acc += rho.matrix().get(compose(a, e), compose(b, e));
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix {
        n_qubits: k,
        matrix: ComplexMatrix { m: out },
    })
}

/// Clip eigenvalues that are negative or lost in float noise relative to the
/// largest; the square root's infinite slope at zero would otherwise blow
/// rounding error up to sqrt(eps) per rank-deficient direction.
fn clipped_roots(vals: &[f64]) -> Vec<f64> {
    let top = vals.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = top * 1e-13;
    vals.iter()
        .map(|&v| if v > cutoff { v.sqrt() } else { 0.0 })
        .collect()
}

fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let (vals, vecs) = m.hermitian_eigen();
    ComplexMatrix::from_eigen(&clipped_roots(&vals), &vecs)
}

/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2. Tiny negative
/// eigenvalues are clipped before each square root.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(TomoError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let sa = psd_sqrt(a.matrix());
    let inner = sa.mul(b.matrix()).mul(&sa);
    let (vals, _) = inner.hermitian_eigen();
    let tr: f64 = clipped_roots(&vals).iter().sum();
    Ok(tr * tr)
}

/// Fast path for a pure reference: F = <psi|rho|psi>.
pub fn fidelity_to_pure(reference: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != reference.amplitudes().len() {
        return Err(TomoError::DimensionMismatch {
            expected: reference.amplitudes().len(),
            got: rho.dim(),
        });
    }
    Ok(reference.expectation(rho.matrix()).max(0.0))
}

/// Natural-log von Neumann entropy; eigenvalues are clipped to [0,1] and
/// 0 ln 0 reads as 0.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let (vals, _) = rho.matrix().hermitian_eigen();
    vals.iter()
        .map(|&v| v.clamp(0.0, 1.0))
        .filter(|&v| v > 0.0)
        .map(|v| -v * v.ln())
        .sum()
}

/// Trace distance (1/2)||a - b||_1.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(TomoError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let diff = a.matrix().sub(b.matrix());
    let (vals, _) = diff.hermitian_eigen();
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// Clip negative eigenvalues to zero and renormalize the trace to one.
/// Physical inputs are fixed points.
pub fn project_to_physical(m: &ComplexMatrix) -> Result<DensityMatrix> {
    let dim = m.dim();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(TomoError::DimensionMismatch {
            expected: dim.next_power_of_two().max(2),
            got: dim,
        });
    }
    let dev = m.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(TomoError::NonHermitian { deviation: dev });
    }
    let n_qubits = dim.trailing_zeros() as usize;
    let (vals, vecs) = m.hermitian_eigen();
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(TomoError::NotPhysical {
            reason: "no positive eigenvalue mass to renormalize".into(),
        });
    }
    let scaled: Vec<f64> = clipped.iter().map(|&v| v / total).collect();
    let matrix = ComplexMatrix::from_eigen(&scaled, &vecs);
    Ok(DensityMatrix { n_qubits, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::sigma;
    use crate::source::{ghz_state, random_density_matrix};
    use crate::linalg::tensor_product;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tensor_product_identities() {
        let i4 = tensor_product(&sigma(0), &sigma(0));
        assert!(i4.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        let zz = tensor_product(&sigma(3), &sigma(3));
        let want = ComplexMatrix::from_row_slice(
            4,
            &[
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
            ],
        )
        .unwrap();
        assert!(zz.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn tensor_product_trace_multiplies() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_density_matrix(1, &mut rng);
            let b = random_density_matrix(1, &mut rng);
            let t = tensor_product(a.matrix(), b.matrix());
            let want = a.matrix().trace() * b.matrix().trace();
            assert!((t.trace() - want).norm() < 1e-12);
        }
    }

    #[test]
    fn tensor_product_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let a = random_density_matrix(1, &mut rng);
            let b = random_density_matrix(1, &mut rng);
            let d = random_density_matrix(1, &mut rng);
            let left = tensor_product(&tensor_product(a.matrix(), b.matrix()), d.matrix());
            let right = tensor_product(a.matrix(), &tensor_product(b.matrix(), d.matrix()));
            assert!(left.max_abs_diff(&right) < 1e-12);
        }
    }

    #[test]
    fn stokes_of_single_qubit_states() {
        let mixed = StokesTensor::new(1, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let rho = density_from_stokes(&mixed);
        assert!(rho.max_abs_diff(&ComplexMatrix::identity(2).scale(c(0.5, 0.0))) < 1e-15);

        let h = StokesTensor::new(1, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let rho = density_from_stokes(&h);
        let want = ComplexMatrix::from_row_slice(
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert!(rho.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn bell_state_stokes_round_trip() {
        let bell = ghz_state(2, 0.0).unwrap().density();
        let s = stokes_from_density(&bell);
        let back = density_from_stokes(&s);
        assert!(back.max_abs_diff(bell.matrix()) < 1e-12);
    }

    #[test]
    fn stokes_round_trip_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3usize {
            for _ in 0..5 {
                let rho = random_density_matrix(n, &mut rng);
                let s = stokes_from_density(&rho);
                let back = density_from_stokes(&s);
                assert!(back.max_abs_diff(rho.matrix()) < 1e-12);
                // physical states keep every component in [-1, 1]
                assert!(s.values().iter().all(|v| v.abs() <= 1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn ghz4_stokes_components() {
        let ghz = ghz_state(4, 0.0).unwrap().density();
        let s = stokes_from_density(&ghz);
        assert!((s.get(&PauliWord(vec![3, 3, 3, 3])) - 1.0).abs() < 1e-12);
        assert!(s.get(&PauliWord(vec![3, 0, 0, 0])).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_stokes() {
        let s = stokes_from_density(&DensityMatrix::maximally_mixed(2));
        assert_eq!(s.values()[0], 1.0);
        assert!(s.values()[1..].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn partial_trace_ghz4_adjacent_pair() {
        let ghz = ghz_state(4, 0.0).unwrap().density();
        let red = partial_trace(&ghz, &[0, 1]).unwrap();
        // 0.5(|HV><HV| + |VH><VH|)
        let mut want = DMatrix::<C64>::zeros(4, 4);
        want[(1, 1)] = c(0.5, 0.0);
        want[(2, 2)] = c(0.5, 0.0);
        assert!(red.matrix().max_abs_diff(&ComplexMatrix::new(want).unwrap()) < 1e-12);
    }

    #[test]
    fn partial_trace_product_state() {
        let hv = PureState::new(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
            .unwrap()
            .density();
        let red = partial_trace(&hv, &[0]).unwrap();
        let want = ComplexMatrix::from_row_slice(
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert!(red.matrix().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = random_density_matrix(3, &mut rng);
        let red = partial_trace(&rho, &[0, 2]).unwrap();
        assert!((red.matrix().trace().re - 1.0).abs() < 1e-12);
        assert_eq!(
            partial_trace(&rho, &[0, 1, 2]).unwrap().matrix().clone(),
            rho.matrix().clone()
        );
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[3]).is_err());
    }

    #[test]
    fn partial_trace_commutes_with_stokes_marginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = random_density_matrix(4, &mut rng);
        let full = stokes_from_density(&rho);
        for &(a, b) in &[(0usize, 1usize), (0, 3), (1, 2)] {
            let sub = full.pair_subtensor(a, b).unwrap();
            let red = partial_trace(&rho, &[a, b]).unwrap();
            let direct = stokes_from_density(&red);
            for (x, y) in sub.values().iter().zip(direct.values()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fidelity_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_density_matrix(2, &mut rng);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);

        let h = PureState::new(1, vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap().density();
        let v = PureState::new(1, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap().density();
        assert!(fidelity(&h, &v).unwrap().abs() < 1e-12);

        let ghz = ghz_state(4, 0.0).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4);
        let f = fidelity(&ghz.density(), &mixed).unwrap();
        assert!((f - 1.0 / 16.0).abs() < 1e-9);
    }

    #[test]
    fn fidelity_symmetric_and_pure_shortcut() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = random_density_matrix(2, &mut rng);
        let b = random_density_matrix(2, &mut rng);
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        assert!((fab - fba).abs() < 1e-9);
        assert!((0.0..=1.0 + 1e-9).contains(&fab));

        let psi = ghz_state(2, 30.0).unwrap();
        let f1 = fidelity(&psi.density(), &a).unwrap();
        let f2 = fidelity_to_pure(&psi, &a).unwrap();
        assert!((f1 - f2).abs() < 1e-9);
    }

    #[test]
    fn entropy_reference_points() {
        let ghz = ghz_state(4, 0.0).unwrap().density();
        assert!(von_neumann_entropy(&ghz).abs() < 1e-9);
        let marg = partial_trace(&ghz, &[1, 2]).unwrap();
        assert!((von_neumann_entropy(&marg) - 2f64.ln()).abs() < 1e-9);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((von_neumann_entropy(&mixed) - 4f64.ln()).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rho = random_density_matrix(3, &mut rng);
        let s = von_neumann_entropy(&rho);
        assert!(s >= 0.0 && s <= 3.0 * 2f64.ln() + 1e-9);
    }

    #[test]
    fn projection_fixed_point_and_clip() {
        let ghz = ghz_state(2, 0.0).unwrap().density();
        let proj = project_to_physical(ghz.matrix()).unwrap();
        assert!(proj.matrix().max_abs_diff(ghz.matrix()) < 1e-10);

        let m = ComplexMatrix::from_row_slice(
            2,
            &[c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)],
        )
        .unwrap();
        let proj = project_to_physical(&m).unwrap();
        let want = ComplexMatrix::from_row_slice(
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert!(proj.matrix().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn projection_repairs_random_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let bell = ghz_state(2, 0.0).unwrap().density();
        for _ in 0..1000 {
            use rand::Rng;
            let mut m = bell.matrix().clone().into_dmatrix();
            for i in 0..4 {
                for j in i..4 {
                    let re: f64 = rng.gen_range(-0.05..0.05);
                    let im: f64 = if i == j { 0.0 } else { rng.gen_range(-0.05..0.05) };
                    m[(i, j)] += c(re, im);
                    if i != j {
                        m[(j, i)] = m[(i, j)].conj();
                    }
                }
            }
            let proj = project_to_physical(&ComplexMatrix::new(m).unwrap()).unwrap();
            let (vals, _) = proj.matrix().hermitian_eigen();
            assert!(vals.iter().all(|&v| v >= -1e-12));
            assert!((proj.matrix().trace().re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn projection_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(
            2,
            &[c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            project_to_physical(&m),
            Err(TomoError::NonHermitian { .. })
        ));
    }
}
