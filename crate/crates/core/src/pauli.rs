//! Pauli index words and their matrix realizations.
//!
//! Index convention: 0 = identity, 1 = X, 2 = Y, 3 = Z. Qubit 0 is the
//! leftmost tensor factor and the most significant bit of outcome indices.
//! The Y matrix is oriented so that right-circular polarization carries
//! eigenvalue +1, matching the detector convention (transmission = +1); this
//! is a relabeling of the y axis and keeps every expansion/extraction pair in
//! the crate mutually consistent.

use crate::linalg::{tensor_product, ComplexMatrix, C64};

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Single-qubit sigma matrix for index 0..=3.
pub fn sigma(index: u8) -> ComplexMatrix {
    let entries: [C64; 4] = match index {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, I, -I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("pauli index out of range: {index}"),
    };
    ComplexMatrix::from_row_slice(2, &entries).expect("static sigma is valid")
}

/// A word (i_1, ..., i_n) over pauli indices {0,1,2,3}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord(pub Vec<u8>);

impl PauliWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&i| i == 0)
    }

    /// Flat base-4 index with qubit 0 most significant.
    pub fn flat_index(&self) -> usize {
        self.0.iter().fold(0usize, |acc, &i| acc * 4 + i as usize)
    }

    /// Inverse of `flat_index`.
    pub fn from_flat_index(n_qubits: usize, mut index: usize) -> Self {
        let mut word = vec![0u8; n_qubits];
        for j in (0..n_qubits).rev() {
            word[j] = (index % 4) as u8;
            index /= 4;
        }
        PauliWord(word)
    }

    /// Bitmask over outcome bits (MSB = qubit 0) marking non-identity
    /// positions; drives the ±1 sign patterns of the S-value extraction.
    pub fn outcome_mask(&self) -> usize {
        let n = self.len();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &i)| i != 0)
            .fold(0usize, |m, (j, _)| m | (1 << (n - 1 - j)))
    }

    /// Dense matrix of the full tensor-product word.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut out = sigma(self.0[0]);
        for &i in &self.0[1..] {
            out = tensor_product(&out, &sigma(i));
        }
        out
    }

    /// Sparse entries of the word matrix. Every sigma word has exactly one
    /// nonzero per row: column = row XOR flip-mask, where X and Y flip the
    /// qubit's bit. Values are products of {±1, ±i}.
    pub fn entries(&self) -> Vec<(usize, usize, C64)> {
        let n = self.len();
        let dim = 1usize << n;
        let mut flip = 0usize;
        for (j, &i) in self.0.iter().enumerate() {
            if i == 1 || i == 2 {
                flip |= 1 << (n - 1 - j);
            }
        }
        let mut out = Vec::with_capacity(dim);
        for row in 0..dim {
            let col = row ^ flip;
            let mut val = ONE;
            for (j, &i) in self.0.iter().enumerate() {
                let bit = (row >> (n - 1 - j)) & 1;
                val *= match (i, bit) {
                    (0, _) | (1, _) => ONE,
                    // sigma(2) = [[0, i], [-i, 0]]: row 0 entry i, row 1 entry -i
                    (2, 0) => I,
                    (2, 1) => -I,
                    (3, 0) => ONE,
                    (3, 1) => -ONE,
                    _ => unreachable!(),
                };
            }
            out.push((row, col, val));
        }
        out
    }
}

/// All 4^n words in flat-index order.
pub fn all_words(n_qubits: usize) -> impl Iterator<Item = PauliWord> {
    let total = 1usize << (2 * n_qubits);
    (0..total).map(move |k| PauliWord::from_flat_index(n_qubits, k))
}
