//! Embedding local operators into a multi-qubit register.
//!
//! Basis-state indices read qubit 0 as the most significant bit, so for a
//! register `q0, q1` the index of `|a b>` is `2a + b`. The first listed
//! target qubit plays the role of the local operator's most significant bit;
//! listing targets in a different order permutes the embedding accordingly.

use super::{ComplexMatrix, MatrixError, MAX_QUBITS};

/// Bit of global index `index` belonging to qubit `qubit` in an `nqubits`
/// register (qubit 0 = most significant).
#[inline]
fn bit_of(index: usize, qubit: usize, nqubits: usize) -> usize {
    (index >> (nqubits - 1 - qubit)) & 1
}

/// Set qubit `qubit`'s bit of `index` to `bit`.
#[inline]
fn with_bit(index: usize, qubit: usize, nqubits: usize, bit: usize) -> usize {
    let mask = 1 << (nqubits - 1 - qubit);
    if bit == 0 {
        index & !mask
    } else {
        index | mask
    }
}

/// Lift `local` (acting on `targets.len()` qubits) to the full register of
/// `nqubits` qubits, acting as the identity elsewhere.
///
/// `targets` are distinct qubit indices; the first one is the local
/// operator's most significant qubit.
pub fn embed(
    local: &ComplexMatrix,
    targets: &[usize],
    nqubits: usize,
) -> Result<ComplexMatrix, MatrixError> {
    if nqubits == 0 || nqubits > MAX_QUBITS {
        return Err(MatrixError::RegisterTooLarge {
            nqubits,
            max: MAX_QUBITS,
        });
    }
    for (pos, &q) in targets.iter().enumerate() {
        if q >= nqubits {
            return Err(MatrixError::TargetOutOfRange { qubit: q, nqubits });
        }
        if targets[..pos].contains(&q) {
            return Err(MatrixError::RepeatedTarget { qubit: q });
        }
    }
    let k = targets.len();
    let local_dim = 1usize << k;
    if local.dim() != local_dim {
        return Err(MatrixError::LocalDimMismatch {
            found: local.dim(),
            expected: local_dim,
            targets: k,
        });
    }

    let dim = 1usize << nqubits;
    let mut out = ComplexMatrix::zeros(dim);
    for j in 0..dim {
        // Local column index: target bits of j, first target most significant.
        let mut col = 0usize;
        for &q in targets {
            col = (col << 1) | bit_of(j, q, nqubits);
        }
        for local_row in 0..local_dim {
            // Global row: j with target bits replaced by local_row's bits.
            let mut i = j;
            for (pos, &q) in targets.iter().enumerate() {
                let bit = (local_row >> (k - 1 - pos)) & 1;
                i = with_bit(i, q, nqubits, bit);
            }
            let entry = local.get(local_row, col);
            if entry.norm_sqr() != 0.0 {
                out.set(i, j, entry);
            }
        }
    }
    Ok(out)
}

/// Projector `|b><b|` on qubit `qubit`, embedded into the register.
pub fn basis_projector_on(
    bit: usize,
    qubit: usize,
    nqubits: usize,
) -> Result<ComplexMatrix, MatrixError> {
    embed(&ComplexMatrix::basis_projector(2, bit), &[qubit], nqubits)
}
