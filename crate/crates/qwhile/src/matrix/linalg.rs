//! Hermitian eigendecomposition, the Löwner order, and spectral clamping.

use super::{ComplexMatrix, MatrixError};

/// Eigenvalues closer than this are merged into one spectral projector.
pub const CLUSTER_SPACING: f64 = 1e-8;

/// One (possibly degenerate) eigenspace of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralProjector {
    /// Representative eigenvalue (mean of the clustered values).
    pub value: f64,
    /// Number of eigenvalues merged into this cluster.
    pub multiplicity: usize,
    /// Orthogonal projector onto the eigenspace.
    pub projector: ComplexMatrix,
}

/// Full spectral data of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// All eigenvalues with multiplicity, ascending.
    pub eigenvalues: Vec<f64>,
    /// Spectral projectors for eigenvalue clusters, ascending by value.
    /// Nearly equal eigenvalues share one projector, so the projectors sum
    /// to the identity and are mutually orthogonal even under degeneracy.
    pub clusters: Vec<SpectralProjector>,
}

impl EigenDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Rebuild the matrix as `sum_k value_k * projector_k`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.clusters[0].projector.dim();
        let mut acc = ComplexMatrix::zeros(dim);
        for cluster in &self.clusters {
            acc = acc
                .add(&cluster.projector.scale_re(cluster.value))
                .expect("projectors share the matrix dimension");
        }
        acc
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Rejects input whose hermiticity violation exceeds `herm_tol`, naming the
/// offending entry; otherwise works on the Hermitian part so roundoff on the
/// order of the tolerance cannot leak into the spectrum.
pub fn eigh(matrix: &ComplexMatrix, herm_tol: f64) -> Result<EigenDecomposition, MatrixError> {
    matrix.require_hermitian(herm_tol)?;
    let sym = matrix.hermitize();
    let se = sym.inner().clone().symmetric_eigen();

    let dim = matrix.dim();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();

    let mut clusters = Vec::new();
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        // Chain-cluster: consecutive gaps below the spacing stay together.
        while end < dim && eigenvalues[end] - eigenvalues[end - 1] <= CLUSTER_SPACING {
            end += 1;
        }
        let mut projector = ComplexMatrix::zeros(dim);
        for &pos in &order[start..end] {
            let v = se.eigenvectors.column(pos);
            let rank_one = ComplexMatrix::from_fn(dim, |i, j| v[i] * v[j].conj());
            projector = projector.add(&rank_one).expect("same dim");
        }
        clusters.push(SpectralProjector {
            value: eigenvalues[start..end].iter().sum::<f64>() / (end - start) as f64,
            multiplicity: end - start,
            projector: projector.hermitize(),
        });
        start = end;
    }

    Ok(EigenDecomposition {
        eigenvalues,
        clusters,
    })
}

/// Smallest eigenvalue of the Hermitian part of `matrix`.
pub fn min_eigenvalue(matrix: &ComplexMatrix, herm_tol: f64) -> Result<f64, MatrixError> {
    Ok(eigh(matrix, herm_tol)?.min_eigenvalue())
}

/// Outcome of a Löwner-order comparison.
#[derive(Debug, Clone, Copy)]
pub struct OrderCheck {
    /// Whether the ordering holds at the given tolerance.
    pub holds: bool,
    /// Smallest eigenvalue of the (hermitized) difference. Positive margins
    /// mean the ordering holds strictly; values above `-psd_tol` still pass.
    pub margin: f64,
}

/// Check `lhs <= rhs` in the Löwner order: `rhs - lhs` must be positive
/// semidefinite up to `psd_tol`.
///
/// The difference is hermitized before the spectrum is taken, so tiny
/// anti-Hermitian noise from upstream arithmetic does not poison the check.
pub fn loewner_leq(
    lhs: &ComplexMatrix,
    rhs: &ComplexMatrix,
    psd_tol: f64,
) -> Result<OrderCheck, MatrixError> {
    let diff = rhs.sub(lhs)?.hermitize();
    let decomp = eigh(&diff, f64::INFINITY)?;
    let margin = decomp.min_eigenvalue();
    Ok(OrderCheck {
        holds: margin >= -psd_tol,
        margin,
    })
}

/// Positive part `A^+`: clamp negative eigenvalues of the Hermitian part to
/// zero and rebuild. This realizes the conjunction `M & N = (M + N - I)^+`
/// used for predicate reasoning.
pub fn positive_part(matrix: &ComplexMatrix, herm_tol: f64) -> Result<ComplexMatrix, MatrixError> {
    let decomp = eigh(matrix, herm_tol)?;
    let dim = matrix.dim();
    let mut acc = ComplexMatrix::zeros(dim);
    for cluster in &decomp.clusters {
        if cluster.value > 0.0 {
            acc = acc
                .add(&cluster.projector.scale_re(cluster.value))
                .expect("same dim");
        }
    }
    Ok(acc.hermitize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap()
    }

    #[test]
    fn pauli_x_spectrum() {
        let d = eigh(&pauli_x(), 1e-10).unwrap();
        assert_eq!(d.eigenvalues.len(), 2);
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-12);
        // Eigenprojectors of X are (I -+ X) / 2.
        let minus = ComplexMatrix::from_row_major(
            2,
            &[c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        let plus = ComplexMatrix::from_row_major(
            2,
            &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        assert!(d.clusters[0].projector.approx_eq(&minus, 1e-12));
        assert!(d.clusters[1].projector.approx_eq(&plus, 1e-12));
    }

    #[test]
    fn identity_is_one_degenerate_cluster() {
        let d = eigh(&ComplexMatrix::identity(2), 1e-10).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 1.0]);
        assert_eq!(d.clusters.len(), 1);
        assert_eq!(d.clusters[0].multiplicity, 2);
        assert!(d.clusters[0]
            .projector
            .approx_eq(&ComplexMatrix::identity(2), 1e-12));
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_major(
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            eigh(&m, 1e-10),
            Err(MatrixError::NotHermitian { .. })
        ));
    }

    #[test]
    fn loewner_order_on_diagonal_matrices() {
        let a = ComplexMatrix::from_row_major(2, &[c(0.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.7, 0.0)])
            .unwrap();
        let id = ComplexMatrix::identity(2);
        let up = loewner_leq(&a, &id, 1e-9).unwrap();
        assert!(up.holds);
        assert!((up.margin - 0.3).abs() < 1e-12);
        let down = loewner_leq(&id, &a, 1e-9).unwrap();
        assert!(!down.holds);
        assert!((down.margin + 0.8).abs() < 1e-12);
    }

    #[test]
    fn positive_part_clamps_negative_branch() {
        // X has spectrum {-1, +1}; X^+ is the +1 eigenprojector.
        let xp = positive_part(&pauli_x(), 1e-10).unwrap();
        let plus = ComplexMatrix::from_row_major(
            2,
            &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        assert!(xp.approx_eq(&plus, 1e-12));
    }

    #[test]
    fn reconstruct_matches_input() {
        let m = ComplexMatrix::from_row_major(
            2,
            &[c(1.0, 0.0), c(0.25, -0.5), c(0.25, 0.5), c(-2.0, 0.0)],
        )
        .unwrap();
        let d = eigh(&m, 1e-10).unwrap();
        assert!(d.reconstruct().approx_eq(&m, 1e-12));
    }
}
