use nalgebra::DMatrix;

use super::object::SymMatrix;
use crate::error::{IfrError, Result};
use crate::linalg::sym_eigenvalues;

/// Algebraic connectivity of the graph whose adjacency is `(Y − I)₊`.
pub fn fiedler_value(corr: &SymMatrix) -> f64 {
    fiedler_from_dense(&corr.to_dmatrix())
}

/// [`fiedler_value`] for a dense matrix that has not been validated yet.
pub fn fiedler_value_dense(y: &DMatrix<f64>) -> Result<f64> {
    if y.nrows() != y.ncols() {
        return Err(IfrError::Dimension(format!(
            "Fiedler value needs a square matrix, got {}x{}",
            y.nrows(),
            y.ncols()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(IfrError::InvalidInput("matrix has non-finite entries".into()));
    }
    Ok(fiedler_from_dense(y))
}

fn fiedler_from_dense(y: &DMatrix<f64>) -> f64 {
    let r = y.nrows();
    if r < 2 {
        return 0.0;
    }
    let mut lap = DMatrix::<f64>::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            if i != j {
                let a = (0.5 * (y[(i, j)] + y[(j, i)])).max(0.0);
                lap[(i, j)] = -a;
                lap[(i, i)] += a;
            }
        }
    }
    let eig = sym_eigenvalues(&lap);
    eig[1].max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_spaces::MatrixConstraint;

    fn corr(dim: usize, entries: Vec<f64>) -> SymMatrix {
        SymMatrix::new(dim, entries, MatrixConstraint::Correlation).unwrap()
    }

    #[test]
    fn identity_has_zero_connectivity() {
        let id = corr(3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(fiedler_value(&id), 0.0);
    }

    #[test]
    fn complete_graph_on_three_nodes() {
        let k3 = corr(3, vec![1.0; 9]);
        assert!((fiedler_value(&k3) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_node_closed_form() {
        for w in [0.1, 0.5, 1.0] {
            let m = corr(2, vec![1.0, w, w, 1.0]);
            assert!((fiedler_value(&m) - 2.0 * w).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_correlations_are_not_edges() {
        let m = corr(2, vec![1.0, -0.4, -0.4, 1.0]);
        assert_eq!(fiedler_value(&m), 0.0);
    }

    #[test]
    fn non_square_is_rejected() {
        let m = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(fiedler_value_dense(&m), Err(IfrError::Dimension(_))));
    }
}
