//! Dense real-symmetric eigensolver with sorted output and a fixed phase.

use nalgebra::{DMatrix, SymmetricEigen};

/// Eigen-decomposition with eigenvalues ascending and eigenvectors in the
/// matching columns. Each column has its largest-magnitude amplitude positive.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: alloc::vec::Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn symmetric_eigen(m: DMatrix<f64>) -> Eigen {
    let n = m.nrows();
    if n == 0 {
        return Eigen { values: alloc::vec::Vec::new(), vectors: DMatrix::zeros(0, 0) };
    }
    let se = SymmetricEigen::new(m);
    let mut order: alloc::vec::Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = se.eigenvectors.column(src).clone_owned();
        let imax = col.iamax();
        if col[imax] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Eigen { values, vectors }
}
