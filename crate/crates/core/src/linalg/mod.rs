mod banded;
pub mod eigen;

pub use banded::{max_abs_commutator, BandedSymmetricMatrix};
pub use eigen::{banded_eigen, dense_symmetric_eigen, fix_sign, tridiagonal_eigen, SymmetricEigen};
