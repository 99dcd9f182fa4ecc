//! Toral automorphisms: cyclotomic splitting, quasi-hyperbolicity, entropy,
//! central-spin/skew classification, and the Halmos cyclotomic criterion.

mod halmos;
mod matrix;
mod poly;
mod roots;

pub use halmos::{halmos_group, halmos_membership, HalmosGroup};
pub use matrix::IntMatrix;
pub use poly::{
    cyclotomic, cyclotomic_split, has_cyclotomic_factor, poly_gcd, squarefree_decomposition,
    squarefree_part, totient, unit_circle_root_count, CyclotomicFactor, CyclotomicSplit,
    IntPolynomial,
};
pub use roots::{aberth_roots, certify_roots, eigen_entropy, eigen_entropy_tolerance, toral_entropy, CertifiedRoot};

use num_bigint::BigInt;
use num_traits::Signed;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ToralError {
    #[error("matrix is not square: {rows} rows but row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("determinant {det} is not ±1")]
    NotUnimodular { det: BigInt },
    #[error("factors share gcd {gcd}; the split is inseparable")]
    Inseparable { gcd: String },
    #[error("factor product {product} differs from the characteristic polynomial {charpoly}")]
    NotAFactorization { product: String, charpoly: String },
    #[error("root certification failed at tol {tol:e}: {detail}")]
    Certification { tol: f64, detail: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ToralClass {
    /// Some eigenvalue is a root of unity.
    NotQuasiHyperbolic,
    /// No eigenvalue on the unit circle.
    Hyperbolic,
    /// Unit-circle eigenvalues, all semisimple.
    CentralSpin,
    /// Some unit-circle eigenvalue has a nontrivial Jordan block.
    CentralSkew,
}

impl ToralClass {
    pub fn name(self) -> &'static str {
        match self {
            ToralClass::NotQuasiHyperbolic => "not-quasi-hyperbolic",
            ToralClass::Hyperbolic => "hyperbolic",
            ToralClass::CentralSpin => "central-spin",
            ToralClass::CentralSkew => "central-skew",
        }
    }
}

impl fmt::Display for ToralClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub class: ToralClass,
    pub charpoly: IntPolynomial,
    pub minpoly: IntPolynomial,
    pub split: CyclotomicSplit,
    /// Distinct eigenvalues on the unit circle.
    pub unit_circle_roots: usize,
}

/// No eigenvalue of `a` is a root of unity.
pub fn is_quasi_hyperbolic(a: &IntMatrix) -> Result<bool, ToralError> {
    a.ensure_unimodular()?;
    Ok(!has_cyclotomic_factor(&a.charpoly()))
}

/// Exact classification. Unit-circle roots are counted through the
/// reciprocal/trace substitution; skewness is read off the repeated
/// factors of the minimal polynomial.
pub fn classify(a: &IntMatrix) -> Result<Classification, ToralError> {
    a.ensure_unimodular()?;
    let charpoly = a.charpoly();
    let minpoly = a.minimal_polynomial();
    let split = cyclotomic_split(&charpoly);
    let unit_circle_roots = unit_circle_root_count(&charpoly);
    let class = if !split.g.is_one() {
        ToralClass::NotQuasiHyperbolic
    } else if unit_circle_roots == 0 {
        ToralClass::Hyperbolic
    } else {
        let repeated = squarefree_decomposition(&minpoly)
            .iter()
            .skip(1)
            .fold(IntPolynomial::one(), |acc, s| &acc * s);
        if unit_circle_root_count(&repeated) > 0 {
            ToralClass::CentralSkew
        } else {
            ToralClass::CentralSpin
        }
    };
    Ok(Classification { class, charpoly, minpoly, split, unit_circle_roots })
}

/// `Z^d` split along a coprime factorization of the characteristic polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitAction {
    pub first_factor: IntPolynomial,
    pub second_factor: IntPolynomial,
    /// Action on the saturated lattice `ker first(A) ∩ Z^d`.
    pub first: IntMatrix,
    /// Action on `ker second(A) ∩ Z^d`.
    pub second: IntMatrix,
    /// Lattice bases as rows: first lattice, then second.
    pub basis: Vec<Vec<BigInt>>,
    /// Index of the sum of the two lattices in `Z^d`.
    pub index: BigInt,
}

/// Splits along `charpoly = first · second` with coprime factors.
pub fn split_along(
    a: &IntMatrix,
    first: &IntPolynomial,
    second: &IntPolynomial,
) -> Result<SplitAction, ToralError> {
    a.ensure_unimodular()?;
    let charpoly = a.charpoly();
    let product = first * second;
    if product != charpoly && product != -&charpoly {
        return Err(ToralError::NotAFactorization {
            product: product.to_string(),
            charpoly: charpoly.to_string(),
        });
    }
    let gcd = poly_gcd(first, second);
    if gcd.degree() > 0 {
        return Err(ToralError::Inseparable { gcd: gcd.to_string() });
    }
    let d = a.dim();
    let lattice = |p: &IntPolynomial| -> Result<(Vec<Vec<BigInt>>, IntMatrix), ToralError> {
        let kernel = matrix::kernel_basis(&a.eval_poly(p));
        if kernel.len() != p.degree() {
            return Err(ToralError::Internal(format!(
                "kernel of {p} has dimension {} not {}",
                kernel.len(),
                p.degree()
            )));
        }
        let basis = matrix::saturate(&kernel, d);
        let action = matrix::restrict(a, &basis)?;
        Ok((basis, action))
    };
    let (b1, m1) = lattice(first)?;
    let (b2, m2) = lattice(second)?;
    let basis: Vec<Vec<BigInt>> = b1.into_iter().chain(b2).collect();
    let index = IntMatrix::new(basis.clone())?.det().abs();
    Ok(SplitAction {
        first_factor: first.clone(),
        second_factor: second.clone(),
        first: m1,
        second: m2,
        basis,
        index,
    })
}

/// Splits `A` into its quasi-hyperbolic part (first) and its
/// finite-order-eigenvalue part (second).
pub fn split_action(a: &IntMatrix) -> Result<SplitAction, ToralError> {
    a.ensure_unimodular()?;
    let split = cyclotomic_split(&a.charpoly());
    if split.gcd.degree() > 0 {
        return Err(ToralError::Inseparable { gcd: split.gcd.to_string() });
    }
    split_along(a, &split.h, &split.g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows).unwrap()
    }

    fn salem_companion() -> IntMatrix {
        m(&[&[0, 0, 0, -1], &[1, 0, 0, 1], &[0, 1, 0, 1], &[0, 0, 1, 1]])
    }

    fn skew_block() -> IntMatrix {
        let c = salem_companion();
        let mut rows = vec![vec![BigInt::from(0); 8]; 8];
        for i in 0..4 {
            for j in 0..4 {
                rows[i][j] = c.get(i, j).clone();
                rows[4 + i][4 + j] = c.get(i, j).clone();
            }
            rows[i][4 + i] = BigInt::from(1);
        }
        IntMatrix::new(rows).unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&m(&[&[2, 1], &[1, 1]])).unwrap().class, ToralClass::Hyperbolic);
        assert_eq!(classify(&salem_companion()).unwrap().class, ToralClass::CentralSpin);
        assert_eq!(classify(&skew_block()).unwrap().class, ToralClass::CentralSkew);
        assert_eq!(classify(&m(&[&[0, -1], &[1, 0]])).unwrap().class, ToralClass::NotQuasiHyperbolic);
        let both = IntMatrix::block_diag(&salem_companion(), &salem_companion());
        assert_eq!(classify(&both).unwrap().class, ToralClass::CentralSpin);
    }

    #[test]
    fn quasi_hyperbolic_predicate() {
        assert!(is_quasi_hyperbolic(&salem_companion()).unwrap());
        assert!(!is_quasi_hyperbolic(&m(&[&[1, 1], &[0, 1]])).unwrap());
        assert!(is_quasi_hyperbolic(&m(&[&[2, 0], &[0, 1]])).is_err());
    }

    #[test]
    fn split_of_mixed_matrix() {
        let rot3 = m(&[&[0, -1], &[1, -1]]);
        let a = IntMatrix::block_diag(&rot3, &m(&[&[2, 1], &[1, 1]]));
        let s = split_action(&a).unwrap();
        assert_eq!(s.second.charpoly(), cyclotomic(3));
        assert_eq!(s.first.charpoly(), IntPolynomial::from_i64(&[1, -3, 1]));
        assert_eq!(s.index, BigInt::from(1));
    }

    #[test]
    fn split_survives_unimodular_conjugation() {
        let rot3 = m(&[&[0, -1], &[1, -1]]);
        let a = IntMatrix::block_diag(&rot3, &m(&[&[2, 1], &[1, 1]]));
        let p = m(&[&[1, 2, 0, 1], &[0, 1, 1, 0], &[0, 0, 1, 3], &[0, 0, 0, 1]]);
        let conj = p.mul(&a).mul(&p.inverse_unimodular().unwrap());
        let s = split_action(&conj).unwrap();
        assert_eq!(s.second.charpoly(), cyclotomic(3));
        assert_eq!(s.first.charpoly(), IntPolynomial::from_i64(&[1, -3, 1]));
        assert_eq!(s.index, BigInt::from(1));
    }

    #[test]
    fn split_with_finite_index() {
        let a = m(&[&[1, 1], &[0, -1]]);
        let s = split_along(&a, &cyclotomic(1), &cyclotomic(2)).unwrap();
        assert_eq!(s.index, BigInt::from(2));
        assert_eq!(s.first, m(&[&[1]]));
        assert_eq!(s.second, m(&[&[-1]]));
    }

    #[test]
    fn cyclotomic_pieces_split_further() {
        let a = IntMatrix::block_diag(&m(&[&[0, -1], &[1, -1]]), &m(&[&[0, -1], &[1, 1]]));
        let whole = split_action(&a).unwrap();
        assert_eq!(whole.first.dim(), 0);
        assert_eq!(whole.second.dim(), 4);
        let s = split_along(&a, &cyclotomic(3), &cyclotomic(6)).unwrap();
        assert_eq!(s.first.charpoly(), cyclotomic(3));
        assert_eq!(s.second.charpoly(), cyclotomic(6));
        assert!(toral_entropy(&s.first, 1e-12).unwrap().abs() < 1e-12);
    }

    #[test]
    fn shared_factor_is_inseparable() {
        let a = IntMatrix::identity(2);
        let err = split_along(&a, &cyclotomic(1), &cyclotomic(1)).unwrap_err();
        assert!(matches!(err, ToralError::Inseparable { .. }));
        let err = split_along(&a, &cyclotomic(1), &cyclotomic(2)).unwrap_err();
        assert!(matches!(err, ToralError::NotAFactorization { .. }));
    }
}
