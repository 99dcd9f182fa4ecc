//! Root isolation and entropy of toral automorphisms.

use super::matrix::IntMatrix;
use super::poly::{squarefree_decomposition, IntPolynomial};
use super::ToralError;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;

/// An approximate root with a disk guaranteed to hold exactly one true root.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifiedRoot {
    pub center: Complex64,
    pub radius: f64,
}

fn coeffs_f64(p: &IntPolynomial) -> Vec<f64> {
    p.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dv = dv * z + v;
        v = v * z + a;
    }
    (v, dv)
}

/// Running bound on the rounding error of Horner evaluation at `|z|`.
fn horner_error(c: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    let n = c.len() as f64;
    let mag = c.iter().rev().fold(0.0, |acc, &a| acc * r + a.abs());
    4.0 * n * f64::EPSILON * mag
}

/// All roots of a squarefree polynomial by Aberth–Ehrlich iteration.
pub fn aberth_roots(p: &IntPolynomial) -> Vec<Complex64> {
    let c = coeffs_f64(p);
    let n = p.degree();
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n].abs();
    let cauchy = 1.0 + c[..n].iter().map(|a| a.abs() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(0.5 * cauchy, theta)
        })
        .collect();
    for _ in 0..1000 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (v, dv) = horner(&c, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            worst = worst.max(step.norm() / z[i].norm().max(1.0));
        }
        if worst < 1e-15 {
            break;
        }
    }
    z
}

/// Inclusion disks `|z − z_i| ≤ n·|p(z_i)| / |lead · ∏_{j≠i} (z_i − z_j)|`;
/// pairwise disjoint disks each hold exactly one root.
pub fn certify_roots(p: &IntPolynomial, approx: &[Complex64]) -> Option<Vec<CertifiedRoot>> {
    let c = coeffs_f64(p);
    let n = approx.len();
    let lead = *c.last()?;
    let roots: Vec<CertifiedRoot> = (0..n)
        .map(|i| {
            let (v, _) = horner(&c, approx[i]);
            let denom: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (approx[i] - approx[j]).norm())
                .product::<f64>()
                * lead.abs();
            let radius = n as f64 * (v.norm() + horner_error(&c, approx[i])) / denom;
            CertifiedRoot { center: approx[i], radius: radius * (1.0 + 1e-9) }
        })
        .collect();
    let disjoint = (0..n).all(|i| {
        (i + 1..n).all(|j| (roots[i].center - roots[j].center).norm() > roots[i].radius + roots[j].radius)
    });
    (disjoint && roots.iter().all(|r| r.radius.is_finite())).then_some(roots)
}

/// Entropy `Σ log max(1, |λ|)` over eigenvalues with multiplicity, from
/// certified roots of the squarefree factors of the characteristic polynomial.
/// Fails when some root cannot be pinned to within `tol / deg`.
pub fn toral_entropy(a: &IntMatrix, tol: f64) -> Result<f64, ToralError> {
    a.ensure_unimodular()?;
    if !(tol > 0.0) {
        return Err(ToralError::Certification { tol, detail: "tolerance must be positive".into() });
    }
    let f = a.charpoly();
    let per_root = tol / f.degree().max(1) as f64;
    let mut total = 0.0;
    for (i, s) in squarefree_decomposition(&f).iter().enumerate() {
        if s.degree() == 0 {
            continue;
        }
        let approx = aberth_roots(s);
        let roots = certify_roots(s, &approx).ok_or_else(|| ToralError::Certification {
            tol,
            detail: format!("inclusion disks overlap for factor {s}"),
        })?;
        if let Some(r) = roots.iter().find(|r| r.radius > per_root) {
            return Err(ToralError::Certification {
                tol,
                detail: format!("root {:.6} only pinned to radius {:.3e}", r.center, r.radius),
            });
        }
        let mult = (i + 1) as f64;
        total += mult * roots.iter().map(|r| r.center.norm().ln().max(0.0)).sum::<f64>();
    }
    Ok(total)
}

/// Entropy from floating-point eigenvalues (Schur decomposition); a cross-check.
pub fn eigen_entropy(a: &IntMatrix) -> f64 {
    let d = a.dim();
    if d == 0 {
        return 0.0;
    }
    let m = DMatrix::from_fn(d, d, |i, j| a.get(i, j).to_f64().unwrap_or(f64::NAN));
    m.complex_eigenvalues().iter().map(|l| l.norm().ln().max(0.0)).sum()
}

/// Expected absolute accuracy of [`eigen_entropy`]. A Jordan block of size
/// `k` moves its eigenvalue by roughly the `k`-th root of the backward error.
pub fn eigen_entropy_tolerance(a: &IntMatrix) -> f64 {
    let d = a.dim();
    if d == 0 {
        return 0.0;
    }
    let norm = (0..d)
        .map(|i| (0..d).map(|j| a.get(i, j).to_f64().map_or(f64::INFINITY, f64::abs)).sum::<f64>())
        .fold(0.0, f64::max);
    let largest_block = squarefree_decomposition(&a.minimal_polynomial()).len().max(1);
    let backward = 64.0 * d as f64 * f64::EPSILON * (1.0 + norm);
    d as f64 * backward.powf(1.0 / largest_block as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows).unwrap()
    }

    #[test]
    fn defective_matrix_tolerance_covers_eigen_error() {
        let a = m(&[&[1, 2, 4], &[0, 1, 2], &[0, 0, 1]]).mul(&m(&[&[1, 0, 0], &[2, 1, 0], &[0, 2, 1]]));
        let h = toral_entropy(&a, 1e-12).unwrap();
        assert!((h - eigen_entropy(&a)).abs() <= eigen_entropy_tolerance(&a));
        let unipotent = m(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        assert_eq!(toral_entropy(&unipotent, 1e-12).unwrap(), 0.0);
        assert!(eigen_entropy(&unipotent) <= eigen_entropy_tolerance(&unipotent));
        assert!(eigen_entropy_tolerance(&m(&[&[2, 1], &[1, 1]])) < 1e-11);
    }

    #[test]
    fn cat_map_entropy_is_log_golden_ratio_squared() {
        let h = toral_entropy(&m(&[&[2, 1], &[1, 1]]), 1e-12).unwrap();
        let expected = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((h - expected).abs() < 1e-12, "{h} vs {expected}");
    }

    #[test]
    fn finite_order_map_has_zero_entropy() {
        let rot = m(&[&[0, -1], &[1, 0]]);
        assert!(toral_entropy(&rot, 1e-12).unwrap().abs() < 1e-12);
        let jordan = m(&[&[1, 1], &[0, 1]]);
        assert!(toral_entropy(&jordan, 1e-12).unwrap().abs() < 1e-12);
    }

    #[test]
    fn salem_companion_matches_eigenvalues() {
        let a = m(&[&[0, 0, 0, -1], &[1, 0, 0, 1], &[0, 1, 0, 1], &[0, 0, 1, 1]]);
        let h = toral_entropy(&a, 1e-12).unwrap();
        assert!((h - eigen_entropy(&a)).abs() < 1e-9);
        assert!((h - 1.722_083_805_739_043_3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn repeated_factor_doubles_entropy() {
        let cat = m(&[&[2, 1], &[1, 1]]);
        let double = IntMatrix::block_diag(&cat, &cat);
        let h1 = toral_entropy(&cat, 1e-12).unwrap();
        let h2 = toral_entropy(&double, 1e-12).unwrap();
        assert!((h2 - 2.0 * h1).abs() < 1e-11);
    }

    #[test]
    fn rejects_non_unimodular_and_bad_tolerance() {
        assert!(matches!(toral_entropy(&m(&[&[2, 0], &[0, 1]]), 1e-9), Err(ToralError::NotUnimodular { .. })));
        assert!(matches!(
            toral_entropy(&m(&[&[2, 1], &[1, 1]]), 0.0),
            Err(ToralError::Certification { .. })
        ));
    }

    #[test]
    fn disks_contain_exact_roots() {
        let p = IntPolynomial::from_i64(&[-1, -1, 1]);
        let roots = certify_roots(&p, &aberth_roots(&p)).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        for exact in [phi, 1.0 - phi] {
            assert!(roots.iter().any(|r| (r.center - exact).norm() <= r.radius.max(1e-15)));
        }
    }
}
