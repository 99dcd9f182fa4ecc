//! Circle-valued solutions of `Φ_n(S) f = 0` on `Z/m`, where `S` is the cyclic
//! shift. Non-constant solutions exist exactly when the solution group is
//! larger than its constant subgroup.

use super::matrix::smith_normal_form;
use super::poly::cyclotomic;
use super::ToralError;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Structure of `{f : Z/m → T | Φ_n(S) f ≡ 0}` as `T^torus_rank ⊕ ⊕ Z/d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalmosGroup {
    pub n: usize,
    pub m: usize,
    pub torus_rank: usize,
    /// Invariant factors larger than one.
    pub invariants: Vec<BigInt>,
    /// `|Φ_n(1)|`; constants form a circle when this is zero.
    pub constant_order: BigInt,
    pub member: bool,
}

/// Circulant matrix of `Φ_n` acting on functions on `Z/m`.
pub(crate) fn circulant(n: usize, m: usize) -> Vec<Vec<BigInt>> {
    let phi = cyclotomic(n);
    let mut c = vec![vec![BigInt::zero(); m]; m];
    for (x, row) in c.iter_mut().enumerate() {
        for (k, a) in phi.coeffs().iter().enumerate() {
            row[(x + k) % m] += a;
        }
    }
    c
}

pub fn halmos_group(n: usize, m: usize) -> Result<HalmosGroup, ToralError> {
    if n == 0 || m == 0 {
        return Err(ToralError::Parse(format!("orders must be positive (n={n}, m={m})")));
    }
    let smith = smith_normal_form(&circulant(n, m), m);
    let torus_rank = smith.diagonal.iter().filter(|d| d.is_zero()).count();
    let invariants: Vec<BigInt> = smith.diagonal.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
    let constant_order = cyclotomic(n).eval(&BigInt::one()).abs();
    let finite: BigInt = invariants.iter().product();
    let member = match torus_rank {
        0 => finite > constant_order,
        1 if constant_order.is_zero() => finite > BigInt::one(),
        1 => true,
        _ => true,
    };
    Ok(HalmosGroup { n, m, torus_rank, invariants, constant_order, member })
}

/// Whether a non-constant `f : Z/m → T` satisfies `Φ_n(S) f = 0`.
pub fn halmos_membership(n: usize, m: usize) -> Result<bool, ToralError> {
    Ok(halmos_group(n, m)?.member)
}
