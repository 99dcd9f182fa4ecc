//! Square integer matrices with exact arithmetic.

use super::poly::IntPolynomial;
use super::ToralError;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Square matrix over the integers; acts on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    /// Any square matrix, including the empty `0×0` one.
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self, ToralError> {
        let d = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != d) {
            return Err(ToralError::NotSquare { rows: d, row: bad, len: rows[bad].len() });
        }
        Ok(IntMatrix { rows })
    }

    /// A toral automorphism: square with determinant `±1`.
    pub fn automorphism(rows: Vec<Vec<BigInt>>) -> Result<Self, ToralError> {
        let m = Self::new(rows)?;
        m.ensure_unimodular()?;
        Ok(m)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, ToralError> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
    }

    /// One row per non-empty line, entries separated by whitespace or commas.
    pub fn parse(text: &str) -> Result<Self, ToralError> {
        let rows = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse::<BigInt>().map_err(|_| ToralError::Parse(format!("bad entry `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        if rows.is_empty() {
            return Err(ToralError::Parse("empty matrix".into()));
        }
        Self::new(rows)
    }

    pub fn identity(d: usize) -> Self {
        let mut rows = vec![vec![BigInt::zero(); d]; d];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = BigInt::one();
        }
        IntMatrix { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim();
        let rows = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).fold(BigInt::zero(), |acc, k| acc + &self.rows[i][k] * &other.rows[k][j]))
                    .collect()
            })
            .collect();
        IntMatrix { rows }
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).fold(BigInt::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    fn scaled_add(&self, other: &Self, c: &BigInt) -> Self {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + c * y).collect())
            .collect();
        IntMatrix { rows }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim()).fold(BigInt::zero(), |acc, i| acc + &self.rows[i][i])
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let d = self.dim();
        if d == 0 {
            return BigInt::one();
        }
        let mut m = self.rows.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..d - 1 {
            if m[k][k].is_zero() {
                match (k + 1..d).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[d - 1][d - 1]
    }

    pub fn ensure_unimodular(&self) -> Result<(), ToralError> {
        let det = self.det();
        if det.abs().is_one() {
            Ok(())
        } else {
            Err(ToralError::NotUnimodular { det })
        }
    }

    /// Characteristic polynomial `det(xI − A)` by Faddeev–LeVerrier; every
    /// division by `k` is exact for integer matrices.
    pub fn charpoly(&self) -> IntPolynomial {
        let d = self.dim();
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = BigInt::one();
        let mut m = IntMatrix::identity(d);
        for k in 1..=d {
            let am = self.mul(&m);
            let c = -am.trace() / BigInt::from(k);
            coeffs[d - k] = c.clone();
            m = am.scaled_add(&IntMatrix::identity(d), &c);
        }
        IntPolynomial::new(coeffs)
    }

    /// `p(A)` by Horner's rule.
    pub fn eval_poly(&self, p: &IntPolynomial) -> Self {
        let d = self.dim();
        let id = IntMatrix::identity(d);
        p.coeffs()
            .iter()
            .rev()
            .fold(IntMatrix { rows: vec![vec![BigInt::zero(); d]; d] }, |acc, c| {
                self.mul(&acc).scaled_add(&id, c)
            })
    }

    /// Minimal polynomial: the first linear dependency among `I, A, A², …`.
    pub fn minimal_polynomial(&self) -> IntPolynomial {
        let d = self.dim();
        let flatten = |m: &IntMatrix| -> Vec<BigInt> { m.rows.iter().flatten().cloned().collect() };
        let mut powers = vec![flatten(&IntMatrix::identity(d))];
        let mut current = IntMatrix::identity(d);
        for _ in 0..d {
            current = self.mul(&current);
            let target = flatten(&current);
            if let Some(x) = solve_combination(&powers, &target) {
                let lcm = x.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
                let scale = BigRational::from_integer(lcm.clone());
                let mut coeffs: Vec<BigInt> = x.iter().map(|c| -(c * &scale).to_integer()).collect();
                coeffs.push(lcm);
                return IntPolynomial::new(coeffs).primitive();
            }
            powers.push(target);
        }
        self.charpoly()
    }

    /// `diag(a, b)`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let (p, q) = (a.dim(), b.dim());
        let mut rows = vec![vec![BigInt::zero(); p + q]; p + q];
        for i in 0..p {
            rows[i][..p].clone_from_slice(&a.rows[i]);
        }
        for i in 0..q {
            rows[p + i][p..].clone_from_slice(&b.rows[i]);
        }
        IntMatrix { rows }
    }

    /// Inverse of a unimodular matrix by exact elimination.
    pub fn inverse_unimodular(&self) -> Result<Self, ToralError> {
        self.ensure_unimodular()?;
        let d = self.dim();
        let id = IntMatrix::identity(d);
        let cols: Vec<Vec<BigInt>> = (0..d)
            .map(|j| {
                let e: Vec<BigInt> = (0..d).map(|i| id.rows[i][j].clone()).collect();
                solve_square(self, &e).expect("unimodular matrices are invertible")
            })
            .collect();
        let rows = (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect();
        Ok(IntMatrix { rows })
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = r.iter().map(ToString::to_string).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

fn rat(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Rational coefficients `x` with `Σ x_i vecs_i = target`, if any.
fn solve_combination(vecs: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigRational>> {
    let k = vecs.len();
    let mut aug: Vec<Vec<BigRational>> = (0..target.len())
        .map(|i| {
            let mut row: Vec<BigRational> = vecs.iter().map(|v| rat(&v[i])).collect();
            row.push(rat(&target[i]));
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![BigRational::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][k].clone();
    }
    Some(x)
}

fn solve_square(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let d = a.dim();
    let cols: Vec<Vec<BigInt>> = (0..d).map(|j| (0..d).map(|i| a.rows[i][j].clone()).collect()).collect();
    let x = solve_combination(&cols, b)?;
    x.into_iter().map(|v| v.is_integer().then(|| v.to_integer())).collect()
}

/// Integer basis vectors of the rational kernel of `m` (`m v = 0`).
pub(crate) fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let d = m.dim();
    let mut a: Vec<Vec<BigRational>> = m.rows.iter().map(|r| r.iter().map(rat).collect()).collect();
    let pivots = rref(&mut a);
    (0..d)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); d];
            v[free] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][free].clone();
            }
            let lcm = v.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
            let s = BigRational::from_integer(lcm);
            v.iter().map(|c| (c * &s).to_integer()).collect()
        })
        .collect()
}

/// Smith normal form `U·B·V = D` of a rectangular integer matrix.
pub(crate) struct Smith {
    pub diagonal: Vec<BigInt>,
    /// Inverse of the column transform `V`.
    pub v_inv: Vec<Vec<BigInt>>,
}

pub(crate) fn smith_normal_form(b: &[Vec<BigInt>], cols: usize) -> Smith {
    let rows = b.len();
    let mut m: Vec<Vec<BigInt>> = b.to_vec();
    let mut v_inv: Vec<Vec<BigInt>> = IntMatrix::identity(cols).rows;
    let mut diagonal = Vec::new();

    // Column op col_j += q·col_k on m is row_k −= q·row_j on V⁻¹.
    let col_add = |m: &mut Vec<Vec<BigInt>>, v_inv: &mut Vec<Vec<BigInt>>, j: usize, k: usize, q: &BigInt| {
        for row in m.iter_mut() {
            let t = &row[k] * q;
            row[j] += t;
        }
        let src = v_inv[j].clone();
        for (x, s) in v_inv[k].iter_mut().zip(&src) {
            *x -= q * s;
        }
    };
    let col_swap = |m: &mut Vec<Vec<BigInt>>, v_inv: &mut Vec<Vec<BigInt>>, j: usize, k: usize| {
        for row in m.iter_mut() {
            row.swap(j, k);
        }
        v_inv.swap(j, k);
    };

    for t in 0..rows.min(cols) {
        loop {
            let best = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !m[i][j].is_zero())
                .min_by_key(|&(i, j)| m[i][j].abs());
            let Some((pi, pj)) = best else {
                return finish(v_inv, diagonal, rows, cols);
            };
            m.swap(t, pi);
            col_swap(&mut m, &mut v_inv, t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t].div_floor(&m[t][t]);
                if !q.is_zero() {
                    let pivot_row = m[t].clone();
                    for (x, p) in m[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * p;
                    }
                }
                clean &= m[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = m[t][j].div_floor(&m[t][t]);
                if !q.is_zero() {
                    col_add(&mut m, &mut v_inv, j, t, &-q);
                }
                clean &= m[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !m[i][j].is_multiple_of(&m[t][t]));
            match bad {
                Some((i, _)) => {
                    let src = m[i].clone();
                    for (x, s) in m[t].iter_mut().zip(&src) {
                        *x += s;
                    }
                }
                None => break,
            }
        }
        diagonal.push(m[t][t].abs());
    }
    finish(v_inv, diagonal, rows, cols)
}

fn finish(v_inv: Vec<Vec<BigInt>>, mut diagonal: Vec<BigInt>, rows: usize, cols: usize) -> Smith {
    diagonal.resize(rows.min(cols), BigInt::zero());
    Smith { diagonal, v_inv }
}

/// Basis of `span(basis) ∩ Z^d` for linearly independent integer rows.
pub(crate) fn saturate(basis: &[Vec<BigInt>], d: usize) -> Vec<Vec<BigInt>> {
    if basis.is_empty() {
        return Vec::new();
    }
    let s = smith_normal_form(basis, d);
    s.v_inv.into_iter().take(basis.len()).collect()
}

/// Matrix of `A` restricted to the invariant lattice spanned by `basis`
/// (columns are coordinates of `A·b_j`).
pub(crate) fn restrict(a: &IntMatrix, basis: &[Vec<BigInt>]) -> Result<IntMatrix, ToralError> {
    let k = basis.len();
    let mut rows = vec![vec![BigInt::zero(); k]; k];
    for (j, b) in basis.iter().enumerate() {
        let image = a.apply(b);
        let x = solve_combination(basis, &image)
            .ok_or_else(|| ToralError::Internal("lattice is not invariant".into()))?;
        for (i, c) in x.into_iter().enumerate() {
            if !c.is_integer() {
                return Err(ToralError::Internal("restricted action is not integral".into()));
            }
            rows[i][j] = c.to_integer();
        }
    }
    IntMatrix::new(rows)
}
