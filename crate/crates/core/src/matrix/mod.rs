//! Dense matrices over `Z/l^N` with the operations the random models need:
//! Smith normal form over this local principal ideal ring, cokernel
//! structure with the induced action of a commuting endomorphism, uniform
//! random matrices, and uniform sampling from `Sp_2g` and its
//! multiplier-`q` coset.

mod snf;
mod symplectic;

pub use snf::{cokernel_structure, cokernel_with_action, smith_normal_form, CokernelAction, SnfResult};
pub use symplectic::{gsp_coset_sample, random_symplectic, SymplecticError, SymplecticSpace};

use crate::ring::{Poly, PrimePower};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Row-major matrix with entries reduced mod `l^N`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub modulus: PrimePower,
    pub entries: Vec<u64>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} mod {:?}", self.rows, self.cols, self.modulus)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.entries[i * self.cols..(i + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl Mat {
    pub fn zero(rows: usize, cols: usize, modulus: PrimePower) -> Self {
        Self { rows, cols, modulus, entries: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, modulus: PrimePower) -> Self {
        let mut m = Self::zero(n, n, modulus);
        for i in 0..n {
            m[(i, i)] = 1 % modulus.modulus();
        }
        m
    }

    pub fn from_rows(rows: &[&[i64]], modulus: PrimePower) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            entries.extend(row.iter().map(|&x| modulus.reduce_i128(x as i128)));
        }
        Self { rows: r, cols: c, modulus, entries }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows, self.modulus);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.modulus, other.modulus);
        let m = self.modulus.modulus() as u128;
        let mut out = Self::zero(self.rows, other.cols, self.modulus);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                let a = a as u128;
                for j in 0..other.cols {
                    let t = out[(i, j)] as u128 + a * other[(k, j)] as u128 % m;
                    out[(i, j)] = (t % m) as u64;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, &b) in out.entries.iter_mut().zip(&other.entries) {
            *a = self.modulus.add(*a, b);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, &b) in out.entries.iter_mut().zip(&other.entries) {
            *a = self.modulus.sub(*a, b);
        }
        out
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = self.modulus.mul(*a, c);
        }
        out
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        let m = self.modulus.modulus() as u128;
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u128;
                for j in 0..self.cols {
                    acc = (acc + self[(i, j)] as u128 * v[j] as u128) % m;
                }
                acc as u64
            })
            .collect()
    }

    /// Evaluates `P(self)` by Horner's rule; requires a square matrix.
    pub fn eval_poly(&self, p: &Poly) -> Self {
        assert!(self.is_square());
        let n = self.rows;
        let mut acc = Mat::zero(n, n, self.modulus);
        for &c in p.coeffs.iter().rev() {
            acc = acc.mul(self);
            for i in 0..n {
                acc[(i, i)] = self.modulus.add(acc[(i, i)], c);
            }
        }
        acc
    }

    /// Rank of the reduction mod `l`, by Gaussian elimination over `F_l`.
    pub fn rank_mod_ell(&self) -> usize {
        let ell = self.modulus.ell();
        let mut a: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(|&x| x % ell).collect())
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&r| a[r][col] != 0) else {
                continue;
            };
            a.swap(rank, piv);
            let inv = inv_mod_prime(a[rank][col], ell);
            for x in a[rank].iter_mut() {
                *x = *x * inv % ell;
            }
            for r in 0..self.rows {
                if r != rank && a[r][col] != 0 {
                    let f = a[r][col];
                    for c in 0..self.cols {
                        let sub = f * a[rank][c] % ell;
                        a[r][c] = (a[r][c] + ell - sub) % ell;
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// A square matrix over the local ring is invertible iff it is
    /// invertible mod `l`.
    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank_mod_ell() == self.rows
    }

    /// Inverse of an invertible matrix, by Gauss-Jordan elimination with
    /// unit pivots (always available over the local ring).
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let pp = self.modulus;
        let mut a = self.clone();
        let mut inv = Mat::identity(n, pp);
        for col in 0..n {
            let piv = (col..n).find(|&r| pp.is_unit(a[(r, col)]))?;
            if piv != col {
                for j in 0..n {
                    a.entries.swap(col * n + j, piv * n + j);
                    inv.entries.swap(col * n + j, piv * n + j);
                }
            }
            let f = pp.inverse(a[(col, col)]).unwrap();
            for j in 0..n {
                a[(col, j)] = pp.mul(a[(col, j)], f);
                inv[(col, j)] = pp.mul(inv[(col, j)], f);
            }
            for r in 0..n {
                if r != col && a[(r, col)] != 0 {
                    let f = a[(r, col)];
                    for j in 0..n {
                        let s = pp.mul(f, a[(col, j)]);
                        a[(r, j)] = pp.sub(a[(r, j)], s);
                        let s = pp.mul(f, inv[(col, j)]);
                        inv[(r, j)] = pp.sub(inv[(r, j)], s);
                    }
                }
            }
        }
        Some(inv)
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = u64;
    fn index(&self, (i, j): (usize, usize)) -> &u64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u64 {
        &mut self.entries[i * self.cols + j]
    }
}

fn inv_mod_prime(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Uniform random matrix: i.i.d. uniform entries, which is exactly Haar on
/// `End((Z/l^N)^n)`.
pub fn random_matrix<R: Rng + ?Sized>(n: usize, modulus: PrimePower, rng: &mut R) -> Mat {
    random_matrix_rect(n, n, modulus, rng)
}

pub fn random_matrix_rect<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    modulus: PrimePower,
    rng: &mut R,
) -> Mat {
    let m = modulus.modulus();
    let entries = (0..rows * cols).map(|_| rng.random_range(0..m)).collect();
    Mat { rows, cols, modulus, entries }
}
