//! Maps between shaped groups, stored as dense matrices with row `i`
//! reduced mod `l^{tgt[i]}`. Arithmetic may use any lifts: well-definedness
//! of the maps makes the reduced results independent of the choice.

use super::pow;

pub fn is_well_defined(tgt: &[u32], src: &[u32], entries: &[Vec<u64>], ell: u64) -> bool {
    entries.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, &x)| {
            let need = tgt[i].saturating_sub(src[j]);
            x % pow(ell, need) == 0
        })
    })
}

pub fn identity(partition: &[u32]) -> Vec<Vec<u64>> {
    (0..partition.len())
        .map(|i| (0..partition.len()).map(|j| u64::from(i == j)).collect())
        .collect()
}

pub fn is_zero(tgt: &[u32], entries: &[Vec<u64>], ell: u64) -> bool {
    entries
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().all(|&x| x % pow(ell, tgt[i]) == 0))
}

/// `a o b` where `b: src -> mid` and `a: mid -> tgt`.
pub fn compose(tgt: &[u32], a: &[Vec<u64>], b: &[Vec<u64>], ell: u64) -> Vec<Vec<u64>> {
    let rows = a.len();
    let mid = b.len();
    let cols = if mid == 0 { 0 } else { b[0].len() };
    (0..rows)
        .map(|i| {
            let mi = pow(ell, tgt[i]) as u128;
            (0..cols)
                .map(|k| {
                    let mut acc: u128 = 0;
                    for j in 0..mid {
                        acc = (acc + a[i][j] as u128 * b[j][k] as u128) % mi;
                    }
                    acc as u64
                })
                .collect()
        })
        .collect()
}

pub fn add(tgt: &[u32], a: &[Vec<u64>], b: &[Vec<u64>], ell: u64) -> Vec<Vec<u64>> {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (ra, rb))| {
            let mi = pow(ell, tgt[i]);
            ra.iter().zip(rb).map(|(&x, &y)| ((x as u128 + y as u128) % mi as u128) as u64).collect()
        })
        .collect()
}

pub fn scale(tgt: &[u32], a: &[Vec<u64>], c: u64, ell: u64) -> Vec<Vec<u64>> {
    a.iter()
        .enumerate()
        .map(|(i, row)| {
            let mi = pow(ell, tgt[i]) as u128;
            row.iter().map(|&x| ((x as u128 * c as u128) % mi) as u64).collect()
        })
        .collect()
}

pub fn apply(tgt: &[u32], entries: &[Vec<u64>], v: &[u64], ell: u64) -> Vec<u64> {
    entries
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mi = pow(ell, tgt[i]) as u128;
            let mut acc: u128 = 0;
            for (&c, &x) in row.iter().zip(v) {
                acc = (acc + c as u128 * x as u128) % mi;
            }
            acc as u64
        })
        .collect()
}

/// Horner evaluation of a polynomial in an endomorphism.
pub fn eval_poly(partition: &[u32], action: &[Vec<u64>], coeffs: &[u64], ell: u64) -> Vec<Vec<u64>> {
    let n = partition.len();
    let mut acc = vec![vec![0u64; n]; n];
    for &c in coeffs.iter().rev() {
        acc = compose(partition, &acc, action, ell);
        for (i, row) in acc.iter_mut().enumerate() {
            let mi = pow(ell, partition[i]);
            row[i] = ((row[i] as u128 + c as u128) % mi as u128) as u64;
        }
    }
    acc
}

/// Surjectivity of an endomorphism of the group is rank fullness mod `l`.
pub fn is_invertible_mod_ell(partition: &[u32], entries: &[Vec<u64>], ell: u64) -> bool {
    let n = partition.len();
    rank_mod_ell(entries, n, n, ell) == n
}

/// Gaussian elimination rank over `F_l` of an r x c matrix given by rows.
pub fn rank_mod_ell(entries: &[Vec<u64>], r: usize, c: usize, ell: u64) -> usize {
    let mut a: Vec<Vec<u64>> = entries
        .iter()
        .take(r)
        .map(|row| row.iter().take(c).map(|&x| x % ell).collect())
        .collect();
    let mut rank = 0usize;
    for col in 0..c {
        let Some(p) = (rank..r).find(|&i| a[i][col] != 0) else { continue };
        a.swap(rank, p);
        let inv = inv_mod(a[rank][col], ell);
        for x in a[rank].iter_mut() {
            *x = *x * inv % ell;
        }
        for i in 0..r {
            if i != rank && a[i][col] != 0 {
                let f = a[i][col];
                for j in 0..c {
                    a[i][j] = (a[i][j] + ell - f * a[rank][j] % ell) % ell;
                }
            }
        }
        rank += 1;
        if rank == r {
            break;
        }
    }
    rank
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}
