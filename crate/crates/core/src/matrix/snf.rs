//! Smith normal form over `Z/l^N`.
//!
//! Over this local principal ideal ring the algorithm is simpler than over
//! `Z`: pick the entry of minimal `l`-valuation as pivot, scale it to an
//! exact power of `l`, and clear its row and column. Row and column
//! operations never decrease valuations below the pivot's, so the divisor
//! chain comes out nondecreasing without any fix-up passes.

use super::Mat;

/// Decomposition `left * input * right = diag(l^v_1, ..., l^v_k)` with both
/// transforms invertible and their inverses tracked.
///
/// A valuation equal to the truncation level means the divisor is `0` mod
/// `l^N`: the invariant factor is not determined at this truncation
/// ("overflow").
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub left: Mat,
    pub left_inv: Mat,
    pub right: Mat,
    pub right_inv: Mat,
    /// Nondecreasing; length `min(rows, cols)`.
    pub valuations: Vec<u32>,
}

impl SnfResult {
    /// Valuation of the `i`-th diagonal position when the matrix is viewed
    /// as a map into `(Z/l^N)^rows`: positions beyond `min(rows, cols)`
    /// have divisor 0.
    pub fn row_valuation(&self, i: usize, level: u32) -> u32 {
        self.valuations.get(i).copied().unwrap_or(level)
    }
}

pub fn smith_normal_form(input: &Mat) -> SnfResult {
    let pp = input.modulus;
    let level = pp.level();
    let (rows, cols) = (input.rows, input.cols);
    let mut a = input.clone();
    let mut left = Mat::identity(rows, pp);
    let mut left_inv = Mat::identity(rows, pp);
    let mut right = Mat::identity(cols, pp);
    let mut right_inv = Mat::identity(cols, pp);
    let mut valuations = Vec::with_capacity(rows.min(cols));

    for k in 0..rows.min(cols) {
        // minimal-valuation pivot in the remaining block
        let mut best: Option<(usize, usize, u32)> = None;
        for i in k..rows {
            for j in k..cols {
                let v = pp.valuation(a[(i, j)]);
                if best.map_or(true, |(_, _, bv)| v < bv) {
                    best = Some((i, j, v));
                    if v == 0 {
                        break;
                    }
                }
            }
            if matches!(best, Some((_, _, 0))) {
                break;
            }
        }
        let (pi, pj, v) = best.unwrap();
        if v >= level {
            // remaining block is zero mod l^N
            for _ in k..rows.min(cols) {
                valuations.push(level);
            }
            break;
        }
        if pi != k {
            swap_rows(&mut a, pi, k);
            swap_rows(&mut left, pi, k);
            swap_cols(&mut left_inv, pi, k);
        }
        if pj != k {
            swap_cols(&mut a, pj, k);
            swap_cols(&mut right, pj, k);
            swap_rows(&mut right_inv, pj, k);
        }
        // scale the pivot to exactly l^v
        let unit = a[(k, k)] / pp.ell_pow(v);
        debug_assert!(pp.is_unit(unit));
        let unit_inv = pp.inverse(unit).unwrap();
        scale_row(&mut a, k, unit_inv);
        scale_row(&mut left, k, unit_inv);
        scale_col(&mut left_inv, k, unit);
        debug_assert_eq!(a[(k, k)], pp.ell_pow(v));

        // clear column k below and above
        for i in 0..rows {
            if i == k || a[(i, k)] == 0 {
                continue;
            }
            debug_assert!(pp.valuation(a[(i, k)]) >= v);
            let factor = a[(i, k)] / pp.ell_pow(v);
            add_row_multiple(&mut a, i, k, pp.neg(factor));
            add_row_multiple(&mut left, i, k, pp.neg(factor));
            add_col_multiple(&mut left_inv, k, i, factor);
        }
        // clear row k
        for j in 0..cols {
            if j == k || a[(k, j)] == 0 {
                continue;
            }
            debug_assert!(pp.valuation(a[(k, j)]) >= v);
            let factor = a[(k, j)] / pp.ell_pow(v);
            add_col_multiple(&mut a, j, k, pp.neg(factor));
            add_col_multiple(&mut right, j, k, pp.neg(factor));
            add_row_multiple(&mut right_inv, k, j, factor);
        }
        valuations.push(v);
    }
    debug_assert!(valuations.windows(2).all(|w| w[0] <= w[1]));
    SnfResult { left, left_inv, right, right_inv, valuations }
}

fn swap_rows(m: &mut Mat, a: usize, b: usize) {
    for j in 0..m.cols {
        m.entries.swap(a * m.cols + j, b * m.cols + j);
    }
}

fn swap_cols(m: &mut Mat, a: usize, b: usize) {
    for i in 0..m.rows {
        m.entries.swap(i * m.cols + a, i * m.cols + b);
    }
}

fn scale_row(m: &mut Mat, r: usize, c: u64) {
    let pp = m.modulus;
    for j in 0..m.cols {
        m[(r, j)] = pp.mul(m[(r, j)], c);
    }
}

fn scale_col(m: &mut Mat, col: usize, c: u64) {
    let pp = m.modulus;
    for i in 0..m.rows {
        m[(i, col)] = pp.mul(m[(i, col)], c);
    }
}

/// row_dst += c * row_src
fn add_row_multiple(m: &mut Mat, dst: usize, src: usize, c: u64) {
    let pp = m.modulus;
    for j in 0..m.cols {
        let t = pp.mul(c, m[(src, j)]);
        m[(dst, j)] = pp.add(m[(dst, j)], t);
    }
}

/// col_dst += c * col_src
fn add_col_multiple(m: &mut Mat, dst: usize, src: usize, c: u64) {
    let pp = m.modulus;
    for i in 0..m.rows {
        let t = pp.mul(c, m[(i, src)]);
        m[(i, dst)] = pp.add(m[(i, dst)], t);
    }
}

/// Cokernel of the column span: the nonzero elementary-divisor valuations
/// (`coker = (+) Z/l^v_i`), plus a flag for divisors that vanished mod
/// `l^N` and are therefore undetermined at this truncation.
pub fn cokernel_structure(m: &Mat) -> (Vec<u32>, bool) {
    let level = m.modulus.level();
    let snf = smith_normal_form(m);
    let mut partition: Vec<u32> = (0..m.rows)
        .map(|i| snf.row_valuation(i, level))
        .filter(|&v| v > 0)
        .collect();
    partition.sort_unstable_by(|a, b| b.cmp(a));
    let overflow = partition.first().is_some_and(|&v| v >= level);
    (partition, overflow)
}

/// Cokernel of `rel` together with the action a commuting endomorphism
/// `act` induces on it.
#[derive(Clone, Debug)]
pub struct CokernelAction {
    /// Nonzero divisor valuations, decreasing.
    pub partition: Vec<u32>,
    /// Matrix of the induced action on the generators of the quotient;
    /// entry `(i, j)` is reduced mod `l^partition[i]`.
    pub action: Vec<Vec<u64>>,
    pub overflow: bool,
    /// Quotient-map coordinates: row `i` expresses the `i`-th generator
    /// functional on the ambient `(Z/l^N)^rows`.
    pub projection: Vec<Vec<u64>>,
}

/// Computes `(Z/l^N)^rows / col-span(rel)` and the action induced by `act`.
///
/// `act` must satisfy `act * im(rel) <= im(rel)`, which holds whenever the
/// two matrices commute (the only way callers produce them).
pub fn cokernel_with_action(rel: &Mat, act: &Mat) -> CokernelAction {
    let pp = rel.modulus;
    let level = pp.level();
    assert_eq!(act.rows, rel.rows);
    assert!(act.is_square());
    let snf = smith_normal_form(rel);
    let vals: Vec<u32> = (0..rel.rows).map(|i| snf.row_valuation(i, level)).collect();
    // induced action in quotient coordinates y = L x
    let induced = snf.left.mul(act).mul(&snf.left_inv);

    // keep nonzero coordinates, deepest first
    let mut kept: Vec<usize> = (0..rel.rows).filter(|&i| vals[i] > 0).collect();
    kept.sort_by(|&a, &b| vals[b].cmp(&vals[a]).then(a.cmp(&b)));
    let partition: Vec<u32> = kept.iter().map(|&i| vals[i]).collect();
    let action: Vec<Vec<u64>> = kept
        .iter()
        .map(|&i| {
            let mi = pp.ell_pow(vals[i]);
            kept.iter().map(|&j| induced[(i, j)] % mi).collect()
        })
        .collect();
    let projection: Vec<Vec<u64>> = kept
        .iter()
        .map(|&i| {
            let mi = pp.ell_pow(vals[i]);
            (0..rel.rows).map(|j| snf.left[(i, j)] % mi).collect()
        })
        .collect();
    let overflow = partition.first().is_some_and(|&v| v >= level);
    CokernelAction { partition, action, overflow, projection }
}
