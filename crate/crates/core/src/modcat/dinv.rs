//! The presentation-defect invariant: minimal relations minus minimal
//! generators, per local factor.
//!
//! For a component `M` over a local factor with maximal ideal `m`:
//! `a = dim_k M/mM` counts minimal generators; the kernel `K` of a minimal
//! surjection `R^a -> M` is computed inside `(R/l^e)^a` with
//! `e = exponent(M) + 1`, which loses nothing because `l^(e-1) R^a` already
//! lies in `K` and lands inside `mK`; then `d = dim_k K/mK - a >= 0`, and
//! `d = 0` exactly on cokernels of square matrices over the ring.

use super::{pow, smap, FiniteModule, ModuleError, ModuleRing};
use crate::abgrp::{self, Shape};
use crate::ring::LocalBlock;

/// Truncation of a local ring at level `e`: either a block quotient
/// `(Z/l^e)[x]/(B)` or the torsion example `Z_p[x]/(px, x^2)`.
struct LocalRingTrunc {
    ell: u64,
    /// additive orders of the ring's group basis (powers of x)
    mods: Vec<u32>,
    /// multiplication by x on the group basis, shaped rows
    x_mat: Vec<Vec<u64>>,
    /// maximal-ideal generators beyond the scalar `l`, as polynomials in x
    extra_max_ideal: Vec<Vec<u64>>,
    residue_degree: u32,
}

impl LocalRingTrunc {
    fn quotient_block(block: &LocalBlock, ell: u64, e: u32) -> Self {
        let me = pow(ell, e);
        let deg = block.lift.degree();
        let mods = vec![e; deg];
        // companion matrix of the block lift, reduced to level e
        let mut x_mat = vec![vec![0u64; deg]; deg];
        for i in 1..deg {
            x_mat[i][i - 1] = 1;
        }
        for i in 0..deg {
            let c = block.lift.coeffs[i] % me;
            x_mat[i][deg - 1] = (me - c) % me;
        }
        let extra: Vec<u64> = block.irreducible.coeffs.iter().map(|&c| c % me).collect();
        Self {
            ell,
            mods,
            x_mat,
            extra_max_ideal: vec![extra],
            residue_degree: block.residue_degree,
        }
    }

    fn torsion(p: u64, e: u32) -> Self {
        Self {
            ell: p,
            mods: vec![e, 1],
            x_mat: vec![vec![0, 0], vec![1, 0]],
            extra_max_ideal: vec![vec![0, 1]],
            residue_degree: 1,
        }
    }

    fn degree(&self) -> usize {
        self.mods.len()
    }
}

/// `d` for a module concentrated on one local factor.
fn d_invariant_local(m: &FiniteModule, local: &LocalRingTrunc) -> u32 {
    let ell = local.ell;
    let n = m.rank();
    if n == 0 {
        return 0;
    }
    let deg = local.degree();
    let part = m.partition().to_vec();

    // residual maximal-ideal action on M/lM
    let extra_actions: Vec<Vec<Vec<u64>>> = local
        .extra_max_ideal
        .iter()
        .map(|rho| smap::eval_poly(&part, m.action(), rho, ell))
        .collect();

    // spanning set for m M mod l
    let mut span_rows: Vec<Vec<u64>> = Vec::new();
    for g in &extra_actions {
        for j in 0..n {
            span_rows.push((0..n).map(|i| g[i][j] % ell).collect());
        }
    }
    let mut elim = Eliminator::new(n, ell);
    for r in &span_rows {
        elim.insert(r.clone());
    }
    let u_rank = elim.rank();
    let v_dim = n - u_rank;
    assert_eq!(
        v_dim % local.residue_degree as usize,
        0,
        "residual dimension must be a multiple of the residue degree"
    );
    let a = v_dim / local.residue_degree as usize;

    // greedy minimal generators among the standard ones: take e_s whenever
    // its image is outside the current span, then absorb its whole
    // residue-field orbit x^t e_s
    let f_powers: Vec<Vec<Vec<u64>>> = {
        let mut powers = vec![smap::identity(&part)];
        for _ in 1..deg {
            let next = smap::compose(&part, m.action(), powers.last().unwrap(), ell);
            powers.push(next);
        }
        powers
    };
    let mut selected: Vec<usize> = Vec::new();
    for s in 0..n {
        let mut e_s = vec![0u64; n];
        e_s[s] = 1;
        if elim.contains(&e_s) {
            continue;
        }
        selected.push(s);
        for fp in &f_powers {
            let img: Vec<u64> = (0..n).map(|i| fp[i][s] % ell).collect();
            elim.insert(img);
        }
    }
    assert_eq!(selected.len(), a, "greedy generator count must match dim M/mM");
    assert_eq!(elim.rank(), n, "selected generators must generate");
    if a == 0 {
        return 0;
    }

    // kernel of (R/l^e)^a -> M, (s, t) |-> x^t m_s
    let domain_mods: Vec<u32> =
        (0..a).flat_map(|_| local.mods.iter().copied()).collect();
    let domain = Shape::new(ell, domain_mods.clone());
    let target = m.shape();
    let entries: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mi = pow(ell, part[i]);
            let mut row = Vec::with_capacity(a * deg);
            for &s in &selected {
                for fp in f_powers.iter() {
                    row.push(fp[i][s] % mi);
                }
            }
            row
        })
        .collect();
    let kernel = abgrp::kernel_shaped(&entries, &domain, &target);
    let r = kernel.vectors.len();
    if r == 0 {
        return 0u32.saturating_sub(a as u32);
    }

    // x acting on the domain: block diagonal copies of the ring's x matrix
    let x_dom: Vec<Vec<u64>> = (0..a * deg)
        .map(|row| {
            let (blk, i) = (row / deg, row % deg);
            let mut out = vec![0u64; a * deg];
            for j in 0..deg {
                out[blk * deg + j] = local.x_mat[i][j];
            }
            out
        })
        .collect();

    // coefficients of rho . b_k in the kernel basis, mod l
    let mut coeff_rows: Vec<Vec<u64>> = Vec::new();
    for rho in &local.extra_max_ideal {
        let rho_dom = smap::eval_poly(&domain_mods, &x_dom, rho, ell);
        for b in &kernel.vectors {
            let w = smap::apply(&domain_mods, &rho_dom, b, ell);
            let coeffs = abgrp::solve(&domain, &kernel.vectors, &w)
                .expect("maximal ideal maps the kernel into itself");
            coeff_rows.push(coeffs.iter().map(|&c| c % ell).collect());
        }
    }
    let mk_rank = smap::rank_mod_ell(&coeff_rows, coeff_rows.len(), r, ell);
    let b_dim = r - mk_rank;
    assert_eq!(b_dim % local.residue_degree as usize, 0);
    let b = b_dim / local.residue_degree as usize;
    assert!(b >= a, "presentation defect must be nonnegative");
    (b - a) as u32
}

/// The defect `d_M`, summed over the local factors.
pub fn d_invariant(m: &FiniteModule) -> Result<u32, ModuleError> {
    match m.ring().as_ref() {
        ModuleRing::Torsion { p } => {
            let e = m.exponent() + 1;
            let local = LocalRingTrunc::torsion(*p, e);
            Ok(d_invariant_local(m, &local))
        }
        ModuleRing::Quotient(r) => {
            let comps = super::split::crt_split(m)?;
            let mut total = 0u32;
            for (block, comp) in r.blocks().iter().zip(&comps) {
                if comp.is_zero() {
                    continue;
                }
                let e = comp.exponent() + 1;
                if e > r.level() {
                    return Err(ModuleError::RingLevelTooLow { needed: e, level: r.level() });
                }
                let local = LocalRingTrunc::quotient_block(block, m.ell(), e);
                total += d_invariant_local(comp, &local);
            }
            Ok(total)
        }
    }
}

/// Whether the module occurs as the cokernel of a square matrix over its
/// ring: `d = 0` on every local factor.
pub fn in_support(m: &FiniteModule) -> Result<bool, ModuleError> {
    Ok(d_invariant(m)? == 0)
}

/// Incremental row-span tracker over `F_l`.
struct Eliminator {
    ell: u64,
    cols: usize,
    /// reduced rows with their pivot column
    rows: Vec<(usize, Vec<u64>)>,
}

impl Eliminator {
    fn new(cols: usize, ell: u64) -> Self {
        Self { ell, cols, rows: Vec::new() }
    }

    fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut v: Vec<u64> = v.iter().map(|&x| x % self.ell).collect();
        for (piv, row) in &self.rows {
            if v[*piv] != 0 {
                let f = v[*piv];
                for j in 0..self.cols {
                    v[j] = (v[j] + (self.ell - f) * row[j]) % self.ell;
                }
            }
        }
        v
    }

    fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Returns true when the vector enlarged the span.
    fn insert(&mut self, v: Vec<u64>) -> bool {
        let mut v = self.reduce(&v);
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = mod_inv(v[piv], self.ell);
        for x in v.iter_mut() {
            *x = *x * inv % self.ell;
        }
        self.rows.push((piv, v));
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
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

#[cfg(test)]
mod tests {
    use super::super::test_rings::*;
    use super::super::{make_module, zero_module};
    use super::*;

    #[test]
    fn torsion_ring_examples() {
        let ring = ring_torsion(3);
        // M = R/3R: two group generators 1, x with x . 1 = x, x . x = 0
        let r3 = make_module(&ring, vec![1, 1], vec![vec![0, 0], vec![1, 0]]).unwrap();
        assert_eq!(d_invariant(&r3).unwrap(), 0);
        assert!(in_support(&r3).unwrap());
        // M = F_3 with x acting as 0: kernel (3, x) needs two generators
        let f3 = make_module(&ring, vec![1], vec![vec![0]]).unwrap();
        assert_eq!(d_invariant(&f3).unwrap(), 1);
        assert!(!in_support(&f3).unwrap());
        // (Z/9, x = 3) and (Z/9, x = 6) both have principal kernels
        for x in [3u64, 6] {
            let m = make_module(&ring, vec![2], vec![vec![x]]).unwrap();
            assert_eq!(d_invariant(&m).unwrap(), 0, "x = {x}");
        }
        // (Z/9, x = 0) is R/(9, x), whose kernel needs two generators
        let m = make_module(&ring, vec![2], vec![vec![0]]).unwrap();
        assert_eq!(d_invariant(&m).unwrap(), 1);
    }

    #[test]
    fn dvr_modules_are_in_support() {
        let ring = ring_z3(4);
        let z3 = make_module(&ring, vec![1], vec![vec![1]]).unwrap();
        assert_eq!(d_invariant(&z3).unwrap(), 0);
        let mixed = make_module(&ring, vec![2, 1], vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(d_invariant(&mixed).unwrap(), 0);
        assert_eq!(d_invariant(&zero_module(&ring)).unwrap(), 0);
    }

    #[test]
    fn split_ring_modules_are_in_support() {
        let ring = ring_x2_minus_1(3, 7);
        let m = make_module(&ring, vec![2, 1], vec![vec![1, 0], vec![0, 2]]).unwrap();
        assert_eq!(d_invariant(&m).unwrap(), 0);
    }

    #[test]
    fn level_guard_fires() {
        let ring = ring_z3(2);
        // exponent 2 = ring level: the kernel computation needs level 3
        let m = make_module(&ring, vec![2], vec![vec![1]]).unwrap();
        assert!(matches!(
            d_invariant(&m),
            Err(super::super::ModuleError::RingLevelTooLow { needed: 3, level: 2 })
        ));
    }
}
