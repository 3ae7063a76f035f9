//! CRT decomposition along the local blocks of the ring, and kernel /
//! quotient constructions for polynomial divisors of the modulus.
//!
//! The block idempotents are computed mod `l` by Bezout and Newton-lifted
//! inside `R = (Z/l^N)[x]/(P)`: `e <- e^2 (3 - 2e)` squares the precision
//! each step.

use super::{module_from_parts, pow, smap, submodule_from_basis, FiniteModule, ModuleError};
use crate::abgrp::{self, Shape};
use crate::ring::{poly, Poly, QuotientRing};

/// Multiplication in `R = (Z/l^N)[x]/(P)` on coefficient vectors.
fn ring_mul(a: &[u64], b: &[u64], ring: &QuotientRing) -> Vec<u64> {
    let m = ring.base().modulus();
    let prod = poly::mul(a, b, m);
    let mut r = poly::rem(&prod, &ring.modulus_poly().coeffs, m);
    r.resize(ring.degree(), 0);
    r
}

/// The block idempotents of `R`: `e_j = 1 mod B_j`, `0 mod B_i` for
/// `i != j`, summing to 1.
pub fn ring_idempotents(ring: &QuotientRing) -> Vec<Vec<u64>> {
    let ell = ring.ell();
    let m = ring.base().modulus();
    let deg = ring.degree();
    let blocks = ring.blocks();
    if blocks.len() == 1 {
        let mut one = vec![0u64; deg];
        one[0] = 1 % m;
        return vec![one];
    }
    let mut out = Vec::with_capacity(blocks.len());
    for (j, block) in blocks.iter().enumerate() {
        // u = prod of the other blocks mod l, s = u^-1 mod (B_j, l)
        let bj_mod_ell: Vec<u64> = {
            let mut v: Vec<u64> = block.lift.coeffs.iter().map(|&c| c % ell).collect();
            poly::trim(&mut v);
            v
        };
        let u = blocks
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .fold(vec![1u64], |acc, (_, b)| {
                let lifted: Vec<u64> = b.lift.coeffs.iter().map(|&c| c % ell).collect();
                let prod = poly::mul(&acc, &lifted, ell);
                poly::rem(&prod, &bj_mod_ell, ell)
            });
        let (g, s, _) = poly::xgcd(&u, &bj_mod_ell, ell);
        assert_eq!(g, vec![1], "blocks must be coprime mod l");
        // e0 = s * (prod of other blocks) in R, correct mod l
        let mut e: Vec<u64> = {
            let full_u = blocks
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .fold(vec![1u64], |acc, (_, b)| poly::mul(&acc, &b.lift.coeffs, m));
            let prod = poly::mul(&s, &full_u, m);
            let mut r = poly::rem(&prod, &ring.modulus_poly().coeffs, m);
            r.resize(deg, 0);
            r
        };
        // Newton: e <- 3 e^2 - 2 e^3 doubles idempotency precision
        let steps = 64 - u64::from(ring.level()).leading_zeros() + 1;
        for _ in 0..steps {
            let e2 = ring_mul(&e, &e, ring);
            let e3 = ring_mul(&e2, &e, ring);
            e = e2
                .iter()
                .zip(&e3)
                .map(|(&a, &b)| {
                    let pp = ring.base();
                    pp.sub(pp.mul(3 % pp.modulus(), a), pp.mul(2, b))
                })
                .collect();
        }
        debug_assert_eq!(ring_mul(&e, &e, ring), e, "idempotent failed to stabilize");
        out.push(e);
    }
    // partition of unity
    debug_assert!({
        let pp = ring.base();
        let mut sum = vec![0u64; deg];
        for e in &out {
            for (s, &x) in sum.iter_mut().zip(e) {
                *s = pp.add(*s, x);
            }
        }
        sum[0] == 1 % pp.modulus() && sum[1..].iter().all(|&x| x == 0)
    });
    out
}

/// Evaluates a ring element (coefficient vector in the power basis) on the
/// module via its action matrix.
pub(crate) fn ring_element_action(m: &FiniteModule, elt: &[u64]) -> Vec<Vec<u64>> {
    smap::eval_poly(m.partition(), m.action(), elt, m.ell())
}

/// The quotient of `M` by the image of an endomorphism commuting with the
/// action (e.g. `1 - e_j(F)` or `h(F)`).
pub fn quotient_by_endo_image(m: &FiniteModule, endo: &[Vec<u64>]) -> FiniteModule {
    let shape = m.shape();
    let n = m.rank();
    let rels: Vec<Vec<u64>> = (0..n).map(|j| (0..n).map(|i| endo[i][j]).collect()).collect();
    let q = abgrp::quotient_with_action(&shape, &rels, m.action());
    module_from_parts(m.ring(), &q.partition, &q.action)
}

/// Splits `M` into its components along the ring's local blocks.
/// Component `j` is `M / (1 - e_j)(F) M`, still carried over the full ring.
pub fn crt_split(m: &FiniteModule) -> Result<Vec<FiniteModule>, ModuleError> {
    let ring = m.ring().quotient().ok_or(ModuleError::NotQuotientRing)?;
    if ring.blocks().len() == 1 {
        return Ok(vec![m.clone()]);
    }
    let ell = m.ell();
    let idems = ring_idempotents(ring);
    let mut out = Vec::with_capacity(idems.len());
    for e in &idems {
        let e_act = ring_element_action(m, e);
        // 1 - e_j acting on M
        let compl: Vec<Vec<u64>> = e_act
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mi = pow(ell, m.partition()[i]);
                row.iter()
                    .enumerate()
                    .map(|(j, &x)| if i == j { (1 + mi - x) % mi } else { (mi - x) % mi })
                    .collect()
            })
            .collect();
        out.push(quotient_by_endo_image(m, &compl));
    }
    debug_assert_eq!(
        out.iter().map(FiniteModule::order_exponent).sum::<u32>(),
        m.order_exponent(),
        "component orders must multiply to |M|"
    );
    Ok(out)
}

/// The submodule `M[h] = ker h(F)` for a polynomial `h` (meant for divisors
/// of the modulus, e.g. eigenspace extraction for `P = x^m - 1`).
pub fn kernel_part(m: &FiniteModule, h: &Poly) -> FiniteModule {
    let hf = m.poly_action(h);
    let shape = m.shape();
    let basis = abgrp::kernel_shaped(&hf, &shape, &shape);
    submodule_from_basis(m, &basis).0
}

/// Minimal number of generators of each CRT component over its block,
/// as a dimension over the block's residue field.
pub fn component_min_generators(m: &FiniteModule) -> Result<Vec<u32>, ModuleError> {
    let ring = m.ring().quotient().ok_or(ModuleError::NotQuotientRing)?;
    let ell = m.ell();
    let comps = crt_split(m)?;
    let mut out = Vec::with_capacity(comps.len());
    for (block, comp) in ring.blocks().iter().zip(&comps) {
        let n = comp.rank();
        if n == 0 {
            out.push(0);
            continue;
        }
        // dim over F_l of comp / (l comp + g(F) comp)
        let g_act = comp.poly_action(&block.irreducible);
        let rank = smap::rank_mod_ell(&g_act, n, n, ell);
        let fl_dim = (n - rank) as u32;
        assert_eq!(fl_dim % block.residue_degree, 0);
        out.push(fl_dim / block.residue_degree);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::test_rings::*;
    use super::super::{is_isomorphic, make_module, DEFAULT_ENUMERATION_LIMIT};
    use super::*;

    #[test]
    fn split_diagonal_eigenspaces() {
        // (Z/3 (+) Z/3, F = diag(1, 2)) over x^2 - 1: components Z/3, Z/3
        let ring = ring_x2_minus_1(2, 7);
        let m = make_module(&ring, vec![1, 1], vec![vec![1, 0], vec![0, 2]]).unwrap();
        let comps = crt_split(&m).unwrap();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.partition() == [1]));
        // one component has F = 1, the other F = -1
        let acts: Vec<u64> = comps.iter().map(|c| c.action()[0][0] % 3).collect();
        assert!(acts.contains(&1) && acts.contains(&2));
    }

    #[test]
    fn split_concentrated_component() {
        // (Z/9, F = 1) over x^2 - 1: all mass in the x-1 component
        let ring = ring_x2_minus_1(2, 7);
        let m = make_module(&ring, vec![2], vec![vec![1]]).unwrap();
        let comps = crt_split(&m).unwrap();
        assert_eq!(comps.len(), 2);
        let sizes: Vec<u32> = comps.iter().map(|c| c.order_exponent()).collect();
        assert!(sizes.contains(&2) && sizes.contains(&0));
    }

    #[test]
    fn kernel_part_of_unipotent() {
        // M[x-1] of (Z/3 (+) Z/3, F = [[1,1],[0,1]]) is Z/3; the unipotent
        // lives over the multiplicity block P = (x-1)^2
        let pp = crate::ring::PrimePower::new(3, 1).unwrap();
        let r = crate::ring::build_ring(3, 1, &Poly::from_i64(&[1, -2, 1], &pp), 1).unwrap();
        assert!(!r.all_blocks_maximal());
        let ring = std::sync::Arc::new(super::super::ModuleRing::Quotient(r));
        let f = vec![vec![1u64, 1], vec![0, 1]];
        let m = make_module(&ring, vec![1, 1], f).unwrap();
        let k = kernel_part(&m, &Poly::from_i64(&[-1, 1], &pp));
        assert_eq!(k.partition(), [1]);
    }

    #[test]
    fn split_then_direct_sum_is_identity() {
        let ring = ring_x2_minus_1(3, 7);
        let cases = vec![
            make_module(&ring, vec![1, 1], vec![vec![1, 0], vec![0, 2]]).unwrap(),
            make_module(&ring, vec![2], vec![vec![1]]).unwrap(),
            make_module(&ring, vec![2, 1], vec![vec![8, 0], vec![0, 1]]).unwrap(),
            make_module(&ring, vec![2, 2, 1], vec![vec![1, 3, 0], vec![0, 8, 0], vec![0, 0, 2]])
                .unwrap(),
        ];
        for m in cases {
            let comps = crt_split(&m).unwrap();
            let rebuilt = comps
                .into_iter()
                .reduce(|a, b| super::super::direct_sum(&a, &b).unwrap())
                .unwrap();
            assert!(
                is_isomorphic(&m, &rebuilt, DEFAULT_ENUMERATION_LIMIT).unwrap(),
                "reconstruction differs for {m:?}"
            );
        }
    }

    #[test]
    fn min_generators_per_component() {
        let ring = ring_x2_minus_1(2, 7);
        let m = make_module(&ring, vec![1, 1], vec![vec![1, 0], vec![0, 1]]).unwrap();
        // both generators sit in the x-1 component
        assert_eq!(component_min_generators(&m).unwrap(), vec![2, 0]);
        let mixed = make_module(&ring, vec![1, 1], vec![vec![1, 0], vec![0, 2]]).unwrap();
        assert_eq!(component_min_generators(&mixed).unwrap(), vec![1, 1]);
    }
}
