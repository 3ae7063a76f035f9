//! Finite modules with Frobenius action.
//!
//! A [`FiniteModule`] packages a finite abelian `l`-group `(+) Z/l^{a_i}`
//! (partition decreasing) with an endomorphism `F` annihilated by the
//! modulus polynomial of its ring. Over a quotient ring `(Z/l^N)[x]/(P)`
//! with `l` not dividing `P(0)`, the action is automatically invertible and
//! the pair is an etale-group-scheme style datum: geometric points plus
//! Frobenius. The one torsion ring `Z_p[x]/(px, x^2)` is carried alongside
//! as a separate ring kind; there `x` acts nilpotently.

mod dinv;
mod enumerate;
mod hom;
mod iso;
mod label;
mod split;
pub(crate) mod smap;
mod wedge;

pub use dinv::{d_invariant, in_support};
pub use enumerate::{enlargements, enumerate_modules, module_length};
pub use hom::{aut_count, exists_surjection, hom_group, surj_count, HomGroup, SurjTester};
pub use iso::{fingerprint, is_isomorphic};
pub use label::{canonical_label, direct_sum, module_from_label, ModuleLabel};
pub use split::{crt_split, kernel_part, quotient_by_endo_image, ring_idempotents};
pub use wedge::{pushforward_form, wedge_square, WedgeData};

use crate::abgrp::{self, Shape};
use crate::ring::{Poly, QuotientRing};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

pub const DEFAULT_ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum ModuleError {
    #[error("partition must be decreasing with positive parts")]
    PartitionNotSorted,
    #[error("action matrix entries violate the homomorphism congruences")]
    ActionNotWellDefined,
    #[error("modulus polynomial does not annihilate the action")]
    ActionNotAnnihilated,
    #[error("action is not invertible on the group")]
    ActionNotInvertible,
    #[error("modules live over different rings")]
    RingMismatch,
    #[error("enumeration of size {size} exceeds the limit {limit}")]
    EnumerationTooLarge { size: u128, limit: u128 },
    #[error("isomorphism test inconclusive: fingerprints agree but no certificate found")]
    IsoUndetermined,
    #[error("ring level {level} too low: computation needs level {needed}")]
    RingLevelTooLow { needed: u32, level: u32 },
    #[error("operation requires a quotient ring")]
    NotQuotientRing,
    #[error("requested split needs pairwise-coprime factors")]
    NotCoprime,
    #[error("decoration is not scaled by q under the induced action")]
    DecorationNotScaled,
    #[error("unknown module label: {0}")]
    BadLabel(String),
}

/// The rings modules live over: monogenic quotients of `Z_l[x]`, plus the
/// one hard-coded torsion example `Z_p[x]/(px, x^2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModuleRing {
    Quotient(QuotientRing),
    Torsion { p: u64 },
}

impl ModuleRing {
    pub fn ell(&self) -> u64 {
        match self {
            ModuleRing::Quotient(r) => r.ell(),
            ModuleRing::Torsion { p } => *p,
        }
    }

    pub fn quotient(&self) -> Option<&QuotientRing> {
        match self {
            ModuleRing::Quotient(r) => Some(r),
            ModuleRing::Torsion { .. } => None,
        }
    }

    pub fn is_torsion(&self) -> bool {
        matches!(self, ModuleRing::Torsion { .. })
    }
}

/// A finite module: partition of the underlying group, plus the action
/// matrix of `x` (entry `(i, j)` reduced mod `l^{a_i}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteModule {
    ring: Arc<ModuleRing>,
    partition: Vec<u32>,
    action: Vec<Vec<u64>>,
}

impl FiniteModule {
    pub fn ring(&self) -> &Arc<ModuleRing> {
        &self.ring
    }

    pub fn partition(&self) -> &[u32] {
        &self.partition
    }

    pub fn action(&self) -> &[Vec<u64>] {
        &self.action
    }

    pub fn rank(&self) -> usize {
        self.partition.len()
    }

    pub fn is_zero(&self) -> bool {
        self.partition.is_empty()
    }

    pub fn ell(&self) -> u64 {
        self.ring.ell()
    }

    /// `log_l |M|`.
    pub fn order_exponent(&self) -> u32 {
        self.partition.iter().sum()
    }

    /// Largest cyclic order exponent (0 for the zero module).
    pub fn exponent(&self) -> u32 {
        self.partition.first().copied().unwrap_or(0)
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.ell(), self.partition.clone())
    }

    /// The action of a polynomial in `x` on the module.
    pub fn poly_action(&self, p: &Poly) -> Vec<Vec<u64>> {
        smap::eval_poly(&self.partition, &self.action, &p.coeffs, self.ell())
    }

    /// Action matrix reduced mod `l`.
    pub fn action_mod_ell(&self) -> Vec<Vec<u64>> {
        let ell = self.ell();
        self.action
            .iter()
            .map(|row| row.iter().map(|&x| x % ell).collect())
            .collect()
    }
}

/// Validates and builds a module. For quotient rings this checks the
/// homomorphism congruences, `P(F) = 0`, and invertibility of `F`; for the
/// torsion ring it checks `pX = 0` and `X^2 = 0`.
pub fn make_module(
    ring: &Arc<ModuleRing>,
    partition: Vec<u32>,
    action: Vec<Vec<u64>>,
) -> Result<FiniteModule, ModuleError> {
    if partition.windows(2).any(|w| w[0] < w[1]) || partition.iter().any(|&a| a == 0) {
        return Err(ModuleError::PartitionNotSorted);
    }
    let ell = ring.ell();
    let n = partition.len();
    if action.len() != n || action.iter().any(|r| r.len() != n) {
        return Err(ModuleError::ActionNotWellDefined);
    }
    let action: Vec<Vec<u64>> = action
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mi = pow(ell, partition[i]);
            row.iter().map(|&x| x % mi).collect()
        })
        .collect();
    if !smap::is_well_defined(&partition, &partition, &action, ell) {
        return Err(ModuleError::ActionNotWellDefined);
    }
    match ring.as_ref() {
        ModuleRing::Quotient(r) => {
            // 1 in R has additive order l^N, so module exponents are capped
            if partition.first().copied().unwrap_or(0) > r.level() {
                return Err(ModuleError::RingLevelTooLow {
                    needed: partition[0],
                    level: r.level(),
                });
            }
            let pf = smap::eval_poly(&partition, &action, &r.modulus_poly().coeffs, ell);
            if !smap::is_zero(&partition, &pf, ell) {
                return Err(ModuleError::ActionNotAnnihilated);
            }
            if !smap::is_invertible_mod_ell(&partition, &action, ell) {
                return Err(ModuleError::ActionNotInvertible);
            }
        }
        ModuleRing::Torsion { p } => {
            // p X = 0 and X^2 = 0
            let scaled = smap::scale(&partition, &action, *p, ell);
            if !smap::is_zero(&partition, &scaled, ell) {
                return Err(ModuleError::ActionNotAnnihilated);
            }
            let sq = smap::compose(&partition, &action, &action, ell);
            if !smap::is_zero(&partition, &sq, ell) {
                return Err(ModuleError::ActionNotAnnihilated);
            }
        }
    }
    Ok(FiniteModule { ring: Arc::clone(ring), partition, action })
}

/// The zero module.
pub fn zero_module(ring: &Arc<ModuleRing>) -> FiniteModule {
    FiniteModule { ring: Arc::clone(ring), partition: vec![], action: vec![] }
}

/// Rebuilds a module from a sub- or quotient-group presentation: sorts the
/// cyclic orders decreasingly and permutes the action accordingly.
pub(crate) fn module_from_parts(
    ring: &Arc<ModuleRing>,
    orders: &[u32],
    action: &[Vec<u64>],
) -> FiniteModule {
    let mut idx: Vec<usize> = (0..orders.len()).collect();
    idx.sort_by(|&a, &b| orders[b].cmp(&orders[a]).then(a.cmp(&b)));
    let partition: Vec<u32> = idx.iter().map(|&i| orders[i]).collect();
    let ell = ring.ell();
    let sorted_action: Vec<Vec<u64>> = idx
        .iter()
        .map(|&i| {
            let mi = pow(ell, orders[i]);
            idx.iter().map(|&j| action[i][j] % mi).collect()
        })
        .collect();
    let m = make_module(ring, partition, sorted_action);
    m.expect("sub/quotient presentation must validate")
}

/// Module structure on a subgroup spanned by an independent basis that is
/// stable under the ambient action. Returns the module together with the
/// inclusion map (columns = basis vectors in ambient coordinates).
pub fn submodule_from_basis(
    ambient: &FiniteModule,
    basis: &abgrp::Basis,
) -> (FiniteModule, Vec<Vec<u64>>) {
    let shape = ambient.shape();
    let ell = ambient.ell();
    let n = basis.vectors.len();
    // action of F on the basis, in basis coordinates
    let mut act = vec![vec![0u64; n]; n];
    for (k, b) in basis.vectors.iter().enumerate() {
        let fb = smap::apply(&ambient.partition, &ambient.action, b, ell);
        let coeffs = abgrp::solve(&shape, &basis.vectors, &fb)
            .expect("subgroup is stable under the action");
        for (i, &c) in coeffs.iter().enumerate() {
            act[i][k] = c % pow(ell, basis.orders[i]);
        }
    }
    let module = module_from_parts(&ambient.ring, &basis.orders, &act);
    let mut idx: Vec<usize> = (0..basis.orders.len()).collect();
    idx.sort_by(|&a, &b| basis.orders[b].cmp(&basis.orders[a]).then(a.cmp(&b)));
    let inclusion: Vec<Vec<u64>> = idx.iter().map(|&i| basis.vectors[i].clone()).collect();
    (module, inclusion)
}

pub(crate) fn pow(base: u64, exp: u32) -> u64 {
    let mut r = 1u64;
    for _ in 0..exp {
        r *= base;
    }
    r
}

/// A module decorated with an element of its exterior square scaled by `q`
/// under the induced action.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoratedModule {
    module: FiniteModule,
    /// Coordinates on the wedge generators `e_i /\ e_j`, `i < j`, each
    /// reduced mod `l^min(a_i, a_j)`.
    omega: Vec<u64>,
}

impl DecoratedModule {
    pub fn new(module: FiniteModule, omega: Vec<u64>) -> Result<Self, ModuleError> {
        let ring = module.ring.quotient().ok_or(ModuleError::NotQuotientRing)?;
        let q = ring.frobenius_scalar();
        let wedge = wedge_square(&module);
        let omega = wedge.shape().reduce(&omega);
        let pushed = wedge.apply_action(&omega);
        let scaled = wedge.shape().scale(&omega, q);
        if pushed != scaled {
            return Err(ModuleError::DecorationNotScaled);
        }
        Ok(Self { module, omega })
    }

    pub fn module(&self) -> &FiniteModule {
        &self.module
    }

    pub fn omega(&self) -> &[u64] {
        &self.omega
    }

    pub fn omega_is_zero(&self) -> bool {
        let wedge = wedge_square(&self.module);
        wedge.shape().is_zero(&self.omega)
    }
}


#[cfg(test)]
mod tests {
    use super::test_rings::*;
    use super::*;

    #[test]
    fn make_module_validates() {
        let ring = ring_z3(2);
        assert!(make_module(&ring, vec![1], vec![vec![1]]).is_ok());
        // P(2) = 1 != 0 mod 3
        assert!(matches!(
            make_module(&ring, vec![1], vec![vec![2]]),
            Err(ModuleError::ActionNotAnnihilated)
        ));
        assert!(matches!(
            make_module(&ring, vec![1, 2], vec![vec![1, 0], vec![0, 1]]),
            Err(ModuleError::PartitionNotSorted)
        ));
    }

    #[test]
    fn make_module_split_ring() {
        let ring = ring_x2_minus_1(2, 7);
        // Z/3 with F = -1: P(-1) = 0
        assert!(make_module(&ring, vec![1], vec![vec![2]]).is_ok());
        assert!(make_module(&ring, vec![1], vec![vec![0]]).is_err());
    }

    #[test]
    fn torsion_ring_validation() {
        let ring = ring_torsion(3);
        // (Z/9, x acts as 3): 3*3 = 0 and (3)^2 = 0 mod 9
        assert!(make_module(&ring, vec![2], vec![vec![3]]).is_ok());
        assert!(make_module(&ring, vec![2], vec![vec![6]]).is_ok());
        assert!(make_module(&ring, vec![2], vec![vec![1]]).is_err());
    }

    #[test]
    fn well_definedness_congruences() {
        let ring = ring_z3(3);
        // entry from the order-3 generator into Z/9 must be divisible by 3
        assert!(make_module(&ring, vec![2, 1], vec![vec![1, 1], vec![0, 1]]).is_err());
        assert!(make_module(&ring, vec![2, 1], vec![vec![1, 3], vec![1, 1]]).is_ok());
    }
}
