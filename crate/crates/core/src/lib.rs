//! Exact-arithmetic laboratory for cokernel statistics of random matrices
//! over rings of the form `(Z/l^N)[x]/(P)`, together with the symplectic
//! coset model on `GSp_2g` and an empirical census of class groups of
//! hyperelliptic curves over small finite fields.
//!
//! The crate is organised in layers:
//!
//! - [`ring`]: residue arithmetic, polynomial factorization mod `l`,
//!   Hensel-lifted quotient rings and the normalizing constants
//!   `prod (1 - Q^-i)`.
//! - [`matrix`]: dense matrices over `Z/l^N`, Smith normal form over this
//!   local principal ideal ring, uniform random matrices, and uniform
//!   sampling from `Sp_2g` and its multiplier-`q` coset.
//! - [`abgrp`]: linear algebra over finite abelian `l`-groups of mixed
//!   exponents (kernels, subgroup bases, quotients with induced actions).
//! - [`modcat`]: finite modules with Frobenius action: Hom/Surj/Aut
//!   counting, isomorphism testing, exterior squares with twist, the
//!   `d`-invariant and enlargements.
//! - [`randmod`]: the random models and measures, exact small-case
//!   enumeration, rectangular and torsion-ring identities, and the
//!   moment-operator inversion.
//! - [`census`]: hyperelliptic curves `y^2 = f(x)`, Cantor arithmetic on
//!   Jacobians, zeta point counts, and class-group statistics compared
//!   against the random models.

pub mod abgrp;
pub mod census;
pub mod matrix;
pub mod modcat;
pub mod randmod;
pub mod ring;
