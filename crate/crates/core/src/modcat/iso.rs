//! Isomorphism testing.
//!
//! Over products of unramified DVRs the per-block partitions classify
//! modules completely, so the test is a label comparison. Elsewhere
//! (multiplicity blocks, the torsion ring) the procedure is: compare cheap
//! fingerprints, search `Hom_R(M1, M2)` for an invertible element (first at
//! random, then exhaustively when the group is small), and report an
//! inconclusive result rather than guess.

use super::{hom_group, pow, smap, FiniteModule, ModuleError, ModuleRing};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const RANDOM_TRIES: usize = 80;
// fixed stream so the test is a pure function of its inputs
const ISO_SEED: u64 = 0x150_cef7_5eed;

/// Invariant data cheap to compute and constant on isomorphism classes.
pub fn fingerprint(m: &FiniteModule) -> String {
    let ell = m.ell();
    let mut parts: Vec<String> = Vec::new();
    parts.push(format!("part{:?}", m.partition()));
    // per-layer kernel dimension profiles of the maximal-ideal generators:
    // on each graded layer l^k M / l^{k+1} M, the ranks of g(F)^e determine
    // the local eigenstructure
    let gens: Vec<Vec<Vec<u64>>> = match m.ring().as_ref() {
        ModuleRing::Quotient(r) => r
            .blocks()
            .iter()
            .map(|b| m.poly_action(&b.irreducible))
            .collect(),
        ModuleRing::Torsion { .. } => vec![m.action().to_vec()],
    };
    let max_layer = m.exponent();
    for k in 0..max_layer {
        // indices alive on layer k
        let alive: Vec<usize> =
            (0..m.rank()).filter(|&i| m.partition()[i] > k).collect();
        let n = alive.len();
        for (gi, g) in gens.iter().enumerate() {
            let layer: Vec<Vec<u64>> = alive
                .iter()
                .map(|&i| alive.iter().map(|&j| g[i][j] % ell).collect())
                .collect();
            let mut power = layer.clone();
            let mut profile = Vec::new();
            for _ in 0..n {
                let r = smap::rank_mod_ell(&power, n, n, ell);
                profile.push(r);
                if r == 0 {
                    break;
                }
                power = mul_mod_ell(&power, &layer, ell);
            }
            parts.push(format!("L{k}g{gi}{profile:?}"));
        }
    }
    parts.join(";")
}

fn mul_mod_ell(a: &[Vec<u64>], b: &[Vec<u64>], ell: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = 0u64;
                    for k in 0..n {
                        acc = (acc + a[i][k] * b[k][j]) % ell;
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Whether the modules are isomorphic over their common ring.
///
/// Errors with [`ModuleError::IsoUndetermined`] when every conclusive route
/// is out of reach (never on maximal-order rings).
pub fn is_isomorphic(
    m1: &FiniteModule,
    m2: &FiniteModule,
    limit: u128,
) -> Result<bool, ModuleError> {
    if m1.ring() != m2.ring() {
        return Err(ModuleError::RingMismatch);
    }
    if m1.partition() != m2.partition() {
        return Ok(false);
    }
    if m1.is_zero() {
        return Ok(true);
    }
    // complete classification over products of unramified DVRs
    if let ModuleRing::Quotient(r) = m1.ring().as_ref() {
        if r.all_blocks_maximal() {
            let c1 = super::split::crt_split(m1)?;
            let c2 = super::split::crt_split(m2)?;
            return Ok(c1
                .iter()
                .zip(&c2)
                .all(|(a, b)| a.partition() == b.partition()));
        }
    }
    if fingerprint(m1) != fingerprint(m2) {
        return Ok(false);
    }
    let hom = hom_group(m1, m2)?;
    let n = m1.rank();
    let ell = m1.ell();
    // quick bound: |Hom(M1,M2)| must match |Hom(M2,M1)| and the
    // endomorphism rings must have equal size
    let hom_back = hom_group(m2, m1)?;
    if hom.order() != hom_back.order() {
        return Ok(false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ISO_SEED);
    for _ in 0..RANDOM_TRIES {
        let t = hom.random_element(&mut rng);
        if smap::rank_mod_ell(&t, n, n, ell) == n {
            return Ok(true);
        }
    }
    if hom.order() <= limit {
        for t in hom.enumerate() {
            if smap::rank_mod_ell(&t, n, n, ell) == n {
                return Ok(true);
            }
        }
        return Ok(false);
    }
    Err(ModuleError::IsoUndetermined)
}
