//! Exterior squares with their induced action, the twist-fixed locus, and
//! pushforward of bivectors along homomorphisms.
//!
//! For `A = (+) Z/l^{a_i}` the exterior square is `(+)_{i<j} Z/l^min(a_i,a_j)`
//! on the generators `e_i /\ e_j`, and an endomorphism `F` induces the
//! matrix of 2x2 minors. The decoration locus is the subgroup
//! `{ w : F_wedge(w) = q w }`, the fixed points of the inverse-twisted
//! action.

use super::{pow, FiniteModule, ModuleError};
use crate::abgrp::{self, Basis, Shape};

#[derive(Clone, Debug)]
pub struct WedgeData {
    ell: u64,
    /// Generator index pairs `(i, j)`, `i < j`, in lexicographic order.
    pub pairs: Vec<(usize, usize)>,
    /// Cyclic order exponents `min(a_i, a_j)` per pair.
    pub orders: Vec<u32>,
    /// Induced action on the wedge generators; row `r` mod `l^{orders[r]}`.
    pub action: Vec<Vec<u64>>,
}

impl WedgeData {
    pub fn rank(&self) -> usize {
        self.pairs.len()
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.ell, self.orders.clone())
    }

    pub fn order_exponent(&self) -> u32 {
        self.orders.iter().sum()
    }

    pub fn apply_action(&self, omega: &[u64]) -> Vec<u64> {
        super::smap::apply(&self.orders, &self.action, omega, self.ell)
    }

    /// Basis of `{ w : F_wedge(w) = q w }`.
    pub fn twist_fixed_basis(&self, q: u64) -> Basis {
        let shape = self.shape();
        let n = self.rank();
        let mut entries = self.action.clone();
        for (r, row) in entries.iter_mut().enumerate() {
            let m = pow(self.ell, self.orders[r]);
            row[r] = (row[r] + m - q % m) % m;
            let _ = n;
        }
        abgrp::kernel_shaped(&entries, &shape, &shape)
    }

    /// All twist-fixed elements, when the subgroup is small enough.
    pub fn twist_fixed_points(&self, q: u64, limit: u128) -> Result<Vec<Vec<u64>>, ModuleError> {
        let basis = self.twist_fixed_basis(q);
        let size = basis.order(self.ell);
        if size > limit {
            return Err(ModuleError::EnumerationTooLarge { size, limit });
        }
        Ok(basis.enumerate(&self.shape()).collect())
    }
}

/// The exterior square of the underlying group with the action induced by
/// the module's Frobenius.
pub fn wedge_square(m: &FiniteModule) -> WedgeData {
    let ell = m.ell();
    let part = m.partition();
    let n = part.len();
    let mut pairs = Vec::new();
    let mut orders = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
            orders.push(part[i].min(part[j]));
        }
    }
    let f = m.action();
    let action: Vec<Vec<u64>> = pairs
        .iter()
        .zip(&orders)
        .map(|(&(k, l), &ord)| {
            let md = pow(ell, ord) as u128;
            pairs
                .iter()
                .map(|&(i, j)| {
                    // minor: F[k][i] F[l][j] - F[l][i] F[k][j]
                    let pos = f[k][i] as u128 * f[l][j] as u128 % md;
                    let neg = f[l][i] as u128 * f[k][j] as u128 % md;
                    ((pos + md - neg) % md) as u64
                })
                .collect()
        })
        .collect();
    WedgeData { ell, pairs, orders, action }
}

/// Pushforward of a bivector along a homomorphism: wedge-square the map and
/// apply it, expanding by biadditivity and alternation.
pub fn pushforward_form(
    src: &FiniteModule,
    tgt: &FiniteModule,
    t: &[Vec<u64>],
    omega: &[u64],
) -> Vec<u64> {
    pushforward_entries(src.partition(), tgt.partition(), t, omega, src.ell())
}

/// Raw-entry variant used by hot loops.
pub(crate) fn pushforward_entries(
    src_part: &[u32],
    tgt_part: &[u32],
    t: &[Vec<u64>],
    omega: &[u64],
    ell: u64,
) -> Vec<u64> {
    let n_src = src_part.len();
    let n_tgt = tgt_part.len();
    let src_pairs: Vec<(usize, usize)> = (0..n_src)
        .flat_map(|i| (i + 1..n_src).map(move |j| (i, j)))
        .collect();
    debug_assert_eq!(src_pairs.len(), omega.len());
    let mut out = Vec::new();
    for k in 0..n_tgt {
        for l in k + 1..n_tgt {
            let md = pow(ell, tgt_part[k].min(tgt_part[l])) as u128;
            let mut acc: u128 = 0;
            for (&(i, j), &w) in src_pairs.iter().zip(omega) {
                if w == 0 {
                    continue;
                }
                let pos = t[k][i] as u128 * t[l][j] as u128 % md;
                let neg = t[l][i] as u128 * t[k][j] as u128 % md;
                acc = (acc + w as u128 * ((pos + md - neg) % md)) % md;
            }
            out.push(acc as u64);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::test_rings::*;
    use super::super::{make_module, smap};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wedge_of_cyclic_is_trivial() {
        let ring = ring_z3(2);
        let m = make_module(&ring, vec![1], vec![vec![1]]).unwrap();
        let w = wedge_square(&m);
        assert_eq!(w.rank(), 0);
    }

    #[test]
    fn wedge_of_mixed_orders() {
        // Z/3 (+) Z/9: wedge is Z/3
        let ring = ring_z3(3);
        let m = make_module(&ring, vec![2, 1], vec![vec![1, 0], vec![0, 1]]).unwrap();
        let w = wedge_square(&m);
        assert_eq!(w.orders, vec![1]);
    }

    #[test]
    fn twist_fixed_counts_depend_on_q() {
        // (Z/3)^2 with F = id: fixed points of (q^-1 F) on the wedge are
        // killed by q - 1: three for q = 1 mod 3, only zero for q = 2 mod 3
        let ring1 = ring_z3_q(1, 7); // q = 7 = 1 mod 3
        let m1 = make_module(&ring1, vec![1, 1], vec![vec![1, 0], vec![0, 1]]).unwrap();
        let w1 = wedge_square(&m1);
        assert_eq!(w1.twist_fixed_points(7, 1 << 20).unwrap().len(), 3);

        let ring2 = ring_z3_q(1, 2); // q = 2 mod 3
        let m2 = make_module(&ring2, vec![1, 1], vec![vec![1, 0], vec![0, 1]]).unwrap();
        let w2 = wedge_square(&m2);
        assert_eq!(w2.twist_fixed_points(2, 1 << 20).unwrap().len(), 1);
    }

    #[test]
    fn pushforward_bilinearity_examples() {
        let ring = ring_z3(1);
        let id4: Vec<Vec<u64>> =
            (0..4).map(|i| (0..4).map(|j| u64::from(i == j)).collect()).collect();
        let m4 = make_module(&ring, vec![1; 4], id4.clone()).unwrap();
        let id2: Vec<Vec<u64>> =
            (0..2).map(|i| (0..2).map(|j| u64::from(i == j)).collect()).collect();
        let m2 = make_module(&ring, vec![1; 2], id2).unwrap();
        // identity pushforward preserves omega
        let omega = vec![1u64, 0, 0, 0, 0, 1]; // e1^e2 + e3^e4
        assert_eq!(pushforward_form(&m4, &m4, &id4, &omega), omega);
        // T: e1 -> a, e2 -> b, e3, e4 -> 0 sends omega to a^b
        let t = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]];
        assert_eq!(pushforward_form(&m4, &m2, &t, &omega), vec![1]);
        // a map with cyclic image kills every bivector
        let t_cyc = vec![vec![1, 1, 2, 0], vec![2, 2, 4 % 3, 0]];
        assert_eq!(pushforward_form(&m4, &m2, &t_cyc, &omega), vec![0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn wedge_is_functorial(seed in 0u64..5000) {
            use rand::Rng;
            use rand_chacha::rand_core::SeedableRng;
            // two commuting-free random maps S: A -> B, T: B -> C between
            // elementary modules: wedge(T o S) = wedge(T) o wedge(S)
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ring = ring_z3(1);
            let dims = [3usize, 4, 3];
            let id = |n: usize| -> Vec<Vec<u64>> {
                (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
            };
            let mods: Vec<FiniteModule> = dims
                .iter()
                .map(|&n| make_module(&ring, vec![1; n], id(n)).unwrap())
                .collect();
            let rand_map = |rng: &mut rand_chacha::ChaCha8Rng, r: usize, c: usize| {
                (0..r)
                    .map(|_| (0..c).map(|_| rng.random_range(0..3u64)).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            };
            let s = rand_map(&mut rng, dims[1], dims[0]);
            let t = rand_map(&mut rng, dims[2], dims[1]);
            let ts = smap::compose(mods[2].partition(), &t, &s, 3);
            // compare pushforwards on every wedge generator of A
            let wedge_rank_a = dims[0] * (dims[0] - 1) / 2;
            for g in 0..wedge_rank_a {
                let mut omega = vec![0u64; wedge_rank_a];
                omega[g] = 1;
                let through_b = {
                    let mid = pushforward_form(&mods[0], &mods[1], &s, &omega);
                    pushforward_form(&mods[1], &mods[2], &t, &mid)
                };
                let direct = pushforward_form(&mods[0], &mods[2], &ts, &omega);
                prop_assert_eq!(through_b, direct);
            }
        }

        #[test]
        fn pushforward_is_equivariant(seed in 0u64..5000) {
            use rand::Rng;
            use rand_chacha::rand_core::SeedableRng;
            // if T F1 = F2 T then wedge(T) intertwines the induced actions
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ring = ring_x2_minus_1(1, 7);
            // F1 = diag(1,1,2), F2 = diag(1,2): equivariant maps have block
            // structure; sample T with T[0][0], T[0][1] free, T[1][2] free
            let f1 = vec![vec![1u64, 0, 0], vec![0, 1, 0], vec![0, 0, 2]];
            let f2 = vec![vec![1u64, 0], vec![0, 2]];
            let m1 = make_module(&ring, vec![1, 1, 1], f1.clone()).unwrap();
            let m2 = make_module(&ring, vec![1, 1], f2.clone()).unwrap();
            let t = vec![
                vec![rng.random_range(0..3u64), rng.random_range(0..3u64), 0],
                vec![0, 0, rng.random_range(0..3u64)],
            ];
            // check the premise
            let tf1 = smap::compose(m2.partition(), &t, &f1, 3);
            let f2t = smap::compose(m2.partition(), &f2, &t, 3);
            prop_assert_eq!(&tf1, &f2t);
            let w1 = wedge_square(&m1);
            let w2 = wedge_square(&m2);
            for g in 0..w1.rank() {
                let mut omega = vec![0u64; w1.rank()];
                omega[g] = 1;
                let lhs = pushforward_form(&m1, &m2, &t, &w1.apply_action(&omega));
                let rhs = w2.apply_action(&pushforward_form(&m1, &m2, &t, &omega));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
