//! Uniform sampling from `Sp_2g(Z/l^N)` and from the coset of matrices
//! scaling the standard symplectic form by a fixed unit `q`.
//!
//! The sampler builds a random symplectic basis one hyperbolic pair at a
//! time: `e_1` uniform among unimodular vectors, `f_1` uniform among
//! vectors pairing to 1 with `e_1`, then recurse inside the symplectic
//! complement. Transitivity of `Sp` on unimodular vectors makes the output
//! exactly Haar-distributed, which the tests can verify by exhaustion at
//! `l = 3, g = 1`.

use super::Mat;
use crate::ring::PrimePower;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymplecticError {
    #[error("the symplectic model requires an odd prime, got l = 2")]
    EllEven,
    #[error("multiplier {q} is not a unit mod {ell}")]
    MultiplierNotUnit { q: u64, ell: u64 },
    #[error("genus must be at least 1")]
    GenusZero,
}

/// Rank-`2g` free module with the standard form in the basis ordering
/// `e_1, f_1, e_2, f_2, ...`: `<e_i, f_i> = 1`.
#[derive(Clone, Debug)]
pub struct SymplecticSpace {
    genus: usize,
    modulus: PrimePower,
    multiplier: u64,
}

impl SymplecticSpace {
    pub fn new(genus: usize, modulus: PrimePower, multiplier: u64) -> Result<Self, SymplecticError> {
        if modulus.ell() == 2 {
            return Err(SymplecticError::EllEven);
        }
        if genus == 0 {
            return Err(SymplecticError::GenusZero);
        }
        let q = multiplier % modulus.modulus();
        if !modulus.is_unit(q) {
            return Err(SymplecticError::MultiplierNotUnit { q, ell: modulus.ell() });
        }
        Ok(Self { genus, modulus, multiplier: q })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    pub fn modulus(&self) -> PrimePower {
        self.modulus
    }

    pub fn multiplier(&self) -> u64 {
        self.multiplier
    }

    /// The Gram matrix `J` of the standard form: antisymmetric, invertible,
    /// `J^2 = -1`.
    pub fn form_matrix(&self) -> Mat {
        let pp = self.modulus;
        let n = self.rank();
        let mut j = Mat::zero(n, n, pp);
        for i in 0..self.genus {
            j[(2 * i, 2 * i + 1)] = 1 % pp.modulus();
            j[(2 * i + 1, 2 * i)] = pp.neg(1);
        }
        j
    }

    /// `sigma_q`: fixes each `e_i`, scales each `f_i` by `q`; conjugating
    /// the form by it scales it by `q`.
    pub fn multiplier_matrix(&self) -> Mat {
        let pp = self.modulus;
        let n = self.rank();
        let mut s = Mat::identity(n, pp);
        for i in 0..self.genus {
            s[(2 * i + 1, 2 * i + 1)] = self.multiplier;
        }
        s
    }

    /// Checks `m^T J m = scale * J`.
    pub fn scales_form_by(&self, m: &Mat, scale: u64) -> bool {
        let j = self.form_matrix();
        m.transpose().mul(&j).mul(m) == j.scale(scale)
    }

    /// Coordinates of the standard bivector `sum e_i /\ f_i` on ambient
    /// basis pairs `(a, b), a < b`.
    pub fn standard_bivector(&self) -> Vec<((usize, usize), u64)> {
        (0..self.genus).map(|i| ((2 * i, 2 * i + 1), 1u64)).collect()
    }
}

/// Uniform element of `Sp_2g(Z/l^N)`.
pub fn random_symplectic<R: Rng + ?Sized>(space: &SymplecticSpace, rng: &mut R) -> Mat {
    let pp = space.modulus();
    let n = space.rank();
    let j = space.form_matrix();
    // columns of the new basis, in the order e_1, f_1, e_2, f_2, ...
    let mut basis: Vec<Vec<u64>> = Vec::with_capacity(n);
    // K: columns form a basis of the symplectic complement of the pairs
    // chosen so far (initially the whole space)
    let mut k = Mat::identity(n, pp);

    for _ in 0..space.genus() {
        let m = k.cols;
        // Gram matrix of the form restricted to the complement
        let gram = k.transpose().mul(&j).mul(&k);
        // e: uniform unimodular coordinate vector
        let x = loop {
            let v: Vec<u64> = (0..m).map(|_| rng.random_range(0..pp.modulus())).collect();
            if v.iter().any(|&c| pp.is_unit(c)) {
                break v;
            }
        };
        // c = row functional <x, .> in complement coordinates
        let c: Vec<u64> = {
            let xt = Mat { rows: 1, cols: m, modulus: pp, entries: x.clone() };
            xt.mul(&gram).entries
        };
        let pivot = c.iter().position(|&ci| pp.is_unit(ci)).expect("form is nondegenerate");
        // f: uniform with <x, f> = 1, via y = c_p^{-1} e_p + w, w uniform in ker(c)
        let cp_inv = pp.inverse(c[pivot]).unwrap();
        let mut y: Vec<u64> = (0..m).map(|_| rng.random_range(0..pp.modulus())).collect();
        // solve the pivot coordinate so that c . y = 1
        let mut rest: u64 = 0;
        for (idx, &ci) in c.iter().enumerate() {
            if idx != pivot {
                rest = pp.add(rest, pp.mul(ci, y[idx]));
            }
        }
        y[pivot] = pp.mul(cp_inv, pp.sub(1, rest));
        debug_assert_eq!(
            {
                let mut acc = 0u64;
                for (idx, &ci) in c.iter().enumerate() {
                    acc = pp.add(acc, pp.mul(ci, y[idx]));
                }
                acc
            },
            1 % pp.modulus()
        );

        let e_amb = k.apply(&x);
        let f_amb = k.apply(&y);
        basis.push(e_amb);
        basis.push(f_amb);

        if k.cols == 2 {
            break;
        }
        // project the complement coordinates off the new pair:
        // z(v) = v + <y, v> x - <x, v> y has <x, z> = <y, z> = 0
        let cy: Vec<u64> = {
            let yt = Mat { rows: 1, cols: m, modulus: pp, entries: y.clone() };
            yt.mul(&gram).entries
        };
        let mut projected: Vec<Vec<u64>> = Vec::with_capacity(m);
        for t in 0..m {
            let mut z = vec![0u64; m];
            z[t] = 1;
            let a = c[t]; // <x, e_t>
            let b = cy[t]; // <y, e_t>
            for idx in 0..m {
                // z += b * x - a * y
                let add = pp.mul(b, x[idx]);
                let sub = pp.mul(a, y[idx]);
                z[idx] = pp.sub(pp.add(z[idx], add), sub);
            }
            projected.push(z);
        }
        // Drop two coordinates (t1, t2) such that the 2x2 minor of the
        // column pair (x, y) at those rows is a unit: then the remaining
        // projected vectors form a basis of the complement (the determinant
        // of the full change of basis reduces to exactly that minor). Such
        // a pair exists because <x, y> = 1 is a unit combination of these
        // minors.
        let (t1, t2) = {
            let mut found = None;
            'outer: for s in 0..m {
                for t in s + 1..m {
                    let minor = pp.sub(pp.mul(x[s], y[t]), pp.mul(x[t], y[s]));
                    if pp.is_unit(minor) {
                        found = Some((s, t));
                        break 'outer;
                    }
                }
            }
            found.expect("unimodular pair has a unit 2x2 minor")
        };
        let keep: Vec<usize> = (0..m).filter(|&t| t != t1 && t != t2).collect();
        let mut new_k = Mat::zero(n, keep.len(), pp);
        for (col_new, &t) in keep.iter().enumerate() {
            let amb = k.apply(&projected[t]);
            for (r, &val) in amb.iter().enumerate() {
                new_k[(r, col_new)] = val;
            }
        }
        k = new_k;
    }

    let mut s = Mat::zero(n, n, pp);
    for (col, vec) in basis.iter().enumerate() {
        for (r, &val) in vec.iter().enumerate() {
            s[(r, col)] = val;
        }
    }
    debug_assert!(space.scales_form_by(&s, 1));
    s
}

/// Uniform element of the multiplier-`q` coset `sigma_q * Sp_2g`.
pub fn gsp_coset_sample<R: Rng + ?Sized>(space: &SymplecticSpace, rng: &mut R) -> Mat {
    let s = random_symplectic(space, rng);
    let f = space.multiplier_matrix().mul(&s);
    debug_assert!(space.scales_form_by(&f, space.multiplier()));
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn pp3(level: u32) -> PrimePower {
        PrimePower::new(3, level).unwrap()
    }

    #[test]
    fn rejects_even_prime_and_bad_multiplier() {
        let pp2 = PrimePower::new(2, 1).unwrap();
        assert_eq!(SymplecticSpace::new(1, pp2, 1).unwrap_err(), SymplecticError::EllEven);
        assert_eq!(
            SymplecticSpace::new(1, pp3(2), 3).unwrap_err(),
            SymplecticError::MultiplierNotUnit { q: 3, ell: 3 }
        );
        assert_eq!(SymplecticSpace::new(0, pp3(1), 1).unwrap_err(), SymplecticError::GenusZero);
    }

    #[test]
    fn form_matrix_squares_to_minus_one() {
        let space = SymplecticSpace::new(3, pp3(4), 1).unwrap();
        let j = space.form_matrix();
        let j2 = j.mul(&j);
        let minus_one = Mat::identity(6, pp3(4)).scale(pp3(4).neg(1));
        assert_eq!(j2, minus_one);
        assert_eq!(j.transpose(), j.scale(pp3(4).neg(1)));
    }

    #[test]
    fn samples_satisfy_defining_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (genus, level) in [(1usize, 1u32), (2, 2), (3, 3)] {
            let space = SymplecticSpace::new(genus, pp3(level), 1).unwrap();
            for _ in 0..25 {
                let s = random_symplectic(&space, &mut rng);
                assert!(space.scales_form_by(&s, 1));
                assert!(s.is_invertible());
            }
        }
    }

    #[test]
    fn coset_samples_scale_form_by_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let space = SymplecticSpace::new(2, pp3(2), 7).unwrap();
        for _ in 0..50 {
            let f = gsp_coset_sample(&space, &mut rng);
            assert!(space.scales_form_by(&f, 7));
        }
        // genus 2 over level 2, det must be a unit
        let f = gsp_coset_sample(&space, &mut rng);
        assert!(f.is_invertible());
    }

    #[test]
    fn rank_two_multiplier_is_determinant() {
        // in rank 2 the multiplier equals the determinant: exhaust over F_3
        let space = SymplecticSpace::new(1, pp3(1), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let f = gsp_coset_sample(&space, &mut rng);
            let det = pp3(1).sub(
                pp3(1).mul(f[(0, 0)], f[(1, 1)]),
                pp3(1).mul(f[(0, 1)], f[(1, 0)]),
            );
            assert_eq!(det, 2);
        }
        // multiplier 1 lands in SL_2
        let space1 = SymplecticSpace::new(1, pp3(1), 1).unwrap();
        let f = gsp_coset_sample(&space1, &mut rng);
        let det = pp3(1).sub(
            pp3(1).mul(f[(0, 0)], f[(1, 1)]),
            pp3(1).mul(f[(0, 1)], f[(1, 0)]),
        );
        assert_eq!(det, 1);
    }

    /// All elements of SL_2(F_3) by brute force.
    fn sl2_f3() -> Vec<[u64; 4]> {
        let mut out = Vec::new();
        for a in 0..3u64 {
            for b in 0..3u64 {
                for c in 0..3u64 {
                    for d in 0..3u64 {
                        if (3 + a * d % 3 - b * c % 3) % 3 == 1 {
                            out.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn genus_one_exhaustive_uniformity() {
        // Sp_2(F_3) = SL_2(F_3) has 24 elements; chi-square over 24000 draws
        let group = sl2_f3();
        assert_eq!(group.len(), 24);
        let space = SymplecticSpace::new(1, pp3(1), 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let trials = 24_000usize;
        let mut counts: HashMap<[u64; 4], u64> = HashMap::new();
        for _ in 0..trials {
            let s = random_symplectic(&space, &mut rng);
            let key = [s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)]];
            *counts.entry(key).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 24, "all group elements must appear");
        let p = 1.0 / 24.0;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for g in &group {
            let c = counts.get(g).copied().unwrap_or(0) as f64;
            assert!(
                (c - trials as f64 * p).abs() < 4.0 * sigma,
                "frequency of {g:?} out of range: {c}"
            );
        }
    }

    #[test]
    fn genus_two_first_pair_marginal_uniform() {
        // the first hyperbolic pair (e_1, f_1) of a genus-2 sample: e_1 is
        // uniform over the 80 unimodular vectors of F_3^4 and f_1 uniform
        // over the 27 vectors with <e_1, f_1> = 1
        let space = SymplecticSpace::new(2, pp3(1), 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let trials = 43_200usize;
        let mut e_counts: HashMap<[u64; 4], u64> = HashMap::new();
        let mut pair_counts: HashMap<([u64; 4], [u64; 4]), u64> = HashMap::new();
        for _ in 0..trials {
            let s = random_symplectic(&space, &mut rng);
            let e = [s[(0, 0)], s[(1, 0)], s[(2, 0)], s[(3, 0)]];
            let f = [s[(0, 1)], s[(1, 1)], s[(2, 1)], s[(3, 1)]];
            *e_counts.entry(e).or_insert(0) += 1;
            *pair_counts.entry((e, f)).or_insert(0) += 1;
        }
        assert_eq!(e_counts.len(), 80);
        let p = 1.0 / 80.0;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for &c in e_counts.values() {
            assert!((c as f64 - trials as f64 * p).abs() < 4.5 * sigma);
        }
        // each pair cell has probability 1/(80*27)
        assert_eq!(pair_counts.len(), 80 * 27);
        let expected = trials as f64 / (80.0 * 27.0);
        let chi2: f64 = pair_counts
            .values()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // 2159 dof at significance 1e-3: critical approx by Wilson-Hilferty
        let k = 2159.0f64;
        let z = 3.0902; // N(0,1) quantile for 1 - 1e-3
        let crit = k * (1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt()).powi(3);
        assert!(chi2 < crit, "pair chi-square {chi2} exceeds critical {crit}");
    }

    #[test]
    fn genus_one_chi_square_at_large_sample() {
        // chi-square goodness of fit at significance 1e-3 with 23 dof:
        // critical value 49.728
        let space = SymplecticSpace::new(1, pp3(1), 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 100_000usize;
        let mut counts: HashMap<[u64; 4], u64> = HashMap::new();
        for _ in 0..trials {
            let s = random_symplectic(&space, &mut rng);
            let key = [s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)]];
            *counts.entry(key).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 24);
        let expected = trials as f64 / 24.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 49.728, "chi-square statistic {chi2} exceeds the 1e-3 critical value");
    }
}
