//! Factorization of the modulus polynomial: squarefree decomposition,
//! distinct-degree and randomized equal-degree splitting over `F_l`, then
//! Hensel lifting of the pairwise-coprime blocks to `Z/l^N`.

use super::poly::{self, Coeffs};
use super::{LocalBlock, Poly, PrimePower};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Equal-degree splitting is randomized; the stream is fixed so that ring
/// construction is deterministic.
const FACTOR_SEED: u64 = 0x9e3779b97f4a7c15;

/// Squarefree decomposition over `F_p`: returns `(g, multiplicity)` pairs
/// with `g` monic squarefree and pairwise coprime, `f = prod g^mult`.
fn squarefree_decomposition(f: &[u64], p: u64) -> Vec<(Coeffs, u32)> {
    let mut out: BTreeMap<Coeffs, u32> = BTreeMap::new();
    squarefree_into(f, p, 1, &mut out);
    out.into_iter().collect()
}

fn squarefree_into(f: &[u64], p: u64, weight: u32, out: &mut BTreeMap<Coeffs, u32>) {
    let f = poly::make_monic(f, p);
    if poly::deg(&f) == 0 {
        return;
    }
    let df = poly::derivative(&f, p);
    if df.is_empty() {
        // f = v(x^p); over F_p the p-th root just contracts exponents
        let mut v = Vec::new();
        for (i, &c) in f.iter().enumerate() {
            if i % p as usize == 0 {
                v.push(c);
            } else {
                debug_assert_eq!(c, 0);
            }
        }
        squarefree_into(&v, p, weight * p as u32, out);
        return;
    }
    let mut c = poly::gcd(&f, &df, p);
    let mut w = poly::divrem(&f, &c, p).0;
    let mut i = 1u32;
    while poly::deg(&w) > 0 {
        let y = poly::gcd(&w, &c, p);
        let fac = poly::divrem(&w, &y, p).0;
        if poly::deg(&fac) > 0 {
            *out.entry(poly::make_monic(&fac, p)).or_insert(0) += weight * i;
        }
        w = y.clone();
        c = poly::divrem(&c, &y, p).0;
        i += 1;
    }
    if poly::deg(&c) > 0 {
        // remaining p-th power part
        let mut v = Vec::new();
        for (j, &cc) in c.iter().enumerate() {
            if j % p as usize == 0 {
                v.push(cc);
            } else {
                debug_assert_eq!(cc, 0);
            }
        }
        squarefree_into(&v, p, weight * p as u32, out);
    }
}

/// Distinct-degree factorization of a monic squarefree `f` over `F_p`:
/// returns `(product of irreducibles of degree d, d)`.
fn distinct_degree(f: &[u64], p: u64) -> Vec<(Coeffs, usize)> {
    let mut out = Vec::new();
    let mut f = poly::make_monic(f, p);
    let mut h = vec![0u64, 1]; // x
    let mut d = 0usize;
    while poly::deg(&f) >= 1 {
        d += 1;
        if 2 * d > poly::deg(&f) {
            out.push((f.clone(), poly::deg(&f)));
            break;
        }
        h = poly::pow_mod(&h, p as u128, &f, p);
        let hx = poly::sub(&h, &[0, 1], p);
        let g = poly::gcd(&hx, &f, p);
        if poly::deg(&g) > 0 {
            out.push((g.clone(), d));
            f = poly::divrem(&f, &g, p).0;
            h = poly::rem(&h, &f, p);
        }
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting: `f` is a monic squarefree
/// product of irreducibles all of degree `d`.
fn equal_degree(f: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<Coeffs> {
    let n = poly::deg(f);
    if n == d {
        return vec![f.to_vec()];
    }
    assert!(
        (d as f64) * (p as f64).log2() < 120.0,
        "equal-degree splitting exponent out of supported range"
    );
    loop {
        let a: Coeffs = {
            let mut v: Coeffs = (0..n).map(|_| rng.random_range(0..p)).collect();
            poly::trim(&mut v);
            v
        };
        if a.len() <= 1 {
            continue;
        }
        let g = poly::gcd(&a, f, p);
        let split = if poly::deg(&g) > 0 && poly::deg(&g) < n {
            Some(g)
        } else if p == 2 {
            // trace map over F_2: a + a^2 + ... + a^(2^(d-1))
            let mut t = a.clone();
            let mut ai = a.clone();
            for _ in 1..d {
                ai = poly::rem(&poly::mul(&ai, &ai, p), f, p);
                t = poly::add(&t, &ai, p);
            }
            let g = poly::gcd(&t, f, p);
            (poly::deg(&g) > 0 && poly::deg(&g) < n).then_some(g)
        } else {
            let e = (p as u128).pow(d as u32) >> 1; // (p^d - 1)/2
            let b = poly::pow_mod(&a, e, f, p);
            let bm1 = poly::sub(&b, &[1], p);
            let g = poly::gcd(&bm1, f, p);
            (poly::deg(&g) > 0 && poly::deg(&g) < n).then_some(g)
        };
        if let Some(g) = split {
            let h = poly::divrem(f, &g, p).0;
            let mut out = equal_degree(&g, d, p, rng);
            out.extend(equal_degree(&h, d, p, rng));
            return out;
        }
    }
}

/// Full factorization of a monic polynomial over `F_p` into irreducibles
/// with multiplicities, sorted canonically.
pub fn factor_mod_p(f: &[u64], p: u64) -> Vec<(Coeffs, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(FACTOR_SEED);
    let mut out: BTreeMap<Coeffs, u32> = BTreeMap::new();
    for (sq, mult) in squarefree_decomposition(f, p) {
        for (prod, d) in distinct_degree(&sq, p) {
            for irr in equal_degree(&prod, d, p, &mut rng) {
                *out.entry(irr).or_insert(0) += mult;
            }
        }
    }
    let mut v: Vec<(Coeffs, u32)> = out.into_iter().collect();
    v.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    v
}

/// One linear Hensel step: given monic coprime-mod-`l` `f, g` with
/// `target = f*g mod l^k`, returns `(f', g')` with `target = f'*g' mod l^(k+1)`.
fn hensel_step(
    target: &[u64],
    f: &[u64],
    g: &[u64],
    s: &[u64],
    t: &[u64],
    pp: &PrimePower,
    k: u32,
) -> (Coeffs, Coeffs) {
    let m = pp.modulus();
    let ell = pp.ell();
    let lk = pp.ell_pow(k);
    // e = (target - f*g) / l^k, a polynomial mod l
    let diff = poly::sub(target, &poly::mul(f, g, m), m);
    let e: Coeffs = {
        let mut v: Coeffs = diff
            .iter()
            .map(|&c| {
                debug_assert_eq!(c % lk, 0);
                (c / lk) % ell
            })
            .collect();
        poly::trim(&mut v);
        v
    };
    if e.is_empty() {
        return (f.to_vec(), g.to_vec());
    }
    // corrections: f += l^k * (t*e mod f), g += l^k * (s*e mod g)
    let df = poly::rem(&poly::mul(t, &e, ell), &poly_mod_ell(f, ell), ell);
    let dg = poly::rem(&poly::mul(s, &e, ell), &poly_mod_ell(g, ell), ell);
    let f1 = poly::add(f, &poly::scale(&df, lk, m), m);
    let g1 = poly::add(g, &poly::scale(&dg, lk, m), m);
    (f1, g1)
}

fn poly_mod_ell(f: &[u64], ell: u64) -> Coeffs {
    let mut v: Coeffs = f.iter().map(|&c| c % ell).collect();
    poly::trim(&mut v);
    v
}

/// Lifts a factorization `target = prod factors` from mod `l` to mod `l^N`.
/// Factors must be monic and pairwise coprime mod `l`.
fn hensel_lift_list(target: &[u64], factors: &[Coeffs], pp: &PrimePower) -> Vec<Coeffs> {
    if factors.len() == 1 {
        return vec![target.to_vec()];
    }
    let ell = pp.ell();
    let m = pp.modulus();
    let f0 = factors[0].clone();
    let rest_mod_ell = factors[1..]
        .iter()
        .fold(vec![1u64], |acc, f| poly::mul(&acc, f, ell));
    let (gcd1, s, t) = poly::xgcd(&f0, &rest_mod_ell, ell);
    assert_eq!(gcd1, vec![1], "Hensel blocks are not coprime mod l");
    // lift the pair (f0, rest) level by level
    let mut f = f0.clone();
    let mut g = rest_mod_ell.clone();
    for k in 1..pp.level() {
        (f, g) = hensel_step(target, &f, &g, &s, &t, pp, k);
    }
    debug_assert_eq!(poly::mul(&f, &g, m), poly::make_monic(target, m));
    let mut out = vec![f];
    out.extend(hensel_lift_list(&g, &factors[1..], pp));
    out
}

/// Factors `P` mod `l`, groups each irreducible with its multiplicity into a
/// block, and Hensel-lifts the pairwise-coprime blocks to level `N`.
pub fn local_blocks(p_poly: &Poly, pp: &PrimePower) -> Vec<LocalBlock> {
    let ell = pp.ell();
    let f_bar = poly_mod_ell(&p_poly.coeffs, ell);
    let irreducibles = factor_mod_p(&f_bar, ell);
    let block_polys: Vec<Coeffs> = irreducibles
        .iter()
        .map(|(g, mult)| {
            let mut b = vec![1u64];
            for _ in 0..*mult {
                b = poly::mul(&b, g, ell);
            }
            b
        })
        .collect();
    let lifted = hensel_lift_list(&p_poly.coeffs, &block_polys, pp);
    irreducibles
        .into_iter()
        .zip(lifted)
        .map(|((g, mult), lift)| LocalBlock {
            lift: Poly::new(lift),
            residue_degree: poly::deg(&g) as u32,
            irreducible: Poly::new(g),
            multiplicity: mult,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_product(factors: &[(Coeffs, u32)], p: u64) -> Coeffs {
        factors.iter().fold(vec![1u64], |acc, (g, m)| {
            let mut out = acc;
            for _ in 0..*m {
                out = poly::mul(&out, g, p);
            }
            out
        })
    }

    #[test]
    fn factor_squarefree_split() {
        // x^2 - 1 = (x-1)(x+1) mod 3
        let fs = factor_mod_p(&[2, 0, 1], 3);
        assert_eq!(fs.len(), 2);
        assert!(fs.iter().all(|(_, m)| *m == 1));
        assert_eq!(poly_product(&fs, 3), vec![2, 0, 1]);
    }

    #[test]
    fn factor_with_multiplicity() {
        // (x-1)^2 (x+1) mod 3 = x^3 + ... compute: (x^2-2x+1)(x+1) = x^3 - x^2 - x + 1
        let f = poly::mul(&poly::mul(&[2, 1], &[2, 1], 3), &[1, 1], 3);
        let fs = factor_mod_p(&f, 3);
        assert_eq!(fs.len(), 2);
        let mults: Vec<u32> = fs.iter().map(|(_, m)| *m).collect();
        assert!(mults.contains(&2) && mults.contains(&1));
    }

    #[test]
    fn factor_pth_power() {
        // (x+1)^3 mod 3 = x^3 + 1
        let fs = factor_mod_p(&[1, 0, 0, 1], 3);
        assert_eq!(fs, vec![(vec![1, 1], 3)]);
    }

    #[test]
    fn factor_char_two() {
        // x^2 + x + 1 irreducible over F_2; (x^2+x+1)(x+1) = x^3 + 1... check
        let f = poly::mul(&[1, 1, 1], &[1, 1], 2);
        let fs = factor_mod_p(&f, 2);
        assert_eq!(fs.len(), 2);
        assert_eq!(poly_product(&fs, 2), f);
    }

    #[test]
    fn hensel_lift_reconstructs() {
        // x^2 - 1 mod 3^4: blocks (x-1),(x+1) lifted, product must equal input
        let pp = PrimePower::new(3, 4).unwrap();
        let p_poly = Poly::from_i64(&[-1, 0, 1], &pp);
        let blocks = local_blocks(&p_poly, &pp);
        assert_eq!(blocks.len(), 2);
        let product = blocks.iter().fold(vec![1u64], |acc, b| {
            poly::mul(&acc, &b.lift.coeffs, pp.modulus())
        });
        assert_eq!(product, p_poly.coeffs);
        // each lifted block reduces to g^mult mod l
        for b in &blocks {
            let back = poly_mod_ell(&b.lift.coeffs, 3);
            let mut expect = vec![1u64];
            for _ in 0..b.multiplicity {
                expect = poly::mul(&expect, &b.irreducible.coeffs, 3);
            }
            assert_eq!(back, expect);
        }
    }

    #[test]
    fn hensel_lift_higher_degree() {
        // (x^2+1)(x-1)(x+1) = x^4 - 1 mod 3^5
        let pp = PrimePower::new(3, 5).unwrap();
        let p_poly = Poly::from_i64(&[-1, 0, 0, 0, 1], &pp);
        let blocks = local_blocks(&p_poly, &pp);
        assert_eq!(blocks.len(), 3);
        let product = blocks.iter().fold(vec![1u64], |acc, b| {
            poly::mul(&acc, &b.lift.coeffs, pp.modulus())
        });
        assert_eq!(product, p_poly.coeffs);
        let degrees: Vec<u32> = blocks.iter().map(|b| b.residue_degree).collect();
        assert_eq!(degrees.iter().sum::<u32>(), 4);
    }
}
