//! Coefficient-vector polynomial arithmetic mod `m`.
//!
//! Vectors are ascending-degree with trailing zeros trimmed; the zero
//! polynomial is the empty vector. Division requires a monic (or unit
//! leading coefficient) divisor, which is all the callers ever need:
//! factorization works mod the prime `l`, Hensel lifting divides by monic
//! lifts mod `l^N`.

pub type Coeffs = Vec<u64>;

pub fn trim(v: &mut Coeffs) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub fn deg(a: &[u64]) -> usize {
    a.len().saturating_sub(1)
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn invmod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (a as i128, m as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "attempted to invert a non-unit");
    (((s0 % m as i128) + m as i128) % m as i128) as u64
}

pub fn add(a: &[u64], b: &[u64], m: u64) -> Coeffs {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0) as u128;
        let y = b.get(i).copied().unwrap_or(0) as u128;
        *slot = ((x + y) % m as u128) as u64;
    }
    trim(&mut out);
    out
}

pub fn sub(a: &[u64], b: &[u64], m: u64) -> Coeffs {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0) as u128;
        let y = b.get(i).copied().unwrap_or(0) as u128;
        *slot = ((x + m as u128 - y % m as u128) % m as u128) as u64;
    }
    trim(&mut out);
    out
}

pub fn scale(a: &[u64], c: u64, m: u64) -> Coeffs {
    let mut out: Coeffs = a.iter().map(|&x| mulmod(x, c, m)).collect();
    trim(&mut out);
    out
}

pub fn mul(a: &[u64], b: &[u64], m: u64) -> Coeffs {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let t = out[i + j] as u128 + x as u128 * y as u128 % m as u128;
            out[i + j] = (t % m as u128) as u64;
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder by a divisor with unit leading coefficient.
pub fn divrem(a: &[u64], b: &[u64], m: u64) -> (Coeffs, Coeffs) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let lc_inv = invmod(*b.last().unwrap() % m, m);
    let mut rem: Coeffs = a.to_vec();
    trim(&mut rem);
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let mut quot = vec![0u64; rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let factor = mulmod(*rem.last().unwrap(), lc_inv, m);
        quot[shift] = factor;
        for (j, &bc) in b.iter().enumerate() {
            let t = mulmod(factor, bc, m);
            let idx = shift + j;
            rem[idx] = ((rem[idx] as u128 + m as u128 - t as u128) % m as u128) as u64;
        }
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

pub fn rem(a: &[u64], b: &[u64], m: u64) -> Coeffs {
    divrem(a, b, m).1
}

pub fn eval(a: &[u64], x: u64, m: u64) -> u64 {
    let mut acc = 0u64;
    for &c in a.iter().rev() {
        acc = ((acc as u128 * x as u128 + c as u128) % m as u128) as u64;
    }
    acc
}

pub fn derivative(a: &[u64], m: u64) -> Coeffs {
    if a.len() <= 1 {
        return vec![];
    }
    let mut out: Coeffs =
        a.iter().enumerate().skip(1).map(|(i, &c)| mulmod(c, i as u64 % m, m)).collect();
    trim(&mut out);
    out
}

pub fn make_monic(a: &[u64], m: u64) -> Coeffs {
    if a.is_empty() {
        return vec![];
    }
    scale(a, invmod(*a.last().unwrap(), m), m)
}

/// Monic gcd over the prime field `F_p`.
pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Coeffs {
    let (mut f, mut g) = (a.to_vec(), b.to_vec());
    trim(&mut f);
    trim(&mut g);
    while !g.is_empty() {
        let r = rem(&f, &g, p);
        f = g;
        g = r;
    }
    make_monic(&f, p)
}

/// Extended gcd over `F_p`: returns monic `g` and `(s, t)` with
/// `s*a + t*b = g`.
pub fn xgcd(a: &[u64], b: &[u64], p: u64) -> (Coeffs, Coeffs, Coeffs) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    trim(&mut r0);
    trim(&mut r1);
    let (mut s0, mut s1) = (vec![1u64], vec![]);
    let (mut t0, mut t1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let ns = sub(&s0, &mul(&q, &s1, p), p);
        let nt = sub(&t0, &mul(&q, &t1, p), p);
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, ns);
        (t0, t1) = (t1, nt);
    }
    if r0.is_empty() {
        return (r0, s0, t0);
    }
    let lc_inv = invmod(*r0.last().unwrap(), p);
    (scale(&r0, lc_inv, p), scale(&s0, lc_inv, p), scale(&t0, lc_inv, p))
}

/// `base^e mod (f)` over `F_p`, with `e` given as a u128.
pub fn pow_mod(base: &[u64], mut e: u128, f: &[u64], p: u64) -> Coeffs {
    let mut acc = vec![1u64];
    let mut b = rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), f, p);
        }
        b = rem(&mul(&b, &b, p), f, p);
        e >>= 1;
    }
    acc
}
