//! Linear algebra over finite abelian `l`-groups of mixed exponents.
//!
//! A [`Shape`] is a group `(+) Z/l^{m_i}` presented by its coordinate
//! exponents. Everything reduces to Smith normal form at a uniform working
//! level `E = max m_i`: a shaped condition `sum c_j x_j = 0 mod l^{m_i}` is
//! the uniform condition `sum (l^(E-m_i) c_j) x_j = 0 mod l^E`.
//!
//! The outputs are always *independent* generating sets (a basis adapted to
//! a direct-sum decomposition), so enumeration loops over coefficient boxes
//! hit every element exactly once.

use crate::matrix::{smith_normal_form, Mat};
use crate::ring::PrimePower;

/// The group `(+)_i Z/l^{mods[i]}`, with a working modulus at level
/// `E >= max(mods)`. Elements are coordinate vectors reduced mod
/// `l^{mods[i]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pp: PrimePower,
    mods: Vec<u32>,
}

impl Shape {
    pub fn new(ell: u64, mods: Vec<u32>) -> Self {
        assert!(mods.iter().all(|&m| m >= 1), "trivial coordinates are not represented");
        let level = mods.iter().copied().max().unwrap_or(1);
        let pp = PrimePower::new(ell, level).expect("valid prime power");
        Self { pp, mods }
    }

    pub fn rank(&self) -> usize {
        self.mods.len()
    }

    pub fn mods(&self) -> &[u32] {
        &self.mods
    }

    pub fn ell(&self) -> u64 {
        self.pp.ell()
    }

    pub fn pp(&self) -> PrimePower {
        self.pp
    }

    pub fn order_exponent(&self) -> u32 {
        self.mods.iter().sum()
    }

    pub fn coord_modulus(&self, i: usize) -> u64 {
        self.pp.ell_pow(self.mods[i])
    }

    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rank());
        v.iter().zip(&self.mods).map(|(&x, &m)| x % self.pp.ell_pow(m)).collect()
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.rank()]
    }

    pub fn is_zero(&self, v: &[u64]) -> bool {
        v.iter().zip(&self.mods).all(|(&x, &m)| x % self.pp.ell_pow(m) == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.mods)
            .map(|((&x, &y), &m)| {
                let md = self.pp.ell_pow(m);
                ((x as u128 + y as u128) % md as u128) as u64
            })
            .collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(&self.mods)
            .map(|(&x, &m)| {
                let md = self.pp.ell_pow(m);
                (md - x % md) % md
            })
            .collect()
    }

    pub fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        a.iter()
            .zip(&self.mods)
            .map(|(&x, &m)| {
                let md = self.pp.ell_pow(m);
                ((x as u128 * c as u128) % md as u128) as u64
            })
            .collect()
    }

    /// Additive order exponent of an element: least `k` with `l^k v = 0`.
    pub fn order_exponent_of(&self, v: &[u64]) -> u32 {
        v.iter()
            .zip(&self.mods)
            .map(|(&x, &m)| {
                let md = self.pp.ell_pow(m);
                let x = x % md;
                if x == 0 {
                    0
                } else {
                    let mut val = 0u32;
                    let mut y = x;
                    while y % self.pp.ell() == 0 {
                        y /= self.pp.ell();
                        val += 1;
                    }
                    m - val.min(m)
                }
            })
            .max()
            .unwrap_or(0)
    }

    /// Enumerates all elements (use only on small shapes).
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![self.zero()];
        for (i, &m) in self.mods.iter().enumerate() {
            let md = self.pp.ell_pow(m);
            let mut next = Vec::with_capacity(out.len() * md as usize);
            for v in &out {
                for c in 0..md {
                    let mut w = v.clone();
                    w[i] = c;
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }
}

/// Independent generators `b_k` of orders `l^{orders[k]}`: the subgroup they
/// generate is the direct sum of the cyclic groups they span, so coefficient
/// boxes `prod [0, l^{orders[k]})` enumerate it without repetition.
#[derive(Clone, Debug)]
pub struct Basis {
    pub vectors: Vec<Vec<u64>>,
    pub orders: Vec<u32>,
}

impl Basis {
    pub fn empty() -> Self {
        Self { vectors: vec![], orders: vec![] }
    }

    pub fn order_exponent(&self) -> u32 {
        self.orders.iter().sum()
    }

    /// Number of elements; panics past the u128 range.
    pub fn order(&self, ell: u64) -> u128 {
        let mut n: u128 = 1;
        for &e in &self.orders {
            for _ in 0..e {
                n = n.checked_mul(ell as u128).expect("subgroup order overflow");
            }
        }
        n
    }

    /// Element for a coefficient tuple (one coefficient per basis vector).
    pub fn element(&self, shape: &Shape, coeffs: &[u64]) -> Vec<u64> {
        let mut acc = shape.zero();
        for (b, &c) in self.vectors.iter().zip(coeffs) {
            acc = shape.add(&acc, &shape.scale(b, c));
        }
        acc
    }

    /// Iterates over all elements via mixed-radix coefficient counting.
    pub fn enumerate<'a>(&'a self, shape: &'a Shape) -> impl Iterator<Item = Vec<u64>> + 'a {
        let radices: Vec<u64> = self.orders.iter().map(|&e| shape.pp().ell_pow(e)).collect();
        let total: u128 = radices.iter().map(|&r| r as u128).product();
        assert!(total <= usize::MAX as u128, "subgroup too large to enumerate");
        (0..total as usize).map(move |mut idx| {
            let mut coeffs = Vec::with_capacity(radices.len());
            for &r in &radices {
                coeffs.push(idx as u64 % r);
                idx /= r as usize;
            }
            self.element(shape, &coeffs)
        })
    }
}

/// Basis of `{ y : C y = 0 mod l^E }` where `C` is over `Z/l^E`.
///
/// From `L C R = diag(l^v)`: the kernel is `R . (+)_i l^(E - v_i) Z/l^E`,
/// so the columns `R l^(E-v_i) e_i` are an independent basis, the image of
/// a standard one under the automorphism `R`.
pub fn kernel_mod(c: &Mat) -> Basis {
    let pp = c.modulus;
    let level = pp.level();
    let snf = smith_normal_form(c);
    let mut vectors = Vec::new();
    let mut orders = Vec::new();
    for i in 0..c.cols {
        let v = if i < snf.valuations.len() { snf.valuations[i].min(level) } else { level };
        if v == 0 {
            continue;
        }
        let scale = pp.ell_pow(level - v);
        let col: Vec<u64> = (0..c.cols).map(|r| pp.mul(snf.right[(r, i)], scale)).collect();
        vectors.push(col);
        orders.push(v);
    }
    Basis { vectors, orders }
}

/// Lifts shaped conditions to a uniform modulus: row `i` scaled by
/// `l^(E - m_i)` over `Z/l^E`, `E = max(target mods, floor)`.
fn scaled_rows_matrix(entries: &[Vec<u64>], target: &Shape, source_rank: usize, floor: u32) -> Mat {
    let e = target.mods().iter().copied().max().unwrap_or(1).max(floor);
    let pp = target.pp().at_level(e);
    let rows = target.rank();
    let mut m = Mat::zero(rows, source_rank, pp);
    for (i, row) in entries.iter().enumerate() {
        assert_eq!(row.len(), source_rank);
        let s = pp.ell_pow(pp.level() - target.mods()[i]);
        for (j, &x) in row.iter().enumerate() {
            m[(i, j)] = pp.mul(x % pp.modulus(), s);
        }
    }
    m
}

/// Basis of the subgroup of `shape` generated by `gens`.
pub fn subgroup_basis(shape: &Shape, gens: &[Vec<u64>]) -> Basis {
    let gens: Vec<Vec<u64>> = gens
        .iter()
        .map(|g| shape.reduce(g))
        .filter(|g| !shape.is_zero(g))
        .collect();
    if gens.is_empty() || shape.rank() == 0 {
        return Basis::empty();
    }
    let pp = shape.pp();
    let level = pp.level();
    let s = gens.len();
    // relation subgroup: coefficient vectors c with sum_j c_j gens_j = 0
    let rows: Vec<Vec<u64>> = (0..shape.rank())
        .map(|i| gens.iter().map(|g| g[i]).collect())
        .collect();
    let relations = kernel_mod(&scaled_rows_matrix(&rows, shape, s, 1));
    // quotient of (Z/l^E)^s by the relation span, via SNF in coefficient space
    let mut rel_mat = Mat::zero(s, relations.vectors.len().max(1), pp);
    for (k, v) in relations.vectors.iter().enumerate() {
        for (r, &x) in v.iter().enumerate() {
            rel_mat[(r, k)] = x % pp.modulus();
        }
    }
    let snf = smith_normal_form(&rel_mat);
    let mut vectors = Vec::new();
    let mut orders = Vec::new();
    for k in 0..s {
        let w = if k < snf.valuations.len() { snf.valuations[k].min(level) } else { level };
        if w == 0 {
            continue;
        }
        // new generator: sum_j (Lambda^-1)_{jk} gens_j
        let mut h = shape.zero();
        for (j, g) in gens.iter().enumerate() {
            let c = snf.left_inv[(j, k)];
            if c != 0 {
                h = shape.add(&h, &shape.scale(g, c));
            }
        }
        debug_assert!(
            !shape.is_zero(&shape.scale(&h, pp.ell_pow(w - 1))),
            "basis vector order defect"
        );
        vectors.push(h);
        orders.push(w);
    }
    Basis { vectors, orders }
}

/// Basis of the kernel of a shaped map: `entries[i][j]` is the coefficient
/// of source coordinate `j` in target coordinate `i`, taken mod
/// `l^{target.mods[i]}`.
pub fn kernel_shaped(entries: &[Vec<u64>], source: &Shape, target: &Shape) -> Basis {
    assert_eq!(entries.len(), target.rank());
    if source.rank() == 0 {
        return Basis::empty();
    }
    if target.rank() == 0 {
        let mut vectors = Vec::new();
        let mut orders = Vec::new();
        for i in 0..source.rank() {
            let mut v = source.zero();
            v[i] = 1;
            vectors.push(v);
            orders.push(source.mods()[i]);
        }
        return Basis { vectors, orders };
    }
    // Work at E >= all exponents on both sides. The uniform-level kernel
    // contains the source lattice l^{m_j} e_j (well-definedness of the map),
    // so reducing its basis into the source shape generates the full kernel.
    let e = source
        .mods()
        .iter()
        .chain(target.mods())
        .copied()
        .max()
        .unwrap();
    let lifted = kernel_mod(&scaled_rows_matrix(entries, target, source.rank(), e));
    let gens: Vec<Vec<u64>> = lifted.vectors.iter().map(|v| source.reduce(v)).collect();
    subgroup_basis(source, &gens)
}

/// Solves `sum_j c_j gens_j = target` in `shape`; returns any one solution.
pub fn solve(shape: &Shape, gens: &[Vec<u64>], target: &[u64]) -> Option<Vec<u64>> {
    if shape.rank() == 0 {
        return Some(vec![0; gens.len()]);
    }
    if gens.is_empty() {
        return shape.is_zero(target).then(Vec::new);
    }
    let rows: Vec<Vec<u64>> = (0..shape.rank())
        .map(|i| gens.iter().map(|g| g[i]).collect())
        .collect();
    let c = scaled_rows_matrix(&rows, shape, gens.len(), 1);
    let pp = c.modulus;
    let level = pp.level();
    let b: Vec<u64> = target
        .iter()
        .zip(shape.mods())
        .map(|(&x, &m)| pp.mul(x % pp.modulus(), pp.ell_pow(level - m)))
        .collect();
    let snf = smith_normal_form(&c);
    let lb = snf.left.apply(&b);
    let mut z = vec![0u64; c.cols];
    for i in 0..c.rows {
        let v = snf.row_valuation(i, level);
        if i < c.cols && v < level {
            if pp.valuation(lb[i]) < v {
                return None;
            }
            z[i] = lb[i] / pp.ell_pow(v);
        } else if lb[i] != 0 {
            return None;
        }
    }
    Some(snf.right.apply(&z))
}

/// Membership test for the subgroup generated by `gens`.
pub fn in_span(shape: &Shape, gens: &[Vec<u64>], target: &[u64]) -> bool {
    solve(shape, gens, target).is_some()
}

/// The quotient of a shaped group by the span of some relations, carrying
/// the action a compatible endomorphism induces on it.
#[derive(Clone, Debug)]
pub struct QuotientData {
    /// Cyclic orders of the quotient generators, decreasing.
    pub partition: Vec<u32>,
    /// Induced action; row `i` reduced mod `l^{partition[i]}`.
    pub action: Vec<Vec<u64>>,
    /// Rows mapping an ambient element to quotient coordinates; row `i`
    /// reduced mod `l^{partition[i]}`.
    pub projection: Vec<Vec<u64>>,
}

impl QuotientData {
    pub fn project(&self, ell: u64, v: &[u64]) -> Vec<u64> {
        self.projection
            .iter()
            .zip(&self.partition)
            .map(|(row, &m)| {
                let modulus = ell.pow(m);
                let mut acc: u128 = 0;
                for (&c, &x) in row.iter().zip(v) {
                    acc = (acc + c as u128 * x as u128) % modulus as u128;
                }
                acc as u64
            })
            .collect()
    }
}

/// Quotient of `shape` by the span of `rels`, with the action of `act`
/// (entry `(i, j)` mod `l^{mods[i]}`) descending to it. The action must
/// preserve the relation span, which holds for every caller here: the
/// relations are images of endomorphisms commuting with `act`.
pub fn quotient_with_action(shape: &Shape, rels: &[Vec<u64>], act: &[Vec<u64>]) -> QuotientData {
    let n = shape.rank();
    if n == 0 {
        return QuotientData { partition: vec![], action: vec![], projection: vec![] };
    }
    let pp = shape.pp();
    let level = pp.level();
    // augmented relations: the given ones plus the coordinate lattice
    let t = rels.len();
    let mut aug = Mat::zero(n, t + n, pp);
    for (k, r) in rels.iter().enumerate() {
        for (i, &x) in r.iter().enumerate() {
            aug[(i, k)] = x % pp.modulus();
        }
    }
    for i in 0..n {
        if shape.mods()[i] < level {
            aug[(i, t + i)] = pp.ell_pow(shape.mods()[i]);
        }
    }
    let snf = smith_normal_form(&aug);
    let vals: Vec<u32> = (0..n).map(|i| snf.row_valuation(i, level)).collect();
    let act_mat = {
        let mut m = Mat::zero(n, n, pp);
        for (i, row) in act.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = x % pp.modulus();
            }
        }
        m
    };
    let induced = snf.left.mul(&act_mat).mul(&snf.left_inv);
    let mut kept: Vec<usize> = (0..n).filter(|&i| vals[i] > 0).collect();
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
            (0..n).map(|j| snf.left[(i, j)] % mi).collect()
        })
        .collect();
    QuotientData { partition, action, projection }
}

/// Basis of the intersection of two subgroups given by generators.
pub fn intersection(shape: &Shape, gens_a: &[Vec<u64>], gens_b: &[Vec<u64>]) -> Basis {
    if gens_a.is_empty() || gens_b.is_empty() || shape.rank() == 0 {
        return Basis::empty();
    }
    // solve A c1 = B c2 over the combined coefficient space
    let sa = gens_a.len();
    let rows: Vec<Vec<u64>> = (0..shape.rank())
        .map(|i| {
            let md = shape.coord_modulus(i);
            let mut row: Vec<u64> = gens_a.iter().map(|g| g[i] % md).collect();
            row.extend(gens_b.iter().map(|g| (md - g[i] % md) % md));
            row
        })
        .collect();
    let combined = kernel_mod(&scaled_rows_matrix(&rows, shape, sa + gens_b.len(), 1));
    let gens: Vec<Vec<u64>> = combined
        .vectors
        .iter()
        .map(|c| {
            let mut acc = shape.zero();
            for (j, g) in gens_a.iter().enumerate() {
                acc = shape.add(&acc, &shape.scale(g, c[j]));
            }
            acc
        })
        .collect();
    subgroup_basis(shape, &gens)
}
