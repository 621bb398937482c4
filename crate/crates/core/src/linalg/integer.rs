//! Integer lattices: Hermite and Smith normal forms over Z.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

pub type ZVec = Vec<BigInt>;

pub fn zvec(xs: &[i64]) -> ZVec {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

fn axpy(y: &mut [BigInt], a: &BigInt, x: &[BigInt]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += a * xi;
        }
    }
}

/// Row-style Hermite normal form built by incremental insertion.
///
/// Rows are keyed by pivot column; pivots are positive and entries above a
/// pivot are reduced into [0, pivot) once `reduce` is called.
#[derive(Clone, Debug)]
pub struct Hnf {
    pub dim: usize,
    pub rows: BTreeMap<usize, ZVec>,
}

impl Hnf {
    pub fn new(dim: usize) -> Self {
        Hnf {
            dim,
            rows: BTreeMap::new(),
        }
    }

    pub fn from_rows(dim: usize, rows: impl IntoIterator<Item = ZVec>) -> Self {
        let mut h = Hnf::new(dim);
        for r in rows {
            h.insert(r);
        }
        h.reduce();
        h
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, mut v: ZVec) {
        assert_eq!(v.len(), self.dim);
        let mut col = 0;
        while col < self.dim {
            if v[col].is_zero() {
                col += 1;
                continue;
            }
            match self.rows.get_mut(&col) {
                None => {
                    if v[col].is_negative() {
                        for x in v.iter_mut() {
                            *x = -&*x;
                        }
                    }
                    self.rows.insert(col, v);
                    return;
                }
                Some(r) => {
                    let a = r[col].clone();
                    let b = v[col].clone();
                    if (&b % &a).is_zero() {
                        let q = &b / &a;
                        axpy(&mut v, &(-q), r);
                    } else {
                        let e = a.extended_gcd(&b);
                        let (g, x, y) = (e.gcd, e.x, e.y);
                        let mut new_r: ZVec = r.iter().map(|ri| ri * &x).collect();
                        axpy(&mut new_r, &y, &v);
                        let ag = &a / &g;
                        let bg = &b / &g;
                        let new_v: ZVec = v
                            .iter()
                            .zip(r.iter())
                            .map(|(vi, ri)| &ag * vi - &bg * ri)
                            .collect();
                        *r = new_r;
                        v = new_v;
                    }
                    col += 1;
                }
            }
        }
    }

    /// Reduces entries above each pivot into [0, pivot).
    pub fn reduce(&mut self) {
        let keys: Vec<usize> = self.rows.keys().copied().collect();
        for (i, &pc) in keys.iter().enumerate() {
            let pivot_row = self.rows[&pc].clone();
            let p = pivot_row[pc].clone();
            for &rc in &keys[..i] {
                let row = self.rows.get_mut(&rc).unwrap();
                let q = row[pc].div_floor(&p);
                if !q.is_zero() {
                    axpy(row, &(-q), &pivot_row);
                }
            }
        }
    }

    /// Residue of v modulo the lattice; zero iff v lies in it.
    pub fn residue(&self, v: &[BigInt]) -> ZVec {
        let mut v = v.to_vec();
        for (&c, row) in &self.rows {
            if v[c].is_zero() {
                continue;
            }
            let q = v[c].div_floor(&row[c]);
            axpy(&mut v, &(-q), row);
        }
        v
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.residue(v).iter().all(|x| x.is_zero())
    }

    /// Coordinates of v in the HNF basis (in pivot order), if v lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<ZVec> {
        let mut v = v.to_vec();
        let mut out = Vec::with_capacity(self.rows.len());
        for (&c, row) in &self.rows {
            let (q, r) = v[c].div_rem(&row[c]);
            if !r.is_zero() {
                return None;
            }
            axpy(&mut v, &(-&q), row);
            out.push(q);
        }
        if v.iter().all(|x| x.is_zero()) {
            Some(out)
        } else {
            None
        }
    }

    pub fn basis(&self) -> Vec<ZVec> {
        self.rows.values().cloned().collect()
    }

    pub fn same_lattice(&self, other: &Hnf) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.reduce();
        b.reduce();
        a.rows == b.rows
    }
}

/// Smith normal form of a relation matrix, with the column transform needed
/// to read off coordinates in the quotient Z^m / rowspace.
#[derive(Clone, Debug)]
pub struct Smith {
    pub dim: usize,
    /// Nonzero invariant factors d_1 | d_2 | ... (length = rank).
    pub diag: Vec<BigInt>,
    /// Unimodular m x m matrix V (row-major) with U R V = D.
    pub v: Vec<ZVec>,
}

impl Smith {
    /// Only the column transform is tracked, so the rows may be replaced by
    /// their HNF at any point; doing that between pivot steps keeps entries
    /// bounded by the pivots.
    pub fn new(rows: Vec<ZVec>, dim: usize) -> Self {
        let mut v: Vec<ZVec> = (0..dim)
            .map(|i| {
                let mut r = vec![BigInt::zero(); dim];
                r[i] = BigInt::one();
                r
            })
            .collect();
        let mut done: Vec<ZVec> = Vec::new();
        let mut rest: Vec<ZVec> = rows;
        let mut diag = Vec::new();
        let mut t = 0;
        'pivot: while t < dim {
            rest = Hnf::from_rows(dim, rest).basis();
            if rest.is_empty() {
                break;
            }
            let c = rest[0].iter().position(|x| !x.is_zero()).expect("nonzero HNF row");
            swap_cols(&mut done, &mut rest, &mut v, t, c);
            // rest[0] = (0.., g, *) and the other rows vanish in column t
            loop {
                for j in t + 1..dim {
                    if rest[0][j].is_zero() {
                        continue;
                    }
                    let g = rest[0][t].clone();
                    let b = rest[0][j].clone();
                    if (&b % &g).is_zero() {
                        let q = -(&b / &g);
                        col_op(&mut done, &mut rest, &mut v, t, j, [&BigInt::one(), &BigInt::zero(), &q, &BigInt::one()]);
                    } else {
                        // the pivot becomes gcd(g, b) and column t fills up: start over
                        let e = g.extended_gcd(&b);
                        let (u, w) = (-(&b / &e.gcd), &g / &e.gcd);
                        col_op(&mut done, &mut rest, &mut v, t, j, [&e.x, &e.y, &u, &w]);
                        continue 'pivot;
                    }
                }
                let g = rest[0][t].clone();
                match (1..rest.len()).find(|&i| rest[i].iter().any(|x| !(x % &g).is_zero())) {
                    Some(i) => {
                        let ri = rest[i].clone();
                        axpy(&mut rest[0], &BigInt::one(), &ri);
                    }
                    None => break,
                }
            }
            diag.push(rest[0][t].abs());
            done.push(rest.remove(0));
            t += 1;
        }
        Smith { dim, diag, v }
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// w = x V, the coordinates of x adapted to the diagonal form.
    pub fn transform(&self, x: &[BigInt]) -> ZVec {
        let mut w = vec![BigInt::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if !xi.is_zero() {
                axpy(&mut w, xi, &self.v[i]);
            }
        }
        w
    }

    /// Membership of x in the row space over Z.
    pub fn contains(&self, x: &[BigInt]) -> bool {
        let w = self.transform(x);
        w.iter().enumerate().all(|(i, wi)| match self.diag.get(i) {
            Some(d) => (wi % d).is_zero(),
            None => wi.is_zero(),
        })
    }

    /// Membership of x in Z_(p) tensor the row space.
    pub fn contains_p_local(&self, x: &[BigInt], p: u64) -> bool {
        let w = self.transform(x);
        w.iter().enumerate().all(|(i, wi)| match self.diag.get(i) {
            Some(d) => wi.is_zero() || vp(wi, p) >= vp(d, p),
            None => wi.is_zero(),
        })
    }

    /// Invariant factors of the quotient including free rank as zeros.
    pub fn quotient_invariants(&self) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = self.diag.iter().filter(|d| !d.is_one()).cloned().collect();
        out.extend(std::iter::repeat_n(BigInt::zero(), self.dim - self.rank()));
        out
    }
}

fn swap_cols(a: &mut [ZVec], b: &mut [ZVec], v: &mut [ZVec], i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in a.iter_mut().chain(b.iter_mut()).chain(v.iter_mut()) {
        row.swap(i, j);
    }
}

/// (col_t, col_j) <- (x col_t + y col_j, u col_t + w col_j) on every matrix.
fn col_op(a: &mut [ZVec], b: &mut [ZVec], v: &mut [ZVec], t: usize, j: usize, [x, y, u, w]: [&BigInt; 4]) {
    for row in a.iter_mut().chain(b.iter_mut()).chain(v.iter_mut()) {
        if row[t].is_zero() && row[j].is_zero() {
            continue;
        }
        let (ct, cj) = (row[t].clone(), row[j].clone());
        row[t] = x * &ct + y * &cj;
        row[j] = u * &ct + w * &cj;
    }
}

/// p-adic valuation of a nonzero integer.
pub fn vp(x: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while !x.is_zero() && (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_membership() {
        let h = Hnf::from_rows(2, vec![zvec(&[2, 4]), zvec(&[0, 6])]);
        assert!(h.contains(&zvec(&[2, 10])));
        assert!(!h.contains(&zvec(&[1, 0])));
        assert!(!h.contains(&zvec(&[0, 2])));
        assert_eq!(h.coordinates(&zvec(&[4, 14])), Some(zvec(&[2, 1])));
    }

    #[test]
    fn smith_invariants() {
        let s = Smith::new(vec![zvec(&[2, 4, 4]), zvec(&[-6, 6, 12]), zvec(&[10, -4, -16])], 3);
        assert_eq!(s.diag, zvec(&[2, 6, 12]));
        let s = Smith::new(vec![zvec(&[4, 0]), zvec(&[0, 6])], 2);
        assert_eq!(s.diag, zvec(&[2, 12]));
        assert!(s.contains(&zvec(&[8, 6])));
        assert!(!s.contains(&zvec(&[2, 6])));
        assert!(s.contains_p_local(&zvec(&[4, 2]), 2));
        assert!(!s.contains_p_local(&zvec(&[4, 2]), 3));
    }

    #[test]
    fn smith_agrees_with_hnf_on_random_lattices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let dim = rng.gen_range(1..5);
            let rows: Vec<ZVec> = (0..rng.gen_range(0..5))
                .map(|_| (0..dim).map(|_| BigInt::from(rng.gen_range(-6..7))).collect())
                .collect();
            let h = Hnf::from_rows(dim, rows.clone());
            let s = Smith::new(rows, dim);
            assert_eq!(h.rank(), s.rank());
            for _ in 0..20 {
                let x: ZVec = (0..dim).map(|_| BigInt::from(rng.gen_range(-12..13))).collect();
                assert_eq!(h.contains(&x), s.contains(&x));
            }
        }
    }
}
