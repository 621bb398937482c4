//! Weight-2 Manin symbols for Gamma_0(N).
//!
//! The symbol (c : d) stands for g{0, oo} = {b/d, a/c} where g = [a b; c d]
//! is any lift to SL_2(Z). Relations: x + x sigma = 0 and
//! x + x tau + x tau^2 = 0 with (c, d) sigma = (d, -c) and
//! (c, d) tau = (d, -c - d).

use super::p1::P1List;
use crate::arith::{self, gcd, mod_inv, xgcd};
use crate::linalg::rational::{q, QMatrix, SparseEchelon, SparseVec, Q};
use num_traits::{One, Zero};

/// Cusp a/c with gcd(a, c) = 1 and c >= 0.
pub type Cusp = (i64, i64);

#[derive(Clone, Debug)]
pub struct ManinSymbolSpace {
    pub level: u64,
    pub p1: P1List,
    /// Coordinates of every P^1 element in the quotient basis.
    pub coords: Vec<SparseVec>,
    /// P^1 index of each basis generator.
    pub basis_reps: Vec<usize>,
    pub cusps: Vec<Cusp>,
    /// Boundary of each P^1 element: (index of a/c, index of b/d), giving [a/c] - [b/d].
    pub boundary: Vec<(usize, usize)>,
    /// Basis of the cuspidal subspace, as coordinate vectors.
    pub cuspidal_basis: Vec<Vec<Q>>,
}

/// Lift (c : d) to a matrix [a b; c' d'] in SL_2(Z) with c' = c, d' = d mod N.
pub fn lift_to_sl2(c: i64, d: i64, n: i64) -> [i64; 4] {
    let mut c = c.rem_euclid(n);
    let d0 = d.rem_euclid(n);
    if n == 1 {
        return [1, 0, 0, 1];
    }
    if c == 0 {
        c = n;
    }
    let mut d = d0;
    while gcd(c, d) != 1 {
        d += n;
    }
    let (_, x, y) = xgcd(d, c);
    // x d + y c = 1 => a = x, b = -y
    [x, -y, c, d]
}

fn reduce_cusp(a: i64, c: i64) -> Cusp {
    let g = gcd(a, c).max(1);
    let (mut a, mut c) = (a / g, c / g);
    if c < 0 || (c == 0 && a < 0) {
        a = -a;
        c = -c;
    }
    (a, c)
}

/// Gamma_0(N)-equivalence of cusps a1/c1 and a2/c2:
/// s1 c2 = s2 c1 mod gcd(c1 c2, N) where a_j s_j = 1 mod c_j.
pub fn cusps_equivalent(x: Cusp, y: Cusp, n: i64) -> bool {
    let (a1, c1) = reduce_cusp(x.0, x.1);
    let (a2, c2) = reduce_cusp(y.0, y.1);
    let s = |a: i64, c: i64| -> i64 {
        match c {
            0 => a,
            1 => 0,
            _ => mod_inv(a, c).expect("coprime"),
        }
    };
    let (s1, s2) = (s(a1, c1), s(a2, c2));
    let m = gcd((c1 as i128 * c2 as i128 % n as i128) as i64, n);
    let m = if c1 == 0 || c2 == 0 { n } else { m };
    let m = if m == 0 { n } else { m };
    let lhs = (s1 as i128 * c2 as i128).rem_euclid(m as i128);
    let rhs = (s2 as i128 * c1 as i128).rem_euclid(m as i128);
    lhs == rhs
}

impl ManinSymbolSpace {
    pub fn new(level: u64) -> Self {
        let n = level as i64;
        let p1 = P1List::new(level);
        let len = p1.len();
        let sigma: Vec<usize> = p1
            .reps
            .iter()
            .map(|&(c, d)| p1.index_of(d as i64, -(c as i64)).unwrap())
            .collect();
        let tau: Vec<usize> = p1
            .reps
            .iter()
            .map(|&(c, d)| p1.index_of(d as i64, -(c as i64) - d as i64).unwrap())
            .collect();
        // 2-term classes
        let mut col_of: Vec<Option<(usize, i64)>> = vec![None; len];
        let mut ncols = 0usize;
        for i in 0..len {
            let j = sigma[i];
            if i == j {
                continue;
            }
            if i < j {
                col_of[i] = Some((ncols, 1));
                col_of[j] = Some((ncols, -1));
                ncols += 1;
            }
        }
        // 3-term relations
        let mut ech = SparseEchelon::default();
        let mut seen = vec![false; len];
        for i in 0..len {
            if seen[i] {
                continue;
            }
            let orbit = [i, tau[i], tau[tau[i]]];
            for &x in &orbit {
                seen[x] = true;
            }
            let mut rel = SparseVec::new();
            for &x in &orbit {
                if let Some((c, s)) = col_of[x] {
                    let e = rel.entry(c).or_insert_with(Q::zero);
                    *e += q(s);
                    if e.is_zero() {
                        rel.remove(&c);
                    }
                }
            }
            if !rel.is_empty() {
                ech.insert(rel);
            }
        }
        let (free, expr) = ech.solve_all(ncols);
        let mut coords = vec![SparseVec::new(); len];
        let mut rep_of_col = vec![usize::MAX; ncols];
        for i in 0..len {
            if let Some((c, s)) = col_of[i] {
                if s == 1 {
                    rep_of_col[c] = i;
                }
                let mut v = expr[c].clone();
                if s == -1 {
                    for x in v.values_mut() {
                        *x = -x.clone();
                    }
                }
                coords[i] = v;
            }
        }
        let basis_reps: Vec<usize> = free.iter().map(|&c| rep_of_col[c]).collect();

        // boundary
        let mut cusps: Vec<Cusp> = Vec::new();
        let cusp_index = |cp: Cusp, cusps: &mut Vec<Cusp>| -> usize {
            let cp = reduce_cusp(cp.0, cp.1);
            if let Some(k) = cusps.iter().position(|&y| cusps_equivalent(cp, y, n)) {
                k
            } else {
                cusps.push(cp);
                cusps.len() - 1
            }
        };
        let mut boundary = Vec::with_capacity(len);
        for &(c, d) in &p1.reps {
            let [a, b, c, d] = lift_to_sl2(c as i64, d as i64, n);
            let top = cusp_index((a, c), &mut cusps);
            let bot = cusp_index((b, d), &mut cusps);
            boundary.push((top, bot));
        }
        let mut space = ManinSymbolSpace {
            level,
            p1,
            coords,
            basis_reps,
            cusps,
            boundary,
            cuspidal_basis: Vec::new(),
        };
        let bm = space.boundary_matrix();
        space.cuspidal_basis = bm.kernel();
        space
    }

    pub fn dim(&self) -> usize {
        self.basis_reps.len()
    }

    pub fn cuspidal_dim(&self) -> usize {
        self.cuspidal_basis.len()
    }

    pub fn genus(&self) -> usize {
        self.cuspidal_dim() / 2
    }

    /// Boundary map on the quotient basis: rows are cusp classes.
    pub fn boundary_matrix(&self) -> QMatrix {
        let mut m = QMatrix::zeros(self.cusps.len(), self.dim());
        for (j, &r) in self.basis_reps.iter().enumerate() {
            let (t, b) = self.boundary[r];
            m.data[t][j] += Q::one();
            m.data[b][j] -= Q::one();
        }
        m
    }

    /// Boundary of a P^1 element as an integer vector over cusp classes.
    pub fn boundary_vector(&self, i: usize) -> Vec<i64> {
        let mut v = vec![0i64; self.cusps.len()];
        let (t, b) = self.boundary[i];
        v[t] += 1;
        v[b] -= 1;
        v
    }

    pub fn index_of(&self, c: i64, d: i64) -> Option<usize> {
        self.p1.index_of(c, d)
    }

    /// Matrix of an endomorphism given by its action on P^1 elements,
    /// columns are images of basis vectors.
    fn matrix_from_images(&self, images: impl Fn(usize) -> SparseVec) -> QMatrix {
        let d = self.dim();
        let mut m = QMatrix::zeros(d, d);
        for (j, &r) in self.basis_reps.iter().enumerate() {
            for (i, v) in images(r) {
                m.data[i][j] = v;
            }
        }
        m
    }

    /// The star involution (c : d) -> (-c : d) on the full space.
    pub fn star_matrix(&self) -> QMatrix {
        self.matrix_from_images(|r| {
            let (c, d) = self.p1.reps[r];
            let k = self.index_of(-(c as i64), d as i64).unwrap();
            self.coords[k].clone()
        })
    }

    /// T_l on the full space via Heilbronn matrices.
    pub fn hecke_matrix_full(&self, l: u64) -> QMatrix {
        let hs = super::hecke::merel_heilbronn(l);
        self.matrix_from_images(|r| {
            let (c, d) = self.p1.reps[r];
            let (c, d) = (c as i64, d as i64);
            let mut acc = SparseVec::new();
            for h in &hs {
                let (nc, nd) = (c * h[0] + d * h[2], c * h[1] + d * h[3]);
                if let Some(k) = self.index_of(nc, nd) {
                    crate::linalg::rational::sparse_axpy(&mut acc, &Q::one(), &self.coords[k]);
                }
            }
            acc
        })
    }

    /// T_l on the full space for a prime l not dividing N.
    pub fn hecke(&self, l: u64) -> crate::error::Result<QMatrix> {
        if !arith::is_prime(l) {
            return Err(crate::error::Error::NotPrime(l));
        }
        if self.level % l == 0 {
            return Err(crate::error::Error::BadPrime(l));
        }
        Ok(self.hecke_matrix_full(l))
    }

    /// Matrix of T_l restricted to the cuspidal subspace, in the cuspidal basis.
    pub fn hecke_matrix(&self, l: u64) -> QMatrix {
        let t = self.hecke_matrix_full(l);
        restrict(&t, &self.cuspidal_basis)
    }

    /// Cache key material.
    pub fn expected_p1_len(&self) -> u64 {
        P1List::expected_len(self.level)
    }
}

/// Restriction of A to the invariant subspace spanned by `basis` (columns),
/// expressed in that basis.
pub fn restrict(a: &QMatrix, basis: &[Vec<Q>]) -> QMatrix {
    let k = basis.len();
    if k == 0 {
        return QMatrix::zeros(0, 0);
    }
    // B has rows = basis vectors; A b_j = sum_i R_ij b_i  <=>  (A B^T)^T = R^T B
    let b = QMatrix::from_rows(basis.to_vec(), a.cols);
    let images = a.mul(&b.transpose()).transpose();
    let rt = QMatrix::solve_left(&b, &images).expect("subspace is invariant");
    rt.transpose()
}

/// Genus of X_0(N) by the classical formula (used as an oracle).
pub fn genus_x0(n: u64) -> u64 {
    let fac = arith::factor(n);
    let mu: u64 = fac.iter().fold(n, |acc, &(p, _)| acc / p * (p + 1));
    let nu2: u64 = if n % 4 == 0 {
        0
    } else {
        fac.iter()
            .map(|&(p, _)| (1 + arith_kronecker(-4, p)) as u64)
            .product()
    };
    let nu3: u64 = if n % 9 == 0 {
        0
    } else {
        fac.iter()
            .map(|&(p, _)| (1 + arith_kronecker(-3, p)) as u64)
            .product()
    };
    let ncusps: u64 = arith::divisors(n)
        .iter()
        .map(|&d| arith::euler_phi(arith::gcd_u(d, n / d)))
        .sum();
    // g = 1 + mu/12 - nu2/4 - nu3/3 - ncusps/2, computed over 12
    let twelve_g = 12 + mu as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * ncusps as i64;
    (twelve_g / 12) as u64
}

fn arith_kronecker(d: i64, p: u64) -> i64 {
    if p == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    arith::legendre(d, p) as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifts_are_in_sl2() {
        let n = 12;
        for c in 0..n {
            for d in 0..n {
                if gcd(gcd(c, d), n) != 1 {
                    continue;
                }
                let [a, b, c2, d2] = lift_to_sl2(c, d, n);
                assert_eq!(a * d2 - b * c2, 1);
                assert_eq!((c2 - c).rem_euclid(n), 0);
                assert_eq!((d2 - d).rem_euclid(n), 0);
            }
        }
    }

    #[test]
    fn cusp_counts() {
        for n in [11u64, 12, 37, 36, 389] {
            let s = ManinSymbolSpace::new(n);
            let want: u64 = arith::divisors(n)
                .iter()
                .map(|&d| arith::euler_phi(arith::gcd_u(d, n / d)))
                .sum();
            assert_eq!(s.cusps.len() as u64, want, "N = {n}");
        }
    }

    #[test]
    fn dimensions_small_levels() {
        let s = ManinSymbolSpace::new(11);
        assert_eq!(s.dim(), 3);
        assert_eq!(s.cuspidal_dim(), 2);
        let s = ManinSymbolSpace::new(1);
        assert_eq!(s.cuspidal_dim(), 0);
    }

    #[test]
    fn star_is_an_involution() {
        let s = ManinSymbolSpace::new(37);
        let st = s.star_matrix();
        assert_eq!(st.mul(&st), QMatrix::identity(s.dim()));
    }

    #[test]
    fn cuspidal_dim_matches_genus_formula() {
        for n in 1..=120u64 {
            let s = ManinSymbolSpace::new(n);
            assert_eq!(s.cuspidal_dim() as u64, 2 * genus_x0(n), "N = {n}");
            assert_eq!(s.dim(), s.cuspidal_dim() + s.cusps.len() - 1, "N = {n}");
        }
    }

    #[test]
    fn hecke_on_level_11_is_scalar() {
        let s = ManinSymbolSpace::new(11);
        for (l, a) in [(2u64, -2i64), (3, -1), (5, 1), (7, -2), (13, 4)] {
            let t = s.hecke_matrix(l);
            assert_eq!(t, QMatrix::identity(2).sub_scalar_identity(&q(1 - a)), "l = {l}");
        }
    }

    #[test]
    fn hecke_commutes_with_star() {
        let s = ManinSymbolSpace::new(37);
        let st = s.star_matrix();
        for l in [2u64, 3, 5] {
            let t = s.hecke_matrix_full(l);
            assert_eq!(t.mul(&st), st.mul(&t));
        }
        let t2 = s.hecke_matrix_full(2);
        let t3 = s.hecke_matrix_full(3);
        assert_eq!(t2.mul(&t3), t3.mul(&t2));
    }
}
