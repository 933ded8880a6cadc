//! Dense linear algebra over a prime field `F_p`.
//!
//! Every subspace in the crate (subspaces of `F_{q^m}`, systems in
//! `F_{q^m}^k`, rank supports in `F_q^n`) is stored as an [`FpSpace`]: the
//! reduced row echelon form of a spanning set of prime-field coordinate
//! vectors. Because the RREF of a subspace is unique, structural equality of
//! two `FpSpace` values is equality of the subspaces they describe.

/// Arithmetic in `Z/pZ` for a prime `p < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub const fn new(p: u64) -> Self {
        Self { p }
    }

    #[inline]
    pub const fn modulus(self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(self, x: u64, y: u64) -> u64 {
        let s = x + y;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, x: u64, y: u64) -> u64 {
        if x >= y {
            x - y
        } else {
            x + self.p - y
        }
    }

    #[inline]
    pub fn neg(self, x: u64) -> u64 {
        if x == 0 {
            0
        } else {
            self.p - x
        }
    }

    #[inline]
    pub fn mul(self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.p as u128) as u64
    }

    pub fn pow(self, mut x: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero residue.
    pub fn inv(self, x: u64) -> u64 {
        debug_assert!(!x.is_multiple_of(self.p), "inverse of zero in F_p");
        self.pow(x, self.p - 2)
    }

    /// `dst += f * src`, coordinatewise.
    #[inline]
    pub fn axpy(self, dst: &mut [u64], f: u64, src: &[u64]) {
        if f == 0 {
            return;
        }
        if self.p == 2 {
            for (d, s) in dst.iter_mut().zip(src) {
                *d ^= *s;
            }
        } else {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = self.add(*d, self.mul(f, *s));
            }
        }
    }

    #[inline]
    pub fn scale(self, v: &mut [u64], f: u64) {
        if f == 1 {
            return;
        }
        for c in v.iter_mut() {
            *c = self.mul(*c, f);
        }
    }
}

/// A subspace of `F_p^len` in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpSpace {
    field: PrimeField,
    len: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl FpSpace {
    /// The zero subspace of `F_p^len`.
    pub fn zero(p: u64, len: usize) -> Self {
        Self {
            field: PrimeField::new(p),
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(p: u64, len: usize) -> Self {
        let rows = (0..len)
            .map(|i| {
                let mut r = vec![0; len];
                r[i] = 1;
                r
            })
            .collect();
        Self {
            field: PrimeField::new(p),
            len,
            rows,
            pivots: (0..len).collect(),
        }
    }

    pub fn from_rows<I>(p: u64, len: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = Vec<u64>>,
    {
        let mut s = Self::zero(p, len);
        for r in rows {
            s.insert(r);
        }
        s
    }

    pub fn prime(&self) -> u64 {
        self.field.p
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Length of the ambient coordinate vectors.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` modulo the space; the result is zero iff `v` was a member.
    pub fn reduce(&self, v: &mut [u64]) {
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let f = v[piv];
            if f != 0 {
                self.field.axpy(v, self.field.neg(f), row);
            }
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&c| c == 0)
    }

    /// Adds `v` to the spanning set. Returns `true` if the dimension grew.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        self.reduce(&mut v);
        let Some(piv) = v.iter().position(|&c| c != 0) else {
            return false;
        };
        let inv = self.field.inv(v[piv]);
        self.field.scale(&mut v, inv);
        for row in &mut self.rows {
            let f = row[piv];
            if f != 0 {
                self.field.axpy(row, self.field.neg(f), &v);
            }
        }
        let pos = self.pivots.partition_point(|&c| c < piv);
        self.rows.insert(pos, v);
        self.pivots.insert(pos, piv);
        true
    }

    pub fn is_subspace_of(&self, other: &FpSpace) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    pub fn sum(&self, other: &FpSpace) -> FpSpace {
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r.clone());
        }
        s
    }

    /// Intersection by the Zassenhaus algorithm.
    pub fn intersect(&self, other: &FpSpace) -> FpSpace {
        assert_eq!(self.len, other.len, "ambient length mismatch");
        let n = self.len;
        let mut big = FpSpace::zero(self.field.p, 2 * n);
        for r in &self.rows {
            let mut v = r.clone();
            v.extend_from_slice(r);
            big.insert(v);
        }
        for r in &other.rows {
            let mut v = r.clone();
            v.resize(2 * n, 0);
            big.insert(v);
        }
        let rows = big
            .rows
            .iter()
            .zip(&big.pivots)
            .filter(|(_, &piv)| piv >= n)
            .map(|(r, _)| r[n..].to_vec());
        FpSpace::from_rows(self.field.p, n, rows)
    }

    /// Dimension of `self + span(extra)` without materializing the sum.
    pub fn dim_with(&self, extra: &[Vec<u64>]) -> usize {
        let mut s = self.clone();
        for v in extra {
            s.insert(v.clone());
        }
        s.dim()
    }

    /// Iterates over all `p^dim` vectors of the space.
    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let p = self.field.p;
        let d = self.dim() as u32;
        let total = p.checked_pow(d).expect("space too large to enumerate");
        (0..total).map(move |mut idx| {
            let mut v = vec![0u64; self.len];
            for row in &self.rows {
                let c = idx % p;
                idx /= p;
                self.field.axpy(&mut v, c, row);
            }
            v
        })
    }
}

/// Null space `{x : M x = 0}` of a matrix given by its rows, each of length `cols`.
pub fn kernel(p: u64, cols: usize, rows: &[Vec<u64>]) -> FpSpace {
    let f = PrimeField::new(p);
    let echelon = FpSpace::from_rows(p, cols, rows.iter().cloned());
    let mut is_pivot = vec![false; cols];
    for &c in echelon.pivots() {
        is_pivot[c] = true;
    }
    let mut out = FpSpace::zero(p, cols);
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for (row, &piv) in echelon.rows().iter().zip(echelon.pivots()) {
            v[piv] = f.neg(row[free]);
        }
        out.insert(v);
    }
    out
}

/// Some `c` with `Σ c_i rows_i = target`, or `None` if `target` is outside the span.
pub fn solve(p: u64, rows: &[Vec<u64>], target: &[u64]) -> Option<Vec<u64>> {
    let f = PrimeField::new(p);
    let len = target.len();
    let r = rows.len();
    let tagged = rows.iter().enumerate().map(|(i, row)| {
        let mut v = row.clone();
        v.extend((0..r).map(|j| u64::from(i == j)));
        v
    });
    let space = FpSpace::from_rows(p, len + r, tagged);
    let mut v = target.to_vec();
    v.resize(len + r, 0);
    space.reduce(&mut v);
    if v[..len].iter().any(|&c| c != 0) {
        return None;
    }
    Some(v[len..].iter().map(|&c| f.neg(c)).collect())
}

/// Rank of a set of vectors.
pub fn rank(p: u64, len: usize, rows: &[Vec<u64>]) -> usize {
    FpSpace::from_rows(p, len, rows.iter().cloned()).dim()
}

/// Inverse of a square matrix over `F_p`, or `None` if singular.
pub fn invert(p: u64, m: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
    let n = m.len();
    let f = PrimeField::new(p);
    let mut aug: Vec<Vec<u64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            assert_eq!(r.len(), n, "matrix must be square");
            let mut v = r.clone();
            v.extend((0..n).map(|j| u64::from(i == j)));
            v
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| aug[r][col] != 0)?;
        aug.swap(col, piv);
        let inv = f.inv(aug[col][col]);
        f.scale(&mut aug[col], inv);
        let pivot_row = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != col {
                let c = row[col];
                if c != 0 {
                    f.axpy(row, f.neg(c), &pivot_row);
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Row vector times matrix: `v * M`.
pub fn vec_mat(p: u64, v: &[u64], m: &[Vec<u64>]) -> Vec<u64> {
    let f = PrimeField::new(p);
    let cols = m.first().map_or(0, Vec::len);
    let mut out = vec![0u64; cols];
    for (c, row) in v.iter().zip(m) {
        f.axpy(&mut out, *c, row);
    }
    out
}

pub fn mat_mul(p: u64, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    a.iter().map(|r| vec_mat(p, r, b)).collect()
}

/// Rank of a set of `F_2` vectors packed into the low bits of `u64` words.
///
/// Stops as soon as the rank reaches `limit`.
#[inline]
pub fn gf2_rank(vectors: &[u64], limit: usize) -> usize {
    let mut basis = [0u64; 64];
    let mut r = 0;
    for &v0 in vectors {
        let mut v = v0;
        while v != 0 {
            let h = 63 - v.leading_zeros() as usize;
            if basis[h] == 0 {
                basis[h] = v;
                r += 1;
                break;
            }
            v ^= basis[h];
        }
        if r == limit {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kernel_of_single_equation() {
        // x + y + z = 0 over F_3
        let k = kernel(3, 3, &[vec![1, 1, 1]]);
        assert_eq!(k.dim(), 2);
        for v in k.elements() {
            assert_eq!((v[0] + v[1] + v[2]) % 3, 0);
        }
    }

    #[test]
    fn solve_finds_combination() {
        let rows = vec![vec![1, 0, 2], vec![0, 1, 1], vec![1, 1, 0]];
        let c = solve(3, &rows, &[2, 1, 2]).unwrap();
        let back = vec_mat(3, &c, &rows);
        assert_eq!(back, vec![2, 1, 2]);
        assert_eq!(solve(3, &rows[..2], &[0, 0, 1]), None);
    }

    #[test]
    fn invert_roundtrip() {
        let m = vec![vec![1, 2, 0], vec![0, 1, 4], vec![3, 0, 2]];
        let inv = invert(5, &m).unwrap();
        let id = mat_mul(5, &m, &inv);
        for (i, r) in id.iter().enumerate() {
            for (j, &c) in r.iter().enumerate() {
                assert_eq!(c, u64::from(i == j));
            }
        }
        assert!(invert(2, &[vec![1, 1], vec![1, 1]]).is_none());
    }

    #[test]
    fn gf2_rank_matches_generic() {
        let vs = [0b101u64, 0b011, 0b110, 0b111];
        let rows: Vec<Vec<u64>> = vs
            .iter()
            .map(|&v| (0..3).map(|i| (v >> i) & 1).collect())
            .collect();
        assert_eq!(gf2_rank(&vs, 64), rank(2, 3, &rows));
        assert_eq!(gf2_rank(&vs, 64), 3);
        assert_eq!(gf2_rank(&vs, 2), 2);
    }

    fn vecs(p: u64, len: usize, count: usize) -> impl Strategy<Value = Vec<Vec<u64>>> {
        prop::collection::vec(prop::collection::vec(0..p, len), 0..=count)
    }

    proptest! {
        #[test]
        fn dimension_formula(a in vecs(3, 5, 4), b in vecs(3, 5, 4)) {
            let sa = FpSpace::from_rows(3, 5, a);
            let sb = FpSpace::from_rows(3, 5, b);
            let s = sa.sum(&sb);
            let i = sa.intersect(&sb);
            prop_assert_eq!(s.dim() + i.dim(), sa.dim() + sb.dim());
            prop_assert!(i.is_subspace_of(&sa) && i.is_subspace_of(&sb));
        }

        #[test]
        fn rref_is_canonical(a in vecs(5, 4, 4), seed in 0u64..1000) {
            // Re-spanning the same space with shuffled combinations yields the same RREF.
            let sa = FpSpace::from_rows(5, 4, a.clone());
            let f = PrimeField::new(5);
            let mut mixed = Vec::new();
            let mut s = seed;
            for r in sa.rows() {
                let mut v = r.clone();
                for o in sa.rows() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    f.axpy(&mut v, (s >> 33) % 5, o);
                }
                mixed.push(v);
            }
            mixed.reverse();
            let sb = FpSpace::from_rows(5, 4, mixed);
            if sb.dim() == sa.dim() {
                prop_assert_eq!(sa, sb);
            }
        }
    }
}
