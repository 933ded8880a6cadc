//! Dense matrices over `F_{q^m}`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement};

pub type Matrix = Vec<Vec<FieldElement>>;

pub fn identity(k: usize) -> Matrix {
    (0..k)
        .map(|i| (0..k).map(|j| if i == j { FieldElement::ONE } else { FieldElement::ZERO }).collect())
        .collect()
}

pub fn mul(ctx: &FieldContext, a: &Matrix, b: &Matrix) -> Matrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            let mut out = vec![FieldElement::ZERO; cols];
            for (x, brow) in row.iter().zip(b) {
                if x.is_zero() {
                    continue;
                }
                for (o, &y) in out.iter_mut().zip(brow) {
                    *o = ctx.add(*o, ctx.mul(*x, y));
                }
            }
            out
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mul(ctx: &FieldContext, v: &[FieldElement], m: &Matrix) -> Vec<FieldElement> {
    mul(ctx, &vec![v.to_vec()], m).pop().unwrap_or_default()
}

pub fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|c| m.iter().map(|r| r[c]).collect()).collect()
}

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref(ctx: &FieldContext, m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut rows: Matrix = m.to_vec();
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = ctx.inv(rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = ctx.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = ctx.sub(*x, ctx.mul(f, y));
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(ctx: &FieldContext, m: &Matrix) -> usize {
    rref(ctx, m).1.len()
}

pub fn inverse(ctx: &FieldContext, m: &Matrix) -> Result<Matrix> {
    let k = m.len();
    let aug: Matrix = m
        .iter()
        .zip(identity(k))
        .map(|(r, id)| {
            if r.len() != k {
                return Err(Error::DimensionMismatch("matrix is not square".into()));
            }
            Ok(r.iter().copied().chain(id).collect())
        })
        .collect::<Result<_>>()?;
    let (red, pivots) = rref(ctx, &aug);
    if pivots.len() < k || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return Err(Error::SingularMatrix);
    }
    Ok(red.into_iter().map(|r| r[k..].to_vec()).collect())
}

/// Basis of `{y : M yᵀ = 0}` as rows.
pub fn right_kernel(ctx: &FieldContext, m: &Matrix, cols: usize) -> Matrix {
    let (red, pivots) = rref(ctx, m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut y = vec![FieldElement::ZERO; cols];
            y[f] = FieldElement::ONE;
            for (row, &pc) in red.iter().zip(&pivots) {
                y[pc] = ctx.neg(row[f]);
            }
            y
        })
        .collect()
}

/// A random invertible `k×k` matrix with entries drawn from `entries`.
pub fn random_invertible<R: Rng>(ctx: &FieldContext, k: usize, entries: &[FieldElement], rng: &mut R) -> Matrix {
    loop {
        let m: Matrix = (0..k)
            .map(|_| (0..k).map(|_| entries[rng.gen_range(0..entries.len())]).collect())
            .collect();
        if rank(ctx, &m) == k {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_and_kernel() {
        let ctx = FieldContext::new(3, 1, 2, None).unwrap();
        let all: Vec<FieldElement> = ctx.elements().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = random_invertible(&ctx, 3, &all, &mut rng);
            let inv = inverse(&ctx, &m).unwrap();
            assert_eq!(mul(&ctx, &m, &inv), identity(3));
        }
        let m: Matrix = vec![vec![FieldElement::ONE, FieldElement::from_raw(2), FieldElement::from_raw(4)]];
        let ker = right_kernel(&ctx, &m, 3);
        assert_eq!(ker.len(), 2);
        for y in &ker {
            let prod = mul(&ctx, &m, &transpose(&vec![y.clone()]));
            assert!(prod[0][0].is_zero());
        }
        assert_eq!(inverse(&ctx, &vec![vec![FieldElement::ZERO]]), Err(Error::SingularMatrix));
    }
}
