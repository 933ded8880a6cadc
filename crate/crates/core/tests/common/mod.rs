#![allow(dead_code)]

use std::sync::Arc;

use rankdec::{Ctx, FieldContext, FieldElement};

pub fn ctx(p: u64, a: usize, m: usize) -> Ctx {
    Arc::new(FieldContext::new(p, a, m, None).unwrap())
}

fn encode(p: u64, d: &[u64]) -> FieldElement {
    FieldElement::from_raw(d.iter().rev().fold(0, |acc, &c| acc * p + c))
}

fn decode(p: u64, deg: usize, x: FieldElement) -> Vec<u64> {
    let mut v = x.to_int();
    (0..deg)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

/// Schoolbook product of coefficient vectors reduced by the monic modulus.
pub fn naive_mul(ctx: &FieldContext, x: FieldElement, y: FieldElement) -> FieldElement {
    let p = ctx.p();
    let f = ctx.modulus();
    let deg = f.len() - 1;
    let (a, b) = (decode(p, deg, x), decode(p, deg, y));
    let mut prod = vec![0u64; 2 * deg];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    for top in (deg..2 * deg).rev() {
        let c = prod[top];
        if c != 0 {
            for (i, &fi) in f.iter().enumerate() {
                let idx = top - deg + i;
                prod[idx] = (prod[idx] + (p - c) * fi % p) % p;
            }
        }
    }
    encode(p, &prod[..deg])
}

pub fn naive_pow(ctx: &FieldContext, x: FieldElement, n: u64) -> FieldElement {
    (0..n).fold(FieldElement::ONE, |acc, _| naive_mul(ctx, acc, x))
}

/// Rank over `F_p` of a list of vectors, by plain elimination.
pub fn fp_rank(p: u64, mut rows: Vec<Vec<u64>>) -> usize {
    let inv = |a: u64| (1..p).find(|&b| a * b % p == 1).unwrap();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, piv);
        let s = inv(rows[rank][c]);
        for v in rows[rank].iter_mut() {
            *v = *v * s % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c];
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank weight over the prime field, for `a = 1`: the `F_p`-dimension of the
/// span of the entries.
pub fn naive_weight(ctx: &FieldContext, v: &[FieldElement]) -> usize {
    assert_eq!(ctx.a(), 1);
    fp_rank(ctx.p(), v.iter().map(|&x| ctx.digits(x)).collect())
}

/// All `F_p`-combinations of `gens`, as a sorted set.
pub fn fp_span(ctx: &FieldContext, gens: &[FieldElement]) -> std::collections::BTreeSet<FieldElement> {
    let mut set = std::collections::BTreeSet::from([FieldElement::ZERO]);
    for &g in gens {
        let mut next = set.clone();
        for &s in &set {
            let mut acc = s;
            for _ in 1..ctx.p() {
                acc = ctx.add(acc, g);
                next.insert(acc);
            }
        }
        set = next;
    }
    set
}
