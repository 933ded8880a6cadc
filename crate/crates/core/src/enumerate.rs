//! Exhaustive codeword enumeration.
//!
//! A message `x ∈ F_{q^m}^k` has index `Σ_r x_r Q^{k-1-r}` (`Q = q^m`), so the
//! last coordinate varies fastest. In prime-field digits the index is a
//! base-`p` counter; stepping it by one adds the precomputed images of the
//! digits that change, which keeps the inner loop at a few vector additions
//! plus one rank computation. Ranges of indices are processed independently
//! and their counts summed.

use rayon::prelude::*;

use crate::field::{FieldContext, FieldElement};
use crate::geometry::check_cap;
use crate::error::Result;
use crate::linalg;
use crate::matrix::Matrix;

const CHUNK: u64 = 1 << 14;

pub(crate) struct Kernel<'a> {
    ctx: &'a FieldContext,
    k: usize,
    n: usize,
    /// Entries of the expanded codeword: `n·a` field elements `θ_j c_i`.
    width: usize,
    /// `images[s]` is the expanded codeword of the unit message digit `s`.
    images: Vec<Vec<FieldElement>>,
    limit: usize,
}

impl<'a> Kernel<'a> {
    pub(crate) fn new(ctx: &'a FieldContext, generator: &Matrix) -> Self {
        let k = generator.len();
        let n = generator.first().map_or(0, Vec::len);
        let deg = ctx.degree();
        let theta = ctx.theta();
        let mut images = Vec::with_capacity(k * deg);
        for s in 0..k * deg {
            let r = k - 1 - s / deg;
            let unit = FieldElement::from_raw(ctx.p().pow((s % deg) as u32));
            let img: Vec<FieldElement> = generator[r]
                .iter()
                .flat_map(|&g| {
                    let ug = ctx.mul(unit, g);
                    theta.iter().map(move |&t| ctx.mul(t, ug))
                })
                .collect();
            images.push(img);
        }
        Kernel {
            ctx,
            k,
            n,
            width: n * ctx.a(),
            images,
            limit: n.min(ctx.m()) * ctx.a(),
        }
    }

    pub(crate) fn total(&self) -> u128 {
        (self.ctx.order() as u128).pow(self.k as u32)
    }

    fn digits_of(&self, mut idx: u64) -> Vec<u64> {
        let p = self.ctx.p();
        (0..self.images.len())
            .map(|_| {
                let d = idx % p;
                idx /= p;
                d
            })
            .collect()
    }

    /// Weight counts over the message indices `start..end`.
    fn count_range(&self, start: u64, end: u64) -> Vec<u64> {
        if self.ctx.p() == 2 {
            self.count_range_binary(start, end)
        } else {
            self.count_range_odd(start, end)
        }
    }

    fn count_range_binary(&self, start: u64, end: u64) -> Vec<u64> {
        let mut counts = vec![0u64; self.n + 1];
        let imgs: Vec<Vec<u64>> = self
            .images
            .iter()
            .map(|v| v.iter().map(|x| x.to_int()).collect())
            .collect();
        let mut state = vec![0u64; self.width];
        for (s, d) in self.digits_of(start).into_iter().enumerate() {
            if d == 1 {
                xor_into(&mut state, &imgs[s]);
            }
        }
        let a = self.ctx.a();
        let mut idx = start;
        loop {
            counts[linalg::gf2_rank(&state, self.limit) / a] += 1;
            idx += 1;
            if idx == end {
                break;
            }
            // flipped bits: the trailing ones of idx-1 plus the next zero
            let flips = (idx - 1).trailing_ones() as usize;
            for img in &imgs[..=flips] {
                xor_into(&mut state, img);
            }
        }
        counts
    }

    fn count_range_odd(&self, start: u64, end: u64) -> Vec<u64> {
        let ctx = self.ctx;
        let p = ctx.p();
        let deg = ctx.degree();
        let f = ctx.prime_field();
        let mut counts = vec![0u64; self.n + 1];
        let imgs: Vec<Vec<u64>> = self
            .images
            .iter()
            .map(|v| v.iter().flat_map(|&x| ctx.digits(x)).collect())
            .collect();
        let mut digits = self.digits_of(start);
        let mut state = vec![0u64; self.width * deg];
        for (s, &d) in digits.iter().enumerate() {
            if d != 0 {
                f.axpy(&mut state, d, &imgs[s]);
            }
        }
        let mut scratch = vec![0u64; self.width * deg];
        let a = ctx.a();
        let mut idx = start;
        loop {
            counts[small_rank(p, &state, deg, &mut scratch, self.limit) / a] += 1;
            idx += 1;
            if idx == end {
                break;
            }
            let mut s = 0;
            loop {
                f.axpy(&mut state, 1, &imgs[s]);
                digits[s] += 1;
                if digits[s] < p {
                    break;
                }
                digits[s] = 0;
                s += 1;
            }
        }
        counts
    }

    pub(crate) fn distribution(&self, cap: u64) -> Result<Vec<u64>> {
        let total = self.total();
        check_cap(total, cap)?;
        let total = total as u64;
        let chunks: Vec<(u64, u64)> = (0..total.div_ceil(CHUNK))
            .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(total)))
            .collect();
        let counts = chunks
            .par_iter()
            .map(|&(s, e)| self.count_range(s, e))
            .reduce(
                || vec![0u64; self.n + 1],
                |mut acc, part| {
                    for (x, y) in acc.iter_mut().zip(part) {
                        *x += y;
                    }
                    acc
                },
            );
        Ok(counts)
    }
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Rank of the rows of `data` (row length `len`), stopping at `limit`.
fn small_rank(p: u64, data: &[u64], len: usize, scratch: &mut [u64], limit: usize) -> usize {
    let f = crate::linalg::PrimeField::new(p);
    let mut pivots: Vec<usize> = Vec::with_capacity(limit);
    let mut r = 0;
    for row in data.chunks(len) {
        let (done, rest) = scratch.split_at_mut(r * len);
        let cur = &mut rest[..len];
        cur.copy_from_slice(row);
        for (i, &pc) in pivots.iter().enumerate() {
            let c = cur[pc];
            if c != 0 {
                f.axpy(cur, f.neg(c), &done[i * len..(i + 1) * len]);
            }
        }
        if let Some(pc) = cur.iter().position(|&c| c != 0) {
            let inv = f.inv(cur[pc]);
            f.scale(cur, inv);
            pivots.push(pc);
            r += 1;
            if r == limit {
                break;
            }
        }
    }
    r
}

/// Message with index `idx` (last coordinate fastest).
pub fn message(ctx: &FieldContext, k: usize, mut idx: u64) -> Vec<FieldElement> {
    let q = ctx.order();
    let mut x = vec![FieldElement::ZERO; k];
    for slot in x.iter_mut().rev() {
        *slot = FieldElement::from_raw(idx % q);
        idx /= q;
    }
    x
}
