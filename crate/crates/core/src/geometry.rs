//! Systems: `F_q`-subspaces of `F_{q^m}^k`.
//!
//! A vector `(v_1, …, v_k)` is flattened to prime-field coordinates with
//! coordinate `j` of component `i` at index `i·(a·m) + j`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement};
use crate::linalg::{self, FpSpace};
use crate::matrix::{self, Matrix};
use crate::subspace::{same_ctx, Ctx, Subspace};

#[derive(Clone, Debug)]
pub struct System {
    ctx: Ctx,
    k: usize,
    space: FpSpace,
}

impl PartialEq for System {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.space == other.space && *self.ctx == *other.ctx
    }
}

impl Eq for System {}

/// Serialized system: `k` plus an `F_q`-basis, one row of element integers per vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub k: usize,
    pub basis: Vec<Vec<u64>>,
}

pub(crate) fn flatten(ctx: &FieldContext, v: &[FieldElement]) -> Vec<u64> {
    v.iter().flat_map(|&x| ctx.digits(x)).collect()
}

pub(crate) fn unflatten(ctx: &FieldContext, d: &[u64]) -> Vec<FieldElement> {
    d.chunks(ctx.degree()).map(|c| ctx.from_digits(c)).collect()
}

/// Prime-field expansion of the `F_q`-span of `v`.
fn fq_rows<'a>(ctx: &'a FieldContext, v: &'a [FieldElement]) -> impl Iterator<Item = Vec<u64>> + 'a {
    ctx.theta().iter().map(move |&t| {
        let scaled: Vec<FieldElement> = v.iter().map(|&x| ctx.mul(t, x)).collect();
        flatten(ctx, &scaled)
    })
}

/// Prime-field expansion of the `F_{q^m}`-line through `v`.
fn line_rows(ctx: &FieldContext, v: &[FieldElement]) -> Vec<Vec<u64>> {
    (0..ctx.degree())
        .map(|t| {
            let alpha = ctx.from_digits(&unit(ctx.degree(), t));
            let scaled: Vec<FieldElement> = v.iter().map(|&x| ctx.mul(alpha, x)).collect();
            flatten(ctx, &scaled)
        })
        .collect()
}

fn unit(len: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; len];
    v[i] = 1;
    v
}

/// Number of projective points of `F_{q^m}^k`, i.e. `(Q^k - 1)/(Q - 1)` with `Q = q^m`.
pub fn projective_count(ctx: &FieldContext, k: usize) -> u128 {
    let q = ctx.order() as u128;
    (0..k as u32).map(|j| q.pow(j)).sum()
}

/// Projective representatives of `F_{q^m}^k` (first nonzero coordinate 1), in
/// increasing integer order of the message encoding.
pub fn projective_points(ctx: &FieldContext, k: usize) -> impl Iterator<Item = Vec<FieldElement>> + '_ {
    let q = ctx.order();
    (0..k).flat_map(move |lead| {
        let tail = k - lead - 1;
        let count = q.pow(tail as u32);
        (0..count).map(move |idx| {
            let mut v = vec![FieldElement::ZERO; k];
            v[lead] = FieldElement::ONE;
            let mut r = idx;
            for slot in v[lead + 1..].iter_mut().rev() {
                *slot = FieldElement::from_raw(r % q);
                r /= q;
            }
            v
        })
    })
}

pub(crate) fn check_cap(required: u128, cap: u64) -> Result<()> {
    if required > cap as u128 {
        Err(Error::CapExceeded { required, cap })
    } else {
        Ok(())
    }
}

impl System {
    /// `F_q`-span of the given vectors of `F_{q^m}^k`.
    pub fn span(ctx: &Ctx, k: usize, vectors: &[Vec<FieldElement>]) -> Result<Self> {
        let mut space = FpSpace::zero(ctx.p(), k * ctx.degree());
        for v in vectors {
            if v.len() != k {
                return Err(Error::DimensionMismatch(format!("vector of length {} in F^{k}", v.len())));
            }
            for row in fq_rows(ctx, v) {
                space.insert(row);
            }
        }
        Ok(System { ctx: ctx.clone(), k, space })
    }

    /// `F_{q^m}`-span of the given vectors, as an `F_q`-space.
    pub fn span_fqm(ctx: &Ctx, k: usize, vectors: &[Vec<FieldElement>]) -> Result<Self> {
        let mut space = FpSpace::zero(ctx.p(), k * ctx.degree());
        for v in vectors {
            if v.len() != k {
                return Err(Error::DimensionMismatch(format!("vector of length {} in F^{k}", v.len())));
            }
            for row in line_rows(ctx, v) {
                space.insert(row);
            }
        }
        Ok(System { ctx: ctx.clone(), k, space })
    }

    pub(crate) fn from_fp(ctx: &Ctx, k: usize, space: FpSpace) -> Self {
        System { ctx: ctx.clone(), k, space }
    }

    /// `U_1 × … × U_k`, each part nonzero and proper.
    pub fn product(parts: &[Subspace]) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::precondition("a product system needs at least one part"));
        };
        let ctx = first.context().clone();
        let k = parts.len();
        let deg = ctx.degree();
        let mut space = FpSpace::zero(ctx.p(), k * deg);
        for (i, u) in parts.iter().enumerate() {
            same_ctx(&ctx, u.context())?;
            if u.is_zero() || u.dim_fq() == ctx.m() {
                return Err(Error::precondition(format!(
                    "part {i} has dimension {}; parts must satisfy 0 < dim < m",
                    u.dim_fq()
                )));
            }
            for row in u.fp_space().rows() {
                let mut v = vec![0u64; k * deg];
                v[i * deg..(i + 1) * deg].copy_from_slice(row);
                space.insert(v);
            }
        }
        Ok(System { ctx, k, space })
    }

    pub fn context(&self) -> &Ctx {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Dimension over `F_q`.
    pub fn dim(&self) -> usize {
        self.space.dim() / self.ctx.a()
    }

    pub fn fp_space(&self) -> &FpSpace {
        &self.space
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        v.len() == self.k && self.space.contains(&flatten(&self.ctx, v))
    }

    /// A canonical `F_q`-basis drawn greedily from the echelon rows.
    pub fn fq_basis(&self) -> Vec<Vec<FieldElement>> {
        let mut spanned = FpSpace::zero(self.ctx.p(), self.space.len());
        let mut out = Vec::new();
        for row in self.space.rows() {
            if spanned.contains(row) {
                continue;
            }
            let v = unflatten(&self.ctx, row);
            for r in fq_rows(&self.ctx, &v) {
                spanned.insert(r);
            }
            out.push(v);
        }
        out
    }

    /// `true` iff the system spans `F_{q^m}^k` over `F_{q^m}`.
    pub fn spans_ambient(&self) -> bool {
        let basis: Matrix = self.fq_basis();
        matrix::rank(&self.ctx, &basis) == self.k
    }

    fn check(&self, other: &System) -> Result<()> {
        same_ctx(&self.ctx, &other.ctx)?;
        if self.k != other.k {
            return Err(Error::DimensionMismatch(format!("ambient F^{} vs F^{}", self.k, other.k)));
        }
        Ok(())
    }

    pub fn intersect(&self, other: &System) -> Result<System> {
        self.check(other)?;
        Ok(System::from_fp(&self.ctx, self.k, self.space.intersect(&other.space)))
    }

    pub fn sum(&self, other: &System) -> Result<System> {
        self.check(other)?;
        Ok(System::from_fp(&self.ctx, self.k, self.space.sum(&other.space)))
    }

    pub fn is_subspace_of(&self, other: &System) -> Result<bool> {
        self.check(other)?;
        Ok(self.space.is_subspace_of(&other.space))
    }

    /// Orthogonal complement under `Tr_{q^m/q}(u_1v_1 + … + u_kv_k)`.
    pub fn perp_prime(&self) -> System {
        let ctx = &self.ctx;
        let deg = ctx.degree();
        let rows: Vec<Vec<u64>> = self
            .space
            .rows()
            .iter()
            .map(|r| {
                r.chunks(deg)
                    .flat_map(|c| ctx.trace_form_row(ctx.from_digits(c)))
                    .collect()
            })
            .collect();
        System::from_fp(ctx, self.k, linalg::kernel(ctx.p(), self.k * deg, &rows))
    }

    /// The `F_{q^m}`-hyperplane `x^⊥ = {v : Σ x_i v_i = 0}` as a system.
    pub fn hyperplane(ctx: &Ctx, x: &[FieldElement]) -> Result<System> {
        if x.iter().all(|c| c.is_zero()) {
            return Err(Error::precondition("x must be nonzero"));
        }
        let k = x.len();
        let basis = matrix::right_kernel(ctx, &vec![x.to_vec()], k);
        System::span_fqm(ctx, k, &basis)
    }

    /// `n − dim_{F_q}(U ∩ x^⊥)`, the weight of the codeword with message `x`.
    pub fn weight_via_system(&self, x: &[FieldElement]) -> Result<usize> {
        if x.len() != self.k {
            return Err(Error::DimensionMismatch(format!("message of length {}", x.len())));
        }
        let h = System::hyperplane(&self.ctx, x)?;
        Ok(self.dim() - self.intersect(&h)?.dim())
    }

    /// `dim_{F_q}(U ∩ ⟨x⟩_{F_{q^m}})`.
    pub fn dim_with_line(&self, x: &[FieldElement]) -> usize {
        let extra = line_rows(&self.ctx, x);
        let sum = self.space.dim_with(&extra);
        (self.space.dim() + self.ctx.degree() - sum) / self.ctx.a()
    }

    /// `max dim(U ∩ H)` over all `F_{q^m}`-hyperplanes `H`.
    pub fn max_hyperplane_intersection(&self, pcap: u64) -> Result<usize> {
        check_cap(projective_count(&self.ctx, self.k), pcap)?;
        if self.k == 1 {
            return Ok(0);
        }
        let points: Vec<Vec<FieldElement>> = projective_points(&self.ctx, self.k).collect();
        let best = points
            .par_iter()
            .map(|x| {
                let h = System::hyperplane(&self.ctx, x).expect("representatives are nonzero");
                self.space.intersect(&h.space).dim() / self.ctx.a()
            })
            .max()
            .unwrap_or(0);
        Ok(best)
    }

    /// `max dim(U ∩ ⟨v⟩)` over all nonzero `v`.
    pub fn max_point_weight(&self, pcap: u64) -> Result<usize> {
        check_cap(projective_count(&self.ctx, self.k), pcap)?;
        let points: Vec<Vec<FieldElement>> = projective_points(&self.ctx, self.k).collect();
        Ok(points.par_iter().map(|x| self.dim_with_line(x)).max().unwrap_or(0))
    }

    /// `U·B = {uB : u ∈ U}` for invertible `B`.
    pub fn apply_gl_k(&self, b: &Matrix) -> Result<System> {
        if b.len() != self.k || matrix::rank(&self.ctx, b) != self.k {
            return Err(Error::SingularMatrix);
        }
        let images: Vec<Vec<FieldElement>> = self
            .space
            .rows()
            .iter()
            .map(|r| matrix::vec_mul(&self.ctx, &unflatten(&self.ctx, r), b))
            .collect();
        let space = FpSpace::from_rows(self.ctx.p(), self.space.len(), images.iter().map(|v| flatten(&self.ctx, v)));
        Ok(System::from_fp(&self.ctx, self.k, space))
    }

    /// Standard-product orthogonal complement of an `F_{q^m}`-subspace given by
    /// a spanning set, as a system.
    pub fn fqm_orthogonal(ctx: &Ctx, k: usize, vectors: &[Vec<FieldElement>]) -> Result<System> {
        let basis = if vectors.is_empty() {
            matrix::identity(k)
        } else {
            matrix::right_kernel(ctx, &vectors.to_vec(), k)
        };
        System::span_fqm(ctx, k, &basis)
    }

    pub fn to_record(&self) -> SystemRecord {
        SystemRecord {
            k: self.k,
            basis: self
                .fq_basis()
                .iter()
                .map(|v| v.iter().map(|x| x.to_int()).collect())
                .collect(),
        }
    }

    pub fn from_record(ctx: &Ctx, rec: &SystemRecord) -> Result<Self> {
        let vectors = rec
            .basis
            .iter()
            .map(|r| r.iter().map(|&v| ctx.element(v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        System::span(ctx, rec.k, &vectors)
    }
}

/// Both sides of `dim(U^{⊥′} ∩ W^⊥) = dim(U ∩ W) + km − dim U − dim W`, where `W`
/// is the `F_{q^m}`-span of `w_vectors` and `W^⊥` its standard orthogonal.
pub fn dual_intersection_identity(u: &System, w_vectors: &[Vec<FieldElement>]) -> Result<(usize, usize)> {
    let ctx = u.context();
    let k = u.k();
    let w = System::span_fqm(ctx, k, w_vectors)?;
    let w_perp = System::fqm_orthogonal(ctx, k, w_vectors)?;
    let lhs = u.perp_prime().intersect(&w_perp)?.dim();
    let rhs = u.intersect(&w)?.dim() + k * ctx.m() - u.dim() - w.dim();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ctx(p: u64, m: usize) -> Ctx {
        Arc::new(FieldContext::new(p, 1, m, None).unwrap())
    }

    fn random_vec<R: Rng>(ctx: &FieldContext, k: usize, rng: &mut R) -> Vec<FieldElement> {
        (0..k).map(|_| FieldElement::from_raw(rng.gen_range(0..ctx.order()))).collect()
    }

    #[test]
    fn identity_system() {
        let k = ctx(2, 3);
        let u = System::span(&k, 2, &matrix::identity(2)).unwrap();
        assert_eq!(u.dim(), 2);
        assert!(u.spans_ambient());
        assert_eq!(u.max_hyperplane_intersection(1 << 16).unwrap(), 1);
        let d = u.perp_prime();
        assert_eq!(d.dim(), 4);
        let z = Subspace::subfield(&k, 1, 1).unwrap().dual();
        assert_eq!(d, System::product(&[z.clone(), z]).unwrap());
    }

    #[test]
    fn product_system_weights() {
        let k = ctx(2, 6);
        let l = k.find_element_of_degree(6, 2).unwrap();
        let parts = vec![
            Subspace::geometric(&k, l, 3).unwrap(),
            Subspace::geometric(&k, l, 2).unwrap(),
            Subspace::geometric(&k, l, 2).unwrap(),
        ];
        let u = System::product(&parts).unwrap();
        assert_eq!(u.dim(), 7);
        for i in 0..3 {
            let mut e = vec![FieldElement::ZERO; 3];
            e[i] = FieldElement::ONE;
            assert_eq!(u.weight_via_system(&e).unwrap(), parts[i].dim_fq());
        }
        assert!(System::product(&[Subspace::zero(&k, 1).unwrap()]).is_err());
        // the dual of a product is the product of the duals
        let blockwise = System::product(&parts.iter().map(Subspace::dual).collect::<Vec<_>>()).unwrap();
        assert_eq!(u.perp_prime(), blockwise);
        assert!(u.max_point_weight(1 << 16).unwrap() < 6);
    }

    #[test]
    fn diagonal_action_scales_parts() {
        let k = ctx(2, 4);
        let l = k.find_element_of_degree(4, 0).unwrap();
        let parts = vec![Subspace::geometric(&k, l, 2).unwrap(), Subspace::geometric(&k, l, 3).unwrap()];
        let u = System::product(&parts).unwrap();
        let d1 = k.add(l, FieldElement::ONE);
        let d2 = k.pow(l, 3);
        let b = vec![vec![d1, FieldElement::ZERO], vec![FieldElement::ZERO, d2]];
        let scaled = System::product(&[parts[0].scale(d1).unwrap(), parts[1].scale(d2).unwrap()]).unwrap();
        assert_eq!(u.apply_gl_k(&b).unwrap(), scaled);
        let b_inv = matrix::inverse(&k, &b).unwrap();
        assert_eq!(u.apply_gl_k(&b).unwrap().apply_gl_k(&b_inv).unwrap(), u);
    }

    #[test]
    fn projective_enumeration() {
        let k = ctx(3, 2);
        let pts: Vec<_> = projective_points(&k, 3).collect();
        assert_eq!(pts.len() as u128, projective_count(&k, 3));
        assert_eq!(pts.len(), 1 + 9 + 81);
        let lines: std::collections::HashSet<_> = pts
            .iter()
            .map(|x| System::span_fqm(&k, 3, std::slice::from_ref(x)).unwrap().fp_space().clone())
            .collect();
        assert_eq!(lines.len(), pts.len());
    }

    #[test]
    fn record_roundtrip() {
        let k = ctx(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let vs: Vec<_> = (0..3).map(|_| random_vec(&k, 2, &mut rng)).collect();
        let u = System::span(&k, 2, &vs).unwrap();
        assert_eq!(System::from_record(&k, &u.to_record()).unwrap(), u);
    }

    proptest::proptest! {
        #[test]
        fn perp_prime_laws(seed: u64, n in 1usize..6) {
            let k = ctx(2, 3);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vs: Vec<_> = (0..n).map(|_| random_vec(&k, 2, &mut rng)).collect();
            let u = System::span(&k, 2, &vs).unwrap();
            let d = u.perp_prime();
            proptest::prop_assert_eq!(d.dim(), 6 - u.dim());
            proptest::prop_assert_eq!(d.perp_prime(), u.clone());
            let extra = System::span(&k, 2, &[random_vec(&k, 2, &mut rng)]).unwrap();
            let bigger = u.sum(&extra).unwrap();
            proptest::prop_assert!(bigger.perp_prime().is_subspace_of(&d).unwrap());
        }

        #[test]
        fn dual_intersection_dimensions(seed: u64, n in 0usize..5, w in 0usize..3) {
            let k = ctx(3, 2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vs: Vec<_> = (0..n).map(|_| random_vec(&k, 3, &mut rng)).collect();
            let ws: Vec<_> = (0..w).map(|_| random_vec(&k, 3, &mut rng)).collect();
            let u = System::span(&k, 3, &vs).unwrap();
            let (lhs, rhs) = dual_intersection_identity(&u, &ws).unwrap();
            proptest::prop_assert_eq!(lhs, rhs);
        }
    }
}
