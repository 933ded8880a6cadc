//! `F_{q^e}`-subspaces of `F_{q^m}`: sums, intersections, products and trace duals.
//!
//! A subspace is stored as the reduced row echelon form of the prime-field
//! coordinates of its elements. Since RREF is unique, equality of subspaces is
//! equality of the stored matrices. The space is always closed under the
//! subfield `F_{q^{base_e}}`; `basis` lists a canonical `F_{q^{base_e}}`-basis
//! drawn greedily from the RREF rows.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement};
use crate::linalg::{self, FpSpace};

/// Shared handle to a field context.
pub type Ctx = Arc<FieldContext>;

pub(crate) fn same_ctx(a: &Ctx, b: &Ctx) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::ContextMismatch)
    }
}

#[derive(Clone, Debug)]
pub struct Subspace {
    ctx: Ctx,
    base_e: usize,
    space: FpSpace,
    basis: Vec<FieldElement>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.base_e == other.base_e && self.space == other.space && *self.ctx == *other.ctx
    }
}

impl Eq for Subspace {}

/// Serialized form: `{"base_e": e, "basis": [ints]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceRecord {
    pub base_e: usize,
    pub basis: Vec<u64>,
}

impl Subspace {
    /// Wraps a prime-field space already known to be `F_{q^base_e}`-closed.
    pub(crate) fn from_fp(ctx: &Ctx, base_e: usize, space: FpSpace) -> Self {
        let basis = canonical_basis(ctx, base_e, &space);
        Subspace { ctx: ctx.clone(), base_e, space, basis }
    }

    pub fn zero(ctx: &Ctx, base_e: usize) -> Result<Self> {
        ctx.check_divisor(base_e)?;
        Ok(Self::from_fp(ctx, base_e, FpSpace::zero(ctx.p(), ctx.degree())))
    }

    pub fn whole(ctx: &Ctx, base_e: usize) -> Result<Self> {
        ctx.check_divisor(base_e)?;
        Ok(Self::from_fp(ctx, base_e, FpSpace::full(ctx.p(), ctx.degree())))
    }

    /// `F_{q^base_e}`-span of `elements`.
    pub fn span(ctx: &Ctx, elements: &[FieldElement], base_e: usize) -> Result<Self> {
        let scalars = ctx.subfield_basis(base_e)?;
        for &x in elements {
            ctx.element(x.to_int())?;
        }
        let rows = elements
            .iter()
            .flat_map(|&x| scalars.iter().map(move |&s| ctx.digits(ctx.mul(x, s))));
        let space = FpSpace::from_rows(ctx.p(), ctx.degree(), rows);
        Ok(Self::from_fp(ctx, base_e, space))
    }

    /// The subfield `F_{q^e}` viewed as an `F_{q^base_e}`-subspace.
    pub fn subfield(ctx: &Ctx, e: usize, base_e: usize) -> Result<Self> {
        if !e.is_multiple_of(base_e) {
            return Err(Error::NotDivisor { e: base_e, m: e });
        }
        let rows = ctx.subfield_basis(e)?.iter().map(|&b| ctx.digits(b));
        let space = FpSpace::from_rows(ctx.p(), ctx.degree(), rows);
        Ok(Self::from_fp(ctx, base_e, space))
    }

    /// `⟨1, λ, …, λ^{t-1}⟩_{F_q}`.
    pub fn geometric(ctx: &Ctx, lambda: FieldElement, t: usize) -> Result<Self> {
        let d = ctx.degree_over_q(lambda);
        if t == 0 || t > d {
            return Err(Error::precondition(format!(
                "t = {t} must lie in 1..={d}, the degree of λ over F_q"
            )));
        }
        let powers: Vec<FieldElement> = (0..t).map(|i| ctx.pow(lambda, i as u64)).collect();
        Self::span(ctx, &powers, 1)
    }

    pub fn context(&self) -> &Ctx {
        &self.ctx
    }

    pub fn base_e(&self) -> usize {
        self.base_e
    }

    /// Dimension over `F_{q^base_e}`.
    pub fn dim(&self) -> usize {
        self.space.dim() / (self.ctx.a() * self.base_e)
    }

    /// Dimension over `F_q`.
    pub fn dim_fq(&self) -> usize {
        self.space.dim() / self.ctx.a()
    }

    pub fn is_zero(&self) -> bool {
        self.space.dim() == 0
    }

    /// Canonical `F_{q^base_e}`-basis.
    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    /// Prime-field basis (the RREF rows).
    pub fn fp_basis(&self) -> Vec<FieldElement> {
        self.space.rows().iter().map(|r| self.ctx.from_digits(r)).collect()
    }

    pub fn fp_space(&self) -> &FpSpace {
        &self.space
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        self.space.contains(&self.ctx.digits(x))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.space.elements().map(|d| self.ctx.from_digits(&d))
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        same_ctx(&self.ctx, &other.ctx)?;
        if self.base_e != other.base_e {
            return Err(Error::BaseMismatch { left: self.base_e, right: other.base_e });
        }
        Ok(())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self.space.is_subspace_of(&other.space))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        Ok(Self::from_fp(&self.ctx, self.base_e, self.space.sum(&other.space)))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        Ok(Self::from_fp(&self.ctx, self.base_e, self.space.intersect(&other.space)))
    }

    /// `U_1U_2`, the span of all products `a_1a_2`.
    pub fn product(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let (b1, b2) = (self.fp_basis(), other.fp_basis());
        let ctx = &self.ctx;
        let rows = b1
            .iter()
            .flat_map(|&x| b2.iter().map(move |&y| ctx.digits(ctx.mul(x, y))));
        let space = FpSpace::from_rows(ctx.p(), ctx.degree(), rows);
        Ok(Self::from_fp(ctx, self.base_e, space))
    }

    /// `c·U`.
    pub fn scale(&self, c: FieldElement) -> Result<Subspace> {
        if c.is_zero() {
            return Err(Error::ZeroScalar);
        }
        let rows = self.fp_basis().into_iter().map(|b| self.ctx.digits(self.ctx.mul(c, b)));
        let space = FpSpace::from_rows(self.ctx.p(), self.ctx.degree(), rows);
        Ok(Self::from_fp(&self.ctx, self.base_e, space))
    }

    /// `true` iff `U` is closed under multiplication by `F_{q^e}`.
    pub fn is_subfield_linear(&self, e: usize) -> Result<bool> {
        let scalars = self.ctx.subfield_basis(e)?;
        let basis = self.fp_basis();
        Ok(scalars
            .iter()
            .all(|&s| basis.iter().all(|&b| self.contains(self.ctx.mul(s, b)))))
    }

    /// Reinterprets the space over another subfield. Restricting to a smaller
    /// subfield always succeeds; extending requires closure.
    pub fn with_base(&self, e: usize) -> Result<Subspace> {
        self.ctx.check_divisor(e)?;
        if !self.is_subfield_linear(e)? {
            return Err(Error::BaseMismatch { left: self.base_e, right: e });
        }
        Ok(Self::from_fp(&self.ctx, e, self.space.clone()))
    }

    /// Dual under `Tr_{q^m/q^e}(xy)`. `U` must be `F_{q^e}`-linear; the result
    /// has base `F_{q^e}`.
    pub fn trace_dual(&self, e: usize) -> Result<Subspace> {
        self.ctx.check_divisor(e)?;
        if !self.is_subfield_linear(e)? {
            return Err(Error::BaseMismatch { left: self.base_e, right: e });
        }
        // For an F_{q^e}-space the relative and absolute annihilators agree.
        let rows: Vec<Vec<u64>> = self.fp_basis().into_iter().map(|b| self.ctx.trace_form_row(b)).collect();
        let space = linalg::kernel(self.ctx.p(), self.ctx.degree(), &rows);
        Ok(Self::from_fp(&self.ctx, e, space))
    }

    /// Dual over the space's own base field.
    pub fn dual(&self) -> Subspace {
        self.trace_dual(self.base_e).expect("a space is linear over its own base")
    }

    pub fn to_record(&self) -> SubspaceRecord {
        SubspaceRecord {
            base_e: self.base_e,
            basis: self.basis.iter().map(|b| b.to_int()).collect(),
        }
    }

    pub fn from_record(ctx: &Ctx, rec: &SubspaceRecord) -> Result<Self> {
        let elems = rec
            .basis
            .iter()
            .map(|&v| ctx.element(v))
            .collect::<Result<Vec<_>>>()?;
        Self::span(ctx, &elems, rec.base_e)
    }

    /// A uniformly random element.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> FieldElement {
        let p = self.ctx.p();
        let f = self.space.field();
        let mut v = vec![0u64; self.ctx.degree()];
        for row in self.space.rows() {
            f.axpy(&mut v, rng.gen_range(0..p), row);
        }
        self.ctx.from_digits(&v)
    }

    /// Some `(c, λ)` with `U = c·⟨1, λ, …, λ^{d-1}⟩_{F_q}`, `d = dim_{F_q} U ≥ 2`.
    pub fn detect_geometric_form(&self, cap: u64) -> Result<Option<(FieldElement, FieldElement)>> {
        Ok(self.geometric_search(cap, true)?.into_iter().next())
    }

    /// Every `(c, λ)` with `U = c·⟨1, λ, …⟩`, where `c` ranges over one
    /// representative per `F_q^*`-class (the one with the smallest encoding).
    pub fn geometric_witnesses(&self, cap: u64) -> Result<Vec<(FieldElement, FieldElement)>> {
        self.geometric_search(cap, false)
    }

    fn geometric_search(&self, cap: u64, first_only: bool) -> Result<Vec<(FieldElement, FieldElement)>> {
        let ctx = &self.ctx;
        let d = self.dim_fq();
        if d < 2 {
            return Err(Error::precondition("geometric form needs dim ≥ 2"));
        }
        let required = (ctx.q() as u128).pow(2 * d as u32);
        if required > cap as u128 {
            return Err(Error::CapExceeded { required, cap });
        }
        let fq_star: Vec<FieldElement> = ctx.subfield_elements(1)?.into_iter().filter(|x| !x.is_zero()).collect();
        let mut out = Vec::new();
        let elems: Vec<FieldElement> = self.elements().filter(|x| !x.is_zero()).collect();
        for &c in &elems {
            if fq_star.iter().any(|&a| ctx.mul(a, c) < c) {
                continue;
            }
            let c_inv = ctx.inv(c)?;
            let v = self.scale(c_inv)?;
            for &y in &elems {
                let lambda = ctx.mul(c_inv, y);
                if ctx.degree_over_q(lambda) < d {
                    continue;
                }
                if Subspace::geometric(ctx, lambda, d)? == v {
                    out.push((c, lambda));
                    if first_only {
                        return Ok(out);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Some `c` with `self = c·other` (both nonzero, same dimension), or `None`.
    pub fn scalar_witness(&self, other: &Subspace) -> Result<Option<FieldElement>> {
        self.check_compatible(other)?;
        if self.space.dim() != other.space.dim() {
            return Ok(None);
        }
        let Some(&u) = other.fp_basis().first() else {
            return Ok(Some(FieldElement::ONE));
        };
        let u_inv = self.ctx.inv(u)?;
        for w in self.elements() {
            if w.is_zero() {
                continue;
            }
            let c = self.ctx.mul(w, u_inv);
            if other.scale(c)? == *self {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }
}

fn canonical_basis(ctx: &FieldContext, base_e: usize, space: &FpSpace) -> Vec<FieldElement> {
    let scalars = ctx.subfield_basis(base_e).expect("base_e divides m");
    let mut spanned = FpSpace::zero(ctx.p(), ctx.degree());
    let mut out = Vec::new();
    for row in space.rows() {
        if spanned.contains(row) {
            continue;
        }
        let x = ctx.from_digits(row);
        for &s in scalars {
            spanned.insert(ctx.digits(ctx.mul(x, s)));
        }
        out.push(x);
    }
    out
}

/// Result of checking `(⟨1,λ,…,λ^{t-1}⟩)^{⊥*} = δ^{-1}⟨1,λ,…,λ^{m-t-1}⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricDualCheck {
    pub holds: bool,
    pub delta: FieldElement,
}

/// Checks the trace dual of a geometric space built on a generator `λ` of `F_{q^m}`.
pub fn verify_dual_geometric(ctx: &Ctx, lambda: FieldElement, t: usize) -> Result<GeometricDualCheck> {
    let m = ctx.m();
    if ctx.degree_over_q(lambda) != m {
        return Err(Error::precondition("λ must generate F_q^m over F_q"));
    }
    if t == 0 || t >= m {
        return Err(Error::precondition(format!("t = {t} must lie in 1..{m}")));
    }
    let f = ctx.minimal_polynomial(lambda);
    let delta = ctx.derivative_at(&f, lambda);
    let dual = Subspace::geometric(ctx, lambda, t)?.dual();
    let expected = Subspace::geometric(ctx, lambda, m - t)?.scale(ctx.inv(delta)?)?;
    Ok(GeometricDualCheck { holds: dual == expected, delta })
}

/// Searches `c` with `(⟨1,λ,…,λ^{t-1}⟩)^{⊥*} = Ker(Tr_{q^m/q^e}) ⊕ c⟨1,λ,…,λ^{e-t-1}⟩`
/// where `e` is the degree of `λ`. For `t = e` the right summand is empty and
/// no witness is needed.
pub fn verify_dual_subfield(ctx: &Ctx, lambda: FieldElement, t: usize) -> Result<(bool, Option<FieldElement>)> {
    let e = ctx.degree_over_q(lambda);
    let m = ctx.m();
    if e <= 1 || e >= m {
        return Err(Error::precondition(format!("λ has degree {e}; need 1 < e < m = {m} with e | m")));
    }
    if t == 0 || t > e {
        return Err(Error::precondition(format!("t = {t} must lie in 1..={e}")));
    }
    let dual = Subspace::geometric(ctx, lambda, t)?.dual();
    let kernel = Subspace::subfield(ctx, e, e)?.trace_dual(e)?.with_base(1)?;
    if t == e {
        return Ok((dual == kernel, None));
    }
    let right = Subspace::geometric(ctx, lambda, e - t)?;
    let mut candidates: Vec<FieldElement> = dual.elements().filter(|&c| !kernel.contains(c)).collect();
    candidates.sort();
    for c in candidates {
        let part = right.scale(c)?;
        let total = kernel.sum(&part)?;
        if total.dim() == kernel.dim() + part.dim() && total == dual {
            return Ok((true, Some(c)));
        }
    }
    Ok((false, None))
}

/// `dim(U_1U_2) ≥ dim U_1 + dim U_2 - 1` for `m` prime.
pub fn cauchy_davenport_check(u1: &Subspace, u2: &Subspace) -> Result<bool> {
    let m = u1.ctx.m();
    if !crate::field::is_prime(m as u64) {
        return Err(Error::NotApplicable(format!("m = {m} is not prime")));
    }
    if u1.is_zero() || u2.is_zero() {
        return Err(Error::precondition("both spaces must be nonzero"));
    }
    let prod = u1.product(u2)?;
    if prod.dim_fq() > m - 1 {
        return Ok(true);
    }
    Ok(prod.dim_fq() + 1 >= u1.dim_fq() + u2.dim_fq())
}

/// Given `dim U_2 = m - dim U_1` and `dim(U_1U_2) = m - 1`, finds `c` with
/// `U_2 = c·U_1^{⊥*}`.
pub fn critical_complement_witness(u1: &Subspace, u2: &Subspace) -> Result<Option<FieldElement>> {
    let m = u1.ctx.m();
    if u1.dim_fq() + u2.dim_fq() != m {
        return Err(Error::precondition("dimensions must be complementary"));
    }
    if u1.product(u2)?.dim_fq() + 1 != m {
        return Err(Error::precondition("product must be a hyperplane"));
    }
    u2.scalar_witness(&u1.dual())
}

/// All `F_q`-subspaces of `F_{q^m}` of the given `F_q`-dimension (requires `q` prime).
pub fn all_subspaces(ctx: &Ctx, dim: usize) -> Result<Vec<Subspace>> {
    if ctx.a() != 1 {
        return Err(Error::NotApplicable("subspace enumeration needs q prime".into()));
    }
    let n = ctx.m();
    if dim > n {
        return Ok(Vec::new());
    }
    let p = ctx.p();
    let mut out = Vec::new();
    for pivots in combinations(n, dim) {
        // free slots: (row i, column c) with c > pivot_i and c not a pivot
        let slots: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &pc)| (pc + 1..n).filter(|c| !pivots.contains(c)).map(move |c| (i, c)))
            .collect();
        let count = p.pow(slots.len() as u32);
        for code in 0..count {
            let mut rows: Vec<Vec<u64>> = pivots
                .iter()
                .map(|&pc| {
                    let mut r = vec![0u64; n];
                    r[pc] = 1;
                    r
                })
                .collect();
            let mut c = code;
            for &(i, col) in &slots {
                rows[i][col] = c % p;
                c /= p;
            }
            let space = FpSpace::from_rows(p, n, rows);
            out.push(Subspace::from_fp(ctx, 1, space));
        }
    }
    Ok(out)
}

/// A random `F_{q^base_e}`-subspace of the given dimension over `F_{q^base_e}`.
pub fn random_subspace<R: Rng>(ctx: &Ctx, base_e: usize, dim: usize, rng: &mut R) -> Result<Subspace> {
    ctx.check_divisor(base_e)?;
    if dim > ctx.m() / base_e {
        return Err(Error::precondition("dimension exceeds the ambient dimension"));
    }
    let mut u = Subspace::zero(ctx, base_e)?;
    while u.dim() < dim {
        let x = FieldElement::from_raw(rng.gen_range(0..ctx.order()));
        if !u.contains(x) {
            u = u.sum(&Subspace::span(ctx, &[x], base_e)?)?;
        }
    }
    Ok(u)
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u64, a: usize, m: usize) -> Ctx {
        Arc::new(FieldContext::new(p, a, m, None).unwrap())
    }

    #[test]
    fn span_examples() {
        let k = ctx(2, 1, 6);
        let l = k.find_element_of_degree(6, 0).unwrap();
        assert_eq!(Subspace::span(&k, &[], 1).unwrap().dim(), 0);
        let one_plus = k.add(FieldElement::ONE, l);
        let a = Subspace::span(&k, &[FieldElement::ONE, l, one_plus], 1).unwrap();
        assert_eq!(a, Subspace::span(&k, &[FieldElement::ONE, l], 1).unwrap());
        assert_eq!(a.dim(), 2);
        assert_eq!(Subspace::geometric(&k, l, 3).unwrap().dim(), 3);
    }

    #[test]
    fn intersection_in_f16() {
        let k = ctx(2, 1, 4);
        let l = k.find_element_of_degree(4, 0).unwrap();
        let l2 = k.mul(l, l);
        let u = Subspace::span(&k, &[FieldElement::ONE, l], 1).unwrap();
        let v = Subspace::span(&k, &[l, l2], 1).unwrap();
        let i = u.intersect(&v).unwrap();
        assert_eq!(i, Subspace::span(&k, &[l], 1).unwrap());
        // brute-force oracle
        let count = k.elements().filter(|&x| u.contains(x) && v.contains(x)).count();
        assert_eq!(count, 2);
        assert_eq!(u.intersect(&u).unwrap(), u);
        assert_eq!(u.sum(&Subspace::zero(&k, 1).unwrap()).unwrap(), u);
    }

    #[test]
    fn product_examples() {
        let k = ctx(2, 1, 5);
        let l = k.find_element_of_degree(5, 3).unwrap();
        let one = Subspace::span(&k, &[FieldElement::ONE], 1).unwrap();
        let g2 = Subspace::geometric(&k, l, 2).unwrap();
        let g3 = Subspace::geometric(&k, l, 3).unwrap();
        assert_eq!(one.product(&g3).unwrap(), g3);
        assert_eq!(g2.product(&g2).unwrap(), g3);
        assert_eq!(g2.product(&g3).unwrap().dim(), 4);
        assert!(cauchy_davenport_check(&g2, &g3).unwrap());
        let zero = Subspace::zero(&k, 1).unwrap();
        assert!(zero.product(&g2).unwrap().is_zero());
    }

    #[test]
    fn trace_dual_examples() {
        let k = ctx(2, 1, 6);
        let zero = Subspace::zero(&k, 1).unwrap();
        assert_eq!(zero.dual().dim(), 6);
        assert!(Subspace::whole(&k, 1).unwrap().dual().is_zero());
        for e in [1, 2, 3] {
            let f = Subspace::subfield(&k, e, e).unwrap();
            let z = f.trace_dual(e).unwrap();
            assert_eq!(z.dim(), 6 / e - 1);
            for x in z.elements() {
                assert!(k.trace_rel(x, e).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn relative_dual_needs_linearity() {
        let k = ctx(2, 1, 4);
        let l = k.find_element_of_degree(4, 0).unwrap();
        let u = Subspace::span(&k, &[FieldElement::ONE], 1).unwrap();
        assert!(u.trace_dual(2).is_err());
        let v = Subspace::span(&k, &[l], 2).unwrap();
        assert_eq!(v.dim(), 1);
        assert_eq!(v.dual().dim(), 1);
        assert_eq!(v.dual().dual(), v);
        let w = Subspace::span(&k, &[l], 1).unwrap();
        assert_eq!(w.sum(&v), Err(Error::BaseMismatch { left: 1, right: 2 }));
    }

    #[test]
    fn scale_examples() {
        let k = ctx(2, 1, 6);
        let l = k.find_element_of_degree(6, 1).unwrap();
        let g = Subspace::geometric(&k, l, 2).unwrap();
        assert_eq!(g.scale(FieldElement::ONE).unwrap(), g);
        let c = k.add(l, FieldElement::ONE);
        assert_eq!(g.scale(k.inv(c).unwrap()).unwrap().scale(c).unwrap(), g);
        let l2 = k.mul(l, l);
        assert_eq!(g.scale(l).unwrap(), Subspace::span(&k, &[l, l2], 1).unwrap());
        assert_eq!(g.scale(FieldElement::ZERO), Err(Error::ZeroScalar));
    }

    #[test]
    fn geometric_dual_on_f32() {
        let k = ctx(2, 1, 5);
        for l in k.elements_of_degree(5).unwrap() {
            for t in 1..5 {
                assert!(verify_dual_geometric(&k, l, t).unwrap().holds);
            }
        }
    }

    #[test]
    fn subfield_dual_witness() {
        let k = ctx(2, 1, 6);
        let l = k.find_element_of_degree(3, 2).unwrap();
        let (ok, c) = verify_dual_subfield(&k, l, 1).unwrap();
        assert!(ok && c.is_some());
        assert_eq!(verify_dual_subfield(&k, l, 3).unwrap(), (true, None));
        let k4 = ctx(2, 1, 4);
        let l = k4.find_element_of_degree(2, 0).unwrap();
        assert!(verify_dual_subfield(&k4, l, 1).unwrap().0);
    }

    #[test]
    fn geometric_form_detection() {
        let k = ctx(2, 1, 6);
        let l = k.find_element_of_degree(6, 9).unwrap();
        let c0 = k.add(k.pow(l, 5), FieldElement::ONE);
        let u = Subspace::geometric(&k, l, 2).unwrap().scale(c0).unwrap();
        let (c, lam) = u.detect_geometric_form(1 << 20).unwrap().unwrap();
        assert_eq!(Subspace::geometric(&k, lam, 2).unwrap().scale(c).unwrap(), u);
        let f8 = Subspace::subfield(&k, 3, 1).unwrap();
        let (c, lam) = f8.detect_geometric_form(1 << 20).unwrap().unwrap();
        assert_eq!(Subspace::geometric(&k, lam, 3).unwrap().scale(c).unwrap(), f8);
        assert!(!f8.geometric_witnesses(1 << 20).unwrap().is_empty());
    }

    #[test]
    fn non_geometric_three_space_in_f128() {
        // ⟨1, λ, λ^3⟩ is not of the form c⟨1, μ, μ^2⟩ for some generator λ
        let k = ctx(2, 1, 7);
        let found = k.elements_of_degree(7).unwrap().into_iter().any(|l| {
            let u = Subspace::span(&k, &[FieldElement::ONE, l, k.pow(l, 3)], 1).unwrap();
            u.detect_geometric_form(1 << 20).unwrap().is_none()
        });
        assert!(found);
    }

    #[test]
    fn critical_complement() {
        let k = ctx(2, 1, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut hits = 0;
        for _ in 0..40 {
            let u1 = random_subspace(&k, 1, 2, &mut rng).unwrap();
            let c = FieldElement::from_raw(rng.gen_range(1..32));
            let u2 = u1.dual().scale(c).unwrap();
            if u1.product(&u2).unwrap().dim() == 4 {
                let w = critical_complement_witness(&u1, &u2).unwrap().unwrap();
                assert_eq!(u1.dual().scale(w).unwrap(), u2);
                hits += 1;
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn subfield_linearity() {
        let k = ctx(2, 1, 6);
        let l = k.find_element_of_degree(6, 5).unwrap();
        let whole = Subspace::whole(&k, 1).unwrap();
        for e in k.divisors() {
            assert!(whole.is_subfield_linear(e).unwrap());
        }
        assert!(!Subspace::geometric(&k, l, 2).unwrap().is_subfield_linear(6).unwrap());
        let h = Subspace::span(&k, &[FieldElement::ONE, l], 2).unwrap().scale(l).unwrap();
        assert!(h.is_subfield_linear(2).unwrap());
        assert!(h.is_subfield_linear(4).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let k = ctx(2, 1, 5);
        assert_eq!(all_subspaces(&k, 2).unwrap().len(), 155);
        let k3 = ctx(3, 1, 3);
        assert_eq!(all_subspaces(&k3, 1).unwrap().len(), 13);
    }

    #[test]
    fn record_roundtrip() {
        let k = ctx(3, 1, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_subspace(&k, 2, 1, &mut rng).unwrap();
        let rec = u.to_record();
        assert_eq!(rec.basis.len(), 1);
        assert_eq!(Subspace::from_record(&k, &rec).unwrap(), u);
    }

    proptest! {
        #[test]
        fn duality_laws(seed in any::<u64>(), dim in 0usize..=6) {
            let k = ctx(2, 1, 6);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_subspace(&k, 1, dim, &mut rng).unwrap();
            let d = u.dual();
            prop_assert_eq!(d.dim(), 6 - dim);
            prop_assert_eq!(d.dual(), u.clone());
            for x in u.fp_basis() {
                for y in d.fp_basis() {
                    prop_assert!(k.trace_rel(k.mul(x, y), 1).unwrap().is_zero());
                }
            }
        }

        #[test]
        fn product_dual_splits(seed in any::<u64>(), d1 in 1usize..=3, d2 in 1usize..=3) {
            let k = ctx(2, 1, 6);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u1 = random_subspace(&k, 1, d1, &mut rng).unwrap();
            let u2 = random_subspace(&k, 1, d2, &mut rng).unwrap();
            let lhs = u1.product(&u2).unwrap().dual();
            let mut rhs = Subspace::whole(&k, 1).unwrap();
            for a in u1.basis() {
                rhs = rhs.intersect(&u2.dual().scale(k.inv(*a).unwrap()).unwrap()).unwrap();
            }
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(u1.product(&u2).unwrap(), u2.product(&u1).unwrap());
        }

        #[test]
        fn sum_intersection_dimensions(seed in any::<u64>(), d1 in 0usize..=2, d2 in 0usize..=2) {
            let k = ctx(3, 1, 4);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_subspace(&k, 2, d1, &mut rng).unwrap();
            let v = random_subspace(&k, 2, d2, &mut rng).unwrap();
            let s = u.sum(&v).unwrap();
            let i = u.intersect(&v).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), d1 + d2);
            prop_assert!(i.is_subspace_of(&u).unwrap() && i.is_subspace_of(&v).unwrap());
        }
    }
}
