//! Arithmetic in the tower `F_p ⊆ F_q ⊆ F_{q^e} ⊆ F_{q^m}` with `q = p^a`.
//!
//! The top field is `F_p[x]/(f)` for a monic irreducible `f` of degree `a·m`.
//! An element is stored as the integer `Σ c_i p^i` of its coefficient vector
//! in the power basis `1, x, …, x^{am-1}`; for `p = 2` this is the usual bit
//! packing. `F_q` and every intermediate `F_{q^e}` are the fixed fields of the
//! matching Frobenius powers. Subfield degrees `e` are always measured over
//! `F_q`, so `F_{q^e}` exists iff `e | m`.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, FpSpace, PrimeField};

/// Largest supported `a·m`.
pub const MAX_DEGREE: usize = 32;

/// Fields up to this order get discrete-log multiplication tables.
const TABLE_ORDER_LIMIT: u64 = 1 << 16;

/// An element of `F_{q^m}`, encoded as `Σ c_i p^i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a raw encoding without range checking; see [`FieldContext::element`].
    #[inline]
    pub const fn from_raw(v: u64) -> Self {
        FieldElement(v)
    }

    #[inline]
    pub const fn to_int(self) -> u64 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// JSON descriptor of a field context.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextDescriptor {
    pub p: u64,
    #[serde(default = "one_usize")]
    pub a: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

fn one_usize() -> usize {
    1
}

struct LogTables {
    /// `exp[i] = g^i` for `0 ≤ i < 2(N-1)`.
    exp: Vec<u64>,
    log: Vec<u32>,
}

/// An ordered `F_q`-basis `Γ = (γ_1, …, γ_m)` of `F_{q^m}` with its coordinate map.
#[derive(Clone, Debug)]
pub struct FqBasis {
    gamma: Vec<FieldElement>,
    /// Maps prime-field digits of an element to coordinates in the basis
    /// `{θ_j γ_i}` ordered `i·a + j`.
    inverse: Vec<Vec<u64>>,
}

impl FqBasis {
    pub fn new(ctx: &FieldContext, gamma: Vec<FieldElement>) -> Result<Self> {
        if gamma.len() != ctx.m {
            return Err(Error::DimensionMismatch(format!(
                "an F_q-basis of F_q^m needs {} elements, got {}",
                ctx.m,
                gamma.len()
            )));
        }
        let theta = ctx.subfield_basis(1)?;
        let rows: Vec<Vec<u64>> = gamma
            .iter()
            .flat_map(|&g| theta.iter().map(move |&t| (g, t)))
            .map(|(g, t)| ctx.digits(ctx.mul(g, t)))
            .collect();
        let inverse = linalg::invert(ctx.p, &rows)
            .ok_or_else(|| Error::precondition("basis elements are not F_q-independent"))?;
        Ok(Self { gamma, inverse })
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.gamma
    }

    /// Coordinates of `x`: block `i` (of length `a`) holds the `θ`-digits of the
    /// `i`-th `F_q`-coordinate of `x`.
    pub fn coordinates(&self, ctx: &FieldContext, x: FieldElement) -> Vec<u64> {
        linalg::vec_mat(ctx.p, &ctx.digits(x), &self.inverse)
    }
}

/// The field tower. Immutable after construction.
pub struct FieldContext {
    p: u64,
    a: usize,
    m: usize,
    deg: usize,
    q: u64,
    order: u64,
    modulus: Vec<u64>,
    pow_p: Vec<u64>,
    tables: Option<LogTables>,
    /// `Tr_{p^{am}/p}(x^s)` for `s < 2·deg`.
    trace_pow: Vec<u64>,
    /// Prime-field basis of `F_{q^e}` for every `e | m`.
    subfields: BTreeMap<usize, Vec<FieldElement>>,
    gamma: Option<FqBasis>,
    /// `theta_mul[j][l]` = θ-digits of `θ_l · θ_j`.
    theta_mul: Vec<Vec<Vec<u64>>>,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("p", &self.p)
            .field("a", &self.a)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.a == other.a && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldContext {}

impl FieldContext {
    /// Builds `F_{q^m}` with `q = p^a`. Without an explicit modulus the
    /// smallest monic irreducible polynomial of degree `a·m` is used, where
    /// polynomials are ordered by the integer encoding of their lower coefficients.
    pub fn new(p: u64, a: usize, m: usize, modulus: Option<Vec<u64>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if a == 0 || m == 0 {
            return Err(Error::InvalidField("a and m must be positive".into()));
        }
        let deg = a * m;
        if deg > MAX_DEGREE {
            return Err(Error::InvalidField(format!("a·m = {deg} exceeds {MAX_DEGREE}")));
        }
        let order = (p as u128).pow(deg as u32);
        if order >= 1u128 << 63 {
            return Err(Error::InvalidField(format!("p^(am) = {order} is too large")));
        }
        let order = order as u64;
        let modulus = match modulus {
            Some(f) => {
                if f.len() != deg + 1 || f[deg] != 1 || f.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidField(format!(
                        "modulus must be a monic list of {} coefficients in [0, {p})",
                        deg + 1
                    )));
                }
                if !is_irreducible(p, &f) {
                    return Err(Error::InvalidField("modulus is reducible".into()));
                }
                f
            }
            None => smallest_irreducible(p, deg),
        };
        let pow_p = (0..=deg).map(|i| p.pow(i as u32)).collect();
        let mut ctx = FieldContext {
            p,
            a,
            m,
            deg,
            q: p.pow(a as u32),
            order,
            modulus,
            pow_p,
            tables: None,
            trace_pow: Vec::new(),
            subfields: BTreeMap::new(),
            gamma: None,
            theta_mul: Vec::new(),
        };
        if order <= TABLE_ORDER_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        ctx.trace_pow = (0..2 * deg)
            .map(|s| {
                let t = ctx.trace_abs_slow(ctx.pow(ctx.x(), s as u64));
                t.to_int()
            })
            .collect();
        ctx.subfields = ctx.compute_subfields();
        let gamma: Vec<FieldElement> = (0..m).map(|i| ctx.pow(ctx.x(), i as u64)).collect();
        ctx.gamma = Some(FqBasis::new(&ctx, gamma)?);
        ctx.theta_mul = ctx.compute_theta_mul();
        Ok(ctx)
    }

    pub fn from_descriptor(d: &ContextDescriptor) -> Result<Self> {
        Self::new(d.p, d.a, d.m, d.modulus.clone())
    }

    pub fn descriptor(&self) -> ContextDescriptor {
        ContextDescriptor {
            p: self.p,
            a: self.a,
            m: self.m,
            modulus: Some(self.modulus.clone()),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn a(&self) -> usize {
        self.a
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// `a·m`, the degree over the prime field.
    pub fn degree(&self) -> usize {
        self.deg
    }
    /// `q^m`.
    pub fn order(&self) -> u64 {
        self.order
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    pub fn prime_field(&self) -> PrimeField {
        PrimeField::new(self.p)
    }

    /// Positive divisors of `m`, ascending.
    pub fn divisors(&self) -> Vec<usize> {
        (1..=self.m).filter(|e| self.m.is_multiple_of(*e)).collect()
    }

    pub fn check_divisor(&self, e: usize) -> Result<()> {
        if e == 0 || !self.m.is_multiple_of(e) {
            Err(Error::NotDivisor { e, m: self.m })
        } else {
            Ok(())
        }
    }

    pub fn element(&self, v: u64) -> Result<FieldElement> {
        if v < self.order {
            Ok(FieldElement(v))
        } else {
            Err(Error::ElementOutOfRange { value: v, order: self.order })
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The class of `x` in `F_p[x]/(f)`.
    pub fn x(&self) -> FieldElement {
        if self.deg == 1 {
            // x ≡ -f_0
            FieldElement(self.prime_field().neg(self.modulus[0]))
        } else {
            FieldElement(self.p)
        }
    }

    /// The element `c·1` for a prime-field residue `c`.
    pub fn from_prime(&self, c: u64) -> FieldElement {
        FieldElement(c % self.p)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order).map(FieldElement)
    }

    /// Coefficient vector over `F_p`, little-endian, length `a·m`.
    pub fn digits(&self, x: FieldElement) -> Vec<u64> {
        let mut v = x.0;
        let mut out = vec![0u64; self.deg];
        if self.p == 2 {
            for (i, d) in out.iter_mut().enumerate() {
                *d = (v >> i) & 1;
            }
        } else {
            for d in out.iter_mut() {
                *d = v % self.p;
                v /= self.p;
            }
        }
        out
    }

    pub fn from_digits(&self, d: &[u64]) -> FieldElement {
        debug_assert_eq!(d.len(), self.deg);
        if self.p == 2 {
            FieldElement(d.iter().enumerate().fold(0, |acc, (i, &c)| acc | ((c & 1) << i)))
        } else {
            FieldElement(d.iter().zip(&self.pow_p).fold(0, |acc, (&c, &w)| acc + (c % self.p) * w))
        }
    }

    #[inline]
    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(x.0 ^ y.0);
        }
        let (mut a, mut b) = (x.0, y.0);
        let mut out = 0;
        let mut place = 1;
        while a != 0 || b != 0 {
            let s = (a % self.p + b % self.p) % self.p;
            out += s * place;
            place = place.wrapping_mul(self.p);
            a /= self.p;
            b /= self.p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, x: FieldElement) -> FieldElement {
        if self.p == 2 {
            return x;
        }
        let mut a = x.0;
        let mut out = 0;
        let mut place = 1;
        while a != 0 {
            let d = a % self.p;
            if d != 0 {
                out += (self.p - d) * place;
            }
            place = place.wrapping_mul(self.p);
            a /= self.p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if x.0 == 0 || y.0 == 0 {
            return FieldElement::ZERO;
        }
        if let Some(t) = &self.tables {
            return FieldElement(t.exp[t.log[x.0 as usize] as usize + t.log[y.0 as usize] as usize]);
        }
        self.mul_poly(x, y)
    }

    /// Multiplication by polynomial reduction, bypassing the log tables.
    pub fn mul_poly(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if self.p == 2 {
            let d = self.deg;
            let mut prod: u64 = 0;
            let mut b = y.0;
            let mut shift = 0;
            while b != 0 {
                if b & 1 == 1 {
                    prod ^= x.0 << shift;
                }
                b >>= 1;
                shift += 1;
            }
            let full = self.modulus.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | (c << i));
            for i in (d..2 * d - 1).rev() {
                if (prod >> i) & 1 == 1 {
                    prod ^= full << (i - d);
                }
            }
            return FieldElement(prod);
        }
        let f = self.prime_field();
        let (dx, dy) = (self.digits(x), self.digits(y));
        let d = self.deg;
        let mut r = vec![0u64; 2 * d - 1];
        for (i, &a) in dx.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in dy.iter().enumerate() {
                r[i + j] = f.add(r[i + j], f.mul(a, b));
            }
        }
        for i in (d..2 * d - 1).rev() {
            let c = r[i];
            if c != 0 {
                for j in 0..d {
                    r[i - d + j] = f.sub(r[i - d + j], f.mul(c, self.modulus[j]));
                }
                r[i] = 0;
            }
        }
        self.from_digits(&r[..d])
    }

    pub fn pow(&self, x: FieldElement, n: u64) -> FieldElement {
        if n == 0 {
            return FieldElement::ONE;
        }
        if x.0 == 0 {
            return FieldElement::ZERO;
        }
        let group = self.order - 1;
        if let Some(t) = &self.tables {
            let e = (t.log[x.0 as usize] as u128 * n as u128 % group as u128) as usize;
            return FieldElement(t.exp[e]);
        }
        let mut e = n % group;
        let mut base = x;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(x, self.order - 2))
    }

    /// `x^{q^e}`. The exponent `e` need not divide `m`.
    pub fn frobenius(&self, x: FieldElement, e: usize) -> FieldElement {
        if x.is_zero() {
            return x;
        }
        let group = (self.order - 1) as u128;
        let mut exp: u128 = 1 % group;
        let mut base = self.q as u128 % group;
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                exp = exp * base % group;
            }
            base = base * base % group;
            k >>= 1;
        }
        if exp == 0 {
            // x^{N-1} = 1 would be wrong here: x^{q^e} with q^e ≡ 0 mod (N-1)
            // only happens for N - 1 | q^e, i.e. the trivial field F_2.
            return x;
        }
        self.pow(x, exp as u64)
    }

    /// `x^p`.
    fn frobenius_p(&self, x: FieldElement) -> FieldElement {
        self.pow(x, self.p)
    }

    /// `Tr_{q^top / q^bottom}(x)` for `x ∈ F_{q^top}`, `bottom | top | m`.
    pub fn trace_between(&self, x: FieldElement, top: usize, bottom: usize) -> Result<FieldElement> {
        self.check_divisor(top)?;
        if bottom == 0 || !top.is_multiple_of(bottom) {
            return Err(Error::NotDivisor { e: bottom, m: top });
        }
        let mut acc = FieldElement::ZERO;
        let mut y = x;
        for _ in 0..top / bottom {
            acc = self.add(acc, y);
            y = self.frobenius(y, bottom);
        }
        Ok(acc)
    }

    /// `N_{q^top / q^bottom}(x)` for `x ∈ F_{q^top}`, `bottom | top | m`.
    pub fn norm_between(&self, x: FieldElement, top: usize, bottom: usize) -> Result<FieldElement> {
        self.check_divisor(top)?;
        if bottom == 0 || !top.is_multiple_of(bottom) {
            return Err(Error::NotDivisor { e: bottom, m: top });
        }
        let mut acc = FieldElement::ONE;
        let mut y = x;
        for _ in 0..top / bottom {
            acc = self.mul(acc, y);
            y = self.frobenius(y, bottom);
        }
        Ok(acc)
    }

    /// Relative trace `Tr_{q^m/q^e}`.
    pub fn trace_rel(&self, x: FieldElement, e: usize) -> Result<FieldElement> {
        self.trace_between(x, self.m, e)
    }

    /// Relative norm `N_{q^m/q^e}`.
    pub fn norm_rel(&self, x: FieldElement, e: usize) -> Result<FieldElement> {
        self.norm_between(x, self.m, e)
    }

    fn trace_abs_slow(&self, x: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        let mut y = x;
        for _ in 0..self.deg {
            acc = self.add(acc, y);
            y = self.frobenius_p(y);
        }
        acc
    }

    /// Absolute trace `Tr_{p^{am}/p}(x)` as a residue mod `p`.
    pub fn trace_abs(&self, x: FieldElement) -> u64 {
        let f = self.prime_field();
        self.digits(x)
            .iter()
            .zip(&self.trace_pow)
            .fold(0, |acc, (&c, &t)| f.add(acc, f.mul(c, t)))
    }

    /// Coefficients `t` with `Tr_{p^{am}/p}(u·y) = Σ t_i y_i` for every `y`.
    pub fn trace_form_row(&self, u: FieldElement) -> Vec<u64> {
        let f = self.prime_field();
        let du = self.digits(u);
        (0..self.deg)
            .map(|i| {
                du.iter()
                    .enumerate()
                    .fold(0, |acc, (j, &c)| f.add(acc, f.mul(c, self.trace_pow[i + j])))
            })
            .collect()
    }

    pub fn is_in_subfield(&self, x: FieldElement, e: usize) -> bool {
        self.frobenius(x, e) == x
    }

    /// Smallest `e | m` with `x ∈ F_{q^e}`.
    pub fn degree_over_q(&self, x: FieldElement) -> usize {
        self.divisors()
            .into_iter()
            .find(|&e| self.is_in_subfield(x, e))
            .unwrap_or(self.m)
    }

    /// Prime-field basis of `F_{q^e}` (in RREF order).
    pub fn subfield_basis(&self, e: usize) -> Result<&[FieldElement]> {
        self.subfields
            .get(&e)
            .map(Vec::as_slice)
            .ok_or(Error::NotDivisor { e, m: self.m })
    }

    /// All elements of `F_{q^e}`.
    pub fn subfield_elements(&self, e: usize) -> Result<Vec<FieldElement>> {
        let basis = self.subfield_basis(e)?;
        let space = FpSpace::from_rows(self.p, self.deg, basis.iter().map(|&b| self.digits(b)));
        Ok(space.elements().map(|d| self.from_digits(&d)).collect())
    }

    /// The default `F_q`-basis `Γ = (1, x, …, x^{m-1})`.
    pub fn gamma(&self) -> &FqBasis {
        self.gamma.as_ref().expect("initialized in constructor")
    }

    /// Prime-field basis `θ_1, …, θ_a` of `F_q`.
    pub fn theta(&self) -> &[FieldElement] {
        &self.subfields[&1]
    }

    /// θ-digits of `θ_l · θ_j`, indexed `[j][l]`.
    pub fn theta_mul(&self) -> &[Vec<Vec<u64>>] {
        &self.theta_mul
    }

    /// θ-digits of an element of `F_q`.
    pub fn fq_digits(&self, c: FieldElement) -> Vec<u64> {
        let coords = self.gamma().coordinates(self, c);
        coords[..self.a].to_vec()
    }

    /// Minimal polynomial of `λ` over `F_q`.
    pub fn minimal_polynomial(&self, lambda: FieldElement) -> FieldPoly {
        let d = self.degree_over_q(lambda);
        let mut coeffs = vec![FieldElement::ONE];
        let mut conj = lambda;
        for _ in 0..d {
            // coeffs *= (X - conj)
            let mut next = vec![FieldElement::ZERO; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] = self.add(next[i + 1], c);
                next[i] = self.sub(next[i], self.mul(c, conj));
            }
            coeffs = next;
            conj = self.frobenius(conj, 1);
        }
        FieldPoly { coeffs }
    }

    pub fn eval(&self, f: &FieldPoly, x: FieldElement) -> FieldElement {
        f.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// `f'(λ)`.
    pub fn derivative_at(&self, f: &FieldPoly, lambda: FieldElement) -> FieldElement {
        let deriv: Vec<FieldElement> = f
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.mul(self.from_prime(i as u64 % self.p), c))
            .collect();
        self.eval(&FieldPoly { coeffs: deriv }, lambda)
    }

    /// A deterministic (under `seed`) element with `F_q(x) = F_{q^e}`.
    pub fn find_element_of_degree(&self, e: usize, seed: u64) -> Result<FieldElement> {
        let basis = self.subfield_basis(e)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let x = basis.iter().fold(FieldElement::ZERO, |acc, &b| {
                let c = self.from_prime(rng.gen_range(0..self.p));
                self.add(acc, self.mul(c, b))
            });
            if self.degree_over_q(x) == e {
                return Ok(x);
            }
        }
    }

    /// All elements of exact degree `e` over `F_q`, ascending.
    pub fn elements_of_degree(&self, e: usize) -> Result<Vec<FieldElement>> {
        Ok(self
            .subfield_elements(e)?
            .into_iter()
            .filter(|&x| self.degree_over_q(x) == e)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect())
    }

    fn build_tables(&self) -> LogTables {
        let n = self.order;
        let group = (n - 1) as usize;
        for g in 1..n {
            let g = FieldElement(g);
            let mut exp = Vec::with_capacity(2 * group.max(1));
            let mut y = FieldElement::ONE;
            let mut ok = true;
            for i in 0..group {
                if i > 0 && y == FieldElement::ONE {
                    ok = false;
                    break;
                }
                exp.push(y.0);
                y = self.mul_poly(y, g);
            }
            if !ok {
                continue;
            }
            let mut log = vec![0u32; n as usize];
            for (i, &v) in exp.iter().enumerate() {
                log[v as usize] = i as u32;
            }
            let first = exp.clone();
            exp.extend(first);
            return LogTables { exp, log };
        }
        unreachable!("every finite field has a primitive element")
    }

    fn compute_subfields(&self) -> BTreeMap<usize, Vec<FieldElement>> {
        let f = self.prime_field();
        let d = self.deg;
        // phi: x -> x^p; row i = digits of (x^i)^p
        let phi: Vec<Vec<u64>> = (0..d)
            .map(|i| self.digits(self.frobenius_p(self.pow(self.x(), i as u64))))
            .collect();
        let mut phi_a = identity(d);
        for _ in 0..self.a {
            phi_a = linalg::mat_mul(self.p, &phi_a, &phi);
        }
        let mut out = BTreeMap::new();
        let mut power = identity(d);
        for e in 1..=self.m {
            power = linalg::mat_mul(self.p, &power, &phi_a);
            if !self.m.is_multiple_of(e) {
                continue;
            }
            // kernel of v ↦ v(Φ^{ae} - I), as a right-kernel of the transpose
            let mut diff = power.clone();
            for (i, row) in diff.iter_mut().enumerate() {
                row[i] = f.sub(row[i], 1);
            }
            let transposed: Vec<Vec<u64>> = (0..d).map(|c| diff.iter().map(|r| r[c]).collect()).collect();
            let k = linalg::kernel(self.p, d, &transposed);
            out.insert(e, k.rows().iter().map(|r| self.from_digits(r)).collect());
        }
        out
    }

    fn compute_theta_mul(&self) -> Vec<Vec<Vec<u64>>> {
        let theta = self.theta().to_vec();
        theta
            .iter()
            .map(|&tj| theta.iter().map(|&tl| self.fq_digits(self.mul(tl, tj))).collect())
            .collect()
    }
}

fn identity(d: usize) -> Vec<Vec<u64>> {
    (0..d)
        .map(|i| {
            let mut r = vec![0; d];
            r[i] = 1;
            r
        })
        .collect()
}

/// A polynomial with coefficients in `F_{q^m}`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldPoly {
    pub coeffs: Vec<FieldElement>,
}

impl FieldPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

impl fmt::Display for FieldPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            terms.push(match (c.to_int(), i) {
                (1, 0) => "1".to_string(),
                (1, _) => mono,
                (v, 0) => format!("{v}"),
                (v, _) => format!("{v}*{mono}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---- polynomials over F_p, used only for modulus selection ----

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

fn poly_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let f = PrimeField::new(p);
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lead_inv = f.inv(b[db]);
    let mut r = trim(a.to_vec());
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = f.mul(r[dr], lead_inv);
        for j in 0..=db {
            r[dr - db + j] = f.sub(r[dr - db + j], f.mul(c, b[j]));
        }
        r = trim(r);
        if dr == 0 {
            break;
        }
    }
    r
}

fn poly_mulmod(p: u64, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
    let f = PrimeField::new(p);
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = f.add(r[i + j], f.mul(x, y));
        }
    }
    poly_rem(p, &r, m)
}

fn poly_powmod(p: u64, base: &[u64], mut e: u64, m: &[u64]) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(p, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(p, &acc, &b, m);
        }
        b = poly_mulmod(p, &b, &b, m);
        e >>= 1;
    }
    acc
}

fn poly_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

fn poly_gcd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !poly_is_zero(&y) {
        let r = poly_rem(p, &x, &y);
        x = y;
        y = r;
    }
    x
}

/// Ben-Or test: `f` is irreducible iff `gcd(f, x^{p^i} - x) = 1` for `i ≤ deg/2`.
pub fn is_irreducible(p: u64, f: &[u64]) -> bool {
    let f = trim(f.to_vec());
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let fp = PrimeField::new(p);
    let mut h = vec![0u64, 1];
    for _ in 0..d / 2 {
        h = poly_powmod(p, &h, p, &f);
        let mut g = h.clone();
        g.resize(g.len().max(2), 0);
        g[1] = fp.sub(g[1], 1);
        let g = poly_gcd(p, &f, &trim(g));
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u64, d: usize) -> Vec<u64> {
    let total = (p as u128).pow(d as u32);
    for code in 0..total {
        let mut f = Vec::with_capacity(d + 1);
        let mut c = code;
        for _ in 0..d {
            f.push((c % p as u128) as u64);
            c /= p as u128;
        }
        f.push(1);
        if d > 1 && f[0] == 0 {
            continue;
        }
        if is_irreducible(p, &f) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
