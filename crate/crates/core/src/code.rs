//! Rank-metric codes over `F_{q^m}` and their complete decompositions.

use std::collections::{BTreeSet, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::enumerate::{self, Kernel};
use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement, FqBasis};
use crate::geometry::{check_cap, projective_count, projective_points, System};
use crate::linalg::{self, FpSpace};
use crate::matrix::{self, Matrix};
use crate::subspace::{random_subspace, same_ctx, Ctx, Subspace};

/// Rank weight: `dim_{F_q}` of the span of the entries.
pub fn rank_weight(ctx: &FieldContext, v: &[FieldElement]) -> usize {
    let theta = ctx.theta();
    if ctx.p() == 2 {
        let words: Vec<u64> = v
            .iter()
            .flat_map(|&x| theta.iter().map(move |&t| ctx.mul(t, x).to_int()))
            .collect();
        return linalg::gf2_rank(&words, 64) / ctx.a();
    }
    let rows: Vec<Vec<u64>> = v
        .iter()
        .flat_map(|&x| theta.iter().map(move |&t| ctx.digits(ctx.mul(t, x))))
        .collect();
    linalg::rank(ctx.p(), ctx.degree(), &rows) / ctx.a()
}

/// An `F_q`-subspace of `F_q^n`, stored over `F_p^{a·n}` (θ-digits of each
/// coordinate in consecutive slots).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Support {
    a: usize,
    space: FpSpace,
}

impl Support {
    pub fn zero(ctx: &FieldContext, n: usize) -> Self {
        Support { a: ctx.a(), space: FpSpace::zero(ctx.p(), n * ctx.a()) }
    }

    /// Dimension over `F_q`.
    pub fn dim(&self) -> usize {
        self.space.dim() / self.a
    }

    pub fn n(&self) -> usize {
        self.space.len() / self.a
    }

    pub fn is_full(&self) -> bool {
        self.space.dim() == self.space.len()
    }

    pub fn is_subspace_of(&self, other: &Support) -> bool {
        self.space.is_subspace_of(&other.space)
    }

    pub fn sum(&self, other: &Support) -> Support {
        Support { a: self.a, space: self.space.sum(&other.space) }
    }

    pub fn intersect(&self, other: &Support) -> Support {
        Support { a: self.a, space: self.space.intersect(&other.space) }
    }

    pub fn fp_space(&self) -> &FpSpace {
        &self.space
    }
}

/// `supp(v)`: the column span of the `n×m` expansion of `v` in the basis `Γ`.
pub fn support_in(ctx: &FieldContext, basis: &FqBasis, v: &[FieldElement]) -> Support {
    let a = ctx.a();
    let m = ctx.m();
    let n = v.len();
    let coords: Vec<Vec<u64>> = v.iter().map(|&x| basis.coordinates(ctx, x)).collect();
    let tm = ctx.theta_mul();
    let f = ctx.prime_field();
    let mut space = FpSpace::zero(ctx.p(), n * a);
    for l in 0..m {
        for tj in tm.iter() {
            let mut col = vec![0u64; n * a];
            for (i, c) in coords.iter().enumerate() {
                let digits = &c[l * a..(l + 1) * a];
                for (dl, row) in digits.iter().zip(tj) {
                    f.axpy(&mut col[i * a..(i + 1) * a], *dl, row);
                }
            }
            space.insert(col);
        }
    }
    Support { a, space }
}

/// `supp(v)` in the context's default basis.
pub fn support(ctx: &FieldContext, v: &[FieldElement]) -> Support {
    support_in(ctx, ctx.gamma(), v)
}

/// Exact counts `(A_0, …, A_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightDistribution {
    pub counts: Vec<u64>,
}

impl WeightDistribution {
    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// Smallest nonzero weight, `None` for the zero code.
    pub fn min_distance(&self) -> Option<usize> {
        self.counts.iter().enumerate().skip(1).find(|(_, &c)| c > 0).map(|(i, _)| i)
    }

    pub fn get(&self, w: usize) -> u64 {
        self.counts.get(w).copied().unwrap_or(0)
    }
}

/// An invertible `n×n` matrix over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceMap {
    matrix: Matrix,
}

impl EquivalenceMap {
    pub fn new(ctx: &FieldContext, matrix: Matrix) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("equivalence map must be square".into()));
        }
        if matrix.iter().flatten().any(|&x| x.to_int() >= ctx.order() || !ctx.is_in_subfield(x, 1)) {
            return Err(Error::precondition("equivalence map entries must lie in F_q"));
        }
        if matrix::rank(ctx, &matrix) != n {
            return Err(Error::SingularMatrix);
        }
        Ok(EquivalenceMap { matrix })
    }

    pub fn identity(n: usize) -> Self {
        EquivalenceMap { matrix: matrix::identity(n) }
    }

    /// The permutation matrix with `P[i][perm[i]] = 1`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let matrix = (0..n)
            .map(|i| {
                let mut r = vec![FieldElement::ZERO; n];
                r[perm[i]] = FieldElement::ONE;
                r
            })
            .collect();
        EquivalenceMap { matrix }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.len()
    }

    pub fn inverse(&self, ctx: &FieldContext) -> Self {
        EquivalenceMap { matrix: matrix::inverse(ctx, &self.matrix).expect("invertible by construction") }
    }

    /// `self · other`.
    pub fn then(&self, ctx: &FieldContext, other: &EquivalenceMap) -> Self {
        EquivalenceMap { matrix: matrix::mul(ctx, &self.matrix, &other.matrix) }
    }
}

/// A uniformly random element of `GL(n, q)`, deterministic under `seed`.
pub fn random_gl(ctx: &FieldContext, n: usize, seed: u64) -> EquivalenceMap {
    let fq = ctx.subfield_elements(1).expect("F_q is a subfield");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EquivalenceMap { matrix: matrix::random_invertible(ctx, n, &fq, &mut rng) }
}

/// A random element of `GL(k, q^m)`, deterministic under `seed`.
pub fn random_gl_qm(ctx: &FieldContext, k: usize, seed: u64) -> Matrix {
    let all: Vec<FieldElement> = ctx.elements().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    matrix::random_invertible(ctx, k, &all, &mut rng)
}

/// `u_1 ⊕ … ⊕ u_k` with each `u_i` a random `F_q`-basis of a random subspace
/// of dimension `types[i]`.
pub fn random_block_code<R: rand::Rng>(ctx: &Ctx, types: &[usize], rng: &mut R) -> Result<RankCode> {
    let blocks = types
        .iter()
        .map(|&t| Ok(random_subspace(ctx, 1, t, rng)?.basis().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    RankCode::completely_decomposable(ctx, blocks)
}

/// A weight-complementary form: `G = B·(u_1 ⊕ … ⊕ u_k)·A` with `n_1 ≥ … ≥ n_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    blocks: Vec<Vec<FieldElement>>,
    b: Matrix,
    a: EquivalenceMap,
}

impl Decomposition {
    /// Sorts the blocks of `B_u·(⊕ blocks)·A_u` by decreasing length, folding
    /// the permutations into `B` and `A`.
    fn sorted(ctx: &FieldContext, blocks: Vec<Vec<FieldElement>>, b: Matrix, a: EquivalenceMap) -> Self {
        let k = blocks.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&i, &j| blocks[j].len().cmp(&blocks[i].len()));
        // sorted position of each original block
        let mut pos = vec![0; k];
        for (s, &i) in order.iter().enumerate() {
            pos[i] = s;
        }
        let offsets = |bl: &[Vec<FieldElement>], idx: &[usize]| {
            let mut off = vec![0; bl.len()];
            let mut acc = 0;
            for &i in idx {
                off[i] = acc;
                acc += bl[i].len();
            }
            off
        };
        let orig_off = offsets(&blocks, &(0..k).collect::<Vec<_>>());
        let sorted_off = offsets(&blocks, &order);
        let n: usize = blocks.iter().map(Vec::len).sum();
        // P_r[i][pos[i]] = 1; P_c[sorted column][original column] = 1
        let pr = EquivalenceMap::permutation(&pos).matrix;
        let mut col_perm = vec![0; n];
        for i in 0..k {
            for t in 0..blocks[i].len() {
                col_perm[sorted_off[i] + t] = orig_off[i] + t;
            }
        }
        let pc = EquivalenceMap::permutation(&col_perm);
        let sorted_blocks = order.iter().map(|&i| blocks[i].clone()).collect();
        Decomposition {
            blocks: sorted_blocks,
            b: matrix::mul(ctx, &b, &pr),
            a: pc.then(ctx, &a),
        }
    }

    /// Validates blocks (full weight, shorter than `m`), `B ∈ GL(k, q^m)` and
    /// `A ∈ GL(n, q)`, then sorts the blocks.
    pub fn new(ctx: &FieldContext, blocks: Vec<Vec<FieldElement>>, b: Matrix, a: Matrix) -> Result<Self> {
        validate_blocks(ctx, &blocks)?;
        let k = blocks.len();
        if b.len() != k || b.iter().any(|r| r.len() != k) || matrix::rank(ctx, &b) != k {
            return Err(Error::SingularMatrix);
        }
        let a = EquivalenceMap::new(ctx, a)?;
        if a.n() != blocks.iter().map(Vec::len).sum::<usize>() {
            return Err(Error::DimensionMismatch("A does not match the block lengths".into()));
        }
        Ok(Decomposition::sorted(ctx, blocks, b, a))
    }

    pub fn blocks(&self) -> &[Vec<FieldElement>] {
        &self.blocks
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn a(&self) -> &EquivalenceMap {
        &self.a
    }

    /// `(n_1, …, n_k)`, non-increasing.
    pub fn type_vector(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// `u_1 ⊕ … ⊕ u_k`.
    pub fn block_diagonal(&self) -> Matrix {
        block_diagonal(&self.blocks)
    }

    /// Row `i` of `(u_1 ⊕ … ⊕ u_k)·A`: the block `u_i` seen as a codeword.
    pub fn block_codeword(&self, ctx: &FieldContext, i: usize) -> Vec<FieldElement> {
        matrix::vec_mul(ctx, &self.block_diagonal()[i], self.a.matrix())
    }

    /// The blocks' entry spans `U_i`.
    pub fn block_spaces(&self, ctx: &Ctx) -> Vec<Subspace> {
        self.blocks
            .iter()
            .map(|u| Subspace::span(ctx, u, 1).expect("entries are in range"))
            .collect()
    }

    fn reconstruct(&self, ctx: &FieldContext) -> Matrix {
        let d = self.block_diagonal();
        matrix::mul(ctx, &matrix::mul(ctx, &self.b, &d), self.a.matrix())
    }
}

fn validate_blocks(ctx: &FieldContext, blocks: &[Vec<FieldElement>]) -> Result<()> {
    if blocks.is_empty() {
        return Err(Error::precondition("at least one block is required"));
    }
    for (index, u) in blocks.iter().enumerate() {
        for &x in u {
            ctx.element(x.to_int())?;
        }
        let weight = rank_weight(ctx, u);
        if u.is_empty() || weight != u.len() {
            return Err(Error::InvalidBlock { index, weight, length: u.len() });
        }
        if u.len() >= ctx.m() {
            return Err(Error::precondition(format!(
                "block {index} has length {} but blocks must be shorter than m = {}",
                u.len(),
                ctx.m()
            )));
        }
    }
    Ok(())
}

fn block_diagonal(blocks: &[Vec<FieldElement>]) -> Matrix {
    let n: usize = blocks.iter().map(Vec::len).sum();
    let mut off = 0;
    blocks
        .iter()
        .map(|u| {
            let mut row = vec![FieldElement::ZERO; n];
            row[off..off + u.len()].copy_from_slice(u);
            off += u.len();
            row
        })
        .collect()
}

fn block_diagonal_matrices(parts: &[&Matrix]) -> Matrix {
    let rows: usize = parts.iter().map(|m| m.len()).sum();
    let cols: usize = parts.iter().map(|m| m.first().map_or(0, Vec::len)).sum();
    let mut out = vec![vec![FieldElement::ZERO; cols]; rows];
    let (mut r0, mut c0) = (0, 0);
    for m in parts {
        for (i, row) in m.iter().enumerate() {
            out[r0 + i][c0..c0 + row.len()].copy_from_slice(row);
        }
        r0 += m.len();
        c0 += m.first().map_or(0, Vec::len);
    }
    out
}

/// A `[n, k]_{q^m/q}` code given by a full-rank generator matrix.
#[derive(Clone, Debug)]
pub struct RankCode {
    ctx: Ctx,
    generator: Matrix,
    decomposition: Option<Decomposition>,
}

impl PartialEq for RankCode {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.generator == other.generator && self.decomposition == other.decomposition
    }
}

impl RankCode {
    pub fn new(ctx: &Ctx, generator: Matrix) -> Result<Self> {
        let n = generator.first().map_or(0, Vec::len);
        if generator.is_empty() || n == 0 {
            return Err(Error::DimensionMismatch("generator must be nonempty".into()));
        }
        if generator.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("generator rows differ in length".into()));
        }
        for &x in generator.iter().flatten() {
            ctx.element(x.to_int())?;
        }
        if matrix::rank(ctx, &generator) != generator.len() {
            return Err(Error::precondition("generator rows are F_q^m-dependent"));
        }
        Ok(RankCode { ctx: ctx.clone(), generator, decomposition: None })
    }

    /// `u_1 ⊕ … ⊕ u_k` with each `w(u_i) = len(u_i) < m`. The generator keeps the
    /// given block order; the decomposition record holds the sorted form.
    pub fn completely_decomposable(ctx: &Ctx, blocks: Vec<Vec<FieldElement>>) -> Result<Self> {
        validate_blocks(ctx, &blocks)?;
        let generator = block_diagonal(&blocks);
        let n = generator[0].len();
        let k = blocks.len();
        let dec = Decomposition::sorted(ctx, blocks, matrix::identity(k), EquivalenceMap::identity(n));
        Ok(RankCode { ctx: ctx.clone(), generator, decomposition: Some(dec) })
    }

    pub fn context(&self) -> &Ctx {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.generator.len()
    }

    pub fn n(&self) -> usize {
        self.generator[0].len()
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        self.decomposition.as_ref()
    }

    fn require_decomposition(&self) -> Result<&Decomposition> {
        self.decomposition.as_ref().ok_or(Error::MissingDecomposition)
    }

    /// Attaches a decomposition after checking `G = B·(⊕u_i)·A`.
    pub fn with_decomposition(mut self, dec: Decomposition) -> Result<Self> {
        if dec.reconstruct(&self.ctx) != self.generator {
            return Err(Error::precondition("decomposition does not reproduce the generator"));
        }
        self.decomposition = Some(dec);
        Ok(self)
    }

    /// `xG`.
    pub fn encode(&self, x: &[FieldElement]) -> Vec<FieldElement> {
        matrix::vec_mul(&self.ctx, x, &self.generator)
    }

    /// All codewords in message-index order (`q^{mk}` must fit under `cap`).
    pub fn codewords(&self, cap: u64) -> Result<Vec<Vec<FieldElement>>> {
        let total = (self.ctx.order() as u128).pow(self.k() as u32);
        check_cap(total, cap)?;
        Ok((0..total as u64)
            .map(|i| self.encode(&enumerate::message(&self.ctx, self.k(), i)))
            .collect())
    }

    pub fn weight_distribution(&self, cap: u64) -> Result<WeightDistribution> {
        let counts = Kernel::new(&self.ctx, &self.generator).distribution(cap)?;
        Ok(WeightDistribution { counts })
    }

    pub fn min_distance(&self, cap: u64) -> Result<usize> {
        Ok(self.weight_distribution(cap)?.min_distance().unwrap_or(0))
    }

    /// Equality in `mk ≤ max(m, n)(min(m, n) − d + 1)`.
    pub fn is_mrd(&self, cap: u64) -> Result<bool> {
        let d = self.min_distance(cap)?;
        let (m, n, k) = (self.ctx.m(), self.n(), self.k());
        Ok(m * k == m.max(n) * (m.min(n) + 1 - d))
    }

    /// `supp(c_1) + … + supp(c_k)` over the generator rows.
    pub fn code_support(&self) -> Support {
        self.generator
            .iter()
            .fold(Support::zero(&self.ctx, self.n()), |acc, row| acc.sum(&support(&self.ctx, row)))
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.code_support().is_full()
    }

    /// `C·A`.
    pub fn apply_equivalence(&self, a: &EquivalenceMap) -> Result<RankCode> {
        if a.n() != self.n() {
            return Err(Error::DimensionMismatch(format!("map of size {} on length {}", a.n(), self.n())));
        }
        let generator = matrix::mul(&self.ctx, &self.generator, a.matrix());
        let decomposition = self.decomposition.as_ref().map(|d| Decomposition {
            blocks: d.blocks.clone(),
            b: d.b.clone(),
            a: d.a.then(&self.ctx, a),
        });
        Ok(RankCode { ctx: self.ctx.clone(), generator, decomposition })
    }

    /// Change of generator `G ↦ B·G` (the code is unchanged).
    pub fn change_basis(&self, b: &Matrix) -> Result<RankCode> {
        if b.len() != self.k() || matrix::rank(&self.ctx, b) != self.k() {
            return Err(Error::SingularMatrix);
        }
        let generator = matrix::mul(&self.ctx, b, &self.generator);
        let decomposition = self.decomposition.as_ref().map(|d| Decomposition {
            blocks: d.blocks.clone(),
            b: matrix::mul(&self.ctx, b, &d.b),
            a: d.a.clone(),
        });
        Ok(RankCode { ctx: self.ctx.clone(), generator, decomposition })
    }

    /// Forgets the decomposition record.
    pub fn without_decomposition(&self) -> RankCode {
        RankCode { ctx: self.ctx.clone(), generator: self.generator.clone(), decomposition: None }
    }

    /// The sorted type, from the record or by detection.
    pub fn type_of(&self, pcap: u64) -> Result<Vec<usize>> {
        if let Some(d) = &self.decomposition {
            return Ok(d.type_vector());
        }
        match self.detect_complete_decomposability(pcap)? {
            Some(d) => Ok(d.type_vector()),
            None => Err(Error::NotDecomposable),
        }
    }

    /// The system: `F_q`-span of the generator columns. Requires a nondegenerate code.
    pub fn system(&self) -> Result<System> {
        let cols = matrix::transpose(&self.generator);
        let u = System::span(&self.ctx, self.k(), &cols)?;
        if u.dim() != self.n() {
            return Err(Error::precondition("code is degenerate: its columns are F_q-dependent"));
        }
        Ok(u)
    }

    /// Searches a basis of codewords with weights summing to `n`.
    ///
    /// Point weights come from the dual system: `w(xG) = m − dim(U^{⊥′} ∩ ⟨x⟩)`.
    /// A basis of minimum total weight is found greedily (the codewords form
    /// a matroid under `F_{q^m}`-independence), and the code is completely
    /// decomposable iff that minimum equals `n`.
    pub fn detect_complete_decomposability(&self, pcap: u64) -> Result<Option<Decomposition>> {
        let ctx = &self.ctx;
        let (k, n, m) = (self.k(), self.n(), ctx.m());
        check_cap(projective_count(ctx, k), pcap)?;
        let Ok(u) = self.system() else {
            return Ok(None);
        };
        let dual = u.perp_prime();
        let mut points: Vec<(usize, Vec<FieldElement>)> = {
            use rayon::prelude::*;
            let pts: Vec<Vec<FieldElement>> = projective_points(ctx, k).collect();
            pts.into_par_iter().map(|x| (m - dual.dim_with_line(&x), x)).collect()
        };
        points.sort_by_key(|(w, _)| *w);
        let mut chosen: Vec<(usize, Vec<FieldElement>)> = Vec::new();
        let mut rows: Matrix = Vec::new();
        for (w, x) in points {
            rows.push(x.clone());
            if matrix::rank(ctx, &rows) == rows.len() {
                chosen.push((w, x));
                if chosen.len() == k {
                    break;
                }
            } else {
                rows.pop();
            }
        }
        let total: usize = chosen.iter().map(|(w, _)| w).sum();
        if total != n {
            return Ok(None);
        }
        let x_mat: Matrix = chosen.iter().map(|(_, x)| x.clone()).collect();
        let mut blocks = Vec::with_capacity(k);
        let mut a_rows: Matrix = Vec::with_capacity(n);
        for (w, x) in &chosen {
            let c = self.encode(x);
            let basis = Subspace::span(ctx, &c, 1)?.basis().to_vec();
            if basis.len() != *w {
                return Err(Error::FalsificationAlarm(format!(
                    "point weight {w} disagrees with codeword rank weight {}",
                    basis.len()
                )));
            }
            let coeffs: Vec<Vec<FieldElement>> = c.iter().map(|&e| fq_coefficients(ctx, &basis, e)).collect();
            for s in 0..*w {
                a_rows.push(coeffs.iter().map(|cf| cf[s]).collect());
            }
            blocks.push(basis);
        }
        let a = EquivalenceMap::new(ctx, a_rows).map_err(|_| {
            Error::FalsificationAlarm("codeword supports of total dimension n are not in direct sum".into())
        })?;
        let b = matrix::inverse(ctx, &x_mat)?;
        let dec = Decomposition::sorted(ctx, blocks, b, a);
        debug_assert_eq!(dec.reconstruct(ctx), self.generator);
        Ok(Some(dec))
    }

    /// `Σ(C, t)`: the subcode spanned by blocks `t..=k` (1-based), in the
    /// code's own coordinates.
    pub fn shortened(&self, t: usize) -> Result<RankCode> {
        let dec = self.require_decomposition()?;
        let k = self.k();
        if t == 0 || t > k {
            return Err(Error::precondition(format!("t = {t} must lie in 1..={k}")));
        }
        let rows = (t - 1..k).map(|i| dec.block_codeword(&self.ctx, i)).collect();
        RankCode::new(&self.ctx, rows)
    }

    /// `Π(C, t)`: the completely decomposable code on blocks `t..=k`.
    pub fn punctured(&self, t: usize) -> Result<RankCode> {
        let dec = self.require_decomposition()?;
        let k = self.k();
        if t == 0 || t > k {
            return Err(Error::precondition(format!("t = {t} must lie in 1..={k}")));
        }
        RankCode::completely_decomposable(&self.ctx, dec.blocks[t - 1..].to_vec())
    }

    /// Generators `g_i` of the minimal codewords `{α g_i : α ≠ 0}`, one family
    /// per block. For `k = 1` every nonzero word is minimal and the single
    /// family is returned.
    pub fn minimal_codeword_families(&self) -> Result<Vec<Vec<FieldElement>>> {
        let dec = self.require_decomposition()?;
        Ok((0..self.k()).map(|i| dec.block_codeword(&self.ctx, i)).collect())
    }

    /// All minimal codewords, expanded from the block families.
    pub fn minimal_codewords(&self) -> Result<BTreeSet<Vec<FieldElement>>> {
        let fams = self.minimal_codeword_families()?;
        let mut out = BTreeSet::new();
        for g in fams {
            for alpha in self.ctx.elements().skip(1) {
                out.insert(g.iter().map(|&x| self.ctx.mul(alpha, x)).collect());
            }
        }
        Ok(out)
    }

    /// Brute force: `c` is minimal iff every nonzero `c′` with
    /// `supp(c′) ⊆ supp(c)` is a multiple of `c`.
    pub fn is_minimal_codeword_oracle(&self, c: &[FieldElement], cap: u64) -> Result<bool> {
        if c.iter().all(|x| x.is_zero()) {
            return Err(Error::precondition("c must be nonzero"));
        }
        let sc = support(&self.ctx, c);
        for other in self.codewords(cap)? {
            if other.iter().all(|x| x.is_zero()) {
                continue;
            }
            if support(&self.ctx, &other).is_subspace_of(&sc) && !proportional(&self.ctx, c, &other) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Brute-force minimal codeword set: group codewords by support; a word is
    /// minimal iff its support carries a single projective class and no other
    /// occurring support is strictly contained in it.
    pub fn minimal_codewords_oracle(&self, cap: u64) -> Result<BTreeSet<Vec<FieldElement>>> {
        let mut groups: HashMap<Support, Vec<Vec<FieldElement>>> = HashMap::new();
        for c in self.codewords(cap)? {
            if c.iter().all(|x| x.is_zero()) {
                continue;
            }
            groups.entry(support(&self.ctx, &c)).or_default().push(c);
        }
        let per_class = (self.ctx.order() - 1) as usize;
        let supports: Vec<&Support> = groups.keys().collect();
        let mut out = BTreeSet::new();
        for (s, words) in &groups {
            if words.len() != per_class {
                continue;
            }
            let has_smaller = supports
                .iter()
                .any(|t| t.dim() < s.dim() && t.is_subspace_of(s));
            if !has_smaller {
                out.extend(words.iter().cloned());
            }
        }
        Ok(out)
    }

    /// A code associated with `U^{⊥′}`, computed from the system. Checks that
    /// no point of the system has weight `m`.
    pub fn geometric_dual(&self, pcap: u64) -> Result<RankCode> {
        let u = self.system()?;
        if u.max_point_weight(pcap)? >= self.ctx.m() {
            return Err(Error::precondition("some line ⟨v⟩ lies inside the system"));
        }
        code_from_system(&u.perp_prime())
    }

    /// The geometric dual of the weight-complementary form, block by block:
    /// `U^{⊥′} = U_1^{⊥*} × … × U_k^{⊥*}`.
    pub fn geometric_dual_blockwise(&self) -> Result<RankCode> {
        let dec = self.require_decomposition()?;
        let blocks = dec
            .block_spaces(&self.ctx)
            .into_iter()
            .map(|u| u.dual().basis().to_vec())
            .collect();
        RankCode::completely_decomposable(&self.ctx, blocks)
    }

    /// Generator of the classical dual `{y : G yᵀ = 0}`.
    pub fn classical_dual(&self) -> Result<RankCode> {
        let rows = matrix::right_kernel(&self.ctx, &self.generator, self.n());
        RankCode::new(&self.ctx, rows)
    }

    pub fn to_record(&self) -> CodeRecord {
        CodeRecord::from_code(self)
    }
}

/// `F_q`-coordinates of `x` in the `F_q`-independent family `basis`.
fn fq_coefficients(ctx: &FieldContext, basis: &[FieldElement], x: FieldElement) -> Vec<FieldElement> {
    let theta = ctx.theta();
    let rows: Vec<Vec<u64>> = basis
        .iter()
        .flat_map(|&b| theta.iter().map(move |&t| ctx.digits(ctx.mul(t, b))))
        .collect();
    let c = linalg::solve(ctx.p(), &rows, &ctx.digits(x)).expect("x lies in the span");
    c.chunks(ctx.a())
        .map(|ch| {
            ch.iter()
                .zip(theta)
                .fold(FieldElement::ZERO, |acc, (&d, &t)| ctx.add(acc, ctx.mul(ctx.from_prime(d), t)))
        })
        .collect()
}

fn proportional(ctx: &FieldContext, c: &[FieldElement], d: &[FieldElement]) -> bool {
    let Some(i) = c.iter().position(|x| !x.is_zero()) else {
        return d.iter().all(|x| x.is_zero());
    };
    let alpha = ctx.mul(d[i], ctx.inv(c[i]).expect("nonzero"));
    c.iter().zip(d).all(|(&x, &y)| ctx.mul(alpha, x) == y)
}

/// Block-diagonal direct sum.
pub fn direct_sum(codes: &[RankCode]) -> Result<RankCode> {
    let Some(first) = codes.first() else {
        return Err(Error::precondition("direct sum of no codes"));
    };
    let ctx = first.ctx.clone();
    for c in codes {
        same_ctx(&ctx, &c.ctx)?;
    }
    let gens: Vec<&Matrix> = codes.iter().map(|c| &c.generator).collect();
    let generator = block_diagonal_matrices(&gens);
    let decomposition = if codes.iter().all(|c| c.decomposition.is_some()) {
        let decs: Vec<&Decomposition> = codes.iter().map(|c| c.decomposition.as_ref().unwrap()).collect();
        let blocks = decs.iter().flat_map(|d| d.blocks.iter().cloned()).collect();
        let b = block_diagonal_matrices(&decs.iter().map(|d| &d.b).collect::<Vec<_>>());
        let a = block_diagonal_matrices(&decs.iter().map(|d| d.a.matrix()).collect::<Vec<_>>());
        Some(Decomposition::sorted(&ctx, blocks, b, EquivalenceMap { matrix: a }))
    } else {
        None
    };
    Ok(RankCode { ctx, generator, decomposition })
}

/// A code whose generator columns form an `F_q`-basis of the system.
pub fn code_from_system(u: &System) -> Result<RankCode> {
    if !u.spans_ambient() {
        return Err(Error::precondition("system does not span F_q^m^k"));
    }
    let cols = u.fq_basis();
    RankCode::new(u.context(), matrix::transpose(&cols))
}

/// Serialized code: field, generator, and (when known) the decomposition
/// `G = B·(u_1 ⊕ … ⊕ u_k)·A` with sorted blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeRecord {
    pub field: crate::field::ContextDescriptor,
    pub generator: Vec<Vec<u64>>,
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    pub code_type: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<u64>>>,
}

fn ints(m: &Matrix) -> Vec<Vec<u64>> {
    m.iter().map(|r| r.iter().map(|x| x.to_int()).collect()).collect()
}

impl CodeRecord {
    pub fn from_code(code: &RankCode) -> Self {
        let dec = code.decomposition.as_ref();
        CodeRecord {
            field: code.ctx.descriptor(),
            generator: ints(&code.generator),
            code_type: dec.map(Decomposition::type_vector),
            blocks: dec.map(|d| ints(&d.blocks)),
            b: dec.map(|d| ints(&d.b)),
            a: dec.map(|d| ints(d.a.matrix())),
        }
    }

    pub fn to_code(&self) -> Result<RankCode> {
        let ctx = std::sync::Arc::new(FieldContext::from_descriptor(&self.field)?);
        let elems = |rows: &[Vec<u64>]| -> Result<Matrix> {
            rows.iter()
                .map(|r| r.iter().map(|&v| ctx.element(v)).collect())
                .collect()
        };
        let code = RankCode::new(&ctx, elems(&self.generator)?)?;
        match (&self.blocks, &self.b, &self.a) {
            (Some(blocks), Some(b), Some(a)) => {
                let dec = Decomposition::new(&ctx, elems(blocks)?, elems(b)?, elems(a)?)?;
                if let Some(t) = &self.code_type {
                    if *t != dec.type_vector() {
                        return Err(Error::Parse("recorded type disagrees with the blocks".into()));
                    }
                }
                code.with_decomposition(dec)
            }
            (None, None, None) => Ok(code),
            _ => Err(Error::Parse("blocks, b and a must be given together".into())),
        }
    }
}

/// One block of a [`CodeSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BlockSpec {
    Entries(Vec<u64>),
    Geometric(GeometricBlock),
}

/// `(1, λ, …, λ^{t-1})` with `λ` of degree `lambda_degree`; the smallest such
/// element when `lambda` is absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricBlock {
    pub lambda_degree: usize,
    pub t: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<u64>,
}

/// Input description of a completely decomposable code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    pub field: crate::field::ContextDescriptor,
    pub blocks: Vec<BlockSpec>,
}

impl CodeSpec {
    pub fn build(&self) -> Result<RankCode> {
        let ctx: Ctx = std::sync::Arc::new(FieldContext::from_descriptor(&self.field)?);
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| match b {
                BlockSpec::Entries(v) => v.iter().map(|&x| ctx.element(x)).collect(),
                BlockSpec::Geometric(g) => {
                    let lambda = match g.lambda {
                        Some(v) => {
                            let x = ctx.element(v)?;
                            if ctx.degree_over_q(x) != g.lambda_degree {
                                return Err(Error::Parse(format!(
                                    "block {i}: λ = {v} has degree {}, not {}",
                                    ctx.degree_over_q(x),
                                    g.lambda_degree
                                )));
                            }
                            x
                        }
                        None => *ctx.elements_of_degree(g.lambda_degree)?.first().ok_or_else(|| {
                            Error::Parse(format!("block {i}: no element of degree {}", g.lambda_degree))
                        })?,
                    };
                    if g.t == 0 || g.t > g.lambda_degree {
                        return Err(Error::Parse(format!("block {i}: t = {} must lie in 1..={}", g.t, g.lambda_degree)));
                    }
                    Ok((0..g.t).map(|j| ctx.pow(lambda, j as u64)).collect())
                }
            })
            .collect::<Result<Vec<Vec<FieldElement>>>>()?;
        RankCode::completely_decomposable(&ctx, blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    const CAP: u64 = 1 << 24;
    const PCAP: u64 = 1 << 16;

    fn ctx(p: u64, a: usize, m: usize) -> Ctx {
        Arc::new(FieldContext::new(p, a, m, None).unwrap())
    }

    fn naive_distribution(code: &RankCode) -> Vec<u64> {
        let mut counts = vec![0u64; code.n() + 1];
        for c in code.codewords(CAP).unwrap() {
            counts[Subspace::span(code.context(), &c, 1).unwrap().dim()] += 1;
        }
        counts
    }

    fn random_block_code(k: &Ctx, types: &[usize], rng: &mut ChaCha8Rng) -> RankCode {
        super::random_block_code(k, types, rng).unwrap()
    }

    #[test]
    fn rank_weight_examples() {
        let k = ctx(2, 1, 6);
        let l = k.find_element_of_degree(6, 0).unwrap();
        assert_eq!(rank_weight(&k, &[FieldElement::ZERO; 3]), 0);
        let l2 = k.mul(l, l);
        assert_eq!(rank_weight(&k, &[FieldElement::ONE, l, l2]), 3);
        let v = [FieldElement::ONE, l, k.add(FieldElement::ONE, l)];
        assert_eq!(rank_weight(&k, &v), 2);
        let s = support(&k, &v);
        assert_eq!(s.dim(), 2);
        // {(a, b, a + b)}
        let expected = FpSpace::from_rows(2, 3, [vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(s.fp_space(), &expected);
    }

    #[test]
    fn support_is_basis_independent() {
        let k = ctx(2, 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gamma2 = loop {
            let g: Vec<FieldElement> = (0..3).map(|_| FieldElement::from_raw(rng.gen_range(1..64))).collect();
            if let Ok(b) = FqBasis::new(&k, g) {
                break b;
            }
        };
        for _ in 0..50 {
            let v: Vec<FieldElement> = (0..4).map(|_| FieldElement::from_raw(rng.gen_range(0..64))).collect();
            let s1 = support(&k, &v);
            assert_eq!(s1, support_in(&k, &gamma2, &v));
            assert_eq!(s1.dim(), rank_weight(&k, &v));
        }
    }

    #[test]
    fn single_block_code() {
        let k = ctx(2, 1, 4);
        let l = k.find_element_of_degree(4, 0).unwrap();
        let code = RankCode::completely_decomposable(&k, vec![vec![FieldElement::ONE, l, k.mul(l, l)]]).unwrap();
        let wd = code.weight_distribution(CAP).unwrap();
        assert_eq!(wd.counts, vec![1, 0, 0, 15]);
        assert!(code.is_mrd(CAP).unwrap());
        let bad = RankCode::completely_decomposable(&k, vec![vec![FieldElement::ONE, FieldElement::ONE]]);
        assert_eq!(bad.unwrap_err(), Error::InvalidBlock { index: 0, weight: 1, length: 2 });
    }

    #[test]
    fn identity_code_is_mrd() {
        let k = ctx(3, 1, 2);
        let code = RankCode::new(&k, matrix::identity(2)).unwrap();
        assert_eq!(code.min_distance(CAP).unwrap(), 1);
        assert!(code.is_mrd(CAP).unwrap());
        assert!(code.is_nondegenerate());
        assert_eq!(code.type_of(PCAP).unwrap(), vec![1, 1]);
    }

    #[test]
    fn kernel_matches_naive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, a, m, k) in [(2, 1, 4, 2), (3, 1, 3, 2), (2, 2, 2, 2), (5, 1, 2, 2), (3, 2, 2, 1)] {
            let kk = ctx(p, a, m);
            let n = m + 1;
            let all: Vec<FieldElement> = kk.elements().collect();
            let g = loop {
                let g: Matrix = (0..k).map(|_| (0..n).map(|_| all[rng.gen_range(0..all.len())]).collect()).collect();
                if matrix::rank(&kk, &g) == k {
                    break g;
                }
            };
            let code = RankCode::new(&kk, g).unwrap();
            assert_eq!(code.weight_distribution(CAP).unwrap().counts, naive_distribution(&code), "p={p} a={a} m={m}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        let k = ctx(2, 1, 6);
        let code = RankCode::new(&k, matrix::identity(3)).unwrap();
        assert_eq!(
            code.weight_distribution(1000).unwrap_err(),
            Error::CapExceeded { required: 1 << 18, cap: 1000 }
        );
    }

    #[test]
    fn decomposition_reconstructs_generator() {
        let k = ctx(2, 1, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let code = random_block_code(&k, &[2, 4, 3], &mut rng);
        let dec = code.decomposition().unwrap();
        assert_eq!(dec.type_vector(), vec![4, 3, 2]);
        assert_eq!(dec.reconstruct(&k), *code.generator());
        let scrambled = code
            .apply_equivalence(&random_gl(&k, 9, 1))
            .unwrap()
            .change_basis(&random_gl_qm(&k, 3, 2))
            .unwrap();
        let dec = scrambled.decomposition().unwrap();
        assert_eq!(dec.reconstruct(&k), *scrambled.generator());
    }

    #[test]
    fn detection_roundtrip() {
        let k = ctx(2, 1, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for seed in 0..6 {
            let code = random_block_code(&k, &[3, 1, 2], &mut rng);
            let scrambled = code
                .apply_equivalence(&random_gl(&k, 6, seed))
                .unwrap()
                .change_basis(&random_gl_qm(&k, 3, seed))
                .unwrap()
                .without_decomposition();
            let dec = scrambled.detect_complete_decomposability(PCAP).unwrap().unwrap();
            assert_eq!(dec.type_vector(), vec![3, 2, 1]);
            assert_eq!(dec.reconstruct(&k), *scrambled.generator());
            assert!(scrambled.clone().with_decomposition(dec).is_ok());
        }
    }

    #[test]
    fn scattered_system_is_not_decomposable() {
        // k = 2, m = 4: U = {(x, x^q) : x ∈ F_{q^4}} is scattered of dimension 4
        let k = ctx(2, 1, 4);
        let basis: Vec<FieldElement> = k.subfield_basis(4).unwrap().to_vec();
        let g = vec![basis.clone(), basis.iter().map(|&x| k.frobenius(x, 1)).collect()];
        let code = RankCode::new(&k, g).unwrap();
        let u = code.system().unwrap();
        assert_eq!(u.max_point_weight(PCAP).unwrap(), 1);
        assert!(code.detect_complete_decomposability(PCAP).unwrap().is_none());
        assert_eq!(code.type_of(PCAP), Err(Error::NotDecomposable));
    }

    #[test]
    fn point_weights_match_rank_weights() {
        let k = ctx(3, 1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let code = random_block_code(&k, &[1, 1], &mut rng)
            .apply_equivalence(&random_gl(&k, 2, 3))
            .unwrap();
        let u = code.system().unwrap();
        let d = u.perp_prime();
        for x in projective_points(&k, 2) {
            let w = rank_weight(&k, &code.encode(&x));
            assert_eq!(d.dim_with_line(&x), 2 - w);
            assert_eq!(u.weight_via_system(&x).unwrap(), w);
        }
    }

    #[test]
    fn shortened_and_punctured() {
        let k = ctx(2, 1, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let code = random_block_code(&k, &[3, 2, 2], &mut rng).apply_equivalence(&random_gl(&k, 7, 4)).unwrap();
        assert_eq!(code.punctured(1).unwrap().weight_distribution(CAP), code.weight_distribution(CAP));
        for t in 1..=3 {
            let s = code.shortened(t).unwrap();
            let p = code.punctured(t).unwrap();
            assert_eq!(s.k(), 4 - t);
            assert_eq!(s.weight_distribution(CAP).unwrap().counts[..=p.n()], p.weight_distribution(CAP).unwrap().counts[..]);
        }
        assert!(code.shortened(0).is_err());
        assert_eq!(code.without_decomposition().shortened(1).unwrap_err(), Error::MissingDecomposition);
    }

    #[test]
    fn block_families_are_minimal() {
        let k = ctx(2, 1, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let code = random_block_code(&k, &[2, 2], &mut rng).apply_equivalence(&random_gl(&k, 4, 1)).unwrap();
        let min = code.minimal_codewords().unwrap();
        assert_eq!(min.len(), 30);
        let oracle = code.minimal_codewords_oracle(CAP).unwrap();
        assert!(min.is_subset(&oracle));
        for c in min.iter().take(5) {
            assert!(code.is_minimal_codeword_oracle(c, CAP).unwrap());
        }
    }

    #[test]
    fn mixed_codewords_can_be_minimal() {
        let k = ctx(2, 1, 3);
        let l = k.x();
        let code = RankCode::completely_decomposable(&k, vec![vec![FieldElement::ONE, l]; 2]).unwrap();
        let mixed = vec![FieldElement::ONE, l, FieldElement::ONE, l];
        assert!(code.is_minimal_codeword_oracle(&mixed, CAP).unwrap());
        assert_eq!(code.minimal_codewords().unwrap().len(), 14);
        let oracle = code.minimal_codewords_oracle(CAP).unwrap();
        assert_eq!(oracle.len(), 63);
        assert!(oracle.contains(&mixed));
    }

    #[test]
    fn geometric_dual_types() {
        let k = ctx(2, 1, 6);
        let l = k.find_element_of_degree(3, 0).unwrap();
        let block = vec![FieldElement::ONE, l];
        let code = RankCode::completely_decomposable(&k, vec![block.clone(), block.clone(), block]).unwrap();
        let dual = code.geometric_dual(PCAP).unwrap();
        assert_eq!(dual.n(), 12);
        assert_eq!(dual.type_of(PCAP).unwrap(), vec![4, 4, 4]);
        let blockwise = code.geometric_dual_blockwise().unwrap();
        assert_eq!(blockwise.type_of(PCAP).unwrap(), vec![4, 4, 4]);
        assert_eq!(dual.geometric_dual(PCAP).unwrap().type_of(PCAP).unwrap(), vec![2, 2, 2]);
    }

    #[test]
    fn record_roundtrip() {
        let k = ctx(3, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let code = random_block_code(&k, &[1, 2], &mut rng);
        let rec = code.to_record();
        assert_eq!(rec.code_type, Some(vec![2, 1]));
        let json = serde_json::to_string(&rec).unwrap();
        let back: CodeRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_code().unwrap(), code);
    }

    #[test]
    fn direct_sum_of_blocks() {
        let k = ctx(2, 1, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c1 = random_block_code(&k, &[2], &mut rng);
        let c2 = random_block_code(&k, &[4, 1], &mut rng);
        let sum = direct_sum(&[c1.clone(), c2]).unwrap();
        assert_eq!(sum.decomposition().unwrap().type_vector(), vec![4, 2, 1]);
        assert_eq!(sum.decomposition().unwrap().reconstruct(&k), *sum.generator());
        assert_eq!(direct_sum(std::slice::from_ref(&c1)).unwrap().generator(), c1.generator());
        assert_eq!(sum.min_distance(CAP).unwrap(), 1);
        assert!(!sum.is_mrd(CAP).unwrap());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(16))]
        #[test]
        fn equivalence_preserves_distribution(seed: u64) {
            let k = ctx(2, 1, 4);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let code = random_block_code(&k, &[3, 2], &mut rng);
            let wd = code.weight_distribution(CAP).unwrap();
            proptest::prop_assert_eq!(wd.total(), 256);
            let moved = code.apply_equivalence(&random_gl(&k, 5, seed)).unwrap();
            proptest::prop_assert_eq!(moved.weight_distribution(CAP).unwrap(), wd);
        }

        #[test]
        fn weight_lower_bound_from_blocks(seed: u64) {
            let k = ctx(3, 1, 3);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let code = random_block_code(&k, &[2, 1, 2], &mut rng);
            let types = code.decomposition().unwrap().type_vector();
            let sorted = RankCode::completely_decomposable(&k, code.decomposition().unwrap().blocks().to_vec()).unwrap();
            for _ in 0..50 {
                let x: Vec<FieldElement> = (0..3).map(|_| FieldElement::from_raw(rng.gen_range(0..27))).collect();
                let w = rank_weight(&k, &sorted.encode(&x));
                let bound = x.iter().zip(&types).filter(|(a, _)| !a.is_zero()).map(|(_, &t)| t).max().unwrap_or(0);
                proptest::prop_assert!(w >= bound);
            }
        }
    }
}
