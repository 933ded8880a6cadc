//! Witness searches for the worked examples: the `m = 6` and `m = 7` pairs of
//! codes with equal minimum-weight counts, the subfield-extremal instance and
//! the lower-bound instance.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    construct_lambda_code, construct_lower_attaining, construct_subfield_extremal, find_lower_attaining,
    min_weight_count_formula,
};
use crate::code::RankCode;
use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement};
use crate::subspace::Ctx;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    M6,
    M7,
    #[serde(rename = "prop45")]
    SubfieldExtremal,
    Lowerbound,
}

impl Example {
    pub const ALL: [Example; 4] = [Example::M6, Example::M7, Example::SubfieldExtremal, Example::Lowerbound];

    pub fn name(self) -> &'static str {
        match self {
            Example::M6 => "m6",
            Example::M7 => "m7",
            Example::SubfieldExtremal => "prop45",
            Example::Lowerbound => "lowerbound",
        }
    }
}

impl std::str::FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Example::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown example {s:?}")))
    }
}

/// The element found by a search, printable for outside checking.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub value: u64,
    pub minimal_polynomial: String,
}

impl Witness {
    fn of(ctx: &FieldContext, x: FieldElement) -> Self {
        Witness { value: x.to_int(), minimal_polynomial: ctx.minimal_polynomial(x).to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReproRow {
    pub label: String,
    pub witness: Option<Witness>,
    pub candidates_tried: usize,
    pub expected: Vec<u64>,
    pub computed: Vec<u64>,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReproReport {
    pub example: Example,
    pub field: String,
    pub rows: Vec<ReproRow>,
    pub notes: Vec<String>,
    pub passed: bool,
}

pub const M6_DEGREE6: [u64; 7] = [1, 0, 441, 2646, 35280, 127008, 96768];
pub const M6_DEGREE3: [u64; 7] = [1, 0, 441, 4158, 24696, 148176, 84672];
pub const M7_POWERS: [u64; 10] = [1, 0, 0, 889, 5334, 42672, 341376, 1706880, 0, 0];
pub const M7_GAPPED: [u64; 10] = [1, 0, 0, 889, 0, 37338, 394716, 1664208, 0, 0];

fn field(p: u64, m: usize) -> Result<Ctx> {
    Ok(Arc::new(FieldContext::new(p, 1, m, None)?))
}

/// First candidate (in integer order) whose code has the expected distribution.
fn search<F>(ctx: &Ctx, label: &str, candidates: &[FieldElement], expected: &[u64], cap: u64, build: F) -> Result<ReproRow>
where
    F: Fn(FieldElement) -> Result<RankCode>,
{
    let mut last = Vec::new();
    for (i, &x) in candidates.iter().enumerate() {
        let dist = build(x)?.weight_distribution(cap)?.counts;
        if dist == expected {
            return Ok(ReproRow {
                label: label.into(),
                witness: Some(Witness::of(ctx, x)),
                candidates_tried: i + 1,
                expected: expected.to_vec(),
                computed: dist,
                matched: true,
            });
        }
        last = dist;
    }
    Ok(ReproRow {
        label: label.into(),
        witness: None,
        candidates_tried: candidates.len(),
        expected: expected.to_vec(),
        computed: last,
        matched: false,
    })
}

fn blocks_of(ctx: &Ctx, lambda: FieldElement, exps: &[u64], k: usize) -> Result<RankCode> {
    let u: Vec<FieldElement> = exps.iter().map(|&e| ctx.pow(lambda, e)).collect();
    RankCode::completely_decomposable(ctx, vec![u; k])
}

pub fn reproduce(example: Example, cap: u64) -> Result<ReproReport> {
    match example {
        Example::M6 => reproduce_m6(cap),
        Example::M7 => reproduce_m7(cap),
        Example::SubfieldExtremal => reproduce_subfield_extremal(cap),
        Example::Lowerbound => reproduce_lowerbound(cap),
    }
}

fn reproduce_m6(cap: u64) -> Result<ReproReport> {
    let ctx = field(2, 6)?;
    let deg6 = ctx.elements_of_degree(6)?;
    let deg3 = ctx.elements_of_degree(3)?;
    let rows = vec![
        search(&ctx, "(1,λ)⊕(1,λ)⊕(1,λ), deg λ = 6", &deg6, &M6_DEGREE6, cap, |x| construct_lambda_code(&ctx, x, 6, &[2, 2, 2]))?,
        search(&ctx, "(1,λ)⊕(1,λ)⊕(1,λ), deg λ = 3", &deg3, &M6_DEGREE3, cap, |x| construct_lambda_code(&ctx, x, 3, &[2, 2, 2]))?,
    ];
    let mut notes = Vec::new();
    let mut uniform = true;
    for (e, elems) in [(6, &deg6), (3, &deg3)] {
        let mut counts = std::collections::BTreeSet::new();
        for &x in elems.iter() {
            let code = construct_lambda_code(&ctx, x, e, &[2, 2, 2])?;
            counts.insert(code.weight_distribution(cap)?.get(2));
        }
        uniform &= counts.len() == 1 && counts.contains(&441);
        notes.push(format!("A_2 over all {} elements of degree {e}: {:?}", elems.len(), counts));
    }
    let passed = rows.iter().all(|r| r.matched) && uniform;
    Ok(ReproReport { example: Example::M6, field: "F_2^6".into(), rows, notes, passed })
}

fn reproduce_m7(cap: u64) -> Result<ReproReport> {
    let ctx = field(2, 7)?;
    let gens = ctx.elements_of_degree(7)?;
    let rows = vec![
        search(&ctx, "(1,λ,λ²)⊕(1,λ,λ²)⊕(1,λ,λ²)", &gens, &M7_POWERS, cap, |x| blocks_of(&ctx, x, &[0, 1, 2], 3))?,
        search(&ctx, "(1,λ,λ³)⊕(1,λ,λ³)⊕(1,λ,λ³)", &gens, &M7_GAPPED, cap, |x| blocks_of(&ctx, x, &[0, 1, 3], 3))?,
    ];
    let equal_min = rows.iter().all(|r| r.computed.get(3) == Some(&889));
    let distinct = rows[0].computed != rows[1].computed;
    let notes = vec![format!("A_3 equal across the pair: {equal_min}; full distributions differ: {distinct}")];
    let passed = rows.iter().all(|r| r.matched) && equal_min && distinct;
    Ok(ReproReport { example: Example::M7, field: "F_2^7".into(), rows, notes, passed })
}

fn reproduce_subfield_extremal(cap: u64) -> Result<ReproReport> {
    let ctx = field(2, 4)?;
    let xi = ctx.elements_of_degree(4)?[0];
    let code = construct_subfield_extremal(&ctx, 2, 2, 2, xi)?;
    let dist = code.weight_distribution(cap)?.counts;
    let expected = vec![1, 0, 75, 0, 180];
    let formula = min_weight_count_formula(&code)?;
    let spectrum: Vec<usize> = dist.iter().enumerate().skip(1).filter(|(_, &c)| c > 0).map(|(w, _)| w).collect();
    let row = ReproRow {
        label: "q=2, e=2, r=2, k=2".into(),
        witness: Some(Witness::of(&ctx, xi)),
        candidates_tried: 1,
        matched: dist == expected,
        expected,
        computed: dist,
    };
    let notes = vec![
        format!("nonzero weights: {spectrum:?}"),
        format!("closed-form count {}, upper bound {}", formula.formula_count, formula.upper_bound),
    ];
    let passed = row.matched && spectrum == [2, 4] && formula.formula_count == 75;
    Ok(ReproReport { example: Example::SubfieldExtremal, field: "F_2^4".into(), rows: vec![row], notes, passed })
}

fn reproduce_lowerbound(cap: u64) -> Result<ReproReport> {
    let ctx = field(3, 4)?;
    let params = find_lower_attaining(&ctx, 2, 2)?;
    let code = construct_lower_attaining(&ctx, 2, &params)?;
    let dist = code.weight_distribution(cap)?.counts;
    let formula = min_weight_count_formula(&code)?;
    let row = ReproRow {
        label: "q=3, e=2, k=2: A_2".into(),
        witness: Some(Witness::of(&ctx, params.xi)),
        candidates_tried: 1,
        expected: vec![160],
        computed: vec![dist[2]],
        matched: dist[2] == 160,
    };
    let notes = vec![
        format!(
            "ξ = {}, μ = {:?}, λ = {}",
            params.xi.to_int(),
            params.mu.iter().map(|x| x.to_int()).collect::<Vec<_>>(),
            params.lambda.to_int()
        ),
        format!("full distribution {dist:?}; lower bound {}", formula.lower_bound),
    ];
    let passed = row.matched && formula.lower_bound == 160 && formula.formula_count == 160;
    Ok(ReproReport { example: Example::Lowerbound, field: "F_3^4".into(), rows: vec![row], notes, passed })
}
