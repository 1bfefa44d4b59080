//! Evaluation of the invariant of the Λ-indexed construction and the
//! planners that choose Λ for a target set.

use serde::{Deserialize, Serialize};

use crate::constructions::family::{countable_family_plan, FamilyPlan, LambdaMatrix};
use crate::error::{Error, Result};
use crate::index_sets::{LambdaSpec, Quadrant, QuadrantRules};
use crate::nset::{NSet, NValue};

/// `Type(𝒜₀′ eᵢ J eⱼ J)` for dyadic index pairs `(i, j) ∈ {0,1}^L × {0,1}^L`,
/// `L ≤ level`.
///
/// Only the finest table is supplied; coarser tables are unions over
/// refining pairs, so refinement consistency holds by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutdownOracle {
    /// `tables[L]` is the `2^L × 2^L` table, row-major.
    tables: Vec<Vec<NSet>>,
}

#[derive(Serialize, Deserialize)]
struct RawOracle {
    level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    uniform: Option<NSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<Vec<NSet>>>,
}

const MAX_ORACLE_LEVEL: usize = 12;

impl CutdownOracle {
    pub fn uniform(level: usize, set: NSet) -> Result<Self> {
        if level > MAX_ORACLE_LEVEL {
            return Err(Error::Overflow(format!("oracle level {level}")));
        }
        let side = 1usize << level;
        Self::from_table(level, vec![vec![set; side]; side])
    }

    /// The oracle of a simple masa: every cutdown is `{1}`.
    pub fn simple(level: usize) -> Self {
        Self::uniform(level, NSet::one()).expect("level within guard")
    }

    pub fn from_table(level: usize, table: Vec<Vec<NSet>>) -> Result<Self> {
        if level > MAX_ORACLE_LEVEL {
            return Err(Error::Overflow(format!("oracle level {level}")));
        }
        let side = 1usize << level;
        if table.len() != side || table.iter().any(|row| row.len() != side) {
            return Err(Error::InvalidInput(format!(
                "oracle table at level {level} must be {side}×{side}"
            )));
        }
        let mut tables = vec![table.into_iter().flatten().collect::<Vec<_>>()];
        for l in (0..level).rev() {
            let fine = tables.last().unwrap();
            let (fs, cs) = (2usize << l, 1usize << l);
            let coarse = (0..cs * cs)
                .map(|k| {
                    let (a, b) = (k / cs, k % cs);
                    let mut u = NSet::empty();
                    for da in 0..2 {
                        for db in 0..2 {
                            u.extend_from(&fine[(2 * a + da) * fs + 2 * b + db]);
                        }
                    }
                    u
                })
                .collect();
            tables.push(coarse);
        }
        tables.reverse();
        Ok(Self { tables })
    }

    pub fn level(&self) -> usize {
        self.tables.len() - 1
    }

    /// Entry at dyadic pair `(a, b)` of length `level`, given as bit words.
    pub fn entry(&self, level: usize, a: u64, b: u64) -> Result<&NSet> {
        let t = self.tables.get(level).ok_or(Error::OracleGap {
            needed: level,
            available: self.level(),
        })?;
        let side = 1u64 << level;
        if a >= side || b >= side {
            return Err(Error::RangeError(format!("pair ({a},{b}) at level {level}")));
        }
        Ok(&t[(a * side + b) as usize])
    }

    pub fn is_uniform(&self) -> bool {
        let fine = self.tables.last().unwrap();
        fine.iter().all(|s| s == &fine[0])
    }

    pub fn to_json(&self) -> String {
        let side = 1usize << self.level();
        let fine = self.tables.last().unwrap();
        let raw = if self.is_uniform() {
            RawOracle {
                level: self.level(),
                uniform: Some(fine[0].clone()),
                table: None,
            }
        } else {
            RawOracle {
                level: self.level(),
                uniform: None,
                table: Some(fine.chunks(side).map(|r| r.to_vec()).collect()),
            }
        };
        serde_json::to_string_pretty(&raw).expect("oracle serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawOracle = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match (raw.uniform, raw.table) {
            (Some(s), None) => Self::uniform(raw.level, s),
            (None, Some(t)) => Self::from_table(raw.level, t),
            _ => Err(Error::Parse(
                "oracle needs exactly one of \"uniform\" or \"table\"".into(),
            )),
        }
    }
}

/// Result of [`eval_construction`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalOutcome {
    pub set: NSet,
    /// Set when further levels cannot add values; see [`eval_construction`].
    pub converged: bool,
    pub per_level: Vec<NSet>,
}

fn check_oracle(oracle: &CutdownOracle, r_max: usize) -> Result<()> {
    if oracle.level() < r_max + 1 {
        return Err(Error::OracleGap {
            needed: r_max + 1,
            available: oracle.level(),
        });
    }
    Ok(())
}

/// The union over levels `r ≤ r_max` and sibling pairs `{i, j}` of
/// `{Λ^{(r)}_{i,j}} · oracle(i⁰, j⁰)`.
///
/// `converged` requires `r_max ≥ 1`, the union to be unchanged by level
/// `r_max`, a uniform oracle, and every Λ value `spec` can still emit
/// above `r_max` to have been emitted already.
pub fn eval_construction(
    spec: &LambdaSpec,
    oracle: &CutdownOracle,
    r_max: usize,
) -> Result<EvalOutcome> {
    check_oracle(oracle, r_max)?;
    let mut per_level = vec![NSet::empty(); r_max + 1];
    let mut emitted = NSet::empty();
    for a in spec.assignments(r_max)? {
        let p = &a.pair;
        let cell = oracle.entry(p.r + 1, p.i.seqs()[0].bits(), p.j.seqs()[0].bits())?;
        per_level[p.r].extend_from(&NSet::singleton(a.value).product(cell));
        emitted.insert(a.value);
    }
    let set = per_level.iter().fold(NSet::empty(), |u, s| u.union(s));
    let before = per_level[..r_max]
        .iter()
        .fold(NSet::empty(), |u, s| u.union(s));
    let converged = r_max >= 1
        && before == set
        && oracle.is_uniform()
        && spec.values_beyond(r_max).is_subset(&emitted);
    Ok(EvalOutcome {
        set,
        converged,
        per_level,
    })
}

/// The union of [`eval_construction`] split by quadrant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadrantOutcome {
    pub zero: NSet,
    pub one: NSet,
    pub mixed: NSet,
}

pub fn eval_quadrants(
    spec: &LambdaSpec,
    oracle: &CutdownOracle,
    r_max: usize,
) -> Result<QuadrantOutcome> {
    check_oracle(oracle, r_max)?;
    let mut out = QuadrantOutcome {
        zero: NSet::empty(),
        one: NSet::empty(),
        mixed: NSet::empty(),
    };
    for a in spec.assignments(r_max)? {
        let p = &a.pair;
        let cell = oracle.entry(p.r + 1, p.i.seqs()[0].bits(), p.j.seqs()[0].bits())?;
        let target = match p.quadrant() {
            Quadrant::Zero => &mut out.zero,
            Quadrant::One => &mut out.one,
            Quadrant::Mixed => &mut out.mixed,
        };
        target.extend_from(&NSet::singleton(a.value).product(cell));
    }
    Ok(out)
}

fn first(e: &NSet) -> NValue {
    e.iter().next().expect("non-empty")
}

/// A spec whose values over the canonical stream are exactly `E`.
pub fn choose_lambda_for_e(e: &NSet) -> Result<LambdaSpec> {
    if e.is_empty() {
        return Err(Error::EmptyInput("target set E"));
    }
    let spec = LambdaSpec::constant(first(e));
    if e.len() == 1 {
        Ok(spec)
    } else {
        spec.with_enumeration(e.clone())
    }
}

/// A spec with `E` on pairs under `𝟎`, `F` on pairs under `𝟏`, and `G` on
/// mixed pairs.
pub fn choose_lambda_for_efg(e: &NSet, f: &NSet, g: &NSet) -> Result<LambdaSpec> {
    if e.is_empty() || f.is_empty() || g.is_empty() {
        return Err(Error::EmptyInput("target sets E, F, G"));
    }
    LambdaSpec::constant(first(e)).with_quadrant_rules(QuadrantRules {
        zero: e.clone(),
        one: f.clone(),
        mixed: g.clone(),
    })
}

/// A family of `k` Cartan masas whose direct sum has invariant `E`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectSumPlan {
    pub k: usize,
    pub lambda: LambdaMatrix,
    pub family: FamilyPlan,
}

impl DirectSumPlan {
    /// `{1} ∪ ⋃_{i<j} puk(Dᵢ, Dⱼ)`.
    pub fn evaluate(&self) -> NSet {
        let mut out = NSet::one();
        for i in 0..self.k {
            for j in i + 1..self.k {
                out.extend_from(&self.family.evaluate_pair(i, j));
            }
        }
        out
    }
}

/// Smallest `k` with `C(k, 2) ≥ |E \ {1}|`; the values of `E \ {1}` go to the
/// pairs `i < j` in lexicographic order and the remaining pairs get 1.
pub fn cor_plan_1_in_puk(e: &NSet) -> Result<DirectSumPlan> {
    if !e.contains(NValue::ONE) {
        return Err(Error::InvalidInput(format!("1 is not in {{{e}}}")));
    }
    let rest: Vec<NValue> = e.iter().filter(|&v| v != NValue::ONE).collect();
    let mut k = 1;
    while k * (k - 1) / 2 < rest.len() {
        k += 1;
    }
    let mut rows = vec![vec![NValue::ONE; k]; k];
    let pairs = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j)));
    for ((i, j), v) in pairs.zip(rest) {
        rows[i][j] = v;
        rows[j][i] = v;
    }
    let lambda = LambdaMatrix::new(rows)?;
    let family = countable_family_plan(&lambda)?;
    Ok(DirectSumPlan { k, lambda, family })
}
