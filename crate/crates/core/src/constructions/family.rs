//! Assembly of a family of Cartan masas with prescribed pairwise mixed
//! invariants, one gadget per unordered pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nset::{tensor_mixed, tensor_mixed_infinite, NSet, NValue};

/// Symmetric matrix over ℕ∞ with unit diagonal. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<NValue>>", into = "Vec<Vec<NValue>>")]
pub struct LambdaMatrix {
    rows: Vec<Vec<NValue>>,
}

impl LambdaMatrix {
    pub fn new(rows: Vec<Vec<NValue>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidLambda("empty index set".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidLambda(format!("row {i} has length {}", row.len())));
            }
            if row[i] != NValue::ONE {
                return Err(Error::InvalidLambda(format!("diagonal entry {i} is {}", row[i])));
            }
            for j in 0..i {
                if row[j] != rows[j][i] {
                    return Err(Error::InvalidLambda(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(Self { rows })
    }

    /// All ones except the listed pairs.
    pub fn from_pairs(k: usize, pairs: &[((usize, usize), NValue)]) -> Result<Self> {
        let mut rows = vec![vec![NValue::ONE; k]; k];
        for &((i, j), v) in pairs {
            if i == j || i >= k || j >= k {
                return Err(Error::InvalidLambda(format!("pair ({i},{j}) for k={k}")));
            }
            rows[i][j] = v;
            rows[j][i] = v;
        }
        Self::new(rows)
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> NValue {
        self.rows[i][j]
    }
}

impl TryFrom<Vec<Vec<NValue>>> for LambdaMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<NValue>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<LambdaMatrix> for Vec<Vec<NValue>> {
    fn from(m: LambdaMatrix) -> Self {
        m.rows
    }
}

/// Which masa of a gadget an index receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    A,
    B,
    C,
}

/// One gadget, built for the pair `(i, j)` with parameter `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gadget {
    pub pair: (usize, usize),
    pub n: NValue,
    pub roles: Vec<Role>,
}

impl Gadget {
    /// Mixed invariant of the masas this gadget hands to indices `a`, `b`.
    pub fn mixed(&self, a: usize, b: usize) -> NSet {
        let (ra, rb) = (self.roles[a], self.roles[b]);
        if a != b && matches!((ra, rb), (Role::A, Role::B) | (Role::B, Role::A)) {
            match self.n {
                NValue::Fin(n) => NSet::singleton(NValue::Fin(n)),
                // The ∞ gadget is an infinite tensor product of n = 2 gadgets.
                NValue::Inf => tensor_mixed_infinite(&[NSet::singleton(NValue::Fin(2))], false)
                    .expect("singleton factors"),
            }
        } else {
            NSet::one()
        }
    }
}

/// Tensor product over all pairs of the per-pair gadgets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyPlan {
    pub size: usize,
    pub gadgets: Vec<Gadget>,
}

impl FamilyPlan {
    /// `puk(D_a, D_b)` as the product over gadgets.
    pub fn evaluate_pair(&self, a: usize, b: usize) -> NSet {
        let factors: Vec<NSet> = self.gadgets.iter().map(|g| g.mixed(a, b)).collect();
        tensor_mixed(&factors)
    }

    /// The full pairwise table, diagonal included.
    pub fn table(&self) -> Vec<Vec<NSet>> {
        (0..self.size)
            .map(|a| (0..self.size).map(|b| self.evaluate_pair(a, b)).collect())
            .collect()
    }
}

pub fn countable_family_plan(lambda: &LambdaMatrix) -> Result<FamilyPlan> {
    let k = lambda.size();
    let mut gadgets = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let roles = (0..k)
                .map(|t| match t {
                    t if t == i => Role::A,
                    t if t == j => Role::B,
                    _ => Role::C,
                })
                .collect();
            gadgets.push(Gadget {
                pair: (i, j),
                n: lambda.get(i, j),
                roles,
            });
        }
    }
    Ok(FamilyPlan { size: k, gadgets })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair() {
        let l = LambdaMatrix::from_pairs(2, &[((0, 1), NValue::Fin(5))]).unwrap();
        let plan = countable_family_plan(&l).unwrap();
        assert_eq!(plan.gadgets.len(), 1);
        assert_eq!(plan.gadgets[0].n, NValue::Fin(5));
        assert_eq!(plan.evaluate_pair(0, 1), NSet::singleton(NValue::Fin(5)));
    }

    #[test]
    fn figure_four_table() {
        let three = NValue::Fin(3);
        let l = LambdaMatrix::from_pairs(4, &[((0, 1), three), ((2, 3), three)]).unwrap();
        let table = countable_family_plan(&l).unwrap().table();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(table[a][b], NSet::singleton(l.get(a, b)));
            }
        }
    }

    #[test]
    fn infinite_entry() {
        let l = LambdaMatrix::from_pairs(3, &[((1, 2), NValue::Inf)]).unwrap();
        let plan = countable_family_plan(&l).unwrap();
        assert_eq!(plan.evaluate_pair(2, 1), NSet::infinity());
        assert_eq!(plan.evaluate_pair(0, 1), NSet::one());
    }

    #[test]
    fn invalid_matrices() {
        let two = NValue::Fin(2);
        assert!(LambdaMatrix::new(vec![vec![two]]).is_err());
        assert!(LambdaMatrix::new(vec![vec![NValue::ONE, two], vec![NValue::ONE, NValue::ONE]]).is_err());
        let json = "[[\"1\",\"3\"],[\"3\",\"1\"]]";
        let l: LambdaMatrix = serde_json::from_str(json).unwrap();
        assert_eq!(l.get(1, 0), NValue::Fin(3));
    }
}
