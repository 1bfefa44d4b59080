//! Multi-index sets `I^{(r)}_m`, their restriction maps, sibling pairs, and
//! the Λ data attached to sibling pairs.
//!
//! An element of `I^{(r)}_m` is a tuple of bit sequences `(i⁰, …, iʳ)` with
//! `iᵗ` of length `m + r − t`. Each sequence is packed MSB-first into a word,
//! and the tuple into a single `u64` key with `i⁰` most significant, so that
//! integer order on keys is lexicographic order on tuples.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nset::{NSet, NValue};

/// Largest `log₂ |I^{(r)}_m|` that [`enumerate`] will walk.
pub const MAX_ENUMERATION_BITS: u32 = 24;

/// A bit sequence of length ≤ 63, first bit most significant.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitSeq {
    len: u8,
    bits: u64,
}

impl BitSeq {
    pub fn new(len: usize, bits: u64) -> Result<Self> {
        if len > 63 {
            return Err(Error::Overflow(format!("bit sequence of length {len}")));
        }
        if bits >> len != 0 {
            return Err(Error::InvalidInput(format!("{bits:#b} has more than {len} bits")));
        }
        Ok(Self { len: len as u8, bits })
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    /// Bit `k`, counting from the start of the sequence.
    pub fn get(self, k: usize) -> u8 {
        assert!(k < self.len());
        ((self.bits >> (self.len() - 1 - k)) & 1) as u8
    }

    /// The first `l` bits.
    pub fn truncate(self, l: usize) -> BitSeq {
        assert!(l <= self.len());
        BitSeq {
            len: l as u8,
            bits: self.bits >> (self.len() - l),
        }
    }

    pub fn push(self, bit: u8) -> BitSeq {
        assert!(self.len < 63);
        BitSeq {
            len: self.len + 1,
            bits: (self.bits << 1) | u64::from(bit & 1),
        }
    }

    /// The dyadic interval `[b/2^L, (b+1)/2^L)` coded by this sequence.
    pub fn interval(self) -> (Ratio<u64>, Ratio<u64>) {
        let den = 1u64 << self.len;
        (Ratio::new(self.bits, den), Ratio::new(self.bits + 1, den))
    }
}

impl Ord for BitSeq {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.len.min(other.len) as usize;
        self.truncate(l)
            .bits
            .cmp(&other.truncate(l).bits)
            .then(self.len.cmp(&other.len))
    }
}

impl PartialOrd for BitSeq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len() {
            write!(f, "{}", self.get(k))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = BitSeq { len: 0, bits: 0 };
        for ch in s.chars() {
            let bit = match ch {
                '0' => 0,
                '1' => 1,
                _ => return Err(Error::Parse(format!("bad bit {ch:?} in {s:?}"))),
            };
            if out.len == 63 {
                return Err(Error::Overflow(format!("bit string {s:?} too long")));
            }
            out = out.push(bit);
        }
        Ok(out)
    }
}

/// `log₂ |I^{(r)}_m| = (r+1)m + r(r+1)/2`.
pub fn index_bits(r: usize, m: usize) -> usize {
    (r + 1) * m + r * (r + 1) / 2
}

/// `|I^{(r)}_m|`.
pub fn count(r: usize, m: usize) -> Result<u64> {
    if m == 0 {
        return Err(Error::RangeError("m must be at least 1".into()));
    }
    let bits = index_bits(r, m);
    if bits >= 64 {
        return Err(Error::Overflow(format!("|I^({r})_{m}| = 2^{bits}")));
    }
    Ok(1u64 << bits)
}

/// An element of `I^{(r)}_m`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    seqs: Vec<BitSeq>,
}

impl MultiIndex {
    pub fn new(seqs: Vec<BitSeq>) -> Result<Self> {
        let last = seqs
            .last()
            .ok_or(Error::InvalidInput("a multi-index needs at least one sequence".into()))?;
        if last.is_empty() {
            return Err(Error::InvalidInput("the last sequence must be non-empty".into()));
        }
        for w in seqs.windows(2) {
            if w[0].len() != w[1].len() + 1 {
                return Err(Error::InvalidInput(format!(
                    "sequence lengths must drop by one: {seqs:?}"
                )));
            }
        }
        if index_bits(seqs.len() - 1, last.len()) >= 64 {
            return Err(Error::Overflow(format!("multi-index {seqs:?} too large")));
        }
        Ok(Self { seqs })
    }

    pub fn from_strs<S: AsRef<str>>(parts: &[S]) -> Result<Self> {
        Self::new(
            parts
                .iter()
                .map(|p| p.as_ref().parse())
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.seqs.iter().map(|s| s.to_string()).collect()
    }

    /// Inverse of [`MultiIndex::key`].
    pub fn from_key(r: usize, m: usize, mut key: u64) -> Self {
        let mut seqs = vec![BitSeq { len: 0, bits: 0 }; r + 1];
        for t in (0..=r).rev() {
            let len = m + r - t;
            seqs[t] = BitSeq {
                len: len as u8,
                bits: key & ((1u64 << len) - 1),
            };
            key >>= len;
        }
        Self { seqs }
    }

    pub fn r(&self) -> usize {
        self.seqs.len() - 1
    }

    pub fn m(&self) -> usize {
        self.seqs.last().unwrap().len()
    }

    pub fn seqs(&self) -> &[BitSeq] {
        &self.seqs
    }

    /// Packed key; integer order equals lexicographic order within `I^{(r)}_m`.
    pub fn key(&self) -> u64 {
        self.seqs
            .iter()
            .fold(0u64, |acc, s| (acc << s.len()) | s.bits())
    }

    /// Restriction to `I^{(s)}_l`.
    pub fn restrict(&self, s: usize, l: usize) -> Result<MultiIndex> {
        let (r, m) = (self.r(), self.m());
        if s > r || l == 0 || l > m + r - s {
            return Err(Error::RangeError(format!(
                "cannot restrict I^({r})_{m} to I^({s})_{l}"
            )));
        }
        Ok(MultiIndex {
            seqs: (0..=s).map(|t| self.seqs[t].truncate(l + s - t)).collect(),
        })
    }

    /// `self ≥ k`: the restriction of `self` to the set of `k` is `k`.
    pub fn geq(&self, k: &MultiIndex) -> bool {
        self.restrict(k.r(), k.m()).is_ok_and(|x| &x == k)
    }

    /// `i|_s`, the restriction to `I^{(s)}_1`; `s = −1` gives the common root.
    pub fn pipe(&self, s: isize) -> Result<Restriction> {
        match s {
            -1 => Ok(Restriction::Root),
            s if s < -1 => Err(Error::RangeError(format!("pipe level {s}"))),
            s => Ok(Restriction::Index(self.restrict(s as usize, 1)?)),
        }
    }

    /// `i|_0` as a bit: the branch `𝟎` or `𝟏` the index lies under.
    pub fn branch(&self) -> u8 {
        self.seqs[0].get(0)
    }

    /// The `2^{r+1}` indices of `I^{(r)}_{m+1}` above `self`.
    pub fn children(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        let n = self.seqs.len();
        (0u64..1 << n).map(move |c| MultiIndex {
            seqs: self
                .seqs
                .iter()
                .enumerate()
                .map(|(t, s)| s.push(((c >> (n - 1 - t)) & 1) as u8))
                .collect(),
        })
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.seqs.cmp(&other.seqs)
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, s) in self.seqs.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<String>::deserialize(d)?;
        MultiIndex::from_strs(&parts).map_err(serde::de::Error::custom)
    }
}

/// Value of `i|_s`, with `i|_{-1}` the same root for every index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Restriction {
    Root,
    Index(MultiIndex),
}

/// All of `I^{(r)}_m` in lexicographic order.
pub fn enumerate(r: usize, m: usize) -> Result<impl Iterator<Item = MultiIndex>> {
    let n = count(r, m)?;
    let bits = index_bits(r, m) as u32;
    if bits > MAX_ENUMERATION_BITS {
        return Err(Error::Overflow(format!(
            "|I^({r})_{m}| = 2^{bits} exceeds the enumeration guard 2^{MAX_ENUMERATION_BITS}"
        )));
    }
    Ok((0..n).map(move |k| MultiIndex::from_key(r, m, k)))
}

/// An unordered sibling pair at level `r`, stored with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SiblingPair {
    pub r: usize,
    pub i: MultiIndex,
    pub j: MultiIndex,
}

/// Which branches the two indices of a pair lie under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quadrant {
    /// Both under `𝟎`.
    Zero,
    /// Both under `𝟏`.
    One,
    Mixed,
}

impl SiblingPair {
    pub fn quadrant(&self) -> Quadrant {
        match (self.i.branch(), self.j.branch()) {
            (0, 0) => Quadrant::Zero,
            (1, 1) => Quadrant::One,
            _ => Quadrant::Mixed,
        }
    }
}

/// Number of sibling pairs at level `r`.
pub fn sibling_pair_count(r: usize) -> Result<u64> {
    if r == 0 {
        return Ok(1);
    }
    let fiber = 1u64 << (r + 1);
    Ok(count(r - 1, 1)? * (fiber * (fiber - 1) / 2))
}

/// Number of sibling pairs at level `r` in quadrant `q`.
pub fn quadrant_pair_count(r: usize, q: Quadrant) -> Result<u64> {
    Ok(match (r, q) {
        (0, Quadrant::Mixed) => 1,
        (0, _) => 0,
        (_, Quadrant::Mixed) => 0,
        _ => sibling_pair_count(r)? / 2,
    })
}

/// Sibling pairs `{i, j} ⊂ I^{(r)}_1`, `i|_{r−1} = j|_{r−1}`, in canonical
/// order: lexicographic in `(i, j)` with `i < j`.
pub fn sibling_pairs(r: usize) -> Result<SiblingPairs> {
    let n = count(r, 1)?;
    // The bits of a key that are not seen by restriction to I^{(r-1)}_1: the
    // last bit of each sequence. They are scattered in increasing order.
    let mut free = Vec::with_capacity(r + 1);
    let mut offset = 0;
    for t in (0..=r).rev() {
        free.push(offset as u32);
        offset += 1 + r - t;
    }
    free.reverse();
    let free_mask = free.iter().fold(0u64, |m, &p| m | 1 << p);
    Ok(SiblingPairs {
        r,
        n,
        free,
        free_mask,
        i: 0,
        c: 0,
    })
}

/// Streaming iterator returned by [`sibling_pairs`].
#[derive(Debug, Clone)]
pub struct SiblingPairs {
    r: usize,
    n: u64,
    free: Vec<u32>,
    free_mask: u64,
    i: u64,
    c: u64,
}

impl SiblingPairs {
    fn scatter(&self, c: u64) -> u64 {
        let k = self.free.len();
        self.free
            .iter()
            .enumerate()
            .fold(0u64, |acc, (t, &p)| acc | (((c >> (k - 1 - t)) & 1) << p))
    }
}

impl Iterator for SiblingPairs {
    type Item = SiblingPair;

    fn next(&mut self) -> Option<SiblingPair> {
        let fiber = 1u64 << self.free.len();
        while self.i < self.n {
            let base = self.i & !self.free_mask;
            while self.c < fiber {
                let j = base | self.scatter(self.c);
                self.c += 1;
                if j > self.i {
                    return Some(SiblingPair {
                        r: self.r,
                        i: MultiIndex::from_key(self.r, 1, self.i),
                        j: MultiIndex::from_key(self.r, 1, j),
                    });
                }
            }
            self.i += 1;
            self.c = 0;
        }
        None
    }
}

/// The canonical pair stream over levels `0..=r_max`.
pub fn canonical_pairs(r_max: usize) -> Result<impl Iterator<Item = SiblingPair>> {
    let levels = (0..=r_max).map(sibling_pairs).collect::<Result<Vec<_>>>()?;
    Ok(levels.into_iter().flatten())
}

/// The symbol `f^{(r,m)}_i` with its exact trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionSymbol {
    pub index: MultiIndex,
    pub trace: Ratio<u64>,
}

impl ProjectionSymbol {
    pub fn new(index: MultiIndex) -> Self {
        let trace = Ratio::new(1, count(index.r(), index.m()).expect("valid index"));
        Self { index, trace }
    }
}

type Interval = (Ratio<u64>, Ratio<u64>);

/// Model of `f^{(r,m)}_i` as a product of dyadic intervals in `[0,1)^dims`,
/// coordinate `t` carrying `iᵗ` and the remaining coordinates full.
fn box_of(i: &MultiIndex, dims: usize) -> Vec<Interval> {
    let full = (Ratio::from_integer(0), Ratio::from_integer(1));
    (0..dims)
        .map(|t| i.seqs().get(t).map_or(full, |s| s.interval()))
        .collect()
}

fn volume(b: &[Interval]) -> Ratio<u64> {
    b.iter().fold(Ratio::from_integer(1), |acc, (lo, hi)| acc * (hi - lo))
}

fn contained(inner: &[Interval], outer: &[Interval]) -> bool {
    inner
        .iter()
        .zip(outer)
        .all(|((a, b), (c, d))| c <= a && b <= d)
}

fn disjoint(x: &[Interval], y: &[Interval]) -> bool {
    x.iter().zip(y).any(|((a, b), (c, d))| b <= c || d <= a)
}

/// Outcome of [`glue_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlueReport {
    pub r_max: usize,
    pub m_max: usize,
    pub symbols_checked: u64,
    pub condition_i: bool,
    pub condition_ii: bool,
    pub condition_iii: bool,
    pub dyadic: bool,
    pub failures: Vec<String>,
}

impl GlueReport {
    pub fn passed(&self) -> bool {
        self.condition_i && self.condition_ii && self.condition_iii && self.dyadic
    }
}

/// Pairwise comparisons are only done for families at most this large.
const PAIRWISE_LIMIT: u64 = 512;

/// Verifies the trace, refinement and cross-level conditions on the family
/// `f^{(r,m)}_i`, in exact rational arithmetic, for `r ≤ r_max`, `m ≤ m_max`.
pub fn glue_check(r_max: usize, m_max: usize) -> Result<GlueReport> {
    if m_max == 0 {
        return Err(Error::RangeError("m_max must be at least 1".into()));
    }
    let mut rep = GlueReport {
        r_max,
        m_max,
        symbols_checked: 0,
        condition_i: true,
        condition_ii: true,
        condition_iii: true,
        dyadic: true,
        failures: Vec::new(),
    };
    let one = Ratio::from_integer(1u64);

    // (i) each symbol has trace |I|⁻¹, they are disjoint and fill the cube.
    for r in 0..=r_max {
        for m in 1..=m_max {
            let n = count(r, m)?;
            let expected = Ratio::new(1, n);
            let mut total = Ratio::from_integer(0);
            let mut boxes = Vec::new();
            for i in enumerate(r, m)? {
                let b = box_of(&i, r + 1);
                let sym = ProjectionSymbol::new(i.clone());
                let v = volume(&b);
                if v != expected || sym.trace != expected {
                    rep.condition_i = false;
                    rep.failures.push(format!("(i) trace of {i:?} is {v}"));
                }
                total += v;
                rep.symbols_checked += 1;
                if n <= PAIRWISE_LIMIT {
                    boxes.push(b);
                }
            }
            if total != one {
                rep.condition_i = false;
                rep.failures.push(format!("(i) traces at ({r},{m}) sum to {total}"));
            }
            for (a, x) in boxes.iter().enumerate() {
                if boxes[a + 1..].iter().any(|y| !disjoint(x, y)) {
                    rep.condition_i = false;
                    rep.failures.push(format!("(i) overlap at ({r},{m})"));
                    break;
                }
            }
        }
    }

    // (ii) f^{(s,m)}_i is the sum of f^{(s,m+1)}_j over j ≥ i.
    for s in 0..=r_max {
        for m in 1..=m_max {
            let ratio = count(s, m + 1)? / count(s, m)?;
            let mut covered = 0u64;
            for i in enumerate(s, m)? {
                let bi = box_of(&i, s + 1);
                let kids: Vec<_> = i.children().collect();
                covered += kids.len() as u64;
                let boxes: Vec<_> = kids.iter().map(|j| box_of(j, s + 1)).collect();
                let sum = boxes.iter().map(|b| volume(b)).sum::<Ratio<u64>>();
                let ok = kids.len() as u64 == ratio
                    && kids.iter().all(|j| j.geq(&i))
                    && boxes.iter().all(|b| contained(b, &bi))
                    && sum == volume(&bi)
                    && pairwise_disjoint(&boxes);
                if !ok {
                    rep.condition_ii = false;
                    rep.failures.push(format!("(ii) fiber over {i:?} at ({s},{m})"));
                }
            }
            if covered != count(s, m + 1)? {
                rep.condition_ii = false;
                rep.failures.push(format!("(ii) fibers at ({s},{m}) do not partition"));
            }
        }
    }

    // (iii) f^{(s,m+t−s)}_i is the sum of f^{(t,m)}_j over j ≥ i, and the
    // box of f^{(t,m)}_j factors through its restriction to I^{(t−1)}_{m+1}.
    for t in 0..=r_max {
        for s in 0..=t {
            for m in 1..=m_max {
                let l = m + t - s;
                let ratio = count(t, m)? / count(s, l)?;
                let free = index_bits(t, m) - index_bits(s, l);
                for i in enumerate(s, l)? {
                    let bi = box_of(&i, t + 1);
                    let mut sum = Ratio::from_integer(0);
                    let mut ok = true;
                    let mut size = 0u64;
                    for tail in 0u64..1 << free {
                        let j = MultiIndex::from_key(t, m, (i.key() << free) | tail);
                        let bj = box_of(&j, t + 1);
                        ok &= j.geq(&i) && contained(&bj, &bi);
                        if t > 0 {
                            let jp = j.restrict(t - 1, m + 1)?;
                            let mut factored = box_of(&jp, t + 1);
                            factored[t] = j.seqs()[t].interval();
                            ok &= factored == bj;
                        }
                        sum += volume(&bj);
                        size += 1;
                    }
                    if !ok || size != ratio || sum != volume(&bi) {
                        rep.condition_iii = false;
                        rep.failures
                            .push(format!("(iii) fiber over {i:?} from level {t}, m={m}"));
                    }
                }
            }
        }
    }

    // Dyadic splitting: interval(b) = interval(b0) ⊔ interval(b1).
    for len in 0..(m_max + r_max) {
        for bits in 0u64..1 << len {
            let b = BitSeq::new(len, bits)?;
            let (lo, hi) = b.interval();
            let (l0, h0) = b.push(0).interval();
            let (l1, h1) = b.push(1).interval();
            if !(lo == l0 && h0 == l1 && h1 == hi) {
                rep.dyadic = false;
                rep.failures.push(format!("dyadic split of {b}"));
            }
        }
    }
    Ok(rep)
}

fn pairwise_disjoint(boxes: &[Vec<Interval>]) -> bool {
    boxes
        .iter()
        .enumerate()
        .all(|(a, x)| boxes[a + 1..].iter().all(|y| disjoint(x, y)))
}

/// Per-quadrant value cycles for the direct-sum planner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrantRules {
    pub zero: NSet,
    pub one: NSet,
    pub mixed: NSet,
}

impl QuadrantRules {
    pub fn get(&self, q: Quadrant) -> &NSet {
        match q {
            Quadrant::Zero => &self.zero,
            Quadrant::One => &self.one,
            Quadrant::Mixed => &self.mixed,
        }
    }
}

/// One explicit value for a sibling pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaOverride {
    pub r: usize,
    pub i: MultiIndex,
    pub j: MultiIndex,
    pub value: NValue,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    default: NValue,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    overrides: Vec<LambdaOverride>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    enumerate: Option<NSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quadrant_rules: Option<QuadrantRules>,
}

/// Symmetric values `Λ^{(r)}_{i,j}` on sibling pairs.
///
/// Lookup order for a pair: an override, then the quadrant rule, then the
/// cyclic enumeration, then the default. Quadrant rules cycle through their
/// set separately within each quadrant; the enumeration cycles over the
/// global canonical pair stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct LambdaSpec {
    default: NValue,
    overrides: Vec<LambdaOverride>,
    enumeration: Option<NSet>,
    quadrant_rules: Option<QuadrantRules>,
    #[serde(skip)]
    lookup: HashMap<(usize, u64, u64), NValue>,
}

impl From<LambdaSpec> for RawSpec {
    fn from(s: LambdaSpec) -> Self {
        RawSpec {
            default: s.default,
            overrides: s.overrides,
            enumerate: s.enumeration,
            quadrant_rules: s.quadrant_rules,
        }
    }
}

impl TryFrom<RawSpec> for LambdaSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let mut spec = LambdaSpec::constant(raw.default);
        for o in raw.overrides {
            spec = spec.with_override(o.r, o.i, o.j, o.value)?;
        }
        if let Some(e) = raw.enumerate {
            spec = spec.with_enumeration(e)?;
        }
        if let Some(q) = raw.quadrant_rules {
            spec = spec.with_quadrant_rules(q)?;
        }
        Ok(spec)
    }
}

/// A value assigned to one sibling pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub pair: SiblingPair,
    pub value: NValue,
}

impl LambdaSpec {
    pub fn constant(v: NValue) -> Self {
        Self {
            default: v,
            overrides: Vec::new(),
            enumeration: None,
            quadrant_rules: None,
            lookup: HashMap::new(),
        }
    }

    pub fn with_override(
        mut self,
        r: usize,
        i: MultiIndex,
        j: MultiIndex,
        value: NValue,
    ) -> Result<Self> {
        check_sibling(r, &i, &j)?;
        let (a, b) = ordered(&i, &j);
        if self.lookup.insert((r, a.key(), b.key()), value).is_some() {
            return Err(Error::InvalidLambda(format!(
                "duplicate override at r={r} for {i:?}, {j:?}"
            )));
        }
        self.overrides.push(LambdaOverride { r, i, j, value });
        Ok(self)
    }

    pub fn with_enumeration(mut self, e: NSet) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::EmptyInput("enumeration set"));
        }
        self.enumeration = Some(e);
        Ok(self)
    }

    pub fn with_quadrant_rules(mut self, q: QuadrantRules) -> Result<Self> {
        if q.zero.is_empty() || q.one.is_empty() || q.mixed.is_empty() {
            return Err(Error::EmptyInput("quadrant rule set"));
        }
        self.quadrant_rules = Some(q);
        Ok(self)
    }

    pub fn default_value(&self) -> NValue {
        self.default
    }

    pub fn overrides(&self) -> &[LambdaOverride] {
        &self.overrides
    }

    pub fn enumeration(&self) -> Option<&NSet> {
        self.enumeration.as_ref()
    }

    pub fn quadrant_rules(&self) -> Option<&QuadrantRules> {
        self.quadrant_rules.as_ref()
    }

    /// Values on the canonical pair stream up to level `r_max`.
    pub fn assignments(&self, r_max: usize) -> Result<Assignments<'_>> {
        Ok(Assignments {
            spec: self,
            pairs: Box::new(canonical_pairs(r_max)?),
            global: 0,
            per_quadrant: [0; 3],
        })
    }

    fn resolve(&self, pair: &SiblingPair, global: usize, per_quadrant: &mut [usize; 3]) -> NValue {
        let q = pair.quadrant();
        let slot = &mut per_quadrant[q as usize];
        let k = *slot;
        *slot += 1;
        if let Some(&v) = self.lookup.get(&(pair.r, pair.i.key(), pair.j.key())) {
            return v;
        }
        if let Some(rules) = &self.quadrant_rules {
            let set = rules.get(q);
            return set.to_vec()[k % set.len()];
        }
        if let Some(e) = &self.enumeration {
            return e.to_vec()[global % e.len()];
        }
        self.default
    }

    /// `Λ^{(r)}_{i,j}`, symmetric in `i, j`.
    pub fn value(&self, r: usize, i: &MultiIndex, j: &MultiIndex) -> Result<NValue> {
        check_sibling(r, i, j)?;
        let (a, b) = ordered(i, j);
        let mut global = 0usize;
        let mut per_quadrant = [0usize; 3];
        for s in 0..r {
            global += sibling_pair_count(s)? as usize;
            for q in [Quadrant::Zero, Quadrant::One, Quadrant::Mixed] {
                per_quadrant[q as usize] += quadrant_pair_count(s, q)? as usize;
            }
        }
        for pair in sibling_pairs(r)? {
            let hit = &pair.i == a && &pair.j == b;
            let v = self.resolve(&pair, global, &mut per_quadrant);
            if hit {
                return Ok(v);
            }
            global += 1;
        }
        unreachable!("checked sibling pair not emitted")
    }

    /// Λ values that may be assigned to pairs above level `r_max`.
    pub fn values_beyond(&self, r_max: usize) -> NSet {
        let mut out: NSet = self
            .overrides
            .iter()
            .filter(|o| o.r > r_max)
            .map(|o| o.value)
            .collect();
        if let Some(rules) = &self.quadrant_rules {
            // Mixed pairs exist only at level 0.
            out.extend_from(&rules.zero);
            out.extend_from(&rules.one);
        } else if let Some(e) = &self.enumeration {
            out.extend_from(e);
        } else {
            out.insert(self.default);
        }
        out
    }

    /// Pretty JSON text; parsing it back gives an equal spec.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn ordered<'a>(i: &'a MultiIndex, j: &'a MultiIndex) -> (&'a MultiIndex, &'a MultiIndex) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Errors unless `{i, j}` is a sibling pair at level `r`.
pub fn check_sibling(r: usize, i: &MultiIndex, j: &MultiIndex) -> Result<()> {
    for x in [i, j] {
        if x.r() != r || x.m() != 1 {
            return Err(Error::InvalidLambda(format!("{x:?} is not in I^({r})_1")));
        }
    }
    if i == j {
        return Err(Error::InvalidLambda(format!("{i:?} paired with itself")));
    }
    if i.pipe(r as isize - 1)? != j.pipe(r as isize - 1)? {
        return Err(Error::InvalidLambda(format!("{i:?} and {j:?} are not siblings")));
    }
    Ok(())
}

/// Iterator returned by [`LambdaSpec::assignments`].
pub struct Assignments<'a> {
    spec: &'a LambdaSpec,
    pairs: Box<dyn Iterator<Item = SiblingPair> + 'a>,
    global: usize,
    per_quadrant: [usize; 3],
}

impl Iterator for Assignments<'_> {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        let pair = self.pairs.next()?;
        let value = self.spec.resolve(&pair, self.global, &mut self.per_quadrant);
        self.global += 1;
        Some(Assignment { pair, value })
    }
}
