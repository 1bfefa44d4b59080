//! Acceptance gate. Runs as a plain binary and prints one verdict per
//! criterion; exits non-zero when any criterion fails.
//!
//! Expected values come from constructions written here against nalgebra
//! directly, from closed-form counts, or from the reference diagrams.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use puk_core::algebra::generate_algebra_in;
use puk_core::constructions::checks::keyclaim_value;
use puk_core::constructions::{
    countable_family_plan, family_span_check, intertwiner_check, keyclaim_check, LambdaMatrix,
};
use puk_core::index_sets::{count, enumerate, glue_check, sibling_pair_count, sibling_pairs};
use puk_core::puk::{choose_lambda_for_e, choose_lambda_for_efg, cor_plan_1_in_puk, eval_quadrants};
use puk_core::{
    commutant, diagram_from_construction, eval_construction, finite_puk_spectrum, generate_algebra,
    minimal_projections, mixed_spectrum, nset_product, tensor_mixed, tensor_mixed_infinite,
    ComplexMatrix, CutdownOracle, GnsSpace, LambdaSpec, MultiIndex, NSet, NValue, ResourceGuard,
    TracedAlgebraShape,
};

type Mat = DMatrix<Complex64>;
type M = ComplexMatrix<f64>;

const TOL: f64 = 1e-10;

struct Verdict {
    label: String,
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(label: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            pass,
            detail: detail.into(),
        }
    }
}

fn s(t: &str) -> NSet {
    t.parse().expect("valid set literal")
}

fn guard() -> ResourceGuard {
    ResourceGuard::new(1 << 20)
}

// ---------------------------------------------------------------------------
// Independent shift gadget, written against nalgebra only.

fn zeros(d: usize) -> Mat {
    Mat::from_element(d, d, Complex64::new(0.0, 0.0))
}

fn eye(d: usize) -> Mat {
    Mat::identity(d, d)
}

fn unit_proj(n: usize, i: usize) -> Mat {
    let mut e = zeros(n);
    e[(i, i)] = Complex64::new(1.0, 0.0);
    e
}

/// `w e_j w* = e_{j−1}`.
fn shift(n: usize) -> Mat {
    let mut w = zeros(n);
    for j in 0..n {
        w[((j + n - 1) % n, j)] = Complex64::new(1.0, 0.0);
    }
    w
}

/// Rank-one projections onto the eigenvectors of `shift(n)`.
fn fourier(n: usize) -> Vec<Mat> {
    (0..n)
        .map(|k| {
            let phi = nalgebra::DVector::from_fn(n, |l, _| {
                Complex64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * std::f64::consts::PI * (k * l) as f64 / n as f64)
            });
            &phi * phi.adjoint()
        })
        .collect()
}

fn kron_all(factors: &[Mat]) -> Mat {
    factors.iter().skip(1).fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// `Σ_k w^k ⊗ f_k`.
fn gadget_v(n: usize) -> Mat {
    let w = shift(n);
    let f = fourier(n);
    let mut wk = eye(n);
    let mut v = zeros(n * n);
    for fk in &f {
        v += wk.kronecker(fk);
        wk = &w * &wk;
    }
    v
}

/// `u₁ u₂ ⋯ u_m` on `M_n^{⊗(m+1)}`.
fn theta_unitary(n: usize, m: usize) -> Mat {
    let slots = m + 1;
    let v = gadget_v(n);
    let mut u = eye(n.pow(slots as u32));
    for r in 1..=m {
        let left = eye(n.pow(r as u32 - 1));
        let right = eye(n.pow((slots - r - 1) as u32));
        u = &u * kron_all(&[left, v.clone(), right]);
    }
    u
}

fn words(n: usize, m: usize) -> Vec<Vec<usize>> {
    (0..n.pow(m as u32))
        .map(|mut k| {
            let mut w = vec![0; m];
            for t in (0..m).rev() {
                w[t] = k % n;
                k /= n;
            }
            w
        })
        .collect()
}

fn e_word(n: usize, word: &[usize], slots: usize) -> Mat {
    let parts: Vec<Mat> = (0..slots)
        .map(|t| word.get(t).map_or_else(|| eye(n), |&i| unit_proj(n, i)))
        .collect();
    kron_all(&parts)
}

fn ntrace(x: &Mat) -> Complex64 {
    x.trace() / Complex64::new(x.nrows() as f64, 0.0)
}

/// Worst deviation of `tr(F_s* e_I F_r θ(e_J))` from `δ_rs n^{−(2m+1)}`.
fn keyclaim_oracle(n: usize, m: usize) -> f64 {
    let slots = m + 1;
    let u = theta_unitary(n, m);
    let f = fourier(n);
    let fs: Vec<Mat> = (0..n)
        .map(|r| kron_all(&[f[r].clone(), eye(n.pow(m as u32))]))
        .collect();
    let target = (n as f64).powi(-(2 * m as i32 + 1));
    let mut worst = 0.0f64;
    for jw in words(n, m) {
        let th = &u * e_word(n, &jw, slots) * u.adjoint();
        for iw in words(n, m) {
            let ei = e_word(n, &iw, slots);
            for r in 0..n {
                let x = &ei * &fs[r] * &th;
                for sidx in 0..n {
                    let val = ntrace(&(fs[sidx].adjoint() * &x));
                    let want = if r == sidx { target } else { 0.0 };
                    worst = worst.max((val - Complex64::new(want, 0.0)).norm());
                }
            }
        }
    }
    worst
}

const KEYCLAIM_CASES: [(usize, usize); 7] = [(2, 0), (2, 1), (2, 2), (2, 3), (3, 0), (3, 1), (3, 2)];

fn criterion_1() -> Vec<Verdict> {
    let start = Instant::now();
    let mut lib_worst = 0.0f64;
    let mut errors = Vec::new();
    for &(n, m) in &KEYCLAIM_CASES {
        match keyclaim_check::<f64>(n, m, guard()) {
            Ok(rep) => lib_worst = lib_worst.max(rep.max_deviation),
            Err(e) => errors.push(format!("n={n} m={m}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let oracle_worst = KEYCLAIM_CASES
        .iter()
        .map(|&(n, m)| keyclaim_oracle(n, m))
        .fold(0.0f64, f64::max);

    // Pointwise agreement between the library and the oracle on a spread of tuples.
    let mut cross = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &(n, m) in &KEYCLAIM_CASES {
        let u = theta_unitary(n, m);
        let f = fourier(n);
        for _ in 0..6 {
            let i: Vec<usize> = (0..m).map(|_| rng.random_range(0..n)).collect();
            let j: Vec<usize> = (0..m).map(|_| rng.random_range(0..n)).collect();
            let (r, sidx) = (rng.random_range(0..n), rng.random_range(0..n));
            let lib = keyclaim_value::<f64>(n, &i, &j, r, sidx, guard()).expect("in range");
            let fr = kron_all(&[f[r].clone(), eye(n.pow(m as u32))]);
            let fsm = kron_all(&[f[sidx].clone(), eye(n.pow(m as u32))]);
            let th = &u * e_word(n, &j, m + 1) * u.adjoint();
            let want = ntrace(&(fsm.adjoint() * e_word(n, &i, m + 1) * fr * th));
            cross = cross.max((Complex64::new(lib.re, lib.im) - want).norm());
        }
    }

    let pass = errors.is_empty()
        && lib_worst < TOL
        && oracle_worst < TOL
        && cross < TOL
        && elapsed < Duration::from_secs(30);
    vec![Verdict::new(
        "1",
        pass,
        format!(
            "library max dev {lib_worst:.2e}, oracle max dev {oracle_worst:.2e}, pointwise gap {cross:.2e}, sweep {:.2}s{}",
            elapsed.as_secs_f64(),
            if errors.is_empty() { String::new() } else { format!(", errors: {errors:?}") }
        ),
    )]
}

// ---------------------------------------------------------------------------

const SPAN_CASES: [(usize, usize); 5] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)];

fn criterion_2() -> Vec<Verdict> {
    let mut pass = true;
    let mut notes = Vec::new();
    for &(n, m) in &SPAN_CASES {
        let full = n.pow(2 * m as u32);
        match family_span_check::<f64>(n, m, guard()) {
            Ok(rep) => {
                let ok = rep.count == full
                    && rep.rank == full
                    && rep.min_gram_diagonal > TOL
                    && rep.max_offdiagonal < TOL;
                pass &= ok;
                notes.push(format!("n={n} m={m}: {}/{} rank {} off {:.1e}", rep.count, full, rep.rank, rep.max_offdiagonal));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("n={n} m={m}: {e}"));
            }
        }
    }
    vec![Verdict::new("2", pass, notes.join("; "))]
}

fn criterion_3() -> Vec<Verdict> {
    let mut pass = true;
    let mut pairs = 0;
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for &(n, m) in &KEYCLAIM_CASES {
        for r in 0..n {
            for sidx in 0..n {
                if r == sidx {
                    continue;
                }
                match intertwiner_check::<f64>(n, m, r, sidx, guard()) {
                    Ok(rep) => {
                        pairs += 1;
                        let dev = rep.defect.max(rep.max_offdiagonal).max(rep.max_diagonal_deviation);
                        worst = worst.max(dev);
                        pass &= dev < TOL;
                    }
                    Err(e) => {
                        pass = false;
                        errors.push(format!("n={n} m={m} r={r} s={sidx}: {e}"));
                    }
                }
            }
        }
    }
    vec![Verdict::new(
        "3",
        pass,
        format!("{pairs} (r, s) pairs, worst Gram deviation {worst:.2e} {}", errors.join("; ")),
    )]
}

fn to_m(x: &Mat) -> M {
    M::from_inner(x.clone())
}

fn criterion_4() -> Vec<Verdict> {
    let mut pass = true;
    let mut notes = Vec::new();
    for n in [2usize, 3] {
        let v = gadget_v(n);
        let a: Vec<Mat> = words(n, 2).iter().map(|w| e_word(n, w, 2)).collect();
        let b: Vec<M> = a.iter().map(|x| to_m(&(&v * x * v.adjoint()))).collect();
        let a: Vec<M> = a.iter().map(to_m).collect();
        match mixed_spectrum(&a, &b, &TracedAlgebraShape::full(n * n), 1) {
            Ok(rep) => {
                let ok = rep.as_set == NSet::one() && rep.total() == n.pow(4);
                pass &= ok;
                notes.push(format!("mixed n={n}: {{{}}}", rep.as_set));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("mixed n={n}: {e}"));
            }
        }
    }
    for n in [2usize, 3, 4] {
        let d0: Vec<M> = (0..n).map(|i| to_m(&unit_proj(n, i))).collect();
        match finite_puk_spectrum(&d0, &TracedAlgebraShape::full(n), 1) {
            Ok(rep) => {
                let ok = rep.as_set == NSet::one()
                    && rep.block_count() == n * n - n
                    && rep.multiplicities.iter().all(|&k| k == 1);
                pass &= ok;
                notes.push(format!("D0 in M{n}: {{{}}} x{}", rep.as_set, rep.block_count()));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("D0 in M{n}: {e}"));
            }
        }
    }
    vec![Verdict::new("4", pass, notes.join("; "))]
}

// ---------------------------------------------------------------------------
// Algebra oracles.

fn random_mat(d: usize, rng: &mut ChaCha8Rng) -> Mat {
    Mat::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> Mat {
    random_mat(d, rng).qr().q()
}

fn block_diag(parts: &[Mat]) -> Mat {
    let d: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = zeros(d);
    let mut off = 0;
    for p in parts {
        out.view_mut((off, off), (p.nrows(), p.nrows())).copy_from(p);
        off += p.nrows();
    }
    out
}

fn embed_block(blocks: &[usize], b: usize, x: &Mat) -> Mat {
    let parts: Vec<Mat> = blocks
        .iter()
        .enumerate()
        .map(|(k, &d)| if k == b { x.clone() } else { zeros(d) })
        .collect();
    block_diag(&parts)
}

/// A random unital subalgebra `⊕_b W_b (M_{k_b} ⊕ D_{d_b − k_b}) W_b*` of the
/// multi-matrix algebra, with its dimension and the dimension of its
/// commutant in the ambient matrix algebra.
fn random_subalgebra(blocks: &[usize], rng: &mut ChaCha8Rng) -> (Vec<M>, usize, usize) {
    let mut gens = Vec::new();
    let (mut dim, mut comm) = (0, 0);
    let mut label = 1.0;
    for (b, &d) in blocks.iter().enumerate() {
        let k = rng.random_range(1..=d);
        let w = random_unitary(d, rng);
        let x = block_diag(&[random_mat(k, rng), zeros(d - k)]);
        let mut diag = zeros(d);
        for t in k..d {
            diag[(t, t)] = Complex64::new(label, 0.0);
            label += 1.0;
        }
        for g in [x, diag] {
            gens.push(to_m(&embed_block(blocks, b, &(&w * g * w.adjoint()))));
        }
        dim += k * k + d - k;
        comm += 1 + d - k;
    }
    (gens, dim, comm)
}

fn random_masa(blocks: &[usize], rng: &mut ChaCha8Rng) -> Vec<M> {
    let mut out = Vec::new();
    for (b, &d) in blocks.iter().enumerate() {
        let w = random_unitary(d, rng);
        for i in 0..d {
            out.push(to_m(&embed_block(blocks, b, &(&w * unit_proj(d, i) * w.adjoint()))));
        }
    }
    out
}

fn shapes() -> Vec<(&'static str, Vec<usize>, TracedAlgebraShape)> {
    vec![
        ("M2", vec![2], TracedAlgebraShape::full(2)),
        ("M3", vec![3], TracedAlgebraShape::full(3)),
        ("M2+M1", vec![2, 1], TracedAlgebraShape::standard(vec![2, 1]).expect("valid")),
    ]
}

fn tomita(blocks: &[usize], shape: &TracedAlgebraShape) -> Result<bool, String> {
    let expected: usize = blocks.iter().map(|d| d * d).sum();
    let space = GnsSpace::<f64>::new(shape.clone());
    let basis = space.basis();
    let lefts = basis.iter().map(|x| space.left(x)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let rights = basis.iter().map(|x| space.right(x)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let l = generate_algebra_in(space.dim(), &lefts, true);
    let r = generate_algebra_in(space.dim(), &rights, true);
    let lc = commutant(&l).map_err(|e| e.to_string())?;
    let mismatch = r
        .basis()
        .iter()
        .map(|x| lc.residual(x))
        .chain(lc.basis().iter().map(|x| r.residual(x)))
        .fold(0.0f64, f64::max);
    Ok(lc.dim() == expected && r.dim() == expected && l.dim() == expected && mismatch < 1e-8)
}

fn algebra_trial(blocks: &[usize], shape: &TracedAlgebraShape, seed: u64) -> Result<bool, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (gens, dim, comm) = random_subalgebra(blocks, &mut rng);
    let a = generate_algebra(&gens, true).map_err(|e| e.to_string())?;
    let ac = commutant(&a).map_err(|e| e.to_string())?;
    let acc = commutant(&ac).map_err(|e| e.to_string())?;
    let bicommutant = a.dim() == dim && ac.dim() == comm && acc.dim() == dim && a.same_span(&acc);

    let size: usize = blocks.iter().sum();
    let gns: usize = blocks.iter().map(|d| d * d).sum();
    let p = random_masa(blocks, &mut rng);
    let q = random_masa(blocks, &mut rng);
    let alg = generate_algebra(&p, true).map_err(|e| e.to_string())?;
    let mins = minimal_projections(&alg, seed).map_err(|e| e.to_string())?;
    let mixed = mixed_spectrum(&p, &q, shape, seed).map_err(|e| e.to_string())?;
    let conservation = mins.total() == size
        && mins.multiplicities.iter().all(|&k| k == 1)
        && mixed.total() == gns;
    Ok(bicommutant && conservation)
}

fn criterion_5() -> Vec<Verdict> {
    let mut pass = true;
    let mut notes = Vec::new();
    for (label, blocks, shape) in shapes() {
        let ok = matches!(tomita(&blocks, &shape), Ok(true));
        pass &= ok;
        let mut failures = 0;
        for trial in 0..100u64 {
            if !matches!(algebra_trial(&blocks, &shape, 1000 + trial), Ok(true)) {
                failures += 1;
            }
        }
        pass &= failures == 0;
        notes.push(format!("{label}: tomita {}, {failures}/100 trial failures", if ok { "ok" } else { "bad" }));
    }
    vec![Verdict::new("5", pass, notes.join("; "))]
}

// ---------------------------------------------------------------------------
// Symbolic reproduction.

fn intro_spec() -> LambdaSpec {
    let i = MultiIndex::from_strs(&["0"]).expect("index");
    let j = MultiIndex::from_strs(&["1"]).expect("index");
    LambdaSpec::constant(NValue::Fin(3))
        .with_override(0, i, j, NValue::Fin(2))
        .expect("sibling pair")
}

/// Figures 1 and 2: the first splitting bit decides the cell.
fn figure_pattern(size: usize) -> Vec<Vec<NSet>> {
    let bits = size.trailing_zeros();
    (0..size)
        .map(|a| {
            (0..size)
                .map(|b| {
                    if a == b {
                        return NSet::one();
                    }
                    let t = ((a ^ b) as u32).leading_zeros() - (u32::BITS - bits);
                    if t == 0 {
                        s("2")
                    } else {
                        s("3")
                    }
                })
                .collect()
        })
        .collect()
}

fn sixth_a() -> Verdict {
    let oracle = CutdownOracle::simple(4);
    let spec = intro_spec();
    let mut notes = Vec::new();
    let mut pass = match eval_construction(&spec, &oracle, 2) {
        Ok(out) => {
            notes.push(format!("eval {{{}}} converged {}", out.set, out.converged));
            out.set == s("2,3") && out.converged
        }
        Err(e) => {
            notes.push(e.to_string());
            false
        }
    };
    for (r, fig) in [(0usize, "fig1"), (1, "fig2-left"), (2, "fig2-right")] {
        let ok = diagram_from_construction(&spec, &oracle, r)
            .map(|d| d.cells == figure_pattern(2 << r))
            .unwrap_or(false);
        notes.push(format!("{fig} {}", if ok { "match" } else { "MISMATCH" }));
        pass &= ok;
    }
    let fig3 = vec![vec![s("3"), s("2")], vec![s("2"), s("3")]];
    let ok = diagram_from_construction(&spec, &oracle, 2)
        .and_then(|d| d.limit_view(1))
        .map(|d| d.cells == fig3 && d.diagonal_marker)
        .unwrap_or(false);
    notes.push(format!("fig3 {}", if ok { "match" } else { "MISMATCH" }));
    pass &= ok;
    Verdict::new("6a", pass, notes.join(", "))
}

fn sixth_b() -> Verdict {
    let spec = LambdaSpec::constant(NValue::Inf);
    match eval_construction(&spec, &CutdownOracle::simple(4), 3) {
        Ok(out) => Verdict::new("6b", out.set == NSet::infinity(), format!("{{{}}}", out.set)),
        Err(e) => Verdict::new("6b", false, e.to_string()),
    }
}

/// Non-empty subsets, built by bitmask.
fn subsets(universe: &[NValue]) -> Vec<NSet> {
    (1u32..1 << universe.len())
        .map(|mask| {
            universe
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

fn fin(values: &[u64]) -> Vec<NValue> {
    values.iter().map(|&v| NValue::Fin(v)).collect()
}

fn sixth_c() -> Verdict {
    let mut universe = fin(&[1, 2, 3, 5]);
    universe.push(NValue::Inf);
    let oracle = CutdownOracle::simple(3);
    let mut failures = Vec::new();
    let all = subsets(&universe);
    for e in &all {
        let got = choose_lambda_for_e(e).and_then(|spec| eval_construction(&spec, &oracle, 2));
        match got {
            Ok(out) if out.set == *e => {}
            Ok(out) => failures.push(format!("{{{e}}} -> {{{}}}", out.set)),
            Err(err) => failures.push(format!("{{{e}}}: {err}")),
        }
    }
    Verdict::new("6c", failures.is_empty(), format!("{} sets, failures {failures:?}", all.len()))
}

fn sixth_d() -> Verdict {
    let mut universe = fin(&[1, 2, 5]);
    universe.push(NValue::Inf);
    let all = subsets(&universe);
    let oracle = CutdownOracle::simple(3);
    let (mut total, mut failed, mut failed_small_g) = (0, 0, 0);
    let mut example = None;
    for e in &all {
        for f in &all {
            for g in &all {
                total += 1;
                let got = choose_lambda_for_efg(e, f, g).and_then(|spec| eval_quadrants(&spec, &oracle, 2));
                let ok = matches!(&got, Ok(q) if q.zero == *e && q.one == *f && q.mixed == *g);
                if !ok {
                    failed += 1;
                    if g.len() < 2 {
                        failed_small_g += 1;
                    }
                    if example.is_none() {
                        example = Some(match &got {
                            Ok(q) => format!(
                                "({{{e}}},{{{f}}},{{{g}}}) -> ({{{}}},{{{}}},{{{}}})",
                                q.zero, q.one, q.mixed
                            ),
                            Err(err) => err.to_string(),
                        });
                    }
                }
            }
        }
    }
    Verdict::new(
        "6d",
        failed == 0,
        format!(
            "{total} triples, {failed} failed ({failed_small_g} with |G| = 1){}",
            example.map(|x| format!(", e.g. {x}")).unwrap_or_default()
        ),
    )
}

fn sixth_e() -> Verdict {
    let mut rest = fin(&[2, 3, 4, 5, 6]);
    rest.push(NValue::Inf);
    let mut failures = Vec::new();
    let mut cases = 0;
    for mask in 0u32..1 << rest.len() {
        let mut e = NSet::one();
        for (k, &v) in rest.iter().enumerate() {
            if mask >> k & 1 == 1 {
                e.insert(v);
            }
        }
        cases += 1;
        match cor_plan_1_in_puk(&e) {
            Ok(plan) if plan.evaluate() == e => {}
            Ok(plan) => failures.push(format!("{{{e}}} -> {{{}}}", plan.evaluate())),
            Err(err) => failures.push(format!("{{{e}}}: {err}")),
        }
    }
    Verdict::new("6e", failures.is_empty(), format!("{cases} sets, failures {failures:?}"))
}

fn sixth_f() -> Verdict {
    let grid = [
        ["1", "3", "1", "1"],
        ["3", "1", "1", "1"],
        ["1", "1", "1", "3"],
        ["1", "1", "3", "1"],
    ];
    let rows: Vec<Vec<NValue>> = grid
        .iter()
        .map(|row| row.iter().map(|t| t.parse().expect("value")).collect())
        .collect();
    let expected: Vec<Vec<NSet>> = grid.iter().map(|row| row.iter().map(|t| s(t)).collect()).collect();
    let table = LambdaMatrix::new(rows)
        .and_then(|m| countable_family_plan(&m))
        .map(|plan| plan.table());
    match table {
        Ok(t) => Verdict::new("6f", t == expected, "4x4 pairwise table against the figure grid"),
        Err(e) => Verdict::new("6f", false, e.to_string()),
    }
}

fn criterion_6() -> Vec<Verdict> {
    vec![sixth_a(), sixth_b(), sixth_c(), sixth_d(), sixth_e(), sixth_f()]
}

// ---------------------------------------------------------------------------
// Combinatorics.

/// Every index of `I^{(r)}_m` as strings: sequence `t` has length `m + r − t`.
fn brute_indices(r: usize, m: usize) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![Vec::new()];
    for t in 0..=r {
        let len = m + r - t;
        let mut next = Vec::with_capacity(out.len() << len);
        for prefix in &out {
            for bits in 0..1u32 << len {
                let word: String = (0..len).map(|k| if bits >> (len - 1 - k) & 1 == 1 { '1' } else { '0' }).collect();
                let mut p = prefix.clone();
                p.push(word);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// `i|_{r−1}` for `i ∈ I^{(r)}_1`: drop the last sequence and the last bit of the rest.
fn restrict_down(i: &[String]) -> Vec<String> {
    i[..i.len() - 1].iter().map(|w| w[..w.len() - 1].to_string()).collect()
}

fn criterion_7() -> Vec<Verdict> {
    let mut notes = Vec::new();
    let mut pass = true;
    for r in 0..=3 {
        for m in 1..=3 {
            let brute: BTreeSet<Vec<String>> = brute_indices(r, m).into_iter().collect();
            let listed: BTreeSet<Vec<String>> = enumerate(r, m)
                .expect("within guard")
                .map(|i| i.to_strings())
                .collect();
            let ok = count(r, m).ok() == Some(brute.len() as u64) && listed == brute;
            if !ok {
                notes.push(format!("count mismatch r={r} m={m}"));
            }
            pass &= ok;
        }
    }
    for r in 0..=3 {
        let all = brute_indices(r, 1);
        let mut brute = BTreeSet::new();
        for a in 0..all.len() {
            for b in a + 1..all.len() {
                let siblings = r == 0 || restrict_down(&all[a]) == restrict_down(&all[b]);
                if siblings {
                    brute.insert((all[a].clone(), all[b].clone()));
                }
            }
        }
        let listed: BTreeSet<(Vec<String>, Vec<String>)> = sibling_pairs(r)
            .expect("within guard")
            .map(|p| (p.i.to_strings(), p.j.to_strings()))
            .collect();
        let formula = sibling_pair_count(r).ok();
        let ok = listed == brute && formula == Some(brute.len() as u64);
        if !ok {
            notes.push(format!("sibling mismatch r={r}"));
        }
        pass &= ok;
    }
    let small = sibling_pair_count(0).ok() == Some(1) && sibling_pair_count(1).ok() == Some(12);
    pass &= small;
    match glue_check(3, 3) {
        Ok(rep) => {
            pass &= rep.passed();
            notes.push(format!("glue: {} symbols, passed {}", rep.symbols_checked, rep.passed()));
        }
        Err(e) => {
            pass = false;
            notes.push(format!("glue: {e}"));
        }
    }
    vec![Verdict::new("7", pass, notes.join("; "))]
}

// ---------------------------------------------------------------------------
// Set calculus.

fn naive_product(e: &NSet, f: &NSet) -> NSet {
    let mut out = NSet::empty();
    for a in e.iter() {
        for b in f.iter() {
            out.insert(match (a, b) {
                (NValue::Fin(x), NValue::Fin(y)) => NValue::Fin(x * y),
                _ => NValue::Inf,
            });
        }
    }
    out
}

fn random_set(rng: &mut ChaCha8Rng) -> NSet {
    let mut e = NSet::empty();
    while e.is_empty() {
        for v in 1..=7u64 {
            if rng.random_bool(0.3) {
                e.insert(NValue::Fin(v));
            }
        }
        if rng.random_bool(0.2) {
            e.insert(NValue::Inf);
        }
    }
    e
}

fn criterion_8() -> Vec<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    for _ in 0..500 {
        let (e, f, g) = (random_set(&mut rng), random_set(&mut rng), random_set(&mut rng));
        let laws = nset_product(&e, &f) == naive_product(&e, &f)
            && nset_product(&e, &f) == nset_product(&f, &e)
            && nset_product(&nset_product(&e, &f), &g) == nset_product(&e, &nset_product(&f, &g))
            && nset_product(&e, &NSet::one()) == e
            && nset_product(&e, &NSet::infinity()) == NSet::infinity();
        if !laws {
            bad += 1;
        }
    }
    let infinity = NValue::Fin(2).mul(NValue::Inf) == NValue::Inf
        && NValue::Inf.mul(NValue::Fin(5)) == NValue::Inf
        && NValue::Inf.mul(NValue::Inf) == NValue::Inf;
    let finite = tensor_mixed(&[s("2"), s("3")]) == s("6");
    let twos = tensor_mixed_infinite(&[s("2"), s("2"), s("2")], false).ok() == Some(NSet::infinity());
    let tail = tensor_mixed_infinite(&[s("2"), s("1"), s("1")], true).ok() == Some(s("2"));
    let pass = bad == 0 && infinity && finite && twos && tail;
    vec![Verdict::new(
        "8",
        pass,
        format!("{bad}/500 random law failures, inf convention {infinity}, tensor rules {finite}/{twos}/{tail}"),
    )]
}

fn main() {
    let groups: [(&str, fn() -> Vec<Verdict>); 8] = [
        ("keyclaim inner products", criterion_1),
        ("orthogonal family spans", criterion_2),
        ("intertwiner isometries", criterion_3),
        ("dimension checks", criterion_4),
        ("algebra engine oracles", criterion_5),
        ("symbolic reproduction", criterion_6),
        ("combinatorics", criterion_7),
        ("set calculus", criterion_8),
    ];
    let mut failed = Vec::new();
    for (title, run) in groups {
        let start = Instant::now();
        for v in run() {
            println!(
                "criterion {:<3} {} {title}: {} [{:.1}s]",
                v.label,
                if v.pass { "PASS" } else { "FAIL" },
                v.detail,
                start.elapsed().as_secs_f64()
            );
            if !v.pass {
                failed.push(v.label);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
