mod config;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use puk_core::constructions::{countable_family_plan, truncated_masa_pair, LambdaMatrix};
use puk_core::diagram::{diagram_from_construction, render, Format, MultiplicityDiagram};
use puk_core::index_sets::{quadrant_pair_count, sibling_pair_count, Quadrant};
use puk_core::matrix::TracedAlgebraShape;
use puk_core::puk::{choose_lambda_for_e, choose_lambda_for_efg, cor_plan_1_in_puk, eval_quadrants};
use puk_core::suites::{self, Suite};
use puk_core::{
    eval_construction, finite_puk_spectrum, mixed_spectrum, CutdownOracle, LambdaSpec, NSet, ResourceGuard,
};
use serde_json::json;

use config::{Mode, SpectrumConfig};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Verify(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Verify(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<puk_core::Error> for CliError {
    fn from(e: puk_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "puk", version, about = "Multiplicity invariants of masas: numerics, set calculus and diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed or finite invariant of masa generators given in a config file.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = ResourceGuard::DEFAULT_CAP)]
        max_dim: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run the identity suites and report maximal deviations.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Cap on the GNS dimension of the tensor-power checks.
        #[arg(long, default_value_t = ResourceGuard::DEFAULT_CAP)]
        max_dim: usize,
        /// Random trials per shape in the algebra suite.
        #[arg(long, default_value_t = 10)]
        trials: u64,
    },
    /// Evaluate the invariant of a Λ-spec construction.
    PukEval {
        #[arg(long)]
        lambda: PathBuf,
        #[arg(long)]
        oracle: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        rmax: usize,
        #[arg(long)]
        json: bool,
    },
    /// Choose Λ values or an assembly plan for target sets and evaluate it back.
    Plan {
        /// One set (`2,3,inf`) or three (`{2},{5,inf},{7}` or `2;5,inf;7`).
        #[arg(long)]
        target: String,
        /// E, EFG, cor1 or family. Defaults to E or EFG by the number of sets.
        #[arg(long)]
        kind: Option<String>,
        /// Λ matrix for the family plan, as rows of values.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Draw a diagram file, a Λ-spec or a Λ matrix as ASCII or SVG.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "ascii")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Truncation level for a Λ-spec input; the grid has 2^(level+1) rows.
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long)]
        oracle: Option<PathBuf>,
        /// Coarsen to this level and mark the diagonal.
        #[arg(long)]
        limit: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum { config, max_dim, json } => spectrum(&config, max_dim, json),
        Command::Verify { suite, max_dim, trials } => verify(&suite, max_dim, trials),
        Command::PukEval {
            lambda,
            oracle,
            rmax,
            json,
        } => puk_eval(&lambda, oracle.as_deref(), rmax, json),
        Command::Plan { target, kind, matrix } => plan(&target, kind.as_deref(), matrix.as_deref()),
        Command::Render {
            input,
            format,
            out,
            level,
            oracle,
            limit,
        } => render_cmd(&input, &format, out.as_deref(), level, oracle.as_deref(), limit),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            match e {
                CliError::Verify(_) => ExitCode::from(1),
                CliError::Input(_) => ExitCode::from(2),
            }
        }
    }
}

fn spectrum(path: &Path, max_dim: usize, as_json: bool) -> Result<(), CliError> {
    let cfg: SpectrumConfig = config::parse(&config::read(path)?, "spectrum config")?;
    let (a, b, shape) = match &cfg.truncated_pair {
        Some(tp) => {
            if !cfg.a.is_empty() || !cfg.b.is_empty() {
                return Err(CliError::Input("give either truncated_pair or explicit generators".into()));
            }
            let (a, b) = truncated_masa_pair::<f64>(tp.n, tp.k, tp.kind, ResourceGuard::new(max_dim))?;
            let shape = TracedAlgebraShape::full(a[0].rows());
            (a, b, shape)
        }
        None => {
            let size = cfg
                .a
                .first()
                .map(|x| x.rows())
                .ok_or_else(|| CliError::Input("config lists no generators in \"a\"".into()))?;
            let shape = cfg.shape(size)?;
            (cfg.a.clone(), cfg.b.clone(), shape)
        }
    };
    let mode = cfg.mode.unwrap_or(if b.is_empty() { Mode::Puk } else { Mode::Mixed });
    let gns: usize = shape.blocks().iter().map(|d| d * d).sum();
    if gns > max_dim {
        return Err(CliError::Input(format!("GNS dimension {gns} exceeds --max-dim {max_dim}")));
    }
    let report = match mode {
        Mode::Mixed => {
            if b.is_empty() {
                return Err(CliError::Input("mixed mode needs generators in \"b\"".into()));
            }
            mixed_spectrum(&a, &b, &shape, cfg.seed)?
        }
        Mode::Puk => finite_puk_spectrum(&a, &shape, cfg.seed)?,
    };
    let mut mults = report.multiplicities.clone();
    mults.sort_unstable();
    if as_json {
        let out = json!({
            "mode": match mode { Mode::Mixed => "mixed", Mode::Puk => "puk" },
            "multiplicities": mults,
            "set": report.as_set,
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        println!("mode: {}", match mode { Mode::Mixed => "mixed", Mode::Puk => "puk" });
        println!("multiplicities: {mults:?}");
        println!("set: {{{}}}", report.as_set);
    }
    Ok(())
}

fn verify(suite: &str, max_dim: usize, trials: u64) -> Result<(), CliError> {
    let suite: Suite = suite.parse()?;
    let lines = suites::run(suite, ResourceGuard::new(max_dim), trials);
    let (mut pass, mut fail, mut skip) = (0, 0, 0);
    for l in &lines {
        println!("{l}");
        match l.status {
            suites::Status::Pass => pass += 1,
            suites::Status::Fail => fail += 1,
            suites::Status::Skipped { .. } => skip += 1,
        }
    }
    println!("{pass} passed, {fail} failed, {skip} skipped");
    if fail > 0 {
        return Err(CliError::Verify(format!("{fail} check(s) out of tolerance")));
    }
    Ok(())
}

fn load_oracle(path: Option<&Path>, level: usize) -> Result<CutdownOracle, CliError> {
    match path {
        Some(p) => Ok(CutdownOracle::from_json(&config::read(p)?)?),
        None => Ok(CutdownOracle::simple(level)),
    }
}

fn puk_eval(lambda: &Path, oracle: Option<&Path>, rmax: usize, as_json: bool) -> Result<(), CliError> {
    let spec = LambdaSpec::from_json(&config::read(lambda)?)?;
    let oracle = load_oracle(oracle, rmax + 1)?;
    let out = eval_construction(&spec, &oracle, rmax)?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        println!("set: {{{}}}", out.set);
        println!("converged: {}", out.converged);
        for (r, s) in out.per_level.iter().enumerate() {
            println!("level {r}: {{{s}}}");
        }
    }
    Ok(())
}

/// Smallest `r ≥ 1` whose cumulative pair counts reach the given sizes.
fn levels_needed(need: impl Fn(usize) -> Result<bool, CliError>) -> Result<usize, CliError> {
    for r in 1..=4 {
        if need(r)? {
            return Ok(r);
        }
    }
    Ok(4)
}

fn cumulative(r: usize, q: Option<Quadrant>) -> Result<u64, CliError> {
    let mut total = 0;
    for s in 0..=r {
        total += match q {
            Some(q) => quadrant_pair_count(s, q)?,
            None => sibling_pair_count(s)?,
        };
    }
    Ok(total)
}

fn plan(target: &str, kind: Option<&str>, matrix: Option<&Path>) -> Result<(), CliError> {
    let sets = config::split_targets(target)?;
    let kind = kind
        .map(str::to_ascii_lowercase)
        .unwrap_or_else(|| if sets.len() == 3 { "efg".into() } else { "e".into() });
    let expect = |n: usize| -> Result<(), CliError> {
        if sets.len() != n {
            return Err(CliError::Input(format!("kind {kind} needs {n} target set(s), got {}", sets.len())));
        }
        Ok(())
    };
    let (report, ok) = match kind.as_str() {
        "e" => {
            expect(1)?;
            let e = &sets[0];
            let spec = choose_lambda_for_e(e)?;
            let rmax = levels_needed(|r| Ok(cumulative(r, None)? >= e.len() as u64))?;
            let out = eval_construction(&spec, &CutdownOracle::simple(rmax + 1), rmax)?;
            let ok = &out.set == e;
            (json!({"kind": "E", "lambda": spec, "rmax": rmax, "evaluation": out, "roundtrip": ok}), ok)
        }
        "efg" => {
            expect(3)?;
            let (e, f, g) = (&sets[0], &sets[1], &sets[2]);
            let spec = choose_lambda_for_efg(e, f, g)?;
            let rmax = levels_needed(|r| {
                Ok(cumulative(r, Some(Quadrant::Zero))? >= e.len() as u64
                    && cumulative(r, Some(Quadrant::One))? >= f.len() as u64)
            })?;
            let out = eval_quadrants(&spec, &CutdownOracle::simple(rmax + 1), rmax)?;
            let ok = &out.zero == e && &out.one == f && &out.mixed == g;
            (json!({"kind": "EFG", "lambda": spec, "rmax": rmax, "evaluation": out, "roundtrip": ok}), ok)
        }
        "cor1" => {
            expect(1)?;
            let p = cor_plan_1_in_puk(&sets[0])?;
            let value = p.evaluate();
            let ok = value == sets[0];
            (json!({"kind": "cor1", "plan": p, "evaluation": value, "roundtrip": ok}), ok)
        }
        "family" => {
            let lambda = match matrix {
                Some(path) => config::parse::<LambdaMatrix>(&config::read(path)?, "Λ matrix")?,
                None => {
                    expect(1)?;
                    cor_plan_1_in_puk(&sets[0])?.lambda
                }
            };
            let fam = countable_family_plan(&lambda)?;
            let k = lambda.size();
            let ok = (0..k).all(|i| {
                (0..k).all(|j| i == j || fam.evaluate_pair(i, j) == NSet::singleton(lambda.get(i, j)))
            });
            (json!({"kind": "family", "lambda": lambda, "plan": fam, "table": fam.table(), "roundtrip": ok}), ok)
        }
        other => return Err(CliError::Input(format!("unknown plan kind {other:?}"))),
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    if !ok {
        return Err(CliError::Verify("plan does not evaluate back to the target".into()));
    }
    Ok(())
}

fn family_diagram(lambda: &LambdaMatrix) -> Result<MultiplicityDiagram, CliError> {
    let fam = countable_family_plan(lambda)?;
    let k = lambda.size();
    let cells = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { NSet::one() } else { fam.evaluate_pair(i, j) })
                .collect()
        })
        .collect();
    Ok(MultiplicityDiagram::new(cells, false)?)
}

fn render_cmd(
    input: &Path,
    format: &str,
    out: Option<&Path>,
    level: usize,
    oracle: Option<&Path>,
    limit: Option<usize>,
) -> Result<(), CliError> {
    let format: Format = format.parse()?;
    let text = config::read(input)?;
    let value: serde_json::Value = config::parse(&text, "render input")?;
    let mut diagram = if value.get("cells").is_some() {
        MultiplicityDiagram::from_json(&text)?
    } else if value.is_array() {
        family_diagram(&config::parse(&text, "Λ matrix")?)?
    } else {
        let spec = LambdaSpec::from_json(&text)?;
        diagram_from_construction(&spec, &load_oracle(oracle, level + 1)?, level)?
    };
    if let Some(l) = limit {
        diagram = diagram.limit_view(l)?;
    }
    let rendered = render(&diagram, format);
    match out {
        Some(p) => std::fs::write(p, rendered).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        None => print!("{rendered}"),
    }
    Ok(())
}
