//! `cpoly`: reproducible JSON reports over the cpolytope library.
//!
//! Every run prints a single report object: the command, its effective
//! parameters, a module-specific results payload, the tool version, the seed
//! when randomness was involved, and an overall `pass` flag. Exit codes:
//! 0 all verifications passed, 1 a verification failed (report still
//! printed), 2 usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use cpolytope::designs::{
    bruck_ryser_excludes, mols_prime_power, mols_to_affine_plane, orthogonal_mate,
    verify_affine_plane, LatinSquare, MateSearch, MolsSet, DEFAULT_NODE_BUDGET,
};
use cpolytope::hermitian::{make_traceless_basis, TracelessBasis};
use cpolytope::inscription::{
    build_point_face_array, exhaustive_inscription_search, plane_dictionary, verify_simplex,
    verify_simplex_operators,
};
use cpolytope::john::{
    density_touching_set, polytope_touching_set, tetrahedron_sic, verify_john, verify_sic,
    JohnReport,
};
use cpolytope::mub::{build_complete, verify_mub, MubSet};
use cpolytope::polytope::{
    cone_volume, geometry_report, mc_volume, sample_face_words, verify_faces, verify_gram,
    CPolytope,
};
use cpolytope::Tolerances;

const DEFAULT_SEED: u64 = 42;
const DEFAULT_SAMPLES: u64 = 1_000_000;
/// Acceptable relative gap between the cone-decomposition volume and the
/// closed form.
const CONE_RELATIVE_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "cpoly", version, about = "Complementarity polytope construction and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Override the spectral/Gram verification tolerance (default 1e-10;
    /// structural identities stay at 1e-12).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for any randomized step (Monte Carlo, random face sampling).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample count for Monte Carlo estimates.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Build and verify complete sets of mutually unbiased bases.
    Mub {
        #[command(subcommand)]
        action: MubAction,
    },
    /// Polytope geometry: closed forms, Gram structure, volume oracles.
    Polytope {
        #[command(subcommand)]
        action: PolytopeAction,
    },
    /// Inscribe the regular simplex via MOLS, or search for inscriptions.
    Inscribe(InscribeArgs),
    /// Latin squares, orthogonal mates, and plane existence criteria.
    Designs {
        #[command(subcommand)]
        action: DesignsAction,
    },
    /// John conditions for extremal inscribed balls.
    John {
        #[command(subcommand)]
        action: JohnAction,
    },
}

#[derive(Subcommand)]
enum MubAction {
    /// Construct the complete set of n + 1 bases (prime-power n).
    Build {
        #[arg(long)]
        n: usize,
        /// Also write the set as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify orthonormality and unbiasedness of a set read from JSON.
    Verify {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
    },
}

#[derive(Subcommand)]
enum PolytopeAction {
    /// Closed-form geometry plus Gram and face verification.
    Report {
        #[arg(long)]
        n: usize,
        /// Random faces to audit (exhaustive instead when n <= 3).
        #[arg(long, default_value_t = 100)]
        faces: usize,
    },
    /// Volume oracles checked against the closed form.
    Volume {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = VolumeMode::Cone)]
        mode: VolumeMode,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VolumeMode {
    /// Exact cone decomposition over facets.
    Cone,
    /// Monte Carlo rejection sampling in the outsphere.
    Mc,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct InscribeArgs {
    #[command(subcommand)]
    action: Option<InscribeAction>,
    /// Order of the MOLS-derived inscription (prime power).
    #[arg(long)]
    n: Option<usize>,
    /// Read the MOLS family from a JSON file instead of constructing it.
    #[arg(long, value_name = "FILE")]
    mols: Option<PathBuf>,
}

#[derive(Subcommand)]
enum InscribeAction {
    /// Exhaustively enumerate all inscriptions (n <= 3).
    Search {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum DesignsAction {
    /// The complete family of q - 1 MOLS of prime-power order q.
    Mols {
        #[arg(long)]
        q: usize,
    },
    /// Search a Latin square (JSON file) for an orthogonal mate.
    Mate {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        /// Node budget for the exact-cover search.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Sweep all 9408 reduced order-6 squares for orthogonal mates.
    Survey6 {
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        /// Write the full per-square certificate to this file.
        #[arg(long, value_name = "FILE")]
        cert: Option<PathBuf>,
    },
    /// Bruck-Ryser exclusion test for a plane of order n.
    BruckRyser {
        #[arg(long)]
        n: u64,
    },
}

#[derive(Subcommand)]
enum JohnAction {
    /// Insphere contacts of the complementarity polytope (all n^(n+1)).
    Polytope {
        #[arg(long)]
        n: usize,
    },
    /// Insphere contacts of the density body from a complete MUB set.
    Density {
        #[arg(long)]
        n: usize,
    },
    /// Verify a SIC family (default: the built-in qubit tetrahedron).
    Sic {
        #[arg(long, value_name = "FILE")]
        r#in: Option<PathBuf>,
    },
}

struct RunReport {
    command: String,
    parameters: Map<String, Value>,
    results: Value,
    seed: Option<u64>,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let output = cli.output;
    match run(cli) {
        Ok(report) => {
            let pass = report.pass;
            emit(&report, output);
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(report: &RunReport, output: Output) {
    // Route through Value: its maps are ordered, so keys come out sorted and
    // byte-identical runs stay byte-identical.
    let value = json!({
        "command": report.command,
        "parameters": report.parameters,
        "results": report.results,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "seed": report.seed,
        "pass": report.pass,
    });
    let mut text = match output {
        Output::Json => serde_json::to_string_pretty(&value).expect("valid JSON"),
        Output::Text => {
            let mut buf = String::new();
            format_text(&value, 0, &mut buf);
            buf.pop();
            buf
        }
    };
    text.push('\n');
    // tolerate a reader that hangs up early (e.g. piping into head)
    use std::io::Write;
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn format_text(value: &Value, indent: usize, buf: &mut String) {
    use std::fmt::Write;
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        let _ = writeln!(buf, "{pad}{k}:");
                        format_text(v, indent + 1, buf);
                    }
                    _ => {
                        let _ = writeln!(buf, "{pad}{k}: {v}");
                    }
                }
            }
        }
        Value::Array(items) => {
            for v in items {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        let _ = writeln!(buf, "{pad}-");
                        format_text(v, indent + 1, buf);
                    }
                    _ => {
                        let _ = writeln!(buf, "{pad}- {v}");
                    }
                }
            }
        }
        _ => {
            let _ = writeln!(buf, "{pad}{value}");
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<RunReport> {
    let tols = match cli.tol {
        Some(t) if t > 0.0 => Tolerances::with_spectral(t),
        Some(t) => bail!("--tol must be positive, got {t}"),
        None => Tolerances::default(),
    };
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let samples = cli.samples.unwrap_or(DEFAULT_SAMPLES);
    match cli.command {
        Command::Mub { action } => run_mub(action, tols),
        Command::Polytope { action } => run_polytope(action, tols, seed, samples),
        Command::Inscribe(args) => run_inscribe(args, tols),
        Command::Designs { action } => run_designs(action),
        Command::John { action } => run_john(action, tols),
    }
}

fn basis_for(n: usize) -> anyhow::Result<TracelessBasis> {
    Ok(make_traceless_basis(n)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {what} from {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {what} in {}", path.display()))
}

fn run_mub(action: MubAction, tols: Tolerances) -> anyhow::Result<RunReport> {
    match action {
        MubAction::Build { n, out } => {
            let set = build_complete(n)?;
            let report = verify_mub(&set, tols.spectral);
            if let Some(path) = &out {
                let text = serde_json::to_string_pretty(&set)?;
                fs::write(path, text)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let mut parameters = Map::new();
            parameters.insert("n".into(), json!(n));
            parameters.insert("tol".into(), json!(tols.spectral));
            if let Some(path) = &out {
                parameters.insert("out".into(), json!(path.display().to_string()));
            }
            let pass = report.pass;
            Ok(RunReport {
                command: "mub build".into(),
                parameters,
                results: json!({
                    "verification": report,
                    "set": set,
                }),
                seed: None,
                pass,
            })
        }
        MubAction::Verify { r#in } => {
            let set: MubSet = read_json(&r#in, "MUB set")?;
            let report = verify_mub(&set, tols.spectral);
            let mut parameters = Map::new();
            parameters.insert("in".into(), json!(r#in.display().to_string()));
            parameters.insert("tol".into(), json!(tols.spectral));
            let pass = report.pass;
            Ok(RunReport {
                command: "mub verify".into(),
                parameters,
                results: serde_json::to_value(report)?,
                seed: None,
                pass,
            })
        }
    }
}

fn geometry_contract(n: usize) -> anyhow::Result<Value> {
    let g = geometry_report(n)?;
    Ok(json!({
        "n": g.n,
        "dim": g.dim,
        "v_polytope": g.polytope_volume,
        "v_body": g.body_volume,
        "ratio": g.volume_ratio,
        "r_in": g.insphere_radius,
        "r_out": g.outsphere_radius,
        "area": g.polytope_surface_area,
        "body_area": g.body_surface_area,
        "ra_over_v_polytope": g.polytope_radius_area_over_volume,
        "ra_over_v_body": g.body_radius_area_over_volume,
        "corner_count": g.corner_count,
        "facet_count": g.facet_count,
        "log_scale_fields": [
            { "field": "v_polytope", "ln": g.ln_polytope_volume },
            { "field": "v_body", "ln": g.ln_body_volume },
            { "field": "ratio", "ln": g.ln_volume_ratio },
            { "field": "area", "ln": g.ln_polytope_surface_area },
            { "field": "body_area", "ln": g.ln_body_surface_area },
        ],
    }))
}

fn run_polytope(
    action: PolytopeAction,
    tols: Tolerances,
    seed: u64,
    samples: u64,
) -> anyhow::Result<RunReport> {
    match action {
        PolytopeAction::Report { n, faces } => {
            let geometry = geometry_contract(n)?;
            let poly = CPolytope::reference(n)?;
            let gram = verify_gram(&poly, tols.structural);
            // exhaustive face audit when cheap, seeded sampling otherwise
            let (words, exhaustive) = if n <= 3 {
                (cpolytope::polytope::face_words(n)?, true)
            } else {
                (sample_face_words(n, faces, seed), false)
            };
            let face_report = verify_faces(&poly, &words, tols.structural)?;
            let mut parameters = Map::new();
            parameters.insert("n".into(), json!(n));
            parameters.insert("faces".into(), json!(words.len()));
            parameters.insert("exhaustive_faces".into(), json!(exhaustive));
            let pass = gram.pass && face_report.pass;
            Ok(RunReport {
                command: "polytope report".into(),
                parameters,
                results: json!({
                    "geometry": geometry,
                    "gram": gram,
                    "faces": face_report,
                }),
                seed: if exhaustive { None } else { Some(seed) },
                pass,
            })
        }
        PolytopeAction::Volume { n, mode } => {
            let g = geometry_report(n)?;
            let poly = CPolytope::reference(n)?;
            let mut parameters = Map::new();
            parameters.insert("n".into(), json!(n));
            match mode {
                VolumeMode::Cone => {
                    parameters.insert("mode".into(), json!("cone"));
                    let cone = cone_volume(&poly)?;
                    let relative_gap =
                        (cone.volume - g.polytope_volume).abs() / g.polytope_volume;
                    let pass = relative_gap <= CONE_RELATIVE_TOL;
                    Ok(RunReport {
                        command: "polytope volume".into(),
                        parameters,
                        results: json!({
                            "oracle": cone,
                            "closed_form": g.polytope_volume,
                            "relative_gap": relative_gap,
                            "relative_tol": CONE_RELATIVE_TOL,
                        }),
                        seed: None,
                        pass,
                    })
                }
                VolumeMode::Mc => {
                    parameters.insert("mode".into(), json!("mc"));
                    parameters.insert("samples".into(), json!(samples));
                    let mc = mc_volume(&poly, samples, seed)?;
                    let gap = (mc.estimate - g.polytope_volume).abs();
                    let pass = gap <= 3.0 * mc.std_error;
                    Ok(RunReport {
                        command: "polytope volume".into(),
                        parameters,
                        results: json!({
                            "oracle": mc,
                            "closed_form": g.polytope_volume,
                            "gap": gap,
                            "gap_limit_3_sigma": 3.0 * mc.std_error,
                        }),
                        seed: Some(seed),
                        pass,
                    })
                }
            }
        }
    }
}

fn run_inscribe(args: InscribeArgs, tols: Tolerances) -> anyhow::Result<RunReport> {
    if let Some(InscribeAction::Search { n }) = args.action {
        let search = exhaustive_inscription_search(n)?;
        let poly = CPolytope::reference(n)?;
        let mut all_verify = true;
        for sol in &search.solutions {
            if !verify_simplex(&poly, sol, tols.structural)?.pass {
                all_verify = false;
            }
        }
        let mut parameters = Map::new();
        parameters.insert("n".into(), json!(n));
        let pass = all_verify && !search.solutions.is_empty();
        return Ok(RunReport {
            command: "inscribe search".into(),
            parameters,
            results: json!({
                "candidates": search.candidates,
                "count": search.count,
                "all_verify": all_verify,
                "solutions": search.solutions,
            }),
            seed: None,
            pass,
        });
    }
    let (mols, n) = match (&args.mols, args.n) {
        (Some(path), maybe_n) => {
            let mols: MolsSet = read_json(path, "MOLS family")?;
            if let Some(n) = maybe_n {
                if n != mols.n() {
                    bail!("--n {} disagrees with the order {} family in the file", n, mols.n());
                }
            }
            let n = mols.n();
            (mols, n)
        }
        (None, Some(n)) => (mols_prime_power(n)?, n),
        (None, None) => bail!("inscribe needs --n or --mols (or the `search` subcommand)"),
    };
    let array = build_point_face_array(&mols)?;
    let words = array.flat_words();
    let poly = CPolytope::reference(n)?;
    let simplex = verify_simplex(&poly, &words, tols.structural)?;
    let plane = verify_affine_plane(&plane_dictionary(&words)?);
    // operator-level audit on the quantum realization where one exists
    let operators = match build_complete(n) {
        Ok(set) => Some(verify_simplex_operators(&set, &words, tols.spectral)?),
        Err(_) => None,
    };
    let mut pass = simplex.pass && plane.pass;
    if let Some(op) = &operators {
        pass = pass && op.pass;
    }
    let mut parameters = Map::new();
    parameters.insert("n".into(), json!(n));
    if let Some(path) = &args.mols {
        parameters.insert("mols".into(), json!(path.display().to_string()));
    }
    Ok(RunReport {
        command: "inscribe".into(),
        parameters,
        results: json!({
            "array": array,
            "simplex": simplex,
            "plane": plane,
            "operators": operators,
        }),
        seed: None,
        pass,
    })
}

fn run_designs(action: DesignsAction) -> anyhow::Result<RunReport> {
    match action {
        DesignsAction::Mols { q } => {
            let mols = mols_prime_power(q)?;
            let defect = mols.first_defect();
            let plane = verify_affine_plane(&mols_to_affine_plane(&mols)?);
            let mut parameters = Map::new();
            parameters.insert("q".into(), json!(q));
            let pass = defect.is_none() && plane.pass;
            Ok(RunReport {
                command: "designs mols".into(),
                parameters,
                results: json!({
                    "family": mols,
                    "defect": defect,
                    "plane": plane,
                }),
                seed: None,
                pass,
            })
        }
        DesignsAction::Mate { r#in, budget } => {
            let square: LatinSquare = read_json(&r#in, "Latin square")?;
            let outcome = orthogonal_mate(&square, budget)?;
            let mut parameters = Map::new();
            parameters.insert("in".into(), json!(r#in.display().to_string()));
            parameters.insert("budget".into(), json!(budget));
            let (pass, results) = match &outcome {
                MateSearch::Mate { square: mate, nodes } => (
                    true,
                    json!({ "verdict": "mate", "mate": mate, "nodes": nodes }),
                ),
                MateSearch::NoMate { nodes, transversals } => (
                    true,
                    json!({
                        "verdict": "no_mate",
                        "transversals": transversals,
                        "nodes": nodes,
                    }),
                ),
                MateSearch::BudgetExhausted { nodes } => (
                    false,
                    json!({ "verdict": "budget_exhausted", "nodes": nodes }),
                ),
            };
            Ok(RunReport {
                command: "designs mate".into(),
                parameters,
                results,
                seed: None,
                pass,
            })
        }
        DesignsAction::Survey6 { budget, cert } => {
            let certificate = cpolytope::designs::survey_order6(budget)?;
            if let Some(path) = &cert {
                fs::write(path, serde_json::to_string_pretty(&certificate)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let mut parameters = Map::new();
            parameters.insert("budget".into(), json!(budget));
            if let Some(path) = &cert {
                parameters.insert("cert".into(), json!(path.display().to_string()));
            }
            let pass = certificate.proves_no_mate_exists();
            Ok(RunReport {
                command: "designs survey6".into(),
                parameters,
                results: json!({
                    "reduced_squares": certificate.reduced_squares,
                    "mates_found": certificate.mates_found,
                    "budget_exhausted": certificate.budget_exhausted,
                    "total_nodes": certificate.total_nodes,
                    "max_nodes_single_square": certificate.max_nodes_single_square,
                    "max_transversals": certificate.max_transversals,
                    "proves_no_mate_exists": pass,
                }),
                seed: None,
                pass,
            })
        }
        DesignsAction::BruckRyser { n } => {
            let excluded = bruck_ryser_excludes(n);
            let mut parameters = Map::new();
            parameters.insert("n".into(), json!(n));
            Ok(RunReport {
                command: "designs bruck-ryser".into(),
                parameters,
                results: json!({
                    "n": n,
                    "excluded": excluded,
                    "criterion": "n = 1 or 2 (mod 4) and not a sum of two squares",
                }),
                seed: None,
                pass: true,
            })
        }
    }
}

fn john_contract(r: &JohnReport) -> Value {
    json!({
        "condition1_residual": r.balance_norm,
        "condition2_residual": r.max_isotropy_deviation,
        "lambda": r.lambda,
        "pass": r.pass,
        "n": r.n,
        "dim": r.dim,
        "contact_count": r.contact_count,
        "contact_bound": r.contact_bound,
        "radius": r.radius,
        "max_radius_deviation": r.max_radius_deviation,
    })
}

/// On-disk SIC family: `{"n": N, "vectors": [[[re, im], ...], ...]}`.
#[derive(serde::Deserialize)]
struct SicFile {
    n: usize,
    vectors: Vec<Vec<(f64, f64)>>,
}

fn run_john(action: JohnAction, tols: Tolerances) -> anyhow::Result<RunReport> {
    match action {
        JohnAction::Polytope { n } => {
            let poly = CPolytope::reference(n)?;
            let ts = polytope_touching_set(&poly)?;
            let report = verify_john(&ts, tols.spectral);
            let mut parameters = Map::new();
            parameters.insert("n".into(), json!(n));
            parameters.insert("tol".into(), json!(tols.spectral));
            let pass = report.pass;
            Ok(RunReport {
                command: "john polytope".into(),
                parameters,
                results: john_contract(&report),
                seed: None,
                pass,
            })
        }
        JohnAction::Density { n } => {
            let set = build_complete(n)?;
            let basis = basis_for(n)?;
            let ts = density_touching_set(&set, &basis)?;
            let report = verify_john(&ts, tols.spectral);
            let mut parameters = Map::new();
            parameters.insert("n".into(), json!(n));
            parameters.insert("tol".into(), json!(tols.spectral));
            let pass = report.pass;
            Ok(RunReport {
                command: "john density".into(),
                parameters,
                results: john_contract(&report),
                seed: None,
                pass,
            })
        }
        JohnAction::Sic { r#in } => {
            let (vectors, n, source) = match &r#in {
                Some(path) => {
                    let file: SicFile = read_json(path, "SIC family")?;
                    let vectors: Vec<Vec<Complex64>> = file
                        .vectors
                        .iter()
                        .map(|v| v.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
                        .collect();
                    (vectors, file.n, path.display().to_string())
                }
                None => (tetrahedron_sic(), 2, "builtin tetrahedron".to_string()),
            };
            if n < 2 {
                bail!("SIC verification needs dimension >= 2, got {n}");
            }
            let basis = basis_for(n)?;
            let report = verify_sic(&vectors, &basis, tols.spectral)
                .map_err(|e| anyhow!("{e}"))?;
            let mut parameters = Map::new();
            parameters.insert("n".into(), json!(n));
            parameters.insert("source".into(), json!(source));
            parameters.insert("tol".into(), json!(tols.spectral));
            let pass = report.pass;
            Ok(RunReport {
                command: "john sic".into(),
                parameters,
                results: json!({
                    "n": report.n,
                    "vectors": report.vectors,
                    "max_norm_deviation": report.max_norm_deviation,
                    "max_overlap_deviation": report.max_overlap_deviation,
                    "max_frame_deviation": report.max_frame_deviation,
                    "expected_overlap": 1.0 / (n as f64 + 1.0),
                    "john": john_contract(&report.john),
                    "pass": report.pass,
                }),
                seed: None,
                pass,
            })
        }
    }
}
