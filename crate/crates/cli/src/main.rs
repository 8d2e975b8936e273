use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use schouten_core::catalog::{load_catalog, verify_catalog, VerifyOptions};
use schouten_core::exactpoly::rational;
use schouten_core::geometry::{curvature_operator_pipeline, ConnectionKind};
use schouten_core::liealgebras::{
    all_families, build_family, jacobi_residuals, parse_custom_algebra, Eta, FamilyId, LieAlgebraFamily,
};
use schouten_core::soliton::{scan, soliton_system, CSolution, DEFAULT_LAMBDA0_GRID, DEFAULT_TOLERANCE};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;

#[derive(Parser)]
#[command(
    name = "schouten",
    version,
    about = "Curvature and algebraic Schouten solitons of 3D Lorentzian Lie algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in families.
    Families(Common),
    /// Ricci operator and scalar curvature.
    Ricci(Common),
    /// Scalar curvature only.
    Scalar(Common),
    /// Soliton derivation system.
    System(Common),
    /// Verify the built-in catalog.
    Verify(Common),
    /// Solve for c over sampled parameter points.
    Scan(Common),
    /// Jacobi identity residuals.
    Jacobi(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Args, Clone)]
struct Common {
    /// g1..g7, or custom:<path> for an algebra file.
    #[arg(long)]
    family: Option<String>,
    /// Branch of g4.
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<i64>,
    /// lc, canonical or kn.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample points (scan) or completeness scan points (verify).
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Restrict verification to one display or statement label.
    #[arg(long)]
    only: Option<String>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

impl Common {
    fn validate(&self) -> Result<(), CliError> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(CliError::Usage("--tolerance must be positive".into()));
        }
        if self.count == Some(0) {
            return Err(CliError::Usage("--count must be at least 1".into()));
        }
        Ok(())
    }

    fn kind(&self) -> Result<ConnectionKind, CliError> {
        let text = self.kind.as_deref().ok_or_else(|| CliError::Usage("--kind is required".into()))?;
        text.parse().map_err(CliError::Usage)
    }

    fn eta(&self) -> Result<Option<Eta>, CliError> {
        self.eta
            .map(|v| Eta::from_value(v).ok_or_else(|| CliError::Usage(format!("--eta must be 1 or -1, got {v}"))))
            .transpose()
    }

    /// The selected family. `g4` without `--eta` yields both branches when
    /// `allow_both` is set.
    fn families(&self, allow_both: bool) -> Result<Vec<LieAlgebraFamily>, CliError> {
        let text = self.family.as_deref().ok_or_else(|| CliError::Usage("--family is required".into()))?;
        let eta = self.eta()?;
        if let Some(path) = text.strip_prefix("custom:") {
            if eta.is_some() {
                return Err(CliError::Usage("--eta applies only to g4".into()));
            }
            let source = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{path}: {e}")))?;
            let name = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
            let fam = parse_custom_algebra(&source, name).map_err(|e| CliError::Data(format!("{path}: {e}")))?;
            return Ok(vec![fam]);
        }
        let id: FamilyId =
            text.parse().map_err(|e: schouten_core::liealgebras::FamilyError| CliError::Usage(e.to_string()))?;
        let etas: Vec<Option<Eta>> = match (id.needs_eta(), eta) {
            (true, None) if allow_both => Eta::BOTH.iter().copied().map(Some).collect(),
            (_, eta) => vec![eta],
        };
        etas.into_iter().map(|eta| build_family(&id, eta).map_err(|e| CliError::Usage(e.to_string()))).collect()
    }

    fn family(&self) -> Result<LieAlgebraFamily, CliError> {
        Ok(self.families(false)?.remove(0))
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn vec3(v: &[schouten_core::exactpoly::Polynomial; 3]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn cmd_families(args: &Common) -> Result<u8, CliError> {
    let families = match &args.family {
        Some(_) => args.families(true)?,
        None => all_families(),
    };
    let docs: Vec<serde_json::Value> = families
        .iter()
        .map(|f| {
            json!({
                "family": f.label(),
                "brackets": {
                    "12": vec3(f.structure.bracket_basis(0, 1)),
                    "13": vec3(f.structure.bracket_basis(0, 2)),
                    "23": vec3(f.structure.bracket_basis(1, 2)),
                },
                "constraints": f.constraints.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "nonvanishing": f.nonvanishing.iter().map(ToString::to_string).collect::<Vec<_>>(),
            })
        })
        .collect();
    match args.format {
        Format::Machine => print_json(&json!(docs)),
        Format::Text => {
            for f in &families {
                println!("{}", f.label());
                for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                    println!("  [e{},e{}] = ({})", i + 1, j + 1, vec3(f.structure.bracket_basis(i, j)).join(", "));
                }
                if !f.constraints.is_empty() {
                    let c: Vec<String> = f.constraints.iter().map(|p| format!("{p} = 0")).collect();
                    println!("  constraints: {}", c.join("; "));
                }
                if !f.nonvanishing.is_empty() {
                    let n: Vec<String> = f.nonvanishing.iter().map(|p| format!("{p} != 0")).collect();
                    println!("  nonvanishing: {}", n.join("; "));
                }
            }
        }
    }
    Ok(0)
}

fn cmd_ricci(args: &Common, with_matrix: bool) -> Result<u8, CliError> {
    let kind = args.kind()?;
    let fam = args.family()?;
    let data = curvature_operator_pipeline(&fam, kind);
    let rows = data.operator.0.rows_as_strings();
    match args.format {
        Format::Machine => {
            let mut doc = json!({
                "family": fam.label(),
                "kind": kind.short_name(),
                "scalar": data.scalar.to_string(),
            });
            if with_matrix {
                doc["operator"] = json!(rows);
            }
            print_json(&doc);
        }
        Format::Text => {
            println!("family = {}", fam.label());
            println!("kind = {kind}");
            if with_matrix {
                for (i, row) in rows.iter().enumerate() {
                    println!("row{} = {}", i + 1, row.join(", "));
                }
            }
            println!("s = {}", data.scalar);
        }
    }
    Ok(0)
}

fn cmd_system(args: &Common) -> Result<u8, CliError> {
    let kind = args.kind()?;
    let sys = soliton_system(&args.family()?, kind);
    match args.format {
        Format::Machine => print_json(&sys.to_json()),
        Format::Text => print!("{}", sys.to_text()),
    }
    Ok(0)
}

fn cmd_verify(args: &Common) -> Result<u8, CliError> {
    let catalog = load_catalog().map_err(|e| CliError::Data(e.to_string()))?;
    let mut options = VerifyOptions {
        seed: args.seed,
        only: args.only.clone(),
        tolerance: args.tolerance,
        ..VerifyOptions::default()
    };
    if let Some(count) = args.count {
        options.scan_points = count;
    }
    let report = verify_catalog(&catalog, &options);
    if report.records.is_empty() {
        return Err(CliError::Usage(format!(
            "no catalog entry matches `{}`",
            args.only.as_deref().unwrap_or_default()
        )));
    }
    match args.format {
        Format::Machine => print_json(&report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    Ok(if report.has_failures() { EXIT_FAILURE } else { 0 })
}

fn cmd_scan(args: &Common) -> Result<u8, CliError> {
    let kind = args.kind()?;
    let count = args.count.unwrap_or(100);
    let grid: Vec<_> = DEFAULT_LAMBDA0_GRID.iter().map(|&(n, d)| rational::ratio(n, d)).collect();
    let mut docs = Vec::new();
    for fam in args.families(true)? {
        let report =
            scan(&fam, kind, args.seed, count, &grid, args.tolerance).map_err(|e| CliError::Data(e.to_string()))?;
        let solvable_points =
            (0..report.points.len()).filter(|&i| report.entries.iter().any(|e| e.point == i && e.solvable)).count();
        match args.format {
            Format::Machine => {
                let mut doc = serde_json::to_value(&report).expect("serializable");
                doc["solvable_points"] = json!(solvable_points);
                doc["solvable_pairs"] = json!(report.solvable_count());
                docs.push(doc);
            }
            Format::Text => {
                for e in report.entries.iter().filter(|e| e.solvable) {
                    let c = e.c.as_ref().map_or_else(String::new, |c| match c {
                        CSolution::Any => "any".to_string(),
                        CSolution::Unique(v) => v.to_string(),
                    });
                    println!("{}; lambda0={}; c={}", report.points[e.point], e.lambda0, c);
                }
                println!(
                    "{} {}: {} of {} points solvable ({} of {} (point, lambda0) pairs)",
                    report.family,
                    kind,
                    solvable_points,
                    report.points.len(),
                    report.solvable_count(),
                    report.entries.len()
                );
            }
        }
    }
    if let Format::Machine = args.format {
        print_json(&json!(docs));
    }
    Ok(0)
}

fn cmd_jacobi(args: &Common) -> Result<u8, CliError> {
    let families = match &args.family {
        Some(_) => args.families(true)?,
        None => all_families(),
    };
    let mut docs = Vec::new();
    for fam in &families {
        let res = jacobi_residuals(fam);
        let zero = res.iter().all(|p| p.is_zero());
        match args.format {
            Format::Machine => docs.push(json!({
                "family": fam.label(),
                "residuals": vec3(&res),
                "identically_zero": zero,
            })),
            Format::Text => println!("{}: ({}) identically zero: {zero}", fam.label(), vec3(&res).join(", ")),
        }
    }
    if let Format::Machine = args.format {
        print_json(&json!(docs));
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Families(a) => a.validate().and_then(|_| cmd_families(a)),
        Command::Ricci(a) => a.validate().and_then(|_| cmd_ricci(a, true)),
        Command::Scalar(a) => a.validate().and_then(|_| cmd_ricci(a, false)),
        Command::System(a) => a.validate().and_then(|_| cmd_system(a)),
        Command::Verify(a) => a.validate().and_then(|_| cmd_verify(a)),
        Command::Scan(a) => a.validate().and_then(|_| cmd_scan(a)),
        Command::Jacobi(a) => a.validate().and_then(|_| cmd_jacobi(a)),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
