//! `flagbott` command-line tool.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 bad input, 3 a size cap
//! was hit.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flagbott::fan::{check_fan, check_unimodular, star_subdivide, ConeRef, FanError};
use flagbott::gkm::{
    build_gkm_graph, check_pairwise_independence, export_gkm, find_connection, verify_connection, Basis, ExportFormat,
    GkmError, DEFAULT_DEGREE_BOUND,
};
use flagbott::io::{fan_to_json, parse_fan, parse_tower, FanFile, TowerInput};
use flagbott::orbit::{
    check_rays_from_axials, gbt_fan, gbt_labels, orbit_fan, orbit_labels, permutohedral_fan, permutohedral_labels,
    verify_blowup, OrbitError,
};
use flagbott::tower::{FlagBottTower, GeneralizedBottTower, TowerError, DEFAULT_CAP};
use flagbott::verify::{check_join_star, random_flag_tower, random_generalized_tower, random_join_star_case};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "flagbott", version, about = "GKM graphs and toric fans of flag Bott towers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the GKM graph of a tower.
    Gkm {
        #[arg(long)]
        tower: PathBuf,
        /// Use the effective torus (drop the last coordinate of each stage).
        #[arg(long)]
        effective: bool,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
    },
    /// Write a fan as JSON.
    Fan {
        #[arg(value_enum)]
        kind: FanKind,
        #[arg(long)]
        tower: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
    },
    /// Run a verification and print a report.
    Verify {
        #[arg(value_enum)]
        check: Check,
        #[command(flatten)]
        opts: VerifyOpts,
    },
    /// Star-subdivide a fan along one of its cones.
    Subdivide {
        #[arg(long)]
        fan: PathBuf,
        /// Comma-separated 0-based ray indices.
        #[arg(long, value_delimiter = ',', required = true)]
        cone: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyOpts {
    #[arg(long)]
    tower: Option<PathBuf>,
    #[arg(long)]
    fan: Option<PathBuf>,
    /// Run a randomized battery from this seed instead of a single input.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random cases in a battery.
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u128,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FanKind {
    Gbt,
    Orbit,
    Permutohedral,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Blowup,
    Smooth,
    Gkm,
    Rays,
    Joinstar,
}

enum Failure {
    Verification,
    Input(String),
    Cap(String),
}

impl Failure {
    fn input(e: impl Display) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<GkmError> for Failure {
    fn from(e: GkmError) -> Self {
        match e {
            GkmError::Tower(t @ TowerError::CapExceeded { .. }) => Failure::Cap(t.to_string()),
            other => Failure::input(other),
        }
    }
}

impl From<OrbitError> for Failure {
    fn from(e: OrbitError) -> Self {
        if e.is_cap_exceeded() {
            Failure::Cap(e.to_string())
        } else {
            Failure::input(e)
        }
    }
}

impl From<FanError> for Failure {
    fn from(e: FanError) -> Self {
        Failure::input(e)
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_tower(path: &Path) -> Result<TowerInput, Failure> {
    parse_tower(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_generalized(path: &Path) -> Result<GeneralizedBottTower, Failure> {
    match load_tower(path)? {
        TowerInput::Generalized(t) => Ok(t),
        TowerInput::Flag(_) => Err(Failure::Input(format!(
            "{}: a generalized_bott tower is required",
            path.display()
        ))),
    }
}

fn load_fan(path: &Path) -> Result<FanFile, Failure> {
    parse_fan(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

/// Collects `name: PASS/FAIL` lines.
struct Report {
    failed: usize,
}

impl Report {
    fn new(title: &str) -> Self {
        println!("check {title}");
        Report { failed: 0 }
    }

    fn line(&mut self, ok: bool, what: impl Display) {
        if !ok {
            self.failed += 1;
        }
        println!("  {} {what}", if ok { "PASS" } else { "FAIL" });
    }

    fn finish(self) -> Outcome {
        if self.failed == 0 {
            println!("result: pass");
            Ok(())
        } else {
            println!("result: fail ({} failed)", self.failed);
            Err(Failure::Verification)
        }
    }
}

fn cmd_gkm(tower: &Path, effective: bool, format: Format, out: Option<&Path>, cap: u128) -> Outcome {
    let t = load_tower(tower)?.into_flag();
    let basis = if effective { Basis::Effective } else { Basis::Full };
    let g = build_gkm_graph(&t, basis, cap)?;
    let format = match format {
        Format::Dot => ExportFormat::Dot,
        Format::Json => ExportFormat::Json,
    };
    emit(&export_gkm(&g, format), out)
}

fn cmd_fan(kind: FanKind, tower: Option<&Path>, n: Option<usize>, out: Option<&Path>, cap: u128) -> Outcome {
    let (fan, labels) = match kind {
        FanKind::Permutohedral => {
            let n = n.ok_or_else(|| Failure::input("fan permutohedral needs --n"))?;
            if n == 0 {
                return Err(Failure::input("--n must be at least 1"));
            }
            (permutohedral_fan(n, cap)?, permutohedral_labels(n))
        }
        FanKind::Gbt | FanKind::Orbit => {
            let path = tower.ok_or_else(|| Failure::input("this fan needs --tower"))?;
            let t = load_generalized(path)?;
            if matches!(kind, FanKind::Gbt) {
                (gbt_fan(&t, cap)?, gbt_labels(&t))
            } else {
                (orbit_fan(&t, cap)?, orbit_labels(t.dims()))
            }
        }
    };
    emit(&fan_to_json(&fan, Some(&labels)), out)
}

fn cmd_subdivide(fan: &Path, cone: &[usize], out: Option<&Path>) -> Outcome {
    let file = load_fan(fan)?;
    let tau = ConeRef::new(cone.to_vec());
    let f = star_subdivide(&file.fan, &tau)?;
    let labels = file.labels.map(|mut l| {
        if f.rays().len() > l.len() {
            let ids: Vec<String> = tau.ray_indices.iter().map(ToString::to_string).collect();
            l.push(format!("u_tau({})", ids.join(",")));
        }
        l
    });
    emit(&fan_to_json(&f, labels.as_deref()), out)
}

/// Either the single tower given by `--tower` or a seeded random battery.
fn generalized_inputs(opts: &VerifyOpts) -> Result<Vec<(String, GeneralizedBottTower)>, Failure> {
    match (&opts.tower, opts.seed) {
        (Some(p), _) => Ok(vec![(p.display().to_string(), load_generalized(p)?)]),
        (None, Some(seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..opts.count)
                .map(|i| {
                    let t = random_generalized_tower(&mut rng, 3, 3, 5);
                    (format!("random #{i} {:?}", t.dims()), t)
                })
                .collect())
        }
        (None, None) => Err(Failure::input("give --tower or --seed")),
    }
}

fn flag_inputs(opts: &VerifyOpts) -> Result<Vec<(String, FlagBottTower)>, Failure> {
    match (&opts.tower, opts.seed) {
        (Some(p), _) => Ok(vec![(p.display().to_string(), load_tower(p)?.into_flag())]),
        (None, Some(seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..opts.count)
                .map(|i| {
                    let t = random_flag_tower(&mut rng, 3, 3, 9);
                    (format!("random #{i} {:?}", t.dims()), t)
                })
                .collect())
        }
        (None, None) => Err(Failure::input("give --tower or --seed")),
    }
}

fn verify_gkm(opts: &VerifyOpts) -> Outcome {
    let inputs = flag_inputs(opts)?;
    let mut report = Report::new("gkm");
    for (name, t) in inputs {
        for basis in [Basis::Full, Basis::Effective] {
            let g = build_gkm_graph(&t, basis, opts.cap)?;
            let bad = g.violations();
            report.line(
                bad.is_empty(),
                format!(
                    "{name} ({}): {} vertices, {}-regular, antisymmetric labels{}",
                    basis.name(),
                    g.vertices().len(),
                    g.expected_degree(),
                    bad.first().map(|b| format!(": {b}")).unwrap_or_default()
                ),
            );
            report.line(
                check_pairwise_independence(&g),
                format!("{name} ({}): pairwise independent weights", basis.name()),
            );
            if basis == Basis::Effective && g.expected_degree() <= DEFAULT_DEGREE_BOUND {
                match find_connection(&g, DEFAULT_DEGREE_BOUND) {
                    Ok(c) => {
                        let checked = verify_connection(&g, &c);
                        report.line(
                            checked.is_ok(),
                            format!(
                                "{name}: connection found{}",
                                checked.err().map(|e| format!(" but invalid: {e}")).unwrap_or_default()
                            ),
                        );
                    }
                    Err(e) => report.line(false, format!("{name}: {e}")),
                }
            }
        }
    }
    report.finish()
}

fn verify_blowups(opts: &VerifyOpts) -> Outcome {
    let inputs = generalized_inputs(opts)?;
    let mut report = Report::new("blowup");
    for (name, t) in inputs {
        let ok = verify_blowup(&t, opts.cap)?;
        report.line(ok, format!("{name}: iterated star subdivision equals the orbit fan"));
    }
    report.finish()
}

fn verify_rays(opts: &VerifyOpts) -> Outcome {
    let inputs = generalized_inputs(opts)?;
    let mut report = Report::new("rays");
    for (name, t) in inputs {
        let c = check_rays_from_axials(&t, opts.cap)?;
        report.line(
            c.mismatches.is_empty(),
            format!(
                "{name}: {} (ray, cone) pairs over {} cones{}",
                c.pairs,
                c.vertices,
                c.mismatches.first().map(|m| format!(": {m}")).unwrap_or_default()
            ),
        );
    }
    report.finish()
}

fn verify_smooth(opts: &VerifyOpts) -> Outcome {
    let mut fans = Vec::new();
    if let Some(p) = &opts.fan {
        fans.push((p.display().to_string(), load_fan(p)?.fan));
    } else {
        for (name, t) in generalized_inputs(opts)? {
            fans.push((name, orbit_fan(&t, opts.cap)?));
        }
    }
    let mut report = Report::new("smooth");
    for (name, f) in fans {
        match check_unimodular(&f) {
            Ok(ok) => report.line(ok, format!("{name}: every maximal cone has determinant +-1")),
            Err(e) => report.line(false, format!("{name}: {e}")),
        }
        if f.max_cones().len() <= 2000 {
            let r = check_fan(&f, false);
            report.line(
                r.is_clean(),
                format!(
                    "{name}: {} cone pairs meet properly{}",
                    r.pairs_checked,
                    r.violations.first().map(|v| format!(": {v}")).unwrap_or_default()
                ),
            );
        }
    }
    report.finish()
}

fn verify_joinstar(opts: &VerifyOpts) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.unwrap_or(0));
    let mut report = Report::new("joinstar");
    let mut failures = 0;
    for i in 0..opts.count {
        let case = random_join_star_case(&mut rng, 5);
        match check_join_star(&case) {
            Ok(true) => {}
            Ok(false) => {
                failures += 1;
                report.line(
                    false,
                    format!("case {i}: star subdivision does not commute with the join"),
                );
            }
            Err(e) => {
                failures += 1;
                report.line(false, format!("case {i}: {e}"));
            }
        }
    }
    if failures == 0 {
        report.line(true, format!("{} random cases, dimension <= 5", opts.count));
    }
    report.finish()
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Gkm {
            tower,
            effective,
            format,
            out,
            cap,
        } => cmd_gkm(&tower, effective, format, out.as_deref(), cap),
        Command::Fan {
            kind,
            tower,
            n,
            out,
            cap,
        } => cmd_fan(kind, tower.as_deref(), n, out.as_deref(), cap),
        Command::Subdivide { fan, cone, out } => cmd_subdivide(&fan, &cone, out.as_deref()),
        Command::Verify { check, opts } => match check {
            Check::Blowup => verify_blowups(&opts),
            Check::Smooth => verify_smooth(&opts),
            Check::Gkm => verify_gkm(&opts),
            Check::Rays => verify_rays(&opts),
            Check::Joinstar => verify_joinstar(&opts),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg} (raise --cap to allow it)");
            ExitCode::from(3)
        }
    }
}
