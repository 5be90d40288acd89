use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use iospectra::bounds::{compute_report, AChoice, BoundReport, ContourSource, ReportConfig};
use iospectra::linalg::{eigenvalues, CMatrix};
use iospectra::oracle::{transient_sup, HorizonConfig};
use iospectra::pseudospectra::{
    evaluate_grid, extract_level_curves, write_curves_csv, write_grid_csv, write_svg, GridSpec,
};
use iospectra::quadrature::QuadratureConfig;
use iospectra::scalar::fmt17;
use iospectra::system::{
    build_platoon, read_system, AnySystem, InputScenario, IoSystem, NetworkInput, NetworkSystem, PlatoonSpec,
    StateSpace, Symmetry,
};
use iospectra::{Complex, NormKind};

use crate::args::{
    AArg, Analysis, BodeArgs, BoundsArgs, Cli, Command, CurvesArgs, GridArgs, OmegaGrid, OracleArgs, SymmetryArg,
};
use crate::error::CliError;

/// Largest system whose eigenvalues are drawn on pseudospectrum plots.
const EIGENVALUE_PLOT_LIMIT: usize = 1000;

const CIRCLE_SAMPLES: usize = 4096;

const DEFAULT_OMEGA: OmegaGrid = OmegaGrid {
    lo: 1e-12,
    hi: 4.0,
    count: 2000,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Builtin {
    Example1,
    Example2,
}

/// A loaded system with its label and the defaults tied to its source.
struct Loaded {
    label: String,
    builtin: Option<Builtin>,
    system: AnySystem<f64>,
}

fn example(b: [f64; 2]) -> StateSpace<f64> {
    StateSpace::from_real(2, 1, 1, &[0., 1., -1., -2.], &b, &[1., 0.]).expect("valid example")
}

fn load(cli: &Cli) -> Result<Loaded, CliError> {
    let (label, builtin, system) = match &cli.command {
        Command::Platoon(p) => {
            let symmetry = match p.symmetry {
                SymmetryArg::Directed => Symmetry::Directed,
                SymmetryArg::Bidirectional => Symmetry::Bidirectional,
            };
            let net = build_platoon(&PlatoonSpec::new(p.n, symmetry, p.alpha))?;
            let label = format!("platoon-{:?}-{}", p.symmetry, p.n).to_lowercase();
            (
                label,
                None,
                AnySystem::Network(NetworkSystem::new(net, NetworkInput::Identity)?),
            )
        }
        Command::Analysis(_) => match cli.system.as_str() {
            "example1" => (
                "example1".into(),
                Some(Builtin::Example1),
                AnySystem::Dense(example([0.0, 1.0])),
            ),
            "example2" => (
                "example2".into(),
                Some(Builtin::Example2),
                AnySystem::Dense(example([1.0, 0.0])),
            ),
            path => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                (path.to_string(), None, read_system(&text)?)
            }
        },
    };
    let scenario = parse_scenario(&cli.scenario)?;
    Ok(Loaded {
        label,
        builtin,
        system: system.scenario_matrices(&scenario)?,
    })
}

fn parse_scenario(s: &str) -> Result<InputScenario<f64>, CliError> {
    match s {
        "impulse" => Ok(InputScenario::Impulse),
        "init" => Ok(InputScenario::FullInitialCondition),
        _ => {
            let path = s
                .strip_prefix("structured:")
                .ok_or_else(|| CliError::Config(format!("unknown scenario `{s}`")))?;
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            Ok(InputScenario::StructuredInitialCondition(parse_matrix(&text)?))
        }
    }
}

/// `R C` header followed by `R * C` real entries, row-major.
fn parse_matrix(text: &str) -> Result<CMatrix<f64>, CliError> {
    let bad = |m: String| CliError::Config(format!("initial-condition matrix: {m}"));
    let mut tokens = text.split_whitespace();
    let mut count = || -> Result<usize, CliError> {
        let t = tokens.next().ok_or_else(|| bad("missing header".into()))?;
        t.parse().map_err(|_| bad(format!("bad dimension `{t}`")))
    };
    let (r, c) = (count()?, count()?);
    let values: Vec<f64> = tokens
        .map(|t| t.parse::<f64>().map_err(|_| bad(format!("`{t}` is not a number"))))
        .collect::<Result<_, _>>()?;
    if values.len() != r * c {
        return Err(bad(format!("expected {} entries, found {}", r * c, values.len())));
    }
    Ok(CMatrix::from_real(r, c, &values)?)
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| CliError::io(path.display(), e))?;
    Ok((path, BufWriter::new(file)))
}

/// Writes one artifact through `fill` and flushes it.
fn emit(
    dir: &Path,
    name: &str,
    fill: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<PathBuf, CliError> {
    let (path, mut w) = create(dir, name)?;
    fill(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path.display(), e))?;
    Ok(path)
}

fn grid_spec(args: &GridArgs, norm: NormKind) -> Result<GridSpec<f64>, CliError> {
    let d = GridSpec::default();
    let (re, im) = args.window.map_or((d.re, d.im), |w| (w.re, w.im));
    Ok(GridSpec::new(re, im, args.res.unwrap_or(d.resolution), norm)?)
}

fn default_levels(builtin: Option<Builtin>) -> Option<Vec<f64>> {
    match builtin {
        Some(Builtin::Example1) => Some(vec![0.25, 1.0]),
        Some(Builtin::Example2) => Some(vec![0.5]),
        None => None,
    }
}

fn plot_points(sys: &AnySystem<f64>) -> Vec<Complex<f64>> {
    if let Some(p) = sys.poles() {
        return p;
    }
    if sys.state_dim() > EIGENVALUE_PLOT_LIMIT {
        return Vec::new();
    }
    sys.dense().and_then(|d| eigenvalues(d.a()).ok()).unwrap_or_default()
}

fn run_grid(cli: &Cli, sys: &Loaded, args: &GridArgs) -> Result<(), CliError> {
    let spec = grid_spec(args, cli.norm)?;
    let grid = evaluate_grid(&sys.system, &spec)?;
    let path = emit(&cli.out, "grid.csv", |w| write_grid_csv(&grid, w))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_curves(cli: &Cli, sys: &Loaded, args: &CurvesArgs) -> Result<(), CliError> {
    let levels = args
        .eps
        .clone()
        .or_else(|| default_levels(sys.builtin))
        .ok_or_else(|| CliError::Config("--eps is required for this system".into()))?;
    let spec = grid_spec(&args.grid, cli.norm)?;
    let grid = evaluate_grid(&sys.system, &spec)?;
    let mut curves = Vec::new();
    for &eps in &levels {
        match extract_level_curves(&grid, eps) {
            Ok(c) => curves.extend(c),
            Err(iospectra::Error::EmptyLevel) => eprintln!("level {} does not cross the grid", fmt17(eps)),
            Err(e) => return Err(e.into()),
        }
    }
    let eig = plot_points(&sys.system);
    for (name, path) in [
        ("grid.csv", emit(&cli.out, "grid.csv", |w| write_grid_csv(&grid, w))?),
        (
            "curves.csv",
            emit(&cli.out, "curves.csv", |w| write_curves_csv(&curves, w))?,
        ),
        (
            "pseudospectra.svg",
            emit(&cli.out, "pseudospectra.svg", |w| {
                write_svg(&curves, &eig, (spec.re, spec.im), w)
            })?,
        ),
    ] {
        println!("wrote {name}: {}", path.display());
    }
    Ok(())
}

fn run_bode(cli: &Cli, sys: &Loaded, args: &BodeArgs) -> Result<(), CliError> {
    let omegas = args.omega.unwrap_or(DEFAULT_OMEGA).points();
    let mut rows = Vec::with_capacity(omegas.len());
    let mut singular = 0;
    for w in omegas {
        match sys.system.transfer_norm(Complex::new(0.0, w), cli.norm) {
            Ok(v) if v.is_finite() => rows.push((w, v)),
            Ok(_) | Err(_) => {
                eprintln!("singular evaluation at omega = {}; row skipped", fmt17(w));
                singular += 1;
            }
        }
    }
    let path = emit(&cli.out, "bode.csv", |w| {
        writeln!(w, "omega,amplitude")?;
        rows.iter()
            .try_for_each(|(o, v)| writeln!(w, "{},{}", fmt17(*o), fmt17(*v)))
    })?;
    println!("wrote {}", path.display());
    if singular > 0 {
        return Err(CliError::SingularRows(singular));
    }
    Ok(())
}

fn report_config(cli: &Cli, sys: &Loaded, args: &BoundsArgs) -> Result<ReportConfig<f64>, CliError> {
    let mut quad = QuadratureConfig::default();
    if let Some(tol) = args.tol {
        quad.abs_tol = tol;
        quad.rel_tol = tol;
        quad.validate()?;
    }
    let circle = args.circle.or(match sys.builtin {
        Some(Builtin::Example2) if args.eps.is_none() => Some((-1.0, 0.0, 1.0)),
        _ => None,
    });
    let (epsilons, contour) = match circle {
        Some((re, im, radius)) => (
            Vec::new(),
            Some(ContourSource::Circle {
                center: Complex::new(re, im),
                radius,
                samples: CIRCLE_SAMPLES,
            }),
        ),
        None => {
            let levels = args
                .eps
                .clone()
                .or_else(|| default_levels(sys.builtin))
                .unwrap_or_default();
            let source = (!levels.is_empty()).then(|| grid_spec(&args.grid, cli.norm).map(ContourSource::Grid));
            (levels, source.transpose()?)
        }
    };
    Ok(ReportConfig {
        norm: cli.norm,
        quad,
        a: match args.a {
            AArg::Optimize => AChoice::Optimize,
            AArg::Fixed(a) => AChoice::Fixed(a),
        },
        epsilons,
        contour,
        hull: args.hull,
        ..ReportConfig::default()
    })
}

fn run_bounds(cli: &Cli, sys: &Loaded, args: &BoundsArgs) -> Result<(), CliError> {
    let cfg = report_config(cli, sys, args)?;
    let report = compute_report(&sys.system, &cfg)?;
    emit(&cli.out, "bounds.txt", |w| report.write_text(w))?;
    emit(&cli.out, "bounds.csv", |w| {
        writeln!(w, "{}", BoundReport::<f64>::csv_header())?;
        writeln!(w, "{}", report.csv_row(&sys.label))
    })?;
    print!("{}", report.to_text());
    Ok(())
}

fn run_oracle(cli: &Cli, sys: &Loaded, args: &OracleArgs) -> Result<(), CliError> {
    let cfg = HorizonConfig {
        horizon: args.horizon,
        ..HorizonConfig::default()
    };
    let trace = transient_sup(&sys.system, cli.norm, &cfg)?;
    let path = emit(&cli.out, "trace.csv", |w| trace.write_csv(w))?;
    println!(
        "sup = {} at t = {} (converged: {}); wrote {}",
        fmt17(trace.sup_value),
        fmt17(trace.sup_time),
        trace.converged,
        path.display()
    );
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let sys = load(cli)?;
    let analysis = match &cli.command {
        Command::Analysis(a) => a,
        Command::Platoon(p) => &p.analysis,
    };
    match analysis {
        Analysis::Grid(a) => run_grid(cli, &sys, a),
        Analysis::Curves(a) => run_curves(cli, &sys, a),
        Analysis::Bode(a) => run_bode(cli, &sys, a),
        Analysis::Bounds(a) => run_bounds(cli, &sys, a),
        Analysis::Oracle(a) => run_oracle(cli, &sys, a),
    }
}
