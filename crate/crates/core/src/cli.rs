//! Command line surface: document loading, check commands, probes, exports.
//!
//! Exit codes: 0 pass/success, 1 check failed (witness printed), 2 input or
//! schema error, 3 mode unsupported for the input (e.g. exact mode on
//! modulated spectra).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::complex::Complex64;

use crate::builtins::{builtin_system, BUILTIN_NAMES};
use crate::characterization::{
    check_ntf_translates, check_strong_disjointness, check_super_wavelet, dimension_probe_points,
    lower_bound_probe, offset_set_check, oversample, scaling_spectral_function, verify_system,
    CheckOptions, CheckReport, SystemKind, WaveletSystem,
};
use crate::docs::{csv_string, parse_document, report_to_json, serialize_document, Document};
use crate::error::Error;
use crate::fiber::FiberOperator;
use crate::invariants::{
    dimension_function, dual_gramian_matrix, extract_quasi_orthogonal, fiber_refinement,
    local_trace_operator, multiplicity_at, scaling_limit_probe, spectral_function,
    ShiftInvariantSpace, DEFAULT_RANK_TOL,
};
use crate::rational::{parse_ratio, RationalPi};
use crate::spectrum::{common_refinement, grid_points, StepSpectrum, Window};

#[derive(Parser)]
#[command(
    name = "superwave",
    version,
    about = "Exact frequency-domain checks for wavelet and super-wavelet candidates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Grid,
}

#[derive(Args)]
struct InputArg {
    /// Path to a JSON document
    input: Option<PathBuf>,
    /// Built-in document instead of a file: shannon, shannon-scaling,
    /// half-shannon, shannon-3band
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Args)]
struct CommonArgs {
    /// exact: exhaustive midpoint verification; grid: sampled points
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    /// Grid points per 2*pi (grid mode)
    #[arg(long, default_value_t = 1024)]
    grid_points: usize,
    /// Residual tolerance override
    #[arg(long)]
    tol: Option<f64>,
    /// Window [A, B) as pi-coefficients, e.g. --window -1 1
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    window: Option<Vec<String>>,
    /// Exclusion radius around accumulation points, pi-coefficient
    #[arg(long, default_value = "1/1024")]
    epsilon: String,
    /// Seed for randomized probe offsets
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Scale-level truncation for grid mode on supports touching 0
    #[arg(long, default_value_t = 16)]
    level_bound: u32,
    /// Check all (i, j) pairs instead of only i <= j
    #[arg(long)]
    all_pairs: bool,
    /// Write per-evaluation CSV rows to this path
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Print the JSON report instead of prose
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an affine structure (or a system's structure)
    Validate {
        #[command(flatten)]
        input: InputArg,
    },
    /// Check the normalized-tight-frame translate equations on a window
    CheckNtf {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the super-wavelet characterization equations
    CheckWavelet {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        common: CommonArgs,
        /// Write the (tag-upgraded on pass) system document here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check strong disjointness of two scalar wavelet lists
    CheckDisjoint {
        /// First JSON document
        input1: Option<PathBuf>,
        /// Second JSON document
        input2: Option<PathBuf>,
        /// Built-in for the first input
        #[arg(long)]
        builtin: Option<String>,
        /// Built-in for the second input
        #[arg(long)]
        builtin2: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Build the p-fold oversampled super-wavelet system
    Oversample {
        #[command(flatten)]
        input: InputArg,
        /// Scale N (defaults to the input structure's scale)
        #[arg(long = "N")]
        scale: Option<u32>,
        /// Oversampling factor p (coprime to N)
        #[arg(long = "p")]
        p: u32,
        /// Output path for the system document (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Local trace of an operator over the generators of the input system
    Trace {
        #[command(flatten)]
        input: InputArg,
        /// Operator document (default: identity)
        #[arg(long)]
        operator: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Dual Gramian entries at a point
    DualGramian {
        #[command(flatten)]
        input: InputArg,
        /// Evaluation point, pi-coefficient
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        /// Lattice index bound |k| <= K
        #[arg(long, default_value_t = 2)]
        k_window: i64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// The i-th spectral function of the generator family
    Spectral {
        #[command(flatten)]
        input: InputArg,
        /// Component index (1-based)
        #[arg(long, default_value_t = 1)]
        component: usize,
        /// Treat the input as a wavelet system and compute the core-space
        /// spectral function from scale levels m >= 1 (requires --window
        /// kept --epsilon away from every theta)
        #[arg(long)]
        via_wavelet: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// The dimension function of the generator family
    Dimension {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fiber rank (multiplicity) at probe points
    Multiplicity {
        #[command(flatten)]
        input: InputArg,
        /// Single evaluation point (default: refinement midpoints)
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Extract quasi-orthogonal generators by per-cell orthogonalization
    ExtractQo {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        common: CommonArgs,
        /// Output path for the extracted system document
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scaling-limit probe of the generator family
    ProbeLimit {
        #[command(flatten)]
        input: InputArg,
        /// Component index (1-based)
        #[arg(long, default_value_t = 1)]
        component: usize,
        /// Probe point, pi-coefficient (nonzero)
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        /// Highest scale level
        #[arg(long, default_value_t = 30)]
        m_max: usize,
    },
    /// Lower-bound probe of the wavelet dimension function near a point
    ProbeLowerBound {
        #[command(flatten)]
        input: InputArg,
        /// Accumulation point alpha0, pi-coefficient
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        alpha: String,
        /// Approach offset xi0, pi-coefficient (nonzero)
        #[arg(long, allow_hyphen_values = true, default_value = "1/3")]
        xi: String,
        /// Number of approach levels
        #[arg(long, default_value_t = 16)]
        depth: usize,
    },
    /// Integer identity behind the oversampling offset set
    OffsetSet {
        #[arg(long = "N")]
        scale: u32,
        #[arg(long = "p")]
        p: u32,
        /// Check all |q| <= Q
        #[arg(long = "Q", default_value_t = 50)]
        q_bound: i64,
        #[command(flatten)]
        common: CommonArgs,
    },
}

impl InputArg {
    fn load(&self) -> Result<(WaveletSystem, Vec<String>), Error> {
        match (&self.input, &self.builtin) {
            (Some(_), Some(_)) => Err(Error::schema(
                "input",
                "give either a file or --builtin, not both",
            )),
            (None, Some(name)) => Ok((builtin_system(name)?, Vec::new())),
            (Some(path), None) => load_system_file(path),
            (None, None) => Err(Error::schema(
                "input",
                format!(
                    "missing input document (or use --builtin with one of {})",
                    BUILTIN_NAMES.join(", ")
                ),
            )),
        }
    }
}

fn load_system_file(path: &Path) -> Result<(WaveletSystem, Vec<String>), Error> {
    let text = std::fs::read_to_string(path)?;
    let (doc, warnings) = parse_document(&text)?;
    match doc {
        Document::System(system) => Ok((system, warnings)),
        Document::Function(function) => Err(Error::schema(
            "$.kind",
            format!(
                "expected a system document; wrap function `{}` in a system with a structure",
                function.label
            ),
        )),
        _ => Err(Error::schema("$.kind", "expected a system document")),
    }
}

impl CommonArgs {
    fn options(&self) -> CheckOptions {
        let mut opts = match self.mode {
            ModeArg::Exact => CheckOptions::exact(),
            ModeArg::Grid => CheckOptions::grid(),
        };
        opts.grid_density = self.grid_points;
        opts.tolerance = self.tol;
        opts.level_bound = self.level_bound;
        opts.all_pairs = self.all_pairs;
        opts
    }

    fn window(&self) -> Result<Option<Window>, Error> {
        match &self.window {
            None => Ok(None),
            Some(parts) => {
                let left: RationalPi = parts[0].parse()?;
                let right: RationalPi = parts[1].parse()?;
                if left >= right {
                    return Err(Error::schema("--window", "window must be nonempty"));
                }
                Ok(Some(Window::new(left, right)))
            }
        }
    }

    fn epsilon(&self) -> Result<RationalPi, Error> {
        Ok(RationalPi::from_ratio(parse_ratio(&self.epsilon)?))
    }

    fn write_csv(&self, rows: &[(RationalPi, Complex64)]) -> Result<(), Error> {
        if let Some(path) = &self.csv {
            std::fs::write(path, csv_string(rows))?;
        }
        Ok(())
    }
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        println!("note: {w}");
    }
}

fn print_report(name: &str, report: &CheckReport, common: &CommonArgs) -> Result<(), Error> {
    common.write_csv(&report.rows)?;
    if common.json {
        println!("{}", serde_json::to_string_pretty(&report_to_json(report)).expect("report json"));
        return Ok(());
    }
    println!("check: {name}");
    println!("mode: {}", report.mode.as_str());
    println!("tolerance: {:.1e}", report.tolerance);
    println!("cells checked: {}", report.cells_checked);
    println!("max residual: {:.1e}", report.max_residual);
    for note in &report.notes {
        println!("note: {note}");
    }
    match &report.witness {
        Some(witness) => println!("witness: {}", witness.describe()),
        None => {}
    }
    println!("result: {}", if report.passed { "PASS" } else { "FAIL" });
    Ok(())
}

fn trace_points(
    system: &WaveletSystem,
    common: &CommonArgs,
    window: &Window,
) -> Vec<RationalPi> {
    match common.mode {
        ModeArg::Exact => fiber_refinement(&system.psis, &system.structure, window)
            .into_iter()
            .map(|c| c.mid)
            .collect(),
        ModeArg::Grid => {
            let opts = common.options();
            grid_points(window, common.grid_points.max(1), &opts.grid_offset)
        }
    }
}

fn warn_unverified(system: &WaveletSystem) {
    if system.kind == SystemKind::Candidate {
        println!(
            "warning: generators are not NTF-verified; values are conditional on the frame hypothesis"
        );
    }
}

/// Scalar wavelet lists for the disjointness command.
fn scalar_list(system: &WaveletSystem) -> Result<(u32, Vec<StepSpectrum>), Error> {
    if system.structure.n() != 1 {
        return Err(Error::schema(
            "$.structure.n",
            "disjointness takes scalar (n = 1) wavelet lists",
        ));
    }
    Ok((
        system.structure.scale(),
        system
            .psis
            .iter()
            .map(|p| p.components[0].clone())
            .collect(),
    ))
}

fn run_command(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Validate { input } => {
            // Accepts either a bare structure document or a system.
            let structure = match (&input.input, &input.builtin) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(path)?;
                    let (doc, warnings) = parse_document(&text)?;
                    print_warnings(&warnings);
                    match doc {
                        Document::Structure(s) => s,
                        Document::System(system) => system.structure,
                        _ => {
                            return Err(Error::schema(
                                "$.kind",
                                "expected a structure or system document",
                            ))
                        }
                    }
                }
                _ => {
                    let (system, warnings) = input.load()?;
                    print_warnings(&warnings);
                    system.structure
                }
            };
            let violations = structure.validate();
            if violations.is_empty() {
                println!("structure: ok (n={}, N={})", structure.n(), structure.scale());
                Ok(0)
            } else {
                for v in &violations {
                    println!("violation at index {}: {}", v.index, v.description);
                }
                Ok(1)
            }
        }
        Command::CheckNtf { input, common } => {
            let (system, warnings) = input.load()?;
            print_warnings(&warnings);
            let window = common.window()?.unwrap_or_else(Window::fundamental);
            let report =
                check_ntf_translates(&system.psis, &system.structure, &window, &common.options())?;
            print_report("check-ntf", &report, &common)?;
            Ok(report.exit_code())
        }
        Command::CheckWavelet { input, common, out } => {
            let (system, warnings) = input.load()?;
            print_warnings(&warnings);
            let report = check_super_wavelet(&system, &common.options())?;
            print_report("check-wavelet", &report, &common)?;
            if let Some(path) = out {
                let (_, upgraded) = verify_system(system, &common.options());
                std::fs::write(&path, serialize_document(&Document::System(upgraded))?)?;
                println!("wrote {}", path.display());
            }
            Ok(report.exit_code())
        }
        Command::CheckDisjoint {
            input1,
            input2,
            builtin,
            builtin2,
            common,
        } => {
            let first = InputArg {
                input: input1,
                builtin,
            };
            let second = InputArg {
                input: input2,
                builtin: builtin2,
            };
            let (sys1, w1) = first.load()?;
            let (sys2, w2) = second.load()?;
            print_warnings(&w1);
            print_warnings(&w2);
            let (scale1, psis) = scalar_list(&sys1)?;
            let (scale2, others) = scalar_list(&sys2)?;
            if scale1 != scale2 {
                return Err(Error::schema(
                    "$.structure.N",
                    format!("scales differ: {scale1} vs {scale2}"),
                ));
            }
            let report =
                check_strong_disjointness(&psis, &others, scale1, &common.options())?;
            print_report("check-disjoint", &report, &common)?;
            Ok(report.exit_code())
        }
        Command::Oversample {
            input,
            scale,
            p,
            out,
        } => {
            let (system, warnings) = input.load()?;
            print_warnings(&warnings);
            let (doc_scale, psis) = scalar_list(&system)?;
            let scale = scale.unwrap_or(doc_scale);
            if scale != doc_scale {
                return Err(Error::schema(
                    "--N",
                    format!("input structure has N={doc_scale}, flag says N={scale}"),
                ));
            }
            let labels: Vec<String> = system.psis.iter().map(|p| p.label.clone()).collect();
            let oversampled = oversample(&psis, scale, p, Some(&labels))?;
            let text = serialize_document(&Document::System(oversampled))?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Trace {
            input,
            operator,
            common,
        } => {
            let (system, warnings) = input.load()?;
            print_warnings(&warnings);
            warn_unverified(&system);
            let op = match operator {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    match parse_document(&text)?.0 {
                        Document::Operator(op) => op,
                        _ => {
                            return Err(Error::schema("$.kind", "expected an operator document"))
                        }
                    }
                }
                None => FiberOperator::Identity,
            };
            let window = common.window()?.unwrap_or_else(Window::fundamental);
            let points = trace_points(&system, &common, &window);
            let space = ShiftInvariantSpace::new(system.psis.clone());
            let rows: Vec<(RationalPi, Complex64)> = points
                .iter()
                .map(|xi| {
                    (
                        xi.clone(),
                        local_trace_operator(&space, &system.structure, &op, xi),
                    )
                })
                .collect();
            common.write_csv(&rows)?;
            for (xi, value) in &rows {
                println!("xi = {xi}·π: {} {:+}i", value.re, value.im);
            }
            Ok(0)
        }
        Command::DualGramian {
            input,
            xi,
            k_window,
            common,
        } => {
            let (system, warnings) = input.load()?;
            print_warnings(&warnings);
            warn_unverified(&system);
            let xi: RationalPi = xi.parse()?;
            let space = ShiftInvariantSpace::new(system.psis.clone());
            let entries = dual_gramian_matrix(&space, &system.structure, &xi, k_window);
            let rows: Vec<(RationalPi, Complex64)> = entries
                .iter()
                .map(|(_, _, value)| (xi.clone(), *value))
                .collect();
            common.write_csv(&rows)?;
            for (row, col, value) in &entries {
                if *value != Complex64::ZERO {
                    println!(
                        "G[({},{}),({},{})] = {} {:+}i",
                        row.k, row.comp, col.k, col.comp, value.re, value.im
                    );
                }
            }
            println!(
                "{} entries ({} nonzero) at xi = {}·π",
                entries.len(),
                entries.iter().filter(|(_, _, v)| *v != Complex64::ZERO).count(),
                xi
            );
            Ok(0)
        }
        Command::Spectral {
            input,
            component,
            via_wavelet,
            common,
        } => {
            let (system, warnings) = input.load()?;
            print_warnings(&warnings);
            warn_unverified(&system);
            if component == 0 || component > system.structure.n() {
                return Err(Error::schema("--component", "component out of range"));
            }
            let spectrum = if via_wavelet {
                let window = common.window()?.ok_or_else(|| {
                    Error::schema("--window", "--via-wavelet requires an explicit window")
                })?;
                let epsilon = common.epsilon()?;
                println!(
                    "note: excluded {}·π-balls around the theta values; mass there is not represented",
                    epsilon
                );
                scaling_spectral_function(&system, component, &window, &epsilon)?
            } else {
                let space = ShiftInvariantSpace::new(system.psis.clone());
                let mut spectrum = spectral_function(&space, &system.structure, component);
                if let Some(window) = common.window()? {
                    spectrum = spectrum.restrict(&window);
                }
                spectrum
            };
            let label = format!("spectral-{component}");
            let doc = Document::Function(crate::fiber::VectorFunction::scalar(label, spectrum.clone()));
            print!("{}", serialize_document(&doc)?);
            let hull = spectrum_hull_window(&spectrum);
            if let Some(window) = hull {
                let rows: Vec<(RationalPi, Complex64)> = common_refinement(&[&spectrum], &window)
                    .into_iter()
                    .map(|c| (c.mid.clone(), spectrum.evaluate(&c.mid)))
                    .collect();
                common.write_csv(&rows)?;
            } else {
                common.write_csv(&[])?;
            }
            Ok(0)
        }
        Command::Dimension { input, common } => {
            let (system, warnings) = input.load()?;
            print_warnings(&warnings);
            warn_unverified(&system);
            let space = ShiftInvariantSpace::new(system.psis.clone());
            let dim = dimension_function(&space, &system.structure)?;
            let doc = Document::Function(crate::fiber::VectorFunction::scalar(
                "dimension",
                dim.base().clone(),
            ));
            print!("{}", serialize_document(&doc)?);
            let window = Window::fundamental();
            let rows: Vec<(RationalPi, Complex64)> = common_refinement(&[dim.base()], &window)
                .into_iter()
                .map(|c| (c.mid.clone(), dim.base().evaluate(&c.mid)))
                .collect();
            common.write_csv(&rows)?;
            Ok(0)
        }
        Command::Multiplicity { input, xi, common } => {
            let (system, warnings) = input.load()?;
            print_warnings(&warnings);
            let space = ShiftInvariantSpace::new(system.psis.clone());
            let tol = common.tol.unwrap_or(DEFAULT_RANK_TOL);
            let points = match xi {
                Some(text) => vec![text.parse::<RationalPi>()?],
                None => {
                    let window = common.window()?.unwrap_or_else(Window::fundamental);
                    match common.mode {
                        ModeArg::Exact => trace_points(&system, &common, &window),
                        ModeArg::Grid => dimension_probe_points(
                            common.grid_points.max(1),
                            common.seed,
                        ),
                    }
                }
            };
            let rows: Vec<(RationalPi, Complex64)> = points
                .iter()
                .map(|p| {
                    let rank = multiplicity_at(&space, &system.structure, p, tol);
                    (p.clone(), Complex64::new(rank as f64, 0.0))
                })
                .collect();
            common.write_csv(&rows)?;
            for (xi, value) in &rows {
                println!("xi = {xi}·π: multiplicity {}", value.re as usize);
            }
            Ok(0)
        }
        Command::ExtractQo { input, common, out } => {
            let (system, warnings) = input.load()?;
            print_warnings(&warnings);
            let space = ShiftInvariantSpace::new(system.psis.clone());
            let tol = common.tol.unwrap_or(DEFAULT_RANK_TOL);
            let extracted = extract_quasi_orthogonal(&space, &system.structure, tol)?;
            println!("extracted {} quasi-orthogonal generators", extracted.len());
            for f in &extracted {
                println!(
                    "  {}: support measure {} (pi-units, per component sum)",
                    f.label,
                    crate::rational::format_ratio(&f.l2_norm_sq_exact())
                );
            }
            let mut out_system = WaveletSystem::candidate(system.structure.clone(), extracted)?;
            out_system.kind = SystemKind::Candidate;
            let text = serialize_document(&Document::System(out_system))?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::ProbeLimit {
            input,
            component,
            xi,
            m_max,
        } => {
            let (system, warnings) = input.load()?;
            print_warnings(&warnings);
            let space = ShiftInvariantSpace::new(system.psis.clone());
            let xi: RationalPi = xi.parse()?;
            let probe = scaling_limit_probe(&space, &system.structure, component, &xi, m_max)?;
            for (m, value) in probe.values.iter().enumerate() {
                println!("m = {m}: {value}");
            }
            match probe.settled_at {
                Some(m) => println!("settled within 1e-12 of 1 from m = {m}"),
                None => println!("NoConvergence within m <= {m_max}"),
            }
            Ok(0)
        }
        Command::ProbeLowerBound {
            input,
            alpha,
            xi,
            depth,
        } => {
            let (system, warnings) = input.load()?;
            print_warnings(&warnings);
            let alpha: RationalPi = alpha.parse()?;
            let xi: RationalPi = xi.parse()?;
            let probe = lower_bound_probe(&system, &alpha, &xi, depth)?;
            if !probe.hypothesis_met {
                println!("warning: hypothesis-unmet (system not verified; the bound assumes a semi-orthogonal wavelet)");
            }
            for (m, value) in probe.values.iter().enumerate() {
                println!("m = {}: D = {value}", m + 1);
            }
            println!(
                "card {{i : theta_i = {}·π}} = {}",
                alpha, probe.card
            );
            println!("verdict: {}", if probe.verdict { "PASS" } else { "FAIL" });
            Ok(if probe.verdict { 0 } else { 1 })
        }
        Command::OffsetSet {
            scale,
            p,
            q_bound,
            common,
        } => {
            let report = offset_set_check(scale, p, q_bound)?;
            print_report("offset-set", &report, &common)?;
            Ok(report.exit_code())
        }
    }
}

fn spectrum_hull_window(spectrum: &StepSpectrum) -> Option<Window> {
    let segs = spectrum.segments();
    if segs.is_empty() {
        return None;
    }
    Some(Window::new(
        segs[0].left.clone(),
        segs[segs.len() - 1].right.clone(),
    ))
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // clap prints help/version through the error path with code 0.
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match run_command(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
