//! Command-line front end.
//!
//! Every run writes its outputs plus a `manifest.json` into the output
//! directory (`--out`, else `$GOLOMB_RMT_OUT`, else `./golomb-rmt-out`).
//! Exit codes: 0 success, 1 verification failure, 2 usage or parameter error.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::codes;
use crate::eigen::{self, CirculantBackend, Spectrum};
use crate::ensembles::{self, EnsembleSpec, Matrix, ShiftSelection, TridiagVariant};
use crate::error::{Error, Result};
use crate::gf2::{self, Gf2Poly};
use crate::laws::{self, RefLaw};
use crate::sequences::{self, parse_seed, MSeq};

pub const OUT_ENV: &str = "GOLOMB_RMT_OUT";
const DEFAULT_OUT: &str = "golomb-rmt-out";

#[derive(Parser, Debug, Clone, Serialize, Deserialize)]
#[command(name = "golomb-rmt", version, about = "Pseudo-random matrices from binary m-sequences")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
pub enum Command {
    /// Generate one period of an m-sequence and audit it.
    Seq(SeqArgs),
    /// Build one matrix and export it.
    Matrix(MatrixArgs),
    /// Spectrum, histogram, KS distances and moments of one or more members.
    Spectrum(SpectrumArgs),
    /// Moment statistics across ensemble sizes.
    Ensemble(EnsembleArgs),
    /// Exhaustive desk-scale verifications.
    Verify(VerifyArgs),
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SeqArgs {
    /// Feedback polynomial, e.g. "x^5+x^2+1".
    #[arg(long)]
    pub poly: Option<String>,
    /// Degree; selects the built-in primitive polynomial when --poly is absent.
    #[arg(long)]
    pub m: Option<u32>,
    /// Initial register contents as bits, or `ones`.
    #[arg(long, default_value = "ones")]
    pub seed: String,
    #[arg(long, value_enum, default_value_t = Checks::All)]
    pub checks: Checks,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Checks {
    All,
    None,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Pseudo,
    DVariant,
    Wigner,
    RandomCirculant,
    Paley,
    TridiagHermite,
    SquaredPseudo,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Standard,
    PaperLiteral,
}

impl From<Variant> for TridiagVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Standard => TridiagVariant::Standard,
            Variant::PaperLiteral => TridiagVariant::PaperLiteral,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, default_value = "ones")]
    pub seed: String,
    #[arg(long, default_value_t = 0)]
    pub shift: usize,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sign: i8,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub q: Option<u64>,
    /// Scale Paley matrices by 1/(2 sqrt q).
    #[arg(long)]
    pub scaled: bool,
    #[arg(long, value_enum, default_value_t = Variant::Standard)]
    pub variant: Variant,
    /// Master seed for random families and shift sampling.
    #[arg(long, default_value_t = 7)]
    pub rng: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixFormat {
    Csv,
    Line,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// `line` (circulants only): scale followed by the first row.
    #[arg(long, value_enum, default_value_t = MatrixFormat::Csv)]
    pub format: MatrixFormat,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverChoice {
    Auto,
    Direct,
    Fft,
    Dense,
    Jacobi,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Pseudo families: `K` random shifts or `all`; eigenvalues are pooled.
    #[arg(long)]
    pub shifts: Option<String>,
    /// Random families: number of realizations to pool.
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = SolverChoice::Auto)]
    pub solver: SolverChoice,
    #[arg(long, default_value_t = laws::DEFAULT_BINS)]
    pub bins: usize,
    /// Also write an SVG of the density against the reference law.
    #[arg(long)]
    pub svg: bool,
    /// Default to figure scale (m = 13) instead of m = 11.
    #[arg(long)]
    pub full: bool,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Degrees for pseudo families, e.g. `9..12` or `10,12`.
    #[arg(long)]
    pub m: Option<String>,
    /// Dimensions for random families, e.g. `256,512,1024`.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long, default_value = "ones")]
    pub seed: String,
    #[arg(long, default_value_t = 4)]
    pub r_max: u32,
    /// Shifts (pseudo; default all for m <= 9, else 100) or realizations (default 20).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 7)]
    pub rng: u64,
    #[arg(long, value_enum, default_value_t = Variant::Standard)]
    pub variant: Variant,
    /// Default to m = 12..14 instead of 9..12.
    #[arg(long)]
    pub full: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    Axioms,
    Codes,
    Solvers,
    All,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Degree range, e.g. `2..10`.
    #[arg(long)]
    pub m: Option<String>,
    /// Matrix dimension for the solver suite.
    #[arg(long)]
    pub n: Option<usize>,
    /// Tuple length for the appendix identities.
    #[arg(long, default_value_t = 4)]
    pub r: usize,
}

/// Parses `a..b` (inclusive), `a,b,c` or a single value.
pub fn parse_list(text: &str) -> Result<Vec<u64>> {
    let num = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| Error::parse(s, "expected a non-negative integer"))
    };
    if let Some((a, b)) = text.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(Error::parse(text, "empty range"));
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(num).collect()
}

/// Entry point shared by the binary; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let argv: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli, argv) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Verification(_) => 1,
                _ => 2,
            }
        }
    }
}

fn execute(cli: Cli, argv: Vec<String>) -> Result<bool> {
    if let Command::Replay { manifest } = &cli.command {
        let text = fs::read_to_string(manifest)?;
        let recorded: Value = serde_json::from_str(&text)?;
        let mut old: Vec<String> = serde_json::from_value(recorded["argv"].clone())?;
        if let Some(out) = &cli.out {
            let mut kept = Vec::with_capacity(old.len());
            let mut iter = old.into_iter();
            while let Some(arg) = iter.next() {
                if arg == "--out" {
                    iter.next();
                } else if !arg.starts_with("--out=") {
                    kept.push(arg);
                }
            }
            old = kept;
            old.push("--out".into());
            old.push(out.to_string_lossy().into_owned());
        }
        let replayed =
            Cli::try_parse_from(&old).map_err(|e| Error::parse(old.join(" "), e.to_string()))?;
        return execute(replayed, old);
    }
    if let Some(t) = cli.threads {
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    fs::create_dir_all(&out)?;
    let mut run = Run { dir: out, outputs: Vec::new() };
    let ok = match &cli.command {
        Command::Seq(a) => cmd_seq(a, &mut run)?,
        Command::Matrix(a) => cmd_matrix(a, &mut run)?,
        Command::Spectrum(a) => cmd_spectrum(a, &mut run)?,
        Command::Ensemble(a) => cmd_ensemble(a, &mut run)?,
        Command::Verify(a) => cmd_verify(a, &mut run)?,
        Command::Replay { .. } => unreachable!("handled above"),
    };
    let manifest = json!({
        "tool": "golomb-rmt",
        "version": env!("CARGO_PKG_VERSION"),
        "argv": argv,
        "config": cli,
        "outputs": run.outputs,
        "success": ok,
    });
    run.write("manifest.json", &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    Ok(ok)
}

struct Run {
    dir: PathBuf,
    outputs: Vec<String>,
}

impl Run {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        if name != "manifest.json" {
            self.outputs.push(name.to_string());
        }
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        self.write(name, &(serde_json::to_string_pretty(value)? + "\n"))
    }
}

fn resolve_poly(poly: Option<&str>, m: Option<u32>, fallback_m: Option<u32>) -> Result<Gf2Poly> {
    let f = match (poly, m.or(fallback_m)) {
        (Some(text), _) => text.parse::<Gf2Poly>()?,
        (None, Some(m)) => gf2::default_primitive(m)?,
        (None, None) => return Err(Error::Domain("one of --poly or --m is required".into())),
    };
    if !f.is_primitive()? {
        return Err(Error::Domain(format!("{f} is not primitive")));
    }
    if let (Some(m), Some(d)) = (m, f.degree()) {
        if poly.is_some() && m != d {
            return Err(Error::Domain(format!("--m {m} disagrees with the degree of {f}")));
        }
    }
    Ok(f)
}

fn make_sequence(poly: Option<&str>, m: Option<u32>, fallback_m: Option<u32>, seed: &str) -> Result<MSeq> {
    let f = resolve_poly(poly, m, fallback_m)?;
    let degree = f.degree().unwrap_or(0);
    MSeq::new(f, &parse_seed(seed, degree)?)
}

fn cmd_seq(a: &SeqArgs, run: &mut Run) -> Result<bool> {
    let s = make_sequence(a.poly.as_deref(), a.m, None, &a.seed)?;
    run.write("sequence.txt", &(s.to_line() + "\n"))?;
    println!("generator {}  n = {}", s.generator(), s.len());
    if a.checks == Checks::None {
        return Ok(true);
    }
    let report = sequences::run_battery(&s);
    let mut serial = String::from("k,max_discrepancy\n");
    for (k, d) in &report.serial {
        serial.push_str(&format!("{k},{d}\n"));
    }
    run.write("serial.csv", &serial)?;
    run.write_json("report.json", &report)?;
    println!("balance {} ({})", report.balance, verdict(report.balance_pass));
    println!("runs ({})", verdict(report.runs.pass));
    println!("autocorrelation two-valued ({})", verdict(report.autocorrelation_two_valued));
    println!("window property ({})", verdict(report.window_pass));
    println!("serial test ({})", verdict(report.serial_pass));
    println!("shift-and-add ({})", verdict(report.shift_and_add_bijection));
    println!(
        "linear complexity L = {} ({}), description length {} bits",
        report.linear_complexity,
        verdict(report.linear_complexity_pass),
        report.description_bits
    );
    Ok(report.pass())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn family_spec(a: &FamilyArgs, fallback_m: u32, stream: u64) -> Result<(EnsembleSpec, Option<MSeq>)> {
    let need = |what: &str| Error::Domain(format!("--{what} is required for this family"));
    Ok(match a.family {
        Family::Pseudo | Family::SquaredPseudo | Family::DVariant => {
            let s = make_sequence(a.poly.as_deref(), a.m, Some(fallback_m), &a.seed)?;
            let spec = match a.family {
                Family::DVariant => EnsembleSpec::DVariant {
                    poly: s.generator(),
                    seed: a.seed.clone(),
                    shift: a.shift,
                },
                Family::SquaredPseudo => EnsembleSpec::SquaredPseudo {
                    poly: s.generator(),
                    seed: a.seed.clone(),
                    shift: a.shift,
                    sign: a.sign,
                },
                _ => EnsembleSpec::Pseudo {
                    poly: s.generator(),
                    seed: a.seed.clone(),
                    shift: a.shift,
                    sign: a.sign,
                },
            };
            (spec, Some(s))
        }
        Family::Wigner => (
            EnsembleSpec::Wigner {
                n: a.n.ok_or_else(|| need("n"))?,
                rng_seed: a.rng,
                stream,
            },
            None,
        ),
        Family::RandomCirculant => (
            EnsembleSpec::RandomCirculant {
                n: a.n.ok_or_else(|| need("n"))?,
                rng_seed: a.rng,
                stream,
            },
            None,
        ),
        Family::TridiagHermite => (
            EnsembleSpec::TridiagHermite {
                n: a.n.ok_or_else(|| need("n"))?,
                rng_seed: a.rng,
                stream,
                variant: a.variant.into(),
            },
            None,
        ),
        Family::Paley => (
            EnsembleSpec::Paley {
                q: a.q.ok_or_else(|| need("q"))?,
                scaled: a.scaled,
            },
            None,
        ),
    })
}

fn cmd_matrix(a: &MatrixArgs, run: &mut Run) -> Result<bool> {
    let (spec, seq) = family_spec(&a.family, 11, 0)?;
    let matrix = spec.realize_with(seq.as_ref())?;
    match (a.format, &matrix) {
        (MatrixFormat::Line, Matrix::Circulant(c)) => run.write("matrix.txt", &(c.to_line() + "\n"))?,
        (MatrixFormat::Line, _) => {
            return Err(Error::Domain("line format needs a circulant family".into()));
        }
        (MatrixFormat::Csv, m) => run.write("matrix.csv", &m.to_dense().to_csv())?,
    }
    run.write_json("spec.json", &spec)?;
    println!("{} n = {}", spec.family(), matrix.n());
    Ok(true)
}

fn member_spectrum(spec: &EnsembleSpec, seq: Option<&MSeq>, solver: SolverChoice) -> Result<Spectrum> {
    let matrix = spec.realize_with(seq)?;
    let sp = match (solver, &matrix) {
        (SolverChoice::Auto | SolverChoice::Direct, m) => eigen::matrix_spectrum(m, CirculantBackend::Direct)?,
        (SolverChoice::Fft, m) => eigen::matrix_spectrum(m, CirculantBackend::Fft)?,
        (SolverChoice::Dense, m) => eigen::dense_sym_eigenvalues(&m.to_dense())?,
        (SolverChoice::Jacobi, m) => eigen::jacobi_eigenvalues(&m.to_dense())?,
    };
    Ok(if spec.is_squared() { eigen::spectrum_square(&sp) } else { sp })
}

fn with_shift(spec: &EnsembleSpec, a: usize) -> EnsembleSpec {
    let mut spec = spec.clone();
    match &mut spec {
        EnsembleSpec::Pseudo { shift, .. }
        | EnsembleSpec::SquaredPseudo { shift, .. }
        | EnsembleSpec::DVariant { shift, .. } => *shift = a,
        _ => {}
    }
    spec
}

fn with_stream(spec: &EnsembleSpec, k: u64) -> EnsembleSpec {
    let mut spec = spec.clone();
    match &mut spec {
        EnsembleSpec::Wigner { stream, .. }
        | EnsembleSpec::RandomCirculant { stream, .. }
        | EnsembleSpec::TridiagHermite { stream, .. } => *stream = k,
        _ => {}
    }
    spec
}

fn cmd_spectrum(a: &SpectrumArgs, run: &mut Run) -> Result<bool> {
    let fallback_m = if a.full { 13 } else { 11 };
    let (base, seq) = family_spec(&a.family, fallback_m, 0)?;
    let members: Vec<EnsembleSpec> = match (&seq, a.shifts.as_deref()) {
        (Some(s), Some(text)) => {
            let selection = if text == "all" {
                ShiftSelection::All
            } else {
                let count = text
                    .parse::<usize>()
                    .map_err(|_| Error::parse(text, "expected a count or `all`"))?;
                ShiftSelection::Sample { count, rng_seed: a.family.rng }
            };
            selection.shifts(s.len())?.into_iter().map(|k| with_shift(&base, k)).collect()
        }
        (None, Some(_)) => return Err(Error::Domain("--shifts applies to sequence-based families".into())),
        (_, None) => match a.family.family {
            Family::Wigner | Family::RandomCirculant | Family::TridiagHermite => {
                (0..a.samples.max(1) as u64).map(|k| with_stream(&base, k)).collect()
            }
            _ => vec![base.clone()],
        },
    };

    let spectra: Vec<Spectrum> = {
        use rayon::prelude::*;
        members
            .par_iter()
            .map(|m| member_spectrum(m, seq.as_ref(), a.solver))
            .collect::<Result<_>>()?
    };
    let n = spectra[0].n();
    let solver = spectra[0].provenance();
    let pooled: Vec<f64> = spectra.iter().flat_map(|s| s.values().iter().copied()).collect();
    let pooled = Spectrum::new(pooled, solver)?;

    let squared = base.is_squared();
    let mut csv = format!("# members={}\n", members.len());
    csv.push_str(&pooled.to_csv(base.family(), &base.hash()));
    run.write("spectrum.csv", &csv)?;

    let (lo, hi) = if squared { laws::MARCHENKO_PASTUR_RANGE } else { laws::SEMICIRCLE_RANGE };
    let margin = 0.05 * (pooled.max() - pooled.min()).max(1e-12);
    let range = (lo.min(pooled.min() - margin), hi.max(pooled.max() + margin));
    let hist = laws::make_histogram(pooled.values(), a.bins, range)?;
    run.write("histogram.csv", &hist.to_csv())?;

    let mut ks = serde_json::Map::new();
    let reference = if squared {
        RefLaw::marchenko_pastur(1.0)?
    } else {
        RefLaw::Semicircle
    };
    ks.insert(reference.name().into(), json!(laws::ks_distance(&pooled, &reference)));
    if let Ok(g) = RefLaw::gaussian_fit(pooled.values()) {
        ks.insert("gaussian_fit".into(), json!(laws::ks_distance(&pooled, &g)));
    }
    let moments: Vec<f64> = laws::empirical_moments(&pooled, 8);
    let mut summary = json!({
        "family": base.family(),
        "n": n,
        "members": members.len(),
        "solver": solver.to_string(),
        "min": pooled.min(),
        "max": pooled.max(),
        "ks": ks,
        "moments": moments,
        "reference_moments": (1..=8).map(|r| reference.moment(r)).collect::<Result<Vec<_>>>()?,
    });
    if let Family::Paley = a.family.family {
        let clusters = eigen::cluster_spikes(&pooled);
        println!("{} spike clusters", clusters.len());
        summary["clusters"] = serde_json::to_value(&clusters)?;
    }
    if let Family::TridiagHermite = a.family.family {
        let divergent = pooled.max() > 1.5 || pooled.min() < -1.5;
        summary["divergent"] = json!(divergent);
        if divergent {
            println!("spectrum leaves [-1.5, 1.5]: divergent");
        }
    }
    run.write_json("summary.json", &summary)?;
    if a.svg {
        run.write("spectrum.svg", &density_svg(&hist, Some(&reference)))?;
    }
    for (name, value) in summary["ks"].as_object().expect("object") {
        println!("KS to {name}: {:.6}", value.as_f64().unwrap_or(f64::NAN));
    }
    println!("{} members, n = {}, range [{:.6}, {:.6}]", members.len(), n, pooled.min(), pooled.max());
    Ok(true)
}

fn cmd_ensemble(a: &EnsembleArgs, run: &mut Run) -> Result<bool> {
    let squared = a.family == Family::SquaredPseudo;
    let reference = if squared {
        RefLaw::marchenko_pastur(1.0)?
    } else {
        RefLaw::Semicircle
    };
    let mut csv = String::from(laws::MOMENT_CSV_HEADER);
    let mut ns = Vec::new();
    let mut reports = Vec::new();
    match a.family {
        Family::Pseudo | Family::SquaredPseudo => {
            let default_range = if a.full { "12..14" } else { "9..12" };
            for m in parse_list(a.m.as_deref().unwrap_or(default_range))? {
                let m = u32::try_from(m).map_err(|_| Error::Domain(format!("degree {m} too large")))?;
                let s = make_sequence(None, Some(m), None, &a.seed)?;
                let selection = match a.samples {
                    None if m <= 9 => ShiftSelection::All,
                    None => ShiftSelection::Sample { count: 100, rng_seed: a.rng },
                    Some(count) => ShiftSelection::Sample { count, rng_seed: a.rng },
                };
                let specs = ensembles::pseudo_members(&s, selection, true, squared)?;
                let report = laws::ensemble_stats(&specs, a.r_max, None, a.rng, reference, CirculantBackend::Fft)?;
                csv.push_str(&report.csv_rows(Some(m)));
                ns.push(s.len() as f64);
                reports.push(report);
            }
        }
        Family::Wigner | Family::RandomCirculant | Family::TridiagHermite => {
            let list = a
                .n
                .as_deref()
                .ok_or_else(|| Error::Domain("--n is required for random families".into()))?;
            let count = a.samples.unwrap_or(20) as u64;
            for n in parse_list(list)? {
                let n = n as usize;
                let specs: Vec<EnsembleSpec> = (0..count)
                    .map(|stream| match a.family {
                        Family::Wigner => EnsembleSpec::Wigner { n, rng_seed: a.rng, stream },
                        Family::RandomCirculant => EnsembleSpec::RandomCirculant { n, rng_seed: a.rng, stream },
                        _ => EnsembleSpec::TridiagHermite {
                            n,
                            rng_seed: a.rng,
                            stream,
                            variant: a.variant.into(),
                        },
                    })
                    .collect();
                let report = laws::ensemble_stats(&specs, a.r_max, None, a.rng, reference, CirculantBackend::Direct)?;
                csv.push_str(&report.csv_rows(None));
                ns.push(n as f64);
                reports.push(report);
            }
        }
        Family::DVariant | Family::Paley => {
            return Err(Error::Domain("ensemble sweeps support pseudo, squared-pseudo and random families".into()));
        }
    }
    run.write("moments.csv", &csv)?;
    let slopes: Vec<Option<f64>> = (1..=a.r_max)
        .map(|r| {
            let stds: Vec<f64> = reports.iter().map(|rep| rep.std_of(r)).collect();
            laws::loglog_slope(&ns, &stds).ok()
        })
        .collect();
    let summary = json!({
        "family": format!("{:?}", a.family),
        "n": ns,
        "mean": reports.iter().map(|r| r.mean.clone()).collect::<Vec<_>>(),
        "std": reports.iter().map(|r| r.std.clone()).collect::<Vec<_>>(),
        "reference": reports.first().map(|r| r.reference.clone()),
        "std_loglog_slope": slopes,
    });
    run.write_json("summary.json", &summary)?;
    for (r, slope) in slopes.iter().enumerate() {
        if let Some(s) = slope {
            println!("r = {}: log-log slope of std vs n = {s:.4}", r + 1);
        }
    }
    Ok(true)
}

fn verify_axioms(ms: &[u64]) -> Result<Value> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for &m in ms {
        for f in gf2::primitive_polynomials(m as u32)? {
            let s = MSeq::new(f, &vec![1; m as usize])?;
            let report = sequences::run_battery(&s);
            checked += 1;
            if !report.pass() {
                failures.push(serde_json::to_value(&report)?);
            }
        }
    }
    Ok(json!({ "suite": "axioms", "sequences": checked, "pass": failures.is_empty(), "failures": failures }))
}

fn verify_codes(ms: &[u64], r: usize) -> Result<Value> {
    let mut entries = Vec::new();
    let mut pass = true;
    for &m in ms {
        let m = m as u32;
        let f = gf2::default_primitive(m)?;
        let simplex = codes::simplex_code(f)?;
        let hamming = codes::hamming_code(f)?;
        let dual = simplex
            .basis()
            .iter()
            .all(|a| hamming.basis().iter().all(|b| !a.dot(b)));
        let simplex_weights = codes::weight_spectrum(&simplex)?;
        let constant_weight = simplex_weights
            .iter()
            .enumerate()
            .all(|(w, &c)| (w == 0 && c == 1) || (w == 1 << (m - 1) && c == (1 << m) - 1) || c == 0);
        let palindromic = codes::verify_palindromic_dimension(f);
        let mut entry = json!({
            "m": m,
            "duality": dual,
            "simplex_constant_weight": constant_weight,
            "palindromic_dimension": palindromic.as_ref().ok().map(|p| p.dimension),
            "palindromic_expected": codes::expected_palindromic_dimension(m),
        });
        pass &= dual && constant_weight && palindromic.is_ok();
        let s = MSeq::new(f, &vec![1; m as usize])?;
        let mut appendix = Vec::new();
        for constrained in [true, false] {
            match codes::verify_appendix_identities(&s, r, constrained) {
                Ok(rep) => {
                    pass &= rep.pass();
                    appendix.push(serde_json::to_value(&rep)?);
                }
                Err(Error::Capability(msg)) => appendix.push(json!({ "skipped": msg, "constrained": constrained })),
                Err(e) => return Err(e),
            }
        }
        entry["appendix"] = Value::Array(appendix);
        entries.push(entry);
    }
    let self_reciprocal: Vec<String> = codes::self_reciprocal_primitives(12)?.iter().map(|f| f.to_string()).collect();
    pass &= self_reciprocal == ["x+1", "x^2+x+1"];
    Ok(json!({ "suite": "codes", "pass": pass, "codes": entries, "self_reciprocal_primitives": self_reciprocal }))
}

fn verify_solvers(n: usize) -> Result<Value> {
    let mut worst: f64 = 0.0;
    let mut members = 0;
    let mut check = |c: &ensembles::SymCirculant| -> Result<()> {
        let direct = eigen::circulant_eigenvalues(c, CirculantBackend::Direct)?;
        let dense_matrix = c.to_dense();
        let dense = eigen::dense_sym_eigenvalues(&dense_matrix)?;
        worst = worst.max(direct.max_abs_diff(&dense));
        if n <= eigen::JACOBI_MAX_N {
            worst = worst.max(direct.max_abs_diff(&eigen::jacobi_eigenvalues(&dense_matrix)?));
        }
        members += 1;
        Ok(())
    };
    if (n + 1).is_power_of_two() && n >= 3 {
        let m = (n + 1).trailing_zeros();
        let s = MSeq::new(gf2::default_primitive(m)?, &vec![1; m as usize])?;
        for a in 0..n {
            check(&ensembles::build_pseudo(&s, a, 1)?)?;
        }
    } else {
        for k in 0..20 {
            check(&ensembles::sample_random_circulant(n, &mut ensembles::member_rng(1, k))?)?;
        }
    }
    Ok(json!({ "suite": "solvers", "n": n, "members": members, "max_abs_diff": worst, "pass": worst < 1e-8 }))
}

fn cmd_verify(a: &VerifyArgs, run: &mut Run) -> Result<bool> {
    let mut results = Vec::new();
    let pick = |default: &str| parse_list(a.m.as_deref().unwrap_or(default));
    if matches!(a.suite, Suite::Axioms | Suite::All) {
        results.push(verify_axioms(&pick("2..10")?)?);
    }
    if matches!(a.suite, Suite::Codes | Suite::All) {
        let default = if a.suite == Suite::All { "3..5" } else { "3" };
        results.push(verify_codes(&pick(default)?, a.r)?);
    }
    if matches!(a.suite, Suite::Solvers | Suite::All) {
        results.push(verify_solvers(a.n.unwrap_or(31))?);
    }
    let pass = results.iter().all(|r| r["pass"] == json!(true));
    let report = json!({ "pass": pass, "suites": results });
    run.write_json("report.json", &report)?;
    for r in &results {
        println!("{}: {}", r["suite"].as_str().unwrap_or("?"), verdict(r["pass"] == json!(true)));
    }
    if !pass {
        eprintln!("{}", serde_json::to_string(&report)?);
    }
    Ok(pass)
}

/// Histogram density as a step polyline with an optional reference pdf.
pub fn density_svg(hist: &laws::Histogram, reference: Option<&RefLaw>) -> String {
    let (w, h, pad) = (640.0, 400.0, 40.0);
    let (x0, x1) = (hist.edges[0], hist.edges[hist.edges.len() - 1]);
    let grid: Vec<f64> = (0..=400).map(|i| x0 + (x1 - x0) * i as f64 / 400.0).collect();
    let ref_peak = reference
        .map(|law| grid.iter().map(|&x| law.pdf(x)).fold(0.0, f64::max))
        .unwrap_or(0.0);
    let hist_peak = hist.density.iter().copied().fold(0.0, f64::max);
    // Cap at a few times the histogram peak so an integrable pole stays on screen.
    let y_max = hist_peak.max(ref_peak.min(3.0 * hist_peak)).max(1e-12) * 1.05;
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - y.min(y_max) / y_max * (h - 2.0 * pad);
    let mut steps = Vec::new();
    for (i, d) in hist.density.iter().enumerate() {
        steps.push(format!("{:.2},{:.2}", sx(hist.edges[i]), sy(*d)));
        steps.push(format!("{:.2},{:.2}", sx(hist.edges[i + 1]), sy(*d)));
    }
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <line x1=\"{pad}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{pad}\" y=\"{t}\" font-size=\"12\">{x0:.2}</text>\n\
         <text x=\"{r}\" y=\"{t}\" font-size=\"12\" text-anchor=\"end\">{x1:.2}</text>\n\
         <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        steps.join(" "),
        b = h - pad,
        r = w - pad,
        t = h - pad + 16.0,
    );
    if let Some(law) = reference {
        let pts: Vec<String> = grid
            .iter()
            .map(|&x| format!("{:.2},{:.2}", sx(x), sy(law.pdf(x))))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"firebrick\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("9..12").unwrap(), vec![9, 10, 11, 12]);
        assert_eq!(parse_list("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_list("256,512").unwrap(), vec![256, 512]);
        assert_eq!(parse_list("5").unwrap(), vec![5]);
        assert!(parse_list("12..9").is_err());
        assert!(parse_list("a").is_err());
    }

    #[test]
    fn poly_resolution() {
        assert!(resolve_poly(Some("x^2+1"), None, None).is_err());
        assert_eq!(resolve_poly(None, Some(5), None).unwrap().degree(), Some(5));
        assert!(resolve_poly(Some("x^3+x+1"), Some(4), None).is_err());
        assert!(resolve_poly(None, None, None).is_err());
    }
}
