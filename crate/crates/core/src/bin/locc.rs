use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use locc_core::generators::{copyable_pair, nonprime_counterexample, orthogonal_pair, smallest_factorization};
use locc_core::io::{PairJson, ProtocolJson, SchmidtJson, StateJson};
use locc_core::locc::{pairwise_check, PairwiseReport};
use locc_core::majorization::{catalysis_report, majorization_table, MajorizationTable};
use locc_core::simulator::copy_outcome;
use locc_core::{
    emit_locc_transcript, max_entangled, orthogonality, pair_operator, spectral_verdict, synthesize_protocol,
    BipartiteState, CopyVerdict, LoccError, NumericConfig, Orthogonality,
};

#[derive(Parser)]
#[command(name = "locc", version, about = "LOCC copying of maximally entangled states")]
struct Cli {
    #[command(flatten)]
    tol: Tolerances,
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Tolerances {
    #[arg(long, global = true)]
    unitarity_tol: Option<f64>,
    #[arg(long, global = true)]
    eig_tol: Option<f64>,
    #[arg(long, global = true)]
    phase_tol: Option<f64>,
    #[arg(long, global = true)]
    ortho_tol: Option<f64>,
    #[arg(long, global = true)]
    sum_tol: Option<f64>,
    #[arg(long, global = true)]
    fidelity_tol: Option<f64>,
    #[arg(long, global = true)]
    max_entangled_tol: Option<f64>,
    #[arg(long, global = true)]
    normalization_tol: Option<f64>,
}

impl Tolerances {
    fn config(&self) -> NumericConfig {
        let mut c = NumericConfig::default();
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut c.unitarity_tol, self.unitarity_tol);
        set(&mut c.eig_reconstruction_tol, self.eig_tol);
        set(&mut c.phase_tol, self.phase_tol);
        set(&mut c.ortho_tol, self.ortho_tol);
        set(&mut c.sum_tol, self.sum_tol);
        set(&mut c.fidelity_tol, self.fidelity_tol);
        set(&mut c.max_entangled_tol, self.max_entangled_tol);
        set(&mut c.normalization_tol, self.normalization_tol);
        c
    }
}

#[derive(Subcommand)]
enum Command {
    /// Can SOURCE be converted to TARGET by LOCC? Prints the partial-sum table.
    Majorize { source: PathBuf, target: PathBuf },
    /// Copy verdict for a partially entangled state onto a blank.
    Catalysis { psi: PathBuf, blank: PathBuf },
    /// Orthogonality and spectral verdict. One pair file, or two or more state files.
    CheckPair {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Synthesize the local unitaries copying a pair onto a blank.
    Synthesize {
        /// A pair file, or two state files.
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<PathBuf>,
        /// Blank state file; defaults to the standard maximally entangled state.
        #[arg(long)]
        blank: Option<PathBuf>,
        /// Also emit the LOCC transcript.
        #[arg(long)]
        transcript: bool,
    },
    /// Run a protocol on a state and report the copy fidelity.
    Simulate { protocol: PathBuf, state: PathBuf },
    /// Generate a pair of maximally entangled states.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        d: usize,
        /// Number of distinct eigenvalues for the copyable family; defaults to the smallest divisor of d.
        #[arg(long)]
        m: Option<usize>,
        /// Spacing inside each eigenvalue group for the nonprime family; random in (0, 2π/d) if absent.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, env = "LOCC_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Fraction of sampled pairs that are copyable, per dimension.
    Survey {
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Family::Orthogonal)]
        family: Family,
        #[arg(long, env = "LOCC_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Orthogonal,
    Copyable,
    Nonprime,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Orthogonal => "orthogonal",
            Family::Copyable => "copyable",
            Family::Nonprime => "nonprime",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Negative,
    Input(String),
}

impl From<LoccError> for Failure {
    fn from(e: LoccError) -> Self {
        match e {
            LoccError::NotCopyable(_) | LoccError::VerificationFailed { .. } => {
                eprintln!("locc: {e}");
                Failure::Negative
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<bool, Failure>;

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(text)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> std::result::Result<T, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_state(path: &Path, cfg: &NumericConfig) -> std::result::Result<BipartiteState, Failure> {
    read_json::<StateJson>(path)?.to_state(cfg).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// A single file holding a pair, or one state per file.
fn read_states(inputs: &[PathBuf], cfg: &NumericConfig) -> std::result::Result<Vec<BipartiteState>, Failure> {
    if let [single] = inputs {
        let pair: PairJson = read_json(single)?;
        let (a, b) = pair.to_states(cfg).map_err(|e| Failure::Input(format!("{}: {e}", single.display())))?;
        return Ok(vec![a, b]);
    }
    inputs.iter().map(|p| read_state(p, cfg)).collect()
}

fn emit<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn table_text(t: &MajorizationTable) -> String {
    let mut s = String::from("  k   upper        lower\n");
    for (k, (u, l)) in t.upper.iter().zip(&t.lower).enumerate() {
        let mark = if t.first_violation == Some(k + 1) { "  <- first violation" } else { "" };
        let _ = writeln!(s, "{:3}   {:.9}  {:.9}{mark}", k + 1, u, l);
    }
    s
}

fn run_majorize(source: &Path, target: &Path, cfg: &NumericConfig, pretty: bool) -> Outcome {
    let src = read_json::<SchmidtJson>(source)?.to_vector(cfg.normalization_tol)?;
    let dst = read_json::<SchmidtJson>(target)?.to_vector(cfg.normalization_tol)?;
    let table = majorization_table(dst.probs(), src.probs(), cfg.sum_tol);
    let ok = table.holds();
    if pretty {
        print!("{}", table_text(&table));
        println!("transformable: {ok}");
    } else {
        emit(&json!({ "source": src.probs(), "target": dst.probs(), "table": table, "transformable": ok }));
    }
    Ok(ok)
}

fn run_catalysis(psi: &Path, blank: &Path, cfg: &NumericConfig, pretty: bool) -> Outcome {
    let psi = read_json::<SchmidtJson>(psi)?.to_vector(cfg.normalization_tol)?;
    let blank = read_json::<SchmidtJson>(blank)?.to_vector(cfg.normalization_tol)?;
    let report = catalysis_report(&psi, &blank, cfg.sum_tol);
    if pretty {
        println!("direct:");
        print!("{}", table_text(&report.direct));
        println!("tensored:");
        print!("{}", table_text(&report.tensored));
        println!("verdict: {}", report.verdict);
    } else {
        emit(&report);
    }
    Ok(report.verdict != CopyVerdict::Impossible)
}

fn pretty_pairwise(report: &PairwiseReport) {
    for p in &report.pairs {
        let s = &p.spectrum;
        println!(
            "pair ({}, {}): {:?}, M = {}, multiplicities {:?}, copyable = {}",
            p.i,
            p.j,
            p.orthogonality,
            s.detected_m.map_or("-".to_string(), |m| m.to_string()),
            s.multiplicities(),
            s.copyable
        );
    }
    println!("all pairs copyable: {} ({})", report.all_pairs_copyable, report.scope);
}

fn run_check_pair(inputs: &[PathBuf], cfg: &NumericConfig, pretty: bool) -> Outcome {
    let states = read_states(inputs, cfg)?;
    if states.len() == 2 {
        let t = pair_operator(&states[0], &states[1], cfg)?;
        let orth = orthogonality(&t, cfg.ortho_tol);
        let spectrum = spectral_verdict(&t, cfg)?;
        let copyable = orth == Orthogonality::Orthogonal && spectrum.copyable;
        if pretty {
            println!("orthogonality: {orth:?}");
            for c in &spectrum.clusters {
                println!("  phase {:>12.9}  x{}", c.phase, c.multiplicity);
            }
            println!(
                "M = {}, equally spaced = {}, equal degeneracy = {}",
                spectrum.detected_m.map_or("-".to_string(), |m| m.to_string()),
                spectrum.equally_spaced,
                spectrum.equal_degeneracy
            );
            println!("copyable: {copyable}");
        } else {
            emit(&json!({ "orthogonality": orth, "spectrum": spectrum, "copyable": copyable }));
        }
        return Ok(copyable);
    }
    let report = pairwise_check(&states, cfg)?;
    if pretty {
        pretty_pairwise(&report);
    } else {
        emit(&report);
    }
    Ok(report.all_pairs_copyable)
}

fn run_synthesize(
    inputs: &[PathBuf],
    blank: Option<&Path>,
    transcript: bool,
    cfg: &NumericConfig,
    pretty: bool,
) -> Outcome {
    let states = read_states(inputs, cfg)?;
    let [psi1, psi2] = states.as_slice() else {
        return Err(Failure::Input(format!("expected two states, got {}", states.len())));
    };
    let blank = match blank {
        Some(p) => read_state(p, cfg)?,
        None => max_entangled(psi1.dim())?,
    };
    let protocol = synthesize_protocol(psi1, psi2, &blank, cfg)?;
    let doc = ProtocolJson::from_protocol(&protocol);
    if pretty {
        println!("d = {}, wiring {}", protocol.d, protocol.wiring);
        println!("phases: {:?}", protocol.phases);
        if transcript {
            print!("{}", emit_locc_transcript(&protocol));
        }
    } else if transcript {
        emit(&json!({ "protocol": doc, "transcript": emit_locc_transcript(&protocol) }));
    } else {
        emit(&doc);
    }
    Ok(true)
}

fn run_simulate(protocol: &Path, state: &Path, cfg: &NumericConfig, pretty: bool) -> Outcome {
    let doc: ProtocolJson = read_json(protocol)?;
    let protocol = doc.to_protocol(cfg).map_err(|e| Failure::Input(format!("{}: {e}", protocol.display())))?;
    let psi = read_state(state, cfg)?;
    let out = copy_outcome(&protocol, &psi)?;
    let success = out.fidelity >= 1.0 - cfg.fidelity_tol;
    if pretty {
        println!("fidelity {:.15}, theta {:.12}, success {success}", out.fidelity, out.theta);
    } else {
        emit(&json!({ "fidelity": out.fidelity, "theta": out.theta, "success": success }));
    }
    Ok(success)
}

fn smallest_divisor(d: usize) -> Option<usize> {
    (2..=d).find(|m| d.is_multiple_of(*m))
}

fn divisors(d: usize) -> Vec<usize> {
    (2..=d).filter(|m| d.is_multiple_of(*m)).collect()
}

/// Draws one pair of the family. `m` and `delta` are drawn when absent.
fn sample_pair(
    family: Family,
    d: usize,
    m: Option<usize>,
    delta: Option<f64>,
    seed: u64,
) -> std::result::Result<(BipartiteState, BipartiteState), Failure> {
    let pair = match family {
        Family::Orthogonal => orthogonal_pair(d, seed)?,
        Family::Copyable => {
            let m = m
                .or_else(|| smallest_divisor(d))
                .ok_or_else(|| Failure::Input(format!("d = {d} has no divisor m ≥ 2")))?;
            copyable_pair(d, m, seed)?
        }
        Family::Nonprime => {
            let (d1, d2) = smallest_factorization(d)
                .ok_or_else(|| Failure::Input(format!("d = {d} is not a product of two factors ≥ 2")))?;
            let delta = match delta {
                Some(x) => x,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_de17a);
                    let hi = std::f64::consts::TAU / d as f64;
                    loop {
                        let x = rng.random::<f64>() * hi;
                        if x > 0.0 {
                            break x;
                        }
                    }
                }
            };
            nonprime_counterexample(d1, d2, delta, seed)?
        }
    };
    Ok(pair)
}

fn run_generate(family: Family, d: usize, m: Option<usize>, delta: Option<f64>, seed: u64) -> Outcome {
    let (a, b) = sample_pair(family, d, m, delta, seed)?;
    emit(&PairJson::new(&a, &b, Some(family.name().to_string()), Some(seed)));
    Ok(true)
}

/// Per-sample seed, independent of scheduling.
fn sample_seed(seed: u64, d: usize, index: usize) -> u64 {
    let mut z =
        seed ^ (d as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (index as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Serialize)]
struct SurveyRow {
    d: usize,
    family: &'static str,
    samples: usize,
    orthogonal: usize,
    copyable: usize,
    errors: usize,
    fraction_copyable: f64,
}

fn run_survey(ds: &[usize], samples: usize, family: Family, seed: u64, cfg: &NumericConfig, pretty: bool) -> Outcome {
    let mut rows = Vec::with_capacity(ds.len());
    for &d in ds {
        if d < 2 {
            return Err(Failure::Input(format!("d must be at least 2, got {d}")));
        }
        if matches!(family, Family::Nonprime) && smallest_factorization(d).is_none() {
            return Err(Failure::Input(format!("d = {d} is not a product of two factors ≥ 2")));
        }
        let ms = divisors(d);
        let results: Vec<Option<(bool, bool)>> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let m = matches!(family, Family::Copyable).then(|| ms[i % ms.len()]);
                let (a, b) = sample_pair(family, d, m, None, sample_seed(seed, d, i)).ok()?;
                let t = pair_operator(&a, &b, cfg).ok()?;
                let orth = orthogonality(&t, cfg.ortho_tol) == Orthogonality::Orthogonal;
                let report = spectral_verdict(&t, cfg).ok()?;
                Some((orth, orth && report.copyable))
            })
            .collect();
        let orthogonal = results.iter().flatten().filter(|r| r.0).count();
        let copyable = results.iter().flatten().filter(|r| r.1).count();
        let errors = results.iter().filter(|r| r.is_none()).count();
        rows.push(SurveyRow {
            d,
            family: family.name(),
            samples,
            orthogonal,
            copyable,
            errors,
            fraction_copyable: if samples == 0 { 0.0 } else { copyable as f64 / samples as f64 },
        });
    }
    if pretty {
        println!(
            "{:>4}  {:<10} {:>8} {:>10} {:>9} {:>6} {:>9}",
            "d", "family", "samples", "orthogonal", "copyable", "errors", "fraction"
        );
        for r in &rows {
            println!(
                "{:>4}  {:<10} {:>8} {:>10} {:>9} {:>6} {:>8.1}%",
                r.d,
                r.family,
                r.samples,
                r.orthogonal,
                r.copyable,
                r.errors,
                100.0 * r.fraction_copyable
            );
        }
    } else {
        emit(&json!({ "seed": seed, "rows": rows }));
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = cli.tol.config();
    let pretty = cli.pretty;
    let outcome = match &cli.command {
        Command::Majorize { source, target } => run_majorize(source, target, &cfg, pretty),
        Command::Catalysis { psi, blank } => run_catalysis(psi, blank, &cfg, pretty),
        Command::CheckPair { inputs } => run_check_pair(inputs, &cfg, pretty),
        Command::Synthesize { inputs, blank, transcript } => {
            run_synthesize(inputs, blank.as_deref(), *transcript, &cfg, pretty)
        }
        Command::Simulate { protocol, state } => run_simulate(protocol, state, &cfg, pretty),
        Command::Generate { family, d, m, delta, seed } => run_generate(*family, *d, *m, *delta, *seed),
        Command::Survey { d, samples, family, seed } => run_survey(d, *samples, *family, *seed, &cfg, pretty),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) | Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("locc: {msg}");
            ExitCode::from(2)
        }
    }
}
