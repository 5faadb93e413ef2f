//! `plateau` — command-line surface over the `plateau` library.
//!
//! Three subcommands:
//!
//! * `variance` — one gradient variance for one instance, by any method;
//! * `scan` — sweeps over qubit counts, observable sites, or all parameters,
//!   optionally with a power-law fit;
//! * `verify` — cross-method agreement report (exact engine vs closed forms
//!   vs brute-force oracle), nonzero exit on any failure.
//!
//! Output is CSV (fixed header) or JSON (array of records).  For fixed flags
//! and seed the emitted rows are deterministic.

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plateau::circuit::{
    build_ansatz, causal_cone, heisenberg_terms, ising_terms, Circuit, Family, Observable,
    ParamId,
};
use plateau::closed_form;
use plateau::oracle::{self, Method};
use plateau::zx;

/// Gradient variances of qMPS / qTTN / qMERA circuits, three independent ways.
#[derive(Parser)]
#[command(name = "plateau", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one gradient variance (one row per Hamiltonian term).
    Variance(VarianceArgs),
    /// Sweep an axis (qubit counts, observable site, or all parameters).
    Scan(ScanArgs),
    /// Cross-check the three evaluation paths against each other.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VarianceArgs {
    /// Ansatz family: qmps, qttn or qmera.
    #[arg(long)]
    ansatz: Family,
    /// Number of qubits N (qttn/qmera require a power of two).
    #[arg(long)]
    qubits: usize,
    /// Observable: `P:i` terms joined by `*` (e.g. `X:3`, `X:2*X:3`),
    /// or a preset `ising:J,h` / `heisenberg`.
    #[arg(long)]
    observable: String,
    /// Parameter address `j,k`: register j, ordinal k (both 1-based).
    #[arg(long)]
    param: String,
    /// Evaluation method.
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Monte Carlo sample count (mc only).
    #[arg(long, default_value_t = 200_000)]
    samples: u64,
    /// RNG seed (mc only); defaults to $PLATEAU_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ScanArgs {
    /// Ansatz family: qmps, qttn or qmera.
    #[arg(long)]
    ansatz: Family,
    /// Fixed qubit count (alternative to --qubits-range).
    #[arg(long)]
    qubits: Option<usize>,
    /// Qubit-count axis: inclusive range `A..B` or comma list `4,8,16`.
    #[arg(long)]
    qubits_range: Option<String>,
    /// Observable pattern.  Besides literal `P:i` terms, site indices may be
    /// the symbols `N` (current qubit count), `i` (the --site-range variable)
    /// or `i+1`.  Example: `X:i*X:i+1`.
    #[arg(long)]
    observable: String,
    /// Observable-site axis: inclusive range `A..B` or comma list, bound to
    /// the symbol `i` in --observable.
    #[arg(long)]
    site_range: Option<String>,
    /// Sweep every parameter of the circuit instead of a fixed one.
    #[arg(long)]
    all_params: bool,
    /// Fixed parameter address `j,k` (ignored with --all-params).
    #[arg(long, default_value = "1,1")]
    param: String,
    /// Evaluation method.
    #[arg(long, value_enum, default_value_t = MethodArg::Tn)]
    method: MethodArg,
    /// Monte Carlo sample count (mc only).
    #[arg(long, default_value_t = 200_000)]
    samples: u64,
    /// RNG seed (mc only); defaults to $PLATEAU_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Append a power-law fit `variance ≈ c·N^a` over the qubit axis.
    #[arg(long)]
    fit: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// fast: exact engine vs closed forms.  full: adds the grid-quadrature
    /// oracle and Monte Carlo spot checks.
    #[arg(long, value_enum, default_value_t = Level::Fast)]
    level: Level,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Tn,
    Closed,
    Mc,
    Grid,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Tn => Method::Tn,
            MethodArg::Closed => Method::Closed,
            MethodArg::Mc => Method::Mc,
            MethodArg::Grid => Method::Grid,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Fast,
    Full,
}

/// One output row.
#[derive(serde::Serialize)]
struct RunRecord {
    ansatz: String,
    n_qubits: usize,
    observable: String,
    param_j: usize,
    param_k: usize,
    method: String,
    variance: f64,
    stderr: f64,
    samples: u64,
    seed: u64,
    ms: u64,
}

const CSV_HEADER: &str = "ansatz,n_qubits,observable,param_j,param_k,method,variance,stderr,samples,seed,ms";

/// A usage/validation failure: printed as `error: <flag>: <message>`, exit 2.
struct UsageError {
    flag: &'static str,
    message: String,
}

fn usage(flag: &'static str, message: impl Into<String>) -> UsageError {
    UsageError {
        flag,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Variance(args) => cmd_variance(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Verify(args) => return cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {}", e.flag, e.message);
            ExitCode::from(2)
        }
    }
}

// ============================================================================
// Shared plumbing
// ============================================================================

fn default_seed(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| std::env::var("PLATEAU_SEED").ok()?.parse().ok())
        .unwrap_or(0)
}

fn parse_param(s: &str) -> Result<ParamId, UsageError> {
    let parts: Vec<&str> = s.split(',').collect();
    let err = || usage("--param", format!("expected 'j,k' (got '{s}')"));
    if parts.len() != 2 {
        return Err(err());
    }
    let j: usize = parts[0].trim().parse().map_err(|_| err())?;
    let k: usize = parts[1].trim().parse().map_err(|_| err())?;
    if j == 0 || k == 0 {
        return Err(usage("--param", "register and ordinal are 1-based"));
    }
    Ok(ParamId::new(j, k))
}

/// `A..B` inclusive, or a comma-separated list.
fn parse_axis(flag: &'static str, s: &str) -> Result<Vec<usize>, UsageError> {
    let err = |m: &str| usage(flag, format!("{m} (got '{s}')"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| err("bad range start"))?;
        let b: usize = b.trim().parse().map_err(|_| err("bad range end"))?;
        if a > b {
            return Err(err("empty range"));
        }
        Ok((a..=b).collect())
    } else {
        s.split(',')
            .map(|p| p.trim().parse().map_err(|_| err("bad list entry")))
            .collect()
    }
}

/// Expand `--observable` for one instance: presets become weighted term
/// lists; the symbols `N`, `i`, `i+1` are substituted from the sweep state.
fn expand_observable(
    pattern: &str,
    n_qubits: usize,
    site: Option<usize>,
) -> Result<Vec<(f64, Observable)>, UsageError> {
    let err = |m: String| usage("--observable", m);
    if let Some(rest) = pattern.strip_prefix("ising:") {
        let (j, h) = rest
            .split_once(',')
            .ok_or_else(|| err("ising preset needs 'ising:J,h'".into()))?;
        let j: f64 = j
            .trim()
            .parse()
            .map_err(|_| err(format!("bad ising J '{j}'")))?;
        let h: f64 = h
            .trim()
            .parse()
            .map_err(|_| err(format!("bad ising h '{h}'")))?;
        return Ok(ising_terms(n_qubits, j, h));
    }
    if pattern == "heisenberg" {
        return Ok(heisenberg_terms(n_qubits));
    }
    let mut text = String::new();
    for part in pattern.split('*') {
        let part = part.trim();
        if !text.is_empty() {
            text.push('*');
        }
        match part.split_once(':') {
            Some((p, idx)) => {
                let idx = idx.trim();
                let resolved = match idx {
                    "N" => n_qubits,
                    "i" => site.ok_or_else(|| {
                        err("observable uses 'i' but no --site-range was given".into())
                    })?,
                    "i+1" => {
                        site.ok_or_else(|| {
                            err("observable uses 'i+1' but no --site-range was given".into())
                        })? + 1
                    }
                    lit => lit
                        .parse()
                        .map_err(|_| err(format!("bad site index '{lit}'")))?,
                };
                let _ = write!(text, "{}:{}", p.trim(), resolved);
            }
            None => return Err(err(format!("expected 'P:i' terms (got '{part}')"))),
        }
    }
    let obs = Observable::parse(&text).map_err(|e| err(e.to_string()))?;
    Ok(vec![(1.0, obs)])
}

/// Evaluate one (instance, method) and build its output row.  A Hamiltonian
/// term's weight `c` scales the variance by `c²`.
#[allow(clippy::too_many_arguments)]
fn run_one(
    family: Family,
    circuit: &Circuit,
    weight: f64,
    observable: &Observable,
    param: ParamId,
    method: MethodArg,
    samples: u64,
    seed: u64,
) -> Result<RunRecord, UsageError> {
    let started = Instant::now();
    let n = circuit.n_qubits();
    let (variance, stderr, used_samples, used_seed) = match method {
        MethodArg::Tn => {
            let v = zx::contract_variance_tn(circuit, observable, param)
                .map_err(|e| usage("--param", e.to_string()))?;
            (v, 0.0, 0, 0)
        }
        MethodArg::Grid => {
            let est = oracle::grid_variance(circuit, observable, param)
                .map_err(|e| usage("--method", e.to_string()))?;
            (est.value, est.stderr, est.samples, est.seed)
        }
        MethodArg::Mc => {
            let est = oracle::mc_variance(circuit, observable, param, samples, seed)
                .map_err(|e| usage("--method", e.to_string()))?;
            (est.value, est.stderr, est.samples, est.seed)
        }
        MethodArg::Closed => {
            let v = closed_variance(family, n, observable, param)
                .map_err(|m| usage("--method", m))?;
            (v, 0.0, 0, 0)
        }
    };
    let canonical = observable
        .canonical_string()
        .expect("CLI observables are Pauli products");
    Ok(RunRecord {
        ansatz: family.to_string(),
        n_qubits: n,
        observable: canonical,
        param_j: param.register,
        param_k: param.ordinal,
        method: Method::from(method).to_string(),
        variance: weight * weight * variance,
        stderr: weight.abs() * weight.abs() * stderr,
        samples: used_samples,
        seed: used_seed,
        ms: started.elapsed().as_millis() as u64,
    })
}

/// Closed-form dispatch for the instances the analytic branches cover.
fn closed_variance(
    family: Family,
    n: usize,
    observable: &Observable,
    param: ParamId,
) -> Result<f64, String> {
    let not_covered = |what: &str| {
        Err(format!(
            "no closed form covers {what}; use --method tn for an exact value"
        ))
    };
    let sites: Vec<usize> = observable.sites().keys().copied().collect();
    let is_x = |i: usize| observable.sites()[&i] == [0.0, 1.0, 0.0, 0.0];
    match family {
        Family::QMps => match sites.as_slice() {
            [i] if is_x(*i) && param.ordinal == 1 => {
                closed_form::var_qmps_x(n, *i, param.register).map_err(|e| e.to_string())
            }
            [i, i2] if *i2 == i + 1 && is_x(*i) && is_x(*i2) && param == ParamId::new(1, 1) => {
                closed_form::var_qmps_xx(n, *i).map_err(|e| e.to_string())
            }
            _ => not_covered("this qMPS observable/parameter"),
        },
        Family::QTtn => {
            if param != ParamId::new(1, 1) || sites.len() != 1 || !is_x(sites[0]) {
                return not_covered("this qTTN observable/parameter");
            }
            let levels = n.trailing_zeros();
            if !n.is_power_of_two() || n < 2 {
                return Err("qTTN requires a power-of-two qubit count".into());
            }
            match sites[0] {
                1 => Ok(closed_form::var_qttn_x1(levels)),
                s if s == n => Ok(closed_form::var_qttn_xn(levels)),
                _ => not_covered("interior qTTN sites (bracketed, not pinned, by theory)"),
            }
        }
        Family::QMera | Family::Custom => not_covered("this family"),
    }
}

fn emit(records: &[RunRecord], fit: Option<&closed_form::PowerLawFit>, out: &OutputArgs) {
    let mut text = String::new();
    match out.format {
        Format::Csv => {
            text.push_str(CSV_HEADER);
            text.push('\n');
            for r in records {
                let _ = writeln!(
                    text,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.ansatz,
                    r.n_qubits,
                    r.observable,
                    r.param_j,
                    r.param_k,
                    r.method,
                    r.variance,
                    r.stderr,
                    r.samples,
                    r.seed,
                    r.ms
                );
            }
            if let Some(f) = fit {
                let _ = writeln!(
                    text,
                    "# fit: exponent={} prefactor={} r_squared={}",
                    f.exponent, f.prefactor, f.r_squared
                );
            }
        }
        Format::Json => {
            #[derive(serde::Serialize)]
            struct Doc<'a> {
                records: &'a [RunRecord],
                #[serde(skip_serializing_if = "Option::is_none")]
                fit: Option<FitDoc>,
            }
            #[derive(serde::Serialize)]
            struct FitDoc {
                exponent: f64,
                prefactor: f64,
                r_squared: f64,
            }
            let doc: serde_json::Value = if fit.is_none() {
                serde_json::to_value(records).unwrap()
            } else {
                serde_json::to_value(Doc {
                    records,
                    fit: fit.map(|f| FitDoc {
                        exponent: f.exponent,
                        prefactor: f.prefactor,
                        r_squared: f.r_squared,
                    }),
                })
                .unwrap()
            };
            text = serde_json::to_string_pretty(&doc).unwrap();
            text.push('\n');
        }
    }
    match &out.out {
        Some(path) => std::fs::write(path, text).unwrap_or_else(|e| {
            eprintln!("error: --out: cannot write {}: {e}", path.display());
            std::process::exit(2);
        }),
        None => print!("{text}"),
    }
}

// ============================================================================
// variance
// ============================================================================

fn cmd_variance(args: VarianceArgs) -> Result<(), UsageError> {
    let circuit = build_ansatz(args.ansatz, args.qubits)
        .map_err(|e| usage("--qubits", e.to_string()))?;
    let param = parse_param(&args.param)?;
    circuit
        .param_gate_index(param)
        .map_err(|e| usage("--param", e.to_string()))?;
    let terms = expand_observable(&args.observable, args.qubits, None)?;
    let seed = default_seed(args.seed);
    let mut records = Vec::new();
    for (weight, obs) in &terms {
        obs.check_sites(args.qubits)
            .map_err(|e| usage("--observable", e.to_string()))?;
        records.push(run_one(
            args.ansatz,
            &circuit,
            *weight,
            obs,
            param,
            args.method,
            args.samples,
            seed,
        )?);
    }
    emit(&records, None, &args.output);
    Ok(())
}

// ============================================================================
// scan
// ============================================================================

fn cmd_scan(args: ScanArgs) -> Result<(), UsageError> {
    let qubit_axis: Vec<usize> = match (&args.qubits_range, args.qubits) {
        (Some(r), _) => parse_axis("--qubits-range", r)?,
        (None, Some(n)) => vec![n],
        (None, None) => {
            return Err(usage(
                "--qubits-range",
                "a scan needs --qubits or --qubits-range",
            ))
        }
    };
    let site_axis: Option<Vec<usize>> = match &args.site_range {
        Some(r) => Some(parse_axis("--site-range", r)?),
        None => None,
    };
    if qubit_axis.len() <= 1 && site_axis.is_none() && !args.all_params {
        return Err(usage(
            "--qubits-range",
            "empty sweep: give --qubits-range, --site-range or --all-params",
        ));
    }
    let fixed_param = parse_param(&args.param)?;
    let seed = default_seed(args.seed);

    let mut records = Vec::new();
    for &n in &qubit_axis {
        let circuit = match build_ansatz(args.ansatz, n) {
            Ok(c) => c,
            // Skip axis points the family cannot realize (e.g. odd N for
            // qTTN inside a range sweep) unless the axis was a single point.
            Err(e) if qubit_axis.len() > 1 => {
                let _ = e;
                continue;
            }
            Err(e) => return Err(usage("--qubits", e.to_string())),
        };
        let sites: Vec<Option<usize>> = match &site_axis {
            Some(axis) => axis.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        for site in sites {
            let terms = expand_observable(&args.observable, n, site)?;
            for (weight, obs) in &terms {
                if obs.check_sites(n).is_err() {
                    // Site axis ran past this circuit's registers.
                    continue;
                }
                let params: Vec<ParamId> = if args.all_params {
                    circuit.params().to_vec()
                } else {
                    circuit
                        .param_gate_index(fixed_param)
                        .map_err(|e| usage("--param", e.to_string()))?;
                    vec![fixed_param]
                };
                for param in params {
                    records.push(run_one(
                        args.ansatz,
                        &circuit,
                        *weight,
                        obs,
                        param,
                        args.method,
                        args.samples,
                        seed,
                    )?);
                }
            }
        }
    }
    if records.is_empty() {
        return Err(usage("--qubits-range", "sweep produced no instances"));
    }

    let fit = if args.fit {
        let points: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.variance > 0.0)
            .map(|r| (r.n_qubits as f64, r.variance))
            .collect();
        Some(
            closed_form::fit_power_law(&points)
                .map_err(|e| usage("--fit", e.to_string()))?,
        )
    } else {
        None
    };
    emit(&records, fit.as_ref(), &args.output);
    Ok(())
}

// ============================================================================
// verify
// ============================================================================

struct Report {
    failures: usize,
    checks: usize,
}

impl Report {
    fn new() -> Self {
        Report {
            failures: 0,
            checks: 0,
        }
    }

    fn check(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        self.checks += 1;
        let ok = (got - want).abs() <= tol;
        if !ok {
            self.failures += 1;
        }
        println!(
            "{} {name}: got {got:.12e}, want {want:.12e}, tol {tol:.1e}",
            if ok { "PASS" } else { "FAIL" }
        );
    }

    fn check_rel(&mut self, name: &str, got: f64, want: f64, rel: f64) {
        self.check(name, got, want, rel * want.abs());
    }
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let mut rep = Report::new();
    verify_fast(&mut rep);
    if args.level == Level::Full {
        verify_full(&mut rep);
    }
    println!(
        "{}/{} checks passed",
        rep.checks - rep.failures,
        rep.checks
    );
    if rep.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// Exact contraction vs every closed-form branch, at small scale.
fn verify_fast(rep: &mut Report) {
    // qMPS single-site X, every (i, j), N up to 6.
    for n in 2..=6usize {
        let c = build_ansatz(Family::QMps, n).unwrap();
        for i in 1..=n {
            let obs = Observable::x(i);
            for j in 1..=n {
                let tn = zx::contract_variance_tn(&c, &obs, ParamId::new(j, 1)).unwrap();
                let cf = closed_form::var_qmps_x(n, i, j).unwrap();
                rep.check(&format!("qmps N={n} X:{i} ({j},1) tn=closed"), tn, cf, 1e-10);
            }
        }
        // Nearest-neighbour X X, first parameter.
        for i in 1..n {
            let obs = Observable::xx(i);
            let tn = zx::contract_variance_tn(&c, &obs, ParamId::new(1, 1)).unwrap();
            let cf = closed_form::var_qmps_xx(n, i).unwrap();
            rep.check(
                &format!("qmps N={n} X:{i}*X:{} (1,1) tn=closed", i + 1),
                tn,
                cf,
                1e-10,
            );
        }
    }
    // qTTN edge sites, trees of up to 3 levels.
    for levels in 1..=3u32 {
        let n = 1usize << levels;
        let c = build_ansatz(Family::QTtn, n).unwrap();
        let tn = zx::contract_variance_tn(&c, &Observable::x(n), ParamId::new(1, 1)).unwrap();
        rep.check(
            &format!("qttn N={n} X:{n} (1,1) tn=closed"),
            tn,
            closed_form::var_qttn_xn(levels),
            1e-10,
        );
        let tn = zx::contract_variance_tn(&c, &Observable::x(1), ParamId::new(1, 1)).unwrap();
        rep.check(
            &format!("qttn N={n} X:1 (1,1) tn=closed"),
            tn,
            closed_form::var_qttn_x1(levels),
            1e-10,
        );
    }
    // qMERA extremal-cone reference values.
    for n in [2usize, 4, 8] {
        let c = build_ansatz(Family::QMera, n).unwrap();
        let (lower, upper) = closed_form::qmera_reference(n).unwrap();
        let tn = zx::contract_variance_tn(&c, &Observable::x(n), ParamId::new(1, 1)).unwrap();
        rep.check_rel(&format!("qmera N={n} X:{n} (1,1) tn=reference"), tn, lower, 5e-3);
        let tn = zx::contract_variance_tn(&c, &Observable::x(1), ParamId::new(1, 1)).unwrap();
        rep.check_rel(&format!("qmera N={n} X:1 (1,1) tn=reference"), tn, upper, 5e-3);
    }
}

/// Grid-quadrature oracle and Monte Carlo spot checks.
fn verify_full(rep: &mut Report) {
    // Exact quadrature vs exact contraction, N up to 4, all in-cone params.
    for family in [Family::QMps, Family::QTtn, Family::QMera] {
        for n in 2..=4usize {
            let Ok(c) = build_ansatz(family, n) else {
                continue;
            };
            for i in 1..=n {
                for obs in [Observable::x(i), Observable::z(i)] {
                    let Ok(sweep) = oracle::grid_sweep(&c, &obs) else {
                        continue; // cone over the 3^M cap — grid not applicable
                    };
                    let cone = causal_cone(&c, &obs).unwrap();
                    let name = obs.canonical_string().unwrap();
                    for entry in &sweep.entries {
                        let gate = c.param_gate_index(entry.param).unwrap();
                        if !cone.gate_indices.contains(&gate) {
                            continue;
                        }
                        let tn = zx::contract_variance_tn(&c, &obs, entry.param).unwrap();
                        rep.check(
                            &format!("{family} N={n} {name} {} grid=tn", entry.param),
                            entry.variance,
                            tn,
                            1e-10,
                        );
                    }
                }
            }
        }
    }
    // Monte Carlo pulls: value within 4 standard errors of the exact result,
    // and the mean estimator consistent with the exact mean of zero.
    let spots: [(Family, usize, Observable, ParamId); 3] = [
        (Family::QMps, 5, Observable::x(5), ParamId::new(1, 1)),
        (Family::QTtn, 4, Observable::x(1), ParamId::new(2, 2)),
        (Family::QMera, 4, Observable::x(4), ParamId::new(1, 1)),
    ];
    for (family, n, obs, param) in spots {
        let c = build_ansatz(family, n).unwrap();
        let exact = zx::contract_variance_tn(&c, &obs, param).unwrap();
        let stats = oracle::mc_gradient_stats(&c, &obs, param, 200_000, 17).unwrap();
        let name = obs.canonical_string().unwrap();
        rep.check(
            &format!("{family} N={n} {name} {param} mc≈tn"),
            stats.variance,
            exact,
            4.0 * stats.variance_stderr,
        );
        rep.check(
            &format!("{family} N={n} {name} {param} mc mean≈0"),
            stats.mean,
            0.0,
            4.0 * stats.mean_stderr,
        );
    }
}
