use std::fs;
use std::io::Write;
use std::path::Path;

use cubecolor_core::bounds::{bound_table, BoundsJson};
use cubecolor_core::chains::{
    dump_chain, fill, parse_rational, random_relative_cycle, Ring,
};
use cubecolor_core::gridcolor::{components, parse_coloring, ComponentsJson, GridColoring};
use cubecolor_core::nervecontract::{certify as run_certify, CertifyOptions, NerveError};
use cubecolor_core::search::{
    anneal, exhaustive_min, random_coloring, stripe_construction, SearchConfig, SearchError,
    SearchRow, DEFAULT_BUDGET,
};
use cubecolor_core::Exact;
use rayon::prelude::*;
use serde::Serialize;

use crate::render::{encode, slice_plane};
use crate::{
    BoundsArgs, CertifyArgs, CliError, FillTestArgs, Method, RenderArgs, SearchArgs, TableFormat,
};

/// Environment variable capping `num_colors^(n^d)` for exhaustive scans.
pub const BUDGET_VAR: &str = "CUBECOLOR_MAX_COLORINGS";

const CERTIFY_MAX_D: usize = 3;
const CERTIFY_MAX_N: usize = 8;

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn read_coloring(path: &Path) -> Result<GridColoring, CliError> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    parse_coloring(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Writes to stdout; a closed pipe on the reading side is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json<T: Serialize>(value: &T) {
    emit(&serde_json::to_string_pretty(value).expect("reports serialize"));
    emit("\n");
}

fn with_workers<T: Send>(
    workers: Option<usize>,
    job: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match workers {
        None => Ok(job()),
        Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

#[derive(Serialize)]
struct AnalyzeJson {
    #[serde(flatten)]
    report: ComponentsJson,
    /// Present when `num_colors <= d`.
    bounds: Option<BoundsJson>,
    /// `f_eq5 n^(d-m)`, the size the asymptotic bound promises.
    asymptotic_size: Option<Exact>,
}

pub fn analyze(file: &Path) -> Result<(), CliError> {
    let g = read_coloring(file)?;
    let report = components(&g);
    let table = bound_table(g.d(), g.m(), Some(g.n() as u64)).ok();
    print_json(&AnalyzeJson {
        report: report.to_json(),
        asymptotic_size: table
            .as_ref()
            .map(|t| t.asymptotic_size(g.n() as u64).into()),
        bounds: table.map(|t| t.to_json()),
    });
    Ok(())
}

fn search_error(e: SearchError) -> CliError {
    CliError::Usage(e.to_string())
}

fn budget(args: &SearchArgs) -> Result<u64, CliError> {
    if let Some(b) = args.budget {
        return Ok(b);
    }
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{BUDGET_VAR} must be an integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

pub fn search(args: &SearchArgs) -> Result<(), CliError> {
    let (d, n, colors) = (args.d, args.n, args.colors);
    let row = |method: &str, objective: usize, seed: Option<u64>| SearchRow {
        d,
        n,
        num_colors: colors,
        method: method.to_string(),
        objective,
        seed,
    };
    let objective = |g: &GridColoring| components(g).max_size;
    let seeds: Vec<u64> = (args.seed..args.seed.saturating_add(args.runs)).collect();

    let (rows, best): (Vec<SearchRow>, Option<GridColoring>) = match args.method {
        Method::Stripe => {
            let g = stripe_construction(d, n, colors, args.width).map_err(search_error)?;
            (vec![row("stripe", objective(&g), None)], Some(g))
        }
        Method::Random => {
            let runs = with_workers(args.workers, || {
                seeds
                    .par_iter()
                    .map(|&s| random_coloring(d, n, colors, s).map(|g| (s, objective(&g), g)))
                    .collect::<Result<Vec<_>, _>>()
            })?
            .map_err(search_error)?;
            let rows = runs.iter().map(|(s, o, _)| row("random", *o, Some(*s))).collect();
            let best = runs.into_iter().min_by_key(|(s, o, _)| (*o, *s)).map(|r| r.2);
            (rows, best)
        }
        Method::Anneal => {
            let configs: Vec<SearchConfig> = seeds
                .iter()
                .map(|&s| {
                    let mut cfg = SearchConfig::new(d, n, colors, s, args.steps);
                    if let Some(t) = args.initial_temperature {
                        cfg.initial_temperature = t;
                    }
                    if let Some(decay) = args.decay {
                        cfg.decay = decay;
                    }
                    cfg
                })
                .collect();
            let runs = with_workers(args.workers, || {
                configs
                    .par_iter()
                    .map(|cfg| anneal(cfg).map(|r| (cfg.seed, r)))
                    .collect::<Result<Vec<_>, _>>()
            })?
            .map_err(search_error)?;
            let rows = runs
                .iter()
                .map(|(s, r)| row("anneal", r.objective.max_size, Some(*s)))
                .collect();
            let best = runs
                .into_iter()
                .min_by_key(|(s, r)| (r.objective, *s))
                .map(|(_, r)| r.coloring);
            (rows, best)
        }
        Method::Exhaustive => {
            let budget = budget(args)?;
            let r = with_workers(args.workers, || exhaustive_min(d, n, colors, budget))?
                .map_err(search_error)?;
            (vec![row("exhaustive", r.value, None)], Some(r.witness))
        }
    };

    let sink: Box<dyn Write> = match &args.csv {
        Some(path) => Box::new(fs::File::create(path).map_err(io_error(path))?),
        None => Box::new(std::io::stdout()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    for r in &rows {
        writer
            .serialize(r)
            .map_err(|e| CliError::Usage(format!("writing CSV: {e}")))?;
    }
    writer.flush().map_err(|e| CliError::Io {
        path: "csv output".into(),
        source: e,
    })?;
    if let (Some(path), Some(g)) = (&args.best, best) {
        fs::write(path, g.to_text()).map_err(io_error(path))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FailureJson<'a> {
    error: String,
    identity: Option<&'a str>,
    simplex: Option<&'a [usize]>,
}

pub fn certify(args: &CertifyArgs) -> Result<(), CliError> {
    let g = read_coloring(&args.file)?;
    if !args.allow_large && (g.d() > CERTIFY_MAX_D || g.n() > CERTIFY_MAX_N) {
        return Err(CliError::Usage(format!(
            "certify is limited to d <= {CERTIFY_MAX_D} and n <= {CERTIFY_MAX_N}; pass --allow-large to lift it"
        )));
    }
    let delta = match &args.delta {
        Some(s) => Some(
            parse_rational(s).ok_or_else(|| CliError::Usage(format!("bad --delta {s:?}")))?,
        ),
        None => None,
    };
    let opts = CertifyOptions {
        delta,
        ring: args.ring.into(),
        skeleton_checks: !args.no_skeleton,
        ..CertifyOptions::default()
    };
    match run_certify(&g, &opts) {
        Ok(report) => {
            print_json(&report.to_json());
            Ok(())
        }
        Err(e @ NerveError::IdentityFailed { .. })
        | Err(e @ NerveError::Fill { .. })
        | Err(e @ NerveError::OverlappingPieces { .. }) => {
            let (identity, simplex) = match &e {
                NerveError::IdentityFailed { identity, simplex } => {
                    (Some(*identity), Some(simplex.as_slice()))
                }
                NerveError::Fill { simplex, .. } | NerveError::OverlappingPieces { simplex } => {
                    (None, Some(simplex.as_slice()))
                }
                _ => (None, None),
            };
            print_json(&FailureJson {
                error: e.to_string(),
                identity,
                simplex,
            });
            Err(CliError::Failed(e.to_string()))
        }
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}

#[derive(Serialize)]
struct FillFailure {
    seed: u64,
    reason: String,
    dump: Option<String>,
}

#[derive(Serialize)]
struct FillSummary {
    d: usize,
    k: usize,
    ring: Ring,
    seeds: u64,
    boundary_passed: u64,
    volume_passed: u64,
    failures: Vec<FillFailure>,
}

struct FillOutcome {
    seed: u64,
    boundary_ok: bool,
    volume_ok: bool,
    reason: Option<String>,
    cycle: String,
}

pub fn fill_test(args: &FillTestArgs) -> Result<(), CliError> {
    let (d, k) = (args.d, args.k);
    if d == 0 || d > 4 || k >= d {
        return Err(CliError::Usage(format!(
            "fill-test needs k < d <= 4, got d = {d}, k = {k}"
        )));
    }
    let ring: Ring = args.ring.into();
    let seeds: Vec<u64> = (args.first_seed..args.first_seed.saturating_add(args.seeds)).collect();
    let outcomes: Vec<FillOutcome> = with_workers(args.workers, || {
        seeds
            .par_iter()
            .map(|&seed| {
                let z = random_relative_cycle(seed, d, k, args.size, ring);
                let cycle = dump_chain(&z);
                match fill(&z) {
                    Ok(h) => {
                        let boundary_ok = h
                            .boundary(true)
                            .map(|b| b.eq_mod_boundary(&z))
                            .unwrap_or(false);
                        let volume_ok = h.volume() <= z.volume();
                        let reason = match (boundary_ok, volume_ok) {
                            (true, true) => None,
                            (false, _) => Some("boundary of the filling differs from the cycle".into()),
                            (true, false) => Some("filling is larger than the cycle".into()),
                        };
                        FillOutcome {
                            seed,
                            boundary_ok,
                            volume_ok,
                            reason,
                            cycle,
                        }
                    }
                    Err(e) => FillOutcome {
                        seed,
                        boundary_ok: false,
                        volume_ok: false,
                        reason: Some(e.to_string()),
                        cycle,
                    },
                }
            })
            .collect()
    })?;

    let mut failures = Vec::new();
    for o in &outcomes {
        let Some(reason) = &o.reason else { continue };
        let dump = match &args.dump_dir {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(io_error(dir))?;
                let path = dir.join(format!("cycle-d{d}-k{k}-seed{}.txt", o.seed));
                fs::write(&path, &o.cycle).map_err(io_error(&path))?;
                Some(path.display().to_string())
            }
            None => {
                eprintln!("# failing cycle, seed {}\n{}", o.seed, o.cycle);
                None
            }
        };
        failures.push(FillFailure {
            seed: o.seed,
            reason: reason.clone(),
            dump,
        });
    }
    let summary = FillSummary {
        d,
        k,
        ring,
        seeds: outcomes.len() as u64,
        boundary_passed: outcomes.iter().filter(|o| o.boundary_ok).count() as u64,
        volume_passed: outcomes.iter().filter(|o| o.volume_ok).count() as u64,
        failures,
    };
    print_json(&summary);
    if summary.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} of {} cycles failed the filling contract",
            summary.failures.len(),
            summary.seeds
        )))
    }
}

pub fn bounds(args: &BoundsArgs) -> Result<(), CliError> {
    let table = bound_table(args.d, args.m, args.n).map_err(|e| CliError::Usage(e.to_string()))?;
    match args.format {
        TableFormat::Text => emit(&table.to_text()),
        TableFormat::Json => print_json(&table.to_json()),
    }
    Ok(())
}

pub fn render(args: &RenderArgs) -> Result<(), CliError> {
    let g = read_coloring(&args.file)?;
    let plane = slice_plane(&g, args.slice.as_deref()).map_err(CliError::Usage)?;
    let bytes = encode(&plane, g.num_colors(), args.format);
    fs::write(&args.output, bytes).map_err(io_error(&args.output))
}
