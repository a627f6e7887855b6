mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use topochain::chain::{energy_spectrum, ChainSpec, MomentumGrid};
use topochain::correlators::{bdg_correlator_oracle, correlator_table};
use topochain::ed::{ed_correlator, ed_ground_state, ed_qfi_from_state, ed_string_correlator, MAX_CHAIN_SITES};
use topochain::honeycomb::{honeycomb_gap, simplex_scan, HoneycombSpec, LadderSign};
use topochain::majorana::{solve_left_modes, solve_right_modes, MzmSet};
use topochain::pauli::{dual_operator, dual_product_check, PauliString};
use topochain::qfi::{finite_qfi_density, length_grid, mu_grid, phase_scan_with, scaling_fits_with, FitTarget, Variant};
use topochain::reproduce::{self, PlotKind, ReproduceOptions, Target};
use topochain::roots::RootOptions;
use topochain::toeplitz::{max_separation, scf_series, Method};
use topochain::winding::{winding_number_with, DEFAULT_TOL_BAND};

use output::{check_output_path, strings, write_csv, write_plot_script, Provenance};

#[derive(Parser, Debug)]
#[command(name = "topochain", version, about = "Topological phases of extended Kitaev chains")]
struct Cli {
    /// Recorded in every output; seeds the root finder's starting circle.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// JSON file with default knobs (unknown keys are rejected).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bulk spectrum ±ε(q) on the antiperiodic grid.
    Spectrum {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 200)]
        length: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Winding number from the zeros of g(ζ), with the loop integral as a check.
    Winding {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        tol_band: Option<f64>,
    },
    /// Majorana zero modes of the open chain.
    Mzm {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 60)]
        length: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Two-point correlators G_r of the closed chain.
    Correlators {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 200)]
        length: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// String correlation function C_ν(r).
    Scf {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 600)]
        length: usize,
        #[arg(long, allow_hyphen_values = true)]
        nu: i64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Scaling fit of the dual QFI density for one generator.
    Qfi {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, allow_hyphen_values = true)]
        nu: i64,
        #[arg(long)]
        staggered: bool,
        /// start:stop:step
        #[arg(long)]
        lgrid: Option<String>,
        #[arg(long, value_enum)]
        fit_target: Option<FitTargetArg>,
        #[command(flatten)]
        out: OutArg,
    },
    /// λ and λ_st for several ν along a μ range.
    Scan {
        #[command(flatten)]
        spec: SpecArg,
        /// lo:hi:step
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,2,3")]
        nus: Vec<i64>,
        #[arg(long)]
        lgrid: Option<String>,
        #[arg(long, value_enum)]
        fit_target: Option<FitTargetArg>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Exact-diagonalisation cross-checks at small L.
    Oracle {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 10)]
        length: usize,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        nu: i64,
        #[arg(long, value_enum, default_value_t = OracleCheck::All)]
        check: OracleCheck,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// λ^st of the three ladder sectors across the coupling simplex.
    Honeycomb {
        #[arg(long, default_value_t = 20)]
        resolution: usize,
        #[arg(long)]
        lgrid: Option<String>,
        #[arg(long, value_enum, default_value_t = SignArg::Antiferromagnetic)]
        sign: SignArg,
        #[command(flatten)]
        out: OutArg,
    },
    /// Regenerate a published figure or table and compare against it.
    Reproduce {
        /// fig1, fig2, fig3, tabS1, tabS2, tabS3, figS1, figS2, figS3, figS6 or all
        #[arg(long)]
        target: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, value_enum)]
        fit_target: Option<FitTargetArg>,
        #[arg(long)]
        emit_gnuplot: bool,
    },
}

#[derive(Args, Debug)]
struct SpecArg {
    /// ChainSpec JSON: {"nf": n, "couplings": [[J+, J-], ...], "mu": μ}
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Args, Debug)]
struct OutArg {
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    emit_gnuplot: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum FitTargetArg {
    Excess,
    Density,
}

impl From<FitTargetArg> for FitTarget {
    fn from(f: FitTargetArg) -> Self {
        match f {
            FitTargetArg::Excess => FitTarget::Excess,
            FitTargetArg::Density => FitTarget::Density,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum OracleCheck {
    All,
    Correlators,
    Scf,
    Qfi,
    Duality,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum SignArg {
    Ferromagnetic,
    Antiferromagnetic,
}

impl From<SignArg> for LadderSign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Ferromagnetic => LadderSign::Ferromagnetic,
            SignArg::Antiferromagnetic => LadderSign::Antiferromagnetic,
        }
    }
}

/// Defaults read from `--config`; flags on the command line win.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RunConfig {
    tol_band: Option<f64>,
    lgrid: Option<String>,
    q_grid_n: Option<usize>,
    fit_target: Option<FitTarget>,
    reproduce: Option<ReproduceOptions>,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    let Some(path) = path else { return Ok(RunConfig::default()) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn load_spec(path: &Path) -> Result<(ChainSpec, Vec<u8>)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading spec {}", path.display()))?;
    let spec = ChainSpec::from_json(std::str::from_utf8(&bytes)?).with_context(|| format!("parsing spec {}", path.display()))?;
    Ok((spec, bytes))
}

fn parse_lgrid(text: &str) -> Result<Vec<usize>> {
    let parts: Vec<usize> =
        text.split(':').map(|p| p.trim().parse::<usize>()).collect::<std::result::Result<_, _>>().context("lgrid must be start:stop:step")?;
    let grid = match parts.as_slice() {
        [start, stop, step] if *step > 0 && start <= stop => length_grid(*start, *stop, *step),
        _ => bail!("lgrid must be start:stop:step with step > 0, got {text:?}"),
    };
    if grid.iter().any(|l| l % 2 == 1) {
        bail!("lgrid lengths must be even, got {text:?}");
    }
    Ok(grid)
}

fn parse_mu_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> =
        text.split(':').map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().context("mu must be lo:hi:step")?;
    match parts.as_slice() {
        [lo, hi, step] => Ok(mu_grid(*lo, *hi, *step)?),
        _ => bail!("mu must be lo:hi:step, got {text:?}"),
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("TOPOCHAIN_THREADS") {
        let n: usize = v.parse().with_context(|| format!("TOPOCHAIN_THREADS={v:?} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

/// Writes the table to `out` (or stdout) and optionally a plot script.
fn emit(out: &OutArg, prov: &Provenance, kind: PlotKind, header: Vec<String>, rows: Vec<Vec<String>>) -> Result<()> {
    match &out.out {
        Some(path) => {
            write_csv(path, prov, &header, &rows)?;
            if out.emit_gnuplot {
                let gp = write_plot_script(path, kind, &header)?;
                eprintln!("wrote {} and {}", path.display(), gp.display());
            }
        }
        None => {
            println!("{}", prov.line());
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(&header)?;
            for r in rows {
                w.write_record(&r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` when a check or reproduction cell failed.
fn run(cli: Cli) -> Result<bool> {
    init_threads()?;
    let config = load_config(cli.config.as_deref())?;
    let seed = cli.seed;
    let fit = |arg: Option<FitTargetArg>| arg.map(FitTarget::from).or(config.fit_target).unwrap_or_default();
    let lgrid = |arg: &Option<String>, default: Vec<usize>| -> Result<Vec<usize>> {
        match arg.as_ref().or(config.lgrid.as_ref()) {
            Some(t) => parse_lgrid(t),
            None => Ok(default),
        }
    };
    if let Some(path) = match &cli.command {
        Command::Spectrum { out, .. }
        | Command::Mzm { out, .. }
        | Command::Correlators { out, .. }
        | Command::Scf { out, .. }
        | Command::Qfi { out, .. }
        | Command::Scan { out, .. }
        | Command::Honeycomb { out, .. } => out.out.as_deref(),
        _ => None,
    } {
        check_output_path(path)?;
    }

    match cli.command {
        Command::Spectrum { spec, length, out } => {
            let (spec, bytes) = load_spec(&spec.spec)?;
            let prov = Provenance::new(&bytes, json!({"command": "spectrum", "length": length, "seed": seed}));
            let rows = energy_spectrum(&spec, &MomentumGrid::new(length)?)
                .into_iter()
                .map(|(q, ep, em)| vec![num(q), num(ep), num(em)])
                .collect();
            emit(&out, &prov, PlotKind::Spectrum, strings(&["q", "e_plus", "e_minus"]), rows)?;
        }
        Command::Winding { spec, tol_band } => {
            let (spec, _) = load_spec(&spec.spec)?;
            let tol = tol_band.or(config.tol_band).unwrap_or(DEFAULT_TOL_BAND);
            let w = winding_number_with(&spec, tol, &RootOptions { seed, ..RootOptions::default() })?;
            let report = json!({
                "nu": w.from_roots,
                "gapped": w.nu().is_some(),
                "n_zeros_inside": w.profile.inside.len(),
                "n_poles": w.profile.pole_count_inside,
                "on_contour": w.profile.on_contour.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "integral_check": w.from_integral,
                "agreement": w.agreement,
                "residual": w.profile.residual,
                "warnings": w.profile.warnings.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>(),
                "tol_band": tol,
                "seed": seed,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Mzm { spec, length, out } => {
            let (spec, bytes) = load_spec(&spec.spec)?;
            let prov = Provenance::new(&bytes, json!({"command": "mzm", "length": length, "seed": seed}));
            let left = solve_left_modes(&spec, length)?;
            let right = solve_right_modes(&spec, length)?;
            let mut rows = Vec::new();
            let mut push = |set: &MzmSet, side: &str| {
                for (i, mode) in set.modes.iter().enumerate() {
                    for (site, a) in mode.iter().enumerate() {
                        rows.push(vec![side.into(), i.to_string(), (site + 1).to_string(), num(a.re), num(a.im), num(a.norm_sqr())]);
                    }
                }
            };
            push(&left, "left");
            push(&right, "right");
            emit(&out, &prov, PlotKind::Modes, strings(&["side", "mode_index", "site", "re_amp", "im_amp", "prob"]), rows)?;
        }
        Command::Correlators { spec, length, out } => {
            let (spec, bytes) = load_spec(&spec.spec)?;
            let prov = Provenance::new(&bytes, json!({"command": "correlators", "length": length, "seed": seed}));
            let t = correlator_table(&spec, length)?;
            let l = length as i64;
            let rows = (-l + 1..l).map(|r| vec![r.to_string(), num(t.get(r))]).collect();
            emit(&out, &prov, PlotKind::None, strings(&["r", "G"]), rows)?;
        }
        Command::Scf { spec, length, nu, out } => {
            let (spec, bytes) = load_spec(&spec.spec)?;
            let prov = Provenance::new(&bytes, json!({"command": "scf", "length": length, "nu": nu, "seed": seed}));
            let t = correlator_table(&spec, length)?;
            let series = scf_series(&t, nu, max_separation(length, nu))?;
            let rows = series
                .entries
                .iter()
                .map(|e| {
                    let method = match e.method {
                        Method::FastMinor => "fast",
                        Method::PivotedFallback => "fallback",
                    };
                    vec![e.r.to_string(), num(e.c), num(e.staggered), method.into(), num(e.r as f64 / length as f64)]
                })
                .collect();
            emit(&out, &prov, PlotKind::Scf, strings(&["r", "C", "staggered_C", "method", "r_over_l"]), rows)?;
        }
        Command::Qfi { spec, nu, staggered, lgrid: grid_arg, fit_target, out } => {
            let (spec, bytes) = load_spec(&spec.spec)?;
            let grid = lgrid(&grid_arg, length_grid(250, 2000, 250))?;
            let target = fit(fit_target);
            let prov = Provenance::new(
                &bytes,
                json!({"command": "qfi", "nu": nu, "staggered": staggered, "lgrid": grid, "fit_target": target, "seed": seed}),
            );
            let (p, s) = scaling_fits_with(&spec, &[nu], &grid, target)?.pop().expect("one ν requested");
            let f = if staggered { s } else { p };
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "nu": f.nu,
                    "staggered": staggered,
                    "lambda": f.lambda,
                    "gamma": f.gamma,
                    "r_squared": f.r2,
                    "trivial": f.trivial,
                    "warnings": f.warnings.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>(),
                    "points": f.points.iter().map(|q| json!({"L": q.l, "f_q": q.f_q})).collect::<Vec<_>>(),
                }))?
            );
            if out.out.is_some() {
                let variant = if staggered { "st" } else { "pl" };
                let rows = f.points.iter().map(|q| vec![q.l.to_string(), nu.to_string(), variant.into(), num(q.f_q)]).collect();
                emit(&out, &prov, PlotKind::Density, strings(&["L", "nu", "variant", "f_q"]), rows)?;
            }
        }
        Command::Scan { spec, mu, nus, lgrid: grid_arg, fit_target, out } => {
            let (spec, bytes) = load_spec(&spec.spec)?;
            if nus.iter().any(|&n| n == 0) {
                bail!("ν = 0 has no dual generator");
            }
            let mus = parse_mu_range(&mu)?;
            let grid = lgrid(&grid_arg, length_grid(250, 2000, 250))?;
            let target = fit(fit_target);
            let prov = Provenance::new(
                &bytes,
                json!({"command": "scan", "mu": mu, "nus": nus, "lgrid": grid, "fit_target": target, "seed": seed}),
            );
            let mut header = strings(&["mu", "winding_nu"]);
            for nu in &nus {
                header.push(format!("lambda_nu{nu}"));
                header.push(format!("lambda_st_nu{nu}"));
            }
            header.push("error".into());
            let rows = phase_scan_with(&spec, &mus, &nus, &grid, target)
                .into_iter()
                .map(|row| {
                    let mut cols = vec![num(row.mu), num(row.winding)];
                    if row.fits.is_empty() {
                        cols.extend(std::iter::repeat(String::new()).take(2 * nus.len()));
                    }
                    for (p, s) in &row.fits {
                        cols.push(num(p.lambda));
                        cols.push(num(s.lambda));
                    }
                    cols.push(row.error.unwrap_or_default());
                    cols
                })
                .collect();
            emit(&out, &prov, PlotKind::Scan, header, rows)?;
        }
        Command::Oracle { spec, length, nu, check, tol } => {
            let (spec, _) = load_spec(&spec.spec)?;
            return oracle(&spec, length, nu, check, tol);
        }
        Command::Honeycomb { resolution, lgrid: grid_arg, sign, out } => {
            let grid = lgrid(&grid_arg, length_grid(100, 400, 50))?;
            let q_n = config.q_grid_n.unwrap_or(128);
            if !matches!(sign, SignArg::Antiferromagnetic) {
                bail!("the simplex scan uses the antiferromagnetic ladder; --sign ferromagnetic is only meaningful for single points");
            }
            let cfg = json!({"command": "honeycomb", "resolution": resolution, "lgrid": grid, "sign": sign, "q_grid_n": q_n,
                "dual_chain": "J1x = 2Jx, J1y = -2Jy, mu = 2Jz", "seed": seed});
            let prov = Provenance::new(cfg.to_string().as_bytes(), &cfg);
            let rows = simplex_scan(resolution, &grid)?
                .into_iter()
                .map(|r| {
                    let gap = HoneycombSpec::new(r.jx, r.jy, r.jz).and_then(|s| honeycomb_gap(&s, q_n)).map(num).unwrap_or_default();
                    let l = |k: usize| r.lambdas[k].map(num).unwrap_or_default();
                    vec![num(r.jx), num(r.jy), num(r.jz), l(0), l(1), l(2), r.phase.label().into(), gap, r.errors.join("; ")]
                })
                .collect();
            let header = strings(&["jx", "jy", "jz", "lambda_x_st", "lambda_y_st", "lambda_z_st", "phase", "gap", "error"]);
            emit(&out, &prov, PlotKind::Simplex, header, rows)?;
        }
        Command::Reproduce { target, out_dir, fit_target, emit_gnuplot } => {
            if !out_dir.is_dir() {
                bail!("output directory {} does not exist", out_dir.display());
            }
            let targets: Vec<Target> =
                if target.eq_ignore_ascii_case("all") { Target::ALL.to_vec() } else { vec![target.parse::<Target>()?] };
            let mut opts = config.reproduce.clone().unwrap_or_default();
            if let Some(f) = fit_target.map(FitTarget::from).or(config.fit_target) {
                opts.fit_target = f;
            }
            let mut all_ok = true;
            for t in targets {
                let report = reproduce::run(t, &opts)?;
                let cfg = json!({"command": "reproduce", "target": t.name(), "options": opts, "seed": seed});
                let prov = Provenance::new(cfg.to_string().as_bytes(), &cfg);
                for table in &report.tables {
                    let path = out_dir.join(format!("{}.csv", table.name));
                    write_csv(&path, &prov, &table.header, &table.rows)?;
                    if emit_gnuplot && table.kind != PlotKind::None {
                        write_plot_script(&path, table.kind, &table.header)?;
                    }
                }
                let summary = json!({
                    "target": t.name(),
                    "passed": report.passed(),
                    "provenance": prov,
                    "report": report,
                    "csv": report.tables.iter().map(|x| format!("{}.csv", x.name)).collect::<Vec<_>>(),
                });
                let path = out_dir.join(format!("{}_summary.json", t.name()));
                std::fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")?;
                let failed: Vec<_> = report.failures().collect();
                println!(
                    "{}: {} ({} cells, {} failing)",
                    t.name(),
                    if report.passed() { "PASS" } else { "FAIL" },
                    report.cells.len(),
                    failed.len()
                );
                for c in failed {
                    println!("  {} {}: {} {:?}", if c.anchored { "FAIL" } else { "warn" }, c.label, c.value, c.check);
                }
                all_ok &= report.passed();
            }
            return Ok(all_ok);
        }
    }
    Ok(true)
}

struct Deviation {
    name: &'static str,
    max: f64,
    count: usize,
}

fn oracle(spec: &ChainSpec, length: usize, nu: i64, check: OracleCheck, tol: f64) -> Result<bool> {
    if length > MAX_CHAIN_SITES {
        bail!("oracle length {length} exceeds {MAX_CHAIN_SITES}");
    }
    let wants = |c: OracleCheck| check == OracleCheck::All || check == c;
    let mut results = Vec::new();
    let mut symbolic_ok = true;

    if wants(OracleCheck::Duality) {
        let n = nu.unsigned_abs() as usize;
        let mut count = 0;
        for j in 1..=length + 1 - n {
            let tau = dual_operator(nu, j, length)?;
            symbolic_ok &= tau.is_hermitian() && &tau * &tau == PauliString::identity();
            count += 1;
        }
        for i in 1..=length - n {
            for r in 1..=length + 1 - n - i {
                symbolic_ok &= dual_product_check(nu, i, r, length)?;
                count += 1;
            }
        }
        println!("duality: {} ({count} symbolic identities)", if symbolic_ok { "pass" } else { "FAIL" });
    }

    if wants(OracleCheck::Correlators) || wants(OracleCheck::Scf) || wants(OracleCheck::Qfi) {
        let gs = ed_ground_state(spec, length)?;
        let table = correlator_table(spec, length)?;
        if wants(OracleCheck::Correlators) {
            let real_space = bdg_correlator_oracle(spec, length)?;
            let mut d = Deviation { name: "correlators", max: 0.0, count: 0 };
            for r in 0..length as i64 {
                let ed = ed_correlator(&gs, 1, r)?;
                d.max = d.max.max((ed - table.ba(r)).abs()).max((real_space.ba(r) - table.ba(r)).abs());
                d.count += 1;
            }
            results.push(d);
        }
        if wants(OracleCheck::Scf) {
            let series = scf_series(&table, nu, max_separation(length, nu))?;
            let mut d = Deviation { name: "scf", max: 0.0, count: 0 };
            for e in &series.entries {
                if 1 + e.r + nu.unsigned_abs() as usize > length + 1 {
                    continue;
                }
                d.max = d.max.max((ed_string_correlator(&gs, nu, 1, e.r)? - e.c).abs());
                d.count += 1;
            }
            results.push(d);
        }
        if wants(OracleCheck::Qfi) {
            let mut d = Deviation { name: "qfi", max: 0.0, count: 0 };
            for variant in [Variant::Plain, Variant::Staggered] {
                let ed = ed_qfi_from_state(&gs, nu, variant)?;
                d.max = d.max.max((ed - finite_qfi_density(&table, nu, variant)?).abs());
                d.count += 1;
            }
            results.push(d);
        }
    }

    let mut ok = symbolic_ok;
    for d in &results {
        let pass = d.max <= tol;
        ok &= pass;
        println!("{}: {} (max deviation {:.3e} over {} values, tol {tol:e})", d.name, if pass { "pass" } else { "FAIL" }, d.max, d.count);
    }
    Ok(ok)
}
