//! The four subcommands: simulate, convergence, verify, estimate.
//!
//! Commands return `Ok(true)` when every check passed, `Ok(false)` when a
//! check failed (exit 1) and `Err` for configuration or IO problems (exit 2).

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;

use sosbm::estimators::{estimate_full, estimate_rho_beta, EstimateReport};
use sosbm::kernel::{
    verify_kernel_bound, verify_scaling, verify_semigroup_bounds, SkewStickyParams,
};
use sosbm::numerics::QuadratureSpec;
use sosbm::sampler::{reference_local_time, simulate_path, simulate_sos_path, RngStream, SamplePath};
use sosbm::stats::{mean_se, median, verify_prop_5_7, GHatTable, NormalizingSequence, TestFunction};
use sosbm::transforms::{map_params, t1, verify_reduction};
use sosbm::SosBmParams;

use crate::config::{ExperimentConfig, ProcessKind};

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn simulate_one(cfg: &ExperimentConfig, n: u64, stream: RngStream) -> Result<SamplePath> {
    let path = match cfg.process {
        ProcessKind::SkewSticky => {
            let p = SkewStickyParams::new(cfg.params.rho(), cfg.params.beta())
                .map_err(|e| anyhow!("{e}"))?;
            simulate_path(&p, cfg.x0, n, cfg.horizon, stream)
        }
        ProcessKind::Oscillating => simulate_sos_path(&cfg.params, cfg.x0, n, cfg.horizon, stream),
    };
    path.map_err(|e| anyhow!("simulation failed: {e}"))
}

pub fn cmd_simulate(cfg: &ExperimentConfig, no_timestamp: bool) -> Result<bool> {
    ensure_dir(&cfg.out)?;
    let n = *cfg.n_ladder.last().unwrap();
    let results: Vec<(u64, String)> = (0..cfg.paths)
        .into_par_iter()
        .map(|j| -> Result<(u64, String)> {
            let stream = RngStream::new(cfg.seed, j);
            let path = simulate_one(cfg, n, stream)?;
            let name = format!("path_{j:05}.csv");
            let mut w = BufWriter::new(File::create(cfg.out.join(&name))?);
            path.write_csv(&mut w)?;
            Ok((j, name))
        })
        .collect::<Result<Vec<_>>>()?;

    let manifest = cfg.out.join("manifest.csv");
    let mut w = BufWriter::new(File::create(&manifest)?);
    if !no_timestamp {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(w, "# generated_at_unix={now}")?;
    }
    writeln!(w, "path_id,seed,stream,file")?;
    let mut sorted = results;
    sorted.sort_by_key(|r| r.0);
    for (j, file) in &sorted {
        writeln!(w, "{},{},{},{}", j, cfg.seed, j, file)?;
    }
    println!("wrote {} paths and manifest to {}", sorted.len(), cfg.out.display());
    Ok(true)
}

struct ConvergenceRow {
    n: u64,
    u_n: f64,
    mc_mean: f64,
    mc_se: f64,
    limit_value: f64,
    z_score: f64,
    hit_zero_paths: u64,
    med_rho: Option<f64>,
    med_beta: Option<f64>,
    med_sigma_minus: Option<f64>,
    med_sigma_plus: Option<f64>,
    negative_control: bool,
}

pub fn cmd_convergence(cfg: &ExperimentConfig) -> Result<bool> {
    ensure_dir(&cfg.out)?;
    let negative_control = !cfg.g.vanishes_at_zero() && cfg.params.rho() > 0.0;
    let m0g = cfg.limit_constant();
    let ghat_spec = QuadratureSpec { abs_tol: 1e-8, rel_tol: 1e-7, ..QuadratureSpec::default() };

    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for (ladder_idx, &n) in cfg.n_ladder.iter().enumerate() {
        // reference local time: zero counts when the threshold is sticky,
        // otherwise the mean-absolute-displacement table on the mapped path
        let map = map_params(&cfg.params).map_err(|e| anyhow!("{e}"))?;
        let ghat_table = if cfg.params.rho() == 0.0 {
            Some(
                GHatTable::build(&map.target, n, 10.0, 4001, &ghat_spec)
                    .map_err(|e| anyhow!("ghat table: {e}"))?,
            )
        } else {
            None
        };

        let per_path: Vec<(f64, f64, bool, EstimateReport)> = (0..cfg.paths)
            .into_par_iter()
            .map(|j| -> Result<(f64, f64, bool, EstimateReport)> {
                let stream = RngStream::new(cfg.seed, ((ladder_idx as u64) << 32) | j);
                let path = simulate_one(cfg, n, stream)?;
                let stat = sosbm::stats::local_time_statistic(&path, &cfg.g, &cfg.u).terminal();
                let reference = match &ghat_table {
                    None => reference_local_time(&path).map_err(|e| anyhow!("{e}"))?.terminal(),
                    Some(table) => {
                        // evaluate on the skew-sticky view and convert back
                        let y_path = SamplePath::from_values(
                            map.target.into(),
                            path.n(),
                            path.horizon(),
                            t1(&cfg.params, path.start()),
                            path.stream(),
                            path.values().iter().map(|&v| t1(&cfg.params, v)).collect(),
                        )
                        .map_err(|e| anyhow!("{e}"))?;
                        table.reference(&y_path).terminal() / map.local_time_factor
                    }
                };
                // the estimators require g(0) = 0; a negative-control run
                // still reports the diverging statistic, just no estimates
                let est = if !cfg.g.vanishes_at_zero() {
                    EstimateReport {
                        hit_zero: path.values().contains(&0.0),
                        ..EstimateReport::default()
                    }
                } else {
                    match cfg.process {
                        ProcessKind::SkewSticky => {
                            estimate_rho_beta(&path, &cfg.g, &cfg.u, 1.0, 1.0)
                                .map_err(|e| anyhow!("{e}"))?
                        }
                        ProcessKind::Oscillating => {
                            estimate_full(&path, &cfg.g, &cfg.u).map_err(|e| anyhow!("{e}"))?
                        }
                    }
                };
                let hit = est.hit_zero;
                Ok((stat, reference, hit, est))
            })
            .collect::<Result<Vec<_>>>()?;

        let stats: Vec<f64> = per_path.iter().map(|r| r.0).collect();
        let refs: Vec<f64> = per_path.iter().map(|r| r.1).collect();
        let hit_zero_paths = per_path.iter().filter(|r| r.2).count() as u64;

        if hit_zero_paths < (cfg.paths / 10).max(2) {
            eprintln!(
                "conditioning starved at n = {n}: only {hit_zero_paths} of {} paths visited 0",
                cfg.paths
            );
            return Ok(false);
        }

        let (ms, ses) = mean_se(&stats);
        let (mr, ser) = mean_se(&refs);
        let limit_value = m0g * mr;
        let combined = (ses * ses + m0g * m0g * ser * ser).sqrt();
        let z = (ms - limit_value) / combined;

        let collect = |f: &dyn Fn(&EstimateReport) -> Option<f64>| -> Option<f64> {
            let v: Vec<f64> = per_path.iter().filter_map(|r| f(&r.3)).collect();
            if v.is_empty() {
                None
            } else {
                Some(median(&v))
            }
        };

        rows.push(ConvergenceRow {
            n,
            u_n: cfg.u.value(n),
            mc_mean: ms,
            mc_se: ses,
            limit_value,
            z_score: z,
            hit_zero_paths,
            med_rho: collect(&|e| e.rho_hat),
            med_beta: collect(&|e| e.beta_hat),
            med_sigma_minus: collect(&|e| e.sigma_minus_hat),
            med_sigma_plus: collect(&|e| e.sigma_plus_hat),
            negative_control,
        });
    }

    let summary = cfg.out.join("summary.csv");
    let mut w = BufWriter::new(File::create(&summary)?);
    writeln!(w, "n,u_n,mc_mean,mc_se,limit_value,z_score")?;
    for r in &rows {
        writeln!(w, "{},{},{},{},{},{}", r.n, r.u_n, r.mc_mean, r.mc_se, r.limit_value, r.z_score)?;
    }

    let estimates = cfg.out.join("estimates.csv");
    let mut w = BufWriter::new(File::create(&estimates)?);
    writeln!(w, "n,hit_zero_paths,median_rho,median_beta,median_sigma_minus,median_sigma_plus")?;
    for r in &rows {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.n,
            r.hit_zero_paths,
            opt(r.med_rho),
            opt(r.med_beta),
            opt(r.med_sigma_minus),
            opt(r.med_sigma_plus)
        )?;
    }

    println!("config: {cfg:?}");
    println!("limit constant m0(g) = {m0g}");
    println!(
        "{:>10} {:>12} {:>12} {:>12} {:>12} {:>8}  estimates (medians)",
        "n", "u_n", "mc_mean", "mc_se", "limit", "z"
    );
    for r in &rows {
        let mark = if r.negative_control { "  [negative control: g(0) != 0, divergence expected]" } else { "" };
        println!(
            "{:>10} {:>12.4} {:>12.6} {:>12.6} {:>12.6} {:>8.2}  rho={} beta={} s-={} s+={}{}",
            r.n,
            r.u_n,
            r.mc_mean,
            r.mc_se,
            r.limit_value,
            r.z_score,
            r.med_rho.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
            r.med_beta.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
            r.med_sigma_minus.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
            r.med_sigma_plus.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
            mark,
        );
    }
    println!("wrote {} and {}", summary.display(), estimates.display());

    if negative_control {
        println!("negative-control run: consistency gate skipped");
        return Ok(true);
    }
    let final_z = rows.last().map(|r| r.z_score.abs()).unwrap_or(f64::INFINITY);
    if final_z >= 3.0 {
        eprintln!("final |z| = {final_z:.2} >= 3");
        return Ok(false);
    }
    Ok(true)
}

pub fn cmd_verify(scope: &str, cfg: Option<&ExperimentConfig>, out: &Path, seed: u64) -> Result<bool> {
    ensure_dir(out)?;
    let spec = QuadratureSpec::default();
    let grid = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };
    // parameter battery: from the config when given, defaults otherwise
    let battery: Vec<SkewStickyParams> = match cfg {
        Some(c) => vec![map_params(&c.params).map_err(|e| anyhow!("{e}"))?.target],
        None => [(0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (10.0, -0.5)]
            .iter()
            .map(|(r, b)| SkewStickyParams::new(*r, *b).unwrap())
            .collect(),
    };

    let mut pass = true;
    match scope {
        "kernel" => {
            let file = out.join("verify_kernel.csv");
            let mut w = BufWriter::new(File::create(&file)?);
            writeln!(w, "quantity,t,x,y,lhs,rhs,ratio,pass")?;
            for p in &battery {
                let r = verify_kernel_bound(p, &[0.1, 1.0, 10.0], &grid(-5.0, 5.0, 21), &grid(-5.0, 5.0, 21))
                    .map_err(|e| anyhow!("{e}"))?;
                for row in &r.rows {
                    writeln!(
                        w,
                        "kernel_ratio[rho={};beta={}],{},{},{},{},{},{},{}",
                        p.rho(), p.beta(), row.t, row.x, row.y, row.lhs, row.rhs, row.ratio, row.pass
                    )?;
                }
                println!(
                    "kernel bound rho={} beta={}: fitted K = {:.4}, pass = {}",
                    p.rho(), p.beta(), r.fitted_constant, r.pass
                );
                pass &= r.pass;
            }
            println!("wrote {}", file.display());
        }
        "bounds" => {
            let file = out.join("verify_bounds.csv");
            let mut w = BufWriter::new(File::create(&file)?);
            writeln!(w, "quantity,t,x,y,lhs,rhs,ratio,pass")?;
            let xis = grid(-6.0, 6.0, 13);
            for p in &battery {
                if p.beta().abs() >= 1.0 {
                    continue;
                }
                // the decay bounds are asymptotic; the sticky crossover time
                // scale is rho^2, so start the fit beyond it
                let t0 = 4.0 * p.rho().powi(2).max(1.0);
                let ts: Vec<f64> = (0..9).map(|k| t0 * 2.0_f64.powi(k)).collect();
                for (name, h, target) in [
                    ("bump", (|y: f64| (-(y - 0.5) * (y - 0.5)).exp()) as fn(f64) -> f64, -0.5),
                    ("odd", (|y: f64| y * (-y * y).exp()) as fn(f64) -> f64, -1.0),
                ] {
                    // the odd function is balanced only without skew
                    if name == "odd" && p.beta() != 0.0 {
                        continue;
                    }
                    let r = verify_semigroup_bounds(p, &h, Some((-8.0, 8.0)), &ts, &xis, &spec)
                        .map_err(|e| anyhow!("{e}"))?;
                    for row in &r.rows {
                        writeln!(
                            w,
                            "{}[{name};rho={};beta={}],{},{},{},{},{},{},{}",
                            row.quantity, p.rho(), p.beta(),
                            row.t, row.x, row.y, row.lhs, row.rhs, row.ratio, row.pass
                        )?;
                    }
                    println!(
                        "semigroup bounds rho={} beta={} h={name}: K_sup={:.4} K_centered={:.4} slope={:.3} (target {target}), pass={}",
                        p.rho(), p.beta(), r.fitted_k_sup, r.fitted_k_centered, r.slope, r.pass
                    );
                    pass &= r.pass;
                }
            }
            println!("wrote {}", file.display());
        }
        "scaling" => {
            let file = out.join("verify_scaling.csv");
            let mut w = BufWriter::new(File::create(&file)?);
            writeln!(w, "quantity,t,x,y,lhs,rhs,ratio,pass")?;
            for p in &battery {
                for c in [0.25, 3.0, 4.0] {
                    let r = verify_scaling(p, c, 1.0, &[-2.0, -0.5, 0.0, 1.0, 3.0], 1e-7, &QuadratureSpec::strict())
                        .map_err(|e| anyhow!("{e}"))?;
                    for row in &r.rows {
                        writeln!(
                            w,
                            "{}[c={c};rho={};beta={}],{},{},{},{},{},{},{}",
                            row.quantity, p.rho(), p.beta(),
                            row.t, row.x, row.y, row.lhs, row.rhs, row.ratio, row.pass
                        )?;
                    }
                    println!(
                        "scaling rho={} beta={} c={c}: max discrepancy {:.3e}, pass = {}",
                        p.rho(), p.beta(), r.fitted_constant, r.pass
                    );
                    pass &= r.pass;
                }
            }
            println!("wrote {}", file.display());
        }
        "prop57" => {
            let file = out.join("verify_prop57.csv");
            let mut w = BufWriter::new(File::create(&file)?);
            writeln!(w, "rho,beta,n,value,deviation,pass")?;
            for p in &battery {
                let r = verify_prop_5_7(p, &[100, 10_000, 1_000_000], 0.02, &spec)
                    .map_err(|e| anyhow!("{e}"))?;
                for row in &r.rows {
                    writeln!(w, "{},{},{},{},{},{}", p.rho(), p.beta(), row.n, row.value, row.deviation, r.pass)?;
                }
                println!(
                    "prop57 rho={} beta={}: values {:?}, pass = {}",
                    p.rho(),
                    p.beta(),
                    r.rows.iter().map(|x| x.value).collect::<Vec<_>>(),
                    r.pass
                );
                pass &= r.pass;
            }
            println!("wrote {}", file.display());
        }
        "reduction" => {
            let file = out.join("verify_reduction.csv");
            let mut w = BufWriter::new(File::create(&file)?);
            let cells: Vec<SosBmParams> = match cfg {
                Some(c) => vec![c.params],
                None => vec![
                    SosBmParams::new(1.0, 0.0, 2.0, 1.0).unwrap(),
                    SosBmParams::new(1.0, 0.3, 1.0, 2.0).unwrap(),
                    SosBmParams::new(0.5, -0.4, 0.5, 1.5).unwrap(),
                ],
            };
            writeln!(w, "config,ks_statistic,ks_threshold,zeros_preserved,pass")?;
            for (k, cell) in cells.iter().enumerate() {
                let r = verify_reduction(cell, 0.0, 4, 100_000, seed ^ k as u64, 0.01)
                    .map_err(|e| anyhow!("{e}"))?;
                for row in &r.rows {
                    writeln!(
                        w,
                        "{},{},{},{},{}",
                        row.config, row.ks_statistic, row.ks_threshold, row.zeros_preserved, row.pass
                    )?;
                    println!(
                        "reduction {}: KS {:.4} vs {:.4}, zeros preserved {}, pass = {}",
                        row.config, row.ks_statistic, row.ks_threshold, row.zeros_preserved, row.pass
                    );
                }
                pass &= r.pass;
            }
            println!("wrote {}", file.display());
        }
        other => return Err(anyhow!("unknown verify scope '{other}' (kernel|bounds|scaling|prop57|reduction)")),
    }
    Ok(pass)
}

pub struct EstimateArgs {
    pub input: PathBuf,
    pub sigma_plus: Option<f64>,
    pub sigma_minus: Option<f64>,
    pub joint: bool,
    pub g: TestFunction,
    pub u: NormalizingSequence,
    pub out: Option<PathBuf>,
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<bool> {
    let file = File::open(&args.input)
        .with_context(|| format!("cannot open input {}", args.input.display()))?;
    let path = SamplePath::read_csv(BufReader::new(file)).map_err(|e| anyhow!("{e}"))?;

    let report = if args.joint {
        estimate_full(&path, &args.g, &args.u).map_err(|e| anyhow!("{e}"))?
    } else {
        let sp = args.sigma_plus.ok_or_else(|| anyhow!("--sigma-plus required unless --joint"))?;
        let sm = args.sigma_minus.ok_or_else(|| anyhow!("--sigma-minus required unless --joint"))?;
        let mut r = estimate_rho_beta(&path, &args.g, &args.u, sp, sm).map_err(|e| anyhow!("{e}"))?;
        let sig = sosbm::estimators::estimate_sigmas(&path);
        r.sigma_plus_hat = sig.sigma_plus_hat;
        r.sigma_minus_hat = sig.sigma_minus_hat;
        r.diagnostics.qv_plus = sig.diagnostics.qv_plus;
        r.diagnostics.qv_minus = sig.diagnostics.qv_minus;
        r
    };

    let mut out: Box<dyn Write> = match &args.out {
        Some(dir) => {
            ensure_dir(dir)?;
            Box::new(BufWriter::new(File::create(dir.join("estimate.csv"))?))
        }
        None => Box::new(std::io::stdout()),
    };
    writeln!(out, "{}", EstimateReport::CSV_HEADER)?;
    report.write_csv_row(&mut out)?;
    Ok(true)
}
