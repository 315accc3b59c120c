//! Runs a configured command and writes its artifacts.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use gcflab::closed_forms::{paperclip_curve, paperclip_ratio_check, Paperclip};
use gcflab::convex::io::{fmt_f64, SCHEMA_VERSION};
use gcflab::flow::{pancake_initial, run, sausage_initial, FlowParams, FlowReport, ReportRow};
use gcflab::translators::{glued_sausage_evolution_check, solve_translator, TranslatorProfile};
use gcflab::verify::{all_pass, results_table, results_to_json, verify_report, CheckResult};
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::error::{CliError, CliResult};
use crate::svg::line_plot;

/// Environment variable that overrides the output root.
pub const OUT_ENV: &str = "GCFLAB_OUT";

/// What a finished run reports to its caller.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub dir: PathBuf,
    pub summary: BTreeMap<String, String>,
}

/// Output root: `GCFLAB_OUT` if set, else `--out`, else `runs`.
pub fn output_root(config: &RunConfig) -> PathBuf {
    match std::env::var_os(OUT_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => config.out.clone(),
    }
}

/// Runs `config`, printing a short summary to `stdout`.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let root = output_root(config);
    match config.command {
        Command::Verify => verify(config, stdout),
        Command::Sweep => sweep(config, &root, stdout),
        _ => {
            let outcome = run_one(config, &root)?;
            print_outcome(stdout, &outcome)
        }
    }
}

fn print_outcome(stdout: &mut dyn Write, outcome: &Outcome) -> CliResult<()> {
    let mut text = format!("wrote {}\n", outcome.dir.display());
    for (k, v) in &outcome.summary {
        text.push_str(&format!("  {k} = {v}\n"));
    }
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

/// Resolved settings of `config`, as embedded in every artifact.
pub fn effective_config(config: &RunConfig) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        m.insert(k.to_string(), v);
    };
    put("command", config.command.as_str().into());
    match config.command {
        Command::Pancake | Command::Sausage | Command::Glued => {
            let p = flow_params(config, start_time(config));
            put("alpha", fmt_f64(p.alpha));
            put("cfl", fmt_f64(p.cfl));
            put("grid", config.grid.to_string());
            put("snapshot-every", fmt_f64(p.snapshot_every));
            put("speed-cap", fmt_f64(p.speed_cap));
            put("stop-inradius", fmt_f64(p.stop_inradius));
            put("t-end", fmt_f64(p.t_end));
            put("t-start", fmt_f64(p.t_start));
            match config.command {
                Command::Pancake => put("j", config.j.to_string()),
                Command::Sausage => put("i", config.i.to_string()),
                _ => {}
            }
        }
        Command::Translator => {
            put("alpha", fmt_f64(config.alpha));
            put("translator-grid", config.translator_grid.to_string());
        }
        Command::Paperclip => {
            put("emit-curve", config.emit_curve.to_string());
            put("per-quadrant", config.per_quadrant.to_string());
            put("t", fmt_f64(config.t));
        }
        Command::Verify | Command::Sweep => {
            for (k, v) in &config.settings {
                put(k, v.clone());
            }
        }
    }
    m
}

fn start_time(config: &RunConfig) -> f64 {
    match config.command {
        Command::Pancake => -(config.j as f64),
        Command::Glued => -1.0,
        _ => 0.0,
    }
}

fn flow_params(config: &RunConfig, t_start: f64) -> FlowParams {
    let mut p = FlowParams::new(config.alpha, t_start, config.t_end)
        .with_cfl(config.cfl)
        .with_stop_inradius(config.stop_inradius);
    if let Some(every) = config.snapshot_every {
        p = p.with_snapshot_every(every);
    }
    p.speed_cap = config.speed_cap;
    p
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn csv_header(config: &BTreeMap<String, String>) -> String {
    config.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
}

/// Runs one non-sweep, non-verify command under `root`.
pub fn run_one(config: &RunConfig, root: &Path) -> CliResult<Outcome> {
    let dir = root.join(config.run_name());
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let cfg = effective_config(config);
    let summary = match config.command {
        Command::Pancake | Command::Sausage => {
            let schedule = if config.command == Command::Pancake {
                pancake_initial(config.j, config.grid)?
            } else {
                sausage_initial(config.i, config.alpha, config.grid)?
            };
            let report = run(&schedule, &flow_params(config, schedule.start_time))?;
            write_flow(config, &dir, &cfg, &report, None)?;
            flow_summary(&report)
        }
        Command::Glued => {
            let g = glued_sausage_evolution_check(config.alpha, config.grid, &flow_params(config, -1.0))?;
            let extra = json!({
                "alpha": g.alpha,
                "mass": g.mass,
                "r_alpha": g.r_alpha,
                "extinction_time": g.extinction_time,
                "mass_margin": g.mass_margin,
                "max_h_after_zero": g.max_h_after_zero,
                "final_sphericity": g.final_sphericity,
                "extinct_before_mass": g.extinct_before_mass(),
                "inside_cylinder": g.inside_cylinder(),
            });
            write_flow(config, &dir, &cfg, &g.report, Some(extra))?;
            let mut s = flow_summary(&g.report);
            s.insert("M".into(), fmt_f64(g.mass));
            s.insert("extinction_time".into(), fmt_f64(g.extinction_time));
            s.insert("extinct_before_mass".into(), g.extinct_before_mass().to_string());
            s.insert("inside_cylinder".into(), g.inside_cylinder().to_string());
            s
        }
        Command::Translator => {
            let p = solve_translator(config.alpha, config.translator_grid)?;
            write_translator(config, &dir, &cfg, &p)?;
            translator_summary(&p)
        }
        Command::Paperclip => paperclip(config, &dir, &cfg)?,
        Command::Verify | Command::Sweep => unreachable!("handled by execute"),
    };
    Ok(Outcome { dir, summary })
}

fn flow_summary(report: &FlowReport) -> BTreeMap<String, String> {
    let last = report.last();
    BTreeMap::from([
        (
            "halt".to_string(),
            serde_json::to_value(report.halt).expect("halt serializes").as_str().unwrap_or("").to_string(),
        ),
        ("t".to_string(), fmt_f64(last.t)),
        ("h".to_string(), fmt_f64(last.h)),
        ("l".to_string(), fmt_f64(last.l)),
        ("V".to_string(), fmt_f64(last.volume)),
        ("steps".to_string(), report.steps.to_string()),
    ])
}

fn write_flow(
    config: &RunConfig,
    dir: &Path,
    cfg: &BTreeMap<String, String>,
    report: &FlowReport,
    extra: Option<Value>,
) -> CliResult<()> {
    if config.formats.json {
        let mut doc = json!({ "schema_version": SCHEMA_VERSION, "config": cfg, "report": report });
        if let Some(extra) = extra {
            doc["glued"] = extra;
        }
        write_file(&dir.join("report.json"), &pretty(&doc))?;
    }
    if config.formats.csv {
        write_file(&dir.join("rows.csv"), &(csv_header(cfg) + &report.to_csv()))?;
    }
    if config.formats.svg {
        type Series = (&'static str, fn(&ReportRow) -> f64);
        let series: [Series; 4] = [("h", |r| r.h), ("l", |r| r.l), ("V", |r| r.volume), ("minR", |r| r.min_ratio)];
        for (name, f) in series {
            let pts: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.t, f(r))).collect();
            write_file(&dir.join(format!("{name}.svg")), &line_plot(&format!("{name}(t)"), "t", name, &pts))?;
        }
    }
    Ok(())
}

fn translator_summary(p: &TranslatorProfile) -> BTreeMap<String, String> {
    let opt = |x: Option<f64>| x.map_or_else(|| "divergent".to_string(), fmt_f64);
    BTreeMap::from([
        ("r_alpha".to_string(), fmt_f64(p.r_alpha)),
        ("blowup_radius".to_string(), fmt_f64(p.blowup_radius)),
        ("M".to_string(), opt(p.m())),
        ("exponent".to_string(), p.fit.map_or_else(|| "none".to_string(), |f| fmt_f64(f.exponent))),
    ])
}

fn write_translator(
    config: &RunConfig,
    dir: &Path,
    cfg: &BTreeMap<String, String>,
    p: &TranslatorProfile,
) -> CliResult<()> {
    if config.formats.json {
        let doc = json!({ "schema_version": SCHEMA_VERSION, "config": cfg, "translator": p });
        write_file(&dir.join("translator.json"), &pretty(&doc))?;
    }
    if config.formats.csv {
        write_file(&dir.join("translator.csv"), &(csv_header(cfg) + &p.to_csv()))?;
    }
    if config.formats.svg {
        let pts: Vec<(f64, f64)> = p.r.iter().copied().zip(p.u.iter().copied()).collect();
        write_file(&dir.join("u.svg"), &line_plot(&format!("translator u(r), alpha = {}", p.alpha), "r", "u", &pts))?;
    }
    Ok(())
}

fn paperclip(config: &RunConfig, dir: &Path, cfg: &BTreeMap<String, String>) -> CliResult<BTreeMap<String, String>> {
    let clip = Paperclip::new(config.t)?;
    let curve = paperclip_curve(config.t, config.per_quadrant)?;
    let ratio = paperclip_ratio_check(config.t)?;
    let residual = curve.identity_residual();
    if config.formats.json {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "config": cfg,
            "paperclip": {
                "t": config.t,
                "h": clip.h(),
                "l": clip.l(),
                "revolution_volume": clip.revolution_volume(),
                "identity_residual": residual,
                "ratio_identity_residual": ratio.max_residual,
                "ratio_sign_holds": ratio.sign_holds,
            },
        });
        write_file(&dir.join("paperclip.json"), &pretty(&doc))?;
    }
    if config.emit_curve {
        let mut csv = csv_header(cfg) + "x,y\n";
        for p in &curve.points {
            csv.push_str(&format!("{},{}\n", fmt_f64(p[0]), fmt_f64(p[1])));
        }
        write_file(&dir.join("curve.csv"), &csv)?;
        if config.formats.svg {
            let mut pts: Vec<(f64, f64)> = curve.points.iter().map(|p| (p[0], p[1])).collect();
            pts.push(pts[0]);
            write_file(&dir.join("curve.svg"), &line_plot(&format!("paperclip, t = {}", config.t), "x", "y", &pts))?;
        }
    }
    Ok(BTreeMap::from([
        ("h".to_string(), fmt_f64(clip.h())),
        ("l".to_string(), fmt_f64(clip.l())),
        ("identity_residual".to_string(), format!("{residual:.3e}")),
    ]))
}

/// Reads a flow report from a run directory or a JSON file.
pub fn load_report(input: &Path) -> CliResult<(PathBuf, FlowReport)> {
    let file = if input.is_dir() { input.join("report.json") } else { input.to_path_buf() };
    let text = std::fs::read_to_string(&file).map_err(|e| CliError::io(&file, e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::io(&file, e))?;
    let inner = value.get("report").cloned().unwrap_or(value);
    let report = serde_json::from_value(inner).map_err(|e| CliError::io(&file, e))?;
    let dir = file.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((dir, report))
}

fn verify(config: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let input = config.input.as_deref().expect("validated by RunConfig::build");
    let (dir, report) = load_report(input)?;
    let results: Vec<CheckResult> = verify_report(&report, config.b);
    write_file(&dir.join("verify.json"), &(results_to_json(&results) + "\n"))?;
    stdout.write_all(results_table(&results).as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    if all_pass(&results) {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(results.iter().filter(|r| r.failed()).count()))
    }
}

fn sweep(config: &RunConfig, root: &Path, stdout: &mut dyn Write) -> CliResult<()> {
    let spec = config.sweep.as_ref().expect("validated by RunConfig::build");
    let base = root.join(config.run_name());
    let children = spec
        .values
        .iter()
        .map(|v| {
            let mut settings = config.settings.clone();
            settings.remove("command");
            settings.remove("name");
            settings.remove("jobs");
            settings.insert(spec.key.clone(), v.clone());
            let mut child = RunConfig::build(spec.command, settings)?;
            child.name = Some(format!("{}_{}{}", spec.command.as_str(), spec.key, v));
            Ok((v.clone(), child))
        })
        .collect::<CliResult<Vec<_>>>()?;

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, CliResult<Outcome>)>> = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..config.jobs.min(children.len()) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some((_, child)) = children.get(k) else { break };
                let r = run_one(child, &base);
                results.lock().expect("no panics while locked").push((k, r));
            });
        }
    });
    let mut results = results.into_inner().expect("no panics while locked");
    results.sort_by_key(|(k, _)| *k);

    let mut rows: Vec<(f64, String, Outcome)> = Vec::new();
    for (k, r) in results {
        let value = children[k].0.clone();
        let key: f64 = value.parse().unwrap_or(f64::NAN);
        rows.push((key, value, r?));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let columns: Vec<String> = rows.first().map(|r| r.2.summary.keys().cloned().collect()).unwrap_or_default();
    let cfg = effective_config(config);
    let mut csv = csv_header(&cfg);
    csv.push_str(&spec.key);
    for c in &columns {
        csv.push(',');
        csv.push_str(c);
    }
    csv.push('\n');
    let mut table = String::new();
    table.push_str(&format!("{:<10}", spec.key));
    for c in &columns {
        table.push_str(&format!(" {c:>24}"));
    }
    table.push('\n');
    let mut entries = Vec::new();
    for (_, value, outcome) in &rows {
        csv.push_str(value);
        table.push_str(&format!("{value:<10}"));
        for c in &columns {
            let v = outcome.summary.get(c).map_or("", String::as_str);
            csv.push(',');
            csv.push_str(v);
            table.push_str(&format!(" {v:>24}"));
        }
        csv.push('\n');
        table.push('\n');
        let dir = outcome.dir.strip_prefix(&base).unwrap_or(&outcome.dir).display().to_string();
        entries.push(json!({ "value": value, "dir": dir, "summary": outcome.summary }));
    }
    std::fs::create_dir_all(&base).map_err(|e| CliError::io(&base, e))?;
    write_file(&base.join("summary.csv"), &csv)?;
    let doc = json!({ "schema_version": SCHEMA_VERSION, "config": cfg, "key": spec.key, "runs": entries });
    write_file(&base.join("summary.json"), &pretty(&doc))?;
    table.push_str(&format!("wrote {}\n", base.display()));
    stdout.write_all(table.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}
