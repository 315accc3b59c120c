use std::path::Path;
use std::process::Command as Process;

use gcflab_cli::{parse_config, parse_config_text, run_cli, CliError, Command};

fn args(line: &str) -> Vec<String> {
    std::iter::once("gcflab".to_string()).chain(line.split_whitespace().map(str::to_string)).collect()
}

fn run(line: &str) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(args(line), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn pancake_flags_parse() {
    let c = parse_config(args("pancake --j 5 --grid 1024 --t-end -0.5")).unwrap();
    assert_eq!(c.command, Command::Pancake);
    assert_eq!((c.j, c.grid, c.t_end, c.alpha), (5, 1024, -0.5, 1.0));
}

#[test]
fn sausage_alpha_below_half_is_rejected() {
    match parse_config(args("sausage --alpha 0.4")) {
        Err(CliError::BadValue { key, value, expected }) => {
            assert_eq!((key.as_str(), value.as_str()), ("alpha", "0.4"));
            assert!(expected.contains("(1/2, 1)"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_keys_are_named() {
    assert!(matches!(parse_config(args("pancake --gird 5")), Err(CliError::UnknownKey(k)) if k == "gird"));
    assert!(matches!(parse_config_text("colour = red\n"), Err(CliError::UnknownKey(k)) if k == "colour"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.cfg");
    std::fs::write(&file, "# pancake settings\ngrid = 512\nt_end = -1 # underscores work\nj=3\n").unwrap();
    let c = parse_config(args(&format!("pancake --config {} --grid 1024", file.display()))).unwrap();
    assert_eq!((c.grid, c.t_end, c.j), (1024, -1.0, 3));
}

#[test]
fn bad_values_name_key_and_range() {
    for (line, key) in [
        ("pancake --grid 4", "grid"),
        ("pancake --t-end 1", "t-end"),
        ("pancake --alpha 2", "alpha"),
        ("glued --alpha 0.9", "alpha"),
        ("translator --alpha 0.5", "alpha"),
        ("paperclip --t 0", "t"),
        ("pancake --cfl 0.9", "cfl"),
        ("pancake --formats pdf", "formats"),
    ] {
        match parse_config(args(line)) {
            Err(CliError::BadValue { key: k, .. }) => assert_eq!(k, key, "{line}"),
            other => panic!("{line}: {other:?}"),
        }
    }
}

#[test]
fn exit_codes_by_error_class() {
    assert_eq!(run("pancake --bogus 1").0, 2);
    assert_eq!(run("sausage --alpha 0.4").0, 2);
    assert_eq!(run("verify --in /nonexistent/run").0, 3);
    assert_eq!(run("verify").0, 2);
    let (code, out, _) = run("--help");
    assert_eq!(code, 0);
    assert!(out.contains("pancake"));
}

fn parse_csv(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn paperclip_curve_satisfies_identity() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&format!("paperclip --t -3 --emit-curve --out {}", dir.path().display()));
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(dir.path().join("paperclip_t-3/curve.csv")).unwrap();
    assert!(text.contains("# t=-3"));
    let rows = parse_csv(&text);
    assert_eq!(rows.len(), 1600);
    for r in rows {
        assert!((r[0].cos() - (-3f64).exp() * r[1].cosh()).abs() <= 1e-12);
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("paperclip_t-3/paperclip.json")).unwrap())
            .unwrap();
    assert_eq!(json["config"]["command"], "paperclip");
}

fn small_pancake(out: &Path) -> String {
    format!("pancake --j 2 --grid 64 --t-end -1.5 --snapshot-every 0.1 --formats csv,json,svg --out {}", out.display())
}

#[test]
fn identical_configs_give_identical_artifacts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run(&small_pancake(a.path())).0, 0);
    assert_eq!(run(&small_pancake(b.path())).0, 0);
    for f in ["report.json", "rows.csv", "h.svg", "l.svg", "V.svg", "minR.svg"] {
        let x = std::fs::read(a.path().join("pancake_j2").join(f)).unwrap();
        let y = std::fs::read(b.path().join("pancake_j2").join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
    let csv = std::fs::read_to_string(a.path().join("pancake_j2/rows.csv")).unwrap();
    assert!(csv.starts_with("# alpha="));
    assert!(!csv.contains('\r'));
}

#[test]
fn verify_replays_a_run() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&small_pancake(dir.path())).0, 0);
    let run_dir = dir.path().join("pancake_j2");
    let (code, out, _) = run(&format!("verify --in {}", run_dir.display()));
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("volume_rate"));
    assert!(run_dir.join("verify.json").exists());

    // Breaking the volume law makes the replay fail.
    let path = run_dir.join("report.json");
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let v = doc["report"]["rows"][3]["V"].as_f64().unwrap();
    doc["report"]["rows"][3]["V"] = serde_json::json!(v * 1.1);
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let (code, out, _) = run(&format!("verify --in {}", run_dir.display()));
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
}

#[test]
fn translator_sweep_writes_sorted_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&format!(
        "sweep --command translator --alpha 2,0.75,1.5,1 --jobs 3 --translator-grid 512 --out {}",
        dir.path().display()
    ));
    assert_eq!(code, 0, "{err}");
    let base = dir.path().join("sweep_translator_alpha");
    for a in ["0.75", "1", "1.5", "2"] {
        assert!(base.join(format!("translator_alpha{a}/translator.json")).exists());
    }
    let summary = std::fs::read_to_string(base.join("summary.csv")).unwrap();
    let order: Vec<&str> =
        summary.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(order, ["0.75", "1", "1.5", "2"]);
    assert!(summary.lines().any(|l| l.starts_with("alpha,M,blowup_radius,exponent,r_alpha")));
}

#[test]
fn sweep_needs_one_list() {
    assert!(matches!(parse_config(args("sweep --command translator --alpha 2")), Err(CliError::Usage(_))));
    assert!(matches!(
        parse_config(args("sweep --command translator --alpha 1,2 --cfl 0.1,0.2")),
        Err(CliError::Usage(_))
    ));
    assert!(matches!(
        parse_config(args("sweep --command sausage --alpha 0.7,0.3")),
        Err(CliError::BadValue { key, .. }) if key == "alpha"
    ));
}

#[test]
fn output_root_env_overrides_flag() {
    let (env_root, flag_root) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let status = Process::new(env!("CARGO_BIN_EXE_gcflab"))
        .args(["translator", "--alpha", "2", "--translator-grid", "256", "--out"])
        .arg(flag_root.path())
        .env("GCFLAB_OUT", env_root.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(env_root.path().join("translator_alpha2/translator.json").exists());
    assert!(!flag_root.path().join("translator_alpha2").exists());
}
