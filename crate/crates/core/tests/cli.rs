//! End-to-end checks of the butterfly-lab binary: exit codes, determinism,
//! file outputs.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_butterfly-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn bands_square_trivial() {
    let out = run(&["bands", "--model", "square", "--p", "0", "--q", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("band 0"), "{text}");
    assert!(text.contains("-2.") && text.contains("+2."), "{text}");
}

#[test]
fn bands_kagome_prop113_json() {
    let out = run(&[
        "bands", "--model", "kagome", "--p", "3", "--q", "2", "--omega-pi", "1/8", "--format",
        "json",
    ]);
    assert!(out.status.success());
    let bs: butterfly_lab::BandStructure = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(bs.bands.len(), 5);
    assert!(bs.bands[0].flat && bs.bands[0].multiplicity == 2);
    assert!((bs.bands[0].lo + 2.0).abs() < 1e-9);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        run(&["bands", "--model", "square", "--p", "1", "--q", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["bands", "--model", "nonagon", "--p", "1", "--q", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["bands", "--bogus-flag"]).status.code(), Some(2));
    assert_eq!(
        run(&["flatband", "--p", "0", "--q", "1"]).status.code(),
        Some(2),
        "flatband without --omega or --scan is a usage error"
    );
    assert_eq!(
        run(&["semiclassical", "--grid", "4"]).status.code(),
        Some(2)
    );
}

#[test]
fn numerical_failure_exits_1() {
    let out = run(&[
        "chambers",
        "--model",
        "kagome",
        "--p",
        "1",
        "--q",
        "3",
        "--fit-tolerance",
        "1e-20",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exists_for_every_command() {
    for cmd in [
        "bands",
        "chambers",
        "flatband",
        "butterfly",
        "verify",
        "semiclassical",
    ] {
        let out = run(&[cmd, "--help"]);
        assert!(out.status.success(), "{cmd} --help failed");
        assert!(stdout(&out).contains("Usage"), "{cmd}");
    }
}

#[test]
fn chambers_kagome_base_closed_form() {
    let out = run(&["chambers", "--model", "kagome", "--p", "0", "--q", "1"]);
    assert!(out.status.success());
    let form: butterfly_lab::ChambersForm = serde_json::from_str(&stdout(&out)).unwrap();
    // ω = 0: base = λ³ − 6λ − 4
    let expect = [-4.0, -6.0, 0.0, 1.0];
    for (k, &c) in expect.iter().enumerate() {
        assert!((form.base.coeff(k) - c).abs() < 1e-9, "coeff {k}");
    }
}

#[test]
fn flatband_scan_and_single_point() {
    let out = run(&["flatband", "--p", "0", "--q", "1", "--scan"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let values: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| l.split_whitespace().next()?.parse().ok())
        .collect();
    assert_eq!(values.len(), 4, "{text}");

    let out = run(&["flatband", "--p", "3", "--q", "2", "--omega", "0.39269908"]);
    assert!(out.status.success());
    let t: butterfly_lab::FlatBandTest = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(t.flat);
    assert!((t.lambda_star + 2.0).abs() < 1e-6);

    let out = run(&["flatband", "--p", "0", "--q", "1", "--omega", "0.2617994"]);
    assert!(out.status.success());
    let t: butterfly_lab::FlatBandTest = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!t.flat);
}

#[test]
fn butterfly_outputs_are_deterministic() {
    let dir = std::env::temp_dir().join("butterfly-lab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let csv1 = dir.join("a.csv");
    let csv2 = dir.join("b.csv");
    let svg1 = dir.join("a.svg");
    let svg2 = dir.join("b.svg");
    for (csv, svg) in [(&csv1, &svg1), (&csv2, &svg2)] {
        let out = run(&[
            "butterfly",
            "--model",
            "kagome",
            "--omega",
            "0",
            "--qmax",
            "4",
            "--out",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let a = std::fs::read(&csv1).unwrap();
    assert_eq!(a, std::fs::read(&csv2).unwrap());
    assert!(a.starts_with(b"p,q,flux,band_index,lambda_min,lambda_max,flat,multiplicity\n"));
    assert_eq!(std::fs::read(&svg1).unwrap(), std::fs::read(&svg2).unwrap());

    // qmax=1 still writes valid files
    let csv = dir.join("tiny.json");
    let out = run(&[
        "butterfly", "--model", "square", "--qmax", "1", "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let ds: butterfly_lab::ButterflyDataset =
        serde_json::from_str(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(ds.records.len(), 2);
}

#[test]
fn config_file_overrides_and_flag_precedence() {
    let dir = std::env::temp_dir().join("butterfly-lab-cli-cfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("strict.cfg");
    std::fs::write(&cfg, "fit_tolerance = 1e-20\n").unwrap();
    // config makes the fit fail…
    let out = run(&[
        "chambers", "--model", "kagome", "--p", "1", "--q", "3",
        "--config", cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    // …but an explicit flag wins over the config
    let out = run(&[
        "chambers", "--model", "kagome", "--p", "1", "--q", "3",
        "--config", cfg.to_str().unwrap(), "--fit-tolerance", "1e-8",
    ]);
    assert!(out.status.success());
}

#[test]
fn semiclassical_coarse_run() {
    let out = run(&["semiclassical", "--grid", "8", "--h", "0.1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("sigma_min"), "{text}");
    assert!(text.contains("effective_band_hull"), "{text}");
}

#[test]
fn verify_passes_with_default_and_custom_seed() {
    for args in [vec!["verify"], vec!["verify", "--seed", "7"]] {
        let out = run(&args);
        assert!(out.status.success(), "{args:?}");
        let text = stdout(&out);
        assert!(text.contains("all") && text.contains("checks passed"), "{text}");
        assert!(!text.contains("FAIL"), "{text}");
    }
}
