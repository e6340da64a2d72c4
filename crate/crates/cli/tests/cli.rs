use std::path::Path;
use std::process::{Command, Output};

use stochbayes::bbn::{prior_hd, Evidence, HeartBbn};
use stochbayes::fusion::read_heatmap_csv;

fn stochbayes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stochbayes"))
        .args(args)
        .env_remove("STOCHBAYES_THREADS")
        .output()
        .expect("spawn")
}

fn ok(args: &[&str]) -> String {
    let out = stochbayes(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Fields of one CSV line; double-quoted fields may hold commas.
fn fields(line: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut quoted = false;
    for ch in line.chars() {
        match ch {
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(String::new()),
            c => out.last_mut().unwrap().push(c),
        }
    }
    out
}

/// Data rows of a CSV output: after the `#` header and the column line.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .take_while(|l| !l.is_empty())
        .map(fields)
        .collect()
}

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

#[test]
fn header_echoes_run_settings() {
    let device = configs().join("device.toml");
    let out = ok(&["pv-curve", "--seed", "17", "--device", device.to_str().unwrap()]);
    let header: Vec<&str> = out.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header[0].starts_with("# stochbayes "));
    assert!(header.contains(&"# subcommand: pv-curve"));
    assert!(header.contains(&"# seed: 17"));
    assert!(header.iter().any(|l| l.starts_with("# length: ")));
    assert!(header.iter().any(|l| l.starts_with("# device: ") && l.ends_with("device.toml")));
}

#[test]
fn pv_curve_monte_carlo_agrees() {
    let out = ok(&["pv-curve", "--points", "24", "--trials", "1000"]);
    assert!(out.contains("voltage,analytic_p,mc_p,mc_trials\n"));
    let r = rows(&out);
    assert_eq!(r.len(), 24);
    for row in r {
        let p: f64 = row[1].parse().unwrap();
        let mc: f64 = row[2].parse().unwrap();
        let sigma = (p * (1.0 - p) / 1000.0).sqrt();
        assert!((mc - p).abs() <= 3.0 * sigma + 1e-3, "{row:?}");
        assert_eq!(row[3], "1000");
    }
    assert_eq!(rows(&ok(&["pv-curve", "--points", "2"])).len(), 2);
}

#[test]
fn missing_config_names_path() {
    let out = stochbayes(&["pv-curve", "--device", "/definitely/not/here.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/definitely/not/here.toml"));
}

#[test]
fn sbg_bench_is_reproducible_and_monotone() {
    let args = ["sbg-bench", "--seed", "9", "--seeds", "50"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let r = rows(&a);
    let mae = |kind: &str| -> Vec<f64> { r.iter().filter(|x| x[0] == kind).map(|x| x[4].parse().unwrap()).collect() };
    for kind in ["representation", "product"] {
        let m = mae(kind);
        assert_eq!(m.len(), 3);
        assert!(m[0] > m[1] && m[1] > m[2], "{kind}: {m:?}");
    }
    for x in &r {
        let ratio: f64 = x[7].parse().unwrap();
        assert!(ratio <= 2.0, "{x:?}");
    }
}

#[test]
fn netlist_run_minimal_and_cyclic() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("and.net");
    std::fs::write(&good, "sbg a p=0.5\nsbg b p=0.5\nand c a b\nout c\n").unwrap();
    let out = ok(&["netlist-run", good.to_str().unwrap(), "--length", "4096"]);
    let r = rows(&out);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][0], "c");
    let p: f64 = r[0][1].parse().unwrap();
    assert!((p - 0.25).abs() <= 0.02);
    assert!(out.contains("latency_ns=163840 "));
    assert!(out.contains("(estimate, unvalidated)"));

    let cyclic = dir.path().join("cyc.net");
    std::fs::write(&cyclic, "sbg s p=0.5\nand x y s\nand y x s\nout x\n").unwrap();
    let out = stochbayes(&["netlist-run", cyclic.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cyc.net") && err.contains("line 2"), "{err}");
}

#[test]
fn fusion_netlist_census_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("fusion.net");
    ok(&["fusion", "--grid", "64", "--length", "8", "--seeds", "1", "--emit-netlist", net.to_str().unwrap()]);
    let out = ok(&["netlist-run", net.to_str().unwrap(), "--length", "8"]);
    assert!(out.contains("n_sbg=24576 n_and=20480 n_mux=0 n_counters=4096"), "{}", &out[..400]);
}

#[test]
fn fusion_writes_heatmaps_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&["fusion", "--grid", "16", "--length", "64,256", "--seeds", "2", "--out", d]);
    let report = std::fs::read_to_string(dir.path().join("kl.csv")).unwrap();
    let r = rows(&report);
    assert_eq!(r.len(), 2);
    let kl: Vec<f64> = r.iter().map(|x| x[3].parse().unwrap()).collect();
    assert!(kl[1] < kl[0]);
    let exact = read_heatmap_csv(&std::fs::read_to_string(dir.path().join("exact_g16.csv")).unwrap()).unwrap();
    assert_eq!(exact.size(), 16);
    assert!(dir.path().join("stochastic_g16_n256.csv").exists());

    ok(&["fusion", "--grid", "16", "--length", "64", "--seeds", "1", "--format", "pgm", "--out", d]);
    let pgm = std::fs::read(dir.path().join("exact_g16.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n# stochbayes "));
    assert!(pgm.contains(&255));
}

#[test]
fn fusion_degenerate_exit_code() {
    let out = stochbayes(&["fusion", "--grid", "2", "--length", "1", "--seeds", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bbn_reference_rows() {
    let out = ok(&["bbn", "--length", "1024", "--seeds", "10"]);
    assert!(out.contains("query,ctrl1,ctrl2,ctrl3,ctrl4,exact,stochastic,abs_err\n"));
    let r = rows(&out);
    assert_eq!(r[1][0], "p(HD|D,E,BP)");
    let tuples: Vec<String> = r.iter().map(|x| x[1..5].join(",")).collect();
    assert_eq!(
        tuples,
        [
            "0.25,0.75,1.00,0.00",
            "1.00,1.00,1.00,0.00",
            "0.25,1.00,1.00,0.00",
            "1.00,1.00,1.00,1.00",
            "0.25,0.75,0.00,1.00"
        ]
    );
    for x in &r {
        assert!(x[7].parse::<f64>().unwrap() <= 0.05, "{x:?}");
    }
}

#[test]
fn bbn_unknown_evidence_is_prior() {
    let out = ok(&["bbn", "--evidence", "E=Y", "--seeds", "1"]);
    let r = rows(&out);
    let exact: f64 = r[0][5].parse().unwrap();
    let ev = Evidence::parse("E=Y").unwrap();
    assert!((exact - prior_hd(&HeartBbn::default(), &ev).value()).abs() < 1e-6);
}

#[test]
fn bbn_degenerate_rows_are_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.toml");
    let text = HeartBbn {
        cpt_bp: [1.0, 1.0],
        ..Default::default()
    }
    .to_toml_string();
    std::fs::write(&model, text).unwrap();
    let out = ok(&["bbn", "--model", model.to_str().unwrap(), "--evidence", "BP=Low", "--seeds", "1"]);
    assert!(out.contains(",degenerate,degenerate,degenerate"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(stochbayes(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(stochbayes(&["pv-curve", "--points", "many"]).status.code(), Some(1));
    assert_eq!(stochbayes(&["bbn", "--evidence", "Q=1"]).status.code(), Some(1));
    assert_eq!(stochbayes(&["--version"]).status.code(), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_stochbayes"))
        .args(["bbn", "--seeds", "1"])
        .env("STOCHBAYES_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bbn.csv");
    let stdout = ok(&["bbn", "--seeds", "2"]);
    ok(&["bbn", "--seeds", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(path).unwrap(), stdout);
}
