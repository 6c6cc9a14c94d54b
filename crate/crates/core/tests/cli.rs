use std::path::Path;
use std::process::Command;

const SMALL: &str = "points_per_circle = 120\nquadrature = 48\ntruncation = 2\nrepetitions = 2\ngrid = 24\nbounds_n = 3\ncache_forward = false\n";

fn biharm(dir: &Path, config: &str, args: &[&str]) -> i32 {
    let cfg = dir.join("cfg.toml");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_biharm"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .args(args)
        .env("RUST_LOG", "error")
        .status()
        .unwrap()
        .code()
        .unwrap()
}

#[test]
fn forward_then_retrieve() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(biharm(dir.path(), SMALL, &["forward"]), 0);
    assert_eq!(biharm(dir.path(), SMALL, &["retrieve"]), 0);
    let out = dir.path().join("out");
    for f in [
        "forward.csv",
        "phaseless.csv",
        "retrieved.csv",
        "retrieval_report.csv",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    // clean data: every arc error is at rounding level
    let mut r = csv::Reader::from_path(out.join("retrieval_report.csv")).unwrap();
    let mut n = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        let err: f64 = rec[3].parse().unwrap();
        assert!(err < 1e-9, "{rec:?}");
        n += 1;
    }
    assert_eq!(n, 4 * 10 * 2);
}

#[test]
fn reconstruct_with_eps_list() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        biharm(
            dir.path(),
            SMALL,
            &["reconstruct", "--eps", "0.05,0.1", "--grid", "12"]
        ),
        0
    );
    let out = dir.path().join("out");
    let t5 = std::fs::read_to_string(out.join("table5.csv")).unwrap();
    assert_eq!(t5.lines().count(), 3);
    assert_eq!(
        std::fs::metadata(out.join("recon_eps0.1.bin"))
            .unwrap()
            .len(),
        12 + 8 * 144
    );
    assert!(!out.join("recon_phased_eps0.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(biharm(dir.path(), SMALL, &["verify-bounds"]), 0);
    let strict = format!("{SMALL}m_scale = 1000.0\n");
    assert_eq!(biharm(dir.path(), &strict, &["verify-bounds"]), 2);
    assert!(dir.path().join("out/bounds_violations.csv").exists());
    assert_eq!(biharm(dir.path(), "tau = 2.0\n", &["verify-bounds"]), 1);
    assert_eq!(biharm(dir.path(), SMALL, &["tables", "--eps", "1.5"]), 1);
    assert_eq!(biharm(dir.path(), SMALL, &["retrieve"]), 1);
}
