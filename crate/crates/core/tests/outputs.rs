use std::fs;
use std::process::Command;

use irvs_sim::metrics::percentile;
use irvs_sim::runner::dump_channels;
use irvs_sim::{run_experiment, write_results, ExperimentSpec, Scheme, SystemConfig};

fn small_config(n_drops: u64) -> SystemConfig {
    let mut cfg = SystemConfig {
        n_drops,
        n_bs_antennas: 4,
        ..SystemConfig::default()
    };
    cfg.set_surfaces(2, Some(16));
    cfg
}

fn spec(n_drops: u64, schemes: Vec<Scheme>, dir: &std::path::Path) -> ExperimentSpec {
    ExperimentSpec {
        config: small_config(n_drops),
        schemes,
        output_dir: dir.to_path_buf(),
        emit_cdf: true,
        workers: None,
    }
}

#[test]
fn drops_csv_reproduces_summary() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec(40, Scheme::reference_set(), dir.path());
    let out = run_experiment(&spec).unwrap();
    write_results(&out.drops, &out.summaries, dir.path(), true).unwrap();

    let drops = fs::read_to_string(dir.path().join("drops.csv")).unwrap();
    let mut lines = drops.lines();
    assert_eq!(lines.next(), Some("drop,scheme,sum_rate_bpshz"));
    let rows: Vec<(u64, String, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].to_string(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 40 * 6);

    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some("scheme,samples,p5_bpshz,p50_bpshz"));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let samples: Vec<f64> = rows.iter().filter(|r| r.1 == f[0]).map(|r| r.2).collect();
        assert_eq!(samples.len(), f[1].parse::<usize>().unwrap());
        let p5: f64 = f[2].parse().unwrap();
        let p50: f64 = f[3].parse().unwrap();
        assert!((percentile(&samples, 0.05).unwrap() - p5).abs() < 1e-6);
        assert!((percentile(&samples, 0.5).unwrap() - p50).abs() < 1e-6);

        let cdf = fs::read_to_string(dir.path().join(format!("cdf_{}.csv", f[0]))).unwrap();
        let last = cdf.lines().last().unwrap();
        assert!(last.ends_with(",1.000000"), "{last}");
        assert_eq!(cdf.lines().count(), samples.len() + 1);
    }
}

#[test]
fn row_count_is_drops_times_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec(2, vec![Scheme::Tdma, Scheme::Cps], dir.path());
    let out = run_experiment(&spec).unwrap();
    write_results(&out.drops, &out.summaries, dir.path(), false).unwrap();
    let drops = fs::read_to_string(dir.path().join("drops.csv")).unwrap();
    assert_eq!(drops.lines().count(), 1 + 4);
    assert!(!dir.path().join("cdf_CPS.csv").exists());
}

#[test]
fn config_file_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    fs::write(&path, "n_users = 3\nn_drops = 7\nmaster_seed = 9\n").unwrap();
    let cfg = SystemConfig::from_file(&path).unwrap();
    assert_eq!((cfg.n_users, cfg.n_drops, cfg.master_seed), (3, 7, 9));
    assert_eq!(cfg.n_bs_antennas, SystemConfig::default().n_bs_antennas);

    fs::write(&path, "n_userz = 3\n").unwrap();
    assert!(SystemConfig::from_file(&path).is_err());
    assert!(SystemConfig::from_file(dir.path().join("missing.toml")).is_err());
}

#[test]
fn channel_dump_has_every_block() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(1);
    let path = dir.path().join("ch.txt");
    dump_channels(&cfg, 0, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let count = |tag: &str| text.lines().filter(|l| l.starts_with(tag)).count();
    assert_eq!(count("[direct"), cfg.n_users);
    assert_eq!(count("[surf_ue"), cfg.n_users * cfg.n_surfaces);
    assert_eq!(count("[bs_surf"), cfg.n_surfaces);
}

#[test]
fn cli_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let status = Command::new(env!("CARGO_BIN_EXE_irvs-sim"))
        .args(["--drops", "3", "--elements", "8", "--schemes", "TDMA,DPS,CPS", "--bits", "2"])
        .args(["--dump-drop", "1", "--emit-cdf", "--workers", "2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let stdout = String::from_utf8_lossy(&status.stdout);
    assert!(stdout.contains("DPS-2bit"));
    for f in ["drops.csv", "summary.csv", "cdf_CPS.csv", "channels_drop1.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(fs::read_to_string(out.join("drops.csv")).unwrap().lines().count(), 1 + 9);
}

#[test]
fn cli_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_irvs-sim"))
            .args(args)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap()
    };
    let bad_scheme = run(&["--drops", "1", "--schemes", "FDMA"]);
    assert!(!bad_scheme.status.success());
    assert!(String::from_utf8_lossy(&bad_scheme.stderr).starts_with("error:"));
    assert!(!run(&["--drops", "2", "--dump-drop", "5"]).status.success());
    assert!(!run(&["--drops", "0"]).status.success());
}
