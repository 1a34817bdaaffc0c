use std::process::{Command, Output};

fn mereology(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mereology"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sweep_writes_csv_summary_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let summary = dir.path().join("sum.csv");
    let plot = dir.path().join("plot.json");
    let o = mereology(&[
        "sweep",
        "--shape",
        "2x3x2",
        "--states",
        "2",
        "--seed",
        "4",
        "--out",
        out.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "state_id,subset_mask,subset_size,purity,s2_bits");
    assert_eq!(body.len(), 1 + 2 * 6);
    let sum = std::fs::read_to_string(&summary).unwrap();
    assert!(sum.contains("subset_size,count,min,mean,max,std,state_spread"));
    let spec: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&plot).unwrap()).unwrap();
    assert_eq!(spec["data"]["file"], "s.csv");
    assert_eq!(spec["summary"]["file"], "sum.csv");
}

#[test]
fn energy_sweep_to_stdout() {
    let o = mereology(&[
        "sweep",
        "--shape",
        "2^3",
        "--states",
        "1",
        "--basis",
        "energy",
        "--generator",
        "(0 1 2)(3 4)",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("# basis: energy"));
    assert!(text.contains("# generator: (0 1 2)(3 4)"));
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        vec!["sweep", "--shape", "2x"],
        vec!["sweep", "--shape", "2^3", "--states", "0"],
        vec!["sweep", "--shape", "2^3", "--subset-policy", "sampled:0"],
        vec!["sweep", "--shape", "2^3", "--generator", "(0 1)"],
        vec![
            "sweep",
            "--shape",
            "2^3",
            "--basis",
            "energy",
            "--generator",
            "(0 9)",
        ],
        vec!["sweep", "--shape", "2^12", "--gram-cap", "8"],
        vec![
            "evolve",
            "--shape",
            "2^3",
            "--generator",
            "(0 1 2)",
            "--t-end",
            "9",
        ],
        vec!["cycles", "--samples", "0"],
        vec!["area", "--n", "1"],
        vec!["overlap", "4:0x0", "4:0x3"],
        vec!["sweep", "--no-such-flag"],
    ] {
        let o = mereology(&args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn evolve_series_is_periodic() {
    let o = mereology(&[
        "evolve",
        "--shape",
        "2^3",
        "--q",
        "8:0xB4",
        "--generator",
        "(0 1 2 3 4 5 6)",
        "--subset",
        "1",
        "--t-end",
        "14",
        "--allow-wrap",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let values: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('t'))
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(values.len(), 14);
    assert_eq!(values[..7], values[7..]);
}

#[test]
fn cycles_and_overlap_and_area() {
    let o = mereology(&["cycles", "--n", "5", "--samples", "2000", "--seed", "1"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o).lines().filter(|l| !l.starts_with('#')).count(),
        6
    );

    let o = mereology(&["overlap", "1100", "1010"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("inner_ontic: 1"));
    assert!(text.contains("overlap_standard: 0.0000000000000000e0"));

    let o = mereology(&["area", "--n", "4096"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("decimal_digits: 1234"));
}
