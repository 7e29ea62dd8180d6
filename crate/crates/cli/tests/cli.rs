use std::process::Command;

fn geosep(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_geosep"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn separate_prints_one_row_per_scale() {
    let out = geosep(&["separate", "--scales", "5..6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3, "{text}");
    assert!(text.lines().nth(1).unwrap().trim_start().starts_with('5'));
}

#[test]
fn invalid_input_exits_with_status_two() {
    assert_eq!(
        geosep(&["separate", "--scales", "3..5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        geosep(&["separate", "--epsilon", "0.5"]).status.code(),
        Some(2)
    );
    let dir = std::env::temp_dir().join(format!("geosep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "[scene]\npoints = []\n").unwrap();
    let out = geosep(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn abstract_verify_passes() {
    let out = geosep(&["abstract-verify", "--seed", "3"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn plot_data_writes_ratio_table() {
    let dir = std::env::temp_dir().join(format!("geosep-plot-{}", std::process::id()));
    let out = geosep(&[
        "plot-data",
        "--scales",
        "5..5",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let ratio = std::fs::read_to_string(dir.join("ratio.csv")).unwrap();
    assert_eq!(ratio.lines().count(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}
