use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tempered"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn train(dir: &Path, name: &str, seed: &str) -> PathBuf {
    let out = dir.join(name);
    let bw = data("breastwisc.csv");
    let o = run(&[
        "--jobs",
        "2",
        "train",
        "--data",
        s(&bw),
        "--label",
        "class",
        "--positive",
        "4",
        "--trees",
        "5",
        "--tree-size",
        "15",
        "--folds",
        "3",
        "--seed",
        seed,
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn selftest_core_exits_zero() {
    let o = run(&["selftest", "--suite", "core"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
}

#[test]
fn train_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = std::fs::read(train(dir.path(), "a.json", "7")).unwrap();
    let b = std::fs::read(train(dir.path(), "b.json", "7")).unwrap();
    assert_eq!(a, b);
    let c = std::fs::read(train(dir.path(), "c.json", "8")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn pipeline_to_svg() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let model = train(d, "m.json", "0");
    let mdt = d.join("bw.json");
    let layout = d.join("l.json");
    let layout_t = d.join("lt.json");
    assert!(run(&["mdt", "--model", s(&model), "--out", s(&mdt)])
        .status
        .success());
    assert!(run(&[
        "embed",
        "--mdt",
        s(&mdt),
        "--tree",
        "1",
        "--out",
        s(&layout)
    ])
    .status
    .success());
    assert!(run(&[
        "layout-tself",
        "--layout",
        s(&layout),
        "--t",
        "0.5",
        "--out",
        s(&layout_t)
    ])
    .status
    .success());
    let o = run(&[
        "render",
        "--layout",
        s(&layout),
        "--mdt",
        s(&mdt),
        "--isolines",
        "0.6,0.9",
        "--t",
        "0.5",
        "--out",
        s(d),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(d.join("bw_tree1_t0.5.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    let o = run(&[
        "eval",
        "--data",
        s(&data("breastwisc.csv")),
        "--model",
        s(&model),
        "--as-mdt",
    ]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("MDT ensemble test error"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["train", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["selftest", "--suite", "nope"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        run(&["mdt", "--model", s(&missing), "--out", "x.json"])
            .status
            .code(),
        Some(2)
    );
    let bw = data("breastwisc.csv");
    let o = run(&[
        "train",
        "--data",
        s(&bw),
        "--label",
        "nope",
        "--positive",
        "4",
        "--out",
        "x.json",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let out = dir.path().join("m.json");
    std::fs::write(
        &cfg,
        format!(
            "data = {:?}\nlabel = \"class\"\npositive = 4\ntrees = 3\ntree-size = 7\nfolds = 2\n",
            s(&data("breastwisc.csv"))
        ),
    )
    .unwrap();
    let o = run(&[
        "--config",
        s(&cfg),
        "train",
        "--trees",
        "2",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("T = 2, 7-node trees"));
}

#[test]
fn wrong_artifact_kind_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let model = train(dir.path(), "m.json", "0");
    let o = run(&[
        "embed",
        "--mdt",
        s(&model),
        "--tree",
        "0",
        "--out",
        "x.json",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected `mdt`"));
}
