//! Acceptance criterion 10: every CLI command, run twice on identical
//! inputs, produces byte-identical artifacts — including under different
//! thread caps.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use uwvos_testkit::fixture::{
    rect_labels, stamp_rect, write_identity_predictions, SyntheticVideo, TempDataset,
};

fn run(args: &[&str], threads: &str) {
    let output = Command::new(env!("CARGO_BIN_EXE_uwvos"))
        .args(args)
        .env("UWVOS_THREADS", threads)
        .output()
        .expect("binary runs");
    assert!(
        output.status.code() == Some(0) || output.status.code() == Some(1),
        "command crashed: {output:?}"
    );
}

/// Snapshot of every artifact in a directory.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).expect("read out dir") {
        let path = entry.expect("dir entry").path();
        if path.is_file() {
            let name = path.file_name().unwrap().to_string_lossy().to_string();
            files.insert(name, std::fs::read(&path).expect("read artifact"));
        }
    }
    files
}

fn fixture() -> Vec<SyntheticVideo> {
    let mut videos = Vec::new();
    for v in 0..6 {
        let mut video = SyntheticVideo::new(format!("vid_{v:02}"), 32, 24)
            .category(1, "goldfish")
            .category(2, "crab")
            .with_jpeg_color((60 + 10 * v, 120, 80));
        for i in 0..5u32 {
            let mut labels = rect_labels(32, 24, 1, i + v as u32, 2, i + v as u32 + 5, 8);
            stamp_rect(&mut labels, 32, 2, 20, 12, 26, 18);
            video.push_frame(labels);
        }
        videos.push(video);
    }
    videos
}

#[test]
fn criterion_10_cli_byte_determinism() {
    let start = Instant::now();

    let videos = fixture();
    let data = TempDataset::new(&videos);
    write_identity_predictions(&data.pred_root, &videos);
    let sidecar = data.write_sidecar(&serde_json::json!({
        "vid_00": {"1": {"CAM": true, "UV": "medium"}},
        "vid_03": {"*": {"US": "sea"}}
    }));
    let taxonomy = data.write_taxonomy(&[("goldfish", "fish"), ("crab", "crustaceans")]);
    let train = TempDataset::new(&fixture());

    let gt = data.root.to_str().unwrap();
    let pred = data.pred_root.to_str().unwrap();
    let train_gt = train.root.to_str().unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    let out = out_dir.path().to_str().unwrap();

    let commands: Vec<(&str, Vec<&str>)> = vec![
        (
            "evaluate",
            vec!["evaluate", "--gt", gt, "--pred", pred, "--format", "csv", "--out", out],
        ),
        ("validate", vec!["validate", "--gt", gt, "--out", out]),
        (
            "attributes",
            vec![
                "attributes",
                "--gt",
                gt,
                "--pred",
                pred,
                "--sidecar",
                sidecar.to_str().unwrap(),
                "--out",
                out,
            ],
        ),
        (
            "stats",
            vec![
                "stats",
                "--gt",
                gt,
                "--taxonomy",
                taxonomy.to_str().unwrap(),
                "--intensity",
                "--format",
                "svg",
                "--out",
                out,
            ],
        ),
        ("params", vec!["params", "--format", "csv", "--out", out]),
        ("gradcheck", vec!["gradcheck", "--out", out]),
        (
            "sample-subset",
            vec![
                "sample-subset",
                "--gt",
                train_gt,
                "--split",
                "train",
                "--fraction",
                "0.5",
                "--seed",
                "9",
                "--out",
                out,
            ],
        ),
    ];

    let mut verified = 0usize;
    for (name, args) in &commands {
        // Same inputs, same out dir: first run, snapshot, re-run under a
        // different thread cap, snapshot again.
        run(args, "1");
        let first = snapshot(out_dir.path());
        run(args, "4");
        let second = snapshot(out_dir.path());
        assert_eq!(
            first.keys().collect::<Vec<_>>(),
            second.keys().collect::<Vec<_>>(),
            "{name}: artifact sets differ"
        );
        for (file, bytes) in &first {
            assert_eq!(
                bytes,
                second.get(file).unwrap(),
                "{name}: {file} differs between runs"
            );
        }
        verified += first.len();
    }

    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "criterion 10 (CLI byte-determinism): PASS in {elapsed:.2}s (budget 30s) — \
         {} commands, {verified} artifacts byte-identical across runs and thread caps",
        commands.len()
    );
    assert!(elapsed <= 30.0, "criterion 10 exceeded its budget: {elapsed:.2}s");
}
