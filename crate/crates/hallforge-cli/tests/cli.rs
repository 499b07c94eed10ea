//! End-to-end smoke tests for the `hallforge` binary.

use std::path::Path;
use std::process::{Command, Output};

fn hallforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hallforge"))
        .args(args)
        .env_remove("HALLFORGE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn classes_partition_the_whole_space() {
    let out = hallforge(&["classes", "--quiver", "a2", "--q", "2", "--dim", "2,2"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(
        text.contains("total classes: 3, total points: 16, group order: 36"),
        "unexpected output:\n{text}"
    );
}

#[test]
fn module_prints_the_ladder_table_and_json() {
    let out = hallforge(&[
        "module", "--quiver", "a1", "--q", "2", "--omega", "1", "--depth", "2",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let json_line = text.lines().last().expect("nonempty output");
    let doc: serde_json::Value = serde_json::from_str(json_line).expect("trailing json");
    let dims: Vec<u64> = doc["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["dim"].as_u64().unwrap())
        .collect();
    assert_eq!(dims, vec![1, 1, 0]);
    assert_eq!(doc["total"], 2);
}

#[test]
fn verify_reports_are_deterministic_and_cache_sound() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let rpt1 = dir.path().join("r1.json");
    let rpt2 = dir.path().join("r2.json");
    let run = |rpt: &Path| {
        hallforge(&[
            "verify",
            "--quiver",
            "a1",
            "--q",
            "2",
            "--omega",
            "1",
            "--max-deg",
            "2",
            "--suite",
            "classes,hallnum,module",
            "--report",
            rpt.to_str().unwrap(),
            "--cache-dir",
            cache.to_str().unwrap(),
        ])
    };
    let cold = run(&rpt1);
    assert!(cold.status.success(), "{}", stdout_of(&cold));
    let warm = run(&rpt2);
    assert!(warm.status.success(), "{}", stdout_of(&warm));

    let mut a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&rpt1).unwrap()).unwrap();
    let mut b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&rpt2).unwrap()).unwrap();
    // The warm run rebuilt nothing.
    assert_eq!(b["cache"]["tables_built"], 0);
    assert!(b["cache"]["tables_from_disk"].as_u64().unwrap() > 0);
    // Every check passed, and each run reports the same checks.
    for doc in [&mut a, &mut b] {
        let obj = doc.as_object_mut().unwrap();
        obj.remove("wall_millis");
        obj.remove("cache");
        for c in obj["checks"].as_array_mut().unwrap() {
            assert_eq!(c["status"], "pass", "check failed: {c}");
            c.as_object_mut().unwrap().remove("millis");
        }
    }
    assert_eq!(a, b, "reports must agree once timing fields are stripped");
}

#[test]
fn configuration_errors_exit_with_code_two() {
    for args in [
        vec!["verify", "--quiver", "a1", "--q", "4"],
        vec!["verify", "--quiver", "a1", "--relation", "9"],
        vec!["verify", "--quiver", "a1", "--suite", "bogus"],
        vec!["verify", "--quiver", "nosuch"],
        vec!["verify", "--quiver", "a2", "--omega", "1"],
        vec!["classes", "--quiver", "a2", "--q", "2", "--dim", "1"],
        vec!["module", "--quiver", "missing-file.json"],
        vec!["cache", "inspect"],
    ] {
        let out = hallforge(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {args:?} gave {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn quiver_files_load_and_relation_selection_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("line3.json");
    std::fs::write(
        &path,
        r#"{"vertices": ["1", "2"], "arrows": [[0, 1]]}"#,
    )
    .unwrap();
    let out = hallforge(&[
        "verify",
        "--quiver",
        path.to_str().unwrap(),
        "--q",
        "2",
        "--omega",
        "1,0",
        "--max-deg",
        "1",
        "--relation",
        "1,2",
        "--suite",
        "relations",
    ]);
    assert!(
        out.status.success(),
        "{}{}",
        stdout_of(&out),
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout_of(&out);
    assert!(text.contains("relations/relation-1"));
    assert!(text.contains("relations/relation-2"));
    assert!(!text.contains("relation-3"));
}

#[test]
fn cache_inspect_and_gc_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let seed = hallforge(&[
        "classes",
        "--quiver",
        "a1",
        "--q",
        "2",
        "--dim",
        "2",
        "--cache-dir",
        cache.to_str().unwrap(),
    ]);
    assert!(seed.status.success());
    let out = hallforge(&["cache", "inspect", "--dir", cache.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("status=Verified"));
    let out = hallforge(&["cache", "gc", "--dir", cache.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("removed 0"));
}
