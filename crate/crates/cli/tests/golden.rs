//! Byte-for-byte comparison of the binary's output with checked-in files.
//! Set `UPDATE_GOLDEN=1` to rewrite them after an intended change.

mod common;

use common::{basel, fixture, golden_args, GOLDEN_CONFIG, GOLDEN_RUNS};

#[test]
fn outputs_match_golden_files() {
    let config = fixture(GOLDEN_CONFIG);
    let config = config.to_str().unwrap();
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, cmd) in GOLDEN_RUNS {
        let out = basel(&golden_args(cmd, config));
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let path = fixture(&format!("golden/expected/{name}"));
        if update {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let expected = std::fs::read(&path).unwrap();
        assert!(
            out.stdout == expected,
            "{name} differs from golden file\n--- got ---\n{}",
            String::from_utf8_lossy(&out.stdout)
        );
        let again = basel(&golden_args(cmd, config));
        assert_eq!(again.stdout, out.stdout, "{name} is not deterministic");
    }
}

#[test]
fn non_compliant_exits_1() {
    let config = fixture(GOLDEN_CONFIG);
    for cmd in ["compute", "compare", "disclose"] {
        let out = basel(&[
            cmd,
            "--config",
            config.to_str().unwrap(),
            "--own-funds",
            "1.00",
            "--tier1",
            "1.00",
            "--tier2",
            "0",
        ]);
        assert_eq!(out.status.code(), Some(1), "{cmd}");
    }
}

#[test]
fn input_errors_exit_2() {
    let config = fixture(GOLDEN_CONFIG);
    let config = config.to_str().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(
        &bad,
        "id,class,rating,nominal,position\nA,corporate,CCC,1,on_balance\n",
    )
    .unwrap();
    let bad = bad.to_str().unwrap();

    let cases: [&[&str]; 6] = [
        &["compute", "--config", config, "--portfolio", bad],
        &["compute", "--config", "/nonexistent/config.toml"],
        &["compute", "--config", config, "--regime", "basel3"],
        &["compute", "--config", config, "--regime", "basel1"],
        &["disclose", "--config", config, "--period", "2006-Q3"],
        &["validate", "--config", config, "--portfolio", bad],
    ];
    for args in cases {
        let out = basel(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = basel(&["compute", "--config", config, "--portfolio", bad]);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains(":2: rating:"), "{msg}");
}

#[test]
fn validate_accepts_golden_inputs() {
    let config = fixture(GOLDEN_CONFIG);
    let out = basel(&["validate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok: 10 exposure(s)"));
}

#[test]
fn config_path_from_environment() {
    let config = fixture(GOLDEN_CONFIG);
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_basel"))
        .arg("compute")
        .env("BASEL_CONFIG", &config)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let expected = std::fs::read(fixture("golden/expected/compute.txt")).unwrap();
    assert_eq!(out.stdout, expected);
}
