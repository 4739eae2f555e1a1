#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use basel_cli::{EngineConfig, Overrides};

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

pub fn config(rel: &str, overrides: Overrides) -> EngineConfig {
    EngineConfig::load(&Overrides {
        config: Some(fixture(rel)),
        ..overrides
    })
    .unwrap()
}

/// Runs the `basel` binary with `BASEL_CONFIG` cleared.
pub fn basel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_basel"))
        .args(args)
        .env_remove("BASEL_CONFIG")
        .output()
        .expect("basel binary runs")
}

pub const GOLDEN_CONFIG: &str = "golden/config.toml";

/// (golden file, subcommand arguments) for every checked-in expected output.
pub const GOLDEN_RUNS: [(&str, &[&str]); 5] = [
    ("compute.txt", &["compute"]),
    ("compute.kv", &["compute", "--format", "kv"]),
    ("compare.txt", &["compare"]),
    ("compare.kv", &["compare", "--format", "kv"]),
    ("disclose.txt", &["disclose"]),
];

pub fn golden_args<'a>(cmd: &[&'a str], config: &'a str) -> Vec<&'a str> {
    let mut args = cmd.to_vec();
    args.extend(["--config", config]);
    args
}
