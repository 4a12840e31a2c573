#![allow(dead_code)]

use serde_json::Value;
use std::process::Command;

pub const BB84: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/examples/bb84.qmc.json");
pub const LOOP: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/examples/loop.qmc.json");

pub fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub struct Run {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

pub fn qmc_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qmc"));
    cmd.args(args).env_remove("QMC_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("qmc runs");
    Run {
        status: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn qmc(args: &[&str]) -> Run {
    qmc_env(args, &[])
}

/// A report matrix as `(re, im)` rows.
pub fn matrix(v: &Value) -> Vec<Vec<(f64, f64)>> {
    let part = |key: &str| -> Vec<Vec<f64>> { serde_json::from_value(v[key].clone()).unwrap() };
    let (re, im) = (part("re"), part("im"));
    re.iter()
        .zip(&im)
        .map(|(r, i)| r.iter().copied().zip(i.iter().copied()).collect())
        .collect()
}

pub fn matrix_distance(v: &Value, expected: &[&[f64]]) -> f64 {
    let m = matrix(v);
    assert_eq!(m.len(), expected.len());
    let mut worst = 0.0f64;
    for (row, exp) in m.iter().zip(expected) {
        assert_eq!(row.len(), exp.len());
        for (&(re, im), &e) in row.iter().zip(*exp) {
            worst = worst.max((re - e).hypot(im));
        }
    }
    worst
}
