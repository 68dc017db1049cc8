#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use tempfile::TempDir;

pub const BERNOULLI: &str = r#"{"basis":[{"symbol":"one","approx":"1"}],
"atoms":[{"coords":["0"],"prob":"1/2"},{"coords":["1"],"prob":"1/2"}]}"#;

/// p = (1/2, 1/4, 1/4) on the affinely independent points 0, 1, pi.
pub const TRINOMIAL: &str = r#"{"basis":[{"symbol":"one","approx":"1"},{"symbol":"pi","approx":"3.141592653589793"}],
"atoms":[{"coords":["0","0"],"prob":"1/2"},{"coords":["1","0"],"prob":"1/4"},{"coords":["0","1"],"prob":"1/4"}]}"#;

pub const UNIFORM_0_1_PI: &str = r#"{"basis":[{"symbol":"one","approx":"1"},{"symbol":"pi","approx":"3.141592653589793"}],
"atoms":[{"coords":["0","0"],"prob":"1/3"},{"coords":["1","0"],"prob":"1/3"},{"coords":["0","1"],"prob":"1/3"}]}"#;

pub const SHIFTED: &str = r#"{"basis":[{"symbol":"r1","approx":"0.7071"},{"symbol":"r2","approx":"1.3"},{"symbol":"e","approx":"0.01"}],
"atoms":[{"coords":["1","0","1"],"prob":"1/4"},{"coords":["2","0","1"],"prob":"1/4"},
{"coords":["0","1","1"],"prob":"1/4"},{"coords":["0","2","1"],"prob":"1/4"}]}"#;

pub const UNSHIFTED: &str = r#"{"basis":[{"symbol":"r1","approx":"0.7071"},{"symbol":"r2","approx":"1.3"}],
"atoms":[{"coords":["1","0"],"prob":"1/4"},{"coords":["2","0"],"prob":"1/4"},
{"coords":["0","1"],"prob":"1/4"},{"coords":["0","2"],"prob":"1/4"}]}"#;

/// Uniform on {1, 2, pi, 1+pi, sqrt2, 2 sqrt2}.
pub const A2_SET: &str = r#"{"basis":[{"symbol":"one","approx":"1"},{"symbol":"pi","approx":"3.141592653589793"},{"symbol":"s2","approx":"1.4142135623730951"}],
"atoms":[{"coords":["1","0","0"],"prob":"1/6"},{"coords":["2","0","0"],"prob":"1/6"},
{"coords":["0","1","0"],"prob":"1/6"},{"coords":["1","1","0"],"prob":"1/6"},
{"coords":["0","0","1"],"prob":"1/6"},{"coords":["0","0","2"],"prob":"1/6"}]}"#;

/// {r, 2r} together with r1, r2 and r1+r2.
pub const FAMILY_D1: &str = r#"{"basis":[{"symbol":"r","approx":"1"},{"symbol":"r1","approx":"1.4142135623730951"},{"symbol":"r2","approx":"1.7320508075688772"}],
"atoms":[{"coords":["1","0","0"],"prob":"1/5"},{"coords":["2","0","0"],"prob":"1/5"},
{"coords":["0","1","0"],"prob":"1/5"},{"coords":["0","0","1"],"prob":"1/5"},{"coords":["0","1","1"],"prob":"1/5"}]}"#;

pub const POINT: &str = r#"{"basis":[{"symbol":"one","approx":"1"}],"atoms":[{"coords":["5"],"prob":"1"}]}"#;

pub struct Fixtures {
    dir: TempDir,
}

impl Fixtures {
    pub fn new() -> Self {
        Fixtures {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    pub fn write(&self, name: &str, text: &str) -> String {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.display().to_string()
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

pub struct Run {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sumentropy").chain(args.iter().copied());
    let code = sumentropy::cli::run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// A CSV table plus its `# key: value` trailer.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub trailer: BTreeMap<String, String>,
}

impl Table {
    pub fn parse(text: &str) -> Self {
        let mut lines = text.lines();
        let header = lines.next().unwrap().split(',').map(String::from).collect();
        let mut rows = Vec::new();
        let mut trailer = BTreeMap::new();
        for line in lines {
            if let Some(rest) = line.strip_prefix("# ") {
                if let Some((k, v)) = rest.split_once(": ") {
                    trailer.insert(k.to_string(), v.to_string());
                }
            } else {
                rows.push(line.split(',').map(String::from).collect());
            }
        }
        Table { header, rows, trailer }
    }

    pub fn column(&self, name: &str) -> Vec<Option<f64>> {
        let j = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[j].parse().ok()).collect()
    }

    pub fn ns(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r[0].parse().unwrap()).collect()
    }

    pub fn value(&self, key: &str) -> f64 {
        self.trailer[key].split_whitespace().next().unwrap().parse().unwrap()
    }
}
