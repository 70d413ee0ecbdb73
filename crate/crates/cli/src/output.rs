use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_HYPOTHESIS: u8 = 2;
pub const EXIT_NOT_FOUND: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

/// A command outcome other than success.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<nodalshoot::Error> for Failure {
    fn from(e: nodalshoot::Error) -> Self {
        use nodalshoot::Error as E;
        let code = match e {
            E::W1Violation(_) | E::F2Violation(_) => EXIT_HYPOTHESIS,
            E::NotFound { .. } | E::Undecided { .. } => EXIT_NOT_FOUND,
            _ => EXIT_FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_FAILURE, e.to_string())
    }
}

pub type Outcome<T = ()> = std::result::Result<T, Failure>;

/// JSON text with object keys sorted and every number written as the shortest `f64` repr.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, &mut out);
    out
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let _ = write!(out, "{x:?}");
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&map[k], out);
            }
            out.push('}');
        }
    }
}

pub fn digest(v: &Value) -> String {
    hex::encode(Sha256::digest(canonical_json(v).as_bytes()))
}

#[derive(Debug, Serialize)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub r_max: f64,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub arguments: Value,
    pub config_digest: String,
    pub version: &'static str,
    pub tolerances: Tolerances,
    /// `SOURCE_DATE_EPOCH` when set, else 0.
    pub timestamp: u64,
    pub outputs: Vec<String>,
}

pub fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

/// Output directory that remembers what was written into it.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Outcome<Self> {
        std::fs::create_dir_all(root).map_err(|e| {
            Failure::new(
                EXIT_FAILURE,
                format!("cannot create {}: {e}", root.display()),
            )
        })?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, text: &str) -> Outcome {
        let path = self.path(name);
        std::fs::write(&path, text)
            .map_err(|e| Failure::new(EXIT_FAILURE, format!("{}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Outcome {
        let text = serde_json::to_string_pretty(value)
            .map_err(|e| Failure::new(EXIT_FAILURE, e.to_string()))?;
        self.write(name, &(text + "\n"))
    }

    /// Writes `manifest.json` listing everything written so far.
    pub fn finish(mut self, mut manifest: Manifest) -> Outcome {
        manifest.outputs = std::mem::take(&mut self.written);
        self.write_json("manifest.json", &manifest)
    }
}

/// Gnuplot script drawing `v(r)` from `csv` with the nodes marked on the axis.
pub fn gnuplot_script(csv: &str, title: &str, nodes: &[f64]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set title '{}'", title.replace('\'', ""));
    let _ = writeln!(s, "set xlabel 'r'");
    let _ = writeln!(s, "set ylabel 'v'");
    let _ = writeln!(s, "set xzeroaxis");
    let _ = writeln!(
        s,
        "plot '{csv}' using 1:2 every ::1 with lines title 'v(r)', \\"
    );
    let _ = writeln!(
        s,
        "     '-' using 1:2 with points pointtype 7 title 'nodes'"
    );
    for r in nodes {
        let _ = writeln!(s, "{r:.16e} 0");
    }
    let _ = writeln!(s, "e");
    s
}
