//! Key-value certificate reports.

use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// A list of named checks plus free-form metadata, rendered as `key = value` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Certificate {
    pub title: String,
    pub meta: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn new(title: impl Into<String>) -> Self {
        Certificate { title: title.into(), ..Default::default() }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    /// Records `residual ≤ tol`. NaN residuals fail.
    pub fn check(&mut self, name: impl Into<String>, residual: f64, tol: f64) -> bool {
        let pass = residual <= tol;
        self.checks.push(Check { name: name.into(), residual, tol, pass });
        pass
    }

    /// Records a boolean condition.
    pub fn assert(&mut self, name: impl Into<String>, ok: bool) -> bool {
        self.checks.push(Check {
            name: name.into(),
            residual: if ok { 0.0 } else { 1.0 },
            tol: 0.0,
            pass: ok,
        });
        ok
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn merge(&mut self, prefix: &str, other: Certificate) {
        for (k, v) in other.meta {
            self.meta.push((format!("{prefix}.{k}"), v));
        }
        for mut c in other.checks {
            c.name = format!("{prefix}.{}", c.name);
            self.checks.push(c);
        }
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.title);
        for (k, v) in &self.meta {
            let _ = writeln!(s, "{k} = {v}");
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "check.{} = {} residual={:.3e} tol={:.3e}",
                c.name,
                if c.pass { "pass" } else { "FAIL" },
                c.residual,
                c.tol
            );
        }
        let _ = writeln!(s, "overall = {}", if self.passed() { "pass" } else { "FAIL" });
        s
    }
}

/// CSV text: a `# config_hash = …` line, a header row, then rows with 17
/// significant digits.
pub fn csv_table(hash: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = format!("# config_hash = {hash}\n{}\n", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}
