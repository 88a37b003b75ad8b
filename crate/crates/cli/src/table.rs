//! CSV tables with `# key=value` config preambles.

use std::fmt::Display;

/// Round to 12 significant digits, printed without trailing zeros.
pub fn fmt12(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let r: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        return "0".into();
    }
    let mag = r.abs().log10();
    if (-5.0..15.0).contains(&mag) {
        r.to_string()
    } else {
        format!("{r:e}")
    }
}

pub struct Csv {
    preamble: Vec<String>,
    header: String,
    rows: Vec<String>,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        Self { preamble: Vec::new(), header: columns.join(","), rows: Vec::new() }
    }

    pub fn config(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.preamble.push(format!("# {key}={value}"));
        self
    }

    pub fn row(&mut self, cells: &[String]) {
        self.rows.push(cells.join(","));
    }

    pub fn finish(self) -> String {
        let mut s = String::new();
        for line in self.preamble.iter().chain([&self.header]).chain(&self.rows) {
            s.push_str(line);
            s.push('\n');
        }
        s
    }
}
