//! Instance files and result documents.
//!
//! An instance file starts with a header line `n t` (Subset Sum) or `n`
//! (Partition), followed by `n` positive integers separated by whitespace.
//! Lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub items: Vec<u64>,
    /// `None` for Partition files.
    pub target: Option<u64>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| anyhow!("empty instance file"))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        let num = |tok: &str, line: usize| -> Result<u64> {
            tok.parse::<u64>().map_err(|_| anyhow!("line {line}: {tok:?} is not a 64-bit unsigned integer"))
        };
        let (n, target) = match head.as_slice() {
            [n] => (num(n, hline)?, None),
            [n, t] => (num(n, hline)?, Some(num(t, hline)?)),
            _ => bail!("line {hline}: header must be \"n t\" or \"n\""),
        };
        let mut items = Vec::with_capacity(n.min(1 << 20) as usize);
        for (line, l) in lines {
            for tok in l.split_whitespace() {
                let x = num(tok, line)?;
                if x == 0 {
                    bail!("line {line}: items must be positive");
                }
                if items.len() as u64 == n {
                    bail!("line {line}: more than the {n} items announced in the header");
                }
                items.push(x);
            }
        }
        if items.len() as u64 != n {
            bail!("header announces {n} items but the file has {}", items.len());
        }
        items.iter().try_fold(0u64, |acc, &x| acc.checked_add(x)).ok_or_else(|| anyhow!("item sum overflows 64 bits"))?;
        Ok(InstanceFile { items, target })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_text(&self) -> String {
        let mut out = match self.target {
            Some(t) => format!("{} {t}\n", self.items.len()),
            None => format!("{}\n", self.items.len()),
        };
        for chunk in self.items.chunks(16) {
            let line: Vec<String> = chunk.iter().map(u64::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemMode {
    SubsetSum,
    Partition,
}

impl ProblemMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemMode::SubsetSum => "subset-sum",
            ProblemMode::Partition => "partition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub mode: ProblemMode,
    pub n: usize,
    pub t: u64,
    pub epsilon: String,
    pub seed: u64,
    pub value_only: bool,
    pub value: u64,
    pub witness: Vec<usize>,
    pub delta_cert: u64,
    pub opt_upper: u64,
    pub guarantee_lower: u64,
    pub guarantee_upper: u64,
    pub certified: bool,
    pub wall_ms: f64,
    pub levels: u64,
    pub dense_fired: bool,
    pub sumset_calls: u64,
    pub windows: usize,
    pub escalations: u32,
    pub inv_eps_internal: u64,
}

impl ResultDocument {
    /// One `key=value` per line.
    pub fn to_text(&self) -> String {
        let witness: Vec<String> = self.witness.iter().map(usize::to_string).collect();
        let mut s = String::new();
        let _ = writeln!(s, "mode={}", self.mode.as_str());
        let _ = writeln!(s, "n={}", self.n);
        let _ = writeln!(s, "t={}", self.t);
        let _ = writeln!(s, "epsilon={}", self.epsilon);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "value_only={}", self.value_only);
        let _ = writeln!(s, "value={}", self.value);
        let _ = writeln!(s, "witness={}", witness.join(" "));
        let _ = writeln!(s, "delta_cert={}", self.delta_cert);
        let _ = writeln!(s, "opt_upper={}", self.opt_upper);
        let _ = writeln!(s, "guarantee_lower={}", self.guarantee_lower);
        let _ = writeln!(s, "guarantee_upper={}", self.guarantee_upper);
        let _ = writeln!(s, "certified={}", self.certified);
        let _ = writeln!(s, "wall_ms={:.3}", self.wall_ms);
        let _ = writeln!(s, "levels={}", self.levels);
        let _ = writeln!(s, "dense_fired={}", self.dense_fired);
        let _ = writeln!(s, "sumset_calls={}", self.sumset_calls);
        let _ = writeln!(s, "windows={}", self.windows);
        let _ = writeln!(s, "escalations={}", self.escalations);
        let _ = writeln!(s, "inv_eps_internal={}", self.inv_eps_internal);
        s
    }

    /// Reads either the text form or JSON.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text).context("parsing JSON result");
        }
        let mut map = serde_json::Map::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key=value", i + 1))?;
            let value = match k {
                "mode" | "epsilon" => serde_json::Value::String(v.to_string()),
                "witness" => {
                    let idx: Result<Vec<serde_json::Value>> = v
                        .split_whitespace()
                        .map(|s| s.parse::<u64>().map(Into::into).map_err(|_| anyhow!("line {}: bad index {s:?}", i + 1)))
                        .collect();
                    serde_json::Value::Array(idx?)
                }
                _ => serde_json::from_str(v).map_err(|_| anyhow!("line {}: bad value for {k}", i + 1))?,
            };
            map.insert(k.to_string(), value);
        }
        serde_json::from_value(serde_json::Value::Object(map)).context("incomplete result document")
    }
}
