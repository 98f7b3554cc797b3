//! Verdicts and suite reports.

use std::fmt;

use serde::Serialize;

use crate::linalg::{Ambient, VecEquality};
use crate::series::{Var, Window};

/// Outcome of checking one identity over every basis tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    /// Equal on full support with no clipping anywhere.
    ExactPass,
    /// Equal on every coefficient inside the window.
    WindowPass,
    Fail { witness: String },
    NoKFound { witness: String, kmax: u32 },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::ExactPass | Verdict::WindowPass)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ExactPass => f.write_str("ExactPass"),
            Verdict::WindowPass => f.write_str("WindowPass"),
            Verdict::Fail { witness } => write!(f, "Fail [{witness}]"),
            Verdict::NoKFound { witness, kmax } => write!(f, "NoKFound [{witness}, kmax={kmax}]"),
        }
    }
}

/// A minimal `k` found for one basis tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KWitness {
    pub tuple: String,
    pub k: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityResult {
    pub identity: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<KWitness>,
}

impl IdentityResult {
    pub fn max_k(&self) -> Option<u32> {
        self.witnesses.iter().map(|w| w.k).max()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub window: String,
    pub results: Vec<IdentityResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(suite: &str, window: &str) -> Self {
        CheckReport { suite: suite.into(), window: window.into(), results: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, r: IdentityResult) {
        self.results.push(r);
    }

    pub fn note<S: Into<String>>(&mut self, s: S) {
        self.notes.push(s.into());
    }

    /// Appends another report's results, prefixing identity names with its suite.
    pub fn absorb(&mut self, other: CheckReport) {
        for mut r in other.results {
            r.identity = format!("{}: {}", other.suite, r.identity);
            self.results.push(r);
        }
        self.notes.extend(other.notes);
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.verdict.is_pass())
    }

    pub fn exact(&self) -> bool {
        self.results.iter().all(|r| r.verdict == Verdict::ExactPass)
    }

    pub fn get(&self, identity: &str) -> Option<&IdentityResult> {
        self.results.iter().find(|r| r.identity == identity)
    }

    pub fn verdict(&self, identity: &str) -> Option<&Verdict> {
        self.get(identity).map(|r| &r.verdict)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityResult> {
        self.results.iter().filter(|r| !r.verdict.is_pass())
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("suite {} (window {})\n", self.suite, self.window);
        for r in &self.results {
            s.push_str(&format!("  {:<48} {}", r.identity, r.verdict));
            if let Some(k) = r.max_k() {
                s.push_str(&format!("  max k = {k}"));
            }
            s.push('\n');
        }
        for n in &self.notes {
            s.push_str(&format!("  note: {n}\n"));
        }
        s
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

/// Truncation window and `k` bound used by the checkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub lo: i32,
    pub hi: i32,
    pub kmax: u32,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { lo: -8, hi: 8, kmax: 10 }
    }
}

impl CheckConfig {
    pub fn new(lo: i32, hi: i32, kmax: u32) -> Self {
        assert!(lo <= hi, "window lower bound exceeds upper bound");
        CheckConfig { lo, hi, kmax }
    }

    /// The declared comparison window in `nvars` variables.
    pub fn window(&self, nvars: usize) -> Window {
        Window::uniform(nvars, self.lo, self.hi)
    }

    pub fn margin(&self) -> i32 {
        self.kmax as i32 + 2
    }

    /// Computation ambient: the declared window widened by the margin.
    pub fn ambient(&self, vars: &[Var]) -> Ambient {
        Ambient::new(vars, self.window(vars.len()).widen(self.margin()))
    }

    pub fn map_window(&self) -> (i32, i32) {
        (self.lo - self.margin(), self.hi + self.margin())
    }

    pub fn label(&self) -> String {
        format!("{}..{}", self.lo, self.hi)
    }
}

/// Accumulates per-tuple comparisons into one verdict.
#[derive(Debug)]
pub struct Tally {
    name: String,
    exact: bool,
    failure: Option<Verdict>,
    witnesses: Vec<KWitness>,
}

impl Tally {
    pub fn new(name: &str) -> Self {
        Tally { name: name.into(), exact: true, failure: None, witnesses: Vec::new() }
    }

    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    /// Records a comparison for the basis tuple described by `what`.
    pub fn record(&mut self, eq: &VecEquality, what: impl FnOnce() -> String) {
        match eq {
            VecEquality::ExactlyEqual => {}
            VecEquality::EqualUpToWindow => self.exact = false,
            VecEquality::Unequal { index, exponent } => {
                if self.failure.is_none() {
                    self.failure = Some(Verdict::Fail {
                        witness: format!("{}; differs at component {index:?}, exponent {exponent:?}", what()),
                    });
                }
            }
        }
    }

    pub fn inexact(&mut self) {
        self.exact = false;
    }

    pub fn fail(&mut self, witness: String) {
        if self.failure.is_none() {
            self.failure = Some(Verdict::Fail { witness });
        }
    }

    pub fn no_k(&mut self, witness: String, kmax: u32) {
        if self.failure.is_none() {
            self.failure = Some(Verdict::NoKFound { witness, kmax });
        }
    }

    pub fn witness(&mut self, tuple: String, k: u32) {
        self.witnesses.push(KWitness { tuple, k });
    }

    pub fn finish(self) -> IdentityResult {
        let verdict = match self.failure {
            Some(v) => v,
            None if self.exact => Verdict::ExactPass,
            None => Verdict::WindowPass,
        };
        IdentityResult { identity: self.name, verdict, witnesses: self.witnesses }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_downgrades_and_fails() {
        let mut t = Tally::new("id");
        t.record(&VecEquality::ExactlyEqual, || "a".into());
        assert_eq!(t.finish().verdict, Verdict::ExactPass);
        let mut t = Tally::new("id");
        t.record(&VecEquality::EqualUpToWindow, || "a".into());
        assert_eq!(t.finish().verdict, Verdict::WindowPass);
        let mut t = Tally::new("id");
        t.record(&VecEquality::Unequal { index: vec![0], exponent: vec![1] }, || "(a)".into());
        t.record(&VecEquality::Unequal { index: vec![1], exponent: vec![2] }, || "(b)".into());
        match t.finish().verdict {
            Verdict::Fail { witness } => assert!(witness.starts_with("(a)")),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn report_serializes() {
        let mut r = CheckReport::new("nva", "-8..8");
        let mut t = Tally::new("vacuum");
        t.witness("(1,1,1)".into(), 0);
        r.push(t.finish());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"kind\":\"ExactPass\""));
        assert!(r.passed() && r.exact());
    }
}
