//! Check outcomes: the typed verdicts every experiment reduces to.
//!
//! A check never fabricates a value: if any underlying pairing failed to
//! converge within its budget, the verdict is `Indeterminate`, not a guess
//! dressed up as `Pass`/`Fail`.  Aggregation over a run follows the same
//! asymmetry — any `Fail` dominates, otherwise any `Indeterminate`, and only
//! an all-green list is `Pass` — and maps onto the process exit codes
//! `0`, `1`, `3` (`2` is reserved for usage/configuration errors).

use std::fmt;

/// Verdict of a single check or of a whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Some ingredient did not converge within its budget; no claim is made.
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Indeterminate => "INDETERMINATE",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One labelled row of named numeric columns inside a check.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailRow {
    pub label: String,
    pub values: Vec<(&'static str, f64)>,
}

impl DetailRow {
    pub fn new(label: impl Into<String>, values: Vec<(&'static str, f64)>) -> Self {
        DetailRow { label: label.into(), values }
    }
}

/// Result of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub verdict: Verdict,
    /// Worst residual observed across the rows (absolute, as defined by the check).
    pub residual: f64,
    /// Tolerance the residual was compared against.
    pub tolerance: f64,
    /// FNV-1a digest of the canonicalized inputs, for reproducibility audits.
    pub inputs_digest: String,
    pub details: Vec<DetailRow>,
}

impl CheckOutcome {
    /// Standard construction: converged results are judged by
    /// `residual <= tolerance`; non-converged ingredients force
    /// `Indeterminate` no matter how small the residual looks.
    pub fn from_residual(
        name: impl Into<String>,
        residual: f64,
        tolerance: f64,
        all_converged: bool,
        inputs_digest: String,
        details: Vec<DetailRow>,
    ) -> Self {
        let verdict = if !all_converged {
            Verdict::Indeterminate
        } else if residual.is_finite() && residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        CheckOutcome { name: name.into(), verdict, residual, tolerance, inputs_digest, details }
    }
}

/// Fold a list of verdicts into the run verdict.
pub fn aggregate_verdict(outcomes: &[CheckOutcome]) -> Verdict {
    let mut saw_indeterminate = false;
    for o in outcomes {
        match o.verdict {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Indeterminate => saw_indeterminate = true,
            Verdict::Pass => {}
        }
    }
    if saw_indeterminate {
        Verdict::Indeterminate
    } else {
        Verdict::Pass
    }
}

/// Process exit code for a run verdict.
pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Indeterminate => 3,
    }
}

/// 64-bit FNV-1a over a canonical input string, as lowercase hex.
pub fn fnv1a_hex(canonical: &str) -> String {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for b in canonical.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(PRIME);
    }
    format!("{h:016x}")
}
