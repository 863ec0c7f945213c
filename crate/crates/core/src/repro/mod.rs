//! End-to-end reproduction suite: every finite-dimensional statement is run
//! as a seeded, independently reported check over a fixed factor suite.

mod checks;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TripleError};
use crate::factors::{build_factor, FactorSpec};
use crate::report::{Report, Status};
use crate::triple::{LinearMap, TripleSystem};

pub use checks::{repro_example_counterexample, repro_hilbert_lemmas, repro_theorem_surrogate};

/// The standard suite, compiled in so every build runs the same checks.
pub const STANDARD_SUITE: &str = include_str!("../../suite.json");

/// Statement anchors. Every statement id is `anchor/subcase`.
pub const ANCHORS: &[&str] = &[
    "jb-triple-axioms",
    "cartan-factor-constructors",
    "peirce-structure",
    "inner-derivations",
    "symmetrized-product",
    "tripotent-identities",
    "rank-one-local-witness",
    "hilbert-lemmas",
    "counterexample",
    "complex-linearity",
    "rank-gt-one-flows",
    "ideal-invariance",
    "direct-sum-theorem",
    "two-local-lift",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub algebraic: f64,
    pub peirce: f64,
    pub local: f64,
    pub flow: f64,
    pub cube_root: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub factors: Vec<FactorSpec>,
    pub hilbert_dims: Vec<usize>,
    pub complex_factors: Vec<FactorSpec>,
    pub rank_one_factors: Vec<FactorSpec>,
    pub direct_sums: Vec<Vec<FactorSpec>>,
    pub tolerances: Tolerances,
    pub local_samples: usize,
    pub maps_per_factor: usize,
    pub flow_maps: usize,
    pub flow_times: Vec<f64>,
    pub cube_root_samples: usize,
}

impl SuiteConfig {
    pub fn standard() -> Self {
        serde_json::from_str(STANDARD_SUITE).expect("bundled suite.json is valid")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReproOptions {
    /// Run statements concurrently.
    pub parallel: bool,
    /// Corrupt one tensor entry of the first suite factor.
    pub fault: bool,
    /// Keep wall-clock times in the report (breaks byte-identical output).
    pub timings: bool,
}

/// Aggregated outcome of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub status: Status,
    pub passed: usize,
    pub failed: usize,
    pub advisory: usize,
    pub factors: Vec<String>,
    pub uncovered_anchors: Vec<String>,
    pub runtime_ms: u64,
    pub statements: Vec<Report>,
}

impl SuiteReport {
    /// True iff every non-advisory statement passed.
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The map `T(λ₁, λ₂) = (Re λ₂, −Re λ₁)` on `ℂ²`, in the realified
/// coordinates `(Re λ₁, Im λ₁, Re λ₂, Im λ₂)`.
pub fn example_map() -> LinearMap {
    LinearMap::new(
        4,
        vec![
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0,
        ],
    )
    .expect("finite entries")
}

/// `ℂ²` as complex column vectors, where `2{λ,μ,ν} = ⟨λ|μ⟩ν + ⟨ν|μ⟩λ`.
pub fn example_system() -> TripleSystem {
    build_factor(FactorSpec::IC { m: 2, n: 1 }).expect("valid spec")
}

pub(crate) struct Context<'a> {
    pub config: &'a SuiteConfig,
    pub fault: bool,
}

impl Context<'_> {
    /// Builds a suite factor, corrupted when fault injection targets it.
    pub fn factor(&self, spec: FactorSpec) -> Result<TripleSystem> {
        let s = build_factor(spec)?;
        if self.fault && self.config.factors.first() == Some(&spec) {
            return Ok(s.perturbed(0, 0, 0, 0, 0.1));
        }
        Ok(s)
    }
}

type Check = Box<dyn Fn(&Context<'_>, u64) -> Result<Report> + Send + Sync>;

pub(crate) struct Statement {
    pub id: String,
    pub run: Check,
}

impl Statement {
    pub fn new(
        id: impl Into<String>,
        run: impl Fn(&Context<'_>, u64) -> Result<Report> + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            run: Box::new(run),
        }
    }
}

fn run_statement(ctx: &Context<'_>, st: &Statement, seed: u64, timings: bool) -> Report {
    let start = Instant::now();
    let mut report = match (st.run)(ctx, seed) {
        Ok(r) => r,
        Err(e) => {
            let mut r = Report::new(st.id.clone());
            r.fail(format!("error: {e}"));
            r.residual("error", f64::INFINITY);
            r
        }
    };
    report.statement_id = st.id.clone();
    report.seed = Some(seed);
    report.runtime_ms = if timings {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    report
}

/// Runs all statements over the suite. Statement `i` uses seed `seed ^ i`
/// in both sequential and parallel mode, so the two produce the same report.
pub fn repro_all(seed: u64, config: &SuiteConfig, options: ReproOptions) -> Result<SuiteReport> {
    if config.factors.is_empty() {
        return Err(TripleError::EmptySpec);
    }
    let start = Instant::now();
    let ctx = Context {
        config,
        fault: options.fault,
    };
    let statements = checks::statements(config);
    let reports: Vec<Report> = if options.parallel {
        statements
            .par_iter()
            .enumerate()
            .map(|(i, st)| run_statement(&ctx, st, seed ^ i as u64, options.timings))
            .collect()
    } else {
        statements
            .iter()
            .enumerate()
            .map(|(i, st)| run_statement(&ctx, st, seed ^ i as u64, options.timings))
            .collect()
    };
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    let (passed, failed, advisory) = (count(Status::Pass), count(Status::Fail), count(Status::Advisory));
    let uncovered_anchors = ANCHORS
        .iter()
        .filter(|a| {
            !reports
                .iter()
                .any(|r| r.statement_id.split('/').next() == Some(**a))
        })
        .map(|a| a.to_string())
        .collect();
    Ok(SuiteReport {
        seed,
        status: if failed == 0 { Status::Pass } else { Status::Fail },
        passed,
        failed,
        advisory,
        factors: config.factors.iter().map(ToString::to_string).collect(),
        uncovered_anchors,
        runtime_ms: if options.timings {
            start.elapsed().as_millis() as u64
        } else {
            0
        },
        statements: reports,
    })
}

fn fmt_value(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e6 {
        format!("{v}")
    } else {
        format!("{v:.3e}")
    }
}

/// Markdown summary: one table row per statement.
pub fn render_markdown(report: &SuiteReport) -> String {
    let mut out = String::new();
    out.push_str("# Reproduction report\n\n");
    out.push_str(&format!(
        "- seed: `{:#x}`\n- status: **{}**\n- statements: {} passed, {} failed, {} advisory\n- factors: {}\n",
        report.seed,
        match report.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Advisory => "advisory",
        },
        report.passed,
        report.failed,
        report.advisory,
        report.factors.join(", ")
    ));
    if report.uncovered_anchors.is_empty() {
        out.push_str("- every anchor has at least one statement\n");
    } else {
        out.push_str(&format!(
            "- anchors without statements: {}\n",
            report.uncovered_anchors.join(", ")
        ));
    }
    out.push_str("\n| statement | status | residuals |\n|---|---|---|\n");
    for r in &report.statements {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "**FAIL**",
            Status::Advisory => "advisory",
        };
        let residuals: Vec<String> = r
            .residuals
            .iter()
            .map(|(k, v)| format!("{k} = {}", fmt_value(*v)))
            .collect();
        out.push_str(&format!(
            "| `{}` | {} | {} |\n",
            r.statement_id,
            status,
            residuals.join("<br>")
        ));
    }
    let notes: Vec<&Report> = report.statements.iter().filter(|r| !r.notes.is_empty()).collect();
    if !notes.is_empty() {
        out.push_str("\n## Notes\n\n");
        for r in notes {
            for n in &r.notes {
                out.push_str(&format!("- `{}`: {}\n", r.statement_id, n));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_suite_parses() {
        let c = SuiteConfig::standard();
        assert_eq!(c.factors.len(), 9);
        assert_eq!(c.tolerances.algebraic, 1e-10);
        assert_eq!(c.local_samples, 256);
    }

    #[test]
    fn statement_ids_use_known_anchors() {
        let c = SuiteConfig::standard();
        for st in checks::statements(&c) {
            let anchor = st.id.split('/').next().unwrap();
            assert!(ANCHORS.contains(&anchor), "{}", st.id);
        }
    }

    #[test]
    fn example_map_values() {
        let t = example_map();
        assert_eq!(t.apply(&[1.0, 0.0, 0.0, 0.0]), vec![0.0, 0.0, -1.0, 0.0]);
        assert_eq!(t.apply(&[0.0, 1.0, 0.0, 0.0]), vec![0.0; 4]);
    }

    #[test]
    fn empty_suite_is_rejected() {
        let mut c = SuiteConfig::standard();
        c.factors.clear();
        assert!(matches!(
            repro_all(1, &c, ReproOptions::default()),
            Err(TripleError::EmptySpec)
        ));
    }
}
