//! Verification from JSON witnesses, seeded fuzz campaigns, equality-case
//! reproduction and the critical-value bounds report.
//!
//! Campaign trials are independent: each draws from its own generator seeded
//! by [`trial_seed`], so results do not depend on the number of workers.

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chebyshev::{cheb_coeffs, largest_zero, ChebDegree};
use crate::critical::{
    cor4_lower_bound, cor4_upper_bound, critical_profile, random_in_class, CoeffMode, CriticalError, SamplingConfig,
};
use crate::inequalities::{
    corollary1_check, corollary2_check, corollary2_threshold, corollary3_check, corollary3_threshold, corollary4_check,
    corollary4_upper_check, corollary5_check, eq8_check, hypothesis_failure, remark1_check, theorem1_check, within,
    CheckError, InequalityReport, Statement, Witnesses, DEFAULT_TOL,
};
use crate::moebius::{make_quad, CollinearQuad, ExtReal, ExtendedPoint};
use crate::poly::Polynomial;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "POLYDISTORT_WORKERS";

/// Equality families must reproduce to this relative slack.
pub const EQUALITY_TOL: f64 = 1e-8;

/// Violating trials kept in a summary.
const MAX_VIOLATIONS_KEPT: usize = 20;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn finite_points(w: &Witnesses, count: usize) -> Result<Vec<Complex64>, HarnessError> {
    if w.points.len() != count {
        return Err(HarnessError::Malformed(format!(
            "expected {count} points, got {}",
            w.points.len()
        )));
    }
    w.points
        .iter()
        .map(|p| {
            p.finite()
                .ok_or_else(|| HarnessError::Malformed("point must be finite".into()))
        })
        .collect()
}

fn quad_of(w: &Witnesses) -> Result<Result<CollinearQuad, String>, HarnessError> {
    if let Some(spec) = &w.params.quad {
        return Ok(spec.to_quad().map_err(|e| e.to_string()));
    }
    let points: [ExtendedPoint; 4] = w
        .points
        .clone()
        .try_into()
        .map_err(|_| HarnessError::Malformed(format!("expected 4 points, got {}", w.points.len())))?;
    Ok(CollinearQuad::from_points(points).map_err(|e| e.to_string()))
}

/// Runs one checker on a witness.  `tol` overrides the tolerance recorded in
/// the witness, which defaults to [`DEFAULT_TOL`].
pub fn verify(statement: Statement, w: &Witnesses, tol: Option<f64>) -> Result<InequalityReport, HarnessError> {
    let tol = tol.or(w.params.tol).unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(HarnessError::Malformed(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let p = &w.poly;
    let report = match statement {
        Statement::Theorem1 | Statement::Remark1 => match quad_of(w)? {
            Ok(q) if statement == Statement::Theorem1 => theorem1_check(p, &q, tol)?,
            Ok(q) => remark1_check(p, &q, tol)?,
            Err(why) => {
                let mut w = w.clone();
                w.params.tol = Some(tol);
                return Ok(hypothesis_failure(statement, w, format!("invalid quad: {why}")));
            }
        },
        Statement::Corollary1 => {
            let z = finite_points(w, 3)?;
            corollary1_check(p, z[0], z[1], z[2], tol)?
        }
        Statement::Corollary2 => {
            let z = finite_points(w, 2)?;
            corollary2_check(p, z[0], z[1], tol)?
        }
        Statement::Corollary3 => {
            let z = finite_points(w, 1)?;
            corollary3_check(p, z[0], tol)?
        }
        Statement::Corollary4 => corollary4_check(p, tol)?,
        Statement::Corollary4Upper => corollary4_upper_check(p, tol)?,
        Statement::Corollary5 => corollary5_check(p, tol)?,
        Statement::Eq8 => {
            let x = w
                .params
                .x
                .ok_or_else(|| HarnessError::Malformed("eq8 needs params.x".into()))?;
            eq8_check(p, x, w.params.h, tol)?
        }
    };
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_trials() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub statements: Vec<Statement>,
    pub degrees: Vec<usize>,
    /// Trials per statement and degree.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Where to write every trial; the summary always goes to stdout.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl CampaignConfig {
    pub fn new(statements: Vec<Statement>, degrees: Vec<usize>, trials: usize, seed: u64) -> Self {
        CampaignConfig {
            statements,
            degrees,
            trials,
            seed,
            sampling: SamplingConfig::default(),
            tol: DEFAULT_TOL,
            output: None,
            format: OutputFormat::Json,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Malformed(m.to_string()));
        if self.statements.is_empty() {
            return bad("no statements");
        }
        if self.degrees.is_empty() || self.degrees.iter().any(|&n| n < 2) {
            return bad("degrees must be nonempty and all >= 2");
        }
        if self.trials < 1 {
            return bad("trials must be >= 1");
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad("tol must be positive");
        }
        if !(self.sampling.coeff_range > 0.0 && self.sampling.coeff_range.is_finite()) {
            return bad("sampling.coeff_range must be positive");
        }
        Ok(())
    }
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial, a hash of the campaign seed and the trial coordinates.
pub fn trial_seed(seed: u64, statement: Statement, n: usize, trial: usize) -> u64 {
    let index = Statement::ALL.iter().position(|&s| s == statement).expect("listed") as u64;
    [index, n as u64, trial as u64]
        .into_iter()
        .fold(splitmix(seed), |h, v| splitmix(h ^ v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Held,
    Violated,
    Degenerate,
    HypothesisFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub statement: Statement,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub outcome: Outcome,
    pub report: Option<InequalityReport>,
    /// Numerical failure that prevented a report.
    pub error: Option<String>,
}

pub fn classify(r: &InequalityReport) -> Outcome {
    if !r.hypothesis_ok {
        Outcome::HypothesisFailed
    } else if r.degenerate {
        Outcome::Degenerate
    } else if r.holds {
        Outcome::Held
    } else {
        Outcome::Violated
    }
}

fn roots_error(e: crate::poly::RootError) -> CheckError {
    CheckError::Critical(CriticalError::Roots(e))
}

fn unit_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..2.0 * PI))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// A random solution of `P(z) = w`.
fn preimage(p: &Polynomial, w: Complex64, rng: &mut ChaCha8Rng) -> Result<Complex64, CheckError> {
    let mut c = p.coeffs().to_vec();
    c[0] -= w;
    let q = Polynomial::new(c).map_err(|e| CheckError::Critical(e.into()))?;
    let roots = q.roots().map_err(roots_error)?.roots;
    Ok(roots[rng.random_range(0..roots.len())])
}

/// Four ascending parameters in `[-3, 3]` with gaps of at least 0.01, the
/// last one replaced by `+inf` a quarter of the time, on either the real axis
/// or a random line.
fn random_quad(rng: &mut ChaCha8Rng) -> CollinearQuad {
    loop {
        let mut t = [0.0f64; 4];
        t.iter_mut().for_each(|v| *v = rng.random_range(-3.0..3.0));
        t.sort_by(f64::total_cmp);
        if t.windows(2).any(|w| w[1] - w[0] < 0.01) {
            continue;
        }
        if rng.random_bool(0.25) {
            t[3] = f64::INFINITY;
        }
        let (base, dir) = if rng.random_bool(0.5) {
            (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
        } else {
            (
                Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
                Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)),
            )
        };
        if let Ok(q) = make_quad(base, dir, t) {
            return q;
        }
    }
}

fn class_member(n: usize, rng: &mut ChaCha8Rng, cfg: &SamplingConfig) -> Result<Polynomial, CheckError> {
    Ok(random_in_class(n, rng.next_u64(), cfg)?)
}

/// One fuzz trial.  Corollary 5 and the derivative ratio always sample real
/// coefficients, the statements with `P(0) = 0` force a zero constant term.
fn generate(statement: Statement, n: usize, seed: u64, cfg: &CampaignConfig) -> Result<InequalityReport, CheckError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = cfg.tol;
    let sampling = &cfg.sampling;
    let real = SamplingConfig {
        mode: CoeffMode::Real,
        ..sampling.clone()
    };
    let origin = sampling.clone().with_zero_constant();
    match statement {
        Statement::Theorem1 => {
            let p = class_member(n, &mut rng, sampling)?;
            theorem1_check(&p, &random_quad(&mut rng), tol)
        }
        Statement::Remark1 => {
            let p = class_member(n, &mut rng, sampling)?;
            remark1_check(&p, &random_quad(&mut rng), tol)
        }
        Statement::Corollary1 => {
            let p = class_member(n, &mut rng, sampling)?;
            let z1 = preimage(&p, unit_disk(&mut rng, 1.0 - 1e-6), &mut rng)?;
            let mut z2 = z1;
            while z2 == z1 {
                z2 = preimage(&p, unit_disk(&mut rng, 1.0 - 1e-6), &mut rng)?;
            }
            let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let t = side * rng.random_range(1.0..5.0);
            let z = 0.5 * ((z2 - z1) * t + z1 + z2);
            corollary1_check(&p, z1, z2, z, tol)
        }
        Statement::Corollary2 => {
            let lambda = rng.random_range(0.25..1.0 - 1e-6);
            let p = class_member(n, &mut rng, sampling)?
                .scale(Complex64::new(lambda, 0.0))
                .map_err(|e| CheckError::Critical(e.into()))?;
            let z1 = preimage(&p, unit_disk(&mut rng, 1.0), &mut rng)?;
            let sep = corollary2_threshold(&p) * (1.0 + log_uniform(&mut rng, 1e-4, 1.0));
            let z2 = z1 + Complex64::from_polar(sep, rng.random_range(0.0..2.0 * PI));
            corollary2_check(&p, z1, z2, tol)
        }
        Statement::Corollary3 => {
            let p = class_member(n, &mut rng, &origin)?;
            let r = corollary3_threshold(&p) * (1.0 + log_uniform(&mut rng, 1e-6, 10.0));
            corollary3_check(&p, Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI)), tol)
        }
        Statement::Corollary4 => corollary4_check(&class_member(n, &mut rng, &origin)?, tol),
        Statement::Corollary4Upper => corollary4_upper_check(&class_member(n, &mut rng, &origin)?, tol),
        Statement::Corollary5 => corollary5_check(&class_member(n, &mut rng, &real)?, tol),
        Statement::Eq8 => {
            let p = class_member(n, &mut rng, &real)?;
            eq8_check(&p, log_uniform(&mut rng, 10.0, 1000.0), None, tol)
        }
    }
}

/// Runs a single trial of a campaign.
pub fn run_trial(statement: Statement, n: usize, trial: usize, cfg: &CampaignConfig) -> TrialRecord {
    let seed = trial_seed(cfg.seed, statement, n, trial);
    let (outcome, report, error) = match generate(statement, n, seed, cfg) {
        Ok(r) => {
            let r = r.with_seed(seed);
            (classify(&r), Some(r), None)
        }
        Err(e) => (Outcome::HypothesisFailed, None, Some(e.to_string())),
    };
    TrialRecord {
        statement,
        n,
        trial,
        seed,
        outcome,
        report,
        error,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatementSummary {
    pub statement: Statement,
    pub checked: usize,
    pub held: usize,
    pub violations: usize,
    pub degenerate: usize,
    /// Includes `numerical_failures`.
    pub hypothesis_failed: usize,
    pub numerical_failures: usize,
    /// Corollary 5 trials where the sign of `d` disagreed with the direct
    /// comparison.
    pub inconsistent: usize,
    /// Smallest relative slack among held, non-degenerate trials.
    pub min_relative_slack: Option<f64>,
    pub min_slack_witness: Option<InequalityReport>,
    /// Up to 20 violating reports.
    pub violation_witnesses: Vec<InequalityReport>,
}

impl StatementSummary {
    fn new(statement: Statement) -> Self {
        StatementSummary {
            statement,
            checked: 0,
            held: 0,
            violations: 0,
            degenerate: 0,
            hypothesis_failed: 0,
            numerical_failures: 0,
            inconsistent: 0,
            min_relative_slack: None,
            min_slack_witness: None,
            violation_witnesses: Vec::new(),
        }
    }

    fn add(&mut self, t: &TrialRecord) {
        self.checked += 1;
        match t.outcome {
            Outcome::Held => self.held += 1,
            Outcome::Violated => self.violations += 1,
            Outcome::Degenerate => self.degenerate += 1,
            Outcome::HypothesisFailed => self.hypothesis_failed += 1,
        }
        if t.error.is_some() {
            self.numerical_failures += 1;
        }
        let Some(r) = &t.report else { return };
        if r.witnesses.params.d_agrees == Some(false) {
            self.inconsistent += 1;
        }
        if t.outcome == Outcome::Violated && self.violation_witnesses.len() < MAX_VIOLATIONS_KEPT {
            self.violation_witnesses.push(r.clone());
        }
        if matches!(t.outcome, Outcome::Held | Outcome::Violated) {
            if let Some(s) = r.relative_slack() {
                if self.min_relative_slack.is_none_or(|m| s < m) {
                    self.min_relative_slack = Some(s);
                    self.min_slack_witness = Some(r.clone());
                }
            }
        }
    }

    /// `checked = held + violations + degenerate + hypothesis_failed`.
    pub fn is_consistent(&self) -> bool {
        self.checked == self.held + self.violations + self.degenerate + self.hypothesis_failed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub seed: u64,
    pub degrees: Vec<usize>,
    pub trials: usize,
    pub statements: Vec<StatementSummary>,
    pub total_violations: usize,
    pub wall_time_s: f64,
}

impl CampaignSummary {
    pub fn passed(&self) -> bool {
        self.total_violations == 0 && self.statements.iter().all(|s| s.inconsistent == 0)
    }
}

pub struct CampaignOutcome {
    pub summary: CampaignSummary,
    pub trials: Vec<TrialRecord>,
}

/// Thread pool honoring [`WORKERS_ENV`].
pub fn worker_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        builder = builder.num_threads(k.max(1));
    }
    builder.build().expect("thread pool")
}

/// Runs every `(statement, degree, trial)` combination.  Violations never stop
/// the campaign; trials are returned in statement, degree, trial order.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignOutcome, HarnessError> {
    cfg.validate()?;
    let start = Instant::now();
    let jobs: Vec<(Statement, usize, usize)> = cfg
        .statements
        .iter()
        .flat_map(|&s| {
            cfg.degrees
                .iter()
                .flat_map(move |&n| (0..cfg.trials).map(move |k| (s, n, k)))
        })
        .collect();
    let trials: Vec<TrialRecord> =
        worker_pool().install(|| jobs.par_iter().map(|&(s, n, k)| run_trial(s, n, k, cfg)).collect());
    let mut statements: Vec<StatementSummary> = cfg.statements.iter().map(|&s| StatementSummary::new(s)).collect();
    for t in &trials {
        let idx = cfg
            .statements
            .iter()
            .position(|&s| s == t.statement)
            .expect("configured");
        statements[idx].add(t);
    }
    let total_violations = statements.iter().map(|s| s.violations).sum();
    Ok(CampaignOutcome {
        summary: CampaignSummary {
            seed: cfg.seed,
            degrees: cfg.degrees.clone(),
            trials: cfg.trials,
            statements,
            total_violations,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        trials,
    })
}

fn ext(x: Option<ExtReal>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

const REPORT_COLUMNS: [&str; 10] = [
    "outcome",
    "holds",
    "hypothesis_ok",
    "degenerate",
    "lhs",
    "rhs",
    "slack",
    "relative_slack",
    "error",
    "witness",
];

fn report_cells(
    outcome: Outcome,
    r: Option<&InequalityReport>,
    error: Option<&str>,
) -> Result<Vec<String>, HarnessError> {
    let outcome = serde_json::to_value(outcome)?;
    Ok(vec![
        outcome.as_str().unwrap_or_default().to_string(),
        r.map(|r| r.holds.to_string()).unwrap_or_default(),
        r.map(|r| r.hypothesis_ok.to_string()).unwrap_or_default(),
        r.map(|r| r.degenerate.to_string()).unwrap_or_default(),
        ext(r.and_then(|r| r.lhs)),
        ext(r.and_then(|r| r.rhs)),
        ext(r.and_then(|r| r.slack)),
        r.and_then(|r| r.relative_slack())
            .map(|s| s.to_string())
            .unwrap_or_default(),
        error.unwrap_or_default().to_string(),
        match r {
            Some(r) => serde_json::to_string(&r.witnesses)?,
            None => String::new(),
        },
    ])
}

/// One CSV row per trial; the `witness` column is the JSON accepted by
/// [`verify`].
pub fn write_trials_csv<W: Write>(trials: &[TrialRecord], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["statement", "n", "trial", "seed"].into_iter().chain(REPORT_COLUMNS))?;
    for t in trials {
        let mut row = vec![
            t.statement.to_string(),
            t.n.to_string(),
            t.trial.to_string(),
            t.seed.to_string(),
        ];
        row.extend(report_cells(t.outcome, t.report.as_ref(), t.error.as_deref())?);
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Single reports in the same layout as [`write_trials_csv`], without the
/// trial coordinates.
pub fn write_reports_csv<W: Write>(reports: &[InequalityReport], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["statement", "n"].into_iter().chain(REPORT_COLUMNS))?;
    for r in reports {
        let mut row = vec![r.id.to_string(), r.n.to_string()];
        row.extend(report_cells(classify(r), Some(r), None)?);
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Equality reproduction for one family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyResult {
    pub statement: Statement,
    pub family: String,
    pub trials: usize,
    pub max_abs_relative_slack: f64,
    pub all_hold: bool,
    pub worst: Option<InequalityReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualitySummary {
    pub n: usize,
    pub tolerance: f64,
    pub families: Vec<FamilyResult>,
    pub max_abs_relative_slack: f64,
    pub passed: bool,
    pub wall_time_s: f64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `sum c_k a^k z^k` times `b`: the polynomial `b P(a z)`.
fn rescaled(p: &Polynomial, a: Complex64, b: Complex64) -> Polynomial {
    let mut pow = b;
    let coeffs = p
        .coeffs()
        .iter()
        .map(|&ck| {
            let v = ck * pow;
            pow *= a;
            v
        })
        .collect();
    Polynomial::new(coeffs).expect("nonzero rescaling of a valid polynomial")
}

/// Real quad with `z_1 < z_2 < -cos(pi/(2n))` and `cos(pi/(2n)) < z_3 < z_4`.
fn extremal_quad(rng: &mut ChaCha8Rng, edge: f64) -> CollinearQuad {
    let mut u = [0.0f64; 4];
    u.iter_mut().for_each(|v| *v = rng.random_range(0.01..3.0));
    let z2 = -edge - u[1];
    let z3 = edge + u[2];
    let z4 = if rng.random_bool(0.25) {
        f64::INFINITY
    } else {
        z3 + u[3]
    };
    make_quad(c(0.0), c(1.0), [z2 - u[0], z2, z3, z4]).expect("ascending by construction")
}

type FamilyTrial = fn(usize, &mut ChaCha8Rng, usize) -> Result<InequalityReport, CheckError>;

fn chebyshev(n: usize) -> Polynomial {
    cheb_coeffs(ChebDegree::new(n).expect("n >= 2"))
}

fn edge(n: usize) -> f64 {
    largest_zero(ChebDegree::new(n).expect("n >= 2"))
}

/// `T_n(z - cos(pi/(2n)))`.
pub fn shifted_chebyshev(n: usize) -> Polynomial {
    chebyshev(n).shift(c(-edge(n)))
}

/// Class tolerance for a family member whose exact coefficients were rounded
/// to doubles: perturbing each `c_k` by `eps |c_k|` moves a critical value by
/// at most `eps sum |c_k| |zeta|^k`.
fn rounding_tol(p: &Polynomial) -> Result<f64, CheckError> {
    let profile = critical_profile(p)?;
    let spread = profile
        .critical_points
        .iter()
        .map(|z| p.abs_eval(z.norm()))
        .fold(0.0, f64::max);
    Ok(DEFAULT_TOL.max(f64::EPSILON * spread))
}

fn family_theorem1(n: usize, rng: &mut ChaCha8Rng, _k: usize) -> Result<InequalityReport, CheckError> {
    theorem1_check(&chebyshev(n), &extremal_quad(rng, edge(n)), DEFAULT_TOL)
}

fn family_remark1(n: usize, rng: &mut ChaCha8Rng, _k: usize) -> Result<InequalityReport, CheckError> {
    remark1_check(&chebyshev(n), &extremal_quad(rng, edge(n)), DEFAULT_TOL)
}

fn family_corollary1(n: usize, rng: &mut ChaCha8Rng, _k: usize) -> Result<InequalityReport, CheckError> {
    let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let z = side * rng.random_range(1.0..4.0);
    corollary1_check(&chebyshev(n), c(-1.0), c(1.0), c(z), DEFAULT_TOL)
}

/// Offset beyond `2 cos(pi/(2n))` at which the growth bound is sampled.  At
/// the threshold itself both sides vanish.
pub const COROLLARY3_OFFSET: (f64, f64) = (0.25, 8.0);

fn family_corollary3(n: usize, rng: &mut ChaCha8Rng, _k: usize) -> Result<InequalityReport, CheckError> {
    let z = 2.0 * edge(n) + rng.random_range(COROLLARY3_OFFSET.0..COROLLARY3_OFFSET.1);
    let p = shifted_chebyshev(n);
    corollary3_check(&p, c(z), rounding_tol(&p)?)
}

fn quarter_turn(rng: &mut ChaCha8Rng) -> Complex64 {
    [c(1.0), Complex64::new(0.0, 1.0), c(-1.0), Complex64::new(0.0, -1.0)][rng.random_range(0..4)]
}

/// Rotations `P(z) -> b P(a z)` preserve both sides of the critical-value
/// bounds.  `a = 2^j i^m` keeps the powers `a^k` exact.  With `exact` the
/// unit `b` is a quarter turn too and no coefficient is rounded; otherwise it
/// is uniform on the circle.  Trial 0 is the unrotated member.
fn rotation(rng: &mut ChaCha8Rng, k: usize, exact: bool) -> (Complex64, Complex64) {
    if k == 0 {
        return (c(1.0), c(1.0));
    }
    let a = quarter_turn(rng) * 2f64.powi(rng.random_range(-1..=1));
    let b = if exact {
        quarter_turn(rng)
    } else {
        Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
    };
    (a, b)
}

fn family_corollary4(n: usize, rng: &mut ChaCha8Rng, k: usize) -> Result<InequalityReport, CheckError> {
    let (a, b) = rotation(rng, k, true);
    corollary4_check(&rescaled(&shifted_chebyshev(n), a, b), DEFAULT_TOL)
}

fn family_corollary4_upper(n: usize, rng: &mut ChaCha8Rng, k: usize) -> Result<InequalityReport, CheckError> {
    let mut coeffs = vec![c(0.0); n + 1];
    coeffs[1] = c(1.0);
    coeffs[n] = c(1.0);
    let (a, b) = rotation(rng, k, false);
    let binomial = Polynomial::new(coeffs).expect("nonzero");
    corollary4_upper_check(&rescaled(&binomial, a, b), DEFAULT_TOL)
}

/// `+-T_n(+-z + a)`: the Corollary 5 expression is invariant under real
/// translation and both sign changes.
fn family_corollary5(n: usize, rng: &mut ChaCha8Rng, k: usize) -> Result<InequalityReport, CheckError> {
    let t = chebyshev(n);
    if k == 0 {
        return corollary5_check(&t, DEFAULT_TOL);
    }
    let shifted = t.shift(c(rng.random_range(-1.0..1.0)));
    let flip = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
    let sign = if rng.random_bool(0.5) { -1.0 } else { 1.0 };
    let p = rescaled(&shifted, c(flip), c(sign));
    corollary5_check(&p, rounding_tol(&p)?)
}

/// The equality families checked by [`run_equality`].
pub fn equality_families() -> Vec<(Statement, &'static str, FamilyTrial)> {
    vec![
        (
            Statement::Theorem1,
            "T_n on extremal quads",
            family_theorem1 as FamilyTrial,
        ),
        (Statement::Corollary1, "T_n on the real axis", family_corollary1),
        (Statement::Remark1, "T_n on extremal quads", family_remark1),
        (
            Statement::Corollary3,
            "T_n(z - cos(pi/2n)) at z > 2cos(pi/2n)",
            family_corollary3,
        ),
        (Statement::Corollary4, "rotated T_n(z - cos(pi/2n))", family_corollary4),
        (
            Statement::Corollary4Upper,
            "rotated c_1 z + c_n z^n",
            family_corollary4_upper,
        ),
        (Statement::Corollary5, "+-T_n(+-z + a)", family_corollary5),
    ]
}

/// Reproduces every equality case at degree `n` in `2..=12`; passes when all
/// relative slacks are within [`EQUALITY_TOL`].
pub fn run_equality(n: usize, trials: usize, seed: u64) -> Result<EqualitySummary, HarnessError> {
    if !(2..=12).contains(&n) {
        return Err(HarnessError::Malformed(format!(
            "equality degree must be in 2..=12, got {n}"
        )));
    }
    if trials < 1 {
        return Err(HarnessError::Malformed("trials must be >= 1".into()));
    }
    let start = Instant::now();
    let families = equality_families();
    let results: Vec<Result<FamilyResult, CheckError>> = worker_pool().install(|| {
        families
            .par_iter()
            .map(|&(statement, family, run)| {
                let mut worst: Option<InequalityReport> = None;
                let mut max_slack = 0.0f64;
                let mut all_hold = true;
                for k in 0..trials {
                    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, statement, n, k));
                    let r = run(n, &mut rng, k)?.with_seed(seed);
                    let s = r.relative_slack().map_or(f64::INFINITY, f64::abs);
                    all_hold &= r.holds && r.hypothesis_ok && !r.degenerate;
                    if worst.is_none() || s > max_slack || !(r.holds && r.hypothesis_ok) {
                        max_slack = max_slack.max(s);
                        worst = Some(r);
                    }
                }
                Ok(FamilyResult {
                    statement,
                    family: family.to_string(),
                    trials,
                    max_abs_relative_slack: max_slack,
                    all_hold,
                    worst,
                })
            })
            .collect()
    });
    let families = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let max = families.iter().map(|f| f.max_abs_relative_slack).fold(0.0, f64::max);
    let passed = families.iter().all(|f| f.all_hold) && max <= EQUALITY_TOL;
    Ok(EqualitySummary {
        n,
        tolerance: EQUALITY_TOL,
        families,
        max_abs_relative_slack: max,
        passed,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Critical-value bounds of a polynomial with `P(0) = 0`, `P'(0) != 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    #[serde(rename = "M")]
    pub m: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// `M - lower_bound`.
    pub lower_tight_gap: f64,
    /// `upper_bound - min_critical`.
    pub upper_tight_gap: f64,
    pub min_critical: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub max_within_upper: bool,
}

impl BoundsReport {
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }
}

pub fn bounds_report(p: &Polynomial) -> Result<BoundsReport, CriticalError> {
    let lower = cor4_lower_bound(p)?;
    let upper = cor4_upper_bound(p)?;
    let profile = critical_profile(p)?;
    let (m, min) = (profile.max_modulus, profile.min_modulus());
    Ok(BoundsReport {
        m,
        lower_bound: lower,
        upper_bound: upper,
        lower_tight_gap: m - lower,
        upper_tight_gap: upper - min,
        min_critical: min,
        lower_holds: within(lower, ExtReal::Finite(m)),
        upper_holds: within(min, ExtReal::Finite(upper)),
        max_within_upper: within(m, ExtReal::Finite(upper)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: usize) -> Polynomial {
        chebyshev(n)
    }

    #[test]
    fn verify_from_json() {
        let w: Witnesses =
            serde_json::from_str(r#"{"poly": [[-1,0],[0,0],[2,0]], "points": [[-3,0],[-1,0],[1,0],[3,0]]}"#).unwrap();
        let r = verify(Statement::Theorem1, &w, None).unwrap();
        assert!(r.holds && r.relative_slack().unwrap().abs() < 1e-12);
        let w: Witnesses = serde_json::from_str(r#"{"poly": [[0,0],[-3,0],[0,0],[4,0]]}"#).unwrap();
        let r = verify(Statement::Corollary5, &w, None).unwrap();
        assert!(r.holds && r.slack.unwrap().to_f64().abs() <= 1e-10);
        let w: Witnesses = serde_json::from_str(r#"{"poly": [[0,0],[1,0],[1,0]], "points": [[0.1,0]]}"#).unwrap();
        assert!(!verify(Statement::Corollary3, &w, None).unwrap().hypothesis_ok);
        let w: Witnesses = serde_json::from_str(r#"{"poly": [[0,0],[1,0],[1,0]]}"#).unwrap();
        assert!(matches!(
            verify(Statement::Corollary3, &w, None),
            Err(HarnessError::Malformed(_))
        ));
    }

    #[test]
    fn verify_infinite_and_invalid_quads() {
        let w: Witnesses =
            serde_json::from_str(r#"{"poly": [[-1,0],[0,0],[2,0]], "points": [[-3,0],[-1,0],[1,0],"inf"]}"#).unwrap();
        assert!(verify(Statement::Theorem1, &w, None).unwrap().holds);
        let w: Witnesses =
            serde_json::from_str(r#"{"poly": [[-1,0],[0,0],[2,0]], "points": [[-3,0],"inf",[1,0],[3,0]]}"#).unwrap();
        let r = verify(Statement::Theorem1, &w, None).unwrap();
        assert!(!r.hypothesis_ok);
    }

    #[test]
    fn trial_seeds_differ() {
        let a = trial_seed(7, Statement::Theorem1, 3, 0);
        assert_ne!(a, trial_seed(7, Statement::Theorem1, 3, 1));
        assert_ne!(a, trial_seed(7, Statement::Remark1, 3, 0));
        assert_ne!(a, trial_seed(7, Statement::Theorem1, 4, 0));
        assert_ne!(a, trial_seed(8, Statement::Theorem1, 3, 0));
        assert_eq!(a, trial_seed(7, Statement::Theorem1, 3, 0));
    }

    #[test]
    fn small_campaign_all_statements() {
        let cfg = CampaignConfig::new(Statement::ALL.to_vec(), vec![2, 3, 5], 30, 11);
        let out = run_campaign(&cfg).unwrap();
        for s in &out.summary.statements {
            assert!(s.is_consistent());
            assert_eq!(s.violations, 0, "{:?}", s.violation_witnesses.first());
            assert_eq!(s.inconsistent, 0);
            assert!(s.held > 0, "{}: nothing held", s.statement);
        }
        assert_eq!(out.trials.len(), 9 * 3 * 30);
    }

    #[test]
    fn csv_rows_round_trip_through_verify() {
        let cfg = CampaignConfig::new(
            vec![
                Statement::Theorem1,
                Statement::Corollary2,
                Statement::Eq8,
                Statement::Remark1,
            ],
            vec![3],
            5,
            2,
        );
        let out = run_campaign(&cfg).unwrap();
        let mut buf = Vec::new();
        write_trials_csv(&out.trials, &mut buf).unwrap();
        let mut rd = csv::Reader::from_reader(buf.as_slice());
        let headers = rd.headers().unwrap().clone();
        let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
        for row in rd.records() {
            let row = row.unwrap();
            let st: Statement = row[col("statement")].parse().unwrap();
            let w: Witnesses = serde_json::from_str(&row[col("witness")]).unwrap();
            let r = verify(st, &w, None).unwrap();
            assert_eq!(r.holds.to_string(), &row[col("holds")]);
            assert_eq!(ext(r.slack), &row[col("slack")]);
        }
    }

    #[test]
    fn equality_degree_two() {
        let s = run_equality(2, 20, 0).unwrap();
        assert!(s.passed);
        assert!(s.max_abs_relative_slack <= 1e-10, "{}", s.max_abs_relative_slack);
        assert!(run_equality(13, 1, 0).is_err());
    }

    #[test]
    fn bounds_examples() {
        let b = bounds_report(&Polynomial::from_real(&[0.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!((b.m - 0.25).abs() < 1e-15 && (b.lower_bound - 0.25).abs() < 1e-15);
        assert!((b.upper_bound - 0.25).abs() < 1e-15);
        let b = bounds_report(&shifted_chebyshev(2)).unwrap();
        assert!((b.m - 1.0).abs() < 1e-12 && (b.lower_bound - 1.0).abs() < 1e-12);
        let b = bounds_report(&Polynomial::from_real(&[0.0, 1.0, 0.0, 1.0]).unwrap()).unwrap();
        assert!((b.upper_bound - 2.0 * 3f64.powf(-1.5)).abs() < 1e-15);
        assert!(b.upper_tight_gap.abs() < 1e-12);
        assert!(bounds_report(&t(2)).is_err());
    }
}
