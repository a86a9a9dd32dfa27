//! Randomized cross-validation sweep: analytic verdict vs. numeric oracle vs.
//! simulation, one CSV row per configuration.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coalition::{
    classify_initial_state_with_band, GameConfig, Verdict, VerdictKind, DEFAULT_BAND,
};
use crate::error::{Error, Result};
use crate::evasion::{escape_margin_supremum, MarginReport, OracleParams};
use crate::geometry::Point3;
use crate::io::fmt_num;
use crate::par::Exec;
use crate::sim::{validate_with, ValidationOutcome};

pub const CSV_HEADER: &str = "seed,n,verdict,supremum,agree,sim_pass";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepParams {
    pub n_configs: usize,
    pub pursuers: RangeInclusive<usize>,
    pub seed: u64,
    /// Oracle dead band: rows with `|supremum| <= band` always agree.
    pub band: f64,
    /// Band for the analytic verdict itself.
    pub verdict_band: f64,
    /// Random straight-line trials per pursuer-win configuration; 0 skips simulation.
    pub trials: usize,
    pub dt: f64,
    pub oracle: OracleParams,
    pub exec: Exec,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            n_configs: 100,
            pursuers: 1..=3,
            seed: 42,
            band: 1e-3,
            verdict_band: DEFAULT_BAND,
            trials: 100,
            dt: 1e-3,
            oracle: OracleParams {
                exec: Exec::Sequential,
                ..OracleParams::default()
            },
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimCell {
    Pass,
    Fail,
    Info,
    Skipped,
}

impl SimCell {
    pub fn as_str(self) -> &'static str {
        match self {
            SimCell::Pass => "pass",
            SimCell::Fail => "fail",
            SimCell::Info => "info",
            SimCell::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Seed that regenerates this configuration through [`random_config`].
    pub seed: u64,
    pub n: usize,
    /// `None` for a degenerate configuration.
    pub verdict: Option<Verdict>,
    pub oracle: MarginReport,
    pub agree: bool,
    pub sim: SimCell,
}

impl SweepRow {
    pub fn verdict_label(&self) -> &'static str {
        self.verdict.map_or("degenerate", |v| v.kind.as_str())
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.seed,
            self.n,
            self.verdict_label(),
            fmt_num(self.oracle.supremum),
            self.agree,
            self.sim.as_str()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn disagreements(&self) -> usize {
        self.rows.iter().filter(|r| !r.agree).count()
    }

    pub fn sim_failures(&self) -> usize {
        self.rows.iter().filter(|r| r.sim == SimCell::Fail).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.to_csv());
            out.push('\n');
        }
        out
    }
}

/// Pursuers uniform in `[-5, 5]³`, evader with `x, y ∈ [-5, 5]`, `z ∈ (0, 5]`.
pub fn random_config(seed: u64, pursuers: RangeInclusive<usize>) -> GameConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(pursuers);
    let mut coord = || rng.random_range(-5.0..=5.0);
    let ps: Vec<Point3> = (0..n)
        .map(|_| Point3::new(coord(), coord(), coord()))
        .collect();
    let (x, y) = (coord(), coord());
    let z = 5.0 - rng.random_range(0.0..5.0);
    GameConfig::new(ps, Some(Point3::new(x, y, z))).expect("continuous samples are distinct")
}

/// Seed of configuration `index` in a sweep with master seed `seed`.
pub fn config_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.random()
}

/// Does the analytic verdict agree with the oracle outside the dead band?
///
/// A negative supremum from an unresolved search is only a lower bound (the
/// true supremum may be approached at infinity), so it cannot contradict an
/// evader win.
pub fn agrees(verdict: &Verdict, oracle: &MarginReport, band: f64) -> bool {
    let sup = oracle.supremum;
    if sup.abs() <= band || (sup < 0.0 && !oracle.resolved) {
        return true;
    }
    match verdict.kind {
        VerdictKind::EvaderWin => sup > 0.0,
        VerdictKind::PursuerWin => sup < 0.0,
        VerdictKind::OnBarrier => {
            !((verdict.margin > 0.0 && sup < 0.0) || (verdict.margin < 0.0 && sup > 0.0))
        }
    }
}

pub fn evaluate(seed: u64, params: &SweepParams) -> Result<SweepRow> {
    let config = random_config(seed, params.pursuers.clone());
    let evader = config.evader.ok_or(Error::MissingEvader)?;
    let oracle = escape_margin_supremum(evader, &config.pursuers, &params.oracle)?;
    let verdict = match classify_initial_state_with_band(&config, params.verdict_band) {
        Ok(v) => v,
        Err(Error::DegenerateConfiguration(_)) => {
            return Ok(SweepRow {
                seed,
                n: config.pursuers.len(),
                verdict: None,
                oracle,
                agree: true,
                sim: SimCell::Skipped,
            })
        }
        Err(e) => return Err(e),
    };
    let agree = agrees(&verdict, &oracle, params.band);
    let sim = if params.trials == 0 {
        SimCell::Skipped
    } else {
        let report = validate_with(
            &config,
            verdict,
            oracle,
            params.trials,
            params.dt,
            seed,
            &params.oracle,
        )?;
        match report.outcome {
            ValidationOutcome::Pass => SimCell::Pass,
            ValidationOutcome::Fail { .. } => SimCell::Fail,
            ValidationOutcome::Informational => SimCell::Info,
        }
    };
    Ok(SweepRow {
        seed,
        n: config.pursuers.len(),
        verdict: Some(verdict),
        oracle,
        agree,
        sim,
    })
}

pub fn sweep(params: &SweepParams) -> Result<SweepReport> {
    if params.pursuers.is_empty() || *params.pursuers.start() == 0 {
        return Err(Error::EmptyPursuerSet);
    }
    let rows = params.exec.map(params.n_configs, |i| {
        evaluate(config_seed(params.seed, i), params)
    });
    Ok(SweepReport {
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}
