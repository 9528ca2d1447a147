use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use growth_fiscal::AllocationVariant;
use growth_model::{OgEconomy, Technology};
use growth_og::{steady_state_interval, OmegaRequest, SolveOptions};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub economy: EconomySpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub runs: RunSpec,
    #[serde(default)]
    pub simulate: SimulateSpec,
    #[serde(default)]
    pub fiscal: FiscalSpec,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    /// Output directory; `--out` takes precedence.
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomySpec {
    pub private_rate: f64,
    pub social_rate: f64,
    pub death_rate: f64,
    pub technology: Technology,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub rtol: f64,
    pub atol: f64,
    /// Requested domain `k̄ (1 ± omega_fraction)` unless bounds are given.
    pub omega_fraction: f64,
    pub omega_lo: Option<f64>,
    pub omega_hi: Option<f64>,
    /// Rows of `policy.csv`.
    pub grid_points: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = SolveOptions::default();
        Self { rtol: d.rtol, atol: d.atol, omega_fraction: 0.2, omega_lo: None, omega_hi: None, grid_points: 41 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Explicit `k_bar` values.
    List,
    /// Points at `fractions` of the steady-state interval.
    Fractions,
    /// The renegotiation-proof steady state, approached from inside.
    Lrp,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSpec {
    pub select: Selection,
    pub k_bar: Vec<f64>,
    pub fractions: Vec<f64>,
    /// The selected steady state is the upper end of the interval, where no
    /// convergent equilibrium exists; `lrp` solves at `1 - lrp_offset` of it.
    pub lrp_offset: f64,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self { select: Selection::Fractions, k_bar: Vec::new(), fractions: vec![0.25, 0.5, 0.75], lrp_offset: 1e-3 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSpec {
    pub k0: Option<f64>,
    /// Start at `k0_ratio · k̄` when `k0` is absent.
    pub k0_ratio: f64,
    pub horizon: f64,
    pub sample_dt: f64,
}

impl Default for SimulateSpec {
    fn default() -> Self {
        Self { k0: None, k0_ratio: 0.8, horizon: 200.0, sample_dt: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleSpec {
    Optimal,
    Egalitarian,
}

impl From<RuleSpec> for AllocationVariant {
    fn from(r: RuleSpec) -> Self {
        match r {
            RuleSpec::Optimal => AllocationVariant::Optimal,
            RuleSpec::Egalitarian => AllocationVariant::Egalitarian,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiscalSpec {
    pub rule: RuleSpec,
    pub age_step: f64,
    pub max_age: f64,
    pub vintages: Vec<f64>,
    /// Date-0 assets per vintage; equal shares of `K(0)` when absent.
    pub initial_assets: Option<Vec<f64>>,
}

impl Default for FiscalSpec {
    fn default() -> Self {
        Self {
            rule: RuleSpec::Optimal,
            age_step: 0.5,
            max_age: 100.0,
            vintages: vec![-60.0, -30.0, -10.0, 0.0, 10.0, 50.0],
            initial_assets: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySpec {
    pub ie_tol: f64,
    pub de_tol: f64,
    pub envelope_tol: f64,
    pub semigroup_tol: f64,
    pub residual_points: usize,
    pub argmax_points: usize,
    pub payoff_grid: usize,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            ie_tol: 1e-5,
            de_tol: 1e-5,
            envelope_tol: 1e-4,
            semigroup_tol: 1e-8,
            residual_points: 41,
            argmax_points: 20,
            payoff_grid: 1000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    /// Interior grid points across the steady-state interval.
    pub points: usize,
    /// Extra rows outside the interval, as fractions of its width.
    pub outside: Vec<f64>,
    /// Finite-difference step in `k̄`, relative to `k̄`.
    pub fd_step: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { points: 40, outside: vec![-0.1, -0.05, 1.05, 1.1], fd_step: 1e-3 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSpec {
    pub productivity: f64,
    pub near_rate: f64,
    pub far_rate: f64,
    pub switch: f64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self { productivity: 0.08, near_rate: 0.10, far_rate: 0.05, switch: 1.0 }
    }
}

/// Scenario text together with its parsed form.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub hash: String,
    pub source: Option<PathBuf>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn parse(text: &str) -> Result<Scenario> {
    let s: Scenario = toml::from_str(text).map_err(|e| anyhow::anyhow!("scenario parse error: {e}"))?;
    s.validate()?;
    Ok(s)
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading scenario {}", path.display()))?;
    let scenario = parse(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(Loaded { scenario, hash: sha256_hex(text.as_bytes()), source: Some(path.to_path_buf()) })
}

/// Target steady state of one run and why it was chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunTarget {
    pub k_bar: f64,
    pub label: &'static str,
}

impl Scenario {
    pub fn economy(&self) -> Result<OgEconomy> {
        let e = &self.economy;
        OgEconomy::new(e.private_rate, e.social_rate, e.death_rate, e.technology).context("invalid economy")
    }

    fn validate(&self) -> Result<()> {
        self.economy()?;
        let positive = [
            ("solver.rtol", self.solver.rtol),
            ("solver.atol", self.solver.atol),
            ("solver.omega_fraction", self.solver.omega_fraction),
            ("runs.lrp_offset", self.runs.lrp_offset),
            ("simulate.k0_ratio", self.simulate.k0_ratio),
            ("simulate.horizon", self.simulate.horizon),
            ("simulate.sample_dt", self.simulate.sample_dt),
            ("fiscal.age_step", self.fiscal.age_step),
            ("fiscal.max_age", self.fiscal.max_age),
            ("verify.ie_tol", self.verify.ie_tol),
            ("verify.de_tol", self.verify.de_tol),
            ("verify.envelope_tol", self.verify.envelope_tol),
            ("verify.semigroup_tol", self.verify.semigroup_tol),
            ("sweep.fd_step", self.sweep.fd_step),
        ];
        for (name, x) in positive {
            ensure!(x > 0.0 && x.is_finite(), "{name} must be positive, got {x}");
        }
        ensure!(self.solver.grid_points >= 2, "solver.grid_points must be at least 2");
        ensure!(self.verify.residual_points >= 2, "verify.residual_points must be at least 2");
        ensure!(self.verify.payoff_grid >= 3, "verify.payoff_grid must be at least 3");
        ensure!(self.sweep.points >= 1, "sweep.points must be at least 1");
        if let Some(a) = &self.fiscal.initial_assets {
            ensure!(
                a.len() == self.fiscal.vintages.len(),
                "fiscal.initial_assets has {} entries for {} vintages",
                a.len(),
                self.fiscal.vintages.len()
            );
        }
        match self.runs.select {
            Selection::List if self.runs.k_bar.is_empty() => bail!("runs.select = \"list\" needs runs.k_bar"),
            Selection::Fractions if self.runs.fractions.is_empty() => {
                bail!("runs.select = \"fractions\" needs runs.fractions")
            }
            _ => {}
        }
        Ok(())
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { rtol: self.solver.rtol, atol: self.solver.atol, ..SolveOptions::default() }
    }

    /// Domain requested for an equilibrium converging to `k_bar`, widened to
    /// contain `extra` if given.
    pub fn omega(&self, k_bar: f64, extra: Option<f64>) -> OmegaRequest {
        let base = OmegaRequest::around(k_bar, self.solver.omega_fraction);
        let mut req =
            OmegaRequest { lo: self.solver.omega_lo.unwrap_or(base.lo), hi: self.solver.omega_hi.unwrap_or(base.hi) };
        if let Some(k) = extra {
            req.lo = req.lo.min(k * 0.98);
            req.hi = req.hi.max(k * 1.02);
        }
        req
    }

    /// Steady states to solve for. A time-consistent economy has the single
    /// point `f'(k̄) = δ`; targets outside the interval are kept and reported
    /// as inadmissible by the solve.
    pub fn targets(&self) -> Result<Vec<RunTarget>> {
        let econ = self.economy()?;
        let iv = steady_state_interval(&econ).context("steady-state interval")?;
        if iv.is_degenerate() {
            return Ok(vec![RunTarget { k_bar: iv.k_lo, label: "modified golden rule" }]);
        }
        Ok(match self.runs.select {
            Selection::List => self.runs.k_bar.iter().map(|&k_bar| RunTarget { k_bar, label: "listed" }).collect(),
            Selection::Fractions => {
                self.runs.fractions.iter().map(|&s| RunTarget { k_bar: iv.at(s), label: "interval fraction" }).collect()
            }
            Selection::Lrp => {
                vec![RunTarget {
                    k_bar: iv.at(1.0 - self.runs.lrp_offset),
                    label: "below the renegotiation-proof endpoint",
                }]
            }
        })
    }
}
