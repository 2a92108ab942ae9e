//! Sweep requests and the tables they produce.

use activeris_core::config::{AmpGains, PhaseNoiseKind, PhaseNoiseModel, ScenarioConfig};
use activeris_core::montecarlo::{evaluate_point, near_square_factors, SimOptions, SweepPoint};
use activeris_core::units::dbm_to_watts;
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Nmse,
    Outage,
    Capacity,
}

impl SweepKind {
    pub fn command(self) -> &'static str {
        match self {
            SweepKind::Nmse => "nmse-sweep",
            SweepKind::Outage => "outage-sweep",
            SweepKind::Capacity => "capacity-sweep",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            SweepKind::Nmse => &[
                "rho_dbm",
                "beta",
                "sigma_p2",
                "model",
                "nmse_analytic",
                "nmse_empirical",
                "nmse_stderr",
            ],
            SweepKind::Outage => &[
                "rho_dbm",
                "beta",
                "sigma_p2",
                "p_out_analytic",
                "p_out_empirical",
            ],
            SweepKind::Capacity => &[
                "rho_dbm",
                "N",
                "beta",
                "capacity_analytic",
                "capacity_empirical",
                "capacity_asymptote",
            ],
        }
    }
}

/// Everything needed to regenerate a sweep table, apart from the scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRequest {
    pub kind: SweepKind,
    pub rho_dbm: Vec<f64>,
    /// `None` keeps the scenario's gains.
    pub beta: Option<Vec<f64>>,
    pub sigma_p2: Vec<f64>,
    pub model: Vec<PhaseNoiseKind>,
    pub n: Vec<usize>,
    pub sim: SimOptions,
}

/// A cell value; `Missing` prints as an empty CSV field or JSON null.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Missing,
}

impl Cell {
    fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

struct Coordinates {
    rho_dbm: f64,
    beta: Option<f64>,
    sigma_p2: f64,
    model: PhaseNoiseKind,
    n: usize,
}

fn configure(base: &ScenarioConfig, at: &Coordinates) -> Result<ScenarioConfig> {
    let mut cfg = base.clone();
    if cfg.n_elements() != at.n {
        let (rows, cols) = near_square_factors(at.n);
        cfg.resize_ris(rows, cols)
            .with_context(|| format!("resizing the surface to N = {}", at.n))?;
    }
    cfg.transmit_power = dbm_to_watts(at.rho_dbm);
    if let Some(b) = at.beta {
        cfg.amp_gains = AmpGains::Uniform(b);
    }
    cfg.phase_noise = PhaseNoiseModel::from_power(at.model, at.sigma_p2)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(base: &ScenarioConfig, req: &SweepRequest) -> Result<Table> {
    if req.rho_dbm.is_empty() || req.sigma_p2.is_empty() || req.model.is_empty() || req.n.is_empty()
    {
        bail!("every sweep axis needs at least one value");
    }
    let betas: Vec<Option<f64>> = match &req.beta {
        Some(v) if v.is_empty() => bail!("every sweep axis needs at least one value"),
        Some(v) => v.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let mut rows = Vec::new();
    let mut index = 0u64;
    for &model in &req.model {
        for &sigma_p2 in &req.sigma_p2 {
            for &n in &req.n {
                for &beta in &betas {
                    for &rho_dbm in &req.rho_dbm {
                        let at = Coordinates {
                            rho_dbm,
                            beta,
                            sigma_p2,
                            model,
                            n,
                        };
                        let cfg = configure(base, &at)?;
                        let point = evaluate_point(&cfg, rho_dbm, &req.sim, index)
                            .with_context(|| format!("evaluating rho = {rho_dbm} dBm"))?;
                        let beta = beta.or(cfg.amp_gains.common());
                        rows.push(row(req.kind, &at, beta, &point));
                        index += 1;
                    }
                }
            }
        }
    }
    Ok(Table {
        columns: req.kind.columns().to_vec(),
        rows,
    })
}

fn row(kind: SweepKind, at: &Coordinates, beta: Option<f64>, p: &SweepPoint) -> Vec<Cell> {
    let e = p.empirical.as_ref();
    match kind {
        SweepKind::Nmse => vec![
            Cell::Num(at.rho_dbm),
            Cell::opt(beta),
            Cell::Num(at.sigma_p2),
            Cell::Text(at.model.name().to_string()),
            Cell::Num(p.analytic.nmse),
            Cell::opt(e.map(|e| e.nmse.mean)),
            Cell::opt(e.map(|e| e.nmse.stderr)),
        ],
        SweepKind::Outage => vec![
            Cell::Num(at.rho_dbm),
            Cell::opt(beta),
            Cell::Num(at.sigma_p2),
            Cell::Num(p.analytic.outage),
            Cell::opt(e.map(|e| e.outage.mean)),
        ],
        SweepKind::Capacity => vec![
            Cell::Num(at.rho_dbm),
            Cell::Int(at.n),
            Cell::opt(beta),
            Cell::Num(p.analytic.capacity),
            Cell::opt(e.map(|e| e.capacity.mean)),
            Cell::opt(p.analytic.capacity_asymptote),
        ],
    }
}
