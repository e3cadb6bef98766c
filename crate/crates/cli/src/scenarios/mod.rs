//! Scenario registry and the check batteries behind `verify`.

mod fixtures;
mod geometry;
mod moment;
mod reduction;

use std::time::Instant;

use momenta::linalg::Vector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Overrides, ScenarioConfig};
use crate::report::{Check, VerificationReport};
use crate::CliError;

pub use fixtures::{r5, r5_named_submanifolds, r5_point, radial_slice, s2xs2_base};

/// Shared state for one scenario run.
pub struct Context {
    overrides: Overrides,
    pool: Option<rayon::ThreadPool>,
}

impl Context {
    pub fn new(overrides: Overrides, parallel: usize) -> Result<Self, CliError> {
        let pool = if parallel > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(parallel)
                    .build()
                    .map_err(|e| CliError::Usage(format!("cannot start {parallel} workers: {e}")))?,
            )
        } else {
            None
        };
        Ok(Context { overrides, pool })
    }

    /// Independent stream `stream` of the run seed.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.overrides.seed);
        rng.set_stream(stream);
        rng
    }

    pub fn samples(&self, default: usize) -> usize {
        self.overrides.samples.unwrap_or(default)
    }

    pub fn dt(&self, default: f64) -> f64 {
        self.overrides.dt.unwrap_or(default)
    }

    pub fn t_end(&self, default: f64) -> f64 {
        self.overrides.t_end.unwrap_or(default)
    }

    fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.overrides.tolerances.get(name).copied().unwrap_or(default)
    }

    /// Maximum of `f` over batches of `items`. Batches run on the worker
    /// pool when one was requested; the result does not depend on it.
    pub fn max_over<T: Sync>(&self, items: &[T], f: impl Fn(&[T]) -> momenta::Result<f64> + Sync) -> momenta::Result<f64> {
        let results: Vec<momenta::Result<f64>> = match &self.pool {
            Some(pool) => {
                let batch = items.len().div_ceil(4 * pool.current_num_threads()).max(1);
                pool.install(|| items.par_chunks(batch).map(&f).collect())
            }
            None => vec![f(items)],
        };
        results.into_iter().try_fold(0.0, |acc: f64, r| r.map(|r| acc.max(r)))
    }

    /// Same as [`Context::max_over`] with a per-item function.
    pub fn max_each<T: Sync>(&self, items: &[T], f: impl Fn(&T) -> momenta::Result<f64> + Sync) -> momenta::Result<f64> {
        self.max_over(items, |chunk| chunk.iter().map(&f).try_fold(0.0, |acc: f64, r| r.map(|r: f64| acc.max(r))))
    }
}

/// Collects checks for one scenario.
pub struct Battery<'a> {
    pub ctx: &'a Context,
    checks: Vec<Check>,
}

impl<'a> Battery<'a> {
    fn new(ctx: &'a Context) -> Self {
        Battery { ctx, checks: Vec::new() }
    }

    /// Run `f` and record its residual against `tolerance` (or the
    /// configured override for `name`).
    pub fn record(&mut self, name: &str, anchor: &str, tolerance: f64, f: impl FnOnce(&Context) -> momenta::Result<f64>) {
        let tol = self.ctx.tolerance(name, tolerance);
        let check = match f(self.ctx) {
            Ok(r) => Check::new(name, anchor, r, tol),
            Err(e) => Check::errored(name, anchor, tol, &e),
        };
        self.checks.push(check);
    }

    /// Record a count of failures, which must be zero.
    pub fn record_count(&mut self, name: &str, anchor: &str, f: impl FnOnce(&Context) -> momenta::Result<usize>) {
        self.record(name, anchor, 0.0, |c| f(c).map(|n| n as f64));
    }
}

pub struct ScenarioInfo {
    pub id: &'static str,
    pub summary: &'static str,
    run: fn(&mut Battery) -> momenta::Result<()>,
}

macro_rules! builtin_scenario {
    ($id:literal, $summary:literal) => {
        ScenarioInfo { id: $id, summary: $summary, run: |b| moment::builtin(b, $id) }
    };
}

pub const SCENARIOS: &[ScenarioInfo] = &[
    builtin_scenario!("linear-momentum", "translations of R^6, mu(q, p) = p"),
    builtin_scenario!("angular-momentum", "rotations of R^6 and Noether conservation for a central force"),
    builtin_scenario!("sphere-so3", "rotations of the unit sphere"),
    builtin_scenario!("s2xs2-diagonal", "diagonal rotations of S^2 x S^2"),
    builtin_scenario!("cotangent-left-translation", "left translation on T*SO(3)"),
    builtin_scenario!("hamiltonian-r-action", "circle action of the harmonic oscillator on R^2"),
    ScenarioInfo {
        id: "rigid-body-reconstruction",
        summary: "rigid body on so(3)* and T*SO(3): conservation, reduction and reconstruction",
        run: reduction::rigid_body,
    },
    ScenarioInfo { id: "harmonic-oscillator-reduction", summary: "harmonic oscillator reduced to complex projective space", run: reduction::harmonic },
    ScenarioInfo { id: "kks-so3", summary: "orbit symplectic form on so(3)*", run: reduction::kks },
    ScenarioInfo { id: "marsden-ratiu-r5", summary: "reducibility condition and submanifold classification in R^5", run: reduction::marsden_ratiu },
    ScenarioInfo { id: "root-systems", summary: "roots, simple roots, chamber faces and isotropy algebras", run: geometry::root_systems },
    ScenarioInfo { id: "poisson-transversals", summary: "transversal characterizations and induced bivectors", run: geometry::transversals },
    ScenarioInfo { id: "cross-sections", summary: "cross-sections of moment maps in S^2 x S^2 and so(3)*", run: geometry::cross_sections },
    ScenarioInfo { id: "jacobi-builtins", summary: "Jacobi identity for every built-in bivector", run: geometry::jacobi_builtins },
];

pub fn find(id: &str) -> Option<&'static ScenarioInfo> {
    SCENARIOS.iter().find(|s| s.id == id)
}

pub fn scenario_ids() -> Vec<&'static str> {
    SCENARIOS.iter().map(|s| s.id).collect()
}

/// Run the check battery of `cfg.scenario_id`.
pub fn run_verify(cfg: &ScenarioConfig) -> Result<VerificationReport, CliError> {
    let info = find(&cfg.scenario_id).ok_or_else(|| {
        CliError::Usage(format!("unknown scenario '{}'; available: {}", cfg.scenario_id, scenario_ids().join(", ")))
    })?;
    let ctx = Context::new(cfg.overrides.clone(), cfg.parallel)?;
    let start = Instant::now();
    let mut battery = Battery::new(&ctx);
    if let Err(e) = (info.run)(&mut battery) {
        battery.checks.push(Check::errored("setup", "scenario construction", 0.0, &e));
    }
    let wall_time = cfg.timing.then(|| start.elapsed().as_secs_f64());
    Ok(VerificationReport { scenario_id: info.id.to_string(), checks: battery.checks, wall_time })
}

fn random_points(ctx: &Context, space: &momenta::phase_space::PhaseSpace, n: usize, stream: u64) -> Vec<Vector> {
    let mut rng = ctx.rng(stream);
    (0..n).map(|_| space.random_point(&mut rng, 1.0)).collect()
}
