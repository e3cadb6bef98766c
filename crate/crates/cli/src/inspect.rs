//! JSON reports for the `roots` and `transversal` subcommands.

use std::sync::Arc;

use momenta::action::coadjoint;
use momenta::lie::LieAlgebra;
use momenta::linalg::Vector;
use momenta::roots::RootSystem;
use momenta::transversal::{preimage_submanifold, transversal_report, Submanifold, SAMPLE_RADIUS};
use serde_json::{json, Value};

use crate::config::ScenarioConfig;
use crate::report::SCHEMA_VERSION;
use crate::scenarios::{r5_named_submanifolds, r5_point, radial_slice, s2xs2_base};
use crate::CliError;

pub const TRANSVERSAL_SCENARIOS: [&str; 3] = ["r5", "s2xs2", "so3dual"];

/// Roots, simple roots, faces and their isotropy and commutator dimensions.
pub fn run_roots(cfg: &ScenarioConfig) -> Result<Value, CliError> {
    let name = cfg.algebra.as_deref().ok_or_else(|| CliError::Usage("roots needs --algebra".into()))?;
    let alg = LieAlgebra::builtin(name).map_err(|e| CliError::Usage(e.to_string()))?;
    let sys = RootSystem::new(Arc::new(alg))?;
    let mut out = sys.to_json()?;
    out["schema"] = json!(SCHEMA_VERSION);
    out["simple_root_functionals"] = json!(sys.simple_roots().iter().map(|r| r.functional.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>());
    Ok(out)
}

fn report_points(n: &Submanifold, points: &[Vector]) -> Result<Vec<Value>, CliError> {
    points.iter().map(|p| Ok(transversal_report(n, p)?.to_json())).collect()
}

fn entry(name: &str, n: &Submanifold, base: &Vector, samples: usize, seed: u64) -> Result<Value, CliError> {
    let mut points = vec![base.clone()];
    if n.codim() > 0 && samples > 0 {
        points.extend(n.sample_near(base, samples, SAMPLE_RADIUS, seed)?);
    }
    Ok(json!({"name": name, "dim": n.dim(), "points": report_points(n, &points)?}))
}

/// Per-point transversal reports for a named setting.
pub fn run_transversal(cfg: &ScenarioConfig) -> Result<Value, CliError> {
    let seed = cfg.overrides.seed;
    let submanifolds = match cfg.scenario_id.as_str() {
        "r5" => {
            let samples = cfg.overrides.samples.unwrap_or(4);
            r5_named_submanifolds()
                .iter()
                .map(|(name, n, _)| entry(name, n, &r5_point(), samples, seed))
                .collect::<Result<Vec<_>, _>>()?
        }
        "s2xs2" => {
            let (mm, _, p) = s2xs2_base();
            let n = preimage_submanifold(&mm, &radial_slice(&LieAlgebra::so3()));
            vec![entry("moment-preimage-of-slice", &n, &p, cfg.overrides.samples.unwrap_or(20), seed)?]
        }
        "so3dual" => {
            let so3 = Arc::new(LieAlgebra::so3());
            let n = preimage_submanifold(&coadjoint(so3.clone()), &radial_slice(&so3));
            let lambda = Vector::from_column_slice(&[0.0, 0.0, 0.8]);
            vec![entry("slice-through-lambda", &n, &lambda, cfg.overrides.samples.unwrap_or(20), seed)?]
        }
        other => {
            return Err(CliError::Usage(format!("unknown transversal scenario '{other}'; available: {}", TRANSVERSAL_SCENARIOS.join(", "))))
        }
    };
    Ok(json!({"schema": SCHEMA_VERSION, "scenario": cfg.scenario_id, "submanifolds": submanifolds}))
}
