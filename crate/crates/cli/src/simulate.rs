//! Trajectory tables with conserved-quantity columns.

use std::sync::Arc;

use momenta::action::{angular_momentum, harmonic_oscillator, MomentMap};
use momenta::lie::LieAlgebra;
use momenta::linalg::Vector;
use momenta::models;
use momenta::phase_space::{self, PhaseSpace, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::config::ScenarioConfig;
use crate::report::{format_float, SCHEMA_VERSION};
use crate::CliError;

pub const SIMULATIONS: [&str; 3] = ["rigid-body", "harmonic-oscillator", "central-force"];

/// Sampled trajectory with derived columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub scenario: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Integration error that cut the run short, if any.
    pub failure: Option<String>,
}

impl Table {
    pub fn complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "scenario": self.scenario,
            "complete": self.complete(),
            "failure": self.failure,
            "columns": self.columns,
            "rows": self.rows,
        })
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|x| format_float(*x)))?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8"))
    }
}

/// Named scalar observable evaluated at every state.
type Column = Box<dyn Fn(&Vector) -> f64>;

struct System {
    space: PhaseSpace,
    h: ScalarField,
    x0: Vector,
    state_columns: Vec<String>,
    /// Extra `(name, value)` columns evaluated at every state.
    extras: Vec<(String, Column)>,
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn moment_columns(mm: MomentMap, prefix: &str) -> Vec<(String, Column)> {
    let mm = Arc::new(mm);
    (0..mm.algebra().dim())
        .map(|i| {
            let mm = mm.clone();
            (format!("{prefix}{}", i + 1), Box::new(move |x: &Vector| mm.value(x).0[i]) as Column)
        })
        .collect()
}

fn system(id: &str, cfg: &ScenarioConfig) -> Result<System, CliError> {
    match id {
        "rigid-body" => {
            let h = models::rigid_body([1.0, 2.0, 3.0]);
            let h2 = h.clone();
            Ok(System {
                space: PhaseSpace::lie_poisson(Arc::new(LieAlgebra::so3())),
                h,
                x0: Vector::from_column_slice(&[0.01, 1.0, 0.01]),
                state_columns: names("alpha", 3),
                extras: vec![("H".into(), Box::new(move |x| h2.eval(x))), ("casimir".into(), Box::new(|x| x.norm_squared()))],
            })
        }
        "harmonic-oscillator" => {
            let n = 2;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.overrides.seed);
            let x0 = Vector::from_fn(2 * n, |_, _| rng.sample::<f64, _>(StandardNormal)).normalize();
            let mut extras: Vec<(String, Column)> =
                vec![("H".into(), Box::new(|x: &Vector| 0.5 * x.norm_squared())), ("norm2".into(), Box::new(|x: &Vector| x.norm_squared()))];
            extras.extend(moment_columns(harmonic_oscillator(n), "mu"));
            let mut state_columns = names("q", n);
            state_columns.extend(names("p", n));
            Ok(System { space: PhaseSpace::standard(n), h: models::harmonic(), x0, state_columns, extras })
        }
        "central-force" => {
            let h = models::central_force();
            let h2 = h.clone();
            let mut extras: Vec<(String, Column)> = vec![("H".into(), Box::new(move |x| h2.eval(x)))];
            extras.extend(moment_columns(angular_momentum(), "mu"));
            let mut state_columns = names("q", 3);
            state_columns.extend(names("p", 3));
            Ok(System {
                space: PhaseSpace::standard(3),
                h,
                x0: Vector::from_column_slice(&[1.0, 0.0, 0.2, 0.0, 1.1, 0.3]),
                state_columns,
                extras,
            })
        }
        _ => Err(CliError::Usage(format!("unknown simulation '{id}'; available: {}", SIMULATIONS.join(", ")))),
    }
}

/// Integrate the named system, keeping every state reached before a failure.
pub fn run_simulate(cfg: &ScenarioConfig) -> Result<Table, CliError> {
    let sys = system(&cfg.scenario_id, cfg)?;
    let t_end = cfg.overrides.t_end.unwrap_or(10.0);
    let dt = cfg.overrides.dt.unwrap_or(1e-3);
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let mut columns = vec!["t".to_string()];
    columns.extend(sys.state_columns.iter().cloned());
    columns.extend(sys.extras.iter().map(|(n, _)| n.clone()));
    let row = |t: f64, x: &Vector| {
        let mut r = vec![t];
        r.extend(x.iter().copied());
        r.extend(sys.extras.iter().map(|(_, f)| f(x)));
        r
    };
    let mut rows = vec![row(0.0, &sys.x0)];
    let mut x = sys.x0.clone();
    let mut failure = None;
    for k in 0..steps {
        let t0 = k as f64 * dt;
        let h = (t_end - t0).min(dt);
        match phase_space::flow(&sys.space, &sys.h, &x, h, h) {
            Ok(tr) => {
                x = tr.last().expect("nonempty trajectory").clone();
                rows.push(row(if k + 1 == steps { t_end } else { t0 + h }, &x));
            }
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        }
    }
    Ok(Table { scenario: cfg.scenario_id.clone(), columns, rows, failure })
}
