//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! table is always printed; exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use momenta::action::BUILTIN_MOMENT_MAPS;
use momenta_cli::config::ScenarioConfig;
use momenta_cli::report::VerificationReport;
use momenta_cli::scenarios::run_verify;

struct Runs {
    reports: BTreeMap<String, (VerificationReport, Duration)>,
}

impl Runs {
    fn get(&mut self, scenario: &str) -> &(VerificationReport, Duration) {
        self.reports.entry(scenario.to_string()).or_insert_with(|| {
            let start = Instant::now();
            let report = run_verify(&ScenarioConfig::new(scenario)).expect("registered scenario");
            (report, start.elapsed())
        })
    }

    /// Worst `residual / tolerance` over the named checks; missing or
    /// failed checks are reported by name.
    fn checks(&mut self, scenario: &str, names: &[&str]) -> Result<String, String> {
        let (report, _) = self.get(scenario);
        let mut worst: Option<(f64, String)> = None;
        for name in names {
            let c = report.check(name).ok_or_else(|| format!("{scenario}: no check named {name}"))?;
            if !c.pass {
                return Err(format!("{scenario}/{name}: residual {:.3e} > {:.1e} {}", c.residual, c.tolerance, c.note.clone().unwrap_or_default()));
            }
            let ratio = if c.tolerance > 0.0 { c.residual / c.tolerance } else { 0.0 };
            if worst.as_ref().is_none_or(|(w, _)| ratio > *w) {
                worst = Some((ratio, format!("{scenario}/{name} {:.2e} (tol {:.0e})", c.residual, c.tolerance)));
            }
        }
        Ok(worst.map(|(_, s)| s).unwrap_or_default())
    }

    fn all_checks(&mut self, scenario: &str) -> Result<String, String> {
        let names: Vec<String> = self.get(scenario).0.checks.iter().map(|c| c.name.clone()).collect();
        if names.is_empty() {
            return Err(format!("{scenario}: no checks"));
        }
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        self.checks(scenario, &refs).map(|w| format!("{} checks, worst {w}", names.len()))
    }

    fn runtime(&mut self, scenario: &str, limit: Duration) -> Result<String, String> {
        let t = self.get(scenario).1;
        if t < limit {
            Ok(format!("{scenario} ran in {:.2}s", t.as_secs_f64()))
        } else {
            Err(format!("{scenario} took {:.2}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
        }
    }
}

fn join(parts: Vec<Result<String, String>>) -> Result<String, String> {
    let mut ok = Vec::new();
    for p in parts {
        ok.push(p?);
    }
    Ok(ok.into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>().join("; "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut runs = Runs { reports: BTreeMap::new() };
    let mut failures = 0;
    let mut line = |n: usize, title: &str, outcome: Result<String, String>| {
        match &outcome {
            Ok(detail) => println!("criterion {n:>2}: PASS  {title}  [{detail}]"),
            Err(why) => {
                failures += 1;
                println!("criterion {n:>2}: FAIL  {title}  [{why}]");
            }
        }
    };

    let r = join(vec![runs.runtime("angular-momentum", Duration::from_secs(5)), runs.checks("angular-momentum", &["noether-central-force"])]);
    line(1, "Noether conservation for a central force on R^6", r);

    let r = join(BUILTIN_MOMENT_MAPS.iter().map(|id| runs.checks(id, &["moment-condition"])).collect());
    line(2, "moment map condition for all six built-ins", r);

    let r = join(BUILTIN_MOMENT_MAPS.iter().map(|id| runs.checks(id, &["equivariance"])).collect());
    line(3, "equivariance for all six built-ins", r);

    let r = join(["angular-momentum", "sphere-so3"].iter().map(|id| runs.checks(id, &["comoment-antihomomorphism"])).collect());
    line(4, "comoment antihomomorphism", r);

    let r = runs.checks("kks-so3", &["orbit-membership", "kks-antisymmetry", "kks-representative-independence", "kks-matches-bivector"]);
    line(5, "orbit symplectic form on so(3)*", r);

    let r = runs.checks("rigid-body-reconstruction", &["energy-drift", "casimir-drift", "instability-witness"]);
    line(6, "rigid body conservation and intermediate-axis instability", r);

    let r = runs.checks("rigid-body-reconstruction", &["pi-relatedness"]);
    line(7, "reduced dynamics are pi-related on T*SO(3)", r);

    let r = join(vec![
        runs.checks("rigid-body-reconstruction", &["reconstruction-residual", "reconstruction-order"]),
        runs.runtime("rigid-body-reconstruction", Duration::from_secs(30)),
    ]);
    line(8, "reconstruction of the lifted motion, order at least 2", r);

    let names: Vec<String> = [2, 3]
        .iter()
        .flat_map(|n| ["sphere-preservation", "projective-class", "degenerate-directions"].map(|c| format!("{c}-n{n}")))
        .collect();
    let r = runs.checks("harmonic-oscillator-reduction", &names.iter().map(String::as_str).collect::<Vec<_>>());
    line(9, "harmonic oscillator reduction for n = 2, 3", r);

    let r = runs.all_checks("marsden-ratiu-r5");
    line(10, "reducibility condition and the R^5 classification", r);

    let mut root_names = vec!["su2-root-count", "su2-simple-root-count", "su3-root-count", "su3-simple-root-count", "su3-face-count"];
    let per_alg: Vec<String> = ["su2", "so3", "su3", "u2", "su2xsu2", "t2"]
        .iter()
        .flat_map(|a| [format!("{a}-isotropy-cross-validation"), format!("{a}-interior-isotropy-is-cartan")])
        .collect();
    root_names.extend(per_alg.iter().map(String::as_str));
    let r = runs.checks("root-systems", &root_names);
    line(11, "root systems, faces and isotropy dimensions", r);

    let r = runs.checks("poisson-transversals", &["characterizations-random", "characterizations-named", "symplectic-direct-agreement"]);
    line(12, "equivalent characterizations of Poisson transversals", r);

    let r = runs.checks("poisson-transversals", &["splitting-reassembly", "induced-jacobi"]);
    line(13, "induced Poisson structure on a transversal", r);

    let r = runs.checks("cross-sections", &["s2xs2-symplectic-cross-section", "s2xs2-poisson-cross-section", "so3dual-poisson-cross-section"]);
    line(14, "cross-sections at 20 sampled points each", r);

    let r = runs.all_checks("jacobi-builtins");
    line(15, "Jacobi identity of every built-in bivector", r);

    let total = start.elapsed();
    println!("acceptance: {} of 15 criteria pass in {:.1}s", 15 - failures, total.as_secs_f64());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
