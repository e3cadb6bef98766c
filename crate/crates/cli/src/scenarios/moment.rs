use std::slice;

use momenta::action::*;
use momenta::lie::GroupElement;
use momenta::linalg::Vector;
use momenta::models;
use momenta::reduction::check_clean_level_kernel;
use momenta::Result;

use super::{random_points, Battery};

/// Checks shared by the built-in moment maps.
pub fn builtin(b: &mut Battery, id: &str) -> Result<()> {
    let mm = builtin_moment_map(id)?;
    let n = b.ctx.samples(100);
    let points = random_points(b.ctx, mm.space(), n, 1);
    let mut grng = b.ctx.rng(2);
    let pairs: Vec<(GroupElement, Vector)> =
        points.iter().map(|p| Ok((mm.algebra().random_group_element(&mut grng, 2.0)?, p.clone()))).collect::<Result<_>>()?;

    b.record("moment-condition", "Hamiltonian vector field of each comoment is the generator", 1e-5, |c| {
        c.max_over(&points, |chunk| check_moment_condition(&mm, chunk))
    });
    b.record("equivariance", "moment map intertwines the action with the coadjoint action", 1e-8, |c| {
        c.max_each(&pairs, |(g, p)| check_equivariance(&mm, slice::from_ref(g), slice::from_ref(p)))
    });
    b.record("comoment-antihomomorphism", "brackets of comoments match minus the comoment of brackets", 1e-5, |c| {
        c.max_over(&points, |chunk| check_comoment_antihom(&mm, chunk))
    });
    b.record_count("clean-level-kernel", "kernel of d mu is the symplectic complement of the orbit", |_| {
        let mut failures = 0;
        for p in points.iter().take(20) {
            if !check_clean_level_kernel(&mm, p)?.pass {
                failures += 1;
            }
        }
        Ok(failures)
    });

    if id == "angular-momentum" {
        let mut grng = b.ctx.rng(3);
        let groups = (0..10).map(|_| mm.algebra().random_group_element(&mut grng, 2.0)).collect::<Result<Vec<_>>>()?;
        let p0 = Vector::from_column_slice(&[1.0, 0.0, 0.2, 0.0, 1.1, 0.3]);
        b.record("noether-central-force", "moment map is conserved by an invariant Hamiltonian flow", 1e-6, |c| {
            check_noether(&mm, &models::central_force(), &groups, &p0, c.t_end(10.0), c.dt(1e-3))
        });
    }
    Ok(())
}
