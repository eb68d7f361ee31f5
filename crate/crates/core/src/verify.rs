//! Invariant suite for a single vector: formula route against the oracle
//! route plus the identities every modular pair satisfies.
//!
//! Thresholds scale with `100 · ctx.tol()` (which is `1e-8` for the `f64`
//! default) times `κ(T)` or `κ(T)²`. Residuals of identities that scale with
//! `u₀` are divided by `‖u₀‖`.

use serde::Serialize;

use crate::error::Result;
use crate::finite_factor::{
    identity_residual, inner_product, vector_norm, FactorContext, LinearMap, MatrixElement,
};
use crate::modular_engine::{
    algebra_membership_residual, closed_form_delta, commutant_membership_residual, flow_operator, modular_conjugation_long_form,
    modular_objects, tomita_oracle,
};
use crate::scalar::Real;
use crate::vector_operator::{operator_from_vector, trace_condition};

/// One line of the verify report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub invariant: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(invariant: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self { invariant: invariant.into(), residual, tolerance, pass: residual.is_finite() && residual <= tolerance }
    }
}

/// Flow parameters sampled by `flow_preserves_algebra`.
pub const FLOW_TIMES: [f64; 4] = [-1.0, -0.5, 0.5, 1.0];

fn generators<T: Real>(n: usize) -> [MatrixElement<T>; 2] {
    [MatrixElement::clock(n), MatrixElement::shift(n)]
}

/// Runs every check on `u0`, which must be cyclic and separating.
pub fn verify_vector<T: Real>(u0: &MatrixElement<T>, ctx: &FactorContext<T>) -> Result<Vec<Check>> {
    let objects = modular_objects(u0, ctx)?;
    let oracle = tomita_oracle(u0, ctx)?;
    let n = ctx.n();
    let kappa = u0.condition_number().as_f64();
    let base = 100.0 * ctx.tol().as_f64();
    let tol1 = base * kappa;
    let tol2 = base * kappa * kappa;
    let u_norm = vector_norm(u0, ctx)?.as_f64();
    let rel = |x: &MatrixElement<T>, y: &MatrixElement<T>| -> Result<f64> {
        Ok(vector_norm(&(x - y), ctx)?.as_f64() / u_norm)
    };

    let mut checks = vec![
        Check::new("formula_vs_oracle_delta", objects.delta0.distance(&oracle.delta).as_f64(), tol2),
        Check::new("formula_vs_oracle_j", objects.j0.distance(&oracle.j).as_f64(), tol2),
    ];

    let mut tomita = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let e = MatrixElement::matrix_unit(n, i, j);
            let image = objects.s.apply(&(&e * u0))?;
            tomita = tomita.max(rel(&image, &(&e.adjoint() * u0))?);
        }
    }
    checks.push(Check::new("tomita_identity", tomita, tol1));

    checks.push(Check::new("delta_fixes_vector", rel(&objects.delta0.apply(u0)?, u0)?, tol2));
    checks.push(Check::new("conjugation_fixes_vector", rel(&objects.j0.apply(u0)?, u0)?, tol2));
    checks.push(Check::new("conjugation_involution", identity_residual(&(&objects.j0 * &objects.j0)).as_f64(), tol2));

    let inversion = match objects.delta0.try_inverse() {
        Some(inv) => {
            let jdj = &(&objects.j0 * &objects.delta0) * &objects.j0;
            (jdj.distance(&inv) / inv.op_norm()).as_f64()
        }
        None => f64::INFINITY,
    };
    checks.push(Check::new("modular_inversion", inversion, tol2));

    let mut flow = 0.0f64;
    for &t in &FLOW_TIMES {
        for a in generators::<T>(n) {
            let op = flow_operator(&objects.delta0, T::lit(t), &a, ctx)?;
            flow = flow.max((algebra_membership_residual(&op) / a.op_norm()).as_f64());
        }
    }
    checks.push(Check::new("flow_preserves_algebra", flow, tol2));

    let closed = closed_form_delta(u0, ctx)?;
    checks.push(Check::new(
        "closed_form_delta",
        (objects.delta0.distance(&closed) / objects.delta0.op_norm()).as_f64(),
        tol2,
    ));

    let mut commutant = 0.0f64;
    for a in generators::<T>(n) {
        let mapped = &(&objects.j0 * &LinearMap::left_multiplication(&a)) * &objects.j0;
        commutant = commutant.max((commutant_membership_residual(&mapped) / a.op_norm()).as_f64());
    }
    checks.push(Check::new("commutant_mapping", commutant, tol2));

    let long = modular_conjugation_long_form(&objects.v, ctx)?;
    checks.push(Check::new("conjugation_two_forms", objects.j0.distance(&long).as_f64(), tol2));

    let pair = operator_from_vector(u0, ctx)?;
    let (tts, tst) = trace_condition(&pair, ctx)?;
    let norm_sq = inner_product(u0, u0, ctx)?.re.as_f64();
    let trace = ((tts.as_f64() - norm_sq).abs()).max((tst.as_f64() - norm_sq).abs()) / norm_sq;
    checks.push(Check::new("trace_condition", trace, ctx.tol().as_f64()));

    Ok(checks)
}
