//! Acceptance criteria 1–9. Each criterion prints one PASS/FAIL line; the
//! process exits non-zero if any fails.

use std::process::ExitCode;

use modular_core::block_factor::{self, BlockOperator, BlockVector};
use modular_core::finite_factor::{identity_residual, inner_product, vector_norm, FactorContext, LinearMap, MatrixElement};
use modular_core::linalg;
use modular_core::modular_engine::{algebra_membership_residual, flow_operator, modular_objects, tomita_oracle};
use modular_core::sample::Sampler;
use modular_core::spectral::{
    cross_check_finite, equivalent, is_admissible, permute_multiplicities, second_class_exists, shift_multiplicity,
    DeltaSpectrum, FactorType, GeometricTail, Multiplicity, SpectralData,
};
use modular_core::vector_operator::{
    is_cyclic, is_separating, left_span_dimension, operator_from_vector, right_span_dimension, trace_condition,
};

type M = MatrixElement<f64>;

const SEED: u64 = 0x5eed_0001;
const FLOW_TIMES: [f64; 4] = [-1.0, -0.5, 0.5, 1.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ctx(n: usize) -> FactorContext<f64> {
    FactorContext::new(n).unwrap()
}

/// Shared sweep for criteria 1–3: 200 invertible `T` with `κ ≤ 1e3`, 50 for each `n`.
fn engine_sweep() -> Vec<(M, f64)> {
    let mut rng = Sampler::new(SEED);
    let mut out = Vec::with_capacity(200);
    for n in [2, 3, 4, 8] {
        for _ in 0..50 {
            let (t, _) = rng.invertible::<f64>(n, 1e3);
            let kappa = t.condition_number();
            out.push((t, kappa));
        }
    }
    out
}

/// Tracks the worst `residual / tolerance` over a sweep.
#[derive(Default)]
struct Worst {
    ratio: f64,
    label: String,
    failures: usize,
}

impl Worst {
    fn record(&mut self, label: &str, residual: f64, tolerance: f64) {
        let ratio = residual / tolerance;
        if !(residual <= tolerance) {
            self.failures += 1;
        }
        if !(ratio <= self.ratio) {
            self.ratio = ratio;
            self.label = label.to_string();
        }
    }

    fn summary(&self, cases: usize) -> Outcome {
        outcome(
            self.failures == 0,
            format!(
                "{cases} cases, {} violations, worst residual/tolerance {:.3e} ({})",
                self.failures, self.ratio, self.label
            ),
        )
    }
}

fn criterion_1(sweep: &[(M, f64)]) -> Outcome {
    let mut worst = Worst::default();
    for (t, kappa) in sweep {
        let ctx = ctx(t.dim());
        let objects = modular_objects(t, &ctx).unwrap();
        let oracle = tomita_oracle(t, &ctx).unwrap();
        let tol = 1e-8 * kappa * kappa;
        worst.record("delta", objects.delta0.distance(&oracle.delta), tol);
        worst.record("conjugation", objects.j0.distance(&oracle.j), tol);
    }
    worst.summary(sweep.len())
}

fn criterion_2(sweep: &[(M, f64)]) -> Outcome {
    let mut worst = Worst::default();
    for (t, kappa) in sweep {
        let n = t.dim();
        let ctx = ctx(n);
        let s = modular_objects(t, &ctx).unwrap().s;
        let mut residual = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let e = M::matrix_unit(n, i, j);
                let lhs = s.apply(&(&e * t)).unwrap();
                let rhs = &e.adjoint() * t;
                residual = residual.max(vector_norm(&(&lhs - &rhs), &ctx).unwrap());
            }
        }
        worst.record("S(E_ij u) - E_ij* u", residual, 1e-8 * kappa);
    }
    worst.summary(sweep.len())
}

fn criterion_3(sweep: &[(M, f64)]) -> Outcome {
    let mut worst = Worst::default();
    for (t, kappa) in sweep {
        let n = t.dim();
        let ctx = ctx(n);
        let tol = 1e-8 * kappa * kappa;
        let o = modular_objects(t, &ctx).unwrap();
        worst.record("delta u = u", vector_norm(&(&o.delta0.apply(t).unwrap() - t), &ctx).unwrap(), tol);
        worst.record("J u = u", vector_norm(&(&o.j0.apply(t).unwrap() - t), &ctx).unwrap(), tol);
        worst.record("J^2 = Id", identity_residual(&(&o.j0 * &o.j0)), tol);
        // Δ₀⁻¹ X = (T T*)⁻¹ X (T* T), built independently of Δ₀.
        let tts = t * &t.adjoint();
        let tst = &t.adjoint() * t;
        let tts_inv = M::new(linalg::inverse(tts.as_matrix()).unwrap()).unwrap();
        let inverse = &LinearMap::left_multiplication(&tts_inv) * &LinearMap::right_multiplication(&tst);
        let jdj = &(&o.j0 * &o.delta0) * &o.j0;
        worst.record("J delta J = delta^-1", jdj.distance(&inverse), tol);
        for &time in &FLOW_TIMES {
            for a in [M::clock(n), M::shift(n), t.clone()] {
                let op = flow_operator(&o.delta0, time, &a, &ctx).unwrap();
                worst.record("flow preserves algebra", algebra_membership_residual(&op) / a.op_norm(), tol);
            }
        }
    }
    worst.summary(sweep.len())
}

fn criterion_4() -> Outcome {
    let mut rng = Sampler::new(SEED + 4);
    let mut trace_failures = 0;
    let mut disagreements = 0;
    let mut ambiguous = 0;
    let mut deficient = 0;
    for k in 0..200 {
        let n = [2, 3, 4, 8][k % 4];
        let ctx = ctx(n);
        let u = if k < 50 {
            deficient += 1;
            let rank = rng.index(n);
            rng.rank_deficient::<f64>(n, rank)
        } else {
            rng.invertible::<f64>(n, 1e12).0
        };
        let pair = operator_from_vector(&u, &ctx).unwrap();
        let (tts, tst) = trace_condition(&pair, &ctx).unwrap();
        let norm_sq = inner_product(&u, &u, &ctx).unwrap().re;
        let ok = if norm_sq == 0.0 {
            tts == 0.0 && tst == 0.0
        } else {
            (tts - norm_sq).abs() <= 1e-10 * norm_sq && (tst - norm_sq).abs() <= 1e-10 * norm_sq
        };
        if !ok {
            trace_failures += 1;
        }
        if pair.is_ambiguous(&ctx) {
            ambiguous += 1;
            continue;
        }
        let full = n * n;
        let left = left_span_dimension(&u, ctx.tol()).unwrap() == full;
        let right = right_span_dimension(&u, ctx.tol()).unwrap() == full;
        if is_cyclic(&pair, &ctx) != left || is_separating(&pair, &ctx) != right {
            disagreements += 1;
        }
    }
    outcome(
        trace_failures == 0 && disagreements == 0 && deficient == 50,
        format!(
            "200 vectors ({deficient} rank-deficient), trace failures {trace_failures}, predicate disagreements {disagreements}, {ambiguous} in ambiguity band"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = Sampler::new(SEED + 5);
    let shapes = [(1, 1), (1, 16), (2, 2), (2, 8), (3, 4), (3, 8), (4, 4), (4, 8), (4, 12), (4, 16)];
    let mut inexact = 0;
    let mut trace_failures = 0;
    let mut worst_trace = 0.0f64;
    for k in 0..100 {
        let (n, size) = shapes[k % shapes.len()];
        let ctx = ctx(n);
        let grid = |rng: &mut Sampler| -> Vec<Vec<M>> {
            (0..size).map(|_| (0..size).map(|_| rng.matrix(n)).collect()).collect()
        };
        let u = BlockVector::new(n, grid(&mut rng)).unwrap();
        let t_u = block_factor::assemble_t_u(&u, &ctx).unwrap();
        if block_factor::reconstruct(&t_u, &ctx).unwrap() != u {
            inexact += 1;
        }
        let op = BlockOperator::new(n, grid(&mut rng)).unwrap();
        let (a, b) = block_factor::block_trace_formulas(&op, &ctx).unwrap();
        let rel = (a - b).norm() / a.norm().max(1.0);
        worst_trace = worst_trace.max(rel);
        if rel > 1e-10 {
            trace_failures += 1;
        }
    }
    let mut decaying = Vec::new();
    let ctx2 = ctx(2);
    for size in [2, 4, 8, 16] {
        let u = block_factor::decaying_vector(&ctx2, size).unwrap();
        decaying.push(block_factor::block_cyclic_separating(&u, &ctx2).unwrap() == (true, true));
    }
    let decaying_ok = decaying.iter().all(|&b| b);
    outcome(
        inexact == 0 && trace_failures == 0 && decaying_ok,
        format!(
            "100 block pairs, inexact reconstructions {inexact}, trace disagreements {trace_failures} (worst {worst_trace:.2e}), decaying vector cyclic+separating at N=2,4,8,16: {decaying:?}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = Sampler::new(SEED + 6);
    let mut infinite_true = 0;
    for _ in 0..500 {
        let s = rng.infinite(6);
        if second_class_exists(&s).unwrap() {
            infinite_true += 1;
        }
    }
    let mut finite_mismatch = 0;
    for k in 0..100 {
        let s = if k % 2 == 0 { rng.finite_type_i(8) } else { rng.finite_type_ii(6) };
        let direct: f64 = s.head().iter().map(|&(mu, m)| m / mu).sum();
        if second_class_exists(&s).unwrap() != direct.is_finite() {
            finite_mismatch += 1;
        }
    }
    outcome(
        infinite_true == 0 && finite_mismatch == 0,
        format!("500 infinite-type data with a second class: {infinite_true}; 100 finite data disagreeing with the direct sum: {finite_mismatch}"),
    )
}

fn criterion_7() -> Outcome {
    // Normalizing constants from the geometric series, summed term by term.
    let sum1: f64 = (0..60).map(|j| 10f64.powi(-j)).sum();
    let sum2: f64 = 1.0 + (0..30).map(|j| 10f64.powi(-(2 * j + 1))).sum::<f64>();
    let (c1, c2) = (9.0 / 10.0, 99.0 / 109.0);
    let constants_ok = (1.0 / sum1 - c1).abs() < 1e-15 && (1.0 / sum2 - c2).abs() < 1e-15;

    let s1 = SpectralData::new(FactorType::TypeIIInf, vec![], Some(GeometricTail { ratio: 0.1, mult: 1.0, start: c1 }))
        .unwrap();
    let s2 = SpectralData::new(
        FactorType::TypeIIInf,
        vec![(c2, 1.0)],
        Some(GeometricTail { ratio: 0.01, mult: 1.0, start: 0.1 * c2 }),
    )
    .unwrap();
    let target = DeltaSpectrum::lattice(10.0, Multiplicity::Infinite).unwrap();
    let a1 = is_admissible(&s1, &target, 40).unwrap().admissible;
    let a2 = is_admissible(&s2, &target, 40).unwrap().admissible;
    let distinct = !equivalent(&s1, &s2);

    let base = SpectralData::normalized(
        FactorType::TypeIIInf,
        vec![(1.0, 1.0), (0.1, 2.0)],
        Some(GeometricTail { ratio: 0.1, mult: 1.0, start: 0.01 }),
    )
    .unwrap();
    let permuted = permute_multiplicities(&base, 0, 1).unwrap();
    let shifted = shift_multiplicity(&base, 0, 1, 0.25).unwrap();
    let p_ok = is_admissible(&permuted, &target, 40).unwrap().admissible && !equivalent(&base, &permuted);
    let s_ok = is_admissible(&shifted, &target, 40).unwrap().admissible && !equivalent(&base, &shifted);
    outcome(
        constants_ok && a1 && a2 && distinct && p_ok && s_ok,
        format!(
            "c1 = 9/10 and c2 = 99/109 match series: {constants_ok}; admissible at cutoff 40: ({a1}, {a2}); inequivalent: {distinct}; permuted admissible+new: {p_ok}; shifted admissible+new: {s_ok}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = Sampler::new(SEED + 8);
    let ctx = ctx(1);
    let mut failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = rng.finite_type_i(8);
        let r = cross_check_finite(&s, &ctx).unwrap();
        worst = worst.max(r.max_rel_error);
        if !r.pass || r.tolerance > 1e-10 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("100 type I data, failures {failures}, worst relative eigenvalue error {worst:.2e}"))
}

fn criterion_9() -> Outcome {
    let mut rng = Sampler::new(SEED + 9);
    let mut violations = 0;
    for k in 0..200 {
        let s = match k % 3 {
            0 => rng.finite_type_ii(4),
            1 => rng.finite_type_i(6),
            _ => rng.infinite(4),
        };
        let other = rng.infinite(4);
        let (c1, c2) = (rng.log_uniform(0.1, 10.0), rng.log_uniform(0.1, 10.0));
        let t = s.rescaled(c1).unwrap();
        let u = t.rescaled(c2).unwrap();
        let laws = [
            equivalent(&s, &s),
            equivalent(&s, &t) == equivalent(&t, &s),
            equivalent(&s, &other) == equivalent(&other, &s),
            !(equivalent(&s, &t) && equivalent(&t, &u)) || equivalent(&s, &u),
            equivalent(&s, &t),
        ];
        violations += laws.iter().filter(|&&ok| !ok).count();
        for target in [modular_core::spectral::delta_spectrum(&s, 12).unwrap(), modular_core::spectral::delta_spectrum(&other, 12).unwrap()] {
            let before = is_admissible(&s, &target, 12).unwrap().admissible;
            let after = is_admissible(&t, &target, 12).unwrap().admissible;
            if before != after {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("200 triples, violations {violations}"))
}

fn main() -> ExitCode {
    let sweep = engine_sweep();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("formula route matches oracle within 1e-8 k^2", Box::new(|| criterion_1(&sweep))),
        ("Tomita identity within 1e-8 k", Box::new(|| criterion_2(&sweep))),
        ("modular identities within 1e-8 k^2", Box::new(|| criterion_3(&sweep))),
        ("trace condition and cyclic/separating predicates", Box::new(criterion_4)),
        ("block model", Box::new(criterion_5)),
        ("no second class for divergent multiplicity sums", Box::new(criterion_6)),
        ("two lattice classes, permuted and shifted data", Box::new(criterion_7)),
        ("counting formula against the matrix model", Box::new(criterion_8)),
        ("equivalence laws and scale invariance", Box::new(criterion_9)),
    ];
    let mut all = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        all &= o.pass;
        println!("{} criterion {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
