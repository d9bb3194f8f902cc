use monogenic::basis::{enumerate_up_to, eval_basis_with};
use monogenic::bohr::{
    bohr_sup, derivative_bound_rhs, derivative_series_sum, majorant_radius,
    verify_derivative_bound, BohrVariant, MajorantConfig,
};
use monogenic::diff::{apply_d_fd, apply_hyperderivative_fd, riesz_residual, step_halving};
use monogenic::quadrature::{
    coordinate_orthogonality, gram_matrix, norm_table, GramPart, NormTable,
};
use monogenic::series::{sample_random, Constraint};
use monogenic::{
    exact_hyperderivative, Hyperderivative, LegendreConvention, Point3, ReducedQuaternion,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{checksum, num, Outcome};

pub const GRAM_TOL: f64 = 1e-8;
pub const FD_STEP: f64 = 1e-4;
pub const FD_TOL: f64 = 1e-6;
const ORDER_STEP: f64 = 2e-3;
const MIN_ORDER: f64 = 1.9;
const NOISE_FLOOR: f64 = 1e-9;
const MAJORANT_DEGREE: u32 = 12;
const SERIES_TERMS: u32 = 1000;

pub type CmdResult = Result<Outcome, String>;

fn core<T>(r: monogenic::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn table(config: &RunConfig, n_max: u32) -> Result<NormTable, String> {
    let rule = config.ball_rule()?;
    core(norm_table(n_max, &rule))
}

pub fn gram(config: &RunConfig) -> CmdResult {
    let rule = config.ball_rule()?;
    let nt = core(norm_table(config.n_max, &rule))?;
    let mut parts = Vec::new();
    let mut rows = Vec::new();
    let mut full_deviation = f64::INFINITY;
    for part in GramPart::ALL {
        let g = core(gram_matrix(config.n_max, &rule, &nt, part))?;
        let dev = g.max_deviation_from_identity();
        if part == GramPart::Full {
            full_deviation = dev;
        }
        parts.push(json!({
            "part": part.name(),
            "max_deviation_from_identity": dev,
            "max_off_diagonal": g.max_off_diagonal(),
        }));
        for i in 0..g.size() {
            for j in 0..g.size() {
                let target = if i == j { 1.0 } else { 0.0 };
                rows.push(vec![
                    part.name().to_string(),
                    g.indices[i].to_string(),
                    g.indices[j].to_string(),
                    num(g.get(i, j)),
                    num(g.get(i, j) - target),
                ]);
            }
        }
    }
    let coordinates = core(coordinate_orthogonality(config.n_max, &rule, &nt))?;
    let passed = full_deviation <= GRAM_TOL;
    Ok(Outcome {
        passed,
        norm_table_sha256: checksum(&nt),
        result: json!({
            "size": enumerate_up_to(config.n_max).len(),
            "tolerance": GRAM_TOL,
            "parts": parts,
            "coordinate_orthogonality": coordinates,
        }),
        csv_header: vec!["part", "row", "col", "value", "deviation"],
        csv_rows: rows,
    })
}

#[derive(Serialize)]
struct IndexResidual {
    index: String,
    max_d_residual: f64,
    max_riesz_residual: f64,
    min_order: Option<f64>,
    max_derivative_error: f64,
    failures: usize,
}

fn ball_points(seed: u64, count: usize, radius: f64) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = Point3::new(
            rng.gen_range(-radius..radius),
            rng.gen_range(-radius..radius),
            rng.gen_range(-radius..radius),
        );
        if p.norm() < radius {
            out.push(p);
        }
    }
    out
}

pub fn monogenicity(config: &RunConfig) -> CmdResult {
    let nt = table(config, config.n_max)?;
    let conv = if config.condon_shortley {
        LegendreConvention::CONDON_SHORTLEY
    } else {
        LegendreConvention::FERRERS
    };
    let points = ball_points(config.seed, config.points, 0.9);
    let indices = enumerate_up_to(config.n_max);
    let per_index: Vec<IndexResidual> = indices
        .par_iter()
        .map(|&idx| -> Result<IndexResidual, String> {
            let norm = core(nt.l2_norm(idx))?;
            let f = |p: Point3| {
                eval_basis_with(conv, idx, p)
                    .expect("valid index")
                    .scale(1.0 / norm)
            };
            let exact = core(exact_hyperderivative(idx))?;
            let mut r = IndexResidual {
                index: idx.to_string(),
                max_d_residual: 0.0,
                max_riesz_residual: 0.0,
                min_order: None,
                max_derivative_error: 0.0,
                failures: 0,
            };
            for &p in &points {
                let d = |h: f64| apply_d_fd(&f, p, h).map(|q| q.norm());
                let riesz = |h: f64| riesz_residual(&f, p, h).map(|v| v.magnitude());
                let dv = core(d(FD_STEP))?;
                let rv = core(riesz(FD_STEP))?;
                r.max_d_residual = r.max_d_residual.max(dv);
                r.max_riesz_residual = r.max_riesz_residual.max(rv);
                for residual in [&d as &dyn Fn(f64) -> monogenic::Result<f64>, &riesz] {
                    let halving = core(step_halving(ORDER_STEP, residual))?;
                    if !halving.at_noise_floor(NOISE_FLOOR) {
                        r.min_order = Some(
                            r.min_order
                                .map_or(halving.order, |o: f64| o.min(halving.order)),
                        );
                        if halving.order < MIN_ORDER {
                            r.failures += 1;
                        }
                    }
                }
                let want = match exact {
                    Hyperderivative::Zero => ReducedQuaternion::ZERO,
                    Hyperderivative::Multiple { factor, lower } => {
                        core(eval_basis_with(conv, lower, p))?.scale(factor / norm)
                    }
                };
                let fd = core(apply_hyperderivative_fd(&f, p, FD_STEP))?;
                let err = (fd - want.into()).norm();
                r.max_derivative_error = r.max_derivative_error.max(err);
                r.failures +=
                    usize::from(dv > FD_TOL) + usize::from(rv > FD_TOL) + usize::from(err > FD_TOL);
            }
            Ok(r)
        })
        .collect::<Result<_, _>>()?;

    let failures: usize = per_index.iter().map(|r| r.failures).sum();
    let max = |f: fn(&IndexResidual) -> f64| per_index.iter().map(f).fold(0.0, f64::max);
    let min_order = per_index
        .iter()
        .filter_map(|r| r.min_order)
        .fold(f64::INFINITY, f64::min);
    let rows = per_index
        .iter()
        .map(|r| {
            vec![
                r.index.clone(),
                num(r.max_d_residual),
                num(r.max_riesz_residual),
                r.min_order.map(num).unwrap_or_default(),
                num(r.max_derivative_error),
                r.failures.to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        passed: failures == 0,
        norm_table_sha256: checksum(&nt),
        result: json!({
            "step": FD_STEP,
            "tolerance": FD_TOL,
            "order_step": ORDER_STEP,
            "min_order_required": MIN_ORDER,
            "max_d_residual": max(|r| r.max_d_residual),
            "max_riesz_residual": max(|r| r.max_riesz_residual),
            "max_derivative_error": max(|r| r.max_derivative_error),
            "observed_order": if min_order.is_finite() { Some(min_order) } else { None },
            "failures": failures,
            "indices": per_index,
        }),
        csv_header: vec![
            "index",
            "max_d_residual",
            "max_riesz_residual",
            "min_order",
            "max_derivative_error",
            "failures",
        ],
        csv_rows: rows,
    })
}

#[derive(Serialize)]
struct BohrSweep {
    variant: BohrVariant,
    constraint: Constraint,
    radius: f64,
    values: Vec<(u64, f64)>,
    max: f64,
    failures: usize,
}

pub fn bohr(config: &RunConfig) -> CmdResult {
    let nt = table(config, config.n_max.max(MAJORANT_DEGREE))?;
    let seeds: Vec<u64> = config.seeds().collect();
    let mut sweeps = Vec::new();
    for (variant, constraint) in [
        (BohrVariant::GroupedByDegree, Constraint::ZeroAtOrigin),
        (BohrVariant::Termwise, Constraint::OrthogonalToHholo),
    ] {
        let radius = variant.reference_radius();
        let values: Vec<(u64, f64)> = seeds
            .par_iter()
            .map(|&seed| {
                let s = core(sample_random(seed, config.n_max, constraint, 1.0, &nt))?;
                Ok((
                    seed,
                    core(bohr_sup(&s, radius, variant, &nt, config.samples))?,
                ))
            })
            .collect::<Result<_, String>>()?;
        let max = values.iter().map(|v| v.1).fold(0.0, f64::max);
        let failures = values.iter().filter(|v| v.1 >= 1.0).count();
        sweeps.push(BohrSweep {
            variant,
            constraint,
            radius,
            values,
            max,
            failures,
        });
    }
    let majorant_config = MajorantConfig::default();
    let radii = [BohrVariant::GroupedByDegree, BohrVariant::Termwise]
        .into_iter()
        .map(|v| core(majorant_radius(v, &nt, &majorant_config)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::new();
    for sw in &sweeps {
        for &(seed, v) in &sw.values {
            rows.push(vec![
                "sweep".into(),
                format!("{:?}", sw.variant),
                seed.to_string(),
                num(sw.radius),
                num(v),
                (v < 1.0).to_string(),
            ]);
        }
    }
    for r in &radii {
        rows.push(vec![
            "majorant_radius".into(),
            format!("{:?}", r.variant),
            String::new(),
            num(r.paper_reference_value),
            num(r.computed_radius),
            String::new(),
        ]);
    }
    let failures: usize = sweeps.iter().map(|s| s.failures).sum();
    Ok(Outcome {
        passed: failures == 0,
        norm_table_sha256: checksum(&nt),
        result: json!({ "sweeps": sweeps, "majorant": radii, "failures": failures }),
        csv_header: vec!["record", "variant", "seed", "r", "value", "holds"],
        csv_rows: rows,
    })
}

pub fn derivative(config: &RunConfig) -> CmdResult {
    let nt = table(config, config.n_max)?;
    let mut cases = Vec::new();
    for (class, constraint) in [
        ("general", Constraint::None),
        ("orthogonal", Constraint::OrthogonalToHholo),
    ] {
        let reports: Vec<_> = config
            .seeds()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&seed| {
                let s = core(sample_random(seed, config.n_max, constraint, 1.0, &nt))?;
                Ok((
                    seed,
                    core(verify_derivative_bound(
                        &s,
                        &config.radii,
                        &nt,
                        config.samples,
                    ))?,
                ))
            })
            .collect::<Result<_, String>>()?;
        cases.push((class, reports));
    }

    let mut identity = Vec::new();
    let mut grid: Vec<f64> = vec![0.0];
    grid.extend(config.radii.iter().copied().filter(|&r| r != 0.0));
    for r in grid {
        let sum = core(derivative_series_sum(r, SERIES_TERMS))?;
        let closed = core(derivative_bound_rhs(r, 1.0, 0.0))?;
        let rel = ((sum.sum - closed) / closed).abs();
        identity.push(json!({
            "r": r, "sum": sum.sum, "remainder": sum.remainder, "closed_form": closed,
            "relative_error": rel, "holds": rel <= 1e-8,
        }));
    }

    let mut rows = Vec::new();
    let mut violations = 0;
    for (class, reports) in &cases {
        for (seed, rep) in reports {
            violations += rep.violations;
            for row in &rep.rows {
                rows.push(vec![
                    class.to_string(),
                    seed.to_string(),
                    num(row.r),
                    num(row.lhs),
                    num(row.rhs),
                    num(row.slack),
                    row.holds.to_string(),
                    row.rhs_with_f0.map(num).unwrap_or_default(),
                    row.holds_with_f0.map(|b| b.to_string()).unwrap_or_default(),
                ]);
            }
        }
    }
    let identity_ok = identity.iter().all(|v| v["holds"] == true);
    let result = json!({
        "series_terms": SERIES_TERMS,
        "violations": violations,
        "series_identity": identity,
        "cases": cases.iter().map(|(class, reports)| json!({
            "class": class,
            "reports": reports.iter().map(|(seed, rep)| json!({"seed": seed, "report": rep})).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        passed: violations == 0 && identity_ok,
        norm_table_sha256: checksum(&nt),
        result,
        csv_header: vec![
            "class",
            "seed",
            "r",
            "lhs",
            "rhs",
            "slack",
            "holds",
            "rhs_with_f0",
            "holds_with_f0",
        ],
        csv_rows: rows,
    })
}
