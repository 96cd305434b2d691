//! Config to certificates to report.

use std::time::Instant;

use epshyp_core::construction::{assemble_families, Assembly};
use epshyp_core::criterion::{
    build_product_vector, build_vector, make_rolewicz, shift_instance, product_focus, refine_schedule,
    CriterionInstance, HypVectorCertificate, Rolewicz,
};
use epshyp_core::shift::{orbit_trace, OrbitRow, ShiftOperator};
use epshyp_core::verify::{
    run_construction_suite, run_criterion_suite, run_dynamics_suite, run_product_suite, run_weight_suite, Report,
    ScheduleSummary, Section,
};
use epshyp_core::{Index, OuterVec};

use crate::config::Config;
use crate::CliError;

pub struct Built {
    pub asm: Assembly,
    pub inst: CriterionInstance<ShiftOperator>,
    pub cert: HypVectorCertificate,
    pub targets: Vec<OuterVec>,
}

#[derive(Default)]
struct Clock(Vec<(String, f64)>);

impl Clock {
    fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.0.push((label.to_string(), t.elapsed().as_secs_f64()));
        out
    }
}

fn built(cfg: &Config, clock: &mut Clock) -> Result<Built, CliError> {
    let params = cfg.params()?;
    let targets = cfg.targets();
    let asm = clock.time("assemble", || {
        assemble_families(cfg.blocks, &params, cfg.outer, cfg.inner, &cfg.search, &targets)
    })?;
    let inst = shift_instance(&asm, cfg.radius(&params));
    let cert = clock.time("build_vector", || build_vector(&inst, &targets, &cfg.build))?;
    Ok(Built { asm, inst, cert, targets })
}

pub fn build(cfg: &Config) -> Result<Built, CliError> {
    built(cfg, &mut Clock::default())
}

fn rolewicz_run(
    cfg: &Config,
    targets: &[OuterVec],
) -> Result<(CriterionInstance<Rolewicz>, HypVectorCertificate, Vec<epshyp_core::criterion::CheckRecord>), CliError> {
    let r = &cfg.rolewicz;
    let focus = &targets[..r.targets.min(targets.len())];
    let inst = make_rolewicz(cfg.inner, r.lambda, r.horizon, cfg.seed, focus, cfg.search.fresh_every)?;
    let mut scalar_targets: Vec<OuterVec> = Vec::new();
    for y in &inst.d2 {
        if scalar_targets.len() < r.targets && !scalar_targets.contains(y) && inst.d2.iter().filter(|z| *z == y).count() >= 3 {
            scalar_targets.push(y.clone());
        }
    }
    let cert = build_vector(&inst, &scalar_targets, &cfg.build)?;
    let (_, refine) = refine_schedule(&inst, r.refine_steps)?;
    Ok((inst, cert, refine))
}

/// Builds everything and runs every suite. Suites run in parallel on the
/// current rayon pool.
pub fn verify(cfg: &Config) -> Result<Report, CliError> {
    let mut clock = Clock::default();
    let params = cfg.params()?;
    let b = built(cfg, &mut clock)?;
    let (rinst, rcert, refine) = clock.time("rolewicz", || rolewicz_run(cfg, &b.targets))?;
    let t = Instant::now();
    let radius = cfg.radius(&params);
    let ((w, c), (dy, cr)) = rayon::join(
        || {
            rayon::join(
                || run_weight_suite(&b.asm.op, &cfg.weights),
                || run_construction_suite(&b.asm, (2, cfg.construction_blocks), radius, &b.targets),
            )
        },
        || {
            rayon::join(
                || run_dynamics_suite(&b.inst, &b.cert, Some((&rinst, &rcert)), &cfg.dynamics),
                || run_criterion_suite(&b.cert, &rcert, &refine, cfg.rolewicz.targets),
            )
        },
    );
    clock.0.push(("suites".to_string(), t.elapsed().as_secs_f64()));
    let mut construction = c?;
    for ch in &b.asm.choices {
        construction.report_only(
            "chosen_delta_worst_residual",
            format!("k={} delta={} evaluations={}", ch.k, ch.delta, ch.evaluations),
            ch.residuals.worst(),
            ch.residuals.threshold,
        );
    }
    Ok(Report {
        params: epshyp_core::Params { deltas: b.asm.op.schedule.deltas.clone(), ..params },
        schedule: ScheduleSummary::from(&b.asm.op.schedule),
        sections: vec![w?, construction, dy?, cr],
        targets: b.cert.rows.clone(),
        timing: clock.0,
    })
}

/// Rolewicz operator on the first factor, the weighted shift on the second.
pub fn product(cfg: &Config) -> Result<Report, CliError> {
    let mut clock = Clock::default();
    let params = cfg.params()?;
    let ps = &cfg.product;
    let all = cfg.targets();
    let v: Vec<OuterVec> = all.iter().take(ps.v_count).cloned().collect();
    let w = cfg.w_targets();
    if v.is_empty() || w.is_empty() {
        return Err(CliError::Config("product run needs V- and W-targets".into()));
    }
    let focus = product_focus(&v, w.len());
    let asm = clock.time("assemble", || {
        assemble_families(ps.blocks, &params, cfg.outer, cfg.inner, &cfg.search, &focus)
    })?;
    let inst = shift_instance(&asm, cfg.radius(&params));
    let hc = Rolewicz { lambda: ps.lambda, p: cfg.inner };
    let pt: Vec<(usize, usize)> = (0..w.len()).map(|l| (l, l % v.len())).collect();
    let pc = clock.time("build_product_vector", || {
        build_product_vector(&hc, &inst, &w, &v, &pt, &cfg.build, &ps.build)
    })?;
    let mut sec: Section = run_product_suite(&pc, &ps.suite);
    sec.notes.push(format!("{} pairs in diagonal order", pc.pairs.len()));
    Ok(Report {
        params: epshyp_core::Params { deltas: asm.op.schedule.deltas.clone(), ..params },
        schedule: ScheduleSummary::from(&asm.op.schedule),
        sections: vec![sec],
        targets: pc.y_certificate.rows.clone(),
        timing: clock.0,
    })
}

/// `‖T^n x̄ - z‖/‖z‖` for `n = 0..=n_max` and the certified target `z`,
/// followed by one row at the target's hit time when that lies beyond `n_max`.
pub fn orbit(cfg: &Config, target: usize, n_max: Index) -> Result<Vec<OrbitRow>, CliError> {
    let b = build(cfg)?;
    let z = b
        .targets
        .get(target)
        .ok_or_else(|| CliError::Config(format!("target {target} out of range 0..{}", b.targets.len())))?;
    let mut times: Vec<Index> = (0..=n_max).collect();
    let hit = b.cert.rows[target].time;
    if hit > n_max {
        times.push(hit);
    }
    Ok(orbit_trace(&b.asm.op, &b.cert.summands, z, times)?)
}
