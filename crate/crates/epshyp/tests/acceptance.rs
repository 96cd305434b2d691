//! One PASS/FAIL line per acceptance criterion, written straight to stderr so
//! it shows up even when the harness captures output.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::io::Write;
use std::time::{Duration, Instant};

use epshyp::{pipeline, Config};
use epshyp_core::construction::{assemble_families, Assembly, SearchConfig};
use epshyp_core::criterion::{build_vector, make_rolewicz, refine_schedule, BuildConfig};
use epshyp_core::shift::{orbit_point, t_pow, u_pow, WeightedShift};
use epshyp_core::space::{add, dist, sub};
use epshyp_core::weights::{empirical_norm, m_bound, probes};
use epshyp_core::{InnerVec, NormSpec, OuterVec, Params};
use oracle::{l2, OracleSchedule};

const Q: NormSpec = NormSpec::P(2.0);
const BLOCK_IDENTITY_TOL: f64 = 1e-9;
const NORM_SLACK: f64 = 1e-9;
const TARGET_RELATIVE: f64 = 0.30;
const NON_HYP_SLACK: f64 = 1e-9;
const NON_HYP_RELATIVE: f64 = 0.045;
const EXACT_HIT: f64 = 1e-12;
const PRODUCT_RELATIVE: f64 = 0.35;
const FIRST_FACTOR_RELATIVE: f64 = 0.05;
const PROBES: usize = 200;

struct Outcome {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn emit(o: &Outcome) {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {} {verdict} {}: {}\n", o.id, o.name, o.detail);
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn params() -> Params {
    Params::new(0.3, 2.0, 3)
}

fn assembly(k: usize) -> Assembly {
    assemble_families(k, &params(), Q, Q, &SearchConfig::default(), &[]).unwrap()
}

fn oracle_for(asm: &Assembly) -> OracleSchedule {
    OracleSchedule::new(3, &asm.op.schedule.deltas)
}

fn block_identity() -> Outcome {
    let t = Instant::now();
    let asm = assembly(4);
    let o = oracle_for(&asm);
    let mut worst = 0.0f64;
    for k in 1..=4 {
        for p in (0..=20u128).chain([1, 4, 9, 16]) {
            let v = o.product(2.0, 1, o.nprime[k], &[(p, 1.0)]);
            worst = worst.max(oracle::l2_diff(&v, &[(p, 1.0)]));
        }
    }
    let el = t.elapsed();
    Outcome {
        id: 1,
        name: "block identity",
        pass: worst <= BLOCK_IDENTITY_TOL && el < Duration::from_secs(5),
        detail: format!("max residual {worst:e} (tol {BLOCK_IDENTITY_TOL:e}), deltas {:?}, {el:?}", asm.op.schedule.deltas),
    }
}

fn inverse_bound() -> Outcome {
    let asm = assembly(4);
    let o = oracle_for(&asm);
    let s = &asm.op.schedule;
    let sets: Vec<Vec<InnerVec>> = (1..=4).map(|k| probes(k, 20, PROBES, 11 + k as u64, Q)).collect();
    let (mut diag, mut rank) = (0.0f64, 0.0f64);
    let mut ok = true;
    for j in 1..=o.nprime[4] {
        let w = s.weight(j).unwrap();
        let r = o.weight(j);
        ok &= (w.k, w.sigma_exp, w.beta_exp) == (r.k, r.sigma, r.beta);
        let est = empirical_norm(|u| w.apply(2.0, u, true), &sets[r.k - 1], Q).unwrap();
        if r.kick == 0 {
            diag = diag.max(est);
        } else {
            rank = rank.max(est);
        }
    }
    Outcome {
        id: 2,
        name: "uniform inverse bound",
        pass: ok && diag <= 9.0 + NORM_SLACK && rank <= 8.0 + NORM_SLACK,
        detail: format!("diagonal max {diag} ≤ 9, rank-one max {rank} ≤ 8 over j ≤ {}", o.nprime[4]),
    }
}

fn product_bound() -> Outcome {
    let asm = assembly(4);
    let o = oracle_for(&asm);
    let m = m_bound(&params());
    let mut set = probes(1, 20, PROBES, 5, Q);
    for k in 1..=4u128 {
        set.push(InnerVec::unit(k * k));
        set.push(InnerVec::from_pairs([(0, 1.0), (k * k, -1.0)]));
    }
    let mut worst = 0.0f64;
    for u in &set {
        let x: Vec<(u128, f64)> = u.iter().collect();
        let nu = u.norm(Q);
        for v in o.prefix_norms(2.0, o.nprime[4], &x) {
            worst = worst.max(v / nu);
        }
    }
    Outcome {
        id: 3,
        name: "prefix product bound",
        pass: worst <= m + NORM_SLACK,
        detail: format!("max ‖S_j···S_1 u‖/‖u‖ = {worst} ≤ M(d) = {m} over j ≤ {}", o.nprime[4]),
    }
}

fn sequences() -> Outcome {
    let t = Instant::now();
    let asm = assembly(8);
    let o = oracle_for(&asm);
    let ratio_bound = params().perturbation_ratio();
    let (mut ratio, mut slack) = (0.0f64, f64::INFINITY);
    let mut ok = true;
    for k in 2..=8usize {
        let pair = asm.pair(k);
        let r = pair.v.norm(Q, Q) / pair.x.norm(Q, Q);
        ok &= r <= ratio_bound + 1e-12 && dist(&add(&pair.x, &pair.v), &pair.z, Q, Q) <= 1e-15;
        ratio = ratio.max(r);
        let bound = 0.5f64.powi(k as i32);
        for (j, zj) in pair.z.blocks() {
            let x: Vec<(u128, f64)> = zj.iter().collect();
            let res = l2(&o.product(2.0, j + 1, o.n[k] + j, &x));
            ok &= res <= bound;
            slack = slack.min(bound - res);
        }
    }
    let el = t.elapsed();
    Outcome {
        id: 4,
        name: "sequences x and z",
        pass: ok && el < Duration::from_secs(30),
        detail: format!("max ratio {ratio} ≤ {ratio_bound}, min residual slack {slack:e}, {el:?}"),
    }
}

fn eps_hypercyclic(b: &pipeline::Built) -> Outcome {
    let op = &b.asm.op;
    let mut worst = 0.0f64;
    let mut dominated = true;
    for row in &b.cert.rows {
        let mut best = f64::INFINITY;
        for &n in &b.cert.hit_times {
            let d = dist(&orbit_point(op, &b.cert.summands, n).unwrap(), &row.target, Q, Q);
            best = best.min(d / row.target.norm(Q, Q));
        }
        worst = worst.max(best);
        dominated &= row.achieved <= row.certified;
    }
    let n = b.cert.rows.len();
    Outcome {
        id: 5,
        name: "eps-hypercyclicity",
        pass: n == 20 && b.targets.iter().all(|t| !t.is_zero()) && worst <= TARGET_RELATIVE && dominated,
        detail: format!("{n} targets, worst relative error {worst:.4} ≤ {TARGET_RELATIVE}, certified dominates: {dominated}"),
    }
}

fn non_hypercyclic(b: &pipeline::Built) -> Outcome {
    let op = &b.asm.op;
    let m = m_bound(&params());
    let w = orbit_point(op, &b.cert.summands, 0).unwrap();
    let wmax = w.max_block_norm(Q);
    let mut ok = true;
    let mut rel = f64::INFINITY;
    for scale in [10.0, 100.0, 1000.0, 10000.0] {
        let lambda = scale * wmax;
        for n in 0..=200u128 {
            let (lhs, rhs) = op.non_hyp_lower_bound(&w, lambda, n).unwrap();
            ok &= rhs >= lhs - NON_HYP_SLACK;
            if scale == 10000.0 {
                rel = rel.min(rhs / lambda);
            }
        }
    }
    Outcome {
        id: 6,
        name: "non-hypercyclicity witness",
        pass: ok && rel >= NON_HYP_RELATIVE && 0.9 / m >= NON_HYP_RELATIVE - 1e-12,
        detail: format!("lower bound holds on grid: {ok}, min relative error at largest lambda {rel} ≥ {NON_HYP_RELATIVE}"),
    }
}

fn rolewicz(targets: &[OuterVec]) -> Outcome {
    let inst = make_rolewicz(Q, 2.0, 900, 0, &targets[..10], 8).unwrap();
    let mut picked: Vec<OuterVec> = Vec::new();
    for y in &inst.d2 {
        if picked.len() < 10 && !picked.contains(y) && inst.d2.iter().filter(|z| *z == y).count() >= 3 {
            picked.push(y.clone());
        }
    }
    let cert = build_vector(&inst, &picked, &BuildConfig::default()).unwrap();
    let mut worst = 0.0f64;
    for row in &cert.rows {
        let at = orbit_point(&inst.system, &cert.summands, row.time).unwrap();
        worst = worst.max(dist(&at, &row.target, Q, Q));
    }
    let (refined, _) = refine_schedule(&inst, 20).unwrap();
    let mut refine_ok = refined.times.len() == 20;
    for (k, (&m, y)) in refined.times.iter().zip(&refined.d2).enumerate() {
        let sy = u_pow(&inst.system, m, y).unwrap();
        let back = t_pow(&inst.system, m, &sy).unwrap();
        let bound = 1.0 / (k + 1) as f64;
        refine_ok &= inst.system.norm(&sy) <= bound && inst.system.norm(&sub(&back, y)) <= bound;
    }
    Outcome {
        id: 7,
        name: "Rolewicz criterion engine",
        pass: cert.rows.len() >= 10 && worst <= EXACT_HIT && refine_ok,
        detail: format!("{} exact-hit targets, max distance {worst:e}, refined 20 steps: {refine_ok}", cert.rows.len()),
    }
}

fn product_experiment(cfg: &Config) -> Outcome {
    let report = pipeline::product(cfg).unwrap();
    let sec = report.section("product").unwrap();
    let prod: Vec<f64> = sec.all("product_relative_error").map(|r| r.lhs).collect();
    let first: Vec<f64> = sec.all("first_factor_relative_error").map(|r| r.lhs).collect();
    let mut w_seen: Vec<&str> = sec.all("first_factor_relative_error").filter_map(|r| r.at.split(' ').next()).collect();
    w_seen.sort_unstable();
    w_seen.dedup();
    let decay: Vec<bool> = sec.all("rho_decay").map(|r| r.pass).collect();
    let pmax = prod.iter().copied().fold(0.0, f64::max);
    let fmax = first.iter().copied().fold(0.0, f64::max);
    Outcome {
        id: 8,
        name: "product experiment",
        pass: prod.len() == 10
            && w_seen.len() == 10
            && pmax <= PRODUCT_RELATIVE
            && fmax <= FIRST_FACTOR_RELATIVE
            && !decay.is_empty()
            && decay.iter().all(|&d| d),
        detail: format!(
            "product max {pmax:.4} ≤ {PRODUCT_RELATIVE} ({} targets), first factor max {fmax:e} ≤ {FIRST_FACTOR_RELATIVE} ({} W-targets, {} rows), rho decay on {} pairs",
            prod.len(),
            w_seen.len(),
            first.len(),
            decay.len()
        ),
    }
}

#[test]
fn acceptance() {
    let t = Instant::now();
    let cfg = Config::default();
    let mut all = vec![block_identity(), inverse_bound(), product_bound(), sequences()];
    let built = pipeline::build(&cfg).unwrap();
    all.push(eps_hypercyclic(&built));
    all.push(non_hypercyclic(&built));
    all.push(rolewicz(&built.targets));
    all.push(product_experiment(&cfg));
    let el = t.elapsed();
    let _ = std::io::stderr().write_all(b"\n");
    for o in &all {
        emit(o);
    }
    let _ = writeln!(std::io::stderr(), "acceptance total {el:?} (limit 120 s)");
    let failed: Vec<u8> = all.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
    assert!(el < Duration::from_secs(120));
}
