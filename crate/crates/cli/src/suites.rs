use ckp_core::brackets::atable::{generating_atable, atable_closed, rtable_matches};
use ckp_core::brackets::bihamiltonian_residual;
use ckp_core::centralinv::{sample_generic, sweep, Gates, PipelineTables, SamplePoint};
use ckp_core::frobenius::{flat_chart, frob_point, log_oracle, pencil_check, principal_flow, theta};
use ckp_core::hierarchy::{build_lax, flow_with, translation, Truncation};
use ckp_core::jetring::{dx_inverse, DiffPoly, EpsPoly, FieldId};
use ckp_core::numkit::int;
use ckp_core::pdo::{star, PDOp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{RunConfig, Suite};
use crate::report::Check;

pub fn run(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for s in Suite::ALL {
        if !cfg.runs(s) {
            continue;
        }
        match s {
            Suite::Atable => atable(cfg, &mut out),
            Suite::Rtable => rtable(cfg, &mut out),
            Suite::Flows => flows(cfg, &mut out),
            Suite::Bihamiltonian => bihamiltonian(cfg, &mut out),
            Suite::Pdo => pdo(cfg, &mut out),
            Suite::Cinv | Suite::Identities => {}
            Suite::Frobenius => frobenius(cfg, &mut out),
        }
    }
    if cfg.runs(Suite::Cinv) || cfg.runs(Suite::Identities) {
        let mut sweep_checks = cinv(cfg);
        sweep_checks.retain(|c| cfg.suites.iter().any(|s| s.name() == c.suite));
        let at = out.iter().position(|c| c.suite == Suite::Frobenius.name()).unwrap_or(out.len());
        out.splice(at..at, sweep_checks);
    }
    out
}

fn atable(cfg: &RunConfig, out: &mut Vec<Check>) {
    let s = Suite::Atable;
    for n in cfg.n.clamp(1, 3) {
        for a in 1..=2u8 {
            let id = |x: &str| format!("atable.{x}.a{a}");
            match generating_atable(n, a, cfg.kmax) {
                Ok(t) => {
                    let ok = t.entries.iter().enumerate().all(|(k, e)| *e == atable_closed(n, a, k as u32));
                    out.push(Check::exact(s, id("closed_form"), Some(n), ok));
                    out.push(Check::exact(s, id("parity"), Some(n), t.parity_holds()));
                    out.push(Check::exact(s, id("diagonal_regular"), Some(n), t.diagonal_regular()));
                }
                Err(e) => out.push(Check::error(s, id("closed_form"), Some(n), e)),
            }
        }
    }
}

fn rtable(cfg: &RunConfig, out: &mut Vec<Check>) {
    let s = Suite::Rtable;
    for n in cfg.n.clamp(1, 2) {
        for a in 1..=2u8 {
            match rtable_matches(n, a, cfg.kmax) {
                Ok(rows) => {
                    out.push(Check::exact(s, format!("rtable.closed_form.a{a}"), Some(n), rows.iter().all(|r| r.2)));
                    out.push(Check::exact(s, format!("rtable.diagonal_regular.a{a}"), Some(n), rows.iter().all(|r| r.3)));
                }
                Err(e) => out.push(Check::error(s, format!("rtable.closed_form.a{a}"), Some(n), e)),
            }
        }
    }
}

fn jet(f: FieldId, k: u32) -> DiffPoly {
    DiffPoly::jet(f, k)
}

/// The displayed second flows at `epsilon = 1`.
fn second_flow_golden(n: usize) -> Vec<(FieldId, DiffPoly)> {
    use FieldId::{U, V, W};
    let two = |d: DiffPoly| d.scale(&int(2));
    let ut = two(jet(W, 0).mul(&jet(U, 1))).add(&two(jet(U, 0).mul(&jet(W, 1)))).sub(&jet(U, 2));
    let wt = two(jet(W, 0).mul(&jet(W, 1))).add(&jet(W, 2));
    if n == 0 {
        vec![(U, ut), (W, wt.add(&two(jet(U, 1))))]
    } else {
        vec![(V(1), two(jet(U, 1))), (U, ut), (W, wt.add(&jet(V(1), 1)))]
    }
}

fn flows(cfg: &RunConfig, out: &mut Vec<Check>) {
    let s = Suite::Flows;
    let trunc = |k: u32| Truncation { depth: cfg.depth.max(k as usize + 4), eps_order: cfg.eps_order.max(k) };
    for n in cfg.n.clamp(0, 1) {
        match flow_with(n, 2, trunc(2)) {
            Ok(f) => {
                let ok = second_flow_golden(n).iter().all(|(fid, g)| f.velocity(*fid).at_eps_one() == *g);
                out.push(Check::exact(s, "flows.golden_t2", Some(n), ok));
            }
            Err(e) => out.push(Check::error(s, "flows.golden_t2", Some(n), e)),
        }
    }
    for n in cfg.n.iter() {
        match flow_with(n, 1, trunc(1)) {
            Ok(f) => {
                let ok = translation(n).iter().all(|(fid, v)| f.velocity(*fid) == v);
                out.push(Check::exact(s, "flows.t1_translation", Some(n), ok));
            }
            Err(e) => out.push(Check::error(s, "flows.t1_translation", Some(n), e)),
        }
    }
}

fn bihamiltonian(cfg: &RunConfig, out: &mut Vec<Check>) {
    let s = Suite::Bihamiltonian;
    for n in cfg.n.clamp(1, 1) {
        for k in 1..=3 {
            match bihamiltonian_residual(n, k) {
                Ok(r) => {
                    out.push(Check::exact(s, format!("bihamiltonian.first.k{k}"), Some(n), r.lax_flow.agrees_with(&r.first)));
                    out.push(Check::exact(s, format!("bihamiltonian.second.k{k}"), Some(n), r.lax_flow.agrees_with(&r.second)));
                }
                Err(e) => out.push(Check::error(s, format!("bihamiltonian.k{k}"), Some(n), e)),
            }
        }
    }
}

const PDO_FLOOR: i64 = -5;

fn random_coeff(rng: &mut ChaCha8Rng) -> EpsPoly {
    use FieldId::{U, V, W};
    let atoms = [
        DiffPoly::one(),
        jet(U, 0),
        jet(W, 0),
        jet(V(1), 0),
        jet(U, 1),
        jet(W, 1),
        jet(U, 0).mul(&jet(W, 0)),
        jet(W, 2),
    ];
    let mut d = DiffPoly::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let c = rng.gen_range(-3i64..=3);
        d = d.add(&atoms[rng.gen_range(0..atoms.len())].scale(&int(c)));
    }
    EpsPoly::from(d).with_order(3)
}

fn random_operator(rng: &mut ChaCha8Rng) -> PDOp {
    let terms: Vec<(i64, EpsPoly)> = (0..rng.gen_range(1..=3)).map(|_| (rng.gen_range(-3i64..=2), random_coeff(rng))).collect();
    PDOp::from_terms(terms, PDO_FLOOR)
}

fn pdo(cfg: &RunConfig, out: &mut Vec<Check>) {
    let s = Suite::Pdo;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut failures = 0;
    let trials = 20;
    for _ in 0..trials {
        let (a, b, c) = (random_operator(&mut rng), random_operator(&mut rng), random_operator(&mut rng));
        let ok = match (a.mul(&b).and_then(|ab| ab.mul(&c)), b.mul(&c).and_then(|bc| a.mul(&bc))) {
            (Ok(l), Ok(r)) => l.agrees_with(&r),
            _ => false,
        };
        failures += usize::from(!ok);
    }
    out.push(Check::exact(s, "pdo.associativity", None, failures == 0).with_detail(format!("{trials} triples")));

    failures = 0;
    for _ in 0..trials {
        let (a, b) = (random_operator(&mut rng), random_operator(&mut rng));
        let sym = star(&a.symbol(), &b.symbol(), (2 - PDO_FLOOR) as u32 + 2);
        failures += usize::from(!a.mul(&b).map_or(false, |p| p.agrees_with(&sym.to_pdo())));
    }
    out.push(Check::exact(s, "pdo.symbol_homomorphism", None, failures == 0).with_detail(format!("{trials} pairs")));

    failures = 0;
    let pairs = 50;
    for _ in 0..pairs {
        let (a, b) = (random_operator(&mut rng), random_operator(&mut rng));
        let ok = a
            .commutator(&b)
            .ok()
            .and_then(|c| c.res().ok())
            .map_or(false, |r| dx_inverse(&r).map_or(false, |g| g.dx().agrees_with(&r)));
        failures += usize::from(!ok);
    }
    out.push(Check::exact(s, "pdo.commutator_residue_exact", None, failures == 0).with_detail(format!("{pairs} pairs")));

    for n in cfg.n.clamp(1, 3) {
        let lax = build_lax(n, Truncation { depth: 5, eps_order: 3 });
        let ok = lax.root().and_then(|r| r.pow(n as u32 + 1)).map_or(false, |p| p.agrees_with(&lax.l));
        out.push(Check::exact(s, "pdo.root_power", Some(n), ok));
    }
}

fn cinv(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    for n in cfg.n.iter() {
        let rows = PipelineTables::new(n).map_err(|e| e.to_string()).and_then(|t| {
            sweep(n, cfg.samples, cfg.seed, Some(&t), cfg.tol.closed).map_err(|e| e.to_string())
        });
        match rows {
            Ok(rows) => {
                let closed = rows.iter().map(|r| r.max_dev_closed).fold(0.0, f64::max);
                let pipe = rows.iter().map(|r| r.max_dev_pipeline.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
                let ids = rows.iter().map(|r| r.identity_dev).fold(0.0, f64::max);
                let detail = format!("{} points", rows.len());
                out.push(Check::within(Suite::Cinv, "cinv.closed_form", Some(n), closed, cfg.tol.closed).with_detail(detail.clone()));
                out.push(Check::within(Suite::Cinv, "cinv.pipeline", Some(n), pipe, cfg.tol.pipeline).with_detail(detail.clone()));
                out.push(Check::within(Suite::Identities, "identities.residue", Some(n), ids, cfg.tol.closed).with_detail(detail));
            }
            Err(e) => {
                out.push(Check::error(Suite::Cinv, "cinv.closed_form", Some(n), &e));
                out.push(Check::error(Suite::Identities, "identities.residue", Some(n), &e));
            }
        }
    }
    out
}

pub fn frobenius_points(n: usize, count: usize, seed: u64) -> Result<Vec<SamplePoint>, String> {
    (0..count as u64)
        .map(|i| {
            sample_generic(n, seed.wrapping_mul(1_000_003).wrapping_add(500 + i), &Gates::sampling())
                .map(|(p, _)| p)
                .map_err(|e| e.to_string())
        })
        .collect()
}

fn frobenius(cfg: &RunConfig, out: &mut Vec<Check>) {
    let s = Suite::Frobenius;
    let count = cfg.samples.clamp(2, 5);
    for n in cfg.n.clamp(0, 3) {
        let gates = Gates::sampling();
        let mut sym = true;
        let mut assoc = true;
        let mut compat: f64 = 0.0;
        let mut pencil: f64 = 0.0;
        let mut oracle: f64 = 0.0;
        let mut err = None;
        for i in 0..count as u64 {
            let r = sample_generic(n, cfg.seed.wrapping_mul(1_000_003).wrapping_add(500 + i), &gates)
                .map_err(|e| e.to_string())
                .and_then(|(p, fr)| {
                    let fp = frob_point(&p).map_err(|e| e.to_string())?;
                    sym &= fp.metric_symmetric() && fp.c_symmetric();
                    assoc &= fp.associative();
                    compat = compat.max(fp.compatibility_dev(&fr));
                    let pr = pencil_check(&fp, &fr).map_err(|e| e.to_string())?;
                    pencil = pencil.max(pr.root_dev).max(pr.diagonal_dev).max(pr.off_diagonal);
                    let t = theta(n + 2, 0, &p, 16).map_err(|e| e.to_string())?;
                    let o = log_oracle(&p, 4096);
                    oracle = oracle.max(((t.value[0] - o.re).powi(2) + (t.value[1] - o.im).powi(2)).sqrt());
                    Ok(())
                });
            if let Err(e) = r {
                err = Some(e);
                break;
            }
        }
        if let Some(e) = err {
            out.push(Check::error(s, "frobenius.point", Some(n), e));
            continue;
        }
        out.push(Check::exact(s, "frobenius.symmetry", Some(n), sym));
        out.push(Check::exact(s, "frobenius.associativity", Some(n), assoc));
        out.push(Check::within(s, "frobenius.compatibility", Some(n), compat, cfg.tol.frobenius));
        out.push(Check::within(s, "frobenius.pencil", Some(n), pencil, cfg.tol.frobenius));
        out.push(Check::within(s, "frobenius.log_theta_oracle", Some(n), oracle, cfg.tol.oracle));
        match frobenius_points(n, count, cfg.seed).and_then(|p| flat_chart(&p).map_err(|e| e.to_string())) {
            Ok(c) => out.push(
                Check::within(s, "frobenius.eta_constant", Some(n), c.max_eta_dev, cfg.tol.frobenius)
                    .with_detail(format!("exact: {}", c.eta_constant)),
            ),
            Err(e) => out.push(Check::error(s, "frobenius.eta_constant", Some(n), e)),
        }
        if n <= 2 {
            let p = match frobenius_points(n, 1, cfg.seed) {
                Ok(p) => p,
                Err(e) => {
                    out.push(Check::error(s, "frobenius.principal_flow", Some(n), e));
                    continue;
                }
            };
            for m in 0..=1 {
                for j in 1..=n + 1 {
                    let id = format!("frobenius.principal_flow.j{j}.m{m}");
                    match principal_flow(j, m, &p[0]) {
                        Ok(r) => out.push(
                            Check::within(s, id, Some(n), r.max_dev, cfg.tol.frobenius)
                                .with_detail(format!("t_{} x {}", r.lax_index, r.prefactor)),
                        ),
                        Err(e) => out.push(Check::error(s, id, Some(n), e)),
                    }
                }
            }
        }
    }
}
