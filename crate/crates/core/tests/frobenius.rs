use ckp_core::centralinv::{sample_generic, Gates, SamplePoint};
use ckp_core::frobenius::{flat_chart, frob_point, log_oracle, pencil_check, principal_flow, theta};
use ckp_core::numkit::int;

fn points(n: usize, count: u64) -> Vec<SamplePoint> {
    (0..count).map(|s| sample_generic(n, 100 + s, &Gates::sampling()).unwrap().0).collect()
}

#[test]
fn metric_and_multiplication() {
    for n in 0..=3 {
        for s in 0..3 {
            let (p, fr) = sample_generic(n, s, &Gates::sampling()).unwrap();
            let fp = frob_point(&p).unwrap();
            assert!(fp.metric_symmetric() && fp.c_symmetric(), "n = {n}");
            assert!(fp.associative(), "n = {n}");
            assert!(fp.compatibility_dev(&fr) < 1e-10, "n = {n}");
        }
    }
}

#[test]
fn flat_metric_constant_at_five_points() {
    for n in 1..=2 {
        let c = flat_chart(&points(n, 5)).unwrap();
        assert!(c.eta_constant && c.max_eta_dev < 1e-8, "n = {n}");
    }
    let c = flat_chart(&points(0, 5)).unwrap();
    assert_eq!(c.eta, vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
}

#[test]
fn pencil_matches_canonical_frame() {
    for n in 0..=3 {
        for s in 0..3 {
            let (p, fr) = sample_generic(n, s, &Gates::sampling()).unwrap();
            let r = pencil_check(&frob_point(&p).unwrap(), &fr).unwrap();
            assert!(r.ok(1e-8), "n = {n}, seed = {s}: {r:?}");
        }
    }
}

#[test]
fn principal_flows_match_lax_flows() {
    for n in 0..=2 {
        let p = &points(n, 1)[0];
        for m in 0..=1 {
            for j in 1..=n + 1 {
                let r = principal_flow(j, m, p).unwrap();
                assert!(r.agrees() && r.max_dev < 1e-8, "n = {n}, j = {j}, m = {m}");
            }
        }
    }
}

#[test]
fn log_theta_matches_contour_oracle() {
    for n in 0..=2 {
        for p in points(n, 3) {
            let t = theta(n + 2, 0, &p, 16).unwrap();
            let o = log_oracle(&p, 4096);
            let dev = ((t.value[0] - o.re).powi(2) + (t.value[1] - o.im).powi(2)).sqrt();
            assert!(dev < 1e-6, "n = {n}: {t:?} vs {o}");
        }
    }
}
