use ckp_core::centralinv::{residue_identity_check, sample_generic, sweep, Gates, PipelineTables};

#[test]
fn invariants_equal_one_over_24() {
    for n in 0..=4 {
        let tables = PipelineTables::new(n).unwrap();
        let rows = sweep(n, 25, 7, Some(&tables), 1e-9).unwrap();
        assert_eq!(rows.len(), 25);
        for r in &rows {
            assert!(r.max_dev_closed <= 1e-9, "n = {n}: closed {}", r.max_dev_closed);
            assert!(r.max_dev_pipeline.unwrap() <= 1e-7, "n = {n}: pipeline {:?}", r.max_dev_pipeline);
            assert!(r.identities_ok, "n = {n}");
        }
    }
}

#[test]
fn residue_identities_hold() {
    for n in 0..=3 {
        for seed in 0..5 {
            let (p, f) = sample_generic(n, seed, &Gates::sampling()).unwrap();
            let rep = residue_identity_check(&f, &p);
            assert!(rep.ok(1e-9), "n = {n}, seed = {seed}: {rep:?}");
            if n > 0 {
                assert!(rep.unit_coefficient_sum_dev > 1e-6, "n = {n}: unit coefficient unexpectedly holds");
            }
        }
    }
}
