use ckp_core::brackets::bihamiltonian_residual;
use ckp_core::hierarchy::{flow, translation};
use ckp_core::jetring::{DiffPoly, FieldId};

fn j(f: FieldId, k: u32) -> DiffPoly {
    DiffPoly::jet(f, k)
}

fn c(n: i64, d: DiffPoly) -> DiffPoly {
    d.scale(&ckp_core::numkit::int(n))
}

fn uw_part() -> (DiffPoly, DiffPoly) {
    use FieldId::{U, W};
    // u_t = 2 w u_x + 2 u w_x - u_xx
    let ut = c(2, j(W, 0).mul(&j(U, 1))).add(&c(2, j(U, 0).mul(&j(W, 1)))).sub(&j(U, 2));
    // w_t = 2 w w_x + w_xx + ...
    let wt = c(2, j(W, 0).mul(&j(W, 1))).add(&j(W, 2));
    (ut, wt)
}

#[test]
fn second_flow_n0() {
    let f = flow(0, 2).unwrap();
    let (ut, wt) = uw_part();
    assert_eq!(f.velocity(FieldId::U).at_eps_one(), ut);
    assert_eq!(f.velocity(FieldId::W).at_eps_one(), wt.add(&c(2, j(FieldId::U, 1))));
}

#[test]
fn second_flow_n1() {
    let f = flow(1, 2).unwrap();
    let (ut, wt) = uw_part();
    assert_eq!(f.velocity(FieldId::V(1)).at_eps_one(), c(2, j(FieldId::U, 1)));
    assert_eq!(f.velocity(FieldId::U).at_eps_one(), ut);
    assert_eq!(f.velocity(FieldId::W).at_eps_one(), wt.add(&j(FieldId::V(1), 1)));
}

#[test]
fn first_flow_is_translation_up_to_n4() {
    for n in 0..=4 {
        let f = flow(n, 1).unwrap();
        for (fid, v) in translation(n) {
            assert_eq!(f.velocity(fid), &v, "n = {n}, {fid:?}");
        }
    }
}

#[test]
fn bihamiltonian_representation_n1() {
    for k in 1..=3 {
        let r = bihamiltonian_residual(1, k).unwrap();
        assert!(r.lax_flow.agrees_with(&r.first), "first bracket, k = {k}");
        assert!(r.lax_flow.agrees_with(&r.second), "second bracket, k = {k}");
    }
}
