use ckp_core::hierarchy::{build_lax, Truncation};
use ckp_core::jetring::{dx_inverse, DiffPoly, EpsPoly, FieldId};
use ckp_core::numkit::int;
use ckp_core::pdo::{star, PDOp};
use proptest::prelude::*;

const FLOOR: i64 = -5;
const EPS: u32 = 3;

fn atom(i: usize) -> DiffPoly {
    use FieldId::{U, V, W};
    match i {
        0 => DiffPoly::one(),
        1 => DiffPoly::jet(U, 0),
        2 => DiffPoly::jet(W, 0),
        3 => DiffPoly::jet(V(1), 0),
        4 => DiffPoly::jet(U, 1),
        5 => DiffPoly::jet(W, 1),
        6 => DiffPoly::jet(U, 0).mul(&DiffPoly::jet(W, 0)),
        _ => DiffPoly::jet(W, 2),
    }
}

fn coeff() -> impl Strategy<Value = EpsPoly> {
    prop::collection::vec((0usize..8, -3i64..=3), 1..3).prop_map(|ts| {
        let d = ts.into_iter().fold(DiffPoly::zero(), |acc, (i, c)| acc.add(&atom(i).scale(&int(c))));
        EpsPoly::from(d).with_order(EPS)
    })
}

fn operator() -> impl Strategy<Value = PDOp> {
    prop::collection::vec((-3i64..=2, coeff()), 1..4).prop_map(|ts| PDOp::from_terms(ts, FLOOR))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn product_is_associative(a in operator(), b in operator(), c in operator()) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(left.agrees_with(&right));
    }

    #[test]
    fn symbol_map_is_a_homomorphism(a in operator(), b in operator()) {
        let prod = a.mul(&b).unwrap();
        let s = star(&a.symbol(), &b.symbol(), (2 - FLOOR) as u32 + 2);
        prop_assert!(prod.agrees_with(&s.to_pdo()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn commutator_residue_is_a_total_derivative(a in operator(), b in operator()) {
        let r = a.commutator(&b).unwrap().res().unwrap();
        let g = dx_inverse(&r).unwrap();
        prop_assert!(g.dx().agrees_with(&r));
    }
}

#[test]
fn root_power_recovers_lax_operator() {
    for n in 1..=3 {
        let lax = build_lax(n, Truncation { depth: 5, eps_order: 3 });
        let root = lax.root().unwrap();
        assert!(root.pow(n as u32 + 1).unwrap().agrees_with(&lax.l), "n = {n}");
    }
}

#[test]
fn comparison_detects_noncommutativity() {
    let u = PDOp::function(EpsPoly::field(FieldId::U).with_order(EPS));
    let d = PDOp::d().with_floor(FLOOR);
    assert!(!d.mul(&u).unwrap().agrees_with(&u.mul(&d).unwrap()));
    let dinv = PDOp::monomial(-1, EpsPoly::one(), FLOOR);
    assert!(!dinv.mul(&u).unwrap().agrees_with(&u.mul(&dinv).unwrap()));
}
