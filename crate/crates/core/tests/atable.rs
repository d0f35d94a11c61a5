use ckp_core::brackets::atable::{assemble, generating_atable, atable_closed, rtable_matches};
use ckp_core::numkit::{rat, RatF, Var};

#[test]
fn generating_table_equals_closed_forms() {
    for n in 1..=3 {
        for a in 1..=2u8 {
            let t = generating_atable(n, a, 2).unwrap();
            for (k, e) in t.entries.iter().enumerate() {
                assert_eq!(*e, atable_closed(n, a, k as u32), "n = {n}, a = {a}, k = {k}");
            }
            assert!(t.parity_holds(), "parity n = {n}, a = {a}");
            assert!(t.diagonal_regular(), "diagonal n = {n}, a = {a}");
        }
    }
}

#[test]
fn kernels_equal_closed_forms_and_are_regular() {
    for n in 1..=2 {
        for a in 1..=2u8 {
            for (r, slot, matches, regular) in rtable_matches(n, a, 2).unwrap() {
                assert!(matches, "n = {n}, a = {a}, r = {r}, {slot:?}");
                assert!(regular, "n = {n}, a = {a}, r = {r}, {slot:?}");
            }
        }
    }
}

#[test]
fn finite_and_infinite_contours_agree() {
    let t = generating_atable(1, 1, 2).unwrap();
    for r in 0..=2 {
        assert_eq!(assemble(&t.kernels, r, true).unwrap(), t.entries[r as usize]);
    }
}

#[test]
fn leading_entry_is_a_divided_difference() {
    // A_{0,0;1} = (lambda'(xi) - lambda'(zeta)) / (xi - zeta)
    let n = 1;
    let t = generating_atable(n, 1, 0).unwrap();
    let l = |v: Var| ckp_core::brackets::lambda(n, v).deriv(v);
    let dd = l(Var::XI).sub(&l(Var::ZETA)).mul(&RatF::var(Var::XI).sub(&RatF::var(Var::ZETA)).inv().unwrap());
    assert_eq!(t.entries[0], dd);
}

#[test]
fn spot_value() {
    let t = generating_atable(0, 1, 0).unwrap();
    let at = |v: Var| match v {
        Var::XI => Some(rat(2, 1)),
        Var::ZETA => Some(rat(3, 1)),
        Var::W => Some(rat(0, 1)),
        Var::U => Some(rat(1, 1)),
        _ => None,
    };
    let v = t.entries[0].partial_eval(&at).unwrap().as_constant().unwrap();
    assert_eq!(v, rat(5, 36));
}
