use tautrec_core::exact_arith::{int, rat};
use tautrec_core::oracle::OracleTable;
use tautrec_core::trr::*;
use tautrec_core::{Engine, Rational};

#[test]
fn genus_one_two_markings() {
    let mut e = Engine::new();
    let r = trr_for_monomial(&mut e, 1, &[1, 0]).unwrap();
    assert!(is_normal_form(&r));
    assert_eq!(bouquet_coefficient(&mut e, &r).unwrap(), rat(1, 24));
    let t = rational_tail_coefficients(&mut e, &r).unwrap();
    assert!(t.aij.is_empty());
    assert_eq!(t.sum(), int(1));
    assert!(verify_relation(&mut e, &r, &mut OracleTable::new()).unwrap());
}

#[test]
fn genus_two_three_markings() {
    let mut e = Engine::new();
    let r = trr_for_monomial(&mut e, 2, &[1, 1, 0]).unwrap();
    assert!(is_normal_form(&r));
    let t = rational_tail_coefficients(&mut e, &r).unwrap();
    assert_eq!(t.sum(), Rational::from_integer(0.into()));
    assert_eq!(
        bouquet_coefficient(&mut e, &r).unwrap(),
        expected_bouquet_coefficient(&[1, 1, 0])
    );
    assert!(verify_relation(&mut e, &r, &mut OracleTable::new()).unwrap());
}
