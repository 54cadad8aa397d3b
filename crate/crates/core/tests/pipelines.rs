use fibertype::layers::{build_layers, Arrangement};
use fibertype::poly::IntPolynomial;
use fibertype::ssolv::{strictly_supersolvable_chain, supersolvable_chain, tower_report};
use num_bigint::BigInt;

fn unimodular_triple() -> Arrangement {
    Arrangement::from_i64(2, 1, 1, &[&[1, 0], &[0, 1], &[1, 2]]).unwrap()
}

fn doubled_triple() -> Arrangement {
    Arrangement::from_i64(2, 1, 1, &[&[1, 0], &[0, 2], &[1, 2]]).unwrap()
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn unimodular_triple_layers_and_charpoly() {
    let lp = build_layers(&unimodular_triple()).unwrap();
    assert_eq!(lp.poset.len(), 6);
    assert_eq!(
        lp.poset.char_poly().unwrap(),
        IntPolynomial::from_i64(&[3, -3, 1])
    );
}

#[test]
fn doubled_triple_layers_and_chains() {
    let lp = build_layers(&doubled_triple()).unwrap();
    assert_eq!(lp.poset.len(), 7);
    assert_eq!(
        lp.poset.char_poly().unwrap(),
        IntPolynomial::from_i64(&[4, -4, 1])
    );
    let ss = supersolvable_chain(&lp.poset).unwrap().unwrap();
    assert_eq!(ss.a, vec![2, 2]);
    let strict = strictly_supersolvable_chain(&lp.poset).unwrap().unwrap();
    assert_eq!(strict.a, vec![2, 2]);
}

#[test]
fn unimodular_triple_tower() {
    let r = tower_report(&unimodular_triple()).unwrap();
    assert!(r.fiber_type);
    assert!(!r.strictly_supersolvable);
    assert_eq!(r.steps.len(), 2);
    assert_eq!(r.ell, big(&[1, 3]));
    assert_eq!(r.a, vec![1, 2]);
    assert!(r.kpi1);
    assert!(!r.section);
}

#[test]
fn doubled_triple_tower() {
    let r = tower_report(&doubled_triple()).unwrap();
    assert!(r.strictly_supersolvable);
    assert_eq!(r.ell, big(&[2, 2]));
    assert_eq!(r.a, vec![2, 2]);
    assert!(r.section && r.fadell_neuwirth_pullback);
    assert_eq!(r.pi1_free_ranks, Some(big(&[3, 3])));
}
