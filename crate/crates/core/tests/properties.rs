use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use fibertype::exactalg::{
    complete_unimodular, hnf, member, saturate, snf, IntMatrix, LatticeBasis,
};
use fibertype::invariants::{lcs_ranks, poincare};
use fibertype::layers::{build_layers, validate, Arrangement};

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-6i64..=6, c), r).prop_map(move |rows| {
            let rows: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            IntMatrix::from_i64(&rows)
        })
    })
}

fn is_unimodular(m: &IntMatrix) -> bool {
    m.det().map(|d| d.abs().is_one()).unwrap_or(false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hnf_is_a_unimodular_transform(m in matrix(4, 4)) {
        let (h, u) = hnf(&m);
        prop_assert_eq!(u.mul(&m).unwrap(), h.clone());
        prop_assert!(is_unimodular(&u));
        let mut last_pivot = None;
        for i in 0..h.rows() {
            match h.row(i).iter().position(|x| !x.is_zero()) {
                Some(p) => {
                    prop_assert!(h[(i, p)].is_positive());
                    prop_assert!(last_pivot.is_none_or(|q| p > q));
                    for k in 0..i {
                        prop_assert!(!h[(k, p)].is_negative() && h[(k, p)] < h[(i, p)]);
                    }
                    last_pivot = Some(p);
                }
                None => prop_assert!((i..h.rows()).all(|k| h.is_zero_row(k))),
            }
        }
    }

    #[test]
    fn snf_diagonalizes(m in matrix(4, 4)) {
        let t = snf(&m);
        let d = t.u.mul(&m).unwrap().mul(&t.v).unwrap();
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let expect = if i == j && i < t.rank { t.diagonal[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(&d[(i, j)], &expect);
            }
        }
        for w in t.diagonal.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        prop_assert!(is_unimodular(&t.u) && is_unimodular(&t.v));
        prop_assert_eq!(t.v.mul(&t.v_inv).unwrap(), IntMatrix::identity(m.cols()));
        prop_assert_eq!(t.rank, m.rank());
    }

    #[test]
    fn saturation_is_idempotent(m in matrix(3, 4)) {
        let (sat, _) = saturate(&m);
        let (again, torsion) = saturate(&sat.basis);
        prop_assert_eq!(again, sat.clone());
        prop_assert!(torsion.invariant_factors.is_empty());
        for i in 0..m.rows() {
            prop_assert!(sat.contains(m.row(i)));
        }
    }

    #[test]
    fn member_round_trips(m in matrix(3, 4), coeffs in prop::collection::vec(-5i64..=5, 3)) {
        let lat = LatticeBasis::span(&m);
        let c: Vec<BigInt> = coeffs.iter().take(lat.rank()).map(|&x| BigInt::from(x)).collect();
        let v = lat.basis.vec_mul(&c).unwrap();
        prop_assert_eq!(member(&v, &lat).unwrap(), Some(c));
    }

    #[test]
    fn completion_is_unimodular(m in matrix(3, 4)) {
        let (sat, _) = saturate(&m);
        let full = complete_unimodular(&sat).unwrap();
        prop_assert!(is_unimodular(&full));
        for i in 0..sat.rank() {
            prop_assert_eq!(full.row(i), sat.basis.row(i));
        }
    }

    #[test]
    fn mobius_sums_vanish(vs in prop::collection::vec((-3i64..=3, -3i64..=3), 1..=4), d in 0usize..=1) {
        let rows: Vec<[i64; 2]> = vs.iter().map(|&(a, b)| [a, b]).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let Ok(a) = Arrangement::from_i64(2, d, 2 - d, &refs) else { return Ok(()) };
        if validate(&a).clash.is_some() {
            return Ok(());
        }
        let lp = build_layers(&a).unwrap();
        let p = &lp.poset;
        let mu = p.mobius();
        for x in 0..p.len() {
            if x == p.bottom() {
                continue;
            }
            let s: BigInt = p.interval_below(x).iter().map(|&y| mu[y].clone()).sum();
            prop_assert!(s.is_zero());
        }
        let chi = p.char_poly().unwrap();
        prop_assert_eq!(chi.degree(), Some(p.max_height()));
        prop_assert!(chi.leading().is_one());
    }

    #[test]
    fn poincare_identities(a in prop::collection::vec(0i64..=5, 1..=4), d in 0usize..=2) {
        let a: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        let p = poincare(&a, d, 1).unwrap();
        if d > 0 {
            prop_assert!(p.coeff(0).is_one());
        }
        let expect: BigInt = a.iter().map(|x| BigInt::from(1u32 << d) + x).product();
        prop_assert_eq!(p.eval(&BigInt::one()), expect);
    }

    #[test]
    fn lcs_solution_exists(a in prop::collection::vec(0i64..=4, 1..=3)) {
        let a: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        let phi = lcs_ranks(&a, 6).unwrap();
        let sum: BigInt = a.iter().map(|x| x + 1).sum();
        prop_assert_eq!(&phi[0], &sum);
    }
}
