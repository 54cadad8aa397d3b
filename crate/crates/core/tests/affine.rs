use fibertype::affine::{
    affine_corpus, affine_ss_check, cone, decone, intersection_poset, AffineArrangement,
};
use fibertype::layers::{build_layers, Arrangement};

#[test]
fn corpus_verdicts_agree() {
    let corpus = affine_corpus();
    assert_eq!(corpus.len(), 20);
    for (name, a) in &corpus {
        let v = affine_ss_check(a).unwrap_or_else(|e| panic!("{name}: {e}"));
        eprintln!("{name}: {}", v.ss);
    }
}

#[test]
fn decone_inverts_cone_on_corpus() {
    for (_, a) in affine_corpus() {
        assert_eq!(decone(&cone(&a), 0).unwrap(), a);
    }
}

#[test]
fn semilattice_is_cone_minus_upset_of_h0() {
    for (name, a) in affine_corpus() {
        let ip = intersection_poset(&a).unwrap();
        let c = intersection_poset(&cone(&a)).unwrap();
        let keep: Vec<usize> = (0..c.poset.len())
            .filter(|&x| !c.containing[x].contains(&0))
            .collect();
        let (sub, _) = c.poset.induced(&keep).unwrap();
        assert!(sub.find_isomorphism(&ip.poset).is_some(), "{name}");
    }
}

#[test]
fn central_integer_arrangement_matches_layers() {
    let a = AffineArrangement::from_i64(
        2,
        &[(&[1, 0], 0), (&[0, 1], 0), (&[1, -1], 0), (&[1, 1], 0)],
    )
    .unwrap();
    let ip = intersection_poset(&a).unwrap();
    let t = Arrangement::from_i64(2, 0, 2, &[&[1, 0], &[0, 1], &[1, -1], &[1, 1]]).unwrap();
    let lp = build_layers(&t).unwrap();
    assert!(ip.poset.find_isomorphism(&lp.poset).is_some());
}
