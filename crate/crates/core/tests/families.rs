use fibertype::exactalg::IntMatrix;
use fibertype::families::{
    classical, deck_action, dowling_lower_copy, dowling_poset, finite_index_rewrite,
    graphic_arrangement, Classical, FiniteGroupTable, SimpleGraph,
};
use fibertype::layers::{build_layers, Arrangement};
use fibertype::ssolv::{strictly_supersolvable_chain, supersolvable_chain};

#[test]
fn graphic_triangle_is_partition_lattice() {
    let a = graphic_arrangement(&SimpleGraph::complete(3), 1, 1).unwrap();
    let lp = build_layers(&a).unwrap();
    let pi3 = classical(Classical::Partition, 3).unwrap();
    assert!(lp.poset.find_isomorphism(&pi3).is_some());
}

#[test]
fn graphic_path_and_square() {
    let path = graphic_arrangement(&SimpleGraph::path(3), 1, 1).unwrap();
    assert!(supersolvable_chain(&build_layers(&path).unwrap().poset)
        .unwrap()
        .is_some());
    let sq = graphic_arrangement(&SimpleGraph::cycle(4), 1, 1).unwrap();
    assert!(supersolvable_chain(&build_layers(&sq).unwrap().poset)
        .unwrap()
        .is_none());
}

#[test]
fn dowling_small_cases_strict() {
    let groups = [
        FiniteGroupTable::cyclic(1, 0),
        FiniteGroupTable::cyclic(2, 0),
        FiniteGroupTable::cyclic(2, 1),
        FiniteGroupTable::cyclic_regular(2),
        FiniteGroupTable::cyclic(3, 2),
    ];
    for g in &groups {
        for n in 1..=3 {
            let p = dowling_poset(n, g).unwrap();
            let c = strictly_supersolvable_chain(&p).unwrap();
            assert!(
                c.is_some(),
                "n = {n}, |G| = {}, |S| = {}",
                g.order(),
                g.set_size()
            );
            if n > 1 {
                let lower = dowling_lower_copy(&p, n);
                let lower_atoms: Vec<usize> = p
                    .atoms()
                    .iter()
                    .copied()
                    .filter(|a| lower.contains(a))
                    .collect();
                assert!(
                    fibertype::ssolv::is_tm_ideal(&p, &lower).is_ok(),
                    "{lower_atoms:?}"
                );
            }
        }
    }
}

#[test]
fn even_sublattice_quotient() {
    let a = Arrangement::from_i64(2, 1, 1, &[&[2, 0], &[0, 2], &[1, 1]]).unwrap();
    let basis = IntMatrix::from_i64(&[&[1, 1], &[1, -1]]);
    let p1 = build_layers(&a).unwrap();
    let down = finite_index_rewrite(&a, &basis).unwrap();
    let p2 = build_layers(&down).unwrap();
    let gens = deck_action(&p1, &basis).unwrap();
    assert_eq!(gens.len(), 1);
    let q = p1.poset.quotient(&gens).unwrap();
    assert!(q.poset.find_isomorphism(&p2.poset).is_some());
    q.check_join_formula(&p1.poset).unwrap();
    let s1 = supersolvable_chain(&p1.poset).unwrap().is_some();
    let s2 = supersolvable_chain(&p2.poset).unwrap().is_some();
    assert_eq!(s1, s2);
}
