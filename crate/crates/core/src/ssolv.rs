//! M-ideals, TM-ideals and the search for (strictly) supersolvable chains.

use std::collections::{BTreeSet, HashSet};

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::exactalg::{member, LatticeBasis};
use crate::layers::{
    admissible_from_corank1, build_layers, c_of, validate, Arrangement, Layer, LayerError,
    LayerPoset,
};
use crate::poset::{FinitePoset, PosetError};

/// First failed condition found when checking an ideal.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealViolation {
    #[error("not an order ideal: {below} < {x} is missing")]
    NotOrderIdeal { x: usize, below: usize },
    #[error("not pure: maximal elements {a} and {b} have different ranks")]
    NotPure { a: usize, b: usize },
    #[error("not join-closed: {join} is a join of {x} and {y} outside the ideal")]
    NotJoinClosed { x: usize, y: usize, join: usize },
    #[error("atom {atom} has no upper bound in common with {y}")]
    MissingJoin { y: usize, atom: usize },
    #[error("atom {atom} and {y} have {count} minimal upper bounds")]
    NonUniqueJoin { y: usize, atom: usize, count: usize },
    #[error("no maximal element of the ideal is modular below {maximal}")]
    NoModularMaximum { maximal: usize },
    #[error("not a subset of the atoms")]
    NotAtoms,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SsError {
    #[error("poset is not locally geometric")]
    NotLocallyGeometric,
    #[error("poset is not geometric")]
    NotGeometric,
    #[error("poset is not pure")]
    Impure,
    #[error("ideal rejected: {0}")]
    Ideal(IdealViolation),
    #[error("the atom-pair test and the M-ideal test disagree on atoms {0:?}")]
    NiceMDisagreement(Vec<usize>),
    #[error("search produced a chain that fails verification: {0}")]
    CertificateRejected(ChainViolation),
    #[error("chain element {level} has no maximal element below the previous one")]
    BrokenTower { level: usize },
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Layer(#[from] LayerError),
}

/// A pure, join-closed order ideal with its atoms and maximal elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderIdeal {
    pub elements: Vec<usize>,
    pub atoms: Vec<usize>,
    pub maximal: Vec<usize>,
    pub rank: usize,
}

impl OrderIdeal {
    pub fn bitset(&self, n: usize) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &x in &self.elements {
            b.insert(x);
        }
        b
    }
}

/// The order ideal generated by an atom set: every element whose atoms all lie
/// in `atoms`. Fails when it is not pure or not join-closed.
pub fn ideal_from_atoms(p: &FinitePoset, atoms: &[usize]) -> Result<OrderIdeal, IdealViolation> {
    if atoms.iter().any(|a| !p.atoms().contains(a)) {
        return Err(IdealViolation::NotAtoms);
    }
    let q = p.ideal_of_atoms(atoms);
    check_pure(p, &q)?;
    check_join_closed(p, &q)?;
    Ok(describe(p, &q))
}

fn describe(p: &FinitePoset, q: &FixedBitSet) -> OrderIdeal {
    let maximal = p.maximal_of(q);
    OrderIdeal {
        elements: q.ones().collect(),
        atoms: p
            .atoms()
            .iter()
            .copied()
            .filter(|&a| q.contains(a))
            .collect(),
        rank: maximal.iter().map(|&x| p.height(x)).max().unwrap_or(0),
        maximal,
    }
}

fn check_order_ideal(p: &FinitePoset, q: &FixedBitSet) -> Result<(), IdealViolation> {
    for x in q.ones() {
        if let Some(&b) = p.lower_covers(x).iter().find(|&&b| !q.contains(b)) {
            return Err(IdealViolation::NotOrderIdeal { x, below: b });
        }
    }
    Ok(())
}

fn check_pure(p: &FinitePoset, q: &FixedBitSet) -> Result<(), IdealViolation> {
    let m = p.maximal_of(q);
    if let Some(&b) = m.iter().find(|&&b| p.height(b) != p.height(m[0])) {
        return Err(IdealViolation::NotPure { a: m[0], b });
    }
    Ok(())
}

fn check_join_closed(p: &FinitePoset, q: &FixedBitSet) -> Result<(), IdealViolation> {
    if p.is_locally_geometric() {
        // z outside q is a pairwise join of members iff the atoms of z inside q
        // already join to z below it; walk that join to find a witness
        for z in 0..p.len() {
            if q.contains(z) {
                continue;
            }
            let mut j = p.bottom();
            for a in p.atoms_below(z) {
                if !q.contains(a) || p.leq(a, j) {
                    continue;
                }
                let next = p.join_below(j, a, z).expect("lattice below z");
                if !q.contains(next) {
                    return Err(IdealViolation::NotJoinClosed {
                        x: j,
                        y: a,
                        join: next,
                    });
                }
                j = next;
            }
        }
        return Ok(());
    }
    let elems: Vec<usize> = q.ones().collect();
    for (i, &x) in elems.iter().enumerate() {
        for &y in &elems[i + 1..] {
            if p.leq(x, y) || p.leq(y, x) {
                continue;
            }
            if let Some(z) = p.join_set(&[x, y]).into_iter().find(|&z| !q.contains(z)) {
                return Err(IdealViolation::NotJoinClosed { x, y, join: z });
            }
        }
    }
    Ok(())
}

fn check_ideal(p: &FinitePoset, q: &FixedBitSet, strict: bool) -> Result<(), IdealViolation> {
    check_order_ideal(p, q)?;
    check_pure(p, q)?;
    check_join_closed(p, q)?;
    let maxq = p.maximal_of(q);
    let outside: Vec<usize> = p
        .atoms()
        .iter()
        .copied()
        .filter(|&a| !q.contains(a))
        .collect();
    let ys: Vec<usize> = if strict {
        q.ones().collect()
    } else {
        maxq.clone()
    };
    for &a in &outside {
        for &y in &ys {
            let j = p.join_set(&[a, y]);
            if j.is_empty() {
                return Err(IdealViolation::MissingJoin { y, atom: a });
            }
            if strict && j.len() != 1 {
                return Err(IdealViolation::NonUniqueJoin {
                    y,
                    atom: a,
                    count: j.len(),
                });
            }
        }
    }
    for x in p.maximal_elements() {
        let ok = maxq
            .iter()
            .any(|&y| p.leq(y, x) && p.modular_in_interval(x, y).unwrap_or(false));
        if !ok {
            return Err(IdealViolation::NoModularMaximum { maximal: x });
        }
    }
    Ok(())
}

fn to_bitset(p: &FinitePoset, elems: &[usize]) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(p.len());
    for &x in elems {
        b.insert(x);
    }
    b
}

/// M-ideal test; on failure the violated condition carries a witness.
pub fn is_m_ideal(p: &FinitePoset, q: &[usize]) -> Result<(), IdealViolation> {
    check_ideal(p, &to_bitset(p, q), false)
}

/// TM-ideal test: as `is_m_ideal` with joins against atoms required unique.
pub fn is_tm_ideal(p: &FinitePoset, q: &[usize]) -> Result<(), IdealViolation> {
    check_ideal(p, &to_bitset(p, q), true)
}

/// The atom-pair criterion for corank-one M-ideals of geometric posets.
///
/// For proper ideals the answer is compared with `is_m_ideal` plus the rank
/// condition, and a disagreement is an error.
pub fn atom_pair_check(p: &FinitePoset, q_atoms: &[usize]) -> Result<bool, SsError> {
    if !p.is_geometric() {
        return Err(SsError::NotGeometric);
    }
    let q = ideal_from_atoms(p, q_atoms).map_err(SsError::Ideal)?;
    let inq = to_bitset(p, &q.elements);
    let outside: Vec<usize> = p
        .atoms()
        .iter()
        .copied()
        .filter(|&a| !inq.contains(a))
        .collect();
    let mut pairs_ok = true;
    'pairs: for (i, &a1) in outside.iter().enumerate() {
        for &a2 in &outside[i + 1..] {
            for x in p.join_set(&[a1, a2]) {
                if !q.atoms.iter().any(|&a3| p.lt(a3, x)) {
                    pairs_ok = false;
                    break 'pairs;
                }
            }
        }
    }
    if q.elements.len() < p.len() {
        let m = is_m_ideal(p, &q.elements).is_ok() && q.rank + 1 == p.max_height();
        if m != pairs_ok {
            return Err(SsError::NiceMDisagreement(q.atoms.clone()));
        }
    }
    Ok(pairs_ok)
}

/// Certificate of (strict) supersolvability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealChain {
    /// `A(Q_0) = {} ⊂ A(Q_1) ⊂ ... ⊂ A(Q_n) = A(P)`.
    pub atom_sets: Vec<Vec<usize>>,
    pub strict: bool,
    pub a: Vec<usize>,
}

impl IdealChain {
    pub fn from_atom_sets(atom_sets: Vec<Vec<usize>>, strict: bool) -> Self {
        let a = atom_sets
            .windows(2)
            .map(|w| w[1].len() - w[0].len())
            .collect();
        IdealChain {
            atom_sets,
            strict,
            a,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainViolation {
    #[error("expected {expected} atom sets, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("the first atom set is not empty")]
    FirstNotEmpty,
    #[error("the last atom set is not the set of all atoms")]
    LastNotAll,
    #[error("atom set {0} does not contain its predecessor")]
    NotIncreasing(usize),
    #[error("level {level}: {violation}")]
    Ideal {
        level: usize,
        violation: IdealViolation,
    },
    #[error("level {level} has rank {rank}")]
    WrongRank { level: usize, rank: usize },
    #[error("a_{level} is recorded as {recorded}, the atom sets give {actual}")]
    CountMismatch {
        level: usize,
        recorded: usize,
        actual: usize,
    },
}

/// Re-checks a certificate against the definitions.
pub fn verify_chain(p: &FinitePoset, chain: &IdealChain) -> Result<(), ChainViolation> {
    let n = p.max_height();
    if chain.atom_sets.len() != n + 1 {
        return Err(ChainViolation::WrongLength {
            expected: n + 1,
            got: chain.atom_sets.len(),
        });
    }
    if chain.a.len() != n {
        return Err(ChainViolation::WrongLength {
            expected: n,
            got: chain.a.len(),
        });
    }
    if !chain.atom_sets[0].is_empty() {
        return Err(ChainViolation::FirstNotEmpty);
    }
    let all: BTreeSet<usize> = p.atoms().iter().copied().collect();
    let last: BTreeSet<usize> = chain.atom_sets[n].iter().copied().collect();
    if last != all {
        return Err(ChainViolation::LastNotAll);
    }
    let mut ideals = Vec::with_capacity(n + 1);
    for (level, atoms) in chain.atom_sets.iter().enumerate() {
        if level > 0 {
            let prev: BTreeSet<usize> = chain.atom_sets[level - 1].iter().copied().collect();
            let cur: BTreeSet<usize> = atoms.iter().copied().collect();
            if !prev.is_subset(&cur) {
                return Err(ChainViolation::NotIncreasing(level));
            }
            let actual = cur.len() - prev.len();
            if chain.a[level - 1] != actual {
                return Err(ChainViolation::CountMismatch {
                    level,
                    recorded: chain.a[level - 1],
                    actual,
                });
            }
        }
        let q = ideal_from_atoms(p, atoms)
            .map_err(|violation| ChainViolation::Ideal { level, violation })?;
        if q.rank != level {
            return Err(ChainViolation::WrongRank {
                level,
                rank: q.rank,
            });
        }
        ideals.push(q);
    }
    for level in 0..n {
        let (sub, keep) = p
            .induced(&ideals[level + 1].elements)
            .expect("ideals contain the minimum");
        let local: Vec<usize> = ideals[level]
            .elements
            .iter()
            .map(|x| keep.binary_search(x).expect("nested ideals"))
            .collect();
        let res = if chain.strict {
            is_tm_ideal(&sub, &local)
        } else {
            is_m_ideal(&sub, &local)
        };
        res.map_err(|violation| ChainViolation::Ideal { level, violation })?;
    }
    Ok(())
}

fn bits_of(p: &FinitePoset, x: usize) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(p.len());
    for a in p.atoms_below(x) {
        b.insert(a);
    }
    b
}

/// Atom sets of all corank-one M-ideals (TM-ideals if `strict`) of a pure
/// locally geometric poset, ascending lexicographically.
///
/// Each maximal `x` gets a modular coatom `y_x` of the interval below it, and
/// the choices must agree on shared atoms.
pub fn corank_one_candidates(p: &FinitePoset, strict: bool) -> Vec<Vec<usize>> {
    let k = p.max_height();
    if k == 0 {
        return vec![];
    }
    if k == 1 {
        return vec![vec![]];
    }
    let maxes = p.maximal_elements();
    let options: Vec<Vec<(usize, FixedBitSet)>> = maxes
        .par_iter()
        .map(|&x| {
            p.interval_below(x)
                .into_iter()
                .filter(|&y| p.height(y) + 1 == k)
                .filter(|&y| p.modular_in_interval(x, y).unwrap_or(false))
                .map(|y| (y, bits_of(p, y)))
                .collect()
        })
        .collect();
    let xbits: Vec<FixedBitSet> = maxes.iter().map(|&x| bits_of(p, x)).collect();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut pick: Vec<usize> = Vec::with_capacity(maxes.len());
    assign(&options, &xbits, &mut pick, &mut found);
    let mut out: Vec<Vec<usize>> = found
        .into_par_iter()
        .filter(|atoms| {
            let q = p.ideal_of_atoms(atoms);
            check_ideal(p, &q, strict).is_ok()
                && p.maximal_of(&q).iter().all(|&y| p.height(y) + 1 == k)
        })
        .collect();
    out.sort();
    out
}

fn assign(
    options: &[Vec<(usize, FixedBitSet)>],
    xbits: &[FixedBitSet],
    pick: &mut Vec<usize>,
    found: &mut BTreeSet<Vec<usize>>,
) {
    let i = pick.len();
    if i == options.len() {
        let mut u = FixedBitSet::with_capacity(xbits.first().map_or(0, |b| b.len()));
        for (j, &c) in pick.iter().enumerate() {
            u.union_with(&options[j][c].1);
        }
        found.insert(u.ones().collect());
        return;
    }
    for (c, (_, yb)) in options[i].iter().enumerate() {
        let consistent = pick.iter().enumerate().all(|(j, &cj)| {
            let yj = &options[j][cj].1;
            let mut a = yb.clone();
            a.intersect_with(&xbits[j]);
            let mut b = yj.clone();
            b.intersect_with(&xbits[i]);
            a.is_subset(yj) && b.is_subset(yb)
        });
        if consistent {
            pick.push(c);
            assign(options, xbits, pick, found);
            pick.pop();
        }
    }
}

/// Corank-one candidates of a poset of layers restricted to flats: for every
/// lattice of a coatom, the atoms whose lattice it contains.
pub fn flat_candidates(lp: &LayerPoset, within: &[usize], strict: bool) -> Vec<Vec<usize>> {
    let p = &lp.poset;
    let inside = to_bitset(p, within);
    let k = within.iter().map(|&x| p.height(x)).max().unwrap_or(0);
    if k == 0 {
        return vec![];
    }
    let atoms: Vec<usize> = p
        .atoms()
        .iter()
        .copied()
        .filter(|&a| inside.contains(a))
        .collect();
    let lattices: BTreeSet<&LatticeBasis> = within
        .iter()
        .filter(|&&x| p.height(x) + 1 == k)
        .map(|&x| &lp.layers[x].lattice)
        .collect();
    let (sub, keep) = p.induced(within).expect("ideal contains the minimum");
    let mut out: Vec<Vec<usize>> = lattices
        .into_iter()
        .map(|l| {
            atoms
                .iter()
                .copied()
                .filter(|&a| lp.layers[a].lattice.is_sublattice_of(l))
                .collect::<Vec<usize>>()
        })
        .filter(|cand| {
            let local: Vec<usize> = cand
                .iter()
                .map(|x| keep.binary_search(x).expect("inside"))
                .collect();
            let q = sub.ideal_of_atoms(&local);
            check_ideal(&sub, &q, strict).is_ok()
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn supersolvable_chain(p: &FinitePoset) -> Result<Option<IdealChain>, SsError> {
    search_chain(p, false)
}

pub fn strictly_supersolvable_chain(p: &FinitePoset) -> Result<Option<IdealChain>, SsError> {
    search_chain(p, true)
}

fn search_chain(p: &FinitePoset, strict: bool) -> Result<Option<IdealChain>, SsError> {
    if !p.is_locally_geometric() {
        return Err(SsError::NotLocallyGeometric);
    }
    if !p.is_pure() {
        return Err(SsError::Impure);
    }
    let n = p.max_height();
    let mut failed: HashSet<Vec<usize>> = HashSet::new();
    let top: Vec<usize> = p.atoms().to_vec();
    let Some(mut down) = descend(p, &top, n, strict, &mut failed) else {
        return Ok(None);
    };
    down.reverse();
    down.push(top);
    let chain = IdealChain::from_atom_sets(down, strict);
    verify_chain(p, &chain).map_err(SsError::CertificateRejected)?;
    Ok(Some(chain))
}

/// Chain below the ideal generated by `atoms` (rank `k`), listed downwards.
fn descend(
    p: &FinitePoset,
    atoms: &[usize],
    k: usize,
    strict: bool,
    failed: &mut HashSet<Vec<usize>>,
) -> Option<Vec<Vec<usize>>> {
    if k == 0 {
        return Some(vec![]);
    }
    let q: Vec<usize> = p.ideal_of_atoms(atoms).ones().collect();
    let (sub, keep) = p.induced(&q).expect("ideal contains the minimum");
    for cand in corank_one_candidates(&sub, strict) {
        let global: Vec<usize> = cand.iter().map(|&i| keep[i]).collect();
        if failed.contains(&global) {
            continue;
        }
        if let Some(mut rest) = descend(p, &global, k - 1, strict, failed) {
            rest.insert(0, global);
            return Some(rest);
        }
        failed.insert(global);
    }
    None
}

/// One stage `A_k -> A_{k-1}` of the fibration tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerStep {
    pub level: usize,
    /// Vectors of the level-`k` arrangement in coordinates of its lattice.
    pub vectors: Vec<Vec<BigInt>>,
    /// Basis of the kernel lattice in the same coordinates.
    pub kernel: Vec<Vec<BigInt>>,
    pub c_values: Vec<BigInt>,
    pub atoms_added: usize,
    pub punctures: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerReport {
    pub n: usize,
    pub d: usize,
    pub v: usize,
    pub essential: bool,
    pub irredundant: bool,
    pub supersolvable: bool,
    pub strictly_supersolvable: bool,
    pub fiber_type: bool,
    pub chain: Option<IdealChain>,
    /// Ascending in level.
    pub steps: Vec<TowerStep>,
    pub ell: Vec<BigInt>,
    pub a: Vec<usize>,
    pub kpi1: bool,
    pub fadell_neuwirth_pullback: bool,
    pub section: bool,
    pub pi1_free_ranks: Option<Vec<BigInt>>,
    pub notes: Vec<String>,
}

pub fn tower_report(a: &Arrangement) -> Result<TowerReport, SsError> {
    let amb = a.ambient;
    let val = validate(a);
    let mut report = TowerReport {
        n: amb.n,
        d: amb.d,
        v: amb.v,
        essential: val.essential,
        irredundant: val.irredundant,
        supersolvable: false,
        strictly_supersolvable: false,
        fiber_type: false,
        chain: None,
        steps: vec![],
        ell: vec![],
        a: vec![],
        kpi1: false,
        fadell_neuwirth_pullback: false,
        section: false,
        pi1_free_ranks: None,
        notes: vec![],
    };
    if !val.irredundant {
        report.notes.push("arrangement is not irredundant".into());
        return Ok(report);
    }
    if !val.essential {
        report.notes.push(format!(
            "arrangement is not essential (rank {} < n = {})",
            val.rank, amb.n
        ));
        return Ok(report);
    }
    let lp = build_layers(a)?;
    let strict = strictly_supersolvable_chain(&lp.poset)?;
    let chain = match strict {
        Some(c) => Some(c),
        None => supersolvable_chain(&lp.poset)?,
    };
    let Some(chain) = chain else {
        report
            .notes
            .push("poset of layers is not supersolvable".into());
        return Ok(report);
    };
    report.supersolvable = true;
    report.strictly_supersolvable = chain.strict;
    report.fiber_type = true;
    report.steps = tower_steps(&lp, &chain)?;
    report.ell = report.steps.iter().map(|s| s.punctures.clone()).collect();
    report.a = chain.a.clone();
    report.kpi1 = matches!((amb.d, amb.v), (0, 2) | (1, 1) | (2, 0));
    if chain.strict {
        report.fadell_neuwirth_pullback = true;
        report.section = true;
        if report.kpi1 {
            let extra = BigInt::from(amb.d.min(1));
            report.pi1_free_ranks = Some(report.ell.iter().map(|l| l + &extra).collect());
        }
    }
    report.chain = Some(chain);
    Ok(report)
}

/// Follows the chain through the identity components `Y_n > Y_{n-1} > ...`
/// and records the splitting data at every level.
pub fn tower_steps(lp: &LayerPoset, chain: &IdealChain) -> Result<Vec<TowerStep>, SsError> {
    let p = &lp.poset;
    let amb = lp.arrangement.ambient;
    let n = amb.n;
    let mut y = lp
        .index_of(&Layer::identity(n, amb.d))
        .ok_or(SsError::BrokenTower { level: n })?;
    let mut steps = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let q = p.ideal_of_atoms(&chain.atom_sets[k - 1]);
        let below = p
            .maximal_of(&q)
            .into_iter()
            .find(|&m| p.leq(m, y))
            .ok_or(SsError::BrokenTower { level: k })?;
        let outer = &lp.layers[y].lattice;
        let inner = &lp.layers[below].lattice;
        let vectors: Vec<Vec<BigInt>> = lp
            .arrangement
            .vectors
            .iter()
            .filter_map(|alpha| member(alpha, outer).ok().flatten())
            .collect();
        let kernel_rows = inner
            .coords_in(outer)
            .ok_or(SsError::BrokenTower { level: k })?;
        let kernel = LatticeBasis::span(&kernel_rows);
        let kernel = LatticeBasis {
            ambient_dim: k,
            basis: kernel.basis,
        };
        let proj = admissible_from_corank1(&kernel)?;
        let c_values: Vec<BigInt> = vectors.iter().map(|al| c_of(al, &proj)).collect();
        let punctures = c_values
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| num_traits::pow(c.clone(), amb.d))
            .sum();
        steps.push(TowerStep {
            level: k,
            kernel: kernel.basis.row_vecs(),
            vectors,
            c_values,
            atoms_added: chain.a[k - 1],
            punctures,
        });
        y = below;
    }
    steps.reverse();
    Ok(steps)
}
