//! Rational affine hyperplane arrangements, their intersection posets, and
//! coning.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactalg::rref;
use crate::poset::{FinitePoset, PosetError};
use crate::ssolv::{supersolvable_chain, SsError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AffineError {
    #[error("hyperplane {index} has {got} coordinates, expected {expected}")]
    Dimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("hyperplane {0} has a zero normal")]
    ZeroNormal(usize),
    #[error("hyperplanes {0} and {1} coincide")]
    Duplicate(usize, usize),
    #[error("arrangement is not central")]
    NotCentral,
    #[error("no hyperplane with index {0}")]
    NoSuchHyperplane(usize),
    #[error("arrangement is not essential")]
    NotEssential,
    #[error("semilattice verdict {ss} differs from the cone verdict {cone}")]
    Disagreement { ss: bool, cone: bool },
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Ss(#[from] SsError),
}

/// Hyperplane `normal . x = offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane {
    pub normal: Vec<BigRational>,
    pub offset: BigRational,
}

impl Hyperplane {
    fn row(&self) -> Vec<BigRational> {
        let mut r = self.normal.clone();
        r.push(self.offset.clone());
        r
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineArrangement {
    pub n: usize,
    pub hyperplanes: Vec<Hyperplane>,
}

impl AffineArrangement {
    pub fn new(n: usize, hyperplanes: Vec<Hyperplane>) -> Result<Self, AffineError> {
        let mut seen: BTreeMap<Vec<Vec<BigRational>>, usize> = BTreeMap::new();
        for (i, h) in hyperplanes.iter().enumerate() {
            if h.normal.len() != n {
                return Err(AffineError::Dimension {
                    index: i,
                    expected: n,
                    got: h.normal.len(),
                });
            }
            if h.normal.iter().all(Zero::is_zero) {
                return Err(AffineError::ZeroNormal(i));
            }
            if let Some(&j) = seen.get(&rref(&[h.row()])) {
                return Err(AffineError::Duplicate(j, i));
            }
            seen.insert(rref(&[h.row()]), i);
        }
        Ok(AffineArrangement { n, hyperplanes })
    }

    pub fn from_i64(n: usize, hs: &[(&[i64], i64)]) -> Result<Self, AffineError> {
        let q = |x: i64| BigRational::from_integer(BigInt::from(x));
        Self::new(
            n,
            hs.iter()
                .map(|(a, b)| Hyperplane {
                    normal: a.iter().map(|&x| q(x)).collect(),
                    offset: q(*b),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn is_central(&self) -> bool {
        self.hyperplanes.iter().all(|h| h.offset.is_zero())
    }
}

/// A nonempty flat as the RREF of its augmented equations.
type Flat = Vec<Vec<BigRational>>;

fn intersect(f: &Flat, h: &Hyperplane) -> Option<Flat> {
    let mut rows = f.clone();
    rows.push(h.row());
    let r = rref(&rows);
    let n = h.normal.len();
    let inconsistent = r
        .iter()
        .any(|row| row[..n].iter().all(Zero::is_zero) && !row[n].is_zero());
    (!inconsistent).then_some(r)
}

fn contains(f: &Flat, h: &Hyperplane) -> bool {
    let mut rows = f.clone();
    rows.push(h.row());
    rref(&rows).len() == f.len()
}

fn flat_label(f: &Flat) -> String {
    if f.is_empty() {
        return "V".into();
    }
    let rows: Vec<String> = f
        .iter()
        .map(|r| {
            let (a, b) = r.split_at(r.len() - 1);
            let a: Vec<String> = a.iter().map(|q| q.to_string()).collect();
            format!("[{}|{}]", a.join(","), b[0])
        })
        .collect();
    rows.join(";")
}

/// Intersection poset with the flats and the hyperplanes containing each.
#[derive(Clone, Debug)]
pub struct IntersectionPoset {
    pub poset: FinitePoset,
    pub flats: Vec<Vec<Vec<BigRational>>>,
    pub containing: Vec<Vec<usize>>,
}

/// Nonempty flats ordered by reverse inclusion.
pub fn intersection_poset(a: &AffineArrangement) -> Result<IntersectionPoset, AffineError> {
    let mut flats: BTreeSet<Flat> = BTreeSet::new();
    let mut queue: VecDeque<Flat> = VecDeque::from([vec![]]);
    flats.insert(vec![]);
    while let Some(f) = queue.pop_front() {
        for h in &a.hyperplanes {
            if contains(&f, h) {
                continue;
            }
            if let Some(g) = intersect(&f, h) {
                if flats.insert(g.clone()) {
                    queue.push_back(g);
                }
            }
        }
    }
    // codimension first so the whole space gets index 0
    let mut flats: Vec<Flat> = flats.into_iter().collect();
    flats.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    let containing: Vec<Vec<usize>> = flats
        .iter()
        .map(|f| {
            (0..a.len())
                .filter(|&i| contains(f, &a.hyperplanes[i]))
                .collect()
        })
        .collect();
    let sets: Vec<BTreeSet<usize>> = containing
        .iter()
        .map(|c| c.iter().copied().collect())
        .collect();
    let labels = flats.iter().map(flat_label).collect();
    // for nonempty flats, G inside F iff every hyperplane through F passes through G
    let poset = FinitePoset::from_leq(labels, |i, j| sets[i].is_subset(&sets[j]))?;
    Ok(IntersectionPoset {
        poset,
        flats,
        containing,
    })
}

/// Homogenization in coordinates `(x_0, x_1, ..., x_n)`; `H_0 = {x_0 = 0}`
/// comes first.
pub fn cone(a: &AffineArrangement) -> AffineArrangement {
    let zero = BigRational::zero();
    let mut h0 = vec![zero.clone(); a.n + 1];
    h0[0] = BigRational::one();
    let mut hs = vec![Hyperplane {
        normal: h0,
        offset: zero.clone(),
    }];
    for h in &a.hyperplanes {
        let mut normal = vec![-h.offset.clone()];
        normal.extend(h.normal.iter().cloned());
        hs.push(Hyperplane {
            normal,
            offset: zero.clone(),
        });
    }
    AffineArrangement::new(a.n + 1, hs).expect("coning keeps hyperplanes distinct")
}

/// Restriction of a central arrangement to the affine chart `w . x = 1`,
/// where `w` is the normal of hyperplane `h`.
pub fn decone(a: &AffineArrangement, h: usize) -> Result<AffineArrangement, AffineError> {
    if !a.is_central() {
        return Err(AffineError::NotCentral);
    }
    let w = &a
        .hyperplanes
        .get(h)
        .ok_or(AffineError::NoSuchHyperplane(h))?
        .normal;
    let k = w.iter().position(|x| !x.is_zero()).expect("nonzero normal");
    let mut out = Vec::with_capacity(a.len() - 1);
    for (i, hp) in a.hyperplanes.iter().enumerate() {
        if i == h {
            continue;
        }
        let u = &hp.normal;
        let ratio = &u[k] / &w[k];
        let normal: Vec<BigRational> = (0..a.n)
            .filter(|&j| j != k)
            .map(|j| &u[j] - &ratio * &w[j])
            .collect();
        out.push(Hyperplane {
            normal,
            offset: -ratio,
        });
    }
    AffineArrangement::new(a.n - 1, out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffineVerdict {
    pub ss: bool,
    pub cone_ss_through_h0: bool,
}

/// Supersolvability of the intersection semilattice, and separately the
/// existence of a maximal chain of modular elements through `H_0` in the
/// lattice of the cone. The two must agree.
pub fn affine_ss_check(a: &AffineArrangement) -> Result<AffineVerdict, AffineError> {
    let ip = intersection_poset(a)?;
    if ip.poset.max_height() != a.n {
        return Err(AffineError::NotEssential);
    }
    let ss = supersolvable_chain(&ip.poset)?.is_some();
    let c = intersection_poset(&cone(a))?;
    let lat = &c.poset;
    let h0 = (0..lat.len())
        .find(|&x| c.containing[x] == [0])
        .expect("H_0 is a flat of the cone");
    let modular: Vec<bool> = (0..lat.len())
        .map(|x| lat.is_modular_element(x))
        .collect::<Result<_, _>>()?;
    let top = lat.top().expect("cone lattice has a top");
    let mut reach = vec![false; lat.len()];
    let mut stack = vec![];
    if modular[h0] {
        reach[h0] = true;
        stack.push(h0);
    }
    while let Some(x) = stack.pop() {
        for &y in lat.upper_covers(x) {
            if modular[y] && !reach[y] {
                reach[y] = true;
                stack.push(y);
            }
        }
    }
    let cone_ss = reach[top];
    if ss != cone_ss {
        return Err(AffineError::Disagreement { ss, cone: cone_ss });
    }
    Ok(AffineVerdict {
        ss,
        cone_ss_through_h0: cone_ss,
    })
}

/// Twenty small essential arrangements, the first being the three lines
/// `x = 0`, `y = 0`, `x + y = 1`.
pub fn affine_corpus() -> Vec<(&'static str, AffineArrangement)> {
    let items: Vec<(&'static str, usize, Vec<(&[i64], i64)>)> = vec![
        (
            "three-generic-lines",
            2,
            vec![(&[1, 0], 0), (&[0, 1], 0), (&[1, 1], 1)],
        ),
        (
            "central-three-lines",
            2,
            vec![(&[1, 0], 0), (&[0, 1], 0), (&[1, -1], 0)],
        ),
        ("point", 1, vec![(&[1], 0)]),
        ("three-points", 1, vec![(&[1], 0), (&[1], 1), (&[1], 2)]),
        ("axes", 2, vec![(&[1, 0], 0), (&[0, 1], 0)]),
        (
            "axes-plus-parallel",
            2,
            vec![(&[1, 0], 0), (&[1, 0], 1), (&[0, 1], 0)],
        ),
        (
            "square-grid",
            2,
            vec![(&[1, 0], 0), (&[1, 0], 1), (&[0, 1], 0), (&[0, 1], 1)],
        ),
        (
            "four-generic-lines",
            2,
            vec![(&[1, 0], 0), (&[0, 1], 0), (&[1, 1], 1), (&[1, -1], 2)],
        ),
        (
            "central-plus-parallel",
            2,
            vec![(&[1, 0], 0), (&[0, 1], 0), (&[1, -1], 0), (&[1, 0], 1)],
        ),
        (
            "pencil-and-line",
            2,
            vec![(&[1, 0], 0), (&[0, 1], 0), (&[1, -1], 0), (&[1, 1], 1)],
        ),
        (
            "triangle-with-median",
            2,
            vec![(&[1, 0], 0), (&[0, 1], 0), (&[1, 1], 2), (&[1, -1], 0)],
        ),
        (
            "coordinate-planes",
            3,
            vec![(&[1, 0, 0], 0), (&[0, 1, 0], 0), (&[0, 0, 1], 0)],
        ),
        (
            "four-generic-planes",
            3,
            vec![
                (&[1, 0, 0], 0),
                (&[0, 1, 0], 0),
                (&[0, 0, 1], 0),
                (&[1, 1, 1], 1),
            ],
        ),
        (
            "braid-with-slice",
            3,
            vec![
                (&[1, -1, 0], 0),
                (&[0, 1, -1], 0),
                (&[1, 0, -1], 0),
                (&[0, 0, 1], 0),
            ],
        ),
        (
            "braid-with-offset-slice",
            3,
            vec![
                (&[1, -1, 0], 0),
                (&[0, 1, -1], 0),
                (&[1, 0, -1], 0),
                (&[1, 1, 1], 1),
            ],
        ),
        (
            "coordinate-planes-and-diagonal",
            3,
            vec![
                (&[1, 0, 0], 0),
                (&[0, 1, 0], 0),
                (&[0, 0, 1], 0),
                (&[1, -1, 0], 0),
            ],
        ),
        (
            "cube-faces",
            3,
            vec![
                (&[1, 0, 0], 0),
                (&[1, 0, 0], 1),
                (&[0, 1, 0], 0),
                (&[0, 1, 0], 1),
                (&[0, 0, 1], 0),
            ],
        ),
        (
            "shifted-braid",
            2,
            vec![(&[1, 0], 0), (&[0, 1], 0), (&[1, -1], 0), (&[1, -1], 1)],
        ),
        (
            "two-parallel-and-diagonal",
            2,
            vec![(&[1, 0], 0), (&[1, 0], 1), (&[1, 1], 0)],
        ),
        (
            "central-four-lines",
            2,
            vec![(&[1, 0], 0), (&[0, 1], 0), (&[1, 1], 0), (&[1, -1], 0)],
        ),
    ];
    items
        .into_iter()
        .map(|(name, n, hs)| {
            (
                name,
                AffineArrangement::from_i64(n, &hs).expect("corpus entry"),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic_lines() -> AffineArrangement {
        AffineArrangement::from_i64(2, &[(&[1, 0], 0), (&[0, 1], 0), (&[1, 1], 1)]).unwrap()
    }

    #[test]
    fn generic_lines_poset() {
        let ip = intersection_poset(&generic_lines()).unwrap();
        assert_eq!(ip.poset.len(), 7);
        assert_eq!(ip.poset.atoms().len(), 3);
        assert!(ip.poset.is_geometric());
        let v = affine_ss_check(&generic_lines()).unwrap();
        assert!(!v.ss && !v.cone_ss_through_h0);
    }

    #[test]
    fn central_pencil() {
        let a =
            AffineArrangement::from_i64(2, &[(&[1, 0], 0), (&[0, 1], 0), (&[1, -1], 0)]).unwrap();
        let ip = intersection_poset(&a).unwrap();
        assert_eq!(ip.poset.len(), 5);
        assert_eq!(ip.poset.char_poly().unwrap().to_string(), "t^2 - 3t + 2");
        let v = affine_ss_check(&a).unwrap();
        assert!(v.ss && v.cone_ss_through_h0);
    }

    #[test]
    fn cone_round_trip() {
        let c = cone(&generic_lines());
        assert_eq!(c.len(), 4);
        assert!(c.is_central());
        assert_eq!(decone(&c, 0).unwrap(), generic_lines());
        assert_eq!(decone(&generic_lines(), 0), Err(AffineError::NotCentral));
    }

    #[test]
    fn single_hyperplane() {
        let a = AffineArrangement::from_i64(1, &[(&[1], 0)]).unwrap();
        assert_eq!(intersection_poset(&a).unwrap().poset.len(), 2);
        let v = affine_ss_check(&a).unwrap();
        assert!(v.ss && v.cone_ss_through_h0);
    }
}
