//! Posets of layers of arrangements in `Hom(Z^n, (S^1)^d x R^v)`.
//!
//! A layer is a pair `(L, c)`: `L` is the saturation of the span of some
//! subset of the arrangement, and `c` is a character `L -> (Q/Z)^d` vanishing
//! on that span, recorded by its values on the HNF basis rows of `L`.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exactalg::{
    complete_unimodular, frac_mod1, hnf, member, saturate, snf, unimodular_inverse, ExactError,
    IntMatrix, LatticeBasis,
};
use crate::poset::{FinitePoset, PosetError};

/// Default cap on the number of vectors for subset enumeration.
pub const DEFAULT_MAX_VECTORS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayerError {
    #[error("invalid ambient group: n = {n}, d = {d}, v = {v} (need n >= 1 and d + v >= 1)")]
    InvalidAmbient { n: usize, d: usize, v: usize },
    #[error("vector {index} has {got} coordinates, expected {expected}")]
    Dimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("vector {0} is zero")]
    ZeroVector(usize),
    #[error("arrangement is redundant: vectors {0} and {1} share a component")]
    Redundant(usize, usize),
    #[error("{count} vectors exceeds the enumeration limit of {limit}")]
    TooManyVectors { count: usize, limit: usize },
    #[error("expected a sublattice of rank {expected}, got rank {got}")]
    WrongRank { expected: usize, got: usize },
    #[error("sublattice is not saturated")]
    NotSaturated,
    #[error("atom set is not a subset of the atoms")]
    NotAtoms,
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// Signature of `Z^n` and `G = (S^1)^d x R^v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ambient {
    pub n: usize,
    pub d: usize,
    pub v: usize,
}

impl Ambient {
    pub fn new(n: usize, d: usize, v: usize) -> Result<Self, LayerError> {
        if n == 0 || d + v == 0 {
            return Err(LayerError::InvalidAmbient { n, d, v });
        }
        Ok(Ambient { n, d, v })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    pub ambient: Ambient,
    pub vectors: Vec<Vec<BigInt>>,
}

impl Arrangement {
    pub fn new(ambient: Ambient, vectors: Vec<Vec<BigInt>>) -> Result<Self, LayerError> {
        for (i, a) in vectors.iter().enumerate() {
            if a.len() != ambient.n {
                return Err(LayerError::Dimension {
                    index: i,
                    expected: ambient.n,
                    got: a.len(),
                });
            }
            if a.iter().all(Zero::is_zero) {
                return Err(LayerError::ZeroVector(i));
            }
        }
        Ok(Arrangement { ambient, vectors })
    }

    pub fn from_i64(n: usize, d: usize, v: usize, vectors: &[&[i64]]) -> Result<Self, LayerError> {
        let vs = vectors
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::new(Ambient::new(n, d, v)?, vs)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.vectors.clone(), self.ambient.n).expect("validated widths")
    }

    fn subset_matrix(&self, idx: &[usize]) -> IntMatrix {
        let rows = idx.iter().map(|&i| self.vectors[i].clone()).collect();
        IntMatrix::from_rows(rows, self.ambient.n).expect("validated widths")
    }

    pub fn rank(&self) -> usize {
        self.matrix().rank()
    }
}

/// One connected component of an intersection.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Layer {
    pub lattice: LatticeBasis,
    /// `rank(L)` rows of `d` entries in `[0, 1)`.
    pub character: Vec<Vec<BigRational>>,
}

impl Layer {
    /// The whole torus `T`.
    pub fn whole(n: usize) -> Self {
        Layer {
            lattice: LatticeBasis::zero(n),
            character: vec![],
        }
    }

    /// The identity component of the full intersection.
    pub fn identity(n: usize, d: usize) -> Self {
        Layer {
            lattice: LatticeBasis::full(n),
            character: vec![vec![BigRational::zero(); d]; n],
        }
    }

    /// Canonical layer from independent generators of a saturated lattice and
    /// the character values on those generators.
    pub fn from_generators(gens: &IntMatrix, values: &[Vec<BigRational>], d: usize) -> Self {
        let (h, u) = hnf(gens);
        let r = gens.rows();
        debug_assert!((0..r).all(|i| !h.is_zero_row(i)));
        let mut character = vec![vec![BigRational::zero(); d]; r];
        for (i, row) in character.iter_mut().enumerate() {
            for (k, slot) in row.iter_mut().enumerate() {
                let mut acc = BigRational::zero();
                for (j, val) in values.iter().enumerate() {
                    acc += BigRational::from_integer(u[(i, j)].clone()) * &val[k];
                }
                *slot = frac_mod1(&acc);
            }
        }
        Layer {
            lattice: LatticeBasis {
                ambient_dim: gens.cols(),
                basis: h,
            },
            character,
        }
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    /// `self <= other` in the poset of layers.
    pub fn leq(&self, other: &Layer) -> bool {
        match self.lattice.coords_in(&other.lattice) {
            Some(x) => restricts_to(&x, &other.character, &self.character),
            None => false,
        }
    }

    pub fn label(&self) -> String {
        if self.rank() == 0 {
            return "T".into();
        }
        let rows: Vec<String> = (0..self.rank())
            .map(|i| {
                let r: Vec<String> = self
                    .lattice
                    .basis
                    .row(i)
                    .iter()
                    .map(|x| x.to_string())
                    .collect();
                format!("({})", r.join(","))
            })
            .collect();
        let mut s = format!("<{}>", rows.join(","));
        let d = self.character.first().map_or(0, Vec::len);
        if d > 0 && self.character.iter().flatten().any(|q| !q.is_zero()) {
            let cs: Vec<String> = self
                .character
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|q| q.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            s.push_str(&format!(" c=[{}]", cs.join(";")));
        }
        s
    }
}

/// Whether `x * big ≡ small (mod 1)` entrywise.
fn restricts_to(x: &IntMatrix, big: &[Vec<BigRational>], small: &[Vec<BigRational>]) -> bool {
    for (i, row) in small.iter().enumerate() {
        for (k, target) in row.iter().enumerate() {
            let mut acc = BigRational::zero();
            for (j, b) in big.iter().enumerate() {
                let c = &x[(i, j)];
                if !c.is_zero() {
                    acc += BigRational::from_integer(c.clone()) * &b[k];
                }
            }
            if !(acc - target).is_integer() {
                return false;
            }
        }
    }
    true
}

/// Saturation of the span of `gens` and every character on it vanishing on
/// `gens`, one `(Q/Z)` value per circle factor.
pub fn components(gens: &IntMatrix, d: usize) -> Vec<Layer> {
    let n = gens.cols();
    let (sat, _) = saturate(gens);
    let r = sat.rank();
    if r == 0 {
        return vec![Layer::whole(n)];
    }
    let coords: Vec<Vec<BigInt>> = (0..gens.rows())
        .filter(|&i| !gens.is_zero_row(i))
        .map(|i| {
            member(gens.row(i), &sat)
                .ok()
                .flatten()
                .expect("inside saturation")
        })
        .collect();
    let m = IntMatrix::from_rows(coords, r).expect("width r");
    let t = snf(&m);
    // one circle coordinate: c = V c', c'_i in (1/f_i) Z / Z
    let mut single: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); r]];
    for (i, f) in t.diagonal.iter().enumerate() {
        if f.is_one() {
            continue;
        }
        let mut next = Vec::new();
        for base in &single {
            let mut m = BigInt::zero();
            while &m < f {
                let step = BigRational::new(m.clone(), f.clone());
                let v: Vec<BigRational> = (0..r)
                    .map(|row| {
                        frac_mod1(
                            &(&base[row]
                                + BigRational::from_integer(t.v[(row, i)].clone()) * &step),
                        )
                    })
                    .collect();
                next.push(v);
                m += 1;
            }
        }
        single = next;
    }
    let mut chars: Vec<Vec<Vec<BigRational>>> = vec![vec![Vec::new(); r]];
    for _ in 0..d {
        let mut next = Vec::with_capacity(chars.len() * single.len());
        for c in &chars {
            for s in &single {
                let mut c2 = c.clone();
                for (row, val) in c2.iter_mut().zip(s) {
                    row.push(val.clone());
                }
                next.push(c2);
            }
        }
        chars = next;
    }
    let mut out: Vec<Layer> = chars
        .into_iter()
        .map(|character| Layer {
            lattice: sat.clone(),
            character,
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub rank: usize,
    pub essential: bool,
    pub irredundant: bool,
    /// First pair of vectors sharing a component.
    pub clash: Option<(usize, usize)>,
}

pub fn validate(a: &Arrangement) -> Validation {
    let rank = a.rank();
    let atoms: Vec<BTreeSet<Layer>> = (0..a.len())
        .map(|i| {
            components(&a.subset_matrix(&[i]), a.ambient.d)
                .into_iter()
                .collect()
        })
        .collect();
    let mut clash = None;
    'outer: for i in 0..a.len() {
        for j in i + 1..a.len() {
            if !atoms[i].is_disjoint(&atoms[j]) {
                clash = Some((i, j));
                break 'outer;
            }
        }
    }
    Validation {
        rank,
        essential: rank == a.ambient.n,
        irredundant: clash.is_none(),
        clash,
    }
}

/// Poset of layers together with the layer of every element.
#[derive(Clone, Debug)]
pub struct LayerPoset {
    pub arrangement: Arrangement,
    pub poset: FinitePoset,
    pub layers: Vec<Layer>,
    pub essential: bool,
}

impl LayerPoset {
    pub fn index_of(&self, layer: &Layer) -> Option<usize> {
        self.layers.binary_search(layer).ok()
    }

    /// Atoms that are components of `H_alpha` for the given vector.
    pub fn atoms_of_vector(&self, i: usize) -> Vec<usize> {
        components(
            &self.arrangement.subset_matrix(&[i]),
            self.arrangement.ambient.d,
        )
        .iter()
        .filter_map(|l| self.index_of(l))
        .collect()
    }

    /// Atoms of the sub-arrangement on the given vectors.
    pub fn atoms_of_vectors(&self, idx: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = idx.iter().flat_map(|&i| self.atoms_of_vector(i)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

pub fn build_layers(a: &Arrangement) -> Result<LayerPoset, LayerError> {
    build_layers_with_limit(a, DEFAULT_MAX_VECTORS)
}

pub fn build_layers_with_limit(a: &Arrangement, limit: usize) -> Result<LayerPoset, LayerError> {
    let val = validate(a);
    if let Some((i, j)) = val.clash {
        return Err(LayerError::Redundant(i, j));
    }
    let m = a.len();
    if m > limit || m >= 63 {
        return Err(LayerError::TooManyVectors { count: m, limit });
    }
    let spans: BTreeSet<LatticeBasis> = (0u64..1u64 << m)
        .into_par_iter()
        .map(|mask| {
            let idx: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
            LatticeBasis::span(&a.subset_matrix(&idx))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let spans: Vec<LatticeBasis> = spans.into_iter().collect();
    let layers: BTreeSet<Layer> = spans
        .par_iter()
        .map(|s| {
            if s.rank() == 0 {
                vec![Layer::whole(a.ambient.n)]
            } else {
                components(&s.basis, a.ambient.d)
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let layers: Vec<Layer> = layers.into_iter().collect();
    let poset = order_layers(&layers)?;
    Ok(LayerPoset {
        arrangement: a.clone(),
        poset,
        layers,
        essential: val.essential,
    })
}

/// Poset on a sorted, duplicate-free list of layers.
pub fn order_layers(layers: &[Layer]) -> Result<FinitePoset, LayerError> {
    let lattices: Vec<LatticeBasis> = {
        let s: BTreeSet<&LatticeBasis> = layers.iter().map(|l| &l.lattice).collect();
        s.into_iter().cloned().collect()
    };
    let lat_idx: BTreeMap<&LatticeBasis, usize> =
        lattices.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let nl = lattices.len();
    let coords: Vec<Vec<Option<IntMatrix>>> = (0..nl)
        .into_par_iter()
        .map(|i| {
            (0..nl)
                .map(|j| {
                    if lattices[i].rank() <= lattices[j].rank() {
                        lattices[i].coords_in(&lattices[j])
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    let n = layers.len();
    let rel: Vec<FixedBitSet> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut b = FixedBitSet::with_capacity(n);
            let li = lat_idx[&layers[i].lattice];
            for j in 0..n {
                let lj = lat_idx[&layers[j].lattice];
                if let Some(x) = &coords[li][lj] {
                    if restricts_to(x, &layers[j].character, &layers[i].character) {
                        b.insert(j);
                    }
                }
            }
            b
        })
        .collect();
    let labels = layers.iter().map(Layer::label).collect();
    Ok(FinitePoset::from_leq(labels, |i, j| rel[i].contains(j))?)
}

/// Splitting `Z^n = <beta_0> + L` for a saturated corank-one `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleProjection {
    pub gamma_prime: Vec<BigInt>,
    pub completion: IntMatrix,
    /// Primitive vector orthogonal to `L`; the projection is `alpha -> (alpha . w) beta_0`.
    pub epsilon: Vec<BigInt>,
    pub kernel: LatticeBasis,
}

impl AdmissibleProjection {
    pub fn project(&self, alpha: &[BigInt]) -> Vec<BigInt> {
        let s = dot(alpha, &self.epsilon);
        self.gamma_prime.iter().map(|b| &s * b).collect()
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn admissible_from_corank1(l: &LatticeBasis) -> Result<AdmissibleProjection, LayerError> {
    let n = l.ambient_dim;
    if l.rank() + 1 != n {
        return Err(LayerError::WrongRank {
            expected: n.saturating_sub(1),
            got: l.rank(),
        });
    }
    let completion = complete_unimodular(l).map_err(|e| match e {
        ExactError::NotSaturated { .. } => LayerError::NotSaturated,
        other => other.into(),
    })?;
    let inv = unimodular_inverse(&completion)?;
    let epsilon = (0..n).map(|i| inv[(i, n - 1)].clone()).collect();
    Ok(AdmissibleProjection {
        gamma_prime: completion.row(n - 1).to_vec(),
        completion,
        epsilon,
        kernel: l.clone(),
    })
}

/// `c(alpha)`, the index of the projection of `alpha` onto `<beta_0>`.
pub fn c_of(alpha: &[BigInt], proj: &AdmissibleProjection) -> BigInt {
    dot(alpha, &proj.epsilon).abs()
}

pub fn puncture_count(a: &Arrangement, proj: &AdmissibleProjection) -> BigInt {
    a.vectors
        .iter()
        .map(|alpha| c_of(alpha, proj))
        .filter(|c| !c.is_zero())
        .map(|c| num_traits::pow(c, a.ambient.d))
        .sum()
}

/// The vectors lying in the kernel and the arrangement they induce on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubQuotient {
    pub a_y: Vec<usize>,
    pub qa: Arrangement,
}

pub fn sub_and_quotient(a: &Arrangement, proj: &AdmissibleProjection) -> SubQuotient {
    let mut a_y = Vec::new();
    let mut vectors = Vec::new();
    for (i, alpha) in a.vectors.iter().enumerate() {
        if c_of(alpha, proj).is_zero() {
            a_y.push(i);
            vectors.push(
                member(alpha, &proj.kernel)
                    .ok()
                    .flatten()
                    .expect("alpha in kernel"),
            );
        }
    }
    SubQuotient {
        a_y,
        qa: Arrangement {
            ambient: Ambient {
                n: a.ambient.n - 1,
                ..a.ambient
            },
            vectors,
        },
    }
}

/// Carries a layer written in the coordinates of `kernel` back to `Z^n`.
pub fn embed_layer(layer: &Layer, kernel: &LatticeBasis, d: usize) -> Layer {
    if layer.rank() == 0 {
        return Layer::whole(kernel.ambient_dim);
    }
    let gens = layer
        .lattice
        .basis
        .mul(&kernel.basis)
        .expect("kernel coordinates");
    Layer::from_generators(&gens, &layer.character, d)
}

/// Horizontal atoms for a candidate corank-one ideal, compared with the set of
/// elements above `T` meeting every maximal element of the ideal only in `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizontalReport {
    pub horizontal: Vec<usize>,
    pub meet_set: Vec<usize>,
    pub agree: bool,
}

pub fn horizontal_set(p: &FinitePoset, q_atoms: &[usize]) -> Result<HorizontalReport, LayerError> {
    if q_atoms.iter().any(|x| !p.atoms().contains(x)) {
        return Err(LayerError::NotAtoms);
    }
    let q = p.ideal_of_atoms(q_atoms);
    let maxq = p.maximal_of(&q);
    let horizontal: Vec<usize> = p
        .atoms()
        .iter()
        .copied()
        .filter(|a| !q_atoms.contains(a))
        .collect();
    let meet_set: Vec<usize> = (0..p.len())
        .filter(|&x| x != p.bottom())
        .filter(|&x| {
            maxq.iter().all(|&y| {
                let m = p.max_lower_bounds(x, y).expect("valid elements");
                m == [p.bottom()]
            })
        })
        .collect();
    let agree = horizontal == meet_set;
    Ok(HorizontalReport {
        horizontal,
        meet_set,
        agree,
    })
}

/// Number of layers each subset produces, `(prod f_i)^d`, as a check on
/// `components`.
pub fn expected_component_count(gens: &IntMatrix, d: usize) -> BigInt {
    let (_, t) = saturate(gens);
    num_traits::pow(t.order(), d)
}

/// Greatest common divisor of the entries of a vector.
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn single_even_vector_has_two_components() {
        let a = Arrangement::from_i64(1, 1, 0, &[&[2]]).unwrap();
        let lp = build_layers(&a).unwrap();
        assert_eq!(lp.poset.len(), 3);
        assert_eq!(lp.poset.char_poly().unwrap().to_string(), "t - 2");
    }

    #[test]
    fn validate_examples() {
        let v = validate(&Arrangement::from_i64(2, 1, 0, &[&[1, 0], &[0, 1]]).unwrap());
        assert!(v.essential && v.irredundant);
        let v = validate(&Arrangement::from_i64(2, 1, 0, &[&[1, 0]]).unwrap());
        assert!(!v.essential);
        let v = validate(&Arrangement::from_i64(2, 1, 0, &[&[1, 0], &[2, 0]]).unwrap());
        assert!(!v.irredundant);
    }

    #[test]
    fn admissible_examples() {
        let l = LatticeBasis::span(&IntMatrix::from_i64(&[&[1, 0]]));
        let p = admissible_from_corank1(&l).unwrap();
        assert_eq!(p.gamma_prime, big(&[0, 1]));
        assert_eq!(c_of(&big(&[0, 1]), &p), BigInt::from(1));
        assert_eq!(c_of(&big(&[1, 2]), &p), BigInt::from(2));
        assert_eq!(c_of(&big(&[1, 0]), &p), BigInt::zero());
        assert_eq!(p.project(&p.gamma_prime), p.gamma_prime);
        let l = LatticeBasis::span(&IntMatrix::from_i64(&[&[0, 2]]));
        assert_eq!(
            admissible_from_corank1(&l).unwrap_err(),
            LayerError::NotSaturated
        );
        let l = LatticeBasis::full(2);
        assert!(matches!(
            admissible_from_corank1(&l).unwrap_err(),
            LayerError::WrongRank { .. }
        ));
    }

    #[test]
    fn puncture_count_without_circles_counts_vectors() {
        let a = Arrangement::from_i64(2, 0, 2, &[&[1, 0], &[0, 1], &[1, 2]]).unwrap();
        let l = LatticeBasis::span(&IntMatrix::from_i64(&[&[1, 0]]));
        let p = admissible_from_corank1(&l).unwrap();
        assert_eq!(puncture_count(&a, &p), BigInt::from(2));
    }

    #[test]
    fn component_count_matches_torsion() {
        let g = IntMatrix::from_i64(&[&[2, 0], &[0, 6]]);
        for d in 0..3 {
            assert_eq!(
                BigInt::from(components(&g, d).len()),
                expected_component_count(&g, d)
            );
        }
    }
}
