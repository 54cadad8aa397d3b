//! Generators for standard families: graphic arrangements, Dowling posets,
//! partition and Boolean lattices, and finite-index sublattice data.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactalg::{frac_mod1, hnf, member, saturate, snf, ExactError, IntMatrix, LatticeBasis};
use crate::layers::{Ambient, Arrangement, Layer, LayerError, LayerPoset};
use crate::poset::{FinitePoset, PosetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("graph has no edges")]
    NoEdges,
    #[error("edge ({0}, {1}) is a loop or leaves the vertex range")]
    BadEdge(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("group table is invalid: {0}")]
    BadGroup(&'static str),
    #[error("action table is invalid: {0}")]
    BadAction(&'static str),
    #[error("n must be at least 1")]
    EmptyGround,
    #[error("sublattice is not of full rank")]
    NotFullRank,
    #[error("vector {0} does not lie in the sublattice")]
    OutsideSublattice(usize),
    #[error("a translated layer is missing from the poset")]
    NotInvariant,
    #[error(transparent)]
    Layer(#[from] LayerError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// Simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimpleGraph {
    pub n: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, FamilyError> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(FamilyError::BadEdge(a, b));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(FamilyError::DuplicateEdge(a, b));
            }
        }
        Ok(SimpleGraph { n, edges: set })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        SimpleGraph { n, edges }
    }

    pub fn cycle(n: usize) -> Self {
        let edges = (0..n)
            .map(|i| (i.min((i + 1) % n), i.max((i + 1) % n)))
            .collect();
        SimpleGraph { n, edges }
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        SimpleGraph { n, edges }
    }

    pub fn adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Edge set after relabelling vertex `i` as `perm[i]`.
    fn relabel(&self, perm: &[usize]) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
            .collect();
        e.sort_unstable();
        e
    }

    /// Lexicographically least relabelled edge list.
    pub fn canonical_form(&self) -> Vec<(usize, usize)> {
        let mut best: Option<Vec<(usize, usize)>> = None;
        let mut perm: Vec<usize> = (0..self.n).collect();
        permutations(&mut perm, 0, &mut |p| {
            let e = self.relabel(p);
            if best.as_ref().is_none_or(|b| e < *b) {
                best = Some(e);
            }
        });
        best.unwrap_or_default()
    }
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// One representative of every isomorphism class of connected graphs on
/// exactly `n` vertices.
pub fn connected_graphs(n: usize) -> Vec<SimpleGraph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut classes: BTreeMap<Vec<(usize, usize)>, SimpleGraph> = BTreeMap::new();
    for mask in 0u64..1 << pairs.len() {
        let edges: BTreeSet<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = SimpleGraph { n, edges };
        if !g.is_connected() {
            continue;
        }
        let key = g.canonical_form();
        classes.entry(key.clone()).or_insert_with(|| SimpleGraph {
            n,
            edges: key.into_iter().collect(),
        });
    }
    classes.into_values().collect()
}

/// Maximum cardinality search, then a perfect elimination check on the
/// reverse visiting order.
pub fn is_chordal(g: &SimpleGraph) -> bool {
    let adj = g.adjacency();
    let n = g.n;
    let mut weight = vec![0usize; n];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let x = (0..n)
            .filter(|&x| !done[x])
            .max_by_key(|&x| (weight[x], std::cmp::Reverse(x)))
            .expect("vertices remain");
        done[x] = true;
        order.push(x);
        for &y in &adj[x] {
            if !done[y] {
                weight[y] += 1;
            }
        }
    }
    // vertex order[i]'s earlier neighbours must form a clique
    let mut pos = vec![0; n];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i;
    }
    for (i, &x) in order.iter().enumerate() {
        let earlier: Vec<usize> = adj[x].iter().copied().filter(|&y| pos[y] < i).collect();
        let Some(&parent) = earlier.iter().max_by_key(|&&y| pos[y]) else {
            continue;
        };
        if earlier
            .iter()
            .any(|&y| y != parent && !adj[parent].contains(&y))
        {
            return false;
        }
    }
    true
}

/// Vectors `e_i - e_j` for the edges, written in a basis of the saturation
/// of their span.
pub fn graphic_arrangement(
    g: &SimpleGraph,
    d: usize,
    v: usize,
) -> Result<Arrangement, FamilyError> {
    if g.edges.is_empty() {
        return Err(FamilyError::NoEdges);
    }
    let rows: Vec<Vec<BigInt>> = g
        .edges
        .iter()
        .map(|&(a, b)| {
            let mut r = vec![BigInt::zero(); g.n];
            r[a] = BigInt::one();
            r[b] = -BigInt::one();
            r
        })
        .collect();
    let m = IntMatrix::from_rows(rows.clone(), g.n)?;
    let (sat, _) = saturate(&m);
    let vectors = rows
        .iter()
        .map(|r| member(r, &sat).map(|c| c.expect("edge lies in its saturation")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Arrangement::new(Ambient::new(sat.rank(), d, v)?, vectors)?)
}

/// Finite group by multiplication table, with an action on a finite set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupTable {
    pub mul: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverse: Vec<usize>,
    /// `action[g][s] = g.s`
    pub action: Vec<Vec<usize>>,
}

impl FiniteGroupTable {
    pub fn new(mul: Vec<Vec<usize>>, action: Vec<Vec<usize>>) -> Result<Self, FamilyError> {
        let m = mul.len();
        if m == 0
            || mul
                .iter()
                .any(|r| r.len() != m || r.iter().any(|&x| x >= m))
        {
            return Err(FamilyError::BadGroup("table is not square over 0..m"));
        }
        let identity = (0..m)
            .find(|&e| (0..m).all(|g| mul[e][g] == g && mul[g][e] == g))
            .ok_or(FamilyError::BadGroup("no identity"))?;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(FamilyError::BadGroup("not associative"));
                    }
                }
            }
        }
        let inverse = (0..m)
            .map(|g| (0..m).find(|&h| mul[g][h] == identity))
            .collect::<Option<Vec<usize>>>()
            .ok_or(FamilyError::BadGroup("missing inverse"))?;
        if action.len() != m {
            return Err(FamilyError::BadAction(
                "one row per group element is required",
            ));
        }
        let k = action[0].len();
        if action
            .iter()
            .any(|r| r.len() != k || r.iter().any(|&s| s >= k))
        {
            return Err(FamilyError::BadAction("rows must map 0..k into itself"));
        }
        if (0..k).any(|s| action[identity][s] != s) {
            return Err(FamilyError::BadAction("identity does not act trivially"));
        }
        for a in 0..m {
            for b in 0..m {
                if (0..k).any(|s| action[mul[a][b]][s] != action[a][action[b][s]]) {
                    return Err(FamilyError::BadAction("not compatible with multiplication"));
                }
            }
        }
        Ok(FiniteGroupTable {
            mul,
            identity,
            inverse,
            action,
        })
    }

    /// `Z/m` acting trivially on `k` points.
    pub fn cyclic(m: usize, k: usize) -> Self {
        let mul = (0..m)
            .map(|a| (0..m).map(|b| (a + b) % m).collect())
            .collect();
        let action = vec![(0..k).collect(); m];
        Self::new(mul, action).expect("cyclic group")
    }

    /// `Z/m` acting on itself by translation.
    pub fn cyclic_regular(m: usize) -> Self {
        let mul: Vec<Vec<usize>> = (0..m)
            .map(|a| (0..m).map(|b| (a + b) % m).collect())
            .collect();
        Self::new(mul.clone(), mul).expect("cyclic group")
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn set_size(&self) -> usize {
        self.action[0].len()
    }
}

/// Block of a partial G-partition with its normalized coloring.
type Block = (Vec<usize>, Vec<usize>);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct DowlingElement {
    blocks: Vec<Block>,
    z: BTreeMap<usize, usize>,
}

impl DowlingElement {
    fn label(&self) -> String {
        let mut parts: Vec<String> = self
            .blocks
            .iter()
            .map(|(b, c)| {
                let inner: Vec<String> = b
                    .iter()
                    .zip(c)
                    .map(|(i, g)| format!("{}^{}", i + 1, g))
                    .collect();
                inner.join(" ")
            })
            .collect();
        if !self.z.is_empty() {
            let zs: Vec<String> = self
                .z
                .iter()
                .map(|(i, s)| format!("{}->{}", i + 1, s))
                .collect();
            parts.push(format!("z: {}", zs.join(" ")));
        }
        parts.join(" | ")
    }
}

/// Right-translates a coloring so its first entry is the identity.
fn normalize(g: &FiniteGroupTable, colors: &[usize]) -> Vec<usize> {
    let shift = g.inverse[colors[0]];
    colors.iter().map(|&c| g.mul[c][shift]).collect()
}

fn merge_blocks(g: &FiniteGroupTable, a: &Block, b: &Block, h: usize) -> Block {
    let mut pairs: Vec<(usize, usize)> = a.0.iter().copied().zip(a.1.iter().copied()).collect();
    pairs.extend(b.0.iter().copied().zip(b.1.iter().map(|&c| g.mul[c][h])));
    pairs.sort_unstable();
    let colors: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    (pairs.iter().map(|p| p.0).collect(), normalize(g, &colors))
}

/// Dowling poset `D_n(G, S)`, built upwards from the all-singletons element
/// by the two covering moves.
pub fn dowling_poset(n: usize, g: &FiniteGroupTable) -> Result<FinitePoset, FamilyError> {
    if n == 0 {
        return Err(FamilyError::EmptyGround);
    }
    let start = DowlingElement {
        blocks: (0..n).map(|i| (vec![i], vec![g.identity])).collect(),
        z: BTreeMap::new(),
    };
    let mut index: BTreeMap<DowlingElement, usize> = BTreeMap::new();
    let mut elems = vec![start.clone()];
    index.insert(start, 0);
    let mut covers: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let e = elems[x].clone();
        let mut ups = Vec::new();
        let k = e.blocks.len();
        for i in 0..k {
            for j in i + 1..k {
                for h in 0..g.order() {
                    let mut blocks: Vec<Block> = e
                        .blocks
                        .iter()
                        .enumerate()
                        .filter(|&(t, _)| t != i && t != j)
                        .map(|(_, b)| b.clone())
                        .collect();
                    blocks.push(merge_blocks(g, &e.blocks[i], &e.blocks[j], h));
                    blocks.sort();
                    ups.push(DowlingElement {
                        blocks,
                        z: e.z.clone(),
                    });
                }
            }
            for s in 0..g.set_size() {
                let (b, colors) = &e.blocks[i];
                let mut z = e.z.clone();
                for (&v, &c) in b.iter().zip(colors) {
                    z.insert(v, g.action[c][s]);
                }
                let mut blocks = e.blocks.clone();
                blocks.remove(i);
                ups.push(DowlingElement { blocks, z });
            }
        }
        for u in ups {
            let y = match index.get(&u) {
                Some(&y) => y,
                None => {
                    let y = elems.len();
                    index.insert(u.clone(), y);
                    elems.push(u);
                    queue.push_back(y);
                    y
                }
            };
            covers.insert((x, y));
        }
    }
    let labels = elems.iter().map(DowlingElement::label).collect();
    Ok(FinitePoset::new(labels, covers.into_iter().collect())?)
}

/// Elements of the copy of `D_{n-1}(G, S)` in `D_n(G, S)`: those with
/// `{n}` as a singleton block.
pub fn dowling_lower_copy(p: &FinitePoset, n: usize) -> Vec<usize> {
    let needle = format!("{}^", n);
    (0..p.len())
        .filter(|&x| {
            p.label(x)
                .split(" | ")
                .any(|part| part.split(' ').count() == 1 && part.starts_with(&needle))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classical {
    Partition,
    Boolean,
}

/// Partition lattice `Π_n` or Boolean lattice `B_n`.
pub fn classical(kind: Classical, n: usize) -> Result<FinitePoset, FamilyError> {
    match kind {
        Classical::Boolean => {
            let labels = (0u64..1 << n)
                .map(|m| {
                    let s: Vec<String> = (0..n)
                        .filter(|i| m >> i & 1 == 1)
                        .map(|i| (i + 1).to_string())
                        .collect();
                    format!("{{{}}}", s.join(","))
                })
                .collect();
            Ok(FinitePoset::from_leq(labels, |a, b| a & !b == 0)?)
        }
        Classical::Partition => {
            let parts = set_partitions(n);
            let labels = parts
                .iter()
                .map(|p| {
                    let blocks: Vec<String> = p
                        .iter()
                        .map(|b| b.iter().map(|i| (i + 1).to_string()).collect::<String>())
                        .collect();
                    blocks.join("|")
                })
                .collect();
            let block_of: Vec<Vec<usize>> = parts
                .iter()
                .map(|p| {
                    let mut v = vec![0; n];
                    for (k, b) in p.iter().enumerate() {
                        for &i in b {
                            v[i] = k;
                        }
                    }
                    v
                })
                .collect();
            Ok(FinitePoset::from_leq(labels, |a, b| {
                parts[a]
                    .iter()
                    .all(|blk| blk.iter().all(|&i| block_of[b][i] == block_of[b][blk[0]]))
            })?)
        }
    }
}

/// Set partitions of `0..n`, blocks sorted by least element.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![vec![]];
    for i in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for k in 0..p.len() {
                let mut q: Vec<Vec<usize>> = p.clone();
                q[k].push(i);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// The vectors of `a` in coordinates of the rows of `basis`, a full-rank
/// sublattice containing all of them.
pub fn finite_index_rewrite(
    a: &Arrangement,
    basis: &IntMatrix,
) -> Result<Arrangement, FamilyError> {
    let n = a.ambient.n;
    if basis.rows() != n || basis.cols() != n || basis.det()?.is_zero() {
        return Err(FamilyError::NotFullRank);
    }
    let (h, u) = hnf(basis);
    let lat = LatticeBasis {
        ambient_dim: n,
        basis: h,
    };
    let mut out = Vec::with_capacity(a.len());
    for (i, alpha) in a.vectors.iter().enumerate() {
        let c = member(alpha, &lat)?.ok_or(FamilyError::OutsideSublattice(i))?;
        out.push(u.vec_mul(&c)?);
    }
    Ok(Arrangement::new(a.ambient, out)?)
}

/// Generators of the deck group of `Hom(Z^n, G) -> Hom(sub, G)` as
/// permutations of the layers. Circle factors are translated one at a time.
pub fn deck_action(lp: &LayerPoset, sub: &IntMatrix) -> Result<Vec<Vec<usize>>, FamilyError> {
    let amb = lp.arrangement.ambient;
    if sub.rows() != amb.n || sub.cols() != amb.n || sub.det()?.is_zero() {
        return Err(FamilyError::NotFullRank);
    }
    let t = snf(sub);
    let mut gens = Vec::new();
    for (i, f) in t.diagonal.iter().enumerate() {
        if f.is_one() {
            continue;
        }
        // w = V e_i / f_i is a character of Z^n / sub
        let w: Vec<BigRational> = (0..amb.n)
            .map(|r| BigRational::new(t.v[(r, i)].clone(), f.clone()))
            .collect();
        for k in 0..amb.d {
            let perm = lp
                .layers
                .iter()
                .map(|layer| {
                    let moved = translate(layer, &w, k);
                    lp.index_of(&moved).ok_or(FamilyError::NotInvariant)
                })
                .collect::<Result<Vec<usize>, _>>()?;
            gens.push(perm);
        }
    }
    Ok(gens)
}

fn translate(layer: &Layer, w: &[BigRational], k: usize) -> Layer {
    let mut out = layer.clone();
    for (r, row) in out.character.iter_mut().enumerate() {
        let shift: BigRational = layer
            .lattice
            .basis
            .row(r)
            .iter()
            .zip(w)
            .map(|(x, y)| BigRational::from_integer(x.clone()) * y)
            .sum();
        row[k] = frac_mod1(&(&row[k] + shift));
    }
    out
}
