//! Finite bounded-below posets.
//!
//! The full order relation is materialised as bitsets at construction, so
//! comparisons and bound computations are set operations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

pub use crate::poly::IntPolynomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("poset has no elements")]
    Empty,
    #[error("unknown element {0}")]
    UnknownElement(usize),
    #[error("element {0} covers itself")]
    SelfCover(usize),
    #[error("cover ({0}, {1}) listed twice")]
    DuplicateCover(usize, usize),
    #[error("cover relation contains a cycle")]
    Cycle,
    #[error("relation is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("expected a unique minimum, found {0} minimal elements")]
    NoMinimum(usize),
    #[error("({lower}, {upper}) is not a cover: {via} lies strictly between")]
    NotACover {
        lower: usize,
        upper: usize,
        via: usize,
    },
    #[error("poset is not graded")]
    Ungraded,
    #[error("the interval below {0} is not a geometric lattice")]
    NotGeometricLattice(usize),
    #[error("poset is not a geometric lattice")]
    NotAGeometricLattice,
    #[error("generator {0} is not a permutation of the elements")]
    NotPermutation(usize),
    #[error("generator {generator} does not preserve the cover ({lower}, {upper})")]
    NotAutomorphism {
        generator: usize,
        lower: usize,
        upper: usize,
    },
    #[error("action is not translative: {x} and {gx} share an upper bound")]
    NotTranslative { x: usize, gx: usize },
    #[error("orbit map is not an isomorphism below {0}")]
    LocalIsomorphismFailed(usize),
    #[error("modularity tests disagree for {x} below {top}")]
    ModularDisagreement { top: usize, x: usize },
}

#[derive(Debug)]
pub struct FinitePoset {
    labels: Vec<String>,
    covers: Vec<(usize, usize)>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    above: Vec<FixedBitSet>,
    below: Vec<FixedBitSet>,
    height: Vec<usize>,
    graded: bool,
    bottom: usize,
    atoms: Vec<usize>,
    order: Vec<usize>,
    loc_geo: OnceLock<bool>,
    geo: OnceLock<bool>,
}

impl Clone for FinitePoset {
    fn clone(&self) -> Self {
        FinitePoset {
            labels: self.labels.clone(),
            covers: self.covers.clone(),
            up: self.up.clone(),
            down: self.down.clone(),
            above: self.above.clone(),
            below: self.below.clone(),
            height: self.height.clone(),
            graded: self.graded,
            bottom: self.bottom,
            atoms: self.atoms.clone(),
            order: self.order.clone(),
            loc_geo: self.loc_geo.clone(),
            geo: self.geo.clone(),
        }
    }
}

impl PartialEq for FinitePoset {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.covers == other.covers
    }
}

impl Eq for FinitePoset {}

fn ones(b: &FixedBitSet) -> impl Iterator<Item = usize> + '_ {
    b.ones()
}

impl FinitePoset {
    /// Builds a poset from its cover relation, rejecting anything that is not
    /// the Hasse diagram of a poset with a unique minimum.
    pub fn new(labels: Vec<String>, covers: Vec<(usize, usize)>) -> Result<Self, PosetError> {
        let n = labels.len();
        if n == 0 {
            return Err(PosetError::Empty);
        }
        let mut seen = BTreeSet::new();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for &(x, y) in &covers {
            if x >= n {
                return Err(PosetError::UnknownElement(x));
            }
            if y >= n {
                return Err(PosetError::UnknownElement(y));
            }
            if x == y {
                return Err(PosetError::SelfCover(x));
            }
            if !seen.insert((x, y)) {
                return Err(PosetError::DuplicateCover(x, y));
            }
            up[x].push(y);
            down[y].push(x);
        }
        for v in up.iter_mut().chain(down.iter_mut()) {
            v.sort_unstable();
        }
        // Kahn
        let mut indeg: Vec<usize> = down.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let minimal: Vec<usize> = queue.iter().copied().collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(x) = queue.pop_front() {
            topo.push(x);
            for &y in &up[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    queue.push_back(y);
                }
            }
        }
        if topo.len() != n {
            return Err(PosetError::Cycle);
        }
        if minimal.len() != 1 {
            return Err(PosetError::NoMinimum(minimal.len()));
        }
        let bottom = minimal[0];
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        let mut height = vec![0usize; n];
        for &y in &topo {
            below[y].insert(y);
            for &x in &down[y] {
                let bx = below[x].clone();
                below[y].union_with(&bx);
                height[y] = height[y].max(height[x] + 1);
            }
        }
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for (y, b) in below.iter().enumerate() {
            for x in b.ones() {
                above[x].insert(y);
            }
        }
        for &(x, y) in &covers {
            let mut between = above[x].clone();
            between.intersect_with(&below[y]);
            if let Some(via) = between.ones().find(|&z| z != x && z != y) {
                return Err(PosetError::NotACover {
                    lower: x,
                    upper: y,
                    via,
                });
            }
        }
        let graded = covers.iter().all(|&(x, y)| height[y] == height[x] + 1);
        let atoms = (0..n).filter(|&i| height[i] == 1).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (height[i], i));
        let mut covers = covers;
        covers.sort_unstable();
        Ok(FinitePoset {
            labels,
            covers,
            up,
            down,
            above,
            below,
            height,
            graded,
            bottom,
            atoms,
            order,
            loc_geo: OnceLock::new(),
            geo: OnceLock::new(),
        })
    }

    /// Builds a poset from an order predicate; covers are its transitive
    /// reduction.
    pub fn from_leq(
        labels: Vec<String>,
        leq: impl Fn(usize, usize) -> bool,
    ) -> Result<Self, PosetError> {
        let n = labels.len();
        let mut lt_above = vec![FixedBitSet::with_capacity(n); n];
        let mut lt_below = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in 0..n {
                if i != j && leq(i, j) {
                    if j < i && leq(j, i) {
                        return Err(PosetError::NotAntisymmetric(j, i));
                    }
                    lt_above[i].insert(j);
                    lt_below[j].insert(i);
                }
            }
        }
        let mut covers = Vec::new();
        for i in 0..n {
            for j in lt_above[i].ones() {
                if lt_above[i].is_disjoint(&lt_below[j]) {
                    covers.push((i, j));
                }
            }
        }
        Self::new(labels, covers)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn upper_covers(&self, x: usize) -> &[usize] {
        &self.up[x]
    }

    pub fn lower_covers(&self, x: usize) -> &[usize] {
        &self.down[x]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn is_graded(&self) -> bool {
        self.graded
    }

    /// Length of the longest chain from the minimum; equals the rank when graded.
    pub fn height(&self, x: usize) -> usize {
        self.height[x]
    }

    pub fn rank(&self, x: usize) -> Option<usize> {
        self.graded.then(|| self.height[x])
    }

    /// Largest element height.
    pub fn max_height(&self) -> usize {
        self.height.iter().copied().max().unwrap_or(0)
    }

    /// Elements sorted by height, then index.
    pub fn linear_extension(&self) -> &[usize] {
        &self.order
    }

    pub fn check(&self, x: usize) -> Result<(), PosetError> {
        if x < self.len() {
            Ok(())
        } else {
            Err(PosetError::UnknownElement(x))
        }
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.below[y].contains(x)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn above_set(&self, x: usize) -> &FixedBitSet {
        &self.above[x]
    }

    pub fn below_set(&self, x: usize) -> &FixedBitSet {
        &self.below[x]
    }

    /// Principal order ideal below `x`, ascending.
    pub fn interval_below(&self, x: usize) -> Vec<usize> {
        self.below[x].ones().collect()
    }

    /// Elements all of whose atoms lie in `atoms`.
    pub fn ideal_of_atoms(&self, atoms: &[usize]) -> FixedBitSet {
        let mut allowed = FixedBitSet::with_capacity(self.len());
        for &a in atoms {
            allowed.insert(a);
        }
        let mut q = FixedBitSet::with_capacity(self.len());
        for x in 0..self.len() {
            if self
                .atoms
                .iter()
                .all(|&a| !self.leq(a, x) || allowed.contains(a))
            {
                q.insert(x);
            }
        }
        q
    }

    /// Atoms below `x`.
    pub fn atoms_below(&self, x: usize) -> Vec<usize> {
        self.atoms
            .iter()
            .copied()
            .filter(|&a| self.leq(a, x))
            .collect()
    }

    pub fn minimal_of(&self, set: &FixedBitSet) -> Vec<usize> {
        set.ones()
            .filter(|&z| {
                let mut b = self.below[z].clone();
                b.intersect_with(set);
                b.count_ones(..) == 1
            })
            .collect()
    }

    pub fn maximal_of(&self, set: &FixedBitSet) -> Vec<usize> {
        set.ones()
            .filter(|&z| {
                let mut b = self.above[z].clone();
                b.intersect_with(set);
                b.count_ones(..) == 1
            })
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.up[x].is_empty()).collect()
    }

    pub fn is_pure(&self) -> bool {
        let m = self.maximal_elements();
        m.iter().all(|&x| self.height[x] == self.height[m[0]])
    }

    /// Minimal upper bounds of `x` and `y` (the join set).
    pub fn min_upper_bounds(&self, x: usize, y: usize) -> Result<Vec<usize>, PosetError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.join_set(&[x, y]))
    }

    /// Maximal lower bounds of `x` and `y` (the meet set).
    pub fn max_lower_bounds(&self, x: usize, y: usize) -> Result<Vec<usize>, PosetError> {
        self.check(x)?;
        self.check(y)?;
        let mut l = self.below[x].clone();
        l.intersect_with(&self.below[y]);
        Ok(self.maximal_of(&l))
    }

    /// Minimal upper bounds of an arbitrary set of elements.
    pub fn join_set(&self, items: &[usize]) -> Vec<usize> {
        let mut u = FixedBitSet::with_capacity(self.len());
        u.insert_range(..);
        for &x in items {
            u.intersect_with(&self.above[x]);
        }
        self.minimal_of(&u)
    }

    pub fn has_common_upper_bound(&self, x: usize, y: usize) -> bool {
        !self.above[x].is_disjoint(&self.above[y])
    }

    /// The join of `a` and `b` inside the interval below `top`, when unique.
    pub fn join_below(&self, a: usize, b: usize, top: usize) -> Option<usize> {
        let mut u = self.above[a].clone();
        u.intersect_with(&self.above[b]);
        u.intersect_with(&self.below[top]);
        let m = u.ones().min_by_key(|&z| (self.height[z], z))?;
        u.is_subset(&self.above[m]).then_some(m)
    }

    /// The meet of `a` and `b`, when unique.
    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        let mut l = self.below[a].clone();
        l.intersect_with(&self.below[b]);
        let m = l.ones().max_by_key(|&z| (self.height[z], usize::MAX - z))?;
        l.is_subset(&self.below[m]).then_some(m)
    }

    /// Möbius function from the minimum.
    pub fn mobius(&self) -> Vec<BigInt> {
        let mut mu = vec![BigInt::zero(); self.len()];
        for &x in &self.order {
            if x == self.bottom {
                mu[x] = BigInt::one();
                continue;
            }
            let s: BigInt = self.below[x]
                .ones()
                .filter(|&y| y != x)
                .map(|y| &mu[y])
                .sum();
            mu[x] = -s;
        }
        mu
    }

    pub fn char_poly(&self) -> Result<IntPolynomial, PosetError> {
        if !self.graded {
            return Err(PosetError::Ungraded);
        }
        let r = self.max_height();
        let mu = self.mobius();
        let mut c = vec![BigInt::zero(); r + 1];
        for (x, m) in mu.iter().enumerate() {
            c[r - self.height[x]] += m;
        }
        Ok(IntPolynomial::new(c))
    }

    /// Whether the interval below `top` is a geometric lattice.
    pub fn is_geometric_lattice_below(&self, top: usize) -> bool {
        if !self.graded {
            return false;
        }
        let elems: Vec<usize> = self.below[top].ones().collect();
        for (i, &a) in elems.iter().enumerate() {
            for &b in &elems[i + 1..] {
                if self.join_below(a, b, top).is_none() {
                    return false;
                }
            }
        }
        let atoms: Vec<usize> = self.atoms_below(top);
        for &u in &elems {
            let mut reached = FixedBitSet::with_capacity(self.len());
            for &a in &atoms {
                if self.leq(a, u) {
                    continue;
                }
                let j = self.join_below(u, a, top).expect("lattice");
                if self.height[j] != self.height[u] + 1 {
                    return false;
                }
                reached.insert(j);
            }
            if self.up[u]
                .iter()
                .any(|&w| self.leq(w, top) && !reached.contains(w))
            {
                return false;
            }
        }
        true
    }

    /// The unique maximum, if there is one.
    pub fn top(&self) -> Option<usize> {
        let m = self.maximal_elements();
        (m.len() == 1).then(|| m[0])
    }

    pub fn is_lattice(&self) -> bool {
        let Some(t) = self.top() else { return false };
        (0..self.len()).all(|a| (a + 1..self.len()).all(|b| self.join_below(a, b, t).is_some()))
    }

    pub fn is_geometric_lattice(&self) -> bool {
        self.top()
            .is_some_and(|t| self.is_geometric_lattice_below(t))
    }

    /// Graded, and every principal ideal is a geometric lattice.
    ///
    /// Lower intervals of a geometric lattice are geometric, so only maximal
    /// elements are inspected.
    pub fn is_locally_geometric(&self) -> bool {
        *self.loc_geo.get_or_init(|| {
            self.graded
                && self
                    .maximal_elements()
                    .iter()
                    .all(|&x| self.is_geometric_lattice_below(x))
        })
    }

    /// Locally geometric plus the atom exchange condition over all bases.
    pub fn is_geometric(&self) -> bool {
        *self
            .geo
            .get_or_init(|| self.is_locally_geometric() && self.exchange_holds())
    }

    fn exchange_holds(&self) -> bool {
        let na = self.atoms.len();
        let apos: BTreeMap<usize, usize> = self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, i))
            .collect();
        // good[x]: atoms a with a not below x and a, x sharing an upper bound
        let mut by_height: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); self.max_height() + 1];
        for x in 0..self.len() {
            let good: Vec<usize> = self
                .atoms
                .iter()
                .enumerate()
                .filter(|&(_, &a)| !self.leq(a, x) && self.has_common_upper_bound(a, x))
                .map(|(i, _)| i)
                .collect();
            by_height[self.height[x]].insert(good);
        }
        let goods: Vec<Vec<FixedBitSet>> = by_height
            .iter()
            .map(|s| {
                s.iter()
                    .map(|g| {
                        let mut b = FixedBitSet::with_capacity(na);
                        for &i in g {
                            b.insert(i);
                        }
                        b
                    })
                    .collect()
            })
            .collect();
        for y in 0..self.len() {
            let r = self.height[y];
            if r < 2 {
                continue;
            }
            let ay: Vec<usize> = self.atoms_below(y);
            let tests: Vec<&FixedBitSet> = goods[..r].iter().flatten().collect();
            let mut chosen = FixedBitSet::with_capacity(na);
            if !self.bases_ok(y, r, &ay, &apos, 0, self.bottom, &mut chosen, 0, &tests) {
                return false;
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn bases_ok(
        &self,
        y: usize,
        r: usize,
        ay: &[usize],
        apos: &BTreeMap<usize, usize>,
        start: usize,
        join: usize,
        chosen: &mut FixedBitSet,
        size: usize,
        tests: &[&FixedBitSet],
    ) -> bool {
        if size == r {
            return tests.iter().all(|g| !g.is_disjoint(chosen));
        }
        for k in start..ay.len() {
            let a = ay[k];
            if self.leq(a, join) {
                continue;
            }
            let Some(j) = self.join_below(join, a, y) else {
                continue;
            };
            let p = apos[&a];
            chosen.insert(p);
            let ok = self.bases_ok(y, r, ay, apos, k + 1, j, chosen, size + 1, tests);
            chosen.set(p, false);
            if !ok {
                return false;
            }
        }
        true
    }

    /// Modularity of `x` in the geometric lattice below `top`, evaluated by the
    /// complement antichain test and by the rank identity.
    pub fn modular_in_interval(&self, top: usize, x: usize) -> Result<bool, PosetError> {
        self.check(top)?;
        self.check(x)?;
        if !self.leq(x, top) || !self.is_geometric_lattice_below(top) {
            return Err(PosetError::NotGeometricLattice(top));
        }
        let elems: Vec<usize> = self.below[top].ones().collect();
        let mut comps = Vec::new();
        let mut rank_ok = true;
        for &y in &elems {
            let j = self.join_below(x, y, top).expect("lattice");
            let m = self.meet(x, y).expect("lattice");
            if self.height[x] + self.height[y] != self.height[j] + self.height[m] {
                rank_ok = false;
            }
            if j == top && m == self.bottom {
                comps.push(y);
            }
        }
        let antichain = comps
            .iter()
            .all(|&a| comps.iter().all(|&b| a == b || !self.leq(a, b)));
        if antichain != rank_ok {
            return Err(PosetError::ModularDisagreement { top, x });
        }
        Ok(rank_ok)
    }

    pub fn is_modular_element(&self, x: usize) -> Result<bool, PosetError> {
        self.check(x)?;
        let top = self.top().ok_or(PosetError::NotAGeometricLattice)?;
        if !self.is_geometric_lattice_below(top) {
            return Err(PosetError::NotAGeometricLattice);
        }
        self.modular_in_interval(top, x)
    }

    /// Subposet on `elems` (which must contain a unique minimum); element `i`
    /// of the result is `elems[i]` after sorting.
    pub fn induced(&self, elems: &[usize]) -> Result<(FinitePoset, Vec<usize>), PosetError> {
        let mut keep: Vec<usize> = elems.to_vec();
        keep.sort_unstable();
        keep.dedup();
        for &x in &keep {
            self.check(x)?;
        }
        let mut inside = FixedBitSet::with_capacity(self.len());
        for &x in &keep {
            inside.insert(x);
        }
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut covers = Vec::new();
        for &x in &keep {
            let mut ups = self.above[x].clone();
            ups.intersect_with(&inside);
            for y in ones(&ups) {
                if y == x {
                    continue;
                }
                let mut between = ups.clone();
                between.intersect_with(&self.below[y]);
                if between.count_ones(..) == 2 {
                    covers.push((pos[&x], pos[&y]));
                }
            }
        }
        let labels = keep.iter().map(|&x| self.labels[x].clone()).collect();
        Ok((FinitePoset::new(labels, covers)?, keep))
    }

    /// Orbit poset of a translative action given by generating permutations.
    pub fn quotient(&self, generators: &[Vec<usize>]) -> Result<Quotient, PosetError> {
        let n = self.len();
        let cover_set: BTreeSet<(usize, usize)> = self.covers.iter().copied().collect();
        for (gi, g) in generators.iter().enumerate() {
            let mut hit = vec![false; n];
            if g.len() != n {
                return Err(PosetError::NotPermutation(gi));
            }
            for &y in g {
                if y >= n || hit[y] {
                    return Err(PosetError::NotPermutation(gi));
                }
                hit[y] = true;
            }
            for &(x, y) in &self.covers {
                if !cover_set.contains(&(g[x], g[y])) {
                    return Err(PosetError::NotAutomorphism {
                        generator: gi,
                        lower: x,
                        upper: y,
                    });
                }
            }
        }
        // orbits by union-find over generator edges
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let nx = p[c];
                p[c] = r;
                c = nx;
            }
            r
        }
        for g in generators {
            for (x, &gx) in g.iter().enumerate() {
                let (a, b) = (find(&mut parent, x), find(&mut parent, gx));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..n {
            let r = find(&mut parent, x);
            groups.entry(r).or_default().push(x);
        }
        let orbits: Vec<Vec<usize>> = groups.into_values().collect();
        let mut orbit_of = vec![0; n];
        for (i, o) in orbits.iter().enumerate() {
            for &x in o {
                orbit_of[x] = i;
            }
        }
        for o in &orbits {
            for &x in o {
                for &y in o {
                    if x != y && self.has_common_upper_bound(x, y) {
                        return Err(PosetError::NotTranslative { x, gx: y });
                    }
                }
            }
        }
        let mut members = vec![FixedBitSet::with_capacity(n); orbits.len()];
        for (i, o) in orbits.iter().enumerate() {
            for &x in o {
                members[i].insert(x);
            }
        }
        let labels = orbits.iter().map(|o| self.labels[o[0]].clone()).collect();
        let poset = FinitePoset::from_leq(labels, |i, j| {
            !members[i].is_disjoint(&self.below[orbits[j][0]])
        })?;
        let q = Quotient {
            poset,
            orbit_of,
            orbits,
        };
        q.check_local_isomorphisms(self)?;
        Ok(q)
    }

    /// Searches for an order isomorphism `self -> other`.
    pub fn find_isomorphism(&self, other: &FinitePoset) -> Option<Vec<usize>> {
        if self.len() != other.len() || self.covers.len() != other.covers.len() {
            return None;
        }
        let sig = |p: &FinitePoset, x: usize| {
            (
                p.height[x],
                p.up[x].len(),
                p.down[x].len(),
                p.below[x].count_ones(..),
                p.above[x].count_ones(..),
            )
        };
        let mut ms: Vec<_> = (0..self.len()).map(|x| sig(self, x)).collect();
        let mut mo: Vec<_> = (0..other.len()).map(|x| sig(other, x)).collect();
        ms.sort();
        mo.sort();
        if ms != mo {
            return None;
        }
        let mut map = vec![usize::MAX; self.len()];
        let mut used = vec![false; other.len()];
        fn go(
            p: &FinitePoset,
            q: &FinitePoset,
            k: usize,
            map: &mut [usize],
            used: &mut [bool],
            sig: &dyn Fn(&FinitePoset, usize) -> (usize, usize, usize, usize, usize),
        ) -> bool {
            if k == p.len() {
                return true;
            }
            let x = p.order[k];
            let sx = sig(p, x);
            for y in 0..q.len() {
                if used[y] || sig(q, y) != sx {
                    continue;
                }
                let consistent = p.order[..k]
                    .iter()
                    .all(|&w| p.leq(w, x) == q.leq(map[w], y) && p.leq(x, w) == q.leq(y, map[w]));
                if !consistent {
                    continue;
                }
                map[x] = y;
                used[y] = true;
                if go(p, q, k + 1, map, used, sig) {
                    return true;
                }
                used[y] = false;
                map[x] = usize::MAX;
            }
            false
        }
        go(self, other, 0, &mut map, &mut used, &sig).then_some(map)
    }

    /// Whether `map` is an order isomorphism `self -> other`.
    pub fn is_isomorphism(&self, other: &FinitePoset, map: &[usize]) -> bool {
        if map.len() != self.len() || other.len() != self.len() {
            return false;
        }
        let mut hit = vec![false; other.len()];
        for &y in map {
            if y >= other.len() || hit[y] {
                return false;
            }
            hit[y] = true;
        }
        (0..self.len())
            .all(|x| (0..self.len()).all(|y| self.leq(x, y) == other.leq(map[x], map[y])))
    }

    /// Graphviz rendering with one rank row per height.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=box];\n");
        let mut layers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.len() {
            layers.entry(self.height[x]).or_default().push(x);
        }
        for (h, xs) in &layers {
            let _ = write!(s, "  {{ rank=same; /* rank {h} */");
            for &x in xs {
                let label = self.labels[x].replace('\\', "\\\\").replace('"', "\\\"");
                let _ = write!(s, " n{x} [label=\"{label}\"];");
            }
            s.push_str(" }\n");
        }
        for &(x, y) in &self.covers {
            let _ = writeln!(s, "  n{x} -> n{y};");
        }
        s.push_str("}\n");
        s
    }
}

/// Result of quotienting by a translative action.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub poset: FinitePoset,
    /// Orbit index of every upstairs element.
    pub orbit_of: Vec<usize>,
    /// Members of each orbit, ascending; orbits are ordered by least member.
    pub orbits: Vec<Vec<usize>>,
}

impl Quotient {
    /// Checks that `p -> Gp` is an isomorphism from every principal ideal
    /// upstairs onto the principal ideal of its orbit.
    pub fn check_local_isomorphisms(&self, up: &FinitePoset) -> Result<(), PosetError> {
        let q = &self.poset;
        for z in 0..up.len() {
            let gz = self.orbit_of[z];
            let src: Vec<usize> = up.interval_below(z);
            let img: Vec<usize> = src.iter().map(|&p| self.orbit_of[p]).collect();
            let distinct: BTreeSet<usize> = img.iter().copied().collect();
            if distinct.len() != src.len() || distinct.len() != q.below_set(gz).count_ones(..) {
                return Err(PosetError::LocalIsomorphismFailed(z));
            }
            if !distinct.iter().all(|&o| q.leq(o, gz)) {
                return Err(PosetError::LocalIsomorphismFailed(z));
            }
            for (i, &a) in src.iter().enumerate() {
                for (j, &b) in src.iter().enumerate() {
                    if up.leq(a, b) != q.leq(img[i], img[j]) {
                        return Err(PosetError::LocalIsomorphismFailed(z));
                    }
                }
            }
        }
        Ok(())
    }

    /// Brute-force comparison of orbit joins with the orbits of all joins of
    /// orbit members. Returns the first offending pair of orbits.
    pub fn check_join_formula(&self, up: &FinitePoset) -> Result<(), (usize, usize)> {
        let q = &self.poset;
        for i in 0..q.len() {
            for j in i..q.len() {
                let lhs: BTreeSet<usize> = q.join_set(&[i, j]).into_iter().collect();
                let mut rhs = BTreeSet::new();
                for &x in &self.orbits[i] {
                    for &y in &self.orbits[j] {
                        for z in up.join_set(&[x, y]) {
                            rhs.insert(self.orbit_of[z]);
                        }
                    }
                }
                if lhs != rhs {
                    return Err((i, j));
                }
            }
        }
        Ok(())
    }
}
