use std::collections::{HashMap, VecDeque};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::SpaceInstance;

/// A permutation of `{0, .., n-1}` stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).map(|i| i as u8).collect())
    }

    pub fn from_images(images: &[usize]) -> std::result::Result<Self, String> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in images {
            if y >= n {
                return Err(format!("image {y} out of range 0..{n}"));
            }
            if std::mem::replace(&mut seen[y], true) {
                return Err(format!("image {y} repeated"));
            }
        }
        Ok(Perm(images.iter().map(|&y| y as u8).collect()))
    }

    /// Product of disjoint cycles on `n` points.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Self {
        let mut img: Vec<usize> = (0..n).collect();
        for c in cycles {
            for (i, &a) in c.iter().enumerate() {
                img[a] = c[(i + 1) % c.len()];
            }
        }
        Perm::from_images(&img).expect("cycles describe a permutation")
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&y| y as usize).collect()
    }

    pub fn image(&self, a: PointSet) -> PointSet {
        a.iter().map(|x| self.apply(x)).collect()
    }

    pub fn preimage(&self, a: PointSet) -> PointSet {
        (0..self.n()).filter(|&x| a.contains(self.apply(x))).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.n()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y as usize] = x as u8;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &y)| i == y as usize)
    }
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.images())
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(|&y| y as usize))
    }
}

/// A finitely generated group of homeomorphisms together with a (possibly
/// capped) breadth-first enumeration of its elements.
#[derive(Clone, Debug)]
pub struct GroupAction {
    n: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
    cap: usize,
    complete: bool,
}

impl GroupAction {
    pub fn trivial(n: usize) -> Self {
        enumerate_perms(n, Vec::new(), 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Enumerated elements; index 0 is the identity.
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// True iff enumeration closed under the cap.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn position(&self, g: &Perm) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// `G·A`: the union of the orbits meeting `a` (exact under a cap).
    pub fn saturate_set(&self, a: PointSet) -> PointSet {
        self.orbits()
            .into_iter()
            .filter(|o| o.meets(a))
            .fold(PointSet::empty(), |acc, o| acc.union(o))
    }

    /// Some group element taking `from` to `to`: the first enumerated one, or
    /// else a product of generators along a shortest path between them.
    pub fn transporter(&self, from: usize, to: usize) -> Option<Perm> {
        if let Some(g) = self.elements.iter().find(|g| g.apply(from) == to) {
            return Some(g.clone());
        }
        let mut via: Vec<Option<Perm>> = vec![None; self.n];
        via[from] = Some(Perm::identity(self.n));
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            let at = via[x].clone().expect("queued points are reached");
            if x == to {
                return Some(at);
            }
            for g in &self.generators {
                for h in [g.clone(), g.inverse()] {
                    let y = h.apply(x);
                    if via[y].is_none() {
                        via[y] = Some(h.compose(&at));
                        queue.push_back(y);
                    }
                }
            }
        }
        None
    }

    /// Orbit partition of the generated group (exact even when the
    /// enumeration is capped, since orbits only depend on generators).
    pub fn orbits(&self) -> Vec<PointSet> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for g in &self.generators {
            for x in 0..self.n {
                let (a, b) = (find(&mut parent, x), find(&mut parent, g.apply(x)));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut blocks: Vec<PointSet> = Vec::new();
        let mut root_block: HashMap<usize, usize> = HashMap::new();
        for x in 0..self.n {
            let r = find(&mut parent, x);
            let idx = *root_block.entry(r).or_insert_with(|| {
                blocks.push(PointSet::empty());
                blocks.len() - 1
            });
            blocks[idx].insert(x);
        }
        blocks
    }
}

fn enumerate_perms(n: usize, generators: Vec<Perm>, cap: usize) -> GroupAction {
    let cap = cap.max(1);
    let id = Perm::identity(n);
    let mut moves: Vec<Perm> = Vec::new();
    for g in &generators {
        for h in [g.clone(), g.inverse()] {
            if !h.is_identity() && !moves.contains(&h) {
                moves.push(h);
            }
        }
    }
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    let mut complete = true;
    'bfs: while let Some(i) = queue.pop_front() {
        for m in &moves {
            let h = m.compose(&elements[i]);
            if index.contains_key(&h) {
                continue;
            }
            if elements.len() >= cap {
                complete = false;
                break 'bfs;
            }
            index.insert(h.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(h);
        }
    }
    GroupAction {
        n,
        generators,
        elements,
        index,
        cap,
        complete,
    }
}

/// Breadth-first closure of `generators` (and their inverses) up to `cap`
/// elements. Each generator must map every basis set to an open set; on a
/// finite space that makes it, and so every element, a homeomorphism.
pub fn enumerate_group(inst: &SpaceInstance, generators: Vec<Perm>, cap: usize) -> Result<GroupAction> {
    for (i, g) in generators.iter().enumerate() {
        if g.n() != inst.n() {
            return Err(Error::NotPermutation {
                generator: i,
                detail: format!("acts on {} points, instance has {}", g.n(), inst.n()),
            });
        }
        for h in [g.clone(), g.inverse()] {
            if let Some(b) = inst.basis().iter().find(|b| !inst.is_open(h.image(**b))) {
                return Err(Error::NotHomeomorphism {
                    generator: i,
                    basis_set: *b,
                });
            }
        }
    }
    Ok(enumerate_perms(inst.n(), generators, cap))
}
