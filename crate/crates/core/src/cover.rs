//! Open covers: stars, chains, chain components, refinement predicates and
//! developments.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::{Boundedness, SpaceInstance};
use crate::verdict::{Verdict, VerdictBuilder, Witness};

/// A family of sets, deduplicated by extension in first-seen order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Cover {
    sets: Vec<PointSet>,
}

impl Cover {
    pub fn new(sets: impl IntoIterator<Item = PointSet>) -> Self {
        let mut out: Vec<PointSet> = Vec::new();
        for s in sets {
            if !out.contains(&s) {
                out.push(s);
            }
        }
        Cover { sets: out }
    }

    /// A cover that must consist of nonempty open sets whose union is `X`.
    pub fn open_cover(inst: &SpaceInstance, sets: impl IntoIterator<Item = PointSet>) -> Result<Self> {
        let c = Cover::new(sets);
        for (i, s) in c.sets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::Reject {
                    rule: "cover member",
                    detail: format!("member {i} is empty"),
                });
            }
            if !inst.is_open(*s) {
                return Err(Error::Reject {
                    rule: "cover member",
                    detail: format!("member {i} = {s} is not open"),
                });
            }
        }
        if let Some(x) = inst.points().difference(c.union()).first() {
            return Err(Error::Reject {
                rule: "cover union",
                detail: format!("point {x} is not covered"),
            });
        }
        Ok(c)
    }

    pub fn sets(&self) -> &[PointSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn union(&self) -> PointSet {
        self.sets.iter().fold(PointSet::empty(), |acc, s| acc.union(*s))
    }

    pub fn contains(&self, s: PointSet) -> bool {
        self.sets.contains(&s)
    }

    pub fn iter(&self) -> impl Iterator<Item = PointSet> + '_ {
        self.sets.iter().copied()
    }
}

/// An ordered list of member indices with consecutive links meeting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub links: Vec<usize>,
}

impl Chain {
    pub fn union(&self, cover: &Cover) -> PointSet {
        self.links
            .iter()
            .fold(PointSet::empty(), |acc, &i| acc.union(cover.sets[i]))
    }

    pub fn is_valid(&self, cover: &Cover) -> bool {
        !self.links.is_empty()
            && self
                .links
                .windows(2)
                .all(|w| cover.sets[w[0]].meets(cover.sets[w[1]]))
    }
}

/// `Star(A, 𝒰)`: the union of the members meeting `a`.
pub fn star(a: PointSet, u: &Cover) -> PointSet {
    u.iter()
        .filter(|s| s.meets(a))
        .fold(PointSet::empty(), |acc, s| acc.union(s))
}

/// `Starⁿ(A, 𝒰)`; `n = 0` returns `a`.
pub fn iterated_star(a: PointSet, u: &Cover, n: usize) -> PointSet {
    let mut s = a;
    for _ in 0..n {
        let next = star(s, u);
        if next == s {
            break;
        }
        s = next;
    }
    s
}

/// The 𝒰-components of `{0, .., n-1}`. Uncovered points form singleton blocks.
pub fn chain_components(u: &Cover, n: usize) -> Vec<PointSet> {
    let mut blocks: Vec<PointSet> = Vec::new();
    let mut seen = PointSet::empty();
    for x in 0..n {
        if seen.contains(x) {
            continue;
        }
        let mut comp = iterated_star(PointSet::singleton(x), u, usize::MAX);
        comp.insert(x);
        seen = seen.union(comp);
        blocks.push(comp);
    }
    blocks
}

/// Every point star of `v` lies in a member of `u`.
pub fn is_star_refinement(v: &Cover, u: &Cover, n: usize) -> Verdict {
    for x in 0..n {
        let s = star(PointSet::singleton(x), v);
        if !u.iter().any(|m| s.is_subset(m)) {
            return Verdict::fail(
                Witness::new("star-refinement:point star fits no member")
                    .with("x", x)
                    .with("star", s),
            );
        }
    }
    Verdict::pass()
}

/// Every `v`-chain of at most `k` links lies in a member of `u`.
///
/// The search extends chains link by link. A chain whose running union fits
/// no member of `u` is itself the witness, so no extension of it is needed;
/// states are memoised on (last link, running union).
pub fn k_refines(v: &Cover, u: &Cover, k: usize) -> Verdict {
    let fits = |s: PointSet| u.iter().any(|m| s.is_subset(m));
    let mut best: HashMap<(usize, PointSet), usize> = HashMap::new();
    let mut stack: Vec<Vec<usize>> = (0..v.len()).rev().map(|i| vec![i]).collect();
    while let Some(links) = stack.pop() {
        let chain = Chain { links };
        let uni = chain.union(v);
        if !fits(uni) {
            return Verdict::fail(
                Witness::new("k-refinement:chain fits no member")
                    .with("k", k)
                    .with("chain", &chain.links)
                    .with("union", uni),
            );
        }
        let last = *chain.links.last().expect("chains are nonempty");
        let len = chain.links.len();
        match best.get(&(last, uni)) {
            Some(&l) if l <= len => continue,
            _ => {
                best.insert((last, uni), len);
            }
        }
        if len == k {
            continue;
        }
        for j in (0..v.len()).rev() {
            if v.sets[last].meets(v.sets[j]) {
                let mut next = chain.links.clone();
                next.push(j);
                stack.push(next);
            }
        }
    }
    Verdict::pass()
}

/// A finite truncation `𝒰₁, .., 𝒰_N` of a development, together with the
/// classes of topologically indistinguishable points of its ambient space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Development {
    n: usize,
    levels: Vec<Cover>,
    #[serde(skip)]
    twins: Vec<PointSet>,
}

impl Development {
    /// Levels must be open covers of `inst`.
    pub fn new(inst: &SpaceInstance, levels: Vec<Cover>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Reject {
                rule: "development levels",
                detail: "at least one level is required".into(),
            });
        }
        for (i, c) in levels.iter().enumerate() {
            Cover::open_cover(inst, c.iter()).map_err(|e| Error::Validation {
                field: format!("level {}", i + 1),
                source: Box::new(e),
            })?;
        }
        let twins = (0..inst.n())
            .map(|x| {
                (0..inst.n())
                    .filter(|&y| inst.min_nbhd(y) == inst.min_nbhd(x))
                    .collect()
            })
            .collect();
        Ok(Development {
            n: inst.n(),
            levels,
            twins,
        })
    }

    /// Levels over a bare ground set; all points are told apart.
    pub fn bare(n: usize, levels: Vec<Cover>) -> Self {
        Development {
            n,
            levels,
            twins: (0..n).map(PointSet::singleton).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> &[Cover] {
        &self.levels
    }

    /// Level `i`, counted from 1.
    pub fn level(&self, i: usize) -> &Cover {
        &self.levels[i - 1]
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Points indistinguishable from `x` in the ambient topology.
    pub fn twins(&self, x: usize) -> PointSet {
        self.twins[x]
    }

    /// The odd-indexed levels `𝒰₁, 𝒰₃, 𝒰₅, ..`.
    pub fn odd_levels(&self) -> Development {
        Development {
            n: self.n,
            levels: self.levels.iter().step_by(2).cloned().collect(),
            twins: self.twins.clone(),
        }
    }

    /// The first `depth` levels.
    pub fn truncate(&self, depth: usize) -> Development {
        Development {
            n: self.n,
            levels: self.levels[..depth.min(self.levels.len())].to_vec(),
            twins: self.twins.clone(),
        }
    }
}

/// The basis condition: whenever `z ∈ Star(x,𝒰ₘ) ∩ Star(y,𝒰ₙ)` some level `r`
/// within the truncation has `Star(z,𝒰ᵣ)` inside the intersection.
pub fn is_development(dev: &Development) -> Verdict {
    let n = dev.n();
    let stars: Vec<Vec<PointSet>> = dev
        .levels()
        .iter()
        .map(|c| (0..n).map(|x| star(PointSet::singleton(x), c)).collect())
        .collect();
    // Distinct point stars; the condition only depends on the sets.
    let mut basic: Vec<(usize, usize, PointSet)> = Vec::new();
    for (m, row) in stars.iter().enumerate() {
        for (x, s) in row.iter().enumerate() {
            if !basic.iter().any(|b| b.2 == *s) {
                basic.push((m, x, *s));
            }
        }
    }
    for (i, &(m, x, sx)) in basic.iter().enumerate() {
        for &(k, y, sy) in &basic[i..] {
            let meet = sx.intersection(sy);
            for z in meet.iter() {
                if !stars.iter().any(|row| row[z].is_subset(meet)) {
                    return Verdict::fail(
                        Witness::new("development:basis condition")
                            .with("x", x)
                            .with("m", m + 1)
                            .with("y", y)
                            .with("n", k + 1)
                            .with("z", z),
                    );
                }
            }
        }
    }
    Verdict::pass()
}

/// Each level from the second on `k`-refines its predecessor.
pub fn is_k_development(dev: &Development, k: usize) -> Verdict {
    let mut v = is_development(dev);
    for (i, w) in dev.levels().windows(2).enumerate() {
        if v.is_fail() {
            break;
        }
        let r = k_refines(&w[1], &w[0], k);
        if let Some(mut wit) = r.witness.clone() {
            wit = wit.with("level", i + 2);
            v = v.and(Verdict::fail(wit));
        }
    }
    v
}

/// `cl(Star(A, 𝒰))` is bounded for every bornology probe `A`.
pub fn is_proper_cover(u: &Cover, inst: &SpaceInstance) -> Verdict {
    let mut vb = VerdictBuilder::new();
    for a in inst.bornology().probes(inst.n()) {
        let s = star(a, u);
        match inst.classify_closure(s) {
            Boundedness::Bounded => {}
            Boundedness::Unbounded => {
                vb.fail(
                    Witness::new("proper cover:star closure unbounded")
                        .with("A", a)
                        .with("star", s),
                );
                break;
            }
            Boundedness::Indeterminate => vb.indeterminate(|| {
                Witness::new("proper cover:star reaches frontier")
                    .with("A", a)
                    .with("star", s)
            }),
        }
    }
    vb.finish()
}
