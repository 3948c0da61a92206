//! Seeded instance generators shared by the integration tests.
#![allow(dead_code)]

use isometrize::cover::{Cover, Development};
use isometrize::dyadic::{Dist, Dyadic};
use isometrize::gauge::ExtGauge;
use isometrize::space::{enumerate_group, orbit_quotient, Bornology, Boundedness, GroupAction, Perm, SpaceInstance};
use isometrize::tunnels::TunnelSystem;
use isometrize::PointSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GROUP_CAP: usize = 64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_set(rng: &mut ChaCha8Rng, n: usize, p: f64) -> PointSet {
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}

pub fn nonempty_set(rng: &mut ChaCha8Rng, n: usize, p: f64) -> PointSet {
    loop {
        let s = random_set(rng, n, p);
        if !s.is_empty() {
            return s;
        }
    }
}

pub fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Perm {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Perm::from_images(&v).unwrap()
}

/// A permutation made of a few disjoint cycles over a random subset.
pub fn sparse_perm(rng: &mut ChaCha8Rng, n: usize) -> Perm {
    let mut pts: Vec<usize> = (0..n).collect();
    pts.shuffle(rng);
    let k = rng.gen_range(2..=n.max(2)).min(n);
    let mut images: Vec<usize> = (0..n).collect();
    let mut start = 0;
    while start + 1 < k {
        let len = rng.gen_range(2..=(k - start));
        let cyc = &pts[start..start + len];
        for i in 0..len {
            images[cyc[i]] = cyc[(i + 1) % len];
        }
        start += len;
    }
    Perm::from_images(&images).unwrap()
}

/// Closure of a family of sets under the generators and their inverses.
pub fn close_under(gens: &[Perm], sets: Vec<PointSet>) -> Vec<PointSet> {
    let mut out: Vec<PointSet> = Vec::new();
    for s in sets {
        if !out.contains(&s) {
            out.push(s);
        }
    }
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            for h in [g.clone(), g.inverse()] {
                let img = h.image(out[i]);
                if !out.contains(&img) {
                    out.push(img);
                }
            }
        }
        i += 1;
    }
    out
}

/// Adds `X` and all nonempty pairwise intersections until closed.
pub fn intersection_closure(n: usize, sets: Vec<PointSet>) -> Vec<PointSet> {
    let mut out = sets;
    out.push(PointSet::full(n));
    out.retain(|s| !s.is_empty());
    out.sort_by_key(|s| s.search_key());
    out.dedup();
    loop {
        let mut added = false;
        for i in 0..out.len() {
            for j in i + 1..out.len() {
                let m = out[i].intersection(out[j]);
                if !m.is_empty() && !out.contains(&m) {
                    out.push(m);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    out.sort_by_key(|s| s.search_key());
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BornologyKind {
    Full,
    /// One invariant generator; an invariant frontier marks what it misses.
    Horizon,
    /// Closures of minimal neighbourhoods, saturated; not union-closed.
    Local,
}

/// A group-invariant instance: the basis is built from saturated random sets,
/// so every generator is a homeomorphism.
pub struct GroupInstance {
    pub inst: SpaceInstance,
    pub group: GroupAction,
    pub kind: BornologyKind,
}

pub fn group_instance(rng: &mut ChaCha8Rng, n: usize, kind: BornologyKind, partition_bias: bool) -> GroupInstance {
    let gens: Vec<Perm> = (0..rng.gen_range(0..=2)).map(|_| sparse_perm(rng, n)).collect();
    let seeds: Vec<PointSet> = if partition_bias {
        // a random partition, possibly coarsened; saturation may break it
        let mut blocks: Vec<PointSet> = Vec::new();
        for x in 0..n {
            if blocks.is_empty() || rng.gen_bool(0.5) {
                blocks.push(PointSet::singleton(x));
            } else {
                let i = rng.gen_range(0..blocks.len());
                blocks[i].insert(x);
            }
        }
        blocks
    } else {
        (0..rng.gen_range(1..=4)).map(|_| nonempty_set(rng, n, 0.4)).collect()
    };
    let basis = intersection_closure(n, close_under(&gens, seeds));
    let base = SpaceInstance::new(n, basis, Bornology::full()).unwrap();
    let group = enumerate_group(&base, gens.clone(), GROUP_CAP).unwrap();
    let inst = match kind {
        BornologyKind::Full => base,
        BornologyKind::Horizon => {
            let orbits = group.orbits();
            let f = orbits[rng.gen_range(0..orbits.len())];
            let generator = (0..n)
                .map(|x| base.closure(base.min_nbhd(x)))
                .filter(|c| !c.meets(f))
                .fold(PointSet::empty(), |a, c| a.union(c));
            let born = if generator.is_empty() { Bornology::generated(vec![]) } else { Bornology::generated(vec![generator]) };
            base.with_bornology(born).unwrap().with_frontier(f).unwrap()
        }
        BornologyKind::Local => {
            let cls: Vec<PointSet> = (0..n).map(|x| base.closure(base.min_nbhd(x))).collect();
            base.with_bornology(Bornology::generated(close_under(&gens, cls))).unwrap()
        }
    };
    GroupInstance { inst, group, kind }
}

/// An exhaustion of the orbit space: unions of quotient minimal
/// neighbourhoods, grown while they stay bounded, ending in the whole space.
pub fn quotient_exhaustion(inst: &SpaceInstance, group: &GroupAction) -> Vec<PointSet> {
    let q = orbit_quotient(inst, group);
    let qs = q.space();
    let all = qs.points();
    let mut d = Vec::new();
    let mut cur = PointSet::empty();
    for o in 0..qs.n() {
        let next = cur.union(qs.min_nbhd(o));
        if next == cur {
            continue;
        }
        if next == all || !qs.is_closed(next) || qs.classify(next) == Boundedness::Unbounded || !cur.is_subset(qs.interior(next)) {
            break;
        }
        cur = next;
        d.push(cur);
    }
    d.push(all);
    d
}

/// Random development of `levels` covers over `n` points with `|𝒰*|` at most
/// `max_members`; each level covers every point. With `star` set, each level
/// is made to star-refine the previous by splitting it.
pub fn random_development(rng: &mut ChaCha8Rng, n: usize, levels: usize, max_members: usize) -> Development {
    let mut covers: Vec<Cover> = Vec::new();
    let per = (max_members / levels).max(1);
    for _ in 0..levels {
        let mut sets: Vec<PointSet> = Vec::new();
        let mut covered = PointSet::empty();
        for _ in 0..rng.gen_range(1..=per) {
            let s = nonempty_set(rng, n, 0.35);
            covered = covered.union(s);
            sets.push(s);
        }
        for x in PointSet::full(n).difference(covered).iter() {
            // join a random existing member, or stand alone
            if rng.gen_bool(0.5) {
                let i = rng.gen_range(0..sets.len());
                sets[i].insert(x);
            } else {
                sets.push(PointSet::singleton(x));
            }
        }
        covers.push(Cover::new(sets));
    }
    Development::bare(n, covers)
}

/// A chain of covers in which each level star-refines the previous: level
/// `i+1` consists of pieces of a random partition finer than the previous
/// partition; level 1 may merge partition blocks into overlapping sets.
pub fn star_development(rng: &mut ChaCha8Rng, n: usize, levels: usize) -> Development {
    let mut part: Vec<PointSet> = vec![PointSet::full(n)];
    let mut covers = Vec::new();
    for lvl in 0..levels {
        let mut next = Vec::new();
        for b in &part {
            let mut pieces: Vec<PointSet> = Vec::new();
            for x in b.iter() {
                if pieces.is_empty() || rng.gen_bool(0.4) {
                    pieces.push(PointSet::singleton(x));
                } else {
                    let i = rng.gen_range(0..pieces.len());
                    pieces[i].insert(x);
                }
            }
            next.extend(pieces);
        }
        part = next;
        if lvl == 0 && part.len() > 1 {
            // a non-partition first level: overlapping unions of blocks
            let mut sets = part.clone();
            for _ in 0..rng.gen_range(0..3) {
                let a = part[rng.gen_range(0..part.len())];
                let b = part[rng.gen_range(0..part.len())];
                sets.push(a.union(b));
            }
            covers.push(Cover::new(sets));
        } else {
            covers.push(Cover::new(part.clone()));
        }
    }
    Development::bare(n, covers)
}

pub fn dy(num: u128, exp: u32) -> Dyadic {
    Dyadic::new(num, exp)
}

/// A random ∞-gauge: shortest paths over random positive dyadic edge weights
/// inside a random block partition (distinct blocks at `∞`).
pub fn random_inf_gauge(rng: &mut ChaCha8Rng, n: usize, max_blocks: usize) -> ExtGauge {
    let nb = rng.gen_range(1..=max_blocks.min(n));
    let block: Vec<usize> = (0..n).map(|x| if x < nb { x } else { rng.gen_range(0..nb) }).collect();
    let mut d = ExtGauge::from_fn(n, |x, y| if x == y { Dist::ZERO } else { Dist::Inf });
    for x in 0..n {
        for y in x + 1..n {
            if block[x] == block[y] && rng.gen_bool(0.7) {
                let w = Dist::Fin(dy(rng.gen_range(1..=12), rng.gen_range(0..=3)));
                d.set(x, y, w);
                d.set(y, x, w);
            }
        }
    }
    // connect each block along its points, then close under shortest paths
    for b in 0..nb {
        let pts: Vec<usize> = (0..n).filter(|&x| block[x] == b).collect();
        for w in pts.windows(2) {
            if d.get(w[0], w[1]) == Dist::Inf {
                let v = Dist::Fin(dy(rng.gen_range(1..=8), rng.gen_range(0..=2)));
                d.set(w[0], w[1], v);
                d.set(w[1], w[0], v);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d.get(i, k) + d.get(k, j);
                if via < d.get(i, j) {
                    d.set(i, j, via);
                }
            }
        }
    }
    d
}

/// A connecting tunnel system between crevasses of `rho` with random
/// positive dyadic lengths, plus a few extra tunnels.
pub fn random_tunnels(rng: &mut ChaCha8Rng, rho: &ExtGauge) -> TunnelSystem {
    let part = isometrize::gauge::crevasse_partition(rho);
    let mut t = Vec::new();
    let blocks = &part.blocks;
    let pick = |rng: &mut ChaCha8Rng, b: PointSet| {
        let v = b.to_vec();
        v[rng.gen_range(0..v.len())]
    };
    for i in 1..blocks.len() {
        let j = rng.gen_range(0..i);
        let a = pick(rng, blocks[j]);
        let b = pick(rng, blocks[i]);
        t.push((a, b, dy(rng.gen_range(1..=16), rng.gen_range(0..=2))));
    }
    for _ in 0..rng.gen_range(0..3) {
        if blocks.len() < 2 {
            break;
        }
        let i = rng.gen_range(0..blocks.len());
        let j = rng.gen_range(0..blocks.len());
        if i == j {
            continue;
        }
        let a = pick(rng, blocks[i]);
        let b = pick(rng, blocks[j]);
        t.push((a, b, dy(rng.gen_range(1..=16), rng.gen_range(0..=2))));
    }
    // keep the first length per pair
    let mut seen: Vec<(usize, usize)> = Vec::new();
    t.retain(|&(a, b, _)| {
        let k = (a.min(b), a.max(b));
        if seen.contains(&k) {
            false
        } else {
            seen.push(k);
            true
        }
    });
    TunnelSystem::new(t).unwrap()
}
