//! The chain distance of a development and the inclusions it satisfies.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use serde::Serialize;

use crate::cover::{is_development, iterated_star, star, Development};
use crate::dyadic::{Dist, Dyadic};
use crate::error::{Error, Result};
use crate::gauge::ExtGauge;
use crate::pointset::PointSet;
use crate::verdict::{Verdict, Witness};

/// Members of `𝒰* = ⋃ₙ 𝒰ₙ`, deduplicated, each weighted by `2⁻ⁿ` for the
/// deepest level `n` containing it.
#[derive(Clone, Debug, Serialize)]
pub struct AuWeights {
    pub members: Vec<PointSet>,
    pub weights: Vec<Dyadic>,
}

impl AuWeights {
    pub fn of(dev: &Development) -> Self {
        let mut deepest: Vec<(PointSet, usize)> = Vec::new();
        for (i, level) in dev.levels().iter().enumerate() {
            for s in level.iter() {
                match deepest.iter_mut().find(|(m, _)| *m == s) {
                    Some(e) => e.1 = i + 1,
                    None => deepest.push((s, i + 1)),
                }
            }
        }
        AuWeights {
            members: deepest.iter().map(|e| e.0).collect(),
            weights: deepest.iter().map(|e| Dyadic::pow2_neg(e.1 as u32)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.len())
            .map(|i| {
                (0..self.len())
                    .filter(|&j| j != i && self.members[i].meets(self.members[j]))
                    .collect()
            })
            .collect()
    }
}

fn zero_twins(dev: &Development, rho: &mut ExtGauge) {
    for x in 0..dev.n() {
        for y in dev.twins(x).iter() {
            rho.set(x, y, Dist::ZERO);
        }
    }
}

/// The chain distance: the least total weight of a `𝒰*`-chain joining two
/// points, `∞` when none exists, and 0 between indistinguishable points.
///
/// Computed per source point as a node-weighted shortest path over the
/// intersection graph of `𝒰*`.
pub fn au_distance(dev: &Development) -> Result<ExtGauge> {
    let v = is_development(dev);
    if let Some(w) = v.failure() {
        return Err(Error::NotDevelopment(w));
    }
    Ok(au_distance_unchecked(dev))
}

/// [`au_distance`] without the development check.
pub fn au_distance_unchecked(dev: &Development) -> ExtGauge {
    let w = AuWeights::of(dev);
    let adj = w.adjacency();
    let n = dev.n();
    let mut rho = ExtGauge::from_fn(n, |_, _| Dist::Inf);
    for x in 0..n {
        let mut best: Vec<Option<Dyadic>> = vec![None; w.len()];
        let mut heap = BinaryHeap::new();
        for (i, m) in w.members.iter().enumerate() {
            if m.contains(x) {
                best[i] = Some(w.weights[i]);
                heap.push(Reverse((w.weights[i], i)));
            }
        }
        while let Some(Reverse((d, i))) = heap.pop() {
            if best[i] != Some(d) {
                continue;
            }
            for &j in &adj[i] {
                let cand = d + w.weights[j];
                if best[j].is_none_or(|b| cand < b) {
                    best[j] = Some(cand);
                    heap.push(Reverse((cand, j)));
                }
            }
        }
        for (i, m) in w.members.iter().enumerate() {
            if let Some(d) = best[i] {
                for y in m.iter() {
                    if Dist::Fin(d) < rho.get(x, y) {
                        rho.set(x, y, Dist::Fin(d));
                    }
                }
            }
        }
        rho.set(x, x, Dist::ZERO);
    }
    zero_twins(dev, &mut rho);
    rho
}

/// Independent reference for [`au_distance`]: depth-first enumeration of
/// every chain of at most `max_links` links. A partial chain is abandoned only
/// when an earlier one reached the same member with no more links and no
/// greater length, which cannot change any minimum. Each visited chain counts
/// against `budget`.
pub fn au_oracle(dev: &Development, max_links: usize, budget: usize) -> Result<ExtGauge> {
    let w = AuWeights::of(dev);
    let adj = w.adjacency();
    let n = dev.n();
    let mut rho = ExtGauge::from_fn(n, |_, _| Dist::Inf);
    let mut visited = 0usize;
    for start in 0..w.len() {
        // (member, links) -> least length seen
        let mut seen: HashMap<(usize, usize), Dyadic> = HashMap::new();
        let mut stack = vec![(start, 1usize, w.weights[start])];
        while let Some((last, links, len)) = stack.pop() {
            visited += 1;
            if visited > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            if (1..=links).any(|l| seen.get(&(last, l)).is_some_and(|&b| b <= len)) {
                continue;
            }
            seen.insert((last, links), len);
            for x in w.members[start].iter() {
                for y in w.members[last].iter() {
                    if Dist::Fin(len) < rho.get(x, y) {
                        rho.set(x, y, Dist::Fin(len));
                        rho.set(y, x, Dist::Fin(len));
                    }
                }
            }
            if links < max_links {
                for &j in adj[last].iter().rev() {
                    stack.push((j, links + 1, len + w.weights[j]));
                }
            }
        }
    }
    for x in 0..n {
        rho.set(x, x, Dist::ZERO);
    }
    zero_twins(dev, &mut rho);
    Ok(rho)
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    /// `𝒩ρ(x, 2⁻ⁿ) ⊆ Star(x, 𝒰ₙ)`.
    pub left: Verdict,
    /// `Star(x, 𝒰ₙ) ⊆ 𝒩ρ(x, 2⁻ⁿ]`.
    pub right: Verdict,
}

impl SandwichReport {
    pub fn both(&self) -> Verdict {
        self.left.clone().and(self.right.clone())
    }
}

/// Both sandwich inclusions at every point and every level.
pub fn verify_sandwich(rho: &ExtGauge, dev: &Development) -> SandwichReport {
    let mut left = Verdict::pass();
    let mut right = Verdict::pass();
    for (i, level) in dev.levels().iter().enumerate() {
        let r = Dist::Fin(Dyadic::pow2_neg(i as u32 + 1));
        for x in 0..dev.n() {
            let s = star(PointSet::singleton(x), level);
            let open = rho.ball(x, r);
            if left.is_pass() {
                if let Some(y) = open.difference(s).first() {
                    left = Verdict::fail(
                        Witness::new("sandwich:open ball escapes star")
                            .with("x", x)
                            .with("n", i + 1)
                            .with("y", y),
                    );
                }
            }
            if right.is_pass() {
                if let Some(y) = s.difference(rho.closed_ball(x, r)).first() {
                    right = Verdict::fail(
                        Witness::new("sandwich:star escapes closed ball")
                            .with("x", x)
                            .with("n", i + 1)
                            .with("y", y),
                    );
                }
            }
        }
    }
    SandwichReport { left, right }
}

#[derive(Clone, Debug, Serialize)]
pub struct StarBallReport {
    /// `Star(A, 𝒰₁) ⊆ 𝒩ρ(A, 1)` for each sampled `A`.
    pub set_star: Verdict,
    /// `𝒩ρ(x, n/2) ⊆ Star^(2ⁿ−1)(x, 𝒰₁)` for each `x` and `n ≤ max_n`.
    pub iterated: Verdict,
}

impl StarBallReport {
    pub fn both(&self) -> Verdict {
        self.set_star.clone().and(self.iterated.clone())
    }
}

pub fn verify_star_ball_inclusions(rho: &ExtGauge, dev: &Development, samples: &[PointSet], max_n: u32) -> StarBallReport {
    let u1 = dev.level(1);
    let mut set_star = Verdict::pass();
    for &a in samples {
        let s = star(a, u1);
        let b = rho.ball_of_set(a, Dist::ONE);
        if !s.is_subset(b) {
            set_star = Verdict::fail(
                Witness::new("lemma3.4:set star escapes ball")
                    .with("A", a)
                    .with("y", s.difference(b).first()),
            );
            break;
        }
    }
    let mut iterated = Verdict::pass();
    'outer: for n in 1..=max_n {
        let radius = Dist::Fin(Dyadic::new(n as u128, 1));
        let k = (1usize << n) - 1;
        for x in 0..dev.n() {
            let ball = rho.ball(x, radius);
            let s = iterated_star(PointSet::singleton(x), u1, k);
            if !ball.is_subset(s) {
                iterated = Verdict::fail(
                    Witness::new("lemma3.4:ball escapes iterated star")
                        .with("x", x)
                        .with("n", n)
                        .with("y", ball.difference(s).first()),
                );
                break 'outer;
            }
        }
    }
    StarBallReport { set_star, iterated }
}
