//! Tunnel systems bridging the crevasses of an ∞-gauge, and the finite gauge
//! they induce.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use serde::{Serialize, Serializer};

use crate::dyadic::{Dist, Dyadic};
use crate::error::{Error, Result};
use crate::gauge::{crevasse_partition, gauge_axioms_check, is_proper_gauge, CrevassePartition, ExtGauge};
use crate::pointset::PointSet;
use crate::space::{Boundedness, GroupAction, SpaceInstance};
use crate::verdict::{Verdict, VerdictBuilder, Witness};

/// Unordered point pairs with positive lengths, kept sorted by pair.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TunnelSystem {
    lengths: BTreeMap<(usize, usize), Dyadic>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl TunnelSystem {
    pub fn empty() -> Self {
        TunnelSystem::default()
    }

    /// Rejects loops and pairs listed twice with different lengths.
    pub fn new(tunnels: impl IntoIterator<Item = (usize, usize, Dyadic)>) -> Result<Self> {
        let mut lengths = BTreeMap::new();
        for (a, b, l) in tunnels {
            if a == b {
                return Err(Error::InvalidTunnels(Witness::new("tunnel:loop").with("x", a)));
            }
            if let Some(prev) = lengths.insert(key(a, b), l) {
                if prev != l {
                    return Err(Error::InvalidTunnels(
                        Witness::new("tunnel:conflicting lengths").with("x", a).with("y", b),
                    ));
                }
            }
        }
        Ok(TunnelSystem { lengths })
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Dyadic)> + '_ {
        self.lengths.iter().map(|(&(a, b), &l)| (a, b, l))
    }

    pub fn length(&self, a: usize, b: usize) -> Option<Dyadic> {
        self.lengths.get(&key(a, b)).copied()
    }

    /// Least length; `None` without tunnels.
    pub fn lambda0(&self) -> Option<Dyadic> {
        self.lengths.values().min().copied()
    }

    /// Distinct lengths and one past the largest.
    pub fn thresholds(&self) -> Vec<Dist> {
        let mut v: Vec<Dist> = self.lengths.values().map(|&l| Dist::Fin(l)).collect();
        v.sort();
        v.dedup();
        let beyond = v.last().map_or(Dist::ONE, |&d| d + Dist::ONE);
        v.push(beyond);
        v
    }
}

impl Serialize for TunnelSystem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter().map(|(a, b, l)| (a, b, l.to_string())))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TunnelReport {
    /// No tunnel joins two points of one crevasse.
    pub disjoint_from_crevasses: Verdict,
    /// Crevasses and tunnels form a connected graph.
    pub connected: Verdict,
    /// Every length is positive.
    pub positive_lengths: Verdict,
    #[serde(serialize_with = "ser_opt_dyadic")]
    pub lambda0: Option<Dyadic>,
}

fn ser_opt_dyadic<S: Serializer>(v: &Option<Dyadic>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(d) => s.serialize_str(&d.to_string()),
        None => s.serialize_none(),
    }
}

impl TunnelReport {
    pub fn all(&self) -> Verdict {
        self.disjoint_from_crevasses
            .clone()
            .and(self.connected.clone())
            .and(self.positive_lengths.clone())
    }
}

pub fn validate_tunnel_system(rho: &ExtGauge, t: &TunnelSystem) -> TunnelReport {
    let part = crevasse_partition(rho);
    validate_against(&part, rho.n(), t)
}

fn validate_against(part: &CrevassePartition, n: usize, t: &TunnelSystem) -> TunnelReport {
    let mut disjoint = Verdict::pass();
    let mut positive = Verdict::pass();
    for (a, b, l) in t.iter() {
        if disjoint.is_pass() && (a >= n || b >= n || part.together(a, b)) {
            disjoint = Verdict::fail(Witness::new("tunnel:inside one crevasse").with("x", a).with("y", b));
        }
        if positive.is_pass() && l.is_zero() {
            positive = Verdict::fail(Witness::new("tunnel:nonpositive length").with("x", a).with("y", b));
        }
    }
    // Union-find over crevasse blocks.
    let mut parent: Vec<usize> = (0..part.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b, _) in t.iter().filter(|&(a, b, _)| a < n && b < n) {
        let (ra, rb) = (find(&mut parent, part.block_of(a)), find(&mut parent, part.block_of(b)));
        parent[ra.max(rb)] = ra.min(rb);
    }
    let mut connected = Verdict::pass();
    for i in 1..part.len() {
        if find(&mut parent, i) != find(&mut parent, 0) {
            connected = Verdict::fail(
                Witness::new("tunnel:crevasses not connected")
                    .with("x", part.representatives[0])
                    .with("y", part.representatives[i]),
            );
            break;
        }
    }
    TunnelReport {
        disjoint_from_crevasses: disjoint,
        connected,
        positive_lengths: positive,
        lambda0: t.lambda0(),
    }
}

fn require_valid(rho: &ExtGauge, t: &TunnelSystem) -> Result<()> {
    let r = validate_tunnel_system(rho, t).all();
    match r.witness {
        Some(w) if r.is_fail() => Err(Error::InvalidTunnels(w)),
        _ => Ok(()),
    }
}

/// The tunnel distance `σ`: least total length of a step sequence, each step
/// lying in one crevasse (length `ρ`) or being a tunnel (length `λ`).
///
/// One within-crevasse step dominates any run of them, so this is a shortest
/// path on the points with those two kinds of edge.
pub fn tunnel_distance(rho: &ExtGauge, t: &TunnelSystem) -> Result<ExtGauge> {
    require_valid(rho, t)?;
    let n = rho.n();
    let mut tunnel_adj: Vec<Vec<(usize, Dyadic)>> = vec![Vec::new(); n];
    for (a, b, l) in t.iter() {
        tunnel_adj[a].push((b, l));
        tunnel_adj[b].push((a, l));
    }
    let mut sigma = ExtGauge::zero(n);
    for x in 0..n {
        let mut best: Vec<Option<Dyadic>> = vec![None; n];
        best[x] = Some(Dyadic::ZERO);
        let mut heap = BinaryHeap::from([Reverse((Dyadic::ZERO, x))]);
        while let Some(Reverse((d, u))) = heap.pop() {
            if best[u] != Some(d) {
                continue;
            }
            let within = (0..n).filter_map(|v| rho.get(u, v).finite().map(|w| (v, w)));
            for (v, w) in within.chain(tunnel_adj[u].iter().copied()) {
                let cand = d + w;
                if best[v].is_none_or(|b| cand < b) {
                    best[v] = Some(cand);
                    heap.push(Reverse((cand, v)));
                }
            }
        }
        for (y, b) in best.into_iter().enumerate() {
            sigma.set(x, y, b.map_or(Dist::Inf, Dist::Fin));
        }
    }
    Ok(sigma)
}

/// One step of a step sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    WithinCrevasse,
    Tunnel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepSequence {
    pub points: Vec<usize>,
    pub kinds: Vec<StepKind>,
}

impl StepSequence {
    /// `μ(S)`, or `None` if some step is neither inside a crevasse nor a tunnel.
    pub fn length(&self, rho: &ExtGauge, t: &TunnelSystem) -> Option<Dyadic> {
        let mut total = Dyadic::ZERO;
        for (w, kind) in self.points.windows(2).zip(&self.kinds) {
            let step = match kind {
                StepKind::WithinCrevasse => rho.get(w[0], w[1]).finite()?,
                StepKind::Tunnel => t.length(w[0], w[1])?,
            };
            total = total + step;
        }
        Some(total)
    }
}

/// Reference for [`tunnel_distance`]: enumerate step sequences of at most
/// `max_steps` steps, taking arbitrary within-crevasse steps. A partial
/// sequence is dropped only when another reached the same point in no more
/// steps with no greater length.
pub fn step_sequence_oracle(rho: &ExtGauge, t: &TunnelSystem, max_steps: usize, budget: usize) -> Result<ExtGauge> {
    let n = rho.n();
    let mut sigma = ExtGauge::from_fn(n, |_, _| Dist::Inf);
    let mut visited = 0usize;
    for x in 0..n {
        let mut seen: HashMap<(usize, usize), Dyadic> = HashMap::new();
        let mut stack = vec![(x, 0usize, Dyadic::ZERO)];
        while let Some((u, steps, len)) = stack.pop() {
            visited += 1;
            if visited > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            if (0..=steps).any(|s| seen.get(&(u, s)).is_some_and(|&b| b <= len)) {
                continue;
            }
            seen.insert((u, steps), len);
            if Dist::Fin(len) < sigma.get(x, u) {
                sigma.set(x, u, Dist::Fin(len));
            }
            if steps == max_steps {
                continue;
            }
            for v in 0..n {
                if v == u {
                    continue;
                }
                let mut options = Vec::new();
                if let Some(w) = rho.get(u, v).finite() {
                    options.push(w);
                }
                if let Some(l) = t.length(u, v) {
                    options.push(l);
                }
                for w in options {
                    stack.push((v, steps + 1, len + w));
                }
            }
        }
    }
    Ok(sigma)
}

#[derive(Clone, Debug, Serialize)]
pub struct TunnelAgreementReport {
    pub sigma_le_rho: Verdict,
    /// `σ = ρ` wherever `min(ρ, σ) < λ₀`.
    pub equal_below_lambda0: Verdict,
    /// `𝒩σ(x,ε) = 𝒩ρ(x,ε)` at every threshold `ε ≤ λ₀`.
    pub balls_equal: Verdict,
    /// Conditions 1–4 for `σ` and finiteness.
    pub sigma_gauge: Verdict,
}

impl TunnelAgreementReport {
    pub fn all(&self) -> Verdict {
        self.sigma_le_rho
            .clone()
            .and(self.equal_below_lambda0.clone())
            .and(self.balls_equal.clone())
            .and(self.sigma_gauge.clone())
    }
}

pub fn verify_tunnel_agreement(rho: &ExtGauge, t: &TunnelSystem, sigma: &ExtGauge, inst: &SpaceInstance) -> TunnelAgreementReport {
    let n = rho.n();
    let lambda0 = t.lambda0().map_or(Dist::Inf, Dist::Fin);
    let mut le = Verdict::pass();
    let mut eq = Verdict::pass();
    for x in 0..n {
        for y in 0..n {
            let (r, s) = (rho.get(x, y), sigma.get(x, y));
            if le.is_pass() && s > r {
                le = Verdict::fail(Witness::new("thm3.6:sigma exceeds rho").with("x", x).with("y", y));
            }
            if eq.is_pass() && r.min(s) < lambda0 && r != s {
                eq = Verdict::fail(
                    Witness::new("thm3.6:unequal below lambda0")
                        .with("x", x)
                        .with("y", y)
                        .with("rho", r)
                        .with("sigma", s),
                );
            }
        }
    }
    let mut radii: Vec<Dist> = rho.thresholds();
    radii.extend(sigma.thresholds());
    radii.push(lambda0);
    radii.retain(|&e| e <= lambda0 && e.is_finite());
    radii.sort();
    radii.dedup();
    let mut balls = Verdict::pass();
    'b: for eps in radii {
        for x in 0..n {
            if rho.ball(x, eps) != sigma.ball(x, eps) {
                balls = Verdict::fail(Witness::new("thm3.6:balls differ").with("x", x).with("eps", eps));
                break 'b;
            }
        }
    }
    let axioms = gauge_axioms_check(sigma, inst, false).all();
    let finite = Verdict::from_bool(sigma.is_finite_valued(), || Witness::new("thm3.6:sigma infinite"));
    TunnelAgreementReport {
        sigma_le_rho: le,
        equal_below_lambda0: eq,
        balls_equal: balls,
        sigma_gauge: axioms.and(finite),
    }
}

/// `T(A, ε)`: far ends of tunnels from `a` shorter than `eps`.
pub fn tunnel_neighborhood(t: &TunnelSystem, a: PointSet, eps: Dist) -> PointSet {
    let mut out = PointSet::empty();
    for (x, y, l) in t.iter() {
        if Dist::Fin(l) < eps {
            if a.contains(x) {
                out.insert(y);
            }
            if a.contains(y) {
                out.insert(x);
            }
        }
    }
    out
}

fn bounded_check(inst: &SpaceInstance, vb: &mut VerdictBuilder, set: PointSet, fail: impl FnOnce() -> Witness) -> bool {
    match inst.classify_closure(set) {
        Boundedness::Bounded => true,
        Boundedness::Unbounded => {
            vb.fail(fail());
            false
        }
        Boundedness::Indeterminate => {
            vb.indeterminate(|| {
                let mut w = fail();
                w.step.push_str(" (undecided: reaches frontier)");
                w
            });
            true
        }
    }
}

/// `cl(T(A, ε))` is bounded for every bornology probe and threshold.
pub fn is_proper_tunnel_system(t: &TunnelSystem, inst: &SpaceInstance) -> Verdict {
    let mut vb = VerdictBuilder::new();
    for a in inst.bornology().probes(inst.n()) {
        for eps in t.thresholds() {
            let s = tunnel_neighborhood(t, a, eps);
            let ok = bounded_check(inst, &mut vb, s, || {
                Witness::new("proper tunnels:neighbourhood unbounded")
                    .with("A", a)
                    .with("eps", eps)
                    .with("T", s)
            });
            if !ok {
                return vb.finish();
            }
        }
    }
    vb.finish()
}

/// Consecutive representatives joined with unit length.
pub fn make_chain_tunnels(part: &CrevassePartition) -> TunnelSystem {
    let reps = &part.representatives;
    TunnelSystem::new(reps.windows(2).map(|w| (w[0], w[1], Dyadic::ONE))).expect("distinct representatives")
}

/// The first representative joined to the `i`-th with length `i`.
pub fn make_star_tunnels(part: &CrevassePartition) -> TunnelSystem {
    let reps = &part.representatives;
    TunnelSystem::new(
        reps.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &r)| (reps[0], r, Dyadic::from_int(i as u64))),
    )
    .expect("distinct representatives")
}

/// Tunnels mapped onto tunnels with equal lengths by every generator and
/// every enumerated element. Generators decide invariance exactly, so the
/// verdict is not qualified by a cap.
pub fn is_invariant_tunnels(group: &GroupAction, t: &TunnelSystem) -> Verdict {
    for (k, g) in group.generators().iter().chain(group.elements()).enumerate() {
        for (a, b, l) in t.iter() {
            if t.length(g.apply(a), g.apply(b)) != Some(l) {
                return Verdict::fail(
                    Witness::new("invariance:tunnel moved")
                        .with("g", k)
                        .with("x", a)
                        .with("y", b),
                );
            }
        }
    }
    Verdict::pass()
}

/// `(G𝒯, λ_G)`: all images of tunnels, each with the least length among its
/// preimages. Requires `ρ` invariant and `cl(T(GA, ε))` bounded for every
/// bornology probe `A` and threshold `ε`.
pub fn g_saturate_tunnels(group: &GroupAction, rho: &ExtGauge, t: &TunnelSystem, inst: &SpaceInstance) -> Result<TunnelSystem> {
    let perms: Vec<Vec<usize>> = group.generators().iter().chain(group.elements()).map(|g| g.images()).collect();
    let inv = crate::gauge::invariance_under(rho, &perms);
    if let Some(w) = inv.witness {
        return Err(Error::NotInvariantGauge(w));
    }
    require_valid(rho, t)?;
    let mut vb = VerdictBuilder::new();
    for a in inst.bornology().probes(inst.n()) {
        let ga = group.saturate_set(a);
        for eps in t.thresholds() {
            let s = tunnel_neighborhood(t, ga, eps);
            let ok = bounded_check(inst, &mut vb, s, || {
                Witness::new("lemma4.3:hypothesis cl(T(GA,eps)) unbounded")
                    .with("A", a)
                    .with("eps", eps)
            });
            if !ok {
                let w = vb.finish().witness.expect("failure carries a witness");
                return Err(Error::HypothesisFail {
                    stage: "lemma4.3",
                    witness: w,
                });
            }
        }
    }
    // Orbits of tunnel pairs under the generators, each at its least length;
    // exact even when the enumeration is capped.
    let mut lengths: BTreeMap<(usize, usize), Dyadic> = BTreeMap::new();
    for (a, b, l) in t.iter() {
        let mut orbit = vec![key(a, b)];
        let mut i = 0;
        while i < orbit.len() {
            let (x, y) = orbit[i];
            for g in group.generators() {
                for h in [g.clone(), g.inverse()] {
                    let k = key(h.apply(x), h.apply(y));
                    if !orbit.contains(&k) {
                        orbit.push(k);
                    }
                }
            }
            i += 1;
        }
        for k in orbit {
            let e = lengths.entry(k).or_insert(l);
            if l < *e {
                *e = l;
            }
        }
    }
    Ok(TunnelSystem { lengths })
}

#[derive(Clone, Debug, Serialize)]
pub struct TunnelPropernessReport {
    pub sigma_proper: Verdict,
    pub rho_proper: Verdict,
    pub tunnels_proper: Verdict,
    /// `σ` proper exactly when both `ρ` and the tunnels are.
    pub biconditional: bool,
    /// `𝒩σ(x,(n+1)λ₀) ⊆ 𝒩ρ(C,(n+2)λ₀) ∪ 𝒩ρ(T(C,(n+1)λ₀),λ₀)` with
    /// `C = cl(𝒩σ(x,nλ₀))`.
    pub covering_inclusion: Verdict,
    /// `𝒩ρ(x,ε) ⊆ 𝒩σ(x,ε)`.
    pub rho_balls_inside: Verdict,
    /// `T(A,ε) ⊆ 𝒩σ(A,ε)`.
    pub tunnels_inside: Verdict,
}

pub fn verify_tunnel_properness(rho: &ExtGauge, t: &TunnelSystem, sigma: &ExtGauge, inst: &SpaceInstance, max_n: u64) -> TunnelPropernessReport {
    let n = rho.n();
    let sigma_proper = is_proper_gauge(sigma, inst);
    let rho_proper = is_proper_gauge(rho, inst);
    let tunnels_proper = is_proper_tunnel_system(t, inst);
    let biconditional = sigma_proper.holds() == (rho_proper.holds() && tunnels_proper.holds());

    let mut covering = Verdict::pass();
    if let Some(l0) = t.lambda0() {
        let l0 = Dist::Fin(l0);
        'cov: for k in 1..=max_n {
            for x in 0..n {
                let c = inst.closure(sigma.ball(x, l0.mul_int(k)));
                let lhs = sigma.ball(x, l0.mul_int(k + 1));
                let rhs = rho
                    .ball_of_set(c, l0.mul_int(k + 2))
                    .union(rho.ball_of_set(tunnel_neighborhood(t, c, l0.mul_int(k + 1)), l0));
                if !lhs.is_subset(rhs) {
                    covering = Verdict::fail(
                        Witness::new("thm3.7:covering inclusion")
                            .with("x", x)
                            .with("n", k)
                            .with("y", lhs.difference(rhs).first()),
                    );
                    break 'cov;
                }
            }
        }
    }

    let mut radii = rho.thresholds();
    radii.extend(sigma.thresholds());
    radii.extend(t.thresholds());
    radii.sort();
    radii.dedup();
    let mut rho_inside = Verdict::pass();
    let mut tunnels_inside = Verdict::pass();
    let mut sets: Vec<PointSet> = (0..n).map(PointSet::singleton).collect();
    sets.extend(inst.bornology().probes(n));
    for &eps in &radii {
        for x in 0..n {
            if rho_inside.is_pass() && !rho.ball(x, eps).is_subset(sigma.ball(x, eps)) {
                rho_inside = Verdict::fail(Witness::new("thm3.7:rho ball escapes sigma ball").with("x", x).with("eps", eps));
            }
        }
        for &a in &sets {
            if tunnels_inside.is_pass() && !tunnel_neighborhood(t, a, eps).is_subset(sigma.ball_of_set(a, eps)) {
                tunnels_inside = Verdict::fail(Witness::new("thm3.7:tunnel escapes sigma ball").with("A", a).with("eps", eps));
            }
        }
    }
    TunnelPropernessReport {
        sigma_proper,
        rho_proper,
        tunnels_proper,
        biconditional,
        covering_inclusion: covering,
        rho_balls_inside: rho_inside,
        tunnels_inside,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{enumerate_group, Bornology, Perm};

    fn d(s: &str) -> Dist {
        s.parse().unwrap()
    }

    fn dy(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    /// Crevasses {0,1} and {2,3}: ρ(0,1) = 1/2, ρ(2,3) = 1/4.
    fn two_crevasses() -> ExtGauge {
        let mut r = ExtGauge::from_fn(4, |x, y| if x == y { Dist::ZERO } else { Dist::Inf });
        for (x, y, v) in [(0, 1, "1/2"), (2, 3, "1/4")] {
            r.set(x, y, d(v));
            r.set(y, x, d(v));
        }
        r
    }

    #[test]
    fn validation() {
        let r = two_crevasses();
        let t = TunnelSystem::new([(1, 2, dy("5"))]).unwrap();
        let rep = validate_tunnel_system(&r, &t);
        assert!(rep.all().is_pass());
        assert_eq!(rep.lambda0, Some(dy("5")));
        let inside = TunnelSystem::new([(0, 1, dy("1"))]).unwrap();
        assert!(validate_tunnel_system(&r, &inside).disjoint_from_crevasses.is_fail());
        assert!(validate_tunnel_system(&r, &TunnelSystem::empty()).connected.is_fail());
        let one = ExtGauge::discrete(3);
        assert!(validate_tunnel_system(&one, &TunnelSystem::empty()).all().is_pass());
    }

    #[test]
    fn distance_through_tunnel() {
        let r = two_crevasses();
        let t = TunnelSystem::new([(1, 2, dy("5"))]).unwrap();
        let s = tunnel_distance(&r, &t).unwrap();
        assert_eq!(s.get(0, 3), d("23/4"));
        assert_eq!(s.get(0, 1), d("1/2"));
        assert_eq!(s.get(2, 2), Dist::ZERO);
        assert_eq!(step_sequence_oracle(&r, &t, 6, 100_000).unwrap(), s);
        let inst = SpaceInstance::discrete(4);
        assert!(verify_tunnel_agreement(&r, &t, &s, &inst).all().is_pass());
        assert!(tunnel_distance(&r, &TunnelSystem::empty()).is_err());
    }

    #[test]
    fn neighbourhoods_and_constructors() {
        let mut r = ExtGauge::from_fn(4, |x, y| if x == y { Dist::ZERO } else { Dist::Inf });
        r.set(0, 0, Dist::ZERO);
        let part = crevasse_partition(&r);
        let star = make_star_tunnels(&part);
        assert_eq!(star.len(), 3);
        assert_eq!(star.lambda0(), Some(Dyadic::ONE));
        assert_eq!(tunnel_neighborhood(&star, PointSet::singleton(0), d("5/2")), [1, 2].iter().collect());
        assert_eq!(tunnel_neighborhood(&star, PointSet::empty(), d("9")), PointSet::empty());
        assert_eq!(tunnel_neighborhood(&star, PointSet::singleton(0), d("1")), PointSet::empty());
        let chain = make_chain_tunnels(&part);
        assert_eq!(chain.len(), 3);
        assert!(validate_tunnel_system(&r, &chain).all().is_pass());
        let single = crevasse_partition(&ExtGauge::discrete(3));
        assert!(make_star_tunnels(&single).is_empty() && make_chain_tunnels(&single).is_empty());
    }

    #[test]
    fn saturation() {
        // Blocks {0,1}, {2,3}; swap the blocks.
        let mut r = ExtGauge::from_fn(4, |x, y| if x == y { Dist::ZERO } else { Dist::Inf });
        for (x, y) in [(0, 1), (2, 3)] {
            r.set(x, y, Dist::ONE);
            r.set(y, x, Dist::ONE);
        }
        let inst = SpaceInstance::discrete(4);
        let g = enumerate_group(&inst, vec![Perm::from_cycles(4, &[&[0, 2], &[1, 3]])], 10).unwrap();
        let t = TunnelSystem::new([(0, 2, dy("2")), (1, 2, dy("3"))]).unwrap();
        let s = g_saturate_tunnels(&g, &r, &t, &inst).unwrap();
        assert_eq!(s.length(0, 2), Some(dy("2")));
        assert_eq!(s.length(0, 3), Some(dy("3")));
        assert!(is_invariant_tunnels(&g, &s).is_pass());
        assert_eq!(g_saturate_tunnels(&g, &r, &s, &inst).unwrap(), s);
        let triv = enumerate_group(&inst, vec![], 10).unwrap();
        assert_eq!(g_saturate_tunnels(&triv, &r, &t, &inst).unwrap(), t);
    }

    #[test]
    fn tunnel_properness_star_surrogate() {
        // Six singleton crevasses, constant-length star tunnels, bornology of
        // single blocks: the tunnels are not proper, and neither is σ.
        let r = ExtGauge::from_fn(6, |x, y| if x == y { Dist::ZERO } else { Dist::Inf });
        let gens = (0..6).map(PointSet::singleton).collect();
        let inst = SpaceInstance::discrete(6).with_bornology(Bornology::generated(gens)).unwrap();
        let t = TunnelSystem::new((1..6).map(|i| (0, i, Dyadic::ONE))).unwrap();
        let s = tunnel_distance(&r, &t).unwrap();
        let rep = verify_tunnel_properness(&r, &t, &s, &inst, 4);
        assert!(rep.rho_proper.is_pass());
        assert!(rep.tunnels_proper.is_fail());
        assert!(rep.sigma_proper.is_fail());
        assert!(rep.biconditional);
        assert!(rep.covering_inclusion.is_pass());
        assert!(rep.rho_balls_inside.is_pass() && rep.tunnels_inside.is_pass());
    }
}
