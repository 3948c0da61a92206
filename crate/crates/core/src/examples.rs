//! Built-in instances mirroring the classical examples of invariant
//! metrization, each with the verdicts it is expected to reproduce.

use serde::Serialize;

use crate::cover::{is_development, is_star_refinement, star, Cover, Development};
use crate::document::Instance;
use crate::dyadic::{Dist, Dyadic};
use crate::error::{Error, Result};
use crate::gauge::{crevasse_partition, decapitate, is_proper_gauge, same_topology, ExtGauge, GaugeFamily};
use crate::invariance::{
    default_targets, equiregularity_check, is_invariant_gauge, metrize, near_properness_check, near_properness_horizon,
    proper_metrize_horizon, single_metrize, Growth,
};
use crate::pointset::PointSet;
use crate::space::{enumerate_group, Bornology, GroupAction, HorizonFamily, HorizonLevel, Perm, SpaceInstance};
use crate::tunnels::{is_proper_tunnel_system, make_chain_tunnels, make_star_tunnels, tunnel_distance, tunnel_neighborhood, TunnelSystem};
use crate::verdict::{Status, Verdict, Witness};

pub const NAMES: [&str; 8] = [
    "ex1.1",
    "ex1.2-analogue",
    "ex1.3-window",
    "ex2.1",
    "ex2.2",
    "ex3.2-surrogate",
    "ex3.3",
    "ex3.4",
];

/// What a built-in check should report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Expect {
    Pass,
    Fail,
    /// Pass, or indeterminate only because of the window frontier.
    Holds,
}

impl Expect {
    pub fn matches(self, v: &Verdict) -> bool {
        match self {
            Expect::Pass => v.status == Status::Pass,
            Expect::Fail => v.status == Status::Fail,
            Expect::Holds => v.holds(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleCheck {
    pub check: &'static str,
    pub expect: Expect,
    pub verdict: Verdict,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleReport {
    pub name: &'static str,
    pub description: &'static str,
    pub checks: Vec<ExampleCheck>,
}

impl ExampleReport {
    pub fn all_match(&self) -> bool {
        self.checks.iter().all(|c| c.matches)
    }

    pub fn check(&self, name: &str) -> Option<&ExampleCheck> {
        self.checks.iter().find(|c| c.check == name)
    }

    fn push(&mut self, check: &'static str, expect: Expect, verdict: Verdict) {
        let matches = expect.matches(&verdict);
        self.checks.push(ExampleCheck { check, expect, verdict, matches });
    }
}

/// Pipeline errors become failed verdicts carrying the error text.
fn verdict_of<T>(r: Result<T>, ok: impl FnOnce(T) -> Verdict) -> Verdict {
    match r {
        Ok(t) => ok(t),
        Err(e) => {
            let w = match &e {
                Error::NotNearlyProper { witness, .. } | Error::HypothesisFail { witness, .. } => witness.clone(),
                Error::NotEquiregular(w) | Error::NotSeparating(w) | Error::NotInvariantGauge(w) => w.clone(),
                _ => Witness::new("error"),
            };
            Verdict::fail(w.with("error", e.to_string()))
        }
    }
}

pub fn run(name: &str, depth: usize, cap: usize) -> Result<ExampleReport> {
    match name {
        "ex1.1" => ex1_1(depth, cap),
        "ex1.2-analogue" => ex1_2(cap),
        "ex1.3-window" => ex1_3(depth, cap),
        "ex2.1" => Ok(ex2_1()),
        "ex2.2" => Ok(ex2_2()),
        "ex3.2-surrogate" => Ok(ex3_2()),
        "ex3.3" => Ok(ex3_3_4(false)),
        "ex3.4" => Ok(ex3_3_4(true)),
        other => Err(Error::Usage(format!("unknown example `{other}`; known: {}", NAMES.join(", ")))),
    }
}

fn ps(v: &[usize]) -> PointSet {
    v.iter().collect()
}

/// `{0, .., m}` discrete with the transpositions `(1 k)`; the last point is
/// the frontier and everything before it is bounded.
fn ex1_1_level(m: usize, cap: usize) -> Result<(SpaceInstance, GroupAction)> {
    let n = m + 1;
    let inst = SpaceInstance::discrete(n)
        .with_bornology(Bornology::generated(vec![PointSet::full(m)]))?
        .with_frontier(PointSet::singleton(m))?;
    let gens = (2..=m).map(|k| Perm::from_cycles(n, &[&[1, k]])).collect();
    let group = enumerate_group(&inst, gens, cap)?;
    Ok((inst, group))
}

pub fn ex1_1_family(cap: usize) -> Result<HorizonFamily> {
    let levels = (2..=6)
        .map(|m| {
            let (instance, group) = ex1_1_level(m, cap)?;
            let embed_next = (m < 6).then(|| (0..=m).collect());
            Ok(HorizonLevel { instance, group, embed_next })
        })
        .collect::<Result<Vec<_>>>()?;
    HorizonFamily::new(levels)
}

fn ex1_1(depth: usize, cap: usize) -> Result<ExampleReport> {
    let family = ex1_1_family(cap)?;
    let top = family.levels().last().expect("nonempty");
    let (inst, group) = (&top.instance, &top.group);
    let mut r = ExampleReport {
        name: "ex1.1",
        description: "discrete {0..m} under the transpositions (1 k): invariant metric, not nearly proper",
        checks: Vec::new(),
    };
    r.push("invariant", Expect::Pass, is_invariant_gauge(group, &ExtGauge::discrete(inst.n())));
    r.push("equiregular", Expect::Pass, equiregularity_check(inst, group).verdict);
    let single = metrize(inst, group, &default_targets(inst), depth).and_then(|m| {
        let s = single_metrize(&m.family, None)?;
        Ok(s.same_topology.clone().and(is_invariant_gauge(group, &s.gauge)))
    });
    r.push("single-metrize", Expect::Pass, verdict_of(single, |v| v));
    r.push("near-proper", Expect::Fail, near_properness_horizon(&family).verdict);
    r.push("proper-metrize", Expect::Fail, verdict_of(proper_metrize_horizon(&family, depth), |p| p.verified()));
    Ok(r)
}

/// Two endpoints `p₊ = 0`, `p₋ = 1` whose smallest neighbourhoods contain the
/// whole shifted cycle `a₀ .. a₃` (points 2..5).
pub fn ex1_2_instance(cap: usize) -> Result<(SpaceInstance, GroupAction)> {
    let a = ps(&[2, 3, 4, 5]);
    let mut basis: Vec<PointSet> = a.iter().map(PointSet::singleton).collect();
    basis.push(a.union(PointSet::singleton(0)));
    basis.push(a.union(PointSet::singleton(1)));
    let inst = SpaceInstance::new(6, basis, Bornology::full())?.with_labels(
        ["p+", "p-", "a0", "a1", "a2", "a3"].iter().map(|s| s.to_string()).collect(),
    )?;
    let shift = Perm::from_cycles(6, &[&[2, 3, 4, 5]]);
    let group = enumerate_group(&inst, vec![shift], cap)?;
    Ok((inst, group))
}

fn ex1_2(cap: usize) -> Result<ExampleReport> {
    let (inst, group) = ex1_2_instance(cap)?;
    let mut r = ExampleReport {
        name: "ex1.2-analogue",
        description: "compactified shift: compact, so nearly proper, but not equiregular at the endpoints",
        checks: Vec::new(),
    };
    r.push("equiregular", Expect::Fail, equiregularity_check(&inst, &group).verdict);
    r.push("near-proper", Expect::Pass, near_properness_check(&inst, &group));
    let a = ps(&[2, 3, 4, 5]);
    let cl = inst.closure(a);
    r.push(
        "closure",
        Expect::Pass,
        Verdict::from_bool(cl == PointSet::full(6), || Witness::new("closure of the cycle").with("closure", cl)),
    );
    Ok(r)
}

/// Center-out labels: index 0 is position 0, then +1, −1, +2, −2, ...
fn position(i: usize) -> i64 {
    if i == 0 {
        0
    } else if i % 2 == 1 {
        i.div_ceil(2) as i64
    } else {
        -((i / 2) as i64)
    }
}

fn index_of(p: i64) -> usize {
    match p.cmp(&0) {
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => (2 * p - 1) as usize,
        std::cmp::Ordering::Less => (-2 * p) as usize,
    }
}

/// The window `[−w, w]` of the integers, discrete, under the cyclic shift by
/// one. The wrap-around happens at the frontier `±w`, which is also the only
/// unbounded part.
fn window(w: usize, cap: usize) -> Result<(SpaceInstance, GroupAction)> {
    let n = 2 * w + 1;
    let wi = w as i64;
    let frontier = ps(&[index_of(wi), index_of(-wi)]);
    let inst = SpaceInstance::discrete(n)
        .with_bornology(Bornology::generated(vec![PointSet::full(n).difference(frontier)]))?
        .with_frontier(frontier)?
        .with_labels((0..n).map(|i| position(i).to_string()).collect())?;
    let images: Vec<usize> = (0..n)
        .map(|i| {
            let p = position(i) + 1;
            index_of(if p > wi { -wi } else { p })
        })
        .collect();
    let shift = Perm::from_images(&images).map_err(|d| Error::NotPermutation { generator: 0, detail: d })?;
    let group = enumerate_group(&inst, vec![shift], cap)?;
    Ok((inst, group))
}

pub fn ex1_3_family(cap: usize) -> Result<HorizonFamily> {
    let levels = (2..=6)
        .map(|w| {
            let (instance, group) = window(w, cap)?;
            let embed_next = (w < 6).then(|| (0..instance.n()).collect());
            Ok(HorizonLevel { instance, group, embed_next })
        })
        .collect::<Result<Vec<_>>>()?;
    HorizonFamily::new(levels)
}

fn ex1_3(depth: usize, cap: usize) -> Result<ExampleReport> {
    let family = ex1_3_family(cap)?;
    let top = family.levels().last().expect("nonempty");
    let mut r = ExampleReport {
        name: "ex1.3-window",
        description: "integer translations on growing windows: equiregular and nearly proper",
        checks: Vec::new(),
    };
    r.push("equiregular", Expect::Pass, equiregularity_check(&top.instance, &top.group).verdict);
    let np = near_properness_horizon(&family);
    let stable = matches!(np.growth, Growth::Stable { .. });
    let mut v = np.verdict.clone();
    if !stable {
        v = v.and(Verdict::fail(Witness::new("near-proper:union did not stabilize")));
    }
    r.push("near-proper", Expect::Pass, v);
    let pm = proper_metrize_horizon(&family, depth);
    r.push("proper-metrize", Expect::Holds, verdict_of(pm, |p| p.verified().and(p.converse)));
    Ok(r)
}

/// Five points at spacing 1/4 on a line.
pub fn line_metric() -> ExtGauge {
    ExtGauge::from_fn(5, |x, y| Dist::Fin(Dyadic::new(x.abs_diff(y) as u128, 2)))
}

fn ball_cover(rho: &ExtGauge, eps: Dist) -> Cover {
    Cover::new((0..rho.n()).map(|x| rho.ball(x, eps)))
}

fn ex2_1() -> ExampleReport {
    let rho = line_metric();
    let mut r = ExampleReport {
        name: "ex2.1",
        description: "half-radius ball covers star-refine ball covers",
        checks: Vec::new(),
    };
    let mut v = Verdict::pass();
    for k in 0..4 {
        let eps = Dist::Fin(Dyadic::pow2_neg(k));
        v = v.and(is_star_refinement(&ball_cover(&rho, eps.shr(1)), &ball_cover(&rho, eps), 1));
    }
    r.push("star-refinement", Expect::Pass, v);
    r
}

fn ex2_2() -> ExampleReport {
    let rho = line_metric();
    let levels: Vec<Cover> = (1..=3).map(|k| ball_cover(&rho, Dist::Fin(Dyadic::pow2_neg(k)))).collect();
    let dev = Development::bare(5, levels.clone());
    let mut r = ExampleReport {
        name: "ex2.2",
        description: "ball covers at radii 1/2, 1/4, 1/8 form a star-development",
        checks: Vec::new(),
    };
    r.push("development", Expect::Pass, is_development(&dev));
    let stars = levels
        .windows(2)
        .fold(Verdict::pass(), |acc, w| acc.and(is_star_refinement(&w[1], &w[0], 1)));
    r.push("star-development", Expect::Pass, stars);
    let mut sandwich = Verdict::pass();
    for k in 1..3u32 {
        for x in 0..5 {
            let s = star(PointSet::singleton(x), &levels[k as usize]);
            let inner = rho.ball(x, Dist::Fin(Dyadic::pow2_neg(k + 1)));
            let outer = rho.ball(x, Dist::Fin(Dyadic::pow2_neg(k)));
            if !(inner.is_subset(s) && s.is_subset(outer)) {
                sandwich = sandwich.and(Verdict::fail(Witness::new("ball sandwich").with("x", x).with("n", k)));
            }
        }
    }
    r.push("ball-sandwich", Expect::Pass, sandwich);
    r
}

/// `blocks` crevasses of two points each at distance 1/2.
pub fn blocks_gauge(blocks: usize) -> ExtGauge {
    ExtGauge::from_fn(2 * blocks, |x, y| {
        if x == y {
            Dist::ZERO
        } else if x / 2 == y / 2 {
            Dist::Fin(Dyadic::new(1, 1))
        } else {
            Dist::Inf
        }
    })
}

fn block(i: usize) -> PointSet {
    ps(&[2 * i, 2 * i + 1])
}

/// Six crevasses, each bounded on its own, joined to the first by unit
/// tunnels: a finite stand-in for infinitely many crevasses.
fn ex3_2() -> ExampleReport {
    let k = 6;
    let rho = blocks_gauge(k);
    let inst = SpaceInstance::discrete(2 * k)
        .with_bornology(Bornology::generated((0..k).map(block).collect()))
        .expect("blocks lie in the space");
    let t = TunnelSystem::new((1..k).map(|i| (0, 2 * i, Dyadic::ONE))).expect("distinct pairs");
    let mut r = ExampleReport {
        name: "ex3.2-surrogate",
        description: "unit star tunnels across many crevasses: equivalent to the gauge but not proper",
        checks: Vec::new(),
    };
    r.push("rho-proper", Expect::Pass, is_proper_gauge(&rho, &inst));
    r.push("tunnels-proper", Expect::Fail, is_proper_tunnel_system(&t, &inst));
    match tunnel_distance(&rho, &t) {
        Ok(sigma) => {
            r.push("sigma-proper", Expect::Fail, is_proper_gauge(&sigma, &inst));
            let reps: PointSet = (0..k).map(|i| 2 * i).collect();
            let ball = sigma.ball(0, Dist::int(2));
            r.push(
                "ball-covers-representatives",
                Expect::Pass,
                Verdict::from_bool(reps.is_subset(ball), || Witness::new("ball at radius 2").with("ball", ball)),
            );
            let same = same_topology(&GaugeFamily::single(rho.clone()), &GaugeFamily::single(sigma), 2 * k);
            r.push("equivalent", Expect::Pass, same);
        }
        Err(e) => r.push("sigma-proper", Expect::Fail, Verdict::fail(Witness::new("error").with("error", e.to_string()))),
    }
    r
}

/// Five crevasses; bounded sets are those inside the first four, and the
/// last crevasse is the window frontier.
fn ex3_3_4(star_tunnels: bool) -> ExampleReport {
    let k = 5;
    let rho = blocks_gauge(k);
    let gens = (1..k).map(|j| (0..j).fold(PointSet::empty(), |a, i| a.union(block(i)))).collect();
    let inst = SpaceInstance::discrete(2 * k)
        .with_bornology(Bornology::generated(gens))
        .and_then(|s| s.with_frontier(block(k - 1)))
        .expect("blocks lie in the space");
    let part = crevasse_partition(&rho);
    let t = if star_tunnels { make_star_tunnels(&part) } else { make_chain_tunnels(&part) };
    let mut r = ExampleReport {
        name: if star_tunnels { "ex3.4" } else { "ex3.3" },
        description: if star_tunnels {
            "star tunnels of length i to the i-th crevasse: proper"
        } else {
            "unit chain tunnels through consecutive crevasses: proper"
        },
        checks: Vec::new(),
    };
    r.push("tunnels-proper", Expect::Holds, is_proper_tunnel_system(&t, &inst));
    match tunnel_distance(&rho, &t) {
        Ok(sigma) => r.push("sigma-proper", Expect::Holds, is_proper_gauge(&sigma, &inst)),
        Err(e) => r.push("sigma-proper", Expect::Holds, Verdict::fail(Witness::new("error").with("error", e.to_string()))),
    }
    if star_tunnels {
        let reach = tunnel_neighborhood(&t, PointSet::singleton(0), Dist::Fin(Dyadic::new(5, 1)));
        r.push(
            "tunnel-neighbourhood",
            Expect::Pass,
            Verdict::from_bool(reach == ps(&[2, 4]), || Witness::new("T({x0}, 5/2)").with("T", reach)),
        );
    } else {
        let reach = tunnel_neighborhood(&t, block(0), Dist::ONE.shr(0).mul_int(2));
        r.push(
            "tunnel-neighbourhood",
            Expect::Pass,
            Verdict::from_bool(reach.is_subset(ps(&[0, 2])), || Witness::new("T(Y1, 2)").with("T", reach)),
        );
    }
    r.push("decapitated-rho-proper", Expect::Holds, is_proper_gauge(&decapitate(&rho), &inst));
    r
}

/// The data of a built-in as an instance, for the commands that take one.
pub fn instance(name: &str, cap: usize) -> Result<Instance> {
    let blocks = |k: usize, born: Bornology, frontier: PointSet| -> Result<Instance> {
        let space = SpaceInstance::discrete(2 * k).with_bornology(born)?.with_frontier(frontier)?;
        let mut i = Instance::bare(space, GroupAction::trivial(2 * k));
        i.gauges.push(("rho".into(), blocks_gauge(k)));
        Ok(i)
    };
    let horizon = |family: HorizonFamily| -> Instance {
        let top = family.levels().last().expect("nonempty");
        let mut i = Instance::bare(top.instance.clone(), top.group.clone());
        i.horizon = Some(family);
        i
    };
    match name {
        "ex1.1" => Ok(horizon(ex1_1_family(cap)?)),
        "ex1.3-window" => Ok(horizon(ex1_3_family(cap)?)),
        "ex1.2-analogue" => {
            let (space, group) = ex1_2_instance(cap)?;
            Ok(Instance::bare(space, group))
        }
        "ex2.1" | "ex2.2" => {
            let rho = line_metric();
            let mut i = Instance::bare(SpaceInstance::discrete(5), GroupAction::trivial(5));
            let levels = (1..=3).map(|k| ball_cover(&rho, Dist::Fin(Dyadic::pow2_neg(k)))).collect();
            i.developments.push(("balls".into(), Development::new(&i.space, levels)?));
            i.gauges.push(("rho".into(), rho));
            Ok(i)
        }
        "ex3.2-surrogate" => {
            let mut i = blocks(6, Bornology::generated((0..6).map(block).collect()), PointSet::empty())?;
            i.tunnels.push(("rho".into(), TunnelSystem::new((1..6).map(|j| (0, 2 * j, Dyadic::ONE)))?));
            Ok(i)
        }
        "ex3.3" | "ex3.4" => {
            let gens = (1..5).map(|j| (0..j).fold(PointSet::empty(), |a, b| a.union(block(b)))).collect();
            let mut i = blocks(5, Bornology::generated(gens), block(4))?;
            let part = crevasse_partition(&i.gauges[0].1);
            let t = if name == "ex3.4" { make_star_tunnels(&part) } else { make_chain_tunnels(&part) };
            i.tunnels.push(("rho".into(), t));
            Ok(i)
        }
        other => Err(Error::Usage(format!("unknown example `{other}`; known: {}", NAMES.join(", ")))),
    }
}
