use serde::Serialize;
use serde_json::Value;

use crate::au::au_distance;
use crate::cover::{Cover, Development};
use crate::dyadic::{Dist, Dyadic};
use crate::error::{Error, Result};
use crate::gauge::{crevasse_partition, decapitate, max_combine, same_topology, sup_combine, is_proper_gauge, ExtGauge, GaugeFamily};
use crate::pointset::PointSet;
use crate::space::{orbit_quotient, regular, Boundedness, GroupAction, HorizonFamily, SpaceInstance};
use crate::tunnels::{g_saturate_tunnels, make_star_tunnels, tunnel_distance, TunnelSystem};
use crate::verdict::{Verdict, VerdictBuilder, Witness};

use super::checks::{
    equireg_search, equiregularity_check, is_invariant_gauge, near_properness_check, near_properness_horizon, saturate_cover,
    translates_meeting, EquiregSearch,
};
use super::exhaustion::proper_invariant_cover;
use super::refine::refine_chain;

pub const DEFAULT_DEPTH: usize = 4;

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub step: String,
    pub object: Value,
}

/// Ordered log of the intermediate objects of a pipeline run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PipelineTrace {
    pub steps: Vec<TraceStep>,
}

impl PipelineTrace {
    pub fn push(&mut self, step: impl Into<String>, object: impl Serialize) {
        let object = serde_json::to_value(object).expect("trace objects serialize");
        self.steps.push(TraceStep { step: step.into(), object });
    }

    pub fn extend(&mut self, other: PipelineTrace) {
        self.steps.extend(other.steps);
    }
}

/// The per-point targets `(x, mn(x))`; the smallest neighbourhoods make the
/// strongest ball conditions.
pub fn default_targets(inst: &SpaceInstance) -> Vec<(usize, PointSet)> {
    (0..inst.n()).map(|x| (x, inst.min_nbhd(x))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TargetOutcome {
    pub x: usize,
    #[serde(rename = "U")]
    pub u: PointSet,
    /// Index of the gauge in the family.
    pub gauge: usize,
    /// `𝒩σ(x, 1/2) ⊆ U`.
    pub ball_inside: Verdict,
    pub invariant: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct Metrization {
    pub family: GaugeFamily,
    pub targets: Vec<TargetOutcome>,
    pub separating: Verdict,
    pub trace: PipelineTrace,
}

impl Metrization {
    /// Every target's ball condition and invariance hold.
    pub fn verified(&self) -> Verdict {
        self.targets
            .iter()
            .fold(Verdict::pass(), |acc, t| acc.and(t.ball_inside.clone()).and(t.invariant.clone()))
    }
}

fn check_target(inst: &SpaceInstance, x: usize, u: PointSet) -> Result<()> {
    if x >= inst.n() || !u.contains(x) || !inst.is_open(u) {
        return Err(Error::Reject {
            rule: "target",
            detail: format!("({x}, {u}) is not an open neighbourhood pair"),
        });
    }
    Ok(())
}

/// Odd levels `𝒰₁, 𝒰₃, .., 𝒰_{2N−1}` of an iterated invariant star-refinement
/// of `u1`, as a development of `inst`.
fn odd_development(inst: &SpaceInstance, group: &GroupAction, u1: Cover, depth: usize, trace: &mut PipelineTrace, tag: &str) -> Result<Development> {
    let depth = depth.max(1);
    let (levels, traces) = refine_chain(inst, group, u1, 2 * depth - 2)?;
    for (i, t) in traces.into_iter().enumerate() {
        trace.push(format!("lemma5.1:refinement {tag} level {}", i + 2), t);
    }
    let dev = Development::new(inst, levels)?.odd_levels();
    trace.push(format!("thm1.1:odd levels {tag}"), &dev);
    Ok(dev)
}

/// Invariant gauges, one per target `(x, U)`, each with `𝒩σ(x, 1/2) ⊆ U`.
/// Requires `G` equiregular.
pub fn metrize(inst: &SpaceInstance, group: &GroupAction, targets: &[(usize, PointSet)], depth: usize) -> Result<Metrization> {
    for &(x, u) in targets {
        check_target(inst, x, u)?;
    }
    let er = equiregularity_check(inst, group);
    if let Some(w) = er.verdict.failure() {
        return Err(Error::NotEquiregular(w));
    }
    let q = orbit_quotient(inst, group);
    if let Some(w) = regular(q.space()).witness {
        return Err(Error::HypothesisFail { stage: "thm1.1:quotient regular", witness: w });
    }
    let mut trace = PipelineTrace::default();
    trace.push("thm1.1:equiregularity witness", &er);
    let mut gauges: Vec<ExtGauge> = Vec::new();
    let mut firsts: Vec<Cover> = Vec::new();
    let mut outcomes = Vec::new();
    for &(x, u) in targets {
        let entry = match equireg_search(inst, group, x, u) {
            EquiregSearch::Found(e) | EquiregSearch::Frontier(e, _) => e,
            EquiregSearch::Failed(w) => return Err(Error::NotEquiregular(w)),
        };
        let v1 = saturate_cover(group, &Cover::new(entry.nbhds.iter().copied()));
        let idx = match firsts.iter().position(|c| *c == v1) {
            Some(i) => i,
            None => {
                let tag = format!("({x},{u})");
                trace.push(format!("thm1.1:first cover {tag}"), &v1);
                let dev = odd_development(inst, group, v1.clone(), depth, &mut trace, &tag)?;
                let sigma = decapitate(&au_distance(&dev)?);
                trace.push(format!("thm1.1:gauge {tag}"), &sigma);
                firsts.push(v1);
                gauges.push(sigma);
                gauges.len() - 1
            }
        };
        let sigma = &gauges[idx];
        let ball = sigma.ball(x, Dist::Fin(Dyadic::new(1, 1)));
        let ball_inside = Verdict::from_bool(ball.is_subset(u), || {
            Witness::new("thm1.1:half ball escapes U")
                .with("x", x)
                .with("U", u)
                .with("ball", ball)
        });
        let invariant = is_invariant_gauge(group, sigma).qualified(!group.is_complete());
        outcomes.push(TargetOutcome { x, u, gauge: idx, ball_inside, invariant });
    }
    let family = GaugeFamily::new(gauges);
    let separating = if family.is_empty() { Verdict::fail(Witness::new("gauge family:empty")) } else { family.is_separating() };
    let m = Metrization { family, targets: outcomes, separating, trace };
    if let Some(w) = m.verified().failure() {
        return Err(Error::HypothesisFail { stage: "thm1.1:output verification", witness: w });
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProperMetrization {
    pub family: GaugeFamily,
    pub cover: Cover,
    pub sigma: ExtGauge,
    pub tunnels: TunnelSystem,
    pub tau: ExtGauge,
    pub proper: Vec<Verdict>,
    pub invariant: Vec<Verdict>,
    /// Near-properness recovered from the first output gauge.
    pub converse: Verdict,
    pub trace: PipelineTrace,
}

impl ProperMetrization {
    pub fn verified(&self) -> Verdict {
        self.proper
            .iter()
            .chain(&self.invariant)
            .fold(Verdict::pass(), |acc, v| acc.and(v.clone()))
    }
}

/// Proper invariant gauges `max(ρ, τ)`, `ρ ∈ p`, where `τ` tunnels across the
/// crevasses of the chain distance of a proper invariant development.
/// `d` is an exhaustion of the orbit space.
pub fn proper_metrize(inst: &SpaceInstance, group: &GroupAction, d: &[PointSet], p: &GaugeFamily, depth: usize) -> Result<ProperMetrization> {
    let er = equiregularity_check(inst, group);
    if let Some(w) = er.verdict.failure() {
        return Err(Error::NotEquiregular(w));
    }
    let np = near_properness_check(inst, group);
    if let Some(w) = np.failure() {
        return Err(Error::NotNearlyProper { stage: "lemma5.3", witness: w });
    }
    if !inst.bornology().is_directed() {
        // without finite unions no finite gauge can be proper
        return Err(Error::HypothesisFail {
            stage: "thm1.3:bornology ideal",
            witness: Witness::new("bornology is not closed under finite unions"),
        });
    }
    if p.is_empty() {
        return Err(Error::Reject { rule: "gauge family", detail: "empty family".into() });
    }
    if let Some(g) = p.gauges.iter().find(|g| g.n() != inst.n()) {
        return Err(Error::SizeMismatch(format!("gauge on {} points, instance on {}", g.n(), inst.n())));
    }
    let mut trace = PipelineTrace::default();
    let pc = proper_invariant_cover(inst, group, d)?;
    trace.push("prop5.2:decomposition", &pc.decomposition);
    trace.push("lemma5.3:proper invariant cover", &pc.cover);
    let dev = odd_development(inst, group, pc.cover.clone(), depth, &mut trace, "proper")?;
    let sigma = au_distance(&dev)?;
    trace.push("thm3.3:proper chain distance", &sigma);
    let sp = is_proper_gauge(&sigma, inst).and(is_invariant_gauge(group, &sigma));
    if let Some(w) = sp.failure() {
        return Err(Error::HypothesisFail { stage: "thm3.3:proper invariant gauge", witness: w });
    }
    let part = crevasse_partition(&sigma);
    let t = make_star_tunnels(&part);
    trace.push("prop3.8:crevasses", &part);
    let gt = g_saturate_tunnels(group, &sigma, &t, inst)?;
    trace.push("lemma4.3:saturated tunnels", &gt);
    let tau = tunnel_distance(&sigma, &gt)?;
    trace.push("thm3.7:tunnel distance", &tau);
    let mut out = Vec::with_capacity(p.len());
    let mut proper = Vec::new();
    let mut invariant = Vec::new();
    for rho in &p.gauges {
        let m = max_combine(&[rho.clone(), tau.clone()])?;
        proper.push(is_proper_gauge(&m, inst));
        invariant.push(is_invariant_gauge(group, &m).qualified(!group.is_complete()));
        out.push(m);
    }
    let converse = near_properness_from_gauge(inst, group, &out[0]);
    let family = GaugeFamily::new(out);
    trace.push("thm1.3:output family", &family);
    let pm = ProperMetrization {
        family,
        cover: pc.cover,
        sigma,
        tunnels: gt,
        tau,
        proper,
        invariant,
        converse,
        trace,
    };
    if let Some(w) = pm.verified().failure() {
        return Err(Error::HypothesisFail { stage: "thm1.3:output verification", witness: w });
    }
    Ok(pm)
}

/// The one-step exhaustion `[G\X]`: the whole orbit space as the tail.
pub fn default_exhaustion(inst: &SpaceInstance, group: &GroupAction) -> Vec<PointSet> {
    vec![PointSet::full(orbit_quotient(inst, group).orbit_count())]
}

/// [`proper_metrize`] on the last level of a horizon family, after deciding
/// near-properness across the family; `P` comes from [`metrize`] with the
/// default targets.
pub fn proper_metrize_horizon(family: &HorizonFamily, depth: usize) -> Result<ProperMetrization> {
    let np = near_properness_horizon(family);
    if let Some(w) = np.verdict.failure() {
        return Err(Error::NotNearlyProper { stage: "lemma5.3", witness: w });
    }
    let top = family.levels().last().expect("families are nonempty");
    let (inst, group) = (&top.instance, &top.group);
    let m = metrize(inst, group, &default_targets(inst), depth)?;
    proper_metrize(inst, group, &default_exhaustion(inst, group), &m.family, depth)
}

/// Near-properness read off a proper invariant gauge: if `A ∪ B` lies in
/// `𝒩ρ(x₀, n)` then every translate of `A` meeting `B` lies in `𝒩ρ(x₀, 3n)`,
/// whose closure is bounded.
pub fn near_properness_from_gauge(inst: &SpaceInstance, group: &GroupAction, rho: &ExtGauge) -> Verdict {
    let inv = is_invariant_gauge(group, rho);
    if inv.is_fail() {
        return inv;
    }
    let mut vb = VerdictBuilder::new();
    let x0 = 0;
    'outer: for a in inst.bornology().probes(inst.n()) {
        for b in inst.bornology().probes(inst.n()) {
            let ab = a.union(b);
            let Some(far) = ab.iter().map(|y| rho.get(x0, y)).max() else { continue };
            let Dist::Fin(far) = far else {
                vb.fail(Witness::new("thm1.3:probe at infinite distance").with("A", a).with("B", b));
                break 'outer;
            };
            // least integer n with far < n
            let n = far.floor_int() + 1;
            let big = rho.ball(x0, Dist::int(3 * n));
            let un = translates_meeting(group, a, b);
            if !un.is_subset(big) {
                vb.fail(
                    Witness::new("thm1.3:translates escape 3n-ball")
                        .with("A", a)
                        .with("B", b)
                        .with("n", n),
                );
                break 'outer;
            }
            match inst.classify_closure(big) {
                Boundedness::Bounded => {}
                Boundedness::Unbounded => {
                    vb.fail(Witness::new("thm1.3:3n-ball unbounded").with("n", n));
                    break 'outer;
                }
                Boundedness::Indeterminate => vb.indeterminate(|| Witness::new("thm1.3:3n-ball reaches frontier").with("n", n)),
            }
        }
    }
    vb.finish().qualified(!group.is_complete())
}

#[derive(Clone, Debug, Serialize)]
pub struct SingleMetrization {
    pub gauge: ExtGauge,
    pub same_topology: Verdict,
}

/// One invariant metric from a separating family, optionally max-combined with
/// a proper member.
pub fn single_metrize(family: &GaugeFamily, proper: Option<&ExtGauge>) -> Result<SingleMetrization> {
    if family.is_empty() {
        return Err(Error::NotSeparating(Witness::new("gauge family:empty")));
    }
    let sc = sup_combine(&family.gauges)?;
    if let Some(w) = sc.separating.failure() {
        return Err(Error::NotSeparating(w));
    }
    let mut reference = family.clone();
    let gauge = match proper {
        Some(p) => {
            reference.gauges.push(p.clone());
            max_combine(&[sc.gauge, p.clone()])?
        }
        None => sc.gauge,
    };
    let n = gauge.n();
    let same = same_topology(&reference, &GaugeFamily::single(gauge.clone()), n);
    Ok(SingleMetrization { gauge, same_topology: same })
}
