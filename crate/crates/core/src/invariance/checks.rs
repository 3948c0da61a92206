use serde::Serialize;

use crate::cover::Cover;
use crate::gauge::ExtGauge;
use crate::pointset::PointSet;
use crate::space::{Boundedness, GroupAction, HorizonFamily, SpaceInstance};
use crate::verdict::{Status, Verdict, VerdictBuilder, Witness};

/// `ρ(gx, gy) = ρ(x, y)` for every enumerated element. Checking the
/// generators as well makes a pass exact even under a capped enumeration.
pub fn is_invariant_gauge(group: &GroupAction, rho: &ExtGauge) -> Verdict {
    let gens = group.generators().iter().map(|g| ("generator", g));
    let elems = group.elements().iter().map(|g| ("element", g));
    for (k, (kind, g)) in gens.chain(elems).enumerate() {
        for x in 0..rho.n() {
            for y in 0..rho.n() {
                if rho.get(g.apply(x), g.apply(y)) != rho.get(x, y) {
                    return Verdict::fail(
                        Witness::new("invariance:distance moved")
                            .with(kind, g)
                            .with("index", k)
                            .with("x", x)
                            .with("y", y),
                    );
                }
            }
        }
    }
    Verdict::pass()
}

/// Every image of a member is a member.
pub fn is_invariant_cover(group: &GroupAction, u: &Cover) -> Verdict {
    for g in group.generators().iter().chain(group.elements()) {
        for s in u.iter() {
            let img = g.image(s);
            if !u.contains(img) {
                return Verdict::fail(
                    Witness::new("invariance:cover member moved")
                        .with("g", g)
                        .with("U", s)
                        .with("image", img),
                );
            }
        }
    }
    Verdict::pass()
}

/// Smallest invariant family containing `u`, closed under the generators (so
/// exact even when the enumeration is capped). Members keep first-seen order.
pub fn saturate_cover(group: &GroupAction, u: &Cover) -> Cover {
    let mut sets: Vec<PointSet> = u.sets().to_vec();
    let mut i = 0;
    while i < sets.len() {
        for g in group.generators() {
            for h in [g.clone(), g.inverse()] {
                let img = h.image(sets[i]);
                if !sets.contains(&img) {
                    sets.push(img);
                }
            }
        }
        i += 1;
    }
    Cover::new(sets)
}

/// Witness for one `(x, U)`: the chosen `V` and a neighbourhood `N_y` per point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquiregEntry {
    pub x: usize,
    #[serde(rename = "U")]
    pub u: PointSet,
    #[serde(rename = "V")]
    pub v: PointSet,
    #[serde(rename = "N")]
    pub nbhds: Vec<PointSet>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EquiregWitness {
    pub entries: Vec<EquiregEntry>,
}

impl EquiregWitness {
    pub fn get(&self, x: usize, u: PointSet) -> Option<&EquiregEntry> {
        self.entries.iter().find(|e| e.x == x && e.u == u)
    }
}

/// Outcome of the witness search for one `(x, U)`.
#[derive(Clone, Debug)]
pub enum EquiregSearch {
    Found(EquiregEntry),
    /// Found, but only by discounting violations that touch the frontier.
    Frontier(EquiregEntry, Witness),
    Failed(Witness),
}

/// Does `n` satisfy the displacement condition for `(cl_v, u)`? Returns the
/// first violating element, and whether every violation touches the frontier.
fn displacement(inst: &SpaceInstance, group: &GroupAction, n: PointSet, cl_v: PointSet, u: PointSet) -> Option<(usize, bool)> {
    let mut first: Option<(usize, bool)> = None;
    for (k, g) in group.elements().iter().enumerate() {
        let img = g.image(n);
        if img.meets(cl_v) && !img.is_subset(u) {
            let soft = img.meets(inst.frontier()) || n.meets(inst.frontier());
            match first {
                None => first = Some((k, soft)),
                Some((_, true)) if !soft => return Some((k, false)),
                _ => {}
            }
            if !soft {
                return Some((k, false));
            }
        }
    }
    first
}

/// Search `V ∋ x` with `cl(V) ⊆ U` and, for every `y`, an `N_y` meeting the
/// displacement condition. Candidates run in (size, members) order with the
/// minimal neighbourhood last; the first success wins.
pub fn equireg_search(inst: &SpaceInstance, group: &GroupAction, x: usize, u: PointSet) -> EquiregSearch {
    let mut last_failure: Option<Witness> = None;
    let mut soft_found: Option<(EquiregEntry, Witness)> = None;
    for v in inst.nbhd_candidates(x) {
        let cl_v = inst.closure(v);
        if !cl_v.is_subset(u) {
            continue;
        }
        let mut nbhds = Vec::with_capacity(inst.n());
        let mut soft: Option<Witness> = None;
        let mut failed = false;
        for y in 0..inst.n() {
            let mut chosen: Option<PointSet> = None;
            let mut soft_choice: Option<(PointSet, Witness)> = None;
            let mut hard: Option<Witness> = None;
            for n in inst.nbhd_candidates(y) {
                match displacement(inst, group, n, cl_v, u) {
                    None => {
                        chosen = Some(n);
                        break;
                    }
                    Some((k, true)) => {
                        if soft_choice.is_none() {
                            soft_choice = Some((
                                n,
                                Witness::new("equiregular:violation at frontier")
                                    .with("x", x)
                                    .with("U", u)
                                    .with("V", v)
                                    .with("y", y)
                                    .with("g", &group.elements()[k]),
                            ));
                        }
                    }
                    Some((k, false)) => {
                        if hard.is_none() {
                            hard = Some(
                                Witness::new("equiregular:no neighbourhood N_y")
                                    .with("x", x)
                                    .with("U", u)
                                    .with("V", v)
                                    .with("y", y)
                                    .with("g", &group.elements()[k]),
                            );
                        }
                    }
                }
            }
            match (chosen, soft_choice) {
                (Some(n), _) => nbhds.push(n),
                (None, Some((n, w))) => {
                    nbhds.push(n);
                    soft.get_or_insert(w);
                }
                (None, None) => {
                    last_failure = hard;
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            continue;
        }
        let entry = EquiregEntry { x, u, v, nbhds };
        match soft {
            None => return EquiregSearch::Found(entry),
            Some(w) => {
                soft_found.get_or_insert((entry, w));
            }
        }
    }
    if let Some((e, w)) = soft_found {
        return EquiregSearch::Frontier(e, w);
    }
    EquiregSearch::Failed(last_failure.unwrap_or_else(|| {
        Witness::new("equiregular:no V with cl(V) inside U")
            .with("x", x)
            .with("U", u)
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct EquiregResult {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<EquiregWitness>,
}

/// Decide equiregularity over every point and every basis set around it.
/// Basis sets suffice: the condition for `U` implies it for every larger `U`.
pub fn equiregularity_check(inst: &SpaceInstance, group: &GroupAction) -> EquiregResult {
    let mut vb = VerdictBuilder::new();
    let mut wit = EquiregWitness::default();
    'outer: for x in 0..inst.n() {
        let mut us: Vec<PointSet> = inst.basis().iter().copied().filter(|b| b.contains(x)).collect();
        us.sort_by_key(|b| b.search_key());
        us.dedup();
        for u in us {
            match equireg_search(inst, group, x, u) {
                EquiregSearch::Found(e) => wit.entries.push(e),
                EquiregSearch::Frontier(e, w) => {
                    wit.entries.push(e);
                    vb.indeterminate(|| w);
                }
                EquiregSearch::Failed(w) => {
                    vb.fail(w);
                    break 'outer;
                }
            }
        }
    }
    let verdict = vb.finish().qualified(!group.is_complete());
    let witness = (!verdict.is_fail()).then_some(wit);
    EquiregResult { verdict, witness }
}

/// `⋃{g(A) : g(A) ∩ B ≠ ∅}` over enumerated elements.
pub fn translates_meeting(group: &GroupAction, a: PointSet, b: PointSet) -> PointSet {
    group
        .elements()
        .iter()
        .map(|g| g.image(a))
        .filter(|img| img.meets(b))
        .fold(PointSet::empty(), |acc, s| acc.union(s))
}

/// For all bornology probes `A`, `B`: the closure of the union of translates
/// of `A` meeting `B` is bounded.
pub fn near_properness_check(inst: &SpaceInstance, group: &GroupAction) -> Verdict {
    let probes = inst.bornology().probes(inst.n());
    let mut vb = VerdictBuilder::new();
    'outer: for &a in &probes {
        for &b in &probes {
            let un = translates_meeting(group, a, b);
            let w = || {
                Witness::new("near-proper:translates unbounded")
                    .with("C", a)
                    .with("B", b)
                    .with("union", un)
            };
            match inst.classify_closure(un) {
                Boundedness::Bounded => {}
                Boundedness::Unbounded => {
                    vb.fail(w());
                    break 'outer;
                }
                Boundedness::Indeterminate => vb.indeterminate(w),
            }
        }
    }
    vb.finish().qualified(!group.is_complete())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Growth {
    /// Unions agree from this level on and stay off the frontier.
    Stable { m0: usize },
    Growing,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct HorizonNearProper {
    pub growth: Growth,
    pub verdict: Verdict,
    /// Per level, the union of translates for each probe pair.
    pub unions: Vec<Vec<PointSet>>,
    pub levels: Vec<Verdict>,
}

/// Near-properness across a horizon family. Probes are the first level's
/// bornology generators, carried up through the inclusions.
pub fn near_properness_horizon(family: &HorizonFamily) -> HorizonNearProper {
    let levels = family.levels();
    let first = &levels[0].instance;
    let probes = first.bornology().probes(first.n());
    let pairs: Vec<(PointSet, PointSet)> = probes
        .iter()
        .flat_map(|&a| probes.iter().map(move |&b| (a, b)))
        .collect();
    let mut unions: Vec<Vec<PointSet>> = Vec::new();
    let mut per_level = Vec::new();
    for (m, lvl) in levels.iter().enumerate() {
        let row = pairs
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (family.push_forward(a, 0, m), family.push_forward(b, 0, m));
                translates_meeting(&lvl.group, a, b)
            })
            .collect();
        unions.push(row);
        per_level.push(near_properness_check(&lvl.instance, &lvl.group));
    }
    let last = levels.len() - 1;
    let stable_from = |m: usize| (m..last).all(|k| {
        unions[k]
            .iter()
            .zip(&unions[k + 1])
            .all(|(&u, &v)| family.push_forward(u, k, k + 1) == v)
    });
    let m0 = (0..=last).find(|&m| stable_from(m)).expect("the last level is trivially stable");
    let at_frontier = |k: usize| unions[k].iter().any(|u| u.meets(levels[k].instance.frontier()));
    let qualified = levels.iter().any(|l| !l.group.is_complete());
    let (growth, verdict) = if m0 < last && !at_frontier(last) {
        (Growth::Stable { m0 }, Verdict::pass())
    } else if m0 == last && last > 0 {
        let (i, _) = pairs
            .iter()
            .enumerate()
            .find(|&(i, _)| family.push_forward(unions[last - 1][i], last - 1, last) != unions[last][i])
            .expect("some pair changed at the last step");
        let w = Witness::new("near-proper:translates grow with the horizon")
            .with("C", pairs[i].0)
            .with("B", pairs[i].1)
            .with("sizes", unions.iter().map(|r| r[i].len()).collect::<Vec<_>>());
        (Growth::Growing, Verdict::fail(w))
    } else {
        let mut v = Verdict::pass();
        v.note_indeterminate(|| Witness::new("near-proper:union reaches frontier").with("level", last));
        (Growth::Indeterminate, v)
    };
    HorizonNearProper {
        growth,
        verdict: verdict.qualified(qualified),
        unions,
        levels: per_level,
    }
}

impl HorizonNearProper {
    pub fn status(&self) -> Status {
        self.verdict.status
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{enumerate_group, Bornology, Perm};

    fn ps(v: &[usize]) -> PointSet {
        v.iter().collect()
    }

    #[test]
    fn invariant_gauges() {
        let inst = SpaceInstance::discrete(4);
        let g = enumerate_group(&inst, vec![Perm::from_cycles(4, &[&[0, 1, 2, 3]])], 64).unwrap();
        assert!(is_invariant_gauge(&GroupAction::trivial(4), &ExtGauge::zero(4)).is_pass());
        assert!(is_invariant_gauge(&g, &ExtGauge::discrete(4)).is_pass());
        let mut r = ExtGauge::discrete(4);
        r.set(0, 1, "1/2".parse().unwrap());
        r.set(1, 0, "1/2".parse().unwrap());
        assert!(is_invariant_gauge(&g, &r).is_fail());
    }

    #[test]
    fn invariant_covers() {
        let inst = SpaceInstance::discrete(4);
        let g = enumerate_group(&inst, vec![Perm::from_cycles(4, &[&[1, 2]])], 64).unwrap();
        let u = Cover::new([ps(&[0, 1]), ps(&[2, 3])]);
        let v = is_invariant_cover(&g, &u);
        assert!(v.is_fail());
        assert_eq!(v.witness.unwrap().get("image").unwrap(), &serde_json::json!([0, 2]));
        let singles = Cover::new((0..4).map(PointSet::singleton));
        assert!(is_invariant_cover(&g, &singles).is_pass());
        let s = saturate_cover(&g, &u);
        assert!(is_invariant_cover(&g, &s).is_pass());
        assert_eq!(saturate_cover(&g, &s), s);
    }

    #[test]
    fn discrete_is_equiregular() {
        let inst = SpaceInstance::discrete(4);
        let g = enumerate_group(&inst, vec![Perm::from_cycles(4, &[&[0, 1, 2, 3]])], 64).unwrap();
        let r = equiregularity_check(&inst, &g);
        assert!(r.verdict.is_pass());
        let e = r.witness.unwrap();
        assert!(e.entries.iter().all(|e| e.v.len() == 1 && e.nbhds.iter().all(|n| n.len() == 1)));
    }

    #[test]
    fn non_regular_is_not_equiregular() {
        let s = SpaceInstance::new(2, vec![ps(&[0]), ps(&[0, 1])], Bornology::full()).unwrap();
        let r = equiregularity_check(&s, &GroupAction::trivial(2));
        assert!(r.verdict.is_fail());
        assert!(r.witness.is_none());
    }

    #[test]
    fn near_properness_single() {
        let inst = SpaceInstance::discrete(4);
        let g = enumerate_group(&inst, vec![Perm::from_cycles(4, &[&[1, 2, 3]])], 64).unwrap();
        assert!(near_properness_check(&inst, &g).is_pass());
        let small = inst.with_bornology(Bornology::generated(vec![ps(&[0, 1])])).unwrap();
        let v = near_properness_check(&small, &g);
        assert!(v.is_fail());
        assert_eq!(v.witness.unwrap().get("C").unwrap(), &serde_json::json!([0, 1]));
    }
}
