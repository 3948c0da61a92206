use serde::Serialize;

use crate::cover::{is_star_refinement, Cover};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::{orbit_quotient, regular, GroupAction, SpaceInstance};
use crate::verdict::{Verdict, Witness};

use super::checks::{equireg_search, is_invariant_cover, saturate_cover, EquiregSearch};

/// The intermediate choices of one invariant star-refinement.
#[derive(Clone, Debug, Serialize)]
pub struct RefineTrace {
    /// `(V, U_V)`: the chosen equiregular neighbourhood and its host member.
    pub v: Vec<(PointSet, PointSet)>,
    /// Quotient sets `L = π(V)` and the index of the `V(L)` assigned to each.
    pub l: Vec<(PointSet, usize)>,
    /// Per point: `N_x` before saturation.
    pub n: Vec<PointSet>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StoneRefinement {
    pub cover: Cover,
    pub trace: RefineTrace,
    /// Quantifiers over the group ran over a capped enumeration.
    pub qualified: bool,
}

fn hyp(stage: &'static str, w: Witness) -> Error {
    Error::HypothesisFail { stage, witness: w }
}

/// An invariant open star-refinement of an invariant open cover `u`.
///
/// Needs `X` equiregular and the orbit space regular (every finite space is
/// paracompact). Each construction step that can fail reports its stage; the
/// result is re-verified to be an invariant star-refinement.
pub fn stone_star_refine(inst: &SpaceInstance, group: &GroupAction, u: &Cover) -> Result<StoneRefinement> {
    let n = inst.n();
    if let Some(w) = is_invariant_cover(group, u).witness {
        return Err(hyp("lemma5.1:invariant cover", w));
    }
    if u.union() != inst.points() {
        return Err(hyp(
            "lemma5.1:invariant cover",
            Witness::new("cover misses points").with("missing", inst.points().difference(u.union())),
        ));
    }
    let q = orbit_quotient(inst, group);
    let qs = q.space();
    if let Some(w) = regular(qs).witness {
        return Err(hyp("lemma5.1:quotient regular", w));
    }

    // 𝒱: one equiregular neighbourhood per point, hosted in the first member
    // of `u` around it.
    let mut vs: Vec<(PointSet, PointSet)> = Vec::new();
    for x in 0..n {
        let host = u.iter().find(|s| s.contains(x)).expect("u covers x");
        let entry = match equireg_search(inst, group, x, host) {
            EquiregSearch::Found(e) | EquiregSearch::Frontier(e, _) => e,
            EquiregSearch::Failed(w) => return Err(hyp("lemma5.1:equiregular neighbourhood", w)),
        };
        if !vs.iter().any(|&(v, h)| v == entry.v && h == host) {
            vs.push((entry.v, host));
        }
    }

    // ℒ = {π(V)}; in a regular quotient each closure refines some π(V).
    let mut ls: Vec<(PointSet, usize)> = Vec::new();
    for &(v, _) in &vs {
        let l = q.project(v);
        if ls.iter().any(|&(m, _)| m == l) {
            continue;
        }
        let cl = qs.closure(l);
        let Some(i) = vs.iter().position(|&(w, _)| cl.is_subset(q.project(w))) else {
            return Err(hyp(
                "lemma5.1:closure refinement",
                Witness::new("no V with cl(L) inside pi(V)").with("L", l),
            ));
        };
        ls.push((l, i));
    }
    let cls: Vec<PointSet> = ls.iter().map(|&(l, _)| qs.closure(l)).collect();

    let mut nx = Vec::with_capacity(n);
    for x in 0..n {
        let px = q.orbit_of(x);
        // C(x): closures of the L whose closure misses π(x).
        let c = cls
            .iter()
            .filter(|cl| !cl.contains(px))
            .fold(PointSet::empty(), |acc, &s| acc.union(s));
        let mut acc = inst.points();
        for (k, &(l, vi)) in ls.iter().enumerate() {
            if !cls[k].contains(px) {
                continue;
            }
            let (v, host) = vs[vi];
            let cl_v = inst.closure(v);
            // least enumerated element first; beyond a cap, a generator path
            let g = group.elements().iter().find(|g| g.image(v).contains(x)).cloned().or_else(|| {
                v.iter()
                    .filter(|&y| q.orbit_of(y) == px)
                    .find_map(|y| group.transporter(y, x))
            });
            let Some(g) = g else {
                return Err(hyp(
                    "lemma5.1:translate of V(L)",
                    Witness::new("no translate of V(L) contains x").with("x", x).with("L", l),
                ));
            };
            let gv = g.image(v);
            let found = inst.nbhd_candidates(x).into_iter().map(|b| b.intersection(gv)).find(|&cand| {
                group.elements().iter().all(|h| {
                    let img = h.image(cand);
                    !img.meets(cl_v) || img.is_subset(host) || img.meets(inst.frontier())
                })
            });
            let Some(nxl) = found else {
                return Err(hyp(
                    "lemma5.1:N_x,L construction",
                    Witness::new("no neighbourhood").with("x", x).with("L", l),
                ));
            };
            acc = acc.intersection(nxl);
        }
        let nxs = acc.difference(q.preimage(c));
        if !nxs.contains(x) || !inst.is_open(nxs) {
            return Err(hyp(
                "lemma5.1:N_x construction",
                Witness::new("N_x is not an open neighbourhood").with("x", x).with("N_x", nxs),
            ));
        }
        nx.push(nxs);
    }

    let cover = saturate_cover(group, &Cover::new(nx.iter().copied()));
    let check = is_star_refinement(&cover, u, 1).and(is_invariant_cover(group, &cover));
    if let Some(w) = check.failure() {
        return Err(hyp("lemma5.1:post-verification", w));
    }
    Ok(StoneRefinement {
        cover,
        trace: RefineTrace { v: vs, l: ls, n: nx },
        qualified: !group.is_complete(),
    })
}

/// Iterate [`stone_star_refine`] `steps` times starting from `u1`; the result
/// starts with `u1` itself.
pub fn refine_chain(inst: &SpaceInstance, group: &GroupAction, u1: Cover, steps: usize) -> Result<(Vec<Cover>, Vec<RefineTrace>)> {
    let mut levels = vec![u1];
    let mut traces = Vec::new();
    for _ in 0..steps {
        let r = stone_star_refine(inst, group, levels.last().expect("nonempty"))?;
        levels.push(r.cover);
        traces.push(r.trace);
    }
    Ok((levels, traces))
}

/// Convenience verdict form of the post-verification.
pub fn verify_refinement(inst: &SpaceInstance, group: &GroupAction, v: &Cover, u: &Cover) -> Verdict {
    let covers = Verdict::from_bool(v.union() == inst.points(), || Witness::new("refinement:does not cover"));
    covers.and(is_star_refinement(v, u, 1)).and(is_invariant_cover(group, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{enumerate_group, Bornology, Perm};

    fn ps(v: &[usize]) -> PointSet {
        v.iter().collect()
    }

    #[test]
    fn refines_partition_space() {
        // Blocks {0,1},{2,3},{4,5}; G swaps the first two blocks.
        let inst = SpaceInstance::new(6, vec![ps(&[0, 1]), ps(&[2, 3]), ps(&[4, 5])], Bornology::full()).unwrap();
        let g = enumerate_group(&inst, vec![Perm::from_cycles(6, &[&[0, 2], &[1, 3]])], 64).unwrap();
        let u = Cover::new([ps(&[0, 1, 2, 3]), ps(&[4, 5])]);
        let r = stone_star_refine(&inst, &g, &u).unwrap();
        assert!(verify_refinement(&inst, &g, &r.cover, &u).is_pass());
        let again = stone_star_refine(&inst, &g, &r.cover).unwrap();
        assert!(verify_refinement(&inst, &g, &again.cover, &r.cover).is_pass());
    }

    #[test]
    fn rejects_non_invariant_cover() {
        let inst = SpaceInstance::discrete(3);
        let g = enumerate_group(&inst, vec![Perm::from_cycles(3, &[&[0, 1, 2]])], 64).unwrap();
        let u = Cover::new([ps(&[0, 1]), ps(&[2])]);
        match stone_star_refine(&inst, &g, &u) {
            Err(Error::HypothesisFail { stage, .. }) => assert_eq!(stage, "lemma5.1:invariant cover"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_non_regular_space() {
        let inst = SpaceInstance::new(2, vec![ps(&[0]), ps(&[0, 1])], Bornology::full()).unwrap();
        let u = Cover::new([ps(&[0, 1])]);
        assert!(matches!(
            stone_star_refine(&inst, &GroupAction::trivial(2), &u),
            Err(Error::HypothesisFail { .. })
        ));
    }
}
