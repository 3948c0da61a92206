use serde::Serialize;

use crate::cover::{is_proper_cover, Cover};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::{orbit_quotient, Boundedness, GroupAction, SpaceInstance};
use crate::verdict::{Verdict, VerdictBuilder, Witness};

use super::checks::{is_invariant_cover, near_properness_check, saturate_cover};

/// Compact pieces `Kᵢ` and open collars `Lᵢ` cut from an exhaustion.
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    #[serde(rename = "K")]
    pub k: Vec<PointSet>,
    #[serde(rename = "L")]
    pub l: Vec<PointSet>,
    pub checks: DecompositionChecks,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionChecks {
    /// `⋃Kᵢ = X`.
    pub union: Verdict,
    /// Each `Kᵢ` closed, and bounded except for the tail piece.
    pub compact: Verdict,
    /// `Kᵢ ∩ Kⱼ = ∅` for `i ≠ j`.
    pub disjoint: Verdict,
    /// `Kᵢ ⊆ Lᵢ`, each `Lᵢ` open.
    pub inside: Verdict,
    /// `Lᵢ ∩ Kⱼ = ∅` for `|i − j| > 1`.
    pub collar_k: Verdict,
    /// `Lᵢ ∩ Lⱼ = ∅` for `|i − j| > 2`.
    pub collar_l: Verdict,
}

impl DecompositionChecks {
    pub fn all(&self) -> Verdict {
        [&self.compact, &self.disjoint, &self.inside, &self.collar_k, &self.collar_l]
            .into_iter()
            .fold(self.union.clone(), |acc, v| acc.and(v.clone()))
    }
}

fn bad(msg: String) -> Error {
    Error::BadExhaustion(msg)
}

/// Decompose an exhaustion `D₁ ⊆ D₂ ⊆ ..` of `space` by closed bounded sets
/// with `Dᵢ ⊆ int(Dᵢ₊₁)` and `⋃Dᵢ = X`. The chain is truncated: its last entry
/// must be `X` and stands for the unbounded tail, so only the earlier entries
/// (and the pieces cut from them) must be bounded. Indices past the end read
/// as `X`.
pub fn exhaustion_decomposition(space: &SpaceInstance, d: &[PointSet]) -> Result<Decomposition> {
    let x = space.points();
    if d.is_empty() {
        return Err(bad("empty exhaustion".into()));
    }
    for (i, &di) in d.iter().enumerate() {
        if !di.is_subset(x) {
            return Err(bad(format!("D{} has points outside the space", i + 1)));
        }
        if !space.is_closed(di) {
            return Err(bad(format!("D{} is not closed", i + 1)));
        }
        if i + 1 < d.len() && space.classify(di) == Boundedness::Unbounded {
            return Err(bad(format!("D{} is not bounded", i + 1)));
        }
        if i + 1 < d.len() && !di.is_subset(space.interior(d[i + 1])) {
            return Err(bad(format!("D{} is not inside the interior of D{}", i + 1, i + 2)));
        }
    }
    if *d.last().expect("nonempty") != x {
        return Err(bad("the exhaustion does not reach the whole space".into()));
    }
    // 1-based accessor; D₀ = D₋₁ = ∅, past the end = X.
    let at = |j: isize| -> PointSet {
        if j < 1 {
            PointSet::empty()
        } else {
            d.get(j as usize - 1).copied().unwrap_or(x)
        }
    };
    let m = d.len() as isize;
    let k: Vec<PointSet> = (1..=m).map(|i| at(i).difference(space.interior(at(i - 1)))).collect();
    let l: Vec<PointSet> = (1..=m)
        .map(|i| space.interior(at(i + 1)).difference(at(i - 2)))
        .collect();
    let checks = check_decomposition(space, &k, &l);
    Ok(Decomposition { k, l, checks })
}

fn check_decomposition(space: &SpaceInstance, k: &[PointSet], l: &[PointSet]) -> DecompositionChecks {
    let all = k.iter().fold(PointSet::empty(), |a, &s| a.union(s));
    let union = Verdict::from_bool(all == space.points(), || {
        Witness::new("exhaustion:pieces miss points").with("missing", space.points().difference(all))
    });
    let mut compact = VerdictBuilder::new();
    let mut disjoint = VerdictBuilder::new();
    let mut inside = VerdictBuilder::new();
    let mut collar_k = VerdictBuilder::new();
    let mut collar_l = VerdictBuilder::new();
    for i in 0..k.len() {
        if !space.is_closed(k[i]) {
            compact.fail(Witness::new("exhaustion:K not closed").with("i", i + 1));
        }
        let tail = i + 1 == k.len();
        match if tail { Boundedness::Bounded } else { space.classify(k[i]) } {
            Boundedness::Bounded => {}
            Boundedness::Unbounded => compact.fail(Witness::new("exhaustion:K unbounded").with("i", i + 1)),
            Boundedness::Indeterminate => compact.indeterminate(|| Witness::new("exhaustion:K at frontier").with("i", i + 1)),
        }
        if !k[i].is_subset(l[i]) || !space.is_open(l[i]) {
            inside.fail(Witness::new("exhaustion:K not inside open L").with("i", i + 1));
        }
        for j in 0..k.len() {
            if i != j && k[i].meets(k[j]) {
                disjoint.fail(Witness::new("exhaustion:K overlap").with("i", i + 1).with("j", j + 1));
            }
            if i.abs_diff(j) > 1 && l[i].meets(k[j]) {
                collar_k.fail(Witness::new("exhaustion:L meets distant K").with("i", i + 1).with("j", j + 1));
            }
            if i.abs_diff(j) > 2 && l[i].meets(l[j]) {
                collar_l.fail(Witness::new("exhaustion:L meets distant L").with("i", i + 1).with("j", j + 1));
            }
        }
    }
    DecompositionChecks {
        union,
        compact: compact.finish(),
        disjoint: disjoint.finish(),
        inside: inside.finish(),
        collar_k: collar_k.finish(),
        collar_l: collar_l.finish(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProperCover {
    pub cover: Cover,
    pub decomposition: Decomposition,
    /// `ℱᵢ`: open sets with bounded closure whose images cover `Kᵢ` inside `Lᵢ`.
    pub pieces: Vec<Vec<PointSet>>,
    pub proper: Verdict,
}

fn hyp(stage: &'static str, w: Witness) -> Error {
    Error::HypothesisFail { stage, witness: w }
}

/// An invariant proper open cover of a nearly proper `X`, built from an
/// exhaustion `d` of the orbit space (sets of orbit indices).
pub fn proper_invariant_cover(inst: &SpaceInstance, group: &GroupAction, d: &[PointSet]) -> Result<ProperCover> {
    let np = near_properness_check(inst, group);
    if let Some(w) = np.failure() {
        return Err(hyp("lemma5.3:near-properness", w));
    }
    let q = orbit_quotient(inst, group);
    let dec = exhaustion_decomposition(q.space(), d)?;
    if let Some(w) = dec.checks.all().failure() {
        return Err(hyp("prop5.2:decomposition", w));
    }
    let mut pieces = Vec::with_capacity(dec.k.len());
    let mut members = Vec::new();
    for (i, (&ki, &li)) in dec.k.iter().zip(&dec.l).enumerate() {
        let collar = q.preimage(li);
        let mut fi: Vec<PointSet> = Vec::new();
        for o in ki.iter() {
            if fi.iter().any(|&f| q.project(f).contains(o)) {
                continue;
            }
            let found = q.orbits()[o].iter().find_map(|x| {
                inst.nbhd_candidates(x)
                    .into_iter()
                    .map(|b| b.intersection(collar))
                    .find(|&c| inst.classify_closure(c) != Boundedness::Unbounded)
            });
            let Some(f) = found else {
                return Err(hyp(
                    "lemma5.3:K_i coverage",
                    Witness::new("no bounded-closure neighbourhood")
                        .with("i", i + 1)
                        .with("orbit", o),
                ));
            };
            fi.push(f);
        }
        members.extend(fi.iter().copied());
        pieces.push(fi);
    }
    let cover = saturate_cover(group, &Cover::new(members));
    let invariant = is_invariant_cover(group, &cover);
    if let Some(w) = invariant.failure() {
        return Err(hyp("lemma5.3:invariance", w));
    }
    let proper = is_proper_cover(&cover, inst).qualified(!group.is_complete());
    if let Some(w) = proper.failure() {
        return Err(hyp("lemma5.3:properness", w));
    }
    Ok(ProperCover {
        cover,
        decomposition: dec,
        pieces,
        proper,
    })
}
