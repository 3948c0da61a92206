use serde::Serialize;

use crate::pointset::PointSet;
use crate::space::{Bornology, GroupAction, SpaceInstance};
use crate::verdict::{Verdict, Witness};

/// The orbit space `G\X` with its quotient topology, itself presented as a
/// [`SpaceInstance`] on orbit indices.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    orbit_of: Vec<usize>,
    orbits: Vec<PointSet>,
    space: SpaceInstance,
}

impl QuotientSpace {
    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbit_of(&self, x: usize) -> usize {
        self.orbit_of[x]
    }

    pub fn orbits(&self) -> &[PointSet] {
        &self.orbits
    }

    pub fn space(&self) -> &SpaceInstance {
        &self.space
    }

    /// `π(a)`.
    pub fn project(&self, a: PointSet) -> PointSet {
        a.iter().map(|x| self.orbit_of[x]).collect()
    }

    /// `π⁻¹(q)`.
    pub fn preimage(&self, q: PointSet) -> PointSet {
        q.iter()
            .fold(PointSet::empty(), |acc, o| acc.union(self.orbits[o]))
    }

    /// The defining criterion of the quotient topology.
    pub fn is_open(&self, q: PointSet) -> bool {
        q.is_subset(PointSet::full(self.orbit_count())) && self.space.is_open(q)
    }
}

/// Orbit partition and quotient topology. The images `π(B)` of basis sets form
/// the quotient basis because `π` is open: `π⁻¹(π(B)) = G·B`.
pub fn orbit_quotient(inst: &SpaceInstance, group: &GroupAction) -> QuotientSpace {
    let orbits = group.orbits();
    let mut orbit_of = vec![0; inst.n()];
    for (i, o) in orbits.iter().enumerate() {
        for x in o.iter() {
            orbit_of[x] = i;
        }
    }
    let project = |a: PointSet| -> PointSet { a.iter().map(|x| orbit_of[x]).collect() };
    let mut basis: Vec<PointSet> = inst.basis().iter().map(|b| project(*b)).collect();
    basis.sort_by_key(|b| b.search_key());
    basis.dedup();
    let bornology = if inst.bornology().full {
        Bornology::full()
    } else {
        Bornology::generated(inst.bornology().generators.iter().map(|g| project(*g)).collect())
    };
    let space = SpaceInstance::new(orbits.len(), basis, bornology)
        .expect("images of a basis under an open map form a basis")
        .with_frontier(project(inst.frontier()))
        .expect("frontier image in range");
    QuotientSpace {
        orbit_of,
        orbits,
        space,
    }
}

/// Separation verdicts for `X` and `G\X`.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub space_hausdorff: Verdict,
    pub space_regular: Verdict,
    pub quotient_hausdorff: Verdict,
    pub quotient_regular: Verdict,
    /// Every finite space is paracompact.
    pub quotient_paracompact: bool,
}

pub fn hausdorff(inst: &SpaceInstance) -> Verdict {
    for x in 0..inst.n() {
        for y in x + 1..inst.n() {
            if inst.min_nbhd(x).meets(inst.min_nbhd(y)) {
                return Verdict::fail(
                    Witness::new("hausdorff:inseparable pair")
                        .with("x", x)
                        .with("y", y),
                );
            }
        }
    }
    Verdict::pass()
}

/// For every point and basis neighbourhood `U`, some open `V` around the point
/// has `cl(V) ⊆ U`.
pub fn regular(inst: &SpaceInstance) -> Verdict {
    for x in 0..inst.n() {
        for u in inst.basis().iter().filter(|u| u.contains(x)) {
            let ok = inst
                .nbhd_candidates(x)
                .into_iter()
                .any(|v| inst.closure(v).is_subset(*u));
            if !ok {
                return Verdict::fail(
                    Witness::new("regular:no closed-inside neighbourhood")
                        .with("x", x)
                        .with("U", u),
                );
            }
        }
    }
    Verdict::pass()
}

pub fn hypothesis_report(inst: &SpaceInstance, quotient: &QuotientSpace) -> HypothesisReport {
    HypothesisReport {
        space_hausdorff: hausdorff(inst),
        space_regular: regular(inst),
        quotient_hausdorff: hausdorff(quotient.space()),
        quotient_regular: regular(quotient.space()),
        quotient_paracompact: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{enumerate_group, Perm};

    fn ps(v: &[usize]) -> PointSet {
        v.iter().collect()
    }

    #[test]
    fn trivial_group_quotient_is_space() {
        let inst = SpaceInstance::discrete(3);
        let q = orbit_quotient(&inst, &GroupAction::trivial(3));
        assert_eq!(q.orbit_count(), 3);
        assert!(q.space().is_discrete());
    }

    #[test]
    fn double_transposition_two_orbits() {
        let inst = SpaceInstance::discrete(4);
        let g = enumerate_group(&inst, vec![Perm::from_cycles(4, &[&[0, 1], &[2, 3]])], 10).unwrap();
        let q = orbit_quotient(&inst, &g);
        assert_eq!(q.orbit_count(), 2);
        assert_eq!(q.preimage(ps(&[0])), ps(&[0, 1]));
    }

    #[test]
    fn discrete_is_hausdorff_and_regular() {
        let inst = SpaceInstance::discrete(4);
        let q = orbit_quotient(&inst, &GroupAction::trivial(4));
        let r = hypothesis_report(&inst, &q);
        assert!(r.space_hausdorff.is_pass() && r.space_regular.is_pass());
        assert!(r.quotient_hausdorff.is_pass() && r.quotient_regular.is_pass());
    }

    #[test]
    fn sierpinski_separation() {
        let s = SpaceInstance::new(2, vec![ps(&[0]), ps(&[0, 1])], Bornology::full()).unwrap();
        assert!(hausdorff(&s).is_fail());
        // cl({0}) = {0,1} is not inside the basis set {0}
        let r = regular(&s);
        assert!(r.is_fail());
        assert_eq!(r.witness.unwrap().get("x").unwrap(), 0);
    }

    #[test]
    fn quotient_open_criterion() {
        // X = {0,1,2,3}, opens generated by {0,1},{2},{3}; swap 2<->3
        let inst = SpaceInstance::new(4, vec![ps(&[0, 1]), ps(&[2]), ps(&[3])], Bornology::full()).unwrap();
        let g = enumerate_group(&inst, vec![Perm::from_cycles(4, &[&[2, 3]])], 10).unwrap();
        let q = orbit_quotient(&inst, &g);
        for bits in 0u128..(1 << q.orbit_count()) {
            let s = PointSet::from_bits(bits);
            assert_eq!(q.is_open(s), inst.is_open(q.preimage(s)));
        }
    }
}
