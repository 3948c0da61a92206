use serde::Serialize;

use crate::error::{Error, Result};
use crate::pointset::{PointSet, MAX_POINTS};

/// An ideal of "bounded" subsets standing in for compactness.
///
/// A set is bounded when the bornology is full or the set lies inside one of
/// the generators. The family is a genuine ideal exactly when it is directed
/// (see [`Bornology::is_directed`]); [`validate_instance`] reports which.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bornology {
    pub generators: Vec<PointSet>,
    pub full: bool,
}

impl Bornology {
    pub fn full() -> Self {
        Bornology {
            generators: Vec::new(),
            full: true,
        }
    }

    pub fn generated(generators: Vec<PointSet>) -> Self {
        Bornology {
            generators,
            full: false,
        }
    }

    pub fn is_bounded(&self, a: PointSet) -> bool {
        self.full || a.is_empty() || self.generators.iter().any(|g| a.is_subset(*g))
    }

    /// Every pairwise union of generators lies inside some generator.
    pub fn is_directed(&self) -> bool {
        self.full
            || self.generators.iter().all(|a| {
                self.generators
                    .iter()
                    .all(|b| self.is_bounded(a.union(*b)))
            })
    }

    /// The sets a properness check must probe: the generators, or the whole
    /// space when the bornology is full.
    pub fn probes(&self, n: usize) -> Vec<PointSet> {
        if self.full {
            vec![PointSet::full(n)]
        } else {
            self.generators.clone()
        }
    }
}

/// Result of classifying a set against the bornology and the frontier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundedness {
    Bounded,
    Unbounded,
    /// Not bounded, but the set reaches the frontier of a horizon window, so the
    /// window cannot decide.
    Indeterminate,
}

/// A finite topological space presented by a basis, with a bornology and an
/// optional frontier (points at the edge of a horizon window).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceInstance {
    n: usize,
    basis: Vec<PointSet>,
    bornology: Bornology,
    labels: Option<Vec<String>>,
    frontier: PointSet,
    min_nbhd: Vec<PointSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub points: usize,
    pub basis_sets: usize,
    pub covers_points: bool,
    pub duplicate_basis_sets: Vec<usize>,
    pub bornology_in_range: bool,
    pub bornology_directed: bool,
    pub discrete: bool,
}

/// Check a raw presentation. Rejects out-of-range members, uncovered points,
/// and families that fail the basis intersection rule.
pub fn validate_instance(
    n: usize,
    basis: &[PointSet],
    bornology: &Bornology,
) -> Result<ValidationReport> {
    if n == 0 || n > MAX_POINTS {
        return Err(Error::Reject {
            rule: "point count",
            detail: format!("n = {n} must lie in 1..={MAX_POINTS}"),
        });
    }
    let all = PointSet::full(n);
    if let Some((i, b)) = basis.iter().enumerate().find(|(_, b)| !b.is_subset(all)) {
        return Err(Error::Reject {
            rule: "basis range",
            detail: format!("basis set {i} = {b} has members outside 0..{n}"),
        });
    }
    let covered = basis.iter().fold(PointSet::empty(), |acc, b| acc.union(*b));
    if let Some(x) = all.difference(covered).first() {
        return Err(Error::Reject {
            rule: "basis coverage",
            detail: format!("point {x} lies in no basis set"),
        });
    }
    // Intersection rule: each point of B1 ∩ B2 lies in a basis set inside B1 ∩ B2.
    for (i, b1) in basis.iter().enumerate() {
        for (j, b2) in basis.iter().enumerate().skip(i + 1) {
            let meet = b1.intersection(*b2);
            for x in meet.iter() {
                if !basis.iter().any(|b| b.contains(x) && b.is_subset(meet)) {
                    return Err(Error::Reject {
                        rule: "basis intersection",
                        detail: format!(
                            "point {x} of basis sets {i} ∩ {j} = {meet} has no basis set inside the intersection"
                        ),
                    });
                }
            }
        }
    }
    let mut duplicates = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        if basis[..i].contains(b) {
            duplicates.push(i);
        }
    }
    let bornology_in_range = bornology.generators.iter().all(|g| g.is_subset(all));
    let discrete = (0..n).all(|x| basis.contains(&PointSet::singleton(x)));
    Ok(ValidationReport {
        points: n,
        basis_sets: basis.len(),
        covers_points: true,
        duplicate_basis_sets: duplicates,
        bornology_in_range,
        bornology_directed: bornology.is_directed(),
        discrete,
    })
}

impl SpaceInstance {
    pub fn new(n: usize, basis: Vec<PointSet>, bornology: Bornology) -> Result<Self> {
        let report = validate_instance(n, &basis, &bornology)?;
        if !report.bornology_in_range {
            return Err(Error::Reject {
                rule: "bornology range",
                detail: "a bornology generator has members outside the ground set".into(),
            });
        }
        let min_nbhd = (0..n)
            .map(|x| {
                basis
                    .iter()
                    .filter(|b| b.contains(x))
                    .fold(PointSet::full(n), |acc, b| acc.intersection(*b))
            })
            .collect();
        Ok(SpaceInstance {
            n,
            basis,
            bornology,
            labels: None,
            frontier: PointSet::empty(),
            min_nbhd,
        })
    }

    /// Discrete topology on `n` points with the full bornology.
    pub fn discrete(n: usize) -> Self {
        let basis = (0..n).map(PointSet::singleton).collect();
        SpaceInstance::new(n, basis, Bornology::full()).expect("discrete instance is valid")
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::SizeMismatch(format!(
                "{} labels for {} points",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_frontier(mut self, frontier: PointSet) -> Result<Self> {
        if !frontier.is_subset(self.points()) {
            return Err(Error::Reject {
                rule: "frontier range",
                detail: format!("frontier {frontier} has members outside 0..{}", self.n),
            });
        }
        self.frontier = frontier;
        Ok(self)
    }

    pub fn with_bornology(mut self, bornology: Bornology) -> Result<Self> {
        if !bornology.generators.iter().all(|g| g.is_subset(self.points())) {
            return Err(Error::Reject {
                rule: "bornology range",
                detail: "a bornology generator has members outside the ground set".into(),
            });
        }
        self.bornology = bornology;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> PointSet {
        PointSet::full(self.n)
    }

    pub fn basis(&self) -> &[PointSet] {
        &self.basis
    }

    pub fn bornology(&self) -> &Bornology {
        &self.bornology
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn frontier(&self) -> PointSet {
        self.frontier
    }

    /// Smallest open set containing `x`.
    pub fn min_nbhd(&self, x: usize) -> PointSet {
        self.min_nbhd[x]
    }

    pub fn is_open(&self, a: PointSet) -> bool {
        a.iter().all(|x| self.min_nbhd[x].is_subset(a))
    }

    pub fn is_closed(&self, a: PointSet) -> bool {
        self.closure(a) == a
    }

    /// Points every neighbourhood of which meets `a`.
    pub fn closure(&self, a: PointSet) -> PointSet {
        (0..self.n)
            .filter(|&x| self.min_nbhd[x].meets(a))
            .collect()
    }

    pub fn interior(&self, a: PointSet) -> PointSet {
        (0..self.n)
            .filter(|&x| self.min_nbhd[x].is_subset(a))
            .collect()
    }

    pub fn is_discrete(&self) -> bool {
        (0..self.n).all(|x| self.min_nbhd[x].len() == 1)
    }

    /// Basis sets containing `x` in search order (size, then members), followed
    /// by the minimal neighbourhood when no basis set equals it. The trailing
    /// candidate makes "some open neighbourhood works" searches complete.
    pub fn nbhd_candidates(&self, x: usize) -> Vec<PointSet> {
        let mut out: Vec<PointSet> = self
            .basis
            .iter()
            .copied()
            .filter(|b| b.contains(x))
            .collect();
        out.sort_by_key(|b| b.search_key());
        out.dedup();
        let mn = self.min_nbhd[x];
        if !out.contains(&mn) {
            out.push(mn);
        }
        out
    }

    /// Classify `a` (callers pass closures where the definition asks for them).
    pub fn classify(&self, a: PointSet) -> Boundedness {
        if self.bornology.is_bounded(a) {
            Boundedness::Bounded
        } else if a.meets(self.frontier) {
            Boundedness::Indeterminate
        } else {
            Boundedness::Unbounded
        }
    }

    /// Classify the closure of `a`.
    pub fn classify_closure(&self, a: PointSet) -> Boundedness {
        self.classify(self.closure(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(v: &[usize]) -> PointSet {
        v.iter().collect()
    }

    #[test]
    fn singleton_basis_is_discrete() {
        let r = validate_instance(3, &[ps(&[0]), ps(&[1]), ps(&[2])], &Bornology::full()).unwrap();
        assert!(r.discrete && r.covers_points);
    }

    #[test]
    fn uncovered_point_rejected() {
        let err = validate_instance(3, &[ps(&[0, 1])], &Bornology::full()).unwrap_err();
        assert!(matches!(err, Error::Reject { rule: "basis coverage", .. }), "{err}");
    }

    #[test]
    fn non_full_bornology_valid() {
        let b = Bornology::generated(vec![ps(&[0, 1])]);
        let r = validate_instance(3, &[ps(&[0]), ps(&[1]), ps(&[2]), ps(&[0, 1, 2])], &b).unwrap();
        assert!(r.discrete);
        assert!(r.bornology_directed);
        let inst = SpaceInstance::new(3, vec![ps(&[0]), ps(&[1]), ps(&[2])], b).unwrap();
        assert!(!inst.bornology().full);
        assert_eq!(inst.classify(ps(&[0])), Boundedness::Bounded);
        assert_eq!(inst.classify(ps(&[0, 2])), Boundedness::Unbounded);
    }

    #[test]
    fn basis_intersection_rule() {
        let err = validate_instance(3, &[ps(&[0, 1]), ps(&[1, 2])], &Bornology::full()).unwrap_err();
        assert!(matches!(err, Error::Reject { rule: "basis intersection", .. }));
    }

    #[test]
    fn closure_discrete_and_sierpinski() {
        let d = SpaceInstance::discrete(3);
        assert_eq!(d.closure(ps(&[1])), ps(&[1]));
        let s = SpaceInstance::new(2, vec![ps(&[0]), ps(&[0, 1])], Bornology::full()).unwrap();
        assert_eq!(s.closure(ps(&[0])), ps(&[0, 1]));
        assert_eq!(s.closure(ps(&[1])), ps(&[1]));
        assert!(s.is_open(ps(&[0])) && !s.is_open(ps(&[1])));
        assert_eq!(s.interior(ps(&[1])), PointSet::empty());
    }

    #[test]
    fn frontier_classification() {
        let inst = SpaceInstance::discrete(4)
            .with_bornology(Bornology::generated(vec![ps(&[0, 1])]))
            .unwrap()
            .with_frontier(ps(&[3]))
            .unwrap();
        assert_eq!(inst.classify(ps(&[1, 2])), Boundedness::Unbounded);
        assert_eq!(inst.classify(ps(&[1, 3])), Boundedness::Indeterminate);
    }

    #[test]
    fn undirected_bornology_reported() {
        let b = Bornology::generated(vec![ps(&[0]), ps(&[1])]);
        assert!(!b.is_directed());
        assert!(!b.is_bounded(ps(&[0, 1])));
    }
}
