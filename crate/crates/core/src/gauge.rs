//! Extended gauges: exact distance matrices with values in `[0, ∞]`, their
//! balls, axioms, combinators, crevasses and properness.

use serde::{Serialize, Serializer};

use crate::dyadic::{Dist, Dyadic};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::{Boundedness, SpaceInstance};
use crate::verdict::{Verdict, VerdictBuilder, Witness};

/// A symmetric matrix of distances with zero diagonal (checked by
/// [`gauge_axioms_check`], not by construction).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtGauge {
    n: usize,
    values: Vec<Dist>,
}

impl ExtGauge {
    pub fn new(n: usize, values: Vec<Dist>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::SizeMismatch(format!(
                "{} entries for a {n}×{n} matrix",
                values.len()
            )));
        }
        Ok(ExtGauge { n, values })
    }

    pub fn from_rows(rows: Vec<Vec<Dist>>) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::SizeMismatch(format!("row of length {} in a {n}-point matrix", r.len())));
        }
        ExtGauge::new(n, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Dist) -> Self {
        let mut values = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                values.push(f(x, y));
            }
        }
        ExtGauge { n, values }
    }

    pub fn zero(n: usize) -> Self {
        ExtGauge::from_fn(n, |_, _| Dist::ZERO)
    }

    /// 0 on the diagonal, 1 elsewhere.
    pub fn discrete(n: usize) -> Self {
        ExtGauge::from_fn(n, |x, y| if x == y { Dist::ZERO } else { Dist::ONE })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize) -> Dist {
        self.values[x * self.n + y]
    }

    pub fn set(&mut self, x: usize, y: usize, d: Dist) {
        self.values[x * self.n + y] = d;
    }

    pub fn rows(&self) -> Vec<Vec<Dist>> {
        self.values.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// `𝒩(x, ε) = {y : ρ(x,y) < ε}`.
    pub fn ball(&self, x: usize, eps: Dist) -> PointSet {
        (0..self.n).filter(|&y| self.get(x, y) < eps).collect()
    }

    /// `𝒩(x, ε] = {y : ρ(x,y) ≤ ε}`.
    pub fn closed_ball(&self, x: usize, eps: Dist) -> PointSet {
        (0..self.n).filter(|&y| self.get(x, y) <= eps).collect()
    }

    /// `𝒩(A, ε)`, the union of the balls around members of `a`.
    pub fn ball_of_set(&self, a: PointSet, eps: Dist) -> PointSet {
        a.iter()
            .fold(PointSet::empty(), |acc, x| acc.union(self.ball(x, eps)))
    }

    /// Radii at which every open ball takes each of its possible values: the
    /// distinct positive finite entries and one value past the largest.
    pub fn thresholds(&self) -> Vec<Dist> {
        let mut v: Vec<Dist> = self
            .values
            .iter()
            .copied()
            .filter(|d| d.is_finite() && !d.is_zero())
            .collect();
        v.sort();
        v.dedup();
        let beyond = match v.last() {
            Some(d) => *d + Dist::ONE,
            None => Dist::ONE,
        };
        v.push(beyond);
        v
    }

    pub fn max_finite(&self) -> Option<Dyadic> {
        self.values.iter().filter_map(|d| d.finite()).max()
    }

    pub fn is_finite_valued(&self) -> bool {
        self.values.iter().all(|d| d.is_finite())
    }

    /// Apply a permutation of the points: `(g·ρ)(g x, g y) = ρ(x, y)`.
    pub fn map_points(&self, images: &[usize]) -> ExtGauge {
        let mut out = self.clone();
        for x in 0..self.n {
            for y in 0..self.n {
                out.set(images[x], images[y], self.get(x, y));
            }
        }
        out
    }
}

impl std::fmt::Debug for ExtGauge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Serialize for ExtGauge {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.rows())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub zero_diagonal: Verdict,
    pub symmetric: Verdict,
    pub triangle: Verdict,
    pub open_balls: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separating: Option<Verdict>,
}

impl AxiomReport {
    pub fn all(&self) -> Verdict {
        let v = self
            .zero_diagonal
            .clone()
            .and(self.symmetric.clone())
            .and(self.triangle.clone())
            .and(self.open_balls.clone());
        match &self.separating {
            Some(s) => v.and(s.clone()),
            None => v,
        }
    }

    pub fn pseudometric(&self) -> Verdict {
        self.zero_diagonal
            .clone()
            .and(self.symmetric.clone())
            .and(self.triangle.clone())
    }
}

/// Conditions 1–4 of a gauge (and separation when `metric` is set), exactly.
/// Ball openness is checked at every threshold radius.
pub fn gauge_axioms_check(rho: &ExtGauge, inst: &SpaceInstance, metric: bool) -> AxiomReport {
    let n = rho.n();
    let zero_diagonal = match (0..n).find(|&x| !rho.get(x, x).is_zero()) {
        Some(x) => Verdict::fail(Witness::new("gauge:nonzero diagonal").with("x", x)),
        None => Verdict::pass(),
    };
    let mut symmetric = Verdict::pass();
    'sym: for x in 0..n {
        for y in x + 1..n {
            if rho.get(x, y) != rho.get(y, x) {
                symmetric = Verdict::fail(Witness::new("gauge:asymmetric").with("x", x).with("y", y));
                break 'sym;
            }
        }
    }
    let mut triangle = Verdict::pass();
    'tri: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if rho.get(x, z) > rho.get(x, y) + rho.get(y, z) {
                    triangle = Verdict::fail(
                        Witness::new("gauge:triangle inequality")
                            .with("x", x)
                            .with("y", y)
                            .with("z", z),
                    );
                    break 'tri;
                }
            }
        }
    }
    let mut open_balls = Verdict::pass();
    if n == inst.n() {
        'open: for eps in rho.thresholds() {
            for x in 0..n {
                let b = rho.ball(x, eps);
                if !inst.is_open(b) {
                    open_balls = Verdict::fail(
                        Witness::new("gauge:ball not open")
                            .with("x", x)
                            .with("eps", eps)
                            .with("ball", b),
                    );
                    break 'open;
                }
            }
        }
    } else {
        open_balls = Verdict::fail(
            Witness::new("gauge:size mismatch")
                .with("gauge", n)
                .with("instance", inst.n()),
        );
    }
    let separating = metric.then(|| separating_pairs(&[rho]));
    AxiomReport {
        zero_diagonal,
        symmetric,
        triangle,
        open_balls,
        separating,
    }
}

fn separating_pairs(gauges: &[&ExtGauge]) -> Verdict {
    let n = gauges.first().map_or(0, |g| g.n());
    for x in 0..n {
        for y in x + 1..n {
            if gauges.iter().all(|g| g.get(x, y).is_zero()) {
                return Verdict::fail(Witness::new("gauge:not separating").with("x", x).with("y", y));
            }
        }
    }
    Verdict::pass()
}

/// `min{ρ, 1}`.
pub fn decapitate(rho: &ExtGauge) -> ExtGauge {
    ExtGauge::from_fn(rho.n(), |x, y| rho.get(x, y).capped_at_one())
}

fn same_size(gauges: &[ExtGauge]) -> Result<usize> {
    let n = gauges
        .first()
        .ok_or_else(|| Error::SizeMismatch("empty gauge list".into()))?
        .n();
    if let Some(g) = gauges.iter().find(|g| g.n() != n) {
        return Err(Error::SizeMismatch(format!("gauges on {n} and {} points", g.n())));
    }
    Ok(n)
}

/// Pointwise maximum.
pub fn max_combine(gauges: &[ExtGauge]) -> Result<ExtGauge> {
    let n = same_size(gauges)?;
    Ok(ExtGauge::from_fn(n, |x, y| {
        gauges.iter().map(|g| g.get(x, y)).max().expect("nonempty")
    }))
}

/// `𝒩_max(x, ε) = ⋂ᵢ 𝒩ρᵢ(x, ε)` at every threshold of every input.
pub fn verify_max_ball_identity(gauges: &[ExtGauge], combined: &ExtGauge) -> Verdict {
    let mut radii: Vec<Dist> = gauges.iter().flat_map(|g| g.thresholds()).collect();
    radii.extend(combined.thresholds());
    radii.sort();
    radii.dedup();
    for eps in radii {
        for x in 0..combined.n() {
            let meet = gauges
                .iter()
                .fold(PointSet::full(combined.n()), |acc, g| acc.intersection(g.ball(x, eps)));
            if combined.ball(x, eps) != meet {
                return Verdict::fail(Witness::new("max:ball identity").with("x", x).with("eps", eps));
            }
        }
    }
    Verdict::pass()
}

#[derive(Clone, Debug, Serialize)]
pub struct SupCombination {
    pub gauge: ExtGauge,
    /// Fails with a pair at distance zero when the family does not separate.
    pub separating: Verdict,
}

/// `σ(x,y) = maxᵢ 2⁻ⁱ ρ̄ᵢ(x,y)`, `i` counted from 1, over decapitated inputs.
pub fn sup_combine(gauges: &[ExtGauge]) -> Result<SupCombination> {
    let n = same_size(gauges)?;
    let gauge = ExtGauge::from_fn(n, |x, y| {
        gauges
            .iter()
            .enumerate()
            .map(|(i, g)| g.get(x, y).capped_at_one().shr(i as u32 + 1))
            .max()
            .expect("nonempty")
    });
    let separating = separating_pairs(&[&gauge]);
    Ok(SupCombination { gauge, separating })
}

/// Classes of mutually finite distance, each with its least point as
/// representative, in order of representatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrevassePartition {
    pub blocks: Vec<PointSet>,
    pub representatives: Vec<usize>,
    #[serde(skip)]
    block_of: Vec<usize>,
}

impl CrevassePartition {
    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Both points lie in one crevasse.
    pub fn together(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }
}

pub fn crevasse_partition(rho: &ExtGauge) -> CrevassePartition {
    let n = rho.n();
    let mut block_of = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    let mut representatives = Vec::new();
    for x in 0..n {
        if block_of[x] != usize::MAX {
            continue;
        }
        let b: PointSet = (0..n).filter(|&y| rho.get(x, y).is_finite()).collect();
        for y in b.iter() {
            block_of[y] = blocks.len();
        }
        blocks.push(b);
        representatives.push(x);
    }
    CrevassePartition {
        blocks,
        representatives,
        block_of,
    }
}

/// `cl(𝒩ρ(x, ε))` is bounded for every point and every threshold radius.
pub fn is_proper_gauge(rho: &ExtGauge, inst: &SpaceInstance) -> Verdict {
    let mut vb = VerdictBuilder::new();
    'outer: for eps in rho.thresholds() {
        for x in 0..rho.n() {
            let b = rho.ball(x, eps);
            match inst.classify_closure(b) {
                Boundedness::Bounded => {}
                Boundedness::Unbounded => {
                    vb.fail(
                        Witness::new("proper gauge:ball closure unbounded")
                            .with("x", x)
                            .with("eps", eps)
                            .with("ball", b),
                    );
                    break 'outer;
                }
                Boundedness::Indeterminate => vb.indeterminate(|| {
                    Witness::new("proper gauge:ball reaches frontier")
                        .with("x", x)
                        .with("eps", eps)
                }),
            }
        }
    }
    vb.finish()
}

/// `cl(𝒩ρ(A, ε))` bounded for every bornology probe `A` and threshold `ε`.
pub fn verify_set_ball_closures(rho: &ExtGauge, inst: &SpaceInstance) -> Verdict {
    let mut vb = VerdictBuilder::new();
    for a in inst.bornology().probes(inst.n()) {
        for eps in rho.thresholds() {
            let b = rho.ball_of_set(a, eps);
            match inst.classify_closure(b) {
                Boundedness::Bounded => {}
                Boundedness::Unbounded => {
                    vb.fail(
                        Witness::new("lemma3.1:set ball closure unbounded")
                            .with("A", a)
                            .with("eps", eps),
                    );
                    return vb.finish();
                }
                Boundedness::Indeterminate => vb.indeterminate(|| {
                    Witness::new("lemma3.1:set ball reaches frontier").with("A", a).with("eps", eps)
                }),
            }
        }
    }
    vb.finish()
}

/// Finite family of gauges with per-member tags.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeFamily {
    pub gauges: Vec<ExtGauge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GaugeTag {
    pub finite: bool,
    pub proper: bool,
}

impl GaugeFamily {
    pub fn new(gauges: Vec<ExtGauge>) -> Self {
        GaugeFamily { gauges }
    }

    pub fn single(g: ExtGauge) -> Self {
        GaugeFamily { gauges: vec![g] }
    }

    pub fn len(&self) -> usize {
        self.gauges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gauges.is_empty()
    }

    pub fn tags(&self, inst: &SpaceInstance) -> Vec<GaugeTag> {
        self.gauges
            .iter()
            .map(|g| GaugeTag {
                finite: g.is_finite_valued(),
                proper: is_proper_gauge(g, inst).is_pass(),
            })
            .collect()
    }

    pub fn is_separating(&self) -> Verdict {
        if self.gauges.is_empty() {
            return Verdict::fail(Witness::new("gauge family:empty"));
        }
        separating_pairs(&self.gauges.iter().collect::<Vec<_>>())
    }

    /// Smallest open set around `x` in the topology the family determines.
    /// Every subbasic ball around `x` contains a ball centred at `x`, so this
    /// is the set of points at distance zero from `x` in every member.
    pub fn min_nbhd(&self, x: usize, n: usize) -> PointSet {
        self.gauges.iter().fold(PointSet::full(n), |acc, g| {
            acc.intersection(g.closed_ball(x, Dist::ZERO))
        })
    }
}

/// The two families determine the same topology.
pub fn same_topology(p: &GaugeFamily, q: &GaugeFamily, n: usize) -> Verdict {
    for x in 0..n {
        let (a, b) = (p.min_nbhd(x, n), q.min_nbhd(x, n));
        if a != b {
            return Verdict::fail(
                Witness::new("topology:minimal neighbourhoods differ")
                    .with("x", x)
                    .with("P", a)
                    .with("Q", b),
            );
        }
    }
    Verdict::pass()
}

/// The family determines the instance topology.
pub fn determines_topology(p: &GaugeFamily, inst: &SpaceInstance) -> Verdict {
    for x in 0..inst.n() {
        let a = p.min_nbhd(x, inst.n());
        if a != inst.min_nbhd(x) {
            return Verdict::fail(
                Witness::new("topology:family differs from instance")
                    .with("x", x)
                    .with("family", a)
                    .with("instance", inst.min_nbhd(x)),
            );
        }
    }
    Verdict::pass()
}

/// Exact invariance under a list of point permutations.
pub fn invariance_under(rho: &ExtGauge, perms: &[Vec<usize>]) -> Verdict {
    for (k, g) in perms.iter().enumerate() {
        for x in 0..rho.n() {
            for y in 0..rho.n() {
                if rho.get(g[x], g[y]) != rho.get(x, y) {
                    return Verdict::fail(
                        Witness::new("invariance:distance moved")
                            .with("g", k)
                            .with("x", x)
                            .with("y", y),
                    );
                }
            }
        }
    }
    Verdict::pass()
}
