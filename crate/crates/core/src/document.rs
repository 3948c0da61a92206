//! JSON instance documents: parsing with line/field diagnostics, cross
//! validation into model objects, and the normalized form used for
//! round-trips.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cover::{Cover, Development};
use crate::dyadic::{Dist, Dyadic};
use crate::error::{Error, Result};
use crate::gauge::ExtGauge;
use crate::pointset::PointSet;
use crate::space::{enumerate_group, Bornology, GroupAction, HorizonFamily, HorizonLevel, Perm, SpaceInstance};
use crate::tunnels::TunnelSystem;

pub const DEFAULT_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointsDoc {
    Count(usize),
    Labels(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BornologyDoc {
    /// `"full"`: every set is bounded.
    Named(String),
    Generated {
        generators: Vec<PointSet>,
        #[serde(default, skip_serializing_if = "no_points")]
        frontier: PointSet,
    },
}

fn no_points(a: &PointSet) -> bool {
    a.is_empty()
}

/// A generator as its image array, or as `[from, to]` pairs with every
/// unlisted point fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorDoc {
    Images(Vec<usize>),
    Pairs(Vec<(usize, usize)>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    pub generators: Vec<GeneratorDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelDoc {
    pub points: PointsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<PointSet>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bornology: Option<BornologyDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embed_next: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<PointsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<PointSet>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bornology: Option<BornologyDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub covers: BTreeMap<String, Vec<PointSet>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub developments: BTreeMap<String, Vec<Vec<PointSet>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub gauges: BTreeMap<String, Vec<Vec<Dist>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tunnels: BTreeMap<String, Vec<(usize, usize, Dyadic)>>,
    /// Orbit-space exhaustion `D₁ ⊆ D₂ ⊆ ..`, as sets of orbit indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustion: Option<Vec<PointSet>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<(usize, PointSet)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<LevelDoc>>,
}

/// A validated document.
#[derive(Clone, Debug)]
pub struct Instance {
    pub space: SpaceInstance,
    pub group: GroupAction,
    pub covers: Vec<(String, Cover)>,
    pub developments: Vec<(String, Development)>,
    pub gauges: Vec<(String, ExtGauge)>,
    pub tunnels: Vec<(String, TunnelSystem)>,
    pub exhaustion: Option<Vec<PointSet>>,
    pub targets: Option<Vec<(usize, PointSet)>>,
    pub horizon: Option<HorizonFamily>,
}

impl Instance {
    pub fn bare(space: SpaceInstance, group: GroupAction) -> Self {
        Instance {
            space,
            group,
            covers: Vec::new(),
            developments: Vec::new(),
            gauges: Vec::new(),
            tunnels: Vec::new(),
            exhaustion: None,
            targets: None,
            horizon: None,
        }
    }

    /// The gauge a tunnel system is laid over: the gauge of the same name,
    /// or the only gauge.
    pub fn gauge_for_tunnels(&self, name: &str) -> Option<&ExtGauge> {
        self.gauges
            .iter()
            .find(|(g, _)| g == name)
            .or_else(|| (self.gauges.len() == 1).then(|| &self.gauges[0]))
            .map(|(_, g)| g)
    }

    /// The normalized document: explicit basis, bornology and images.
    pub fn to_document(&self) -> InstanceDocument {
        let (points, basis, bornology, group) = space_doc(&self.space, &self.group);
        InstanceDocument {
            points: Some(points),
            basis: Some(basis),
            bornology: Some(bornology),
            group: Some(group),
            covers: self.covers.iter().map(|(k, c)| (k.clone(), c.sets().to_vec())).collect(),
            developments: self
                .developments
                .iter()
                .map(|(k, d)| (k.clone(), d.levels().iter().map(|c| c.sets().to_vec()).collect()))
                .collect(),
            gauges: self.gauges.iter().map(|(k, g)| (k.clone(), g.rows())).collect(),
            tunnels: self.tunnels.iter().map(|(k, t)| (k.clone(), t.iter().collect())).collect(),
            exhaustion: self.exhaustion.clone(),
            targets: self.targets.clone(),
            horizons: self.horizon.as_ref().map(|h| {
                h.levels()
                    .iter()
                    .map(|l| {
                        let (points, basis, bornology, group) = space_doc(&l.instance, &l.group);
                        LevelDoc {
                            points,
                            basis: Some(basis),
                            bornology: Some(bornology),
                            group: Some(group),
                            embed_next: l.embed_next.clone(),
                        }
                    })
                    .collect()
            }),
        }
    }
}

fn space_doc(s: &SpaceInstance, g: &GroupAction) -> (PointsDoc, Vec<PointSet>, BornologyDoc, GroupDoc) {
    let points = match s.labels() {
        Some(l) => PointsDoc::Labels(l.to_vec()),
        None => PointsDoc::Count(s.n()),
    };
    let born = s.bornology();
    let bornology = if born.full {
        BornologyDoc::Named("full".into())
    } else {
        BornologyDoc::Generated { generators: born.generators.clone(), frontier: s.frontier() }
    };
    let group = GroupDoc { generators: g.generators().iter().map(|p| GeneratorDoc::Images(p.images())).collect() };
    (points, s.basis().to_vec(), bornology, group)
}

/// 1-based line of the first occurrence of `"key"`, for diagnostics on
/// objects that parse but fail validation.
fn line_of(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map_or(1, |i| i + 1)
}

/// Syntax and schema errors come back as [`Error::Parse`] with the line and
/// the field path; semantic errors as [`Error::Validation`] naming the field.
pub fn parse_document(text: &str) -> Result<InstanceDocument> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: InstanceDocument = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse { line: inner.line(), field, message: inner.to_string() }
    })?;
    de.end().map_err(|e| Error::Parse { line: e.line(), field: ".".into(), message: e.to_string() })?;
    Ok(doc)
}

fn invalid(field: impl Into<String>, e: Error) -> Error {
    Error::Validation { field: field.into(), source: Box::new(e) }
}

fn build_space(
    prefix: &str,
    points: &PointsDoc,
    basis: Option<&Vec<PointSet>>,
    bornology: Option<&BornologyDoc>,
    group: Option<&GroupDoc>,
    cap: usize,
) -> Result<(SpaceInstance, GroupAction)> {
    let (n, labels) = match points {
        PointsDoc::Count(n) => (*n, None),
        PointsDoc::Labels(l) => (l.len(), Some(l.clone())),
    };
    let basis = basis.cloned().unwrap_or_else(|| (0..n).map(PointSet::singleton).collect());
    let (born, frontier) = match bornology {
        None => (Bornology::full(), PointSet::empty()),
        Some(BornologyDoc::Named(s)) if s == "full" => (Bornology::full(), PointSet::empty()),
        Some(BornologyDoc::Named(s)) => {
            return Err(invalid(
                format!("{prefix}bornology"),
                Error::Usage(format!("unknown bornology `{s}`; use \"full\" or {{\"generators\": ..}}")),
            ))
        }
        Some(BornologyDoc::Generated { generators, frontier }) => (Bornology::generated(generators.clone()), *frontier),
    };
    let mut space = SpaceInstance::new(n, basis, born).map_err(|e| invalid(format!("{prefix}basis"), e))?;
    if let Some(l) = labels {
        space = space.with_labels(l).map_err(|e| invalid(format!("{prefix}points"), e))?;
    }
    if !frontier.is_empty() {
        space = space.with_frontier(frontier).map_err(|e| invalid(format!("{prefix}bornology.frontier"), e))?;
    }
    let mut gens = Vec::new();
    for (i, g) in group.map(|g| g.generators.as_slice()).unwrap_or(&[]).iter().enumerate() {
        let images = match g {
            GeneratorDoc::Images(v) => v.clone(),
            GeneratorDoc::Pairs(pairs) => {
                let mut v: Vec<usize> = (0..n).collect();
                for &(a, b) in pairs {
                    if a >= n {
                        return Err(invalid(
                            format!("{prefix}group.generators[{i}]"),
                            Error::NotPermutation { generator: i, detail: format!("point {a} is outside 0..{n}") },
                        ));
                    }
                    v[a] = b;
                }
                v
            }
        };
        if images.len() != n {
            return Err(invalid(
                format!("{prefix}group.generators[{i}]"),
                Error::NotPermutation { generator: i, detail: format!("{} images for {n} points", images.len()) },
            ));
        }
        let p = Perm::from_images(&images)
            .map_err(|d| invalid(format!("{prefix}group.generators[{i}]"), Error::NotPermutation { generator: i, detail: d }))?;
        gens.push(p);
    }
    let group = enumerate_group(&space, gens, cap).map_err(|e| invalid(format!("{prefix}group"), e))?;
    Ok((space, group))
}

/// Parse and cross-validate a document; `cap` bounds group enumeration.
pub fn load(text: &str, cap: usize) -> Result<Instance> {
    let doc = parse_document(text)?;
    build(&doc, cap).map_err(|e| match e {
        Error::Validation { field, source } => {
            let key = field.split(['.', '[']).next().unwrap_or("");
            Error::Validation { field: format!("{field} (line {})", line_of(text, key)), source }
        }
        other => other,
    })
}

pub fn build(doc: &InstanceDocument, cap: usize) -> Result<Instance> {
    let horizon = match &doc.horizons {
        None => None,
        Some(levels) => {
            let mut out = Vec::with_capacity(levels.len());
            for (i, l) in levels.iter().enumerate() {
                let prefix = format!("horizons[{i}].");
                let (instance, group) =
                    build_space(&prefix, &l.points, l.basis.as_ref(), l.bornology.as_ref(), l.group.as_ref(), cap)?;
                out.push(HorizonLevel { instance, group, embed_next: l.embed_next.clone() });
            }
            Some(HorizonFamily::new(out).map_err(|e| invalid("horizons", e))?)
        }
    };
    let (space, group) = match (&doc.points, &horizon) {
        (Some(p), _) => build_space("", p, doc.basis.as_ref(), doc.bornology.as_ref(), doc.group.as_ref(), cap)?,
        (None, Some(h)) => {
            if doc.basis.is_some() || doc.bornology.is_some() || doc.group.is_some() {
                return Err(invalid("points", Error::Usage("a space without `points`".into())));
            }
            let top = h.levels().last().expect("nonempty family");
            (top.instance.clone(), top.group.clone())
        }
        (None, None) => return Err(invalid("points", Error::Usage("`points` is required".into()))),
    };
    let n = space.n();
    let mut inst = Instance::bare(space, group);
    inst.horizon = horizon;
    for (name, sets) in &doc.covers {
        let c = Cover::open_cover(&inst.space, sets.iter().copied()).map_err(|e| invalid(format!("covers.{name}"), e))?;
        inst.covers.push((name.clone(), c));
    }
    for (name, levels) in &doc.developments {
        let covers = levels.iter().map(|l| Cover::new(l.iter().copied())).collect();
        let d = Development::new(&inst.space, covers).map_err(|e| invalid(format!("developments.{name}"), e))?;
        inst.developments.push((name.clone(), d));
    }
    for (name, rows) in &doc.gauges {
        let g = ExtGauge::from_rows(rows.clone()).map_err(|e| invalid(format!("gauges.{name}"), e))?;
        if g.n() != n {
            return Err(invalid(
                format!("gauges.{name}"),
                Error::SizeMismatch(format!("{}-point matrix on a {n}-point space", g.n())),
            ));
        }
        inst.gauges.push((name.clone(), g));
    }
    for (name, triples) in &doc.tunnels {
        if let Some(&(a, b, _)) = triples.iter().find(|&&(a, b, _)| a >= n || b >= n) {
            return Err(invalid(
                format!("tunnels.{name}"),
                Error::SizeMismatch(format!("tunnel {{{a}, {b}}} leaves the {n}-point space")),
            ));
        }
        let t = TunnelSystem::new(triples.iter().copied()).map_err(|e| invalid(format!("tunnels.{name}"), e))?;
        if inst.gauge_for_tunnels(name).is_none() {
            return Err(invalid(
                format!("tunnels.{name}"),
                Error::Usage(format!("no gauge named `{name}` and more than one (or no) gauge to choose from")),
            ));
        }
        inst.tunnels.push((name.clone(), t));
    }
    if let Some(t) = &doc.targets {
        for (i, &(x, u)) in t.iter().enumerate() {
            if x >= n || !u.contains(x) || !inst.space.is_open(u) {
                return Err(invalid(
                    format!("targets[{i}]"),
                    Error::Usage(format!("target ({x}, {u}) needs an open set containing the point")),
                ));
            }
        }
    }
    inst.targets = doc.targets.clone();
    inst.exhaustion = doc.exhaustion.clone();
    Ok(inst)
}
