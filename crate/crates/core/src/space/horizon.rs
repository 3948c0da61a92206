use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::{GroupAction, SpaceInstance};

/// One window of a horizon family.
#[derive(Clone, Debug)]
pub struct HorizonLevel {
    pub instance: SpaceInstance,
    pub group: GroupAction,
    /// Inclusion of this window's points into the next window; absent on the
    /// last level.
    pub embed_next: Option<Vec<usize>>,
}

/// Growing finite windows of an infinite space, each with its own frontier.
/// Predicates are evaluated per window and compared across windows.
#[derive(Clone, Debug)]
pub struct HorizonFamily {
    levels: Vec<HorizonLevel>,
}

impl HorizonFamily {
    /// Checks that every inclusion is injective, lands in range, and carries
    /// minimal neighbourhoods of non-frontier points onto minimal
    /// neighbourhoods.
    pub fn new(levels: Vec<HorizonLevel>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Reject {
                rule: "horizon levels",
                detail: "a horizon family needs at least one level".into(),
            });
        }
        for (m, pair) in levels.windows(2).enumerate() {
            let (cur, next) = (&pair[0], &pair[1]);
            let embed = cur.embed_next.as_ref().ok_or_else(|| Error::Reject {
                rule: "horizon inclusion",
                detail: format!("level {m} has no inclusion into level {}", m + 1),
            })?;
            if embed.len() != cur.instance.n() {
                return Err(Error::SizeMismatch(format!(
                    "inclusion at level {m} maps {} points, window has {}",
                    embed.len(),
                    cur.instance.n()
                )));
            }
            let mut seen = PointSet::empty();
            for (x, &y) in embed.iter().enumerate() {
                if y >= next.instance.n() || seen.contains(y) {
                    return Err(Error::Reject {
                        rule: "horizon inclusion",
                        detail: format!("level {m}: point {x} maps to {y}, not injective into 0..{}", next.instance.n()),
                    });
                }
                seen.insert(y);
            }
            let image = |a: PointSet| -> PointSet { a.iter().map(|x| embed[x]).collect() };
            for x in cur.instance.points().difference(cur.instance.frontier()).iter() {
                if image(cur.instance.min_nbhd(x)) != next.instance.min_nbhd(embed[x]) {
                    return Err(Error::Reject {
                        rule: "horizon inclusion",
                        detail: format!("level {m}: point {x} does not keep its minimal neighbourhood"),
                    });
                }
            }
        }
        Ok(HorizonFamily { levels })
    }

    pub fn levels(&self) -> &[HorizonLevel] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Carry a set from level `from` up to level `to` through the inclusions.
    pub fn push_forward(&self, a: PointSet, from: usize, to: usize) -> PointSet {
        let mut s = a;
        for level in &self.levels[from..to] {
            let embed = level.embed_next.as_ref().expect("validated inclusion");
            s = s.iter().map(|x| embed[x]).collect();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(n: usize) -> HorizonLevel {
        let inst = SpaceInstance::discrete(n)
            .with_frontier([0, n - 1].iter().collect())
            .unwrap();
        HorizonLevel {
            instance: inst,
            group: GroupAction::trivial(n),
            embed_next: Some((1..=n).collect()),
        }
    }

    #[test]
    fn centered_windows_validate() {
        let mut last = window(7);
        last.embed_next = None;
        let fam = HorizonFamily::new(vec![window(3), window(5), last]).unwrap();
        assert_eq!(fam.push_forward(PointSet::singleton(0), 0, 2), PointSet::singleton(2));
    }

    #[test]
    fn non_injective_inclusion_rejected() {
        let mut a = window(3);
        a.embed_next = Some(vec![0, 0, 1]);
        let mut b = window(5);
        b.embed_next = None;
        assert!(HorizonFamily::new(vec![a, b]).is_err());
    }
}
