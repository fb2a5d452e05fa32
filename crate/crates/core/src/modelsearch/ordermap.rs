use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::semantics::Structure;
use crate::truthval::{Rational, TruthValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderMapError {
    #[error("not strictly order-preserving: {}->{} and {}->{}", .0.0, .0.1, .1.0, .1.1)]
    NotOrderPreserving((TruthValue, TruthValue), (TruthValue, TruthValue)),
    #[error("{}->{} is incompatible with the fixed point hat({anchor})", .pair.0, .pair.1)]
    AnchorConflict {
        anchor: Rational,
        pair: (TruthValue, TruthValue),
    },
    #[error("rational {0} lies outside [0,1]")]
    AnchorOutOfRange(Rational),
    #[error("value {0} is outside the domain of the map")]
    DomainNotClosed(TruthValue),
}

/// A finite strictly increasing partial map on truth values that fixes
/// `hat(r)` for each anchor `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderMap {
    points: BTreeMap<TruthValue, TruthValue>,
    anchors: Vec<Rational>,
}

impl OrderMap {
    pub fn get(&self, v: TruthValue) -> Option<TruthValue> {
        self.points.get(&v).copied()
    }

    pub fn anchors(&self) -> &[Rational] {
        &self.anchors
    }

    pub fn pairs(&self) -> impl Iterator<Item = (TruthValue, TruthValue)> + '_ {
        self.points.iter().map(|(a, b)| (*a, *b))
    }

    pub fn is_identity(&self) -> bool {
        self.points.iter().all(|(a, b)| a == b)
    }

    /// Whether every domain point keeps its first coordinate, the truth
    /// degree.
    pub fn preserves_degrees(&self) -> bool {
        self.points.iter().all(|(a, b)| a.first() == b.first())
    }

    /// Adds `values` to the domain. Values between two adjacent domain
    /// points are sent to evenly spaced points strictly between the two
    /// images: along the second coordinate when both images share a first
    /// coordinate, otherwise along the first coordinate with the second kept.
    /// Values beyond the extremes of the domain are sent to themselves when
    /// that keeps the map increasing, else to evenly spaced points towards the
    /// bound of `I`. Values with no room left, such as those above a point
    /// sent to `(1,1)`, are not added.
    pub fn extend(&self, values: &[TruthValue]) -> OrderMap {
        let mut fresh: Vec<TruthValue> = values
            .iter()
            .copied()
            .filter(|v| !self.points.contains_key(v))
            .collect();
        fresh.sort();
        fresh.dedup();
        let mut out = self.clone();
        let mut i = 0;
        while i < fresh.len() {
            let v = fresh[i];
            let lo = self.points.range(..v).next_back().map(|(a, b)| (*a, *b));
            let hi = self.points.range(v..).next().map(|(a, b)| (*a, *b));
            let gap: Vec<TruthValue> = fresh[i..]
                .iter()
                .copied()
                .take_while(|w| hi.is_none_or(|(h, _)| *w < h))
                .collect();
            let images = fill_gap(lo, hi, &gap);
            for (w, img) in gap.iter().zip(images) {
                out.points.insert(*w, img);
            }
            i += gap.len();
        }
        out
    }
}

impl fmt::Display for OrderMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.points.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn spaced(a: Rational, b: Rational, i: usize, k: usize) -> Rational {
    let t = Rational::new(i as i64, k as i64 + 1);
    a + (b - a) * t
}

/// `k` strictly increasing images strictly between the neighbours' images.
fn fill_gap(lo: Option<(TruthValue, TruthValue)>, hi: Option<(TruthValue, TruthValue)>, gap: &[TruthValue]) -> Vec<TruthValue> {
    let k = gap.len();
    let lower = lo.map_or(TruthValue::ZERO, |(_, img)| img);
    let upper = hi.map_or(TruthValue::ONE, |(_, img)| img);
    let identity_fits = gap
        .iter()
        .all(|w| lo.is_none_or(|(_, l)| l < *w) && hi.is_none_or(|(_, h)| *w < h));
    if identity_fits {
        return gap.to_vec();
    }
    if lower.first() == upper.first() && (lower.second() == upper.second() || lower.first().is_zero()) {
        return Vec::new();
    }
    (1..=k)
        .map(|i| {
            if lower.first() == upper.first() {
                let y = spaced(lower.second(), upper.second(), i, k);
                TruthValue::new(lower.first(), y).expect("between two points of one block")
            } else {
                let x = spaced(lower.first(), upper.first(), i, k);
                TruthValue::new(x, Rational::new(1, 2)).expect("first coordinate positive")
            }
        })
        .collect()
}

/// Validates `pattern` together with the anchor fixed points and returns the
/// resulting map.
pub fn construct_order_map(
    pattern: &[(TruthValue, TruthValue)],
    anchors: &[Rational],
) -> Result<OrderMap, OrderMapError> {
    let mut points: BTreeMap<TruthValue, (TruthValue, Option<Rational>)> = BTreeMap::new();
    for &r in anchors {
        let h = TruthValue::hat(r).map_err(|_| OrderMapError::AnchorOutOfRange(r))?;
        points.insert(h, (h, Some(r)));
    }
    for &(from, to) in pattern {
        match points.get(&from) {
            Some(&(img, Some(r))) if img != to => {
                return Err(OrderMapError::AnchorConflict { anchor: r, pair: (from, to) })
            }
            Some(&(img, None)) if img != to => {
                return Err(OrderMapError::NotOrderPreserving((from, img), (from, to)))
            }
            Some(_) => {}
            None => {
                points.insert(from, (to, None));
            }
        }
    }
    let entries: Vec<_> = points.iter().map(|(a, (b, r))| (*a, *b, *r)).collect();
    for (i, &(a, fa, ra)) in entries.iter().enumerate() {
        for &(b, fb, rb) in &entries[i + 1..] {
            if fa >= fb {
                return Err(match (ra, rb) {
                    (Some(r), None) => OrderMapError::AnchorConflict { anchor: r, pair: (b, fb) },
                    (None, Some(r)) => OrderMapError::AnchorConflict { anchor: r, pair: (a, fa) },
                    _ => OrderMapError::NotOrderPreserving((a, fa), (b, fb)),
                });
            }
        }
    }
    let mut anchors = anchors.to_vec();
    anchors.sort();
    anchors.dedup();
    Ok(OrderMap {
        points: points.into_iter().map(|(a, (b, _))| (a, b)).collect(),
        anchors,
    })
}

/// Every value a formula over `m` with constants from `pool` can take:
/// the atomic values, `(0,0)` and `hat(r)` for the pool. The connectives
/// and quantifiers only ever return one of their inputs or `(0,0)`.
pub fn value_closure(m: &Structure, pool: &[Rational]) -> Vec<TruthValue> {
    let mut vals = m.atomic_values();
    vals.push(TruthValue::ZERO);
    vals.extend(pool.iter().filter_map(|&r| TruthValue::hat(r).ok()));
    vals.sort();
    vals.dedup();
    vals
}

/// `m` with every predicate value `v` replaced by `h(v)`. Functions and
/// constants are untouched. The domain of `h` must contain `(0,0)` and all
/// atomic values.
pub fn h_remap(m: &Structure, h: &OrderMap) -> Result<Structure, OrderMapError> {
    for v in value_closure(m, &[]) {
        if h.get(v).is_none() {
            return Err(OrderMapError::DomainNotClosed(v));
        }
    }
    Ok(m.map_predicates(|v| h.get(v).expect("checked")))
}
