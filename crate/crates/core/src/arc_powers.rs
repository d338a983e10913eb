//! When one Karpelevič arc is a power of another.
//!
//! `K_n(q,s) = K_n(q̂,ŝ)^c` holds exactly in two situations:
//! the source is `K_n(cq, s)` with `c | d`, `gcd(c, s) = 1`, `cq < s`;
//! or the source is `K_n(s, qd)`, `c = d ≥ 2` and `gcd(d, s) = 1`.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::boundary::{point_on_arc, sample_arc, Angle};
use crate::error::{Error, Result};
use crate::farey::{arc_params, star, ArcId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SourceShape {
    /// Source `K_n(cq, s)`.
    ScaledQ,
    /// Source `K_n(s, qd)` with `c = d`.
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PowerRelation {
    pub target: ArcId,
    pub source: ArcId,
    pub c: i64,
    pub shape: SourceShape,
    /// Shift `a` of the star operation, `θ = cθ̂ - 2πa`.
    pub shift: i64,
}

impl PowerRelation {
    /// Checks that `target = source^c` is one of the enumerated relations.
    pub fn new(target: ArcId, source: ArcId, c: i64) -> Result<Self> {
        power_sources(target)
            .into_iter()
            .find(|r| r.source == source && r.c == c)
            .ok_or_else(|| {
                Error::NoPowerRelation(format!("{target} is not {source} to the power {c}"))
            })
    }
}

fn relation(target: ArcId, source: ArcId, c: i64, shape: SourceShape) -> PowerRelation {
    let image = star(source, c)
        .ok()
        .flatten()
        .expect("every arc-power relation has a defined star operation");
    debug_assert_eq!(image.target, target);
    PowerRelation {
        target,
        source,
        c,
        shape,
        shift: image.shift,
    }
}

/// Every `(source, c)` with `target = source^c` and `c ≥ 2`.
pub fn power_sources(target: ArcId) -> Vec<PowerRelation> {
    let (n, q, s) = (target.n(), target.q(), target.s());
    let params = arc_params(target);
    let d = params.d;
    let mut out = Vec::new();
    for c in 2..=d {
        if d % c == 0 && num_integer::gcd(c, s) == 1 && c * q < s {
            if let Ok(source) = ArcId::new(n, c * q, s) {
                out.push(relation(target, source, c, SourceShape::ScaledQ));
            }
        }
    }
    if params.delta == 1 && d >= 2 {
        if let Ok(source) = ArcId::new(n, s, q * d) {
            // With c = d the first shape can name the same source.
            if !out.iter().any(|r| r.source == source && r.c == d) {
                out.push(relation(target, source, d, SourceShape::Swapped));
            }
        }
    }
    out
}

/// Every `(target, c)` with `target = source^c` and `c ≥ 2`.
pub fn power_targets(source: ArcId) -> Vec<PowerRelation> {
    let (n, q_hat, s_hat) = (source.n(), source.q(), source.s());
    let mut out = Vec::new();
    for c in 2..=s_hat {
        if q_hat % c == 0 {
            if let Ok(target) = ArcId::new(n, q_hat / c, s_hat) {
                let d = n / target.q();
                if target.q() == q_hat / c
                    && d % c == 0
                    && num_integer::gcd(c, s_hat) == 1
                {
                    out.push(relation(target, source, c, SourceShape::ScaledQ));
                }
            }
        }
        if s_hat % c == 0 {
            let q = s_hat / c;
            if let Ok(target) = ArcId::new(n, q, q_hat) {
                let d = n / q;
                if target.q() == q && d == c && num_integer::gcd(c, q_hat) == 1 {
                    out.push(relation(target, source, c, SourceShape::Swapped));
                }
            }
        }
    }
    out.sort_by_key(|r| (r.c, r.target));
    out.dedup_by_key(|r| (r.c, r.target));
    out
}

/// Every relation among arcs of order `n`, sorted by target then exponent.
pub fn all_relations(n: i64) -> Result<Vec<PowerRelation>> {
    let mut out: Vec<PowerRelation> = crate::farey::arcs_of_order(n)?
        .into_iter()
        .flat_map(power_sources)
        .collect();
    out.sort_by_key(|r| (r.target, r.c, r.source));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerCheck {
    pub source: ArcId,
    pub target: ArcId,
    pub c: i64,
    pub samples: usize,
    pub max_deviation: f64,
    /// Deviation at the first sample, an exact endpoint.
    pub endpoint_deviation: f64,
}

impl PowerCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_deviation < tol
    }
}

/// Raises sampled points of `source` to the power `c` and measures how far
/// they land from the boundary over the star image of `source`.
///
/// Works for any star-defined pair, including ones that are not arc powers.
pub fn verify_star_numeric(source: ArcId, c: i64, samples: usize) -> Result<PowerCheck> {
    let image = star(source, c)?.ok_or(Error::StarUndefined { c })?;
    let target = image.target;
    let points = sample_arc(source, samples)?;
    let (primary, _) = source.pairs();
    let mut max_dev: f64 = 0.0;
    let mut endpoint_dev = 0.0;
    for (i, p) in points.iter().enumerate() {
        let end = if i == 0 {
            Some(primary.left)
        } else if i + 1 == points.len() {
            Some(primary.right)
        } else {
            None
        };
        let theta = match end {
            Some(f) => {
                let (whole, frac) = f.scaled_split(c)?;
                // The right end of the image can land on 1/1 after a full turn.
                let frac = if whole > image.shift && frac.num() == 0 {
                    crate::farey::Fraction::ONE
                } else {
                    frac
                };
                Angle::PiMultiple(2 * frac.num(), frac.den())
            }
            None => Angle::Radians(c as f64 * p.theta - TAU * image.shift as f64),
        };
        let expected = point_on_arc(target, theta)?.rho;
        let dev = (expected - p.rho.powi(c as i32)).abs();
        if i == 0 {
            endpoint_dev = dev;
        }
        max_dev = max_dev.max(dev);
    }
    Ok(PowerCheck {
        source,
        target,
        c,
        samples,
        max_deviation: max_dev,
        endpoint_deviation: endpoint_dev,
    })
}

/// Numeric witness of a relation; see [`verify_star_numeric`].
pub fn verify_power_numeric(rel: &PowerRelation, samples: usize) -> Result<PowerCheck> {
    verify_star_numeric(rel.source, rel.c, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(n: i64, q: i64, s: i64) -> ArcId {
        ArcId::new(n, q, s).unwrap()
    }

    fn census(n: i64) -> Vec<(i64, i64, i64, i64, i64)> {
        all_relations(n)
            .unwrap()
            .into_iter()
            .map(|r| (r.target.q(), r.target.s(), r.source.q(), r.source.s(), r.c))
            .collect()
    }

    #[test]
    fn order_eight_census() {
        let mut want = vec![
            (2, 7, 4, 7, 2),
            (2, 7, 7, 8, 4),
            (3, 7, 6, 7, 2),
            (4, 5, 5, 8, 2),
            (4, 7, 7, 8, 2),
        ];
        want.sort();
        let mut got = census(8);
        got.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn order_337_sources() {
        let rels = power_sources(arc(337, 27, 337));
        let found: Vec<(i64, i64)> = rels.iter().map(|r| (r.source.q(), r.c)).collect();
        for want in [(324, 12), (81, 3), (108, 4)] {
            assert!(found.contains(&want), "{want:?} missing from {found:?}");
        }
        // c ranges over the divisors of d = 12 above 1
        assert_eq!(found, vec![(54, 2), (81, 3), (108, 4), (162, 6), (324, 12)]);
    }

    #[test]
    fn type_zero_has_no_sources() {
        for n in 1..=30 {
            if let Ok(a) = ArcId::new(n, 1, n) {
                assert!(power_sources(a).is_empty(), "n = {n}");
            }
        }
    }

    #[test]
    fn targets_of_order_eight() {
        let t: Vec<(i64, i64, i64)> = power_targets(arc(8, 7, 8))
            .iter()
            .map(|r| (r.target.q(), r.target.s(), r.c))
            .collect();
        assert_eq!(t, vec![(4, 7, 2), (2, 7, 4)]);
    }

    #[test]
    fn false_relation_is_rejected() {
        assert!(PowerRelation::new(arc(27, 2, 27), arc(27, 4, 27), 2).is_err());
        assert!(power_targets(arc(27, 4, 27)).iter().all(|r| r.c != 2));
        // the star operation itself is still defined there
        assert_eq!(star(arc(27, 4, 27), 2).unwrap().unwrap().target, arc(27, 2, 27));
        // Both arcs hug the unit circle (ρ > 0.996), so the gap is small but clear.
        let bad = verify_star_numeric(arc(27, 4, 27), 2, 50).unwrap();
        assert!(bad.max_deviation > 1e-4, "{bad:?}");
        assert!(bad.max_deviation > 1e3 * verify_star_numeric(arc(8, 7, 8), 2, 50).unwrap().max_deviation);
    }

    #[test]
    fn corollary_bound_admits_a_false_relation() {
        // |ŝ - q̂ d̂| = 1 < q̂/c = 2 for K_10(4,9) with c = 2, yet d(2,9) = 5 is odd.
        assert!(power_targets(arc(10, 4, 9)).iter().all(|r| r.c != 2));
        let check = verify_star_numeric(arc(10, 4, 9), 2, 50).unwrap();
        assert!(check.max_deviation > 1e-3, "{check:?}");
    }

    #[test]
    fn true_relation_numerically() {
        let rel = PowerRelation::new(arc(8, 4, 7), arc(8, 7, 8), 2).unwrap();
        let check = verify_power_numeric(&rel, 50).unwrap();
        assert!(check.passed(1e-8), "{check:?}");
        assert!(check.endpoint_deviation < 1e-12);
    }
}
