//! Farey fractions, Farey pairs, arc labels and the star operation.
//!
//! All arithmetic is exact on `i64` values with `i128` intermediates; any
//! product that would leave the `i64` range is reported as
//! [`Error::Overflow`] instead of wrapping.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

/// `⟨k⟩_n = 1 + ((k - 1) mod n)`, always in `1..=n`.
pub fn mod_index(k: i64, n: i64) -> i64 {
    assert!(n >= 1, "mod_index needs a positive modulus");
    1 + (k - 1).rem_euclid(n)
}

fn narrow(value: i128, what: &'static str) -> Result<i64> {
    i64::try_from(value).map_err(|_| Error::Overflow(what))
}

fn mul(a: i64, b: i64, what: &'static str) -> Result<i64> {
    narrow(a as i128 * b as i128, what)
}

/// A reduced fraction `num/den` in `[0, 1]`.
///
/// Members of the Farey set satisfy `num < den`. The single value `1/1` is
/// also representable because it closes the last gap of the circle: the
/// conjugate Farey pair of `K_n(1, n)` is `((n-1)/n, 1/1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Fraction {
    num: i64,
    den: i64,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den < 1 || num < 0 || num > den {
            return Err(Error::InvalidFraction { num, den });
        }
        let g = num.gcd(&den);
        Ok(Fraction {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    /// True for `1/1`, the closing endpoint that is not itself in `F_n`.
    pub fn is_one(self) -> bool {
        self.num == self.den
    }

    /// Whether the fraction belongs to the Farey set of order `n`.
    pub fn in_farey_set(self, n: i64) -> bool {
        self.num < self.den && self.den <= n
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Fractional part of `c * self`, together with the integer part.
    pub fn scaled_split(self, c: i64) -> Result<(i64, Fraction)> {
        let scaled = mul(self.num, c, "c * numerator")?;
        let (whole, rem) = scaled.div_mod_floor(&self.den);
        Ok((whole, Fraction::new(rem, self.den)?))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// All Farey fractions of order `n` in increasing order, starting at `0/1`.
///
/// Uses the next-term recurrence: if `a/b < c/d` are neighbours then the
/// following term is `(k c - a)/(k d - b)` with `k = ⌊(n + b)/d⌋`.
pub fn farey_sequence(n: i64) -> Result<Vec<Fraction>> {
    if n < 1 {
        return Err(Error::OrderTooSmall { n, min: 1 });
    }
    let mut out = vec![Fraction::ZERO];
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, n);
    while c < d {
        out.push(Fraction { num: c, den: d });
        let k = n.checked_add(b).ok_or(Error::Overflow("farey recurrence"))? / d;
        let next_c = mul(k, c, "farey recurrence")?
            .checked_sub(a)
            .ok_or(Error::Overflow("farey recurrence"))?;
        let next_d = mul(k, d, "farey recurrence")?
            .checked_sub(b)
            .ok_or(Error::Overflow("farey recurrence"))?;
        (a, b, c, d) = (c, d, next_c, next_d);
    }
    Ok(out)
}

/// The Farey-pair criterion: `a < b` are neighbours in `F_n`.
///
/// `b` may be `1/1`, which closes the gap after `(n-1)/n`.
pub fn is_farey_pair(a: Fraction, b: Fraction, n: i64) -> bool {
    if n < 1 || a >= b || !a.in_farey_set(n) {
        return false;
    }
    if !(b.in_farey_set(n) || b.is_one()) {
        return false;
    }
    let det = b.num as i128 * a.den as i128 - a.num as i128 * b.den as i128;
    det == 1 && a.den + b.den > n
}

/// A Farey pair `(left, right)` of a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FareyPair {
    pub left: Fraction,
    pub right: Fraction,
    pub order_n: i64,
}

impl FareyPair {
    pub fn new(left: Fraction, right: Fraction, order_n: i64) -> Result<Self> {
        if !is_farey_pair(left, right, order_n) {
            return Err(Error::Precondition(format!(
                "({left}, {right}) is not a Farey pair of order {order_n}"
            )));
        }
        Ok(FareyPair {
            left,
            right,
            order_n,
        })
    }

    /// The arc whose argument set contains this gap, if the denominators differ.
    pub fn arc(&self) -> Option<ArcId> {
        ArcId::new(self.order_n, self.left.den, self.right.den).ok()
    }
}

impl fmt::Display for FareyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.left, self.right)
    }
}

/// Label of the Karpelevič arc `K_n(q, s)` with `q < s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ArcId {
    n: i64,
    q: i64,
    s: i64,
}

impl ArcId {
    /// Builds the arc from an unordered pair of denominators.
    pub fn new(n: i64, a: i64, b: i64) -> Result<Self> {
        let invalid = |reason| Error::InvalidArc { n, a, b, reason };
        let (q, s) = if a <= b { (a, b) } else { (b, a) };
        if q < 1 {
            return Err(invalid("denominators must be positive"));
        }
        if q == s {
            return Err(invalid("denominators must differ"));
        }
        if s > n {
            return Err(invalid("denominator exceeds the order"));
        }
        if q.gcd(&s) != 1 {
            return Err(invalid("denominators are not coprime"));
        }
        if q + s <= n {
            return Err(invalid("denominators sum to at most n"));
        }
        Ok(ArcId { n, q, s })
    }

    pub fn n(self) -> i64 {
        self.n
    }

    pub fn q(self) -> i64 {
        self.q
    }

    pub fn s(self) -> i64 {
        self.s
    }

    pub fn params(self) -> ArcParams {
        arc_params(self)
    }

    pub fn pairs(self) -> (FareyPair, FareyPair) {
        farey_pairs_for(self)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K_{}({},{})", self.n, self.q, self.s)
    }
}

/// Every arc of order `n`, sorted by `(q, s)`.
pub fn arcs_of_order(n: i64) -> Result<Vec<ArcId>> {
    let mut arcs = Vec::new();
    for s in 2..=n {
        for q in (n - s + 1).max(1)..s {
            if let Ok(arc) = ArcId::new(n, q, s) {
                arcs.push(arc);
            }
        }
    }
    arcs.sort();
    Ok(arcs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ArcType {
    Type0,
    TypeI,
    TypeII,
    TypeIII,
    Unsupported,
}

impl ArcType {
    pub fn name(self) -> &'static str {
        match self {
            ArcType::Type0 => "Type 0",
            ArcType::TypeI => "Type I",
            ArcType::TypeII => "Type II",
            ArcType::TypeIII => "Type III",
            ArcType::Unsupported => "unsupported",
        }
    }
}

/// Derived quantities of an arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArcParams {
    pub p: i64,
    pub r: i64,
    pub d: i64,
    pub delta: i64,
    pub d1: i64,
    pub s1: i64,
    pub arc_type: ArcType,
    /// `z = q d - s` for Type II, `y = s - q d` for Type III, zero otherwise.
    pub excess: i64,
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let ext = (a as i128).extended_gcd(&(m as i128));
    if ext.gcd != 1 {
        return None;
    }
    Some(ext.x.rem_euclid(m as i128) as i64)
}

/// The numerators `(p, r)` of the pair `(p/q, r/s)` with `q r - p s = 1`.
fn pair_numerators(q: i64, s: i64) -> (i64, i64) {
    let r = mod_inverse(q, s).expect("arc denominators are coprime");
    let p = ((q as i128 * r as i128 - 1) / s as i128) as i64;
    (p, r)
}

/// The two Farey pairs `(p/q, r/s)` and `((s-r)/s, (q-p)/q)` of an arc.
pub fn farey_pairs_for(arc: ArcId) -> (FareyPair, FareyPair) {
    let ArcId { n, q, s } = arc;
    let (p, r) = pair_numerators(q, s);
    let primary = FareyPair {
        left: Fraction { num: p, den: q },
        right: Fraction { num: r, den: s },
        order_n: n,
    };
    let conj = FareyPair {
        left: Fraction { num: s - r, den: s },
        right: Fraction { num: q - p, den: q },
        order_n: n,
    };
    (primary, conj)
}

pub fn arc_params(arc: ArcId) -> ArcParams {
    let ArcId { n, q, s } = arc;
    let (p, r) = pair_numerators(q, s);
    let d = n / q;
    let delta = d.gcd(&s);
    let (arc_type, excess) = if q == 1 {
        (ArcType::Type0, 0)
    } else if s == n && d == 1 {
        (ArcType::TypeI, 0)
    } else if s == n {
        (ArcType::TypeIII, s - q * d)
    } else if n == q * d {
        (ArcType::TypeII, q * d - s)
    } else {
        (ArcType::Unsupported, 0)
    };
    ArcParams {
        p,
        r,
        d,
        delta,
        d1: d / delta,
        s1: s / delta,
        arc_type,
        excess,
    }
}

/// Result of a defined star operation `F_n(q̂, ŝ) ★ c = F_n(q, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StarImage {
    pub target: ArcId,
    /// `a = ⌊p̂ c / q̂⌋ = ⌊r̂ c / ŝ⌋`.
    pub shift: i64,
}

/// Maps both Farey pairs of `source` through `x ↦ frac(c x)`.
///
/// Defined when each image pair keeps its endpoints in one turn (equal integer
/// parts) and the two image pairs are exactly the Farey pairs of some arc of
/// the same order.
pub fn star(source: ArcId, c: i64) -> Result<Option<StarImage>> {
    if c < 1 {
        return Err(Error::Precondition(format!("star exponent must be positive, got {c}")));
    }
    let (primary, conj) = farey_pairs_for(source);
    let mut images = Vec::with_capacity(2);
    let mut shift = 0;
    for (k, pair) in [primary, conj].into_iter().enumerate() {
        let (lo_whole, lo) = pair.left.scaled_split(c)?;
        let (hi_whole, hi) = pair.right.scaled_split(c)?;
        if lo_whole != hi_whole {
            return Ok(None);
        }
        if k == 0 {
            shift = lo_whole;
        }
        images.push((lo, hi));
    }
    let Ok(target) = ArcId::new(source.n, images[0].0.den, images[0].1.den) else {
        return Ok(None);
    };
    let (t_primary, t_conj) = farey_pairs_for(target);
    let wanted = [(t_primary.left, t_primary.right), (t_conj.left, t_conj.right)];
    let same = (images[0] == wanted[0] && images[1] == wanted[1])
        || (images[0] == wanted[1] && images[1] == wanted[0]);
    Ok(same.then_some(StarImage { target, shift }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndpointCase {
    /// `c | q̂`: `ŝ = s`, `q̂ = c q`, `p̂ = p + a q`, `c r̂ = r + a s`.
    DividesQHat,
    /// `c | ŝ`: `q̂ = s`, `ŝ = c q`, `p̂ c = s - r + a s`, `r̂ = q - p + a q`.
    DividesSHat,
}

/// How arguments on the source arc relate to arguments on the target arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EndpointMap {
    pub source: ArcId,
    pub target: ArcId,
    pub c: i64,
    pub shift: i64,
    pub case: EndpointCase,
}

impl EndpointMap {
    /// `θ̂ = (θ + 2πa)/c`, where `θ` lies on the target's primary interval in
    /// the first case and on its conjugate interval in the second.
    pub fn source_angle(&self, target_theta: f64) -> f64 {
        (target_theta + std::f64::consts::TAU * self.shift as f64) / self.c as f64
    }

    /// Inverse of [`EndpointMap::source_angle`].
    pub fn target_angle(&self, source_theta: f64) -> f64 {
        source_theta * self.c as f64 - std::f64::consts::TAU * self.shift as f64
    }

    /// Whether the source primary interval lands on the target conjugate interval.
    pub fn lands_on_conjugate(&self) -> bool {
        self.case == EndpointCase::DividesSHat
    }
}

/// Classifies a defined star operation and checks the endpoint relations exactly.
pub fn endpoint_map(source: ArcId, c: i64) -> Result<EndpointMap> {
    let image = star(source, c)?.ok_or(Error::StarUndefined { c })?;
    let target = image.target;
    let a = image.shift;
    let sp = arc_params(source);
    let tp = arc_params(target);
    let (q_hat, s_hat, p_hat, r_hat) = (source.q, source.s, sp.p, sp.r);
    let (q, s, p, r) = (target.q, target.s, tp.p, tp.r);
    let case = if q_hat % c == 0 {
        let holds = s_hat == s
            && q_hat == mul(c, q, "endpoint relation")?
            && p_hat == p + mul(a, q, "endpoint relation")?
            && mul(c, r_hat, "endpoint relation")? == r + mul(a, s, "endpoint relation")?;
        if !holds {
            return Err(Error::Structure(format!(
                "endpoint relations for c | q̂ fail for {source} ★ {c}"
            )));
        }
        EndpointCase::DividesQHat
    } else if s_hat % c == 0 {
        let holds = q_hat == s
            && s_hat == mul(c, q, "endpoint relation")?
            && mul(p_hat, c, "endpoint relation")? == s - r + mul(a, s, "endpoint relation")?
            && r_hat == q - p + mul(a, q, "endpoint relation")?;
        if !holds {
            return Err(Error::Structure(format!(
                "endpoint relations for c | ŝ fail for {source} ★ {c}"
            )));
        }
        EndpointCase::DividesSHat
    } else {
        return Err(Error::Structure(format!(
            "{source} ★ {c} is defined but c divides neither denominator"
        )));
    };
    Ok(EndpointMap {
        source,
        target,
        c,
        shift: a,
        case,
    })
}
