//! Points of the boundary of the Karpelevič region.
//!
//! On the argument interval of an arc the boundary radius is `μ^{d1}`, where
//! `μ` is the unique positive root of a three-term trigonometric equation in
//! `θ`. That root is isolated by a sign scan and refined by bisection.

use std::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::farey::{arc_params, farey_pairs_for, farey_sequence, ArcId, ArcType, Fraction};
use crate::poly::Poly;

const MU_LO: f64 = 1e-12;
const MU_HI: f64 = 2.0;
const RESIDUAL_TOL: f64 = 1e-13;
const WIDTH_TOL: f64 = 1e-14;
const SCAN_STEPS: usize = 2000;
/// Float angles this close to `2πp/q` are treated as the endpoint itself.
const ENDPOINT_SNAP: f64 = 1e-14;
/// Slack when deciding whether a float angle lies on an arc interval.
const INTERVAL_SLACK: f64 = 1e-9;

/// An argument in `[0, 2π]`, exact when given as a rational multiple of `π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// `θ = π · num / den`.
    PiMultiple(i64, i64),
    Radians(f64),
}

impl Angle {
    pub fn radians(self) -> f64 {
        match self {
            Angle::PiMultiple(num, den) => PI * num as f64 / den as f64,
            Angle::Radians(x) => x,
        }
    }

    /// `θ / 2π` as an exact fraction, when the angle is a rational multiple of π.
    fn turns(self) -> Option<Result<Fraction>> {
        match self {
            Angle::PiMultiple(num, den) => {
                let den2 = den.checked_mul(2).ok_or(Error::Overflow("angle denominator"));
                Some(den2.and_then(|d2| {
                    if num < 0 || den <= 0 {
                        Err(Error::Precondition(format!("angle {num}/{den}·π is negative")))
                    } else {
                        Fraction::new(num, d2).map_err(|_| {
                            Error::Precondition(format!("angle {num}/{den}·π exceeds 2π"))
                        })
                    }
                }))
            }
            Angle::Radians(_) => None,
        }
    }
}

/// `ρ_n(θ) e^{iθ}` together with the parameters that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub theta: f64,
    pub mu: f64,
    pub rho: f64,
    pub alpha: f64,
    pub arc: ArcId,
    /// True when `θ` lies on the conjugate interval `[2π(s-r)/s, 2π(q-p)/q]`.
    pub conjugate: bool,
}

impl BoundaryPoint {
    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.rho, self.theta)
    }
}

fn interval(arc: ArcId, conjugate: bool) -> (Fraction, Fraction) {
    let (primary, conj) = farey_pairs_for(arc);
    let pair = if conjugate { conj } else { primary };
    (pair.left, pair.right)
}

fn on_interval(theta: f64, (lo, hi): (Fraction, Fraction)) -> bool {
    theta >= TAU * lo.to_f64() - INTERVAL_SLACK && theta <= TAU * hi.to_f64() + INTERVAL_SLACK
}

/// Which interval of the arc holds `theta`; the primary one wins on overlap.
fn which_interval(arc: ArcId, theta: f64) -> Result<bool> {
    if on_interval(theta, interval(arc, false)) {
        Ok(false)
    } else if on_interval(theta, interval(arc, true)) {
        Ok(true)
    } else {
        Err(Error::AngleOutsideArc {
            n: arc.n(),
            q: arc.q(),
            s: arc.s(),
            theta,
        })
    }
}

struct Coeffs {
    q: f64,
    s1: i32,
    qd1: i32,
    ratio: f64,
    shift: f64,
}

fn coeffs(arc: ArcId) -> Coeffs {
    let params = arc_params(arc);
    Coeffs {
        q: arc.q() as f64,
        s1: params.s1 as i32,
        qd1: (arc.q() * params.d1) as i32,
        ratio: params.s1 as f64 / params.d1 as f64,
        shift: TAU * params.r as f64 / params.d as f64,
    }
}

fn residual_primary(k: &Coeffs, theta: f64, mu: f64) -> f64 {
    mu.powi(k.s1) * (k.q * theta).sin()
        - mu.powi(k.qd1) * (k.ratio * theta - k.shift).sin()
        - ((k.q - k.ratio) * theta + k.shift).sin()
}

/// The same equation after substituting `θ = 2π - θ'`, written in `θ'`.
fn residual_conjugate(k: &Coeffs, s: f64, d: f64, theta: f64, mu: f64) -> f64 {
    let shift = k.shift - TAU * s / d;
    mu.powi(k.s1) * (k.q * theta).sin()
        - mu.powi(k.qd1) * (k.ratio * theta + shift).sin()
        - ((k.q - k.ratio) * theta - shift).sin()
}

/// Left-hand side of the boundary equation at `(θ, μ)`.
///
/// Angles on the conjugate interval use the conjugate form of the equation.
pub fn implicit_residual(arc: ArcId, theta: f64, mu: f64) -> Result<f64> {
    let conjugate = which_interval(arc, theta)?;
    Ok(residual_on(arc, conjugate, theta, mu))
}

fn residual_on(arc: ArcId, conjugate: bool, theta: f64, mu: f64) -> f64 {
    let k = coeffs(arc);
    if conjugate {
        let d = arc_params(arc).d as f64;
        residual_conjugate(&k, arc.s() as f64, d, theta, mu)
    } else {
        residual_primary(&k, theta, mu)
    }
}

/// Root of `f` on `[MU_LO, MU_HI]` by sign scan then bisection.
fn solve_mu(f: impl Fn(f64) -> f64) -> Result<f64> {
    let step = (MU_HI - MU_LO) / SCAN_STEPS as f64;
    let mut lo = MU_LO;
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let mut bracket = None;
    for i in 1..=SCAN_STEPS {
        let x = if i == SCAN_STEPS { MU_HI } else { MU_LO + step * i as f64 };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() != f_lo.signum() {
            bracket = Some((lo, x));
            break;
        }
        lo = x;
        f_lo = fx;
    }
    let (mut a, mut b) = bracket
        .ok_or_else(|| Error::NonConvergence("no sign change for μ in [1e-12, 2]".into()))?;
    let mut fa = f(a);
    loop {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        let mid = 0.5 * (a + b);
        let done = b - a <= WIDTH_TOL && f(mid).abs() <= RESIDUAL_TOL;
        let stuck = mid <= a || mid >= b;
        if done {
            return Ok(mid);
        }
        if stuck {
            let res = f(mid).abs();
            // Spacing of doubles is the limit here; accept a tiny residual.
            if res <= 1e-11 {
                return Ok(mid);
            }
            return Err(Error::NonConvergence(format!(
                "bisection stalled at μ = {mid} with residual {res:e}"
            )));
        }
    }
}

fn alpha_for(arc: ArcId, theta_primary: f64, mu: f64) -> f64 {
    let k = coeffs(arc);
    let lhs = ((k.q - k.ratio) * theta_primary + k.shift).sin();
    let rhs = mu.powi(k.s1) * (k.q * theta_primary).sin();
    if lhs.abs() < 1e-300 {
        return 1.0;
    }
    (rhs / lhs).clamp(0.0, 1.0)
}

/// Endpoint value of `α`: zero at `e^{2πip/q}`, one at `e^{2πir/s}`.
fn endpoint_point(arc: ArcId, at: Fraction, conjugate: bool) -> BoundaryPoint {
    let alpha = if at.den() == arc.q() { 0.0 } else { 1.0 };
    BoundaryPoint {
        theta: TAU * at.to_f64(),
        mu: 1.0,
        rho: 1.0,
        alpha,
        arc,
        conjugate,
    }
}

/// Solves the boundary equation on one interval of a fixed arc.
///
/// Unlike [`rho_at`], the arc is given, so this also works for arcs whose
/// reduced Ito polynomial has degree below `n`.
pub fn point_on_arc(arc: ArcId, theta: Angle) -> Result<BoundaryPoint> {
    let x = theta.radians();
    let conjugate = which_interval(arc, x)?;
    let (lo, hi) = interval(arc, conjugate);
    let exact = match theta.turns() {
        Some(t) => {
            let t = t?;
            (t == lo || t == hi).then_some(t)
        }
        None => [lo, hi]
            .into_iter()
            .find(|e| (x - TAU * e.to_f64()).abs() <= ENDPOINT_SNAP),
    };
    if let Some(at) = exact {
        return Ok(endpoint_point(arc, at, conjugate));
    }
    let x = x.clamp(TAU * lo.to_f64(), TAU * hi.to_f64());
    if arc.n() == 2 {
        // Θ_2 is the segment [-1, 1]; off the real axis the boundary ray is empty.
        return Ok(BoundaryPoint {
            theta: x,
            mu: 0.0,
            rho: 0.0,
            alpha: 0.5,
            arc,
            conjugate,
        });
    }
    let mu = solve_mu(|mu| residual_on(arc, conjugate, x, mu))?;
    let params = arc_params(arc);
    let theta_primary = if conjugate { TAU - x } else { x };
    Ok(BoundaryPoint {
        theta: x,
        mu,
        rho: mu.powi(params.d1 as i32),
        alpha: alpha_for(arc, theta_primary, mu),
        arc,
        conjugate,
    })
}

/// Binary search over `F_n ∪ {1}` for the arc interval holding an angle.
#[derive(Debug, Clone)]
pub struct BoundaryLocator {
    n: i64,
    marks: Vec<Fraction>,
}

impl BoundaryLocator {
    pub fn new(n: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::OrderTooSmall { n, min: 2 });
        }
        let mut marks = farey_sequence(n)?;
        marks.push(Fraction::ONE);
        Ok(BoundaryLocator { n, marks })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// The arc and interval side for the gap `[marks[i], marks[i+1]]`.
    fn gap(&self, i: usize) -> (ArcId, bool) {
        let (a, b) = (self.marks[i], self.marks[i + 1]);
        let arc = ArcId::new(self.n, a.den(), b.den()).expect("neighbours in F_n form an arc");
        (arc, a.den() > b.den())
    }

    /// The arc, interval side and (for exact endpoints) the endpoint hit by `theta`.
    pub fn locate(&self, theta: Angle) -> Result<(ArcId, bool)> {
        let x = theta.radians();
        if !(x.is_finite()) || x < -ENDPOINT_SNAP || x > TAU + ENDPOINT_SNAP {
            return Err(Error::Precondition(format!("θ = {x} is outside [0, 2π]")));
        }
        let last_gap = self.marks.len() - 2;
        let idx = match theta.turns() {
            Some(t) => {
                let t = t?;
                match self.marks.binary_search(&t) {
                    Ok(i) => i.min(last_gap),
                    Err(i) => i - 1,
                }
            }
            None => {
                let t = x / TAU;
                let i = self.marks.partition_point(|m| m.to_f64() <= t);
                i.saturating_sub(1).min(last_gap)
            }
        };
        Ok(self.gap(idx))
    }

    pub fn rho_at(&self, theta: Angle) -> Result<BoundaryPoint> {
        let (arc, _) = self.locate(theta)?;
        let theta = match theta {
            Angle::Radians(x) => Angle::Radians(x.clamp(0.0, TAU)),
            exact => exact,
        };
        point_on_arc(arc, theta)
    }
}

/// `ρ_n(θ)` with the arc, `μ` and `α` that produce it.
pub fn rho_at(n: i64, theta: Angle) -> Result<BoundaryPoint> {
    BoundaryLocator::new(n)?.rho_at(theta)
}

/// `|φ_α(ρ e^{iθ})|` with `φ_α(t) = (t^q - β)^d - α^d t^{qd-s}` and `β = 1 - α`.
pub fn verify_phi(point: &BoundaryPoint) -> f64 {
    let arc = point.arc;
    let d = arc_params(arc).d;
    let t = point.value();
    let beta = 1.0 - point.alpha;
    let lhs = (t.powi(arc.q() as i32) - beta).powi(d as i32);
    let exp = (arc.q() * d - arc.s()) as i32;
    let rhs = if exp == 0 {
        Complex64::new(point.alpha.powi(d as i32), 0.0)
    } else {
        t.powi(exp) * point.alpha.powi(d as i32)
    };
    (lhs - rhs).norm()
}

/// Points with `θ` evenly spaced over the primary interval, endpoints exact.
pub fn sample_arc(arc: ArcId, count: usize) -> Result<Vec<BoundaryPoint>> {
    sample_interval(arc, count, false)
}

/// As [`sample_arc`], on either the primary or the conjugate interval.
pub fn sample_interval(arc: ArcId, count: usize, conjugate: bool) -> Result<Vec<BoundaryPoint>> {
    if count < 2 {
        return Err(Error::Precondition(format!("need at least 2 samples, got {count}")));
    }
    let (lo, hi) = interval(arc, conjugate);
    let as_pi = |f: Fraction| Angle::PiMultiple(2 * f.num(), f.den());
    (0..count)
        .map(|i| {
            let theta = if i == 0 {
                as_pi(lo)
            } else if i == count - 1 {
                as_pi(hi)
            } else {
                let t = i as f64 / (count - 1) as f64;
                Angle::Radians(TAU * (lo.to_f64() + t * (hi.to_f64() - lo.to_f64())))
            };
            point_on_arc(arc, theta)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArcEnd {
    AtQ,
    AtS,
}

/// One-sided derivative of `ρ_n` at an endpoint of the primary interval.
///
/// Infinite when the tangent is vertical (`qd = 2` at the `q` end).
pub fn endpoint_slope(arc: ArcId, end: ArcEnd) -> f64 {
    match end {
        ArcEnd::AtQ => {
            let qd = arc.q() * arc_params(arc).d;
            if qd == 2 {
                return f64::NEG_INFINITY;
            }
            let x = TAU / qd as f64;
            (x.cos() - 1.0) / x.sin()
        }
        ArcEnd::AtS => {
            if arc.s() == 2 {
                return f64::INFINITY;
            }
            let x = TAU / arc.s() as f64;
            (1.0 - x.cos()) / x.sin()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ItoKind {
    Full,
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItoPolynomial {
    pub arc: ArcId,
    pub kind: ItoKind,
    pub arc_type: ArcType,
    #[serde(serialize_with = "serialize_rational")]
    pub alpha: BigRational,
    pub poly: Poly,
}

fn serialize_rational<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn check_alpha(alpha: &BigRational, open: bool) -> Result<()> {
    let bad = if open {
        !alpha.is_positive() || alpha >= &BigRational::one()
    } else {
        alpha.is_negative() || alpha > &BigRational::one()
    };
    if bad {
        return Err(Error::AlphaOutOfRange(alpha.to_string()));
    }
    Ok(())
}

/// `t^s (t^q - 1 + α)^d - α^d t^{qd}`, or the same divided by `t^{min(s, qd)}`.
pub fn ito_polynomial(arc: ArcId, alpha: &BigRational, kind: ItoKind) -> Result<ItoPolynomial> {
    check_alpha(alpha, false)?;
    let params = arc_params(arc);
    if kind == ItoKind::Reduced && params.arc_type == ArcType::Unsupported {
        return Err(Error::UnsupportedArc {
            n: arc.n(),
            q: arc.q(),
            s: arc.s(),
        });
    }
    let (q, s, d) = (arc.q() as usize, arc.s() as usize, params.d as u32);
    let one = BigRational::one();
    let inner = &Poly::monomial(one.clone(), q) + &Poly::constant(alpha - &one);
    let head = &Poly::monomial(one, s) * &inner.pow(d);
    let tail = Poly::monomial(num_traits::pow(alpha.clone(), d as usize), q * d as usize);
    let mut poly = &head - &tail;
    if kind == ItoKind::Reduced {
        // t^{min(s, qd)} always divides; stripping more would also drop genuine
        // zero roots, e.g. (t - 1/2)^2 - 1/4 for n = 2, α = 1/2.
        poly = poly.shift_down(s.min(q * d as usize));
    }
    Ok(ItoPolynomial {
        arc,
        kind,
        arc_type: params.arc_type,
        alpha: alpha.clone(),
        poly,
    })
}

/// Parses `p/q` or an integer into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            (!b.is_zero()).then(|| BigRational::new(a, b))
        }
        None => text.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn arc(n: i64, q: i64, s: i64) -> ArcId {
        ArcId::new(n, q, s).unwrap()
    }

    #[test]
    fn paper_sample_point() {
        let a = arc(14, 3, 14);
        let p = point_on_arc(a, Angle::PiMultiple(29, 42)).unwrap();
        assert!(!p.conjugate);
        assert!((p.mu - 0.99542).abs() < 5e-5, "μ = {}", p.mu);
        assert!((p.rho - p.mu * p.mu).abs() < 1e-15);
        assert!(implicit_residual(a, p.theta, p.mu).unwrap().abs() < 1e-12);

        let c = point_on_arc(a, Angle::PiMultiple(55, 42)).unwrap();
        assert!(c.conjugate);
        assert!((c.mu - p.mu).abs() < 1e-10);
        assert!(verify_phi(&p) < 1e-9);
        assert!(verify_phi(&c) < 1e-9);
    }

    #[test]
    fn locator_agrees_with_fixed_arc() {
        let p = rho_at(14, Angle::PiMultiple(29, 42)).unwrap();
        assert_eq!(p.arc, arc(14, 3, 14));
        let c = rho_at(14, Angle::PiMultiple(55, 42)).unwrap();
        assert_eq!(c.arc, arc(14, 3, 14));
        assert!((p.rho - c.rho).abs() < 1e-10);
    }

    #[test]
    fn conjugate_form_is_negated_substitution() {
        let a = arc(14, 3, 14);
        let k = coeffs(a);
        for &theta in &[1.30 * PI, 1.31 * PI, 1.33 * PI] {
            for &mu in &[0.3, 0.9, 1.4] {
                let conj = residual_on(a, true, theta, mu);
                let sub = residual_primary(&k, TAU - theta, mu);
                assert!((conj + sub).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn endpoints_have_zero_residual() {
        for n in 3..=12 {
            for a in crate::farey::arcs_of_order(n).unwrap() {
                let (lo, hi) = interval(a, false);
                for e in [lo, hi] {
                    let r = implicit_residual(a, TAU * e.to_f64(), 1.0).unwrap();
                    assert!(r.abs() < 1e-12, "{a} at {e}: {r}");
                }
            }
        }
    }

    #[test]
    fn endpoint_hits_are_exact() {
        let p = rho_at(14, Angle::PiMultiple(2, 3)).unwrap();
        assert_eq!((p.rho, p.mu), (1.0, 1.0));
        let p = rho_at(14, Angle::Radians(TAU / 3.0)).unwrap();
        assert_eq!(p.rho, 1.0);
        let p = rho_at(5, Angle::PiMultiple(2, 1)).unwrap();
        assert_eq!(p.rho, 1.0);
        let p = rho_at(5, Angle::Radians(0.0)).unwrap();
        assert_eq!(p.rho, 1.0);
    }

    #[test]
    fn endpoint_alpha_zeroes_phi() {
        for n in 3..=10 {
            for a in crate::farey::arcs_of_order(n).unwrap() {
                for p in sample_arc(a, 2).unwrap() {
                    assert!(verify_phi(&p) < 1e-12, "{a} {p:?}");
                }
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(rho_at(1, Angle::Radians(1.0)).is_err());
        assert!(rho_at(5, Angle::Radians(7.0)).is_err());
        assert!(rho_at(5, Angle::PiMultiple(3, 1)).is_err());
        assert!(implicit_residual(arc(14, 3, 14), 0.1, 0.5).is_err());
    }

    #[test]
    fn order_two_is_a_segment() {
        let p = rho_at(2, Angle::Radians(1.0)).unwrap();
        assert_eq!(p.rho, 0.0);
        assert!(verify_phi(&p) < 1e-15);
        assert_eq!(rho_at(2, Angle::PiMultiple(1, 1)).unwrap().rho, 1.0);
    }

    #[test]
    fn slopes_closed_form() {
        let a = arc(14, 3, 14);
        let at_q = ((PI / 6.0).cos() - 1.0) / (PI / 6.0).sin();
        let at_s = (1.0 - (PI / 7.0).cos()) / (PI / 7.0).sin();
        assert!((endpoint_slope(a, ArcEnd::AtQ) - at_q).abs() < 1e-15);
        assert!((endpoint_slope(a, ArcEnd::AtS) - at_s).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for s in 3..200 {
            let v = endpoint_slope(arc(s, 1, s), ArcEnd::AtS);
            assert!(v > 0.0 && v < last);
            last = v;
        }
        assert_eq!(endpoint_slope(arc(3, 2, 3), ArcEnd::AtQ), f64::NEG_INFINITY);
    }

    #[test]
    fn ito_examples() {
        let a = rat(1, 3);
        let f = ito_polynomial(arc(8, 7, 8), &a, ItoKind::Reduced).unwrap();
        assert_eq!(f.poly.to_string(), "t^8 - 2/3 t - 1/3");
        let f = ito_polynomial(arc(2, 1, 2), &rat(1, 1), ItoKind::Reduced).unwrap();
        assert_eq!(f.poly.to_string(), "t^2 - 1");

        let half = rat(1, 2);
        let a15 = arc(15, 3, 14);
        let full = ito_polynomial(a15, &half, ItoKind::Full).unwrap().poly;
        let red = ito_polynomial(a15, &half, ItoKind::Reduced).unwrap().poly;
        let one = BigRational::one();
        let cube = &Poly::monomial(one.clone(), 3) - &Poly::constant(half.clone());
        let tail = Poly::monomial(num_traits::pow(half.clone(), 5), 1);
        let want_red = &cube.pow(5) - &tail;
        assert_eq!(red, want_red);
        assert_eq!(full, &Poly::monomial(one, 14) * &want_red);
        assert_eq!(red.degree(), Some(15));

        assert!(ito_polynomial(arc(16, 3, 14), &half, ItoKind::Reduced).is_err());
        assert!(ito_polynomial(arc(16, 3, 14), &half, ItoKind::Full).is_ok());
        assert!(ito_polynomial(arc(8, 7, 8), &rat(3, 2), ItoKind::Full).is_err());
    }

    #[test]
    fn reduced_degree_is_n_for_supported_arcs() {
        for n in 2..=20 {
            for a in crate::farey::arcs_of_order(n).unwrap() {
                if a.params().arc_type == ArcType::Unsupported {
                    continue;
                }
                let f = ito_polynomial(a, &rat(1, 3), ItoKind::Reduced).unwrap();
                assert_eq!(f.poly.degree(), Some(n as usize), "{a}");
            }
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("2/6"), Some(rat(1, 3)));
        assert_eq!(parse_rational(" 3 "), Some(rat(3, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
