use num_rational::BigRational;
use num_traits::{One, Zero};

use super::matrix::SparseStochasticMatrix;
use crate::error::{Error, Result};
use crate::poly::Poly;

pub const CHAR_POLY_MAX_N: usize = 400;

/// `det(tI - A)` in exact arithmetic.
///
/// Reduces to upper Hessenberg form by rational similarity transforms, then
/// expands the Hessenberg determinant with the usual three-term recurrence.
pub fn char_poly(m: &SparseStochasticMatrix) -> Result<Poly> {
    if m.n() > CHAR_POLY_MAX_N {
        return Err(Error::BudgetExceeded {
            what: "dimension for characteristic polynomial",
            value: m.n(),
            limit: CHAR_POLY_MAX_N,
        });
    }
    Ok(char_poly_dense(m.to_dense()))
}

pub fn char_poly_dense(mut h: Vec<Vec<BigRational>>) -> Poly {
    let n = h.len();
    hessenberg(&mut h);
    let t = Poly::monomial(BigRational::one(), 1);
    // p[k] is the characteristic polynomial of the leading k×k block.
    let mut p = vec![Poly::one()];
    for k in 0..n {
        let mut next = &(&t - &Poly::constant(h[k][k].clone())) * &p[k];
        let mut sub = BigRational::one();
        for i in (0..k).rev() {
            sub *= &h[i + 1][i];
            if sub.is_zero() {
                break;
            }
            let coeff = &h[i][k] * &sub;
            if !coeff.is_zero() {
                next = &next - &p[i].scale(&coeff);
            }
        }
        p.push(next);
    }
    p.pop().expect("at least the constant polynomial")
}

fn hessenberg(h: &mut [Vec<BigRational>]) {
    let n = h.len();
    for k in 0..n.saturating_sub(2) {
        let Some(piv) = (k + 1..n).find(|&i| !h[i][k].is_zero()) else {
            continue;
        };
        if piv != k + 1 {
            h.swap(piv, k + 1);
            for row in h.iter_mut() {
                row.swap(piv, k + 1);
            }
        }
        for j in k + 2..n {
            if h[j][k].is_zero() {
                continue;
            }
            let factor = &h[j][k] / &h[k + 1][k];
            for c in 0..n {
                let delta = &factor * &h[k + 1][c];
                h[j][c] -= delta;
            }
            for row in h.iter_mut() {
                let delta = &factor * &row[j];
                row[k + 1] += delta;
            }
        }
    }
}
