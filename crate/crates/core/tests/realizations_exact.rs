use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};
use proptest::prelude::*;

use karpelevic::boundary::{ito_polynomial, sample_arc, ItoKind};
use karpelevic::digraph::CycleBudget;
use karpelevic::farey::{arc_params, arcs_of_order, ArcId, ArcType};
use karpelevic::poly::{rat, Poly};
use karpelevic::realizations::{
    build, build_type0, build_type_i, build_type_ii, build_type_iii, char_poly,
    compositions, partition_class_of, partition_classes, PartitionClass, SparseStochasticMatrix,
};

/// Faddeev–LeVerrier: independent of the Hessenberg route.
fn leverrier(m: &SparseStochasticMatrix) -> Poly {
    let a = m.to_dense();
    let n = a.len();
    let mul = |x: &Vec<Vec<BigRational>>, y: &Vec<Vec<BigRational>>| {
        let mut out = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                if x[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += &x[i][k] * &y[k][j];
                }
            }
        }
        out
    };
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        let mut next = mul(&a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        mk = next;
        let am = mul(&a, &mk);
        let trace = (0..n).fold(BigRational::zero(), |acc, i| acc + &am[i][i]);
        coeffs[n - k] = -trace / BigRational::from_integer((k as i64).into());
    }
    Poly::from_coeffs(coeffs)
}

fn arc(n: i64, q: i64, s: i64) -> ArcId {
    ArcId::new(n, q, s).unwrap()
}

/// Every realization of a supported arc: one per partition class.
fn realizations(a: ArcId, alpha: &BigRational) -> Vec<(Option<PartitionClass>, SparseStochasticMatrix)> {
    let p = arc_params(a);
    match p.arc_type {
        ArcType::Type0 | ArcType::TypeI => vec![(None, build(a, None, alpha).unwrap())],
        ArcType::TypeII | ArcType::TypeIII => {
            let cap = if p.arc_type == ArcType::TypeII { a.q() - 1 } else { p.excess };
            partition_classes(p.excess, p.d as usize, cap)
                .into_iter()
                .map(|c| {
                    let m = build(a, Some(c.parts()), alpha).unwrap();
                    (Some(c), m)
                })
                .collect()
        }
        ArcType::Unsupported => Vec::new(),
    }
}

#[test]
fn paper_char_polys() {
    let f = char_poly(&build_type_i(arc(8, 7, 8), &rat(1, 3)).unwrap()).unwrap();
    assert_eq!(f.to_string(), "t^8 - 2/3 t - 1/3");

    let half = rat(1, 2);
    let f = char_poly(&build_type_ii(arc(6, 3, 5), &[1, 0], &half).unwrap()).unwrap();
    let cube = &Poly::monomial(rat(1, 1), 3) - &Poly::constant(half.clone());
    assert_eq!(f, &cube.pow(2) - &Poly::monomial(rat(1, 4), 1));

    let f = char_poly(&build_type_iii(arc(7, 3, 7), &[1, 0], &half).unwrap()).unwrap();
    let want = &(&Poly::monomial(rat(1, 1), 1) * &cube.pow(2)) - &Poly::constant(rat(1, 4));
    assert_eq!(f, want);

    let f = char_poly(&build_type0(2, &half).unwrap()).unwrap();
    assert_eq!(f.to_string(), "t^2 - t");
    let f = char_poly(&build_type0(5, &rat(1, 3)).unwrap()).unwrap();
    let lin = &Poly::monomial(rat(1, 1), 1) - &Poly::constant(rat(2, 3));
    assert_eq!(f, &lin.pow(5) - &Poly::constant(num_traits::pow(rat(1, 3), 5)));
}

#[test]
fn hessenberg_agrees_with_leverrier() {
    for n in 2..=10 {
        for a in arcs_of_order(n).unwrap() {
            for (_, m) in realizations(a, &rat(2, 7)) {
                assert_eq!(char_poly(&m).unwrap(), leverrier(&m), "{a}");
            }
        }
    }
}

#[test]
fn builders_match_reduced_ito_polynomials() {
    for n in 1..=16 {
        if n == 1 {
            let m = build_type0(1, &rat(1, 3)).unwrap();
            assert_eq!(char_poly(&m).unwrap().to_string(), "t - 1");
            continue;
        }
        for a in arcs_of_order(n).unwrap() {
            for alpha in [rat(1, 3), rat(1, 2), rat(9, 10)] {
                let want = match ito_polynomial(a, &alpha, ItoKind::Reduced) {
                    Ok(f) => f.poly,
                    Err(_) => continue,
                };
                for (class, m) in realizations(a, &alpha) {
                    assert_eq!(char_poly(&m).unwrap(), want, "{a} {class:?} α = {alpha}");
                }
            }
        }
    }
}

#[test]
fn cycle_census_and_round_trip() {
    for n in 3..=16 {
        for a in arcs_of_order(n).unwrap() {
            let p = arc_params(a);
            for (class, m) in realizations(a, &rat(1, 2)) {
                let g = m.digraph();
                let cycles = g.enumerate_simple_cycles(CycleBudget::default()).unwrap();
                let mut lens: Vec<usize> = cycles.iter().map(|c| c.len()).collect();
                lens.sort();
                let (q, s) = (a.q() as usize, a.s() as usize);
                let want: Vec<usize> = match p.arc_type {
                    ArcType::TypeI => vec![q, n as usize],
                    ArcType::TypeII | ArcType::TypeIII => {
                        let mut v = vec![q; p.d as usize];
                        v.push(s);
                        v
                    }
                    _ => continue,
                };
                assert_eq!(lens, want, "{a}");
                let qw: Vec<_> = cycles.iter().filter(|c| c.len() == q).map(|c| c.weight.clone()).collect();
                assert!(qw.windows(2).all(|w| w[0] == w[1]), "{a}");
                if let Some(class) = class {
                    assert_eq!(partition_class_of(&m, a).unwrap(), class, "{a}");
                }
            }
        }
    }
}

#[test]
fn extraction_rejects_wrong_shapes() {
    let m = build_type_i(arc(8, 7, 8), &rat(1, 2)).unwrap();
    assert!(partition_class_of(&m, arc(8, 7, 8)).is_err());
    let m = build_type_ii(arc(12, 5, 12), &[1, 1, 1], &rat(1, 2));
    assert!(m.is_err());
    let m = build_type_ii(arc(6, 3, 5), &[1, 0], &rat(1, 2)).unwrap();
    assert!(partition_class_of(&m, arc(7, 3, 7)).is_err());
}

#[test]
fn boundary_eigenvalues_are_roots() {
    for n in 3..=12 {
        for a in arcs_of_order(n).unwrap() {
            let p = arc_params(a);
            let parts: Option<Vec<i64>> = match p.arc_type {
                ArcType::TypeII | ArcType::TypeIII => {
                    let mut v = vec![0; p.d as usize];
                    v[0] = p.excess;
                    Some(v)
                }
                ArcType::Unsupported => continue,
                _ => None,
            };
            for pt in sample_arc(a, 7).unwrap().iter().skip(1).take(5) {
                let alpha = BigRational::from_f64(pt.alpha).unwrap();
                if alpha.is_zero() || alpha >= BigRational::one() {
                    continue;
                }
                let m = build(a, parts.as_deref(), &alpha).unwrap();
                let f = char_poly(&m).unwrap();
                let z = Complex64::from_polar(pt.rho, pt.theta);
                assert!(f.eval_complex(z).norm() < 1e-9, "{a} θ = {}", pt.theta);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabelled_realizations_keep_their_class(
        idx in 0usize..1000,
        perm_seed in proptest::collection::vec(0usize..1000, 16),
    ) {
        let a = [arc(12, 5, 12), arc(15, 4, 15), arc(15, 3, 14), arc(16, 3, 16), arc(12, 4, 11)][idx % 5];
        let p = arc_params(a);
        let cap = if p.arc_type == ArcType::TypeII { a.q() - 1 } else { p.excess };
        let comps = compositions(p.excess, p.d as usize, cap);
        let parts = &comps[idx % comps.len()];
        let m = build(a, Some(parts), &rat(1, 3)).unwrap();
        let n = a.n() as usize;
        let mut perm: Vec<usize> = (1..=n).collect();
        for i in (1..n).rev() {
            perm.swap(i, perm_seed[i] % (i + 1));
        }
        let relabelled = m.relabel(&perm).unwrap();
        prop_assert_eq!(
            partition_class_of(&relabelled, a).unwrap(),
            PartitionClass::new(parts.clone()).unwrap()
        );
    }
}
