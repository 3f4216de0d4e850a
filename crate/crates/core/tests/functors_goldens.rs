mod common;

use abmod::catalog::*;
use abmod::functors::*;
use abmod::invariants::{alpha_invariant, width_table};
use abmod::lattice::Lattice;
use abmod::linalg::Matrix;
use abmod::module::{AbModule, Element};
use abmod::series::Series;
use abmod::{AbError, Scalar};
use common::*;

const W: usize = 12;

fn unit(p: usize, i: usize, w: usize) -> Element {
    let coords = (0..p).map(|k| if k == i { Series::one(w) } else { Series::zero(w) }).collect();
    Element::new(coords, 0)
}

#[test]
fn dual_of_e_lambda_is_e_minus_lambda() {
    for l in [s(0), q(3, 2), &s(-1) + &Scalar::i()] {
        let d = dual(&make_e_lambda(&l, W));
        assert_eq!(d, make_e_lambda(&-&l, W));
    }
}

#[test]
fn dual_of_e_lambda_mu() {
    for (l, m) in [(s(2), s(0)), (q(1, 2), q(1, 2)), (s(-1), q(2, 3))] {
        let d = dual(&make_e_lambda_mu(&l, &m, W));
        let expect = make_e_lambda_mu(&(&s(1) - &m), &(&s(1) - &l), W);
        assert!(isomorphic(&d, &expect, W), "E_({l},{m})*");
    }
}

#[test]
fn dual_of_e_1_0_is_e_minus_1_0() {
    let d = dual(&make_e_lambda_n(&s(1), 0, W).unwrap());
    assert!(isomorphic(&d, &make_e_lambda_n(&s(-1), 0, W).unwrap(), W));
}

#[test]
fn dual_of_j_k_shifts_by_k_minus_one() {
    for k in 2..=4usize {
        let l = q(1, 2);
        let d = dual(&make_j_k(&l, k, W).unwrap());
        let shift = s(k as i64 - 1);
        let realized = make_j_k(&(&-&l - &shift), k, W).unwrap();
        assert!(isomorphic(&d, &realized, W), "J_{k}");
        let other = make_j_k(&(&(&-&l - &s(2 * k as i64)) + &s(2)), k, W).unwrap();
        assert!(!isomorphic(&d, &other, W), "J_{k}");
    }
}

#[test]
fn dual_is_an_involution_on_presentations() {
    for seed in 0..5 {
        let e = random_regular(3, seed, W).unwrap();
        assert_eq!(dual(&dual(&e)), e);
    }
}

#[test]
fn twist_of_e_mu() {
    let e = twist(&make_e_lambda(&q(1, 3), W), &q(2, 3));
    assert_eq!(e, make_e_lambda(&s(1), W));
    let j = make_j_k(&s(0), 3, W).unwrap();
    assert_eq!(twist(&j, &s(0)), j);
}

#[test]
fn dual_of_twist_is_twist_of_dual() {
    for seed in 0..4 {
        let e = random_regular(2, 50 + seed, W).unwrap();
        let m = q(seed as i64 - 1, 2);
        assert!(isomorphic(&dual(&twist(&e, &m)), &twist(&dual(&e), &-&m), W));
    }
}

#[test]
fn hom_e0_e0_has_invariant_identity() {
    let e0 = make_e_lambda(&s(0), W);
    let h = hom_ab(&e0, &e0);
    assert_eq!(h.rank(), 1);
    assert!(h.matrix().is_zero());
}

#[test]
fn hom_into_e0_is_the_dual() {
    for l in [s(1), q(-1, 2), s(3)] {
        let h = hom_ab(&make_e_lambda(&l, W), &make_e_lambda(&s(0), W));
        assert!(isomorphic(&h, &make_e_lambda(&-&l, W), W));
    }
}

#[test]
fn hom_between_rank_one_modules() {
    // Λ(φ) = φ·νb − λb·φ, read in the variable −b.
    for (nu, l) in [(s(1), s(0)), (q(1, 2), q(5, 2)), (s(-2), q(1, 3))] {
        let h = hom_ab(&make_e_lambda(&nu, W), &make_e_lambda(&l, W));
        let m = h.entry(0, 0);
        let oracle = (&nu - &l).scale_int(-1);
        assert!(m.coeff(0).is_zero());
        assert_eq!(m.coeff(1), &oracle);
        assert_eq!(h.residue_like_exponent().unwrap(), &l - &nu);
    }
}

#[test]
fn hom_rank_is_product() {
    let e = random_regular(2, 3, W).unwrap();
    let f = random_regular(3, 4, W).unwrap();
    assert_eq!(hom_ab(&e, &f).rank(), 6);
    assert_eq!(hom_index(2, 1, 0), 2);
}

/// Kernel at `2w` read modulo `b^w`, and cokernel at `w`, of `a` on a rank-1
/// module given by its single entry.
fn rank_one_ker_coker(m: &Series, w: usize) -> (usize, usize) {
    let a_matrix = |n: usize| {
        let mut a = Matrix::zeros(n, n);
        for j in 0..n {
            for (k, c) in m.coeffs().iter().enumerate() {
                if j + k < n {
                    a[(j + k, j)] += c;
                }
            }
            if j + 1 < n {
                a[(j + 1, j)] += &s(j as i64);
            }
        }
        a
    };
    let coker = w - a_matrix(w).rank();
    let ker = a_matrix(2 * w).kernel();
    let proj: Vec<Vec<Scalar>> = ker.into_iter().map(|v| v[..w].to_vec()).collect();
    let d0 = if proj.is_empty() { 0 } else { Matrix::from_rows(proj).rank() };
    (d0, coker)
}

#[test]
fn ext_of_e0_with_itself() {
    let e0 = make_e_lambda(&s(0), 24);
    let d = ext_dims(&e0, &e0).unwrap();
    let h = hom_ab(&e0, &e0);
    for &w in &d.levels {
        assert_eq!(rank_one_ker_coker(&h.entry(0, 0), w), (d.d0, d.d1));
    }
    assert_eq!((d.d0, d.d1), (1, 2));
}

#[test]
fn ext_between_rank_one_modules_matches_dense_count() {
    for (nu, l) in [(s(0), s(1)), (s(1), s(0)), (q(1, 2), s(0)), (s(2), s(-1))] {
        let d = ext_dims(&make_e_lambda(&nu, 24), &make_e_lambda(&l, 24)).unwrap();
        let h = hom_ab(&make_e_lambda(&nu, 24), &make_e_lambda(&l, 24));
        for &w in &d.levels {
            assert_eq!(rank_one_ker_coker(&h.entry(0, 0), w), (d.d0, d.d1), "({nu}, {l})");
        }
    }
}

#[test]
fn eigen_lift_of_an_eigenvector_is_itself() {
    let l = q(2, 3);
    let e = make_e_lambda(&l, W);
    let x = eigen_lift(&e, &l, &unit(1, 0, W), 0).unwrap();
    assert_eq!(x, unit(1, 0, x.precision()));
}

#[test]
fn eigen_lift_on_e_1_0() {
    let e = make_e_lambda_n(&s(1), 0, W).unwrap();
    let x = eigen_lift(&e, &s(1), &unit(2, 1, W), 0).unwrap();
    assert_eq!(eigen_exponent(&e, &x).unwrap().0, s(1));
    assert!(matches!(eigen_lift(&e, &s(1), &unit(2, 0, W), 0), Err(AbError::HypothesisViolated(_))));
}

#[test]
fn eigen_lift_from_residue_eigenvector() {
    // Simple pole, spectrum {1/2, 3/2}: the smaller exponent always lifts.
    let e = module(&[&["(1/2)*b + b^2", "b^2"], &["3*b^3", "(3/2)*b - b^2"]], W);
    let x = eigen_lift(&e, &q(1, 2), &unit(2, 0, W), 0).unwrap();
    let (l, _) = eigen_exponent(&e, &x).unwrap();
    assert_eq!(l, q(1, 2));
}

#[test]
fn jordan_holder_of_direct_sum() {
    let e = make_e_lambda(&q(1, 2), W).direct_sum(&make_e_lambda(&s(2), W));
    let mut got = jordan_holder(&e, &ClassPolicy::Smallest).unwrap().exponents;
    got.sort_by(Scalar::lex_cmp);
    assert_eq!(got, vec![q(1, 2), s(2)]);
}

#[test]
fn jordan_holder_of_j_k() {
    for k in 2..=4usize {
        let l = q(1, 3);
        let w = 4 * k + 8;
        let j = make_j_k(&l, k, w).unwrap();
        let seq = jordan_holder(&j, &ClassPolicy::Smallest).unwrap();
        let expect: Vec<Scalar> = (0..k).rev().map(|i| &l + &s(i as i64)).collect();
        assert_eq!(seq.exponents, expect);
        let first = Lattice::normalize(k, 0, w, &[unit(k, k - 1, w).coords]).unwrap();
        assert!(seq.filtration[0].equals(&first).unwrap());
        assert_eq!(seq.sum(), alpha_invariant(&j).unwrap());
    }
}

#[test]
fn jordan_holder_sum_is_policy_independent() {
    for seed in 0..6 {
        let e = random_regular(3, 90 + seed, 20).unwrap();
        let alpha = alpha_invariant(&e).unwrap();
        for policy in [ClassPolicy::Smallest, ClassPolicy::Largest, ClassPolicy::Random(seed)] {
            assert_eq!(jordan_holder(&e, &policy).unwrap().sum(), alpha);
        }
    }
}

#[test]
fn quotient_of_j_k_by_last_vector() {
    for k in 2..=5usize {
        let j = make_j_k(&s(-1), k, W).unwrap();
        let quo = quotient_by_rank1(&j, &unit(k, k - 1, W)).unwrap();
        assert_eq!(quo, make_j_k(&s(-1), k - 1, W).unwrap());
    }
}

#[test]
fn quotient_of_direct_sum() {
    let e = make_e_lambda(&s(1), W).direct_sum(&make_e_lambda(&q(1, 4), W));
    let quo = quotient_by_rank1(&e, &unit(2, 0, W)).unwrap();
    assert_eq!(quo, make_e_lambda(&q(1, 4), W));
}

#[test]
fn quotient_rejects_bad_elements() {
    let e = make_j_k(&s(0), 2, W).unwrap();
    let not_primitive = Element::new(vec![Series::zero(W), Series::monomial(s(1), 1, W)], 0);
    assert!(matches!(quotient_by_rank1(&e, &not_primitive), Err(AbError::NotPrimitive)));
    assert!(matches!(quotient_by_rank1(&e, &unit(2, 0, W)), Err(AbError::NotEigen)));
}

#[test]
fn quotient_width_grows_by_at_most_one() {
    for seed in 0..6 {
        let e = random_regular(3, 300 + seed, 20).unwrap();
        let we = width_table(&e).unwrap();
        let q0 = first_quotient(&e);
        let wf = width_table(&q0).unwrap();
        for c in &wf.classes {
            let le = we.class_of(&c.class).map_or(0, |x| x.width);
            assert!(c.width <= le + 1, "seed {seed}");
        }
        assert!(we.width() + 3 >= wf.width() + 2, "seed {seed}");
    }
}

/// Quotient by an eigen-element realizing the smallest class minimum.
fn first_quotient(e: &AbModule) -> AbModule {
    let (x, _) = min_eigen_element(e, &ClassPolicy::Smallest).unwrap();
    quotient_by_rank1(e, &x).unwrap()
}

#[test]
fn classify_alpha_family_round_trip() {
    for (l, n, a) in [(s(1), 1usize, s(2)), (q(1, 2), 2, q(-1, 3)), (s(0), 3, s(5))] {
        let e = make_e_lambda_mu_alpha(&l, n, &a, 16).unwrap();
        assert_eq!(classify_rank2(&e).unwrap(), Rank2NormalForm::NonSplitAlpha(l, n, a));
    }
}

#[test]
fn classify_direct_sum_and_non_split() {
    let e = make_e_lambda(&s(2), 16).direct_sum(&make_e_lambda(&q(1, 2), 16));
    assert_eq!(classify_rank2(&e).unwrap(), Rank2NormalForm::DirectSum(q(1, 2), s(2)));
    let e = make_e_lambda_mu(&s(1), &q(1, 3), 16);
    assert_eq!(classify_rank2(&e).unwrap(), Rank2NormalForm::NonSplit(q(1, 3), s(1)));
    assert_eq!(classify_rank2(&e).unwrap().to_string(), "non_split(1/3, 1)");
}

#[test]
fn classify_conjugated_simple_pole_jordan() {
    for (seed, n) in [(1u64, 0usize), (2, 1), (3, 3)] {
        let mut r = rng(seed);
        let e = conjugate(&make_e_lambda_n(&q(-1, 2), n, 16).unwrap(), &mut r);
        assert_eq!(classify_rank2(&e).unwrap(), Rank2NormalForm::SimplePoleJordan(q(-1, 2), n));
    }
}

#[test]
fn classify_rejects_other_ranks() {
    assert!(matches!(classify_rank2(&make_e_lambda(&s(0), 8)), Err(AbError::BadParameter(_))));
}
