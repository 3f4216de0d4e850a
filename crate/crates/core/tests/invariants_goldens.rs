mod common;

use abmod::catalog::*;
use abmod::functors::dual;
use abmod::invariants::*;
use abmod::lattice::Lattice;
use abmod::module::AbModule;
use abmod::series::Series;
use abmod::{AbError, Scalar};
use common::*;

const W: usize = 16;

fn sorted(mut v: Vec<Scalar>) -> Vec<Scalar> {
    v.sort_by(Scalar::lex_cmp);
    v
}

fn lattice(p: usize, shift: usize, gens: &[&[&str]]) -> Lattice {
    let raw: Vec<Vec<Series>> =
        gens.iter().map(|g| g.iter().map(|t| abmod::series::parse_series(t, W).unwrap()).collect()).collect();
    Lattice::normalize(p, shift, W, &raw).unwrap()
}

#[test]
fn saturation_of_rank3_example() {
    let e = rank3_example(W);
    let sat = saturate(&e).unwrap();
    // e_1, b^{-1} e_2, b^{-1} e_3 in frame 1 are b e_1, e_2, e_3.
    let expect = lattice(3, 1, &[&["b", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]]);
    assert!(sat.lattice.equals(&expect).unwrap());
    assert!(sat.saturated.is_simple_pole());
    assert_eq!(sat.lattice.quotient_dim(&Lattice::whole(3, W)).unwrap(), 2);
}

#[test]
fn saturation_of_e_lambda_mu() {
    let e = make_e_lambda_mu(&s(2), &q(1, 2), W);
    let sat = saturate(&e).unwrap().saturated;
    let expect = make_e_lambda(&s(1), W).direct_sum(&make_e_lambda(&q(-1, 2), W));
    assert!(isomorphic(&sat, &expect.truncate(sat.precision()), sat.precision()));
    let e = make_e_lambda_mu(&q(1, 3), &q(1, 3), W);
    let sat = saturate(&e).unwrap().saturated;
    let expect = make_e_lambda_n(&q(-2, 3), 0, W).unwrap();
    assert!(isomorphic(&sat, &expect.truncate(sat.precision()), sat.precision()));
}

#[test]
fn saturation_of_alpha_family() {
    for n in 1..=3usize {
        let l = q(1, 2);
        let e = make_e_lambda_mu_alpha(&l, n, &s(3), W).unwrap();
        let sat = saturate(&e).unwrap().saturated;
        let expect = make_e_lambda_n(&(&l - &s(n as i64 + 1)), n, W).unwrap();
        assert!(isomorphic(&sat, &expect.truncate(sat.precision()), sat.precision()), "n = {n}");
    }
}

#[test]
fn saturation_of_simple_pole_is_trivial() {
    let e = make_e_lambda_n(&s(1), 2, W).unwrap();
    let sat = saturate(&e).unwrap();
    assert_eq!(sat.steps, 0);
    assert!(sat.lattice.equals(&Lattice::whole(2, W)).unwrap());
}

#[test]
fn irregular_rank_one() {
    let e = module(&[&["1"]], W);
    assert!(matches!(saturate(&e), Err(AbError::NotRegular(_))));
    assert!(!is_regular(&e).unwrap());
}

#[test]
fn catalog_families_are_regular() {
    let l = q(1, 2);
    let family = [
        make_e_lambda(&l, W),
        make_e_lambda_n(&l, 2, W).unwrap(),
        make_e_lambda_mu(&l, &s(3), W),
        make_e_lambda_mu_alpha(&l, 2, &s(1), W).unwrap(),
        make_j_k(&l, 4, W + 8).unwrap(),
        make_f_rho(&l, 3, &q(1, 2), W).unwrap(),
    ];
    for e in &family {
        assert!(is_regular(e).unwrap());
    }
}

#[test]
fn delta_and_order() {
    let e = rank3_example(W);
    assert_eq!(delta_index(&e).unwrap(), 1);
    assert_eq!(regularity_order(&e).unwrap(), 2);
    for k in 1..=4usize {
        let j = make_j_k(&s(0), k, working_precision(k, 0)).unwrap();
        assert_eq!(delta_index(&j).unwrap(), k - 1);
        assert_eq!(regularity_order(&j).unwrap(), k - 1);
    }
    assert_eq!(delta_index(&make_e_lambda(&s(5), W)).unwrap(), 0);
    assert_eq!(regularity_order(&make_e_lambda_n(&s(0), 3, W).unwrap()).unwrap(), 0);
}

#[test]
fn biggest_simple_pole_of_e_lambda_mu() {
    let e = make_e_lambda_mu(&s(1), &q(2, 3), W);
    let (_, eb) = biggest_simple_pole(&e).unwrap();
    // y = e_1 and b·t = b e_2.
    assert!(eb.equals(&lattice(2, 0, &[&["1", "0"], &["0", "b"]])).unwrap());
    let sat = saturate(&e).unwrap().lattice;
    // b·E♯: the generators of E♯ read one frame lower.
    let gens: Vec<Vec<Series>> = sat.generators().to_vec();
    let b_sharp = Lattice::normalize(2, sat.shift() - 1, sat.precision(), &gens).unwrap();
    assert!(b_sharp.equals(&eb.truncate(sat.precision()).unwrap()).unwrap());
}

#[test]
fn biggest_simple_pole_of_simple_pole_module() {
    let e = make_e_lambda_n(&q(1, 4), 1, W).unwrap();
    let (_, eb) = biggest_simple_pole(&e).unwrap();
    assert!(eb.equals(&Lattice::whole(2, W)).unwrap());
}

#[test]
fn spectra() {
    assert_eq!(spectrum(&make_e_lambda(&q(1, 5), W)).unwrap(), vec![q(1, 5)]);
    let got = sorted(spectrum(&make_e_lambda_n(&q(1, 2), 3, W).unwrap()).unwrap());
    assert_eq!(got, vec![q(1, 2), q(7, 2)]);
    let e = make_e_lambda_n(&(&q(1, 2) + &Scalar::i()), 1, W).unwrap();
    let neg = sorted(spectrum(&e).unwrap().iter().map(|z| -z).collect());
    assert_eq!(sorted(spectrum(&dual(&e)).unwrap()), neg);
    assert!(matches!(spectrum(&make_e_lambda_mu(&s(1), &s(0), W)), Err(AbError::NotSimplePole)));
}

#[test]
fn irrational_residue_is_unsupported() {
    let e = module(&[&["0", "2*b"], &["b", "0"]], W);
    assert!(matches!(spectrum(&e), Err(AbError::UnsupportedSpectrum(_))));
}

#[test]
fn width_tables() {
    let j = make_j_k(&q(1, 3), 3, working_precision(3, 0)).unwrap();
    let t = width_table(&j).unwrap();
    assert_eq!(t.classes.len(), 1);
    let c = &t.classes[0];
    assert_eq!((c.min.clone(), c.max.clone(), c.width), (q(7, 3), q(1, 3), -2));
    let e = make_e_lambda(&q(1, 2), W).direct_sum(&make_e_lambda(&q(7, 2), W));
    assert_eq!(width_table(&e).unwrap().width(), 3);
    assert_eq!(width_table(&make_e_lambda(&s(9), W)).unwrap().width(), 0);
}

#[test]
fn alpha_values() {
    let e = make_e_lambda(&q(1, 2), W).direct_sum(&make_e_lambda(&s(-3), W));
    assert_eq!(alpha_invariant(&e).unwrap(), q(-5, 2));
    let e = make_e_lambda_mu(&q(1, 3), &s(2), W);
    assert_eq!(alpha_invariant(&e).unwrap(), q(4, 3));
    for k in 1..=4i64 {
        let j = make_j_k(&q(1, 2), k as usize, working_precision(k as usize, 0)).unwrap();
        assert_eq!(alpha_invariant(&j).unwrap(), &q(k, 2) + &s(k * (k - 1) / 2));
    }
}

#[test]
fn geometricity() {
    assert!(is_geometric(&make_e_lambda(&q(1, 2), W)).unwrap());
    assert!(!is_geometric(&make_e_lambda(&s(-1), W)).unwrap());
    // Saturation spectrum {0, 1}.
    let e = make_e_lambda_mu(&s(1), &s(2), W);
    assert_eq!(sorted(spectrum(&saturate(&e).unwrap().saturated).unwrap()), vec![s(0), s(1)]);
    assert!(!is_geometric(&e).unwrap());
}

#[test]
fn n_lambda_values() {
    let l = q(1, 2);
    assert_eq!(n_lambda(&make_e_lambda(&l, W), &l).unwrap(), 2);
    // λ − μ ∉ ℕ: the image already contains bE.
    for (mu, lam) in [(s(0), q(1, 2)), (s(2), s(0)), (s(1), s(-3))] {
        assert_eq!(n_lambda(&make_e_lambda(&mu, W), &lam).unwrap(), 1, "μ = {mu}, λ = {lam}");
    }
    // λ = μ + j: the obstruction sits at b^{j+1}.
    for j in 0..4i64 {
        let mu = q(1, 3);
        let lam = &mu + &s(j);
        assert_eq!(n_lambda(&make_e_lambda(&mu, W), &lam).unwrap(), j as usize + 2);
    }
}

#[test]
fn n_lambda_respects_bound() {
    for seed in 0..6 {
        let e = random_regular(2, 40 + seed, W).unwrap();
        let d = delta_index(&e).unwrap() as i64;
        let flat = spectrum(&biggest_simple_pole(&e).unwrap().0).unwrap();
        for z in &flat {
            let min = flat.iter().filter(|x| x.class_rep() == z.class_rep()).map(|x| x.re().clone()).min().unwrap();
            let gap = (z.re() - &min).to_integer();
            let bound: i64 = i64::try_from(gap).unwrap() + d + 2;
            assert!(n_lambda(&e, z).unwrap() as i64 <= bound, "seed {seed}");
        }
    }
}

#[test]
fn n0_values() {
    for k in 1..=4usize {
        let j = make_j_k(&s(2), k, working_precision(k, 0)).unwrap();
        assert_eq!(n0_bound(&j).unwrap(), k as i64 + 1);
    }
    assert_eq!(n0_bound(&make_e_lambda_mu(&s(3), &q(1, 2), W)).unwrap(), 3);
    assert_eq!(n0_bound(&make_e_lambda(&s(3), W)).unwrap(), 2);
}

#[test]
fn f_rho_has_shifted_eigen_element() {
    // ε = e_k + Σ ρ^{k−j} b^{k−j} e_j.
    for k in 2..=4usize {
        let (l, rho) = (q(1, 2), q(1, 3));
        let f = make_f_rho(&l, k, &rho, W).unwrap();
        let coords: Vec<Series> = (0..k)
            .map(|j| {
                let d = k - 1 - j;
                let mut c = Scalar::one();
                for _ in 0..d {
                    c = &c * &rho;
                }
                Series::monomial(c, d, W)
            })
            .collect();
        let eps = abmod::module::Element::new(coords, 0);
        let (exp, _) = abmod::functors::eigen_exponent(&f, &eps).unwrap();
        assert_eq!(exp, &(&l + &s(k as i64 - 1)) + &rho);
    }
}

#[test]
fn working_precision_defaults() {
    assert_eq!(working_precision(2, 0), 16);
    assert_eq!(working_precision(2, 20), 40);
}

#[test]
fn module_from_rank_one_series() {
    let e = AbModule::from_entries(&[vec![Series::from_ints(&[0, 2, 1], W)]]).unwrap();
    assert!(e.is_simple_pole());
    assert_eq!(spectrum(&e).unwrap(), vec![s(2)]);
}
