#![allow(dead_code)]

use abmod::module::AbModule;
use abmod::{Scalar, Series};

pub fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::from_ratio(n, d)
}

/// Module from a table of series expressions (row `i`, column `j`).
pub fn module(rows: &[&[&str]], w: usize) -> AbModule {
    let entries: Vec<Vec<Series>> = rows
        .iter()
        .map(|r| r.iter().map(|t| abmod::series::parse_series(t, w).unwrap()).collect())
        .collect();
    AbModule::from_entries(&entries).unwrap()
}

/// `a e1 = e2, a e2 = b e3, a e3 = 0`.
pub fn rank3_example(w: usize) -> AbModule {
    module(&[&["0", "0", "0"], &["1", "0", "0"], &["0", "b", "0"]], w)
}

pub fn isomorphic(e: &AbModule, f: &AbModule, w: usize) -> bool {
    abmod::truncation::module_iso(&e.truncate(w), &f.truncate(w), w).unwrap().is_some()
}

use abmod::linalg::Matrix;
use abmod::module::SeriesMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small(rng: &mut ChaCha8Rng, bound: i64) -> Scalar {
    Scalar::from_int(rng.gen_range(-bound..=bound))
}

/// Random invertible constant integer matrix.
pub fn random_invertible(p: usize, rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let rows = (0..p).map(|_| (0..p).map(|_| small(rng, 2)).collect()).collect();
        let m = Matrix::from_rows(rows);
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// Random element of `GL_p(ℂ[[b]])` with polynomial entries of degree ≤ 3.
pub fn random_base_change(p: usize, w: usize, rng: &mut ChaCha8Rng) -> SeriesMatrix {
    let mut coeffs = vec![random_invertible(p, rng)];
    for _ in 1..w.min(4) {
        let rows = (0..p)
            .map(|_| (0..p).map(|_| if rng.gen_bool(0.4) { small(rng, 2) } else { Scalar::zero() }).collect())
            .collect();
        coeffs.push(Matrix::from_rows(rows));
    }
    SeriesMatrix::from_coeffs(p, p, coeffs, w)
}

pub fn conjugate(e: &AbModule, rng: &mut ChaCha8Rng) -> AbModule {
    let p = random_base_change(e.rank(), e.precision(), rng);
    e.base_change(&p).unwrap()
}

/// Random rational from a grid with denominators in {1, 2, 3}.
pub fn random_exponent(rng: &mut ChaCha8Rng) -> Scalar {
    let d = [1i64, 2, 3][rng.gen_range(0..3)];
    Scalar::from_ratio(rng.gen_range(-3 * d..=3 * d), d)
}

/// Random simple-pole module whose residue has a rational spectrum.
pub fn random_simple_pole(p: usize, w: usize, rng: &mut ChaCha8Rng) -> AbModule {
    let mut d = Matrix::zeros(p, p);
    for i in 0..p {
        d[(i, i)] = random_exponent(rng);
        for j in i + 1..p {
            if rng.gen_bool(0.5) {
                d[(i, j)] = small(rng, 2);
            }
        }
    }
    let u = random_invertible(p, rng);
    let r = u.mul(&d).mul(&u.inverse().unwrap());
    let mut coeffs = vec![Matrix::zeros(p, p), r];
    for _ in 2..w {
        let rows = (0..p)
            .map(|_| (0..p).map(|_| if rng.gen_bool(0.3) { small(rng, 2) } else { Scalar::zero() }).collect())
            .collect();
        coeffs.push(Matrix::from_rows(rows));
    }
    AbModule::new(SeriesMatrix::from_coeffs(p, p, coeffs, w)).unwrap()
}

/// Random regular module: a triangular extension mixed by a base change.
pub fn random_regular_mixed(p: usize, seed: u64, w: usize) -> AbModule {
    let e = abmod::catalog::random_regular(p, seed, w).unwrap();
    conjugate(&e, &mut rng(seed ^ 0x9e37_79b9))
}
