//! Univariate polynomials over ℚ(i) and exact root extraction.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{AbError, Result};
use crate::scalar::Scalar;

/// Ascending coefficients; trailing zeros are trimmed by the helpers below.
pub type Poly = Vec<Scalar>;

pub fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Scalar::is_zero) {
        p.pop();
    }
    p
}

pub fn degree(p: &Poly) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn eval(p: &Poly, x: &Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for c in p.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

pub fn derivative(p: &Poly) -> Poly {
    trim(p.iter().enumerate().skip(1).map(|(k, c)| c.scale_int(k as i64)).collect())
}

pub fn monic(p: &Poly) -> Poly {
    let p = trim(p.clone());
    match p.last() {
        None => p,
        Some(lead) => {
            let inv = lead.inv().expect("nonzero leading coefficient");
            p.iter().map(|c| c * &inv).collect()
        }
    }
}

/// Quotient and remainder of `a / b`.
pub fn divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let b = trim(b.clone());
    let db = degree(&b).expect("division by zero polynomial");
    let mut r = trim(a.clone());
    let lead_inv = b[db].inv().expect("nonzero");
    let mut q = vec![Scalar::zero(); r.len().saturating_sub(db)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let f = &r[dr] * &lead_inv;
        for (k, c) in b.iter().enumerate() {
            if !c.is_zero() {
                r[dr - db + k] -= &(&f * c);
            }
        }
        q[dr - db] = f;
        r = trim(r);
    }
    (trim(q), r)
}

pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let mut x = trim(a.clone());
    let mut y = trim(b.clone());
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    monic(&x)
}

/// Roots with multiplicities of a nonzero polynomial, all of which must lie
/// in ℚ(i); otherwise `UnsupportedSpectrum`. Roots are sorted
/// lexicographically by (re, im).
pub fn roots(p: &Poly) -> Result<Vec<(Scalar, usize)>> {
    let f = monic(p);
    let n = degree(&f).ok_or_else(|| AbError::BadParameter("zero polynomial".into()))?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let g = {
        let d = gcd(&f, &derivative(&f));
        monic(&divrem(&f, &d).0)
    };
    let simple = squarefree_roots(&g)?;
    let mut out = Vec::new();
    for r in simple {
        let lin = vec![-&r, Scalar::one()];
        let mut m = 0;
        let mut cur = f.clone();
        loop {
            let (q, rem) = divrem(&cur, &lin);
            if !rem.is_empty() {
                break;
            }
            m += 1;
            cur = q;
        }
        out.push((r, m));
    }
    out.sort_by(|a, b| a.0.lex_cmp(&b.0));
    Ok(out)
}

/// Distinct roots of a monic squarefree polynomial.
fn squarefree_roots(g: &Poly) -> Result<Vec<Scalar>> {
    let n = degree(g).unwrap_or(0);
    // h(y) = d^n g(y/d) is monic with Gaussian-integer coefficients.
    let d = g.iter().fold(BigInt::one(), |acc, c| acc.lcm(&c.denominator_lcm()));
    let dq = Scalar::from_real(BigRational::from_integer(d.clone()));
    let mut h: Poly = Vec::with_capacity(n + 1);
    let mut pow = Scalar::one();
    for k in (0..=n).rev() {
        h.push(&g[k] * &pow);
        pow = &pow * &dq;
    }
    h.reverse();
    let mut found = Vec::new();
    let mut cur = h;
    for _ in 0..4 {
        let deg = degree(&cur).unwrap_or(0);
        if deg == 0 {
            break;
        }
        let approx = durand_kerner(&cur);
        let mut progress = false;
        for z in approx {
            let cand = Scalar::from_real(BigRational::from_integer(round(z.re)))
                + Scalar::new(BigRational::from_integer(0.into()), BigRational::from_integer(round(z.im)));
            if found.contains(&cand) {
                continue;
            }
            if eval(&cur, &cand).is_zero() {
                cur = divrem(&cur, &vec![-&cand, Scalar::one()]).0;
                found.push(cand);
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    if degree(&cur).unwrap_or(0) > 0 {
        return Err(AbError::UnsupportedSpectrum(format!(
            "characteristic polynomial has a factor of degree {} without roots in Q(i)",
            degree(&cur).unwrap_or(0)
        )));
    }
    Ok(found.into_iter().map(|y| &y / &dq).collect())
}

fn round(x: f64) -> BigInt {
    let r = x.round();
    if r.abs() < 9.0e15 {
        BigInt::from(r as i64)
    } else {
        BigInt::from(0)
    }
}

/// Simultaneous approximation of all roots of a monic polynomial.
fn durand_kerner(p: &Poly) -> Vec<Complex64> {
    let n = degree(p).unwrap_or(0);
    let c: Vec<Complex64> = p
        .iter()
        .map(|s| {
            let (re, im) = s.to_f64_pair();
            Complex64::new(re, im)
        })
        .collect();
    let horner = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
    let radius = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius.min(1e6)).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 0.0);
            }
            let step = horner(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-12 {
            break;
        }
    }
    z
}
