//! Saturation, regularity and the numerical invariants built on them.

use crate::error::{AbError, Result};
use crate::functors::dual;
use crate::lattice::{module_on_lattice, Lattice};
use crate::linalg::{Matrix, Subspace};
use crate::module::{AbModule, SeriesMatrix};
use crate::poly;
use crate::scalar::Scalar;
use crate::series::Series;
use crate::truncation::truncate;

/// Default working precision for a module of the given rank.
pub fn working_precision(rank: usize, requested: usize) -> usize {
    (4 * rank + 8).max(2 * requested)
}

#[derive(Clone, Debug)]
pub struct SaturationResult {
    /// `E♯` as a simple-pole module on the Hermite basis of `lattice`.
    pub saturated: AbModule,
    /// `E♯ ⊂ b^{-steps} E`.
    pub lattice: Lattice,
    pub steps: usize,
}

/// `Φ_{k+1}` from `Φ_k` (frame `k`), in frame `k+1` at precision `w`.
fn next_phi(e: &AbModule, phi: &Lattice, w: usize) -> Result<Lattice> {
    let p = e.rank();
    let k = phi.shift();
    let g = SeriesMatrix::from_columns(
        &phi.generators().iter().map(|c| c.iter().map(|s| s.with_precision(w)).collect()).collect::<Vec<_>>(),
        p,
    );
    let mut gens: Vec<Vec<Series>> = g.shift_up(1).truncate(w).columns();
    gens.extend(e.a_on_coords(&g, k).truncate(w).columns());
    Lattice::normalize(p, k + 1, w, &gens)
}

/// Iterate `Φ_{k+1} = Φ_k + (b^{-1}a)Φ_k` until it stabilizes.
pub fn saturate(e: &AbModule) -> Result<SaturationResult> {
    let p = e.rank();
    let w = e.precision();
    if w < 2 * p + 2 {
        return Err(AbError::PrecisionExhausted(format!(
            "saturation of a rank {p} module needs precision at least {}",
            2 * p + 2
        )));
    }
    let mut phi = Lattice::whole(p, w);
    for k in 0..p {
        let next = next_phi(e, &phi, w)?;
        if next.equals(&phi)? {
            let saturated = module_on_lattice(e, &phi)?;
            return Ok(SaturationResult { saturated, lattice: phi, steps: k });
        }
        phi = next;
    }
    Err(AbError::NotRegular(format!("saturation did not stabilize within {p} steps")))
}

pub fn is_regular(e: &AbModule) -> Result<bool> {
    match saturate(e) {
        Ok(_) => Ok(true),
        Err(AbError::NotRegular(_)) => Ok(false),
        Err(err) => Err(err),
    }
}

/// Least `m` with `E♯ ⊂ b^{-m}E`.
pub fn delta_index(e: &AbModule) -> Result<usize> {
    Ok(saturate(e)?.lattice.index_over_whole())
}

/// Least `k` with `a^{k+1}E ⊂ Σ_{t≤k} a^t b^{k-t+1} E`.
pub fn regularity_order(e: &AbModule) -> Result<usize> {
    let p = e.rank();
    let w = e.precision();
    // powers[t][i] = a^t e_i
    let mut powers: Vec<Vec<crate::module::Element>> = vec![(0..p).map(|i| e.basis_element(i)).collect()];
    for k in 0..p {
        let next: Vec<_> = powers[k].iter().map(|x| e.apply_a(x)).collect::<Result<_>>()?;
        powers.push(next);
        if k + 3 > w {
            return Err(AbError::PrecisionExhausted("regularity order needs more precision".into()));
        }
        let mut gens = Vec::new();
        for t in 0..=k {
            for x in &powers[t] {
                gens.push(x.coords.iter().map(|s| s.shift_up(k - t + 1).truncate(w)).collect::<Vec<_>>());
            }
        }
        let psi = Lattice::normalize(p, 0, w, &gens)?;
        let mut all = true;
        for x in &powers[k + 1] {
            if !psi.contains_coords(&x.coords, 0)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(k);
        }
    }
    Err(AbError::NotRegular(format!("no regularity relation up to order {}", p - 1)))
}

/// The biggest simple-pole submodule `E^b`, obtained as the dual lattice of
/// the saturation of `E*`.
pub fn biggest_simple_pole(e: &AbModule) -> Result<(AbModule, Lattice)> {
    let p = e.rank();
    let w = e.precision();
    let sat = saturate(&dual(e))?;
    let k = sat.lattice.shift();
    let gs = sat.lattice.generators();
    let lattice = if k == 0 {
        Lattice::whole(p, w)
    } else {
        // X ∈ E^b  ⇔  Σ_i G*_i(−b) X_i ≡ 0 mod b^k for every generator G*.
        let flipped: Vec<Vec<Series>> = gs.iter().map(|c| c.iter().map(Series::negate_variable).collect()).collect();
        let n = p * k;
        let mut sys = Matrix::zeros(gs.len() * k, n);
        for (g, col) in flipped.iter().enumerate() {
            for order in 0..k {
                for i in 0..p {
                    for j in 0..=order {
                        let c = col[i].coeff(order - j);
                        if !c.is_zero() {
                            sys[(g * k + order, j * p + i)] += c;
                        }
                    }
                }
            }
        }
        let mut gens: Vec<Vec<Series>> = sys
            .kernel()
            .into_iter()
            .map(|v| (0..p).map(|i| Series::from_coeffs((0..k).map(|j| v[j * p + i].clone()).collect(), w)).collect())
            .collect();
        for i in 0..p {
            gens.push((0..p).map(|r| if r == i { Series::monomial(Scalar::one(), k, w) } else { Series::zero(w) }).collect());
        }
        Lattice::normalize(p, 0, w, &gens)?
    };
    let module = module_on_lattice(e, &lattice)?;
    Ok((module, lattice))
}

/// Eigenvalues of the residue of a simple-pole module, sorted, with repetition.
pub fn spectrum(e: &AbModule) -> Result<Vec<Scalar>> {
    let r = e.residue()?;
    let roots = poly::roots(&r.charpoly())?;
    let mut out = Vec::new();
    for (z, m) in roots {
        for _ in 0..m {
            out.push(z.clone());
        }
    }
    Ok(out)
}

/// Class of `z` modulo ℤ, and comparison inside a class.
fn real_cmp(a: &Scalar, b: &Scalar) -> std::cmp::Ordering {
    a.re().cmp(b.re())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassWidth {
    pub class: Scalar,
    pub min: Scalar,
    pub max: Scalar,
    pub width: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidthTable {
    pub classes: Vec<ClassWidth>,
}

impl WidthTable {
    /// `L(E)`, the maximum width over the classes present.
    pub fn width(&self) -> i64 {
        self.classes.iter().map(|c| c.width).max().unwrap_or(0)
    }

    pub fn class_of(&self, z: &Scalar) -> Option<&ClassWidth> {
        let rep = z.class_rep();
        self.classes.iter().find(|c| c.class == rep)
    }
}

fn int_of(d: &Scalar) -> i64 {
    d.to_i64().expect("difference inside a class is a small integer")
}

/// Per-class extremal exponents: minima from `S(E^b)`, maxima from `S(E♯)`.
pub fn width_table(e: &AbModule) -> Result<WidthTable> {
    let sharp = spectrum(&saturate(e)?.saturated)?;
    let flat = spectrum(&biggest_simple_pole(e)?.0)?;
    Ok(width_table_from_spectra(&flat, &sharp))
}

pub fn width_table_from_spectra(flat: &[Scalar], sharp: &[Scalar]) -> WidthTable {
    let mut reps: Vec<Scalar> = flat.iter().chain(sharp).map(Scalar::class_rep).collect();
    reps.sort_by(Scalar::lex_cmp);
    reps.dedup();
    let mut classes = Vec::new();
    for rep in reps {
        let pick = |s: &[Scalar]| -> Vec<Scalar> { s.iter().filter(|z| z.class_rep() == rep).cloned().collect() };
        let lo = pick(flat);
        let hi = pick(sharp);
        let min = lo.iter().min_by(|a, b| real_cmp(a, b)).or_else(|| hi.iter().min_by(|a, b| real_cmp(a, b)));
        let min = min.cloned().expect("class present");
        let max = hi.iter().max_by(|a, b| real_cmp(a, b)).cloned().unwrap_or_else(|| min.clone());
        let width = int_of(&(&max - &min));
        classes.push(ClassWidth { class: rep, min, max, width });
    }
    WidthTable { classes }
}

/// `trace(b^{-1}a on E♯/bE♯) + dim(E♯/E)`.
pub fn alpha_invariant(e: &AbModule) -> Result<Scalar> {
    let sat = saturate(e)?;
    let tr = sat.saturated.residue()?.trace();
    let d = sat.lattice.quotient_dim(&Lattice::whole(e.rank(), e.precision()))?;
    Ok(&tr + &Scalar::from_int(d as i64))
}

/// Every exponent of the saturation is a strictly positive rational.
pub fn is_geometric(e: &AbModule) -> Result<bool> {
    let s = spectrum(&saturate(e)?.saturated)?;
    Ok(s.iter().all(|z| z.is_real() && z.re() > &num_rational::BigRational::from_integer(0.into())))
}

/// `or(E) + L(E) + rank(E) + 1`.
pub fn n0_bound(e: &AbModule) -> Result<i64> {
    let or = regularity_order(e)? as i64;
    let l = width_table(e)?.width();
    Ok(or + l + e.rank() as i64 + 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NLambda {
    pub n: usize,
    /// The truncation level came from the heuristic used when the class of
    /// `λ` does not occur in the spectrum.
    pub fallback: bool,
    pub levels: (usize, usize),
}

/// Smallest `N` with `b^j e_i` in the image of `a − λb` on `E/b^W E` for all
/// `N ≤ j < W`, or `W` if there is none.
fn n_lambda_at(e: &AbModule, lambda: &Scalar, w: usize) -> Result<usize> {
    let q = truncate(e, w)?;
    let op = q.a.sub(&q.b.scale(lambda));
    let image = Subspace::span(q.dim, (0..q.dim).map(|j| op.column(j)).collect());
    let p = e.rank();
    let mut n = w;
    for j in (0..w).rev() {
        let ok = (0..p).all(|i| image.contains(&crate::linalg::unit(q.dim, j * p + i)));
        if !ok {
            break;
        }
        n = j;
    }
    Ok(n)
}

/// Least `N` with `b^N E ⊂ (a − λb)E`.
pub fn n_lambda(e: &AbModule, lambda: &Scalar) -> Result<usize> {
    Ok(n_lambda_detailed(e, lambda)?.n)
}

pub fn n_lambda_detailed(e: &AbModule, lambda: &Scalar) -> Result<NLambda> {
    let delta = delta_index(e)? as i64;
    let p = e.rank() as i64;
    let (eb, _) = biggest_simple_pole(e)?;
    let flat = spectrum(&eb)?;
    let class_min = flat
        .iter()
        .filter(|z| z.class_rep() == lambda.class_rep())
        .min_by(|a, b| real_cmp(a, b))
        .cloned();
    let (bound, fallback) = match class_min {
        Some(m) => (int_of(&(lambda - &m)) + delta + 2, false),
        None => (delta + 2 + p, true),
    };
    let mut w = (bound.max(1) + 2) as usize;
    let limit = w + 3 * e.rank() + 6;
    while w < limit {
        if w + 1 > e.precision() {
            return Err(AbError::PrecisionExhausted(format!("n_lambda needs precision {}", w + 1)));
        }
        let n1 = n_lambda_at(e, lambda, w)?;
        let n2 = n_lambda_at(e, lambda, w + 1)?;
        if n1 == n2 && n1 < w {
            return Ok(NLambda { n: n1, fallback, levels: (w, w + 1) });
        }
        w += 1;
    }
    Err(AbError::PrecisionExhausted("n_lambda did not stabilize".into()))
}
