//! Finite quotients `E/b^N E`, isomorphism search and lifting of truncated
//! isomorphisms.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{AbError, Result};
use crate::invariants::n0_bound;
use crate::linalg::{Matrix, SparseEchelon, SparseRow, Subspace};
use crate::module::{AbModule, SeriesMatrix};
use crate::scalar::Scalar;

/// `E/b^N E` with basis `b^j e_i` at index `j·rank + i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbQuotient {
    pub rank: usize,
    pub n: usize,
    pub dim: usize,
    pub a: Matrix,
    pub b: Matrix,
}

impl FiniteAbQuotient {
    /// `AB − BA − B²`, zero for every genuine quotient.
    pub fn relation_defect(&self) -> Matrix {
        let ab = self.a.mul(&self.b);
        let ba = self.b.mul(&self.a);
        ab.sub(&ba).sub(&self.b.mul(&self.b))
    }

    fn has_standard_shift(&self) -> bool {
        let p = self.rank;
        (0..self.dim).all(|c| {
            (0..self.dim).all(|r| {
                let expect = c + p == r;
                if expect {
                    self.b[(r, c)].is_one()
                } else {
                    self.b[(r, c)].is_zero()
                }
            })
        })
    }

    /// The structure matrix modulo `b^N`, read off the first block column of `A`.
    fn structure_matrix(&self) -> SeriesMatrix {
        let p = self.rank;
        let coeffs = (0..self.n)
            .map(|m| {
                let mut c = Matrix::zeros(p, p);
                for k in 0..p {
                    for i in 0..p {
                        c[(k, i)] = self.a[(m * p + k, i)].clone();
                    }
                }
                c
            })
            .collect();
        SeriesMatrix::from_coeffs(p, p, coeffs, self.n)
    }
}

pub fn truncate(e: &AbModule, n: usize) -> Result<FiniteAbQuotient> {
    if n == 0 {
        return Err(AbError::BadParameter("truncation level must be positive".into()));
    }
    if n > e.precision() {
        return Err(AbError::PrecisionExhausted(format!(
            "truncation at {n} exceeds precision {}",
            e.precision()
        )));
    }
    let p = e.rank();
    let dim = p * n;
    let mut a = Matrix::zeros(dim, dim);
    let mut b = Matrix::zeros(dim, dim);
    for j in 0..n {
        for i in 0..p {
            let col = j * p + i;
            for m in 0..n - j {
                let c = e.matrix().coeff(m);
                for k in 0..p {
                    if !c[(k, i)].is_zero() {
                        a[((j + m) * p + k, col)] += &c[(k, i)];
                    }
                }
            }
            if j + 1 < n {
                if j > 0 {
                    a[((j + 1) * p + i, col)] += &Scalar::from_int(j as i64);
                }
                b[((j + 1) * p + i, col)] = Scalar::one();
            }
        }
    }
    Ok(FiniteAbQuotient { rank: p, n, dim, a, b })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intertwiner {
    /// `T` with `T A = A′ T` and `T B = B′ T`.
    Quotient(Matrix),
    /// `P` with `P M = M′ P + b² P′` modulo its precision.
    Module(SeriesMatrix),
}

/// Linear system for morphisms `E → E′` modulo `b^w` whose coefficients
/// below order `fixed.precision()` are prescribed.
struct MorphismSystem {
    p: usize,
    w: usize,
    start: usize,
    echelon: SparseEchelon,
}

impl MorphismSystem {
    /// Unknowns are ordered from the highest order down, so that pivots
    /// fall on high orders and low-order coefficients stay free.
    fn index(&self, k: usize, i: usize, j: usize) -> usize {
        (self.w - 1 - k) * self.p * self.p + i * self.p + j
    }

    fn build(e: &AbModule, f: &AbModule, w: usize, fixed: Option<&SeriesMatrix>) -> Result<MorphismSystem> {
        let p = e.rank();
        if f.rank() != p {
            return Err(AbError::BadParameter("ranks differ".into()));
        }
        if e.precision() < w || f.precision() < w {
            return Err(AbError::PrecisionExhausted(format!("morphism system needs precision {w}")));
        }
        let start = fixed.map_or(0, SeriesMatrix::precision).min(w);
        let ncols = p * p * (w - start) + usize::from(fixed.is_some());
        let mut sys = MorphismSystem { p, w, start, echelon: SparseEchelon::new(ncols) };
        let rhs = ncols.wrapping_sub(1);
        let me = e.matrix();
        let mf = f.matrix();
        for s in 0..w {
            for i in 0..p {
                for j in 0..p {
                    let mut row: HashMap<usize, Scalar> = HashMap::new();
                    let mut constant = Scalar::zero();
                    let mut add = |k: usize, a: usize, b: usize, c: Scalar, row: &mut HashMap<usize, Scalar>| {
                        if c.is_zero() {
                            return;
                        }
                        if k < start {
                            let val = &fixed.expect("fixed part").coeff(k)[(a, b)];
                            if !val.is_zero() {
                                constant += &(&c * val);
                            }
                        } else {
                            *row.entry(sys.index(k, a, b)).or_default() += &c;
                        }
                    };
                    for k in 0..=s {
                        let m = s - k;
                        let cm = me.coeff(m);
                        let cf = mf.coeff(m);
                        for l in 0..p {
                            add(k, i, l, cm[(l, j)].clone(), &mut row);
                            add(k, l, j, -&cf[(i, l)], &mut row);
                        }
                    }
                    if s >= 2 {
                        add(s - 1, i, j, Scalar::from_int(-((s - 1) as i64)), &mut row);
                    }
                    let mut r: SparseRow = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                    if !constant.is_zero() {
                        r.push((rhs, constant));
                    }
                    sys.echelon.add_row(r);
                }
            }
        }
        Ok(sys)
    }

    fn to_matrix(&self, x: &[Scalar], fixed: Option<&SeriesMatrix>) -> SeriesMatrix {
        let p = self.p;
        let coeffs = (0..self.w)
            .map(|k| {
                if k < self.start {
                    fixed.expect("fixed").coeff(k).clone()
                } else {
                    let mut m = Matrix::zeros(p, p);
                    for i in 0..p {
                        for j in 0..p {
                            m[(i, j)] = x[self.index(k, i, j)].clone();
                        }
                    }
                    m
                }
            })
            .collect();
        SeriesMatrix::from_coeffs(p, p, coeffs, self.w)
    }
}

/// Dense multivariate polynomials keyed by exponent vectors.
type MPoly = HashMap<Vec<u32>, Scalar>;

fn mpoly_mul(a: &MPoly, b: &MPoly) -> MPoly {
    let mut out: MPoly = HashMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_default() += &(ca * cb);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// `det(Σ c_i A_i)` as a polynomial in the `c_i`.
fn symbolic_det(mats: &[Matrix]) -> MPoly {
    let d = mats.len();
    let p = mats[0].rows();
    let entry = |i: usize, j: usize| -> MPoly {
        let mut m: MPoly = HashMap::new();
        for (v, a) in mats.iter().enumerate() {
            if !a[(i, j)].is_zero() {
                let mut e = vec![0u32; d];
                e[v] = 1;
                m.insert(e, a[(i, j)].clone());
            }
        }
        m
    };
    let mut f: Vec<MPoly> = vec![HashMap::new(); 1 << p];
    f[0].insert(vec![0u32; d], Scalar::one());
    for s in 0..(1usize << p) {
        if f[s].is_empty() {
            continue;
        }
        let row = s.count_ones() as usize;
        if row == p {
            continue;
        }
        for j in 0..p {
            if s & (1 << j) != 0 {
                continue;
            }
            let e = entry(row, j);
            if e.is_empty() {
                continue;
            }
            let above = (s >> (j + 1)).count_ones();
            let mut term = mpoly_mul(&f[s], &e);
            if above % 2 == 1 {
                for v in term.values_mut() {
                    *v = -v.clone();
                }
            }
            let t = s | (1 << j);
            for (k, v) in term {
                *f[t].entry(k).or_default() += &v;
            }
            f[t].retain(|_, v| !v.is_zero());
        }
    }
    f[(1 << p) - 1].clone()
}

fn combine(mats: &[Matrix], c: &[Scalar]) -> Matrix {
    let mut m = Matrix::zeros(mats[0].rows(), mats[0].cols());
    for (a, x) in mats.iter().zip(c) {
        if !x.is_zero() {
            m.add_assign(&a.scale(x));
        }
    }
    m
}

/// Coefficients `c` with `det(Σ c_i A_i) ≠ 0`, or `None` when every
/// combination is singular.
fn find_invertible_combination(mats: &[Matrix]) -> Option<Vec<Scalar>> {
    if mats.is_empty() {
        return None;
    }
    let d = mats.len();
    let p = mats[0].rows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_edab);
    for _ in 0..24 {
        let c: Vec<Scalar> = (0..d).map(|_| Scalar::from_int(rng.gen_range(-1000..=1000))).collect();
        if !combine(mats, &c).det().is_zero() {
            return Some(c);
        }
    }
    if d > 6 || p > 6 {
        return None;
    }
    let det = symbolic_det(mats);
    if det.is_empty() {
        return None;
    }
    // A nonzero polynomial of degree ≤ p does not vanish on all of {0..p}^d.
    let total = (p + 1).pow(d as u32);
    for mut code in 0..total {
        let c: Vec<Scalar> = (0..d)
            .map(|_| {
                let v = code % (p + 1);
                code /= p + 1;
                Scalar::from_int(v as i64)
            })
            .collect();
        if !combine(mats, &c).det().is_zero() {
            return Some(c);
        }
    }
    None
}

fn lin_comb(vectors: &[&Vec<Scalar>], c: &[Scalar]) -> Vec<Scalar> {
    let n = vectors[0].len();
    let mut out = vec![Scalar::zero(); n];
    for (v, x) in vectors.iter().zip(c) {
        if x.is_zero() {
            continue;
        }
        for (o, y) in out.iter_mut().zip(v.iter()) {
            if !y.is_zero() {
                *o += &(x * y);
            }
        }
    }
    out
}

/// A verified isomorphism `E → E′` modulo `b^w` (columns of `P` are the
/// images of the basis of `E`), or `None` when none exists.
pub fn module_iso(e: &AbModule, f: &AbModule, w: usize) -> Result<Option<SeriesMatrix>> {
    let sys = MorphismSystem::build(e, f, w, None)?;
    let p = sys.p;
    let from = sys.index(0, 0, 0);
    let tails = sys.echelon.tail_kernel(from);
    let mats: Vec<Matrix> =
        tails.iter().map(|v| Matrix::from_rows((0..p).map(|r| v[r * p..(r + 1) * p].to_vec()).collect())).collect();
    let chosen: Vec<&Vec<Scalar>> = tails.iter().collect();
    let Some(c) = find_invertible_combination(&mats) else { return Ok(None) };
    let x = sys.echelon.extend_tail(from, &lin_comb(&chosen, &c));
    let pm = sys.to_matrix(&x, None);
    if !AbModule::intertwining_defect(e, f, &pm).truncate(w).is_zero() || pm.coeff(0).det().is_zero() {
        return Err(AbError::HypothesisViolated("isomorphism failed verification".into()));
    }
    Ok(Some(pm))
}

/// `T` on `E/b^N` induced by `P` (columns `b^j P e_i`).
pub fn quotient_map_from_series(p: &SeriesMatrix, n: usize) -> Matrix {
    let r = p.rows();
    let mut t = Matrix::zeros(r * n, r * n);
    for j in 0..n {
        for i in 0..r {
            for m in 0..n - j {
                let c = p.coeff(m);
                for k in 0..r {
                    if !c[(k, i)].is_zero() {
                        t[((j + m) * r + k, j * r + i)] = c[(k, i)].clone();
                    }
                }
            }
        }
    }
    t
}

/// An invertible `T` intertwining the actions of `a` and `b`, or `None`.
pub fn quotient_iso(q: &FiniteAbQuotient, q2: &FiniteAbQuotient) -> Option<Matrix> {
    if q.dim != q2.dim {
        return None;
    }
    if q.has_standard_shift() && q2.has_standard_shift() && q.rank == q2.rank {
        let e = AbModule::new(q.structure_matrix()).ok()?;
        let f = AbModule::new(q2.structure_matrix()).ok()?;
        let p = module_iso(&e, &f, q.n).ok()??;
        let t = quotient_map_from_series(&p, q.n);
        return verify_quotient_iso(q, q2, &t).then_some(t);
    }
    let n = q.dim;
    let idx = |r: usize, c: usize| r * n + c;
    let mut ech = SparseEchelon::new(n * n);
    for (x, y) in [(&q.a, &q2.a), (&q.b, &q2.b)] {
        for i in 0..n {
            for j in 0..n {
                // (T X − Y T)_{ij}
                let mut row: HashMap<usize, Scalar> = HashMap::new();
                for k in 0..n {
                    if !x[(k, j)].is_zero() {
                        *row.entry(idx(i, k)).or_default() += &x[(k, j)];
                    }
                    if !y[(i, k)].is_zero() {
                        *row.entry(idx(k, j)).or_default() -= &y[(i, k)];
                    }
                }
                ech.add_row(row.into_iter().collect());
            }
        }
    }
    let kernel = ech.kernel();
    let mats: Vec<Matrix> = kernel
        .iter()
        .map(|v| Matrix::from_rows((0..n).map(|r| v[r * n..(r + 1) * n].to_vec()).collect()))
        .collect();
    let c = find_invertible_combination(&mats)?;
    let t = combine(&mats, &c);
    verify_quotient_iso(q, q2, &t).then_some(t)
}

fn verify_quotient_iso(q: &FiniteAbQuotient, q2: &FiniteAbQuotient, t: &Matrix) -> bool {
    t.mul(&q.a) == q2.a.mul(t) && t.mul(&q.b) == q2.b.mul(t) && !t.det().is_zero()
}

/// Lowest order at which some solution of the homogeneous constrained
/// system is nonzero.
fn lowest_homogeneous_order(sys: &MorphismSystem) -> Option<usize> {
    let p = sys.p;
    sys.echelon
        .homogeneous_kernel_with_rhs_column()
        .iter()
        .filter_map(|h| (sys.start..sys.w).find(|&k| (0..p * p).any(|t| !h[sys.index(k, t / p, t % p)].is_zero())))
        .min()
}

/// Extend `φ` (known modulo `b^N`) to a morphism modulo `b^w`. The lift must
/// be unique modulo `b^{w-N}`. Solutions of the truncated system that only
/// exist because equations of order `≥ w` are missing sit in the top orders
/// and move up with the level; when one shows up below `w − N` the system is
/// solved again at `w + 2·rank + N` (or the highest level the precision of
/// the modules allows) and the homogeneous part is inspected there.
pub fn lift_truncation_iso(
    e: &AbModule,
    f: &AbModule,
    phi: &SeriesMatrix,
    n: usize,
    w: usize,
) -> Result<SeriesMatrix> {
    if w <= n || phi.precision() < n {
        return Err(AbError::BadParameter("lifting needs w > N and φ known modulo b^N".into()));
    }
    let fixed = phi.truncate(n);
    let sys = MorphismSystem::build(e, f, w, Some(&fixed))?;
    let Some(x) = sys.echelon.particular_with_rhs_column() else { return Err(AbError::NoLift) };
    let target = w - n;
    if lowest_homogeneous_order(&sys).is_some_and(|l| l < target) {
        let cap = e.precision().min(f.precision());
        let far = (w + 2 * sys.p + n).min(cap.saturating_sub(1));
        if far <= w {
            return Err(AbError::PrecisionExhausted(format!(
                "uniqueness of the lift needs precision above {}",
                w + 1
            )));
        }
        let wide = MorphismSystem::build(e, f, far, Some(&fixed))?;
        if wide.echelon.particular_with_rhs_column().is_none() {
            return Err(AbError::NoLift);
        }
        if let Some(low) = lowest_homogeneous_order(&wide).filter(|&l| l < target) {
            let wider = MorphismSystem::build(e, f, far + 1, Some(&fixed))?;
            return Err(if lowest_homogeneous_order(&wider) == Some(low) {
                AbError::NonUniqueLift
            } else {
                AbError::PrecisionExhausted("truncation artifacts reach the uniqueness window".into())
            });
        }
    }
    let pm = sys.to_matrix(&x, Some(&fixed));
    if !AbModule::intertwining_defect(e, f, &pm).truncate(w).is_zero() {
        return Err(AbError::HypothesisViolated("lift failed verification".into()));
    }
    Ok(pm)
}

#[derive(Clone, Debug)]
pub struct FdFailure {
    pub trial: usize,
    pub perturbation: SeriesMatrix,
    pub reason: String,
    /// Whether some isomorphism `E → E′` exists at the lifting precision
    /// even though the identity of the truncations does not lift.
    pub isomorphic: bool,
}

#[derive(Clone, Debug)]
pub struct FdReport {
    pub n0: usize,
    pub precision: usize,
    pub trials: usize,
    pub failures: Vec<FdFailure>,
}

impl FdReport {
    /// Trials whose perturbed module is not isomorphic to `E` at all.
    pub fn non_isomorphic(&self) -> usize {
        self.failures.iter().filter(|f| !f.isomorphic).count()
    }
}

#[derive(Clone, Debug, Default)]
pub struct FdOptions {
    /// Lowest order perturbed; defaults to `N₀(E)`.
    pub min_order: Option<usize>,
    /// Truncation level of the identity to lift; defaults to `N₀(E)`.
    pub level: Option<usize>,
}

/// Lifting precision used by `verify_fd`.
pub fn fd_precision(n0: usize, rank: usize) -> usize {
    (2 * n0).max(n0 + rank + 4) + 2
}

/// Random perturbation of `M` at orders in `[lo, w)`, small height.
pub fn random_perturbation(p: usize, lo: usize, w: usize, rng: &mut ChaCha8Rng) -> SeriesMatrix {
    let mut d = SeriesMatrix::zeros(p, p, w);
    if lo >= w {
        return d;
    }
    let mut any = false;
    while !any {
        for i in 0..p {
            for j in 0..p {
                if rng.gen_bool(0.5) {
                    let k = rng.gen_range(lo..w.min(lo + 3));
                    let num = rng.gen_range(-3i64..=3);
                    let den = rng.gen_range(1i64..=3);
                    let im = if rng.gen_bool(0.2) { rng.gen_range(-2i64..=2) } else { 0 };
                    let c = Scalar::from_parts(num, den, im, 1);
                    if !c.is_zero() {
                        d.coeff_mut(k)[(i, j)] = c;
                        any = true;
                    }
                }
            }
        }
    }
    d
}

/// Check finite determination on random perturbations of `E`.
pub fn verify_fd(e: &AbModule, trials: usize, seed: u64) -> Result<FdReport> {
    verify_fd_with(e, trials, seed, &FdOptions::default())
}

pub fn verify_fd_with(e: &AbModule, trials: usize, seed: u64, opts: &FdOptions) -> Result<FdReport> {
    let n0 = usize::try_from(n0_bound(e)?).map_err(|_| AbError::HypothesisViolated("negative bound".into()))?;
    let level = opts.level.unwrap_or(n0);
    let lo = opts.min_order.unwrap_or(n0);
    let p = e.rank();
    let mut w = fd_precision(level, p);
    let mut failures = Vec::new();
    let mut raised = false;
    'outer: loop {
        if e.precision() < w + 2 {
            return Err(AbError::PrecisionExhausted(format!("verify_fd needs precision {}", w + 2)));
        }
        failures.clear();
        let margin = (2 * p + level + 2).min(e.precision() - w);
        let base = e.truncate(w + margin);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for trial in 0..trials {
            let delta = random_perturbation(p, lo, w, &mut rng).with_precision(w + margin);
            let perturbed = AbModule::new(base.matrix().add(&delta))?;
            let id = SeriesMatrix::identity(p, level);
            match lift_truncation_iso(&base, &perturbed, &id, level, w) {
                Ok(_) => {}
                Err(AbError::PrecisionExhausted(_)) if !raised => {
                    raised = true;
                    w += p + 2;
                    continue 'outer;
                }
                Err(err @ (AbError::NoLift | AbError::NonUniqueLift)) => {
                    let isomorphic = module_iso(&base, &perturbed, w)?.is_some();
                    failures.push(FdFailure { trial, perturbation: delta, reason: err.to_string(), isomorphic });
                }
                Err(err) => return Err(err),
            }
        }
        return Ok(FdReport { n0, precision: w, trials, failures });
    }
}

/// The largest subspace `F` of `Q` with `A F ⊂ B F`; when `N ≥ k + 1` and
/// `k ≥ δ(E)` it is the image of `E^b`.
pub fn recover_eb_from_truncation(q: &FiniteAbQuotient, k: usize) -> Result<Subspace> {
    let mut f = Subspace::full(q.dim);
    loop {
        let bf = f.image(&q.b);
        let next = f.preimage_within(&q.a, &bf);
        if next.dim() == f.dim() {
            break;
        }
        f = next;
    }
    let p = q.rank;
    for j in k..q.n {
        for i in 0..p {
            if !f.contains(&crate::linalg::unit(q.dim, j * p + i)) {
                return Err(AbError::NotFound);
            }
        }
    }
    Ok(f)
}
