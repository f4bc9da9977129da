//! Transfer matrices of the periodic MPS and the correlators built from them.
//!
//! `G^A_{(a,b;c,d)} = f(a,c)^† A f(b,d)`, with the flattened pair index
//! `a * (S+1) + b` (0-based). Entries vanish unless `c - a = d - b`, so `G`
//! splits into blocks labelled by `k = a - b`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mps::tensor_f;
use crate::qnum::{
    q_binomial_f64, q_factorial, q_factorial_f64, q_integer, q_integer_f64, LaurentQ, QIntProduct, QSurd, RatMatrix,
    RatQ,
};

/// Relative tolerance for grouping degenerate eigenvalues.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Relative tolerance of the generic-versus-explicit construction guard.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// Single-site operator in the `|S, m>` basis, row/column index `m + S`.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteOperator {
    spin: u32,
    matrix: DMatrix<f64>,
}

impl SiteOperator {
    pub fn from_matrix(spin: u32, matrix: DMatrix<f64>) -> Result<Self> {
        let d = 2 * spin as usize + 1;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidArgument(format!("site operator must be {d}x{d}")));
        }
        Ok(SiteOperator { spin, matrix })
    }

    pub fn identity(spin: u32) -> Self {
        Self::diagonal(spin, |_| 1.0)
    }

    pub fn sz(spin: u32) -> Self {
        Self::diagonal(spin, |m| m as f64)
    }

    /// `|S, m><S, m|`.
    pub fn projector(spin: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > spin {
            return Err(Error::InvalidArgument(format!("|m| = {} exceeds S = {spin}", m.abs())));
        }
        Ok(Self::diagonal(spin, |k| if k == m { 1.0 } else { 0.0 }))
    }

    pub fn diagonal(spin: u32, f: impl Fn(i32) -> f64) -> Self {
        let s = spin as i32;
        let d: Vec<f64> = (-s..=s).map(f).collect();
        SiteOperator { spin, matrix: DMatrix::from_diagonal(&DVector::from_vec(d)) }
    }

    pub fn spin(&self) -> u32 {
        self.spin
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn element(&self, m: i32, n: i32) -> f64 {
        let s = self.spin as i32;
        self.matrix[((m + s) as usize, (n + s) as usize)]
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.matrix.nrows();
        (0..d).all(|i| (0..d).all(|j| i == j || self.matrix[(i, j)] == 0.0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    spin: u32,
    q: f64,
    matrix: DMatrix<f64>,
}

impl TransferMatrix {
    pub fn spin(&self) -> u32 {
        self.spin
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.matrix.amax().max(f64::MIN_POSITIVE);
        (&self.matrix - self.matrix.transpose()).amax() <= tol * scale
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidArgument(format!("q must be finite and > 0, got {q}")));
    }
    Ok(())
}

fn check_spin(spin: u32) -> Result<()> {
    if spin == 0 {
        return Err(Error::InvalidArgument("spin must be at least 1".into()));
    }
    Ok(())
}

/// `G^A` from the tensor `f`, contracting the physical index.
fn generic_transfer(spin: u32, q: f64, op: &SiteOperator) -> DMatrix<f64> {
    let n = spin as usize + 1;
    let f = tensor_f(spin).eval_at(q);
    let s = spin as i32;
    DMatrix::from_fn(n * n, n * n, |row, col| {
        let (a, b) = (row / n, row % n);
        let (c, d) = (col / n, col % n);
        let (m1, m2) = (c as i32 - a as i32, d as i32 - b as i32);
        if m1.abs() > s || m2.abs() > s {
            return 0.0;
        }
        f[a][c] * op.element(m1, m2) * f[b][d]
    })
}

/// The closed-form entries for a diagonal operator, 1-based labels inside.
fn explicit_transfer(spin: u32, q: f64, op: &SiteOperator) -> DMatrix<f64> {
    let n = spin as usize + 1;
    let s = spin as i64;
    DMatrix::from_fn(n * n, n * n, |row, col| {
        let (a, b) = ((row / n) as i64 + 1, (row % n) as i64 + 1);
        let (c, d) = ((col / n) as i64 + 1, (col % n) as i64 + 1);
        if a - b != c - d {
            return 0.0;
        }
        let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
        let power = q.powf(((a + b + c + d - 2 * s - 4) * (s + 1)) as f64 / 2.0);
        let binoms = [a, b, c, d].iter().map(|&x| q_binomial_f64(spin, (x - 1) as u32, q)).product::<f64>();
        let facts =
            [s - a + c, s + a - c, s - b + d, s + b - d].iter().map(|&x| q_factorial_f64(x as u32, q)).product::<f64>();
        sign * power * (binoms * facts).sqrt() * op.element((d - b) as i32, (d - b) as i32)
    })
}

/// `G` (no operator) or `G^A`. Built from `f` and, for diagonal `A`, checked
/// against the closed form.
pub fn transfer_matrix(spin: u32, q: f64, op: Option<&SiteOperator>) -> Result<TransferMatrix> {
    check_spin(spin)?;
    check_q(q)?;
    let id = SiteOperator::identity(spin);
    let op = op.unwrap_or(&id);
    if op.spin != spin {
        return Err(Error::InvalidArgument("operator spin does not match".into()));
    }
    let generic = generic_transfer(spin, q, op);
    if op.is_diagonal() {
        let explicit = explicit_transfer(spin, q, op);
        let scale = generic.amax().max(explicit.amax()).max(f64::MIN_POSITIVE);
        let diff = (&generic - &explicit).amax();
        if diff > CONSTRUCTION_TOL * scale {
            return Err(Error::FormulaMismatch(format!(
                "transfer matrix S={spin}, q={q}: generic and closed form differ by {diff:e}"
            )));
        }
    }
    Ok(TransferMatrix { spin, q, matrix: generic })
}

/// Exact `G` entries; they carry square roots of q-binomial products.
pub fn exact_transfer_matrix(spin: u32) -> Vec<Vec<QSurd>> {
    let n = spin as usize + 1;
    let f = tensor_f(spin);
    (0..n * n)
        .map(|row| {
            (0..n * n)
                .map(|col| {
                    let (a, b, c, d) = (row / n, row % n, col / n, col % n);
                    if c as i64 - a as i64 != d as i64 - b as i64 {
                        return QSurd::zero();
                    }
                    f.coeff(a, c) * f.coeff(b, d)
                })
                .collect()
        })
        .collect()
}

/// `D^{-1} G^A D` with `D = diag(sqrt([S, a] [S, b]))`, which is radical-free.
/// `weights[m + S]` gives a diagonal operator; `None` means the identity.
pub fn similar_transfer_matrix(spin: u32, weights: Option<&[RatQ]>) -> Result<RatMatrix> {
    check_spin(spin)?;
    let n = spin as usize + 1;
    let s = spin as i32;
    let g = exact_transfer_matrix(spin);
    let d: Vec<QSurd> = (0..n * n)
        .map(|i| {
            QSurd::sqrt_of(
                &QIntProduct::binomial(spin, (i / n) as u32).mul(&QIntProduct::binomial(spin, (i % n) as u32)),
            )
        })
        .collect();
    let d_inv: Vec<QSurd> = d.iter().map(QSurd::try_inv).collect::<Result<_>>()?;
    let mut out = RatMatrix::zeros(n * n, n * n);
    for (row, g_row) in g.iter().enumerate() {
        for (col, x) in g_row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let mut v = (&(&d_inv[row] * x) * &d[col]).to_ratq()?;
            if let Some(w) = weights {
                let m = (col / n) as i32 - (row / n) as i32;
                v = &v * &w[(m + s) as usize];
            }
            out.set(row, col, v);
        }
    }
    Ok(out)
}

/// Index sets of the blocks `k = a - b`, in ascending `k`.
pub fn sector_indices(spin: u32) -> Vec<(i32, Vec<usize>)> {
    let n = spin as usize + 1;
    let s = spin as i32;
    (-s..=s)
        .map(|k| {
            let idx = (0..n * n).filter(|i| (i / n) as i32 - (i % n) as i32 == k).collect();
            (k, idx)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyGroup {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Sorted by descending `|λ|`, ties by descending `λ`.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the same order.
    pub eigenvectors: DMatrix<f64>,
    pub groups: Vec<DegeneracyGroup>,
}

impl EigenSystem {
    pub fn leading(&self) -> (f64, DVector<f64>) {
        (self.eigenvalues[0], self.eigenvectors.column(0).into_owned())
    }

    pub fn degeneracies(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.multiplicity).collect()
    }
}

/// Inverse iteration followed by a Rayleigh quotient, per block.
fn refine(block: &DMatrix<f64>, mut lambda: f64, mut v: DVector<f64>) -> (f64, DVector<f64>) {
    let n = block.nrows();
    for _ in 0..3 {
        let shifted = block - DMatrix::identity(n, n) * lambda;
        let Some(w) = shifted.lu().solve(&v) else { break };
        let norm = w.norm();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        v = w / norm;
        lambda = v.dot(&(block * &v));
    }
    (lambda, v)
}

/// Eigen-decomposition of a symmetric transfer matrix. Fails when the
/// leading eigenvalue is not separated in modulus.
pub fn eigensystem(g: &TransferMatrix) -> Result<EigenSystem> {
    let es = eigensystem_unchecked(g)?;
    if es.eigenvalues.len() > 1 {
        let (l1, l2) = (es.eigenvalues[0].abs(), es.eigenvalues[1].abs());
        if l1 - l2 <= DEGENERACY_TOL * l1 {
            return Err(Error::NoSpectralGap(es.eigenvalues[0], es.eigenvalues[1]));
        }
    }
    Ok(es)
}

/// As [`eigensystem`] without the spectral-gap requirement.
pub fn eigensystem_unchecked(g: &TransferMatrix) -> Result<EigenSystem> {
    if !g.is_symmetric(1e-12) {
        return Err(Error::InvalidArgument("transfer matrix is not symmetric".into()));
    }
    let dim = g.dim();
    let mut pairs: Vec<(f64, DVector<f64>)> = Vec::with_capacity(dim);
    for (_, idx) in sector_indices(g.spin) {
        let b = DMatrix::from_fn(idx.len(), idx.len(), |i, j| g.matrix[(idx[i], idx[j])]);
        let eig = SymmetricEigen::new(b.clone());
        for (t, &lambda) in eig.eigenvalues.iter().enumerate() {
            let (lambda, v) = refine(&b, lambda, eig.eigenvectors.column(t).into_owned());
            let mut full = DVector::zeros(dim);
            for (i, &k) in idx.iter().enumerate() {
                full[k] = v[i];
            }
            pairs.push((lambda, full));
        }
    }
    pairs.sort_by(|x, y| y.0.abs().total_cmp(&x.0.abs()).then(y.0.total_cmp(&x.0)));
    let mut groups: Vec<DegeneracyGroup> = Vec::new();
    let mut members: Vec<Vec<f64>> = Vec::new();
    for (lambda, _) in &pairs {
        let hit =
            groups.iter().position(|gr| (gr.value - lambda).abs() <= DEGENERACY_TOL * gr.value.abs().max(lambda.abs()));
        match hit {
            Some(i) => {
                groups[i].multiplicity += 1;
                members[i].push(*lambda);
                groups[i].value = members[i].iter().sum::<f64>() / members[i].len() as f64;
            }
            None => {
                groups.push(DegeneracyGroup { value: *lambda, multiplicity: 1 });
                members.push(vec![*lambda]);
            }
        }
    }
    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let eigenvectors = DMatrix::from_columns(&pairs.iter().map(|p| p.1.clone()).collect::<Vec<_>>());
    Ok(EigenSystem { eigenvalues, eigenvectors, groups })
}

/// `(-1)^l [2S+1]!/[S+1] [S, l]/[S+l+1, l]`, exactly.
pub fn conjectured_eigenvalue_exact(spin: u32, l: u32) -> Result<RatQ> {
    if l > spin {
        return Err(Error::InvalidArgument(format!("l = {l} outside 0..={spin}")));
    }
    let num = &q_factorial(2 * spin + 1) * &crate::qnum::q_binomial(spin, l)?;
    let den = &q_integer(spin + 1) * &crate::qnum::q_binomial(spin + l + 1, l)?;
    let sign = if l.is_multiple_of(2) { 1 } else { -1 };
    RatQ::new(num.scale(&crate::qnum::rat(sign)), den)
}

pub fn conjectured_eigenvalue(spin: u32, l: u32, q: f64) -> Result<f64> {
    check_q(q)?;
    if l > spin {
        return Err(Error::InvalidArgument(format!("l = {l} outside 0..={spin}")));
    }
    let sign = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * q_factorial_f64(2 * spin + 1, q) / q_integer_f64(spin as i64 + 1, q) * q_binomial_f64(spin, l, q)
        / q_binomial_f64(spin + l + 1, l, q))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureCheck {
    pub spin: u32,
    pub q: f64,
    /// `(l, predicted λ(l), predicted degeneracy, observed multiplicity)`.
    pub levels: Vec<(u32, f64, usize, usize)>,
    pub max_relative_error: f64,
    pub matches: bool,
}

/// Compares the grouped numerical spectrum with the conjectured levels.
pub fn check_conjecture(spin: u32, q: f64, tol: f64) -> Result<ConjectureCheck> {
    let es = eigensystem_unchecked(&transfer_matrix(spin, q, None)?)?;
    let mut levels = Vec::new();
    let mut worst: f64 = 0.0;
    let mut matches = es.groups.len() == spin as usize + 1;
    for l in 0..=spin {
        let pred = conjectured_eigenvalue(spin, l, q)?;
        let errs: Vec<f64> = es.eigenvalues.iter().map(|x| ((x - pred) / pred).abs()).collect();
        let close: Vec<f64> = errs.iter().cloned().filter(|e| *e <= tol).collect();
        let nearest = errs.iter().cloned().fold(f64::INFINITY, f64::min);
        worst = worst.max(close.iter().cloned().fold(nearest, f64::max));
        matches &= close.len() == 2 * l as usize + 1;
        levels.push((l, pred, 2 * l as usize + 1, close.len()));
    }
    Ok(ConjectureCheck { spin, q, levels, max_relative_error: worst, matches })
}

/// Exact check over `Q(q)`: `dim ker(G - λ(l)) = 2l + 1` for every `l`, and
/// these account for the whole space.
pub fn conjecture_nullities_exact(spin: u32) -> Result<Vec<(u32, usize)>> {
    let gt = similar_transfer_matrix(spin, None)?;
    let mut out = Vec::new();
    for l in 0..=spin {
        let lambda = conjectured_eigenvalue_exact(spin, l)?;
        let mut nullity = 0;
        for (_, idx) in sector_indices(spin) {
            let b = RatMatrix::from_fn(idx.len(), idx.len(), |i, j| {
                let v = gt.get(idx[i], idx[j]).clone();
                if i == j {
                    &v - &lambda
                } else {
                    v
                }
            });
            nullity += idx.len() - b.rank();
        }
        out.push((l, nullity));
    }
    Ok(out)
}

/// Scaled matrix power by repeated multiplication.
fn mat_pow(m: &DMatrix<f64>, e: usize) -> DMatrix<f64> {
    let mut acc = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..e {
        acc = &acc * m;
    }
    acc
}

/// `Tr(G^A G^{L-1}) / Tr(G^L)` on a periodic chain of length `L`.
pub fn one_point_finite(op: &SiteOperator, spin: u32, q: f64, length: usize) -> Result<f64> {
    if length < 1 {
        return Err(Error::InvalidArgument("chain length must be positive".into()));
    }
    let g = transfer_matrix(spin, q, None)?.matrix;
    let ga = transfer_matrix(spin, q, Some(op))?.matrix;
    let scale = g.norm();
    let (g, ga) = (g / scale, ga / scale);
    let rest = mat_pow(&g, length - 1);
    Ok((&ga * &rest).trace() / (&g * &rest).trace())
}

/// `Tr(G^A G^{r-2} G^B G^{L-r}) / Tr(G^L)`, `2 <= r <= L`.
pub fn two_point_finite(a: &SiteOperator, b: &SiteOperator, spin: u32, q: f64, length: usize, r: usize) -> Result<f64> {
    if length < 2 || r < 2 || r > length {
        return Err(Error::InvalidArgument(format!("need 2 <= r <= L, got r = {r}, L = {length}")));
    }
    let g = transfer_matrix(spin, q, None)?.matrix;
    let ga = transfer_matrix(spin, q, Some(a))?.matrix;
    let gb = transfer_matrix(spin, q, Some(b))?.matrix;
    let scale = g.norm();
    let (g, ga, gb) = (g / scale, ga / scale, gb / scale);
    let num = &ga * mat_pow(&g, r - 2) * &gb * mat_pow(&g, length - r);
    Ok(num.trace() / mat_pow(&g, length).trace())
}

/// `λ_1^{-1} <e_1|G^A|e_1>`.
pub fn one_point_thermo(op: &SiteOperator, spin: u32, q: f64) -> Result<f64> {
    let es = eigensystem(&transfer_matrix(spin, q, None)?)?;
    let ga = transfer_matrix(spin, q, Some(op))?.matrix;
    let (l1, e1) = es.leading();
    Ok(e1.dot(&(&ga * &e1)) / l1)
}

/// `sum_n λ_n^{r-2} / λ_1^r <e_1|G^A|e_n> <e_n|G^B|e_1>`, `r >= 2`.
pub fn two_point_thermo(a: &SiteOperator, b: &SiteOperator, spin: u32, q: f64, r: usize) -> Result<f64> {
    thermo_sum(a, b, spin, q, r, false)
}

/// The variant whose first factor is `<e_1|G^A|e_1>` for every `n`. It is
/// not consistent with the finite-chain trace and is kept for comparison.
pub fn two_point_thermo_diagonal_first_factor(
    a: &SiteOperator,
    b: &SiteOperator,
    spin: u32,
    q: f64,
    r: usize,
) -> Result<f64> {
    thermo_sum(a, b, spin, q, r, true)
}

fn thermo_sum(a: &SiteOperator, b: &SiteOperator, spin: u32, q: f64, r: usize, diagonal: bool) -> Result<f64> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("r must be at least 2, got {r}")));
    }
    let es = eigensystem(&transfer_matrix(spin, q, None)?)?;
    let ga = transfer_matrix(spin, q, Some(a))?.matrix;
    let gb = transfer_matrix(spin, q, Some(b))?.matrix;
    let (l1, e1) = es.leading();
    let a11 = e1.dot(&(&ga * &e1));
    let mut sum = 0.0;
    for (n, &ln) in es.eigenvalues.iter().enumerate() {
        let en = es.eigenvectors.column(n);
        let first = if diagonal { a11 } else { e1.dot(&(&ga * en)) };
        let second = en.dot(&(&gb * &e1));
        sum += (ln / l1).powi(r as i32 - 2) / (l1 * l1) * first * second;
    }
    Ok(sum)
}

/// `<P(S^z = m)>` in the thermodynamic limit, `m = -S..=S`.
pub fn sz_distribution(spin: u32, q: f64) -> Result<Vec<f64>> {
    let s = spin as i32;
    (-s..=s).map(|m| one_point_thermo(&SiteOperator::projector(spin, m)?, spin, q)).collect()
}

/// `<P(S^z = m)>` as exact elements of `Q(q)`, from the left and right
/// null vectors of `G̃ - λ(0)`.
pub fn sz_distribution_exact(spin: u32) -> Result<Vec<RatQ>> {
    let s = spin as i32;
    let n = spin as usize + 1;
    let lambda = conjectured_eigenvalue_exact(spin, 0)?;
    let gt = similar_transfer_matrix(spin, None)?;
    // the leading eigenvector lives in the k = 0 block
    let idx: Vec<usize> = (0..n).map(|a| a * n + a).collect();
    let shifted = RatMatrix::from_fn(n, n, |i, j| {
        let v = gt.get(idx[i], idx[j]).clone();
        if i == j {
            &v - &lambda
        } else {
            v
        }
    });
    let right = shifted.null_space();
    let left = shifted.transpose().null_space();
    if right.len() != 1 || left.len() != 1 {
        return Err(Error::Singular(format!("leading eigenspace of dimension {} for S={spin}", right.len())));
    }
    let (u, w) = (&right[0], &left[0]);
    let norm: RatQ = w.iter().zip(u).map(|(x, y)| x * y).sum();
    let denom = &norm * &lambda;
    (-s..=s)
        .map(|m| {
            let weights: Vec<RatQ> = (-s..=s).map(|k| if k == m { RatQ::one() } else { RatQ::zero() }).collect();
            let ga = similar_transfer_matrix(spin, Some(&weights))?;
            let mut acc = RatQ::zero();
            for (i, wi) in w.iter().enumerate() {
                for (j, uj) in u.iter().enumerate() {
                    let x = ga.get(idx[i], idx[j]);
                    if !x.is_zero() && !wi.is_zero() && !uj.is_zero() {
                        acc = &acc + &(&(wi * x) * uj);
                    }
                }
            }
            Ok(&acc / &denom)
        })
        .collect()
}

/// Closed-form `S = 2` probabilities as elements of `Q(q)`, `m = -2..=2`.
pub fn sz_distribution_s2_closed_form() -> Vec<RatQ> {
    let qi = |n: u32| RatQ::from(q_integer(n));
    let p2 = &RatQ::one() / &qi(5);
    let p1 = &(&qi(2) * &qi(8)) / &(&qi(5) * &(&qi(4) * &qi(4)));
    let p0 = &(&qi(2) / &(&qi(5) * &qi(4))) * &(&RatQ::one() + &(&qi(12) / &(&qi(3) * &qi(4))));
    vec![p2.clone(), p1.clone(), p0, p1, p2]
}

/// Closed forms of `<S^z_1 S^z_r>` for `S = 2, 3`, `r >= 2`.
pub fn closed_form_szsz(spin: u32, q: f64, r: usize) -> Result<f64> {
    check_q(q)?;
    if r < 2 {
        return Err(Error::InvalidArgument(format!("closed forms are used for r >= 2, got {r}")));
    }
    let b = |n: i64| q_integer_f64(n, q);
    let d = |n: i32| q.powi(n) - q.powi(-n);
    let r_i = r as i32;
    match spin {
        2 => {
            let pre = -b(2) * b(3) / b(4) * (b(2) / (b(5) * b(4))).powi(r_i);
            let t1 = d(1) * d(3) * b(6).powi(2) / (b(3).powi(2) * b(2).powi(2));
            let t2 = b(2).powi(2) * (-b(5)).powi(r_i);
            Ok(pre * (t1 + t2))
        }
        3 => {
            let pre = -b(2) / (b(6) * b(5) * b(3)) * (b(3) / (b(7) * b(6) * b(5))).powi(r_i);
            let t1 = d(1).powi(2) * d(3).powi(2) * (b(9) - d(2).powi(2)).powi(2) * b(4).powi(2) / b(2).powi(2)
                * (-b(2)).powi(r_i);
            let t2 = d(3).powi(2) * b(8).powi(2) * b(5) / b(4).powi(2) * (b(7) * b(2)).powi(r_i);
            let t3 = (b(2).powi(4) - 2.0 * b(3)).powi(2) * b(6) * b(2) / b(3) * (-b(7) * b(6)).powi(r_i);
            Ok(pre * (t1 + t2 + t3))
        }
        s => Err(Error::UnsupportedSpin(s)),
    }
}

/// `q = 1` limits of the closed forms.
pub fn closed_form_szsz_isotropic(spin: u32, r: usize) -> Result<f64> {
    let r = r as i32;
    match spin {
        2 => Ok(-6.0 * (-2.0f64).powi(-r)),
        3 => Ok(-80.0 * (-3.0f64).powi(r - 2) * 5.0f64.powi(-r)),
        s => Err(Error::UnsupportedSpin(s)),
    }
}

/// Closed-form `S = 2` spectrum `[5][4][2]`, `-[5][2]^2`, `[2]^2` as Laurent
/// polynomials with their degeneracies.
pub fn s2_spectrum_closed_form() -> Vec<(LaurentQ, usize)> {
    let two = q_integer(2);
    let five = q_integer(5);
    vec![(&(&five * &q_integer(4)) * &two, 1), (-&(&five * &(&two * &two)), 3), (&two * &two, 5)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_one_isotropic_spectrum() {
        let es = eigensystem(&transfer_matrix(1, 1.0, None).unwrap()).unwrap();
        assert!((es.eigenvalues[0] - 3.0).abs() < 1e-12);
        for x in &es.eigenvalues[1..] {
            assert!((x + 1.0).abs() < 1e-12);
        }
        assert_eq!(es.degeneracies(), vec![1, 3]);
    }

    #[test]
    fn spin_two_isotropic_spectrum() {
        let es = eigensystem(&transfer_matrix(2, 1.0, None).unwrap()).unwrap();
        let vals: Vec<(f64, usize)> = es.groups.iter().map(|g| (g.value, g.multiplicity)).collect();
        assert_eq!(vals.len(), 3);
        assert!((vals[0].0 - 40.0).abs() < 1e-10 && vals[0].1 == 1);
        assert!((vals[1].0 + 20.0).abs() < 1e-10 && vals[1].1 == 3);
        assert!((vals[2].0 - 4.0).abs() < 1e-10 && vals[2].1 == 5);
    }

    #[test]
    fn sz_transfer_vanishes_on_zero_weight_columns() {
        let g = transfer_matrix(2, 0.8, Some(&SiteOperator::sz(2))).unwrap();
        let n = 3;
        for a in 0..n {
            for c in 0..n {
                // m = c - a = 0 on the diagonal pair block
                if a == c {
                    assert_eq!(g.matrix()[(a * n + a, c * n + c)], 0.0);
                } else {
                    assert_ne!(g.matrix()[(a * n + a, c * n + c)], 0.0);
                }
            }
        }
    }

    #[test]
    fn similarity_is_radical_free_and_isospectral() {
        let gt = similar_transfer_matrix(3, None).unwrap();
        let q = 1.3;
        let num = DMatrix::from_fn(16, 16, |i, j| gt.get(i, j).eval_f64(q));
        let g = transfer_matrix(3, q, None).unwrap();
        let a = num.complex_eigenvalues().map(|z| z.re);
        let mut a: Vec<f64> = a.iter().cloned().collect();
        let mut b = eigensystem(&g).unwrap().eigenvalues;
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8 * y.abs().max(1.0));
        }
    }

    #[test]
    fn conjectured_values_spin_one() {
        assert!((conjectured_eigenvalue(1, 0, 1.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((conjectured_eigenvalue(1, 1, 1.0).unwrap() + 1.0).abs() < 1e-14);
        assert!(conjectured_eigenvalue(1, 2, 1.0).is_err());
    }

    #[test]
    fn closed_form_rejects_other_spins() {
        assert!(matches!(closed_form_szsz(4, 1.0, 3), Err(Error::UnsupportedSpin(4))));
        assert!(closed_form_szsz(2, 1.0, 1).is_err());
    }

    #[test]
    fn finite_identity_is_one() {
        let id = SiteOperator::identity(2);
        assert!((one_point_finite(&id, 2, 0.7, 6).unwrap() - 1.0).abs() < 1e-12);
        assert!(two_point_finite(&id, &id, 2, 0.7, 6, 1).is_err());
    }
}
