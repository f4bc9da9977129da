//! Clebsch–Gordan structure of `V_S ⊗ V_S` in the Weyl picture.
//!
//! Highest-weight vectors come in closed product form and are cross-checked
//! against the coefficient recursion that follows from `Δ(X^+) v_J = 0`.
//! Lowering them with `Δ(X^-)` spans every `V_J`, and the change of basis to
//! these spans gives the (oblique, for `q != 1`) projectors `π_J` that define
//! the Hamiltonian.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::qnum::{q_integer, LaurentQ, QSurd, RatMatrix, RatQ};
use crate::state::all_configs;
use crate::weylrep::{coproduct_apply, monomial_norm, GeneratorTag, SitePoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

/// Highest-weight vector of `V_J ⊂ V_{S_k} ⊗ V_{S_l}`, normalized so that the
/// `x_k^{2 S_k}` coefficient is one.
#[derive(Clone, Debug)]
pub struct HighestWeightVector {
    pub spin_k: u32,
    pub spin_l: u32,
    pub j: u32,
    pub poly: SitePoly,
    /// `(m_k, C_{m_k, J - m_k})` for the nonzero coefficients.
    pub coeffs: Vec<(i32, LaurentQ)>,
}

fn two_site_mono(spin_k: u32, spin_l: u32, m_k: i32, m_l: i32) -> Vec<(u32, u32)> {
    vec![
        ((spin_k as i32 + m_k) as u32, (spin_k as i32 - m_k) as u32),
        ((spin_l as i32 + m_l) as u32, (spin_l as i32 - m_l) as u32),
    ]
}

/// `x_k y_l - q^{e} x_l y_k`
fn bond_linear(e: i64, coeff_first: i64) -> SitePoly {
    &SitePoly::monomial(vec![(1, 0), (0, 1)], LaurentQ::q_pow(coeff_first))
        - &SitePoly::monomial(vec![(0, 1), (1, 0)], LaurentQ::q_pow(e))
}

/// The closed product form of `v_J`, checked against the recursion for its
/// coefficients.
pub fn highest_weight(spin_k: u32, spin_l: u32, j: u32) -> Result<HighestWeightVector> {
    let lo = spin_k.abs_diff(spin_l);
    if j < lo || j > spin_k + spin_l {
        return Err(Error::InvalidArgument(format!(
            "J = {j} outside the Clebsch-Gordan range {lo}..={} for ({spin_k}, {spin_l})",
            spin_k + spin_l
        )));
    }
    let (sk, sl, jj) = (spin_k as i64, spin_l as i64, j as i64);
    let n = sk + sl - jj;
    let mut poly = SitePoly::monomial(vec![((sk - sl + jj) as u32, 0), ((sl - sk + jj) as u32, 0)], LaurentQ::one());
    for m in 1..=n {
        poly = &poly * &bond_linear(2 * m - 2 - sk - sl, 0);
    }

    // Recursion C_m = -C_{m+1} [S_l - J + m + 1] q^{-(J+1)} / [S_k - m],
    // started from C_{S_k} = 1 and running down to m_k = J - S_l.
    let mut coeffs = Vec::new();
    let mut c = RatQ::one();
    coeffs.push((spin_k as i32, c.clone()));
    for m in ((jj - sl)..sk).rev() {
        let num = &q_integer((sl - jj + m + 1) as u32) * &LaurentQ::q_pow(-(jj + 1));
        let den: RatQ = q_integer((sk - m) as u32).into();
        c = -(&(&c * &RatQ::from(num)) / &den);
        coeffs.push((m as i32, c.clone()));
    }
    let mut coeffs_l = Vec::new();
    for (m_k, c) in coeffs.iter().rev() {
        let m_l = j as i32 - m_k;
        let expect = poly.coeff(&two_site_mono(spin_k, spin_l, *m_k, m_l));
        if RatQ::from(expect.clone()) != *c {
            return Err(Error::FormulaMismatch(format!(
                "highest weight J={j}: closed form coefficient {expect} vs recursion {c} at m_k={m_k}"
            )));
        }
        coeffs_l.push((*m_k, expect));
    }
    if poly.num_terms() != coeffs_l.len() {
        return Err(Error::FormulaMismatch(format!(
            "highest weight J={j}: closed form has {} terms, recursion {}",
            poly.num_terms(),
            coeffs_l.len()
        )));
    }
    Ok(HighestWeightVector { spin_k, spin_l, j, poly, coeffs: coeffs_l })
}

/// The lowering orbit `(Δ X^-)^t v_J`, `t = 0..=2J`, in `V_S ⊗ V_S`.
pub fn rep_basis(spin: u32, j: u32) -> Result<Vec<SitePoly>> {
    if j > 2 * spin {
        return Err(Error::InvalidArgument(format!("J = {j} > 2S = {}", 2 * spin)));
    }
    let mut v = highest_weight(spin, spin, j)?.poly;
    let mut out = Vec::with_capacity(2 * j as usize + 1);
    for _ in 0..=2 * j {
        out.push(v.clone());
        v = coproduct_apply(&v, GeneratorTag::XMinus, (0, 1))?;
    }
    debug_assert!(v.is_zero());
    Ok(out)
}

/// `m_k` values of the two-site weight sector `m_k + m_l = weight`.
pub fn sector_mks(spin: u32, weight: i32) -> Vec<i32> {
    let s = spin as i32;
    ((weight - s).max(-s)..=(weight + s).min(s)).collect()
}

/// Change of basis from monomials to the `V_J` orbits, per weight sector.
#[derive(Clone, Debug)]
pub struct CgDecomposition {
    spin: u32,
    /// weight -> (basis, inverse); column `c` of the basis belongs to
    /// `J = |weight| + c`.
    blocks: BTreeMap<i32, (RatMatrix, RatMatrix)>,
}

impl CgDecomposition {
    pub fn new(spin: u32) -> Result<Self> {
        let s = spin as i32;
        let orbits: Vec<Vec<SitePoly>> = (0..=2 * spin).map(|j| rep_basis(spin, j)).collect::<Result<_>>()?;
        let mut blocks = BTreeMap::new();
        for weight in -2 * s..=2 * s {
            let mks = sector_mks(spin, weight);
            let js: Vec<u32> = (weight.unsigned_abs()..=2 * spin).collect();
            assert_eq!(mks.len(), js.len());
            let basis = RatMatrix::from_fn(mks.len(), js.len(), |r, c| {
                let j = js[c];
                let t = (j as i32 - weight) as usize;
                let mono = two_site_mono(spin, spin, mks[r], weight - mks[r]);
                orbits[j as usize][t].coeff(&mono).into()
            });
            let inverse =
                basis.inverse().map_err(|_| Error::Singular(format!("CG basis, S={spin}, weight {weight}")))?;
            blocks.insert(weight, (basis, inverse));
        }
        Ok(CgDecomposition { spin, blocks })
    }

    pub fn spin(&self) -> u32 {
        self.spin
    }

    pub fn projector(&self, j: u32) -> Result<Projector> {
        if j > 2 * self.spin {
            return Err(Error::InvalidArgument(format!("J = {j} > 2S")));
        }
        let mut blocks = BTreeMap::new();
        for (&weight, (basis, inverse)) in &self.blocks {
            let n = basis.rows();
            let block = if j < weight.unsigned_abs() {
                RatMatrix::zeros(n, n)
            } else {
                let c = (j - weight.unsigned_abs()) as usize;
                // column c of the basis times row c of the inverse
                RatMatrix::from_fn(n, n, |r, k| basis.get(r, c) * inverse.get(c, k))
            };
            blocks.insert(weight, block);
        }
        Ok(Projector { spin: self.spin, j, blocks })
    }
}

/// `π_J` on `V_S ⊗ V_S`, block-diagonal in the two-site weight. Blocks act
/// on monomial coefficients ordered by ascending `m_k` (see [`sector_mks`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projector {
    spin: u32,
    j: u32,
    blocks: BTreeMap<i32, RatMatrix>,
}

impl Projector {
    pub fn spin(&self) -> u32 {
        self.spin
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn block(&self, weight: i32) -> &RatMatrix {
        &self.blocks[&weight]
    }

    pub fn blocks(&self) -> impl Iterator<Item = (i32, &RatMatrix)> {
        self.blocks.iter().map(|(w, b)| (*w, b))
    }

    pub fn from_blocks(spin: u32, j: u32, blocks: BTreeMap<i32, RatMatrix>) -> Self {
        Projector { spin, j, blocks }
    }

    pub fn compose(&self, other: &Projector) -> BTreeMap<i32, RatMatrix> {
        self.blocks.iter().map(|(w, b)| (*w, b.mul(&other.blocks[w]))).collect()
    }

    /// Dense matrix in the monomial basis, index `(m_k+S)(2S+1) + (m_l+S)`.
    pub fn monomial_matrix(&self) -> RatMatrix {
        let d = 2 * self.spin as usize + 1;
        let s = self.spin as i32;
        let idx = |mk: i32, ml: i32| (mk + s) as usize * d + (ml + s) as usize;
        let mut out = RatMatrix::zeros(d * d, d * d);
        for (&w, b) in &self.blocks {
            let mks = sector_mks(self.spin, w);
            for (r, &mr) in mks.iter().enumerate() {
                for (c, &mc) in mks.iter().enumerate() {
                    out.set(idx(mr, w - mr), idx(mc, w - mc), b.get(r, c).clone());
                }
            }
        }
        out
    }

    /// Dense matrix in the normalized spin basis:
    /// `P_spin[r][c] = P_mono[r][c] N_r / N_c` with `N` the monomial norms.
    pub fn spin_matrix(&self) -> Vec<Vec<QSurd>> {
        let d = 2 * self.spin as usize + 1;
        let s = self.spin as i32;
        let norms: Vec<QSurd> = (-s..=s).map(|m| monomial_norm(self.spin, m)).collect();
        let pair_norm = |i: usize| &norms[i / d] * &norms[i % d];
        let mono = self.monomial_matrix();
        (0..d * d)
            .map(|r| {
                (0..d * d)
                    .map(|c| {
                        let v = mono.get(r, c);
                        if v.is_zero() {
                            return QSurd::zero();
                        }
                        let ratio = &pair_norm(r) * &pair_norm(c).try_inv().expect("single-term norm");
                        ratio.scale(v)
                    })
                    .collect()
            })
            .collect()
    }

    /// Applies the projector to a two-site polynomial; the result has
    /// coefficients in `Q(q)`, keyed by `(m_k, m_l)`.
    pub fn apply(&self, p: &SitePoly) -> Result<BTreeMap<(i32, i32), RatQ>> {
        if p.num_sites() != 2 || !p.is_homogeneous_at(0, 2 * self.spin) || !p.is_homogeneous_at(1, 2 * self.spin) {
            return Err(Error::InvalidArgument("projector input must lie in V_S ⊗ V_S".into()));
        }
        let mut out = BTreeMap::new();
        for (&w, b) in &self.blocks {
            let mks = sector_mks(self.spin, w);
            let v: Vec<RatQ> =
                mks.iter().map(|&mk| p.coeff(&two_site_mono(self.spin, self.spin, mk, w - mk)).into()).collect();
            if v.iter().all(RatQ::is_zero) {
                continue;
            }
            for (r, val) in b.mul_vec(&v).into_iter().enumerate() {
                if !val.is_zero() {
                    out.insert((mks[r], w - mks[r]), val);
                }
            }
        }
        Ok(out)
    }
}

/// All projectors `π_0 .. π_{2S}`, memoized per spin.
pub fn projectors(spin: u32) -> Result<Arc<Vec<Projector>>> {
    static CACHE: OnceLock<Mutex<BTreeMap<u32, Arc<Vec<Projector>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("projector cache").get(&spin) {
        return Ok(Arc::clone(p));
    }
    let cg = CgDecomposition::new(spin)?;
    let ps = Arc::new((0..=2 * spin).map(|j| cg.projector(j)).collect::<Result<Vec<_>>>()?);
    cache.lock().expect("projector cache").insert(spin, Arc::clone(&ps));
    Ok(ps)
}

pub fn projector(spin: u32, j: u32) -> Result<Projector> {
    if j > 2 * spin {
        return Err(Error::InvalidArgument(format!("J = {j} > 2S = {}", 2 * spin)));
    }
    Ok(projectors(spin)?[j as usize].clone())
}

/// Coefficients of the coupling `sum_{J=S+1}^{2S} C_J π_J`.
#[derive(Clone, Debug, PartialEq)]
pub struct Couplings {
    values: BTreeMap<u32, f64>,
}

impl Couplings {
    /// `C_J = 1` for every `J` in `S+1..=2S`.
    pub fn uniform(spin: u32) -> Self {
        Couplings { values: (spin + 1..=2 * spin).map(|j| (j, 1.0)).collect() }
    }

    pub fn new(spin: u32, values: BTreeMap<u32, f64>) -> Result<Self> {
        for (&j, &c) in &values {
            if j <= spin || j > 2 * spin {
                return Err(Error::InvalidArgument(format!("coupling for J = {j} outside S+1..=2S")));
            }
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::InvalidArgument(format!("coupling C_{j} = {c} must be >= 0")));
            }
        }
        Ok(Couplings { values })
    }

    pub fn get(&self, j: u32) -> f64 {
        self.values.get(&j).copied().unwrap_or(0.0)
    }
}

/// Row-compressed real sparse matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    fn from_rows(dim: usize, rows: Vec<BTreeMap<usize, f64>>) -> Self {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in rows {
            for (c, v) in r {
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseMatrix { dim, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| self.vals[k] * x[self.cols[k]]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] = self.vals[k];
            }
        }
        m
    }

    /// Number of singular values below `tol * sigma_max`.
    pub fn kernel_dimension(&self, tol: f64) -> usize {
        kernel_dimension(&self.to_dense(), tol)
    }
}

pub fn kernel_dimension(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s <= tol * max.max(f64::MIN_POSITIVE)).count()
}

/// Two-site coupling `sum_J C_J π_J` in the spin basis, evaluated at `q`.
pub fn bond_operator(spin: u32, couplings: &Couplings, q: f64) -> Result<DMatrix<f64>> {
    let d = 2 * spin as usize + 1;
    let mut h = DMatrix::zeros(d * d, d * d);
    for p in projectors(spin)?.iter().filter(|p| p.j() > spin) {
        let c = couplings.get(p.j());
        if c == 0.0 {
            continue;
        }
        for (r, row) in p.spin_matrix().iter().enumerate() {
            for (col, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    h[(r, col)] += c * v.eval_at(q)?;
                }
            }
        }
    }
    Ok(h)
}

/// `H = sum_k sum_{J > S} C_J π_J(k, k+1)` on `(2S+1)^L`, evaluated at `q`.
pub fn hamiltonian(
    spin: u32,
    length: usize,
    boundary: Boundary,
    couplings: &Couplings,
    q: f64,
    budget: &Budget,
) -> Result<SparseMatrix> {
    if length < 2 {
        return Err(Error::InvalidArgument("Hamiltonian needs L >= 2".into()));
    }
    let d = 2 * spin as usize + 1;
    let dim = d.pow(length as u32);
    // ~ (2S+1)^2 nonzeros per bond and row, 16 bytes each
    budget.check_bytes((dim as u128) * (length as u128) * (d * d) as u128 * 16)?;
    let h = bond_operator(spin, couplings, q)?;
    let bonds: Vec<(usize, usize)> = match boundary {
        Boundary::Open => (0..length - 1).map(|k| (k, k + 1)).collect(),
        Boundary::Periodic if length == 2 => vec![(0, 1), (1, 0)],
        Boundary::Periodic => (0..length).map(|k| (k, (k + 1) % length)).collect(),
    };
    let stride = |site: usize| d.pow((length - 1 - site) as u32);
    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); dim];
    for (col, config) in all_configs(spin, length).enumerate() {
        for &(k, l) in &bonds {
            let ik = (config[k] + spin as i32) as usize;
            let il = (config[l] + spin as i32) as usize;
            let pair_col = ik * d + il;
            let base = col - ik * stride(k) - il * stride(l);
            for pair_row in 0..d * d {
                let v = h[(pair_row, pair_col)];
                if v == 0.0 {
                    continue;
                }
                let row = base + (pair_row / d) * stride(k) + (pair_row % d) * stride(l);
                *rows[row].entry(col).or_insert(0.0) += v;
            }
        }
    }
    Ok(SparseMatrix::from_rows(dim, rows))
}

/// `prod_{m=1}^S (q^m x_k y_l - q^{-m} y_k x_l)`.
pub fn singlet_divisor(spin: u32) -> SitePoly {
    let mut p = SitePoly::one(2);
    for m in 1..=spin as i64 {
        p = &p * &bond_linear(-m, m);
    }
    p
}

#[derive(Clone, Debug)]
pub struct DivisibilityEntry {
    pub j: u32,
    pub t: u32,
    pub remainder_zero: bool,
    pub quotient: SitePoly,
}

#[derive(Clone, Debug)]
pub struct DivisibilityReport {
    pub spin: u32,
    pub entries: Vec<DivisibilityEntry>,
}

impl DivisibilityReport {
    pub fn all_divisible(&self) -> bool {
        self.entries.iter().all(|e| e.remainder_zero)
    }

    pub fn count_divisible(&self) -> usize {
        self.entries.iter().filter(|e| e.remainder_zero).count()
    }
}

pub const DEFAULT_DIVISIBILITY_BOUND: u32 = 4;

/// Divides every vector of `V_j`, `j <= S`, by [`singlet_divisor`].
pub fn check_divisibility(spin: u32) -> Result<DivisibilityReport> {
    check_divisibility_bounded(spin, DEFAULT_DIVISIBILITY_BOUND)
}

pub fn check_divisibility_bounded(spin: u32, bound: u32) -> Result<DivisibilityReport> {
    if spin == 0 || spin > bound {
        return Err(Error::InvalidArgument(format!("divisibility check needs 1 <= S <= {bound}")));
    }
    let divisor = singlet_divisor(spin);
    let mut entries = Vec::new();
    for j in 0..=spin {
        for (t, v) in rep_basis(spin, j)?.into_iter().enumerate() {
            let (quotient, rem) = v.div_rem(&divisor)?;
            entries.push(DivisibilityEntry { j, t: t as u32, remainder_zero: rem.is_zero(), quotient });
        }
    }
    Ok(DivisibilityReport { spin, entries })
}

/// The nine `S = 2` cofactors `(X^-)^t v_j / prod_m (q^m x_k y_l - q^{-m} x_l y_k)`
/// in closed form, keyed by `(j, t)`.
pub fn s2_cofactor_table() -> Vec<((u32, u32), SitePoly)> {
    let mono = |xk: u32, yk: u32, xl: u32, yl: u32, c: LaurentQ| SitePoly::monomial(vec![(xk, yk), (xl, yl)], c);
    let one = LaurentQ::one;
    // q^-2 x_k y_l + q^2 x_l y_k
    let sym = &mono(1, 0, 0, 1, LaurentQ::q_pow(-2)) + &mono(0, 1, 1, 0, LaurentQ::q_pow(2));
    // x_k y_l - x_l y_k
    let anti = &mono(1, 0, 0, 1, one()) - &mono(0, 1, 1, 0, one());
    let xx = mono(1, 0, 1, 0, one());
    let yy = mono(0, 1, 0, 1, one());
    let two_sq = LaurentQ::from_int_terms(&[(2, 1), (0, 2), (-2, 1)]);
    let middle =
        &(&mono(2, 0, 0, 2, LaurentQ::q_pow(-4)) + &mono(1, 1, 1, 1, two_sq)) + &mono(0, 2, 2, 0, LaurentQ::q_pow(4));
    let v0 = &(&mono(1, 0, 0, 1, LaurentQ::q_pow(-1)) - &mono(0, 1, 1, 0, LaurentQ::q_pow(1))) * &anti;
    vec![
        ((2, 0), mono(2, 0, 2, 0, one())),
        ((2, 1), &xx * &sym),
        ((2, 2), middle),
        ((2, 3), &yy * &sym),
        ((2, 4), mono(0, 2, 0, 2, one())),
        ((1, 0), &xx * &anti),
        ((1, 1), &sym * &anti),
        ((1, 2), &yy * &anti),
        ((0, 0), v0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_highest_weight_is_a_monomial() {
        for s in 1..4 {
            let hw = highest_weight(s, s, 2 * s).unwrap();
            assert_eq!(hw.poly, SitePoly::monomial(vec![(2 * s, 0), (2 * s, 0)], LaurentQ::one()));
        }
    }

    #[test]
    fn highest_weights_are_annihilated() {
        for s in 1..=4 {
            for j in 0..=2 * s {
                let hw = highest_weight(s, s, j).unwrap();
                assert!(coproduct_apply(&hw.poly, GeneratorTag::XPlus, (0, 1)).unwrap().is_zero());
                let h = coproduct_apply(&hw.poly, GeneratorTag::H, (0, 1)).unwrap();
                assert_eq!(h, hw.poly.scale(&LaurentQ::from_int(2 * j as i64)));
            }
        }
        // mixed spins
        for (sk, sl) in [(1u32, 2u32), (3, 1), (2, 4)] {
            for j in sk.abs_diff(sl)..=sk + sl {
                let hw = highest_weight(sk, sl, j).unwrap();
                assert!(coproduct_apply(&hw.poly, GeneratorTag::XPlus, (0, 1)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn highest_weight_range_error() {
        assert!(highest_weight(2, 2, 5).is_err());
        assert!(highest_weight(3, 1, 1).is_err());
    }

    #[test]
    fn spin_one_singlet_and_s2_v2() {
        let hw = highest_weight(1, 1, 0).unwrap();
        assert!(hw.poly.is_proportional_to(&(&bond_linear(-2, 0) * &bond_linear(0, 0))));
        // v_2 for S=2 is x_k^2 x_l^2 (q x_k y_l - q^-1 x_l y_k)(q^2 x_k y_l - q^-2 x_l y_k)
        let hw = highest_weight(2, 2, 2).unwrap();
        let expect = &SitePoly::monomial(vec![(2, 0), (2, 0)], LaurentQ::one()) * &singlet_divisor(2);
        assert!(hw.poly.is_proportional_to(&expect));
    }

    #[test]
    fn orbit_sizes() {
        assert_eq!(rep_basis(1, 1).unwrap().len(), 3);
        assert!(rep_basis(1, 1).unwrap().iter().all(|v| !v.is_zero()));
        let s2j0 = rep_basis(2, 0).unwrap();
        assert_eq!(s2j0.len(), 1);
        assert!(coproduct_apply(&s2j0[0], GeneratorTag::XMinus, (0, 1)).unwrap().is_zero());
        assert!(rep_basis(2, 5).is_err());
    }

    #[test]
    fn projectors_are_complete_and_idempotent_s2() {
        let ps = projectors(2).unwrap();
        for w in -4..=4 {
            let n = sector_mks(2, w).len();
            let mut sum = RatMatrix::zeros(n, n);
            for p in ps.iter() {
                sum = sum.add(p.block(w));
                let sq = p.block(w).mul(p.block(w));
                assert_eq!(&sq, p.block(w));
            }
            assert_eq!(sum, RatMatrix::identity(n));
        }
    }

    #[test]
    fn projector_fixes_its_orbit() {
        let s = 2;
        let ps = projectors(s).unwrap();
        for j in 0..=2 * s {
            for v in rep_basis(s, j).unwrap() {
                for p in ps.iter() {
                    let out = p.apply(&v).unwrap();
                    if p.j() == j {
                        let expect: BTreeMap<(i32, i32), RatQ> = v
                            .terms()
                            .map(|(m, c)| ((m[0].0 as i32 - s as i32, m[1].0 as i32 - s as i32), c.clone().into()))
                            .collect();
                        assert_eq!(out, expect);
                    } else {
                        assert!(out.is_empty());
                    }
                }
            }
        }
    }

    #[test]
    fn low_spin_kernel_rank() {
        let ps = projectors(2).unwrap();
        let mut rank = 0;
        for w in -4..=4 {
            let n = sector_mks(2, w).len();
            let mut sum = RatMatrix::zeros(n, n);
            for p in ps.iter().filter(|p| p.j() <= 2) {
                sum = sum.add(p.block(w));
            }
            rank += sum.rank();
        }
        assert_eq!(rank, 9);
    }

    #[test]
    fn hamiltonian_kernel_s1_open_pair() {
        let h = hamiltonian(1, 2, Boundary::Open, &Couplings::uniform(1), 0.7, &Budget::default()).unwrap();
        assert_eq!(h.dim(), 9);
        assert_eq!(h.kernel_dimension(1e-10), 4);
    }

    #[test]
    fn hamiltonian_s2_pair_kills_low_spin_vectors() {
        let q = 0.8;
        let s = 2;
        let h = hamiltonian(s, 2, Boundary::Open, &Couplings::uniform(s), q, &Budget::default()).unwrap();
        for j in 0..=s {
            for v in rep_basis(s, j).unwrap() {
                let state = crate::weylrep::poly_to_spin(&v, s).unwrap().eval_at(q);
                let hv = h.matvec(state.amps());
                let norm: f64 = state.amps().iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(hv.iter().all(|x| x.abs() < 1e-12 * norm));
            }
        }
    }

    #[test]
    fn couplings_validation() {
        assert!(Couplings::new(2, [(3, -1.0)].into_iter().collect()).is_err());
        assert!(Couplings::new(2, [(2, 1.0)].into_iter().collect()).is_err());
        assert!(Couplings::new(2, [(4, 0.5)].into_iter().collect()).is_ok());
    }

    #[test]
    fn hamiltonian_budget() {
        let r = hamiltonian(2, 6, Boundary::Open, &Couplings::uniform(2), 1.0, &Budget::new(1));
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn divisibility_s1() {
        let rep = check_divisibility(1).unwrap();
        assert_eq!(rep.entries.len(), 4);
        assert!(rep.all_divisible());
    }
}
