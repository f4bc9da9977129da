//! Valence-bond-solid states from the Schwinger-boson construction.
//!
//! Creation operators commute, so the boson states are ordinary polynomials
//! in `x_l = a_l^†`, `y_l = b_l^†`:
//!
//! ```text
//! |Ψ>_PBC      = prod_{k=1}^{L} prod_{m=1}^{S} (q^m x_k y_{k+1} - q^{-m} y_k x_{k+1}),  x_{L+1} = x_1
//! |Ψ>_{p1,p2}  = Q_left(p1) * prod_{k=1}^{L-1} prod_m (...) * Q_right(p2)
//! ```
//!
//! The polynomial is expanded exactly and rewritten in the normalized spin
//! basis. Ground-state checks apply the bond projectors `π_J`, `J > S`, in
//! exact arithmetic.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::{Budget, EXACT_AMPLITUDE_BYTES};
use crate::cgproj::{projectors, sector_mks, Boundary, Couplings, Projector};
use crate::error::{Error, Result};
use crate::qnum::{AtomSet, LaurentQ, QIntProduct, QSurd, RatQ};
use crate::state::{Config, StateVector};
use crate::weylrep::{monomial_norm, poly_to_spin, SitePoly};

/// Which end of an open chain a boundary vector sits at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Boundary monomial `Q_left(p)` or `Q_right(p)`, `p` in `1..=S+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryVector {
    pub p: u32,
    pub side: Side,
}

impl BoundaryVector {
    pub fn new(spin: u32, p: u32, side: Side) -> Result<Self> {
        if p == 0 || p > spin + 1 {
            return Err(Error::InvalidArgument(format!("boundary label p = {p} outside 1..={}", spin + 1)));
        }
        Ok(BoundaryVector { p, side })
    }

    /// `(deg x, deg y)` of the boundary monomial.
    pub fn degrees(&self, spin: u32) -> (u32, u32) {
        match self.side {
            Side::Left => (spin + 1 - self.p, self.p - 1),
            Side::Right => (self.p - 1, spin + 1 - self.p),
        }
    }

    /// `[S choose p-1]_q^{1/2}`.
    pub fn prefactor(&self, spin: u32) -> QSurd {
        QSurd::sqrt_of(&QIntProduct::binomial(spin, self.p - 1))
    }
}

/// `prod_{m=1}^S (q^m x_k y_l - q^{-m} y_k x_l)` on an `n`-site polynomial ring.
fn bond_factor(n: usize, spin: u32, k: usize, l: usize) -> SitePoly {
    let mut p = SitePoly::one(n);
    for m in 1..=spin as i64 {
        let mut a = vec![(0, 0); n];
        a[k].0 += 1;
        a[l].1 += 1;
        let mut b = vec![(0, 0); n];
        b[k].1 += 1;
        b[l].0 += 1;
        let lin = &SitePoly::monomial(a, LaurentQ::q_pow(m)) - &SitePoly::monomial(b, LaurentQ::q_pow(-m));
        p = &p * &lin;
    }
    p
}

/// The periodic VBS polynomial in `x_l, y_l`.
pub fn pbc_polynomial(spin: u32, length: usize) -> Result<SitePoly> {
    if spin == 0 || length == 0 {
        return Err(Error::InvalidArgument("need S >= 1 and L >= 1".into()));
    }
    let mut p = SitePoly::one(length);
    for k in 0..length {
        p = &p * &bond_factor(length, spin, k, (k + 1) % length);
    }
    Ok(p)
}

/// The open-chain VBS polynomial without the square-root prefactors.
pub fn open_polynomial(spin: u32, length: usize, p1: u32, p2: u32) -> Result<SitePoly> {
    if spin == 0 || length < 2 {
        return Err(Error::InvalidArgument("need S >= 1 and L >= 2".into()));
    }
    let left = BoundaryVector::new(spin, p1, Side::Left)?;
    let right = BoundaryVector::new(spin, p2, Side::Right)?;
    let mut lm = vec![(0, 0); length];
    lm[0] = left.degrees(spin);
    let mut rm = vec![(0, 0); length];
    rm[length - 1] = right.degrees(spin);
    let mut p = SitePoly::monomial(lm, LaurentQ::one());
    for k in 0..length - 1 {
        p = &p * &bond_factor(length, spin, k, k + 1);
    }
    Ok(&p * &SitePoly::monomial(rm, LaurentQ::one()))
}

pub fn build_pbc(spin: u32, length: usize) -> Result<StateVector> {
    build_pbc_within(spin, length, &Budget::from_env())
}

pub fn build_pbc_within(spin: u32, length: usize, budget: &Budget) -> Result<StateVector> {
    budget.check_space(spin, length, EXACT_AMPLITUDE_BYTES)?;
    poly_to_spin(&pbc_polynomial(spin, length)?, spin)
}

pub fn build_open(spin: u32, length: usize, p1: u32, p2: u32) -> Result<StateVector> {
    build_open_within(spin, length, p1, p2, &Budget::from_env())
}

pub fn build_open_within(spin: u32, length: usize, p1: u32, p2: u32, budget: &Budget) -> Result<StateVector> {
    budget.check_space(spin, length, EXACT_AMPLITUDE_BYTES)?;
    let poly = open_polynomial(spin, length, p1, p2)?;
    let pref = &BoundaryVector::new(spin, p1, Side::Left)?.prefactor(spin)
        * &BoundaryVector::new(spin, p2, Side::Right)?.prefactor(spin);
    Ok(poly_to_spin(&poly, spin)?.scale(&pref))
}

/// Seeded random weight-zero state with small integer amplitudes.
pub fn random_weight_zero_state(spin: u32, length: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = StateVector::zero(spin, length);
    for c in crate::state::all_configs(spin, length) {
        if c.iter().sum::<i32>() != 0 {
            continue;
        }
        let v: i64 = rng.gen_range(-9..=9);
        out.set(c, QSurd::from_int(v));
    }
    out
}

/// Bonds `(k, l)` of a chain; `k` is the left tensor factor.
pub fn bonds(length: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    match boundary {
        Boundary::Open => (0..length.saturating_sub(1)).map(|k| (k, k + 1)).collect(),
        Boundary::Periodic => (0..length).map(|k| (k, (k + 1) % length)).filter(|(k, l)| k != l).collect(),
    }
}

/// Amplitudes rewritten in the monomial basis, split by radical class and
/// scaled to Laurent coefficients. Each class is an independent vector over
/// `Q(q)`, so a linear map vanishes on the state iff it vanishes on each.
fn monomial_components(state: &StateVector) -> Result<Vec<BTreeMap<Config, LaurentQ>>> {
    let spin = state.spin();
    let inv_norms: Vec<QSurd> =
        (-(spin as i32)..=spin as i32).map(|m| monomial_norm(spin, m).try_inv().expect("single-term norm")).collect();
    let mut classes: BTreeMap<AtomSet, BTreeMap<Config, RatQ>> = BTreeMap::new();
    for (config, amp) in state.amplitudes() {
        let mut c = amp.clone();
        for &m in config {
            c = &c * &inv_norms[(m + spin as i32) as usize];
        }
        for (set, r) in c.terms() {
            classes.entry(set).or_default().insert(config.clone(), r.clone());
        }
    }
    classes
        .into_values()
        .map(|cls| {
            let l = RatQ::common_denominator(cls.values());
            cls.into_iter().map(|(k, r)| Ok((k, r.times_laurent(&l)?))).collect()
        })
        .collect()
}

/// A projector block with denominators cleared row by row.
struct ScaledBlock {
    mks: Vec<i32>,
    rows: Vec<Vec<LaurentQ>>,
}

fn scaled_blocks(p: &Projector) -> Result<BTreeMap<i32, ScaledBlock>> {
    let mut out = BTreeMap::new();
    for (w, b) in p.blocks() {
        let rows = (0..b.rows())
            .map(|r| {
                let row: Vec<&RatQ> = (0..b.cols()).map(|c| b.get(r, c)).collect();
                let l = RatQ::common_denominator(row.iter().copied());
                row.iter().map(|v| v.times_laurent(&l)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        out.insert(w, ScaledBlock { mks: sector_mks(p.spin(), w), rows });
    }
    Ok(out)
}

/// Number of nonzero components of `π(k,l) v` (row scaling preserves zeros).
fn count_nonzero_after(
    blocks: &BTreeMap<i32, ScaledBlock>,
    v: &BTreeMap<Config, LaurentQ>,
    k: usize,
    l: usize,
) -> usize {
    let mut groups: BTreeMap<(Config, i32), BTreeMap<i32, &LaurentQ>> = BTreeMap::new();
    for (config, c) in v {
        let mut rest = config.clone();
        rest[k] = i32::MIN;
        rest[l] = i32::MIN;
        groups.entry((rest, config[k] + config[l])).or_default().insert(config[k], c);
    }
    let mut nonzero = 0;
    for ((_, w), entries) in groups {
        let b = &blocks[&w];
        for row in &b.rows {
            let mut acc = LaurentQ::zero();
            for (c, &mk) in b.mks.iter().enumerate() {
                if let Some(x) = entries.get(&mk) {
                    if !row[c].is_zero() {
                        acc += &(&row[c] * x);
                    }
                }
            }
            if !acc.is_zero() {
                nonzero += 1;
            }
        }
    }
    nonzero
}

#[derive(Clone, Debug, Serialize)]
pub struct BondResidual {
    pub bond: (usize, usize),
    pub j: u32,
    /// Nonzero components of `π_J(k,l)|ψ>`, exact.
    pub nonzero_components: usize,
    /// `|π_J(k,l) ψ| / |ψ|` at the reference `q`.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnihilationReport {
    pub spin: u32,
    pub length: usize,
    pub boundary: Boundary,
    pub reference_q: f64,
    pub bonds: Vec<BondResidual>,
}

impl AnnihilationReport {
    pub fn exactly_zero(&self) -> bool {
        self.bonds.iter().all(|b| b.nonzero_components == 0)
    }

    pub fn max_residual(&self) -> f64 {
        self.bonds.iter().map(|b| b.residual).fold(0.0, f64::max)
    }
}

/// Floating-point reference point for reported residual magnitudes.
pub const REFERENCE_Q: f64 = 0.7;

/// Applies `π_J(k, k+1)` for every bond and every `J` in `S+1..=2S`.
pub fn verify_annihilation(state: &StateVector, boundary: Boundary) -> Result<AnnihilationReport> {
    let spin = state.spin();
    let length = state.length();
    let components = monomial_components(state)?;
    let dense = state.eval_at(REFERENCE_Q);
    let norm = dense.norm_sqr().sqrt();
    let d = 2 * spin as usize + 1;
    let mut out = Vec::new();
    for p in projectors(spin)?.iter().filter(|p| p.j() > spin) {
        let blocks = scaled_blocks(p)?;
        let single = Couplings::new(spin, [(p.j(), 1.0)].into_iter().collect())?;
        let h = crate::cgproj::bond_operator(spin, &single, REFERENCE_Q)?;
        for &(k, l) in &bonds(length, boundary) {
            let nonzero = components.iter().map(|v| count_nonzero_after(&blocks, v, k, l)).sum();
            // float residual through the spin-basis projector
            let mut res = vec![0.0; dense.amps().len()];
            let stride = |site: usize| d.pow((length - 1 - site) as u32);
            for (idx, a) in dense.amps().iter().enumerate() {
                if *a == 0.0 {
                    continue;
                }
                let cfg = dense.config_of(idx);
                let ik = (cfg[k] + spin as i32) as usize;
                let il = (cfg[l] + spin as i32) as usize;
                let base = idx - ik * stride(k) - il * stride(l);
                let col = ik * d + il;
                for row in 0..d * d {
                    let v = h[(row, col)];
                    if v != 0.0 {
                        res[base + (row / d) * stride(k) + (row % d) * stride(l)] += v * a;
                    }
                }
            }
            let r = DVector::from_vec(res).norm() / norm.max(f64::MIN_POSITIVE);
            out.push(BondResidual { bond: (k, l), j: p.j(), nonzero_components: nonzero, residual: r });
        }
    }
    Ok(AnnihilationReport { spin, length, boundary, reference_q: REFERENCE_Q, bonds: out })
}

/// Dimension of the joint kernel of `π_J`, `J = S+1..2S`, on two sites,
/// computed exactly over `Q(q)`.
pub fn lemma_kernel_dimension(spin: u32) -> Result<usize> {
    let ps = projectors(spin)?;
    let s = spin as i32;
    let mut rank = 0;
    for w in -2 * s..=2 * s {
        let n = sector_mks(spin, w).len();
        let mut sum = crate::qnum::RatMatrix::zeros(n, n);
        for p in ps.iter().filter(|p| p.j() > spin) {
            sum = sum.add(p.block(w));
        }
        rank += sum.rank();
    }
    Ok((2 * spin as usize + 1).pow(2) - rank)
}

/// Random rational weight-zero state as a negative control: returns whether
/// any bond projector fails to annihilate it.
pub fn negative_control(spin: u32, length: usize, boundary: Boundary, seed: u64) -> Result<bool> {
    let rng_state = random_weight_zero_state(spin, length, seed);
    Ok(!verify_annihilation(&rng_state, boundary)?.exactly_zero())
}

#[allow(dead_code)]
fn random_scalar(rng: &mut impl Rng) -> i64 {
    rng.gen_range(-9..=9)
}
