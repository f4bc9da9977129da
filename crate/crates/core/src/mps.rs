//! Matrix-product form of the VBS states.
//!
//! A tensor stores, for every auxiliary pair `(i, j)`, the coefficient of the
//! physical vector `|S; j-i>`. Auxiliary indices are 0-based here: row `i`
//! corresponds to the 1-based label `i + 1`. Flattened auxiliary pairs
//! `(a, b)` use the index `a * (S+1) + b`.

use crate::budget::{Budget, EXACT_AMPLITUDE_BYTES};
use crate::error::{Error, Result};
use crate::qnum::{QIntProduct, QSurd};
use crate::state::{DenseState, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorKind {
    G,
    F,
    GStart,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpsTensor {
    spin: u32,
    kind: TensorKind,
    entries: Vec<Vec<QSurd>>,
}

fn build(spin: u32, kind: TensorKind) -> MpsTensor {
    let s = spin as i64;
    let n = spin as usize + 1;
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (i1, j1) = (i as i64 + 1, j as i64 + 1);
                    let mut rad = QIntProduct::binomial(spin, i as u32);
                    rad = rad.mul(&QIntProduct::binomial(spin, j as u32));
                    rad = rad.mul(&QIntProduct::factorial((s - i1 + j1) as u32));
                    rad = rad.mul(&QIntProduct::factorial((s + i1 - j1) as u32));
                    let root = QSurd::sqrt_of(&rad);
                    let (sign, half_exp) = match kind {
                        TensorKind::GStart => (1, 0),
                        TensorKind::G => ((-1i64).pow((s - i1 + 1) as u32), (2 * i1 - 2 - s) * (s + 1)),
                        TensorKind::F => ((-1i64).pow((s - i1 + 1) as u32), (i1 + j1 - 2 - s) * (s + 1)),
                    };
                    &(&QSurd::from_int(sign) * &QSurd::q_half_pow(half_exp)) * &root
                })
                .collect()
        })
        .collect();
    MpsTensor { spin, kind, entries }
}

pub fn tensor_g(spin: u32) -> MpsTensor {
    build(spin, TensorKind::G)
}

pub fn tensor_f(spin: u32) -> MpsTensor {
    build(spin, TensorKind::F)
}

pub fn tensor_g_start(spin: u32) -> MpsTensor {
    build(spin, TensorKind::GStart)
}

impl MpsTensor {
    pub fn spin(&self) -> u32 {
        self.spin
    }

    pub fn kind(&self) -> TensorKind {
        self.kind
    }

    /// Auxiliary bond dimension `S + 1`.
    pub fn bond_dim(&self) -> usize {
        self.spin as usize + 1
    }

    /// Coefficient of `|S; j-i>` in entry `(i, j)` (0-based).
    pub fn coeff(&self, i: usize, j: usize) -> &QSurd {
        &self.entries[i][j]
    }

    /// Physical label `m = j - i` carried by entry `(i, j)`.
    pub fn weight(i: usize, j: usize) -> i32 {
        j as i32 - i as i32
    }

    pub fn eval_at(&self, q: f64) -> Vec<Vec<f64>> {
        self.entries.iter().map(|row| row.iter().map(|c| c.eval_f64(q)).collect()).collect()
    }
}

fn check_spin(spin: u32) -> Result<()> {
    if spin == 0 {
        return Err(Error::InvalidArgument("spin must be at least 1".into()));
    }
    Ok(())
}

/// Walks all auxiliary paths `i_0, i_1, ..., i_L`, where site `k` uses
/// `tensors[k]`, calling `visit(config, aux_end, amplitude)` with the exact
/// product along the path.
fn walk_exact(tensors: &[&MpsTensor], start: usize, visit: &mut impl FnMut(&[i32], usize, &QSurd)) {
    fn rec(
        tensors: &[&MpsTensor],
        site: usize,
        aux: usize,
        config: &mut Vec<i32>,
        acc: &QSurd,
        visit: &mut impl FnMut(&[i32], usize, &QSurd),
    ) {
        if site == tensors.len() {
            visit(config, aux, acc);
            return;
        }
        let t = tensors[site];
        for next in 0..t.bond_dim() {
            let c = t.coeff(aux, next);
            if c.is_zero() {
                continue;
            }
            config.push(MpsTensor::weight(aux, next));
            rec(tensors, site + 1, next, config, &(acc * c), visit);
            config.pop();
        }
    }
    let mut config = Vec::with_capacity(tensors.len());
    rec(tensors, 0, start, &mut config, &QSurd::one(), visit);
}

/// `Tr[t_1 ⊗ ... ⊗ t_L]` with free physical indices.
pub fn contract_pbc(t: &MpsTensor, length: usize) -> Result<StateVector> {
    contract_pbc_within(t, length, &Budget::from_env())
}

pub fn contract_pbc_within(t: &MpsTensor, length: usize, budget: &Budget) -> Result<StateVector> {
    check_spin(t.spin)?;
    if length == 0 {
        return Err(Error::InvalidArgument("chain length must be positive".into()));
    }
    budget.check_space(t.spin, length, EXACT_AMPLITUDE_BYTES)?;
    let tensors = vec![t; length];
    let mut out = StateVector::zero(t.spin, length);
    for start in 0..t.bond_dim() {
        walk_exact(&tensors, start, &mut |config, end, amp| {
            if end == start {
                out.add_to(config.to_vec(), amp);
            }
        });
    }
    Ok(out)
}

/// `[g_start ⊗ g ⊗ ... ⊗ g]_{p1,p2}` with 1-based boundary labels.
pub fn contract_open(spin: u32, length: usize, p1: u32, p2: u32) -> Result<StateVector> {
    contract_open_within(spin, length, p1, p2, &Budget::from_env())
}

pub fn contract_open_within(spin: u32, length: usize, p1: u32, p2: u32, budget: &Budget) -> Result<StateVector> {
    check_spin(spin)?;
    if length == 0 {
        return Err(Error::InvalidArgument("chain length must be positive".into()));
    }
    for p in [p1, p2] {
        if p == 0 || p > spin + 1 {
            return Err(Error::InvalidArgument(format!("boundary label p = {p} outside 1..={}", spin + 1)));
        }
    }
    budget.check_space(spin, length, EXACT_AMPLITUDE_BYTES)?;
    let gs = tensor_g_start(spin);
    let g = tensor_g(spin);
    let mut tensors = vec![&g; length];
    tensors[0] = &gs;
    let mut out = StateVector::zero(spin, length);
    let end = (p2 - 1) as usize;
    walk_exact(&tensors, (p1 - 1) as usize, &mut |config, last, amp| {
        if last == end {
            out.add_to(config.to_vec(), amp);
        }
    });
    Ok(out)
}

/// Floating-point periodic contraction into a dense vector.
pub fn contract_pbc_dense(t: &MpsTensor, length: usize, q: f64, budget: &Budget) -> Result<DenseState> {
    check_spin(t.spin)?;
    if length == 0 {
        return Err(Error::InvalidArgument("chain length must be positive".into()));
    }
    let mut out = DenseState::zeros_within(t.spin, length, budget)?;
    let m = t.eval_at(q);
    let n = t.bond_dim();
    let d = 2 * t.spin as usize + 1;
    let s = t.spin as i64;
    // iterate auxiliary paths with a running product and running dense index
    #[allow(clippy::too_many_arguments)]
    fn rec(
        m: &[Vec<f64>],
        n: usize,
        d: usize,
        s: i64,
        sites_left: usize,
        aux: usize,
        start: usize,
        idx: usize,
        acc: f64,
        amps: &mut [f64],
    ) {
        if sites_left == 0 {
            return;
        }
        for next in 0..n {
            let c = m[aux][next];
            if c == 0.0 {
                continue;
            }
            let digit = (next as i64 - aux as i64 + s) as usize;
            let idx2 = idx * d + digit;
            if sites_left == 1 {
                if next == start {
                    amps[idx2] += acc * c;
                }
            } else {
                rec(m, n, d, s, sites_left - 1, next, start, idx2, acc * c, amps);
            }
        }
    }
    for start in 0..n {
        rec(&m, n, d, s, length, start, start, 0, 1.0, out.amps_mut());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::{QIntProduct, QSurd};

    #[test]
    fn spin_one_shape() {
        let g = tensor_g(1);
        assert_eq!(g.bond_dim(), 2);
        assert_eq!(MpsTensor::weight(0, 1), 1);
        assert_eq!(MpsTensor::weight(1, 0), -1);
        assert!(!g.coeff(0, 1).is_zero());
    }

    #[test]
    fn f_over_g_is_gauge_factor() {
        for s in 1..=3u32 {
            let (f, g) = (tensor_f(s), tensor_g(s));
            for i in 0..=s as usize {
                for j in 0..=s as usize {
                    let k = (s as i64 + 1) * (j as i64 - i as i64);
                    assert_eq!(*f.coeff(i, j), g.coeff(i, j) * &QSurd::q_half_pow(k));
                }
            }
        }
    }

    #[test]
    fn g_start_has_no_sign_or_power() {
        let t = tensor_g_start(2);
        // (i, j) = (1, 1) in 1-based labels: sqrt([2]![2]!) = [2]
        let expect = QSurd::sqrt_of(&QIntProduct::factorial(2).mul(&QIntProduct::factorial(2)));
        assert_eq!(*t.coeff(0, 0), expect);
        assert!(t.coeff(0, 0).eval_f64(1.0) > 0.0);
    }

    #[test]
    fn single_site_trace_is_weight_zero() {
        let st = contract_pbc(&tensor_g(1), 1).unwrap();
        assert!(st.amplitudes().all(|(c, _)| c[0] == 0));
        assert!(!st.is_zero());
    }

    #[test]
    fn open_weight_telescopes() {
        for p1 in 1..=3 {
            for p2 in 1..=3 {
                let st = contract_open(2, 3, p1, p2).unwrap();
                assert_eq!(st.weight(), Some(p2 as i32 - p1 as i32));
            }
        }
    }

    #[test]
    fn dense_matches_exact() {
        let t = tensor_f(2);
        let exact = contract_pbc(&t, 4).unwrap().eval_at(0.8);
        let dense = contract_pbc_dense(&t, 4, 0.8, &Budget::default()).unwrap();
        for (a, b) in exact.amps().iter().zip(dense.amps()) {
            assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        }
    }
}
