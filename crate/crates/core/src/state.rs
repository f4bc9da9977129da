//! Chain states in the normalized spin product basis `|S,m_1> ⊗ ... ⊗ |S,m_L>`.

use std::collections::BTreeMap;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::qnum::QSurd;

/// A basis configuration `(m_1, ..., m_L)`.
pub type Config = Vec<i32>;

/// Compact label such as `+1-1+0` for a configuration.
pub fn config_label(config: &[i32]) -> String {
    config.iter().map(|m| format!("{m:+}")).collect()
}

/// All configurations of `length` spin-`S` sites, in lexicographic order.
pub fn all_configs(spin: u32, length: usize) -> impl Iterator<Item = Config> {
    let d = 2 * spin as usize + 1;
    let total = d.pow(length as u32);
    (0..total).map(move |mut idx| {
        let mut c = vec![0i32; length];
        for site in (0..length).rev() {
            c[site] = (idx % d) as i32 - spin as i32;
            idx /= d;
        }
        c
    })
}

/// Exact state with [`QSurd`] amplitudes; only nonzero amplitudes are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateVector {
    spin: u32,
    length: usize,
    amps: BTreeMap<Config, QSurd>,
}

impl StateVector {
    pub fn zero(spin: u32, length: usize) -> Self {
        StateVector { spin, length, amps: BTreeMap::new() }
    }

    pub fn spin(&self) -> u32 {
        self.spin
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    /// Number of nonzero amplitudes.
    pub fn support_size(&self) -> usize {
        self.amps.len()
    }

    pub fn get(&self, config: &[i32]) -> Option<&QSurd> {
        self.amps.get(config)
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (&Config, &QSurd)> {
        self.amps.iter()
    }

    pub fn set(&mut self, config: Config, amp: QSurd) {
        assert_eq!(config.len(), self.length);
        assert!(config.iter().all(|m| m.unsigned_abs() <= self.spin));
        if amp.is_zero() {
            self.amps.remove(&config);
        } else {
            self.amps.insert(config, amp);
        }
    }

    pub fn add_to(&mut self, config: Config, amp: &QSurd) {
        let cur = self.amps.remove(&config).unwrap_or_default();
        self.set(config, &cur + amp);
    }

    pub fn scale(&self, c: &QSurd) -> StateVector {
        let mut out = StateVector::zero(self.spin, self.length);
        for (k, v) in &self.amps {
            out.set(k.clone(), v * c);
        }
        out
    }

    pub fn sub(&self, other: &StateVector) -> StateVector {
        let mut out = self.clone();
        for (k, v) in &other.amps {
            out.add_to(k.clone(), &-v);
        }
        out
    }

    /// Total weight `sum_l m_l` of every nonzero amplitude, if uniform.
    pub fn weight(&self) -> Option<i32> {
        let mut it = self.amps.keys().map(|c| c.iter().sum::<i32>());
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Cyclic translation: site `l` moves to site `l + 1 (mod L)`.
    pub fn translate(&self) -> StateVector {
        let mut out = StateVector::zero(self.spin, self.length);
        for (k, v) in &self.amps {
            let mut c = k.clone();
            c.rotate_right(1);
            out.set(c, v.clone());
        }
        out
    }

    /// `self = c * other` for a nonzero scalar `c`, decided by exact
    /// cross-multiplication against a pivot amplitude.
    pub fn is_proportional_to(&self, other: &StateVector) -> bool {
        if self.spin != other.spin || self.length != other.length {
            return false;
        }
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        if !self.amps.keys().eq(other.amps.keys()) {
            return false;
        }
        let (pk, pa) = self.amps.iter().next().unwrap();
        let pb = &other.amps[pk];
        self.amps.iter().all(|(k, a)| a * pb == pa * &other.amps[k])
    }

    pub fn eval_at(&self, q: f64) -> DenseState {
        let mut out = DenseState::zeros(self.spin, self.length);
        for (k, v) in &self.amps {
            let i = out.index_of(k);
            out.amps[i] = v.eval_f64(q);
        }
        out
    }
}

/// Floating-point state stored densely; site 1 is the most significant
/// digit and digit `m + S` encodes `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    spin: u32,
    length: usize,
    amps: Vec<f64>,
}

impl DenseState {
    pub fn zeros(spin: u32, length: usize) -> Self {
        let d = 2 * spin as usize + 1;
        DenseState { spin, length, amps: vec![0.0; d.pow(length as u32)] }
    }

    pub fn zeros_within(spin: u32, length: usize, budget: &Budget) -> Result<Self> {
        budget.check_space(spin, length, std::mem::size_of::<f64>() as u64)?;
        Ok(Self::zeros(spin, length))
    }

    pub fn from_vec(spin: u32, length: usize, amps: Vec<f64>) -> Result<Self> {
        let d = 2 * spin as usize + 1;
        if amps.len() != d.pow(length as u32) {
            return Err(Error::InvalidArgument("amplitude vector has the wrong length".into()));
        }
        Ok(DenseState { spin, length, amps })
    }

    pub fn spin(&self) -> u32 {
        self.spin
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn amps(&self) -> &[f64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [f64] {
        &mut self.amps
    }

    pub fn index_of(&self, config: &[i32]) -> usize {
        let d = 2 * self.spin as i32 + 1;
        config.iter().fold(0usize, |acc, &m| acc * d as usize + (m + self.spin as i32) as usize)
    }

    pub fn config_of(&self, mut idx: usize) -> Config {
        let d = 2 * self.spin as usize + 1;
        let mut c = vec![0i32; self.length];
        for site in (0..self.length).rev() {
            c[site] = (idx % d) as i32 - self.spin as i32;
            idx /= d;
        }
        c
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }

    /// `<psi| prod_l D_l(m_l) |psi> / <psi|psi>` for site-diagonal operators
    /// given as functions of `(site, m)`.
    pub fn diagonal_expectation(&self, op: impl Fn(usize, i32) -> f64) -> f64 {
        let d = 2 * self.spin as usize + 1;
        let mut num = 0.0;
        for (idx, a) in self.amps.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            let mut w = a * a;
            let mut rest = idx;
            for site in (0..self.length).rev() {
                let m = (rest % d) as i32 - self.spin as i32;
                rest /= d;
                w *= op(site, m);
            }
            num += w;
        }
        num / self.norm_sqr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_and_indexing() {
        assert_eq!(config_label(&[1, -1, 0]), "+1-1+0");
        let s = DenseState::zeros(1, 3);
        for (i, c) in all_configs(1, 3).enumerate() {
            assert_eq!(s.index_of(&c), i);
            assert_eq!(s.config_of(i), c);
        }
    }

    #[test]
    fn proportionality_and_translation() {
        let mut a = StateVector::zero(1, 2);
        a.set(vec![1, -1], QSurd::from_int(2));
        a.set(vec![-1, 1], QSurd::from_int(-3));
        let b = a.scale(&QSurd::from_int(5));
        assert!(a.is_proportional_to(&b));
        assert!(!a.is_proportional_to(&a.translate()));
        assert_eq!(a.translate().translate(), a);
        assert_eq!(a.weight(), Some(0));
    }
}
