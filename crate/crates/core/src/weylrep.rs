//! The Weyl (difference-operator) realization of U_q(su(2)).
//!
//! The creation operators `a_l^†, b_l^†` act as multiplication by commuting
//! variables `x_l, y_l`, and the annihilators as q-difference operators
//!
//! ```text
//! a_l = (D_q^{x_l} - D_{q^-1}^{x_l}) / ((q - q^-1) x_l),   D_p^{x} f(x) = f(p x)
//! ```
//!
//! (likewise `b_l` in `y_l`). A spin-`S` site is the span of the degree-`2S`
//! monomials `x^{S+m} y^{S-m}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::qnum::{LaurentQ, QIntProduct, QSurd};
use crate::state::StateVector;

/// Per-site `(deg x_l, deg y_l)`; lexicographic order on this vector is the
/// canonical monomial order (site-major, then `x` before `y`).
pub type Monomial = Vec<(u32, u32)>;

/// Polynomial in `x_0, y_0, ..., x_{n-1}, y_{n-1}` with Laurent coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct SitePoly {
    sites: usize,
    terms: BTreeMap<Monomial, LaurentQ>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorTag {
    XPlus,
    XMinus,
    H,
    QH,
    QHInv,
}

/// Single-mode q-boson operators on one site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BosonOp {
    A,
    ADag,
    B,
    BDag,
    /// `N_a`
    NumA,
    /// `N_b`
    NumB,
    /// `q^{k N_a}`
    QPowNumA(i64),
    /// `q^{k N_b}`
    QPowNumB(i64),
}

impl SitePoly {
    pub fn zero(sites: usize) -> Self {
        SitePoly { sites, terms: BTreeMap::new() }
    }

    pub fn one(sites: usize) -> Self {
        Self::monomial(vec![(0, 0); sites], LaurentQ::one())
    }

    pub fn monomial(mono: Monomial, coeff: LaurentQ) -> Self {
        let sites = mono.len();
        let mut p = Self::zero(sites);
        p.add_term(mono, coeff);
        p
    }

    pub fn x(sites: usize, l: usize) -> Self {
        let mut m = vec![(0, 0); sites];
        m[l].0 = 1;
        Self::monomial(m, LaurentQ::one())
    }

    pub fn y(sites: usize, l: usize) -> Self {
        let mut m = vec![(0, 0); sites];
        m[l].1 = 1;
        Self::monomial(m, LaurentQ::one())
    }

    pub fn num_sites(&self) -> usize {
        self.sites
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &LaurentQ)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> LaurentQ {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<(&Monomial, &LaurentQ)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, mono: Monomial, c: LaurentQ) {
        assert_eq!(mono.len(), self.sites, "monomial arity");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &LaurentQ) -> SitePoly {
        let mut out = SitePoly::zero(self.sites);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&LaurentQ) -> LaurentQ) -> SitePoly {
        let mut out = SitePoly::zero(self.sites);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), f(v));
        }
        out
    }

    pub fn pow(&self, n: u32) -> SitePoly {
        let mut acc = SitePoly::one(self.sites);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Whether every monomial has total degree `deg` at `site`.
    pub fn is_homogeneous_at(&self, site: usize, deg: u32) -> bool {
        self.terms.keys().all(|m| m[site].0 + m[site].1 == deg)
    }

    /// Division with remainder by a single polynomial in the lex order. The
    /// leading coefficient of `divisor` must be a unit (a monomial in `q`),
    /// in which case the result coincides with division over `Q(q)`; the
    /// remainder is zero iff `divisor` divides `self`.
    pub fn div_rem(&self, divisor: &SitePoly) -> Result<(SitePoly, SitePoly)> {
        assert_eq!(self.sites, divisor.sites);
        let (lt, lc) = divisor
            .leading()
            .map(|(m, c)| (m.clone(), c.clone()))
            .ok_or_else(|| Error::InvalidArgument("division by the zero polynomial".into()))?;
        let mut rest = self.clone();
        let mut quot = SitePoly::zero(self.sites);
        let mut rem = SitePoly::zero(self.sites);
        while let Some((m, c)) = rest.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if m.iter().zip(&lt).all(|(a, b)| a.0 >= b.0 && a.1 >= b.1) {
                let shift: Monomial = m.iter().zip(&lt).map(|(a, b)| (a.0 - b.0, a.1 - b.1)).collect();
                let t = SitePoly::monomial(shift, c.div_exact_or_err(&lc)?);
                rest = &rest - &(&t * divisor);
                quot = &quot + &t;
            } else {
                rest.terms.remove(&m);
                rem.add_term(m, c);
            }
        }
        Ok((quot, rem))
    }

    /// `self = c * other` for some nonzero scalar `c` in `Q(q)`.
    pub fn is_proportional_to(&self, other: &SitePoly) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        if self.terms.len() != other.terms.len() || !self.terms.keys().eq(other.terms.keys()) {
            return false;
        }
        let (pm, pa) = self.terms.iter().next().unwrap();
        let pb = &other.terms[pm];
        self.terms.iter().all(|(m, a)| a * pb == pa * &other.terms[m])
    }
}

impl<'a> Add<&'a SitePoly> for &'a SitePoly {
    type Output = SitePoly;
    fn add(self, rhs: &SitePoly) -> SitePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a SitePoly> for &'a SitePoly {
    type Output = SitePoly;
    fn sub(self, rhs: &SitePoly) -> SitePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a SitePoly> for &'a SitePoly {
    type Output = SitePoly;
    fn mul(self, rhs: &SitePoly) -> SitePoly {
        assert_eq!(self.sites, rhs.sites, "site count mismatch");
        let mut out = SitePoly::zero(self.sites);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let m = m1.iter().zip(m2).map(|(a, b)| (a.0 + b.0, a.1 + b.1)).collect();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &SitePoly {
    type Output = SitePoly;
    fn neg(self) -> SitePoly {
        self.map_coeffs(|c| -c)
    }
}

impl fmt::Display for SitePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (l, (a, b)) in m.iter().enumerate() {
                for (name, d) in [("x", a), ("y", b)] {
                    match d {
                        0 => {}
                        1 => write!(f, "*{name}{l}")?,
                        d => write!(f, "*{name}{l}^{d}")?,
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SitePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SitePoly[{}]({self})", self.sites)
    }
}

/// `(D_q - D_{q^-1}) / (q - q^-1)` on a degree-`d` power, i.e. the exact
/// quotient `(q^d - q^-d) / (q - q^-1)`.
fn difference_quotient(d: u32) -> LaurentQ {
    let num = LaurentQ::from_int_terms(&[(d as i64, 1), (-(d as i64), -1)]);
    let den = LaurentQ::from_int_terms(&[(1, 1), (-1, -1)]);
    num.div_exact(&den).expect("q - q^-1 divides q^d - q^-d")
}

fn map_site(p: &SitePoly, site: usize, f: impl Fn(u32, u32) -> Option<((u32, u32), LaurentQ)>) -> SitePoly {
    let mut out = SitePoly::zero(p.sites);
    for (m, c) in &p.terms {
        if let Some((d, k)) = f(m[site].0, m[site].1) {
            let mut m2 = m.clone();
            m2[site] = d;
            out.add_term(m2, c * &k);
        }
    }
    out
}

/// Applies a q-boson operator at `site` in the difference-operator picture.
pub fn apply_boson(p: &SitePoly, op: BosonOp, site: usize) -> SitePoly {
    match op {
        BosonOp::ADag => map_site(p, site, |a, b| Some(((a + 1, b), LaurentQ::one()))),
        BosonOp::BDag => map_site(p, site, |a, b| Some(((a, b + 1), LaurentQ::one()))),
        // x^0 is killed: the difference quotient of a constant vanishes
        BosonOp::A => map_site(p, site, |a, b| (a > 0).then(|| ((a - 1, b), difference_quotient(a)))),
        BosonOp::B => map_site(p, site, |a, b| (b > 0).then(|| ((a, b - 1), difference_quotient(b)))),
        BosonOp::NumA => map_site(p, site, |a, b| Some(((a, b), LaurentQ::from_int(a as i64)))),
        BosonOp::NumB => map_site(p, site, |a, b| Some(((a, b), LaurentQ::from_int(b as i64)))),
        BosonOp::QPowNumA(k) => map_site(p, site, |a, b| Some(((a, b), LaurentQ::q_pow(k * a as i64)))),
        BosonOp::QPowNumB(k) => map_site(p, site, |a, b| Some(((a, b), LaurentQ::q_pow(k * b as i64)))),
    }
}

/// Single-site generator: `X^+ = a^† b`, `X^- = b^† a`, `H = N_a - N_b`,
/// `q^{±H} = D_{q^±}^{x} D_{q^∓}^{y}`.
pub fn apply_generator(p: &SitePoly, g: GeneratorTag, site: usize) -> SitePoly {
    match g {
        GeneratorTag::XPlus => apply_boson(&apply_boson(p, BosonOp::B, site), BosonOp::ADag, site),
        GeneratorTag::XMinus => apply_boson(&apply_boson(p, BosonOp::A, site), BosonOp::BDag, site),
        GeneratorTag::H => &apply_boson(p, BosonOp::NumA, site) - &apply_boson(p, BosonOp::NumB, site),
        GeneratorTag::QH => apply_boson(&apply_boson(p, BosonOp::QPowNumA(1), site), BosonOp::QPowNumB(-1), site),
        GeneratorTag::QHInv => apply_boson(&apply_boson(p, BosonOp::QPowNumA(-1), site), BosonOp::QPowNumB(1), site),
    }
}

/// `q^{k H/2}` at `site`; needs `deg x - deg y` even on every monomial.
fn apply_q_half_h(p: &SitePoly, k: i64, site: usize) -> Result<SitePoly> {
    if let Some(m) = p.terms.keys().find(|m| (m[site].0 + m[site].1) % 2 == 1) {
        return Err(Error::InvalidArgument(format!(
            "q^(H/2) needs an even weight difference at site {site}, found {:?}",
            m[site]
        )));
    }
    Ok(map_site(p, site, |a, b| Some(((a, b), LaurentQ::q_pow(k * (a as i64 - b as i64) / 2)))))
}

/// Two-site coproduct action of a generator on sites `(k, l)`:
///
/// ```text
/// Δ(X^±) = X^± ⊗ q^{H/2} + q^{-H/2} ⊗ X^±,   Δ(H) = H ⊗ 1 + 1 ⊗ H,   Δ(q^H) = q^H ⊗ q^H
/// ```
pub fn coproduct_apply(p: &SitePoly, g: GeneratorTag, sites: (usize, usize)) -> Result<SitePoly> {
    let (k, l) = sites;
    if k == l || k >= p.sites || l >= p.sites {
        return Err(Error::InvalidArgument(format!("bad site pair ({k}, {l})")));
    }
    Ok(match g {
        GeneratorTag::XPlus | GeneratorTag::XMinus => {
            let left = apply_generator(&apply_q_half_h(p, 1, l)?, g, k);
            let right = apply_generator(&apply_q_half_h(p, -1, k)?, g, l);
            &left + &right
        }
        GeneratorTag::H => &apply_generator(p, g, k) + &apply_generator(p, g, l),
        GeneratorTag::QH | GeneratorTag::QHInv => apply_generator(&apply_generator(p, g, k), g, l),
    })
}

/// `x^{S+m} y^{S-m} = ([S+m]_q! [S-m]_q!)^{1/2} |S, m>`.
pub fn monomial_norm(spin: u32, m: i32) -> QSurd {
    let a = (spin as i32 + m) as u32;
    let b = (spin as i32 - m) as u32;
    QSurd::sqrt_of(&QIntProduct::factorial(a).mul(&QIntProduct::factorial(b)))
}

/// Rewrites a polynomial that is homogeneous of degree `2S` at every site
/// in the normalized spin product basis.
pub fn poly_to_spin(p: &SitePoly, spin: u32) -> Result<StateVector> {
    let deg = 2 * spin;
    for site in 0..p.sites {
        if !p.is_homogeneous_at(site, deg) {
            return Err(Error::Inhomogeneous { site, expected: deg });
        }
    }
    let norms: Vec<QSurd> = (-(spin as i32)..=spin as i32).map(|m| monomial_norm(spin, m)).collect();
    let mut out = StateVector::zero(spin, p.sites);
    for (mono, c) in &p.terms {
        let config: Vec<i32> = mono.iter().map(|(a, _)| *a as i32 - spin as i32).collect();
        let mut amp: QSurd = c.clone().into();
        for &m in &config {
            amp = &amp * &norms[(m + spin as i32) as usize];
        }
        out.set(config, amp);
    }
    Ok(out)
}

/// Inverse of [`poly_to_spin`]; fails if an amplitude does not come from a
/// Laurent-polynomial monomial coefficient.
pub fn spin_to_poly(state: &StateVector) -> Result<SitePoly> {
    let spin = state.spin();
    let inv_norms: Vec<QSurd> =
        (-(spin as i32)..=spin as i32).map(|m| monomial_norm(spin, m).try_inv().expect("single-term norm")).collect();
    let mut out = SitePoly::zero(state.length());
    for (config, amp) in state.amplitudes() {
        let mut c = amp.clone();
        for &m in config {
            c = &c * &inv_norms[(m + spin as i32) as usize];
        }
        let r = c.to_ratq()?;
        let lp = r
            .as_laurent()
            .cloned()
            .ok_or_else(|| Error::NotRadicalFree(format!("coefficient {r} is not a Laurent polynomial")))?;
        let mono = config.iter().map(|&m| ((spin as i32 + m) as u32, (spin as i32 - m) as u32)).collect();
        out.add_term(mono, lp);
    }
    Ok(out)
}

/// Monomials of a single site of total degree at most `max_deg`.
pub fn monomials_up_to(max_deg: u32) -> Vec<(u32, u32)> {
    (0..=max_deg).flat_map(|d| (0..=d).map(move |a| (a, d - a))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qnum::{q_integer, q_integer_signed};

    fn mono1(a: u32, b: u32) -> SitePoly {
        SitePoly::monomial(vec![(a, b)], LaurentQ::one())
    }

    #[test]
    fn raising_on_lowest_weight() {
        // X^+ y^2 = [2] x y
        let r = apply_generator(&mono1(0, 2), GeneratorTag::XPlus, 0);
        assert_eq!(r, SitePoly::monomial(vec![(1, 1)], q_integer(2)));
    }

    #[test]
    fn highest_weight_is_annihilated() {
        for s in 1..5 {
            assert!(apply_generator(&mono1(2 * s, 0), GeneratorTag::XPlus, 0).is_zero());
        }
    }

    #[test]
    fn q_h_weight() {
        let s = 2u32;
        for m in -2i32..=2 {
            let a = (s as i32 + m) as u32;
            let p = mono1(a, 2 * s - a);
            let r = apply_generator(&p, GeneratorTag::QH, 0);
            assert_eq!(r, p.scale(&LaurentQ::q_pow(2 * m as i64)));
        }
    }

    #[test]
    fn algebra_relations_on_monomials() {
        for (a, b) in monomials_up_to(8) {
            let p = mono1(a, b);
            let pm = apply_generator(&apply_generator(&p, GeneratorTag::XMinus, 0), GeneratorTag::XPlus, 0);
            let mp = apply_generator(&apply_generator(&p, GeneratorTag::XPlus, 0), GeneratorTag::XMinus, 0);
            let comm = &pm - &mp;
            let expect = p.scale(&q_integer_signed(a as i64 - b as i64));
            assert_eq!(comm, expect, "(a,b) = ({a},{b})");
        }
    }

    #[test]
    fn coproduct_singlet_and_weights() {
        // (x_k y_l - y_k x_l)(q x_k y_l - q^-1 y_k x_l), spin 1 on both sites
        let lin = |e: i64| {
            &SitePoly::monomial(vec![(1, 0), (0, 1)], LaurentQ::q_pow(e))
                - &SitePoly::monomial(vec![(0, 1), (1, 0)], LaurentQ::q_pow(-e))
        };
        let singlet = &lin(0) * &lin(1);
        assert!(coproduct_apply(&singlet, GeneratorTag::XPlus, (0, 1)).unwrap().is_zero());
        assert!(coproduct_apply(&singlet, GeneratorTag::XMinus, (0, 1)).unwrap().is_zero());
        let s = 3u32;
        let top = SitePoly::monomial(vec![(2 * s, 0), (2 * s, 0)], LaurentQ::one());
        let h = coproduct_apply(&top, GeneratorTag::H, (0, 1)).unwrap();
        assert_eq!(h, top.scale(&LaurentQ::from_int(4 * s as i64)));
        assert!(coproduct_apply(&top, GeneratorTag::XPlus, (0, 0)).is_err());
    }

    #[test]
    fn odd_weight_rejected_by_half_power() {
        let p = SitePoly::monomial(vec![(1, 0), (1, 1)], LaurentQ::one());
        assert!(coproduct_apply(&p, GeneratorTag::XPlus, (0, 1)).is_err());
    }

    #[test]
    fn division_by_single_factor() {
        let f = &SitePoly::monomial(vec![(1, 0), (0, 1)], LaurentQ::q_pow(1))
            - &SitePoly::monomial(vec![(0, 1), (1, 0)], LaurentQ::q_pow(-1));
        let g = &SitePoly::x(2, 0) + &SitePoly::y(2, 1);
        let prod = &f * &g;
        let (quot, rem) = prod.div_rem(&f).unwrap();
        assert!(rem.is_zero());
        assert_eq!(quot, g);
        let (_, rem) = (&prod + &SitePoly::x(2, 1)).div_rem(&f).unwrap();
        assert!(!rem.is_zero());
    }

    #[test]
    fn spin_basis_round_trip_and_top_norm() {
        let s = 2;
        let p = SitePoly::monomial(vec![(4, 0)], LaurentQ::one());
        let v = poly_to_spin(&p, s).unwrap();
        let amp = v.get(&[2]).unwrap();
        let fact4 = QSurd::sqrt_of(&QIntProduct::factorial(4));
        assert_eq!(amp, &fact4);
        assert_eq!(spin_to_poly(&v).unwrap(), p);
        assert!(poly_to_spin(&SitePoly::zero(3), 2).unwrap().is_zero());
        assert!(matches!(
            poly_to_spin(&SitePoly::monomial(vec![(1, 0)], LaurentQ::one()), 2),
            Err(Error::Inhomogeneous { .. })
        ));
    }
}
