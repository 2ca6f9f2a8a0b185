//! Exterior algebra on the fixed oriented Euclidean space with orthonormal
//! coframe `e^1, ..., e^7`.
//!
//! A [`KForm`] is a sparse map from basis monomials to real coefficients.
//! Monomials are stored as bitmasks over the seven indices, so the whole
//! calculus (wedge, Hodge star, contraction, matrix actions) reduces to
//! sign bookkeeping on permutations of at most seven letters.
//!
//! Volume form is `e^{1234567}`; `∗∗ = id` in every degree.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix4, SMatrix};

use crate::{Error, Result};

/// Dimension of the ambient space.
pub const DIM: usize = 7;

/// Coefficients with absolute value below this are dropped.
pub const PRUNE: f64 = 1e-14;

pub type Matrix7 = SMatrix<f64, 7, 7>;

/// Strictly increasing sequence of indices in `1..=7`, stored as a bitmask
/// (bit `i - 1` set iff `i` is present).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(u8);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);
    pub const FULL: MultiIndex = MultiIndex(0x7f);

    /// Builds a multi-index from 1-based indices, which must be strictly increasing.
    pub fn new(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u8;
        let mut last = 0usize;
        for &i in indices {
            if i == 0 || i > DIM || i <= last {
                return Err(Error::InvalidMultiIndex(indices.to_vec()));
            }
            mask |= 1 << (i - 1);
            last = i;
        }
        Ok(MultiIndex(mask))
    }

    pub fn from_mask(mask: u8) -> Self {
        MultiIndex(mask & 0x7f)
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=DIM).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    /// 1-based indices in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        (1..=DIM).filter(move |&i| self.0 & (1 << (i - 1)) != 0)
    }

    pub fn complement(self) -> Self {
        MultiIndex(!self.0 & 0x7f)
    }

    /// All multi-indices of the given degree, in lexicographic order.
    pub fn all_of_degree(degree: usize) -> Vec<MultiIndex> {
        let mut out: Vec<_> = (0u8..0x80)
            .map(MultiIndex)
            .filter(|m| m.degree() == degree)
            .collect();
        out.sort();
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.indices().cmp(other.indices()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^{{")?;
        for i in self.indices() {
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Sign of `e^I ∧ e^J` relative to `e^{I ∪ J}`, or `None` if they overlap.
fn wedge_sign(i: MultiIndex, j: MultiIndex) -> Option<f64> {
    if i.0 & j.0 != 0 {
        return None;
    }
    // count pairs (a in I, b in J) with a > b
    let mut inversions = 0u32;
    for b in j.indices() {
        let above = i.0 >> b;
        inversions += above.count_ones();
    }
    Some(if inversions % 2 == 0 { 1.0 } else { -1.0 })
}

/// Sorts a sequence of distinct indices, returning the permutation sign.
/// `None` when an index repeats.
fn sort_sign(seq: &[usize]) -> Option<(f64, MultiIndex)> {
    let mut mask = 0u8;
    let mut inversions = 0usize;
    for (pos, &a) in seq.iter().enumerate() {
        let bit = 1u8 << (a - 1);
        if mask & bit != 0 {
            return None;
        }
        mask |= bit;
        inversions += seq[pos + 1..].iter().filter(|&&b| b < a).count();
    }
    let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
    Some((sign, MultiIndex(mask)))
}

/// Sparse homogeneous form of fixed degree.
#[derive(Clone, PartialEq, Default)]
pub struct KForm {
    degree: usize,
    coeffs: BTreeMap<MultiIndex, f64>,
}

impl KForm {
    pub fn zero(degree: usize) -> Self {
        KForm {
            degree: degree.min(DIM),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn scalar(c: f64) -> Self {
        let mut f = KForm::zero(0);
        f.add_term(MultiIndex::EMPTY, c);
        f
    }

    /// `c · e^{indices}`; the indices may be given in any order, the sign of
    /// the sorting permutation is absorbed. Panics on out-of-range input.
    pub fn monomial(c: f64, indices: &[usize]) -> Self {
        assert!(indices.iter().all(|&i| (1..=DIM).contains(&i)), "index out of range");
        let mut f = KForm::zero(indices.len());
        if let Some((sign, m)) = sort_sign(indices) {
            f.add_term(m, sign * c);
        }
        f
    }

    pub fn basis(indices: &[usize]) -> Self {
        KForm::monomial(1.0, indices)
    }

    pub fn volume() -> Self {
        KForm::basis(&[1, 2, 3, 4, 5, 6, 7])
    }

    /// Builds a form from `(coefficient, indices)` pairs of a common degree.
    pub fn from_terms(degree: usize, terms: &[(f64, &[usize])]) -> Self {
        let mut f = KForm::zero(degree);
        for (c, idx) in terms {
            assert_eq!(idx.len(), degree, "term degree mismatch");
            f += KForm::monomial(*c, idx);
        }
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        self.coeffs.iter().map(|(m, c)| (*m, *c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, m: MultiIndex) -> f64 {
        self.coeffs.get(&m).copied().unwrap_or(0.0)
    }

    /// Coefficient of the (sorted) monomial with the given indices.
    pub fn coeff_of(&self, indices: &[usize]) -> f64 {
        match sort_sign(indices) {
            Some((sign, m)) => sign * self.coeff(m),
            None => 0.0,
        }
    }

    /// Value of a 0-form, or of the top-degree coefficient of a 7-form.
    pub fn top_or_scalar(&self) -> f64 {
        self.coeffs.values().next().copied().unwrap_or(0.0)
    }

    fn add_term(&mut self, m: MultiIndex, c: f64) {
        debug_assert_eq!(m.degree(), self.degree);
        let entry = self.coeffs.entry(m).or_insert(0.0);
        *entry += c;
        if entry.abs() < PRUNE {
            self.coeffs.remove(&m);
        }
    }

    /// Dense coefficient vector in the lexicographic monomial basis of this degree.
    pub fn to_dense(&self) -> Vec<f64> {
        MultiIndex::all_of_degree(self.degree)
            .into_iter()
            .map(|m| self.coeff(m))
            .collect()
    }

    pub fn from_dense(degree: usize, values: &[f64]) -> Self {
        let basis = MultiIndex::all_of_degree(degree);
        assert_eq!(basis.len(), values.len(), "dense length mismatch");
        let mut f = KForm::zero(degree);
        for (m, &c) in basis.into_iter().zip(values) {
            f.add_term(m, c);
        }
        f
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = KForm::zero(self.degree);
        for (m, c) in self.terms() {
            out.add_term(m, s * c);
        }
        out
    }

    /// Euclidean norm in the orthonormal monomial basis.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        // fold from +0.0: an empty f64 sum is -0.0
        self.coeffs.values().fold(0.0, |acc, c| acc + c * c)
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Exterior product. If the degrees sum past seven the zero 7-form is returned.
    pub fn wedge(&self, other: &KForm) -> KForm {
        let mut out = KForm::zero(self.degree + other.degree);
        if self.degree + other.degree > DIM {
            return out;
        }
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                if let Some(sign) = wedge_sign(i, j) {
                    out.add_term(MultiIndex(i.0 | j.0), sign * a * b);
                }
            }
        }
        out
    }

    /// Hodge star: `∗e^I = ε(I, I^c) e^{I^c}` where `e^I ∧ e^{I^c} = ε vol`.
    pub fn hodge(&self) -> KForm {
        let mut out = KForm::zero(DIM - self.degree);
        for (m, c) in self.terms() {
            let comp = m.complement();
            let sign = wedge_sign(m, comp).expect("complement is disjoint");
            out.add_term(comp, sign * c);
        }
        out
    }

    /// Contraction with the basis vector `e_v` (1-based).
    pub fn interior(&self, v: usize) -> KForm {
        assert!((1..=DIM).contains(&v), "basis vector index out of range");
        let mut out = KForm::zero(self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        let bit = 1u8 << (v - 1);
        for (m, c) in self.terms() {
            if m.0 & bit == 0 {
                continue;
            }
            let position = (m.0 & (bit - 1)).count_ones();
            let sign = if position % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term(MultiIndex(m.0 & !bit), sign * c);
        }
        out
    }

    /// Inner product induced by the orthonormal coframe.
    pub fn inner(&self, other: &KForm) -> Result<f64> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(self
            .terms()
            .fold(0.0, |acc, (m, c)| acc + c * other.coeff(m)))
    }

    /// Derivation induced by a 7×7 matrix acting on covectors by
    /// `θ(Q)e^k = -Σ_j Q[k][j] e^j`, i.e. `(θ(Q)α)(x, ..) = -α(Qx, ..) - ...`.
    pub fn theta7(&self, q: &Matrix7) -> KForm {
        let mut out = KForm::zero(self.degree);
        let mut seq = [0usize; DIM];
        for (m, c) in self.terms() {
            let idx: Vec<usize> = m.indices().collect();
            for pos in 0..idx.len() {
                let k = idx[pos];
                for j in 1..=DIM {
                    let qkj = q[(k - 1, j - 1)];
                    if qkj == 0.0 {
                        continue;
                    }
                    seq[..idx.len()].copy_from_slice(&idx);
                    seq[pos] = j;
                    if let Some((sign, target)) = sort_sign(&seq[..idx.len()]) {
                        out.add_term(target, -sign * qkj * c);
                    }
                }
            }
        }
        out
    }

    /// Action of a 4×4 matrix on the `e^3..e^6` slots (zero on `e^1, e^2, e^7`).
    pub fn theta(&self, d: &Matrix4<f64>) -> KForm {
        self.theta7(&embed_n(d))
    }

    /// Renders as a signed monomial sum, e.g. `+1.000 e^{127} -1.000 e^{146}`.
    pub fn render(&self, precision: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms()
            .map(|(m, c)| {
                let idx: String = m.indices().map(|i| i.to_string()).collect();
                let sign = if c < 0.0 { '-' } else { '+' };
                if m.degree() == 0 {
                    format!("{sign}{:.*}", precision, c.abs())
                } else {
                    format!("{sign}{:.*} e^{{{idx}}}", precision, c.abs())
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Places a 4×4 block on the `e_3..e_6` slots of a 7×7 matrix.
pub fn embed_n(d: &Matrix4<f64>) -> Matrix7 {
    let mut q = Matrix7::zeros();
    q.fixed_view_mut::<4, 4>(2, 2).copy_from(d);
    q
}

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(3))
    }
}

impl fmt::Debug for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KForm<{}>({})", self.degree, self.render(6))
    }
}

impl AddAssign<KForm> for KForm {
    fn add_assign(&mut self, rhs: KForm) {
        *self += &rhs;
    }
}

impl AddAssign<&KForm> for KForm {
    fn add_assign(&mut self, rhs: &KForm) {
        if rhs.is_zero() {
            return;
        }
        if self.is_zero() && self.degree != rhs.degree {
            // an empty form carries no degree information worth keeping
            self.degree = rhs.degree;
        }
        assert_eq!(self.degree, rhs.degree, "cannot add forms of different degree");
        for (m, c) in rhs.terms() {
            self.add_term(m, c);
        }
    }
}

impl Add for KForm {
    type Output = KForm;
    fn add(mut self, rhs: KForm) -> KForm {
        self += &rhs;
        self
    }
}

impl Add<&KForm> for &KForm {
    type Output = KForm;
    fn add(self, rhs: &KForm) -> KForm {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Neg for KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        self.scale(-1.0)
    }
}

impl Neg for &KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        self.scale(-1.0)
    }
}

impl Sub for KForm {
    type Output = KForm;
    fn sub(self, rhs: KForm) -> KForm {
        self + (-rhs)
    }
}

impl Sub<&KForm> for &KForm {
    type Output = KForm;
    fn sub(self, rhs: &KForm) -> KForm {
        self + &(-rhs)
    }
}

impl Mul<&KForm> for f64 {
    type Output = KForm;
    fn mul(self, rhs: &KForm) -> KForm {
        rhs.scale(self)
    }
}

impl Mul<KForm> for f64 {
    type Output = KForm;
    fn mul(self, rhs: KForm) -> KForm {
        rhs.scale(self)
    }
}

/// Free-function spellings of the core operations.
pub fn wedge(a: &KForm, b: &KForm) -> KForm {
    a.wedge(b)
}

pub fn hodge(a: &KForm) -> KForm {
    a.hodge()
}

pub fn interior(v: usize, a: &KForm) -> KForm {
    a.interior(v)
}

pub fn inner(a: &KForm, b: &KForm) -> Result<f64> {
    a.inner(b)
}

pub fn theta(d: &Matrix4<f64>, a: &KForm) -> KForm {
    a.theta(d)
}

/// The standard positive 3-form and the forms built from it.
pub mod standard {
    use super::KForm;

    /// `φ = e^{127} + e^{347} + e^{567} + e^{135} - e^{146} - e^{236} - e^{245}`.
    pub fn phi() -> KForm {
        KForm::from_terms(
            3,
            &[
                (1.0, &[1, 2, 7]),
                (1.0, &[3, 4, 7]),
                (1.0, &[5, 6, 7]),
                (1.0, &[1, 3, 5]),
                (-1.0, &[1, 4, 6]),
                (-1.0, &[2, 3, 6]),
                (-1.0, &[2, 4, 5]),
            ],
        )
    }

    /// `ψ = ω7∧e^{12} + ω1∧e^{27} - ω2∧e^{17} + e^{3456}`, assembled from the pieces.
    pub fn psi() -> KForm {
        omega7().wedge(&KForm::basis(&[1, 2]))
            + omega1().wedge(&KForm::basis(&[2, 7]))
            - omega2().wedge(&KForm::basis(&[1, 7]))
            + KForm::basis(&[3, 4, 5, 6])
    }

    pub fn omega7() -> KForm {
        KForm::from_terms(2, &[(1.0, &[3, 4]), (1.0, &[5, 6])])
    }

    pub fn omega1() -> KForm {
        KForm::from_terms(2, &[(1.0, &[3, 5]), (-1.0, &[4, 6])])
    }

    pub fn omega2() -> KForm {
        KForm::from_terms(2, &[(-1.0, &[3, 6]), (-1.0, &[4, 5])])
    }

    pub fn omega_bar7() -> KForm {
        KForm::from_terms(2, &[(1.0, &[3, 4]), (-1.0, &[5, 6])])
    }

    pub fn omega_bar1() -> KForm {
        KForm::from_terms(2, &[(1.0, &[3, 5]), (1.0, &[4, 6])])
    }

    pub fn omega_bar2() -> KForm {
        KForm::from_terms(2, &[(-1.0, &[3, 6]), (1.0, &[4, 5])])
    }

    pub fn e(i: usize) -> KForm {
        KForm::basis(&[i])
    }

    pub fn e2(i: usize, j: usize) -> KForm {
        KForm::basis(&[i, j])
    }
}

#[cfg(test)]
mod tests {
    use super::standard::*;
    use super::*;

    fn close(a: &KForm, b: &KForm, tol: f64) -> bool {
        a.degree() == b.degree() && (a - b).max_abs() < tol
    }

    #[test]
    fn basis_products() {
        assert_eq!(e(1).wedge(&e(2)), KForm::basis(&[1, 2]));
        assert!(e2(1, 2).wedge(&e2(1, 2)).is_zero());
        assert_eq!(e(2).wedge(&e(1)), KForm::monomial(-1.0, &[1, 2]));
    }

    #[test]
    fn degree_overflow_is_zero_top_form() {
        let w = phi().wedge(&phi()).wedge(&phi());
        assert_eq!(w.degree(), 7);
        assert!(w.is_zero());
    }

    #[test]
    fn phi_wedge_psi_is_seven_vol() {
        assert!(close(&phi().wedge(&psi()), &KForm::volume().scale(7.0), 1e-14));
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(KForm::scalar(1.0).hodge(), KForm::volume());
        assert!(close(&phi().hodge(), &psi(), 1e-15));
        let a = KForm::basis(&[1, 2, 7]);
        assert_eq!(a.hodge().hodge(), a);
    }

    #[test]
    fn psi_matches_printed_monomials() {
        let printed = KForm::from_terms(
            4,
            &[
                (1.0, &[1, 2, 3, 4]),
                (1.0, &[1, 2, 5, 6]),
                (1.0, &[2, 3, 5, 7]),
                (-1.0, &[2, 4, 6, 7]),
                (1.0, &[1, 3, 6, 7]),
                (1.0, &[1, 4, 5, 7]),
                (1.0, &[3, 4, 5, 6]),
            ],
        );
        assert_eq!(psi(), printed);
    }

    #[test]
    fn interior_examples() {
        assert_eq!(e2(1, 2).interior(1), e(2));
        assert_eq!(e2(1, 2).interior(2), -e(1));
        let i1 = phi().interior(1);
        let v = i1.wedge(&i1).wedge(&phi());
        assert!(close(&v, &KForm::volume().scale(6.0), 1e-14));
    }

    #[test]
    fn metric_from_phi_is_identity() {
        for x in 1..=7 {
            for y in 1..=7 {
                let g = phi()
                    .interior(x)
                    .wedge(&phi().interior(y))
                    .wedge(&phi())
                    .top_or_scalar()
                    / 6.0;
                let expected = if x == y { 1.0 } else { 0.0 };
                assert!((g - expected).abs() < 1e-14, "g({x},{y}) = {g}");
            }
        }
    }

    #[test]
    fn inner_examples() {
        assert_eq!(e2(1, 2).inner(&e2(1, 2)).unwrap(), 1.0);
        assert_eq!(phi().inner(&phi()).unwrap(), 7.0);
        assert_eq!(omega_bar7().inner(&omega7()).unwrap(), 0.0);
        assert!(matches!(
            phi().inner(&psi()),
            Err(Error::DegreeMismatch(3, 4))
        ));
    }

    #[test]
    fn theta_examples() {
        let i4 = Matrix4::identity();
        assert_eq!(e2(3, 4).theta(&i4), KForm::monomial(-2.0, &[3, 4]));
        let (a1, a2, a3) = (0.7, -1.3, 2.1);
        let a4 = -(a1 + a2 + a3);
        let d = Matrix4::from_diagonal(&nalgebra::Vector4::new(a1, a2, a3, a4));
        let got = omega7().theta(&d);
        assert!(close(&got, &omega_bar7().scale(-(a1 + a2)), 1e-14));
        assert!(phi().theta(&Matrix4::zeros()).is_zero());
    }

    #[test]
    fn theta_acts_as_minus_transpose_on_covectors() {
        // θ(D)e^k = -Σ_j D[k][j] e^j, with e^k ↔ slot k+2
        let mut d = Matrix4::zeros();
        d[(0, 1)] = 1.0; // D e_4 = e_3
        assert_eq!(e(3).theta(&d), -e(4));
        assert!(e(4).theta(&d).is_zero());
    }

    #[test]
    fn omega_relations() {
        let om = [omega7(), omega1(), omega2()];
        let ob = [omega_bar7(), omega_bar1(), omega_bar2()];
        let e3456 = KForm::basis(&[3, 4, 5, 6]);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { e3456.scale(2.0) } else { KForm::zero(4) };
                assert!(close(&om[i].wedge(&om[j]), &expected, 1e-15) || (i != j && om[i].wedge(&om[j]).is_zero()));
                assert!(ob[i].wedge(&om[j]).is_zero());
            }
        }
    }

    #[test]
    fn phi_decomposition() {
        let rebuilt = omega7().wedge(&e(7))
            + omega1().wedge(&e(1))
            + omega2().wedge(&e(2))
            + KForm::basis(&[1, 2, 7]);
        assert_eq!(rebuilt, phi());
    }

    #[test]
    fn render_format() {
        assert_eq!(KForm::basis(&[1, 2, 7]).render(3), "+1.000 e^{127}");
        assert_eq!(KForm::zero(3).to_string(), "0");
        assert_eq!(
            (e(1) - e(2).scale(2.5)).render(2),
            "+1.00 e^{1} -2.50 e^{2}"
        );
    }

    #[test]
    fn dense_roundtrip() {
        let v = phi().to_dense();
        assert_eq!(v.len(), 35);
        assert_eq!(KForm::from_dense(3, &v), phi());
    }

    #[test]
    fn multi_index_validation() {
        assert!(MultiIndex::new(&[1, 2, 7]).is_ok());
        assert!(MultiIndex::new(&[2, 1]).is_err());
        assert!(MultiIndex::new(&[0]).is_err());
        assert!(MultiIndex::new(&[8]).is_err());
        assert_eq!(MultiIndex::new(&[]).unwrap().degree(), 0);
    }
}
