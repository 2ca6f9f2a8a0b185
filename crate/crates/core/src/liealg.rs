//! Solvable Lie algebras `g_{A,B,C} = a ⋉ n` with `a = <e7, e1, e2>` abelian,
//! `n = <e3, e4, e5, e6>` an abelian ideal and
//! `ad e7|n = A`, `ad e1|n = B`, `ad e2|n = C`.
//!
//! Indices are 1-based in the public API (`e_1..e_7`); matrices over the
//! whole algebra use the internal order `(e1, ..., e7)`. Use
//! [`to_display_order`] for the `(e7, e1, e2, e3, ..., e6)` presentation.

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::forms::{KForm, Matrix7};
use crate::numerics::{numerical_rank, Tolerances};
use crate::{Error, Result};

/// 0-based positions of `e7, e1, e2` in the internal order.
pub const A_SLOTS: [usize; 3] = [6, 0, 1];

/// Structure constants: `c[x][y][z]` is the `e_{z+1}` component of `[e_{x+1}, e_{y+1}]`.
pub type StructureConstants = [[[f64; 7]; 7]; 7];

/// Three commuting traceless 4×4 matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTriple {
    a: Matrix4<f64>,
    b: Matrix4<f64>,
    c: Matrix4<f64>,
}

fn commutator(x: &Matrix4<f64>, y: &Matrix4<f64>) -> Matrix4<f64> {
    x * y - y * x
}

impl BracketTriple {
    /// Validates tracelessness and pairwise commutation (relative tolerance 1e-9).
    pub fn new(a: Matrix4<f64>, b: Matrix4<f64>, c: Matrix4<f64>) -> Result<Self> {
        let tol = Tolerances::default().commute;
        for (name, m) in [("A", &a), ("B", &b), ("C", &c)] {
            let tr = m.trace();
            if tr.abs() > tol * (1.0 + m.norm()) {
                return Err(Error::NotTraceless(name, tr));
            }
        }
        for (name, x, y) in [("A,B", &a, &b), ("A,C", &a, &c), ("B,C", &b, &c)] {
            let k = commutator(x, y).norm();
            if k > tol * (1.0 + x.norm() * y.norm()) {
                return Err(Error::NotCommuting(name, k));
            }
        }
        Ok(BracketTriple { a, b, c })
    }

    pub fn zero() -> Self {
        BracketTriple {
            a: Matrix4::zeros(),
            b: Matrix4::zeros(),
            c: Matrix4::zeros(),
        }
    }

    /// Diagonal triple; each diagonal must sum to zero.
    pub fn diagonal(a: [f64; 4], b: [f64; 4], c: [f64; 4]) -> Result<Self> {
        let d = |v: [f64; 4]| Matrix4::from_diagonal(&Vector4::from(v));
        BracketTriple::new(d(a), d(b), d(c))
    }

    pub fn a(&self) -> &Matrix4<f64> {
        &self.a
    }

    pub fn b(&self) -> &Matrix4<f64> {
        &self.b
    }

    pub fn c(&self) -> &Matrix4<f64> {
        &self.c
    }

    /// `(A, B, C)` paired with the internal slot of `e7, e1, e2`.
    pub fn slots(&self) -> [(usize, &Matrix4<f64>); 3] {
        [(A_SLOTS[0], &self.a), (A_SLOTS[1], &self.b), (A_SLOTS[2], &self.c)]
    }

    pub fn scaled(&self, s: f64) -> Self {
        BracketTriple {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
        }
    }

    pub fn transposed(&self) -> Self {
        BracketTriple {
            a: self.a.transpose(),
            b: self.b.transpose(),
            c: self.c.transpose(),
        }
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        [&self.a, &self.b, &self.c].iter().all(|m| {
            (0..4).all(|i| (0..4).all(|j| i == j || m[(i, j)].abs() <= tol))
        })
    }

    pub fn structure_constants(&self) -> StructureConstants {
        let mut c = [[[0.0; 7]; 7]; 7];
        for (slot, m) in self.slots() {
            for j in 0..4 {
                for i in 0..4 {
                    // [e_slot, e_{n_j}] = Σ_i M[i][j] e_{n_i}
                    c[slot][2 + j][2 + i] = m[(i, j)];
                    c[2 + j][slot][2 + i] = -m[(i, j)];
                }
            }
        }
        c
    }

    /// `de^z` for every basis covector, from `de^z(x, y) = -e^z([x, y])`.
    fn differentials_of_basis(&self) -> Vec<KForm> {
        let c = self.structure_constants();
        (0..7)
            .map(|z| {
                let mut f = KForm::zero(2);
                for x in 0..7 {
                    for y in x + 1..7 {
                        let v = c[x][y][z];
                        if v != 0.0 {
                            f += KForm::monomial(-v, &[x + 1, y + 1]);
                        }
                    }
                }
                f
            })
            .collect()
    }

    /// Chevalley–Eilenberg differential, extended from `de^z` as an anti-derivation.
    pub fn d(&self, alpha: &KForm) -> KForm {
        let basis_d = self.differentials_of_basis();
        let mut out = KForm::zero((alpha.degree() + 1).min(7));
        for (m, coeff) in alpha.terms() {
            let idx: Vec<usize> = m.indices().collect();
            for r in 0..idx.len() {
                let de = &basis_d[idx[r] - 1];
                if de.is_zero() {
                    continue;
                }
                let mut term = KForm::scalar(coeff);
                for (pos, &k) in idx.iter().enumerate() {
                    term = if pos == r {
                        term.wedge(de)
                    } else {
                        term.wedge(&KForm::basis(&[k]))
                    };
                }
                if r % 2 == 1 {
                    term = -term;
                }
                out += term;
            }
        }
        out
    }
}

/// Chevalley–Eilenberg differential of `alpha` on `g_{A,B,C}`.
pub fn ce_differential(t: &BracketTriple, alpha: &KForm) -> KForm {
    t.d(alpha)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub independent: bool,
    pub simultaneously_real_diagonalizable: bool,
    pub rank: usize,
    /// Columns are a joint real eigenbasis `P` with `P^{-1} X P` diagonal.
    pub witness: Option<Vec<Vec<f64>>>,
}

impl CompatibilityReport {
    pub fn compatible(&self) -> bool {
        self.independent && self.simultaneously_real_diagonalizable
    }
}

pub fn check_compatible(t: &BracketTriple) -> CompatibilityReport {
    check_compatible_with(t, &Tolerances::default())
}

pub fn check_compatible_with(t: &BracketTriple, tol: &Tolerances) -> CompatibilityReport {
    let mut stack = DMatrix::<f64>::zeros(3, 16);
    for (row, m) in [&t.a, &t.b, &t.c].into_iter().enumerate() {
        for (k, v) in m.iter().enumerate() {
            stack[(row, k)] = *v;
        }
    }
    let sv: Vec<f64> = stack.svd(false, false).singular_values.iter().cloned().collect();
    let (rank, _) = numerical_rank(&sv, tol.rank_relative);

    let witness = joint_eigenbasis(t, tol);
    CompatibilityReport {
        independent: rank == 3,
        simultaneously_real_diagonalizable: witness.is_some(),
        rank,
        witness: witness.map(|p| {
            (0..4).map(|i| (0..4).map(|j| p[(i, j)]).collect()).collect()
        }),
    }
}

/// Joint real eigenbasis of a commuting triple, if one exists.
///
/// The eigenspaces of a generic combination `A + x B + y C` are the joint
/// eigenspaces; each is found as a numerical null space and the resulting
/// basis is checked for conditioning and for diagonalising all three.
fn joint_eigenbasis(t: &BracketTriple, tol: &Tolerances) -> Option<Matrix4<f64>> {
    let x = t.a + t.b * 0.618_033_988_749_895 + t.c * 1.324_717_957_244_746;
    let scale = 1.0f64.max(x.norm());
    let eig = x.complex_eigenvalues();
    if eig.iter().any(|z| z.im.abs() > tol.real_eigenvalue * scale) {
        return None;
    }
    let mut re: Vec<f64> = eig.iter().map(|z| z.re).collect();
    re.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for v in re {
        match clusters.last_mut() {
            Some(cl) if (v - cl[cl.len() - 1]).abs() <= 1e-6 * scale => cl.push(v),
            _ => clusters.push(vec![v]),
        }
    }

    let mut columns: Vec<Vector4<f64>> = Vec::new();
    for cl in &clusters {
        let lambda = cl.iter().sum::<f64>() / cl.len() as f64;
        let shifted = x - Matrix4::identity() * lambda;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t?;
        let null: Vec<usize> = (0..4)
            .filter(|&i| svd.singular_values[i] <= 1e-8 * scale)
            .collect();
        if null.len() != cl.len() {
            return None;
        }
        for i in null {
            columns.push(v_t.row(i).transpose());
        }
    }
    if columns.len() != 4 {
        return None;
    }
    let p = Matrix4::from_columns(&columns);
    let sv = p.svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if smin <= 1e-8 * smax {
        return None;
    }
    let p_inv = p.try_inverse()?;
    for m in [&t.a, &t.b, &t.c] {
        let d = p_inv * m * p;
        let off = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .fold(0.0f64, |acc, (i, j)| acc.max(d[(i, j)].abs()));
        if off > 1e-8 * scale {
            return None;
        }
    }
    Some(p)
}

fn sym(x: &Matrix4<f64>) -> Matrix4<f64> {
    (x + x.transpose()) * 0.5
}

/// Ricci operator of the metric making `e1..e7` orthonormal, in internal order.
pub fn ricci(t: &BracketTriple) -> Matrix7 {
    let mats = [&t.a, &t.b, &t.c];
    let s: Vec<Matrix4<f64>> = mats.iter().map(|m| sym(m)).collect();
    let mut ric = Matrix7::zeros();
    for i in 0..3 {
        for j in 0..3 {
            ric[(A_SLOTS[i], A_SLOTS[j])] = -(s[i] * s[j]).trace();
        }
    }
    let mut n_block = Matrix4::zeros();
    for m in mats {
        n_block += commutator(m, &m.transpose()) * 0.5;
    }
    ric.fixed_view_mut::<4, 4>(2, 2).copy_from(&n_block);
    ric
}

/// `Ric|a` as a 3×3 matrix in the order `(e7, e1, e2)`.
pub fn ricci_on_a(t: &BracketTriple) -> Matrix3<f64> {
    let ric = ricci(t);
    Matrix3::from_fn(|i, j| ric[(A_SLOTS[i], A_SLOTS[j])])
}

pub fn scalar_curvature(t: &BracketTriple) -> f64 {
    ricci(t).trace()
}

/// Homothety invariant `F = scal² / tr Ric²`.
pub fn homothety_f(t: &BracketTriple) -> Result<f64> {
    let ric = ricci(t);
    let tr_sq = (ric * ric).trace();
    let scale = [&t.a, &t.b, &t.c].iter().map(|m| m.norm_squared()).sum::<f64>();
    if tr_sq <= 1e-24 * (1.0 + scale * scale) || tr_sq == 0.0 {
        return Err(Error::FlatMetric);
    }
    let scal = ric.trace();
    Ok(scal * scal / tr_sq)
}

/// Permutes a matrix from internal `(e1..e7)` order to `(e7, e1, e2, e3, .., e6)`.
pub fn to_display_order(m: &Matrix7) -> Matrix7 {
    const PERM: [usize; 7] = [6, 0, 1, 2, 3, 4, 5];
    Matrix7::from_fn(|i, j| m[(PERM[i], PERM[j])])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolvsolitonCheck {
    pub is_solvsoliton: bool,
    /// The constant `c` with `Ric|a = c I` (meaningful when `is_solvsoliton`).
    pub lambda: f64,
    /// Flat metric: the criterion does not apply.
    pub degenerate: bool,
}

/// Normal matrices and scalar `Ric|a`.
pub fn solvsoliton_check(t: &BracketTriple) -> SolvsolitonCheck {
    let tol = 1e-9;
    let ric = ricci(t);
    let scale = 1.0 + ric.norm();
    if ric.norm() <= 1e-14 {
        return SolvsolitonCheck {
            is_solvsoliton: false,
            lambda: 0.0,
            degenerate: true,
        };
    }
    let normal = [&t.a, &t.b, &t.c]
        .iter()
        .all(|m| commutator(m, &m.transpose()).norm() <= tol * (1.0 + m.norm_squared()));
    let ra = ricci_on_a(t);
    let c = ra.trace() / 3.0;
    let scalar = (ra - Matrix3::identity() * c).norm() <= tol * scale;
    SolvsolitonCheck {
        is_solvsoliton: normal && scalar,
        lambda: c,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::standard::*;

    fn erp_triple() -> BracketTriple {
        BracketTriple::diagonal([1., 1., -1., -1.], [1., -1., 1., -1.], [1., -1., -1., 1.]).unwrap()
    }

    fn jordan() -> Matrix4<f64> {
        let mut n = Matrix4::zeros();
        n[(0, 1)] = 1.0;
        n[(1, 2)] = 1.0;
        n[(2, 3)] = 1.0;
        n
    }

    #[test]
    fn rejects_bad_triples() {
        let mut x = Matrix4::zeros();
        x[(0, 1)] = 1.0;
        let y = x.transpose();
        assert!(matches!(
            BracketTriple::new(x, y, Matrix4::zeros()),
            Err(Error::NotCommuting("A,B", _))
        ));
        assert!(matches!(
            BracketTriple::new(Matrix4::identity(), Matrix4::zeros(), Matrix4::zeros()),
            Err(Error::NotTraceless("A", _))
        ));
    }

    #[test]
    fn differential_examples() {
        assert!(BracketTriple::zero().d(&phi()).is_zero());
        assert!(erp_triple().d(&phi()).is_zero());
        let t = BracketTriple::diagonal([1., -1., 0., 0.], [0.; 4], [0.; 4]).unwrap();
        let expected = omega_bar1().wedge(&e2(1, 7)) + omega_bar2().wedge(&e2(2, 7));
        assert!((t.d(&phi()) - expected).max_abs() < 1e-14);
    }

    #[test]
    fn basis_differential_matches_bracket() {
        // de^3(e7, e3) = -e^3([e7, e3]) = -A[0][0]
        let t = BracketTriple::diagonal([2., -1., 0., -1.], [0.; 4], [0.; 4]).unwrap();
        let de3 = t.d(&e(3));
        assert_eq!(de3.coeff_of(&[7, 3]), -2.0);
        assert!(t.d(&e(7)).is_zero());
    }

    #[test]
    fn compatibility_examples() {
        let r = check_compatible(&erp_triple());
        assert!(r.independent && r.simultaneously_real_diagonalizable && r.compatible());

        let a = Matrix4::from_diagonal(&Vector4::new(1., -1., 1., -1.));
        let r = check_compatible(&BracketTriple::new(a, a * 2.0, a * 3.0).unwrap());
        assert!(!r.independent);
        assert_eq!(r.rank, 1);
        assert!(r.simultaneously_real_diagonalizable);

        let r = check_compatible(&BracketTriple::new(jordan(), Matrix4::zeros(), Matrix4::zeros()).unwrap());
        assert!(!r.simultaneously_real_diagonalizable);
    }

    #[test]
    fn compatibility_of_conjugated_triple() {
        let p = Matrix4::new(
            2., 1., 0., 0.5, 0., 1., 3., 0., 1., 0., 1., 1., 0., 2., 0., 1.,
        );
        let p_inv = p.try_inverse().unwrap();
        let t = erp_triple();
        let conj = BracketTriple::new(p * t.a() * p_inv, p * t.b() * p_inv, p * t.c() * p_inv).unwrap();
        let r = check_compatible(&conj);
        assert!(r.compatible());
    }

    #[test]
    fn complex_spectrum_is_not_real_diagonalizable() {
        // rotation generator block plus its negative keeps the trace zero
        let mut j = Matrix4::zeros();
        j[(0, 1)] = -1.0;
        j[(1, 0)] = 1.0;
        j[(2, 3)] = 1.0;
        j[(3, 2)] = -1.0;
        let r = check_compatible(&BracketTriple::new(j, Matrix4::zeros(), Matrix4::zeros()).unwrap());
        assert!(!r.simultaneously_real_diagonalizable);
    }

    #[test]
    fn ricci_examples() {
        let ric = ricci(&erp_triple());
        let expected = Matrix7::from_diagonal(&nalgebra::SVector::<f64, 7>::from([
            -4., -4., 0., 0., 0., 0., -4.,
        ]));
        assert!((ric - expected).norm() < 1e-14);
        assert_eq!(ricci(&BracketTriple::zero()), Matrix7::zeros());
        assert!((scalar_curvature(&erp_triple()) + 12.0).abs() < 1e-14);
    }

    #[test]
    fn ricci_on_example_family() {
        // a2 = a1, b2 = -b1, c2 = c1 → Ric = Diag(-4a1², -4b1², -4c1², 0, ...) in (e7, e1, ..)
        let (a1, b1, c1) = (0.7f64, -1.2f64, 2.0f64);
        let t = BracketTriple::diagonal(
            [a1, -a1, a1, -a1],
            [b1, -b1, -b1, b1],
            [c1, c1, -c1, -c1],
        )
        .unwrap();
        let shown = to_display_order(&ricci(&t));
        let expected = [-4. * a1 * a1, -4. * b1 * b1, -4. * c1 * c1, 0., 0., 0., 0.];
        for i in 0..7 {
            for j in 0..7 {
                let e = if i == j { expected[i] } else { 0.0 };
                assert!((shown[(i, j)] - e).abs() < 1e-13, "({i},{j})");
            }
        }
    }

    #[test]
    fn homothety_examples() {
        assert!((homothety_f(&erp_triple()).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(homothety_f(&BracketTriple::zero()), Err(Error::FlatMetric));
        let t = erp_triple();
        for s in [0.1, 3.0, 100.0] {
            let f = homothety_f(&t.scaled(s)).unwrap();
            assert!((f - 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn einstein_bound_attained_only_when_einstein() {
        let t = erp_triple();
        let f = homothety_f(&t).unwrap();
        assert!(f <= 7.0);
    }

    #[test]
    fn solvsoliton_examples() {
        let mk = |p: [f64; 6]| {
            let [a1, a2, b1, b2, c1, c2] = p;
            BracketTriple::diagonal([a1, -a1, a2, -a2], [b1, b2, -b1, -b2], [c1, c2, -c2, -c1]).unwrap()
        };
        let s = solvsoliton_check(&mk([1., 1., 1., -1., 1., 1.]));
        assert!(s.is_solvsoliton);
        assert!((s.lambda + 4.0).abs() < 1e-12);
        assert!(!solvsoliton_check(&mk([1., 1., 2., -2., 1., 1.])).is_solvsoliton);
        let z = solvsoliton_check(&BracketTriple::zero());
        assert!(z.degenerate && !z.is_solvsoliton);
    }
}
