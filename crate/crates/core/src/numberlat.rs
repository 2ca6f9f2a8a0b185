//! Lattices `Γ = Λ ⋉ φ(Z^4)` in `G_J` from units of totally real quartic
//! number fields.
//!
//! Multiplication by an element `q(u)` of `Q(u)` in the basis `1, u, u², u³`
//! is the integer matrix `q(M)`, `M` the companion matrix of the minimal
//! polynomial. Units give matrices in `GL_4(Z)`; they commute, and the
//! Vandermonde matrix of the roots diagonalises all of them at once.
//!
//! Every integer check here is exact. Floating point enters only through
//! the roots, the diagonalisation residual and the log-embedding rank.

use std::fmt;

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// 4×4 integer matrix, row-major.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMat4(pub [[i64; 4]; 4]);

impl IntMat4 {
    pub fn identity() -> Self {
        let mut m = [[0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        IntMat4(m)
    }

    pub fn zero() -> Self {
        IntMat4([[0; 4]; 4])
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.0[i][j]
    }

    pub fn checked_mul(&self, other: &IntMat4) -> Result<IntMat4> {
        let mut out = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc: i64 = 0;
                for k in 0..4 {
                    let p = self.0[i][k]
                        .checked_mul(other.0[k][j])
                        .ok_or(Error::Overflow("matrix product"))?;
                    acc = acc.checked_add(p).ok_or(Error::Overflow("matrix product"))?;
                }
                out[i][j] = acc;
            }
        }
        Ok(IntMat4(out))
    }

    pub fn checked_add(&self, other: &IntMat4) -> Result<IntMat4> {
        let mut out = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = self.0[i][j]
                    .checked_add(other.0[i][j])
                    .ok_or(Error::Overflow("matrix sum"))?;
            }
        }
        Ok(IntMat4(out))
    }

    pub fn checked_scale(&self, s: i64) -> Result<IntMat4> {
        let mut out = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = self.0[i][j].checked_mul(s).ok_or(Error::Overflow("matrix scale"))?;
            }
        }
        Ok(IntMat4(out))
    }

    /// Exact determinant by cofactor expansion in 128-bit arithmetic.
    pub fn det(&self) -> i128 {
        let m = |i: usize, j: usize| self.0[i][j] as i128;
        let det3 = |r: [usize; 3], c: [usize; 3]| {
            m(r[0], c[0]) * (m(r[1], c[1]) * m(r[2], c[2]) - m(r[1], c[2]) * m(r[2], c[1]))
                - m(r[0], c[1]) * (m(r[1], c[0]) * m(r[2], c[2]) - m(r[1], c[2]) * m(r[2], c[0]))
                + m(r[0], c[2]) * (m(r[1], c[0]) * m(r[2], c[1]) - m(r[1], c[1]) * m(r[2], c[0]))
        };
        let mut det = 0i128;
        for j in 0..4 {
            let cols: Vec<usize> = (0..4).filter(|&c| c != j).collect();
            let minor = det3([1, 2, 3], [cols[0], cols[1], cols[2]]);
            let term = m(0, j) * minor;
            det += if j % 2 == 0 { term } else { -term };
        }
        det
    }

    pub fn commutes_with(&self, other: &IntMat4) -> Result<bool> {
        Ok(self.checked_mul(other)? == other.checked_mul(self)?)
    }

    pub fn to_f64(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.0[i][j] as f64)
    }

    pub fn trace(&self) -> i64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }
}

impl fmt::Debug for IntMat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Monic integer quartic `t^4 + a3 t^3 + a2 t^2 + a1 t + a0` that is
/// irreducible over the rationals with four distinct real roots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuarticPoly {
    /// `[a0, a1, a2, a3]`
    coeffs: [i64; 4],
    /// Roots in decreasing order.
    roots: [f64; 4],
}

impl QuarticPoly {
    pub fn new(coeffs: [i64; 4]) -> Result<Self> {
        if let Some(reason) = reducibility_witness(coeffs) {
            return Err(Error::PolynomialRejected(format!("reducible over Q: {reason}")));
        }
        let roots = real_roots(coeffs)?;
        Ok(QuarticPoly { coeffs, roots })
    }

    pub fn coeffs(&self) -> [i64; 4] {
        self.coeffs
    }

    pub fn roots(&self) -> [f64; 4] {
        self.roots
    }

    pub fn eval(&self, x: f64) -> f64 {
        eval_monic(self.coeffs, x)
    }

    /// Whether the constant term makes the roots units (`Norm(u) = ±1`).
    pub fn roots_are_units(&self) -> bool {
        self.coeffs[0].abs() == 1
    }
}

fn eval_monic(c: [i64; 4], x: f64) -> f64 {
    (((x + c[3] as f64) * x + c[2] as f64) * x + c[1] as f64) * x + c[0] as f64
}

fn eval_monic_derivative(c: [i64; 4], x: f64) -> f64 {
    ((4.0 * x + 3.0 * c[3] as f64) * x + 2.0 * c[2] as f64) * x + c[1] as f64
}

fn divisors(n: i64) -> Vec<i64> {
    let n = n.unsigned_abs();
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d as i64);
            out.push((n / d) as i64);
        }
        d += 1;
    }
    out.sort_unstable();
    out.dedup();
    let negs: Vec<i64> = out.iter().map(|d| -d).collect();
    out.extend(negs);
    out
}

fn eval_monic_exact(c: [i64; 4], x: i64) -> Option<i128> {
    let x = x as i128;
    let mut acc: i128 = 1;
    for k in (0..4).rev() {
        acc = acc.checked_mul(x)?.checked_add(c[k] as i128)?;
    }
    Some(acc)
}

/// Exact factorisation test over Z (hence over Q by Gauss's lemma): a
/// rational root, or a split into two monic integer quadratics.
fn reducibility_witness(c: [i64; 4]) -> Option<String> {
    let [a0, a1, a2, a3] = c;
    if a0 == 0 {
        return Some("t divides p".to_string());
    }
    for r in divisors(a0) {
        if eval_monic_exact(c, r) == Some(0) {
            return Some(format!("rational root {r}"));
        }
    }
    // (t² + b t + c0)(t² + d t + e) with c0·e = a0, b + d = a3,
    // c0 + e + b d = a2, b e + c0 d = a1.
    for c0 in divisors(a0) {
        let e = a0 / c0;
        // b² - a3 b + (a2 - c0 - e) = 0
        let disc = (a3 as i128).pow(2) - 4 * (a2 as i128 - c0 as i128 - e as i128);
        if disc < 0 {
            continue;
        }
        let s = isqrt(disc);
        if s * s != disc {
            continue;
        }
        for num in [a3 as i128 + s, a3 as i128 - s] {
            if num % 2 != 0 {
                continue;
            }
            let b = num / 2;
            let d = a3 as i128 - b;
            if b * e as i128 + c0 as i128 * d == a1 as i128 {
                return Some(format!("(t^2 + {b} t + {c0})(t^2 + {d} t + {e})"));
            }
        }
    }
    None
}

fn isqrt(n: i128) -> i128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Real roots in decreasing order, via companion eigenvalues polished by Newton.
fn real_roots(c: [i64; 4]) -> Result<[f64; 4]> {
    let m = companion_f64(c);
    let eig = m.complex_eigenvalues();
    let scale = 1.0 + eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = eig.iter().find(|z| z.im.abs() > 1e-7 * scale) {
        return Err(Error::PolynomialRejected(format!(
            "not totally real: complex root {:.6}{:+.6}i",
            z.re, z.im
        )));
    }
    let mut roots: Vec<f64> = eig
        .iter()
        .map(|z| {
            let mut x = z.re;
            for _ in 0..50 {
                let d = eval_monic_derivative(c, x);
                if d == 0.0 {
                    break;
                }
                let step = eval_monic(c, x) / d;
                x -= step;
                if step.abs() <= 1e-15 * (1.0 + x.abs()) {
                    break;
                }
            }
            x
        })
        .collect();
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let gap = roots.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    if gap <= 1e-9 * scale {
        return Err(Error::RepeatedRoots(gap));
    }
    Ok([roots[0], roots[1], roots[2], roots[3]])
}

fn companion_f64(c: [i64; 4]) -> Matrix4<f64> {
    companion_of(c).to_f64()
}

fn companion_of(c: [i64; 4]) -> IntMat4 {
    let mut m = [[0i64; 4]; 4];
    for i in 1..4 {
        m[i][i - 1] = 1;
    }
    for (i, row) in m.iter_mut().enumerate() {
        row[3] = -c[i];
    }
    IntMat4(m)
}

/// Companion matrix: last column `(-a0, -a1, -a2, -a3)`, ones on the subdiagonal.
pub fn companion(p: &QuarticPoly) -> IntMat4 {
    companion_of(p.coeffs)
}

/// Element `q0 + q1 u + q2 u² + q3 u³` of the field, as integer coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitSpec(pub [i64; 4]);

impl UnitSpec {
    pub fn one() -> Self {
        UnitSpec([1, 0, 0, 0])
    }

    pub fn generator() -> Self {
        UnitSpec([0, 1, 0, 0])
    }

    /// Product in `Z[u]/(p)`.
    pub fn mul_mod(&self, other: &UnitSpec, p: &QuarticPoly) -> Result<UnitSpec> {
        let mut prod = [0i128; 7];
        for i in 0..4 {
            for j in 0..4 {
                prod[i + j] += self.0[i] as i128 * other.0[j] as i128;
            }
        }
        // u^4 = -(a0 + a1 u + a2 u² + a3 u³)
        let a = p.coeffs;
        for k in (4..7).rev() {
            let lead = prod[k];
            prod[k] = 0;
            for (i, ai) in a.iter().enumerate() {
                prod[k - 4 + i] -= lead * *ai as i128;
            }
        }
        let mut out = [0i64; 4];
        for i in 0..4 {
            out[i] = i64::try_from(prod[i]).map_err(|_| Error::Overflow("polynomial product"))?;
        }
        Ok(UnitSpec(out))
    }

    pub fn pow_mod(&self, n: u32, p: &QuarticPoly) -> Result<UnitSpec> {
        let mut acc = UnitSpec::one();
        for _ in 0..n {
            acc = acc.mul_mod(self, p)?;
        }
        Ok(acc)
    }

    /// Value at a real embedding.
    pub fn eval(&self, x: f64) -> f64 {
        ((self.0[3] as f64 * x + self.0[2] as f64) * x + self.0[1] as f64) * x + self.0[0] as f64
    }
}

/// `q(M)` without the unit check.
pub fn element_matrix(p: &QuarticPoly, q: &UnitSpec) -> Result<IntMat4> {
    let m = companion(p);
    // Horner: ((q3 M + q2) M + q1) M + q0
    let mut acc = IntMat4::identity().checked_scale(q.0[3])?;
    for k in (0..3).rev() {
        acc = acc.checked_mul(&m)?.checked_add(&IntMat4::identity().checked_scale(q.0[k])?)?;
    }
    Ok(acc)
}

/// Matrix of multiplication by the unit `q(u)`; errors unless `|det| = 1`.
pub fn unit_matrix(p: &QuarticPoly, q: &UnitSpec) -> Result<IntMat4> {
    let a = element_matrix(p, q)?;
    let det = a.det();
    if det.abs() != 1 {
        return Err(Error::NotAUnit(det));
    }
    Ok(a)
}

/// Vandermonde matrix with rows `(1, x, x², x³)`.
pub fn vandermonde(roots: &[f64; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| roots[i].powi(j as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagonalization {
    pub roots: [f64; 4],
    pub vandermonde: Vec<Vec<f64>>,
    /// Diagonal of `V A_j V^{-1}` for each input matrix.
    pub diagonals: Vec<[f64; 4]>,
    /// Largest off-diagonal entry of `V A_j V^{-1}` relative to its largest entry.
    pub residuals: Vec<f64>,
}

impl Diagonalization {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn diagonalize(p: &QuarticPoly, mats: &[IntMat4]) -> Result<Diagonalization> {
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            if !mats[i].commutes_with(&mats[j])? {
                return Err(Error::NonCommutingIntegerMatrices);
            }
        }
    }
    let roots = p.roots;
    let v = vandermonde(&roots);
    let v_inv = v
        .try_inverse()
        .ok_or_else(|| Error::RepeatedRoots(0.0))?;
    let mut diagonals = Vec::new();
    let mut residuals = Vec::new();
    for a in mats {
        let d = v * a.to_f64() * v_inv;
        let big = d.amax().max(1.0);
        let mut off = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    off = off.max(d[(i, j)].abs());
                }
            }
        }
        diagonals.push([d[(0, 0)], d[(1, 1)], d[(2, 2)], d[(3, 3)]]);
        residuals.push(off / big);
    }
    Ok(Diagonalization {
        roots,
        vandermonde: (0..4).map(|i| (0..4).map(|j| v[(i, j)]).collect()).collect(),
        diagonals,
        residuals,
    })
}

/// Singular values below this mark a dependent set of units.
pub const INDEPENDENCE_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub independent: bool,
    pub rank: usize,
    pub sigma_min: f64,
    /// `L[i][j] = log|σ_j(ε_i)|`.
    pub log_matrix: Vec<[f64; 4]>,
}

/// Rank of the log-embedding matrix of the given units.
pub fn mult_independence(p: &QuarticPoly, units: &[UnitSpec]) -> Result<IndependenceReport> {
    for u in units {
        unit_matrix(p, u)?;
    }
    let log_matrix: Vec<[f64; 4]> = units
        .iter()
        .map(|u| {
            let mut row = [0.0; 4];
            for (j, r) in p.roots.iter().enumerate() {
                row[j] = u.eval(*r).abs().ln();
            }
            row
        })
        .collect();
    if units.is_empty() {
        return Ok(IndependenceReport {
            independent: true,
            rank: 0,
            sigma_min: 0.0,
            log_matrix,
        });
    }
    let l = DMatrix::from_fn(units.len(), 4, |i, j| log_matrix[i][j]);
    let sv = l.svd(false, false).singular_values;
    let rank = sv.iter().filter(|&&s| s > INDEPENDENCE_THRESHOLD).count();
    // σ_min of an n×4 matrix with n > 4 units is taken over min(n,4) values
    let sigma_min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(IndependenceReport {
        independent: rank == units.len(),
        rank,
        sigma_min,
        log_matrix,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeChecks {
    pub integral: bool,
    pub det_one: bool,
    pub determinants: Vec<i128>,
    pub commute: bool,
    pub diagonalize_residual: f64,
    pub positive_spectra: bool,
    pub independence_rank: usize,
    pub independence_sigma_min: f64,
    /// Present for built-in examples: reconstructed matrices equal the stored literals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_reference: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeCertificate {
    pub polynomial: [i64; 4],
    pub units: Vec<UnitSpec>,
    pub matrices: Vec<IntMat4>,
    pub roots: [f64; 4],
    pub vandermonde: Vec<Vec<f64>>,
    /// Diagonal of `V A_j V^{-1}`, i.e. the unit at each real embedding.
    pub spectra: Vec<[f64; 4]>,
    pub checks: LatticeChecks,
    pub failures: Vec<String>,
    pub verdict: bool,
}

/// Diagonalisation residual threshold.
pub const DIAGONALIZE_THRESHOLD: f64 = 1e-9;

/// Runs every check; failures are recorded rather than returned as errors.
pub fn certify_lattice(p: &QuarticPoly, units: &[UnitSpec; 3]) -> LatticeCertificate {
    certify_with_reference(p, units, None)
}

pub fn certify_with_reference(
    p: &QuarticPoly,
    units: &[UnitSpec; 3],
    reference: Option<&[IntMat4; 3]>,
) -> LatticeCertificate {
    let mut failures = Vec::new();
    let mut matrices = Vec::new();
    let mut integral = true;
    for u in units {
        match element_matrix(p, u) {
            Ok(m) => matrices.push(m),
            Err(e) => {
                integral = false;
                failures.push(format!("matrix for {:?}: {e}", u.0));
            }
        }
    }

    let determinants: Vec<i128> = matrices.iter().map(|m| m.det()).collect();
    let det_one = integral && determinants.iter().all(|&d| d == 1);
    if !det_one {
        failures.push(format!("determinants {determinants:?} are not all 1"));
    }

    let mut commute = integral;
    for i in 0..matrices.len() {
        for j in i + 1..matrices.len() {
            if !matrices[i].commutes_with(&matrices[j]).unwrap_or(false) {
                commute = false;
            }
        }
    }
    if !commute {
        failures.push("matrices do not commute exactly".to_string());
    }

    let (diag_residual, spectra, vandermonde_rows) = match diagonalize(p, &matrices) {
        Ok(d) => (d.max_residual(), d.diagonals.clone(), d.vandermonde.clone()),
        Err(e) => {
            failures.push(format!("diagonalisation: {e}"));
            (f64::INFINITY, Vec::new(), Vec::new())
        }
    };
    if diag_residual >= DIAGONALIZE_THRESHOLD {
        failures.push(format!("diagonalisation residual {diag_residual:e}"));
    }

    let positive_spectra = !spectra.is_empty() && spectra.iter().all(|s| s.iter().all(|&x| x > 0.0));
    if !positive_spectra {
        failures.push("spectra not all positive (generators must lie in exp(a))".to_string());
    }

    let (rank, sigma_min) = match mult_independence(p, units) {
        Ok(r) => (r.rank, r.sigma_min),
        Err(e) => {
            failures.push(format!("independence: {e}"));
            (0, 0.0)
        }
    };
    if rank != 3 {
        failures.push(format!("log-embedding rank {rank} < 3"));
    }

    let matches_reference = reference.map(|r| matrices.len() == 3 && matrices.iter().zip(r).all(|(a, b)| a == b));
    if matches_reference == Some(false) {
        failures.push("reconstructed matrices differ from the reference literals".to_string());
    }

    let verdict = failures.is_empty();
    LatticeCertificate {
        polynomial: p.coeffs,
        units: units.to_vec(),
        matrices,
        roots: p.roots,
        vandermonde: vandermonde_rows,
        spectra,
        checks: LatticeChecks {
            integral,
            det_one,
            determinants,
            commute,
            diagonalize_residual: diag_residual,
            positive_spectra,
            independence_rank: rank,
            independence_sigma_min: sigma_min,
            matches_reference,
        },
        failures,
        verdict,
    }
}

/// Built-in lattice data with the published integer matrices.
pub mod examples {
    use super::*;

    #[derive(Clone, Debug)]
    pub struct BuiltinExample {
        pub name: &'static str,
        pub poly: [i64; 4],
        /// Units before squaring.
        pub base_units: [UnitSpec; 3],
        pub reference: [IntMat4; 3],
    }

    impl BuiltinExample {
        pub fn poly(&self) -> QuarticPoly {
            QuarticPoly::new(self.poly).expect("built-in polynomial is valid")
        }

        /// Squares of the base units, reduced mod p.
        pub fn lattice_units(&self) -> [UnitSpec; 3] {
            let p = self.poly();
            let sq = |u: &UnitSpec| u.mul_mod(u, &p).expect("small coefficients");
            [sq(&self.base_units[0]), sq(&self.base_units[1]), sq(&self.base_units[2])]
        }

        pub fn certify(&self) -> LatticeCertificate {
            certify_with_reference(&self.poly(), &self.lattice_units(), Some(&self.reference))
        }
    }

    /// `p = t⁴ - t³ - 4t² + 4t + 1` with units `u1`, `u2 = u1² - 2`, `u3 = u2² - 2`.
    pub fn kl_2015() -> BuiltinExample {
        BuiltinExample {
            name: "kl-2015",
            poly: [1, 4, -4, -1],
            base_units: [UnitSpec([0, 1, 0, 0]), UnitSpec([-2, 0, 1, 0]), UnitSpec([1, -4, 0, 1])],
            reference: [
                IntMat4([[0, 0, -1, -1], [0, 0, -4, -5], [1, 0, 4, 0], [0, 1, 1, 5]]),
                IntMat4([[3, -1, -1, -1], [-4, -1, -5, -5], [0, 0, 3, -1], [1, 1, 1, 4]]),
                IntMat4([[4, 1, 2, 3], [3, 8, 9, 14], [-1, -1, 0, -3], [-1, -2, -3, -3]]),
            ],
        }
    }

    /// `p = t⁴ - 4t² + 1` with units `u`, `1 + 2u`, `1 + u - 2u² - u³`.
    pub fn kl_sqrt3() -> BuiltinExample {
        BuiltinExample {
            name: "kl-sqrt3",
            poly: [1, 0, -4, 0],
            base_units: [UnitSpec([0, 1, 0, 0]), UnitSpec([1, 2, 0, 0]), UnitSpec([1, 1, -2, -1])],
            reference: [
                IntMat4([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 4, 0], [0, 1, 0, 4]]),
                IntMat4([[1, 0, -4, -4], [4, 1, 0, -4], [4, 4, 17, 16], [0, 4, 4, 17]]),
                IntMat4([[-5, -10, -20, -38], [-2, -5, -10, -20], [20, 38, 75, 142], [10, 20, 38, 75]]),
            ],
        }
    }

    pub fn by_name(name: &str) -> Option<BuiltinExample> {
        match name {
            "kl-2015" => Some(kl_2015()),
            "kl-sqrt3" => Some(kl_sqrt3()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn companion_examples() {
        let m = companion(&QuarticPoly::new([1, 4, -4, -1]).unwrap());
        assert_eq!([m.get(0, 3), m.get(1, 3), m.get(2, 3), m.get(3, 3)], [-1, -4, 4, 1]);
        let m = companion(&QuarticPoly::new([1, 0, -4, 0]).unwrap());
        assert_eq!([m.get(0, 3), m.get(1, 3), m.get(2, 3), m.get(3, 3)], [-1, 0, 4, 0]);
    }

    #[test]
    fn rejects_bad_polynomials() {
        let err = QuarticPoly::new([-2, 0, 0, 0]).unwrap_err();
        assert!(matches!(err, Error::PolynomialRejected(ref s) if s.contains("not totally real")));
        // (t² - 2)(t² - 3)
        let err = QuarticPoly::new([6, 0, -5, 0]).unwrap_err();
        assert!(matches!(err, Error::PolynomialRejected(ref s) if s.contains("reducible")));
        // (t - 1)(t³ + ...)
        let err = QuarticPoly::new([-1, 1, -1, 0]).unwrap_err();
        assert!(matches!(err, Error::PolynomialRejected(ref s) if s.contains("rational root")));
        assert!(QuarticPoly::new([0, 1, 2, 3]).is_err());
    }

    #[test]
    fn characteristic_polynomial_has_the_roots() {
        let p = QuarticPoly::new([1, 4, -4, -1]).unwrap();
        for r in p.roots() {
            assert!(p.eval(r).abs() < 1e-12);
        }
        let expected: Vec<f64> = [1, 2, 4, 7]
            .iter()
            .map(|k| 2.0 * (2.0 * std::f64::consts::PI * *k as f64 / 15.0).cos())
            .collect();
        for (r, e) in p.roots().iter().zip(&expected) {
            assert!((r - e).abs() < 1e-13, "{r} vs {e}");
        }
    }

    #[test]
    fn unit_matrices() {
        let p = QuarticPoly::new([1, 4, -4, -1]).unwrap();
        assert_eq!(unit_matrix(&p, &UnitSpec::one()).unwrap(), IntMat4::identity());
        assert_eq!(unit_matrix(&p, &UnitSpec::one()).unwrap().det(), 1);
        assert!(matches!(unit_matrix(&p, &UnitSpec([2, 0, 0, 0])), Err(Error::NotAUnit(16))));
        let ex = kl_2015();
        for (u, r) in ex.lattice_units().iter().zip(&ex.reference) {
            assert_eq!(&unit_matrix(&p, u).unwrap(), r);
        }
        let ex = kl_sqrt3();
        let p = ex.poly();
        for (u, r) in ex.lattice_units().iter().zip(&ex.reference) {
            assert_eq!(&unit_matrix(&p, u).unwrap(), r);
        }
    }

    #[test]
    fn unit_matrix_commutes_with_companion() {
        let ex = kl_sqrt3();
        let p = ex.poly();
        let m = companion(&p);
        for u in ex.lattice_units() {
            assert!(unit_matrix(&p, &u).unwrap().commutes_with(&m).unwrap());
        }
    }

    #[test]
    fn exact_determinant() {
        for r in kl_2015().reference.iter().chain(kl_sqrt3().reference.iter()) {
            assert_eq!(r.det(), 1);
        }
        let m = IntMat4([[2, 0, 0, 0], [0, 3, 0, 0], [0, 0, 1, 7], [0, 0, 0, -1]]);
        assert_eq!(m.det(), -6);
    }

    #[test]
    fn trace_matches_newton_identity() {
        assert_eq!(kl_2015().reference[0].trace(), 9);
    }

    #[test]
    fn diagonalize_identity() {
        let p = QuarticPoly::new([1, 4, -4, -1]).unwrap();
        let d = diagonalize(&p, &[IntMat4::identity()]).unwrap();
        assert!(d.max_residual() < 1e-12);
    }

    #[test]
    fn diagonalize_rejects_noncommuting() {
        let p = QuarticPoly::new([1, 4, -4, -1]).unwrap();
        let a = IntMat4([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        let b = IntMat4([[1, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert_eq!(diagonalize(&p, &[a, b]), Err(Error::NonCommutingIntegerMatrices));
    }

    #[test]
    fn independence_examples() {
        let ex = kl_2015();
        let r = mult_independence(&ex.poly(), &ex.base_units).unwrap();
        assert!(r.independent && r.rank == 3);
        let ex = kl_sqrt3();
        let r = mult_independence(&ex.poly(), &ex.base_units).unwrap();
        assert!(r.independent && r.rank == 3);
        let p = kl_2015().poly();
        let u = UnitSpec::generator();
        let powers = [u, u.pow_mod(2, &p).unwrap(), u.pow_mod(3, &p).unwrap()];
        let r = mult_independence(&p, &powers).unwrap();
        assert!(!r.independent);
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn log_rows_sum_to_zero() {
        let ex = kl_sqrt3();
        let r = mult_independence(&ex.poly(), &ex.lattice_units()).unwrap();
        for row in r.log_matrix {
            assert!(row.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn certificates() {
        for ex in [kl_2015(), kl_sqrt3()] {
            let c = ex.certify();
            assert!(c.verdict, "{}: {:?}", ex.name, c.failures);
            assert_eq!(c.checks.matches_reference, Some(true));
        }
        let p = kl_2015().poly();
        let u = UnitSpec::generator();
        let bad = [
            u.pow_mod(2, &p).unwrap(),
            u.pow_mod(4, &p).unwrap(),
            u.pow_mod(6, &p).unwrap(),
        ];
        let c = certify_lattice(&p, &bad);
        assert!(!c.verdict);
        assert_eq!(c.checks.independence_rank, 1);
        assert!(c.checks.det_one && c.checks.commute && c.checks.positive_spectra);
    }

    #[test]
    fn unsquared_units_fail_positivity() {
        let ex = kl_2015();
        let c = certify_lattice(&ex.poly(), &ex.base_units);
        assert!(!c.checks.positive_spectra);
        assert!(!c.verdict);
    }
}
