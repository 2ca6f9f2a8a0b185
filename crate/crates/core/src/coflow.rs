//! Laplacian coflow on the six-parameter coclosed family
//!
//! ```text
//! A = Diag(a1, -a1, a2, -a2),  B = Diag(b1, b2, -b1, -b2),  C = Diag(c1, c2, -c2, -c1)
//! ```
//!
//! The flow is the bracket flow `μ' = θ(Q_μ)μ` on the structure constants,
//! which reduces to a cubic ODE in the six parameters. Soliton detection
//! fits `Δψ = λψ + θ(D)ψ` over symmetric derivations `D = d_k` on `e3..e6`.
//!
//! Sign convention: `θ` is the natural action (`θ(D)α = -α(D·, ..)`), under
//! which `Δψ = -θ(Q_μ)ψ` and the bracket flow on brackets is `μ' = θ(Q_μ)μ`
//! with `θ(Q)μ = Qμ(·,·) - μ(Q·,·) - μ(·,Q·)`. With this convention a
//! soliton has `D = d·Id_n`, `λ = 4d`.

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::forms::{KForm, Matrix7};
use crate::g2::{laplacians, G2Structure};
use crate::liealg::{homothety_f, BracketTriple, StructureConstants, A_SLOTS};
use crate::ode::{self, Outcome, StepControl};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoclosedParams {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
}

impl CoclosedParams {
    pub fn new(a1: f64, a2: f64, b1: f64, b2: f64, c1: f64, c2: f64) -> Self {
        CoclosedParams { a1, a2, b1, b2, c1, c2 }
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        CoclosedParams::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.a1, self.a2, self.b1, self.b2, self.c1, self.c2]
    }

    /// `(a, a, b, -b, c, c)`
    pub fn twisted_family(a: f64, b: f64, c: f64) -> Self {
        CoclosedParams::new(a, a, b, -b, c, c)
    }

    /// `(a, a, b, b, c1, c2)`
    pub fn split_family(a: f64, b: f64, c1: f64, c2: f64) -> Self {
        CoclosedParams::new(a, a, b, b, c1, c2)
    }

    /// `(a, a, b, b, c, c)`
    pub fn symmetric_family(a: f64, b: f64, c: f64) -> Self {
        CoclosedParams::new(a, a, b, b, c, c)
    }

    pub fn matrices(&self) -> (Matrix4<f64>, Matrix4<f64>, Matrix4<f64>) {
        let d = |v: [f64; 4]| Matrix4::from_diagonal(&Vector4::from(v));
        (
            d([self.a1, -self.a1, self.a2, -self.a2]),
            d([self.b1, self.b2, -self.b1, -self.b2]),
            d([self.c1, self.c2, -self.c2, -self.c1]),
        )
    }

    pub fn triple(&self) -> BracketTriple {
        let (a, b, c) = self.matrices();
        BracketTriple::new(a, b, c).expect("coclosed family is diagonal and traceless")
    }

    pub fn structure(&self) -> G2Structure {
        G2Structure::new(self.triple())
    }

    /// `N = a1² + ... + c2²`
    pub fn norm_sq(&self) -> f64 {
        self.to_array().iter().map(|x| x * x).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        CoclosedParams::from_array(self.to_array().map(|x| x * s))
    }

    pub fn is_zero(&self) -> bool {
        self.to_array().iter().all(|&x| x == 0.0)
    }
}

/// `r = (b1+b2)² + (c1+c2)²`, `s = (b1-b2)² + (a1-a2)²`, `t = (c1-c2)² + (a1+a2)²`.
pub fn rst(p: &CoclosedParams) -> (f64, f64, f64) {
    let sq = |x: f64| x * x;
    (
        sq(p.b1 + p.b2) + sq(p.c1 + p.c2),
        sq(p.b1 - p.b2) + sq(p.a1 - p.a2),
        sq(p.c1 - p.c2) + sq(p.a1 + p.a2),
    )
}

/// `Q_μ = ½ Diag(-r+s+t, r+s-t, r-s+t)` on the `e7, e1, e2` slots, zero on `n`.
/// Internal `(e1..e7)` order; see [`crate::liealg::to_display_order`].
pub fn q_mu(p: &CoclosedParams) -> Matrix7 {
    let (r, s, t) = rst(p);
    let mut q = Matrix7::zeros();
    q[(A_SLOTS[0], A_SLOTS[0])] = 0.5 * (-r + s + t);
    q[(A_SLOTS[1], A_SLOTS[1])] = 0.5 * (r + s - t);
    q[(A_SLOTS[2], A_SLOTS[2])] = 0.5 * (r - s + t);
    q
}

/// Growth rates `(k_a, k_b, k_c)` with `a_i' = k_a a_i`, `b_i' = k_b b_i`, `c_i' = k_c c_i`.
pub fn ode_coefficients(p: &CoclosedParams) -> [f64; 3] {
    [
        -(p.a1 * p.a1 + p.a2 * p.a2) + 2.0 * p.b1 * p.b2 + 2.0 * p.c1 * p.c2,
        -(p.b1 * p.b1 + p.b2 * p.b2) + 2.0 * p.a1 * p.a2 - 2.0 * p.c1 * p.c2,
        -(p.c1 * p.c1 + p.c2 * p.c2) - 2.0 * p.a1 * p.a2 - 2.0 * p.b1 * p.b2,
    ]
}

/// The coflow ODE in parameter form.
pub fn ode_rhs(p: &CoclosedParams) -> CoclosedParams {
    let [ka, kb, kc] = ode_coefficients(p);
    CoclosedParams::new(ka * p.a1, ka * p.a2, kb * p.b1, kb * p.b2, kc * p.c1, kc * p.c2)
}

/// `N' = 2 Σ x_i x_i'` along the flow.
pub fn norm_sq_derivative(p: &CoclosedParams) -> f64 {
    let d = ode_rhs(p).to_array();
    2.0 * p.to_array().iter().zip(d).map(|(x, dx)| x * dx).sum::<f64>()
}

/// `θ(Q)μ = Qμ(·,·) - μ(Q·,·) - μ(·,Q·)` on a bracket tensor.
pub fn theta_on_bracket(q: &Matrix7, mu: &StructureConstants) -> StructureConstants {
    let mut out = [[[0.0; 7]; 7]; 7];
    for x in 0..7 {
        for y in 0..7 {
            for z in 0..7 {
                let mut v = 0.0;
                for k in 0..7 {
                    v += q[(z, k)] * mu[x][y][k];
                    v -= q[(k, x)] * mu[k][y][z];
                    v -= q[(k, y)] * mu[x][k][z];
                }
                out[x][y][z] = v;
            }
        }
    }
    out
}

/// Parameter velocity read off a bracket derivative, plus the size of the
/// part of that derivative that leaves the coclosed family.
pub fn params_from_bracket(mu_dot: &StructureConstants) -> (CoclosedParams, f64) {
    // ad e_slot|n entries: M[i][j] = μ[slot][2+j][2+i]
    let block = |slot: usize| Matrix4::from_fn(|i, j| mu_dot[slot][2 + j][2 + i]);
    let (a, b, c) = (block(A_SLOTS[0]), block(A_SLOTS[1]), block(A_SLOTS[2]));
    let p = CoclosedParams::new(a[(0, 0)], a[(2, 2)], b[(0, 0)], b[(1, 1)], c[(0, 0)], c[(1, 1)]);
    let (fa, fb, fc) = p.matrices();
    let mut off = (a - fa).amax().max((b - fb).amax()).max((c - fc).amax());
    // anything outside the a × n → n blocks
    for x in 0..7 {
        for y in 0..7 {
            for z in 0..7 {
                let in_blocks = z >= 2
                    && ((A_SLOTS.contains(&x) && (2..6).contains(&y)) || (A_SLOTS.contains(&y) && (2..6).contains(&x)));
                if !in_blocks {
                    off = off.max(mu_dot[x][y][z].abs());
                }
            }
        }
    }
    (p, off)
}

/// Bracket-flow derivative for an arbitrary `Q`.
pub fn bracket_flow_rhs(p: &CoclosedParams, q: &Matrix7) -> (CoclosedParams, f64) {
    let mu = p.triple().structure_constants();
    params_from_bracket(&theta_on_bracket(q, &mu))
}

/// Diagonal `Q` on the `a` slots fitted from the exterior-calculus Laplacian
/// so that `Δψ = -θ(Q)ψ`; returns `Q` and the fit residual.
pub fn q_from_laplacian(p: &CoclosedParams) -> (Matrix7, f64) {
    let s = p.structure();
    let target = laplacians(&s).dpsi_lap.scale(-1.0);
    let columns: Vec<KForm> = A_SLOTS
        .iter()
        .map(|&k| {
            let mut e = Matrix7::zeros();
            e[(k, k)] = 1.0;
            s.psi.theta7(&e)
        })
        .collect();
    let (sol, residual) = least_squares(&columns, &target);
    let mut q = Matrix7::zeros();
    for (i, &k) in A_SLOTS.iter().enumerate() {
        q[(k, k)] = sol[i];
    }
    (q, residual)
}

/// Least squares `min |target - Σ x_i col_i|` via the normal equations.
fn least_squares(columns: &[KForm], target: &KForm) -> (Vec<f64>, f64) {
    let n = columns.len();
    let dense: Vec<Vec<f64>> = columns.iter().map(|c| c.to_dense()).collect();
    let b = target.to_dense();
    let gram = DMatrix::from_fn(n, n, |i, j| dot(&dense[i], &dense[j]));
    let rhs = DVector::from_fn(n, |i, _| dot(&dense[i], &b));
    let sol = gram
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .unwrap_or_else(|| DVector::zeros(n));
    let mut fit = vec![0.0; b.len()];
    for (i, col) in dense.iter().enumerate() {
        for (f, c) in fit.iter_mut().zip(col) {
            *f += sol[i] * c;
        }
    }
    let residual = b.iter().zip(&fit).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    (sol.iter().cloned().collect(), residual)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `ψ` and `θ(E_k)ψ` for the derivation basis `E_k` on `e3..e6`.
fn soliton_columns(psi: &KForm) -> Vec<KForm> {
    let mut cols = vec![psi.clone()];
    for k in 0..4 {
        let mut e = Matrix4::zeros();
        e[(k, k)] = 1.0;
        cols.push(psi.theta(&e));
    }
    cols
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonResidual {
    pub residual: f64,
    pub best_lambda: f64,
    /// `d3..d6`
    pub best_d: [f64; 4],
    /// Flat structure: `Δψ = 0`, the fit is trivially exact.
    pub flat: bool,
}

fn fit_soliton(psi: &KForm, target: &KForm) -> SolitonResidual {
    let (sol, residual) = least_squares(&soliton_columns(psi), target);
    SolitonResidual {
        residual,
        best_lambda: sol[0],
        best_d: [sol[1], sol[2], sol[3], sol[4]],
        flat: target.is_zero(),
    }
}

/// Best fit of `Δψ = λψ + θ(D)ψ` over `λ` and diagonal `D` on `n`.
pub fn soliton_residual(p: &CoclosedParams) -> SolitonResidual {
    let s = p.structure();
    let lap = laplacians(&s).dpsi_lap;
    fit_soliton(&s.psi, &lap)
}

/// Best-fit residual of `Δψ + 2d((m - tr T)φ) = λψ + θ(D)ψ`.
pub fn modified_soliton_residual(p: &CoclosedParams, m: f64) -> Result<f64> {
    if m == 0.0 {
        return Err(Error::ZeroM);
    }
    let s = p.structure();
    let tr_t = crate::g2::trace_torsion(&s);
    // m - tr T is constant on the group, so d((m - tr T)φ) = (m - tr T) dφ
    let target = laplacians(&s).dpsi_lap + s.d_phi().scale(2.0 * (m - tr_t));
    Ok(fit_soliton(&s.psi, &target).residual)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolitonSolution {
    pub params: CoclosedParams,
    pub lambda: f64,
    /// Common entry of `D = d·Id` on `n`.
    pub d: f64,
    /// `|Δψ - λψ - θ(D)ψ|` at the closed-form `λ` and `d`.
    pub residual: f64,
}

/// Residual of the soliton equation at given `λ` and `D = d·Id_n`.
pub fn soliton_equation_residual(p: &CoclosedParams, lambda: f64, d: f64) -> f64 {
    let s = p.structure();
    let lap = laplacians(&s).dpsi_lap;
    let rhs = s.psi.scale(lambda) + s.psi.theta(&(Matrix4::identity() * d));
    (&lap - &rhs).norm()
}

/// All `(c1, c2)` solving `(c1+c2)² = (a1-a2)² - 4b1b2`, `(c1-c2)² = (b1-b2)² - 4a1a2`.
pub fn soliton_solve(a1: f64, a2: f64, b1: f64, b2: f64) -> Vec<SolitonSolution> {
    let plus_sq = (a1 - a2).powi(2) - 4.0 * b1 * b2;
    let minus_sq = (b1 - b2).powi(2) - 4.0 * a1 * a2;
    let root = |x: f64| -> Option<f64> {
        let scale = 1e-12 * (1.0 + a1 * a1 + a2 * a2 + b1 * b1 + b2 * b2);
        if x < -scale {
            None
        } else {
            Some(x.max(0.0).sqrt())
        }
    };
    let (Some(sp), Some(sm)) = (root(plus_sq), root(minus_sq)) else {
        return Vec::new();
    };
    let lambda = 2.0 * ((a1 - a2).powi(2) + (b1 - b2).powi(2));
    let d = lambda / 4.0;
    let mut out: Vec<SolitonSolution> = Vec::new();
    for sum in [sp, -sp] {
        for diff in [sm, -sm] {
            let (c1, c2) = ((sum + diff) / 2.0, (sum - diff) / 2.0);
            if out
                .iter()
                .any(|s| (s.params.c1 - c1).abs() <= 1e-12 && (s.params.c2 - c2).abs() <= 1e-12)
            {
                continue;
            }
            let params = CoclosedParams::new(a1, a2, b1, b2, c1, c2);
            out.push(SolitonSolution {
                params,
                lambda,
                d,
                residual: soliton_equation_residual(&params, lambda, d),
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Running,
    Converged,
    Diverged,
    MaxTime,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub t: f64,
    pub params: CoclosedParams,
    #[serde(rename = "N")]
    pub n: f64,
    /// `None` on flat states.
    #[serde(rename = "F")]
    pub f: Option<f64>,
    pub r: f64,
    pub s: f64,
    pub t_coef: f64,
}

impl FlowSample {
    pub fn at(t: f64, params: CoclosedParams) -> Self {
        let (r, s, tc) = rst(&params);
        FlowSample {
            t,
            params,
            n: params.norm_sq(),
            f: homothety_f(&params.triple()).ok(),
            r,
            s,
            t_coef: tc,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub samples: Vec<FlowSample>,
    pub status: FlowStatus,
}

impl FlowTrajectory {
    pub fn last(&self) -> &FlowSample {
        self.samples.last().expect("trajectory always holds the initial state")
    }

    pub fn first(&self) -> &FlowSample {
        &self.samples[0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowOptions {
    pub control: StepControl,
    /// Trailing window (time units) used for convergence detection.
    pub window: f64,
    /// Drift threshold on the normalised state.
    pub drift_threshold: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            control: StepControl::default(),
            window: 10.0,
            drift_threshold: 1e-6,
        }
    }
}

pub fn integrate(p0: &CoclosedParams, t_max: f64, opts: &FlowOptions) -> Result<FlowTrajectory> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidInput(format!("t_max must be positive, got {t_max}")));
    }
    let mut samples = Vec::new();
    let rhs = |y: &[f64; 6]| ode_rhs(&CoclosedParams::from_array(*y)).to_array();
    let (outcome, _, _) = ode::integrate(rhs, 0.0, p0.to_array(), t_max, &opts.control, |t, y| {
        samples.push(FlowSample::at(t, CoclosedParams::from_array(*y)));
    });
    let mut traj = FlowTrajectory {
        samples,
        status: FlowStatus::Running,
    };
    traj.status = match outcome {
        Outcome::StepUnderflow => FlowStatus::Diverged,
        Outcome::MaxSteps => FlowStatus::Running,
        Outcome::Reached => match normalized_limit(&traj, opts.window) {
            Ok(l) if l.window_drift < opts.drift_threshold => FlowStatus::Converged,
            _ => FlowStatus::MaxTime,
        },
    };
    Ok(traj)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedLimit {
    /// `p / |p|` at the last sample (zero for the flat state).
    pub direction: [f64; 6],
    /// Largest distance between the final direction and the directions in the window.
    pub window_drift: f64,
}

fn normalize(p: &CoclosedParams) -> [f64; 6] {
    let n = p.norm_sq().sqrt();
    if n == 0.0 {
        return [0.0; 6];
    }
    p.to_array().map(|x| x / n)
}

pub fn normalized_limit(traj: &FlowTrajectory, window: f64) -> Result<NormalizedLimit> {
    if traj.status == FlowStatus::Diverged {
        return Err(Error::Diverged(traj.last().t));
    }
    let t_end = traj.last().t;
    if t_end - traj.first().t < window {
        return Err(Error::TrajectoryTooShort(format!(
            "spans {} time units, window is {window}",
            t_end - traj.first().t
        )));
    }
    let direction = normalize(&traj.last().params);
    let window_drift = traj
        .samples
        .iter()
        .filter(|s| s.t >= t_end - window)
        .map(|s| {
            let d = normalize(&s.params);
            d.iter().zip(&direction).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max);
    Ok(NormalizedLimit {
        direction,
        window_drift,
    })
}

/// Largest deviation of `a·b` from its initial value along a trajectory in `(a,a,b,b,c,c)`.
pub fn conserved_ab(traj: &FlowTrajectory) -> Result<f64> {
    let mut drift = 0.0f64;
    let p0 = traj.first().params;
    let ab0 = p0.a1 * p0.b1;
    for s in &traj.samples {
        let p = s.params;
        let scale = 1.0 + p.norm_sq().sqrt();
        let off = (p.a1 - p.a2).abs().max((p.b1 - p.b2).abs()).max((p.c1 - p.c2).abs());
        if off > 1e-12 * scale {
            return Err(Error::NotInFamily(off));
        }
        drift = drift.max((p.a1 * p.b1 - ab0).abs());
    }
    Ok(drift)
}
