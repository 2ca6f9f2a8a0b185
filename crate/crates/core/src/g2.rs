//! G2-structure analysis for `(G_{A,B,C}, φ)`: torsion forms, torsion
//! class, Laplacians, the ERP residual and the closed diagonal family.

use serde::{Deserialize, Serialize};

use crate::forms::{standard, KForm};
use crate::liealg::{homothety_f, BracketTriple};
use crate::numerics::Tolerances;
use crate::{Error, Result};

/// The standard positive 3-form on `g_{A,B,C}`.
#[derive(Clone, Debug)]
pub struct G2Structure {
    pub triple: BracketTriple,
    pub phi: KForm,
    pub psi: KForm,
}

impl G2Structure {
    pub fn new(triple: BracketTriple) -> Self {
        let phi = standard::phi();
        let psi = phi.hodge();
        G2Structure { triple, phi, psi }
    }

    pub fn d(&self, alpha: &KForm) -> KForm {
        self.triple.d(alpha)
    }

    pub fn d_phi(&self) -> KForm {
        self.d(&self.phi)
    }

    pub fn d_psi(&self) -> KForm {
        self.d(&self.psi)
    }

    pub fn is_closed(&self, tol: &Tolerances) -> bool {
        self.d_phi().norm() < tol.zero_norm()
    }

    pub fn is_coclosed(&self, tol: &Tolerances) -> bool {
        self.d_psi().norm() < tol.zero_norm()
    }
}

#[derive(Clone, Debug)]
pub struct TorsionForms {
    pub tau0: f64,
    pub tau1: KForm,
    pub tau2: KForm,
    pub tau3: KForm,
    /// `τ := -∗d∗φ`.
    pub tau_two_form: KForm,
    /// `|τ|²` of the 2-form above.
    pub norm_sq_tau: f64,
}

pub fn torsion_forms(s: &G2Structure) -> TorsionForms {
    let dphi = s.d_phi();
    let dpsi = s.d_psi();
    let phi = &s.phi;
    let psi = &s.psi;

    let tau0 = dphi.wedge(phi).hodge().top_or_scalar() / 7.0;
    let tau1 = dphi.hodge().wedge(phi).hodge().scale(-1.0 / 12.0);
    let tau2 = -dpsi.hodge() + tau1.wedge(psi).hodge().scale(4.0);
    let tau3 = dphi.hodge() - phi.scale(tau0) - tau1.wedge(phi).hodge().scale(3.0);
    let tau_two_form = -s.d(&phi.hodge()).hodge();
    let norm_sq_tau = tau_two_form.norm_sq();
    TorsionForms {
        tau0,
        tau1,
        tau2,
        tau3,
        tau_two_form,
        norm_sq_tau,
    }
}

impl TorsionForms {
    /// Residuals of `dφ = τ0 ψ + 3 τ1∧φ + ∗τ3` and `dψ = 4 τ1∧ψ + τ2∧φ`.
    pub fn reconstruction_residuals(&self, s: &G2Structure) -> (f64, f64) {
        let dphi = s.d_phi();
        let dpsi = s.d_psi();
        let rebuilt_dphi = s.psi.scale(self.tau0) + self.tau1.wedge(&s.phi).scale(3.0) + self.tau3.hodge();
        let rebuilt_dpsi = self.tau1.wedge(&s.psi).scale(4.0) + self.tau2.wedge(&s.phi);
        ((&dphi - &rebuilt_dphi).norm(), (&dpsi - &rebuilt_dpsi).norm())
    }
}

/// Which Fernández–Gray components are present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionClass {
    pub w1: bool,
    pub w2: bool,
    pub w3: bool,
    pub w4: bool,
}

impl TorsionClass {
    pub fn torsion_free(&self) -> bool {
        !(self.w1 || self.w2 || self.w3 || self.w4)
    }

    /// Label such as `W2+W3`, or `torsion-free`.
    pub fn label(&self) -> String {
        let parts: Vec<&str> = [(self.w1, "W1"), (self.w2, "W2"), (self.w3, "W3"), (self.w4, "W4")]
            .into_iter()
            .filter_map(|(on, name)| on.then_some(name))
            .collect();
        if parts.is_empty() {
            "torsion-free".to_string()
        } else {
            parts.join("+")
        }
    }
}

pub fn torsion_class(s: &G2Structure) -> TorsionClass {
    torsion_class_of(&torsion_forms(s), 1e-10)
}

pub fn torsion_class_of(t: &TorsionForms, tol: f64) -> TorsionClass {
    TorsionClass {
        w1: t.tau0.abs() > tol,
        w2: t.tau2.norm() > tol,
        w3: t.tau3.norm() > tol,
        w4: t.tau1.norm() > tol,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErpResidual {
    pub residual_norm: f64,
    pub tau_norm_sq: f64,
}

/// `|dτ - |τ|²φ/6 - ∗(τ∧τ)/6|` for a closed structure, `τ = -∗d∗φ`.
pub fn erp_residual(s: &G2Structure) -> Result<ErpResidual> {
    erp_residual_with(s, &Tolerances::default())
}

pub fn erp_residual_with(s: &G2Structure, tol: &Tolerances) -> Result<ErpResidual> {
    let dphi = s.d_phi();
    if dphi.norm() >= tol.zero_norm() {
        return Err(Error::NotClosed(dphi.norm()));
    }
    let tau = -s.d(&s.psi).hodge();
    let tau_sq = tau.norm_sq();
    let residual = s.d(&tau) - s.phi.scale(tau_sq / 6.0) - tau.wedge(&tau).hodge().scale(1.0 / 6.0);
    Ok(ErpResidual {
        residual_norm: residual.norm(),
        tau_norm_sq: tau_sq,
    })
}

#[derive(Clone, Debug)]
pub struct Laplacians {
    pub dphi_lap: KForm,
    pub dpsi_lap: KForm,
}

/// `Δφ = ∗d∗dφ - d∗dψ` and `Δψ = -∗d∗dψ + d∗d∗ψ`.
pub fn laplacians(s: &G2Structure) -> Laplacians {
    let dphi = s.d_phi();
    let dpsi = s.d_psi();
    let star_d_star_dphi = s.d(&dphi.hodge()).hodge();
    let d_star_dpsi = s.d(&dpsi.hodge());
    let star_d_star_dpsi = s.d(&dpsi.hodge()).hodge();
    let d_star_d_star_psi = s.d(&s.d(&s.psi.hodge()).hodge());
    Laplacians {
        dphi_lap: star_d_star_dphi - d_star_dpsi,
        dpsi_lap: d_star_d_star_psi - star_d_star_dpsi,
    }
}

/// `(7/4) τ0`.
pub fn trace_torsion(s: &G2Structure) -> f64 {
    1.75 * torsion_forms(s).tau0
}

/// `A = a Diag(1,1,-1,-1)`, `B = b Diag(1,-1,1,-1)`, `C = c Diag(1,-1,-1,1)`:
/// every diagonal triple with `dφ = 0` has this form.
pub fn closed_triple(a: f64, b: f64, c: f64) -> BracketTriple {
    BracketTriple::diagonal([a, a, -a, -a], [b, -b, b, -b], [c, -c, -c, c])
        .expect("closed family is traceless and diagonal")
}

/// Compact summary used by the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorsionReport {
    pub tau0: f64,
    pub tau1_norm: f64,
    pub tau2_norm: f64,
    pub tau3_norm: f64,
    pub class: String,
    #[serde(rename = "F")]
    pub f: Option<f64>,
    pub erp_residual: Option<f64>,
    pub tau_norm_sq: f64,
}

pub fn torsion_report(s: &G2Structure) -> TorsionReport {
    let t = torsion_forms(s);
    TorsionReport {
        tau0: t.tau0,
        tau1_norm: t.tau1.norm(),
        tau2_norm: t.tau2.norm(),
        tau3_norm: t.tau3.norm(),
        class: torsion_class_of(&t, 1e-10).label(),
        f: homothety_f(&s.triple).ok(),
        erp_residual: erp_residual(s).ok().map(|r| r.residual_norm),
        tau_norm_sq: t.norm_sq_tau,
    }
}
