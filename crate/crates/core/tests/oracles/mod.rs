//! Closed-form torsion and Laplacian expressions, written independently of
//! the exterior-calculus pipeline, used as test oracles.
#![allow(dead_code)]

use g2toolkit::forms::standard::*;
use g2toolkit::forms::KForm;
use g2toolkit::g2::{laplacians, G2Structure};
use g2toolkit::liealg::BracketTriple;
use nalgebra::Matrix4;

pub fn dev(a: &KForm, b: &KForm) -> f64 {
    (a - b).max_abs()
}

pub struct Computed {
    pub dphi: KForm,
    pub star_dphi: KForm,
    pub star_d_star_dphi: KForm,
    pub dpsi: KForm,
    pub star_dpsi: KForm,
    pub d_star_dpsi: KForm,
    pub lap_phi: KForm,
    pub lap_psi: KForm,
}

pub fn computed(t: &BracketTriple) -> Computed {
    let s = G2Structure::new(t.clone());
    let dphi = s.d_phi();
    let dpsi = s.d_psi();
    let l = laplacians(&s);
    Computed {
        star_dphi: dphi.hodge(),
        star_d_star_dphi: s.d(&dphi.hodge()).hodge(),
        star_dpsi: dpsi.hodge(),
        d_star_dpsi: s.d(&dpsi.hodge()),
        dphi,
        dpsi,
        lap_phi: l.dphi_lap,
        lap_psi: l.dpsi_lap,
    }
}

/// Matrix-θ expressions for the general commuting case.
pub mod general {
    use super::*;

    fn th(m: &Matrix4<f64>, f: &KForm) -> KForm {
        f.theta(m)
    }

    pub fn dphi(a: &Matrix4<f64>, b: &Matrix4<f64>, c: &Matrix4<f64>) -> KForm {
        let (w7, w1, w2) = (omega7(), omega1(), omega2());
        (th(b, &w7) - th(a, &w1)).wedge(&e2(1, 7))
            + (th(c, &w7) - th(a, &w2)).wedge(&e2(2, 7))
            + (th(b, &w2) - th(c, &w1)).wedge(&e2(1, 2))
    }

    pub fn star_dphi(a: &Matrix4<f64>, b: &Matrix4<f64>, c: &Matrix4<f64>) -> KForm {
        let (w7, w1, w2) = (omega7(), omega1(), omega2());
        let (at, bt, ct) = (a.transpose(), b.transpose(), c.transpose());
        (th(&bt, &w7) - th(&at, &w1)).wedge(&e(2)) - (th(&ct, &w7) - th(&at, &w2)).wedge(&e(1))
            - (th(&bt, &w2) - th(&ct, &w1)).wedge(&e(7))
    }

    pub fn star_d_star_dphi(a: &Matrix4<f64>, b: &Matrix4<f64>, c: &Matrix4<f64>) -> KForm {
        let (w7, w1, w2) = (omega7(), omega1(), omega2());
        let (at, bt, ct) = (a.transpose(), b.transpose(), c.transpose());
        let x17 = th(b, &w7) - th(a, &w1);
        let x27 = th(c, &w7) - th(a, &w2);
        let x12 = th(b, &w2) - th(c, &w1);
        (th(&bt, &x17) + th(&ct, &x27)).wedge(&e(7))
            + (th(&bt, &x12) - th(&at, &x27)).wedge(&e(2))
            + (-th(&ct, &x12) - th(&at, &x17)).wedge(&e(1))
    }

    pub fn dpsi(a: &Matrix4<f64>, b: &Matrix4<f64>, c: &Matrix4<f64>) -> KForm {
        (th(a, &omega7()) + th(b, &omega1()) + th(c, &omega2())).wedge(&KForm::basis(&[1, 2, 7]))
    }

    pub fn star_dpsi(a: &Matrix4<f64>, b: &Matrix4<f64>, c: &Matrix4<f64>) -> KForm {
        -(th(&a.transpose(), &omega7()) + th(&b.transpose(), &omega1()) + th(&c.transpose(), &omega2()))
    }

    pub fn d_star_dpsi(a: &Matrix4<f64>, b: &Matrix4<f64>, c: &Matrix4<f64>) -> KForm {
        let (w7, w1, w2) = (omega7(), omega1(), omega2());
        let (at, bt, ct) = (a.transpose(), b.transpose(), c.transpose());
        let row = |x: &Matrix4<f64>| th(x, &th(&at, &w7)) + th(x, &th(&bt, &w1)) + th(x, &th(&ct, &w2));
        -(row(a).wedge(&e(7)) + row(b).wedge(&e(1)) + row(c).wedge(&e(2)))
    }
}

/// Polynomial coefficient expressions for diagonal triples.
pub mod diagonal {
    use super::*;

    pub struct Sums {
        a12: f64,
        a13: f64,
        a14: f64,
        b12: f64,
        b13: f64,
        b14: f64,
        c12: f64,
        c13: f64,
        c14: f64,
    }

    pub fn sums(a: [f64; 4], b: [f64; 4], c: [f64; 4]) -> Sums {
        Sums {
            a12: a[0] + a[1],
            a13: a[0] + a[2],
            a14: a[0] + a[3],
            b12: b[0] + b[1],
            b13: b[0] + b[2],
            b14: b[0] + b[3],
            c12: c[0] + c[1],
            c13: c[0] + c[2],
            c14: c[0] + c[3],
        }
    }

    fn parts() -> (KForm, KForm, KForm, KForm, KForm, KForm) {
        (omega7(), omega1(), omega2(), omega_bar7(), omega_bar1(), omega_bar2())
    }

    pub fn dphi(s: &Sums) -> KForm {
        let (_, _, _, b7, b1, b2) = parts();
        (-s.b12 * &b7 + s.a13 * &b1).wedge(&e2(1, 7))
            + (-s.c12 * &b7 + s.a14 * &b2).wedge(&e2(2, 7))
            + (-s.b14 * &b2 + s.c13 * &b1).wedge(&e2(1, 2))
    }

    pub fn star_dphi(s: &Sums) -> KForm {
        let (_, _, _, b7, b1, b2) = parts();
        (-s.b12 * &b7 + s.a13 * &b1).wedge(&e(2))
            - (-s.c12 * &b7 + s.a14 * &b2).wedge(&e(1))
            - (-s.b14 * &b2 + s.c13 * &b1).wedge(&e(7))
    }

    pub fn star_d_star_dphi(s: &Sums) -> KForm {
        let (w7, w1, w2, ..) = parts();
        ((s.b12 * s.b12 + s.c12 * s.c12) * &w7 - (s.b13 * s.a13) * &w1 - (s.c14 * s.a14) * &w2).wedge(&e(7))
            + ((s.b14 * s.b14 + s.a14 * s.a14) * &w2 - (s.b13 * s.c13) * &w1 - (s.a12 * s.c12) * &w7)
                .wedge(&e(2))
            + (-(s.c14 * s.b14) * &w2 + (s.c13 * s.c13 + s.a13 * s.a13) * &w1 - (s.a12 * s.b12) * &w7)
                .wedge(&e(1))
    }

    pub fn dpsi(s: &Sums) -> KForm {
        let (_, _, _, b7, b1, b2) = parts();
        -(s.a12 * &b7 + s.b13 * &b1 + s.c14 * &b2).wedge(&KForm::basis(&[1, 2, 7]))
    }

    pub fn star_dpsi(s: &Sums) -> KForm {
        let (_, _, _, b7, b1, b2) = parts();
        s.a12 * &b7 + s.b13 * &b1 + s.c14 * &b2
    }

    pub fn d_star_dpsi(s: &Sums) -> KForm {
        let (w7, w1, w2, ..) = parts();
        -((s.a12 * s.a12) * &w7 + (s.a13 * s.b13) * &w1 + (s.a14 * s.c14) * &w2).wedge(&e(7))
            - ((s.a12 * s.b12) * &w7 + (s.b13 * s.b13) * &w1 + (s.b14 * s.c14) * &w2).wedge(&e(1))
            - ((s.a12 * s.c12) * &w7 + (s.c13 * s.b13) * &w1 + (s.c14 * s.c14) * &w2).wedge(&e(2))
    }

    fn sq3(x: f64, y: f64, z: f64) -> f64 {
        x * x + y * y + z * z
    }

    pub fn lap_phi(s: &Sums) -> KForm {
        let (w7, w1, w2, ..) = parts();
        sq3(s.a12, s.b12, s.c12) * w7.wedge(&e(7))
            + sq3(s.a13, s.b13, s.c13) * w1.wedge(&e(1))
            + sq3(s.a14, s.b14, s.c14) * w2.wedge(&e(2))
    }

    pub fn lap_psi(s: &Sums) -> KForm {
        let (w7, w1, w2, ..) = parts();
        sq3(s.a12, s.b12, s.c12) * w7.wedge(&e2(1, 2))
            + sq3(s.a13, s.b13, s.c13) * w1.wedge(&e2(2, 7))
            - sq3(s.a14, s.b14, s.c14) * w2.wedge(&e2(1, 7))
    }
}

