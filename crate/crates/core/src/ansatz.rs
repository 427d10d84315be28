//! Closed-form equivariant connection families and the equivariance residual.
//!
//! Each case stores radial (or spacetime) profile functions multiplying fixed
//! generator fields; evaluation returns the tuple of algebra-valued components
//! entrywise from the index formulas.

use crate::algebra::{gen_dual_f, gen_f, levi_civita, Signature};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::profile::{RadialRef, SpacetimeRef};
use crate::{fro_norm, C64, CMat, RVec};

/// Value of a gauge 1-form at a point: one algebra matrix per coordinate.
/// When `has_time_slot` is set, component 0 belongs to the time coordinate.
#[derive(Debug, Clone)]
pub struct TensorField {
    pub comps: Vec<CMat>,
    pub sig: Signature,
    pub has_time_slot: bool,
}

impl TensorField {
    pub fn max_comp_norm(&self) -> f64 {
        self.comps.iter().map(fro_norm).fold(0.0, f64::max)
    }
}

/// X_μ = Σ_k x_k f_{k,μ}, the workhorse generator field (Euclidean: f = e^A).
pub fn x_field(sig: Signature, x: &RVec, mu: usize) -> CMat {
    let n = sig.n();
    let mut m = CMat::zeros(n, n);
    for k in 0..n {
        if k != mu && x[k] != 0.0 {
            m += gen_f(sig, k, mu) * C64::new(x[k], 0.0);
        }
    }
    m
}

/// Y_μ = Σ_k x_k f̄_{k,μ} with f̄ = I_{p,q}·ē, the dual field in dimension 4.
pub fn y_field(sig: Signature, x: &RVec, mu: usize) -> CMat {
    assert_eq!(sig.n(), 4);
    let mut m = CMat::zeros(4, 4);
    for k in 0..4 {
        if k != mu && x[k] != 0.0 {
            m += gen_dual_f(sig, k, mu) * C64::new(x[k], 0.0);
        }
    }
    m
}

/// The quadratic form r² = Σ ε(k) x_k² (signed for indefinite signatures).
pub fn quad_form(sig: Signature, x: &RVec) -> f64 {
    (0..sig.n()).map(|k| sig.eps(k) * x[k] * x[k]).sum()
}

/// F_i = (x·e_i^T − e_i·x^T)/r², the dimensionless antisymmetric field.
pub fn sun_f_field(n: usize, x: &RVec, i: usize) -> CMat {
    let r2 = x.norm_squared();
    CMat::from_fn(n, n, |a, b| {
        let v = (x[a] * kron(i, b) - kron(i, a) * x[b]) / r2;
        C64::new(v, 0.0)
    })
}

/// G¹ = (i/r²)(x·x^T/r² − Id/n).
pub fn sun_g1_field(n: usize, x: &RVec) -> CMat {
    let r2 = x.norm_squared();
    CMat::from_fn(n, n, |a, b| {
        let v = (x[a] * x[b] / r2 - kron(a, b) / n as f64) / r2;
        C64::new(0.0, v)
    })
}

/// G²_i = (i/r²)(e_i·x^T + x·e_i^T − (2 x_i/n)·Id).
pub fn sun_g2_field(n: usize, x: &RVec, i: usize) -> CMat {
    let r2 = x.norm_squared();
    CMat::from_fn(n, n, |a, b| {
        let v = (kron(i, a) * x[b] + x[a] * kron(i, b) - 2.0 * x[i] * kron(a, b) / n as f64) / r2;
        C64::new(0.0, v)
    })
}

fn kron(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Sign convention for the constant term of the three-dimensional indefinite
/// ansatz; the two printed variants differ on mixed-signature entries and the
/// working one is selected by the equivariance residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pq3ConstSign {
    /// Prefactor ε(μ)ε(i) on ε_{μ,i,j}.
    EpsMuI,
    /// Prefactor ε(μ)ε(j) on ε_{μ,i,j}.
    EpsMuJ,
}

/// The closed-form connection families.
#[derive(Clone)]
pub enum GaugeAnsatz {
    /// n = 3 rotations: f·ε_{i,j,μ} + g·X + h·x_μ (x-contracted ε).
    So3 {
        f: RadialRef,
        g: RadialRef,
        h: RadialRef,
    },
    /// n = 4 rotations: f·(dual field) + g·X.
    So4 { f: RadialRef, g: RadialRef },
    /// n ≥ 5 rotations (also valid at n = 3, 4 with the extra profiles zero).
    SoN { n: usize, g: RadialRef },
    /// p+q = 3 indefinite; `const_sign` selects the prefactor variant.
    SoPq3 {
        sig: Signature,
        f: RadialRef,
        g: RadialRef,
        h: RadialRef,
        const_sign: Pq3ConstSign,
    },
    /// p+q = 4 indefinite: g·X + f·Y.
    SoPq4 {
        sig: Signature,
        f: RadialRef,
        g: RadialRef,
    },
    /// p+q ≥ 5 indefinite: g·X.
    SoPqN { sig: Signature, g: RadialRef },
    /// Static su(n) family (n ≥ 4): antisymmetric part plus imaginary
    /// symmetric-traceless part with two profiles.
    SuNStatic {
        n: usize,
        f: RadialRef,
        g1: RadialRef,
        g2: RadialRef,
    },
    /// Dimensionless su(n) family with spacetime profiles; time component 0.
    SuNDim {
        n: usize,
        h1: SpacetimeRef,
        h2: SpacetimeRef,
        h3: SpacetimeRef,
    },
    /// Rotation family on an isotropic Lorentzian background; time component 0.
    IsoSoN { n: usize, g: SpacetimeRef },
}

impl GaugeAnsatz {
    /// Ambient spatial signature.
    pub fn sig(&self) -> Signature {
        match self {
            GaugeAnsatz::So3 { .. } => Signature::euclidean(3),
            GaugeAnsatz::So4 { .. } => Signature::euclidean(4),
            GaugeAnsatz::SoN { n, .. }
            | GaugeAnsatz::SuNStatic { n, .. }
            | GaugeAnsatz::SuNDim { n, .. }
            | GaugeAnsatz::IsoSoN { n, .. } => Signature::euclidean(*n),
            GaugeAnsatz::SoPq3 { sig, .. }
            | GaugeAnsatz::SoPq4 { sig, .. }
            | GaugeAnsatz::SoPqN { sig, .. } => *sig,
        }
    }

    /// Whether evaluation produces an extra leading time component.
    pub fn has_time_slot(&self) -> bool {
        matches!(self, GaugeAnsatz::SuNDim { .. } | GaugeAnsatz::IsoSoN { .. })
    }

    pub fn case_name(&self) -> String {
        match self {
            GaugeAnsatz::So3 { .. } => "so3".into(),
            GaugeAnsatz::So4 { .. } => "so4".into(),
            GaugeAnsatz::SoN { n, .. } => format!("son-{n}"),
            GaugeAnsatz::SoPq3 { sig, .. } => format!("sopq3-{}-{}", sig.p, sig.q),
            GaugeAnsatz::SoPq4 { sig, .. } => format!("sopq4-{}-{}", sig.p, sig.q),
            GaugeAnsatz::SoPqN { sig, .. } => format!("sopqn-{}-{}", sig.p, sig.q),
            GaugeAnsatz::SuNStatic { n, .. } => format!("sun-static-{n}"),
            GaugeAnsatz::SuNDim { n, .. } => format!("sun-{n}"),
            GaugeAnsatz::IsoSoN { n, .. } => format!("iso-son-{n}"),
        }
    }

    /// Evaluate the component tuple at (t, x). Spatial-only cases ignore t.
    pub fn eval(&self, t: f64, x: &RVec) -> Result<TensorField> {
        self.eval_perturbed(t, x, 0.0)
    }

    /// Evaluation with the leading profile value shifted by `corrupt · x₂`;
    /// a nonzero shift breaks equivariance by construction and serves as the
    /// negative control for residual checks.
    pub fn eval_perturbed(&self, t: f64, x: &RVec, corrupt: f64) -> Result<TensorField> {
        let sig = self.sig();
        let n = sig.n();
        if x.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "point has {} coordinates, ansatz expects {n}",
                x.len()
            )));
        }
        let bump = corrupt * x[1];
        let r = match self {
            GaugeAnsatz::SoPq3 { sig, .. }
            | GaugeAnsatz::SoPq4 { sig, .. }
            | GaugeAnsatz::SoPqN { sig, .. } => sig.pseudo_norm(x)?,
            _ => {
                let r = x.norm();
                if r == 0.0 {
                    return Err(Error::Domain("profiles are sampled at r = ‖x‖ > 0".into()));
                }
                r
            }
        };

        let mut comps: Vec<CMat> = Vec::new();
        match self {
            GaugeAnsatz::SoN { g, .. } | GaugeAnsatz::SoPqN { g, .. } => {
                let gv = g.v(r) + bump;
                for mu in 0..n {
                    comps.push(x_field(sig, x, mu) * C64::new(gv, 0.0));
                }
            }
            GaugeAnsatz::So3 { f, g, h } => {
                let (fv, gv, hv) = (f.v(r), g.v(r) + bump, h.v(r));
                for mu in 0..3 {
                    let mut m = x_field(sig, x, mu) * C64::new(gv, 0.0);
                    for i in 0..3 {
                        for j in 0..3 {
                            let mut v = fv * levi_civita(&[i, j, mu]) as f64;
                            for k in 0..3 {
                                v += hv * x[mu] * levi_civita(&[i, j, k]) as f64 * x[k];
                            }
                            m[(i, j)] += C64::new(v, 0.0);
                        }
                    }
                    comps.push(m);
                }
            }
            GaugeAnsatz::So4 { f, g } | GaugeAnsatz::SoPq4 { f, g, .. } => {
                let (fv, gv) = (f.v(r), g.v(r) + bump);
                for mu in 0..4 {
                    comps.push(
                        x_field(sig, x, mu) * C64::new(gv, 0.0)
                            + y_field(sig, x, mu) * C64::new(fv, 0.0),
                    );
                }
            }
            GaugeAnsatz::SoPq3 {
                sig,
                f,
                g,
                h,
                const_sign,
            } => {
                let (fv, gv, hv) = (f.v(r), g.v(r) + bump, h.v(r));
                for mu in 0..3 {
                    let mut m = x_field(*sig, x, mu) * C64::new(gv, 0.0);
                    for i in 0..3 {
                        for j in 0..3 {
                            let mut v = 0.0;
                            for k in 0..3 {
                                v += fv
                                    * sig.eps(mu)
                                    * sig.eps(i)
                                    * x[mu]
                                    * levi_civita(&[i, j, k]) as f64
                                    * x[k];
                            }
                            let pre = match const_sign {
                                Pq3ConstSign::EpsMuI => sig.eps(mu) * sig.eps(i),
                                Pq3ConstSign::EpsMuJ => sig.eps(mu) * sig.eps(j),
                            };
                            v += hv * pre * levi_civita(&[mu, i, j]) as f64;
                            m[(i, j)] += C64::new(v, 0.0);
                        }
                    }
                    comps.push(m);
                }
            }
            GaugeAnsatz::SuNStatic { n, f, g1, g2 } => {
                let (fv, g1v, g2v) = (f.v(r) + bump, g1.v(r), g2.v(r));
                let r2 = x.norm_squared();
                for i in 0..*n {
                    comps.push(CMat::from_fn(*n, *n, |a, b| {
                        let re = fv * (x[a] * kron(i, b) - kron(i, a) * x[b]);
                        let im = g1v * x[i] * (x[a] * x[b] - r2 * kron(a, b) / *n as f64)
                            + g2v
                                * (kron(i, a) * x[b] + x[a] * kron(i, b)
                                    - 2.0 * x[i] * kron(a, b) / *n as f64);
                        C64::new(re, im)
                    }));
                }
            }
            GaugeAnsatz::SuNDim { n, h1, h2, h3 } => {
                let (h1v, h2v, h3v) = (h1.v(t, r) + bump, h2.v(t, r), h3.v(t, r));
                comps.push(CMat::zeros(*n, *n)); // time component
                for i in 0..*n {
                    let m = sun_f_field(*n, x, i) * C64::new(h1v + 1.0, 0.0)
                        + sun_g1_field(*n, x) * C64::new(h3v * x[i] - 2.0 * h2v * x[i], 0.0)
                        + sun_g2_field(*n, x, i) * C64::new(h2v, 0.0);
                    comps.push(m);
                }
            }
            GaugeAnsatz::IsoSoN { n, g } => {
                let gv = g.v(t, r) + bump;
                comps.push(CMat::zeros(*n, *n)); // time component
                for mu in 0..*n {
                    comps.push(x_field(sig, x, mu) * C64::new(gv, 0.0));
                }
            }
        }
        Ok(TensorField {
            comps,
            sig,
            has_time_slot: self.has_time_slot(),
        })
    }
}

/// Equivariance defect of the ansatz at (Λ, x):
/// max_μ ‖B_μ(Λx) − Σ_ν Ad(Λ)(B_ν(x))·[Λ⁻¹]_{ν,μ}‖, normalized by the field
/// magnitude. Time-slot cases extend Λ by the identity on the time axis.
pub fn equivariance_residual(a: &GaugeAnsatz, lam: &GroupElement, x: &RVec, t: f64) -> Result<f64> {
    equivariance_residual_perturbed(a, lam, x, t, 0.0)
}

/// See [`equivariance_residual`]; `corrupt` feeds the negative control.
pub fn equivariance_residual_perturbed(
    a: &GaugeAnsatz,
    lam: &GroupElement,
    x: &RVec,
    t: f64,
    corrupt: f64,
) -> Result<f64> {
    let b_x = a.eval_perturbed(t, x, corrupt)?;
    let lx = &lam.mat * x;
    let b_lx = a.eval_perturbed(t, &lx, corrupt)?;
    let lam_inv = lam.inverse();
    let m = b_x.comps.len();
    let offset = if b_x.has_time_slot { 1 } else { 0 };

    let mut worst = 0.0_f64;
    for mu in 0..m {
        let expect = if offset == 1 && mu == 0 {
            // Time slot transforms by Ad alone (Λ fixes the time axis).
            lam.ad(&b_x.comps[0])
        } else {
            let mu_s = mu - offset;
            let mut acc = CMat::zeros(lam.sig.n(), lam.sig.n());
            for nu_s in 0..lam.sig.n() {
                let w = lam_inv[(nu_s, mu_s)];
                if w != 0.0 {
                    acc += lam.ad(&b_x.comps[nu_s + offset]) * C64::new(w, 0.0);
                }
            }
            acc
        };
        worst = worst.max(fro_norm(&(&b_lx.comps[mu] - expect)));
    }
    let scale = b_x.max_comp_norm().max(b_lx.max_comp_norm()).max(1e-300);
    Ok(worst / scale)
}

/// Constant-profile rotation-family ansatz (tests, CLI smoke paths).
pub fn son_with_constant(n: usize, c: f64) -> GaugeAnsatz {
    GaugeAnsatz::SoN {
        n,
        g: crate::profile::constant(c),
    }
}

/// Random smooth profiles for every slot of the given case tag.
pub fn random_ansatz(case: &str, rng: &mut rand_chacha::ChaCha8Rng) -> Result<GaugeAnsatz> {
    use crate::profile::{random_smooth, random_smooth_2d};
    let a = match case {
        "so3" => GaugeAnsatz::So3 {
            f: random_smooth(rng),
            g: random_smooth(rng),
            h: random_smooth(rng),
        },
        "so4" => GaugeAnsatz::So4 {
            f: random_smooth(rng),
            g: random_smooth(rng),
        },
        "son5" => GaugeAnsatz::SoN {
            n: 5,
            g: random_smooth(rng),
        },
        "son6" => GaugeAnsatz::SoN {
            n: 6,
            g: random_smooth(rng),
        },
        "sopq3-1-2" => GaugeAnsatz::SoPq3 {
            sig: Signature::new(1, 2),
            f: random_smooth(rng),
            g: random_smooth(rng),
            h: random_smooth(rng),
            const_sign: Pq3ConstSign::EpsMuI,
        },
        "sopq4-1-3" => GaugeAnsatz::SoPq4 {
            sig: Signature::new(1, 3),
            f: random_smooth(rng),
            g: random_smooth(rng),
        },
        "sopq4-2-2" => GaugeAnsatz::SoPq4 {
            sig: Signature::new(2, 2),
            f: random_smooth(rng),
            g: random_smooth(rng),
        },
        "sopqn-2-3" => GaugeAnsatz::SoPqN {
            sig: Signature::new(2, 3),
            g: random_smooth(rng),
        },
        "sopqn-1-4" => GaugeAnsatz::SoPqN {
            sig: Signature::new(1, 4),
            g: random_smooth(rng),
        },
        "sun-static-5" => GaugeAnsatz::SuNStatic {
            n: 5,
            f: random_smooth(rng),
            g1: random_smooth(rng),
            g2: random_smooth(rng),
        },
        "sun4" => GaugeAnsatz::SuNDim {
            n: 4,
            h1: random_smooth_2d(rng),
            h2: random_smooth_2d(rng),
            h3: random_smooth_2d(rng),
        },
        "sun5" => GaugeAnsatz::SuNDim {
            n: 5,
            h1: random_smooth_2d(rng),
            h2: random_smooth_2d(rng),
            h3: random_smooth_2d(rng),
        },
        "iso-son5" => GaugeAnsatz::IsoSoN {
            n: 5,
            g: random_smooth_2d(rng),
        },
        other => {
            return Err(Error::UnsupportedCase(format!(
                "unknown ansatz tag `{other}`"
            )))
        }
    };
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gen_a;
    use crate::group::{standard_element, StandardKind};
    use crate::profile::{constant, zero};
    use crate::verify::seeded_rng;
    use rand::Rng;

    #[test]
    fn son_zero_profile_gives_zero() {
        let a = GaugeAnsatz::SoN { n: 5, g: zero() };
        let x = RVec::from_vec(vec![0.3, -0.2, 0.9, 0.1, -0.5]);
        let b = a.eval(0.0, &x).unwrap();
        assert!(b.max_comp_norm() == 0.0);
    }

    #[test]
    fn son_unit_profile_at_e1() {
        // With g ≡ 1 at x = e₁ the components are B_μ = e^A_{1,μ} (B₁ = 0).
        let a = son_with_constant(5, 1.0);
        let x = RVec::from_fn(5, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let b = a.eval(0.0, &x).unwrap();
        assert!(fro_norm(&b.comps[0]) < 1e-15);
        for mu in 1..5 {
            let want = gen_a(5, 0, mu);
            assert!(fro_norm(&(&b.comps[mu] - want)) < 1e-15, "mu = {mu}");
        }
    }

    #[test]
    fn so3_pure_f_is_constant_epsilon() {
        let a = GaugeAnsatz::So3 {
            f: constant(1.0),
            g: zero(),
            h: zero(),
        };
        let x = RVec::from_vec(vec![0.4, -1.1, 0.7]);
        let b = a.eval(0.0, &x).unwrap();
        for mu in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let want = levi_civita(&[i, j, mu]) as f64;
                    assert!((b.comps[mu][(i, j)].re - want).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn equivariance_identity_element() {
        let mut rng = seeded_rng(2);
        let a = random_ansatz("son5", &mut rng).unwrap();
        let id = GroupElement::identity(Signature::euclidean(5));
        let x = RVec::from_vec(vec![0.9, 0.2, -0.3, 0.5, 0.1]);
        assert!(equivariance_residual(&a, &id, &x, 0.0).unwrap() < 1e-15);
    }

    #[test]
    fn equivariance_of_rotation_families() {
        let mut rng = seeded_rng(3);
        for tag in ["so3", "so4", "son5", "son6", "sun-static-5", "sun4", "iso-son5"] {
            let a = random_ansatz(tag, &mut rng).unwrap();
            let sig = a.sig();
            for _ in 0..20 {
                let lam = crate::equivariance::random_group_element(sig, &mut rng);
                let x = RVec::from_fn(sig.n(), |_, _| rng.random_range(0.3..1.0));
                let res = equivariance_residual(&a, &lam, &x, 0.4).unwrap();
                assert!(res < 1e-9, "{tag}: residual {res:.3e}");
            }
        }
    }

    #[test]
    fn equivariance_of_indefinite_families() {
        let mut rng = seeded_rng(5);
        for tag in ["sopq3-1-2", "sopq4-1-3", "sopq4-2-2", "sopqn-2-3", "sopqn-1-4"] {
            let a = random_ansatz(tag, &mut rng).unwrap();
            let sig = a.sig();
            let mut done = 0;
            while done < 20 {
                let lam = crate::equivariance::random_group_element(sig, &mut rng);
                let mut x = RVec::from_fn(sig.n(), |_, _| rng.random_range(-0.6..0.6));
                x[0] = rng.random_range(1.5..2.5);
                if !sig.is_timelike(&x) || !sig.is_timelike(&(&lam.mat * &x)) {
                    continue;
                }
                done += 1;
                let res = equivariance_residual(&a, &lam, &x, 0.0).unwrap();
                assert!(res < 1e-9, "{tag}: residual {res:.3e}");
            }
        }
    }

    #[test]
    fn corrupted_ansatz_fails_loudly() {
        let mut rng = seeded_rng(7);
        let a = random_ansatz("son5", &mut rng).unwrap();
        let sig = a.sig();
        let lam = standard_element(StandardKind::Rotation, 0, 1, 1.1, sig).unwrap();
        let x = RVec::from_vec(vec![0.8, 0.5, -0.2, 0.4, 0.6]);
        let res = equivariance_residual_perturbed(&a, &lam, &x, 0.0, 0.5).unwrap();
        assert!(res > 1e-3, "corrupted residual {res:.3e}");
    }

    #[test]
    fn sun_dim_time_component_is_zero() {
        let mut rng = seeded_rng(11);
        let a = random_ansatz("sun4", &mut rng).unwrap();
        let x = RVec::from_vec(vec![0.7, -0.4, 0.5, 0.3]);
        let b = a.eval(0.3, &x).unwrap();
        assert!(b.has_time_slot);
        assert_eq!(b.comps.len(), 5);
        assert!(fro_norm(&b.comps[0]) == 0.0);
        // Components are anti-Hermitian and traceless.
        for c in &b.comps[1..] {
            assert!(fro_norm(&(c.adjoint() + c)) < 1e-14);
            assert!(c.trace().norm() < 1e-14);
        }
    }
}
