//! Group elements of SO^+(p,q), the adjoint and tensor representations,
//! frame matrices transporting ‖x‖e₁ to x, the double-cover differential for
//! spin(p,q), and a pointwise Killing-condition checker.

use std::fmt;

use crate::algebra::{gen_f, OrderedBasis, Signature};
use crate::error::{Error, Result};
use crate::{fro_norm, C64, CMat, RMat, RVec};

/// How a [`GroupElement`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Rotation,
    Boost,
    Frame,
    General,
}

/// One-parameter standard family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardKind {
    Rotation,
    Boost,
}

/// An element of SO^+(p,q) with its signature.
#[derive(Debug, Clone)]
pub struct GroupElement {
    pub mat: RMat,
    pub sig: Signature,
    pub kind: ElementKind,
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} element of SO+{}", self.kind, self.sig)
    }
}

impl GroupElement {
    pub fn identity(sig: Signature) -> Self {
        GroupElement {
            mat: RMat::identity(sig.n(), sig.n()),
            sig,
            kind: ElementKind::General,
        }
    }

    pub fn new_checked(mat: RMat, sig: Signature, kind: ElementKind) -> Result<Self> {
        let g = GroupElement { mat, sig, kind };
        let resid = g.invariant_residual();
        if resid > 1e-10 {
            return Err(Error::NotInAlgebra {
                residual: resid,
                tol: 1e-10,
            });
        }
        Ok(g)
    }

    /// ‖g^T I g − I‖ + |det g − 1|.
    pub fn invariant_residual(&self) -> f64 {
        let i_pq = self.sig.diag();
        let rel = self.mat.transpose() * &i_pq * &self.mat - &i_pq;
        rel.norm() + (self.mat.determinant() - 1.0).abs()
    }

    /// g⁻¹ = I_{p,q} g^T I_{p,q}, exact for signature-orthogonal matrices.
    pub fn inverse(&self) -> RMat {
        let i_pq = self.sig.diag();
        &i_pq * self.mat.transpose() * &i_pq
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            mat: &self.mat * &other.mat,
            sig: self.sig,
            kind: ElementKind::General,
        }
    }

    pub fn matrix_c(&self) -> CMat {
        self.mat.map(|x| C64::new(x, 0.0))
    }

    /// Adjoint action on an algebra matrix: Ad(g)(M) = g M g⁻¹
    /// (equals g·M·I_{p,q}·g^T·I_{p,q} on the signature-orthogonal group).
    pub fn ad(&self, m: &CMat) -> CMat {
        let g = self.matrix_c();
        let ginv = self.inverse().map(|x| C64::new(x, 0.0));
        &g * m * &ginv
    }
}

/// The standard one-parameter elements: plane rotations (cos/sin block on a
/// same-sign index pair) and boosts (cosh/sinh block on a mixed pair).
/// Indices are 0-based with i < j.
pub fn standard_element(
    kind: StandardKind,
    i: usize,
    j: usize,
    param: f64,
    sig: Signature,
) -> Result<GroupElement> {
    let n = sig.n();
    if i >= j || j >= n {
        return Err(Error::Domain(format!(
            "standard element needs 0 <= i < j < n, got ({i},{j}) with n = {n}"
        )));
    }
    let same_block = sig.eps(i) == sig.eps(j);
    let mut m = RMat::identity(n, n);
    match kind {
        StandardKind::Rotation => {
            if !same_block {
                return Err(Error::Domain(format!(
                    "rotation requires both indices in the same signature block, got ({i},{j}) for {sig}"
                )));
            }
            m[(i, i)] = param.cos();
            m[(j, j)] = param.cos();
            m[(i, j)] = -param.sin();
            m[(j, i)] = param.sin();
        }
        StandardKind::Boost => {
            if same_block {
                return Err(Error::Domain(format!(
                    "boost requires a mixed-signature index pair, got ({i},{j}) for {sig}"
                )));
            }
            m[(i, i)] = param.cosh();
            m[(j, j)] = param.cosh();
            m[(i, j)] = param.sinh();
            m[(j, i)] = param.sinh();
        }
    }
    GroupElement::new_checked(
        m,
        sig,
        match kind {
            StandardKind::Rotation => ElementKind::Rotation,
            StandardKind::Boost => ElementKind::Boost,
        },
    )
}

/// Matrix of the adjoint representation in the coordinates of `basis`.
pub fn adjoint_op(g: &GroupElement, basis: &OrderedBasis) -> RMat {
    let d = basis.dim();
    let mut m = RMat::zeros(d, d);
    for (k, e) in basis.elements.iter().enumerate() {
        let img = g.ad(e);
        let coords = basis.expand(&img);
        m.set_column(k, &coords);
    }
    m
}

/// The tensor representation on R^n ⊗ g together with the generating element.
#[derive(Debug, Clone)]
pub struct RhoOperator {
    pub matrix: RMat,
    pub element: GroupElement,
}

/// Twist factor acting on the vector slot: (g⁻¹)^T = I_{p,q} g I_{p,q}.
/// Reduces to g itself in the Euclidean case.
pub fn vector_twist(g: &GroupElement) -> RMat {
    let i_pq = g.sig.diag();
    &i_pq * &g.mat * &i_pq
}

/// Kronecker-structured matrix of the action (C_μ) ↦ Σ_ν [g⁻¹]_{ν,μ} Ad(g)(C_ν)
/// in the coordinates "vector slot major, algebra coordinates minor".
pub fn rho_op(g: &GroupElement, basis: &OrderedBasis) -> RhoOperator {
    let twist = vector_twist(g);
    let ad = adjoint_op(g, basis);
    RhoOperator {
        matrix: twist.kronecker(&ad),
        element: g.clone(),
    }
}

/// Element of R^n ⊗ g stored as an n-tuple of algebra matrices.
#[derive(Debug, Clone)]
pub struct TensorVector {
    pub comps: Vec<CMat>,
    pub sig: Signature,
}

impl TensorVector {
    pub fn zeros(sig: Signature) -> Self {
        let n = sig.n();
        TensorVector {
            comps: vec![CMat::zeros(n, n); n],
            sig,
        }
    }

    pub fn n(&self) -> usize {
        self.comps.len()
    }

    /// Flat coordinates over `basis` (slot-major layout).
    pub fn to_coords(&self, basis: &OrderedBasis) -> RVec {
        let d = basis.dim();
        let mut v = RVec::zeros(self.n() * d);
        for (mu, comp) in self.comps.iter().enumerate() {
            let c = basis.expand(comp);
            v.rows_mut(mu * d, d).copy_from(&c);
        }
        v
    }

    pub fn from_coords(coords: &RVec, basis: &OrderedBasis) -> Self {
        let d = basis.dim();
        let n = basis.n();
        assert_eq!(coords.len(), n * d);
        let comps = (0..n)
            .map(|mu| basis.combine(&RVec::from(coords.rows(mu * d, d).clone_owned())))
            .collect();
        TensorVector {
            comps,
            sig: basis.sig,
        }
    }

    /// Largest defining-relation residual among the components.
    pub fn algebra_residual(&self, basis: &OrderedBasis) -> f64 {
        self.comps
            .iter()
            .map(|c| basis.algebra_residual(c))
            .fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| fro_norm(c).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Apply the action componentwise from its definition, without going through
/// coordinates: (ρ(g)C)_μ = Σ_ν [g⁻¹]_{ν,μ} · g C_ν g⁻¹.
pub fn rho_apply_direct(g: &GroupElement, tv: &TensorVector) -> TensorVector {
    let ginv = g.inverse();
    let n = tv.n();
    let mut out = Vec::with_capacity(n);
    for mu in 0..n {
        let mut acc = CMat::zeros(g.sig.n(), g.sig.n());
        for nu in 0..n {
            if ginv[(nu, mu)] != 0.0 {
                acc += g.ad(&tv.comps[nu]) * C64::new(ginv[(nu, mu)], 0.0);
            }
        }
        out.push(acc);
    }
    TensorVector {
        comps: out,
        sig: tv.sig,
    }
}

/// Frame matrix: some g_x ∈ SO^+(p,q) with g_x · ‖x‖e₁ = x.
///
/// Uses closed-form entries (first column x/‖x‖, upper row and diagonal from
/// nested radicands, zeros above the diagonal elsewhere) when every radicand
/// is safely positive, otherwise falls back to signature-aware Gram-Schmidt
/// on a perturbed seed basis. Column signs are then fixed to land in the
/// identity component.
pub fn frame_matrix(x: &RVec, sig: Signature) -> Result<GroupElement> {
    let n = sig.n();
    if x.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "frame vector length {} != n = {n}",
            x.len()
        )));
    }
    if x.norm() == 0.0 {
        return Err(Error::Domain("frame matrix undefined at x = 0".into()));
    }
    let r = sig.pseudo_norm(x)?;

    // Nested radicands R_j = x₁² + Σ_{k≥j} ε(k) x_k², j = 1..n+1 (0-based j-1).
    // R_1 = r², R_{n+1} = x₁².
    let radicand = |j: usize| -> f64 {
        let mut s = x[0] * x[0];
        for k in j..n {
            s += sig.eps(k) * x[k] * x[k];
        }
        s
    };
    let all_safe = (1..=n).all(|j| radicand(j) > 1e-8 * r * r);

    let candidate = if all_safe {
        let mut m = RMat::zeros(n, n);
        for i in 0..n {
            m[(i, 0)] = x[i] / r;
        }
        for j in 1..n {
            let den = (radicand(j).sqrt()) * (radicand(j + 1).sqrt());
            m[(0, j)] = x[0] * x[j] / den;
            for i in (j + 1)..n {
                m[(i, j)] = -sig.eps(i) * x[i] * x[j] / den;
            }
            m[(j, j)] = -sig.eps(j) * radicand(j + 1).sqrt() / radicand(j).sqrt();
        }
        m
    } else {
        gram_schmidt_frame(x, sig)?
    };

    orient_into_group(candidate, x, sig)
}

/// Signature-aware Gram-Schmidt seeded with (x, e₂, ..., e_n); the seed tail
/// is rotated when a candidate degenerates. Produces columns orthonormal for
/// I_{p,q} with the first p time-like, the last q space-like, column 1 = x/‖x‖.
fn gram_schmidt_frame(x: &RVec, sig: Signature) -> Result<RMat> {
    let n = sig.n();
    let r = sig.pseudo_norm(x)?;
    for attempt in 0..8 {
        // Candidate pool: x first, then the coordinate axes mildly rotated.
        let angle = attempt as f64 * 0.37;
        let mut pool: Vec<RVec> = vec![x / r];
        for k in 1..n {
            let mut v = RVec::zeros(n);
            v[k] = angle.cos();
            v[(k % (n - 1)) + 1] += angle.sin();
            if attempt > 3 {
                v[0] = 0.1 * (attempt as f64) * ((k as f64) * 0.77).sin();
            }
            pool.push(v);
        }
        if let Some(m) = try_gram_schmidt(&pool, sig) {
            return Ok(m);
        }
    }
    Err(Error::Numerical(
        "indefinite Gram-Schmidt failed to produce a frame".into(),
    ))
}

fn try_gram_schmidt(pool: &[RVec], sig: Signature) -> Option<RMat> {
    let n = sig.n();
    let mut plus: Vec<RVec> = Vec::new();
    let mut minus: Vec<RVec> = Vec::new();
    let mut used = vec![false; pool.len()];
    // First vector is the normalized time-like seed.
    plus.push(pool[0].clone());
    used[0] = true;
    while plus.len() + minus.len() < n {
        let mut advanced = false;
        for (k, cand) in pool.iter().enumerate() {
            if used[k] {
                continue;
            }
            let mut y = cand.clone();
            for b in plus.iter().chain(minus.iter()) {
                let sign = sig.inner(b, b);
                y -= b * (sig.inner(b, &y) / sign);
            }
            let norm2 = sig.inner(&y, &y);
            if norm2.abs() < 1e-10 {
                continue;
            }
            let y = &y / norm2.abs().sqrt();
            if norm2 > 0.0 && plus.len() < sig.p {
                plus.push(y);
                used[k] = true;
                advanced = true;
                break;
            } else if norm2 < 0.0 && minus.len() < sig.q {
                minus.push(y);
                used[k] = true;
                advanced = true;
                break;
            }
        }
        if !advanced {
            return None;
        }
    }
    let mut m = RMat::zeros(n, n);
    for (c, v) in plus.iter().chain(minus.iter()).enumerate() {
        m.set_column(c, v);
    }
    Some(m)
}

/// Fix column signs so that det = +1 and the element is orthochronous
/// (positive determinant of the leading p×p block), without touching the
/// pinned first column.
fn orient_into_group(mut m: RMat, x: &RVec, sig: Signature) -> Result<GroupElement> {
    let n = sig.n();
    let flip = |m: &mut RMat, j: usize| {
        for i in 0..n {
            m[(i, j)] = -m[(i, j)];
        }
    };
    if m.determinant() < 0.0 {
        flip(&mut m, n - 1);
    }
    let ortho = |m: &RMat| -> f64 {
        if sig.q == 0 || sig.p == 0 {
            1.0
        } else {
            m.view((0, 0), (sig.p, sig.p)).determinant()
        }
    };
    if ortho(&m) <= 0.0 {
        if sig.p >= 2 && sig.q >= 1 {
            // One flip per signature block keeps the determinant.
            flip(&mut m, sig.p - 1);
            flip(&mut m, n - 1);
        } else {
            return Err(Error::Domain(
                "vector lies outside the orbit of ‖x‖e₁ under the orthochronous group \
                 (past-directed time-like vector)"
                    .into(),
            ));
        }
    }
    let g = GroupElement::new_checked(m, sig, ElementKind::Frame)?;
    // Transport property g_x · ‖x‖ e₁ = x.
    let r = sig.pseudo_norm(x)?;
    let image = &g.mat * RVec::from_fn(sig.n(), |i, _| if i == 0 { r } else { 0.0 });
    if (&image - x).norm() > 1e-10 * (1.0 + x.norm()) {
        return Err(Error::Numerical(format!(
            "frame matrix transport residual {:.3e}",
            (&image - x).norm()
        )));
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// spin(p,q) through the double-cover differential
// ---------------------------------------------------------------------------

/// Coefficient vector over the ordered pair basis {e_i×e_j, i<j} of spin(p,q).
#[derive(Debug, Clone)]
pub struct SpinCoefficients {
    pub coeffs: RVec,
    pub sig: Signature,
}

/// Ordered list of index pairs (i<j) used for spin coefficients.
pub fn spin_pairs(sig: Signature) -> Vec<(usize, usize)> {
    let n = sig.n();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

/// Image of a single Clifford pair under the double-cover differential,
/// computed from λ_d(z)x = z·x − x·z in the Clifford algebra:
/// λ_d(e_i×e_j) = 2(ε(j) e_i e_j^T − ε(i) e_j e_i^T) = 2·e^A_{i,j}·I_{p,q}.
/// In the Euclidean case this is 2·e^A_{i,j}.
pub fn spin_pair_image(sig: Signature, i: usize, j: usize) -> CMat {
    gen_f(sig, i, j) * C64::new(2.0, 0.0)
}

/// Forward double-cover differential on coefficients.
pub fn spin_lambda_d(c: &SpinCoefficients) -> CMat {
    let pairs = spin_pairs(c.sig);
    let n = c.sig.n();
    let mut m = CMat::zeros(n, n);
    for (k, (i, j)) in pairs.iter().enumerate() {
        if c.coeffs[k] != 0.0 {
            m += spin_pair_image(c.sig, *i, *j) * C64::new(c.coeffs[k], 0.0);
        }
    }
    m
}

/// Inverse of the double-cover differential, derived from the forward map:
/// the pair images 2·e^A_{i,j}·I_{p,q} have disjoint supports, so the
/// coefficient on e_i×e_j reads off entry (i,j) directly. Exact.
pub fn spin_lambda_inv(m: &CMat, sig: Signature) -> Result<SpinCoefficients> {
    let basis = OrderedBasis::build(crate::algebra::BasisKind::SoPQ, sig)?;
    let resid = basis.algebra_residual(m);
    let tol = 1e-10 * fro_norm(m).max(1.0);
    if resid > tol {
        return Err(Error::NotInAlgebra {
            residual: resid,
            tol,
        });
    }
    let pairs = spin_pairs(sig);
    let coeffs = RVec::from_fn(pairs.len(), |k, _| {
        let (i, j) = pairs[k];
        // [2 e^A_{i,j} I]_{i,j} = 2 ε(j); entries of distinct pair images
        // never overlap.
        m[(i, j)].re * sig.eps(j) / 2.0
    });
    Ok(SpinCoefficients { coeffs, sig })
}

/// The contraction formula for the inverse as printed in the source
/// material: c_{k,l} = ½ ((X·e_k)^T I_{p,q} e_l) ε(k) ε(l). Kept verbatim so
/// its consistency with the forward map can be measured rather than assumed.
pub fn spin_lambda_inv_contraction(m: &CMat, sig: Signature) -> SpinCoefficients {
    let pairs = spin_pairs(sig);
    let coeffs = RVec::from_fn(pairs.len(), |kidx, _| {
        let (k, l) = pairs[kidx];
        // (X·e_k)^T · I_{p,q} · e_l = X_{l,k} ε(l).
        0.5 * m[(l, k)].re * sig.eps(l) * sig.eps(k) * sig.eps(l)
    });
    SpinCoefficients { coeffs, sig }
}

/// Worst-case deviation of the printed contraction formula from a true
/// inverse, over the pair basis: max_k ‖contraction(λ_d(e_k)) − e_k‖_∞.
pub fn spin_contraction_discrepancy(sig: Signature) -> f64 {
    let pairs = spin_pairs(sig);
    let mut worst = 0.0_f64;
    for k in 0..pairs.len() {
        let mut c = SpinCoefficients {
            coeffs: RVec::zeros(pairs.len()),
            sig,
        };
        c.coeffs[k] = 1.0;
        let img = spin_lambda_d(&c);
        let back = spin_lambda_inv_contraction(&img, sig);
        let diff = &back.coeffs - &c.coeffs;
        worst = worst.max(diff.amax());
    }
    worst
}

// ---------------------------------------------------------------------------
// Killing residual
// ---------------------------------------------------------------------------

/// Frobenius norm of (Jac ξ)^T·g + g·(Jac ξ) + dg(ξ), the pointwise Killing
/// condition for a vector field ξ against a metric g in local coordinates.
pub fn killing_residual(
    xi_value: &RVec,
    xi_jacobian: &RMat,
    metric_value: &RMat,
    metric_gradient_along_xi: &RMat,
) -> Result<f64> {
    let n = xi_value.len();
    if xi_jacobian.shape() != (n, n)
        || metric_value.shape() != (n, n)
        || metric_gradient_along_xi.shape() != (n, n)
    {
        return Err(Error::ShapeMismatch(
            "killing residual needs n-vector and three n×n matrices".into(),
        ));
    }
    let lhs =
        xi_jacobian.transpose() * metric_value + metric_value * xi_jacobian
            + metric_gradient_along_xi;
    Ok(lhs.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gen_a, BasisKind};
    use crate::verify::seeded_rng;
    use rand::Rng;

    #[test]
    fn rotation_zero_angle_is_identity() {
        let sig = Signature::euclidean(3);
        let g = standard_element(StandardKind::Rotation, 1, 2, 0.0, sig).unwrap();
        assert!((&g.mat - RMat::identity(3, 3)).norm() < 1e-15);
    }

    #[test]
    fn boost_block_entries() {
        let sig = Signature::new(1, 1);
        let h = 0.7;
        let g = standard_element(StandardKind::Boost, 0, 1, h, sig).unwrap();
        assert!((g.mat[(0, 0)] - h.cosh()).abs() < 1e-15);
        assert!((g.mat[(0, 1)] - h.sinh()).abs() < 1e-15);
        assert!((g.mat[(1, 0)] - h.sinh()).abs() < 1e-15);
        assert!((g.mat[(1, 1)] - h.cosh()).abs() < 1e-15);
        assert!(g.invariant_residual() < 1e-12);
    }

    #[test]
    fn rotation_quarter_turn() {
        let sig = Signature::euclidean(2);
        let g = standard_element(StandardKind::Rotation, 0, 1, std::f64::consts::FRAC_PI_2, sig)
            .unwrap();
        let want = RMat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!((&g.mat - want).norm() < 1e-15);
    }

    #[test]
    fn standard_element_rejects_wrong_block() {
        let sig = Signature::new(1, 2);
        assert!(standard_element(StandardKind::Rotation, 0, 1, 0.3, sig).is_err());
        assert!(standard_element(StandardKind::Boost, 1, 2, 0.3, sig).is_err());
    }

    #[test]
    fn adjoint_identity_and_rotation_plane() {
        let sig = Signature::euclidean(3);
        let basis = OrderedBasis::build(BasisKind::SoN, sig).unwrap();
        let id = GroupElement::identity(sig);
        assert!((adjoint_op(&id, &basis) - RMat::identity(3, 3)).norm() < 1e-14);

        // Conjugation by a rotation in the (2,3) plane rotates the span of
        // {e^A_{1,2}, e^A_{1,3}} and fixes e^A_{2,3}.
        let th = 0.9_f64;
        let g = standard_element(StandardKind::Rotation, 1, 2, th, sig).unwrap();
        let ad = adjoint_op(&g, &basis);
        let want = RMat::from_row_slice(
            3,
            3,
            &[
                th.cos(),
                -th.sin(),
                0.0,
                th.sin(),
                th.cos(),
                0.0,
                0.0,
                0.0,
                1.0,
            ],
        );
        assert!((&ad - &want).norm() < 1e-13, "got {ad}");
    }

    #[test]
    fn adjoint_is_homomorphism() {
        let sig = Signature::new(2, 2);
        let basis = OrderedBasis::build(BasisKind::SoPQ, sig).unwrap();
        let mut rng = seeded_rng(11);
        for _ in 0..6 {
            let g1 = crate::equivariance::random_group_element(sig, &mut rng);
            let g2 = crate::equivariance::random_group_element(sig, &mut rng);
            let lhs = adjoint_op(&g1.compose(&g2), &basis);
            let rhs = adjoint_op(&g1, &basis) * adjoint_op(&g2, &basis);
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn rho_matches_direct_action() {
        for sig in [Signature::euclidean(4), Signature::new(1, 3), Signature::new(2, 2)] {
            let kind = if sig.is_euclidean() {
                BasisKind::SoN
            } else {
                BasisKind::SoPQ
            };
            let basis = OrderedBasis::build(kind, sig).unwrap();
            let mut rng = seeded_rng(5);
            for _ in 0..4 {
                let g = crate::equivariance::random_group_element(sig, &mut rng);
                let rho = rho_op(&g, &basis);
                // Random tensor vector.
                let coords = RVec::from_fn(sig.n() * basis.dim(), |_, _| rng.random_range(-1.0..1.0));
                let tv = TensorVector::from_coords(&coords, &basis);
                let via_matrix = &rho.matrix * &coords;
                let direct = rho_apply_direct(&g, &tv).to_coords(&basis);
                assert!(
                    (via_matrix - direct).norm() < 1e-12 * (1.0 + coords.norm()),
                    "rho matrix and componentwise action disagree for {sig}"
                );
            }
        }
    }

    #[test]
    fn rho_identity_is_identity() {
        let sig = Signature::euclidean(3);
        let basis = OrderedBasis::build(BasisKind::SoN, sig).unwrap();
        let rho = rho_op(&GroupElement::identity(sig), &basis);
        assert!((rho.matrix - RMat::identity(9, 9)).norm() < 1e-14);
    }

    #[test]
    fn rho_spectrum_for_n3_rotation() {
        // For a plane rotation in n = 3 the tensor representation has
        // eigenvalues 1 (x3), e^{±iθ} (x2 each), e^{±2iθ} (x1 each).
        let sig = Signature::euclidean(3);
        let basis = OrderedBasis::build(BasisKind::SoN, sig).unwrap();
        let th = 1.0_f64;
        let g = standard_element(StandardKind::Rotation, 1, 2, th, sig).unwrap();
        let rho = rho_op(&g, &basis);
        let eig = rho.matrix.complex_eigenvalues();
        let mut counts = [0usize; 5];
        for z in eig.iter() {
            let angle = z.arg();
            for (slot, target) in [0.0, th, -th, 2.0 * th, -2.0 * th].iter().enumerate() {
                if (angle - target).abs() < 1e-8 && (z.norm() - 1.0).abs() < 1e-8 {
                    counts[slot] += 1;
                    break;
                }
            }
        }
        assert_eq!(counts, [3, 2, 2, 1, 1]);
    }

    #[test]
    fn rho_eigenvalues_are_triple_products() {
        // Spectrum of the tensor operator = {λ_μ λ_i λ_j : μ; i<j} as a multiset.
        for (sig, kind, i, j, param) in [
            (Signature::euclidean(4), StandardKind::Rotation, 1, 3, 1.3),
            (Signature::new(1, 3), StandardKind::Boost, 0, 2, 0.8),
            (Signature::new(2, 2), StandardKind::Rotation, 2, 3, std::f64::consts::SQRT_2),
        ] {
            let basis = OrderedBasis::build(
                if sig.is_euclidean() {
                    BasisKind::SoN
                } else {
                    BasisKind::SoPQ
                },
                sig,
            )
            .unwrap();
            let g = standard_element(kind, i, j, param, sig).unwrap();
            let rho = rho_op(&g, &basis);
            let elem_eig = g.mat.complex_eigenvalues();
            let mut expected: Vec<C64> = Vec::new();
            let n = sig.n();
            for mu in 0..n {
                for a in 0..n {
                    for b in (a + 1)..n {
                        expected.push(elem_eig[mu] * elem_eig[a] * elem_eig[b]);
                    }
                }
            }
            let mut got: Vec<C64> = rho.matrix.complex_eigenvalues().iter().copied().collect();
            // Multiset comparison by greedy matching.
            for e in &expected {
                let (kmin, dist) = got
                    .iter()
                    .enumerate()
                    .map(|(k, z)| (k, (z - e).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                assert!(dist < 1e-8, "eigenvalue {e} unmatched (closest {dist:.2e})");
                got.swap_remove(kmin);
            }
        }
    }

    #[test]
    fn frame_matrix_axis_is_identity() {
        let sig = Signature::euclidean(4);
        let x = RVec::from_fn(4, |i, _| if i == 0 { 2.5 } else { 0.0 });
        let g = frame_matrix(&x, sig).unwrap();
        assert!((&g.mat - RMat::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn frame_matrix_boost_case() {
        let sig = Signature::new(1, 1);
        let a = 0.6_f64;
        let x = RVec::from_vec(vec![a.cosh(), a.sinh()]);
        let g = frame_matrix(&x, sig).unwrap();
        let k = standard_element(StandardKind::Boost, 0, 1, a, sig).unwrap();
        assert!((&g.mat - &k.mat).norm() < 1e-12);
    }

    #[test]
    fn frame_matrix_properties_euclidean() {
        let sig = Signature::euclidean(5);
        let mut rng = seeded_rng(3);
        for _ in 0..20 {
            let x = RVec::from_fn(5, |_, _| rng.random_range(-2.0..2.0));
            if x.norm() < 1e-3 {
                continue;
            }
            let g = frame_matrix(&x, sig).unwrap();
            assert!(g.invariant_residual() < 1e-10);
            let r = x.norm();
            let e1 = RVec::from_fn(5, |i, _| if i == 0 { r } else { 0.0 });
            assert!((&g.mat * e1 - &x).norm() < 1e-10 * (1.0 + r));
        }
    }

    #[test]
    fn frame_matrix_indefinite_cases() {
        let mut rng = seeded_rng(13);
        for sig in [Signature::new(1, 2), Signature::new(2, 2), Signature::new(1, 3), Signature::new(2, 3)] {
            let mut found = 0;
            while found < 15 {
                let mut x = RVec::from_fn(sig.n(), |_, _| rng.random_range(-2.0..2.0));
                if sig.p == 1 {
                    x[0] = x[0].abs() + 2.0; // future-directed
                }
                if !sig.is_timelike(&x) {
                    continue;
                }
                found += 1;
                let g = frame_matrix(&x, sig).unwrap();
                assert!(g.invariant_residual() < 1e-10, "invariants for {sig}");
                let r = sig.pseudo_norm(&x).unwrap();
                let e1 = RVec::from_fn(sig.n(), |i, _| if i == 0 { r } else { 0.0 });
                assert!((&g.mat * e1 - &x).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn frame_matrix_coordinate_singular_fallback() {
        // x₁ = 0 makes the trailing radicand vanish; the fallback must cover it.
        let sig = Signature::euclidean(4);
        let x = RVec::from_vec(vec![0.0, 1.3, -0.4, 0.2]);
        let g = frame_matrix(&x, sig).unwrap();
        assert!(g.invariant_residual() < 1e-10);
        let e1 = RVec::from_fn(4, |i, _| if i == 0 { x.norm() } else { 0.0 });
        assert!((&g.mat * e1 - &x).norm() < 1e-10);
    }

    #[test]
    fn frame_matrix_rejects_bad_input() {
        let sig = Signature::new(1, 2);
        assert!(frame_matrix(&RVec::from_vec(vec![0.1, 1.0, 0.0]), sig).is_err()); // space-like
        assert!(frame_matrix(&RVec::zeros(3), sig).is_err());
        // Past-directed time-like vector has no orthochronous frame for p = 1.
        assert!(frame_matrix(&RVec::from_vec(vec![-2.0, 0.3, 0.1]), sig).is_err());
    }

    #[test]
    fn spin_forward_map_euclidean() {
        let sig = Signature::euclidean(3);
        let pairs = spin_pairs(sig);
        let mut c = SpinCoefficients {
            coeffs: RVec::zeros(pairs.len()),
            sig,
        };
        c.coeffs[0] = 1.0; // unit coefficient on e₁×e₂
        let img = spin_lambda_d(&c);
        let want = gen_a(3, 0, 1) * C64::new(2.0, 0.0);
        assert!(fro_norm(&(&img - &want)) < 1e-15);
        // Zero maps to zero.
        c.coeffs[0] = 0.0;
        assert!(fro_norm(&spin_lambda_d(&c)) == 0.0);
    }

    #[test]
    fn spin_roundtrip_exact() {
        let mut rng = seeded_rng(23);
        for sig in [Signature::euclidean(3), Signature::new(1, 3), Signature::new(2, 2)] {
            let pairs = spin_pairs(sig);
            for _ in 0..10 {
                let c = SpinCoefficients {
                    coeffs: RVec::from_fn(pairs.len(), |_, _| rng.random_range(-3.0..3.0)),
                    sig,
                };
                let m = spin_lambda_d(&c);
                let back = spin_lambda_inv(&m, sig).unwrap();
                assert!((&back.coeffs - &c.coeffs).amax() < 1e-13);
            }
        }
    }

    #[test]
    fn spin_inverse_rejects_non_algebra_input() {
        let sig = Signature::new(1, 1);
        let m = crate::algebra::gen_a(2, 0, 1); // antisymmetric, not in so(1,1)
        assert!(spin_lambda_inv(&m, sig).is_err());
    }

    #[test]
    fn killing_examples() {
        let n = 3;
        let flat = RMat::identity(n, n);
        let zero = RMat::zeros(n, n);
        // Rotation generator field ξ(x) = e^A_{1,2}·x against the flat metric.
        let jac = gen_a(n, 0, 1).map(|z| z.re);
        let x = RVec::from_vec(vec![0.3, -1.0, 0.7]);
        let xi = &jac * &x;
        assert!(killing_residual(&xi, &jac, &flat, &zero).unwrap() < 1e-15);
        // Dilation ξ(x) = x gives ‖2 Id‖ = 2√n.
        let r = killing_residual(&x, &RMat::identity(n, n), &flat, &zero).unwrap();
        assert!((r - 2.0 * (n as f64).sqrt()).abs() < 1e-14);
        // Zero field.
        assert!(killing_residual(&RVec::zeros(n), &RMat::zeros(n, n), &flat, &zero).unwrap() == 0.0);
    }
}
