//! Matrix Lie algebra construction: ordered bases for so(n), so(p,q), the
//! 4-dimensional dual families, su(n) split into real parts, and spin(p,q)
//! through the double-cover differential; commutators, trace pairing, the
//! permutation symbol, and basis-expansion with verified residuals.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::{fro_norm, scaled_tol, C64, CMat, RMat, RVec};

/// Metric signature (p pluses followed by q minuses on the diagonal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Self {
        Signature { p, q }
    }

    pub fn euclidean(n: usize) -> Self {
        Signature { p: n, q: 0 }
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    pub fn is_euclidean(&self) -> bool {
        self.q == 0
    }

    /// Sign of the i-th diagonal entry, 0-based: +1 for i < p, -1 otherwise.
    pub fn eps(&self, i: usize) -> f64 {
        if i < self.p {
            1.0
        } else {
            -1.0
        }
    }

    /// The diagonal matrix diag(+1 x p, -1 x q).
    pub fn diag(&self) -> RMat {
        RMat::from_fn(self.n(), self.n(), |i, j| {
            if i == j {
                self.eps(i)
            } else {
                0.0
            }
        })
    }

    pub fn diag_c(&self) -> CMat {
        self.diag().map(|x| C64::new(x, 0.0))
    }

    /// Indefinite inner product x^T I_{p,q} y.
    pub fn inner(&self, x: &RVec, y: &RVec) -> f64 {
        (0..self.n()).map(|i| self.eps(i) * x[i] * y[i]).sum()
    }

    /// True when x^T I_{p,q} x > 0.
    pub fn is_timelike(&self, x: &RVec) -> bool {
        self.inner(x, x) > 0.0
    }

    /// Pseudo-norm sqrt(x^T I x) of a time-like vector.
    pub fn pseudo_norm(&self, x: &RVec) -> Result<f64> {
        let q = self.inner(x, x);
        if q <= 0.0 {
            return Err(Error::Domain(format!(
                "vector is not time-like for signature ({},{}) (quadratic form {q:.3e})",
                self.p, self.q
            )));
        }
        Ok(q.sqrt())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Permutation symbol on 0-based indices: sign of the permutation
/// (indices) of (0, 1, ..., len-1); 0 if any index repeats or is out of range.
pub fn levi_civita(indices: &[usize]) -> i32 {
    let n = indices.len();
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n || seen[i] {
            return 0;
        }
        seen[i] = true;
    }
    // Count inversions; parity gives the sign.
    let mut inv = 0usize;
    for a in 0..n {
        for b in (a + 1)..n {
            if indices[a] > indices[b] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Antisymmetric elementary generator e^A_{i,j} = e_i e_j^T - e_j e_i^T (0-based).
pub fn gen_a(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] += C64::new(1.0, 0.0);
    m[(j, i)] -= C64::new(1.0, 0.0);
    m
}

/// Symmetric elementary generator e^S_{i,j} = e_i e_j^T + e_j e_i^T (0-based).
pub fn gen_s(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] += C64::new(1.0, 0.0);
    m[(j, i)] += C64::new(1.0, 0.0);
    m
}

/// Signature-twisted generator f_{i,j} = e^A_{i,j} · I_{p,q}. These span
/// so(p,q) and reduce to e^A_{i,j} in the Euclidean case.
pub fn gen_f(sig: Signature, i: usize, j: usize) -> CMat {
    let n = sig.n();
    let mut m = CMat::zeros(n, n);
    m[(i, j)] += C64::new(sig.eps(j), 0.0);
    m[(j, i)] -= C64::new(sig.eps(i), 0.0);
    m
}

/// Dual generator in dimension 4: [ē_{k,l}]_{i,j} = ε_{k,i,j,l} entrywise (0-based).
pub fn gen_dual(k: usize, l: usize) -> CMat {
    CMat::from_fn(4, 4, |i, j| {
        C64::new(levi_civita(&[k, i, j, l]) as f64, 0.0)
    })
}

/// Signature-twisted dual generator f̄_{k,l} = I_{p,q} · ē_{k,l} for p+q = 4.
pub fn gen_dual_f(sig: Signature, k: usize, l: usize) -> CMat {
    assert_eq!(sig.n(), 4);
    sig.diag_c() * gen_dual(k, l)
}

/// Label of a basis element inside an [`OrderedBasis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    /// Antisymmetric pair e^A_{i,j}, i < j.
    A(usize, usize),
    /// Symmetric pair e^S_{i,j} (boost direction in so(p,q); times i in su(n)).
    S(usize, usize),
    /// Dual pair ē_{i,j} (dimension 4 only).
    Dual(usize, usize),
    /// Traceless diagonal i·(E_{k,k} - E_{k+1,k+1}) (su(n) only).
    Diag(usize),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Rendered 1-based to match the usual index conventions.
        match self {
            BasisLabel::A(i, j) => write!(f, "eA[{},{}]", i + 1, j + 1),
            BasisLabel::S(i, j) => write!(f, "eS[{},{}]", i + 1, j + 1),
            BasisLabel::Dual(i, j) => write!(f, "dual[{},{}]", i + 1, j + 1),
            BasisLabel::Diag(k) => write!(f, "diag[{}]", k + 1),
        }
    }
}

/// Which Lie algebra an [`OrderedBasis`] spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BasisKind {
    /// so(n): antisymmetric real matrices.
    SoN,
    /// so(p,q): M^T I + I M = 0, trace 0. Rotation pairs precede boost pairs.
    SoPQ,
    /// Dual basis ē of so(4).
    So4Dual,
    /// Twisted dual basis f̄ = I_{p,q}·ē of so(p,q), p+q = 4.
    SoPQ4Dual,
    /// su(n) as a real vector space: e^A pairs, i·e^S pairs, i·(diagonal traceless).
    SuSplit,
    /// spin(p,q) represented through the double-cover differential: element for
    /// the pair (i,j) is λ_d(e_i×e_j) = 2·e^A_{i,j}·I_{p,q}.
    SpinPQ,
}

/// An indexed family of square matrices forming a Lie-algebra basis.
#[derive(Debug, Clone)]
pub struct OrderedBasis {
    pub kind: BasisKind,
    pub sig: Signature,
    pub elements: Vec<CMat>,
    pub labels: Vec<BasisLabel>,
    index_map: HashMap<BasisLabel, usize>,
    /// Cholesky factor of the Gram matrix of the elements under the real
    /// Frobenius inner product; used for coordinate expansion.
    gram_chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

/// Real part of the Frobenius inner product <A,B> = Re tr(A^H B).
pub fn fro_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

impl OrderedBasis {
    fn from_parts(kind: BasisKind, sig: Signature, parts: Vec<(BasisLabel, CMat)>) -> Result<Self> {
        let mut elements = Vec::with_capacity(parts.len());
        let mut labels = Vec::with_capacity(parts.len());
        let mut index_map = HashMap::new();
        for (pos, (label, m)) in parts.into_iter().enumerate() {
            index_map.insert(label, pos);
            labels.push(label);
            elements.push(m);
        }
        let d = elements.len();
        let gram = RMat::from_fn(d, d, |i, j| fro_inner(&elements[i], &elements[j]));
        let gram_chol = nalgebra::Cholesky::new(gram).ok_or_else(|| {
            Error::Numerical("basis elements are not linearly independent".into())
        })?;
        Ok(OrderedBasis {
            kind,
            sig,
            elements,
            labels,
            index_map,
            gram_chol,
        })
    }

    /// Assemble a basis from explicit labelled elements without the per-kind
    /// construction; invariant checks are the caller's responsibility.
    pub fn from_parts_public(
        kind: BasisKind,
        sig: Signature,
        parts: Vec<(BasisLabel, CMat)>,
    ) -> Result<Self> {
        Self::from_parts(kind, sig, parts)
    }

    /// Build the ordered basis for the requested algebra.
    ///
    /// Ordering is by first index, then second index, with rotation pairs
    /// (both indices in the same signature block) before boost pairs for
    /// so(p,q); su(n) lists e^A pairs, then i·e^S pairs, then the diagonal.
    pub fn build(kind: BasisKind, sig: Signature) -> Result<Self> {
        let n = sig.n();
        if n < 2 {
            return Err(Error::UnsupportedCase(format!(
                "algebra dimension n = {n} < 2"
            )));
        }
        let i_ = C64::new(0.0, 1.0);
        let mut parts: Vec<(BasisLabel, CMat)> = Vec::new();
        match kind {
            BasisKind::SoN => {
                if !sig.is_euclidean() {
                    return Err(Error::UnsupportedCase(
                        "so(n) basis requires a Euclidean signature".into(),
                    ));
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        parts.push((BasisLabel::A(i, j), gen_a(n, i, j)));
                    }
                }
            }
            BasisKind::SoPQ => {
                // Rotation pairs within each block, then boosts across blocks.
                for i in 0..sig.p {
                    for j in (i + 1)..sig.p {
                        parts.push((BasisLabel::A(i, j), gen_a(n, i, j)));
                    }
                }
                for i in sig.p..n {
                    for j in (i + 1)..n {
                        parts.push((BasisLabel::A(i, j), gen_a(n, i, j)));
                    }
                }
                for i in 0..sig.p {
                    for j in sig.p..n {
                        parts.push((BasisLabel::S(i, j), gen_s(n, i, j)));
                    }
                }
            }
            BasisKind::So4Dual => {
                if n != 4 || !sig.is_euclidean() {
                    return Err(Error::UnsupportedCase(
                        "dual basis requires Euclidean dimension 4".into(),
                    ));
                }
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        parts.push((BasisLabel::Dual(i, j), gen_dual(i, j)));
                    }
                }
            }
            BasisKind::SoPQ4Dual => {
                if n != 4 {
                    return Err(Error::UnsupportedCase(
                        "twisted dual basis requires p+q = 4".into(),
                    ));
                }
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        parts.push((BasisLabel::Dual(i, j), gen_dual_f(sig, i, j)));
                    }
                }
            }
            BasisKind::SuSplit => {
                if !sig.is_euclidean() {
                    return Err(Error::UnsupportedCase(
                        "su(n) split basis requires a Euclidean signature".into(),
                    ));
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        parts.push((BasisLabel::A(i, j), gen_a(n, i, j)));
                    }
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        parts.push((BasisLabel::S(i, j), gen_s(n, i, j) * i_));
                    }
                }
                for k in 0..(n - 1) {
                    let mut d = CMat::zeros(n, n);
                    d[(k, k)] = i_;
                    d[(k + 1, k + 1)] = -i_;
                    parts.push((BasisLabel::Diag(k), d));
                }
            }
            BasisKind::SpinPQ => {
                for i in 0..n {
                    for j in (i + 1)..n {
                        parts.push((BasisLabel::A(i, j), gen_f(sig, i, j) * C64::new(2.0, 0.0)));
                    }
                }
            }
        }
        let basis = Self::from_parts(kind, sig, parts)?;
        basis.check_invariants()?;
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Matrix side length.
    pub fn n(&self) -> usize {
        self.sig.n()
    }

    pub fn position(&self, label: BasisLabel) -> Option<usize> {
        self.index_map.get(&label).copied()
    }

    pub fn element(&self, label: BasisLabel) -> Option<&CMat> {
        self.position(label).map(|k| &self.elements[k])
    }

    /// Coordinates of `m` on this basis (real coefficients, Gram solve).
    pub fn expand(&self, m: &CMat) -> RVec {
        let rhs = RVec::from_fn(self.dim(), |k, _| fro_inner(&self.elements[k], m));
        self.gram_chol.solve(&rhs)
    }

    /// Coordinates plus the norm of the part of `m` outside the span.
    pub fn expand_checked(&self, m: &CMat) -> (RVec, f64) {
        let coords = self.expand(m);
        let mut recon = CMat::zeros(m.nrows(), m.ncols());
        for (k, e) in self.elements.iter().enumerate() {
            recon += e * C64::new(coords[k], 0.0);
        }
        let resid = fro_norm(&(m - recon));
        (coords, resid)
    }

    /// Reconstruct a matrix from coordinates.
    pub fn combine(&self, coords: &RVec) -> CMat {
        let n = self.n();
        let mut m = CMat::zeros(n, n);
        for (k, e) in self.elements.iter().enumerate() {
            m += e * C64::new(coords[k], 0.0);
        }
        m
    }

    /// Defining-relation residual of a single matrix for this algebra:
    /// so(p,q) families check ‖M^T I + I M‖ + |tr M|; su checks
    /// anti-Hermiticity and trace.
    pub fn algebra_residual(&self, m: &CMat) -> f64 {
        match self.kind {
            BasisKind::SuSplit => {
                let anti = fro_norm(&(m.adjoint() + m));
                anti + m.trace().norm()
            }
            _ => {
                let i_pq = self.sig.diag_c();
                let rel = m.transpose() * &i_pq + &i_pq * m;
                fro_norm(&rel) + m.trace().norm()
            }
        }
    }

    fn check_invariants(&self) -> Result<()> {
        // Element count for the so(p,q) families.
        let n = self.n();
        match self.kind {
            BasisKind::SoN | BasisKind::SoPQ | BasisKind::SpinPQ => {
                if self.dim() != n * (n - 1) / 2 {
                    return Err(Error::Numerical("basis element count mismatch".into()));
                }
            }
            _ => {}
        }
        // Every element satisfies the defining relation of its algebra.
        for e in &self.elements {
            let resid = match self.kind {
                BasisKind::So4Dual => {
                    // Plain antisymmetry; these live in so(4).
                    fro_norm(&(e.transpose() + e)) + e.trace().norm()
                }
                _ => self.algebra_residual(e),
            };
            let tol = scaled_tol(&[e]);
            if resid > tol {
                return Err(Error::NotInAlgebra { residual: resid, tol });
            }
        }
        Ok(())
    }

    /// Largest residual when re-expanding all pairwise commutators in this
    /// basis. Near zero exactly when the span is closed under the bracket.
    pub fn structure_closure_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in &self.elements {
            for b in &self.elements {
                let c = commutator(a, b).expect("square same-size elements");
                let (_, resid) = self.expand_checked(&c);
                worst = worst.max(resid);
            }
        }
        worst
    }
}

/// Matrix commutator AB - BA.
pub fn commutator(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() != a.ncols() || a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "commutator needs equal square shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a * b - b * a)
}

/// Frobenius norm of [A,[B,C]] + [B,[C,A]] + [C,[A,B]].
pub fn jacobi_residual(a: &CMat, b: &CMat, c: &CMat) -> Result<f64> {
    let s = commutator(a, &commutator(b, c)?)?
        + commutator(b, &commutator(c, a)?)?
        + commutator(c, &commutator(a, b)?)?;
    Ok(fro_norm(&s))
}

/// Trace pairing <A,B> = tr(AB).
pub fn trace_pairing(a: &CMat, b: &CMat) -> Result<C64> {
    if a.nrows() != a.ncols() || a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "trace pairing needs equal square shapes, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok((a * b).trace())
}

/// Split of an anti-Hermitian traceless matrix M = A + i·S with A real
/// antisymmetric and S real symmetric traceless.
#[derive(Debug, Clone)]
pub struct SuSplit {
    pub antisym: RMat,
    pub sym: RMat,
}

/// Decompose an su(n) element into its real antisymmetric and imaginary
/// symmetric-traceless parts.
pub fn su_split(m: &CMat) -> Result<SuSplit> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch("su split needs a square matrix".into()));
    }
    let scale = fro_norm(m).max(1.0);
    let herm = fro_norm(&(m.adjoint() + m));
    let tr = m.trace().norm();
    if herm + tr > 1e-12 * scale {
        return Err(Error::NotInAlgebra {
            residual: herm + tr,
            tol: 1e-12 * scale,
        });
    }
    let antisym = m.map(|z| z.re);
    let sym = m.map(|z| z.im);
    Ok(SuSplit { antisym, sym })
}

/// Inverse of [`su_split`]: A + i·S. Exact by construction.
pub fn su_join(s: &SuSplit) -> CMat {
    let n = s.antisym.nrows();
    CMat::from_fn(n, n, |i, j| C64::new(s.antisym[(i, j)], s.sym[(i, j)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn levi_civita_base_cases() {
        assert_eq!(levi_civita(&[0, 1, 2, 3]), 1);
        assert_eq!(levi_civita(&[1, 0, 2, 3]), -1);
        assert_eq!(levi_civita(&[0, 0, 2, 3]), 0);
        assert_eq!(levi_civita(&[2, 0, 1]), 1);
        assert_eq!(levi_civita(&[]), 1);
    }

    #[test]
    fn so3_basis_shape() {
        let b = OrderedBasis::build(BasisKind::SoN, Signature::euclidean(3)).unwrap();
        assert_eq!(b.dim(), 3);
        assert_eq!(b.labels, vec![
            BasisLabel::A(0, 1),
            BasisLabel::A(0, 2),
            BasisLabel::A(1, 2)
        ]);
        for e in &b.elements {
            let nonzero = e.iter().filter(|z| z.norm() > 0.0).count();
            assert_eq!(nonzero, 2);
            for z in e.iter() {
                assert!(z.norm() == 0.0 || (z.norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn so11_single_boost_generator() {
        // dim n(n-1)/2 = 1; the sole element is the symmetric pair generator.
        let sig = Signature::new(1, 1);
        let b = OrderedBasis::build(BasisKind::SoPQ, sig).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.labels[0], BasisLabel::S(0, 1));
        let e = &b.elements[0];
        // Defining relation by direct arithmetic.
        let i_pq = sig.diag_c();
        assert!(fro_norm(&(e.transpose() * &i_pq + &i_pq * e)) < 1e-15);
        assert_eq!(e[(0, 1)], c(1.0));
        assert_eq!(e[(1, 0)], c(1.0));
    }

    #[test]
    fn dual_basis_entries_match_permutation_oracle() {
        let b = OrderedBasis::build(BasisKind::So4Dual, Signature::euclidean(4)).unwrap();
        let e12 = b.element(BasisLabel::Dual(0, 1)).unwrap();
        // Entry (3,4) is ε_{1,3,4,2} and entry (4,3) is ε_{1,4,3,2} (1-based).
        let expect_34 = levi_civita(&[0, 2, 3, 1]) as f64;
        let expect_43 = levi_civita(&[0, 3, 2, 1]) as f64;
        assert_eq!(e12[(2, 3)], c(expect_34));
        assert_eq!(e12[(3, 2)], c(expect_43));
        assert_eq!(expect_34, -expect_43);
        // Everything else in that element vanishes.
        let nonzero = e12.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
        // Full entrywise law for all pairs.
        for (pos, label) in b.labels.iter().enumerate() {
            let BasisLabel::Dual(k, l) = label else { panic!() };
            for i in 0..4 {
                for j in 0..4 {
                    let want = levi_civita(&[*k, i, j, *l]) as f64;
                    assert_eq!(b.elements[pos][(i, j)], c(want));
                }
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let n = 3;
        let e12 = gen_a(n, 0, 1);
        let e13 = gen_a(n, 0, 2);
        let e23 = gen_a(n, 1, 2);
        // [e^A_{1,2}, e^A_{2,3}] = e^A_{1,3} by direct 3x3 arithmetic.
        let got = commutator(&e12, &e23).unwrap();
        assert!(fro_norm(&(&got - &e13)) < 1e-15);
        // [A, A] = 0.
        assert!(fro_norm(&commutator(&e12, &e12).unwrap()) < 1e-15);
        // Mixed su bracket: [e^A_{1,2}, i e^S_{1,3}] = i e^S_{2,3}.
        let i_ = C64::new(0.0, 1.0);
        let lhs = commutator(&e12, &(gen_s(n, 0, 2) * i_)).unwrap();
        let rhs = gen_s(n, 1, 2) * i_;
        assert!(fro_norm(&(&lhs - &rhs)) < 1e-15);
    }

    #[test]
    fn commutator_shape_mismatch() {
        let a = gen_a(3, 0, 1);
        let b = gen_a(4, 0, 1);
        assert!(commutator(&a, &b).is_err());
    }

    #[test]
    fn jacobi_identity_holds() {
        let b = OrderedBasis::build(BasisKind::SoPQ, Signature::new(2, 2)).unwrap();
        for x in &b.elements {
            for y in &b.elements {
                for z in &b.elements {
                    assert!(jacobi_residual(x, y, z).unwrap() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn jacobi_for_random_matrices() {
        use rand::Rng;
        let mut rng = crate::verify::seeded_rng(7);
        for _ in 0..5 {
            let m = |rng: &mut rand_chacha::ChaCha8Rng| {
                CMat::from_fn(4, 4, |_, _| c(rng.random_range(-1.0..1.0)))
            };
            let (a, b, cmat) = (m(&mut rng), m(&mut rng), m(&mut rng));
            assert!(jacobi_residual(&a, &b, &cmat).unwrap() < 1e-13);
        }
    }

    #[test]
    fn trace_pairing_values() {
        let e12 = gen_a(3, 0, 1);
        let e13 = gen_a(3, 0, 2);
        assert_eq!(trace_pairing(&e12, &e12).unwrap(), c(-2.0));
        assert_eq!(trace_pairing(&e12, &e13).unwrap(), c(0.0));
        let zero = CMat::zeros(3, 3);
        assert_eq!(trace_pairing(&zero, &e13).unwrap(), c(0.0));
    }

    #[test]
    fn trace_pairing_ad_invariance() {
        // pairing(gAg^{-1}, gBg^{-1}) = pairing(A, B) for an orthogonal g.
        let g = crate::group::standard_element(
            crate::group::StandardKind::Rotation,
            0,
            2,
            0.83,
            Signature::euclidean(3),
        )
        .unwrap();
        let gc = g.matrix_c();
        let ginv = gc.transpose();
        let a = gen_a(3, 0, 1);
        let b = gen_a(3, 1, 2);
        let lhs = trace_pairing(&(&gc * &a * &ginv), &(&gc * &b * &ginv)).unwrap();
        let rhs = trace_pairing(&a, &b).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn su_split_examples() {
        let e12 = gen_a(3, 0, 1);
        let s = su_split(&e12).unwrap();
        assert!(fro_norm(&su_join(&s)) > 0.0);
        assert_eq!(s.sym.amax(), 0.0);
        // Purely imaginary case.
        let i_ = C64::new(0.0, 1.0);
        let m = gen_s(3, 0, 1) * i_;
        let s = su_split(&m).unwrap();
        assert_eq!(s.antisym.amax(), 0.0);
        assert_eq!(s.sym[(0, 1)], 1.0);
        // Rejects a non-anti-Hermitian input.
        assert!(su_split(&gen_s(3, 0, 1)).is_err());
    }

    #[test]
    fn su_split_mixed_roundtrip_exact() {
        let i_ = C64::new(0.0, 1.0);
        let mut diag = CMat::zeros(3, 3);
        diag[(0, 0)] = i_;
        diag[(1, 1)] = -i_;
        let m = gen_a(3, 0, 1) + diag;
        let s = su_split(&m).unwrap();
        assert!(s.antisym.amax() > 0.0 && s.sym.amax() > 0.0);
        assert_eq!(su_join(&s), m);
        assert!((s.sym.trace()).abs() < 1e-15);
        assert!((&s.antisym + s.antisym.transpose()).amax() < 1e-15);
    }

    #[test]
    fn structure_constants_close_for_all_kinds() {
        let cases: Vec<OrderedBasis> = vec![
            OrderedBasis::build(BasisKind::SoN, Signature::euclidean(3)).unwrap(),
            OrderedBasis::build(BasisKind::SoN, Signature::euclidean(5)).unwrap(),
            OrderedBasis::build(BasisKind::SoPQ, Signature::new(1, 3)).unwrap(),
            OrderedBasis::build(BasisKind::SoPQ, Signature::new(2, 2)).unwrap(),
            OrderedBasis::build(BasisKind::SoPQ, Signature::new(3, 3)).unwrap(),
            OrderedBasis::build(BasisKind::SuSplit, Signature::euclidean(4)).unwrap(),
            OrderedBasis::build(BasisKind::SpinPQ, Signature::new(1, 2)).unwrap(),
            OrderedBasis::build(BasisKind::SpinPQ, Signature::euclidean(4)).unwrap(),
        ];
        for b in &cases {
            assert!(
                b.structure_closure_residual() < 1e-12,
                "bracket closure failed for {:?} {}",
                b.kind,
                b.sig
            );
        }
    }

    #[test]
    fn so4_dual_brackets_land_in_so4() {
        // The dual family is not bracket-closed on its own; together with the
        // plain family it spans so(4), where every bracket re-expands.
        let dual = OrderedBasis::build(BasisKind::So4Dual, Signature::euclidean(4)).unwrap();
        let so4 = OrderedBasis::build(BasisKind::SoN, Signature::euclidean(4)).unwrap();
        for a in &dual.elements {
            for b in &dual.elements {
                let c = commutator(a, b).unwrap();
                let (_, resid) = so4.expand_checked(&c);
                assert!(resid < 1e-13);
            }
        }
    }

    proptest! {
        #[test]
        fn su_split_roundtrip(entries in proptest::collection::vec(-5.0f64..5.0, 16)) {
            // Project an arbitrary complex matrix onto su(4), then round-trip.
            let raw = CMat::from_fn(4, 4, |i, j| C64::new(entries[4*i+j], entries[4*j+i] * 0.5));
            let anti = (&raw - raw.adjoint()) * C64::new(0.5, 0.0);
            let tr = anti.trace() / C64::new(4.0, 0.0);
            let m = anti - CMat::identity(4, 4) * tr;
            let s = su_split(&m).unwrap();
            prop_assert_eq!(su_join(&s), m);
        }

        #[test]
        fn levi_civita_antisymmetry(perm in proptest::sample::subsequence(vec![0usize,1,2,3,4], 5)) {
            let mut idx = perm.clone();
            if idx.len() >= 2 {
                let s0 = levi_civita(&idx);
                idx.swap(0, 1);
                prop_assert_eq!(levi_civita(&idx), -s0);
            }
        }
    }
}
