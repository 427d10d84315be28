//! Invariant-subspace computation: the common 1-eigenspace of the tensor
//! representation over the stabilizer of e₁, its closed-form spanning
//! vectors, and the comparison between the two.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{gen_a, gen_s, BasisKind, OrderedBasis, Signature};
use crate::error::{Error, Result};
use crate::group::{
    adjoint_op, rho_op, standard_element, GroupElement, StandardKind, TensorVector,
};
use crate::{C64, CMat, RMat, RVec};

/// Which invariant-subspace problem to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedSpaceCase {
    /// R^n ⊗ so(n) under the rotation group, stabilizer of e₁.
    SoN(usize),
    /// R^n ⊗ so(p,q) under the orthochronous group, stabilizer of e₁.
    SoPQ(Signature),
    /// R^n ⊗ (traceless symmetric) under rotations; the imaginary part of an
    /// su(n) connection transforms this way.
    SunSym(usize),
    /// so(n) under the plain adjoint action of the stabilizer (the candidate
    /// space for a time component).
    AdjointOnly(usize),
}

impl FixedSpaceCase {
    pub fn signature(&self) -> Signature {
        match self {
            FixedSpaceCase::SoN(n) | FixedSpaceCase::SunSym(n) | FixedSpaceCase::AdjointOnly(n) => {
                Signature::euclidean(*n)
            }
            FixedSpaceCase::SoPQ(sig) => *sig,
        }
    }

    pub fn name(&self) -> String {
        match self {
            FixedSpaceCase::SoN(n) => format!("so({n})"),
            FixedSpaceCase::SoPQ(s) => format!("so{s}"),
            FixedSpaceCase::SunSym(n) => format!("su({n})-sym"),
            FixedSpaceCase::AdjointOnly(n) => format!("ad-so({n})"),
        }
    }
}

/// Result of a fixed-space computation.
#[derive(Debug, Clone)]
pub struct FixedSpaceReport {
    pub case_name: String,
    pub dimension: usize,
    /// Orthonormal coordinate basis of the fixed space (columns).
    pub basis_coords: Vec<RVec>,
    /// The same vectors as component tuples (empty for the adjoint-only case).
    pub basis: Vec<TensorVector>,
    pub max_residual: f64,
    pub generators_used: Vec<String>,
    pub singular_values: Vec<f64>,
    /// Smallest kept-over-discarded singular-value ratio at the rank cut.
    pub rank_gap: f64,
    /// Set when the computed answer is known to disagree with a printed
    /// closed-form listing; carries a short description.
    pub discrepancy_note: Option<String>,
}

/// Serializable view of a report (basis as nested arrays).
#[derive(Debug, Serialize)]
pub struct FixedSpaceReportJson {
    pub case: String,
    pub dimension: usize,
    pub max_residual: f64,
    pub rank_gap: f64,
    pub generators_used: Vec<String>,
    pub singular_values: Vec<f64>,
    pub basis: Vec<Vec<Vec<Vec<f64>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy_note: Option<String>,
}

impl FixedSpaceReport {
    pub fn to_json(&self) -> FixedSpaceReportJson {
        FixedSpaceReportJson {
            case: self.case_name.clone(),
            dimension: self.dimension,
            max_residual: self.max_residual,
            rank_gap: self.rank_gap,
            generators_used: self.generators_used.clone(),
            singular_values: self.singular_values.clone(),
            basis: self
                .basis
                .iter()
                .map(|tv| {
                    tv.comps
                        .iter()
                        .map(|m| {
                            (0..m.nrows())
                                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            discrepancy_note: self.discrepancy_note.clone(),
        }
    }
}

/// Irrational-ish parameters used when sampling one-parameter subgroups; both
/// avoid the degenerate lattice where e^{2iθ} = 1.
pub const GENERATOR_PARAMS: [f64; 2] = [1.0, std::f64::consts::SQRT_2];

/// Standard generators of the stabilizer of e₁ (all index pairs within
/// 2..n, 1-based), each sampled at the two generator parameters.
pub fn stabilizer_generators(sig: Signature) -> Vec<(String, GroupElement)> {
    let n = sig.n();
    let mut out = Vec::new();
    for i in 1..n {
        for j in (i + 1)..n {
            let kind = if sig.eps(i) == sig.eps(j) {
                StandardKind::Rotation
            } else {
                StandardKind::Boost
            };
            for (pk, p) in GENERATOR_PARAMS.iter().enumerate() {
                let g = standard_element(kind, i, j, *p, sig)
                    .expect("stabilizer pair is always admissible");
                let tag = match kind {
                    StandardKind::Rotation => format!("rot[{},{}]#{}", i + 1, j + 1, pk),
                    StandardKind::Boost => format!("boost[{},{}]#{}", i + 1, j + 1, pk),
                };
                out.push((tag, g));
            }
        }
    }
    out
}

/// A random product of standard elements of the full group.
pub fn random_group_element(sig: Signature, rng: &mut ChaCha8Rng) -> GroupElement {
    random_product(sig, 0, rng)
}

/// A random product of standard elements of the stabilizer of e₁.
pub fn random_stabilizer_element(sig: Signature, rng: &mut ChaCha8Rng) -> GroupElement {
    random_product(sig, 1, rng)
}

fn random_product(sig: Signature, min_index: usize, rng: &mut ChaCha8Rng) -> GroupElement {
    let n = sig.n();
    let mut g = GroupElement::identity(sig);
    let mut factors = 0;
    while factors < 4 {
        let i = rng.random_range(min_index..n);
        let j = rng.random_range(min_index..n);
        if i >= j {
            continue;
        }
        let (kind, param) = if sig.eps(i) == sig.eps(j) {
            (
                StandardKind::Rotation,
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        } else {
            (StandardKind::Boost, rng.random_range(-0.9..0.9))
        };
        let s = standard_element(kind, i, j, param, sig).expect("admissible pair");
        g = g.compose(&s);
        factors += 1;
    }
    g
}

/// The coordinate basis underlying a fixed-space case, together with the
/// representation matrix of a group element on it.
pub struct RepSpace {
    pub case: FixedSpaceCase,
    /// Basis for the algebra (or symmetric-space) factor.
    pub factor: OrderedBasis,
    /// Whether the vector slot participates (false for AdjointOnly).
    pub has_vector_slot: bool,
}

impl RepSpace {
    pub fn build(case: FixedSpaceCase) -> Result<Self> {
        let sig = case.signature();
        let factor = match case {
            FixedSpaceCase::SoN(_) => OrderedBasis::build(BasisKind::SoN, sig)?,
            FixedSpaceCase::SoPQ(s) => {
                if s.is_euclidean() {
                    OrderedBasis::build(BasisKind::SoN, s)?
                } else {
                    OrderedBasis::build(BasisKind::SoPQ, s)?
                }
            }
            FixedSpaceCase::SunSym(n) => sym0_basis(n)?,
            FixedSpaceCase::AdjointOnly(_) => OrderedBasis::build(BasisKind::SoN, sig)?,
        };
        Ok(RepSpace {
            case,
            factor,
            has_vector_slot: !matches!(case, FixedSpaceCase::AdjointOnly(_)),
        })
    }

    pub fn dim(&self) -> usize {
        if self.has_vector_slot {
            self.case.signature().n() * self.factor.dim()
        } else {
            self.factor.dim()
        }
    }

    /// Representation matrix of g on the coordinates of this space.
    pub fn rep_matrix(&self, g: &GroupElement) -> RMat {
        match self.case {
            FixedSpaceCase::SoN(_) | FixedSpaceCase::SoPQ(_) => rho_op(g, &self.factor).matrix,
            FixedSpaceCase::SunSym(_) => {
                // Same Kronecker structure; the symmetric factor transforms by
                // congruence S ↦ g S g^T, which is conjugation on rotations.
                let twist = crate::group::vector_twist(g);
                let ad = adjoint_op(g, &self.factor);
                twist.kronecker(&ad)
            }
            FixedSpaceCase::AdjointOnly(_) => adjoint_op(g, &self.factor),
        }
    }

    pub fn coords_to_tensor(&self, v: &RVec) -> Option<TensorVector> {
        if self.has_vector_slot {
            Some(TensorVector::from_coords(v, &self.factor))
        } else {
            None
        }
    }
}

/// Basis of the traceless symmetric matrices (all entries real): off-diagonal
/// symmetric pairs then successive diagonal differences. Not bracket-closed;
/// used purely as a coordinate system.
fn sym0_basis(n: usize) -> Result<OrderedBasis> {
    OrderedBasis::build_sym0(n)
}

impl OrderedBasis {
    /// See [`sym0_basis`]; exposed on the type so the Gram machinery is reused.
    pub fn build_sym0(n: usize) -> Result<OrderedBasis> {
        use crate::algebra::BasisLabel;
        let mut parts: Vec<(BasisLabel, CMat)> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                parts.push((BasisLabel::S(i, j), gen_s(n, i, j)));
            }
        }
        for k in 0..(n - 1) {
            let mut d = CMat::zeros(n, n);
            d[(k, k)] = C64::new(1.0, 0.0);
            d[(k + 1, k + 1)] = C64::new(-1.0, 0.0);
            parts.push((BasisLabel::Diag(k), d));
        }
        OrderedBasis::from_parts_public(BasisKind::SuSplit, Signature::euclidean(n), parts)
    }
}

/// Numerically compute the common 1-eigenspace of the representation over the
/// sampled stabilizer generators, via the nullspace of the stacked blocks
/// (ρ(g_k) − Id) extracted from a singular value decomposition.
///
/// The dimension is the number of singular values below `tol · σ_max`; a rank
/// cut with gap ratio below 10³ is refused rather than guessed.
pub fn fixed_space(case: FixedSpaceCase, tol: f64) -> Result<FixedSpaceReport> {
    let space = RepSpace::build(case)?;
    let gens = stabilizer_generators(case.signature());
    fixed_space_with(&space, &gens, tol)
}

/// Same as [`fixed_space`] with an explicit generator family.
pub fn fixed_space_with(
    space: &RepSpace,
    gens: &[(String, GroupElement)],
    tol: f64,
) -> Result<FixedSpaceReport> {
    let d = space.dim();
    let case = space.case;
    let mut names = Vec::new();

    let blocks: Vec<RMat> = gens
        .iter()
        .map(|(name, g)| {
            names.push(name.clone());
            space.rep_matrix(g) - RMat::identity(d, d)
        })
        .collect();

    let (dimension, coords, singular_values, rank_gap) = if blocks.is_empty() {
        // Trivial stabilizer: everything is fixed.
        let coords: Vec<RVec> = (0..d)
            .map(|k| RVec::from_fn(d, |i, _| if i == k { 1.0 } else { 0.0 }))
            .collect();
        (d, coords, vec![0.0; d], f64::INFINITY)
    } else {
        let mut stacked = RMat::zeros(blocks.len() * d, d);
        for (k, b) in blocks.iter().enumerate() {
            stacked.view_mut((k * d, 0), (d, d)).copy_from(b);
        }
        let svd = stacked.svd(false, true);
        let vt = svd
            .v_t
            .ok_or_else(|| Error::Numerical("SVD failed to produce right vectors".into()))?;
        let mut sv: Vec<(f64, usize)> = svd
            .singular_values
            .iter()
            .copied()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        sv.sort_by(|a, b| b.0.total_cmp(&a.0));
        let sigma_max = sv[0].0;
        let values: Vec<f64> = sv.iter().map(|(s, _)| *s).collect();
        if sigma_max == 0.0 {
            let coords: Vec<RVec> = (0..d)
                .map(|k| RVec::from_fn(d, |i, _| if i == k { 1.0 } else { 0.0 }))
                .collect();
            (d, coords, values, f64::INFINITY)
        } else {
            let thresh = tol * sigma_max;
            let dim = values.iter().filter(|s| **s < thresh).count();
            let gap = if dim == 0 || dim == d {
                f64::INFINITY
            } else {
                let last_kept_out = values[d - dim - 1];
                let first_null = values[d - dim].max(f64::MIN_POSITIVE);
                last_kept_out / first_null
            };
            if dim > 0 && dim < d && gap < 1e3 {
                return Err(Error::AmbiguousRankGap {
                    gap,
                    required: 1e3,
                    values,
                });
            }
            let coords: Vec<RVec> = sv[(d - dim)..]
                .iter()
                .map(|(_, idx)| RVec::from(vt.row(*idx).transpose()))
                .collect();
            (dim, coords, values, gap)
        }
    };

    // Residual of each basis vector under each sampled generator.
    let mut max_residual = 0.0_f64;
    for b in &blocks {
        for v in &coords {
            max_residual = max_residual.max((b * v).norm());
        }
    }

    let basis = coords
        .iter()
        .filter_map(|v| space.coords_to_tensor(v))
        .collect();

    let discrepancy_note = match case {
        FixedSpaceCase::SoPQ(s) if (s.p, s.q) == (1, 1) => Some(
            "computed dimension 2 (= the whole ambient 2·dim so(1,1) space under the \
             trivial stabilizer); printed closed-form text lists a 1-dimensional space"
                .to_string(),
        ),
        _ => None,
    };

    Ok(FixedSpaceReport {
        case_name: case.name(),
        dimension,
        basis_coords: coords,
        basis,
        max_residual,
        generators_used: names,
        singular_values,
        rank_gap,
        discrepancy_note,
    })
}

/// Expected fixed-space dimensions for the enumerated cases.
pub fn expected_dimension(case: FixedSpaceCase) -> Result<usize> {
    match case {
        FixedSpaceCase::SoN(n) => match n {
            0..=2 => Err(Error::UnsupportedCase(format!(
                "rotation case requires n >= 3, got {n}"
            ))),
            3 => Ok(3),
            4 => Ok(2),
            _ => Ok(1),
        },
        FixedSpaceCase::SoPQ(sig) => {
            let (p, q) = (sig.p, sig.q);
            if p == 0 || q == 0 {
                return expected_dimension(FixedSpaceCase::SoN(sig.n()));
            }
            if p + q < 2 {
                return Err(Error::UnsupportedCase("p+q >= 2 required".into()));
            }
            Ok(match (p, q) {
                (1, 1) => 2,
                (1, 2) => 3,
                (1, 3) => 2,
                (2, 2) => 2,
                _ => 1,
            })
        }
        FixedSpaceCase::SunSym(n) => {
            if n < 4 {
                Err(Error::UnsupportedCase(
                    "symmetric-part classification implemented for n >= 4".into(),
                ))
            } else {
                Ok(2)
            }
        }
        FixedSpaceCase::AdjointOnly(n) => match n {
            0..=2 => Err(Error::UnsupportedCase("n >= 3 required".into())),
            3 => Ok(1),
            _ => Ok(0),
        },
    }
}

// ---------------------------------------------------------------------------
// Closed-form spanning vectors
// ---------------------------------------------------------------------------

/// e^A_{i,j} for arbitrary index order (antisymmetric in the labels).
fn ea(n: usize, i: usize, j: usize) -> CMat {
    if i < j {
        gen_a(n, i, j)
    } else {
        -gen_a(n, j, i)
    }
}

/// e^S_{i,j} for arbitrary index order.
fn es(n: usize, i: usize, j: usize) -> CMat {
    if i <= j {
        gen_s(n, i, j)
    } else {
        gen_s(n, j, i)
    }
}

/// The closed-form spanning vectors of the fixed space for the enumerated
/// cases, as component tuples. Indices in comments are 1-based.
///
/// Two printed sign patterns ((1,2) and (1,3) first vectors) disagree with the
/// numerically computed space; the forms constructed here are the ones whose
/// span matches the computed fixed space, which also agree with the general
/// p+q ≥ 5 formula specialized down.
pub fn closed_form_basis(case: FixedSpaceCase) -> Result<Vec<TensorVector>> {
    let sig = case.signature();
    let n = sig.n();
    let mut out: Vec<TensorVector> = Vec::new();
    let mut push = |comps: Vec<(usize, CMat)>| {
        let mut tv = TensorVector::zeros(sig);
        for (mu, m) in comps {
            tv.comps[mu] += m;
        }
        out.push(tv);
    };
    match case {
        FixedSpaceCase::SoN(nn) => {
            if nn < 3 {
                return Err(Error::UnsupportedCase(format!(
                    "rotation case requires n >= 3, got {nn}"
                )));
            }
            // Σ_k e_k ⊗ e^A_{k,1}
            push((1..n).map(|k| (k, ea(n, k, 0))).collect());
            if nn == 3 {
                // e_2 ⊗ e^A_{3,1} − e_3 ⊗ e^A_{2,1}
                push(vec![(1, ea(n, 2, 0)), (2, -ea(n, 1, 0))]);
                // e_1 ⊗ e^A_{2,3}
                push(vec![(0, ea(n, 1, 2))]);
            } else if nn == 4 {
                // e_2 ⊗ e^A_{3,4} − e_3 ⊗ e^A_{2,4} + e_4 ⊗ e^A_{2,3}
                push(vec![(1, ea(n, 2, 3)), (2, -ea(n, 1, 3)), (3, ea(n, 1, 2))]);
            }
        }
        FixedSpaceCase::SoPQ(s) => {
            if s.is_euclidean() {
                return closed_form_basis(FixedSpaceCase::SoN(n));
            }
            let (p, q) = (s.p, s.q);
            match (p, q) {
                (1, 1) => {
                    // Trivial stabilizer: the whole ambient space R² ⊗ so(1,1).
                    push(vec![(0, es(n, 0, 1))]);
                    push(vec![(1, es(n, 0, 1))]);
                }
                (1, 2) => {
                    // e_2 ⊗ e^S_{2,1} + e_3 ⊗ e^S_{3,1} (sign arbitrated numerically)
                    push(vec![(1, es(n, 1, 0)), (2, es(n, 2, 0))]);
                    // e_2 ⊗ e^S_{3,1} − e_3 ⊗ e^S_{2,1}
                    push(vec![(1, es(n, 2, 0)), (2, -es(n, 1, 0))]);
                    // e_1 ⊗ e^A_{2,3}
                    push(vec![(0, ea(n, 1, 2))]);
                }
                (1, 3) => {
                    // Σ_{j=2..4} e_j ⊗ e^S_{j,1} (uniform sign, arbitrated numerically)
                    push((1..4).map(|k| (k, es(n, k, 0))).collect());
                    // e_2 ⊗ e^A_{3,4} − e_3 ⊗ e^A_{2,4} + e_4 ⊗ e^A_{2,3}
                    push(vec![(1, ea(n, 2, 3)), (2, -ea(n, 1, 3)), (3, ea(n, 1, 2))]);
                }
                (2, 2) => {
                    // e_3 ⊗ e^S_{3,1} + e_4 ⊗ e^S_{4,1} − e_2 ⊗ e^A_{2,1}
                    push(vec![(2, es(n, 2, 0)), (3, es(n, 3, 0)), (1, -ea(n, 1, 0))]);
                    // −e_4 ⊗ e^S_{3,2} + e_2 ⊗ e^A_{3,4} + e_3 ⊗ e^S_{4,2}
                    push(vec![(3, -es(n, 2, 1)), (1, ea(n, 2, 3)), (2, es(n, 3, 1))]);
                }
                _ => {
                    // Σ_{i=2..p} e_i ⊗ e^A_{i,1} − Σ_{j=p+1..n} e_j ⊗ e^S_{j,1}
                    let mut comps: Vec<(usize, CMat)> =
                        (1..p).map(|i| (i, ea(n, i, 0))).collect();
                    comps.extend((p..n).map(|j| (j, -es(n, j, 0))));
                    push(comps);
                }
            }
        }
        FixedSpaceCase::SunSym(nn) => {
            if nn < 4 {
                return Err(Error::UnsupportedCase(
                    "symmetric-part closed form implemented for n >= 4".into(),
                ));
            }
            // e_1 ⊗ (E_{11} − Id/n)
            let mut m1 = CMat::zeros(n, n);
            m1[(0, 0)] = C64::new(1.0, 0.0);
            m1 -= CMat::identity(n, n) * C64::new(1.0 / n as f64, 0.0);
            push(vec![(0, m1)]);
            // Σ_i e_i ⊗ e^S_{i,1} − (2/n) e_1 ⊗ Id
            let mut comps: Vec<(usize, CMat)> = (1..n).map(|k| (k, es(n, k, 0))).collect();
            let mut head = es(n, 0, 0); // 2 E_{11}
            head -= CMat::identity(n, n) * C64::new(2.0 / n as f64, 0.0);
            comps.push((0, head));
            push(comps);
        }
        FixedSpaceCase::AdjointOnly(_) => {
            return Err(Error::UnsupportedCase(
                "the adjoint-only fixed space has no nonzero closed form for n >= 4".into(),
            ))
        }
    }
    Ok(out)
}

/// Largest sine of a principal angle between the computed fixed space and the
/// span of the closed-form vectors, in the coordinates of `space`.
/// Errors if the dimensions differ.
pub fn principal_angle_sin(space: &RepSpace, report: &FixedSpaceReport) -> Result<f64> {
    let closed = closed_form_basis(space.case)?;
    if closed.len() != report.dimension {
        return Err(Error::Numerical(format!(
            "dimension mismatch: closed form {} vs computed {}",
            closed.len(),
            report.dimension
        )));
    }
    let d = space.dim();
    let k = closed.len();
    // Orthonormalize the closed-form coordinates.
    let mut m = RMat::zeros(d, k);
    for (c, tv) in closed.iter().enumerate() {
        m.set_column(c, &tv.to_coords(&space.factor));
    }
    let qr = m.qr();
    let q_closed = qr.q();
    // sin(θ_max) = ‖(I − Q_num Q_numᵀ) Q_closed‖₂.
    let mut proj = q_closed.clone();
    for v in &report.basis_coords {
        let overlap = v.transpose() * &q_closed;
        proj -= v * overlap;
    }
    let svd = proj.svd(false, false);
    Ok(svd
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, s| acc.max(*s)))
}

/// Residual ‖(ρ(g) − Id)v‖ maximized over `count` random stabilizer elements
/// and all closed-form vectors; exercises arbitrary elements rather than the
/// one-parameter generators.
pub fn random_stabilizer_residual(
    space: &RepSpace,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let closed = closed_form_basis(space.case)?;
    let sig = space.case.signature();
    let mut worst = 0.0_f64;
    for _ in 0..count {
        let g = random_stabilizer_element(sig, rng);
        let rep = space.rep_matrix(&g);
        for tv in &closed {
            let v = tv.to_coords(&space.factor);
            let dv = &rep * &v - &v;
            worst = worst.max(dv.norm() / v.norm().max(1e-300));
        }
    }
    Ok(worst)
}
