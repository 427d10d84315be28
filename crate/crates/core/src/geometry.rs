//! Curvature of the closed-form connections (analytic and finite-difference),
//! the Hodge operator on diagonal metrics, and the Yang-Mills residual
//! obtained by the divergence-form rewriting Σ_β g^{ββ}([B_β,F_{αβ}] +
//! ∂_β F_{αβ} + F_{αβ} ∂_β log(√|g| g^{ββ} g^{αα})).

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::algebra::{gen_a, gen_f, levi_civita, Signature};
use crate::ansatz::{
    quad_form, sun_f_field, sun_g1_field, sun_g2_field, x_field, y_field, GaugeAnsatz,
};
use crate::error::{Error, Result};
use crate::profile::RadialRef;
use crate::{C64, CMat, RVec};

/// Diagonal metric: constant signature block or a static isotropic Lorentzian
/// metric diag(e^{f_t(r)}, −e^{f_r(r)} I_n) with coordinates (t, x¹..xⁿ).
#[derive(Clone)]
pub enum MetricSpec {
    ConstantDiagonal(Signature),
    Isotropic {
        n: usize,
        f_t: RadialRef,
        f_r: RadialRef,
    },
}

impl MetricSpec {
    pub fn flat_isotropic(n: usize) -> Self {
        MetricSpec::Isotropic {
            n,
            f_t: crate::profile::zero(),
            f_r: crate::profile::zero(),
        }
    }

    /// Number of coordinates (n, or n+1 with the leading time slot).
    pub fn coord_dim(&self) -> usize {
        match self {
            MetricSpec::ConstantDiagonal(sig) => sig.n(),
            MetricSpec::Isotropic { n, .. } => n + 1,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, MetricSpec::ConstantDiagonal(_))
    }

    fn radius(&self, point: &RVec) -> f64 {
        match self {
            MetricSpec::ConstantDiagonal(_) => point.norm(),
            MetricSpec::Isotropic { .. } => point.rows(1, point.len() - 1).norm(),
        }
    }

    /// Diagonal metric values g_{μμ} at the point.
    pub fn g_diag(&self, point: &RVec) -> RVec {
        match self {
            MetricSpec::ConstantDiagonal(sig) => RVec::from_fn(sig.n(), |i, _| sig.eps(i)),
            MetricSpec::Isotropic { n, f_t, f_r } => {
                let r = self.radius(point);
                RVec::from_fn(n + 1, |i, _| {
                    if i == 0 {
                        f_t.v(r).exp()
                    } else {
                        -f_r.v(r).exp()
                    }
                })
            }
        }
    }

    /// Inverse diagonal values g^{μμ}.
    pub fn g_inv_diag(&self, point: &RVec) -> RVec {
        let mut d = self.g_diag(point);
        for v in d.iter_mut() {
            *v = 1.0 / *v;
        }
        d
    }

    /// √|det g| at the point.
    pub fn sqrt_abs_det(&self, point: &RVec) -> f64 {
        self.g_diag(point)
            .iter()
            .map(|v| v.abs())
            .product::<f64>()
            .sqrt()
    }

    pub fn det_sign(&self, point: &RVec) -> f64 {
        self.g_diag(point)
            .iter()
            .map(|v| v.signum())
            .product::<f64>()
    }

    /// ∂_β log(√|g| g^{ββ} g^{αα}), supplied analytically from the profile
    /// derivatives (zero for constant metrics and for β = 0).
    pub fn log_deriv(&self, point: &RVec, alpha: usize, beta: usize) -> f64 {
        match self {
            MetricSpec::ConstantDiagonal(_) => 0.0,
            MetricSpec::Isotropic { n, f_t, f_r } => {
                if beta == 0 {
                    return 0.0;
                }
                let r = self.radius(point);
                let ftp = f_t.d1(r);
                let frp = f_r.d1(r);
                // log(√|g| g^{ββ} g^{αα}) = (f_t + n f_r)/2 − f_(β) − f_(α)
                let mut d = (ftp + *n as f64 * frp) / 2.0;
                d -= frp; // β ≥ 1 always spatial here
                d -= if alpha == 0 { ftp } else { frp };
                d * point[beta] / r
            }
        }
    }

    /// The definiteness check used before Hodge applications.
    pub fn check_nondegenerate(&self, point: &RVec) -> Result<()> {
        let d = self.g_diag(point);
        if d.iter().any(|v| !v.is_finite() || v.abs() < 1e-14) {
            return Err(Error::Domain(
                "metric degenerate or non-finite at the evaluation point".into(),
            ));
        }
        Ok(())
    }
}

/// Antisymmetric family of algebra matrices F_{αβ} at a point, stored on
/// lexicographic pairs α < β.
#[derive(Debug, Clone)]
pub struct CurvatureField {
    pub m: usize,
    comps: Vec<CMat>,
}

impl CurvatureField {
    pub fn zeros(m: usize, n: usize) -> Self {
        CurvatureField {
            m,
            comps: vec![CMat::zeros(n, n); m * (m - 1) / 2],
        }
    }

    pub fn pair_index(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < b && b < self.m);
        a * self.m - a * (a + 1) / 2 + (b - a - 1)
    }

    pub fn set(&mut self, a: usize, b: usize, m: CMat) {
        let idx = self.pair_index(a, b);
        self.comps[idx] = m;
    }

    /// F_{αβ} with the antisymmetry applied for α > β.
    pub fn get(&self, a: usize, b: usize) -> CMat {
        if a == b {
            let n = self.comps[0].nrows();
            return CMat::zeros(n, n);
        }
        if a < b {
            self.comps[self.pair_index(a, b)].clone()
        } else {
            -self.comps[self.pair_index(b, a)].clone()
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.comps.iter().map(crate::fro_norm).fold(0.0, f64::max)
    }
}

/// Point-indexed gauge field: returns the component tuple at a coordinate
/// point (with the time slot first when the ansatz carries one).
pub fn ansatz_components(a: &GaugeAnsatz, point: &RVec) -> Result<Vec<CMat>> {
    if a.has_time_slot() {
        let x = RVec::from(point.rows(1, point.len() - 1).clone_owned());
        Ok(a.eval(point[0], &x)?.comps)
    } else {
        Ok(a.eval(0.0, point)?.comps)
    }
}

/// Central-difference curvature: ∂_α B_β − ∂_β B_α + [B_α, B_β] with plain
/// two-point stencils of width `step`.
pub fn curvature_fd<F>(field: &F, point: &RVec, step: f64) -> Result<CurvatureField>
where
    F: Fn(&RVec) -> Result<Vec<CMat>>,
{
    let m = point.len();
    let b = field(point)?;
    let n = b[0].nrows();
    if b.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "field returned {} components at a {m}-coordinate point",
            b.len()
        )));
    }
    // partials[α][β] = ∂_α B_β
    let mut partials: Vec<Vec<CMat>> = Vec::with_capacity(m);
    for alpha in 0..m {
        let mut p_plus = point.clone();
        p_plus[alpha] += step;
        let mut p_minus = point.clone();
        p_minus[alpha] -= step;
        let bp = field(&p_plus)?;
        let bm = field(&p_minus)?;
        partials.push(
            (0..m)
                .map(|beta| (&bp[beta] - &bm[beta]) * C64::new(0.5 / step, 0.0))
                .collect(),
        );
    }
    let mut f = CurvatureField::zeros(m, n);
    for a in 0..m {
        for bb in (a + 1)..m {
            let comm = &b[a] * &b[bb] - &b[bb] * &b[a];
            f.set(a, bb, &partials[a][bb] - &partials[bb][a] + comm);
        }
    }
    Ok(f)
}

/// Curvature of the rotation/boost family B = g·X: coefficients
/// (g'/r + g²) on the x-weighted fields and g(2 − r²g) on the constant
/// generator.
fn son_like_curvature(sig: Signature, x: &RVec, g: f64, g1: f64) -> CurvatureField {
    let n = sig.n();
    let r2 = quad_form(sig, x);
    let r = r2.abs().sqrt();
    let c1 = g1 / r + g * g;
    let c2 = g * (2.0 - r2 * g);
    let xs: Vec<CMat> = (0..n).map(|mu| x_field(sig, x, mu)).collect();
    let mut f = CurvatureField::zeros(n, n);
    for a in 0..n {
        for b in (a + 1)..n {
            let term = (&xs[b] * C64::new(c1 * sig.eps(a) * x[a], 0.0)
                - &xs[a] * C64::new(c1 * sig.eps(b) * x[b], 0.0))
                + gen_f(sig, a, b) * C64::new(c2, 0.0);
            f.set(a, b, term);
        }
    }
    f
}

/// Curvature of the dimension-4 family B = g·X + f·Y; `s4` = +1 when the
/// number of minus signs is even, −1 otherwise.
fn dim4_curvature(sig: Signature, x: &RVec, fv: f64, f1: f64, gv: f64, g1: f64) -> CurvatureField {
    let n = 4;
    let r2 = quad_form(sig, x);
    let r = r2.abs().sqrt();
    let s4 = if sig.q % 2 == 0 { 1.0 } else { -1.0 };
    let combo = gv * gv + s4 * fv * fv;
    let c1 = g1 / r + combo;
    let c2 = 2.0 * gv - r2 * combo;
    let c3 = f1 / r;
    let xs: Vec<CMat> = (0..n).map(|mu| x_field(sig, x, mu)).collect();
    let ys: Vec<CMat> = (0..n).map(|mu| y_field(sig, x, mu)).collect();
    let mut f = CurvatureField::zeros(n, 4);
    for a in 0..n {
        for b in (a + 1)..n {
            let mut term = &xs[b] * C64::new(c1 * sig.eps(a) * x[a], 0.0)
                - &xs[a] * C64::new(c1 * sig.eps(b) * x[b], 0.0);
            term += gen_f(sig, a, b) * C64::new(c2, 0.0);
            term += &ys[b] * C64::new(c3 * sig.eps(a) * x[a], 0.0)
                - &ys[a] * C64::new(c3 * sig.eps(b) * x[b], 0.0);
            term += crate::algebra::gen_dual_f(sig, a, b) * C64::new(2.0 * fv, 0.0);
            let xy = &xs[a] * &ys[b] - &ys[b] * &xs[a];
            term += xy * C64::new(2.0 * fv * gv, 0.0);
            f.set(a, b, term);
        }
    }
    f
}

/// Analytic curvature of the supported closed-form families at a coordinate
/// point (time slot first for the spacetime families).
pub fn curvature_closed(a: &GaugeAnsatz, point: &RVec) -> Result<CurvatureField> {
    match a {
        GaugeAnsatz::SoN { g, .. } => {
            let r = point.norm();
            Ok(son_like_curvature(a.sig(), point, g.v(r), g.d1(r)))
        }
        GaugeAnsatz::SoPqN { sig, g } => {
            let r = sig.pseudo_norm(point)?;
            Ok(son_like_curvature(*sig, point, g.v(r), g.d1(r)))
        }
        GaugeAnsatz::So4 { f, g } => {
            let r = point.norm();
            Ok(dim4_curvature(
                a.sig(),
                point,
                f.v(r),
                f.d1(r),
                g.v(r),
                g.d1(r),
            ))
        }
        GaugeAnsatz::SoPq4 { sig, f, g } => {
            let r = sig.pseudo_norm(point)?;
            Ok(dim4_curvature(
                *sig,
                point,
                f.v(r),
                f.d1(r),
                g.v(r),
                g.d1(r),
            ))
        }
        GaugeAnsatz::IsoSoN { n, g } => {
            let t = point[0];
            let x = RVec::from(point.rows(1, *n).clone_owned());
            let r = x.norm();
            let sig = Signature::euclidean(*n);
            let spatial = son_like_curvature(sig, &x, g.v(t, r), g.dr(t, r));
            let gt = g.dt(t, r);
            let m = n + 1;
            let mut f = CurvatureField::zeros(m, *n);
            for j in 0..*n {
                f.set(0, j + 1, x_field(sig, &x, j) * C64::new(gt, 0.0));
            }
            for i in 0..*n {
                for j in (i + 1)..*n {
                    f.set(i + 1, j + 1, spatial.get(i, j));
                }
            }
            Ok(f)
        }
        GaugeAnsatz::SuNDim { n, h1, h2, h3 } => {
            let t = point[0];
            let x = RVec::from(point.rows(1, *n).clone_owned());
            let r = x.norm();
            let r2 = r * r;
            let (h1v, h2v, h3v) = (h1.v(t, r), h2.v(t, r), h3.v(t, r));
            let (h1r, h2r) = (h1.dr(t, r), h2.dr(t, r));
            let (h1t, h2t, h3t) = (h1.dt(t, r), h2.dt(t, r), h3.dt(t, r));
            let m = n + 1;
            let mut f = CurvatureField::zeros(m, *n);
            let g1m = sun_g1_field(*n, &x);
            for i in 0..*n {
                // Time-space components: time derivatives hit the profiles.
                let fi = sun_f_field(*n, &x, i);
                let g2i = sun_g2_field(*n, &x, i);
                let t_comp = &fi * C64::new(h1t, 0.0)
                    + &g1m * C64::new((h3t - 2.0 * h2t) * x[i], 0.0)
                    + &g2i * C64::new(h2t, 0.0);
                f.set(0, i + 1, t_comp);
            }
            let c_f = (r * h1r + h1v * h1v + h2v * h2v - 1.0 - h2v * h3v) / r2;
            let c_a = (1.0 - h1v * h1v - h2v * h2v) / r2;
            let c_g = (r * h2r + h1v * h3v) / r2;
            for i in 0..*n {
                for j in (i + 1)..*n {
                    let fi = sun_f_field(*n, &x, i);
                    let fj = sun_f_field(*n, &x, j);
                    let g2i = sun_g2_field(*n, &x, i);
                    let g2j = sun_g2_field(*n, &x, j);
                    let term = (fj * C64::new(c_f * x[i], 0.0) - fi * C64::new(c_f * x[j], 0.0))
                        + gen_a(*n, i, j) * C64::new(c_a, 0.0)
                        + (g2j * C64::new(c_g * x[i], 0.0) - g2i * C64::new(c_g * x[j], 0.0));
                    f.set(i + 1, j + 1, term);
                }
            }
            Ok(f)
        }
        _ => Err(Error::UnsupportedCase(format!(
            "no closed-form curvature for case `{}`",
            a.case_name()
        ))),
    }
}

/// Fourth-order Richardson derivative of a curvature-field closure along one
/// coordinate.
fn curvature_deriv<F>(curv: &F, point: &RVec, coord: usize, h: f64) -> Result<CurvatureField>
where
    F: Fn(&RVec) -> Result<CurvatureField>,
{
    let eval_at = |offset: f64| -> Result<CurvatureField> {
        let mut p = point.clone();
        p[coord] += offset;
        curv(&p)
    };
    let f_ph = eval_at(h)?;
    let f_mh = eval_at(-h)?;
    let f_ph2 = eval_at(h / 2.0)?;
    let f_mh2 = eval_at(-h / 2.0)?;
    let m = f_ph.m;
    let n = f_ph.comps[0].nrows();
    let mut out = CurvatureField::zeros(m, n);
    for a in 0..m {
        for b in (a + 1)..m {
            let d_h = (f_ph.get(a, b) - f_mh.get(a, b)) * C64::new(0.5 / h, 0.0);
            let d_h2 = (f_ph2.get(a, b) - f_mh2.get(a, b)) * C64::new(1.0 / h, 0.0);
            out.set(a, b, (d_h2 * C64::new(4.0, 0.0) - d_h) * C64::new(1.0 / 3.0, 0.0));
        }
    }
    Ok(out)
}

/// How the curvature entering the Yang-Mills residual is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum CurvatureMode {
    /// Analytic closed form (preferred).
    Closed,
    /// Finite-difference fallback with the given base step.
    Fd { step: f64 },
}

/// The α-indexed Yang-Mills residual
/// Σ_β g^{ββ} ([B_β, F_{αβ}] + ∂_β F_{αβ} + F_{αβ} ∂_β log(√|g| g^{ββ} g^{αα})),
/// zero exactly on critical connections. Derivatives of F are Richardson
/// extrapolated central differences of the chosen curvature path.
pub fn ym_residual(
    a: &GaugeAnsatz,
    metric: &MetricSpec,
    point: &RVec,
    mode: CurvatureMode,
) -> Result<Vec<CMat>> {
    let m = metric.coord_dim();
    if point.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "point has {} coordinates, metric expects {m}",
            point.len()
        )));
    }
    if a.has_time_slot() != !metric.is_constant() {
        return Err(Error::UnsupportedCase(
            "ansatz and metric disagree about a time coordinate".into(),
        ));
    }
    metric.check_nondegenerate(point)?;
    let curv: Box<dyn Fn(&RVec) -> Result<CurvatureField>> = match mode {
        CurvatureMode::Closed => Box::new(move |p: &RVec| curvature_closed(a, p)),
        CurvatureMode::Fd { step } => {
            Box::new(move |p: &RVec| curvature_fd(&|q: &RVec| ansatz_components(a, q), p, step))
        }
    };
    let b = ansatz_components(a, point)?;
    let n = b[0].nrows();
    let f0 = curv(point)?;
    let ginv = metric.g_inv_diag(point);
    // ∂_β F over all β once; reused for every α.
    let h = 1e-3;
    let mut df: Vec<CurvatureField> = Vec::with_capacity(m);
    for beta in 0..m {
        df.push(curvature_deriv(&curv, point, beta, h)?);
    }
    let mut out = Vec::with_capacity(m);
    for alpha in 0..m {
        let mut acc = CMat::zeros(n, n);
        for beta in 0..m {
            if beta == alpha {
                continue;
            }
            let f_ab = f0.get(alpha, beta);
            let bracket = &b[beta] * &f_ab - &f_ab * &b[beta];
            let deriv = df[beta].get(alpha, beta);
            let logd = metric.log_deriv(point, alpha, beta);
            acc += (bracket + deriv + f_ab * C64::new(logd, 0.0)) * C64::new(ginv[beta], 0.0);
        }
        out.push(acc);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Hodge operator
// ---------------------------------------------------------------------------

/// Matrix-valued k-form components on strictly increasing index tuples.
#[derive(Debug, Clone)]
pub struct Form {
    pub k: usize,
    pub m: usize,
    pub comps: BTreeMap<Vec<usize>, CMat>,
}

impl Form {
    pub fn zero(k: usize, m: usize) -> Self {
        Form {
            k,
            m,
            comps: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, idx: Vec<usize>, val: CMat) {
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]) && idx.len() == self.k);
        self.comps
            .entry(idx)
            .and_modify(|m| *m += &val)
            .or_insert(val);
    }

    pub fn get(&self, idx: &[usize]) -> Option<&CMat> {
        self.comps.get(idx)
    }
}

/// One output term of the diagonal-metric Hodge map on a basis k-form.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeTerm {
    pub input: Vec<usize>,
    pub output: Vec<usize>,
    pub factor: f64,
}

/// Hodge table for increasing k-tuples under a diagonal metric: the ε-sum
/// with g^{ν,μ} diagonal collapses to
/// *(dx^I) = √|g| (Π_{a∈I} g^{aa⁻¹}) ε(I, I^c) dx^{I^c}.
pub fn hodge_table(k: usize, metric: &MetricSpec, point: &RVec) -> Result<Vec<HodgeTerm>> {
    let m = metric.coord_dim();
    if k > m {
        return Err(Error::Domain(format!("form degree {k} exceeds {m}")));
    }
    metric.check_nondegenerate(point)?;
    let ginv = metric.g_inv_diag(point);
    let vol = metric.sqrt_abs_det(point);
    let mut out = Vec::new();
    for input in (0..m).combinations(k) {
        let complement: Vec<usize> = (0..m).filter(|i| !input.contains(i)).collect();
        let mut perm: Vec<usize> = input.clone();
        perm.extend(&complement);
        let sign = levi_civita(&perm) as f64;
        let factor = vol * input.iter().map(|&i| ginv[i]).product::<f64>() * sign;
        out.push(HodgeTerm {
            input,
            output: complement,
            factor,
        });
    }
    Ok(out)
}

/// Literal permutation-sum evaluation of the Hodge map on one basis k-form;
/// used as the independent oracle for [`hodge_table`].
pub fn hodge_star_literal(
    input: &[usize],
    metric: &MetricSpec,
    point: &RVec,
) -> Result<BTreeMap<Vec<usize>, f64>> {
    let m = metric.coord_dim();
    let k = input.len();
    metric.check_nondegenerate(point)?;
    let ginv = metric.g_inv_diag(point);
    let vol = metric.sqrt_abs_det(point);
    let mut acc: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut fact = 1.0;
    for i in 1..=(m - k) {
        fact *= i as f64;
    }
    for nu in (0..m).permutations(m) {
        let sign = levi_civita(&nu) as f64;
        if sign == 0.0 {
            continue;
        }
        // Π_a g^{ν_a, μ_a} with a diagonal inverse metric.
        let mut coeff = vol * sign / fact;
        let mut ok = true;
        for a in 0..k {
            if nu[a] == input[a] {
                coeff *= ginv[input[a]];
            } else {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        // Reorder the tail to an increasing tuple, tracking the sign.
        let tail: Vec<usize> = nu[k..].to_vec();
        let mut sorted = tail.clone();
        sorted.sort_unstable();
        let mut tail_sign = 1.0;
        // Parity of the permutation taking `tail` to `sorted`.
        let mut t = tail.clone();
        for i in 0..t.len() {
            if t[i] != sorted[i] {
                let j = t.iter().position(|&v| v == sorted[i]).unwrap();
                t.swap(i, j);
                tail_sign = -tail_sign;
            }
        }
        *acc.entry(sorted).or_insert(0.0) += coeff * tail_sign;
    }
    acc.retain(|_, v| v.abs() > 1e-300);
    Ok(acc)
}

/// Apply the Hodge map to a matrix-valued k-form.
pub fn hodge_star(form: &Form, metric: &MetricSpec, point: &RVec) -> Result<Form> {
    let table = hodge_table(form.k, metric, point)?;
    let mut out = Form::zero(form.m - form.k, form.m);
    for term in &table {
        if let Some(c) = form.get(&term.input) {
            out.add(term.output.clone(), c * C64::new(term.factor, 0.0));
        }
    }
    Ok(out)
}

/// Sign of the double application *∘* on k-forms for a constant diagonal
/// metric, measured on basis forms (expected (−1)^{k(m−k)} sign(det g)).
pub fn hodge_double_sign(k: usize, metric: &MetricSpec, point: &RVec) -> Result<f64> {
    let m = metric.coord_dim();
    let mut sign: Option<f64> = None;
    for input in (0..m).combinations(k) {
        let mut f = Form::zero(k, m);
        f.add(input.clone(), CMat::identity(1, 1));
        let ff = hodge_star(&hodge_star(&f, metric, point)?, metric, point)?;
        let got = ff
            .get(&input)
            .map(|c| c[(0, 0)].re)
            .unwrap_or(0.0);
        match sign {
            None => sign = Some(got),
            Some(s) => {
                if (s - got).abs() > 1e-12 {
                    return Err(Error::Numerical(
                        "double Hodge application is not a uniform sign".into(),
                    ));
                }
            }
        }
    }
    Ok(sign.unwrap_or(1.0))
}

/// Covariant exterior derivative of a matrix-valued k-form closure:
/// (d_B ω)_{K} = Σ_a (−1)^a (∂_{K_a} ω_{K∖K_a} + [B_{K_a}, ω_{K∖K_a}]);
/// derivatives by Richardson central differences of the closure.
pub fn d_b_form<F>(form_fn: &F, b: &[CMat], point: &RVec, h: f64) -> Result<Form>
where
    F: Fn(&RVec) -> Result<Form>,
{
    let base = form_fn(point)?;
    let (k, m) = (base.k, base.m);
    let n = b[0].nrows();
    // Partial derivatives of every component along every coordinate.
    let mut partials: Vec<Form> = Vec::with_capacity(m);
    for coord in 0..m {
        let eval_at = |off: f64| -> Result<Form> {
            let mut p = point.clone();
            p[coord] += off;
            form_fn(&p)
        };
        let f_ph = eval_at(h)?;
        let f_mh = eval_at(-h)?;
        let f_ph2 = eval_at(h / 2.0)?;
        let f_mh2 = eval_at(-h / 2.0)?;
        let mut d = Form::zero(k, m);
        for idx in base.comps.keys() {
            let zero = CMat::zeros(n, n);
            let at = |f: &Form| f.get(idx).unwrap_or(&zero).clone();
            let d_h = (at(&f_ph) - at(&f_mh)) * C64::new(0.5 / h, 0.0);
            let d_h2 = (at(&f_ph2) - at(&f_mh2)) * C64::new(1.0 / h, 0.0);
            d.add(
                idx.clone(),
                (d_h2 * C64::new(4.0, 0.0) - d_h) * C64::new(1.0 / 3.0, 0.0),
            );
        }
        partials.push(d);
    }
    let mut out = Form::zero(k + 1, m);
    for key in (0..m).combinations(k + 1) {
        let mut acc = CMat::zeros(n, n);
        for (a, &slot) in key.iter().enumerate() {
            let rest: Vec<usize> = key
                .iter()
                .enumerate()
                .filter(|(pos, _)| *pos != a)
                .map(|(_, &v)| v)
                .collect();
            let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
            if let Some(dw) = partials[slot].get(&rest) {
                acc += dw * C64::new(sign, 0.0);
            }
            if let Some(w) = base.get(&rest) {
                let br = &b[slot] * w - w * &b[slot];
                acc += br * C64::new(sign, 0.0);
            }
        }
        if crate::fro_norm(&acc) > 0.0 {
            out.add(key, acc);
        }
    }
    Ok(out)
}

/// Yang-Mills residual through the Hodge route *d_B*F, for constant diagonal
/// metrics. Normalized so it matches [`ym_residual`] exactly: the α-component
/// is scaled by (−1)^{m} g_{αα} · sign(det g).
pub fn ym_residual_hodge(a: &GaugeAnsatz, metric: &MetricSpec, point: &RVec) -> Result<Vec<CMat>> {
    let MetricSpec::ConstantDiagonal(sig) = metric else {
        return Err(Error::UnsupportedCase(
            "Hodge-route residual implemented for constant diagonal metrics".into(),
        ));
    };
    let m = sig.n();
    let curv_form = |p: &RVec| -> Result<Form> {
        let f = curvature_closed(a, p)
            .or_else(|_| curvature_fd(&|q: &RVec| ansatz_components(a, q), p, 1e-4))?;
        let mut out = Form::zero(2, m);
        for al in 0..m {
            for be in (al + 1)..m {
                out.add(vec![al, be], f.get(al, be));
            }
        }
        Ok(out)
    };
    let star_f = |p: &RVec| -> Result<Form> { hodge_star(&curv_form(p)?, metric, p) };
    let b = ansatz_components(a, point)?;
    let d_star_f = d_b_form(&star_f, &b, point, 1e-3)?;
    let one_form = hodge_star(&d_star_f, metric, point)?;
    let n = b[0].nrows();
    let det_sign = metric.det_sign(point);
    let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
    let g_diag = metric.g_diag(point);
    let mut out = Vec::with_capacity(m);
    for alpha in 0..m {
        let w = one_form
            .get(&[alpha][..])
            .cloned()
            .unwrap_or_else(|| CMat::zeros(n, n));
        out.push(w * C64::new(parity * det_sign * g_diag[alpha], 0.0));
    }
    Ok(out)
}
