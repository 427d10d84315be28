//! Radial and spacetime profile functions with first and second derivatives:
//! analytic closures, natural cubic splines over sampled grids, and dense
//! integrator output (quintic two-point interpolation from value/slope/
//! curvature knots).

use std::sync::Arc;

use crate::error::{Error, Result};

/// A scalar function of r with two derivatives.
pub trait Radial: Send + Sync {
    fn v(&self, r: f64) -> f64;
    fn d1(&self, r: f64) -> f64;
    fn d2(&self, r: f64) -> f64;
}

/// A scalar function of (t, r) with derivatives up to second order.
pub trait Spacetime: Send + Sync {
    fn v(&self, t: f64, r: f64) -> f64;
    fn dr(&self, t: f64, r: f64) -> f64;
    fn dt(&self, t: f64, r: f64) -> f64;
    fn drr(&self, t: f64, r: f64) -> f64;
    fn dtt(&self, t: f64, r: f64) -> f64;
    fn drt(&self, t: f64, r: f64) -> f64;
}

pub type RadialRef = Arc<dyn Radial>;
pub type SpacetimeRef = Arc<dyn Spacetime>;

/// Profile from closures for the value and its derivatives.
pub struct Analytic {
    pub f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub f1: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub f2: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Radial for Analytic {
    fn v(&self, r: f64) -> f64 {
        (self.f)(r)
    }
    fn d1(&self, r: f64) -> f64 {
        (self.f1)(r)
    }
    fn d2(&self, r: f64) -> f64 {
        (self.f2)(r)
    }
}

/// Constant profile.
pub fn constant(c: f64) -> RadialRef {
    Arc::new(Analytic {
        f: Box::new(move |_| c),
        f1: Box::new(|_| 0.0),
        f2: Box::new(|_| 0.0),
    })
}

pub fn zero() -> RadialRef {
    constant(0.0)
}

/// Trigonometric bump Σ a_k sin(b_k r + c_k); smooth with exact derivatives.
/// The workhorse for "arbitrary smooth profile" checks.
pub fn trig_sum(terms: Vec<(f64, f64, f64)>) -> RadialRef {
    let t2 = terms.clone();
    let t3 = terms.clone();
    Arc::new(Analytic {
        f: Box::new(move |r| terms.iter().map(|(a, b, c)| a * (b * r + c).sin()).sum()),
        f1: Box::new(move |r| t2.iter().map(|(a, b, c)| a * b * (b * r + c).cos()).sum()),
        f2: Box::new(move |r| {
            t3.iter()
                .map(|(a, b, c)| -a * b * b * (b * r + c).sin())
                .sum()
        }),
    })
}

/// Random smooth radial profile with O(1) magnitude and gentle wavenumbers.
pub fn random_smooth(rng: &mut rand_chacha::ChaCha8Rng) -> RadialRef {
    use rand::Rng;
    let terms: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(-0.8..0.8),
                rng.random_range(0.2..1.4),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    trig_sum(terms)
}

/// Spacetime profile from closures.
pub struct Analytic2 {
    pub f: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub fr: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub ft: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub frr: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub ftt: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub frt: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl Spacetime for Analytic2 {
    fn v(&self, t: f64, r: f64) -> f64 {
        (self.f)(t, r)
    }
    fn dr(&self, t: f64, r: f64) -> f64 {
        (self.fr)(t, r)
    }
    fn dt(&self, t: f64, r: f64) -> f64 {
        (self.ft)(t, r)
    }
    fn drr(&self, t: f64, r: f64) -> f64 {
        (self.frr)(t, r)
    }
    fn dtt(&self, t: f64, r: f64) -> f64 {
        (self.ftt)(t, r)
    }
    fn drt(&self, t: f64, r: f64) -> f64 {
        (self.frt)(t, r)
    }
}

/// Separable product a(r)·cos(ω t + φ) plus a constant offset in t.
pub fn separable(radial: RadialRef, omega: f64, phase: f64) -> SpacetimeRef {
    let r1 = radial.clone();
    let r2 = radial.clone();
    let r3 = radial.clone();
    let r4 = radial.clone();
    let r5 = radial.clone();
    Arc::new(Analytic2 {
        f: Box::new(move |t, r| radial.v(r) * (omega * t + phase).cos()),
        fr: Box::new(move |t, r| r1.d1(r) * (omega * t + phase).cos()),
        ft: Box::new(move |t, r| -r2.v(r) * omega * (omega * t + phase).sin()),
        frr: Box::new(move |t, r| r3.d2(r) * (omega * t + phase).cos()),
        ftt: Box::new(move |t, r| -r4.v(r) * omega * omega * (omega * t + phase).cos()),
        frt: Box::new(move |t, r| -r5.d1(r) * omega * (omega * t + phase).sin()),
    })
}

/// Time-independent lift of a radial profile.
pub fn static_profile(radial: RadialRef) -> SpacetimeRef {
    let r1 = radial.clone();
    let r2 = radial.clone();
    Arc::new(Analytic2 {
        f: Box::new(move |_, r| radial.v(r)),
        fr: Box::new(move |_, r| r1.d1(r)),
        ft: Box::new(|_, _| 0.0),
        frr: Box::new(move |_, r| r2.d2(r)),
        ftt: Box::new(|_, _| 0.0),
        frt: Box::new(|_, _| 0.0),
    })
}

/// Random smooth spacetime profile (sum of separable trig terms).
pub fn random_smooth_2d(rng: &mut rand_chacha::ChaCha8Rng) -> SpacetimeRef {
    use rand::Rng;
    let terms: Vec<(f64, f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(-0.6..0.6),
                rng.random_range(0.2..1.2),
                rng.random_range(0.0..std::f64::consts::TAU),
                rng.random_range(0.2..1.2),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let t = terms.clone();
    let t2 = terms.clone();
    let t3 = terms.clone();
    let t4 = terms.clone();
    let t5 = terms.clone();
    Arc::new(Analytic2 {
        f: Box::new(move |tt, r| {
            terms
                .iter()
                .map(|(a, b, c, w, p)| a * (b * r + c).sin() * (w * tt + p).cos())
                .sum()
        }),
        fr: Box::new(move |tt, r| {
            t.iter()
                .map(|(a, b, c, w, p)| a * b * (b * r + c).cos() * (w * tt + p).cos())
                .sum()
        }),
        ft: Box::new(move |tt, r| {
            t2.iter()
                .map(|(a, b, c, w, p)| -a * w * (b * r + c).sin() * (w * tt + p).sin())
                .sum()
        }),
        frr: Box::new(move |tt, r| {
            t3.iter()
                .map(|(a, b, c, w, p)| -a * b * b * (b * r + c).sin() * (w * tt + p).cos())
                .sum()
        }),
        ftt: Box::new(move |tt, r| {
            t4.iter()
                .map(|(a, b, c, w, p)| -a * w * w * (b * r + c).sin() * (w * tt + p).cos())
                .sum()
        }),
        frt: Box::new(move |tt, r| {
            t5.iter()
                .map(|(a, b, c, w, p)| -a * b * w * (b * r + c).cos() * (w * tt + p).sin())
                .sum()
        }),
    })
}

/// Natural cubic spline through sampled (r, value) points; derivatives come
/// from the spline coefficients.
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    // Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        let n = points.len();
        if n < 3 {
            return Err(Error::Domain("spline needs at least 3 points".into()));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("spline abscissae must increase".into()));
        }
        // Tridiagonal solve for natural boundary conditions (Thomas algorithm).
        let mut a = vec![0.0; n];
        let b = vec![2.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            a[i] = h0 / (h0 + h1);
            c[i] = h1 / (h0 + h1);
            d[i] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0) / (h0 + h1);
        }
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = c[0] / b[0];
        dp[0] = d[0] / b[0];
        for i in 1..n {
            let denom = b[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / denom;
            dp[i] = (d[i] - a[i] * dp[i - 1]) / denom;
        }
        let mut m = vec![0.0; n];
        m[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = dp[i] - cp[i] * m[i + 1];
        }
        Ok(CubicSpline { xs, ys, m })
    }

    fn segment(&self, r: f64) -> usize {
        match self.xs.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.xs.len() - 2),
        }
    }
}

impl Radial for CubicSpline {
    fn v(&self, r: f64) -> f64 {
        let i = self.segment(r);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (self.xs[i + 1] - r) / h;
        let u = (r - self.xs[i]) / h;
        t * self.ys[i]
            + u * self.ys[i + 1]
            + ((t * t * t - t) * self.m[i] + (u * u * u - u) * self.m[i + 1]) * h * h / 6.0
    }
    fn d1(&self, r: f64) -> f64 {
        let i = self.segment(r);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (self.xs[i + 1] - r) / h;
        let u = (r - self.xs[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((3.0 * u * u - 1.0) * self.m[i + 1] - (3.0 * t * t - 1.0) * self.m[i]) * h / 6.0
    }
    fn d2(&self, r: f64) -> f64 {
        let i = self.segment(r);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (self.xs[i + 1] - r) / h;
        let u = (r - self.xs[i]) / h;
        t * self.m[i] + u * self.m[i + 1]
    }
}

/// Dense profile from integrator knots carrying (value, d1, d2); two-point
/// quintic Hermite interpolation, O(h⁶) accurate between knots.
pub struct DenseProfile {
    pub xs: Vec<f64>,
    pub val: Vec<f64>,
    pub der: Vec<f64>,
    pub der2: Vec<f64>,
}

impl DenseProfile {
    fn segment(&self, r: f64) -> usize {
        match self.xs.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.xs.len() - 2),
        }
    }

    /// Quintic Hermite evaluation returning (value, d1, d2).
    fn eval(&self, r: f64) -> (f64, f64, f64) {
        let i = self.segment(r);
        let h = self.xs[i + 1] - self.xs[i];
        let s = (r - self.xs[i]) / h;
        let (y0, y1) = (self.val[i], self.val[i + 1]);
        let (d0, d1) = (self.der[i] * h, self.der[i + 1] * h);
        let (c0, c1) = (self.der2[i] * h * h, self.der2[i + 1] * h * h);
        // Quintic Hermite basis on [0,1].
        let s2 = s * s;
        let s3 = s2 * s;
        let s4 = s3 * s;
        let s5 = s4 * s;
        let h00 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let h10 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let h20 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
        let h01 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let h11 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let h21 = 0.5 * s3 - s4 + 0.5 * s5;
        let v = h00 * y0 + h10 * d0 + h20 * c0 + h01 * y1 + h11 * d1 + h21 * c1;
        let dh00 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
        let dh10 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
        let dh20 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
        let dh01 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
        let dh11 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
        let dh21 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
        let dv = (dh00 * y0 + dh10 * d0 + dh20 * c0 + dh01 * y1 + dh11 * d1 + dh21 * c1) / h;
        let d2h00 = -60.0 * s + 180.0 * s2 - 120.0 * s3;
        let d2h10 = -36.0 * s + 96.0 * s2 - 60.0 * s3;
        let d2h20 = 1.0 - 9.0 * s + 18.0 * s2 - 10.0 * s3;
        let d2h01 = 60.0 * s - 180.0 * s2 + 120.0 * s3;
        let d2h11 = -24.0 * s + 84.0 * s2 - 60.0 * s3;
        let d2h21 = 3.0 * s - 12.0 * s2 + 10.0 * s3;
        let d2v =
            (d2h00 * y0 + d2h10 * d0 + d2h20 * c0 + d2h01 * y1 + d2h11 * d1 + d2h21 * c1) / (h * h);
        (v, dv, d2v)
    }
}

impl Radial for DenseProfile {
    fn v(&self, r: f64) -> f64 {
        self.eval(r).0
    }
    fn d1(&self, r: f64) -> f64 {
        self.eval(r).1
    }
    fn d2(&self, r: f64) -> f64 {
        self.eval(r).2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_smooth_function() {
        let pts: Vec<(f64, f64)> = (0..200)
            .map(|k| {
                let r = 0.5 + k as f64 * 0.02;
                (r, (1.3 * r).sin())
            })
            .collect();
        let sp = CubicSpline::new(&pts).unwrap();
        for k in 0..50 {
            let r = 0.7 + k as f64 * 0.05;
            assert!((sp.v(r) - (1.3 * r).sin()).abs() < 1e-6);
            assert!((sp.d1(r) - 1.3 * (1.3 * r).cos()).abs() < 1e-4);
            assert!((sp.d2(r) + 1.69 * (1.3 * r).sin()).abs() < 2e-3);
        }
    }

    #[test]
    fn spline_rejects_bad_input() {
        assert!(CubicSpline::new(&[(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(CubicSpline::new(&[(0.0, 1.0), (0.0, 2.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn dense_profile_quintic_accuracy() {
        let f = |r: f64| (0.9 * r).sin() * r;
        let f1 = |r: f64| 0.9 * (0.9 * r).cos() * r + (0.9 * r).sin();
        let f2 = |r: f64| -0.81 * (0.9 * r).sin() * r + 2.0 * 0.9 * (0.9 * r).cos();
        let xs: Vec<f64> = (0..=100).map(|k| 1.0 + 0.05 * k as f64).collect();
        let dp = DenseProfile {
            val: xs.iter().map(|&r| f(r)).collect(),
            der: xs.iter().map(|&r| f1(r)).collect(),
            der2: xs.iter().map(|&r| f2(r)).collect(),
            xs,
        };
        for k in 0..150 {
            let r = 1.01 + 0.033 * k as f64;
            assert!((dp.v(r) - f(r)).abs() < 1e-11);
            assert!((dp.d1(r) - f1(r)).abs() < 1e-9);
            assert!((dp.d2(r) - f2(r)).abs() < 1e-7);
        }
    }
}
