//! Globally adaptive 10/21-point Gauss-Kronrod quadrature over any
//! [`Scalar`] value type.

use super::jet::Scalar;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

/// Tolerances for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSettings {
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

struct Piece<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, o: &Self) -> bool {
        self.error.total_cmp(&o.error) == Ordering::Equal
    }
}
impl<T> Eq for Piece<T> {}
impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Piece<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err;
    if resasc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / resasc).powf(1.5);
        e = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * resabs);
    }
    e
}

/// One 21-point Kronrod rule with its embedded 10-point Gauss estimate.
fn gk21<T, F>(f: &mut F, a: f64, b: f64) -> Result<(T, f64)>
where
    T: Scalar,
    F: FnMut(f64) -> Result<T>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kron = fc.scale(WGK[10]);
    let mut gauss = T::from_f64(0.0);
    let mut resabs = WGK[10] * fc.magnitude();
    let mut fv = [(T::from_f64(0.0), T::from_f64(0.0)); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        let sum = f1 + f2;
        kron = kron + sum.scale(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + sum.scale(WG[j / 2]);
        }
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        fv[j] = (f1, f2);
    }
    let mean = kron.scale(0.5);
    let mut resasc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        resasc += WGK[j] * ((fv[j].0 - mean).magnitude() + (fv[j].1 - mean).magnitude());
    }
    let h = half.abs();
    let err = rescale_error((kron - gauss).magnitude() * h, resabs * h, resasc * h);
    Ok((kron.scale(half), err))
}

/// Integrate a fallible integrand over consecutive segments of `points`
/// (ascending), refining the worst subinterval until the summed error meets
/// `max(abs_tol, rel_tol * |I|)`.
pub fn try_integrate<T, F>(mut f: F, points: &[f64], settings: &QuadratureSettings) -> Result<Integral<T>>
where
    T: Scalar,
    F: FnMut(f64) -> Result<T>,
{
    let mut knots: Vec<f64> = Vec::with_capacity(points.len());
    for &p in points {
        if !p.is_finite() {
            return Err(Error::Domain {
                function: "integrate",
                detail: format!("non-finite limit {p}"),
            });
        }
        match knots.last() {
            Some(&last) if p < last => {
                return Err(Error::Domain {
                    function: "integrate",
                    detail: "break points must be ascending".into(),
                })
            }
            Some(&last) if p == last => {}
            _ => knots.push(p),
        }
    }
    if knots.len() < 2 {
        return Ok(Integral { value: T::from_f64(0.0), error: 0.0, evaluations: 0 });
    }

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Piece<T>> = Vec::new();
    let mut total = T::from_f64(0.0);
    let mut err_sum = 0.0;
    let mut evals = 0;
    for w in knots.windows(2) {
        let (v, e) = gk21(&mut f, w[0], w[1])?;
        evals += 21;
        total = total + v;
        err_sum += e;
        heap.push(Piece { a: w[0], b: w[1], value: v, error: e });
    }

    let mut pieces = heap.len();
    let tol = |t: &T| settings.abs_tol.max(settings.rel_tol * t.magnitude());
    while err_sum > tol(&total) {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-14 * worst.a.abs().max(worst.b.abs()) {
            // Interval cannot be split any further in floating point.
            frozen.push(worst);
            continue;
        }
        if pieces >= settings.max_subdivisions {
            heap.push(worst);
            let value = heap.iter().chain(frozen.iter()).fold(T::from_f64(0.0), |s, p| s + p.value);
            return Err(Error::NonConvergence { estimate: value.magnitude(), error: err_sum });
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid)?;
        let (v2, e2) = gk21(&mut f, mid, worst.b)?;
        evals += 42;
        total = total - worst.value + v1 + v2;
        err_sum += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        pieces += 1;
    }

    let mut value = T::from_f64(0.0);
    let mut error = 0.0;
    for p in heap.iter().chain(frozen.iter()) {
        value = value + p.value;
        error += p.error;
    }
    Ok(Integral { value, error, evaluations: evals })
}

/// Integrate an infallible integrand over `[a, b]`.
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Result<Integral<T>>
where
    T: Scalar,
    F: FnMut(f64) -> T,
{
    try_integrate(|x| Ok(f(x)), &[a, b], settings)
}

/// Sorted break points in `[a, b]`: the ends plus every interior candidate.
pub fn breakpoints(a: f64, b: f64, interior: &[f64]) -> Vec<f64> {
    let mut v = vec![a];
    let mut inner: Vec<f64> = interior.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    v.extend(inner);
    v.push(b);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::jet::Jet;
    use num_complex::Complex64;

    #[test]
    fn kronrod_weights_sum_to_one() {
        let s: f64 = WGK[..10].iter().sum::<f64>() * 2.0 + WGK[10];
        assert!((s - 2.0).abs() < 1e-14);
        let g: f64 = WG.iter().sum::<f64>() * 2.0;
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomials_are_exact() {
        let set = QuadratureSettings::default();
        for deg in 0..=6 {
            let r = integrate(|x: f64| x.powi(deg), 0.0, 2.0, &set).unwrap();
            let exact = 2f64.powi(deg + 1) / (deg + 1) as f64;
            assert!((r.value - exact).abs() < 1e-13 * exact, "degree {deg}");
            assert_eq!(r.evaluations, 21);
        }
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate(|x: f64| (-x * x).exp(), -10.0, 10.0, &QuadratureSettings::default()).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &QuadratureSettings::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn complex_and_jet_values() {
        let set = QuadratureSettings::default();
        let r = integrate(|x: f64| Complex64::new(x.cos(), x.sin()), 0.0, 1.0, &set).unwrap();
        assert!((r.value.re - 1f64.sin()).abs() < 1e-13);
        assert!((r.value.im - (1.0 - 1f64.cos())).abs() < 1e-13);

        // d/ds int_0^1 exp(-s x) dx at s = 1 equals -(1 - 2/e).
        let s = Jet::variable(1.0, 1.0, 1);
        let r = integrate(|x: f64| (s.scale(-x)).exp(), 0.0, 1.0, &set).unwrap();
        let e = std::f64::consts::E;
        assert!((r.value.coeffs()[0] - (1.0 - 1.0 / e)).abs() < 1e-13);
        assert!((r.value.coeffs()[1] + (1.0 - 2.0 / e)).abs() < 1e-13);
    }

    #[test]
    fn break_points_are_honoured() {
        let set = QuadratureSettings::default();
        let pts = breakpoints(0.0, 2.0, &[1.0, 5.0, -1.0]);
        assert_eq!(pts, vec![0.0, 1.0, 2.0]);
        let r = try_integrate(|x: f64| Ok((x - 1.0).abs()), &pts, &set).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let set = QuadratureSettings { rel_tol: 1e-15, abs_tol: 0.0, max_subdivisions: 3 };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &set);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
