#![allow(clippy::excessive_precision)]

//! Gauss-Kronrod 10/21 rule and a globally adaptive bisection driver.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Estimate, QuadSpec};
use crate::{Error, Result};

/// Values an integrand may take: real or complex.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_937_592,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment<V> {
    pub a: f64,
    pub b: f64,
    pub value: V,
    pub error: f64,
    pub resabs: f64,
}

/// One application of the 21-point Kronrod rule with the QUADPACK error heuristic.
pub(crate) fn gk21<V: QuadValue, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> Segment<V> {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let dhlgth = hlgth.abs();

    let fc = f(centr);
    let mut resg = V::default();
    let mut resk = fc * WGK[10];
    let mut resabs = WGK[10] * fc.magnitude();
    let mut fv1 = [V::default(); 10];
    let mut fv2 = [V::default(); 10];
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let absc = hlgth * XGK[jtw];
        let f1 = f(centr - absc);
        let f2 = f(centr + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        let fsum = f1 + f2;
        resg = resg + fsum * WG[j];
        resk = resk + fsum * WGK[jtw];
        resabs += WGK[jtw] * (f1.magnitude() + f2.magnitude());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let absc = hlgth * XGK[jtwm1];
        let f1 = f(centr - absc);
        let f2 = f(centr + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        let fsum = f1 + f2;
        resk = resk + fsum * WGK[jtwm1];
        resabs += WGK[jtwm1] * (f1.magnitude() + f2.magnitude());
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[10] * (fc - reskh).magnitude();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).magnitude() + (fv2[j] - reskh).magnitude());
    }
    let value = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    let mut abserr = ((resk - resg) * hlgth).magnitude();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * (200.0 * abserr / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    if !abserr.is_finite() {
        abserr = f64::INFINITY;
    }
    Segment { a, b, value, error: abserr, resabs }
}

/// The 21 Kronrod abscissae on `[-1, 1]` with their Kronrod weights and the
/// embedded Gauss weights (zero at the Kronrod-only nodes).
pub(crate) fn gk21_rule() -> [(f64, f64, f64); 21] {
    let mut out = [(0.0, 0.0, 0.0); 21];
    out[0] = (0.0, WGK[10], 0.0);
    for j in 0..10 {
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        out[1 + 2 * j] = (-XGK[j], WGK[j], wg);
        out[2 + 2 * j] = (XGK[j], WGK[j], wg);
    }
    out
}

/// Accuracy goal for a running estimate with magnitude `mag` and absolute
/// integrand mass `resabs`.
pub(crate) fn target(spec: &QuadSpec, mag: f64, resabs: f64) -> f64 {
    let goal = spec.tolerance.min(spec.rel_tolerance * mag);
    goal.max(100.0 * f64::EPSILON * resabs)
}

struct ByError {
    error: f64,
    index: usize,
}

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.index.cmp(&self.index))
    }
}

/// Bisects the worst segment until the summed error meets the goal.
///
/// `fixed` is a contribution not represented by segments (an extrapolated
/// tail) together with its error.
pub(crate) fn refine<V: QuadValue, F: Fn(f64) -> V>(
    f: &F,
    mut segments: Vec<Segment<V>>,
    fixed: (V, f64),
    spec: &QuadSpec,
) -> Result<Estimate<V>> {
    let mut heap: BinaryHeap<ByError> = segments
        .iter()
        .enumerate()
        .map(|(index, s)| ByError { error: s.error, index })
        .collect();
    let mut count = segments.len();
    loop {
        let mut total = fixed.0;
        let mut err = fixed.1;
        let mut resabs = 0.0;
        for s in &segments {
            total = total + s.value;
            err += s.error;
            resabs += s.resabs;
        }
        if err <= target(spec, total.magnitude(), resabs) {
            return Ok(Estimate { value: total, error: err });
        }
        let worst = loop {
            match heap.pop() {
                Some(w) => {
                    let s = &segments[w.index];
                    let mid = 0.5 * (s.a + s.b);
                    let tiny = 4.0 * f64::EPSILON * s.a.abs().max(s.b.abs());
                    if (mid - s.a).abs() > tiny && (s.b - mid).abs() > tiny {
                        break Some(w.index);
                    }
                }
                None => break None,
            }
        };
        let Some(idx) = worst else {
            return not_converged(total, err);
        };
        if count >= spec.max_subdivisions {
            return not_converged(total, err);
        }
        let s = segments[idx];
        let mid = 0.5 * (s.a + s.b);
        let left = gk21(f, s.a, mid);
        let right = gk21(f, mid, s.b);
        segments[idx] = left;
        segments.push(right);
        heap.push(ByError { error: left.error, index: idx });
        heap.push(ByError { error: right.error, index: segments.len() - 1 });
        count += 1;
    }
}

fn not_converged<V: QuadValue>(total: V, err: f64) -> Result<Estimate<V>> {
    Err(Error::NotConverged { partial: total.magnitude(), error_estimate: err })
}
