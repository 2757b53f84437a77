//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature.
//!
//! Every integral in the crate goes through [`Quadrature`]. The integrator keeps
//! a max-heap of panels keyed by their local error estimate and bisects the worst
//! panel until the summed estimate meets `max(abs_tol, rel_tol * |I|)` or reaches
//! the roundoff floor `50ε ∫|f|`, raised for oscillatory integrands in proportion to
//! their phase. Panel counts are capped; exceeding the cap is reported as an error instead of
//! returning an unconverged value.
//!
//! Oscillatory integrands are handled by pre-splitting the interval at the
//! oscillation scale `pi / frequency` (see [`Quadrature::integrate_oscillatory`]).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on [0, 1]; odd indices are the embedded Gauss nodes.
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
    0.123_491_976_262_065_851_077_208_613_942_860,
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

/// Default relative tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-11;
/// Default absolute floor.
pub const DEFAULT_ABS_TOL: f64 = 1e-14;
/// Default panel cap.
pub const DEFAULT_MAX_PANELS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: DEFAULT_ABS_TOL,
            max_panels: DEFAULT_MAX_PANELS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Error target floor as a multiple of `∫|f|`, below which cancellation makes further
/// refinement meaningless.
const ROUNDOFF_FLOOR: f64 = 50.0 * f64::EPSILON;

/// One G10/K21 pair on [a, b]. Returns (kronrod, |kronrod - gauss|, kronrod of |f|).
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut abs = fc.abs() * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        let pair = lo + hi;
        kronrod += WGK[j] * pair;
        abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).abs(), abs * half.abs())
}

impl Quadrature {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    /// Integrates `f` over `[a, b]`. An empty or reversed interval integrates to zero.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<QuadResult> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over consecutive intervals `breaks[i]..breaks[i + 1]`, each seeded as its
    /// own panel. `breaks` must be nondecreasing.
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
        &self,
        f: F,
        breaks: &[f64],
    ) -> Result<QuadResult> {
        self.adaptive(f, breaks, 0.0)
    }

    /// `phase` bounds `|ω x|` over the domain: evaluating `cos(ωx)` there carries an
    /// absolute error near `ε |ω x|`, which raises the attainable error floor.
    fn adaptive<F: Fn(f64) -> f64>(&self, f: F, breaks: &[f64], phase: f64) -> Result<QuadResult> {
        let floor = ROUNDOFF_FLOOR + 2.0 * f64::EPSILON * phase;
        if breaks.len() < 2 {
            return Ok(QuadResult {
                value: 0.0,
                error_estimate: 0.0,
                panels: 0,
            });
        }
        if breaks.iter().any(|x| !x.is_finite()) {
            return Err(Error::Quadrature("non-finite integration limit".into()));
        }
        let seeds = breaks.windows(2).filter(|w| w[1] > w[0]).count();
        if seeds > self.max_panels {
            return Err(Error::PanelCap {
                panels: seeds,
                cap: self.max_panels,
            });
        }

        let mut heap = BinaryHeap::with_capacity(seeds.max(16));
        let mut total = 0.0;
        let mut total_err = 0.0;
        let mut total_abs = 0.0;
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b < a {
                return Err(Error::Quadrature(
                    "breakpoints must be nondecreasing".into(),
                ));
            }
            if b == a {
                continue;
            }
            let (value, error, abs) = gk21(&f, a, b);
            total += value;
            total_err += error;
            total_abs += abs;
            heap.push(Panel {
                a,
                b,
                value,
                error,
                abs,
            });
        }

        let mut panels = heap.len();
        loop {
            if !total.is_finite() || !total_err.is_finite() {
                return Err(Error::Quadrature(
                    "integrand produced a non-finite value".into(),
                ));
            }
            let target = self
                .abs_tol
                .max(self.rel_tol * total.abs())
                .max(floor * total_abs);
            if total_err <= target {
                break;
            }
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.a + worst.b);
            // Panel too narrow to split further in floating point.
            if mid <= worst.a || mid >= worst.b {
                heap.push(Panel {
                    error: 0.0,
                    ..worst
                });
                total_err -= worst.error;
                continue;
            }
            if panels + 1 > self.max_panels {
                return Err(Error::PanelCap {
                    panels: panels + 1,
                    cap: self.max_panels,
                });
            }
            let (lv, le, la) = gk21(&f, worst.a, mid);
            let (rv, re, ra) = gk21(&f, mid, worst.b);
            total += lv + rv - worst.value;
            total_err += le + re - worst.error;
            total_abs += la + ra - worst.abs;
            heap.push(Panel {
                a: worst.a,
                b: mid,
                value: lv,
                error: le,
                abs: la,
            });
            heap.push(Panel {
                a: mid,
                b: worst.b,
                value: rv,
                error: re,
                abs: ra,
            });
            panels += 1;
        }

        // Re-sum from the panel list so the result does not carry incremental drift.
        let mut finals: Vec<Panel> = heap.into_vec();
        finals.sort_by(|p, q| p.a.total_cmp(&q.a));
        let value = finals.iter().map(|p| p.value).sum();
        let error_estimate = finals.iter().map(|p| p.error).sum();
        Ok(QuadResult {
            value,
            error_estimate,
            panels,
        })
    }

    /// Integrates an integrand oscillating at angular frequency up to `frequency` by seeding
    /// panels of width at most `pi / frequency` (merged with any extra `breaks` inside
    /// `[a, b]`).
    pub fn integrate_oscillatory<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
        frequency: f64,
        breaks: &[f64],
    ) -> Result<QuadResult> {
        if b <= a {
            return Ok(QuadResult {
                value: 0.0,
                error_estimate: 0.0,
                panels: 0,
            });
        }
        let mut points = vec![a, b];
        if frequency > 0.0 {
            let n = ((b - a) * frequency / std::f64::consts::PI).ceil();
            if n > self.max_panels as f64 {
                return Err(Error::PanelCap {
                    panels: n as usize,
                    cap: self.max_panels,
                });
            }
            let n = n as usize;
            let h = (b - a) / n as f64;
            points.extend((1..n).map(|i| a + h * i as f64));
        }
        points.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
        points.sort_by(f64::total_cmp);
        points.dedup();
        self.adaptive(f, &points, frequency * a.abs().max(b.abs()))
    }
}
