//! Globally adaptive Gauss-Kronrod (G10/K21) quadrature for complex integrands.

use num_complex::Complex64 as C64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[allow(clippy::excessive_precision)]
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
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { eps_abs: 1e-13, eps_rel: 1e-12, max_intervals: 20_000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.partial_cmp(&o.error).unwrap_or(Ordering::Equal)
    }
}

/// One K21 panel with the QUADPACK error heuristic.
pub fn qk21<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[10];
    let mut rg = C64::new(0.0, 0.0);
    let mut fv1 = [C64::new(0.0, 0.0); 10];
    let mut fv2 = [C64::new(0.0, 0.0); 10];
    let mut resabs = WGK[10] * fc.norm();
    for j in 0..10 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        fv1[j] = f1;
        fv2[j] = f2;
        rk += (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            rg += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = rk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let ah = h.abs();
    let value = rk * h;
    resabs *= ah;
    resasc *= ah;
    let mut err = ((rk - rg) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

/// Integrate over the polyline of `breaks` (sorted), refining globally.
pub fn integrate_breaks<F: Fn(f64) -> C64>(f: F, breaks: &[f64], opt: QuadOptions) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let mut total = C64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = qk21(&f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Piece { a: w[0], b: w[1], value: v, error: e });
    }
    while err > opt.eps_abs.max(opt.eps_rel * total.norm()) && heap.len() < opt.max_intervals {
        let p = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = qk21(&f, p.a, m);
        let (v2, e2) = qk21(&f, m, p.b);
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        heap.push(Piece { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Piece { a: m, b: p.b, value: v2, error: e2 });
    }
    // re-sum to shed accumulated cancellation in the running totals
    let mut value = C64::new(0.0, 0.0);
    let mut error = 0.0;
    let intervals = heap.len();
    for p in heap {
        value += p.value;
        error += p.error;
    }
    QuadResult { value, error, intervals }
}

pub fn integrate<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, opt: QuadOptions) -> QuadResult {
    integrate_breaks(f, &[a, b], opt)
}
