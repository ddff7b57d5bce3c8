//! Adaptive Gauss-Kronrod (7/15) integration.

use crate::scalar::Scalar;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 50;

fn kronrod<T: Scalar>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let half = T::of(0.5);
    let center = (a + b) * half;
    let radius = (b - a) * half;
    let fc = f(center);
    let mut gauss = fc * T::of(WG[3]);
    let mut kron = fc * T::of(WGK[7]);
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = radius * T::of(x);
        let s = f(center - dx) + f(center + dx);
        kron = kron + s * T::of(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + s * T::of(WG[j / 2]);
        }
    }
    (kron * radius, ((kron - gauss) * radius).abs())
}

fn adapt<T: Scalar>(f: &impl Fn(T) -> T, a: T, b: T, rel_tol: T, abs_floor: T, depth: u32) -> T {
    let (value, err) = kronrod(f, a, b);
    if err <= rel_tol * value.abs() || err <= abs_floor || depth >= MAX_DEPTH {
        return value;
    }
    let mid = (a + b) * T::of(0.5);
    let floor = abs_floor * T::of(0.5);
    adapt(f, a, mid, rel_tol, floor, depth + 1) + adapt(f, mid, b, rel_tol, floor, depth + 1)
}

/// `int_a^b f`, refined until each panel's error estimate is below
/// `rel_tol` relative to the panel value.
pub fn integrate<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, rel_tol: T) -> T {
    let floor = T::epsilon() * T::of(16.0);
    adapt(&f, a, b, rel_tol, floor, 0)
}
