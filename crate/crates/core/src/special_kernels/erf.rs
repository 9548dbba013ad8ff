// Error function and complementary error function.
//
// Rational approximations from FreeBSD msun s_erf.c, which carries:
//
// ====================================================
// Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//
// Developed at SunPro, a Sun Microsystems, Inc. business.
// Permission to use, copy, modify, and distribute this
// software is freely granted, provided that this notice
// is preserved.
// ====================================================
//
// Intervals: |x| < 0.84375 uses x + x R(x²); [0.84375, 1.25) expands around
// x = 1; [1.25, 1/0.35) and [1/0.35, 28) use erfc(x) = exp(-x² - 0.5625 + R/S)/x.
// The quoted bounds on the rational fits are below 2^-57, so both functions
// are within a few ulp of the true value.

const ERX: f64 = 8.450_629_115_104_675e-1;

const EFX: f64 = 1.283_791_670_955_126e-1;
const EFX8: f64 = 1.027_033_336_764_100_7;
const PP: [f64; 5] = [
    1.283_791_670_955_125_6e-1,
    -3.250_421_072_470_015e-1,
    -2.848_174_957_559_851e-2,
    -5.770_270_296_489_442e-3,
    -2.376_301_665_665_016_3e-5,
];
const QQ: [f64; 5] = [
    3.979_172_239_591_553_5e-1,
    6.502_224_998_876_73e-2,
    5.081_306_281_875_766e-3,
    1.324_947_380_043_216_4e-4,
    -3.960_228_278_775_368e-6,
];

const PA: [f64; 7] = [
    -2.362_118_560_752_659_4e-3,
    4.148_561_186_837_483_3e-1,
    -3.722_078_760_357_013e-1,
    3.183_466_199_011_617_5e-1,
    -1.108_946_942_823_966_8e-1,
    3.547_830_432_561_823_6e-2,
    -2.166_375_594_868_791e-3,
];
const QA: [f64; 6] = [
    1.064_208_804_008_442_3e-1,
    5.403_979_177_021_71e-1,
    7.182_865_441_419_627e-2,
    1.261_712_198_087_616_4e-1,
    1.363_708_391_202_905e-2,
    1.198_449_984_679_910_7e-2,
];

const RA: [f64; 8] = [
    -9.864_944_034_847_148e-3,
    -6.938_585_727_071_818e-1,
    -1.055_862_622_532_329_1e1,
    -6.237_533_245_032_600_6e1,
    -1.623_966_694_625_734_7e2,
    -1.846_050_929_067_110_4e2,
    -8.128_743_550_630_66e1,
    -9.814_329_344_169_145,
];
const SA: [f64; 8] = [
    1.965_127_166_743_925_7e1,
    1.376_577_541_435_190_4e2,
    4.345_658_774_752_292_3e2,
    6.453_872_717_332_679e2,
    4.290_081_400_275_678_3e2,
    1.086_350_055_417_794_4e2,
    6.570_249_770_319_282,
    -6.042_441_521_485_81e-2,
];

const RB: [f64; 7] = [
    -9.864_942_924_700_1e-3,
    -7.992_832_376_805_23e-1,
    -1.775_795_491_775_475_2e1,
    -1.606_363_848_558_219_2e2,
    -6.375_664_433_683_896e2,
    -1.025_095_131_611_077_2e3,
    -4.835_191_916_086_514e2,
];
const SB: [f64; 7] = [
    3.033_806_074_348_246e1,
    3.257_925_129_965_739e2,
    1.536_729_586_084_437e3,
    3.199_858_219_508_595_5e3,
    2.553_050_406_433_164_4e3,
    4.745_285_412_069_553_7e2,
    -2.244_095_244_658_582e1,
];

const VERY_TINY: f64 = 2.848094538889218e-306;
const SMALL: f64 = 3.725_290_298_461_914e-9; // 2^-28
const TINY: f64 = 1.387_778_780_781_445_7e-17; // 2^-56

/// Horner evaluation with coefficients in ascending order.
fn poly(z: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

/// `1 + z * poly(z, coeffs)`: the denominators are stored without their leading 1.
fn poly1(z: f64, coeffs: &[f64]) -> f64 {
    1.0 + z * poly(z, coeffs)
}

/// `erfc(x)` for `x >= 1.25`, `x < 28`.
fn erfc_tail(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    let (r, q) = if x < 1.0 / 0.35 {
        (poly(s, &RA), poly1(s, &SA))
    } else {
        (poly(s, &RB), poly1(s, &SB))
    };
    // x truncated to its high word so that z*z is exact.
    let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    (-z * z - 0.5625).exp() * ((z - x) * (z + x) + r / q).exp() / x
}

/// The error function, accurate to a few ulp over the whole real line.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < 0.84375 {
        if ax < SMALL {
            if ax < VERY_TINY {
                0.125 * (8.0 * ax + EFX8 * ax)
            } else {
                ax + EFX * ax
            }
        } else {
            let z = ax * ax;
            ax + ax * (poly(z, &PP) / poly1(z, &QQ))
        }
    } else if ax < 1.25 {
        let s = ax - 1.0;
        ERX + poly(s, &PA) / poly1(s, &QA)
    } else if ax >= 6.0 {
        1.0
    } else {
        1.0 - erfc_tail(ax)
    };
    value.copysign(x)
}

/// The complementary error function `1 - erf(x)`, with full relative
/// accuracy in the right tail (until it underflows near `x ≈ 26.5`).
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let negative = x < 0.0;
    if ax < 0.84375 {
        let head = if ax < TINY {
            ax
        } else {
            let z = ax * ax;
            let y = poly(z, &PP) / poly1(z, &QQ);
            if ax < 0.25 {
                ax + ax * y
            } else {
                0.5 + (ax * y + (ax - 0.5))
            }
        };
        return if negative { 1.0 + head } else { 1.0 - head };
    }
    if ax < 1.25 {
        let s = ax - 1.0;
        let tail = poly(s, &PA) / poly1(s, &QA);
        return if negative {
            1.0 + ERX + tail
        } else {
            1.0 - ERX - tail
        };
    }
    if ax < 28.0 {
        if negative && ax > 6.0 {
            return 2.0;
        }
        let r = erfc_tail(ax);
        return if negative { 2.0 - r } else { r };
    }
    if negative {
        2.0
    } else {
        0.0
    }
}
