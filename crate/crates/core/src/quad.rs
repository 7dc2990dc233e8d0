//! Adaptive Gauss-Kronrod (7/15) quadrature for complex integrands, and a
//! fixed Gauss-Legendre rule for contour edges.

use std::collections::BinaryHeap;

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Eight-point Gauss-Legendre nodes and weights on `[-1, 1]`.
pub const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let pair = f(c - h * x) + f(c + h * x);
        kron += pair * w;
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Maximum number of bisections before giving up on the tolerance.
pub const MAX_BISECTIONS: usize = 200_000;

/// Integrates `f` over `[a, b]`, starting from `initial` equal pieces and
/// bisecting the worst piece until the summed Kronrod error estimate drops
/// below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    initial: usize,
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult {
    let initial = initial.max(1);
    let step = (b - a) / initial as f64;
    let mut heap = BinaryHeap::with_capacity(initial * 2);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for k in 0..initial {
        let lo = a + k as f64 * step;
        let hi = if k + 1 == initial { b } else { a + (k + 1) as f64 * step };
        let (value, error) = gk15(&f, lo, hi);
        total += value;
        err += error;
        heap.push(Piece { lo, hi, value, error });
    }
    let mut steps = 0;
    while err > abs_tol.max(rel_tol * total.norm()) && steps < MAX_BISECTIONS {
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.lo + worst.hi);
        let (v1, e1) = gk15(&f, worst.lo, mid);
        let (v2, e2) = gk15(&f, mid, worst.hi);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Piece { lo: worst.lo, hi: mid, value: v1, error: e1 });
        heap.push(Piece { lo: mid, hi: worst.hi, value: v2, error: e2 });
        steps += 1;
    }
    // Re-sum in interval order so the result does not carry running-sum drift.
    let mut parts = heap.into_vec();
    parts.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    QuadResult {
        value: parts.iter().map(|p| p.value).sum(),
        error_estimate: parts.iter().map(|p| p.error).sum(),
        intervals: parts.len(),
    }
}
