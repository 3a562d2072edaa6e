//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;

// Gauss-Kronrod 7/15 nodes on [-1, 1] (non-negative half).
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
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes, then the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod quadrature of a real integrand.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    rec(&f, a, b, tol, 40)
}

/// `∫ g(x) |x| e^{-x²} dx` over `|x| ≤ 8`, split at the kink in the density.
pub fn integrate_limit_density<G: Fn(f64) -> Complex64>(g: G) -> Complex64 {
    let w = |x: f64| x.abs() * (-x * x).exp();
    let tol = 1e-14;
    let re = integrate(|x| g(x).re * w(x), -8.0, 0.0, tol) + integrate(|x| g(x).re * w(x), 0.0, 8.0, tol);
    let im = integrate(|x| g(x).im * w(x), -8.0, 0.0, tol) + integrate(|x| g(x).im * w(x), 0.0, 8.0, tol);
    Complex64::new(re, im)
}

/// `∫ e^{-ixt} |x| e^{-x²} dx` by quadrature.
pub fn limit_fourier(t: f64) -> Complex64 {
    integrate_limit_density(|x| Complex64::new(0.0, -x * t).exp())
}

/// Closed-walk count `⟨o|A^m|o⟩` by repeated integer matrix-vector products.
pub fn closed_walks(adj: &[Vec<u8>], origin: usize, m_max: usize) -> Vec<u64> {
    let n = adj.len();
    let mut v = vec![0u64; n];
    v[origin] = 1;
    let mut out = vec![1u64];
    for _ in 0..m_max {
        let next: Vec<u64> = (0..n)
            .map(|i| (0..n).filter(|&j| adj[i][j] == 1).map(|j| v[j]).sum())
            .collect();
        v = next;
        out.push(v[origin]);
    }
    out
}
