//! Small dense linear-algebra kernels: the matrix exponential and the
//! block-exponential evaluation of the Lyapunov convolution integral.

use nalgebra::{DMatrix, Matrix5, SMatrix};

use crate::error::{domain, Result};

const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068;
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// `exp(M·t)` by scaling and squaring with a diagonal Padé approximant of
/// degree 3, 5, 7, 9 or 13, chosen from the 1-norm.
pub fn expm<const N: usize>(m: &SMatrix<f64, N, N>, t: f64) -> Result<SMatrix<f64, N, N>> {
    if !t.is_finite() || m.iter().any(|v| !v.is_finite()) {
        return Err(domain("matrix exponential of a non-finite argument"));
    }
    let a = m * t;
    let norm = one_norm(&a);
    let id = SMatrix::<f64, N, N>::identity();
    if norm == 0.0 {
        return Ok(id);
    }

    let low = [
        (THETA_3, &B3[..]),
        (THETA_5, &B5[..]),
        (THETA_7, &B7[..]),
        (THETA_9, &B9[..]),
    ];
    for (theta, b) in low {
        if norm <= theta {
            return pade_low(&a, b);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a * 2f64.powi(-s);
    let mut r = pade13(&scaled)?;
    for _ in 0..s {
        r = r * r;
    }
    Ok(r)
}

fn one_norm<const N: usize>(a: &SMatrix<f64, N, N>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade_low<const N: usize>(a: &SMatrix<f64, N, N>, b: &[f64]) -> Result<SMatrix<f64, N, N>> {
    let id = SMatrix::<f64, N, N>::identity();
    let a2 = a * a;
    let mut power = id;
    let mut u = id * b[1];
    let mut v = id * b[0];
    for k in 1..b.len() / 2 {
        power *= a2;
        u += power * b[2 * k + 1];
        v += power * b[2 * k];
    }
    let u = a * u;
    solve_pade(&u, &v)
}

fn pade13<const N: usize>(a: &SMatrix<f64, N, N>) -> Result<SMatrix<f64, N, N>> {
    let b = &B13;
    let id = SMatrix::<f64, N, N>::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let u_inner = a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9]);
    let u = a * (u_inner + a6 * b[7] + a4 * b[5] + a2 * b[3] + id * b[1]);
    let v_inner = a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8]);
    let v = v_inner + a6 * b[6] + a4 * b[4] + a2 * b[2] + id * b[0];
    solve_pade(&u, &v)
}

fn solve_pade<const N: usize>(
    u: &SMatrix<f64, N, N>,
    v: &SMatrix<f64, N, N>,
) -> Result<SMatrix<f64, N, N>> {
    // Const-generic LU needs typenum bounds; the dynamic LU is just as fast here.
    let lhs = DMatrix::from_column_slice(N, N, (v - u).as_slice());
    let rhs = DMatrix::from_column_slice(N, N, (v + u).as_slice());
    lhs.lu()
        .solve(&rhs)
        .map(|x| SMatrix::from_column_slice(x.as_slice()))
        .ok_or_else(|| domain("singular Pade denominator"))
}

/// Transition pair `(Φ, Σ)` of the Lyapunov equation `V̇ = QV + VQᵀ + N` over
/// a step `h`: `V(h) = Φ V(0) Φᵀ + Σ` with `Φ = e^{Qh}` and
/// `Σ = ∫₀ʰ e^{Qs} N e^{Qᵀs} ds`.
///
/// Both come out of one exponential of the 10×10 block matrix
/// `[[−Q, N], [0, Qᵀ]]·h`, whose lower-right block is `e^{Qᵀh}` and whose
/// upper-right block is `e^{−Qh}Σ`.
pub fn van_loan(
    q: &Matrix5<f64>,
    n: &Matrix5<f64>,
    h: f64,
) -> Result<(Matrix5<f64>, Matrix5<f64>)> {
    // A variable that drives others through a large coefficient (ψ enters p₂
    // with α_s ~ 10³) inflates the block norm and costs squarings. Rescale it
    // by a power of two, which is exact: Q' = D⁻¹QD, N' = D⁻¹ND⁻¹.
    let d: [f64; 5] = std::array::from_fn(|i| {
        let big = (0..5)
            .filter(|&j| j != i)
            .map(|j| q[(j, i)].abs())
            .fold(1.0, f64::max);
        2f64.powi(-(big.log2().round() as i32))
    });
    let qs = Matrix5::from_fn(|i, j| q[(i, j)] * d[j] / d[i]);
    let ns = Matrix5::from_fn(|i, j| n[(i, j)] / (d[i] * d[j]));

    let mut block = SMatrix::<f64, 10, 10>::zeros();
    block.fixed_view_mut::<5, 5>(0, 0).copy_from(&(-qs));
    block.fixed_view_mut::<5, 5>(0, 5).copy_from(&ns);
    block
        .fixed_view_mut::<5, 5>(5, 5)
        .copy_from(&qs.transpose());
    let e = expm(&block, h)?;
    let phi_s = e.fixed_view::<5, 5>(5, 5).transpose();
    let sigma_s = phi_s * e.fixed_view::<5, 5>(0, 5);
    let phi = Matrix5::from_fn(|i, j| phi_s[(i, j)] * d[i] / d[j]);
    let sigma = Matrix5::from_fn(|i, j| sigma_s[(i, j)] * d[i] * d[j]);
    Ok((phi, symmetrize(&sigma)))
}

/// `(A + Aᵀ)/2`.
pub fn symmetrize<const N: usize>(a: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    (a + a.transpose()) * 0.5
}

/// Largest `|Aᵢⱼ − Aⱼᵢ|`.
pub fn symmetry_defect<const N: usize>(a: &SMatrix<f64, N, N>) -> f64 {
    (a - a.transpose()).amax()
}
