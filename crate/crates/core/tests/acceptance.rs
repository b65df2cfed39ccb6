//! Acceptance run. One PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails. Tolerances are fixed and a failing criterion stays failing.

mod common;

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use omem::cli::calibration::convention_report;
use omem::cli::montecarlo::{default_setup, run_montecarlo};
use omem::cli::{figure, run_sweep, Config, FrequencyConvention, ResultRow};
use omem::protocol::{fidelity_overlap_form, ProtocolSpec};
use omem::{
    diffusion_matrix, drift_matrix, evaluate, fidelity, propagate_cov_analytic, propagate_cov_ode,
    GaussianState, InputState, NoiseSpec, PhysicalParams,
};

const ANGULAR: FrequencyConvention = FrequencyConvention::Angular;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn fid(config: &str, convention: FrequencyConvention) -> f64 {
    let sc = Config::parse(config, "acceptance")
        .unwrap()
        .resolve(Some(convention))
        .unwrap();
    evaluate(&sc.params, &sc.input, &sc.protocol)
        .unwrap()
        .fidelity
        .fidelity
}

fn curves(name: &str) -> Vec<(String, Vec<f64>)> {
    let fig = figure(name, ANGULAR).unwrap();
    let rows = run_sweep(&fig.sweeps, &Config::default(), Some(ANGULAR)).unwrap();
    fig.sweeps
        .iter()
        .map(|s| {
            let ys = rows
                .iter()
                .filter(|r: &&ResultRow| r.series == s.label)
                .map(|r| r.fidelity)
                .collect();
            (s.label.clone(), ys)
        })
        .collect()
}

fn c1() -> Verdict {
    let start = Instant::now();
    let f = fid(
        "preset = groblacher\nGammaL = 0\nalpha = 1\nr = 0\nN_m = 3\ntau = 0.95us",
        ANGULAR,
    );
    let secs = start.elapsed().as_secs_f64();
    verdict(
        (f - 0.789).abs() <= 0.01 && secs < 1.0,
        format!("optomechanical noiseless F = {f:.4} (target 0.789 +- 0.01), {secs:.3} s"),
    )
}

fn c2() -> Verdict {
    let f = fid("preset = groblacher\nGammaL = 1kHz\ngammac = 1kHz", ANGULAR);
    verdict(
        (f - 0.28).abs() <= 0.03,
        format!(
            "optomechanical GammaL = gammac = 1 kHz (angular) F = {f:.4} (target 0.28 +- 0.03)"
        ),
    )
}

fn c3() -> Verdict {
    let quiet = fid("preset = teufel\nGammaL = 0", ANGULAR);
    let noisy = fid("preset = teufel\nGammaL = 1kHz\ngammac = 0.5MHz", ANGULAR);
    verdict(
        (0.93..=0.97).contains(&quiet) && (noisy - 0.66).abs() <= 0.03,
        format!("microwave F = {quiet:.4} (target [0.93, 0.97]), noisy F = {noisy:.4} (target 0.66 +- 0.03)"),
    )
}

fn c4() -> Verdict {
    let base = omem::cli::preset("teufel").unwrap().scenario;
    let at = |noise: NoiseSpec| {
        let p = base.params.with_noise(noise);
        evaluate(&p, &base.input, &base.protocol)
            .unwrap()
            .fidelity
            .fidelity
    };
    let gl: Vec<f64> = (0..=40)
        .map(|k| at(NoiseSpec::colored(k as f64 * 250.0, 5e5)))
        .collect();
    let strict = gl.windows(2).all(|w| w[1] < w[0]);

    let w = base.params.omega_m;
    let top = 10.0 * w;
    let gcs: Vec<f64> = (0..=60)
        .map(|k| 1e3 * (top / 1e3).powf(k as f64 / 60.0))
        .collect();
    let fc: Vec<f64> = gcs
        .iter()
        .map(|&g| at(NoiseSpec::colored(1e3, g)))
        .collect();
    let falling = fc.windows(2).all(|w| w[1] <= w[0]);
    // Saturation: the last decade moves the fidelity by less than the first.
    let decade = 60.0 / (top / 1e3).log10();
    let k = (60.0 - decade).round() as usize;
    let settled = (fc[k] - fc[60]).abs() < (fc[0] - fc[decade.round() as usize]).abs();
    let white = at(NoiseSpec::white_exact(1e3));
    let gap = (fc[60] - white).abs();
    verdict(
        strict && falling && settled && gap <= 0.01,
        format!(
            "F strictly falls in GammaL: {strict}; falls in gammac: {falling}, saturates: {settled}; \
             |F(gammac = 10 omega_m) - F_white| = {gap:.2e} (<= 0.01)"
        ),
    )
}

/// The curve peaks inside the range, falls to a lowest point that is not the
/// last sample, then rises again. Small plateaus on the way down are ignored.
fn max_min_recovery(ys: &[f64]) -> bool {
    let n = ys.len();
    let argmax = |r: std::ops::Range<usize>| r.max_by(|&a, &b| ys[a].total_cmp(&ys[b])).unwrap();
    let argmin = |r: std::ops::Range<usize>| r.min_by(|&a, &b| ys[a].total_cmp(&ys[b])).unwrap();
    let i = argmax(0..n);
    if i == 0 || i >= n - 2 {
        return false;
    }
    let j = argmin(i + 1..n);
    j < n - 1 && ys[argmax(j + 1..n)] > ys[j]
}

fn c5() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, ys) in curves("fig6b") {
        let good = if label == "GammaL=0" {
            ys.windows(2).all(|w| w[1] > w[0])
        } else {
            max_min_recovery(&ys)
        };
        ok &= good;
        parts.push(format!(
            "{label}: {}",
            if good { "ok" } else { "shape missing" }
        ));
    }
    verdict(ok, parts.join("; "))
}

fn c6() -> Verdict {
    let fs: Vec<f64> = [0.0, 0.2, 0.5, 0.8]
        .iter()
        .map(|r| {
            fid(
                &format!("preset = teufel\nGammaL = 1kHz\ngammac = 10kHz\ntau = 0.95us\nQm = 360000\nr = {r}"),
                ANGULAR,
            )
        })
        .collect();
    verdict(
        fs.windows(2).all(|w| w[1] < w[0]),
        format!(
            "F(r = 0, 0.2, 0.5, 0.8) = {:.4} {:.4} {:.4} {:.4}",
            fs[0], fs[1], fs[2], fs[3]
        ),
    )
}

fn c7() -> Verdict {
    let gap = |tau: &str| {
        let off = fid(
            &format!("preset = teufel\nT = 1.7mK\nGammaL = 0\ntau = {tau}"),
            ANGULAR,
        );
        let on = fid(
            &format!("preset = teufel\nT = 1.7mK\nGammaL = 1kHz\ngammac = 300kHz\ntau = {tau}"),
            ANGULAR,
        );
        (off - on) / off
    };
    let (short, long) = (gap("1us"), gap("0.4ms"));
    verdict(
        long < 0.5 * short,
        format!(
            "relative gap {short:.4} at 1 us, {long:.4} at 0.4 ms (needs < {:.4})",
            0.5 * short
        ),
    )
}

fn c8() -> Verdict {
    let p = PhysicalParams {
        omega_m: 1.0,
        kappa: 0.0,
        gamma: 0.0,
        g0: 0.001,
        alpha_s: 50.0,
        n_m: 0.0,
        n_c: 0.0,
        noise: NoiseSpec::none(),
    };
    let input = InputState {
        r: 0.4,
        ..InputState::coherent(1.5)
    };
    let f = evaluate(&p, &input, &ProtocolSpec::with_storage(0.0))
        .unwrap()
        .fidelity
        .fidelity;
    verdict(
        (f - 1.0).abs() <= 1e-6,
        format!(
            "lossless double swap |F - 1| = {:.2e} (<= 1e-6)",
            (f - 1.0).abs()
        ),
    )
}

fn c9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = common::random_params(&mut rng);
        let s = omem::initial_state(&common::random_input(&mut rng), &p);
        let q = drift_matrix(&p, common::random_phase(&mut rng));
        let n = diffusion_matrix(&p).unwrap();
        let t = FRAC_PI_2 / p.coupling();
        let (a, _) = propagate_cov_analytic(&s, &q, &n, t).unwrap();
        let (b, _) = propagate_cov_ode(&s, &q, &n, t, 1e-3).unwrap();
        worst = worst.max((a.cov - b.cov).amax());
    }
    verdict(
        worst <= 1e-7,
        format!("20 draws, max |V_analytic - V_rk4| = {worst:.2e} (<= 1e-7)"),
    )
}

fn c10() -> Verdict {
    let (params, input, phases, cfg) = default_setup();
    let report = run_montecarlo(&params, &input, &phases, &cfg).unwrap();
    let ou = report
        .rows
        .iter()
        .find(|r| r.name == "ou variance")
        .map(|r| r.z.abs());
    let z = report.max_abs_z();
    verdict(
        z <= 3.0 && ou.is_some_and(|z| z <= 3.0),
        format!(
            "n_traj = {}, {} moments, max |z| = {z:.3}, OU variance |z| = {:.3} (<= 3)",
            cfg.n_traj,
            report.rows.len(),
            ou.unwrap_or(f64::NAN)
        ),
    )
}

fn c11() -> Verdict {
    let doc = convention_report().unwrap();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/frequency_convention.md");
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(&path, &doc).unwrap();
    let named = doc.contains("The angular convention reproduces");
    let tabulated = doc.contains("| ordinary | angular |");
    // The named convention has to carry criteria 1 and 2 and the noiseless half of 3.
    let c1_ok = (fid("preset = groblacher\nGammaL = 0", ANGULAR) - 0.789).abs() <= 0.01;
    let c2_ok =
        (fid("preset = groblacher\nGammaL = 1kHz\ngammac = 1kHz", ANGULAR) - 0.28).abs() <= 0.03;
    let c3_ok = (0.93..=0.97).contains(&fid("preset = teufel\nGammaL = 0", ANGULAR));
    verdict(
        named && tabulated && c1_ok && c2_ok && c3_ok,
        format!("docs/frequency_convention.md written; names angular: {named}, both tabulated: {tabulated}"),
    )
}

fn c12() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cases = 256;
    let (mut sym, mut floor, mut forms, mut rot) = (0.0f64, f64::INFINITY, 0.0f64, 0.0f64);
    for _ in 0..cases {
        let (a, b, raw) = common::random_evolved_state(&mut rng);
        sym = sym.max(raw).max((b.cov - b.cov.transpose()).amax());
        floor = floor.min(b.uncertainty_floor()).min(a.uncertainty_floor());
        let f = fidelity(&a, &b).unwrap().fidelity;
        forms = forms.max((f - fidelity_overlap_form(&a, &b).unwrap()).abs());
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        rot = rot.max(
            (f - fidelity(&a.rotated(theta), &b.rotated(theta))
                .unwrap()
                .fidelity)
                .abs(),
        );
    }
    // A single pure state checks the floor is tight rather than trivially met.
    let vac = GaussianState::new(Vector4::zeros(), nalgebra::Matrix5::identity() * 0.25, 1.0);
    floor = floor.min(vac.uncertainty_floor());
    verdict(
        sym <= 1e-12 && floor >= -1e-10 && forms <= 1e-12 && rot <= 1e-12,
        format!(
            "{cases} cases: symmetry {sym:.1e}, floor {floor:.1e}, overlap forms {forms:.1e}, rotation {rot:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters from the harness are not meaningful here.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [Criterion; 12] = [
        ("C1", c1),
        ("C2", c2),
        ("C3", c3),
        ("C4", c4),
        ("C5", c5),
        ("C6", c6),
        ("C7", c7),
        ("C8", c8),
        ("C9", c9),
        ("C10", c10),
        ("C11", c11),
        ("C12", c12),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let v = run();
        println!(
            "{} {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        if !v.pass {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!(
            "acceptance: {} of 12 fail ({})",
            failed.len(),
            failed.join(", ")
        );
        ExitCode::FAILURE
    }
}
