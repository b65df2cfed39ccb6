use omem::model::{fixed_point_cubic, fixed_points, select_fixed_point, NoiseSpec, PhysicalParams};
use omem::Error;

fn params() -> PhysicalParams {
    PhysicalParams {
        omega_m: 1.0,
        kappa: 0.2,
        gamma: 1e-3,
        g0: 1e-3,
        alpha_s: 0.0,
        n_m: 0.0,
        n_c: 0.0,
        noise: NoiseSpec::none(),
    }
}

fn log_scan(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
}

fn cubic_residual(p: &PhysicalParams, e: f64, delta: f64, u: f64) -> f64 {
    let c = fixed_point_cubic(p, e, delta);
    let terms = [c[0], c[1] * u, c[2] * u * u, c[3] * u * u * u];
    let scale = terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
    terms.iter().sum::<f64>().abs() / scale
}

#[test]
fn bistable_window_opens_and_closes() {
    let p = params();
    let counts: Vec<usize> = log_scan(1.0, 1e4, 81)
        .map(|e| {
            let roots = fixed_points(&p, e, 1.0).unwrap();
            for r in &roots {
                assert!(cubic_residual(&p, e, 1.0, r.intensity) < 1e-9);
                assert!(r.residual < 1e-8, "{r:?}");
            }
            roots.len()
        })
        .collect();
    let first3 = counts
        .iter()
        .position(|&c| c == 3)
        .expect("no bistable window");
    let last3 = counts.iter().rposition(|&c| c == 3).unwrap();
    assert!(counts[..first3].iter().all(|&c| c == 1));
    assert!(counts[first3..=last3].iter().all(|&c| c == 3));
    assert!(counts[last3 + 1..].iter().all(|&c| c == 1));
    assert!(last3 + 1 < counts.len());
}

#[test]
fn selection_inside_and_beyond_the_window() {
    let p = params();
    let roots = fixed_points(&p, 100.0, 1.0).unwrap();
    assert_eq!(roots.len(), 3);
    let chosen = select_fixed_point(&roots).unwrap();
    assert!(chosen.stable);
    assert_eq!(chosen.intensity, roots[0].intensity);
    // The cavity is pulled to the blue side and no branch is stable.
    let roots = fixed_points(&p, 1e3, 1.0).unwrap();
    assert!(matches!(
        select_fixed_point(&roots),
        Err(Error::Unstable(_))
    ));
}

#[test]
fn single_branch_grows_with_drive() {
    // Below Δ₀ = √3κ/2 there is never more than one root.
    let p = params();
    let mut last = 0.0;
    for e in log_scan(0.1, 1e4, 60) {
        let roots = fixed_points(&p, e, 0.1).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].intensity > last);
        last = roots[0].intensity;
    }
}

#[test]
fn drive_sets_coupling_through_config() {
    use omem::cli::Config;
    let cfg = Config::parse(
        "omega_m = 1\nkappa = 0.2\ngamma = 1e-3\ng0 = 1e-3\nE_L = 10\nDelta_0 = 1\ntau = 0",
        "x",
    )
    .unwrap();
    let sc = cfg.resolve(None).unwrap();
    let want = fixed_points(&params(), 10.0, 1.0).unwrap()[0].alpha_s();
    assert!((sc.params.alpha_s - want).abs() < 1e-12);

    let cfg = Config::parse(
        "omega_m = 1\nkappa = 0.2\ngamma = 1e-3\ng0 = 1e-3\nE_L = 1000\nDelta_0 = 1",
        "x",
    )
    .unwrap();
    let err = cfg.resolve(None).unwrap_err();
    assert!(err.unstable);
    assert_eq!(Error::from(err).exit_code(), 3);
}
