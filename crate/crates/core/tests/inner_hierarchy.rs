use borelsum_core::harrydym::inner::{assemble_rk, inner_residual, solve_g0, solve_gk, solve_hierarchy, Jet};
use borelsum_core::harrydym::outer::hd_outer_eval;
use borelsum_core::SolverConfig;
use num_complex::Complex64 as C;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

#[test]
fn hierarchy_residuals_and_far_field_slopes() {
    let cfg = SolverConfig::default();
    let s = solve_hierarchy(0.0, cfg.eta_max, cfg.eta_min, 4, &cfg).unwrap();
    let mut worst = [0f64; 4];
    for (_, res) in s.residuals() {
        for k in 0..4 {
            worst[k] = worst[k].max(res[k]);
        }
    }
    for k in 0..4 {
        assert!(worst[k] < 1e-7, "G_{k} residual {:e}", worst[k]);
        let slope = s.far_field_slope(k, 25.0);
        let want = -(k as f64 + 0.5);
        assert!(((slope - want) / want).abs() < 0.02, "G_{k} slope {slope}");
    }
}

#[test]
fn g0_correction_coefficient() {
    // G_0 η^{1/2} − 1 ≈ β η^{−9/2}; β from two radii
    let cfg = SolverConfig::default();
    let s = solve_g0(0.0, 50.0, 2.0, &cfg).unwrap();
    let dev = |r: f64| (s.interpolate(0, c(r)).unwrap().re * r.sqrt() - 1.0) * r.powf(4.5);
    let (a, b) = (dev(8.0), dev(16.0));
    // next correction is O(η^{−9/2}) relative: Richardson on the pair
    let beta = (b * 16f64.powf(4.5) - a * 8f64.powf(4.5)) / (16f64.powf(4.5) - 8f64.powf(4.5));
    assert!(((beta + 15.0 / 8.0) / (15.0 / 8.0)).abs() < 0.05, "beta {beta}");
}

#[test]
fn stored_derivatives_are_consistent() {
    let cfg = SolverConfig::default();
    let s = solve_hierarchy(0.0, 50.0, 2.0, 2, &cfg).unwrap();
    let h = s.radii[1] - s.radii[0];
    let w = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
    for k in 0..2 {
        let g = &s.g[k];
        for i in 3..s.len() - 4 {
            for ch in 0..2 {
                let mut fd = c(0.0);
                for (j, wj) in w.iter().enumerate() {
                    fd += (g[i + j + 1][ch] - g[i - j - 1][ch]) * *wj;
                }
                fd /= h;
                let stored = g[i][ch + 1];
                assert!(
                    (fd - stored).norm() <= 1e-6 * stored.norm().max(1e-12),
                    "k={k} ch={ch} r={}: {fd} vs {stored}",
                    s.radii[i]
                );
            }
        }
    }
}

#[test]
fn solve_gk_extends_lower_orders() {
    let cfg = SolverConfig::default();
    let g0 = solve_g0(0.0, 30.0, 3.0, &cfg).unwrap();
    let s1 = solve_gk(1, &g0, &cfg).unwrap();
    assert_eq!(s1.orders(), 2);
    assert_eq!(s1.len(), g0.len());
    for i in 0..g0.len() {
        assert!((s1.g[0][i][0] - g0.g[0][i][0]).norm() < 1e-9);
    }
    assert!(solve_gk(3, &g0, &cfg).is_err());
}

/// Every (k1,k2,k3,k4) tuple written out, no shortcuts.
fn brute_force_r(k: usize, jets: &[Jet]) -> C {
    let mut half = c(0.0);
    let mut s = c(0.0);
    for a in 0..k {
        for b in 0..k {
            for d in 0..k {
                if a + b + d + 1 == k {
                    half += jets[a][0] * jets[b][0] * jets[d][0];
                }
                for e in 0..k {
                    if a + b + d + e == k {
                        s += jets[a][0] * jets[b][0] * jets[d][0] * jets[e][3];
                    }
                }
            }
        }
    }
    half * 0.5 - s
}

#[test]
fn rk_matches_brute_force_tuples() {
    let cfg = SolverConfig::default();
    let s = solve_hierarchy(0.0, 20.0, 4.0, 4, &cfg).unwrap();
    for k in 1..4 {
        let r = assemble_rk(k, &s.g[..k]).unwrap();
        for i in (0..s.len()).step_by(37) {
            let jets: Vec<Jet> = (0..k).map(|j| s.g[j][i]).collect();
            let want = brute_force_r(k, &jets);
            assert!((r[i] - want).norm() <= 1e-13 * want.norm().max(1e-300));
        }
    }
    // R_2 spelled out
    let i = 11;
    let (g0, g1) = (s.g[0][i], s.g[1][i]);
    let r2 = 1.5 * g0[0] * g0[0] * g1[0] - 3.0 * g0[0] * g0[0] * g1[0] * g1[3] - 3.0 * g0[0] * g1[0] * g1[0] * g0[3];
    let got = assemble_rk(2, &s.g[..2]).unwrap()[i];
    assert!((got - r2).norm() < 1e-14 * r2.norm());
}

#[test]
fn truncated_hierarchy_residual_scales_with_tau() {
    let cfg = SolverConfig::default();
    let s = solve_hierarchy(0.0, 30.0, 3.0, 3, &cfg).unwrap();
    let eta = c(6.0);
    // G = G_0 + τG_1 + τ²G_2 leaves O(τ³)
    let g = |e: C, t: f64| {
        (0..3).map(|k| s.interpolate(k, e).unwrap() * t.powi(k as i32)).sum::<C>()
    };
    let pts: Vec<(f64, f64)> = [0.02, 0.04, 0.08]
        .iter()
        .map(|&t| {
            let r = inner_residual(g, eta, t, c(1.0), 1e-2, 1e-3 * t);
            (t.ln(), r.norm().ln())
        })
        .collect();
    let slope = (pts[2].1 - pts[0].1) / (pts[2].0 - pts[0].0);
    assert!((slope - 3.0).abs() < 0.3, "slope {slope}");
}

#[test]
fn inner_and_outer_agree_in_the_overlap() {
    let cfg = SolverConfig::default();
    let s = solve_hierarchy(0.0, 120.0, 15.0, 4, &cfg).unwrap();
    let mut worst = 0f64;
    for &t in &[1e-4, 1e-3, 1e-2] {
        for &eta in &[20.0, 30.0, 50.0, 100.0] {
            let tau = f64::powf(t, 7.0 / 9.0);
            let x = t + eta * f64::powf(t, 2.0 / 9.0);
            let inner = s.eval(c(eta), tau).unwrap().value;
            let outer = hd_outer_eval(c(x), c(t), 4).unwrap().value * f64::powf(t, 1.0 / 9.0);
            worst = worst.max(((inner - outer) / outer).norm());
        }
    }
    assert!(worst < 1e-3, "worst relative discrepancy {worst:e}");
}
