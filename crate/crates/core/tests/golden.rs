use borelsum_core::harrydym::outer::{hd_outer_coeffs, theta_squared as hd_d};
use borelsum_core::p1::{p1_formal_series, p1_residual, theta_squared};
use borelsum_core::scalar::{rational, Scalar};
use borelsum_core::{HalfInt, PuiseuxSeries};

fn h(n: i64, m: i64) -> HalfInt {
    HalfInt::new(n, m).unwrap()
}

#[test]
fn harry_dym_first_three_coefficients() {
    let s = hd_outer_coeffs(2).unwrap();
    let q = |n, m| Scalar::from_ratio(n, m, &hd_d());
    let want: [&[(HalfInt, Scalar)]; 3] = [
        &[(h(-1, 2), q(1, 1))],
        &[(h(-5, 1), q(-15, 8)), (h(-3, 2), q(-1, 2))],
        &[(h(-19, 2), q(25875, 128)), (h(-6, 1), q(195, 32)), (h(-5, 2), q(3, 8))],
    ];
    for (c, w) in s.coeffs.iter().zip(want) {
        let got: Vec<(HalfInt, Scalar)> = c.terms().map(|(e, v)| (e, v.clone())).collect();
        assert_eq!(got, w.to_vec());
    }
}

#[test]
fn p1_first_three_terms() {
    let s = p1_formal_series(3).unwrap();
    let d = theta_squared();
    let got: Vec<(HalfInt, Scalar)> = s.series.terms().map(|(e, v)| (e, v.clone())).collect();
    let want = vec![
        (h(1, 2), Scalar::new(rational(0, 1), rational(1, 6), d.clone())),
        (h(-2, 1), Scalar::from_ratio(-1, 48, &d)),
        (h(-9, 2), Scalar::new(rational(0, 1), rational(49, 4608), d.clone())),
    ];
    assert_eq!(got, want);
    // the residual only starts beyond the retained order
    let r = p1_residual(&s.series).unwrap();
    assert!(r.terms().all(|(e, _)| e <= s.residual_threshold()));
}

#[test]
fn p1_terms_stabilise_as_the_budget_grows() {
    let a = p1_formal_series(4).unwrap().series;
    let b = p1_formal_series(6).unwrap().series;
    for (e, c) in a.terms() {
        assert_eq!(&b.coeff(e).unwrap(), c);
    }
}

/// `H_N = Σ_{n≤N} tⁿcₙ` substituted into `H_t + H_x − H³H_yyy + ½H³`
/// (with `∂_t + ∂_x` acting as `d/dt` at fixed `y`) must vanish through `t^{N−1}`.
#[test]
fn outer_pde_residual_is_order_n() {
    let n = 5;
    let s = hd_outer_coeffs(n).unwrap();
    let d = hd_d();
    let zero = || PuiseuxSeries::zero("y", &d, Default::default(), None);
    let mul_t = |a: &[PuiseuxSeries], b: &[PuiseuxSeries]| -> Vec<PuiseuxSeries> {
        let mut out = vec![zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j].try_add(&x.try_mul(y).unwrap()).unwrap();
            }
        }
        out
    };
    let hh = &s.coeffs;
    let cube = mul_t(&mul_t(hh, hh), hh);
    let d3: Vec<PuiseuxSeries> = hh.iter().map(|c| c.nth_derivative(3)).collect();
    let prod = mul_t(&cube, &d3);
    for k in 0..=n {
        let dt = if k < n { hh[k + 1].scale_rational(&rational(k as i64 + 1, 1)) } else { zero() };
        let r = dt
            .try_sub(&prod[k])
            .unwrap()
            .try_add(&cube[k].scale_rational(&rational(1, 2)))
            .unwrap();
        if k < n {
            assert!(r.is_zero(), "order t^{k}: {r}");
        } else {
            assert!(!r.is_zero());
        }
    }
}

#[test]
fn inner_limit_of_the_outer_series() {
    // y^{−1/2} − (15/8)t y^{−5} with y = t^{2/9}η gives t^{−1/9}(η^{−1/2} − (15/8)η^{−5})
    let s = hd_outer_coeffs(3).unwrap();
    let g0 = s.inner_far_field(0);
    assert_eq!(g0[0], (h(-1, 2), 1.0));
    assert_eq!(g0[1], (h(-5, 1), -15.0 / 8.0));
    let a: Vec<f64> = (1..4).map(|k| s.inner_far_field(k)[0].1).collect();
    assert_eq!(a, vec![-0.5, 0.375, -0.3125]);
}

#[test]
fn gevrey_growth_of_the_heat_series() {
    // F_0 = 1/(1−x): F_0^{(2k)}(0) = (2k)!
    let mut derivs = vec![1.0f64];
    for m in 1..=26 {
        let last = *derivs.last().unwrap();
        derivs.push(last * m as f64);
    }
    let f = borelsum_core::heat::heat_series(&derivs, 13).unwrap();
    for k in 1..=12 {
        let ratio = f[k + 1] / f[k] / (4.0 * k as f64);
        if k == 12 {
            assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
        }
        // exact: (2k+2)(2k+1)/(k+1) = 2(2k+1)
        assert!((f[k + 1] / f[k] - 2.0 * (2 * k + 1) as f64).abs() < 1e-9 * f[k + 1] / f[k]);
    }
}
