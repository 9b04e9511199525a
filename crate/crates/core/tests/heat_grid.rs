use borelsum_core::heat::{gaussian_closed_form, heat_borel_solution, heat_kernel_solution, InitialDatum};
use borelsum_core::{Error, SolverConfig};

const TWO_SQRT_PI: f64 = 3.544_907_701_811_032;

fn grid() -> impl Iterator<Item = (f64, f64)> {
    [0.1, 1.0, 10.0]
        .into_iter()
        .flat_map(|t| (0..=12).map(move |i| (t, -3.0 + 0.5 * i as f64)))
}

#[test]
fn both_representations_agree() {
    let cfg = SolverConfig::default();
    for datum in ["gaussian", "const", "polygaussian"] {
        let u = InitialDatum::by_name(datum).unwrap();
        for (t, x) in grid() {
            let a = heat_kernel_solution(&u, t, x, &cfg).unwrap();
            let b = heat_borel_solution(&u, t, x, &cfg).unwrap();
            assert!((a - b).abs() <= 1e-8, "{datum} t={t} x={x}: {a} vs {b}");
        }
    }
}

#[test]
fn gaussian_and_constant_closed_forms() {
    let cfg = SolverConfig::default();
    let g = InitialDatum::gaussian();
    let one = InitialDatum::constant();
    for (t, x) in grid() {
        let want = gaussian_closed_form(t, x);
        assert!((heat_kernel_solution(&g, t, x, &cfg).unwrap() - want).abs() <= 1e-8);
        assert!((heat_borel_solution(&g, t, x, &cfg).unwrap() - want).abs() <= 1e-8);
        assert!((heat_borel_solution(&one, t, x, &cfg).unwrap() - TWO_SQRT_PI).abs() <= 1e-10);
    }
}

#[test]
fn kernel_solution_satisfies_the_heat_equation() {
    let cfg = SolverConfig::default();
    let u = InitialDatum::poly_gaussian();
    let f = |t: f64, x: f64| heat_kernel_solution(&u, t, x, &cfg).unwrap();
    let (h, k) = (1e-2, 1e-3);
    for &(t, x) in &[(0.5, 0.3), (1.0, -1.0), (2.0, 2.5)] {
        let ft = (f(t + k, x) - f(t - k, x)) / (2.0 * k);
        let fxx = (f(t, x + h) - 2.0 * f(t, x) + f(t, x - h)) / (h * h);
        assert!((ft - fxx).abs() < 1e-4, "t={t} x={x}: {ft} vs {fxx}");
    }
}

#[test]
fn undecayed_data_is_refused() {
    let cfg = SolverConfig::default();
    let wild = InitialDatum::new("wild", borelsum_core::heat::DecayClass::Bounded, |s| (s * s).exp());
    assert!(matches!(heat_kernel_solution(&wild, 1.0, 0.0, &cfg), Err(Error::Divergence(_))));
    let unknown = InitialDatum::new("unknown", borelsum_core::heat::DecayClass::None, |_| 1.0);
    assert!(matches!(heat_borel_solution(&unknown, 1.0, 0.0, &cfg), Err(Error::Divergence(_))));
}
