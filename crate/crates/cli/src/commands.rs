use std::path::Path;

use borelsum_core::borel::borel_pade_sum;
use borelsum_core::config::parse_complex;
use borelsum_core::harrydym::{hd_outer_coeffs, hd_outer_eval, solve_hierarchy};
use borelsum_core::heat::{heat_borel_solution, heat_kernel_solution, InitialDatum};
use borelsum_core::ilt::{picard_solve, GridFunction, NonlinearTerm, NonlinearitySpec};
use borelsum_core::p1::p1_formal_series_with;
use borelsum_core::singularities::{
    approach_singularity, eta_singularities, fit_stokes_constant, StokesConstant,
};
use borelsum_core::{Error, SolverConfig};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{CliError, Command, Format};

type Out = Result<Vec<u8>, CliError>;

fn to_json<T: Serialize>(v: &T) -> Out {
    let mut s = serde_json::to_vec(v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push(b'\n');
    Ok(s)
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> Out {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn read_file(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
}

/// `a:b` or `a:b:step`.
fn parse_range(s: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::Config(format!("range {s:?}: expected start:stop[:step]"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (a, b, h) = match parts[..] {
        [a, b] => (a, b, 1.0),
        [a, b, h] => (a, b, h),
        _ => return Err(bad()),
    };
    if !(h > 0.0) || b < a || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    let n = ((b - a) / h + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| a + i as f64 * h).collect())
}

pub fn run(cmd: &Command, mut cfg: SolverConfig, format: Option<Format>) -> Out {
    match cmd {
        Command::P1Series { terms, branch } => {
            cfg.set("sqrt_branch", branch)?;
            cfg.validate()?;
            let s = p1_formal_series_with(*terms, cfg.sqrt_branch)?;
            to_json(&s.series.to_json())
        }
        Command::HdCoeffs { order } => {
            cfg.validate()?;
            let s = hd_outer_coeffs(*order)?;
            let list: Vec<_> = s.coeffs.iter().map(|c| c.to_json()).collect();
            to_json(&list)
        }
        Command::HdEval { x, t, order } => {
            cfg.validate()?;
            let e = hd_outer_eval(parse_complex(x)?, parse_complex(t)?, *order)?;
            to_json(&e)
        }
        Command::HeatDemo { datum, t, x_range } => {
            cfg.validate()?;
            let u = InitialDatum::by_name(datum)?;
            let mut rows = Vec::new();
            for x in parse_range(x_range)? {
                let a = heat_kernel_solution(&u, *t, x, &cfg)?;
                let b = heat_borel_solution(&u, *t, x, &cfg)?;
                rows.push((x, a, b, (a - b).abs()));
            }
            match format.unwrap_or(Format::Csv) {
                Format::Csv => csv_table(
                    &["x", "hk1", "hk2", "diff"],
                    rows.iter()
                        .map(|(x, a, b, d)| vec![x.to_string(), a.to_string(), b.to_string(), d.to_string()])
                        .collect(),
                ),
                Format::Json => to_json(
                    &rows
                        .iter()
                        .map(|(x, a, b, d)| json!({"x": x, "hk1": a, "hk2": b, "diff": d}))
                        .collect::<Vec<_>>(),
                ),
            }
        }
        Command::BorelSum { coeffs, t, pade } => {
            cfg.validate()?;
            let raw: Vec<Num> = serde_json::from_str(&read_file(coeffs)?)
                .map_err(|e| Error::Parse(format!("{}: {e}", coeffs.display())))?;
            let a: Vec<C> = raw.into_iter().map(C::from).collect();
            if a.is_empty() {
                return Err(Error::Config("coefficient file is empty".into()).into());
            }
            let (m, n) = match pade {
                Some(p) => {
                    let (m, n) = p
                        .split_once(',')
                        .ok_or_else(|| Error::Config(format!("--pade expects M,N, got {p:?}")))?;
                    let parse = |v: &str| {
                        v.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Config(format!("--pade: bad degree {v:?}")))
                    };
                    (parse(m)?, parse(n)?)
                }
                None => {
                    let n = (a.len() - 1) / 2;
                    (a.len() - 1 - n, n)
                }
            };
            let r = borel_pade_sum(&a, parse_complex(t)?, m, n, &cfg)?;
            to_json(&json!({"value": r.value, "error_estimate": r.error_estimate, "pade": [m, n]}))
        }
        Command::IltSolve { config } => {
            cfg.validate()?;
            let prob: IltProblem = serde_json::from_str(&read_file(config)?)
                .map_err(|e| Error::Parse(format!("{}: {e}", config.display())))?;
            ilt_solve(prob, &cfg)
        }
        Command::HdInner {
            ray_deg,
            eta_max,
            eta_min,
            orders,
        } => {
            if let Some(v) = ray_deg {
                cfg.ray_deg = *v;
            }
            if let Some(v) = eta_max {
                cfg.eta_max = *v;
            }
            if let Some(v) = eta_min {
                cfg.eta_min = *v;
            }
            cfg.validate()?;
            let s = solve_hierarchy(cfg.ray_deg.to_radians(), cfg.eta_max, cfg.eta_min, *orders, &cfg)?;
            let res = s.residuals();
            let mut max_res = vec![0f64; s.orders()];
            for (_, r) in &res {
                for (m, v) in max_res.iter_mut().zip(r) {
                    *m = m.max(*v);
                }
            }
            let values: Vec<Vec<C>> = (0..s.orders()).map(|k| s.values(k)).collect();
            let eta: Vec<C> = (0..s.len()).map(|i| s.eta(i)).collect();
            to_json(&json!({
                "ray_deg": cfg.ray_deg,
                "radii": s.radii,
                "eta": eta,
                "values": values,
                "residual_max": max_res,
                "residuals": res.iter().map(|(r, v)| json!({"r": r, "orders": v})).collect::<Vec<_>>(),
            }))
        }
        Command::HdSingularities { n, stokes, no_fit } => {
            if let Some(s) = stokes {
                cfg.stokes = Some(parse_complex(s)?);
            }
            cfg.validate()?;
            let (lo, hi) = n
                .split_once(':')
                .and_then(|(a, b)| Some((a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?)))
                .ok_or_else(|| Error::Config(format!("--n expects first:last, got {n:?}")))?;
            let c = match cfg.stokes {
                Some(c) => StokesConstant::user(c)?,
                None => fit_stokes_constant(8.0, 20.0, 0.25, &cfg)?,
            };
            let mut records = Vec::new();
            for r in eta_singularities(lo..=hi, &c, &cfg) {
                let mut r = r?;
                if !no_fit {
                    // only trust the fit when the walk lands on the predicted point
                    if let Ok(a) = approach_singularity(r.eta_s, &cfg) {
                        if (a.eta_s - r.eta_s).norm() < 0.02 * r.eta_s.norm() {
                            r.fitted_exponent = Some(a.fitted_exponent);
                        }
                    }
                }
                records.push(r);
            }
            match format.unwrap_or(Format::Csv) {
                Format::Csv => csv_table(
                    &["n", "re_eta_s", "im_eta_s", "residual", "fitted_exponent"],
                    records
                        .iter()
                        .map(|r| {
                            vec![
                                r.n.to_string(),
                                r.eta_s.re.to_string(),
                                r.eta_s.im.to_string(),
                                format!("{:e}", r.newton_residual),
                                r.fitted_exponent.map(|e| e.to_string()).unwrap_or_default(),
                            ]
                        })
                        .collect(),
                ),
                Format::Json => to_json(&json!({"stokes": c, "records": records})),
            }
        }
    }
}

/// A number or an `[re, im]` pair.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
enum Num {
    Re(f64),
    Pair([f64; 2]),
}

impl From<Num> for C {
    fn from(n: Num) -> C {
        match n {
            Num::Re(x) => C::new(x, 0.0),
            Num::Pair([a, b]) => C::new(a, b),
        }
    }
}

/// A real constant, or a list: one sample per node, or a single (possibly
/// complex) value broadcast to every node.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Samples {
    Values(Vec<Num>),
    Constant(f64),
}

impl Samples {
    fn grid(&self, p_max: f64, m: usize, what: &str) -> Result<GridFunction, Error> {
        match self {
            Samples::Constant(c) => Ok(GridFunction::constant(p_max, m, C::new(*c, 0.0))),
            Samples::Values(v) if v.len() == 1 => Ok(GridFunction::constant(p_max, m, C::from(v[0]))),
            Samples::Values(v) => {
                if v.len() != m + 1 {
                    return Err(Error::Config(format!("{what}: {} samples for {} nodes", v.len(), m + 1)));
                }
                let mut g = GridFunction::constant(p_max, m, C::new(0.0, 0.0));
                for (dst, src) in g.values.iter_mut().zip(v) {
                    *dst = C::from(*src);
                }
                Ok(g)
            }
        }
    }
}

#[derive(Debug, Deserialize)]
struct TermInput {
    j: u32,
    k: u32,
    kernel: Samples,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IltProblem {
    p_max: Option<f64>,
    m: Option<usize>,
    t_final: f64,
    steps: usize,
    tol: f64,
    initial: Samples,
    #[serde(default)]
    terms: Vec<TermInput>,
    forcing: Option<Vec<Samples>>,
}

fn ilt_solve(prob: IltProblem, cfg: &SolverConfig) -> Out {
    let p_max = prob.p_max.unwrap_or(cfg.p_max);
    let m = prob.m.unwrap_or(cfg.m);
    if !(p_max > 0.0) || m < 16 {
        return Err(Error::Config(format!("need p_max > 0 and m ≥ 16, got {p_max} and {m}")).into());
    }
    let fi = prob.initial.grid(p_max, m, "initial")?;
    let terms = prob
        .terms
        .iter()
        .map(|t| {
            Ok(NonlinearTerm {
                j: t.j,
                k: t.k,
                kernel: t.kernel.grid(p_max, m, "kernel")?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let forcing = match &prob.forcing {
        Some(f) => Some(f.iter().map(|s| s.grid(p_max, m, "forcing")).collect::<Result<Vec<_>, _>>()?),
        None => None,
    };
    let spec = NonlinearitySpec { terms, forcing };
    let sol = picard_solve(&fi, &spec, prob.t_final, prob.steps, prob.tol, cfg)?;
    let p: Vec<f64> = (0..=m).map(|i| fi.node(i)).collect();
    to_json(&json!({
        "p": p,
        "times": sol.times,
        "values": sol.values.iter().map(|g| &g.values).collect::<Vec<_>>(),
        "diffs": sol.diffs,
        "ratios": sol.ratios,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-3:3:0.5").unwrap().len(), 13);
        assert_eq!(parse_range("0:1").unwrap(), vec![0.0, 1.0]);
        assert!(parse_range("1:0").is_err());
        assert!(parse_range("0:1:0").is_err());
    }

    #[test]
    fn numbers_and_pairs() {
        let v: Vec<Num> = serde_json::from_str("[1, [2, -3]]").unwrap();
        assert_eq!(C::from(v[1]), C::new(2.0, -3.0));
        assert!(Samples::Values(v.clone()).grid(1.0, 16, "x").is_err());
        let one = Samples::Values(v[1..].to_vec()).grid(1.0, 16, "x").unwrap();
        assert_eq!(one.values[16], C::new(2.0, -3.0));
    }
}
