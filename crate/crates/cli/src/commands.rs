//! One runner per command, each producing a [`Table`].

use std::f64::consts::PI;

use opens_boson::{build_m_boson, cn_closed_form, cn_numeric, renyi_entropy_base, renyi_ratio_and_mie, time_chi, Regularization, TimeParams};
use opens_core::{Error, Geometry, Result};
use opens_lattice::{LatticeModel, LatticeState, Route as LatticeRoute, SubsystemLayout};
use opens_operator::{
    averaged_purity, averaged_purity_uv_finite, build_m_operator, mie_general, overlap_generating, uv_finite_overlap_ratio, OperatorSpec,
    QuadratureConfig,
};
use rayon::prelude::*;

use crate::args::{Command, CompareArg, GeomArgs, LatticeArgs, OperatorArgs, QuadArgs, RescalingArg, RouteArg};
use crate::checks::{ed_comparison, uv_check};
use crate::figures::{cn_series, holevo_panel, hopping_comparison, ising_comparison, largest_decade};
use crate::output::{list_cell, Cell, Route, Table};

/// Geometry used when none of `--L`, `--a`, `--b`, `--d`, `--l2` is given.
#[derive(Debug, Clone, Copy)]
struct GeomDefaults {
    l: f64,
    a: f64,
    b: f64,
    eps: f64,
}

const BOSON: GeomDefaults = GeomDefaults { l: 10.0, a: 20.0, b: 120.0, eps: 0.5 };
const OPERATOR: GeomDefaults = GeomDefaults { l: 1.0, a: 2.0, b: 5.0, eps: 0.1 };

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

impl GeomArgs {
    /// Every `(L, a, b)` of the sweep, plus ε.
    fn resolve(&self, def: GeomDefaults) -> Result<(Vec<(f64, f64, f64)>, f64)> {
        let l = self.l.unwrap_or(def.l);
        let a = match (self.a, self.d) {
            (Some(_), Some(_)) => return Err(invalid("give either --a or --d")),
            (Some(a), None) => a,
            (None, Some(d)) => l + d,
            (None, None) if self.l.is_some() => l + (def.a - def.l),
            (None, None) => def.a,
        };
        let bs: Vec<f64> = match (self.b, &self.l2) {
            (Some(_), Some(_)) => return Err(invalid("give either --b or --l2")),
            (Some(b), None) => vec![b],
            (None, Some(g)) => g.values().iter().map(|l2| a + l2).collect(),
            (None, None) => vec![a + (def.b - def.a)],
        };
        Ok((bs.into_iter().map(|b| (l, a, b)).collect(), self.eps.unwrap_or(def.eps)))
    }

    fn single(&self, def: GeomDefaults) -> Result<Geometry> {
        let (pts, eps) = self.resolve(def)?;
        if pts.len() != 1 {
            return Err(invalid("this command takes a single geometry"));
        }
        let (l, a, b) = pts[0];
        Geometry::new(l, a, b, eps, 1)
    }
}

impl QuadArgs {
    fn config(&self) -> Result<QuadratureConfig> {
        let mut c = QuadratureConfig::default().with_eps(self.eps_reg).with_tolerance(self.tol, self.tol);
        if self.no_subtraction {
            c = c.without_subtraction();
        }
        c.validate()?;
        Ok(c)
    }
}

/// `scalar:h`, `vector:h` or `boson:K`.
pub fn parse_spec(s: &str) -> Result<OperatorSpec> {
    let (kind, value) = s.split_once(':').ok_or_else(|| invalid(format!("spec '{s}' must read kind:value")))?;
    let v: f64 = value.trim().parse().map_err(|e| invalid(format!("spec '{s}': {e}")))?;
    match kind.trim() {
        "scalar" => OperatorSpec::scalar(v),
        "vector" => OperatorSpec::vector(v),
        "boson" => OperatorSpec::boson_charge(v),
        other => Err(invalid(format!("unknown operator kind '{other}'"))),
    }
}

fn integers(g: &crate::grid::Grid) -> Result<Vec<usize>> {
    g.integers().map_err(Error::InvalidInput)
}

fn geom_cells(l: f64, a: f64, b: f64, eps: f64) -> Vec<Cell> {
    vec![l.into(), a.into(), b.into(), eps.into()]
}

const GEOM: [&str; 4] = ["L", "a", "b", "eps"];

fn with_geom(extra: &[&'static str]) -> Vec<&'static str> {
    GEOM.iter().chain(extra).copied().collect()
}

/// Run a command; an `Err` means the arguments could not be interpreted at all.
pub fn run_command(cmd: &Command) -> Result<Table> {
    let mut table = match cmd {
        Command::BosonMoments { geom, k, gamma } => boson_moments(geom, *k, gamma.values())?,
        Command::BosonMie { geom, n } => boson_mie(geom, &integers(n)?)?,
        Command::BosonHolevo { geom, nmax } => boson_holevo(geom, *nmax)?,
        Command::BosonTime { geom, t, eps_prime, nmax } => boson_time(geom, t.values(), *eps_prime, *nmax)?,
        Command::CnTable { op, n } => cn_table(op, &integers(n)?)?,
        Command::OperatorM { op, n } => operator_m(op, &integers(n)?)?,
        Command::OperatorMie { op, n } => operator_mie(op, &integers(n)?)?,
        Command::Overlap { op, gamma1, gamma2 } => overlap(op, gamma1.values(), gamma2.values())?,
        Command::AveragedPurity { op, gamma } => purity(op, gamma.values())?,
        Command::UvCheck { specs, geom, quad, gamma1, gamma2, gamma, gamma_raw } => {
            uv(specs, geom, quad, (*gamma1, *gamma2), *gamma, *gamma_raw)?
        }
        Command::LatticeMoments { lat, l2, gamma, route, sites, compare, eps, rescaling, quad } => {
            lattice_moments(lat, &integers(l2)?, gamma.values(), *route, *sites, *compare, *eps, *rescaling, quad)?
        }
        Command::LatticeOverlap { lat, l2, n, sites } => lattice_overlap(lat, *l2, *n, *sites)?,
        Command::EdVerify { model, sites, l1, d, l2, n, gamma, tol } => {
            ed_verify(model, *sites, SubsystemLayout::new(*l1, *d, *l2)?, &integers(n)?, gamma.values(), *tol)?
        }
    };
    table.set_config(cmd.echo());
    Ok(table)
}

fn boson_moments(geom: &GeomArgs, k: f64, gammas: &[f64]) -> Result<Table> {
    let (pts, eps) = geom.resolve(BOSON)?;
    let p = opens_boson::BosonParams::new(k)?;
    let mut t = Table::new("boson-moments", &with_geom(&["K", "n", "gamma"]), &[("log_ratio", Route::BosonClosedForm), ("ratio", Route::BosonClosedForm)]);
    let rows: Vec<Result<Vec<Cell>>> = pts
        .par_iter()
        .map(|&(l, a, b)| {
            let g = Geometry::new(l, a, b, eps, gammas.len())?;
            let log = -p.k() * build_m_boson(&g)?.quadratic_form(gammas)? / (8.0 * PI * PI);
            Ok(vec![log.into(), log.exp().into()])
        })
        .collect();
    for (&(l, a, b), r) in pts.iter().zip(rows) {
        let mut params = geom_cells(l, a, b, eps);
        params.extend([k.into(), gammas.len().into(), list_cell(gammas)]);
        t.push(params, r);
    }
    Ok(t)
}

fn boson_mie(geom: &GeomArgs, ns: &[usize]) -> Result<Table> {
    let (pts, eps) = geom.resolve(BOSON)?;
    let mut t = Table::new(
        "boson-mie",
        &with_geom(&["n"]),
        &[("log_ratio", Route::BosonClosedForm), ("renyi_ratio", Route::BosonClosedForm), ("correction", Route::BosonClosedForm), ("renyi_base", Route::BosonClosedForm)],
    );
    t.diagnostic("renyi_base", "(n+1)/(6n) log(L/eps) with the non-universal constant set to zero");
    let jobs: Vec<(f64, f64, f64, usize)> = pts.iter().flat_map(|&(l, a, b)| ns.iter().map(move |&n| (l, a, b, n))).collect();
    let rows: Vec<Result<Vec<Cell>>> = jobs
        .par_iter()
        .map(|&(l, a, b, n)| {
            let g = Geometry::new(l, a, b, eps, 1)?;
            let r = renyi_ratio_and_mie(&g, n)?;
            Ok(vec![r.log_ratio.into(), r.ratio.into(), r.correction.into(), renyi_entropy_base(&g, n).into()])
        })
        .collect();
    for (&(l, a, b, n), r) in jobs.iter().zip(rows) {
        let mut params = geom_cells(l, a, b, eps);
        params.push(n.into());
        t.push(params, r);
    }
    Ok(t)
}

fn boson_holevo(geom: &GeomArgs, nmax: usize) -> Result<Table> {
    let (pts, eps) = geom.resolve(BOSON)?;
    let mut t = Table::new(
        "boson-holevo",
        &with_geom(&["ell2", "nmax"]),
        &[
            ("chi_numeric", Route::BosonClosedForm),
            ("chi_error", Route::BosonClosedForm),
            ("chi_approx", Route::BosonClosedForm),
            ("chi_approx_printed", Route::BosonClosedForm),
        ],
    );
    t.diagnostic("continuation", format!("AAA rational fit of n = 2..={nmax} to n = 1, leave-one-out error"));
    t.diagnostic("chi_approx", "x S'(x/2)/(4 Lambda); chi_approx_printed is the uncorrected form, -2 chi_approx");
    let rows: Vec<Result<Vec<Cell>>> = pts
        .par_iter()
        .map(|&(l, a, b)| {
            let p = holevo_panel(l, a - l, &[b - a], eps, nmax)?[0];
            Ok(vec![p.chi.into(), p.error_estimate.into(), p.approx.into(), p.approx_printed.into()])
        })
        .collect();
    for (&(l, a, b), r) in pts.iter().zip(rows) {
        let mut params = geom_cells(l, a, b, eps);
        params.extend([(b - a).into(), nmax.into()]);
        t.push(params, r);
    }
    Ok(t)
}

fn boson_time(geom: &GeomArgs, ts: &[f64], eps_prime: f64, nmax: usize) -> Result<Table> {
    let g = geom.single(BOSON)?;
    let mut t = Table::new(
        "boson-time",
        &with_geom(&["eps_prime", "t"]),
        &[("chi", Route::BosonClosedForm), ("imag_residual", Route::BosonClosedForm), ("chi_error", Route::BosonClosedForm)],
    );
    let rows: Vec<Result<(f64, f64, f64)>> = ts
        .par_iter()
        .map(|&time| {
            let c = time_chi(&g, &TimeParams::new(time, eps_prime)?, nmax)?;
            Ok((c.value, c.imag_residual, c.error_estimate))
        })
        .collect();
    let mut logs = Vec::new();
    for (&time, r) in ts.iter().zip(rows) {
        if let Ok((v, _, _)) = r {
            if v > 0.0 && time > 0.0 {
                logs.push((time.ln(), v.ln()));
            }
        }
        let mut params = geom_cells(g.l(), g.a(), g.b(), g.eps());
        params.extend([eps_prime.into(), time.into()]);
        t.push(params, r.map(|(v, i, e)| vec![v.into(), i.into(), e.into()]));
    }
    if logs.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = logs.into_iter().unzip();
        let f = opens_core::fit::line_fit(&x, &y)?;
        t.diagnostic("loglog_slope", f.coefficients[1]);
        t.diagnostic("loglog_rms", f.rms());
    }
    Ok(t)
}

fn cn_table(op: &OperatorArgs, ns: &[usize]) -> Result<Table> {
    let geom = op.geom.single(OPERATOR)?;
    let boson = op.spec.trim().starts_with("boson");
    let route = if boson { Route::BosonClosedForm } else { Route::OperatorQuadrature };
    let mut t = Table::new("cn-table", &with_geom(&["spec", "n"]), &[("c_n", route), ("fit_residual", route)]);
    let cn: Result<(Vec<f64>, opens_core::fit::LinearFit)> = if boson {
        // the closed form n/(4Λ) is exactly linear; the numeric value carries the cutoff corrections
        let k = parse_spec(&op.spec).map(|s| match s {
            OperatorSpec::BosonCharge { k } => k,
            _ => 1.0,
        })?;
        ns.iter()
            .map(|&n| Ok(cn_numeric(&geom.with_n(n)?, Regularization::ExactDifference)? * 4.0 * PI * PI / k))
            .collect::<Result<Vec<_>>>()
            .and_then(|cn| {
                let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
                let fit = opens_core::fit::line_fit(&x, &cn)?;
                t.diagnostic("closed_form_n2", cn_closed_form(&geom.with_n(2)?)? * 4.0 * PI * PI / k);
                Ok((cn, fit))
            })
    } else {
        cn_series(&geom, &parse_spec(&op.spec)?, ns, &op.quad.config()?)
    };
    match cn {
        Ok((cn, fit)) => {
            t.diagnostic("line_intercept", fit.coefficients[0]);
            t.diagnostic("line_slope", fit.coefficients[1]);
            t.diagnostic("line_max_residual", fit.max_abs());
            for ((&n, c), r) in ns.iter().zip(&cn).zip(&fit.residuals) {
                let mut params = geom_cells(geom.l(), geom.a(), geom.b(), geom.eps());
                params.extend([op.spec.as_str().into(), n.into()]);
                t.push(params, Ok(vec![(*c).into(), (*r).into()]));
            }
        }
        Err(e) => {
            let mut params = geom_cells(geom.l(), geom.a(), geom.b(), geom.eps());
            params.extend([op.spec.as_str().into(), Cell::Text(String::new())]);
            t.push(params, Err(e));
        }
    }
    Ok(t)
}

fn operator_m(op: &OperatorArgs, ns: &[usize]) -> Result<Table> {
    let geom = op.geom.single(OPERATOR)?;
    let spec = parse_spec(&op.spec)?;
    let cfg = op.quad.config()?;
    let mut t = Table::new("operator-m", &with_geom(&["spec", "n", "j", "k"]), &[("m_re", Route::OperatorQuadrature), ("m_im", Route::OperatorQuadrature)]);
    let mats: Vec<Result<opens_core::DenseMatrix>> = ns.par_iter().map(|&n| build_m_operator(&geom.with_n(n)?, &spec, &cfg)).collect();
    for (&n, m) in ns.iter().zip(mats) {
        let params = |j: usize, k: usize| {
            let mut p = geom_cells(geom.l(), geom.a(), geom.b(), geom.eps());
            p.extend([op.spec.as_str().into(), n.into(), j.into(), k.into()]);
            p
        };
        match m {
            Ok(m) => {
                for j in 0..n {
                    for k in 0..n {
                        t.push(params(j, k), Ok(vec![m[(j, k)].re.into(), m[(j, k)].im.into()]));
                    }
                }
            }
            Err(e) => t.push(params(0, 0), Err(e)),
        }
    }
    Ok(t)
}

fn operator_mie(op: &OperatorArgs, ns: &[usize]) -> Result<Table> {
    let geom = op.geom.single(OPERATOR)?;
    let spec = parse_spec(&op.spec)?;
    let cfg = op.quad.config()?;
    let cols = ["base", "log_det_term", "q_term", "q_term_printed", "c_n", "c_1", "correction", "total", "total_printed"];
    let values: Vec<(&str, Route)> = cols.iter().map(|c| (*c, Route::OperatorQuadrature)).collect();
    let mut t = Table::new("operator-mie", &with_geom(&["spec", "n"]), &values);
    t.diagnostic("q_term", "<q^2> = M_11; q_term_printed uses (2 pi C_1^3 M_11)^(-1/2)");
    let rows: Vec<Result<Vec<Cell>>> = ns
        .par_iter()
        .map(|&n| {
            let r = mie_general(&geom, &spec, n, &cfg)?;
            Ok([r.base, r.log_det_term, r.q_term, r.q_term_printed, r.c_n, r.c_1, r.correction(), r.total(), r.total_printed()]
                .into_iter()
                .map(Cell::from)
                .collect())
        })
        .collect();
    for (&n, r) in ns.iter().zip(rows) {
        let mut params = geom_cells(geom.l(), geom.a(), geom.b(), geom.eps());
        params.extend([op.spec.as_str().into(), n.into()]);
        t.push(params, r);
    }
    Ok(t)
}

fn overlap(op: &OperatorArgs, g1s: &[f64], g2s: &[f64]) -> Result<Table> {
    let geom = op.geom.single(OPERATOR)?;
    let spec = parse_spec(&op.spec)?;
    let cfg = op.quad.config()?;
    let mut t = Table::new(
        "overlap",
        &with_geom(&["spec", "gamma1", "gamma2"]),
        &[("overlap", Route::OperatorQuadrature), ("uv_finite_ratio", Route::OperatorQuadrature)],
    );
    let pairs: Vec<(f64, f64)> = g1s.iter().flat_map(|&a| g2s.iter().map(move |&b| (a, b))).collect();
    let rows: Vec<Result<Vec<Cell>>> = pairs
        .par_iter()
        .map(|&(a, b)| Ok(vec![overlap_generating(&geom, &spec, a, b, &cfg)?.into(), uv_finite_overlap_ratio(&geom, &spec, a, b, &cfg)?.into()]))
        .collect();
    for (&(a, b), r) in pairs.iter().zip(rows) {
        let mut params = geom_cells(geom.l(), geom.a(), geom.b(), geom.eps());
        params.extend([op.spec.as_str().into(), a.into(), b.into()]);
        t.push(params, r);
    }
    Ok(t)
}

fn purity(op: &OperatorArgs, gammas: &[f64]) -> Result<Table> {
    let geom = op.geom.single(OPERATOR)?;
    let spec = parse_spec(&op.spec)?;
    let cfg = op.quad.config()?;
    let mut t = Table::new(
        "averaged-purity",
        &with_geom(&["spec", "gamma"]),
        &[
            ("value", Route::OperatorQuadrature),
            ("prefactor", Route::OperatorQuadrature),
            ("value_printed", Route::OperatorQuadrature),
            ("uv_finite", Route::OperatorQuadrature),
        ],
    );
    t.diagnostic("value", "exponent -gamma^2 (M_11 + M_12)/4; value_printed uses M_11 - M_12");
    let rows: Vec<Result<Vec<Cell>>> = gammas
        .par_iter()
        .map(|&g| {
            let p = averaged_purity(&geom, &spec, g, &cfg)?;
            Ok(vec![p.value.into(), p.prefactor.into(), p.value_printed.into(), averaged_purity_uv_finite(&geom, &spec, g, &cfg)?.into()])
        })
        .collect();
    for (&g, r) in gammas.iter().zip(rows) {
        let mut params = geom_cells(geom.l(), geom.a(), geom.b(), geom.eps());
        params.extend([op.spec.as_str().into(), g.into()]);
        t.push(params, r);
    }
    Ok(t)
}

fn uv(specs: &str, geom: &GeomArgs, quad: &QuadArgs, pair: (f64, f64), gamma: f64, gamma_raw: f64) -> Result<Table> {
    let g = geom.single(OPERATOR)?;
    let cfg = quad.config()?;
    let names: Vec<&str> = specs.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err(invalid("no specs given"));
    }
    let mut t = Table::new(
        "uv-check",
        &with_geom(&["spec", "quantity", "expect"]),
        &[("at_eps_reg", Route::OperatorQuadrature), ("at_half_eps_reg", Route::OperatorQuadrature), ("relative_change", Route::OperatorQuadrature)],
    );
    let results: Vec<Result<Vec<crate::checks::UvRow>>> = names.par_iter().map(|s| uv_check(&g, &parse_spec(s)?, &cfg, pair, gamma, gamma_raw)).collect();
    for (name, r) in names.iter().zip(results) {
        let params = |q: &str, expect: &str| {
            let mut p = geom_cells(g.l(), g.a(), g.b(), g.eps());
            p.extend([(*name).into(), q.into(), expect.into()]);
            p
        };
        match r {
            Ok(rows) => {
                for row in rows {
                    let expect = if row.finite { "below 0.01" } else { "above 0.1" };
                    let pass = row.pass();
                    t.push_checked(params(row.quantity, expect), vec![row.at_eps.into(), row.at_half.into(), row.change().into()], pass);
                }
            }
            Err(e) => t.push(params("", ""), Err(e)),
        }
    }
    Ok(t)
}

fn lattice_state(model: &LatticeModel, layout: SubsystemLayout, sites: Option<usize>, route: RouteArg) -> Result<LatticeState> {
    let st = match sites {
        None => LatticeState::infinite(model, layout)?,
        Some(n) => {
            if n < layout.window() {
                return Err(invalid(format!("{n} sites cannot hold a window of {}", layout.window())));
            }
            LatticeState::finite_chain(model, layout, n, (n - layout.window()) / 2)?
        }
    };
    match route {
        RouteArg::Auto => Ok(st),
        RouteArg::U1 => st.with_route(LatticeRoute::U1),
        RouteArg::Nambu => st.with_route(LatticeRoute::Nambu),
        RouteArg::NambuRe => st.with_route(LatticeRoute::NambuRealPart),
    }
}

#[allow(clippy::too_many_arguments)]
fn lattice_moments(
    lat: &LatticeArgs,
    l2s: &[usize],
    gammas: &[f64],
    route: RouteArg,
    sites: Option<usize>,
    compare: CompareArg,
    eps: f64,
    rescaling: RescalingArg,
    quad: &QuadArgs,
) -> Result<Table> {
    let model = LatticeModel::parse(&lat.model)?;
    if compare == CompareArg::Cft {
        if sites.is_some() || route != RouteArg::Auto {
            return Err(invalid("--compare cft uses the infinite chain on its default route"));
        }
        return match model.preset() {
            Some(opens_lattice::Preset::TightBinding) => hopping_table(lat, l2s, gammas, eps),
            Some(opens_lattice::Preset::CriticalIsing) => ising_table(lat, l2s, gammas, rescaling, quad),
            None => Err(invalid("--compare cft needs the xx or ising preset")),
        };
    }
    let mut t = Table::new(
        "lattice-moments",
        &["model", "l1", "d", "l2", "n", "gamma"],
        &[("re_log_ratio", Route::Lattice), ("im_log_ratio", Route::Lattice)],
    );
    let rows: Vec<Result<(Vec<Cell>, &'static str)>> = l2s
        .par_iter()
        .map(|&l2| {
            let st = lattice_state(&model, SubsystemLayout::new(lat.l1, lat.d, l2)?, sites, route)?;
            let z = st.log_charged_moment(gammas)?;
            Ok((vec![z.re.into(), z.im.into()], st.route().tag()))
        })
        .collect();
    let mut routes = Vec::new();
    for (&l2, r) in l2s.iter().zip(rows) {
        let params = vec![lat.model.as_str().into(), lat.l1.into(), lat.d.into(), l2.into(), gammas.len().into(), list_cell(gammas)];
        t.push(params, r.map(|(v, tag)| {
            routes.push(tag);
            v
        }));
    }
    routes.dedup();
    t.diagnostic("determinant_route", routes.join(","));
    Ok(t)
}

fn hopping_table(lat: &LatticeArgs, l2s: &[usize], gammas: &[f64], eps: f64) -> Result<Table> {
    let mut t = Table::new(
        "lattice-moments",
        &["model", "l1", "d", "l2", "n", "gamma"],
        &[
            ("re_log_ratio", Route::Lattice),
            ("cft", Route::BosonClosedForm),
            ("fitted_constant", Route::BosonClosedForm),
            ("residual", Route::Lattice),
        ],
    );
    t.diagnostic("cft", format!("-gamma^T M gamma/(8 pi^2) of the K = 1 boson, eps = {eps}"));
    match hopping_comparison(lat.l1, lat.d, gammas, l2s, eps) {
        Ok(c) => {
            let mask = largest_decade(l2s);
            let used: Vec<String> = l2s.iter().zip(&mask).filter(|(_, m)| **m).map(|(l, _)| l.to_string()).collect();
            t.diagnostic("constant_fit_points", format!("l2 >= {}", used.first().cloned().unwrap_or_default()));
            t.diagnostic("constant", c.constant);
            t.diagnostic("rms", c.rms);
            t.diagnostic("max_abs_residual", c.max_abs);
            for p in &c.points {
                let params = vec![lat.model.as_str().into(), lat.l1.into(), lat.d.into(), p.ell2.into(), gammas.len().into(), list_cell(gammas)];
                let resid = p.lattice.re - p.cft - c.constant;
                t.push(params, Ok(vec![p.lattice.re.into(), p.cft.into(), c.constant.into(), resid.into()]));
            }
        }
        Err(e) => {
            let params = vec![lat.model.as_str().into(), lat.l1.into(), lat.d.into(), Cell::Text(String::new()), gammas.len().into(), list_cell(gammas)];
            t.push(params, Err(e));
        }
    }
    Ok(t)
}

fn ising_table(lat: &LatticeArgs, l2s: &[usize], gammas: &[f64], rescaling: RescalingArg, quad: &QuadArgs) -> Result<Table> {
    if gammas.len() != 2 || gammas[0] != gammas[1] {
        return Err(invalid("the Ising comparison takes two equal fluxes, e.g. --gamma 0.5,0.5"));
    }
    let mut t = Table::new(
        "lattice-moments",
        &["model", "l1", "d", "l2", "n", "gamma"],
        &[
            ("re_log_ratio", Route::Lattice),
            ("m_sum", Route::OperatorQuadrature),
            ("fit", Route::OperatorQuadrature),
            ("residual", Route::Lattice),
        ],
    );
    t.diagnostic("model", "A l2 + c + kappa (-gamma_eff^2/2) sum_ij M_ij, h_s = 1 scalar on two replicas without the pi l2/eps terms");
    match ising_comparison(lat.l1, lat.d, gammas[0], l2s, &quad.config()?) {
        Ok(c) => {
            let chosen = match rescaling {
                RescalingArg::OverPi => &c.rescaled,
                RescalingArg::Plain => &c.rescaled_plain,
            };
            for (name, f) in [("over_pi", &c.rescaled), ("plain", &c.rescaled_plain), ("quadratic", &c.quadratic)] {
                t.diagnostic(&format!("{name}.gamma_eff"), f.gamma_eff);
                t.diagnostic(&format!("{name}.kappa"), f.kappa);
                t.diagnostic(&format!("{name}.linear"), f.linear);
                t.diagnostic(&format!("{name}.constant"), f.constant);
                t.diagnostic(&format!("{name}.rms"), f.fit.rms());
            }
            for (p, r) in c.points.iter().zip(&chosen.fit.residuals) {
                let params = vec![lat.model.as_str().into(), lat.l1.into(), lat.d.into(), p.ell2.into(), 2usize.into(), list_cell(gammas)];
                t.push(params, Ok(vec![p.lattice_re.into(), p.m_sum.into(), (p.lattice_re - r).into(), (*r).into()]));
            }
        }
        Err(e) => {
            let params = vec![lat.model.as_str().into(), lat.l1.into(), lat.d.into(), Cell::Text(String::new()), 2usize.into(), list_cell(gammas)];
            t.push(params, Err(e));
        }
    }
    Ok(t)
}

fn lattice_overlap(lat: &LatticeArgs, l2: usize, n: usize, sites: Option<usize>) -> Result<Table> {
    let model = LatticeModel::parse(&lat.model)?;
    let mut t = Table::new(
        "lattice-overlap",
        &["model", "l1", "d", "l2", "q1", "q2"],
        &[("p_q1", Route::Lattice), ("p_q2", Route::Lattice), ("overlap", Route::Lattice)],
    );
    let params = |q1: Cell, q2: Cell| vec![lat.model.as_str().into(), lat.l1.into(), lat.d.into(), l2.into(), q1, q2];
    let computed = (|| {
        let st = lattice_state(&model, SubsystemLayout::new(lat.l1, lat.d, l2)?, sites, RouteArg::Auto)?;
        Ok::<_, Error>((st.charge_probabilities()?, st.overlap_matrix_unnormalized()?, st.measurement_averaged_entropy(n)))
    })();
    match computed {
        Ok((p, m, ent)) => {
            t.diagnostic("sum_p", p.iter().sum::<f64>());
            match ent {
                Ok(e) => {
                    t.diagnostic(&format!("renyi{n}.unresolved"), e.unresolved);
                    t.diagnostic(&format!("renyi{n}.average"), e.average);
                    t.diagnostic(&format!("renyi{n}.reduction"), e.reduction());
                }
                Err(e) => t.diagnostic(&format!("renyi{n}"), format!("error: {e}")),
            }
            for q1 in 0..p.len() {
                for q2 in 0..p.len() {
                    let r = sector_overlap(m[(q1, q2)], p[q1], p[q2], q1, q2);
                    t.push(params(q1.into(), q2.into()), r.map(|r| vec![p[q1].into(), p[q2].into(), r.into()]));
                }
            }
        }
        Err(e) => t.push(params(Cell::Text(String::new()), Cell::Text(String::new())), Err(e)),
    }
    Ok(t)
}

fn sector_overlap(t: f64, p1: f64, p2: f64, q1: usize, q2: usize) -> Result<f64> {
    let floor = opens_lattice::SECTOR_FLOOR;
    if p1 < floor || p2 < floor {
        return Err(Error::Domain(format!("charge sectors ({q1}, {q2}) have vanishing probability")));
    }
    Ok(t / (p1 * p2))
}

fn ed_verify(model: &str, sites: usize, layout: SubsystemLayout, ns: &[usize], gammas: &[f64], tol: f64) -> Result<Table> {
    let m = LatticeModel::parse(model)?;
    if sites < layout.window() {
        return Err(invalid(format!("{sites} sites cannot hold a window of {}", layout.window())));
    }
    let offset = (sites - layout.window()) / 2;
    let mut t = Table::new(
        "ed-verify",
        &["model", "sites", "l1", "d", "l2", "quantity", "label"],
        &[
            ("gaussian_re", Route::Lattice),
            ("gaussian_im", Route::Lattice),
            ("ed_re", Route::EdOracle),
            ("ed_im", Route::EdOracle),
            ("abs_difference", Route::Lattice),
        ],
    );
    let base = |q: &str, label: String| -> Vec<Cell> {
        vec![model.into(), sites.into(), layout.ell1.into(), layout.d.into(), layout.ell2.into(), q.into(), label.into()]
    };
    t.diagnostic("tolerance", tol);
    t.diagnostic("replica_fluxes", "gamma_j = gamma (j+1)/n");
    match ed_comparison(&m, layout, sites, offset, ns, gammas) {
        Ok(rows) => {
            let worst = rows.iter().map(|r| r.error()).fold(0.0, f64::max);
            t.diagnostic("max_abs_difference", worst);
            for r in rows {
                let pass = r.error() <= tol;
                let v = vec![r.gaussian.re.into(), r.gaussian.im.into(), r.ed.re.into(), r.ed.im.into(), r.error().into()];
                t.push_checked(base(r.quantity, r.label.clone()), v, pass);
            }
        }
        Err(e) => t.push(base("", String::new()), Err(e)),
    }
    Ok(t)
}
