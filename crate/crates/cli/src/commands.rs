use crate::args::*;
use crate::error::CliError;
use mellin_pricer::fft::{price_american_call, price_european_call, price_put, GridParams, Quote};
use mellin_pricer::greeks::{greek, GreekKind, MultiplierMode};
use mellin_pricer::oracles::{
    binomial_price, black_scholes, mc_basket_euro_put, price_direct_trapezoid, BinomialStyle, McConfig, OptionKind,
};
use mellin_pricer::reference::{DW_VALUES, FFT_VALUES, GROUPINGS, SPOTS, STRIKE, TAU, TRUE_VALUES};
use mellin_pricer::series::{dw_american_call, dw_price, DwConfig};
use mellin_pricer::{
    boundary_curve, build_grid, price_surface, BasketSpec, BoundaryAlignment, BoundaryFormula, DeltaForm,
    DividendFactor, FftConfig, PremiumConfig, QuadratureWeights, SurfaceStyle, TimeRule,
};
use serde_json::{json, Value};
use std::io::Write;

/// Rounds to 10 significant digits for printing.
pub fn sig10(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.9e}").parse().unwrap_or(x)
}

fn emit(out: &Option<std::path::PathBuf>, body: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(body).and_then(|_| so.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn grid_params(n: &NumericArgs) -> GridParams {
    let d = GridParams::default();
    GridParams {
        points: n.grid_n.unwrap_or(d.points),
        strip: n.strip_a.unwrap_or(d.strip),
        time_steps: n.grid_m.unwrap_or(d.time_steps),
        ..d
    }
}

fn premium_config(n: &NumericArgs) -> PremiumConfig {
    let formula = BoundaryFormula {
        delta: match n.delta_form {
            Some(DeltaFormArg::Unsquared) => DeltaForm::Unsquared,
            Some(DeltaFormArg::HalfVariance) => DeltaForm::HalfVariance,
            Some(DeltaFormArg::Squared) | None => DeltaForm::Squared,
        },
        dividend: match n.dividend_factor {
            Some(DividendFactorArg::Growing) => DividendFactor::Growing,
            Some(DividendFactorArg::Decaying) | None => DividendFactor::Decaying,
        },
    };
    PremiumConfig {
        time_steps: n.grid_m.unwrap_or(250),
        rule: match n.time_rule {
            Some(TimeRuleArg::Flat) => TimeRule::Flat,
            _ => TimeRule::Trapezoid,
        },
        alignment: match n.alignment {
            Some(AlignmentArg::Aligned) => BoundaryAlignment::Aligned,
            _ => BoundaryAlignment::StepAhead,
        },
        formula,
    }
}

fn fft_config(n: &NumericArgs) -> FftConfig {
    FftConfig {
        weights: match n.weights {
            Some(Weights::Simpson) => QuadratureWeights::Simpson,
            _ => QuadratureWeights::Flat,
        },
        premium: premium_config(n),
        ..FftConfig::default()
    }
}

fn dw_config(n: &NumericArgs) -> DwConfig {
    let d = DwConfig::default();
    DwConfig {
        terms: n.dw_terms.unwrap_or(d.terms),
        half_range: n.dw_l.unwrap_or(d.half_range),
        strip: n.strip_a.unwrap_or(d.strip),
        premium: premium_config(n),
    }
}

struct Market {
    spec: BasketSpec,
    spot: Vec<f64>,
    tau: f64,
}

fn market(a: &CommonArgs) -> Result<Market, CliError> {
    let strike = required(a.strike, "strike")?;
    let rate = required(a.rate, "rate")?;
    let tau = required(a.tau, "tau")?;
    if a.spot.is_empty() {
        return Err(CliError::Validation("missing required option --spot".into()));
    }
    if a.vol.is_empty() {
        return Err(CliError::Validation("missing required option --vol".into()));
    }
    let n = a.spot.len();
    let broadcast = |v: &[f64], flag: &str, default: Option<f64>| -> Result<Vec<f64>, CliError> {
        match (v.len(), default) {
            (0, Some(d)) => Ok(vec![d; n]),
            (1, _) => Ok(vec![v[0]; n]),
            (m, _) if m == n => Ok(v.to_vec()),
            (m, _) => Err(CliError::Validation(format!("--{flag} has {m} values for {n} assets"))),
        }
    };
    let div = broadcast(&a.div, "div", Some(0.0))?;
    let vol = broadcast(&a.vol, "vol", None)?;
    let corr = match &a.corr {
        Some(s) => s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::Validation(format!("--corr: cannot parse `{p}`"))))
            .collect::<Result<Vec<_>, _>>()?,
        None => (0..n * n).map(|k| if k / n == k % n { 1.0 } else { 0.0 }).collect(),
    };
    if !(tau > 0.0) {
        return Err(CliError::Validation("--tau must be positive".into()));
    }
    let spec = BasketSpec::new(strike, tau, rate, div, vol, corr)?;
    if a.spot.iter().any(|s| !(*s > 0.0)) {
        return Err(CliError::Validation("--spot must be positive".into()));
    }
    Ok(Market { spec, spot: a.spot.clone(), tau })
}

fn single(m: &Market, what: &str) -> Result<(f64, f64, f64, f64, f64), CliError> {
    if m.spec.n() != 1 {
        return Err(CliError::Validation(format!("{what} supports a single asset only")));
    }
    Ok((m.spot[0], m.spec.strike(), m.spec.rate(), m.spec.dividends()[0], m.spec.vols()[0]))
}

fn style_name(s: Style) -> &'static str {
    match s {
        Style::EuroPut => "euro-put",
        Style::EuroCall => "euro-call",
        Style::AmerPut => "amer-put",
        Style::AmerCall => "amer-call",
        Style::Premium => "premium",
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Fft => "fft",
        Method::Dw => "dw",
        Method::Trapezoid => "trapezoid",
        Method::Binomial => "binomial",
        Method::Bs => "bs",
        Method::Mc => "mc",
    }
}

fn put_style(s: Style) -> Option<SurfaceStyle> {
    match s {
        Style::EuroPut => Some(SurfaceStyle::EuropeanPut),
        Style::AmerPut => Some(SurfaceStyle::AmericanPut),
        Style::Premium => Some(SurfaceStyle::EarlyExercisePremium),
        _ => None,
    }
}

fn parity(put: f64, s: f64, k: f64, r: f64, q: f64, tau: f64) -> f64 {
    put + s * (-q * tau).exp() - k * (-r * tau).exp()
}

pub fn price(a: CommonArgs) -> Result<(), CliError> {
    let a = a.resolve()?;
    let method = required(a.method, "method")?;
    let style = required(a.style, "style")?;
    let m = market(&a)?;
    let params = grid_params(&a.numeric);
    let cfg = fft_config(&a.numeric);
    let mut diag = json!({ "imag_residual": null, "clamped_points": null, "interpolated": false });
    let unsupported = || CliError::Validation(format!("style {} is not available for method {}", style_name(style), method_name(method)));
    let value = match method {
        Method::Fft => {
            let (quote, surface): (Quote, _) = match style {
                Style::EuroCall | Style::AmerCall => {
                    let (s, k, r, q, v) = single(&m, "call pricing")?;
                    if style == Style::AmerCall {
                        price_american_call(s, k, r, q, v, m.tau, &params, &cfg)?
                    } else {
                        price_european_call(s, k, r, q, v, m.tau, &params, &cfg)?
                    }
                }
                _ => price_put(&m.spec, &m.spot, m.tau, put_style(style).ok_or_else(unsupported)?, &params, &cfg)?,
            };
            diag = json!({
                "imag_residual": surface.imag_residual,
                "clamped_points": surface.clamped,
                "interpolated": quote.interpolated,
            });
            quote.value
        }
        Method::Dw => {
            let (s, k, r, q, v) = single(&m, "the dw method")?;
            let dw = dw_config(&a.numeric);
            match style {
                Style::AmerCall => dw_american_call(s, k, r, q, v, m.tau, &dw)?,
                Style::EuroCall => parity(dw_price(s, m.tau, &m.spec, &dw, SurfaceStyle::EuropeanPut)?, s, k, r, q, m.tau),
                _ => dw_price(s, m.tau, &m.spec, &dw, put_style(style).ok_or_else(unsupported)?)?,
            }
        }
        Method::Trapezoid => match style {
            Style::AmerCall => {
                let (s, k, r, q, v) = single(&m, "call pricing")?;
                let put = BasketSpec::single(s, m.tau, q, r, v)?;
                let grid = build_grid(&params, &[k], None)?;
                price_direct_trapezoid(&put, &grid, m.tau, &[k], SurfaceStyle::AmericanPut, &cfg)?
            }
            Style::EuroCall => {
                let (s, k, r, q, _) = single(&m, "call pricing")?;
                let grid = build_grid(&params, &m.spot, None)?;
                let p = price_direct_trapezoid(&m.spec, &grid, m.tau, &m.spot, SurfaceStyle::EuropeanPut, &cfg)?;
                parity(p, s, k, r, q, m.tau)
            }
            _ => {
                let grid = build_grid(&params, &m.spot, None)?;
                price_direct_trapezoid(&m.spec, &grid, m.tau, &m.spot, put_style(style).ok_or_else(unsupported)?, &cfg)?
            }
        },
        Method::Binomial => {
            let (s, k, r, q, v) = single(&m, "the binomial method")?;
            let st = match style {
                Style::EuroPut => BinomialStyle::EuroPut,
                Style::EuroCall => BinomialStyle::EuroCall,
                Style::AmerPut => BinomialStyle::AmerPut,
                Style::AmerCall => BinomialStyle::AmerCall,
                Style::Premium => return Err(unsupported()),
            };
            binomial_price(s, k, r, q, v, m.tau, a.numeric.steps.unwrap_or(10_000), st)?
        }
        Method::Bs => {
            let (s, k, r, q, v) = single(&m, "the bs method")?;
            let kind = match style {
                Style::EuroPut => OptionKind::Put,
                Style::EuroCall => OptionKind::Call,
                _ => return Err(unsupported()),
            };
            black_scholes(s, k, r, q, v, m.tau, kind)
        }
        Method::Mc => {
            if style != Style::EuroPut {
                return Err(unsupported());
            }
            let d = McConfig::default();
            let mc = McConfig { paths: a.paths.unwrap_or(d.paths), seed: a.seed.unwrap_or(d.seed), ..d };
            let est = mc_basket_euro_put(&m.spec, &m.spot, m.tau, &mc)?;
            diag = json!({ "std_error": sig10(est.std_error) });
            est.price
        }
    };
    let body = json!({
        "method": method_name(method),
        "style": style_name(style),
        "price": sig10(value),
        "diagnostics": diag,
    });
    emit(&a.numeric.out, format!("{body}\n").as_bytes())
}

pub fn greeks(a: CommonArgs) -> Result<(), CliError> {
    let a = a.resolve()?;
    let style = a.style.unwrap_or(Style::EuroPut);
    let surface_style = match style {
        Style::EuroPut => SurfaceStyle::EuropeanPut,
        Style::AmerPut => SurfaceStyle::AmericanPut,
        _ => return Err(CliError::Validation("greeks support --style euro-put or amer-put".into())),
    };
    if let Some(m) = a.method {
        if m != Method::Fft {
            return Err(CliError::Validation("greeks are computed with --method fft".into()));
        }
    }
    let m = market(&a)?;
    let mode = match a.multipliers {
        Some(MultiplierArg::Alternate) => MultiplierMode::Alternate,
        _ => MultiplierMode::Kernel,
    };
    let grid = build_grid(&grid_params(&a.numeric), &m.spot, None)?;
    let cfg = fft_config(&a.numeric);
    let g = |k: GreekKind| -> Result<Value, CliError> {
        Ok(json!(sig10(greek(k, &m.spot, m.tau, &m.spec, &grid, surface_style, &cfg, mode)?)))
    };
    let n = m.spec.n();
    let mut out = serde_json::Map::new();
    if n == 1 {
        for k in GreekKind::single_asset() {
            out.insert(k.name().into(), g(k)?);
        }
    } else {
        let per = |f: fn(usize) -> GreekKind| -> Result<Value, CliError> { Ok(Value::Array((0..n).map(|i| g(f(i))).collect::<Result<_, _>>()?)) };
        out.insert("delta".into(), per(GreekKind::Delta1)?);
        out.insert("gamma".into(), per(GreekKind::Gamma)?);
        out.insert("theta".into(), g(GreekKind::Theta)?);
        out.insert("rho".into(), g(GreekKind::Rho)?);
        out.insert("nu".into(), per(GreekKind::Nu)?);
        out.insert("xi".into(), per(GreekKind::Xi)?);
        let mut cross = serde_json::Map::new();
        for i in 0..n {
            for j in i + 1..n {
                cross.insert(format!("{},{}", i + 1, j + 1), g(GreekKind::Delta2(i, j))?);
            }
        }
        out.insert("cross_deltas".into(), Value::Object(cross));
    }
    emit(&a.numeric.out, format!("{}\n", Value::Object(out)).as_bytes())
}

pub fn surface(a: CommonArgs) -> Result<(), CliError> {
    let a = a.resolve()?;
    let style = put_style(a.style.unwrap_or(Style::EuroPut))
        .ok_or_else(|| CliError::Validation("surface supports --style euro-put, amer-put or premium".into()))?;
    let mut a = a;
    if a.spot.is_empty() {
        if let Some(k) = a.strike {
            a.spot = vec![k; a.vol.len().max(1)];
        }
    }
    let m = market(&a)?;
    let grid = build_grid(&grid_params(&a.numeric), &m.spot, None)?;
    let s = price_surface(&m.spec, &grid, m.tau, style, &fft_config(&a.numeric))?;
    let body = match a.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            s.write_csv(&mut buf)?;
            buf
        }
        Format::Json => format!("{}\n", s.to_json()).into_bytes(),
    };
    emit(&a.numeric.out, &body)
}

pub fn boundary(a: CommonArgs) -> Result<(), CliError> {
    let mut a = a.resolve()?;
    if a.spot.is_empty() {
        a.spot = vec![1.0];
    }
    let m = market(&a)?;
    single(&m, "the boundary curve")?;
    let p = premium_config(&a.numeric);
    let curve = boundary_curve(&m.spec, p.time_steps, m.tau, p.formula)?;
    let mut buf = Vec::new();
    curve.write_csv(&mut buf)?;
    emit(&a.numeric.out, &buf)
}

pub fn table1(a: Table1Args) -> Result<(), CliError> {
    let a = a.resolve()?;
    let groups: Vec<usize> = if a.groupings.is_empty() { vec![1, 2, 3] } else { a.groupings.clone() };
    if let Some(g) = groups.iter().find(|g| !(1..=3).contains(*g)) {
        return Err(CliError::Validation(format!("--groupings: no grouping {g} (expected 1-3)")));
    }
    let params = grid_params(&a.numeric);
    let cfg = fft_config(&a.numeric);
    let dw = dw_config(&a.numeric);
    let steps = a.numeric.steps.unwrap_or(10_000);
    let mut out = String::from("grouping,S,true,fft,dw\n");
    let (mut dev_true, mut dev_fft, mut dev_dw) = (0.0f64, 0.0f64, 0.0f64);
    for &g in &groups {
        let p = GROUPINGS[g - 1];
        for (i, &s) in SPOTS.iter().enumerate() {
            let bin = binomial_price(s, STRIKE, p.rate, p.div, p.vol, TAU, steps, BinomialStyle::AmerCall)?;
            let (fft, _) = price_american_call(s, STRIKE, p.rate, p.div, p.vol, TAU, &params, &cfg)?;
            let dwv = dw_american_call(s, STRIKE, p.rate, p.div, p.vol, TAU, &dw)?;
            dev_true = dev_true.max((bin - TRUE_VALUES[g - 1][i]).abs());
            dev_fft = dev_fft.max((fft.value - FFT_VALUES[g - 1][i]).abs());
            dev_dw = dev_dw.max((dwv - DW_VALUES[g - 1][i]).abs());
            out += &format!("{g},{s},{},{},{}\n", sig10(bin), sig10(fft.value), sig10(dwv));
        }
    }
    out += &format!("max_abs_dev,,{},{},{}\n", sig10(dev_true), sig10(dev_fft), sig10(dev_dw));
    emit(&a.numeric.out, out.as_bytes())?;
    if dev_fft > 2e-3 {
        return Err(CliError::Numerical(format!("fft column deviates by {dev_fft:.3e} (limit 2e-3)")));
    }
    Ok(())
}
