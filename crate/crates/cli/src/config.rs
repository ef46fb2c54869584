//! Problem configuration: TOML schema, validation, and assembly of the
//! aggregated evidence structures and propagation settings.

use serde::Deserialize;
use thiserror::Error;

use evidprop::evidence::{dempster_combine, mix, DsStructure};
use evidprop::expr::ExprAst;
use evidprop::propagate::{Method, PropagateError, PropagationConfig};
use evidprop::Interval;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("field `{field}`: {msg}")]
    Invalid { field: String, msg: String },
}

fn invalid(field: impl Into<String>, msg: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        msg: msg.to_string(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    function: String,
    propagation: RawPropagation,
    #[serde(default)]
    variables: Vec<RawVariable>,
    #[serde(default)]
    queries: Vec<RawQuery>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPropagation {
    order: usize,
    quad_points: usize,
    subdivisions: usize,
    #[serde(default)]
    methods: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariable {
    name: String,
    aggregation: String,
    #[serde(default)]
    weights: Option<Vec<f64>>,
    sources: Vec<Vec<RawFocal>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFocal {
    interval: [f64; 2],
    mass: MassSpec,
}

/// A mass is either a plain real or a rational string like `"1/3"`.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MassSpec {
    Real(f64),
    Rational(String),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
enum RawQuery {
    Exceedance { threshold: f64 },
    Curve { from: f64, to: f64, step: f64 },
}

/// A fully validated problem, ready to run.
#[derive(Debug)]
pub struct Problem {
    pub function: ExprAst,
    pub variable_names: Vec<String>,
    pub inputs: Vec<DsStructure>,
    pub config: PropagationConfig,
    pub methods: Vec<Method>,
    pub thresholds: Vec<f64>,
    pub curves: Vec<CurveRequest>,
}

#[derive(Debug, Clone, Copy)]
pub struct CurveRequest {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

/// Command-line overrides applied on top of the file before validation.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub methods: Option<Vec<Method>>,
    pub order: Option<usize>,
    pub quad_points: Option<usize>,
    pub subdivisions: Option<usize>,
}

pub fn load(path: &std::path::Path, overrides: &Overrides) -> Result<Problem, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let raw: RawConfig = toml::from_str(&text)?;
    build(raw, overrides)
}

fn parse_method(name: &str, field: &str) -> Result<Method, ConfigError> {
    match name {
        "chaos-bernstein" => Ok(Method::ChaosBernstein),
        "interval-baseline" => Ok(Method::IntervalBaseline),
        "grid-oracle" => Ok(Method::GridOracle),
        other => Err(invalid(
            field,
            format!(
                "unknown method `{other}` (expected chaos-bernstein, interval-baseline or grid-oracle)"
            ),
        )),
    }
}

fn parse_mass(spec: &MassSpec, field: &str) -> Result<f64, ConfigError> {
    match spec {
        MassSpec::Real(value) => {
            if value.is_finite() {
                Ok(*value)
            } else {
                Err(invalid(field, "mass must be finite"))
            }
        }
        MassSpec::Rational(text) => {
            let (num, den) = text
                .split_once('/')
                .ok_or_else(|| invalid(field, format!("`{text}` is not of the form p/q")))?;
            let p: i64 = num
                .trim()
                .parse()
                .map_err(|_| invalid(field, format!("bad numerator in `{text}`")))?;
            let q: i64 = den
                .trim()
                .parse()
                .map_err(|_| invalid(field, format!("bad denominator in `{text}`")))?;
            if q == 0 {
                return Err(invalid(field, "denominator must be nonzero"));
            }
            Ok(p as f64 / q as f64)
        }
    }
}

fn build(raw: RawConfig, overrides: &Overrides) -> Result<Problem, ConfigError> {
    if raw.variables.is_empty() {
        return Err(invalid("variables", "at least one variable is required"));
    }
    let variable_names: Vec<String> = raw.variables.iter().map(|v| v.name.clone()).collect();

    let function = ExprAst::parse(&raw.function, &variable_names)
        .map_err(|e| invalid("function", e))?;

    let mut inputs = Vec::with_capacity(raw.variables.len());
    for (vi, variable) in raw.variables.iter().enumerate() {
        let var_field = format!("variables[{vi}] ({})", variable.name);
        if variable.sources.is_empty() {
            return Err(invalid(
                format!("{var_field}.sources"),
                "at least one source is required",
            ));
        }
        let mut sources = Vec::with_capacity(variable.sources.len());
        for (si, source) in variable.sources.iter().enumerate() {
            let mut elements = Vec::with_capacity(source.len());
            for (fi, focal) in source.iter().enumerate() {
                let field = format!("{var_field}.sources[{si}][{fi}]");
                let interval = Interval::new(focal.interval[0], focal.interval[1])
                    .map_err(|e| invalid(format!("{field}.interval"), e))?;
                let mass = parse_mass(&focal.mass, &format!("{field}.mass"))?;
                elements.push((interval, mass));
            }
            let ds = DsStructure::new(elements)
                .map_err(|e| invalid(format!("{var_field}.sources[{si}]"), e))?;
            sources.push(ds);
        }
        let aggregated = match variable.aggregation.as_str() {
            "mixing" => {
                let weights = match &variable.weights {
                    Some(w) => {
                        if w.len() != sources.len() {
                            return Err(invalid(
                                format!("{var_field}.weights"),
                                format!("{} weights for {} sources", w.len(), sources.len()),
                            ));
                        }
                        w.clone()
                    }
                    None => vec![1.0; sources.len()],
                };
                mix(&sources, &weights)
                    .map_err(|e| invalid(format!("{var_field}.sources"), e))?
            }
            "dempster" => {
                if variable.weights.is_some() {
                    return Err(invalid(
                        format!("{var_field}.weights"),
                        "weights only apply to the mixing rule",
                    ));
                }
                let mut iter = sources.into_iter();
                let first = iter.next().expect("sources checked non-empty");
                iter.try_fold(first, |acc, next| dempster_combine(&acc, &next))
                    .map_err(|e| invalid(format!("{var_field}.sources"), e))?
            }
            other => {
                return Err(invalid(
                    format!("{var_field}.aggregation"),
                    format!("unknown rule `{other}` (expected mixing or dempster)"),
                ))
            }
        };
        inputs.push(aggregated);
    }

    let order = overrides.order.unwrap_or(raw.propagation.order);
    let quad_points = overrides.quad_points.unwrap_or(raw.propagation.quad_points);
    let subdivisions = overrides
        .subdivisions
        .unwrap_or(raw.propagation.subdivisions);
    let config = PropagationConfig::new(order, quad_points, subdivisions, Method::ChaosBernstein)
        .map_err(|e| match e {
            PropagateError::InvalidConfig { msg } => invalid("propagation", msg),
            other => invalid("propagation", other),
        })?;

    let methods = match &overrides.methods {
        Some(methods) => methods.clone(),
        None => match &raw.propagation.methods {
            Some(names) => {
                if names.is_empty() {
                    return Err(invalid("propagation.methods", "must not be empty"));
                }
                let mut methods = Vec::with_capacity(names.len());
                for name in names {
                    let method = parse_method(name, "propagation.methods")?;
                    if !methods.contains(&method) {
                        methods.push(method);
                    }
                }
                methods
            }
            None => vec![
                Method::ChaosBernstein,
                Method::IntervalBaseline,
                Method::GridOracle,
            ],
        },
    };

    let mut thresholds = Vec::new();
    let mut curves = Vec::new();
    for (qi, query) in raw.queries.iter().enumerate() {
        match query {
            RawQuery::Exceedance { threshold } => {
                if !threshold.is_finite() {
                    return Err(invalid(
                        format!("queries[{qi}].threshold"),
                        "must be finite",
                    ));
                }
                thresholds.push(*threshold);
            }
            RawQuery::Curve { from, to, step } => {
                if !(from.is_finite() && to.is_finite() && from <= to) {
                    return Err(invalid(
                        format!("queries[{qi}]"),
                        "curve range must be finite with from <= to",
                    ));
                }
                if !(step.is_finite() && *step > 0.0) {
                    return Err(invalid(
                        format!("queries[{qi}].step"),
                        "must be positive",
                    ));
                }
                curves.push(CurveRequest {
                    from: *from,
                    to: *to,
                    step: *step,
                });
            }
        }
    }

    Ok(Problem {
        function,
        variable_names,
        inputs,
        config,
        methods,
        thresholds,
        curves,
    })
}
