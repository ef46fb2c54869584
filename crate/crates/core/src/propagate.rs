//! End-to-end mapping of Dempster-Shafer structures through a scalar
//! function: per-box range bounding, Cartesian mass assignment, and
//! cross-method comparison.
//!
//! Product boxes are visited first-input-fastest, giving the 1-based
//! `box_id = 3(j-1) + i` layout for a two-input problem with three focal
//! elements in the first input. Processing is serial and ordered, so
//! results are bit-identical across runs.

use std::fmt;

use thiserror::Error;

use crate::bernstein::{self, BernsteinError};
use crate::chaos;
use crate::evidence::{DsStructure, EvidenceError};
use crate::expr::ExprAst;
use crate::interval::{DomainError, Interval};
use crate::multi_index::lattice_range_iter;

/// Lattice resolution of the grid oracle (points per non-degenerate axis).
pub const ORACLE_GRID: usize = 101;
/// Coordinate-descent passes of the grid oracle; the step halves each pass.
pub const ORACLE_REFINE_ITERS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ChaosBernstein,
    IntervalBaseline,
    GridOracle,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ChaosBernstein => "chaos-bernstein",
            Method::IntervalBaseline => "interval-baseline",
            Method::GridOracle => "grid-oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagateError {
    #[error("invalid propagation config: {msg}")]
    InvalidConfig { msg: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Bernstein(#[from] BernsteinError),
    #[error(transparent)]
    Evidence(#[from] EvidenceError),
    #[error("box {box_id}: {source}")]
    BoxDomain { box_id: usize, source: DomainError },
    #[error("box {box_id}: {source}")]
    BoxBernstein {
        box_id: usize,
        source: BernsteinError,
    },
}

impl PropagateError {
    fn with_box_id(self, box_id: usize) -> Self {
        match self {
            PropagateError::Domain(source) => PropagateError::BoxDomain { box_id, source },
            PropagateError::Bernstein(source) => PropagateError::BoxBernstein { box_id, source },
            other => other,
        }
    }
}

/// Parameters of a propagation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    order: usize,
    quad_points: usize,
    subdivisions: usize,
    method: Method,
}

impl PropagationConfig {
    pub fn new(
        order: usize,
        quad_points: usize,
        subdivisions: usize,
        method: Method,
    ) -> Result<Self, PropagateError> {
        if order < 1 {
            return Err(PropagateError::InvalidConfig {
                msg: "order must be at least 1".to_string(),
            });
        }
        if quad_points < order + 1 {
            return Err(PropagateError::InvalidConfig {
                msg: format!(
                    "quad_points ({quad_points}) must be at least order + 1 ({})",
                    order + 1
                ),
            });
        }
        if subdivisions < 1 {
            return Err(PropagateError::InvalidConfig {
                msg: "subdivisions must be at least 1".to_string(),
            });
        }
        Ok(Self {
            order,
            quad_points,
            subdivisions,
            method,
        })
    }

    /// The challenge-problem parameters: order 5, 20 quadrature points per
    /// direction, 11 subdivisions per direction.
    pub fn challenge(method: Method) -> Self {
        Self {
            order: 5,
            quad_points: 20,
            subdivisions: 11,
            method,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn quad_points(&self) -> usize {
        self.quad_points
    }

    pub fn subdivisions(&self) -> usize {
        self.subdivisions
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn with_method(&self, method: Method) -> Self {
        Self { method, ..*self }
    }
}

/// One propagated product box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRecord {
    pub box_id: usize,
    pub inputs: Vec<Interval>,
    pub output: Interval,
    pub mass: f64,
}

/// The induced DS structure plus the per-box detail that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub method: Method,
    pub output: DsStructure,
    pub boxes: Vec<BoxRecord>,
}

/// Per-box bounds from all three methods side by side. The `*_inside_oracle`
/// flags mark a chaos-bernstein endpoint strictly inside the oracle range,
/// i.e. surrogate truncation narrowing the reported bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxComparison {
    pub box_id: usize,
    pub inputs: Vec<Interval>,
    pub mass: f64,
    pub chaos_bernstein: Interval,
    pub interval_baseline: Interval,
    pub grid_oracle: Interval,
    pub lower_inside_oracle: bool,
    pub upper_inside_oracle: bool,
}

/// Bounds the range of `f` over one box with the configured method.
///
/// Zero-width components are fixed to constants first; for the surrogate
/// method the expansion is then built only over the remaining dimensions.
pub fn propagate_box(
    f: &ExprAst,
    boxes: &[Interval],
    cfg: &PropagationConfig,
) -> Result<Interval, PropagateError> {
    assert_eq!(
        f.n_vars(),
        boxes.len(),
        "box count must match the function's variables"
    );
    match cfg.method() {
        Method::IntervalBaseline => Ok(f.eval_interval(boxes)?),
        Method::GridOracle => Ok(oracle_bounds(
            f,
            boxes,
            ORACLE_GRID,
            ORACLE_REFINE_ITERS,
        )?),
        Method::ChaosBernstein => chaos_bernstein_box(f, boxes, cfg),
    }
}

fn chaos_bernstein_box(
    f: &ExprAst,
    boxes: &[Interval],
    cfg: &PropagationConfig,
) -> Result<Interval, PropagateError> {
    let bindings: Vec<Option<f64>> = boxes
        .iter()
        .map(|b| if b.is_point() { Some(b.lo()) } else { None })
        .collect();
    let free: Vec<Interval> = boxes.iter().filter(|b| !b.is_point()).copied().collect();
    if free.is_empty() {
        let point: Vec<f64> = boxes.iter().map(|b| b.lo()).collect();
        return Ok(Interval::point(f.eval_point(&point)?));
    }
    let reduced = f.bind(&bindings);
    let pce = chaos::project(&reduced, &free, cfg.order(), cfg.quad_points())?;
    let poly = bernstein::legendre_to_power(&pce);
    // the surrogate lives in standardized coordinates
    let standard = vec![Interval::new(-1.0, 1.0).unwrap(); free.len()];
    Ok(bernstein::bounded_range(&poly, &standard, cfg.subdivisions())?)
}

/// Deterministic reference bounds: evaluates `f` on a full lattice
/// (faces and corners included), then runs shrinking-step coordinate
/// descent from the best and worst lattice points.
pub fn oracle_bounds(
    f: &ExprAst,
    boxes: &[Interval],
    grid: usize,
    refine_iters: usize,
) -> Result<Interval, DomainError> {
    assert!(grid >= 2, "the oracle lattice needs at least two points");
    assert_eq!(f.n_vars(), boxes.len());
    let n = boxes.len();
    let coords: Vec<Vec<f64>> = boxes
        .iter()
        .map(|b| {
            if b.is_point() {
                return vec![b.lo()];
            }
            let mut row = Vec::with_capacity(grid);
            row.push(b.lo());
            for t in 1..grid - 1 {
                row.push(b.lo() + b.width() * (t as f64) / (grid as f64 - 1.0));
            }
            row.push(b.hi());
            row
        })
        .collect();

    let sizes: Vec<usize> = coords.iter().map(|c| c.len() - 1).collect();
    let mut x = vec![0.0; n];
    let mut min_value = f64::INFINITY;
    let mut max_value = f64::NEG_INFINITY;
    let mut min_point = vec![0.0; n];
    let mut max_point = vec![0.0; n];
    for lattice_point in lattice_range_iter(vec![0; n], sizes) {
        for d in 0..n {
            x[d] = coords[d][lattice_point.degree(d)];
        }
        let value = f.eval_point(&x)?;
        if value < min_value {
            min_value = value;
            min_point.copy_from_slice(&x);
        }
        if value > max_value {
            max_value = value;
            max_point.copy_from_slice(&x);
        }
    }

    let spacing: Vec<f64> = boxes
        .iter()
        .map(|b| b.width() / (grid as f64 - 1.0))
        .collect();
    let refined_min = refine(f, boxes, min_point, min_value, &spacing, refine_iters, false)?;
    let refined_max = refine(f, boxes, max_point, max_value, &spacing, refine_iters, true)?;
    Ok(Interval::new(refined_min, refined_max).expect("oracle bounds are finite and ordered"))
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &ExprAst,
    boxes: &[Interval],
    mut x: Vec<f64>,
    mut value: f64,
    spacing: &[f64],
    iters: usize,
    maximize: bool,
) -> Result<f64, DomainError> {
    let mut steps = spacing.to_vec();
    for _ in 0..iters {
        for d in 0..boxes.len() {
            if steps[d] == 0.0 {
                continue;
            }
            for direction in [-1.0, 1.0] {
                let candidate = (x[d] + direction * steps[d]).clamp(boxes[d].lo(), boxes[d].hi());
                if candidate == x[d] {
                    continue;
                }
                let previous = x[d];
                x[d] = candidate;
                let v = f.eval_point(&x)?;
                let improved = if maximize { v > value } else { v < value };
                if improved {
                    value = v;
                } else {
                    x[d] = previous;
                }
            }
        }
        for step in steps.iter_mut() {
            *step *= 0.5;
        }
    }
    Ok(value)
}

/// Propagates the product space of the input structures through `f` and
/// assembles the induced structure: each product box's image interval
/// carries the product of the input masses; exactly equal images merge.
pub fn map_ds(
    f: &ExprAst,
    inputs: &[DsStructure],
    cfg: &PropagationConfig,
) -> Result<PropagationResult, PropagateError> {
    assert_eq!(
        f.n_vars(),
        inputs.len(),
        "one input structure per function variable"
    );
    assert!(!inputs.is_empty(), "at least one input structure");
    let n = inputs.len();
    let sizes: Vec<usize> = inputs.iter().map(|ds| ds.len() - 1).collect();
    let mut records = Vec::new();
    for (position, combo) in lattice_range_iter(vec![0; n], sizes).enumerate() {
        let box_id = position + 1;
        let mut box_inputs = Vec::with_capacity(n);
        let mut mass = 1.0;
        for (d, ds) in inputs.iter().enumerate() {
            let fe = &ds.focal_elements()[combo.degree(d)];
            box_inputs.push(fe.interval);
            mass *= fe.mass;
        }
        let output =
            propagate_box(f, &box_inputs, cfg).map_err(|e| e.with_box_id(box_id))?;
        records.push(BoxRecord {
            box_id,
            inputs: box_inputs,
            output,
            mass,
        });
    }
    let output = DsStructure::new(records.iter().map(|r| (r.output, r.mass)).collect())?;
    Ok(PropagationResult {
        method: cfg.method(),
        output,
        boxes: records,
    })
}

/// Runs all three methods over the product space and tabulates them per
/// box, flagging chaos-bernstein endpoints that fall strictly inside the
/// oracle range.
pub fn compare_methods(
    f: &ExprAst,
    inputs: &[DsStructure],
    cfg: &PropagationConfig,
) -> Result<Vec<BoxComparison>, PropagateError> {
    let surrogate = map_ds(f, inputs, &cfg.with_method(Method::ChaosBernstein))?;
    let baseline = map_ds(f, inputs, &cfg.with_method(Method::IntervalBaseline))?;
    let oracle = map_ds(f, inputs, &cfg.with_method(Method::GridOracle))?;
    let rows = surrogate
        .boxes
        .iter()
        .zip(&baseline.boxes)
        .zip(&oracle.boxes)
        .map(|((cb, ib), go)| BoxComparison {
            box_id: cb.box_id,
            inputs: cb.inputs.clone(),
            mass: cb.mass,
            chaos_bernstein: cb.output,
            interval_baseline: ib.output,
            grid_oracle: go.output,
            lower_inside_oracle: cb.output.lo() > go.output.lo(),
            upper_inside_oracle: cb.output.hi() < go.output.hi(),
        })
        .collect();
    Ok(rows)
}

/// The aggregated challenge-problem inputs (structures for `a` and `b`),
/// used by tests and bundled examples.
pub fn challenge_inputs() -> (DsStructure, DsStructure) {
    let iv = |lo, hi| Interval::new(lo, hi).unwrap();
    let a1 = DsStructure::new(vec![(iv(0.6, 0.9), 1.0)]).unwrap();
    let a2 = DsStructure::new(vec![(iv(0.1, 0.5), 0.2), (iv(0.5, 1.0), 0.8)]).unwrap();
    let a = crate::evidence::mix(&[a1, a2], &[1.0, 1.0]).unwrap();

    let third = 1.0 / 3.0;
    let b1 = DsStructure::new(vec![(iv(0.3, 0.5), 0.1), (iv(0.6, 0.8), 0.9)]).unwrap();
    let b2 = DsStructure::new(vec![
        (iv(0.2, 0.4), 0.1),
        (iv(0.4, 0.6), 0.7),
        (iv(0.6, 1.0), 0.2),
    ])
    .unwrap();
    let b3 = DsStructure::new(vec![
        (iv(0.0, 0.2), third),
        (iv(0.2, 0.4), third),
        (iv(0.3, 0.5), third),
    ])
    .unwrap();
    let b = crate::evidence::mix(&[b1, b2, b3], &[1.0, 1.0, 1.0]).unwrap();
    (a, b)
}

/// `y = (a+b)^a`, the challenge map.
pub fn challenge_function() -> ExprAst {
    ExprAst::parse("(a+b)^a", &["a", "b"]).unwrap()
}
