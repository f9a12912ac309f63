//! One run of the tools on one input: the selected methods, their agreement,
//! and the quadrisecant dump. The command-line front end is a thin layer
//! over this module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Line, Point3};
use crate::invariant::{nu2, with_perturbation, EvalOptions, Evaluation, DEFAULT_SEED};
use crate::knotmodel::{
    close_long, extremal_set, normalize_long, parse_knot, sample_polynomial, InputFormat, KnotInput,
    PLKnot, SmoothKnot, Topology,
};
use crate::oracle::{c2_oracle, DiagramValue};
use crate::quadrisecant::{closed_labels, enumerate_quadrisecants, is_alternating, n_l, Permutation};
use crate::tracer::{nu2_tracer, Label, TracerOptions, TracerReport};

pub const SCHEMA: u32 = 1;

/// Default number of polygon edges when sampling a smooth curve.
pub const DEFAULT_SAMPLES: usize = 48;

/// Samples cached per smooth knot for the tracer.
const TRACER_SAMPLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Quadrisecant formula (long or closed by topology).
    Quadrisecant,
    /// Linking number of the traced collinearity curves.
    Linking,
    /// Gauss-diagram oracle.
    Gauss,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Quadrisecant, Method::Linking, Method::Gauss];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Quadrisecant => "quadrisecant",
            Method::Linking => "linking",
            Method::Gauss => "gauss",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Shown in the report; not read by [`run_text`].
    pub input: String,
    pub format: InputFormat,
    /// Overrides the topology stored in the input, if any.
    pub topology: Option<Topology>,
    pub methods: Vec<Method>,
    /// When set, methods that do not apply to the input are skipped instead
    /// of failing.
    pub skip_inapplicable: bool,
    pub seed: u64,
    /// Relative magnitude of the retry perturbations.
    pub perturb: f64,
    /// Relative degeneracy tolerance.
    pub tolerance: f64,
    /// Polygon edges used for smooth inputs.
    pub samples: usize,
    pub tracer: TracerOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        let e = EvalOptions::default();
        RunConfig {
            input: String::new(),
            format: InputFormat::Json,
            topology: None,
            methods: vec![Method::Quadrisecant],
            skip_inapplicable: false,
            seed: DEFAULT_SEED,
            perturb: e.perturb,
            tolerance: e.tolerance,
            samples: DEFAULT_SAMPLES,
            tracer: TracerOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            tolerance: self.tolerance,
            seed: self.seed,
            perturb: self.perturb,
            ..EvalOptions::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Unsupported("no method selected".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1e-2) {
            return Err(Error::Unsupported(format!("tolerance {} out of range", self.tolerance)));
        }
        if !(self.perturb >= 0.0 && self.perturb.is_finite()) {
            return Err(Error::Unsupported(format!("perturbation {} out of range", self.perturb)));
        }
        if self.samples < 4 {
            return Err(Error::Unsupported("at least 4 samples are needed".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub path: String,
    pub format: InputFormat,
    pub topology: Topology,
    pub kind: String,
    /// Vertices of the polygon the quadrisecant and Gauss methods ran on.
    pub vertices: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub name: String,
    pub value: i64,
    pub details: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub schema: u32,
    pub input: InputSummary,
    pub methods: Vec<MethodResult>,
    pub agree: bool,
}

impl InvariantReport {
    pub fn value(&self, method: Method) -> Option<i64> {
        self.methods.iter().find(|m| m.name == method.name()).map(|m| m.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// The input resolved into what each method consumes.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub topology: Topology,
    pub kind: &'static str,
    pub polygon: PLKnot,
    pub smooth: Option<SmoothKnot>,
}

/// Turn a parsed input into a polygon (and a smooth knot when there is one).
pub fn prepare(input: KnotInput, topology: Option<Topology>, samples: usize) -> Result<Prepared> {
    match input {
        KnotInput::Polygon(k) => Ok(Prepared {
            topology: k.topology(),
            kind: "polygon",
            polygon: k,
            smooth: None,
        }),
        KnotInput::Polynomial(p) => {
            let long = sample_polynomial(&p, samples)?;
            let smooth = SmoothKnot::long_poly(p.curve.clone(), Some(p.window()?), TRACER_SAMPLES);
            let top = topology.unwrap_or(Topology::Long);
            let polygon = match top {
                Topology::Long => long,
                Topology::Closed => close_long(&long, EvalOptions::default().tolerance)?,
            };
            Ok(Prepared {
                topology: top,
                kind: "polynomial",
                polygon,
                smooth: Some(smooth),
            })
        }
        KnotInput::Trig(c) => {
            let top = topology.unwrap_or(Topology::Closed);
            let (polygon, smooth) = match top {
                Topology::Closed => {
                    let smooth = SmoothKnot::opened_trig(c, TRACER_SAMPLES)?;
                    (smooth.to_pl(samples)?, smooth)
                }
                Topology::Long => {
                    let smooth = SmoothKnot::trig_arc(c, true, TRACER_SAMPLES)?;
                    let pts: Vec<Point3> =
                        (0..=samples).map(|i| smooth.point(i as f64 / samples as f64)).collect();
                    (normalize_long(pts)?, smooth)
                }
            };
            Ok(Prepared {
                topology: top,
                kind: "trig",
                polygon,
                smooth: Some(smooth),
            })
        }
    }
}

fn tracer_details(r: &TracerReport) -> serde_json::Value {
    let crossings: Vec<_> = r
        .linking
        .crossings
        .iter()
        .map(|c| {
            serde_json::json!({
                "params": c.params,
                "over": c.over,
                "sigma": c.sigma.cycles(),
                "epsilon": c.epsilon,
                "crossing_sign": c.crossing_sign,
            })
        })
        .collect();
    serde_json::json!({
        "co1_curves": r.count(Label::Co1),
        "co3_curves": r.count(Label::Co3),
        "closed_components": r.closed_components,
        "seeds": r.seeds.seeds.len(),
        "ignored_co2_seeds": r.seeds.ignored_co2,
        "crossings": crossings,
        "check_value": r.check.value,
        "kappa": r.linking.kappa,
        "max_residual": r.max_residual,
    })
}

fn run_method(m: Method, p: &Prepared, config: &RunConfig) -> Result<Option<MethodResult>> {
    let opts = config.eval_options();
    let (value, details) = match m {
        Method::Quadrisecant => {
            let ev: Evaluation = nu2(&p.polygon, &opts)?;
            (ev.value, serde_json::to_value(&ev).expect("serialises"))
        }
        Method::Gauss => {
            let d: DiagramValue = c2_oracle(&p.polygon, config.seed, config.tolerance)?;
            (d.value, serde_json::to_value(&d).expect("serialises"))
        }
        Method::Linking => {
            let Some(f) = &p.smooth else {
                if config.skip_inapplicable {
                    return Ok(None);
                }
                return Err(Error::Unsupported(
                    "the linking method needs a smooth (poly or trig) input".into(),
                ));
            };
            let r = nu2_tracer(f, &config.tracer)?;
            (r.value, tracer_details(&r))
        }
    };
    Ok(Some(MethodResult {
        name: m.name().into(),
        value,
        details,
    }))
}

/// Parse `text` and run the configured methods on it.
pub fn run_text(text: &str, config: &RunConfig) -> Result<InvariantReport> {
    config.validate()?;
    let input = parse_knot(text, config.format, config.topology)?;
    let p = prepare(input, config.topology, config.samples)?;
    run_prepared(&p, config)
}

pub fn run_prepared(p: &Prepared, config: &RunConfig) -> Result<InvariantReport> {
    config.validate()?;
    let mut methods: Vec<Method> = config.methods.clone();
    methods.sort();
    methods.dedup();
    let mut results = Vec::new();
    for m in methods {
        if let Some(r) = run_method(m, p, config)? {
            results.push(r);
        }
    }
    let agree = results.windows(2).all(|w| w[0].value == w[1].value);
    Ok(InvariantReport {
        schema: SCHEMA,
        input: InputSummary {
            path: config.input.clone(),
            format: config.format,
            topology: p.topology,
            kind: p.kind.into(),
            vertices: p.polygon.vertex_count(),
        },
        methods: results,
        agree,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadrisecantRecord {
    pub line: Line,
    pub edges: [usize; 4],
    pub params: [f64; 4],
    /// Hit points in knot order.
    pub points: [Point3; 4],
    /// Knot-order labels read along the line.
    pub line_order: [u8; 4],
    pub sigma: String,
    pub epsilon: i8,
    /// Long knots: whether the line enters the sum.
    pub counted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternating: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_l: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadrisecantDump {
    pub schema: u32,
    pub topology: Topology,
    /// Attempts used before the polygon was generic (1 means unperturbed).
    pub attempts: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremal_count: Option<usize>,
    pub quadrisecants: Vec<QuadrisecantRecord>,
}

impl QuadrisecantDump {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dump serialises")
    }
}

/// Every quadrisecant of the polygon, with the data both sums use. Closed
/// knots report the sign of the closed labelling on alternating lines.
pub fn report_quadrisecants(knot: &PLKnot, opts: &EvalOptions) -> Result<QuadrisecantDump> {
    let ((records, ext_count), _, attempts) = with_perturbation(knot, opts, |k| {
        let tol = k.tolerance(opts.tolerance);
        let qs = enumerate_quadrisecants(k, &tol)?;
        let ext = if k.is_closed() { Some(extremal_set(k, tol.rel)?) } else { None };
        let mut out = Vec::with_capacity(qs.len());
        for q in &qs {
            let mut rec = QuadrisecantRecord {
                line: q.line,
                edges: q.edges(),
                params: q.hits.map(|h| h.param),
                points: q.hits.map(|h| h.point),
                line_order: q.sigma.0,
                sigma: q.sigma.cycles(),
                epsilon: q.epsilon,
                counted: false,
                alternating: None,
                n_l: None,
            };
            match &ext {
                None => rec.counted = q.sigma == Permutation::COUNTED,
                Some(ext) => {
                    let alt = is_alternating(q, &tol)?;
                    rec.alternating = Some(alt);
                    if alt {
                        let labels = closed_labels(q).ok_or_else(|| {
                            Error::GenericityFailure("alternating quadrisecant without adjacent middle pair".into())
                        })?;
                        rec.epsilon = labels.epsilon(q, &tol)?;
                        rec.n_l = Some(n_l(q, ext, k.vertex_count()).unwrap_or(0));
                        rec.counted = true;
                    }
                }
            }
            out.push(rec);
        }
        Ok((out, ext.map(|e| e.components.len())))
    })?;
    Ok(QuadrisecantDump {
        schema: SCHEMA,
        topology: knot.topology(),
        attempts,
        extremal_count: ext_count,
        quadrisecants: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::knotmodel::knot_to_json;

    #[test]
    fn quadrisecant_and_gauss_agree_on_trefoil() {
        let text = knot_to_json(&catalog::trefoil(24));
        let config = RunConfig {
            methods: vec![Method::Gauss, Method::Quadrisecant],
            ..RunConfig::default()
        };
        let r = run_text(&text, &config).unwrap();
        assert!(r.agree);
        assert_eq!(r.value(Method::Quadrisecant), Some(1));
        assert_eq!(r.value(Method::Gauss), Some(1));
        assert_eq!(r.methods[0].name, "quadrisecant");
        assert_eq!(run_text(&text, &config).unwrap().to_json(), r.to_json());
    }

    #[test]
    fn linking_needs_smooth_input() {
        let text = knot_to_json(&catalog::triangle());
        let mut config = RunConfig {
            methods: vec![Method::Linking],
            ..RunConfig::default()
        };
        assert!(matches!(run_text(&text, &config), Err(Error::Unsupported(_))));
        config.skip_inapplicable = true;
        config.methods.push(Method::Quadrisecant);
        let r = run_text(&text, &config).unwrap();
        assert_eq!(r.methods.len(), 1);
    }

    #[test]
    fn closed_dump_matches_sum() {
        let k = catalog::trefoil(24);
        let opts = EvalOptions::default();
        let d = report_quadrisecants(&k, &opts).unwrap();
        let n = d.extremal_count.unwrap() as i64;
        let raw: i64 = d
            .quadrisecants
            .iter()
            .filter(|q| q.alternating == Some(true))
            .map(|q| q.n_l.unwrap() as i64 * q.epsilon as i64)
            .sum();
        assert_eq!(raw, crate::invariant::c2_closed(&k, &opts).unwrap().raw_sum.unwrap());
        assert_eq!(raw / n, 1);
    }

    #[test]
    fn empty_method_list_rejected() {
        let config = RunConfig {
            methods: vec![],
            ..RunConfig::default()
        };
        assert!(run_text("[]", &config).is_err());
    }
}
