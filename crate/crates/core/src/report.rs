//! Fixed-format CSV and JSON rendering of results.
//!
//! Numbers are rendered with 17 significant digits in JSON and 12 in CSV,
//! so identical inputs produce byte-identical files. JSON documents carry
//! a `"schema"` tag.

use crate::envelope::{EnvelopeResult, GridField};
use crate::extremal::SegmentPair;
use crate::solver::{BellmanSolution, OmegaPoint};

/// Schema tag of every JSON document.
pub const SCHEMA: &str = "bellman-mt/1";

/// 17 significant digits, exponent form (round-trips any f64).
pub fn json_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// 12 significant digits, exponent form.
pub fn csv_f64(x: f64) -> String {
    format!("{x:.11e}")
}

fn json_object(fields: &[(&str, String)]) -> String {
    let body: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("\"{k}\": {v}"))
        .collect();
    format!("{{{}}}", body.join(", "))
}

fn json_str(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn json_point(x: &OmegaPoint) -> String {
    format!(
        "[{}, {}, {}]",
        json_f64(x.x1),
        json_f64(x.x2),
        json_f64(x.x3)
    )
}

/// `eval` result document.
pub fn eval_json(p: f64, x: &OmegaPoint, which: &str, sol: &BellmanSolution) -> String {
    json_object(&[
        ("schema", json_str(SCHEMA)),
        ("p", json_f64(p)),
        ("point", json_point(x)),
        ("which", json_str(which)),
        ("value", json_f64(sol.value)),
        ("omega", json_f64(sol.omega)),
        ("sector", json_str(sol.sector.as_str())),
        ("iterations", sol.iterations.to_string()),
        ("residual", json_f64(sol.residual)),
    ])
}

/// `scan` result document; `literal_region` is the value over the
/// printed hypothesis region when it differs from the proof region.
pub fn scan_json(
    p: f64,
    which: &str,
    grid_n: u32,
    value: f64,
    target: f64,
    literal_region: Option<f64>,
) -> String {
    let mut fields = vec![
        ("schema", json_str(SCHEMA)),
        ("p", json_f64(p)),
        ("which", json_str(which)),
        ("grid_n", grid_n.to_string()),
        ("value", json_f64(value)),
        ("target", json_f64(target)),
        ("rel_gap", json_f64((value - target).abs() / target.abs())),
    ];
    if let Some(v) = literal_region {
        fields.push(("literal_region_value", json_f64(v)));
    }
    json_object(&fields)
}

/// One-record summary of a seeded simulation.
pub fn simulate_json(
    seed: u64,
    depth: u32,
    point: &OmegaPoint,
    g_p_mean: f64,
    b_max: f64,
    b_min: f64,
) -> String {
    json_object(&[
        ("schema", json_str(SCHEMA)),
        ("seed", seed.to_string()),
        ("depth", depth.to_string()),
        ("point", json_point(point)),
        ("g_p_mean", json_f64(g_p_mean)),
        ("ratio", json_f64(g_p_mean / point.x3)),
        ("b_max", json_f64(b_max)),
        ("b_min", json_f64(b_min)),
        ("margin_max", json_f64(b_max - g_p_mean)),
        ("margin_min", json_f64(g_p_mean - b_min)),
    ])
}

/// Extremal-run summary document.
#[allow(clippy::too_many_arguments)]
pub fn extremal_json(
    p: f64,
    point: &OmegaPoint,
    eps: f64,
    levels: u32,
    c0: f64,
    predicted_limit: f64,
    achieved: f64,
    trunc_error_bound: f64,
) -> String {
    json_object(&[
        ("schema", json_str(SCHEMA)),
        ("p", json_f64(p)),
        ("point", json_point(point)),
        ("eps", json_f64(eps)),
        ("levels", levels.to_string()),
        ("c0", json_f64(c0)),
        ("predicted_limit", json_f64(predicted_limit)),
        ("achieved", json_f64(achieved)),
        ("trunc_error_bound", json_f64(trunc_error_bound)),
    ])
}

/// Segment-pair dump, one row per constancy interval.
pub fn segment_pair_csv(pair: &SegmentPair) -> String {
    let mut out = String::from("segment_start,segment_length,f_value,g_value\n");
    for s in &pair.segments {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_f64(s.start),
            csv_f64(s.len),
            csv_f64(s.f),
            csv_f64(s.g)
        ));
    }
    out
}

/// Grid dump, one row per node.
pub fn grid_field_csv(field: &GridField) -> String {
    let mut out = String::from("x1,x2,value\n");
    for i in 0..field.n() {
        for j in 0..field.n() {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_f64(field.coord(i)),
                csv_f64(field.coord(j)),
                csv_f64(field.value(i, j))
            ));
        }
    }
    out
}

/// Envelope metadata document.
pub fn envelope_meta_json(result: &EnvelopeResult) -> String {
    json_object(&[
        ("schema", json_str(SCHEMA)),
        ("half_width", json_f64(result.field.half_width())),
        ("n", result.field.n().to_string()),
        ("sweeps", result.sweeps.to_string()),
        ("residual", json_f64(result.residual)),
    ])
}

/// Chord dump: sampled points of the trajectory with the Bellman value,
/// one row per sample.
pub fn chord_csv(samples: &[(f64, f64, f64, f64, f64)]) -> String {
    let mut out = String::from("t,y1,y2,y3,value\n");
    for &(t, y1, y2, y3, v) in samples {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_f64(t),
            csv_f64(y1),
            csv_f64(y2),
            csv_f64(y3),
            csv_f64(v)
        ));
    }
    out
}

/// Critical-constant result document.
pub fn critical_json(p: f64, c_star: f64, beta: f64) -> String {
    json_object(&[
        ("schema", json_str(SCHEMA)),
        ("p", json_f64(p)),
        ("c_star", json_f64(c_star)),
        ("beta", json_f64(beta)),
        ("rel_gap", json_f64((c_star - beta).abs() / beta)),
    ])
}
