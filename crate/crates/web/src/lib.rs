//! Browser demo: diagram products, rotation orders, commutant dimensions.
//!
//! Every export takes plain strings/numbers and returns a JSON string, with
//! `{"ok": false, "error": …}` on bad input, so the same functions run (and are
//! tested) natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use twindual::density;
use twindual::diagrams::{compose, AlgebraElement, PartialDiagram, Vertex};
use twindual::duality::{schur_weyl_check, DualityOptions};
use twindual::hecke_twin::RepContext;
use twindual::scalars::{is_q_admissible, parse_complex, parse_rational, Complex64, Field, QContext, Rational, Scalar};

fn wrap(res: Result<Value, String>) -> String {
    match res {
        Ok(mut v) => {
            v["ok"] = json!(true);
            v.to_string()
        }
        Err(e) => json!({ "ok": false, "error": e }).to_string(),
    }
}

const GAP: f64 = 40.0;
const HEIGHT: f64 = 70.0;

fn x_of(i: usize) -> f64 {
    20.0 + GAP * (i as f64 - 1.0)
}

/// Top row at `y = 15`, bottom row at `y = 15 + HEIGHT`; pairs as lines or arcs.
pub fn diagram_svg(d: &PartialDiagram) -> String {
    let width = 40.0 + GAP * (d.r().max(1) as f64 - 1.0);
    let (top, bottom) = (15.0, 15.0 + HEIGHT);
    let pos = |v: Vertex| match v {
        Vertex::Top(i) => (x_of(i), top),
        Vertex::Bottom(i) => (x_of(i), bottom),
    };
    let mut s = format!(r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{}" class="diagram">"#, HEIGHT + 30.0);
    for block in d.blocks() {
        match block[..] {
            [a, b] => {
                let ((x1, y1), (x2, y2)) = (pos(a), pos(b));
                if y1 == y2 {
                    // same-row pair: an arc bulging into the diagram
                    let bulge = if y1 == top { 0.45 } else { -0.45 } * HEIGHT;
                    s.push_str(&format!(r#"<path d="M{x1},{y1} C{x1},{} {x2},{} {x2},{y2}" fill="none" stroke="black"/>"#, y1 + bulge, y2 + bulge));
                } else {
                    s.push_str(&format!(r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="black"/>"#));
                }
            }
            [a] => {
                let (x, y) = pos(a);
                let y2 = if y == top { y + 12.0 } else { y - 12.0 };
                s.push_str(&format!(r#"<line x1="{x}" y1="{y}" x2="{x}" y2="{y2}" stroke="black" stroke-dasharray="2,2"/>"#));
            }
            _ => {}
        }
    }
    for i in 1..=d.r() {
        for y in [top, bottom] {
            s.push_str(&format!(r#"<circle cx="{}" cy="{y}" r="4"/>"#, x_of(i)));
        }
    }
    s.push_str("</svg>");
    s
}

fn multiply_inner(r: u32, a: &str, b: &str, delta: &str, delta_prime: &str) -> Result<Value, String> {
    let r = r as usize;
    let a = PartialDiagram::parse(r, a).map_err(|e| e.to_string())?;
    let b = PartialDiagram::parse(r, b).map_err(|e| e.to_string())?;
    let d: Rational = parse_rational(delta).map_err(|e| e.to_string())?;
    let dp: Rational = parse_rational(delta_prime).map_err(|e| e.to_string())?;
    let t = compose(&a, &b).map_err(|e| e.to_string())?;
    let prod = AlgebraElement::basis(a.clone()).multiply(&AlgebraElement::basis(b.clone()), &d, &dp).map_err(|e| e.to_string())?;
    Ok(json!({
        "result": t.result.to_string(),
        "loops": t.loops,
        "non_loops": t.non_loops,
        "coefficient": prod.coefficient(&t.result).to_scalar().to_string(),
        "svg": { "a": diagram_svg(&a), "b": diagram_svg(&b), "result": diagram_svg(&t.result) },
    }))
}

/// `a · b` in `PB_r(δ, δ′)`.
#[wasm_bindgen]
pub fn multiply_diagrams(r: u32, a: &str, b: &str, delta: &str, delta_prime: &str) -> String {
    wrap(multiply_inner(r, a, b, delta, delta_prime))
}

fn parse_q(q: &str) -> Result<(Scalar, Complex64), String> {
    if !q.contains(',') {
        if let Ok(r) = parse_rational(q) {
            let c = Complex64::new(twindual::scalars::rational_to_f64(&r), 0.0);
            return Ok((Scalar::Exact(r), c));
        }
    }
    let c = parse_complex(q).map_err(|e| e.to_string())?;
    Ok((Scalar::Approx(c), c))
}

fn order_inner(n: u32, q: &str, k_max: u32) -> Result<Value, String> {
    let (spec, qc) = parse_q(q)?;
    let rc = RepContext::new(n as usize, QContext::approx(qc, 1e-9).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let orders = (1..rc.n().saturating_sub(1))
        .map(|i| density::finite_order_detect(i, &rc, k_max as usize))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let adm = is_q_admissible(&spec, n, 1e-9);
    Ok(json!({
        "q": spec.to_string(),
        "cos_alpha": density::rotation_cosine(&rc).to_scalar().to_string(),
        "orders": orders,
        "admissible": adm.admissible(),
        "failure": adm.failure(),
    }))
}

/// Orders of the rotations `S̄_i S̄_{i+1}` and the admissibility verdict.
#[wasm_bindgen]
pub fn rotation_orders(n: u32, q: &str, k_max: u32) -> String {
    wrap(order_inner(n, q, k_max))
}

fn duality_inner(n: u32, q: &str, r: u32, force: bool) -> Result<Value, String> {
    let (n, r) = (n as usize, r as usize);
    if n.pow(r as u32) > 64 {
        return Err("the demo stops at n^r = 64".into());
    }
    let (spec, qc) = parse_q(q)?;
    let rc = RepContext::new(n, QContext::approx(qc, 1e-9).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let opts = DualityOptions { force, center: true, ..DualityOptions::default() };
    let rep = schur_weyl_check(&rc, r, &spec, &opts).map_err(|e| e.to_string())?;
    serde_json::to_value(&rep).map_err(|e| e.to_string())
}

/// Commutant vs diagram-image dimensions on `E^{⊗r}` (approximate arithmetic).
#[wasm_bindgen]
pub fn duality_dimensions(n: u32, q: &str, r: u32, force: bool) -> String {
    wrap(duality_inner(n, q, r, force))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn multiply_reports_coefficient() {
        let v = parse(&multiply_diagrams(2, "1,1',2-2'", "1,1',2-2'", "3", "7"));
        assert_eq!(v["ok"], true);
        assert_eq!(v["coefficient"], "7/1");
        assert_eq!(v["non_loops"], 1);
        assert!(v["svg"]["result"].as_str().unwrap().starts_with("<svg"));
        let v = parse(&multiply_diagrams(2, "1-2,1'-2'", "1-2,1'-2'", "3", "7"));
        assert_eq!(v["coefficient"], "3/1");
    }

    #[test]
    fn bad_input_is_an_error_object() {
        let v = parse(&multiply_diagrams(2, "1-2", "1-2,1'-2'", "3", "7"));
        assert_eq!(v["ok"], false);
        assert!(v["error"].as_str().is_some());
    }

    #[test]
    fn orders_at_q_one_are_three() {
        let v = parse(&rotation_orders(3, "1", 50));
        assert_eq!(v["ok"], true);
        assert_eq!(v["admissible"], false);
        assert_eq!(v["orders"][0]["verdict"]["finite"], 3);
    }

    #[test]
    fn duality_small() {
        let v = parse(&duality_dimensions(4, "4", 2, false));
        assert_eq!(v["ok"], true, "{v}");
        assert_eq!(v["dim_commutant"], 10);
        assert_eq!(v["dim_diagram_image"], 10);
        let v = parse(&duality_dimensions(3, "1", 1, false));
        assert_eq!(v["ok"], false);
        assert!(parse(&duality_dimensions(4, "4", 4, false))["error"].as_str().unwrap().contains("64"));
    }

    #[test]
    fn svg_draws_every_vertex() {
        let d = PartialDiagram::parse(3, "1-2,3-1',2',3'").unwrap();
        assert_eq!(diagram_svg(&d).matches("<circle").count(), 6);
    }
}
