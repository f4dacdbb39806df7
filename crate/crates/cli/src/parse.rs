//! Value parsers for command-line arguments.

use std::f64::consts::PI;

use bosewalk::graph::HermitianWeightedGraph;
use num_complex::Complex64;

/// Accepts `1.5`, `-2i`, `i`, `0.3-0.7i` and `1e-3+2e-1i`.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    let bad = || format!("cannot parse `{s}` as a complex number (forms: 1.5, 2i, 0.3-0.7i)");
    let float = |x: &str| x.parse::<f64>().map_err(|_| bad());
    let coeff = |x: &str| match x {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        x => float(x),
    };
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(float(t)?, 0.0));
    };
    // The sign that separates the parts is not leading and not an exponent sign.
    let b = body.as_bytes();
    let split = (1..b.len())
        .rev()
        .find(|&k| (b[k] == b'+' || b[k] == b'-') && !matches!(b[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(float(&body[..k])?, coeff(&body[k..])?)),
        None => Ok(Complex64::new(0.0, coeff(body)?)),
    }
}

/// Accepts plain numbers and multiples of pi: `1.25`, `pi/2`, `2pi/3`, `0.5*pi`.
pub fn time(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace('*', "");
    let bad = || format!("cannot parse `{s}` as a time (forms: 1.5, pi/2, 2pi/3)");
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().map_err(|_| bad())?),
        None => (t.clone(), 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some("") | Some("+") => PI,
        Some("-") => -PI,
        Some(c) => c.parse::<f64>().map_err(|_| bad())? * PI,
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let out = value / den;
    if out.is_finite() {
        Ok(out)
    } else {
        Err(bad())
    }
}

/// A vertex given by label, or by index when no label matches. A leading `#`
/// forces the index reading.
pub fn vertex(g: &HermitianWeightedGraph, s: &str) -> Result<usize, String> {
    if let Some(idx) = s.strip_prefix('#') {
        return index(g, idx);
    }
    match g.find_label(s) {
        Some(v) => Ok(v),
        None => index(g, s),
    }
}

fn index(g: &HermitianWeightedGraph, s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v < g.vertex_count() => Ok(v),
        Ok(v) => Err(format!("vertex {v} out of range 0..{}", g.vertex_count())),
        Err(_) => Err(format!("no vertex labelled `{s}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bosewalk::graph::build_g_line;

    #[test]
    fn complex_forms() {
        let c = Complex64::new;
        for (s, want) in [
            ("1.5", c(1.5, 0.0)),
            ("i", c(0.0, 1.0)),
            ("-i", c(0.0, -1.0)),
            ("2.5i", c(0.0, 2.5)),
            ("0.3-0.7i", c(0.3, -0.7)),
            ("-1+i", c(-1.0, 1.0)),
            ("1e-3+2e-1i", c(1e-3, 0.2)),
            ("-2e-3i", c(0.0, -2e-3)),
        ] {
            assert_eq!(complex(s).unwrap(), want, "{s}");
        }
        assert!(complex("1+").is_err());
        assert!(complex("x").is_err());
    }

    #[test]
    fn time_forms() {
        assert_eq!(time("pi/2").unwrap(), PI / 2.0);
        assert_eq!(time("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(time("0.5*pi").unwrap(), 0.5 * PI);
        assert_eq!(time("1.25").unwrap(), 1.25);
        assert!(time("pi/0").is_err());
        assert!(time("tau").is_err());
    }

    #[test]
    fn vertices_by_label_or_index() {
        let g = build_g_line(3).unwrap();
        assert_eq!(vertex(&g, "0,3").unwrap(), 3);
        assert_eq!(vertex(&g, "2").unwrap(), 2);
        assert_eq!(vertex(&g, "#1").unwrap(), 1);
        assert!(vertex(&g, "4").is_err());
        assert!(vertex(&g, "9,9").is_err());
    }
}
