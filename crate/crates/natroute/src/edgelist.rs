//! Plain-text fixture format: one segment per line,
//! `id x1 y1 x2 y2 ... [name]`, whitespace separated. `#` starts a comment.
//! A trailing token that is not a number, or a dangling odd token, is the
//! name; names cannot contain whitespace.

use std::fmt::Write;

use natroute_core::network::LineFeature;
use natroute_core::Point;

use crate::FormatError;

pub fn parse_edge_list(text: &str) -> Result<Vec<LineFeature>, FormatError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| FormatError::EdgeList { line: i + 1, message };
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        let id = tokens.remove(0).to_string();
        let name = match tokens.last() {
            Some(t) if tokens.len() % 2 == 1 || t.parse::<f64>().is_err() => tokens.pop().map(String::from),
            _ => None,
        };
        if tokens.len() % 2 == 1 {
            return Err(err(format!("odd number of coordinates ({})", tokens.len())));
        }
        let mut coords = Vec::with_capacity(tokens.len() / 2);
        for pair in tokens.chunks(2) {
            let x = pair[0].parse::<f64>().map_err(|_| err(format!("bad number {:?}", pair[0])))?;
            let y = pair[1].parse::<f64>().map_err(|_| err(format!("bad number {:?}", pair[1])))?;
            coords.push(Point::new(x, y));
        }
        if coords.len() < 2 {
            return Err(err("a segment needs at least two points".into()));
        }
        out.push(LineFeature { coords, name, id: Some(id) });
    }
    Ok(out)
}

/// Inverse of [`parse_edge_list`]. Features without an id get their index.
pub fn write_edge_list(features: &[LineFeature]) -> String {
    let mut out = String::new();
    for (i, f) in features.iter().enumerate() {
        match &f.id {
            Some(id) => out.push_str(id),
            None => {
                let _ = write!(out, "{i}");
            }
        }
        for p in &f.coords {
            let _ = write!(out, " {} {}", p.x, p.y);
        }
        if let Some(name) = &f.name {
            out.push(' ');
            out.push_str(&name.replace(char::is_whitespace, "_"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names_and_comments() {
        let text = "# grid\n1 0 0 1 0 Main\n2 1 0 1 1 1 2   # trailing\n\n3 0 0 0 1 0 2 Side_St\n";
        let fs = parse_edge_list(text).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(fs[0].name.as_deref(), Some("Main"));
        assert_eq!(fs[1].name, None);
        assert_eq!(fs[1].coords.len(), 3);
        assert_eq!(fs[2].coords.len(), 3);
        assert_eq!(fs[2].id.as_deref(), Some("3"));
    }

    #[test]
    fn numeric_name_after_odd_tokens() {
        let fs = parse_edge_list("a 0 0 1 1 42").unwrap();
        assert_eq!(fs[0].name.as_deref(), Some("42"));
        assert_eq!(fs[0].coords.len(), 2);
    }

    #[test]
    fn reports_line_numbers() {
        match parse_edge_list("1 0 0 1 1\n2 0 0 x 1 1 1\n") {
            Err(FormatError::EdgeList { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_edge_list("1 0 0").is_err());
    }

    #[test]
    fn round_trip() {
        let fs = natroute_core::fixtures::random_network_features(3, 20);
        let back = parse_edge_list(&write_edge_list(&fs)).unwrap();
        assert_eq!(back.len(), fs.len());
        for (a, b) in fs.iter().zip(&back) {
            assert_eq!(a.coords, b.coords);
            assert_eq!(a.name, b.name);
        }
    }
}
