//! Markdown summaries of catalog records.

use std::fmt::Write;

use super::{CatalogRecord, MissingReason};
use crate::record::FateRecord;

const ZERO: f64 = 1e-9;

fn number(x: f64) -> String {
    let s = format!("{:.6}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Human-readable polynomial from ascending `[re, im]` coefficients, highest power first.
pub fn format_poly(coeffs: &[[f64; 2]]) -> String {
    let mut out = String::new();
    for (k, &[re, im]) in coeffs.iter().enumerate().rev() {
        if re.abs() < ZERO && im.abs() < ZERO {
            continue;
        }
        let power = match k {
            0 => String::new(),
            1 => "z".into(),
            _ => format!("z^{k}"),
        };
        let (negative, body) = if im.abs() < ZERO {
            let body = if (re.abs() - 1.0).abs() < ZERO && k > 0 {
                String::new()
            } else {
                number(re.abs())
            };
            (re < 0.0, body)
        } else if re.abs() < ZERO {
            let mag = if (im.abs() - 1.0).abs() < ZERO { String::new() } else { number(im.abs()) };
            (im < 0.0, format!("{mag}i"))
        } else {
            let sign = if im < 0.0 { '-' } else { '+' };
            (false, format!("({} {sign} {}i)", number(re), number(im.abs())))
        };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&body);
        out.push_str(&power);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `c(k)` for a cycle, `p` for a fixed point, `inf` for escape, `?` otherwise.
fn fate_summary(f: &FateRecord) -> String {
    let m = (f.multiplier.re.powi(2) + f.multiplier.im.powi(2)).sqrt();
    match f.kind.as_str() {
        "attracting_point" => format!("p ({m:.3})"),
        "attracting_cycle" => format!("c({}) ({m:.3})", f.period),
        "escape" => "inf".into(),
        _ => "?".into(),
    }
}

fn reason_text(r: MissingReason) -> &'static str {
    match r {
        MissingReason::Symmetric => "symmetric",
        MissingReason::Exhausted => "exhausted",
        MissingReason::NoZapponiForm => "no_zapponi_form",
    }
}

fn dims_text(rec: &CatalogRecord, method: &str) -> String {
    rec.dims
        .iter()
        .find(|d| d.method == method)
        .map(|d| {
            let flag = if d.confidence == "low" { " (low)" } else { "" };
            format!("{:.3}{flag}", d.value)
        })
        .unwrap_or_else(|| "-".into())
}

/// One row per record: tree, passport, polynomial, class, fates of `+1` and `-1`, dimensions.
pub fn markdown_report(records: &[CatalogRecord]) -> String {
    let mut out = String::from(
        "| tree | passport | polynomial | class | connectedness | +1 | -1 | box | pressure |\n\
         |---|---|---|---|---|---|---|---|---|\n",
    );
    for r in records {
        let poly = match (&r.sz, r.reason) {
            (Some(sz), _) => format_poly(&sz.coefficients),
            (None, Some(reason)) => reason_text(reason).into(),
            (None, None) => "-".into(),
        };
        let (class, conn, plus, minus) = match &r.classification {
            Some(c) => (
                c.taxonomy.clone(),
                c.connectedness.clone(),
                fate_summary(&c.plus),
                fate_summary(&c.minus),
            ),
            None => ("-".into(), "-".into(), "-".into(), "-".into()),
        };
        writeln!(
            out,
            "| `{}` | ⟨{}⟩ | {} | {} | {} | {} | {} | {} | {} |",
            r.tree_code,
            r.passport,
            poly,
            class,
            conn,
            plus,
            minus,
            dims_text(r, "box_counting"),
            dims_text(r, "pressure"),
        )
        .expect("writing to a String");
    }
    out
}

/// Taxonomy per `n` for one caterpillar family `<n, m | 2, 1, ..., 1>`.
pub fn series_table(m: usize, rows: &[(usize, CatalogRecord)]) -> String {
    let mut out = format!("| n | passport ⟨n,{m}⟩ | class | +1 | -1 |\n|---|---|---|---|---|\n");
    for (n, r) in rows {
        let (class, plus, minus) = match (&r.classification, r.reason) {
            (Some(c), _) => (c.taxonomy.clone(), fate_summary(&c.plus), fate_summary(&c.minus)),
            (None, Some(reason)) => (reason_text(reason).into(), "-".into(), "-".into()),
            (None, None) => ("-".into(), "-".into(), "-".into()),
        };
        writeln!(out, "| {n} | ⟨{}⟩ | {class} | {plus} | {minus} |", r.passport)
            .expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_real_polynomials() {
        let c = [[0.0, 0.0], [-3.75, 0.0], [0.0, 0.0], [10.0, 0.0], [0.0, 0.0], [-12.0, 0.0]];
        assert_eq!(format_poly(&c), "-12z^5 + 10z^3 - 3.75z");
        assert_eq!(format_poly(&[[1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]), "z^2 + 1");
        assert_eq!(format_poly(&[[0.0, 0.0]]), "0");
    }

    #[test]
    fn formats_complex_coefficients() {
        assert_eq!(format_poly(&[[0.5, -2.0], [0.0, 1.0]]), "iz + (0.5 - 2i)");
    }
}
