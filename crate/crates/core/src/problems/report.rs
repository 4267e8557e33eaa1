//! Convergence tables with consecutive-level rates.

use std::io::Write;

use serde::Serialize;

use crate::assembly::ErrorNorms;
use crate::elements::ElementConfig;
use crate::error::Result;

/// One mesh level of a convergence study. Rates compare with the previous
/// row and are `None` on the first.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub dofs: usize,
    pub l2: f64,
    pub l2_rate: Option<f64>,
    pub curl: f64,
    pub curl_rate: Option<f64>,
    pub hcurl: f64,
    pub hcurl_rate: Option<f64>,
    pub grad_curl: f64,
    pub grad_curl_rate: Option<f64>,
    /// Wall time; reported in JSON only so that CSV output is reproducible.
    pub seconds: f64,
}

impl ConvergenceRow {
    pub fn new(n: usize, dofs: usize, e: &ErrorNorms, seconds: f64) -> Self {
        Self {
            n,
            dofs,
            l2: e.value,
            l2_rate: None,
            curl: e.first,
            curl_rate: None,
            hcurl: e.h_curl(),
            hcurl_rate: None,
            grad_curl: e.second,
            grad_curl_rate: None,
            seconds,
        }
    }
}

/// `log(e₁/e₂) / log(h₁/h₂)` with `h = 1/N`.
pub fn rate(e1: f64, e2: f64, n1: usize, n2: usize) -> f64 {
    (e1 / e2).ln() / (n2 as f64 / n1 as f64).ln()
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConvergenceReport {
    pub r: usize,
    pub k: usize,
    pub rows: Vec<ConvergenceRow>,
}

/// Scientific notation with a two-digit signed exponent, e.g. `8.642113e-03`.
pub fn sci(x: f64) -> String {
    let s = format!("{x:.6e}");
    match s.split_once('e') {
        Some((m, e)) => {
            let v: i32 = e.parse().unwrap_or(0);
            let sign = if v < 0 { '-' } else { '+' };
            format!("{m}e{sign}{:02}", v.abs())
        }
        None => s,
    }
}

fn opt_rate(r: Option<f64>) -> String {
    r.map(|v| format!("{v:.4}")).unwrap_or_default()
}

impl ConvergenceReport {
    pub fn new(config: ElementConfig, mut rows: Vec<ConvergenceRow>) -> Self {
        for i in 1..rows.len() {
            let (a, b) = (rows[i - 1].clone(), &mut rows[i]);
            b.l2_rate = Some(rate(a.l2, b.l2, a.n, b.n));
            b.curl_rate = Some(rate(a.curl, b.curl, a.n, b.n));
            b.hcurl_rate = Some(rate(a.hcurl, b.hcurl, a.n, b.n));
            b.grad_curl_rate = Some(rate(a.grad_curl, b.grad_curl, a.n, b.n));
        }
        Self {
            r: config.r,
            k: config.k,
            rows,
        }
    }

    pub const CSV_HEADER: &'static str =
        "N,dofs,l2,l2_rate,curl,curl_rate,hcurl,hcurl_rate,grad_curl,grad_curl_rate";

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                r.n,
                r.dofs,
                sci(r.l2),
                opt_rate(r.l2_rate),
                sci(r.curl),
                opt_rate(r.curl_rate),
                sci(r.hcurl),
                opt_rate(r.hcurl_rate),
                sci(r.grad_curl),
                opt_rate(r.grad_curl_rate),
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to memory");
        String::from_utf8(buf).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report")
    }

    /// Aligned text table for terminals.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:>4} {:>9} {:>13} {:>7} {:>13} {:>7} {:>13} {:>7} {:>13} {:>7}\n",
            "N", "dofs", "‖e‖", "rate", "‖∇×e‖", "rate", "H(curl)", "rate", "|∇×e|₁", "rate"
        );
        for r in &self.rows {
            out += &format!(
                "{:>4} {:>9} {:>13} {:>7} {:>13} {:>7} {:>13} {:>7} {:>13} {:>7}\n",
                r.n,
                r.dofs,
                sci(r.l2),
                opt_rate(r.l2_rate),
                sci(r.curl),
                opt_rate(r.curl_rate),
                sci(r.hcurl),
                opt_rate(r.hcurl_rate),
                sci(r.grad_curl),
                opt_rate(r.grad_curl_rate)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_uses_two_digit_exponent() {
        assert_eq!(sci(8.642113e-3), "8.642113e-03");
        assert_eq!(sci(1.5e12), "1.500000e+12");
        assert_eq!(sci(0.0), "0.000000e+00");
    }

    #[test]
    fn first_row_rates_blank() {
        let e1 = ErrorNorms { value: 1.0, first: 2.0, second: 4.0 };
        let e2 = ErrorNorms { value: 0.25, first: 1.0, second: 2.0 };
        let rep = ConvergenceReport::new(
            ElementConfig::new(1, 1).unwrap(),
            vec![ConvergenceRow::new(2, 10, &e1, 0.0), ConvergenceRow::new(4, 80, &e2, 0.0)],
        );
        let csv = rep.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1].split(',').nth(3), Some(""));
        assert!((rep.rows[1].l2_rate.unwrap() - 2.0).abs() < 1e-14);
        assert!((rep.rows[1].curl_rate.unwrap() - 1.0).abs() < 1e-14);
    }
}
