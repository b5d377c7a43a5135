//! Table rendering for sigma grids, convergence reports and single solves.

use std::fmt::Write as _;

use anyhow::Result;
use fracctrl::analysis::{ConvergenceReport, StudyRow};
use fracctrl::frac::ExponentPair;
use fracctrl::solver::OptimalTriple;
use serde::Serialize;

use crate::config::Format;

/// CSV header of a convergence table.
pub const STUDY_COLUMNS: [&str; 14] = [
    "alpha",
    "theta",
    "N",
    "err_u_weighted",
    "ord_u",
    "err_z_weighted",
    "ord_z",
    "err_q_weighted",
    "ord_q",
    "err_q_l2",
    "ord_q_l2",
    "iters",
    "seconds",
    "expected_order",
];

/// Shortest decimal with at least one fractional digit and at most two,
/// so `2.90` prints as `2.9` and `2.00` as `2.0`.
pub fn short_order(v: f64) -> String {
    let s = format!("{v:.2}");
    let trimmed = s.trim_end_matches('0');
    if trimmed.ends_with('.') {
        format!("{trimmed}0")
    } else {
        trimmed.to_string()
    }
}

/// Shortest round-trip text, in scientific notation for errors.
fn sci(v: f64) -> String {
    format!("{v:e}")
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn opt_sci(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

fn opt_err(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2e}")).unwrap_or_else(|| "n/a".into())
}

fn opt_order(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "*".into())
}

fn csv_text<F>(write: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w)?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Sigma grid: one row per `θ`, one column per `α`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaTable {
    pub alphas: Vec<f64>,
    pub thetas: Vec<f64>,
    /// `cells[i][j]` belongs to `thetas[i]` and `alphas[j]`.
    pub cells: Vec<Vec<ExponentPair>>,
}

pub fn render_sigma_table(t: &SigmaTable, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(t)? + "\n"),
        Format::Csv => csv_text(|w| {
            w.write_record(["theta", "alpha", "sigma", "sigma_star"])?;
            for (theta, row) in t.thetas.iter().zip(&t.cells) {
                for (alpha, pair) in t.alphas.iter().zip(row) {
                    w.write_record([
                        num(*theta),
                        num(*alpha),
                        format!("{:.4}", pair.sigma),
                        format!("{:.4}", pair.sigma_star),
                    ])?;
                }
            }
            Ok(())
        }),
        Format::Md => {
            let mut s = String::from("| θ |");
            for a in &t.alphas {
                write!(s, " α={a:?} |")?;
            }
            s.push_str("\n|---|");
            s.push_str(&"---|".repeat(t.alphas.len()));
            s.push('\n');
            for (theta, row) in t.thetas.iter().zip(&t.cells) {
                write!(s, "| {theta:?} |")?;
                for p in row {
                    write!(s, " ({:.4}, {:.4}) |", p.sigma, p.sigma_star)?;
                }
                s.push('\n');
            }
            Ok(s)
        }
    }
}

fn study_record(r: &ConvergenceReport, row: &StudyRow) -> Vec<String> {
    vec![
        num(r.spec.alpha),
        num(r.spec.theta),
        row.n.to_string(),
        sci(row.errors.u_weighted),
        opt(row.orders.u_weighted),
        sci(row.errors.z_weighted),
        opt(row.orders.z_weighted),
        opt_sci(row.errors.q_weighted),
        opt(row.orders.q_weighted),
        sci(row.errors.q_l2),
        opt(row.orders.q_l2),
        row.outer_iterations.to_string(),
        format!("{:.3}", row.seconds),
        num(r.expected_order()),
    ]
}

/// Renders a convergence report. CSV carries full precision; markdown
/// follows the usual layout of errors, orders, iterations and CPU seconds,
/// closed by an expected-order row.
pub fn render_study(r: &ConvergenceReport, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(r)? + "\n"),
        Format::Csv => csv_text(|w| {
            w.write_record(STUDY_COLUMNS)?;
            for row in &r.rows {
                w.write_record(study_record(r, row))?;
            }
            Ok(())
        }),
        Format::Md => {
            let mut s = String::new();
            writeln!(
                s,
                "θ = {:?}, α = {:?}, β = {:?}, (σ, σ*) = ({:.4}, {:.4}), N_ref = {}",
                r.spec.theta, r.spec.alpha, r.spec.beta, r.pair.sigma, r.pair.sigma_star, r.n_ref
            )?;
            s.push('\n');
            s.push_str(
                "| N | E(u) weighted | order | E(z) weighted | order | E(q) weighted | order | E(q) L² | order | iter | CPU(s) |\n",
            );
            s.push_str("|---|---|---|---|---|---|---|---|---|---|---|\n");
            for row in &r.rows {
                let e = &row.errors;
                let o = &row.orders;
                writeln!(
                    s,
                    "| {} | {:.2e} | {} | {:.2e} | {} | {} | {} | {:.2e} | {} | {} | {:.2} |",
                    row.n,
                    e.u_weighted,
                    opt_order(o.u_weighted),
                    e.z_weighted,
                    opt_order(o.z_weighted),
                    opt_err(e.q_weighted),
                    opt_order(o.q_weighted),
                    e.q_l2,
                    opt_order(o.q_l2),
                    row.outer_iterations,
                    row.seconds
                )?;
            }
            let expected = short_order(r.expected_order());
            writeln!(s, "| Expected order | | {expected} | | {expected} | | | | | | |")?;
            for f in &r.failures {
                writeln!(s, "\nN = {} failed: {}", f.n, f.message)?;
            }
            Ok(s)
        }
    }
}

/// One-line summary of a solve.
pub fn solve_summary(t: &OptimalTriple) -> String {
    let s = &t.stats;
    let mut line = format!(
        "N = {}: {} outer iterations, final change {:.2e}, {:.3} s, (σ, σ*) = ({:.4}, {:.4})",
        t.state.len().saturating_sub(1),
        s.outer_iterations,
        s.outer_history.last().copied().unwrap_or(0.0),
        s.seconds,
        t.pair.sigma,
        t.pair.sigma_star
    );
    if s.unconverged_inner > 0 {
        write!(line, ", {} inner solves stopped early", s.unconverged_inner).expect("writing to a String");
    }
    if s.diagnostic {
        line.push_str(" [diagnostic run without advection]");
    }
    line
}

/// Solution artifact: the full triple as JSON, coefficient columns as CSV,
/// or the summary with the leading coefficients as markdown.
pub fn render_solution(t: &OptimalTriple, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(t)? + "\n"),
        Format::Csv => csv_text(|w| {
            w.write_record(["n", "state", "adjoint"])?;
            for (n, (u, z)) in t.state.iter().zip(&t.adjoint).enumerate() {
                w.write_record([n.to_string(), sci(*u), sci(*z)])?;
            }
            Ok(())
        }),
        Format::Md => {
            let mut s = format!("{}\n\ncontrol constant: {}\n\n", solve_summary(t), t.control.constant);
            s.push_str("| n | state | adjoint |\n|---|---|---|\n");
            for (n, (u, z)) in t.state.iter().zip(&t.adjoint).enumerate() {
                writeln!(s, "| {n} | {u:.6e} | {z:.6e} |")?;
            }
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_are_trimmed() {
        assert_eq!(short_order(2.9), "2.9");
        assert_eq!(short_order(2.0), "2.0");
        assert_eq!(short_order(2.3414), "2.34");
        assert_eq!(short_order(3.4589), "3.46");
    }
}
