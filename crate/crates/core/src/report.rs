//! Text form of a [`SolveReport`]: `key = value` lines with floats in
//! `{:.16e}` form, which reparse to the same bits.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::asymptotics::BracketVerdict;
use crate::error::{Error, Result};
use crate::field::{Field2D, ProblemParams, Stencil};
use crate::functionals::EnergyBreakdown;
use crate::solver::SolveReport;

/// Writes `report` and the problem parameters it was solved for.
pub fn report_to_text(report: &SolveReport, params: &ProblemParams) -> String {
    let mut s = String::new();
    let mut put = |k: &str, v: f64| writeln!(s, "{k} = {v:.16e}").unwrap();
    put("q", report.q);
    put("a", report.a);
    put("b1", params.b1);
    put("b2", params.b2);
    put("A", params.ring);
    put("tau", report.tau);
    put("mu", report.mu);
    put("energy", report.energy.total);
    put("kinetic", report.energy.kinetic);
    put("potential", report.energy.potential);
    put("interaction", report.energy.interaction);
    put("residual_inf", report.residual_inf);
    put("residual_raw", report.residual_raw);
    put("pohozaev", report.pohozaev);
    put("pohozaev_res", report.pohozaev_res);
    put("eps", report.eps);
    put("center_x", report.center[0]);
    put("center_y", report.center[1]);
    put("sigma_1", report.sigma[0]);
    put("sigma_2", report.sigma[1]);
    put("grad_sq", report.grad_sq);
    put("grad_sq_corr", report.grad_sq_corr);
    put("gap", report.gap);
    put("energy_corr", report.energy_corr);
    put("lower_bound", report.lower_bound);
    put("upper_bound_stmt", report.upper_bound_stmt);
    put("upper_bound_proof", report.upper_bound_proof);
    put("mass_err", report.mass_err);
    put("min_ratio", report.min_ratio);
    put("reference_mu", report.reference_mu);
    writeln!(s, "iterations = {}", report.iterations).unwrap();
    writeln!(s, "bracket = {}", report.bracket).unwrap();
    writeln!(s, "stencil = {}", report.stencil.name()).unwrap();
    writeln!(s, "threads = {}", report.threads).unwrap();
    s
}

/// Inverse of [`report_to_text`]; the field comes from the companion dump.
pub fn report_from_text(text: &str, u: Field2D) -> Result<(ProblemParams, SolveReport)> {
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: idx + 1, msg: format!("expected `key = value`, got `{body}`") })?;
        map.insert(k.trim().to_string(), (idx + 1, v.trim().to_string()));
    }
    let raw = |k: &str| map.get(k).ok_or_else(|| Error::Parse { line: 0, msg: format!("report lacks `{k}`") });
    let num = |k: &str| -> Result<f64> {
        let (line, v) = raw(k)?;
        v.parse().map_err(|_| Error::Parse { line: *line, msg: format!("`{k}` expects a number, got `{v}`") })
    };
    let int = |k: &str| -> Result<usize> {
        let (line, v) = raw(k)?;
        v.parse().map_err(|_| Error::Parse { line: *line, msg: format!("`{k}` expects an integer, got `{v}`") })
    };
    let params = ProblemParams::new(num("a")?, num("q")?, num("b1")?, num("b2")?, num("A")?)?;
    let (line, b) = raw("bracket")?;
    let bracket =
        BracketVerdict::parse(b).ok_or_else(|| Error::Parse { line: *line, msg: format!("unknown bracket verdict `{b}`") })?;
    let (line, st) = raw("stencil")?;
    let stencil = match st.as_str() {
        "second" => Stencil::Second,
        "fourth" => Stencil::Fourth,
        _ => return Err(Error::Parse { line: *line, msg: format!("unknown stencil `{st}`") }),
    };
    let energy = EnergyBreakdown::new(num("kinetic")?, num("potential")?, num("interaction")?);
    let report = SolveReport {
        q: params.q,
        a: params.a,
        tau: num("tau")?,
        u,
        mu: num("mu")?,
        energy: EnergyBreakdown { total: num("energy")?, ..energy },
        residual_inf: num("residual_inf")?,
        residual_raw: num("residual_raw")?,
        pohozaev: num("pohozaev")?,
        pohozaev_res: num("pohozaev_res")?,
        eps: num("eps")?,
        iterations: int("iterations")?,
        center: [num("center_x")?, num("center_y")?],
        sigma: [num("sigma_1")?, num("sigma_2")?],
        grad_sq: num("grad_sq")?,
        grad_sq_corr: num("grad_sq_corr")?,
        gap: num("gap")?,
        energy_corr: num("energy_corr")?,
        lower_bound: num("lower_bound")?,
        upper_bound_stmt: num("upper_bound_stmt")?,
        upper_bound_proof: num("upper_bound_proof")?,
        bracket,
        mass_err: num("mass_err")?,
        min_ratio: num("min_ratio")?,
        reference_mu: num("reference_mu")?,
        threads: int("threads")?,
        stencil,
    };
    Ok((params, report))
}
