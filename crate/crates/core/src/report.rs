// SPDX-License-Identifier: Apache-2.0

//! Text output: line-oriented `key=value` records carrying every setting
//! needed to rerun a result, and fixed-width summary tables.
//!
//! Record numbers are printed with 17 significant digits so they parse back
//! to the same `f64`. Missing values print as `NA`.

use std::fmt::Write as _;

use crate::analysis::{DiscoveryReport, FamilyFit};
use crate::estimators::PriorMode;
use crate::procedures::Procedure;
use crate::simulation::{CompoundMode, Family, FamilyRow, SimulationReport};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), num)
}

fn family_kind(family: Family) -> &'static str {
    match family {
        Family::Simple => "simple",
        Family::Oracle => "oracle",
        Family::Compound(_) => "compound",
    }
}

fn mode_label(mode: CompoundMode) -> String {
    match mode {
        CompoundMode::EpsilonMultiple(k) => format!("phat({k}*lambda)"),
        CompoundMode::FixedP(p) => format!("p={p}"),
    }
}

fn column_label(family: Family) -> String {
    match family {
        Family::Compound(mode) => mode_label(mode),
        other => family_kind(other).into(),
    }
}

fn sim_record(out: &mut String, cell: &crate::simulation::CellReport, row: &FamilyRow) {
    let c = &cell.config;
    let multiple = match row.family {
        Family::Compound(CompoundMode::EpsilonMultiple(k)) => Some(k),
        _ => None,
    };
    let fields = [
        ("record", "simulation".to_string()),
        ("seed", c.seed.to_string()),
        ("theta", num(c.theta)),
        ("tau", num(c.tau)),
        ("lambda2", num(c.lambda2)),
        ("m", c.m.to_string()),
        ("m1", c.m1.to_string()),
        ("replicates", c.replicates.to_string()),
        ("alpha", num(c.alpha.value())),
        ("qvalue_lambda", num(c.qvalue_lambda)),
        ("family", family_kind(row.family).to_string()),
        ("eps_multiple", opt(multiple)),
        ("epsilon", opt(row.epsilon)),
        ("fixed_p", opt(row.fixed_p)),
        ("procedure", row.procedure.to_string()),
        ("avg_power", num(row.avg_power)),
        ("avg_fdr", num(row.avg_fdr)),
        ("fdr_se", num(row.fdr_se)),
        ("avg_pfdr", opt(row.avg_pfdr)),
        ("pfdr_se", opt(row.pfdr_se)),
        (
            "no_rejection_replicates",
            row.replicates_no_rejection.to_string(),
        ),
        ("avg_discoveries", num(row.avg_discoveries)),
        ("avg_p_raw", opt(row.avg_p_raw)),
    ];
    push_record(out, &fields);
}

fn push_record(out: &mut String, fields: &[(&str, String)]) {
    let line: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
    out.push_str(&line.join(" "));
    out.push('\n');
}

pub fn simulation_records(report: &SimulationReport) -> String {
    let mut out = String::new();
    for cell in &report.cells {
        for row in &cell.rows {
            sim_record(&mut out, cell, row);
        }
    }
    out
}

/// Average power per cell, then the controlled error rate (FDR for BH,
/// pFDR for Q), one block per procedure.
pub fn simulation_table(report: &SimulationReport) -> String {
    let mut out = String::new();
    let Some(first) = report.cells.first() else {
        return out;
    };
    let families = first.config.families();
    let c = &first.config;
    let _ = writeln!(
        out,
        "M={} M1={} K={} alpha={} seed={} qvalue_lambda={}",
        c.m,
        c.m1,
        c.replicates,
        c.alpha.value(),
        c.seed,
        c.qvalue_lambda
    );
    for (metric, title) in [(0, "average power"), (1, "average error rate")] {
        for procedure in Procedure::ALL {
            let what = match (metric, procedure) {
                (0, _) => title.to_string(),
                (_, Procedure::Bh) => format!("{title} (FDR)"),
                (_, Procedure::QValue) => format!("{title} (pFDR)"),
            };
            let _ = writeln!(out, "\n{procedure}: {what}");
            let _ = write!(out, "{:>6} {:>6} {:>8}", "theta", "tau", "lambda2");
            for f in &families {
                let _ = write!(out, " {:>16}", column_label(*f));
            }
            out.push('\n');
            for cell in &report.cells {
                let cc = &cell.config;
                let _ = write!(out, "{:>6} {:>6} {:>8}", cc.theta, cc.tau, cc.lambda2);
                for f in &families {
                    let v = cell.row_for(*f, procedure).and_then(|r| match metric {
                        0 => Some(r.avg_power),
                        _ if procedure == Procedure::Bh => Some(r.avg_fdr),
                        _ => r.avg_pfdr,
                    });
                    match v {
                        Some(v) => {
                            let _ = write!(out, " {v:>16.3}");
                        }
                        None => {
                            let _ = write!(out, " {:>16}", "NA");
                        }
                    }
                }
                out.push('\n');
            }
        }
    }
    out
}

fn mode_fields(mode: Option<PriorMode>) -> (String, String) {
    match mode {
        Some(PriorMode::Estimated { epsilon }) => (num(epsilon), "NA".into()),
        Some(PriorMode::Fixed(p)) => ("NA".into(), num(p)),
        None => ("NA".into(), "NA".into()),
    }
}

fn fit_fields(report: &DiscoveryReport, fit: &FamilyFit) -> Vec<(&'static str, String)> {
    let (epsilon, fixed_p) = mode_fields(fit.mode);
    let kind = if fit.mode.is_some() {
        "compound"
    } else {
        "simple"
    };
    vec![
        ("seed", report.seed.to_string()),
        ("training", report.training_ids.join(";")),
        ("qvalue_lambda", num(report.qvalue_lambda)),
        ("family", kind.into()),
        ("epsilon", epsilon),
        ("fixed_p", fixed_p),
        ("p_raw", opt(fit.p_raw)),
        ("p_hat", opt(fit.p_hat)),
        ("theta_hat", opt(fit.theta_hat)),
        ("tau2_hat", opt(fit.tau2_hat)),
        ("skipped", fit.skipped.to_string()),
    ]
}

pub fn analysis_records(report: &DiscoveryReport) -> String {
    let mut out = String::new();
    let mut header = vec![("record", "split".to_string())];
    header.extend([
        ("seed", report.seed.to_string()),
        ("training", report.training_ids.join(";")),
        (
            "degenerate_training_rows",
            report.degenerate_training_rows.to_string(),
        ),
        (
            "degenerate_test_rows",
            report.degenerate_test_rows.to_string(),
        ),
    ]);
    push_record(&mut out, &header);
    for fit in &report.families {
        let mut fields = vec![("record", "family".to_string())];
        fields.extend(fit_fields(report, fit));
        push_record(&mut out, &fields);
    }
    for d in &report.discoveries {
        let fit = report
            .families
            .iter()
            .find(|f| f.label == d.family)
            .expect("discoveries only come from fitted families");
        let mut fields = vec![("record", "discovery".to_string())];
        fields.extend(fit_fields(report, fit));
        fields.extend([
            ("procedure", d.procedure.to_string()),
            ("alpha", num(d.alpha)),
            ("count", d.count.to_string()),
            ("rejected", d.rejected_ids.join(";")),
        ]);
        push_record(&mut out, &fields);
    }
    out
}

/// Discovery counts with one row per α and one column per family and
/// procedure. Skipped families are listed below the table.
pub fn analysis_table(report: &DiscoveryReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "training columns: {}  seed={}  qvalue_lambda={}",
        report.training_ids.join(","),
        report.seed,
        report.qvalue_lambda
    );
    let mut columns: Vec<(String, Procedure)> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    for d in &report.discoveries {
        if !columns
            .iter()
            .any(|(f, p)| *f == d.family && *p == d.procedure)
        {
            columns.push((d.family.clone(), d.procedure));
        }
        if !alphas.contains(&d.alpha) {
            alphas.push(d.alpha);
        }
    }
    let _ = write!(out, "{:>6}", "alpha");
    for (f, p) in &columns {
        let _ = write!(out, " {:>20}", format!("{p}:{f}"));
    }
    out.push('\n');
    for &alpha in &alphas {
        let _ = write!(out, "{alpha:>6}");
        for (f, p) in &columns {
            let c = report.count(f, *p, alpha).expect("full grid");
            let _ = write!(out, " {c:>20}");
        }
        out.push('\n');
    }
    for fit in &report.families {
        if let (Some(p), Some(t), Some(t2)) = (fit.p_hat, fit.theta_hat, fit.tau2_hat) {
            let raw = fit
                .p_raw
                .map_or_else(|| "fixed".into(), |r| format!("{r:.4}"));
            let _ = writeln!(
                out,
                "{}: p_raw={raw} p_hat={p:.4} theta_hat={t:.4} tau2_hat={t2:.4}{}",
                fit.label,
                if fit.skipped {
                    "  SKIPPED (raw p-hat <= 0)"
                } else {
                    ""
                }
            );
        }
    }
    out
}

/// `eta,mu,lambda2_star` rows, one series per η.
pub fn power_curve_text(etas: &[f64], mu: &[f64], boundaries: &[Vec<f64>]) -> String {
    let mut out = String::from("eta,mu,lambda2_star\n");
    for (eta, series) in etas.iter().zip(boundaries) {
        for (m, b) in mu.iter().zip(series) {
            let _ = writeln!(out, "{},{},{}", num(*eta), num(*m), num(*b));
        }
    }
    out
}
