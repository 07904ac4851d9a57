//! Rendering helpers. Human and JSON output of one run carry the same
//! numbers; CSV is available where the data is tabular.

use std::path::Path;
use std::time::Duration;

use clap::ValueEnum;
use serde_json::json;

use icx_core::classify::{SetSnapshot, TSet};
use icx_core::count::{GrowthReport, NestedWitness};
use icx_core::expr::ExpressionTree;
use icx_core::report::CheckReport;
use icx_core::structure::{FactorTree, LeaderChain, StabilityVerdict};
use icx_core::{DefectThreshold, DefectValue};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

pub fn emit_build(
    format: Format,
    limit: u64,
    path: &Path,
    elapsed: Duration,
) -> anyhow::Result<()> {
    match format {
        Format::Json => println!(
            "{}",
            json!({"built": limit, "cache": path.display().to_string(), "elapsed_ms": elapsed.as_millis() as u64})
        ),
        _ => println!(
            "built table to {limit} in {:.1}s, cached at {}",
            elapsed.as_secs_f64(),
            path.display()
        ),
    }
    Ok(())
}

pub fn emit_complexity(format: Format, n: u64, c: u32) -> anyhow::Result<()> {
    match format {
        Format::Json => println!("{}", json!({"n": n, "complexity": c})),
        _ => println!("{c}"),
    }
    Ok(())
}

pub fn emit_defect(format: Format, n: u64, d: &DefectValue) -> anyhow::Result<()> {
    match format {
        Format::Json => println!(
            "{}",
            json!({"n": n, "complexity": d.complexity(), "defect": format!("{:.4}", d.approx())})
        ),
        _ => println!("defect({n}) = {d}"),
    }
    Ok(())
}

pub fn emit_bool(format: Format, what: &str, n: u64, value: bool) -> anyhow::Result<()> {
    match format {
        Format::Json => println!("{}", json!({"n": n, what: value})),
        _ => println!("{value}"),
    }
    Ok(())
}

pub fn emit_factorization(format: Format, tree: &FactorTree) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            let blocks: Vec<_> = tree
                .blocks
                .iter()
                .map(|b| json!({"factor": b.product, "primes": b.parts}))
                .collect();
            println!("{}", json!({"n": tree.value, "factorization": blocks}));
        }
        _ => println!("{} = {tree}", tree.value),
    }
    Ok(())
}

pub fn emit_representations(
    format: Format,
    n: u64,
    trees: &[ExpressionTree],
    count: u64,
) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            let rendered: Vec<String> = trees.iter().map(|t| t.to_string()).collect();
            println!(
                "{}",
                json!({"n": n, "count": count, "ones": trees.first().map(|t| t.ones_count()), "trees": rendered})
            );
        }
        _ => {
            for t in trees {
                println!("{n} = {t}");
            }
            println!("distinct minimal representations: {count}");
        }
    }
    Ok(())
}

pub fn emit_chain(format: Format, n: u64, chain: &LeaderChain) -> anyhow::Result<()> {
    match format {
        Format::Json => println!(
            "{}",
            json!({"n": n, "leader": chain.leader, "exponent": chain.exponent})
        ),
        _ => println!("{n} = {} * 3^{}", chain.leader, chain.exponent),
    }
    Ok(())
}

pub fn emit_stability(
    format: Format,
    n: u64,
    horizon: u32,
    verdict: &StabilityVerdict,
) -> anyhow::Result<()> {
    let (status, detail) = match verdict {
        StabilityVerdict::StableCertified => ("stable-certified".to_string(), None),
        StabilityVerdict::Unstable { witness } => ("unstable".to_string(), Some(*witness)),
        StabilityVerdict::StableUpTo { horizon } => (format!("stable-up-to-{horizon}"), None),
    };
    match format {
        Format::Json => println!(
            "{}",
            json!({"n": n, "horizon": horizon, "status": status, "witness": detail})
        ),
        _ => match verdict {
            StabilityVerdict::StableCertified => println!("{n}: stable (certified)"),
            StabilityVerdict::Unstable { witness } => {
                println!("{n}: unstable, first drop at k = {witness}")
            }
            StabilityVerdict::StableUpTo { horizon } => {
                println!("{n}: no drop up to k = {horizon} (uncertified)")
            }
        },
    }
    Ok(())
}

pub fn emit_tset(format: Format, tset: &TSet) -> anyhow::Result<()> {
    match format {
        Format::Json => println!(
            "{}",
            json!({"alpha": format!("{}", tset.alpha), "members": tset.members})
        ),
        _ => {
            let rendered: Vec<String> = tset.members.iter().map(|m| m.to_string()).collect();
            println!("{{{}}}", rendered.join(", "));
        }
    }
    Ok(())
}

pub fn emit_ladder(
    format: Format,
    snaps: &[SetSnapshot],
    report: &CheckReport,
) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            let steps: Vec<_> = snaps
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    json!({
                        "step": i + 1,
                        "threshold": format!("{}", s.threshold),
                        "leaders": s.leaders,
                    })
                })
                .collect();
            println!(
                "{}",
                json!({"steps": steps, "check": report.check, "bound": report.bound,
                       "violations": report.violations, "elapsed_ms": report.elapsed_ms as u64})
            );
        }
        Format::Csv => {
            println!("step,threshold,leader");
            for (i, s) in snaps.iter().enumerate() {
                for l in &s.leaders {
                    println!("{},{:.4},{l}", i + 1, s.threshold.approx());
                }
            }
        }
        Format::Human => {
            let mut prev: Vec<u64> = Vec::new();
            for (i, s) in snaps.iter().enumerate() {
                let fresh: Vec<String> = s
                    .leaders
                    .iter()
                    .filter(|l| !prev.contains(l))
                    .map(|l| l.to_string())
                    .collect();
                println!(
                    "step {:>2} ({:.4}): {} leaders, new: {{{}}}",
                    i + 1,
                    s.threshold.approx(),
                    s.leaders.len(),
                    fresh.join(", ")
                );
                prev = s.leaders.clone();
            }
            print_report_human(report);
        }
    }
    Ok(())
}

fn print_report_human(report: &CheckReport) {
    if report.passed() {
        println!(
            "{}: PASS (bound {}, {} ms)",
            report.check, report.bound, report.elapsed_ms
        );
    } else {
        println!(
            "{}: FAIL with {} violation(s) (bound {}, {} ms)",
            report.check,
            report.violations.len(),
            report.bound,
            report.elapsed_ms
        );
        for v in report.violations.iter().take(25) {
            println!("  - {v}");
        }
        if report.violations.len() > 25 {
            println!("  ... and {} more", report.violations.len() - 25);
        }
    }
}

pub fn emit_reports(format: Format, reports: &[CheckReport]) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            println!("{}", serde_json::to_string(reports)?);
        }
        Format::Csv => {
            println!("check,bound,violations,elapsed_ms");
            for r in reports {
                println!(
                    "{},{},{},{}",
                    r.check,
                    r.bound,
                    r.violations.len(),
                    r.elapsed_ms
                );
            }
        }
        Format::Human => {
            for r in reports {
                print_report_human(r);
            }
        }
    }
    Ok(())
}

pub fn emit_count(
    format: Format,
    threshold: &DefectThreshold,
    x: u64,
    a: u64,
    b: u64,
) -> anyhow::Result<()> {
    match format {
        Format::Json => println!(
            "{}",
            json!({"threshold": format!("{threshold}"), "x": x, "a_count": a, "b_count": b})
        ),
        Format::Csv => {
            println!("threshold,x,a_count,b_count");
            println!("{:.4},{x},{a},{b}", threshold.approx());
        }
        Format::Human => println!(
            "below {:.4} up to {x}: {a} members, {b} leaders",
            threshold.approx()
        ),
    }
    Ok(())
}

pub fn emit_witnesses(
    format: Format,
    witnesses: &[NestedWitness],
    report: &CheckReport,
    x: u64,
) -> anyhow::Result<()> {
    match format {
        Format::Json => println!(
            "{}",
            json!({"x": x, "count": witnesses.len(), "witnesses": witnesses,
                   "check": report.check, "violations": report.violations})
        ),
        Format::Csv => {
            println!("value,bound,exponents");
            for w in witnesses {
                let exps: Vec<String> = w.exponents.iter().map(|e| e.to_string()).collect();
                println!("{},{},{}", w.value, w.complexity_bound, exps.join(" "));
            }
        }
        Format::Human => {
            for w in witnesses {
                println!(
                    "{} (exponents {:?}, at most {} ones)",
                    w.value, w.exponents, w.complexity_bound
                );
            }
            println!("{} witnesses up to {x}", witnesses.len());
            print_report_human(report);
        }
    }
    Ok(())
}

pub fn emit_growth(
    format: Format,
    threshold: &DefectThreshold,
    report: &GrowthReport,
) -> anyhow::Result<()> {
    match format {
        Format::Json => println!(
            "{}",
            json!({"threshold": format!("{threshold}"), "rows": report.rows,
                   "fitted_exponent": report.fitted_exponent, "residuals": report.residuals,
                   "degenerate": report.degenerate})
        ),
        Format::Csv => {
            println!("x,a_count,b_count");
            for r in &report.rows {
                println!("{},{},{}", r.x, r.a_count, r.b_count);
            }
        }
        Format::Human => {
            for r in &report.rows {
                println!("x = {:>10}: {} members, {} leaders", r.x, r.a_count, r.b_count);
            }
            match report.fitted_exponent {
                Some(e) => println!("fitted exponent: {e:.3} (residuals {:?})", report.residuals),
                None => println!("fit degenerate (counts too small)"),
            }
        }
    }
    Ok(())
}
