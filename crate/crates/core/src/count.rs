//! Counting the numbers below a bound whose defect sits under a threshold,
//! nested witnesses that force those counts to grow, and growth-exponent
//! fits against the counts.

use serde::Serialize;

use crate::defect::DefectThreshold;
use crate::error::Error;
use crate::report::CheckReport;
use crate::table::ComplexityTable;
use crate::Result;

/// `(|A ∩ [1, x]|, |B ∩ [1, x]|)` for the threshold: total members and
/// leaders among them. Exact; the threshold test is precomputed per
/// complexity value so the scan stays integer-only.
pub fn count_sets(
    table: &ComplexityTable,
    threshold: &DefectThreshold,
    x: u64,
) -> Result<(u64, u64)> {
    if x > table.limit() {
        return Err(Error::BoundExceedsLimit {
            x,
            limit: table.limit(),
        });
    }
    let min_n = threshold.min_n_table(255);
    let values = table.values();
    let mut a_count = 0u64;
    let mut b_count = 0u64;
    for n in 1..=x {
        if n >= min_n[values[n as usize] as usize] {
            a_count += 1;
            if table.is_leader_unchecked(n) {
                b_count += 1;
            }
        }
    }
    Ok((a_count, b_count))
}

/// A value `N = ((..((3*3^(n_k) + 1) * 3^(n_(k-1)) + 1)..) * 3^(n_1) + 1) * 3^(n_0)`
/// whose complexity is at most `3*(n_0 + .. + n_k + 1) + k`, so its defect
/// is at most `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NestedWitness {
    /// innermost exponent first: `[n_k, n_(k-1), .., n_1, n_0]`
    pub exponents: Vec<u32>,
    pub value: u64,
    pub complexity_bound: u32,
}

/// All leader-form witnesses (`n_0 = 0`, `n_1 >= 1`) with value at most `x`,
/// sorted by value.
pub fn nested_witnesses(k: u32, x: u64) -> Result<Vec<NestedWitness>> {
    if k < 1 {
        return Err(Error::KTooSmall);
    }
    let mut out = Vec::new();
    // exponents chosen from the inside out; levels 1..k multiply by
    // 3^(n_i) and add 1, level 0 multiplies by 3^(n_0) = 1
    fn rec(level: u32, value: u64, exps: &mut Vec<u32>, x: u64, out: &mut Vec<NestedWitness>) {
        if level == 0 {
            let mut exponents = exps.clone();
            exponents.push(0);
            let sum: u32 = exponents.iter().sum();
            let k = exponents.len() as u32 - 1;
            out.push(NestedWitness {
                exponents,
                value,
                complexity_bound: 3 * (sum + 1) + k,
            });
            return;
        }
        let min_e = if level == 1 { 1 } else { 0 };
        let mut e = min_e;
        loop {
            // value * 3^e + 1, with the remaining levels growing it further
            let mut scaled = value;
            let mut ok = true;
            for _ in 0..e {
                scaled = match scaled.checked_mul(3) {
                    Some(s) if s < x => s,
                    _ => {
                        ok = false;
                        break;
                    }
                };
            }
            if !ok {
                break;
            }
            let next = scaled + 1;
            if next > x {
                break;
            }
            exps.push(e);
            rec(level - 1, next, exps, x, out);
            exps.pop();
            e += 1;
        }
    }
    let mut exps = Vec::new();
    rec(k, 3, &mut exps, x, &mut out);
    out.sort_by_key(|w| w.value);
    Ok(out)
}

/// Counts the witnesses together with every in-range multiple by a power of
/// 3 (i.e. freeing `n_0`).
pub fn chain_count(witnesses: &[NestedWitness], x: u64) -> u64 {
    let mut count = 0u64;
    for w in witnesses {
        let mut v = w.value;
        while v <= x {
            count += 1;
            v = match v.checked_mul(3) {
                Some(next) => next,
                None => break,
            };
        }
    }
    count
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result = 1u64;
    for i in 0..k {
        result = result * (n - i) / (i + 1);
    }
    result
}

pub fn floor_log3(x: u64) -> u64 {
    let mut e = 0;
    let mut p = 1u64;
    while let Some(next) = p.checked_mul(3) {
        if next > x {
            break;
        }
        p = next;
        e += 1;
    }
    e
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub x: u64,
    pub a_count: u64,
    pub b_count: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// least-squares slope of `ln(a_count)` against `ln(ln(x))`
    pub fitted_exponent: Option<f64>,
    pub residuals: Vec<f64>,
    pub degenerate: bool,
}

/// Exact counts at each sample point and a fitted growth exponent.
/// Rows whose count is 0 or 1 are excluded from the fit; if fewer than two
/// usable rows remain the report is flagged degenerate instead of fitted.
pub fn growth_report(
    table: &ComplexityTable,
    threshold: &DefectThreshold,
    sample_points: &[u64],
) -> Result<GrowthReport> {
    if sample_points.len() < 3 {
        return Err(Error::TooFewPoints);
    }
    let mut rows = Vec::new();
    for &x in sample_points {
        let (a, b) = count_sets(table, threshold, x)?;
        rows.push(GrowthRow {
            x,
            a_count: a,
            b_count: b,
        });
    }

    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.a_count >= 2 && r.x >= 3)
        .map(|r| ((r.x as f64).ln().ln(), (r.a_count as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return Ok(GrowthReport {
            rows,
            fitted_exponent: None,
            residuals: Vec::new(),
            degenerate: true,
        });
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Ok(GrowthReport {
            rows,
            fitted_exponent: None,
            residuals: Vec::new(),
            degenerate: true,
        });
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residuals = pts
        .iter()
        .map(|p| p.1 - (slope * p.0 + intercept))
        .collect();
    Ok(GrowthReport {
        rows,
        fitted_exponent: Some(slope),
        residuals,
        degenerate: false,
    })
}

/// Witness sanity against a table: each in-range witness value must have
/// complexity at most its bound.
pub fn witness_report(table: &ComplexityTable, k: u32, x: u64) -> Result<(Vec<NestedWitness>, CheckReport)> {
    let start = std::time::Instant::now();
    let witnesses = nested_witnesses(k, x)?;
    let mut violations = Vec::new();
    for w in &witnesses {
        if w.value <= table.limit() {
            let c = table.complexity(w.value)?;
            if c > w.complexity_bound {
                violations.push(format!(
                    "witness {} exceeds its bound: {} > {}",
                    w.value, c, w.complexity_bound
                ));
            }
        }
    }
    // the +1 steps cost one 3-adic digit: the leader floor uses log3(x) - 1
    let floor = binomial(floor_log3(x).saturating_sub(1), k as u64);
    if (witnesses.len() as u64) < floor {
        violations.push(format!(
            "only {} leader witnesses, binomial floor is {floor}",
            witnesses.len()
        ));
    }
    let chain_floor = binomial(floor_log3(x), k as u64 + 1);
    if chain_count(&witnesses, x) < chain_floor {
        violations.push(format!(
            "only {} chained witnesses, binomial floor is {chain_floor}",
            chain_count(&witnesses, x)
        ));
    }
    Ok((
        witnesses,
        CheckReport::new("witnesses", x, violations, start.elapsed()),
    ))
}
