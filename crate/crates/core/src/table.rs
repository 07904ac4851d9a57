//! The complexity sieve.
//!
//! `c(1) = 1`, and for `n > 1` the complexity is the minimum of
//! `c(a) + c(b)` over all splits `n = a + b` and `n = a * b`. A dense table
//! is filled in increasing order: product candidates are pushed forward from
//! each finished entry (`n * a` for `a <= n`), and the addition scan over
//! smaller addends `b = 1, 2, ...` stops as soon as
//! `3*log3(b*(n-b)) >= best`, tested exactly as `(b*(n-b))^3 >= 3^best`.
//! The stop is sound because `c(b) + c(n-b) >= 3*log3(b*(n-b))` and
//! `b*(n-b)` increases while `b <= n/2`; in practice the scan is a handful
//! of steps. Entries obey `3*log3(n) <= c(n) <= 3*log2(n)`, so a byte per
//! integer suffices for every limit up to 2^40.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::defect::{pow3, DefectValue};
use crate::error::Error;
use crate::report::CheckReport;
use crate::Result;

pub const MAX_LIMIT: u64 = 1 << 40;

const BOUND_ENTRIES: usize = 384;

fn bound_tables() -> &'static (Vec<u128>, Vec<u128>) {
    static TABLES: OnceLock<(Vec<u128>, Vec<u128>)> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut lt = Vec::with_capacity(BOUND_ENTRIES);
        let mut le = Vec::with_capacity(BOUND_ENTRIES);
        for c in 0..BOUND_ENTRIES {
            let p = pow3(c as u32);
            let root = p.cbrt();
            let exact = &root * &root * &root == p;
            let le_c = root.to_u128().unwrap_or(u128::MAX);
            le.push(le_c);
            lt.push(if exact { le_c.saturating_sub(1) } else { le_c });
        }
        (lt, le)
    })
}

/// Largest `m` with `m^3 < 3^c` (saturating).
pub(crate) fn cube_lt(c: u32) -> u128 {
    bound_tables().0[c as usize]
}

/// Largest `m` with `m^3 <= 3^c` (saturating).
pub(crate) fn cube_le(c: u32) -> u128 {
    bound_tables().1[c as usize]
}

/// Least `c` with `3^c >= m^3`, i.e. the integer lower bound `ceil(3*log3(m))`.
pub(crate) fn min_complexity_for(m: u128) -> u32 {
    let (_, le) = bound_tables();
    le.partition_point(|&bound| bound < m) as u32
}

/// Dense table of complexities for `1..=limit`, one byte per integer.
#[derive(Clone, PartialEq, Eq)]
pub struct ComplexityTable {
    limit: u64,
    values: Vec<u8>,
}

impl ComplexityTable {
    pub fn build(limit: u64) -> Result<Self> {
        if !(2..=MAX_LIMIT).contains(&limit) {
            return Err(Error::LimitOutOfRange { limit });
        }
        let len = (limit + 1) as usize;
        let mut values: Vec<u8> = Vec::new();
        values
            .try_reserve_exact(len)
            .map_err(|_| Error::Allocation { bytes: len })?;
        values.resize(len, u8::MAX);
        values[0] = 0;
        values[1] = 1;

        for n in 2..=limit {
            let i = n as usize;
            let mut best = values[i].min(values[i - 1] + 1);
            let mut b = 2u64;
            while b * 2 <= n {
                if (b as u128) * ((n - b) as u128) > cube_lt(best as u32) {
                    break;
                }
                let cand = values[b as usize] + values[(n - b) as usize];
                if cand < best {
                    best = cand;
                }
                b += 1;
            }
            values[i] = best;

            let a_max = n.min(limit / n);
            for a in 2..=a_max {
                let cand = best + values[a as usize];
                let slot = &mut values[(n * a) as usize];
                if cand < *slot {
                    *slot = cand;
                }
            }
        }
        Ok(ComplexityTable { limit, values })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn complexity(&self, n: u64) -> Result<u32> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange {
                n,
                limit: self.limit,
            });
        }
        Ok(self.values[n as usize] as u32)
    }

    pub fn get(&self, n: u64) -> Option<u32> {
        (1..=self.limit)
            .contains(&n)
            .then(|| self.values[n as usize] as u32)
    }

    pub fn defect(&self, n: u64) -> Result<DefectValue> {
        DefectValue::of(self, n)
    }

    pub(crate) fn values(&self) -> &[u8] {
        &self.values
    }

    /// Complexities of `1..=limit` as raw bytes (byte `i - 1` holds `c(i)`).
    pub fn payload(&self) -> &[u8] {
        &self.values[1..]
    }

    /// Rebuilds a table from a serialized payload.
    pub fn from_payload(limit: u64, payload: Vec<u8>) -> Result<Self> {
        if !(2..=MAX_LIMIT).contains(&limit) {
            return Err(Error::LimitOutOfRange { limit });
        }
        if payload.len() as u64 != limit || payload[0] != 1 {
            return Err(Error::Internal(
                "payload does not describe a complexity table".into(),
            ));
        }
        let mut values = Vec::with_capacity(payload.len() + 1);
        values.push(0);
        values.extend_from_slice(&payload);
        Ok(ComplexityTable { limit, values })
    }

    /// Leader test without range checking: `n` is a leader when it is not
    /// written most-efficiently as `3 * (n/3)`.
    pub(crate) fn is_leader_unchecked(&self, n: u64) -> bool {
        n % 3 != 0
            || self.values[n as usize] < self.values[(n / 3) as usize] + 3
    }
}

/// Largest integer writable with `k` ones: `E(1) = 1`, and for `k = 3j + i`,
/// `E(3j) = 3^j`, `E(3j+1) = 4*3^(j-1)`, `E(3j+2) = 2*3^j`.
pub fn e_selfridge(k: u64) -> Result<BigUint> {
    if k < 1 {
        return Err(Error::KTooSmall);
    }
    if k == 1 {
        return Ok(BigUint::from(1u32));
    }
    let j = (k / 3) as u32;
    Ok(match k % 3 {
        0 => pow3(j),
        1 => BigUint::from(4u32) * pow3(j - 1),
        _ => BigUint::from(2u32) * pow3(j),
    })
}

/// The `(r+1)`-th largest number with complexity at most `k`, or `None` when
/// fewer than `r + 1` such numbers exist.
pub fn e_rank(table: &ComplexityTable, r: u64, k: u64) -> Result<Option<u64>> {
    if k < 1 {
        return Err(Error::KTooSmall);
    }
    let ek = e_selfridge(k)?;
    let top = ek.to_u64().filter(|&v| v <= table.limit()).ok_or_else(|| {
        Error::TableTooSmall {
            k,
            needed: ek.clone(),
            limit: table.limit(),
        }
    })?;
    let mut seen = 0u64;
    for n in (1..=top).rev() {
        if table.values()[n as usize] as u64 <= k {
            if seen == r {
                return Ok(Some(n));
            }
            seen += 1;
        }
    }
    Ok(None)
}

/// Checks the closed forms for `E(k)` against the table: the maximum of
/// `{n : c(n) <= k}` must equal `E(k)` and must need exactly `k` ones.
pub fn selfridge_report(table: &ComplexityTable) -> CheckReport {
    let start = std::time::Instant::now();
    let mut violations = Vec::new();

    // one pass collecting max n per complexity bound
    let k_max = largest_k_with_e_in(table);
    let mut max_for = vec![0u64; 256];
    for n in 1..=table.limit() {
        let c = table.values()[n as usize] as usize;
        if n > max_for[c] {
            max_for[c] = n;
        }
    }
    let mut running = 0u64;
    let mut max_upto = vec![0u64; 256];
    for (c, slot) in max_for.iter().enumerate() {
        running = running.max(*slot);
        max_upto[c] = running;
    }

    for k in 1..=k_max {
        let ek = e_selfridge(k).unwrap().to_u64().unwrap();
        if max_upto[k as usize] != ek {
            violations.push(format!(
                "max complexity-{k} value is {} instead of {ek}",
                max_upto[k as usize]
            ));
        }
        if table.values()[ek as usize] as u64 != k {
            violations.push(format!(
                "E({k}) = {ek} uses {} ones instead of {k}",
                table.values()[ek as usize]
            ));
        }
    }

    CheckReport::new("selfridge", table.limit(), violations, start.elapsed())
}

/// Largest `k` with `E(k) <= limit`.
pub fn largest_k_with_e_in(table: &ComplexityTable) -> u64 {
    let mut k = 1;
    while e_selfridge(k + 1)
        .unwrap()
        .to_u64()
        .is_some_and(|v| v <= table.limit())
    {
        k += 1;
    }
    k
}

/// Checks the second- and third-largest values with a given complexity:
/// `9*E_1(k) = 8*E(k)` for `k >= 8` (and `<=` for `2 <= k <= 7`), and the
/// three residue formulas for `E_2`.
pub fn rawsthorne_report(table: &ComplexityTable) -> CheckReport {
    let start = std::time::Instant::now();
    let mut violations = Vec::new();
    let k_max = largest_k_with_e_in(table);

    for k in 2..=k_max {
        let ek = e_selfridge(k).unwrap().to_u64().unwrap();
        match e_rank(table, 1, k) {
            Ok(Some(e1)) => {
                let exact = 9 * e1 == 8 * ek;
                if k >= 8 && !exact {
                    violations.push(format!("E_1({k}) = {e1} but 8/9 E({k}) = {}", 8 * ek / 9));
                }
                if k < 8 && 9 * e1 > 8 * ek {
                    violations.push(format!("E_1({k}) = {e1} exceeds 8/9 E({k})"));
                }
            }
            Ok(None) => violations.push(format!("E_1({k}) does not exist")),
            Err(e) => violations.push(format!("E_1({k}): {e}")),
        }
    }

    // E_2 residue formulas, valid from j = 4 on
    for k in 12..=k_max {
        let j = k / 3;
        if j < 4 {
            continue;
        }
        let ek = e_selfridge(k).unwrap().to_u64().unwrap();
        match e_rank(table, 2, k) {
            Ok(Some(e2)) => {
                let ok = match k % 3 {
                    0 => 81 * e2 == 64 * ek,
                    _ => 6 * e2 == 5 * ek,
                };
                if !ok {
                    violations.push(format!("E_2({k}) = {e2} breaks the residue formula"));
                }
            }
            Ok(None) => violations.push(format!("E_2({k}) does not exist")),
            Err(e) => violations.push(format!("E_2({k}): {e}")),
        }
    }

    CheckReport::new("rawsthorne", table.limit(), violations, start.elapsed())
}
