//! Additive and multiplicative structure of minimal representations:
//! solid numbers, good factorizations, m-irreducibility, leaders, chains,
//! and stability.

use std::fmt;

use crate::error::Error;
use crate::table::{cube_le, min_complexity_for, ComplexityTable};
use crate::{DefectThreshold, DefectValue, Result};

fn check_range(table: &ComplexityTable, n: u64) -> Result<()> {
    if n == 0 || n > table.limit() {
        return Err(Error::OutOfRange {
            n,
            limit: table.limit(),
        });
    }
    Ok(())
}

/// True when no split `n = a + b` attains `c(a) + c(b) = c(n)`.
pub fn is_solid(table: &ComplexityTable, n: u64) -> Result<bool> {
    check_range(table, n)?;
    let v = table.values();
    let c = v[n as usize];
    let mut b = 1u64;
    while b * 2 <= n {
        // equality needs 3*log3(b*(n-b)) <= c, and b*(n-b) grows with b
        if (b as u128) * ((n - b) as u128) > cube_le(c as u32) {
            break;
        }
        if v[b as usize] + v[(n - b) as usize] == c {
            return Ok(false);
        }
        b += 1;
    }
    Ok(true)
}

fn is_m_irreducible_raw(values: &[u8], n: u64) -> bool {
    let c = values[n as usize];
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 && values[d as usize] + values[(n / d) as usize] == c {
            return false;
        }
        d += 1;
    }
    true
}

/// True when every factorization `n = u*v` with `1 < u <= v < n` has
/// `c(u) + c(v) > c(n)`.
pub fn is_m_irreducible(table: &ComplexityTable, n: u64) -> Result<bool> {
    check_range(table, n)?;
    Ok(is_m_irreducible_raw(table.values(), n))
}

/// One factor of a factorization, remembering the primes it groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorBlock {
    pub product: u64,
    pub parts: Vec<u64>,
}

/// A factorization of `value` into the products of `blocks`, with each
/// block's constituent factors retained for display. Goodness at the top
/// level means `c(value)` equals the sum of the blocks' complexities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorTree {
    pub value: u64,
    pub blocks: Vec<FactorBlock>,
}

impl FactorTree {
    pub fn is_good(&self, table: &ComplexityTable) -> Result<bool> {
        let mut sum = 0u32;
        for b in &self.blocks {
            sum += table.complexity(b.product)?;
        }
        Ok(sum == table.complexity(self.value)?)
    }

    pub fn factor_count(&self) -> usize {
        self.blocks.len()
    }
}

impl fmt::Display for FactorTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.len() == 1 {
            return write!(f, "{}", self.blocks[0].product);
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if b.parts.len() > 1 {
                write!(f, "(")?;
                for (j, p) in b.parts.iter().enumerate() {
                    if j > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")?;
            } else {
                write!(f, "{}", b.product)?;
            }
        }
        Ok(())
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        while n % d == 0 {
            out.push(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A good factorization of `n` into m-irreducible factors. Deterministic:
/// the recursion always splits off the smallest good divisor first.
pub fn factor_into_m_irreducibles(table: &ComplexityTable, n: u64) -> Result<FactorTree> {
    check_range(table, n)?;
    let values = table.values();
    fn split(values: &[u8], n: u64, out: &mut Vec<u64>) {
        if n == 1 || is_m_irreducible_raw(values, n) {
            out.push(n);
            return;
        }
        let c = values[n as usize];
        let mut d = 2u64;
        loop {
            debug_assert!(d * d <= n);
            if n % d == 0 && values[d as usize] + values[(n / d) as usize] == c {
                split(values, d, out);
                split(values, n / d, out);
                return;
            }
            d += 1;
        }
    }
    let mut factors = Vec::new();
    split(values, n, &mut factors);
    factors.sort_unstable();
    let blocks = factors
        .into_iter()
        .map(|f| FactorBlock {
            product: f,
            parts: if f == 1 { vec![1] } else { prime_factors(f) },
        })
        .collect();
    Ok(FactorTree { value: n, blocks })
}

/// All groupings of the factor multiset into blocks whose induced
/// factorization is good at the top level. The single-block grouping is the
/// trivial factorization and is always present. Every returned grouping is
/// re-checked for heredity: each subset of its blocks must multiply to a
/// good factorization too.
pub fn enumerate_good_groupings(
    table: &ComplexityTable,
    factors: &[u64],
) -> Result<Vec<FactorTree>> {
    if factors.is_empty() || factors.iter().any(|&f| f <= 1) {
        return Err(Error::BadFactorSet);
    }
    if factors.len() > 16 {
        return Err(Error::TooManyFactors(factors.len()));
    }
    let mut product: u64 = 1;
    for &f in factors {
        product = product
            .checked_mul(f)
            .filter(|&p| p <= table.limit())
            .ok_or(Error::OutOfRange {
                n: u64::MAX,
                limit: table.limit(),
            })?;
    }
    let values = table.values();
    let target = values[product as usize] as u32;

    // distinct factor values with multiplicities, largest first
    let mut sorted = factors.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut counts: Vec<(u64, u32)> = Vec::new();
    for f in sorted {
        match counts.last_mut() {
            Some((v, c)) if *v == f => *c += 1,
            _ => counts.push((f, 1)),
        }
    }

    let mut results: Vec<Vec<Vec<u64>>> = Vec::new();

    // Every partition is produced once: each block is anchored on the
    // largest element still unplaced, joined by a sub-multiset of the rest.
    fn rec(
        counts: &mut Vec<(u64, u32)>,
        blocks: &mut Vec<Vec<u64>>,
        partial_sum: u32,
        remaining_product: u64,
        target: u32,
        values: &[u8],
        results: &mut Vec<Vec<Vec<u64>>>,
    ) {
        let anchor_idx = match counts.iter().position(|&(_, c)| c > 0) {
            Some(i) => i,
            None => {
                if partial_sum == target {
                    results.push(blocks.clone());
                }
                return;
            }
        };
        let anchor = counts[anchor_idx].0;
        counts[anchor_idx].1 -= 1;

        // enumerate sub-multisets of the remaining elements to join the anchor
        let take_max: Vec<u32> = counts.iter().map(|&(_, c)| c).collect();
        let mut take = vec![0u32; counts.len()];
        loop {
            let mut block = vec![anchor];
            let mut block_product = anchor;
            let mut overflow = false;
            for (i, &t) in take.iter().enumerate() {
                for _ in 0..t {
                    block.push(counts[i].0);
                    block_product = match block_product.checked_mul(counts[i].0) {
                        Some(p) => p,
                        None => {
                            overflow = true;
                            break;
                        }
                    };
                }
                if overflow {
                    break;
                }
            }
            if !overflow {
                let block_c = values[block_product as usize] as u32;
                let rest_product = remaining_product / block_product;
                // any grouping of the rest costs at least ceil(3*log3(rest))
                let floor_rest = if rest_product > 1 {
                    min_complexity_for(rest_product as u128)
                } else {
                    0
                };
                if partial_sum + block_c + floor_rest <= target {
                    for (i, &t) in take.iter().enumerate() {
                        counts[i].1 -= t;
                    }
                    blocks.push(block);
                    rec(
                        counts,
                        blocks,
                        partial_sum + block_c,
                        rest_product,
                        target,
                        values,
                        results,
                    );
                    blocks.pop();
                    for (i, &t) in take.iter().enumerate() {
                        counts[i].1 += t;
                    }
                }
            }

            // odometer over take vectors
            let mut i = 0;
            loop {
                if i == take.len() {
                    break;
                }
                if take[i] < take_max[i] {
                    take[i] += 1;
                    break;
                }
                take[i] = 0;
                i += 1;
            }
            if i == take.len() {
                break;
            }
        }

        counts[anchor_idx].1 += 1;
    }

    rec(
        &mut counts,
        &mut Vec::new(),
        0,
        product,
        target,
        values,
        &mut results,
    );

    let mut trees = Vec::new();
    for blocks in results {
        let mut fb: Vec<FactorBlock> = blocks
            .into_iter()
            .map(|mut parts| {
                parts.sort_unstable();
                FactorBlock {
                    product: parts.iter().product(),
                    parts,
                }
            })
            .collect();
        fb.sort_by(|x, y| x.product.cmp(&y.product).then_with(|| x.parts.cmp(&y.parts)));

        // heredity: every subset of the blocks multiplies to a good factorization
        let k = fb.len();
        if k <= 20 {
            for mask in 1u32..(1 << k) {
                let mut prod: u64 = 1;
                let mut sum = 0u32;
                for (i, b) in fb.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        prod *= b.product;
                        sum += values[b.product as usize] as u32;
                    }
                }
                if values[prod as usize] as u32 != sum {
                    return Err(Error::Internal(format!(
                        "good grouping of {product} fails heredity on block subset {mask:#b}"
                    )));
                }
            }
        }
        trees.push(FactorTree {
            value: product,
            blocks: fb,
        });
    }
    trees.sort_by(|a, b| {
        let ka: Vec<u64> = a.blocks.iter().map(|x| x.product).collect();
        let kb: Vec<u64> = b.blocks.iter().map(|x| x.product).collect();
        ka.len().cmp(&kb.len()).then_with(|| ka.cmp(&kb))
    });
    Ok(trees)
}

/// True when `n` cannot be written most-efficiently as `3 * (n/3)`;
/// equivalently, `n` is the smallest number with its defect value.
pub fn is_leader(table: &ComplexityTable, n: u64) -> Result<bool> {
    check_range(table, n)?;
    Ok(table.is_leader_unchecked(n))
}

/// A number `m = leader * 3^exponent` whose whole chain shares one defect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeaderChain {
    pub leader: u64,
    pub exponent: u32,
}

/// The unique leader `n <= m` with the same defect as `m`.
pub fn chain_decompose(table: &ComplexityTable, m: u64) -> Result<LeaderChain> {
    check_range(table, m)?;
    let v = table.values();
    let mut n = m;
    let mut k = 0u32;
    while n % 3 == 0 && v[n as usize] == v[(n / 3) as usize] + 3 {
        n /= 3;
        k += 1;
    }
    Ok(LeaderChain {
        leader: n,
        exponent: k,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilityVerdict {
    /// No defect drop can ever occur: `n > 1` and the defect sits below the
    /// certification bound `12*d(2) + 1`.
    StableCertified,
    /// `c(3^k * n) < c(n) + 3k` at the least such `k`.
    Unstable { witness: u32 },
    /// No drop within the searched horizon, but no certificate either.
    StableUpTo { horizon: u32 },
}

/// Searches `k = 1..=horizon` for an instability witness, then tries the
/// exact certification bound.
pub fn stability_status(
    table: &ComplexityTable,
    n: u64,
    horizon: u32,
) -> Result<StabilityVerdict> {
    check_range(table, n)?;
    let mut top = n;
    for _ in 0..horizon {
        top = top.checked_mul(3).ok_or(Error::HorizonOutOfRange {
            n,
            horizon,
            limit: table.limit(),
        })?;
    }
    if top > table.limit() {
        return Err(Error::HorizonOutOfRange {
            n,
            horizon,
            limit: table.limit(),
        });
    }
    let v = table.values();
    let base = v[n as usize] as u32;
    let mut m = n;
    for k in 1..=horizon {
        m *= 3;
        if (v[m as usize] as u32) < base + 3 * k {
            return Ok(StabilityVerdict::Unstable { witness: k });
        }
    }
    if n > 1 && DefectValue::of(table, n)?.below(&DefectThreshold::stability_certification()) {
        return Ok(StabilityVerdict::StableCertified);
    }
    Ok(StabilityVerdict::StableUpTo { horizon })
}
