//! Exact defect arithmetic.
//!
//! A defect is the quantity `c - 3*log3(n)` for a complexity `c` and a value
//! `n`; a threshold is `(a - 3*log3(b)) / q`. Every ordering question between
//! such quantities cross-multiplies into a comparison of integers of the form
//! `3^e * m`, so no floating point ever participates in a decision. Floats
//! appear only in display helpers.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::Error;
use crate::table::ComplexityTable;
use crate::Result;

pub(crate) fn pow3(e: u32) -> BigUint {
    BigUint::from(3u32).pow(e)
}

fn cube(x: &BigUint) -> BigUint {
    x * x * x
}

/// Compares `3^e1 * x` with `3^e2 * y` exactly.
pub(crate) fn cmp_pow3_scaled(e1: i64, x: &BigUint, e2: i64, y: &BigUint) -> Ordering {
    let s = e1.min(e2);
    let lhs = x * pow3(u32::try_from(e1 - s).expect("exponent gap fits u32"));
    let rhs = y * pow3(u32::try_from(e2 - s).expect("exponent gap fits u32"));
    lhs.cmp(&rhs)
}

/// The defect of a concrete number: `complexity - 3*log3(n)`.
///
/// Ordering and equality are the exact orderings of the denoted real numbers,
/// so two values with different fields can compare equal (their values then
/// differ by a power of 3).
#[derive(Clone, Copy, Debug)]
pub struct DefectValue {
    n: u64,
    complexity: u32,
}

impl DefectValue {
    pub fn new(n: u64, complexity: u32) -> Self {
        assert!(n >= 1, "defect values are defined for n >= 1");
        DefectValue { n, complexity }
    }

    /// Reads `n` and its tabulated complexity.
    pub fn of(table: &ComplexityTable, n: u64) -> Result<Self> {
        Ok(DefectValue::new(n, table.complexity(n)?))
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn complexity(&self) -> u32 {
        self.complexity
    }

    /// True exactly when the defect is 0, i.e. `3^c = n^3`.
    pub fn is_zero(&self) -> bool {
        cmp_pow3_scaled(
            self.complexity as i64,
            &BigUint::one(),
            0,
            &cube(&BigUint::from(self.n)),
        ) == Ordering::Equal
    }

    /// Strict comparison against a threshold: `c - 3*log3(n) < t`.
    pub fn below(&self, t: &DefectThreshold) -> bool {
        // q*c - A < 3*log3(n^q / B)  <=>  3^(q*c - A) * B^3 < n^(3q)
        let e = t.q as i64 * self.complexity as i64 - t.a;
        let npow = BigUint::from(self.n).pow(3 * t.q);
        cmp_pow3_scaled(e, &cube(&t.b), 0, &npow) == Ordering::Less
    }

    /// Display-only approximation.
    pub fn approx(&self) -> f64 {
        self.complexity as f64 - 3.0 * (self.n as f64).ln() / 3f64.ln()
    }
}

impl PartialEq for DefectValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for DefectValue {}

impl PartialOrd for DefectValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DefectValue {
    /// `c1 - 3*log3(n1)` vs `c2 - 3*log3(n2)`  <=>  `3^c1 * n2^3` vs `3^c2 * n1^3`.
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_pow3_scaled(
            self.complexity as i64,
            &cube(&BigUint::from(other.n)),
            other.complexity as i64,
            &cube(&BigUint::from(self.n)),
        )
    }
}

impl fmt::Display for DefectValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} - 3*log3({}) = {:.4}",
            self.complexity,
            self.n,
            self.approx()
        )
    }
}

/// An exact threshold `(a - 3*log3(b)) / q`.
///
/// `q = 1` covers the forms that arise from the step-size machinery:
/// `k*d(2) = 2k - 3*log3(2^k)`, plain integers `r = r - 3*log3(1)`, and custom
/// pairs. The denominator admits exact rational thresholds such as `3/2` that
/// have no `(a, b)` representation.
#[derive(Clone, Debug)]
pub struct DefectThreshold {
    a: i64,
    b: BigUint,
    q: u32,
}

impl DefectThreshold {
    /// `k * d(2)` where `d(2) = 2 - 3*log3(2)`.
    pub fn delta2_multiple(k: u32) -> Self {
        DefectThreshold {
            a: 2 * k as i64,
            b: BigUint::one() << k,
            q: 1,
        }
    }

    pub fn integer(r: i64) -> Self {
        DefectThreshold {
            a: r,
            b: BigUint::one(),
            q: 1,
        }
    }

    pub fn custom(a: i64, b: BigUint) -> Result<Self> {
        if b == BigUint::from(0u32) {
            return Err(Error::InvalidThreshold("b must be positive"));
        }
        Ok(DefectThreshold { a, b, q: 1 })
    }

    /// Exact rational threshold `p / q`.
    pub fn rational(p: i64, q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidThreshold("denominator must be positive"));
        }
        Ok(DefectThreshold {
            a: p,
            b: BigUint::one(),
            q,
        })
    }

    /// The stability certification bound `12*d(2) + 1 = 25 - 3*log3(2^12)`.
    pub fn stability_certification() -> Self {
        DefectThreshold {
            a: 25,
            b: BigUint::one() << 12u32,
            q: 1,
        }
    }

    /// `k` times this threshold.
    pub fn scaled(&self, k: u32) -> Self {
        DefectThreshold {
            a: self.a * k as i64,
            b: self.b.pow(k),
            q: self.q,
        }
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> &BigUint {
        &self.b
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Exact sign tests against the endpoints used by the step-size rules.
    pub fn is_positive(&self) -> bool {
        // (a - 3*log3 b) / q > 0  <=>  3^a > b^3
        cmp_pow3_scaled(self.a, &BigUint::one(), 0, &cube(&self.b)) == Ordering::Greater
    }

    pub fn less_than_one(&self) -> bool {
        // (a - 3*log3 b) / q < 1  <=>  3^(a - q) < b^3
        cmp_pow3_scaled(self.a - self.q as i64, &BigUint::one(), 0, &cube(&self.b))
            == Ordering::Less
    }

    pub fn at_most_half(&self) -> bool {
        // (a - 3*log3 b) / q <= 1/2  <=>  3^(2a - q) <= b^6
        cmp_pow3_scaled(
            2 * self.a - self.q as i64,
            &BigUint::one(),
            0,
            &(cube(&self.b) * cube(&self.b)),
        ) != Ordering::Greater
    }

    /// Display-only approximation.
    pub fn approx(&self) -> f64 {
        let bits = self.b.bits() as i64;
        let approx_b = if bits > 512 {
            // scale down to stay inside f64 range
            let shifted: BigUint = &self.b >> (bits - 64) as u32;
            shifted.to_f64().unwrap_or(f64::MAX).ln() + (bits - 64) as f64 * 2f64.ln()
        } else {
            self.b.to_f64().unwrap_or(f64::MAX).ln()
        };
        (self.a as f64 - 3.0 * approx_b / 3f64.ln()) / self.q as f64
    }

    /// Smallest `n >= 1` with `c - 3*log3(n)` strictly below this threshold.
    ///
    /// Lets a table scan replace per-element big-integer tests: `n` qualifies
    /// at complexity `c` exactly when `n >= min_n(c)`.
    pub fn min_n_for_complexity(&self, c: u32) -> BigUint {
        // n^(3q) > 3^(q*c - a) * b^3, solved for the least integer n
        let e = self.q as i64 * c as i64 - self.a;
        let target = if e >= 0 {
            cube(&self.b) * pow3(e as u32) + BigUint::one()
        } else {
            cube(&self.b) / pow3((-e) as u32) + BigUint::one()
        };
        let root = target.nth_root(3 * self.q);
        if root.pow(3 * self.q) >= target {
            root
        } else {
            root + BigUint::one()
        }
    }

    /// `min_n_for_complexity` for every `c` in `0..=c_max`, saturated to u64.
    pub fn min_n_table(&self, c_max: u32) -> Vec<u64> {
        (0..=c_max)
            .map(|c| self.min_n_for_complexity(c).to_u64().unwrap_or(u64::MAX))
            .collect()
    }
}

impl PartialEq for DefectThreshold {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for DefectThreshold {}

impl PartialOrd for DefectThreshold {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DefectThreshold {
    fn cmp(&self, other: &Self) -> Ordering {
        // (a1 - 3 log3 b1)/q1 vs (a2 - 3 log3 b2)/q2
        // <=> 3^(q2*a1) * (b2^q1)^3 vs 3^(q1*a2) * (b1^q2)^3
        cmp_pow3_scaled(
            other.q as i64 * self.a,
            &cube(&other.b.pow(self.q)),
            self.q as i64 * other.a,
            &cube(&self.b.pow(other.q)),
        )
    }
}

impl fmt::Display for DefectThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{} - 3*log3({}) = {:.4}", self.a, self.b, self.approx())
        } else {
            write!(
                f,
                "({} - 3*log3({})) / {} = {:.4}",
                self.a,
                self.b,
                self.q,
                self.approx()
            )
        }
    }
}

/// If `m = n * 3^k`, returns `(k, q)` where `q = c(n) + 3k - c(m)` is the
/// integral amount by which the defect drops from `n` to `m`. Returns `None`
/// when `m / n` is not a power of 3.
pub fn defect_gap(table: &ComplexityTable, n: u64, m: u64) -> Result<Option<(u32, i64)>> {
    let cn = table.complexity(n)?;
    let cm = table.complexity(m)?;
    if m % n != 0 {
        return Ok(None);
    }
    let mut ratio = m / n;
    let mut k = 0u32;
    while ratio % 3 == 0 {
        ratio /= 3;
        k += 1;
    }
    if ratio != 1 {
        return Ok(None);
    }
    Ok(Some((k, cn as i64 + 3 * k as i64 - cm as i64)))
}
