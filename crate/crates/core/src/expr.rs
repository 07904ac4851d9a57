//! Minimal expression trees over `{1, +, *}`.
//!
//! Trees are kept in a canonical form: sums never contain sums, products
//! never contain products, and children are sorted by (value, kind,
//! children). Two decompositions count as the same representation exactly
//! when they canonicalize to the same tree, which identifies `a+b` with
//! `b+a` and all association orders, while keeping `2+2` and `2*2` distinct.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::error::Error;
use crate::table::{cube_le, ComplexityTable};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExprKind {
    One,
    Sum,
    Product,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpressionTree {
    kind: ExprKind,
    children: Vec<ExpressionTree>,
    value: u64,
    ones: u32,
}

impl ExpressionTree {
    pub fn one() -> Self {
        ExpressionTree {
            kind: ExprKind::One,
            children: Vec::new(),
            value: 1,
            ones: 1,
        }
    }

    /// Combines parts under the given kind, flattening same-kind children
    /// and sorting, so the result is canonical whenever the parts are.
    fn combine(kind: ExprKind, parts: Vec<ExpressionTree>) -> Self {
        debug_assert!(matches!(kind, ExprKind::Sum | ExprKind::Product));
        let mut children = Vec::new();
        for p in parts {
            if p.kind == kind {
                children.extend(p.children);
            } else {
                children.push(p);
            }
        }
        children.sort();
        let (value, ones) = match kind {
            ExprKind::Sum => (
                children.iter().map(|c| c.value).sum(),
                children.iter().map(|c| c.ones).sum(),
            ),
            ExprKind::Product => (
                children.iter().map(|c| c.value).product(),
                children.iter().map(|c| c.ones).sum(),
            ),
            ExprKind::One => unreachable!(),
        };
        ExpressionTree {
            kind,
            children,
            value,
            ones,
        }
    }

    pub fn sum(parts: Vec<ExpressionTree>) -> Self {
        Self::combine(ExprKind::Sum, parts)
    }

    pub fn product(parts: Vec<ExpressionTree>) -> Self {
        Self::combine(ExprKind::Product, parts)
    }

    pub fn kind(&self) -> ExprKind {
        self.kind
    }

    pub fn children(&self) -> &[ExpressionTree] {
        &self.children
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn ones_count(&self) -> u32 {
        self.ones
    }
}

fn kind_rank(k: ExprKind) -> u8 {
    match k {
        ExprKind::One => 0,
        ExprKind::Sum => 1,
        ExprKind::Product => 2,
    }
}

impl PartialOrd for ExpressionTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExpressionTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .cmp(&other.value)
            .then_with(|| kind_rank(self.kind).cmp(&kind_rank(other.kind)))
            .then_with(|| self.children.iter().cmp(other.children.iter()))
    }
}

impl fmt::Display for ExpressionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ExprKind::One => write!(f, "1"),
            ExprKind::Sum => {
                for (i, c) in self.children.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            ExprKind::Product => {
                for (i, c) in self.children.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    if c.kind == ExprKind::Sum {
                        write!(f, "({c})")?;
                    } else {
                        write!(f, "{c}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

type MemoMap = HashMap<u64, Rc<Vec<ExpressionTree>>>;

fn all_minimal(table: &ComplexityTable, n: u64, memo: &mut MemoMap) -> Rc<Vec<ExpressionTree>> {
    if let Some(hit) = memo.get(&n) {
        return Rc::clone(hit);
    }
    let result = if n == 1 {
        vec![ExpressionTree::one()]
    } else {
        let c = table.values()[n as usize];
        let mut out = BTreeSet::new();

        let mut d = 2u64;
        while d * d <= n {
            if n % d == 0 && table.values()[d as usize] + table.values()[(n / d) as usize] == c {
                let left = all_minimal(table, d, memo);
                let right = all_minimal(table, n / d, memo);
                for a in left.iter() {
                    for b in right.iter() {
                        out.insert(ExpressionTree::product(vec![a.clone(), b.clone()]));
                    }
                }
            }
            d += 1;
        }

        let mut b = 1u64;
        while b * 2 <= n {
            if (b as u128) * ((n - b) as u128) > cube_le(c as u32) {
                break;
            }
            if table.values()[b as usize] + table.values()[(n - b) as usize] == c {
                let left = all_minimal(table, b, memo);
                let right = all_minimal(table, n - b, memo);
                for x in left.iter() {
                    for y in right.iter() {
                        out.insert(ExpressionTree::sum(vec![x.clone(), y.clone()]));
                    }
                }
            }
            b += 1;
        }
        out.into_iter().collect()
    };
    let rc = Rc::new(result);
    memo.insert(n, Rc::clone(&rc));
    rc
}

/// All canonical minimal trees for `n`, truncated to `cap`, together with
/// the exact count of distinct canonical minimal representations.
pub fn minimal_representations(
    table: &ComplexityTable,
    n: u64,
    cap: usize,
) -> Result<(Vec<ExpressionTree>, u64)> {
    if n == 0 || n > table.limit() {
        return Err(Error::OutOfRange {
            n,
            limit: table.limit(),
        });
    }
    let mut memo = MemoMap::new();
    let trees = all_minimal(table, n, &mut memo);
    let count = trees.len() as u64;
    Ok((trees.iter().take(cap).cloned().collect(), count))
}

/// One deterministic minimal tree: product splits win over sum splits, and
/// among splits of the same kind the smallest factor or addend wins.
pub fn preferred_representation(table: &ComplexityTable, n: u64) -> Result<ExpressionTree> {
    if n == 0 || n > table.limit() {
        return Err(Error::OutOfRange {
            n,
            limit: table.limit(),
        });
    }
    fn go(table: &ComplexityTable, n: u64) -> ExpressionTree {
        if n == 1 {
            return ExpressionTree::one();
        }
        let c = table.values()[n as usize];
        let mut d = 2u64;
        while d * d <= n {
            if n % d == 0 && table.values()[d as usize] + table.values()[(n / d) as usize] == c {
                return ExpressionTree::product(vec![go(table, d), go(table, n / d)]);
            }
            d += 1;
        }
        let mut b = 1u64;
        loop {
            debug_assert!(b * 2 <= n);
            if table.values()[b as usize] + table.values()[(n - b) as usize] == c {
                return ExpressionTree::sum(vec![go(table, b), go(table, n - b)]);
            }
            b += 1;
        }
    }
    Ok(go(table, n))
}
