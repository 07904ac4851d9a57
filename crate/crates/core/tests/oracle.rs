//! Independent oracles: a pruning-free recursion for the table, a purely
//! syntactic tree enumeration for representation counts, and exhaustive
//! cross-checks for the structural invariants.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use icx_core::classify;
use icx_core::count;
use icx_core::DefectThreshold;
use icx_core::expr::{self, ExprKind, ExpressionTree};
use icx_core::structure::{self, StabilityVerdict};
use icx_core::{e_selfridge, ComplexityTable};

use num_traits::ToPrimitive;
use proptest::prelude::*;

fn shared_table() -> &'static ComplexityTable {
    static TABLE: OnceLock<ComplexityTable> = OnceLock::new();
    TABLE.get_or_init(|| ComplexityTable::build(100_000).unwrap())
}

/// The recursion with no pruning at all: every sum split and every divisor.
fn naive_table(n_max: usize) -> Vec<u32> {
    let mut o = vec![0u32; n_max + 1];
    o[1] = 1;
    for n in 2..=n_max {
        let mut best = u32::MAX;
        for b in 1..=n / 2 {
            best = best.min(o[b] + o[n - b]);
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                best = best.min(o[d] + o[n / d]);
            }
            d += 1;
        }
        o[n] = best;
    }
    o
}

#[test]
fn pruned_sieve_matches_naive_recursion_to_5000() {
    let naive = naive_table(5000);
    let table = ComplexityTable::build(5000).unwrap();
    for n in 1..=5000u64 {
        assert_eq!(
            table.complexity(n).unwrap(),
            naive[n as usize],
            "disagreement at {n}"
        );
    }
}

#[test]
fn frozen_value_for_46() {
    // brute-force recursion over all splits gives c(46) = 12
    assert_eq!(naive_table(46)[46], 12);
    assert_eq!(shared_table().complexity(46).unwrap(), 12);
}

/// Enumerates every canonical tree with bounded value and ones count, with
/// no reference to minimality or to the table: sums flatten non-sum parts,
/// products flatten non-product parts with all factors at least 2.
fn syntactic_closure(value_max: u64, ones_max: u32) -> BTreeSet<ExpressionTree> {
    let mut all: BTreeSet<ExpressionTree> = BTreeSet::new();
    all.insert(ExpressionTree::one());
    loop {
        let before = all.len();
        let sum_parts: Vec<ExpressionTree> = all
            .iter()
            .filter(|t| t.kind() != ExprKind::Sum)
            .cloned()
            .collect();
        let mut fresh: Vec<ExpressionTree> = Vec::new();
        multisets(
            &sum_parts,
            value_max,
            ones_max,
            true,
            0,
            &mut Vec::new(),
            &mut fresh,
        );
        let prod_parts: Vec<ExpressionTree> = all
            .iter()
            .filter(|t| t.kind() != ExprKind::Product && t.value() >= 2)
            .cloned()
            .collect();
        multisets(
            &prod_parts,
            value_max,
            ones_max,
            false,
            0,
            &mut Vec::new(),
            &mut fresh,
        );
        all.extend(fresh);
        if all.len() == before {
            return all;
        }
    }
}

fn multisets(
    cands: &[ExpressionTree],
    value_max: u64,
    ones_max: u32,
    additive: bool,
    from: usize,
    chosen: &mut Vec<ExpressionTree>,
    out: &mut Vec<ExpressionTree>,
) {
    if chosen.len() >= 2 {
        out.push(if additive {
            ExpressionTree::sum(chosen.clone())
        } else {
            ExpressionTree::product(chosen.clone())
        });
    }
    for i in from..cands.len() {
        let c = &cands[i];
        let value_ok = if additive {
            chosen.iter().map(|t| t.value()).sum::<u64>() + c.value() <= value_max
        } else {
            chosen.iter().map(|t| t.value()).product::<u64>() * c.value() <= value_max
        };
        let ones_ok = chosen.iter().map(|t| t.ones_count()).sum::<u32>() + c.ones_count()
            <= ones_max;
        if value_ok && ones_ok {
            chosen.push(c.clone());
            multisets(cands, value_max, ones_max, additive, i, chosen, out);
            chosen.pop();
        }
    }
}

#[test]
fn representation_counts_match_syntactic_enumeration_to_30() {
    let naive = naive_table(30);
    let ones_max = *naive.iter().skip(1).max().unwrap();
    let universe = syntactic_closure(30, ones_max);
    let table = ComplexityTable::build(30).unwrap();
    for n in 1..=30u64 {
        let expected = universe
            .iter()
            .filter(|t| t.value() == n && t.ones_count() == naive[n as usize])
            .count() as u64;
        let (_, got) = expr::minimal_representations(&table, n, 0).unwrap();
        assert_eq!(got, expected, "representation count differs at {n}");
    }
}

#[test]
fn frozen_representation_counts() {
    // counts taken from the syntactic enumeration above
    let table = ComplexityTable::build(20_000).unwrap();
    assert_eq!(expr::minimal_representations(&table, 4, 0).unwrap().1, 2);
    assert_eq!(expr::minimal_representations(&table, 1, 0).unwrap().1, 1);
    let (_, m) = expr::minimal_representations(&table, 15625, 0).unwrap();
    assert_eq!(m, 4);
}

#[test]
fn tree_for_15625_encodes_the_sum_split() {
    let table = ComplexityTable::build(15_700).unwrap();
    assert_eq!(table.complexity(15625).unwrap(), 29);
    let (trees, _) = expr::minimal_representations(&table, 15625, usize::MAX).unwrap();
    let witness = trees.iter().find(|t| {
        t.kind() == ExprKind::Sum
            && t.children().iter().any(|c| c.kind() == ExprKind::One)
            && t.children()
                .iter()
                .any(|c| c.kind() == ExprKind::Product && c.value() == 15624)
    });
    let witness = witness.expect("a 1 + 15624 tree must appear");
    assert_eq!(witness.ones_count(), 29);
}

#[test]
fn subadditivity_of_products_and_sums() {
    let table = shared_table();
    let limit = table.limit();
    proptest!(|(a in 1u64..1000, b in 1u64..1000)| {
        let ca = table.complexity(a).unwrap();
        let cb = table.complexity(b).unwrap();
        if a * b <= limit {
            prop_assert!(table.complexity(a * b).unwrap() <= ca + cb);
        }
        if a + b <= limit {
            prop_assert!(table.complexity(a + b).unwrap() <= ca + cb);
        }
    });
}

#[test]
fn selfridge_maximality_within_table() {
    let table = shared_table();
    let report = icx_core::table::selfridge_report(table);
    assert!(report.passed(), "{:?}", report.violations);
}

#[test]
fn good_factorizations_inherit_leadership_and_stability() {
    let table = shared_table();
    let x = table.limit();
    let mut checked = 0u64;
    for u in 2..=(x as f64).sqrt() as u64 {
        for v in u..=x / u {
            let n = u * v;
            let good = table.complexity(n).unwrap()
                == table.complexity(u).unwrap() + table.complexity(v).unwrap();
            if !good {
                continue;
            }
            checked += 1;
            if structure::is_leader(table, n).unwrap() {
                assert!(
                    structure::is_leader(table, u).unwrap()
                        && structure::is_leader(table, v).unwrap(),
                    "leader {n} = {u} * {v} with a non-leader factor"
                );
            }
            let hn = count::floor_log3(x / n) as u32;
            if hn >= 1
                && structure::stability_status(table, n, hn).unwrap()
                    == StabilityVerdict::StableCertified
            {
                for f in [u, v] {
                    let hf = count::floor_log3(x / f) as u32;
                    let verdict = structure::stability_status(table, f, hf).unwrap();
                    assert!(
                        !matches!(verdict, StabilityVerdict::Unstable { .. }),
                        "stable product {n} has unstable factor {f}"
                    );
                }
            }
        }
    }
    assert!(checked > 100_000, "corpus unexpectedly small: {checked}");
}

#[test]
fn chain_law_holds_everywhere() {
    let table = shared_table();
    for m in 1..=20_000u64 {
        let chain = structure::chain_decompose(table, m).unwrap();
        let base = table.complexity(chain.leader).unwrap();
        let mut v = chain.leader;
        for j in 0..=chain.exponent {
            assert_eq!(
                table.complexity(v).unwrap(),
                base + 3 * j,
                "chain of {m} breaks at 3^{j}"
            );
            v *= 3;
        }
        assert!(structure::is_leader(table, chain.leader).unwrap());
    }
}

#[test]
fn defect_never_grows_along_chains() {
    let table = shared_table();
    let limit = table.limit();
    for m in 1..=limit / 3 {
        assert!(
            table.complexity(3 * m).unwrap() <= table.complexity(m).unwrap() + 3,
            "defect grows from {m} to {}",
            3 * m
        );
    }
}

#[test]
fn powers_of_three_are_solid() {
    let table = shared_table();
    let mut p = 9u64;
    while p <= table.limit() {
        assert!(structure::is_solid(table, p).unwrap(), "3^k = {p}");
        p *= 3;
    }
}

#[test]
fn candidate_generation_is_a_superset_of_the_next_level() {
    let table = shared_table();
    let x = 20_000u64;
    let alpha = DefectThreshold::delta2_multiple(1);
    let t_set = classify::compute_t_alpha(table, &alpha).unwrap();
    let mut priors = vec![classify::snapshot_from_table(table, &alpha, x).unwrap()];
    for k in 1..=12u32 {
        let candidates =
            classify::generate_candidates(table, k, &alpha, &priors, &t_set, x).unwrap();
        let next = classify::snapshot_from_table(table, &alpha.scaled(k + 1), x).unwrap();
        for leader in &next.leaders {
            assert!(
                candidates.binary_search(leader).is_ok(),
                "step {k}: leader {leader} missing from the candidate set"
            );
        }
        priors.push(next);
    }
}

#[test]
fn lemma_certificates_agree_with_the_table() {
    let table = shared_table();
    let alpha = DefectThreshold::delta2_multiple(1);

    // least multiple of the step that clears a given defect, if at most 12
    let steps_above = |n: u64| -> Option<u32> {
        let d = table.defect(n).unwrap();
        (1..=12u32).find(|&i| d.below(&alpha.scaled(i)))
    };

    let mut fired = 0u64;
    for a in 2..=100u64 {
        for b in a..=100u64 {
            let (Some(ia), Some(jb)) = (steps_above(a), steps_above(b)) else {
                continue;
            };
            let i = ia.max(2);
            let j = jb.max(2);
            let k = i + j - 2;
            if k > 12 {
                continue;
            }
            let ab = a * b;
            let outside = !table.defect(ab).unwrap().below(&alpha.scaled(k));
            if !outside {
                continue;
            }
            let cert = classify::lemma_mult_bound(
                &classify::MultFacts {
                    a,
                    b,
                    complexity_a: table.complexity(a).unwrap(),
                    complexity_b: table.complexity(b).unwrap(),
                    a_in_i: true,
                    b_in_j: true,
                    ab_outside_k: true,
                },
                i,
                j,
                k,
                &alpha,
            )
            .unwrap()
            .expect("facts hold");
            assert_eq!(
                cert.complexity,
                table.complexity(ab).unwrap(),
                "certificate wrong for {a} * {b}"
            );
            fired += 1;
        }
    }
    assert!(fired > 500, "too few certificates exercised: {fired}");

    // a = 2, b = 256 * 3: membership at i = 2 and j = 9 puts 2^9 * 3 at k = 9
    let d2 = |n: u64, s: u32| table.defect(n).unwrap().below(&alpha.scaled(s));
    assert!(d2(2, 2) && d2(768, 9) && !d2(1536, 9));
    let cert = classify::lemma_mult_bound(
        &classify::MultFacts {
            a: 2,
            b: 768,
            complexity_a: 2,
            complexity_b: 19,
            a_in_i: true,
            b_in_j: true,
            ab_outside_k: true,
        },
        2,
        9,
        9,
        &alpha,
    )
    .unwrap()
    .unwrap();
    assert_eq!(cert.complexity, 21);
    assert_eq!(table.complexity(1536).unwrap(), 21);

    // additive side over a sweep: 3^m * (a + 1) outside the set of a
    let mut fired = 0u64;
    for a in 1..=300u64 {
        for m in 0..=2u32 {
            let Some(k) = steps_above(a) else { continue };
            let n = (a + 1) * 3u64.pow(m);
            if table.defect(n).unwrap().below(&alpha.scaled(k)) {
                continue;
            }
            let cert = classify::lemma_add_bound(&classify::AddFacts {
                a,
                complexity_a: table.complexity(a).unwrap(),
                m,
                a_in_k: true,
                result_outside_k: true,
            })
            .unwrap()
            .expect("facts hold");
            assert_eq!(
                cert.complexity,
                table.complexity(n).unwrap(),
                "additive certificate wrong for 3^{m} * ({a} + 1)"
            );
            fired += 1;
        }
    }
    assert!(fired > 100, "too few additive certificates: {fired}");

    // a = 2 * 3^4, m = 1 lands on 489
    assert!(d2(162, 2) && !d2(489, 2));
    let cert = classify::lemma_add_bound(&classify::AddFacts {
        a: 162,
        complexity_a: table.complexity(162).unwrap(),
        m: 1,
        a_in_k: true,
        result_outside_k: true,
    })
    .unwrap()
    .unwrap();
    assert_eq!(cert.n, 489);
    assert_eq!(cert.complexity, 18);
    assert_eq!(table.complexity(489).unwrap(), 18);
}

#[test]
fn threshold_one_count_matches_the_template_union() {
    let table = shared_table();
    let x = table.limit();
    let (a_count, _) = count::count_sets(table, &DefectThreshold::integer(1), x).unwrap();
    let mut union = BTreeSet::new();
    for fam in classify::below_one_families() {
        for (v, _) in fam.instances_up_to(x) {
            union.insert(v);
        }
    }
    assert_eq!(a_count, union.len() as u64);
}

#[test]
fn e_rank_never_skips_values() {
    let table = shared_table();
    // scanning down from E(k) agrees with an explicit filter
    for k in [5u64, 8, 12, 15] {
        let ek = e_selfridge(k).unwrap().to_u64().unwrap();
        let mut expected: Vec<u64> = (1..=ek)
            .filter(|&n| table.complexity(n).unwrap() as u64 <= k)
            .collect();
        expected.reverse();
        for (r, want) in expected.iter().take(6).enumerate() {
            assert_eq!(
                icx_core::e_rank(table, r as u64, k).unwrap(),
                Some(*want),
                "rank {r} at k = {k}"
            );
        }
        assert_eq!(
            icx_core::e_rank(table, expected.len() as u64, k).unwrap(),
            None
        );
    }
}
