//! Single-colour counting oracles.
//!
//! A single-colour symmetric sequence is an ordinary species with finite
//! support.  Its analytic functor evaluates on a finite set by Burnside's
//! lemma, the arithmetic product counts rectangles, and substitution
//! composition obeys the plethysm identity.  None of these formulas touch
//! the engine's coend machinery, which is what makes them useful as
//! cross-checks.

use crate::error::{Error, Result};
use crate::gset::GSet;
use crate::perm::{all_permutations, factorial, ColourSet, Permutation, SortedWord, Word};
use crate::seq::SymSeq;

fn single_colour() -> ColourSet {
    ColourSet::single("a")
}

fn check_single_colour(seq: &SymSeq) -> Result<()> {
    if seq.inputs().len() != 1 || seq.outputs().len() != 1 {
        return Err(Error::Invalid(
            "species oracles need a single-colour sequence".into(),
        ));
    }
    Ok(())
}

/// Sets: one structure on every set of size up to `max`, including the
/// empty one.
pub fn species_e(max: usize) -> SymSeq {
    let c = single_colour();
    let mut seq = SymSeq::new(c.clone(), c);
    for n in 0..=max {
        let w = SortedWord::new(Word::new(vec![0; n])).expect("constant word");
        // one name per arity keeps the text form renaming-free
        let set = GSet::trivial(w.clone(), vec![format!("e{}", n)]).expect("valid");
        seq.insert(w, 0, set).expect("valid");
    }
    seq
}

/// The singleton species: one structure on one point.
pub fn species_x() -> SymSeq {
    let c = single_colour();
    let mut seq = SymSeq::new(c.clone(), c);
    let w = SortedWord::new(Word::new(vec![0])).expect("constant word");
    let set = GSet::trivial(w.clone(), vec!["x".into()]).expect("valid");
    seq.insert(w, 0, set).expect("valid");
    seq
}

/// Linear orders on up to `max` points, empty list included; the symmetric
/// group acts freely by relabelling (right multiplication on the order).
pub fn species_l(max: usize) -> SymSeq {
    let c = single_colour();
    let mut seq = SymSeq::new(c.clone(), c);
    for n in 0..=max {
        let w = SortedWord::new(Word::new(vec![0; n])).expect("constant word");
        let perms = all_permutations(n);
        let names = (0..perms.len()).map(|i| format!("p{}_{}", n, i)).collect();
        let mut set = GSet::trivial(w.clone(), names).expect("valid");
        for pos in 0..n.saturating_sub(1) {
            let t = Permutation::adjacent_transposition(n, pos).expect("in range");
            let table = perms
                .iter()
                .map(|p| {
                    let q = p.compose(&t).expect("same degree");
                    perms.iter().position(|r| *r == q).expect("closed")
                })
                .collect();
            set.set_generator(pos, table).expect("valid");
        }
        seq.insert(w, 0, set).expect("valid");
    }
    seq
}

/// Drop the empty-word keys; useful for seeds that must avoid nullary
/// support under truncated constructions.
pub fn positive_part(seq: &SymSeq) -> SymSeq {
    let mut out = SymSeq::new(seq.outputs().clone(), seq.inputs().clone());
    for (key, set) in seq.support() {
        if !key.0.is_empty() {
            out.insert(key.0.clone(), key.1, set.clone()).expect("valid");
        }
    }
    out
}

// All partitions of `n`, parts descending; the cycle types of `S_n`.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(acc.clone());
            return;
        }
        for p in (1..=n.min(max)).rev() {
            acc.push(p);
            go(n - p, p, acc, out);
            acc.pop();
        }
    }
    let mut out = vec![];
    go(n, n, &mut vec![], &mut out);
    out
}

// A permutation with the given cycle type, cycles on consecutive indices.
fn cycle_type_rep(parts: &[usize]) -> Permutation {
    let n: usize = parts.iter().sum();
    let mut images = Vec::with_capacity(n);
    let mut offset = 0;
    for &p in parts {
        for j in 0..p {
            images.push(offset + (j + 1) % p);
        }
        offset += p;
    }
    Permutation::from_images(images).expect("cycle images form a permutation")
}

// n! / z_lambda: how many permutations share this cycle type.
fn conjugacy_class_size(n: usize, parts: &[usize]) -> u128 {
    let mut z: u128 = 1;
    let mut i = 0;
    while i < parts.len() {
        let mut j = i;
        while j < parts.len() && parts[j] == parts[i] {
            j += 1;
        }
        for m in 1..=(j - i) as u128 {
            z *= m;
        }
        z *= (parts[i] as u128).pow((j - i) as u32);
        i = j;
    }
    factorial(n) as u128 / z
}

/// Number of structures of the species on a `k`-element set: by Burnside,
/// each arity `n` contributes the average over the symmetric group of
/// (fixed structures) times k^(cycles).  Fixed-structure counts are
/// constant on conjugacy classes, so the sum runs over cycle types.  The
/// division is exact; anything else means the stored action is broken.
pub fn analytic_eval(seq: &SymSeq, k: usize) -> Result<u128> {
    check_single_colour(seq)?;
    let mut total: u128 = 0;
    for ((w, _), set) in seq.support() {
        let n = w.len();
        let mut orbit_sum: u128 = 0;
        for parts in partitions(n) {
            let sigma = cycle_type_rep(&parts);
            let fixed = set
                .act_table(&sigma)?
                .iter()
                .enumerate()
                .filter(|&(e, &img)| e == img)
                .count() as u128;
            let weight = (k as u128)
                .checked_pow(parts.len() as u32)
                .ok_or_else(|| Error::Invalid("analytic count overflows".into()))?;
            let term = conjugacy_class_size(n, &parts)
                .checked_mul(fixed)
                .and_then(|v| v.checked_mul(weight))
                .ok_or_else(|| Error::Invalid("analytic count overflows".into()))?;
            orbit_sum = orbit_sum
                .checked_add(term)
                .ok_or_else(|| Error::Invalid("analytic count overflows".into()))?;
        }
        let order = factorial(n) as u128;
        if orbit_sum % order != 0 {
            return Err(Error::Invalid(format!(
                "Burnside sum {} not divisible by {} at arity {}",
                orbit_sum, order, n
            )));
        }
        total = total
            .checked_add(orbit_sum / order)
            .ok_or_else(|| Error::Invalid("analytic count overflows".into()))?;
    }
    Ok(total)
}

// All partitions of {0..n-1} into blocks of size `size`, each block listed
// sorted, blocks sorted by their minimum.
fn uniform_partitions(n: usize, size: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(remaining: &mut Vec<usize>, size: usize, acc: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if remaining.is_empty() {
            out.push(acc.clone());
            return;
        }
        // the least remaining element anchors the next block, killing
        // permutations of the block order
        let first = remaining[0];
        let rest: Vec<usize> = remaining[1..].to_vec();
        let mut chosen = Vec::with_capacity(size.saturating_sub(1));
        pick(&rest, size - 1, 0, &mut chosen, &mut |others: &Vec<usize>| {
            let mut block = vec![first];
            block.extend(others.iter().copied());
            let mut next: Vec<usize> = rest
                .iter()
                .copied()
                .filter(|x| !others.contains(x))
                .collect();
            acc.push(block);
            go(&mut next, size, acc, out);
            acc.pop();
        });
    }
    fn pick(
        pool: &[usize],
        need: usize,
        from: usize,
        chosen: &mut Vec<usize>,
        f: &mut impl FnMut(&Vec<usize>),
    ) {
        if need == 0 {
            f(chosen);
            return;
        }
        for i in from..pool.len() {
            chosen.push(pool[i]);
            pick(pool, need - 1, i + 1, chosen, f);
            chosen.pop();
        }
    }
    if size == 0 || n % size != 0 {
        return vec![];
    }
    let mut out = vec![];
    go(&mut (0..n).collect::<Vec<usize>>(), size, &mut vec![], &mut out);
    out
}

/// Number of (d, e)-rectangles on a set of d*e points: pairs of transverse
/// partitions, one into d blocks of size e and one into e blocks of size d,
/// meeting in single points.  Counted by brute enumeration.
pub fn rectangle_oracle(d: usize, e: usize) -> usize {
    let n = d * e;
    let rows = uniform_partitions(n, e);
    let cols = uniform_partitions(n, d);
    let mut count = 0;
    for pi in &rows {
        for rho in &cols {
            let transverse = pi.iter().all(|b| {
                rho.iter()
                    .all(|c| b.iter().filter(|x| c.contains(x)).count() == 1)
            });
            if transverse {
                count += 1;
            }
        }
    }
    count
}

// Structure count at the constant word of length m.
fn arity_count(seq: &SymSeq, m: usize) -> u128 {
    let w = SortedWord::new(Word::new(vec![0; m])).expect("constant word");
    seq.eval(&w, 0).map_or(0u128, |s| s.len() as u128)
}

/// Closed-form size of the arithmetic product at arity n: each divisor
/// pair contributes n!/(d! e!) rectangles times the structure counts; the
/// empty set carries exactly one (empty) rectangle.
pub fn product_count_formula(f: &SymSeq, g: &SymSeq, n: usize) -> Result<u128> {
    check_single_colour(f)?;
    check_single_colour(g)?;
    if n == 0 {
        return Ok(arity_count(f, 0) * arity_count(g, 0));
    }
    let mut total: u128 = 0;
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let e = n / d;
        let rects = factorial(n) as u128 / (factorial(d) as u128 * factorial(e) as u128);
        total += rects * arity_count(f, d) * arity_count(g, e);
    }
    Ok(total)
}

/// Arithmetic-product size at arity n with the rectangles counted by brute
/// enumeration instead of the factorial formula; an independent check of
/// both the engine and the closed form.
pub fn rectangle_count(f: &SymSeq, g: &SymSeq, n: usize) -> Result<u128> {
    check_single_colour(f)?;
    check_single_colour(g)?;
    if n == 0 {
        return Ok(arity_count(f, 0) * arity_count(g, 0));
    }
    let mut total: u128 = 0;
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let e = n / d;
        total += rectangle_oracle(d, e) as u128 * arity_count(f, d) * arity_count(g, e);
    }
    Ok(total)
}

/// Outcome of one plethysm cross-check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnalyticCheck {
    Agree { lhs: u128, rhs: u128 },
    Disagree { lhs: u128, rhs: u128 },
    Inconclusive { reason: String },
}

/// Substitution composition against the plethysm identity: structures of
/// the composite on a k-set must biject with head structures on the set of
/// argument structures.  `budget` caps the composite arity attempted; a
/// larger requirement is reported as inconclusive rather than computed.
pub fn composite_analytic_check(
    args: &SymSeq,
    head: &SymSeq,
    k: usize,
    budget: usize,
) -> Result<AnalyticCheck> {
    check_single_colour(args)?;
    check_single_colour(head)?;
    let natural = crate::compose::natural_compose_bound(args, head);
    if natural > budget {
        return Ok(AnalyticCheck::Inconclusive {
            reason: format!("composite reaches arity {}, over the budget {}", natural, budget),
        });
    }
    let composite = crate::compose::kleisli_compose(args, head, None)?;
    let lhs = match analytic_eval(composite.seq(), k) {
        Ok(v) => v,
        Err(Error::Invalid(reason)) => return Ok(AnalyticCheck::Inconclusive { reason }),
        Err(e) => return Err(e),
    };
    let inner = analytic_eval(args, k)?;
    let inner_size = usize::try_from(inner).map_err(|_| {
        Error::Invalid("inner analytic count exceeds the addressable range".into())
    })?;
    let rhs = analytic_eval(head, inner_size)?;
    if lhs == rhs {
        Ok(AnalyticCheck::Agree { lhs, rhs })
    } else {
        Ok(AnalyticCheck::Disagree { lhs, rhs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithprod::{boxtimes, boxtimes_empty_word_count};

    fn binom(a: usize, b: usize) -> u128 {
        if b > a {
            return 0;
        }
        (factorial(a) / (factorial(b) * factorial(a - b))) as u128
    }

    #[test]
    fn analytic_counts_match_closed_forms() {
        // multisets for sets, words for lists, the set itself for the point
        let e = species_e(3);
        let l = species_l(3);
        for k in 0..5usize {
            let expected_e: u128 = (0..=3)
                .map(|n: usize| binom(k + n.saturating_sub(1), n))
                .sum();
            assert_eq!(analytic_eval(&e, k).unwrap(), expected_e, "E at {}", k);
            let expected_l: u128 = (0..=3).map(|n| (k as u128).pow(n)).sum();
            assert_eq!(analytic_eval(&l, k).unwrap(), expected_l, "L at {}", k);
            assert_eq!(analytic_eval(&species_x(), k).unwrap(), k as u128);
        }
    }

    #[test]
    fn analytic_eval_rejects_multi_colour_input() {
        let c = ColourSet::new(vec!["a", "b"]).unwrap();
        let seq = crate::seq::identity_seq(&c);
        assert!(analytic_eval(&seq, 2).is_err());
    }

    #[test]
    fn rectangles_match_the_factorial_formula() {
        for (d, e) in [(1, 1), (1, 4), (2, 2), (2, 3), (3, 2), (2, 4)] {
            let n = d * e;
            let expected = factorial(n) / (factorial(d) * factorial(e));
            assert_eq!(rectangle_oracle(d, e), expected, "({}, {})", d, e);
        }
    }

    #[test]
    fn product_counts_match_both_oracles() {
        let e = positive_part(&species_e(4));
        let l = positive_part(&species_l(4));
        let ee = boxtimes(&e, &e, Some(8)).unwrap();
        let el = boxtimes(&e, &l, Some(8)).unwrap();
        for n in 1..=8usize {
            let w = SortedWord::new(Word::new(vec![0; n])).unwrap();
            let engine_ee = ee.seq().eval(&w, 0).map_or(0, |s| s.len() as u128);
            assert_eq!(engine_ee, product_count_formula(&e, &e, n).unwrap(), "EE {}", n);
            let engine_el = el.seq().eval(&w, 0).map_or(0, |s| s.len() as u128);
            assert_eq!(engine_el, product_count_formula(&e, &l, n).unwrap(), "EL {}", n);
        }
        // at the empty word the engine counts every nullary pairing, not
        // just the empty rectangle, so it follows the orbit formula while
        // both oracles return the plain nullary product
        let e0 = species_e(2);
        let b = boxtimes(&e0, &e0, Some(0)).unwrap();
        assert_eq!(
            b.seq().eval(&SortedWord::empty(), 0).unwrap().len(),
            boxtimes_empty_word_count(&e0, &e0, 0, 0)
        );
        assert_eq!(product_count_formula(&e0, &e0, 0).unwrap(), 1);
        assert_eq!(rectangle_count(&e0, &e0, 0).unwrap(), 1);
    }

    #[test]
    fn brute_rectangles_agree_with_the_closed_form() {
        let e = species_e(4);
        let l = species_l(3);
        for n in 1..=8usize {
            assert_eq!(
                rectangle_count(&e, &l, n).unwrap(),
                product_count_formula(&e, &l, n).unwrap(),
                "EL {}",
                n
            );
        }
        // sets against sets on four points: three grid shapes
        assert_eq!(rectangle_count(&e, &e, 4).unwrap(), 8);
    }

    #[test]
    fn plethysm_identity_holds_for_small_composites() {
        let e2 = species_e(2);
        let check = composite_analytic_check(&e2, &e2, 2, 8).unwrap();
        match check {
            AnalyticCheck::Agree { lhs, rhs } => {
                assert_eq!(lhs, rhs);
                // structures of E<=2 on a 2-set: 1 + 2 + 3; head on that many
                assert_eq!(rhs, 1 + 6 + binom(7, 2));
            }
            other => panic!("expected agreement, got {:?}", other),
        }
        let l2 = species_l(2);
        match composite_analytic_check(&l2, &e2, 2, 8).unwrap() {
            AnalyticCheck::Agree { .. } => {}
            other => panic!("expected agreement, got {:?}", other),
        }
        match composite_analytic_check(&e2, &l2, 2, 8).unwrap() {
            AnalyticCheck::Agree { .. } => {}
            other => panic!("expected agreement, got {:?}", other),
        }
    }

    #[test]
    fn oversized_checks_are_inconclusive() {
        let e = species_e(5);
        match composite_analytic_check(&e, &e, 2, 8).unwrap() {
            AnalyticCheck::Inconclusive { .. } => {}
            other => panic!("expected inconclusive, got {:?}", other),
        }
    }

    #[test]
    fn positive_part_strips_only_the_empty_word() {
        let e = species_e(3);
        let p = positive_part(&e);
        assert_eq!(e.support_len(), 4);
        assert_eq!(p.support_len(), 3);
        assert!(p.eval(&SortedWord::empty(), 0).is_none());
    }
}
