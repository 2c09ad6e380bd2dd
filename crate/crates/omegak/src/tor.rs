//! Torsion functor of a presentation, by closed-form rules and by an
//! independent bar-complex computation.
//!
//! The rules side rewrites each generator family into its contribution to
//! $\mathrm{Tor}$ over the algebra it generates, placed in filtration one
//! and two with total degrees shifted accordingly. The bar side builds the
//! reduced bar complex of an explicit truncated monomial algebra and row
//! reduces over $\mathbb{F}_2$; it shares no code with the rules side and
//! serves as its oracle.

use std::collections::{BTreeMap, HashMap};

use crate::presentation::{AlgebraKind, GeneratorFamily, Presentation};
use crate::{Error, Result};

/// Bigraded dimensions keyed by (filtration, total degree).
pub type BigradedDims = BTreeMap<(u64, u64), u64>;

/// Closed-form torsion of the algebra presented by `p`.
///
/// Exterior families contribute a divided power family one degree up in
/// filtration one; polynomial families an exterior family one degree up in
/// filtration one; truncated families both an exterior family one degree up
/// in filtration one and a divided power family in filtration two whose
/// total degree is the truncating power of the generator plus two. Divided
/// power input is rejected: it does not occur as a Hopf kernel here.
pub fn tor_rules(p: &Presentation) -> Result<Presentation> {
    let mut families = Vec::new();
    for f in &p.families {
        if f.filtration != 0 {
            return Err(Error::Tor(format!(
                "family {} already carries filtration {}",
                f.name, f.filtration
            )));
        }
        match f.kind {
            AlgebraKind::Exterior => {
                families.push(
                    GeneratorFamily::new(
                        &format!("s{}", f.name),
                        AlgebraKind::DividedPower,
                        f.pattern.shift_up(1),
                    )
                    .at_filtration(1),
                );
            }
            AlgebraKind::Polynomial => {
                families.push(
                    GeneratorFamily::new(
                        &format!("s{}", f.name),
                        AlgebraKind::Exterior,
                        f.pattern.shift_up(1),
                    )
                    .at_filtration(1),
                );
            }
            AlgebraKind::Truncated(h) => {
                families.push(
                    GeneratorFamily::new(
                        &format!("s{}", f.name),
                        AlgebraKind::Exterior,
                        f.pattern.shift_up(1),
                    )
                    .at_filtration(1),
                );
                families.push(
                    GeneratorFamily::new(
                        &format!("f{}", f.name),
                        AlgebraKind::DividedPower,
                        f.pattern.scale(u64::from(h))?.shift_up(2),
                    )
                    .at_filtration(2),
                );
            }
            AlgebraKind::DividedPower => {
                return Err(Error::Tor(format!(
                    "divided power family {} is not a valid torsion input",
                    f.name
                )));
            }
        }
    }
    Ok(Presentation::from_families(families))
}

/// Dimensions of the bigraded algebra presented by `p`, with every family
/// placed at its filtration and its pattern read as total degrees, through
/// total degree `n`.
pub fn bigraded_dims(p: &Presentation, n: u64) -> Result<BigradedDims> {
    let mut dims: BigradedDims = BTreeMap::new();
    dims.insert((0, 0), 1);
    for f in &p.families {
        for d in f.pattern.members_up_to(n) {
            let factor = generator_factor(f.kind, u64::from(f.filtration), d, n);
            dims = multiply(&dims, &factor, n);
        }
    }
    Ok(dims)
}

/// Basis bidegrees of the subalgebra on one generator at (filt, total
/// degree d), as a sparse polynomial.
fn generator_factor(kind: AlgebraKind, filt: u64, d: u64, n: u64) -> BigradedDims {
    let mut out: BigradedDims = BTreeMap::new();
    out.insert((0, 0), 1);
    match kind {
        AlgebraKind::DividedPower => {
            // Exterior ladder on the divided powers gamma_{2^j}.
            let mut level = 1u64;
            while level * d <= n {
                let single = BTreeMap::from([
                    ((0, 0), 1),
                    ((level * filt, level * d), 1),
                ]);
                out = multiply(&out, &single, n);
                level *= 2;
            }
        }
        _ => {
            let order = kind.generator_order().map(u64::from).unwrap_or(u64::MAX);
            let mut e = 1u64;
            while e < order && e * d <= n {
                out.insert((e * filt, e * d), 1);
                e += 1;
            }
        }
    }
    out
}

fn multiply(a: &BigradedDims, b: &BigradedDims, n: u64) -> BigradedDims {
    let mut out: BigradedDims = BTreeMap::new();
    for (&(sa, ta), &va) in a {
        for (&(sb, tb), &vb) in b {
            if ta + tb > n {
                continue;
            }
            *out.entry((sa + sb, ta + tb)).or_insert(0) += va * vb;
        }
    }
    out
}

/// Compares the closed-form torsion of `p` against the bar-complex oracle,
/// bidegree by bidegree, through total degree `n`. The first mismatch is an
/// error naming the bidegree and both dimensions.
pub fn rules_match_bar(p: &Presentation, n: u64) -> Result<()> {
    let rules = bigraded_dims(&tor_rules(p)?, n)?;
    let oracle = bar::bar_dims(p, n, bar::DEFAULT_BUDGET)?;
    let mut oracle_total: BigradedDims = BTreeMap::new();
    for (&(s, t), &v) in &oracle {
        if s + t <= n && v > 0 {
            oracle_total.insert((s, s + t), v);
        }
    }
    let rules_nonzero: BigradedDims = rules.into_iter().filter(|&(_, v)| v > 0).collect();
    for (key, v) in &rules_nonzero {
        let got = oracle_total.get(key).copied().unwrap_or(0);
        if got != *v {
            return Err(Error::Tor(format!(
                "at (filtration {}, total degree {}): rules give {v}, bar gives {got}",
                key.0, key.1
            )));
        }
    }
    for (key, v) in &oracle_total {
        if !rules_nonzero.contains_key(key) {
            return Err(Error::Tor(format!(
                "at (filtration {}, total degree {}): rules give 0, bar gives {v}",
                key.0, key.1
            )));
        }
    }
    Ok(())
}

/// Reduced bar complex of a truncated monomial algebra, row reduced over
/// $\mathbb{F}_2$.
pub mod bar {
    use super::*;

    /// Cap on the number of bar tuples before the computation refuses to
    /// proceed.
    pub const DEFAULT_BUDGET: usize = 5_000_000;

    struct MonomialAlgebra {
        orders: Vec<u64>,
        /// Nonunit monomials as exponent vectors, each of total degree at
        /// most the bound.
        monomials: Vec<Vec<u32>>,
        degree_of: Vec<u64>,
        index: HashMap<Vec<u32>, usize>,
    }

    impl MonomialAlgebra {
        fn build(p: &Presentation, n: u64) -> Result<Self> {
            let mut degrees: Vec<u64> = Vec::new();
            let mut orders: Vec<u64> = Vec::new();
            for f in &p.families {
                if f.filtration != 0 {
                    return Err(Error::Tor(format!(
                        "bar input family {} carries a filtration",
                        f.name
                    )));
                }
                if f.kind == AlgebraKind::DividedPower {
                    return Err(Error::Tor(format!(
                        "divided power family {} is not a valid bar input",
                        f.name
                    )));
                }
                for d in f.pattern.members_up_to(n) {
                    degrees.push(d);
                    // A polynomial generator is truncated just beyond the
                    // degree bound; no product below the bound notices.
                    orders.push(match f.kind.generator_order() {
                        Some(o) => u64::from(o),
                        None => n / d + 1,
                    });
                }
            }
            let mut monomials: Vec<Vec<u32>> = Vec::new();
            let mut stack = vec![0u32; degrees.len()];
            enumerate(&degrees, &orders, n, 0, 0, &mut stack, &mut monomials);
            let degree_of: Vec<u64> = monomials
                .iter()
                .map(|m| {
                    m.iter()
                        .zip(&degrees)
                        .map(|(&e, &d)| u64::from(e) * d)
                        .sum()
                })
                .collect();
            let index = monomials
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, m)| (m, i))
                .collect();
            Ok(MonomialAlgebra {
                orders,
                monomials,
                degree_of,
                index,
            })
        }

        /// Product of two nonunit monomials; None is zero.
        fn mul(&self, i: usize, j: usize) -> Option<usize> {
            let (a, b) = (&self.monomials[i], &self.monomials[j]);
            let mut c = Vec::with_capacity(a.len());
            for (k, (&x, &y)) in a.iter().zip(b).enumerate() {
                let e = u64::from(x) + u64::from(y);
                if e >= self.orders[k] {
                    return None;
                }
                c.push(x + y);
            }
            self.index.get(&c).copied()
        }
    }

    fn enumerate(
        degrees: &[u64],
        orders: &[u64],
        n: u64,
        gen: usize,
        used: u64,
        stack: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if gen == degrees.len() {
            if used > 0 {
                out.push(stack.clone());
            }
            return;
        }
        let mut e = 0u64;
        while e < orders[gen] && used + e * degrees[gen] <= n {
            stack[gen] = e as u32;
            enumerate(degrees, orders, n, gen + 1, used + e * degrees[gen], stack, out);
            e += 1;
        }
        stack[gen] = 0;
    }

    /// Dimensions of the torsion groups of the algebra presented by `p`,
    /// keyed by (homological degree, internal degree), for internal degrees
    /// up to `n`.
    pub fn bar_dims(p: &Presentation, n: u64, budget: usize) -> Result<BigradedDims> {
        let alg = MonomialAlgebra::build(p, n)?;
        // Bar tuples grouped by (homological degree, internal degree). Every
        // entry has positive degree, so homological degree is bounded by n.
        let mut bases: BTreeMap<(u64, u64), Vec<Vec<u32>>> = BTreeMap::new();
        bases.insert((0, 0), vec![Vec::new()]);
        let mut count = 1usize;
        let mut frontier: Vec<(u64, Vec<u32>)> = vec![(0, Vec::new())];
        let mut s = 0u64;
        while !frontier.is_empty() {
            s += 1;
            let mut next: Vec<(u64, Vec<u32>)> = Vec::new();
            for (deg, tuple) in &frontier {
                for (m, &md) in alg.degree_of.iter().enumerate() {
                    if deg + md > n {
                        continue;
                    }
                    let mut t = tuple.clone();
                    t.push(m as u32);
                    next.push((deg + md, t));
                }
            }
            count += next.len();
            if count > budget {
                return Err(Error::BarResource(format!(
                    "bar complex exceeds {budget} tuples at homological degree {s}"
                )));
            }
            for (deg, tuple) in &next {
                bases
                    .entry((s, *deg))
                    .or_default()
                    .push(tuple.clone());
            }
            frontier = next;
        }

        // Ranks of the bar differential, then dimensions by the usual
        // kernel-minus-image count.
        let mut ranks: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        for ((s, t), tuples) in &bases {
            if *s == 0 {
                continue;
            }
            let target = bases.get(&(*s - 1, *t));
            let lookup: HashMap<&[u32], usize> = match target {
                Some(ts) => ts
                    .iter()
                    .enumerate()
                    .map(|(i, tup)| (tup.as_slice(), i))
                    .collect(),
                None => HashMap::new(),
            };
            let cols = target.map(|ts| ts.len()).unwrap_or(0);
            let mut rows: Vec<Vec<u64>> = Vec::with_capacity(tuples.len());
            let words = cols.div_ceil(64);
            for tuple in tuples {
                let mut row = vec![0u64; words];
                for i in 0..tuple.len().saturating_sub(1) {
                    if let Some(prod) = alg.mul(tuple[i] as usize, tuple[i + 1] as usize) {
                        let mut merged = Vec::with_capacity(tuple.len() - 1);
                        merged.extend_from_slice(&tuple[..i]);
                        merged.push(prod as u32);
                        merged.extend_from_slice(&tuple[i + 2..]);
                        let col = lookup[merged.as_slice()];
                        row[col / 64] ^= 1 << (col % 64);
                    }
                }
                rows.push(row);
            }
            ranks.insert((*s, *t), rank_f2(&mut rows));
        }

        let mut dims: BigradedDims = BTreeMap::new();
        for ((s, t), tuples) in &bases {
            let dim = tuples.len() as u64;
            let out_rank = ranks.get(&(*s, *t)).copied().unwrap_or(0);
            let in_rank = ranks.get(&(*s + 1, *t)).copied().unwrap_or(0);
            let h = dim - out_rank - in_rank;
            if h > 0 {
                dims.insert((*s, *t), h);
            }
        }
        Ok(dims)
    }

    fn rank_f2(rows: &mut [Vec<u64>]) -> u64 {
        let mut rank = 0usize;
        let words = rows.first().map(|r| r.len()).unwrap_or(0);
        for w in 0..words {
            for bit in 0..64 {
                let mut pivot = None;
                for (i, row) in rows.iter().enumerate().skip(rank) {
                    if row[w] >> bit & 1 == 1 {
                        pivot = Some(i);
                        break;
                    }
                }
                let Some(p) = pivot else { continue };
                rows.swap(rank, p);
                let pivot_row = rows[rank].clone();
                for (i, row) in rows.iter_mut().enumerate() {
                    if i != rank && row[w] >> bit & 1 == 1 {
                        for (a, b) in row.iter_mut().zip(&pivot_row) {
                            *a ^= b;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::DegreePattern;

    fn single(name: &str, kind: AlgebraKind, deg: u64) -> GeneratorFamily {
        GeneratorFamily::new(name, kind, DegreePattern::Single(deg))
    }

    fn pres(fams: Vec<GeneratorFamily>) -> Presentation {
        Presentation::from_families(fams)
    }

    #[test]
    fn polynomial_generator_gives_one_exterior_class() {
        let p = pres(vec![single("x", AlgebraKind::Polynomial, 2)]);
        let dims = bar::bar_dims(&p, 10, bar::DEFAULT_BUDGET).unwrap();
        assert_eq!(dims.get(&(0, 0)), Some(&1));
        assert_eq!(dims.get(&(1, 2)), Some(&1));
        assert_eq!(dims.iter().filter(|(_, &v)| v > 0).count(), 2);
        rules_match_bar(&p, 10).unwrap();
    }

    #[test]
    fn exterior_generator_gives_a_divided_power_ladder() {
        let p = pres(vec![single("x", AlgebraKind::Exterior, 1)]);
        let dims = bar::bar_dims(&p, 6, bar::DEFAULT_BUDGET).unwrap();
        for s in 1..=6u64 {
            assert_eq!(dims.get(&(s, s)), Some(&1), "gamma_{s} missing");
        }
        rules_match_bar(&p, 6).unwrap();
    }

    #[test]
    fn truncated_generator_matches_its_two_classes() {
        let p = pres(vec![single("x", AlgebraKind::Truncated(4), 1)]);
        let dims = bar::bar_dims(&p, 9, bar::DEFAULT_BUDGET).unwrap();
        assert_eq!(dims.get(&(1, 1)), Some(&1));
        assert_eq!(dims.get(&(2, 4)), Some(&1));
        assert_eq!(dims.get(&(3, 5)), Some(&1));
        assert_eq!(dims.get(&(4, 8)), Some(&1));
        assert_eq!(dims.get(&(2, 2)), None);
        rules_match_bar(&p, 10).unwrap();
    }

    #[test]
    fn tensor_input_matches() {
        let p = pres(vec![
            single("x", AlgebraKind::Exterior, 1),
            single("y", AlgebraKind::Polynomial, 2),
        ]);
        rules_match_bar(&p, 10).unwrap();
    }

    #[test]
    fn divided_power_input_is_rejected() {
        let p = pres(vec![single("x", AlgebraKind::DividedPower, 2)]);
        assert!(matches!(tor_rules(&p), Err(Error::Tor(_))));
        assert!(matches!(
            bar::bar_dims(&p, 6, bar::DEFAULT_BUDGET),
            Err(Error::Tor(_))
        ));
    }

    #[test]
    fn tiny_budget_is_a_resource_error() {
        let p = pres(vec![single("x", AlgebraKind::Polynomial, 1)]);
        assert!(matches!(
            bar::bar_dims(&p, 12, 10),
            Err(Error::BarResource(_))
        ));
    }

    #[test]
    fn rules_shift_degrees_up_by_one() {
        let p = pres(vec![GeneratorFamily::new(
            "x",
            AlgebraKind::Polynomial,
            DegreePattern::residue_class(4, 2).unwrap(),
        )]);
        let tor = tor_rules(&p).unwrap();
        assert_eq!(tor.families.len(), 1);
        assert_eq!(tor.families[0].kind, AlgebraKind::Exterior);
        assert_eq!(tor.families[0].filtration, 1);
        assert_eq!(
            tor.families[0].pattern,
            DegreePattern::Progression { start: 3, step: 4 }
        );
    }
}
