//! The full verification run: one check record per catalog claim.
//!
//! Spectral-sequence entries (and their rejected alternative first maps),
//! short exact sequences, the connecting ladder with its exact chain, the
//! cohomology-side run, and the homotopy tables each contribute records to
//! a single [`Report`]. Entry runs are independent and execute in parallel.

use rayon::prelude::*;

use crate::catalog::{Catalog, CatalogEntry, ConnectingPair, HomotopyTable, LesSpec};
use crate::homotopy::{solve_unknown_groups, CyclicGroup, FlatSequence};
use crate::hopfmap::HopfMapSpec;
use crate::report::{CheckRecord, Report};
use crate::specseq::{e2_page, reject_variant, run_entry};
use crate::{Error, Result};

/// Runs every check in the catalog through degree `n` and tallies the
/// records. Engine misuse surfaces as an error; failed checks do not.
pub fn verify_all(cat: &Catalog, n: u64) -> Result<Report> {
    let mut checks: Vec<CheckRecord> = cat
        .entries
        .par_iter()
        .flat_map(|e| entry_checks(cat, e, n))
        .collect();

    let (map_count, ss_count) = cat.kr_involvement();
    checks.push(if (map_count, ss_count) == (48, 56) {
        CheckRecord::pass("coverage", "spectral").with_message(format!(
            "{map_count} of {} maps and {ss_count} of {} spectral sequences \
             involve the new spaces",
            cat.entries.len(),
            cat.entries.len()
        ))
    } else {
        CheckRecord::fail(
            "coverage",
            "spectral",
            format!("expected 48 maps and 56 spectral sequences to involve the new spaces, found {map_count} and {ss_count}"),
        )
    });

    for pair in &cat.connecting {
        checks.push(connecting_check(pair, n));
    }
    checks.push(les_check(&cat.les, n));

    for table in &cat.homotopy {
        checks.push(homotopy_check(table));
    }

    Ok(Report::new(cat.version.clone(), n, checks))
}

/// Verifies one entry by id: its spectral sequence run, any rejected
/// variants, and any cohomology-side run.
pub fn verify_entry(cat: &Catalog, id: &str, n: u64) -> Result<Report> {
    verify_ids(cat, std::slice::from_ref(&id.to_string()), n)
}

/// Verifies the listed entries. Unknown ids error before anything runs.
pub fn verify_ids(cat: &Catalog, ids: &[String], n: u64) -> Result<Report> {
    let entries = ids
        .iter()
        .map(|id| cat.lookup_entry(id))
        .collect::<Result<Vec<_>>>()?;
    let checks = entries
        .par_iter()
        .flat_map(|e| entry_checks(cat, e, n))
        .collect();
    Ok(Report::new(cat.version.clone(), n, checks))
}

fn entry_checks(cat: &Catalog, e: &CatalogEntry, n: u64) -> Vec<CheckRecord> {
    let kind = if e.spec.ses { "ses" } else { "spectral" };
    let mut out = Vec::new();
    out.push(match run_entry(&e.spec, n) {
        Ok(outcome) => {
            let mut rec = CheckRecord::pass(&e.spec.id, kind);
            if !outcome.notes.is_empty() {
                rec = rec.with_message(outcome.notes.join("; "));
            }
            rec
        }
        Err(err) => fail_with_degree(&e.spec.id, kind, &err),
    });

    for (v, alt) in e.variants.iter().enumerate() {
        let id = format!("{}/variant-{}", e.spec.id, v + 1);
        out.push(match reject_variant(alt, &e.spec.base, e.spec.pi0, n) {
            Ok(reason) => CheckRecord::pass(&id, "spectral").with_message(reason),
            Err(err) => fail_with_degree(&id, "spectral", &err),
        });
    }

    if e.em.is_some() {
        out.push(em_check(cat, e, n));
    }
    out
}

/// The cohomology-side spectral sequence of the same fibration: the base
/// restricts onto the total space, the kernel's Tor and the cokernel build
/// the page, and with every class in filtration zero or one the sequence
/// collapses onto the fiber.
fn em_check(cat: &Catalog, e: &CatalogEntry, n: u64) -> CheckRecord {
    let id = &e.spec.id;
    let em = e.em.as_ref().expect("checked by the caller");
    let run = || -> Result<CheckRecord> {
        let fiber = cat.presentation_of(&e.fiber)?;
        let (kernel, cokernel, _) = em.kernel_cokernel()?;
        let page = e2_page(&kernel, &cokernel, CyclicGroup::Zero)?;
        let deep = page.families.iter().map(|f| f.filtration).max().unwrap_or(0);
        if deep > 1 {
            return Ok(CheckRecord::fail(
                id,
                "em",
                format!("page classes reach filtration {deep}; collapse is not forced"),
            ));
        }
        match page.series(n)?.first_difference(&fiber.series(n)?) {
            None => Ok(CheckRecord::pass(id, "em").with_message(
                "page sits in filtrations zero and one and already has the fiber's series",
            )),
            Some(d) => Ok(CheckRecord::fail(
                id,
                "em",
                format!("collapsed page differs from the fiber at degree {d}"),
            )
            .with_degree(d)),
        }
    };
    run().unwrap_or_else(|err| fail_with_degree(id, "em", &err))
}

/// One rung of the connecting ladder: the restriction's image must have
/// exactly the connecting map's kernel series, their composite must vanish,
/// and rungs tagged short exact must also be monic, epic, and factor the
/// middle series.
fn connecting_check(pair: &ConnectingPair, n: u64) -> CheckRecord {
    let id = format!("rung-{}", pair.index);
    let run = || -> Result<CheckRecord> {
        let (rho_kernel, _, image) = pair.rho.verify_decomposition(n)?;
        let (delta_kernel, delta_cokernel, _) = pair.delta.kernel_cokernel()?;
        if let Some(d) = image.first_difference(&delta_kernel.series(n)?) {
            return Ok(CheckRecord::fail(
                &id,
                "connecting",
                format!("restriction image and connecting kernel differ at degree {d}"),
            )
            .with_degree(d));
        }
        if let Some(witness) = composite_image(&pair.rho, &pair.delta)? {
            return Ok(CheckRecord::fail(
                &id,
                "connecting",
                format!("composite of the rung maps is nonzero: {witness}"),
            ));
        }
        if pair.ses {
            if !rho_kernel.is_trivial() {
                return Ok(CheckRecord::fail(
                    &id,
                    "connecting",
                    format!("tagged short exact but the restriction has kernel {rho_kernel}"),
                ));
            }
            if !delta_cokernel.is_trivial() {
                return Ok(CheckRecord::fail(
                    &id,
                    "connecting",
                    format!("tagged short exact but the connecting map has cokernel {delta_cokernel}"),
                ));
            }
            let product = pair
                .rho
                .domain
                .series(n)?
                .mul(&pair.delta.codomain.series(n)?)?;
            if let Some(d) = product.first_difference(&pair.rho.codomain.series(n)?) {
                return Ok(CheckRecord::fail(
                    &id,
                    "connecting",
                    format!("middle series is not sub times quotient at degree {d}"),
                )
                .with_degree(d));
            }
            return Ok(CheckRecord::pass(&id, "connecting")
                .with_message("short exact: kernel trivial, cokernel trivial, middle factors"));
        }
        Ok(CheckRecord::pass(&id, "connecting").with_message("exact at the middle term"))
    };
    run().unwrap_or_else(|err| fail_with_degree(&id, "connecting", &err))
}

/// The flattened exact chain: series exactness at every interior space and
/// vanishing of every adjacent composite.
fn les_check(les: &LesSpec, n: u64) -> CheckRecord {
    let id = "chain-0";
    let run = || -> Result<CheckRecord> {
        for j in 1..les.spaces.len() - 1 {
            let image = les.maps[j - 1].verify_decomposition(n)?.2;
            let kernel = les.maps[j].kernel_cokernel()?.0;
            if let Some(d) = image.first_difference(&kernel.series(n)?) {
                return Ok(CheckRecord::fail(
                    id,
                    "connecting",
                    format!(
                        "inexact at {}: image and kernel series differ at degree {d}",
                        les.spaces[j]
                    ),
                )
                .with_degree(d));
            }
        }
        for j in 0..les.maps.len() - 1 {
            if let Some(witness) = composite_image(&les.maps[j], &les.maps[j + 1])? {
                return Ok(CheckRecord::fail(
                    id,
                    "connecting",
                    format!(
                        "composite through {} is nonzero: {witness}",
                        les.spaces[j + 1]
                    ),
                ));
            }
        }
        Ok(CheckRecord::pass(id, "connecting").with_message(format!(
            "exact at {} interior spaces, all composites vanish",
            les.spaces.len() - 2
        )))
    };
    run().unwrap_or_else(|err| fail_with_degree(id, "connecting", &err))
}

/// Traces every generator image of `f` through `g`. Returns a witness
/// description if some composite image survives, None when the composite is
/// zero. Accumulated powers kill images whose exponent reaches the target
/// generator's nilpotence order.
fn composite_image(f: &HopfMapSpec, g: &HopfMapSpec) -> Result<Option<String>> {
    if f.domain_fold.is_some() || g.domain_fold.is_some() {
        return Err(Error::Map(
            "composite vanishing is only checked for fold-free maps".into(),
        ));
    }
    for a in &f.assignments {
        let src = f.domain.family(&a.from)?;
        let members = match &a.members {
            Some(p) => p.to_set(),
            None => src.pattern.to_set(),
        };
        for t in &a.to {
            if !t.pow.is_power_of_two() {
                return Err(Error::Map(format!(
                    "cannot trace a power-{} image of {}",
                    t.pow, a.from
                )));
            }
            // Generator degrees in the middle family that actually carry
            // the image of these sources.
            let mut mid = members.clone();
            let mut p = t.pow;
            while p > 1 {
                mid = mid.half().map_err(|_| {
                    Error::Map(format!(
                        "image degrees of {} are not divisible by {}",
                        a.from, t.pow
                    ))
                })?;
                p /= 2;
            }
            let mut uncovered = mid.clone();
            for b in g.assignments.iter().filter(|b| b.from == t.family) {
                let bset = match &b.members {
                    Some(p) => p.to_set(),
                    None => g.domain.family(&b.from)?.pattern.to_set(),
                };
                let overlap = uncovered.intersect(&bset);
                if overlap.is_empty() {
                    continue;
                }
                uncovered = uncovered.minus(&overlap);
                for u in &b.to {
                    let order = g
                        .codomain
                        .family(&u.family)?
                        .kind
                        .generator_order();
                    let total = t.pow * u.pow;
                    if order.map_or(true, |o| total < o) {
                        return Ok(Some(format!(
                            "{} in degrees {overlap} lands in {} with exponent {total}",
                            a.from, u.family
                        )));
                    }
                }
            }
            // Uncovered middle generators map to zero by convention.
        }
    }
    Ok(None)
}

/// One homotopy table: solve blanks if any, check exactness, then confirm
/// the printed maps are forced by zeroing each in turn. Tables that needed
/// solved-for data pass as inferred.
fn homotopy_check(table: &HomotopyTable) -> CheckRecord {
    let run = || -> Result<CheckRecord> {
        let blanks = table.groups.iter().filter(|g| g.is_none()).count();
        let (seq, exact) = if blanks > 0 {
            solve_unknown_groups(&table.groups, &table.mults)?
        } else {
            let seq = FlatSequence {
                groups: table.groups.iter().map(|g| g.expect("no blanks")).collect(),
                mults: table.mults.clone(),
            };
            let exact = seq.check_exact()?;
            (seq, exact)
        };
        let broken = seq.zeroing_breaks_exactness()?;
        let mut message = format!(
            "exact at {} positions; zeroing any of {} printed maps breaks exactness",
            exact.checked.len(),
            broken.len()
        );
        if blanks > 0 || !exact.inferred.is_empty() {
            if blanks > 0 {
                message.push_str(&format!("; {blanks} blank group(s) solved"));
            }
            if !exact.inferred.is_empty() {
                let solved: Vec<String> = exact
                    .inferred
                    .iter()
                    .map(|(k, m)| format!("map {k} = {m}"))
                    .collect();
                message.push_str(&format!("; solved multipliers: {}", solved.join(", ")));
            }
            return Ok(CheckRecord::inferred(&table.name, "homotopy", message));
        }
        Ok(CheckRecord::pass(&table.name, "homotopy").with_message(message))
    };
    run().unwrap_or_else(|err| fail_with_degree(&table.name, "homotopy", &err))
}

fn fail_with_degree(id: &str, kind: &str, err: &Error) -> CheckRecord {
    let message = err.to_string();
    let mut rec = CheckRecord::fail(id, kind, message.clone());
    if let Some(d) = trailing_degree(&message) {
        rec = rec.with_degree(d);
    }
    rec
}

/// Extracts the degree from messages of the shape "... degree 12" or
/// "... degree 12, ...".
fn trailing_degree(message: &str) -> Option<u64> {
    let at = message.rfind("degree ")?;
    let digits: String = message[at + "degree ".len()..]
        .chars()
        .take_while(|c| c.is_ascii_digit())
        .collect();
    digits.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::CheckStatus;

    fn shipped() -> Catalog {
        Catalog::shipped().expect("shipped catalog loads")
    }

    #[test]
    fn full_run_passes() {
        let cat = shipped();
        let report = verify_all(&cat, 24).unwrap();
        let failures: Vec<String> = report
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| format!("{} {}: {}", c.kind, c.id, c.message))
            .collect();
        assert!(failures.is_empty(), "failing checks:\n{}", failures.join("\n"));
        assert!(report.passed());
        // 98 entries, one variant rejection, one coverage record, the
        // cohomology-side run, 8 rungs, the chain, and 4 tables.
        assert_eq!(report.summary.total, 98 + 1 + 1 + 1 + 8 + 1 + 4);
    }

    #[test]
    fn single_entry_report_is_small() {
        let cat = shipped();
        let report = verify_entry(&cat, "RR45", 24).unwrap();
        assert_eq!(report.summary.total, 1);
        assert!(report.passed());
    }

    #[test]
    fn unknown_entry_is_not_found() {
        let cat = shipped();
        assert!(matches!(
            verify_entry(&cat, "XX99", 24),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn degree_extraction_reads_the_last_mention() {
        assert_eq!(
            trailing_degree("series mismatch at degree 12"),
            Some(12)
        );
        assert_eq!(trailing_degree("no digits here"), None);
    }

    #[test]
    fn homotopy_tables_include_an_inferred_row() {
        let cat = shipped();
        let report = verify_all(&cat, 8).unwrap();
        let inferred: Vec<&CheckRecord> = report
            .checks
            .iter()
            .filter(|c| c.kind == "homotopy" && c.status == CheckStatus::Inferred)
            .collect();
        assert!(!inferred.is_empty());
    }
}
