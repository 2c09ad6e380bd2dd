//! Structured maps between presentations, and their Hopf kernels and
//! cokernels.
//!
//! The map class is deliberately narrow: each generator goes to zero, to a
//! power of a single target generator, or to a two-term formal sum of such
//! powers. Sums are eliminated by one change of generators (a fold) before
//! kernels and cokernels are read off family-wise; the fold either rewrites
//! the codomain (when the sum has a power-one term) or cancels two sources
//! whose images coincide.

use serde::{Deserialize, Serialize};

use crate::pattern::{DegreePattern, DegreeSet};
use crate::presentation::{AlgebraKind, GeneratorFamily, Presentation};
use crate::series::PoincareSeries;
use crate::{Error, Result};

/// One summand of a generator image: the `pow`-th power of the target
/// family's member at the source degree divided by `pow`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub family: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub pow: u32,
}

fn one() -> u32 {
    1
}

fn is_one(v: &u32) -> bool {
    *v == 1
}

/// Image rule for a sub-pattern of one domain family. An empty `to` list is
/// the zero map on those generators; domain families with no assignment at
/// all also map to zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub from: String,
    /// Sub-pattern of the source family these images apply to; omitted
    /// means the whole family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<DegreePattern>,
    pub to: Vec<PowerTerm>,
}

/// Explicit domain-side change of generators: on `members`, the named
/// family's generator is replaced by itself plus `term`, after which the two
/// images cancel and the new generator maps to zero. `suppresses` names the
/// family whose own power-drop kernel lies inside the new kernel family and
/// must not be counted twice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainFold {
    pub family: String,
    pub members: DegreePattern,
    pub term: PowerTerm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suppresses: Option<String>,
}

/// A structured map between presentations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopfMapSpec {
    #[serde(skip, default)]
    pub domain: Presentation,
    #[serde(skip, default)]
    pub codomain: Presentation,
    #[serde(default)]
    pub assignments: Vec<Assignment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_fold: Option<DomainFold>,
}

/// How a kernel or cokernel was reached, for traces.
#[derive(Debug, Clone, Default)]
pub struct MapTrace {
    pub folds: Vec<String>,
    pub kernel_notes: Vec<String>,
    pub cokernel_notes: Vec<String>,
}

struct ResolvedAssignment {
    family: String,
    members: DegreeSet,
    image: Option<PowerTerm>,
    /// Order of the image element when it differs from the plain power
    /// order, as after a codomain fold.
    image_order: Option<Option<u32>>,
    /// Override for the kernel kind of a folded source.
    kernel_kind: Option<AlgebraKind>,
    /// Skip the power-drop kernel piece (it lies inside a fold kernel).
    suppress_kernel: bool,
}

fn order_of(kind: AlgebraKind) -> Option<u32> {
    kind.generator_order()
}

/// Order of `t^pow` where `t` has the given order; None is infinite.
fn power_order(ord: Option<u32>, pow: u32) -> Result<Option<u32>> {
    match ord {
        None => Ok(None),
        Some(o) => {
            if pow >= o {
                Err(Error::Map(format!(
                    "power {pow} of a generator of order {o} is zero; use an empty image instead"
                )))
            } else {
                Ok(Some(o / pow))
            }
        }
    }
}

fn le_order(a: Option<u32>, b: Option<u32>) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x <= y,
    }
}

impl HopfMapSpec {
    pub fn new(domain: Presentation, codomain: Presentation, assignments: Vec<Assignment>) -> Self {
        HopfMapSpec {
            domain,
            codomain,
            assignments,
            domain_fold: None,
        }
    }

    /// The zero map: every generator of the domain dies. Used for the
    /// augmentation of fibrations over a point.
    pub fn zero(domain: Presentation, codomain: Presentation) -> Self {
        HopfMapSpec::new(domain, codomain, Vec::new())
    }

    /// Resolves sub-pattern coverage, validates degree arithmetic, and
    /// performs the at-most-one fold that removes sum images.
    fn resolve(&self) -> Result<(Vec<ResolvedAssignment>, Vec<(String, DegreeSet, u32)>, MapTrace)> {
        let mut trace = MapTrace::default();
        let mut resolved: Vec<ResolvedAssignment> = Vec::new();
        // Pending cokernel caps from a codomain fold: (family, base degrees,
        // forced order).
        let mut caps: Vec<(String, DegreeSet, u32)> = Vec::new();
        let mut sum_count = 0;

        for a in &self.assignments {
            let src = self.domain.family(&a.from)?;
            let members = match &a.members {
                Some(p) => {
                    let m = p.to_set();
                    if !m.is_subset_of(&src.pattern.to_set()) {
                        return Err(Error::Map(format!(
                            "assignment members {p} not inside family {}",
                            a.from
                        )));
                    }
                    m
                }
                None => src.pattern.to_set(),
            };
            match a.to.len() {
                0 => resolved.push(ResolvedAssignment {
                    family: a.from.clone(),
                    members,
                    image: None,
                    image_order: None,
                    kernel_kind: None,
                    suppress_kernel: false,
                }),
                1 => {
                    self.check_term(&a.from, &members, &a.to[0])?;
                    resolved.push(ResolvedAssignment {
                        family: a.from.clone(),
                        members,
                        image: Some(a.to[0].clone()),
                        image_order: None,
                        kernel_kind: None,
                        suppress_kernel: false,
                    });
                }
                2 => {
                    // Codomain fold: replace the power-one term's generator
                    // y by y' = y + (other term); the source then hits y'
                    // alone, and if y has finite order o the removal of y'
                    // forces (other)^(o * pow) = 0 in the cokernel.
                    sum_count += 1;
                    let (first, second) = (&a.to[0], &a.to[1]);
                    let (t1, t2) = if first.pow == 1 {
                        (first, second)
                    } else if second.pow == 1 {
                        (second, first)
                    } else {
                        return Err(Error::NeedsRegeneration(format!(
                            "sum image of {} has no power-one term to fold into",
                            a.from
                        )));
                    };
                    self.check_term(&a.from, &members, t1)?;
                    self.check_term(&a.from, &members, t2)?;
                    let y = self.codomain.family(&t1.family)?;
                    let yy = self.codomain.family(&t2.family)?;
                    let o1 = order_of(y.kind);
                    // The folded generator y' = y + yy^pow has order
                    // max(ord y, ord yy / pow): a power kills y' only when
                    // it kills both summands.
                    let o2 = power_order(order_of(yy.kind), t2.pow)?;
                    let folded_ord = match (o1, o2) {
                        (None, _) | (_, None) => None,
                        (Some(a), Some(b)) => Some(a.max(b)),
                    };
                    let src_ord = order_of(src.kind);
                    if !le_order(folded_ord, src_ord) {
                        return Err(Error::Map(format!(
                            "folded image of {} has larger order than its source",
                            a.from
                        )));
                    }
                    if let Some(o) = o1 {
                        let base = divide_set(&members, t2.pow, &a.from)?;
                        caps.push((t2.family.clone(), base, o * t2.pow));
                    }
                    trace.folds.push(format!(
                        "codomain fold: {} + {}^{} replaces {} on {}",
                        t1.family, t2.family, t2.pow, t1.family, pats_text(&members)
                    ));
                    resolved.push(ResolvedAssignment {
                        family: a.from.clone(),
                        members,
                        image: Some(t1.clone()),
                        image_order: Some(folded_ord),
                        kernel_kind: None,
                        suppress_kernel: false,
                    });
                }
                n => {
                    return Err(Error::Map(format!(
                        "image of {} has {n} terms; at most two are supported",
                        a.from
                    )))
                }
            }
        }

        // Coverage: per domain family, assignment members must be disjoint;
        // anything uncovered maps to zero.
        for f in &self.domain.families {
            let mut covered = DegreeSet::empty();
            for r in resolved.iter().filter(|r| r.family == f.name) {
                if !covered.is_disjoint_from(&r.members) {
                    return Err(Error::Map(format!(
                        "overlapping assignments for family {}",
                        f.name
                    )));
                }
                covered = covered.union(&r.members);
            }
            let rest = f.pattern.to_set().minus(&covered);
            if !rest.is_empty() {
                resolved.push(ResolvedAssignment {
                    family: f.name.clone(),
                    members: rest,
                    image: None,
                    image_order: None,
                    kernel_kind: None,
                    suppress_kernel: false,
                });
            }
        }

        // Domain fold: two sources whose images coincide; their sum is a new
        // generator mapping to zero.
        if let Some(fold) = &self.domain_fold {
            if sum_count > 0 {
                return Err(Error::Map(
                    "at most one regeneration per map: cannot fold both sides".into(),
                ));
            }
            let fm = fold.members.to_set();
            let x = self.domain.family(&fold.family)?;
            let xx = self.domain.family(&fold.term.family)?;
            let xx_base = divide_set(&fm, fold.term.pow, &fold.family)?;
            // Locate the two image rules and check they hit the same element:
            // x at degree D and (xx at D/pow)^pow must share target family
            // with powers in ratio pow.
            let x_img = find_image(&resolved, &fold.family, &fm)?.ok_or_else(|| {
                Error::Map(format!("domain fold: {} maps to zero already", fold.family))
            })?;
            let xx_img = find_image(&resolved, &fold.term.family, &xx_base)?.ok_or_else(|| {
                Error::Map(format!(
                    "domain fold: {} maps to zero already",
                    fold.term.family
                ))
            })?;
            if x_img.family != xx_img.family || x_img.pow != xx_img.pow * fold.term.pow {
                return Err(Error::Map(format!(
                    "domain fold of {} + {}^{}: images do not coincide",
                    fold.family, fold.term.family, fold.term.pow
                )));
            }
            let folded_ord = match (order_of(x.kind), power_order(order_of(xx.kind), fold.term.pow)?)
            {
                (None, _) | (_, None) => None,
                (Some(a), Some(b)) => Some(a.max(b)),
            };
            let kernel_kind = AlgebraKind::of_order(folded_ord)?;
            trace.folds.push(format!(
                "domain fold: {} + {}^{} maps to zero on {}",
                fold.family, fold.term.family, fold.term.pow, fold.members
            ));
            // Rewrite: the folded part of x maps to zero with the fold's
            // kernel kind; xx keeps its image but its power-drop kernel on
            // the folded base degrees is suppressed.
            let mut new_resolved = Vec::new();
            for r in resolved {
                if r.family == fold.family {
                    let overlap = r.members.intersect(&fm);
                    if overlap.is_empty() {
                        new_resolved.push(r);
                        continue;
                    }
                    if !fm.is_subset_of(&r.members) {
                        return Err(Error::Map(
                            "domain fold members straddle assignment boundaries".into(),
                        ));
                    }
                    let rest = r.members.minus(&fm);
                    if !rest.is_empty() {
                        new_resolved.push(ResolvedAssignment {
                            family: r.family.clone(),
                            members: rest,
                            image: r.image.clone(),
                            image_order: r.image_order,
                            kernel_kind: None,
                            suppress_kernel: false,
                        });
                    }
                    new_resolved.push(ResolvedAssignment {
                        family: r.family.clone(),
                        members: fm.clone(),
                        image: None,
                        image_order: None,
                        kernel_kind: Some(kernel_kind),
                        suppress_kernel: false,
                    });
                } else if Some(&r.family) == fold.suppresses.as_ref() {
                    new_resolved.push(ResolvedAssignment {
                        suppress_kernel: true,
                        ..r
                    });
                } else {
                    new_resolved.push(r);
                }
            }
            resolved = new_resolved;
        }

        Ok((resolved, caps, trace))
    }

    fn check_term(&self, from: &str, members: &DegreeSet, term: &PowerTerm) -> Result<()> {
        if !(term.pow == 1 || term.pow == 2 || term.pow == 4) {
            return Err(Error::Map(format!(
                "image power must be 1, 2, or 4, got {}",
                term.pow
            )));
        }
        let tgt = self.codomain.family(&term.family)?;
        let base = divide_set(members, term.pow, from)?;
        if !base.is_subset_of(&tgt.pattern.to_set()) {
            return Err(Error::Map(format!(
                "image of {from} does not land on members of {}",
                term.family
            )));
        }
        Ok(())
    }

    /// Hopf kernel and cokernel of the map, with a trace of fold and
    /// family-level bookkeeping.
    pub fn kernel_cokernel(&self) -> Result<(Presentation, Presentation, MapTrace)> {
        let (resolved, caps, mut trace) = self.resolve()?;

        // Kernel: annihilated sub-families plus power-drop subalgebras.
        let mut kernel_fams: Vec<GeneratorFamily> = Vec::new();
        for r in &resolved {
            let src = self.domain.family(&r.family)?;
            match &r.image {
                None => {
                    let kind = r.kernel_kind.unwrap_or(src.kind);
                    push_families(&mut kernel_fams, &r.members, kind, &r.family);
                    if r.kernel_kind.is_some() {
                        trace
                            .kernel_notes
                            .push(format!("{}: folded generators, kind {}", r.family, kind));
                    }
                }
                Some(term) => {
                    let img_ord = match r.image_order {
                        Some(o) => o,
                        None => {
                            let tgt = self.codomain.family(&term.family)?;
                            power_order(order_of(tgt.kind), term.pow)?
                        }
                    };
                    let src_ord = order_of(src.kind);
                    if !le_order(img_ord, src_ord) {
                        return Err(Error::Map(format!(
                            "image of {} has larger order than the generator itself",
                            r.family
                        )));
                    }
                    if img_ord != src_ord {
                        // Power drop: x^k generates the kernel, k = image order.
                        let k = img_ord.expect("infinite image order equals infinite source");
                        if r.suppress_kernel {
                            trace.kernel_notes.push(format!(
                                "{}: power-drop kernel absorbed by the fold",
                                r.family
                            ));
                            continue;
                        }
                        let degrees = r.members.scale(k as u64);
                        let kind = AlgebraKind::of_order(match src_ord {
                            None => None,
                            Some(o) => Some(o / k),
                        })?;
                        push_families(
                            &mut kernel_fams,
                            &degrees,
                            kind,
                            &format!("{}{}", r.family, k),
                        );
                        trace.kernel_notes.push(format!(
                            "{}: image order {k} below generator order, kernel on powers",
                            r.family
                        ));
                    }
                }
            }
        }

        // Cokernel: partition each codomain family by hit level.
        let mut hits: Vec<(String, DegreeSet, u32)> = Vec::new();
        for r in &resolved {
            if let Some(term) = &r.image {
                let base = divide_set(&r.members, term.pow, &r.family)?;
                hits.push((term.family.clone(), base, term.pow));
            }
        }
        let mut cokernel_fams: Vec<GeneratorFamily> = Vec::new();
        for t in &self.codomain.families {
            let fam_hits: Vec<&(String, DegreeSet, u32)> =
                hits.iter().filter(|(n, _, _)| *n == t.name).collect();
            // Merge same-power hits; distinct powers on overlapping bases
            // mean the data still needs a fold.
            let mut by_pow: Vec<(u32, DegreeSet)> = Vec::new();
            for (_, base, pow) in fam_hits {
                match by_pow.iter_mut().find(|(p, _)| p == pow) {
                    Some((_, set)) => {
                        if !set.is_disjoint_from(base) {
                            return Err(Error::NeedsRegeneration(format!(
                                "two sources hit the same generators of {} at power {pow}",
                                t.name
                            )));
                        }
                        *set = set.union(base);
                    }
                    None => by_pow.push((*pow, base.clone())),
                }
            }
            for i in 0..by_pow.len() {
                for j in i + 1..by_pow.len() {
                    if !by_pow[i].1.is_disjoint_from(&by_pow[j].1) {
                        return Err(Error::NeedsRegeneration(format!(
                            "family {} is hit at two power levels on the same degrees",
                            t.name
                        )));
                    }
                }
            }
            let fam_caps: Vec<&(String, DegreeSet, u32)> =
                caps.iter().filter(|(n, _, _)| *n == t.name).collect();
            let mut unhit = t.pattern.to_set();
            for (pow, base) in &by_pow {
                if !base.is_subset_of(&unhit) {
                    return Err(Error::Map(format!(
                        "hits at power {pow} fall outside family {}",
                        t.name
                    )));
                }
                unhit = unhit.minus(base);
                if *pow > 1 {
                    // Quotient generators of order pow survive at the base
                    // degrees.
                    let kind = AlgebraKind::of_order(Some(*pow))?;
                    let (capped, rest) = split_by_caps(base, &fam_caps);
                    for (set, cap) in capped {
                        let k = AlgebraKind::of_order(Some((*pow).min(cap)))?;
                        push_families(&mut cokernel_fams, &set, k, &format!("{}q", t.name));
                    }
                    push_families(&mut cokernel_fams, &rest, kind, &format!("{}q", t.name));
                    trace.cokernel_notes.push(format!(
                        "{}: hit at power {pow}, quotient of order {pow} remains",
                        t.name
                    ));
                } else {
                    trace
                        .cokernel_notes
                        .push(format!("{}: generators removed on {}", t.name, pats_text(base)));
                }
            }
            let (capped, rest) = split_by_caps(&unhit, &fam_caps);
            for (set, cap) in capped {
                let kind = match order_of(t.kind) {
                    None => AlgebraKind::of_order(Some(cap))?,
                    Some(o) => AlgebraKind::of_order(Some(o.min(cap)))?,
                };
                push_families(&mut cokernel_fams, &set, kind, &t.name);
                trace.cokernel_notes.push(format!(
                    "{}: fold forces order {cap} on {}",
                    t.name,
                    pats_text(&set)
                ));
            }
            push_families(&mut cokernel_fams, &rest, t.kind, &t.name);
        }

        Ok((
            Presentation::from_families(kernel_fams),
            Presentation::from_families(cokernel_fams),
            trace,
        ))
    }

    /// Series-level decomposition checks through degree `n`: the domain
    /// must factor as kernel times image and the codomain as image times
    /// cokernel. Returns (kernel, cokernel, image series).
    pub fn verify_decomposition(
        &self,
        n: u64,
    ) -> Result<(Presentation, Presentation, PoincareSeries)> {
        let (kernel, cokernel, _) = self.kernel_cokernel()?;
        let image = self
            .domain
            .series(n)?
            .exact_divide(&kernel.series(n)?)
            .map_err(|e| Error::Map(format!("domain does not factor through the kernel: {e}")))?;
        let recomposed = image.mul(&cokernel.series(n)?)?;
        let cod = self.codomain.series(n)?;
        if let Some(d) = recomposed.first_difference(&cod) {
            return Err(Error::Map(format!(
                "codomain is not image times cokernel, first failing degree {d}"
            )));
        }
        Ok((kernel, cokernel, image))
    }
}

fn divide_set(members: &DegreeSet, pow: u32, from: &str) -> Result<DegreeSet> {
    let mut base = members.clone();
    let mut p = pow;
    while p > 1 {
        base = base.half().map_err(|_| {
            Error::Map(format!(
                "degrees of {from} are not divisible by the image power {pow}"
            ))
        })?;
        p /= 2;
    }
    Ok(base)
}

fn find_image<'a>(
    resolved: &'a [ResolvedAssignment],
    family: &str,
    members: &DegreeSet,
) -> Result<Option<&'a PowerTerm>> {
    for r in resolved.iter().filter(|r| r.family == family) {
        if members.is_subset_of(&r.members) {
            return Ok(r.image.as_ref());
        }
        if !members.is_disjoint_from(&r.members) {
            return Err(Error::Map(format!(
                "fold members straddle assignment boundaries of {family}"
            )));
        }
    }
    Err(Error::NotFound(format!("assignment covering {family}")))
}

fn split_by_caps(
    set: &DegreeSet,
    caps: &[&(String, DegreeSet, u32)],
) -> (Vec<(DegreeSet, u32)>, DegreeSet) {
    let mut rest = set.clone();
    let mut out = Vec::new();
    for (_, base, order) in caps {
        let captured = rest.intersect(base);
        if !captured.is_empty() {
            rest = rest.minus(&captured);
            out.push((captured, *order));
        }
    }
    (out, rest)
}

fn push_families(out: &mut Vec<GeneratorFamily>, set: &DegreeSet, kind: AlgebraKind, stem: &str) {
    for (i, pat) in set.extract_patterns().into_iter().enumerate() {
        let name = if i == 0 {
            stem.to_string()
        } else {
            format!("{stem}_{i}")
        };
        let mut name = name;
        while out.iter().any(|f| f.name == name) {
            name.push('x');
        }
        out.push(GeneratorFamily::new(&name, kind, pat));
    }
}

fn pats_text(set: &DegreeSet) -> String {
    let parts: Vec<String> = set
        .extract_patterns()
        .iter()
        .map(|p| p.to_string())
        .collect();
    if parts.is_empty() {
        "{}".into()
    } else {
        parts.join(" u ")
    }
}

/// The self-map doubling every homotopy class: each generator with
/// Verschiebung data goes to the square of its Verschiebung image, and
/// everything else dies.
pub fn induced_two(p: &Presentation) -> Result<HopfMapSpec> {
    let mut assignments = Vec::new();
    for v in &p.vrules {
        assignments.push(Assignment {
            from: v.source.clone(),
            members: Some(v.members),
            to: vec![PowerTerm {
                family: v.target.clone(),
                pow: 2 * v.pow,
            }],
        });
    }
    let m = HopfMapSpec::new(p.clone(), p.clone(), assignments);
    // Surface degree inconsistencies immediately.
    m.resolve()?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::VRule;

    fn rc(m: u64, r: u64) -> DegreePattern {
        DegreePattern::residue_class(m, r).unwrap()
    }

    fn poly_all() -> Presentation {
        Presentation {
            families: vec![GeneratorFamily::new("x", AlgebraKind::Polynomial, rc(1, 1))],
            vrules: vec![VRule {
                source: "x".into(),
                members: rc(2, 2),
                target: "x".into(),
                pow: 1,
            }],
            frobenius: vec![],
        }
    }

    #[test]
    fn doubling_map_on_polynomial_generators() {
        // Even generators square onto lower ones; odd generators die. The
        // kernel is polynomial on odd degrees and the cokernel exterior on
        // every degree.
        let p = poly_all();
        let two = induced_two(&p).unwrap();
        let (kernel, cokernel, _) = two.kernel_cokernel().unwrap();
        assert_eq!(kernel.families.len(), 1);
        assert_eq!(kernel.families[0].kind, AlgebraKind::Polynomial);
        assert_eq!(kernel.families[0].pattern, rc(2, 1));
        assert_eq!(cokernel.families.len(), 1);
        assert_eq!(cokernel.families[0].kind, AlgebraKind::Exterior);
        assert_eq!(cokernel.families[0].pattern, rc(1, 1));
        two.verify_decomposition(24).unwrap();
    }

    #[test]
    fn identity_map_has_trivial_kernel_and_cokernel() {
        let p = poly_all();
        let m = HopfMapSpec::new(
            p.clone(),
            p.clone(),
            vec![Assignment {
                from: "x".into(),
                members: None,
                to: vec![PowerTerm {
                    family: "x".into(),
                    pow: 1,
                }],
            }],
        );
        let (kernel, cokernel, _) = m.kernel_cokernel().unwrap();
        assert!(kernel.is_trivial());
        assert!(cokernel.is_trivial());
    }

    #[test]
    fn zero_map_kernel_is_the_domain() {
        let p = poly_all();
        let m = HopfMapSpec::zero(p.clone(), Presentation::trivial());
        let (kernel, cokernel, _) = m.kernel_cokernel().unwrap();
        assert!(kernel.same_families(&p));
        assert!(cokernel.is_trivial());
    }

    #[test]
    fn polynomial_onto_exterior_drops_to_squares() {
        // P(x) onto E(y) generator-wise: the kernel is P(x^2).
        let dom = Presentation::from_families(vec![GeneratorFamily::new(
            "x",
            AlgebraKind::Polynomial,
            rc(2, 1),
        )]);
        let cod = Presentation::from_families(vec![GeneratorFamily::new(
            "y",
            AlgebraKind::Exterior,
            rc(2, 1),
        )]);
        let m = HopfMapSpec::new(
            dom,
            cod,
            vec![Assignment {
                from: "x".into(),
                members: None,
                to: vec![PowerTerm {
                    family: "y".into(),
                    pow: 1,
                }],
            }],
        );
        let (kernel, cokernel, _) = m.kernel_cokernel().unwrap();
        assert_eq!(kernel.families.len(), 1);
        assert_eq!(kernel.families[0].kind, AlgebraKind::Polynomial);
        assert_eq!(kernel.families[0].pattern, rc(4, 2));
        assert!(cokernel.is_trivial());
        m.verify_decomposition(20).unwrap();
    }

    #[test]
    fn truncated_source_keeps_an_exterior_kernel() {
        // TP_4(x) onto E(y): x^2 generates the kernel and squares to zero.
        let dom = Presentation::from_families(vec![GeneratorFamily::new(
            "x",
            AlgebraKind::Truncated(4),
            rc(1, 1),
        )]);
        let cod = Presentation::from_families(vec![GeneratorFamily::new(
            "y",
            AlgebraKind::Exterior,
            rc(1, 1),
        )]);
        let m = HopfMapSpec::new(
            dom,
            cod,
            vec![Assignment {
                from: "x".into(),
                members: None,
                to: vec![PowerTerm {
                    family: "y".into(),
                    pow: 1,
                }],
            }],
        );
        let (kernel, _, _) = m.kernel_cokernel().unwrap();
        assert_eq!(kernel.families.len(), 1);
        assert_eq!(kernel.families[0].kind, AlgebraKind::Exterior);
        assert_eq!(kernel.families[0].pattern, rc(2, 2));
        m.verify_decomposition(16).unwrap();
    }

    #[test]
    fn fourth_power_hit_truncates_the_target() {
        // x -> y^4 on a polynomial target leaves TP_4 in the cokernel.
        let dom = Presentation::from_families(vec![GeneratorFamily::new(
            "x",
            AlgebraKind::Polynomial,
            rc(4, 4),
        )]);
        let cod = Presentation::from_families(vec![GeneratorFamily::new(
            "y",
            AlgebraKind::Polynomial,
            rc(1, 1),
        )]);
        let m = HopfMapSpec::new(
            dom,
            cod,
            vec![Assignment {
                from: "x".into(),
                members: None,
                to: vec![PowerTerm {
                    family: "y".into(),
                    pow: 4,
                }],
            }],
        );
        let (kernel, cokernel, _) = m.kernel_cokernel().unwrap();
        assert!(kernel.is_trivial());
        assert_eq!(cokernel.families.len(), 1);
        assert_eq!(cokernel.families[0].kind, AlgebraKind::Truncated(4));
        assert_eq!(cokernel.families[0].pattern, rc(1, 1));
        m.verify_decomposition(16).unwrap();
    }

    #[test]
    fn codomain_fold_caps_the_summand_family() {
        // x -> y + z^2 with y exterior and z polynomial: removing the folded
        // generator forces z^4 = 0, so the cokernel keeps TP_4(z).
        let dom = Presentation::from_families(vec![GeneratorFamily::new(
            "x",
            AlgebraKind::Polynomial,
            rc(4, 2),
        )]);
        let cod = Presentation::from_families(vec![
            GeneratorFamily::new("y", AlgebraKind::Exterior, rc(4, 2)),
            GeneratorFamily::new("z", AlgebraKind::Polynomial, rc(2, 1)),
        ]);
        let m = HopfMapSpec::new(
            dom,
            cod,
            vec![Assignment {
                from: "x".into(),
                members: None,
                to: vec![
                    PowerTerm {
                        family: "y".into(),
                        pow: 1,
                    },
                    PowerTerm {
                        family: "z".into(),
                        pow: 2,
                    },
                ],
            }],
        );
        let (kernel, cokernel, trace) = m.kernel_cokernel().unwrap();
        assert!(kernel.is_trivial());
        assert_eq!(trace.folds.len(), 1);
        assert_eq!(cokernel.families.len(), 1);
        assert_eq!(cokernel.families[0].kind, AlgebraKind::Truncated(4));
        assert_eq!(cokernel.families[0].pattern, rc(2, 1));
        m.verify_decomposition(16).unwrap();
    }

    #[test]
    fn double_hit_requires_regeneration() {
        let dom = Presentation::from_families(vec![
            GeneratorFamily::new("a", AlgebraKind::Polynomial, rc(2, 2)),
            GeneratorFamily::new("b", AlgebraKind::Polynomial, rc(2, 2)),
        ]);
        let cod = Presentation::from_families(vec![GeneratorFamily::new(
            "y",
            AlgebraKind::Polynomial,
            rc(2, 2),
        )]);
        let m = HopfMapSpec::new(
            dom,
            cod,
            vec![
                Assignment {
                    from: "a".into(),
                    members: None,
                    to: vec![PowerTerm {
                        family: "y".into(),
                        pow: 1,
                    }],
                },
                Assignment {
                    from: "b".into(),
                    members: None,
                    to: vec![PowerTerm {
                        family: "y".into(),
                        pow: 1,
                    }],
                },
            ],
        );
        assert!(matches!(
            m.kernel_cokernel(),
            Err(Error::NeedsRegeneration(_))
        ));
    }

    #[test]
    fn domain_fold_cancels_matching_images() {
        // a at degree 2d and b^2 at the same degree hit the same element;
        // a + b^2 is a new polynomial generator mapping to zero, and the
        // power-drop kernel of b sits inside it.
        let dom = Presentation::from_families(vec![
            GeneratorFamily::new("a", AlgebraKind::Exterior, rc(4, 2)),
            GeneratorFamily::new("b", AlgebraKind::Polynomial, rc(2, 1)),
        ]);
        let cod = Presentation::from_families(vec![GeneratorFamily::new(
            "y",
            AlgebraKind::Truncated(4),
            rc(2, 1),
        )]);
        let mut m = HopfMapSpec::new(
            dom,
            cod,
            vec![
                Assignment {
                    from: "a".into(),
                    members: None,
                    to: vec![PowerTerm {
                        family: "y".into(),
                        pow: 2,
                    }],
                },
                Assignment {
                    from: "b".into(),
                    members: None,
                    to: vec![PowerTerm {
                        family: "y".into(),
                        pow: 1,
                    }],
                },
            ],
        );
        // Without the fold: y is hit at powers 1 and 2 on the same degrees.
        assert!(matches!(
            m.kernel_cokernel(),
            Err(Error::NeedsRegeneration(_))
        ));
        m.domain_fold = Some(DomainFold {
            family: "a".into(),
            members: rc(4, 2),
            term: PowerTerm {
                family: "b".into(),
                pow: 2,
            },
            suppresses: Some("b".into()),
        });
        let (kernel, cokernel, _) = m.kernel_cokernel().unwrap();
        // Kernel: the folded generators, polynomial since b is.
        assert_eq!(kernel.families.len(), 1);
        assert_eq!(kernel.families[0].kind, AlgebraKind::Polynomial);
        assert_eq!(kernel.families[0].pattern, rc(4, 2));
        assert!(cokernel.is_trivial());
        m.verify_decomposition(16).unwrap();
    }
}
