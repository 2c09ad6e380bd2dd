//! Borel-decomposed presentations of graded bicommutative Hopf algebras
//! over the two-element field.
//!
//! A presentation is a tensor product of generator families, each family a
//! single algebra kind (polynomial, exterior, truncated polynomial, divided
//! power) with one generator per degree of its pattern, together with
//! Verschiebung rules and Frobenius links on generators.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pattern::DegreePattern;
use crate::series::{family_series, PoincareSeries};
use crate::{Error, Result};

/// The four single-generator Borel factor kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgebraKind {
    Polynomial,
    Exterior,
    /// Truncated polynomial of the given height, a power of two at least 2;
    /// height 4 is the only one the catalog uses.
    Truncated(u32),
    DividedPower,
}

impl AlgebraKind {
    /// Nilpotence order of a single generator: the least power that
    /// vanishes, or None for polynomial generators.
    pub fn generator_order(&self) -> Option<u32> {
        match *self {
            AlgebraKind::Polynomial => None,
            AlgebraKind::Exterior => Some(2),
            AlgebraKind::Truncated(h) => Some(h),
            // gamma_1(x)^2 = 2 gamma_2(x) = 0 over F2.
            AlgebraKind::DividedPower => Some(2),
        }
    }

    /// The kind presenting a free commutative algebra whose generator has
    /// the given nilpotence order.
    pub fn of_order(order: Option<u32>) -> Result<AlgebraKind> {
        match order {
            None => Ok(AlgebraKind::Polynomial),
            Some(2) => Ok(AlgebraKind::Exterior),
            Some(h) if h >= 4 && h.is_power_of_two() => Ok(AlgebraKind::Truncated(h)),
            Some(h) => Err(Error::Presentation(format!(
                "no algebra kind with generator order {h}"
            ))),
        }
    }

    fn sort_rank(&self) -> (u8, u32) {
        match *self {
            AlgebraKind::Polynomial => (0, 0),
            AlgebraKind::Exterior => (1, 0),
            AlgebraKind::Truncated(h) => (2, h),
            AlgebraKind::DividedPower => (3, 0),
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AlgebraKind::Polynomial => write!(f, "P"),
            AlgebraKind::Exterior => write!(f, "E"),
            AlgebraKind::Truncated(h) => write!(f, "TP{h}"),
            AlgebraKind::DividedPower => write!(f, "Gamma"),
        }
    }
}

impl Serialize for AlgebraKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AlgebraKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let text = String::deserialize(d)?;
        match text.as_str() {
            "P" => Ok(AlgebraKind::Polynomial),
            "E" => Ok(AlgebraKind::Exterior),
            "Gamma" => Ok(AlgebraKind::DividedPower),
            t if t.starts_with("TP") => {
                let h: u32 = t[2..]
                    .parse()
                    .map_err(|_| D::Error::custom(format!("bad algebra kind {t}")))?;
                if h >= 2 && h.is_power_of_two() {
                    Ok(AlgebraKind::Truncated(h))
                } else {
                    Err(D::Error::custom(format!(
                        "truncation height must be a power of two >= 2, got {h}"
                    )))
                }
            }
            t => Err(D::Error::custom(format!("bad algebra kind {t}"))),
        }
    }
}

/// One Borel factor: a family of generators, one per pattern degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorFamily {
    pub name: String,
    pub kind: AlgebraKind,
    pub pattern: DegreePattern,
    /// 0 for plain homology; positive inside spectral-sequence pages.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub filtration: u32,
}

fn is_zero(v: &u32) -> bool {
    *v == 0
}

impl GeneratorFamily {
    pub fn new(name: &str, kind: AlgebraKind, pattern: DegreePattern) -> Self {
        GeneratorFamily {
            name: name.into(),
            kind,
            pattern,
            filtration: 0,
        }
    }

    pub fn at_filtration(mut self, filt: u32) -> Self {
        self.filtration = filt;
        self
    }
}

/// Verschiebung on a sub-pattern of one family's generators: the member at
/// even degree `D` (with `D` in `members`) is sent to the `pow`-th power of
/// the target member at degree `D / (2 * pow)`. Generators not covered by
/// any rule have Verschiebung zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VRule {
    pub source: String,
    pub members: DegreePattern,
    pub target: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub pow: u32,
}

/// Frobenius data dual to a [`VRule`]: the member of `result` at degree `D`
/// (with `D` in `result_members`) equals the `2·pow`-th power of the
/// `square_of` member at degree `D / (2 * pow)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusLink {
    pub square_of: String,
    pub result: String,
    pub result_members: DegreePattern,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub pow: u32,
}

fn one() -> u32 {
    1
}

fn is_one(v: &u32) -> bool {
    *v == 1
}

/// A tensor product of generator families with Verschiebung and Frobenius
/// structure on generators.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Presentation {
    pub families: Vec<GeneratorFamily>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vrules: Vec<VRule>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frobenius: Vec<FrobeniusLink>,
}

impl Presentation {
    pub fn trivial() -> Self {
        Presentation::default()
    }

    pub fn from_families(families: Vec<GeneratorFamily>) -> Self {
        Presentation {
            families,
            vrules: Vec::new(),
            frobenius: Vec::new(),
        }
    }

    pub fn family(&self, name: &str) -> Result<&GeneratorFamily> {
        self.families
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| Error::NotFound(format!("family {name}")))
    }

    pub fn is_trivial(&self) -> bool {
        self.families.is_empty()
    }

    /// Checks name uniqueness, pattern validity, truncation heights, and
    /// degree consistency of Verschiebung rules and Frobenius links.
    /// `allow_exterior_frobenius` is false for finalized catalog data, where
    /// a link squaring an exterior family is inconsistent.
    pub fn validate(&self, allow_exterior_frobenius: bool) -> Result<()> {
        let mut seen = BTreeMap::new();
        for f in &self.families {
            f.pattern.validate()?;
            if let AlgebraKind::Truncated(h) = f.kind {
                if h < 2 || !h.is_power_of_two() {
                    return Err(Error::Presentation(format!(
                        "truncation height must be a power of two >= 2, got {h} in family {}",
                        f.name
                    )));
                }
            }
            if seen.insert(f.name.clone(), ()).is_some() {
                return Err(Error::Presentation(format!("duplicate family name {}", f.name)));
            }
        }
        for v in &self.vrules {
            if !(v.pow == 1 || v.pow == 2) {
                return Err(Error::Presentation(format!(
                    "Verschiebung rule power must be 1 or 2, got {}",
                    v.pow
                )));
            }
            let src = self.family(&v.source)?;
            let tgt = self.family(&v.target)?;
            let members = v.members.to_set();
            if !members.is_subset_of(&src.pattern.to_set()) {
                return Err(Error::Presentation(format!(
                    "Verschiebung members {} not inside family {}",
                    v.members, v.source
                )));
            }
            let halved = members.half().map_err(|_| {
                Error::Presentation(format!(
                    "Verschiebung members {} must be even degrees",
                    v.members
                ))
            })?;
            let base = if v.pow == 2 { halved.half()? } else { halved };
            if !base.is_subset_of(&tgt.pattern.to_set()) {
                return Err(Error::Presentation(format!(
                    "Verschiebung of {} does not land in family {}",
                    v.source, v.target
                )));
            }
        }
        for link in &self.frobenius {
            if !(link.pow == 1 || link.pow == 2) {
                return Err(Error::Presentation(format!(
                    "Frobenius link power must be 1 or 2, got {}",
                    link.pow
                )));
            }
            let base = self.family(&link.square_of)?;
            let result = self.family(&link.result)?;
            if base.kind == AlgebraKind::Exterior && !allow_exterior_frobenius {
                return Err(Error::Presentation(format!(
                    "family {} is exterior: its squares vanish, so it cannot carry a Frobenius link",
                    link.square_of
                )));
            }
            let members = link.result_members.to_set();
            if !members.is_subset_of(&result.pattern.to_set()) {
                return Err(Error::Presentation(format!(
                    "Frobenius result members {} not inside family {}",
                    link.result_members, link.result
                )));
            }
            let halved = members.half().map_err(|_| {
                Error::Presentation(format!(
                    "Frobenius result members {} must be even degrees",
                    link.result_members
                ))
            })?;
            let b = if link.pow == 2 { halved.half()? } else { halved };
            if !b.is_subset_of(&base.pattern.to_set()) {
                return Err(Error::Presentation(format!(
                    "Frobenius link squares of {} do not come from its pattern",
                    link.square_of
                )));
            }
        }
        Ok(())
    }

    /// Product of the family series: the graded dimension of the underlying
    /// algebra through degree `n`.
    pub fn series(&self, n: u64) -> Result<PoincareSeries> {
        let mut s = PoincareSeries::unit(n);
        for f in &self.families {
            s = s.mul(&family_series(f.kind, &f.pattern, n)?)?;
        }
        Ok(s)
    }

    /// Splits a divided-power family into exterior layers below level
    /// `2^j` and a divided-power family on the level-`2^j` classes. The
    /// layer at `d·2^m` sits at `2^m` times the original filtration.
    pub fn gamma_split(&self, family: &str, level_log2: u32) -> Result<Presentation> {
        let f = self.family(family)?;
        if f.kind != AlgebraKind::DividedPower {
            return Err(Error::Presentation(format!(
                "gamma_split needs a divided-power family, {family} is {}",
                f.kind
            )));
        }
        let mut out = self.clone();
        if level_log2 == 0 {
            return Ok(out);
        }
        let idx = out.families.iter().position(|g| g.name == family).unwrap();
        let original = out.families.remove(idx);
        let mut insert_at = idx;
        for m in 0..level_log2 {
            let layer = GeneratorFamily {
                name: format!("{}_l{}", original.name, m),
                kind: AlgebraKind::Exterior,
                pattern: original.pattern.scale(1 << m)?,
                filtration: original.filtration * (1 << m),
            };
            out.families.insert(insert_at, layer);
            insert_at += 1;
        }
        out.families.insert(
            insert_at,
            GeneratorFamily {
                name: format!("{}_l{}", original.name, level_log2),
                kind: AlgebraKind::DividedPower,
                pattern: original.pattern.scale(1 << level_log2)?,
                filtration: original.filtration * (1 << level_log2),
            },
        );
        Ok(out)
    }

    /// Swaps polynomial and divided-power kinds and exchanges Verschiebung
    /// rules with Frobenius links; exterior and truncated families are
    /// self-dual at this level. Series are unchanged and the map is an
    /// involution.
    pub fn dualize(&self) -> Presentation {
        let families = self
            .families
            .iter()
            .map(|f| GeneratorFamily {
                name: f.name.clone(),
                kind: match f.kind {
                    AlgebraKind::Polynomial => AlgebraKind::DividedPower,
                    AlgebraKind::DividedPower => AlgebraKind::Polynomial,
                    k => k,
                },
                pattern: f.pattern,
                filtration: f.filtration,
            })
            .collect();
        let vrules = self
            .frobenius
            .iter()
            .map(|l| VRule {
                source: l.result.clone(),
                members: l.result_members,
                target: l.square_of.clone(),
                pow: l.pow,
            })
            .collect();
        let frobenius = self
            .vrules
            .iter()
            .map(|v| FrobeniusLink {
                square_of: v.target.clone(),
                result: v.source.clone(),
                result_members: v.members,
                pow: v.pow,
            })
            .collect();
        Presentation {
            families,
            vrules,
            frobenius,
        }
    }

    /// Sorted, systematically renamed copy. Two presentations present the
    /// same algebra structure (family-wise) exactly when their canonical
    /// family lists agree; families with distinct patterns are never merged.
    pub fn canonicalize(&self) -> Presentation {
        let mut order: Vec<usize> = (0..self.families.len()).collect();
        let sort_key = |f: &GeneratorFamily| {
            let (rank, height) = f.kind.sort_rank();
            let (start, step) = match f.pattern {
                DegreePattern::Single(d) => (d, 0),
                DegreePattern::Progression { start, step } => (start, step),
            };
            (rank, height, start, step, f.filtration)
        };
        order.sort_by_key(|&i| sort_key(&self.families[i]));
        let mut rename = BTreeMap::new();
        let families: Vec<GeneratorFamily> = order
            .iter()
            .enumerate()
            .map(|(new_idx, &i)| {
                let f = &self.families[i];
                let name = format!("g{new_idx}");
                rename.insert(f.name.clone(), name.clone());
                GeneratorFamily {
                    name,
                    kind: f.kind,
                    pattern: f.pattern,
                    filtration: f.filtration,
                }
            })
            .collect();
        let vrules = self
            .vrules
            .iter()
            .map(|v| VRule {
                source: rename.get(&v.source).cloned().unwrap_or_else(|| v.source.clone()),
                members: v.members,
                target: rename.get(&v.target).cloned().unwrap_or_else(|| v.target.clone()),
                pow: v.pow,
            })
            .collect();
        let frobenius = self
            .frobenius
            .iter()
            .map(|l| FrobeniusLink {
                square_of: rename
                    .get(&l.square_of)
                    .cloned()
                    .unwrap_or_else(|| l.square_of.clone()),
                result: rename.get(&l.result).cloned().unwrap_or_else(|| l.result.clone()),
                result_members: l.result_members,
                pow: l.pow,
            })
            .collect();
        Presentation {
            families,
            vrules,
            frobenius,
        }
    }

    /// Family-wise structural equality after canonicalization. Verschiebung
    /// and Frobenius data are not compared: computed spectral-sequence
    /// output carries none.
    pub fn same_families(&self, other: &Presentation) -> bool {
        let a = self.canonicalize();
        let b = other.canonicalize();
        a.families == b.families
    }

    /// Merges same-kind, same-filtration families whose pattern union is a
    /// single pattern (and whose patterns are disjoint), repeatedly until no
    /// merge applies. The series is unchanged; distinct patterns whose union
    /// is not one progression stay separate.
    pub fn coalesce(&self) -> Presentation {
        let mut fams = self.families.clone();
        loop {
            let mut merged = None;
            'outer: for i in 0..fams.len() {
                for j in i + 1..fams.len() {
                    if fams[i].kind != fams[j].kind || fams[i].filtration != fams[j].filtration {
                        continue;
                    }
                    let a = fams[i].pattern.to_set();
                    let b = fams[j].pattern.to_set();
                    if !a.is_disjoint_from(&b) {
                        continue;
                    }
                    let u = a.union(&b);
                    let pats = u.extract_patterns();
                    if pats.len() == 1 {
                        merged = Some((i, j, pats[0]));
                        break 'outer;
                    }
                }
            }
            match merged {
                Some((i, j, pat)) => {
                    fams[i].pattern = pat;
                    fams.remove(j);
                }
                None => break,
            }
        }
        Presentation {
            families: fams,
            vrules: self.vrules.clone(),
            frobenius: self.frobenius.clone(),
        }
    }

    /// Tensor product; right-hand family names clashing with left-hand ones
    /// get a disambiguating suffix.
    pub fn tensor(&self, other: &Presentation) -> Presentation {
        let mut out = self.clone();
        let mut rename = BTreeMap::new();
        for f in &other.families {
            let mut name = f.name.clone();
            let mut tick = 0;
            while out.families.iter().any(|g| g.name == name) {
                tick += 1;
                name = format!("{}_{}", f.name, tick);
            }
            rename.insert(f.name.clone(), name.clone());
            out.families.push(GeneratorFamily {
                name,
                kind: f.kind,
                pattern: f.pattern,
                filtration: f.filtration,
            });
        }
        for v in &other.vrules {
            out.vrules.push(VRule {
                source: rename[&v.source].clone(),
                members: v.members,
                target: rename[&v.target].clone(),
                pow: v.pow,
            });
        }
        for l in &other.frobenius {
            out.frobenius.push(FrobeniusLink {
                square_of: rename[&l.square_of].clone(),
                result: rename[&l.result].clone(),
                result_members: l.result_members,
                pow: l.pow,
            });
        }
        out
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.families.is_empty() {
            return write!(f, "F2");
        }
        let parts: Vec<String> = self
            .families
            .iter()
            .map(|fam| {
                let filt = if fam.filtration > 0 {
                    format!(" @f{}", fam.filtration)
                } else {
                    String::new()
                };
                format!("{}[{}: {}{}]", fam.kind, fam.name, fam.pattern, filt)
            })
            .collect();
        write!(f, "{}", parts.join(" (x) "))
    }
}
