//! Cyclic group bookkeeping for the homotopy tables.
//!
//! Every group in the tables is trivial, $\mathbb{Z}/2$, $\mathbb{Z}/4$, or
//! $\mathbb{Z}$, and every map between them is multiplication by a small
//! integer, so exactness reduces to order arithmetic on cyclic subgroups.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The isomorphism classes appearing in the tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CyclicGroup {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "Z2")]
    Z2,
    #[serde(rename = "Z4")]
    Z4,
    #[serde(rename = "Z")]
    Z,
}

impl CyclicGroup {
    /// Group order; None is infinite.
    pub fn order(self) -> Option<u64> {
        match self {
            CyclicGroup::Zero => Some(1),
            CyclicGroup::Z2 => Some(2),
            CyclicGroup::Z4 => Some(4),
            CyclicGroup::Z => None,
        }
    }
}

impl fmt::Display for CyclicGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CyclicGroup::Zero => write!(f, "0"),
            CyclicGroup::Z2 => write!(f, "Z/2"),
            CyclicGroup::Z4 => write!(f, "Z/4"),
            CyclicGroup::Z => write!(f, "Z"),
        }
    }
}

/// A subgroup of a cyclic group: the unique subgroup of a given order in
/// the finite case, or the multiples of the index in the integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subgroup {
    Finite(u64),
    /// `ZIndex(m)` is $m\mathbb{Z}$; `ZIndex(0)` is the trivial subgroup.
    ZIndex(u64),
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subgroup::Finite(o) => write!(f, "subgroup of order {o}"),
            Subgroup::ZIndex(0) => write!(f, "0"),
            Subgroup::ZIndex(m) => write!(f, "{m}Z"),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A map between cyclic groups, multiplication by `mult` on generators.
#[derive(Debug, Clone, Copy)]
pub struct CyclicMap {
    pub from: CyclicGroup,
    pub to: CyclicGroup,
    pub mult: u64,
}

impl CyclicMap {
    pub fn new(from: CyclicGroup, to: CyclicGroup, mult: u64) -> Result<Self> {
        let m = CyclicMap { from, to, mult };
        m.validate()?;
        Ok(m)
    }

    /// A homomorphism must kill the order of the source generator.
    fn validate(&self) -> Result<()> {
        match (self.from.order(), self.to.order()) {
            (None, _) => Ok(()),
            (Some(a), Some(b)) => {
                if (self.mult * a) % b == 0 {
                    Ok(())
                } else {
                    Err(Error::Homotopy(format!(
                        "multiplication by {} is not a homomorphism {} -> {}",
                        self.mult, self.from, self.to
                    )))
                }
            }
            (Some(_), None) => {
                if self.mult == 0 {
                    Ok(())
                } else {
                    Err(Error::Homotopy(format!(
                        "no nonzero map from finite {} to Z",
                        self.from
                    )))
                }
            }
        }
    }

    /// Image as a subgroup of the target.
    pub fn image(&self) -> Subgroup {
        match self.to.order() {
            None => Subgroup::ZIndex(self.mult),
            Some(b) => {
                if self.mult == 0 {
                    Subgroup::Finite(1)
                } else {
                    // Generated by mult times the target generator; a finite
                    // source can only shrink it further, but validation has
                    // already forced compatibility.
                    Subgroup::Finite(b / gcd(self.mult, b))
                }
            }
        }
    }

    /// Kernel as a subgroup of the source.
    pub fn kernel(&self) -> Subgroup {
        let image_order = match self.image() {
            Subgroup::Finite(o) => Some(o),
            Subgroup::ZIndex(0) => Some(1),
            Subgroup::ZIndex(_) => None,
        };
        match (self.from.order(), image_order) {
            (Some(a), Some(o)) => Subgroup::Finite(a / o),
            (None, Some(o)) => Subgroup::ZIndex(o),
            (None, None) => Subgroup::ZIndex(0),
            (Some(_), None) => unreachable!("finite source with infinite image"),
        }
    }
}

/// One flattened long exact sequence: groups and the multiplier of each map
/// between consecutive ones. `mults[k]` is the map from `groups[k]` to
/// `groups[k+1]`; a None entry is solved for (the unique value restoring
/// exactness) and flagged.
#[derive(Debug, Clone)]
pub struct FlatSequence {
    pub groups: Vec<CyclicGroup>,
    pub mults: Vec<Option<u64>>,
}

/// Outcome of an exactness check.
#[derive(Debug, Clone)]
pub struct ExactnessReport {
    /// Positions (index into groups) where exactness was verified.
    pub checked: Vec<usize>,
    /// (map index, solved multiplier) for entries stored without one.
    pub inferred: Vec<(usize, u64)>,
}

impl FlatSequence {
    pub fn validate(&self) -> Result<()> {
        if self.groups.len() < 3 {
            return Err(Error::Homotopy(
                "a sequence needs at least three groups".into(),
            ));
        }
        if self.mults.len() + 1 != self.groups.len() {
            return Err(Error::Homotopy(format!(
                "{} groups need {} maps, got {}",
                self.groups.len(),
                self.groups.len() - 1,
                self.mults.len()
            )));
        }
        Ok(())
    }

    fn map_at(&self, k: usize, mult: u64) -> Result<CyclicMap> {
        CyclicMap::new(self.groups[k], self.groups[k + 1], mult)
    }

    /// Verifies image = kernel at every interior position, solving any
    /// stored-as-unknown multiplier by uniqueness.
    pub fn check_exact(&self) -> Result<ExactnessReport> {
        self.validate()?;
        let mut mults: Vec<u64> = Vec::with_capacity(self.mults.len());
        let mut inferred = Vec::new();
        for (k, m) in self.mults.iter().enumerate() {
            match m {
                Some(v) => {
                    self.map_at(k, *v)?;
                    mults.push(*v);
                }
                None => {
                    let solved = self.solve_mult(k)?;
                    inferred.push((k, solved));
                    mults.push(solved);
                }
            }
        }
        let mut checked = Vec::new();
        for pos in 1..self.groups.len() - 1 {
            let f = self.map_at(pos - 1, mults[pos - 1])?;
            let g = self.map_at(pos, mults[pos])?;
            if f.image() != g.kernel() {
                return Err(Error::Homotopy(format!(
                    "inexact at position {pos} ({}): image {} but kernel {}",
                    self.groups[pos],
                    f.image(),
                    g.kernel()
                )));
            }
            checked.push(pos);
        }
        Ok(ExactnessReport { checked, inferred })
    }

    /// The unique multiplier for map `k` making both adjacent positions
    /// exact, given every other multiplier is stored.
    fn solve_mult(&self, k: usize) -> Result<u64> {
        let max = self.groups[k + 1].order().unwrap_or(8);
        let mut found = Vec::new();
        'candidates: for cand in 0..max {
            let Ok(g) = self.map_at(k, cand) else {
                continue;
            };
            // Exactness on the two sides that involve map k, where defined.
            if k > 0 {
                if let Some(prev) = self.mults[k - 1] {
                    let f = self.map_at(k - 1, prev)?;
                    if f.image() != g.kernel() {
                        continue 'candidates;
                    }
                }
            }
            if k + 1 < self.mults.len() {
                if let Some(next) = self.mults[k + 1] {
                    let h = self.map_at(k + 1, next)?;
                    if g.image() != h.kernel() {
                        continue 'candidates;
                    }
                }
            }
            found.push(cand);
        }
        match found.as_slice() {
            [one] => Ok(*one),
            [] => Err(Error::Homotopy(format!(
                "no multiplier for map {k} restores exactness"
            ))),
            many => Err(Error::Homotopy(format!(
                "map {k} is not determined by exactness: {many:?} all work"
            ))),
        }
    }

    /// Negative control: zeroing any single nonzero map must break
    /// exactness somewhere. Returns the map indices whose zeroing was
    /// verified to break the sequence.
    pub fn zeroing_breaks_exactness(&self) -> Result<Vec<usize>> {
        self.check_exact()?;
        let mut broken = Vec::new();
        for k in 0..self.mults.len() {
            match self.mults[k] {
                Some(0) | None => continue,
                Some(_) => {}
            }
            let mut perturbed = self.clone();
            perturbed.mults[k] = Some(0);
            match perturbed.check_exact() {
                Ok(_) => {
                    return Err(Error::Homotopy(format!(
                        "zeroing map {k} leaves the sequence exact"
                    )))
                }
                Err(_) => broken.push(k),
            }
        }
        Ok(broken)
    }
}

/// Solves a sequence whose table leaves some groups blank: tries each of
/// the four isomorphism classes in every blank slot and demands exactly one
/// combination making the whole sequence exact. Maps adjacent to a blank
/// are stored as unknown multipliers and get solved along the way.
pub fn solve_unknown_groups(
    groups: &[Option<CyclicGroup>],
    mults: &[Option<u64>],
) -> Result<(FlatSequence, ExactnessReport)> {
    const CANDIDATES: [CyclicGroup; 4] = [
        CyclicGroup::Zero,
        CyclicGroup::Z2,
        CyclicGroup::Z4,
        CyclicGroup::Z,
    ];
    let unknown: Vec<usize> = groups
        .iter()
        .enumerate()
        .filter(|(_, g)| g.is_none())
        .map(|(i, _)| i)
        .collect();
    if unknown.len() > 4 {
        return Err(Error::Homotopy(format!(
            "{} blank groups are too many to solve by enumeration",
            unknown.len()
        )));
    }
    let mut solutions: Vec<(FlatSequence, ExactnessReport)> = Vec::new();
    for code in 0..4usize.pow(unknown.len() as u32) {
        let mut filled: Vec<CyclicGroup> = groups
            .iter()
            .map(|g| g.unwrap_or(CyclicGroup::Zero))
            .collect();
        let mut c = code;
        for &pos in &unknown {
            filled[pos] = CANDIDATES[c % 4];
            c /= 4;
        }
        let seq = FlatSequence {
            groups: filled,
            mults: mults.to_vec(),
        };
        if let Ok(report) = seq.check_exact() {
            solutions.push((seq, report));
        }
    }
    match solutions.len() {
        1 => Ok(solutions.pop().expect("exactly one solution")),
        0 => Err(Error::Homotopy(
            "no assignment of the blank groups restores exactness".into(),
        )),
        k => Err(Error::Homotopy(format!(
            "blank groups are not determined by exactness: {k} assignments work"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(groups: Vec<CyclicGroup>, mults: Vec<Option<u64>>) -> FlatSequence {
        FlatSequence { groups, mults }
    }

    use CyclicGroup::{Z2, Z4, Zero, Z};

    #[test]
    fn doubling_then_reduction_is_exact() {
        // Z --2--> Z --1--> Z/2 --0--> 0
        let s = seq(
            vec![Z, Z, Z2, Zero],
            vec![Some(2), Some(1), Some(0)],
        );
        let r = s.check_exact().unwrap();
        assert_eq!(r.checked, vec![1, 2]);
        assert!(r.inferred.is_empty());
    }

    #[test]
    fn isomorphism_after_zero_is_exact() {
        let s = seq(vec![Zero, Z4, Z4], vec![Some(0), Some(1)]);
        s.check_exact().unwrap();
    }

    #[test]
    fn z2_into_z4_segment_is_exact() {
        // 0 -> Z/2 --2--> Z/4 --1--> Z/2 -> 0: the image of doubling is the
        // order-2 subgroup, which is the kernel of reduction.
        let s = seq(
            vec![Zero, Z2, Z4, Z2, Zero],
            vec![Some(0), Some(2), Some(1), Some(0)],
        );
        s.check_exact().unwrap();
    }

    #[test]
    fn inexactness_is_reported_with_position() {
        let s = seq(vec![Zero, Z2, Zero], vec![Some(0), Some(0)]);
        let err = s.check_exact().unwrap_err();
        assert!(err.to_string().contains("position 1"));
    }

    #[test]
    fn missing_multiplier_is_solved_uniquely() {
        // The map Z/2 -> Z/4 must be multiplication by 2 for exactness.
        let s = seq(
            vec![Zero, Z2, Z4, Z2, Zero],
            vec![Some(0), None, Some(1), Some(0)],
        );
        let r = s.check_exact().unwrap();
        assert_eq!(r.inferred, vec![(1, 2)]);
    }

    #[test]
    fn zeroing_any_map_breaks_an_exact_sequence() {
        let s = seq(
            vec![Zero, Z2, Z4, Z2, Zero],
            vec![Some(0), Some(2), Some(1), Some(0)],
        );
        let broken = s.zeroing_breaks_exactness().unwrap();
        assert_eq!(broken, vec![1, 2]);
    }

    #[test]
    fn blank_group_is_forced_by_its_neighbors() {
        // Z/2 --2--> Z/4 --?--> Z/2 --?--> x --?--> Z/2 --2--> Z/4 --?--> Z/2
        // leaves only the trivial group for x.
        let groups = vec![
            Some(Z2),
            Some(Z4),
            Some(Z2),
            None,
            Some(Z2),
            Some(Z4),
            Some(Z2),
        ];
        let mults = vec![Some(2), None, None, None, Some(2), None];
        let (solved, report) = solve_unknown_groups(&groups, &mults).unwrap();
        assert_eq!(solved.groups[3], Zero);
        assert_eq!(report.inferred.len(), 4);
    }

    #[test]
    fn underdetermined_blank_is_rejected() {
        // A blank at the boundary with zero maps around it: every class
        // fits, so nothing is solved.
        let groups = vec![None, Some(Zero), Some(Zero)];
        let mults = vec![Some(0), Some(0)];
        let err = solve_unknown_groups(&groups, &mults).unwrap_err();
        assert!(err.to_string().contains("not determined"));
    }

    #[test]
    fn invalid_multiplier_is_rejected() {
        // Z/4 cannot map onto Z by a nonzero multiplier.
        assert!(CyclicMap::new(Z4, Z, 1).is_err());
        // Z/4 -> Z/2 by 1 is fine (reduction), Z/2 -> Z/4 by 1 is not.
        assert!(CyclicMap::new(Z4, Z2, 1).is_ok());
        assert!(CyclicMap::new(Z2, Z4, 1).is_err());
        assert!(CyclicMap::new(Z2, Z4, 2).is_ok());
    }
}
