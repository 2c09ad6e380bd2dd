//! Degree patterns: the index sets of generator families.
//!
//! A pattern is either a single positive degree or an arithmetic progression
//! `{start, start + step, start + 2·step, …}`. Progressions whose start does
//! not exceed their step are full residue classes (every positive degree
//! congruent to `start` modulo `step`); mid-computation shifts can produce
//! progressions that omit low members, so the general form is kept.
//!
//! Set arithmetic on unions of patterns (difference, intersection, exact
//! coalescing) goes through [`DegreeSet`], an eventually periodic subset of
//! the positive integers with a canonical normal form, so every operation is
//! exact rather than truncated at a working degree.

use std::collections::BTreeSet;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Index set of one generator family: a single degree or an arithmetic
/// progression of degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DegreePattern {
    /// Exactly one generator, at this degree.
    Single(u64),
    /// Generators at `start`, `start + step`, `start + 2·step`, …
    Progression { start: u64, step: u64 },
}

impl DegreePattern {
    /// Full residue class `{d > 0 : d ≡ res (mod modulus)}` with
    /// `1 ≤ res ≤ modulus`.
    pub fn residue_class(modulus: u64, res: u64) -> Result<Self> {
        if modulus == 0 || res == 0 || res > modulus {
            return Err(Error::Pattern(format!(
                "residue class needs 1 <= res <= mod, got {res} mod {modulus}"
            )));
        }
        Ok(DegreePattern::Progression {
            start: res,
            step: modulus,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DegreePattern::Single(d) if d >= 1 => Ok(()),
            DegreePattern::Progression { start, step } if start >= 1 && step >= 1 => Ok(()),
            _ => Err(Error::Pattern(format!("degrees must be positive: {self}"))),
        }
    }

    pub fn min_degree(&self) -> u64 {
        match *self {
            DegreePattern::Single(d) => d,
            DegreePattern::Progression { start, .. } => start,
        }
    }

    pub fn contains(&self, d: u64) -> bool {
        match *self {
            DegreePattern::Single(s) => d == s,
            DegreePattern::Progression { start, step } => {
                d >= start && (d - start) % step == 0
            }
        }
    }

    /// Members of the pattern that do not exceed `n`, in increasing order.
    pub fn members_up_to(&self, n: u64) -> Vec<u64> {
        match *self {
            DegreePattern::Single(d) => {
                if d <= n {
                    vec![d]
                } else {
                    vec![]
                }
            }
            DegreePattern::Progression { start, step } => {
                let mut out = Vec::new();
                let mut d = start;
                while d <= n {
                    out.push(d);
                    d += step;
                }
                out
            }
        }
    }

    /// Every member degree multiplied by `k`.
    pub fn scale(&self, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Pattern("scale factor must be positive".into()));
        }
        Ok(match *self {
            DegreePattern::Single(d) => DegreePattern::Single(d * k),
            DegreePattern::Progression { start, step } => DegreePattern::Progression {
                start: start * k,
                step: step * k,
            },
        })
    }

    /// Every member degree halved; fails unless all members are even.
    pub fn half(&self) -> Result<Self> {
        match *self {
            DegreePattern::Single(d) if d % 2 == 0 => Ok(DegreePattern::Single(d / 2)),
            DegreePattern::Progression { start, step } if start % 2 == 0 && step % 2 == 0 => {
                Ok(DegreePattern::Progression {
                    start: start / 2,
                    step: step / 2,
                })
            }
            _ => Err(Error::Pattern(format!("cannot halve odd degrees in {self}"))),
        }
    }

    /// Every member degree increased by `k`.
    pub fn shift_up(&self, k: u64) -> Self {
        match *self {
            DegreePattern::Single(d) => DegreePattern::Single(d + k),
            DegreePattern::Progression { start, step } => DegreePattern::Progression {
                start: start + k,
                step,
            },
        }
    }

    /// Every member degree decreased by `k`; fails if this leaves the
    /// positive integers.
    pub fn shift_down(&self, k: u64) -> Result<Self> {
        let lowered = |d: u64| -> Result<u64> {
            d.checked_sub(k)
                .filter(|&x| x >= 1)
                .ok_or_else(|| Error::Pattern(format!("shift below degree 1 in {self}")))
        };
        Ok(match *self {
            DegreePattern::Single(d) => DegreePattern::Single(lowered(d)?),
            DegreePattern::Progression { start, step } => DegreePattern::Progression {
                start: lowered(start)?,
                step,
            },
        })
    }

    /// True if the progression is a full residue class (contains every
    /// positive degree in its congruence class).
    pub fn is_residue_class(&self) -> bool {
        match *self {
            DegreePattern::Single(_) => false,
            DegreePattern::Progression { start, step } => start <= step,
        }
    }

    pub fn to_set(&self) -> DegreeSet {
        match *self {
            DegreePattern::Single(d) => DegreeSet::from_members([d]),
            DegreePattern::Progression { start, step } => DegreeSet::progression(start, step),
        }
    }
}

impl fmt::Display for DegreePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DegreePattern::Single(d) => write!(f, "{{{d}}}"),
            DegreePattern::Progression { start, step } => {
                write!(f, "{{{start}, {}, {}, ...}}", start + step, start + 2 * step)
            }
        }
    }
}

/// JSON forms: `{"deg": d}` for a single degree, `{"mod": a, "res": b}` for
/// a full residue class, `{"start": s, "step": k}` for a progression that
/// omits low members of its class.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PatternJson {
    Single { deg: u64 },
    Residue {
        #[serde(rename = "mod")]
        modulus: u64,
        res: u64,
    },
    Progression { start: u64, step: u64 },
}

impl Serialize for DegreePattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let j = match *self {
            DegreePattern::Single(d) => PatternJson::Single { deg: d },
            DegreePattern::Progression { start, step } if start <= step => PatternJson::Residue {
                modulus: step,
                res: start,
            },
            DegreePattern::Progression { start, step } => {
                PatternJson::Progression { start, step }
            }
        };
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DegreePattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = match PatternJson::deserialize(d)? {
            PatternJson::Single { deg } => DegreePattern::Single(deg),
            PatternJson::Residue { modulus, res } => {
                DegreePattern::residue_class(modulus, res).map_err(D::Error::custom)?
            }
            PatternJson::Progression { start, step } => {
                DegreePattern::Progression { start, step }
            }
        };
        p.validate().map_err(D::Error::custom)?;
        Ok(p)
    }
}

/// An eventually periodic set of positive integers in canonical form:
/// explicit members below `split`, and for `d ≥ split` membership decided by
/// `d mod period`. Normalization makes the period minimal and the split as
/// low as possible, so structural equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSet {
    head: BTreeSet<u64>,
    split: u64,
    period: u64,
    residues: BTreeSet<u64>,
}

impl Default for DegreeSet {
    fn default() -> Self {
        DegreeSet::empty()
    }
}

impl DegreeSet {
    pub fn empty() -> Self {
        DegreeSet {
            head: BTreeSet::new(),
            split: 1,
            period: 1,
            residues: BTreeSet::new(),
        }
    }

    pub fn from_members<I: IntoIterator<Item = u64>>(members: I) -> Self {
        let head: BTreeSet<u64> = members.into_iter().collect();
        assert!(!head.contains(&0), "degree sets hold positive integers");
        let split = head.last().map_or(1, |m| m + 1);
        let mut s = DegreeSet {
            head,
            split,
            period: 1,
            residues: BTreeSet::new(),
        };
        s.normalize();
        s
    }

    pub fn progression(start: u64, step: u64) -> Self {
        assert!(start >= 1 && step >= 1);
        let mut s = DegreeSet {
            head: BTreeSet::new(),
            split: start,
            period: step,
            residues: [start % step].into_iter().collect(),
        };
        s.normalize();
        s
    }

    pub fn from_patterns<'a, I: IntoIterator<Item = &'a DegreePattern>>(pats: I) -> Self {
        let mut acc = DegreeSet::empty();
        for p in pats {
            acc = acc.union(&p.to_set());
        }
        acc
    }

    pub fn is_empty(&self) -> bool {
        self.head.is_empty() && self.residues.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn contains(&self, d: u64) -> bool {
        if d < self.split {
            self.head.contains(&d)
        } else {
            self.residues.contains(&(d % self.period))
        }
    }

    pub fn min(&self) -> Option<u64> {
        let from_head = self.head.first().copied();
        let from_tail = self
            .residues
            .iter()
            .map(|&r| {
                let mut d = self.split + (r + self.period - self.split % self.period) % self.period;
                if d < self.split {
                    d += self.period;
                }
                d
            })
            .min();
        match (from_head, from_tail) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn members_up_to(&self, n: u64) -> Vec<u64> {
        (1..=n).filter(|&d| self.contains(d)).collect()
    }

    fn normalize(&mut self) {
        // Minimal period: smallest divisor p of period with the residue set
        // invariant under adding p.
        if !self.residues.is_empty() {
            for p in 1..=self.period {
                if self.period % p != 0 {
                    continue;
                }
                let closed = self
                    .residues
                    .iter()
                    .all(|&r| self.residues.contains(&((r + p) % self.period)));
                if closed {
                    self.residues = self.residues.iter().map(|&r| r % p).collect();
                    self.period = p;
                    break;
                }
            }
        } else {
            self.period = 1;
        }
        // Align split upward past any head member at or above it (head holds
        // members strictly below split).
        if let Some(&m) = self.head.last() {
            if m >= self.split {
                self.split = m + 1;
            }
        }
        // Lower split while the boundary degree's head membership agrees
        // with what the periodic tail would say.
        while self.split > 1 {
            let d = self.split - 1;
            let in_head = self.head.contains(&d);
            let in_tail = self.residues.contains(&(d % self.period));
            if in_head == in_tail {
                self.head.remove(&d);
                self.split = d;
            } else {
                break;
            }
        }
        if self.residues.is_empty() {
            self.period = 1;
        }
    }

    fn lcm(a: u64, b: u64) -> u64 {
        fn gcd(mut a: u64, mut b: u64) -> u64 {
            while b != 0 {
                let t = a % b;
                a = b;
                b = t;
            }
            a
        }
        a / gcd(a, b) * b
    }

    /// Merge two sets into common (split, period) coordinates and combine
    /// membership with `f`.
    fn zip_with(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        let period = Self::lcm(self.period, other.period);
        let split = self.split.max(other.split);
        let mut head = BTreeSet::new();
        for d in 1..split {
            if f(self.contains(d), other.contains(d)) {
                head.insert(d);
            }
        }
        let mut residues = BTreeSet::new();
        for r in 0..period {
            // A representative degree >= split with this residue.
            let mut d = split + (r + period - split % period) % period;
            if d < split {
                d += period;
            }
            if f(self.contains(d), other.contains(d)) {
                residues.insert(r);
            }
        }
        let mut s = DegreeSet {
            head,
            split,
            period,
            residues,
        };
        s.normalize();
        s
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.minus(other).is_empty()
    }

    pub fn is_disjoint_from(&self, other: &Self) -> bool {
        self.intersect(other).is_empty()
    }

    /// Intersection with the even degrees.
    pub fn even_part(&self) -> Self {
        self.intersect(&DegreeSet::progression(2, 2))
    }

    /// Intersection with the odd degrees.
    pub fn odd_part(&self) -> Self {
        self.intersect(&DegreeSet::progression(1, 2))
    }

    pub fn all_even(&self) -> bool {
        self.odd_part().is_empty()
    }

    pub fn all_odd(&self) -> bool {
        self.even_part().is_empty()
    }

    pub fn scale(&self, k: u64) -> Self {
        assert!(k >= 1);
        let head = self.head.iter().map(|&d| d * k).collect();
        let mut s = DegreeSet {
            head,
            split: self.split * k,
            period: self.period * k,
            residues: self.residues.iter().map(|&r| (r * k) % (self.period * k)).collect(),
        };
        s.normalize();
        s
    }

    /// Halve every member; fails if any member is odd.
    pub fn half(&self) -> Result<Self> {
        if !self.all_even() {
            return Err(Error::Pattern("cannot halve a set with odd members".into()));
        }
        let head: BTreeSet<u64> = self.head.iter().map(|&d| d / 2).collect();
        let (period, residues) = if self.period % 2 == 0 {
            (
                self.period / 2,
                self.residues
                    .iter()
                    .filter(|&&r| r % 2 == 0)
                    .map(|&r| (r / 2) % (self.period / 2))
                    .collect::<BTreeSet<u64>>(),
            )
        } else {
            // Odd period with only even members >= split: consecutive
            // residues r and r+period differ in parity, so each residue
            // class contributes members of both parities unless empty.
            if !self.residues.is_empty() {
                return Err(Error::Pattern(
                    "odd-period set cannot consist of even members".into(),
                ));
            }
            (1, BTreeSet::new())
        };
        let mut s = DegreeSet {
            head,
            split: self.split.div_ceil(2),
            period: period.max(1),
            residues,
        };
        s.normalize();
        Ok(s)
    }

    pub fn shift_up(&self, k: u64) -> Self {
        let head = self.head.iter().map(|&d| d + k).collect();
        let mut s = DegreeSet {
            head,
            split: self.split + k,
            period: self.period,
            residues: self.residues.iter().map(|&r| (r + k) % self.period).collect(),
        };
        s.normalize();
        s
    }

    pub fn shift_down(&self, k: u64) -> Result<Self> {
        if let Some(m) = self.min() {
            if m <= k {
                return Err(Error::Pattern(format!(
                    "shift below degree 1 (minimum member {m}, shift {k})"
                )));
            }
        }
        let head = self.head.iter().map(|&d| d - k).collect();
        let mut s = DegreeSet {
            head,
            split: self.split.saturating_sub(k).max(1),
            period: self.period,
            residues: self
                .residues
                .iter()
                .map(|&r| (r + self.period - k % self.period) % self.period)
                .collect(),
        };
        s.normalize();
        Ok(s)
    }

    /// Express the set as a minimal list of patterns: one progression per
    /// residue class of the periodic tail (extended downward through the
    /// head where the spacing matches), plus single degrees for leftovers.
    pub fn extract_patterns(&self) -> Vec<DegreePattern> {
        let mut out = Vec::new();
        let mut head = self.head.clone();
        for &r in &self.residues {
            let mut start = self.split + (r + self.period - self.split % self.period) % self.period;
            if start < self.split {
                start += self.period;
            }
            while start > self.period && head.contains(&(start - self.period)) {
                start -= self.period;
                head.remove(&start);
            }
            out.push(DegreePattern::Progression {
                start,
                step: self.period,
            });
        }
        for d in head {
            out.push(DegreePattern::Single(d));
        }
        out.sort();
        out
    }
}

impl fmt::Display for DegreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pats = self.extract_patterns();
        if pats.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = pats.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(" u "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rc(m: u64, r: u64) -> DegreePattern {
        DegreePattern::residue_class(m, r).unwrap()
    }

    #[test]
    fn residue_class_members() {
        let p = rc(4, 2);
        assert_eq!(p.members_up_to(14), vec![2, 6, 10, 14]);
        assert!(p.contains(2) && p.contains(10) && !p.contains(4));
    }

    #[test]
    fn shifted_progression_is_not_a_residue_class() {
        let p = rc(4, 4).shift_up(1);
        assert_eq!(p, DegreePattern::Progression { start: 5, step: 4 });
        assert!(!p.is_residue_class());
        assert_eq!(p.members_up_to(13), vec![5, 9, 13]);
    }

    #[test]
    fn set_roundtrip_and_equality() {
        let a = DegreeSet::progression(1, 2).union(&DegreeSet::progression(2, 2));
        let b = DegreeSet::progression(1, 1);
        assert_eq!(a, b);
        assert_eq!(a.extract_patterns(), vec![rc(1, 1)]);
    }

    #[test]
    fn difference_with_prefix_absorption() {
        // odd degrees minus {3, 7, 11, ...} = {1, 5, 9, ...}
        let odds = DegreeSet::progression(1, 2);
        let gone = DegreeSet::progression(3, 4);
        let left = odds.minus(&gone);
        assert_eq!(left.extract_patterns(), vec![rc(4, 1)]);
    }

    #[test]
    fn difference_leaving_singles() {
        // {2,4,6,...} minus {6,12,18,...} keeps 2 and 4 ahead of the tail
        let evens = DegreeSet::progression(2, 2);
        let gone = DegreeSet::progression(6, 6);
        let left = evens.minus(&gone);
        let pats = left.extract_patterns();
        assert_eq!(
            pats,
            vec![rc(6, 2), rc(6, 4)],
            "evens minus multiples of 6 splits into 2 mod 6 and 4 mod 6"
        );
    }

    #[test]
    fn single_absorbed_into_tail() {
        let s = DegreeSet::from_members([1]).union(&DegreeSet::progression(5, 4));
        assert_eq!(s.extract_patterns(), vec![rc(4, 1)]);
    }

    #[test]
    fn scale_and_half() {
        let s = DegreeSet::progression(1, 2).scale(2);
        assert_eq!(s.extract_patterns(), vec![rc(4, 2)]);
        let h = s.half().unwrap();
        assert_eq!(h.extract_patterns(), vec![rc(2, 1)]);
        assert!(DegreeSet::progression(1, 2).half().is_err());
    }

    #[test]
    fn shift_down_tracks_residues() {
        let s = DegreeSet::progression(4, 4).shift_down(1).unwrap();
        assert_eq!(s.extract_patterns(), vec![DegreePattern::Progression { start: 3, step: 4 }]);
        assert!(DegreeSet::progression(1, 2).shift_down(1).is_err());
    }

    #[test]
    fn pattern_json_forms() {
        let class: DegreePattern = serde_json::from_str(r#"{"mod":4,"res":2}"#).unwrap();
        assert_eq!(class, rc(4, 2));
        let single: DegreePattern = serde_json::from_str(r#"{"deg":7}"#).unwrap();
        assert_eq!(single, DegreePattern::Single(7));
        let prog: DegreePattern = serde_json::from_str(r#"{"start":5,"step":4}"#).unwrap();
        assert_eq!(prog, DegreePattern::Progression { start: 5, step: 4 });
        assert_eq!(
            serde_json::to_string(&rc(4, 2)).unwrap(),
            r#"{"mod":4,"res":2}"#
        );
        assert_eq!(
            serde_json::to_string(&prog).unwrap(),
            r#"{"start":5,"step":4}"#
        );
    }

    #[test]
    fn rejects_degree_zero() {
        assert!(serde_json::from_str::<DegreePattern>(r#"{"deg":0}"#).is_err());
        assert!(DegreePattern::residue_class(4, 0).is_err());
    }
}
