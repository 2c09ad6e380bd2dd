//! Shipped catalog: twenty infinite loop spaces, ninety-eight
//! spectral-sequence entries, the connecting-map ladder, and the homotopy
//! long-exact-sequence tables, stored as JSON files under `data/`.
//!
//! The data tree is embedded in the binary at build time; setting the
//! `OMEGA_CATALOG` environment variable to a directory path loads the same
//! file set from disk instead, so transcription fixes do not require a
//! rebuild. A manifest pins the catalog version and a SHA-256 digest for
//! every file; loading verifies the digests before anything is parsed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::homotopy::CyclicGroup;
use crate::hopfmap::HopfMapSpec;
use crate::presentation::Presentation;
use crate::specseq::{DifferentialDecl, EntrySpec, ExtensionDecl};
use crate::{Error, Result};

/// K-theory flavor of a catalog space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Theory {
    KO,
    KU,
    K1,
    KR1,
}

impl Theory {
    /// Bott period of the Omega spectrum: space indices repeat modulo this.
    pub fn period(self) -> u32 {
        match self {
            Theory::KO | Theory::KR1 => 8,
            Theory::KU | Theory::K1 => 2,
        }
    }

    /// One-letter code used in entry mnemonics.
    pub fn letter(self) -> char {
        match self {
            Theory::KO => 'O',
            Theory::KU => 'U',
            Theory::K1 => 'K',
            Theory::KR1 => 'R',
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Theory::KO => "KO",
            Theory::KU => "KU",
            Theory::K1 => "K1",
            Theory::KR1 => "KR1",
        };
        write!(f, "{name}")
    }
}

impl FromStr for Theory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "KO" => Ok(Theory::KO),
            "KU" => Ok(Theory::KU),
            "K1" => Ok(Theory::K1),
            "KR1" => Ok(Theory::KR1),
            other => Err(Error::Catalog(format!("unknown theory {other}"))),
        }
    }
}

/// Parse a space name like `KR1:6` into theory and printed index.
pub fn parse_space_name(name: &str) -> Result<(Theory, u32)> {
    let (theory, index) = name
        .split_once(':')
        .ok_or_else(|| Error::Catalog(format!("space name {name} is not THEORY:INDEX")))?;
    let theory: Theory = theory.parse()?;
    let index: u32 = index
        .parse()
        .map_err(|_| Error::Catalog(format!("space name {name} has a bad index")))?;
    Ok((theory, index))
}

/// One catalog space: theory, canonical index, component group, and the
/// homology presentation of the connected component.
#[derive(Debug, Clone)]
pub struct SpaceRef {
    pub theory: Theory,
    pub index: u32,
    pub pi0: CyclicGroup,
    pub presentation: Presentation,
}

impl SpaceRef {
    pub fn name(&self) -> String {
        format!("{}:{}", self.theory, self.index)
    }
}

/// One spectral-sequence record, with space references resolved.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    /// Everything the engine needs to run the entry.
    pub spec: EntrySpec,
    /// Space names as stored (printed indices, before periodicity).
    pub fiber: String,
    pub total: String,
    pub base: String,
    /// Cohomology-side run for this fibration: the induced map from the
    /// base's cohomology to the total space's cohomology. The resulting
    /// second page abuts the fiber's cohomology, compared at series level.
    pub em: Option<HopfMapSpec>,
    /// Alternative first maps that the engine must reject.
    pub variants: Vec<HopfMapSpec>,
}

/// One rung of the connecting ladder: restriction into the index-`i` new
/// space and the connecting map out of it.
#[derive(Debug, Clone)]
pub struct ConnectingPair {
    pub index: u32,
    /// `KO:i -> KR1:i`.
    pub rho: HopfMapSpec,
    /// `KR1:i -> KO:i+1`.
    pub delta: HopfMapSpec,
    /// Tagged as short exact: trivial kernel of rho, trivial cokernel of
    /// delta, multiplicative series identity.
    pub ses: bool,
}

/// A composable chain of maps checked for series exactness at every
/// interior space.
#[derive(Debug, Clone)]
pub struct LesSpec {
    pub spaces: Vec<String>,
    pub maps: Vec<HopfMapSpec>,
}

/// One homotopy table, flattened to a single linear sequence of cyclic
/// groups and multiplier classes. `None` entries were left blank or
/// unlabeled and must be inferred from exactness.
#[derive(Debug, Clone)]
pub struct HomotopyTable {
    pub name: String,
    pub groups: Vec<Option<CyclicGroup>>,
    pub mults: Vec<Option<u64>>,
}

/// The fully loaded, validated catalog.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub version: String,
    /// Hex SHA-256 of the manifest, which in turn pins every data file.
    pub checksum: String,
    pub spaces: Vec<SpaceRef>,
    pub entries: Vec<CatalogEntry>,
    pub connecting: Vec<ConnectingPair>,
    pub les: LesSpec,
    pub homotopy: Vec<HomotopyTable>,
}

const MANIFEST: &str = "manifest.json";
const SPACES: &str = "spaces.json";
const CONNECTING: &str = "connecting.json";
const HOMOTOPY: &str = "homotopy.json";

/// Entry files in load order with their required entry counts.
const ENTRY_FILES: &[(&str, usize)] = &[
    ("ss_oo.json", 8),
    ("ss_uu.json", 2),
    ("ss_kk.json", 2),
    ("ss_ou.json", 24),
    ("ss_uk.json", 6),
    ("ss_or.json", 24),
    ("ss_rr.json", 8),
    ("ss_rk.json", 24),
];

const EMBEDDED: &[(&str, &str)] = &[
    (MANIFEST, include_str!("../data/manifest.json")),
    (SPACES, include_str!("../data/spaces.json")),
    ("ss_oo.json", include_str!("../data/ss_oo.json")),
    ("ss_uu.json", include_str!("../data/ss_uu.json")),
    ("ss_kk.json", include_str!("../data/ss_kk.json")),
    ("ss_ou.json", include_str!("../data/ss_ou.json")),
    ("ss_uk.json", include_str!("../data/ss_uk.json")),
    ("ss_or.json", include_str!("../data/ss_or.json")),
    ("ss_rr.json", include_str!("../data/ss_rr.json")),
    ("ss_rk.json", include_str!("../data/ss_rk.json")),
    (CONNECTING, include_str!("../data/connecting.json")),
    (HOMOTOPY, include_str!("../data/homotopy.json")),
];

// Raw JSON schema. Space references inside entries use printed indices
// (they may exceed the theory's period); resolution reduces them.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    schema: u32,
    version: String,
    files: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpacesFile {
    spaces: Vec<RawSpace>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    theory: Theory,
    index: u32,
    pi0: CyclicGroup,
    presentation: Presentation,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntriesFile {
    entries: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    id: String,
    fiber: String,
    total: String,
    base: String,
    /// First map of the fibration; omitted means the zero map.
    #[serde(default)]
    map: Option<HopfMapSpec>,
    /// Component-group contribution feeding extra filtration-one classes.
    pi0: CyclicGroup,
    #[serde(default)]
    ses: bool,
    #[serde(default)]
    differentials: Vec<DifferentialDecl>,
    #[serde(default)]
    extensions: Vec<ExtensionDecl>,
    #[serde(default)]
    stated_extensions: Option<Vec<ExtensionDecl>>,
    /// Cohomology-side first map (base to total) for the dual run.
    #[serde(default)]
    em: Option<HopfMapSpec>,
    #[serde(default)]
    variants: Vec<HopfMapSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectingFile {
    pairs: Vec<RawPair>,
    les: RawLes,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    i: u32,
    rho: HopfMapSpec,
    delta: HopfMapSpec,
    #[serde(default)]
    ses: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLes {
    spaces: Vec<String>,
    maps: Vec<HopfMapSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HomotopyFile {
    tables: Vec<RawTable>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    name: String,
    rows: Vec<RawRow>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRow {
    i: u32,
    groups: Vec<Option<CyclicGroup>>,
    maps: Vec<Option<u64>>,
}

fn sha256_hex(data: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_json<T: serde::de::DeserializeOwned>(name: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|source| Error::CatalogJson {
        path: name.to_string(),
        source,
    })
}

impl Catalog {
    /// Load the catalog shipped inside the binary, or the directory named
    /// by the `OMEGA_CATALOG` environment variable when it is set.
    pub fn shipped() -> Result<Catalog> {
        match std::env::var_os("OMEGA_CATALOG") {
            Some(dir) => Catalog::load_dir(Path::new(&dir)),
            None => Catalog::build(&|name| {
                EMBEDDED
                    .iter()
                    .find(|(n, _)| *n == name)
                    .map(|(_, text)| (*text).to_string())
                    .ok_or_else(|| Error::Catalog(format!("embedded catalog lacks {name}")))
            }),
        }
    }

    /// Load the same file set from a directory on disk.
    pub fn load_dir(dir: &Path) -> Result<Catalog> {
        Catalog::build(&|name| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| Error::CatalogIo {
                path: path.display().to_string(),
                source,
            })
        })
    }

    fn build(fetch: &dyn Fn(&str) -> Result<String>) -> Result<Catalog> {
        let manifest_text = fetch(MANIFEST)?;
        let manifest: Manifest = parse_json(MANIFEST, &manifest_text)?;
        if manifest.schema != 1 {
            return Err(Error::Catalog(format!(
                "unsupported catalog schema version {}",
                manifest.schema
            )));
        }

        let mut contents = BTreeMap::new();
        for (name, expected) in &manifest.files {
            let text = fetch(name)?;
            let actual = sha256_hex(&text);
            if actual != *expected {
                return Err(Error::Catalog(format!(
                    "checksum mismatch for {name}: manifest says {expected}, file hashes to {actual}"
                )));
            }
            contents.insert(name.clone(), text);
        }

        let known: BTreeSet<&str> = [SPACES, CONNECTING, HOMOTOPY]
            .into_iter()
            .chain(ENTRY_FILES.iter().map(|(n, _)| *n))
            .collect();
        for name in contents.keys() {
            if !known.contains(name.as_str()) {
                return Err(Error::Catalog(format!("manifest lists unknown file {name}")));
            }
        }

        let mut catalog = Catalog {
            version: manifest.version,
            checksum: sha256_hex(&manifest_text),
            spaces: Vec::new(),
            entries: Vec::new(),
            connecting: Vec::new(),
            les: LesSpec {
                spaces: Vec::new(),
                maps: Vec::new(),
            },
            homotopy: Vec::new(),
        };

        if let Some(text) = contents.get(SPACES) {
            let file: SpacesFile = parse_json(SPACES, text)?;
            for raw in file.spaces {
                if raw.index >= raw.theory.period() {
                    return Err(Error::Catalog(format!(
                        "space {}:{} stored with non-canonical index (period {})",
                        raw.theory,
                        raw.index,
                        raw.theory.period()
                    )));
                }
                raw.presentation.validate(false)?;
                if catalog
                    .spaces
                    .iter()
                    .any(|s| s.theory == raw.theory && s.index == raw.index)
                {
                    return Err(Error::Catalog(format!(
                        "duplicate space {}:{}",
                        raw.theory, raw.index
                    )));
                }
                catalog.spaces.push(SpaceRef {
                    theory: raw.theory,
                    index: raw.index,
                    pi0: raw.pi0,
                    presentation: raw.presentation,
                });
            }
        }

        let mut per_file_counts = Vec::new();
        for (name, _) in ENTRY_FILES {
            let Some(text) = contents.get(*name) else {
                per_file_counts.push(0usize);
                continue;
            };
            let file: EntriesFile = parse_json(name, text)?;
            per_file_counts.push(file.entries.len());
            for raw in file.entries {
                let entry = catalog.resolve_entry(raw)?;
                catalog.entries.push(entry);
            }
        }

        if let Some(text) = contents.get(CONNECTING) {
            let file: ConnectingFile = parse_json(CONNECTING, text)?;
            for raw in file.pairs {
                let ko = catalog.presentation_of(&format!("KO:{}", raw.i))?;
                let kr = catalog.presentation_of(&format!("KR1:{}", raw.i))?;
                let ko_next = catalog.presentation_of(&format!("KO:{}", raw.i + 1))?;
                let mut rho = raw.rho;
                rho.domain = ko.clone();
                rho.codomain = kr.clone();
                validate_map(&rho, &format!("rho {}", raw.i))?;
                let mut delta = raw.delta;
                delta.domain = kr;
                delta.codomain = ko_next;
                validate_map(&delta, &format!("delta {}", raw.i))?;
                catalog.connecting.push(ConnectingPair {
                    index: raw.i,
                    rho,
                    delta,
                    ses: raw.ses,
                });
            }
            if file.les.maps.len() + 1 != file.les.spaces.len() {
                return Err(Error::Catalog(format!(
                    "exact-sequence chain has {} spaces but {} maps",
                    file.les.spaces.len(),
                    file.les.maps.len()
                )));
            }
            let mut maps = Vec::new();
            for (j, raw_map) in file.les.maps.into_iter().enumerate() {
                let mut m = raw_map;
                m.domain = catalog.presentation_of(&file.les.spaces[j])?;
                m.codomain = catalog.presentation_of(&file.les.spaces[j + 1])?;
                validate_map(&m, &format!("chain map {j}"))?;
                maps.push(m);
            }
            catalog.les = LesSpec {
                spaces: file.les.spaces,
                maps,
            };
        }

        if let Some(text) = contents.get(HOMOTOPY) {
            let file: HomotopyFile = parse_json(HOMOTOPY, text)?;
            for table in file.tables {
                catalog.homotopy.push(flatten_table(table)?);
            }
        }

        // Completeness of the shipped data set.
        for name in known {
            if !contents.contains_key(name) {
                return Err(Error::Catalog(format!("manifest does not list {name}")));
            }
        }
        if catalog.spaces.len() != 20 {
            return Err(Error::Catalog(format!(
                "catalog must have 20 spaces, found {}",
                catalog.spaces.len()
            )));
        }
        for ((name, expected), actual) in ENTRY_FILES.iter().zip(&per_file_counts) {
            if expected != actual {
                return Err(Error::Catalog(format!(
                    "{name} must hold {expected} entries, found {actual}"
                )));
            }
        }
        if catalog.entries.len() != 98 {
            return Err(Error::Catalog(format!(
                "catalog must have 98 entries, found {}",
                catalog.entries.len()
            )));
        }
        let mut ids = BTreeSet::new();
        for e in &catalog.entries {
            if !ids.insert(e.spec.id.clone()) {
                return Err(Error::Catalog(format!("duplicate entry id {}", e.spec.id)));
            }
        }
        if catalog.connecting.len() != 8
            || catalog
                .connecting
                .iter()
                .enumerate()
                .any(|(i, p)| p.index != i as u32)
        {
            return Err(Error::Catalog(
                "connecting ladder must have rungs 0 through 7 in order".into(),
            ));
        }
        if catalog.homotopy.len() != 4 {
            return Err(Error::Catalog(format!(
                "catalog must have 4 homotopy tables, found {}",
                catalog.homotopy.len()
            )));
        }

        Ok(catalog)
    }

    /// The space at a theory and index, reduced by the theory's period.
    pub fn lookup_space(&self, theory: Theory, index: u32) -> Result<&SpaceRef> {
        let canonical = index % theory.period();
        self.spaces
            .iter()
            .find(|s| s.theory == theory && s.index == canonical)
            .ok_or_else(|| Error::NotFound(format!("space {theory}:{canonical}")))
    }

    /// The space named like `KR1:6`, with periodic index reduction.
    pub fn space(&self, name: &str) -> Result<&SpaceRef> {
        let (theory, index) = parse_space_name(name)?;
        self.lookup_space(theory, index)
    }

    /// The entry with the given mnemonic id.
    pub fn lookup_entry(&self, id: &str) -> Result<&CatalogEntry> {
        self.entries
            .iter()
            .find(|e| e.spec.id == id)
            .ok_or_else(|| Error::NotFound(format!("entry {id}")))
    }

    /// How many entries touch the KR1 spaces: first coordinate counts the
    /// evaluated maps (fiber or total space), second counts the spectral
    /// sequences (fiber, total, or base).
    pub fn kr_involvement(&self) -> (usize, usize) {
        let is_kr = |name: &str| {
            name != "*"
                && parse_space_name(name)
                    .map(|(t, _)| t == Theory::KR1)
                    .unwrap_or(false)
        };
        let maps = self
            .entries
            .iter()
            .filter(|e| is_kr(&e.fiber) || is_kr(&e.total))
            .count();
        let sss = self
            .entries
            .iter()
            .filter(|e| is_kr(&e.fiber) || is_kr(&e.total) || is_kr(&e.base))
            .count();
        (maps, sss)
    }

    /// Presentation of the named space; `*` is the contractible path space.
    pub fn presentation_of(&self, name: &str) -> Result<Presentation> {
        if name == "*" {
            Ok(Presentation::trivial())
        } else {
            Ok(self.space(name)?.presentation.clone())
        }
    }

    fn resolve_entry(&self, raw: RawEntry) -> Result<CatalogEntry> {
        check_id_shape(&raw)?;
        let fiber = self.presentation_of(&raw.fiber)?;
        let total = self.presentation_of(&raw.total)?;
        let base = self.presentation_of(&raw.base)?;

        let mut map = match raw.map {
            Some(m) => m,
            None => HopfMapSpec::zero(Presentation::trivial(), Presentation::trivial()),
        };
        map.domain = fiber.clone();
        map.codomain = total.clone();
        validate_map(&map, &raw.id)?;

        for d in &raw.differentials {
            validate_differential(d, &raw.id)?;
        }
        for x in &raw.extensions {
            validate_extension(x, &raw.id)?;
        }
        if let Some(stated) = &raw.stated_extensions {
            for x in stated {
                validate_extension(x, &raw.id)?;
            }
        }

        let em = match raw.em {
            Some(mut m) => {
                m.domain = base.clone();
                m.codomain = total.clone();
                validate_map(&m, &format!("{} cohomology side", raw.id))?;
                Some(m)
            }
            None => None,
        };

        let mut variants = Vec::new();
        for (v, mut m) in raw.variants.into_iter().enumerate() {
            m.domain = fiber.clone();
            m.codomain = total.clone();
            validate_map(&m, &format!("{} variant {}", raw.id, v + 1))?;
            variants.push(m);
        }

        Ok(CatalogEntry {
            spec: EntrySpec {
                id: raw.id,
                map,
                base,
                pi0: raw.pi0,
                ses: raw.ses,
                differentials: raw.differentials,
                extensions: raw.extensions,
                stated_extensions: raw.stated_extensions,
            },
            fiber: raw.fiber,
            total: raw.total,
            base: raw.base,
            em,
            variants,
        })
    }
}

/// Entry mnemonics encode the fibration: theory letters then printed space
/// indices, with two-letter ids for loop-path entries over a point. One
/// historical mnemonic is irregular (its last letter does not match its
/// base space) and is kept verbatim so lookups by the published name work.
fn check_id_shape(raw: &RawEntry) -> Result<()> {
    let id = &raw.id;
    if id == "UOU576" && raw.fiber == "KU:5" && raw.total == "KO:7" && raw.base == "KO:6" {
        return Ok(());
    }
    let chars: Vec<char> = id.chars().collect();
    let bad = || Error::Catalog(format!("entry id {id} does not match its spaces"));
    let expect = |name: &str, letter: char, digit: char| -> Result<()> {
        let theory: Theory = match letter {
            'O' => Theory::KO,
            'U' => Theory::KU,
            'K' => Theory::K1,
            'R' => Theory::KR1,
            _ => return Err(bad()),
        };
        let want = format!("{}:{}", theory, digit);
        if name == want {
            Ok(())
        } else {
            Err(bad())
        }
    };
    match chars.len() {
        4 => {
            if raw.total != "*" {
                return Err(bad());
            }
            expect(&raw.fiber, chars[0], chars[2])?;
            expect(&raw.base, chars[1], chars[3])
        }
        6 => {
            expect(&raw.fiber, chars[0], chars[3])?;
            expect(&raw.total, chars[1], chars[4])?;
            expect(&raw.base, chars[2], chars[5])
        }
        _ => Err(Error::Catalog(format!("entry id {id} has a bad shape"))),
    }
}

/// Assignments must name real families and respect degrees: a generator of
/// degree `d` can only map to a `pow`-th power of a generator of degree
/// `d / pow`.
fn validate_map(m: &HopfMapSpec, context: &str) -> Result<()> {
    let mut covered: BTreeMap<String, crate::pattern::DegreeSet> = BTreeMap::new();
    for a in &m.assignments {
        let src = m
            .domain
            .family(&a.from)
            .map_err(|_| Error::Catalog(format!("{context}: unknown source family {}", a.from)))?;
        let cover = match &a.members {
            Some(p) => {
                p.validate()?;
                let s = p.to_set();
                if !s.is_subset_of(&src.pattern.to_set()) {
                    return Err(Error::Catalog(format!(
                        "{context}: members {p} are not inside family {}",
                        a.from
                    )));
                }
                s
            }
            None => src.pattern.to_set(),
        };
        let seen = covered.entry(a.from.clone()).or_default();
        if !cover.is_disjoint_from(seen) {
            return Err(Error::Catalog(format!(
                "{context}: family {} has overlapping assignments",
                a.from
            )));
        }
        *seen = seen.union(&cover);
        for t in &a.to {
            let tgt = m.codomain.family(&t.family).map_err(|_| {
                Error::Catalog(format!("{context}: unknown target family {}", t.family))
            })?;
            if ![1, 2, 4].contains(&t.pow) {
                return Err(Error::Catalog(format!(
                    "{context}: image power {} is not 1, 2, or 4",
                    t.pow
                )));
            }
            if !cover.is_subset_of(&tgt.pattern.to_set().scale(t.pow as u64)) {
                return Err(Error::Catalog(format!(
                    "{context}: degrees of {} do not land on powers of {}",
                    a.from, t.family
                )));
            }
        }
    }
    if let Some(fold) = &m.domain_fold {
        m.domain
            .family(&fold.family)
            .map_err(|_| Error::Catalog(format!("{context}: unknown folded family {}", fold.family)))?;
        m.domain.family(&fold.term.family).map_err(|_| {
            Error::Catalog(format!(
                "{context}: unknown fold term family {}",
                fold.term.family
            ))
        })?;
        if let Some(s) = &fold.suppresses {
            m.domain
                .family(s)
                .map_err(|_| Error::Catalog(format!("{context}: unknown suppressed family {s}")))?;
        }
    }
    Ok(())
}

/// Differentials must obey the page and degree laws before the engine ever
/// sees them: acting filtration minus target filtration equals the page,
/// and target degrees are source degrees scaled by the level, less one.
fn validate_differential(d: &DifferentialDecl, context: &str) -> Result<()> {
    d.source.members.validate()?;
    d.target.members.validate()?;
    if !d.source.level.is_power_of_two() {
        return Err(Error::Catalog(format!(
            "{context}: differential level {} is not a power of two",
            d.source.level
        )));
    }
    let acting = d.source.filtration * d.source.level;
    if acting < 2 {
        return Err(Error::Catalog(format!(
            "{context}: differential acts from filtration {acting}, below two"
        )));
    }
    if d.target.filtration > 1 {
        return Err(Error::Catalog(format!(
            "{context}: differential target filtration {} is above one",
            d.target.filtration
        )));
    }
    if acting - d.target.filtration != d.page {
        return Err(Error::Catalog(format!(
            "{context}: page {} does not equal acting filtration {acting} minus target filtration {}",
            d.page, d.target.filtration
        )));
    }
    let expected = d
        .source
        .members
        .to_set()
        .scale(d.source.level as u64)
        .shift_down(1)?;
    if expected != d.target.members.to_set() {
        return Err(Error::Catalog(format!(
            "{context}: target degrees {} are not the level-{} scaling of {} less one",
            d.target.members, d.source.level, d.source.members
        )));
    }
    if !d.target.members.to_set().all_odd() {
        return Err(Error::Catalog(format!(
            "{context}: differential targets {} must be odd",
            d.target.members
        )));
    }
    Ok(())
}

fn validate_extension(x: &ExtensionDecl, context: &str) -> Result<()> {
    let check = |p: &crate::pattern::DegreePattern| -> Result<()> {
        p.validate()
            .map_err(|e| Error::Catalog(format!("{context}: {e}")))
    };
    match x {
        ExtensionDecl::SelfDoubling { members }
        | ExtensionDecl::GammaPolynomial { members }
        | ExtensionDecl::GammaClose { members } => check(members),
        ExtensionDecl::AbsorbP { members, target } | ExtensionDecl::AbsorbE { members, target } => {
            check(members)?;
            check(target)
        }
        ExtensionDecl::GammaSplit { members, level } => {
            check(members)?;
            if *level < 2 || !level.is_power_of_two() {
                return Err(Error::Catalog(format!(
                    "{context}: split level {level} is not a power of two at least two"
                )));
            }
            Ok(())
        }
    }
}

fn flatten_table(table: RawTable) -> Result<HomotopyTable> {
    if table.rows.is_empty() {
        return Err(Error::Catalog(format!("homotopy table {} is empty", table.name)));
    }
    let mut groups = Vec::new();
    let mut mults = Vec::new();
    let last = table.rows.len() - 1;
    for (r, row) in table.rows.iter().enumerate() {
        if row.groups.len() != 3 {
            return Err(Error::Catalog(format!(
                "homotopy table {} row {} must list 3 groups",
                table.name, row.i
            )));
        }
        let want_maps = if r == last { 2 } else { 3 };
        if row.maps.len() != want_maps {
            return Err(Error::Catalog(format!(
                "homotopy table {} row {} must list {} maps",
                table.name, row.i, want_maps
            )));
        }
        if r + 1 < table.rows.len() && table.rows[r + 1].i + 1 != row.i {
            return Err(Error::Catalog(format!(
                "homotopy table {} rows must step down by one below row {}",
                table.name, row.i
            )));
        }
        groups.extend(row.groups.iter().copied());
        mults.extend(row.maps.iter().copied());
    }
    Ok(HomotopyTable {
        name: table.name,
        groups,
        mults,
    })
}
