//! The built-in corpus of named groups, plus the catalog file format
//! (`name := spec [expect true|false]`, one entry per line, `#` comments).

use thiserror::Error;

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub spec_text: String,
    /// Expected verdict, with a short note saying why.
    pub expected: Option<bool>,
    pub note: String,
}

/// A corpus pair for the automorphism-action variant: the same group analyzed
/// with extra automorphisms adjoined.
#[derive(Debug, Clone)]
pub struct GCatalogEntry {
    pub name: String,
    pub spec_text: String,
    pub autos_text: String,
    pub expected_plain: bool,
    pub expected_g: bool,
    pub note: String,
}

fn entry(name: &str, spec: &str, expected: bool, note: &str) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        spec_text: spec.into(),
        expected: Some(expected),
        note: note.into(),
    }
}

pub fn build_catalog() -> Vec<CatalogEntry> {
    let mut entries = Vec::new();
    for n in (1..=12).chain([16, 27]) {
        entries.push(entry(
            &format!("cyclic{n}"),
            &format!("cyclic {n}"),
            true,
            "cyclic, so a primitive character is faithful",
        ));
    }
    entries.push(entry(
        "klein4",
        "elemabelian 2 2",
        false,
        "non-cyclic abelian: every irreducible character has nontrivial kernel",
    ));
    entries.push(entry("elem8", "elemabelian 2 3", false, "non-cyclic abelian"));
    entries.push(entry("elem9", "elemabelian 3 2", false, "non-cyclic abelian"));
    entries.push(entry(
        "z2xz4",
        "product (cyclic 2) (cyclic 4)",
        false,
        "non-cyclic abelian with non-coprime factors",
    ));
    for n in [6usize, 8, 10, 12] {
        entries.push(entry(
            &format!("dih{n}"),
            &format!("dihedral {n}"),
            true,
            "dihedral groups act faithfully in degree two",
        ));
    }
    entries.push(entry(
        "q8",
        "quaternion 8",
        true,
        "unique minimal normal subgroup (the center), generated by one central class",
    ));
    entries.push(entry("sym3", "symmetric 3", true, "standard degree-two representation"));
    entries.push(entry(
        "sym4",
        "symmetric 4",
        true,
        "the Klein four subgroup is generated by one conjugacy class",
    ));
    entries.push(entry("sym5", "symmetric 5", true, "trivial abelian minisocle"));
    entries.push(entry("sym6", "symmetric 6", true, "trivial abelian minisocle"));
    entries.push(entry(
        "alt4",
        "alternating 4",
        true,
        "unique foot of order four, generated by the class of a double transposition",
    ));
    entries.push(entry("alt5", "alternating 5", true, "simple"));
    entries.push(entry("alt6", "alternating 6", true, "simple"));
    entries.push(entry(
        "z3alt5",
        "product (cyclic 3) (alternating 5)",
        true,
        "central cyclic factor of order coprime to the simple factor",
    ));
    entries.push(entry(
        "alt5sq",
        "product (alternating 5) (alternating 5)",
        true,
        "two nonabelian feet, trivial abelian minisocle",
    ));
    entries.push(entry(
        "affsym3",
        "semidirect 2 2 (symmetric 3) [0 1; 1 0], [0 1; 1 1]",
        true,
        "the translation plane is the socle and is generated by one class",
    ));
    entries
}

pub fn build_g_catalog() -> Vec<GCatalogEntry> {
    vec![
        GCatalogEntry {
            name: "klein4gl".into(),
            spec_text: "elemabelian 2 2".into(),
            autos_text: "autos:\ng0 -> g1\ng1 -> g0\n\ng0 -> g1\ng1 -> g0 g1\n".into(),
            expected_plain: false,
            expected_g: true,
            note: "the full linear action moves one nonzero vector onto every other".into(),
        },
        GCatalogEntry {
            name: "elem8sym3".into(),
            spec_text: "elemabelian 2 3".into(),
            autos_text:
                "autos:\ng0 -> g1\ng1 -> g0\ng2 -> g2\n\ng0 -> g1\ng1 -> g2\ng2 -> g0\n".into(),
            expected_plain: false,
            expected_g: true,
            note: "coordinate permutations make one basis orbit span the cube".into(),
        },
        GCatalogEntry {
            name: "alt5sqswap".into(),
            spec_text: "product (alternating 5) (alternating 5)".into(),
            autos_text: "autos:\ng0 -> g2\ng1 -> g3\ng2 -> g0\ng3 -> g1\n".into(),
            expected_plain: true,
            expected_g: true,
            note: "the swap fuses the two simple feet into one".into(),
        },
    ]
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate entry name `{name}`")]
    Duplicate { line: usize, name: String },
}

pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut entries: Vec<CatalogEntry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(cut) => &raw[..cut],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (name, rest) = line.split_once(":=").ok_or_else(|| CatalogError::Malformed {
            line: line_no,
            message: "expected `name := spec`".into(),
        })?;
        let name = name.trim();
        if name.is_empty()
            || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(CatalogError::Malformed {
                line: line_no,
                message: format!("bad entry name `{name}`"),
            });
        }
        if entries.iter().any(|e| e.name == name) {
            return Err(CatalogError::Duplicate { line: line_no, name: name.into() });
        }
        let rest = rest.trim();
        let (spec_text, expected) = if let Some(head) = rest.strip_suffix("expect true") {
            (head.trim(), Some(true))
        } else if let Some(head) = rest.strip_suffix("expect false") {
            (head.trim(), Some(false))
        } else {
            (rest, None)
        };
        if spec_text.is_empty() {
            return Err(CatalogError::Malformed {
                line: line_no,
                message: "empty group spec".into(),
            });
        }
        entries.push(CatalogEntry {
            name: name.into(),
            spec_text: spec_text.into(),
            expected,
            note: String::new(),
        });
    }
    Ok(entries)
}
