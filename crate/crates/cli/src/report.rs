//! JSON report document: a stable, versioned projection of an [`Analysis`].
//! Floats are normalized to 12 significant digits when the document is built,
//! so emitting and re-parsing a document reproduces it exactly.

use irrep_core::chartab::C64;
use irrep_core::socle::FootKind;
use irrep_core::{DualCharacter, MinisocleDecomposition, MsCharacter};
use serde::{Deserialize, Serialize};

use crate::analyze::{Analysis, RepSummary, StageTimings};

pub const SCHEMA_VERSION: u32 = 1;

/// Complex value as a `[re, im]` pair.
#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq)]
pub struct Cx(pub f64, pub f64);

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx(sig12(z.re), sig12(z.im))
    }
}

fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return 0.0;
    }
    format!("{x:.11e}").parse().unwrap()
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ReportDoc {
    pub schema: u32,
    pub group: GroupDoc,
    pub socle: SocleDoc,
    pub criterion: CriterionDoc,
    pub oracle: OracleDoc,
    pub g_variant: Option<GVariantDoc>,
    pub agreement: bool,
    pub timings: TimingsDoc,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct GroupDoc {
    pub name: Option<String>,
    pub spec: String,
    pub order: usize,
    pub class_count: usize,
    pub abelian: bool,
    pub notes: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct FootDoc {
    pub order: usize,
    pub kind: String,
    pub prime: Option<u64>,
    pub rank: Option<usize>,
    pub simple_orders: Vec<usize>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SocleDoc {
    pub feet: Vec<FootDoc>,
    pub ma_order: usize,
    pub mh_order: usize,
    pub ms_order: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct MaPartDoc {
    pub prime: u64,
    pub covector: Vec<u64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct MsCharacterDoc {
    pub degree: usize,
    pub certified: bool,
    pub factor_degrees: Vec<usize>,
    pub identity_value: Cx,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct OrbitCheckDoc {
    pub prime: u64,
    pub dim: usize,
    pub primal: bool,
    pub dual: bool,
    pub sampled: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CriterionDoc {
    pub verdict: bool,
    pub agree: bool,
    pub ma_trivial: bool,
    pub sampled: bool,
    pub ma_character: Option<Vec<MaPartDoc>>,
    pub ms_character: Option<MsCharacterDoc>,
    pub ma_class_witness: Option<u32>,
    pub ms_class_witness: Option<u32>,
    pub orbit_checks: Vec<OrbitCheckDoc>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RepDoc {
    pub degree: usize,
    pub commutant_dim: usize,
    pub unitary_defect: f64,
    pub multiplicative_defect: f64,
    pub min_pairwise_distance: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct OracleDoc {
    pub degrees: Vec<usize>,
    pub faithful_row: Option<usize>,
    pub verdict: bool,
    pub faithful_row_values: Option<Vec<Cx>>,
    pub row_orthogonality_defect: f64,
    pub column_orthogonality_defect: f64,
    pub rep: Option<RepDoc>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct GVariantDoc {
    pub auto_order: usize,
    pub verdict: bool,
    pub agree: bool,
    pub ma_g_trivial: bool,
    pub sampled: bool,
    pub oracle_row: Option<usize>,
    pub feet: Vec<FootDoc>,
    pub ma_order: usize,
    pub ms_order: usize,
    pub ma_character: Option<Vec<MaPartDoc>>,
    pub ma_g_character: Option<Vec<MaPartDoc>>,
    pub ms_character: Option<MsCharacterDoc>,
    pub ms_g_character: Option<MsCharacterDoc>,
    pub ma_g_class_witness: Option<u32>,
    pub ms_in_ms_g: bool,
    pub ms_g_in_ms: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TimingsDoc {
    pub build_ms: f64,
    pub socle_ms: f64,
    pub criterion_ms: f64,
    pub oracle_ms: f64,
    pub g_ms: Option<f64>,
    pub rep_ms: Option<f64>,
}

fn foot_docs(deco: &MinisocleDecomposition) -> Vec<FootDoc> {
    deco.feet
        .iter()
        .map(|f| match &f.kind {
            FootKind::Abelian { p, rank, .. } => FootDoc {
                order: f.carrier.order(),
                kind: "abelian".into(),
                prime: Some(*p),
                rank: Some(*rank),
                simple_orders: Vec::new(),
            },
            FootKind::Nonabelian { simple_feet } => FootDoc {
                order: f.carrier.order(),
                kind: "nonabelian".into(),
                prime: None,
                rank: None,
                simple_orders: simple_feet.iter().map(|s| s.order()).collect(),
            },
        })
        .collect()
}

fn ma_character_doc(chi: &Option<DualCharacter>) -> Option<Vec<MaPartDoc>> {
    chi.as_ref().map(|c| {
        c.parts
            .iter()
            .map(|part| MaPartDoc { prime: part.p, covector: part.covector.clone() })
            .collect()
    })
}

fn ms_character_doc(chi: &Option<MsCharacter>) -> Option<MsCharacterDoc> {
    chi.as_ref().map(|c| MsCharacterDoc {
        degree: c.degree,
        certified: c.certified,
        factor_degrees: c.factors.iter().map(|f| f.degree).collect(),
        identity_value: c.value_of(0).unwrap_or(C64::new(c.degree as f64, 0.0)).into(),
    })
}

fn rep_doc(rep: &RepSummary) -> RepDoc {
    RepDoc {
        degree: rep.degree,
        commutant_dim: rep.commutant_dim,
        unitary_defect: sig12(rep.unitary_defect),
        multiplicative_defect: sig12(rep.multiplicative_defect),
        min_pairwise_distance: sig12(rep.min_pairwise_distance),
    }
}

fn timings_doc(t: &StageTimings) -> TimingsDoc {
    TimingsDoc {
        build_ms: sig12(t.build_ms),
        socle_ms: sig12(t.socle_ms),
        criterion_ms: sig12(t.criterion_ms),
        oracle_ms: sig12(t.oracle_ms),
        g_ms: t.g_ms.map(sig12),
        rep_ms: t.rep_ms.map(sig12),
    }
}

pub fn build_document(a: &Analysis) -> ReportDoc {
    let criterion = CriterionDoc {
        verdict: a.criterion.verdict,
        agree: a.criterion.agree,
        ma_trivial: a.criterion.ma_trivial,
        sampled: a.criterion.sampled,
        ma_character: ma_character_doc(&a.criterion.ma_character),
        ms_character: ms_character_doc(&a.criterion.ms_character),
        ma_class_witness: a.criterion.ma_class_witness,
        ms_class_witness: a.criterion.ms_class_witness,
        orbit_checks: a
            .criterion
            .orbit_checks
            .iter()
            .map(|c| OrbitCheckDoc {
                prime: c.p,
                dim: c.dim,
                primal: c.primal,
                dual: c.dual,
                sampled: c.sampled,
            })
            .collect(),
    };
    let oracle = OracleDoc {
        degrees: a.table.degrees.clone(),
        faithful_row: a.oracle_row,
        verdict: a.oracle_row.is_some(),
        faithful_row_values: a
            .oracle_row
            .map(|r| a.table.table[r].iter().map(|&z| z.into()).collect()),
        row_orthogonality_defect: sig12(a.table.row_orthogonality_defect(&a.group)),
        column_orthogonality_defect: sig12(a.table.column_orthogonality_defect(&a.group)),
        rep: a.rep.as_ref().map(rep_doc),
    };
    let g_variant = a.g.as_ref().map(|g| GVariantDoc {
        auto_order: g.auto_order,
        verdict: g.verdict,
        agree: g.agree,
        ma_g_trivial: g.ma_g_trivial,
        sampled: g.sampled,
        oracle_row: g.oracle_row,
        feet: foot_docs(&g.g_deco),
        ma_order: g.g_deco.ma.order(),
        ms_order: g.g_deco.ms.order(),
        ma_character: ma_character_doc(&g.ma_character),
        ma_g_character: ma_character_doc(&g.ma_g_character),
        ms_character: ms_character_doc(&g.ms_character),
        ms_g_character: ms_character_doc(&g.ms_g_character),
        ma_g_class_witness: g.ma_g_class_witness,
        ms_in_ms_g: g.ms_in_ms_g,
        ms_g_in_ms: g.ms_g_in_ms,
    });
    ReportDoc {
        schema: SCHEMA_VERSION,
        group: GroupDoc {
            name: a.name.clone(),
            spec: a.spec_text.clone(),
            order: a.group.order(),
            class_count: a.table.num_classes(),
            abelian: a.group.is_abelian(),
            notes: a.notes.clone(),
        },
        socle: SocleDoc {
            feet: foot_docs(&a.deco),
            ma_order: a.deco.ma.order(),
            mh_order: a.deco.mh.order(),
            ms_order: a.deco.ms.order(),
        },
        criterion,
        oracle,
        g_variant,
        agreement: a.agreement,
        timings: timings_doc(&a.timings),
    }
}

pub fn emit(doc: &ReportDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse(text: &str) -> Result<ReportDoc, serde_json::Error> {
    serde_json::from_str(text)
}
