//! One-group pipeline: build, socle decomposition, criterion, oracle
//! cross-check, optional automorphism-action variant, optional explicit
//! matrices. Every stage is timed and every verdict is cross-checked.

use std::time::Instant;

use irrep_core::group::DEFAULT_MAX_ORDER;
use irrep_core::{
    character_table_with_tolerance, close_auto_group, construct_irreducible_rep,
    decide_g_faithful_with_table, decide_with_decomposition, has_faithful_irreducible,
    minisocle_decomposition, parse_autos_spec, parse_group_spec, resolve_auto_images, AutError,
    CharacterTable, CriterionConfig, CriterionError, CriterionReport, FiniteGroup, GReport,
    GroupError, IrrepMatrices, MinisocleDecomposition, OracleError, RepError, SocleError,
    DEFAULT_AUTO_CAP, MAX_REP_ORDER,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("parse: {0}")]
    Parse(String),
    #[error("build: {0}")]
    Build(#[from] GroupError),
    #[error("socle: {0}")]
    Socle(#[from] SocleError),
    #[error("criterion: {0}")]
    Criterion(#[from] CriterionError),
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
    #[error("autos: {0}")]
    Autos(#[from] AutError),
    #[error("rep: {0}")]
    Rep(#[from] RepError),
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Text of an `autos:` block; switches the action variant on.
    pub autos_text: Option<String>,
    pub construct_rep: bool,
    pub max_order: usize,
    pub tolerance: f64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            autos_text: None,
            construct_rep: false,
            max_order: DEFAULT_MAX_ORDER,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct StageTimings {
    pub build_ms: f64,
    pub socle_ms: f64,
    pub criterion_ms: f64,
    pub oracle_ms: f64,
    pub g_ms: Option<f64>,
    pub rep_ms: Option<f64>,
}

/// Re-measured properties of constructed matrices; the construction verifies
/// these itself, but the report quotes independent numbers.
#[derive(Debug, Clone)]
pub struct RepSummary {
    pub degree: usize,
    pub commutant_dim: usize,
    pub unitary_defect: f64,
    pub multiplicative_defect: f64,
    pub min_pairwise_distance: f64,
}

#[derive(Debug)]
pub struct Analysis {
    pub name: Option<String>,
    pub spec_text: String,
    pub group: FiniteGroup,
    pub notes: Vec<String>,
    pub deco: MinisocleDecomposition,
    pub criterion: CriterionReport,
    pub table: CharacterTable,
    pub oracle_row: Option<usize>,
    pub g: Option<GReport>,
    pub rep: Option<RepSummary>,
    /// Criterion and oracle reached the same verdict and every internal
    /// condition family was unanimous.
    pub agreement: bool,
    pub timings: StageTimings,
}

fn summarize_rep(g: &FiniteGroup, rep: &IrrepMatrices) -> RepSummary {
    let n = g.order();
    let d = rep.degree;
    let eye = nalgebra_identity(d);
    let mut unitary_defect = 0.0f64;
    for m in &rep.images {
        unitary_defect = unitary_defect.max((m.adjoint() * m - &eye).norm());
    }
    let mut multiplicative_defect = 0.0f64;
    let step = (n * n / 2000).max(1);
    let mut k = 0usize;
    while k < n * n {
        let (x, y) = ((k / n) as u32, (k % n) as u32);
        let prod = rep.image(x) * rep.image(y);
        multiplicative_defect =
            multiplicative_defect.max((prod - rep.image(g.mul(x, y))).norm());
        k += step;
    }
    RepSummary {
        degree: d,
        commutant_dim: rep.commutant_dim,
        unitary_defect,
        multiplicative_defect,
        min_pairwise_distance: rep.min_pairwise_distance(),
    }
}

fn nalgebra_identity(d: usize) -> nalgebra::DMatrix<irrep_core::chartab::C64> {
    nalgebra::DMatrix::identity(d, d)
}

pub fn analyze_spec(
    name: Option<&str>,
    spec_text: &str,
    opts: &AnalyzeOptions,
) -> Result<Analysis, AnalyzeError> {
    let mut timings = StageTimings::default();
    let mut notes = Vec::new();

    let t = Instant::now();
    let spec = parse_group_spec(spec_text).map_err(|e| AnalyzeError::Parse(e.to_string()))?;
    let built = irrep_core::build_group(&spec, opts.max_order)?;
    notes.extend(built.notes.iter().cloned());
    let group = built.group;
    timings.build_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let deco = minisocle_decomposition(&group)?;
    timings.socle_ms = t.elapsed().as_secs_f64() * 1e3;

    let cfg = CriterionConfig { tolerance: opts.tolerance, ..CriterionConfig::default() };
    let t = Instant::now();
    let criterion = decide_with_decomposition(&group, &deco, &cfg)?;
    timings.criterion_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let table = character_table_with_tolerance(&group, opts.tolerance)?;
    let oracle_row = has_faithful_irreducible(&group, &table, None);
    timings.oracle_ms = t.elapsed().as_secs_f64() * 1e3;

    let g_report = match &opts.autos_text {
        Some(text) => {
            let t = Instant::now();
            let images =
                parse_autos_spec(text).map_err(|e| AnalyzeError::Parse(e.to_string()))?;
            let maps = images
                .iter()
                .map(|a| resolve_auto_images(&group, a))
                .collect::<Result<Vec<_>, _>>()?;
            let action = close_auto_group(&group, &maps, DEFAULT_AUTO_CAP)?;
            let r = decide_g_faithful_with_table(&group, &action, &table, &cfg)?;
            timings.g_ms = Some(t.elapsed().as_secs_f64() * 1e3);
            Some(r)
        }
        None => None,
    };

    let rep = if opts.construct_rep {
        match oracle_row {
            Some(row) if group.order() <= MAX_REP_ORDER => {
                let t = Instant::now();
                let matrices = construct_irreducible_rep(&group, &table, row)?;
                timings.rep_ms = Some(t.elapsed().as_secs_f64() * 1e3);
                Some(summarize_rep(&group, &matrices))
            }
            Some(_) => {
                notes.push(format!(
                    "matrices skipped: order {} exceeds the dense-construction limit {}",
                    group.order(),
                    MAX_REP_ORDER
                ));
                None
            }
            None => {
                notes.push("matrices skipped: no faithful irreducible row".into());
                None
            }
        }
    } else {
        None
    };

    let agreement = criterion.verdict == oracle_row.is_some()
        && criterion.agree
        && g_report.as_ref().map_or(true, |r| r.agree);

    Ok(Analysis {
        name: name.map(str::to_string),
        spec_text: spec_text.trim().to_string(),
        group,
        notes,
        deco,
        criterion,
        table,
        oracle_row,
        g: g_report,
        rep,
        agreement,
        timings,
    })
}
