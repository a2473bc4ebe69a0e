//! The acceptance gate. Nine checks over the built-in corpus, each printing
//! one pass/fail line; the whole corpus is analyzed once and shared.

use std::collections::HashSet;
use std::sync::LazyLock;
use std::time::{Duration, Instant};

use irrep_cli::analyze::{analyze_spec, Analysis, AnalyzeOptions};
use irrep_cli::catalog::{build_catalog, build_g_catalog, CatalogEntry};
use irrep_core::fpmat::FpMat;
use irrep_core::module::raw_orbit_check;
use irrep_core::socle::FootKind;
use irrep_core::{
    close_auto_group, construct_irreducible_rep, decide_g_faithful_with_table, parse_autos_spec,
    resolve_auto_images, CriterionConfig, FiniteGroup, Subgroup, DEFAULT_AUTO_CAP,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rayon::prelude::*;

struct Corpus {
    entries: Vec<CatalogEntry>,
    analyses: Vec<Analysis>,
    batch: Duration,
}

static CORPUS: LazyLock<Corpus> = LazyLock::new(|| {
    let entries = build_catalog();
    let started = Instant::now();
    let analyses: Vec<Analysis> = entries
        .par_iter()
        .map(|e| {
            analyze_spec(Some(&e.name), &e.spec_text, &AnalyzeOptions::default())
                .unwrap_or_else(|err| panic!("{}: {err}", e.name))
        })
        .collect();
    Corpus { entries, analyses, batch: started.elapsed() }
});

fn gate(n: usize, label: &str, failures: Vec<String>) {
    if failures.is_empty() {
        println!("acceptance {n} ({label}): pass");
    } else {
        println!("acceptance {n} ({label}): FAIL — {}", failures.join("; "));
    }
    assert!(failures.is_empty(), "acceptance {n} ({label}) failed: {failures:#?}");
}

#[test]
fn a1_criterion_matches_oracle_across_the_corpus() {
    let c = &*CORPUS;
    let mut failures = Vec::new();
    if c.entries.len() < 30 {
        failures.push(format!("corpus has only {} entries", c.entries.len()));
    }
    for (e, a) in c.entries.iter().zip(&c.analyses) {
        if a.criterion.verdict != a.oracle_row.is_some() {
            failures.push(format!("{}: criterion/oracle disagree", e.name));
        }
        if !a.agreement {
            failures.push(format!("{}: agreement flag is down", e.name));
        }
        if e.expected != Some(a.criterion.verdict) {
            failures.push(format!(
                "{}: verdict {} but the catalog expects {:?}",
                e.name, a.criterion.verdict, e.expected
            ));
        }
    }
    if c.batch > Duration::from_secs(120) {
        failures.push(format!("batch took {:.1} s", c.batch.as_secs_f64()));
    }
    gate(1, "criterion equals oracle on every entry, batch under 120 s", failures);
}

#[test]
fn a2_the_four_conditions_coincide() {
    let mut failures = Vec::new();
    for a in &CORPUS.analyses {
        let name = a.name.as_deref().unwrap_or("?");
        let conds = [
            a.criterion.ma_character.is_some(),
            a.criterion.ms_character.as_ref().map_or(false, |m| m.certified),
            a.criterion.ma_class_witness.is_some(),
            a.criterion.ms_class_witness.is_some(),
        ];
        if conds.iter().any(|&c| c != a.criterion.verdict) {
            failures.push(format!("{name}: conditions {conds:?} vs verdict {}", a.criterion.verdict));
        }
        if !a.criterion.agree {
            failures.push(format!("{name}: internal agree flag is down"));
        }
    }
    gate(2, "character, tensor, and both class conditions coincide", failures);
}

fn is_cyclic(g: &FiniteGroup) -> bool {
    (0..g.order() as u32).any(|x| g.element_order(x) == g.order())
}

fn squares_closure(g: &FiniteGroup) -> Vec<u32> {
    let squares: Vec<u32> = (0..g.order() as u32).map(|x| g.mul(x, x)).collect();
    g.subgroup_closure(&squares).members().to_vec()
}

#[test]
fn a3_classical_fixtures_are_reproduced() {
    let c = &*CORPUS;
    let mut failures = Vec::new();
    let find = |name: &str| -> &Analysis {
        &c.analyses[c.entries.iter().position(|e| e.name == name).unwrap()]
    };

    for (e, a) in c.entries.iter().zip(&c.analyses) {
        if a.group.is_abelian() && a.criterion.verdict != is_cyclic(&a.group) {
            failures.push(format!("{}: abelian verdict does not track cyclicity", e.name));
        }
    }

    // The socle of the full symmetric group is the alternating subgroup,
    // which is exactly the subgroup generated by all squares.
    for name in ["sym3", "sym5", "sym6"] {
        let a = find(name);
        if a.deco.ms.members() != squares_closure(&a.group) {
            failures.push(format!("{name}: socle is not the even subgroup"));
        }
        if a.deco.ms.order() != a.group.order() / 2 {
            failures.push(format!("{name}: socle order {}", a.deco.ms.order()));
        }
    }
    // Degree four is the exception: the socle drops to the normal four-group.
    let sym4 = find("sym4");
    if sym4.deco.ms.order() != 4
        || !sym4.deco.ms.members().iter().all(|&x| x == 0 || sym4.group.element_order(x) == 2)
    {
        failures.push("sym4: socle is not the four-group".into());
    }

    let alt4 = find("alt4");
    if alt4.deco.feet.len() != 1 {
        failures.push(format!("alt4: {} feet", alt4.deco.feet.len()));
    } else {
        match &alt4.deco.feet[0].kind {
            FootKind::Abelian { p: 2, rank: 2, .. }
                if alt4.deco.feet[0].carrier.order() == 4 => {}
            other => failures.push(format!("alt4: foot is {other:?}")),
        }
    }

    // In the affine group the socle is precisely the translation plane,
    // which the semidirect construction places at indices 0..4.
    let aff = find("affsym3");
    if aff.deco.ms.members() != [0, 1, 2, 3] {
        failures.push(format!("affsym3: socle members {:?}", aff.deco.ms.members()));
    }
    gate(3, "socles of symmetric/alternating/affine fixtures", failures);
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn is_normal(g: &FiniteGroup, sub: &Subgroup) -> bool {
    sub.members()
        .iter()
        .all(|&x| g.generators().iter().all(|&s| sub.contains(g.conj(s, x))))
}

fn is_simple(g: &FiniteGroup, sub: &Subgroup) -> bool {
    let (h, _) = g.subgroup_group(sub);
    (1..h.order() as u32).all(|x| h.normal_closure(&[x]).order() == h.order())
}

fn conjugate_subgroups(g: &FiniteGroup, a: &Subgroup, b: &Subgroup) -> bool {
    if a.order() != b.order() {
        return false;
    }
    (0..g.order() as u32).any(|t| {
        let mut image: Vec<u32> = a.members().iter().map(|&x| g.conj(t, x)).collect();
        image.sort_unstable();
        image == b.members()
    })
}

#[test]
fn a4_foot_structure_invariants() {
    let mut failures = Vec::new();
    for a in &CORPUS.analyses {
        let name = a.name.as_deref().unwrap_or("?");
        let g = &a.group;
        for (i, foot) in a.deco.feet.iter().enumerate() {
            if !is_normal(g, &foot.carrier) {
                failures.push(format!("{name}: foot {i} is not normal"));
            }
            match &foot.kind {
                FootKind::Abelian { p, rank, basis } => {
                    let expect = (*p as usize).pow(*rank as u32);
                    if !is_prime(*p)
                        || foot.carrier.order() != expect
                        || basis.len() != *rank
                        || basis.iter().any(|&b| g.element_order(b) != *p as usize)
                        || g.subgroup_closure(basis).members() != foot.carrier.members()
                    {
                        failures.push(format!("{name}: foot {i} basis does not verify"));
                    }
                }
                FootKind::Nonabelian { simple_feet } => {
                    if simple_feet.is_empty() {
                        failures.push(format!("{name}: foot {i} has no simple components"));
                    }
                    for s in simple_feet {
                        if !is_simple(g, s) {
                            failures.push(format!("{name}: foot {i} component is not simple"));
                        }
                    }
                    for pair in simple_feet.windows(2) {
                        if !conjugate_subgroups(g, &pair[0], &pair[1]) {
                            failures.push(format!("{name}: foot {i} components not conjugate"));
                        }
                    }
                }
            }
        }
        if a.deco.ma.order() * a.deco.mh.order() != a.deco.ms.order() {
            failures.push(format!("{name}: |MA|·|MH| != |MS|"));
        }
        let overlap: Vec<u32> = a
            .deco
            .ma
            .members()
            .iter()
            .copied()
            .filter(|&x| a.deco.mh.contains(x))
            .collect();
        if overlap != [0] {
            failures.push(format!("{name}: MA and MH overlap in {} elements", overlap.len()));
        }
        // Unique factorization: every MS element carries one coordinate tuple,
        // tuples are distinct, and the recorded parts multiply back.
        if a.deco.coordinates.len() != a.deco.ms.order() {
            failures.push(format!("{name}: coordinate count mismatch"));
        }
        let mut seen = HashSet::new();
        for (x, parts) in &a.deco.coordinates {
            if !seen.insert(parts.clone()) {
                failures.push(format!("{name}: duplicate factorization"));
            }
            let mut acc = 0u32;
            for &part in parts {
                acc = g.mul(acc, part);
            }
            if acc != *x {
                failures.push(format!("{name}: factorization of {x} does not multiply back"));
            }
        }
    }
    gate(4, "feet verify: elementary bases, simple components, unique factorization", failures);
}

fn random_permutation_matrix(p: u64, dim: usize, rng: &mut impl rand::Rng) -> FpMat {
    let mut image: Vec<usize> = (0..dim).collect();
    image.shuffle(rng);
    let mut m = FpMat::zero(p, dim, dim);
    for (col, &row) in image.iter().enumerate() {
        m.set(row, col, 1);
    }
    m
}

#[test]
fn a5_orbit_generation_survives_dualization() {
    let mut failures = Vec::new();
    for a in &CORPUS.analyses {
        for (k, oc) in a.criterion.orbit_checks.iter().enumerate() {
            if oc.primal != oc.dual {
                failures.push(format!(
                    "{}: module {k} primal {} dual {}",
                    a.name.as_deref().unwrap_or("?"),
                    oc.primal,
                    oc.dual
                ));
            }
        }
    }
    // Permutation modules in coprime characteristic are semisimple, which is
    // exactly the hypothesis the transfer needs; sweep a hundred random ones.
    let mut rng = rand::rngs::StdRng::seed_from_u64(0xACCE55);
    let combos = [(5u64, 4usize), (7, 4), (11, 3), (13, 3)];
    for i in 0..100 {
        let (p, dim) = combos[i % combos.len()];
        let mats: Vec<FpMat> = (0..2 + i % 2)
            .map(|_| random_permutation_matrix(p, dim, &mut rng))
            .collect();
        let oc = raw_orbit_check(&mats, p, dim, &[(0, dim)], 4096, 10_000, 0xD00D + i as u64);
        if oc.sampled {
            failures.push(format!("random module {i} was sampled, not enumerated"));
        }
        if oc.primal != oc.dual {
            failures.push(format!("random module {i}: primal {} dual {}", oc.primal, oc.dual));
        }
    }
    gate(5, "primal and dual orbit generation agree, corpus plus 100 random modules", failures);
}

#[test]
fn a6_positive_verdicts_carry_certified_characters() {
    let mut failures = Vec::new();
    for a in &CORPUS.analyses {
        if !a.criterion.verdict {
            continue;
        }
        let name = a.name.as_deref().unwrap_or("?");
        match &a.criterion.ms_character {
            None => failures.push(format!("{name}: verdict true without a character")),
            Some(ms) => {
                if !ms.certified {
                    failures.push(format!("{name}: character kernel check incomplete"));
                }
                if ms.values.len() != a.deco.ms.order() {
                    failures.push(format!("{name}: character misses elements"));
                }
                let at_identity = ms.value_of(0).unwrap();
                if (at_identity.re - ms.degree as f64).abs() > 1e-9 || at_identity.im.abs() > 1e-9
                {
                    failures.push(format!("{name}: identity value is not the degree"));
                }
            }
        }
    }
    gate(6, "every positive verdict has an exhaustively certified character", failures);
}

#[test]
fn a7_explicit_matrices_for_small_positive_entries() {
    let jobs: Vec<&Analysis> = CORPUS
        .analyses
        .iter()
        .filter(|a| a.criterion.verdict && a.group.order() <= 200)
        .collect();
    let results: Vec<Option<String>> = jobs
        .par_iter()
        .map(|a| {
            let name = a.name.as_deref().unwrap_or("?");
            let g = &a.group;
            let rep = match construct_irreducible_rep(g, &a.table, a.oracle_row?) {
                Ok(r) => r,
                Err(e) => return Some(format!("{name}: {e}")),
            };
            let eye = nalgebra::DMatrix::identity(rep.degree, rep.degree);
            let mut worst_unitary = 0.0f64;
            let mut worst_mult = 0.0f64;
            for x in 0..g.order() as u32 {
                worst_unitary =
                    worst_unitary.max((rep.image(x).adjoint() * rep.image(x) - &eye).norm());
                for y in 0..g.order() as u32 {
                    let defect = (rep.image(x) * rep.image(y) - rep.image(g.mul(x, y))).norm();
                    worst_mult = worst_mult.max(defect);
                }
            }
            if worst_unitary > 1e-8 {
                return Some(format!("{name}: unitary defect {worst_unitary:.2e}"));
            }
            if worst_mult > 1e-8 {
                return Some(format!("{name}: multiplicative defect {worst_mult:.2e}"));
            }
            if rep.min_pairwise_distance() <= 1e-6 {
                return Some(format!("{name}: images are not pairwise distinct"));
            }
            if rep.commutant_dim != 1 {
                return Some(format!("{name}: commutant dimension {}", rep.commutant_dim));
            }
            None
        })
        .collect();
    let mut failures: Vec<String> = results.into_iter().flatten().collect();
    if jobs.is_empty() {
        failures.push("no entries qualified".into());
    }
    gate(7, "unitary faithful matrices with scalar commutant, orders up to 200", failures);
}

#[test]
fn a8_the_action_variant() {
    let c = &*CORPUS;
    let mut failures = Vec::new();

    for e in build_g_catalog() {
        let opts =
            AnalyzeOptions { autos_text: Some(e.autos_text.clone()), ..Default::default() };
        let a = match analyze_spec(Some(&e.name), &e.spec_text, &opts) {
            Ok(a) => a,
            Err(err) => {
                failures.push(format!("{}: {err}", e.name));
                continue;
            }
        };
        let gr = a.g.as_ref().unwrap();
        if a.criterion.verdict != e.expected_plain || gr.verdict != e.expected_g {
            failures.push(format!(
                "{}: verdicts plain {} action {}",
                e.name, a.criterion.verdict, gr.verdict
            ));
        }
        if !gr.agree {
            failures.push(format!("{}: action conditions disagree with the oracle", e.name));
        }
        if e.name == "elem8sym3" {
            // Re-derive the action and confirm the witness orbit generates.
            let images = parse_autos_spec(&e.autos_text).unwrap();
            let maps: Vec<Vec<u32>> = images
                .iter()
                .map(|im| resolve_auto_images(&a.group, im).unwrap())
                .collect();
            let action = close_auto_group(&a.group, &maps, DEFAULT_AUTO_CAP).unwrap();
            match gr.ma_g_class_witness {
                None => failures.push("elem8sym3: no witness".into()),
                Some(w) => {
                    let orbit: Vec<u32> =
                        action.maps.iter().map(|m| m[w as usize]).collect();
                    if a.group.subgroup_closure(&orbit).members() != gr.g_deco.ma.members() {
                        failures.push("elem8sym3: witness orbit does not generate".into());
                    }
                }
            }
        }
    }

    // With no extra automorphisms the action variant must collapse onto the
    // plain criterion, witness for witness.
    for a in &c.analyses {
        let name = a.name.as_deref().unwrap_or("?");
        let inn = match close_auto_group(&a.group, &[], DEFAULT_AUTO_CAP) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        let gr = match decide_g_faithful_with_table(
            &a.group,
            &inn,
            &a.table,
            &CriterionConfig::default(),
        ) {
            Ok(v) => v,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        if gr.verdict != a.criterion.verdict
            || gr.ma_g_class_witness != a.criterion.ma_class_witness
            || gr.ma_character != a.criterion.ma_character
            || gr.ma_g_character != a.criterion.ma_character
        {
            failures.push(format!("{name}: inner-only action differs from the plain verdict"));
        }
        if !gr.agree {
            failures.push(format!("{name}: inner-only action disagrees internally"));
        }
        match (&gr.ms_g_character, &a.criterion.ms_character) {
            (Some(x), Some(y)) if x.degree == y.degree => {}
            (None, None) => {}
            _ => failures.push(format!("{name}: inner-only tensor character differs")),
        }
    }
    gate(8, "action variant: corpus pairs and inner-only collapse", failures);
}

#[test]
fn a9_character_table_self_checks() {
    let mut failures = Vec::new();
    for a in &CORPUS.analyses {
        let name = a.name.as_deref().unwrap_or("?");
        let sum: usize = a.table.degrees.iter().map(|d| d * d).sum();
        if sum != a.group.order() {
            failures.push(format!("{name}: degree squares sum to {sum}"));
        }
        let row = a.table.row_orthogonality_defect(&a.group);
        let col = a.table.column_orthogonality_defect(&a.group);
        if row > 1e-8 || col > 1e-8 {
            failures.push(format!("{name}: orthogonality defects {row:.2e} / {col:.2e}"));
        }
    }
    gate(9, "degree sums and orthogonality of every corpus table", failures);
}
