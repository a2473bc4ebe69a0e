//! Finite automorphism groups acting on a group, and the faithfulness
//! criterion relative to such an action.
//!
//! The action must contain all inner automorphisms, so its minimal invariant
//! subgroups are normal and the whole minisocle machinery applies with
//! A-orbits in place of conjugacy classes. The decision procedure evaluates
//! the same condition family as the plain criterion — characters of the
//! abelian part (of both the plain and the action minisocle), tensor
//! characters on both socles, one-orbit generation — and cross-checks the
//! verdict against the character-table oracle with kernels intersected over
//! the action.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::chartab::{character_table, has_faithful_irreducible, CharacterTable};
use crate::criterion::{
    faithful_character_search_for, generating_class_for, ms_faithful_rep_for, CriterionConfig,
    CriterionError, DualCharacter, MsCharacter,
};
use crate::dsl::AutoImages;
use crate::group::{FiniteGroup, GroupError, Subgroup};
use crate::module::{ma_fp_modules_with_maps, orbit_generation_check, OrbitCheck};
use crate::socle::{
    decomposition_for, minimal_invariant_subgroups_for, minisocle_decomposition, GroupMaps,
    MinisocleDecomposition, SocleError,
};

pub const DEFAULT_AUTO_CAP: usize = 20000;

#[derive(Debug, Error)]
pub enum AutError {
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("automorphism closure exceeds {0} maps")]
    ClosureOverflow(usize),
    #[error("bad automorphism word: {0}")]
    BadWord(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A closed group of automorphisms, each stored as a permutation of element
/// indices. Always contains the inner automorphisms.
#[derive(Debug, Clone)]
pub struct AutoGroup {
    /// Every map of the closed group; the identity map comes first.
    pub maps: Vec<Vec<u32>>,
    gen_maps: Vec<Vec<u32>>,
}

impl AutoGroup {
    pub fn order(&self) -> usize {
        self.maps.len()
    }
}

impl GroupMaps for AutoGroup {
    fn generator_maps(&self) -> &[Vec<u32>] {
        &self.gen_maps
    }

    fn map_count(&self) -> usize {
        self.maps.len()
    }

    fn apply_map(&self, k: usize, x: u32) -> u32 {
        self.maps[k][x as usize]
    }
}

/// Exact automorphism validation: bijective, identity-preserving, and
/// multiplicative against every generator — which forces multiplicativity on
/// all pairs, by induction on word length.
fn validate_automorphism(g: &FiniteGroup, map: &[u32]) -> Result<(), AutError> {
    let n = g.order();
    if map.len() != n {
        return Err(AutError::NotAutomorphism(format!(
            "map covers {} of {n} elements",
            map.len()
        )));
    }
    let mut seen = vec![false; n];
    for &y in map {
        if y as usize >= n || seen[y as usize] {
            return Err(AutError::NotAutomorphism("map is not a bijection".into()));
        }
        seen[y as usize] = true;
    }
    if map[0] != 0 {
        return Err(AutError::NotAutomorphism("identity is not fixed".into()));
    }
    for x in 0..n as u32 {
        for &s in g.generators() {
            if map[g.mul(x, s) as usize] != g.mul(map[x as usize], map[s as usize]) {
                return Err(AutError::NotAutomorphism(format!(
                    "multiplicativity fails at ({x}, {s})"
                )));
            }
        }
    }
    Ok(())
}

fn inverse_map(map: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; map.len()];
    for (x, &y) in map.iter().enumerate() {
        inv[y as usize] = x as u32;
    }
    inv
}

/// Closure of the inner automorphisms and the given extra maps under
/// composition. The extras are validated exactly before closing.
pub fn close_auto_group(
    g: &FiniteGroup,
    extra: &[Vec<u32>],
    cap: usize,
) -> Result<AutoGroup, AutError> {
    let mut seeds: Vec<Vec<u32>> = g
        .generators()
        .iter()
        .map(|&gen| g.conjugation_map(gen))
        .collect();
    for map in extra {
        validate_automorphism(g, map)?;
        seeds.push(map.clone());
    }

    let identity: Vec<u32> = (0..g.order() as u32).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(identity.clone());
    let mut maps = vec![identity.clone()];
    let mut head = 0;
    while head < maps.len() {
        let current = maps[head].clone();
        head += 1;
        for s in &seeds {
            let composed: Vec<u32> =
                (0..g.order()).map(|x| s[current[x] as usize]).collect();
            if seen.insert(composed.clone()) {
                if maps.len() >= cap {
                    return Err(AutError::ClosureOverflow(cap));
                }
                maps.push(composed);
            }
        }
    }

    let mut gen_maps: Vec<Vec<u32>> = Vec::new();
    for s in &seeds {
        let inv = inverse_map(s);
        if !gen_maps.contains(s) {
            gen_maps.push(s.clone());
        }
        if !gen_maps.contains(&inv) {
            gen_maps.push(inv);
        }
    }
    if gen_maps.is_empty() {
        gen_maps.push(identity);
    }
    Ok(AutoGroup { maps, gen_maps })
}

/// Turns a generator-image description into a full element map by walking the
/// multiplication table from the generators.
pub fn resolve_auto_images(g: &FiniteGroup, auto: &AutoImages) -> Result<Vec<u32>, AutError> {
    let gens = g.generators();
    let mut gen_image: Vec<Option<u32>> = vec![None; gens.len()];
    for (pos, word) in &auto.images {
        if *pos >= gens.len() {
            return Err(AutError::BadWord(format!(
                "g{pos} does not exist; the group has {} generators",
                gens.len()
            )));
        }
        if gen_image[*pos].is_some() {
            return Err(AutError::BadWord(format!("g{pos} is mapped twice")));
        }
        let mut acc = 0u32;
        for &(j, k) in word {
            if j >= gens.len() {
                return Err(AutError::BadWord(format!(
                    "g{j} does not exist; the group has {} generators",
                    gens.len()
                )));
            }
            let base = if k >= 0 { gens[j] } else { g.inv(gens[j]) };
            for _ in 0..k.unsigned_abs() {
                acc = g.mul(acc, base);
            }
        }
        gen_image[*pos] = Some(acc);
    }
    let gen_image: Vec<u32> = gen_image
        .into_iter()
        .enumerate()
        .map(|(pos, v)| v.ok_or_else(|| AutError::BadWord(format!("g{pos} has no image line"))))
        .collect::<Result<_, _>>()?;

    let prov = g.bfs_words()?;
    let by_gen_elem: HashMap<u32, u32> = gens
        .iter()
        .zip(&gen_image)
        .map(|(&ge, &img)| (ge, img))
        .collect();
    let n = g.order();
    let mut image: Vec<Option<u32>> = vec![None; n];
    image[0] = Some(0);
    for start in 1..n as u32 {
        if image[start as usize].is_some() {
            continue;
        }
        let mut chain = vec![start];
        loop {
            let top = *chain.last().unwrap();
            let (parent, _) = prov[top as usize].expect("non-identity has provenance");
            if image[parent as usize].is_some() {
                break;
            }
            chain.push(parent);
        }
        while let Some(x) = chain.pop() {
            let (parent, ge) = prov[x as usize].unwrap();
            let gi = by_gen_elem[&ge];
            image[x as usize] = Some(g.mul(image[parent as usize].unwrap(), gi));
        }
    }
    Ok(image.into_iter().map(|v| v.unwrap()).collect())
}

pub fn g_minimal_invariant_subgroups(g: &FiniteGroup, a: &AutoGroup) -> Vec<Subgroup> {
    minimal_invariant_subgroups_for(g, a)
}

/// The minisocle of the action: generated by the minimal invariant subgroups,
/// decomposed exactly like the plain minisocle with orbits of the action in
/// place of conjugacy classes.
pub fn g_minisocle(g: &FiniteGroup, a: &AutoGroup) -> Result<MinisocleDecomposition, SocleError> {
    decomposition_for(g, a)
}

#[derive(Debug, Clone)]
pub struct GReport {
    /// The group has an irreducible representation whose kernels under the
    /// whole action intersect trivially.
    pub verdict: bool,
    /// All evaluated conditions and the oracle agree.
    pub agree: bool,
    pub ma_g_trivial: bool,
    pub sampled: bool,
    /// Oracle row index whose kernel-intersection under the action is
    /// trivial, when one exists.
    pub oracle_row: Option<usize>,
    /// Action-faithful character of the plain abelian minisocle.
    pub ma_character: Option<DualCharacter>,
    /// Action-faithful character of the action's abelian minisocle.
    pub ma_g_character: Option<DualCharacter>,
    pub ms_character: Option<MsCharacter>,
    pub ms_g_character: Option<MsCharacter>,
    /// Least element whose orbit closure generates the action's abelian
    /// minisocle.
    pub ma_g_class_witness: Option<u32>,
    /// Containment observations between the two minisocles (recorded, never
    /// asserted — neither containment holds in general).
    pub ms_in_ms_g: bool,
    pub ms_g_in_ms: bool,
    pub orbit_checks: Vec<OrbitCheck>,
    pub g_deco: MinisocleDecomposition,
    pub auto_order: usize,
}

pub fn decide_g_faithful(
    g: &FiniteGroup,
    a: &AutoGroup,
    cfg: &CriterionConfig,
) -> Result<GReport, CriterionError> {
    let table = character_table(g)?;
    decide_g_faithful_with_table(g, a, &table, cfg)
}

pub fn decide_g_faithful_with_table(
    g: &FiniteGroup,
    a: &AutoGroup,
    table: &CharacterTable,
    cfg: &CriterionConfig,
) -> Result<GReport, CriterionError> {
    let plain = minisocle_decomposition(g)?;
    let g_deco = decomposition_for(g, a)?;
    let modules_plain = ma_fp_modules_with_maps(g, &plain, a)?;
    let modules_g = ma_fp_modules_with_maps(g, &g_deco, a)?;
    let orbit_checks: Vec<OrbitCheck> = modules_g
        .iter()
        .map(|m| orbit_generation_check(m, cfg.exhaustive_cap, cfg.random_samples, cfg.seed))
        .collect();

    let (ma_character, s1) = faithful_character_search_for(g, &plain, &modules_plain, a, cfg)?;
    let (ma_g_character, s2) = faithful_character_search_for(g, &g_deco, &modules_g, a, cfg)?;
    let ms_character = match &ma_character {
        Some(chi) => Some(ms_faithful_rep_for(g, &plain, &modules_plain, chi, a, cfg)?),
        None => None,
    };
    let ms_g_character = match &ma_g_character {
        Some(chi) => Some(ms_faithful_rep_for(g, &g_deco, &modules_g, chi, a, cfg)?),
        None => None,
    };
    let ma_g_class_witness = generating_class_for(g, &g_deco.ma, a)?;
    let oracle_row = has_faithful_irreducible(g, table, Some(&a.maps));

    let ma_g_trivial = g_deco.ma.is_trivial();
    let conditions = [
        oracle_row.is_some(),
        ma_character.is_some(),
        ma_g_character.is_some(),
        ms_character.as_ref().map_or(false, |c| c.certified),
        ms_g_character.as_ref().map_or(false, |c| c.certified),
        ma_g_class_witness.is_some(),
    ];
    let verdict = ma_g_trivial || ma_g_class_witness.is_some();
    let agree = conditions.iter().all(|&c| c == conditions[0]);

    Ok(GReport {
        verdict,
        agree,
        ma_g_trivial,
        sampled: s1 || s2,
        oracle_row,
        ma_character,
        ma_g_character,
        ms_character,
        ms_g_character,
        ma_g_class_witness,
        ms_in_ms_g: plain.ms.is_subset_of(&g_deco.ms),
        ms_g_in_ms: g_deco.ms.is_subset_of(&plain.ms),
        orbit_checks,
        g_deco,
        auto_order: a.order(),
    })
}
