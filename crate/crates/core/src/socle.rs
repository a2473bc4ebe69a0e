//! Feet (minimal normal subgroups), their classification, and the witnessed
//! minisocle decomposition MS = MA ⊕ MH.
//!
//! Everything is parameterized over an "action": conjugation by the group for
//! the plain story, or an automorphism group for the G-variant (see `aut`).
//! A foot becomes a minimal invariant subgroup, a conjugacy class becomes an
//! orbit, and the decomposition argument is verbatim the same.

use thiserror::Error;

use crate::group::{orbit_closure, FiniteGroup, Subgroup};

#[derive(Debug, Error)]
pub enum SocleError {
    #[error("subgroup is not minimal invariant: contains the proper closed subgroup of order {inner_order}")]
    NotMinimal { inner_order: usize },
    #[error("decomposition invariant violated: {0}")]
    Inconsistent(String),
}

/// How the ambient group (or a chosen automorphism group) moves elements
/// around. `generator_maps` must include inverses of the generating maps so
/// fixpoint intersections are exact; `map_count`/`apply_map` expose the full
/// map family for witness searches.
pub trait GroupMaps {
    fn generator_maps(&self) -> &[Vec<u32>];
    fn map_count(&self) -> usize;
    fn apply_map(&self, k: usize, x: u32) -> u32;
}

/// Conjugation by every group element; the generating maps are conjugations
/// by generators and their inverses.
pub struct InnerAction<'a> {
    group: &'a FiniteGroup,
    gen_maps: Vec<Vec<u32>>,
}

impl<'a> InnerAction<'a> {
    pub fn new(group: &'a FiniteGroup) -> Self {
        InnerAction { group, gen_maps: group.generator_conjugation_maps() }
    }
}

impl GroupMaps for InnerAction<'_> {
    fn generator_maps(&self) -> &[Vec<u32>] {
        &self.gen_maps
    }

    fn map_count(&self) -> usize {
        self.group.order()
    }

    fn apply_map(&self, k: usize, x: u32) -> u32 {
        self.group.conj(k as u32, x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FootKind {
    Abelian { p: u64, rank: usize, basis: Vec<u32> },
    Nonabelian { simple_feet: Vec<Subgroup> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Foot {
    pub carrier: Subgroup,
    pub kind: FootKind,
}

impl Foot {
    pub fn is_abelian(&self) -> bool {
        matches!(self.kind, FootKind::Abelian { .. })
    }
}

#[derive(Debug, Clone)]
pub struct MinisocleDecomposition {
    pub feet: Vec<Foot>,
    /// Indices into `feet` of the greedily selected abelian summands.
    pub ma_summands: Vec<usize>,
    /// Indices into `feet` of all nonabelian feet.
    pub mh_feet: Vec<usize>,
    pub ma: Subgroup,
    pub mh: Subgroup,
    pub ms: Subgroup,
    /// For each MS element, its unique factorization: one element per
    /// selected abelian summand, then one per nonabelian foot, in order.
    pub coordinates: Vec<(u32, Vec<u32>)>,
}

impl MinisocleDecomposition {
    pub fn coordinates_of(&self, x: u32) -> Option<&[u32]> {
        self.coordinates
            .binary_search_by_key(&x, |&(e, _)| e)
            .ok()
            .map(|i| self.coordinates[i].1.as_slice())
    }
}

/// Smallest subgroup containing the seed that is closed under the action's
/// generating maps. One orbit pass then one product pass suffices: the
/// subgroup closure of a map-stable set stays map-stable because every map is
/// an endomorphism.
pub fn invariant_closure(g: &FiniteGroup, action: &dyn GroupMaps, seed: &[u32]) -> Subgroup {
    let orbit = orbit_closure(g.order(), seed, action.generator_maps());
    g.subgroup_closure(&orbit)
}

pub fn minimal_invariant_subgroups_for(g: &FiniteGroup, action: &dyn GroupMaps) -> Vec<Subgroup> {
    if g.order() == 1 {
        return Vec::new();
    }
    // Orbits of nontrivial elements under the action.
    let maps = action.generator_maps();
    let mut seen = vec![false; g.order()];
    seen[0] = true;
    let mut candidates: Vec<Subgroup> = Vec::new();
    for x in 1..g.order() as u32 {
        if seen[x as usize] {
            continue;
        }
        let orbit = orbit_closure(g.order(), &[x], maps);
        for &m in &orbit {
            seen[m as usize] = true;
        }
        let closed = g.subgroup_closure(&orbit);
        if !candidates.contains(&closed) {
            candidates.push(closed);
        }
    }
    candidates.sort_by(|a, b| (a.order(), a.members()).cmp(&(b.order(), b.members())));
    let minimal: Vec<Subgroup> = candidates
        .iter()
        .filter(|c| !candidates.iter().any(|other| *other != **c && other.is_subset_of(c)))
        .cloned()
        .collect();
    minimal
}

/// The feet: inclusion-minimal invariant closures of nontrivial orbits,
/// ordered by (order, members).
pub fn minimal_normal_subgroups(g: &FiniteGroup) -> Vec<Subgroup> {
    minimal_invariant_subgroups_for(g, &InnerAction::new(g))
}

/// Minimality certificate: every nontrivial orbit inside M must close to all
/// of M. Checked per orbit, not per element — the closure only depends on the
/// orbit.
fn check_minimal(
    g: &FiniteGroup,
    action: &dyn GroupMaps,
    m: &Subgroup,
) -> Result<(), SocleError> {
    let maps = action.generator_maps();
    let mut seen = vec![false; g.order()];
    seen[0] = true;
    for &x in m.members().iter().skip(1) {
        if seen[x as usize] {
            continue;
        }
        let orbit = orbit_closure(g.order(), &[x], maps);
        for &o in &orbit {
            seen[o as usize] = true;
        }
        let closed = g.subgroup_closure(&orbit);
        if closed.order() != m.order() {
            return Err(SocleError::NotMinimal { inner_order: closed.order() });
        }
    }
    Ok(())
}

fn foot_prime(g: &FiniteGroup, m: &Subgroup) -> Result<u64, SocleError> {
    let p = g.element_order(m.members()[1]) as u64;
    for &x in m.members().iter().skip(1) {
        if g.element_order(x) as u64 != p {
            return Err(SocleError::Inconsistent(format!(
                "abelian foot mixes element orders {p} and {}",
                g.element_order(x)
            )));
        }
    }
    let mut pow = 1usize;
    while pow < m.order() {
        pow *= p as usize;
    }
    if pow != m.order() {
        return Err(SocleError::Inconsistent(format!(
            "abelian foot of order {} is not a power of {p}",
            m.order()
        )));
    }
    Ok(p)
}

fn is_abelian_subset(g: &FiniteGroup, members: &[u32]) -> bool {
    members
        .iter()
        .all(|&a| members.iter().all(|&b| g.mul(a, b) == g.mul(b, a)))
}

fn elements_commute(g: &FiniteGroup, a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|&x| b.iter().all(|&y| g.mul(x, y) == g.mul(y, x)))
}

/// Abelian case: same prime order everywhere, greedy independent basis.
fn classify_abelian(g: &FiniteGroup, m: &Subgroup) -> Result<FootKind, SocleError> {
    let p = foot_prime(g, m)?;
    let mut basis: Vec<u32> = Vec::new();
    let mut span = Subgroup::trivial(g.order());
    for &x in m.members().iter().skip(1) {
        if span.order() == m.order() {
            break;
        }
        if !span.contains(x) {
            let before = span.order();
            basis.push(x);
            span = g.subgroup_closure(&basis);
            if span.order() != before * p as usize {
                return Err(SocleError::Inconsistent(format!(
                    "basis extension by {} grew span {} -> {}, expected factor {p}",
                    g.label(x),
                    before,
                    span.order()
                )));
            }
        }
    }
    if span.order() != m.order() {
        return Err(SocleError::Inconsistent("greedy basis does not span the foot".into()));
    }
    Ok(FootKind::Abelian { p, rank: basis.len(), basis })
}

/// Nonabelian case: take any foot S of M as a standalone group, sweep its
/// images under the full action family, and greedily assemble a direct family.
/// The assembled family must regenerate M, its members must be simple, and
/// every foot of M must appear in it.
fn classify_nonabelian(
    g: &FiniteGroup,
    action: &dyn GroupMaps,
    m: &Subgroup,
) -> Result<FootKind, SocleError> {
    let (h, embed) = g.subgroup_group(m);
    let inner_feet = minimal_normal_subgroups(&h);
    if inner_feet.is_empty() {
        return Err(SocleError::Inconsistent("nonabelian foot has no inner feet".into()));
    }
    let lift = |s: &Subgroup| -> Subgroup {
        Subgroup::from_members(
            g.order(),
            s.members().iter().map(|&i| embed[i as usize]).collect(),
        )
    };
    let inner_feet_lifted: Vec<Subgroup> = inner_feet.iter().map(&lift).collect();
    let s0 = &inner_feet_lifted[0];
    // Images of S under every map in the action family.
    let mut images: Vec<Subgroup> = Vec::new();
    for k in 0..action.map_count() {
        let img = Subgroup::from_members(
            g.order(),
            s0.members().iter().map(|&x| action.apply_map(k, x)).collect(),
        );
        if !images.contains(&img) {
            images.push(img);
        }
    }
    images.sort_by(|a, b| (a.order(), a.members()).cmp(&(b.order(), b.members())));
    let mut family: Vec<Subgroup> = Vec::new();
    let mut spanned = Subgroup::trivial(g.order());
    for img in &images {
        if img.members().iter().all(|&x| spanned.contains(x)) {
            continue;
        }
        // Direct extension: trivial intersection and elementwise commuting.
        let meet = img.members().iter().filter(|&&x| spanned.contains(x)).count();
        if meet != 1 {
            return Err(SocleError::Inconsistent(format!(
                "image meets the assembled family in {meet} elements"
            )));
        }
        if !elements_commute(g, img.members(), spanned.members()) {
            return Err(SocleError::Inconsistent(
                "image does not commute with the assembled family".into(),
            ));
        }
        let before = spanned.order();
        let mut seed = spanned.members().to_vec();
        seed.extend_from_slice(img.members());
        spanned = g.subgroup_closure(&seed);
        if spanned.order() != before * img.order() {
            return Err(SocleError::Inconsistent("family extension is not direct".into()));
        }
        family.push(img.clone());
    }
    if spanned != *m {
        return Err(SocleError::Inconsistent(format!(
            "assembled family spans order {}, foot has order {}",
            spanned.order(),
            m.order()
        )));
    }
    // Each family member is simple: within itself, every nontrivial orbit
    // under ITS OWN conjugation closes to the whole member.
    for s in &family {
        let (sg, _) = g.subgroup_group(s);
        let sub_feet = minimal_normal_subgroups(&sg);
        if sub_feet.len() != 1 || sub_feet[0].order() != sg.order() {
            return Err(SocleError::Inconsistent("family member is not simple".into()));
        }
        if sg.order() > 1 && is_abelian_subset(g, s.members()) {
            return Err(SocleError::Inconsistent("family member is abelian".into()));
        }
    }
    // Every inner foot of M is one of the assembled members.
    for f in &inner_feet_lifted {
        if !family.contains(f) {
            return Err(SocleError::Inconsistent(
                "an inner foot of the carrier is missing from the assembled family".into(),
            ));
        }
    }
    Ok(FootKind::Nonabelian { simple_feet: family })
}

pub(crate) fn classify_foot_for(
    g: &FiniteGroup,
    action: &dyn GroupMaps,
    m: &Subgroup,
) -> Result<Foot, SocleError> {
    if m.is_trivial() {
        return Err(SocleError::Inconsistent("the trivial subgroup is not a foot".into()));
    }
    check_minimal(g, action, m)?;
    let kind = if is_abelian_subset(g, m.members()) {
        classify_abelian(g, m)?
    } else {
        classify_nonabelian(g, action, m)?
    };
    Ok(Foot { carrier: m.clone(), kind })
}

pub fn classify_foot(g: &FiniteGroup, m: &Subgroup) -> Result<Foot, SocleError> {
    classify_foot_for(g, &InnerAction::new(g), m)
}

/// Either M ⊆ N, or ⟨M, N⟩ factors directly over them. Checked for every
/// (foot, partial family span) pair during assembly.
fn direct_or_contained(
    g: &FiniteGroup,
    m: &Subgroup,
    n: &Subgroup,
) -> Result<bool, SocleError> {
    if m.is_subset_of(n) {
        return Ok(true);
    }
    let meet = m.members().iter().filter(|&&x| n.contains(x)).count();
    if meet != 1 {
        return Err(SocleError::Inconsistent(
            "foot neither contained in nor meeting the span trivially".into(),
        ));
    }
    if !elements_commute(g, m.members(), n.members()) {
        return Err(SocleError::Inconsistent("foot does not commute with the span".into()));
    }
    Ok(false)
}

pub fn decomposition_for(
    g: &FiniteGroup,
    action: &dyn GroupMaps,
) -> Result<MinisocleDecomposition, SocleError> {
    let carriers = minimal_invariant_subgroups_for(g, action);
    let mut feet = Vec::with_capacity(carriers.len());
    for c in &carriers {
        feet.push(classify_foot_for(g, action, c)?);
    }
    // Greedy maximal direct family among abelian feet, in (order, least
    // member) order — which is the order `carriers` already carries.
    let mut ma_summands = Vec::new();
    let mut ma = Subgroup::trivial(g.order());
    for (i, f) in feet.iter().enumerate() {
        if !f.is_abelian() {
            continue;
        }
        if direct_or_contained(g, &f.carrier, &ma)? {
            continue;
        }
        let before = ma.order();
        let mut seed = ma.members().to_vec();
        seed.extend_from_slice(f.carrier.members());
        ma = g.subgroup_closure(&seed);
        if ma.order() != before * f.carrier.order() {
            return Err(SocleError::Inconsistent("abelian family extension not direct".into()));
        }
        ma_summands.push(i);
    }
    // MA must equal the subgroup generated by ALL abelian feet.
    let all_abelian: Vec<u32> = feet
        .iter()
        .filter(|f| f.is_abelian())
        .flat_map(|f| f.carrier.members().iter().copied())
        .collect();
    if g.subgroup_closure(&all_abelian) != ma {
        return Err(SocleError::Inconsistent(
            "greedy family does not generate the span of all abelian feet".into(),
        ));
    }
    // All nonabelian feet form a direct family as they stand.
    let mut mh_feet = Vec::new();
    let mut mh = Subgroup::trivial(g.order());
    for (i, f) in feet.iter().enumerate() {
        if f.is_abelian() {
            continue;
        }
        if direct_or_contained(g, &f.carrier, &mh)? {
            return Err(SocleError::Inconsistent(
                "a nonabelian foot is contained in the span of the others".into(),
            ));
        }
        let before = mh.order();
        let mut seed = mh.members().to_vec();
        seed.extend_from_slice(f.carrier.members());
        mh = g.subgroup_closure(&seed);
        if mh.order() != before * f.carrier.order() {
            return Err(SocleError::Inconsistent("nonabelian family extension not direct".into()));
        }
        mh_feet.push(i);
    }
    // MS = MA ⊕ MH with a full factorization table over the summands.
    if !elements_commute(g, ma.members(), mh.members()) {
        return Err(SocleError::Inconsistent("MA and MH do not commute".into()));
    }
    let mut ms_seed = ma.members().to_vec();
    ms_seed.extend_from_slice(mh.members());
    let ms = g.subgroup_closure(&ms_seed);
    if ms.order() != ma.order() * mh.order() {
        return Err(SocleError::Inconsistent(format!(
            "|MS| = {} but |MA||MH| = {}",
            ms.order(),
            ma.order() * mh.order()
        )));
    }
    let summand_carriers: Vec<&Subgroup> = ma_summands
        .iter()
        .map(|&i| &feet[i].carrier)
        .chain(mh_feet.iter().map(|&i| &feet[i].carrier))
        .collect();
    let mut coordinates: Vec<(u32, Vec<u32>)> = vec![(0, Vec::new())];
    for part in summand_carriers {
        let mut next = Vec::with_capacity(coordinates.len() * part.order());
        for (x, coords) in &coordinates {
            for &s in part.members() {
                let y = g.mul(*x, s);
                let mut c = coords.clone();
                c.push(s);
                next.push((y, c));
            }
        }
        coordinates = next;
    }
    coordinates.sort_by_key(|&(x, _)| x);
    if coordinates.len() != ms.order()
        || coordinates.windows(2).any(|w| w[0].0 == w[1].0)
        || coordinates.iter().any(|&(x, _)| !ms.contains(x))
    {
        return Err(SocleError::Inconsistent("factorization over summands is not unique".into()));
    }
    Ok(MinisocleDecomposition { feet, ma_summands, mh_feet, ma, mh, ms, coordinates })
}

pub fn minisocle_decomposition(g: &FiniteGroup) -> Result<MinisocleDecomposition, SocleError> {
    decomposition_for(g, &InnerAction::new(g))
}

/// Subgroup generated by all feet; for finite groups this equals MS.
pub fn socle(g: &FiniteGroup) -> Subgroup {
    let seed: Vec<u32> = minimal_normal_subgroups(g)
        .iter()
        .flat_map(|m| m.members().iter().copied())
        .collect();
    g.subgroup_closure(&seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_group_spec;
    use crate::group::{build_group, DEFAULT_MAX_ORDER};

    fn build(text: &str) -> FiniteGroup {
        build_group(&parse_group_spec(text).unwrap(), DEFAULT_MAX_ORDER).unwrap().group
    }

    /// Brute-force normal subgroup scan for small groups: every subgroup
    /// closure of every subset is infeasible, but every normal subgroup is a
    /// union of conjugacy classes containing the identity class, so scan all
    /// class unions.
    fn normal_subgroups_by_class_unions(g: &FiniteGroup) -> Vec<Subgroup> {
        let classes = g.conjugacy_classes();
        let k = classes.len();
        assert!(k <= 16, "fixture small enough for subset scan");
        let mut out = Vec::new();
        for mask in 0..(1u32 << k) {
            if mask & 1 == 0 {
                continue; // must contain the identity class
            }
            let members: Vec<u32> = (0..k)
                .filter(|&c| mask >> c & 1 == 1)
                .flat_map(|c| classes.classes[c].iter().copied())
                .collect();
            let sub = g.subgroup_closure(&members);
            if sub.order() == members.len() && !out.contains(&sub) {
                out.push(sub);
            }
        }
        out
    }

    fn feet_by_brute_force(g: &FiniteGroup) -> Vec<Subgroup> {
        let normals = normal_subgroups_by_class_unions(g);
        let mut feet: Vec<Subgroup> = normals
            .iter()
            .filter(|n| {
                !n.is_trivial()
                    && !normals.iter().any(|m| {
                        !m.is_trivial() && *m != **n && m.is_subset_of(n)
                    })
            })
            .cloned()
            .collect();
        feet.sort_by(|a, b| (a.order(), a.members()).cmp(&(b.order(), b.members())));
        feet
    }

    #[test]
    fn feet_match_brute_force_normal_lattice() {
        for spec in
            ["symmetric 4", "quaternion 8", "dihedral 12", "cyclic 12", "elemabelian 2 2"]
        {
            let g = build(spec);
            assert_eq!(minimal_normal_subgroups(&g), feet_by_brute_force(&g), "{spec}");
        }
    }

    #[test]
    fn sym4_unique_foot_is_the_order_four_normal_subgroup() {
        let g = build("symmetric 4");
        let feet = minimal_normal_subgroups(&g);
        assert_eq!(feet.len(), 1);
        assert_eq!(feet[0].order(), 4);
        let foot = classify_foot(&g, &feet[0]).unwrap();
        match foot.kind {
            FootKind::Abelian { p, rank, ref basis } => {
                assert_eq!((p, rank), (2, 2));
                assert_eq!(basis.len(), 2);
            }
            _ => panic!("expected abelian"),
        }
    }

    #[test]
    fn alt5_is_its_own_single_simple_foot() {
        let g = build("alternating 5");
        let feet = minimal_normal_subgroups(&g);
        assert_eq!(feet.len(), 1);
        assert_eq!(feet[0].order(), 60);
        match classify_foot(&g, &feet[0]).unwrap().kind {
            FootKind::Nonabelian { simple_feet } => assert_eq!(simple_feet.len(), 1),
            _ => panic!("expected nonabelian"),
        }
    }

    #[test]
    fn klein_four_has_three_feet() {
        let g = build("elemabelian 2 2");
        let feet = minimal_normal_subgroups(&g);
        assert_eq!(feet.len(), 3);
        assert!(feet.iter().all(|f| f.order() == 2));
    }

    #[test]
    fn wreath_style_swap_fuses_the_factors() {
        // Alt(5) x Alt(5) extended by the factor swap: the product is a single
        // foot whose classification must recover the two conjugate factors.
        let g = build(
            "perm 10: (0 1 2), (0 1 2 3 4), (5 6 7), (5 6 7 8 9), (0 5)(1 6)(2 7)(3 8)(4 9)",
        );
        assert_eq!(g.order(), 7200);
        let feet = minimal_normal_subgroups(&g);
        assert_eq!(feet.len(), 1);
        assert_eq!(feet[0].order(), 3600);
        match classify_foot(&g, &feet[0]).unwrap().kind {
            FootKind::Nonabelian { simple_feet } => {
                assert_eq!(simple_feet.len(), 2);
                assert!(simple_feet.iter().all(|s| s.order() == 60));
            }
            _ => panic!("expected nonabelian"),
        }
    }

    #[test]
    fn minisocle_of_mixed_product() {
        let g = build("product (cyclic 3) (alternating 5)");
        let deco = minisocle_decomposition(&g).unwrap();
        assert_eq!(deco.ma.order(), 3);
        assert_eq!(deco.mh.order(), 60);
        assert_eq!(deco.ms.order(), 180);
        assert_eq!(deco.coordinates.len(), 180);
        assert_eq!(deco.ma_summands.len(), 1);
        assert_eq!(deco.mh_feet.len(), 1);
    }

    #[test]
    fn minisocle_greedy_family_on_klein_four() {
        let g = build("elemabelian 2 2");
        let deco = minisocle_decomposition(&g).unwrap();
        assert_eq!(deco.feet.len(), 3);
        // Three feet, but the greedy direct family keeps only two.
        assert_eq!(deco.ma_summands.len(), 2);
        assert_eq!(deco.ma.order(), 4);
        assert_eq!(deco.ms.order(), 4);
    }

    #[test]
    fn trivial_group_decomposition() {
        let g = FiniteGroup::trivial();
        let deco = minisocle_decomposition(&g).unwrap();
        assert!(deco.feet.is_empty());
        assert_eq!(deco.ma.order(), 1);
        assert_eq!(deco.mh.order(), 1);
        assert_eq!(deco.ms.order(), 1);
        assert_eq!(deco.coordinates, vec![(0, Vec::new())]);
    }

    #[test]
    fn socle_of_symmetric_groups() {
        for (n, expected) in [(3usize, 3usize), (4, 4), (5, 60), (6, 360)] {
            let g = build(&format!("symmetric {n}"));
            assert_eq!(socle(&g).order(), expected, "Sym({n})");
        }
    }

    #[test]
    fn socle_of_affine_semidirect_is_the_translation_part() {
        let g = build("semidirect 2 2 (symmetric 3) [0 1; 1 0], [0 1; 1 1]");
        let s = socle(&g);
        assert_eq!(s.order(), 4);
        // The translation subgroup: elements with trivial acting part are
        // indices 0..4 by the encoding.
        assert_eq!(s.members(), &[0, 1, 2, 3]);
    }

    #[test]
    fn alt4_unique_foot_is_the_klein_subgroup() {
        let g = build("alternating 4");
        let feet = minimal_normal_subgroups(&g);
        assert_eq!(feet.len(), 1);
        assert_eq!(feet[0].order(), 4);
        assert!(matches!(
            classify_foot(&g, &feet[0]).unwrap().kind,
            FootKind::Abelian { p: 2, rank: 2, .. }
        ));
    }

    #[test]
    fn classify_rejects_non_minimal_subgroup() {
        let g = build("cyclic 4");
        let whole = g.subgroup_closure(&[1]);
        assert_eq!(whole.order(), 4);
        assert!(matches!(
            classify_foot(&g, &whole),
            Err(SocleError::NotMinimal { inner_order: 2 })
        ));
    }

    #[test]
    fn nilpotent_socles_sit_inside_the_center() {
        for spec in ["quaternion 8", "dihedral 8", "cyclic 16", "cyclic 27",
                     "product (cyclic 4) (cyclic 2)"] {
            let g = build(spec);
            let s = socle(&g);
            let z = g.center();
            assert!(s.is_subset_of(&z), "{spec}");
        }
    }
}
