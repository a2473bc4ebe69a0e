//! Concrete finite groups as complete multiplication tables over element
//! indices 0..order, with element 0 the identity.
//!
//! Groups come from three constructors: breadth-first closure of permutation
//! generators, componentwise tables (direct products, generalized quaternion
//! normal forms), and the semidirect builder for H acting on (F_p)^n. The
//! closure records a parent/generator word for every element, which lets the
//! full table be filled by dynamic programming (x_i * x_j = (x_i * parent_j) *
//! gen_j) with only |G| * #gens hash lookups.

use std::collections::HashMap;

use thiserror::Error;

use crate::dsl::GroupSpec;
use crate::fpmat::FpMat;
use crate::perm::Permutation;

pub const DEFAULT_MAX_ORDER: usize = 20000;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("closure exceeds the order cap {limit}")]
    OrderLimit { limit: usize },
    #[error("element index {index} out of range for order {order}")]
    BadIndex { index: u32, order: usize },
    #[error("bad generator: {0}")]
    BadGenerator(String),
    #[error("semidirect action: expected {expected} matrices (one per generator of H), got {got}")]
    MatrixCount { expected: usize, got: usize },
    #[error("semidirect action is not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("group table inconsistent: {0}")]
    Inconsistent(String),
}

/// A subgroup of a fixed parent group, stored as a sorted member list plus a
/// membership mask over the parent's indices.
#[derive(Debug, Clone)]
pub struct Subgroup {
    members: Vec<u32>,
    mask: Vec<bool>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Subgroup {}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.members.hash(state);
    }
}

impl Subgroup {
    pub fn from_members(parent_order: usize, mut members: Vec<u32>) -> Self {
        members.sort_unstable();
        members.dedup();
        let mut mask = vec![false; parent_order];
        for &m in &members {
            mask[m as usize] = true;
        }
        Subgroup { members, mask }
    }

    pub fn trivial(parent_order: usize) -> Self {
        Subgroup::from_members(parent_order, vec![0])
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn parent_order(&self) -> usize {
        self.mask.len()
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn contains(&self, x: u32) -> bool {
        self.mask[x as usize]
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }
}

/// Conjugacy classes in discovery order by least member; members sorted.
#[derive(Debug, Clone)]
pub struct ConjugacyClasses {
    pub classes: Vec<Vec<u32>>,
    pub class_of: Vec<u32>,
}

impl ConjugacyClasses {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn representative(&self, c: usize) -> u32 {
        self.classes[c][0]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.len()).collect()
    }

    pub fn class_of(&self, x: u32) -> usize {
        self.class_of[x as usize] as usize
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec<u32>> {
        self.classes.iter()
    }
}

#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    generators: Vec<u32>,
    labels: Vec<String>,
    perms: Option<Vec<Permutation>>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup(order {}, {} generators)", self.order, self.generators.len())
    }
}

pub struct GroupBuild {
    pub group: FiniteGroup,
    pub notes: Vec<String>,
}

/// Anything that can seed a Cayley-table closure.
pub(crate) trait CayleyElement: Clone + Eq + std::hash::Hash {
    fn compose(&self, other: &Self) -> Self;
    fn label(&self) -> String;
}

impl CayleyElement for Permutation {
    fn compose(&self, other: &Self) -> Self {
        Permutation::compose(self, other)
    }

    fn label(&self) -> String {
        self.cycle_notation()
    }
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    /// g x g^-1.
    #[inline]
    pub fn conj(&self, g: u32, x: u32) -> u32 {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn label(&self, x: u32) -> &str {
        &self.labels[x as usize]
    }

    pub fn perm(&self, x: u32) -> Option<&Permutation> {
        self.perms.as_ref().map(|ps| &ps[x as usize])
    }

    pub fn element_order(&self, x: u32) -> usize {
        let mut acc = x;
        let mut n = 1;
        while acc != 0 {
            acc = self.mul(acc, x);
            n += 1;
        }
        n
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order as u32;
        (0..n).all(|a| (a..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn center(&self) -> Subgroup {
        let n = self.order as u32;
        let members =
            (0..n).filter(|&x| self.generators.iter().all(|&g| self.mul(x, g) == self.mul(g, x)));
        Subgroup::from_members(self.order, members.collect())
    }

    /// The conjugation x -> g x g^-1 as an index map.
    pub fn conjugation_map(&self, g: u32) -> Vec<u32> {
        (0..self.order as u32).map(|x| self.conj(g, x)).collect()
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup {
            order: 1,
            mul: vec![0],
            inv: vec![0],
            generators: Vec::new(),
            labels: vec!["e".into()],
            perms: None,
        }
    }

    /// Smallest subgroup containing the seed. Processes only products with at
    /// least one factor past the already-closed watermark per round.
    pub fn subgroup_closure(&self, seed: &[u32]) -> Subgroup {
        let mut mask = vec![false; self.order];
        let mut list: Vec<u32> = vec![0];
        mask[0] = true;
        for &s in seed {
            if !mask[s as usize] {
                mask[s as usize] = true;
                list.push(s);
            }
        }
        let mut done = 1; // products within the first `done` elements are closed
        while done < list.len() {
            let n = list.len();
            for i in 0..n {
                let lo = if i < done { done } else { 0 };
                for j in lo..n {
                    let p = self.mul(list[i], list[j]);
                    if !mask[p as usize] {
                        mask[p as usize] = true;
                        list.push(p);
                    }
                    let q = self.mul(list[j], list[i]);
                    if !mask[q as usize] {
                        mask[q as usize] = true;
                        list.push(q);
                    }
                }
            }
            done = n;
        }
        Subgroup::from_members(self.order, list)
    }

    /// Orbit of the seed under conjugation by the whole group.
    pub fn conjugation_closure(&self, seed: &[u32]) -> Vec<u32> {
        let maps = self.generator_conjugation_maps();
        orbit_closure(self.order, seed, &maps)
    }

    /// Smallest normal subgroup containing the seed: close the seed under
    /// conjugation first, then under products (products of class unions stay
    /// conjugation-closed, so one pass of each suffices).
    pub fn normal_closure(&self, seed: &[u32]) -> Subgroup {
        self.subgroup_closure(&self.conjugation_closure(seed))
    }

    /// Conjugation maps for each generator and each inverse generator.
    pub fn generator_conjugation_maps(&self) -> Vec<Vec<u32>> {
        let mut maps = Vec::new();
        for &g in &self.generators {
            maps.push(self.conjugation_map(g));
            if self.inv(g) != g {
                maps.push(self.conjugation_map(self.inv(g)));
            }
        }
        if maps.is_empty() {
            maps.push((0..self.order as u32).collect());
        }
        maps
    }

    pub fn conjugacy_classes(&self) -> ConjugacyClasses {
        let maps = self.generator_conjugation_maps();
        let n = self.order;
        let mut class_of = vec![u32::MAX; n];
        let mut classes = Vec::new();
        for x in 0..n as u32 {
            if class_of[x as usize] != u32::MAX {
                continue;
            }
            let members = orbit_closure(n, &[x], &maps);
            let c = classes.len() as u32;
            for &m in &members {
                class_of[m as usize] = c;
            }
            classes.push(members);
        }
        ConjugacyClasses { classes, class_of }
    }

    /// For each element, the (parent, generator-element) pair discovered by a
    /// breadth-first walk of the table from the generators; None for the
    /// identity. parent < child in index order whenever indices came from the
    /// closure constructor.
    pub fn bfs_words(&self) -> Result<Vec<Option<(u32, u32)>>, GroupError> {
        let n = self.order;
        let mut prov: Vec<Option<(u32, u32)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = vec![0u32];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for &g in &self.generators {
                let y = self.mul(x, g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    prov[y as usize] = Some((x, g));
                    queue.push(y);
                }
            }
        }
        if queue.len() != n {
            return Err(GroupError::Inconsistent(format!(
                "generators reach only {} of {} elements",
                queue.len(),
                n
            )));
        }
        Ok(prov)
    }

    /// Extracts a subgroup as a standalone group; returns it with the map from
    /// new indices back to parent indices. Generators are chosen greedily by
    /// index order.
    pub fn subgroup_group(&self, sub: &Subgroup) -> (FiniteGroup, Vec<u32>) {
        let members = sub.members().to_vec();
        debug_assert_eq!(members.first(), Some(&0), "subgroups contain the identity");
        let mut new_of = vec![u32::MAX; self.order];
        for (i, &m) in members.iter().enumerate() {
            new_of[m as usize] = i as u32;
        }
        let k = members.len();
        let mut mul = vec![0u32; k * k];
        for i in 0..k {
            for j in 0..k {
                let p = self.mul(members[i], members[j]);
                let np = new_of[p as usize];
                assert_ne!(np, u32::MAX, "subgroup not closed under products");
                mul[i * k + j] = np;
            }
        }
        // Greedy generating set in index order: one closure per added
        // generator, logarithmically many additions.
        let mut gens_parent: Vec<u32> = Vec::new();
        let mut closure_now = Subgroup::trivial(self.order);
        while closure_now.order() < k {
            let &m = members
                .iter()
                .find(|&&m| !closure_now.contains(m))
                .expect("incomplete closure is missing some member");
            gens_parent.push(m);
            closure_now = self.subgroup_closure(&gens_parent);
        }
        let generators: Vec<u32> = gens_parent.iter().map(|&g| new_of[g as usize]).collect();
        let labels = members.iter().map(|&m| self.labels[m as usize].clone()).collect();
        let perms = self
            .perms
            .as_ref()
            .map(|ps| members.iter().map(|&m| ps[m as usize].clone()).collect());
        let group = FiniteGroup::from_parts(mul, generators, labels, perms)
            .expect("subgroup table is consistent");
        (group, members)
    }

    /// Builds from a complete multiplication table; computes inverses and
    /// validates the identity laws.
    fn from_parts(
        mul: Vec<u32>,
        generators: Vec<u32>,
        labels: Vec<String>,
        perms: Option<Vec<Permutation>>,
    ) -> Result<FiniteGroup, GroupError> {
        let order = labels.len();
        assert_eq!(mul.len(), order * order);
        let mut inv = vec![u32::MAX; order];
        for i in 0..order {
            if mul[i * order] != i as u32 || mul[i] != i as u32 {
                return Err(GroupError::Inconsistent(format!(
                    "element 0 is not a two-sided identity at {i}"
                )));
            }
            for j in 0..order {
                if mul[i * order + j] == 0 {
                    if mul[j * order + i] != 0 {
                        return Err(GroupError::Inconsistent(format!(
                            "one-sided inverse at ({i}, {j})"
                        )));
                    }
                    inv[i] = j as u32;
                    break;
                }
            }
            if inv[i] == u32::MAX {
                return Err(GroupError::Inconsistent(format!("element {i} has no inverse")));
            }
        }
        Ok(FiniteGroup { order, mul, inv, generators, labels, perms })
    }

    /// Closure of concrete generators under composition, breadth first, then
    /// the table via word provenance.
    fn from_closure<E: CayleyElement>(
        identity: E,
        gens: &[E],
        max_order: usize,
        keep_perms: bool,
        to_perm: impl Fn(&E) -> Option<Permutation>,
    ) -> Result<FiniteGroup, GroupError> {
        let mut elements: Vec<E> = vec![identity.clone()];
        let mut index: HashMap<E, u32> = HashMap::new();
        index.insert(identity, 0);
        // provenance[j] = (parent, generator slot) for j > 0
        let mut prov: Vec<(u32, usize)> = vec![(0, usize::MAX)];
        let mut head = 0;
        while head < elements.len() {
            for (slot, g) in gens.iter().enumerate() {
                let next = elements[head].compose(g);
                if !index.contains_key(&next) {
                    if elements.len() >= max_order {
                        return Err(GroupError::OrderLimit { limit: max_order });
                    }
                    index.insert(next.clone(), elements.len() as u32);
                    prov.push((head as u32, slot));
                    elements.push(next);
                }
            }
            head += 1;
        }
        let n = elements.len();
        let gen_elem: Vec<u32> = gens.iter().map(|g| index[g]).collect();
        let mut mul = vec![u32::MAX; n * n];
        let mut col_filled = vec![false; n];
        for i in 0..n {
            mul[i * n] = i as u32; // x * e = x
        }
        col_filled[0] = true;
        for (slot, &c) in gen_elem.iter().enumerate() {
            if col_filled[c as usize] {
                continue;
            }
            for (i, e) in elements.iter().enumerate() {
                mul[i * n + c as usize] = index[&e.compose(&gens[slot])];
            }
            col_filled[c as usize] = true;
        }
        for j in 1..n {
            if col_filled[j] {
                continue;
            }
            let (p, slot) = prov[j];
            let c = gen_elem[slot] as usize;
            for i in 0..n {
                let ip = mul[i * n + p as usize] as usize;
                mul[i * n + j] = mul[ip * n + c];
            }
            col_filled[j] = true;
        }
        let labels = elements.iter().map(|e| e.label()).collect();
        let perms = if keep_perms {
            let ps: Option<Vec<Permutation>> = elements.iter().map(|e| to_perm(e)).collect();
            ps
        } else {
            None
        };
        let mut gen_list = Vec::new();
        for g in gen_elem {
            if !gen_list.contains(&g) {
                gen_list.push(g);
            }
        }
        FiniteGroup::from_parts(mul, gen_list, labels, perms)
    }

    pub fn from_permutations(gens: &[Permutation], max_order: usize) -> Result<Self, GroupError> {
        let degree = gens.first().map_or(1, |g| g.degree());
        if let Some(bad) = gens.iter().find(|g| g.degree() != degree) {
            return Err(GroupError::BadGenerator(format!(
                "mixed degrees {} and {}",
                degree,
                bad.degree()
            )));
        }
        FiniteGroup::from_closure(Permutation::identity(degree), gens, max_order, true, |p| {
            Some(p.clone())
        })
    }

    /// Identity, inverses, sampled associativity, and generation. Quadratic
    /// in the order; associativity is exhaustive only for tiny groups.
    pub fn check_consistency(&self) -> Result<(), GroupError> {
        let n = self.order;
        for i in 0..n as u32 {
            if self.mul(0, i) != i || self.mul(i, 0) != i {
                return Err(GroupError::Inconsistent("identity law fails".into()));
            }
            if self.mul(i, self.inv(i)) != 0 || self.mul(self.inv(i), i) != 0 {
                return Err(GroupError::Inconsistent("inverse law fails".into()));
            }
        }
        // Latin square: each row is a permutation of the indices.
        let mut seen = vec![0u32; n];
        for i in 0..n {
            for j in 0..n {
                seen[self.mul[i * n + j] as usize] = i as u32 + 1;
            }
            if seen.iter().any(|&s| s != i as u32 + 1) {
                return Err(GroupError::Inconsistent(format!("row {i} is not a permutation")));
            }
        }
        let check = |a: u32, b: u32, c: u32| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if n <= 64 {
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    for c in 0..n as u32 {
                        if !check(a, b, c) {
                            return Err(GroupError::Inconsistent(format!(
                                "associativity fails at ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        } else {
            // Deterministic low-discrepancy triple sample.
            let mut state = 0x9E3779B97F4A7C15u64;
            for _ in 0..100_000 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a = (state >> 33) as u32 % n as u32;
                let b = (state >> 13) as u32 % n as u32;
                let c = state as u32 % n as u32;
                if !check(a, b, c) {
                    return Err(GroupError::Inconsistent(format!(
                        "associativity fails at ({a}, {b}, {c})"
                    )));
                }
            }
        }
        let gen_closure = self.subgroup_closure(&self.generators.clone());
        if gen_closure.order() != n {
            return Err(GroupError::Inconsistent(format!(
                "generators span only {} of {} elements",
                gen_closure.order(),
                n
            )));
        }
        Ok(())
    }
}

/// Closure of a seed set under a list of index maps (orbit of a set).
pub fn orbit_closure(order: usize, seed: &[u32], maps: &[Vec<u32>]) -> Vec<u32> {
    let mut mask = vec![false; order];
    let mut list = Vec::new();
    for &s in seed {
        if !mask[s as usize] {
            mask[s as usize] = true;
            list.push(s);
        }
    }
    let mut head = 0;
    while head < list.len() {
        let x = list[head];
        head += 1;
        for m in maps {
            let y = m[x as usize];
            if !mask[y as usize] {
                mask[y as usize] = true;
                list.push(y);
            }
        }
    }
    list.sort_unstable();
    list
}

pub fn direct_product(
    a: &FiniteGroup,
    b: &FiniteGroup,
    max_order: usize,
) -> Result<FiniteGroup, GroupError> {
    let (na, nb) = (a.order(), b.order());
    if na.saturating_mul(nb) > max_order {
        return Err(GroupError::OrderLimit { limit: max_order });
    }
    let n = na * nb;
    let mut mul = vec![0u32; n * n];
    for a1 in 0..na {
        for b1 in 0..nb {
            let i = a1 * nb + b1;
            for a2 in 0..na {
                let pa = a.mul(a1 as u32, a2 as u32) as usize * nb;
                let row = i * n;
                let col = a2 * nb;
                for b2 in 0..nb {
                    mul[row + col + b2] = (pa + b.mul(b1 as u32, b2 as u32) as usize) as u32;
                }
            }
        }
    }
    let mut generators = Vec::new();
    for &ga in a.generators() {
        generators.push(ga * nb as u32);
    }
    for &gb in b.generators() {
        if !generators.contains(&gb) {
            generators.push(gb);
        }
    }
    let mut labels = Vec::with_capacity(n);
    for a1 in 0..na {
        for b1 in 0..nb {
            labels.push(format!("({},{})", a.label(a1 as u32), b.label(b1 as u32)));
        }
    }
    let perms = match (&a.perms, &b.perms) {
        (Some(pa), Some(pb)) => {
            let da = pa[0].degree();
            let db = pb[0].degree();
            let mut out = Vec::with_capacity(n);
            for a1 in 0..na {
                for b1 in 0..nb {
                    let mut images: Vec<usize> = (0..da + db).collect();
                    for pt in 0..da {
                        images[pt] = pa[a1].apply(pt);
                    }
                    for pt in 0..db {
                        images[da + pt] = da + pb[b1].apply(pt);
                    }
                    out.push(Permutation::from_images(images).expect("valid by construction"));
                }
            }
            Some(out)
        }
        _ => None,
    };
    FiniteGroup::from_parts(mul, generators, labels, perms)
}

pub struct SemidirectBuild {
    pub group: FiniteGroup,
    pub action_faithful: bool,
}

/// H acting on U = (F_p)^n by the given generator matrices. Element (v, h)
/// has index h * p^n + digits(v) and (v1,h1)(v2,h2) = (v1 + phi(h1) v2, h1 h2).
pub fn semidirect_product(
    p: u64,
    n: usize,
    h: &FiniteGroup,
    mats: &[FpMat],
    max_order: usize,
) -> Result<SemidirectBuild, GroupError> {
    if mats.len() != h.generators().len() {
        return Err(GroupError::MatrixCount { expected: h.generators().len(), got: mats.len() });
    }
    for m in mats {
        if m.rows() != n || m.cols() != n || m.modulus() != p {
            return Err(GroupError::BadGenerator(format!(
                "action matrix is {}x{} mod {}, expected {n}x{n} mod {p}",
                m.rows(),
                m.cols(),
                m.modulus()
            )));
        }
        if !m.is_invertible() {
            return Err(GroupError::BadGenerator("action matrix is singular".into()));
        }
    }
    let mut pn = 1usize;
    for _ in 0..n {
        pn = pn.saturating_mul(p as usize);
        if pn > max_order {
            return Err(GroupError::OrderLimit { limit: max_order });
        }
    }
    let total = pn.saturating_mul(h.order());
    if total > max_order {
        return Err(GroupError::OrderLimit { limit: max_order });
    }

    // Extend the generator matrices to all of H along BFS words, then check
    // the extension is a homomorphism on every pair.
    let words = h.bfs_words()?;
    let gen_slot: HashMap<u32, usize> =
        h.generators().iter().enumerate().map(|(s, &g)| (g, s)).collect();
    let mut phi: Vec<Option<FpMat>> = vec![None; h.order()];
    phi[0] = Some(FpMat::identity(p, n));
    let mut pending: Vec<u32> = (1..h.order() as u32).collect();
    while !pending.is_empty() {
        let before = pending.len();
        pending.retain(|&x| {
            let (parent, gen) = words[x as usize].expect("non-identity has a word");
            if let Some(pm) = phi[parent as usize].clone() {
                let gm = &mats[gen_slot[&gen]];
                phi[x as usize] = Some(pm.mul(gm));
                false
            } else {
                true
            }
        });
        assert!(pending.len() < before, "BFS words form a DAG rooted at the identity");
    }
    let phi: Vec<FpMat> = phi.into_iter().map(|m| m.expect("filled above")).collect();
    for h1 in 0..h.order() as u32 {
        for h2 in 0..h.order() as u32 {
            if phi[h1 as usize].mul(&phi[h2 as usize]) != phi[h.mul(h1, h2) as usize] {
                return Err(GroupError::NotAHomomorphism(format!(
                    "phi({}) phi({}) != phi({} {})",
                    h.label(h1),
                    h.label(h2),
                    h.label(h1),
                    h.label(h2)
                )));
            }
        }
    }
    let mut seen_mats: HashMap<&FpMat, u32> = HashMap::new();
    for (idx, m) in phi.iter().enumerate() {
        seen_mats.entry(m).or_insert(idx as u32);
    }
    let action_faithful = seen_mats.len() == h.order();

    let enc = |v: &[u64]| -> usize {
        let mut idx = 0usize;
        for &d in v.iter().rev() {
            idx = idx * p as usize + d as usize;
        }
        idx
    };
    let dec = |mut idx: usize| -> Vec<u64> {
        let mut v = vec![0u64; n];
        for d in v.iter_mut() {
            *d = (idx % p as usize) as u64;
            idx /= p as usize;
        }
        v
    };

    let order = total;
    let mut mul = vec![0u32; order * order];
    let vecs: Vec<Vec<u64>> = (0..pn).map(dec).collect();
    // Precompute phi(h) applied to every vector index.
    let mut phi_apply = vec![0u32; h.order() * pn];
    for hh in 0..h.order() {
        for (vi, v) in vecs.iter().enumerate() {
            phi_apply[hh * pn + vi] = enc(&phi[hh].mat_vec(v)) as u32;
        }
    }
    for h1 in 0..h.order() {
        for v1 in 0..pn {
            let i = h1 * pn + v1;
            let row = i * order;
            for h2 in 0..h.order() {
                let h12 = h.mul(h1 as u32, h2 as u32) as usize;
                let col = h2 * pn;
                for v2 in 0..pn {
                    let tv = phi_apply[h1 * pn + v2] as usize;
                    let sum = add_vec_index(&vecs[v1], &vecs[tv], p);
                    mul[row + col + v2] = (h12 * pn + sum) as u32;
                }
            }
        }
    }
    let mut generators: Vec<u32> = Vec::new();
    let mut powp = 1usize;
    for _ in 0..n {
        generators.push(powp as u32);
        powp *= p as usize;
    }
    for &gh in h.generators() {
        generators.push((gh as usize * pn) as u32);
    }
    let mut labels = Vec::with_capacity(order);
    for hh in 0..h.order() {
        for v in 0..pn {
            let digits =
                vecs[v].iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
            labels.push(format!("({digits})|{}", h.label(hh as u32)));
        }
    }
    let group = FiniteGroup::from_parts(mul, generators, labels, None)?;
    Ok(SemidirectBuild { group, action_faithful })
}

fn add_vec_index(a: &[u64], b: &[u64], p: u64) -> usize {
    let mut idx = 0usize;
    for i in (0..a.len()).rev() {
        idx = idx * p as usize + ((a[i] + b[i]) % p) as usize;
    }
    idx
}

fn quaternion_group(order: u64) -> FiniteGroup {
    // Normal form a^k b^j with a of order 2m, b^2 = a^m, b a b^-1 = a^-1.
    let m = (order / 4) as usize;
    let two_m = 2 * m;
    let n = 4 * m;
    let idx = |k: usize, j: usize| j * two_m + k;
    let mut mul = vec![0u32; n * n];
    for k1 in 0..two_m {
        for j1 in 0..2 {
            for k2 in 0..two_m {
                for j2 in 0..2 {
                    let (k, j) = if j1 == 0 {
                        ((k1 + k2) % two_m, j2)
                    } else if j2 == 0 {
                        ((k1 + two_m - k2 % two_m) % two_m, 1)
                    } else {
                        ((k1 + two_m - k2 % two_m + m) % two_m, 0)
                    };
                    mul[idx(k1, j1) * n + idx(k2, j2)] = idx(k, j) as u32;
                }
            }
        }
    }
    let mut labels = Vec::with_capacity(n);
    for j in 0..2 {
        for k in 0..two_m {
            labels.push(match (k, j) {
                (0, 0) => "e".to_string(),
                (_, 0) => format!("a^{k}"),
                (0, _) => "b".to_string(),
                _ => format!("a^{k} b"),
            });
        }
    }
    let generators = vec![idx(1, 0) as u32, idx(0, 1) as u32];
    FiniteGroup::from_parts(mul, generators, labels, None).expect("normal form is consistent")
}

fn perm_gens_for(spec: &GroupSpec) -> Result<Option<Vec<Permutation>>, GroupError> {
    let cycles = |deg: usize, cs: &[Vec<usize>]| {
        Permutation::from_cycles(deg, cs).map_err(|e| GroupError::BadGenerator(e.to_string()))
    };
    let gens = match spec {
        GroupSpec::Cyclic(n) => {
            let n = *n as usize;
            if n == 1 {
                vec![]
            } else {
                vec![cycles(n, &[(0..n).collect::<Vec<_>>()])?]
            }
        }
        GroupSpec::Dihedral(m) => {
            let m = *m as usize;
            match m {
                2 => vec![cycles(2, &[vec![0, 1]])?],
                4 => vec![cycles(4, &[vec![0, 1]])?, cycles(4, &[vec![2, 3]])?],
                _ => {
                    let k = m / 2;
                    let rot = cycles(k, &[(0..k).collect::<Vec<_>>()])?;
                    let mut refl_cycles = Vec::new();
                    for j in 1..=(k - 1) / 2 {
                        refl_cycles.push(vec![j, k - j]);
                    }
                    vec![rot, cycles(k, &refl_cycles)?]
                }
            }
        }
        GroupSpec::Symmetric(n) => {
            let n = *n as usize;
            match n {
                1 => vec![],
                2 => vec![cycles(2, &[vec![0, 1]])?],
                _ => vec![cycles(n, &[vec![0, 1]])?, cycles(n, &[(0..n).collect::<Vec<_>>()])?],
            }
        }
        GroupSpec::Alternating(n) => {
            let n = *n as usize;
            match n {
                1 | 2 => vec![],
                3 => vec![cycles(3, &[vec![0, 1, 2]])?],
                _ => {
                    let three = cycles(n, &[vec![0, 1, 2]])?;
                    let long = if n % 2 == 1 {
                        cycles(n, &[(0..n).collect::<Vec<_>>()])?
                    } else {
                        cycles(n, &[(1..n).collect::<Vec<_>>()])?
                    };
                    vec![three, long]
                }
            }
        }
        GroupSpec::ElemAbelian(p, n) => {
            let (p, n) = (*p as usize, *n as usize);
            let deg = p * n;
            (0..n)
                .map(|i| cycles(deg, &[(i * p..(i + 1) * p).collect::<Vec<_>>()]))
                .collect::<Result<Vec<_>, _>>()?
        }
        GroupSpec::Perm { degree, gens } => gens
            .iter()
            .map(|cs| cycles(*degree, cs))
            .collect::<Result<Vec<_>, _>>()?,
        _ => return Ok(None),
    };
    Ok(Some(gens))
}

pub fn build_group(spec: &GroupSpec, max_order: usize) -> Result<GroupBuild, GroupError> {
    let mut notes = Vec::new();
    let group = match spec {
        GroupSpec::Quaternion(m) => {
            if *m as usize > max_order {
                return Err(GroupError::OrderLimit { limit: max_order });
            }
            quaternion_group(*m)
        }
        GroupSpec::Product(a, b) => {
            let ga = build_group(a, max_order)?;
            let gb = build_group(b, max_order)?;
            notes.extend(ga.notes);
            notes.extend(gb.notes);
            direct_product(&ga.group, &gb.group, max_order)?
        }
        GroupSpec::Semidirect { p, n, h, mats } => {
            let gh = build_group(h, max_order)?;
            notes.extend(gh.notes);
            let built = semidirect_product(*p, *n, &gh.group, mats, max_order)?;
            if !built.action_faithful {
                notes.push("semidirect action is not faithful".into());
            }
            built.group
        }
        other => {
            let gens = perm_gens_for(other)?.expect("permutation family");
            if gens.is_empty() {
                FiniteGroup::trivial()
            } else {
                FiniteGroup::from_permutations(&gens, max_order)?
            }
        }
    };
    group.check_consistency()?;
    Ok(GroupBuild { group, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_group_spec;

    pub(crate) fn build(text: &str) -> FiniteGroup {
        build_group(&parse_group_spec(text).unwrap(), DEFAULT_MAX_ORDER).unwrap().group
    }

    fn order_histogram(g: &FiniteGroup) -> HashMap<usize, usize> {
        let mut h = HashMap::new();
        for x in 0..g.order() as u32 {
            *h.entry(g.element_order(x)).or_insert(0) += 1;
        }
        h
    }

    /// All permutations of the given degree, generated independently of the
    /// closure machinery (Heap's algorithm).
    fn all_perms(degree: usize) -> Vec<Permutation> {
        let mut items: Vec<usize> = (0..degree).collect();
        let mut out = Vec::new();
        fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Permutation>) {
            if k <= 1 {
                out.push(Permutation::from_images(items.clone()).unwrap());
                return;
            }
            for i in 0..k - 1 {
                heap(k - 1, items, out);
                if k % 2 == 0 {
                    items.swap(i, k - 1);
                } else {
                    items.swap(0, k - 1);
                }
            }
            heap(k - 1, items, out);
        }
        heap(degree, &mut items, &mut out);
        out
    }

    #[test]
    fn sym4_closure_matches_full_permutation_enumeration() {
        let g = build("perm 4: (0 1), (0 1 2 3)");
        assert_eq!(g.order(), 24);
        let mut from_closure: Vec<Permutation> =
            (0..24).map(|i| g.perm(i).unwrap().clone()).collect();
        let mut expected = all_perms(4);
        from_closure.sort();
        expected.sort();
        assert_eq!(from_closure, expected);
    }

    #[test]
    fn family_orders() {
        for (spec, order) in [
            ("cyclic 1", 1),
            ("cyclic 12", 12),
            ("dihedral 2", 2),
            ("dihedral 4", 4),
            ("dihedral 12", 12),
            ("quaternion 8", 8),
            ("quaternion 16", 16),
            ("symmetric 1", 1),
            ("symmetric 2", 2),
            ("symmetric 5", 120),
            ("alternating 2", 1),
            ("alternating 3", 3),
            ("alternating 4", 12),
            ("alternating 6", 360),
            ("elemabelian 2 3", 8),
            ("elemabelian 3 2", 9),
        ] {
            assert_eq!(build(spec).order(), order, "{spec}");
        }
    }

    #[test]
    fn identity_is_element_zero_everywhere() {
        for spec in ["cyclic 6", "dihedral 8", "quaternion 8", "symmetric 4", "elemabelian 2 2"] {
            let g = build(spec);
            for x in 0..g.order() as u32 {
                assert_eq!(g.mul(0, x), x);
                assert_eq!(g.mul(x, 0), x);
            }
        }
    }

    #[test]
    fn subgroup_closure_examples() {
        let s4 = build("symmetric 4");
        assert_eq!(s4.subgroup_closure(&[]).members(), &[0]);
        // The two double transpositions generate the order-4 normal subgroup.
        let dt: Vec<u32> = (0..24)
            .filter(|&i| {
                let p = s4.perm(i).unwrap();
                p.cycle_notation().matches('(').count() == 2 && s4.element_order(i) == 2
            })
            .collect();
        assert_eq!(dt.len(), 3);
        let v = s4.subgroup_closure(&dt[..2]);
        assert_eq!(v.order(), 4);
        let z6 = build("cyclic 6");
        assert_eq!(z6.subgroup_closure(&[2]).members(), &[0, 2, 4]);
    }

    #[test]
    fn normal_closures_in_sym4() {
        let s4 = build("symmetric 4");
        let transposition = (0..24)
            .find(|&i| s4.element_order(i) == 2 && !s4.perm(i).unwrap().is_even())
            .unwrap();
        assert_eq!(s4.normal_closure(&[transposition]).order(), 24);
        let three_cycle = (0..24).find(|&i| s4.element_order(i) == 3).unwrap();
        assert_eq!(s4.normal_closure(&[three_cycle]).order(), 12);
        let double = (0..24)
            .find(|&i| s4.element_order(i) == 2 && s4.perm(i).unwrap().is_even())
            .unwrap();
        assert_eq!(s4.normal_closure(&[double]).order(), 4);
    }

    /// Brute-force classes: conjugate by every element, no generator walk.
    fn classes_by_full_conjugation(g: &FiniteGroup) -> Vec<Vec<u32>> {
        let n = g.order() as u32;
        let mut seen = vec![false; g.order()];
        let mut out = Vec::new();
        for x in 0..n {
            if seen[x as usize] {
                continue;
            }
            let mut class: Vec<u32> = (0..n).map(|c| g.conj(c, x)).collect();
            class.sort_unstable();
            class.dedup();
            for &m in &class {
                seen[m as usize] = true;
            }
            out.push(class);
        }
        out
    }

    #[test]
    fn conjugacy_classes_match_full_conjugation_oracle() {
        for spec in ["symmetric 3", "symmetric 4", "quaternion 8", "dihedral 10", "alternating 5"]
        {
            let g = build(spec);
            let fast = g.conjugacy_classes();
            let slow = classes_by_full_conjugation(&g);
            assert_eq!(fast.classes, slow, "{spec}");
        }
        let s3 = build("symmetric 3");
        assert_eq!(s3.conjugacy_classes().sizes(), vec![1, 3, 2]);
        let s4 = build("symmetric 4");
        let mut sizes = s4.conjugacy_classes().sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 6, 6, 8]);
    }

    #[test]
    fn direct_product_of_coprime_cyclics_is_cyclic() {
        let g = build("product (cyclic 2) (cyclic 3)");
        assert_eq!(g.order(), 6);
        assert!(g.is_abelian());
        assert!((0..6).any(|x| g.element_order(x) == 6));
    }

    #[test]
    fn semidirect_on_plane_matches_sym4_statistics() {
        let g = build("semidirect 2 2 (symmetric 3) [0 1; 1 0], [0 1; 1 1]");
        assert_eq!(g.order(), 24);
        let s4 = build("symmetric 4");
        assert_eq!(order_histogram(&g), order_histogram(&s4));
        assert_eq!(g.conjugacy_classes().len(), s4.conjugacy_classes().len());
    }

    #[test]
    fn semidirect_inversion_action_gives_sym3() {
        // Z/2 acting on F_3 by negation.
        let g = build("semidirect 3 1 (cyclic 2) [2]");
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(order_histogram(&g), order_histogram(&build("symmetric 3")));
    }

    #[test]
    fn semidirect_matrix_count_enforced() {
        let spec = parse_group_spec("semidirect 2 2 (symmetric 3) [0 1; 1 0]").unwrap();
        assert!(matches!(
            build_group(&spec, DEFAULT_MAX_ORDER),
            Err(GroupError::MatrixCount { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn non_homomorphic_semidirect_action_rejected() {
        // Sending both Sym(3) generators to the same order-2 matrix cannot
        // extend: the transposition and the 3-cycle satisfy no common square law.
        let spec = parse_group_spec("semidirect 2 2 (symmetric 3) [0 1; 1 0], [0 1; 1 0]").unwrap();
        assert!(matches!(
            build_group(&spec, DEFAULT_MAX_ORDER),
            Err(GroupError::NotAHomomorphism(_))
        ));
    }

    #[test]
    fn order_cap_respected() {
        let spec = parse_group_spec("symmetric 5").unwrap();
        assert!(matches!(build_group(&spec, 100), Err(GroupError::OrderLimit { limit: 100 })));
    }

    #[test]
    fn quaternion_eight_structure() {
        let q8 = build("quaternion 8");
        let h = order_histogram(&q8);
        assert_eq!(h[&1], 1);
        assert_eq!(h[&2], 1);
        assert_eq!(h[&4], 6);
        assert_eq!(q8.center().order(), 2);
    }

    #[test]
    fn dihedral_six_is_sym3() {
        let d = build("dihedral 6");
        assert_eq!(order_histogram(&d), order_histogram(&build("symmetric 3")));
    }

    #[test]
    fn subgroup_group_extraction() {
        let s4 = build("symmetric 4");
        let alt = s4.normal_closure(&[(0..24).find(|&i| s4.element_order(i) == 3).unwrap()]);
        let (a4, embed) = s4.subgroup_group(&alt);
        assert_eq!(a4.order(), 12);
        a4.check_consistency().unwrap();
        // Embedding respects products.
        for i in 0..12u32 {
            for j in 0..12u32 {
                assert_eq!(embed[a4.mul(i, j) as usize], s4.mul(embed[i as usize], embed[j as usize]));
            }
        }
    }

    #[test]
    fn element_labels_look_like_cycles() {
        let s3 = build("symmetric 3");
        assert_eq!(s3.label(0), "()");
        assert!(s3.label(1).starts_with('('));
    }

    #[test]
    fn bfs_words_cover_group() {
        let g = build("symmetric 4");
        let words = g.bfs_words().unwrap();
        assert!(words[0].is_none());
        for x in 1..24u32 {
            let (p, gen) = words[x as usize].unwrap();
            assert_eq!(g.mul(p, gen), x);
        }
    }
}
