//! The abelian minisocle as a family of vector spaces over prime fields.
//!
//! MA splits as a direct sum of elementary abelian p-groups of pairwise
//! coprime orders, one per prime p dividing |MA|. Each summand V_p is a vector
//! space over F_p on which the ambient group acts by conjugation through
//! invertible matrices. The generation questions about conjugacy classes and
//! characters of MA translate into orbit-span questions about these modules
//! and their duals.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fpmat::{inv_mod, FpMat};
use crate::group::FiniteGroup;
use crate::socle::{FootKind, GroupMaps, InnerAction, MinisocleDecomposition};

#[derive(Debug, Error)]
pub enum ModuleError {
    #[error("module construction inconsistency: {0}")]
    Inconsistent(String),
}

/// The p-part of MA with the conjugation action expressed on a fixed basis.
///
/// `basis` lists parent-group elements whose cosets form an F_p-basis; the
/// carrier is the full subgroup they generate (all p^dim products). Action
/// matrices are indexed like the generating maps of the action that built the
/// module, with column j holding the coordinates of the image of basis j.
#[derive(Debug, Clone)]
pub struct FpModule {
    pub p: u64,
    pub dim: usize,
    pub basis: Vec<u32>,
    pub action: Vec<FpMat>,
    /// Half-open `basis` ranges owned by each participating foot.
    pub foot_blocks: Vec<(usize, usize)>,
    /// Positions within the decomposition's summand list, parallel to
    /// `foot_blocks`.
    pub summand_positions: Vec<usize>,
    /// All carried elements, sorted by index.
    pub carrier: Vec<u32>,
    coords: Vec<(u32, Vec<u64>)>,
    by_vec: Vec<u32>,
}

impl FpModule {
    pub fn coords_of(&self, x: u32) -> Option<&[u64]> {
        self.coords
            .binary_search_by_key(&x, |&(e, _)| e)
            .ok()
            .map(|i| self.coords[i].1.as_slice())
    }

    pub fn element_of(&self, v: &[u64]) -> u32 {
        self.by_vec[self.rank_of_vec(v)]
    }

    fn rank_of_vec(&self, v: &[u64]) -> usize {
        let mut r = 0usize;
        for &c in v {
            r = r * self.p as usize + c as usize;
        }
        r
    }

    fn vec_of_rank(&self, mut r: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.dim];
        for i in (0..self.dim).rev() {
            v[i] = (r % self.p as usize) as u64;
            r /= self.p as usize;
        }
        v
    }

    /// Coordinates of the p-part of an MS element: the product of its
    /// components in this module's summands.
    pub fn ms_coords(&self, g: &FiniteGroup, deco: &MinisocleDecomposition, x: u32) -> Option<Vec<u64>> {
        let comps = deco.coordinates_of(x)?;
        let mut part = 0u32;
        for &pos in &self.summand_positions {
            part = g.mul(part, comps[pos]);
        }
        self.coords_of(part).map(|c| c.to_vec())
    }

    /// The matrix of conjugation by an arbitrary group element, for tests and
    /// cross-checks; the stored `action` covers only the generating maps.
    pub fn conjugation_matrix(&self, g: &FiniteGroup, elem: u32) -> Option<FpMat> {
        let mut m = FpMat::zero(self.p, self.dim, self.dim);
        for j in 0..self.dim {
            let img = g.conj(elem, self.basis[j]);
            let vc = self.coords_of(img)?;
            for i in 0..self.dim {
                m.set(i, j, vc[i]);
            }
        }
        Some(m)
    }
}

pub fn ma_fp_modules(
    g: &FiniteGroup,
    deco: &MinisocleDecomposition,
) -> Result<Vec<FpModule>, ModuleError> {
    let inner = InnerAction::new(g);
    ma_fp_modules_with_maps(g, deco, &inner)
}

/// One module per prime dividing |MA|, under an arbitrary action given by its
/// generating maps (conjugation for the plain criterion, a full automorphism
/// group for the G-variant). Construction validates invertibility and exact
/// linearity of every action matrix on every carried element, which together
/// force the generator assignment to extend to a homomorphism.
pub fn ma_fp_modules_with_maps(
    g: &FiniteGroup,
    deco: &MinisocleDecomposition,
    action: &dyn GroupMaps,
) -> Result<Vec<FpModule>, ModuleError> {
    let mut primes: Vec<u64> = Vec::new();
    for &fi in &deco.ma_summands {
        if let FootKind::Abelian { p, .. } = deco.feet[fi].kind {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.sort_unstable();

    let maps = action.generator_maps();
    let mut out = Vec::new();
    for &p in &primes {
        let mut basis: Vec<u32> = Vec::new();
        let mut foot_blocks = Vec::new();
        let mut summand_positions = Vec::new();
        for (pos, &fi) in deco.ma_summands.iter().enumerate() {
            if let FootKind::Abelian { p: fp, basis: fb, .. } = &deco.feet[fi].kind {
                if *fp == p {
                    let start = basis.len();
                    basis.extend_from_slice(fb);
                    foot_blocks.push((start, basis.len()));
                    summand_positions.push(pos);
                }
            }
        }
        let dim = basis.len();

        let mut total = 1usize;
        for _ in 0..dim {
            total = total.checked_mul(p as usize).filter(|&t| t <= g.order()).ok_or_else(
                || ModuleError::Inconsistent(format!("p^dim exceeds group order for p={p}")),
            )?;
        }

        // Enumerate the carrier: every coordinate vector names the product of
        // basis powers, and those products must be pairwise distinct.
        let mut by_vec = vec![0u32; total];
        let mut coords: Vec<(u32, Vec<u64>)> = Vec::with_capacity(total);
        let mut module = FpModule {
            p,
            dim,
            basis,
            action: Vec::new(),
            foot_blocks,
            summand_positions,
            carrier: Vec::new(),
            coords: Vec::new(),
            by_vec: Vec::new(),
        };
        for r in 0..total {
            let v = module.vec_of_rank(r);
            let mut elem = 0u32;
            for (i, &b) in module.basis.iter().enumerate() {
                for _ in 0..v[i] {
                    elem = g.mul(elem, b);
                }
            }
            by_vec[r] = elem;
            coords.push((elem, v));
        }
        coords.sort_by_key(|&(e, _)| e);
        if coords.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(ModuleError::Inconsistent(format!(
                "basis products collide in the p={p} part"
            )));
        }
        module.carrier = coords.iter().map(|&(e, _)| e).collect();
        module.coords = coords;
        module.by_vec = by_vec;

        for map in maps {
            let mut m = FpMat::zero(p, dim, dim);
            for j in 0..dim {
                let img = map[module.basis[j] as usize];
                let vc = module.coords_of(img).ok_or_else(|| {
                    ModuleError::Inconsistent(format!(
                        "action does not preserve the p={p} part"
                    ))
                })?;
                for i in 0..dim {
                    m.set(i, j, vc[i]);
                }
            }
            if !m.is_invertible() {
                return Err(ModuleError::Inconsistent(format!(
                    "singular action matrix on the p={p} part"
                )));
            }
            for (x, vx) in &module.coords {
                let img = map[*x as usize];
                let want = module.coords_of(img).ok_or_else(|| {
                    ModuleError::Inconsistent(format!(
                        "action does not preserve the p={p} part"
                    ))
                })?;
                if m.mat_vec(vx) != want {
                    return Err(ModuleError::Inconsistent(format!(
                        "action is not linear on the p={p} part"
                    )));
                }
            }
            module.action.push(m);
        }
        out.push(module);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct OrbitCheck {
    pub p: u64,
    pub dim: usize,
    /// Some vector's orbit under the action spans the whole space.
    pub primal: bool,
    /// Same question for the dual (inverse-transpose) action.
    pub dual: bool,
    /// True when the vector searches sampled instead of enumerating
    /// exhaustively; a negative answer is then not a proof of absence.
    pub sampled: bool,
    pub primal_witness: Option<Vec<u64>>,
    pub dual_witness: Option<Vec<u64>>,
}

struct Echelon {
    p: u64,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new(p: u64) -> Self {
        Echelon { p, rows: Vec::new(), pivots: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces v against the basis; inserts and reports true if independent.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            if v[piv] != 0 {
                let c = v[piv];
                for j in 0..v.len() {
                    v[j] = (v[j] + (self.p - c) * row[j]) % self.p;
                }
            }
        }
        match v.iter().position(|&c| c != 0) {
            Some(piv) => {
                let inv = inv_mod(v[piv], self.p);
                for c in v.iter_mut() {
                    *c = *c * inv % self.p;
                }
                self.rows.push(v);
                self.pivots.push(piv);
                true
            }
            None => false,
        }
    }
}

/// Does the orbit of v under the matrices span the whole space? Computes the
/// smallest invariant subspace containing v by breadth-first saturation.
pub fn orbit_spans_space(mats: &[FpMat], p: u64, dim: usize, v: &[u64]) -> bool {
    if dim == 0 {
        return true;
    }
    let mut ech = Echelon::new(p);
    if !ech.insert(v.to_vec()) {
        return false;
    }
    let mut queue: Vec<Vec<u64>> = vec![v.to_vec()];
    let mut head = 0;
    while head < queue.len() && ech.rank() < dim {
        let w = queue[head].clone();
        head += 1;
        for m in mats {
            let img = m.mat_vec(&w);
            if ech.insert(img.clone()) {
                queue.push(img);
                if ech.rank() == dim {
                    break;
                }
            }
        }
    }
    ech.rank() == dim
}

fn search_generating_vector(
    mats: &[FpMat],
    p: u64,
    dim: usize,
    foot_blocks: &[(usize, usize)],
    cap: usize,
    samples: usize,
    seed: u64,
) -> (Option<Vec<u64>>, bool) {
    if dim == 0 {
        return (Some(Vec::new()), false);
    }
    let mut total = 1usize;
    let mut exhaustive = true;
    for _ in 0..dim {
        match total.checked_mul(p as usize) {
            Some(t) if t <= cap => total = t,
            _ => {
                exhaustive = false;
                break;
            }
        }
    }
    if exhaustive {
        // Lexicographic order over all nonzero vectors.
        for r in 1..total {
            let mut rr = r;
            let mut v = vec![0u64; dim];
            for i in (0..dim).rev() {
                v[i] = (rr % p as usize) as u64;
                rr /= p as usize;
            }
            if orbit_spans_space(mats, p, dim, &v) {
                return (Some(v), false);
            }
        }
        return (None, false);
    }

    // Sampled regime: all vectors supported on a single foot, then a fixed
    // budget of seeded random vectors. Failure here is inconclusive.
    for &(s, e) in foot_blocks {
        let w = e - s;
        let mut local = 1usize;
        let mut fits = true;
        for _ in 0..w {
            match local.checked_mul(p as usize) {
                Some(t) if t <= cap => local = t,
                _ => {
                    fits = false;
                    break;
                }
            }
        }
        if !fits {
            continue;
        }
        for r in 1..local {
            let mut rr = r;
            let mut v = vec![0u64; dim];
            for i in (0..w).rev() {
                v[s + i] = (rr % p as usize) as u64;
                rr /= p as usize;
            }
            if orbit_spans_space(mats, p, dim, &v) {
                return (Some(v), true);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let v: Vec<u64> = (0..dim).map(|_| rng.random_range(0..p)).collect();
        if v.iter().all(|&c| c == 0) {
            continue;
        }
        if orbit_spans_space(mats, p, dim, &v) {
            return (Some(v), true);
        }
    }
    (None, true)
}

pub fn dual_action(mats: &[FpMat]) -> Vec<FpMat> {
    mats.iter()
        .map(|m| m.inverse().expect("action matrices are invertible").transpose())
        .collect()
}

/// The two generation questions of the module: does some vector's orbit span
/// the space, and does some covector's orbit span the dual? The second is run
/// on the inverse-transpose matrices. Searches are exhaustive up to `cap`
/// vectors, then fall back to one-foot-supported vectors plus seeded random
/// ones and set the `sampled` flag.
pub fn orbit_generation_check(m: &FpModule, cap: usize, samples: usize, seed: u64) -> OrbitCheck {
    raw_orbit_check(&m.action, m.p, m.dim, &m.foot_blocks, cap, samples, seed)
}

pub fn raw_orbit_check(
    mats: &[FpMat],
    p: u64,
    dim: usize,
    foot_blocks: &[(usize, usize)],
    cap: usize,
    samples: usize,
    seed: u64,
) -> OrbitCheck {
    let (pw, s1) = search_generating_vector(mats, p, dim, foot_blocks, cap, samples, seed);
    let duals = dual_action(mats);
    let (dw, s2) = search_generating_vector(&duals, p, dim, foot_blocks, cap, samples, seed);
    OrbitCheck {
        p,
        dim,
        primal: pw.is_some(),
        dual: dw.is_some(),
        sampled: s1 || s2,
        primal_witness: pw,
        dual_witness: dw,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_group_spec;
    use crate::group::build_group;
    use crate::socle::minisocle_decomposition;

    fn modules_for(spec: &str) -> (FiniteGroup, MinisocleDecomposition, Vec<FpModule>) {
        let g = build_group(&parse_group_spec(spec).unwrap(), 20000).unwrap().group;
        let deco = minisocle_decomposition(&g).unwrap();
        let mods = ma_fp_modules(&g, &deco).unwrap();
        (g, deco, mods)
    }

    #[test]
    fn sym4_has_one_mod2_module_of_dim_two() {
        let (_, _, mods) = modules_for("symmetric 4");
        assert_eq!(mods.len(), 1);
        assert_eq!(mods[0].p, 2);
        assert_eq!(mods[0].dim, 2);
        assert_eq!(mods[0].carrier.len(), 4);
        let check = orbit_generation_check(&mods[0], 4096, 10_000, 7);
        assert!(check.primal && check.dual && !check.sampled);
    }

    #[test]
    fn cyclic_six_splits_into_two_one_dimensional_modules() {
        let (_, _, mods) = modules_for("cyclic 6");
        let shapes: Vec<(u64, usize)> = mods.iter().map(|m| (m.p, m.dim)).collect();
        assert_eq!(shapes, vec![(2, 1), (3, 1)]);
        for m in &mods {
            let check = orbit_generation_check(m, 4096, 10_000, 7);
            assert!(check.primal && check.dual);
        }
    }

    #[test]
    fn trivial_ma_yields_no_modules() {
        let (_, _, mods) = modules_for("alternating 5");
        assert!(mods.is_empty());
    }

    #[test]
    fn klein_four_module_has_no_generating_orbit() {
        let (_, _, mods) = modules_for("elemabelian 2 2");
        assert_eq!(mods.len(), 1);
        assert_eq!(mods[0].dim, 2);
        let check = orbit_generation_check(&mods[0], 4096, 10_000, 7);
        assert!(!check.primal && !check.dual && !check.sampled);
        assert!(check.primal_witness.is_none());
    }

    #[test]
    fn coordinates_are_additive_on_the_carrier() {
        for spec in ["symmetric 4", "cyclic 12", "elemabelian 3 2", "dihedral 12"] {
            let (g, _, mods) = modules_for(spec);
            for m in &mods {
                for &x in &m.carrier {
                    for &y in &m.carrier {
                        let vx = m.coords_of(x).unwrap();
                        let vy = m.coords_of(y).unwrap();
                        let sum: Vec<u64> =
                            vx.iter().zip(vy).map(|(a, b)| (a + b) % m.p).collect();
                        assert_eq!(m.coords_of(g.mul(x, y)).unwrap(), &sum[..]);
                    }
                }
            }
        }
    }

    #[test]
    fn element_of_inverts_coords() {
        let (_, _, mods) = modules_for("elemabelian 5 2");
        let m = &mods[0];
        for &x in &m.carrier {
            let v = m.coords_of(x).unwrap().to_vec();
            assert_eq!(m.element_of(&v), x);
        }
    }

    #[test]
    fn conjugation_matrices_multiply_like_the_group() {
        let (g, _, mods) = modules_for("symmetric 4");
        let m = &mods[0];
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let a = rng.random_range(0..g.order() as u32);
            let b = rng.random_range(0..g.order() as u32);
            let ma = m.conjugation_matrix(&g, a).unwrap();
            let mb = m.conjugation_matrix(&g, b).unwrap();
            let mab = m.conjugation_matrix(&g, g.mul(a, b)).unwrap();
            assert_eq!(ma.mul(&mb), mab);
        }
    }

    #[test]
    fn ms_coords_projects_to_the_p_part() {
        let (g, deco, mods) = modules_for("cyclic 6");
        // Every element of MA = Z/6 projects to each prime part; the
        // projections rebuild the element.
        for &(x, _) in deco.coordinates.iter() {
            if !deco.ma.contains(x) {
                continue;
            }
            let mut rebuilt = 0u32;
            for m in &mods {
                let v = m.ms_coords(&g, &deco, x).unwrap();
                rebuilt = g.mul(rebuilt, m.element_of(&v));
            }
            assert_eq!(rebuilt, x);
        }
    }

    #[test]
    fn zero_dimensional_module_is_vacuously_generated() {
        let m = FpModule {
            p: 2,
            dim: 0,
            basis: vec![],
            action: vec![FpMat::identity(2, 0)],
            foot_blocks: vec![],
            summand_positions: vec![],
            carrier: vec![0],
            coords: vec![(0, vec![])],
            by_vec: vec![0],
        };
        let check = orbit_generation_check(&m, 4096, 10_000, 7);
        assert!(check.primal && check.dual);
    }

    #[test]
    fn sampling_regime_still_finds_single_foot_witnesses() {
        let (_, _, mods) = modules_for("symmetric 4");
        let check = orbit_generation_check(&mods[0], 1, 1000, 7);
        assert!(check.sampled);
        assert!(check.primal && check.dual);
    }

    #[test]
    fn trivial_action_in_sampling_regime_reports_nothing() {
        let (_, _, mods) = modules_for("elemabelian 2 2");
        let check = orbit_generation_check(&mods[0], 1, 50, 7);
        assert!(check.sampled);
        assert!(!check.primal && !check.dual);
    }
}
