//! Independent ground truth: the full complex character table of a finite
//! group, computed by the classical class-sum method.
//!
//! The class sums span a commutative semisimple algebra whose characters are
//! the rows of the table, up to normalization. A random real combination of
//! the class-sum matrices therefore has the normalized character vectors as
//! eigenvectors, generically with distinct eigenvalues; a seeded retry loop
//! handles the non-generic draws. Everything downstream (faithfulness
//! verdicts, explicit matrices) checks itself against this table.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::group::{ConjugacyClasses, FiniteGroup, Subgroup};

pub type C64 = Complex<f64>;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
const SEED_BASE: u64 = 0xC0FFEE;
const MAX_ATTEMPTS: usize = 20;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("could not separate eigenvalues after {0} attempts")]
    Separation(usize),
    #[error("character table failed verification: {0}")]
    Verification(String),
}

#[derive(Debug, Clone)]
pub struct CharacterTable {
    pub classes: ConjugacyClasses,
    pub degrees: Vec<usize>,
    /// Rows are irreducible characters, columns follow `classes` order
    /// (column 0 is the identity class). Sorted by (degree, rounded values).
    pub table: Vec<Vec<C64>>,
    pub tolerance: f64,
}

impl CharacterTable {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn value(&self, row: usize, element: u32) -> C64 {
        self.table[row][self.classes.class_of(element)]
    }

    /// Elements on which the row takes its identity value.
    pub fn kernel(&self, row: usize) -> Vec<u32> {
        let deg = self.table[row][0];
        let mut members = Vec::new();
        for (c, class) in self.classes.iter().enumerate() {
            if (self.table[row][c] - deg).norm() < self.tolerance {
                members.extend_from_slice(class);
            }
        }
        members.sort_unstable();
        members
    }

    pub fn kernel_subgroup(&self, parent_order: usize, row: usize) -> Subgroup {
        Subgroup::from_members(parent_order, self.kernel(row))
    }

    /// Largest deviation from row orthogonality, for diagnostics and tests.
    pub fn row_orthogonality_defect(&self, g: &FiniteGroup) -> f64 {
        let k = self.num_classes();
        let sizes = self.classes.sizes();
        let mut worst = 0.0f64;
        for r in 0..k {
            for s in 0..k {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..k {
                    acc += self.table[r][c] * self.table[s][c].conj() * sizes[c] as f64;
                }
                acc /= g.order() as f64;
                let want = if r == s { 1.0 } else { 0.0 };
                worst = worst.max((acc - C64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest deviation from column orthogonality. Not used in construction,
    /// so it is an independent consistency signal.
    pub fn column_orthogonality_defect(&self, g: &FiniteGroup) -> f64 {
        let k = self.num_classes();
        let sizes = self.classes.sizes();
        let mut worst = 0.0f64;
        for c in 0..k {
            for d in 0..k {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..k {
                    acc += self.table[r][c] * self.table[r][d].conj();
                }
                let want = if c == d { g.order() as f64 / sizes[c] as f64 } else { 0.0 };
                worst = worst.max((acc - C64::new(want, 0.0)).norm() * sizes[c] as f64
                    / g.order() as f64);
            }
        }
        worst
    }

    pub fn verify(&self, g: &FiniteGroup) -> Result<(), OracleError> {
        let k = self.num_classes();
        if self.table.len() != k || self.degrees.len() != k {
            return Err(OracleError::Verification(format!(
                "expected {k} rows, found {}",
                self.table.len()
            )));
        }
        let sum: usize = self.degrees.iter().map(|d| d * d).sum();
        if sum != g.order() {
            return Err(OracleError::Verification(format!(
                "degree squares sum to {sum}, group order is {}",
                g.order()
            )));
        }
        for (r, row) in self.table.iter().enumerate() {
            if (row[0] - C64::new(self.degrees[r] as f64, 0.0)).norm() > self.tolerance {
                return Err(OracleError::Verification(format!(
                    "row {r} identity value {} differs from degree {}",
                    row[0], self.degrees[r]
                )));
            }
        }
        let defect = self.row_orthogonality_defect(g);
        if defect > self.tolerance {
            return Err(OracleError::Verification(format!(
                "row orthogonality defect {defect:.3e}"
            )));
        }
        Ok(())
    }
}

pub fn character_table(g: &FiniteGroup) -> Result<CharacterTable, OracleError> {
    character_table_with_tolerance(g, DEFAULT_TOLERANCE)
}

pub fn character_table_with_tolerance(
    g: &FiniteGroup,
    tolerance: f64,
) -> Result<CharacterTable, OracleError> {
    let classes = g.conjugacy_classes();
    let k = classes.len();
    if k == 1 {
        return Ok(CharacterTable {
            classes,
            degrees: vec![1],
            table: vec![vec![C64::new(1.0, 0.0)]],
            tolerance,
        });
    }
    let sizes = classes.sizes();
    let reps: Vec<u32> = (0..k).map(|c| classes.representative(c)).collect();

    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED_BASE + attempt as u64);
        let coeffs: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();

        // M = sum_i c_i/|C_i| B_i where (B_i)_{j,l} counts the pairs
        // (x, y) in C_i x C_j with x*y = rep_l. Accumulated directly:
        // every x in G contributes to column l at row class(x^{-1} rep_l).
        let mut m = DMatrix::<f64>::zeros(k, k);
        for (l, &rl) in reps.iter().enumerate() {
            for x in 0..g.order() as u32 {
                let i = classes.class_of(x);
                let j = classes.class_of(g.mul(g.inv(x), rl));
                m[(j, l)] += coeffs[i] / sizes[i] as f64;
            }
        }

        let eigs = m.clone().complex_eigenvalues();
        let mut lambdas: Vec<C64> = eigs.iter().copied().collect();
        lambdas.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let mut separated = true;
        for w in lambdas.windows(2) {
            if (w[0] - w[1]).norm() < 1e-7 {
                separated = false;
                break;
            }
        }
        if !separated {
            continue;
        }

        let mc = m.map(|x| C64::new(x, 0.0));
        let mut rows: Vec<(usize, Vec<f64>, Vec<C64>)> = Vec::with_capacity(k);
        let mut ok = true;
        for &lambda in &lambdas {
            let shifted = &mc - DMatrix::from_diagonal_element(k, k, lambda);
            let svd = shifted.svd(false, true);
            let vt = svd.v_t.as_ref().expect("requested v_t");
            let mut imin = 0;
            for (i, s) in svd.singular_values.iter().enumerate() {
                if *s < svd.singular_values[imin] {
                    imin = i;
                }
            }
            let v: Vec<C64> = (0..k).map(|j| vt[(imin, j)].conj()).collect();
            if v[0].norm() < 1e-8 {
                ok = false;
                break;
            }
            let w: Vec<C64> = v.iter().map(|x| x / v[0]).collect();
            let denom: f64 = w.iter().zip(&sizes).map(|(x, &s)| x.norm_sqr() / s as f64).sum();
            let dfloat = (g.order() as f64 / denom).sqrt();
            let d = dfloat.round() as usize;
            if d == 0 || (dfloat - d as f64).abs() > 1e-6 * dfloat.max(1.0) {
                ok = false;
                break;
            }
            let chi: Vec<C64> =
                w.iter().zip(&sizes).map(|(x, &s)| x * d as f64 / s as f64).collect();
            let key: Vec<f64> = chi
                .iter()
                .flat_map(|z| [(z.re * 1e6).round() / 1e6, (z.im * 1e6).round() / 1e6])
                .collect();
            rows.push((d, key, chi));
        }
        if !ok {
            continue;
        }
        rows.sort_by(|a, b| {
            a.0.cmp(&b.0).then_with(|| {
                for (x, y) in a.1.iter().zip(&b.1) {
                    match x.total_cmp(y) {
                        std::cmp::Ordering::Equal => continue,
                        other => return other,
                    }
                }
                std::cmp::Ordering::Equal
            })
        });
        let t = CharacterTable {
            classes: classes.clone(),
            degrees: rows.iter().map(|r| r.0).collect(),
            table: rows.into_iter().map(|r| r.2).collect(),
            tolerance,
        };
        if t.verify(g).is_ok() {
            return Ok(t);
        }
    }
    Err(OracleError::Separation(MAX_ATTEMPTS))
}

/// First row whose kernel is trivial — or, given automorphism maps, whose
/// kernels under all of them intersect trivially (the kernel of a twisted row
/// is the automorphism preimage of the plain kernel).
pub fn has_faithful_irreducible(
    g: &FiniteGroup,
    table: &CharacterTable,
    autos: Option<&[Vec<u32>]>,
) -> Option<usize> {
    for row in 0..table.table.len() {
        let kernel = table.kernel(row);
        let trivial = match autos {
            None => kernel.len() == 1,
            Some(maps) => {
                let mut common = vec![false; g.order()];
                for &x in &kernel {
                    common[x as usize] = true;
                }
                for map in maps {
                    let mut image = vec![false; g.order()];
                    for &x in &kernel {
                        image[map[x as usize] as usize] = true;
                    }
                    for (c, i) in common.iter_mut().zip(&image) {
                        *c = *c && *i;
                    }
                }
                common.iter().filter(|&&b| b).count() == 1
            }
        };
        if trivial {
            return Some(row);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_group_spec;
    use crate::group::build_group;

    fn build(spec: &str) -> FiniteGroup {
        build_group(&parse_group_spec(spec).unwrap(), 20000).unwrap().group
    }

    fn table(spec: &str) -> (FiniteGroup, CharacterTable) {
        let g = build(spec);
        let t = character_table(&g).unwrap();
        (g, t)
    }

    #[test]
    fn sym3_degrees() {
        let (_, t) = table("symmetric 3");
        assert_eq!(t.degrees, vec![1, 1, 2]);
    }

    #[test]
    fn quaternion_degrees_and_faithful_row() {
        let (g, t) = table("quaternion 8");
        assert_eq!(t.degrees, vec![1, 1, 1, 1, 2]);
        let row = has_faithful_irreducible(&g, &t, None).unwrap();
        assert_eq!(t.degrees[row], 2);
    }

    #[test]
    fn cyclic_four_characters_hit_all_fourth_roots() {
        let (g, t) = table("cyclic 4");
        assert_eq!(t.degrees, vec![1, 1, 1, 1]);
        let gen = (0..4u32).find(|&x| g.element_order(x) == 4).unwrap();
        let mut vals: Vec<C64> = (0..4).map(|r| t.value(r, gen)).collect();
        for want in [
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, -1.0),
        ] {
            let hit = vals.iter().position(|v| (v - want).norm() < 1e-8).expect("root present");
            vals.remove(hit);
        }
    }

    #[test]
    fn alt5_degrees() {
        let (_, t) = table("alternating 5");
        assert_eq!(t.degrees, vec![1, 3, 3, 4, 5]);
    }

    #[test]
    fn klein_four_has_no_faithful_row() {
        let (g, t) = table("elemabelian 2 2");
        assert_eq!(t.degrees, vec![1, 1, 1, 1]);
        assert_eq!(has_faithful_irreducible(&g, &t, None), None);
    }

    #[test]
    fn sym4_faithful_rows_have_degree_three() {
        let (g, t) = table("symmetric 4");
        assert_eq!(t.degrees, vec![1, 1, 2, 3, 3]);
        let row = has_faithful_irreducible(&g, &t, None).unwrap();
        assert_eq!(t.degrees[row], 3);
    }

    #[test]
    fn trivial_group_table() {
        let (_, t) = table("cyclic 1");
        assert_eq!(t.degrees, vec![1]);
        assert_eq!(t.table, vec![vec![C64::new(1.0, 0.0)]]);
    }

    #[test]
    fn orthogonality_defects_stay_small() {
        for spec in ["symmetric 4", "quaternion 16", "dihedral 12", "cyclic 12", "alternating 5"] {
            let (g, t) = table(spec);
            assert!(t.row_orthogonality_defect(&g) < 1e-8, "{spec}");
            assert!(t.column_orthogonality_defect(&g) < 1e-8, "{spec}");
        }
    }

    #[test]
    fn kernels_are_normal_subgroups() {
        for spec in ["symmetric 4", "quaternion 8", "dihedral 12", "cyclic 6"] {
            let (g, t) = table(spec);
            for row in 0..t.table.len() {
                let members = t.kernel(row);
                let sub = g.subgroup_closure(&members);
                assert_eq!(sub.members(), &members[..], "{spec} row {row} kernel not closed");
                let normal = g.normal_closure(&members);
                assert_eq!(normal.members(), &members[..], "{spec} row {row} kernel not normal");
            }
        }
    }

    #[test]
    fn trivial_character_is_present() {
        for spec in ["symmetric 3", "cyclic 6", "alternating 4"] {
            let (_, t) = table(spec);
            let found = t.table.iter().any(|row| {
                row.iter().all(|v| (v - C64::new(1.0, 0.0)).norm() < 1e-8)
            });
            assert!(found, "{spec}");
        }
    }

    #[test]
    fn adjoined_automorphisms_rescue_the_klein_four_group() {
        let g = build("elemabelian 2 2");
        let t = character_table(&g).unwrap();
        // All six automorphisms: permutations of the three involutions.
        let nontrivial: Vec<u32> = (1..4).collect();
        let mut maps = Vec::new();
        for &x in &nontrivial {
            for &y in &nontrivial {
                if x == y {
                    continue;
                }
                let mut map = vec![0u32; 4];
                map[nontrivial[0] as usize] = x;
                map[nontrivial[1] as usize] = y;
                map[nontrivial[2] as usize] = g.mul(x, y);
                maps.push(map);
            }
        }
        assert_eq!(maps.len(), 6);
        assert_eq!(has_faithful_irreducible(&g, &t, None), None);
        assert!(has_faithful_irreducible(&g, &t, Some(&maps)).is_some());
    }
}
