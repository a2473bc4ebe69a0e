//! Explicit faithful irreducible matrices, constructed from the regular
//! representation.
//!
//! For a chosen character row, the central idempotent projects the regular
//! representation onto its isotypic component; a random Hermitian element of
//! the commutant (built from right translations, which commute with the left
//! action) splits that component into irreducible blocks, and one block is
//! orthonormalized and certified. Everything is dense complex linear algebra,
//! so the construction is gated on the group order.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::chartab::{CharacterTable, C64};
use crate::group::FiniteGroup;

pub const MAX_REP_ORDER: usize = 512;
const SEED_BASE: u64 = 0xFACADE;
const MAX_ATTEMPTS: usize = 20;

#[derive(Debug, Error)]
pub enum RepError {
    #[error("group order {0} exceeds the dense-construction limit {MAX_REP_ORDER}")]
    TooLarge(usize),
    #[error("isotypic projection has rank {found}, expected {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("could not split the isotypic component after {0} attempts")]
    SplitFailed(usize),
    #[error("constructed matrices failed verification: {0}")]
    Verification(String),
}

#[derive(Debug, Clone)]
pub struct IrrepMatrices {
    pub degree: usize,
    /// One unitary matrix per group element, indexed by element.
    pub images: Vec<DMatrix<C64>>,
    /// The character row the construction started from, by class.
    pub character: Vec<C64>,
    /// Dimension of the solution space of the intertwining system — 1 for an
    /// irreducible representation.
    pub commutant_dim: usize,
}

impl IrrepMatrices {
    pub fn image(&self, x: u32) -> &DMatrix<C64> {
        &self.images[x as usize]
    }

    /// Greatest entrywise distance between two images; a faithful
    /// representation keeps this positive over all distinct pairs.
    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.images.len() {
            for j in i + 1..self.images.len() {
                let mut worst = 0.0f64;
                for (a, b) in self.images[i].iter().zip(self.images[j].iter()) {
                    worst = worst.max((a - b).norm());
                }
                best = best.min(worst);
            }
        }
        best
    }
}

pub fn construct_irreducible_rep(
    g: &FiniteGroup,
    table: &CharacterTable,
    row: usize,
) -> Result<IrrepMatrices, RepError> {
    let n = g.order();
    if n > MAX_REP_ORDER {
        return Err(RepError::TooLarge(n));
    }
    let d = table.degrees[row];
    let chi: Vec<C64> = (0..n as u32).map(|x| table.value(row, x)).collect();

    // Central idempotent on the regular representation: the column for x
    // holds (d/n) * conj(chi(y x^{-1})) at row y.
    let mut proj = DMatrix::<C64>::zeros(n, n);
    for x in 0..n as u32 {
        for y in 0..n as u32 {
            let gelt = g.mul(y, g.inv(x));
            proj[(y as usize, x as usize)] = chi[gelt as usize].conj() * (d as f64 / n as f64);
        }
    }
    let iso_dim = d * d;
    let qr = proj.clone().col_piv_qr();
    // Column pivoting keeps the diagonal of R non-increasing in magnitude,
    // so the numerical rank is the count of diagonal entries above the cut.
    let r = qr.r();
    let lead = r[(0, 0)].norm().max(1e-12);
    let rank = (0..n).take_while(|&i| r[(i, i)].norm() > 1e-8 * lead).count();
    if rank != iso_dim {
        return Err(RepError::RankMismatch { expected: iso_dim, found: rank });
    }
    let q = qr.q();
    let basis = q.columns(0, iso_dim).into_owned();

    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED_BASE + attempt as u64);
        // Hermitian element of the commutant: coefficients over the group
        // with c(h^{-1}) = conj(c(h)), applied through right translations.
        let mut coeff = vec![C64::new(0.0, 0.0); n];
        for h in 0..n as u32 {
            let hi = g.inv(h);
            if h < hi {
                let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                coeff[h as usize] = c;
                coeff[hi as usize] = c.conj();
            } else if h == hi {
                coeff[h as usize] = C64::new(rng.random_range(-1.0..1.0), 0.0);
            }
        }
        // A[y][x] = c(x^{-1} y), the matrix of sum_h c(h) R(h).
        let a = DMatrix::<C64>::from_fn(n, n, |y, x| {
            coeff[g.mul(g.inv(x as u32), y as u32) as usize]
        });
        let t = basis.adjoint() * &a * &basis;
        // Symmetrize away the floating-point skew part before eigensolving.
        let t = (&t + t.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..iso_dim).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut cluster = vec![order[0]];
        for w in order.windows(2) {
            if (eig.eigenvalues[w[1]] - eig.eigenvalues[w[0]]).abs() < 1e-6 * scale {
                cluster.push(w[1]);
            } else {
                break;
            }
        }
        if cluster.len() != d {
            continue;
        }
        let mut block = DMatrix::<C64>::zeros(iso_dim, d);
        for (j, &col) in cluster.iter().enumerate() {
            block.set_column(j, &eig.eigenvectors.column(col));
        }
        let embedding = &basis * block;

        let mut images = Vec::with_capacity(n);
        for x in 0..n as u32 {
            // rho(x) = E^* L(x) E with (L(x) E)[y] = E[x^{-1} y].
            let xi = g.inv(x);
            let shifted = DMatrix::<C64>::from_fn(n, d, |y, j| {
                embedding[(g.mul(xi, y as u32) as usize, j)]
            });
            images.push(embedding.adjoint() * shifted);
        }

        let candidate = IrrepMatrices {
            degree: d,
            images,
            character: table.table[row].clone(),
            commutant_dim: 0,
        };
        match finish_verification(g, table, row, candidate) {
            Ok(done) => return Ok(done),
            Err(_) => continue,
        }
    }
    Err(RepError::SplitFailed(MAX_ATTEMPTS))
}

/// Unitarity, multiplicativity, trace agreement, and the intertwining-system
/// certificate. Any failure sends the construction back for another split.
fn finish_verification(
    g: &FiniteGroup,
    table: &CharacterTable,
    row: usize,
    mut rep: IrrepMatrices,
) -> Result<IrrepMatrices, RepError> {
    let n = g.order();
    let d = rep.degree;
    let id = DMatrix::<C64>::identity(d, d);
    for (x, m) in rep.images.iter().enumerate() {
        let gram = m.adjoint() * m;
        let defect = (&gram - &id).iter().fold(0.0f64, |w, v| w.max(v.norm()));
        if defect > 1e-8 {
            return Err(RepError::Verification(format!(
                "image of {x} is not unitary (defect {defect:.3e})"
            )));
        }
        let tr: C64 = (0..d).map(|i| m[(i, i)]).sum();
        let want = table.value(row, x as u32);
        if (tr - want).norm() > 1e-6 {
            return Err(RepError::Verification(format!("trace mismatch at element {x}")));
        }
    }
    let check_pair = |x: u32, y: u32| -> bool {
        let prod = &rep.images[x as usize] * &rep.images[y as usize];
        let want = &rep.images[g.mul(x, y) as usize];
        prod.iter().zip(want.iter()).all(|(a, b)| (a - b).norm() <= 1e-8)
    };
    if n <= 64 {
        for x in 0..n as u32 {
            for y in 0..n as u32 {
                if !check_pair(x, y) {
                    return Err(RepError::Verification(format!(
                        "multiplicativity fails at ({x}, {y})"
                    )));
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED_BASE ^ 0x5A5A);
        for _ in 0..100_000 {
            let x = rng.random_range(0..n as u32);
            let y = rng.random_range(0..n as u32);
            if !check_pair(x, y) {
                return Err(RepError::Verification(format!(
                    "multiplicativity fails at ({x}, {y})"
                )));
            }
        }
    }

    // Commutant of the generator images: solutions X of rho(g) X = X rho(g).
    let gens: Vec<u32> = if g.generators().is_empty() {
        vec![0]
    } else {
        g.generators().to_vec()
    };
    let mut system = DMatrix::<C64>::zeros(gens.len() * d * d, d * d);
    for (gi, &gen) in gens.iter().enumerate() {
        let rho = &rep.images[gen as usize];
        for i in 0..d {
            for j in 0..d {
                let r = gi * d * d + i * d + j;
                for k in 0..d {
                    // coefficient of X[k, j]
                    system[(r, k * d + j)] += rho[(i, k)];
                    // coefficient of X[i, k]
                    system[(r, i * d + k)] -= rho[(k, j)];
                }
            }
        }
    }
    let svd = system.svd(false, false);
    let smax = svd.singular_values.iter().fold(0.0f64, |m, v| m.max(*v));
    let nullity = svd
        .singular_values
        .iter()
        .filter(|&&s| s < 1e-8 * smax.max(1.0))
        .count()
        + (d * d - svd.singular_values.len().min(d * d));
    if nullity != 1 {
        return Err(RepError::Verification(format!("commutant dimension {nullity}")));
    }
    rep.commutant_dim = nullity;
    Ok(rep)
}
