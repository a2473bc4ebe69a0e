//! Permutations of {0, .., degree-1}, the concrete elements most groups here
//! are built from.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("point {point} repeated within a cycle")]
    RepeatedPoint { point: usize },
    #[error("image list of length {len} is not a bijection")]
    NotABijection { len: usize },
}

/// A permutation stored as its image list: `images[i]` is where point `i` goes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &im in &images {
            if im >= n {
                return Err(PermError::PointOutOfRange { point: im, degree: n });
            }
            if seen[im] {
                return Err(PermError::NotABijection { len: n });
            }
            seen[im] = true;
        }
        Ok(Permutation { images })
    }

    /// Product of disjoint-or-not cycles, applied right to left like group
    /// elements. Cycles may touch the same point; each individual cycle must
    /// not repeat a point.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut acc = Permutation::identity(degree);
        for cyc in cycles {
            let mut images: Vec<usize> = (0..degree).collect();
            let mut seen = vec![false; degree];
            for &p in cyc {
                if p >= degree {
                    return Err(PermError::PointOutOfRange { point: p, degree });
                }
                if seen[p] {
                    return Err(PermError::RepeatedPoint { point: p });
                }
                seen[p] = true;
            }
            for i in 0..cyc.len() {
                images[cyc[i]] = cyc[(i + 1) % cyc.len()];
            }
            acc = acc.compose(&Permutation { images });
        }
        Ok(acc)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    /// `self` after `other`: (self * other)(x) = self(other(x)).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation { images: other.images.iter().map(|&m| self.images[m]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &im) in self.images.iter().enumerate() {
            images[im] = i;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &im)| i == im)
    }

    /// true when the permutation is even.
    pub fn is_even(&self) -> bool {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p];
                len += 1;
            }
            transpositions += len - 1;
        }
        transpositions % 2 == 0
    }

    pub fn cycle_notation(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut p = start;
            let mut first = true;
            while !seen[p] {
                seen[p] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&p.to_string());
                first = false;
                p = self.images[p];
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycle_notation())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_products_compose_right_to_left() {
        // (0 1)(1 2) sends 1 -> 2, 2 -> 1 -> ... check: rightmost first.
        let p = Permutation::from_cycles(3, &[vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(p.apply(1), 2);
        assert_eq!(p.apply(2), 0);
        assert_eq!(p.apply(0), 1);
    }

    #[test]
    fn inverse_and_identity() {
        let p = Permutation::from_cycles(5, &[vec![0, 3, 1], vec![2, 4]]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(p.inverse().compose(&p).is_identity());
    }

    #[test]
    fn parity_of_three_cycle_and_transposition() {
        assert!(Permutation::from_cycles(4, &[vec![0, 1, 2]]).unwrap().is_even());
        assert!(!Permutation::from_cycles(4, &[vec![0, 1]]).unwrap().is_even());
    }

    #[test]
    fn bad_cycles_rejected() {
        assert_eq!(
            Permutation::from_cycles(3, &[vec![0, 3]]),
            Err(PermError::PointOutOfRange { point: 3, degree: 3 })
        );
        assert_eq!(
            Permutation::from_cycles(3, &[vec![0, 1, 0]]),
            Err(PermError::RepeatedPoint { point: 0 })
        );
    }

    #[test]
    fn cycle_notation_round_trip() {
        let p = Permutation::from_cycles(6, &[vec![0, 2, 4], vec![1, 5]]).unwrap();
        assert_eq!(p.cycle_notation(), "(0 2 4)(1 5)");
        assert_eq!(Permutation::identity(4).cycle_notation(), "()");
    }
}
