//! The action of the symmetric group on three letters by permuting stick lengths.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::BaryPoint;

/// A bijection of `{1, 2, 3}`, stored zero-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm([u8; 3]);

impl Perm {
    pub const IDENTITY: Perm = Perm([0, 1, 2]);

    /// All six permutations, identity first.
    pub const ALL: [Perm; 6] = [
        Perm([0, 1, 2]),
        Perm([1, 0, 2]),
        Perm([2, 1, 0]),
        Perm([0, 2, 1]),
        Perm([1, 2, 0]),
        Perm([2, 0, 1]),
    ];

    /// From one-based images, e.g. `[2, 1, 3]` is the transposition (1 2).
    pub fn from_images(images: [u8; 3]) -> Result<Perm> {
        let mut seen = [false; 3];
        for &i in &images {
            if !(1..=3).contains(&i) || seen[usize::from(i - 1)] {
                return Err(Error::InvalidArgument(format!(
                    "not a permutation of 1..3: {images:?}"
                )));
            }
            seen[usize::from(i - 1)] = true;
        }
        Ok(Perm(images.map(|i| i - 1)))
    }

    /// Transposition swapping one-based positions `i` and `j`.
    pub fn transposition(i: u8, j: u8) -> Result<Perm> {
        if i == j || !(1..=3).contains(&i) || !(1..=3).contains(&j) {
            return Err(Error::InvalidArgument(format!(
                "bad transposition ({i} {j})"
            )));
        }
        let mut images = [1, 2, 3];
        images.swap(usize::from(i - 1), usize::from(j - 1));
        Perm::from_images(images)
    }

    /// One-based images.
    pub fn images(self) -> [u8; 3] {
        self.0.map(|i| i + 1)
    }

    /// The permutation whose action is `act(self, act(inner, p))`.
    pub fn compose(self, inner: Perm) -> Perm {
        Perm(self.0.map(|i| inner.0[usize::from(i)]))
    }

    pub fn inverse(self) -> Perm {
        let mut inv = [0u8; 3];
        for (i, &img) in self.0.iter().enumerate() {
            inv[usize::from(img)] = i as u8;
        }
        Perm(inv)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.images();
        write!(f, "{a}{b}{c}")
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({self})")
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `sigma . (l1, l2, l3) = (l_sigma(1), l_sigma(2), l_sigma(3))`.
pub fn act(sigma: Perm, p: &BaryPoint) -> BaryPoint {
    let c = p.coords();
    BaryPoint::from_coords_unchecked(sigma.0.map(|i| c[usize::from(i)].clone()))
}

/// Distinct images of `p` under the group, in sorted order.
pub fn orbit(p: &BaryPoint) -> Vec<BaryPoint> {
    Perm::ALL
        .iter()
        .map(|&s| act(s, p))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Permutations fixing `p`.
pub fn stabilizer(p: &BaryPoint) -> Vec<Perm> {
    Perm::ALL.into_iter().filter(|&s| act(s, p) == *p).collect()
}

/// Orbit representative with `l1 >= l2 >= l3`.
pub fn canonicalize(p: &BaryPoint) -> BaryPoint {
    let mut c = p.coords().clone();
    c.sort_by(|a, b| b.cmp(a));
    BaryPoint::from_coords_unchecked(c)
}
