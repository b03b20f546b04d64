//! Canonical basis monomials and word-level arithmetic.
//!
//! Every supported family has a terminating, confluent normal form, so a
//! `NormalWord` is a complete canonical representative: two words are equal
//! exactly when their representations are identical.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::One;

use crate::rat::Rat;

/// Reduced group element in one of the supported groups.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum GroupWord {
    /// Reduced word over a free group; letters are `±(generator index + 1)`.
    Free(Vec<i32>),
    /// Point of the lattice Z^d.
    Lattice(Vec<i64>),
    /// Discrete Heisenberg element in normal form `x^a y^b z^c`
    /// with `z = x y x^-1 y^-1` central.
    Heis { a: i64, b: i64, c: i64 },
}

impl GroupWord {
    pub fn is_identity(&self) -> bool {
        match self {
            GroupWord::Free(w) => w.is_empty(),
            GroupWord::Lattice(v) => v.iter().all(|&x| x == 0),
            GroupWord::Heis { a, b, c } => *a == 0 && *b == 0 && *c == 0,
        }
    }

    pub fn inverse(&self) -> GroupWord {
        match self {
            GroupWord::Free(w) => GroupWord::Free(w.iter().rev().map(|&l| -l).collect()),
            GroupWord::Lattice(v) => GroupWord::Lattice(v.iter().map(|&x| -x).collect()),
            // (x^a y^b z^c)^-1 = x^-a y^-b z^(-c-ab)
            GroupWord::Heis { a, b, c } => GroupWord::Heis {
                a: -a,
                b: -b,
                c: -c - a * b,
            },
        }
    }

    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        match (self, other) {
            (GroupWord::Free(u), GroupWord::Free(v)) => {
                let mut out = u.clone();
                for &l in v {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                GroupWord::Free(out)
            }
            (GroupWord::Lattice(u), GroupWord::Lattice(v)) => {
                GroupWord::Lattice(u.iter().zip(v).map(|(a, b)| a + b).collect())
            }
            // x^a y^b z^c * x^p y^q z^r = x^(a+p) y^(b+q) z^(c+r-pb)
            (GroupWord::Heis { a, b, c }, GroupWord::Heis { a: p, b: q, c: r }) => GroupWord::Heis {
                a: a + p,
                b: b + q,
                c: c + r - p * b,
            },
            _ => unreachable!("group kind mismatch"),
        }
    }

    fn grade(&self) -> u64 {
        match self {
            GroupWord::Free(w) => w.len() as u64,
            GroupWord::Lattice(v) => v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0),
            // Storage grade only; the Cayley word length is computed by BFS.
            GroupWord::Heis { a, b, c } => a.unsigned_abs() + b.unsigned_abs() + c.unsigned_abs(),
        }
    }

    fn key_cmp(&self, other: &GroupWord) -> Ordering {
        match (self, other) {
            (GroupWord::Free(u), GroupWord::Free(v)) => {
                let rank = |l: &i32| (l.unsigned_abs(), *l < 0);
                u.iter().map(rank).cmp(v.iter().map(rank))
            }
            (GroupWord::Lattice(u), GroupWord::Lattice(v)) => u.cmp(v),
            (GroupWord::Heis { a, b, c }, GroupWord::Heis { a: p, b: q, c: r }) => {
                (a, b, c).cmp(&(&p, &q, &r))
            }
            _ => unreachable!("group kind mismatch"),
        }
    }
}

/// Canonical basis monomial of an algebra family.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum NormalWord {
    /// Word over free-algebra generators (indices into the generator list).
    Free(Vec<u16>),
    /// Commutative monomial exponent vector.
    Monomial(Vec<u32>),
    /// Normal-ordered Weyl monomial `x^i y^j`.
    Weyl { x: u32, y: u32 },
    /// Group-algebra basis element.
    Group(GroupWord),
    /// Quaternion basis index: 0 -> 1, 1 -> i, 2 -> j, 3 -> k.
    Quat(u8),
}

impl NormalWord {
    /// Structural grade used for canonical term ordering. It coincides with
    /// the filtration degree for every family except Heisenberg, whose
    /// Cayley word length requires BFS and is applied at truncation level.
    pub fn grade(&self) -> u64 {
        match self {
            NormalWord::Free(w) => w.len() as u64,
            NormalWord::Monomial(e) => e.iter().map(|&x| x as u64).sum(),
            NormalWord::Weyl { x, y } => (*x + *y) as u64,
            NormalWord::Group(g) => g.grade(),
            NormalWord::Quat(i) => u64::from(*i != 0),
        }
    }

    pub fn is_unit(&self) -> bool {
        match self {
            NormalWord::Free(w) => w.is_empty(),
            NormalWord::Monomial(e) => e.iter().all(|&x| x == 0),
            NormalWord::Weyl { x, y } => *x == 0 && *y == 0,
            NormalWord::Group(g) => g.is_identity(),
            NormalWord::Quat(i) => *i == 0,
        }
    }
}

impl Ord for NormalWord {
    fn cmp(&self, other: &Self) -> Ordering {
        fn tag(w: &NormalWord) -> u8 {
            match w {
                NormalWord::Free(_) => 0,
                NormalWord::Monomial(_) => 1,
                NormalWord::Weyl { .. } => 2,
                NormalWord::Group(_) => 3,
                NormalWord::Quat(_) => 4,
            }
        }
        self.grade()
            .cmp(&other.grade())
            .then_with(|| tag(self).cmp(&tag(other)))
            .then_with(|| match (self, other) {
                (NormalWord::Free(u), NormalWord::Free(v)) => u.cmp(v),
                // Within a fixed total degree, expanded words compare
                // lexicographically when the exponent vectors compare with
                // the larger early exponent first (x^2 < x*y < y^2).
                (NormalWord::Monomial(u), NormalWord::Monomial(v)) => {
                    for (a, b) in u.iter().zip(v) {
                        match b.cmp(a) {
                            Ordering::Equal => continue,
                            ord => return ord,
                        }
                    }
                    Ordering::Equal
                }
                (NormalWord::Weyl { x: a, .. }, NormalWord::Weyl { x: b, .. }) => b.cmp(a),
                (NormalWord::Group(u), NormalWord::Group(v)) => u.key_cmp(v),
                (NormalWord::Quat(a), NormalWord::Quat(b)) => a.cmp(b),
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for NormalWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Quaternion basis product: `(index, sign)` for basis elements 1,i,j,k.
pub fn quat_mul(a: u8, b: u8) -> (u8, i8) {
    const TABLE: [[(u8, i8); 4]; 4] = [
        [(0, 1), (1, 1), (2, 1), (3, 1)],
        [(1, 1), (0, -1), (3, 1), (2, -1)],
        [(2, 1), (3, -1), (0, -1), (1, 1)],
        [(3, 1), (2, 1), (1, -1), (0, -1)],
    ];
    TABLE[a as usize][b as usize]
}

/// Normal-ordered product of two Weyl monomials.
///
/// Repeated application of `y*x -> x*y + 1` gives the closed form
/// `y^j x^k = sum_m m! C(j,m) C(k,m) x^(k-m) y^(j-m)`, so
/// `x^i y^j * x^k y^l = sum_m m! C(j,m) C(k,m) x^(i+k-m) y^(j+l-m)`.
/// The unit tests check this against a literal rewriting oracle.
pub fn weyl_mul(i: u32, j: u32, k: u32, l: u32) -> Vec<(NormalWord, Rat)> {
    let mmax = j.min(k);
    let mut out = Vec::with_capacity(mmax as usize + 1);
    // coeff(m) = m! C(j,m) C(k,m), built up incrementally:
    // coeff(m+1) = coeff(m) * (j-m)(k-m) / (m+1), always an exact division.
    let mut coeff = BigInt::one();
    for m in 0..=mmax {
        out.push((
            NormalWord::Weyl {
                x: i + k - m,
                y: j + l - m,
            },
            Rat::from_bigint(coeff.clone()),
        ));
        if m < mmax {
            coeff *= BigInt::from((j - m) as i64 * (k - m) as i64);
            coeff /= BigInt::from((m + 1) as i64);
        }
    }
    out
}
