//! Effective algebra families with normal-form bases.
//!
//! Each family comes with a canonical word basis, exact structure
//! constants, and a degree filtration whose balls (`Truncation`) host all
//! exact subspace computations. The families are a fixed list on purpose:
//! general finitely presented algebras have an undecidable word problem,
//! while every family here has a terminating confluent normal form.

mod element;
mod parser;
mod words;

pub use element::AlgebraElement;
pub use words::{quat_mul, weyl_mul, GroupWord, NormalWord};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exactlin::{Matrix, SparseVec, AMBIENT_CAP};
use crate::rat::Rat;

/// Groups whose group algebras are supported.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Group {
    Free { rank: usize },
    Lattice { dim: usize },
    Heisenberg,
}

impl Group {
    pub fn identity(&self) -> GroupWord {
        match self {
            Group::Free { .. } => GroupWord::Free(Vec::new()),
            Group::Lattice { dim } => GroupWord::Lattice(vec![0; *dim]),
            Group::Heisenberg => GroupWord::Heis { a: 0, b: 0, c: 0 },
        }
    }

    pub fn generator_names(&self) -> Vec<String> {
        match self {
            Group::Free { rank } => default_names(*rank, &["a", "b", "c", "d"], "g"),
            Group::Lattice { dim } => default_names(*dim, &["x", "y", "z", "w"], "x"),
            Group::Heisenberg => vec!["x".into(), "y".into(), "z".into()],
        }
    }

    /// The word for generator `idx` (or its inverse).
    pub fn generator_word(&self, idx: usize, inverse: bool) -> GroupWord {
        let w = match self {
            Group::Free { rank } => {
                assert!(idx < *rank);
                GroupWord::Free(vec![idx as i32 + 1])
            }
            Group::Lattice { dim } => {
                let mut v = vec![0; *dim];
                v[idx] = 1;
                GroupWord::Lattice(v)
            }
            Group::Heisenberg => match idx {
                0 => GroupWord::Heis { a: 1, b: 0, c: 0 },
                1 => GroupWord::Heis { a: 0, b: 1, c: 0 },
                2 => GroupWord::Heis { a: 0, b: 0, c: 1 },
                _ => panic!("heisenberg has three generators"),
            },
        };
        if inverse {
            w.inverse()
        } else {
            w
        }
    }

    /// Word length for the group's standard metric: reduced length for free
    /// groups, the box (sup-norm) metric for lattices, and BFS distance over
    /// `{x, x^-1, y, y^-1}` for the Heisenberg group (`z` is derived).
    pub fn word_length(&self, w: &GroupWord) -> Result<usize> {
        match (self, w) {
            (Group::Free { .. }, GroupWord::Free(ls)) => Ok(ls.len()),
            (Group::Lattice { .. }, GroupWord::Lattice(v)) => {
                Ok(v.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0))
            }
            (Group::Heisenberg, GroupWord::Heis { .. }) => {
                Ok(heis_degrees(std::slice::from_ref(w))?[0])
            }
            _ => unreachable!("group word kind mismatch"),
        }
    }
}

/// The supported algebra families.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AlgebraFamily {
    /// Free associative algebra on `rank` generators.
    FreeAssoc { rank: usize },
    /// Commutative polynomial algebra on `rank` generators.
    CommutativePoly { rank: usize },
    /// First Weyl algebra: generators x, y with `y*x = x*y + 1`.
    Weyl1,
    /// Group algebra of one of the supported groups.
    GroupAlgebra(Group),
    /// Rational quaternions with basis 1, i, j, k.
    Quaternions,
}

fn default_names(n: usize, short: &[&str], prefix: &str) -> Vec<String> {
    if n <= short.len() {
        short[..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }
}

const MAX_RANK: usize = 16;

impl AlgebraFamily {
    pub fn free_assoc(rank: usize) -> Result<Self> {
        check_rank(rank)?;
        Ok(AlgebraFamily::FreeAssoc { rank })
    }

    pub fn commutative_poly(rank: usize) -> Result<Self> {
        check_rank(rank)?;
        Ok(AlgebraFamily::CommutativePoly { rank })
    }

    pub fn free_group(rank: usize) -> Result<Self> {
        check_rank(rank)?;
        Ok(AlgebraFamily::GroupAlgebra(Group::Free { rank }))
    }

    pub fn lattice(dim: usize) -> Result<Self> {
        check_rank(dim)?;
        Ok(AlgebraFamily::GroupAlgebra(Group::Lattice { dim }))
    }

    pub fn heisenberg() -> Self {
        AlgebraFamily::GroupAlgebra(Group::Heisenberg)
    }

    pub fn is_group_algebra(&self) -> bool {
        matches!(self, AlgebraFamily::GroupAlgebra(_))
    }

    pub fn group(&self) -> Option<&Group> {
        match self {
            AlgebraFamily::GroupAlgebra(g) => Some(g),
            _ => None,
        }
    }

    pub fn generator_names(&self) -> Vec<String> {
        match self {
            AlgebraFamily::FreeAssoc { rank } | AlgebraFamily::CommutativePoly { rank } => {
                default_names(*rank, &["x", "y", "z", "w"], "x")
            }
            AlgebraFamily::Weyl1 => vec!["x".into(), "y".into()],
            AlgebraFamily::GroupAlgebra(g) => g.generator_names(),
            AlgebraFamily::Quaternions => vec!["i".into(), "j".into(), "k".into()],
        }
    }

    /// The word of the multiplicative unit.
    pub fn one_word(&self) -> NormalWord {
        match self {
            AlgebraFamily::FreeAssoc { .. } => NormalWord::Free(Vec::new()),
            AlgebraFamily::CommutativePoly { rank } => NormalWord::Monomial(vec![0; *rank]),
            AlgebraFamily::Weyl1 => NormalWord::Weyl { x: 0, y: 0 },
            AlgebraFamily::GroupAlgebra(g) => NormalWord::Group(g.identity()),
            AlgebraFamily::Quaternions => NormalWord::Quat(0),
        }
    }

    /// The word of generator `idx`.
    pub fn generator_word(&self, idx: usize) -> NormalWord {
        match self {
            AlgebraFamily::FreeAssoc { rank } => {
                assert!(idx < *rank);
                NormalWord::Free(vec![idx as u16])
            }
            AlgebraFamily::CommutativePoly { rank } => {
                let mut e = vec![0; *rank];
                e[idx] = 1;
                NormalWord::Monomial(e)
            }
            AlgebraFamily::Weyl1 => match idx {
                0 => NormalWord::Weyl { x: 1, y: 0 },
                1 => NormalWord::Weyl { x: 0, y: 1 },
                _ => panic!("weyl algebra has two generators"),
            },
            AlgebraFamily::GroupAlgebra(g) => NormalWord::Group(g.generator_word(idx, false)),
            AlgebraFamily::Quaternions => {
                assert!(idx < 3);
                NormalWord::Quat(idx as u8 + 1)
            }
        }
    }

    /// Generators as elements, in name order.
    pub fn generators(&self) -> Vec<AlgebraElement> {
        (0..self.generator_names().len())
            .map(|i| AlgebraElement::from_word(self.clone(), self.generator_word(i)))
            .collect()
    }

    /// For group algebras: generators followed by their inverses.
    pub fn symmetric_generators(&self) -> Vec<AlgebraElement> {
        let mut gens = self.generators();
        if let AlgebraFamily::GroupAlgebra(g) = self {
            let n = match g {
                Group::Heisenberg => 2, // z is derived, not a metric generator
                _ => gens.len(),
            };
            gens.truncate(n);
            for i in 0..n {
                let w = NormalWord::Group(g.generator_word(i, true));
                gens.push(AlgebraElement::from_word(self.clone(), w));
            }
        }
        gens
    }

    /// Exact product of two basis words as a linear combination.
    pub fn mul_words(&self, a: &NormalWord, b: &NormalWord) -> Vec<(NormalWord, Rat)> {
        match (self, a, b) {
            (AlgebraFamily::FreeAssoc { .. }, NormalWord::Free(u), NormalWord::Free(v)) => {
                let mut w = u.clone();
                w.extend_from_slice(v);
                vec![(NormalWord::Free(w), Rat::one())]
            }
            (AlgebraFamily::CommutativePoly { .. }, NormalWord::Monomial(u), NormalWord::Monomial(v)) => {
                let e = u.iter().zip(v).map(|(x, y)| x + y).collect();
                vec![(NormalWord::Monomial(e), Rat::one())]
            }
            (AlgebraFamily::Weyl1, NormalWord::Weyl { x: i, y: j }, NormalWord::Weyl { x: k, y: l }) => {
                weyl_mul(*i, *j, *k, *l)
            }
            (AlgebraFamily::GroupAlgebra(_), NormalWord::Group(u), NormalWord::Group(v)) => {
                vec![(NormalWord::Group(u.mul(v)), Rat::one())]
            }
            (AlgebraFamily::Quaternions, NormalWord::Quat(u), NormalWord::Quat(v)) => {
                let (idx, sign) = quat_mul(*u, *v);
                vec![(NormalWord::Quat(idx), Rat::from_int(sign as i64))]
            }
            _ => unreachable!("word does not belong to this family"),
        }
    }

    /// Filtration degree of a single word (word length for group algebras).
    pub fn word_degree(&self, w: &NormalWord) -> Result<usize> {
        match (self, w) {
            (AlgebraFamily::GroupAlgebra(g), NormalWord::Group(gw)) => g.word_length(gw),
            _ => Ok(w.grade() as usize),
        }
    }

    /// Degrees of several words at once (one BFS for Heisenberg).
    pub fn word_degrees(&self, ws: &[NormalWord]) -> Result<Vec<usize>> {
        if let AlgebraFamily::GroupAlgebra(Group::Heisenberg) = self {
            let gws: Vec<GroupWord> = ws
                .iter()
                .map(|w| match w {
                    NormalWord::Group(g) => g.clone(),
                    _ => unreachable!("word does not belong to this family"),
                })
                .collect();
            heis_degrees(&gws)
        } else {
            ws.iter().map(|w| self.word_degree(w)).collect()
        }
    }

    /// Number of words of degree at most `d`, if a closed form exists.
    pub fn ball_size(&self, d: usize) -> Option<u128> {
        let d = d as u128;
        match self {
            AlgebraFamily::FreeAssoc { rank } => {
                let g = *rank as u128;
                let mut total: u128 = 0;
                let mut pow: u128 = 1;
                for _ in 0..=d {
                    total = total.checked_add(pow)?;
                    pow = pow.checked_mul(g)?;
                }
                Some(total)
            }
            AlgebraFamily::CommutativePoly { rank } => {
                // C(d + rank, rank)
                let mut num: u128 = 1;
                for i in 1..=(*rank as u128) {
                    num = num.checked_mul(d + i)? / i;
                }
                Some(num)
            }
            AlgebraFamily::Weyl1 => Some((d + 1) * (d + 2) / 2),
            AlgebraFamily::GroupAlgebra(Group::Free { rank }) => {
                let r = *rank as u128;
                let mut total: u128 = 1;
                let mut sphere: u128 = 2 * r;
                for _ in 1..=d {
                    total = total.checked_add(sphere)?;
                    sphere = sphere.checked_mul(2 * r - 1)?;
                }
                Some(total)
            }
            AlgebraFamily::GroupAlgebra(Group::Lattice { dim }) => {
                (2 * d + 1).checked_pow(*dim as u32)
            }
            AlgebraFamily::GroupAlgebra(Group::Heisenberg) => None,
            AlgebraFamily::Quaternions => Some(if d == 0 { 1 } else { 4 }),
        }
    }
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 || rank > MAX_RANK {
        return Err(Error::Invalid(format!(
            "rank must be between 1 and {MAX_RANK}, got {rank}"
        )));
    }
    Ok(())
}

impl fmt::Display for AlgebraFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraFamily::FreeAssoc { rank } => write!(f, "free:{rank}"),
            AlgebraFamily::CommutativePoly { rank } => write!(f, "poly:{rank}"),
            AlgebraFamily::Weyl1 => write!(f, "weyl"),
            AlgebraFamily::GroupAlgebra(Group::Free { rank }) => write!(f, "fgroup:{rank}"),
            AlgebraFamily::GroupAlgebra(Group::Lattice { dim }) => write!(f, "z:{dim}"),
            AlgebraFamily::GroupAlgebra(Group::Heisenberg) => write!(f, "heis"),
            AlgebraFamily::Quaternions => write!(f, "quat"),
        }
    }
}

impl FromStr for AlgebraFamily {
    type Err = Error;

    /// Selector grammar: `free:N`, `poly:N`, `weyl`, `quat`, `fgroup:N`
    /// (alias `f2`), `z:N`, `heis`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::BadFamily(s.to_string());
        match s {
            "weyl" => return Ok(AlgebraFamily::Weyl1),
            "quat" => return Ok(AlgebraFamily::Quaternions),
            "heis" => return Ok(AlgebraFamily::heisenberg()),
            "f2" => return AlgebraFamily::free_group(2),
            _ => {}
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let n: usize = arg.parse().map_err(|_| bad())?;
        match kind {
            "free" => AlgebraFamily::free_assoc(n).map_err(|_| bad()),
            "poly" => AlgebraFamily::commutative_poly(n).map_err(|_| bad()),
            "fgroup" => AlgebraFamily::free_group(n).map_err(|_| bad()),
            "z" => AlgebraFamily::lattice(n).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

/// Complete ordered basis of all words of degree at most `degree_bound`,
/// sorted by (degree, canonical word order) so that a smaller truncation is
/// always a prefix of a larger one.
#[derive(Clone, Debug)]
pub struct Truncation {
    family: AlgebraFamily,
    degree_bound: usize,
    basis: Vec<NormalWord>,
    index: HashMap<NormalWord, usize>,
}

impl Truncation {
    pub fn new(family: &AlgebraFamily, degree_bound: usize) -> Result<Self> {
        if let Some(size) = family.ball_size(degree_bound) {
            if size > AMBIENT_CAP as u128 {
                return Err(Error::CapExceeded {
                    requested: size.min(usize::MAX as u128) as usize,
                    cap: AMBIENT_CAP,
                });
            }
        }
        let basis = enumerate_basis(family, degree_bound)?;
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Ok(Truncation {
            family: family.clone(),
            degree_bound,
            basis,
            index,
        })
    }

    pub fn family(&self) -> &AlgebraFamily {
        &self.family
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn word(&self, i: usize) -> &NormalWord {
        &self.basis[i]
    }

    pub fn words(&self) -> &[NormalWord] {
        &self.basis
    }

    pub fn index_of(&self, w: &NormalWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Coordinates of an element over this basis; errors if a term does not
    /// fit the degree bound.
    pub fn element_to_vec(&self, e: &AlgebraElement) -> Result<SparseVec> {
        if e.family() != &self.family {
            return Err(Error::FamilyMismatch {
                left: e.family().to_string(),
                right: self.family.to_string(),
            });
        }
        let mut v: SparseVec = Vec::with_capacity(e.terms().len());
        for (w, c) in e.terms() {
            let idx = self.index_of(w).ok_or_else(|| {
                Error::Invalid(format!(
                    "term of degree beyond the truncation bound {}",
                    self.degree_bound
                ))
            })?;
            v.push((idx, c.clone()));
        }
        v.sort_by_key(|e| e.0);
        Ok(v)
    }

    pub fn vec_to_element(&self, v: &[(usize, Rat)]) -> AlgebraElement {
        let mut e = AlgebraElement::zero(self.family.clone());
        for (i, c) in v {
            e.add_term(self.basis[*i].clone(), c.clone());
        }
        e
    }
}

/// Matrix of left multiplication `v -> a * v` from `src` into `dst`.
/// `dst` must be deep enough to hold every product.
pub fn as_operator(a: &AlgebraElement, src: &Truncation, dst: &Truncation) -> Result<Matrix> {
    operator_impl(a, src, dst, false)
}

/// Matrix of right multiplication `v -> v * a` (used by the mirrored Ore
/// solver mode).
pub fn as_operator_right(a: &AlgebraElement, src: &Truncation, dst: &Truncation) -> Result<Matrix> {
    operator_impl(a, src, dst, true)
}

fn operator_impl(
    a: &AlgebraElement,
    src: &Truncation,
    dst: &Truncation,
    right: bool,
) -> Result<Matrix> {
    if a.family() != src.family() || src.family() != dst.family() {
        return Err(Error::FamilyMismatch {
            left: a.family().to_string(),
            right: src.family().to_string(),
        });
    }
    if !a.is_zero() {
        let need = src.degree_bound() + a.degree()?;
        if dst.degree_bound() < need {
            return Err(Error::ShapeMismatch {
                expected: need,
                got: dst.degree_bound(),
            });
        }
    }
    let fam = src.family();
    let mut rows: Vec<SparseVec> = vec![Vec::new(); dst.len()];
    for j in 0..src.len() {
        let w = src.word(j);
        for (t, c) in a.terms() {
            let products = if right {
                fam.mul_words(w, t)
            } else {
                fam.mul_words(t, w)
            };
            for (pw, pc) in products {
                let coeff = c * &pc;
                if coeff.is_zero() {
                    continue;
                }
                let i = dst
                    .index_of(&pw)
                    .expect("product degree within the target bound");
                rows[i].push((j, coeff));
            }
        }
    }
    // Rows may hold several contributions per column; from_rows merges them.
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().map(|(c, v)| (c, v)).collect())
        .collect();
    Matrix::from_rows(src.len(), rows).map(|m| {
        debug_assert_eq!(m.rows(), dst.len());
        m
    })
}

fn enumerate_basis(family: &AlgebraFamily, d: usize) -> Result<Vec<NormalWord>> {
    let mut basis: Vec<NormalWord> = Vec::new();
    let push = |w: NormalWord, basis: &mut Vec<NormalWord>| -> Result<()> {
        if basis.len() >= AMBIENT_CAP {
            return Err(Error::CapExceeded {
                requested: basis.len() + 1,
                cap: AMBIENT_CAP,
            });
        }
        basis.push(w);
        Ok(())
    };
    match family {
        AlgebraFamily::FreeAssoc { rank } => {
            for len in 0..=d {
                let mut word = vec![0u16; len];
                loop {
                    push(NormalWord::Free(word.clone()), &mut basis)?;
                    // Odometer in lexicographic order.
                    let mut pos = len;
                    while pos > 0 {
                        pos -= 1;
                        word[pos] += 1;
                        if (word[pos] as usize) < *rank {
                            break;
                        }
                        word[pos] = 0;
                        if pos == 0 {
                            pos = usize::MAX;
                            break;
                        }
                    }
                    if len == 0 || pos == usize::MAX {
                        break;
                    }
                }
            }
        }
        AlgebraFamily::CommutativePoly { rank } => {
            for total in 0..=d {
                let mut stack = vec![(Vec::<u32>::new(), total)];
                while let Some((prefix, rem)) = stack.pop() {
                    if prefix.len() == rank - 1 {
                        let mut e = prefix.clone();
                        e.push(rem as u32);
                        push(NormalWord::Monomial(e), &mut basis)?;
                        continue;
                    }
                    // Emit larger leading exponents first (graded word order);
                    // the stack is LIFO so push in reverse.
                    for head in 0..=rem {
                        let mut p = prefix.clone();
                        p.push(head as u32);
                        stack.push((p, rem - head));
                    }
                }
            }
        }
        AlgebraFamily::Weyl1 => {
            for total in 0..=d {
                for x in (0..=total).rev() {
                    push(
                        NormalWord::Weyl {
                            x: x as u32,
                            y: (total - x) as u32,
                        },
                        &mut basis,
                    )?;
                }
            }
        }
        AlgebraFamily::GroupAlgebra(Group::Free { rank }) => {
            // Letters in canonical order: a, a^-1, b, b^-1, ...
            let letters: Vec<i32> = (1..=*rank as i32).flat_map(|g| [g, -g]).collect();
            let mut level: Vec<Vec<i32>> = vec![Vec::new()];
            push(NormalWord::Group(GroupWord::Free(Vec::new())), &mut basis)?;
            for _ in 1..=d {
                let mut next = Vec::with_capacity(level.len() * (2 * rank - 1));
                for w in &level {
                    for &l in &letters {
                        if w.last() == Some(&-l) {
                            continue;
                        }
                        let mut nw = w.clone();
                        nw.push(l);
                        push(NormalWord::Group(GroupWord::Free(nw.clone())), &mut basis)?;
                        next.push(nw);
                    }
                }
                level = next;
            }
        }
        AlgebraFamily::GroupAlgebra(Group::Lattice { dim }) => {
            let mut points: Vec<Vec<i64>> = Vec::new();
            let bound = d as i64;
            let mut cur = vec![-bound; *dim];
            loop {
                points.push(cur.clone());
                let mut pos = *dim;
                loop {
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                    pos -= 1;
                    cur[pos] += 1;
                    if cur[pos] <= bound {
                        break;
                    }
                    cur[pos] = -bound;
                }
                if pos == usize::MAX {
                    break;
                }
            }
            let mut words: Vec<NormalWord> = points
                .into_iter()
                .map(|p| NormalWord::Group(GroupWord::Lattice(p)))
                .collect();
            words.sort();
            for w in words {
                push(w, &mut basis)?;
            }
        }
        AlgebraFamily::GroupAlgebra(Group::Heisenberg) => {
            for level in heis_levels(d)? {
                let mut ws: Vec<NormalWord> = level.into_iter().map(NormalWord::Group).collect();
                ws.sort();
                for w in ws {
                    push(w, &mut basis)?;
                }
            }
        }
        AlgebraFamily::Quaternions => {
            push(NormalWord::Quat(0), &mut basis)?;
            if d >= 1 {
                for i in 1..=3 {
                    push(NormalWord::Quat(i), &mut basis)?;
                }
            }
        }
    }
    Ok(basis)
}

fn heis_neighbors(w: &GroupWord) -> [GroupWord; 4] {
    let gens = [
        GroupWord::Heis { a: 1, b: 0, c: 0 },
        GroupWord::Heis { a: -1, b: 0, c: 0 },
        GroupWord::Heis { a: 0, b: 1, c: 0 },
        GroupWord::Heis { a: 0, b: -1, c: 0 },
    ];
    [
        w.mul(&gens[0]),
        w.mul(&gens[1]),
        w.mul(&gens[2]),
        w.mul(&gens[3]),
    ]
}

/// BFS level sets of the Heisenberg Cayley graph over `{x, x^-1, y, y^-1}`
/// out to radius `d`, capped at the ambient bound.
pub fn heis_levels(d: usize) -> Result<Vec<Vec<GroupWord>>> {
    let mut seen: HashMap<GroupWord, usize> = HashMap::new();
    let start = GroupWord::Heis { a: 0, b: 0, c: 0 };
    seen.insert(start.clone(), 0);
    let mut levels = vec![vec![start]];
    for radius in 1..=d {
        let mut next = Vec::new();
        for w in &levels[radius - 1] {
            for n in heis_neighbors(w) {
                if !seen.contains_key(&n) {
                    if seen.len() >= AMBIENT_CAP {
                        return Err(Error::CapExceeded {
                            requested: seen.len() + 1,
                            cap: AMBIENT_CAP,
                        });
                    }
                    seen.insert(n.clone(), radius);
                    next.push(n);
                }
            }
        }
        levels.push(next);
    }
    Ok(levels)
}

/// Cayley-ball sizes `(n, |B_n|)` for the Heisenberg group; unlike
/// `heis_levels` this is not capped by the subspace ambient bound, only by
/// a generous node budget.
pub fn heis_ball_sizes(n_max: usize) -> Result<Vec<(usize, usize)>> {
    const NODE_BUDGET: usize = 4_000_000;
    let mut seen: HashMap<GroupWord, ()> = HashMap::new();
    let start = GroupWord::Heis { a: 0, b: 0, c: 0 };
    seen.insert(start.clone(), ());
    let mut frontier = vec![start];
    let mut out = vec![(0, 1)];
    for n in 1..=n_max {
        let mut next = Vec::new();
        for w in &frontier {
            for nb in heis_neighbors(w) {
                if !seen.contains_key(&nb) {
                    if seen.len() >= NODE_BUDGET {
                        return Err(Error::Invalid(format!(
                            "heisenberg BFS exceeded the node budget at radius {n}"
                        )));
                    }
                    seen.insert(nb.clone(), ());
                    next.push(nb);
                }
            }
        }
        frontier = next;
        out.push((n, seen.len()));
    }
    Ok(out)
}

const HEIS_RADIUS_LIMIT: usize = 48;

/// BFS word lengths of several Heisenberg elements in one sweep.
fn heis_degrees(targets: &[GroupWord]) -> Result<Vec<usize>> {
    let mut remaining: HashMap<&GroupWord, Vec<usize>> = HashMap::new();
    for (i, t) in targets.iter().enumerate() {
        remaining.entry(t).or_default().push(i);
    }
    let mut out = vec![0usize; targets.len()];
    let mut seen: HashMap<GroupWord, ()> = HashMap::new();
    let start = GroupWord::Heis { a: 0, b: 0, c: 0 };
    if let Some(idxs) = remaining.remove(&start) {
        for i in idxs {
            out[i] = 0;
        }
    }
    seen.insert(start.clone(), ());
    let mut frontier = vec![start];
    let mut radius = 0;
    while !remaining.is_empty() {
        radius += 1;
        if radius > HEIS_RADIUS_LIMIT {
            return Err(Error::Invalid(format!(
                "heisenberg word length exceeds the search radius {HEIS_RADIUS_LIMIT}"
            )));
        }
        let mut next = Vec::new();
        for w in &frontier {
            for nb in heis_neighbors(w) {
                if !seen.contains_key(&nb) {
                    seen.insert(nb.clone(), ());
                    if let Some(idxs) = remaining.remove(&nb) {
                        for i in idxs {
                            out[i] = radius;
                        }
                    }
                    next.push(nb);
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin;

    #[test]
    fn selectors_round_trip() {
        for s in ["free:2", "poly:3", "weyl", "fgroup:2", "z:2", "heis", "quat"] {
            let fam: AlgebraFamily = s.parse().unwrap();
            assert_eq!(fam.to_string(), s);
        }
        let f2: AlgebraFamily = "f2".parse().unwrap();
        assert_eq!(f2, AlgebraFamily::free_group(2).unwrap());
        assert!("free:0".parse::<AlgebraFamily>().is_err());
        assert!("nope".parse::<AlgebraFamily>().is_err());
    }

    /// Independent enumeration oracles for truncation sizes.
    fn count_free_words(rank: usize, d: usize) -> usize {
        (0..=d).map(|l| rank.pow(l as u32)).sum()
    }

    fn count_reduced_words(rank: usize, d: usize) -> usize {
        // Generate-and-filter: all strings over the 2r letters, keep reduced.
        let letters: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
        let mut count = 0;
        for len in 0..=d {
            let mut stack: Vec<Vec<i32>> = vec![Vec::new()];
            while let Some(w) = stack.pop() {
                if w.len() == len {
                    count += 1;
                    continue;
                }
                for &l in &letters {
                    if w.last() == Some(&-l) {
                        continue;
                    }
                    let mut nw = w.clone();
                    nw.push(l);
                    stack.push(nw);
                }
            }
        }
        count
    }

    #[test]
    fn truncation_sizes_match_enumeration() {
        let free2 = AlgebraFamily::free_assoc(2).unwrap();
        for n in 0..=6 {
            let t = Truncation::new(&free2, n).unwrap();
            assert_eq!(t.len(), count_free_words(2, n));
            assert_eq!(t.len(), (1 << (n + 1)) - 1);
            assert_eq!(t.len() as u128, free2.ball_size(n).unwrap());
        }
        let fg2 = AlgebraFamily::free_group(2).unwrap();
        for n in 0..=5 {
            let t = Truncation::new(&fg2, n).unwrap();
            assert_eq!(t.len(), count_reduced_words(2, n));
            assert_eq!(t.len(), 2 * 3usize.pow(n as u32) - 1);
        }
        let weyl = AlgebraFamily::Weyl1;
        for n in 0..=10 {
            let t = Truncation::new(&weyl, n).unwrap();
            assert_eq!(t.len(), (n + 1) * (n + 2) / 2);
        }
        let z2 = AlgebraFamily::lattice(2).unwrap();
        for n in 0..=5 {
            let t = Truncation::new(&z2, n).unwrap();
            assert_eq!(t.len(), (2 * n + 1) * (2 * n + 1));
        }
    }

    #[test]
    fn truncation_is_prefix_of_larger() {
        for fam in [
            AlgebraFamily::free_assoc(2).unwrap(),
            AlgebraFamily::commutative_poly(2).unwrap(),
            AlgebraFamily::Weyl1,
            AlgebraFamily::free_group(2).unwrap(),
            AlgebraFamily::lattice(2).unwrap(),
            AlgebraFamily::heisenberg(),
            AlgebraFamily::Quaternions,
        ] {
            let small = Truncation::new(&fam, 3).unwrap();
            let large = Truncation::new(&fam, 4).unwrap();
            assert_eq!(&large.words()[..small.len()], small.words());
        }
    }

    #[test]
    fn truncation_degrees_are_sorted_and_exact() {
        let heis = AlgebraFamily::heisenberg();
        let t = Truncation::new(&heis, 4).unwrap();
        let degs = heis.word_degrees(t.words()).unwrap();
        let mut sorted = degs.clone();
        sorted.sort();
        assert_eq!(degs, sorted);
        assert!(degs.iter().all(|&d| d <= 4));
        // z = x y x^-1 y^-1 has word length 4.
        let z = NormalWord::Group(GroupWord::Heis { a: 0, b: 0, c: 1 });
        assert_eq!(heis.word_degree(&z).unwrap(), 4);
    }

    #[test]
    fn heisenberg_ball_sizes() {
        let sizes = heis_ball_sizes(3).unwrap();
        assert_eq!(sizes[0], (0, 1));
        assert_eq!(sizes[1], (1, 5));
        // Pinned after the first BFS run; kept as a regression constant.
        assert_eq!(sizes[2], (2, 17));
    }

    #[test]
    fn cap_is_enforced() {
        let free2 = AlgebraFamily::free_assoc(2).unwrap();
        assert!(matches!(
            Truncation::new(&free2, 13),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn operator_identity_and_shift() {
        let poly1 = AlgebraFamily::commutative_poly(1).unwrap();
        let src = Truncation::new(&poly1, 2).unwrap();
        let dst = Truncation::new(&poly1, 3).unwrap();
        let one = AlgebraElement::one(poly1.clone());
        let id = as_operator(&one, &src, &dst).unwrap();
        // Inclusion: identity on the shared prefix of the bases.
        for j in 0..src.len() {
            assert_eq!(id.row(j), &[(j, Rat::one())]);
        }
        let x = poly1.generators()[0].clone();
        let shift = as_operator(&x, &src, &dst).unwrap();
        let v = exactlin::Subspace::full(src.len());
        let img = exactlin::image(&shift, &v).unwrap();
        assert_eq!(img.dim(), 3);
        // 1 -> x, x -> x^2, x^2 -> x^3: the image misses the constant.
        assert!(!img.contains_vec(&[(0, Rat::one())]));
    }

    #[test]
    fn quaternion_left_multiplication_invertible() {
        let quat = AlgebraFamily::Quaternions;
        let t1 = Truncation::new(&quat, 1).unwrap();
        let t2 = Truncation::new(&quat, 2).unwrap();
        assert_eq!(t2.len(), 4);
        // i acts as a signed permutation, hence invertibly.
        let i = quat.generators()[0].clone();
        let m = as_operator(&i, &t1, &t2).unwrap();
        assert_eq!(exactlin::rref(&m).dim(), 4);
        // Every nonzero element acts invertibly (quaternions are a division
        // algebra); spot-check a few combinations.
        let j = quat.generators()[1].clone();
        let k = quat.generators()[2].clone();
        let one = AlgebraElement::one(quat.clone());
        for e in [
            one.add(&i),
            i.sub(&j).add(&k),
            one.scale(&Rat::new(2, 3).unwrap()).add(&k),
        ] {
            let m = as_operator(&e, &t1, &t2).unwrap();
            assert_eq!(exactlin::rref(&m).dim(), 4, "element {e} must be invertible");
        }
    }
}
