//! Finite linear combinations of normal words with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::kernel::words::{GroupWord, NormalWord};
use crate::kernel::AlgebraFamily;
use crate::rat::Rat;

/// Element of one of the supported families. Zero coefficients are never
/// stored, and the term map is ordered by the canonical word order, so the
/// representation (and the serialized expression) is canonical.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraElement {
    family: AlgebraFamily,
    terms: BTreeMap<NormalWord, Rat>,
}

impl AlgebraElement {
    pub fn zero(family: AlgebraFamily) -> Self {
        AlgebraElement {
            family,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(family: AlgebraFamily) -> Self {
        let w = family.one_word();
        AlgebraElement::from_word(family, w)
    }

    pub fn scalar(family: AlgebraFamily, c: Rat) -> Self {
        let mut e = AlgebraElement::zero(family);
        if !c.is_zero() {
            let w = e.family.one_word();
            e.terms.insert(w, c);
        }
        e
    }

    pub fn from_word(family: AlgebraFamily, w: NormalWord) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, Rat::one());
        AlgebraElement { family, terms }
    }

    pub fn family(&self) -> &AlgebraFamily {
        &self.family
    }

    pub fn terms(&self) -> &BTreeMap<NormalWord, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the unit word.
    pub fn constant_coeff(&self) -> Rat {
        self.terms
            .get(&self.family.one_word())
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, w: NormalWord, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = &*o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.family.clone());
        for (w, c) in &self.terms {
            out.terms.insert(w.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.family.clone());
        if c.is_zero() {
            return out;
        }
        for (w, v) in &self.terms {
            out.terms.insert(w.clone(), v * c);
        }
        out
    }

    /// Exact product under the family's rewriting rules.
    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        if self.family != other.family {
            return Err(Error::FamilyMismatch {
                left: self.family.to_string(),
                right: other.family.to_string(),
            });
        }
        let mut out = AlgebraElement::zero(self.family.clone());
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let c = ca * cb;
                for (w, k) in self.family.mul_words(wa, wb) {
                    out.add_term(w, &c * &k);
                }
            }
        }
        Ok(out)
    }

    /// Integer power. Negative exponents require a group algebra and a
    /// single-term element (a nonzero multiple of a group word).
    pub fn pow(&self, k: i64) -> Result<AlgebraElement> {
        if k == 0 {
            return Ok(AlgebraElement::one(self.family.clone()));
        }
        if k > 0 {
            let mut acc = AlgebraElement::one(self.family.clone());
            for _ in 0..k {
                acc = acc.mul(self)?;
            }
            return Ok(acc);
        }
        let inv = self.invert_monomial()?;
        inv.pow(-k)
    }

    /// Inverse of a single-term group-algebra element.
    fn invert_monomial(&self) -> Result<AlgebraElement> {
        if !self.family.is_group_algebra() {
            return Err(Error::NegativeExponent { pos: 0 });
        }
        if self.terms.len() != 1 {
            return Err(Error::Invalid(
                "only single-term group-algebra elements are invertible here".into(),
            ));
        }
        let (w, c) = self.terms.iter().next().expect("one term");
        let NormalWord::Group(gw) = w else {
            unreachable!("group algebra stores group words")
        };
        let mut out = AlgebraElement::zero(self.family.clone());
        out.terms
            .insert(NormalWord::Group(gw.inverse()), c.recip()?);
        Ok(out)
    }

    /// Largest filtration degree over the terms; errors on the zero element.
    pub fn degree(&self) -> Result<usize> {
        if self.terms.is_empty() {
            return Err(Error::ZeroElement);
        }
        let words: Vec<NormalWord> = self.terms.keys().cloned().collect();
        let degs = self.family.word_degrees(&words)?;
        Ok(degs.into_iter().max().expect("nonempty"))
    }

    /// Conjugate `g * self * g^-1` by a group word (group algebras only).
    pub fn conjugate_by(&self, g: &GroupWord) -> Result<AlgebraElement> {
        if !self.family.is_group_algebra() {
            return Err(Error::Invalid("conjugation needs a group algebra".into()));
        }
        let mut out = AlgebraElement::zero(self.family.clone());
        let ginv = g.inverse();
        for (w, c) in &self.terms {
            let NormalWord::Group(gw) = w else {
                unreachable!("group algebra stores group words")
            };
            out.add_term(NormalWord::Group(g.mul(gw).mul(&ginv)), c.clone());
        }
        Ok(out)
    }
}

/// Render a word as a parseable expression over the family's generators.
pub fn word_expr(family: &AlgebraFamily, w: &NormalWord) -> String {
    if w.is_unit() {
        return "1".into();
    }
    let names = family.generator_names();
    let mut parts: Vec<String> = Vec::new();
    let push_pow = |parts: &mut Vec<String>, name: &str, e: i64| {
        if e == 1 {
            parts.push(name.to_string());
        } else if e != 0 {
            parts.push(format!("{name}^{e}"));
        }
    };
    match w {
        NormalWord::Free(letters) => {
            let mut run: Option<(u16, i64)> = None;
            for &l in letters {
                match run {
                    Some((g, n)) if g == l => run = Some((g, n + 1)),
                    Some((g, n)) => {
                        push_pow(&mut parts, &names[g as usize], n);
                        run = Some((l, 1));
                    }
                    None => run = Some((l, 1)),
                }
            }
            if let Some((g, n)) = run {
                push_pow(&mut parts, &names[g as usize], n);
            }
        }
        NormalWord::Monomial(exps) => {
            for (i, &e) in exps.iter().enumerate() {
                push_pow(&mut parts, &names[i], e as i64);
            }
        }
        NormalWord::Weyl { x, y } => {
            push_pow(&mut parts, "x", *x as i64);
            push_pow(&mut parts, "y", *y as i64);
        }
        NormalWord::Group(GroupWord::Free(letters)) => {
            let mut run: Option<(i32, i64)> = None;
            for &l in letters {
                match run {
                    Some((g, n)) if g == l => run = Some((g, n + 1)),
                    Some((g, n)) => {
                        let name = &names[(g.unsigned_abs() as usize) - 1];
                        push_pow(&mut parts, name, if g < 0 { -n } else { n });
                        run = Some((l, 1));
                    }
                    None => run = Some((l, 1)),
                }
            }
            if let Some((g, n)) = run {
                let name = &names[(g.unsigned_abs() as usize) - 1];
                push_pow(&mut parts, name, if g < 0 { -n } else { n });
            }
        }
        NormalWord::Group(GroupWord::Lattice(coords)) => {
            for (i, &e) in coords.iter().enumerate() {
                push_pow(&mut parts, &names[i], e);
            }
        }
        NormalWord::Group(GroupWord::Heis { a, b, c }) => {
            push_pow(&mut parts, "x", *a);
            push_pow(&mut parts, "y", *b);
            push_pow(&mut parts, "z", *c);
        }
        NormalWord::Quat(i) => {
            parts.push(names[(*i as usize) - 1].clone());
        }
    }
    parts.join("*")
}

/// Short label for basis annotations, e.g. `x^2*y`, `a*b^-1`, `q:i`.
pub fn word_label(family: &AlgebraFamily, w: &NormalWord) -> String {
    match w {
        NormalWord::Quat(i) if *i > 0 => format!("q:{}", family.generator_names()[(*i as usize) - 1]),
        NormalWord::Quat(_) => "q:1".into(),
        _ => word_expr(family, w),
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let ws = word_expr(&self.family, w);
            if ws == "1" {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{ws}")?;
            } else {
                write!(f, "{mag}*{ws}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Group;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn families() -> Vec<AlgebraFamily> {
        vec![
            AlgebraFamily::free_assoc(2).unwrap(),
            AlgebraFamily::commutative_poly(2).unwrap(),
            AlgebraFamily::Weyl1,
            AlgebraFamily::free_group(2).unwrap(),
            AlgebraFamily::lattice(2).unwrap(),
            AlgebraFamily::heisenberg(),
            AlgebraFamily::Quaternions,
        ]
    }

    /// Random word of degree at most 3 for associativity trials.
    fn random_word(rng: &mut StdRng, fam: &AlgebraFamily) -> NormalWord {
        match fam {
            AlgebraFamily::FreeAssoc { rank } => {
                let len = rng.gen_range(0..=3);
                NormalWord::Free((0..len).map(|_| rng.gen_range(0..*rank) as u16).collect())
            }
            AlgebraFamily::CommutativePoly { rank } => {
                let mut e = vec![0u32; *rank];
                for _ in 0..rng.gen_range(0..=3) {
                    e[rng.gen_range(0..*rank)] += 1;
                }
                NormalWord::Monomial(e)
            }
            AlgebraFamily::Weyl1 => {
                let x = rng.gen_range(0..=2);
                NormalWord::Weyl {
                    x,
                    y: rng.gen_range(0..=(3 - x.min(3))),
                }
            }
            AlgebraFamily::GroupAlgebra(g) => {
                let mut w = g.identity();
                let n_gens = match g {
                    Group::Heisenberg => 2,
                    Group::Free { rank } => *rank,
                    Group::Lattice { dim } => *dim,
                };
                for _ in 0..rng.gen_range(0..=3) {
                    let idx = rng.gen_range(0..n_gens);
                    let inv = rng.gen_bool(0.5);
                    w = w.mul(&g.generator_word(idx, inv));
                }
                NormalWord::Group(w)
            }
            AlgebraFamily::Quaternions => NormalWord::Quat(rng.gen_range(0..4)),
        }
    }

    fn random_element(rng: &mut StdRng, fam: &AlgebraFamily) -> AlgebraElement {
        let mut e = AlgebraElement::zero(fam.clone());
        for _ in 0..rng.gen_range(1..=4) {
            let c = loop {
                let c = rng.gen_range(-2..=2i64);
                if c != 0 {
                    break c;
                }
            };
            e.add_term(random_word(rng, fam), Rat::from_int(c));
        }
        e
    }

    #[test]
    fn associativity_and_distributivity() {
        let mut rng = StdRng::seed_from_u64(2024);
        for fam in families() {
            for _ in 0..500 {
                let a = random_element(&mut rng, &fam);
                let b = random_element(&mut rng, &fam);
                let c = random_element(&mut rng, &fam);
                let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
                let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
                assert_eq!(ab_c, a_bc, "associativity in {fam}");
                let left = a.mul(&b.add(&c)).unwrap();
                let right = a.mul(&b).unwrap().add(&a.mul(&c).unwrap());
                assert_eq!(left, right, "distributivity in {fam}");
                let one = AlgebraElement::one(fam.clone());
                assert_eq!(one.mul(&a).unwrap(), a);
                assert_eq!(a.mul(&one).unwrap(), a);
            }
        }
    }

    #[test]
    fn group_products_are_single_words_and_subadditive() {
        let mut rng = StdRng::seed_from_u64(7);
        for fam in [
            AlgebraFamily::free_group(2).unwrap(),
            AlgebraFamily::lattice(2).unwrap(),
            AlgebraFamily::heisenberg(),
        ] {
            for _ in 0..200 {
                let u = random_word(&mut rng, &fam);
                let v = random_word(&mut rng, &fam);
                let prod = fam.mul_words(&u, &v);
                assert_eq!(prod.len(), 1);
                assert!(prod[0].1.is_one());
                let du = fam.word_degree(&u).unwrap();
                let dv = fam.word_degree(&v).unwrap();
                let dp = fam.word_degree(&prod[0].0).unwrap();
                assert!(dp <= du + dv);
            }
        }
    }

    #[test]
    fn weyl_products_normal_ordered_and_relation_holds() {
        let weyl = AlgebraFamily::Weyl1;
        let x = weyl.generators()[0].clone();
        let y = weyl.generators()[1].clone();
        let yx = y.mul(&x).unwrap();
        let xy = x.mul(&y).unwrap();
        let one = AlgebraElement::one(weyl.clone());
        assert_eq!(yx.sub(&xy), one);
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let a = random_element(&mut rng, &weyl);
            let b = random_element(&mut rng, &weyl);
            let p = a.mul(&b).unwrap();
            assert!(p.terms().keys().all(|w| matches!(w, NormalWord::Weyl { .. })));
        }
    }

    #[test]
    fn degree_examples() {
        let weyl = AlgebraFamily::Weyl1;
        let x = weyl.generators()[0].clone();
        let y = weyl.generators()[1].clone();
        let e = x.mul(&y).unwrap().add(&AlgebraElement::one(weyl.clone()));
        assert_eq!(e.degree().unwrap(), 2);
        assert!(AlgebraElement::zero(weyl).degree().is_err());

        let fg2 = AlgebraFamily::free_group(2).unwrap();
        let a = fg2.generators()[0].clone();
        let b = fg2.generators()[1].clone();
        let w = a.mul(&b).unwrap().mul(&a.pow(-1).unwrap()).unwrap();
        assert_eq!(w.degree().unwrap(), 3);

        let quat = AlgebraFamily::Quaternions;
        let i = quat.generators()[0].clone();
        let j = quat.generators()[1].clone();
        assert_eq!(i.add(&j).degree().unwrap(), 1);
    }

    #[test]
    fn free_group_pow_and_cancellation() {
        let fg2 = AlgebraFamily::free_group(2).unwrap();
        let a = fg2.generators()[0].clone();
        let prod = a.mul(&a.pow(-1).unwrap()).unwrap();
        assert_eq!(prod, AlgebraElement::one(fg2.clone()));
        // Negative powers need invertible monomials.
        let b = fg2.generators()[1].clone();
        assert!(a.add(&b).pow(-1).is_err());
        let free2 = AlgebraFamily::free_assoc(2).unwrap();
        assert!(free2.generators()[0].pow(-1).is_err());
    }
}
