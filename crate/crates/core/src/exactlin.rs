//! Exact rational linear algebra on canonical subspaces.
//!
//! Subspaces of a finite-dimensional ambient space are stored as reduced
//! row-echelon bases over the rationals, so two subspaces are equal as sets
//! of vectors exactly when their stored bases are identical. Rows are kept
//! sparse (sorted `(column, coefficient)` pairs) because most bases arising
//! from monomial balls are unit vectors.

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Hard cap on ambient dimensions. Computations that would need a larger
/// ambient space error out instead of degrading.
pub const AMBIENT_CAP: usize = 8192;

/// Sparse coordinate vector: strictly increasing column indices, nonzero
/// coefficients only.
pub type SparseVec = Vec<(usize, Rat)>;

/// `a + c * b` for sorted sparse vectors, dropping cancelled entries.
pub fn sparse_axpy(a: &[(usize, Rat)], c: &Rat, b: &[(usize, Rat)]) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((b[j].0, c * &b[j].1));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let v = &a[i].1 + &(c * &b[j].1);
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    for (col, v) in &b[j..] {
        out.push((*col, c * v));
    }
    out
}

fn sparse_scale(v: &mut SparseVec, c: &Rat) {
    for (_, x) in v.iter_mut() {
        *x = &*x * c;
    }
}

fn sparse_get<'a>(v: &'a [(usize, Rat)], col: usize) -> Option<&'a Rat> {
    v.binary_search_by_key(&col, |e| e.0).ok().map(|i| &v[i].1)
}

/// Sparse row-major matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix {
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, Rat::one())]).collect(),
        }
    }

    /// Build from sparse rows; entries are sorted, merged, and zero entries
    /// dropped so the stored form is canonical.
    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len());
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            let mut merged: SparseVec = Vec::with_capacity(r.len());
            for (col, v) in r {
                if col >= cols {
                    return Err(Error::ShapeMismatch {
                        expected: cols,
                        got: col + 1,
                    });
                }
                match merged.last_mut() {
                    Some((c, acc)) if *c == col => *acc += &v,
                    _ => merged.push((col, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            data.push(merged);
        }
        Ok(Matrix {
            rows: data.len(),
            cols,
            data,
        })
    }

    pub fn from_dense(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut sparse = Vec::with_capacity(rows.len());
        for r in &rows {
            if r.len() != cols {
                return Err(Error::ShapeMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            sparse.push(
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(i, v)| (i, v.clone()))
                    .collect(),
            );
        }
        Matrix::from_rows(cols, sparse)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, Rat)] {
        &self.data[i]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &SparseVec> {
        self.data.iter()
    }

    /// Columns as sparse vectors (indexed by row).
    pub fn columns(&self) -> Vec<SparseVec> {
        let mut cols: Vec<SparseVec> = vec![Vec::new(); self.cols];
        for (i, row) in self.data.iter().enumerate() {
            for (j, v) in row {
                cols[*j].push((i, v.clone()));
            }
        }
        cols
    }

    /// Matrix-vector product `A x` for a sparse coordinate vector.
    pub fn apply(&self, x: &[(usize, Rat)]) -> Result<SparseVec> {
        for (col, _) in x {
            if *col >= self.cols {
                return Err(Error::ShapeMismatch {
                    expected: self.cols,
                    got: col + 1,
                });
            }
        }
        let mut acc: SparseVec = Vec::new();
        for (i, row) in self.data.iter().enumerate() {
            let mut dot = Rat::zero();
            let (mut a, mut b) = (0, 0);
            while a < row.len() && b < x.len() {
                match row[a].0.cmp(&x[b].0) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        dot += &(&row[a].1 * &x[b].1);
                        a += 1;
                        b += 1;
                    }
                }
            }
            if !dot.is_zero() {
                acc.push((i, dot));
            }
        }
        Ok(acc)
    }

    pub fn to_dense(&self) -> Vec<Vec<Rat>> {
        self.data
            .iter()
            .map(|row| {
                let mut dense = vec![Rat::zero(); self.cols];
                for (j, v) in row {
                    dense[*j] = v.clone();
                }
                dense
            })
            .collect()
    }
}

/// Canonical subspace: reduced row-echelon basis plus its pivot columns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<SparseVec>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// The whole ambient space (identity basis).
    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|i| vec![(i, Rat::one())]).collect(),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis_rows(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_matrix(&self) -> Matrix {
        Matrix {
            rows: self.basis.len(),
            cols: self.ambient,
            data: self.basis.clone(),
        }
    }

    /// Residue of `v` after full reduction by this basis; zero iff `v` lies
    /// in the subspace.
    pub fn reduce_vec(&self, v: &[(usize, Rat)]) -> SparseVec {
        let mut acc: SparseVec = v.to_vec();
        for (k, &p) in self.pivots.iter().enumerate() {
            if let Some(c) = sparse_get(&acc, p) {
                let coeff = -c;
                acc = sparse_axpy(&acc, &coeff, &self.basis[k]);
            }
        }
        acc
    }

    pub fn contains_vec(&self, v: &[(usize, Rat)]) -> bool {
        self.reduce_vec(v).is_empty()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && other.basis.iter().all(|r| self.contains_vec(r))
    }

    /// Reinterpret in a larger ambient space whose coordinate order extends
    /// this one (truncation bases are prefixes of larger truncation bases).
    pub fn embed(&self, new_ambient: usize) -> Result<Subspace> {
        if new_ambient < self.ambient {
            return Err(Error::AmbientMismatch {
                left: self.ambient,
                right: new_ambient,
            });
        }
        Ok(Subspace {
            ambient: new_ambient,
            basis: self.basis.clone(),
            pivots: self.pivots.clone(),
        })
    }
}

/// Incremental Gauss-Jordan eliminator. Pivot rows are kept fully reduced
/// against each other, so `finish` only has to sort by pivot column.
struct Eliminator {
    ambient: usize,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
    pivot_of_col: Vec<Option<usize>>,
}

impl Eliminator {
    fn new(ambient: usize) -> Self {
        Eliminator {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_of_col: vec![None; ambient],
        }
    }

    fn reduce(&self, mut v: SparseVec) -> SparseVec {
        loop {
            let hit = v
                .iter()
                .find_map(|(col, _)| self.pivot_of_col[*col].map(|k| (*col, k)));
            match hit {
                None => return v,
                Some((col, k)) => {
                    let coeff = -sparse_get(&v, col).expect("entry present");
                    v = sparse_axpy(&v, &coeff, &self.rows[k]);
                }
            }
        }
    }

    /// Insert a vector; returns the new pivot column if it was independent.
    fn push(&mut self, v: SparseVec) -> Option<usize> {
        let mut v = self.reduce(v);
        if v.is_empty() {
            return None;
        }
        let lead = v[0].0;
        let inv = v[0].1.recip().expect("leading entry nonzero");
        sparse_scale(&mut v, &inv);
        // Back-substitute the new pivot column out of the existing rows.
        for row in self.rows.iter_mut() {
            if let Some(c) = sparse_get(row, lead) {
                let coeff = -c;
                *row = sparse_axpy(row, &coeff, &v);
            }
        }
        self.pivot_of_col[lead] = Some(self.rows.len());
        self.rows.push(v);
        self.pivots.push(lead);
        Some(lead)
    }

    fn finish(self) -> Subspace {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&k| self.pivots[k]);
        let mut basis = Vec::with_capacity(self.rows.len());
        let mut pivots = Vec::with_capacity(self.rows.len());
        for k in order {
            basis.push(self.rows[k].clone());
            pivots.push(self.pivots[k]);
        }
        Subspace {
            ambient: self.ambient,
            basis,
            pivots,
        }
    }
}

fn rref_rows(ambient: usize, rows: impl IntoIterator<Item = SparseVec>) -> Subspace {
    let mut elim = Eliminator::new(ambient);
    for r in rows {
        elim.push(r);
    }
    elim.finish()
}

/// Row space of `m` in canonical reduced row-echelon form.
pub fn rref(m: &Matrix) -> Subspace {
    rref_rows(m.cols(), m.data.iter().cloned())
}

/// Smallest subspace containing both arguments.
pub fn sum(u: &Subspace, w: &Subspace) -> Result<Subspace> {
    if u.ambient != w.ambient {
        return Err(Error::AmbientMismatch {
            left: u.ambient,
            right: w.ambient,
        });
    }
    let mut elim = Eliminator::new(u.ambient);
    for r in u.basis.iter().chain(w.basis.iter()) {
        elim.push(r.clone());
    }
    Ok(elim.finish())
}

/// Sum of an arbitrary list of subspaces over the same ambient.
pub fn sum_many<'a>(ambient: usize, parts: impl IntoIterator<Item = &'a Subspace>) -> Result<Subspace> {
    let mut elim = Eliminator::new(ambient);
    for p in parts {
        if p.ambient != ambient {
            return Err(Error::AmbientMismatch {
                left: ambient,
                right: p.ambient,
            });
        }
        for r in &p.basis {
            elim.push(r.clone());
        }
    }
    Ok(elim.finish())
}

/// Set intersection via the Zassenhaus double-width elimination.
pub fn intersect(u: &Subspace, w: &Subspace) -> Result<Subspace> {
    if u.ambient != w.ambient {
        return Err(Error::AmbientMismatch {
            left: u.ambient,
            right: w.ambient,
        });
    }
    let n = u.ambient;
    let mut elim = Eliminator::new(2 * n);
    for r in &u.basis {
        let mut wide: SparseVec = Vec::with_capacity(2 * r.len());
        wide.extend(r.iter().cloned());
        wide.extend(r.iter().map(|(c, v)| (c + n, v.clone())));
        elim.push(wide);
    }
    for r in &w.basis {
        elim.push(r.clone());
    }
    let reduced = elim.finish();
    let inter_rows = reduced
        .basis
        .into_iter()
        .filter(|row| row[0].0 >= n)
        .map(|row| row.into_iter().map(|(c, v)| (c - n, v)).collect());
    Ok(rref_rows(n, inter_rows))
}

/// Image `{A x : x in v}` as a subspace of the target ambient (`A.rows()`).
pub fn image(op: &Matrix, v: &Subspace) -> Result<Subspace> {
    if op.cols() != v.ambient {
        return Err(Error::ShapeMismatch {
            expected: v.ambient,
            got: op.cols(),
        });
    }
    let cols = op.columns();
    let mut elim = Eliminator::new(op.rows());
    for r in &v.basis {
        let mut acc: SparseVec = Vec::new();
        for (j, c) in r {
            acc = sparse_axpy(&acc, c, &cols[*j]);
        }
        elim.push(acc);
    }
    Ok(elim.finish())
}

/// Null space `{x : A x = 0}` over the column ambient of `A`.
pub fn kernel(op: &Matrix) -> Subspace {
    let r = rref(op);
    let n = op.cols();
    let mut is_pivot = vec![false; n];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    let mut rows = Vec::new();
    for f in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v: SparseVec = Vec::new();
        for (k, row) in r.basis.iter().enumerate() {
            if let Some(c) = sparse_get(row, f) {
                v.push((r.pivots[k], -c));
            }
        }
        v.push((f, Rat::one()));
        v.sort_by_key(|e| e.0);
        rows.push(v);
    }
    rref_rows(n, rows)
}

/// Largest subspace of `v` whose image under `op` lands in `target`.
pub fn preimage_into(op: &Matrix, v: &Subspace, target: &Subspace) -> Result<Subspace> {
    if op.cols() != v.ambient {
        return Err(Error::ShapeMismatch {
            expected: v.ambient,
            got: op.cols(),
        });
    }
    if op.rows() != target.ambient {
        return Err(Error::ShapeMismatch {
            expected: target.ambient,
            got: op.rows(),
        });
    }
    let cols = op.columns();
    // Residues of the basis images modulo `target`: a combination of basis
    // vectors maps into `target` iff the same combination of residues is 0.
    let mut residues = Vec::with_capacity(v.dim());
    for r in &v.basis {
        let mut acc: SparseVec = Vec::new();
        for (j, c) in r {
            acc = sparse_axpy(&acc, c, &cols[*j]);
        }
        residues.push(target.reduce_vec(&acc));
    }
    // Coefficient vectors annihilating the residues: kernel of the
    // transpose of the residue matrix.
    let k = v.dim();
    let mut transposed: Vec<SparseVec> = vec![Vec::new(); target.ambient];
    for (i, res) in residues.iter().enumerate() {
        for (j, c) in res {
            transposed[*j].push((i, c.clone()));
        }
    }
    let coeffs = kernel(&Matrix {
        rows: target.ambient,
        cols: k,
        data: transposed,
    });
    let rows = coeffs.basis.iter().map(|alpha| {
        let mut acc: SparseVec = Vec::new();
        for (i, c) in alpha {
            acc = sparse_axpy(&acc, c, &v.basis[*i]);
        }
        acc
    });
    Ok(rref_rows(v.ambient, rows.collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dense(rows: &[&[i64]]) -> Matrix {
        Matrix::from_dense(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from_int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn random_subspace(rng: &mut StdRng, ambient: usize) -> Subspace {
        let k = rng.gen_range(0..=ambient.min(6));
        let rows = (0..k)
            .map(|_| {
                (0..ambient)
                    .filter_map(|j| {
                        if rng.gen_bool(0.4) {
                            Some((j, Rat::from_int(rng.gen_range(-3..=3))))
                        } else {
                            None
                        }
                    })
                    .filter(|(_, v)| !v.is_zero())
                    .collect::<SparseVec>()
            })
            .collect();
        rref(&Matrix::from_rows(ambient, rows).unwrap())
    }

    #[test]
    fn rref_proportional_rows() {
        let s = rref(&dense(&[&[2, 4], &[1, 2]]));
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis_rows()[0], vec![(0, Rat::one()), (1, Rat::from_int(2))]);
    }

    #[test]
    fn rref_identity() {
        let s = rref(&dense(&[&[1, 0], &[0, 1]]));
        assert_eq!(s, Subspace::full(2));
    }

    #[test]
    fn rref_rank_two() {
        // Singular 3x3 with a nonzero 2x2 minor: rank exactly 2.
        let s = rref(&dense(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]));
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn rref_zero_matrix() {
        let s = rref(&Matrix::zero(3, 4));
        assert_eq!(s.dim(), 0);
        assert_eq!(s.ambient_dim(), 4);
    }

    #[test]
    fn sum_examples() {
        let e1 = rref(&dense(&[&[1, 0]]));
        let e2 = rref(&dense(&[&[0, 1]]));
        assert_eq!(sum(&e1, &e2).unwrap(), Subspace::full(2));
        assert_eq!(sum(&e1, &e1).unwrap(), e1);
        let d1 = rref(&dense(&[&[1, 1]]));
        let d2 = rref(&dense(&[&[1, -1]]));
        assert_eq!(sum(&d1, &d2).unwrap(), Subspace::full(2));
        let bad = sum(&e1, &Subspace::full(3));
        assert!(bad.is_err());
    }

    #[test]
    fn intersect_examples() {
        let u = rref(&dense(&[&[1, 0, 0], &[0, 1, 0]]));
        let w = rref(&dense(&[&[0, 1, 0], &[0, 0, 1]]));
        let i = intersect(&u, &w).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.contains_vec(&[(1, Rat::one())]));
        assert_eq!(intersect(&u, &u).unwrap(), u);
        let d1 = rref(&dense(&[&[1, 1]]));
        let e1 = rref(&dense(&[&[1, 0]]));
        assert_eq!(intersect(&d1, &e1).unwrap().dim(), 0);
    }

    #[test]
    fn image_examples() {
        let v = rref(&dense(&[&[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(image(&Matrix::identity(3), &v).unwrap(), v);
        assert_eq!(image(&Matrix::zero(3, 3), &v).unwrap().dim(), 0);
        // Shift e_i -> e_{i+1} on span{e1, e2} inside dim 4.
        let shift = Matrix::from_rows(
            4,
            vec![
                vec![],
                vec![(0, Rat::one())],
                vec![(1, Rat::one())],
                vec![(2, Rat::one())],
            ],
        )
        .unwrap();
        let v2 = rref(&dense(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]));
        let img = image(&shift, &v2).unwrap();
        assert_eq!(img.dim(), 2);
        assert!(img.contains_vec(&[(1, Rat::one())]));
        assert!(img.contains_vec(&[(2, Rat::one())]));
    }

    #[test]
    fn preimage_examples() {
        let v = Subspace::full(3);
        assert_eq!(preimage_into(&Matrix::identity(3), &v, &v).unwrap(), v);
        // Zero map: everything lands in the zero vector, which is in any target.
        assert_eq!(preimage_into(&Matrix::zero(3, 3), &v, &Subspace::zero(3)).unwrap(), v);
        // Shift on polynomials of degree <= 3 (coordinates 1, x, ..., x^3),
        // mapped honestly into the degree <= 4 ambient: x * v stays within
        // degree <= 3 only for v of degree <= 2.
        let shift = Matrix::from_rows(
            4,
            vec![
                vec![],
                vec![(0, Rat::one())],
                vec![(1, Rat::one())],
                vec![(2, Rat::one())],
                vec![(3, Rat::one())],
            ],
        )
        .unwrap();
        let full = Subspace::full(4);
        let target = full.embed(5).unwrap();
        let pre = preimage_into(&shift, &full, &target).unwrap();
        assert_eq!(pre.dim(), 3);
        assert!(pre.contains_vec(&[(2, Rat::one())]));
        assert!(!pre.contains_vec(&[(3, Rat::one())]));
    }

    #[test]
    fn preimage_is_largest_with_image_inside() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let ambient = rng.gen_range(1..=6);
            let v = random_subspace(&mut rng, ambient);
            let target = random_subspace(&mut rng, ambient);
            let rows = (0..ambient)
                .map(|_| {
                    (0..ambient)
                        .filter_map(|j| {
                            let x = rng.gen_range(-2..=2i64);
                            (x != 0).then(|| (j, Rat::from_int(x)))
                        })
                        .collect::<SparseVec>()
                })
                .collect();
            let op = Matrix::from_rows(ambient, rows).unwrap();
            let pre = preimage_into(&op, &v, &target).unwrap();
            assert!(v.contains(&pre));
            assert!(target.contains(&image(&op, &pre).unwrap()));
            // Maximality: every basis vector of v whose image lies in the
            // target must already be in the preimage.
            for r in v.basis_rows() {
                let img = op.apply(r).unwrap();
                if target.contains_vec(&img) {
                    assert!(pre.contains_vec(r));
                }
            }
        }
    }

    #[test]
    fn grassmann_identity_random() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..300 {
            let ambient = rng.gen_range(1..=12);
            let u = random_subspace(&mut rng, ambient);
            let w = random_subspace(&mut rng, ambient);
            let s = sum(&u, &w).unwrap();
            let i = intersect(&u, &w).unwrap();
            assert_eq!(s.dim() + i.dim(), u.dim() + w.dim());
            assert!(s.contains(&u) && s.contains(&w));
            assert!(u.contains(&i) && w.contains(&i));
        }
    }

    #[test]
    fn canonicity_idempotent_and_permutation_invariant() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let ambient = rng.gen_range(1..=8);
            let n_rows = rng.gen_range(0..=6);
            let rows: Vec<SparseVec> = (0..n_rows)
                .map(|_| {
                    (0..ambient)
                        .filter_map(|j| {
                            let x = rng.gen_range(-3..=3i64);
                            (x != 0).then(|| (j, Rat::from_int(x)))
                        })
                        .collect()
                })
                .collect();
            let m = Matrix::from_rows(ambient, rows.clone()).unwrap();
            let s = rref(&m);
            let again = rref(&s.basis_matrix());
            assert_eq!(s, again);
            let mut shuffled = rows;
            shuffled.reverse();
            let s2 = rref(&Matrix::from_rows(ambient, shuffled).unwrap());
            assert_eq!(s, s2);
        }
    }

    #[test]
    fn image_under_invertible_preserves_dim() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..40 {
            let ambient = rng.gen_range(1..=6);
            let v = random_subspace(&mut rng, ambient);
            // Random invertible matrix: retry until full rank.
            let op = loop {
                let rows: Vec<SparseVec> = (0..ambient)
                    .map(|_| {
                        (0..ambient)
                            .filter_map(|j| {
                                let x = rng.gen_range(-2..=2i64);
                                (x != 0).then(|| (j, Rat::from_int(x)))
                            })
                            .collect()
                    })
                    .collect();
                let m = Matrix::from_rows(ambient, rows).unwrap();
                if rref(&m).dim() == ambient {
                    break m;
                }
            };
            assert_eq!(image(&op, &v).unwrap().dim(), v.dim());
        }
    }

    #[test]
    fn kernel_rank_nullity() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..60 {
            let rows = rng.gen_range(1..=6);
            let cols = rng.gen_range(1..=6);
            let data: Vec<SparseVec> = (0..rows)
                .map(|_| {
                    (0..cols)
                        .filter_map(|j| {
                            let x = rng.gen_range(-2..=2i64);
                            (x != 0).then(|| (j, Rat::from_int(x)))
                        })
                        .collect()
                })
                .collect();
            let m = Matrix::from_rows(cols, data).unwrap();
            let rank = rref(&m).dim();
            let ker = kernel(&m);
            assert_eq!(rank + ker.dim(), cols);
            for v in ker.basis_rows() {
                assert!(m.apply(v).unwrap().is_empty());
            }
        }
    }
}
