//! Dense linear algebra over a [`Field`]: row reduction, affine solution sets
//! and least squares restricted to them. Used to solve the closure systems.

use crate::scalar::Field;

/// Dense row-major matrix over a field.
#[derive(Clone, Debug, PartialEq)]
pub struct FMat<F> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F>,
}

impl<F: Field> FMat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FMat { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[F]) -> Vec<F> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                let mut s = F::zero();
                for (j, xj) in x.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !xj.is_zero() {
                        s = s + a.clone() * xj.clone();
                    }
                }
                s
            })
            .collect()
    }

    fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|v| v.magnitude()).fold(0.0, f64::max)
    }
}

impl<F> std::ops::Index<(usize, usize)> for FMat<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for FMat<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

/// Solution set `{x0 + N z}` of a linear system `A x = b`.
#[derive(Clone, Debug)]
pub struct AffineSet<F> {
    pub particular: Vec<F>,
    /// Nullspace basis, one column per free variable (`n × k`).
    pub nullspace: FMat<F>,
}

/// Reduced row echelon form of the augmented matrix `[A | b]`.
/// Returns pivot columns, or `None` when the system is inconsistent.
fn rref_augmented<F: Field>(a: &FMat<F>, b: &[F]) -> Option<(FMat<F>, Vec<usize>)> {
    let (m, n) = (a.rows, a.cols);
    let mut aug = FMat::zeros(m, n + 1);
    for i in 0..m {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let scale = aug.max_magnitude();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let (best, mag) = (row..m)
            .map(|r| (r, aug[(r, col)].magnitude()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag < 0.0 || aug[(best, col)].negligible(scale) {
            continue;
        }
        if best != row {
            for j in 0..=n {
                aug.data.swap(best * (n + 1) + j, row * (n + 1) + j);
            }
        }
        let piv = aug[(row, col)].clone();
        for j in col..=n {
            aug[(row, j)] = aug[(row, j)].clone() / piv.clone();
        }
        for r in 0..m {
            if r == row || aug[(r, col)].is_zero() {
                continue;
            }
            let f = aug[(r, col)].clone();
            for j in col..=n {
                if !aug[(row, j)].is_zero() {
                    aug[(r, j)] = aug[(r, j)].clone() - f.clone() * aug[(row, j)].clone();
                }
            }
            aug[(r, col)] = F::zero();
        }
        pivots.push(col);
        row += 1;
    }
    for r in row..m {
        if !aug[(r, n)].negligible(scale) {
            return None;
        }
    }
    Some((aug, pivots))
}

/// All solutions of `A x = b`, or `None` if inconsistent.
pub fn solve_affine<F: Field>(a: &FMat<F>, b: &[F]) -> Option<AffineSet<F>> {
    let n = a.cols;
    let (aug, pivots) = rref_augmented(a, b)?;
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
    let mut particular = vec![F::zero(); n];
    for (r, &p) in pivots.iter().enumerate() {
        particular[p] = aug[(r, n)].clone();
    }
    let mut nullspace = FMat::zeros(n, free.len());
    for (k, &f) in free.iter().enumerate() {
        nullspace[(f, k)] = F::one();
        for (r, &p) in pivots.iter().enumerate() {
            nullspace[(p, k)] = -aug[(r, f)].clone();
        }
    }
    Some(AffineSet { particular, nullspace })
}

/// Unique solution of a square nonsingular system.
pub fn solve_square<F: Field>(a: &FMat<F>, b: &[F]) -> Option<Vec<F>> {
    let set = solve_affine(a, b)?;
    if set.nullspace.cols > 0 {
        return None;
    }
    Some(set.particular)
}

impl<F: Field> AffineSet<F> {
    pub fn free_count(&self) -> usize {
        self.nullspace.cols
    }

    /// Point of the set minimising `‖C x − d‖² + ridge·‖x‖²`.
    pub fn least_squares(&self, c: &FMat<F>, d: &[F], ridge: &F) -> Option<Vec<F>> {
        let k = self.free_count();
        if k == 0 {
            return Some(self.particular.clone());
        }
        let n = &self.nullspace;
        let cn = c.matmul(n);
        let r0: Vec<F> = c
            .matvec(&self.particular)
            .into_iter()
            .zip(d)
            .map(|(a, b)| b.clone() - a)
            .collect();
        let cnt = cn.transpose();
        let nt = n.transpose();
        let mut lhs = cnt.matmul(&cn);
        let ntn = nt.matmul(n);
        let mut rhs = cnt.matvec(&r0);
        let ntx = nt.matvec(&self.particular);
        for i in 0..k {
            for j in 0..k {
                lhs[(i, j)] = lhs[(i, j)].clone() + ridge.clone() * ntn[(i, j)].clone();
            }
            rhs[i] = rhs[i].clone() - ridge.clone() * ntx[i].clone();
        }
        let z = solve_square(&lhs, &rhs)?;
        let nz = n.matvec(&z);
        Some(self.particular.iter().zip(nz).map(|(a, b)| a.clone() + b).collect())
    }

    /// Minimum Euclidean norm point of the set.
    pub fn min_norm(&self) -> Option<Vec<F>> {
        let len = self.particular.len();
        let c = FMat::identity(len);
        self.least_squares(&c, &vec![F::zero(); len], &F::zero())
    }
}
