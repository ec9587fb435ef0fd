//! Integral ternary quadratic forms and their integral isometries.
//!
//! Vectors are columns and a matrix `g` acts by `x ↦ g·x`, so `g` preserves
//! the form `Q(x) = xᵀ·F·x` exactly when `gᵀ·F·g = F`.

use thiserror::Error;

pub type Vec3 = [i64; 3];
/// Row-major 3×3 integer matrix.
pub type Mat3 = [[i64; 3]; 3];

pub const IDENTITY: Mat3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is degenerate (discriminant 0)")]
    Degenerate,
    #[error("form has signature ({positive},{negative}), expected an indefinite (2,1) form")]
    WrongSignature { positive: usize, negative: usize },
    #[error("matrix {matrix:?} is not an isometry: gᵀFg ≠ F")]
    NotIsometry { matrix: Mat3 },
    #[error("matrix {matrix:?} has determinant {det}, expected ±1")]
    BadDeterminant { matrix: Mat3, det: i64 },
}

/// An integral ternary quadratic form `Q(x) = xᵀ·gram·x` of signature (2,1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernaryForm {
    gram: Mat3,
    discriminant: i64,
}

impl TernaryForm {
    pub fn new(gram: Mat3) -> Result<Self, FormError> {
        for i in 0..3 {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(FormError::NotSymmetric);
                }
            }
        }
        let discriminant = det(&gram);
        if discriminant == 0 {
            return Err(FormError::Degenerate);
        }
        let (positive, negative) = signature(&gram);
        if (positive, negative) != (2, 1) {
            return Err(FormError::WrongSignature { positive, negative });
        }
        Ok(Self { gram, discriminant })
    }

    /// `a·x² + b·y² + c·z²`.
    pub fn diagonal(a: i64, b: i64, c: i64) -> Result<Self, FormError> {
        Self::new([[a, 0, 0], [0, b, 0], [0, 0, c]])
    }

    /// `x² + y² − z²`.
    pub fn pythagorean() -> Self {
        Self::diagonal(1, 1, -1).expect("x²+y²−z² is a valid (2,1) form")
    }

    pub fn gram(&self) -> &Mat3 {
        &self.gram
    }

    /// Determinant of the Gram matrix.
    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    /// `xᵀ·F·x`.
    pub fn evaluate(&self, x: &Vec3) -> i128 {
        self.bilinear(x, x)
    }

    /// `xᵀ·F·y`.
    pub fn bilinear(&self, x: &Vec3, y: &Vec3) -> i128 {
        let mut acc = 0i128;
        for i in 0..3 {
            for j in 0..3 {
                acc += x[i] as i128 * self.gram[i][j] as i128 * y[j] as i128;
            }
        }
        acc
    }

    /// True iff `gᵀ·F·g = F` entrywise.
    pub fn is_isometry(&self, g: &Mat3) -> bool {
        // Entry (i, j) of gᵀFg is the bilinear pairing of columns i and j.
        let cols = columns(g);
        (0..3).all(|i| {
            (0..3).all(|j| self.bilinear(&cols[i], &cols[j]) == self.gram[i][j] as i128)
        })
    }
}

/// An integral isometry of a fixed form, with determinant ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Isometry {
    matrix: Mat3,
    det: i64,
}

impl Isometry {
    pub fn new(form: &TernaryForm, matrix: Mat3) -> Result<Self, FormError> {
        if !form.is_isometry(&matrix) {
            return Err(FormError::NotIsometry { matrix });
        }
        let d = det(&matrix);
        if d.abs() != 1 {
            return Err(FormError::BadDeterminant { matrix, det: d });
        }
        Ok(Self { matrix, det: d })
    }

    pub fn identity() -> Self {
        Self { matrix: IDENTITY, det: 1 }
    }

    /// `−I`, an isometry of every form.
    pub fn negation() -> Self {
        Self {
            matrix: [[-1, 0, 0], [0, -1, 0], [0, 0, -1]],
            det: -1,
        }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn determinant(&self) -> i64 {
        self.det
    }

    /// Integral inverse (`adj(g)·det(g)`, valid because `det = ±1`).
    pub fn inverse(&self) -> Self {
        let adj = adjugate(&self.matrix);
        let mut inv = [[0; 3]; 3];
        for (row, adj_row) in inv.iter_mut().zip(adj.iter()) {
            for (e, a) in row.iter_mut().zip(adj_row.iter()) {
                *e = a * self.det;
            }
        }
        Self {
            matrix: inv,
            det: self.det,
        }
    }

    /// `g·x`.
    pub fn apply(&self, x: &Vec3) -> Vec3 {
        mat_vec(&self.matrix, x)
    }
}

pub fn mat_vec(m: &Mat3, x: &Vec3) -> Vec3 {
    let mut out = [0i64; 3];
    for (o, row) in out.iter_mut().zip(m.iter()) {
        *o = row[0] * x[0] + row[1] * x[1] + row[2] * x[2];
    }
    out
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn det(m: &Mat3) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn adjugate(m: &Mat3) -> Mat3 {
    let mut adj = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = others(j);
            let (c0, c1) = others(i);
            let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
            adj[i][j] = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    adj
}

fn others(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn columns(m: &Mat3) -> [Vec3; 3] {
    let mut cols = [[0; 3]; 3];
    for (j, col) in cols.iter_mut().enumerate() {
        for (i, e) in col.iter_mut().enumerate() {
            *e = m[i][j];
        }
    }
    cols
}

// The characteristic polynomial of a real symmetric matrix has only real roots,
// so Descartes' rule of signs counts positive and negative eigenvalues exactly.
fn signature(g: &Mat3) -> (usize, usize) {
    let g128 = |i: usize, j: usize| g[i][j] as i128;
    let trace = g128(0, 0) + g128(1, 1) + g128(2, 2);
    let c2 = g128(0, 0) * g128(1, 1) - g128(0, 1) * g128(1, 0)
        + g128(0, 0) * g128(2, 2)
        - g128(0, 2) * g128(2, 0)
        + g128(1, 1) * g128(2, 2)
        - g128(1, 2) * g128(2, 1);
    let d = det(g) as i128;
    // det(λI − G) = λ³ − tr·λ² + c2·λ − det
    let positive = sign_changes(&[1, -trace, c2, -d]);
    let negative = sign_changes(&[-1, -trace, -c2, -d]);
    (positive, negative)
}

fn sign_changes(coeffs: &[i128]) -> usize {
    let signs: Vec<i128> = coeffs.iter().filter(|c| **c != 0).map(|c| c.signum()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// All isometries with entries in `[−bound, bound]`, optionally restricted to
/// determinant `+1`, sorted by entry mass then lexicographically.
///
/// Columns of an isometry are vectors `v` with `Q(v) = F_ii` that are pairwise
/// orthogonal in the form's pairing, so the search runs over short column lists
/// instead of all `(2B+1)⁹` matrices.
pub fn search_isometries(form: &TernaryForm, bound: i64, det_one: bool) -> Vec<Isometry> {
    let gram = form.gram();
    let mut by_norm: [Vec<Vec3>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                let v = [a, b, c];
                let q = form.evaluate(&v);
                for (i, list) in by_norm.iter_mut().enumerate() {
                    if q == gram[i][i] as i128 {
                        list.push(v);
                    }
                }
            }
        }
    }
    let mut found = Vec::new();
    for c0 in &by_norm[0] {
        for c1 in &by_norm[1] {
            if form.bilinear(c0, c1) != gram[0][1] as i128 {
                continue;
            }
            for c2 in &by_norm[2] {
                if form.bilinear(c0, c2) != gram[0][2] as i128
                    || form.bilinear(c1, c2) != gram[1][2] as i128
                {
                    continue;
                }
                let m = [[c0[0], c1[0], c2[0]], [c0[1], c1[1], c2[1]], [c0[2], c1[2], c2[2]]];
                let d = det(&m);
                if d.abs() != 1 || (det_one && d != 1) {
                    continue;
                }
                found.push(Isometry { matrix: m, det: d });
            }
        }
    }
    found.sort_by_key(|g| {
        let mass: i64 = g.matrix.iter().flatten().map(|e| e.abs()).sum();
        (mass, g.matrix)
    });
    found
}

pub fn gcd3(v: &Vec3) -> i64 {
    use num_integer::Integer;
    v[0].gcd(&v[1]).gcd(&v[2])
}

pub fn norm_squared(v: &Vec3) -> i128 {
    v.iter().map(|&e| e as i128 * e as i128).sum()
}
