//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's own linear algebra or digit logic.
#![allow(dead_code)]

use affine_fractals::{AffinePoint, Frame, FrameMode, Matrix, Rational, TransitionFamily, TransitionMatrix};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Rational {
    q(v, 1)
}

pub fn rand_q(rng: &mut impl Rng) -> Rational {
    q(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

pub fn rand_nonzero_q(rng: &mut impl Rng) -> Rational {
    loop {
        let x = rand_q(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

pub type Dense = Vec<Vec<Rational>>;

/// Leibniz expansion; fine for the sizes used here (at most 7).
pub fn det(a: &Dense) -> Rational {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Rational::zero();
    permute(&mut perm, 0, a, &mut total);
    total
}

fn permute(p: &mut Vec<usize>, k: usize, a: &Dense, total: &mut Rational) {
    if k == p.len() {
        let mut inversions = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    inversions += 1;
                }
            }
        }
        let mut term = Rational::one();
        for (row, &col) in p.iter().enumerate() {
            term *= &a[row][col];
            if term.is_zero() {
                return;
            }
        }
        if inversions % 2 == 1 {
            term = -term;
        }
        *total += term;
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, a, total);
        p.swap(k, i);
    }
}

pub fn mat_mul(a: &Dense, b: &Dense) -> Dense {
    let (n, m, p) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| (0..m).fold(Rational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { qi(1) } else { qi(0) }).collect())
        .collect()
}

/// Gauss-Jordan on an augmented copy; `None` when singular.
pub fn inverse(a: &Dense) -> Option<Dense> {
    let n = a.len();
    let mut m: Dense = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = Rational::one() / &m[col][col];
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn to_matrix(a: &Dense) -> Matrix {
    Matrix::from_rows(a.clone()).unwrap()
}

pub fn from_matrix(m: &Matrix) -> Dense {
    m.to_rows()
}

pub fn rand_invertible(rng: &mut impl Rng, n: usize) -> Dense {
    loop {
        let a: Dense = (0..n).map(|_| (0..n).map(|_| rand_q(rng)).collect()).collect();
        if !det(&a).is_zero() {
            return a;
        }
    }
}

/// Transition matrices written straight from their textual description:
/// first row `(0, -1, ..., -1)`, row `i+1` all ones with a 2 on the
/// diagonal, all other rows unit rows.
pub fn canonical_oracle(n: usize) -> Vec<Dense> {
    (1..=n)
        .map(|i| {
            (0..=n)
                .map(|row| {
                    (0..=n)
                        .map(|col| {
                            let v = if row == 0 {
                                if col == 0 { 0 } else { -1 }
                            } else if row == i {
                                if col == i { 2 } else { 1 }
                            } else if row == col {
                                1
                            } else {
                                0
                            };
                            qi(v)
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// A random valid commuting family together with a frame for it.
///
/// Commuting maps `T_i = P D_i P^-1` are pulled back through the frame
/// `F0 = [r0, T_1 r0, ..., T_n r0]`, so `N_i = F0^-1 T_i F0` has first
/// column `e_{i+1}` and the family is symmetric and commuting. For affine
/// families `P` and `D_i` fix the homogeneous coordinate, which makes every
/// column of `N_i` sum to 1.
pub struct RandomFamily {
    pub matrices: Vec<Dense>,
    pub frame: Frame,
}

pub fn random_family(rng: &mut impl Rng, n: usize, mode: FrameMode) -> RandomFamily {
    let size = n + 1;
    loop {
        let p = match mode {
            FrameMode::CentroAffine => rand_invertible(rng, size),
            FrameMode::Affine => {
                let q = rand_invertible(rng, n);
                let mut p: Dense = q
                    .into_iter()
                    .map(|mut row| {
                        row.push(rand_q(rng));
                        row
                    })
                    .collect();
                let mut last = vec![qi(0); n];
                last.push(qi(1));
                p.push(last);
                p
            }
        };
        let p_inv = inverse(&p).unwrap();
        let ts: Vec<Dense> = (0..n)
            .map(|_| {
                let mut d = vec![vec![qi(0); size]; size];
                for (k, row) in d.iter_mut().enumerate() {
                    row[k] = match (mode, k == n) {
                        (FrameMode::Affine, true) => qi(1),
                        _ => rand_nonzero_q(rng),
                    };
                }
                mat_mul(&mat_mul(&p, &d), &p_inv)
            })
            .collect();
        let r0: Vec<Rational> = match mode {
            FrameMode::CentroAffine => (0..size).map(|_| rand_q(rng)).collect(),
            FrameMode::Affine => (0..n).map(|_| rand_q(rng)).chain([qi(1)]).collect(),
        };
        let apply = |t: &Dense, v: &[Rational]| -> Vec<Rational> {
            t.iter()
                .map(|row| row.iter().zip(v).fold(qi(0), |acc, (a, b)| acc + a * b))
                .collect()
        };
        let cols: Vec<Vec<Rational>> = std::iter::once(r0.clone())
            .chain(ts.iter().map(|t| apply(t, &r0)))
            .collect();
        let f0: Dense = (0..size).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
        let Some(f0_inv) = inverse(&f0) else { continue };
        let matrices: Vec<Dense> = ts.iter().map(|t| mat_mul(&mat_mul(&f0_inv, t), &f0)).collect();

        let keep = match mode {
            FrameMode::CentroAffine => size,
            FrameMode::Affine => n,
        };
        let point = |c: &Vec<Rational>| AffinePoint::new(c[..keep].to_vec());
        let frame = Frame::new(point(&cols[0]), cols[1..].iter().map(point).collect(), mode)
            .expect("F0 is invertible");
        return RandomFamily { matrices, frame };
    }
}

pub fn family_of(dense: &[Dense]) -> TransitionFamily {
    TransitionFamily::new(
        dense
            .iter()
            .enumerate()
            .map(|(i, m)| TransitionMatrix::new(i + 1, to_matrix(m)).unwrap())
            .collect(),
    )
    .unwrap()
}

/// Random affine frame with independent edge vectors.
pub fn random_affine_frame(rng: &mut impl Rng, n: usize) -> Frame {
    loop {
        let base: Vec<Rational> = (0..n).map(|_| rand_q(rng)).collect();
        let edges = rand_invertible(rng, n);
        let neighbors = edges
            .iter()
            .map(|e| AffinePoint::new(e.iter().zip(&base).map(|(a, b)| a + b).collect()))
            .collect();
        if let Ok(f) = Frame::new(AffinePoint::new(base), neighbors, FrameMode::Affine) {
            return f;
        }
    }
}

/// Random invertible affine map `x -> Lx + b` in dimension `n`.
pub fn random_affine_map(rng: &mut impl Rng, n: usize) -> (Matrix, Vec<Rational>) {
    let l = rand_invertible(rng, n);
    let b = (0..n).map(|_| rand_q(rng)).collect();
    (to_matrix(&l), b)
}

pub fn digits(mut v: usize, base: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = v % base;
            v /= base;
            d
        })
        .collect()
}

/// Brute-force sponge test: per base-3 digit position at most one
/// coordinate has digit 1.
pub fn sponge_oracle(a: &[usize], m: usize) -> bool {
    let ds: Vec<Vec<usize>> = a.iter().map(|&x| digits(x - 1, 3, m)).collect();
    (0..m).all(|t| ds.iter().filter(|d| d[t] == 1).count() <= 1)
}

/// Brute-force simplex test: the bit sets of `a_s - 1` are pairwise disjoint.
pub fn simplex_oracle(a: &[usize]) -> bool {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if (a[i] - 1) & (a[j] - 1) != 0 {
                return false;
            }
        }
    }
    true
}

/// Every index in `[1, side]^n`, lexicographic.
pub fn index_box(n: usize, side: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (1..=side).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Sponge cell count by inclusion-exclusion: `3^n` digit tuples minus
/// those with two or more ones, raised to the level.
pub fn sponge_count_binomial(n: u32, m: u32) -> BigInt {
    let binom = |n: u32, k: u32| -> BigInt {
        (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
    };
    let mut base = BigInt::from(3u32).pow(n);
    for k in 2..=n {
        base -= binom(n, k) * BigInt::from(2u32).pow(n - k);
    }
    base.pow(m)
}

pub fn int_rows(rows: &[&[i64]]) -> Dense {
    rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect()
}

/// Carpet transition matrices as displayed in the reference text.
pub fn reference_carpet_matrices() -> Vec<Dense> {
    vec![
        int_rows(&[&[0, -1, -1], &[1, 2, 1], &[0, 0, 1]]),
        int_rows(&[&[0, -1, -1], &[0, 1, 0], &[1, 1, 2]]),
    ]
}

/// Menger sponge transition matrices as displayed in the reference text.
pub fn reference_sponge_matrices() -> Vec<Dense> {
    vec![
        int_rows(&[&[0, -1, -1, -1], &[1, 2, 1, 1], &[0, 0, 1, 0], &[0, 0, 0, 1]]),
        int_rows(&[&[0, -1, -1, -1], &[0, 1, 0, 0], &[1, 1, 2, 1], &[0, 0, 0, 1]]),
        int_rows(&[&[0, -1, -1, -1], &[0, 1, 0, 0], &[0, 0, 1, 0], &[1, 1, 1, 2]]),
    ]
}

/// The 4D sponge matrices as displayed in the reference text.
pub fn reference_4d_matrices() -> Vec<Dense> {
    vec![
        int_rows(&[&[0, -1, -1, -1, -1], &[1, 2, 1, 1, 1], &[0, 0, 1, 0, 0], &[0, 0, 0, 1, 0], &[0, 0, 0, 0, 1]]),
        int_rows(&[&[0, -1, -1, -1, -1], &[0, 1, 0, 0, 0], &[1, 1, 2, 1, 1], &[0, 0, 0, 1, 0], &[0, 0, 0, 0, 1]]),
        int_rows(&[&[0, -1, -1, -1, -1], &[0, 1, 0, 0, 0], &[0, 0, 1, 0, 0], &[1, 1, 1, 2, 1], &[0, 0, 0, 0, 1]]),
        int_rows(&[&[0, -1, -1, -1, -1], &[0, 1, 0, 0, 0], &[0, 0, 1, 0, 0], &[0, 0, 0, 1, 0], &[1, 1, 1, 1, 2]]),
    ]
}

/// The 20 level-1 Menger sponge cells.
pub const REFERENCE_SPONGE_S1: [[usize; 3]; 20] = [
    [1, 1, 1], [2, 1, 1], [1, 2, 1], [1, 1, 2], [3, 1, 1], [1, 3, 1], [1, 1, 3], [3, 3, 1], [3, 1, 3], [1, 3, 3],
    [2, 3, 1], [3, 2, 1], [2, 1, 3], [3, 1, 2], [1, 2, 3], [1, 3, 2], [2, 3, 3], [3, 2, 3], [3, 3, 2], [3, 3, 3],
];

/// The nine level-2 triangle cells.
pub const REFERENCE_TRIANGLE_S2: [[usize; 2]; 9] =
    [[1, 1], [1, 2], [2, 1], [3, 1], [3, 2], [4, 1], [1, 3], [1, 4], [2, 3]];

/// The eight level-1 carpet cells.
pub const REFERENCE_CARPET_S1: [[usize; 2]; 8] =
    [[1, 1], [1, 2], [2, 1], [1, 3], [3, 1], [2, 3], [3, 2], [3, 3]];
