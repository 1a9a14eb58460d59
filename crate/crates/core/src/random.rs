//! Seeded random finitely presented modules.
//!
//! Dimensions and horizontal maps are drawn freely. Vertical maps on the
//! first column are free as well; every other vertical map is a random
//! solution of its commutativity square. When a square has no solution the
//! horizontal map across its top is redrawn a few times and finally zeroed,
//! which always makes the square solvable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{GridBuilder, GridModule};
use crate::linalg::{DenseMatrix, PrimeField};

const REDRAWS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomModuleParams {
    pub min_bounds: (usize, usize),
    pub max_bounds: (usize, usize),
    pub max_dim: usize,
}

impl Default for RandomModuleParams {
    fn default() -> Self {
        Self {
            min_bounds: (1, 1),
            max_bounds: (4, 4),
            max_dim: 4,
        }
    }
}

/// The `index`-th module of the corpus generated from `seed`.
///
/// Every case draws from its own ChaCha stream, so cases can be produced in
/// any order or in parallel.
pub fn random_module(
    field: PrimeField,
    seed: u64,
    index: u64,
    params: RandomModuleParams,
) -> GridModule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    random_module_with(&mut rng, field, params)
}

pub fn random_matrix<R: Rng>(rng: &mut R, field: PrimeField, rows: usize, cols: usize) -> DenseMatrix {
    let p = field.modulus();
    let entries = (0..rows * cols).map(|_| rng.gen_range(0..p)).collect();
    DenseMatrix::from_row_major(field, rows, cols, entries).expect("sized")
}

pub fn random_module_with<R: Rng>(
    rng: &mut R,
    field: PrimeField,
    params: RandomModuleParams,
) -> GridModule {
    let s1 = rng.gen_range(params.min_bounds.0..=params.max_bounds.0);
    let s2 = rng.gen_range(params.min_bounds.1..=params.max_bounds.1);
    let mut dims = vec![vec![0usize; s2 + 1]; s1 + 1];
    for row in dims.iter_mut() {
        for d in row.iter_mut() {
            *d = rng.gen_range(0..=params.max_dim);
        }
    }
    let mut h: Vec<Vec<DenseMatrix>> = (0..s1)
        .map(|x| {
            (0..=s2)
                .map(|y| random_matrix(rng, field, dims[x + 1][y], dims[x][y]))
                .collect()
        })
        .collect();
    let mut v: Vec<Vec<Option<DenseMatrix>>> = vec![vec![None; s2]; s1 + 1];
    for y in 0..s2 {
        v[0][y] = Some(random_matrix(rng, field, dims[0][y + 1], dims[0][y]));
    }
    for x in 0..s1 {
        for y in 0..s2 {
            let left = v[x][y].clone().expect("filled column by column");
            let mut attempt = 0;
            let solution = loop {
                let rhs = h[x][y + 1].mul(&left).expect("shapes agree");
                if let Some(sol) = random_right_solution(rng, &h[x][y], &rhs) {
                    break sol;
                }
                attempt += 1;
                let (r, c) = h[x][y + 1].shape();
                h[x][y + 1] = if attempt < REDRAWS {
                    random_matrix(rng, field, r, c)
                } else {
                    DenseMatrix::zeros(field, r, c)
                };
            };
            v[x + 1][y] = Some(solution);
        }
    }

    let mut b = GridBuilder::new(field, (s1, s2));
    for x in 0..=s1 {
        for y in 0..=s2 {
            b.set_dim(x, y, dims[x][y]).expect("in box");
        }
    }
    for (x, col) in h.into_iter().enumerate() {
        for (y, m) in col.into_iter().enumerate() {
            b.set_hmap(x, y, m).expect("in box");
        }
    }
    for (x, col) in v.into_iter().enumerate() {
        for (y, m) in col.into_iter().enumerate() {
            b.set_vmap(x, y, m.expect("all vertical maps set")).expect("in box");
        }
    }
    b.build().expect("construction satisfies every square")
}

/// A uniformly perturbed solution `X` of `X * a == b`, if one exists.
fn random_right_solution<R: Rng>(rng: &mut R, a: &DenseMatrix, b: &DenseMatrix) -> Option<DenseMatrix> {
    let f = a.field();
    // rows of X solve a^T x = (row of b)^T
    let at = a.transpose();
    let red = at.column_reduce();
    let null = red.kernel_basis();
    let mut rows = Vec::with_capacity(b.rows());
    for i in 0..b.rows() {
        let mut x = red.solve(b.row(i))?;
        for k in 0..null.cols() {
            let c = rng.gen_range(0..f.modulus());
            for (xi, n) in x.iter_mut().zip(null.column(k)) {
                *xi = f.add(*xi, f.mul(c, n));
            }
        }
        rows.push(x);
    }
    let cols = a.rows();
    let entries = rows.into_iter().flatten().collect();
    Some(DenseMatrix::from_row_major(f, b.rows(), cols, entries).expect("sized"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_valid_and_deterministic() {
        let f = PrimeField::new(2).unwrap();
        for i in 0..40 {
            let a = random_module(f, 7, i, RandomModuleParams::default());
            assert!(a.validate().is_empty());
            assert_eq!(a, random_module(f, 7, i, RandomModuleParams::default()));
            let (s1, s2) = a.bounds();
            assert!((1..=4).contains(&s1) && (1..=4).contains(&s2));
            assert!(a.box_grades().all(|g| a.dim(g) <= 4));
        }
    }

    #[test]
    fn right_solution_satisfies_equation() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x0 = random_matrix(&mut rng, f, 2, 3);
        let a = random_matrix(&mut rng, f, 3, 4);
        let b = x0.mul(&a).unwrap();
        let x = random_right_solution(&mut rng, &a, &b).unwrap();
        assert_eq!(x.mul(&a).unwrap(), b);
    }
}
