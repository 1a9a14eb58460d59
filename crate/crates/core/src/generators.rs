//! Fixture modules: simple, hook and the cross-ratio family.

use crate::grid::{grades_in, Grade, GridBuilder, GridError, GridModule};
use crate::linalg::{DenseMatrix, PrimeField};

/// One-dimensional at `alpha`, zero everywhere else, all maps zero.
///
/// `alpha` must sit strictly inside the box: on the upper boundary the
/// clamped extension would repeat the space beyond the box.
pub fn gen_simple(
    alpha: Grade,
    field: PrimeField,
    bounds: (usize, usize),
) -> Result<GridModule, GridError> {
    if !alpha.is_nonnegative() || alpha.x >= bounds.0 as i64 || alpha.y >= bounds.1 as i64 {
        return Err(GridError::OutsideBox {
            grade: alpha,
            bounds,
        });
    }
    let mut b = GridBuilder::new(field, bounds);
    b.set_dim(alpha.x as usize, alpha.y as usize, 1)?;
    b.build()
}

/// Dimension 1 on both axes and 0 off them, identity maps along the axes.
///
/// One generator at the origin and one relation at `(1,1)`.
pub fn gen_hook(field: PrimeField, bounds: (usize, usize)) -> Result<GridModule, GridError> {
    if bounds.0 < 2 || bounds.1 < 2 {
        return Err(GridError::Argument(format!(
            "hook needs a box of at least 2x2, got {}x{}",
            bounds.0, bounds.1
        )));
    }
    let one = DenseMatrix::identity(field, 1);
    let mut b = GridBuilder::new(field, bounds);
    for g in grades_in(bounds) {
        let (x, y) = (g.x as usize, g.y as usize);
        if x == 0 || y == 0 {
            b.set_dim(x, y, 1)?;
        }
    }
    for x in 0..bounds.0 {
        b.set_hmap(x, 0, one.clone())?;
    }
    for y in 0..bounds.1 {
        b.set_vmap(0, y, one.clone())?;
    }
    b.build()
}

/// The cross-ratio family on the box `[0,3]^2`.
///
/// `F^2` on the triangle `x + y <= 2` with identity maps, `F` on the
/// antidiagonal `x + y = 3`, zero elsewhere. The edges into the antidiagonal
/// are the functionals `a = x` into `(0,3)`, `b = y` into `(1,2)`,
/// `c = x + y` into `(2,1)` and `d = x + lambda*y` into `(3,0)`.
pub fn gen_cz_family(lambda: i64, field: PrimeField) -> Result<GridModule, GridError> {
    let lam = field.reduce(lambda);
    if lam == 0 || lam == 1 {
        return Err(GridError::Argument(format!(
            "lambda must avoid 0 and 1 in {field}, got {lambda}"
        )));
    }
    let bounds = (3, 3);
    let id2 = DenseMatrix::identity(field, 2);
    let a = DenseMatrix::from_rows(field, &[[1, 0]]);
    let bm = DenseMatrix::from_rows(field, &[[0, 1]]);
    let c = DenseMatrix::from_rows(field, &[[1, 1]]);
    let d = DenseMatrix::from_rows(field, &[[1, i64::from(lam)]]);

    let mut b = GridBuilder::new(field, bounds);
    for g in grades_in(bounds) {
        let (x, y) = (g.x as usize, g.y as usize);
        match x + y {
            0..=2 => b.set_dim(x, y, 2)?,
            3 => b.set_dim(x, y, 1)?,
            _ => &mut b,
        };
    }
    for g in grades_in(bounds) {
        let (x, y) = (g.x as usize, g.y as usize);
        if x + y <= 1 {
            b.set_hmap(x, y, id2.clone())?;
            b.set_vmap(x, y, id2.clone())?;
        }
    }
    b.set_hmap(2, 0, d)?;
    b.set_hmap(1, 1, c.clone())?;
    b.set_vmap(2, 0, c)?;
    b.set_hmap(0, 2, bm.clone())?;
    b.set_vmap(1, 1, bm)?;
    b.set_vmap(0, 2, a)?;
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn simple_dims() {
        let m = gen_simple(Grade::new(0, 0), gf(2), (1, 1)).unwrap();
        assert_eq!(m.dim(Grade::new(0, 0)), 1);
        assert_eq!(m.dim(Grade::new(1, 0)), 0);
        assert_eq!(m.dim(Grade::new(7, 7)), 0);
        assert!(gen_simple(Grade::new(1, 0), gf(2), (1, 1)).is_err());
    }

    #[test]
    fn hook_dims() {
        let m = gen_hook(gf(3), (2, 2)).unwrap();
        assert!(m.validate().is_empty());
        assert_eq!(m.dim(Grade::new(5, 0)), 1);
        assert_eq!(m.dim(Grade::new(0, 5)), 1);
        assert_eq!(m.dim(Grade::new(1, 1)), 0);
        assert!(gen_hook(gf(3), (1, 2)).is_err());
    }

    #[test]
    fn cz_family_shape() {
        let f = gf(5);
        let m2 = gen_cz_family(2, f).unwrap();
        let m3 = gen_cz_family(3, f).unwrap();
        assert!(m2.validate().is_empty());
        assert!(m3.validate().is_empty());
        assert_eq!(m2.dimension_vector(), m3.dimension_vector());
        for g in m2.box_grades() {
            let expected = match g.x + g.y {
                0..=2 => 2,
                3 => 1,
                _ => 0,
            };
            assert_eq!(m2.dim(g), expected, "at {g}");
        }
        assert_ne!(m2, m3);
    }

    #[test]
    fn cz_family_rejects_degenerate_lambda() {
        assert!(gen_cz_family(0, gf(5)).is_err());
        assert!(gen_cz_family(1, gf(5)).is_err());
        assert!(gen_cz_family(6, gf(5)).is_err());
    }
}
