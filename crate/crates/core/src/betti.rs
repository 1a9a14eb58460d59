//! Bigraded Betti numbers from frame barcodes, and the identities tying them
//! to the dimension vector.
//!
//! With `y(alpha)` the point-bar multiplicity at the centre of the into frame
//! and `z(alpha)` the same for the outward frame,
//!
//! ```text
//! beta_0(a) = y(a)
//! beta_1(a) = y(a) - d(a) + d(a-e1) + d(a-e2) - d(a-e1-e2) + z(a-e1-e2)
//! beta_2(a) = z(a-e1-e2)
//! ```
//!
//! [`crosscheck`] compares this against the free resolution of
//! [`crate::resolution`].

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::grid::{grades_in, Grade, GradeMultiset, GridError, GridModule};
use crate::linalg::PrimeField;
use crate::random::{random_module, RandomModuleParams};
use crate::resolution::{resolve, Resolution, ResolutionError, DEFAULT_PADDING};
use crate::zigzag::{restrict_into_frame, y_alpha_from_barcode, z_alpha, z_alpha_from_barcode, Barcode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BettiError {
    #[error("formula gives negative beta_{j} = {value} at {grade}")]
    NegativeMultiplicity { j: usize, grade: Grade, value: i64 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
}

/// The three bigraded Betti functions `beta_0`, `beta_1`, `beta_2`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BettiTable {
    pub beta: [GradeMultiset; 3],
}

impl BettiTable {
    /// `beta_j(g)`; zero for every `j > 2`.
    pub fn get(&self, j: usize, g: Grade) -> usize {
        self.beta.get(j).map_or(0, |b| b.multiplicity(g))
    }

    pub fn xi(&self, j: usize) -> &GradeMultiset {
        &self.beta[j]
    }
}

impl From<[GradeMultiset; 3]> for BettiTable {
    fn from(beta: [GradeMultiset; 3]) -> Self {
        Self { beta }
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, b) in self.beta.iter().enumerate() {
            writeln!(f, "beta_{j} = {b}")?;
        }
        Ok(())
    }
}

fn padded(m: &GridModule) -> (usize, usize) {
    let (s1, s2) = m.bounds();
    (s1 + DEFAULT_PADDING, s2 + DEFAULT_PADDING)
}

fn dim(m: &GridModule, g: Grade) -> i64 {
    m.dim(g) as i64
}

/// Betti numbers from the barcodes of the into and outward frames.
pub fn betti_theorem(m: &GridModule) -> Result<BettiTable, BettiError> {
    let violations = m.validate();
    if !violations.is_empty() {
        return Err(GridError::Invalid(violations).into());
    }
    let d1 = Grade::E1;
    let d2 = Grade::E2;
    let mut table = BettiTable::default();
    for a in grades_in(padded(m)) {
        let y = y_alpha_from_barcode(m, a) as i64;
        let z = z_alpha_from_barcode(m, a - d1 - d2) as i64;
        let b1 = y - dim(m, a) + dim(m, a - d1) + dim(m, a - d2) - dim(m, a - d1 - d2) + z;
        for (j, value) in [(0, y), (1, b1), (2, z)] {
            if value < 0 {
                return Err(BettiError::NegativeMultiplicity { j, grade: a, value });
            }
            table.beta[j].insert(a, value as usize);
        }
    }
    Ok(table)
}

/// Per grade of the padded box: `dim M(a) == sum_{mu <= a} (beta_0 - beta_1 + beta_2)(mu)`.
pub fn hilbert_identity_check(m: &GridModule, table: &BettiTable) -> Vec<(Grade, bool)> {
    grades_in(padded(m))
        .map(|a| {
            let signed: i64 = (0..3)
                .map(|j| {
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    sign * table.beta[j].count_below(a) as i64
                })
                .sum();
            (a, signed == dim(m, a))
        })
        .collect()
}

/// Per grade of the padded box: the local alternating sum of dimensions
/// equals `beta_0 - beta_1 + beta_2` at that grade.
pub fn euler_local_check(m: &GridModule, table: &BettiTable) -> Vec<(Grade, bool)> {
    let (d1, d2) = (Grade::E1, Grade::E2);
    grades_in(padded(m))
        .map(|a| {
            let lhs = dim(m, a) - dim(m, a - d1) - dim(m, a - d2) + dim(m, a - d1 - d2);
            let rhs = table.get(0, a) as i64 - table.get(1, a) as i64 + table.get(2, a) as i64;
            (a, lhs == rhs)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiMismatch {
    pub j: usize,
    pub grade: Grade,
    pub theorem: usize,
    pub resolution: usize,
}

/// `beta_1(a+e1+e2)` recomputed from kernel and module dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelCountCheck {
    /// The grade `a`; the count concerns `a + e1 + e2`.
    pub alpha: Grade,
    pub from_kernel: i64,
    pub from_module: i64,
    pub resolved: usize,
}

impl KernelCountCheck {
    pub fn ok(&self) -> bool {
        self.from_kernel == self.resolved as i64 && self.from_module == self.resolved as i64
    }
}

#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub theorem: BettiTable,
    pub resolution: BettiTable,
    pub mismatches: Vec<BettiMismatch>,
    pub kernel_count_failures: Vec<KernelCountCheck>,
}

impl CrosscheckReport {
    pub fn agree(&self) -> bool {
        self.mismatches.is_empty() && self.kernel_count_failures.is_empty()
    }
}

/// Runs both engines and compares them grade by grade.
pub fn crosscheck(m: &GridModule) -> Result<CrosscheckReport, BettiError> {
    let theorem = betti_theorem(m)?;
    let res = resolve(m)?;
    Ok(compare(m, theorem, &res))
}

/// Compares a formula table against an existing resolution of `m`.
pub fn compare(m: &GridModule, theorem: BettiTable, res: &Resolution) -> CrosscheckReport {
    let resolution = BettiTable::from(res.xi.clone());
    let mut grades: Vec<Grade> = grades_in(padded(m)).collect();
    for j in 0..3 {
        grades.extend(theorem.beta[j].iter().map(|(g, _)| g));
        grades.extend(resolution.beta[j].iter().map(|(g, _)| g));
    }
    grades.sort();
    grades.dedup();
    let mut mismatches = Vec::new();
    for &g in &grades {
        for j in 0..3 {
            let (t, r) = (theorem.get(j, g), resolution.get(j, g));
            if t != r {
                mismatches.push(BettiMismatch {
                    j,
                    grade: g,
                    theorem: t,
                    resolution: r,
                });
            }
        }
    }
    let kernel_count_failures = kernel_count_checks(m, res)
        .into_iter()
        .filter(|c| !c.ok())
        .collect();
    CrosscheckReport {
        theorem,
        resolution,
        mismatches,
        kernel_count_failures,
    }
}

/// The kernel-dimension count of `beta_1` at every `a + e1 + e2` in the padded box.
pub fn kernel_count_checks(m: &GridModule, res: &Resolution) -> Vec<KernelCountCheck> {
    let (d1, d2) = (Grade::E1, Grade::E2);
    let k0 = res.kernel(0);
    let dk = |g: Grade| k0.dim(g) as i64;
    grades_in(padded(m))
        .map(|top| {
            let a = top - d1 - d2;
            let z = z_alpha(m, a) as i64;
            let from_kernel = dk(top) - dk(a + d1) - dk(a + d2) + dk(a) + z;
            let from_module = res.xi[0].multiplicity(top) as i64 - dim(m, top)
                + dim(m, a + d1)
                + dim(m, a + d2)
                - dim(m, a)
                + z;
            KernelCountCheck {
                alpha: a,
                from_kernel,
                from_module,
                resolved: res.xi[1].multiplicity(top),
            }
        })
        .collect()
}

/// Two modules with identical Betti tables whose into frames differ somewhere.
#[derive(Clone, Debug)]
pub struct FrameCounterexample {
    pub first: GridModule,
    pub second: GridModule,
    pub grade: Grade,
    pub first_frame: Barcode,
    pub second_frame: Barcode,
}

/// Searches seeded random modules for a pair with equal `xi_0, xi_1, xi_2`
/// but different into-frame barcodes at some grade.
pub fn find_frame_counterexample(
    field: PrimeField,
    seed: u64,
    attempts: usize,
) -> Option<FrameCounterexample> {
    let params = RandomModuleParams {
        min_bounds: (1, 1),
        max_bounds: (2, 2),
        max_dim: 2,
    };
    let mut seen: HashMap<[GradeMultiset; 3], Vec<GridModule>> = HashMap::new();
    for i in 0..attempts {
        let m = random_module(field, seed, i as u64, params);
        let Ok(res) = resolve(&m) else { continue };
        let bucket = seen.entry(res.xi.clone()).or_default();
        for other in bucket.iter() {
            let bounds = (
                m.bounds().0.max(other.bounds().0) + DEFAULT_PADDING,
                m.bounds().1.max(other.bounds().1) + DEFAULT_PADDING,
            );
            for g in grades_in(bounds) {
                let a = restrict_into_frame(other, g).barcode();
                let b = restrict_into_frame(&m, g).barcode();
                if a != b {
                    return Some(FrameCounterexample {
                        first: other.clone(),
                        second: m.clone(),
                        grade: g,
                        first_frame: a,
                        second_frame: b,
                    });
                }
            }
        }
        bucket.push(m);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_cz_family, gen_hook, gen_simple};
    use crate::grid::free_module;
    use crate::resolution::betti_resolution;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn ms(points: &[(i64, i64)]) -> GradeMultiset {
        points.iter().map(|&p| Grade::from(p)).collect()
    }

    #[test]
    fn simple_module_formula() {
        let m = gen_simple(Grade::new(0, 0), gf(2), (1, 1)).unwrap();
        let t = betti_theorem(&m).unwrap();
        assert_eq!(t.beta[0], ms(&[(0, 0)]));
        assert_eq!(t.beta[1], ms(&[(1, 0), (0, 1)]));
        assert_eq!(t.beta[2], ms(&[(1, 1)]));
        assert_eq!(t, betti_resolution(&m).unwrap());
    }

    #[test]
    fn hook_formula() {
        let m = gen_hook(gf(3), (2, 2)).unwrap();
        let t = betti_theorem(&m).unwrap();
        assert_eq!(t.beta[0], ms(&[(0, 0)]));
        assert_eq!(t.beta[1], ms(&[(1, 1)]));
        assert!(t.beta[2].is_empty());
    }

    #[test]
    fn free_module_formula() {
        let s = ms(&[(0, 1), (2, 0), (2, 0), (1, 1)]);
        let m = free_module(&s, (2, 2), gf(5)).unwrap();
        let t = betti_theorem(&m).unwrap();
        assert_eq!(t.beta[0], s);
        assert!(t.beta[1].is_empty() && t.beta[2].is_empty());
    }

    #[test]
    fn identities_on_simple_module() {
        let m = gen_simple(Grade::new(0, 0), gf(2), (1, 1)).unwrap();
        let t = betti_theorem(&m).unwrap();
        let at = |v: &[(Grade, bool)], g: Grade| v.iter().find(|(a, _)| *a == g).unwrap().1;
        let h = hilbert_identity_check(&m, &t);
        assert!(at(&h, Grade::new(1, 1)));
        assert!(h.iter().all(|(_, ok)| *ok));
        let e = euler_local_check(&m, &t);
        assert!(at(&e, Grade::new(0, 0)));
        // at (1,1) both sides are 0 - 0 - 0 + 1 = 1 and 0 - 0 + 1 = 1
        assert!(at(&e, Grade::new(1, 1)));
        assert!(e.iter().all(|(_, ok)| *ok));
    }

    #[test]
    fn identity_catches_a_wrong_table() {
        let m = gen_hook(gf(2), (2, 2)).unwrap();
        let mut t = betti_theorem(&m).unwrap();
        t.beta[1].insert(Grade::new(2, 2), 1);
        assert!(!hilbert_identity_check(&m, &t).iter().all(|(_, ok)| *ok));
        assert!(!euler_local_check(&m, &t).iter().all(|(_, ok)| *ok));
    }

    #[test]
    fn crosscheck_fixtures() {
        let f = gf(5);
        for m in [
            gen_simple(Grade::new(1, 0), f, (2, 2)).unwrap(),
            gen_hook(f, (3, 2)).unwrap(),
            gen_cz_family(2, f).unwrap(),
            gen_cz_family(4, f).unwrap(),
        ] {
            let r = crosscheck(&m).unwrap();
            assert!(r.agree(), "{:?}", r.mismatches);
        }
    }

    #[test]
    fn cz_family_betti_tables_coincide() {
        let f = gf(5);
        let a = betti_theorem(&gen_cz_family(2, f).unwrap()).unwrap();
        let b = betti_theorem(&gen_cz_family(3, f).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_module_is_rejected() {
        let f = gf(2);
        let mut b = crate::grid::GridBuilder::new(f, (1, 1));
        for g in grades_in((1, 1)) {
            b.set_dim(g.x as usize, g.y as usize, 1).unwrap();
        }
        let one = crate::linalg::DenseMatrix::identity(f, 1);
        b.set_hmap(0, 0, one.clone()).unwrap();
        b.set_hmap(0, 1, one.clone()).unwrap();
        b.set_vmap(0, 0, one).unwrap();
        let m = b.build_unchecked();
        assert!(matches!(betti_theorem(&m), Err(BettiError::Grid(GridError::Invalid(_)))));
    }

    #[test]
    fn frame_counterexample_exists() {
        let c = find_frame_counterexample(gf(2), 11, 400).expect("pair found");
        let ta = betti_theorem(&c.first).unwrap();
        let tb = betti_theorem(&c.second).unwrap();
        assert_eq!(ta, tb);
        assert_eq!(betti_resolution(&c.first).unwrap(), ta);
        assert_ne!(c.first_frame, c.second_frame);
    }
}
