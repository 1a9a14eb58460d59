//! Finitely presented 2-parameter persistence modules.
//!
//! A [`GridModule`] stores vector-space dimensions and edge matrices on the
//! box `[0, s1] x [0, s2]`. It is read on all of `Z^2` by two rules:
//!
//! * below zero: any grade with a negative coordinate carries the zero space;
//! * beyond the box: a grade is clamped coordinatewise into the box, so edges
//!   leaving the box in either direction are identities.
//!
//! All generators and relations of such a module live inside the box.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Sub};

use thiserror::Error;

use crate::linalg::{DenseMatrix, LinalgError, PrimeField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("grade {grade} lies outside the box [0,{}]x[0,{}]", .bounds.0, .bounds.1)]
    OutsideBox { grade: Grade, bounds: (usize, usize) },
    #[error("{from} is not below {to} in the product order")]
    NotComparable { from: Grade, to: Grade },
    #[error("field mismatch: GF({0}) vs GF({1})")]
    FieldMismatch(u32, u32),
    #[error("module is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("{0}")]
    Argument(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A point of the integer lattice `Z^2`, ordered lexicographically by `(x, y)`.
///
/// The lexicographic `Ord` is only for canonical iteration; the module
/// structure uses the coordinatewise partial order [`Grade::le`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grade {
    pub x: i64,
    pub y: i64,
}

impl Grade {
    pub const E1: Grade = Grade { x: 1, y: 0 };
    pub const E2: Grade = Grade { x: 0, y: 1 };

    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    /// Coordinatewise `self <= other`.
    pub fn leq(self, other: Grade) -> bool {
        self.x <= other.x && self.y <= other.y
    }

    pub fn is_nonnegative(self) -> bool {
        self.x >= 0 && self.y >= 0
    }
}

impl Add for Grade {
    type Output = Grade;
    fn add(self, o: Grade) -> Grade {
        Grade::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Grade {
    type Output = Grade;
    fn sub(self, o: Grade) -> Grade {
        Grade::new(self.x - o.x, self.y - o.y)
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl From<(i64, i64)> for Grade {
    fn from((x, y): (i64, i64)) -> Self {
        Grade::new(x, y)
    }
}

/// A finite multiset of grades.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GradeMultiset {
    counts: BTreeMap<Grade, usize>,
}

impl GradeMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, g: Grade, mult: usize) {
        if mult > 0 {
            *self.counts.entry(g).or_insert(0) += mult;
        }
    }

    pub fn multiplicity(&self, g: Grade) -> usize {
        self.counts.get(&g).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total number of elements, counted with multiplicity.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// `(grade, multiplicity)` pairs in lexicographic grade order.
    pub fn iter(&self) -> impl Iterator<Item = (Grade, usize)> + '_ {
        self.counts.iter().map(|(&g, &m)| (g, m))
    }

    /// Every element, repeated by multiplicity, in lexicographic order.
    pub fn expanded(&self) -> Vec<Grade> {
        self.iter()
            .flat_map(|(g, m)| std::iter::repeat_n(g, m))
            .collect()
    }

    /// Number of elements `mu` with `mu <= g`.
    pub fn count_below(&self, g: Grade) -> usize {
        self.iter().filter(|&(mu, _)| mu.leq(g)).map(|(_, m)| m).sum()
    }
}

impl FromIterator<Grade> for GradeMultiset {
    fn from_iter<I: IntoIterator<Item = Grade>>(iter: I) -> Self {
        let mut s = Self::new();
        for g in iter {
            s.insert(g, 1);
        }
        s
    }
}

impl Add for &GradeMultiset {
    type Output = GradeMultiset;
    fn add(self, rhs: &GradeMultiset) -> GradeMultiset {
        let mut out = self.clone();
        for (g, m) in rhs.iter() {
            out.insert(g, m);
        }
        out
    }
}

impl fmt::Display for GradeMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(g, m)| format!("{g}:{m}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A failed structural check, as reported by [`GridModule::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    HmapShape {
        at: Grade,
        expected: (usize, usize),
        found: (usize, usize),
    },
    VmapShape {
        at: Grade,
        expected: (usize, usize),
        found: (usize, usize),
    },
    FieldMismatch {
        at: Grade,
    },
    /// `vmap(x+1,y) * hmap(x,y) != hmap(x,y+1) * vmap(x,y)` for the square at `at`.
    NonCommutingSquare {
        at: Grade,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::HmapShape { at, expected, found } => write!(
                f,
                "hmap {at} has shape {}x{}, expected {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::VmapShape { at, expected, found } => write!(
                f,
                "vmap {at} has shape {}x{}, expected {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::FieldMismatch { at } => write!(f, "edge at {at} uses a different field"),
            Violation::NonCommutingSquare { at } => {
                write!(f, "square at {at} does not commute")
            }
        }
    }
}

/// A finitely presented 2-parameter persistence module over GF(p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridModule {
    field: PrimeField,
    bounds: (usize, usize),
    dims: Vec<usize>,
    hmaps: Vec<DenseMatrix>,
    vmaps: Vec<DenseMatrix>,
}

/// Incremental construction of a [`GridModule`]. Unset edges default to zero maps.
#[derive(Clone, Debug)]
pub struct GridBuilder {
    field: PrimeField,
    bounds: (usize, usize),
    dims: Vec<usize>,
    hmaps: Vec<Option<DenseMatrix>>,
    vmaps: Vec<Option<DenseMatrix>>,
}

impl GridBuilder {
    pub fn new(field: PrimeField, bounds: (usize, usize)) -> Self {
        let (s1, s2) = bounds;
        Self {
            field,
            bounds,
            dims: vec![0; (s1 + 1) * (s2 + 1)],
            hmaps: vec![None; s1 * (s2 + 1)],
            vmaps: vec![None; (s1 + 1) * s2],
        }
    }

    pub fn bounds(&self) -> (usize, usize) {
        self.bounds
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    fn check(&self, x: usize, y: usize) -> Result<(), GridError> {
        if x > self.bounds.0 || y > self.bounds.1 {
            return Err(GridError::OutsideBox {
                grade: Grade::new(x as i64, y as i64),
                bounds: self.bounds,
            });
        }
        Ok(())
    }

    pub fn dim(&self, x: usize, y: usize) -> usize {
        self.dims[x * (self.bounds.1 + 1) + y]
    }

    pub fn set_dim(&mut self, x: usize, y: usize, d: usize) -> Result<&mut Self, GridError> {
        self.check(x, y)?;
        self.dims[x * (self.bounds.1 + 1) + y] = d;
        Ok(self)
    }

    /// Sets the map `(x,y) -> (x+1,y)`.
    pub fn set_hmap(&mut self, x: usize, y: usize, m: DenseMatrix) -> Result<&mut Self, GridError> {
        self.check(x + 1, y)?;
        self.hmaps[x * (self.bounds.1 + 1) + y] = Some(m);
        Ok(self)
    }

    /// Sets the map `(x,y) -> (x,y+1)`.
    pub fn set_vmap(&mut self, x: usize, y: usize, m: DenseMatrix) -> Result<&mut Self, GridError> {
        self.check(x, y + 1)?;
        self.vmaps[x * self.bounds.1 + y] = Some(m);
        Ok(self)
    }

    /// Assembles the module without checking shapes or commutativity.
    pub fn build_unchecked(self) -> GridModule {
        let s2 = self.bounds.1;
        let f = self.field;
        let dims = self.dims;
        let d = |x: usize, y: usize| dims[x * (s2 + 1) + y];
        let mut hmaps = Vec::with_capacity(self.hmaps.len());
        for (i, m) in self.hmaps.into_iter().enumerate() {
            let (x, y) = (i / (s2 + 1), i % (s2 + 1));
            hmaps.push(m.unwrap_or_else(|| DenseMatrix::zeros(f, d(x + 1, y), d(x, y))));
        }
        let mut vmaps = Vec::with_capacity(self.vmaps.len());
        for (i, m) in self.vmaps.into_iter().enumerate() {
            let (x, y) = (i / s2, i % s2);
            vmaps.push(m.unwrap_or_else(|| DenseMatrix::zeros(f, d(x, y + 1), d(x, y))));
        }
        GridModule {
            field: f,
            bounds: self.bounds,
            dims,
            hmaps,
            vmaps,
        }
    }

    /// Assembles and validates the module.
    pub fn build(self) -> Result<GridModule, GridError> {
        let m = self.build_unchecked();
        let violations = m.validate();
        if violations.is_empty() {
            Ok(m)
        } else {
            Err(GridError::Invalid(violations))
        }
    }
}

impl GridModule {
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn bounds(&self) -> (usize, usize) {
        self.bounds
    }

    /// Grades of the box in lexicographic order.
    pub fn box_grades(&self) -> impl Iterator<Item = Grade> {
        grades_in(self.bounds)
    }

    /// Clamps a nonnegative grade into the box.
    pub fn clamp(&self, g: Grade) -> (usize, usize) {
        debug_assert!(g.is_nonnegative());
        (
            (g.x as usize).min(self.bounds.0),
            (g.y as usize).min(self.bounds.1),
        )
    }

    fn idx(&self, x: usize, y: usize) -> usize {
        x * (self.bounds.1 + 1) + y
    }

    /// Dimension of the space at any grade of `Z^2`.
    pub fn dim(&self, g: Grade) -> usize {
        if !g.is_nonnegative() {
            return 0;
        }
        let (x, y) = self.clamp(g);
        self.dims[self.idx(x, y)]
    }

    /// Stored map `(x,y) -> (x+1,y)` for `x < s1`, `y <= s2`.
    pub fn hmap(&self, x: usize, y: usize) -> &DenseMatrix {
        assert!(x < self.bounds.0 && y <= self.bounds.1);
        &self.hmaps[self.idx(x, y)]
    }

    /// Stored map `(x,y) -> (x,y+1)` for `x <= s1`, `y < s2`.
    pub fn vmap(&self, x: usize, y: usize) -> &DenseMatrix {
        assert!(x <= self.bounds.0 && y < self.bounds.1);
        &self.vmaps[x * self.bounds.1 + y]
    }

    /// The map `g -> g + e1` at any grade.
    pub fn edge_h(&self, g: Grade) -> DenseMatrix {
        if !g.is_nonnegative() {
            return DenseMatrix::zeros(self.field, self.dim(g + Grade::E1), 0);
        }
        let (x, y) = self.clamp(g);
        if g.x as usize >= self.bounds.0 {
            DenseMatrix::identity(self.field, self.dims[self.idx(x, y)])
        } else {
            self.hmap(x, y).clone()
        }
    }

    /// The map `g -> g + e2` at any grade.
    pub fn edge_v(&self, g: Grade) -> DenseMatrix {
        if !g.is_nonnegative() {
            return DenseMatrix::zeros(self.field, self.dim(g + Grade::E2), 0);
        }
        let (x, y) = self.clamp(g);
        if g.y as usize >= self.bounds.1 {
            DenseMatrix::identity(self.field, self.dims[self.idx(x, y)])
        } else {
            self.vmap(x, y).clone()
        }
    }

    /// The structure map `M_from -> M_to` for `from <= to`.
    ///
    /// Composed along the staircase that first moves in `x` and then in `y`;
    /// commutativity makes every monotone path give the same matrix.
    pub fn map_matrix(&self, from: Grade, to: Grade) -> Result<DenseMatrix, GridError> {
        if !from.leq(to) {
            return Err(GridError::NotComparable { from, to });
        }
        if !from.is_nonnegative() {
            return Ok(DenseMatrix::zeros(self.field, self.dim(to), 0));
        }
        let (x0, y0) = self.clamp(from);
        let (x1, y1) = self.clamp(to);
        let mut acc = DenseMatrix::identity(self.field, self.dims[self.idx(x0, y0)]);
        for x in x0..x1 {
            acc = self.hmap(x, y0).mul(&acc)?;
        }
        for y in y0..y1 {
            acc = self.vmap(x1, y).mul(&acc)?;
        }
        Ok(acc)
    }

    /// Lists every shape and commutativity defect; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let (s1, s2) = self.bounds;
        let d = |x: usize, y: usize| self.dims[self.idx(x, y)];
        let mut out = Vec::new();
        let mut shapes_ok = true;
        for x in 0..s1 {
            for y in 0..=s2 {
                let m = self.hmap(x, y);
                let at = Grade::new(x as i64, y as i64);
                if m.field() != self.field {
                    out.push(Violation::FieldMismatch { at });
                    shapes_ok = false;
                }
                let expected = (d(x + 1, y), d(x, y));
                if m.shape() != expected {
                    out.push(Violation::HmapShape {
                        at,
                        expected,
                        found: m.shape(),
                    });
                    shapes_ok = false;
                }
            }
        }
        for x in 0..=s1 {
            for y in 0..s2 {
                let m = self.vmap(x, y);
                let at = Grade::new(x as i64, y as i64);
                if m.field() != self.field {
                    out.push(Violation::FieldMismatch { at });
                    shapes_ok = false;
                }
                let expected = (d(x, y + 1), d(x, y));
                if m.shape() != expected {
                    out.push(Violation::VmapShape {
                        at,
                        expected,
                        found: m.shape(),
                    });
                    shapes_ok = false;
                }
            }
        }
        if !shapes_ok {
            return out;
        }
        for x in 0..s1 {
            for y in 0..s2 {
                let vh = self.vmap(x + 1, y).mul(self.hmap(x, y));
                let hv = self.hmap(x, y + 1).mul(self.vmap(x, y));
                if vh != hv {
                    out.push(Violation::NonCommutingSquare {
                        at: Grade::new(x as i64, y as i64),
                    });
                }
            }
        }
        out
    }

    /// Same module on a larger box, materializing the clamped extension.
    pub fn extend_bounds(&self, bounds: (usize, usize)) -> GridModule {
        assert!(
            bounds.0 >= self.bounds.0 && bounds.1 >= self.bounds.1,
            "extend_bounds cannot shrink the box"
        );
        let mut b = GridBuilder::new(self.field, bounds);
        for g in grades_in(bounds) {
            let (x, y) = (g.x as usize, g.y as usize);
            b.set_dim(x, y, self.dim(g)).expect("in box");
            if x < bounds.0 {
                b.set_hmap(x, y, self.edge_h(g)).expect("in box");
            }
            if y < bounds.1 {
                b.set_vmap(x, y, self.edge_v(g)).expect("in box");
            }
        }
        b.build_unchecked()
    }

    /// `M ⊕ N` on the componentwise-max box, with block-diagonal edge maps.
    pub fn direct_sum(&self, other: &GridModule) -> Result<GridModule, GridError> {
        if self.field != other.field {
            return Err(GridError::FieldMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        let bounds = (
            self.bounds.0.max(other.bounds.0),
            self.bounds.1.max(other.bounds.1),
        );
        let mut b = GridBuilder::new(self.field, bounds);
        for g in grades_in(bounds) {
            let (x, y) = (g.x as usize, g.y as usize);
            b.set_dim(x, y, self.dim(g) + other.dim(g))?;
            if x < bounds.0 {
                b.set_hmap(x, y, self.edge_h(g).block_diag(&other.edge_h(g))?)?;
            }
            if y < bounds.1 {
                b.set_vmap(x, y, self.edge_v(g).block_diag(&other.edge_v(g))?)?;
            }
        }
        Ok(b.build_unchecked())
    }

    /// Dimensions over the box, in lexicographic grade order.
    pub fn dimension_vector(&self) -> Vec<usize> {
        self.dims.clone()
    }

    /// Total dimension over the box.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
}

/// Grades of `[0, s1] x [0, s2]` in lexicographic order.
pub fn grades_in(bounds: (usize, usize)) -> impl Iterator<Item = Grade> {
    let (s1, s2) = bounds;
    (0..=s1 as i64).flat_map(move |x| (0..=s2 as i64).map(move |y| Grade::new(x, y)))
}

/// The free module `F(S)`, one upper-quadrant summand per element of `S`.
///
/// At grade `b` the basis consists of the elements of `S.expanded()` that are
/// `<= b`, kept in that global order; edge maps are the resulting coordinate
/// inclusions.
pub fn free_module(
    s: &GradeMultiset,
    bounds: (usize, usize),
    field: PrimeField,
) -> Result<GridModule, GridError> {
    let gens = s.expanded();
    for &g in &gens {
        if !g.is_nonnegative() || g.x as usize > bounds.0 || g.y as usize > bounds.1 {
            return Err(GridError::OutsideBox { grade: g, bounds });
        }
    }
    let basis_at = |g: Grade| -> Vec<usize> {
        (0..gens.len()).filter(|&i| gens[i].leq(g)).collect()
    };
    let inclusion = |from: Grade, to: Grade| -> DenseMatrix {
        let src = basis_at(from);
        let dst = basis_at(to);
        let mut m = DenseMatrix::zeros(field, dst.len(), src.len());
        for (j, gi) in src.iter().enumerate() {
            let i = dst.iter().position(|d| d == gi).expect("basis grows along edges");
            m.set(i, j, 1);
        }
        m
    };
    let mut b = GridBuilder::new(field, bounds);
    for g in grades_in(bounds) {
        let (x, y) = (g.x as usize, g.y as usize);
        b.set_dim(x, y, basis_at(g).len())?;
        if x < bounds.0 {
            b.set_hmap(x, y, inclusion(g, g + Grade::E1))?;
        }
        if y < bounds.1 {
            b.set_vmap(x, y, inclusion(g, g + Grade::E2))?;
        }
    }
    Ok(b.build_unchecked())
}
