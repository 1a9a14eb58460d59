//! Finite zigzag modules and their interval barcodes.
//!
//! Barcodes are computed from generalized ranks: for an interval `[b,d]` of
//! vertices, the rank of the canonical map from the limit of the restricted
//! diagram to its colimit counts the bars containing `[b,d]`. Inclusion-
//! exclusion over the neighbouring intervals then isolates the bars equal to
//! `[b,d]`. Vertices are numbered from 1.
//!
//! The frames of a grid module at a grade `alpha` are the 3-vertex zigzags
//! `M(alpha-e1) -> M(alpha) <- M(alpha-e2)` (into) and
//! `M(alpha+e1) <- M(alpha) -> M(alpha+e2)` (outward).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::grid::{Grade, GridModule};
use crate::linalg::{DenseMatrix, PrimeField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZigzagError {
    #[error("a zigzag needs at least one vertex")]
    Empty,
    #[error("expected {expected} maps for {vertices} vertices, got {found}")]
    MapCount {
        vertices: usize,
        expected: usize,
        found: usize,
    },
    #[error("map {index} has shape {found:?}, expected {expected:?}")]
    MapShape {
        index: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("map {index} is over a different field")]
    FieldMismatch { index: usize },
    #[error("bar [{start},{end}] does not fit in {len} vertices")]
    BadBar { start: usize, end: usize, len: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Vertex `i` maps to vertex `i+1`.
    Forward,
    /// Vertex `i+1` maps to vertex `i`.
    Backward,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        }
    }
}

/// One arrow of a zigzag together with its orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZigzagMap {
    pub matrix: DenseMatrix,
    pub direction: Direction,
}

/// A zigzag persistence module `M_1 - M_2 - ... - M_L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZigzagModule {
    field: PrimeField,
    dims: Vec<usize>,
    maps: Vec<ZigzagMap>,
}

impl ZigzagModule {
    /// Checks that map `i` has shape `dims[i+1] x dims[i]` (forward) or
    /// `dims[i] x dims[i+1]` (backward).
    pub fn new(
        field: PrimeField,
        dims: Vec<usize>,
        maps: Vec<ZigzagMap>,
    ) -> Result<Self, ZigzagError> {
        if dims.is_empty() {
            return Err(ZigzagError::Empty);
        }
        if maps.len() + 1 != dims.len() {
            return Err(ZigzagError::MapCount {
                vertices: dims.len(),
                expected: dims.len() - 1,
                found: maps.len(),
            });
        }
        for (i, m) in maps.iter().enumerate() {
            if m.matrix.field() != field {
                return Err(ZigzagError::FieldMismatch { index: i + 1 });
            }
            let expected = match m.direction {
                Direction::Forward => (dims[i + 1], dims[i]),
                Direction::Backward => (dims[i], dims[i + 1]),
            };
            if m.matrix.shape() != expected {
                return Err(ZigzagError::MapShape {
                    index: i + 1,
                    expected,
                    found: m.matrix.shape(),
                });
            }
        }
        Ok(Self { field, dims, maps })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[ZigzagMap] {
        &self.maps
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.maps.iter().map(|m| m.direction).collect()
    }

    /// Number of bars containing the vertex interval `[b, d]` (1-based),
    /// computed as the rank of limit -> colimit of the restricted diagram.
    pub fn generalized_rank(&self, b: usize, d: usize) -> usize {
        if b < 1 || d > self.len() || b > d {
            return 0;
        }
        let (lo, hi) = (b - 1, d - 1);
        let f = self.field;
        // offsets of each vertex inside the direct sum of the restricted spaces
        let mut offsets = Vec::with_capacity(hi - lo + 2);
        let mut total = 0;
        for v in lo..=hi {
            offsets.push(total);
            total += self.dims[v];
        }
        if self.dims[lo..=hi].contains(&0) {
            return 0;
        }

        // Each arrow src -> dst contributes the block rows A*v_src - v_dst = 0
        // to the limit and the columns iota_src(e) - iota_dst(A e) to the
        // colimit relations.
        let mut constraint_rows: Vec<Vec<u32>> = Vec::new();
        let mut relations: Vec<Vec<u32>> = Vec::new();
        for e in lo..hi {
            let m = &self.maps[e];
            let (src, dst) = match m.direction {
                Direction::Forward => (e, e + 1),
                Direction::Backward => (e + 1, e),
            };
            let (so, dof) = (offsets[src - lo], offsets[dst - lo]);
            for r in 0..m.matrix.rows() {
                let mut row = vec![0u32; total];
                for c in 0..m.matrix.cols() {
                    row[so + c] = m.matrix.get(r, c);
                }
                row[dof + r] = f.sub(row[dof + r], 1);
                constraint_rows.push(row);
            }
            for c in 0..m.matrix.cols() {
                let mut col = vec![0u32; total];
                col[so + c] = 1;
                for r in 0..m.matrix.rows() {
                    col[dof + r] = f.sub(col[dof + r], m.matrix.get(r, c));
                }
                relations.push(col);
            }
        }
        let limit = if constraint_rows.is_empty() {
            DenseMatrix::identity(f, total)
        } else {
            let rows: Vec<Vec<i64>> = constraint_rows
                .iter()
                .map(|r| r.iter().map(|&v| i64::from(v)).collect())
                .collect();
            DenseMatrix::from_rows(f, &rows).kernel_basis()
        };
        if limit.cols() == 0 {
            return 0;
        }
        // limit -> M_b -> colimit; the choice of vertex is immaterial in the colimit
        let first = self.dims[lo];
        let mut pushed = DenseMatrix::zeros(f, total, limit.cols());
        for i in 0..first {
            for j in 0..limit.cols() {
                pushed.set(i, j, limit.get(i, j));
            }
        }
        let rel = DenseMatrix::from_columns(f, total, &relations);
        let base = rel.rank();
        rel.hstack(&pushed).expect("same ambient").rank() - base
    }

    /// The interval decomposition.
    pub fn barcode(&self) -> Barcode {
        let len = self.len();
        let mut ranks = vec![vec![0usize; len + 2]; len + 2];
        for b in 1..=len {
            for d in b..=len {
                ranks[b][d] = self.generalized_rank(b, d);
            }
        }
        let r = |b: usize, d: usize| -> i64 {
            if b == 0 || d > len || b > d {
                0
            } else {
                ranks[b][d] as i64
            }
        };
        let mut bars = Barcode::new();
        for b in 1..=len {
            for d in b..=len {
                let mult = r(b, d) - r(b - 1, d) - r(b, d + 1) + r(b - 1, d + 1);
                assert!(mult >= 0, "negative bar multiplicity at [{b},{d}]");
                bars.insert(Interval::new(b, d), mult as usize);
            }
        }
        bars
    }
}

/// The vertex interval `[start, end]`, 1-based and inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.start <= v && v <= self.end
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

/// A multiset of intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Barcode {
    bars: BTreeMap<Interval, usize>,
}

impl Barcode {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, bar: Interval, mult: usize) {
        if mult > 0 {
            *self.bars.entry(bar).or_insert(0) += mult;
        }
    }

    pub fn multiplicity(&self, bar: Interval) -> usize {
        self.bars.get(&bar).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.bars.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Interval, usize)> + '_ {
        self.bars.iter().map(|(&b, &m)| (b, m))
    }

    /// Number of bars through vertex `v`.
    pub fn dim_at(&self, v: usize) -> usize {
        self.iter().filter(|(b, _)| b.contains(v)).map(|(_, m)| m).sum()
    }
}

impl FromIterator<Interval> for Barcode {
    fn from_iter<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        let mut b = Barcode::new();
        for bar in iter {
            b.insert(bar, 1);
        }
        b
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .iter()
            .map(|(b, m)| if m == 1 { b.to_string() } else { format!("{b}x{m}") })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Direct sum of interval modules, one per bar, in the given order.
///
/// The basis at vertex `i` is the bars through `i`; every map sends a bar's
/// basis vector to the same bar's vector on the other side, whatever the
/// orientation.
pub fn gen_from_barcode(
    bars: &[Interval],
    directions: &[Direction],
    field: PrimeField,
) -> Result<ZigzagModule, ZigzagError> {
    let len = directions.len() + 1;
    for b in bars {
        if b.start < 1 || b.start > b.end || b.end > len {
            return Err(ZigzagError::BadBar {
                start: b.start,
                end: b.end,
                len,
            });
        }
    }
    let through = |v: usize| -> Vec<usize> {
        (0..bars.len()).filter(|&k| bars[k].contains(v)).collect()
    };
    let dims: Vec<usize> = (1..=len).map(|v| through(v).len()).collect();
    let mut maps = Vec::with_capacity(directions.len());
    for (e, &direction) in directions.iter().enumerate() {
        let (src, dst) = match direction {
            Direction::Forward => (through(e + 1), through(e + 2)),
            Direction::Backward => (through(e + 2), through(e + 1)),
        };
        let mut m = DenseMatrix::zeros(field, dst.len(), src.len());
        for (j, k) in src.iter().enumerate() {
            if let Some(i) = dst.iter().position(|d| d == k) {
                m.set(i, j, 1);
            }
        }
        maps.push(ZigzagMap {
            matrix: m,
            direction,
        });
    }
    ZigzagModule::new(field, dims, maps)
}

/// The eight bars of the worked 4-vertex example, top to bottom.
pub fn eight_bars() -> Vec<Interval> {
    [(1, 4), (2, 4), (1, 3), (1, 1), (2, 2), (3, 4), (1, 1), (2, 3)]
        .into_iter()
        .map(|(s, e)| Interval::new(s, e))
        .collect()
}

/// `M(alpha-e1) -> M(alpha) <- M(alpha-e2)`.
pub fn restrict_into_frame(m: &GridModule, alpha: Grade) -> ZigzagModule {
    let left = alpha - Grade::E1;
    let below = alpha - Grade::E2;
    let dims = vec![m.dim(left), m.dim(alpha), m.dim(below)];
    let maps = vec![
        ZigzagMap {
            matrix: m.edge_h(left),
            direction: Direction::Forward,
        },
        ZigzagMap {
            matrix: m.edge_v(below),
            direction: Direction::Backward,
        },
    ];
    ZigzagModule::new(m.field(), dims, maps).expect("frame shapes follow the grid")
}

/// `M(alpha+e1) <- M(alpha) -> M(alpha+e2)`.
pub fn restrict_outward_frame(m: &GridModule, alpha: Grade) -> ZigzagModule {
    let dims = vec![
        m.dim(alpha + Grade::E1),
        m.dim(alpha),
        m.dim(alpha + Grade::E2),
    ];
    let maps = vec![
        ZigzagMap {
            matrix: m.edge_h(alpha),
            direction: Direction::Backward,
        },
        ZigzagMap {
            matrix: m.edge_v(alpha),
            direction: Direction::Forward,
        },
    ];
    ZigzagModule::new(m.field(), dims, maps).expect("frame shapes follow the grid")
}

/// `dim M(alpha) / (im h + im v)` for the two edges arriving at `alpha`.
pub fn y_alpha(m: &GridModule, alpha: Grade) -> usize {
    let d = m.dim(alpha);
    let h = m.edge_h(alpha - Grade::E1);
    let v = m.edge_v(alpha - Grade::E2);
    d - h.hstack(&v).expect("same target").rank()
}

/// `dim (ker h ∩ ker v)` for the two edges leaving `alpha`.
pub fn z_alpha(m: &GridModule, alpha: Grade) -> usize {
    let h = m.edge_h(alpha);
    let v = m.edge_v(alpha);
    h.vstack(&v).expect("same source").kernel_basis().cols()
}

/// Multiplicity of the point bar at the centre of the into frame.
pub fn y_alpha_from_barcode(m: &GridModule, alpha: Grade) -> usize {
    restrict_into_frame(m, alpha)
        .barcode()
        .multiplicity(Interval::new(2, 2))
}

/// Multiplicity of the point bar at the centre of the outward frame.
pub fn z_alpha_from_barcode(m: &GridModule, alpha: Grade) -> usize {
    restrict_outward_frame(m, alpha)
        .barcode()
        .multiplicity(Interval::new(2, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_hook, gen_simple};
    use crate::grid::{free_module, GradeMultiset};

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn origin() -> GradeMultiset {
        [Grade::new(0, 0)].into_iter().collect()
    }

    #[test]
    fn single_vertex() {
        let z = ZigzagModule::new(gf(2), vec![3], vec![]).unwrap();
        let bc = z.barcode();
        assert_eq!(bc.multiplicity(Interval::new(1, 1)), 3);
        assert_eq!(bc.total(), 3);
    }

    #[test]
    fn identity_edge() {
        let f = gf(3);
        for direction in [Direction::Forward, Direction::Backward] {
            let z = ZigzagModule::new(
                f,
                vec![1, 1],
                vec![ZigzagMap {
                    matrix: DenseMatrix::identity(f, 1),
                    direction,
                }],
            )
            .unwrap();
            let expected: Barcode = [Interval::new(1, 2)].into_iter().collect();
            assert_eq!(z.barcode(), expected);
        }
    }

    #[test]
    fn zero_edge_splits() {
        let f = gf(2);
        let z = ZigzagModule::new(
            f,
            vec![1, 1],
            vec![ZigzagMap {
                matrix: DenseMatrix::zeros(f, 1, 1),
                direction: Direction::Forward,
            }],
        )
        .unwrap();
        let expected: Barcode = [Interval::new(1, 1), Interval::new(2, 2)].into_iter().collect();
        assert_eq!(z.barcode(), expected);
    }

    #[test]
    fn rejects_bad_shapes() {
        let f = gf(2);
        let err = ZigzagModule::new(
            f,
            vec![1, 2],
            vec![ZigzagMap {
                matrix: DenseMatrix::zeros(f, 1, 2),
                direction: Direction::Forward,
            }],
        )
        .unwrap_err();
        assert!(matches!(err, ZigzagError::MapShape { index: 1, .. }));
        assert!(matches!(
            ZigzagModule::new(f, vec![1, 1], vec![]),
            Err(ZigzagError::MapCount { .. })
        ));
        assert_eq!(ZigzagModule::new(f, vec![], vec![]), Err(ZigzagError::Empty));
    }

    #[test]
    fn from_barcode_single_bar() {
        let f = gf(2);
        let z = gen_from_barcode(&[Interval::new(1, 2)], &[Direction::Backward], f).unwrap();
        assert_eq!(z.dims(), &[1, 1]);
        assert_eq!(z.maps()[0].matrix, DenseMatrix::identity(f, 1));
        assert!(gen_from_barcode(&[Interval::new(2, 3)], &[Direction::Forward], f).is_err());
    }

    #[test]
    fn eight_bar_dimensions() {
        let f = gf(2);
        let dirs = [Direction::Forward, Direction::Backward, Direction::Forward];
        let z = gen_from_barcode(&eight_bars(), &dirs, f).unwrap();
        // only [1,4], [2,4] and [3,4] reach the last vertex
        assert_eq!(z.dims(), &[4, 5, 5, 3]);
        let expected: Barcode = eight_bars().into_iter().collect();
        assert_eq!(z.barcode(), expected);
    }

    #[test]
    fn frames_of_fixtures() {
        let f = gf(2);
        let simple = gen_simple(Grade::new(0, 0), f, (1, 1)).unwrap();
        let o = Grade::new(0, 0);
        assert_eq!(restrict_into_frame(&simple, o).dims(), &[0, 1, 0]);
        assert_eq!(restrict_outward_frame(&simple, o).dims(), &[0, 1, 0]);
        assert_eq!(y_alpha(&simple, o), 1);
        assert_eq!(z_alpha(&simple, o), 1);

        let free = free_module(&origin(), (2, 2), f).unwrap();
        let into = restrict_into_frame(&free, Grade::new(1, 1));
        assert_eq!(into.dims(), &[1, 1, 1]);
        assert!(into.maps().iter().all(|m| m.matrix == DenseMatrix::identity(f, 1)));
        assert_eq!(y_alpha(&free, Grade::new(1, 1)), 0);

        let hook = gen_hook(f, (2, 2)).unwrap();
        assert_eq!(restrict_into_frame(&hook, Grade::new(1, 1)).dims(), &[1, 0, 1]);
        let out = restrict_outward_frame(&hook, o);
        assert_eq!(out.dims(), &[1, 1, 1]);
        assert!(out.maps().iter().all(|m| m.matrix == DenseMatrix::identity(f, 1)));
        assert_eq!(y_alpha(&hook, Grade::new(0, 1)), 0);
        assert_eq!(y_alpha(&hook, o), 1);
    }

    #[test]
    fn free_modules_have_no_point_kernels() {
        let f = gf(3);
        let s: GradeMultiset = [(0, 1), (1, 0), (1, 0), (2, 2)]
            .into_iter()
            .map(Grade::from)
            .collect();
        let m = free_module(&s, (3, 3), f).unwrap();
        for x in -1..6 {
            for y in -1..6 {
                let g = Grade::new(x, y);
                assert_eq!(z_alpha(&m, g), 0);
                assert_eq!(z_alpha_from_barcode(&m, g), 0);
                let out = restrict_outward_frame(&m, g);
                assert!(out.maps().iter().all(|e| e.matrix.rank() == e.matrix.cols()));
            }
        }
    }
}
