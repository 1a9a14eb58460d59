//! Exhaustive isomorphism search between small grid modules.
//!
//! Grades are visited in lexicographic order. At each grade we try every
//! invertible matrix and keep it only if it commutes with the edges arriving
//! from the left and from below, both of which are already assigned. When
//! one of those edges is itself invertible the candidate is forced and no
//! enumeration happens.

use thiserror::Error;

use crate::grid::{Grade, GridModule};
use crate::linalg::{DenseMatrix, PrimeField};

/// Default budget on the number of candidate matrices examined.
pub const DEFAULT_SEARCH_CAP: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsoError {
    #[error("modules are over different fields: GF({0}) vs GF({1})")]
    FieldMismatch(u32, u32),
    #[error("search cap of {cap} candidates exceeded")]
    CapExceeded { cap: u64 },
    #[error("GL_{dim}(GF({p})) is too large to enumerate")]
    GroupTooLarge { dim: usize, p: u32 },
}

/// Outcome of a successful search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoSearch {
    pub isomorphic: bool,
    /// Candidate matrices examined.
    pub visited: u64,
}

/// `Ok(true)` iff a gradewise invertible family intertwines all edge maps.
pub fn brute_force_isomorphic(m: &GridModule, n: &GridModule) -> Result<bool, IsoError> {
    search_isomorphism(m, n, DEFAULT_SEARCH_CAP).map(|s| s.isomorphic)
}

pub fn search_isomorphism(m: &GridModule, n: &GridModule, cap: u64) -> Result<IsoSearch, IsoError> {
    if m.field() != n.field() {
        return Err(IsoError::FieldMismatch(
            m.field().modulus(),
            n.field().modulus(),
        ));
    }
    let bounds = (m.bounds().0.max(n.bounds().0), m.bounds().1.max(n.bounds().1));
    let (m, n) = (m.extend_bounds(bounds), n.extend_bounds(bounds));
    if m.dimension_vector() != n.dimension_vector() {
        return Ok(IsoSearch {
            isomorphic: false,
            visited: 0,
        });
    }
    let grades: Vec<Grade> = m.box_grades().filter(|&g| m.dim(g) > 0).collect();
    let max_dim = grades.iter().map(|&g| m.dim(g)).max().unwrap_or(0);
    let mut groups = Vec::with_capacity(max_dim + 1);
    for d in 0..=max_dim {
        groups.push(general_linear_group(m.field(), d)?);
    }
    let mut search = Search {
        m: &m,
        n: &n,
        grades: &grades,
        groups: &groups,
        assigned: vec![None; (bounds.0 + 1) * (bounds.1 + 1)],
        visited: 0,
        cap,
    };
    let isomorphic = search.run(0)?;
    Ok(IsoSearch {
        isomorphic,
        visited: search.visited,
    })
}

/// Every invertible `dim x dim` matrix over the field, in lexicographic order
/// of their row-major entries.
pub fn general_linear_group(field: PrimeField, dim: usize) -> Result<Vec<DenseMatrix>, IsoError> {
    let p = u64::from(field.modulus());
    let entries = dim * dim;
    let total = (0..entries).try_fold(1u64, |acc, _| acc.checked_mul(p));
    let total = match total {
        Some(t) if t <= 1 << 24 => t,
        _ => {
            return Err(IsoError::GroupTooLarge {
                dim,
                p: field.modulus(),
            })
        }
    };
    let mut out = Vec::new();
    let mut digits = vec![0u32; entries];
    for _ in 0..total {
        let m = DenseMatrix::from_row_major(field, dim, dim, digits.clone()).expect("square");
        if m.is_invertible() {
            out.push(m);
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if u64::from(*d) < p {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

struct Search<'a> {
    m: &'a GridModule,
    n: &'a GridModule,
    grades: &'a [Grade],
    groups: &'a [Vec<DenseMatrix>],
    assigned: Vec<Option<DenseMatrix>>,
    visited: u64,
    cap: u64,
}

/// An edge into the current grade from an already assigned one.
struct Incoming {
    source: DenseMatrix,
    edge_m: DenseMatrix,
    edge_n: DenseMatrix,
}

impl Search<'_> {
    fn slot(&self, g: Grade) -> usize {
        g.x as usize * (self.m.bounds().1 + 1) + g.y as usize
    }

    fn incoming(&self, g: Grade) -> Vec<Incoming> {
        let mut out = Vec::new();
        for (step, left) in [(Grade::E1, true), (Grade::E2, false)] {
            let src = g - step;
            if !src.is_nonnegative() || self.m.dim(src) == 0 {
                continue;
            }
            let source = self.assigned[self.slot(src)]
                .clone()
                .expect("predecessors come first in lexicographic order");
            let (edge_m, edge_n) = if left {
                (self.m.edge_h(src), self.n.edge_h(src))
            } else {
                (self.m.edge_v(src), self.n.edge_v(src))
            };
            out.push(Incoming {
                source,
                edge_m,
                edge_n,
            });
        }
        out
    }

    /// `gamma_target * edge_m == edge_n * gamma_source` for every incoming edge.
    fn consistent(candidate: &DenseMatrix, incoming: &[Incoming]) -> bool {
        incoming.iter().all(|e| {
            let lhs = candidate.mul(&e.edge_m).expect("shapes agree");
            let rhs = e.edge_n.mul(&e.source).expect("shapes agree");
            lhs == rhs
        })
    }

    fn tick(&mut self) -> Result<(), IsoError> {
        self.visited += 1;
        if self.visited > self.cap {
            return Err(IsoError::CapExceeded { cap: self.cap });
        }
        Ok(())
    }

    fn run(&mut self, depth: usize) -> Result<bool, IsoError> {
        let Some(&g) = self.grades.get(depth) else {
            return Ok(true);
        };
        let incoming = self.incoming(g);
        let slot = self.slot(g);

        // An invertible incoming edge pins the candidate down completely.
        let forced = incoming.iter().find_map(|e| {
            e.edge_m.inverse().map(|inv| {
                e.edge_n
                    .mul(&e.source)
                    .and_then(|t| t.mul(&inv))
                    .expect("shapes agree")
            })
        });
        if let Some(candidate) = forced {
            self.tick()?;
            if !candidate.is_invertible() || !Self::consistent(&candidate, &incoming) {
                return Ok(false);
            }
            self.assigned[slot] = Some(candidate);
            let found = self.run(depth + 1)?;
            self.assigned[slot] = None;
            return Ok(found);
        }

        let dim = self.m.dim(g);
        let groups = self.groups;
        for candidate in &groups[dim] {
            self.tick()?;
            if !Self::consistent(candidate, &incoming) {
                continue;
            }
            self.assigned[slot] = Some(candidate.clone());
            if self.run(depth + 1)? {
                self.assigned[slot] = None;
                return Ok(true);
            }
        }
        self.assigned[slot] = None;
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_cz_family, gen_hook, gen_simple};
    use crate::grid::{free_module, GradeMultiset};

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn group_orders() {
        // |GL_n(q)| = prod (q^n - q^i)
        assert_eq!(general_linear_group(gf(2), 0).unwrap().len(), 1);
        assert_eq!(general_linear_group(gf(2), 2).unwrap().len(), 6);
        assert_eq!(general_linear_group(gf(3), 2).unwrap().len(), 48);
        assert_eq!(general_linear_group(gf(5), 2).unwrap().len(), 480);
        assert_eq!(general_linear_group(gf(2), 3).unwrap().len(), 168);
    }

    #[test]
    fn reflexive_on_fixtures() {
        let f = gf(5);
        for m in [
            gen_simple(Grade::new(0, 0), f, (1, 1)).unwrap(),
            gen_hook(f, (2, 2)).unwrap(),
            gen_cz_family(2, f).unwrap(),
        ] {
            assert!(brute_force_isomorphic(&m, &m).unwrap());
        }
    }

    #[test]
    fn different_dimension_vectors() {
        let f = gf(2);
        let a = gen_simple(Grade::new(0, 0), f, (2, 2)).unwrap();
        let b = gen_simple(Grade::new(1, 0), f, (2, 2)).unwrap();
        let s = search_isomorphism(&a, &b, DEFAULT_SEARCH_CAP).unwrap();
        assert!(!s.isomorphic);
        assert_eq!(s.visited, 0);
    }

    #[test]
    fn cz_family_members_are_not_isomorphic() {
        let f = gf(5);
        let a = gen_cz_family(2, f).unwrap();
        let b = gen_cz_family(3, f).unwrap();
        assert!(!brute_force_isomorphic(&a, &b).unwrap());
        assert!(!brute_force_isomorphic(&b, &a).unwrap());
    }

    #[test]
    fn cap_is_reported_distinctly() {
        let f = gf(5);
        let a = gen_cz_family(2, f).unwrap();
        assert_eq!(
            search_isomorphism(&a, &a, 3),
            Err(IsoError::CapExceeded { cap: 3 })
        );
    }

    #[test]
    fn direct_sum_order_does_not_matter() {
        let f = gf(3);
        let s: GradeMultiset = [Grade::new(0, 1)].into_iter().collect();
        let free = free_module(&s, (2, 2), f).unwrap();
        let hook = gen_hook(f, (2, 2)).unwrap();
        let ab = free.direct_sum(&hook).unwrap();
        let ba = hook.direct_sum(&free).unwrap();
        assert!(brute_force_isomorphic(&ab, &ba).unwrap());
        assert!(!brute_force_isomorphic(&ab, &free.direct_sum(&free).unwrap()).unwrap());
    }
}
