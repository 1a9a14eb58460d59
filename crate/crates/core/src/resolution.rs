//! Minimal free resolutions by repeated free covers.
//!
//! For a module `M`, the quotient `W(alpha) = M(alpha) / (im h + im v)` of
//! each space by the images arriving from the left and from below measures
//! where new generators are needed. Lifting a basis of every `W(alpha)` gives
//! a surjection `gamma: F_0 -> M` from the free module on those grades, and
//! its kernel `K_0` is again a grid module. Covering `K_0` and then `K_1` the
//! same way produces
//!
//! ```text
//! K_2 -> F_2 -> K_1 -> F_1 -> K_0 -> F_0 -> M
//! ```
//!
//! with `K_2 = 0` for 2-parameter modules. Every kernel keeps its basis in the
//! coordinates of the free module it sits in, so subspace questions about
//! kernels are plain column-space computations.

use thiserror::Error;

use crate::betti::BettiTable;
use crate::grid::{free_module, grades_in, Grade, GradeMultiset, GridBuilder, GridError, GridModule, Violation};
use crate::linalg::{cokernel_reps, intersect_subspaces, DenseMatrix};
use crate::zigzag::z_alpha;

/// Extra room added to the input box before resolving.
pub const DEFAULT_PADDING: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("cover is not surjective at {grade} (rank {rank} < dim {dim})")]
    NotSurjective { grade: Grade, rank: usize, dim: usize },
    #[error("free structure map does not preserve the kernel at {grade}")]
    KernelNotPreserved { grade: Grade },
    #[error("kernel module fails validation: {0:?}")]
    InvalidKernel(Vec<Violation>),
    #[error("syzygy violation: third kernel has dimension {dim} at {grade}")]
    SyzygyViolation { grade: Grade, dim: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// How lifts of `W(alpha)` are chosen; any choice yields the same multisets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PivotOrder {
    /// Prefer low coordinates for the complement of the incoming images.
    #[default]
    Natural,
    /// Prefer high coordinates.
    Reversed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolveOptions {
    pub padding: usize,
    pub pivot_order: PivotOrder,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        Self {
            padding: DEFAULT_PADDING,
            pivot_order: PivotOrder::Natural,
        }
    }
}

/// One free cover `gamma: F -> M` together with its kernel.
#[derive(Clone, Debug)]
pub struct CoverStep {
    /// Per box grade (lexicographic), the lifted generators as columns of `M(alpha)`.
    pub generators: Vec<DenseMatrix>,
    /// Grades of the free generators, i.e. `xi_0` of the covered module.
    pub free_grades: GradeMultiset,
    pub free: GridModule,
    /// Per box grade, the matrix of `gamma(alpha): F(alpha) -> M(alpha)`.
    pub gamma: Vec<DenseMatrix>,
    pub kernel: GridModule,
    /// Per box grade, a basis of `ker gamma(alpha)` in the coordinates of `F(alpha)`.
    pub kernel_basis: Vec<DenseMatrix>,
}

impl CoverStep {
    fn slot(&self, g: Grade) -> Option<usize> {
        if !g.is_nonnegative() {
            return None;
        }
        let (x, y) = self.free.clamp(g);
        Some(x * (self.free.bounds().1 + 1) + y)
    }

    /// Kernel basis at any grade, following the clamped extension.
    pub fn kernel_basis_at(&self, g: Grade) -> DenseMatrix {
        match self.slot(g) {
            Some(i) => self.kernel_basis[i].clone(),
            None => DenseMatrix::zeros(self.free.field(), 0, 0),
        }
    }

    pub fn gamma_at(&self, g: Grade) -> DenseMatrix {
        match self.slot(g) {
            Some(i) => self.gamma[i].clone(),
            None => DenseMatrix::zeros(self.free.field(), 0, 0),
        }
    }
}

/// The three covers of a 2-parameter module and its Betti multisets.
#[derive(Clone, Debug)]
pub struct Resolution {
    /// The input module extended to the working box.
    pub module: GridModule,
    pub xi: [GradeMultiset; 3],
    /// Covers of `M`, `K_0` and `K_1`.
    pub steps: Vec<CoverStep>,
    /// The cover of `K_1` has zero kernel.
    pub syzygy_witness: bool,
}

impl Resolution {
    pub fn bounds(&self) -> (usize, usize) {
        self.module.bounds()
    }

    /// `F_j` for `j = 0, 1, 2`.
    pub fn free(&self, j: usize) -> &GridModule {
        &self.steps[j].free
    }

    /// `K_j` for `j = 0, 1, 2`.
    pub fn kernel(&self, j: usize) -> &GridModule {
        &self.steps[j].kernel
    }
}

/// Lifts of a basis of `W(alpha)` into `M(alpha)`.
pub fn w_space(m: &GridModule, alpha: Grade) -> DenseMatrix {
    w_space_with(m, alpha, PivotOrder::Natural)
}

pub fn w_space_with(m: &GridModule, alpha: Grade, order: PivotOrder) -> DenseMatrix {
    let d = m.dim(alpha);
    let incoming = m
        .edge_h(alpha - Grade::E1)
        .hstack(&m.edge_v(alpha - Grade::E2))
        .expect("both edges land in M(alpha)");
    match order {
        PivotOrder::Natural => cokernel_reps(&incoming, d),
        PivotOrder::Reversed => {
            let rev: Vec<usize> = (0..d).rev().collect();
            let flipped = incoming.transpose().select_columns(&rev).transpose();
            cokernel_reps(&flipped, d).transpose().select_columns(&rev).transpose()
        }
    }
}

/// `alpha -> dim W(alpha)` as a multiset over the box.
pub fn beta0(m: &GridModule) -> GradeMultiset {
    let mut out = GradeMultiset::new();
    for g in m.box_grades() {
        out.insert(g, w_space(m, g).cols());
    }
    out
}

/// Free cover of `m` over its box enlarged by `opts.padding`.
pub fn build_cover(m: &GridModule, opts: ResolveOptions) -> Result<CoverStep, ResolutionError> {
    let (s1, s2) = m.bounds();
    let working = m.extend_bounds((s1 + opts.padding, s2 + opts.padding));
    cover_in_box(&working, opts.pivot_order)
}

fn cover_in_box(m: &GridModule, order: PivotOrder) -> Result<CoverStep, ResolutionError> {
    let field = m.field();
    let bounds = m.bounds();
    let slot = |g: Grade| g.x as usize * (bounds.1 + 1) + g.y as usize;

    let generators: Vec<DenseMatrix> = grades_in(bounds)
        .map(|g| w_space_with(m, g, order))
        .collect();
    let mut free_grades = GradeMultiset::new();
    for g in grades_in(bounds) {
        free_grades.insert(g, generators[slot(g)].cols());
    }
    let free = free_module(&free_grades, bounds, field)?;
    let gens = free_grades.expanded();

    // gamma column for generator i at alpha: the lift itself at its own grade,
    // otherwise pushed one step from the left or from below.
    let mut gamma: Vec<DenseMatrix> = Vec::with_capacity(generators.len());
    for alpha in grades_in(bounds) {
        let basis: Vec<usize> = (0..gens.len()).filter(|&i| gens[i].leq(alpha)).collect();
        let from_left = (alpha.x > 0).then(|| {
            let src = alpha - Grade::E1;
            m.edge_h(src).mul(&gamma[slot(src)]).expect("shapes agree")
        });
        let from_below = (alpha.y > 0).then(|| {
            let src = alpha - Grade::E2;
            m.edge_v(src).mul(&gamma[slot(src)]).expect("shapes agree")
        });
        let position_in = |g: Grade, i: usize| -> usize {
            gens.iter()
                .enumerate()
                .filter(|&(_, gi)| gi.leq(g))
                .position(|(k, _)| k == i)
                .expect("generator present below")
        };
        let own = &generators[slot(alpha)];
        let first_own = gens.iter().position(|&g| g == alpha);
        let mut columns = Vec::with_capacity(basis.len());
        for &i in &basis {
            let col = if gens[i] == alpha {
                own.column(i - first_own.expect("generator at alpha"))
            } else if gens[i].x < alpha.x {
                let src = alpha - Grade::E1;
                from_left.as_ref().expect("left exists").column(position_in(src, i))
            } else {
                let src = alpha - Grade::E2;
                from_below.as_ref().expect("below exists").column(position_in(src, i))
            };
            columns.push(col);
        }
        let g_alpha = DenseMatrix::from_columns(field, m.dim(alpha), &columns);
        let rank = g_alpha.rank();
        if rank != m.dim(alpha) {
            return Err(ResolutionError::NotSurjective {
                grade: alpha,
                rank,
                dim: m.dim(alpha),
            });
        }
        gamma.push(g_alpha);
    }

    let kernel_basis: Vec<DenseMatrix> = gamma.iter().map(DenseMatrix::kernel_basis).collect();
    let mut b = GridBuilder::new(field, bounds);
    for g in grades_in(bounds) {
        let (x, y) = (g.x as usize, g.y as usize);
        let kb = &kernel_basis[slot(g)];
        b.set_dim(x, y, kb.cols())?;
        for (step, horizontal) in [(Grade::E1, true), (Grade::E2, false)] {
            let t = g + step;
            if t.x as usize > bounds.0 || t.y as usize > bounds.1 {
                continue;
            }
            let edge = if horizontal { free.hmap(x, y) } else { free.vmap(x, y) };
            let pushed = edge.mul(kb).expect("shapes agree");
            let induced = kernel_basis[slot(t)]
                .solve_matrix(&pushed)
                .ok_or(ResolutionError::KernelNotPreserved { grade: g })?;
            if horizontal {
                b.set_hmap(x, y, induced)?;
            } else {
                b.set_vmap(x, y, induced)?;
            }
        }
    }
    let kernel = b.build_unchecked();
    let violations = kernel.validate();
    if !violations.is_empty() {
        return Err(ResolutionError::InvalidKernel(violations));
    }
    Ok(CoverStep {
        generators,
        free_grades,
        free,
        gamma,
        kernel,
        kernel_basis,
    })
}

pub fn resolve(m: &GridModule) -> Result<Resolution, ResolutionError> {
    resolve_with(m, ResolveOptions::default())
}

pub fn resolve_with(m: &GridModule, opts: ResolveOptions) -> Result<Resolution, ResolutionError> {
    let (s1, s2) = m.bounds();
    let working = m.extend_bounds((s1 + opts.padding, s2 + opts.padding));
    let c0 = cover_in_box(&working, opts.pivot_order)?;
    let c1 = cover_in_box(&c0.kernel, opts.pivot_order)?;
    let c2 = cover_in_box(&c1.kernel, opts.pivot_order)?;
    if let Some(g) = c2.kernel.box_grades().find(|&g| c2.kernel.dim(g) > 0) {
        return Err(ResolutionError::SyzygyViolation {
            grade: g,
            dim: c2.kernel.dim(g),
        });
    }
    let xi = [
        c0.free_grades.clone(),
        c1.free_grades.clone(),
        c2.free_grades.clone(),
    ];
    Ok(Resolution {
        module: working,
        xi,
        steps: vec![c0, c1, c2],
        syzygy_witness: true,
    })
}

/// Betti numbers read off the minimal free resolution.
pub fn betti_resolution(m: &GridModule) -> Result<BettiTable, ResolutionError> {
    Ok(BettiTable::from(resolve(m)?.xi))
}

/// Subspace data behind the `beta_1` count at `alpha + e1 + e2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntersectionDiagnostic {
    /// `dim` of the intersection of the kernels at `alpha+e1` and `alpha+e2`
    /// pushed into `F(alpha+e1+e2)`.
    pub dim_i: usize,
    /// `dim K(alpha)`.
    pub dim_k: usize,
    pub z: usize,
    /// The intersection lies in the image of `F(alpha)`.
    pub contained: bool,
    /// `dim_i == dim_k + z`.
    pub identity_ok: bool,
}

/// Evaluates the intersection `I(alpha)` for the first cover of `m`.
///
/// `cover` must be the cover of `m` (e.g. `resolution.steps[0]`).
pub fn intersection_diagnostic(
    m: &GridModule,
    cover: &CoverStep,
    alpha: Grade,
) -> IntersectionDiagnostic {
    let free = &cover.free;
    let top = alpha + Grade::E1 + Grade::E2;
    let push = |g: Grade| -> DenseMatrix {
        free.map_matrix(g, top)
            .and_then(|p| Ok(p.mul(&cover.kernel_basis_at(g))?))
            .expect("grades are comparable")
    };
    let u = push(alpha + Grade::E1);
    let v = push(alpha + Grade::E2);
    let inter = intersect_subspaces(&u, &v).expect("same ambient space");
    let dim_i = inter.cols();
    let dim_k = cover.kernel.dim(alpha);
    let z = z_alpha(m, alpha);
    let from_alpha = free.map_matrix(alpha, top).expect("alpha <= top");
    IntersectionDiagnostic {
        dim_i,
        dim_k,
        z,
        contained: from_alpha.spans(&inter),
        identity_ok: dim_i == dim_k + z,
    }
}
