//! Exact nearest-point projection onto finitely generated cones by exhaustive
//! face search.
//!
//! For a cone spanned by `m` generators the projector enumerates every
//! linearly independent generator subset (a candidate face), solves the
//! unconstrained least-squares problem on that face, and accepts the first
//! face whose coefficients are nonnegative and whose residual lies in the
//! polar cone. Those two conditions are the full optimality system for the
//! nearest-point problem, so the accepted point is the exact projection up to
//! floating-point error. Faces are visited smallest-first (by size, then by
//! index order), so among faces describing the same projection the smallest
//! one is reported.
//!
//! The search is exponential in `m` and is therefore capped at
//! [`MAX_GENERATORS`]; per-face pseudo-inverses and the generator Gram matrix
//! are cached at construction so that repeated projections cost only a few
//! small matrix-vector products.

use crate::cones::ConeSpec;
use crate::error::{Error, Result};
use crate::numeric::{full_rank_pseudo_inverse, Matrix, ToleranceConfig, Vector};
use crate::operators::{AvnOperator, Construction, Property};
use crate::report::{CheckReport, Verdict, Witness};

/// Face enumeration visits 2^m subsets; beyond this the cost is unreasonable.
pub const MAX_GENERATORS: usize = 16;

/// Outcome of a single projection: the decomposition `y = projected +
/// residual` with `projected` in the cone, `residual` in its polar, and the
/// two orthogonal.
#[derive(Clone, Debug)]
pub struct ProjectionResult {
    /// Nearest point of the cone.
    pub projected: Vector,
    /// `y - projected`; lies in the polar cone.
    pub residual: Vector,
    /// `<projected, residual>`; zero in exact arithmetic.
    pub inner: f64,
    /// Indices of the active face's generators, ascending.
    pub active_face: Vec<usize>,
    /// Conic coefficients on the projector's normalized generators
    /// (length = generator count; zero off the active face).
    pub coefficients: Vec<f64>,
}

impl ProjectionResult {
    /// Euclidean distance from the input to the cone.
    pub fn distance(&self) -> f64 {
        self.residual.norm()
    }
}

#[derive(Clone, Debug)]
struct Face {
    indices: Vec<usize>,
    /// Pseudo-inverse of the selected (normalized) generator columns.
    pinv: Matrix,
}

/// Cached exact projector onto `cone(g_1, ..., g_m)`.
///
/// Generators are normalized at construction; the spanned cone, and hence the
/// projection, is unchanged by positive rescaling of any generator.
#[derive(Clone, Debug)]
pub struct Projector {
    generators: Matrix,
    gram: Matrix,
    faces: Vec<Face>,
}

impl Projector {
    /// Builds the face cache for the cone spanned by the columns of
    /// `generators`. Rank-deficient subsets are skipped: every projection is
    /// attained on some independent subset of its active generators.
    pub fn new(generators: &Matrix) -> Result<Self> {
        let m = generators.cols();
        if m > MAX_GENERATORS {
            return Err(Error::TooManyGenerators {
                got: m,
                max: MAX_GENERATORS,
            });
        }
        let mut cols = Vec::with_capacity(m);
        for j in 0..m {
            let c = generators.col(j);
            let norm = c.norm();
            if norm <= 1e-300 {
                return Err(Error::InvalidConstruction(format!(
                    "generator {j} is the zero vector"
                )));
            }
            cols.push(c.scale(1.0 / norm));
        }
        let generators = Matrix::from_columns(&cols)?;
        let gram = generators.transpose().matmul(&generators);

        // Subsets ordered by (size, bitmask): the acceptance loop then
        // automatically prefers the smallest face describing a projection.
        let mut masks: Vec<u32> = (1..(1u32 << m)).collect();
        masks.sort_by_key(|mask| (mask.count_ones(), *mask));

        let mut faces = Vec::new();
        for mask in masks {
            let indices: Vec<usize> = (0..m).filter(|j| mask & (1 << j) != 0).collect();
            let sub_cols: Vec<Vector> = indices.iter().map(|&j| generators.col(j)).collect();
            let sub = Matrix::from_columns(&sub_cols)?;
            if let Some(pinv) = full_rank_pseudo_inverse(&sub) {
                faces.push(Face { indices, pinv });
            }
        }
        Ok(Projector {
            generators,
            gram,
            faces,
        })
    }

    /// Builds a projector from any cone representation convertible to
    /// generator form.
    pub fn from_cone(k: &ConeSpec) -> Result<Self> {
        Projector::new(&k.generator_columns()?)
    }

    pub fn dim(&self) -> usize {
        self.generators.rows()
    }

    pub fn generator_count(&self) -> usize {
        self.generators.cols()
    }

    /// The normalized generator columns the projector actually uses.
    pub fn normalized_generators(&self) -> &Matrix {
        &self.generators
    }

    /// Exact nearest point of the cone.
    pub fn project(&self, y: &Vector) -> ProjectionResult {
        debug_assert_eq!(y.dim(), self.dim());
        let m = self.generator_count();
        let scale = 1.0 + y.norm();
        let coef_tol = 1e-10 * scale;
        let slack_tol = 1e-9 * scale;

        // <g_j, y> for every generator, shared by all face checks.
        let gy = self.generators.transpose_matvec(y);

        // The empty face: projection is the origin iff y lies in the polar.
        if (0..m).all(|j| gy[j] <= slack_tol) {
            return self.assemble(y, &[], &Vector::zeros(1));
        }

        let mut fallback: Option<ProjectionResult> = None;
        for face in &self.faces {
            let lambda = face.pinv.matvec(y);
            if lambda.iter().any(|&l| l < -coef_tol) {
                continue;
            }
            // Residual slack against generator j via the Gram cache:
            // <g_j, y - p> = gy_j - sum_i lambda_i * gram[f_i, j].
            let mut feasible = true;
            for j in 0..m {
                let mut gp = 0.0;
                for (i, &fi) in face.indices.iter().enumerate() {
                    gp += lambda[i] * self.gram.get(fi, j);
                }
                if gy[j] - gp > slack_tol {
                    feasible = false;
                    break;
                }
            }
            if feasible {
                return self.assemble(y, &face.indices, &lambda);
            }
            // Defensive: if rounding rejects every face, fall back to the
            // coefficient-feasible candidate nearest to y.
            let cand = self.assemble(y, &face.indices, &lambda);
            if fallback
                .as_ref()
                .map(|b| cand.residual.norm() < b.residual.norm())
                .unwrap_or(true)
            {
                fallback = Some(cand);
            }
        }
        fallback.expect("face search found no feasible candidate")
    }

    fn assemble(&self, y: &Vector, indices: &[usize], lambda: &Vector) -> ProjectionResult {
        let m = self.generator_count();
        let mut coefficients = vec![0.0; m];
        let mut projected = Vector::zeros(self.dim());
        for (i, &fi) in indices.iter().enumerate() {
            coefficients[fi] = lambda[i].max(0.0);
            projected = projected.axpy(coefficients[fi], &self.generators.col(fi));
        }
        let residual = y.sub(&projected);
        let inner = projected.dot(&residual);
        ProjectionResult {
            projected,
            residual,
            inner,
            active_face: indices.to_vec(),
            coefficients,
        }
    }
}

/// Projects `x` onto the cone. The optimality system itself is decided with
/// fixed scale-aware internal thresholds (tighter than any practical
/// user tolerance); `tol` is validated and threaded for parity with the other
/// cone operations.
pub fn project(k: &ConeSpec, x: &Vector, tol: &ToleranceConfig) -> Result<ProjectionResult> {
    tol.validate()?;
    if x.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: x.dim(),
        });
    }
    Ok(Projector::from_cone(k)?.project(x))
}

/// Checks the orthogonal decomposition induced by projecting `x` onto the
/// cone and onto its polar: the two pieces reconstruct `x`, they are
/// orthogonal, and the residual of each projection equals the other
/// projection.
///
/// `worst_margin` is the largest of the three defects after scale
/// normalization (reconstruction and residual mismatch by `1 + ‖x‖`, the
/// inner product by `1 + ‖x‖²`); the check passes when it stays within
/// `membership_tol`.
pub fn moreau_check(k: &ConeSpec, x: &Vector, tol: &ToleranceConfig) -> Result<CheckReport> {
    let onto_cone = project(k, x, tol)?;
    let onto_polar = project(&k.polar()?, x, tol)?;

    let p = &onto_cone.projected;
    let q = &onto_polar.projected;
    let norm_scale = 1.0 + x.norm();
    let inner_scale = 1.0 + x.norm_sq();

    let reconstruction = p.add(q).sub(x).norm() / norm_scale;
    let orthogonality = p.dot(q).abs() / inner_scale;
    let residual_swap = onto_cone
        .residual
        .sub(q)
        .norm()
        .max(onto_polar.residual.sub(p).norm())
        / norm_scale;

    let worst = reconstruction.max(orthogonality).max(residual_swap);
    let verdict = if worst <= tol.membership_tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let witnesses = if verdict == Verdict::Fail {
        vec![Witness::new("moreau-defect", &[x, p, q])]
    } else {
        Vec::new()
    };
    Ok(CheckReport::new(
        "moreau_decomposition",
        verdict,
        1,
        worst,
        witnesses,
        tol,
    ))
}

/// Packages the metric projection onto `k` as a cone retraction.
///
/// The projection is always a proper retraction (its residual lies in the
/// polar cone, which the projection kills), so properness is claimed; the
/// kernel is recorded as the polar cone. Subadditivity and isotonicity are
/// *not* claimed — they hold exactly when the cone is coisotone, which is a
/// question for the verification checks, not an assumption.
pub fn projection_avn(k: &ConeSpec, tol: &ToleranceConfig) -> Result<AvnOperator> {
    tol.validate()?;
    let projector = Projector::from_cone(k)?;
    AvnOperator::from_parts(
        Construction::Projection {
            projector,
            cone: k.clone(),
        },
        k.clone(),
        Some(k.polar()?),
        vec![Property::Proper],
        format!("projection({})", k.kind_name()),
    )
}
