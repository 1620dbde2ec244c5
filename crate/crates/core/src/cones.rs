//! Closed convex cones: representations, membership, duality, order, and the
//! structural predicates the operator constructions depend on.
//!
//! A cone is described by one of four matrix representations plus a formal
//! negation wrapper:
//!
//! * `Simplicial` — n linearly independent generator columns in R^n;
//! * `GeneratorsPolyhedral` — any finite set of generator columns;
//! * `HalfspacePolyhedral` — normal rows `c_j` with the cone
//!   `{y : <c_j, y> >= 0 for all j}`;
//! * `Ray` — a single direction;
//! * `Negated` — the pointwise negation of another cone, kept as structure so
//!   that results like polars display their origin. Negation can always be
//!   pushed into the leaf matrices; every numeric routine does so first.
//!
//! Membership is exposed as a signed margin: nonnegative (or zero, for
//! generator representations, where the margin is minus the distance to the
//! cone) inside, negative outside, compared against the scale-aware
//! threshold `membership_tol * (1 + ‖y‖)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{
    least_squares, matrix_rank, rcond, Matrix, SampleRng, ToleranceConfig, Vector,
    RCOND_THRESHOLD,
};
use crate::projection::{ProjectionResult, Projector};

/// A closed convex cone in R^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConeSpec {
    /// Full-dimensional pointed cone spanned by n independent columns.
    Simplicial { generators: Matrix },
    /// Cone spanned by arbitrarily many generator columns.
    GeneratorsPolyhedral { generators: Matrix },
    /// Intersection of the halfspaces `<row_j, y> >= 0`.
    HalfspacePolyhedral { normals: Matrix },
    /// Half-line `{t * direction : t >= 0}`.
    Ray { direction: Vector },
    /// `{-y : y in inner}`.
    Negated(Box<ConeSpec>),
}

impl ConeSpec {
    pub fn simplicial(generators: Matrix) -> Result<Self> {
        if generators.rows() != generators.cols() {
            return Err(Error::DimensionMismatch {
                expected: generators.rows(),
                got: generators.cols(),
            });
        }
        let rc = rcond(&generators);
        if rc <= RCOND_THRESHOLD {
            return Err(Error::SingularMatrix {
                rcond: rc,
                threshold: RCOND_THRESHOLD,
            });
        }
        Ok(ConeSpec::Simplicial { generators })
    }

    pub fn generators(generators: Matrix) -> Result<Self> {
        for j in 0..generators.cols() {
            if generators.col(j).norm() <= 1e-300 {
                return Err(Error::InvalidConstruction(format!(
                    "generator column {j} is zero"
                )));
            }
        }
        Ok(ConeSpec::GeneratorsPolyhedral { generators })
    }

    pub fn halfspaces(normals: Matrix) -> Result<Self> {
        for i in 0..normals.rows() {
            if normals.row(i).norm() <= 1e-300 {
                return Err(Error::InvalidConstruction(format!(
                    "normal row {i} is zero"
                )));
            }
        }
        Ok(ConeSpec::HalfspacePolyhedral { normals })
    }

    pub fn ray(direction: Vector) -> Result<Self> {
        if direction.norm() <= 1e-300 {
            return Err(Error::InvalidConstruction(
                "ray direction must be nonzero".into(),
            ));
        }
        Ok(ConeSpec::Ray { direction })
    }

    pub fn negated(inner: ConeSpec) -> Self {
        ConeSpec::Negated(Box::new(inner))
    }

    /// The nonnegative orthant of R^n.
    pub fn orthant(n: usize) -> Self {
        ConeSpec::Simplicial {
            generators: Matrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConeSpec::Simplicial { generators } => generators.rows(),
            ConeSpec::GeneratorsPolyhedral { generators } => generators.rows(),
            ConeSpec::HalfspacePolyhedral { normals } => normals.cols(),
            ConeSpec::Ray { direction } => direction.dim(),
            ConeSpec::Negated(inner) => inner.dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConeSpec::Simplicial { .. } => "simplicial",
            ConeSpec::GeneratorsPolyhedral { .. } => "generators",
            ConeSpec::HalfspacePolyhedral { .. } => "halfspaces",
            ConeSpec::Ray { .. } => "ray",
            ConeSpec::Negated(_) => "negated",
        }
    }

    /// Walks the `Negated` chain: returns the underlying leaf and whether an
    /// odd number of negations applies.
    fn unwrap_negations(&self) -> (&ConeSpec, bool) {
        let mut cur = self;
        let mut negate = false;
        while let ConeSpec::Negated(inner) = cur {
            negate = !negate;
            cur = inner;
        }
        (cur, negate)
    }

    /// Pushes all negations into the leaf matrices, leaving one of the four
    /// matrix kinds.
    pub fn normalize_negation(&self) -> ConeSpec {
        let (leaf, negate) = self.unwrap_negations();
        if !negate {
            return leaf.clone();
        }
        match leaf {
            ConeSpec::Simplicial { generators } => ConeSpec::Simplicial {
                generators: generators.scale(-1.0),
            },
            ConeSpec::GeneratorsPolyhedral { generators } => ConeSpec::GeneratorsPolyhedral {
                generators: generators.scale(-1.0),
            },
            ConeSpec::HalfspacePolyhedral { normals } => ConeSpec::HalfspacePolyhedral {
                normals: normals.scale(-1.0),
            },
            ConeSpec::Ray { direction } => ConeSpec::Ray {
                direction: direction.neg(),
            },
            ConeSpec::Negated(_) => unreachable!("unwrap_negations returns a leaf"),
        }
    }

    /// Signed membership margin; see [`Membership::margin`]. Builds the
    /// membership engine afresh — use [`Membership`] directly inside loops.
    pub fn membership_margin(&self, y: &Vector) -> Result<f64> {
        Ok(Membership::new(self)?.margin(y))
    }

    pub fn contains(&self, y: &Vector, tol: &ToleranceConfig) -> Result<bool> {
        Ok(Membership::new(self)?.contains(y, tol))
    }

    /// The cone order: `x <= y` iff `y - x` lies in the cone.
    pub fn order_leq(&self, x: &Vector, y: &Vector, tol: &ToleranceConfig) -> Result<bool> {
        self.contains(&y.sub(x), tol)
    }

    /// The dual cone `{y : <y, x> >= 0 for all x in K}`.
    pub fn dual(&self) -> Result<ConeSpec> {
        match self {
            // Columns of the inverse-transpose are the dual generators:
            // <a_i*, a_j> = delta_ij.
            ConeSpec::Simplicial { generators } => Ok(ConeSpec::Simplicial {
                generators: crate::numeric::invert(generators)?.transpose(),
            }),
            // `<y, g_i> >= 0 for every generator` is exactly duality.
            ConeSpec::GeneratorsPolyhedral { generators } => Ok(ConeSpec::HalfspacePolyhedral {
                normals: generators.transpose(),
            }),
            // Farkas: the dual of an intersection of homogeneous halfspaces
            // is the cone spanned by their normals.
            ConeSpec::HalfspacePolyhedral { normals } => Ok(ConeSpec::GeneratorsPolyhedral {
                generators: normals.transpose(),
            }),
            ConeSpec::Ray { direction } => Ok(ConeSpec::HalfspacePolyhedral {
                normals: Matrix::from_rows(std::slice::from_ref(direction))?,
            }),
            ConeSpec::Negated(inner) => Ok(ConeSpec::negated(inner.dual()?)),
        }
    }

    /// The polar cone `{y : <y, x> <= 0 for all x in K}`, i.e. the negated
    /// dual.
    pub fn polar(&self) -> Result<ConeSpec> {
        Ok(ConeSpec::negated(self.dual()?))
    }

    /// Whether the cone contains no line.
    pub fn is_pointed(&self, tol: &ToleranceConfig) -> bool {
        let (leaf, _) = self.unwrap_negations();
        match leaf {
            ConeSpec::Simplicial { .. } | ConeSpec::Ray { .. } => true,
            // Ny >= 0 and N(-y) >= 0 force Ny = 0, which forces y = 0
            // exactly when the normals span.
            ConeSpec::HalfspacePolyhedral { normals } => {
                matrix_rank(normals, tol.membership_tol) == normals.cols()
            }
            // Pointed iff the dual has interior, i.e. some direction makes a
            // strictly positive angle with every generator.
            ConeSpec::GeneratorsPolyhedral { generators } => {
                halfspace_interior(&generators.transpose()).is_ok()
            }
            ConeSpec::Negated(_) => unreachable!(),
        }
    }

    pub fn is_full_dimensional(&self) -> bool {
        let (leaf, _) = self.unwrap_negations();
        match leaf {
            ConeSpec::Simplicial { .. } => true,
            ConeSpec::GeneratorsPolyhedral { generators } => {
                matrix_rank(generators, 1e-10) == generators.rows()
            }
            ConeSpec::HalfspacePolyhedral { normals } => halfspace_interior(normals).is_ok(),
            ConeSpec::Ray { direction } => direction.dim() == 1,
            ConeSpec::Negated(_) => unreachable!(),
        }
    }

    /// A unit vector in the interior of the cone, or `NotFullDimensional`.
    pub fn interior_point(&self) -> Result<Vector> {
        let (leaf, negate) = self.unwrap_negations();
        let point = match leaf {
            // The sum of the normalized generators meets every supporting
            // hyperplane strictly, and a simplicial cone is full-dimensional.
            ConeSpec::Simplicial { generators } => sum_of_normalized_columns(generators),
            ConeSpec::GeneratorsPolyhedral { generators } => {
                if matrix_rank(generators, 1e-10) != generators.rows() {
                    return Err(Error::NotFullDimensional);
                }
                sum_of_normalized_columns(generators)
            }
            ConeSpec::HalfspacePolyhedral { normals } => halfspace_interior(normals)?,
            // The Ray kind marks a one-dimensional cone; it is rejected
            // uniformly rather than special-casing ambient dimension one.
            ConeSpec::Ray { .. } => return Err(Error::NotFullDimensional),
            ConeSpec::Negated(_) => unreachable!(),
        };
        let point = point.normalized();
        Ok(if negate { point.neg() } else { point })
    }

    /// Generator-column representation, if one is available (2-D halfspace
    /// cones are converted; higher-dimensional ones are not supported).
    pub fn generator_columns(&self) -> Result<Matrix> {
        let spec = self.normalize_negation();
        match spec {
            ConeSpec::Simplicial { generators }
            | ConeSpec::GeneratorsPolyhedral { generators } => Ok(generators),
            ConeSpec::Ray { direction } => Matrix::from_columns(&[direction]),
            ConeSpec::HalfspacePolyhedral { normals } => match normals.cols() {
                1 => line_halfspaces_to_generators(&normals),
                2 => sector_halfspaces_to_generators(&normals),
                // Exactly n independent inequalities cut out a simplicial
                // cone: y = N^{-1}z with z = Ny >= 0, so the generators are
                // the columns of the inverse.
                n if normals.rows() == n && rcond(&normals) > RCOND_THRESHOLD => {
                    crate::numeric::invert(&normals)
                }
                n => Err(Error::UnsupportedRepresentation(format!(
                    "halfspace-to-generator conversion needs dimension <= 2 or a square \
                     independent system, got {} rows in dimension {n}",
                    normals.rows()
                ))),
            },
            ConeSpec::Negated(_) => unreachable!("normalize_negation returns a leaf"),
        }
    }

    /// Halfspace-row representation, if one is available (generator cones are
    /// converted only in dimension <= 2).
    pub fn halfspace_rows(&self) -> Result<Matrix> {
        let spec = self.normalize_negation();
        match spec {
            ConeSpec::HalfspacePolyhedral { normals } => Ok(normals),
            // y in K iff the simplicial coordinates A^{-1} y are nonnegative.
            ConeSpec::Simplicial { generators } => crate::numeric::invert(&generators),
            ConeSpec::Ray { direction } => ray_halfspaces(&direction),
            ConeSpec::GeneratorsPolyhedral { generators } => match generators.rows() {
                1 => line_generators_to_halfspaces(&generators),
                2 => sector_generators_to_halfspaces(&generators),
                n => Err(Error::UnsupportedRepresentation(format!(
                    "generator-to-halfspace conversion is only available in dimension <= 2, got {n}"
                ))),
            },
            ConeSpec::Negated(_) => unreachable!("normalize_negation returns a leaf"),
        }
    }

    /// Nearest point of the cone; builds a fresh projector per call, so use
    /// [`Projector`] directly when projecting many points.
    pub fn project(&self, y: &Vector) -> Result<ProjectionResult> {
        Ok(Projector::new(&self.generator_columns()?)?.project(y))
    }

    /// Whether the simplicial generators pairwise meet at right or obtuse
    /// angles (checked on the normalized Gram matrix).
    pub fn is_coisotone(&self, tol: &ToleranceConfig) -> Result<bool> {
        let gram = self.normalized_simplicial_gram("obtuse-generator test")?;
        let n = gram.rows();
        for i in 0..n {
            for j in 0..n {
                if i != j && gram.get(i, j) > tol.membership_tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Whether the simplicial generators are pairwise orthogonal, which is
    /// exactly self-duality for simplicial cones.
    pub fn is_selfdual_simplicial(&self, tol: &ToleranceConfig) -> Result<bool> {
        let gram = self.normalized_simplicial_gram("orthogonal-generator test")?;
        let n = gram.rows();
        for i in 0..n {
            for j in 0..n {
                if i != j && gram.get(i, j).abs() > tol.membership_tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn normalized_simplicial_gram(&self, what: &str) -> Result<Matrix> {
        let (leaf, _) = self.unwrap_negations();
        let ConeSpec::Simplicial { generators } = leaf else {
            return Err(Error::UnsupportedRepresentation(format!(
                "{what} needs a simplicial cone, got {}",
                leaf.kind_name()
            )));
        };
        let cols: Vec<Vector> = generators.column_iter().map(|c| c.normalized()).collect();
        let a = Matrix::from_columns(&cols)?;
        Ok(a.transpose().matmul(&a))
    }

    /// Structural equality up to negation pushdown, entrywise tolerance, and
    /// positive scaling of ray directions. Representations with reordered or
    /// rescaled generators are *not* identified.
    pub fn approx_same(&self, other: &ConeSpec, eps: f64) -> bool {
        let a = self.normalize_negation();
        let b = other.normalize_negation();
        match (&a, &b) {
            (
                ConeSpec::Simplicial { generators: ga },
                ConeSpec::Simplicial { generators: gb },
            )
            | (
                ConeSpec::GeneratorsPolyhedral { generators: ga },
                ConeSpec::GeneratorsPolyhedral { generators: gb },
            ) => matrices_close(ga, gb, eps),
            (
                ConeSpec::HalfspacePolyhedral { normals: na },
                ConeSpec::HalfspacePolyhedral { normals: nb },
            ) => matrices_close(na, nb, eps),
            (ConeSpec::Ray { direction: da }, ConeSpec::Ray { direction: db }) => {
                da.dim() == db.dim()
                    && da.normalized().sub(&db.normalized()).max_abs() <= eps
            }
            _ => false,
        }
    }
}

fn matrices_close(a: &Matrix, b: &Matrix, eps: f64) -> bool {
    a.rows() == b.rows()
        && a.cols() == b.cols()
        && (0..a.rows())
            .all(|i| (0..a.cols()).all(|j| (a.get(i, j) - b.get(i, j)).abs() <= eps))
}

fn sum_of_normalized_columns(m: &Matrix) -> Vector {
    let mut s = Vector::zeros(m.rows());
    for c in m.column_iter() {
        s = s.add(&c.normalized());
    }
    s
}

/// A unit interior point of `{y : Ny >= 0}` found by a least-squares start
/// plus projected subgradient ascent on the worst normalized margin. Fails
/// with `NotFullDimensional` when no direction achieves a positive margin.
fn halfspace_interior(normals: &Matrix) -> Result<Vector> {
    let n = normals.cols();
    let rows: Vec<Vector> = (0..normals.rows())
        .map(|i| normals.row(i).normalized())
        .collect();
    let unit_rows = Matrix::from_rows(&rows)?;
    let margin = |u: &Vector| -> f64 {
        unit_rows
            .matvec(u)
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    };

    let ones = Vector::new(vec![1.0; rows.len()])?;
    let mut u = least_squares(&unit_rows, &ones).unwrap_or_else(|_| Vector::zeros(n));
    if u.norm() < 1e-9 {
        u = sum_of_normalized_columns(&unit_rows.transpose());
    }
    if u.norm() < 1e-9 {
        u = Vector::unit(n, 0);
    }
    u = u.normalized();

    let mut best = u.clone();
    let mut best_margin = margin(&u);
    for t in 0..400 {
        if best_margin >= 0.05 {
            break;
        }
        let margins = unit_rows.matvec(&u);
        let worst = margins.iter().cloned().fold(f64::INFINITY, f64::min);
        // Subgradient of the min: average the normals within a whisker of
        // the worst margin.
        let mut dir = Vector::zeros(n);
        let mut count = 0.0;
        for (i, &mi) in margins.iter().enumerate() {
            if mi <= worst + 1e-3 * (1.0 + worst.abs()) {
                dir = dir.add(&rows[i]);
                count += 1.0;
            }
        }
        if count == 0.0 {
            break;
        }
        dir = dir.scale(1.0 / count);
        let step = 0.5 / ((t + 1) as f64).sqrt();
        let next = u.axpy(step, &dir);
        if next.norm() < 1e-12 {
            break;
        }
        u = next.normalized();
        let m = margin(&u);
        if m > best_margin {
            best_margin = m;
            best = u.clone();
        }
    }
    if best_margin > 1e-7 {
        Ok(best)
    } else {
        Err(Error::NotFullDimensional)
    }
}

/// Halfspace rows describing a ray in R^n: the direction itself plus paired
/// opposite rows pinning the orthogonal complement to zero.
fn ray_halfspaces(direction: &Vector) -> Result<Matrix> {
    let n = direction.dim();
    let basis = crate::numeric::orthonormal_basis_with_first(direction)?;
    let mut rows = vec![basis.col(0)];
    for j in 1..n {
        rows.push(basis.col(j));
        rows.push(basis.col(j).neg());
    }
    Matrix::from_rows(&rows)
}

fn rot90(v: &Vector) -> Vector {
    Vector::from_slice(&[-v[1], v[0]])
}

/// Signed angle of `g` measured from `u` (both unit, 2-D).
fn signed_angle_from(u: &Vector, g: &Vector) -> f64 {
    rot90(u).dot(g).atan2(u.dot(g))
}

fn line_halfspaces_to_generators(normals: &Matrix) -> Result<Matrix> {
    let signs: Vec<f64> = (0..normals.rows()).map(|i| normals.get(i, 0)).collect();
    if signs.iter().all(|&s| s > 0.0) {
        Matrix::from_columns(&[Vector::from_slice(&[1.0])])
    } else if signs.iter().all(|&s| s < 0.0) {
        Matrix::from_columns(&[Vector::from_slice(&[-1.0])])
    } else {
        Err(Error::UnsupportedRepresentation(
            "halfspace cone in dimension 1 degenerates to the origin".into(),
        ))
    }
}

fn line_generators_to_halfspaces(generators: &Matrix) -> Result<Matrix> {
    let signs: Vec<f64> = (0..generators.cols()).map(|j| generators.get(0, j)).collect();
    if signs.iter().all(|&s| s > 0.0) {
        Matrix::from_rows(&[Vector::from_slice(&[1.0])])
    } else if signs.iter().all(|&s| s < 0.0) {
        Matrix::from_rows(&[Vector::from_slice(&[-1.0])])
    } else {
        Err(Error::UnsupportedRepresentation(
            "generators span the whole line; no halfspace representation".into(),
        ))
    }
}

/// 2-D halfspace-to-generator conversion by angular search: every extreme
/// ray of a pointed planar sector lies on some constraint boundary, so the
/// candidates are the rotated normals.
fn sector_halfspaces_to_generators(normals: &Matrix) -> Result<Matrix> {
    let rows: Vec<Vector> = (0..normals.rows())
        .map(|i| normals.row(i).normalized())
        .collect();
    let feasible = |d: &Vector| rows.iter().all(|r| r.dot(d) >= -1e-9);
    let mut candidates = Vec::new();
    for r in &rows {
        for cand in [rot90(r), rot90(r).neg()] {
            if feasible(&cand) {
                candidates.push(cand);
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::UnsupportedRepresentation(
            "halfspace cone degenerates to the origin".into(),
        ));
    }
    let mut center = Vector::zeros(2);
    for c in &candidates {
        center = center.add(c);
    }
    if center.norm() < 1e-9 {
        return Err(Error::UnsupportedRepresentation(
            "halfspace cone is not pointed".into(),
        ));
    }
    let center = center.normalized();
    let angles: Vec<f64> = candidates
        .iter()
        .map(|c| signed_angle_from(&center, c))
        .collect();
    let (imin, imax) = extreme_indices(&angles);
    if angles[imax] - angles[imin] >= std::f64::consts::PI - 1e-9 {
        return Err(Error::UnsupportedRepresentation(
            "halfspace cone is not pointed".into(),
        ));
    }
    if angles[imax] - angles[imin] < 1e-10 {
        return Matrix::from_columns(&[candidates[imin].clone()]);
    }
    Matrix::from_columns(&[candidates[imin].clone(), candidates[imax].clone()])
}

/// 2-D generator-to-halfspace conversion: a pointed planar cone is the
/// sector between its two angularly extreme generators.
fn sector_generators_to_halfspaces(generators: &Matrix) -> Result<Matrix> {
    let gens: Vec<Vector> = generators.column_iter().map(|c| c.normalized()).collect();
    let mut center = Vector::zeros(2);
    for g in &gens {
        center = center.add(g);
    }
    if center.norm() < 1e-9 {
        return Err(Error::UnsupportedRepresentation(
            "generator cone is not pointed".into(),
        ));
    }
    let center = center.normalized();
    let angles: Vec<f64> = gens.iter().map(|g| signed_angle_from(&center, g)).collect();
    let (imin, imax) = extreme_indices(&angles);
    let width = angles[imax] - angles[imin];
    if width >= std::f64::consts::PI - 1e-9 {
        return Err(Error::UnsupportedRepresentation(
            "generator cone is not pointed".into(),
        ));
    }
    if width < 1e-10 {
        return ray_halfspaces(&gens[imin]);
    }
    let gmin = &gens[imin];
    let gmax = &gens[imax];
    let mut n1 = rot90(gmin);
    if n1.dot(gmax) < 0.0 {
        n1 = n1.neg();
    }
    let mut n2 = rot90(gmax);
    if n2.dot(gmin) < 0.0 {
        n2 = n2.neg();
    }
    Matrix::from_rows(&[n1, n2])
}

fn extreme_indices(values: &[f64]) -> (usize, usize) {
    let mut imin = 0;
    let mut imax = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[imin] {
            imin = i;
        }
        if *v > values[imax] {
            imax = i;
        }
    }
    (imin, imax)
}

#[derive(Clone, Debug)]
enum MembershipEngine {
    Simplicial { inverse: Matrix },
    Generators { projector: Projector },
    Halfspace { normals: Matrix },
    Ray { unit: Vector },
}

/// Cached membership oracle for one cone. Construction pays any one-time
/// costs (matrix inverse, projector face cache); `margin` is then cheap.
#[derive(Clone, Debug)]
pub struct Membership {
    engine: MembershipEngine,
    negate: bool,
    dim: usize,
}

impl Membership {
    pub fn new(spec: &ConeSpec) -> Result<Self> {
        let (leaf, negate) = spec.unwrap_negations();
        let engine = match leaf {
            ConeSpec::Simplicial { generators } => MembershipEngine::Simplicial {
                inverse: crate::numeric::invert(generators)?,
            },
            ConeSpec::GeneratorsPolyhedral { generators } => MembershipEngine::Generators {
                projector: Projector::new(generators)?,
            },
            ConeSpec::HalfspacePolyhedral { normals } => MembershipEngine::Halfspace {
                normals: normals.clone(),
            },
            ConeSpec::Ray { direction } => MembershipEngine::Ray {
                unit: direction.normalized(),
            },
            ConeSpec::Negated(_) => unreachable!(),
        };
        Ok(Membership {
            engine,
            negate,
            dim: spec.dim(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Signed membership margin, negative outside the cone:
    ///
    /// * simplicial — smallest coordinate in the generator basis;
    /// * halfspaces — smallest inner product with the normal rows as given;
    /// * ray — the coordinate along the ray or minus the orthogonal defect,
    ///   whichever certificate is worse;
    /// * generators — minus the Euclidean distance to the cone (never
    ///   positive: interior points also report 0).
    pub fn margin(&self, y: &Vector) -> f64 {
        let z = if self.negate { y.neg() } else { y.clone() };
        match &self.engine {
            MembershipEngine::Simplicial { inverse } => inverse
                .matvec(&z)
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min),
            MembershipEngine::Generators { projector } => -projector.project(&z).distance(),
            MembershipEngine::Halfspace { normals } => normals
                .matvec(&z)
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min),
            MembershipEngine::Ray { unit } => {
                let t = unit.dot(&z);
                let perp = z.axpy(-t, unit).norm();
                t.min(-perp)
            }
        }
    }

    pub fn contains(&self, y: &Vector, tol: &ToleranceConfig) -> bool {
        self.margin(y) >= -tol.membership_margin_tol(y.norm())
    }
}

#[derive(Clone, Debug)]
enum SamplerEngine {
    /// Nonnegative combinations of normalized generator columns.
    Conic { generators: Vec<Vector> },
    /// Positive multiples of a ball around an interior point.
    Interior { point: Vector, radius: f64 },
    Ray { unit: Vector },
}

/// Deterministic generator of cone members, built once per cone.
///
/// Generator and ray representations are covered exactly; halfspace cones
/// are sampled from scaled balls around a computed interior point, which
/// covers a full-dimensional subregion of the cone.
#[derive(Clone, Debug)]
pub struct ConeSampler {
    engine: SamplerEngine,
    negate: bool,
}

impl ConeSampler {
    pub fn new(spec: &ConeSpec) -> Result<Self> {
        let (leaf, negate) = spec.unwrap_negations();
        let engine = match leaf {
            ConeSpec::Simplicial { generators }
            | ConeSpec::GeneratorsPolyhedral { generators } => SamplerEngine::Conic {
                generators: generators.column_iter().map(|c| c.normalized()).collect(),
            },
            ConeSpec::HalfspacePolyhedral { normals } => {
                let point = halfspace_interior(normals)?;
                let rows: Vec<Vector> = (0..normals.rows())
                    .map(|i| normals.row(i).normalized())
                    .collect();
                let margin = rows
                    .iter()
                    .map(|r| r.dot(&point))
                    .fold(f64::INFINITY, f64::min);
                SamplerEngine::Interior {
                    point,
                    radius: 0.9 * margin,
                }
            }
            ConeSpec::Ray { direction } => SamplerEngine::Ray {
                unit: direction.normalized(),
            },
            ConeSpec::Negated(_) => unreachable!(),
        };
        Ok(ConeSampler { engine, negate })
    }

    pub fn sample(&self, rng: &mut SampleRng) -> Vector {
        let v = match &self.engine {
            SamplerEngine::Conic { generators } => {
                let mut s = Vector::zeros(generators[0].dim());
                for g in generators {
                    s = s.axpy(rng.half_normal(), g);
                }
                s
            }
            SamplerEngine::Interior { point, radius } => {
                let jitter = rng.unit_ball(point.dim()).scale(*radius);
                point.add(&jitter).scale(2.0 * rng.half_normal())
            }
            SamplerEngine::Ray { unit } => unit.scale(2.0 * rng.half_normal()),
        };
        if self.negate {
            v.neg()
        } else {
            v
        }
    }
}

/// Random simplicial cone with unit Gaussian generator directions,
/// resampled until comfortably well-conditioned.
pub fn random_simplicial_cone(n: usize, rng: &mut SampleRng) -> ConeSpec {
    loop {
        let cols: Vec<Vector> = (0..n).map(|_| rng.unit_sphere(n)).collect();
        let m = Matrix::from_columns(&cols).expect("square generator matrix");
        if rcond(&m) > 1e-3 {
            return ConeSpec::Simplicial { generators: m };
        }
    }
}

/// Random rotation of the nonnegative orthant (orthonormal generators).
pub fn random_rotated_orthant(n: usize, rng: &mut SampleRng) -> ConeSpec {
    let mut basis: Vec<Vector> = Vec::with_capacity(n);
    while basis.len() < n {
        let mut v = rng.gaussian_vector(n);
        for b in &basis {
            v = v.axpy(-v.dot(b), b);
        }
        if v.norm() > 1e-6 {
            basis.push(v.normalized());
        }
    }
    ConeSpec::Simplicial {
        generators: Matrix::from_columns(&basis).expect("orthonormal basis"),
    }
}

/// Random simplicial cone whose unit generators pairwise meet at strictly
/// obtuse angles (for n >= 2), built from a diagonally dominant Gram matrix
/// and a random rotation.
pub fn random_obtuse_cone(n: usize, rng: &mut SampleRng) -> ConeSpec {
    if n == 1 {
        return ConeSpec::orthant(1);
    }
    // Off-diagonal entries in [-s, -0.2 s] with row sums below 1 keep the
    // Gram matrix positive definite and the angles strictly obtuse.
    let s = 0.8 / (n as f64 - 1.0);
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        data[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let w = -s * (0.2 + 0.8 * rng.uniform());
            data[i * n + j] = w;
            data[j * n + i] = w;
        }
    }
    let gram = Matrix::new(n, n, data).expect("gram matrix");
    let chol = crate::numeric::to_na_matrix(&gram)
        .cholesky()
        .expect("diagonally dominant matrix is positive definite");
    let l = crate::numeric::from_na_matrix(&chol.l());
    // Gram of A = L^T is L L^T = G; a random rotation hides the triangular
    // structure without touching the Gram matrix.
    let a = l.transpose();
    let ConeSpec::Simplicial { generators: q } = random_rotated_orthant(n, rng) else {
        unreachable!()
    };
    ConeSpec::Simplicial {
        generators: q.matmul(&a),
    }
}

/// Random pointed full-dimensional halfspace cone: `n + extra` unit normals
/// clustered around a random axis (so the axis itself is interior),
/// resampled until the normals span.
pub fn random_halfspace_cone(n: usize, extra: usize, rng: &mut SampleRng) -> ConeSpec {
    let axis = rng.unit_sphere(n);
    loop {
        let rows: Vec<Vector> = (0..n + extra)
            .map(|_| axis.axpy(0.9, &rng.unit_sphere(n)).normalized())
            .collect();
        let m = Matrix::from_rows(&rows).expect("normals");
        if matrix_rank(&m, 1e-8) == n {
            return ConeSpec::HalfspacePolyhedral { normals: m };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn wedge() -> ConeSpec {
        ConeSpec::simplicial(
            Matrix::from_columns(&[
                Vector::from_slice(&[1.0, 0.0]),
                Vector::from_slice(&[1.0, 1.0]),
            ])
            .unwrap(),
        )
        .unwrap()
    }

    /// Generators (-1, ±1, ±1); equivalently the rows (-1, ±1, 0), (-1, 0, ±1).
    fn cube_cone_generators() -> ConeSpec {
        ConeSpec::generators(
            Matrix::from_columns(&[
                Vector::from_slice(&[-1.0, 1.0, 1.0]),
                Vector::from_slice(&[-1.0, 1.0, -1.0]),
                Vector::from_slice(&[-1.0, -1.0, 1.0]),
                Vector::from_slice(&[-1.0, -1.0, -1.0]),
            ])
            .unwrap(),
        )
        .unwrap()
    }

    fn cube_cone_halfspaces() -> ConeSpec {
        ConeSpec::halfspaces(
            Matrix::from_rows(&[
                Vector::from_slice(&[-1.0, 1.0, 0.0]),
                Vector::from_slice(&[-1.0, -1.0, 0.0]),
                Vector::from_slice(&[-1.0, 0.0, 1.0]),
                Vector::from_slice(&[-1.0, 0.0, -1.0]),
            ])
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn orthant_margins_are_smallest_coordinates() {
        let k = ConeSpec::orthant(2);
        assert!((k.membership_margin(&Vector::from_slice(&[2.0, 3.0])).unwrap() - 2.0).abs() < 1e-12);
        assert!((k.membership_margin(&Vector::from_slice(&[-1.0, 3.0])).unwrap() + 1.0).abs() < 1e-12);
        assert!(k.contains(&Vector::from_slice(&[2.0, 3.0]), &tol()).unwrap());
        assert!(!k.contains(&Vector::from_slice(&[-1.0, 3.0]), &tol()).unwrap());
    }

    #[test]
    fn simplicial_and_halfspace_membership_agree() {
        let k = wedge();
        let h = ConeSpec::halfspaces(k.halfspace_rows().unwrap()).unwrap();
        let mut rng = SampleRng::new(3);
        let mk = Membership::new(&k).unwrap();
        let mh = Membership::new(&h).unwrap();
        for _ in 0..300 {
            let y = rng.gaussian_vector(2).scale(2.0);
            assert_eq!(mk.contains(&y, &tol()), mh.contains(&y, &tol()), "at {y:?}");
        }
    }

    // Dual generators of cone{(1,0),(1,1)} by hand: the inverse-transpose
    // columns (1,-1) and (0,1).
    #[test]
    fn simplicial_dual_is_inverse_transpose() {
        let d = wedge().dual().unwrap();
        let expected = ConeSpec::simplicial(
            Matrix::from_columns(&[
                Vector::from_slice(&[1.0, -1.0]),
                Vector::from_slice(&[0.0, 1.0]),
            ])
            .unwrap(),
        )
        .unwrap();
        assert!(d.approx_same(&expected, 1e-12));
        assert!(wedge().dual().unwrap().dual().unwrap().approx_same(&wedge(), 1e-12));
    }

    #[test]
    fn halfspace_dual_is_spanned_by_normals() {
        let h = ConeSpec::halfspaces(Matrix::identity(2)).unwrap();
        let d = h.dual().unwrap();
        assert_eq!(d.kind_name(), "generators");
        // The dual of the orthant (as halfspaces) is the orthant again.
        let mut rng = SampleRng::new(8);
        let md = Membership::new(&d).unwrap();
        let mo = Membership::new(&ConeSpec::orthant(2)).unwrap();
        for _ in 0..200 {
            let y = rng.gaussian_vector(2).scale(2.0);
            assert_eq!(md.contains(&y, &tol()), mo.contains(&y, &tol()));
        }
    }

    #[test]
    fn ray_margins_certify_both_directions() {
        let r = ConeSpec::ray(Vector::from_slice(&[0.0, 2.0])).unwrap();
        // On the ray the orthogonal defect vanishes, so the margin is 0.
        assert!(r.membership_margin(&Vector::from_slice(&[0.0, 3.0])).unwrap().abs() < 1e-12);
        assert!((r.membership_margin(&Vector::from_slice(&[1.0, 1.0])).unwrap() + 1.0).abs() < 1e-12);
        assert!(r.membership_margin(&Vector::from_slice(&[0.0, -2.0])).unwrap() < 0.0);
        let d = r.dual().unwrap();
        assert!(d.contains(&Vector::from_slice(&[5.0, 1.0]), &tol()).unwrap());
        assert!(!d.contains(&Vector::from_slice(&[5.0, -1.0]), &tol()).unwrap());
    }

    #[test]
    fn polar_negates_the_dual() {
        let p = ConeSpec::orthant(2).polar().unwrap();
        assert!(p.contains(&Vector::from_slice(&[-1.0, -2.0]), &tol()).unwrap());
        assert!(!p.contains(&Vector::from_slice(&[1.0, -2.0]), &tol()).unwrap());
    }

    #[test]
    fn negation_pushes_into_leaves() {
        let k = ConeSpec::negated(ConeSpec::negated(ConeSpec::orthant(2)));
        assert!(k.normalize_negation().approx_same(&ConeSpec::orthant(2), 0.0));
        let r = ConeSpec::negated(ConeSpec::ray(Vector::from_slice(&[0.0, 1.0])).unwrap());
        assert!(r
            .normalize_negation()
            .approx_same(&ConeSpec::ray(Vector::from_slice(&[0.0, -1.0])).unwrap(), 0.0));
        assert!(r.contains(&Vector::from_slice(&[0.0, -4.0]), &tol()).unwrap());
    }

    #[test]
    fn pointedness_and_dimension_predicates() {
        assert!(ConeSpec::orthant(3).is_pointed(&tol()));
        assert!(ConeSpec::orthant(3).is_full_dimensional());

        let halfplane =
            ConeSpec::halfspaces(Matrix::from_rows(&[Vector::from_slice(&[1.0, 0.0])]).unwrap())
                .unwrap();
        assert!(halfplane.is_full_dimensional());
        assert!(!halfplane.is_pointed(&tol()));

        let with_line = ConeSpec::generators(
            Matrix::from_columns(&[
                Vector::from_slice(&[1.0, 0.0]),
                Vector::from_slice(&[-1.0, 0.0]),
                Vector::from_slice(&[0.0, 1.0]),
            ])
            .unwrap(),
        )
        .unwrap();
        assert!(!with_line.is_pointed(&tol()));
        assert!(with_line.is_full_dimensional());

        let flat = ConeSpec::generators(
            Matrix::from_columns(&[
                Vector::from_slice(&[1.0, 0.0, 0.0]),
                Vector::from_slice(&[1.0, 1.0, 0.0]),
            ])
            .unwrap(),
        )
        .unwrap();
        assert!(flat.is_pointed(&tol()));
        assert!(!flat.is_full_dimensional());

        let ray = ConeSpec::ray(Vector::from_slice(&[1.0, 1.0])).unwrap();
        assert!(ray.is_pointed(&tol()));
        assert!(!ray.is_full_dimensional());
    }

    #[test]
    fn interior_points_have_positive_margins() {
        for k in [
            ConeSpec::orthant(3),
            wedge(),
            cube_cone_generators(),
            cube_cone_halfspaces(),
            ConeSpec::negated(cube_cone_halfspaces()),
        ] {
            let u = k.interior_point().unwrap();
            assert!((u.norm() - 1.0).abs() < 1e-12);
            let m = k.membership_margin(&u).unwrap();
            // Generator representations report distance-based margins, which
            // are 0 on the cone; others must be strictly positive.
            match k.normalize_negation() {
                ConeSpec::GeneratorsPolyhedral { .. } => assert!(m >= -1e-9),
                _ => assert!(m > 1e-6, "margin {m}"),
            }
        }
        assert!(matches!(
            ConeSpec::ray(Vector::from_slice(&[1.0, 0.0]))
                .unwrap()
                .interior_point(),
            Err(Error::NotFullDimensional)
        ));
    }

    #[test]
    fn degenerate_halfspace_cone_has_no_interior() {
        let k = ConeSpec::halfspaces(
            Matrix::from_rows(&[
                Vector::from_slice(&[1.0, 0.0]),
                Vector::from_slice(&[-1.0, 0.0]),
            ])
            .unwrap(),
        )
        .unwrap();
        assert!(matches!(k.interior_point(), Err(Error::NotFullDimensional)));
        assert!(!k.is_full_dimensional());
    }

    #[test]
    fn cube_cone_representations_agree() {
        let g = cube_cone_generators();
        let h = cube_cone_halfspaces();
        let mg = Membership::new(&g).unwrap();
        let mh = Membership::new(&h).unwrap();
        let mut rng = SampleRng::new(17);
        let sampler = ConeSampler::new(&g).unwrap();
        for _ in 0..200 {
            let inside = sampler.sample(&mut rng);
            assert!(mh.contains(&inside, &tol()), "generator sample {inside:?}");
            let y = rng.gaussian_vector(3).scale(2.0);
            assert_eq!(mg.contains(&y, &tol()), mh.contains(&y, &tol()), "at {y:?}");
        }
    }

    #[test]
    fn samplers_stay_inside_each_representation() {
        let cones = [
            wedge(),
            cube_cone_generators(),
            cube_cone_halfspaces(),
            ConeSpec::ray(Vector::from_slice(&[1.0, -2.0, 0.5])).unwrap(),
            ConeSpec::negated(wedge()),
        ];
        let mut rng = SampleRng::new(23);
        for k in &cones {
            let sampler = ConeSampler::new(k).unwrap();
            let member = Membership::new(k).unwrap();
            for _ in 0..300 {
                let x = sampler.sample(&mut rng);
                assert!(member.contains(&x, &tol()), "{} sample {x:?}", k.kind_name());
            }
        }
    }

    #[test]
    fn obtuse_and_orthogonal_generator_tests() {
        let t = tol();
        assert!(ConeSpec::orthant(3).is_coisotone(&t).unwrap());
        assert!(ConeSpec::orthant(3).is_selfdual_simplicial(&t).unwrap());
        assert!(!wedge().is_coisotone(&t).unwrap());
        assert!(!wedge().is_selfdual_simplicial(&t).unwrap());
        let obtuse = ConeSpec::simplicial(
            Matrix::from_columns(&[
                Vector::from_slice(&[1.0, 0.0]),
                Vector::from_slice(&[-0.6, 0.8]),
            ])
            .unwrap(),
        )
        .unwrap();
        assert!(obtuse.is_coisotone(&t).unwrap());
        assert!(!obtuse.is_selfdual_simplicial(&t).unwrap());
        assert!(matches!(
            cube_cone_generators().is_coisotone(&t),
            Err(Error::UnsupportedRepresentation(_))
        ));
    }

    #[test]
    fn planar_conversions_roundtrip() {
        let mut rng = SampleRng::new(31);
        let k = wedge();
        let h = ConeSpec::halfspaces(k.halfspace_rows().unwrap()).unwrap();
        let v = ConeSpec::generators(h.generator_columns().unwrap()).unwrap();
        let mk = Membership::new(&k).unwrap();
        let mv = Membership::new(&v).unwrap();
        for _ in 0..300 {
            let y = rng.gaussian_vector(2).scale(2.0);
            assert_eq!(mk.contains(&y, &tol()), mv.contains(&y, &tol()), "at {y:?}");
        }
    }

    #[test]
    fn planar_conversion_rejects_unpointed_cones() {
        let halfplane =
            ConeSpec::halfspaces(Matrix::from_rows(&[Vector::from_slice(&[1.0, 0.0])]).unwrap())
                .unwrap();
        assert!(matches!(
            halfplane.generator_columns(),
            Err(Error::UnsupportedRepresentation(_))
        ));
        let line = ConeSpec::generators(
            Matrix::from_columns(&[
                Vector::from_slice(&[1.0, 0.0]),
                Vector::from_slice(&[-1.0, 0.0]),
            ])
            .unwrap(),
        )
        .unwrap();
        assert!(matches!(
            line.halfspace_rows(),
            Err(Error::UnsupportedRepresentation(_))
        ));
    }

    #[test]
    fn ray_halfspace_rows_pin_the_complement() {
        let r = ConeSpec::ray(Vector::from_slice(&[0.0, 0.0, 2.0])).unwrap();
        let h = ConeSpec::halfspaces(r.halfspace_rows().unwrap()).unwrap();
        let mr = Membership::new(&r).unwrap();
        let mh = Membership::new(&h).unwrap();
        let mut rng = SampleRng::new(37);
        for _ in 0..200 {
            let y = rng.gaussian_vector(3);
            assert_eq!(mr.contains(&y, &tol()), mh.contains(&y, &tol()));
        }
        assert!(mh.contains(&Vector::from_slice(&[0.0, 0.0, 5.0]), &tol()));
    }

    #[test]
    fn project_convenience_matches_projector() {
        let res = wedge().project(&Vector::from_slice(&[-1.0, 1.0])).unwrap();
        assert!(res.projected.norm() == 0.0);
        let res = cube_cone_generators()
            .project(&Vector::from_slice(&[-2.0, 0.0, 0.0]))
            .unwrap();
        assert!(res.distance() < 1e-9);
        // A planar halfspace cone is projectable through the representation
        // converter.
        let h = ConeSpec::halfspaces(wedge().halfspace_rows().unwrap()).unwrap();
        let res = h.project(&Vector::from_slice(&[0.0, 1.0])).unwrap();
        assert!(res.projected.sub(&Vector::from_slice(&[0.5, 0.5])).norm() < 1e-10);
    }

    #[test]
    fn random_cone_builders_are_deterministic_and_well_formed() {
        let t = tol();
        let a = random_obtuse_cone(4, &mut SampleRng::new(5));
        let b = random_obtuse_cone(4, &mut SampleRng::new(5));
        assert!(a.approx_same(&b, 0.0));
        assert!(a.is_coisotone(&t).unwrap());
        assert!(!a.is_selfdual_simplicial(&t).unwrap());

        let q = random_rotated_orthant(5, &mut SampleRng::new(6));
        assert!(q.is_selfdual_simplicial(&t).unwrap());
        assert!(q.is_coisotone(&t).unwrap());

        let s = random_simplicial_cone(4, &mut SampleRng::new(7));
        let ConeSpec::Simplicial { generators } = &s else {
            panic!()
        };
        assert!(rcond(generators) > 1e-3);

        let h = random_halfspace_cone(3, 2, &mut SampleRng::new(8));
        assert!(h.is_pointed(&tol()));
        assert!(h.is_full_dimensional());
        assert!(h.interior_point().is_ok());
    }

    proptest! {
        // Membership margins have the sign behaviour of a gauge: positive
        // scaling never flips them.
        #[test]
        fn membership_is_scale_invariant(seed in 0u64..300, t in 0.1f64..10.0) {
            let mut rng = SampleRng::new(seed);
            let k = random_simplicial_cone(3, &mut rng);
            let y = rng.gaussian_vector(3);
            let m = Membership::new(&k).unwrap();
            prop_assert_eq!(m.margin(&y) > 1e-7, m.margin(&y.scale(t)) > 1e-7 * t);
        }

        // Dual of the dual gets back to the original simplicial cone.
        #[test]
        fn dual_is_an_involution_on_simplicial_cones(seed in 0u64..300) {
            let mut rng = SampleRng::new(seed);
            let k = random_simplicial_cone(3, &mut rng);
            let dd = k.dual().unwrap().dual().unwrap();
            prop_assert!(dd.approx_same(&k, 1e-8));
        }

        #[test]
        fn order_is_reflexive_and_translation_invariant(seed in 0u64..200) {
            let mut rng = SampleRng::new(seed);
            let k = random_simplicial_cone(3, &mut rng);
            let x = rng.gaussian_vector(3);
            let z = rng.gaussian_vector(3);
            let t = ToleranceConfig::default();
            prop_assert!(k.order_leq(&x, &x, &t).unwrap());
            let member = ConeSampler::new(&k).unwrap().sample(&mut rng);
            // x <= x + member, and translating both sides preserves it.
            prop_assert!(k.order_leq(&x, &x.add(&member), &t).unwrap());
            prop_assert!(k.order_leq(&x.add(&z), &x.add(&member).add(&z), &t).unwrap());
        }
    }
}
