//! Asymmetric-vector-norm operators: cone-valued retractions and their
//! constructions.
//!
//! An [`AvnOperator`] packages a map `Q: Rⁿ → Rⁿ` together with the cone it
//! retracts onto, the kernel cone `K^Q = {y : Qy = 0}` when that set has a
//! usable description, and a list of *claimed* properties. Claims are inputs
//! to the verification checks, never assumptions: every construction here is
//! exercised by sampling, and the one deliberately defective map
//! ([`primitive_counterexample`]) is shipped precisely so the checks have
//! something to catch.

use serde::{Deserialize, Serialize};

use crate::cones::{ConeSampler, ConeSpec, Membership};
use crate::error::{Error, Result};
use crate::lattice::YoudineLattice;
use crate::norms::{axiom_check, AsymmetricNorm, AsymmetricNormSpec};
use crate::numeric::{
    orthonormal_basis_with_first, Matrix, SampleRng, ToleranceConfig, Vector,
};
use crate::projection::Projector;

/// Properties an operator may claim; each has a corresponding check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    /// `Q(y − Qy) = 0` for all `y`.
    Proper,
    /// `Q(x + k) − Q(x)` stays in the cone range for cone members `k`.
    Isotone,
    /// `Q(x) − Q(−x) = x` (the positive/negative part decomposition).
    Lattice,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Proper => "proper",
            Property::Isotone => "isotone",
            Property::Lattice => "lattice",
        }
    }
}

/// Orthonormal frame of Rⁿ singled out by its first axis.
///
/// `forward` takes ambient coordinates to frame coordinates, `backward`
/// inverts it; both are isometries.
#[derive(Clone, Debug)]
pub struct Frame {
    basis: Matrix,
}

impl Frame {
    /// Completes `direction` (normalized) to an orthonormal basis.
    pub fn with_first_axis(direction: &Vector) -> Result<Frame> {
        Ok(Frame {
            basis: orthonormal_basis_with_first(direction)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// First basis vector in ambient coordinates.
    pub fn axis(&self) -> Vector {
        self.basis.col(0)
    }

    pub fn forward(&self, y: &Vector) -> Vector {
        self.basis.transpose_matvec(y)
    }

    pub fn backward(&self, c: &Vector) -> Vector {
        self.basis.matvec(c)
    }

    /// Frobenius defect `‖BᵀB − I‖`, 0 for an exact orthonormal basis.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        let gram = self.basis.transpose().matmul(&self.basis);
        let mut sq = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                let d = gram.get(i, j) - target;
                sq += d * d;
            }
        }
        sq.sqrt()
    }
}

#[derive(Clone, Debug)]
enum RangeRepr {
    /// A cone with a `ConeSpec` description and a cached membership oracle.
    Spec {
        spec: ConeSpec,
        membership: Membership,
        sampler: Option<ConeSampler>,
    },
    /// The analytic set `{(t, x) : t + g(x) ≤ 0}`, which has no generator or
    /// halfspace description for a general gauge `g`.
    SubLevel { gauge: AsymmetricNorm },
}

/// A cone given either by a [`ConeSpec`] or as a gauge sub-level set, with a
/// uniform membership/sampling interface. Operators use this for their cone
/// range and kernel so that kernels like `{(t,x) : t + g(x) ≤ 0}` are
/// first-class citizens of the checks.
#[derive(Clone, Debug)]
pub struct ConeRange {
    repr: RangeRepr,
}

impl ConeRange {
    pub fn from_spec(spec: ConeSpec) -> Result<Self> {
        let membership = Membership::new(&spec)?;
        let sampler = ConeSampler::new(&spec).ok();
        Ok(ConeRange {
            repr: RangeRepr::Spec {
                spec,
                membership,
                sampler,
            },
        })
    }

    /// The set `{(t, x) : t + g(x) ≤ 0}` in dimension `g.dim() + 1`.
    pub fn sub_level(gauge: AsymmetricNorm) -> Self {
        ConeRange {
            repr: RangeRepr::SubLevel { gauge },
        }
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            RangeRepr::Spec { spec, .. } => spec.dim(),
            RangeRepr::SubLevel { gauge } => gauge.dim() + 1,
        }
    }

    /// The `ConeSpec` description, when this range has one.
    pub fn spec(&self) -> Option<&ConeSpec> {
        match &self.repr {
            RangeRepr::Spec { spec, .. } => Some(spec),
            RangeRepr::SubLevel { .. } => None,
        }
    }

    /// Signed membership margin, nonnegative inside.
    pub fn membership_margin(&self, y: &Vector) -> f64 {
        match &self.repr {
            RangeRepr::Spec { membership, .. } => membership.margin(y),
            RangeRepr::SubLevel { gauge } => {
                let (t, x) = y.split_head();
                -(t + gauge.eval_raw(&x))
            }
        }
    }

    pub fn contains(&self, y: &Vector, tol: &ToleranceConfig) -> bool {
        self.membership_margin(y) >= -tol.membership_margin_tol(y.norm())
    }

    /// Draws a member. Spec-backed ranges use the cone sampler; sub-level
    /// ranges pick `x` freely and `t ≤ −g(x)` directly.
    pub fn sample_member(&self, rng: &mut SampleRng) -> Result<Vector> {
        match &self.repr {
            RangeRepr::Spec {
                sampler: Some(s), ..
            } => Ok(s.sample(rng)),
            RangeRepr::Spec { spec, .. } => Err(Error::UnsupportedRepresentation(format!(
                "no member sampler for this {} cone",
                spec.kind_name()
            ))),
            RangeRepr::SubLevel { gauge } => {
                let x = rng.gaussian_vector(gauge.dim()).scale(2.0);
                let t = -gauge.eval_raw(&x) - rng.half_normal();
                Ok(Vector::from_head_tail(t, &x))
            }
        }
    }

    pub fn describe(&self) -> String {
        match &self.repr {
            RangeRepr::Spec { spec, .. } => spec.kind_name().to_string(),
            RangeRepr::SubLevel { gauge } => {
                format!("sub-level({})", gauge.spec().kind_name())
            }
        }
    }
}

/// How an operator was built; carries exactly the data `apply` needs.
#[derive(Clone, Debug)]
pub enum Construction {
    /// `y ↦ q(y)·x` with `q(x) = 1`.
    RangeOne { norm: AsymmetricNorm, base: Vector },
    /// `y ↦ (t + g(x))⁺·e₁` on `R^{1+m}`; `norm` is the full suspension.
    Suspension { norm: AsymmetricNorm },
    /// Suspension in a rotated frame, subtracted from the identity:
    /// `y ↦ y − q̂(forward(y))·axis`.
    FromProperCone {
        frame: Frame,
        norm: AsymmetricNorm,
        cone: ConeSpec,
    },
    /// Lattice positive part of a simplicial cone.
    Lattice { lattice: YoudineLattice },
    /// Euclidean metric projection onto a cone.
    Projection { projector: Projector, cone: ConeSpec },
    /// `y ↦ y − Qy` of a proper operator.
    Complement { inner: Box<AvnOperator> },
    /// Convex combination of operators with a common cone range.
    Mix { parts: Vec<(f64, AvnOperator)> },
    /// The deliberately defective map `(u, v) ↦ (0, v⁺)`.
    Primitive,
}

impl Construction {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Construction::RangeOne { .. } => "range-one",
            Construction::Suspension { .. } => "suspension",
            Construction::FromProperCone { .. } => "from-cone",
            Construction::Lattice { .. } => "lattice",
            Construction::Projection { .. } => "projection",
            Construction::Complement { .. } => "complement",
            Construction::Mix { .. } => "mix",
            Construction::Primitive => "primitive",
        }
    }
}

/// Common view of a cone-valued map, as consumed by the verification checks.
///
/// [`AvnOperator`] is the canonical implementation; tests implement it for
/// hand-broken maps to confirm the checks catch real defects.
pub trait ConeMap {
    fn dim(&self) -> usize;
    fn apply(&self, y: &Vector) -> Result<Vector>;
    fn cone_range(&self) -> &ConeRange;
    fn kernel_cone(&self) -> Option<&ConeRange> {
        None
    }
    fn label(&self) -> &str;
    fn claimed_properties(&self) -> &[Property];
}

/// A constructed cone retraction with its cone range, optional kernel cone,
/// and claimed properties.
#[derive(Clone, Debug)]
pub struct AvnOperator {
    construction: Construction,
    dim: usize,
    cone_range: ConeRange,
    kernel: Option<ConeRange>,
    claims: Vec<Property>,
    label: String,
}

impl AvnOperator {
    /// Assembles an operator from spec-described cones. The claims list is
    /// sorted and deduplicated so equal operators serialize identically.
    pub fn from_parts(
        construction: Construction,
        cone_range: ConeSpec,
        kernel: Option<ConeSpec>,
        claims: Vec<Property>,
        label: String,
    ) -> Result<Self> {
        let range = ConeRange::from_spec(cone_range)?;
        let kernel = match kernel {
            Some(spec) => Some(ConeRange::from_spec(spec)?),
            None => None,
        };
        Ok(Self::assemble(construction, range, kernel, claims, label))
    }

    fn assemble(
        construction: Construction,
        cone_range: ConeRange,
        kernel: Option<ConeRange>,
        mut claims: Vec<Property>,
        label: String,
    ) -> Self {
        claims.sort();
        claims.dedup();
        let dim = cone_range.dim();
        AvnOperator {
            construction,
            dim,
            cone_range,
            kernel,
            claims,
            label,
        }
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    pub fn apply(&self, y: &Vector) -> Result<Vector> {
        if y.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.dim(),
            });
        }
        Ok(self.apply_raw(y))
    }

    fn apply_raw(&self, y: &Vector) -> Vector {
        match &self.construction {
            Construction::RangeOne { norm, base } => base.scale(norm.eval_raw(y)),
            Construction::Suspension { norm } => {
                Vector::unit(self.dim, 0).scale(norm.eval_raw(y))
            }
            Construction::FromProperCone { frame, norm, .. } => {
                let hat = frame.forward(y);
                let residual = hat.axpy(-norm.eval_raw(&hat), &Vector::unit(self.dim, 0));
                frame.backward(&residual)
            }
            Construction::Lattice { lattice } => lattice.pos_part_raw(y),
            Construction::Projection { projector, .. } => projector.project(y).projected,
            Construction::Complement { inner } => y.sub(&inner.apply_raw(y)),
            Construction::Mix { parts } => {
                let mut acc = Vector::zeros(self.dim);
                for (weight, op) in parts {
                    acc = acc.axpy(*weight, &op.apply_raw(y));
                }
                acc
            }
            Construction::Primitive => {
                let v = y.as_slice()[1];
                Vector::from_slice(&[0.0, v.max(0.0)])
            }
        }
    }
}

impl ConeMap for AvnOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, y: &Vector) -> Result<Vector> {
        AvnOperator::apply(self, y)
    }

    fn cone_range(&self) -> &ConeRange {
        &self.cone_range
    }

    fn kernel_cone(&self) -> Option<&ConeRange> {
        self.kernel.as_ref()
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn claimed_properties(&self) -> &[Property] {
        &self.claims
    }
}

/// The operator `Q(y) = q(y)·x` onto the ray through `x`, for a normalized
/// base point (`q(x) = 1`). Its kernel is the zero set of `q`, recorded as a
/// cone when the norm family gives it a closed form.
pub fn range_one(
    q: AsymmetricNormSpec,
    x: &Vector,
    tol: &ToleranceConfig,
) -> Result<AvnOperator> {
    let norm = AsymmetricNorm::new(q)?;
    let value = norm.eval(x)?;
    if (value - 1.0).abs() > tol.abs_tol.max(1e-9) {
        return Err(Error::NormalizationError { value });
    }
    let kernel = range_one_kernel(&norm)?;
    let label = format!("range-one({})", norm.spec().kind_name());
    let range = ConeRange::from_spec(ConeSpec::ray(x.clone())?)?;
    Ok(AvnOperator::assemble(
        Construction::RangeOne {
            norm,
            base: x.clone(),
        },
        range,
        kernel,
        Vec::new(),
        label,
    ))
}

/// Closed-form kernel `{y : q(y) = 0}` per norm family, where one exists:
/// the max-positive-part vanishes exactly on `−Rⁿ₊`, the lattice norm on
/// `−K`, and a suspension on its gauge sub-level set. A bounded gauge is
/// positive off the origin, so its kernel is `{0}` — representable by no
/// cone spec here and recorded as absent.
fn range_one_kernel(norm: &AsymmetricNorm) -> Result<Option<ConeRange>> {
    match norm.spec() {
        AsymmetricNormSpec::MaxPositivePart { dim } => Ok(Some(ConeRange::from_spec(
            ConeSpec::negated(ConeSpec::orthant(*dim)),
        )?)),
        AsymmetricNormSpec::HilbertLatticePos { lattice } => Ok(Some(ConeRange::from_spec(
            ConeSpec::negated(lattice.cone().clone()),
        )?)),
        AsymmetricNormSpec::Suspension { inner } => {
            let gauge = AsymmetricNorm::new((**inner).clone())?;
            Ok(Some(ConeRange::sub_level(gauge)))
        }
        AsymmetricNormSpec::GaugeH { .. } => Ok(None),
    }
}

/// The suspension of a norm `g` on `R^m`: the operator on `R^{m+1}`
///
/// ```text
/// Q((t, x)) = (t + g(x))⁺ · e₁
/// ```
///
/// built only after `g` passes the norm axiom check. Its kernel is the set
/// `{(t, x) : t + g(x) ≤ 0}` and the operator claims properness.
pub fn suspension_avn(g: AsymmetricNormSpec, tol: &ToleranceConfig) -> Result<AvnOperator> {
    let gauge = AsymmetricNorm::new(g)?;
    let report = axiom_check(&gauge, tol);
    if !report.passed() {
        return Err(Error::NormAxiomFailure {
            check: report.check_name,
        });
    }
    let inner_kind = gauge.spec().kind_name();
    let norm = AsymmetricNorm::new(AsymmetricNormSpec::Suspension {
        inner: Box::new(gauge.spec().clone()),
    })?;
    let n = norm.dim();
    let range = ConeRange::from_spec(ConeSpec::ray(Vector::unit(n, 0))?)?;
    Ok(AvnOperator::assemble(
        Construction::Suspension { norm },
        range,
        Some(ConeRange::sub_level(gauge)),
        vec![Property::Proper],
        format!("suspension({inner_kind})"),
    ))
}

/// Builds a proper retraction onto a pointed, full-dimensional cone `k` in
/// `R^{m+1}`, `m ≥ 2`, with a one-dimensional kernel, choosing an interior
/// axis along which the cone's cross-section is bounded.
pub fn avn_from_proper_cone(k: &ConeSpec, tol: &ToleranceConfig) -> Result<AvnOperator> {
    if k.dim() < 3 {
        return Err(Error::InvalidConstruction(format!(
            "the proper-cone construction needs ambient dimension >= 3, got {}",
            k.dim()
        )));
    }
    if !k.is_pointed(tol) {
        return Err(Error::NotPointed);
    }
    let u = joint_interior_axis(k)?;
    avn_from_proper_cone_with_axis(k, &u, tol)
}

/// An interior point of `k` whose cross-section `D'` is guaranteed bounded.
///
/// The construction needs its axis interior to both `k` *and* the dual cone:
/// interiority in `k` makes every rotated inequality's first coefficient
/// strictly negative, while interiority in the dual is exactly boundedness
/// of the cross-section (an excluded direction would be a cone member the
/// section recedes along). The two interiors always intersect for a proper
/// cone — a separating direction `s` would lie in `k` with `−s` in the dual,
/// forcing `⟨s, s⟩ ≤ 0`.
///
/// When the cone's generators are available, the conditions read directly:
/// the axis must make a strictly positive inner product with every
/// inequality normal (interiority in `k`) and every generator (interiority
/// in the dual, since the inner product against extreme rays controls the
/// whole cone). For a halfspace-only description the same search runs in
/// weight space: any strictly positive combination `u = Σ λⱼ ĉⱼ` of the
/// normalized normals lies interior to the dual, and interiority in `k`
/// becomes `Ĝλ > 0` for the normals' Gram matrix `Ĝ`.
fn joint_interior_axis(k: &ConeSpec) -> Result<Vector> {
    let rows = k.halfspace_rows()?;
    let m = rows.rows();
    let unit: Vec<Vector> = (0..m).map(|i| rows.row(i).normalized()).collect();

    if let Ok(gens) = k.generator_columns() {
        let mut constraints = unit;
        for j in 0..gens.cols() {
            constraints.push(gens.col(j).normalized());
        }
        return pick_positive_direction(&constraints).ok_or(Error::NotFullDimensional);
    }

    let mut constraints = Vec::with_capacity(2 * m);
    for a in &unit {
        let gram_row: Vec<f64> = unit.iter().map(|b| a.dot(b)).collect();
        constraints.push(Vector::new(gram_row)?.normalized());
    }
    for i in 0..m {
        constraints.push(Vector::unit(m, i));
    }
    let weights =
        pick_positive_direction(&constraints).ok_or(Error::NotFullDimensional)?;
    let mut u = Vector::zeros(rows.cols());
    for i in 0..m {
        u = u.axpy(weights[i], &rows.row(i).normalized());
    }
    Ok(u.normalized())
}

/// A unit direction with strictly positive inner product against every
/// constraint vector, or `None` when the search cannot separate one.
///
/// The constraint centroid is tried first: it is exact for symmetric
/// systems and covers the common well-conditioned cones without any
/// iteration. Otherwise the best margin is optimized directly.
fn pick_positive_direction(constraints: &[Vector]) -> Option<Vector> {
    let m = constraints.len() as f64;
    let mut centroid = Vector::zeros(constraints[0].dim());
    for s in constraints {
        centroid = centroid.axpy(1.0 / m, s);
    }
    if centroid.norm() > 1e-14 && worst_margin_of(constraints, &centroid) >= 0.02 {
        return Some(centroid.normalized());
    }
    let (direction, margin) = max_margin_direction(constraints);
    (margin > 1e-6).then_some(direction)
}

fn worst_margin_of(constraints: &[Vector], direction: &Vector) -> f64 {
    let d = direction.normalized();
    constraints
        .iter()
        .map(|s| s.dot(&d))
        .fold(f64::INFINITY, f64::min)
}

/// Direction maximizing the worst inner product against a finite set of unit
/// normals, with the achieved margin.
///
/// By duality the optimal direction is the minimum-norm point of the convex
/// hull of the normals (and the optimal margin is that point's norm), so the
/// search runs Gilbert's algorithm: repeatedly move toward the normal the
/// current point supports worst, with an exact line search. The margin of
/// the iterate is not monotone even though its norm is, so the best
/// direction seen is tracked and returned. Deterministic; a degenerate
/// system (origin in the hull) surfaces as a nonpositive margin.
fn max_margin_direction(constraints: &[Vector]) -> (Vector, f64) {
    let m = constraints.len() as f64;
    let mut x = Vector::zeros(constraints[0].dim());
    for s in constraints {
        x = x.axpy(1.0 / m, s);
    }
    let mut best_margin = f64::NEG_INFINITY;
    let mut best = x.clone();
    for _ in 0..50_000 {
        if x.norm() <= 1e-14 {
            // The origin lies in the hull: no strictly feasible direction.
            break;
        }
        let worst = constraints
            .iter()
            .min_by(|a, b| a.dot(&x).total_cmp(&b.dot(&x)))
            .expect("nonempty constraint set");
        let margin = worst.dot(&x) / x.norm();
        if margin > best_margin {
            best_margin = margin;
            best = x.clone();
        }
        // Optimality: the worst support already touches the current norm.
        if worst.dot(&x) >= x.norm_sq() - 1e-16 {
            break;
        }
        let d = x.sub(worst);
        let denom = d.norm_sq();
        if denom <= 1e-30 {
            break;
        }
        let t = (x.dot(&d) / denom).clamp(0.0, 1.0);
        x = x.axpy(-t, &d);
    }
    if best_margin == f64::NEG_INFINITY {
        return (Vector::unit(constraints[0].dim(), 0), 0.0);
    }
    (best.normalized(), best_margin)
}

/// As [`avn_from_proper_cone`] with an explicit interior point `u`. Any
/// interior choice works; the kernel becomes the ray through `−u`.
///
/// The construction rotates the first frame axis onto `−u/‖u‖`. In frame
/// coordinates every cone inequality `⟨c, y⟩ ≥ 0` has a strictly negative
/// first coefficient `c₀ = ⟨c, axis⟩`, so dividing by `c₀` rewrites it as
/// `t + ⟨a, x⟩ ≤ 0` with gauge facet `a = c_tail/c₀`. The cone is then the
/// sub-level set `{t + g(x) ≤ 0}` of the facet gauge `g`, and
/// `Q = I − (suspension of g)` retracts onto it.
pub fn avn_from_proper_cone_with_axis(
    k: &ConeSpec,
    u: &Vector,
    tol: &ToleranceConfig,
) -> Result<AvnOperator> {
    let n = k.dim();
    if n < 3 {
        return Err(Error::InvalidConstruction(format!(
            "the proper-cone construction needs ambient dimension >= 3, got {n}"
        )));
    }
    if u.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.dim(),
        });
    }
    if !k.is_pointed(tol) {
        return Err(Error::NotPointed);
    }
    let rows = k.halfspace_rows()?;
    let frame = Frame::with_first_axis(&u.neg())?;

    let mut facets = Vec::with_capacity(rows.rows());
    for j in 0..rows.rows() {
        let c = rows.row(j);
        let hat = frame.forward(&c);
        let (c0, tail) = hat.split_head();
        // c0 = −⟨c, u⟩/‖u‖ must be strictly negative for an interior u.
        if c0 > -1e-9 * c.norm() {
            return Err(Error::InvalidConstruction(format!(
                "axis point is not interior: inequality {j} has margin {:.3e}",
                -c0
            )));
        }
        facets.push(tail.scale(1.0 / c0));
    }
    let gauge = AsymmetricNorm::new(AsymmetricNormSpec::GaugeH {
        facets: Matrix::from_rows(&facets)?,
    })?;
    let norm = AsymmetricNorm::new(AsymmetricNormSpec::Suspension {
        inner: Box::new(gauge.spec().clone()),
    })?;
    let kernel = ConeRange::from_spec(ConeSpec::ray(frame.axis())?)?;
    let range = ConeRange::from_spec(k.clone())?;
    Ok(AvnOperator::assemble(
        Construction::FromProperCone {
            frame,
            norm,
            cone: k.clone(),
        },
        range,
        Some(kernel),
        vec![Property::Proper],
        format!("from-cone({})", k.kind_name()),
    ))
}

/// Convex combination `Σ λᵢ Qᵢ` of operators sharing one cone range.
///
/// The shared range is checked by bidirectional sampled membership against
/// the first part. No properties are claimed: properness in particular is
/// generally destroyed by mixing, which is the point of building these.
pub fn mix(parts: Vec<(f64, AvnOperator)>, tol: &ToleranceConfig) -> Result<AvnOperator> {
    if parts.is_empty() {
        return Err(Error::InvalidConstruction(
            "mix needs at least one operator".into(),
        ));
    }
    if parts.iter().any(|(w, _)| *w <= 0.0) {
        return Err(Error::InvalidConstruction(
            "mix weights must be strictly positive".into(),
        ));
    }
    let sum: f64 = parts.iter().map(|(w, _)| w).sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::BadWeights { sum });
    }
    let dim = parts[0].1.dim;
    if parts.iter().any(|(_, op)| op.dim != dim) {
        return Err(Error::ConeRangeMismatch);
    }
    let mut rng = tol.rng();
    let base = &parts[0].1;
    for (_, other) in parts.iter().skip(1) {
        let mut agree = ranges_agree(&base.cone_range, &other.cone_range, tol, &mut rng)?;
        agree = agree && ranges_agree(&other.cone_range, &base.cone_range, tol, &mut rng)?;
        if !agree {
            return Err(Error::ConeRangeMismatch);
        }
    }
    let range = base.cone_range.clone();
    let labels: Vec<&str> = parts.iter().map(|(_, op)| op.label.as_str()).collect();
    let label = format!("mix({})", labels.join(", "));
    Ok(AvnOperator::assemble(
        Construction::Mix { parts },
        range,
        None,
        Vec::new(),
        label,
    ))
}

/// Sampled one-sided inclusion: members drawn from `a` must belong to `b`.
fn ranges_agree(
    a: &ConeRange,
    b: &ConeRange,
    tol: &ToleranceConfig,
    rng: &mut SampleRng,
) -> Result<bool> {
    for _ in 0..64 {
        let y = a.sample_member(rng)?;
        if !b.contains(&y, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The complement `I − Q` of a proper operator: a retraction onto the
/// kernel cone `K^Q`.
///
/// Properness is verified by sampling before the complement is formed;
/// without it, `(I − Q)X` need not equal `K^Q` and the construction would
/// be meaningless. The operator needs a representable kernel cone to serve
/// as the complement's range.
pub fn complement(op: &AvnOperator, tol: &ToleranceConfig) -> Result<AvnOperator> {
    let mut rng = tol.rng();
    let mut worst = 0.0_f64;
    for _ in 0..tol.sample_count {
        let y = rng.gaussian_vector(op.dim).scale(2.0);
        let residual = y.sub(&op.apply_raw(&y));
        let defect = op.apply_raw(&residual).norm() / (1.0 + y.norm());
        if defect > worst {
            worst = defect;
        }
    }
    if worst > tol.membership_tol {
        return Err(Error::NotProper {
            worst_margin: worst,
        });
    }
    let range = op
        .kernel
        .clone()
        .ok_or_else(|| {
            Error::UnsupportedRepresentation(format!(
                "operator `{}` has no representable kernel cone to complement onto",
                op.label
            ))
        })?;
    let kernel = Some(op.cone_range.clone());
    let label = format!("complement({})", op.label);
    Ok(AvnOperator::assemble(
        Construction::Complement {
            inner: Box::new(op.clone()),
        },
        range,
        kernel,
        vec![Property::Proper],
        label,
    ))
}

/// The map `S(u, v) = (0, v⁺)` on R², retracting onto the ray
/// `{(0, v) : v ≥ 0}`.
///
/// `S` is positively homogeneous, subadditive, isotone, and proper, but it
/// is *not* definite: `S(u, 0) = S(−u, 0) = 0` for every `u`. It exists to
/// demonstrate that the definiteness axiom is independent of the others, so
/// its claims list carries what it does satisfy and the axiom suite is
/// expected to fail on definiteness alone.
pub fn primitive_counterexample() -> AvnOperator {
    let ray = ConeSpec::ray(Vector::from_slice(&[0.0, 1.0])).expect("nonzero direction");
    let kernel = ConeSpec::halfspaces(
        Matrix::from_rows(&[Vector::from_slice(&[0.0, -1.0])]).expect("one row"),
    )
    .expect("well-formed halfplane");
    AvnOperator::from_parts(
        Construction::Primitive,
        ray,
        Some(kernel),
        vec![Property::Proper, Property::Isotone],
        "primitive-counterexample".into(),
    )
    .expect("fixed two-dimensional cones")
}
