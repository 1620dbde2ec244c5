//! Scalar asymmetric norms as evaluable specifications.
//!
//! An asymmetric norm is positively homogeneous and subadditive like a norm,
//! but `q(y)` and `q(−y)` may differ, and definiteness only requires that
//! `q(y) = q(−y) = 0` force `y = 0`. Four families are provided: the
//! max-positive-part functional, polytope gauges in facet form, the
//! suspension of a lower-dimensional norm, and the Euclidean length of a
//! lattice positive part. Each family's axioms are exercised by
//! [`axiom_check`]; nothing downstream assumes them.

use crate::error::{Error, Result};
use crate::lattice::YoudineLattice;
use crate::numeric::{matrix_rank, min_singular_direction, Matrix, SampleRng, ToleranceConfig, Vector};
use crate::projection::{Projector, MAX_GENERATORS};
use crate::report::{CheckReport, Verdict, Witness};

/// Declarative description of an asymmetric norm.
#[derive(Clone, Debug)]
pub enum AsymmetricNormSpec {
    /// `q(y) = max_i (y_i)⁺`.
    MaxPositivePart { dim: usize },
    /// Gauge of the polytope `D' = {x : ⟨a_j, x⟩ ≤ 1}` with the `a_j` as
    /// rows: `q(y) = max_j ⟨a_j, y⟩` (positive for every `y ≠ 0` once the
    /// body is bounded).
    GaugeH { facets: Matrix },
    /// `q((t, x)) = (t + g(x))⁺` where the first coordinate is `t` and `g`
    /// is the inner norm on the remaining coordinates.
    Suspension { inner: Box<AsymmetricNormSpec> },
    /// `q(y) = ‖y⁺‖` for the positive part of a simplicial-cone lattice.
    HilbertLatticePos { lattice: YoudineLattice },
}

impl AsymmetricNormSpec {
    pub fn dim(&self) -> usize {
        match self {
            AsymmetricNormSpec::MaxPositivePart { dim } => *dim,
            AsymmetricNormSpec::GaugeH { facets } => facets.cols(),
            AsymmetricNormSpec::Suspension { inner } => inner.dim() + 1,
            AsymmetricNormSpec::HilbertLatticePos { lattice } => lattice.dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AsymmetricNormSpec::MaxPositivePart { .. } => "max-positive-part",
            AsymmetricNormSpec::GaugeH { .. } => "gauge",
            AsymmetricNormSpec::Suspension { .. } => "suspension",
            AsymmetricNormSpec::HilbertLatticePos { .. } => "hilbert-lattice-pos",
        }
    }
}

/// Validated, evaluable asymmetric norm.
///
/// Construction checks structural prerequisites (nonzero dimension, gauge
/// boundedness); the analytic axioms are sampled by [`axiom_check`].
#[derive(Clone, Debug)]
pub struct AsymmetricNorm {
    spec: AsymmetricNormSpec,
}

impl AsymmetricNorm {
    pub fn new(spec: AsymmetricNormSpec) -> Result<Self> {
        match &spec {
            AsymmetricNormSpec::MaxPositivePart { dim } => {
                if *dim == 0 {
                    return Err(Error::InvalidConstruction(
                        "max-positive-part norm needs dimension >= 1".into(),
                    ));
                }
            }
            AsymmetricNormSpec::GaugeH { facets } => check_gauge_bounded(facets)?,
            AsymmetricNormSpec::Suspension { inner } => {
                // Validate the inner spec recursively; the suspension itself
                // then automatically has dimension >= 2.
                AsymmetricNorm::new((**inner).clone())?;
            }
            AsymmetricNormSpec::HilbertLatticePos { .. } => {}
        }
        Ok(AsymmetricNorm { spec })
    }

    pub fn spec(&self) -> &AsymmetricNormSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn eval(&self, y: &Vector) -> Result<f64> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: y.dim(),
            });
        }
        Ok(self.eval_raw(y))
    }

    /// Evaluation without the dimension check, for validated hot paths.
    pub fn eval_raw(&self, y: &Vector) -> f64 {
        debug_assert_eq!(y.dim(), self.dim());
        match &self.spec {
            AsymmetricNormSpec::MaxPositivePart { .. } => {
                y.iter().fold(0.0_f64, |m, v| m.max(*v))
            }
            AsymmetricNormSpec::GaugeH { facets } => {
                let mut m = f64::NEG_INFINITY;
                for j in 0..facets.rows() {
                    m = m.max(facets.row(j).dot(y));
                }
                // A bounded body's gauge is positive off the origin; the
                // clamp only normalizes y = 0 and rounding noise.
                m.max(0.0)
            }
            AsymmetricNormSpec::Suspension { inner } => {
                let (t, x) = y.split_head();
                let g = AsymmetricNorm {
                    spec: (**inner).clone(),
                };
                (t + g.eval_raw(&x)).max(0.0)
            }
            AsymmetricNormSpec::HilbertLatticePos { lattice } => lattice.pos_part_raw(y).norm(),
        }
    }
}

/// Bounded check for the gauge body `{x : ⟨a_j, x⟩ ≤ 1}`: the facet normals
/// must positively span R^n. With at most [`MAX_GENERATORS`] facets the test
/// is exact (every `±e_i` must lie in `cone{a_j}`; a failing residual is a
/// recession direction). With more facets, a deterministic sampled search
/// looks for a direction no facet supports; finding none is accepted.
fn check_gauge_bounded(facets: &Matrix) -> Result<()> {
    let n = facets.cols();
    if matrix_rank(facets, 1e-10) < n {
        let witness = min_singular_direction(facets);
        return Err(Error::BoundednessViolation {
            witness: witness.as_slice().to_vec(),
        });
    }
    if facets.rows() <= MAX_GENERATORS {
        let cone_of_normals = Projector::new(&facets.transpose())?;
        for i in 0..n {
            for sign in [1.0, -1.0] {
                let e = Vector::unit(n, i).scale(sign);
                let res = cone_of_normals.project(&e);
                if res.distance() > 1e-9 {
                    // The residual is orthogonal-or-obtuse to every facet
                    // normal: a direction along which the body recedes.
                    return Err(Error::BoundednessViolation {
                        witness: res.residual.normalized().as_slice().to_vec(),
                    });
                }
            }
        }
        return Ok(());
    }
    let mut rng = SampleRng::new(0x5eed);
    for _ in 0..256 {
        let d = rng.unit_sphere(n);
        let supported = (0..facets.rows()).any(|j| facets.row(j).dot(&d) > 0.0);
        if !supported {
            return Err(Error::BoundednessViolation {
                witness: d.as_slice().to_vec(),
            });
        }
    }
    Ok(())
}

/// Samples the three defining properties of an asymmetric norm:
/// homogeneity `q(t·y) = t·q(y)`, subadditivity, and definiteness
/// (`q(y) = q(−y) = 0 ⇒ y = 0`). The definiteness part is a randomized
/// falsification search over the unit sphere — `Pass` records that no
/// witness with `‖y‖ ≥ 0.1` was found within the sample budget, not a proof.
///
/// `worst_margin` is the largest scale-normalized defect observed across the
/// homogeneity and subadditivity samples (0 would be exact arithmetic).
pub fn axiom_check(q: &AsymmetricNorm, tol: &ToleranceConfig) -> CheckReport {
    let n = q.dim();
    let mut rng = tol.rng();
    let mut worst = 0.0_f64;
    let mut witnesses = Vec::new();
    let mut verdict = Verdict::Pass;
    let samples = tol.sample_count;

    for _ in 0..samples {
        let y = rng.gaussian_vector(n).scale(2.0);
        let qy = q.eval_raw(&y);

        for t in [0.0, 0.5, 2.0, 10.0] {
            let defect = (q.eval_raw(&y.scale(t)) - t * qy).abs() / (1.0 + t * (1.0 + qy));
            if defect > worst {
                worst = defect;
            }
            if defect > tol.rel_tol && verdict == Verdict::Pass {
                verdict = Verdict::Fail;
                witnesses.push(Witness::new(
                    format!("homogeneity violation at t={t}"),
                    &[&y],
                ));
            }
        }

        let z = rng.gaussian_vector(n).scale(2.0);
        let slack = qy + q.eval_raw(&z) - q.eval_raw(&y.add(&z));
        let defect = (-slack).max(0.0) / (1.0 + y.norm() + z.norm());
        if defect > worst {
            worst = defect;
        }
        if defect > tol.abs_tol && verdict == Verdict::Pass {
            verdict = Verdict::Fail;
            witnesses.push(Witness::new("subadditivity violation", &[&y, &z]));
        }
    }

    // Definiteness: look for a unit-sphere direction annihilated from both
    // sides.
    for _ in 0..samples {
        let y = rng.unit_sphere(n);
        if q.eval_raw(&y) <= tol.abs_tol && q.eval_raw(&y.neg()) <= tol.abs_tol {
            verdict = Verdict::Fail;
            witnesses.push(Witness::new("definiteness violation", &[&y]));
            break;
        }
    }

    CheckReport::new(
        "asymmetric_norm_axioms",
        verdict,
        samples,
        worst,
        witnesses,
        tol,
    )
}

/// Samples the properness condition of the range-one operator `y ↦ q(y)·x`:
/// `q(y − q(y)·x) = 0` for all `y`. Requires `q(x) = 1`; reports the worst
/// sampled value (scale-normalized), passing iff it stays within
/// `membership_tol`.
pub fn properness_condition(
    q: &AsymmetricNorm,
    x: &Vector,
    tol: &ToleranceConfig,
    samples: usize,
) -> Result<CheckReport> {
    let qx = q.eval(x)?;
    if (qx - 1.0).abs() > tol.abs_tol.max(1e-9) {
        return Err(Error::NormalizationError { value: qx });
    }
    let n = q.dim();
    let mut rng = tol.rng();
    let mut worst = 0.0_f64;
    let mut witness: Option<Vector> = None;
    for _ in 0..samples {
        let y = rng.gaussian_vector(n).scale(2.0);
        let defect = q.eval_raw(&y.axpy(-q.eval_raw(&y), x)) / (1.0 + y.norm());
        if defect > worst {
            worst = defect;
            if defect > tol.membership_tol {
                witness = Some(y);
            }
        }
    }
    let verdict = if worst <= tol.membership_tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let witnesses = match (&verdict, witness) {
        (Verdict::Fail, Some(y)) => vec![Witness::new("properness defect q(y - q(y)x) > 0", &[&y])],
        _ => Vec::new(),
    };
    Ok(CheckReport::new(
        "range_one_properness_condition",
        verdict,
        samples,
        worst,
        witnesses,
        tol,
    ))
}

/// The `∞`-gauge body `[−1,1]^n` in facet form (`2n` rows `±e_i`).
pub fn cube_gauge(n: usize) -> Result<AsymmetricNorm> {
    let mut rows = Vec::with_capacity(2 * n);
    for i in 0..n {
        rows.push(Vector::unit(n, i));
        rows.push(Vector::unit(n, i).neg());
    }
    AsymmetricNorm::new(AsymmetricNormSpec::GaugeH {
        facets: Matrix::from_rows(&rows)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::ConeSpec;

    fn max_pos(n: usize) -> AsymmetricNorm {
        AsymmetricNorm::new(AsymmetricNormSpec::MaxPositivePart { dim: n }).unwrap()
    }

    #[test]
    fn max_positive_part_oracle_values() {
        let q = max_pos(2);
        assert_eq!(q.eval(&Vector::from_slice(&[2.0, -3.0])).unwrap(), 2.0);
        assert_eq!(q.eval(&Vector::from_slice(&[-1.0, -2.0])).unwrap(), 0.0);
        assert_eq!(q.eval(&Vector::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn cube_gauge_is_the_infinity_norm() {
        let q = cube_gauge(2).unwrap();
        assert_eq!(q.eval(&Vector::from_slice(&[3.0, -1.0])).unwrap(), 3.0);
        assert_eq!(q.eval(&Vector::from_slice(&[-0.5, 0.25])).unwrap(), 0.5);
        assert_eq!(q.eval(&Vector::zeros(2)).unwrap(), 0.0);
        // Boundary points of the body evaluate to exactly 1.
        assert_eq!(q.eval(&Vector::from_slice(&[1.0, 0.75])).unwrap(), 1.0);
        assert_eq!(q.eval(&Vector::from_slice(&[-1.0, -1.0])).unwrap(), 1.0);
    }

    /// Gauge of `[−1,1]` on the line: the absolute value.
    fn abs_gauge() -> AsymmetricNorm {
        AsymmetricNorm::new(AsymmetricNormSpec::GaugeH {
            facets: Matrix::from_rows(&[Vector::from_slice(&[1.0]), Vector::from_slice(&[-1.0])])
                .unwrap(),
        })
        .unwrap()
    }

    #[test]
    fn suspension_over_absolute_value_oracles() {
        let q = AsymmetricNorm::new(AsymmetricNormSpec::Suspension {
            inner: Box::new(abs_gauge().spec().clone()),
        })
        .unwrap();
        assert_eq!(q.dim(), 2);
        assert_eq!(q.eval(&Vector::from_slice(&[-2.0, 1.0])).unwrap(), 0.0);
        assert_eq!(q.eval(&Vector::from_slice(&[1.0, 1.0])).unwrap(), 2.0);
        assert_eq!(q.eval(&Vector::from_slice(&[0.0, -3.0])).unwrap(), 3.0);
    }

    #[test]
    fn hilbert_lattice_norm_is_length_of_positive_part() {
        let lat = YoudineLattice::new(&ConeSpec::orthant(2)).unwrap();
        let q = AsymmetricNorm::new(AsymmetricNormSpec::HilbertLatticePos { lattice: lat })
            .unwrap();
        assert_eq!(q.eval(&Vector::from_slice(&[3.0, -4.0])).unwrap(), 3.0);
        assert_eq!(q.eval(&Vector::from_slice(&[3.0, 4.0])).unwrap(), 5.0);
        assert_eq!(q.eval(&Vector::from_slice(&[-1.0, -1.0])).unwrap(), 0.0);
    }

    #[test]
    fn unbounded_gauge_bodies_are_rejected_with_a_witness() {
        // A slab: both facets along e1, nothing bounds e2.
        let slab = AsymmetricNormSpec::GaugeH {
            facets: Matrix::from_rows(&[
                Vector::from_slice(&[1.0, 0.0]),
                Vector::from_slice(&[-1.0, 0.0]),
            ])
            .unwrap(),
        };
        match AsymmetricNorm::new(slab) {
            Err(Error::BoundednessViolation { witness }) => {
                assert!((witness[1].abs() - 1.0).abs() < 1e-9);
            }
            other => panic!("expected BoundednessViolation, got {other:?}"),
        }
        // A halfplane body: facets span but do not positively span.
        let half = AsymmetricNormSpec::GaugeH {
            facets: Matrix::from_rows(&[
                Vector::from_slice(&[1.0, 0.0]),
                Vector::from_slice(&[0.0, 1.0]),
            ])
            .unwrap(),
        };
        match AsymmetricNorm::new(half) {
            Err(Error::BoundednessViolation { witness }) => {
                let w = Vector::from_slice(&witness);
                assert!(w[0] <= 1e-9 && w[1] <= 1e-9);
            }
            other => panic!("expected BoundednessViolation, got {other:?}"),
        }
    }

    #[test]
    fn shipped_norms_pass_the_axiom_check() {
        let tol = ToleranceConfig::default();
        let lat = YoudineLattice::new(&ConeSpec::orthant(3)).unwrap();
        let specs: Vec<AsymmetricNorm> = vec![
            max_pos(3),
            cube_gauge(2).unwrap(),
            abs_gauge(),
            AsymmetricNorm::new(AsymmetricNormSpec::Suspension {
                inner: Box::new(AsymmetricNormSpec::MaxPositivePart { dim: 2 }),
            })
            .unwrap(),
            AsymmetricNorm::new(AsymmetricNormSpec::HilbertLatticePos { lattice: lat }).unwrap(),
        ];
        for q in specs {
            let report = axiom_check(&q, &tol);
            assert_eq!(
                report.verdict,
                Verdict::Pass,
                "{} failed: {:?}",
                q.spec().kind_name(),
                report.witnesses
            );
            assert!(report.worst_margin <= 1e-10);
        }
    }

    #[test]
    fn eval_is_nonnegative_and_vanishes_at_zero() {
        let mut rng = SampleRng::new(3);
        let specs: Vec<AsymmetricNorm> = vec![max_pos(4), cube_gauge(3).unwrap()];
        for q in specs {
            assert_eq!(q.eval(&Vector::zeros(q.dim())).unwrap(), 0.0);
            for _ in 0..200 {
                let y = rng.gaussian_vector(q.dim()).scale(3.0);
                assert!(q.eval(&y).unwrap() >= 0.0);
            }
        }
    }

    // The all-ones base point satisfies the properness condition for the
    // max-positive-part norm; a tilted base point does not.
    #[test]
    fn properness_condition_oracles() {
        let tol = ToleranceConfig::default();
        let q = max_pos(3);
        let ones = Vector::from_slice(&[1.0, 1.0, 1.0]);
        let report = properness_condition(&q, &ones, &tol, 500).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(report.worst_margin <= 1e-12);

        let tilted = Vector::from_slice(&[1.0, 0.5, 1.0]);
        let report = properness_condition(&q, &tilted, &tol, 500).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(!report.witnesses.is_empty());

        // The Hilbert-lattice norm admits no proper base point in dim >= 2;
        // try a unit cone member.
        let lat = YoudineLattice::new(&ConeSpec::orthant(2)).unwrap();
        let h = AsymmetricNorm::new(AsymmetricNormSpec::HilbertLatticePos { lattice: lat })
            .unwrap();
        let x = Vector::from_slice(&[1.0, 0.0]);
        let report = properness_condition(&h, &x, &tol, 500).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
    }

    #[test]
    fn normalization_is_enforced() {
        let tol = ToleranceConfig::default();
        let q = max_pos(2);
        let x = Vector::from_slice(&[2.0, 2.0]);
        assert!(matches!(
            properness_condition(&q, &x, &tol, 10),
            Err(Error::NormalizationError { value }) if (value - 2.0).abs() < 1e-12
        ));
    }
}
