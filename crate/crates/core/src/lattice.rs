//! Youdine lattice operations for simplicial cones: positive and negative
//! part, join, meet, absolute value, and the lattice operator they induce.
//!
//! A simplicial cone `K = A·R^n₊` (columns of `A` independent) orders `R^n`
//! as a vector lattice: mapping through `A⁻¹` reduces every lattice
//! operation to the coordinatewise one on the standard orthant. The
//! positive-part operator `x⁺ = A·max(A⁻¹x, 0)` is the least member of `K`
//! that dominates `x` in the cone order, and everything else here —
//! join, meet, `|x|`, and the lattice operator — is assembled from it.

use crate::cones::ConeSpec;
use crate::error::{Error, Result};
use crate::numeric::{invert, Matrix, Vector};
use crate::operators::{AvnOperator, Construction, Property};

/// Lattice structure of a simplicial cone, with the coordinate change cached.
#[derive(Clone, Debug)]
pub struct YoudineLattice {
    cone: ConeSpec,
    generators: Matrix,
    inverse: Matrix,
}

impl YoudineLattice {
    /// Builds the lattice of a simplicial cone. Negated simplicial cones are
    /// accepted (the negation is pushed into the generator matrix); any other
    /// representation is rejected, since only simplicial cones order `R^n`
    /// as a lattice.
    pub fn new(cone: &ConeSpec) -> Result<Self> {
        let leaf = cone.normalize_negation();
        let ConeSpec::Simplicial { generators } = leaf else {
            return Err(Error::UnsupportedRepresentation(format!(
                "lattice operations need a simplicial cone, got {}",
                cone.kind_name()
            )));
        };
        let inverse = invert(&generators)?;
        Ok(YoudineLattice {
            cone: ConeSpec::Simplicial {
                generators: generators.clone(),
            },
            generators,
            inverse,
        })
    }

    pub fn dim(&self) -> usize {
        self.generators.rows()
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// `x⁺ = A·max(A⁻¹x, 0)`: the least upper bound of `x` and `0` in the
    /// cone order.
    pub fn pos_part(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        Ok(self.pos_part_raw(x))
    }

    pub(crate) fn pos_part_raw(&self, x: &Vector) -> Vector {
        let coords = self.inverse.matvec(x);
        let clamped = Vector::from_slice(
            &coords
                .iter()
                .map(|c| c.max(0.0))
                .collect::<Vec<_>>(),
        );
        self.generators.matvec(&clamped)
    }

    /// `x⁻ = (−x)⁺`, so that `x = x⁺ − x⁻`.
    pub fn neg_part(&self, x: &Vector) -> Result<Vector> {
        self.pos_part(&x.neg())
    }

    /// `x ∨ y = x + (y − x)⁺`.
    pub fn join(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(x.add(&self.pos_part_raw(&y.sub(x))))
    }

    /// `x ∧ y = −((−x) ∨ (−y))`.
    pub fn meet(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        Ok(self.join(&x.neg(), &y.neg())?.neg())
    }

    /// `|x| = x⁺ + x⁻`.
    pub fn abs_value(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        Ok(self.pos_part_raw(x).add(&self.pos_part_raw(&x.neg())))
    }
}

/// Wraps the positive-part operator of the lattice as a cone map onto
/// `lat.cone()`. The wrapped operator is claimed proper, isotone, and a
/// lattice operator; the verification checks exercise those claims, they are
/// never assumed.
pub fn lattice_avn(lat: &YoudineLattice) -> AvnOperator {
    AvnOperator::from_parts(
        Construction::Lattice {
            lattice: lat.clone(),
        },
        lat.cone().clone(),
        Some(ConeSpec::negated(lat.cone().clone())),
        vec![Property::Proper, Property::Isotone, Property::Lattice],
        format!("lattice({})", lat.dim()),
    )
    // The lattice constructor already inverted the generator matrix, so the
    // membership oracles for the cone and its negation cannot fail here.
    .expect("simplicial cone validated at lattice construction")
}
