//! The Bryant-Salamon structure data in explicit coordinate charts.
//!
//! Two charts cover the computations: one adapted to the SO(3) x Id_2
//! action on the base sphere and one adapted to the Sp(1) x Id_1 action.
//! A [`StructurePack`] collects, at one chart point, the active coframe,
//! its dual frame, the Cayley form Phi_c, the induced metric and volume,
//! and the connection/vertical/horizontal form families.

pub mod so3;
pub mod sp1;
mod verify;

pub use so3::{build_so3_pack, exterior_derivative_so3, ChartPointSO3, So3Basis};
pub use sp1::{build_sp1_pack, exterior_derivative_sp1, ChartPointSp1};
pub use verify::{
    closure_residual_so3, closure_residual_sp1, d_of_constant_probe, multi_moment_fibre,
    pairing_defect, self_duality_residual, verify_torsion_free, ChartKind, ClosureReport,
};

use crate::error::Result;
use crate::form::{KForm, MetricAtPoint, TangentVector, DIM};
use crate::linalg;

/// All structure data at one chart point, expressed in the pack's coframe.
///
/// `coframe` and `frame` are the exception: they relate the pack basis to
/// the raw chart coordinates (1-forms over coordinate differentials and
/// vectors over coordinate partials), so their pairing being the identity
/// is a genuine check between independently hand-coded formulas.
#[derive(Debug, Clone)]
pub struct StructurePack {
    /// Display names of the eight basis 1-forms, in index order.
    pub names: [&'static str; DIM],
    /// Basis 1-forms over the chart coordinate differentials.
    pub coframe: [KForm; DIM],
    /// Dual frame vectors over the chart coordinate partials.
    pub frame: [TangentVector; DIM],
    /// Cayley form, degree 4.
    pub phi: KForm,
    /// Metric coefficients in the pack basis.
    pub metric: MetricAtPoint,
    /// Volume form, degree 8 (the orientation of the bundle construction).
    pub volume: KForm,
    /// Connection 1-forms rho_i.
    pub rho: [KForm; 3],
    /// Vertical 1-forms xi_i.
    pub xi: [KForm; 4],
    /// Horizontal 2-forms Omega_i.
    pub omega_cap: [KForm; 3],
    /// Vertical 2-forms A_i.
    pub a_cap: [KForm; 3],
    /// Sign relating the ordered basis to the orientation of `volume`.
    pub orientation_sign: f64,
}

impl StructurePack {
    /// Pairing coframe[i](frame[j]); the identity when both are consistent.
    pub fn pairing_matrix(&self) -> Result<[[f64; DIM]; DIM]> {
        let mut p = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                p[i][j] = self.frame[j].pair(&self.coframe[i])?;
            }
        }
        Ok(p)
    }

    /// Max |pairing - identity|.
    pub fn pairing_defect(&self) -> Result<f64> {
        let p = self.pairing_matrix()?;
        let mut worst: f64 = 0.0;
        for (i, row) in p.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - want).abs());
            }
        }
        Ok(worst)
    }

    /// Relative defect of `volume` against the metric volume
    /// orientation_sign * sqrt(det g) theta^{0...7}.
    pub fn volume_defect(&self) -> f64 {
        let want = self.orientation_sign * self.metric.sqrt_det();
        let got = self.volume.coeff(&[0, 1, 2, 3, 4, 5, 6, 7]);
        let mut stray = 0.0f64;
        for (set, c) in self.volume.terms() {
            if set != crate::form::IndexSet::FULL {
                stray = stray.max(c.abs());
            }
        }
        ((got - want).abs() + stray) / want.abs()
    }
}

/// The chart-independent ingredients of Phi_c in raw coordinates: the
/// horizontal orthonormal coframe b_i, the vertical 1-forms xi_i and the
/// connection forms rho_i, all over coordinate differentials.
pub(crate) struct RawStructure {
    pub b: [KForm; 4],
    pub xi: [KForm; 4],
    pub rho: [KForm; 3],
    pub r2: f64,
    pub c: f64,
}

impl RawStructure {
    pub fn omega_cap(&self) -> Result<[KForm; 3]> {
        let mut out = [KForm::zero(2)?, KForm::zero(2)?, KForm::zero(2)?];
        for i in 0..3 {
            let (j, k) = cyclic(i);
            out[i] = self.b[0]
                .wedge(&self.b[i + 1])?
                .sub(&self.b[j].wedge(&self.b[k])?)?;
        }
        Ok(out)
    }

    pub fn a_cap(&self) -> Result<[KForm; 3]> {
        let mut out = [KForm::zero(2)?, KForm::zero(2)?, KForm::zero(2)?];
        for i in 0..3 {
            let (j, k) = cyclic(i);
            out[i] = self.xi[0]
                .wedge(&self.xi[i + 1])?
                .sub(&self.xi[j].wedge(&self.xi[k])?)?;
        }
        Ok(out)
    }

    /// Phi_c = 16 u^{-4/5} xi^{0123} + 25 u^{6/5} b^{0123}
    ///         + 20 u^{1/5} sum A_i ^ Omega_i,  u = c + r^2.
    pub fn phi(&self) -> Result<KForm> {
        let u = self.c + self.r2;
        let xi4 = self.xi[0]
            .wedge(&self.xi[1])?
            .wedge(&self.xi[2])?
            .wedge(&self.xi[3])?;
        let b4 = self.b[0]
            .wedge(&self.b[1])?
            .wedge(&self.b[2])?
            .wedge(&self.b[3])?;
        let mut phi = xi4.scale(16.0 * u.powf(-0.8));
        phi = phi.add(&b4.scale(25.0 * u.powf(1.2)))?;
        let omega = self.omega_cap()?;
        let a = self.a_cap()?;
        for i in 0..3 {
            phi = phi.add(&a[i].wedge(&omega[i])?.scale(20.0 * u.powf(0.2)))?;
        }
        Ok(phi)
    }

    /// vol_c = 400 u^{2/5} xi^{0123} ^ b^{0123}.
    pub fn volume(&self) -> Result<KForm> {
        let u = self.c + self.r2;
        let xi4 = self.xi[0]
            .wedge(&self.xi[1])?
            .wedge(&self.xi[2])?
            .wedge(&self.xi[3])?;
        let b4 = self.b[0]
            .wedge(&self.b[1])?
            .wedge(&self.b[2])?
            .wedge(&self.b[3])?;
        Ok(xi4.wedge(&b4)?.scale(400.0 * u.powf(0.4)))
    }
}

pub(crate) fn cyclic(i: usize) -> (usize, usize) {
    // (i, j, k) cyclic in the 1-based labels; b/xi arrays are 0-based with
    // slot 0 the extra element, so label i corresponds to slot i+1
    match i {
        0 => (2, 3),
        1 => (3, 1),
        _ => (1, 2),
    }
}

/// Inverts the coframe matrix (rows = basis 1-forms over coordinate
/// differentials) and returns each coordinate differential dx_j as a
/// 1-form over the basis indices, ready for `KForm::substitute`.
pub(crate) fn coordinate_images(rows: &[[f64; DIM]; DIM]) -> Result<[KForm; DIM]> {
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    let inv = linalg::invert(DIM, &flat)?;
    let mut images: [KForm; DIM] = std::array::from_fn(|_| KForm::zero(1).unwrap());
    for (j, image) in images.iter_mut().enumerate() {
        let mut coeffs = [0.0; DIM];
        coeffs.copy_from_slice(&inv[j * DIM..(j + 1) * DIM]);
        *image = KForm::one_form(&coeffs);
    }
    Ok(images)
}

pub(crate) fn rows_to_one_forms(rows: &[[f64; DIM]; DIM]) -> [KForm; DIM] {
    std::array::from_fn(|i| KForm::one_form(&rows[i]))
}

pub(crate) fn rows_to_vectors(rows: &[[f64; DIM]; DIM]) -> [TangentVector; DIM] {
    std::array::from_fn(|i| TangentVector::new(rows[i]))
}

pub(crate) fn diagonal_metric(entries: [f64; DIM]) -> Result<MetricAtPoint> {
    MetricAtPoint::diagonal(&entries)
}
