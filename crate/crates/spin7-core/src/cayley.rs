//! The Karigiannis--Min-Oo test for Cayley 4-planes.
//!
//! For tangent vectors u, v, w, y the 2-form
//!   eta = pi7( u^b ^ B(v,w,y) + v^b ^ B(w,u,y) + w^b ^ B(u,v,y)
//!              + y^b ^ B(v,u,w) )
//! vanishes exactly when span{u,v,w,y} is Cayley up to orientation, where
//! B(u,v,w) = w -| v -| u -| Phi and pi7 projects 2-forms onto the
//! 7-dimensional irreducible summand. pi7 is defined on decomposables as
//! pi7(u^b ^ v^b) = (u^b ^ v^b + u -| v -| Phi)/4 and extended linearly
//! over the coframe's decomposable basis via the musical isomorphisms.

use crate::error::{Error, Result};
use crate::form::{flat, interior_product, sharp, KForm, MetricAtPoint, TangentVector, DIM};
use crate::geometry::StructurePack;
use crate::linalg;

/// Independence threshold on the unit-normalized plane gram determinant.
const PLANE_DET_TOL: f64 = 1e-10;
/// Number of linearly independent 2-form monomials.
const TWO_FORM_DIM: usize = 28;

/// B(u, v, w) = w -| v -| u -| Phi, a 1-form. Alternating and trilinear.
pub fn triple_b(
    u: &TangentVector,
    v: &TangentVector,
    w: &TangentVector,
    pack: &StructurePack,
) -> Result<KForm> {
    let step1 = interior_product(u, &pack.phi)?;
    let step2 = interior_product(v, &step1)?;
    interior_product(w, &step2)
}

/// Phi(u, v, w, y), the calibration value on the 4-frame.
pub fn phi_value(
    u: &TangentVector,
    v: &TangentVector,
    w: &TangentVector,
    y: &TangentVector,
    pack: &StructurePack,
) -> Result<f64> {
    let b = triple_b(u, v, w, pack)?;
    y.pair(&b)
}

/// pi7 of a decomposable 2-form given by two 1-forms a, b:
/// (a ^ b + sharp(a) -| sharp(b) -| Phi)/4.
fn pi7_decomposable(a: &KForm, b: &KForm, pack: &StructurePack) -> Result<KForm> {
    let ab = a.wedge(b)?;
    let ua = sharp(a, &pack.metric)?;
    let ub = sharp(b, &pack.metric)?;
    let contracted = interior_product(&ua, &interior_product(&ub, &pack.phi)?)?;
    Ok(ab.add(&contracted)?.scale(0.25))
}

/// pi7 of an arbitrary 2-form, by linearity over the canonical
/// decomposable basis theta^i ^ theta^j.
pub fn pi7(a: &KForm, pack: &StructurePack) -> Result<KForm> {
    if a.degree() != 2 {
        return Err(Error::WrongDegree {
            expected: 2,
            got: a.degree(),
        });
    }
    let mut out = KForm::zero(2)?;
    for (set, c) in a.terms() {
        let ix = set.indices();
        let ti = KForm::basis_one_form(ix[0]);
        let tj = KForm::basis_one_form(ix[1]);
        out = out.add(&pi7_decomposable(&ti, &tj, pack)?.scale(c))?;
    }
    Ok(out)
}

/// The matrix of pi7 on the 28-dimensional space of 2-forms, in the
/// orthonormalized coframe (each theta^i rescaled to unit length). The
/// matrix of an orthogonal projection in an orthonormal basis is
/// symmetric, which the rank diagnostics rely on.
pub fn pi7_matrix(pack: &StructurePack) -> Result<Vec<f64>> {
    let g = &pack.metric;
    let scale: Vec<f64> = (0..DIM).map(|i| g.coeffs()[i][i].sqrt()).collect();
    // guard: the basis must be orthogonal for the rescaling to orthonormalize
    for i in 0..DIM {
        for j in 0..DIM {
            if i != j && g.coeffs()[i][j] != 0.0 {
                return Err(Error::WrongBasis("an orthogonal (diagonal-metric)"));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..DIM)
        .flat_map(|i| ((i + 1)..DIM).map(move |j| (i, j)))
        .collect();
    let mut mat = vec![0.0; TWO_FORM_DIM * TWO_FORM_DIM];
    for (col, &(i, j)) in pairs.iter().enumerate() {
        // |theta^{ij}| = 1/(s_i s_j) for the diagonal metric, so the unit
        // basis 2-form is s_i s_j theta^{ij}
        let unit = KForm::monomial(&[i, j], scale[i] * scale[j])?;
        let image = pi7(&unit, pack)?;
        for (row, &(k, l)) in pairs.iter().enumerate() {
            // coefficient in the unit basis
            mat[row * TWO_FORM_DIM + col] = image.coeff(&[k, l]) / (scale[k] * scale[l]);
        }
    }
    Ok(mat)
}

/// Numerical rank of pi7 via its (symmetric) eigenvalues.
pub fn pi7_rank(pack: &StructurePack, tol: f64) -> Result<usize> {
    let m = pi7_matrix(pack)?;
    let ev = linalg::jacobi_eigenvalues(TWO_FORM_DIM, &m);
    Ok(ev.iter().filter(|&&e| e > tol).count())
}

/// An oriented 4-plane given by four spanning tangent vectors.
#[derive(Debug, Clone)]
pub struct FourPlane {
    vectors: [TangentVector; 4],
}

impl FourPlane {
    /// Checks linear independence: the gram determinant of the
    /// norm-rescaled spanning set must stay above 1e-10.
    pub fn new(vectors: [TangentVector; 4], g: &MetricAtPoint) -> Result<FourPlane> {
        let mut unit = vectors;
        for v in &mut unit {
            let n = g.vector_norm(v);
            if n <= 0.0 || !n.is_finite() {
                return Err(Error::DegeneratePlane);
            }
            *v = v.scale(1.0 / n);
        }
        let mut gram = [0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                gram[i * 4 + j] = g.vector_inner(&unit[i], &unit[j]);
            }
        }
        if linalg::det(4, &gram).abs() < PLANE_DET_TOL {
            return Err(Error::DegeneratePlane);
        }
        Ok(FourPlane { vectors })
    }

    pub fn vectors(&self) -> &[TangentVector; 4] {
        &self.vectors
    }

    /// 4-volume of the spanned parallelepiped.
    pub fn volume(&self, g: &MetricAtPoint) -> f64 {
        let mut gram = [0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                gram[i * 4 + j] = g.vector_inner(&self.vectors[i], &self.vectors[j]);
            }
        }
        linalg::det(4, &gram).max(0.0).sqrt()
    }
}

/// The obstruction 2-form eta of the plane.
pub fn eta(plane: &FourPlane, pack: &StructurePack) -> Result<KForm> {
    let [u, v, w, y] = plane.vectors();
    let g = &pack.metric;
    let mut sum = flat(u, g).wedge(&triple_b(v, w, y, pack)?)?;
    sum = sum.add(&flat(v, g).wedge(&triple_b(w, u, y, pack)?)?)?;
    sum = sum.add(&flat(w, g).wedge(&triple_b(u, v, y, pack)?)?)?;
    sum = sum.add(&flat(y, g).wedge(&triple_b(v, u, w, pack)?)?)?;
    pi7(&sum, pack)
}

/// Outcome of the Cayley test: the scale-free residual |eta|/vol4 and the
/// sign of Phi on the frame. eta is orientation-free, so the sign records
/// which orientation of a calibrated plane Phi actually calibrates.
#[derive(Debug, Clone, Copy)]
pub struct CayleyVerdict {
    pub calibrated: bool,
    pub residual: f64,
    pub calibration_sign: f64,
}

/// Tests whether the plane is Cayley up to orientation: |eta|, normalized
/// by the plane's 4-volume (eta is 4-linear in the spanning set), compared
/// against `tol`.
pub fn is_cayley(plane: &FourPlane, pack: &StructurePack, tol: f64) -> Result<CayleyVerdict> {
    if tol <= 0.0 {
        return Err(Error::OutOfRange("tolerance must be positive"));
    }
    let vol = plane.volume(&pack.metric);
    if vol < PLANE_DET_TOL {
        return Err(Error::DegeneratePlane);
    }
    let e = eta(plane, pack)?;
    let residual = e.norm(&pack.metric)? / vol;
    let [u, v, w, y] = plane.vectors();
    let value = phi_value(u, v, w, y, pack)?;
    Ok(CayleyVerdict {
        calibrated: residual < tol,
        residual,
        calibration_sign: value.signum(),
    })
}

/// Direct calibration test |Phi(u,v,w,y)| = vol4, the brute-force
/// counterpart of `is_cayley` (equality up to orientation).
pub fn calibration_defect(plane: &FourPlane, pack: &StructurePack) -> Result<f64> {
    let [u, v, w, y] = plane.vectors();
    let value = phi_value(u, v, w, y, pack)?;
    let vol = plane.volume(&pack.metric);
    Ok((value.abs() - vol).abs() / vol)
}

/// The explicit basis of the 7-dimensional summand of the 2-forms in the
/// SO(3)-chart diagonalizing coframe
/// (d alpha, d beta, sigma2, sigma3, ds~, dt~, omega1, omega2).
///
/// The scalars sin(alpha), cos(alpha) and 5(c + r^2) are recovered from
/// the pack's diagonal metric: g_00 = 5(c+r^2)^{3/5}, g_11 = g_00 sin^2 a,
/// g_22 = g_00 cos^2 a.
pub fn lambda_basis(pack: &StructurePack) -> Result<[KForm; 7]> {
    if pack.names != crate::geometry::so3::DIAGONALIZING_NAMES {
        return Err(Error::WrongBasis("SO(3) diagonalizing"));
    }
    let g00 = pack.metric.coeffs()[0][0];
    let u = (g00 / 5.0).powf(5.0 / 3.0);
    let sa2 = (pack.metric.coeffs()[1][1] / g00).clamp(0.0, 1.0);
    let sa = sa2.sqrt();
    let ca = (pack.metric.coeffs()[2][2] / g00).clamp(0.0, 1.0).sqrt();
    let fc = 5.0 * u; // the 5(c+r^2) prefactor of lambda_5..7
    let (da, db, s2, s3, ds, dt, w1, w2) = (0, 1, 2, 3, 4, 5, 6, 7);
    let l1 = KForm::from_terms(
        2,
        &[
            (&[s2, w1], -ca),
            (&[da, w2], 1.0),
            (&[db, dt], 2.0 * sa),
            (&[s3, ds], 2.0 * ca),
        ],
    )?;
    let l2 = KForm::from_terms(
        2,
        &[
            (&[s2, w2], ca),
            (&[da, w1], 1.0),
            (&[db, ds], -2.0 * sa),
            (&[s3, dt], 2.0 * ca),
        ],
    )?;
    let l3 = KForm::from_terms(
        2,
        &[
            (&[s3, w1], ca),
            (&[db, w2], sa),
            (&[s2, ds], 2.0 * ca),
            (&[da, dt], -2.0),
        ],
    )?;
    let l4 = KForm::from_terms(
        2,
        &[
            (&[s3, w2], -ca),
            (&[db, w1], sa),
            (&[s2, dt], 2.0 * ca),
            (&[da, ds], 2.0),
        ],
    )?;
    let l5 = KForm::from_terms(
        2,
        &[
            (&[s3, da], fc * ca),
            (&[s2, db], fc * sa * ca),
            (&[w2, ds], 2.0),
            (&[w1, dt], 2.0),
        ],
    )?;
    let l6 = KForm::from_terms(
        2,
        &[
            (&[s3, db], fc * sa * ca),
            (&[s2, da], -fc * ca),
            (&[w2, w1], 1.0),
            (&[dt, ds], 4.0),
        ],
    )?;
    let l7 = KForm::from_terms(
        2,
        &[
            (&[db, da], fc * sa),
            (&[s3, s2], fc * ca * ca),
            (&[ds, w1], 2.0),
            (&[dt, w2], -2.0),
        ],
    )?;
    Ok([l1, l2, l3, l4, l5, l6, l7])
}

/// Least-squares decomposition of a 2-form over the lambda basis.
/// Returns the coefficients and the coefficient-space residual norm.
pub fn decompose_in_lambda(form: &KForm, lambdas: &[KForm; 7]) -> Result<([f64; 7], f64)> {
    let pairs: Vec<(usize, usize)> = (0..DIM)
        .flat_map(|i| ((i + 1)..DIM).map(move |j| (i, j)))
        .collect();
    let rows = pairs.len();
    let mut b = vec![0.0; rows * 7];
    let mut y = vec![0.0; rows];
    for (r, &(i, j)) in pairs.iter().enumerate() {
        for (cidx, l) in lambdas.iter().enumerate() {
            b[r * 7 + cidx] = l.coeff(&[i, j]);
        }
        y[r] = form.coeff(&[i, j]);
    }
    let sol = linalg::least_squares(rows, 7, &b, &y)?;
    let mut residual = 0.0f64;
    for (r, &(i, j)) in pairs.iter().enumerate() {
        let mut fit = 0.0;
        for (cidx, s) in sol.iter().enumerate() {
            fit += s * b[r * 7 + cidx];
        }
        residual += (fit - form.coeff(&[i, j])).powi(2);
    }
    let mut out = [0.0; 7];
    out.copy_from_slice(&sol);
    Ok((out, residual.sqrt()))
}

/// The flat model R^8 = R^4 (+) R^4 with its standard Cayley form
///   Phi = dx^{0123} + da^{0123} + sum omega_i ^ eta_i,
/// identity metric, and standard orientation. Basis order:
/// (dx0..dx3, da0..da3).
pub fn flat_pack() -> StructurePack {
    let mk = |terms: &[(&[usize], f64)]| KForm::from_terms(2, terms).unwrap();
    // anti-self-dual bases of the two factors
    let omega = [
        mk(&[(&[0, 1], 1.0), (&[2, 3], -1.0)]),
        mk(&[(&[0, 2], 1.0), (&[3, 1], -1.0)]),
        mk(&[(&[0, 3], 1.0), (&[1, 2], -1.0)]),
    ];
    let eta_f = [
        mk(&[(&[4, 5], 1.0), (&[6, 7], -1.0)]),
        mk(&[(&[4, 6], 1.0), (&[7, 5], -1.0)]),
        mk(&[(&[4, 7], 1.0), (&[5, 6], -1.0)]),
    ];
    let mut phi = KForm::monomial(&[0, 1, 2, 3], 1.0).unwrap();
    phi = phi
        .add(&KForm::monomial(&[4, 5, 6, 7], 1.0).unwrap())
        .unwrap();
    for i in 0..3 {
        phi = phi.add(&omega[i].wedge(&eta_f[i]).unwrap()).unwrap();
    }
    let volume = KForm::monomial(&[0, 1, 2, 3, 4, 5, 6, 7], 1.0).unwrap();
    let coframe: [KForm; DIM] = std::array::from_fn(KForm::basis_one_form);
    let frame: [TangentVector; DIM] = std::array::from_fn(TangentVector::basis);
    let xi: [KForm; 4] = std::array::from_fn(|i| KForm::basis_one_form(4 + i));
    StructurePack {
        names: ["dx0", "dx1", "dx2", "dx3", "da0", "da1", "da2", "da3"],
        coframe,
        frame,
        phi,
        metric: MetricAtPoint::identity(),
        volume,
        rho: [
            KForm::zero(1).unwrap(),
            KForm::zero(1).unwrap(),
            KForm::zero(1).unwrap(),
        ],
        xi,
        omega_cap: omega,
        a_cap: eta_f,
        orientation_sign: 1.0,
    }
}
