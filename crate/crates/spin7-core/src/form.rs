//! Pointwise exterior algebra over an abstract 8-element coframe.
//!
//! A [`KForm`] stores the coefficients of an alternating form in a fixed
//! coframe {theta^0, ..., theta^7}; a [`TangentVector`] stores components in
//! the dual frame. Index subsets are kept as bitmasks, which makes the
//! canonical strictly-increasing tuple ordering automatic and keeps wedge
//! products cheap on the sparse forms that show up here (Phi_c has at most
//! 14 of the 70 possible degree-4 terms).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg;

pub const DIM: usize = 8;

/// A strictly increasing tuple of basis indices, encoded as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet(u8);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);
    pub const FULL: IndexSet = IndexSet(0xff);

    /// Builds from indices that must be distinct and in 0..8 (any order).
    pub fn new(indices: &[usize]) -> Result<IndexSet> {
        let mut mask = 0u8;
        for &i in indices {
            if i >= DIM {
                return Err(Error::InvalidIndices);
            }
            let bit = 1u8 << i;
            if mask & bit != 0 {
                return Err(Error::InvalidIndices);
            }
            mask |= bit;
        }
        Ok(IndexSet(mask))
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        i < DIM && self.0 & (1 << i) != 0
    }

    pub fn complement(self) -> IndexSet {
        IndexSet(!self.0)
    }

    /// Indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..DIM).filter(|&i| self.contains(i)).collect()
    }
}

/// Sign of sorting the concatenation (a, b) of two disjoint increasing
/// tuples into one increasing tuple.
fn merge_sign(a: u8, b: u8) -> f64 {
    let mut crossings = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        crossings += ((a as u32) >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    if crossings % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign of sorting indices given in arbitrary (distinct) order.
fn sort_sign(indices: &[usize]) -> f64 {
    let mut inv = 0usize;
    for i in 0..indices.len() {
        for j in i + 1..indices.len() {
            if indices[i] > indices[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A degree-k alternating form as sparse canonical coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm {
    degree: usize,
    coeffs: BTreeMap<IndexSet, f64>,
}

impl KForm {
    pub fn zero(degree: usize) -> Result<KForm> {
        if degree > DIM {
            return Err(Error::DegreeOverflow);
        }
        Ok(KForm {
            degree,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn scalar(value: f64) -> KForm {
        let mut f = KForm {
            degree: 0,
            coeffs: BTreeMap::new(),
        };
        f.insert(IndexSet::EMPTY, value);
        f
    }

    pub fn basis_one_form(i: usize) -> KForm {
        let mut f = KForm {
            degree: 1,
            coeffs: BTreeMap::new(),
        };
        f.insert(IndexSet::new(&[i]).expect("index in range"), 1.0);
        f
    }

    /// One monomial; indices may come in any order, the sorting sign is
    /// absorbed into the coefficient.
    pub fn monomial(indices: &[usize], coeff: f64) -> Result<KForm> {
        let set = IndexSet::new(indices)?;
        let mut f = KForm::zero(indices.len())?;
        f.insert(set, coeff * sort_sign(indices));
        Ok(f)
    }

    /// A 1-form from its 8 coefficients.
    pub fn one_form(coeffs: &[f64; DIM]) -> KForm {
        let mut f = KForm {
            degree: 1,
            coeffs: BTreeMap::new(),
        };
        for (i, &c) in coeffs.iter().enumerate() {
            f.insert(IndexSet::new(&[i]).unwrap(), c);
        }
        f
    }

    pub fn from_terms(degree: usize, terms: &[(&[usize], f64)]) -> Result<KForm> {
        let mut f = KForm::zero(degree)?;
        for (indices, coeff) in terms {
            if indices.len() != degree {
                return Err(Error::InvalidIndices);
            }
            let set = IndexSet::new(indices)?;
            f.insert(set, f.get(set) + coeff * sort_sign(indices));
        }
        Ok(f)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn insert(&mut self, set: IndexSet, value: f64) {
        if value == 0.0 {
            self.coeffs.remove(&set);
        } else {
            self.coeffs.insert(set, value);
        }
    }

    fn get(&self, set: IndexSet) -> f64 {
        self.coeffs.get(&set).copied().unwrap_or(0.0)
    }

    /// Coefficient of the canonical monomial with the given increasing indices.
    pub fn coeff(&self, indices: &[usize]) -> f64 {
        match IndexSet::new(indices) {
            Ok(set) if indices.len() == self.degree => self.get(set) * sort_sign(indices),
            _ => 0.0,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (IndexSet, f64)> + '_ {
        self.coeffs.iter().map(|(&s, &c)| (s, c))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn add(&self, other: &KForm) -> Result<KForm> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (set, c) in other.terms() {
            out.insert(set, out.get(set) + c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &KForm) -> Result<KForm> {
        self.add(&other.scale(-1.0))
    }

    pub fn add_scaled(&self, other: &KForm, k: f64) -> Result<KForm> {
        self.add(&other.scale(k))
    }

    pub fn scale(&self, k: f64) -> KForm {
        let mut out = KForm {
            degree: self.degree,
            coeffs: BTreeMap::new(),
        };
        for (set, c) in self.terms() {
            out.insert(set, c * k);
        }
        out
    }

    /// Exterior product. Errors when the degrees sum past 8.
    pub fn wedge(&self, other: &KForm) -> Result<KForm> {
        let degree = self.degree + other.degree;
        if degree > DIM {
            return Err(Error::DegreeOverflow);
        }
        let mut out = KForm::zero(degree)?;
        for (sa, ca) in self.terms() {
            for (sb, cb) in other.terms() {
                if sa.mask() & sb.mask() != 0 {
                    continue;
                }
                let set = IndexSet(sa.mask() | sb.mask());
                let sign = merge_sign(sa.mask(), sb.mask());
                out.insert(set, out.get(set) + sign * ca * cb);
            }
        }
        Ok(out)
    }

    /// Substitutes each basis 1-form theta^i by `images[i]` (a change of
    /// coframe, or a pullback). Images must be 1-forms.
    pub fn substitute(&self, images: &[KForm; DIM]) -> Result<KForm> {
        for im in images {
            if im.degree != 1 {
                return Err(Error::WrongDegree {
                    expected: 1,
                    got: im.degree,
                });
            }
        }
        let mut out = KForm::zero(self.degree)?;
        for (set, c) in self.terms() {
            let mut acc = KForm::scalar(c);
            for i in set.indices() {
                acc = acc.wedge(&images[i])?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// Inner product of equal-degree forms for the metric `g`.
    pub fn inner(&self, other: &KForm, g: &MetricAtPoint) -> Result<f64> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let w = g.inverse();
        let k = self.degree;
        let mut total = 0.0;
        for (sa, ca) in self.terms() {
            let rows = sa.indices();
            for (sb, cb) in other.terms() {
                let cols = sb.indices();
                // det of the k x k minor of the 1-form inner products
                let mut minor = [0.0; 64];
                for (r, &i) in rows.iter().enumerate() {
                    for (cidx, &j) in cols.iter().enumerate() {
                        minor[r * k + cidx] = w[i][j];
                    }
                }
                total += ca * cb * small_det(k, &minor[..k * k]);
            }
        }
        Ok(total)
    }

    /// Metric norm.
    pub fn norm(&self, g: &MetricAtPoint) -> Result<f64> {
        Ok(self.inner(self, g)?.max(0.0).sqrt())
    }
}

fn small_det(n: usize, a: &[f64]) -> f64 {
    match n {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => linalg::det(n, a),
    }
}

/// A tangent vector in the frame dual to the active coframe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub comps: [f64; DIM],
}

impl TangentVector {
    pub fn zero() -> TangentVector {
        TangentVector { comps: [0.0; DIM] }
    }

    pub fn new(comps: [f64; DIM]) -> TangentVector {
        TangentVector { comps }
    }

    pub fn basis(i: usize) -> TangentVector {
        let mut comps = [0.0; DIM];
        comps[i] = 1.0;
        TangentVector { comps }
    }

    pub fn scale(&self, k: f64) -> TangentVector {
        let mut comps = self.comps;
        for c in &mut comps {
            *c *= k;
        }
        TangentVector { comps }
    }

    pub fn add(&self, other: &TangentVector) -> TangentVector {
        let mut comps = self.comps;
        for (c, o) in comps.iter_mut().zip(other.comps.iter()) {
            *c += o;
        }
        TangentVector { comps }
    }

    pub fn add_scaled(&self, other: &TangentVector, k: f64) -> TangentVector {
        self.add(&other.scale(k))
    }

    /// Natural pairing with a 1-form.
    pub fn pair(&self, a: &KForm) -> Result<f64> {
        if a.degree() != 1 {
            return Err(Error::WrongDegree {
                expected: 1,
                got: a.degree(),
            });
        }
        let mut s = 0.0;
        for (set, c) in a.terms() {
            let i = set.indices()[0];
            s += c * self.comps[i];
        }
        Ok(s)
    }
}

/// Metric data at a point: the coefficients of g in the active coframe
/// (so g = sum g_ij theta^i theta^j), with the inverse cached for the
/// musical isomorphisms and form inner products.
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    coeffs: [[f64; DIM]; DIM],
    inverse: [[f64; DIM]; DIM],
    sqrt_det: f64,
}

impl MetricAtPoint {
    /// Checks symmetry and positive definiteness (Cholesky). Degenerate
    /// input is rejected, never regularized.
    pub fn new(coeffs: [[f64; DIM]; DIM]) -> Result<MetricAtPoint> {
        let mut scale = 0.0f64;
        for row in &coeffs {
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::NonSymmetricMetric);
                }
                scale = scale.max(v.abs());
            }
        }
        for i in 0..DIM {
            for j in i + 1..DIM {
                if (coeffs[i][j] - coeffs[j][i]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::NonSymmetricMetric);
                }
            }
        }
        let flat: Vec<f64> = coeffs.iter().flatten().copied().collect();
        let l = linalg::cholesky(DIM, &flat)?;
        let sqrt_det: f64 = (0..DIM).map(|i| l[i * DIM + i]).product();
        let inv = linalg::invert(DIM, &flat).map_err(|_| Error::NotPositiveDefinite)?;
        let mut inverse = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                inverse[i][j] = inv[i * DIM + j];
            }
        }
        Ok(MetricAtPoint {
            coeffs,
            inverse,
            sqrt_det,
        })
    }

    pub fn diagonal(entries: &[f64; DIM]) -> Result<MetricAtPoint> {
        let mut coeffs = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            coeffs[i][i] = entries[i];
        }
        MetricAtPoint::new(coeffs)
    }

    pub fn identity() -> MetricAtPoint {
        MetricAtPoint::diagonal(&[1.0; DIM]).expect("identity is positive definite")
    }

    pub fn coeffs(&self) -> &[[f64; DIM]; DIM] {
        &self.coeffs
    }

    pub fn inverse(&self) -> &[[f64; DIM]; DIM] {
        &self.inverse
    }

    pub fn sqrt_det(&self) -> f64 {
        self.sqrt_det
    }

    /// Inner product of tangent vectors.
    pub fn vector_inner(&self, u: &TangentVector, v: &TangentVector) -> f64 {
        let mut s = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                s += self.coeffs[i][j] * u.comps[i] * v.comps[j];
            }
        }
        s
    }

    pub fn vector_norm(&self, u: &TangentVector) -> f64 {
        self.vector_inner(u, u).max(0.0).sqrt()
    }
}

/// Interior product v -| a. The degree drops by one.
pub fn interior_product(v: &TangentVector, a: &KForm) -> Result<KForm> {
    if a.degree() == 0 {
        return Err(Error::ZeroDegreeContraction);
    }
    let mut out = KForm::zero(a.degree() - 1)?;
    for (set, c) in a.terms() {
        let mask = set.mask();
        let mut below = 0u32;
        for i in 0..DIM {
            let bit = 1u8 << i;
            if mask & bit == 0 {
                continue;
            }
            let vi = v.comps[i];
            if vi != 0.0 {
                let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
                let rest = IndexSet(mask & !bit);
                out.insert(rest, out.get(rest) + sign * vi * c);
            }
            below += 1;
        }
    }
    Ok(out)
}

/// Musical flat: lowers a tangent vector to a 1-form with the metric.
pub fn flat(v: &TangentVector, g: &MetricAtPoint) -> KForm {
    let m = g.coeffs();
    let mut coeffs = [0.0; DIM];
    for (i, ci) in coeffs.iter_mut().enumerate() {
        for j in 0..DIM {
            *ci += m[i][j] * v.comps[j];
        }
    }
    KForm::one_form(&coeffs)
}

/// Musical sharp: raises a 1-form to a tangent vector.
pub fn sharp(a: &KForm, g: &MetricAtPoint) -> Result<TangentVector> {
    if a.degree() != 1 {
        return Err(Error::WrongDegree {
            expected: 1,
            got: a.degree(),
        });
    }
    let w = g.inverse();
    let mut comps = [0.0; DIM];
    for (set, c) in a.terms() {
        let j = set.indices()[0];
        for (i, ci) in comps.iter_mut().enumerate() {
            *ci += w[i][j] * c;
        }
    }
    Ok(TangentVector { comps })
}

/// Hodge star with respect to `g` and the given orientation, which must be
/// the metric volume form (unit norm is enforced).
pub fn hodge_star(a: &KForm, g: &MetricAtPoint, orientation: &KForm) -> Result<KForm> {
    if orientation.degree() != DIM {
        return Err(Error::WrongDegree {
            expected: DIM,
            got: orientation.degree(),
        });
    }
    let rho = orientation.coeff(&[0, 1, 2, 3, 4, 5, 6, 7]);
    // |vol|^2 = rho^2 / det(g); unit norm pins |rho| = sqrt(det g)
    let unit = rho / g.sqrt_det();
    if (unit.abs() - 1.0).abs() > 1e-8 {
        return Err(Error::NonUnitOrientation);
    }
    let k = a.degree();
    let mut out = KForm::zero(DIM - k)?;
    // theta^I wedge (star a) = <theta^I, a> vol  for every increasing I
    for mask in 0u16..256 {
        let set = IndexSet(mask as u8);
        if set.degree() != k {
            continue;
        }
        let probe = basis_monomial(set);
        let ip = probe.inner(a, g)?;
        if ip == 0.0 {
            continue;
        }
        let comp = set.complement();
        let sign = merge_sign(set.mask(), comp.mask());
        out.insert(comp, out.get(comp) + sign * rho * ip);
    }
    Ok(out)
}

fn basis_monomial(set: IndexSet) -> KForm {
    let mut f = KForm {
        degree: set.degree(),
        coeffs: BTreeMap::new(),
    };
    f.insert(set, 1.0);
    f
}

/// Numeric exterior derivative in a coordinate basis: the field maps a
/// coordinate tuple to a form whose coefficients are taken over the
/// coordinate differentials themselves. Central differences with a step
/// scaled per coordinate.
pub fn numeric_exterior_derivative<F>(field: F, x: &[f64; DIM], step: f64) -> Result<KForm>
where
    F: Fn(&[f64; DIM]) -> Result<KForm>,
{
    let base_degree = field(x)?.degree();
    if base_degree >= DIM {
        return KForm::zero(DIM);
    }
    let mut out = KForm::zero(base_degree + 1)?;
    for j in 0..DIM {
        let h = step * x[j].abs().max(1.0);
        let mut xp = *x;
        xp[j] += h;
        let mut xm = *x;
        xm[j] -= h;
        let fp = field(&xp)?;
        let fm = field(&xm)?;
        let deriv = fp.sub(&fm)?.scale(1.0 / (2.0 * h));
        let dxj = KForm::basis_one_form(j);
        out = out.add(&dxj.wedge(&deriv)?)?;
    }
    Ok(out)
}
