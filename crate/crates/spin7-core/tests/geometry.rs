//! Structure-pack construction checks: duality, metric diagonalization,
//! closed-form cross-checks of Phi_c, volume consistency, torsion
//! freeness and self-duality at sampled chart points.

mod support;

use spin7_core::fibration::so3::ode_rhs_so3;
use spin7_core::form::KForm;
use spin7_core::geometry::so3::{
    dxi_closed_form, exterior_derivative_so3, phi_diagonalizing_closed_form,
};
use spin7_core::geometry::sp1::phi_closed_form;
use spin7_core::geometry::{
    build_so3_pack, build_sp1_pack, d_of_constant_probe, multi_moment_fibre, pairing_defect,
    self_duality_residual, verify_torsion_free, ChartKind, ChartPointSO3, ChartPointSp1, So3Basis,
};
use spin7_core::rng::SplitMix64;

const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

fn max_coeff_diff(a: &KForm, b: &KForm) -> f64 {
    a.sub(b).unwrap().max_abs_coeff()
}

#[test]
fn so3_pack_duality_and_volume_both_bases() {
    let mut rng = SplitMix64::new(11);
    for _ in 0..50 {
        let p = ChartPointSO3::sample(&mut rng, 1.0);
        for basis in [So3Basis::Adapted, So3Basis::Diagonalizing] {
            let pack = build_so3_pack(&p, basis).unwrap();
            assert!(pairing_defect(&pack).unwrap() < 1e-12, "{basis:?}");
            assert!(pack.volume_defect() < 1e-10, "{basis:?}");
        }
    }
}

#[test]
fn sp1_pack_duality_and_volume() {
    let mut rng = SplitMix64::new(12);
    for _ in 0..50 {
        let p = ChartPointSp1::sample(&mut rng, 0.7);
        let pack = build_sp1_pack(&p).unwrap();
        assert!(pairing_defect(&pack).unwrap() < 1e-12);
        assert!(pack.volume_defect() < 1e-10);
    }
}

#[test]
fn diagonalizing_gram_is_exactly_diagonal() {
    let mut rng = SplitMix64::new(13);
    for _ in 0..100 {
        let p = ChartPointSO3::sample(&mut rng, 2.5);
        let pack = build_so3_pack(&p, So3Basis::Diagonalizing).unwrap();
        let m = pack.metric.coeffs();
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert_eq!(m[i][j], 0.0);
                }
            }
        }
        // documented diagonal: 5F(1, sin^2, cos^2, cos^2), 4G(1, 1, 1/4, 1/4)
        let u = p.c + p.r2();
        let f5 = 5.0 * u.powf(0.6);
        let g4 = 4.0 * u.powf(-0.4);
        let (sa2, ca2) = (p.alpha.sin().powi(2), p.alpha.cos().powi(2));
        let expect = [f5, f5 * sa2, f5 * ca2, f5 * ca2, g4, g4, g4 / 4.0, g4 / 4.0];
        for i in 0..8 {
            assert!((m[i][i] - expect[i]).abs() < 1e-12 * expect[i].abs());
        }
    }
}

#[test]
fn both_bases_pull_back_to_the_same_coordinate_metric() {
    // C^T M C over coordinate differentials must agree between bases
    let mut rng = SplitMix64::new(14);
    for _ in 0..20 {
        let p = ChartPointSO3::sample(&mut rng, 1.3);
        let x = p.coords();
        let mut pulled = [[[0.0f64; 8]; 8]; 2];
        for (slot, basis) in [So3Basis::Adapted, So3Basis::Diagonalizing]
            .into_iter()
            .enumerate()
        {
            let rows = spin7_core::geometry::so3::coframe_rows(&x, basis);
            let m = spin7_core::geometry::so3::gram(&x, p.c, basis);
            for a in 0..8 {
                for b in 0..8 {
                    let mut s = 0.0;
                    for i in 0..8 {
                        for j in 0..8 {
                            s += rows[i][a] * m[i][j] * rows[j][b];
                        }
                    }
                    pulled[slot][a][b] = s;
                }
            }
        }
        let scale = pulled[0]
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        for a in 0..8 {
            for b in 0..8 {
                assert!(
                    (pulled[0][a][b] - pulled[1][a][b]).abs() < 1e-11 * scale,
                    "coordinate metrics disagree at ({a},{b})"
                );
            }
        }
    }
}

#[test]
fn so3_phi_matches_diagonalizing_closed_form() {
    let mut rng = SplitMix64::new(15);
    for _ in 0..30 {
        let p = ChartPointSO3::sample(&mut rng, 1.0);
        let pack = build_so3_pack(&p, So3Basis::Diagonalizing).unwrap();
        let closed = phi_diagonalizing_closed_form(&p).unwrap();
        let scale = closed.max_abs_coeff();
        assert!(
            max_coeff_diff(&pack.phi, &closed) < 1e-10 * scale,
            "generic Phi_c disagrees with the closed form"
        );
    }
}

#[test]
fn sp1_phi_matches_closed_form() {
    let mut rng = SplitMix64::new(16);
    for _ in 0..30 {
        let p = ChartPointSp1::sample(&mut rng, 1.0);
        let pack = build_sp1_pack(&p).unwrap();
        let closed = phi_closed_form(&p).unwrap();
        let scale = closed.max_abs_coeff();
        assert!(max_coeff_diff(&pack.phi, &closed) < 1e-10 * scale);
    }
}

#[test]
fn so3_omega1_and_a1_have_the_reference_shape() {
    let mut rng = SplitMix64::new(17);
    let p = ChartPointSO3::sample(&mut rng, 0.8);
    // adapted basis (sigma1, sigma2, sigma3, dalpha, dbeta, ds, dt, ddelta):
    // Omega1 = sin a  dalpha ^ dbeta + cos^2 a  sigma2 ^ sigma3
    let pack = build_so3_pack(&p, So3Basis::Adapted).unwrap();
    let om1 = &pack.omega_cap[0];
    assert!((om1.coeff(&[3, 4]) - p.alpha.sin()).abs() < 1e-12);
    assert!((om1.coeff(&[1, 2]) - p.alpha.cos().powi(2)).abs() < 1e-12);
    let stray: f64 = om1
        .terms()
        .filter(|(s, _)| {
            *s != spin7_core::IndexSet::new(&[3, 4]).unwrap()
                && *s != spin7_core::IndexSet::new(&[1, 2]).unwrap()
        })
        .map(|(_, c)| c.abs())
        .fold(0.0, f64::max);
    assert!(stray < 1e-12);
    // diagonalizing basis: A1 = (ds~ ^ omega1 - dt~ ^ omega2)/2
    let pack = build_so3_pack(&p, So3Basis::Diagonalizing).unwrap();
    let a1 = &pack.a_cap[0];
    assert!((a1.coeff(&[4, 6]) - 0.5).abs() < 1e-12);
    assert!((a1.coeff(&[5, 7]) + 0.5).abs() < 1e-12);
}

#[test]
fn phi_wedge_phi_matches_the_flat_model_constant() {
    // the normalization constant is pinned by the flat model, where the
    // wedge is a finite combinatorial computation
    let flat = spin7_core::cayley::flat_pack();
    let top = flat.phi.wedge(&flat.phi).unwrap();
    let constant =
        top.coeff(&[0, 1, 2, 3, 4, 5, 6, 7]) / flat.volume.coeff(&[0, 1, 2, 3, 4, 5, 6, 7]);
    assert_eq!(constant, 14.0);
    let mut rng = SplitMix64::new(18);
    for c in [0.0, 1.0] {
        let p = ChartPointSO3::sample(&mut rng, c);
        let pack = build_so3_pack(&p, So3Basis::Diagonalizing).unwrap();
        let top = pack.phi.wedge(&pack.phi).unwrap();
        let ratio =
            top.coeff(&[0, 1, 2, 3, 4, 5, 6, 7]) / pack.volume.coeff(&[0, 1, 2, 3, 4, 5, 6, 7]);
        assert!((ratio - constant).abs() < 1e-9, "got {ratio}");
        let q = ChartPointSp1::sample(&mut rng, c);
        let pack = build_sp1_pack(&q).unwrap();
        let top = pack.phi.wedge(&pack.phi).unwrap();
        let ratio =
            top.coeff(&[0, 1, 2, 3, 4, 5, 6, 7]) / pack.volume.coeff(&[0, 1, 2, 3, 4, 5, 6, 7]);
        assert!((ratio - constant).abs() < 1e-9, "got {ratio}");
    }
}

#[test]
fn hodge_star_of_the_volume_is_one_on_real_packs() {
    let mut rng = SplitMix64::new(23);
    let p = ChartPointSO3::sample(&mut rng, 1.5);
    for basis in [So3Basis::Adapted, So3Basis::Diagonalizing] {
        let pack = build_so3_pack(&p, basis).unwrap();
        let star = spin7_core::hodge_star(&pack.volume, &pack.metric, &pack.volume).unwrap();
        assert!((star.coeff(&[]) - 1.0).abs() < 1e-12, "{basis:?}");
        let back =
            spin7_core::hodge_star(&spin7_core::KForm::scalar(1.0), &pack.metric, &pack.volume)
                .unwrap();
        assert!(back.sub(&pack.volume).unwrap().max_abs_coeff() < 1e-12 * pack.metric.sqrt_det());
    }
    let q = ChartPointSp1::sample(&mut rng, 0.5);
    let pack = build_sp1_pack(&q).unwrap();
    let star = spin7_core::hodge_star(&pack.volume, &pack.metric, &pack.volume).unwrap();
    assert!((star.coeff(&[]) - 1.0).abs() < 1e-12);
}

#[test]
fn self_duality_at_sampled_points() {
    let mut rng = SplitMix64::new(19);
    for c in [0.0, 1.0, 2.5] {
        for _ in 0..10 {
            let p = ChartPointSO3::sample(&mut rng, c);
            let pack = build_so3_pack(&p, So3Basis::Diagonalizing).unwrap();
            assert!(self_duality_residual(&pack).unwrap() < 1e-8);
            let q = ChartPointSp1::sample(&mut rng, c);
            let pack = build_sp1_pack(&q).unwrap();
            assert!(self_duality_residual(&pack).unwrap() < 1e-8);
        }
    }
}

#[test]
fn torsion_free_smoke_both_charts() {
    // small sample here; the acceptance suite runs the full 200-point sweep
    for chart in [ChartKind::So3, ChartKind::Sp1] {
        let report = verify_torsion_free(chart, 1.0, 10, 1e-5, 42).unwrap();
        assert!(
            report.max_abs_coeff < 1e-6,
            "{chart:?}: {}",
            report.max_abs_coeff
        );
    }
}

#[test]
fn d_of_constant_form_is_exactly_zero() {
    for chart in [ChartKind::So3, ChartKind::Sp1] {
        assert_eq!(d_of_constant_probe(chart, 1.0, 5).unwrap(), 0.0);
    }
}

#[test]
fn numeric_dxi_matches_structure_equations() {
    let mut rng = SplitMix64::new(20);
    for _ in 0..5 {
        let p = ChartPointSO3::sample(&mut rng, 1.0);
        let closed = dxi_closed_form(&p).unwrap();
        for i in 0..4 {
            let d = exterior_derivative_so3(
                |q: &ChartPointSO3| {
                    let raw = spin7_core::geometry::so3::xi_one_forms(&q.coords());
                    Ok(raw[i].clone())
                },
                &p,
                1e-6,
            )
            .unwrap();
            assert!(
                max_coeff_diff(&d, &closed[i]) < 1e-6,
                "d xi_{i} mismatch: {}",
                max_coeff_diff(&d, &closed[i])
            );
        }
    }
}

#[test]
fn exterior_derivative_rejects_boundary_stencils() {
    let p = ChartPointSO3 {
        alpha: 1e-7,
        beta: 0.3,
        theta: 1.0,
        phi: 0.2,
        s: 0.5,
        t: 0.5,
        delta: 0.1,
        gamma: 0.4,
        c: 1.0,
    };
    let err = exterior_derivative_so3(|q: &ChartPointSO3| Ok(KForm::scalar(q.alpha)), &p, 1e-5);
    assert!(err.is_err());
    let q = ChartPointSp1 {
        alpha: FRAC_PI_2 - 1e-8,
        gamma: [0.1, 1.0, 0.2],
        a: [1.0, 0.0, 0.0, 0.0],
        c: 1.0,
    };
    let err = spin7_core::geometry::exterior_derivative_sp1(
        |p: &ChartPointSp1| Ok(KForm::scalar(p.alpha)),
        &q,
        1e-5,
    );
    assert!(err.is_err());
}

#[test]
fn multi_moment_fibre_values() {
    // zero section: exact cancellation
    assert_eq!(multi_moment_fibre(0.0, 1.0).unwrap(), 0.0);
    // r^2 = 5c kills the first term
    let v = multi_moment_fibre(5.0f64.sqrt(), 1.0).unwrap();
    assert!((v - 100.0 / 3.0).abs() < 1e-12);
    // conical case, direct evaluation
    let v = multi_moment_fibre(2.0, 0.0).unwrap();
    assert!((v - 20.0 / 3.0 * 4.0 * 4.0f64.powf(0.2)).abs() < 1e-12);
    // monotone nondecreasing in r
    let mut prev = 0.0;
    for i in 0..100 {
        let r = i as f64 * 0.05;
        let val = multi_moment_fibre(r, 1.0).unwrap();
        assert!(val >= prev - 1e-12);
        prev = val;
    }
    assert!(multi_moment_fibre(-1.0, 1.0).is_err());
    assert!(multi_moment_fibre(1.0, -0.5).is_err());
}

#[test]
fn sp1_xi0_coefficients_are_exact() {
    let mut rng = SplitMix64::new(21);
    for _ in 0..20 {
        let p = ChartPointSp1::sample(&mut rng, 0.5);
        let pack = build_sp1_pack(&p).unwrap();
        // xi0 = da0 + l(a1 sigma1 + a2 sigma2 + a3 sigma3) over coordinates
        let l = p.l();
        let x = p.coords();
        let xi0 = &pack.coframe[4];
        // da0 coefficient
        assert_eq!(xi0.coeff(&[4]), 1.0);
        // dg1 coefficient: l a1 / 2 (sigma1 carries 1/2 dg1)
        assert_eq!(xi0.coeff(&[1]), l * p.a[1] * 0.5);
        // dg2: l (a2 cos g1 + a3 sin g1)/2
        let want = l * (p.a[2] * x[1].cos() + p.a[3] * x[1].sin()) * 0.5;
        assert!((xi0.coeff(&[2]) - want).abs() < 1e-15);
    }
}

#[test]
fn sp1_l_vanishes_at_the_pi_half_limit() {
    let p = ChartPointSp1 {
        alpha: FRAC_PI_2 - 1e-9,
        gamma: [0.3, 1.2, 0.4],
        a: [1.0, 0.0, 0.0, 0.0],
        c: 1.0,
    };
    assert!(p.l().abs() < 1e-12);
}

#[test]
fn chart_validation_errors() {
    assert!(ChartPointSO3::new(0.0, 0.0, 1.0, 0.0, 0.5, 0.5, 0.0, 0.0, 1.0).is_err());
    assert!(ChartPointSO3::new(0.5, 0.0, 1.0, 0.0, -0.5, 0.5, 0.0, 0.0, 1.0).is_err());
    assert!(ChartPointSO3::new(0.5, 0.0, 1.0, 0.0, 0.5, 0.5, 0.0, 0.0, -1.0).is_err());
    assert!(ChartPointSp1::new(FRAC_PI_2, [0.1, 1.0, 0.2], [1.0, 0.0, 0.0, 0.0], 1.0).is_err());
    assert!(ChartPointSp1::new(0.3, [0.1, 1.0, 0.2], [0.0; 4], 1.0).is_err());
}

#[test]
fn ode_rhs_is_exposed_for_the_cli() {
    // smoke coupling check: the fibration rhs accepts a chart state
    let v = ode_rhs_so3(&[0.7, 0.1, 0.5, 0.6, 0.2], 1.0).unwrap();
    assert!((v[0] * v[0]).is_finite());
}
