//! The verification suites behind `spin7 verify`: structure-equation and
//! projection checks sampled over chart points, with one max residual and
//! one pass/fail per suite, plus informational diagnostics.

use spin7_core::cayley::{lambda_basis, pi7, pi7_rank};
use spin7_core::fibration::so3::moment_contraction_ratio_so3;
use spin7_core::fibration::sp1::moment_contraction_ratio_sp1;
use spin7_core::form::KForm;
use spin7_core::geometry::{
    build_so3_pack, build_sp1_pack, closure_residual_so3, closure_residual_sp1, pairing_defect,
    self_duality_residual, ChartKind, ChartPointSO3, ChartPointSp1, So3Basis, StructurePack,
};
use spin7_core::rng::SplitMix64;
use spin7_core::Result;

use crate::export::fmt_f64;
use crate::pool::map_ordered;

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub suites: Vec<SuiteResult>,
    /// Informational diagnostics (no pass/fail semantics).
    pub info: Vec<(String, String)>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.suites.iter().all(|s| s.pass)
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n  \"suites\": [\n");
        for (i, s) in self.suites.iter().enumerate() {
            out.push_str(&format!(
                "    {{\"name\": \"{}\", \"max_residual\": {}, \"tolerance\": {}, \"pass\": {}}}{}\n",
                s.name,
                fmt_f64(s.max_residual),
                fmt_f64(s.tolerance),
                s.pass,
                if i + 1 < self.suites.len() { "," } else { "" }
            ));
        }
        out.push_str("  ],\n  \"info\": {\n");
        for (i, (k, v)) in self.info.iter().enumerate() {
            out.push_str(&format!(
                "    \"{k}\": \"{v}\"{}\n",
                if i + 1 < self.info.len() { "," } else { "" }
            ));
        }
        out.push_str(&format!("  }},\n  \"pass\": {}\n}}\n", self.pass()));
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!(
                "{:<22} max residual {:>12.3e}  tol {:>8.0e}  {}\n",
                s.name,
                s.max_residual,
                s.tolerance,
                if s.pass { "pass" } else { "FAIL" }
            ));
        }
        for (k, v) in &self.info {
            out.push_str(&format!("{k:<22} {v}\n"));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub charts: Vec<ChartKind>,
    pub c: f64,
    pub points: usize,
    pub fd_step: f64,
    pub seed: u64,
    pub jobs: usize,
    pub tol_dphi: f64,
    pub tol_self_dual: f64,
    pub tol_pi7: f64,
    pub tol_lambda: f64,
    pub tol_duality: f64,
    pub tol_volume: f64,
}

fn random_two_form(rng: &mut SplitMix64) -> KForm {
    let mut f = KForm::zero(2).unwrap();
    for i in 0..8 {
        for j in (i + 1)..8 {
            f = f
                .add(&KForm::monomial(&[i, j], rng.symmetric()).unwrap())
                .unwrap();
        }
    }
    f
}

fn pack_suites(
    chart: ChartKind,
    packs: &[StructurePack],
    seed: u64,
    cfg: &VerifyConfig,
    suites: &mut Vec<SuiteResult>,
) -> Result<()> {
    let label = chart.label();
    let mut worst_sd: f64 = 0.0;
    let mut worst_pair: f64 = 0.0;
    let mut worst_vol: f64 = 0.0;
    let mut worst_pi7: f64 = 0.0;
    let mut worst_rank: f64 = 0.0;
    let mut worst_lambda: f64 = 0.0;
    let mut rng = SplitMix64::new(seed ^ 0xabcd);
    for pack in packs {
        worst_sd = worst_sd.max(self_duality_residual(pack)?);
        worst_pair = worst_pair.max(pairing_defect(pack)?);
        worst_vol = worst_vol.max(pack.volume_defect());
        let probe = random_two_form(&mut rng);
        let once = pi7(&probe, pack)?;
        let twice = pi7(&once, pack)?;
        worst_pi7 = worst_pi7.max(twice.sub(&once)?.max_abs_coeff());
        worst_rank = worst_rank.max((pi7_rank(pack, 0.5)? as f64 - 7.0).abs());
        if chart == ChartKind::So3 {
            for l in lambda_basis(pack)?.iter() {
                let defect = pi7(l, pack)?.sub(l)?.max_abs_coeff() / l.max_abs_coeff().max(1e-300);
                worst_lambda = worst_lambda.max(defect);
            }
        }
    }
    let mut push = |name: String, max_residual: f64, tolerance: f64| {
        suites.push(SuiteResult {
            name,
            max_residual,
            tolerance,
            pass: max_residual < tolerance,
        });
    };
    push(format!("self_dual_{label}"), worst_sd, cfg.tol_self_dual);
    push(format!("duality_{label}"), worst_pair, cfg.tol_duality);
    push(format!("volume_{label}"), worst_vol, cfg.tol_volume);
    push(format!("pi7_idem_{label}"), worst_pi7, cfg.tol_pi7);
    push(format!("pi7_rank_{label}"), worst_rank, 0.5);
    if chart == ChartKind::So3 {
        push("lambda_fixed_so3".to_string(), worst_lambda, cfg.tol_lambda);
    }
    Ok(())
}

pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut suites = Vec::new();
    let mut info = Vec::new();
    for &chart in &cfg.charts {
        let label = chart.label();
        // closure of Phi_c over `points` sampled chart points, fanned out
        // deterministically (sampling is sequential in the seed)
        let worst_dphi = match chart {
            ChartKind::So3 => {
                let mut rng = SplitMix64::new(cfg.seed);
                let pts: Vec<ChartPointSO3> = (0..cfg.points)
                    .map(|_| ChartPointSO3::sample(&mut rng, cfg.c))
                    .collect();
                let residuals =
                    map_ordered(cfg.jobs, &pts, |p| closure_residual_so3(p, cfg.fd_step));
                let mut worst: f64 = 0.0;
                for r in residuals {
                    worst = worst.max(r?);
                }
                worst
            }
            ChartKind::Sp1 => {
                let mut rng = SplitMix64::new(cfg.seed);
                let pts: Vec<ChartPointSp1> = (0..cfg.points)
                    .map(|_| ChartPointSp1::sample(&mut rng, cfg.c))
                    .collect();
                let residuals =
                    map_ordered(cfg.jobs, &pts, |p| closure_residual_sp1(p, cfg.fd_step));
                let mut worst: f64 = 0.0;
                for r in residuals {
                    worst = worst.max(r?);
                }
                worst
            }
        };
        suites.push(SuiteResult {
            name: format!("dphi_{label}"),
            max_residual: worst_dphi,
            tolerance: cfg.tol_dphi,
            pass: worst_dphi < cfg.tol_dphi,
        });

        // the pack-level suites over a smaller sample
        let n = cfg.points.clamp(4, 40);
        match chart {
            ChartKind::So3 => {
                let mut rng = SplitMix64::new(cfg.seed ^ 0x5117);
                let packs: Vec<StructurePack> = (0..n)
                    .map(|_| {
                        build_so3_pack(
                            &ChartPointSO3::sample(&mut rng, cfg.c),
                            So3Basis::Diagonalizing,
                        )
                    })
                    .collect::<Result<_>>()?;
                pack_suites(chart, &packs, cfg.seed, cfg, &mut suites)?;
                let mut rng = SplitMix64::new(cfg.seed ^ 0x77);
                let p = ChartPointSO3::sample(&mut rng, cfg.c);
                let (lo, hi) = moment_contraction_ratio_so3(&p)?;
                info.push((
                    "nu_ratio_so3".to_string(),
                    format!("[{}, {}]", fmt_f64(lo), fmt_f64(hi)),
                ));
            }
            ChartKind::Sp1 => {
                let mut rng = SplitMix64::new(cfg.seed ^ 0x5117);
                let packs: Vec<StructurePack> = (0..n)
                    .map(|_| build_sp1_pack(&ChartPointSp1::sample(&mut rng, cfg.c)))
                    .collect::<Result<_>>()?;
                pack_suites(chart, &packs, cfg.seed, cfg, &mut suites)?;
                let mut rng = SplitMix64::new(cfg.seed ^ 0x77);
                let q = ChartPointSp1::sample(&mut rng, cfg.c);
                let (lo, hi) = moment_contraction_ratio_sp1(&q)?;
                info.push((
                    "nu_ratio_sp1".to_string(),
                    format!("[{}, {}]", fmt_f64(lo), fmt_f64(hi)),
                ));
            }
        }
    }
    Ok(VerifyReport { suites, info })
}
