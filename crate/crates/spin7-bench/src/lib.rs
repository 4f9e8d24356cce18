//! Shared fixtures for the benchmark targets.

use spin7_core::geometry::{build_so3_pack, ChartPointSO3, So3Basis, StructurePack};
use spin7_core::rng::SplitMix64;

/// A representative interior chart point.
pub fn bench_point(c: f64) -> ChartPointSO3 {
    let mut rng = SplitMix64::new(99);
    ChartPointSO3::sample(&mut rng, c)
}

pub fn bench_pack(c: f64) -> StructurePack {
    build_so3_pack(&bench_point(c), So3Basis::Diagonalizing).expect("interior point")
}
