//! Shared fixtures for the micro-benchmarks.

use uldpack::{Instance, Uld};

/// A mid-size single-container instance in the classic distribution.
pub fn single_container_fixture(seed: u64, types: usize) -> Instance {
    let br = uldpack::synth::br_like_instance(seed, 1, types);
    uldpack::io::br_to_instance(&br, format!("bench-{types}"))
}

/// The contoured container used by the projection benchmarks.
pub fn contoured_uld() -> Uld {
    uldpack::synth::b777_uld_types()
        .into_iter()
        .find(|t| t.uld.critical_plane().is_some())
        .expect("shape set contains an upper-cut ULD")
        .uld
}
