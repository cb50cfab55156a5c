//! Shared setup helpers for the benchmark targets.

use orbital_core::roots::{build_space, SpaceDescriptor, SpaceFamily};

pub fn plane() -> SpaceDescriptor {
    build_space(SpaceFamily::RealHyperbolic { n: 2 }).expect("descriptor")
}

pub fn three_space() -> SpaceDescriptor {
    build_space(SpaceFamily::RealHyperbolic { n: 3 }).expect("descriptor")
}
