//! The named norms used by the test suites and the command line.

use crate::error::Result;
use crate::norm::{Norm2D, NormSpec};
use crate::param::NaturalCurve;
use crate::vector::LinearMap2x2;

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub spec: NormSpec,
}

impl Fixture {
    pub fn norm(&self) -> Result<Norm2D> {
        Norm2D::new(self.spec.clone())
    }

    /// Natural curve in the default basis of the norm.
    pub fn curve(&self) -> Result<NaturalCurve> {
        NaturalCurve::for_norm(self.norm()?)
    }
}

pub const LENS_BETAS: [f64; 5] = [0.0, 0.1, -0.1, 0.2, -0.2];

fn lens_name(beta: f64) -> &'static str {
    match beta {
        0.0 => "lens0",
        0.1 => "lens0.1",
        -0.1 => "lens-0.1",
        0.2 => "lens0.2",
        -0.2 => "lens-0.2",
        _ => "lens",
    }
}

pub fn lens(beta: f64) -> Fixture {
    Fixture {
        name: lens_name(beta),
        spec: NormSpec::Lens { beta },
    }
}

pub fn euclid() -> Fixture {
    Fixture {
        name: "euclid",
        spec: NormSpec::PNorm { p: 2.0 },
    }
}

pub fn l1() -> Fixture {
    Fixture {
        name: "l1",
        spec: NormSpec::l1_square(),
    }
}

pub fn hexagon() -> Fixture {
    Fixture {
        name: "hexagon",
        spec: NormSpec::regular_polygon(3),
    }
}

pub fn pnorm4() -> Fixture {
    Fixture {
        name: "pnorm4",
        spec: NormSpec::PNorm { p: 4.0 },
    }
}

pub fn double_lens() -> Fixture {
    Fixture {
        name: "double_lens",
        spec: NormSpec::DoubleLens,
    }
}

/// `lens(0.2)` under `[[2, 1], [0, 1]]`.
pub fn sheared_lens() -> Fixture {
    Fixture {
        name: "sheared_lens0.2",
        spec: NormSpec::transform(
            NormSpec::Lens { beta: 0.2 },
            LinearMap2x2::new(2.0, 1.0, 0.0, 1.0),
        ),
    }
}

pub fn lenses() -> Vec<Fixture> {
    LENS_BETAS.iter().map(|&b| lens(b)).collect()
}

/// Every fixture, smooth ones first.
pub fn all() -> Vec<Fixture> {
    let mut v = vec![euclid(), pnorm4(), l1(), hexagon()];
    v.extend(lenses());
    v.push(double_lens());
    v.push(sheared_lens());
    v
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}
