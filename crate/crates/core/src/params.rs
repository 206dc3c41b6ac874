use crate::{C64, CMatrix2};

/// The constant signature matrices of an NLS vessel.
///
/// `sigma1` is the identity, `sigma2 = diag(1, -1)/2` and `gamma = 0`; other
/// choices of this triple produce vessels for different integrable equations
/// and are out of scope here.
#[derive(Debug, Clone, PartialEq)]
pub struct VesselParams {
    pub sigma1: CMatrix2,
    pub sigma2: CMatrix2,
    pub gamma: CMatrix2,
}

/// The NLS parameter triple `(I, diag(1,-1)/2, 0)`.
pub fn make_params() -> VesselParams {
    VesselParams {
        sigma1: CMatrix2::identity(),
        sigma2: sigma2(),
        gamma: CMatrix2::zeros(),
    }
}

/// `sigma2 = diag(1, -1) / 2`.
pub fn sigma2() -> CMatrix2 {
    let half = C64::new(0.5, 0.0);
    CMatrix2::new(half, C64::ZERO, C64::ZERO, -half)
}
