use rand::Rng;

use super::report::BoundReport;
use crate::error::{Error, Result};
use crate::qcore::{haar_unitary, CMat, UnitaryOp, C64};

/// `Tr[P U (Π/k) U† P]` for `Π`, `P` the projectors onto the column spans of the
/// isometries `initial` (`k` columns) and `fin`.
pub fn mapped_weight(initial: &CMat, fin: &CMat, u: &UnitaryOp) -> f64 {
    let k = initial.ncols() as f64;
    (fin.adjoint() * u.matrix() * initial).norm_squared() / k
}

fn random_isometry<R: Rng + ?Sized>(ambient: usize, k: usize, rng: &mut R) -> CMat {
    haar_unitary(ambient, rng).into_matrix().columns(0, k).into_owned()
}

/// Totally mixed state on a random `d_initial`-dimensional subspace, mapped by `u` and
/// projected on a random `d_final`-dimensional subspace; worst case over `trials`.
pub fn rank_bound_check<R: Rng + ?Sized>(
    d_initial: usize,
    d_final: usize,
    u: &UnitaryOp,
    trials: usize,
    rng: &mut R,
) -> Result<BoundReport> {
    let ambient = u.dim();
    if d_initial == 0 || d_initial > ambient || d_final > ambient {
        return Err(Error::dims(format!(
            "subspaces of dimension {d_initial} and {d_final} in ambient {ambient}"
        )));
    }
    let mut measured: f64 = 0.0;
    for _ in 0..trials {
        let a = random_isometry(ambient, d_initial, rng);
        let b = random_isometry(ambient, d_final, rng);
        measured = measured.max(mapped_weight(&a, &b, u));
    }
    Ok(rank_report(measured, d_initial, d_final, ambient).param("trials", trials))
}

/// `U = I` with the final subspace inside the initial one (or containing it): the bound
/// `min(1, d_final/d_initial)` is attained.
pub fn rank_saturation(ambient: usize, d_initial: usize, d_final: usize) -> Result<BoundReport> {
    if d_initial == 0 || d_initial > ambient || d_final > ambient {
        return Err(Error::dims(format!(
            "subspaces of dimension {d_initial} and {d_final} in ambient {ambient}"
        )));
    }
    let basis = |k: usize| {
        CMat::from_fn(
            ambient,
            k,
            |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) },
        )
    };
    let measured = mapped_weight(&basis(d_initial), &basis(d_final), &UnitaryOp::identity(ambient));
    Ok(rank_report(measured, d_initial, d_final, ambient).param("saturation", true))
}

fn rank_report(measured: f64, d_initial: usize, d_final: usize, ambient: usize) -> BoundReport {
    BoundReport::new("rank", measured, d_final as f64 / d_initial as f64)
        .clamped(1.0)
        .param("D_initial", d_initial)
        .param("D_final", d_final)
        .param("ambient", ambient)
}
