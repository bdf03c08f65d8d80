//! Small named inputs used by tests, benches and the command line.
use crate::graded::GradedVectorSpace;
use crate::algebra::Elem;
use crate::linfty::{DgLie, LInfty};
use crate::sym::SymWord;
use crate::scalar::q;

fn lie(basis: &[(&str, i64)], bracket: &[(&str, &str, &str, i64)]) -> DgLie {
    let space = GradedVectorSpace::new(basis.iter().copied()).expect("fixture basis");
    let br: Vec<_> = bracket.iter().map(|(a, b, c, k)| (*a, *b, *c, q(*k))).collect();
    DgLie::from_labels(space, &[], &br, true).expect("fixture is a Lie algebra")
}

/// The abelian Lie algebra on `a, b`.
pub fn abelian2() -> DgLie {
    lie(&[("a", 0), ("b", 0)], &[])
}

/// The Heisenberg algebra, `[x, y] = z`.
pub fn heis3() -> DgLie {
    lie(&[("x", 0), ("y", 0), ("z", 0)], &[("x", "y", "z", 1)])
}

/// The affine line algebra, `[x, y] = y`.
pub fn aff2() -> DgLie {
    lie(&[("x", 0), ("y", 0)], &[("x", "y", "y", 1)])
}

/// `sl_2` in the basis `e, f, h`.
pub fn sl2() -> DgLie {
    lie(
        &[("e", 0), ("f", 0), ("h", 0)],
        &[("h", "e", "e", 2), ("h", "f", "f", -2), ("e", "f", "h", 1)],
    )
}

/// Looks a fixture up by name.
pub fn lie_by_name(name: &str) -> Option<DgLie> {
    match name {
        "abelian2" => Some(abelian2()),
        "heis3" => Some(heis3()),
        "aff2" => Some(aff2()),
        "sl2" => Some(sl2()),
        _ => None,
    }
}

pub const LIE_NAMES: [&str; 4] = ["abelian2", "heis3", "aff2", "sl2"];

/// A graded dg-Lie algebra: `u(-1), v(0), w(1), z(0)`, `du = v`, `[u, w] = z`.
pub fn graded_dg_lie() -> DgLie {
    DgLie::from_labels(
        GradedVectorSpace::new([("u", -1), ("v", 0), ("w", 1), ("z", 0)]).expect("fixture basis"),
        &[("u", "v", q(1))],
        &[("u", "w", "z", q(1))],
        true,
    )
    .expect("fixture is a dg-Lie algebra")
}

/// `x(1), c(1), y(2)` with `dc = y` and `[x, x] = y`. Over `k[t]/(t³)`,
/// `x t - ½ c t²` is Maurer–Cartan.
pub fn mc_dg_lie() -> DgLie {
    DgLie::from_labels(
        GradedVectorSpace::new([("x", 1), ("c", 1), ("y", 2)]).expect("fixture basis"),
        &[("c", "y", q(1))],
        &[("x", "x", "y", q(1))],
        true,
    )
    .expect("fixture is a dg-Lie algebra")
}

/// `x(1), y(2)` with `[x, x] = y` and no differential: the seed `x t` does not
/// lift to second order.
pub fn obstructed_dg_lie() -> DgLie {
    DgLie::from_labels(
        GradedVectorSpace::new([("x", 1), ("y", 2)]).expect("fixture basis"),
        &[],
        &[("x", "x", "y", q(1))],
        true,
    )
    .expect("fixture is a dg-Lie algebra")
}

/// `heis3` with an added ternary bracket `l_3(x, y, z) = w`, `|w| = -1`.
pub fn heis3_l3() -> LInfty {
    let space = GradedVectorSpace::new([("x", 0), ("y", 0), ("z", 0), ("w", -1)]).expect("fixture basis");
    let base = LInfty::from_dg_lie(&DgLie::unchecked(space.clone(), &[], &[(0, 1, 2, q(1))]).expect("shapes"));
    let alg = base.shifted_algebra().clone();
    let mut codiff = base.codifferential().clone();
    codiff
        .add(&alg, &SymWord(vec![0, 1, 2]), &Elem::basis(SymWord(vec![3])))
        .expect("degrees match");
    LInfty::new(space, codiff).expect("fixture is an L∞ algebra")
}
