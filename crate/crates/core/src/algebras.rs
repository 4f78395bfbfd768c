//! Built-in test algebras.

use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{AlgebraSpec, GradedLieAlgebra, Rational};

fn r(n: i128) -> Rational {
    Rational::from_integer(n)
}

fn build(spec: AlgebraSpec) -> GradedLieAlgebra {
    GradedLieAlgebra::from_spec(&spec).expect("built-in algebra is valid")
}

/// Heisenberg algebra `h^m`: `[X_j, X_{m+j}] = X_{2m+1}`.
pub fn heisenberg_spec(m: usize) -> AlgebraSpec {
    let n = 2 * m + 1;
    let mut exponents = vec![r(1); 2 * m];
    exponents.push(r(2));
    let mut layers = vec![1; 2 * m];
    layers.push(2);
    let brackets = (1..=m).map(|j| (j, m + j, n, r(1))).collect();
    AlgebraSpec {
        dim: n,
        exponents,
        layers,
        brackets,
    }
}

pub fn heisenberg(m: usize) -> GradedLieAlgebra {
    build(heisenberg_spec(m))
}

/// One-layer abelian algebra of dimension `n`.
pub fn abelian(n: usize) -> GradedLieAlgebra {
    build(AlgebraSpec {
        dim: n,
        exponents: vec![r(1); n],
        layers: vec![1; n],
        brackets: vec![],
    })
}

/// Abelian `R^2` graded with weights 1 and 2; graded but not stratified.
pub fn abelian_two_layer() -> GradedLieAlgebra {
    build(AlgebraSpec {
        dim: 2,
        exponents: vec![r(1), r(2)],
        layers: vec![1, 2],
        brackets: vec![],
    })
}

/// Free step-2 nilpotent algebra on `g` generators.
pub fn free_step2_spec(g: usize) -> AlgebraSpec {
    let mut brackets = Vec::new();
    let mut k = g;
    for i in 1..=g {
        for j in (i + 1)..=g {
            k += 1;
            brackets.push((i, j, k, r(1)));
        }
    }
    let mut exponents = vec![r(1); g];
    exponents.extend(core::iter::repeat(r(2)).take(k - g));
    let mut layers = vec![1; g];
    layers.extend(core::iter::repeat(2).take(k - g));
    AlgebraSpec {
        dim: k,
        exponents,
        layers,
        brackets,
    }
}

pub fn free_step2(g: usize) -> GradedLieAlgebra {
    build(free_step2_spec(g))
}

/// Four-dimensional Engel algebra: `[X1, X2] = X3`, `[X1, X3] = X4`.
pub fn engel4_spec() -> AlgebraSpec {
    AlgebraSpec {
        dim: 4,
        exponents: vec![r(1), r(1), r(2), r(3)],
        layers: vec![1, 1, 2, 3],
        brackets: vec![(1, 2, 3, r(1)), (1, 3, 4, r(1))],
    }
}

pub fn engel4() -> GradedLieAlgebra {
    build(engel4_spec())
}

/// Looks up a built-in algebra by name.
///
/// Names: `heisenberg1`, `heisenberg2`, ..., `free-2-3`, `engel4`,
/// `abelian1`, `abelian2`, ..., `abelian-2layer`.
pub fn by_name(name: &str) -> Option<GradedLieAlgebra> {
    let num = |prefix: &str| {
        name.strip_prefix(prefix)
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&m| (1..=8).contains(&m))
    };
    match name {
        "engel4" => Some(engel4()),
        "abelian-2layer" => Some(abelian_two_layer()),
        "free-2-3" => Some(free_step2(3)),
        _ => {
            if let Some(m) = num("heisenberg") {
                Some(heisenberg(m))
            } else if let Some(m) = num("abelian") {
                Some(abelian(m))
            } else {
                None
            }
        }
    }
}
