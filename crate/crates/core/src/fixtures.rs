//! Known vertices used as search seeds and in tests.

use crate::exact::{q, Rational};
use crate::polytope::SolutionPoint;

fn build(n: usize, groups: &[(Rational, &[(usize, usize)])]) -> SolutionPoint {
    let arcs: Vec<(usize, usize, Rational)> = groups
        .iter()
        .flat_map(|(v, arcs)| arcs.iter().map(move |&(i, j)| (i, j, v.clone())))
        .collect();
    SolutionPoint::from_arcs(n, &arcs).expect("fixture is well formed")
}

/// Half-integer vertex on four nodes with loops on {0,1} and {2,3}.
pub fn half_square() -> SolutionPoint {
    build(
        4,
        &[(
            q(1, 2),
            &[(0, 1), (0, 3), (1, 0), (1, 2), (2, 0), (2, 3), (3, 1), (3, 2)],
        )],
    )
}

/// [`half_square`] relabeled by `i -> i + 1 mod 4`.
pub fn half_square_shifted() -> SolutionPoint {
    build(
        4,
        &[(
            q(1, 2),
            &[(0, 2), (0, 3), (1, 0), (1, 2), (2, 1), (2, 3), (3, 0), (3, 1)],
        )],
    )
}

/// The five orbit representatives on five nodes, `'a'..='e'`.
pub fn five_node(which: char) -> SolutionPoint {
    let h = q(1, 2);
    match which {
        'a' => build(
            5,
            &[(h, &[(0, 3), (0, 4), (3, 1), (3, 2), (4, 0), (4, 2), (1, 3), (1, 4), (2, 0), (2, 1)])],
        ),
        'b' => build(
            5,
            &[
                (q(2, 3), &[(0, 4), (3, 0), (4, 1), (1, 2)]),
                (q(1, 3), &[(0, 3), (3, 2), (4, 3), (1, 3), (2, 0), (2, 1), (2, 4)]),
            ],
        ),
        'c' => build(
            5,
            &[(h, &[(0, 3), (0, 4), (4, 1), (4, 0), (3, 4), (1, 2), (1, 0), (2, 1), (2, 3), (3, 2)])],
        ),
        'd' => build(
            5,
            &[
                (Rational::ONE, &[(0, 4)]),
                (h, &[(4, 1), (4, 2), (1, 2), (1, 3), (2, 0), (2, 3), (3, 0), (3, 1)]),
            ],
        ),
        'e' => SolutionPoint::tour(&[0, 1, 2, 3, 4]).expect("tour"),
        other => panic!("no five-node representative named {other:?}"),
    }
}

/// Six-node vertex with thirds; a seed for the six-node search.
pub fn six_node_thirds() -> SolutionPoint {
    build(
        6,
        &[
            (q(2, 3), &[(0, 4), (3, 5), (4, 2), (1, 0), (5, 1)]),
            (q(1, 3), &[(0, 3), (3, 2), (4, 3), (1, 5), (5, 3), (2, 0), (2, 1), (2, 4)]),
        ],
    )
}

/// Six-node half-integer vertex attaining integrality gap 4/3.
pub fn six_node_halves() -> SolutionPoint {
    build(
        6,
        &[(
            q(1, 2),
            &[(0, 4), (0, 5), (4, 0), (4, 1), (5, 0), (5, 2), (1, 3), (1, 5), (3, 1), (3, 2), (2, 3), (2, 4)],
        )],
    )
}
