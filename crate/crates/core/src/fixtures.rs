//! Named example lattices shared by the test corpus, the self-check suite
//! and the CLI `fixtures` subcommand.

use std::sync::Arc;

use crate::lattice::{EvenLattice, Sublattice};
use crate::{Int, IntMatrix, RatMatrix, Result};

/// The names of the shipped fixtures.
pub const NAMES: [&str; 6] = ["fix-h", "fix-g3", "fix-l5", "fix-l5b", "fix-l7", "fix-g5"];

fn gram(rows: Vec<Vec<i64>>) -> IntMatrix {
    IntMatrix::from_rows(
        rows.into_iter()
            .map(|r| r.into_iter().map(Int::from).collect())
            .collect(),
    )
    .expect("fixture gram shape")
}

/// Block diagonal sum of Gram matrices.
fn direct_sum(blocks: &[IntMatrix]) -> IntMatrix {
    let n: usize = blocks.iter().map(IntMatrix::rows).sum();
    let mut offsets = Vec::new();
    let mut off = 0;
    for b in blocks {
        offsets.push(off);
        off += b.rows();
    }
    IntMatrix::from_fn(n, n, |i, j| {
        for (b, &o) in blocks.iter().zip(&offsets) {
            if i >= o && i < o + b.rows() && j >= o && j < o + b.rows() {
                return b[(i - o, j - o)].clone();
            }
        }
        Int::from(0)
    })
}

fn hyperbolic() -> IntMatrix {
    gram(vec![vec![0, 1], vec![1, 0]])
}

fn hyperbolic_scaled() -> IntMatrix {
    gram(vec![vec![0, 2], vec![2, 0]])
}

fn a1() -> IntMatrix {
    gram(vec![vec![2]])
}

fn a2() -> IntMatrix {
    gram(vec![vec![2, 1], vec![1, 2]])
}

fn g3() -> IntMatrix {
    gram(vec![vec![0, 2, 0], vec![2, 0, 1], vec![0, 1, 2]])
}

/// Looks up a fixture by its canonical name (case-insensitive).
pub fn by_name(name: &str) -> Result<Arc<EvenLattice>> {
    let g = match name.to_ascii_lowercase().as_str() {
        "fix-h" => hyperbolic(),
        "fix-g3" => g3(),
        "fix-l5" => direct_sum(&[hyperbolic(), hyperbolic(), a1()]),
        "fix-l5b" => direct_sum(&[hyperbolic_scaled(), hyperbolic(), a1()]),
        "fix-l7" => direct_sum(&[hyperbolic(), hyperbolic(), a2()]),
        "fix-g5" => direct_sum(&[g3(), hyperbolic()]),
        other => {
            return Err(crate::Error::BadInput(format!("unknown fixture `{other}`")))
        }
    };
    Ok(Arc::new(
        EvenLattice::with_name(g, Some(name.to_ascii_lowercase()))
            .expect("fixture grams are valid even lattices"),
    ))
}

/// All fixtures in canonical order.
pub fn all() -> Vec<Arc<EvenLattice>> {
    NAMES.iter().map(|n| by_name(n).unwrap()).collect()
}

/// The standard primitive isotropic sublattice used for each fixture:
/// rank 1 for fix-h and fix-g3, rank 2 for the signature (n,2) fixtures.
pub fn standard_isotropic(lattice: &Arc<EvenLattice>) -> Option<Sublattice> {
    let name = lattice.name()?;
    let cols: Vec<usize> = match name {
        "fix-h" | "fix-g3" => vec![0],
        // First basis vector of each hyperbolic block.
        "fix-l5" | "fix-l5b" | "fix-l7" => vec![0, 2],
        // v1 of the g3 block and the first vector of the hyperbolic block.
        "fix-g5" => vec![0, 3],
        _ => return None,
    };
    let n = lattice.dim();
    let basis = RatMatrix::from_fn(n, cols.len(), |i, j| {
        if i == cols[j] {
            num_traits::One::one()
        } else {
            num_traits::Zero::zero()
        }
    });
    Some(Sublattice::new(lattice, basis).expect("standard isotropic basis"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_have_isotropic_parts() {
        for l in all() {
            let i = standard_isotropic(&l).unwrap();
            assert!(i.is_isotropic(), "{:?}", l.name());
            assert!(i.is_primitive().unwrap(), "{:?}", l.name());
        }
    }

    #[test]
    fn discriminant_orders() {
        let orders: Vec<i64> = vec![1, 8, 2, 8, 3, 8];
        for (l, o) in all().into_iter().zip(orders) {
            assert_eq!(l.discriminant_group().order(), Int::from(o), "{:?}", l.name());
        }
    }
}
