//! Congruence subgroups of `SL_2(Z)` by exhaustive enumeration modulo `N`:
//! exact lifting of residue classes, coset enumeration, and Schreier
//! generators for subgroups defined by a mod-`N` predicate.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;
use crate::{Int, IntMatrix, Result};

/// Residue-class matrix entries `(a, b, c, d)` with rows `[a, b; c, d]`.
pub type Sl2Class = [i64; 4];

/// All elements of `SL_2(Z/n)`.
pub fn sl2_mod_elements(n: i64) -> Vec<Sl2Class> {
    assert!(n >= 1);
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if (a * d - b * c).rem_euclid(n) == 1 % n {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

fn reduce(m: &IntMatrix, n: i64) -> Sl2Class {
    let modn = Int::from(n);
    let take = |i: usize, j: usize| -> i64 {
        m[(i, j)].mod_floor(&modn).to_i64().expect("residue fits i64")
    };
    [take(0, 0), take(0, 1), take(1, 0), take(1, 1)]
}

/// Reduction of an exact `SL_2(Z)` matrix modulo `n`.
pub fn sl2_reduce(m: &IntMatrix, n: i64) -> Sl2Class {
    reduce(m, n)
}

/// Deterministic lift of a class in `SL_2(Z/n)` to an exact element of
/// `SL_2(Z)`.
pub fn sl2_lift(class: Sl2Class, n: i64) -> Result<IntMatrix> {
    let [a, b, c, d] = class.map(|x| x.rem_euclid(n));
    if (a * d - b * c).rem_euclid(n) != 1 % n {
        return Err(Error::Precondition("class is not in SL2(Z/n)".into()));
    }
    if n == 1 {
        return Ok(IntMatrix::identity(2));
    }
    // Arrange coprime lower row (c0, d1) congruent to (c, d).
    let c0 = if c == 0 { n } else { c };
    let mut d1 = d;
    let mut t = 0;
    while Int::from(c0).gcd(&Int::from(d1)) != Int::one() {
        t += 1;
        d1 = d + t * n;
        if t > 10 * c0.abs() + 10 {
            return Err(Error::Internal("no coprime lift of the lower row".into()));
        }
    }
    // Solve (a + n x) d1 - (b + n y) c0 = 1.
    let k = Int::from(1 - a * d1 + b * c0);
    let (kq, kr) = k.div_rem(&Int::from(n));
    if !kr.is_zero() {
        return Err(Error::Internal("lift residue is not divisible by n".into()));
    }
    // x d1 - y c0 = kq with gcd(d1, c0) = 1.
    let e = Int::from(d1).extended_gcd(&Int::from(c0));
    // e.x * d1 + e.y * c0 = 1.
    let x = e.x * &kq;
    let y = -(e.y * &kq);
    let a1 = Int::from(a) + Int::from(n) * x;
    let b1 = Int::from(b) + Int::from(n) * y;
    let m = IntMatrix::from_rows(vec![
        vec![a1, b1],
        vec![Int::from(c0), Int::from(d1)],
    ])?;
    if m.to_rational().det()? != crate::Rat::one() {
        return Err(Error::Internal("lift does not have determinant 1".into()));
    }
    debug_assert_eq!(reduce(&m, n), [a, b, c, d]);
    Ok(m)
}

fn mul_class(x: Sl2Class, y: Sl2Class, n: i64) -> Sl2Class {
    [
        (x[0] * y[0] + x[1] * y[2]).rem_euclid(n),
        (x[0] * y[1] + x[1] * y[3]).rem_euclid(n),
        (x[2] * y[0] + x[3] * y[2]).rem_euclid(n),
        (x[2] * y[1] + x[3] * y[3]).rem_euclid(n),
    ]
}

/// Subgroup data computed by exhaustive enumeration mod `n`.
pub struct ModSubgroup {
    pub n: i64,
    /// Elements of the image of the subgroup in `SL_2(Z/n)`.
    pub elements: Vec<Sl2Class>,
    /// Index in `SL_2(Z)` (= index of the image in `SL_2(Z/n)`).
    pub index: Int,
}

/// Enumerates the image in `SL_2(Z/n)` of the subgroup of `SL_2(Z)` cut out
/// by a predicate that only depends on the matrix modulo `n`, verifies it
/// is closed under multiplication, and counts its cosets.
pub fn mod_subgroup(n: i64, pred: impl Fn(Sl2Class) -> bool) -> Result<ModSubgroup> {
    let all = sl2_mod_elements(n);
    let elements: Vec<Sl2Class> = all.iter().copied().filter(|&m| pred(m)).collect();
    if elements.is_empty() {
        return Err(Error::Internal("subgroup image is empty".into()));
    }
    // Closure check.
    for &x in &elements {
        for &y in &elements {
            let z = mul_class(x, y, n);
            if !pred(z) {
                return Err(Error::Internal("predicate image is not a subgroup".into()));
            }
        }
    }
    // Coset enumeration: orbits of left multiplication by the subgroup.
    let mut seen: std::collections::HashSet<Sl2Class> = std::collections::HashSet::new();
    let mut cosets = 0usize;
    for &g in &all {
        if seen.contains(&g) {
            continue;
        }
        cosets += 1;
        for &h in &elements {
            seen.insert(mul_class(h, g, n));
        }
    }
    if cosets * elements.len() != all.len() {
        return Err(Error::Internal("cosets do not partition the group".into()));
    }
    Ok(ModSubgroup {
        n,
        elements,
        index: Int::from(cosets as i64),
    })
}

const GEN_S: Sl2Class = [0, -1, 1, 0];
const GEN_T: Sl2Class = [1, 1, 0, 1];

fn sl2_int(rows: [[i64; 2]; 2]) -> IntMatrix {
    IntMatrix::from_rows(vec![
        vec![Int::from(rows[0][0]), Int::from(rows[0][1])],
        vec![Int::from(rows[1][0]), Int::from(rows[1][1])],
    ])
    .unwrap()
}

fn sl2_inverse(m: &IntMatrix) -> IntMatrix {
    IntMatrix::from_rows(vec![
        vec![m[(1, 1)].clone(), -m[(0, 1)].clone()],
        vec![-m[(1, 0)].clone(), m[(0, 0)].clone()],
    ])
    .unwrap()
}

/// Exact generators of the congruence subgroup of `SL_2(Z)` cut out by a
/// mod-`n` predicate, via Schreier's lemma on the coset graph.
///
/// Coset representatives are built as words in `S` and `T` starting from
/// the identity, each Schreier element `r g (rep(r g))^{-1}` lands in the
/// subgroup and the full set generates it.
pub fn schreier_generators(n: i64, pred: impl Fn(Sl2Class) -> bool) -> Result<Vec<IntMatrix>> {
    use std::collections::HashMap;
    let sub = mod_subgroup(n, &pred)?;
    let in_sub = |c: Sl2Class| sub.elements.contains(&c);

    // Coset labels: canonical minimal element of H g.
    let label = |g: Sl2Class| -> Sl2Class {
        sub.elements
            .iter()
            .map(|&h| mul_class(h, g, n))
            .min()
            .unwrap()
    };

    let id_class = [1 % n, 0, 0, 1 % n];
    let s_int = sl2_int([[0, -1], [1, 0]]);
    let t_int = sl2_int([[1, 1], [0, 1]]);

    let mut reps: HashMap<Sl2Class, IntMatrix> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    reps.insert(label(id_class), IntMatrix::identity(2));
    queue.push_back((id_class, IntMatrix::identity(2)));
    let mut edges: Vec<(IntMatrix, IntMatrix)> = Vec::new();
    while let Some((gc, gm)) = queue.pop_front() {
        for (sc, sm) in [(GEN_S, &s_int), (GEN_T, &t_int)] {
            let nc = mul_class(gc, sc, n);
            let nm = gm.mul(sm)?;
            let lab = label(nc);
            if let Some(rep) = reps.get(&lab) {
                edges.push((nm, rep.clone()));
            } else {
                reps.insert(lab, nm.clone());
                queue.push_back((nc, nm));
            }
        }
    }

    let mut gens: Vec<IntMatrix> = Vec::new();
    for (nm, rep) in edges {
        let g = nm.mul(&sl2_inverse(rep))?;
        if g == IntMatrix::identity(2) {
            continue;
        }
        if !in_sub(reduce(&g, n)) {
            return Err(Error::Internal("Schreier element outside the subgroup".into()));
        }
        if !gens.contains(&g) {
            gens.push(g);
        }
    }
    if gens.is_empty() {
        // Trivial-index case: the subgroup is all of SL_2(Z).
        gens.push(s_int);
        gens.push(t_int);
    }
    Ok(gens)
}

/// Verifies that the generated subgroup image mod `n` is the whole
/// predicate image (a completeness check for the Schreier set).
pub fn generators_fill_subgroup(
    n: i64,
    gens: &[IntMatrix],
    pred: impl Fn(Sl2Class) -> bool,
) -> Result<bool> {
    let sub = mod_subgroup(n, pred)?;
    let mut seen: std::collections::HashSet<Sl2Class> = std::collections::HashSet::new();
    let id = [1 % n, 0, 0, 1 % n];
    seen.insert(id);
    let mut queue: std::collections::VecDeque<Sl2Class> = [id].into();
    let gen_classes: Vec<Sl2Class> = gens
        .iter()
        .flat_map(|g| [reduce(g, n), reduce(&sl2_inverse(g), n)])
        .collect();
    while let Some(x) = queue.pop_front() {
        for &g in &gen_classes {
            let y = mul_class(x, g, n);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    Ok(seen.len() == sub.elements.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_mod_sizes() {
        // |SL2(Z/2)| = 6, |SL2(Z/4)| = 48.
        assert_eq!(sl2_mod_elements(2).len(), 6);
        assert_eq!(sl2_mod_elements(4).len(), 48);
        assert_eq!(sl2_mod_elements(3).len(), 24);
    }

    #[test]
    fn lift_all_classes_mod_4() {
        for class in sl2_mod_elements(4) {
            let m = sl2_lift(class, 4).unwrap();
            assert_eq!(sl2_reduce(&m, 4), class);
        }
    }

    #[test]
    fn gamma1_2_index_is_3() {
        // a = d = 1, c = 0 (mod 2): index 3 in SL2(Z).
        let sub = mod_subgroup(2, |[a, _, c, d]| a == 1 && d == 1 && c == 0).unwrap();
        assert_eq!(sub.index, Int::from(3));
        assert_eq!(sub.elements.len(), 2);
    }

    #[test]
    fn schreier_generates_gamma1_2() {
        let pred = |[a, _, c, d]: Sl2Class| a == 1 && d == 1 && c == 0;
        let gens = schreier_generators(2, pred).unwrap();
        assert!(generators_fill_subgroup(2, &gens, pred).unwrap());
        for g in &gens {
            assert!(pred(sl2_reduce(g, 2)));
        }
    }

    #[test]
    fn schreier_generates_gamma1_4() {
        let pred = |[a, _, c, d]: Sl2Class| a == 1 && d == 1 && c == 0;
        let gens = schreier_generators(4, pred).unwrap();
        assert!(generators_fill_subgroup(4, &gens, pred).unwrap());
    }
}
