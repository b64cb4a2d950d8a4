//! Jordan-Wigner fermions acting literally on basis configurations:
//! `c†_i = Π_{m<i}(1 - 2n_m) s⁺_i`, the sign being the parity of the
//! occupied (up) sites left of `i`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn string_sign(a: usize, i: usize) -> f64 {
    if (a & ((1usize << i) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `c_i|a⟩`.
fn annihilate(a: usize, i: usize) -> Option<(usize, f64)> {
    (a >> i & 1 == 1).then(|| (a ^ (1 << i), string_sign(a, i)))
}

/// `c†_i|a⟩`.
fn create(a: usize, i: usize) -> Option<(usize, f64)> {
    (a >> i & 1 == 0).then(|| (a ^ (1 << i), string_sign(a, i)))
}

/// `⟨c†_0 c_l⟩ - ½δ_{l0}` and `⟨c†_0 c†_l⟩` in a state, for `l = 0..n-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JwContractions {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

pub fn jw_contractions(psi: &[Complex64], n: usize) -> Result<JwContractions> {
    if psi.len() != 1 << n {
        return Err(Error::InvalidSpec(format!("state vector has length {}, expected 2^{n}", psi.len())));
    }
    let expect = |op: &dyn Fn(usize) -> Option<(usize, f64)>| -> Complex64 {
        psi.iter()
            .enumerate()
            .filter_map(|(a, &amp)| op(a).map(|(t, s)| psi[t].conj() * amp * s))
            .sum()
    };
    let mut f = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    for l in 0..n {
        let hop = expect(&|a| annihilate(a, l).and_then(|(b, s1)| create(b, 0).map(|(c, s2)| (c, s1 * s2))));
        f.push(hop.re - if l == 0 { 0.5 } else { 0.0 });
        let pair = if l == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            expect(&|a| create(a, l).and_then(|(b, s1)| create(b, 0).map(|(c, s2)| (c, s1 * s2))))
        };
        g.push(pair.re);
    }
    Ok(JwContractions { f, g })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticommutation_on_basis_states() {
        // {c_i, c†_j} = δ_ij on every configuration of four sites.
        for a in 0..16usize {
            for i in 0..4 {
                for j in 0..4 {
                    let mut acc = std::collections::HashMap::<usize, f64>::new();
                    if let Some((b, s1)) = create(a, j) {
                        if let Some((c, s2)) = annihilate(b, i) {
                            *acc.entry(c).or_default() += s1 * s2;
                        }
                    }
                    if let Some((b, s1)) = annihilate(a, i) {
                        if let Some((c, s2)) = create(b, j) {
                            *acc.entry(c).or_default() += s1 * s2;
                        }
                    }
                    acc.retain(|_, v| *v != 0.0);
                    if i == j {
                        assert_eq!(acc.len(), 1);
                        assert_eq!(acc.get(&a), Some(&1.0));
                    } else {
                        assert!(acc.is_empty());
                    }
                }
            }
        }
    }
}
