use crate::circuit::{Circuit, Gate};
use crate::encoding::{BlockEncoding, Unitary};
use crate::{Error, Result};

/// The register permutation `S = SWAP_1 · SWAP_2 ⋯ SWAP_s` with
/// `SWAP_i` exchanging qubits `a + i` and `a + b + i` (1-based).
///
/// Applied to a register laid out as `[a | s | b | t]` the circuit moves the
/// `s` signal qubits below the `b` ancillas of the second register, keeping the
/// signal qubits in order. With `b = 0` nothing needs to move and the circuit
/// is empty.
pub fn swap_register(a: usize, s: usize, b: usize, t: usize) -> Circuit {
    let mut c = Circuit::new(a + s + b + t);
    if b == 0 {
        return c;
    }
    // As a matrix product SWAP_1 is leftmost, so SWAP_s acts first.
    for i in (1..=s).rev() {
        c.push(Gate::swap(a + i - 1, a + b + i - 1))
            .expect("swap indices lie inside the register");
    }
    c
}

/// Swap network taking the layout `[a_1 s_1 a_2 s_2 … a_d s_d]` to
/// `[a_1 a_2 … a_d s_1 s_2 … s_d]`.
pub(crate) fn gather_ancillas(sizes: &[(usize, usize)]) -> Circuit {
    let width: usize = sizes.iter().map(|(a, s)| a + s).sum();
    // Label each qubit by (is_signal, original position); sorting the labels
    // gives the target layout.
    let mut current: Vec<(bool, usize)> = Vec::with_capacity(width);
    for &(a, s) in sizes {
        let base = current.len();
        current.extend((base..base + a).map(|q| (false, q)));
        current.extend((base + a..base + a + s).map(|q| (true, q)));
    }
    let mut target = current.clone();
    target.sort();
    let mut c = Circuit::new(width);
    for p in 0..width {
        if current[p] != target[p] {
            let q = (p + 1..width)
                .find(|&q| current[q] == target[p])
                .expect("target is a permutation of current");
            current.swap(p, q);
            c.push(Gate::swap(p, q))
                .expect("indices inside the register");
        }
    }
    c
}

fn tensor_circuit(bes: &[&BlockEncoding]) -> Result<Circuit> {
    let width: usize = bes.iter().map(|b| b.width()).sum();
    let mut c = Circuit::new(width);
    let mut offset = 0;
    for be in bes {
        c.append_shifted(&be.unitary().to_circuit()?, offset)?;
        offset += be.width();
    }
    Ok(c)
}

/// `S (U_1 ⊗ U_2 ⊗ …) S†` as a circuit, with `S` the swap network `swaps`.
fn conjugated(swaps: &Circuit, inner: &Circuit) -> Result<Circuit> {
    let mut c = swaps.inverse();
    c.append_shifted(inner, 0)?;
    c.append_shifted(swaps, 0)?;
    Ok(c)
}

/// Kronecker product of two encodings: an `(α₁α₂, a₁ + a₂, α₁ε₂ + α₂ε₁ + ε₁ε₂)`
/// encoding of `A₁ ⊗ A₂` whose unitary is `S (U₁ ⊗ U₂) S†`.
pub fn kron_encodings(be1: &BlockEncoding, be2: &BlockEncoding) -> Result<BlockEncoding> {
    let swaps = swap_register(be1.a(), be1.s(), be2.a(), be2.s());
    let unitary = conjugated(&swaps, &tensor_circuit(&[be1, be2])?)?;
    let (a1, a2, e1, e2) = (be1.alpha(), be2.alpha(), be1.eps(), be2.eps());
    BlockEncoding::new(
        Unitary::Circuit(unitary),
        a1 * a2,
        be1.a() + be2.a(),
        be1.s() + be2.s(),
        a1 * e2 + a2 * e1 + e1 * e2,
    )
}

/// The swap network used by [`kron_many`] for the given encodings.
pub fn kron_swaps(bes: &[BlockEncoding]) -> Circuit {
    let sizes: Vec<(usize, usize)> = bes.iter().map(|b| (b.a(), b.s())).collect();
    gather_ancillas(&sizes)
}

/// Kronecker product of `d` encodings through one global swap network.
///
/// The error bound is first order, `Σ_i ε_i ∏_{k≠i} α_k`; products of two or
/// more `ε_i` are dropped.
pub fn kron_many(bes: &[BlockEncoding]) -> Result<BlockEncoding> {
    match bes {
        [] => Err(Error::Empty("Kronecker factor list")),
        [single] => Ok(single.clone()),
        _ => {
            let refs: Vec<&BlockEncoding> = bes.iter().collect();
            let unitary = conjugated(&kron_swaps(bes), &tensor_circuit(&refs)?)?;
            let alpha: f64 = bes.iter().map(|b| b.alpha()).product();
            let eps: f64 = (0..bes.len())
                .map(|i| {
                    bes[i].eps()
                        * bes
                            .iter()
                            .enumerate()
                            .filter(|&(k, _)| k != i)
                            .map(|(_, b)| b.alpha())
                            .product::<f64>()
                })
                .sum();
            BlockEncoding::new(
                Unitary::Circuit(unitary),
                alpha,
                bes.iter().map(|b| b.a()).sum(),
                bes.iter().map(|b| b.s()).sum(),
                eps,
            )
        }
    }
}

/// The unswapped product `U_1 ⊗ U_2 ⊗ …` as a circuit.
pub(crate) fn raw_tensor(bes: &[BlockEncoding]) -> Result<Circuit> {
    let refs: Vec<&BlockEncoding> = bes.iter().collect();
    tensor_circuit(&refs)
}
