//! Example operators: the transverse-field Ising chain, the spin-1 XYZ
//! (Heisenberg) chain and Laplace-like sums of Kronecker products.

use std::sync::Arc;

use crate::combine::CpLikeSpec;
use crate::numerics::{kron_all, ComplexMatrix};
use crate::{Error, Result, C64};

/// The Pauli matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliBasis {
    pub i: ComplexMatrix,
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub z: ComplexMatrix,
}

impl PauliBasis {
    pub fn new() -> Self {
        let o = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        Self {
            i: ComplexMatrix::identity(2),
            x: ComplexMatrix::from_rows(&[[o, one], [one, o]]),
            y: ComplexMatrix::from_rows(&[[o, -i], [i, o]]),
            z: ComplexMatrix::from_rows(&[[one, o], [o, -one]]),
        }
    }
}

impl Default for PauliBasis {
    fn default() -> Self {
        Self::new()
    }
}

/// Spin-1 generators with `X`, `Y` off-diagonals `1/√2` and `Z = diag(1, 0, −1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spin1Basis {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub z: ComplexMatrix,
}

impl Spin1Basis {
    pub fn new() -> Self {
        let o = C64::new(0.0, 0.0);
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let ih = C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
        Self {
            x: ComplexMatrix::from_rows(&[[o, h, o], [h, o, h], [o, h, o]]),
            y: ComplexMatrix::from_rows(&[[o, -ih, o], [ih, o, -ih], [o, ih, o]]),
            z: ComplexMatrix::diag_real(&[1.0, 0.0, -1.0]),
        }
    }
}

impl Default for Spin1Basis {
    fn default() -> Self {
        Self::new()
    }
}

fn check_sites(s: usize) -> Result<()> {
    if s < 2 {
        return Err(Error::InvalidParameter(format!(
            "chain needs at least 2 sites, got {s}"
        )));
    }
    Ok(())
}

/// `H = −Σ_i Z_i Z_{i+1} − h Σ_i X_i` on an open chain of `s` qubits.
///
/// Terms with a zero coefficient are left out, so `h = 0` gives only the
/// `s − 1` couplings.
pub fn tfim_spec(s: usize, h: f64) -> Result<CpLikeSpec> {
    check_sites(s)?;
    if !h.is_finite() {
        return Err(Error::NonFinite("field strength"));
    }
    let p = PauliBasis::new();
    let (id, x, z) = (Arc::new(p.i), Arc::new(p.x), Arc::new(p.z));
    let mut y = Vec::new();
    let mut terms = Vec::new();
    for i in 0..s - 1 {
        let mut t = vec![id.clone(); s];
        t[i] = z.clone();
        t[i + 1] = z.clone();
        terms.push(t);
        y.push(C64::new(-1.0, 0.0));
    }
    if h != 0.0 {
        for i in 0..s {
            let mut t = vec![id.clone(); s];
            t[i] = x.clone();
            terms.push(t);
            y.push(C64::new(-h, 0.0));
        }
    }
    CpLikeSpec::new(y, terms)
}

/// [`tfim_spec`] together with its dense `2^s × 2^s` matrix.
pub fn tfim(s: usize, h: f64) -> Result<(CpLikeSpec, ComplexMatrix)> {
    let spec = tfim_spec(s, h)?;
    let dense = spec.dense()?;
    Ok((spec, dense))
}

/// A 3×3 site operator zero-padded to 4×4; the padded level is index 3.
pub fn pad_site_operator(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.rows() != 3 || m.cols() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "site operator is {}x{}, expected 3x3",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(4, 4);
    out.set_block(0, 0, m);
    Ok(out)
}

/// Index of a base-4 digit string in base 3, or `None` if a digit is 3.
fn unpadded_index(mut index4: usize, sites: usize) -> Option<usize> {
    let (mut out, mut place) = (0, 1);
    for _ in 0..sites {
        let digit = index4 % 4;
        if digit == 3 {
            return None;
        }
        out += digit * place;
        place *= 3;
        index4 /= 4;
    }
    Some(out)
}

/// Embeds a `3^s × 3^s` matrix into `4^s × 4^s`, zero on every row and column
/// that touches a padded level.
pub fn embed_padded(dense3: &ComplexMatrix, sites: usize) -> Result<ComplexMatrix> {
    let d3 = 3usize.pow(sites as u32);
    if dense3.rows() != d3 || dense3.cols() != d3 {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for {sites} spin-1 sites",
            dense3.rows(),
            dense3.cols()
        )));
    }
    let d4 = 1usize << (2 * sites);
    let map: Vec<Option<usize>> = (0..d4).map(|i| unpadded_index(i, sites)).collect();
    Ok(ComplexMatrix::from_fn(d4, d4, |i, j| {
        match (map[i], map[j]) {
            (Some(r), Some(c)) => dense3.get(r, c),
            _ => C64::new(0.0, 0.0),
        }
    }))
}

/// Inverse of [`embed_padded`] on the unpadded sub-block.
pub fn extract_unpadded(dense4: &ComplexMatrix, sites: usize) -> Result<ComplexMatrix> {
    let d4 = 1usize << (2 * sites);
    if dense4.rows() != d4 || dense4.cols() != d4 {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for {sites} padded sites",
            dense4.rows(),
            dense4.cols()
        )));
    }
    let keep: Vec<usize> = (0..d4)
        .filter(|&i| unpadded_index(i, sites).is_some())
        .collect();
    let d3 = keep.len();
    Ok(ComplexMatrix::from_fn(d3, d3, |r, c| {
        dense4.get(keep[r], keep[c])
    }))
}

/// `H = Σ_i X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}` for `s` spin-1 sites,
/// `3^s × 3^s`.
pub fn xyz_dense(s: usize) -> Result<ComplexMatrix> {
    check_sites(s)?;
    let b = Spin1Basis::new();
    let id = ComplexMatrix::identity(3);
    let d = 3usize.pow(s as u32);
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..s - 1 {
        for op in [&b.x, &b.y, &b.z] {
            let factors: Vec<&ComplexMatrix> = (0..s)
                .map(|k| if k == i || k == i + 1 { op } else { &id })
                .collect();
            out.axpy(C64::new(1.0, 0.0), &kron_all(factors)?)?;
        }
    }
    Ok(out)
}

/// The XYZ chain with every site operator zero-padded to 4×4: `3(s − 1)`
/// terms on `2s` qubits. Inactive sites carry `diag(1, 1, 1, 0)`.
pub fn xyz_spec(s: usize) -> Result<CpLikeSpec> {
    check_sites(s)?;
    let b = Spin1Basis::new();
    let id = Arc::new(pad_site_operator(&ComplexMatrix::identity(3))?);
    let ops = [
        Arc::new(pad_site_operator(&b.x)?),
        Arc::new(pad_site_operator(&b.y)?),
        Arc::new(pad_site_operator(&b.z)?),
    ];
    let mut terms = Vec::new();
    for i in 0..s - 1 {
        for op in &ops {
            let mut t = vec![id.clone(); s];
            t[i] = op.clone();
            t[i + 1] = op.clone();
            terms.push(t);
        }
    }
    let m = terms.len();
    CpLikeSpec::new(vec![C64::new(1.0, 0.0); m], terms)
}

/// Padded spec, the `3^s`-dimensional Hamiltonian and its `4^s` embedding.
pub fn xyz(s: usize) -> Result<(CpLikeSpec, ComplexMatrix, ComplexMatrix)> {
    let spec = xyz_spec(s)?;
    let dense3 = xyz_dense(s)?;
    let dense4 = embed_padded(&dense3, s)?;
    Ok((spec, dense3, dense4))
}

/// `Σ_j M_1 ⊗ ⋯ ⊗ M_{j−1} ⊗ L_j ⊗ M_{j+1} ⊗ ⋯ ⊗ M_d` with unit coefficients.
/// Passing the same `Arc` several times shares one dilation.
pub fn laplace_like(
    ms: &[Arc<ComplexMatrix>],
    ls: &[Arc<ComplexMatrix>],
) -> Result<(CpLikeSpec, ComplexMatrix)> {
    if ms.len() != ls.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} M factors and {} L factors",
            ms.len(),
            ls.len()
        )));
    }
    if ms.is_empty() {
        return Err(Error::Empty("Laplace-like factor list"));
    }
    for (k, (m, l)) in ms.iter().zip(ls).enumerate() {
        if m.rows() != l.rows() || m.cols() != l.cols() {
            return Err(Error::DimensionMismatch(format!(
                "slot {k}: M is {}x{}, L is {}x{}",
                m.rows(),
                m.cols(),
                l.rows(),
                l.cols()
            )));
        }
    }
    let d = ms.len();
    let terms: Vec<Vec<Arc<ComplexMatrix>>> = (0..d)
        .map(|j| {
            (0..d)
                .map(|k| if k == j { ls[k].clone() } else { ms[k].clone() })
                .collect()
        })
        .collect();
    let spec = CpLikeSpec::new(vec![C64::new(1.0, 0.0); d], terms)?;
    let dense = spec.dense()?;
    Ok((spec, dense))
}
