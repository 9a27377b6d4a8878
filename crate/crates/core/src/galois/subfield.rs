//! Fixed fields `L = N^H` and the maps between `L` and `N`.

use super::group::{GaloisVector, Subgroup};
use super::validate::line_datum;
use super::{ExtensionField, LayerKind, NElement};
use crate::error::{Error, Result};
use crate::linalg::{self, KMatrix};

/// `L = N^H`, presented as an extension of `K` in its own right.
///
/// A basis `d_1..d_r` of `H^⊥` gives generators `y_k = x^{d_k}` (Kummer)
/// or `y_k = Σ_i d_{k,i} x_i` (Artin–Schreier), each `H`-invariant.
#[derive(Clone, Debug)]
pub struct Subfield {
    field: ExtensionField,
    h: Subgroup,
    dual: Vec<Vec<u32>>,
    images: Vec<NElement>,
}

impl Subfield {
    pub(crate) fn new(n: &ExtensionField, h: &Subgroup) -> Result<Self> {
        if h.n != n.n() || h.p != n.p() {
            return Err(Error::InvalidInput(format!("subgroup {h} does not belong to this Galois group")));
        }
        let k = n.ground();
        let dual = h.annihilator();
        let data = dual.iter().map(|d| line_datum(k, n.kind(), n.data(), d)).collect::<Result<Vec<_>>>()?;
        let field = ExtensionField::from_data(k, n.kind(), data)?;
        let gens: Vec<NElement> = dual
            .iter()
            .map(|d| match n.kind() {
                LayerKind::Kummer => n.monomial(&GaloisVector(d.clone()), &k.one()),
                LayerKind::ArtinSchreier => d
                    .iter()
                    .enumerate()
                    .fold(n.zero(), |acc, (i, &c)| n.add(&acc, &n.scale_int(&n.generator(i), c as i64))),
            })
            .collect();
        let images = (0..field.degree())
            .map(|idx| {
                let exps = GaloisVector::from_index(idx, dual.len(), n.p());
                exps.0.iter().zip(&gens).fold(n.one(), |acc, (&e, g)| n.mul(&acc, &n.pow_nonneg(g, e as u64)))
            })
            .collect();
        Ok(Subfield { field, h: h.clone(), dual, images })
    }

    /// `L` as an extension of `K`.
    pub fn field(&self) -> &ExtensionField {
        &self.field
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.h
    }

    /// Basis of `H^⊥` defining the generators of `L`.
    pub fn dual_basis(&self) -> &[Vec<u32>] {
        &self.dual
    }

    /// `[N:L] = |H|`.
    pub fn relative_degree(&self) -> usize {
        self.h.order()
    }

    /// The inclusion `L → N`.
    pub fn embed(&self, n: &ExtensionField, l: &NElement) -> NElement {
        l.coords()
            .iter()
            .zip(&self.images)
            .filter(|(c, _)| !c.is_exact_zero())
            .fold(n.zero(), |acc, (c, img)| n.add(&acc, &n.scale(c, img)))
    }

    /// Coordinates in `L` of an element of `N` lying in `L`.
    pub fn section(&self, n: &ExtensionField, y: &NElement) -> Result<NElement> {
        let k = n.ground();
        let columns: Vec<Vec<_>> = self.images.iter().map(|img| img.coords().to_vec()).collect();
        let m = KMatrix::from_columns(k, &columns);
        match linalg::solve(k, &m, y.coords()) {
            Ok(coords) => Ok(NElement::from_coords(coords)),
            Err(Error::Structural(msg)) => Err(Error::Structural(format!("element does not lie in the fixed field: {msg}"))),
            Err(e) => Err(e),
        }
    }

    /// Image of `σ ∈ G` in `Gal(L/K) = G/H`, in `L`'s own coordinates.
    pub fn restrict(&self, sigma: &GaloisVector) -> GaloisVector {
        GaloisVector(self.dual.iter().map(|d| sigma.dot(d, self.h.p)).collect())
    }
}
