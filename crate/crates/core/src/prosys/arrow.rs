use std::fmt::Debug;

use crate::error::Result;
use crate::fam::{self, FamMor, FamObj};
use crate::fincat::{self, FinMor, FinObj};

/// Morphisms of an effective category with images: what a chain needs
/// from its value category.
pub trait Arrow: Clone + PartialEq + Debug + Send + Sync + 'static {
    type Obj: Clone + PartialEq + Debug + Send + Sync + 'static;

    fn source(&self) -> &Self::Obj;
    fn target(&self) -> &Self::Obj;
    fn identity(obj: &Self::Obj) -> Self;
    /// `g ∘ f`.
    fn compose(g: &Self, f: &Self) -> Result<Self>;
    /// `(repi, mono)` with `self = mono ∘ repi`.
    fn image(&self) -> Result<(Self, Self)>;
    /// The unique `h` with `mono ∘ h = self`.
    fn lift_through(&self, mono: &Self) -> Result<Self>;
    fn try_is_epi(&self) -> Result<bool>;
    fn hom_set(a: &Self::Obj, b: &Self::Obj) -> Result<Vec<Self>>;
}

impl Arrow for FinMor {
    type Obj = FinObj;

    fn source(&self) -> &FinObj {
        self.dom()
    }
    fn target(&self) -> &FinObj {
        self.cod()
    }
    fn identity(obj: &FinObj) -> Self {
        FinMor::identity(obj)
    }
    fn compose(g: &Self, f: &Self) -> Result<Self> {
        fincat::compose(g, f)
    }
    fn image(&self) -> Result<(Self, Self)> {
        fincat::image_factor(self)
    }
    fn lift_through(&self, mono: &Self) -> Result<Self> {
        fincat::factor_through_mono(self, mono)
    }
    fn try_is_epi(&self) -> Result<bool> {
        FinMor::try_is_epi(self)
    }
    fn hom_set(a: &FinObj, b: &FinObj) -> Result<Vec<Self>> {
        fincat::hom_set(a, b)
    }
}

impl Arrow for FamMor {
    type Obj = FamObj;

    fn source(&self) -> &FamObj {
        self.dom()
    }
    fn target(&self) -> &FamObj {
        self.cod()
    }
    fn identity(obj: &FamObj) -> Self {
        FamMor::identity(obj)
    }
    fn compose(g: &Self, f: &Self) -> Result<Self> {
        fam::compose(g, f)
    }
    fn image(&self) -> Result<(Self, Self)> {
        fam::image_factor(self)
    }
    fn lift_through(&self, mono: &Self) -> Result<Self> {
        fam::factor_through_mono(self, mono)
    }
    fn try_is_epi(&self) -> Result<bool> {
        FamMor::try_is_epi(self)
    }
    fn hom_set(a: &FamObj, b: &FamObj) -> Result<Vec<Self>> {
        fam::hom_set(a, b)
    }
}
