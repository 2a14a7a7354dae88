use super::{Cosheaf, CosheafMor};
use crate::error::Result;
use crate::fam::{self, FamMor};
use crate::prosys::{normalize, Flag, HomPolicy};

/// Maps between cosheaves seen from a truncation level: each class is a
/// family map `A_N → B_N`, projecting to `B_j` for every `j ≤ N`.
#[derive(Clone, Debug)]
pub struct CosheafHom {
    pub level: usize,
    pub representatives: Vec<FamMor>,
    pub flag: Flag,
    target: Cosheaf,
}

impl CosheafHom {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    /// The component of class `k` at level `j` of the target.
    pub fn project(&self, k: usize, j: usize) -> Result<FamMor> {
        let down = self.target.chain().transition_to(self.level, j)?;
        fam::compose(&down, &self.representatives[k])
    }
}

/// `lim_j colim_i Hom(A_i, B_j)` up to the policy's truncation. Exact when
/// both chains are declared constant by the truncation level and any
/// normalization was sound.
pub fn hom_cosheaf(a: &Cosheaf, b: &Cosheaf, policy: HomPolicy) -> Result<CosheafHom> {
    let (chain, norm_flag) = match policy.normalize_lookahead {
        Some(l) => {
            let n = normalize(a.chain(), l);
            (n.chain, n.flag)
        }
        None => (a.chain().clone(), Flag::Exact),
    };
    let n = policy.truncation;
    let probe = chain.transition_to(n + policy.identify_window, n)?;
    let mut keys = Vec::new();
    let mut reps = Vec::new();
    for f in fam::hom_set(&chain.level(n), &b.level(n))? {
        let key = fam::compose(&f, &probe)?;
        if !keys.contains(&key) {
            keys.push(key);
            reps.push(f);
        }
    }
    let constant = |c: &Cosheaf| c.chain().info().constant_from.is_some_and(|c| c <= n);
    let flag = if constant(a) && constant(b) { Flag::Exact } else { Flag::Truncated };
    Ok(CosheafHom { level: n, representatives: reps, flag: flag.meet(norm_flag), target: b.clone() })
}

/// Levelwise epimorphism check of a strict map over a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpiCertificate {
    pub window: usize,
    /// `(level, target index)` where the fibre maps are not jointly epic.
    pub failures: Vec<(usize, usize)>,
    pub flag: Flag,
}

impl EpiCertificate {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

impl CosheafMor {
    pub fn epi_certificate(&self, window: usize) -> Result<EpiCertificate> {
        let mut failures = Vec::new();
        for n in 0..=window {
            if let Some(y) = self.at(n).epi_witness()? {
                failures.push((n, y));
            }
        }
        let constant = |c: &Cosheaf| c.chain().info().constant_from.is_some_and(|c| c <= window);
        let flag = if constant(&self.dom) && constant(&self.cod) { Flag::Exact } else { Flag::Truncated };
        Ok(EpiCertificate { window, failures, flag })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fam::FamObj;
    use crate::fincat::FinObj;
    use crate::prospace::ProSpace;

    #[test]
    fn homs_between_finite_cosheaves() {
        let a = Cosheaf::finite(FamObj::constant(&FinObj::set(2), 2));
        let b = Cosheaf::finite(FamObj::point(FinObj::set(3)));
        let h = hom_cosheaf(&a, &b, HomPolicy::at(2)).unwrap();
        assert_eq!(h.count(), 81);
        assert_eq!(h.flag, Flag::Exact);
        let c = Cosheaf::constant(&FinObj::set(1), &ProSpace::cantor());
        assert_eq!(hom_cosheaf(&c, &b, HomPolicy::at(1)).unwrap().flag, Flag::Truncated);
    }

    #[test]
    fn projections_are_epic() {
        let a = Cosheaf::constant(&FinObj::cyclic(3), &ProSpace::one_point());
        let cert = a.projection_to_level(2).epi_certificate(3).unwrap();
        assert!(cert.holds());
        assert_eq!(cert.flag, Flag::Truncated);
    }
}
