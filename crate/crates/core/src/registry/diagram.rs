use std::collections::BTreeSet;

use serde::Serialize;

use super::families::FamilySpec;
use crate::modes::ModeTag;

/// A proven non-implication `from =/=> to`, with the family exhibiting it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonEdge {
    pub from: ModeTag,
    pub to: ModeTag,
    pub witness: Option<FamilySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImplicationDiagram {
    pub nodes: Vec<ModeTag>,
    /// Arrows as drawn; see [`ImplicationDiagram::closure`].
    pub edges: Vec<(ModeTag, ModeTag)>,
    pub non_edges: Vec<NonEdge>,
}

impl ImplicationDiagram {
    /// The arrows between the modes and the known non-implications.
    /// `S-L^p` and `L^p` stand for `p = 1`; `S_a-a.s.` for `a = 1`.
    pub fn standard() -> Self {
        use ModeTag::*;
        let edges = vec![
            (S1StarD, S1d),
            (S1d, S3d),
            (S3d, Distribution),
            (SLInf, SLp),
            (SLp, S1StarD),
            (SLp, SAlphaAs),
            (SLp, CompleteConvergence),
            (SAlphaAs, AlmostSure),
            (CompleteConvergence, AlmostSure),
            (AlmostSure, Probability),
            (Probability, Distribution),
            (LInf, AlmostSure),
            (LInf, Lp),
            (Lp, Probability),
        ];
        let ex31 = Some(FamilySpec::Ex31 { alpha: 2.0 });
        let ex32 = Some(FamilySpec::Ex32 { alpha: 0.5, beta: 2.0 });
        let ex33 = Some(FamilySpec::Ex33);
        let ne = |from, to, witness: &Option<FamilySpec>| NonEdge {
            from,
            to,
            witness: witness.clone(),
        };
        let non_edges = vec![
            ne(S1d, S2d, &ex32),
            ne(S2d, S1d, &ex31),
            ne(SLInf, S2d, &ex32),
            ne(SLp, S2d, &ex32),
            ne(SAlphaAs, S1d, &ex33),
            ne(CompleteConvergence, S1d, &ex31),
            ne(CompleteConvergence, S2d, &ex32),
            ne(S3d, S2d, &ex32),
            ne(S2d, S3d, &ex31),
            ne(SAlphaAs, S3d, &ex33),
            ne(CompleteConvergence, S3d, &ex31),
            ne(S3d, Probability, &None),
        ];
        Self {
            nodes: ModeTag::ALL.to_vec(),
            edges,
            non_edges,
        }
    }

    pub fn with_edge(mut self, from: ModeTag, to: ModeTag) -> Self {
        self.edges.push((from, to));
        self
    }

    /// Transitive closure of the arrows, sorted.
    pub fn closure(&self) -> Vec<(ModeTag, ModeTag)> {
        let mut set: BTreeSet<(ModeTag, ModeTag)> = self.edges.iter().copied().filter(|(a, b)| a != b).collect();
        loop {
            let mut added = Vec::new();
            for &(a, b) in &set {
                for &(c, d) in &set {
                    if b == c && a != d && !set.contains(&(a, d)) {
                        added.push((a, d));
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            set.extend(added);
        }
        set.into_iter().collect()
    }

    /// Modes implied by `from` under the closure.
    pub fn consequences(&self, from: ModeTag) -> Vec<ModeTag> {
        self.closure().into_iter().filter(|&(a, _)| a == from).map(|(_, b)| b).collect()
    }

    /// Recorded non-implications that the arrows nevertheless imply.
    pub fn contradictions(&self) -> Vec<NonEdge> {
        let closure = self.closure();
        self.non_edges
            .iter()
            .filter(|ne| closure.contains(&(ne.from, ne.to)))
            .cloned()
            .collect()
    }
}
