//! Level-`n` mesh covers of `Y`, the maps `hₙ: Y → HM(𝒰ₙ)` and the spliced
//! maps `fₙ: Y → HM(X ⊔ 𝒰)`.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::dugundji::{InnerCover, WeightedCover};
use crate::hm::{Label, StepFunction};
use crate::space::{FiniteMetricSpace, Instance};
use crate::Scalar;

/// Mesh ball radius as a fraction of `2⁻ⁿ`; strictly below one half so every
/// element has diameter `< 2⁻ⁿ`.
pub const MESH_RADIUS_FRACTION: f64 = 0.49;

pub fn mesh_radius<S: Scalar>(level: u32) -> S {
    S::lit(MESH_RADIUS_FRACTION) * S::pow2_neg(level)
}

/// First level whose mesh balls are all singletons. Covers at deeper levels
/// are identical to this one, which keeps radii away from underflow.
pub fn saturation_level<S: Scalar>(space: &FiniteMetricSpace<S>) -> u32 {
    let mut min_d = S::infinity();
    for i in 0..space.len() {
        for j in (i + 1)..space.len() {
            min_d = min_d.min(space.d(i, j));
        }
    }
    let mut level = 1;
    while mesh_radius::<S>(level) > min_d {
        level += 1;
    }
    level
}

/// One ball of radius `0.49·2⁻ⁿ` around every point of `Y`.
pub fn build_mesh_cover<S: Scalar>(space: &FiniteMetricSpace<S>, level: u32) -> WeightedCover<S> {
    assert!(level >= 1, "mesh levels start at 1");
    let radius = mesh_radius::<S>(level);
    if level >= saturation_level(space) {
        // the radius may underflow here; membership is known without it
        return WeightedCover::singletons(space.len(), radius);
    }
    let cover = WeightedCover::from_balls(space, (0..space.len()).map(|y| (y, radius)).collect(), |_| true);
    debug_assert!(cover.max_element_diameter(space) < S::pow2_neg(level));
    cover
}

/// Mesh covers built on first use and shared afterwards.
#[derive(Debug, Default)]
pub struct MeshCoverFamily<S> {
    levels: Mutex<BTreeMap<u32, Arc<WeightedCover<S>>>>,
    saturation: OnceLock<u32>,
}

impl<S: Scalar> MeshCoverFamily<S> {
    pub fn new() -> Self {
        Self {
            levels: Mutex::new(BTreeMap::new()),
            saturation: OnceLock::new(),
        }
    }

    /// The level-`level` cover. Levels past [`saturation_level`] share the
    /// saturated cover, whose balls carry that level's radius.
    pub fn level(&self, space: &FiniteMetricSpace<S>, level: u32) -> Arc<WeightedCover<S>> {
        let level = level.min(*self.saturation.get_or_init(|| saturation_level(space)));
        let mut levels = self.levels.lock().expect("mesh cover cache poisoned");
        levels
            .entry(level)
            .or_insert_with(|| Arc::new(build_mesh_cover(space, level)))
            .clone()
    }

    /// Levels built so far.
    pub fn built_levels(&self) -> Vec<u32> {
        self.levels
            .lock()
            .expect("mesh cover cache poisoned")
            .keys()
            .copied()
            .collect()
    }
}

/// `hₙ(y)`: pieces of width `λⁿ_U(y)` labelled by the level-`n` elements.
pub fn map_hn<S: Scalar>(cover: &WeightedCover<S>, y: usize, level: u32) -> StepFunction<S> {
    cover.step_at(y, |index| Label::CoverElement { level, index })
}

/// The splice point `min(1, n·d(y,X))`.
pub fn splice_point<S: Scalar>(inst: &Instance<S>, y: usize, level: u32) -> S {
    (S::from_u32(level).expect("level fits scalar") * inst.dist_to_subset(y)).min(S::one())
}

/// `fₙ(y)`: `hₙ(y)` compressed onto `[0, s)` followed by `h(y)` on `[s, 1)`
/// with `s = min(1, n·d(y,X))`.
pub fn map_fn<S: Scalar>(
    inst: &Instance<S>,
    inner: &InnerCover<S>,
    cover: &WeightedCover<S>,
    y: usize,
    level: u32,
) -> StepFunction<S> {
    let s = splice_point(inst, y, level);
    if s <= S::zero() {
        return inner.map_h(inst, y);
    }
    let head = map_hn(cover, y, level);
    if s >= S::one() {
        return head;
    }
    StepFunction::splice(&head, &inner.map_h(inst, y), s)
}
