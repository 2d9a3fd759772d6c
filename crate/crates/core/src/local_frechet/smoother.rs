//! Repeated local linear fits over one sample.
//!
//! For the Epanechnikov kernel and spaces whose Fréchet mean is the
//! projected weighted average, the kernel moments and weighted response sums
//! inside the window `|tᵢ − t| < b` are polynomials in `t`. Prefix sums of
//! `uᵢʳ` and `uᵢʳYᵢ` over the sorted, scaled projections `uᵢ = (tᵢ − c)/b`
//! turn each fit into `O(dim)` work after an `O(n·dim)` set-up. Everything
//! else, and any target where the moment determinant is too small to trust
//! after cancellation, goes through [`llfr_fit_subset`].

use super::fit::llfr_fit_subset;
use super::kernel::{KernelFamily, KernelSpec};
use crate::error::Result;
use crate::metric_spaces::{dist_sq, distance_sq, project_to_space, MetricSpaceKind, ObjectShape, ObjectValue};

const SIGMA0_FLOOR: f64 = 1e-12;
/// Below this `det/(m₀m₂)` the fast path hands over to the direct one.
const RELATIVE_DET_FLOOR: f64 = 1e-7;

/// Local linear Fréchet fits on a fixed subset of observations and a fixed
/// bandwidth, at arbitrary target index values.
pub struct Smoother<'a> {
    responses: &'a [ObjectValue],
    projections: &'a [f64],
    subset: Vec<usize>,
    kernel: KernelSpec,
    kind: MetricSpaceKind,
    fast: Option<Prefix>,
}

struct Prefix {
    shape: ObjectShape,
    dim: usize,
    center: f64,
    /// Sorted projections of the subset.
    sorted: Vec<f64>,
    /// Position in `sorted` of each observation (`usize::MAX` if absent).
    rank: Vec<usize>,
    /// `scalar[r][k] = Σ_{j<k} u_(j)ʳ`, r = 0..=4.
    scalar: [Vec<f64>; 5],
    /// `vector[r][k·dim..]` = `Σ_{j<k} u_(j)ʳ Y_(j)`, r = 0..=3.
    vector: [Vec<f64>; 4],
}

impl<'a> Smoother<'a> {
    /// Smoother over all observations.
    pub fn new(
        responses: &'a [ObjectValue],
        projections: &'a [f64],
        kernel: KernelSpec,
        kind: MetricSpaceKind,
    ) -> Self {
        Self::on_subset(responses, projections, (0..responses.len()).collect(), kernel, kind)
    }

    /// Smoother over the observations listed in `subset`.
    pub fn on_subset(
        responses: &'a [ObjectValue],
        projections: &'a [f64],
        subset: Vec<usize>,
        kernel: KernelSpec,
        kind: MetricSpaceKind,
    ) -> Self {
        let fast = Prefix::build(responses, projections, &subset, &kernel, kind);
        Smoother {
            responses,
            projections,
            subset,
            kernel,
            kind,
            fast,
        }
    }

    /// Whether fits use the prefix-sum path.
    pub fn is_fast(&self) -> bool {
        self.fast.is_some()
    }

    /// Fit at index value `t`.
    pub fn fit_at(&self, t: f64) -> Result<ObjectValue> {
        if let Some(fit) = self
            .fast
            .as_ref()
            .and_then(|p| p.fit(t, None, self.subset.len(), &self.kernel))
        {
            return Ok(fit);
        }
        llfr_fit_subset(
            self.responses,
            self.projections,
            &self.subset,
            t,
            &self.kernel,
            self.kind,
        )
    }

    /// `d²(Yᵢ, m̂(t))` for observation `i`.
    pub fn loss_at(&self, t: f64, i: usize) -> Result<f64> {
        let y = &self.responses[i];
        if let Some(d2) = self
            .fast
            .as_ref()
            .and_then(|p| p.loss(t, None, self.subset.len(), &self.kernel, y))
        {
            return Ok(d2);
        }
        distance_sq(y, &self.fit_at(t)?, self.kind)
    }

    /// `d²(Yᵢ, m̂₍₋ᵢ₎(t))`, the fit leaving observation `i` out.
    pub fn loss_without(&self, t: f64, i: usize) -> Result<f64> {
        let y = &self.responses[i];
        if let Some(p) = &self.fast {
            let pos = p.rank.get(i).copied().filter(|&r| r != usize::MAX);
            let n = self.subset.len() - usize::from(pos.is_some());
            if let Some(d2) = p.loss(t, pos, n, &self.kernel, y) {
                return Ok(d2);
            }
        }
        distance_sq(y, &self.fit_without(t, i)?, self.kind)
    }

    /// Fit at index value `t` with observation `i` left out of the subset.
    pub fn fit_without(&self, t: f64, i: usize) -> Result<ObjectValue> {
        if let Some(p) = &self.fast {
            let pos = p.rank.get(i).copied().filter(|&r| r != usize::MAX);
            let n = self.subset.len() - usize::from(pos.is_some());
            if let Some(fit) = p.fit(t, pos, n, &self.kernel) {
                return Ok(fit);
            }
        }
        let rest: Vec<usize> = self.subset.iter().copied().filter(|&j| j != i).collect();
        llfr_fit_subset(self.responses, self.projections, &rest, t, &self.kernel, self.kind)
    }
}

impl Prefix {
    fn build(
        responses: &[ObjectValue],
        projections: &[f64],
        subset: &[usize],
        kernel: &KernelSpec,
        kind: MetricSpaceKind,
    ) -> Option<Self> {
        if kernel.family() != KernelFamily::Epanechnikov || kind == MetricSpaceKind::SphereGeodesic {
            return None;
        }
        let &first = subset.first()?;
        let lead = responses.get(first)?;
        if subset.iter().any(|&i| i >= responses.len() || i >= projections.len()) {
            return None;
        }
        // Identical responses are reproduced exactly by the direct path.
        if subset.iter().all(|&i| responses[i].as_slice() == lead.as_slice()) {
            return None;
        }
        let shape = ObjectShape::of(lead);
        let dim = shape.len();
        if lead.check_kind(kind).is_err()
            || subset
                .iter()
                .any(|&i| !projections[i].is_finite() || responses[i].as_slice().len() != dim)
        {
            return None;
        }
        let b = kernel.bandwidth();

        let mut order = subset.to_vec();
        order.sort_by(|&a, &c| projections[a].total_cmp(&projections[c]).then(a.cmp(&c)));
        let sorted: Vec<f64> = order.iter().map(|&i| projections[i]).collect();
        let center = 0.5 * (sorted[0] + sorted[sorted.len() - 1]);
        let mut rank = vec![usize::MAX; projections.len()];
        for (pos, &i) in order.iter().enumerate() {
            rank[i] = pos;
        }

        let m = order.len();
        let mut scalar: [Vec<f64>; 5] = std::array::from_fn(|_| Vec::with_capacity(m + 1));
        let mut vector: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity((m + 1) * dim));
        for s in scalar.iter_mut() {
            s.push(0.0);
        }
        for v in vector.iter_mut() {
            v.extend(std::iter::repeat_n(0.0, dim));
        }
        for (k, &i) in order.iter().enumerate() {
            let u = (projections[i] - center) / b;
            let powers = [1.0, u, u * u, u * u * u, u * u * u * u];
            for r in 0..5 {
                let prev = scalar[r][k];
                scalar[r].push(prev + powers[r]);
            }
            let y = responses[i].as_slice();
            for r in 0..4 {
                let base = k * dim;
                for d in 0..dim {
                    let prev = vector[r][base + d];
                    vector[r].push(prev + powers[r] * y[d]);
                }
            }
        }
        Some(Prefix {
            shape,
            dim,
            center,
            sorted,
            rank,
            scalar,
            vector,
        })
    }

    /// `None` hands the target over to the direct path.
    fn fit(&self, t: f64, skip: Option<usize>, n: usize, kernel: &KernelSpec) -> Option<ObjectValue> {
        project_to_space(&self.raw(t, skip, n, kernel)?, &self.shape).ok()
    }

    /// Squared distance from `y` to the fit, skipping the allocation of an
    /// object for Euclidean responses.
    fn loss(&self, t: f64, skip: Option<usize>, n: usize, kernel: &KernelSpec, y: &ObjectValue) -> Option<f64> {
        let raw = self.raw(t, skip, n, kernel)?;
        if let ObjectShape::Euclidean(_) = self.shape {
            return Some(raw.iter().zip(y.as_slice()).map(|(a, b)| (a - b) * (a - b)).sum());
        }
        let fit = project_to_space(&raw, &self.shape).ok()?;
        Some(dist_sq(y, &fit))
    }

    /// Unprojected weighted average of the responses.
    fn raw(&self, t: f64, skip: Option<usize>, n: usize, kernel: &KernelSpec) -> Option<Vec<f64>> {
        if !t.is_finite() || n < 2 {
            return None;
        }
        let b = kernel.bandwidth();
        let lo = self.sorted.partition_point(|&x| x <= t - b);
        let hi = self.sorted.partition_point(|&x| x < t + b);
        let skip = skip.filter(|&p| p >= lo && p < hi);
        if hi - lo < 2 + usize::from(skip.is_some()) {
            return None;
        }
        let v = (t - self.center) / b;

        let mut s = [0.0; 5];
        for (r, sr) in s.iter_mut().enumerate() {
            *sr = self.scalar[r][hi] - self.scalar[r][lo];
        }
        if let Some(p) = skip {
            let u = (self.sorted[p] - self.center) / b;
            let mut pw = 1.0;
            for sr in s.iter_mut() {
                *sr -= pw;
                pw *= u;
            }
        }
        // E_j = Σ eʲ with e = u − v.
        let e = shift_moments(&s, v);
        let (m0, m1, m2) = (e[0] - e[2], e[1] - e[3], e[2] - e[4]);
        let det = m2 * m0 - m1 * m1;
        let scale = 0.75 / n as f64;
        if !(det > RELATIVE_DET_FLOOR * m0 * m2) || !(scale * scale * det > SIGMA0_FLOOR) || !(m0 > 0.0) {
            return None;
        }

        let dim = self.dim;
        let mut raw = vec![0.0; dim];
        let skip_u = skip.map(|p| (p, (self.sorted[p] - self.center) / b));
        for (d, out) in raw.iter_mut().enumerate() {
            let mut f = [0.0; 4];
            for (r, fr) in f.iter_mut().enumerate() {
                *fr = self.vector[r][hi * dim + d] - self.vector[r][lo * dim + d];
            }
            if let Some((p, u)) = skip_u {
                let y = (self.vector[0][(p + 1) * dim + d]) - self.vector[0][p * dim + d];
                let mut pw = 1.0;
                for fr in f.iter_mut() {
                    *fr -= pw * y;
                    pw *= u;
                }
            }
            let g = shift_moments4(&f, v);
            let (v0, v1) = (g[0] - g[2], g[1] - g[3]);
            *out = (m2 * v0 - m1 * v1) / det;
        }
        Some(raw)
    }
}

/// `Σ (u − v)ʲ` for j = 0..=4 from the power sums `Σ uʳ`.
fn shift_moments(s: &[f64; 5], v: f64) -> [f64; 5] {
    let w = -v;
    let w2 = w * w;
    let w3 = w2 * w;
    let w4 = w3 * w;
    [
        s[0],
        s[1] + w * s[0],
        s[2] + 2.0 * w * s[1] + w2 * s[0],
        s[3] + 3.0 * w * s[2] + 3.0 * w2 * s[1] + w3 * s[0],
        s[4] + 4.0 * w * s[3] + 6.0 * w2 * s[2] + 4.0 * w3 * s[1] + w4 * s[0],
    ]
}

fn shift_moments4(s: &[f64; 4], v: f64) -> [f64; 4] {
    let w = -v;
    let w2 = w * w;
    [
        s[0],
        s[1] + w * s[0],
        s[2] + 2.0 * w * s[1] + w2 * s[0],
        s[3] + 3.0 * w * s[2] + 3.0 * w2 * s[1] + w2 * w * s[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_frechet::llfr_fit_at;
    use crate::metric_spaces::{distance, ProbGrid, QuantileFunction};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quantile_sample(n: usize, seed: u64) -> (Vec<ObjectValue>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = ProbGrid::equispaced(21, 0.01, 0.99).unwrap();
        let t: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
        let y = t
            .iter()
            .map(|&ti| {
                let mu = ti + rng.random_range(-0.5..0.5);
                let sd = rng.random_range(0.2..1.0);
                let v = grid.probs().iter().map(|p| mu + sd * (p - 0.5)).collect();
                QuantileFunction::new(grid.clone(), v).unwrap().into()
            })
            .collect();
        (y, t)
    }

    #[test]
    fn agrees_with_direct_fits() {
        let (y, t) = quantile_sample(150, 3);
        for b in [0.1, 0.4, 2.0] {
            let k = KernelSpec::epanechnikov(b).unwrap();
            let s = Smoother::new(&y, &t, k, MetricSpaceKind::Wasserstein2);
            assert!(s.is_fast());
            for x in [-1.4, -0.3, 0.0, 0.77, 1.49] {
                let direct = llfr_fit_at(&y, &t, x, &k, MetricSpaceKind::Wasserstein2).unwrap();
                let fast = s.fit_at(x).unwrap();
                let d = distance(&direct, &fast, MetricSpaceKind::Wasserstein2).unwrap();
                assert!(d < 1e-9, "b = {b}, t = {x}: {d}");
            }
        }
    }

    #[test]
    fn leave_one_out_agrees() {
        let (y, t) = quantile_sample(60, 9);
        let k = KernelSpec::epanechnikov(0.5).unwrap();
        let s = Smoother::new(&y, &t, k, MetricSpaceKind::Wasserstein2);
        for i in [0, 17, 59] {
            let rest: Vec<usize> = (0..60).filter(|&j| j != i).collect();
            let direct = llfr_fit_subset(&y, &t, &rest, t[i], &k, MetricSpaceKind::Wasserstein2).unwrap();
            let fast = s.fit_without(t[i], i).unwrap();
            assert!(distance(&direct, &fast, MetricSpaceKind::Wasserstein2).unwrap() < 1e-9);
        }
    }

    #[test]
    fn sparse_windows_fall_back() {
        let y: Vec<ObjectValue> = [0.0, 1.0, 5.0].iter().map(|&v| ObjectValue::scalar(v)).collect();
        let t = [0.0, 1.0, 10.0];
        let k = KernelSpec::epanechnikov(0.5).unwrap();
        let s = Smoother::new(&y, &t, k, MetricSpaceKind::Euclidean);
        // one observation exactly at the target: the direct path's point mass
        assert_eq!(s.fit_at(10.0).unwrap(), y[2]);
        assert!(s.fit_at(5.0).is_err());
    }
}
