//! Piecewise-linear CDFs on `[0, 1]` with strictly positive density.
//!
//! Every integral downstream (benchmark values, per-cost bounds, the lemma
//! decomposition) reduces to closed-form polynomials over the knot segments,
//! so nothing in the crate depends on generic quadrature error. Distributions
//! are immutable after construction and safe to share across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// A continuous CDF on `[0, 1]`, linear between knots, with positive density
/// on every segment.
///
/// Knots are `(x, q)` pairs with both coordinates strictly increasing, the
/// first knot pinned at `(0, 0)` and the last at `(1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    xs: Vec<f64>,
    qs: Vec<f64>,
}

/// Affine change of variable between an original support `[lo, hi]` and the
/// unit interval. Gains-from-trade values scale by `scale()` when both sides
/// of an instance are mapped by the same `AffineMap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub lo: f64,
    pub hi: f64,
}

impl AffineMap {
    pub fn identity() -> Self {
        AffineMap { lo: 0.0, hi: 1.0 }
    }

    pub fn is_identity(&self) -> bool {
        self.lo == 0.0 && self.hi == 1.0
    }

    /// Width of the original support; multiplies unit-domain GFT values.
    pub fn scale(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn to_unit(&self, t: f64) -> f64 {
        (t - self.lo) / (self.hi - self.lo)
    }

    pub fn from_unit(&self, u: f64) -> f64 {
        self.lo + u * (self.hi - self.lo)
    }
}

/// An independent buyer/seller pair: buyer values drawn from `buyer` (F),
/// seller costs from `seller` (G).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    pub buyer: Distribution,
    pub seller: Distribution,
}

impl Instance {
    pub fn new(buyer: Distribution, seller: Distribution) -> Self {
        Instance { buyer, seller }
    }

    pub fn uniform_uniform() -> Self {
        Instance::new(Distribution::uniform(), Distribution::uniform())
    }
}

impl Distribution {
    /// Validating constructor from `(value, cumulative probability)` knots.
    pub fn from_knots(knots: &[(f64, f64)]) -> Result<Self> {
        Self::from_knots_on(knots, 0.0, 1.0)
    }

    fn from_knots_on(knots: &[(f64, f64)], lo: f64, hi: f64) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::TooFewKnots(knots.len()));
        }
        let first = knots[0];
        let last = knots[knots.len() - 1];
        if first != (lo, 0.0) || last != (hi, 1.0) {
            return Err(Error::BadEndpoints { lo, hi });
        }
        for (i, w) in knots.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(Error::NonMonotone { coord: "x", index: i });
            }
            if w[1].1 <= w[0].1 {
                return Err(Error::NonMonotone { coord: "q", index: i });
            }
        }
        let width = hi - lo;
        let xs = knots.iter().map(|k| (k.0 - lo) / width).collect();
        let qs = knots.iter().map(|k| k.1).collect();
        let mut d = Distribution { xs, qs };
        // Affine mapping can leave the endpoints a few ulps off; re-pin them.
        d.xs[0] = 0.0;
        *d.xs.last_mut().unwrap() = 1.0;
        Ok(d)
    }

    /// The uniform distribution U[0, 1]: the identity CDF.
    pub fn uniform() -> Self {
        Distribution {
            xs: vec![0.0, 1.0],
            qs: vec![0.0, 1.0],
        }
    }

    /// Fit a piecewise-linear CDF to an arbitrary CDF on `[0, 1]` by
    /// interpolation at `knots` equally spaced abscissae (default 256).
    /// Endpoint values are normalized so the result is a valid CDF.
    pub fn fit(cdf: impl Fn(f64) -> f64, knots: usize) -> Result<Self> {
        if knots < 2 {
            return Err(Error::TooFewKnots(knots));
        }
        let n = knots;
        let f0 = cdf(0.0);
        let f1 = cdf(1.0);
        if f1 <= f0 {
            return Err(Error::NonMonotone { coord: "q", index: 0 });
        }
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = i as f64 / (n - 1) as f64;
                let q = if i == 0 {
                    0.0
                } else if i == n - 1 {
                    1.0
                } else {
                    (cdf(x) - f0) / (f1 - f0)
                };
                (x, q)
            })
            .collect();
        Self::from_knots(&pts)
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.qs.iter().copied())
    }

    pub fn knot_count(&self) -> usize {
        self.xs.len()
    }

    /// Knot x-coordinates; these are the breakpoints of the density.
    pub fn knot_values(&self) -> &[f64] {
        &self.xs
    }

    pub fn knot_probabilities(&self) -> &[f64] {
        &self.qs
    }

    /// Index of the segment containing `x`, for `x` in `[0, 1]`.
    fn segment_of(&self, x: f64) -> usize {
        // partition_point returns the first knot strictly above x.
        let i = self.xs.partition_point(|&xi| xi <= x);
        i.clamp(1, self.xs.len() - 1) - 1
    }

    fn segment_of_q(&self, q: f64) -> usize {
        let i = self.qs.partition_point(|&qi| qi <= q);
        i.clamp(1, self.qs.len() - 1) - 1
    }

    /// Density on the segment containing `x` (takes the containing segment's
    /// slope; at a knot this is the right-hand density except at `x = 1`).
    pub fn density(&self, x: f64) -> f64 {
        let s = self.segment_of(x);
        (self.qs[s + 1] - self.qs[s]) / (self.xs[s + 1] - self.xs[s])
    }

    /// F(x), by linear interpolation on the containing segment.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfSupport(x));
        }
        Ok(self.cdf_at(x))
    }

    #[inline]
    pub(crate) fn cdf_at(&self, x: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x));
        let s = self.segment_of(x);
        if x == self.xs[s] {
            return self.qs[s];
        }
        let t = (x - self.xs[s]) / (self.xs[s + 1] - self.xs[s]);
        self.qs[s] + t * (self.qs[s + 1] - self.qs[s])
    }

    /// F^(-1)(q); unique because the CDF is strictly increasing.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::OutOfRange(q));
        }
        Ok(self.quantile_at(q))
    }

    #[inline]
    pub(crate) fn quantile_at(&self, q: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&q));
        let s = self.segment_of_q(q);
        if q == self.qs[s] {
            return self.xs[s];
        }
        let t = (q - self.qs[s]) / (self.qs[s + 1] - self.qs[s]);
        self.xs[s] + t * (self.xs[s + 1] - self.xs[s])
    }

    /// Exact partial expectation `∫_a^b v dF(v)`, summed segment by segment
    /// (the density is constant on each segment).
    pub fn partial_expectation(&self, a: f64, b: f64) -> Result<f64> {
        if a > b {
            return Err(Error::BadRange { lo: a, hi: b });
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::OutOfSupport(a));
        }
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::OutOfSupport(b));
        }
        Ok(self.partial_expectation_at(a, b))
    }

    pub(crate) fn partial_expectation_at(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut total = 0.0;
        let first = self.segment_of(a);
        for s in first..self.xs.len() - 1 {
            let lo = self.xs[s].max(a);
            let hi = self.xs[s + 1].min(b);
            if hi <= lo {
                if self.xs[s] >= b {
                    break;
                }
                continue;
            }
            let density = (self.qs[s + 1] - self.qs[s]) / (self.xs[s + 1] - self.xs[s]);
            total += density * 0.5 * (hi * hi - lo * lo);
        }
        total
    }

    /// Mean of the distribution.
    pub fn mean(&self) -> f64 {
        self.partial_expectation_at(0.0, 1.0)
    }

    /// The conditional distribution of `v` given `v >= x`, renormalized.
    ///
    /// The returned `Distribution` lives on the unit interval; the paired
    /// `AffineMap` records the real support `[x, 1]`, so the conditional CDF
    /// at an original point `t` is `dist.cdf(map.to_unit(t))`.
    pub fn conditional_above(&self, x: f64) -> Result<(Distribution, AffineMap)> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfSupport(x));
        }
        if x >= 1.0 {
            return Err(Error::DegenerateTruncation);
        }
        if x == 0.0 {
            return Ok((self.clone(), AffineMap::identity()));
        }
        let qx = self.cdf_at(x);
        let residual = 1.0 - qx;
        let map = AffineMap { lo: x, hi: 1.0 };
        let mut knots: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        let seg = self.segment_of(x);
        for i in seg + 1..self.xs.len() {
            let u = map.to_unit(self.xs[i]);
            let q = ((self.qs[i] - qx) / residual).min(1.0);
            if u > knots.last().unwrap().0 && q > knots.last().unwrap().1 {
                knots.push((u, q));
            }
        }
        let last = knots.last_mut().unwrap();
        *last = (1.0, 1.0);
        let dist = Distribution::from_knots(&knots)?;
        Ok((dist, map))
    }

    /// Mirror image under `x -> 1 - x`: if `v` has this CDF then `1 - v` has
    /// the reflected one.
    pub fn reflected(&self) -> Distribution {
        let n = self.xs.len();
        let xs = (0..n).map(|i| 1.0 - self.xs[n - 1 - i]).collect();
        let qs = (0..n).map(|i| 1.0 - self.qs[n - 1 - i]).collect();
        let mut d = Distribution { xs, qs };
        d.xs[0] = 0.0;
        d.qs[0] = 0.0;
        *d.xs.last_mut().unwrap() = 1.0;
        *d.qs.last_mut().unwrap() = 1.0;
        d
    }

    /// `n` inverse-transform samples from a seeded ChaCha8 stream.
    ///
    /// The generator is pinned (ChaCha8, 64-bit seed, one `f64` in `[0, 1)`
    /// per sample) so identical `(seed, n)` always reproduce the same output.
    pub fn sample(&self, seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.quantile_at(rng.gen::<f64>())).collect()
    }
}

/// Validate knots on an arbitrary support `[lo, hi]` and translate them to
/// the unit interval, returning the affine map that undoes the translation.
pub fn rescale_to_unit(knots: &[(f64, f64)]) -> Result<(Distribution, AffineMap)> {
    if knots.len() < 2 {
        return Err(Error::TooFewKnots(knots.len()));
    }
    let lo = knots[0].0;
    let hi = knots[knots.len() - 1].0;
    if lo >= hi {
        return Err(Error::DegenerateSupport);
    }
    let dist = Distribution::from_knots_on(knots, lo, hi)?;
    Ok((dist, AffineMap { lo, hi }))
}

// --- JSON wire format -------------------------------------------------------
//
// A distribution document is
//   {"type": "piecewise_linear_cdf", "knots": [[x, q], ...]}
// with an optional "support": [lo, hi] whose presence rescales the knots to
// the unit interval on load. Unknown fields are rejected.

const DIST_TYPE: &str = "piecewise_linear_cdf";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionDoc {
    #[serde(rename = "type")]
    kind: String,
    knots: Vec<[f64; 2]>,
    #[serde(default)]
    support: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    buyer: DistributionDoc,
    seller: DistributionDoc,
}

fn realize(doc: &DistributionDoc) -> Result<(Distribution, AffineMap)> {
    if doc.kind != DIST_TYPE {
        return Err(Error::Format(format!(
            "unsupported distribution type `{}`",
            doc.kind
        )));
    }
    let knots: Vec<(f64, f64)> = doc.knots.iter().map(|k| (k[0], k[1])).collect();
    match doc.support {
        None => Ok((Distribution::from_knots(&knots)?, AffineMap::identity())),
        Some([lo, hi]) => {
            let (dist, map) = rescale_to_unit(&knots)?;
            if map.lo != lo || map.hi != hi {
                return Err(Error::Format(format!(
                    "declared support [{lo}, {hi}] does not match knot range [{}, {}]",
                    map.lo, map.hi
                )));
            }
            Ok((dist, map))
        }
    }
}

/// Parse a single distribution document.
pub fn parse_distribution(json: &str) -> Result<(Distribution, AffineMap)> {
    let doc: DistributionDoc = serde_json::from_str(json)?;
    realize(&doc)
}

/// Parse an instance document `{"buyer": {...}, "seller": {...}}`.
///
/// When supports are declared they must agree between the two sides: gains
/// from trade only rescale cleanly under a common affine map, and a
/// distribution confined to part of the unit interval would violate the
/// positive-density invariant.
pub fn parse_instance(json: &str) -> Result<(Instance, AffineMap)> {
    let doc: InstanceDoc = serde_json::from_str(json)?;
    let (buyer, bmap) = realize(&doc.buyer)?;
    let (seller, smap) = realize(&doc.seller)?;
    if bmap != smap {
        return Err(Error::Format(format!(
            "buyer support [{}, {}] and seller support [{}, {}] must match",
            bmap.lo, bmap.hi, smap.lo, smap.hi
        )));
    }
    Ok((Instance::new(buyer, seller), bmap))
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        struct Knots<'a>(&'a Distribution);
        impl Serialize for Knots<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.xs.len()))?;
                for (x, q) in self.0.knots() {
                    seq.serialize_element(&[x, q])?;
                }
                seq.end()
            }
        }
        let mut st = serializer.serialize_struct("Distribution", 2)?;
        st.serialize_field("type", DIST_TYPE)?;
        st.serialize_field("knots", &Knots(self))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_segment() -> Distribution {
        Distribution::from_knots(&[(0.0, 0.0), (0.5, 0.9), (1.0, 1.0)]).unwrap()
    }

    #[test]
    fn construction_accepts_uniform_and_two_segment() {
        assert_eq!(Distribution::from_knots(&[(0.0, 0.0), (1.0, 1.0)]).unwrap().knot_count(), 2);
        assert_eq!(two_segment().knot_count(), 3);
    }

    #[test]
    fn construction_rejects_invalid_knots() {
        // Duplicate x coordinate.
        let dup = Distribution::from_knots(&[(0.0, 0.0), (0.5, 0.5), (0.5, 0.7), (1.0, 1.0)]);
        assert!(matches!(dup, Err(Error::NonMonotone { coord: "x", .. })));
        // Missing endpoints.
        let bad_end = Distribution::from_knots(&[(0.0, 0.0), (0.9, 0.9)]);
        assert!(matches!(bad_end, Err(Error::BadEndpoints { .. })));
        // Too few knots.
        assert!(matches!(
            Distribution::from_knots(&[(0.0, 0.0)]),
            Err(Error::TooFewKnots(1))
        ));
        // Flat q segment (zero density).
        let flat = Distribution::from_knots(&[(0.0, 0.0), (0.4, 0.5), (0.7, 0.5), (1.0, 1.0)]);
        assert!(matches!(flat, Err(Error::NonMonotone { coord: "q", .. })));
    }

    #[test]
    fn cdf_interpolates_linearly() {
        let u = Distribution::uniform();
        assert_eq!(u.cdf(0.3).unwrap(), 0.3);
        assert_eq!(u.cdf(1.0).unwrap(), 1.0);
        assert!((two_segment().cdf(0.25).unwrap() - 0.45).abs() < 1e-15);
        assert!(matches!(u.cdf(1.5), Err(Error::OutOfSupport(_))));
    }

    #[test]
    fn quantile_inverts_cdf() {
        let u = Distribution::uniform();
        assert_eq!(u.quantile(0.75).unwrap(), 0.75);
        assert_eq!(u.quantile(0.0).unwrap(), 0.0);
        assert!((two_segment().quantile(0.45).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(u.quantile(-0.1), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn quantile_cdf_round_trip_on_knotty_cdf() {
        let d = two_segment();
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let back = d.quantile_at(d.cdf_at(x));
            assert!((back - x).abs() < 1e-12, "x={x} back={back}");
        }
    }

    #[test]
    fn partial_expectation_closed_forms() {
        let u = Distribution::uniform();
        assert!((u.partial_expectation(0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((u.partial_expectation(0.5, 1.0).unwrap() - 0.375).abs() < 1e-15);
        assert_eq!(two_segment().partial_expectation(0.3, 0.3).unwrap(), 0.0);
        assert!(matches!(
            u.partial_expectation(0.7, 0.2),
            Err(Error::BadRange { .. })
        ));
        // Two-segment by hand: ∫_0^1 v dF = 1.8 * 0.125 + 0.2 * (0.5 - 0.125).
        let want = 1.8 * 0.125 + 0.2 * 0.375;
        assert!((two_segment().partial_expectation(0.0, 1.0).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn conditional_above_truncates_and_renormalizes() {
        let u = Distribution::uniform();
        let (d, map) = u.conditional_above(0.2).unwrap();
        assert_eq!(d, Distribution::uniform());
        assert_eq!(map, AffineMap { lo: 0.2, hi: 1.0 });
        // cdf value 0 at the truncation point, mass 1 at the top, exactly.
        assert_eq!(d.cdf(map.to_unit(0.2)).unwrap(), 0.0);
        assert_eq!(d.cdf(map.to_unit(1.0)).unwrap(), 1.0);

        let (same, id) = u.conditional_above(0.0).unwrap();
        assert_eq!(same, u);
        assert!(id.is_identity());

        // Top segment of the two-segment CDF renormalizes to uniform on [0.5, 1].
        let (top, m) = two_segment().conditional_above(0.5).unwrap();
        assert_eq!(top, Distribution::uniform());
        assert_eq!(m, AffineMap { lo: 0.5, hi: 1.0 });

        assert!(matches!(
            u.conditional_above(1.0),
            Err(Error::DegenerateTruncation)
        ));
    }

    #[test]
    fn conditional_above_midsegment_point() {
        let d = two_segment();
        let (cond, map) = d.conditional_above(0.25).unwrap();
        // Residual mass 0.55; check the conditional CDF against hand values.
        for (t, want) in [(0.25, 0.0), (0.5, 0.45 / 0.55), (1.0, 1.0)] {
            let got = cond.cdf(map.to_unit(t)).unwrap();
            assert!((got - want).abs() < 1e-12, "t={t} got={got} want={want}");
        }
    }

    #[test]
    fn reflection_is_an_involution_and_flips_mass() {
        let d = two_segment();
        let r = d.reflected();
        assert!((r.cdf(0.5).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(r.reflected(), d);
    }

    #[test]
    fn sampling_is_deterministic_and_in_support() {
        let d = two_segment();
        let a = d.sample(42, 3);
        let b = d.sample(42, 3);
        assert_eq!(a, b);
        assert_ne!(a, d.sample(43, 3));
        assert!(a.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn sample_empirical_cdf_matches_uniform() {
        // Kolmogorov distance of 10^6 uniform samples from the identity CDF.
        let n = 1_000_000;
        let mut s = Distribution::uniform().sample(7, n);
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut worst = 0.0f64;
        for (i, v) in s.iter().enumerate() {
            let hi = (i + 1) as f64 / n as f64;
            let lo = i as f64 / n as f64;
            worst = worst.max((v - lo).abs()).max((v - hi).abs());
        }
        assert!(worst < 0.005, "Kolmogorov distance {worst}");
    }

    #[test]
    fn sample_mean_matches_partial_expectation() {
        let d = two_segment();
        let n = 1_000_000;
        let samples = d.sample(11, n);
        let mean = samples.iter().sum::<f64>() / n as f64;
        let exact = d.partial_expectation(0.0, 1.0).unwrap();
        // Variance of a [0,1] variable is at most 1/4.
        let four_se = 4.0 * 0.5 / (n as f64).sqrt();
        assert!((mean - exact).abs() < four_se, "mean {mean} vs exact {exact}");
    }

    #[test]
    fn rescale_maps_supports_to_unit() {
        let (d, map) = rescale_to_unit(&[(2.0, 0.0), (4.0, 1.0)]).unwrap();
        assert_eq!(d, Distribution::uniform());
        assert_eq!(map.scale(), 2.0);

        let (d2, map2) = rescale_to_unit(&[(-1.0, 0.0), (1.0, 1.0)]).unwrap();
        assert_eq!(d2, Distribution::uniform());
        assert_eq!((map2.lo, map2.hi), (-1.0, 1.0));

        assert!(matches!(
            rescale_to_unit(&[(3.0, 0.0), (3.0, 1.0)]),
            Err(Error::DegenerateSupport) | Err(Error::NonMonotone { .. })
        ));
    }

    #[test]
    fn fit_reproduces_truncated_exponential() {
        let lambda = 2.0;
        let norm = 1.0 - (-lambda as f64).exp();
        let cdf = |x: f64| (1.0 - (-lambda * x).exp()) / norm;
        let d = Distribution::fit(cdf, 256).unwrap();
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            assert!((d.cdf(x).unwrap() - cdf(x)).abs() < 1e-4);
        }
    }

    #[test]
    fn json_round_trip_and_strictness() {
        let json = r#"{"type":"piecewise_linear_cdf","knots":[[0,0],[0.5,0.9],[1,1]]}"#;
        let (d, map) = parse_distribution(json).unwrap();
        assert_eq!(d, two_segment());
        assert!(map.is_identity());

        let out = serde_json::to_string(&d).unwrap();
        let (back, _) = parse_distribution(&out).unwrap();
        assert_eq!(back, d);

        // Unknown fields are rejected.
        let extra = r#"{"type":"piecewise_linear_cdf","knots":[[0,0],[1,1]],"mean":0.5}"#;
        assert!(parse_distribution(extra).is_err());
        // Unsupported type tag.
        let bad = r#"{"type":"beta","knots":[[0,0],[1,1]]}"#;
        assert!(matches!(parse_distribution(bad), Err(Error::Format(_))));
    }

    #[test]
    fn instance_parsing_handles_supports() {
        let json = r#"{
            "buyer": {"type":"piecewise_linear_cdf","knots":[[2,0],[4,1]],"support":[2,4]},
            "seller": {"type":"piecewise_linear_cdf","knots":[[2,0],[3,0.25],[4,1]],"support":[2,4]}
        }"#;
        let (inst, map) = parse_instance(json).unwrap();
        assert_eq!(inst.buyer, Distribution::uniform());
        assert_eq!(map.scale(), 2.0);

        let mismatched = r#"{
            "buyer": {"type":"piecewise_linear_cdf","knots":[[0,0],[1,1]]},
            "seller": {"type":"piecewise_linear_cdf","knots":[[2,0],[4,1]],"support":[2,4]}
        }"#;
        assert!(matches!(parse_instance(mismatched), Err(Error::Format(_))));

        let wrong_support = r#"{
            "buyer": {"type":"piecewise_linear_cdf","knots":[[0,0],[1,1]],"support":[0,2]},
            "seller": {"type":"piecewise_linear_cdf","knots":[[0,0],[1,1]]}
        }"#;
        assert!(parse_instance(wrong_support).is_err());
    }
}
