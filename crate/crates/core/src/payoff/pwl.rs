use super::PayoffError;

/// Breakpoint x-values closer than this are merged when composing.
pub const MERGE_TOL: f64 = 1e-12;
/// Arguments this far outside the domain are clamped instead of rejected.
pub const DOMAIN_TOL: f64 = 1e-12;

/// A continuous non-decreasing piecewise-linear map on `[lo, hi]`.
///
/// Stored as breakpoints with strictly increasing x; the first x is `lo` and
/// the last is `hi`. Evaluation is exact at breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearMap {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinearMap {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, PayoffError> {
        if points.len() < 2 {
            return Err(PayoffError::Invalid("a piecewise-linear map needs at least two breakpoints".into()));
        }
        if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(PayoffError::Invalid("breakpoints must be finite".into()));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(PayoffError::Invalid(format!(
                    "breakpoint x-values must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(PayoffError::Invalid(format!(
                    "map must be non-decreasing ({} > {} on [{}, {}])",
                    w[0].1, w[1].1, w[0].0, w[1].0
                )));
            }
        }
        Ok(Self { points })
    }

    /// `x ↦ slope·x + intercept` on `[lo, hi]`.
    pub fn affine(lo: f64, hi: f64, slope: f64, intercept: f64) -> Result<Self, PayoffError> {
        Self::new(vec![(lo, slope * lo + intercept), (hi, slope * hi + intercept)])
    }

    pub fn identity(lo: f64, hi: f64) -> Result<Self, PayoffError> {
        Self::new(vec![(lo, lo), (hi, hi)])
    }

    pub fn constant(lo: f64, hi: f64, c: f64) -> Result<Self, PayoffError> {
        Self::new(vec![(lo, c), (hi, c)])
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lo(&self) -> f64 {
        self.points[0].0
    }

    pub fn hi(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// `(f(lo), f(hi))`, the range of a non-decreasing map.
    pub fn range(&self) -> (f64, f64) {
        (self.points[0].1, self.points[self.points.len() - 1].1)
    }

    pub fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
    }

    pub fn max_slope(&self) -> f64 {
        self.slopes().fold(0.0, f64::max)
    }

    pub fn is_self_map(&self) -> bool {
        let (a, b) = self.range();
        a >= self.lo() - DOMAIN_TOL && b <= self.hi() + DOMAIN_TOL
    }

    pub fn eval(&self, x: f64) -> Result<f64, PayoffError> {
        if !(x >= self.lo() - DOMAIN_TOL && x <= self.hi() + DOMAIN_TOL) {
            return Err(PayoffError::Domain { x, lo: self.lo(), hi: self.hi() });
        }
        Ok(self.eval_clamped(x))
    }

    /// Evaluates after clamping `x` into the domain.
    pub fn eval_clamped(&self, x: f64) -> f64 {
        let pts = &self.points;
        let x = x.clamp(self.lo(), self.hi());
        // first index with point.x > x
        let i = pts.partition_point(|p| p.0 <= x);
        if i == 0 {
            return pts[0].1;
        }
        let (x0, y0) = pts[i - 1];
        if x == x0 || i == pts.len() {
            return y0;
        }
        let (x1, y1) = pts[i];
        let y = y0 + (x - x0) * (y1 - y0) / (x1 - x0);
        y.clamp(y0, y1)
    }

    /// `self ∘ inner`, with breakpoints at `inner`'s breakpoints and at the
    /// preimages of `self`'s breakpoints.
    pub fn compose(&self, inner: &PiecewiseLinearMap) -> Result<PiecewiseLinearMap, PayoffError> {
        let (r0, r1) = inner.range();
        if r0 < self.lo() - DOMAIN_TOL || r1 > self.hi() + DOMAIN_TOL {
            return Err(PayoffError::DomainMismatch(format!(
                "inner range [{r0}, {r1}] is not within outer domain [{}, {}]",
                self.lo(),
                self.hi()
            )));
        }
        let outer = &self.points;
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.len() + inner.len());
        let push = |out: &mut Vec<(f64, f64)>, x: f64, y: f64| match out.last_mut() {
            Some(last) if x - last.0 <= MERGE_TOL => {}
            _ => out.push((x, y)),
        };
        let mut j = 0; // outer breakpoint cursor
        for w in inner.points.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            push(&mut out, x0, self.eval_clamped(y0));
            if y1 > y0 {
                while j < outer.len() && outer[j].0 <= y0 {
                    j += 1;
                }
                while j < outer.len() && outer[j].0 < y1 {
                    let (b, fb) = outer[j];
                    let x = x0 + (b - y0) * (x1 - x0) / (y1 - y0);
                    if x1 - x > MERGE_TOL {
                        push(&mut out, x, fb);
                    }
                    j += 1;
                }
            }
        }
        let (xl, yl) = inner.points[inner.len() - 1];
        let yl = self.eval_clamped(yl);
        match out.last_mut() {
            Some(last) if xl - last.0 <= MERGE_TOL => *last = (xl, yl),
            _ => out.push((xl, yl)),
        }
        if out.len() < 2 {
            return Err(PayoffError::Invalid("composition collapsed to a single point".into()));
        }
        // round-off can break monotonicity by an ulp
        for i in 1..out.len() {
            if out[i].1 < out[i - 1].1 {
                out[i].1 = out[i - 1].1;
            }
        }
        Ok(PiecewiseLinearMap { points: out })
    }

    /// The unique fixed point of a contracting map, solved exactly on the
    /// piece where `f(x) - x` changes sign.
    pub fn fixed_point(&self) -> Result<f64, PayoffError> {
        let slope = self.max_slope();
        if !(slope < 1.0) {
            return Err(PayoffError::Contract { slope, margin: 0.0 });
        }
        let pts = &self.points;
        let h = |i: usize| pts[i].1 - pts[i].0;
        if h(0) <= 0.0 {
            return Ok(pts[0].0);
        }
        for i in 1..pts.len() {
            let hi = h(i);
            if hi == 0.0 {
                return Ok(pts[i].0);
            }
            if hi < 0.0 {
                let (x0, x1) = (pts[i - 1].0, pts[i].0);
                let h0 = h(i - 1);
                let x = x0 + h0 * (x1 - x0) / (h0 - hi);
                return Ok(x.clamp(x0, x1));
            }
        }
        Ok(pts[pts.len() - 1].0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> PiecewiseLinearMap {
        PiecewiseLinearMap::new(vec![(0.0, 0.0), (0.26, 0.11), (0.49, 0.26), (1.0, 0.49)]).unwrap()
    }

    fn half(c: f64) -> PiecewiseLinearMap {
        PiecewiseLinearMap::affine(0.0, 1.0, 0.5, c).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(f2().eval(0.26).unwrap(), 0.11);
        assert_eq!(PiecewiseLinearMap::identity(0.0, 1.0).unwrap().eval(0.5).unwrap(), 0.5);
        assert!((f2().eval(0.745).unwrap() - 0.375).abs() < 1e-15);
        assert_eq!(f2().eval(1.0 + 5e-13).unwrap(), 0.49);
        assert!(matches!(f2().eval(1.1), Err(PayoffError::Domain { .. })));
        assert!(f2().eval(f64::NAN).is_err());
    }

    #[test]
    fn construction_errors() {
        assert!(PiecewiseLinearMap::new(vec![(0.0, 0.0)]).is_err());
        assert!(PiecewiseLinearMap::new(vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
        assert!(PiecewiseLinearMap::new(vec![(0.0, 1.0), (1.0, 0.5)]).is_err());
    }

    #[test]
    fn compose_examples() {
        let c = half(0.0).compose(&half(0.0)).unwrap();
        for x in [0.0, 0.3, 1.0] {
            assert!((c.eval(x).unwrap() - x / 4.0).abs() < 1e-15);
        }
        let c = half(0.0).compose(&half(0.5)).unwrap();
        for x in [0.0, 0.3, 1.0] {
            assert!((c.eval(x).unwrap() - (x / 4.0 + 0.25)).abs() < 1e-15);
        }
        let id = PiecewiseLinearMap::identity(0.0, 1.0).unwrap();
        assert_eq!(f2().compose(&id).unwrap(), f2());
    }

    #[test]
    fn compose_breakpoint_count_and_slopes() {
        let g = f2().compose(&f2()).unwrap();
        assert!(g.len() <= 2 * f2().len());
        // slope of the composite is a product of slopes
        let max = f2().max_slope();
        assert!(g.max_slope() <= max * max + 1e-12);
    }

    #[test]
    fn compose_rejects_range_outside_domain() {
        let wide = PiecewiseLinearMap::affine(0.0, 2.0, 0.5, 1.0).unwrap();
        assert!(matches!(f2().compose(&wide), Err(PayoffError::DomainMismatch(_))));
    }

    #[test]
    fn fixed_points() {
        assert_eq!(half(0.5).fixed_point().unwrap(), 1.0);
        assert_eq!(half(0.0).fixed_point().unwrap(), 0.0);
        assert_eq!(f2().fixed_point().unwrap(), 0.0);
        let g = PiecewiseLinearMap::affine(0.0, 1.0, 0.25, 0.3).unwrap();
        assert!((g.fixed_point().unwrap() - 0.4).abs() < 1e-15);
        let id = PiecewiseLinearMap::identity(0.0, 1.0).unwrap();
        assert!(matches!(id.fixed_point(), Err(PayoffError::Contract { .. })));
    }
}
