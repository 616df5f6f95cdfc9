/// A closed interval on the extended reals.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lb: f64,
    pub ub: f64,
}

impl Interval {
    pub fn new(lb: f64, ub: f64) -> Self {
        debug_assert!(lb <= ub || lb.is_nan() || ub.is_nan(), "interval bounds out of order: [{lb}, {ub}]");
        Interval { lb, ub }
    }

    pub fn point(x: f64) -> Self {
        Interval { lb: x, ub: x }
    }

    pub fn width(&self) -> f64 {
        self.ub - self.lb
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lb <= x && x <= self.ub
    }

    /// Containment allowing `slack` scaled by `max(1, |x|)` on either side.
    pub fn contains_within(&self, x: f64, slack: f64) -> bool {
        let s = slack * x.abs().max(1.0);
        self.lb - s <= x && x <= self.ub + s
    }

    /// Whether `self` is a subset of `other`, up to `slack` on each end.
    pub fn is_within(&self, other: &Interval, slack: f64) -> bool {
        other.lb - slack <= self.lb && self.ub <= other.ub + slack
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lb = self.lb.max(other.lb);
        let ub = self.ub.min(other.ub);
        (lb <= ub).then_some(Interval { lb, ub })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment_and_nesting() {
        let outer = Interval::new(0.5, 2.0);
        let inner = Interval::new(0.7, 1.5);
        assert!(outer.contains(0.5) && outer.contains(2.0) && !outer.contains(2.1));
        assert!(inner.is_within(&outer, 0.0));
        assert!(!outer.is_within(&inner, 0.0));
        assert!(Interval::new(0.0, f64::INFINITY).contains(1e300));
        assert_eq!(outer.intersect(&inner), Some(inner));
        assert_eq!(inner.intersect(&Interval::new(3.0, 4.0)), None);
    }

    #[test]
    fn slack_is_relative_above_one() {
        let iv = Interval::point(100.0);
        assert!(iv.contains_within(100.0 + 1e-9, 1e-10 * 100.0));
        assert!(!iv.contains_within(100.1, 1e-10));
    }
}
