use crate::error::{Error, Result};
use crate::scalar::Real;

/// Impulse instants `t_1 < ... < t_k` in one period, repeated with
/// `t_{j+k} = t_j + period`.
///
/// Global indices are zero based: index `j` lives in slot `j mod k` of cycle
/// `floor(j / k)`, so index 0 is the first instant at or after time 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseSchedule<F> {
    base_times: Vec<F>,
    period: F,
}

impl<F: Real> ImpulseSchedule<F> {
    /// Schedule with unit period satisfying `0 < t_1 < ... < t_k < 1`.
    pub fn unit(base_times: Vec<F>) -> Result<Self> {
        let s = Self::with_period(base_times, F::one())?;
        s.check_unit_condition()?;
        Ok(s)
    }

    /// General periodic schedule with base times in `[0, period)`.
    ///
    /// Admits instants at `t = 0` (as in `t_j = j pi / 4`); use
    /// [`check_unit_condition`](Self::check_unit_condition) where the stricter
    /// ordering is required.
    pub fn with_period(base_times: Vec<F>, period: F) -> Result<Self> {
        if !(period.is_finite() && period > F::zero()) {
            return Err(Error::ScheduleOrdering(format!("period {period} must be positive")));
        }
        if base_times.is_empty() {
            return Err(Error::ScheduleOrdering("at least one impulse time is required".into()));
        }
        for (i, &t) in base_times.iter().enumerate() {
            if !(t.is_finite() && t >= F::zero() && t < period) {
                return Err(Error::ScheduleOrdering(format!(
                    "time #{} = {t} lies outside [0, {period})",
                    i + 1
                )));
            }
            if i > 0 && base_times[i - 1] >= t {
                return Err(Error::ScheduleOrdering(format!(
                    "times must increase strictly, got {} then {t}",
                    base_times[i - 1]
                )));
            }
        }
        Ok(Self { base_times, period })
    }

    /// Checks `period = 1` and `0 < t_1 < ... < t_k < 1`.
    pub fn check_unit_condition(&self) -> Result<()> {
        if self.period != F::one() {
            return Err(Error::ScheduleOrdering(format!(
                "period must be 1, got {}",
                self.period
            )));
        }
        if self.base_times[0] <= F::zero() {
            return Err(Error::ScheduleOrdering(format!(
                "first time must be positive, got {}",
                self.base_times[0]
            )));
        }
        Ok(())
    }

    pub fn base_times(&self) -> &[F] {
        &self.base_times
    }

    pub fn period(&self) -> F {
        self.period
    }

    /// Number of impulses per period.
    pub fn len(&self) -> usize {
        self.base_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base_times.is_empty()
    }

    /// Slot of global index `j` within the period.
    pub fn slot(&self, j: i64) -> usize {
        j.rem_euclid(self.len() as i64) as usize
    }

    /// Time of the impulse with global index `j`.
    pub fn time(&self, j: i64) -> F {
        let k = self.len() as i64;
        let cycle = j.div_euclid(k);
        self.base_times[self.slot(j)] + self.period * F::lit(cycle as f64)
    }

    fn cycle_of(&self, t: F) -> i64 {
        (t / self.period).floor().to_f64_lossy() as i64
    }

    /// Smallest index whose time is strictly greater than `t`.
    pub fn next_after(&self, t: F) -> i64 {
        let k = self.len() as i64;
        let mut j = (self.cycle_of(t) - 1) * k;
        while self.time(j) <= t {
            j += 1;
        }
        j
    }

    /// Largest index whose time is strictly less than `t`.
    pub fn prev_before(&self, t: F) -> i64 {
        let k = self.len() as i64;
        let mut j = (self.cycle_of(t) + 2) * k;
        while self.time(j) >= t {
            j -= 1;
        }
        j
    }

    /// Index of the impulse at exactly `t`, if any.
    pub fn index_at(&self, t: F) -> Option<i64> {
        let j = self.next_after(t) - 1;
        (self.time(j) == t).then_some(j)
    }

    /// Impulse indices with times in the half-open interval `(a, b]`.
    pub fn indices_in(&self, a: F, b: F) -> std::ops::Range<i64> {
        let first = self.next_after(a);
        let mut last = first;
        while self.time(last) <= b {
            last += 1;
        }
        first..last
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_condition_enforced() {
        assert!(ImpulseSchedule::unit(vec![0.25, 0.5]).is_ok());
        assert!(ImpulseSchedule::unit(vec![0.0, 0.5]).is_err());
        assert!(ImpulseSchedule::unit(vec![0.5, 0.5]).is_err());
        assert!(ImpulseSchedule::unit(vec![0.6, 0.5]).is_err());
        assert!(ImpulseSchedule::unit(vec![0.5, 1.0]).is_err());
        assert!(ImpulseSchedule::<f64>::unit(vec![]).is_err());
        let s = ImpulseSchedule::with_period(vec![0.0], PI / 4.0).unwrap();
        assert!(s.check_unit_condition().is_err());
    }

    #[test]
    fn periodic_extension() {
        let s = ImpulseSchedule::unit(vec![0.25, 0.75]).unwrap();
        assert_eq!(s.time(0), 0.25);
        assert_eq!(s.time(1), 0.75);
        assert_eq!(s.time(2), 1.25);
        assert_eq!(s.time(-1), -0.25);
        assert_eq!(s.time(-2), -0.75);
        for j in -10..10 {
            assert_eq!(s.time(j + 2), s.time(j) + 1.0);
        }
    }

    #[test]
    fn neighbours_are_strict() {
        let s = ImpulseSchedule::unit(vec![0.25, 0.75]).unwrap();
        assert_eq!(s.next_after(0.25), 1);
        assert_eq!(s.next_after(0.2), 0);
        assert_eq!(s.prev_before(0.25), -1);
        assert_eq!(s.prev_before(0.3), 0);
        assert_eq!(s.next_after(-3.1), -6);
        assert_eq!(s.prev_before(7.0), 13);
        assert_eq!(s.index_at(1.75), Some(3));
        assert_eq!(s.index_at(1.7), None);
        assert_eq!(s.indices_in(0.0, 1.0), 0..2);
        assert_eq!(s.indices_in(0.25, 1.25), 1..3);
    }

    #[test]
    fn quarter_pi_schedule() {
        let s = ImpulseSchedule::with_period(vec![0.0], PI / 4.0).unwrap();
        assert_eq!(s.next_after(0.0), 1);
        assert_eq!(s.time(1), PI / 4.0);
        assert_eq!(s.prev_before(0.0), -1);
    }
}
