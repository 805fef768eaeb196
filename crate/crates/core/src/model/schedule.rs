use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Update times `0 = τ_0 < τ_1 < … < τ_N < T`. Every other step is a skip time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateSchedule {
    times: Vec<usize>,
}

impl UpdateSchedule {
    pub fn new(times: Vec<usize>, horizon: usize) -> Result<Self> {
        let schedule = Self { times };
        schedule.check(horizon)?;
        Ok(schedule)
    }

    pub fn periodic(period: usize, horizon: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::invalid("schedule period must be positive"));
        }
        Self::new((0..horizon).step_by(period).collect(), horizon)
    }

    pub fn every_step(horizon: usize) -> Result<Self> {
        Self::periodic(1, horizon)
    }

    /// Re-checks the invariants, e.g. after deserialising.
    pub fn check(&self, horizon: usize) -> Result<()> {
        match self.times.first() {
            None => return Err(Error::invalid("schedule has no update times")),
            Some(&first) if first != 0 => {
                return Err(Error::invalid("first update time must be 0"))
            }
            _ => {}
        }
        if self.times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("update times must be strictly increasing"));
        }
        if let Some(&last) = self.times.last() {
            if last >= horizon {
                return Err(Error::invalid(format!(
                    "update time {last} is outside the horizon {horizon}"
                )));
            }
        }
        Ok(())
    }

    pub fn times(&self) -> &[usize] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn time(&self, k: usize) -> usize {
        self.times[k]
    }

    pub fn is_update(&self, t: usize) -> bool {
        self.times.binary_search(&t).is_ok()
    }

    /// `k(t) = max { k : τ_k ≤ t }`.
    pub fn last_update_index(&self, t: usize) -> usize {
        match self.times.binary_search(&t) {
            Ok(k) => k,
            Err(insert) => insert - 1,
        }
    }

    /// `τ_{k(t)}`.
    pub fn last_update_time(&self, t: usize) -> usize {
        self.times[self.last_update_index(t)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn last_update_index_examples() {
        let s = UpdateSchedule::new(vec![0, 3, 5], 8).unwrap();
        assert_eq!(s.last_update_index(4), 1);
        assert_eq!(s.last_update_index(0), 0);
        for (j, &tau) in s.times().iter().enumerate() {
            assert_eq!(s.last_update_index(tau), j);
        }
        assert_eq!(s.last_update_index(7), 2);
    }

    #[test]
    fn periodic_schedules() {
        assert_eq!(UpdateSchedule::periodic(1, 5).unwrap().times(), &[0, 1, 2, 3, 4]);
        assert_eq!(UpdateSchedule::periodic(3, 8).unwrap().times(), &[0, 3, 6]);
    }

    #[test]
    fn rejects_malformed_schedules() {
        assert!(UpdateSchedule::new(vec![1, 2], 5).is_err());
        assert!(UpdateSchedule::new(vec![0, 2, 2], 5).is_err());
        assert!(UpdateSchedule::new(vec![0, 5], 5).is_err());
        assert!(UpdateSchedule::new(vec![], 5).is_err());
    }
}
