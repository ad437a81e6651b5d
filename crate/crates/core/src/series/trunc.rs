use serde::{Deserialize, Serialize};

use super::monomial::Monomial;

/// Which monomials a [`Series`](super::Series) retains.
///
/// Time-degree caps may be relaxed by a slack that grows with the unused
/// `√λ` budget: a term of `√λ`-degree `hl` may carry up to
/// `max_time_deg + per_hl · (max_hl − hl)` time factors. This is what lets
/// an intermediate result keep the higher-degree terms that later
/// `√λ`-weighted derivative operators bring back into range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncSpec {
    pub max_hl: u32,
    pub max_time_deg: u32,
    pub p_max: u32,
    pub z_window: (i32, i32),
    /// Optional cap on `Σ p·e`.
    pub max_weight: Option<u32>,
    pub slack: DegreeSlack,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSlack {
    /// Extra total time degree per unit of unused `√λ` budget.
    pub total_per_hl: u32,
    /// When set, every `(set, color)` family is capped separately at
    /// `max_time_deg + color_per_hl · (max_hl − hl)`.
    pub color_per_hl: Option<u32>,
}

impl TruncSpec {
    pub fn new(max_hl: u32, max_time_deg: u32, p_max: u32, z_window: (i32, i32)) -> Self {
        assert!(z_window.0 <= z_window.1, "empty z-window");
        TruncSpec {
            max_hl,
            max_time_deg,
            p_max,
            z_window,
            max_weight: None,
            slack: DegreeSlack::default(),
        }
    }

    /// Generous limits for exact polynomial computations.
    pub fn wide() -> Self {
        TruncSpec::new(64, 64, 64, (-1024, 1024))
    }

    pub fn with_weight(mut self, w: u32) -> Self {
        self.max_weight = Some(w);
        self
    }

    pub fn with_slack(mut self, slack: DegreeSlack) -> Self {
        self.slack = slack;
        self
    }

    pub fn with_z_window(mut self, w: (i32, i32)) -> Self {
        assert!(w.0 <= w.1, "empty z-window");
        self.z_window = w;
        self
    }

    pub fn with_max_hl(mut self, hl: u32) -> Self {
        self.max_hl = hl;
        self
    }

    pub fn with_max_time_deg(mut self, d: u32) -> Self {
        self.max_time_deg = d;
        self
    }

    pub fn with_p_max(mut self, p: u32) -> Self {
        self.p_max = p;
        self
    }

    pub fn admits(&self, m: &Monomial) -> bool {
        if m.hl > self.max_hl || m.z < self.z_window.0 || m.z > self.z_window.1 {
            return false;
        }
        if m.times.is_empty() {
            return true;
        }
        let unused = self.max_hl - m.hl;
        let deg = m.times.degree();
        if deg > self.max_time_deg + self.slack.total_per_hl * unused {
            return false;
        }
        if let Some(c) = self.slack.color_per_hl {
            if m.times.max_color_degree() > self.max_time_deg + c * unused {
                return false;
            }
        }
        if m.times.max_p() > self.p_max {
            return false;
        }
        match self.max_weight {
            Some(w) => m.times.weight() <= w,
            None => true,
        }
    }

    /// The stricter of two specs, used for products.
    pub fn meet(&self, other: &TruncSpec) -> TruncSpec {
        if self == other {
            return self.clone();
        }
        let max_weight = match (self.max_weight, other.max_weight) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let color_per_hl = match (self.slack.color_per_hl, other.slack.color_per_hl) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        TruncSpec {
            max_hl: self.max_hl.min(other.max_hl),
            max_time_deg: self.max_time_deg.min(other.max_time_deg),
            p_max: self.p_max.min(other.p_max),
            z_window: (
                self.z_window.0.max(other.z_window.0),
                self.z_window.1.min(other.z_window.1).max(self.z_window.0.max(other.z_window.0)),
            ),
            max_weight,
            slack: DegreeSlack {
                total_per_hl: self.slack.total_per_hl.min(other.slack.total_per_hl),
                color_per_hl,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::monomial::TimeVar;

    #[test]
    fn slack_grows_with_unused_lambda_budget() {
        let t = TruncSpec::new(2, 1, 4, (-5, 5)).with_slack(DegreeSlack { total_per_hl: 3, color_per_hl: Some(1) });
        let v = |c| TimeVar::new(c, 1);
        let m = Monomial::from_times(crate::series::TimeExps::from_pairs([(v(1), 3), (v(2), 3)]));
        assert!(t.admits(&m));
        assert!(!t.admits(&m.clone().with_hl(1)));
        let m2 = Monomial::from_times(crate::series::TimeExps::from_pairs([(v(1), 4)]));
        assert!(!t.admits(&m2));
    }

    #[test]
    fn meet_is_idempotent() {
        let t = TruncSpec::new(3, 2, 4, (-2, 7)).with_weight(5);
        assert_eq!(t.meet(&t), t);
        let u = TruncSpec::new(1, 9, 1, (0, 9));
        let m = t.meet(&u);
        assert_eq!(m.max_hl, 1);
        assert_eq!(m.z_window, (0, 7));
        assert_eq!(m.max_weight, Some(5));
    }
}
