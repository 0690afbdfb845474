use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rfs::NodeSet;

/// Per-node detection outcome in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Hit,
    CorrectRejection,
    FalseAlarm,
    Miss,
}

impl Outcome {
    pub fn letter(self) -> char {
        match self {
            Outcome::Hit => 'H',
            Outcome::CorrectRejection => 'C',
            Outcome::FalseAlarm => 'F',
            Outcome::Miss => 'M',
        }
    }
}

/// Outcome for every node of `universe`, in ascending id order.
pub fn classify_outcomes(truth: NodeSet, decided: NodeSet, universe: NodeSet) -> Result<Vec<(u32, Outcome)>> {
    if !truth.is_subset(universe) || !decided.is_subset(universe) {
        return Err(invalid(
            "universe",
            "truth and decision must be subsets of the universe",
        ));
    }
    Ok(universe
        .iter()
        .map(|id| {
            let o = match (truth.contains(id), decided.contains(id)) {
                (true, true) => Outcome::Hit,
                (false, false) => Outcome::CorrectRejection,
                (false, true) => Outcome::FalseAlarm,
                (true, false) => Outcome::Miss,
            };
            (id, o)
        })
        .collect())
}

/// Outcome counts. `misses_out_of_range` is the part of `misses` on nodes
/// beyond the detector's discovery radius.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub hits: u64,
    pub correct_rejections: u64,
    pub false_alarms: u64,
    pub misses: u64,
    pub misses_out_of_range: u64,
}

impl Tally {
    pub fn add(&mut self, outcomes: &[(u32, Outcome)], out_of_range: NodeSet) {
        for &(id, o) in outcomes {
            match o {
                Outcome::Hit => self.hits += 1,
                Outcome::CorrectRejection => self.correct_rejections += 1,
                Outcome::FalseAlarm => self.false_alarms += 1,
                Outcome::Miss => {
                    self.misses += 1;
                    if out_of_range.contains(id) {
                        self.misses_out_of_range += 1;
                    }
                }
            }
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        self.hits += other.hits;
        self.correct_rejections += other.correct_rejections;
        self.false_alarms += other.false_alarms;
        self.misses += other.misses;
        self.misses_out_of_range += other.misses_out_of_range;
    }

    pub fn errors(&self) -> u64 {
        self.false_alarms + self.misses
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definition_table() {
        let u = NodeSet::universe(4);
        let truth: NodeSet = [1, 2].into_iter().collect();
        let decided: NodeSet = [2, 3].into_iter().collect();
        let got = classify_outcomes(truth, decided, u).unwrap();
        use Outcome::*;
        assert_eq!(got, vec![(1, Miss), (2, Hit), (3, FalseAlarm), (4, CorrectRejection)]);
        let same = classify_outcomes(truth, truth, u).unwrap();
        assert!(same.iter().all(|(_, o)| matches!(o, Hit | CorrectRejection)));
        let fa = classify_outcomes(NodeSet::EMPTY, [1].into_iter().collect(), u).unwrap();
        assert_eq!(fa[0].1, FalseAlarm);
        assert!(fa[1..].iter().all(|(_, o)| *o == CorrectRejection));
        assert!(classify_outcomes([5].into_iter().collect(), NodeSet::EMPTY, u).is_err());
    }

    #[test]
    fn tally_splits_out_of_range_misses() {
        let u = NodeSet::universe(3);
        let o = classify_outcomes([1, 3].into_iter().collect(), NodeSet::EMPTY, u).unwrap();
        let mut t = Tally::default();
        t.add(&o, [3].into_iter().collect());
        assert_eq!((t.misses, t.misses_out_of_range, t.correct_rejections), (2, 1, 1));
        assert_eq!(t.errors(), 2);
    }
}
