use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::ClassLabel;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassBalance {
    pub counts: BTreeMap<ClassLabel, usize>,
}

impl ClassBalance {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn fraction(&self, class: ClassLabel) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        self.counts.get(&class).copied().unwrap_or(0) as f64 / total as f64
    }

    /// Largest over smallest count among present classes.
    pub fn imbalance_ratio(&self) -> Option<f64> {
        let present = self.counts.values().filter(|c| **c > 0);
        let max = present.clone().max()?;
        let min = present.min()?;
        Some(*max as f64 / *min as f64)
    }

    /// Per-class count change from `self` to `other`.
    pub fn delta(&self, other: &ClassBalance) -> BTreeMap<ClassLabel, i64> {
        let mut out = BTreeMap::new();
        for class in self.counts.keys().chain(other.counts.keys()) {
            let a = self.counts.get(class).copied().unwrap_or(0) as i64;
            let b = other.counts.get(class).copied().unwrap_or(0) as i64;
            out.insert(*class, b - a);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("class count fraction\n");
        for (c, n) in &self.counts {
            let _ = writeln!(s, "{c} {n} {:.6}", self.fraction(*c));
        }
        match self.imbalance_ratio() {
            Some(r) => {
                let _ = writeln!(s, "imbalance_ratio {r:.6}");
            }
            None => s.push_str("imbalance_ratio n/a\n"),
        }
        s
    }
}

pub fn class_balance_report(labels: impl IntoIterator<Item = ClassLabel>) -> ClassBalance {
    let mut counts = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    ClassBalance { counts }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_examples() {
        let mut labels = vec![ClassLabel::Car; 10];
        labels.push(ClassLabel::Bicycle);
        let before = class_balance_report(labels.clone());
        assert!((before.fraction(ClassLabel::Bicycle) - 1.0 / 11.0).abs() < 1e-15);
        assert_eq!(before.imbalance_ratio(), Some(10.0));
        assert!(before.delta(&before).values().all(|d| *d == 0));
        labels.extend([ClassLabel::Bicycle; 9]);
        let after = class_balance_report(labels);
        assert_eq!(after.imbalance_ratio(), Some(1.0));
        assert_eq!(before.delta(&after)[&ClassLabel::Bicycle], 9);
        assert_eq!(class_balance_report([]).imbalance_ratio(), None);
    }
}
