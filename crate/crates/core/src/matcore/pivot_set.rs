use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing set of at least two indices into `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PivotSet(Vec<usize>);

impl PivotSet {
    /// Validates ordering and size; the range check against `n` happens
    /// where the set meets a matrix, see [`PivotSet::check_order`].
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.len() < 2 {
            return Err(Error::InvalidPivot(format!(
                "need at least two indices, got {}",
                indices.len()
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPivot(format!(
                "indices {indices:?} are not strictly increasing"
            )));
        }
        Ok(PivotSet(indices))
    }

    /// Convenience constructor for a pair; the order of `i`, `j` is free.
    pub fn pair(i: usize, j: usize) -> Result<Self> {
        PivotSet::new(vec![i.min(j), i.max(j)])
    }

    /// `{0, 1, …, n-1}`.
    pub fn full(n: usize) -> Result<Self> {
        PivotSet::new((0..n).collect())
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn check_order(&self, n: usize) -> Result<()> {
        let last = *self.0.last().expect("pivot set is non-empty");
        if last >= n {
            return Err(Error::PivotOutOfRange { index: last, n });
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for PivotSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        PivotSet::new(v)
    }
}

impl From<PivotSet> for Vec<usize> {
    fn from(p: PivotSet) -> Vec<usize> {
        p.0
    }
}

impl fmt::Display for PivotSet {
    /// Semicolon-separated indices, the form used in trace CSV files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, i) in self.0.iter().enumerate() {
            if pos > 0 {
                f.write_str(";")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PivotSet::new(vec![0]).is_err());
        assert!(PivotSet::new(vec![1, 1]).is_err());
        assert!(PivotSet::new(vec![2, 1]).is_err());
        assert_eq!(PivotSet::pair(3, 1).unwrap().indices(), &[1, 3]);
        assert_eq!(
            PivotSet::pair(0, 4).unwrap().check_order(4),
            Err(Error::PivotOutOfRange { index: 4, n: 4 })
        );
    }

    #[test]
    fn display_and_serde() {
        let p = PivotSet::new(vec![0, 2, 5]).unwrap();
        assert_eq!(p.to_string(), "0;2;5");
        assert!(p.contains(2) && !p.contains(3));
    }
}
