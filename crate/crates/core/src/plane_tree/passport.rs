use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Degree lists of the white and the black vertices, each sorted non-increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Passport {
    pub white: Vec<usize>,
    pub black: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PassportError {
    #[error("degree lists must be non-empty with positive entries")]
    Degenerate,
    #[error("white degrees sum to {white} but black degrees sum to {black}")]
    Unbalanced { white: usize, black: usize },
    #[error("cannot parse passport `{0}`; expected e.g. `4,1|2,1,1,1`")]
    Syntax(String),
}

impl Passport {
    /// Sorts both lists; colors are kept as given.
    pub fn new(mut white: Vec<usize>, mut black: Vec<usize>) -> Result<Self, PassportError> {
        if white.is_empty() || black.is_empty() || white.contains(&0) || black.contains(&0) {
            return Err(PassportError::Degenerate);
        }
        let (ws, bs) = (white.iter().sum(), black.iter().sum());
        if ws != bs {
            return Err(PassportError::Unbalanced { white: ws, black: bs });
        }
        white.sort_unstable_by(|a, b| b.cmp(a));
        black.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { white, black })
    }

    pub fn edge_count(&self) -> usize {
        self.white.iter().sum()
    }

    /// A tree with n edges has n + 1 vertices.
    pub fn is_tree_passport(&self) -> bool {
        self.white.len() + self.black.len() == self.edge_count() + 1
    }

    /// White list lexicographically not less than black list.
    pub fn is_normalized(&self) -> bool {
        self.white.cmp(&self.black) != Ordering::Less
    }

    pub fn swapped(&self) -> Self {
        Self {
            white: self.black.clone(),
            black: self.white.clone(),
        }
    }

    /// Normalized form and whether a swap was needed.
    pub fn normalized(&self) -> (Self, bool) {
        if self.is_normalized() {
            (self.clone(), false)
        } else {
            (self.swapped(), true)
        }
    }

    /// Both color classes carry the same degree list.
    pub fn is_color_symmetric(&self) -> bool {
        self.white == self.black
    }
}

impl fmt::Display for Passport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}|{}", join(&self.white), join(&self.black))
    }
}

impl FromStr for Passport {
    type Err = PassportError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || PassportError::Syntax(s.to_string());
        let trimmed = s.trim().trim_start_matches(['<', '⟨']).trim_end_matches(['>', '⟩']);
        let (w, b) = trimmed.split_once('|').ok_or_else(syntax)?;
        let list = |part: &str| -> Result<Vec<usize>, PassportError> {
            part.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| syntax()))
                .collect()
        };
        Passport::new(list(w)?, list(b)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p: Passport = "4,1|2,1,1,1".parse().unwrap();
        assert_eq!(p.white, vec![4, 1]);
        assert_eq!(p.to_string(), "4,1|2,1,1,1");
        assert!(p.is_tree_passport());
        let q: Passport = "⟨1,3|1,1,2⟩".parse().unwrap();
        assert_eq!(q.white, vec![3, 1]);
    }

    #[test]
    fn normalization_swaps_when_needed() {
        let p = Passport::new(vec![2, 1, 1], vec![3, 1]).unwrap();
        assert!(!p.is_normalized());
        let (n, swapped) = p.normalized();
        assert!(swapped);
        assert_eq!(n.white, vec![3, 1]);
        let sym = Passport::new(vec![2, 2, 1], vec![2, 2, 1]).unwrap();
        assert_eq!(sym.normalized(), (sym.clone(), false));
    }

    #[test]
    fn rejects_unbalanced_lists() {
        assert!(matches!(
            Passport::new(vec![3], vec![1, 1]),
            Err(PassportError::Unbalanced { .. })
        ));
        assert!("3|x".parse::<Passport>().is_err());
        assert!("3,1".parse::<Passport>().is_err());
    }
}
