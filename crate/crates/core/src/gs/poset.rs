use std::fmt;

use crate::error::{Error, Result};

/// Posets are capped at this many elements.
pub const MAX_POSET_SIZE: usize = 8;
/// Nerves are capped at this simplicial dimension.
pub const MAX_NERVE_DIM: usize = 4;

/// A finite poset of opens, each given as a subset (bitmask) of a finite
/// ground set and ordered by inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    names: Vec<String>,
    sets: Vec<u64>,
    intersection_closed: bool,
}

impl Poset {
    pub fn from_sets(names: Vec<String>, sets: Vec<u64>) -> Result<Self> {
        if names.len() != sets.len() {
            return Err(Error::DimensionMismatch("one name per open is required".into()));
        }
        if sets.is_empty() || sets.len() > MAX_POSET_SIZE {
            return Err(Error::Capacity(format!(
                "poset must have between 1 and {MAX_POSET_SIZE} elements"
            )));
        }
        for (i, s) in sets.iter().enumerate() {
            if *s == 0 {
                return Err(Error::InvalidStructure(format!("open {} is empty", names[i])));
            }
            if sets[..i].contains(s) {
                return Err(Error::InvalidStructure(format!("open {} is listed twice", names[i])));
            }
        }
        let intersection_closed = sets.iter().all(|&a| {
            sets.iter().all(|&b| {
                let c = a & b;
                c == 0 || sets.contains(&c)
            })
        });
        Ok(Poset {
            names,
            sets,
            intersection_closed,
        })
    }

    pub fn point() -> Self {
        Self::from_sets(vec!["U".into()], vec![1]).expect("valid")
    }

    /// `V < U`.
    pub fn chain2() -> Self {
        Self::from_sets(vec!["V".into(), "U".into()], vec![0b01, 0b11]).expect("valid")
    }

    /// `n` pairwise incomparable opens.
    pub fn discrete(n: usize) -> Result<Self> {
        Self::from_sets((0..n).map(|i| format!("U{i}")).collect(), (0..n).map(|i| 1u64 << i).collect())
    }

    /// Two charts and their overlap, `U01 < U0`, `U01 < U1`.
    pub fn two_chart() -> Self {
        Self::from_sets(
            vec!["U0".into(), "U1".into(), "U01".into()],
            vec![0b011, 0b110, 0b010],
        )
        .expect("valid")
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn name(&self, u: usize) -> &str {
        &self.names[u]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn set(&self, u: usize) -> u64 {
        self.sets[u]
    }

    pub fn index_of(&self, set: u64) -> Option<usize> {
        self.sets.iter().position(|&s| s == set)
    }

    pub fn leq(&self, u: usize, v: usize) -> bool {
        self.sets[u] & !self.sets[v] == 0
    }

    pub fn lt(&self, u: usize, v: usize) -> bool {
        u != v && self.leq(u, v)
    }

    pub fn is_intersection_closed(&self) -> bool {
        self.intersection_closed
    }

    /// Strictly increasing chains `U_0 < ⋯ < U_i`, grouped by `i` and listed
    /// lexicographically by element index.
    pub fn nerve(&self) -> Result<Vec<Vec<NerveSimplex>>> {
        let mut levels: Vec<Vec<NerveSimplex>> = vec![(0..self.len()).map(|u| NerveSimplex { chain: vec![u] }).collect()];
        loop {
            let mut next = Vec::new();
            for s in levels.last().expect("nonempty") {
                let top = s.max();
                for v in 0..self.len() {
                    if self.lt(top, v) {
                        let mut chain = s.chain.clone();
                        chain.push(v);
                        next.push(NerveSimplex { chain });
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            if levels.len() > MAX_NERVE_DIM {
                return Err(Error::Capacity(format!("nerve dimension above {MAX_NERVE_DIM}")));
            }
            next.sort_by(|a, b| a.chain.cmp(&b.chain));
            levels.push(next);
        }
        Ok(levels)
    }
}

/// A chain `U_0 < ⋯ < U_i` of poset elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NerveSimplex {
    pub chain: Vec<usize>,
}

impl NerveSimplex {
    pub fn dim(&self) -> usize {
        self.chain.len() - 1
    }

    pub fn min(&self) -> usize {
        self.chain[0]
    }

    pub fn max(&self) -> usize {
        *self.chain.last().expect("nonempty chain")
    }

    /// Drop the `k`-th element.
    pub fn face(&self, k: usize) -> NerveSimplex {
        let mut chain = self.chain.clone();
        chain.remove(k);
        NerveSimplex { chain }
    }

    /// `U_0 < ⋯ < U_k`.
    pub fn front(&self, k: usize) -> NerveSimplex {
        NerveSimplex {
            chain: self.chain[..=k].to_vec(),
        }
    }

    /// `U_k < ⋯ < U_i`.
    pub fn back(&self, k: usize) -> NerveSimplex {
        NerveSimplex {
            chain: self.chain[k..].to_vec(),
        }
    }
}

impl fmt::Display for NerveSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.chain.iter().map(|u| u.to_string()).collect();
        write!(f, "({})", parts.join("<"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nerve_of_small_posets() {
        assert_eq!(Poset::point().nerve().unwrap().len(), 1);
        let n = Poset::chain2().nerve().unwrap();
        assert_eq!(n.iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 1]);
        assert_eq!(n[1][0].min(), 0);
        assert_eq!(n[1][0].max(), 1);
        let n = Poset::two_chart().nerve().unwrap();
        assert_eq!(n.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 2]);
        assert!(Poset::two_chart().is_intersection_closed());
        assert!(!Poset::from_sets(vec!["a".into(), "b".into()], vec![0b011, 0b110]).unwrap().is_intersection_closed());
    }

    #[test]
    fn caps() {
        assert!(Poset::discrete(9).is_err());
        // a chain of 6 opens has a 5-dimensional nerve
        let sets: Vec<u64> = (1..=6).map(|k| (1u64 << k) - 1).collect();
        let p = Poset::from_sets((0..6).map(|i| i.to_string()).collect(), sets).unwrap();
        assert!(matches!(p.nerve(), Err(Error::Capacity(_))));
    }

    #[test]
    fn faces() {
        let s = NerveSimplex { chain: vec![0, 2, 5] };
        assert_eq!(s.face(1).chain, vec![0, 5]);
        assert_eq!(s.front(1).chain, vec![0, 2]);
        assert_eq!(s.back(1).chain, vec![2, 5]);
        assert_eq!(s.to_string(), "(0<2<5)");
    }
}
