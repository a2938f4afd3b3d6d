//! Named variable universes and the sorted index sets used to address them.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of a variable inside one [`Domain`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub usize);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Sorted, duplicate-free set of variable indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarSet(Vec<VarId>);

impl VarSet {
    pub fn empty() -> Self {
        VarSet(Vec::new())
    }

    pub fn singleton(v: VarId) -> Self {
        VarSet(vec![v])
    }

    /// Full index range `0..n`.
    pub fn full(n: usize) -> Self {
        VarSet((0..n).map(VarId).collect())
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().map(VarId).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = VarId> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.0
    }

    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().map(|v| v.0).collect()
    }

    pub fn first(&self) -> Option<VarId> {
        self.0.first().copied()
    }

    pub fn insert(&mut self, v: VarId) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, v);
                true
            }
        }
    }

    pub fn remove(&mut self, v: VarId) -> bool {
        match self.0.binary_search(&v) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn with(&self, v: VarId) -> Self {
        let mut s = self.clone();
        s.insert(v);
        s
    }

    pub fn without(&self, v: VarId) -> Self {
        let mut s = self.clone();
        s.remove(v);
        s
    }

    pub fn union(&self, other: &VarSet) -> Self {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        VarSet(out)
    }

    pub fn difference(&self, other: &VarSet) -> Self {
        VarSet(self.0.iter().copied().filter(|v| !other.contains(*v)).collect())
    }

    pub fn intersection(&self, other: &VarSet) -> Self {
        VarSet(self.0.iter().copied().filter(|v| other.contains(*v)).collect())
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        self.0.iter().all(|v| !other.contains(*v))
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    /// All subsets, ordered by size and then lexicographically.
    pub fn subsets(&self) -> Vec<VarSet> {
        self.subsets_up_to(self.len())
    }

    /// Subsets of size at most `max_size`, ordered by size and then lexicographically.
    pub fn subsets_up_to(&self, max_size: usize) -> Vec<VarSet> {
        let mut out = Vec::new();
        for k in 0..=max_size.min(self.len()) {
            self.combinations(k, &mut out);
        }
        out
    }

    /// Subsets of exactly `k` elements in lexicographic order.
    pub fn combinations(&self, k: usize, out: &mut Vec<VarSet>) {
        let n = self.len();
        if k > n {
            return;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(VarSet(idx.iter().map(|&i| self.0[i]).collect()));
            let mut pos = k;
            while pos > 0 && idx[pos - 1] == pos - 1 + n - k {
                pos -= 1;
            }
            if pos == 0 {
                return;
            }
            idx[pos - 1] += 1;
            for j in pos..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}

impl FromIterator<VarId> for VarSet {
    fn from_iter<I: IntoIterator<Item = VarId>>(iter: I) -> Self {
        let mut v: Vec<VarId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VarSet(v)
    }
}

impl<'a> IntoIterator for &'a VarSet {
    type Item = VarId;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, VarId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v.0)?;
        }
        write!(f, "}}")
    }
}

/// Ordered list of uniquely named variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    names: Vec<String>,
    lookup: HashMap<String, VarId>,
}

impl Domain {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut lookup = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::InvalidModel("empty variable name".into()));
            }
            if lookup.insert(n.clone(), VarId(i)).is_some() {
                return Err(Error::DuplicateVariable(n.clone()));
            }
        }
        Ok(Domain { names, lookup })
    }

    /// Domain named `X0..X{n-1}`.
    pub fn numbered(n: usize) -> Self {
        Domain::new((0..n).map(|i| format!("X{i}"))).expect("generated names are unique")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.0]
    }

    pub fn id(&self, name: &str) -> Option<VarId> {
        self.lookup.get(name).copied()
    }

    pub fn all(&self) -> VarSet {
        VarSet::full(self.len())
    }

    /// Resolves names with exact, case-sensitive matching. Every unknown name is reported.
    pub fn resolve<S: AsRef<str>>(&self, names: &[S]) -> Result<VarSet> {
        let mut unknown = Vec::new();
        let mut set = VarSet::empty();
        for n in names {
            match self.id(n.as_ref()) {
                Some(v) => {
                    set.insert(v);
                }
                None => unknown.push(n.as_ref().to_string()),
            }
        }
        if unknown.is_empty() {
            Ok(set)
        } else {
            Err(Error::UnknownVariables(unknown))
        }
    }

    pub fn set_names(&self, set: &VarSet) -> Vec<String> {
        set.iter().map(|v| self.names[v.0].clone()).collect()
    }

    pub fn check(&self, set: &VarSet) -> Result<()> {
        match set.as_slice().last() {
            Some(v) if v.0 >= self.len() => Err(Error::IndexOutOfRange(v.0, self.len())),
            _ => Ok(()),
        }
    }

    /// Sub-domain restricted to `keep`, preserving relative order.
    /// Fails when any two of the given sets share a variable, naming the shared ones.
    pub fn ensure_disjoint(&self, sets: &[(&str, &VarSet)]) -> Result<()> {
        for (i, (na, a)) in sets.iter().enumerate() {
            for (nb, b) in &sets[i + 1..] {
                if !a.is_disjoint(b) {
                    let shared = self.set_names(&a.intersection(b)).join(", ");
                    return Err(Error::Overlap(format!("{na} and {nb} share {shared}")));
                }
            }
        }
        Ok(())
    }

    pub fn restrict(&self, keep: &VarSet) -> Result<Domain> {
        self.check(keep)?;
        Domain::new(keep.iter().map(|v| self.names[v.0].clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn resolve_reports_every_unknown_name() {
        let d = Domain::new(["A", "B", "c"]).unwrap();
        match d.resolve(&["A", "C", "b"]) {
            Err(Error::UnknownVariables(u)) => assert_eq!(u, vec!["C", "b"]),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(d.resolve(&["c", "A"]).unwrap(), VarSet::from_indices([0, 2]));
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(matches!(Domain::new(["A", "A"]), Err(Error::DuplicateVariable(_))));
    }

    #[test]
    fn subsets_size_then_lex() {
        let s = VarSet::from_indices([1, 3, 4]);
        let subs: Vec<String> = s.subsets().iter().map(|s| s.to_string()).collect();
        assert_eq!(
            subs,
            vec!["{}", "{1}", "{3}", "{4}", "{1,3}", "{1,4}", "{3,4}", "{1,3,4}"]
        );
        assert_eq!(VarSet::empty().subsets().len(), 1);
    }

    proptest! {
        #[test]
        fn set_algebra(a in proptest::collection::vec(0usize..12, 0..10),
                       b in proptest::collection::vec(0usize..12, 0..10)) {
            let a = VarSet::from_indices(a);
            let b = VarSet::from_indices(b);
            let u = a.union(&b);
            let d = a.difference(&b);
            let i = a.intersection(&b);
            prop_assert!(a.is_subset(&u) && b.is_subset(&u));
            prop_assert!(d.is_disjoint(&b));
            prop_assert_eq!(d.union(&i), a.clone());
            prop_assert!(u.as_slice().windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(a.subsets().len(), 1usize << a.len());
        }
    }
}
