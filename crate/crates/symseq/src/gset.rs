//! Finite sets acted on by the stabilizer of a sorted word.
//!
//! The stabilizer of a sorted word is generated by the adjacent swaps inside
//! its equal-colour runs.  A `GSet` stores one image table per such
//! generator; the action of an arbitrary stabilizer element is recovered by
//! factoring it into adjacent swaps.  The stored action obeys the reversed
//! composition law `act(s.compose(t), e) = act(t, act(s, e))`, matching the
//! convention that `act_word` is a right action on words.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::perm::{
    adjacent_factorization, valid_name, young_generators, Permutation, SortedWord,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSet {
    base: SortedWord,
    elements: Vec<String>,
    // generator position -> image table over element indices
    gens: BTreeMap<usize, Vec<usize>>,
}

impl GSet {
    /// A set with every generator acting as the identity.
    pub fn trivial(base: SortedWord, elements: Vec<String>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for name in &elements {
            valid_name(name).map_err(|reason| Error::BadElementName {
                name: name.clone(),
                reason,
            })?;
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateElement { name: name.clone() });
            }
        }
        let id: Vec<usize> = (0..elements.len()).collect();
        let gens = young_generators(&base)
            .into_iter()
            .map(|g| (g, id.clone()))
            .collect();
        Ok(GSet {
            base,
            elements,
            gens,
        })
    }

    /// Install the image table of the generator swapping `pos, pos+1`.
    pub fn set_generator(&mut self, pos: usize, images: Vec<usize>) -> Result<()> {
        if !self.gens.contains_key(&pos) {
            return Err(Error::NotAYoungGenerator { position: pos });
        }
        let n = self.elements.len();
        if images.len() != n {
            return Err(Error::DegreeMismatch {
                left: images.len(),
                right: n,
            });
        }
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(Error::NotABijection {
                    degree: n,
                    detail: format!("generator table at position {}", pos),
                });
            }
            seen[v] = true;
        }
        self.gens.insert(pos, images);
        Ok(())
    }

    pub fn base(&self) -> &SortedWord {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element_names(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, e: usize) -> &str {
        &self.elements[e]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|n| n == name)
    }

    pub fn generator_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.gens.keys().copied()
    }

    pub fn generator(&self, pos: usize) -> Result<&[usize]> {
        self.gens
            .get(&pos)
            .map(|t| t.as_slice())
            .ok_or(Error::NotAYoungGenerator { position: pos })
    }

    /// Act by a stabilizer element on one element index.
    pub fn act(&self, s: &Permutation, e: usize) -> Result<usize> {
        if e >= self.len() {
            return Err(Error::ElementOutOfRange {
                index: e,
                size: self.len(),
            });
        }
        let mut cur = e;
        for pos in self.factor_checked(s)? {
            cur = self.gens[&pos][cur];
        }
        Ok(cur)
    }

    /// The full image table of a stabilizer element; factors once.
    pub fn act_table(&self, s: &Permutation) -> Result<Vec<usize>> {
        let factors = self.factor_checked(s)?;
        let mut table: Vec<usize> = (0..self.len()).collect();
        for pos in factors {
            let gen = &self.gens[&pos];
            for entry in table.iter_mut() {
                *entry = gen[*entry];
            }
        }
        Ok(table)
    }

    fn factor_checked(&self, s: &Permutation) -> Result<Vec<usize>> {
        if s.degree() != self.base.len() {
            return Err(Error::DegreeMismatch {
                left: s.degree(),
                right: self.base.len(),
            });
        }
        let factors = adjacent_factorization(s);
        for &pos in &factors {
            if !self.gens.contains_key(&pos) {
                return Err(Error::NotInStabilizer);
            }
        }
        Ok(factors)
    }

    /// Check the generator tables against the Coxeter presentation of the
    /// stabilizer: involutions, distant generators commute, adjacent
    /// generators inside one run braid.  Returns human-readable violations;
    /// empty means the tables genuinely define an action.
    pub fn validate(&self) -> Vec<String> {
        let mut bad = vec![];
        let n = self.len();
        let id: Vec<usize> = (0..n).collect();
        let compose = |a: &[usize], b: &[usize]| -> Vec<usize> {
            // apply a first, then b (list order, matching act)
            a.iter().map(|&e| b[e]).collect()
        };
        for (&i, t) in &self.gens {
            if compose(t, t) != id {
                bad.push(format!("generator at position {} is not an involution", i));
            }
        }
        let positions: Vec<usize> = self.gens.keys().copied().collect();
        for (ai, &i) in positions.iter().enumerate() {
            for &j in &positions[ai + 1..] {
                let ti = &self.gens[&i];
                let tj = &self.gens[&j];
                if j == i + 1 {
                    let lhs = compose(&compose(ti, tj), ti);
                    let rhs = compose(&compose(tj, ti), tj);
                    if lhs != rhs {
                        bad.push(format!(
                            "generators at positions {} and {} violate the braid relation",
                            i, j
                        ));
                    }
                } else if compose(ti, tj) != compose(tj, ti) {
                    bad.push(format!(
                        "generators at positions {} and {} do not commute",
                        i, j
                    ));
                }
            }
        }
        bad
    }

    pub fn check(&self) -> Result<()> {
        let bad = self.validate();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidAction(bad.join("; ")))
        }
    }

    /// Orbits of the elements under the whole stabilizer group, computed
    /// from generator tables only.
    pub fn orbit_quotient(&self) -> QuotientResult {
        let edges: Vec<(usize, usize)> = self
            .gens
            .values()
            .flat_map(|t| t.iter().enumerate().map(|(e, &img)| (e, img)))
            .collect();
        orbit_quotient(self.len(), edges)
    }
}

/// Result of identifying indices `0..n` along a set of edges: `class_of[i]`
/// is the class index of `i`, classes are numbered in order of their
/// smallest member, and `representatives[c]` is that smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientResult {
    pub class_of: Vec<usize>,
    pub representatives: Vec<usize>,
}

impl QuotientResult {
    pub fn class_count(&self) -> usize {
        self.representatives.len()
    }
}

/// Union-find over `0..n`, rooted at smallest indices so that class
/// numbering is canonical regardless of edge order.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]]; // halve the path
            i = self.parent[i];
        }
        i
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub(crate) fn into_quotient(mut self) -> QuotientResult {
        let n = self.parent.len();
        let mut class_of = vec![usize::MAX; n];
        let mut representatives = vec![];
        for i in 0..n {
            let root = self.find(i);
            if class_of[root] == usize::MAX {
                class_of[root] = representatives.len();
                representatives.push(root);
            }
            class_of[i] = class_of[root];
        }
        QuotientResult {
            class_of,
            representatives,
        }
    }
}

/// Union-find over `0..n` with the given edges.
pub fn orbit_quotient<I>(n: usize, edges: I) -> QuotientResult
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut uf = UnionFind::new(n);
    for (a, b) in edges {
        debug_assert!(a < n && b < n);
        uf.union(a, b);
    }
    uf.into_quotient()
}
