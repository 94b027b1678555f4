//! Finite-support coloured symmetric sequences and their morphisms.
//!
//! A sequence assigns to every (sorted input word, output colour) pair a
//! finite set with a stabilizer action; values at unsorted arrangements are
//! reached through `transport`.  Only nonempty sets are stored.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gset::GSet;
use crate::perm::{
    act_word, sorting_permutation, young_generators, ColourId, ColourSet, Permutation,
    SortedWord, Word,
};

pub type SeqKey = (SortedWord, ColourId);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymSeq {
    outputs: ColourSet,
    inputs: ColourSet,
    support: BTreeMap<SeqKey, GSet>,
}

impl SymSeq {
    pub fn new(outputs: ColourSet, inputs: ColourSet) -> Self {
        SymSeq {
            outputs,
            inputs,
            support: BTreeMap::new(),
        }
    }

    pub fn outputs(&self) -> &ColourSet {
        &self.outputs
    }

    pub fn inputs(&self) -> &ColourSet {
        &self.inputs
    }

    /// Store the value at a key; inserting an empty set clears the key.
    pub fn insert(&mut self, word: SortedWord, out: ColourId, set: GSet) -> Result<()> {
        word.word().check_over(&self.inputs)?;
        self.outputs.check(out)?;
        if set.base() != &word {
            return Err(Error::Invalid(format!(
                "stored set built over {:?}, inserted at {:?}",
                set.base(),
                word
            )));
        }
        if set.is_empty() {
            self.support.remove(&(word, out));
        } else {
            self.support.insert((word, out), set);
        }
        Ok(())
    }

    pub fn eval(&self, word: &SortedWord, out: ColourId) -> Option<&GSet> {
        self.support.get(&(word.clone(), out))
    }

    pub fn support(&self) -> impl Iterator<Item = (&SeqKey, &GSet)> {
        self.support.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &SeqKey> {
        self.support.keys()
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn total_elements(&self) -> usize {
        self.support.values().map(GSet::len).sum()
    }

    pub fn max_arity(&self) -> Option<usize> {
        self.support.keys().map(|(w, _)| w.len()).max()
    }

    /// Drop every key whose word is longer than `max`.
    pub fn truncated(&self, max: usize) -> SymSeq {
        SymSeq {
            outputs: self.outputs.clone(),
            inputs: self.inputs.clone(),
            support: self
                .support
                .iter()
                .filter(|((w, _), _)| w.len() <= max)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Reinterpret the same indexed data over different colour alphabets of
    /// the same sizes.
    pub fn with_colour_sets(&self, outputs: ColourSet, inputs: ColourSet) -> Result<SymSeq> {
        if outputs.len() != self.outputs.len() || inputs.len() != self.inputs.len() {
            return Err(Error::ColourSetMismatch {
                context: "colour set size change".into(),
            });
        }
        Ok(SymSeq {
            outputs,
            inputs,
            support: self.support.clone(),
        })
    }

    /// Violations of the structural invariants, human readable.
    pub fn validate(&self) -> Vec<String> {
        let mut bad = vec![];
        for ((word, out), set) in &self.support {
            let label = format!(
                "key [{}] -> {}",
                word.word()
                    .colours()
                    .iter()
                    .map(|&c| self.inputs.name(c))
                    .collect::<Vec<_>>()
                    .join(" "),
                self.outputs.name(*out)
            );
            if word.word().check_over(&self.inputs).is_err() {
                bad.push(format!("{}: input word uses a foreign colour", label));
            }
            if self.outputs.check(*out).is_err() {
                bad.push(format!("{}: foreign output colour", label));
            }
            if set.base() != word {
                bad.push(format!("{}: stored set built over a different word", label));
            }
            for v in set.validate() {
                bad.push(format!("{}: {}", label, v));
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

    /// The bijection induced on the stored set by a rearrangement witness.
    ///
    /// `s` rearranges `w` into `act_word(s, w)`; both arrangements share the
    /// stored set at the sorted word.  Writing `p` and `p'` for the sorting
    /// permutations of the two arrangements, the residual
    /// `p⁻¹ ∘ s ∘ p'` stabilizes the sorted word, and the induced table is
    /// the stored action of its inverse.  For `w` already sorted and `s` in
    /// its stabilizer this is the stored action of `s⁻¹`.
    pub fn transport(&self, s: &Permutation, w: &Word, out: ColourId) -> Result<Vec<usize>> {
        w.check_over(&self.inputs)?;
        self.outputs.check(out)?;
        if s.degree() != w.len() {
            return Err(Error::DegreeMismatch {
                left: s.degree(),
                right: w.len(),
            });
        }
        let sorted = w.sorted();
        let Some(set) = self.eval(&sorted, out) else {
            return Ok(vec![]);
        };
        let w2 = act_word(s, w)?;
        let rho = sorting_permutation(w)
            .inverse()
            .compose(s)?
            .compose(&sorting_permutation(&w2))?;
        set.act_table(&rho.inverse())
    }
}

/// One singleton value of each colour at its own one-letter word, with the
/// trivial (only possible) action: the unit for substitution composition.
pub fn identity_seq(colours: &ColourSet) -> SymSeq {
    let mut seq = SymSeq::new(colours.clone(), colours.clone());
    for c in 0..colours.len() {
        let word = SortedWord::new(Word::new(vec![c])).expect("one-letter word is sorted");
        let set = GSet::trivial(word.clone(), vec!["e".to_string()]).expect("valid singleton");
        seq.insert(word, c, set).expect("identity key is valid");
    }
    seq
}

/// Cardinalities of the stored sets, one `[word] -> colour : count` line per
/// key, ordered by arity, then word, then output colour.  Deterministic.
pub fn cardinality_table(seq: &SymSeq) -> String {
    let mut rows: Vec<(usize, &SortedWord, ColourId, usize)> = seq
        .support()
        .map(|((w, x), set)| (w.len(), w, *x, set.len()))
        .collect();
    rows.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
    let mut out = String::new();
    for (_, w, x, count) in rows {
        let word = w
            .word()
            .colours()
            .iter()
            .map(|&c| seq.inputs().name(c))
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!(
            "[{}] -> {} : {}\n",
            word,
            seq.outputs().name(x),
            count
        ));
    }
    out
}

/// A family of maps between the stored sets of two sequences over the same
/// colour alphabets, one component per source key.
#[derive(Clone, Debug)]
pub struct SeqMorphism {
    source: SymSeq,
    target: SymSeq,
    components: BTreeMap<SeqKey, Vec<usize>>,
}

impl SeqMorphism {
    pub fn new(source: SymSeq, target: SymSeq, components: BTreeMap<SeqKey, Vec<usize>>) -> Self {
        SeqMorphism {
            source,
            target,
            components,
        }
    }

    pub fn identity(seq: &SymSeq) -> Self {
        let components = seq
            .support()
            .map(|(k, set)| (k.clone(), (0..set.len()).collect()))
            .collect();
        SeqMorphism {
            source: seq.clone(),
            target: seq.clone(),
            components,
        }
    }

    pub fn source(&self) -> &SymSeq {
        &self.source
    }

    pub fn target(&self) -> &SymSeq {
        &self.target
    }

    pub fn component(&self, key: &SeqKey) -> Option<&[usize]> {
        self.components.get(key).map(|v| v.as_slice())
    }

    pub fn apply(&self, key: &SeqKey, e: usize) -> Result<usize> {
        let comp = self
            .components
            .get(key)
            .ok_or_else(|| Error::MalformedMorphism {
                context: format!("no component at {:?}", key),
            })?;
        comp.get(e).copied().ok_or(Error::ElementOutOfRange {
            index: e,
            size: comp.len(),
        })
    }

    /// Everything wrong with this family as a morphism: missing or spurious
    /// components, out-of-range images, equivariance failures.
    pub fn violations(&self) -> Vec<String> {
        let mut bad = vec![];
        if self.source.outputs() != self.target.outputs()
            || self.source.inputs() != self.target.inputs()
        {
            bad.push("source and target use different colour alphabets".to_string());
        }
        for (key, set) in self.source.support() {
            let label = format!("key {:?}", key);
            let Some(comp) = self.components.get(key) else {
                bad.push(format!("{}: no component", label));
                continue;
            };
            if comp.len() != set.len() {
                bad.push(format!(
                    "{}: component covers {} of {} elements",
                    label,
                    comp.len(),
                    set.len()
                ));
                continue;
            }
            let target_len = self.target.eval(&key.0, key.1).map_or(0, GSet::len);
            if let Some(&worst) = comp.iter().find(|&&v| v >= target_len) {
                bad.push(format!(
                    "{}: image {} outside the target set of size {}",
                    label, worst, target_len
                ));
                continue;
            }
            let Some(target_set) = self.target.eval(&key.0, key.1) else {
                continue;
            };
            for pos in young_generators(&key.0) {
                let src_gen = set.generator(pos).expect("young position");
                let tgt_gen = target_set.generator(pos).expect("young position");
                for e in 0..set.len() {
                    if comp[src_gen[e]] != tgt_gen[comp[e]] {
                        bad.push(format!(
                            "{}: not equivariant at generator position {} on element {}",
                            label, pos, e
                        ));
                        break;
                    }
                }
            }
        }
        for key in self.components.keys() {
            if self.source.eval(&key.0, key.1).is_none() {
                bad.push(format!("component at {:?} outside the source support", key));
            }
        }
        bad
    }

    pub fn check(&self) -> Result<()> {
        let bad = self.violations();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::MalformedMorphism {
                context: bad.join("; "),
            })
        }
    }

    /// Componentwise bijectivity onto the target support.
    pub fn is_bijective(&self) -> bool {
        let forward_ok = self.source.support().all(|(key, set)| {
            let target_len = self.target.eval(&key.0, key.1).map_or(0, GSet::len);
            let Some(comp) = self.components.get(key) else {
                return false;
            };
            if comp.len() != set.len() || set.len() != target_len {
                return false;
            }
            let mut seen = vec![false; target_len];
            comp.iter().all(|&v| {
                if v >= target_len || seen[v] {
                    false
                } else {
                    seen[v] = true;
                    true
                }
            })
        });
        forward_ok
            && self
                .target
                .support()
                .all(|(key, _)| self.source.eval(&key.0, key.1).is_some())
    }

    /// `self` then `other`.
    pub fn then(&self, other: &SeqMorphism) -> Result<SeqMorphism> {
        if self.target != other.source {
            return Err(Error::NotComposable {
                context: "morphism target differs from the next source".into(),
            });
        }
        let mut components = BTreeMap::new();
        for (key, comp) in &self.components {
            let next = other
                .components
                .get(key)
                .ok_or_else(|| Error::MalformedMorphism {
                    context: format!("no component at {:?} in the second morphism", key),
                })?;
            components.insert(key.clone(), comp.iter().map(|&e| next[e]).collect());
        }
        Ok(SeqMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            components,
        })
    }

    pub fn equal_on_elements(&self, other: &SeqMorphism) -> bool {
        self.components == other.components
    }
}

/// A checked isomorphism of sequences.
#[derive(Clone, Debug)]
pub struct SeqIso {
    forward: SeqMorphism,
}

impl SeqIso {
    pub fn try_new(forward: SeqMorphism) -> Result<Self> {
        forward.check()?;
        if !forward.is_bijective() {
            return Err(Error::NotIso {
                context: "componentwise bijectivity fails".into(),
            });
        }
        Ok(SeqIso { forward })
    }

    pub fn forward(&self) -> &SeqMorphism {
        &self.forward
    }

    pub fn inverse(&self) -> SeqMorphism {
        let components = self
            .forward
            .components
            .iter()
            .map(|(key, comp)| {
                let mut inv = vec![0; comp.len()];
                for (e, &v) in comp.iter().enumerate() {
                    inv[v] = e;
                }
                (key.clone(), inv)
            })
            .collect();
        SeqMorphism {
            source: self.forward.target.clone(),
            target: self.forward.source.clone(),
            components,
        }
    }
}
