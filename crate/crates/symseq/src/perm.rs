//! Permutations of finite index sets, colour alphabets, words over them,
//! and the index gymnastics (grid embeddings, block reorderings, the
//! interleaving exchange) that the sequence operations are built from.
//!
//! Conventions, fixed once for the whole crate:
//!   - composition: `(s.compose(t))(i) = s(t(i))`
//!   - word action: `act_word(s, w)[i] = w[s(i)]` (a right action)
//!   - indices are 0-based internally, 1-based in anything user-facing

use std::fmt;

use crate::error::{Error, Result};

pub type ColourId = usize;

/// A bijection of `{0, .., n-1}`, stored by its image vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n {
                return Err(Error::NotABijection {
                    degree: n,
                    detail: format!("image {} out of range", v),
                });
            }
            if seen[v] {
                return Err(Error::NotABijection {
                    degree: n,
                    detail: format!("image {} repeated", v),
                });
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    /// The adjacent transposition swapping positions `i` and `i+1`.
    pub fn adjacent_transposition(n: usize, i: usize) -> Result<Self> {
        if i + 1 >= n {
            return Err(Error::DegreeMismatch { left: i + 1, right: n });
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, i + 1);
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
            }
        }
        cycles
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images)
    }
}

impl fmt::Display for Permutation {
    // one-line notation, 1-based
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "]")
    }
}

/// A finite, ordered alphabet of colour names.  The declared order is the
/// order used for sorting words; product sets inherit the lexicographic
/// order on component pairs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ColourSet {
    names: Vec<String>,
}

pub fn valid_name(name: &str) -> std::result::Result<(), String> {
    if name.is_empty() {
        return Err("empty".into());
    }
    for c in name.chars() {
        let ok = c.is_ascii_graphic() && !matches!(c, '[' | ']' | '#');
        if !ok {
            return Err(format!("character {:?} not allowed", c));
        }
    }
    Ok(())
}

impl ColourSet {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = std::collections::BTreeSet::new();
        for n in &names {
            valid_name(n).map_err(|reason| Error::BadColourName {
                name: n.clone(),
                reason,
            })?;
            if !seen.insert(n.clone()) {
                return Err(Error::DuplicateColour { name: n.clone() });
            }
        }
        Ok(ColourSet { names })
    }

    pub fn single(name: &str) -> Self {
        ColourSet::new(vec![name]).expect("valid single colour")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: ColourId) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<ColourId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn check(&self, id: ColourId) -> Result<()> {
        if id >= self.len() {
            return Err(Error::ForeignColour {
                colour: id,
                size: self.len(),
            });
        }
        Ok(())
    }

    /// Product alphabet: pairs `(a, b)` named `a.b`, ordered
    /// lexicographically (left component major).  `pair id = a * |right| + b`.
    pub fn product(&self, right: &ColourSet) -> ColourSet {
        let mut names = Vec::with_capacity(self.len() * right.len());
        for a in &self.names {
            for b in &right.names {
                names.push(format!("{}.{}", a, b));
            }
        }
        ColourSet { names }
    }
}

/// A finite word of colour indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Word {
    colours: Vec<ColourId>,
}

impl Word {
    pub fn new(colours: Vec<ColourId>) -> Self {
        Word { colours }
    }

    pub fn empty() -> Self {
        Word { colours: vec![] }
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    pub fn colours(&self) -> &[ColourId] {
        &self.colours
    }

    pub fn get(&self, i: usize) -> ColourId {
        self.colours[i]
    }

    pub fn is_sorted(&self) -> bool {
        self.colours.windows(2).all(|p| p[0] <= p[1])
    }

    pub fn check_over(&self, set: &ColourSet) -> Result<()> {
        for &c in &self.colours {
            set.check(c)?;
        }
        Ok(())
    }

    pub fn concat<'a, I: IntoIterator<Item = &'a Word>>(parts: I) -> Word {
        let mut colours = vec![];
        for w in parts {
            colours.extend_from_slice(&w.colours);
        }
        Word { colours }
    }

    pub fn sorted(&self) -> SortedWord {
        let mut colours = self.colours.clone();
        colours.sort_unstable();
        SortedWord(Word { colours })
    }
}

/// A word whose colours are weakly increasing; the canonical representative
/// of its permutation orbit and the key under which values are stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SortedWord(Word);

impl SortedWord {
    pub fn new(word: Word) -> Result<Self> {
        for (i, pair) in word.colours.windows(2).enumerate() {
            if pair[0] > pair[1] {
                return Err(Error::UnsortedWord { position: i + 2 });
            }
        }
        Ok(SortedWord(word))
    }

    pub fn empty() -> Self {
        SortedWord(Word::empty())
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> ColourId {
        self.0.get(i)
    }
}

/// `act_word(s, w)[i] = w[s(i)]`; taking `w` to `act_word(s, w)` is how a
/// permutation witnesses one arrangement of a multiset as another.
pub fn act_word(s: &Permutation, w: &Word) -> Result<Word> {
    if s.degree() != w.len() {
        return Err(Error::DegreeMismatch {
            left: s.degree(),
            right: w.len(),
        });
    }
    Ok(Word::new(s.images().iter().map(|&i| w.get(i)).collect()))
}

/// Stable sorting permutation: `act_word(sorting_permutation(w), w)` is the
/// sorted arrangement of `w`.
pub fn sorting_permutation(w: &Word) -> Permutation {
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by_key(|&i| (w.get(i), i));
    Permutation { images: idx }
}

/// Positions `i` (0-based) such that swapping `i, i+1` fixes the sorted word:
/// the Coxeter generators of its stabilizer.
pub fn young_generators(w: &SortedWord) -> Vec<usize> {
    (0..w.len().saturating_sub(1))
        .filter(|&i| w.get(i) == w.get(i + 1))
        .collect()
}

/// Factor a permutation into adjacent transpositions `[t1, t2, ..., tk]`
/// (each entry the lower position of the swap) such that composing them in
/// list order, `t1 ∘ t2 ∘ ... ∘ tk`, gives back the input.  Uses at most
/// `n(n-1)/2` factors (one per inversion), and never moves an entry across a
/// position where the permuted values come from disjoint intervals, so a
/// block-preserving permutation factors through block-internal swaps only.
pub fn adjacent_factorization(s: &Permutation) -> Vec<usize> {
    let mut img = s.images.clone();
    let n = img.len();
    let mut swaps = vec![];
    loop {
        let mut done = true;
        for i in 0..n.saturating_sub(1) {
            if img[i] > img[i + 1] {
                img.swap(i, i + 1);
                swaps.push(i);
                done = false;
            }
        }
        if done {
            break;
        }
    }
    // Bubbling sorted s ∘ t_{i1} ∘ ... ∘ t_{ik} to the identity, so
    // s = t_{ik} ∘ ... ∘ t_{i1}: reverse to get list-order composition.
    swaps.reverse();
    swaps
}

/// Maximal runs of equal colours in a sorted word, as `(start, len)` pairs.
pub fn colour_runs(w: &SortedWord) -> Vec<(usize, usize)> {
    let n = w.len();
    let mut runs = vec![];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && w.get(j) == w.get(i) {
            j += 1;
        }
        runs.push((i, j - i));
        i = j;
    }
    runs
}

/// All elements of the stabilizer (Young) subgroup of a sorted word:
/// independent permutations of each maximal run of equal colours.
pub fn young_subgroup(w: &SortedWord) -> Vec<Permutation> {
    let n = w.len();
    let runs = colour_runs(w);
    let mut result = vec![Permutation::identity(n)];
    for (start, len) in runs {
        let perms = all_permutations(len);
        let mut next = Vec::with_capacity(result.len() * perms.len());
        for base in &result {
            for p in &perms {
                let mut images = base.images.clone();
                for k in 0..len {
                    images[start + k] = start + p.image(k);
                }
                next.push(Permutation { images });
            }
        }
        result = next;
    }
    result
}

pub fn factorial(n: usize) -> usize {
    (2..=n).product()
}

// lexicographic rank of an image vector among all arrangements of 0..n
fn lex_rank(images: &[usize]) -> usize {
    let n = images.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller_later = images[i + 1..].iter().filter(|&&v| v < images[i]).count();
        rank += smaller_later * factorial(n - 1 - i);
    }
    rank
}

/// Order of the stabilizer of a sorted word.
pub fn young_order(w: &SortedWord) -> usize {
    colour_runs(w).iter().map(|&(_, len)| factorial(len)).product()
}

/// Index of a stabilizer element in `young_subgroup` enumeration order.
/// Errors when the permutation moves a letter out of its run.
pub fn young_rank(w: &SortedWord, y: &Permutation) -> Result<usize> {
    if y.degree() != w.len() {
        return Err(Error::DegreeMismatch {
            left: y.degree(),
            right: w.len(),
        });
    }
    let runs = colour_runs(w);
    let mut rank = 0;
    for &(start, len) in &runs {
        let mut rel = Vec::with_capacity(len);
        for k in 0..len {
            let img = y.image(start + k);
            if img < start || img >= start + len {
                return Err(Error::NotInStabilizer);
            }
            rel.push(img - start);
        }
        rank = rank * factorial(len) + lex_rank(&rel);
    }
    Ok(rank)
}

/// All permutations of degree `n`, in lexicographic image order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = vec![];
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation {
            images: current.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// All permutations `s` with `act_word(s, source) == target`, i.e. all
/// witnesses gluing the canonical arrangement to a required one.  Empty when
/// the multisets differ.
pub fn matching_permutations(source: &SortedWord, target: &Word) -> Vec<Permutation> {
    if source.len() != target.len() {
        return vec![];
    }
    if &target.sorted() != source {
        return vec![];
    }
    let n = source.len();
    // positions of each colour in the source, grouped
    let mut groups: std::collections::BTreeMap<ColourId, Vec<usize>> = Default::default();
    for i in 0..n {
        groups.entry(source.get(i)).or_default().push(i);
    }
    let colour_list: Vec<ColourId> = groups.keys().copied().collect();
    let mut target_slots: std::collections::BTreeMap<ColourId, Vec<usize>> = Default::default();
    for i in 0..n {
        target_slots.entry(target.get(i)).or_default().push(i);
    }
    // per colour, assign source positions to target positions in every order
    let mut result: Vec<Vec<usize>> = vec![vec![usize::MAX; n]];
    for c in colour_list {
        let src = &groups[&c];
        let tgt = &target_slots[&c];
        let perms = all_permutations(src.len());
        let mut next = Vec::with_capacity(result.len() * perms.len());
        for partial in &result {
            for p in &perms {
                let mut images = partial.clone();
                for (k, &tpos) in tgt.iter().enumerate() {
                    images[tpos] = src[p.image(k)];
                }
                next.push(images);
            }
        }
        result = next;
    }
    result
        .into_iter()
        .map(|images| Permutation { images })
        .collect()
}

/// Functorial grid action: for `a` of degree `k` and `b` of degree `l`, the
/// permutation of `k*l` sending lexicographic rank of `(i, j)` to the rank of
/// `(a(i), b(j))`.  A homomorphism in each argument.
pub fn grid_embed(a: &Permutation, b: &Permutation) -> Permutation {
    let k = a.degree();
    let l = b.degree();
    let mut images = Vec::with_capacity(k * l);
    for i in 0..k {
        for j in 0..l {
            images.push(a.image(i) * l + b.image(j));
        }
    }
    Permutation { images }
}

/// The interleaving exchange: index quadruples `(i, a, j, b)` with
/// `i < k, a < ms[i], j < l, b < ns[j]`; `theta` carries the rank of a
/// quadruple in plain lexicographic order `(i, a, j, b)` to its rank in the
/// twisted order `(i, j, a, b)`.  Identity when `k == 1 == l`.
pub fn theta(ms: &[usize], ns: &[usize]) -> Permutation {
    let mut quads = vec![];
    for (i, &m) in ms.iter().enumerate() {
        for a in 0..m {
            for (j, &nn) in ns.iter().enumerate() {
                for b in 0..nn {
                    quads.push((i, a, j, b));
                }
            }
        }
    }
    let total = quads.len();
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by_key(|&q| {
        let (i, a, j, b) = quads[q];
        (i, j, a, b)
    });
    // order[r] = the 1234-rank of the quadruple with twisted rank r
    let mut images = vec![0; total];
    for (twisted_rank, &plain_rank) in order.iter().enumerate() {
        images[plain_rank] = twisted_rank;
    }
    Permutation { images }
}

/// Direct sum of permutations, acting block-diagonally on the concatenation.
pub fn block_diagonal(parts: &[Permutation]) -> Permutation {
    let mut images = vec![];
    let mut offset = 0;
    for p in parts {
        images.extend(p.images().iter().map(|&v| v + offset));
        offset += p.degree();
    }
    Permutation { images }
}

/// Reorder a concatenation of blocks: `source_lengths[s]` are the block
/// lengths in source order and `source_of_target[t]` names the source block
/// that lands in target slot `t`.  Returns the permutation `p` with
/// `act_word(p, source_concat) = target_concat`.
pub fn block_reorder(source_lengths: &[usize], source_of_target: &[usize]) -> Result<Permutation> {
    let k = source_lengths.len();
    if source_of_target.len() != k {
        return Err(Error::DegreeMismatch {
            left: source_of_target.len(),
            right: k,
        });
    }
    let mut offsets = vec![0; k];
    let mut acc = 0;
    for (s, &len) in source_lengths.iter().enumerate() {
        offsets[s] = acc;
        acc += len;
    }
    let mut seen = vec![false; k];
    let mut images = Vec::with_capacity(acc);
    for &s in source_of_target {
        if s >= k || seen[s] {
            return Err(Error::NotABijection {
                degree: k,
                detail: "block reordering is not a bijection".into(),
            });
        }
        seen[s] = true;
        images.extend(offsets[s]..offsets[s] + source_lengths[s]);
    }
    Ok(Permutation { images })
}

/// Swap two adjacent segments (lengths taken from `lengths[i]`, `lengths[i+1]`)
/// inside a concatenation, fixing everything else.
pub fn segment_swap(lengths: &[usize], i: usize) -> Result<Permutation> {
    let k = lengths.len();
    if i + 1 >= k {
        return Err(Error::DegreeMismatch { left: i + 1, right: k });
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.swap(i, i + 1);
    block_reorder(lengths, &order)
}
