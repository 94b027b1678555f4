//! Substitution composition of coloured symmetric sequences.
//!
//! An element of the composite `kleisli_compose(args, head)` over the key
//! `(z̄, x)` is a class of presentations: a head element `f` at some key
//! `(ȳ, x)`, one argument element per head input slot, and a glue
//! permutation arranging `z̄` into the concatenation of the argument words.
//! Two presentations are identified when they differ by a stabilizer move of
//! an argument word (twisting the glue on the right and acting on that
//! argument) or of the head word (swapping adjacent argument blocks bodily
//! and acting on the head element).  The stabilizer of `z̄` acts on classes
//! by twisting the glue on the left, which commutes with both move families.
//!
//! Presentations are packed into mixed-radix integers grouped by
//! configuration (the head key plus the tuple of argument keys); the glue is
//! addressed by its rank in the stabilizer of `z̄`, so that every move is a
//! table lookup and the quotient is one union-find pass per output key.

use std::collections::BTreeMap;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::gset::{GSet, UnionFind};
use crate::par;
use crate::perm::{
    block_diagonal, block_reorder, segment_swap, sorting_permutation, young_generators,
    young_order, young_rank, young_subgroup, Permutation, SortedWord, Word,
};
use crate::seq::{identity_seq, SeqIso, SeqKey, SeqMorphism, SymSeq};

/// One unquotiented presentation of a composite element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposeRaw {
    pub head_key: SeqKey,
    pub head_elem: usize,
    /// One `(argument key, element)` pair per head input slot, in slot
    /// order; the key's output colour must match the slot colour.
    pub blocks: Vec<(SeqKey, usize)>,
    /// Arranges the sorted composite word into the concatenation of the
    /// block words.
    pub glue: Permutation,
}

// Presentations with a fixed head key and block key tuple form one
// configuration; digit order is (head element, block elements.., glue rank).
#[derive(Debug)]
struct Config {
    head_key: usize,
    block_keys: Vec<usize>,
    offset: usize,
    radices: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
    rho0: Permutation, // glue = young[y] ∘ rho0
    lens: Vec<usize>,
}

impl Config {
    fn encode(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.strides)
            .map(|(d, s)| d * s)
            .sum()
    }

    fn decode(&self, local: usize) -> Vec<usize> {
        self.radices
            .iter()
            .zip(&self.strides)
            .map(|(&r, &s)| (local / s) % r)
            .collect()
    }
}

/// The raw-to-class data of one output key.
#[derive(Debug)]
pub struct PointQuotient {
    configs: Vec<Config>,
    config_index: BTreeMap<(usize, Vec<usize>), usize>,
    young: Vec<Permutation>,
    class_of: Vec<u32>,
    reps: Vec<u32>,
    total: usize,
}

impl PointQuotient {
    pub fn raw_count(&self) -> usize {
        self.total
    }

    pub fn class_count(&self) -> usize {
        self.reps.len()
    }

    fn locate(&self, raw: usize) -> (&Config, usize) {
        let idx = self.configs.partition_point(|c| c.offset <= raw) - 1;
        let cfg = &self.configs[idx];
        (cfg, raw - cfg.offset)
    }
}

/// A composite sequence together with the projection from presentations to
/// classes, retained so that maps out of composites can be built pointwise.
#[derive(Debug)]
pub struct Composite {
    seq: SymSeq,
    args: SymSeq,
    head: SymSeq,
    args_keys: Vec<SeqKey>,
    head_keys: Vec<SeqKey>,
    args_index: BTreeMap<SeqKey, usize>,
    head_index: BTreeMap<SeqKey, usize>,
    points: BTreeMap<SeqKey, PointQuotient>,
}

impl Composite {
    pub fn seq(&self) -> &SymSeq {
        &self.seq
    }

    pub fn args(&self) -> &SymSeq {
        &self.args
    }

    pub fn head(&self) -> &SymSeq {
        &self.head
    }

    pub fn point(&self, key: &SeqKey) -> Option<&PointQuotient> {
        self.points.get(key)
    }

    pub fn raw_count(&self, key: &SeqKey) -> usize {
        self.points.get(key).map_or(0, PointQuotient::raw_count)
    }

    /// The class of a presentation.  Validates every part of it.
    pub fn project(&self, raw: &ComposeRaw) -> Result<(SeqKey, usize)> {
        let hk = *self
            .head_index
            .get(&raw.head_key)
            .ok_or_else(|| Error::Invalid("head key outside the head support".into()))?;
        let (ybar, x) = &raw.head_key;
        let head_set = self.head.eval(ybar, *x).expect("indexed key");
        if raw.head_elem >= head_set.len() {
            return Err(Error::ElementOutOfRange {
                index: raw.head_elem,
                size: head_set.len(),
            });
        }
        if raw.blocks.len() != ybar.len() {
            return Err(Error::Invalid(format!(
                "{} blocks for a head of arity {}",
                raw.blocks.len(),
                ybar.len()
            )));
        }
        let mut block_idxs = Vec::with_capacity(raw.blocks.len());
        let mut concat = Vec::new();
        for (i, (bkey, belem)) in raw.blocks.iter().enumerate() {
            if bkey.1 != ybar.get(i) {
                return Err(Error::Invalid(format!(
                    "block {} outputs colour {} but the slot wants {}",
                    i + 1,
                    bkey.1,
                    ybar.get(i)
                )));
            }
            let bi = *self
                .args_index
                .get(bkey)
                .ok_or_else(|| Error::Invalid("block key outside the argument support".into()))?;
            let bset = self.args.eval(&bkey.0, bkey.1).expect("indexed key");
            if *belem >= bset.len() {
                return Err(Error::ElementOutOfRange {
                    index: *belem,
                    size: bset.len(),
                });
            }
            block_idxs.push(bi);
            concat.extend_from_slice(bkey.0.word().colours());
        }
        let concat = Word::new(concat);
        let zbar = concat.sorted();
        let key = (zbar, *x);
        let point = self.points.get(&key).ok_or_else(|| {
            Error::Invalid("presentation lands outside the computed support".into())
        })?;
        let ci = *point
            .config_index
            .get(&(hk, block_idxs))
            .expect("configuration enumerated with the point");
        let cfg = &point.configs[ci];
        if raw.glue.degree() != key.0.len() {
            return Err(Error::DegreeMismatch {
                left: raw.glue.degree(),
                right: key.0.len(),
            });
        }
        let y = raw.glue.compose(&cfg.rho0.inverse())?;
        // rank fails exactly when the glue does not arrange z̄ into the
        // block concatenation
        let y_rank = young_rank(&key.0, &y).map_err(|_| {
            Error::Invalid("glue does not arrange the key word into the block words".into())
        })?;
        let mut digits = Vec::with_capacity(cfg.radices.len());
        digits.push(raw.head_elem);
        digits.extend(raw.blocks.iter().map(|(_, e)| *e));
        digits.push(y_rank);
        let local = cfg.encode(&digits);
        Ok((key.clone(), point.class_of[cfg.offset + local] as usize))
    }

    pub fn class_of_raw(&self, key: &SeqKey, raw: usize) -> Result<usize> {
        let point = self
            .points
            .get(key)
            .ok_or_else(|| Error::Invalid("key outside the computed support".into()))?;
        if raw >= point.total {
            return Err(Error::ElementOutOfRange {
                index: raw,
                size: point.total,
            });
        }
        Ok(point.class_of[raw] as usize)
    }

    pub fn decode_raw(&self, key: &SeqKey, raw: usize) -> Result<ComposeRaw> {
        let point = self
            .points
            .get(key)
            .ok_or_else(|| Error::Invalid("key outside the computed support".into()))?;
        if raw >= point.total {
            return Err(Error::ElementOutOfRange {
                index: raw,
                size: point.total,
            });
        }
        let (cfg, local) = point.locate(raw);
        let digits = cfg.decode(local);
        let k = cfg.block_keys.len();
        let glue = point.young[digits[k + 1]].compose(&cfg.rho0)?;
        Ok(ComposeRaw {
            head_key: self.head_keys[cfg.head_key].clone(),
            head_elem: digits[0],
            blocks: (0..k)
                .map(|i| (self.args_keys[cfg.block_keys[i]].clone(), digits[1 + i]))
                .collect(),
            glue,
        })
    }

    pub fn class_rep(&self, key: &SeqKey, class: usize) -> Result<ComposeRaw> {
        let point = self
            .points
            .get(key)
            .ok_or_else(|| Error::Invalid("key outside the computed support".into()))?;
        let rep = *point.reps.get(class).ok_or(Error::ElementOutOfRange {
            index: class,
            size: point.reps.len(),
        })?;
        self.decode_raw(key, rep as usize)
    }
}

/// The arity below which no composite key can be missed: the longest head
/// word filled with the longest usable argument words.
pub fn natural_compose_bound(args: &SymSeq, head: &SymSeq) -> usize {
    let mut max_len = BTreeMap::new();
    for ((w, x), _) in args.support() {
        let entry = max_len.entry(*x).or_insert(0);
        *entry = (*entry).max(w.len());
    }
    head.support()
        .filter_map(|((ybar, _), _)| {
            ybar.word()
                .colours()
                .iter()
                .map(|c| max_len.get(c).copied())
                .sum::<Option<usize>>()
        })
        .max()
        .unwrap_or(0)
}

pub fn has_nullary_support(seq: &SymSeq) -> bool {
    seq.keys().any(|(w, _)| w.is_empty())
}

/// Substitution composite: `head` elements with every input slot fed by an
/// `args` element.  `max_arity` truncates the output support; per-key data
/// stays exact.
pub fn kleisli_compose(
    args: &SymSeq,
    head: &SymSeq,
    max_arity: Option<usize>,
) -> Result<Composite> {
    if head.inputs() != args.outputs() {
        return Err(Error::NotComposable {
            context: "head inputs differ from argument outputs".into(),
        });
    }
    let args_keys: Vec<SeqKey> = args.keys().cloned().collect();
    let head_keys: Vec<SeqKey> = head.keys().cloned().collect();
    let args_index: BTreeMap<SeqKey, usize> = args_keys
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();
    let head_index: BTreeMap<SeqKey, usize> = head_keys
        .iter()
        .enumerate()
        .map(|(i, k)| (k.clone(), i))
        .collect();

    let colour_count = args.outputs().len();
    let mut by_colour: Vec<Vec<usize>> = vec![vec![]; colour_count];
    let mut min_len: Vec<Option<usize>> = vec![None; colour_count];
    for (i, (w, x)) in args_keys.iter().enumerate() {
        by_colour[*x].push(i);
        let m = min_len[*x].get_or_insert(usize::MAX);
        *m = (*m).min(w.len());
    }

    // enumerate configurations grouped by output key
    let mut point_specs: BTreeMap<SeqKey, Vec<(usize, Vec<usize>)>> = BTreeMap::new();
    for (hk, (ybar, x)) in head_keys.iter().enumerate() {
        let k = ybar.len();
        let slots: Option<Vec<&[usize]>> = ybar
            .word()
            .colours()
            .iter()
            .map(|&c| {
                let s = by_colour[c].as_slice();
                (!s.is_empty()).then_some(s)
            })
            .collect();
        let Some(slots) = slots else { continue };
        // smallest total length attainable from slot i onward
        let mut min_rem = vec![0usize; k + 1];
        for i in (0..k).rev() {
            min_rem[i] = min_rem[i + 1] + min_len[ybar.get(i)].unwrap();
        }
        let mut blocks = Vec::with_capacity(k);
        enumerate_tuples(
            &slots,
            &args_keys,
            &min_rem,
            max_arity,
            0,
            0,
            &mut blocks,
            &mut |blocks, total| {
                let mut concat = Vec::with_capacity(total);
                for &b in blocks.iter() {
                    concat.extend_from_slice(args_keys[b].0.word().colours());
                }
                let zbar = Word::new(concat).sorted();
                point_specs
                    .entry((zbar, *x))
                    .or_default()
                    .push((hk, blocks.to_vec()));
            },
        );
    }

    let tasks: Vec<(SeqKey, Vec<(usize, Vec<usize>)>)> = point_specs.into_iter().collect();
    let results = par::map(tasks, |(key, specs)| {
        let built = build_point(args, head, &args_keys, &head_keys, &key, specs);
        (key, built)
    });

    let mut seq = SymSeq::new(head.outputs().clone(), args.inputs().clone());
    let mut points = BTreeMap::new();
    for (key, built) in results {
        let (point, set) = built?;
        seq.insert(key.0.clone(), key.1, set)?;
        points.insert(key, point);
    }
    Ok(Composite {
        seq,
        args: args.clone(),
        head: head.clone(),
        args_keys,
        head_keys,
        args_index,
        head_index,
        points,
    })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_tuples(
    slots: &[&[usize]],
    args_keys: &[SeqKey],
    min_rem: &[usize],
    budget: Option<usize>,
    slot: usize,
    len_so_far: usize,
    blocks: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize], usize),
) {
    if let Some(k) = budget {
        if len_so_far + min_rem[slot] > k {
            return;
        }
    }
    if slot == slots.len() {
        emit(blocks, len_so_far);
        return;
    }
    for &cand in slots[slot] {
        let len = len_so_far + args_keys[cand].0.len();
        if let Some(k) = budget {
            if len + min_rem[slot + 1] > k {
                continue;
            }
        }
        blocks.push(cand);
        enumerate_tuples(
            slots,
            args_keys,
            min_rem,
            budget,
            slot + 1,
            len,
            blocks,
            emit,
        );
        blocks.pop();
    }
}

struct BuiltMove {
    target: usize,
    f_table: Option<Vec<usize>>,
    g_tables: Vec<Option<Vec<usize>>>,
    g_pos: Vec<usize>,
    y_tab: Rc<Vec<u32>>,
}

pub(crate) fn glue_table(
    cache: &mut BTreeMap<Vec<usize>, Rc<Vec<u32>>>,
    zbar: &SortedWord,
    young: &[Permutation],
    q: &Permutation,
) -> Result<Rc<Vec<u32>>> {
    if let Some(t) = cache.get(q.images()) {
        return Ok(t.clone());
    }
    let tab = young
        .iter()
        .map(|y| Ok(young_rank(zbar, &y.compose(q)?)? as u32))
        .collect::<Result<Vec<u32>>>()?;
    let rc = Rc::new(tab);
    cache.insert(q.images().to_vec(), rc.clone());
    Ok(rc)
}

fn build_point(
    args: &SymSeq,
    head: &SymSeq,
    args_keys: &[SeqKey],
    head_keys: &[SeqKey],
    key: &SeqKey,
    specs: Vec<(usize, Vec<usize>)>,
) -> Result<(PointQuotient, GSet)> {
    let (zbar, _x) = key;
    let n = zbar.len();
    // size everything up with the stabilizer order alone; the subgroup is
    // only materialized once the point is known to fit
    let y_count = young_order(zbar);

    let mut configs = Vec::with_capacity(specs.len());
    let mut config_index = BTreeMap::new();
    let mut offset = 0usize;
    for (hk, blocks) in specs {
        let head_set = head
            .eval(&head_keys[hk].0, head_keys[hk].1)
            .expect("enumerated key");
        let lens: Vec<usize> = blocks.iter().map(|&b| args_keys[b].0.len()).collect();
        let concat = Word::concat(blocks.iter().map(|&b| args_keys[b].0.word()));
        let rho0 = sorting_permutation(&concat).inverse();
        let mut radices = Vec::with_capacity(blocks.len() + 2);
        radices.push(head_set.len());
        for &b in &blocks {
            radices.push(
                args.eval(&args_keys[b].0, args_keys[b].1)
                    .expect("enumerated key")
                    .len(),
            );
        }
        radices.push(y_count);
        let size = radices
            .iter()
            .try_fold(1usize, |a, &r| a.checked_mul(r))
            .filter(|&s| s <= u32::MAX as usize && s.checked_add(offset).is_some())
            .ok_or_else(|| {
                Error::Invalid("output key needs more presentations than supported".into())
            })?;
        let mut strides = vec![1usize; radices.len()];
        for i in (0..radices.len() - 1).rev() {
            strides[i] = strides[i + 1] * radices[i + 1];
        }
        config_index.insert((hk, blocks.clone()), configs.len());
        configs.push(Config {
            head_key: hk,
            block_keys: blocks,
            offset,
            radices,
            strides,
            size,
            rho0,
            lens,
        });
        offset += size;
    }
    let total = offset;
    if total > u32::MAX as usize {
        return Err(Error::Invalid(format!(
            "output key needs {} presentations, beyond the supported range",
            total
        )));
    }
    let young = young_subgroup(zbar);

    // one table per distinct right glue twist, shared across configurations
    let mut cache: BTreeMap<Vec<usize>, Rc<Vec<u32>>> = BTreeMap::new();
    let mut moves_per_config: Vec<Vec<BuiltMove>> = Vec::with_capacity(configs.len());
    for ci in 0..configs.len() {
        let cfg = &configs[ci];
        let k = cfg.block_keys.len();
        let mut moves = vec![];
        let mut pos = 0usize;
        for (i, &b) in cfg.block_keys.iter().enumerate() {
            let bkey = &args_keys[b];
            let bset = args.eval(&bkey.0, bkey.1).expect("enumerated key");
            for t in young_generators(&bkey.0) {
                let tr = Permutation::adjacent_transposition(n, pos + t)?;
                let q = cfg.rho0.compose(&tr)?.compose(&cfg.rho0.inverse())?;
                let y_tab = glue_table(&mut cache, zbar, &young, &q)?;
                let mut g_tables = vec![None; k];
                g_tables[i] = Some(bset.generator(t)?.to_vec());
                moves.push(BuiltMove {
                    target: ci,
                    f_table: None,
                    g_tables,
                    g_pos: (0..k).collect(),
                    y_tab,
                });
            }
            pos += bkey.0.len();
        }
        let hkey = &head_keys[cfg.head_key];
        let hset = head.eval(&hkey.0, hkey.1).expect("enumerated key");
        for u in young_generators(&hkey.0) {
            let mut tb = cfg.block_keys.clone();
            tb.swap(u, u + 1);
            let tci = config_index[&(cfg.head_key, tb)];
            let s = segment_swap(&cfg.lens, u)?;
            let q = cfg.rho0.compose(&s)?.compose(&configs[tci].rho0.inverse())?;
            let y_tab = glue_table(&mut cache, zbar, &young, &q)?;
            let mut g_pos: Vec<usize> = (0..k).collect();
            g_pos.swap(u, u + 1);
            moves.push(BuiltMove {
                target: tci,
                f_table: Some(hset.generator(u)?.to_vec()),
                g_tables: vec![None; k],
                g_pos,
                y_tab,
            });
        }
        moves_per_config.push(moves);
    }

    let mut uf = UnionFind::new(total);
    for (ci, cfg) in configs.iter().enumerate() {
        let k = cfg.block_keys.len();
        let mut digits = vec![0usize; k + 2];
        for local in 0..cfg.size {
            let raw = cfg.offset + local;
            for m in &moves_per_config[ci] {
                let t = &configs[m.target];
                let f = digits[0];
                let mut tl =
                    m.f_table.as_ref().map_or(f, |tab| tab[f]) * t.strides[0];
                for i in 0..k {
                    let g = digits[1 + i];
                    let g2 = m.g_tables[i].as_ref().map_or(g, |tab| tab[g]);
                    tl += g2 * t.strides[1 + m.g_pos[i]];
                }
                tl += m.y_tab[digits[k + 1]] as usize; // glue stride is 1
                uf.union(raw, t.offset + tl);
            }
            for d in (0..k + 2).rev() {
                digits[d] += 1;
                if digits[d] < cfg.radices[d] {
                    break;
                }
                digits[d] = 0;
            }
        }
    }

    let q = uf.into_quotient();
    let class_count = q.representatives.len();
    let names = (0..class_count).map(|c| format!("c{}", c)).collect();
    let mut gset = GSet::trivial(zbar.clone(), names)?;
    for p in young_generators(zbar) {
        let tr = Permutation::adjacent_transposition(n, p)?;
        let y_left: Vec<usize> = young
            .iter()
            .map(|y| young_rank(zbar, &tr.compose(y)?))
            .collect::<Result<_>>()?;
        let table: Vec<usize> = q
            .representatives
            .iter()
            .map(|&rep| {
                let idx = configs.partition_point(|c| c.offset <= rep) - 1;
                let cfg = &configs[idx];
                let local = rep - cfg.offset;
                let y = local % y_count;
                let tl = local - y + y_left[y];
                q.class_of[cfg.offset + tl]
            })
            .collect();
        gset.set_generator(p, table)?;
    }

    let point = PointQuotient {
        configs,
        config_index,
        young,
        class_of: q.class_of.iter().map(|&c| c as u32).collect(),
        reps: q.representatives.iter().map(|&r| r as u32).collect(),
        total,
    };
    Ok((point, gset))
}

/// Composition acts on maps slotwise: this carries a map of arguments and a
/// map of heads to the induced map of composites.  Both composites must be
/// built from the endpoints of the given maps.
pub fn compose_map(
    args_map: &SeqMorphism,
    head_map: &SeqMorphism,
    source: &Composite,
    target: &Composite,
) -> Result<SeqMorphism> {
    if args_map.source() != source.args() || head_map.source() != source.head() {
        return Err(Error::NotComposable {
            context: "source composite was not built from the maps' sources".into(),
        });
    }
    if args_map.target() != target.args() || head_map.target() != target.head() {
        return Err(Error::NotComposable {
            context: "target composite was not built from the maps' targets".into(),
        });
    }
    let mut components = BTreeMap::new();
    for (key, set) in source.seq().support() {
        let mut comp = Vec::with_capacity(set.len());
        for class in 0..set.len() {
            let rep = source.class_rep(key, class)?;
            let moved = ComposeRaw {
                head_elem: head_map.apply(&rep.head_key, rep.head_elem)?,
                head_key: rep.head_key,
                blocks: rep
                    .blocks
                    .into_iter()
                    .map(|(bkey, e)| {
                        let e2 = args_map.apply(&bkey, e)?;
                        Ok((bkey, e2))
                    })
                    .collect::<Result<_>>()?,
                glue: rep.glue,
            };
            let (tkey, tclass) = target.project(&moved)?;
            debug_assert_eq!(&tkey, key);
            comp.push(tclass);
        }
        components.insert(key.clone(), comp);
    }
    Ok(SeqMorphism::new(
        source.seq().clone(),
        target.seq().clone(),
        components,
    ))
}

/// Composing with the identity on the argument side changes nothing: the
/// composite with identity arguments is isomorphic to the head itself, by
/// untwisting the glue into the stored action.
pub fn left_unitor(m: &SymSeq) -> Result<(Composite, SeqIso)> {
    let id = identity_seq(m.inputs());
    let composite = kleisli_compose(&id, m, None)?;
    let mut components = BTreeMap::new();
    for (key, set) in composite.seq().support() {
        let target_set = m.eval(&key.0, key.1).ok_or_else(|| Error::NotIso {
            context: "composite landed outside the head support".into(),
        })?;
        let mut comp = Vec::with_capacity(set.len());
        for class in 0..set.len() {
            let rep = composite.class_rep(key, class)?;
            comp.push(target_set.act(&rep.glue.inverse(), rep.head_elem)?);
        }
        components.insert(key.clone(), comp);
    }
    let morphism = SeqMorphism::new(composite.seq().clone(), m.clone(), components);
    let iso = SeqIso::try_new(morphism)?;
    Ok((composite, iso))
}

/// Composing with the identity on the head side changes nothing either; the
/// lone block element is carried along the untwisted glue.
pub fn right_unitor(m: &SymSeq) -> Result<(Composite, SeqIso)> {
    let id = identity_seq(m.outputs());
    let composite = kleisli_compose(m, &id, None)?;
    let mut components = BTreeMap::new();
    for (key, set) in composite.seq().support() {
        let target_set = m.eval(&key.0, key.1).ok_or_else(|| Error::NotIso {
            context: "composite landed outside the argument support".into(),
        })?;
        let mut comp = Vec::with_capacity(set.len());
        for class in 0..set.len() {
            let rep = composite.class_rep(key, class)?;
            let (_, g) = &rep.blocks[0];
            comp.push(target_set.act(&rep.glue.inverse(), *g)?);
        }
        components.insert(key.clone(), comp);
    }
    let morphism = SeqMorphism::new(composite.seq().clone(), m.clone(), components);
    let iso = SeqIso::try_new(morphism)?;
    Ok((composite, iso))
}

/// Both ways of composing three sequences, with the connecting isomorphism.
pub struct AssociatorResult {
    /// `kleisli_compose(leaves, mids)`
    pub inner_args: Composite,
    /// `kleisli_compose(mids, head)`
    pub inner_head: Composite,
    /// `kleisli_compose(inner_args.seq, head)`
    pub left: Composite,
    /// `kleisli_compose(leaves, inner_head.seq)`
    pub right: Composite,
    /// left to right
    pub iso: SeqIso,
}

/// Regrouping isomorphism between the two ways of composing three
/// sequences.  Classes are matched by flattening a presentation of the left
/// side into head, mid and leaf layers and reassembling it canonically on
/// the right.
pub fn associator(
    leaves: &SymSeq,
    mids: &SymSeq,
    head: &SymSeq,
    max_arity: Option<usize>,
) -> Result<AssociatorResult> {
    let inner_args = kleisli_compose(leaves, mids, max_arity)?;
    // every mid key reachable with the leaf budget must survive truncation
    // of the intermediate on the right; leaves with nullary support fill
    // arbitrarily long mid words within any budget
    let inner_bound = if max_arity.is_some() && has_nullary_support(leaves) {
        None
    } else {
        max_arity
    };
    let inner_head = kleisli_compose(mids, head, inner_bound)?;
    let left = kleisli_compose(inner_args.seq(), head, max_arity)?;
    let right = kleisli_compose(leaves, inner_head.seq(), max_arity)?;

    let mut components = BTreeMap::new();
    for (key, set) in left.seq().support() {
        let mut comp = Vec::with_capacity(set.len());
        for class in 0..set.len() {
            let rep = left.class_rep(key, class)?;
            comp.push(associate_raw(&rep, &inner_args, &inner_head, &right, key)?);
        }
        components.insert(key.clone(), comp);
    }
    let morphism = SeqMorphism::new(left.seq().clone(), right.seq().clone(), components);
    let iso = SeqIso::try_new(morphism)?;
    Ok(AssociatorResult {
        inner_args,
        inner_head,
        left,
        right,
        iso,
    })
}

// One left-side presentation to its right-side class: lift every block to a
// presentation of the inner composite, flatten, regroup.
fn associate_raw(
    rep: &ComposeRaw,
    inner_args: &Composite,
    inner_head: &Composite,
    right: &Composite,
    key: &SeqKey,
) -> Result<usize> {
    let mut inner_glues = Vec::with_capacity(rep.blocks.len());
    let mut mid_blocks = Vec::with_capacity(rep.blocks.len());
    let mut leaves_flat = vec![];
    let mut u_cat = vec![];
    for (bkey, class) in &rep.blocks {
        let inner_rep = inner_args.class_rep(bkey, *class)?;
        u_cat.extend_from_slice(inner_rep.head_key.0.word().colours());
        mid_blocks.push((inner_rep.head_key, inner_rep.head_elem));
        leaves_flat.extend(inner_rep.blocks);
        inner_glues.push(inner_rep.glue);
    }
    let sigma_flat = rep.glue.compose(&block_diagonal(&inner_glues))?;
    let u_cat = Word::new(u_cat);
    let pi = sorting_permutation(&u_cat);
    let tbar = u_cat.sorted();

    let (mid_key, mid_class) = inner_head.project(&ComposeRaw {
        head_key: rep.head_key.clone(),
        head_elem: rep.head_elem,
        blocks: mid_blocks,
        glue: pi.inverse(),
    })?;
    debug_assert_eq!(mid_key.0, tbar);

    // outer block r of the right side is the flat leaf at position pi(r)
    let out_blocks: Vec<(SeqKey, usize)> = (0..tbar.len())
        .map(|r| leaves_flat[pi.image(r)].clone())
        .collect();
    let out_lens: Vec<usize> = out_blocks.iter().map(|(k, _)| k.0.len()).collect();
    let reorder = block_reorder(
        &out_lens,
        &(0..tbar.len())
            .map(|q| pi.inverse().image(q))
            .collect::<Vec<_>>(),
    )?;
    let glue = sigma_flat.compose(&reorder.inverse())?;
    let (rkey, rclass) = right.project(&ComposeRaw {
        head_key: (tbar, key.1),
        head_elem: mid_class,
        blocks: out_blocks,
        glue,
    })?;
    debug_assert_eq!(&rkey, key);
    Ok(rclass)
}

/// Elementwise triangle law: reassociating across an inner identity and
/// collapsing it through either unitor reaches the plain composite by the
/// same map.  The unitors are built at full support, so `max_arity` must
/// not cut the head's own arities; `None` is always safe here because only
/// two-factor composites appear.
pub fn triangle_holds(n: &SymSeq, m: &SymSeq, max_arity: Option<usize>) -> Result<bool> {
    let id = identity_seq(m.inputs());
    let a = associator(n, &id, m, max_arity)?;
    let (c_im, ell) = left_unitor(m)?;
    let (c_ni, r) = right_unitor(n)?;
    if c_im.seq() != a.inner_head.seq() || c_ni.seq() != a.inner_args.seq() {
        return Ok(false);
    }
    let target = kleisli_compose(n, m, max_arity)?;
    let via_left = compose_map(&SeqMorphism::identity(n), ell.forward(), &a.right, &target)?;
    let path1 = a.iso.forward().then(&via_left)?;
    let path2 = compose_map(r.forward(), &SeqMorphism::identity(m), &a.left, &target)?;
    Ok(path1.equal_on_elements(&path2))
}

/// Elementwise pentagon law: the two reassociation paths from
/// (((m ∘ n) ∘ p) ∘ q)-style bracketing to the fully right-nested one
/// agree.  All intermediate composites are built at the same bound, which
/// keeps the parallel objects byte-identical and the paths composable.
pub fn pentagon_holds(
    q: &SymSeq,
    p: &SymSeq,
    n: &SymSeq,
    m: &SymSeq,
    max_arity: Option<usize>,
) -> Result<bool> {
    let k = max_arity;
    let qp = kleisli_compose(q, p, k)?;
    let nm = kleisli_compose(n, m, k)?;
    let pn = kleisli_compose(p, n, k)?;

    // path one: ((qp)n)m -> (qp)(nm) -> q(p(nm))
    let a1 = associator(qp.seq(), n, m, k)?;
    let a2 = associator(q, p, nm.seq(), k)?;
    let path1 = a1.iso.forward().then(a2.iso.forward())?;

    // path two: ((qp)n)m -> (q(pn))m -> q((pn)m) -> q(p(nm))
    let a_qpn = associator(q, p, n, k)?;
    let b1_target = kleisli_compose(a_qpn.right.seq(), m, k)?;
    let b1 = compose_map(
        a_qpn.iso.forward(),
        &SeqMorphism::identity(m),
        &a1.left,
        &b1_target,
    )?;
    let a3 = associator(q, pn.seq(), m, k)?;
    let a_pnm = associator(p, n, m, k)?;
    let b2_target = kleisli_compose(q, a_pnm.right.seq(), k)?;
    let b2 = compose_map(
        &SeqMorphism::identity(q),
        a_pnm.iso.forward(),
        &a3.right,
        &b2_target,
    )?;
    let path2 = b1.then(a3.iso.forward())?.then(&b2)?;

    Ok(path1.equal_on_elements(&path2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{all_permutations, ColourSet};
    use crate::seq::cardinality_table;

    fn single() -> ColourSet {
        ColourSet::single("a")
    }

    fn sw(ids: &[usize]) -> SortedWord {
        SortedWord::new(Word::new(ids.to_vec())).unwrap()
    }

    /// One element of every arity in `arities`, trivial action, one colour.
    fn e_at(arities: &[usize]) -> SymSeq {
        let c = single();
        let mut seq = SymSeq::new(c.clone(), c);
        for &k in arities {
            let w = sw(&vec![0; k]);
            let set = GSet::trivial(w.clone(), vec!["e".into()]).unwrap();
            seq.insert(w, 0, set).unwrap();
        }
        seq
    }

    /// Lists: k! elements at arity k, generators acting by right
    /// multiplication.
    fn lists_upto(max: usize) -> SymSeq {
        let c = single();
        let mut seq = SymSeq::new(c.clone(), c);
        for k in 1..=max {
            let w = sw(&vec![0; k]);
            let perms = all_permutations(k);
            let names = (0..perms.len()).map(|i| format!("p{}", i)).collect();
            let mut set = GSet::trivial(w.clone(), names).unwrap();
            for pos in 0..k.saturating_sub(1) {
                let t = Permutation::adjacent_transposition(k, pos).unwrap();
                let table = perms
                    .iter()
                    .map(|p| {
                        let q = p.compose(&t).unwrap();
                        perms.iter().position(|r| *r == q).unwrap()
                    })
                    .collect();
                set.set_generator(pos, table).unwrap();
            }
            seq.insert(w, 0, set).unwrap();
        }
        seq
    }

    #[test]
    fn pairs_of_pairs_has_three_classes() {
        let e2 = e_at(&[2]);
        let c = kleisli_compose(&e2, &e2, None).unwrap();
        assert_eq!(cardinality_table(c.seq()), "[a a a a] -> a : 3\n");
        let key = (sw(&[0, 0, 0, 0]), 0);
        assert_eq!(c.raw_count(&key), 24);
        let set = c.seq().eval(&key.0, key.1).unwrap();
        assert!(set.validate().is_empty());
        // the stabilizer permutes the three classes transitively
        assert_eq!(set.orbit_quotient().class_count(), 1);
    }

    #[test]
    fn project_round_trips_every_raw() {
        let e2 = e_at(&[2]);
        let c = kleisli_compose(&e2, &e2, None).unwrap();
        let key = (sw(&[0, 0, 0, 0]), 0);
        for raw in 0..c.raw_count(&key) {
            let decoded = c.decode_raw(&key, raw).unwrap();
            let (k2, class) = c.project(&decoded).unwrap();
            assert_eq!(k2, key);
            assert_eq!(class, c.class_of_raw(&key, raw).unwrap());
        }
    }

    #[test]
    fn project_rejects_malformed_presentations() {
        let e2 = e_at(&[2]);
        let c = kleisli_compose(&e2, &e2, None).unwrap();
        let key = (sw(&[0, 0, 0, 0]), 0);
        let good = c.decode_raw(&key, 0).unwrap();
        // wrong number of blocks
        let mut bad = good.clone();
        bad.blocks.pop();
        assert!(c.project(&bad).is_err());
        // glue that does not arrange the key word
        let mut bad = good.clone();
        bad.glue = Permutation::identity(3);
        assert!(c.project(&bad).is_err());
        // foreign head key
        let mut bad = good;
        bad.head_key = (sw(&[0, 0, 0]), 0);
        assert!(c.project(&bad).is_err());
    }

    #[test]
    fn lists_compose_to_counted_classes() {
        // lists of lists: |(L∘L)[n]| = sum over compositions; at n = 2 the
        // classes are 2 (one block of 2, or 2 blocks of 1) summed with
        // multiplicities |L_k| x |L_parts|: heads k=1: L1∘(L2)=2; k=2:
        // L2 x L1 x L1 = 2; total 4... counted independently: ordered set
        // partitions into linearly ordered blocks = preferential
        // arrangements x block orders; at n=2: 4
        let l = lists_upto(3);
        let c = kleisli_compose(&l, &l, Some(3)).unwrap();
        let n2 = c.seq().eval(&sw(&[0, 0]), 0).unwrap().len();
        assert_eq!(n2, 4);
        // n = 3: heads: L1∘L3 = 6; L2 with parts (1,2),(2,1): 2x6x2 = ...
        // direct count: sum over compositions (c1..ck) of 3 of
        // k! x prod(ci!) x multinomial(3; ci)/ (k! for ordered head? ) --
        // the composite counts classes of (f, g's, glue)/Young; expected
        // |L∘L|(3) = sum over ordered compositions of 3! = 6 each? use the
        // analytic identity L(L(x)): 1/(1-x/(1-x)) coefficients: n! x
        // 2^(n-1): at 3: 6 x 4 = 24
        let n3 = c.seq().eval(&sw(&[0, 0, 0]), 0).unwrap().len();
        assert_eq!(n3, 24);
    }

    #[test]
    fn truncation_only_prunes_long_keys() {
        let e = e_at(&[0, 1, 2, 3]);
        let full = kleisli_compose(&e, &e, None).unwrap();
        let cut = kleisli_compose(&e, &e, Some(2)).unwrap();
        assert_eq!(&full.seq().truncated(2), cut.seq());
        assert!(full.seq().max_arity().unwrap() > 2);
    }

    #[test]
    fn unitors_are_isomorphisms() {
        for seq in [e_at(&[0, 2, 3]), lists_upto(3)] {
            let (_, left) = left_unitor(&seq).unwrap();
            let (_, right) = right_unitor(&seq).unwrap();
            for iso in [left, right] {
                assert!(iso.forward().violations().is_empty());
                assert!(iso.forward().is_bijective());
            }
        }
    }

    #[test]
    fn unitors_on_two_colours() {
        let colours = ColourSet::new(vec!["a", "b"]).unwrap();
        let mut seq = SymSeq::new(colours.clone(), colours);
        // a twisted point over a mixed word
        let w = sw(&[0, 0, 1]);
        let mut set =
            GSet::trivial(w.clone(), vec!["u".into(), "v".into()]).unwrap();
        set.set_generator(0, vec![1, 0]).unwrap();
        seq.insert(w, 1, set).unwrap();
        let (_, left) = left_unitor(&seq).unwrap();
        let (_, right) = right_unitor(&seq).unwrap();
        assert!(left.forward().is_bijective());
        assert!(right.forward().is_bijective());
    }

    #[test]
    fn associator_is_an_isomorphism() {
        let e2 = e_at(&[1, 2]);
        let l = lists_upto(2);
        let a = associator(&l, &e2, &l, None).unwrap();
        assert!(a.iso.forward().is_bijective());
        // support reaches arity 8 on both sides with matching cardinalities
        assert_eq!(a.left.seq().max_arity(), Some(8));
        assert_eq!(
            cardinality_table(a.left.seq()),
            cardinality_table(a.right.seq())
        );
    }

    #[test]
    fn associator_descends_from_every_presentation() {
        let e = e_at(&[1, 2]);
        let l = lists_upto(2);
        let a = associator(&e, &l, &e, None).unwrap();
        for (key, _) in a.left.seq().support() {
            for raw in 0..a.left.raw_count(key) {
                let rep = a.left.decode_raw(key, raw).unwrap();
                let via_raw =
                    associate_raw(&rep, &a.inner_args, &a.inner_head, &a.right, key).unwrap();
                let class = a.left.class_of_raw(key, raw).unwrap();
                let via_iso = a.iso.forward().apply(key, class).unwrap();
                assert_eq!(via_raw, via_iso, "descent fails at {:?} raw {}", key, raw);
            }
        }
    }

    #[test]
    fn triangle_identity() {
        for (n, m) in [
            (e_at(&[0, 1, 2]), e_at(&[1, 2])),
            (lists_upto(2), lists_upto(2)),
        ] {
            assert!(triangle_holds(&n, &m, None).unwrap());
        }
    }

    #[test]
    fn pentagon_identity() {
        // all four factors have support only at arities 1 and 2, so the
        // four-fold composites are cut at a common bound to stay small
        assert!(pentagon_holds(
            &e_at(&[1, 2]),
            &e_at(&[1, 2]),
            &lists_upto(2),
            &e_at(&[1, 2]),
            Some(4)
        )
        .unwrap());
    }

    #[test]
    fn compose_map_of_identities_is_identity() {
        let l = lists_upto(2);
        let e = e_at(&[1, 2]);
        let c = kleisli_compose(&l, &e, None).unwrap();
        let m = compose_map(
            &SeqMorphism::identity(&l),
            &SeqMorphism::identity(&e),
            &c,
            &c,
        )
        .unwrap();
        assert!(m.equal_on_elements(&SeqMorphism::identity(c.seq())));
    }

    #[test]
    fn compose_map_respects_collapse() {
        // collapse lists onto the one-element sequence and check the induced
        // map of composites is a well-formed morphism
        let l = lists_upto(2);
        let e = e_at(&[1, 2]);
        let collapse_components = l
            .support()
            .map(|(k, set)| (k.clone(), vec![0; set.len()]))
            .collect();
        let collapse = SeqMorphism::new(l.clone(), e.clone(), collapse_components);
        assert!(collapse.violations().is_empty());

        let source = kleisli_compose(&l, &l, None).unwrap();
        let target = kleisli_compose(&e, &e, None).unwrap();
        let induced = compose_map(&collapse, &collapse, &source, &target).unwrap();
        assert!(induced.violations().is_empty(), "{:?}", induced.violations());
    }

    #[test]
    fn composition_is_deterministic() {
        let l = lists_upto(3);
        let a = kleisli_compose(&l, &l, Some(4)).unwrap();
        let b = kleisli_compose(&l, &l, Some(4)).unwrap();
        assert_eq!(a.seq(), b.seq());
        for (key, set) in a.seq().support() {
            for class in 0..set.len() {
                assert_eq!(
                    a.class_rep(key, class).unwrap(),
                    b.class_rep(key, class).unwrap()
                );
            }
        }
    }

    #[test]
    fn nullary_keys_compose() {
        // a head with a binary key over arguments that include a nullary
        // key: the composite gains low-arity support
        let e = e_at(&[0, 1]);
        let e2 = e_at(&[2]);
        let c = kleisli_compose(&e, &e2, None).unwrap();
        // blocks (0,0), (0,1)+(1,0), (1,1) give keys of arity 0, 1, 2
        assert_eq!(c.seq().eval(&SortedWord::empty(), 0).unwrap().len(), 1);
        assert_eq!(c.seq().eval(&sw(&[0]), 0).unwrap().len(), 1);
        assert_eq!(c.seq().eval(&sw(&[0, 0]), 0).unwrap().len(), 1);
    }

    #[test]
    fn colour_mismatch_is_rejected() {
        let e2 = e_at(&[2]);
        let two = ColourSet::new(vec!["a", "b"]).unwrap();
        let other = SymSeq::new(two.clone(), two);
        assert!(matches!(
            kleisli_compose(&other, &e2, None),
            Err(Error::NotComposable { .. })
        ));
    }
}
