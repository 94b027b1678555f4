//! Plain-text sequence files.
//!
//! ```text
//! symseq v1
//! outputs a b
//! inputs a b
//! # one line per element: name, input word, output colour
//! elem u : [a a] -> b
//! elem v : [a a] -> b
//! # a stabilizer generator maps elements; unlisted elements stay fixed
//! action u swap(0) = v
//! action v swap(0) = u
//! ```
//!
//! Element names must be unique across the whole file so actions can refer
//! to them bare.  Input words are written sorted, in the colour order of
//! the `inputs` line.  Parsing checks names, colours and bijectivity of
//! each generator table; the group laws themselves are checked separately
//! via `SymSeq::validate`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gset::GSet;
use crate::perm::{ColourSet, SortedWord, Word};
use crate::seq::{SeqKey, SymSeq};

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

// tokens with their 1-based byte columns
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = vec![];
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

struct ElemLine {
    line: usize,
    name: String,
    key: SeqKey,
}

struct ActionLine {
    line: usize,
    column: usize,
    name: String,
    pos: usize,
    image: String,
}

pub fn parse_seq(text: &str) -> Result<SymSeq> {
    // comments and blank lines are ignorable everywhere, the header
    // included
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).skip_while(|(_, l)| {
        let body = match l.find('#') {
            Some(i) => &l[..i],
            None => l,
        };
        body.trim().is_empty()
    });
    let (first_no, first) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty file; expected the header `symseq v1`"))?;
    if first.trim() != "symseq v1" {
        return Err(parse_err(first_no, 1, "expected the header `symseq v1`"));
    }

    let mut outputs: Option<ColourSet> = None;
    let mut inputs: Option<ColourSet> = None;
    let mut elems: Vec<ElemLine> = vec![];
    let mut actions: Vec<ActionLine> = vec![];

    for (no, raw) in lines {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let tokens = tokenize(line);
        if tokens.is_empty() {
            continue;
        }
        match tokens[0].1 {
            kw @ ("outputs" | "inputs") => {
                let slot = if kw == "outputs" { &mut outputs } else { &mut inputs };
                if slot.is_some() {
                    return Err(parse_err(no, tokens[0].0, format!("duplicate `{}` line", kw)));
                }
                if !elems.is_empty() {
                    return Err(parse_err(no, tokens[0].0, "colour lines must precede elements"));
                }
                if tokens.len() < 2 {
                    return Err(parse_err(no, tokens[0].0, "expected at least one colour name"));
                }
                let names: Vec<&str> = tokens[1..].iter().map(|&(_, t)| t).collect();
                *slot = Some(ColourSet::new(names).map_err(|e| {
                    parse_err(no, tokens[1].0, e.to_string())
                })?);
            }
            "elem" => {
                let inputs = inputs.as_ref().ok_or_else(|| {
                    parse_err(no, tokens[0].0, "`inputs` must come before elements")
                })?;
                let outputs = outputs.as_ref().ok_or_else(|| {
                    parse_err(no, tokens[0].0, "`outputs` must come before elements")
                })?;
                // elem NAME : [w ...] -> colour
                let parts: Vec<(usize, &str)> = tokens[1..].to_vec();
                if parts.len() < 2 || parts[1].1 != ":" {
                    return Err(parse_err(no, tokens[0].0, "expected `elem NAME : [word] -> colour`"));
                }
                let name = parts[0].1.to_string();
                let mut idx = 2;
                let mut letters: Vec<&str> = vec![];
                let mut bracket = parts.get(idx).copied().ok_or_else(|| {
                    parse_err(no, tokens[0].0, "expected an input word in brackets")
                })?;
                if !bracket.1.starts_with('[') {
                    return Err(parse_err(no, bracket.0, "expected `[` opening the input word"));
                }
                // strip the opening bracket; the word may span several tokens
                let mut fragment = &bracket.1[1..];
                let mut closed = false;
                loop {
                    let frag = if let Some(stripped) = fragment.strip_suffix(']') {
                        closed = true;
                        stripped
                    } else {
                        fragment
                    };
                    if !frag.is_empty() {
                        letters.push(frag);
                    }
                    idx += 1;
                    if closed {
                        break;
                    }
                    bracket = parts.get(idx).copied().ok_or_else(|| {
                        parse_err(no, bracket.0, "unterminated input word; expected `]`")
                    })?;
                    fragment = bracket.1;
                }
                if parts.get(idx).map(|&(_, t)| t) != Some("->") {
                    return Err(parse_err(no, parts.get(idx).map_or(bracket.0, |p| p.0), "expected `->` after the input word"));
                }
                let colour_tok = parts.get(idx + 1).ok_or_else(|| {
                    parse_err(no, bracket.0, "expected an output colour after `->`")
                })?;
                if parts.len() > idx + 2 {
                    return Err(parse_err(no, parts[idx + 2].0, "unexpected trailing tokens"));
                }
                let mut ids = Vec::with_capacity(letters.len());
                for l in &letters {
                    let id = inputs.index_of(l).ok_or_else(|| {
                        parse_err(no, bracket.0, format!("unknown input colour `{}`", l))
                    })?;
                    ids.push(id);
                }
                let word = SortedWord::new(Word::new(ids)).map_err(|_| {
                    parse_err(
                        no,
                        bracket.0,
                        "input word must be sorted in the colour order of the `inputs` line",
                    )
                })?;
                let colour = outputs.index_of(colour_tok.1).ok_or_else(|| {
                    parse_err(no, colour_tok.0, format!("unknown output colour `{}`", colour_tok.1))
                })?;
                elems.push(ElemLine {
                    line: no,
                    name,
                    key: (word, colour),
                });
            }
            "action" => {
                // action NAME swap(i) = NAME2
                let parts: Vec<(usize, &str)> = tokens[1..].to_vec();
                if parts.len() != 4 || parts[2].1 != "=" {
                    return Err(parse_err(no, tokens[0].0, "expected `action NAME swap(i) = NAME`"));
                }
                let swap = parts[1].1;
                let pos: usize = swap
                    .strip_prefix("swap(")
                    .and_then(|s| s.strip_suffix(')'))
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| parse_err(no, parts[1].0, "expected `swap(i)` with a position"))?;
                actions.push(ActionLine {
                    line: no,
                    column: parts[0].0,
                    name: parts[0].1.to_string(),
                    pos,
                    image: parts[3].1.to_string(),
                });
            }
            other => {
                return Err(parse_err(no, tokens[0].0, format!("unknown directive `{}`", other)));
            }
        }
    }

    let outputs = outputs.ok_or_else(|| parse_err(1, 1, "missing `outputs` line"))?;
    let inputs = inputs.ok_or_else(|| parse_err(1, 1, "missing `inputs` line"))?;

    // elements keep file order within their key; names resolve globally
    let mut by_key: BTreeMap<SeqKey, Vec<(usize, String)>> = BTreeMap::new();
    let mut locate: BTreeMap<String, (SeqKey, usize)> = BTreeMap::new();
    for e in &elems {
        let list = by_key.entry(e.key.clone()).or_default();
        if locate
            .insert(e.name.clone(), (e.key.clone(), list.len()))
            .is_some()
        {
            return Err(parse_err(e.line, 1, format!("duplicate element name `{}`", e.name)));
        }
        list.push((e.line, e.name.clone()));
    }

    // group actions into one table per key and position
    let mut tables: BTreeMap<(SeqKey, usize), Vec<usize>> = BTreeMap::new();
    for a in &actions {
        let (key, src) = locate
            .get(&a.name)
            .ok_or_else(|| parse_err(a.line, a.column, format!("unknown element `{}`", a.name)))?;
        let (ikey, img) = locate.get(&a.image).ok_or_else(|| {
            parse_err(a.line, a.column, format!("unknown element `{}`", a.image))
        })?;
        if ikey != key {
            return Err(parse_err(
                a.line,
                a.column,
                format!("`{}` and `{}` live at different keys", a.name, a.image),
            ));
        }
        let size = by_key[key].len();
        let table = tables
            .entry((key.clone(), a.pos))
            .or_insert_with(|| (0..size).collect());
        table[*src] = *img;
    }

    let mut seq = SymSeq::new(outputs, inputs);
    for (key, list) in &by_key {
        let names: Vec<String> = list.iter().map(|(_, n)| n.clone()).collect();
        let first_line = list[0].0;
        let mut set = GSet::trivial(key.0.clone(), names)
            .map_err(|e| parse_err(first_line, 1, e.to_string()))?;
        for ((tkey, pos), table) in &tables {
            if tkey == key {
                set.set_generator(*pos, table.clone()).map_err(|e| {
                    parse_err(first_line, 1, format!("generator swap({}): {}", pos, e))
                })?;
            }
        }
        seq.insert(key.0.clone(), key.1, set)
            .map_err(|e| parse_err(first_line, 1, e.to_string()))?;
    }
    // declared actions can be bijective yet break the Coxeter relations;
    // a parsed sequence must be valid outright
    seq.check()?;
    Ok(seq)
}

/// Canonical text form: keys in order, elements in stored order, only the
/// non-identity action entries.  Stored names are kept when they are
/// globally unique and get a key suffix otherwise.
pub fn serialize_seq(seq: &SymSeq) -> String {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, set) in seq.support() {
        for name in set.element_names() {
            *seen.entry(name.as_str()).or_default() += 1;
        }
    }
    let unique = seen.values().all(|&c| c == 1);

    let mut out = String::from("symseq v1\n");
    let _ = writeln!(out, "outputs {}", seq.outputs().names().join(" "));
    let _ = writeln!(out, "inputs {}", seq.inputs().names().join(" "));
    let display = |key_idx: usize, name: &str| {
        if unique {
            name.to_string()
        } else {
            format!("{}_k{}", name, key_idx)
        }
    };
    for (ki, (key, set)) in seq.support().enumerate() {
        let word = key
            .0
            .word()
            .colours()
            .iter()
            .map(|&c| seq.inputs().name(c).to_string())
            .collect::<Vec<_>>()
            .join(" ");
        for name in set.element_names() {
            let _ = writeln!(
                out,
                "elem {} : [{}] -> {}",
                display(ki, name),
                word,
                seq.outputs().name(key.1)
            );
        }
    }
    for (ki, (_, set)) in seq.support().enumerate() {
        for pos in set.generator_positions() {
            let table = set.generator(pos).expect("listed position");
            for (e, &img) in table.iter().enumerate() {
                if e != img {
                    let _ = writeln!(
                        out,
                        "action {} swap({}) = {}",
                        display(ki, set.element_name(e)),
                        pos,
                        display(ki, set.element_name(img))
                    );
                }
            }
        }
    }
    out
}

pub fn load_seq(path: &Path) -> Result<SymSeq> {
    let text = std::fs::read_to_string(path)?;
    parse_seq(&text)
}

pub fn save_seq(path: &Path, seq: &SymSeq) -> Result<()> {
    std::fs::write(path, serialize_seq(seq))?;
    Ok(())
}
