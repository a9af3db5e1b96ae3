//! Text formats: lattices, symbol tables, vocabularies and parameter files.
//!
//! Lattice files hold one arc or final state per line:
//!
//! ```text
//! # src dst ilabel olabel [weight]
//! 0 1 2 2 0:1.5
//! 1 2 3 3
//! # state [final weight]
//! 2
//! ```
//!
//! The first state mentioned is the initial state; states are otherwise
//! numbered in ascending order of their ids. A missing weight means
//! the semiring one; `INF` means zero (a final line with `INF` only declares
//! the state). Labels are integers; words live in a separate symbol table of
//! `word<TAB>id` lines.

mod config;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub use config::{parse_params, read_params, read_vocab, resolve_vocab, ParamsConfig};

use crate::error::{Error, Result};
use crate::fst::{Arc, StateId, Wfst};
use crate::semiring::FeatureWeight;
use crate::symbols::{Label, SymbolTable, UNK};
use crate::validate::{ensure_valid, LatticeKind, TranslationLattice};

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Content lines with their 1-based numbers, comments and blanks removed.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub fn read_lattice(path: &Path, symbols: Option<&SymbolTable>, kind: LatticeKind) -> Result<Wfst> {
    parse_lattice(&read_text(path)?, path, symbols, kind)
}

/// Read an NMT or Hiero lattice and wrap it.
pub fn read_translation_lattice(
    path: &Path,
    symbols: Option<&SymbolTable>,
    kind: LatticeKind,
) -> Result<TranslationLattice> {
    let fst = read_lattice(path, symbols, kind)?;
    TranslationLattice::new(fst, kind).map_err(|e| e.at(path, None))
}

/// Parse lattice text; `path` is only used in error messages.
pub fn parse_lattice(text: &str, path: &Path, symbols: Option<&SymbolTable>, kind: LatticeKind) -> Result<Wfst> {
    let err = |line: usize, msg: String| Error::input(path, Some(line), msg);
    let score = kind.score_feature();
    let mut arcs: Vec<(usize, u64, u64, Label, Label, FeatureWeight)> = Vec::new();
    let mut finals: Vec<(usize, u64, FeatureWeight)> = Vec::new();
    let mut first: Option<u64> = None;

    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split_whitespace().collect();
        let parse_state = |f: &str| f.parse::<u64>().map_err(|_| err(line, format!("bad state id {f:?}")));
        let parse_label = |f: &str| f.parse::<Label>().map_err(|_| err(line, format!("bad label {f:?}")));
        let parse_weight = |f: Option<&&str>| -> Result<FeatureWeight> {
            let w = match f {
                Some(t) => t.parse::<FeatureWeight>().map_err(|e| err(line, e.to_string()))?,
                None => FeatureWeight::one(),
            };
            if let Some(score) = score {
                if let Some((id, _)) = w.entries().iter().find(|(id, _)| *id != score) {
                    return Err(err(line, format!("{kind} lattice weight carries foreign feature {id}")));
                }
            }
            Ok(w)
        };
        match fields.len() {
            1 | 2 => {
                let s = parse_state(fields[0])?;
                first.get_or_insert(s);
                finals.push((line, s, parse_weight(fields.get(1))?));
            }
            4 | 5 => {
                let (src, dst) = (parse_state(fields[0])?, parse_state(fields[1])?);
                first.get_or_insert(src);
                let (il, ol) = (parse_label(fields[2])?, parse_label(fields[3])?);
                let w = parse_weight(fields.get(4))?;
                if let Some(table) = symbols {
                    for l in [il, ol] {
                        if table.word(l).is_none() {
                            return Err(err(line, format!("label {l} is not in the symbol table")));
                        }
                    }
                }
                if kind.is_lattice() {
                    if il != ol {
                        return Err(err(line, format!("{kind} lattices must be acceptors, found {il}:{ol}")));
                    }
                    if kind == LatticeKind::Hiero && il == UNK {
                        return Err(err(line, "Hiero lattices must not contain UNK".into()));
                    }
                }
                arcs.push((line, src, dst, il, ol, w));
            }
            n => return Err(err(line, format!("expected 1, 2, 4 or 5 fields, found {n}"))),
        }
    }
    let Some(first) = first else {
        return Err(Error::input(path, None, "no states"));
    };

    // states keep the relative order of their ids
    let mut raw: Vec<u64> = arcs
        .iter()
        .flat_map(|a| [a.1, a.2])
        .chain(finals.iter().map(|f| f.1))
        .collect();
    raw.sort_unstable();
    raw.dedup();
    let id = |r: u64| raw.binary_search(&r).expect("every mentioned state is collected");
    let mut fst = Wfst::new();
    for _ in &raw {
        fst.add_state();
    }
    fst.set_initial(id(first))?;
    let mut arc_lines: Vec<Vec<usize>> = vec![Vec::new(); raw.len()];
    for (line, src, dst, il, ol, w) in arcs {
        fst.add_arc(id(src), Arc::new(il, ol, w, id(dst)))?;
        arc_lines[id(src)].push(line);
    }
    let mut final_seen: HashMap<StateId, usize> = HashMap::new();
    for (line, s, w) in finals {
        if let Some(prev) = final_seen.insert(id(s), line) {
            return Err(err(
                line,
                format!("final weight for state {s} already given on line {prev}"),
            ));
        }
        fst.set_final(id(s), w)?;
    }

    if kind.is_lattice() {
        if let Some(cycle) = fst.find_cycle() {
            let line = cycle_line(&fst, &arc_lines, &cycle);
            return Err(Error::Cycle(cycle).at(path, line));
        }
        ensure_valid(&fst, kind).map_err(|e| e.at(path, None))?;
    }
    Ok(fst)
}

fn cycle_line(fst: &Wfst, arc_lines: &[Vec<usize>], cycle: &[StateId]) -> Option<usize> {
    let (&a, &b) = (cycle.first()?, cycle.get(1).or(cycle.first())?);
    let idx = fst.arcs(a).iter().position(|arc| arc.nextstate == b)?;
    arc_lines.get(a)?.get(idx).copied()
}

/// Deterministic text form of `fst`.
///
/// States are renumbered so the initial state is 0 and the rest keep their
/// relative order. Arcs are listed per state, sorted by
/// `(ilabel, olabel, target)`; final lines follow.
pub fn format_lattice(fst: &Wfst) -> Result<String> {
    let init = fst
        .initial()
        .ok_or_else(|| Error::contract("cannot write a machine without an initial state"))?;
    let n = fst.num_states();
    let mut order: Vec<StateId> = vec![init];
    order.extend(fst.states().filter(|&s| s != init));
    let mut id = vec![0usize; n];
    for (new, &old) in order.iter().enumerate() {
        id[old] = new;
    }

    let mut mentioned = vec![false; n];
    let mut out = String::new();
    if fst.arcs(init).is_empty() && !fst.is_final(init) {
        let _ = writeln!(out, "0 INF");
        mentioned[init] = true;
    }
    for &s in &order {
        let mut arcs: Vec<&Arc> = fst.arcs(s).iter().collect();
        arcs.sort_by_key(|a| (a.ilabel, a.olabel, id[a.nextstate]));
        for a in arcs {
            mentioned[s] = true;
            mentioned[a.nextstate] = true;
            let _ = write!(out, "{} {} {} {}", id[s], id[a.nextstate], a.ilabel, a.olabel);
            if !a.weight.is_one() {
                let _ = write!(out, " {}", a.weight);
            }
            out.push('\n');
        }
    }
    for &s in &order {
        let w = fst.final_weight(s);
        if !w.is_zero() {
            mentioned[s] = true;
            if w.is_one() {
                let _ = writeln!(out, "{}", id[s]);
            } else {
                let _ = writeln!(out, "{} {}", id[s], w);
            }
        }
    }
    // isolated states, so the state count survives a round trip
    for &s in &order {
        if !mentioned[s] {
            let _ = writeln!(out, "{} INF", id[s]);
        }
    }
    Ok(out)
}

pub fn write_lattice(fst: &Wfst, path: &Path) -> Result<()> {
    write_text(path, &format_lattice(fst)?)
}

pub fn parse_symbols(text: &str, path: &Path) -> Result<SymbolTable> {
    let mut table = SymbolTable::new();
    for (line, content) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        if content.trim().is_empty() {
            continue;
        }
        let (word, id) = content
            .split_once('\t')
            .ok_or_else(|| Error::input(path, Some(line), "expected word<TAB>id"))?;
        let id: Label = id
            .trim()
            .parse()
            .map_err(|_| Error::input(path, Some(line), format!("bad label {:?}", id.trim())))?;
        table.insert(word, id).map_err(|e| e.at(path, Some(line)))?;
    }
    Ok(table)
}

pub fn read_symbols(path: &Path) -> Result<SymbolTable> {
    parse_symbols(&read_text(path)?, path)
}

pub fn format_symbols(table: &SymbolTable) -> String {
    let mut out = String::new();
    for (label, word) in table.iter() {
        let _ = writeln!(out, "{word}\t{label}");
    }
    out
}

pub fn write_symbols(table: &SymbolTable, path: &Path) -> Result<()> {
    write_text(path, &format_symbols(table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_paths;
    use crate::oracle::synth::{random_lattice, LatticeShape};
    use crate::semiring::{feature, ParamVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p() -> &'static Path {
        Path::new("t.fst")
    }

    #[test]
    fn chain() {
        let f = parse_lattice("0 1 2 2 1:0.5\n1 2 3 3\n2\n", p(), None, LatticeKind::Hiero).unwrap();
        assert_eq!(f.num_states(), 3);
        assert_eq!(f.initial(), Some(0));
        assert_eq!(f.arcs(0)[0].weight, FeatureWeight::single(feature::HIERO_SCORE, 0.5));
        assert!(f.is_final(2));
    }

    #[test]
    fn first_mentioned_is_initial() {
        let f = parse_lattice("7 3 2 2\n3\n", p(), None, LatticeKind::Generic).unwrap();
        assert_eq!(f.initial(), Some(1));
        assert_eq!(f.arcs(1)[0].nextstate, 0);
        assert_eq!(format_lattice(&f).unwrap(), "0 1 2 2\n1\n");
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_lattice("0 1 2 2\n1 2 1 1\n2\n", p(), None, LatticeKind::Hiero).unwrap_err();
        assert!(e.to_string().starts_with("t.fst:2:"), "{e}");
        let e = parse_lattice("0 1 2 3\n1\n", p(), None, LatticeKind::Nmt).unwrap_err();
        assert!(e.to_string().starts_with("t.fst:1:"), "{e}");
        let e = parse_lattice("0 1 2\n", p(), None, LatticeKind::Generic).unwrap_err();
        assert!(e.to_string().contains(":1:"), "{e}");
        let e = parse_lattice("0 1 2 2 x:1\n", p(), None, LatticeKind::Generic).unwrap_err();
        assert!(e.to_string().contains(":1:"), "{e}");
        let e = parse_lattice("0 1 2 2 0:1\n1\n", p(), None, LatticeKind::Hiero).unwrap_err();
        assert!(e.to_string().contains("foreign feature 0"), "{e}");
    }

    #[test]
    fn cycle_is_named() {
        let e = parse_lattice("0 1 2 2\n1 0 3 3\n1\n", p(), None, LatticeKind::Nmt).unwrap_err();
        let msg = e.to_string();
        assert!(
            msg.contains("cycle through states 0 -> 1 -> 0") || msg.contains("1 -> 0 -> 1"),
            "{msg}"
        );
        assert!(msg.starts_with("t.fst:"), "{msg}");
        assert!(parse_lattice("0 1 2 2\n1 0 3 3\n1\n", p(), None, LatticeKind::Generic).is_ok());
    }

    #[test]
    fn unknown_symbol() {
        let mut t = SymbolTable::new();
        t.add("a");
        assert!(parse_lattice("0 1 2 2\n1\n", p(), Some(&t), LatticeKind::Nmt).is_ok());
        let e = parse_lattice("0 1 3 3\n1\n", p(), Some(&t), LatticeKind::Nmt).unwrap_err();
        assert!(e.to_string().contains("not in the symbol table"));
    }

    #[test]
    fn empty_machine_cannot_be_written() {
        assert!(format_lattice(&Wfst::new()).is_err());
        assert!(parse_lattice("# nothing\n", p(), None, LatticeKind::Generic).is_err());
    }

    #[test]
    fn write_is_sorted_and_stable() {
        let f = parse_lattice(
            "0 2 5 5\n0 1 3 3\n0 1 2 2\n1 2 4 4\n2\n",
            p(),
            None,
            LatticeKind::Generic,
        )
        .unwrap();
        let text = format_lattice(&f).unwrap();
        assert_eq!(text, "0 1 2 2\n0 1 3 3\n0 2 5 5\n1 2 4 4\n2\n");
        let again = parse_lattice(&text, p(), None, LatticeKind::Generic).unwrap();
        assert_eq!(format_lattice(&again).unwrap(), text);
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = ParamVector::uniform(1.0);
        for _ in 0..50 {
            let f = random_lattice(&mut rng, &LatticeShape::default(), &[2, 3, 4, 1], feature::NMT_SCORE);
            let text = format_lattice(&f).unwrap();
            let g = parse_lattice(&text, p(), None, LatticeKind::Nmt).unwrap();
            assert_eq!(g.num_states(), f.num_states());
            assert_eq!(g.num_arcs(), f.num_arcs());
            assert_eq!(format_lattice(&g).unwrap(), text);
            let key = |f: &Wfst| {
                let mut v: Vec<_> = enumerate_paths(f, 10_000, &params)
                    .unwrap()
                    .into_iter()
                    .map(|h| (h.tokens, h.features.to_string()))
                    .collect();
                v.sort();
                v
            };
            assert_eq!(key(&f), key(&g));
        }
    }

    #[test]
    fn initial_without_arcs_survives() {
        let mut f = Wfst::new();
        let a = f.add_state();
        f.add_state();
        f.set_initial(a).unwrap();
        f.set_final(1, FeatureWeight::one()).unwrap();
        let text = format_lattice(&f).unwrap();
        assert_eq!(text, "0 INF\n1\n");
        let g = parse_lattice(&text, p(), None, LatticeKind::Generic).unwrap();
        assert_eq!(g.num_states(), 2);
        assert!(!g.is_final(0));
    }

    #[test]
    fn symbols_round_trip() {
        let text = "<eps>\t0\nUNK\t1\ndie\t2\nPolitik\t5\n";
        let t = parse_symbols(text, Path::new("s.txt")).unwrap();
        assert_eq!(t.label("Politik"), Some(5));
        assert_eq!(t.word(3), None);
        assert_eq!(format_symbols(&t), text);
        let e = parse_symbols("a\t2\nb\t2\n", Path::new("s.txt")).unwrap_err();
        assert!(e.to_string().starts_with("s.txt:2:"), "{e}");
        assert!(parse_symbols("a 2\n", Path::new("s.txt")).is_err());
    }
}
