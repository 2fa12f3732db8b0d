//! Plain-text graph files.
//!
//! ```text
//! n m MODEL p seed
//! u v 0        one line per clique edge, u < v
//! u v j        one line per slot, arrival-time order
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{EvolvingGraph, GenConfig, Model};
use crate::error::{Error, Result};

pub fn write_graph<W: Write>(g: &EvolvingGraph, mut w: W) -> Result<()> {
    let c = g.config();
    writeln!(w, "{} {} {} {} {}", c.n, c.m, c.model, c.p, c.seed)?;
    for (u, v) in g.clique_edges() {
        writeln!(w, "{u} {v} 0")?;
    }
    for v in g.first_arrival()..=g.n() {
        for (j, u) in g.out_targets(v).iter().enumerate() {
            writeln!(w, "{u} {v} {}", j + 1)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn save_graph(g: &EvolvingGraph, path: impl AsRef<Path>) -> Result<()> {
    write_graph(g, BufWriter::new(File::create(path)?))
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str, line: usize) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse { line, message: format!("missing {what}") })?;
    tok.parse().map_err(|_| Error::Parse { line, message: format!("bad {what} {tok:?}") })
}

pub fn read_graph<R: Read>(r: R) -> Result<EvolvingGraph> {
    let mut lines = BufReader::new(r).lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, message: "empty graph file".into() })?;
    let header = header?;
    let mut toks = header.split_whitespace();
    let n: usize = parse(toks.next(), "n", 1)?;
    let m: usize = parse(toks.next(), "m", 1)?;
    let model: Model = parse(toks.next(), "model", 1)?;
    let p: f64 = parse(toks.next(), "p", 1)?;
    let seed: u64 = parse(toks.next(), "seed", 1)?;
    let config = GenConfig { model, n, m, p, seed };
    config.validate()?;

    let mut clique = Vec::new();
    let mut targets = vec![0u32; (n - m - 1) * m];
    for (idx, line) in lines {
        let line = line?;
        let ln = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let u: usize = parse(toks.next(), "u", ln)?;
        let v: usize = parse(toks.next(), "v", ln)?;
        let j: usize = parse(toks.next(), "j", ln)?;
        if j == 0 {
            clique.push((u, v));
            continue;
        }
        if v < m + 2 || v > n || j > m {
            return Err(Error::Parse { line: ln, message: format!("slot ({u}, {v}, {j}) out of range") });
        }
        let at = (v - m - 2) * m + (j - 1);
        if targets[at] != 0 {
            return Err(Error::Parse { line: ln, message: format!("slot ({v}, {j}) listed twice") });
        }
        targets[at] = u as u32;
    }
    let expected: Vec<_> = (1..=m + 1).flat_map(|u| (u + 1..=m + 1).map(move |v| (u, v))).collect();
    if clique != expected {
        return Err(Error::Config(format!("clique edges do not form K_{}", m + 1)));
    }
    if let Some(pos) = targets.iter().position(|&u| u == 0) {
        return Err(Error::Config(format!("slot ({}, {}) missing", pos / m + m + 2, pos % m + 1)));
    }
    EvolvingGraph::from_parts(config, targets)
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<EvolvingGraph> {
    read_graph(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate;
    use proptest::prelude::*;

    #[test]
    fn small_file_layout() {
        let g = generate(&GenConfig::new(Model::PaIndependent, 4, 1, 1.0, 3)).unwrap();
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "4 1 PA_INDEPENDENT 1 3");
        assert_eq!(lines[1], "1 2 0");
        assert!(lines[2].ends_with(" 3 1"));
        assert!(lines[3].ends_with(" 4 1"));
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn rejects_damaged_files() {
        let g = generate(&GenConfig::new(Model::PaIndependent, 6, 2, 0.5, 3)).unwrap();
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();

        let missing_slot: String = text.lines().take(text.lines().count() - 1).map(|l| format!("{l}\n")).collect();
        assert!(read_graph(missing_slot.as_bytes()).is_err());

        let forward = text.replacen("\n1 2 0", "\n1 2 0\n6 5 1", 1);
        assert!(read_graph(forward.as_bytes()).is_err());

        assert!(read_graph("5 2 PA_MAGIC 1 0\n".as_bytes()).is_err());
        assert!(read_graph("".as_bytes()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn round_trip_is_exact(
            model in proptest::sample::select(Model::ALL.to_vec()),
            n in 5usize..80,
            m in 1usize..4,
            p in proptest::sample::select(vec![0.0, 0.1, 0.3, 0.5, 1.0, 1.0 / 3.0]),
            seed in any::<u64>(),
        ) {
            let g = generate(&GenConfig::new(model, n, m, p, seed)).unwrap();
            let mut buf = Vec::new();
            write_graph(&g, &mut buf).unwrap();
            let back = read_graph(buf.as_slice()).unwrap();
            prop_assert_eq!(&back, &g);
            let mut again = Vec::new();
            write_graph(&back, &mut again).unwrap();
            prop_assert_eq!(again, buf);
        }
    }
}
