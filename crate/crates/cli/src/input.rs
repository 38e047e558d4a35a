//! Flag-value parsers: the row mini-language, index families, rational
//! lists, and permutations. Everything maps bad input to a precondition
//! error so the process exits 2 with a usable message.

use std::fs;
use std::path::Path;

use normset::engine::EngineOpts;
use normset::seq_lab::{basis_seq, custom_seq, flat_blocks, mix_seq, BlockSeq, IndexFamily};
use normset::{Error, FinVec, Rat, Result, SpaceSpec};

pub fn load_space(path: Option<&Path>) -> Result<SpaceSpec> {
    match path {
        Some(p) => SpaceSpec::load(p),
        None => Ok(SpaceSpec::standard()),
    }
}

fn bad(spec: &str, why: &str) -> Error {
    Error::Precondition(format!(
        "row spec `{spec}`: {why}; use basis:L, tail:S:L, flat:K, mix:W:L, or file:PATH"
    ))
}

fn parse_count(spec: &str, field: &str) -> Result<usize> {
    field
        .parse::<usize>()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| bad(spec, &format!("`{field}` is not a positive count")))
}

/// One row: basis:L, tail:S:L, flat:K, mix:W:L, or file:PATH.
/// Mixes interleave odd and even units e_1,e_3,... with e_2,e_4,... and
/// normalize through the engine, so they need the space and engine options.
pub fn parse_row(spec: &str, space: &SpaceSpec, opts: &EngineOpts) -> Result<BlockSeq> {
    if let Some(path) = spec.strip_prefix("file:") {
        return custom_seq(&fs::read_to_string(path)?);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["basis", l] => basis_seq(parse_count(spec, l)?),
        ["tail", s, l] => {
            let start = s
                .parse::<u32>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| bad(spec, "`S` is not a positive start"))?;
            let len = parse_count(spec, l)? as u32;
            let members = (start..start + len).map(FinVec::unit).collect();
            BlockSeq::new(members, format!("tail-{start}"), true)
        }
        ["flat", k] => flat_blocks(&IndexFamily::dyadic(parse_count(spec, k)?)),
        ["mix", w, l] => {
            let w: Rat = w.parse().map_err(|_| bad(spec, "`W` is not a rational"))?;
            let len = parse_count(spec, l)? as u32;
            let odd = (0..len).map(|j| FinVec::unit(2 * j + 1)).collect();
            let even = (0..len).map(|j| FinVec::unit(2 * j + 2)).collect();
            let xs = BlockSeq::new(odd, "odd-units", true)?;
            let ys = BlockSeq::new(even, "even-units", true)?;
            mix_seq(&xs, &ys, &w, space, opts)
        }
        _ => Err(bad(spec, "unknown form")),
    }
}

pub fn parse_rows(specs: &str, space: &SpaceSpec, opts: &EngineOpts) -> Result<Vec<BlockSeq>> {
    specs.split(',').map(|s| parse_row(s.trim(), space, opts)).collect()
}

/// dyadic:K, or explicit inclusive ranges like 1-1,2-3,4-7.
pub fn parse_family(spec: &str) -> Result<IndexFamily> {
    if let Some(k) = spec.strip_prefix("dyadic:") {
        let k = k
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::Precondition(format!("family `{spec}`: bad level count")))?;
        return Ok(IndexFamily::dyadic(k));
    }
    let mut sets = Vec::new();
    for part in spec.split(',') {
        let (lo, hi) = part
            .split_once('-')
            .ok_or_else(|| Error::Precondition(format!("family `{spec}`: `{part}` is not lo-hi")))?;
        let lo: u32 = lo
            .parse()
            .map_err(|_| Error::Precondition(format!("family `{spec}`: bad bound in `{part}`")))?;
        let hi: u32 = hi
            .parse()
            .map_err(|_| Error::Precondition(format!("family `{spec}`: bad bound in `{part}`")))?;
        if lo < 1 || hi < lo {
            return Err(Error::Precondition(format!("family `{spec}`: empty range `{part}`")));
        }
        sets.push((lo..=hi).collect());
    }
    IndexFamily::new(sets)
}

pub fn parse_rat_list(s: &str) -> Result<Vec<Rat>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<Rat>()
                .map_err(|e| Error::Precondition(format!("coefficient `{t}`: {e}")))
        })
        .collect()
}

pub fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::Precondition(format!("`{t}` is not a size")))
        })
        .collect()
}

/// 1-based permutation text like "2,1" into 0-based indices; full
/// validation happens where the row count is known.
pub fn parse_perm(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .map(|v| v - 1)
                .ok_or_else(|| Error::Precondition(format!("perm entry `{t}` is not 1-based")))
        })
        .collect()
}

/// Semicolon-separated coefficient vectors.
pub fn parse_lambda_sets(s: &str) -> Result<Vec<Vec<Rat>>> {
    s.split(';').map(parse_rat_list).collect()
}

pub fn parse_anchor(s: &str) -> Result<FinVec> {
    FinVec::parse_line(s, 1)
}
