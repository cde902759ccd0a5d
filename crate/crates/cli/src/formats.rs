//! Text, JSON and CSV formats.
//!
//! * Matrix: first line `rows cols`, then one whitespace-separated row per line.
//! * Code: one sign string (`+`/`-`) per line.
//! * Design: first line `n t ell`, then one block of 0-based indices per line.
//! * Protocol: JSON, see [`ProtocolFile`].
//! * Curves: CSV `label,nu,lambda`; the approximation scatter adds `epsilon`.
//!
//! Blank lines and lines starting with `#` are ignored in the text formats.
//! Reported numbers are rounded to 12 significant digits; protocol
//! coefficients are written at full precision so that files verify exactly.

use std::fmt::Write as _;

use accessred_core::bounds::BoundCurve;
use accessred_core::construct::BlockSpec;
use accessred_core::covering::{CoveringCode, CoveringDesign};
use accessred_core::{enumerate_sign_vectors, Decoder, Matrix, Protocol, SignVector, SparseCombination};
use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut lines = content_lines(text);
    let (_, header) = lines.next().ok_or_else(|| anyhow!("empty matrix file"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad matrix header {header:?}"))?;
    let [rows, cols] = dims[..] else {
        bail!("matrix header must be `rows cols`, got {header:?}");
    };
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (no, line) in lines {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .with_context(|| format!("line {no}: bad number"))?;
        ensure!(row.len() == cols, "line {no}: {} entries, expected {cols}", row.len());
        data.extend(row);
        seen += 1;
    }
    ensure!(seen == rows, "{seen} rows, header says {rows}");
    Ok(Matrix::new(rows, cols, data)?)
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(f64::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_code(text: &str) -> Result<CoveringCode> {
    let words: Vec<SignVector> = content_lines(text)
        .map(|(no, l)| l.parse().with_context(|| format!("line {no}: bad sign string")))
        .collect::<Result<_>>()?;
    let k0 = words.first().ok_or_else(|| anyhow!("code file has no words"))?.len();
    ensure!(words.iter().all(|w| w.len() == k0), "codewords differ in length");
    Ok(CoveringCode::new(k0, words)?)
}

pub fn format_code(code: &CoveringCode) -> String {
    code.words().iter().map(|w| format!("{w}\n")).collect()
}

pub fn parse_design(text: &str) -> Result<CoveringDesign> {
    let mut lines = content_lines(text);
    let (_, header) = lines.next().ok_or_else(|| anyhow!("empty design file"))?;
    let params: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad design header {header:?}"))?;
    let [n, t, ell] = params[..] else {
        bail!("design header must be `n t ell`, got {header:?}");
    };
    let blocks: Vec<Vec<usize>> = lines
        .map(|(no, l)| {
            l.split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .with_context(|| format!("line {no}: bad index"))
        })
        .collect::<Result<_>>()?;
    Ok(CoveringDesign::new(n, t, ell, &blocks)?)
}

pub fn format_design(d: &CoveringDesign) -> String {
    let mut out = format!("{} {} {}\n", d.n(), d.t(), d.ell());
    for b in d.blocks() {
        let idx: Vec<String> = b.iter().map(usize::to_string).collect();
        out.push_str(&idx.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderEntry {
    pub w: String,
    pub support: Vec<usize>,
    pub coeffs: Vec<f64>,
}

/// A block decoder: `count` blocks of `matrix`, of which the first `kept` are stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockFile {
    pub k0: usize,
    pub n0: usize,
    pub ell0: usize,
    pub count: usize,
    pub kept: usize,
    pub matrix: Vec<Vec<f64>>,
    pub decoder: Vec<DecoderEntry>,
}

/// Protocol on disk. A decoder is given either as a full table or as a block;
/// with neither, one is searched for when the file is loaded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolFile {
    pub k: usize,
    pub n: usize,
    pub ell: usize,
    pub encoder: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoder: Option<Vec<DecoderEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<BlockFile>,
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn entries(k: usize, table: &[SparseCombination]) -> Result<Vec<DecoderEntry>> {
    Ok(enumerate_sign_vectors(k)?
        .zip(table)
        .map(|(w, a)| DecoderEntry {
            w: w.to_string(),
            support: a.support().to_vec(),
            coeffs: a.coeffs().to_vec(),
        })
        .collect())
}

fn table_from(k: usize, entries: &[DecoderEntry]) -> Result<Vec<SparseCombination>> {
    ensure!(k < 31, "decoder table for k = {k} is too large");
    let mut table: Vec<Option<SparseCombination>> = vec![None; 1 << k];
    for e in entries {
        let w: SignVector = e.w.parse().with_context(|| format!("bad sign string {:?}", e.w))?;
        ensure!(w.len() == k, "decoder entry {} has length {}, expected {k}", e.w, w.len());
        let slot = &mut table[w.bits() as usize];
        ensure!(slot.is_none(), "duplicate decoder entry for {}", e.w);
        *slot = Some(SparseCombination::from_parts(&e.support, &e.coeffs)?);
    }
    table
        .into_iter()
        .enumerate()
        .map(|(bits, a)| a.ok_or_else(|| anyhow!("no decoder entry for {}", SignVector::new(k, bits as u64).unwrap())))
        .collect()
}

fn matrix_from_rows(rows: &[Vec<f64>], k: usize, n: usize, what: &str) -> Result<Matrix> {
    ensure!(rows.len() == k, "{what} has {} rows, expected {k}", rows.len());
    ensure!(rows.iter().all(|r| r.len() == n), "{what} rows must have {n} entries");
    Ok(Matrix::new(k, n, rows.concat())?)
}

impl ProtocolFile {
    pub fn from_protocol(p: &Protocol) -> Result<Self> {
        let (decoder, block) = match p.decoder() {
            Decoder::Table(table) => (Some(entries(p.k(), table)?), None),
            Decoder::Blocks { spec, blocks, kept } => (
                None,
                Some(BlockFile {
                    k0: spec.k0(),
                    n0: spec.n0(),
                    ell0: spec.ell0(),
                    count: *blocks,
                    kept: *kept,
                    matrix: rows_of(spec.matrix()),
                    decoder: entries(spec.k0(), spec.table())?,
                }),
            ),
        };
        Ok(ProtocolFile {
            k: p.k(),
            n: p.n(),
            ell: p.ell(),
            encoder: rows_of(p.encoder()),
            decoder,
            block,
        })
    }

    /// Builds the protocol, or returns the encoder alone when no decoder is stored.
    pub fn into_protocol(self) -> Result<Result<Protocol, Matrix>> {
        let encoder = matrix_from_rows(&self.encoder, self.k, self.n, "encoder")?;
        ensure!(
            self.decoder.is_none() || self.block.is_none(),
            "give either a decoder table or a block, not both"
        );
        if let Some(b) = self.block {
            let matrix = matrix_from_rows(&b.matrix, b.k0, b.n0, "block matrix")?;
            let spec = BlockSpec::new(matrix, b.ell0, table_from(b.k0, &b.decoder)?)?;
            ensure!(b.kept >= 1 && b.kept <= b.count, "kept = {} outside 1..={}", b.kept, b.count);
            let expected = spec.matrix().block_diagonal(b.kept, (b.count - b.kept) * b.k0)?;
            ensure!(expected == encoder, "encoder is not the block-diagonal expansion of the block matrix");
            let decoder = Decoder::Blocks {
                spec,
                blocks: b.count,
                kept: b.kept,
            };
            return Ok(Ok(Protocol::new(encoder, self.ell, decoder)?));
        }
        match self.decoder {
            Some(entries) => {
                let table = table_from(self.k, &entries)?;
                Ok(Ok(Protocol::new(encoder, self.ell, Decoder::Table(table))?))
            }
            None => Ok(Err(encoder)),
        }
    }
}

pub fn parse_protocol(text: &str) -> Result<ProtocolFile> {
    serde_json::from_str(text).context("malformed protocol JSON")
}

pub fn format_protocol(p: &Protocol) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&ProtocolFile::from_protocol(p)?)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub label: String,
    pub nu: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub label: String,
    pub nu: f64,
    pub lambda: f64,
    pub epsilon: f64,
}

fn write_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn read_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.context("malformed CSV row"))
        .collect()
}

/// Curve points then labelled single points, rounded to 12 significant digits.
pub fn curve_rows(curves: &[BoundCurve], points: &[(String, f64, f64)]) -> Vec<CurveRow> {
    let from_curves = curves.iter().flat_map(|c| {
        c.points.iter().map(|p| CurveRow {
            label: c.label.clone(),
            nu: sig12(p.nu),
            lambda: sig12(p.lambda),
        })
    });
    let singles = points.iter().map(|(label, nu, lambda)| CurveRow {
        label: label.clone(),
        nu: sig12(*nu),
        lambda: sig12(*lambda),
    });
    from_curves.chain(singles).collect()
}

pub fn format_curves(rows: &[CurveRow]) -> Result<String> {
    if rows.is_empty() {
        return Ok("label,nu,lambda\n".into());
    }
    write_csv(rows)
}

pub fn parse_curves(text: &str) -> Result<Vec<CurveRow>> {
    read_csv(text)
}

pub fn format_scatter(rows: &[ScatterRow]) -> Result<String> {
    let rounded: Vec<ScatterRow> = rows
        .iter()
        .map(|r| ScatterRow {
            label: r.label.clone(),
            nu: sig12(r.nu),
            lambda: sig12(r.lambda),
            epsilon: sig12(r.epsilon),
        })
        .collect();
    write_csv(&rounded)
}

pub fn parse_scatter(text: &str) -> Result<Vec<ScatterRow>> {
    read_csv(text)
}

/// One-line human summary of a protocol's shape.
pub fn describe(p: &Protocol) -> String {
    let mut s = format!("k={} n={} ell={}", p.k(), p.n(), p.ell());
    if let Ok(rp) = p.rate_point() {
        let _ = write!(s, " nu={} lambda={}", sig12(rp.nu), sig12(rp.lambda));
    }
    s
}
