//! File formats: binary matrices and sketches, CSV reports, CSV vector
//! input, and factorizer snapshots. Everything is little-endian and
//! byte-reproducible: identical inputs yield identical files.
//!
//! Matrix format ("JLM1"): magic `JLM1`, u32 rows, u32 cols, u8 kind.
//! Kind 0 is dense row-major 8-byte IEEE-754; kind 1 is sparse-by-column
//! (per column: u32 count, then count × (u32 row index, f64 value)).
//!
//! Snapshot format ("JLF1"): magic `JLF1`, u32 d, u32 M, u64 t, f64 sigma,
//! u64 seed, then dense blocks for the precision (d×d), the accumulator
//! (d×M), the inverse square root of the prior (d×d), and the observation
//! history (t×d, one row per observation). The random rows are not stored;
//! they are regenerated from the seed on load.
//!
//! Report CSV schema (fixed column order):
//! `run_id,subcommand,construction,m,n,s,M,d,T,eps,delta,t,trials,failures,rate,ci_low,ci_high,bound,seed`
//! with empty fields where a column does not apply. A report with a tail
//! curve writes one row per curve point; a report without one writes a
//! single summary row.

use std::fs::{File, OpenOptions};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::factorize::FactorizerState;
use crate::linalg::{Matrix, Vector};
use crate::seed::Seed;
use crate::sketch::{Sketch, SketchStorage};
use crate::verify::{ExperimentReport, ReportMeta, TailPoint};
use crate::{Error, Result};

pub const MATRIX_MAGIC: [u8; 4] = *b"JLM1";
pub const SNAPSHOT_MAGIC: [u8; 4] = *b"JLF1";

pub const REPORT_HEADER: &str =
    "run_id,subcommand,construction,m,n,s,M,d,T,eps,delta,t,trials,failures,rate,ci_low,ci_high,bound,seed";

fn io_err(context: &str, source: std::io::Error) -> Error {
    Error::Io {
        context: context.to_string(),
        source,
    }
}

/// Payload of a JLM1 file.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixPayload {
    Dense(Matrix),
    Sparse {
        m: usize,
        columns: Vec<Vec<(u32, f64)>>,
    },
}

impl MatrixPayload {
    pub fn rows(&self) -> usize {
        match self {
            MatrixPayload::Dense(m) => m.rows(),
            MatrixPayload::Sparse { m, .. } => *m,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            MatrixPayload::Dense(m) => m.cols(),
            MatrixPayload::Sparse { columns, .. } => columns.len(),
        }
    }

    /// View as sketch storage so it can be applied to vectors.
    pub fn into_storage(self) -> SketchStorage {
        match self {
            MatrixPayload::Dense(mat) => {
                let columns = (0..mat.cols()).map(|j| mat.column(j).into_vec()).collect();
                SketchStorage::Dense {
                    m: mat.rows(),
                    columns,
                }
            }
            MatrixPayload::Sparse { m, columns } => SketchStorage::Sparse { m, columns },
        }
    }
}

impl From<&SketchStorage> for MatrixPayload {
    fn from(storage: &SketchStorage) -> Self {
        match storage {
            SketchStorage::Dense { m, columns } => {
                let mut mat = Matrix::zeros(*m, columns.len());
                for (j, col) in columns.iter().enumerate() {
                    for (r, &v) in col.iter().enumerate() {
                        mat[(r, j)] = v;
                    }
                }
                MatrixPayload::Dense(mat)
            }
            SketchStorage::Sparse { m, columns } => MatrixPayload::Sparse {
                m: *m,
                columns: columns.clone(),
            },
        }
    }
}

/// Tracks the byte offset so format errors can point at it.
struct CountingReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> CountingReader<R> {
    fn new(inner: R) -> Self {
        CountingReader { inner, offset: 0 }
    }

    fn read_exact_at(&mut self, buf: &mut [u8], what: &str) -> Result<u64> {
        let at = self.offset;
        self.inner.read_exact(buf).map_err(|_| Error::Format {
            offset: at,
            message: format!("unexpected end of file while reading {what}"),
        })?;
        self.offset += buf.len() as u64;
        Ok(at)
    }

    fn read_u32(&mut self, what: &str) -> Result<u32> {
        let mut buf = [0u8; 4];
        self.read_exact_at(&mut buf, what)?;
        Ok(u32::from_le_bytes(buf))
    }

    fn read_u64(&mut self, what: &str) -> Result<u64> {
        let mut buf = [0u8; 8];
        self.read_exact_at(&mut buf, what)?;
        Ok(u64::from_le_bytes(buf))
    }

    fn read_u8(&mut self, what: &str) -> Result<u8> {
        let mut buf = [0u8; 1];
        self.read_exact_at(&mut buf, what)?;
        Ok(buf[0])
    }

    fn read_f64(&mut self, what: &str) -> Result<f64> {
        let mut buf = [0u8; 8];
        self.read_exact_at(&mut buf, what)?;
        Ok(f64::from_le_bytes(buf))
    }
}

/// Writes a matrix payload in the JLM1 format.
pub fn write_matrix_payload<W: Write>(w: &mut W, payload: &MatrixPayload) -> Result<()> {
    let ctx = "writing matrix payload";
    let rows = payload.rows();
    let cols = payload.cols();
    if rows > u32::MAX as usize || cols > u32::MAX as usize {
        return Err(Error::CapExceeded(format!(
            "matrix {rows}x{cols} exceeds the u32 shape limit"
        )));
    }
    w.write_all(&MATRIX_MAGIC).map_err(|e| io_err(ctx, e))?;
    w.write_all(&(rows as u32).to_le_bytes())
        .map_err(|e| io_err(ctx, e))?;
    w.write_all(&(cols as u32).to_le_bytes())
        .map_err(|e| io_err(ctx, e))?;
    match payload {
        MatrixPayload::Dense(mat) => {
            w.write_all(&[0u8]).map_err(|e| io_err(ctx, e))?;
            for v in mat.as_slice() {
                w.write_all(&v.to_le_bytes()).map_err(|e| io_err(ctx, e))?;
            }
        }
        MatrixPayload::Sparse { columns, .. } => {
            w.write_all(&[1u8]).map_err(|e| io_err(ctx, e))?;
            for col in columns {
                w.write_all(&(col.len() as u32).to_le_bytes())
                    .map_err(|e| io_err(ctx, e))?;
                for &(idx, v) in col {
                    w.write_all(&idx.to_le_bytes())
                        .map_err(|e| io_err(ctx, e))?;
                    w.write_all(&v.to_le_bytes()).map_err(|e| io_err(ctx, e))?;
                }
            }
        }
    }
    Ok(())
}

/// Reads a JLM1 payload, reporting malformed content with its byte offset.
pub fn read_matrix_payload<R: Read>(r: &mut R) -> Result<MatrixPayload> {
    let mut reader = CountingReader::new(r);
    let mut magic = [0u8; 4];
    reader.read_exact_at(&mut magic, "magic")?;
    if magic != MATRIX_MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: format!("bad magic {magic:?}, expected {MATRIX_MAGIC:?}"),
        });
    }
    let rows = reader.read_u32("row count")? as usize;
    let cols = reader.read_u32("column count")? as usize;
    let kind = reader.read_u8("storage kind")?;
    match kind {
        0 => {
            let mut data = Vec::with_capacity(rows * cols);
            for _ in 0..rows * cols {
                data.push(reader.read_f64("dense entry")?);
            }
            Ok(MatrixPayload::Dense(Matrix::new(rows, cols, data)))
        }
        1 => {
            let mut columns = Vec::with_capacity(cols);
            for c in 0..cols {
                let count = reader.read_u32("sparse column count")? as usize;
                if count > rows {
                    return Err(Error::Format {
                        offset: reader.offset,
                        message: format!("column {c} claims {count} entries in {rows} rows"),
                    });
                }
                let mut col = Vec::with_capacity(count);
                for _ in 0..count {
                    let at = reader.offset;
                    let idx = reader.read_u32("sparse row index")?;
                    let v = reader.read_f64("sparse value")?;
                    if idx as usize >= rows {
                        return Err(Error::Format {
                            offset: at,
                            message: format!("row index {idx} out of range ({rows} rows)"),
                        });
                    }
                    col.push((idx, v));
                }
                columns.push(col);
            }
            Ok(MatrixPayload::Sparse { m: rows, columns })
        }
        other => Err(Error::Format {
            offset: reader.offset - 1,
            message: format!("unknown storage kind {other}"),
        }),
    }
}

pub fn write_matrix_file(path: &Path, matrix: &Matrix) -> Result<()> {
    write_payload_file(path, &MatrixPayload::Dense(matrix.clone()))
}

pub fn write_sketch_file(path: &Path, sketch: &Sketch) -> Result<()> {
    write_payload_file(path, &MatrixPayload::from(&sketch.storage))
}

pub fn write_payload_file(path: &Path, payload: &MatrixPayload) -> Result<()> {
    let file =
        File::create(path).map_err(|e| io_err(&format!("creating {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    write_matrix_payload(&mut w, payload)?;
    w.flush()
        .map_err(|e| io_err(&format!("flushing {}", path.display()), e))
}

pub fn read_matrix_file(path: &Path) -> Result<MatrixPayload> {
    let file = File::open(path).map_err(|e| io_err(&format!("opening {}", path.display()), e))?;
    read_matrix_payload(&mut BufReader::new(file))
}

fn fmt_opt_u64(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders the CSV rows of a report (header excluded): curve points if any,
/// otherwise a single summary row.
pub fn report_csv_rows(report: &ExperimentReport) -> Vec<String> {
    let meta = &report.meta;
    let prefix = format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        meta.run_id,
        meta.subcommand,
        meta.construction,
        fmt_opt_u64(meta.m),
        fmt_opt_u64(meta.n),
        fmt_opt_u64(meta.s),
        fmt_opt_u64(meta.m_width),
        fmt_opt_u64(meta.d),
        fmt_opt_u64(meta.t_count),
        fmt_opt_f64(meta.eps),
        fmt_opt_f64(meta.delta),
    );
    if report.curve.is_empty() {
        vec![format!(
            "{prefix},,{},{},{},{},{},{},{}",
            meta.trials,
            report.failures,
            report.rate,
            report.ci_low,
            report.ci_high,
            fmt_opt_f64(report.bound),
            meta.seed
        )]
    } else {
        report
            .curve
            .iter()
            .map(|p| {
                format!(
                    "{prefix},{},{},{},{},{},{},{},{}",
                    p.t, meta.trials, p.failures, p.tail, p.ci_low, p.ci_high, p.bound, meta.seed
                )
            })
            .collect()
    }
}

/// Appends a report to a CSV file, writing the header only when the file is
/// new or empty.
pub fn write_report_csv(path: &Path, report: &ExperimentReport) -> Result<()> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| io_err(&format!("opening {}", path.display()), e))?;
    let needs_header = file
        .metadata()
        .map_err(|e| io_err(&format!("inspecting {}", path.display()), e))?
        .len()
        == 0;
    let mut w = BufWriter::new(file);
    if needs_header {
        writeln!(w, "{REPORT_HEADER}").map_err(|e| io_err("writing report header", e))?;
    }
    for row in report_csv_rows(report) {
        writeln!(w, "{row}").map_err(|e| io_err("writing report row", e))?;
    }
    w.flush().map_err(|e| io_err("flushing report", e))
}

/// One parsed report row (fields absent in the file stay `None`).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub run_id: String,
    pub subcommand: String,
    pub construction: String,
    pub m: Option<u64>,
    pub n: Option<u64>,
    pub s: Option<u64>,
    pub m_width: Option<u64>,
    pub d: Option<u64>,
    pub t_count: Option<u64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub t: Option<f64>,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound: Option<f64>,
    pub seed: u64,
}

fn parse_opt<T: std::str::FromStr>(field: &str, line: usize, what: &str) -> Result<Option<T>> {
    if field.is_empty() {
        return Ok(None);
    }
    field.parse::<T>().map(Some).map_err(|_| Error::Parse {
        line,
        message: format!("bad {what}: {field:?}"),
    })
}

fn parse_req<T: std::str::FromStr>(field: &str, line: usize, what: &str) -> Result<T> {
    field.parse::<T>().map_err(|_| Error::Parse {
        line,
        message: format!("bad {what}: {field:?}"),
    })
}

/// Parses a report CSV written by [`write_report_csv`].
pub fn read_report_csv(path: &Path) -> Result<Vec<ReportRow>> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| io_err(&format!("reading {}", path.display()), e))?;
    let mut rows = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let line_no = i + 1;
        if raw.is_empty() || raw == REPORT_HEADER {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 19 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 19 fields, found {}", fields.len()),
            });
        }
        rows.push(ReportRow {
            run_id: fields[0].to_string(),
            subcommand: fields[1].to_string(),
            construction: fields[2].to_string(),
            m: parse_opt(fields[3], line_no, "m")?,
            n: parse_opt(fields[4], line_no, "n")?,
            s: parse_opt(fields[5], line_no, "s")?,
            m_width: parse_opt(fields[6], line_no, "M")?,
            d: parse_opt(fields[7], line_no, "d")?,
            t_count: parse_opt(fields[8], line_no, "T")?,
            eps: parse_opt(fields[9], line_no, "eps")?,
            delta: parse_opt(fields[10], line_no, "delta")?,
            t: parse_opt(fields[11], line_no, "t")?,
            trials: parse_req(fields[12], line_no, "trials")?,
            failures: parse_req(fields[13], line_no, "failures")?,
            rate: parse_req(fields[14], line_no, "rate")?,
            ci_low: parse_req(fields[15], line_no, "ci_low")?,
            ci_high: parse_req(fields[16], line_no, "ci_high")?,
            bound: parse_opt(fields[17], line_no, "bound")?,
            seed: parse_req(fields[18], line_no, "seed")?,
        });
    }
    Ok(rows)
}

/// Reassembles a report from its CSV rows (the inverse of
/// [`write_report_csv`] for reports this crate produces: the summary of a
/// curve report mirrors its first grid point).
pub fn report_from_rows(rows: &[ReportRow]) -> Result<ExperimentReport> {
    let first = rows.first().ok_or_else(|| Error::Parse {
        line: 0,
        message: "no rows to assemble a report from".into(),
    })?;
    let meta = ReportMeta {
        run_id: first.run_id.clone(),
        subcommand: first.subcommand.clone(),
        construction: first.construction.clone(),
        m: first.m,
        n: first.n,
        s: first.s,
        m_width: first.m_width,
        d: first.d,
        t_count: first.t_count,
        eps: first.eps,
        delta: first.delta,
        trials: first.trials,
        seed: first.seed,
    };
    if rows.len() == 1 && first.t.is_none() {
        return Ok(ExperimentReport {
            meta,
            failures: first.failures,
            rate: first.rate,
            ci_low: first.ci_low,
            ci_high: first.ci_high,
            bound: first.bound,
            curve: Vec::new(),
        });
    }
    let mut curve = Vec::with_capacity(rows.len());
    for row in rows {
        let t = row.t.ok_or_else(|| Error::Parse {
            line: 0,
            message: "curve row is missing its threshold".into(),
        })?;
        curve.push(TailPoint {
            t,
            failures: row.failures,
            tail: row.rate,
            ci_low: row.ci_low,
            ci_high: row.ci_high,
            bound: row.bound.unwrap_or(f64::NAN),
        });
    }
    Ok(ExperimentReport {
        meta,
        failures: curve[0].failures,
        rate: curve[0].tail,
        ci_low: curve[0].ci_low,
        ci_high: curve[0].ci_high,
        bound: Some(curve[0].bound),
        curve,
    })
}

/// Reads vectors from CSV, one comma-separated vector per line.
pub fn read_vectors_csv(path: &Path) -> Result<Vec<Vector>> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| io_err(&format!("reading {}", path.display()), e))?;
    let mut out = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut entries = Vec::new();
        for field in trimmed.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad number {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-finite entry {v}"),
                });
            }
            entries.push(v);
        }
        out.push(Vector::new(entries));
    }
    Ok(out)
}

/// Writes vectors as CSV, one per line, with round-trippable formatting.
pub fn write_vectors_csv(path: &Path, vectors: &[Vector]) -> Result<()> {
    let file =
        File::create(path).map_err(|e| io_err(&format!("creating {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    for v in vectors {
        let line = v
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",");
        writeln!(w, "{line}").map_err(|e| io_err("writing vector row", e))?;
    }
    w.flush().map_err(|e| io_err("flushing vectors", e))
}

fn write_dense_block<W: Write>(w: &mut W, mat: &Matrix, ctx: &str) -> Result<()> {
    for v in mat.as_slice() {
        w.write_all(&v.to_le_bytes()).map_err(|e| io_err(ctx, e))?;
    }
    Ok(())
}

/// Writes a factorizer snapshot (JLF1).
pub fn write_snapshot(path: &Path, state: &FactorizerState) -> Result<()> {
    let ctx = format!("writing snapshot {}", path.display());
    let file = File::create(path).map_err(|e| io_err(&ctx, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&SNAPSHOT_MAGIC).map_err(|e| io_err(&ctx, e))?;
    w.write_all(&(state.dim() as u32).to_le_bytes())
        .map_err(|e| io_err(&ctx, e))?;
    w.write_all(&(state.width() as u32).to_le_bytes())
        .map_err(|e| io_err(&ctx, e))?;
    w.write_all(&state.count().to_le_bytes())
        .map_err(|e| io_err(&ctx, e))?;
    w.write_all(&state.sigma().to_le_bytes())
        .map_err(|e| io_err(&ctx, e))?;
    w.write_all(&state.seed().0.to_le_bytes())
        .map_err(|e| io_err(&ctx, e))?;
    write_dense_block(&mut w, &state.precision, &ctx)?;
    write_dense_block(&mut w, &state.accumulator, &ctx)?;
    write_dense_block(&mut w, &state.sqrt_inv_prior, &ctx)?;
    for x in state.observations() {
        for v in x.iter() {
            w.write_all(&v.to_le_bytes()).map_err(|e| io_err(&ctx, e))?;
        }
    }
    w.flush().map_err(|e| io_err(&ctx, e))
}

/// Loads a JLF1 snapshot, regenerating the random rows from the stored seed
/// so the stream resumes bit-exactly.
pub fn read_snapshot(path: &Path) -> Result<FactorizerState> {
    let file = File::open(path).map_err(|e| io_err(&format!("opening {}", path.display()), e))?;
    let mut reader = CountingReader::new(BufReader::new(file));
    let mut magic = [0u8; 4];
    reader.read_exact_at(&mut magic, "magic")?;
    if magic != SNAPSHOT_MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: format!("bad magic {magic:?}, expected {SNAPSHOT_MAGIC:?}"),
        });
    }
    let d = reader.read_u32("dimension")? as usize;
    let m_width = reader.read_u32("sketch width")? as usize;
    let count = reader.read_u64("observation count")?;
    let sigma = reader.read_f64("sigma")?;
    let seed = Seed(reader.read_u64("seed")?);
    let mut read_block = |rows: usize, cols: usize, what: &str| -> Result<Matrix> {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            data.push(reader.read_f64(what)?);
        }
        Ok(Matrix::new(rows, cols, data))
    };
    let precision = read_block(d, d, "precision entry")?;
    let accumulator = read_block(d, m_width, "accumulator entry")?;
    let sqrt_inv_prior = read_block(d, d, "prior root entry")?;
    let history = read_block(count as usize, d.max(1), "observation entry")?;
    let observations = (0..count as usize)
        .map(|t| Vector::new(history.row(t).to_vec()))
        .collect();
    FactorizerState::from_snapshot_parts(
        d,
        m_width,
        sigma,
        seed,
        count,
        precision,
        accumulator,
        sqrt_inv_prior,
        observations,
    )
}
