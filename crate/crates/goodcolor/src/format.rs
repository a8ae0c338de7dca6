//! On-disk formats: the binary coloring file and the JSON spec files the
//! CLI consumes.
//!
//! Coloring file layout, little-endian:
//!
//! ```text
//! magic   5 bytes  "GCOL1"
//! n       u32      vertex count
//! labels  u8       label count (<= 16)
//!         then per label: u8 length + that many ASCII bytes
//! payload C(n,2) 4-bit label indices, edges (u, v) with u < v in
//!         lexicographic (u, v) order, two per byte low nibble first,
//!         zero-padded to a byte boundary
//! ```

use crate::construct::{ConstructError, EdgeColoring};
use crate::mandate::{MandateError, MandatorySet};
use crate::splitgraph::{build_cyclic_splitting, SplittingError, SplittingGraph};
use serde::Deserialize;
use std::io::{self, Read, Write};
use thiserror::Error;

pub const COLORING_MAGIC: [u8; 5] = *b"GCOL1";

/// Labels a coloring file can carry; indices are nibbles.
pub const MAX_FILE_LABELS: usize = 16;

#[derive(Error, Debug)]
pub enum EncodeError {
    #[error("{0} labels exceed the 4-bit limit of {MAX_FILE_LABELS}")]
    TooManyLabels(usize),
    #[error("label {0:?} is not ASCII or longer than 255 bytes")]
    BadLabelName(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Error, Debug)]
pub enum DecodeError {
    #[error("bad magic: expected {COLORING_MAGIC:?}, got {0:?}")]
    BadMagic([u8; 5]),
    #[error("truncated header")]
    TruncatedHeader,
    #[error("label count {0} exceeds {MAX_FILE_LABELS}")]
    TooManyLabels(u8),
    #[error("coloring needs at least one label")]
    NoLabels,
    #[error("label name is not ASCII")]
    NonAsciiLabel,
    #[error("truncated payload: expected {expected} bytes, got {got}")]
    TruncatedPayload { expected: u64, got: u64 },
    #[error("invalid label index {value} at edge {edge} (label count {label_count})")]
    InvalidLabelIndex {
        edge: u64,
        value: u8,
        label_count: u8,
    },
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Writes a coloring in the binary format. Lossless for everything but
/// vertex metadata: decode yields the same vertex order, labels, and edge
/// colors.
pub fn encode_coloring<W: Write>(c: &EdgeColoring, mut sink: W) -> Result<(), EncodeError> {
    let labels = c.labels();
    if labels.len() > MAX_FILE_LABELS {
        return Err(EncodeError::TooManyLabels(labels.len()));
    }
    sink.write_all(&COLORING_MAGIC)?;
    let n = c.vertex_count();
    sink.write_all(&(n as u32).to_le_bytes())?;
    sink.write_all(&[labels.len() as u8])?;
    for name in labels {
        if !name.is_ascii() || name.len() > 255 {
            return Err(EncodeError::BadLabelName(name.clone()));
        }
        sink.write_all(&[name.len() as u8])?;
        sink.write_all(name.as_bytes())?;
    }
    let mut pending: u8 = 0;
    let mut half = false;
    for u in 0..n {
        for v in (u + 1)..n {
            let id = c.color(u, v).0;
            debug_assert!(id < 16);
            if half {
                sink.write_all(&[pending | (id << 4)])?;
                half = false;
            } else {
                pending = id;
                half = true;
            }
        }
    }
    if half {
        sink.write_all(&[pending])?; // zero-padded high nibble
    }
    Ok(())
}

/// Reads a coloring in the binary format. The result stores colors
/// explicitly and carries no vertex metadata.
pub fn decode_coloring<R: Read>(mut source: R) -> Result<EdgeColoring, DecodeError> {
    let mut magic = [0u8; 5];
    read_exact_or(&mut source, &mut magic, DecodeError::TruncatedHeader)?;
    if magic != COLORING_MAGIC {
        return Err(DecodeError::BadMagic(magic));
    }
    let mut nbuf = [0u8; 4];
    read_exact_or(&mut source, &mut nbuf, DecodeError::TruncatedHeader)?;
    let n = u32::from_le_bytes(nbuf) as usize;
    let mut count = [0u8; 1];
    read_exact_or(&mut source, &mut count, DecodeError::TruncatedHeader)?;
    let label_count = count[0];
    if label_count == 0 {
        return Err(DecodeError::NoLabels);
    }
    if label_count as usize > MAX_FILE_LABELS {
        return Err(DecodeError::TooManyLabels(label_count));
    }
    let mut labels = Vec::with_capacity(label_count as usize);
    for _ in 0..label_count {
        let mut len = [0u8; 1];
        read_exact_or(&mut source, &mut len, DecodeError::TruncatedHeader)?;
        let mut name = vec![0u8; len[0] as usize];
        read_exact_or(&mut source, &mut name, DecodeError::TruncatedHeader)?;
        if !name.is_ascii() {
            return Err(DecodeError::NonAsciiLabel);
        }
        labels.push(String::from_utf8(name).expect("ascii is utf-8"));
    }

    let edges = n as u64 * (n as u64 - 1) / 2;
    let expected = edges.div_ceil(2);
    let mut payload = Vec::new();
    source.read_to_end(&mut payload)?;
    if (payload.len() as u64) < expected {
        return Err(DecodeError::TruncatedPayload {
            expected,
            got: payload.len() as u64,
        });
    }
    let mut colors = Vec::with_capacity(edges as usize);
    for e in 0..edges {
        let byte = payload[(e / 2) as usize];
        let value = if e % 2 == 0 { byte & 0x0f } else { byte >> 4 };
        if value >= label_count {
            return Err(DecodeError::InvalidLabelIndex {
                edge: e,
                value,
                label_count,
            });
        }
        colors.push(value);
    }
    Ok(EdgeColoring::from_explicit(labels, n, colors)?)
}

fn read_exact_or<R: Read>(
    source: &mut R,
    buf: &mut [u8],
    on_eof: DecodeError,
) -> Result<(), DecodeError> {
    source.read_exact(buf).map_err(|e| {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            on_eof
        } else {
            DecodeError::Io(e)
        }
    })
}

// ============================================================================
// JSON spec files
// ============================================================================

/// Splitting-graph spec: either a cyclic descriptor or an explicit edge
/// list. `delete` may be omitted.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SplittingSpec {
    Cyclic {
        modulus: u32,
        class0: Vec<u32>,
        #[serde(default)]
        delete: Vec<u32>,
    },
    Explicit {
        points: u32,
        b0_edges: Vec<(u32, u32)>,
    },
}

impl SplittingSpec {
    pub fn build(&self) -> Result<SplittingGraph, SplittingError> {
        match self {
            SplittingSpec::Cyclic {
                modulus,
                class0,
                delete,
            } => build_cyclic_splitting(*modulus, class0, delete),
            SplittingSpec::Explicit { points, b0_edges } => {
                SplittingGraph::from_b0_edges(*points, b0_edges)
            }
        }
    }
}

pub fn parse_splitting_spec(text: &str) -> Result<SplittingSpec, serde_json::Error> {
    serde_json::from_str(text)
}

/// Mandatory-set spec: a builtin family or an explicit triple list.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MandateSpec {
    Builtin {
        builtin: String,
        #[serde(default)]
        n: Option<u32>,
        #[serde(default)]
        l: Option<u32>,
    },
    Explicit {
        labels: Vec<String>,
        triples: Vec<[String; 3]>,
    },
}

#[derive(Error, Debug)]
pub enum MandateSpecError {
    #[error("unknown builtin {0:?} (expected \"mn\" or \"lyndon\")")]
    UnknownBuiltin(String),
    #[error("builtin \"mn\" needs field \"n\"")]
    MissingN,
    #[error("builtin \"lyndon\" needs field \"l\"")]
    MissingL,
    #[error(transparent)]
    Mandate(#[from] MandateError),
}

impl MandateSpec {
    pub fn build(&self) -> Result<MandatorySet, MandateSpecError> {
        match self {
            MandateSpec::Builtin { builtin, n, l } => match builtin.as_str() {
                "mn" => Ok(MandatorySet::mn(n.ok_or(MandateSpecError::MissingN)?)?),
                "lyndon" => Ok(MandatorySet::lyndon(l.ok_or(MandateSpecError::MissingL)?)?),
                other => Err(MandateSpecError::UnknownBuiltin(other.to_string())),
            },
            MandateSpec::Explicit { labels, triples } => {
                Ok(MandatorySet::from_named_triples(labels.clone(), triples)?)
            }
        }
    }
}

pub fn parse_mandate_spec(text: &str) -> Result<MandateSpec, serde_json::Error> {
    serde_json::from_str(text)
}
