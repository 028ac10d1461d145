//! sparse6 encoding and the on-disk graph archive.
//!
//! The encoder always produces the shortest form: edges ordered by their
//! larger endpoint, then by the smaller one, padded with 1-bits (or a single
//! 0-bit followed by 1-bits when plain padding would decode as an extra
//! edge). The decoder accepts an optional `>>sparse6<<` header and ignores
//! ASCII whitespace anywhere in the input.

mod archive;

pub use archive::{
    archive_read, archive_read_size, archive_records, archive_write, archive_write_size,
    GraphRecord, Manifest, Provenance, SizeManifest,
};

use thiserror::Error;

use crate::graph::{Graph, MAX_NODES};

pub const SPARSE6_HEADER: &[u8] = b">>sparse6<<";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("missing ':' prefix")]
    MissingColon,
    #[error("input ends inside the size field")]
    TruncatedSize,
    #[error("byte {byte:#04x} at offset {offset} is not a sparse6 character")]
    InvalidByte { offset: usize, byte: u8 },
    #[error("graph size {0} is not supported")]
    UnsupportedSize(u64),
    #[error("node {node} out of range for a {n}-node graph")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0}")]
    Loop(usize),
    #[error("edge ({0},{1}) listed twice")]
    DuplicateEdge(usize, usize),
}

/// Number of bits used for each vertex index in the body.
fn index_bits(n: usize) -> usize {
    let mut k = 1;
    while (1usize << k) < n {
        k += 1;
    }
    k
}

fn push_size(out: &mut Vec<u8>, n: usize) {
    if n <= 62 {
        out.push(n as u8 + 63);
    } else {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 0x3f) as u8 + 63);
        }
    }
}

struct BitWriter {
    bits: Vec<bool>,
}

impl BitWriter {
    fn push(&mut self, value: usize, width: usize) {
        for i in (0..width).rev() {
            self.bits.push((value >> i) & 1 == 1);
        }
    }
}

/// Encodes `g` as `:`-prefixed sparse6 without header or newline.
pub fn encode_sparse6(g: &Graph) -> Vec<u8> {
    let n = g.n();
    let k = index_bits(n);
    let mut out = vec![b':'];
    push_size(&mut out, n);

    let mut edges: Vec<(usize, usize)> = g.edges().map(|(u, v)| (v, u)).collect();
    edges.sort_unstable();

    let mut w = BitWriter { bits: Vec::new() };
    let mut current = 0;
    for (v, u) in edges {
        if v == current {
            w.push(0, 1);
            w.push(u, k);
        } else if v == current + 1 {
            current = v;
            w.push(1, 1);
            w.push(u, k);
        } else {
            current = v;
            w.push(1, 1);
            w.push(v, k);
            w.push(0, 1);
            w.push(u, k);
        }
    }
    let pad = (6 - w.bits.len() % 6) % 6;
    if k < 6 && n == (1 << k) && pad >= k && current + 1 < n {
        w.bits.push(false);
        let pad = (6 - w.bits.len() % 6) % 6;
        w.bits.extend(std::iter::repeat_n(true, pad));
    } else {
        w.bits.extend(std::iter::repeat_n(true, pad));
    }

    for chunk in w.bits.chunks(6) {
        let byte = chunk.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8);
        out.push(byte + 63);
    }
    out
}

pub fn encode_sparse6_string(g: &Graph) -> String {
    String::from_utf8(encode_sparse6(g)).expect("sparse6 is ASCII")
}

/// Decodes one sparse6 graph.
pub fn decode_sparse6(input: &[u8]) -> Result<Graph, DecodeError> {
    let cleaned: Vec<u8> = input
        .iter()
        .copied()
        .filter(|b| !b.is_ascii_whitespace())
        .collect();
    let mut body: &[u8] = &cleaned;
    if body.starts_with(SPARSE6_HEADER) {
        body = &body[SPARSE6_HEADER.len()..];
    }
    let Some(rest) = body.strip_prefix(b":") else {
        return Err(DecodeError::MissingColon);
    };

    let mut data = Vec::with_capacity(rest.len());
    for (offset, &byte) in rest.iter().enumerate() {
        if !(63..=126).contains(&byte) {
            return Err(DecodeError::InvalidByte { offset, byte });
        }
        data.push(byte - 63);
    }

    let (n, data) = read_size(&data)?;
    if n == 0 || n > MAX_NODES as u64 {
        return Err(DecodeError::UnsupportedSize(n));
    }
    let n = n as usize;
    let k = index_bits(n);
    let mut g = Graph::new(n).expect("size checked above");

    let total_bits = data.len() * 6;
    let bit_at = |i: usize| (data[i / 6] >> (5 - i % 6)) & 1 == 1;
    let mut pos = 0;
    let mut v = 0usize;
    while pos + 1 + k <= total_bits {
        let start = pos;
        let b = bit_at(pos);
        pos += 1;
        let mut x = 0usize;
        for _ in 0..k {
            x = (x << 1) | bit_at(pos) as usize;
            pos += 1;
        }
        if b {
            v += 1;
        }
        if x >= n || v >= n {
            // Only trailing padding may run past the last node.
            if total_bits - start <= 6 {
                break;
            }
            return Err(DecodeError::NodeOutOfRange { node: x.max(v), n });
        }
        if x > v {
            v = x;
        } else if x == v {
            return Err(DecodeError::Loop(v));
        } else if g.has_edge(x, v) {
            return Err(DecodeError::DuplicateEdge(x, v));
        } else {
            g.flip_unchecked(x, v);
        }
    }
    Ok(g)
}

/// Serde adapter storing a [`Graph`] as a sparse6 string.
pub mod serde_sparse6 {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::graph::Graph;

    pub fn serialize<S: Serializer>(g: &Graph, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::encode_sparse6_string(g))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Graph, D::Error> {
        let text = String::deserialize(d)?;
        super::decode_sparse6(text.as_bytes()).map_err(D::Error::custom)
    }
}

fn read_size(data: &[u8]) -> Result<(u64, &[u8]), DecodeError> {
    let first = *data.first().ok_or(DecodeError::TruncatedSize)?;
    if first < 63 {
        return Ok((first as u64, &data[1..]));
    }
    let (width, skip) = if data.get(1) == Some(&63) {
        (6, 2)
    } else {
        (3, 1)
    };
    let digits = data
        .get(skip..skip + width)
        .ok_or(DecodeError::TruncatedSize)?;
    let n = digits.iter().fold(0u64, |acc, &d| (acc << 6) | d as u64);
    Ok((n, &data[skip + width..]))
}

/// A 64-node graph with 230 edges and no 3- or 4-cycles, as sparse6 with
/// header and trailing newline.
pub const GIRTH5_N64_SPARSE6: &[u8] = include_bytes!("../../tests/fixtures/appendix_64.s6");

pub fn girth5_n64() -> Graph {
    decode_sparse6(GIRTH5_N64_SPARSE6).expect("embedded graph decodes")
}
