//! Model checkpoint file: a self-describing header plus the flat parameter
//! vector.
//!
//! Byte layout (little-endian throughout):
//!
//! | offset | size | content                                   |
//! |--------|------|-------------------------------------------|
//! | 0      | 4    | magic `SVCK`                              |
//! | 4      | 4    | format version, u32 (currently 1)         |
//! | 8      | 8    | config hash, u64 (FNV-1a of the run config text) |
//! | 16     | 4    | header length `H`, u32                    |
//! | 20     | H    | header JSON                               |
//! | 20+H   | 8n   | `n` parameter values, f64                 |
//!
//! The header JSON holds `{"problem": <id>, "layout": <ParamLayout>}`;
//! the layout's `total` field fixes `n`.

use crate::baseline::MlpModel;
use crate::model::{FlatParams, ModelSpec, ParamLayout, SvSnnModel};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"SVCK";
const VERSION: u32 = 1;

#[derive(Debug)]
pub enum CheckpointError {
    Io(std::io::Error),
    Format(String),
}

impl fmt::Display for CheckpointError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckpointError::Io(e) => write!(f, "checkpoint io: {e}"),
            CheckpointError::Format(m) => write!(f, "checkpoint format: {m}"),
        }
    }
}

impl std::error::Error for CheckpointError {}

impl From<std::io::Error> for CheckpointError {
    fn from(e: std::io::Error) -> Self {
        CheckpointError::Io(e)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    problem: String,
    layout: ParamLayout,
}

/// Either trained model kind, reconstructed from a checkpoint.
pub enum AnyModel {
    SvSnn(SvSnnModel<f64>),
    Mlp(MlpModel<f64>),
}

impl AnyModel {
    pub fn from_flat(
        problem_dim: usize,
        time_dependent: bool,
        spec: &ModelSpec,
        data: Vec<f64>,
    ) -> Result<Self, CheckpointError> {
        match spec {
            ModelSpec::SvSnn { .. } => SvSnnModel::from_flat(spec, &data)
                .map(AnyModel::SvSnn)
                .map_err(|e| CheckpointError::Format(e.to_string())),
            ModelSpec::Mlp { widths } => {
                if widths[0] != problem_dim + usize::from(time_dependent) {
                    return Err(CheckpointError::Format(format!(
                        "baseline input width {} does not match problem (dim {} + time {})",
                        widths[0], problem_dim, time_dependent as usize
                    )));
                }
                Ok(AnyModel::Mlp(MlpModel::from_params(
                    widths.clone(),
                    problem_dim,
                    time_dependent,
                    data,
                )))
            }
        }
    }
}

/// FNV-1a over arbitrary bytes; used to hash the run configuration text.
pub fn config_hash(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

pub fn save_checkpoint(
    path: &Path,
    problem_id: &str,
    hash: u64,
    params: &FlatParams<f64>,
) -> Result<(), CheckpointError> {
    let header = Header {
        problem: problem_id.to_string(),
        layout: params.layout.clone(),
    };
    let header_json = serde_json::to_vec(&header)
        .map_err(|e| CheckpointError::Format(e.to_string()))?;
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(MAGIC)?;
    file.write_all(&VERSION.to_le_bytes())?;
    file.write_all(&hash.to_le_bytes())?;
    file.write_all(&(header_json.len() as u32).to_le_bytes())?;
    file.write_all(&header_json)?;
    for v in &params.data {
        file.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub struct LoadedCheckpoint {
    pub problem_id: String,
    pub hash: u64,
    pub params: FlatParams<f64>,
}

pub fn load_checkpoint(path: &Path) -> Result<LoadedCheckpoint, CheckpointError> {
    let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    file.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CheckpointError::Format("bad magic; not a checkpoint".into()));
    }
    let mut u32buf = [0u8; 4];
    file.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(CheckpointError::Format(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let mut u64buf = [0u8; 8];
    file.read_exact(&mut u64buf)?;
    let hash = u64::from_le_bytes(u64buf);
    file.read_exact(&mut u32buf)?;
    let header_len = u32::from_le_bytes(u32buf) as usize;
    let mut header_bytes = vec![0u8; header_len];
    file.read_exact(&mut header_bytes)?;
    let header: Header = serde_json::from_slice(&header_bytes)
        .map_err(|e| CheckpointError::Format(format!("bad header: {e}")))?;
    let mut data = Vec::with_capacity(header.layout.total);
    let mut f64buf = [0u8; 8];
    for _ in 0..header.layout.total {
        file.read_exact(&mut f64buf)?;
        data.push(f64::from_le_bytes(f64buf));
    }
    Ok(LoadedCheckpoint {
        problem_id: header.problem,
        hash,
        params: FlatParams {
            data,
            layout: header.layout,
        },
    })
}
