use serde::{Deserialize, Serialize};

/// Model architecture summary, enough to rebuild the parameter layout.
/// Serialized into checkpoint headers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ModelSpec {
    /// Separable spectral model.
    #[serde(rename = "svsnn")]
    SvSnn {
        modes: usize,
        /// Fourier feature count per direction.
        features: Vec<usize>,
        temporal: bool,
        field_count: usize,
    },
    /// Fully-connected tanh baseline.
    #[serde(rename = "baseline")]
    Mlp { widths: Vec<usize> },
}

/// One contiguous span of the flat parameter vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub name: String,
    pub offset: usize,
    pub len: usize,
}

/// Maps flat-vector spans back to model components. Layout is stable for a
/// given [`ModelSpec`]; flatten followed by assign is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamLayout {
    pub spec: ModelSpec,
    pub total: usize,
    pub segments: Vec<Segment>,
}

/// Contiguous parameter vector plus its layout descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatParams<S> {
    pub data: Vec<S>,
    pub layout: ParamLayout,
}

impl ParamLayout {
    pub fn segment(&self, name: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.name == name)
    }
}
