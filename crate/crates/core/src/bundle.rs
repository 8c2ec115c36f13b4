//! Tagged single-file JSON model bundles.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{PandaError, Result};
use crate::regressor::decode_tagged;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    #[serde(flatten)]
    body: T,
}

pub(crate) fn envelope_json<T: Serialize + Clone>(tag: &str, body: &T) -> String {
    serde_json::to_string(&Envelope {
        format: tag.into(),
        body: body.clone(),
    })
    .expect("model serializes")
}

pub(crate) fn from_envelope<T: serde::de::DeserializeOwned>(bytes: &[u8], tag: &str) -> Result<T> {
    Ok(decode_tagged::<Envelope<T>>(bytes, tag)?.body)
}

pub(crate) fn save_str(path: &Path, s: String) -> Result<()> {
    fs::write(path, s).map_err(|e| PandaError::io(path, e))
}

macro_rules! tagged_io {
    ($ty:ty, $tag:expr) => {
        impl $ty {
            pub fn to_json(&self) -> String {
                $crate::bundle::envelope_json($tag, self)
            }
            pub fn from_json(bytes: &[u8]) -> $crate::Result<Self> {
                $crate::bundle::from_envelope(bytes, $tag)
            }
            pub fn save(&self, path: impl AsRef<std::path::Path>) -> $crate::Result<()> {
                $crate::bundle::save_str(path.as_ref(), self.to_json())
            }
            pub fn load(path: impl AsRef<std::path::Path>) -> $crate::Result<Self> {
                let path = path.as_ref();
                Self::from_json(&std::fs::read(path).map_err(|e| $crate::PandaError::io(path, e))?)
            }
        }
    };
}

pub(crate) use tagged_io;
