//! Content hashes of serialisable records.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Lowercase hex SHA-256 of the compact JSON encoding of `value`.
pub fn content_hash<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
