//! Network checkpoints.
//!
//! Byte layout (all integers little-endian):
//!
//! ```text
//! offset 0    8 bytes   magic "LUDORNET"
//! offset 8    4 bytes   u32 header length H
//! offset 12   H bytes   JSON header: {"format_version", "arch", "seed",
//!                       "step", "param_count"}
//! offset 12+H 8·P bytes P little-endian f64 parameters in flat order
//!                       (per layer: weights row-major [out × in], then bias)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LudorError, Result};
use crate::nn::mlp::{Arch, Mlp};

const MAGIC: &[u8; 8] = b"LUDORNET";
pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub format_version: u32,
    pub arch: Arch,
    pub seed: u64,
    pub step: u64,
    pub param_count: usize,
}

pub fn save_checkpoint(path: &Path, mlp: &Mlp, seed: u64, step: u64) -> Result<()> {
    let meta = CheckpointMeta {
        format_version: CHECKPOINT_FORMAT_VERSION,
        arch: mlp.arch().clone(),
        seed,
        step,
        param_count: mlp.param_count(),
    };
    let header = serde_json::to_vec(&meta)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(header.len() as u32).to_le_bytes())?;
    w.write_all(&header)?;
    for v in mlp.flatten() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(Mlp, CheckpointMeta)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(LudorError::Data(format!("{}: not a checkpoint file", path.display())));
    }
    let mut len4 = [0u8; 4];
    r.read_exact(&mut len4)?;
    let hlen = u32::from_le_bytes(len4) as usize;
    let mut header = vec![0u8; hlen];
    r.read_exact(&mut header)?;
    let meta: CheckpointMeta = serde_json::from_slice(&header)?;
    if meta.format_version != CHECKPOINT_FORMAT_VERSION {
        return Err(LudorError::Data(format!(
            "{}: unsupported checkpoint format version {}",
            path.display(),
            meta.format_version
        )));
    }
    if meta.param_count != meta.arch.param_count() {
        return Err(LudorError::Data(format!(
            "{}: header param_count {} does not match architecture ({})",
            path.display(),
            meta.param_count,
            meta.arch.param_count()
        )));
    }
    let mut flat = vec![0.0f64; meta.param_count];
    let mut buf = [0u8; 8];
    for v in flat.iter_mut() {
        r.read_exact(&mut buf)?;
        *v = f64::from_le_bytes(buf);
    }
    // Exactly at end-of-file.
    if r.read(&mut buf)? != 0 {
        return Err(LudorError::Data(format!("{}: trailing bytes after parameter block", path.display())));
    }
    let mlp = Mlp::from_flat(meta.arch.clone(), &flat)?;
    Ok((mlp, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::rng::Rng;

    #[test]
    fn round_trip_preserves_bits_and_meta() {
        let dir = std::env::temp_dir().join(format!("ludor-ckpt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("net.bin");

        let mut rng = Rng::seeded(17);
        let mlp = Mlp::init(Arch::mlp(4, &[8, 8], 2, Some(1.0)), &mut rng).unwrap();
        save_checkpoint(&path, &mlp, 17, 1234).unwrap();
        let (loaded, meta) = load_checkpoint(&path).unwrap();

        let a = mlp.flatten();
        let b = loaded.flatten();
        assert_eq!(a.len(), b.len());
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_eq!(meta.seed, 17);
        assert_eq!(meta.step, 1234);
        assert_eq!(&meta.arch, mlp.arch());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn rejects_non_checkpoint_file() {
        let dir = std::env::temp_dir().join(format!("ludor-ckpt-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("junk.bin");
        std::fs::write(&path, b"definitely not a checkpoint").unwrap();
        assert!(matches!(load_checkpoint(&path), Err(LudorError::Data(_))));
        std::fs::remove_dir_all(&dir).ok();
    }
}
