//! Binary checkpoints: `CRWV`, u32 version, u32 N, f64 t, then Z̄ₜ, 1/Z,α′ and Z − α′ as N
//! little-endian `(re, im)` pairs each.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::energy::interface_z;
use crate::error::{Error, Result};
use crate::spectral::{grid, Field, C64};
use crate::state::WaterWaveState;

pub const MAGIC: &[u8; 4] = b"CRWV";
pub const VERSION: u32 = 1;

pub fn write_state(w: &mut impl Write, s: &WaterWaveState) -> std::io::Result<()> {
    let z = s.z.clone().unwrap_or_else(|| interface_z(s));
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    w.write_u32::<LittleEndian>(s.n() as u32)?;
    w.write_f64::<LittleEndian>(s.t)?;
    for f in [&s.zt_bar, &s.inv_za, &z] {
        for v in f.values() {
            w.write_f64::<LittleEndian>(v.re)?;
            w.write_f64::<LittleEndian>(v.im)?;
        }
    }
    Ok(())
}

fn bad(path: &Path, msg: impl Into<String>) -> Error {
    Error::Checkpoint { path: path.to_path_buf(), msg: msg.into() }
}

pub fn read_state(r: &mut impl Read, path: &Path) -> Result<WaterWaveState> {
    let io = |e: std::io::Error| bad(path, e.to_string());
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(bad(path, "bad magic"));
    }
    let version = r.read_u32::<LittleEndian>().map_err(io)?;
    if version != VERSION {
        return Err(bad(path, format!("unsupported version {version}")));
    }
    let n = r.read_u32::<LittleEndian>().map_err(io)? as usize;
    let g = grid(n).map_err(|e| bad(path, e.to_string()))?;
    let t = r.read_f64::<LittleEndian>().map_err(io)?;
    let mut field = || -> Result<Field> {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            let re = r.read_f64::<LittleEndian>().map_err(io)?;
            let im = r.read_f64::<LittleEndian>().map_err(io)?;
            v.push(C64::new(re, im));
        }
        Field::from_values(g.clone(), v)
    };
    let zt_bar = field()?;
    let inv_za = field()?;
    let z = field()?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(io)? != 0 {
        return Err(bad(path, "trailing bytes"));
    }
    Ok(WaterWaveState { zt_bar, inv_za, z: Some(z), t })
}

pub fn save(path: &Path, s: &WaterWaveState) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    write_state(&mut w, s).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<WaterWaveState> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_state(&mut BufReader::new(f), path)
}
