//! Minimal RIFF/WAVE reader and writer for mono IEEE-float 32-bit audio.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

const WAVE_FORMAT_IEEE_FLOAT: u16 = 3;
const WAVE_FORMAT_EXTENSIBLE: u16 = 0xFFFE;

pub(crate) struct WavData {
    pub sample_rate: u32,
    pub samples: Vec<f32>,
}

fn u16_at(b: &[u8], i: usize) -> u16 {
    u16::from_le_bytes([b[i], b[i + 1]])
}

fn u32_at(b: &[u8], i: usize) -> u32 {
    u32::from_le_bytes([b[i], b[i + 1], b[i + 2], b[i + 3]])
}

pub(crate) fn read(path: &Path) -> Result<WavData> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let bad = |detail: &str| Error::malformed("wav header", path, detail.to_owned());
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(bad("missing RIFF/WAVE signature"));
    }
    let mut pos = 12;
    let mut fmt: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(&bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| bad("chunk extends past end of file"))?;
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(bad("fmt chunk too short"));
                }
                let mut tag = u16_at(body, 0);
                if tag == WAVE_FORMAT_EXTENSIBLE && body.len() >= 26 {
                    // first two bytes of the subformat GUID carry the format code
                    tag = u16_at(body, 24);
                }
                fmt = Some((tag, u16_at(body, 2), u32_at(body, 4), u16_at(body, 14)));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // chunks are padded to even length
        pos = body_end + (size & 1);
    }
    let (tag, channels, sample_rate, bits) = fmt.ok_or_else(|| bad("no fmt chunk"))?;
    if channels != 1 {
        return Err(bad(&format!("expected mono, got {channels} channels")));
    }
    if tag != WAVE_FORMAT_IEEE_FLOAT || bits != 32 {
        return Err(bad("expected 32-bit float samples"));
    }
    let data = data.ok_or_else(|| bad("no data chunk"))?;
    if data.len() % 4 != 0 {
        return Err(Error::malformed(
            "wav payload",
            path,
            format!("data length {} is not a multiple of 4", data.len()),
        ));
    }
    let samples = data
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok(WavData {
        sample_rate,
        samples,
    })
}

pub(crate) fn write(path: &Path, samples: &[f32], sample_rate: u32) -> Result<()> {
    let data_len = u32::try_from(samples.len() * 4)
        .map_err(|_| Error::InvalidParameter("signal too long for WAV".into()))?;
    let mut header = Vec::with_capacity(44);
    header.extend_from_slice(b"RIFF");
    header.extend_from_slice(&(36 + data_len).to_le_bytes());
    header.extend_from_slice(b"WAVEfmt ");
    header.extend_from_slice(&16u32.to_le_bytes());
    header.extend_from_slice(&WAVE_FORMAT_IEEE_FLOAT.to_le_bytes());
    header.extend_from_slice(&1u16.to_le_bytes());
    header.extend_from_slice(&sample_rate.to_le_bytes());
    header.extend_from_slice(&(sample_rate * 4).to_le_bytes());
    header.extend_from_slice(&4u16.to_le_bytes());
    header.extend_from_slice(&32u16.to_le_bytes());
    header.extend_from_slice(b"data");
    header.extend_from_slice(&data_len.to_le_bytes());
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    w.write_all(&header).map_err(io)?;
    for s in samples {
        w.write_all(&s.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}
