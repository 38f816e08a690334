//! RIFF/WAVE reading and writing for integer PCM.
//!
//! Only what the measurement chain needs: 16- and 24-bit linear PCM,
//! any channel count, sample-accurate and byte-exact round trips.
//! Unknown ancillary chunks are skipped on read; parse errors carry
//! the byte offset where the file stopped making sense.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::buffer::SampleBuffer;
use crate::error::{Error, Result};

/// A decoded WAVE file: channel-separated integer samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavFile {
    /// Sampling rate, Hz.
    pub sample_rate: u32,
    /// Bits per sample, 16 or 24.
    pub bit_depth: u16,
    /// One sample vector per channel, all the same length.
    pub channels: Vec<Vec<i32>>,
}

impl WavFile {
    /// Builds a file image from channel data.
    pub fn new(sample_rate: u32, bit_depth: u16, channels: Vec<Vec<i32>>) -> Result<Self> {
        if bit_depth != 16 && bit_depth != 24 {
            return Err(Error::Config(format!("bit depth must be 16 or 24, got {bit_depth}")));
        }
        if channels.is_empty() || channels[0].is_empty() {
            return Err(Error::Config("a WAVE file needs at least one sample".into()));
        }
        if channels.iter().any(|c| c.len() != channels[0].len()) {
            return Err(Error::Config("channels must hold the same number of frames".into()));
        }
        let limit = 1i32 << (bit_depth - 1);
        for (ch, data) in channels.iter().enumerate() {
            if let Some(v) = data.iter().find(|v| **v < -limit || **v >= limit) {
                return Err(Error::Config(format!(
                    "channel {ch} sample {v} does not fit {bit_depth} bits"
                )));
            }
        }
        Ok(WavFile { sample_rate, bit_depth, channels })
    }

    /// Number of frames (samples per channel).
    pub fn frames(&self) -> usize {
        self.channels[0].len()
    }

    /// Converts one channel into an analysis buffer.
    pub fn channel_buffer(&self, channel: usize, start_time: f64) -> Result<SampleBuffer> {
        let data = self.channels.get(channel).ok_or_else(|| {
            Error::Config(format!(
                "channel {channel} requested, file has {}",
                self.channels.len()
            ))
        })?;
        SampleBuffer::new(data.clone(), self.sample_rate as f64, self.bit_depth as u32, start_time)
    }

    /// Averages the first two channels into a pseudo single-channel
    /// buffer, which halves uncorrelated channel noise power; the
    /// mean is rounded to the nearest code.
    pub fn pseudo_mono_buffer(&self, start_time: f64) -> Result<SampleBuffer> {
        if self.channels.len() < 2 {
            return Err(Error::Config(format!(
                "pseudo-mono needs two channels, file has {}",
                self.channels.len()
            )));
        }
        let merged: Vec<i32> = self.channels[0]
            .iter()
            .zip(&self.channels[1])
            .map(|(&l, &r)| ((l as f64 + r as f64) / 2.0).round() as i32)
            .collect();
        SampleBuffer::new(merged, self.sample_rate as f64, self.bit_depth as u32, start_time)
    }
}

fn bad(offset: u64, message: impl Into<String>) -> Error {
    Error::WavFormat { offset, message: message.into() }
}

/// Reads a PCM WAVE file.
pub fn read_wav(path: impl AsRef<Path>) -> Result<WavFile> {
    let mut reader = BufReader::new(File::open(path.as_ref())?);
    let mut pos: u64 = 0;

    let mut header = [0u8; 12];
    read_exact_at(&mut reader, &mut header, &mut pos)?;
    if &header[0..4] != b"RIFF" {
        return Err(bad(0, "missing RIFF tag"));
    }
    if &header[8..12] != b"WAVE" {
        return Err(bad(8, "missing WAVE tag"));
    }

    let mut format: Option<(u16, u32, u16, u16)> = None;
    loop {
        let mut chunk_header = [0u8; 8];
        let header_offset = pos;
        if !try_read_exact(&mut reader, &mut chunk_header, &mut pos)? {
            return Err(bad(header_offset, "file ended before a data chunk"));
        }
        let id = [chunk_header[0], chunk_header[1], chunk_header[2], chunk_header[3]];
        let size = u32::from_le_bytes(chunk_header[4..8].try_into().unwrap()) as u64;
        match &id {
            b"fmt " => {
                if size < 16 {
                    return Err(bad(header_offset, format!("fmt chunk of {size} bytes")));
                }
                let mut fmt = vec![0u8; size as usize];
                read_exact_at(&mut reader, &mut fmt, &mut pos)?;
                let tag = u16::from_le_bytes(fmt[0..2].try_into().unwrap());
                let channels = u16::from_le_bytes(fmt[2..4].try_into().unwrap());
                let rate = u32::from_le_bytes(fmt[4..8].try_into().unwrap());
                let bits = u16::from_le_bytes(fmt[14..16].try_into().unwrap());
                if tag != 1 {
                    return Err(bad(
                        header_offset + 8,
                        format!("format tag {tag} is not integer PCM"),
                    ));
                }
                if bits != 16 && bits != 24 {
                    return Err(bad(
                        header_offset + 22,
                        format!("{bits} bits per sample (only 16 and 24 are supported)"),
                    ));
                }
                if channels == 0 {
                    return Err(bad(header_offset + 10, "zero channels"));
                }
                format = Some((tag, rate, channels, bits));
                skip_pad(&mut reader, size, &mut pos)?;
            }
            b"data" => {
                let (_, rate, channels, bits) = format.ok_or_else(|| {
                    bad(header_offset, "data chunk appeared before the fmt chunk")
                })?;
                let bytes_per_sample = (bits / 8) as u64;
                let frame_bytes = bytes_per_sample * channels as u64;
                if size % frame_bytes != 0 {
                    return Err(bad(
                        header_offset + 4,
                        format!("data size {size} is not a whole number of {frame_bytes}-byte frames"),
                    ));
                }
                let mut payload = vec![0u8; size as usize];
                let payload_offset = pos;
                let got = read_up_to(&mut reader, &mut payload, &mut pos)?;
                if got < payload.len() {
                    return Err(bad(
                        payload_offset + got as u64,
                        format!("data chunk truncated: expected {size} bytes, found {got}"),
                    ));
                }
                let frames = (size / frame_bytes) as usize;
                let mut out =
                    vec![Vec::with_capacity(frames); channels as usize];
                let mut cursor = 0usize;
                for _ in 0..frames {
                    for ch in out.iter_mut() {
                        let v = match bits {
                            16 => i16::from_le_bytes(
                                payload[cursor..cursor + 2].try_into().unwrap(),
                            ) as i32,
                            _ => {
                                let b = &payload[cursor..cursor + 3];
                                ((b[0] as i32) | ((b[1] as i32) << 8) | ((b[2] as i32) << 16))
                                    << 8
                                    >> 8
                            }
                        };
                        ch.push(v);
                        cursor += bytes_per_sample as usize;
                    }
                }
                return WavFile::new(rate, bits, out);
            }
            _ => {
                // Ancillary chunk: skip its payload and pad byte.
                let mut remaining = size;
                let mut sink = [0u8; 4096];
                while remaining > 0 {
                    let take = remaining.min(sink.len() as u64) as usize;
                    let got = read_up_to(&mut reader, &mut sink[..take], &mut pos)?;
                    if got == 0 {
                        return Err(bad(
                            pos,
                            format!("file ended inside a {} chunk", String::from_utf8_lossy(&id)),
                        ));
                    }
                    remaining -= got as u64;
                }
                skip_pad(&mut reader, size, &mut pos)?;
            }
        }
    }
}

/// Writes a PCM WAVE file.
pub fn write_wav(path: impl AsRef<Path>, wav: &WavFile) -> Result<()> {
    let channels = wav.channels.len() as u32;
    let bytes_per_sample = (wav.bit_depth / 8) as u32;
    let data_len = wav.frames() as u64 * channels as u64 * bytes_per_sample as u64;
    if data_len > u32::MAX as u64 - 44 {
        return Err(Error::Config(format!("{data_len} data bytes exceed the RIFF size field")));
    }
    let mut writer = BufWriter::new(File::create(path.as_ref())?);
    let byte_rate = wav.sample_rate * channels * bytes_per_sample;
    let block_align = (channels * bytes_per_sample) as u16;

    writer.write_all(b"RIFF")?;
    writer.write_all(&(36 + data_len as u32 + (data_len as u32 & 1)).to_le_bytes())?;
    writer.write_all(b"WAVE")?;
    writer.write_all(b"fmt ")?;
    writer.write_all(&16u32.to_le_bytes())?;
    writer.write_all(&1u16.to_le_bytes())?;
    writer.write_all(&(channels as u16).to_le_bytes())?;
    writer.write_all(&wav.sample_rate.to_le_bytes())?;
    writer.write_all(&byte_rate.to_le_bytes())?;
    writer.write_all(&block_align.to_le_bytes())?;
    writer.write_all(&wav.bit_depth.to_le_bytes())?;
    writer.write_all(b"data")?;
    writer.write_all(&(data_len as u32).to_le_bytes())?;
    for frame in 0..wav.frames() {
        for ch in &wav.channels {
            let v = ch[frame];
            match wav.bit_depth {
                16 => writer.write_all(&(v as i16).to_le_bytes())?,
                _ => writer.write_all(&v.to_le_bytes()[..3])?,
            }
        }
    }
    if data_len % 2 == 1 {
        writer.write_all(&[0u8])?;
    }
    writer.flush()?;
    Ok(())
}

fn read_exact_at(r: &mut impl Read, buf: &mut [u8], pos: &mut u64) -> Result<()> {
    if !try_read_exact(r, buf, pos)? {
        return Err(bad(*pos, "unexpected end of file"));
    }
    Ok(())
}

/// Reads exactly `buf.len()` bytes; false on clean EOF at the first
/// byte, error on EOF mid-buffer.
fn try_read_exact(r: &mut impl Read, buf: &mut [u8], pos: &mut u64) -> Result<bool> {
    let got = read_up_to(r, buf, pos)?;
    if got == 0 {
        return Ok(false);
    }
    if got < buf.len() {
        return Err(bad(*pos, format!("unexpected end of file ({got} of {} bytes)", buf.len())));
    }
    Ok(true)
}

fn read_up_to(r: &mut impl Read, buf: &mut [u8], pos: &mut u64) -> Result<usize> {
    let mut got = 0;
    while got < buf.len() {
        let n = r.read(&mut buf[got..])?;
        if n == 0 {
            break;
        }
        got += n;
        *pos += n as u64;
    }
    Ok(got)
}

/// RIFF chunks are word-aligned: a chunk of odd size carries one pad
/// byte that is not part of its declared length.
fn skip_pad(r: &mut impl Read, size: u64, pos: &mut u64) -> Result<()> {
    if size % 2 == 1 {
        let mut pad = [0u8; 1];
        let _ = read_up_to(r, &mut pad, pos)?;
    }
    Ok(())
}
