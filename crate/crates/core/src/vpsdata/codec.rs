//! Directory codecs for panoptic and semantic videos.
//!
//! A video directory holds `frame_000000.png`, `frame_000001.png`, ... in
//! frame order. Panoptic frames are 8-bit RGB with
//! `segment_id = R + 256·G + 65536·B`; the directory also carries
//! `segments.json`, an object keyed by decimal segment id. Semantic frames are
//! 8-bit grayscale category ids with `255` = void.
//!
//! Encoding is canonical: fixed file names, fixed PNG parameters, and a
//! sidecar written with numerically sorted keys, so equal videos always
//! produce byte-identical trees.

use std::collections::BTreeMap;
use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use png::{BitDepth, ColorType, Compression, Filter, Transformations};

use crate::error::{Error, Result};
use crate::vpsdata::{
    CategorySet, PanopticFrame, PanopticVideo, SegmentInfo, SegmentTable, SemanticVideo,
};

pub const SEGMENTS_FILE: &str = "segments.json";

/// Largest segment id representable in a 24-bit RGB pixel.
pub const MAX_SEGMENT_ID: u32 = (1 << 24) - 1;

pub fn frame_file_name(index: usize) -> String {
    format!("frame_{index:06}.png")
}

fn is_frame_file(name: &str) -> bool {
    name.len() == "frame_000000.png".len()
        && name.starts_with("frame_")
        && name.ends_with(".png")
        && name[6..12].bytes().all(|b| b.is_ascii_digit())
}

/// Frame files of a directory in lexicographic order.
fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if let Some(name) = entry.file_name().to_str() {
            if is_frame_file(name) {
                names.push(name.to_owned());
            }
        }
    }
    names.sort();
    Ok(names.into_iter().map(|n| dir.join(n)).collect())
}

/// Removes stale frame files so a re-encode never leaves extra frames behind.
fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for path in list_frames(dir)? {
        fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn write_png(
    path: &Path,
    width: usize,
    height: usize,
    color: ColorType,
    data: &[u8],
) -> Result<()> {
    let format_err = |e: png::EncodingError| Error::Format {
        path: path.to_owned(),
        message: e.to_string(),
    };
    let mut bytes = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut bytes, width as u32, height as u32);
        encoder.set_color(color);
        encoder.set_depth(BitDepth::Eight);
        encoder.set_compression(Compression::Fast);
        encoder.set_filter(Filter::Up);
        let mut writer = encoder.write_header().map_err(format_err)?;
        writer.write_image_data(data).map_err(format_err)?;
        writer.finish().map_err(format_err)?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_png(path: &Path, expected: ColorType) -> Result<(usize, usize, Vec<u8>)> {
    let format_err = |message: String| Error::Format {
        path: path.to_owned(),
        message,
    };
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(|e| format_err(e.to_string()))?;
    let (color, depth) = reader.output_color_type();
    if color != expected || depth != BitDepth::Eight {
        return Err(format_err(format!(
            "expected 8-bit {expected:?}, found {depth:?}-bit {color:?}"
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| format_err("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| format_err(e.to_string()))?;
    buf.truncate(info.buffer_size());
    Ok((info.width as usize, info.height as usize, buf))
}

fn read_segment_table(path: &Path) -> Result<SegmentTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: BTreeMap<String, SegmentInfo> = serde_json::from_str(&text)
        .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    let mut table = SegmentTable::new();
    for (key, info) in raw {
        let canonical = !key.is_empty()
            && key.bytes().all(|b| b.is_ascii_digit())
            && (key == "0" || !key.starts_with('0'));
        let id: u32 = match key.parse() {
            Ok(id) if canonical => id,
            _ => {
                return Err(Error::Schema(format!(
                    "{}: segment key {key:?} is not a decimal id",
                    path.display()
                )))
            }
        };
        table.insert(id, info);
    }
    Ok(table)
}

fn write_segment_table(path: &Path, table: &SegmentTable) -> Result<()> {
    // BTreeMap<u32, _> serializes with numerically sorted string keys.
    let mut text = serde_json::to_string_pretty(table).expect("segment table serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn decode_panoptic_video(
    dir: impl AsRef<Path>,
    categories: &CategorySet,
) -> Result<PanopticVideo> {
    let dir = dir.as_ref();
    let paths = list_frames(dir)?;
    if paths.is_empty() {
        return Err(Error::Integrity(format!(
            "{} contains no frames",
            dir.display()
        )));
    }
    let segments = read_segment_table(&dir.join(SEGMENTS_FILE))?;
    let mut frames = Vec::with_capacity(paths.len());
    let mut dims = None;
    for path in &paths {
        let (w, h, rgb) = read_png(path, ColorType::Rgb)?;
        match dims {
            None => dims = Some((w, h)),
            Some(d) if d != (w, h) => {
                return Err(Error::Integrity(format!(
                    "{} is {w}x{h}, earlier frames are {}x{}",
                    path.display(),
                    d.0,
                    d.1
                )))
            }
            Some(_) => {}
        }
        let ids = rgb
            .chunks_exact(3)
            .map(|p| u32::from(p[0]) | u32::from(p[1]) << 8 | u32::from(p[2]) << 16)
            .collect();
        frames.push(PanopticFrame::new(w, h, ids)?);
    }
    let (w, h) = dims.expect("at least one frame");
    PanopticVideo::new(w, h, frames, segments, categories)
}

pub fn encode_panoptic_video(video: &PanopticVideo, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    if let Some((&id, _)) = video.segments().iter().next_back() {
        if id > MAX_SEGMENT_ID {
            return Err(Error::Capacity(format!(
                "segment id {id} exceeds the 24-bit limit {MAX_SEGMENT_ID}"
            )));
        }
    }
    prepare_dir(dir)?;
    let mut rgb = Vec::with_capacity(video.width() * video.height() * 3);
    for (t, frame) in video.frames().iter().enumerate() {
        rgb.clear();
        for &id in frame.pixels() {
            rgb.extend_from_slice(&[id as u8, (id >> 8) as u8, (id >> 16) as u8]);
        }
        write_png(
            &dir.join(frame_file_name(t)),
            video.width(),
            video.height(),
            ColorType::Rgb,
            &rgb,
        )?;
    }
    write_segment_table(&dir.join(SEGMENTS_FILE), video.segments())
}

pub fn decode_semantic_video(
    dir: impl AsRef<Path>,
    categories: &CategorySet,
) -> Result<SemanticVideo> {
    let dir = dir.as_ref();
    let paths = list_frames(dir)?;
    if paths.is_empty() {
        return Err(Error::Integrity(format!(
            "{} contains no frames",
            dir.display()
        )));
    }
    let mut frames = Vec::with_capacity(paths.len());
    let mut dims = None;
    for path in &paths {
        let (w, h, gray) = read_png(path, ColorType::Grayscale)?;
        match dims {
            None => dims = Some((w, h)),
            Some(d) if d != (w, h) => {
                return Err(Error::Integrity(format!(
                    "{} is {w}x{h}, earlier frames are {}x{}",
                    path.display(),
                    d.0,
                    d.1
                )))
            }
            Some(_) => {}
        }
        frames.push(gray);
    }
    let (w, h) = dims.expect("at least one frame");
    SemanticVideo::new(w, h, frames, categories)
}

pub fn encode_semantic_video(video: &SemanticVideo, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    prepare_dir(dir)?;
    for (t, frame) in video.frames().iter().enumerate() {
        write_png(
            &dir.join(frame_file_name(t)),
            video.width(),
            video.height(),
            ColorType::Grayscale,
            frame,
        )?;
    }
    Ok(())
}
