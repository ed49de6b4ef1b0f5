//! Category registry, panoptic/semantic video data model and their file codecs.

mod categories;
mod codec;
mod video;

pub use categories::{Category, CategorySet};
pub use codec::{
    decode_panoptic_video, decode_semantic_video, encode_panoptic_video, encode_semantic_video,
    frame_file_name, MAX_SEGMENT_ID, SEGMENTS_FILE,
};
pub use video::{PanopticFrame, PanopticVideo, SegmentInfo, SegmentTable, SemanticVideo};

/// Segment id of unlabeled pixels in panoptic maps.
pub const VOID_SEGMENT: u32 = 0;

/// Label of unlabeled pixels in semantic maps.
pub const VOID_CATEGORY: u8 = 255;
