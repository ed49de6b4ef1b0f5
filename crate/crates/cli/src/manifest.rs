use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Resolved inputs of one run: video ids and one directory per role and video.
///
/// Video ids are the subdirectory names of the first role's root, sorted;
/// every other role must hold a directory of the same name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub categories: PathBuf,
    pub roles: Vec<(String, PathBuf)>,
    pub video_ids: Vec<String>,
}

impl RunManifest {
    pub fn resolve(roles: &[(&str, &Path)], categories: &Path) -> CliResult<Self> {
        if !categories.is_file() {
            return Err(CliError::Manifest(format!(
                "categories file {} does not exist",
                categories.display()
            )));
        }
        for (role, root) in roles {
            if !root.is_dir() {
                return Err(CliError::Manifest(format!(
                    "{role} root {} is not a directory",
                    root.display()
                )));
            }
        }
        let (lead, lead_root) = roles[0];
        let mut video_ids = Vec::new();
        let entries = fs::read_dir(lead_root)
            .map_err(|e| CliError::Manifest(format!("cannot list {}: {e}", lead_root.display())))?;
        for entry in entries {
            let entry = entry.map_err(|e| {
                CliError::Manifest(format!("cannot list {}: {e}", lead_root.display()))
            })?;
            if entry.path().is_dir() {
                let name = entry.file_name().into_string().map_err(|n| {
                    CliError::Manifest(format!("video directory name {n:?} is not UTF-8"))
                })?;
                video_ids.push(name);
            }
        }
        video_ids.sort();
        if video_ids.is_empty() {
            return Err(CliError::Manifest(format!(
                "{lead} root {} holds no videos",
                lead_root.display()
            )));
        }
        for (role, root) in &roles[1..] {
            if let Some(id) = video_ids.iter().find(|id| !root.join(id).is_dir()) {
                return Err(CliError::Manifest(format!(
                    "video {id} has no {role} directory under {}",
                    root.display()
                )));
            }
        }
        Ok(Self {
            categories: categories.to_path_buf(),
            roles: roles
                .iter()
                .map(|(r, p)| (r.to_string(), p.to_path_buf()))
                .collect(),
            video_ids,
        })
    }

    /// Directory of `video` for `role`.
    pub fn dir(&self, role: &str, video: &str) -> PathBuf {
        let (_, root) = self
            .roles
            .iter()
            .find(|(r, _)| r == role)
            .unwrap_or_else(|| panic!("role {role} not in manifest"));
        root.join(video)
    }
}
