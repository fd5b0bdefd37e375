use std::io;
use std::path::{Path, PathBuf};

use seglab_core::corpus::CorpusError;
use seglab_core::fst::FstError;
use seglab_core::lm::LmError;
use seglab_core::segmentation::SegmentError;
use seglab_core::stats::StatsError;
use seglab_core::wals::TypologyError;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Fst(#[from] FstError),
    #[error(transparent)]
    Lm(#[from] LmError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Typology(#[from] TypologyError),
}

impl Error {
    pub(crate) fn parse(path: &Path, line: usize, message: impl ToString) -> Self {
        Error::Parse {
            path: path.to_path_buf(),
            line,
            message: message.to_string(),
        }
    }

    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path, source: csv::Error) -> Self {
        Error::Csv {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes `contents` to `path`, creating parent directories.
pub(crate) fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
