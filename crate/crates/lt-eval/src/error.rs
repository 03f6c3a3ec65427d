use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Format {
        path: PathBuf,
        source: lt_eval_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error(transparent)]
    Core(#[from] lt_eval_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("no trackers found in {}", .0.display())]
    NoTrackers(PathBuf),
    #[error("incomplete tracker results:\n{0}")]
    IncompleteResults(String),
    #[error("output directory {} is locked by another run", .0.display())]
    Locked(PathBuf),
    #[error("{0}")]
    Config(String),
}

pub(crate) trait IoContext<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T>;
}

impl<T> IoContext<T> for io::Result<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T> {
        self.map_err(|source| Error::Io {
            path: path.into(),
            source,
        })
    }
}
