//! Single-record client for the TMDb movie-details endpoint.
//!
//! Requests go to `GET {base_url}/3/movie/{tmdb_id}?api_key=...` and are
//! serialized through one client-wide lock so that consecutive calls are at
//! least `min_interval` apart.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Deserialize;

use crate::MovieId;

use super::Catalog;

pub const API_KEY_ENV: &str = "TMDB_API_KEY";
pub const DEFAULT_BASE_URL: &str = "https://api.themoviedb.org";

#[derive(Debug, thiserror::Error)]
pub enum TmdbError {
    #[error("TMDb API key is empty")]
    MissingApiKey,
    #[error("TMDb has no movie with id {0}")]
    NotFound(u32),
    #[error("TMDb rejected the API key")]
    Unauthorized,
    #[error("TMDb request timed out: {0}")]
    Timeout(String),
    #[error("TMDb transport error: {0}")]
    Transport(String),
    #[error("TMDb returned HTTP {0}")]
    Status(u16),
    #[error("TMDb response could not be decoded: {0}")]
    Decode(String),
}

impl TmdbError {
    /// Whether the same request may succeed if tried again later.
    pub fn is_retryable(&self) -> bool {
        match self {
            TmdbError::Timeout(_) | TmdbError::Transport(_) => true,
            TmdbError::Status(code) => *code == 429 || *code >= 500,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportError {
    Timeout(String),
    Other(String),
}

/// Minimal blocking GET, so tests can substitute canned responses.
pub trait HttpTransport: Send + Sync {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build();
        UreqTransport {
            agent: config.into(),
        }
    }
}

impl HttpTransport for UreqTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, TransportError> {
        let classify = |e: ureq::Error| match e {
            ureq::Error::Timeout(t) => TransportError::Timeout(t.to_string()),
            other => TransportError::Other(other.to_string()),
        };
        let mut resp = self.agent.get(url).call().map_err(classify)?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(classify)?;
        Ok(HttpResponse { status, body })
    }
}

#[derive(Debug, Clone)]
pub struct TmdbConfig {
    pub base_url: String,
    pub min_interval: Duration,
    pub timeout: Duration,
}

impl Default for TmdbConfig {
    fn default() -> Self {
        TmdbConfig {
            base_url: DEFAULT_BASE_URL.to_string(),
            min_interval: Duration::from_millis(250),
            timeout: Duration::from_secs(10),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmdbMovie {
    pub tmdb_id: u32,
    pub title: String,
    pub overview: String,
    pub genres: Vec<String>,
}

#[derive(Deserialize)]
struct DetailsBody {
    id: u32,
    #[serde(default)]
    title: String,
    #[serde(default)]
    overview: Option<String>,
    #[serde(default)]
    genres: Vec<GenreBody>,
}

#[derive(Deserialize)]
struct GenreBody {
    name: String,
}

pub struct TmdbClient<T = UreqTransport> {
    api_key: String,
    config: TmdbConfig,
    transport: T,
    last_request: Mutex<Option<Instant>>,
}

impl TmdbClient<UreqTransport> {
    pub fn new(api_key: impl Into<String>, config: TmdbConfig) -> Result<Self, TmdbError> {
        let transport = UreqTransport::new(config.timeout);
        Self::with_transport(api_key, config, transport)
    }

    /// Reads the key from `TMDB_API_KEY`.
    pub fn from_env(config: TmdbConfig) -> Result<Self, TmdbError> {
        Self::new(std::env::var(API_KEY_ENV).unwrap_or_default(), config)
    }
}

impl<T: HttpTransport> TmdbClient<T> {
    pub fn with_transport(
        api_key: impl Into<String>,
        config: TmdbConfig,
        transport: T,
    ) -> Result<Self, TmdbError> {
        let api_key = api_key.into();
        if api_key.trim().is_empty() {
            return Err(TmdbError::MissingApiKey);
        }
        Ok(TmdbClient {
            api_key,
            config,
            transport,
            last_request: Mutex::new(None),
        })
    }

    fn url(&self, tmdb_id: u32) -> String {
        format!(
            "{}/3/movie/{}?api_key={}",
            self.config.base_url.trim_end_matches('/'),
            tmdb_id,
            self.api_key
        )
    }

    pub fn fetch_overview(&self, tmdb_id: u32) -> Result<TmdbMovie, TmdbError> {
        let resp = {
            let mut last = self.last_request.lock().unwrap_or_else(|p| p.into_inner());
            if let Some(prev) = *last {
                let wait = self.config.min_interval.saturating_sub(prev.elapsed());
                if !wait.is_zero() {
                    std::thread::sleep(wait);
                }
            }
            *last = Some(Instant::now());
            self.transport.get(&self.url(tmdb_id))
        };
        let resp = resp.map_err(|e| match e {
            TransportError::Timeout(m) => TmdbError::Timeout(m),
            TransportError::Other(m) => TmdbError::Transport(m),
        })?;
        match resp.status {
            200 => {}
            401 => return Err(TmdbError::Unauthorized),
            404 => return Err(TmdbError::NotFound(tmdb_id)),
            code => return Err(TmdbError::Status(code)),
        }
        let body: DetailsBody =
            serde_json::from_str(&resp.body).map_err(|e| TmdbError::Decode(e.to_string()))?;
        Ok(TmdbMovie {
            tmdb_id: body.id,
            title: body.title,
            overview: body.overview.unwrap_or_default(),
            genres: body.genres.into_iter().map(|g| g.name).collect(),
        })
    }
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct FetchSummary {
    pub fetched: usize,
    pub not_found: Vec<u32>,
    /// Ids that failed with a retryable error.
    pub failed: Vec<u32>,
}

/// Fills in overviews for linked movies that lack one, up to `limit` requests.
///
/// Missing TMDb ids are recorded and skipped. Authentication failures abort.
pub fn fetch_missing_overviews<T: HttpTransport>(
    catalog: Catalog,
    client: &TmdbClient<T>,
    limit: usize,
) -> Result<(Catalog, FetchSummary), TmdbError> {
    let todo: Vec<(MovieId, u32)> = catalog
        .links()
        .values()
        .filter(|l| catalog.overview(l.movie_id).is_none())
        .filter_map(|l| l.tmdb_id.map(|t| (l.movie_id, t)))
        .take(limit)
        .collect();
    let mut summary = FetchSummary::default();
    let mut catalog = catalog;
    for (movie_id, tmdb_id) in todo {
        match client.fetch_overview(tmdb_id) {
            Ok(m) => {
                summary.fetched += 1;
                catalog = catalog.with_overview(movie_id, m.overview);
            }
            Err(TmdbError::NotFound(id)) => summary.not_found.push(id),
            Err(e) if e.is_retryable() => {
                log::warn!("tmdb {tmdb_id}: {e}");
                summary.failed.push(tmdb_id);
            }
            Err(e) => return Err(e),
        }
    }
    Ok((catalog, summary))
}
