//! Element-set acquisition from a remote provider or local files.

use std::path::{Path, PathBuf};
use std::time::Duration;

use orbitplan::orbitcore::{parse_tle_set, Tle, TleError};
use thiserror::Error;

pub const DEFAULT_URL_TEMPLATE: &str =
    "https://celestrak.org/NORAD/elements/gp.php?CATNR={norad}&FORMAT=TLE";
pub const URL_TEMPLATE_ENV: &str = "ORBITPLAN_TLE_URL";

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("TLE provider unreachable after {attempts} attempts: {reason}")]
    Network { attempts: u32, reason: String },
    #[error("no element set for catalog number {0}")]
    NotFound(u32),
    #[error("malformed element set: {0}")]
    Malformed(String),
    #[error("cannot read element set: {0}")]
    Io(String),
}

impl FetchError {
    pub fn code(&self) -> &'static str {
        match self {
            FetchError::Network { .. } => "TLE_PROVIDER_UNAVAILABLE",
            FetchError::NotFound(_) => "SATELLITE_NOT_FOUND",
            FetchError::Malformed(_) => "TLE_PROVIDER_MALFORMED",
            FetchError::Io(_) => "TLE_FILE_UNREADABLE",
        }
    }
}

fn parse_for(norad: u32, text: &str) -> Result<Tle, FetchError> {
    let tle = parse_tle_set(text).map_err(|e| match e {
        TleError::Empty => FetchError::NotFound(norad),
        e => FetchError::Malformed(e.to_string()),
    })?;
    if tle.catalog_number != norad {
        return Err(FetchError::Malformed(format!(
            "asked for catalog number {norad}, got {}",
            tle.catalog_number
        )));
    }
    Ok(tle)
}

#[derive(Debug, Clone)]
pub struct TleClient {
    template: String,
    timeout: Duration,
    retries: u32,
    backoff: Duration,
}

impl Default for TleClient {
    fn default() -> Self {
        Self::new(DEFAULT_URL_TEMPLATE)
    }
}

impl TleClient {
    pub fn new(template: impl Into<String>) -> Self {
        Self {
            template: template.into(),
            timeout: Duration::from_secs(5),
            retries: 2,
            backoff: Duration::from_secs(1),
        }
    }

    /// Template from the environment, or the default provider.
    pub fn from_env() -> Self {
        Self::new(
            std::env::var(URL_TEMPLATE_ENV).unwrap_or_else(|_| DEFAULT_URL_TEMPLATE.to_string()),
        )
    }

    pub fn with_timing(mut self, timeout: Duration, retries: u32, backoff: Duration) -> Self {
        self.timeout = timeout;
        self.retries = retries;
        self.backoff = backoff;
        self
    }

    pub fn url(&self, norad: u32) -> String {
        self.template.replace("{norad}", &norad.to_string())
    }

    pub fn template(&self) -> &str {
        &self.template
    }

    async fn attempt(&self, http: &reqwest::Client, url: &str) -> Result<Option<String>, String> {
        let resp = http.get(url).send().await.map_err(|e| e.to_string())?;
        let status = resp.status();
        if status == reqwest::StatusCode::NOT_FOUND {
            return Ok(None);
        }
        if !status.is_success() {
            return Err(format!("HTTP {status}"));
        }
        resp.text().await.map(Some).map_err(|e| e.to_string())
    }

    pub async fn fetch(&self, norad: u32) -> Result<Tle, FetchError> {
        let http = reqwest::Client::builder()
            .timeout(self.timeout)
            .build()
            .map_err(|e| FetchError::Network {
                attempts: 0,
                reason: e.to_string(),
            })?;
        let url = self.url(norad);
        let attempts = self.retries + 1;
        let mut last = String::new();
        for i in 0..attempts {
            if i > 0 {
                tokio::time::sleep(self.backoff).await;
            }
            match self.attempt(&http, &url).await {
                Ok(None) => return Err(FetchError::NotFound(norad)),
                Ok(Some(body)) => {
                    // the reference provider answers unknown ids with a 200 and this text
                    if body.trim().is_empty() || body.contains("No GP data found") {
                        return Err(FetchError::NotFound(norad));
                    }
                    return parse_for(norad, &body);
                }
                Err(reason) => last = reason,
            }
        }
        Err(FetchError::Network {
            attempts,
            reason: last,
        })
    }
}

/// Where element sets come from.
#[derive(Debug, Clone)]
pub enum TleSource {
    Remote(TleClient),
    /// one element set in a file
    File(PathBuf),
    /// directory of `*.tle` files searched by catalog number
    Directory(PathBuf),
    Inline(String),
}

impl TleSource {
    pub fn is_remote(&self) -> bool {
        matches!(self, TleSource::Remote(_))
    }

    /// Stable description used in cache keys.
    pub fn identity(&self) -> String {
        match self {
            TleSource::Remote(c) => format!("remote:{}", c.template()),
            TleSource::File(p) => format!("file:{}", p.display()),
            TleSource::Directory(p) => format!("dir:{}", p.display()),
            TleSource::Inline(text) => format!("inline:{text}"),
        }
    }

    pub async fn load(&self, norad: u32) -> Result<Tle, FetchError> {
        match self {
            TleSource::Remote(c) => c.fetch(norad).await,
            local => local.load_local(norad),
        }
    }

    /// Loads without any network access. Remote sources are refused.
    pub fn load_local(&self, norad: u32) -> Result<Tle, FetchError> {
        match self {
            TleSource::Remote(_) => Err(FetchError::Io("remote source in offline mode".into())),
            TleSource::Inline(text) => parse_for(norad, text),
            TleSource::File(path) => parse_for(norad, &read(path)?),
            TleSource::Directory(dir) => find_in_dir(dir, norad),
        }
    }
}

fn read(path: &Path) -> Result<String, FetchError> {
    std::fs::read_to_string(path).map_err(|e| FetchError::Io(format!("{}: {e}", path.display())))
}

fn find_in_dir(dir: &Path, norad: u32) -> Result<Tle, FetchError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| FetchError::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tle"))
        .collect();
    paths.sort();
    for p in paths {
        if let Ok(tle) = parse_tle_set(&read(&p)?) {
            if tle.catalog_number == norad {
                return Ok(tle);
            }
        }
    }
    Err(FetchError::NotFound(norad))
}
