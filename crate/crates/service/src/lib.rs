//! HTTP API over a loaded [`Engine`].
//!
//! * `POST /api/translate` turns keywords into up to three candidate queries
//!   with result counts.
//! * `POST /api/search` answers a query and returns the matching documents.
//! * `GET /api/health` reports readiness and corpus size.
//!
//! The API is stateless: a client posts the candidate it picked from a
//! translate response verbatim to search.

pub mod api;
pub mod config;

use std::sync::{Arc, OnceLock};

use axum::routing::{get, post};
use axum::Router;
use narrative_core::{Engine, StrategyOptions, TranslationOptions};

pub use config::{ConfigError, ServiceConfig};

#[derive(Debug)]
pub(crate) struct AppState {
    engine: OnceLock<Arc<Engine>>,
    translation: TranslationOptions,
    strategy: StrategyOptions,
}

/// Shared handle to the service state; cheap to clone.
#[derive(Clone, Debug)]
pub struct Service {
    state: Arc<AppState>,
}

impl Service {
    /// A service that answers 503 until [`Service::install`] is called.
    pub fn starting(translation: TranslationOptions, strategy: StrategyOptions) -> Self {
        Service {
            state: Arc::new(AppState {
                engine: OnceLock::new(),
                translation,
                strategy,
            }),
        }
    }

    pub fn ready(engine: Engine, translation: TranslationOptions, strategy: StrategyOptions) -> Self {
        let service = Service::starting(translation, strategy);
        service.install(engine);
        service
    }

    /// Makes the engine available. Returns false if one was already installed.
    pub fn install(&self, engine: Engine) -> bool {
        self.state.engine.set(Arc::new(engine)).is_ok()
    }

    pub fn is_ready(&self) -> bool {
        self.state.engine.get().is_some()
    }

    pub fn router(&self) -> Router {
        Router::new()
            .route("/api/health", get(api::health))
            .route("/api/translate", post(api::translate))
            .route("/api/search", post(api::search))
            .with_state(self.state.clone())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] narrative_core::Error),
    #[error("listen on {addr}: {source}")]
    Bind {
        addr: std::net::SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error("server: {0}")]
    Io(#[from] std::io::Error),
}

/// Loads the corpus (or snapshot) named by `config`.
pub fn load_engine(config: &ServiceConfig) -> Result<Engine, ServeError> {
    let paths = config.corpus_paths()?;
    let options = config.index_options()?;
    let engine = match &config.corpus.snapshot {
        Some(snapshot) => Engine::load_with_snapshot(&paths, snapshot, options)?,
        None => Engine::load(&paths, options)?,
    };
    Ok(engine)
}

/// Binds the listener, builds the index in the background and serves until
/// Ctrl-C. Requests arriving before the index is ready get 503.
pub async fn serve(config: ServiceConfig) -> Result<(), ServeError> {
    config.translation.validate()?;
    let service = Service::starting(config.translation.clone(), config.strategy);
    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .map_err(|source| ServeError::Bind {
            addr: config.listen,
            source,
        })?;
    tracing::info!(addr = %listener.local_addr()?, "listening");

    let loader = {
        let service = service.clone();
        tokio::task::spawn_blocking(move || -> Result<(), ServeError> {
            let engine = load_engine(&config)?;
            tracing::info!(docs = engine.document_count(), "index ready");
            service.install(engine);
            Ok(())
        })
    };

    let server = axum::serve(listener, service.router()).with_graceful_shutdown(async {
        let _ = tokio::signal::ctrl_c().await;
    });
    let server = std::future::IntoFuture::into_future(server);
    tokio::pin!(server);
    tokio::select! {
        done = &mut server => return Ok(done?),
        loaded = loader => match loaded {
            Ok(Ok(())) => {}
            Ok(Err(e)) => return Err(e),
            Err(e) => return Err(ServeError::Io(std::io::Error::other(e))),
        },
    }
    Ok(server.await?)
}
