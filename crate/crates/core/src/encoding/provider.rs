//! HTTP client for an external embedding provider.
//!
//! `POST {endpoint}/embed` with `{"model", "window", "overlap", "texts"}`;
//! the reply is `{"dim", "embeddings"}` in request order, errors are non-2xx
//! replies carrying `{"error"}`.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EmbeddingVector, EncodingError};

#[derive(Serialize)]
struct EmbedRequest<'a> {
    model: &'a str,
    window: usize,
    overlap: usize,
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct EmbedResponse {
    dim: usize,
    embeddings: Vec<Vec<f32>>,
}

#[derive(Deserialize)]
struct ErrorBody {
    error: String,
}

#[derive(Debug, Clone)]
pub struct ProviderClient {
    url: String,
    model: String,
    window: usize,
    overlap: usize,
    batch_size: usize,
    client: reqwest::blocking::Client,
}

impl ProviderClient {
    pub fn new(
        endpoint: &str,
        model: &str,
        window: usize,
        overlap: usize,
        batch_size: usize,
        timeout: Duration,
    ) -> Result<Self, EncodingError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| EncodingError::Provider(e.to_string()))?;
        Ok(Self {
            url: format!("{}/embed", endpoint.trim_end_matches('/')),
            model: model.to_string(),
            window,
            overlap,
            batch_size: batch_size.max(1),
            client,
        })
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    /// Embeds `texts` in batches; every reply must have one finite vector of
    /// the announced dimension per text.
    pub fn embed(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, EncodingError> {
        let mut out = Vec::with_capacity(texts.len());
        for batch in texts.chunks(self.batch_size) {
            out.extend(self.embed_batch(batch)?);
        }
        Ok(out)
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, EncodingError> {
        let body = EmbedRequest {
            model: &self.model,
            window: self.window,
            overlap: self.overlap,
            texts,
        };
        let fail = |m: String| EncodingError::Provider(format!("{}: {m}", self.url));
        let resp = self
            .client
            .post(&self.url)
            .json(&body)
            .send()
            .map_err(|e| fail(e.to_string()))?;
        let status = resp.status();
        let bytes = resp.bytes().map_err(|e| fail(e.to_string()))?;
        if !status.is_success() {
            let msg = serde_json::from_slice::<ErrorBody>(&bytes)
                .map(|b| b.error)
                .unwrap_or_else(|_| String::from_utf8_lossy(&bytes).into_owned());
            return Err(fail(format!("status {status}: {msg}")));
        }
        let reply: EmbedResponse =
            serde_json::from_slice(&bytes).map_err(|e| fail(format!("invalid reply: {e}")))?;
        if reply.embeddings.len() != texts.len() {
            return Err(fail(format!(
                "sent {} texts, received {} embeddings",
                texts.len(),
                reply.embeddings.len()
            )));
        }
        reply
            .embeddings
            .into_iter()
            .map(|v| {
                if v.len() != reply.dim {
                    Err(fail(format!(
                        "embedding of length {} but dim {}",
                        v.len(),
                        reply.dim
                    )))
                } else if v.iter().any(|x| !x.is_finite()) {
                    Err(fail("non-finite embedding value".into()))
                } else {
                    Ok(EmbeddingVector::new(v))
                }
            })
            .collect()
    }
}
