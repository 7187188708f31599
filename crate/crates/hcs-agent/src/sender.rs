//! Batch delivery with retry buffering.
//!
//! Failed batches queue in a bounded FIFO and are retried oldest-first on
//! later ticks, at most `RETRIES_PER_TICK` buffered batches per tick, so a
//! receiver outage never reorders deliveries and never grows memory without
//! bound. On overflow the oldest batch is dropped and counted.

use std::collections::VecDeque;

use async_trait::async_trait;
use thiserror::Error;

use hcs_core::wire::{IngestAck, WireBatch};

pub const DEFAULT_BUFFER_CAPACITY: usize = 256;
const RETRIES_PER_TICK: usize = 3;

#[derive(Debug, Error)]
#[error("delivery failed: {0}")]
pub struct TransportError(pub String);

#[async_trait]
pub trait BatchTransport: Send + Sync {
    async fn post(&self, batch: &WireBatch) -> Result<IngestAck, TransportError>;
}

/// HTTP transport posting to `<receiver>/v1/samples` with a 2 s deadline.
pub struct HttpTransport {
    url: String,
    client: reqwest::Client,
}

impl HttpTransport {
    pub fn new(receiver_url: &str) -> Result<Self, TransportError> {
        let client = reqwest::Client::builder()
            .timeout(std::time::Duration::from_secs(2))
            .build()
            .map_err(|e| TransportError(e.to_string()))?;
        Ok(HttpTransport {
            url: format!("{}/v1/samples", receiver_url.trim_end_matches('/')),
            client,
        })
    }
}

#[async_trait]
impl BatchTransport for HttpTransport {
    async fn post(&self, batch: &WireBatch) -> Result<IngestAck, TransportError> {
        let response = self
            .client
            .post(&self.url)
            .json(batch)
            .send()
            .await
            .map_err(|e| TransportError(e.to_string()))?;
        if !response.status().is_success() {
            return Err(TransportError(format!("status {}", response.status())));
        }
        response
            .json::<IngestAck>()
            .await
            .map_err(|e| TransportError(e.to_string()))
    }
}

/// Bounded FIFO of undelivered batches.
pub struct SendBuffer {
    queue: VecDeque<WireBatch>,
    capacity: usize,
    dropped: u64,
}

impl SendBuffer {
    pub fn new(capacity: usize) -> Self {
        SendBuffer {
            queue: VecDeque::new(),
            capacity: capacity.max(1),
            dropped: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    fn push(&mut self, batch: WireBatch) {
        self.queue.push_back(batch);
        while self.queue.len() > self.capacity {
            self.queue.pop_front();
            self.dropped += 1;
        }
    }
}

/// Delivery bookkeeping across the life of the sender.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SenderStats {
    pub produced: u64,
    pub delivered: u64,
    pub dropped: u64,
}

pub struct Sender<T: BatchTransport> {
    transport: T,
    buffer: SendBuffer,
    delivered: u64,
    produced: u64,
}

impl<T: BatchTransport> Sender<T> {
    pub fn new(transport: T, buffer_capacity: usize) -> Self {
        Sender {
            transport,
            buffer: SendBuffer::new(buffer_capacity),
            delivered: 0,
            produced: 0,
        }
    }

    pub fn stats(&self) -> SenderStats {
        SenderStats {
            produced: self.produced,
            delivered: self.delivered,
            dropped: self.buffer.dropped(),
        }
    }

    pub fn buffered(&self) -> usize {
        self.buffer.len()
    }

    /// One tick of delivery work: drain up to three buffered batches
    /// oldest-first, then the current batch. The current batch is only sent
    /// once every older batch is out, otherwise it joins the queue.
    pub async fn flush_tick(&mut self, current: WireBatch) -> u64 {
        self.produced += 1;
        let mut delivered_now = 0;

        for _ in 0..RETRIES_PER_TICK {
            let Some(oldest) = self.buffer.queue.front() else {
                break;
            };
            match self.transport.post(oldest).await {
                Ok(_) => {
                    self.buffer.queue.pop_front();
                    self.delivered += 1;
                    delivered_now += 1;
                }
                Err(err) => {
                    tracing::debug!("batch retry failed: {err}");
                    self.buffer.push(current);
                    return delivered_now;
                }
            }
        }

        if !self.buffer.is_empty() {
            // Older batches remain; keep strict FIFO order.
            self.buffer.push(current);
            return delivered_now;
        }

        match self.transport.post(&current).await {
            Ok(_) => {
                self.delivered += 1;
                delivered_now + 1
            }
            Err(err) => {
                tracing::debug!("batch send failed: {err}");
                self.buffer.push(current);
                delivered_now
            }
        }
    }
}
