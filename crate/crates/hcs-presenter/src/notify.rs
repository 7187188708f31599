//! Webhook delivery with suppression.
//!
//! Payloads carry a one-line `text` field (directly consumable by
//! Slack/Mattermost-compatible webhooks) next to the full structured record
//! under `hcs`. Deliveries retry twice with one second of backoff and then
//! drop with a log line — notification delivery never blocks a check cycle,
//! which is why deliveries run on a bounded outbox task.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde_json::json;
use thiserror::Error;

use hcs_core::{Issue, IssueCategory};

#[derive(Debug, Error)]
#[error("webhook delivery failed after {attempts} attempts: {last_error}")]
pub struct DeliveryFailed {
    pub attempts: u32,
    pub last_error: String,
}

pub const DEFAULT_SUPPRESS_MS: i64 = 600_000;
const RETRY_BACKOFF: Duration = Duration::from_secs(1);
const DELIVERY_ATTEMPTS: u32 = 3;

/// Remembers when each (category, subject, rule) was last notified so a
/// flapping issue cannot flood the channel.
#[derive(Debug, Default)]
pub struct NotificationLedger {
    last_notified: HashMap<(IssueCategory, String, String), i64>,
}

impl NotificationLedger {
    pub fn new() -> Self {
        NotificationLedger::default()
    }

    /// True when the issue is due for notification; records the delivery
    /// time when it is.
    pub fn should_notify(&mut self, issue: &Issue, suppress_ms: i64, now_ms: i64) -> bool {
        let key = issue.dedup_key();
        match self.last_notified.get(&key) {
            Some(&last) if now_ms - last <= suppress_ms => false,
            _ => {
                self.last_notified.insert(key, now_ms);
                true
            }
        }
    }
}

/// One-line summary used as the webhook `text` field.
pub fn issue_text(issue: &Issue) -> String {
    let root = if issue.root_cause.is_empty() {
        String::new()
    } else {
        format!(" (root cause: {})", issue.root_cause.join(", "))
    };
    format!(
        "[{}] {}/{} {}: {}{}",
        issue.severity, issue.category, issue.subject, issue.rule_id, issue.message, root
    )
}

/// POST `{"text": <summary>, "hcs": <record>}` to a webhook, retrying twice
/// with backoff.
pub async fn post_report(
    client: &reqwest::Client,
    webhook_url: &str,
    text: &str,
    record: serde_json::Value,
) -> Result<(), DeliveryFailed> {
    let body = json!({ "text": text, "hcs": record });
    let mut last_error = String::new();
    for attempt in 1..=DELIVERY_ATTEMPTS {
        let result = client
            .post(webhook_url)
            .json(&body)
            .timeout(Duration::from_secs(2))
            .send()
            .await;
        match result {
            Ok(response) if response.status().is_success() => return Ok(()),
            Ok(response) => last_error = format!("status {}", response.status()),
            Err(err) => last_error = err.to_string(),
        }
        if attempt < DELIVERY_ATTEMPTS {
            tokio::time::sleep(RETRY_BACKOFF).await;
        }
    }
    Err(DeliveryFailed { attempts: DELIVERY_ATTEMPTS, last_error })
}

/// Bounded queue of pending deliveries; overflow drops the oldest.
pub struct Outbox {
    inner: Arc<Mutex<OutboxInner>>,
    notify: Arc<tokio::sync::Notify>,
    capacity: usize,
}

struct OutboxInner {
    queue: std::collections::VecDeque<OutboxItem>,
    dropped: u64,
}

#[derive(Debug, Clone)]
pub struct OutboxItem {
    pub webhook_url: String,
    pub text: String,
    pub record: serde_json::Value,
}

impl Outbox {
    pub fn new(capacity: usize) -> Self {
        Outbox {
            inner: Arc::new(Mutex::new(OutboxInner {
                queue: std::collections::VecDeque::new(),
                dropped: 0,
            })),
            notify: Arc::new(tokio::sync::Notify::new()),
            capacity: capacity.max(1),
        }
    }

    pub fn dropped(&self) -> u64 {
        self.inner.lock().expect("outbox lock").dropped
    }

    pub fn enqueue(&self, item: OutboxItem) {
        {
            let mut inner = self.inner.lock().expect("outbox lock");
            inner.queue.push_back(item);
            while inner.queue.len() > self.capacity {
                inner.queue.pop_front();
                inner.dropped += 1;
            }
        }
        self.notify.notify_one();
    }

    fn pop(&self) -> Option<OutboxItem> {
        self.inner.lock().expect("outbox lock").queue.pop_front()
    }

    /// Deliver queued items until `shutdown` fires. Runs as its own task so
    /// retries never stall the checker.
    pub async fn run_deliveries(
        self: Arc<Self>,
        client: reqwest::Client,
        mut shutdown: tokio::sync::watch::Receiver<bool>,
    ) {
        loop {
            while let Some(item) = self.pop() {
                if let Err(err) =
                    post_report(&client, &item.webhook_url, &item.text, item.record.clone()).await
                {
                    tracing::error!("{err}; notification dropped");
                }
            }
            tokio::select! {
                _ = self.notify.notified() => {}
                _ = shutdown.changed() => {
                    if *shutdown.borrow() {
                        return;
                    }
                }
            }
        }
    }
}
