use hcs_core::wire::{IngestAck, WireBatch};
use hcs_core::MetricSample;
use hcsd::{HcsdConfig, PresenterSection, StoreSection};

fn empty_topology_config() -> HcsdConfig {
    serde_json::from_str(
        r#"{
            "listen": "127.0.0.1:0",
            "topology": {"services": [], "requires": []},
            "checker": {"interval_ms": 200}
        }"#,
    )
    .unwrap()
}

fn batch_of(samples: Vec<MetricSample>) -> WireBatch {
    hcs_core::wire::batch("it", 1, &samples, &[])
}

#[tokio::test]
async fn ingest_query_health_round_trip() {
    let handle = hcsd::start(empty_topology_config()).await.unwrap();
    let client = reqwest::Client::new();
    let base = handle.base_url();

    let batch = batch_of(vec![
        MetricSample::gauge("A", 10, "swap_used_pct", 1.0, "percent"),
        MetricSample::gauge("A", 20, "swap_used_pct", 2.0, "percent"),
        MetricSample::gauge("A", 30, "swap_used_pct", 3.0, "percent"),
    ]);
    let ack: IngestAck = client
        .post(format!("{base}/v1/samples"))
        .json(&batch)
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(ack, IngestAck { accepted: 3, rejected: 0 });

    let series: serde_json::Value = client
        .get(format!(
            "{base}/v1/series?source=A&name=swap_used_pct&t0=10&t1=30"
        ))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(series["points"], serde_json::json!([[10, 1.0], [20, 2.0]]));

    let health: serde_json::Value = client
        .get(format!("{base}/v1/health"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(health["status"], "ok");
    assert_eq!(health["series"], 1);

    handle.shutdown().await;
}

#[tokio::test]
async fn malformed_body_is_400_with_error_json() {
    let handle = hcsd::start(empty_topology_config()).await.unwrap();
    let client = reqwest::Client::new();

    let response = client
        .post(format!("{}/v1/samples", handle.base_url()))
        .header("content-type", "application/json")
        .body("{\"sender_id\": }")
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 400);
    let body: serde_json::Value = response.json().await.unwrap();
    assert!(body["error"].as_str().unwrap().contains("column"));

    handle.shutdown().await;
}

#[tokio::test]
async fn oversize_body_is_413() {
    let handle = hcsd::start(empty_topology_config()).await.unwrap();
    let client = reqwest::Client::new();

    let big = vec![b'x'; 2 * 1024 * 1024];
    let response = client
        .post(format!("{}/v1/samples", handle.base_url()))
        .header("content-type", "application/json")
        .body(big)
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 413);

    handle.shutdown().await;
}

#[tokio::test]
async fn invalid_series_range_is_400() {
    let handle = hcsd::start(empty_topology_config()).await.unwrap();
    let client = reqwest::Client::new();
    let response = client
        .get(format!(
            "{}/v1/series?source=A&name=m&t0=30&t1=10",
            handle.base_url()
        ))
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 400);
    handle.shutdown().await;
}

#[tokio::test]
async fn diagnosis_appears_after_first_cycle() {
    let handle = hcsd::start(empty_topology_config()).await.unwrap();
    let client = reqwest::Client::new();
    let url = format!("{}/v1/diagnosis/latest", handle.base_url());

    // Poll until the first cycle lands (interval is 200 ms).
    let mut last_status = 0;
    for _ in 0..50 {
        let response = client.get(&url).send().await.unwrap();
        last_status = response.status().as_u16();
        if last_status == 200 {
            let body: serde_json::Value = response.json().await.unwrap();
            assert!(body.get("statuses").is_some());
            assert!(body.get("report").is_some());
            handle.shutdown().await;
            return;
        }
        tokio::time::sleep(std::time::Duration::from_millis(100)).await;
    }
    panic!("diagnosis never appeared, last status {last_status}");
}

#[tokio::test]
async fn journal_preload_restores_series() {
    let journal_dir = tempfile::tempdir().unwrap();

    // First life: ingest with journaling on.
    let mut config = empty_topology_config();
    config.store = StoreSection {
        journal_dir: Some(journal_dir.path().to_path_buf()),
        ..Default::default()
    };
    let handle = hcsd::start(config).await.unwrap();
    let client = reqwest::Client::new();
    client
        .post(format!("{}/v1/samples", handle.base_url()))
        .json(&batch_of(vec![
            MetricSample::gauge("A", 10, "m", 1.5, ""),
            MetricSample::gauge("A", 20, "m", 2.5, ""),
        ]))
        .send()
        .await
        .unwrap();
    handle.shutdown().await;

    let journal_file = std::fs::read_dir(journal_dir.path())
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();

    // Second life: fresh daemon, replay the journal, query it back.
    let handle = hcsd::start(empty_topology_config()).await.unwrap();
    let (samples, events, bad) = hcsd::preload_journal(&handle.store, &journal_file).unwrap();
    assert_eq!((samples, events, bad), (2, 0, 0));

    let series: serde_json::Value = client
        .get(format!(
            "{}/v1/series?source=A&name=m&t0=0&t1=100",
            handle.base_url()
        ))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(series["points"], serde_json::json!([[10, 1.5], [20, 2.5]]));
    handle.shutdown().await;
}

#[tokio::test]
async fn reports_written_when_dir_configured() {
    let report_dir = tempfile::tempdir().unwrap();
    let mut config: HcsdConfig = serde_json::from_str(
        r#"{
            "listen": "127.0.0.1:0",
            "topology": {"services": [{"id": "A", "probe_address": "127.0.0.1:1", "probe_path": "/health"}]},
            "checker": {"interval_ms": 200}
        }"#,
    )
    .unwrap();
    config.presenter = PresenterSection {
        report_dir: Some(report_dir.path().to_path_buf()),
        ..Default::default()
    };

    let handle = hcsd::start(config).await.unwrap();
    for _ in 0..50 {
        if report_dir.path().join("latest.html").exists() {
            break;
        }
        tokio::time::sleep(std::time::Duration::from_millis(100)).await;
    }
    handle.shutdown().await;

    let latest = std::fs::read_to_string(report_dir.path().join("latest.html")).unwrap();
    assert!(latest.contains("Health check diagnosis"));
    // Probing 127.0.0.1:1 fails, so A shows up as an issue eventually; at
    // minimum the page lists the service.
    assert!(latest.contains("A"));
}
