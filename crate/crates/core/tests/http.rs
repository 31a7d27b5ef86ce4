use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use congen::generator::{assemble, AssembleOptions, GenRequest, Generator, HttpGenerator, RetryPolicy};
use congen::dataset::ConceptQuery;
use congen::tagger::ConceptSet;
use congen::Error;
use serde_json::Value;

#[derive(Debug, Clone)]
struct Recorded {
    method: String,
    path: String,
    body: String,
}

/// Serves `responses` in order, one per connection, then stops.
struct Replay {
    url: String,
    recorded: Arc<Mutex<Vec<Recorded>>>,
    handle: Option<thread::JoinHandle<()>>,
}

impl Replay {
    fn start(responses: Vec<(u16, String)>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let recorded = Arc::new(Mutex::new(Vec::new()));
        let log = Arc::clone(&recorded);
        let handle = thread::spawn(move || {
            for (status, body) in responses {
                let (stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut request_line = String::new();
                reader.read_line(&mut request_line).unwrap();
                let mut length = 0;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if line.trim().is_empty() {
                        break;
                    }
                    if let Some((name, value)) = line.split_once(':') {
                        if name.eq_ignore_ascii_case("content-length") {
                            length = value.trim().parse().unwrap();
                        }
                    }
                }
                let mut payload = vec![0; length];
                reader.read_exact(&mut payload).unwrap();
                let mut parts = request_line.split_whitespace();
                log.lock().unwrap().push(Recorded {
                    method: parts.next().unwrap_or_default().to_string(),
                    path: parts.next().unwrap_or_default().to_string(),
                    body: String::from_utf8(payload).unwrap(),
                });
                let mut stream = stream;
                write!(
                    stream,
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                )
                .unwrap();
            }
        });
        Replay { url, recorded, handle: Some(handle) }
    }

    fn client(&self) -> HttpGenerator {
        HttpGenerator::with_retry(
            &self.url,
            RetryPolicy { attempts: 3, initial_backoff: Duration::from_millis(1), timeout: Duration::from_secs(5) },
        )
    }

    fn finish(mut self) -> Vec<Recorded> {
        self.handle.take().unwrap().join().unwrap();
        self.recorded.lock().unwrap().clone()
    }
}

fn fixture(name: &str) -> Value {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/protocol").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn cases() -> Vec<Value> {
    (1..=5).map(|i| fixture(&format!("case{i}.json"))).collect()
}

#[test]
fn fixtures_satisfy_schemas() {
    let request = jsonschema::validator_for(&fixture("request.schema.json")).unwrap();
    let response = jsonschema::validator_for(&fixture("response.schema.json")).unwrap();
    let health = jsonschema::validator_for(&fixture("health.schema.json")).unwrap();
    for case in cases() {
        assert!(request.is_valid(&case["request"]), "{}", case["request"]);
        assert!(response.is_valid(&case["response"]), "{}", case["response"]);
        let n = case["request"]["num_candidates"].as_u64().unwrap() as usize;
        assert_eq!(case["response"]["sentences"].as_array().unwrap().len(), n);
    }
    assert!(health.is_valid(&serde_json::json!({"status": "ok"})));
    assert!(!request.is_valid(&serde_json::json!({"concepts": ["dog"], "max_tokens": 32, "num_candidates": 1})));
}

#[test]
fn client_requests_validate_against_schema() {
    let schema = jsonschema::validator_for(&fixture("request.schema.json")).unwrap();
    for case in cases() {
        let parsed: GenRequest = serde_json::from_value(case["request"].clone()).unwrap();
        let emitted = serde_json::to_value(&parsed).unwrap();
        assert!(schema.is_valid(&emitted));
        assert_eq!(emitted, case["request"]);
    }
}

#[test]
fn replays_five_canned_responses() {
    let cases = cases();
    let server = Replay::start(cases.iter().map(|c| (200, c["response"].to_string())).collect());
    let client = server.client();
    let mut outputs = Vec::new();
    for case in &cases {
        let request: GenRequest = serde_json::from_value(case["request"].clone()).unwrap();
        outputs.push(client.generate(&request).unwrap());
    }
    let recorded = server.finish();
    for ((case, out), rec) in cases.iter().zip(&outputs).zip(&recorded) {
        let want: Vec<String> = serde_json::from_value(case["response"]["sentences"].clone()).unwrap();
        assert_eq!(out, &want);
        assert_eq!(rec.method, "POST");
        assert_eq!(rec.path, "/v1/generate");
        assert_eq!(serde_json::from_str::<Value>(&rec.body).unwrap(), case["request"]);
    }
}

#[test]
fn retries_transient_failures() {
    let ok = r#"{"sentences":["A dog runs."]}"#.to_string();
    let server = Replay::start(vec![(503, "{}".into()), (429, "{}".into()), (200, ok)]);
    let out = server.client().generate(&GenRequest::new(ConceptSet::new(["dog", "run"]))).unwrap();
    assert_eq!(out, ["A dog runs."]);
    assert_eq!(server.finish().len(), 3);
}

#[test]
fn gives_up_after_three_attempts() {
    let server = Replay::start(vec![(500, "{}".into()); 3]);
    let err = server.client().generate(&GenRequest::new(ConceptSet::new(["dog", "run"]))).unwrap_err();
    assert!(matches!(err, Error::Transport { attempts: 3, .. }), "{err:?}");
    assert_eq!(server.finish().len(), 3);
}

#[test]
fn protocol_violations_carry_excerpt() {
    let server = Replay::start(vec![
        (200, r#"{"sentences":["one","two"]}"#.into()),
        (200, "<html>not json</html>".into()),
        (400, r#"{"error":"bad request"}"#.into()),
    ]);
    let client = server.client();
    let req = GenRequest::new(ConceptSet::new(["dog", "run"]));
    for expected in ["two", "not json", "bad request"] {
        match client.generate(&req) {
            Err(Error::Protocol { excerpt, .. }) => assert!(excerpt.contains(expected), "{excerpt}"),
            other => panic!("{other:?}"),
        }
    }
    assert_eq!(server.finish().len(), 3);
}

#[test]
fn health_endpoint() {
    let server = Replay::start(vec![(200, r#"{"status":"ok"}"#.into()), (200, r#"{"status":"loading"}"#.into())]);
    let client = server.client();
    client.health().unwrap();
    assert!(client.health().is_err());
    let rec = server.finish();
    assert_eq!((rec[0].method.as_str(), rec[0].path.as_str()), ("GET", "/v1/health"));
}

#[test]
fn incomplete_sentence_is_rejected_at_full_threshold() {
    let server = Replay::start(vec![(200, r#"{"sentences":["A dog sits quietly."]}"#.into())]);
    let client = server.client();
    let queries = vec![ConceptQuery { concepts: ConceptSet::new(["dog", "run"]) }];
    let opts = AssembleOptions { threshold: 1.0, ..AssembleOptions::default() };
    let mut written = Vec::new();
    let summary = assemble(&queries, &client, None, &opts, |r| {
        written.push(r.clone());
        Ok(())
    })
    .unwrap();
    assert!(written.is_empty());
    assert_eq!(summary.rejections, 1);
    assert_eq!(summary.failures, 0);
    server.finish();
}

#[test]
fn endpoint_failure_skips_query() {
    let server = Replay::start(vec![(500, "{}".into()); 3]);
    let queries = vec![ConceptQuery { concepts: ConceptSet::new(["dog", "run"]) }];
    let summary = assemble(&queries, &server.client(), None, &AssembleOptions::default(), |_| Ok(())).unwrap();
    assert_eq!(summary.failures, 1);
    assert_eq!(summary.records, 0);
    server.finish();
}
