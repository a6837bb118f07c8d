use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use chrono::NaiveDate;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use ripwire::annotation::{parse_export, AnnotationService};
use ripwire::corpus::{Timeline, Tweet};
use ripwire::kb::{KbDate, PersonEntry};
use ripwire::reports::{report_id, suggest_label, write_store, BuildSummary, DeathReport};
use ripwire::Label;
use ripwire_annotate::router;

fn person(id: &str, name: &str, death: Option<NaiveDate>) -> PersonEntry {
    PersonEntry {
        id: id.into(),
        name: name.into(),
        aliases: vec![],
        birth: KbDate::from_ymd(NaiveDate::from_ymd_opt(1950, 1, 1).unwrap()),
        death: death.map(KbDate::from_ymd),
        description: "test person".into(),
    }
}

fn report(person: &PersonEntry, day: NaiveDate, tweets: u64, first_id: u64) -> DeathReport {
    let t0 = day.and_hms_opt(8, 0, 0).unwrap().and_utc().timestamp();
    let timeline = Timeline::new(
        (0..tweets)
            .map(|i| Tweet::new(first_id + i, t0 + i as i64 * 30, format!("RIP {} {i}", person.name)))
            .collect(),
    )
    .unwrap();
    let candidates = BTreeSet::from([person.id.clone()]);
    DeathReport {
        report_id: report_id(day, &candidates),
        candidate_person_ids: candidates,
        day_span: (day, day),
        timeline,
        suggested_label: None,
        label: None,
        resolved_person_id: None,
    }
}

/// A hoax about a living person and a real death, in a fresh store.
fn app() -> (tempfile::TempDir, Router) {
    let dir = tempfile::tempdir().unwrap();
    let death = NaiveDate::from_ymd_opt(2013, 12, 5).unwrap();
    let alive = person("34086", "Justin Bieber", None);
    let dead = person("8023", "Nelson Mandela", Some(death));
    let people: HashMap<String, PersonEntry> = [alive.clone(), dead.clone()]
        .into_iter()
        .map(|p| (p.id.clone(), p))
        .collect();
    let mut reports = vec![
        report(&alive, NaiveDate::from_ymd_opt(2012, 3, 10).unwrap(), 120, 1),
        report(&dead, death, 60, 1000),
    ];
    for r in &mut reports {
        r.suggested_label = suggest_label(r, &people);
    }
    write_store(dir.path(), &reports, &people, &BuildSummary::default()).unwrap();
    let service = Arc::new(AnnotationService::open(dir.path()).unwrap());
    (dir, router(service))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => req
            .header("content-type", "application/json")
            .body(Body::from(v.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

async fn get_json(app: &Router, uri: &str) -> Value {
    let (status, body) = call(app, "GET", uri, None).await;
    assert_eq!(status, StatusCode::OK, "{uri}: {}", String::from_utf8_lossy(&body));
    serde_json::from_slice(&body).unwrap()
}

#[tokio::test]
async fn listing_shows_candidates_and_suggestions() {
    let (_dir, app) = app();
    let page = get_json(&app, "/api/reports").await;
    assert_eq!(page["total"], 2);
    assert_eq!(page["page_size"], 50);
    let items = page["items"].as_array().unwrap();
    assert_eq!(items[0]["report_id"], "2012-03-10_34086");
    assert_eq!(items[0]["candidates"][0]["death"], "alive");
    assert_eq!(items[0]["suggested_label"], "fake");
    assert_eq!(items[1]["candidates"][0]["death"], "2013-12-05");
    assert_eq!(items[1]["suggested_label"], "real");
    let (status, _) = call(&app, "GET", "/api/reports?status=bogus", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn report_view_pages_tweets() {
    let (_dir, app) = app();
    let first = get_json(&app, "/api/reports/2012-03-10_34086").await;
    assert_eq!(first["tweets"]["total"], 120);
    assert_eq!(first["tweets"]["items"].as_array().unwrap().len(), 100);
    let second = get_json(&app, "/api/reports/2012-03-10_34086?tweet_page=1").await;
    let items = second["tweets"]["items"].as_array().unwrap();
    assert_eq!(items.len(), 20);
    assert_eq!(items[0]["id"], 101);
    let (status, body) = call(&app, "GET", "/api/reports/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let err: Value = serde_json::from_slice(&body).unwrap();
    assert!(err["error"].as_str().unwrap().contains("nope"));
}

#[tokio::test]
async fn submission_round_trip() {
    let (dir, app) = app();
    let id = "2012-03-10_34086";
    let pending = get_json(&app, "/api/counts").await["pending"].as_u64().unwrap();
    assert_eq!(pending, 2);

    let wrong = json!({"action": "annotate", "resolved_person_id": "8023", "label": "fake", "annotator": "ann"});
    let (status, _) = call(&app, "POST", &format!("/api/reports/{id}/annotation"), Some(wrong)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let sub = json!({"action": "annotate", "resolved_person_id": "34086", "label": "fake", "annotator": "ann", "annotated_at": 1331370000});
    let (status, body) = call(&app, "POST", &format!("/api/reports/{id}/annotation"), Some(sub)).await;
    assert_eq!(status, StatusCode::OK, "{}", String::from_utf8_lossy(&body));
    let ack: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(ack["replaced"], false);

    let counts = get_json(&app, "/api/counts").await;
    assert_eq!(
        (counts["pending"].as_u64(), counts["annotated"].as_u64()),
        (Some(1), Some(1))
    );
    let pending = get_json(&app, "/api/reports?status=pending").await;
    assert_eq!(pending["items"][0]["report_id"], "2013-12-05_8023");

    let (status, body) = call(&app, "GET", "/api/export", None).await;
    assert_eq!(status, StatusCode::OK);
    let text = String::from_utf8(body).unwrap();
    let rows = parse_export(&text).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].report_id.as_str(), rows[0].label), (id, Label::Fake));
    assert!(text.contains("fake\t1\t120"));

    // resubmission supersedes, both stay in the log
    let again =
        json!({"action": "annotate", "resolved_person_id": "34086", "label": "commemoration", "annotator": "ann"});
    let (_, body) = call(&app, "POST", &format!("/api/reports/{id}/annotation"), Some(again)).await;
    assert_eq!(serde_json::from_slice::<Value>(&body).unwrap()["replaced"], true);
    let (_, body) = call(&app, "GET", "/api/export", None).await;
    assert_eq!(
        parse_export(&String::from_utf8(body).unwrap()).unwrap()[0].label,
        Label::Commemoration
    );
    let log = std::fs::read_to_string(dir.path().join("annotations.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 2);

    // skip keeps a report pending, retract reopens one
    let skip = json!({"action": "skip", "annotator": "ann"});
    let (status, _) = call(&app, "POST", "/api/reports/2013-12-05_8023/annotation", Some(skip)).await;
    assert_eq!(status, StatusCode::OK);
    let retract = json!({"action": "retract", "annotator": "ann"});
    let (status, _) = call(&app, "POST", &format!("/api/reports/{id}/annotation"), Some(retract)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(get_json(&app, "/api/counts").await["pending"], 2);

    let (status, _) = call(
        &app,
        "POST",
        "/api/reports/missing/annotation",
        Some(json!({"action": "skip", "annotator": "a"})),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}
