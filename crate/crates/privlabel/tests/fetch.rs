mod common;

use std::time::Duration;

use common::{Reply, TestServer};
use privlabel::fetch::{write_raw, FetchConfig, FetchStatus, Fetcher, LOG_FILE};

fn quick() -> FetchConfig {
    FetchConfig {
        min_interval: Duration::from_millis(10),
        backoff_base: Duration::from_millis(20),
        timeout: Duration::from_secs(5),
        ..FetchConfig::default()
    }
}

#[test]
fn failing_robots_means_stay_away() {
    let server = TestServer::start(|path, _| match path {
        "/robots.txt" => Reply::text(500, "oops"),
        _ => Reply::new(200, "<p>hi</p>"),
    });
    let f = Fetcher::new(quick());
    let r = f.fetch_policy(&server.url("/privacy"));
    assert_eq!((r.status, r.attempts), (FetchStatus::RobotsDenied, 0));
    assert!(server.hits_for("/privacy").is_empty());
}

#[test]
fn missing_robots_allows_everything() {
    let server = TestServer::start(|path, _| match path {
        "/robots.txt" => Reply::text(404, ""),
        _ => Reply::new(200, "<p>hi</p>"),
    });
    let r = Fetcher::new(quick()).fetch_policy(&server.url("/private/privacy"));
    assert_eq!(r.status, FetchStatus::Ok);
    assert_eq!(r.body.as_deref(), Some(&b"<p>hi</p>"[..]));
}

#[test]
fn crawl_delay_spaces_requests() {
    let server = TestServer::start(|path, _| match path {
        "/robots.txt" => Reply::text(200, "User-agent: *\nCrawl-delay: 0.3\n"),
        _ => Reply::new(200, "<p>hi</p>"),
    });
    let urls: Vec<String> = ["/a", "/b", "/c"].iter().map(|p| server.url(p)).collect();
    let res = Fetcher::new(quick()).fetch_all(&urls);
    assert!(res.iter().all(|r| r.status == FetchStatus::Ok));
    let hits: Vec<_> = server.hits().into_iter().filter(|h| h.path != "/robots.txt").collect();
    for w in hits.windows(2) {
        assert!(w[1].at - w[0].at >= Duration::from_millis(295), "{:?}", w[1].at - w[0].at);
    }
}

#[test]
fn client_errors_are_not_retried() {
    let server = TestServer::start(|path, _| match path {
        "/robots.txt" => Reply::text(404, ""),
        "/pdf" => Reply { status: 200, headers: vec![("Content-Type".into(), "application/pdf".into())], body: b"%PDF".to_vec() },
        _ => Reply::new(404, "gone"),
    });
    let f = Fetcher::new(quick());
    let r = f.fetch_policy(&server.url("/gone"));
    assert_eq!((r.status, r.attempts), (FetchStatus::HttpError(404), 1));
    let r = f.fetch_policy(&server.url("/pdf"));
    assert_eq!(r.status, FetchStatus::NonHtml);
    assert!(r.body.is_none());
    assert_eq!(f.fetch_policy("ftp://example.com/x").status, FetchStatus::HttpError(0));
}

#[test]
fn raw_pages_and_log_are_written() {
    let server = TestServer::start(|path, _| match path {
        "/robots.txt" => Reply::text(404, ""),
        "/ok" => Reply::new(200, "<p>policy</p>"),
        _ => Reply::new(404, ""),
    });
    let urls = vec![server.url("/ok"), server.url("/nope")];
    let res = Fetcher::new(quick()).fetch_all(&urls);
    let dir = tempfile::tempdir().unwrap();
    let log = write_raw(dir.path(), &res).unwrap();
    assert_eq!(log.len(), 2);
    assert!(dir.path().join(LOG_FILE).exists());
    let file = log[0].file.as_ref().unwrap();
    assert_eq!(std::fs::read(dir.path().join(file)).unwrap(), b"<p>policy</p>");
    assert!(log[1].file.is_none());
}

#[test]
fn backoff_doubles() {
    let c = FetchConfig { backoff_base: Duration::from_millis(100), ..FetchConfig::default() };
    let waits: Vec<u128> = (1..=4).map(|n| c.backoff(n).as_millis()).collect();
    assert_eq!(waits, [100, 200, 400, 800]);
}
