#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Instant;

use privlabel::core::model::{
    AgeRating, AppRecord, AppleEntry, AppleLabel, GoogleEntry, GoogleLabel, LabeledApp, Platform,
    PriceClass, SecurityPractices, TrackedEntry,
};
use privlabel::core::taxonomy::{
    apple_category_of, google_category_of, AppleDatatype, ApplePurpose, GoogleDatatype,
    GooglePurpose, PrivacyType,
};
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture(rel: &str) -> String {
    let p = fixtures().join(rel);
    fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// Sorted contents of `tests/fixtures/<dir>` as `(file name, text)`.
pub fn fixture_dir(dir: &str) -> Vec<(String, String)> {
    let mut files: Vec<_> = fs::read_dir(fixtures().join(dir))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect()
}

/// Runs one acceptance criterion and prints a single pass/fail line for it.
pub fn criterion(name: &str, f: impl FnOnce() + std::panic::UnwindSafe) {
    let start = Instant::now();
    let r = std::panic::catch_unwind(f);
    let ms = start.elapsed().as_millis();
    match r {
        Ok(()) => println!("PASS  {name} ({ms} ms)"),
        Err(e) => {
            println!("FAIL  {name} ({ms} ms)");
            std::panic::resume_unwind(e);
        }
    }
}

fn subset<T: Copy, R: Rng>(rng: &mut R, all: &[T], min: usize, max: usize) -> Vec<T> {
    let n = rng.random_range(min..=max.min(all.len()));
    all.choose_multiple(rng, n).copied().collect()
}

fn tri<R: Rng>(rng: &mut R) -> Option<bool> {
    match rng.random_range(0..3) {
        0 => None,
        1 => Some(false),
        _ => Some(true),
    }
}

pub fn google_entry<R: Rng>(rng: &mut R) -> GoogleEntry {
    let datatype = *GoogleDatatype::ALL.choose(rng).unwrap();
    GoogleEntry {
        category: google_category_of(datatype),
        datatype,
        purposes: subset(rng, GooglePurpose::ALL, 1, 3).into_iter().collect(),
        optional_flag: rng.random_bool(0.2),
    }
}

/// A valid label with at most `max` entries over both sections.
pub fn google_label<R: Rng>(rng: &mut R, max: usize) -> GoogleLabel {
    let n = rng.random_range(0..=max);
    let mut l = GoogleLabel {
        security: SecurityPractices {
            encrypted_in_transit: tri(rng),
            data_deletion_option: tri(rng),
            independent_review: tri(rng),
        },
        ..GoogleLabel::default()
    };
    for _ in 0..n {
        let e = google_entry(rng);
        if rng.random_bool(0.6) {
            l.collected.insert(e);
        } else {
            l.shared.insert(e);
        }
    }
    l
}

pub fn apple_entry<R: Rng>(rng: &mut R) -> AppleEntry {
    let datatype = *AppleDatatype::ALL.choose(rng).unwrap();
    AppleEntry { purpose: *ApplePurpose::ALL.choose(rng).unwrap(), category: apple_category_of(datatype), datatype }
}

/// A valid label with at most `max` entries; some are Data Not Collected.
pub fn apple_label<R: Rng>(rng: &mut R, max: usize) -> AppleLabel {
    let n = rng.random_range(0..=max);
    if n == 0 || rng.random_bool(0.15) {
        return AppleLabel::not_collected();
    }
    let mut l = AppleLabel::default();
    for _ in 0..n {
        match rng.random_range(0..4) {
            0 => {
                let e = apple_entry(rng);
                l.tracked_entries.insert(TrackedEntry { category: e.category, datatype: e.datatype });
                l.privacy_types.insert(PrivacyType::DataUsedToTrackYou);
            }
            1 => {
                l.not_linked_entries.insert(apple_entry(rng));
                l.privacy_types.insert(PrivacyType::DataNotLinkedToYou);
            }
            _ => {
                l.linked_entries.insert(apple_entry(rng));
                l.privacy_types.insert(PrivacyType::DataLinkedToYou);
            }
        }
    }
    l
}

pub fn record(platform: Platform, app_id: &str, name: &str) -> AppRecord {
    AppRecord {
        platform,
        app_id: app_id.into(),
        name: name.into(),
        developer_name: String::new(),
        policy_url: None,
        developer_website: None,
        downloads: None,
        price_class: PriceClass::Free,
        age_rating: match platform {
            Platform::Google => AgeRating::Everyone,
            Platform::Apple => AgeRating::Age4,
        },
        genre: String::new(),
        requests_network_permission: None,
    }
}

/// A store listing with random metadata and, most of the time, a label.
pub fn labeled_app<R: Rng>(rng: &mut R, platform: Platform, i: usize) -> LabeledApp {
    let mut r = record(platform, &format!("{platform}.app{i:04}"), &format!("App {i}"));
    r.price_class = *PriceClass::ALL.choose(rng).unwrap();
    let ages: Vec<AgeRating> = AgeRating::ALL.iter().copied().filter(|a| a.platform() == platform).collect();
    r.age_rating = *ages.choose(rng).unwrap();
    r.policy_url = Some(format!("https://dev{}.example.com/privacy", i % 97));
    if platform == Platform::Google {
        r.downloads = match rng.random_range(0..10) {
            0 => None,
            1 => Some(rng.random_range(0..1000)),
            2..=4 => Some(rng.random_range(1000..=10_000)),
            5..=7 => Some(rng.random_range(10_001..=1_000_000)),
            _ => Some(rng.random_range(1_000_001..=50_000_000)),
        };
        r.requests_network_permission = Some(rng.random_bool(0.8));
    }
    let labeled = rng.random_bool(0.7);
    LabeledApp {
        google_label: (labeled && platform == Platform::Google).then(|| google_label(rng, 8)),
        apple_label: (labeled && platform == Platform::Apple).then(|| apple_label(rng, 8)),
        record: r,
    }
}

pub fn ids<'a>(xs: impl IntoIterator<Item = &'a str>) -> BTreeSet<String> {
    xs.into_iter().map(String::from).collect()
}

/// One request as the test server saw it.
#[derive(Debug, Clone)]
pub struct Hit {
    pub at: Instant,
    pub path: String,
    pub user_agent: Option<String>,
}

pub struct Reply {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn new(status: u16, body: &str) -> Reply {
        Reply { status, headers: vec![("Content-Type".into(), "text/html; charset=utf-8".into())], body: body.into() }
    }

    pub fn text(status: u16, body: &str) -> Reply {
        Reply { status, headers: vec![("Content-Type".into(), "text/plain".into())], body: body.into() }
    }

    pub fn redirect(to: &str) -> Reply {
        Reply { status: 302, headers: vec![("Location".into(), to.into())], body: Vec::new() }
    }
}

/// A blocking HTTP/1.1 server on a loopback port that logs every request.
pub struct TestServer {
    pub base: String,
    log: Arc<Mutex<Vec<Hit>>>,
}

type Handler = dyn Fn(&str, usize) -> Reply + Send + Sync;

impl TestServer {
    /// `handler(path, n)` answers the `n`th request (from 1) for `path`.
    pub fn start(handler: impl Fn(&str, usize) -> Reply + Send + Sync + 'static) -> TestServer {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let log: Arc<Mutex<Vec<Hit>>> = Arc::default();
        let handler: Arc<Handler> = Arc::new(handler);
        let l = log.clone();
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { continue };
                let (l, h) = (l.clone(), handler.clone());
                thread::spawn(move || serve(stream, &l, h.as_ref()));
            }
        });
        TestServer { base, log }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    pub fn hits(&self) -> Vec<Hit> {
        self.log.lock().unwrap().clone()
    }

    pub fn hits_for(&self, path: &str) -> Vec<Hit> {
        self.hits().into_iter().filter(|h| h.path == path).collect()
    }
}

fn serve(stream: TcpStream, log: &Mutex<Vec<Hit>>, handler: &Handler) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut line = String::new();
    if reader.read_line(&mut line).unwrap_or(0) == 0 {
        return;
    }
    let at = Instant::now();
    let path = line.split_whitespace().nth(1).unwrap_or("/").to_string();
    let mut user_agent = None;
    loop {
        let mut h = String::new();
        if reader.read_line(&mut h).unwrap_or(0) == 0 || h == "\r\n" || h == "\n" {
            break;
        }
        if let Some((k, v)) = h.split_once(':') {
            if k.eq_ignore_ascii_case("user-agent") {
                user_agent = Some(v.trim().to_string());
            }
        }
    }
    let n = {
        let mut log = log.lock().unwrap();
        log.push(Hit { at, path: path.clone(), user_agent });
        log.iter().filter(|h| h.path == path).count()
    };
    let reply = handler(&path, n);
    let mut out = stream;
    let mut head = format!("HTTP/1.1 {} X\r\nContent-Length: {}\r\nConnection: close\r\n", reply.status, reply.body.len());
    for (k, v) in &reply.headers {
        head.push_str(&format!("{k}: {v}\r\n"));
    }
    head.push_str("\r\n");
    let _ = out.write_all(head.as_bytes());
    let _ = out.write_all(&reply.body);
    let _ = out.flush();
}
