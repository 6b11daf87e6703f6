//! Wikidata entity lookup for label tooltips.
//!
//! [`extract_entity_id`] recognises Wikidata terms in schema labels; a
//! [`WikidataClient`] resolves them through an [`EntitySource`] (a local
//! fixture table or the public entity API) and caches the answers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub const DEFAULT_ENDPOINT: &str = "https://www.wikidata.org/w/api.php";
pub const DEFAULT_REQUEST_CAP: usize = 100;
pub const MIN_REQUEST_SPACING: Duration = Duration::from_millis(100);
pub const USER_AGENT: &str = concat!(
    "shex-atlas/",
    env!("CARGO_PKG_VERSION"),
    " (ShEx schema visualiser; tooltip lookups)"
);

const BUNDLED_FIXTURE: &str = include_str!("../fixtures/wikidata.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Item,
    Property,
}

impl EntityKind {
    fn letter(self) -> char {
        match self {
            EntityKind::Item => 'Q',
            EntityKind::Property => 'P',
        }
    }
}

/// `Q<n>` or `P<n>` with `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId {
    pub kind: EntityKind,
    pub number: u64,
}

impl EntityId {
    pub fn item(number: u64) -> Self {
        Self { kind: EntityKind::Item, number }
    }

    pub fn property(number: u64) -> Self {
        Self { kind: EntityKind::Property, number }
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.letter(), self.number)
    }
}

impl FromStr for EntityId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('Q') => EntityKind::Item,
            Some('P') => EntityKind::Property,
            _ => return Err(format!("not an entity id: {s}")),
        };
        let digits = chars.as_str();
        if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("not an entity id: {s}"));
        }
        let number = digits.parse().map_err(|_| format!("entity number out of range: {s}"))?;
        Ok(EntityId { kind, number })
    }
}

impl Serialize for EntityId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EntityId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Prefixed-name prefixes and the entity kinds they may name.
const PREFIXES: &[(&str, bool)] = &[
    // (prefix, items allowed)
    ("wd", true),
    ("wdt", false),
    ("p", false),
    ("ps", false),
    ("pq", false),
    ("pr", false),
];

/// IRI namespaces and whether items are allowed after them. Longer
/// namespaces come first so that `/prop/direct/` wins over `/prop/`.
const NAMESPACES: &[(&str, bool)] = &[
    ("www.wikidata.org/prop/direct/", false),
    ("www.wikidata.org/prop/statement/", false),
    ("www.wikidata.org/prop/qualifier/", false),
    ("www.wikidata.org/prop/reference/", false),
    ("www.wikidata.org/prop/", false),
    ("www.wikidata.org/entity/", true),
    ("www.wikidata.org/wiki/Property:", false),
    ("www.wikidata.org/wiki/", true),
];

fn id_with_policy(local: &str, items_allowed: bool) -> Option<EntityId> {
    let id: EntityId = local.parse().ok()?;
    (items_allowed || id.kind == EntityKind::Property).then_some(id)
}

/// Recognises a Wikidata entity in a prefixed name or IRI.
///
/// Accepted: `wd:Q…`/`wd:P…`, `wdt:`/`p:`/`ps:`/`pq:`/`pr:` followed by
/// `P…`, and full `wikidata.org` entity, property and wiki-page IRIs, with or
/// without angle brackets. A trailing `@` reference marker is ignored.
pub fn extract_entity_id(term: &str) -> Option<EntityId> {
    let term = term.trim().trim_start_matches('@');
    let term = term
        .strip_prefix('<')
        .and_then(|t| t.strip_suffix('>'))
        .unwrap_or(term);
    if let Some(rest) = term.strip_prefix("https://").or_else(|| term.strip_prefix("http://")) {
        for (ns, items) in NAMESPACES {
            if let Some(local) = rest.strip_prefix(ns) {
                return id_with_policy(local, *items);
            }
        }
        return None;
    }
    let (prefix, local) = term.split_once(':')?;
    PREFIXES
        .iter()
        .find(|(p, _)| *p == prefix)
        .and_then(|(_, items)| id_with_policy(local, *items))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySummary {
    pub id: EntityId,
    pub label: String,
    pub description: String,
    pub language: String,
}

/// `label: description`, or the label alone when there is no description.
pub fn tooltip_text(summary: &EntitySummary) -> String {
    if summary.description.is_empty() {
        summary.label.clone()
    } else {
        format!("{}: {}", summary.label, summary.description)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LookupError {
    #[error("entity {0} not found")]
    NotFound(EntityId),
    #[error("wikidata lookup failed: {0}")]
    Network(String),
    #[error("request budget of {0} lookups exhausted")]
    BudgetExhausted(usize),
}

impl LookupError {
    /// Failures that may succeed on retry and must not be cached.
    pub fn is_transient(&self) -> bool {
        !matches!(self, LookupError::NotFound(_))
    }
}

pub trait EntitySource: Send + Sync {
    fn fetch(&self, id: EntityId, language: &str) -> Result<EntitySummary, LookupError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub label: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("cannot read fixture {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed fixture: {0}")]
    Json(#[from] serde_json::Error),
    #[error("fixture key {0} is not an entity id")]
    BadKey(String),
}

/// Offline id → summary table; never touches the network. Entries are
/// language-neutral and reported in the requested language.
#[derive(Debug, Clone, Default)]
pub struct FixtureSource {
    entries: BTreeMap<EntityId, FixtureEntry>,
}

impl FixtureSource {
    pub fn from_json(text: &str) -> Result<Self, FixtureError> {
        let raw: BTreeMap<String, FixtureEntry> = serde_json::from_str(text)?;
        let mut entries = BTreeMap::new();
        for (k, v) in raw {
            let id = k.parse().map_err(|_| FixtureError::BadKey(k.clone()))?;
            entries.insert(id, v);
        }
        Ok(Self { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self, FixtureError> {
        let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// The fixture shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_FIXTURE).expect("bundled fixture is valid")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.entries.keys().copied()
    }
}

impl EntitySource for FixtureSource {
    fn fetch(&self, id: EntityId, language: &str) -> Result<EntitySummary, LookupError> {
        let e = self.entries.get(&id).ok_or(LookupError::NotFound(id))?;
        Ok(EntitySummary {
            id,
            label: e.label.clone(),
            description: e.description.clone(),
            language: language.to_string(),
        })
    }
}

/// Live lookups against the `wbgetentities` endpoint.
///
/// Requests are spaced at least [`MIN_REQUEST_SPACING`] apart and capped per
/// process. Uses a blocking client; call from a blocking context.
pub struct HttpSource {
    client: reqwest::blocking::Client,
    endpoint: String,
    cap: usize,
    sent: AtomicUsize,
    last: Mutex<Option<Instant>>,
}

impl HttpSource {
    pub fn new() -> Result<Self, LookupError> {
        Self::with_endpoint(DEFAULT_ENDPOINT, DEFAULT_REQUEST_CAP)
    }

    pub fn with_endpoint(endpoint: &str, cap: usize) -> Result<Self, LookupError> {
        let client = reqwest::blocking::Client::builder()
            .user_agent(USER_AGENT)
            .timeout(Duration::from_secs(10))
            .build()
            .map_err(|e| LookupError::Network(e.to_string()))?;
        Ok(Self {
            client,
            endpoint: endpoint.to_string(),
            cap,
            sent: AtomicUsize::new(0),
            last: Mutex::new(None),
        })
    }

    pub fn requests_sent(&self) -> usize {
        self.sent.load(Ordering::SeqCst)
    }

    fn throttle(&self) -> Result<(), LookupError> {
        let mut last = self.last.lock().unwrap_or_else(|p| p.into_inner());
        if self.sent.load(Ordering::SeqCst) >= self.cap {
            return Err(LookupError::BudgetExhausted(self.cap));
        }
        if let Some(t) = *last {
            let since = t.elapsed();
            if since < MIN_REQUEST_SPACING {
                std::thread::sleep(MIN_REQUEST_SPACING - since);
            }
        }
        *last = Some(Instant::now());
        self.sent.fetch_add(1, Ordering::SeqCst);
        Ok(())
    }
}

impl EntitySource for HttpSource {
    fn fetch(&self, id: EntityId, language: &str) -> Result<EntitySummary, LookupError> {
        self.throttle()?;
        let languages = if language == "en" {
            "en".to_string()
        } else {
            format!("{language}|en")
        };
        let ids = id.to_string();
        log::debug!("wikidata lookup {ids} ({languages})");
        let body: serde_json::Value = self
            .client
            .get(&self.endpoint)
            .query(&[
                ("action", "wbgetentities"),
                ("format", "json"),
                ("props", "labels|descriptions"),
                ("ids", ids.as_str()),
                ("languages", languages.as_str()),
            ])
            .send()
            .and_then(|r| r.error_for_status())
            .and_then(|r| r.json())
            .map_err(|e| LookupError::Network(e.to_string()))?;
        parse_entities_response(&body, id, language)
    }
}

/// Extracts a summary from a `wbgetentities` JSON body, preferring
/// `language` and falling back to English.
pub fn parse_entities_response(
    body: &serde_json::Value,
    id: EntityId,
    language: &str,
) -> Result<EntitySummary, LookupError> {
    if let Some(err) = body.get("error") {
        let code = err.get("code").and_then(|c| c.as_str()).unwrap_or("");
        if code == "no-such-entity" {
            return Err(LookupError::NotFound(id));
        }
        return Err(LookupError::Network(format!("api error {code}")));
    }
    let key = id.to_string();
    let entity = body
        .get("entities")
        .and_then(|e| e.get(&key))
        .ok_or_else(|| LookupError::Network("response lacks the requested entity".into()))?;
    if entity.get("missing").is_some() {
        return Err(LookupError::NotFound(id));
    }
    let pick = |field: &str| -> Option<(String, String)> {
        let values = entity.get(field)?;
        [language, "en"].into_iter().find_map(|lang| {
            values
                .get(lang)
                .and_then(|v| v.get("value"))
                .and_then(|v| v.as_str())
                .map(|s| (s.to_string(), lang.to_string()))
        })
    };
    let (label, label_lang) = pick("labels")
        .filter(|(l, _)| !l.is_empty())
        .ok_or(LookupError::NotFound(id))?;
    let description = pick("descriptions").map(|(d, _)| d).unwrap_or_default();
    Ok(EntitySummary {
        id,
        label,
        description,
        language: label_lang,
    })
}

type Cell = Arc<Mutex<Option<Result<EntitySummary, LookupError>>>>;

/// Caching front for an [`EntitySource`].
///
/// Answers are kept per `(id, language)` for the client's lifetime and, when
/// a directory is configured, on disk. Concurrent lookups of one key wait for
/// a single fetch. Transient failures are returned but not remembered.
pub struct WikidataClient {
    source: Box<dyn EntitySource>,
    cache: RwLock<HashMap<(EntityId, String), Cell>>,
    disk: Option<PathBuf>,
}

impl WikidataClient {
    pub fn new(source: impl EntitySource + 'static) -> Self {
        Self {
            source: Box::new(source),
            cache: RwLock::new(HashMap::new()),
            disk: None,
        }
    }

    pub fn fixture() -> Self {
        Self::new(FixtureSource::bundled())
    }

    pub fn with_disk_cache(mut self, dir: impl Into<PathBuf>) -> Self {
        self.disk = Some(dir.into());
        self
    }

    fn cell(&self, key: &(EntityId, String)) -> Cell {
        if let Some(c) = self.cache.read().unwrap_or_else(|p| p.into_inner()).get(key) {
            return c.clone();
        }
        self.cache
            .write()
            .unwrap_or_else(|p| p.into_inner())
            .entry(key.clone())
            .or_default()
            .clone()
    }

    fn disk_path(&self, id: EntityId, language: &str) -> Option<PathBuf> {
        let safe: String = language
            .chars()
            .filter(|c| c.is_ascii_alphanumeric() || *c == '-')
            .collect();
        self.disk.as_ref().map(|d| d.join(format!("{id}-{safe}.json")))
    }

    fn read_disk(&self, id: EntityId, language: &str) -> Option<EntitySummary> {
        let text = std::fs::read_to_string(self.disk_path(id, language)?).ok()?;
        serde_json::from_str(&text).ok()
    }

    fn write_disk(&self, summary: &EntitySummary, language: &str) {
        let Some(path) = self.disk_path(summary.id, language) else {
            return;
        };
        let written = path
            .parent()
            .map_or(Ok(()), std::fs::create_dir_all)
            .and_then(|_| std::fs::write(&path, serde_json::to_vec(summary).unwrap_or_default()));
        if let Err(e) = written {
            log::warn!("cannot write cache entry {}: {e}", path.display());
        }
    }

    pub fn fetch_entity_summary(&self, id: EntityId, language: &str) -> Result<EntitySummary, LookupError> {
        let key = (id, language.to_string());
        let cell = self.cell(&key);
        let mut slot = cell.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(done) = slot.as_ref() {
            return done.clone();
        }
        if let Some(hit) = self.read_disk(id, language) {
            *slot = Some(Ok(hit.clone()));
            return Ok(hit);
        }
        let result = self.source.fetch(id, language);
        match &result {
            Ok(summary) => {
                self.write_disk(summary, language);
                *slot = Some(result.clone());
            }
            Err(e) if !e.is_transient() => *slot = Some(result.clone()),
            Err(_) => {}
        }
        result
    }

    /// Resolves a schema term to tooltip text. `Ok(None)` when the term is
    /// not a Wikidata term.
    pub fn tooltip_for_term(&self, term: &str, language: &str) -> Result<Option<String>, LookupError> {
        match extract_entity_id(term) {
            None => Ok(None),
            Some(id) => self.fetch_entity_summary(id, language).map(|s| Some(tooltip_text(&s))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;
    use std::thread;

    struct Counting<S> {
        inner: S,
        calls: Arc<AtomicUsize>,
        delay: Duration,
        fail_first: bool,
    }

    impl<S: EntitySource> EntitySource for Counting<S> {
        fn fetch(&self, id: EntityId, language: &str) -> Result<EntitySummary, LookupError> {
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            thread::sleep(self.delay);
            if self.fail_first && n == 0 {
                return Err(LookupError::Network("connection reset".into()));
            }
            self.inner.fetch(id, language)
        }
    }

    fn counting(delay_ms: u64, fail_first: bool) -> (WikidataClient, Arc<AtomicUsize>) {
        let calls = Arc::new(AtomicUsize::new(0));
        let src = Counting {
            inner: FixtureSource::bundled(),
            calls: calls.clone(),
            delay: Duration::from_millis(delay_ms),
            fail_first,
        };
        (WikidataClient::new(src), calls)
    }

    #[test]
    fn extraction_examples() {
        assert_eq!(extract_entity_id("wd:Q42944"), Some(EntityId::item(42944)));
        assert_eq!(extract_entity_id("xsd:string"), None);
        assert_eq!(
            extract_entity_id("http://www.wikidata.org/prop/direct/P31"),
            Some(EntityId::property(31))
        );
        assert_eq!(extract_entity_id("wdt:P31"), Some(EntityId::property(31)));
        assert_eq!(extract_entity_id("p:P279"), Some(EntityId::property(279)));
        assert_eq!(extract_entity_id("ps:P279"), Some(EntityId::property(279)));
        assert_eq!(extract_entity_id("@wd:Q5"), Some(EntityId::item(5)));
        assert_eq!(
            extract_entity_id("<http://www.wikidata.org/entity/Q42944>"),
            Some(EntityId::item(42944))
        );
        assert_eq!(
            extract_entity_id("https://www.wikidata.org/wiki/Property:P31"),
            Some(EntityId::property(31))
        );
        assert_eq!(extract_entity_id("https://www.wikidata.org/wiki/Q42944"), Some(EntityId::item(42944)));
        assert_eq!(extract_entity_id("wdt:Q5"), None);
        assert_eq!(extract_entity_id("wd:Q0"), None);
        assert_eq!(extract_entity_id("wd:Q012"), None);
        assert_eq!(extract_entity_id("wd:"), None);
        assert_eq!(extract_entity_id(":Q42"), None);
        assert_eq!(extract_entity_id("http://example.org/entity/Q42"), None);
    }

    #[test]
    fn entity_id_round_trips_through_text() {
        let id: EntityId = "P2176".parse().unwrap();
        assert_eq!(id.to_string(), "P2176");
        assert_eq!(serde_json::to_string(&id).unwrap(), "\"P2176\"");
        assert!("X1".parse::<EntityId>().is_err());
    }

    #[test]
    fn tooltip_format() {
        let s = EntitySummary {
            id: EntityId::item(42944),
            label: "CERN".into(),
            description: "intergovernmental organization".into(),
            language: "en".into(),
        };
        assert_eq!(tooltip_text(&s), "CERN: intergovernmental organization");
        let bare = EntitySummary { description: String::new(), ..s };
        assert_eq!(tooltip_text(&bare), "CERN");
    }

    #[test]
    fn fixture_lookups() {
        let c = WikidataClient::fixture();
        let cern = c.fetch_entity_summary(EntityId::item(42944), "en").unwrap();
        assert_eq!(cern.label, "CERN");
        let p31 = c.tooltip_for_term("wdt:P31", "en").unwrap().unwrap();
        assert!(p31.starts_with("instance of"));
        assert_eq!(
            c.fetch_entity_summary(EntityId::item(1), "en"),
            Err(LookupError::NotFound(EntityId::item(1)))
        );
        assert_eq!(c.tooltip_for_term("xsd:string", "en"), Ok(None));
    }

    #[test]
    fn second_call_served_from_cache() {
        let (c, calls) = counting(0, false);
        let a = c.fetch_entity_summary(EntityId::item(42944), "en").unwrap();
        let b = c.fetch_entity_summary(EntityId::item(42944), "en").unwrap();
        assert_eq!(a, b);
        assert_eq!(calls.load(Ordering::SeqCst), 1);
        // Not-found answers are remembered too.
        let _ = c.fetch_entity_summary(EntityId::item(1), "en");
        let _ = c.fetch_entity_summary(EntityId::item(1), "en");
        assert_eq!(calls.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn transient_failures_are_not_cached() {
        let (c, calls) = counting(0, true);
        assert!(matches!(
            c.fetch_entity_summary(EntityId::item(42944), "en"),
            Err(LookupError::Network(_))
        ));
        assert_eq!(c.fetch_entity_summary(EntityId::item(42944), "en").unwrap().label, "CERN");
        assert_eq!(calls.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn concurrent_lookups_are_coalesced() {
        let (c, calls) = counting(50, false);
        let c = Arc::new(c);
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let c = c.clone();
                thread::spawn(move || c.fetch_entity_summary(EntityId::item(42944), "en").unwrap())
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap().label, "CERN");
        }
        assert_eq!(calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn disk_cache_survives_a_new_client() {
        let dir = tempfile::tempdir().unwrap();
        let (c, _) = counting(0, false);
        let c = c.with_disk_cache(dir.path());
        c.fetch_entity_summary(EntityId::item(42944), "en").unwrap();

        let (fresh, calls) = counting(0, false);
        let fresh = fresh.with_disk_cache(dir.path());
        assert_eq!(fresh.fetch_entity_summary(EntityId::item(42944), "en").unwrap().label, "CERN");
        assert_eq!(calls.load(Ordering::SeqCst), 0);
    }

    #[test]
    fn response_parsing() {
        let id = EntityId::item(42944);
        let body = json!({"entities": {"Q42944": {
            "labels": {"en": {"language": "en", "value": "CERN"}},
            "descriptions": {"en": {"language": "en", "value": "intergovernmental organization"}}
        }}});
        let s = parse_entities_response(&body, id, "de").unwrap();
        assert_eq!((s.label.as_str(), s.language.as_str()), ("CERN", "en"));

        let localized = json!({"entities": {"Q42944": {
            "labels": {"fr": {"value": "Organisation européenne pour la recherche nucléaire"}, "en": {"value": "CERN"}}
        }}});
        let s = parse_entities_response(&localized, id, "fr").unwrap();
        assert_eq!(s.language, "fr");
        assert_eq!(s.description, "");

        let missing = json!({"entities": {"Q42944": {"id": "Q42944", "missing": ""}}});
        assert_eq!(parse_entities_response(&missing, id, "en"), Err(LookupError::NotFound(id)));
        let err = json!({"error": {"code": "no-such-entity"}});
        assert_eq!(parse_entities_response(&err, id, "en"), Err(LookupError::NotFound(id)));
        let other = json!({"error": {"code": "maxlag"}});
        assert!(matches!(parse_entities_response(&other, id, "en"), Err(LookupError::Network(_))));
    }

    #[test]
    fn http_source_reports_unreachable_endpoint_as_network_error() {
        let src = HttpSource::with_endpoint("http://127.0.0.1:9/w/api.php", 1).unwrap();
        assert!(matches!(src.fetch(EntityId::item(42944), "en"), Err(LookupError::Network(_))));
        assert_eq!(
            src.fetch(EntityId::item(42944), "en"),
            Err(LookupError::BudgetExhausted(1))
        );
        assert_eq!(src.requests_sent(), 1);
    }
}
