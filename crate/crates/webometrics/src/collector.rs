//! Execution of query plans against pluggable search drivers, with a global
//! politeness gate, retries, and replay of recorded responses.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::Duration;

use chrono::{DateTime, TimeZone, Utc};
use rand::RngCore;
use regex::Regex;
use std::sync::OnceLock;
use thiserror::Error;

use crate::model::{HitCount, Region};
use crate::queryplan::{build_query, Engine, QueryPlanError, QuerySpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CollectorError {
    #[error("invalid collector config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Query(#[from] QueryPlanError),
    #[error("duplicate recording for {query:?} ({region}, {engine})")]
    DuplicateRecording {
        query: String,
        region: Region,
        engine: Engine,
    },
    #[error("unparseable SERP")]
    UnparseableSerp,
}

/// A transient driver failure; retried up to the configured limit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("driver failure: {0}")]
pub struct DriverError(pub String);

/// What a driver returned for one query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DriverReply {
    Count {
        value: u64,
        /// When the observation was made; replay drivers supply the
        /// original recording time.
        retrieved_at: Option<DateTime<Utc>>,
    },
    /// The driver has no answer for this query (replay only).
    NoRecording,
}

/// A search engine client. Implementations must be safe to call from a
/// single executor; politeness is enforced by the executor, not the driver.
pub trait SearchDriver {
    fn fetch(
        &self,
        query: &str,
        region: Region,
        engine: Engine,
    ) -> Result<DriverReply, DriverError>;

    /// Whether the politeness gate applies. Replay drivers hit no live
    /// service and opt out.
    fn rate_limited(&self) -> bool {
        true
    }
}

/// Time source, injectable so politeness timing is testable.
pub trait Clock {
    fn now(&self) -> DateTime<Utc>;
    fn sleep(&self, duration: Duration);
}

/// Wall-clock time and real sleeping.
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }

    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

/// A manually advanced clock; sleeping advances it instantly.
#[derive(Clone)]
pub struct MockClock(std::sync::Arc<Mutex<DateTime<Utc>>>);

impl MockClock {
    pub fn new(start: DateTime<Utc>) -> MockClock {
        MockClock(std::sync::Arc::new(Mutex::new(start)))
    }

    pub fn at_epoch() -> MockClock {
        MockClock::new(Utc.timestamp_opt(0, 0).unwrap())
    }
}

impl Clock for MockClock {
    fn now(&self) -> DateTime<Utc> {
        *self.0.lock().unwrap()
    }

    fn sleep(&self, duration: Duration) {
        let mut now = self.0.lock().unwrap();
        *now += chrono::Duration::from_std(duration).expect("duration in range");
    }
}

/// Politeness and retry settings for plan execution.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectorConfig {
    /// Minimum delay between consecutive requests.
    pub min_interval: Duration,
    /// Relative jitter applied to the delay, in [0, 1].
    pub jitter_fraction: f64,
    pub max_retries: u32,
    /// Region used when a plan is built without an explicit one.
    pub region_default: Region,
}

impl Default for CollectorConfig {
    fn default() -> Self {
        CollectorConfig {
            min_interval: Duration::from_secs(1),
            jitter_fraction: 0.1,
            max_retries: 2,
            region_default: Region::All,
        }
    }
}

impl CollectorConfig {
    pub fn validate(&self) -> Result<(), CollectorError> {
        if self.min_interval.is_zero() {
            return Err(CollectorError::InvalidConfig(
                "min_interval must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.jitter_fraction) {
            return Err(CollectorError::InvalidConfig(format!(
                "jitter_fraction {} outside [0, 1]",
                self.jitter_fraction
            )));
        }
        Ok(())
    }
}

/// Timestamp used for hit counts that no recording backs.
pub fn epoch_sentinel() -> DateTime<Utc> {
    Utc.timestamp_opt(0, 0).unwrap()
}

/// Result of one plan entry.
#[derive(Debug, Clone, PartialEq)]
pub enum CollectionOutcome {
    Hit {
        hit: HitCount,
        /// False when the value is a defaulted 0 because no recording
        /// existed for the query.
        recorded: bool,
    },
    Failed {
        error: String,
        attempts: u32,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectionEntry {
    pub spec: QuerySpec,
    pub query: String,
    pub outcome: CollectionOutcome,
}

impl CollectionEntry {
    pub fn value(&self) -> Option<u64> {
        match &self.outcome {
            CollectionOutcome::Hit { hit, .. } => Some(hit.value),
            CollectionOutcome::Failed { .. } => None,
        }
    }
}

/// Executes a plan in order, one entry per spec.
///
/// Consecutive requests to a rate-limited driver are separated by a jittered
/// delay of at least min_interval * (1 - jitter_fraction). Driver failures
/// are retried with exponential backoff starting at min_interval; once
/// retries are exhausted the entry records the failure and the plan
/// continues.
pub fn execute_plan(
    plan: &[QuerySpec],
    driver: &dyn SearchDriver,
    config: &CollectorConfig,
    clock: &dyn Clock,
    rng: &mut dyn RngCore,
) -> Result<Vec<CollectionEntry>, CollectorError> {
    config.validate()?;
    let gate_active = driver.rate_limited();
    let mut entries = Vec::with_capacity(plan.len());
    for (i, spec) in plan.iter().enumerate() {
        let query = build_query(spec)?;
        if gate_active && i > 0 {
            clock.sleep(jittered(config.min_interval, config.jitter_fraction, rng));
        }
        let mut attempts = 0;
        let outcome = loop {
            attempts += 1;
            match driver.fetch(&query, spec.region, spec.engine) {
                Ok(DriverReply::Count {
                    value,
                    retrieved_at,
                }) => {
                    break CollectionOutcome::Hit {
                        hit: HitCount {
                            query: query.clone(),
                            region: spec.region,
                            value,
                            retrieved_at: retrieved_at.unwrap_or_else(|| clock.now()),
                        },
                        recorded: true,
                    };
                }
                Ok(DriverReply::NoRecording) => {
                    break CollectionOutcome::Hit {
                        hit: HitCount {
                            query: query.clone(),
                            region: spec.region,
                            value: 0,
                            retrieved_at: epoch_sentinel(),
                        },
                        recorded: false,
                    };
                }
                Err(err) => {
                    if attempts > config.max_retries {
                        break CollectionOutcome::Failed {
                            error: err.to_string(),
                            attempts,
                        };
                    }
                    let backoff = config.min_interval.saturating_mul(1 << (attempts - 1));
                    clock.sleep(backoff);
                }
            }
        };
        entries.push(CollectionEntry {
            spec: spec.clone(),
            query,
            outcome,
        });
    }
    Ok(entries)
}

fn jittered(min_interval: Duration, jitter: f64, rng: &mut dyn RngCore) -> Duration {
    let unit = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let factor = 1.0 - jitter + 2.0 * jitter * unit;
    Duration::from_secs_f64(min_interval.as_secs_f64() * factor)
}

/// One recorded engine response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureRecord {
    pub query_string: String,
    pub region: Region,
    pub value: u64,
    pub retrieved_at: DateTime<Utc>,
}

type RecordingMap = BTreeMap<(String, Region), (u64, DateTime<Utc>)>;

fn recording_map(
    records: impl IntoIterator<Item = FixtureRecord>,
    engine: Engine,
) -> Result<RecordingMap, CollectorError> {
    let mut map = BTreeMap::new();
    for r in records {
        let key = (r.query_string.clone(), r.region);
        if map.insert(key, (r.value, r.retrieved_at)).is_some() {
            return Err(CollectorError::DuplicateRecording {
                query: r.query_string,
                region: r.region,
                engine,
            });
        }
    }
    Ok(map)
}

/// Replays recorded responses, one recording set per engine, keyed by
/// (query, region); queries without a recording yield a defaulted zero.
/// Exempt from the politeness gate.
pub struct FixtureDriver {
    general: RecordingMap,
    academic: RecordingMap,
}

impl FixtureDriver {
    pub fn new(
        general: impl IntoIterator<Item = FixtureRecord>,
        academic: impl IntoIterator<Item = FixtureRecord>,
    ) -> Result<Self, CollectorError> {
        Ok(FixtureDriver {
            general: recording_map(general, Engine::GeneralIndex)?,
            academic: recording_map(academic, Engine::AcademicIndex)?,
        })
    }

    /// Recordings for the general index only; academic queries default.
    pub fn general_only(
        records: impl IntoIterator<Item = FixtureRecord>,
    ) -> Result<Self, CollectorError> {
        FixtureDriver::new(records, [])
    }

    pub fn len(&self) -> usize {
        self.general.len() + self.academic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.general.is_empty() && self.academic.is_empty()
    }
}

impl SearchDriver for FixtureDriver {
    fn fetch(
        &self,
        query: &str,
        region: Region,
        engine: Engine,
    ) -> Result<DriverReply, DriverError> {
        let map = match engine {
            Engine::GeneralIndex => &self.general,
            Engine::AcademicIndex => &self.academic,
        };
        match map.get(&(query.to_string(), region)) {
            Some(&(value, retrieved_at)) => Ok(DriverReply::Count {
                value,
                retrieved_at: Some(retrieved_at),
            }),
            None => Ok(DriverReply::NoRecording),
        }
    }

    fn rate_limited(&self) -> bool {
        false
    }
}

/// Returns a constant count and logs each request's clock time; used to
/// test the politeness contract.
pub struct CountingStubDriver<C: Clock> {
    clock: C,
    value: u64,
    calls: Mutex<Vec<DateTime<Utc>>>,
}

impl<C: Clock> CountingStubDriver<C> {
    pub fn new(clock: C, value: u64) -> Self {
        CountingStubDriver {
            clock,
            value,
            calls: Mutex::new(Vec::new()),
        }
    }

    pub fn call_times(&self) -> Vec<DateTime<Utc>> {
        self.calls.lock().unwrap().clone()
    }
}

impl<C: Clock> SearchDriver for CountingStubDriver<C> {
    fn fetch(
        &self,
        _query: &str,
        _region: Region,
        _engine: Engine,
    ) -> Result<DriverReply, DriverError> {
        let now = self.clock.now();
        self.calls.lock().unwrap().push(now);
        Ok(DriverReply::Count {
            value: self.value,
            retrieved_at: Some(now),
        })
    }
}

/// Extracts the hit count estimate from first-results-page text.
///
/// Handles "About 723,000 results", the singular form, explicit no-match
/// pages, and locale variants with dot or space thousands separators
/// ("Yaklaşık 74.200 sonuç").
pub fn parse_hce(serp_text: &str) -> Result<u64, CollectorError> {
    static COUNT: OnceLock<Regex> = OnceLock::new();
    static NO_MATCH: OnceLock<Regex> = OnceLock::new();
    let no_match = NO_MATCH
        .get_or_init(|| Regex::new(r"(?i)did not match any documents|no results found").unwrap());
    if no_match.is_match(serp_text) {
        return Ok(0);
    }
    let count = COUNT.get_or_init(|| {
        Regex::new(r"(?i)([0-9][0-9.,\u{00A0}\u{202F} ]*)\s*(?:results?|sonuç)").unwrap()
    });
    let captures = count
        .captures(serp_text)
        .ok_or(CollectorError::UnparseableSerp)?;
    let digits: String = captures[1].chars().filter(|c| c.is_ascii_digit()).collect();
    digits.parse().map_err(|_| CollectorError::UnparseableSerp)
}
