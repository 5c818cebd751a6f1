//! Flights, schedules and the interval analytics built on buffer-locked
//! occupation windows.
//!
//! Times are integer minutes since midnight of day 0. The horizon covers two
//! days so that late arrivals may depart after midnight without wraparound.

use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Integer minutes since midnight of day 0.
pub type Minutes = i64;

/// Last representable minute of the two-day horizon.
pub const HORIZON_END: Minutes = 2879;

/// Header line emitted by [`Schedule::to_csv`] and accepted by [`parse_schedule`].
pub const SCHEDULE_HEADER: &str = "flight_id,arrival,departure";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("flight id must not be empty")]
    EmptyId,
    #[error("flight {id}: departure before arrival ({arrival} >= {departure})")]
    DepartureBeforeArrival {
        id: String,
        arrival: Minutes,
        departure: Minutes,
    },
    #[error("flight {id}: times outside horizon [0, {HORIZON_END}]")]
    OutOfHorizon { id: String },
    #[error("duplicate flight id {0}")]
    DuplicateId(String),
    #[error("{message}, line {line}")]
    Parse { line: usize, message: String },
    #[error("invalid generator parameter: {0}")]
    Parameter(String),
}

/// One aircraft's scheduled stay at the airport.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flight {
    id: String,
    arrival: Minutes,
    departure: Minutes,
}

impl Flight {
    pub fn new(
        id: impl Into<String>,
        arrival: Minutes,
        departure: Minutes,
    ) -> Result<Self, ScheduleError> {
        let id = id.into();
        if id.is_empty() {
            return Err(ScheduleError::EmptyId);
        }
        if departure <= arrival {
            return Err(ScheduleError::DepartureBeforeArrival {
                id,
                arrival,
                departure,
            });
        }
        if arrival < 0 || departure > HORIZON_END {
            return Err(ScheduleError::OutOfHorizon { id });
        }
        Ok(Self {
            id,
            arrival,
            departure,
        })
    }

    #[inline]
    pub fn id(&self) -> &str {
        &self.id
    }

    #[inline]
    pub fn arrival(&self) -> Minutes {
        self.arrival
    }

    #[inline]
    pub fn departure(&self) -> Minutes {
        self.departure
    }

    /// Gate locking window `[arrival - buffer, departure + buffer]`.
    #[inline]
    pub fn locked_interval(&self, buffer: Minutes) -> LockedInterval {
        LockedInterval {
            start: self.arrival - buffer,
            end: self.departure + buffer,
        }
    }

    /// Chronological order used everywhere a gate's flights are sequenced:
    /// arrival, then departure, then id.
    pub fn chronological_cmp(&self, other: &Flight) -> std::cmp::Ordering {
        self.arrival
            .cmp(&other.arrival)
            .then(self.departure.cmp(&other.departure))
            .then_with(|| self.id.cmp(&other.id))
    }
}

impl fmt::Display for Flight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}, {}]", self.id, self.arrival, self.departure)
    }
}

/// Closed time interval during which a gate is reserved for one flight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LockedInterval {
    pub start: Minutes,
    pub end: Minutes,
}

impl LockedInterval {
    /// Closed-interval intersection test. Touching endpoints intersect.
    #[inline]
    pub fn intersects(&self, other: &LockedInterval) -> bool {
        self.start.max(other.start) <= self.end.min(other.end)
    }
}

/// Locked interval of `flight` under `buffer`. The start may be negative.
#[inline]
pub fn locked_interval(flight: &Flight, buffer: Minutes) -> LockedInterval {
    flight.locked_interval(buffer)
}

/// True when the two flights cannot share a gate under `buffer`.
#[inline]
pub fn overlaps(f: &Flight, g: &Flight, buffer: Minutes) -> bool {
    f.locked_interval(buffer)
        .intersects(&g.locked_interval(buffer))
}

/// Ordered collection of flights with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schedule {
    flights: Vec<Flight>,
}

impl Schedule {
    pub fn new(flights: Vec<Flight>) -> Result<Self, ScheduleError> {
        let mut seen = HashSet::with_capacity(flights.len());
        for f in &flights {
            if !seen.insert(f.id.as_str()) {
                return Err(ScheduleError::DuplicateId(f.id.clone()));
            }
        }
        Ok(Self { flights })
    }

    #[inline]
    pub fn flights(&self) -> &[Flight] {
        &self.flights
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.flights.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.flights.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Flight> {
        self.flights.get(index)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.flights.iter().position(|f| f.id == id)
    }

    /// Flight indices sorted by [`Flight::chronological_cmp`].
    pub fn chronological_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.flights.len()).collect();
        order.sort_by(|&a, &b| self.flights[a].chronological_cmp(&self.flights[b]));
        order
    }

    /// Serializes to the schedule CSV format with integer-minute times.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.flights.len() + 1));
        out.push_str(SCHEDULE_HEADER);
        out.push('\n');
        for f in &self.flights {
            out.push_str(&format!("{},{},{}\n", f.id, f.arrival, f.departure));
        }
        out
    }
}

fn parse_time(field: &str) -> Option<Minutes> {
    if let Some((h, m)) = field.split_once(':') {
        if h.is_empty() || h.len() > 2 || m.len() != 2 {
            return None;
        }
        if !h.bytes().all(|c| c.is_ascii_digit()) || !m.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let h: Minutes = h.parse().ok()?;
        let m: Minutes = m.parse().ok()?;
        // hours past 23 express next-day departures
        if m > 59 || h > 47 {
            return None;
        }
        Some(h * 60 + m)
    } else {
        if field.is_empty() || !field.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        field.parse().ok()
    }
}

/// Parses the schedule CSV format: optional `flight_id,arrival,departure`
/// header, `#` comments, blank lines, times as `HH:MM` or integer minutes.
pub fn parse_schedule(text: &str) -> Result<Schedule, ScheduleError> {
    let mut flights = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut header_allowed = true;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if header_allowed && fields.first() == Some(&"flight_id") {
            header_allowed = false;
            continue;
        }
        header_allowed = false;

        let err = |message: String| ScheduleError::Parse {
            line: line_no,
            message,
        };
        if fields.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        }
        let id = fields[0];
        if id.is_empty() {
            return Err(err("empty flight id".into()));
        }
        let arrival =
            parse_time(fields[1]).ok_or_else(|| err(format!("malformed time {:?}", fields[1])))?;
        let departure =
            parse_time(fields[2]).ok_or_else(|| err(format!("malformed time {:?}", fields[2])))?;
        if departure <= arrival {
            return Err(err("departure before arrival".into()));
        }
        if departure > HORIZON_END {
            return Err(err(format!("departure beyond horizon {HORIZON_END}")));
        }
        if !seen.insert(id.to_string()) {
            return Err(err(format!("duplicate flight id {id}")));
        }
        flights.push(Flight {
            id: id.to_string(),
            arrival,
            departure,
        });
    }
    Ok(Schedule { flights })
}

/// Synthetic timetable: `count` flights with arrivals uniform on
/// `[day_start, day_end]` and a fixed `stay`. Flights are labelled
/// `G0001..` in arrival order.
pub fn generate_schedule(
    count: usize,
    day_start: Minutes,
    day_end: Minutes,
    stay: Minutes,
    seed: u64,
) -> Result<Schedule, ScheduleError> {
    if count == 0 {
        return Err(ScheduleError::Parameter("count must be positive".into()));
    }
    if stay <= 0 {
        return Err(ScheduleError::Parameter("stay must be positive".into()));
    }
    if day_start < 0 || day_start >= day_end {
        return Err(ScheduleError::Parameter(
            "require 0 <= day_start < day_end".into(),
        ));
    }
    if day_end + stay > HORIZON_END {
        return Err(ScheduleError::Parameter(format!(
            "day_end + stay exceeds horizon {HORIZON_END}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arrivals: Vec<Minutes> = (0..count)
        .map(|_| rng.random_range(day_start..=day_end))
        .collect();
    arrivals.sort_unstable();

    let width = count.to_string().len().max(4);
    let flights = arrivals
        .into_iter()
        .enumerate()
        .map(|(i, arrival)| Flight {
            id: format!("G{:0width$}", i + 1),
            arrival,
            departure: arrival + stay,
        })
        .collect();
    Ok(Schedule { flights })
}

/// Maximum number of locked intervals covering a common instant. Equals the
/// smallest gate count admitting a conflict-free assignment.
pub fn min_gates_required(schedule: &Schedule, buffer: Minutes) -> usize {
    // (time, kind): starts sort before ends at equal time so touching
    // intervals count as simultaneous.
    let mut events: Vec<(Minutes, u8)> = Vec::with_capacity(2 * schedule.len());
    for f in schedule.flights() {
        let iv = f.locked_interval(buffer);
        events.push((iv.start, 0));
        events.push((iv.end, 1));
    }
    events.sort_unstable();

    let mut active = 0usize;
    let mut peak = 0usize;
    for (_, kind) in events {
        if kind == 0 {
            active += 1;
            peak = peak.max(active);
        } else {
            active -= 1;
        }
    }
    peak
}

/// `index,arrival` CSV (1-based index) for arrival-time scatter plots.
pub fn scatter_export(schedule: &Schedule) -> String {
    let mut out = String::from("index,arrival\n");
    for (i, f) in schedule.flights().iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, f.arrival));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fl(id: &str, a: Minutes, d: Minutes) -> Flight {
        Flight::new(id, a, d).unwrap()
    }

    #[test]
    fn parse_clock_and_integer_forms() {
        let s = parse_schedule("F1,06:30,07:30").unwrap();
        assert_eq!(s.flights(), &[fl("F1", 390, 450)]);
        let s = parse_schedule("F1,390,450").unwrap();
        assert_eq!(s.flights(), &[fl("F1", 390, 450)]);
    }

    #[test]
    fn parse_rejects_reversed_times_with_line() {
        let err = parse_schedule("F1,07:30,06:30").unwrap_err();
        assert_eq!(err.to_string(), "departure before arrival, line 1");
        let err = parse_schedule("# c\n\nF1,1,2\nF2,5,5\n").unwrap_err();
        assert_eq!(
            err,
            ScheduleError::Parse {
                line: 4,
                message: "departure before arrival".into()
            }
        );
    }

    #[test]
    fn parse_header_comments_crlf() {
        let text = "flight_id,arrival,departure\r\n# morning\r\nA,06:00,07:00\r\n\r\nB,420,481\r\n";
        let s = parse_schedule(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.flights()[1], fl("B", 420, 481));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_schedule("A,6:0,07:00"),
            Err(ScheduleError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_schedule("A,x,07:00"),
            Err(ScheduleError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_schedule("A,1,2\nA,3,4"),
            Err(ScheduleError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_schedule("A,1,2,3"),
            Err(ScheduleError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_schedule("A,1,2880"),
            Err(ScheduleError::Parse { line: 1, .. })
        ));
        // a header is only recognised before the first data row
        assert!(parse_schedule("A,1,2\nflight_id,arrival,departure").is_err());
    }

    #[test]
    fn overnight_clock_time() {
        let s = parse_schedule("R1,23:30,24:30").unwrap();
        assert_eq!(s.flights()[0].departure(), 1470);
    }

    #[test]
    fn flight_invariants() {
        assert_eq!(Flight::new("", 1, 2), Err(ScheduleError::EmptyId));
        assert!(Flight::new("a", 2, 2).is_err());
        assert!(Flight::new("a", -1, 2).is_err());
        assert!(Schedule::new(vec![fl("a", 1, 2), fl("a", 3, 4)]).is_err());
    }

    #[test]
    fn locked_interval_examples() {
        let iv = locked_interval(&fl("f", 390, 450), 15);
        assert_eq!((iv.start, iv.end), (375, 465));
        let iv = locked_interval(&fl("f", 10, 70), 15);
        assert_eq!((iv.start, iv.end), (-5, 85));
        let iv = locked_interval(&fl("f", 390, 450), 0);
        assert_eq!((iv.start, iv.end), (390, 450));
    }

    #[test]
    fn overlap_examples() {
        let f = fl("f", 0, 60);
        assert!(!overlaps(&f, &fl("g", 120, 180), 15));
        assert!(overlaps(&f, &fl("g", 80, 140), 15));
        // touching at 75
        assert!(overlaps(&f, &fl("g", 90, 150), 15));
        assert!(!overlaps(&f, &fl("g", 91, 150), 15));
    }

    #[test]
    fn min_gates_examples() {
        let clique = Schedule::new(vec![fl("a", 0, 60), fl("b", 10, 70), fl("c", 20, 80)]).unwrap();
        assert_eq!(min_gates_required(&clique, 15), 3);
        let chain =
            Schedule::new(vec![fl("a", 0, 60), fl("b", 120, 180), fl("c", 240, 300)]).unwrap();
        assert_eq!(min_gates_required(&chain, 15), 1);
        assert_eq!(min_gates_required(&chain, 30), 2);
        assert_eq!(min_gates_required(&Schedule::default(), 15), 0);
    }

    #[test]
    fn generator_contract() {
        let s = generate_schedule(996, 360, 1439, 60, 7).unwrap();
        assert_eq!(s.len(), 996);
        assert!(s
            .flights()
            .iter()
            .all(|f| f.departure() - f.arrival() == 60));
        assert!(s
            .flights()
            .iter()
            .all(|f| (360..=1439).contains(&f.arrival())));
        assert_eq!(s.flights()[0].id(), "G0001");
        assert_eq!(s.flights()[995].id(), "G0996");
        assert!(s
            .flights()
            .windows(2)
            .all(|w| w[0].arrival() <= w[1].arrival()));

        assert_eq!(
            generate_schedule(1, 360, 1439, 60, 3).unwrap(),
            generate_schedule(1, 360, 1439, 60, 3).unwrap()
        );
        assert_ne!(
            generate_schedule(5, 360, 1439, 60, 1).unwrap(),
            generate_schedule(5, 360, 1439, 60, 2).unwrap()
        );
    }

    #[test]
    fn generator_rejects_bad_parameters() {
        assert!(generate_schedule(5, 360, 1439, 0, 1).is_err());
        assert!(generate_schedule(5, 360, 2850, 60, 1).is_err());
        assert!(generate_schedule(5, 500, 400, 60, 1).is_err());
        assert!(generate_schedule(0, 360, 1439, 60, 1).is_err());
    }

    #[test]
    fn scatter_examples() {
        let s = Schedule::new(vec![fl("a", 390, 450)]).unwrap();
        assert_eq!(scatter_export(&s), "index,arrival\n1,390\n");
        assert_eq!(scatter_export(&Schedule::default()), "index,arrival\n");
        let big = generate_schedule(996, 360, 1439, 60, 7).unwrap();
        assert_eq!(scatter_export(&big).lines().count(), 997);
    }
}
