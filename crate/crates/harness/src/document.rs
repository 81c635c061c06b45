//! The `avauction-instance v1` text format.
//!
//! ```text
//! avauction-instance v1
//! # comments and blank lines are ignored
//! capacity 5
//! requested_seats 3
//! service splittable
//! bidder A available 5 prices 1:0.40 2:0.70 3:0.90 4:1.05 5:1.15
//! bidder B available 3 concave prices 1:0.30 2:0.55 3:0.78
//! ```
//!
//! An optional `provenance <text>` line records how a generated file was
//! produced. Prices are decimal strings with at most six fractional digits.

use std::fmt::Write as _;

use avauction_core::{
    money_from_decimal, AuctionInstance, BidderId, RawInstance, RawSchedule, ServiceType,
};
use thiserror::Error;

pub const HEADER: &str = "avauction-instance";
pub const VERSION: &str = "v1";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing `{HEADER} {VERSION}` header")]
    MissingHeader,
    #[error("unsupported document version `{0}`")]
    UnsupportedVersion(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `{0}` field")]
    MissingField(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDocument {
    pub instance: RawInstance,
    pub provenance: Option<String>,
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_u32(token: Option<&str>, line: usize, what: &str) -> Result<u32, ParseError> {
    let token = token.ok_or_else(|| syntax(line, format!("expected {what}")))?;
    token
        .parse()
        .map_err(|_| syntax(line, format!("`{token}` is not a valid {what}")))
}

pub fn parse_instance(text: &str) -> Result<InstanceDocument, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (_, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let mut head = header.split_whitespace();
    if head.next() != Some(HEADER) {
        return Err(ParseError::MissingHeader);
    }
    match head.next() {
        Some(VERSION) => {}
        Some(other) => return Err(ParseError::UnsupportedVersion(other.into())),
        None => return Err(ParseError::UnsupportedVersion(String::new())),
    }

    let mut capacity = None;
    let mut requested = None;
    let mut service = None;
    let mut provenance = None;
    let mut bids = Vec::new();

    for (n, line) in lines {
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "capacity" => capacity = Some(parse_u32(Some(rest), n, "capacity")?),
            "requested_seats" => requested = Some(parse_u32(Some(rest), n, "seat count")?),
            "service" => {
                service = Some(
                    rest.parse::<ServiceType>()
                        .map_err(|e| syntax(n, e.to_string()))?,
                )
            }
            "provenance" => provenance = Some(rest.to_string()),
            "bidder" => bids.push(parse_bidder(rest, n)?),
            other => return Err(syntax(n, format!("unknown field `{other}`"))),
        }
    }

    Ok(InstanceDocument {
        instance: RawInstance {
            capacity: capacity.ok_or(ParseError::MissingField("capacity"))?,
            requested_seats: requested.ok_or(ParseError::MissingField("requested_seats"))?,
            service: service.ok_or(ParseError::MissingField("service"))?,
            bids,
        },
        provenance,
    })
}

fn parse_bidder(rest: &str, n: usize) -> Result<RawSchedule, ParseError> {
    let mut tokens = rest.split_whitespace();
    let id = tokens
        .next()
        .ok_or_else(|| syntax(n, "expected bidder id"))?;
    if tokens.next() != Some("available") {
        return Err(syntax(n, "expected `available`"));
    }
    let available = parse_u32(tokens.next(), n, "seat count")?;
    let mut concave = false;
    match tokens.next() {
        Some("concave") => {
            concave = true;
            if tokens.next() != Some("prices") {
                return Err(syntax(n, "expected `prices`"));
            }
        }
        Some("prices") => {}
        _ => return Err(syntax(n, "expected `prices`")),
    }
    let mut prices = Vec::new();
    for entry in tokens {
        let (size, price) = entry
            .split_once(':')
            .ok_or_else(|| syntax(n, format!("`{entry}` is not size:price")))?;
        let size = parse_u32(Some(size), n, "size")?;
        let price = money_from_decimal(price).map_err(|e| syntax(n, e.to_string()))?;
        prices.push((size, price));
    }
    Ok(RawSchedule {
        bidder: BidderId::new(id),
        available_seats: available,
        prices,
        concave,
    })
}

/// Serialises a validated instance; parsing the output yields the same
/// instance.
pub fn write_instance(instance: &AuctionInstance, provenance: Option<&str>) -> String {
    let mut out = format!("{HEADER} {VERSION}\n");
    if let Some(p) = provenance {
        let _ = writeln!(out, "provenance {p}");
    }
    let _ = writeln!(out, "capacity {}", instance.capacity());
    let _ = writeln!(out, "requested_seats {}", instance.requested_seats());
    let _ = writeln!(out, "service {}", instance.service());
    for bid in instance.bids() {
        let _ = write!(
            out,
            "bidder {} available {}",
            bid.bidder(),
            bid.available_seats()
        );
        if bid.is_concave() {
            out.push_str(" concave");
        }
        out.push_str(" prices");
        for (size, price) in bid.iter() {
            let _ = write!(out, " {size}:{price}");
        }
        out.push('\n');
    }
    out
}
