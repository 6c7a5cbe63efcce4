//! Plain-text profile files.
//!
//! ```text
//! # a comment
//! !seats 3
//! !candidates A B C K L M N
//! 9 : {A B}
//! 1/2 : [C A B]
//! 4 : party P
//! !W 13 : {K L M}
//! ```
//!
//! One ballot group per line: a rational weight, a colon, and a ballot.
//! `{...}` is an unordered set, `[...]` a ranking (most preferred first) and
//! `party NAME` a party vote. `!W` marks the group as part of the designated
//! voter set. `!candidates` declares names that need not appear on a ballot.

use std::collections::BTreeSet;
use std::fmt;

use pithresh_core::{BallotContent, Candidate, Profile, ProfileKind, Rational, WeightedBallot};

/// A parse failure; `line` is 1-based, or 0 for whole-file problems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "profile: {}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

fn names(line: usize, text: &str) -> Result<Vec<Candidate>, ParseError> {
    text.split_whitespace()
        .map(|n| Candidate::new(n).or_else(|_| err(line, format!("invalid candidate name `{n}`"))))
        .collect()
}

fn parse_ballot(line: usize, text: &str) -> Result<BallotContent, ParseError> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix('{') {
        let Some(inner) = inner.strip_suffix('}') else {
            return err(line, "unterminated `{`");
        };
        let list = names(line, inner)?;
        let set: BTreeSet<Candidate> = list.iter().cloned().collect();
        if set.len() != list.len() {
            return err(line, "a candidate appears twice in the ballot");
        }
        return Ok(BallotContent::Unordered(set));
    }
    if let Some(inner) = text.strip_prefix('[') {
        let Some(inner) = inner.strip_suffix(']') else {
            return err(line, "unterminated `[`");
        };
        let list = names(line, inner)?;
        if list.iter().collect::<BTreeSet<_>>().len() != list.len() {
            return err(line, "a candidate is ranked twice");
        }
        return Ok(BallotContent::Ordered(list));
    }
    if let Some(rest) = text.strip_prefix("party") {
        let list = names(line, rest)?;
        return match list.as_slice() {
            [p] if rest.starts_with(char::is_whitespace) => Ok(BallotContent::Party(p.clone())),
            _ => err(line, "expected `party NAME`"),
        };
    }
    err(line, format!("expected `{{...}}`, `[...]` or `party NAME`, found `{text}`"))
}

/// Parse a profile file. `seats` overrides (or stands in for) `!seats`.
pub fn parse_profile(text: &str, seats: Option<usize>) -> Result<Profile, ParseError> {
    let mut file_seats: Option<usize> = None;
    let mut declared: BTreeSet<Candidate> = BTreeSet::new();
    let mut ballots: Vec<WeightedBallot> = Vec::new();
    let mut first_kind: Option<(ProfileKind, usize)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut designated = false;
        if let Some(rest) = body.strip_prefix('!') {
            let (word, arg) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            match word {
                "seats" => {
                    if file_seats.is_some() {
                        return err(line, "`!seats` given twice");
                    }
                    let s = arg.trim().parse::<usize>().ok().filter(|s| *s > 0);
                    file_seats = Some(s.map_or_else(|| err(line, format!("invalid seat count `{}`", arg.trim())), Ok)?);
                    continue;
                }
                "candidates" => {
                    declared.extend(names(line, arg)?);
                    continue;
                }
                "W" => {
                    designated = true;
                    body = arg.trim();
                }
                other => return err(line, format!("unknown directive `!{other}`")),
            }
        }
        let Some((weight, ballot)) = body.split_once(':') else {
            return err(line, "expected `<weight> : <ballot>`");
        };
        let weight: Rational = weight
            .trim()
            .parse()
            .or_else(|_| err(line, format!("invalid weight `{}`", weight.trim())))?;
        if !weight.is_positive() {
            return err(line, format!("weight must be positive, got {weight}"));
        }
        let content = parse_ballot(line, ballot)?;
        if content.is_empty() {
            return err(line, "empty ballot");
        }
        match first_kind {
            None => first_kind = Some((content.kind(), line)),
            Some((k, at)) if k != content.kind() => {
                return err(
                    line,
                    format!("{} ballot after {} ballots (first on line {at})", content.kind().name(), k.name()),
                );
            }
            Some(_) => {}
        }
        ballots.push(WeightedBallot { content, weight, designated });
    }

    let seats = seats.or(file_seats).map_or_else(|| err(0, "missing `!seats` directive"), Ok)?;
    if ballots.is_empty() {
        return err(0, "no ballot groups");
    }
    let mut universe = declared;
    universe.extend(ballots.iter().flat_map(|b| b.content.names().into_iter().cloned()));
    Profile::with_candidates(ballots, universe, seats).map_err(|e| ParseError { line: 0, message: e.to_string() })
}

/// Render a profile in the file format; `parse_profile` reads it back to an
/// equal profile.
pub fn write_profile(profile: &Profile) -> String {
    let mut out = format!("!seats {}\n", profile.seats());
    let named: BTreeSet<&Candidate> = profile.ballots().iter().flat_map(|b| b.content.names()).collect();
    let extra: Vec<&str> = profile.candidates().iter().filter(|c| !named.contains(c)).map(Candidate::as_str).collect();
    if !extra.is_empty() {
        out.push_str(&format!("!candidates {}\n", extra.join(" ")));
    }
    for b in profile.ballots() {
        let mark = if b.designated { "!W " } else { "" };
        out.push_str(&format!("{mark}{} : {}\n", b.weight, b.content));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_all_ballot_forms() {
        let p = parse_profile("!seats 2\n# c\n3 : {A B}\n!W 1/2 : {C}\n", None).unwrap();
        assert_eq!(p.seats(), 2);
        assert_eq!(p.ballots().len(), 2);
        assert!(p.ballots()[1].designated);
        assert_eq!(p.designated_weight(), Rational::ratio(1, 2));
        let p = parse_profile("!seats 1\n2 : [B A]\n", None).unwrap();
        assert_eq!(p.kind(), ProfileKind::Ordered);
        let p = parse_profile("!seats 4\n5 : party P\n3 : party Q\n", None).unwrap();
        assert_eq!(p.kind(), ProfileKind::Party);
    }

    #[test]
    fn declared_candidates_join_the_universe() {
        let p = parse_profile("!seats 2\n!candidates Z\n1 : {A}\n", None).unwrap();
        assert_eq!(p.candidates().len(), 2);
        let text = write_profile(&p);
        assert!(text.contains("!candidates Z"));
        assert_eq!(parse_profile(&text, None).unwrap(), p);
    }

    #[test]
    fn errors_name_the_line() {
        let cases = [
            ("!seats 2\n1 : {A B\n", 2),
            ("!seats 2\n\n1 : {A}\n2 : [B]\n", 4),
            ("!seats x\n", 1),
            ("!seats 1\n0 : {A}\n", 2),
            ("!seats 1\nabc : {A}\n", 2),
            ("!seats 1\n1 {A}\n", 2),
            ("!seats 1\n!frob\n", 2),
            ("!seats 1\n1 : [A A]\n", 2),
            ("!seats 1\n1 : party\n", 2),
            ("1 : {A}\n", 0),
        ];
        for (text, line) in cases {
            let e = parse_profile(text, None).unwrap_err();
            assert_eq!(e.line, line, "{text:?}: {e}");
        }
    }

    #[test]
    fn seat_override() {
        let p = parse_profile("1 : {A}\n1 : {B}\n", Some(2)).unwrap();
        assert_eq!(p.seats(), 2);
    }
}
