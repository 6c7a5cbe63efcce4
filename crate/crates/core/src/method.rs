//! Method identifiers and a single dispatcher to the counting engines.

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::ballots::{CountOptions, OutcomeSet, Profile, ProfileKind, WeightScheme};
use crate::error::{Error, Result};
use crate::numerics::Rational;
use crate::ordered::{borda_count, phragmen_ordered, stv_count, thiele_ordered};
use crate::party::{check_gamma, divisor_apportion, quota_apportion, Apportionment};
use crate::unordered::{
    phragmen_unordered, score_family_count, thiele_addition, thiele_elimination, thiele_optimize,
    PhragmenOutcome, ScoreRule,
};

/// Every election method covered by the threshold corpus.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MethodId {
    /// Divisor method with divisors `n - 1 + gamma`.
    Div(Rational),
    /// Quota method with quota `V/(S + delta)`.
    Quota(Rational),
    /// Block vote.
    BV,
    /// Approval vote.
    AV,
    /// Single non-transferable vote.
    SNTV,
    /// Limited vote with `L` names.
    LV(usize),
    /// Cumulative vote where each voter may split freely (no counting engine).
    CV,
    /// Cumulative vote split equally among the names on the ballot.
    CVq,
    /// Phragmén's method, unordered ballots.
    PhragmenU,
    ThieleOpt(WeightScheme),
    ThieleAdd(WeightScheme),
    ThieleElim,
    /// STV with quota `V/(S + delta)`.
    STV(Rational),
    /// Phragmén's method, ordered ballots.
    PhragmenO,
    /// Thiele's method, ordered ballots.
    ThieleO,
    /// Positional scoring with the given weights.
    Borda(WeightScheme),
}

impl MethodId {
    /// Ballot kind the method counts.
    pub fn ballot_kind(&self) -> ProfileKind {
        use MethodId::*;
        match self {
            Div(_) | Quota(_) => ProfileKind::Party,
            BV | AV | SNTV | LV(_) | CV | CVq | PhragmenU | ThieleOpt(_) | ThieleAdd(_) | ThieleElim => {
                ProfileKind::Unordered
            }
            STV(_) | PhragmenO | ThieleO | Borda(_) => ProfileKind::Ordered,
        }
    }

    /// Largest number of names a ballot may carry with `seats` seats.
    pub fn ballot_cap(&self, seats: usize) -> Option<usize> {
        match self {
            MethodId::BV => Some(seats),
            MethodId::SNTV => Some(1),
            MethodId::LV(l) => Some(*l),
            _ => None,
        }
    }

    pub fn has_engine(&self) -> bool {
        !matches!(self, MethodId::CV)
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use MethodId::*;
        match self {
            Div(g) => write!(f, "div:{g}"),
            Quota(d) => write!(f, "quota:{d}"),
            BV => f.write_str("bv"),
            AV => f.write_str("av"),
            SNTV => f.write_str("sntv"),
            LV(l) => write!(f, "lv:{l}"),
            CV => f.write_str("cv"),
            CVq => f.write_str("cvq"),
            PhragmenU => f.write_str("phragmen"),
            ThieleOpt(w) => write!(f, "thiele-opt:{w}"),
            ThieleAdd(w) => write!(f, "thiele-add:{w}"),
            ThieleElim => f.write_str("thiele-elim"),
            STV(d) => write!(f, "stv:{d}"),
            PhragmenO => f.write_str("phragmen-o"),
            ThieleO => f.write_str("thiele-o"),
            Borda(w) => write!(f, "borda:{w}"),
        }
    }
}

impl FromStr for MethodId {
    type Err = Error;

    /// Tokens: `div:G`, `dhondt`, `stl`, `adams`, `quota:D`, `hare`, `droop`,
    /// `bv`, `av`, `sntv`, `lv:L`, `cv`, `cvq`, `phragmen`,
    /// `thiele-opt[:scheme]`, `thiele-add[:scheme]`, `thiele-elim`,
    /// `stv[:D]`, `phragmen-o`, `thiele-o`, `borda[:scheme]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let head = head.to_ascii_lowercase();
        let scheme = || -> Result<WeightScheme> { arg.map_or(Ok(WeightScheme::Harmonic), str::parse) };
        let rational = |default: i64| -> Result<Rational> {
            arg.map_or(Ok(Rational::from_integer(default)), str::parse)
        };
        let no_arg = |m: MethodId| -> Result<MethodId> {
            match arg {
                None => Ok(m),
                Some(_) => Err(Error::InvalidParameter(format!("method `{head}` takes no parameter"))),
            }
        };
        match head.as_str() {
            "div" => {
                let g = rational(1)?;
                check_gamma(&g)?;
                Ok(MethodId::Div(g))
            }
            "dhondt" => no_arg(MethodId::Div(Rational::one())),
            "stl" | "sainte-lague" => no_arg(MethodId::Div(Rational::ratio(1, 2))),
            "adams" => no_arg(MethodId::Div(Rational::zero())),
            "quota" => Ok(MethodId::Quota(rational(0)?)),
            "hare" | "lr" => no_arg(MethodId::Quota(Rational::zero())),
            "droop" => no_arg(MethodId::Quota(Rational::one())),
            "bv" => no_arg(MethodId::BV),
            "av" => no_arg(MethodId::AV),
            "sntv" => no_arg(MethodId::SNTV),
            "lv" => {
                let l = arg
                    .and_then(|a| a.trim().parse::<usize>().ok())
                    .filter(|&l| l >= 1)
                    .ok_or_else(|| Error::InvalidParameter("limited vote needs `lv:L` with L >= 1".into()))?;
                Ok(MethodId::LV(l))
            }
            "cv" => no_arg(MethodId::CV),
            "cvq" => no_arg(MethodId::CVq),
            "phragmen" | "phragmen-u" => no_arg(MethodId::PhragmenU),
            "thiele-opt" => Ok(MethodId::ThieleOpt(scheme()?)),
            "thiele-add" => Ok(MethodId::ThieleAdd(scheme()?)),
            "thiele-elim" => no_arg(MethodId::ThieleElim),
            "stv" => {
                let d = rational(1)?;
                if d > 1 {
                    return Err(Error::InvalidParameter(format!("STV parameter {d} exceeds 1")));
                }
                Ok(MethodId::STV(d))
            }
            "phragmen-o" => no_arg(MethodId::PhragmenO),
            "thiele-o" => no_arg(MethodId::ThieleO),
            "borda" => Ok(MethodId::Borda(scheme()?)),
            _ => Err(Error::InvalidParameter(format!("unknown method `{s}`"))),
        }
    }
}

/// What a count produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Committees(OutcomeSet),
    Phragmen(PhragmenOutcome),
    Seats(Apportionment),
}

impl Outcome {
    /// Committees, for candidate-based methods.
    pub fn committees(&self) -> Option<&OutcomeSet> {
        match self {
            Outcome::Committees(o) => Some(o),
            Outcome::Phragmen(p) => Some(&p.outcomes),
            Outcome::Seats(_) => None,
        }
    }

    pub fn truncated(&self) -> bool {
        match self {
            Outcome::Committees(o) => o.truncated,
            Outcome::Phragmen(p) => p.outcomes.truncated,
            Outcome::Seats(a) => a.truncated,
        }
    }
}

/// Count `profile` with `method`.
pub fn count(method: &MethodId, profile: &Profile, opts: &CountOptions) -> Result<Outcome> {
    use MethodId::*;
    let kind = method.ballot_kind();
    profile.expect_kind(kind)?;
    let cap = opts.branch_cap;
    Ok(match method {
        Div(g) => Outcome::Seats(divisor_apportion(g, profile, cap)?),
        Quota(d) => Outcome::Seats(quota_apportion(d, profile, cap)?),
        BV => Outcome::Committees(score_family_count(ScoreRule::BlockVote, profile, opts)?),
        AV => Outcome::Committees(score_family_count(ScoreRule::ApprovalVote, profile, opts)?),
        SNTV => Outcome::Committees(score_family_count(ScoreRule::Sntv, profile, opts)?),
        LV(l) => Outcome::Committees(score_family_count(ScoreRule::LimitedVote(*l), profile, opts)?),
        CVq => Outcome::Committees(score_family_count(ScoreRule::CumulativeEqual, profile, opts)?),
        CV => {
            return Err(Error::Unsupported(String::from(
                "cumulative voting with free splits has no counting engine; use cvq",
            )))
        }
        PhragmenU => Outcome::Phragmen(phragmen_unordered(profile, opts)?),
        ThieleOpt(w) => Outcome::Committees(thiele_optimize(w, profile, opts)?),
        ThieleAdd(w) => Outcome::Committees(thiele_addition(w, profile, opts)?),
        ThieleElim => Outcome::Committees(thiele_elimination(profile, opts)?),
        STV(d) => Outcome::Committees(stv_count(d, profile, opts)?.outcomes),
        PhragmenO => Outcome::Phragmen(phragmen_ordered(profile, opts)?),
        ThieleO => Outcome::Committees(thiele_ordered(profile, opts)?),
        Borda(w) => Outcome::Committees(borda_count(w, profile, opts)?),
    })
}
