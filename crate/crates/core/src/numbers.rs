//! Number normalization: digit strings, separators, percentages, scale words
//! and English number words into a numeric value.
//!
//! Parsing is total: anything that is not a recognizable number expression
//! yields NaN.

use crate::scalar::Scalar;

/// Exact decimal `mant * 10^exp`, used so that "1.2 million" is exactly 1200000.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Decimal {
    mant: i128,
    exp: i32,
}

impl Decimal {
    const ZERO: Decimal = Decimal { mant: 0, exp: 0 };

    fn int(v: i128) -> Self {
        Decimal { mant: v, exp: 0 }
    }

    fn pow10(e: i32) -> Self {
        Decimal { mant: 1, exp: e }
    }

    fn align(self, exp: i32) -> Option<i128> {
        let shift = u32::try_from(self.exp - exp).ok()?;
        self.mant.checked_mul(10i128.checked_pow(shift)?)
    }

    fn add(self, o: Decimal) -> Option<Decimal> {
        let exp = self.exp.min(o.exp);
        Some(Decimal { mant: self.align(exp)?.checked_add(o.align(exp)?)?, exp })
    }

    fn mul(self, o: Decimal) -> Option<Decimal> {
        Some(Decimal { mant: self.mant.checked_mul(o.mant)?, exp: self.exp + o.exp })
    }

    fn neg(self) -> Decimal {
        Decimal { mant: -self.mant, exp: self.exp }
    }

    fn to_scalar<S: Scalar>(self) -> S {
        format!("{}e{}", self.mant, self.exp).parse().unwrap_or_else(|_| S::nan())
    }

    /// Parses `1,234.5` / `1234` / `.5`. Thousands groups must be exactly three digits.
    fn parse_literal(s: &str) -> Option<Decimal> {
        let (int_part, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac.is_empty() {
            return None;
        }
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits: String = if int_part.contains(',') {
            let groups: Vec<&str> = int_part.split(',').collect();
            let head_ok = (1..=3).contains(&groups[0].len());
            let rest_ok = groups[1..].iter().all(|g| g.len() == 3);
            if !head_ok || !rest_ok {
                return None;
            }
            groups.concat()
        } else {
            int_part.to_string()
        };
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let all = format!("{digits}{frac}");
        let all = all.trim_start_matches('0');
        let mant = if all.is_empty() { 0 } else { all.parse::<i128>().ok()? };
        Some(Decimal { mant, exp: -(frac.len() as i32) })
    }
}

fn small_word(w: &str) -> Option<i128> {
    const WORDS: [&str; 20] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
        "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
    ];
    WORDS.iter().position(|x| *x == w).map(|i| i as i128)
}

fn tens_word(w: &str) -> Option<i128> {
    const TENS: [&str; 8] = ["twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"];
    TENS.iter().position(|x| *x == w).map(|i| (i as i128 + 2) * 10)
}

fn scale_word(w: &str) -> Option<i32> {
    match w {
        "thousand" | "k" => Some(3),
        "million" | "mn" => Some(6),
        "billion" | "bn" => Some(9),
        "trillion" | "tn" => Some(12),
        _ => None,
    }
}

fn is_number_word(w: &str) -> bool {
    small_word(w).is_some() || tens_word(w).is_some() || scale_word(w).is_some() || w == "hundred"
}

const QUALIFIERS: [&str; 14] = [
    "about", "around", "approximately", "approx", "approx.", "nearly", "almost", "roughly", "some", "over", "under",
    "just", "only", "circa",
];

const CURRENCY: [char; 6] = ['$', '€', '£', '¥', '₹', '₩'];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Prev {
    Start,
    A,
    Unit,
    Teen,
    Tens,
    Hundred,
    Scale,
    And,
    Literal,
}

struct WordParser {
    total: Decimal,
    current: Option<Decimal>,
    prev: Prev,
    last_scale: i32,
    percent: bool,
    saw_number: bool,
}

impl WordParser {
    fn new() -> Self {
        WordParser { total: Decimal::ZERO, current: None, prev: Prev::Start, last_scale: i32::MAX, percent: false, saw_number: false }
    }

    fn cur(&self) -> Decimal {
        self.current.unwrap_or(Decimal::ZERO)
    }

    fn push_value(&mut self, v: Decimal, kind: Prev) -> Option<()> {
        let allowed = match kind {
            Prev::Unit => matches!(self.prev, Prev::Start | Prev::Tens | Prev::Hundred | Prev::Scale | Prev::And),
            Prev::Teen | Prev::Tens => matches!(self.prev, Prev::Start | Prev::Hundred | Prev::Scale | Prev::And),
            Prev::Literal => matches!(self.prev, Prev::Start | Prev::Scale | Prev::And),
            _ => false,
        };
        if !allowed {
            return None;
        }
        self.current = Some(self.cur().add(v)?);
        self.prev = kind;
        self.saw_number = true;
        Some(())
    }

    fn hundred(&mut self) -> Option<()> {
        let base = match self.prev {
            Prev::A => Decimal::int(1),
            Prev::Unit | Prev::Teen | Prev::Literal => self.cur(),
            _ => return None,
        };
        self.current = Some(base.mul(Decimal::int(100))?);
        self.prev = Prev::Hundred;
        self.saw_number = true;
        Some(())
    }

    fn scale(&mut self, e: i32) -> Option<()> {
        let base = match self.prev {
            Prev::A => Decimal::int(1),
            Prev::Unit | Prev::Teen | Prev::Tens | Prev::Hundred | Prev::Literal => self.cur(),
            _ => return None,
        };
        if e >= self.last_scale {
            return None;
        }
        self.total = self.total.add(base.mul(Decimal::pow10(e))?)?;
        self.current = None;
        self.last_scale = e;
        self.prev = Prev::Scale;
        self.saw_number = true;
        Some(())
    }

    fn finish(self) -> Option<(Decimal, bool)> {
        if !self.saw_number || matches!(self.prev, Prev::A | Prev::And) {
            return None;
        }
        Some((self.total.add(self.cur())?, self.percent))
    }
}

/// Splits a digit token into its numeric literal and an attached suffix
/// (`10k` → `10`, `k`; `12.5%` → `12.5`, `%`).
fn split_literal(tok: &str) -> (&str, &str) {
    let end = tok.find(|c: char| !(c.is_ascii_digit() || c == ',' || c == '.')).unwrap_or(tok.len());
    (&tok[..end], &tok[end..])
}

/// Parses a number expression into its magnitude and whether it was a
/// percentage. The magnitude is *not* divided by 100.
fn parse_parts(expr: &str) -> Option<(Decimal, bool)> {
    let mut s = expr.trim().to_lowercase().replace('\u{2212}', "-");
    if s.is_empty() {
        return None;
    }
    for q in ["more than ", "less than ", "up to ", "as many as ", "as much as "] {
        if let Some(rest) = s.strip_prefix(q) {
            s = rest.to_string();
        }
    }
    let mut negative = false;
    let mut toks: Vec<String> = Vec::new();
    for raw in s.split_whitespace() {
        let raw = raw.trim_end_matches([',', ';', ':']);
        // Hyphenated number words ("twenty-one", "second-highest") split apart; a leading '-' is a sign.
        let (sign, body) = match raw.strip_prefix('-').or_else(|| raw.strip_prefix('+')) {
            Some(b) if toks.is_empty() => (raw.starts_with('-'), b),
            _ => (false, raw),
        };
        negative |= sign;
        let body = body.trim_start_matches(CURRENCY);
        let body = body.strip_prefix('-').map_or(body, |b| {
            negative = true;
            b
        });
        for part in body.split('-').filter(|p| !p.is_empty()) {
            toks.push(part.to_string());
        }
    }
    while let Some(first) = toks.first() {
        if QUALIFIERS.contains(&first.as_str()) {
            toks.remove(0);
        } else if first == "minus" || first == "negative" {
            negative = true;
            toks.remove(0);
        } else {
            break;
        }
    }

    let mut p = WordParser::new();
    let mut i = 0;
    while i < toks.len() {
        let t = toks[i].as_str();
        let next = toks.get(i + 1).map(String::as_str);
        if t.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
            let (lit, suffix) = split_literal(t);
            p.push_value(Decimal::parse_literal(lit)?, Prev::Literal)?;
            match suffix {
                "" => {}
                "%" => p.percent = true,
                s => p.scale(scale_word(s)?)?,
            }
        } else if t == "%" || t == "percent" || t == "pct" {
            if !p.saw_number {
                return None;
            }
            p.percent = true;
        } else if t == "per" && next == Some("cent") {
            p.percent = true;
            i += 1;
        } else if t == "a" && p.prev == Prev::Start {
            p.prev = Prev::A;
        } else if t == "and" && matches!(p.prev, Prev::Hundred | Prev::Scale) {
            p.prev = Prev::And;
        } else if t == "hundred" {
            p.hundred()?;
        } else if let Some(e) = scale_word(t) {
            p.scale(e)?;
        } else if t == "zero" {
            if p.prev != Prev::Start {
                return None;
            }
            p.push_value(Decimal::ZERO, Prev::Literal)?;
        } else if let Some(v) = small_word(t) {
            p.push_value(Decimal::int(v), if v < 10 { Prev::Unit } else { Prev::Teen })?;
        } else if let Some(v) = tens_word(t) {
            p.push_value(Decimal::int(v), Prev::Tens)?;
        } else if t == "point" && matches!(p.prev, Prev::Unit | Prev::Teen | Prev::Tens | Prev::Literal) {
            let mut frac = Decimal::ZERO;
            let mut digits = 0;
            while let Some(d) = toks.get(i + 1).and_then(|w| small_word(w)).filter(|d| *d < 10) {
                digits += 1;
                frac = frac.add(Decimal { mant: d, exp: -digits })?;
                i += 1;
            }
            if digits == 0 {
                return None;
            }
            p.current = Some(p.cur().add(frac)?);
            p.prev = Prev::Literal;
        } else if p.saw_number && t.chars().all(|c| c.is_alphabetic() || c == '.') {
            // Trailing unit words ("meters", "pounds of carbon"): ignore, unless more numbers follow.
            let rest = &toks[i..];
            let more = rest.iter().any(|w| w.chars().any(|c| c.is_ascii_digit()) || is_number_word(w));
            if more {
                return None;
            }
            let pct = rest.iter().any(|w| w == "percent" || w == "%" || w == "pct");
            p.percent |= pct;
            break;
        } else {
            return None;
        }
        i += 1;
    }
    let (v, pct) = p.finish()?;
    Some((if negative { v.neg() } else { v }, pct))
}

/// Parses a number expression; percentages become fractions ("40%" → 0.4).
/// Unrecognizable input yields NaN.
pub fn parse_number<S: Scalar>(expr: &str) -> S {
    match parse_parts(expr) {
        Some((v, true)) => v.mul(Decimal::pow10(-2)).map_or_else(S::nan, Decimal::to_scalar),
        Some((v, false)) => v.to_scalar(),
        None => plain_float(expr),
    }
}

/// Like [`parse_number`] but keeps a percentage as its magnitude ("40%" → 40)
/// and reports whether a percent marker was present.
pub fn parse_magnitude<S: Scalar>(expr: &str) -> (S, bool) {
    match parse_parts(expr) {
        Some((v, pct)) => (v.to_scalar(), pct),
        None => (plain_float(expr), false),
    }
}

/// Long plain decimals (beyond exact decimal range) still parse.
fn plain_float<S: Scalar>(expr: &str) -> S {
    let t = expr.trim();
    let ok = !t.is_empty()
        && t.chars().enumerate().all(|(i, c)| c.is_ascii_digit() || c == '.' || (i == 0 && (c == '-' || c == '+')))
        && t.chars().any(|c| c.is_ascii_digit());
    if ok {
        t.parse().unwrap_or_else(|_| S::nan())
    } else {
        S::nan()
    }
}

/// Rank from ordinal wording: "2nd", "second-highest", "#3", "No. 4", "rank 5", "7".
pub fn parse_ordinal(text: &str) -> Option<u32> {
    const ORD: [&str; 20] = [
        "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth", "eleventh",
        "twelfth", "thirteenth", "fourteenth", "fifteenth", "sixteenth", "seventeenth", "eighteenth", "nineteenth",
        "twentieth",
    ];
    let lower = text.to_lowercase();
    for tok in lower.split(|c: char| c.is_whitespace() || c == '-' || c == ',') {
        let tok = tok.trim_matches(|c: char| !c.is_alphanumeric());
        if tok.is_empty() {
            continue;
        }
        if let Some(i) = ORD.iter().position(|w| *w == tok) {
            return Some(i as u32 + 1);
        }
        let digits: String = tok.chars().take_while(|c| c.is_ascii_digit()).collect();
        if !digits.is_empty() {
            let rest = &tok[digits.len()..];
            if matches!(rest, "" | "st" | "nd" | "rd" | "th") {
                return digits.parse().ok().filter(|n| *n > 0);
            }
        }
    }
    None
}
