//! English spelling of cardinal and ordinal numbers.

const ONES: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen",
];

const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

/// Largest value [`cardinal`] accepts.
pub const MAX_NUMBER: u64 = 999_999_999;

fn push_below_thousand(n: u64, out: &mut Vec<&'static str>) {
    debug_assert!(n < 1000);
    let hundreds = n / 100;
    let rest = n % 100;
    if hundreds > 0 {
        out.push(ONES[hundreds as usize]);
        out.push("hundred");
    }
    if rest == 0 {
        return;
    }
    if rest < 20 {
        out.push(ONES[rest as usize]);
    } else {
        out.push(TENS[(rest / 10) as usize]);
        if rest % 10 != 0 {
            out.push(ONES[(rest % 10) as usize]);
        }
    }
}

/// Cardinal words for `n`, space separated (no hyphens, no "and").
///
/// Returns `None` above [`MAX_NUMBER`].
pub fn cardinal(n: u64) -> Option<String> {
    if n > MAX_NUMBER {
        return None;
    }
    if n == 0 {
        return Some(ONES[0].to_string());
    }
    let mut words = Vec::new();
    let millions = n / 1_000_000;
    let thousands = (n / 1000) % 1000;
    let rest = n % 1000;
    if millions > 0 {
        push_below_thousand(millions, &mut words);
        words.push("million");
    }
    if thousands > 0 {
        push_below_thousand(thousands, &mut words);
        words.push("thousand");
    }
    push_below_thousand(rest, &mut words);
    Some(words.join(" "))
}

fn ordinal_word(word: &str) -> String {
    match word {
        "one" => "first".into(),
        "two" => "second".into(),
        "three" => "third".into(),
        "five" => "fifth".into(),
        "eight" => "eighth".into(),
        "nine" => "ninth".into(),
        "twelve" => "twelfth".into(),
        w if w.ends_with('y') => format!("{}ieth", &w[..w.len() - 1]),
        w => format!("{w}th"),
    }
}

/// Ordinal words for `n` ("twenty first").
pub fn ordinal(n: u64) -> Option<String> {
    let card = cardinal(n)?;
    let (head, last) = match card.rsplit_once(' ') {
        Some((h, l)) => (Some(h), l),
        None => (None, card.as_str()),
    };
    let last = ordinal_word(last);
    Some(match head {
        Some(h) => format!("{h} {last}"),
        None => last,
    })
}

/// Digits read one by one, as after a decimal point.
pub fn digits(s: &str) -> String {
    s.chars()
        .filter_map(|c| c.to_digit(10))
        .map(|d| ONES[d as usize])
        .collect::<Vec<_>>()
        .join(" ")
}
