//! Penn Treebank word tokenization.
//!
//! A port of the classic Treebank sed rules (the same rule set NLTK ships as
//! `TreebankWordTokenizer`): punctuation is padded with spaces, clitics such
//! as `n't` and `'ll` are split off, double quotes become `` and '', and a
//! sentence-final period is separated. Hyphenated words stay whole.

use std::sync::OnceLock;

use regex::Regex;

struct Rule {
    re: Regex,
    rep: &'static str,
}

impl Rule {
    fn new(pattern: &str, rep: &'static str) -> Self {
        Self {
            re: Regex::new(pattern).expect("static tokenizer pattern"),
            rep,
        }
    }

    fn apply(&self, text: String) -> String {
        match self.re.replace_all(&text, self.rep) {
            std::borrow::Cow::Borrowed(_) => text,
            std::borrow::Cow::Owned(s) => s,
        }
    }
}

struct Rules {
    before_pad: Vec<Rule>,
    after_pad: Vec<Rule>,
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| Rules {
        before_pad: vec![
            // starting quotes
            Rule::new(r#"^""#, "``"),
            Rule::new(r"(``)", " $1 "),
            Rule::new(r#"([ (\[{<])("|'{2})"#, "$1 `` "),
            // punctuation
            Rule::new(r"([:,])([^\d])", " $1 $2"),
            Rule::new(r"([:,])$", " $1 "),
            Rule::new(r"\.\.\.", " ... "),
            Rule::new(r"[;@#$%&]", " $0 "),
            Rule::new(r#"([^.])(\.)([\])}>"']*)\s*$"#, "$1 $2$3 "),
            Rule::new(r"[?!]", " $0 "),
            Rule::new(r"([^'])' ", "$1 ' "),
            // brackets
            Rule::new(r"[\]\[(){}<>]", " $0 "),
            Rule::new(r"--", " -- "),
        ],
        after_pad: vec![
            // ending quotes
            Rule::new(r"''", " '' "),
            Rule::new(r#"""#, " '' "),
            Rule::new(r"([^' ])('[sS]|'[mM]|'[dD]|') ", "$1 $2 "),
            Rule::new(r"([^' ])('ll|'LL|'re|'RE|'ve|'VE|n't|N'T) ", "$1 $2 "),
            // two-part contractions
            Rule::new(r"(?i)\b(can)(not)\b", " $1 $2 "),
            Rule::new(r"(?i)\b(d)('ye)\b", " $1 $2 "),
            Rule::new(r"(?i)\b(gim)(me)\b", " $1 $2 "),
            Rule::new(r"(?i)\b(gon)(na)\b", " $1 $2 "),
            Rule::new(r"(?i)\b(got)(ta)\b", " $1 $2 "),
            Rule::new(r"(?i)\b(lem)(me)\b", " $1 $2 "),
            Rule::new(r"(?i)\b(more)('n)\b", " $1 $2 "),
            Rule::new(r"(?i)\b(wan)(na)(\s)", " $1 $2 $3"),
            Rule::new(r"(?i) ('t)(is)\b", " $1 $2 "),
            Rule::new(r"(?i) ('t)(was)\b", " $1 $2 "),
        ],
    })
}

/// Tokenizes one sentence with the Treebank rules, exactly as the reference
/// implementation does. Periods that are not sentence-final stay attached.
pub fn treebank_tokenize(text: &str) -> Vec<String> {
    let r = rules();
    let mut s = text.to_owned();
    for rule in &r.before_pad {
        s = rule.apply(s);
    }
    s = format!(" {s} ");
    for rule in &r.after_pad {
        s = rule.apply(s);
    }
    s.split_whitespace().map(str::to_owned).collect()
}

/// Cuts after every period that is followed by whitespace.
fn sentences(text: &str) -> impl Iterator<Item = &str> {
    let mut start = 0;
    let mut cuts = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c == '.' && chars.peek().is_some_and(|&(_, n)| n.is_whitespace()) {
            cuts.push(&text[start..=i]);
            start = i + 1;
        }
    }
    cuts.push(&text[start..]);
    cuts.into_iter()
}

/// Treebank tokenization applied sentence by sentence, so a period ending any
/// sentence (not just the last one) becomes its own token.
///
/// ```
/// use exregen::textproc::tokenize;
/// assert_eq!(tokenize("Grass snakes live in grass."), ["Grass", "snakes", "live", "in", "grass", "."]);
/// assert_eq!(tokenize("don't"), ["do", "n't"]);
/// ```
pub fn tokenize(text: &str) -> Vec<String> {
    sentences(text).flat_map(treebank_tokenize).collect()
}
