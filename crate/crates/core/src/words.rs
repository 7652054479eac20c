//! Finite words over `{0, …, b−1}` and their textual forms.
//!
//! Words are written digit by digit (`"0110"`); letters ≥ 10 need the
//! comma-separated form (`"3,11,0"`).

use crate::error::{Error, Result};

pub type Word = Vec<usize>;

pub fn parse_word(text: &str) -> Result<Word> {
    let s = text.trim();
    if s.contains(',') {
        return s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad letter {t:?} in {s:?}")))
            })
            .collect();
    }
    s.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as usize)
                .ok_or_else(|| Error::Parse(format!("bad letter {c:?} in {s:?}")))
        })
        .collect()
}

pub fn format_word(word: &[usize]) -> String {
    if word.iter().all(|&l| l < 10) {
        word.iter().map(|l| char::from(b'0' + *l as u8)).collect()
    } else {
        word.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn check_letters(word: &[usize], size: usize) -> Result<()> {
    match word.iter().find(|&&l| l >= size) {
        Some(&letter) => Err(Error::LetterOutOfRange { letter, size }),
        None => Ok(()),
    }
}

/// All words of length `len` over `{0, …, size−1}` in lexicographic order.
pub fn all_words(size: usize, len: usize) -> impl Iterator<Item = Word> {
    let total = size
        .checked_pow(len as u32)
        .expect("word enumeration overflow");
    (0..total).map(move |mut index| {
        let mut w = vec![0; len];
        for slot in w.iter_mut().rev() {
            *slot = index % size;
            index /= size;
        }
        w
    })
}
