//! Turkish-aware case folding and the ASCII display fold.

/// Lower-cases with Turkish dotted/dotless I rules: `I` -> `ı`, `İ` -> `i`.
pub fn turkish_lowercase(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            'I' => out.push('ı'),
            'İ' => out.push('i'),
            c => out.extend(c.to_lowercase()),
        }
    }
    out
}

/// Replaces Turkish special letters with the nearest ASCII capital, the way
/// terminals without Turkish fonts used to show them: `ç` -> `C`, `ğ` -> `G`,
/// `ı` -> `I`, `ö` -> `O`, `ş` -> `S`, `ü` -> `U` (upper-case forms too).
pub fn ascii_fold(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            'ç' | 'Ç' => 'C',
            'ğ' | 'Ğ' => 'G',
            'ı' | 'İ' => 'I',
            'ö' | 'Ö' => 'O',
            'ş' | 'Ş' => 'S',
            'ü' | 'Ü' => 'U',
            c => c,
        })
        .collect()
}
