const PUNCT: [char; 5] = ['.', ',', '!', '?', ';'];

/// Whitespace tokenizer that splits leading and trailing `. , ! ? ;` into
/// their own tokens. Case is preserved.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let lead = chunk.chars().take_while(|c| PUNCT.contains(c)).count();
        if lead == chunk.chars().count() {
            out.extend(chunk.chars().map(String::from));
            continue;
        }
        let trail = chunk.chars().rev().take_while(|c| PUNCT.contains(c)).count();
        let chars: Vec<char> = chunk.chars().collect();
        out.extend(chars[..lead].iter().map(|c| c.to_string()));
        out.push(chars[lead..chars.len() - trail].iter().collect());
        out.extend(chars[chars.len() - trail..].iter().map(|c| c.to_string()));
    }
    out
}
